//! `POST <endpoint>/chat/completions` transport.

use serde::{Deserialize, Serialize};

use super::{BackendConfig, BackendError, ChatMessage, Transcript, Transport};

const EXCERPT_LEN: usize = 200;

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: &'a [ChatMessage],
    temperature: f64,
    max_tokens: u32,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    message: ResponseMessage,
}

#[derive(Deserialize)]
struct ResponseMessage {
    content: Option<String>,
}

/// Blocking client for OpenAI-compatible chat completion servers.
pub struct HttpTransport {
    agent: ureq::Agent,
}

impl HttpTransport {
    pub fn new(config: &BackendConfig) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(config.timeout))
            .http_status_as_error(false)
            .build()
            .new_agent();
        Self { agent }
    }
}

/// `<endpoint_url>/chat/completions`
pub fn completions_url(endpoint_url: &str) -> String {
    format!("{}/chat/completions", endpoint_url.trim_end_matches('/'))
}

fn excerpt(body: &str) -> String {
    let mut s: String = body.chars().take(EXCERPT_LEN).collect();
    if s.len() < body.len() {
        s.push_str("...");
    }
    s
}

fn map_transport_error(err: ureq::Error) -> BackendError {
    match err {
        ureq::Error::Timeout(_) => BackendError::Timeout,
        ureq::Error::Io(e) if e.kind() == std::io::ErrorKind::TimedOut => BackendError::Timeout,
        ureq::Error::Io(_) | ureq::Error::HostNotFound | ureq::Error::ConnectionFailed | ureq::Error::BodyStalled => {
            BackendError::Connection(err.to_string())
        }
        other => BackendError::ProtocolError {
            status: 0,
            excerpt: excerpt(&other.to_string()),
        },
    }
}

/// Map a non-success status to the error taxonomy.
pub fn classify_status(status: u16, body: &str) -> BackendError {
    match status {
        401 | 403 => BackendError::AuthError { status },
        429 => BackendError::RateLimited,
        408 => BackendError::Timeout,
        500..=599 => BackendError::ServerError { status },
        _ => BackendError::ProtocolError {
            status,
            excerpt: excerpt(body),
        },
    }
}

impl Transport for HttpTransport {
    fn send(&self, config: &BackendConfig, transcript: &Transcript) -> Result<String, BackendError> {
        let body = ChatRequest {
            model: &config.model_name,
            messages: transcript.messages(),
            temperature: config.temperature,
            max_tokens: config.max_output_tokens,
        };
        let mut request = self.agent.post(completions_url(&config.endpoint_url));
        if let Ok(key) = std::env::var(&config.api_key_env) {
            if !key.is_empty() {
                request = request.header("Authorization", format!("Bearer {key}"));
            }
        }
        let mut response = request.send_json(&body).map_err(map_transport_error)?;
        let status = response.status().as_u16();
        let text = response.body_mut().read_to_string().map_err(map_transport_error)?;
        if !(200..300).contains(&status) {
            return Err(classify_status(status, &text));
        }
        let parsed: ChatResponse = serde_json::from_str(&text).map_err(|e| BackendError::ProtocolError {
            status,
            excerpt: excerpt(&format!("{e}: {text}")),
        })?;
        parsed
            .choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .ok_or_else(|| BackendError::ProtocolError {
                status,
                excerpt: excerpt(&format!("no assistant content in response: {text}")),
            })
    }
}
