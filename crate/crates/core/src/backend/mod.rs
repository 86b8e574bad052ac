//! Chat-completion backends.
//!
//! [`Client`] wraps a [`Transport`] (the HTTP endpoint or a [`MockTransport`])
//! with a response cache, bounded retries and an in-flight limit. It can be
//! shared between threads.

mod cache;
mod http;
mod mock;

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Condvar, Mutex};
use std::time::{Duration, Instant};

use rand::RngExt;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use cache::{ResponseCache, CACHE_DIR_ENV, DEFAULT_CACHE_DIR};
pub use http::HttpTransport;
pub use mock::{MockScript, MockTransport};

/// Environment variable holding the bearer token, unless configured otherwise.
pub const DEFAULT_API_KEY_ENV: &str = "CMDREASON_API_KEY";

const MAX_BACKOFF: Duration = Duration::from_secs(60);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::System => "system",
            Role::User => "user",
            Role::Assistant => "assistant",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
}

impl ChatMessage {
    pub fn new(role: Role, content: impl Into<String>) -> Self {
        Self {
            role,
            content: content.into(),
        }
    }
}

/// The ordered messages of one request.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Transcript {
    messages: Vec<ChatMessage>,
}

impl Transcript {
    pub fn from_messages(messages: Vec<ChatMessage>) -> Self {
        Self { messages }
    }

    pub fn messages(&self) -> &[ChatMessage] {
        &self.messages
    }

    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    /// Content of the last user message, i.e. the command under test.
    pub fn final_user_message(&self) -> Option<&str> {
        self.messages
            .iter()
            .rev()
            .find(|m| m.role == Role::User)
            .map(|m| m.content.as_str())
    }

    /// Non-empty, opens with a system message, and no message is empty.
    pub fn validate(&self) -> Result<(), BackendError> {
        let first = self
            .messages
            .first()
            .ok_or_else(|| BackendError::InvalidTranscript("transcript is empty".into()))?;
        if first.role != Role::System {
            return Err(BackendError::InvalidTranscript(
                "first message must have role system".into(),
            ));
        }
        if let Some(i) = self.messages.iter().position(|m| m.content.is_empty()) {
            return Err(BackendError::InvalidTranscript(format!("message {i} is empty")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackendConfig {
    /// Base URL; requests go to `<endpoint_url>/chat/completions`.
    pub endpoint_url: String,
    pub model_name: String,
    pub temperature: f64,
    pub max_output_tokens: u32,
    pub timeout: Duration,
    pub max_retries: u32,
    pub max_in_flight: usize,
    /// Name of the environment variable holding the API key.
    pub api_key_env: String,
}

impl BackendConfig {
    pub fn new(endpoint_url: impl Into<String>, model_name: impl Into<String>) -> Self {
        Self {
            endpoint_url: endpoint_url.into(),
            model_name: model_name.into(),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), BackendError> {
        let bad = |m: &str| Err(BackendError::InvalidConfig(m.into()));
        if self.max_in_flight == 0 {
            return bad("max_in_flight must be at least 1");
        }
        if self.timeout.is_zero() {
            return bad("timeout must be positive");
        }
        if !self.temperature.is_finite() || self.temperature < 0.0 {
            return bad("temperature must be a finite value >= 0");
        }
        if self.model_name.is_empty() {
            return bad("model name is empty");
        }
        Ok(())
    }
}

impl Default for BackendConfig {
    fn default() -> Self {
        Self {
            endpoint_url: "http://localhost:8000/v1".into(),
            model_name: "gpt-4".into(),
            temperature: 0.0,
            max_output_tokens: 1024,
            timeout: Duration::from_secs(60),
            max_retries: 3,
            max_in_flight: 4,
            api_key_env: DEFAULT_API_KEY_ENV.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletionResult {
    pub raw_text: String,
    pub model_name: String,
    pub cache_key: String,
    pub cache_hit: bool,
    pub latency: Duration,
    /// Transport calls made; zero on a cache hit.
    pub attempt_count: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BackendError {
    #[error("authentication failed (status {status})")]
    AuthError { status: u16 },
    #[error("rate limited by endpoint")]
    RateLimited,
    #[error("request timed out")]
    Timeout,
    #[error("server error (status {status})")]
    ServerError { status: u16 },
    #[error("connection failed: {0}")]
    Connection(String),
    #[error("protocol error (status {status}): {excerpt}")]
    ProtocolError { status: u16, excerpt: String },
    #[error("gave up after {attempts} attempts: {last}")]
    RetriesExhausted { attempts: u32, last: Box<BackendError> },
    #[error("mock backend has no script entry for this transcript")]
    UnscriptedInput,
    #[error("invalid transcript: {0}")]
    InvalidTranscript(String),
    #[error("invalid backend config: {0}")]
    InvalidConfig(String),
    #[error("response cache: {0}")]
    Cache(String),
}

impl BackendError {
    /// Whether another attempt may succeed.
    pub fn is_retryable(&self) -> bool {
        matches!(
            self,
            BackendError::RateLimited
                | BackendError::Timeout
                | BackendError::ServerError { .. }
                | BackendError::Connection(_)
        )
    }
}

/// Something that turns a transcript into assistant text.
pub trait Transport: Send + Sync {
    fn send(&self, config: &BackendConfig, transcript: &Transcript) -> Result<String, BackendError>;
}

#[derive(Serialize)]
struct KeyMaterial<'a> {
    version: u32,
    model: &'a str,
    temperature: f64,
    max_tokens: u32,
    messages: &'a [ChatMessage],
}

/// Hex SHA-256 over model, decoding parameters and the full transcript.
/// The endpoint URL and API key are not part of the key.
pub fn cache_key(config: &BackendConfig, transcript: &Transcript) -> String {
    let material = KeyMaterial {
        version: 1,
        model: &config.model_name,
        temperature: config.temperature,
        max_tokens: config.max_output_tokens,
        messages: transcript.messages(),
    };
    let bytes = serde_json::to_vec(&material).expect("key material serializes");
    hex::encode(Sha256::digest(&bytes))
}

// Counting semaphore.
struct Limiter {
    available: Mutex<usize>,
    freed: Condvar,
}

struct Permit<'a>(&'a Limiter);

impl Limiter {
    fn new(n: usize) -> Self {
        Self {
            available: Mutex::new(n),
            freed: Condvar::new(),
        }
    }

    fn acquire(&self) -> Permit<'_> {
        let mut available = self.available.lock().unwrap();
        while *available == 0 {
            available = self.freed.wait(available).unwrap();
        }
        *available -= 1;
        Permit(self)
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        *self.0.available.lock().unwrap() += 1;
        self.0.freed.notify_one();
    }
}

/// Cached, retrying, concurrency-limited access to one model.
pub struct Client {
    config: BackendConfig,
    transport: Arc<dyn Transport>,
    cache: Option<ResponseCache>,
    limiter: Limiter,
    backoff_base: Duration,
    network_attempts: AtomicU64,
    cache_hits: AtomicU64,
}

impl Client {
    pub fn new(config: BackendConfig, transport: Arc<dyn Transport>) -> Result<Self, BackendError> {
        config.validate()?;
        Ok(Self {
            limiter: Limiter::new(config.max_in_flight),
            config,
            transport,
            cache: None,
            backoff_base: Duration::from_secs(1),
            network_attempts: AtomicU64::new(0),
            cache_hits: AtomicU64::new(0),
        })
    }

    /// Client for the HTTP endpoint named in `config`.
    pub fn http(config: BackendConfig) -> Result<Self, BackendError> {
        let transport = Arc::new(HttpTransport::new(&config));
        Self::new(config, transport)
    }

    pub fn with_cache(mut self, cache: ResponseCache) -> Self {
        self.cache = Some(cache);
        self
    }

    /// Base of the exponential backoff (default one second).
    pub fn with_backoff_base(mut self, base: Duration) -> Self {
        self.backoff_base = base;
        self
    }

    pub fn config(&self) -> &BackendConfig {
        &self.config
    }

    pub fn cache(&self) -> Option<&ResponseCache> {
        self.cache.as_ref()
    }

    pub fn cache_key(&self, transcript: &Transcript) -> String {
        cache_key(&self.config, transcript)
    }

    /// Transport calls made by this client so far.
    pub fn network_attempts(&self) -> u64 {
        self.network_attempts.load(Ordering::SeqCst)
    }

    pub fn cache_hits(&self) -> u64 {
        self.cache_hits.load(Ordering::SeqCst)
    }

    /// Look up the cache, otherwise call the transport with retries and
    /// store the successful answer.
    pub fn complete(&self, transcript: &Transcript) -> Result<CompletionResult, BackendError> {
        transcript.validate()?;
        let started = Instant::now();
        let key = self.cache_key(transcript);

        if let Some(cache) = &self.cache {
            if let Some(text) = cache.get(&key).map_err(|e| BackendError::Cache(e.to_string()))? {
                self.cache_hits.fetch_add(1, Ordering::SeqCst);
                return Ok(CompletionResult {
                    raw_text: text,
                    model_name: self.config.model_name.clone(),
                    cache_key: key,
                    cache_hit: true,
                    latency: started.elapsed(),
                    attempt_count: 0,
                });
            }
        }

        let mut attempt: u32 = 0;
        loop {
            attempt += 1;
            let outcome = {
                let _permit = self.limiter.acquire();
                self.network_attempts.fetch_add(1, Ordering::SeqCst);
                self.transport.send(&self.config, transcript)
            };
            match outcome {
                Ok(text) => {
                    if let Some(cache) = &self.cache {
                        cache.put(&key, &text).map_err(|e| BackendError::Cache(e.to_string()))?;
                    }
                    return Ok(CompletionResult {
                        raw_text: text,
                        model_name: self.config.model_name.clone(),
                        cache_key: key,
                        cache_hit: false,
                        latency: started.elapsed(),
                        attempt_count: attempt,
                    });
                }
                Err(err) if err.is_retryable() => {
                    if attempt > self.config.max_retries {
                        return Err(BackendError::RetriesExhausted {
                            attempts: attempt,
                            last: Box::new(err),
                        });
                    }
                    std::thread::sleep(self.backoff_delay(attempt));
                }
                Err(err) => return Err(err),
            }
        }
    }

    // Full jitter: uniform in [0, base * 2^(retry - 1)], capped.
    fn backoff_delay(&self, retry: u32) -> Duration {
        let ceiling = self
            .backoff_base
            .saturating_mul(1u32 << (retry - 1).min(16))
            .min(MAX_BACKOFF);
        if ceiling.is_zero() {
            return ceiling;
        }
        ceiling.mul_f64(rand::rng().random_range(0.0..=1.0))
    }
}
