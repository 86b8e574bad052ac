//! Scripted, network-free transport for tests and dry runs.

use std::collections::{HashMap, VecDeque};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use super::{BackendConfig, BackendError, Transcript, Transport};
use crate::dataset::LabeledCommand;
use crate::prompt::answer_line;

/// Maps a transcript to a response; `None` means unscripted.
pub type MockScript = dyn Fn(&Transcript) -> Option<Result<String, BackendError>> + Send + Sync;

/// Counts calls and tracks the peak number of concurrent calls.
pub struct MockTransport {
    script: Box<MockScript>,
    delay: Option<Duration>,
    calls: AtomicUsize,
    in_flight: AtomicUsize,
    peak_in_flight: AtomicUsize,
}

impl MockTransport {
    pub fn from_fn<F>(script: F) -> Self
    where
        F: Fn(&Transcript) -> Option<Result<String, BackendError>> + Send + Sync + 'static,
    {
        Self {
            script: Box::new(script),
            delay: None,
            calls: AtomicUsize::new(0),
            in_flight: AtomicUsize::new(0),
            peak_in_flight: AtomicUsize::new(0),
        }
    }

    /// Responses keyed by the final user message.
    pub fn from_map(entries: impl IntoIterator<Item = (String, String)>) -> Self {
        let map: HashMap<String, String> = entries.into_iter().collect();
        Self::from_fn(move |t| {
            t.final_user_message()
                .and_then(|cmd| map.get(cmd))
                .map(|text| Ok(text.clone()))
        })
    }

    /// Answers each command with its gold vector in the shot answer format.
    pub fn gold_oracle(commands: &[LabeledCommand]) -> Self {
        Self::from_map(commands.iter().map(|c| {
            (
                c.text.clone(),
                format!("Explanation: (oracle)\n{}", answer_line(&c.gold)),
            )
        }))
    }

    /// Returns the given results in order, one per call, regardless of input.
    pub fn sequence(results: Vec<Result<String, BackendError>>) -> Self {
        let queue = Mutex::new(VecDeque::from(results));
        Self::from_fn(move |_| queue.lock().unwrap().pop_front())
    }

    /// Sleep this long inside every call.
    pub fn with_delay(mut self, delay: Duration) -> Self {
        self.delay = Some(delay);
        self
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    pub fn peak_in_flight(&self) -> usize {
        self.peak_in_flight.load(Ordering::SeqCst)
    }
}

impl Transport for MockTransport {
    fn send(&self, _config: &BackendConfig, transcript: &Transcript) -> Result<String, BackendError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        let now = self.in_flight.fetch_add(1, Ordering::SeqCst) + 1;
        self.peak_in_flight.fetch_max(now, Ordering::SeqCst);
        if let Some(delay) = self.delay {
            std::thread::sleep(delay);
        }
        let result = (self.script)(transcript).unwrap_or(Err(BackendError::UnscriptedInput));
        self.in_flight.fetch_sub(1, Ordering::SeqCst);
        result
    }
}
