use std::path::Path;
use std::sync::{Condvar, Mutex};
use std::time::Duration;

use thiserror::Error;

use crate::backend::{Backend, HttpBackend, Recorder, ReplayBackend, ScriptedBackend};
use crate::config::{BackendKind, ProviderConfig};
use crate::message::{ChatMessage, CompletionRequest};

#[derive(Debug, Error)]
pub enum GatewayError {
    #[error("replay miss: no recorded response for fingerprint {fingerprint} ({summary})")]
    ReplayMiss { fingerprint: String, summary: String },
    #[error("scripted backend has no responses left")]
    ScriptExhausted,
    #[error("scripted backend has no rule matching request ({0})")]
    NoRule(String),
    #[error("environment variable {0} holding the API key is not set")]
    MissingApiKey(String),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("HTTP {status}: {body}")]
    Http { status: u16, body: String },
    #[error("fixture: {0}")]
    Fixture(String),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("invalid provider config: {0}")]
    Config(String),
}

/// Thread-safe front door to a backend that bounds requests in flight.
pub struct Gateway {
    backend: Box<dyn Backend>,
    limit: usize,
    in_flight: Mutex<usize>,
    freed: Condvar,
    pub model_id: String,
    pub temperature: f64,
    pub max_tokens: u32,
}

impl Gateway {
    pub fn new(backend: Box<dyn Backend>, max_concurrent: usize) -> Gateway {
        Gateway {
            backend,
            limit: max_concurrent.max(1),
            in_flight: Mutex::new(0),
            freed: Condvar::new(),
            model_id: "gpt-3.5-turbo".to_string(),
            temperature: 0.0,
            max_tokens: 512,
        }
    }

    /// Builds the configured backend. Relative fixture and script paths
    /// resolve against `base_dir`. With `record_to`, every response is
    /// also appended to that fixture file.
    pub fn from_config(cfg: &ProviderConfig, base_dir: &Path, record_to: Option<&Path>) -> Result<Gateway, GatewayError> {
        cfg.validate().map_err(GatewayError::Config)?;
        let backend: Box<dyn Backend> = match cfg.backend {
            BackendKind::Http => {
                let h = cfg.http.as_ref().expect("validated");
                Box::new(HttpBackend::new(
                    &h.endpoint_url,
                    &h.api_key_env_var_name,
                    Duration::from_secs(cfg.timeout_secs),
                    cfg.retry_limit,
                )?)
            }
            BackendKind::Replay => {
                Box::new(ReplayBackend::load(&base_dir.join(&cfg.replay.as_ref().expect("validated").fixture_path))?)
            }
            BackendKind::Scripted => {
                Box::new(ScriptedBackend::load(&base_dir.join(&cfg.scripted.as_ref().expect("validated").script_path))?)
            }
        };
        let backend: Box<dyn Backend> = match record_to {
            Some(p) => Box::new(Recorder::new(backend, p)?),
            None => backend,
        };
        let mut g = Gateway::new(backend, cfg.max_concurrent_requests);
        g.model_id = cfg.model_id.clone();
        g.temperature = cfg.temperature;
        g.max_tokens = cfg.max_tokens;
        Ok(g)
    }

    pub fn with_model(mut self, model_id: impl Into<String>) -> Gateway {
        self.model_id = model_id.into();
        self
    }

    /// A request for `messages` using the gateway's model settings.
    pub fn request(&self, messages: Vec<ChatMessage>) -> CompletionRequest {
        CompletionRequest {
            model_id: self.model_id.clone(),
            messages,
            temperature: self.temperature,
            max_tokens: self.max_tokens,
        }
    }

    pub fn complete(&self, req: &CompletionRequest) -> Result<String, GatewayError> {
        req.validate().map_err(GatewayError::InvalidRequest)?;
        let _permit = self.acquire();
        self.backend.complete(req)
    }

    pub fn chat(&self, messages: Vec<ChatMessage>) -> Result<String, GatewayError> {
        self.complete(&self.request(messages))
    }

    fn acquire(&self) -> Permit<'_> {
        let mut n = self.in_flight.lock().expect("gateway lock");
        while *n >= self.limit {
            n = self.freed.wait(n).expect("gateway lock");
        }
        *n += 1;
        Permit { gateway: self }
    }
}

struct Permit<'a> {
    gateway: &'a Gateway,
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        let mut n = self.gateway.in_flight.lock().expect("gateway lock");
        *n -= 1;
        self.gateway.freed.notify_one();
    }
}
