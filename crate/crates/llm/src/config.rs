use std::path::PathBuf;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Http,
    Replay,
    Scripted,
}

impl std::str::FromStr for BackendKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "http" => Ok(BackendKind::Http),
            "replay" => Ok(BackendKind::Replay),
            "scripted" => Ok(BackendKind::Scripted),
            other => Err(format!("unknown backend '{other}' (expected http, replay or scripted)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HttpSettings {
    pub endpoint_url: String,
    /// Name of the environment variable holding the API key.
    pub api_key_env_var_name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReplaySettings {
    pub fixture_path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScriptedSettings {
    pub script_path: PathBuf,
}

/// Provider selection. Each backend has its own settings block; the block
/// of the selected backend must be present, the others are inert.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProviderConfig {
    pub backend: BackendKind,
    #[serde(default = "default_model")]
    pub model_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub http: Option<HttpSettings>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replay: Option<ReplaySettings>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scripted: Option<ScriptedSettings>,
    #[serde(default = "default_concurrency")]
    pub max_concurrent_requests: usize,
    #[serde(default = "default_retries")]
    pub retry_limit: u32,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
    #[serde(default)]
    pub temperature: f64,
    #[serde(default = "default_max_tokens")]
    pub max_tokens: u32,
}

fn default_model() -> String {
    "gpt-3.5-turbo".to_string()
}

fn default_concurrency() -> usize {
    4
}

fn default_retries() -> u32 {
    3
}

fn default_timeout() -> u64 {
    60
}

fn default_max_tokens() -> u32 {
    512
}

impl ProviderConfig {
    pub fn replay(fixture_path: impl Into<PathBuf>) -> ProviderConfig {
        ProviderConfig {
            backend: BackendKind::Replay,
            model_id: default_model(),
            http: None,
            replay: Some(ReplaySettings { fixture_path: fixture_path.into() }),
            scripted: None,
            max_concurrent_requests: default_concurrency(),
            retry_limit: default_retries(),
            timeout_secs: default_timeout(),
            temperature: 0.0,
            max_tokens: default_max_tokens(),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        match self.backend {
            BackendKind::Http if self.http.is_none() => return Err("backend 'http' needs an 'http' settings block".into()),
            BackendKind::Replay if self.replay.is_none() => {
                return Err("backend 'replay' needs a 'replay' settings block with fixture_path".into())
            }
            BackendKind::Scripted if self.scripted.is_none() => {
                return Err("backend 'scripted' needs a 'scripted' settings block with script_path".into())
            }
            _ => {}
        }
        if let Some(h) = &self.http {
            if h.api_key_env_var_name.is_empty() || h.api_key_env_var_name.contains(char::is_whitespace) {
                return Err("http.api_key_env_var_name must be an environment variable name".into());
            }
            if !(h.endpoint_url.starts_with("http://") || h.endpoint_url.starts_with("https://")) {
                return Err(format!("http.endpoint_url '{}' is not an http(s) URL", h.endpoint_url));
            }
        }
        if self.max_concurrent_requests == 0 {
            return Err("max_concurrent_requests must be positive".into());
        }
        if self.timeout_secs == 0 {
            return Err("timeout_secs must be positive".into());
        }
        if !(self.temperature >= 0.0) {
            return Err("temperature must be >= 0".into());
        }
        if self.max_tokens == 0 {
            return Err("max_tokens must be positive".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selected_backend_needs_its_block() {
        let mut c = ProviderConfig::replay("f.jsonl");
        assert!(c.validate().is_ok());
        c.backend = BackendKind::Http;
        assert!(c.validate().is_err());
        c.http = Some(HttpSettings {
            endpoint_url: "https://api.example.com/v1/chat/completions".into(),
            api_key_env_var_name: "LLM_API_KEY".into(),
        });
        assert!(c.validate().is_ok());
    }

    #[test]
    fn rejects_unknown_keys_and_inline_keys() {
        let text = r#"{"backend":"http","http":{"endpoint_url":"https://x","api_key_env_var_name":"K","api_key":"sk-123"}}"#;
        assert!(serde_json::from_str::<ProviderConfig>(text).is_err());
        let text = r#"{"backend":"replay","replay":{"fixture_path":"a"},"colour":1}"#;
        assert!(serde_json::from_str::<ProviderConfig>(text).is_err());
    }
}
