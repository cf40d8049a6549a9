use std::collections::{HashMap, VecDeque};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::gateway::GatewayError;
use crate::message::{CompletionRequest, FixtureRecord, Role};

/// Something that turns a request into assistant text.
pub trait Backend: Send + Sync {
    fn complete(&self, req: &CompletionRequest) -> Result<String, GatewayError>;
}

// ---------------------------------------------------------------------------
// Replay

/// Answers from a JSONL fixture keyed by request fingerprint.
#[derive(Debug)]
pub struct ReplayBackend {
    records: HashMap<String, String>,
}

impl ReplayBackend {
    pub fn load(path: &Path) -> Result<ReplayBackend, GatewayError> {
        let file = File::open(path).map_err(|e| GatewayError::Fixture(format!("{}: {e}", path.display())))?;
        let mut records = HashMap::new();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| GatewayError::Fixture(format!("{}: {e}", path.display())))?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: FixtureRecord = serde_json::from_str(&line)
                .map_err(|e| GatewayError::Fixture(format!("{}:{}: {e}", path.display(), i + 1)))?;
            records.insert(rec.fingerprint, rec.response_text);
        }
        Ok(ReplayBackend { records })
    }

    pub fn from_records(records: impl IntoIterator<Item = FixtureRecord>) -> ReplayBackend {
        ReplayBackend { records: records.into_iter().map(|r| (r.fingerprint, r.response_text)).collect() }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

impl Backend for ReplayBackend {
    fn complete(&self, req: &CompletionRequest) -> Result<String, GatewayError> {
        let fp = req.fingerprint();
        self.records.get(&fp).cloned().ok_or_else(|| GatewayError::ReplayMiss { fingerprint: fp, summary: req.summary() })
    }
}

// ---------------------------------------------------------------------------
// Scripted

/// A substring rule: the first rule whose every `contains` entry occurs in
/// the last user message answers. Its responses are used in order and the
/// last one repeats.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rule {
    pub contains: Vec<String>,
    pub responses: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Script {
    Sequence { responses: Vec<String> },
    Rules { rules: Vec<Rule> },
}

#[derive(Debug)]
pub struct ScriptedBackend {
    state: Mutex<ScriptState>,
}

#[derive(Debug)]
enum ScriptState {
    Sequence(VecDeque<String>),
    Rules { rules: Vec<Rule>, used: Vec<usize> },
}

impl ScriptedBackend {
    pub fn new(script: Script) -> ScriptedBackend {
        let state = match script {
            Script::Sequence { responses } => ScriptState::Sequence(responses.into()),
            Script::Rules { rules } => {
                let used = vec![0; rules.len()];
                ScriptState::Rules { rules, used }
            }
        };
        ScriptedBackend { state: Mutex::new(state) }
    }

    pub fn sequence<S: Into<String>>(responses: impl IntoIterator<Item = S>) -> ScriptedBackend {
        ScriptedBackend::new(Script::Sequence { responses: responses.into_iter().map(Into::into).collect() })
    }

    pub fn load(path: &Path) -> Result<ScriptedBackend, GatewayError> {
        let text = std::fs::read_to_string(path).map_err(|e| GatewayError::Fixture(format!("{}: {e}", path.display())))?;
        let script: Script =
            serde_json::from_str(&text).map_err(|e| GatewayError::Fixture(format!("{}: {e}", path.display())))?;
        Ok(ScriptedBackend::new(script))
    }
}

impl Backend for ScriptedBackend {
    fn complete(&self, req: &CompletionRequest) -> Result<String, GatewayError> {
        let mut state = self.state.lock().expect("script lock");
        match &mut *state {
            ScriptState::Sequence(q) => q.pop_front().ok_or(GatewayError::ScriptExhausted),
            ScriptState::Rules { rules, used } => {
                let prompt = req.messages.iter().rev().find(|m| m.role == Role::User).map_or("", |m| m.content.as_str());
                let i = rules
                    .iter()
                    .position(|r| r.contains.iter().all(|c| prompt.contains(c.as_str())))
                    .ok_or_else(|| GatewayError::NoRule(req.summary()))?;
                let rule = &rules[i];
                let k = used[i].min(rule.responses.len().saturating_sub(1));
                used[i] += 1;
                rule.responses.get(k).cloned().ok_or(GatewayError::ScriptExhausted)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Recording

/// Wraps a backend and appends every successful exchange to a fixture file.
pub struct Recorder<B> {
    inner: B,
    path: PathBuf,
    sink: Mutex<File>,
}

impl<B: Backend> Recorder<B> {
    pub fn new(inner: B, path: &Path) -> Result<Recorder<B>, GatewayError> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| GatewayError::Fixture(format!("{}: {e}", dir.display())))?;
        }
        let sink = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| GatewayError::Fixture(format!("{}: {e}", path.display())))?;
        Ok(Recorder { inner, path: path.to_path_buf(), sink: Mutex::new(sink) })
    }

    /// Rewrites the fixture file sorted by fingerprint without duplicates,
    /// so recordings of concurrent runs are byte-stable.
    pub fn normalize(path: &Path) -> Result<usize, GatewayError> {
        let err = |e: std::io::Error| GatewayError::Fixture(format!("{}: {e}", path.display()));
        let text = std::fs::read_to_string(path).map_err(err)?;
        let mut records = std::collections::BTreeMap::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let rec: FixtureRecord = serde_json::from_str(line).map_err(|e| GatewayError::Fixture(e.to_string()))?;
            records.entry(rec.fingerprint.clone()).or_insert(rec);
        }
        let mut out = String::new();
        for rec in records.values() {
            out.push_str(&serde_json::to_string(rec).expect("record serializes"));
            out.push('\n');
        }
        std::fs::write(path, out).map_err(err)?;
        Ok(records.len())
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}

impl<B: Backend> Backend for Recorder<B> {
    fn complete(&self, req: &CompletionRequest) -> Result<String, GatewayError> {
        let response = self.inner.complete(req)?;
        let rec = FixtureRecord {
            fingerprint: req.fingerprint(),
            request_summary: req.summary(),
            response_text: response.clone(),
        };
        let mut line = serde_json::to_string(&rec).expect("record serializes");
        line.push('\n');
        let mut sink = self.sink.lock().expect("recorder lock");
        sink.write_all(line.as_bytes()).map_err(|e| GatewayError::Fixture(format!("{}: {e}", self.path.display())))?;
        Ok(response)
    }
}

impl Backend for Box<dyn Backend> {
    fn complete(&self, req: &CompletionRequest) -> Result<String, GatewayError> {
        (**self).complete(req)
    }
}

// ---------------------------------------------------------------------------
// HTTP

/// OpenAI-compatible chat-completions client.
pub struct HttpBackend {
    client: reqwest::blocking::Client,
    endpoint: String,
    api_key: String,
    retry_limit: u32,
}

#[derive(Serialize)]
struct WireRequest<'a> {
    model: &'a str,
    messages: &'a [crate::message::ChatMessage],
    temperature: f64,
    max_tokens: u32,
}

#[derive(Deserialize)]
struct WireResponse {
    choices: Vec<WireChoice>,
}

#[derive(Deserialize)]
struct WireChoice {
    message: WireMessage,
}

#[derive(Deserialize)]
struct WireMessage {
    content: Option<String>,
}

impl HttpBackend {
    /// Reads the API key from the environment variable `api_key_env_var`.
    pub fn new(endpoint: &str, api_key_env_var: &str, timeout: Duration, retry_limit: u32) -> Result<HttpBackend, GatewayError> {
        let api_key =
            std::env::var(api_key_env_var).map_err(|_| GatewayError::MissingApiKey(api_key_env_var.to_string()))?;
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| GatewayError::Transport(e.to_string()))?;
        Ok(HttpBackend { client, endpoint: endpoint.to_string(), api_key, retry_limit })
    }

    fn attempt(&self, req: &CompletionRequest) -> Result<String, (bool, GatewayError)> {
        let body = WireRequest {
            model: &req.model_id,
            messages: &req.messages,
            temperature: req.temperature,
            max_tokens: req.max_tokens,
        };
        let resp = self
            .client
            .post(&self.endpoint)
            .bearer_auth(&self.api_key)
            .json(&body)
            .send()
            .map_err(|e| (e.is_timeout() || e.is_connect(), GatewayError::Transport(e.to_string())))?;
        let status = resp.status();
        if !status.is_success() {
            let transient = status.as_u16() == 429 || status.is_server_error();
            let text = resp.text().unwrap_or_default();
            return Err((transient, GatewayError::Http { status: status.as_u16(), body: text.chars().take(500).collect() }));
        }
        let wire: WireResponse = resp.json().map_err(|e| (false, GatewayError::Transport(format!("bad response body: {e}"))))?;
        wire.choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .ok_or((false, GatewayError::Transport("response has no choices".into())))
    }
}

impl Backend for HttpBackend {
    fn complete(&self, req: &CompletionRequest) -> Result<String, GatewayError> {
        let mut attempt = 0;
        loop {
            match self.attempt(req) {
                Ok(text) => return Ok(text),
                Err((true, _)) if attempt < self.retry_limit => {
                    std::thread::sleep(Duration::from_millis(500 << attempt.min(5)));
                    attempt += 1;
                }
                Err((_, e)) => return Err(e),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::message::ChatMessage;

    fn req(text: &str) -> CompletionRequest {
        CompletionRequest::new("m", vec![ChatMessage::user(text)])
    }

    #[test]
    fn sequence_then_exhausted() {
        let b = ScriptedBackend::sequence(["X", "Y"]);
        assert_eq!(b.complete(&req("a")).unwrap(), "X");
        assert_eq!(b.complete(&req("a")).unwrap(), "Y");
        assert!(matches!(b.complete(&req("a")), Err(GatewayError::ScriptExhausted)));
    }

    #[test]
    fn rules_match_and_repeat_last() {
        let b = ScriptedBackend::new(Script::Rules {
            rules: vec![
                Rule { contains: vec!["din".into()], responses: vec!["one".into(), "two".into()] },
                Rule { contains: vec![], responses: vec!["fallback".into()] },
            ],
        });
        assert_eq!(b.complete(&req("din high")).unwrap(), "one");
        assert_eq!(b.complete(&req("din high")).unwrap(), "two");
        assert_eq!(b.complete(&req("din high")).unwrap(), "two");
        assert_eq!(b.complete(&req("other")).unwrap(), "fallback");
    }

    #[test]
    fn record_then_replay() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fx.jsonl");
        let rec = Recorder::new(ScriptedBackend::sequence(["first", "second"]), &path).unwrap();
        assert_eq!(rec.complete(&req("q2")).unwrap(), "first");
        assert_eq!(rec.complete(&req("q1")).unwrap(), "second");
        drop(rec);
        assert_eq!(Recorder::<ScriptedBackend>::normalize(&path).unwrap(), 2);
        let replay = ReplayBackend::load(&path).unwrap();
        assert_eq!(replay.complete(&req("q1")).unwrap(), "second");
        assert_eq!(replay.complete(&req("q2")).unwrap(), "first");
        match replay.complete(&req("q3")) {
            Err(GatewayError::ReplayMiss { fingerprint, .. }) => assert_eq!(fingerprint, req("q3").fingerprint()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_api_key_is_reported_by_name() {
        let r = HttpBackend::new("https://localhost/v1", "ASSERTGEN_TEST_UNSET_KEY_VAR", Duration::from_secs(1), 0);
        assert!(matches!(r, Err(GatewayError::MissingApiKey(v)) if v == "ASSERTGEN_TEST_UNSET_KEY_VAR"));
    }
}
