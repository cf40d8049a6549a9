use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
}

impl ChatMessage {
    pub fn new(role: Role, content: impl Into<String>) -> ChatMessage {
        ChatMessage { role, content: content.into() }
    }

    pub fn system(content: impl Into<String>) -> ChatMessage {
        ChatMessage::new(Role::System, content)
    }

    pub fn user(content: impl Into<String>) -> ChatMessage {
        ChatMessage::new(Role::User, content)
    }

    pub fn assistant(content: impl Into<String>) -> ChatMessage {
        ChatMessage::new(Role::Assistant, content)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionRequest {
    pub model_id: String,
    pub messages: Vec<ChatMessage>,
    pub temperature: f64,
    pub max_tokens: u32,
}

impl CompletionRequest {
    pub fn new(model_id: impl Into<String>, messages: Vec<ChatMessage>) -> CompletionRequest {
        CompletionRequest { model_id: model_id.into(), messages, temperature: 0.0, max_tokens: 512 }
    }

    /// Hex SHA-256 over the model id, messages and temperature.
    ///
    /// The hashed bytes are a length-prefixed encoding, so the value does
    /// not depend on serializer details or platform.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        let mut field = |bytes: &[u8]| {
            h.update((bytes.len() as u64).to_le_bytes());
            h.update(bytes);
        };
        field(b"v1");
        field(self.model_id.as_bytes());
        field(&(self.messages.len() as u64).to_le_bytes());
        for m in &self.messages {
            let role: &[u8] = match m.role {
                Role::System => b"system",
                Role::User => b"user",
                Role::Assistant => b"assistant",
            };
            field(role);
            field(m.content.as_bytes());
        }
        // -0.0 and 0.0 hash alike
        let t = if self.temperature == 0.0 { 0.0f64 } else { self.temperature };
        field(&t.to_bits().to_le_bytes());
        let digest = h.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Short description stored next to recorded responses.
    pub fn summary(&self) -> String {
        let last = self
            .messages
            .iter()
            .rev()
            .find(|m| m.role == Role::User)
            .map(|m| m.content.as_str())
            .unwrap_or("");
        let mut text: String = last.split_whitespace().collect::<Vec<_>>().join(" ");
        if text.chars().count() > 100 {
            text = text.chars().take(100).collect::<String>() + "...";
        }
        format!("{} | {}", self.model_id, text)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.messages.is_empty() {
            return Err("request has no messages".into());
        }
        if let Some(i) = self.messages.iter().position(|m| m.content.is_empty()) {
            return Err(format!("message {i} has empty content"));
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

/// One line of a replay fixture file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureRecord {
    pub fingerprint: String,
    pub request_summary: String,
    pub response_text: String,
}
