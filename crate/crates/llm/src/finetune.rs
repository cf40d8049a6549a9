use std::path::PathBuf;

use serde::{Deserialize, Serialize};

/// Describes a fine-tuning job over an emitted dataset. The job itself is
/// run by the provider's tooling.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FineTuneJobDescriptor {
    pub base_model: String,
    #[serde(default = "default_epochs")]
    pub epochs: u32,
    pub dataset_path: PathBuf,
    pub system_message_path: PathBuf,
}

fn default_epochs() -> u32 {
    3
}

impl FineTuneJobDescriptor {
    pub fn new(base_model: impl Into<String>, dataset_path: PathBuf, system_message_path: PathBuf) -> Self {
        FineTuneJobDescriptor { base_model: base_model.into(), epochs: default_epochs(), dataset_path, system_message_path }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("descriptor serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_to_three_epochs() {
        let d: FineTuneJobDescriptor =
            serde_json::from_str(r#"{"base_model":"gpt-3.5-turbo","dataset_path":"d.jsonl","system_message_path":"s.txt"}"#)
                .unwrap();
        assert_eq!(d.epochs, 3);
        assert_eq!(serde_json::from_str::<FineTuneJobDescriptor>(&d.to_json()).unwrap(), d);
    }
}
