//! Prompt templates stored as text files.
//!
//! A template file is split into messages by header lines `### system`,
//! `### user` and `### assistant`; each part is rendered with minijinja
//! against string bindings. Files without headers are partials, usable
//! through `{% include "name.txt" %}`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use minijinja::{Environment, UndefinedBehavior};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::message::{ChatMessage, Role};

const BUNDLED: &[(&str, &str)] = &[
    ("align.txt", include_str!("../../../prompts/align.txt")),
    ("comb_rules.txt", include_str!("../../../prompts/comb_rules.txt")),
    ("generate.txt", include_str!("../../../prompts/generate.txt")),
    ("question_a.txt", include_str!("../../../prompts/question_a.txt")),
    ("question_b.txt", include_str!("../../../prompts/question_b.txt")),
    ("question_c.txt", include_str!("../../../prompts/question_c.txt")),
    ("reask.txt", include_str!("../../../prompts/reask.txt")),
    ("repair.txt", include_str!("../../../prompts/repair.txt")),
    ("system_sva.txt", include_str!("../../../prompts/system_sva.txt")),
];

#[derive(Debug, Error)]
pub enum PromptError {
    #[error("unknown template '{0}'")]
    UnknownTemplate(String),
    #[error("template '{template}' needs binding '{name}'")]
    MissingBinding { template: String, name: String },
    #[error("template '{template}': {source}")]
    Render { template: String, source: minijinja::Error },
    #[error("reading prompts: {0}")]
    Io(String),
}

pub struct PromptLibrary {
    env: Environment<'static>,
    sources: BTreeMap<String, String>,
    /// template id → (role, section template name)
    sections: BTreeMap<String, Vec<(Role, String)>>,
}

impl PromptLibrary {
    /// The templates compiled into the binary from `prompts/`.
    pub fn bundled() -> PromptLibrary {
        PromptLibrary::from_files(BUNDLED.iter().map(|(n, s)| (n.to_string(), s.to_string())))
            .expect("bundled prompts are valid")
    }

    /// Loads every `*.txt` file in `dir`.
    pub fn load_dir(dir: &Path) -> Result<PromptLibrary, PromptError> {
        let io = |e: std::io::Error| PromptError::Io(format!("{}: {e}", dir.display()));
        let mut files = Vec::new();
        for entry in std::fs::read_dir(dir).map_err(io)? {
            let path = entry.map_err(io)?.path();
            if path.extension().and_then(|e| e.to_str()) == Some("txt") {
                let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default().to_string();
                files.push((name, std::fs::read_to_string(&path).map_err(io)?));
            }
        }
        PromptLibrary::from_files(files)
    }

    fn from_files(files: impl IntoIterator<Item = (String, String)>) -> Result<PromptLibrary, PromptError> {
        let mut env = Environment::new();
        env.set_undefined_behavior(UndefinedBehavior::Strict);
        let mut sources = BTreeMap::new();
        let mut sections = BTreeMap::new();
        for (name, text) in files {
            let id = name.trim_end_matches(".txt").to_string();
            let parts = split_sections(&text);
            let render_err = |source| PromptError::Render { template: id.clone(), source };
            if parts.is_empty() {
                env.add_template_owned(name.clone(), text.clone()).map_err(render_err)?;
            } else {
                let mut list = Vec::new();
                for (i, (role, body)) in parts.into_iter().enumerate() {
                    let section = format!("{id}#{i}");
                    env.add_template_owned(section.clone(), body).map_err(render_err)?;
                    list.push((role, section));
                }
                sections.insert(id.clone(), list);
            }
            sources.insert(id, text);
        }
        Ok(PromptLibrary { env, sources, sections })
    }

    pub fn template_ids(&self) -> impl Iterator<Item = &str> {
        self.sections.keys().map(String::as_str)
    }

    /// Short content hash of every template and partial, keyed by id.
    pub fn versions(&self) -> BTreeMap<String, String> {
        self.sources
            .iter()
            .map(|(id, text)| {
                let digest = Sha256::digest(text.as_bytes());
                (id.clone(), digest.iter().take(6).map(|b| format!("{b:02x}")).collect())
            })
            .collect()
    }

    pub fn render_prompt(&self, template_id: &str, bindings: &BTreeMap<String, String>) -> Result<Vec<ChatMessage>, PromptError> {
        let list = self.sections.get(template_id).ok_or_else(|| PromptError::UnknownTemplate(template_id.to_string()))?;
        let mut out = Vec::with_capacity(list.len());
        for (role, section) in list {
            let tmpl = self.env.get_template(section).map_err(|source| PromptError::Render {
                template: template_id.to_string(),
                source,
            })?;
            let needed: BTreeSet<String> = tmpl.undeclared_variables(false).into_iter().collect();
            if let Some(name) = needed.iter().find(|n| !bindings.contains_key(*n)) {
                return Err(PromptError::MissingBinding { template: template_id.to_string(), name: name.clone() });
            }
            let text = tmpl
                .render(bindings)
                .map_err(|source| PromptError::Render { template: template_id.to_string(), source })?;
            out.push(ChatMessage::new(*role, text.trim_matches('\n').to_string()));
        }
        Ok(out)
    }

    /// Renders a partial (a file without message headers) on its own.
    pub fn render_partial(&self, name: &str) -> Result<String, PromptError> {
        let file = format!("{name}.txt");
        let tmpl = self.env.get_template(&file).map_err(|_| PromptError::UnknownTemplate(name.to_string()))?;
        let text = tmpl.render(()).map_err(|source| PromptError::Render { template: name.to_string(), source })?;
        Ok(text.trim_matches('\n').to_string())
    }
}

fn split_sections(text: &str) -> Vec<(Role, String)> {
    let mut out: Vec<(Role, String)> = Vec::new();
    for line in text.split_inclusive('\n') {
        let header = match line.trim_end() {
            "### system" => Some(Role::System),
            "### user" => Some(Role::User),
            "### assistant" => Some(Role::Assistant),
            _ => None,
        };
        match (header, out.last_mut()) {
            (Some(role), _) => out.push((role, String::new())),
            (None, Some((_, body))) => body.push_str(line),
            // text before the first header (template comments) is dropped
            (None, None) => {}
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bind(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn questions_start_with_listing_text() {
        let lib = PromptLibrary::bundled();
        let spec = bind(&[("spec_text", "A counter counts.")]);
        let a = lib.render_prompt("question_a", &spec).unwrap();
        assert_eq!(a.last().unwrap().role, Role::User);
        assert!(a.last().unwrap().content.starts_with("specify the following on the provided text"));
        assert!(a.last().unwrap().content.contains("Note:(Do not make any additional states based on your assumption)"));
        assert!(a.last().unwrap().content.ends_with("Text:\nA counter counts."));
        let b = lib.render_prompt("question_b", &spec).unwrap();
        assert!(b.last().unwrap().content.starts_with("specify every conditional statement"));
        let c = lib.render_prompt("question_c", &spec).unwrap();
        assert!(c.last().unwrap().content.starts_with("Specify every variable in the text"));
    }

    #[test]
    fn missing_binding_is_named() {
        let lib = PromptLibrary::bundled();
        match lib.render_prompt("question_a", &bind(&[])) {
            Err(PromptError::MissingBinding { name, .. }) => assert_eq!(name, "spec_text"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(lib.render_prompt("nope", &bind(&[])), Err(PromptError::UnknownTemplate(_))));
    }

    #[test]
    fn repair_includes_rules_only_for_combinational() {
        let lib = PromptLibrary::bundled();
        let mut b = bind(&[
            ("assertion", "assert(a |-> b);"),
            ("diagnostics", "error[E008]: ... near «|->»"),
            ("signal_table", "input a\ninput b\n"),
            ("mode", "combinational"),
        ]);
        let comb = lib.render_prompt("repair", &b).unwrap();
        assert!(comb[1].content.contains("«|->»"));
        assert!(comb[1].content.contains("(!a | b)"));
        b.insert("mode".into(), "sequential".into());
        let seq = lib.render_prompt("repair", &b).unwrap();
        assert!(!seq[1].content.contains("(!a | b)"));
    }

    #[test]
    fn system_digest_is_included_and_deterministic() {
        let lib = PromptLibrary::bundled();
        let b = bind(&[("comment", "q follows d")]);
        let m1 = lib.render_prompt("generate", &b).unwrap();
        assert_eq!(m1, lib.render_prompt("generate", &b).unwrap());
        assert_eq!(m1[0].content, lib.render_partial("system_sva").unwrap());
        assert!(!m1[0].content.contains("Reconstructed"));
        assert_eq!(lib.versions().len(), BUNDLED.len());
    }
}
