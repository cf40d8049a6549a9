//! Structural validation of the JSON answers to the three spec questions.
//!
//! Answers are normalized on the way through: a single top-level object
//! becomes a one-element list, scalars become strings, `null` and missing
//! optional fields become empty values.

use serde_json::{Map, Value};
use thiserror::Error;

use crate::response::strip_fences;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemaId {
    QuestionA,
    QuestionB,
    QuestionC,
}

impl SchemaId {
    pub const ALL: [SchemaId; 3] = [SchemaId::QuestionA, SchemaId::QuestionB, SchemaId::QuestionC];

    pub fn template_id(self) -> &'static str {
        match self {
            SchemaId::QuestionA => "question_a",
            SchemaId::QuestionB => "question_b",
            SchemaId::QuestionC => "question_c",
        }
    }

    pub fn letter(self) -> char {
        match self {
            SchemaId::QuestionA => 'A',
            SchemaId::QuestionB => 'B',
            SchemaId::QuestionC => 'C',
        }
    }

    fn schema(self) -> Shape {
        use Shape::*;
        match self {
            SchemaId::QuestionA => List(Box::new(Object(vec![
                ("states", Optional, List(Box::new(Str))),
                (
                    "transitions",
                    Optional,
                    List(Box::new(Object(vec![
                        ("current_state", Required, Str),
                        ("conditions", Optional, Str),
                        ("next_state_condition_true", Required, Str),
                        ("next_state_condition_false", Optional, Str),
                    ]))),
                ),
                (
                    "outputs",
                    Optional,
                    List(Box::new(Object(vec![
                        ("current_state", Optional, Str),
                        ("output_name", Required, Str),
                        ("conditions", Optional, Str),
                        ("output_value_condition_true", Required, Str),
                        ("output_value_condition_false", Optional, Str),
                    ]))),
                ),
            ]))),
            SchemaId::QuestionB => {
                List(Box::new(Object(vec![("antecedent", Required, Str), ("consequent", Required, Str)])))
            }
            SchemaId::QuestionC => List(Box::new(Object(vec![
                ("variable_name", Required, Str),
                (
                    "condition_list",
                    Optional,
                    List(Box::new(Object(vec![("condition", Optional, Str), ("range_or_value", Optional, Str)]))),
                ),
            ]))),
        }
    }
}

impl std::str::FromStr for SchemaId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "question_a" => Ok(SchemaId::QuestionA),
            "question_b" => Ok(SchemaId::QuestionB),
            "question_c" => Ok(SchemaId::QuestionC),
            other => Err(format!("unknown schema '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Presence {
    Required,
    Optional,
}
use Presence::{Optional, Required};

enum Shape {
    Str,
    List(Box<Shape>),
    Object(Vec<(&'static str, Presence, Shape)>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("no JSON document found in the response")]
    NoJson,
    #[error("unparseable JSON: {0}")]
    Parse(String),
    #[error("schema mismatch at {path}: {reason}")]
    Mismatch { path: String, reason: String },
}

/// Extracts the JSON document from `text` and checks it against the
/// answer structure of `schema`. Returns the normalized document.
pub fn validate_json_response(schema: SchemaId, text: &str) -> Result<Value, ValidationError> {
    let body = strip_fences(text);
    let start = body.find(['[', '{']).ok_or(ValidationError::NoJson)?;
    let mut stream = serde_json::Deserializer::from_str(&body[start..]).into_iter::<Value>();
    let value = match stream.next() {
        Some(Ok(v)) => v,
        Some(Err(e)) => return Err(ValidationError::Parse(e.to_string())),
        None => return Err(ValidationError::NoJson),
    };
    let value = match value {
        obj @ Value::Object(_) => Value::Array(vec![obj]),
        other => other,
    };
    check(&schema.schema(), value, &mut String::new())
}

fn mismatch(path: &str, reason: impl Into<String>) -> ValidationError {
    let path = if path.is_empty() { "<root>".to_string() } else { path.to_string() };
    ValidationError::Mismatch { path, reason: reason.into() }
}

fn check(shape: &Shape, value: Value, path: &mut String) -> Result<Value, ValidationError> {
    match shape {
        Shape::Str => match value {
            Value::String(s) => Ok(Value::String(s)),
            Value::Null => Ok(Value::String(String::new())),
            Value::Number(n) => Ok(Value::String(n.to_string())),
            Value::Bool(b) => Ok(Value::String(b.to_string())),
            _ => Err(mismatch(path, "expected a string")),
        },
        Shape::List(item) => {
            let items = match value {
                Value::Array(items) => items,
                Value::Null => Vec::new(),
                // a lone value where a list is expected
                other @ (Value::String(_) | Value::Object(_)) => vec![other],
                _ => return Err(mismatch(path, "expected a list")),
            };
            let mut out = Vec::with_capacity(items.len());
            for (i, v) in items.into_iter().enumerate() {
                let len = path.len();
                path.push_str(&format!("[{i}]"));
                out.push(check(item, v, path)?);
                path.truncate(len);
            }
            Ok(Value::Array(out))
        }
        Shape::Object(fields) => {
            let Value::Object(mut map) = value else {
                return Err(mismatch(path, "expected an object"));
            };
            // unknown fields are reported before missing ones, in document order
            if let Some(extra) = map.keys().find(|k| !fields.iter().any(|(f, _, _)| f == k)) {
                return Err(mismatch(&format!("{path}.{extra}"), "unknown field"));
            }
            let mut out = Map::new();
            for (name, presence, sub) in fields {
                let len = path.len();
                path.push('.');
                path.push_str(name);
                let v = match (map.remove(*name), presence) {
                    (Some(v), _) => check(sub, v, path)?,
                    (None, Presence::Optional) => empty(sub),
                    (None, Presence::Required) => return Err(mismatch(path, "missing required field")),
                };
                path.truncate(len);
                out.insert(name.to_string(), v);
            }
            Ok(Value::Object(out))
        }
    }
}

fn empty(shape: &Shape) -> Value {
    match shape {
        Shape::Str => Value::String(String::new()),
        Shape::List(_) => Value::Array(Vec::new()),
        Shape::Object(_) => Value::Object(Map::new()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn listing_two_document() {
        let text = r#"Sure! ```json
        [{"states": ["S0","S1"],
          "transitions": [{"current_state":"S0","conditions":"din==1","next_state_condition_true":"S1","next_state_condition_false":"S0"}],
          "outputs": [{"current_state":"S1","output_name":"dout","conditions":"","output_value_condition_true":1}]}]
        ```"#;
        let v = validate_json_response(SchemaId::QuestionA, text).unwrap();
        assert_eq!(v[0]["transitions"][0]["next_state_condition_true"], "S1");
        assert_eq!(v[0]["outputs"][0]["output_value_condition_true"], "1");
        assert_eq!(v[0]["outputs"][0]["output_value_condition_false"], "");
    }

    #[test]
    fn empty_and_single_object() {
        assert_eq!(validate_json_response(SchemaId::QuestionB, "[]").unwrap(), Value::Array(vec![]));
        let v = validate_json_response(SchemaId::QuestionA, r#"{"states":["A"],"transitions":[]}"#).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 1);
        assert_eq!(v[0]["outputs"], Value::Array(vec![]));
    }

    #[test]
    fn unknown_field_path() {
        let e = validate_json_response(SchemaId::QuestionB, r#"[{"antecedent":"a","consequent":"b","confidence":0.9}]"#)
            .unwrap_err();
        assert_eq!(e, ValidationError::Mismatch { path: "[0].confidence".into(), reason: "unknown field".into() });
        let e = validate_json_response(SchemaId::QuestionA, r#"[{"transitions":[{"current_state":"S0"}]}]"#).unwrap_err();
        assert!(matches!(e, ValidationError::Mismatch { ref path, .. } if path == "[0].transitions[0].next_state_condition_true"));
    }

    #[test]
    fn question_c_fields_may_be_left_empty() {
        let v = validate_json_response(SchemaId::QuestionC, r#"[{"variable_name":"count","condition_list":[{"range_or_value":"0 to 9"}]}]"#)
            .unwrap();
        assert_eq!(v[0]["condition_list"][0]["condition"], "");
        assert!(matches!(validate_json_response(SchemaId::QuestionC, "no json here"), Err(ValidationError::NoJson)));
        assert!(matches!(validate_json_response(SchemaId::QuestionC, "[{\"variable_name\": }]"), Err(ValidationError::Parse(_))));
    }
}
