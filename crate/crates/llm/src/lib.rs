//! The boundary behind which the language model sits: request types and
//! fingerprints, interchangeable backends (HTTP, replay, scripted) with
//! recording, prompt templates, and validation of JSON answers.

mod backend;
mod config;
mod finetune;
mod gateway;
mod message;
mod prompts;
mod response;
mod schema;

pub use backend::{Backend, HttpBackend, Recorder, ReplayBackend, Rule, Script, ScriptedBackend};
pub use config::{BackendKind, HttpSettings, ProviderConfig, ReplaySettings, ScriptedSettings};
pub use finetune::FineTuneJobDescriptor;
pub use gateway::{Gateway, GatewayError};
pub use message::{ChatMessage, CompletionRequest, FixtureRecord, Role};
pub use prompts::{PromptError, PromptLibrary};
pub use response::strip_fences;
pub use schema::{validate_json_response, SchemaId, ValidationError};
