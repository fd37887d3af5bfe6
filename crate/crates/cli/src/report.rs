//! Reports, error kinds and exit codes.

use assigncoh::ratlin::{format_rational, Rational};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const EXIT_OK: i32 = 0;
/// Unreadable input, malformed JSON, bad flag values, polynomial syntax.
pub const EXIT_SCHEMA: i32 = 1;
/// Input parses but fails validation, or a `check` verdict fails.
pub const EXIT_VALIDATION: i32 = 2;
/// A stratum set names something that is not a stratum.
pub const EXIT_NOT_UNION_OF_STRATA: i32 = 3;
/// Minimal values that do not extend to an assignment.
pub const EXIT_INCOMPATIBLE: i32 = 4;
/// The moment condition fails for some monomial.
pub const EXIT_CONDITION_FAILED: i32 = 5;

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub input_digest: String,
    pub results: Value,
    #[serde(skip)]
    pub text: Vec<String>,
    #[serde(skip)]
    pub exit_code: i32,
}

#[derive(Debug, Clone)]
pub struct CliError {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
    pub details: Value,
}

impl CliError {
    pub fn new(code: i32, kind: &'static str, message: impl Into<String>) -> Self {
        CliError { code, kind, message: message.into(), details: Value::Null }
    }

    pub fn schema(message: impl Into<String>) -> Self {
        Self::new(EXIT_SCHEMA, "schema", message)
    }

    pub fn validation(message: impl Into<String>) -> Self {
        Self::new(EXIT_VALIDATION, "validation", message)
    }

    pub fn with_details(mut self, details: Value) -> Self {
        self.details = details;
        self
    }

    pub fn to_json(&self, command: &str, digest: &str) -> String {
        let v = json!({
            "command": command,
            "input_digest": digest,
            "error": { "kind": self.kind, "message": self.message, "details": self.details, "exit_code": self.code },
        });
        serde_json::to_string_pretty(&v).expect("plain data serializes")
    }
}

/// SHA-256 over the length-prefixed parts.
pub fn digest(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    hex::encode(h.finalize())
}

pub fn rat_strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

pub fn rat_text(v: &[Rational]) -> String {
    format!("[{}]", rat_strings(v).join(", "))
}
