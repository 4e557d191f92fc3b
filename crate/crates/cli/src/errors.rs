//! Process exit discipline and machine-readable error reporting.
//!
//! Commands fail in one of three classes: bad input (exit 2) when a file or
//! flag value cannot be read or parsed, a failed computation (exit 3) when
//! well-formed data does not admit a result, and internal errors (exit 4) for
//! states that indicate a defect in the program rather than a property of the
//! data.  Every failure prints exactly one JSON line on stderr carrying
//! `code`, `message`, and a `context` object, so callers can branch on the
//! exit code and log the rest.

use std::fmt::Display;

use serde_json::{Map, Value};

/// Failure class, numerically equal to the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Unreadable or unparsable inputs, invalid flag values.
    Input,
    /// The analysis or simulation could not produce a result.
    Compute,
    /// A state that should be unreachable.
    Internal,
}

impl ErrorClass {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Input => 2,
            ErrorClass::Compute => 3,
            ErrorClass::Internal => 4,
        }
    }
}

/// A classified failure with free-form context for the stderr report.
#[derive(Debug)]
pub struct CliError {
    pub class: ErrorClass,
    pub message: String,
    pub context: Map<String, Value>,
}

impl CliError {
    fn new(class: ErrorClass, message: impl Display) -> Self {
        // Keep the stderr line single-line even if a source error is not.
        let message = message.to_string().replace('\n', " ");
        CliError { class, message, context: Map::new() }
    }

    pub fn input(message: impl Display) -> Self {
        Self::new(ErrorClass::Input, message)
    }

    pub fn compute(message: impl Display) -> Self {
        Self::new(ErrorClass::Compute, message)
    }

    pub fn internal(message: impl Display) -> Self {
        Self::new(ErrorClass::Internal, message)
    }

    /// Attaches a context key; later values win on duplicate keys.
    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.context.insert(key.to_string(), value.into());
        self
    }

    /// The single-line JSON error record printed on stderr.
    pub fn json_line(&self) -> String {
        let mut doc = Map::new();
        doc.insert("code".into(), Value::from(self.class.exit_code()));
        doc.insert("message".into(), Value::from(self.message.clone()));
        doc.insert("context".into(), Value::Object(self.context.clone()));
        Value::Object(doc).to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_match_the_classes() {
        assert_eq!(ErrorClass::Input.exit_code(), 2);
        assert_eq!(ErrorClass::Compute.exit_code(), 3);
        assert_eq!(ErrorClass::Internal.exit_code(), 4);
    }

    #[test]
    fn json_line_is_one_line_with_all_keys() {
        let err = CliError::input("first\nsecond").with("path", "x.csv");
        let line = err.json_line();
        assert!(!line.contains('\n'));
        let doc: Value = serde_json::from_str(&line).unwrap();
        assert_eq!(doc["code"], 2);
        assert_eq!(doc["message"], "first second");
        assert_eq!(doc["context"]["path"], "x.csv");
    }
}
