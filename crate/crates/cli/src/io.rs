use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use coarse_core::analysis::CERTIFICATE_SCHEMA;
use coarse_core::spaces::DEFAULT_GUARD;
use coarse_core::Error;

pub const GUARD_ENV: &str = "COARSE_COVER_GUARD";

/// A failure reported as JSON on stderr with a categorised exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError { code: 2, kind: "input", message: message.into() }
    }

    pub fn hypothesis(message: impl Into<String>) -> Self {
        CliError { code: 3, kind: "hypothesis", message: message.into() }
    }

    pub fn report(&self) {
        let v = json!({ "schema": CERTIFICATE_SCHEMA, "error": { "kind": self.kind, "code": self.code, "message": self.message } });
        eprintln!("{v}");
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Hypothesis(_) => 3,
            Error::GuardExceeded { .. } => 4,
            _ => 2,
        };
        let kind = match code {
            3 => "hypothesis",
            4 => "guard",
            _ => "input",
        };
        CliError { code, kind, message: e.to_string() }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::input(format!("json: {e}"))
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::input(format!("io: {e}"))
    }
}

pub struct Context {
    pub out: Option<PathBuf>,
    pub threads: usize,
    pub guard: u128,
}

impl Context {
    pub fn new(out: Option<PathBuf>, threads: usize) -> Result<Self, CliError> {
        let guard = match std::env::var(GUARD_ENV) {
            Ok(v) => v.trim().parse().map_err(|_| CliError::input(format!("{GUARD_ENV} must be a non-negative integer, got {v:?}")))?,
            Err(_) => DEFAULT_GUARD,
        };
        Ok(Context { out, threads, guard })
    }

    /// Writes `text` to `--out` or stdout.
    pub fn write(&self, text: &str) -> Result<(), CliError> {
        match &self.out {
            Some(p) => std::fs::write(p, text)?,
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(text.as_bytes())?;
                stdout.flush()?;
            }
        }
        Ok(())
    }

    pub fn emit(&self, value: &Value) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(&text)
    }

    /// Standard result document: schema, tool version, command and the
    /// resolved parameters, followed by the fields of `body`.
    pub fn envelope(&self, command: &str, params: impl Serialize, body: impl Serialize) -> Result<Value, CliError> {
        let mut doc = json!({
            "schema": CERTIFICATE_SCHEMA,
            "tool": format!("coarse {}", env!("CARGO_PKG_VERSION")),
            "command": command,
            "params": params,
        });
        doc["params"]["guard"] = json!(self.guard.to_string());
        doc["params"]["threads"] = json!(self.threads);
        if let Value::Object(fields) = serde_json::to_value(body)? {
            doc.as_object_mut().expect("object").extend(fields);
        }
        Ok(doc)
    }
}

/// Reads a file, or stdin when no path is given.
pub fn read_input(path: Option<&Path>) -> Result<String, CliError> {
    match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| CliError::input(format!("cannot read {}: {e}", p.display()))),
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}
