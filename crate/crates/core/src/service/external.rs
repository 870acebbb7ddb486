use std::io::Write;
use std::process::Command;

use thiserror::Error;

use crate::ast::AstDoc;
use crate::spec::GrammarSpec;
use crate::syntax::{unparse, UnparseError};

#[derive(Debug, Error)]
pub enum ExternalError {
    #[error(transparent)]
    Incomplete(#[from] UnparseError),
    #[error("command exited with {code:?}")]
    ExternalFailure { code: Option<i32>, output: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Writes the program text of `doc` to a temporary file, runs
/// `command_template` through `sh -c` with every `{}` replaced by that
/// file's path, and returns stdout followed by stderr.
pub fn run_external(doc: &AstDoc, spec: &GrammarSpec, command_template: &str) -> Result<String, ExternalError> {
    let text = unparse(doc, spec)?;
    let mut file = tempfile::Builder::new().prefix("synted-").suffix(".txt").tempfile()?;
    file.write_all(text.as_bytes())?;
    file.flush()?;
    let path = file.path().to_string_lossy().replace('\'', r"'\''");
    let command = command_template.replace("{}", &format!("'{path}'"));
    let out = Command::new("sh").arg("-c").arg(&command).output()?;
    let mut output = String::from_utf8_lossy(&out.stdout).into_owned();
    output.push_str(&String::from_utf8_lossy(&out.stderr));
    if out.status.success() {
        Ok(output)
    } else {
        Err(ExternalError::ExternalFailure { code: out.status.code(), output })
    }
}
