use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::Session;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Request {
    pub id: u64,
    pub op: String,
    #[serde(default)]
    pub args: Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    #[serde(rename = "OK")]
    Ok,
    #[serde(rename = "ERR")]
    Err,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Response {
    /// Null when the request was too malformed to carry an id.
    pub id: Option<u64>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub payload: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorBody>,
}

impl Response {
    pub fn ok(id: u64, payload: Value) -> Self {
        Response { id: Some(id), status: Status::Ok, payload: Some(payload), error: None }
    }

    pub fn err(id: Option<u64>, kind: &str, message: impl Into<String>) -> Self {
        Response {
            id,
            status: Status::Err,
            payload: None,
            error: Some(ErrorBody { kind: kind.to_string(), message: message.into() }),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == Status::Ok
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("responses serialize")
    }
}

/// Handles one request line and returns the response line (without LF).
pub fn handle_line(session: &mut Session, line: &str) -> String {
    let response = match serde_json::from_str::<Request>(line) {
        Ok(request) => session.handle(&request),
        Err(e) => {
            let id = serde_json::from_str::<Value>(line).ok().and_then(|v| v.get("id").and_then(Value::as_u64));
            Response::err(id, "PROTOCOL", format!("malformed request: {e}"))
        }
    };
    response.to_line()
}

/// Reads requests line by line and writes one response line each, until
/// end of input or a `shutdown` request.
pub fn serve_stream(session: &mut Session, input: impl BufRead, mut output: impl Write) -> io::Result<()> {
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let reply = handle_line(session, &line);
        output.write_all(reply.as_bytes())?;
        output.write_all(b"\n")?;
        output.flush()?;
        if session.is_shut_down() {
            break;
        }
    }
    Ok(())
}

/// Replays a request log against `session`, one response line per request.
pub fn replay(session: &mut Session, log: &str) -> Vec<String> {
    log.lines().filter(|l| !l.trim().is_empty()).map(|l| handle_line(session, l)).collect()
}
