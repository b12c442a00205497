//! Line-oriented request/response transports for external adapters.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransportError {
    #[error("no response within {0} ms")]
    Timeout(u64),
    #[error("transport failure: {0}")]
    Io(String),
    #[error("protocol violation: {0}")]
    Protocol(String),
}

/// Sends one JSON object and returns the response carrying the same `id`.
pub trait Transport: Send + Sync {
    fn call(&self, request: &Value, timeout_ms: u64) -> Result<Value, TransportError>;
}

/// Open a transport for `endpoint`: an `http://` URL, or a command line run
/// through `sh -c` speaking JSON lines on its standard streams.
pub fn connect(endpoint: &str) -> Result<Box<dyn Transport>, TransportError> {
    if endpoint.starts_with("http://") {
        Ok(Box::new(HttpTransport::new(endpoint)))
    } else {
        Ok(Box::new(StdioTransport::spawn(endpoint)?))
    }
}

fn request_id(request: &Value) -> Result<String, TransportError> {
    request
        .get("id")
        .and_then(Value::as_str)
        .map(str::to_string)
        .ok_or_else(|| TransportError::Protocol("request has no string id".into()))
}

struct StdioInner {
    stdin: ChildStdin,
    lines: Receiver<String>,
}

/// Child process speaking newline-delimited JSON. Calls are serialized; lines
/// whose id does not match the pending request (late answers to requests
/// that already timed out) are discarded.
pub struct StdioTransport {
    inner: Mutex<StdioInner>,
    child: Mutex<Child>,
}

impl StdioTransport {
    pub fn spawn(command: &str) -> Result<Self, TransportError> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| TransportError::Io(format!("spawn `{command}`: {e}")))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let Ok(line) = line else { break };
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(StdioTransport {
            inner: Mutex::new(StdioInner { stdin, lines: rx }),
            child: Mutex::new(child),
        })
    }
}

impl Transport for StdioTransport {
    fn call(&self, request: &Value, timeout_ms: u64) -> Result<Value, TransportError> {
        let id = request_id(request)?;
        let mut inner = self.inner.lock().unwrap_or_else(|p| p.into_inner());
        let mut line = request.to_string();
        line.push('\n');
        inner
            .stdin
            .write_all(line.as_bytes())
            .and_then(|_| inner.stdin.flush())
            .map_err(|e| TransportError::Io(format!("write: {e}")))?;
        let deadline = Instant::now() + Duration::from_millis(timeout_ms);
        loop {
            let left = deadline.saturating_duration_since(Instant::now());
            if left.is_zero() {
                return Err(TransportError::Timeout(timeout_ms));
            }
            match inner.lines.recv_timeout(left) {
                Ok(text) => {
                    if text.trim().is_empty() {
                        continue;
                    }
                    let value: Value = serde_json::from_str(&text)
                        .map_err(|e| TransportError::Protocol(format!("bad response line: {e}")))?;
                    match value.get("id").and_then(Value::as_str) {
                        Some(got) if got == id => return Ok(value),
                        Some(_) => continue,
                        None => return Err(TransportError::Protocol("response has no id".into())),
                    }
                }
                Err(RecvTimeoutError::Timeout) => return Err(TransportError::Timeout(timeout_ms)),
                Err(RecvTimeoutError::Disconnected) => {
                    return Err(TransportError::Io("peer closed its output".into()))
                }
            }
        }
    }
}

impl Drop for StdioTransport {
    fn drop(&mut self) {
        if let Ok(mut child) = self.child.lock() {
            let _ = child.kill();
            let _ = child.wait();
        }
    }
}

/// One POST per request; the body is the JSON request, the reply the JSON
/// response.
pub struct HttpTransport {
    url: String,
    agent: ureq::Agent,
}

impl HttpTransport {
    pub fn new(url: &str) -> Self {
        HttpTransport {
            url: url.to_string(),
            agent: ureq::Agent::new_with_defaults(),
        }
    }
}

impl Transport for HttpTransport {
    fn call(&self, request: &Value, timeout_ms: u64) -> Result<Value, TransportError> {
        let id = request_id(request)?;
        let result = self
            .agent
            .post(&self.url)
            .header("content-type", "application/json")
            .config()
            .timeout_global(Some(Duration::from_millis(timeout_ms)))
            .build()
            .send(request.to_string());
        let mut response = match result {
            Ok(r) => r,
            Err(ureq::Error::Timeout(_)) => return Err(TransportError::Timeout(timeout_ms)),
            Err(e) => return Err(TransportError::Io(e.to_string())),
        };
        let body = response
            .body_mut()
            .read_to_string()
            .map_err(|e| match e {
                ureq::Error::Timeout(_) => TransportError::Timeout(timeout_ms),
                other => TransportError::Io(other.to_string()),
            })?;
        let value: Value =
            serde_json::from_str(&body).map_err(|e| TransportError::Protocol(format!("bad response body: {e}")))?;
        match value.get("id").and_then(Value::as_str) {
            Some(got) if got == id => Ok(value),
            Some(got) => Err(TransportError::Protocol(format!("response id `{got}` for request `{id}`"))),
            None => Err(TransportError::Protocol("response has no id".into())),
        }
    }
}
