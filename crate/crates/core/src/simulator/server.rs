//! Minimal HTTP/1.1 front end speaking the SPARQL protocol subset the client
//! uses. Requests are handled strictly one at a time.

use std::io::{ErrorKind, Read, Write};
use std::net::{Ipv4Addr, SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use super::eval::Evaluator;
use super::faults::{Action, FaultScript, FaultState};
use super::shapes::{normalize_query, recognize};
use super::store::FixtureStore;
use super::SimulatorError;
use crate::sparql::{stable_hash, RESULTS_JSON_MEDIA_TYPE};

const MAX_REQUEST_BYTES: usize = 1 << 20;

/// One served (or stalled, or rejected) request.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogEntry {
    pub timestamp_ms: u128,
    /// When the request had been read completely.
    pub received: Instant,
    /// When the response was written, or the connection handed off to stall.
    pub finished: Instant,
    /// Shape name, or `unrecognized`.
    pub template_id: String,
    pub params: String,
    pub status: u16,
}

pub struct SimulatorHandle {
    addr: SocketAddr,
    stop: Arc<AtomicBool>,
    log: Arc<Mutex<Vec<LogEntry>>>,
    thread: Option<JoinHandle<()>>,
}

impl SimulatorHandle {
    pub fn port(&self) -> u16 {
        self.addr.port()
    }

    pub fn url(&self) -> String {
        format!("http://{}/sparql", self.addr)
    }

    pub fn request_log(&self) -> Vec<LogEntry> {
        self.log.lock().unwrap().clone()
    }

    /// Request log as TSV with a header row.
    pub fn request_log_tsv(&self) -> String {
        let mut out = String::from("timestamp_ms\ttemplate_id\tparams\n");
        for e in self.request_log() {
            out.push_str(&format!(
                "{}\t{}\t{}\n",
                e.timestamp_ms, e.template_id, e.params
            ));
        }
        out
    }

    /// Blocks until the server stops (it only stops via [`Self::shutdown`]).
    pub fn wait(mut self) {
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }

    pub fn shutdown(mut self) {
        self.stop_thread();
    }

    fn stop_thread(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        // Wake the accept loop.
        let _ = TcpStream::connect_timeout(&self.addr, Duration::from_millis(200));
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}

impl Drop for SimulatorHandle {
    fn drop(&mut self) {
        if self.thread.is_some() {
            self.stop_thread();
        }
    }
}

/// Starts serving `store` on localhost. Port 0 picks a free port.
pub fn serve(
    store: FixtureStore,
    script: FaultScript,
    port: u16,
) -> Result<SimulatorHandle, SimulatorError> {
    let listener = TcpListener::bind((Ipv4Addr::LOCALHOST, port)).map_err(|e| {
        if e.kind() == ErrorKind::AddrInUse {
            SimulatorError::PortInUse(port)
        } else {
            SimulatorError::Io {
                path: format!("127.0.0.1:{port}"),
                source: e,
            }
        }
    })?;
    let addr = listener.local_addr().map_err(|source| SimulatorError::Io {
        path: format!("127.0.0.1:{port}"),
        source,
    })?;
    let stop = Arc::new(AtomicBool::new(false));
    let log = Arc::new(Mutex::new(Vec::new()));
    let server = Server {
        evaluator: Evaluator::new(&store),
        faults: FaultState::new(&script),
        script,
        log: Arc::clone(&log),
    };
    let thread_stop = Arc::clone(&stop);
    let thread = std::thread::Builder::new()
        .name(format!("simulator-{}", addr.port()))
        .spawn(move || server.run(listener, thread_stop))
        .map_err(|source| SimulatorError::Io {
            path: "simulator thread".into(),
            source,
        })?;
    Ok(SimulatorHandle {
        addr,
        stop,
        log,
        thread: Some(thread),
    })
}

struct Server {
    evaluator: Evaluator,
    faults: FaultState,
    script: FaultScript,
    log: Arc<Mutex<Vec<LogEntry>>>,
}

struct Request {
    method: String,
    path: String,
    content_type: Option<String>,
    body: Vec<u8>,
}

impl Server {
    fn run(mut self, listener: TcpListener, stop: Arc<AtomicBool>) {
        for conn in listener.incoming() {
            if stop.load(Ordering::SeqCst) {
                break;
            }
            match conn {
                Ok(stream) => self.handle(stream),
                Err(e) => log::warn!("simulator accept failed: {e}"),
            }
        }
    }

    fn handle(&mut self, mut stream: TcpStream) {
        let _ = stream.set_read_timeout(Some(Duration::from_secs(5)));
        let request = match read_request(&mut stream) {
            Ok(Some(r)) => r,
            Ok(None) => return,
            Err(msg) => {
                let _ = respond(&mut stream, 400, "text/plain", &msg);
                return;
            }
        };
        let received = Instant::now();
        let timestamp_ms = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_millis())
            .unwrap_or(0);

        let query = match extract_query(&request) {
            Ok(q) => q,
            Err(msg) => {
                let _ = respond(&mut stream, 400, "text/plain", &msg);
                self.record(timestamp_ms, received, "unrecognized", String::new(), 400);
                return;
            }
        };
        let shape = recognize(&query);
        let (name, params) = match &shape {
            Some(s) => (s.kind.name(), s.params_string()),
            None => ("unrecognized", String::new()),
        };

        let action = self.faults.decide(shape.as_ref().map(|s| s.kind), &query);
        if !self.script.latency.is_zero() {
            std::thread::sleep(self.script.latency);
        }
        match (action, &shape) {
            (Action::Stall, _) => {
                self.record(timestamp_ms, received, name, params, 0);
                let stall = self.script.stall;
                // Hold the connection open elsewhere so later requests are served.
                std::thread::spawn(move || {
                    std::thread::sleep(stall);
                    drop(stream);
                });
            }
            (Action::Status(code, body), _) => {
                let _ = respond(&mut stream, code, "text/plain", &body);
                self.record(timestamp_ms, received, name, params, code);
            }
            (Action::Answer, None) => {
                let body = "query is not one of the supported template shapes";
                let _ = respond(&mut stream, 400, "text/plain", body);
                self.record(timestamp_ms, received, name, params, 400);
            }
            (Action::Answer, Some(shape)) => {
                let seed = self.script.seed ^ stable_hash(&[&normalize_query(&query)]);
                let body = self.evaluator.evaluate(shape, seed).to_json();
                let _ = respond(&mut stream, 200, RESULTS_JSON_MEDIA_TYPE, &body);
                self.record(timestamp_ms, received, name, params, 200);
            }
        }
    }

    fn record(
        &self,
        timestamp_ms: u128,
        received: Instant,
        name: &str,
        params: String,
        status: u16,
    ) {
        self.log.lock().unwrap().push(LogEntry {
            timestamp_ms,
            received,
            finished: Instant::now(),
            template_id: name.to_string(),
            params,
            status,
        });
    }
}

fn read_request(stream: &mut TcpStream) -> Result<Option<Request>, String> {
    let mut buf = Vec::new();
    let mut chunk = [0u8; 8192];
    loop {
        let n = match stream.read(&mut chunk) {
            Ok(0) if buf.is_empty() => return Ok(None),
            Ok(0) => return Err("connection closed mid-request".into()),
            Ok(n) => n,
            Err(_) if buf.is_empty() => return Ok(None),
            Err(e) => return Err(e.to_string()),
        };
        buf.extend_from_slice(&chunk[..n]);
        if buf.len() > MAX_REQUEST_BYTES {
            return Err("request too large".into());
        }
        let mut headers = [httparse::EMPTY_HEADER; 64];
        let mut req = httparse::Request::new(&mut headers);
        let status = req.parse(&buf).map_err(|e| e.to_string())?;
        let httparse::Status::Complete(header_len) = status else {
            continue;
        };
        let mut content_length = 0usize;
        let mut content_type = None;
        for h in req.headers.iter() {
            let value = String::from_utf8_lossy(h.value).trim().to_string();
            if h.name.eq_ignore_ascii_case("content-length") {
                content_length = value.parse().map_err(|_| "bad Content-Length")?;
            } else if h.name.eq_ignore_ascii_case("content-type") {
                content_type = Some(value);
            }
        }
        if header_len + content_length > MAX_REQUEST_BYTES {
            return Err("request too large".into());
        }
        let method = req.method.unwrap_or_default().to_string();
        let path = req.path.unwrap_or_default().to_string();
        while buf.len() < header_len + content_length {
            let n = stream.read(&mut chunk).map_err(|e| e.to_string())?;
            if n == 0 {
                return Err("connection closed mid-body".into());
            }
            buf.extend_from_slice(&chunk[..n]);
        }
        return Ok(Some(Request {
            method,
            path,
            content_type,
            body: buf[header_len..header_len + content_length].to_vec(),
        }));
    }
}

fn query_param(encoded: &[u8]) -> Option<String> {
    url::form_urlencoded::parse(encoded)
        .find(|(k, _)| k == "query")
        .map(|(_, v)| v.into_owned())
}

fn extract_query(req: &Request) -> Result<String, String> {
    let query = match req.method.as_str() {
        "GET" => {
            let qs = req.path.split_once('?').map(|(_, q)| q).unwrap_or_default();
            query_param(qs.as_bytes())
        }
        "POST" => match req.content_type.as_deref() {
            Some(ct) if ct.starts_with("application/sparql-query") => {
                Some(String::from_utf8_lossy(&req.body).into_owned())
            }
            _ => query_param(&req.body),
        },
        other => return Err(format!("method {other} not supported")),
    };
    query
        .filter(|q| !q.trim().is_empty())
        .ok_or_else(|| "missing query parameter".into())
}

fn respond(
    stream: &mut TcpStream,
    status: u16,
    content_type: &str,
    body: &str,
) -> std::io::Result<()> {
    let reason = match status {
        200 => "OK",
        400 => "Bad Request",
        404 => "Not Found",
        500 => "Internal Server Error",
        502 => "Bad Gateway",
        503 => "Service Unavailable",
        _ => "Error",
    };
    let head = format!(
        "HTTP/1.1 {status} {reason}\r\nContent-Type: {content_type}\r\nContent-Length: {}\r\nConnection: close\r\n\r\n",
        body.len()
    );
    stream.write_all(head.as_bytes())?;
    stream.write_all(body.as_bytes())?;
    stream.flush()
}
