//! Line-delimited JSON server over TCP.
//!
//! Each request and response is one JSON object on one line. A request
//! carries a client-chosen integer `id` and exactly one of
//! `{"auth": {"user", "pass"}}`, `{"query": text, "params": {...}}` or
//! `{"ping": ...}`. The first request on a connection must be `auth`.
//!
//! Success responses are `{"id", "ok": true}` for auth and ping, and add
//! `columns`, `rows` and `summary` for queries. Failures are
//! `{"id", "ok": false, "error": {"code", "message", "offset"?}}`. Auth
//! failures and protocol errors close the connection; query errors do not.

use std::collections::BTreeSet;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread;

use serde_json::{json, Map, Value as Json};

use crate::engine::Engine;
use crate::query::{Params, QueryError, Value};

pub const DEFAULT_BIND: &str = "localhost:7687";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCode {
    AuthFailed = 1,
    Parse = 2,
    Exec = 3,
    Protocol = 4,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Credentials {
    pub user: String,
    pub pass: String,
}

impl Credentials {
    pub fn new(user: impl Into<String>, pass: impl Into<String>) -> Credentials {
        Credentials { user: user.into(), pass: pass.into() }
    }
}

/// A bound listener. [`Server::serve`] blocks; stop it through a
/// [`ShutdownHandle`].
pub struct Server {
    listener: TcpListener,
    engine: Engine,
    credentials: Arc<Credentials>,
    stop: Arc<AtomicBool>,
}

#[derive(Debug, Clone)]
pub struct ShutdownHandle {
    addr: SocketAddr,
    stop: Arc<AtomicBool>,
}

impl ShutdownHandle {
    /// Stops accepting connections. Connections already open run until
    /// their clients disconnect.
    pub fn shutdown(&self) {
        if !self.stop.swap(true, Ordering::SeqCst) {
            // Wake the blocking accept.
            let _ = TcpStream::connect(self.addr);
        }
    }
}

impl Server {
    pub fn bind(addr: impl ToSocketAddrs, engine: Engine, credentials: Credentials) -> io::Result<Server> {
        Ok(Server {
            listener: TcpListener::bind(addr)?,
            engine,
            credentials: Arc::new(credentials),
            stop: Arc::new(AtomicBool::new(false)),
        })
    }

    pub fn local_addr(&self) -> io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    pub fn shutdown_handle(&self) -> io::Result<ShutdownHandle> {
        Ok(ShutdownHandle { addr: self.local_addr()?, stop: self.stop.clone() })
    }

    /// Accepts connections until shut down, one thread per connection.
    pub fn serve(self) -> io::Result<()> {
        log::info!("listening on {}", self.local_addr()?);
        for stream in self.listener.incoming() {
            if self.stop.load(Ordering::SeqCst) {
                break;
            }
            let stream = match stream {
                Ok(s) => s,
                Err(e) => {
                    log::warn!("accept failed: {e}");
                    continue;
                }
            };
            let engine = self.engine.clone();
            let credentials = self.credentials.clone();
            thread::spawn(move || {
                let peer = stream.peer_addr().ok();
                if let Err(e) = Connection::new(engine, credentials).run(stream) {
                    log::debug!("connection {peer:?} ended: {e}");
                }
            });
        }
        Ok(())
    }

    /// Runs [`Server::serve`] on a background thread.
    pub fn spawn(self) -> io::Result<(ShutdownHandle, thread::JoinHandle<io::Result<()>>)> {
        let handle = self.shutdown_handle()?;
        Ok((handle, thread::spawn(move || self.serve())))
    }
}

enum Outcome {
    Continue(Json),
    Close(Json),
}

struct Connection {
    engine: Engine,
    credentials: Arc<Credentials>,
    authenticated: bool,
    seen: BTreeSet<i64>,
}

impl Connection {
    fn new(engine: Engine, credentials: Arc<Credentials>) -> Connection {
        Connection { engine, credentials, authenticated: false, seen: BTreeSet::new() }
    }

    fn run(mut self, stream: TcpStream) -> io::Result<()> {
        let reader = BufReader::new(stream.try_clone()?);
        let mut writer = BufWriter::new(stream);
        for line in reader.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let (response, close) = match self.handle(&line) {
                Outcome::Continue(r) => (r, false),
                Outcome::Close(r) => (r, true),
            };
            serde_json::to_writer(&mut writer, &response)?;
            writer.write_all(b"\n")?;
            writer.flush()?;
            if close {
                break;
            }
        }
        Ok(())
    }

    fn handle(&mut self, line: &str) -> Outcome {
        let request: Json = match serde_json::from_str(line) {
            Ok(v) => v,
            Err(e) => return Outcome::Close(failure(Json::Null, ErrorCode::Protocol, &format!("malformed JSON: {e}"), None)),
        };
        let Some(obj) = request.as_object() else {
            return Outcome::Close(failure(Json::Null, ErrorCode::Protocol, "request must be a JSON object", None));
        };
        let id = obj.get("id").cloned().unwrap_or(Json::Null);
        let Some(n) = id.as_i64() else {
            return Outcome::Close(failure(id, ErrorCode::Protocol, "request needs an integer id", None));
        };
        if !self.seen.insert(n) {
            return Outcome::Close(failure(id, ErrorCode::Protocol, &format!("request id {n} reused"), None));
        }
        let kinds: Vec<&str> = ["auth", "query", "ping"].into_iter().filter(|k| obj.contains_key(*k)).collect();
        let [kind] = kinds[..] else {
            return Outcome::Close(failure(id, ErrorCode::Protocol, "request needs exactly one of auth, query, ping", None));
        };
        if kind != "auth" && !self.authenticated {
            return Outcome::Close(failure(id, ErrorCode::Protocol, "first request must be auth", None));
        }
        match kind {
            "auth" => self.auth(id, &obj["auth"]),
            "ping" => Outcome::Continue(json!({"id": id, "ok": true})),
            _ => self.query(id, obj),
        }
    }

    fn auth(&mut self, id: Json, body: &Json) -> Outcome {
        let user = body.get("user").and_then(Json::as_str);
        let pass = body.get("pass").and_then(Json::as_str);
        match (user, pass) {
            (Some(u), Some(p)) if u == self.credentials.user && p == self.credentials.pass => {
                self.authenticated = true;
                Outcome::Continue(json!({"id": id, "ok": true}))
            }
            (Some(_), Some(_)) => Outcome::Close(failure(id, ErrorCode::AuthFailed, "authentication failed", None)),
            _ => Outcome::Close(failure(id, ErrorCode::Protocol, "auth needs string user and pass", None)),
        }
    }

    fn query(&self, id: Json, obj: &Map<String, Json>) -> Outcome {
        let Some(text) = obj["query"].as_str() else {
            return Outcome::Close(failure(id, ErrorCode::Protocol, "query must be a string", None));
        };
        let params = match obj.get("params") {
            None | Some(Json::Null) => Params::new(),
            Some(Json::Object(m)) => match m.iter().map(|(k, v)| Ok((k.clone(), Value::from_json(v)?))).collect::<Result<Params, String>>() {
                Ok(p) => p,
                Err(e) => return Outcome::Close(failure(id, ErrorCode::Protocol, &format!("bad params: {e}"), None)),
            },
            Some(_) => return Outcome::Close(failure(id, ErrorCode::Protocol, "params must be an object", None)),
        };
        match self.engine.run(text, &params) {
            Ok(rs) => {
                let mut body = rs.to_json();
                body["id"] = id;
                body["ok"] = Json::Bool(true);
                Outcome::Continue(body)
            }
            Err(e) => Outcome::Continue(query_failure(id, &e)),
        }
    }
}

fn query_failure(id: Json, e: &QueryError) -> Json {
    let code = if e.is_static() { ErrorCode::Parse } else { ErrorCode::Exec };
    failure(id, code, &e.to_string(), e.offset())
}

fn failure(id: Json, code: ErrorCode, message: &str, offset: Option<usize>) -> Json {
    let mut error = json!({"code": code as u8, "message": message});
    if let Some(o) = offset {
        error["offset"] = json!(o);
    }
    json!({"id": id, "ok": false, "error": error})
}
