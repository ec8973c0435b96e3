//! Cypher-style query language: lexer, parser with scope validation, and a
//! tree-walking executor with procedure calls into the algorithms.

pub mod ast;
mod exec;
mod functions;
pub mod lexer;
mod parser;
mod procedures;

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde_json::json;
use thiserror::Error;

use crate::algorithms::AlgoError;
use crate::graph::{EdgeRecord, GraphError, NodeRecord, PropertyGraph};
use crate::io::IoError;
use crate::value::PropertyValue;

pub use ast::Statement;
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::parse;

#[derive(Debug, Error)]
pub enum QueryError {
    #[error("lexical error at offset {offset}: {message}")]
    Lex { offset: usize, message: String },
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("unbound variable '{name}' at offset {offset}")]
    UnboundVariable { name: String, offset: usize },
    #[error("unknown function '{name}' at offset {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("unknown procedure '{name}'")]
    UnknownProcedure { name: String, offset: Option<usize> },
    #[error("bad arguments: {0}")]
    BadArguments(String),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("missing parameter ${0}")]
    MissingParameter(String),
    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Algo(#[from] AlgoError),
    #[error(transparent)]
    Io(IoError),
}

impl From<IoError> for QueryError {
    fn from(e: IoError) -> Self {
        match e {
            IoError::FileNotFound(p) => QueryError::FileNotFound(p),
            other => QueryError::Io(other),
        }
    }
}

// Compared by rendered message; the wrapped error types are not all `Eq`.
impl PartialEq for QueryError {
    fn eq(&self, other: &Self) -> bool {
        std::mem::discriminant(self) == std::mem::discriminant(other) && self.to_string() == other.to_string()
    }
}

impl QueryError {
    pub(crate) fn lex(offset: usize, message: impl Into<String>) -> Self {
        QueryError::Lex { offset, message: message.into() }
    }

    pub(crate) fn parse(offset: usize, message: impl Into<String>) -> Self {
        QueryError::Parse { offset, message: message.into() }
    }

    /// Source offset the error points at, when it has one.
    pub fn offset(&self) -> Option<usize> {
        match self {
            QueryError::Lex { offset, .. }
            | QueryError::Parse { offset, .. }
            | QueryError::UnboundVariable { offset, .. }
            | QueryError::UnknownFunction { offset, .. } => Some(*offset),
            QueryError::UnknownProcedure { offset, .. } => *offset,
            _ => None,
        }
    }

    /// True for errors found before execution starts.
    pub fn is_static(&self) -> bool {
        matches!(
            self,
            QueryError::Lex { .. }
                | QueryError::Parse { .. }
                | QueryError::UnboundVariable { .. }
                | QueryError::UnknownFunction { .. }
                | QueryError::UnknownProcedure { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, QueryError>;

/// A value in a result row or a parameter.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Null,
    Bool(bool),
    Int(i64),
    Float(f64),
    Text(String),
    List(Vec<Value>),
    Map(BTreeMap<String, Value>),
    Node(NodeRecord),
    Edge(EdgeRecord),
    Path { nodes: Vec<NodeRecord>, edges: Vec<EdgeRecord> },
}

impl From<PropertyValue> for Value {
    fn from(v: PropertyValue) -> Self {
        match v {
            PropertyValue::Null => Value::Null,
            PropertyValue::Bool(b) => Value::Bool(b),
            PropertyValue::Int(i) => Value::Int(i),
            PropertyValue::Float(f) => Value::Float(f),
            PropertyValue::Text(s) => Value::Text(s),
        }
    }
}

fn node_json(n: &NodeRecord) -> serde_json::Value {
    json!({"id": n.id, "labels": n.labels, "properties": n.properties})
}

fn edge_json(e: &EdgeRecord) -> serde_json::Value {
    json!({"id": e.id, "type": e.rel_type, "source": e.source, "target": e.target, "properties": e.properties})
}

impl Value {
    /// JSON form: scalars map directly; nodes, edges and paths become
    /// objects shaped like the graph interchange format.
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Null => serde_json::Value::Null,
            Value::Bool(b) => json!(b),
            Value::Int(i) => json!(i),
            Value::Float(f) => json!(f),
            Value::Text(s) => json!(s),
            Value::List(items) => items.iter().map(Value::to_json).collect(),
            Value::Map(m) => m.iter().map(|(k, v)| (k.clone(), v.to_json())).collect::<serde_json::Map<_, _>>().into(),
            Value::Node(n) => node_json(n),
            Value::Edge(e) => edge_json(e),
            Value::Path { nodes, edges } => json!({
                "nodes": nodes.iter().map(node_json).collect::<Vec<_>>(),
                "edges": edges.iter().map(edge_json).collect::<Vec<_>>(),
            }),
        }
    }

    /// Inverse of [`to_json`](Self::to_json) for scalars, lists and maps,
    /// the shapes parameters can take.
    pub fn from_json(v: &serde_json::Value) -> std::result::Result<Value, String> {
        Ok(match v {
            serde_json::Value::Null => Value::Null,
            serde_json::Value::Bool(b) => Value::Bool(*b),
            serde_json::Value::Number(n) => match n.as_i64() {
                Some(i) => Value::Int(i),
                None => match n.as_f64() {
                    Some(f) if n.is_f64() => Value::Float(f),
                    _ => return Err(format!("number {n} out of range")),
                },
            },
            serde_json::Value::String(s) => Value::Text(s.clone()),
            serde_json::Value::Array(items) => Value::List(items.iter().map(Value::from_json).collect::<std::result::Result<_, _>>()?),
            serde_json::Value::Object(m) => Value::Map(
                m.iter().map(|(k, v)| Ok((k.clone(), Value::from_json(v)?))).collect::<std::result::Result<_, String>>()?,
            ),
        })
    }
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Null => write!(f, "null"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Float(x) => write!(f, "{}", crate::value::format_float(*x)),
            Value::Text(s) => write!(f, "{s}"),
            Value::List(items) => {
                write!(f, "[")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, "]")
            }
            Value::Map(m) => {
                write!(f, "{{")?;
                for (i, (k, v)) in m.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{k}: {v}")?;
                }
                write!(f, "}}")
            }
            Value::Node(n) => {
                write!(f, "(")?;
                write!(f, "{}", n.id)?;
                for l in &n.labels {
                    write!(f, ":{l}")?;
                }
                if !n.properties.is_empty() {
                    write!(f, " {}", Value::Map(n.properties.iter().map(|(k, v)| (k.clone(), v.clone().into())).collect()))?;
                }
                write!(f, ")")
            }
            Value::Edge(e) => write!(f, "[{}:{} {}->{}]", e.id, e.rel_type, e.source, e.target),
            Value::Path { nodes, .. } => {
                let ids: Vec<String> = nodes.iter().map(|n| n.id.to_string()).collect();
                write!(f, "<{}>", ids.join("-"))
            }
        }
    }
}

pub type Params = BTreeMap<String, Value>;

/// Mutation counters reported with every result.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct Summary {
    pub nodes_created: u64,
    pub relationships_created: u64,
    pub properties_set: u64,
    pub nodes_deleted: u64,
    pub relationships_deleted: u64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RowSet {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub summary: Summary,
}

impl RowSet {
    /// `{"columns": [...], "rows": [[...]], "summary": {...}}`.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "columns": self.columns,
            "rows": self.rows.iter().map(|r| r.iter().map(Value::to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "summary": self.summary,
        })
    }

    /// Values of one column, by name.
    pub fn column(&self, name: &str) -> Option<Vec<&Value>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }
}

/// Settings the executor needs from its host.
#[derive(Debug, Clone, Default)]
pub struct ExecContext {
    /// Base directory for `file:///` URLs in LOAD CSV and export paths.
    pub import_dir: Option<PathBuf>,
}

impl Statement {
    /// Whether executing the statement can change the store.
    pub fn writes(&self) -> bool {
        self.clauses.iter().any(ast::Clause::writes)
    }
}

/// Executes a validated statement. A statement that writes runs against a
/// copy of the graph, swapped in only if every clause succeeds.
pub fn execute(g: &mut PropertyGraph, stmt: &Statement, params: &Params, ctx: &ExecContext) -> Result<RowSet> {
    if stmt.writes() {
        let mut work = g.clone();
        let out = exec::run(&mut work, stmt, params, ctx)?;
        *g = work;
        Ok(out)
    } else {
        exec::run_read(g, stmt, params, ctx)
    }
}

/// Parses and executes in one step.
pub fn run(g: &mut PropertyGraph, text: &str, params: &Params, ctx: &ExecContext) -> Result<RowSet> {
    let stmt = parse(text)?;
    execute(g, &stmt, params, ctx)
}

/// Executes a statement that does not write. Fails with `BadArguments` if
/// it would.
pub fn execute_read(g: &PropertyGraph, stmt: &Statement, params: &Params, ctx: &ExecContext) -> Result<RowSet> {
    if stmt.writes() {
        return Err(QueryError::BadArguments("statement writes to the graph".into()));
    }
    exec::run_read(g, stmt, params, ctx)
}
