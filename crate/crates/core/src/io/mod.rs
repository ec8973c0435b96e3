//! Persistence surface: CSV row loading, whole-graph CSV export/import,
//! JSON graph interchange and the layout file format.

mod delimited;
mod json;

use std::path::PathBuf;

use thiserror::Error;

use crate::graph::GraphError;

pub use delimited::{
    export_csv_all, export_csv_to, import_csv_all, import_csv_from, load_csv, load_csv_from, CsvOptions,
    ExportCounts, RESERVED_COLUMNS,
};
pub use json::{from_json, layout_json, to_json};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),
    #[error("line {line}: {fields} fields under {headers} headers")]
    RaggedRow { line: u64, fields: usize, headers: usize },
    #[error("line {line}: input is not valid UTF-8")]
    BadEncoding { line: u64 },
    #[error("line {line}: {message}")]
    Format { line: u64, message: String },
    #[error("{0}")]
    Json(String),
    #[error("cannot encode graph: {0}")]
    Unencodable(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, IoError>;

impl IoError {
    pub(crate) fn format(line: u64, message: impl Into<String>) -> Self {
        IoError::Format { line, message: message.into() }
    }
}

fn open(path: &std::path::Path) -> Result<std::fs::File> {
    std::fs::File::open(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => IoError::FileNotFound(path.to_path_buf()),
        _ => IoError::Io(e),
    })
}
