//! The `--graph FILE` backing store.

use std::path::PathBuf;

use grafion_core::io::{self, CsvOptions};
use grafion_core::{GraphKind, PropertyGraph};

use crate::failure::Failure;

pub struct GraphFile {
    pub path: Option<PathBuf>,
    pub delimiter: u8,
    pub kind: GraphKind,
}

impl GraphFile {
    pub fn new(path: Option<PathBuf>, delimiter: char, undirected: bool) -> Result<GraphFile, Failure> {
        if !delimiter.is_ascii() {
            return Err(Failure::user(format!("delimiter {delimiter:?} is not a single ASCII character")));
        }
        let kind = if undirected { GraphKind::Undirected } else { GraphKind::Directed };
        Ok(GraphFile { path, delimiter: delimiter as u8, kind })
    }

    fn is_json(path: &std::path::Path) -> bool {
        path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
    }

    /// CSV graph files always carry type suffixes so values read back
    /// with their types.
    fn csv_options(&self) -> CsvOptions {
        CsvOptions { delimiter: self.delimiter, use_types: true, kind: self.kind }
    }

    /// The graph in the file; an error when no file was given.
    pub fn load(&self) -> Result<PropertyGraph, Failure> {
        let path = self.path.as_ref().ok_or_else(|| Failure::user("this command needs --graph FILE"))?;
        self.read(path)
    }

    /// The graph in the file, or an empty one when there is no file yet.
    pub fn load_or_empty(&self) -> Result<PropertyGraph, Failure> {
        match &self.path {
            Some(p) if p.exists() => self.read(p),
            _ => Ok(PropertyGraph::new(self.kind)),
        }
    }

    pub fn read(&self, path: &std::path::Path) -> Result<PropertyGraph, Failure> {
        if Self::is_json(path) {
            let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
                std::io::ErrorKind::NotFound => io::IoError::FileNotFound(path.to_path_buf()),
                _ => e.into(),
            })?;
            Ok(io::from_json(&text)?)
        } else {
            Ok(io::import_csv_all(path, &self.csv_options())?)
        }
    }

    pub fn save(&self, g: &PropertyGraph) -> Result<(), Failure> {
        match &self.path {
            Some(p) => self.write(p, g),
            None => Ok(()),
        }
    }

    pub fn write(&self, path: &std::path::Path, g: &PropertyGraph) -> Result<(), Failure> {
        if Self::is_json(path) {
            let text = io::to_json(g)?;
            std::fs::write(path, text + "\n").map_err(|e| io::IoError::from(e).into())
        } else {
            io::export_csv_all(g, path, &CsvOptions { kind: g.kind(), ..self.csv_options() })?;
            Ok(())
        }
    }
}
