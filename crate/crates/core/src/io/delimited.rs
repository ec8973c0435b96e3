use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};
use std::path::Path;

use csv::{ByteRecord, ReaderBuilder, WriterBuilder};

use crate::graph::{GraphKind, PropertyGraph};
use crate::value::{format_float, Properties, PropertyValue};

use super::{open, IoError, Result};

/// Column names with fixed meaning in the whole-graph CSV format. Property
/// keys may not use them.
pub const RESERVED_COLUMNS: [&str; 5] = ["_id", "_labels", "_start", "_end", "_type"];

const TYPE_SUFFIXES: [&str; 4] = [":int", ":float", ":bool", ":string"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CsvOptions {
    pub delimiter: u8,
    /// Suffix non-text values with `:int`, `:float` or `:bool`.
    pub use_types: bool,
    /// Kind of the graph built by [`import_csv_all`]; the file itself does
    /// not record it.
    pub kind: GraphKind,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions { delimiter: b',', use_types: false, kind: GraphKind::Directed }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ExportCounts {
    pub nodes: usize,
    pub edges: usize,
}

fn utf8_record(record: &ByteRecord) -> Result<Vec<String>> {
    let line = record.position().map_or(0, |p| p.line());
    record
        .iter()
        .map(|f| String::from_utf8(f.to_vec()).map_err(|_| IoError::BadEncoding { line }))
        .collect()
}

fn csv_error(e: csv::Error) -> IoError {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => IoError::Io(io),
        csv::ErrorKind::Utf8 { .. } => IoError::BadEncoding { line },
        other => IoError::format(line, format!("{other:?}")),
    }
}

/// Reads a headed CSV file into one map per data row. Missing trailing
/// fields come back as null; a row with more fields than headers is an
/// error.
pub fn load_csv(path: &Path, delimiter: u8) -> Result<Vec<BTreeMap<String, PropertyValue>>> {
    load_csv_from(open(path)?, delimiter)
}

pub fn load_csv_from<R: Read>(input: R, delimiter: u8) -> Result<Vec<BTreeMap<String, PropertyValue>>> {
    let mut reader = ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(false)
        .flexible(true)
        .from_reader(input);
    let mut records = reader.byte_records();
    let headers = match records.next() {
        None => return Ok(Vec::new()),
        Some(r) => utf8_record(&r.map_err(csv_error)?)?,
    };
    let mut rows = Vec::new();
    for record in records {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        let fields = utf8_record(&record)?;
        if fields.len() > headers.len() {
            return Err(IoError::RaggedRow { line, fields: fields.len(), headers: headers.len() });
        }
        let mut row: BTreeMap<String, PropertyValue> =
            headers.iter().map(|h| (h.clone(), PropertyValue::Null)).collect();
        for (h, f) in headers.iter().zip(fields) {
            row.insert(h.clone(), PropertyValue::Text(f));
        }
        rows.push(row);
    }
    Ok(rows)
}

fn encode(value: &PropertyValue, use_types: bool) -> String {
    match (value, use_types) {
        (PropertyValue::Null, _) => String::new(),
        (PropertyValue::Text(t), true) if t.is_empty() || TYPE_SUFFIXES.iter().any(|s| t.ends_with(s)) => {
            format!("{t}:string")
        }
        (PropertyValue::Text(t), _) => t.clone(),
        (PropertyValue::Int(i), true) => format!("{i}:int"),
        (PropertyValue::Float(f), true) => format!("{}:float", format_float(*f)),
        (PropertyValue::Bool(b), true) => format!("{b}:bool"),
        (other, false) => other.to_string(),
    }
}

fn decode(field: &str, use_types: bool, line: u64) -> Result<Option<PropertyValue>> {
    if field.is_empty() {
        return Ok(None);
    }
    if !use_types {
        return Ok(Some(PropertyValue::text(field)));
    }
    let bad = |what: &str| IoError::format(line, format!("bad {what} value {field:?}"));
    let value = if let Some(t) = field.strip_suffix(":string") {
        PropertyValue::text(t)
    } else if let Some(t) = field.strip_suffix(":int") {
        PropertyValue::Int(t.parse().map_err(|_| bad("int"))?)
    } else if let Some(t) = field.strip_suffix(":float") {
        let f: f64 = t.parse().map_err(|_| bad("float"))?;
        PropertyValue::float(f).map_err(|_| bad("float"))?
    } else if let Some(t) = field.strip_suffix(":bool") {
        PropertyValue::Bool(t.parse().map_err(|_| bad("bool"))?)
    } else {
        PropertyValue::text(field)
    };
    Ok(Some(value))
}

/// Writes every node, then every edge, as rows of one CSV file with
/// columns `_id, _labels, <property keys ascending>, _start, _end, _type`.
pub fn export_csv_all(g: &PropertyGraph, path: &Path, options: &CsvOptions) -> Result<ExportCounts> {
    let file = std::fs::File::create(path)?;
    let mut out = std::io::BufWriter::new(file);
    let counts = export_csv_to(g, &mut out, options)?;
    out.flush()?;
    Ok(counts)
}

pub fn export_csv_to<W: Write>(g: &PropertyGraph, out: W, options: &CsvOptions) -> Result<ExportCounts> {
    let mut keys = BTreeSet::new();
    for node in g.nodes() {
        if let Some(label) = node.labels.iter().find(|l| l.contains(':')) {
            return Err(IoError::Unencodable(format!("label {label:?} contains ':'")));
        }
        keys.extend(node.properties.keys().cloned());
    }
    for edge in g.edges() {
        keys.extend(edge.properties.keys().cloned());
    }
    if let Some(k) = keys.iter().find(|k| RESERVED_COLUMNS.contains(&k.as_str())) {
        return Err(IoError::Unencodable(format!("property key {k:?} is a reserved column")));
    }
    let mut writer = WriterBuilder::new().delimiter(options.delimiter).from_writer(out);
    let mut header = vec!["_id".to_string(), "_labels".to_string()];
    header.extend(keys.iter().cloned());
    header.extend(["_start", "_end", "_type"].map(String::from));
    writer.write_record(&header).map_err(csv_error)?;

    let row = |id: u64, labels: String, props: &Properties, tail: [String; 3]| {
        let mut fields = vec![id.to_string(), labels];
        fields.extend(keys.iter().map(|k| props.get(k).map_or(String::new(), |v| encode(v, options.use_types))));
        fields.extend(tail);
        fields
    };
    for node in g.nodes() {
        let labels: String = node.labels.iter().map(|l| format!(":{l}")).collect();
        writer
            .write_record(row(node.id, labels, &node.properties, Default::default()))
            .map_err(csv_error)?;
    }
    for edge in g.edges() {
        let tail = [edge.source.to_string(), edge.target.to_string(), edge.rel_type.clone()];
        writer.write_record(row(edge.id, String::new(), &edge.properties, tail)).map_err(csv_error)?;
    }
    writer.flush()?;
    Ok(ExportCounts { nodes: g.node_count(), edges: g.edge_count() })
}

/// Inverse of [`export_csv_all`]: rebuilds the graph with its original ids.
pub fn import_csv_all(path: &Path, options: &CsvOptions) -> Result<PropertyGraph> {
    import_csv_from(open(path)?, options)
}

struct PendingEdge {
    line: u64,
    id: u64,
    source: u64,
    target: u64,
    rel_type: String,
    properties: Properties,
}

pub fn import_csv_from<R: Read>(input: R, options: &CsvOptions) -> Result<PropertyGraph> {
    let mut reader = ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(false)
        .from_reader(input);
    let mut records = reader.byte_records();
    let header = match records.next() {
        None => return Err(IoError::format(1, "missing header")),
        Some(r) => utf8_record(&r.map_err(csv_error)?)?,
    };
    let column = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| IoError::format(1, format!("missing {name} column")))
    };
    let [id_col, labels_col, start_col, end_col, type_col] =
        [column("_id")?, column("_labels")?, column("_start")?, column("_end")?, column("_type")?];
    let prop_cols: Vec<(usize, &String)> = header
        .iter()
        .enumerate()
        .filter(|(_, h)| !RESERVED_COLUMNS.contains(&h.as_str()))
        .collect();

    let mut g = PropertyGraph::new(options.kind);
    let mut edges = Vec::new();
    for record in records {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        let fields = utf8_record(&record)?;
        let int = |col: usize, what: &str| -> Result<u64> {
            fields[col].parse().map_err(|_| IoError::format(line, format!("bad {what} {:?}", fields[col])))
        };
        let mut properties = Properties::new();
        for &(col, key) in &prop_cols {
            if let Some(v) = decode(&fields[col], options.use_types, line)? {
                properties.insert(key.clone(), v);
            }
        }
        let id = int(id_col, "_id")?;
        if fields[type_col].is_empty() {
            let labels_field = &fields[labels_col];
            let labels: BTreeSet<String> = match labels_field.strip_prefix(':') {
                Some(rest) => rest.split(':').map(String::from).collect(),
                None if labels_field.is_empty() => BTreeSet::new(),
                None => return Err(IoError::format(line, format!("bad _labels {labels_field:?}"))),
            };
            g.insert_node(id, labels, properties).map_err(|e| IoError::format(line, e.to_string()))?;
        } else {
            edges.push(PendingEdge {
                line,
                id,
                source: int(start_col, "_start")?,
                target: int(end_col, "_end")?,
                rel_type: fields[type_col].clone(),
                properties,
            });
        }
    }
    for e in edges {
        g.insert_edge(e.id, e.source, e.target, &e.rel_type, e.properties)
            .map_err(|err| IoError::format(e.line, err.to_string()))?;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::props;

    fn two_people() -> PropertyGraph {
        let mut g = PropertyGraph::directed();
        let a = g.add_node(["Person"], props([("name", "Alice"), ("age", "30")]));
        let b = g.add_node(["Person", "Admin"], props([("name", PropertyValue::text("Bob"))]));
        g.add_edge(a, b, "FRIEND", props([("since", 2015)])).unwrap();
        g
    }

    fn typed() -> CsvOptions {
        CsvOptions { delimiter: b';', use_types: true, kind: GraphKind::Directed }
    }

    #[test]
    fn export_layout() {
        let mut buf = Vec::new();
        let counts = export_csv_to(&two_people(), &mut buf, &typed()).unwrap();
        assert_eq!(counts, ExportCounts { nodes: 2, edges: 1 });
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "_id;_labels;age;name;since;_start;_end;_type\n\
             0;:Person;30;Alice;;;;\n\
             1;:Admin:Person;;Bob;;;;\n\
             0;;;;2015:int;0;1;FRIEND\n"
        );
    }

    #[test]
    fn empty_graph_is_header_only() {
        let mut buf = Vec::new();
        let counts = export_csv_to(&PropertyGraph::directed(), &mut buf, &CsvOptions::default()).unwrap();
        assert_eq!(counts, ExportCounts::default());
        assert_eq!(String::from_utf8(buf).unwrap(), "_id,_labels,_start,_end,_type\n");
    }

    #[test]
    fn typed_round_trip() {
        let mut g = two_people();
        g.set_properties(
            crate::graph::ElementRef::Node(0),
            props([
                ("f", PropertyValue::Float(2.0)),
                ("t", PropertyValue::Bool(true)),
                ("e", PropertyValue::text("")),
                ("s", PropertyValue::text("25:int")),
                ("q", PropertyValue::text("a;\"b\"\nc")),
            ]),
        )
        .unwrap();
        let mut buf = Vec::new();
        export_csv_to(&g, &mut buf, &typed()).unwrap();
        let back = import_csv_from(buf.as_slice(), &typed()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn typed_value_decodes() {
        assert_eq!(decode("25:int", true, 1).unwrap(), Some(PropertyValue::Int(25)));
        assert_eq!(decode("25:int", false, 1).unwrap(), Some(PropertyValue::text("25:int")));
        assert!(decode("x:int", true, 3).is_err());
    }

    #[test]
    fn import_errors_carry_lines() {
        let err = import_csv_from("_labels,_start,_end,_type\n".as_bytes(), &CsvOptions::default()).unwrap_err();
        assert!(matches!(err, IoError::Format { line: 1, .. }), "{err}");
        let text = "_id,_labels,_start,_end,_type\n0,:A,,,\n1,,0,9,R\n";
        let err = import_csv_from(text.as_bytes(), &CsvOptions::default()).unwrap_err();
        assert!(matches!(err, IoError::Format { line: 3, .. }), "{err}");
    }

    #[test]
    fn reserved_key_rejected() {
        let mut g = PropertyGraph::directed();
        g.add_node(Vec::<String>::new(), props([("_type", 1)]));
        assert!(matches!(export_csv_to(&g, Vec::new(), &CsvOptions::default()), Err(IoError::Unencodable(_))));
    }

    #[test]
    fn load_rows() {
        let text = "name,age,city\nAlice,30,New York\n\"Bob, Jr\",25\n";
        let rows = load_csv_from(text.as_bytes(), b',').unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0]["city"], PropertyValue::text("New York"));
        assert_eq!(rows[1]["name"], PropertyValue::text("Bob, Jr"));
        assert_eq!(rows[1]["city"], PropertyValue::Null);
        assert!(load_csv_from("a,b\n".as_bytes(), b',').unwrap().is_empty());
        assert!(load_csv_from("".as_bytes(), b',').unwrap().is_empty());
        let err = load_csv_from("a,b,c\n1,2,3,4\n".as_bytes(), b',').unwrap_err();
        assert!(matches!(err, IoError::RaggedRow { line: 2, fields: 4, headers: 3 }));
        let err = load_csv_from(&b"a\n\xff\n"[..], b',').unwrap_err();
        assert!(matches!(err, IoError::BadEncoding { line: 2 }));
    }

    #[test]
    fn missing_file() {
        let err = load_csv(Path::new("/nonexistent/people.csv"), b',').unwrap_err();
        assert!(matches!(err, IoError::FileNotFound(_)));
    }
}
