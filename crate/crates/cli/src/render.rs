//! Plain-text output: aligned tables and error carets.

use grafion_core::query::{QueryError, RowSet};

/// Left-aligned columns separated by ` | `, with a rule under the header.
pub fn table(headers: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &mut dyn Iterator<Item = &str>| {
        let padded: Vec<String> = cells.zip(&widths).map(|(c, &w)| format!("{c:<w$}")).collect();
        padded.join(" | ").trim_end().to_string() + "\n"
    };
    let mut out = line(&mut headers.iter().copied());
    out += &(widths.iter().map(|&w| "-".repeat(w)).collect::<Vec<_>>().join("-+-") + "\n");
    for row in &rows {
        out += &line(&mut row.iter().map(String::as_str));
    }
    out
}

pub fn rowset(rs: &RowSet) -> String {
    let mut out = String::new();
    if !rs.columns.is_empty() {
        let headers: Vec<&str> = rs.columns.iter().map(String::as_str).collect();
        let rows = rs.rows.iter().map(|r| r.iter().map(|v| v.to_string()).collect()).collect();
        out += &table(&headers, rows);
        let n = rs.rows.len();
        out += &format!("({n} row{})\n", if n == 1 { "" } else { "s" });
    }
    let s = rs.summary;
    let counters: Vec<String> = [
        ("nodes created", s.nodes_created),
        ("relationships created", s.relationships_created),
        ("properties set", s.properties_set),
        ("nodes deleted", s.nodes_deleted),
        ("relationships deleted", s.relationships_deleted),
    ]
    .into_iter()
    .filter(|&(_, c)| c > 0)
    .map(|(name, c)| format!("{name}: {c}"))
    .collect();
    if !counters.is_empty() {
        out += &(counters.join(", ") + "\n");
    }
    out
}

/// The error message, then the source line it points into with a caret
/// under the offending column.
pub fn query_error(text: &str, e: &QueryError) -> String {
    let Some(offset) = e.offset().filter(|&o| o <= text.len() && text.is_char_boundary(o)) else {
        return e.to_string();
    };
    let start = text[..offset].rfind('\n').map_or(0, |i| i + 1);
    let end = text[offset..].find('\n').map_or(text.len(), |i| offset + i);
    let column = text[start..offset].chars().count();
    format!("{e}\n  {}\n  {}^", &text[start..end], " ".repeat(column))
}
