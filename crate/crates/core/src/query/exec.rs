//! Tree-walking executor. Rows flow clause to clause as variable maps;
//! nodes and edges are carried by id and materialized at the end.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::algorithms::{bfs_shortest_path, AlgoError};
use crate::graph::{Direction, EdgeId, ElementRef, NodeId, PropertyGraph};
use crate::io::load_csv;
use crate::value::{Properties, PropertyValue};

use super::ast::*;
use super::functions;
use super::procedures;
use super::{ExecContext, Params, QueryError, Result, RowSet, Summary, Value};

/// Runtime value. Graph elements are referenced by id.
#[derive(Debug, Clone)]
pub enum Val {
    Null,
    Bool(bool),
    Int(i64),
    Float(f64),
    Text(String),
    List(Vec<Val>),
    Map(BTreeMap<String, Val>),
    Node(NodeId),
    Edge(EdgeId),
    Path { nodes: Vec<NodeId>, edges: Vec<EdgeId> },
}

impl Val {
    fn rank(&self) -> u8 {
        match self {
            Val::Null => 0,
            Val::Bool(_) => 1,
            Val::Int(_) | Val::Float(_) => 2,
            Val::Text(_) => 3,
            Val::List(_) => 4,
            Val::Map(_) => 5,
            Val::Node(_) => 6,
            Val::Edge(_) => 7,
            Val::Path { .. } => 8,
        }
    }

    fn type_name(&self) -> &'static str {
        match self {
            Val::Null => "null",
            Val::Bool(_) => "boolean",
            Val::Int(_) => "integer",
            Val::Float(_) => "float",
            Val::Text(_) => "string",
            Val::List(_) => "list",
            Val::Map(_) => "map",
            Val::Node(_) => "node",
            Val::Edge(_) => "relationship",
            Val::Path { .. } => "path",
        }
    }
}

impl From<&PropertyValue> for Val {
    fn from(v: &PropertyValue) -> Self {
        match v {
            PropertyValue::Null => Val::Null,
            PropertyValue::Bool(b) => Val::Bool(*b),
            PropertyValue::Int(i) => Val::Int(*i),
            PropertyValue::Float(f) => Val::Float(*f),
            PropertyValue::Text(s) => Val::Text(s.clone()),
        }
    }
}

impl From<&Value> for Val {
    fn from(v: &Value) -> Self {
        match v {
            Value::Null => Val::Null,
            Value::Bool(b) => Val::Bool(*b),
            Value::Int(i) => Val::Int(*i),
            Value::Float(f) => Val::Float(*f),
            Value::Text(s) => Val::Text(s.clone()),
            Value::List(items) => Val::List(items.iter().map(Val::from).collect()),
            Value::Map(m) => Val::Map(m.iter().map(|(k, v)| (k.clone(), v.into())).collect()),
            Value::Node(n) => Val::Node(n.id),
            Value::Edge(e) => Val::Edge(e.id),
            Value::Path { nodes, edges } => Val::Path {
                nodes: nodes.iter().map(|n| n.id).collect(),
                edges: edges.iter().map(|e| e.id).collect(),
            },
        }
    }
}

// Total order used for grouping and DISTINCT: type rank first, then
// payload. Integers and floats share a rank and compare numerically, with
// the integer first on a tie so that 1 and 1.0 stay distinct.
impl Ord for Val {
    fn cmp(&self, other: &Self) -> Ordering {
        use Val::*;
        match (self, other) {
            (Int(a), Int(b)) => a.cmp(b),
            (Float(a), Float(b)) => a.total_cmp(b),
            (Int(a), Float(b)) => (*a as f64).total_cmp(b).then(Ordering::Less),
            (Float(a), Int(b)) => a.total_cmp(&(*b as f64)).then(Ordering::Greater),
            (Bool(a), Bool(b)) => a.cmp(b),
            (Text(a), Text(b)) => a.cmp(b),
            (List(a), List(b)) => a.cmp(b),
            (Map(a), Map(b)) => a.cmp(b),
            (Node(a), Node(b)) | (Edge(a), Edge(b)) => a.cmp(b),
            (Path { nodes: a, edges: x }, Path { nodes: b, edges: y }) => a.cmp(b).then_with(|| x.cmp(y)),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for Val {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Val {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Val {}

/// Query equality: `None` when either side is null, numbers compare
/// across int and float, values of different types are unequal.
fn equals(a: &Val, b: &Val) -> Option<bool> {
    use Val::*;
    Some(match (a, b) {
        (Null, _) | (_, Null) => return None,
        (Int(x), Float(y)) | (Float(y), Int(x)) => (*x as f64) == *y,
        (Float(x), Float(y)) => x == y,
        (List(x), List(y)) => {
            if x.len() != y.len() {
                return Some(false);
            }
            for (p, q) in x.iter().zip(y) {
                match equals(p, q) {
                    Some(true) => {}
                    other => return other,
                }
            }
            true
        }
        (Map(x), Map(y)) => {
            if x.len() != y.len() || x.keys().ne(y.keys()) {
                return Some(false);
            }
            for (p, q) in x.values().zip(y.values()) {
                match equals(p, q) {
                    Some(true) => {}
                    other => return other,
                }
            }
            true
        }
        _ if a.rank() != b.rank() => false,
        _ => a == b,
    })
}

/// Ordering for `<`-style comparisons: numbers, strings and booleans among
/// themselves; `None` otherwise.
fn compare(a: &Val, b: &Val) -> Option<Ordering> {
    use Val::*;
    match (a, b) {
        (Int(x), Int(y)) => Some(x.cmp(y)),
        (Int(_) | Float(_), Int(_) | Float(_)) => to_f64(a)?.partial_cmp(&to_f64(b)?),
        (Text(x), Text(y)) => Some(x.cmp(y)),
        (Bool(x), Bool(y)) => Some(x.cmp(y)),
        _ => None,
    }
}

fn to_f64(v: &Val) -> Option<f64> {
    match v {
        Val::Int(i) => Some(*i as f64),
        Val::Float(f) => Some(*f),
        _ => None,
    }
}

/// Sort order for ORDER BY: nulls last in either direction; nodes and
/// edges by id; other mixes are a type error.
fn sort_cmp(a: &Val, b: &Val, descending: bool) -> Result<Ordering> {
    let ord = match (a, b) {
        (Val::Null, Val::Null) => return Ok(Ordering::Equal),
        (Val::Null, _) => return Ok(Ordering::Greater),
        (_, Val::Null) => return Ok(Ordering::Less),
        (Val::Node(x), Val::Node(y)) | (Val::Edge(x), Val::Edge(y)) => x.cmp(y),
        _ => compare(a, b).ok_or_else(|| {
            QueryError::TypeMismatch(format!("cannot order {} against {}", a.type_name(), b.type_name()))
        })?,
    };
    Ok(if descending { ord.reverse() } else { ord })
}

fn truthy(v: &Val) -> Result<bool> {
    match v {
        Val::Bool(b) => Ok(*b),
        Val::Null => Ok(false),
        other => Err(QueryError::TypeMismatch(format!("expected a boolean, got {}", other.type_name()))),
    }
}

fn to_property(v: Val) -> Result<PropertyValue> {
    Ok(match v {
        Val::Null => PropertyValue::Null,
        Val::Bool(b) => PropertyValue::Bool(b),
        Val::Int(i) => PropertyValue::Int(i),
        Val::Float(f) => PropertyValue::float(f)
            .map_err(|_| QueryError::TypeMismatch("NaN cannot be stored as a property".into()))?,
        Val::Text(s) => PropertyValue::Text(s),
        other => return Err(QueryError::TypeMismatch(format!("a {} cannot be stored as a property", other.type_name()))),
    })
}

type Row = BTreeMap<String, Val>;
/// Precomputed aggregate values, keyed by the address of their expression.
type AggMap = HashMap<*const Expr, Val>;
/// A partial match: bindings plus the edges already used by the clause.
type Partial = (Row, BTreeSet<EdgeId>);

enum Store<'a> {
    Read(&'a PropertyGraph),
    Write(&'a mut PropertyGraph),
}

pub(super) fn run(g: &mut PropertyGraph, stmt: &Statement, params: &Params, ctx: &ExecContext) -> Result<RowSet> {
    Executor { store: Store::Write(g), params, ctx, summary: Summary::default() }.run(stmt)
}

pub(super) fn run_read(g: &PropertyGraph, stmt: &Statement, params: &Params, ctx: &ExecContext) -> Result<RowSet> {
    Executor { store: Store::Read(g), params, ctx, summary: Summary::default() }.run(stmt)
}

struct Executor<'a> {
    store: Store<'a>,
    params: &'a Params,
    ctx: &'a ExecContext,
    summary: Summary,
}

impl Executor<'_> {
    fn g(&self) -> &PropertyGraph {
        match &self.store {
            Store::Read(g) => g,
            Store::Write(g) => g,
        }
    }

    fn g_mut(&mut self) -> &mut PropertyGraph {
        match &mut self.store {
            Store::Write(g) => g,
            Store::Read(_) => unreachable!("write clause on a read-only store"),
        }
    }

    fn run(mut self, stmt: &Statement) -> Result<RowSet> {
        let mut rows = vec![Row::new()];
        let mut output: Option<(Vec<String>, Vec<Vec<Val>>)> = None;
        let last = stmt.clauses.len() - 1;
        for (i, clause) in stmt.clauses.iter().enumerate() {
            match clause {
                Clause::LoadCsv { url, variable, delimiter } => rows = self.load_csv(rows, url, variable, delimiter)?,
                Clause::Create(patterns) => {
                    for row in &mut rows {
                        for p in patterns {
                            self.create_pattern(row, p)?;
                        }
                    }
                }
                Clause::CreateIndex { label, key, .. } => self.g_mut().create_property_index(label, key)?,
                Clause::Match(patterns) => rows = self.match_clause(rows, patterns)?,
                Clause::Where(e) => {
                    let mut kept = Vec::with_capacity(rows.len());
                    for row in rows {
                        if truthy(&self.eval(e, &row, None)?)? {
                            kept.push(row);
                        }
                    }
                    rows = kept;
                }
                Clause::With(p) => {
                    let (names, values) = self.project(rows, p)?;
                    rows = values.into_iter().map(|vs| names.iter().cloned().zip(vs).collect()).collect();
                }
                Clause::Unwind { expr, variable } => {
                    let mut out = Vec::new();
                    for row in rows {
                        let items = match self.eval(expr, &row, None)? {
                            Val::List(items) => items,
                            Val::Null => Vec::new(),
                            other => vec![other],
                        };
                        for item in items {
                            let mut r = row.clone();
                            r.insert(variable.clone(), item);
                            out.push(r);
                        }
                    }
                    rows = out;
                }
                Clause::Set(items) => {
                    for row in &rows {
                        for item in items {
                            self.set_item(row, item)?;
                        }
                    }
                }
                Clause::Delete { detach, variables } => self.delete(&rows, *detach, variables)?,
                Clause::Return(p) => {
                    output = Some(self.project(std::mem::take(&mut rows), p)?);
                }
                Clause::Call { procedure, args, yields } => {
                    let names: Vec<String> = match yields {
                        Some(ys) => ys.clone(),
                        None => procedures::columns(procedure)
                            .expect("validated procedure")
                            .iter()
                            .map(|c| c.to_string())
                            .collect(),
                    };
                    rows = self.call(rows, procedure, args, &names)?;
                    if i == last {
                        let values = rows.iter().map(|r| names.iter().map(|n| r[n].clone()).collect()).collect();
                        output = Some((names, values));
                    }
                }
            }
        }
        let (columns, values) = output.unwrap_or_default();
        let rows = values.into_iter().map(|r| r.into_iter().map(|v| self.materialize(v)).collect()).collect();
        Ok(RowSet { columns, rows, summary: self.summary })
    }

    fn materialize(&self, v: Val) -> Value {
        let g = self.g();
        match v {
            Val::Null => Value::Null,
            Val::Bool(b) => Value::Bool(b),
            Val::Int(i) => Value::Int(i),
            Val::Float(f) => Value::Float(f),
            Val::Text(s) => Value::Text(s),
            Val::List(items) => Value::List(items.into_iter().map(|v| self.materialize(v)).collect()),
            Val::Map(m) => Value::Map(m.into_iter().map(|(k, v)| (k, self.materialize(v))).collect()),
            Val::Node(id) => g.node(id).cloned().map_or(Value::Null, Value::Node),
            Val::Edge(id) => g.edge(id).cloned().map_or(Value::Null, Value::Edge),
            Val::Path { nodes, edges } => {
                let nodes: Option<Vec<_>> = nodes.iter().map(|&n| g.node(n).cloned()).collect();
                let edges: Option<Vec<_>> = edges.iter().map(|&e| g.edge(e).cloned()).collect();
                match (nodes, edges) {
                    (Some(nodes), Some(edges)) => Value::Path { nodes, edges },
                    _ => Value::Null,
                }
            }
        }
    }

    fn load_csv(&mut self, rows: Vec<Row>, url: &str, variable: &str, delimiter: &Option<String>) -> Result<Vec<Row>> {
        let path = procedures::resolve(url, self.ctx);
        let delim = delimiter.as_ref().map_or(b',', |d| d.as_bytes()[0]);
        let records = load_csv(&path, delim)?;
        let records: Vec<Val> = records
            .iter()
            .map(|r| Val::Map(r.iter().map(|(k, v)| (k.clone(), Val::from(v))).collect()))
            .collect();
        let mut out = Vec::with_capacity(rows.len() * records.len());
        for row in rows {
            for rec in &records {
                let mut r = row.clone();
                r.insert(variable.to_string(), rec.clone());
                out.push(r);
            }
        }
        Ok(out)
    }

    fn eval_props(&self, entries: &[(String, Expr)], row: &Row) -> Result<Properties> {
        let mut props = Properties::new();
        for (k, e) in entries {
            let v = to_property(self.eval(e, row, None)?)?;
            if !v.is_null() {
                props.insert(k.clone(), v);
            }
        }
        Ok(props)
    }

    fn create_node(&mut self, row: &mut Row, np: &NodePattern) -> Result<NodeId> {
        if let Some(var) = &np.variable {
            match row.get(var) {
                Some(Val::Node(id)) if self.g().contains_node(*id) => return Ok(*id),
                Some(Val::Node(id)) => return Err(QueryError::Graph(crate::graph::GraphError::UnknownNode(*id))),
                Some(other) => {
                    return Err(QueryError::TypeMismatch(format!("'{var}' is a {}, not a node", other.type_name())))
                }
                None => {}
            }
        }
        let props = self.eval_props(&np.properties, row)?;
        self.summary.properties_set += props.len() as u64;
        self.summary.nodes_created += 1;
        let id = self.g_mut().add_node(np.labels.iter().cloned(), props);
        if let Some(var) = &np.variable {
            row.insert(var.clone(), Val::Node(id));
        }
        Ok(id)
    }

    fn create_pattern(&mut self, row: &mut Row, p: &Pattern) -> Result<()> {
        let mut nodes = vec![self.create_node(row, &p.start)?];
        let mut edges = Vec::new();
        for (rel, np) in &p.steps {
            let prev = *nodes.last().expect("start node");
            let next = self.create_node(row, np)?;
            let props = self.eval_props(&rel.properties, row)?;
            let (source, target) = match rel.direction {
                RelDirection::Incoming => (next, prev),
                _ => (prev, next),
            };
            let rel_type = rel.rel_type.as_deref().expect("validated CREATE relationship type");
            let before = self.g().edge_count();
            self.summary.properties_set += props.len() as u64;
            let id = self.g_mut().add_edge(source, target, rel_type, props)?;
            if self.g().edge_count() > before {
                self.summary.relationships_created += 1;
            }
            if let Some(var) = &rel.variable {
                row.insert(var.clone(), Val::Edge(id));
            }
            nodes.push(next);
            edges.push(id);
        }
        if let Some(var) = &p.path_variable {
            row.insert(var.clone(), Val::Path { nodes, edges });
        }
        Ok(())
    }

    fn set_item(&mut self, row: &Row, item: &SetItem) -> Result<()> {
        let SetItem::Property { variable, key, value } = item;
        let v = to_property(self.eval(value, row, None)?)?;
        let target = match row.get(variable) {
            Some(Val::Node(id)) => ElementRef::Node(*id),
            Some(Val::Edge(id)) => ElementRef::Edge(*id),
            Some(Val::Null) | None => return Ok(()),
            Some(other) => {
                return Err(QueryError::TypeMismatch(format!("cannot set a property on a {}", other.type_name())))
            }
        };
        let mut updates = Properties::new();
        updates.insert(key.clone(), v);
        self.summary.properties_set += self.g_mut().set_properties(target, updates)? as u64;
        Ok(())
    }

    fn delete(&mut self, rows: &[Row], detach: bool, variables: &[String]) -> Result<()> {
        let mut nodes = BTreeSet::new();
        let mut edges = BTreeSet::new();
        for row in rows {
            for var in variables {
                match row.get(var) {
                    Some(Val::Node(id)) => {
                        nodes.insert(*id);
                    }
                    Some(Val::Edge(id)) => {
                        edges.insert(*id);
                    }
                    Some(Val::Path { nodes: ns, edges: es }) => {
                        nodes.extend(ns);
                        edges.extend(es);
                    }
                    Some(Val::Null) | None => {}
                    Some(other) => {
                        return Err(QueryError::TypeMismatch(format!("cannot delete a {}", other.type_name())))
                    }
                }
            }
        }
        for id in edges {
            if self.g().edge(id).is_some() {
                self.g_mut().remove_edge_by_id(id)?;
                self.summary.relationships_deleted += 1;
            }
        }
        for id in nodes {
            if self.g().contains_node(id) {
                let removed = self.g_mut().remove_node(id, detach)?;
                self.summary.relationships_deleted += removed as u64;
                self.summary.nodes_deleted += 1;
            }
        }
        Ok(())
    }

    fn call(&mut self, rows: Vec<Row>, procedure: &str, args: &[Expr], names: &[String]) -> Result<Vec<Row>> {
        let columns = procedures::columns(procedure).expect("validated procedure");
        let picks: Vec<usize> =
            names.iter().map(|n| columns.iter().position(|c| c == n).expect("validated yield")).collect();
        let mut out = Vec::new();
        for row in rows {
            let values = args.iter().map(|a| self.eval(a, &row, None)).collect::<Result<Vec<_>>>()?;
            for result in procedures::call(self.g(), procedure, values, self.ctx)? {
                let mut r = row.clone();
                for (name, &i) in names.iter().zip(&picks) {
                    r.insert(name.clone(), result[i].clone());
                }
                out.push(r);
            }
        }
        Ok(out)
    }

    // ---- matching ----

    fn match_clause(&self, rows: Vec<Row>, patterns: &[Pattern]) -> Result<Vec<Row>> {
        let mut out = Vec::new();
        for row in rows {
            let mut partials: Vec<Partial> = vec![(row, BTreeSet::new())];
            for p in patterns {
                let mut next = Vec::new();
                for (r, used) in &partials {
                    self.match_pattern(r, used, p, &mut next)?;
                }
                partials = next;
            }
            out.extend(partials.into_iter().map(|(r, _)| r));
        }
        Ok(out)
    }

    fn node_matches(&self, id: NodeId, np: &NodePattern, row: &Row) -> Result<bool> {
        let Some(node) = self.g().node(id) else { return Ok(false) };
        if !np.labels.iter().all(|l| node.has_label(l)) {
            return Ok(false);
        }
        for (k, e) in &np.properties {
            let want = self.eval(e, row, None)?;
            let have = node.get(k).map_or(Val::Null, Val::from);
            if equals(&have, &want) != Some(true) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn node_candidates(&self, np: &NodePattern, row: &Row) -> Result<Vec<NodeId>> {
        let g = self.g();
        let ids: Vec<NodeId> = match np.variable.as_ref().and_then(|v| row.get(v).map(|val| (v, val))) {
            Some((_, Val::Node(id))) => vec![*id],
            Some((_, Val::Null)) => return Ok(Vec::new()),
            Some((v, other)) => {
                return Err(QueryError::TypeMismatch(format!("'{v}' is a {}, not a node", other.type_name())))
            }
            None => {
                let mut indexed = None;
                // Index entries compare by stored type, so only text keys
                // take the index path.
                'outer: for label in &np.labels {
                    for (k, e) in &np.properties {
                        if g.has_index(label, k) {
                            if let Val::Text(s) = self.eval(e, row, None)? {
                                indexed = g.index_lookup(label, k, &PropertyValue::Text(s));
                                break 'outer;
                            }
                        }
                    }
                }
                match indexed {
                    Some(set) => set.into_iter().collect(),
                    None => g.node_ids(),
                }
            }
        };
        let mut out = Vec::with_capacity(ids.len());
        for id in ids {
            if self.node_matches(id, np, row)? {
                out.push(id);
            }
        }
        Ok(out)
    }

    /// Edges leaving `node` along `rel`, with the node at the far end,
    /// ordered by (far node, edge id).
    fn expand(&self, node: NodeId, direction: RelDirection) -> Result<Vec<(EdgeId, NodeId)>> {
        let g = self.g();
        let dir = match (g.is_directed(), direction) {
            (true, RelDirection::Outgoing) => Direction::Out,
            (true, RelDirection::Incoming) => Direction::In,
            _ => Direction::All,
        };
        let mut out: Vec<(EdgeId, NodeId)> = g
            .incident_edges(node, dir)?
            .into_iter()
            .map(|e| {
                let rec = g.edge(e).expect("incident edge exists");
                let far = match dir {
                    Direction::Out => rec.target,
                    Direction::In => rec.source,
                    Direction::All => rec.other(node),
                };
                (e, far)
            })
            .collect();
        out.sort_by_key(|&(e, n)| (n, e));
        Ok(out)
    }

    fn rel_matches(&self, edge: EdgeId, rel: &RelPattern, row: &Row) -> Result<bool> {
        let rec = self.g().edge(edge).expect("live edge");
        if rel.rel_type.as_ref().is_some_and(|t| *t != rec.rel_type) {
            return Ok(false);
        }
        for (k, e) in &rel.properties {
            let want = self.eval(e, row, None)?;
            let have = rec.get(k).map_or(Val::Null, Val::from);
            if equals(&have, &want) != Some(true) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn match_pattern(&self, row: &Row, used: &BTreeSet<EdgeId>, p: &Pattern, out: &mut Vec<Partial>) -> Result<()> {
        if p.shortest {
            return self.match_shortest(row, used, p, out);
        }
        for start in self.node_candidates(&p.start, row)? {
            let mut r = row.clone();
            bind(&mut r, &p.start.variable, Val::Node(start));
            let mut trail = (vec![start], Vec::new());
            self.extend(r, used.clone(), p, 0, &mut trail, out)?;
        }
        Ok(())
    }

    fn extend(
        &self,
        row: Row,
        used: BTreeSet<EdgeId>,
        p: &Pattern,
        step: usize,
        trail: &mut (Vec<NodeId>, Vec<EdgeId>),
        out: &mut Vec<Partial>,
    ) -> Result<()> {
        if step == p.steps.len() {
            let mut row = row;
            if let Some(var) = &p.path_variable {
                row.insert(var.clone(), Val::Path { nodes: trail.0.clone(), edges: trail.1.clone() });
            }
            out.push((row, used));
            return Ok(());
        }
        let (rel, np) = &p.steps[step];
        let here = *trail.0.last().expect("trail starts with a node");
        let bound_rel = rel.variable.as_ref().and_then(|v| row.get(v));
        let bound_node = np.variable.as_ref().and_then(|v| row.get(v));
        for (edge, far) in self.expand(here, rel.direction)? {
            if used.contains(&edge) {
                continue;
            }
            match bound_rel {
                Some(Val::Edge(e)) if *e != edge => continue,
                Some(Val::Edge(_)) | None => {}
                Some(_) => continue,
            }
            match bound_node {
                Some(Val::Node(n)) if *n != far => continue,
                Some(Val::Node(_)) | None => {}
                Some(_) => continue,
            }
            if !self.rel_matches(edge, rel, &row)? || !self.node_matches(far, np, &row)? {
                continue;
            }
            let mut r = row.clone();
            bind(&mut r, &rel.variable, Val::Edge(edge));
            bind(&mut r, &np.variable, Val::Node(far));
            let mut u = used.clone();
            u.insert(edge);
            trail.0.push(far);
            trail.1.push(edge);
            self.extend(r, u, p, step + 1, trail, out)?;
            trail.0.pop();
            trail.1.pop();
        }
        Ok(())
    }

    fn match_shortest(&self, row: &Row, used: &BTreeSet<EdgeId>, p: &Pattern, out: &mut Vec<Partial>) -> Result<()> {
        let (rel, end) = &p.steps[0];
        let filtered;
        let g = match &rel.rel_type {
            Some(t) => {
                let mut copy = self.g().clone();
                for e in self.g().edges().filter(|e| e.rel_type != *t) {
                    copy.remove_edge_by_id(e.id)?;
                }
                filtered = copy;
                &filtered
            }
            None => self.g(),
        };
        let direction = match rel.direction {
            RelDirection::Outgoing => Direction::Out,
            RelDirection::Incoming => Direction::In,
            RelDirection::Either => Direction::All,
        };
        for s in self.node_candidates(&p.start, row)? {
            for t in self.node_candidates(end, row)? {
                let nodes = match bfs_shortest_path(g, s, t, direction) {
                    Ok(nodes) => nodes,
                    Err(AlgoError::NoPath { .. }) => continue,
                    Err(e) => return Err(e.into()),
                };
                let edges = nodes
                    .windows(2)
                    .map(|w| connecting_edge(g, w[0], w[1], direction).expect("consecutive path nodes are adjacent"))
                    .collect();
                let mut r = row.clone();
                bind(&mut r, &p.start.variable, Val::Node(s));
                bind(&mut r, &end.variable, Val::Node(t));
                bind(&mut r, &p.path_variable, Val::Path { nodes, edges });
                out.push((r, used.clone()));
            }
        }
        Ok(())
    }

    // ---- projection ----

    /// Evaluates a RETURN or WITH projection: grouping when aggregates are
    /// present, then DISTINCT, ORDER BY and LIMIT.
    fn project(&self, rows: Vec<Row>, p: &Projection) -> Result<(Vec<String>, Vec<Vec<Val>>)> {
        let names: Vec<String> = p.items.iter().map(ReturnItem::name).collect();
        let mut agg_exprs: Vec<&Expr> = Vec::new();
        for e in p.items.iter().map(|i| &i.expr).chain(p.order.iter().map(|s| &s.expr)) {
            e.visit(&mut |x| {
                if functions::is_aggregate(x) {
                    agg_exprs.push(x);
                }
            });
        }
        let item_has_agg: Vec<bool> = p
            .items
            .iter()
            .map(|i| {
                let mut found = false;
                i.expr.visit(&mut |x| found |= functions::is_aggregate(x));
                found
            })
            .collect();
        let aggregating = item_has_agg.iter().any(|&b| b);

        let groups: Vec<Vec<usize>> = if aggregating {
            let mut index: BTreeMap<Vec<Val>, usize> = BTreeMap::new();
            let mut groups: Vec<Vec<usize>> = Vec::new();
            for (ri, row) in rows.iter().enumerate() {
                let mut key = Vec::new();
                for (item, &agg) in p.items.iter().zip(&item_has_agg) {
                    if !agg {
                        key.push(self.eval(&item.expr, row, None)?);
                    }
                }
                let gi = *index.entry(key).or_insert_with(|| {
                    groups.push(Vec::new());
                    groups.len() - 1
                });
                groups[gi].push(ri);
            }
            if groups.is_empty() && item_has_agg.iter().all(|&b| b) {
                groups.push(Vec::new());
            }
            groups
        } else {
            (0..rows.len()).map(|i| vec![i]).collect()
        };

        let empty = Row::new();
        let mut projected: Vec<(Vec<Val>, Vec<Val>)> = Vec::with_capacity(groups.len());
        for members in &groups {
            let group_rows: Vec<&Row> = members.iter().map(|&i| &rows[i]).collect();
            let mut aggs = AggMap::new();
            for e in &agg_exprs {
                aggs.insert(*e as *const Expr, self.aggregate(e, &group_rows)?);
            }
            let base = group_rows.first().copied().unwrap_or(&empty);
            let values =
                p.items.iter().map(|i| self.eval(&i.expr, base, Some(&aggs))).collect::<Result<Vec<_>>>()?;
            let mut context = base.clone();
            for (n, v) in names.iter().zip(&values) {
                context.insert(n.clone(), v.clone());
            }
            let keys = p.order.iter().map(|s| self.eval(&s.expr, &context, Some(&aggs))).collect::<Result<Vec<_>>>()?;
            projected.push((values, keys));
        }

        if p.distinct {
            let mut seen = BTreeSet::new();
            projected.retain(|(values, _)| seen.insert(values.clone()));
        }
        if !p.order.is_empty() {
            let mut failure = None;
            projected.sort_by(|(_, a), (_, b)| {
                for ((x, y), s) in a.iter().zip(b).zip(&p.order) {
                    match sort_cmp(x, y, s.descending) {
                        Ok(Ordering::Equal) => {}
                        Ok(o) => return o,
                        Err(e) => {
                            failure.get_or_insert(e);
                            return Ordering::Equal;
                        }
                    }
                }
                Ordering::Equal
            });
            if let Some(e) = failure {
                return Err(e);
            }
        }
        if let Some(limit) = p.limit {
            projected.truncate(limit.try_into().unwrap_or(usize::MAX));
        }
        Ok((names, projected.into_iter().map(|(v, _)| v).collect()))
    }

    fn aggregate(&self, e: &Expr, rows: &[&Row]) -> Result<Val> {
        let Expr::Function { name, distinct, args } = e else {
            return Ok(Val::Int(rows.len() as i64));
        };
        let mut values = Vec::with_capacity(rows.len());
        let mut seen = BTreeSet::new();
        for row in rows {
            let v = self.eval(&args[0], row, None)?;
            if matches!(v, Val::Null) || (*distinct && !seen.insert(v.clone())) {
                continue;
            }
            values.push(v);
        }
        Ok(if name.eq_ignore_ascii_case("count") { Val::Int(values.len() as i64) } else { Val::List(values) })
    }

    // ---- expressions ----

    fn eval(&self, e: &Expr, row: &Row, aggs: Option<&AggMap>) -> Result<Val> {
        if functions::is_aggregate(e) {
            return aggs
                .and_then(|m| m.get(&(e as *const Expr)))
                .cloned()
                .ok_or_else(|| QueryError::TypeMismatch(format!("aggregate {e} used outside a projection")));
        }
        Ok(match e {
            Expr::Literal(l) => match l {
                Literal::Null => Val::Null,
                Literal::Bool(b) => Val::Bool(*b),
                Literal::Int(i) => Val::Int(*i),
                Literal::Float(f) => Val::Float(*f),
                Literal::Text(s) => Val::Text(s.clone()),
            },
            Expr::Parameter(name) => {
                self.params.get(name).map(Val::from).ok_or_else(|| QueryError::MissingParameter(name.clone()))?
            }
            Expr::Variable(name) => row.get(name).cloned().unwrap_or(Val::Null),
            Expr::Property(base, key) => match self.eval(base, row, aggs)? {
                Val::Node(id) => self.g().node(id).and_then(|n| n.get(key)).map_or(Val::Null, Val::from),
                Val::Edge(id) => self.g().edge(id).and_then(|r| r.get(key)).map_or(Val::Null, Val::from),
                Val::Map(m) => m.get(key).cloned().unwrap_or(Val::Null),
                Val::Null => Val::Null,
                other => {
                    return Err(QueryError::TypeMismatch(format!("cannot read property '{key}' of a {}", other.type_name())))
                }
            },
            Expr::List(items) => Val::List(items.iter().map(|i| self.eval(i, row, aggs)).collect::<Result<_>>()?),
            Expr::Map(entries) => Val::Map(
                entries.iter().map(|(k, v)| Ok((k.clone(), self.eval(v, row, aggs)?))).collect::<Result<_>>()?,
            ),
            Expr::Function { name, args, .. } => {
                let arg = self.eval(&args[0], row, aggs)?;
                self.scalar(name, arg)?
            }
            Expr::CountStar => unreachable!("handled as an aggregate"),
            Expr::Not(inner) => Val::Bool(!truthy(&self.eval(inner, row, aggs)?)?),
            Expr::Binary { op, lhs, rhs } => self.binary(*op, lhs, rhs, row, aggs)?,
            Expr::IsNull { expr, negated } => Val::Bool(matches!(self.eval(expr, row, aggs)?, Val::Null) != *negated),
            Expr::PatternPredicate(p) => {
                let mut found = Vec::new();
                self.match_pattern(row, &BTreeSet::new(), p, &mut found)?;
                Val::Bool(!found.is_empty())
            }
        })
    }

    fn binary(&self, op: BinaryOp, lhs: &Expr, rhs: &Expr, row: &Row, aggs: Option<&AggMap>) -> Result<Val> {
        let l = self.eval(lhs, row, aggs)?;
        match op {
            BinaryOp::And if !truthy(&l)? => return Ok(Val::Bool(false)),
            BinaryOp::Or if truthy(&l)? => return Ok(Val::Bool(true)),
            _ => {}
        }
        let r = self.eval(rhs, row, aggs)?;
        Ok(Val::Bool(match op {
            BinaryOp::And | BinaryOp::Or => truthy(&r)?,
            BinaryOp::Xor => truthy(&l)? != truthy(&r)?,
            BinaryOp::Eq => equals(&l, &r) == Some(true),
            BinaryOp::Ne => equals(&l, &r) == Some(false),
            BinaryOp::Lt => compare(&l, &r) == Some(Ordering::Less),
            BinaryOp::Gt => compare(&l, &r) == Some(Ordering::Greater),
            BinaryOp::Le => matches!(compare(&l, &r), Some(Ordering::Less | Ordering::Equal)),
            BinaryOp::Ge => matches!(compare(&l, &r), Some(Ordering::Greater | Ordering::Equal)),
            BinaryOp::In => match r {
                Val::List(items) => items.iter().any(|x| equals(&l, x) == Some(true)),
                Val::Null => false,
                other => return Err(QueryError::TypeMismatch(format!("IN needs a list, got {}", other.type_name()))),
            },
            BinaryOp::Add => {
                return match (l, r) {
                    (Val::List(mut a), Val::List(b)) => {
                        a.extend(b);
                        Ok(Val::List(a))
                    }
                    (a, b) => Err(QueryError::TypeMismatch(format!(
                        "'+' concatenates lists, got {} and {}",
                        a.type_name(),
                        b.type_name()
                    ))),
                }
            }
        }))
    }

    fn scalar(&self, name: &str, arg: Val) -> Result<Val> {
        let g = self.g();
        Ok(match (name.to_ascii_lowercase().as_str(), arg) {
            (_, Val::Null) => Val::Null,
            ("tointeger", Val::Int(i)) => Val::Int(i),
            ("tointeger", Val::Float(f)) => float_to_int(f),
            ("tointeger", Val::Text(s)) => {
                let s = s.trim();
                match s.parse::<i64>() {
                    Ok(i) => Val::Int(i),
                    Err(_) => s.parse::<f64>().map_or(Val::Null, float_to_int),
                }
            }
            ("tofloat", Val::Int(i)) => Val::Float(i as f64),
            ("tofloat", Val::Float(f)) => Val::Float(f),
            ("tofloat", Val::Text(s)) => match s.trim().parse::<f64>() {
                Ok(f) if f.is_finite() => Val::Float(f),
                _ => Val::Null,
            },
            ("tostring", v @ (Val::Bool(_) | Val::Int(_) | Val::Float(_) | Val::Text(_))) => {
                Val::Text(to_property(v)?.to_string())
            }
            ("id", Val::Node(id) | Val::Edge(id)) => Val::Int(id as i64),
            ("labels", Val::Node(id)) => Val::List(
                g.node(id).map(|n| n.labels.iter().map(|l| Val::Text(l.clone())).collect()).unwrap_or_default(),
            ),
            ("type", Val::Edge(id)) => g.edge(id).map_or(Val::Null, |e| Val::Text(e.rel_type.clone())),
            ("size", Val::List(items)) => Val::Int(items.len() as i64),
            ("size", Val::Text(s)) => Val::Int(s.chars().count() as i64),
            ("gds.util.asnode", Val::Int(i)) => {
                if i >= 0 && g.contains_node(i as NodeId) {
                    Val::Node(i as NodeId)
                } else {
                    Val::Null
                }
            }
            ("gds.util.asnode", Val::Node(id)) => Val::Node(id),
            ("tointeger" | "tofloat" | "tostring", _) => Val::Null,
            (_, other) => {
                return Err(QueryError::TypeMismatch(format!("{name} does not accept a {}", other.type_name())))
            }
        })
    }
}

fn float_to_int(f: f64) -> Val {
    let t = f.trunc();
    if t.is_finite() && t >= i64::MIN as f64 && t < i64::MAX as f64 {
        Val::Int(t as i64)
    } else {
        Val::Null
    }
}

fn bind(row: &mut Row, var: &Option<String>, v: Val) {
    if let Some(name) = var {
        row.insert(name.clone(), v);
    }
}

/// Smallest edge id joining `a` to `b` in the direction walked.
fn connecting_edge(g: &PropertyGraph, a: NodeId, b: NodeId, direction: Direction) -> Option<EdgeId> {
    g.incident_edges(a, direction).ok()?.into_iter().find(|&e| {
        let rec = g.edge(e).expect("incident edge exists");
        match (g.is_directed(), direction) {
            (true, Direction::Out) => rec.target == b,
            (true, Direction::In) => rec.source == b,
            _ => rec.other(a) == b,
        }
    })
}
