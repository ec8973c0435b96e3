//! Procedures reachable through `CALL`. The graph-name argument of the
//! `gds.*` family is accepted and ignored: there is one graph per engine.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use crate::algorithms::{
    betweenness_centrality, closeness_centrality, degree_centrality, dijkstra, eigenvector_centrality, louvain,
    pagerank, weakly_connected_components, AlgoError, CentralityScores, Mode, PageRankConfig, Partition, WeightSpec,
};
use crate::graph::{GraphKind, NodeId, PropertyGraph};
use crate::io::{export_csv_all, CsvOptions};

use super::exec::Val;
use super::{ExecContext, QueryError, Result};

const PROJECTION_KEYS: &[&str] = &["nodeProjection", "relationshipProjection"];

/// Declared output columns, or `None` for an unknown procedure.
pub fn columns(name: &str) -> Option<&'static [&'static str]> {
    Some(match name {
        "gds.pageRank.stream" => &["nodeId", "score"],
        "gds.louvain.stream" => &["nodeId", "communityId"],
        "gds.wcc.stream" => &["nodeId", "componentId"],
        "gds.shortestPath.dijkstra.stream" => &["nodeId", "cost"],
        "gds.degree.stream" | "gds.closeness.stream" | "gds.betweenness.stream" | "gds.eigenvector.stream" => {
            &["nodeId", "score"]
        }
        "apoc.export.csv.all" => &["file", "nodes", "relationships"],
        _ => return None,
    })
}

/// Runs `name`, returning rows in the order of [`columns`].
pub fn call(g: &PropertyGraph, name: &str, args: Vec<Val>, ctx: &ExecContext) -> Result<Vec<Vec<Val>>> {
    if name == "apoc.export.csv.all" {
        return export(g, args, ctx);
    }
    let config = Config::from_args(name, args)?;
    match name {
        "gds.pageRank.stream" => {
            config.allow(&["dampingFactor", "maxIterations", "tolerance", "relationshipWeightProperty"])?;
            let defaults = PageRankConfig::default();
            let cfg = PageRankConfig {
                damping: config.float("dampingFactor")?.unwrap_or(defaults.damping),
                weights: config.text("relationshipWeightProperty")?.map(WeightSpec::key),
                max_iter: config.count("maxIterations")?.unwrap_or(defaults.max_iter),
                tol: config.float("tolerance")?.unwrap_or(defaults.tol),
            };
            Ok(score_rows(pagerank(&config.project(g)?, &cfg)?))
        }
        "gds.louvain.stream" => {
            config.allow(&["relationshipWeightProperty"])?;
            let weights = config.weights()?;
            let projected = undirected(&config.project(g)?);
            let partition = if projected.edge_count() == 0 {
                Partition::from_labels(projected.node_ids().into_iter().map(|n| (n, n)))
            } else {
                louvain(&projected, &weights)?.partition
            };
            Ok(partition_rows(&partition))
        }
        "gds.wcc.stream" => {
            config.allow(&[])?;
            Ok(partition_rows(&weakly_connected_components(&config.project(g)?)?))
        }
        "gds.degree.stream" => {
            config.allow(&[])?;
            Ok(score_rows(degree_centrality(&config.project(g)?, Mode::Raw)?))
        }
        "gds.closeness.stream" => {
            config.allow(&[])?;
            Ok(score_rows(closeness_centrality(&config.project(g)?, Mode::Normalized)?))
        }
        "gds.betweenness.stream" => {
            config.allow(&[])?;
            Ok(score_rows(betweenness_centrality(&config.project(g)?, Mode::Raw)?))
        }
        "gds.eigenvector.stream" => {
            config.allow(&["maxIterations", "tolerance"])?;
            let max_iter = config.count("maxIterations")?.unwrap_or(1000);
            let tol = config.float("tolerance")?.unwrap_or(1e-9);
            Ok(score_rows(eigenvector_centrality(&config.project(g)?, max_iter, tol)?))
        }
        "gds.shortestPath.dijkstra.stream" => {
            config.allow(&["sourceNode", "targetNode", "relationshipWeightProperty"])?;
            let source = config.node("sourceNode")?;
            let target = config.node("targetNode")?;
            match dijkstra(&config.project(g)?, source, target, &config.weights()?) {
                Ok(path) => Ok(path
                    .nodes
                    .iter()
                    .zip(&path.cumulative)
                    .map(|(&n, &c)| vec![Val::Int(n as i64), Val::Float(c)])
                    .collect()),
                Err(AlgoError::NoPath { .. }) => Ok(Vec::new()),
                Err(e) => Err(e.into()),
            }
        }
        _ => Err(QueryError::UnknownProcedure { name: name.to_string(), offset: None }),
    }
}

fn bad(message: impl Into<String>) -> QueryError {
    QueryError::BadArguments(message.into())
}

fn score_rows(scores: CentralityScores) -> Vec<Vec<Val>> {
    scores.into_iter().map(|(n, s)| vec![Val::Int(n as i64), Val::Float(s)]).collect()
}

fn partition_rows(p: &Partition) -> Vec<Vec<Val>> {
    p.assignment().iter().map(|(&n, &c)| vec![Val::Int(n as i64), Val::Int(c as i64)]).collect()
}

/// Undirected copy keeping every edge: each edge gets a type unique to it
/// so antiparallel pairs do not merge.
fn undirected(g: &PropertyGraph) -> PropertyGraph {
    if !g.is_directed() {
        return g.clone();
    }
    let mut out = PropertyGraph::new(GraphKind::Undirected);
    for n in g.nodes() {
        out.insert_node(n.id, n.labels.clone(), n.properties.clone()).expect("fresh id");
    }
    for e in g.edges() {
        out.insert_edge(e.id, e.source, e.target, &format!("{}#{}", e.rel_type, e.id), e.properties.clone())
            .expect("unique type per edge");
    }
    out
}

struct Config {
    procedure: String,
    entries: BTreeMap<String, Val>,
}

impl Config {
    /// Accepts `()`, `(graphName)`, `(config)` or `(graphName, config)`.
    fn from_args(procedure: &str, args: Vec<Val>) -> Result<Config> {
        let map = match args.as_slice() {
            [] | [Val::Text(_)] => BTreeMap::new(),
            [Val::Map(m)] | [Val::Text(_), Val::Map(m)] => m.clone(),
            _ => return Err(bad(format!("{procedure} takes an optional graph name and an optional config map"))),
        };
        Ok(Config { procedure: procedure.to_string(), entries: map })
    }

    fn allow(&self, keys: &[&str]) -> Result<()> {
        for k in self.entries.keys() {
            if !keys.contains(&k.as_str()) && !PROJECTION_KEYS.contains(&k.as_str()) {
                return Err(bad(format!("{} does not accept config key '{k}'", self.procedure)));
            }
        }
        Ok(())
    }

    fn get(&self, key: &str) -> Option<&Val> {
        self.entries.get(key).filter(|v| !matches!(v, Val::Null))
    }

    fn float(&self, key: &str) -> Result<Option<f64>> {
        match self.get(key) {
            None => Ok(None),
            Some(Val::Int(i)) => Ok(Some(*i as f64)),
            Some(Val::Float(f)) => Ok(Some(*f)),
            Some(_) => Err(bad(format!("{key} must be a number"))),
        }
    }

    fn count(&self, key: &str) -> Result<Option<usize>> {
        match self.get(key) {
            None => Ok(None),
            Some(Val::Int(i)) if *i >= 0 => Ok(Some(*i as usize)),
            Some(_) => Err(bad(format!("{key} must be a non-negative integer"))),
        }
    }

    fn text(&self, key: &str) -> Result<Option<String>> {
        match self.get(key) {
            None => Ok(None),
            Some(Val::Text(s)) => Ok(Some(s.clone())),
            Some(_) => Err(bad(format!("{key} must be a string"))),
        }
    }

    fn weights(&self) -> Result<WeightSpec> {
        Ok(self.text("relationshipWeightProperty")?.map_or_else(WeightSpec::unweighted, WeightSpec::key))
    }

    fn node(&self, key: &str) -> Result<NodeId> {
        match self.get(key) {
            Some(Val::Node(id)) => Ok(*id),
            Some(Val::Int(i)) if *i >= 0 => Ok(*i as NodeId),
            _ => Err(bad(format!("{} needs {key} as a node or node id", self.procedure))),
        }
    }

    /// Names listed by a projection entry; `None` means everything.
    fn names(&self, key: &str) -> Result<Option<BTreeSet<String>>> {
        match self.get(key) {
            None => Ok(None),
            Some(Val::Text(s)) if s == "*" => Ok(None),
            Some(Val::Text(s)) => Ok(Some(BTreeSet::from([s.clone()]))),
            Some(Val::List(items)) => items
                .iter()
                .map(|v| match v {
                    Val::Text(s) => Ok(s.clone()),
                    _ => Err(bad(format!("{key} must list strings"))),
                })
                .collect::<Result<_>>()
                .map(Some),
            Some(_) => Err(bad(format!("{key} must be a string or a list of strings"))),
        }
    }

    /// The subgraph selected by `nodeProjection` labels and
    /// `relationshipProjection` types, ids preserved.
    fn project(&self, g: &PropertyGraph) -> Result<PropertyGraph> {
        let labels = self.names("nodeProjection")?;
        let types = self.names("relationshipProjection")?;
        if labels.is_none() && types.is_none() {
            return Ok(g.clone());
        }
        let mut out = PropertyGraph::new(g.kind());
        for n in g.nodes() {
            if labels.as_ref().is_none_or(|ls| n.labels.iter().any(|l| ls.contains(l))) {
                out.insert_node(n.id, n.labels.clone(), n.properties.clone())?;
            }
        }
        for e in g.edges() {
            let typed = types.as_ref().is_none_or(|ts| ts.contains(&e.rel_type));
            if typed && out.contains_node(e.source) && out.contains_node(e.target) {
                out.insert_edge(e.id, e.source, e.target, &e.rel_type, e.properties.clone())?;
            }
        }
        Ok(out)
    }
}

fn export(g: &PropertyGraph, args: Vec<Val>, ctx: &ExecContext) -> Result<Vec<Vec<Val>>> {
    let (file, config) = match args.as_slice() {
        [Val::Text(f)] => (f.clone(), BTreeMap::new()),
        [Val::Text(f), Val::Map(m)] => (f.clone(), m.clone()),
        _ => return Err(bad("apoc.export.csv.all takes a file name and an optional config map")),
    };
    let mut options = CsvOptions::default();
    for (k, v) in &config {
        match (k.as_str(), v) {
            ("useTypes", Val::Bool(b)) => options.use_types = *b,
            ("delimiter", Val::Text(d)) if d.len() == 1 => options.delimiter = d.as_bytes()[0],
            ("useTypes" | "delimiter", _) => return Err(bad(format!("bad value for {k}"))),
            _ => return Err(bad(format!("apoc.export.csv.all does not accept config key '{k}'"))),
        }
    }
    let path = resolve(&file, ctx);
    let counts = export_csv_all(g, &path, &options)?;
    Ok(vec![vec![Val::Text(file), Val::Int(counts.nodes as i64), Val::Int(counts.edges as i64)]])
}

/// `file:///x` and relative paths resolve under the import directory when
/// one is configured; absolute paths are taken as given.
pub fn resolve(url: &str, ctx: &ExecContext) -> PathBuf {
    let (relative, path) = match url.strip_prefix("file://") {
        Some(rest) => (true, PathBuf::from(rest.trim_start_matches('/'))),
        None => (!std::path::Path::new(url).is_absolute(), PathBuf::from(url)),
    };
    match (&ctx.import_dir, relative) {
        (Some(dir), true) => dir.join(path),
        _ => path,
    }
}
