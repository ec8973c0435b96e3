//! Shared engine: one graph behind a reader/writer lease.
//!
//! Any number of read statements run concurrently; a writing statement holds
//! the exclusive lease for its whole execution. Writes apply atomically (see
//! [`query::execute`]), so a failed or abandoned statement leaves nothing
//! behind.

use std::sync::Arc;

use parking_lot::RwLock;

use crate::graph::PropertyGraph;
use crate::query::{self, ExecContext, Params, Result, RowSet, Statement};

#[derive(Debug, Clone)]
pub struct Engine {
    graph: Arc<RwLock<PropertyGraph>>,
    ctx: Arc<ExecContext>,
}

impl Engine {
    pub fn new(graph: PropertyGraph, ctx: ExecContext) -> Engine {
        Engine { graph: Arc::new(RwLock::new(graph)), ctx: Arc::new(ctx) }
    }

    pub fn context(&self) -> &ExecContext {
        &self.ctx
    }

    /// Parses and executes under the lease the statement needs.
    pub fn run(&self, text: &str, params: &Params) -> Result<RowSet> {
        let stmt = query::parse(text)?;
        self.execute(&stmt, params)
    }

    pub fn execute(&self, stmt: &Statement, params: &Params) -> Result<RowSet> {
        if stmt.writes() {
            let mut g = self.graph.write();
            query::execute(&mut g, stmt, params, &self.ctx)
        } else {
            let g = self.graph.read();
            query::execute_read(&g, stmt, params, &self.ctx)
        }
    }

    /// Runs `f` under the shared lease.
    pub fn read<T>(&self, f: impl FnOnce(&PropertyGraph) -> T) -> T {
        f(&self.graph.read())
    }

    /// Runs `f` under the exclusive lease.
    pub fn write<T>(&self, f: impl FnOnce(&mut PropertyGraph) -> T) -> T {
        f(&mut self.graph.write())
    }

    /// A copy of the current graph.
    pub fn snapshot(&self) -> PropertyGraph {
        self.graph.read().clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_and_writes() {
        let e = Engine::new(PropertyGraph::directed(), ExecContext::default());
        let rs = e.run("CREATE (:P {n: 1}), (:P {n: 2})", &Params::new()).unwrap();
        assert_eq!(rs.summary.nodes_created, 2);
        let rs = e.run("MATCH (p:P) RETURN count(*) AS c", &Params::new()).unwrap();
        assert_eq!(rs.rows, vec![vec![query::Value::Int(2)]]);
        assert!(e.run("MATCH (p:P) SET p.n = 1 + [1]", &Params::new()).is_err());
        assert_eq!(e.read(|g| g.node_count()), 2);
    }

    #[test]
    fn concurrent_writers_serialize() {
        let e = Engine::new(PropertyGraph::directed(), ExecContext::default());
        std::thread::scope(|s| {
            for t in 0..4 {
                let e = e.clone();
                s.spawn(move || {
                    for i in 0..25 {
                        e.run(&format!("CREATE (:N {{t: {t}, i: {i}}})"), &Params::new()).unwrap();
                        e.run("MATCH (n:N) RETURN count(*) AS c", &Params::new()).unwrap();
                    }
                });
            }
        });
        assert_eq!(e.snapshot().node_count(), 100);
    }
}
