//! Embedded property-graph engine.
//!
//! The store ([`graph::PropertyGraph`]) holds labeled nodes and typed edges
//! with property maps. On top of it sit set operations and filters
//! ([`ops`]), graph algorithms ([`algorithms`]), coordinate layouts
//! ([`layout`]), a Cypher-style query language ([`query`]), CSV and JSON
//! interchange ([`io`]), a lease-guarded shared engine ([`engine`]) and a
//! line-delimited JSON network server ([`server`]).

pub mod algorithms;
pub mod engine;
pub mod graph;
pub mod io;
pub mod layout;
pub mod ops;
pub mod query;
pub mod server;
pub mod value;

pub use graph::{Direction, EdgeId, EdgeRecord, ElementRef, GraphError, GraphKind, NodeId, NodeRecord, PropertyGraph};
pub use value::{props, Properties, PropertyValue};
