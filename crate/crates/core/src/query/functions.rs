//! Function catalogue. Names match case-insensitively.

use super::ast::Expr;

#[derive(Debug, Clone, Copy)]
pub struct FunctionSpec {
    pub name: &'static str,
    pub arity: usize,
    pub aggregate: bool,
}

impl FunctionSpec {
    pub fn is_count(&self) -> bool {
        self.name == "count"
    }
}

const FUNCTIONS: &[FunctionSpec] = &[
    FunctionSpec { name: "count", arity: 1, aggregate: true },
    FunctionSpec { name: "collect", arity: 1, aggregate: true },
    FunctionSpec { name: "tointeger", arity: 1, aggregate: false },
    FunctionSpec { name: "tofloat", arity: 1, aggregate: false },
    FunctionSpec { name: "tostring", arity: 1, aggregate: false },
    FunctionSpec { name: "id", arity: 1, aggregate: false },
    FunctionSpec { name: "labels", arity: 1, aggregate: false },
    FunctionSpec { name: "type", arity: 1, aggregate: false },
    FunctionSpec { name: "size", arity: 1, aggregate: false },
    FunctionSpec { name: "gds.util.asnode", arity: 1, aggregate: false },
];

pub fn lookup(name: &str) -> Option<FunctionSpec> {
    let lower = name.to_ascii_lowercase();
    FUNCTIONS.iter().find(|f| f.name == lower).copied()
}

/// True for `count(*)` and calls to aggregate functions.
pub fn is_aggregate(e: &Expr) -> bool {
    match e {
        Expr::CountStar => true,
        Expr::Function { name, .. } => lookup(name).is_some_and(|f| f.aggregate),
        _ => false,
    }
}
