//! Abstract syntax of one statement, and a printer whose output parses back
//! to the same tree.

use std::fmt::{self, Display, Formatter, Write};

use crate::value::format_float;

use super::lexer::{format_ident, quote};

#[derive(Debug, Clone, PartialEq)]
pub struct Statement {
    pub clauses: Vec<Clause>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Clause {
    LoadCsv { url: String, variable: String, delimiter: Option<String> },
    Create(Vec<Pattern>),
    CreateIndex { variable: String, label: String, key: String },
    Match(Vec<Pattern>),
    Where(Expr),
    With(Projection),
    Unwind { expr: Expr, variable: String },
    Set(Vec<SetItem>),
    Delete { detach: bool, variables: Vec<String> },
    Return(Projection),
    Call { procedure: String, args: Vec<Expr>, yields: Option<Vec<String>> },
}

impl Clause {
    /// Whether executing this clause can change the store.
    pub fn writes(&self) -> bool {
        matches!(
            self,
            Clause::LoadCsv { .. } | Clause::Create(_) | Clause::CreateIndex { .. } | Clause::Set(_) | Clause::Delete { .. }
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub distinct: bool,
    pub items: Vec<ReturnItem>,
    pub order: Vec<SortItem>,
    pub limit: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReturnItem {
    pub expr: Expr,
    pub alias: Option<String>,
}

impl ReturnItem {
    /// Output column name: the alias, or the printed expression.
    pub fn name(&self) -> String {
        self.alias.clone().unwrap_or_else(|| self.expr.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SortItem {
    pub expr: Expr,
    pub descending: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SetItem {
    Property { variable: String, key: String, value: Expr },
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodePattern {
    pub variable: Option<String>,
    pub labels: Vec<String>,
    pub properties: Vec<(String, Expr)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelDirection {
    /// `-[]->`
    Outgoing,
    /// `<-[]-`
    Incoming,
    /// `-[]-`
    Either,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelPattern {
    pub variable: Option<String>,
    pub rel_type: Option<String>,
    pub properties: Vec<(String, Expr)>,
    pub direction: RelDirection,
    /// `*`: any number of hops. Only meaningful inside `shortestPath`.
    pub var_length: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pattern {
    /// `p = ...`
    pub path_variable: Option<String>,
    pub shortest: bool,
    pub start: NodePattern,
    pub steps: Vec<(RelPattern, NodePattern)>,
}

impl Pattern {
    /// Every variable the pattern names, in order of appearance.
    pub fn variables(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self.path_variable.iter().map(String::as_str).collect();
        out.extend(self.start.variable.as_deref());
        for (rel, node) in &self.steps {
            out.extend(rel.variable.as_deref());
            out.extend(node.variable.as_deref());
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Null,
    Bool(bool),
    Int(i64),
    Float(f64),
    Text(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Or,
    Xor,
    And,
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
    In,
    Add,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Or => "OR",
            BinaryOp::Xor => "XOR",
            BinaryOp::And => "AND",
            BinaryOp::Eq => "=",
            BinaryOp::Ne => "<>",
            BinaryOp::Lt => "<",
            BinaryOp::Gt => ">",
            BinaryOp::Le => "<=",
            BinaryOp::Ge => ">=",
            BinaryOp::In => "IN",
            BinaryOp::Add => "+",
        }
    }

    pub(crate) fn precedence(self) -> u8 {
        match self {
            BinaryOp::Or => 1,
            BinaryOp::Xor => 2,
            BinaryOp::And => 3,
            BinaryOp::Eq | BinaryOp::Ne | BinaryOp::Lt | BinaryOp::Gt | BinaryOp::Le | BinaryOp::Ge | BinaryOp::In => 5,
            BinaryOp::Add => 6,
        }
    }
}

const NOT_PRECEDENCE: u8 = 4;
const COMPARISON_PRECEDENCE: u8 = 5;
const ATOM_PRECEDENCE: u8 = 10;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Literal(Literal),
    Parameter(String),
    Variable(String),
    Property(Box<Expr>, String),
    List(Vec<Expr>),
    Map(Vec<(String, Expr)>),
    /// Function call; `name` keeps its written case and dots.
    Function { name: String, distinct: bool, args: Vec<Expr> },
    CountStar,
    Not(Box<Expr>),
    Binary { op: BinaryOp, lhs: Box<Expr>, rhs: Box<Expr> },
    IsNull { expr: Box<Expr>, negated: bool },
    /// A relationship pattern used as a boolean condition.
    PatternPredicate(Box<Pattern>),
}

impl Expr {
    pub fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary { op, .. } => op.precedence(),
            Expr::Not(_) => NOT_PRECEDENCE,
            Expr::IsNull { .. } => COMPARISON_PRECEDENCE,
            _ => ATOM_PRECEDENCE,
        }
    }

    /// Calls `f` on this expression and every subexpression, outermost
    /// first. Does not descend into pattern predicates.
    pub fn visit<'a>(&'a self, f: &mut dyn FnMut(&'a Expr)) {
        f(self);
        match self {
            Expr::Property(e, _) | Expr::Not(e) | Expr::IsNull { expr: e, .. } => e.visit(f),
            Expr::List(items) | Expr::Function { args: items, .. } => items.iter().for_each(|e| e.visit(f)),
            Expr::Map(entries) => entries.iter().for_each(|(_, e)| e.visit(f)),
            Expr::Binary { lhs, rhs, .. } => {
                lhs.visit(f);
                rhs.visit(f);
            }
            Expr::Literal(_) | Expr::Parameter(_) | Expr::Variable(_) | Expr::CountStar | Expr::PatternPredicate(_) => {}
        }
    }
}

impl Display for Literal {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Null => f.write_str("null"),
            Literal::Bool(b) => write!(f, "{b}"),
            Literal::Int(i) => write!(f, "{i}"),
            Literal::Float(x) => f.write_str(&format_float(*x)),
            Literal::Text(s) => f.write_str(&quote(s)),
        }
    }
}

fn write_map(f: &mut Formatter<'_>, entries: &[(String, Expr)]) -> fmt::Result {
    f.write_char('{')?;
    for (i, (k, v)) in entries.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{}: {v}", format_ident(k))?;
    }
    f.write_char('}')
}

fn write_list<T: Display>(f: &mut Formatter<'_>, items: &[T]) -> fmt::Result {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{item}")?;
    }
    Ok(())
}

/// Writes `e`, parenthesized when it binds looser than `min`.
fn write_operand(f: &mut Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if e.precedence() < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl Display for Expr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Literal(l) => write!(f, "{l}"),
            Expr::Parameter(p) => write!(f, "${p}"),
            Expr::Variable(v) => f.write_str(&format_ident(v)),
            Expr::Property(e, key) => {
                write_operand(f, e, ATOM_PRECEDENCE)?;
                write!(f, ".{}", format_ident(key))
            }
            Expr::List(items) => {
                f.write_char('[')?;
                write_list(f, items)?;
                f.write_char(']')
            }
            Expr::Map(entries) => write_map(f, entries),
            Expr::Function { name, distinct, args } => {
                let name: Vec<String> = name.split('.').map(format_ident).collect();
                write!(f, "{}(", name.join("."))?;
                if *distinct {
                    f.write_str("DISTINCT ")?;
                }
                write_list(f, args)?;
                f.write_char(')')
            }
            Expr::CountStar => f.write_str("count(*)"),
            Expr::Not(e) => {
                f.write_str("NOT ")?;
                write_operand(f, e, NOT_PRECEDENCE)
            }
            Expr::Binary { op, lhs, rhs } => {
                let p = op.precedence();
                // Comparisons do not chain, so an equal-precedence operand on
                // either side needs parentheses; the others are left
                // associative.
                let (left_min, right_min) = if p == COMPARISON_PRECEDENCE { (p + 1, p + 1) } else { (p, p + 1) };
                write_operand(f, lhs, left_min)?;
                write!(f, " {} ", op.symbol())?;
                write_operand(f, rhs, right_min)
            }
            Expr::IsNull { expr, negated } => {
                write_operand(f, expr, COMPARISON_PRECEDENCE + 1)?;
                f.write_str(if *negated { " IS NOT NULL" } else { " IS NULL" })
            }
            Expr::PatternPredicate(p) => write!(f, "{p}"),
        }
    }
}

impl Display for NodePattern {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_char('(')?;
        if let Some(v) = &self.variable {
            f.write_str(&format_ident(v))?;
        }
        for l in &self.labels {
            write!(f, ":{}", format_ident(l))?;
        }
        if !self.properties.is_empty() {
            if self.variable.is_some() || !self.labels.is_empty() {
                f.write_char(' ')?;
            }
            write_map(f, &self.properties)?;
        }
        f.write_char(')')
    }
}

impl Display for RelPattern {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_str(if self.direction == RelDirection::Incoming { "<-[" } else { "-[" })?;
        if let Some(v) = &self.variable {
            f.write_str(&format_ident(v))?;
        }
        if let Some(t) = &self.rel_type {
            write!(f, ":{}", format_ident(t))?;
        }
        if self.var_length {
            f.write_char('*')?;
        }
        if !self.properties.is_empty() {
            f.write_char(' ')?;
            write_map(f, &self.properties)?;
        }
        f.write_str(if self.direction == RelDirection::Outgoing { "]->" } else { "]-" })
    }
}

impl Display for Pattern {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if let Some(p) = &self.path_variable {
            write!(f, "{} = ", format_ident(p))?;
        }
        if self.shortest {
            f.write_str("shortestPath(")?;
        }
        write!(f, "{}", self.start)?;
        for (rel, node) in &self.steps {
            write!(f, "{rel}{node}")?;
        }
        if self.shortest {
            f.write_char(')')?;
        }
        Ok(())
    }
}

impl Display for ReturnItem {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.expr)?;
        if let Some(a) = &self.alias {
            write!(f, " AS {}", format_ident(a))?;
        }
        Ok(())
    }
}

impl Display for SortItem {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.expr, if self.descending { " DESC" } else { "" })
    }
}

impl Display for Projection {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if self.distinct {
            f.write_str("DISTINCT ")?;
        }
        write_list(f, &self.items)?;
        if !self.order.is_empty() {
            f.write_str(" ORDER BY ")?;
            write_list(f, &self.order)?;
        }
        if let Some(n) = self.limit {
            write!(f, " LIMIT {n}")?;
        }
        Ok(())
    }
}

impl Display for SetItem {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            SetItem::Property { variable, key, value } => {
                write!(f, "{}.{} = {value}", format_ident(variable), format_ident(key))
            }
        }
    }
}

impl Display for Clause {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Clause::LoadCsv { url, variable, delimiter } => {
                write!(f, "LOAD CSV WITH HEADERS FROM {} AS {}", quote(url), format_ident(variable))?;
                if let Some(d) = delimiter {
                    write!(f, " FIELDTERMINATOR {}", quote(d))?;
                }
                Ok(())
            }
            Clause::Create(patterns) => {
                f.write_str("CREATE ")?;
                write_list(f, patterns)
            }
            Clause::CreateIndex { variable, label, key } => {
                let v = format_ident(variable);
                write!(f, "CREATE INDEX FOR ({v}:{}) ON ({v}.{})", format_ident(label), format_ident(key))
            }
            Clause::Match(patterns) => {
                f.write_str("MATCH ")?;
                write_list(f, patterns)
            }
            Clause::Where(e) => write!(f, "WHERE {e}"),
            Clause::With(p) => write!(f, "WITH {p}"),
            Clause::Unwind { expr, variable } => write!(f, "UNWIND {expr} AS {}", format_ident(variable)),
            Clause::Set(items) => {
                f.write_str("SET ")?;
                write_list(f, items)
            }
            Clause::Delete { detach, variables } => {
                if *detach {
                    f.write_str("DETACH ")?;
                }
                let vars: Vec<String> = variables.iter().map(|v| format_ident(v)).collect();
                write!(f, "DELETE {}", vars.join(", "))
            }
            Clause::Return(p) => write!(f, "RETURN {p}"),
            Clause::Call { procedure, args, yields } => {
                write!(f, "CALL {procedure}(")?;
                write_list(f, args)?;
                f.write_char(')')?;
                if let Some(ys) = yields {
                    let ys: Vec<String> = ys.iter().map(|y| format_ident(y)).collect();
                    write!(f, " YIELD {}", ys.join(", "))?;
                }
                Ok(())
            }
        }
    }
}

impl Display for Statement {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        for (i, c) in self.clauses.iter().enumerate() {
            if i > 0 {
                f.write_char('\n')?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}
