//! Recursive-descent parser with scope validation: every variable a clause
//! reads must have been bound by an earlier clause.

use std::collections::BTreeSet;

use super::ast::*;
use super::functions;
use super::lexer::{ident_name, tokenize, unescape, Token, TokenKind};
use super::procedures;
use super::QueryError;

type Result<T> = std::result::Result<T, QueryError>;

/// Parses and validates one statement. A trailing `;` is allowed.
pub fn parse(text: &str) -> Result<Statement> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, pos: 0, end: text.len(), scope: BTreeSet::new() };
    let stmt = p.statement()?;
    p.eat_symbol(";");
    if let Some(t) = p.peek() {
        return Err(QueryError::parse(t.offset, format!("unexpected '{}' after end of statement", t.lexeme)));
    }
    Ok(stmt)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
    scope: BTreeSet<String>,
}

/// Variable occurrences in a pattern, with their offsets.
type Occurrences = Vec<(String, usize)>;

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_at(&self, ahead: usize) -> Option<&Token> {
        self.tokens.get(self.pos + ahead)
    }

    fn offset(&self) -> usize {
        self.peek().map_or(self.end, |t| t.offset)
    }

    fn advance(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn describe_next(&self) -> String {
        self.peek().map_or("end of input".to_string(), |t| format!("'{}'", t.lexeme))
    }

    fn error_expected(&self, what: &str) -> QueryError {
        QueryError::parse(self.offset(), format!("expected {what}, found {}", self.describe_next()))
    }

    fn at_keyword(&self, kw: &str) -> bool {
        self.peek().is_some_and(|t| t.is_keyword(kw))
    }

    fn at_symbol(&self, sym: &str) -> bool {
        self.peek().is_some_and(|t| t.is_symbol(sym))
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        let hit = self.at_keyword(kw);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn eat_symbol(&mut self, sym: &str) -> bool {
        let hit = self.at_symbol(sym);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<()> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            Err(self.error_expected(kw))
        }
    }

    fn expect_symbol(&mut self, sym: &str) -> Result<()> {
        if self.eat_symbol(sym) {
            Ok(())
        } else {
            Err(self.error_expected(&format!("'{sym}'")))
        }
    }

    /// A variable name: an identifier, not a keyword.
    fn variable(&mut self) -> Result<(String, usize)> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Identifier => {
                let t = self.advance().expect("peeked");
                Ok((ident_name(&t.lexeme), t.offset))
            }
            _ => Err(self.error_expected("identifier")),
        }
    }

    /// A label, type, key or name part: identifiers and keywords alike.
    fn name(&mut self) -> Result<String> {
        match self.peek() {
            Some(t) if matches!(t.kind, TokenKind::Identifier | TokenKind::Keyword) => {
                let t = self.advance().expect("peeked");
                Ok(ident_name(&t.lexeme))
            }
            _ => Err(self.error_expected("name")),
        }
    }

    fn string(&mut self) -> Result<String> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::String => {
                let t = self.advance().expect("peeked");
                Ok(unescape(&t.lexeme))
            }
            _ => Err(self.error_expected("string literal")),
        }
    }

    fn check_bound(&self, name: &str, offset: usize) -> Result<()> {
        if self.scope.contains(name) {
            Ok(())
        } else {
            Err(QueryError::UnboundVariable { name: name.to_string(), offset })
        }
    }

    fn statement(&mut self) -> Result<Statement> {
        let mut clauses = Vec::new();
        while self.peek().is_some() && !self.at_symbol(";") {
            if matches!(clauses.last(), Some(Clause::Return(_))) {
                return Err(QueryError::parse(self.offset(), "RETURN must be the last clause"));
            }
            clauses.push(self.clause()?);
        }
        if clauses.is_empty() {
            return Err(self.error_expected("a clause"));
        }
        Ok(Statement { clauses })
    }

    fn clause(&mut self) -> Result<Clause> {
        let start = self.offset();
        let Some(kw) = self.peek().and_then(Token::keyword) else {
            return Err(self.error_expected("a clause keyword"));
        };
        self.pos += 1;
        match kw.as_str() {
            "LOAD" => self.load_csv(),
            "CREATE" if self.at_keyword("INDEX") => self.create_index(),
            "CREATE" => {
                let patterns = self.patterns(true)?;
                for (i, p) in patterns.iter().enumerate() {
                    if p.shortest || p.steps.iter().any(|(r, _)| r.var_length) {
                        return Err(QueryError::parse(start, "CREATE cannot use variable-length patterns"));
                    }
                    if p.steps.iter().any(|(r, _)| r.rel_type.is_none()) {
                        return Err(QueryError::parse(start, format!("relationship {} in CREATE needs a type", i + 1)));
                    }
                }
                Ok(Clause::Create(patterns))
            }
            "MATCH" => {
                let patterns = self.patterns(false)?;
                for p in &patterns {
                    if !p.shortest && p.steps.iter().any(|(r, _)| r.var_length) {
                        return Err(QueryError::parse(start, "variable-length relationships need shortestPath"));
                    }
                }
                Ok(Clause::Match(patterns))
            }
            "WHERE" => {
                let e = self.expr()?;
                reject_aggregates(&e, start)?;
                Ok(Clause::Where(e))
            }
            "WITH" => {
                let proj = self.projection(start, true)?;
                Ok(Clause::With(proj))
            }
            "UNWIND" => {
                let expr = self.expr()?;
                reject_aggregates(&expr, start)?;
                self.expect_keyword("AS")?;
                let (variable, _) = self.variable()?;
                self.scope.insert(variable.clone());
                Ok(Clause::Unwind { expr, variable })
            }
            "SET" => {
                let mut items = Vec::new();
                loop {
                    let (variable, off) = self.variable()?;
                    self.check_bound(&variable, off)?;
                    self.expect_symbol(".")?;
                    let key = self.name()?;
                    self.expect_symbol("=")?;
                    let value = self.expr()?;
                    reject_aggregates(&value, start)?;
                    items.push(SetItem::Property { variable, key, value });
                    if !self.eat_symbol(",") {
                        break;
                    }
                }
                Ok(Clause::Set(items))
            }
            "DETACH" => {
                self.expect_keyword("DELETE")?;
                self.delete(true)
            }
            "DELETE" => self.delete(false),
            "RETURN" => Ok(Clause::Return(self.projection(start, false)?)),
            "CALL" => self.call(start),
            "ORDER" | "LIMIT" => Err(QueryError::parse(start, format!("{kw} must follow RETURN or WITH"))),
            _ => Err(QueryError::parse(start, format!("expected a clause keyword, found '{kw}'"))),
        }
    }

    fn load_csv(&mut self) -> Result<Clause> {
        self.expect_keyword("CSV")?;
        self.expect_keyword("WITH")?;
        self.expect_keyword("HEADERS")?;
        self.expect_keyword("FROM")?;
        let url = self.string()?;
        self.expect_keyword("AS")?;
        let (variable, _) = self.variable()?;
        let delimiter = if self.eat_keyword("FIELDTERMINATOR") { Some(self.string()?) } else { None };
        if let Some(d) = &delimiter {
            if d.len() != 1 {
                return Err(QueryError::parse(self.offset(), "FIELDTERMINATOR must be a single byte"));
            }
        }
        self.scope.insert(variable.clone());
        Ok(Clause::LoadCsv { url, variable, delimiter })
    }

    fn create_index(&mut self) -> Result<Clause> {
        self.expect_keyword("INDEX")?;
        self.expect_keyword("FOR")?;
        self.expect_symbol("(")?;
        let (variable, _) = self.variable()?;
        self.expect_symbol(":")?;
        let label = self.name()?;
        self.expect_symbol(")")?;
        self.expect_keyword("ON")?;
        self.expect_symbol("(")?;
        let (v2, off) = self.variable()?;
        if v2 != variable {
            return Err(QueryError::parse(off, format!("expected '{variable}'")));
        }
        self.expect_symbol(".")?;
        let key = self.name()?;
        self.expect_symbol(")")?;
        Ok(Clause::CreateIndex { variable, label, key })
    }

    fn delete(&mut self, detach: bool) -> Result<Clause> {
        let mut variables = Vec::new();
        loop {
            let (v, off) = self.variable()?;
            self.check_bound(&v, off)?;
            variables.push(v);
            if !self.eat_symbol(",") {
                break;
            }
        }
        Ok(Clause::Delete { detach, variables })
    }

    fn call(&mut self, start: usize) -> Result<Clause> {
        let name_offset = self.offset();
        let mut parts = vec![self.name()?];
        while self.eat_symbol(".") {
            parts.push(self.name()?);
        }
        let procedure = parts.join(".");
        let Some(columns) = procedures::columns(&procedure) else {
            return Err(QueryError::UnknownProcedure { name: procedure, offset: Some(name_offset) });
        };
        self.expect_symbol("(")?;
        let mut args = Vec::new();
        if !self.at_symbol(")") {
            loop {
                let e = self.expr()?;
                reject_aggregates(&e, start)?;
                args.push(e);
                if !self.eat_symbol(",") {
                    break;
                }
            }
        }
        self.expect_symbol(")")?;
        let yields = if self.eat_keyword("YIELD") {
            let mut ys = Vec::new();
            loop {
                let off = self.offset();
                let y = self.name()?;
                if !columns.contains(&y.as_str()) {
                    return Err(QueryError::parse(off, format!("{procedure} yields no column '{y}'")));
                }
                ys.push(y);
                if !self.eat_symbol(",") {
                    break;
                }
            }
            Some(ys)
        } else {
            None
        };
        match &yields {
            Some(ys) => self.scope.extend(ys.iter().cloned()),
            None => self.scope.extend(columns.iter().map(|c| c.to_string())),
        }
        Ok(Clause::Call { procedure, args, yields })
    }

    fn projection(&mut self, start: usize, is_with: bool) -> Result<Projection> {
        let distinct = self.eat_keyword("DISTINCT");
        let mut items = Vec::new();
        loop {
            let expr = self.expr()?;
            let alias = if self.eat_keyword("AS") { Some(self.variable()?.0) } else { None };
            if is_with && alias.is_none() && !matches!(expr, Expr::Variable(_)) {
                return Err(QueryError::parse(start, format!("expression '{expr}' in WITH must be aliased")));
            }
            check_aggregate_nesting(&expr, start)?;
            items.push(ReturnItem { expr, alias });
            if !self.eat_symbol(",") {
                break;
            }
        }
        let names: Vec<String> = items.iter().map(ReturnItem::name).collect();
        // ORDER BY sees both the incoming variables and the new names.
        self.scope.extend(names.iter().cloned());
        let mut order = Vec::new();
        if self.eat_keyword("ORDER") {
            self.expect_keyword("BY")?;
            loop {
                let expr = self.expr()?;
                check_aggregate_nesting(&expr, start)?;
                let descending = if self.eat_keyword("DESC") {
                    true
                } else {
                    self.eat_keyword("ASC");
                    false
                };
                order.push(SortItem { expr, descending });
                if !self.eat_symbol(",") {
                    break;
                }
            }
        }
        let limit = if self.eat_keyword("LIMIT") {
            match self.peek() {
                Some(t) if t.kind == TokenKind::Integer => {
                    let t = self.advance().expect("peeked");
                    Some(t.lexeme.parse().map_err(|_| QueryError::parse(t.offset, "LIMIT out of range"))?)
                }
                _ => return Err(self.error_expected("integer")),
            }
        } else {
            None
        };
        if is_with {
            self.scope = names.into_iter().collect();
        }
        Ok(Projection { distinct, items, order, limit })
    }

    /// Comma-separated patterns; their variables enter scope. CREATE may
    /// reuse a bound node only bare, and never a bound relationship.
    fn patterns(&mut self, create: bool) -> Result<Vec<Pattern>> {
        let mut out = Vec::new();
        loop {
            let (pattern, occurrences) = self.pattern()?;
            for (name, off) in occurrences {
                if create && self.scope.contains(&name) {
                    let redeclared = std::iter::once(&pattern.start)
                        .chain(pattern.steps.iter().map(|(_, n)| n))
                        .any(|n| n.variable.as_deref() == Some(&name) && (!n.labels.is_empty() || !n.properties.is_empty()));
                    let rel = pattern.steps.iter().any(|(r, _)| r.variable.as_deref() == Some(&name));
                    if redeclared || rel {
                        return Err(QueryError::parse(off, format!("variable '{name}' already bound")));
                    }
                }
                self.scope.insert(name);
            }
            out.push(pattern);
            if !self.eat_symbol(",") {
                break;
            }
        }
        Ok(out)
    }

    fn pattern(&mut self) -> Result<(Pattern, Occurrences)> {
        let mut occ = Occurrences::new();
        let path_variable = if self.peek().is_some_and(|t| t.kind == TokenKind::Identifier)
            && self.peek_at(1).is_some_and(|t| t.is_symbol("="))
        {
            let (v, off) = self.variable()?;
            self.pos += 1;
            occ.push((v.clone(), off));
            Some(v)
        } else {
            None
        };
        let shortest = self.peek().is_some_and(|t| t.kind == TokenKind::Identifier && t.lexeme == "shortestPath")
            && self.peek_at(1).is_some_and(|t| t.is_symbol("("));
        if shortest {
            let off = self.offset();
            self.pos += 2;
            let (start, steps) = self.path(&mut occ)?;
            self.expect_symbol(")")?;
            if steps.len() != 1 || !steps[0].0.var_length {
                return Err(QueryError::parse(off, "shortestPath takes one variable-length relationship"));
            }
            return Ok((Pattern { path_variable, shortest, start, steps }, occ));
        }
        let (start, steps) = self.path(&mut occ)?;
        Ok((Pattern { path_variable, shortest: false, start, steps }, occ))
    }

    #[allow(clippy::type_complexity)]
    fn path(&mut self, occ: &mut Occurrences) -> Result<(NodePattern, Vec<(RelPattern, NodePattern)>)> {
        let start = self.node(occ)?;
        let mut steps = Vec::new();
        while self.at_symbol("-") || (self.at_symbol("<") && self.peek_at(1).is_some_and(|t| t.is_symbol("-"))) {
            let rel = self.relationship(occ)?;
            let node = self.node(occ)?;
            steps.push((rel, node));
        }
        Ok((start, steps))
    }

    fn node(&mut self, occ: &mut Occurrences) -> Result<NodePattern> {
        self.expect_symbol("(")?;
        let variable = if self.peek().is_some_and(|t| t.kind == TokenKind::Identifier) {
            let (v, off) = self.variable()?;
            occ.push((v.clone(), off));
            Some(v)
        } else {
            None
        };
        let mut labels = Vec::new();
        while self.eat_symbol(":") {
            labels.push(self.name()?);
        }
        let properties = if self.at_symbol("{") { self.map_entries()? } else { Vec::new() };
        self.expect_symbol(")")?;
        Ok(NodePattern { variable, labels, properties })
    }

    fn relationship(&mut self, occ: &mut Occurrences) -> Result<RelPattern> {
        let incoming = self.eat_symbol("<");
        self.expect_symbol("-")?;
        let mut rel = RelPattern {
            variable: None,
            rel_type: None,
            properties: Vec::new(),
            direction: RelDirection::Either,
            var_length: false,
        };
        if self.eat_symbol("[") {
            if self.peek().is_some_and(|t| t.kind == TokenKind::Identifier) {
                let (v, off) = self.variable()?;
                occ.push((v.clone(), off));
                rel.variable = Some(v);
            }
            if self.eat_symbol(":") {
                rel.rel_type = Some(self.name()?);
            }
            rel.var_length = self.eat_symbol("*");
            if self.at_symbol("{") {
                rel.properties = self.map_entries()?;
            }
            self.expect_symbol("]")?;
        }
        self.expect_symbol("-")?;
        let outgoing = self.eat_symbol(">");
        rel.direction = match (incoming, outgoing) {
            (true, true) => return Err(QueryError::parse(self.offset(), "relationship cannot point both ways")),
            (true, false) => RelDirection::Incoming,
            (false, true) => RelDirection::Outgoing,
            (false, false) => RelDirection::Either,
        };
        if rel.var_length && rel.variable.is_some() {
            return Err(QueryError::parse(self.offset(), "variable-length relationships cannot be named"));
        }
        Ok(rel)
    }

    fn map_entries(&mut self) -> Result<Vec<(String, Expr)>> {
        self.expect_symbol("{")?;
        let mut entries = Vec::new();
        if !self.at_symbol("}") {
            loop {
                let key = self.name()?;
                self.expect_symbol(":")?;
                entries.push((key, self.expr()?));
                if !self.eat_symbol(",") {
                    break;
                }
            }
        }
        self.expect_symbol("}")?;
        Ok(entries)
    }

    fn expr(&mut self) -> Result<Expr> {
        self.binary_level(1)
    }

    /// Left-associative binary levels: 1 = OR, 2 = XOR, 3 = AND.
    fn binary_level(&mut self, level: u8) -> Result<Expr> {
        if level > 3 {
            return self.not_expr();
        }
        let (kw, op) = match level {
            1 => ("OR", BinaryOp::Or),
            2 => ("XOR", BinaryOp::Xor),
            _ => ("AND", BinaryOp::And),
        };
        let mut lhs = self.binary_level(level + 1)?;
        while self.eat_keyword(kw) {
            let rhs = self.binary_level(level + 1)?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn not_expr(&mut self) -> Result<Expr> {
        if self.eat_keyword("NOT") {
            return Ok(Expr::Not(Box::new(self.not_expr()?)));
        }
        self.comparison()
    }

    fn comparison(&mut self) -> Result<Expr> {
        let lhs = self.additive()?;
        if self.at_keyword("IS") {
            self.pos += 1;
            let negated = self.eat_keyword("NOT");
            self.expect_keyword("NULL")?;
            return Ok(Expr::IsNull { expr: Box::new(lhs), negated });
        }
        let op = match self.peek() {
            Some(t) if t.kind == TokenKind::Operator => match t.lexeme.as_str() {
                "=" => Some(BinaryOp::Eq),
                "<>" => Some(BinaryOp::Ne),
                "<" => Some(BinaryOp::Lt),
                ">" => Some(BinaryOp::Gt),
                "<=" => Some(BinaryOp::Le),
                ">=" => Some(BinaryOp::Ge),
                _ => None,
            },
            Some(t) if t.is_keyword("IN") => Some(BinaryOp::In),
            _ => None,
        };
        match op {
            Some(op) => {
                self.pos += 1;
                let rhs = self.additive()?;
                Ok(Expr::binary(op, lhs, rhs))
            }
            None => Ok(lhs),
        }
    }

    fn additive(&mut self) -> Result<Expr> {
        let mut lhs = self.postfix()?;
        while self.eat_symbol("+") {
            let rhs = self.postfix()?;
            lhs = Expr::binary(BinaryOp::Add, lhs, rhs);
        }
        Ok(lhs)
    }

    fn postfix(&mut self) -> Result<Expr> {
        let mut e = self.atom()?;
        while self.at_symbol(".") {
            self.pos += 1;
            e = Expr::Property(Box::new(e), self.name()?);
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<Expr> {
        let Some(t) = self.peek().cloned() else {
            return Err(self.error_expected("an expression"));
        };
        match t.kind {
            TokenKind::Integer => {
                self.pos += 1;
                int_literal(&t.lexeme, t.offset)
            }
            TokenKind::Float => {
                self.pos += 1;
                float_literal(&t.lexeme, t.offset)
            }
            TokenKind::String => {
                self.pos += 1;
                Ok(Expr::Literal(Literal::Text(unescape(&t.lexeme))))
            }
            TokenKind::Parameter => {
                self.pos += 1;
                Ok(Expr::Parameter(t.lexeme[1..].to_string()))
            }
            TokenKind::Operator if t.lexeme == "-" => {
                self.pos += 1;
                match self.advance() {
                    Some(n) if n.kind == TokenKind::Integer => int_literal(&format!("-{}", n.lexeme), t.offset),
                    Some(n) if n.kind == TokenKind::Float => float_literal(&format!("-{}", n.lexeme), t.offset),
                    _ => Err(QueryError::parse(t.offset, "expected a number after '-'")),
                }
            }
            TokenKind::Keyword => {
                self.pos += 1;
                match t.keyword().as_deref() {
                    Some("TRUE") => Ok(Expr::Literal(Literal::Bool(true))),
                    Some("FALSE") => Ok(Expr::Literal(Literal::Bool(false))),
                    Some("NULL") => Ok(Expr::Literal(Literal::Null)),
                    _ => Err(QueryError::parse(t.offset, format!("expected an expression, found '{}'", t.lexeme))),
                }
            }
            TokenKind::Punctuation => match t.lexeme.as_str() {
                "(" => self.paren_or_pattern(),
                "[" => {
                    self.pos += 1;
                    let mut items = Vec::new();
                    if !self.at_symbol("]") {
                        loop {
                            items.push(self.expr()?);
                            if !self.eat_symbol(",") {
                                break;
                            }
                        }
                    }
                    self.expect_symbol("]")?;
                    Ok(Expr::List(items))
                }
                "{" => Ok(Expr::Map(self.map_entries()?)),
                _ => Err(self.error_expected("an expression")),
            },
            TokenKind::Identifier => self.identifier_expr(),
            TokenKind::Operator => Err(self.error_expected("an expression")),
        }
    }

    fn paren_or_pattern(&mut self) -> Result<Expr> {
        let save = self.pos;
        let mut occ = Occurrences::new();
        if let Ok((start, steps)) = self.path(&mut occ) {
            if !steps.is_empty() {
                for (name, off) in occ {
                    self.check_bound(&name, off)?;
                }
                let pattern = Pattern { path_variable: None, shortest: false, start, steps };
                return Ok(Expr::PatternPredicate(Box::new(pattern)));
            }
        }
        self.pos = save;
        self.expect_symbol("(")?;
        let e = self.expr()?;
        self.expect_symbol(")")?;
        Ok(e)
    }

    fn identifier_expr(&mut self) -> Result<Expr> {
        // Dotted name followed by '(' is a function call; otherwise a
        // variable with property accesses handled by `postfix`.
        let mut n = 1;
        while self.peek_at(n).is_some_and(|t| t.is_symbol("."))
            && self.peek_at(n + 1).is_some_and(|t| matches!(t.kind, TokenKind::Identifier | TokenKind::Keyword))
        {
            n += 2;
        }
        if !self.peek_at(n).is_some_and(|t| t.is_symbol("(")) {
            let (name, off) = self.variable()?;
            self.check_bound(&name, off)?;
            return Ok(Expr::Variable(name));
        }
        let offset = self.offset();
        let mut parts = vec![self.name()?];
        while self.eat_symbol(".") {
            parts.push(self.name()?);
        }
        let name = parts.join(".");
        let Some(spec) = functions::lookup(&name) else {
            return Err(QueryError::UnknownFunction { name, offset });
        };
        self.expect_symbol("(")?;
        if spec.is_count() && self.eat_symbol("*") {
            self.expect_symbol(")")?;
            return Ok(Expr::CountStar);
        }
        let distinct = self.eat_keyword("DISTINCT");
        if distinct && !spec.aggregate {
            return Err(QueryError::parse(offset, format!("DISTINCT is only allowed in aggregate functions, not {name}")));
        }
        let mut args = Vec::new();
        if !self.at_symbol(")") {
            loop {
                args.push(self.expr()?);
                if !self.eat_symbol(",") {
                    break;
                }
            }
        }
        self.expect_symbol(")")?;
        if args.len() != spec.arity {
            return Err(QueryError::parse(offset, format!("{name} takes {} argument(s), got {}", spec.arity, args.len())));
        }
        Ok(Expr::Function { name, distinct, args })
    }
}

fn int_literal(text: &str, offset: usize) -> Result<Expr> {
    text.parse::<i64>()
        .map(|i| Expr::Literal(Literal::Int(i)))
        .map_err(|_| QueryError::parse(offset, format!("integer {text} out of range")))
}

fn float_literal(text: &str, offset: usize) -> Result<Expr> {
    match text.parse::<f64>() {
        Ok(f) if f.is_finite() => Ok(Expr::Literal(Literal::Float(f))),
        _ => Err(QueryError::parse(offset, format!("float {text} out of range"))),
    }
}

fn contains_aggregate(e: &Expr) -> bool {
    let mut found = false;
    e.visit(&mut |x| found |= functions::is_aggregate(x));
    found
}

fn reject_aggregates(e: &Expr, offset: usize) -> Result<()> {
    if contains_aggregate(e) {
        Err(QueryError::parse(offset, "aggregate functions are only allowed in RETURN, WITH and ORDER BY"))
    } else {
        Ok(())
    }
}

fn check_aggregate_nesting(e: &Expr, offset: usize) -> Result<()> {
    let mut nested = false;
    e.visit(&mut |x| {
        if functions::is_aggregate(x) {
            if let Expr::Function { args, .. } = x {
                nested |= args.iter().any(contains_aggregate);
            }
        }
    });
    if nested {
        Err(QueryError::parse(offset, "aggregate functions cannot be nested"))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_query_shape() {
        let stmt = parse(
            "MATCH (p:Person)-[:FRIENDS_WITH]-(f)\nRETURN p.name AS Name, COUNT(f) AS DegreeCentrality\nORDER BY DegreeCentrality DESC",
        )
        .unwrap();
        assert_eq!(stmt.clauses.len(), 2);
        assert!(matches!(stmt.clauses[0], Clause::Match(_)));
        let Clause::Return(proj) = &stmt.clauses[1] else { panic!() };
        assert_eq!(proj.items.len(), 2);
        assert_eq!(proj.order.len(), 1);
        assert!(proj.order[0].descending);
    }

    #[test]
    fn fraud_where_tree() {
        let stmt = parse(
            "MATCH (a:Account)-[t:TRANSFER]->(b:Account)\nWHERE t.amount > 10000 AND a.region <> b.region\nRETURN a, b, t.amount",
        )
        .unwrap();
        let Clause::Where(Expr::Binary { op: BinaryOp::And, lhs, rhs }) = &stmt.clauses[1] else { panic!() };
        assert!(matches!(**lhs, Expr::Binary { op: BinaryOp::Gt, .. }));
        assert!(matches!(**rhs, Expr::Binary { op: BinaryOp::Ne, .. }));
    }

    #[test]
    fn syntax_errors() {
        let err = parse("MATCH RETURN").unwrap_err();
        assert!(matches!(err, QueryError::Parse { offset: 6, .. }), "{err}");
        assert!(parse("").is_err());
        assert!(parse("RETURN 1 RETURN 2").is_err());
        assert!(parse("MATCH (a) LIMIT 2").is_err());
    }

    #[test]
    fn unbound_variables() {
        let err = parse("MATCH (a) RETURN b").unwrap_err();
        assert_eq!(err, QueryError::UnboundVariable { name: "b".into(), offset: 17 });
        assert!(parse("MATCH (a) WITH a AS x RETURN a").is_err());
        assert!(parse("MATCH (a) WHERE (a)-[:R]-(z) RETURN a").is_err());
        assert!(parse("MATCH (a) SET q.x = 1").is_err());
        assert!(parse("MATCH (a) RETURN a.name AS n ORDER BY n").is_ok());
    }

    #[test]
    fn functions_and_procedures_checked() {
        assert!(matches!(parse("RETURN nope(1)"), Err(QueryError::UnknownFunction { .. })));
        assert!(matches!(parse("CALL gds.nope.stream('g')"), Err(QueryError::UnknownProcedure { .. })));
        assert!(parse("CALL gds.pageRank.stream('g') YIELD nodeId, bogus").is_err());
        assert!(parse("RETURN toInteger(1, 2)").is_err());
        assert!(parse("MATCH (a) WHERE count(a) > 1 RETURN a").is_err());
        assert!(parse("MATCH (a) RETURN count(collect(a))").is_err());
    }

    #[test]
    fn patterns_in_where() {
        let stmt = parse("MATCH (a)-[r:FRIENDS]-(b)\nWHERE NOT (a)-[:COLLEAGUES]-(b)\nRETURN a, r, b").unwrap();
        let Clause::Where(Expr::Not(inner)) = &stmt.clauses[1] else { panic!() };
        assert!(matches!(**inner, Expr::PatternPredicate(_)));
        let stmt = parse("MATCH (a) WHERE (a.x) = 1 RETURN a").unwrap();
        assert!(matches!(stmt.clauses[1], Clause::Where(Expr::Binary { op: BinaryOp::Eq, .. })));
    }

    #[test]
    fn shortest_path_and_call() {
        let stmt = parse(
            "MATCH (start:Node {name: 'A'}), (end:Node {name: 'B'})\nMATCH path = shortestPath((start)-[*]-(end))\nRETURN path;",
        )
        .unwrap();
        let Clause::Match(ps) = &stmt.clauses[1] else { panic!() };
        assert!(ps[0].shortest && ps[0].path_variable.as_deref() == Some("path"));
        let stmt = parse("CALL gds.pageRank.stream('myGraph')\nYIELD nodeId, score\nRETURN gds.util.asNode(nodeId).name AS Name, score").unwrap();
        let Clause::Return(p) = &stmt.clauses[1] else { panic!() };
        assert!(matches!(&p.items[0].expr, Expr::Property(f, k) if k == "name" && matches!(**f, Expr::Function { .. })));
    }

    #[test]
    fn create_rules() {
        assert!(parse("CREATE (a)-[]->(b)").is_err());
        assert!(parse("MATCH (a) CREATE (a:Person)").is_err());
        assert!(parse("MATCH (a), (b) CREATE (a)-[:R]->(b)").is_ok());
        assert!(parse("MATCH (a)-[*]-(b) RETURN a").is_err());
    }

    #[test]
    fn printer_round_trip_examples() {
        for q in [
            "MATCH (a:Person {name: 'Alice'}), (b:Person {name: 'Bob'})\nCREATE (a)-[:FRIEND {since: 2015, closeness: 4}]->(b)",
            "MATCH (a:Person)-[:KNOWS]-(b:Person) WITH collect(DISTINCT a) + collect(DISTINCT b) AS nodes UNWIND nodes AS n RETURN n",
            "MATCH (n) WHERE NOT (n.x IS NULL OR n.y = -3) AND n.z IN [1, 2.5, 'a\\'b'] RETURN DISTINCT n.x ORDER BY n.x DESC, n.y LIMIT 3",
            "CREATE INDEX FOR (n:Entity) ON (n.name)",
            "LOAD CSV WITH HEADERS FROM 'file:///people.csv' AS row CREATE (:Person {name: row.name, age: toInteger(row.age)})",
            "MATCH (a)<-[r]-(b) DETACH DELETE a, r",
            "UNWIND $rows AS row RETURN row.`order` AS `select`, {`match`: 1}",
        ] {
            let ast = parse(q).unwrap();
            let printed = ast.to_string();
            assert_eq!(parse(&printed).unwrap(), ast, "{printed}");
        }
    }
}
