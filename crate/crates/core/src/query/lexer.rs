//! Tokenizer. Every token keeps its exact source slice, so the input is the
//! concatenation of lexemes and the whitespace or comments between them.

use super::QueryError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Keyword,
    Identifier,
    String,
    Integer,
    Float,
    Punctuation,
    Operator,
    Parameter,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub offset: usize,
}

impl Token {
    /// Upper-cased keyword text, or `None` for other kinds.
    pub fn keyword(&self) -> Option<String> {
        (self.kind == TokenKind::Keyword).then(|| self.lexeme.to_ascii_uppercase())
    }

    pub fn is_keyword(&self, kw: &str) -> bool {
        self.kind == TokenKind::Keyword && self.lexeme.eq_ignore_ascii_case(kw)
    }

    pub fn is_symbol(&self, sym: &str) -> bool {
        matches!(self.kind, TokenKind::Punctuation | TokenKind::Operator) && self.lexeme == sym
    }
}

pub const KEYWORDS: &[&str] = &[
    "AND", "AS", "ASC", "BY", "CALL", "CREATE", "CSV", "DELETE", "DESC", "DETACH", "DISTINCT", "FALSE",
    "FIELDTERMINATOR", "FOR", "FROM", "HEADERS", "IN", "INDEX", "IS", "LIMIT", "LOAD", "MATCH", "NOT",
    "NULL", "ON", "OR", "ORDER", "RETURN", "SET", "TRUE", "UNWIND", "WHERE", "WITH", "XOR", "YIELD",
];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.iter().any(|k| k.eq_ignore_ascii_case(word))
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Splits `text` into tokens, skipping whitespace and `//` line comments.
pub fn tokenize(text: &str) -> Result<Vec<Token>, QueryError> {
    let mut tokens = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(start, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if text[start..].starts_with("//") {
            while chars.next_if(|&(_, c)| c != '\n').is_some() {}
            continue;
        }
        let kind = if is_ident_start(c) {
            while chars.next_if(|&(_, c)| is_ident_char(c)).is_some() {}
            let end = chars.peek().map_or(text.len(), |&(i, _)| i);
            if is_keyword(&text[start..end]) {
                TokenKind::Keyword
            } else {
                TokenKind::Identifier
            }
        } else if c == '`' {
            chars.next();
            loop {
                match chars.next() {
                    Some((_, '`')) => break,
                    Some(_) => {}
                    None => return Err(QueryError::lex(start, "unterminated quoted identifier")),
                }
            }
            TokenKind::Identifier
        } else if c.is_ascii_digit() {
            lex_number(text, &mut chars)
        } else if c == '\'' || c == '"' {
            chars.next();
            loop {
                match chars.next() {
                    Some((_, '\\')) => {
                        if chars.next().is_none() {
                            return Err(QueryError::lex(start, "unterminated string"));
                        }
                    }
                    Some((_, q)) if q == c => break,
                    Some(_) => {}
                    None => return Err(QueryError::lex(start, "unterminated string")),
                }
            }
            TokenKind::String
        } else if c == '$' {
            chars.next();
            if !chars.peek().is_some_and(|&(_, c)| is_ident_start(c)) {
                return Err(QueryError::lex(start, "expected parameter name after '$'"));
            }
            while chars.next_if(|&(_, c)| is_ident_char(c)).is_some() {}
            TokenKind::Parameter
        } else {
            chars.next();
            match c {
                '<' => {
                    chars.next_if(|&(_, c)| c == '>' || c == '=');
                    TokenKind::Operator
                }
                '>' => {
                    chars.next_if(|&(_, c)| c == '=');
                    TokenKind::Operator
                }
                '=' | '+' | '-' => TokenKind::Operator,
                '(' | ')' | '[' | ']' | '{' | '}' | ',' | ':' | '.' | ';' | '*' | '|' => TokenKind::Punctuation,
                other => return Err(QueryError::lex(start, format!("unexpected character {other:?}"))),
            }
        };
        let end = chars.peek().map_or(text.len(), |&(i, _)| i);
        tokens.push(Token { kind, lexeme: text[start..end].to_string(), offset: start });
    }
    Ok(tokens)
}

fn lex_number(text: &str, chars: &mut std::iter::Peekable<std::str::CharIndices>) -> TokenKind {
    let digits = |chars: &mut std::iter::Peekable<std::str::CharIndices>| {
        while chars.next_if(|&(_, c)| c.is_ascii_digit()).is_some() {}
    };
    digits(chars);
    let mut kind = TokenKind::Integer;
    // A fraction needs a digit after the dot so `n.x` style access on
    // numbers never arises and `1.` stays an integer followed by a dot.
    if let Some(&(i, '.')) = chars.peek() {
        if text[i + 1..].starts_with(|c: char| c.is_ascii_digit()) {
            chars.next();
            digits(chars);
            kind = TokenKind::Float;
        }
    }
    if let Some(&(i, 'e' | 'E')) = chars.peek() {
        let rest = &text[i + 1..];
        let exp_digits = rest.strip_prefix(['+', '-']).unwrap_or(rest);
        if exp_digits.starts_with(|c: char| c.is_ascii_digit()) {
            chars.next();
            chars.next_if(|&(_, c)| c == '+' || c == '-');
            digits(chars);
            kind = TokenKind::Float;
        }
    }
    kind
}

/// Decodes a string token's lexeme: strips the quotes and resolves
/// backslash escapes.
pub fn unescape(lexeme: &str) -> String {
    let inner = &lexeme[1..lexeme.len() - 1];
    let mut out = String::with_capacity(inner.len());
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('n') => out.push('\n'),
            Some('t') => out.push('\t'),
            Some('r') => out.push('\r'),
            Some('0') => out.push('\0'),
            Some(other) => out.push(other),
            None => {}
        }
    }
    out
}

/// Inverse of [`unescape`] for single-quoted output.
pub fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('\'');
    for c in text.chars() {
        match c {
            '\'' => out.push_str("\\'"),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            '\0' => out.push_str("\\0"),
            c => out.push(c),
        }
    }
    out.push('\'');
    out
}

/// Identifier text as written, without backticks.
pub fn ident_name(lexeme: &str) -> String {
    lexeme
        .strip_prefix('`')
        .and_then(|s| s.strip_suffix('`'))
        .unwrap_or(lexeme)
        .to_string()
}

/// Writes `name` so it lexes back as one identifier.
pub fn format_ident(name: &str) -> String {
    let plain = name.starts_with(is_ident_start) && name.chars().all(is_ident_char) && !is_keyword(name);
    if plain {
        name.to_string()
    } else {
        format!("`{name}`")
    }
}
