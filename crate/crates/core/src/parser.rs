//! Recursive-descent parser for the SQL subset with embedded A-Expressions.
//!
//! ```text
//! query      := select ( UNION ALL select )* [';']
//! select     := SELECT [DISTINCT] ( '*' | column ( ',' column )* )
//!               FROM from_item [ WHERE or_expr ]
//! from_item  := table | aexpr | '(' query ')' [AS] alias
//! or_expr    := and_expr ( OR and_expr )*
//! and_expr   := not_expr ( AND not_expr )*
//! not_expr   := NOT not_expr | '(' or_expr ')' | column cmp_op literal
//! literal    := 'text' | integer
//! ```
//!
//! Keywords are case-insensitive. An identifier immediately followed by `*`
//! or `/` starts an A-Expression; whitespace before `*` makes it SQL's star.

use std::fmt;

use thiserror::Error;

use crate::aexpr::{self, char_offset, AExpr, Selector};
use crate::ast::{CmpOp, ColumnRef, Comparison, Condition, FromItem, KqlQuery, Literal, Projection, Query, Select, TableRef};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClausePosition {
    Select,
    From,
    Where,
}

impl fmt::Display for ClausePosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClausePosition::Select => "SELECT list",
            ClausePosition::From => "FROM clause",
            ClausePosition::Where => "WHERE clause",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("E_SYNTAX at offset {offset}: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        /// Character offset into the query text.
        offset: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("E_POSITION at offset {offset}: {form} `{text}` is not allowed in the {clause}")]
    Position {
        offset: usize,
        form: &'static str,
        text: String,
        clause: ClausePosition,
    },
}

impl ParseError {
    pub fn code(&self) -> &'static str {
        match self {
            ParseError::Syntax { .. } => "E_SYNTAX",
            ParseError::Position { .. } => "E_POSITION",
        }
    }

    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::Position { offset, .. } => *offset,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Keyword {
    Select,
    Distinct,
    From,
    Where,
    And,
    Or,
    Not,
    As,
    Union,
    All,
}

impl Keyword {
    fn lookup(word: &str) -> Option<Keyword> {
        const TABLE: [(&str, Keyword); 10] = [
            ("SELECT", Keyword::Select),
            ("DISTINCT", Keyword::Distinct),
            ("FROM", Keyword::From),
            ("WHERE", Keyword::Where),
            ("AND", Keyword::And),
            ("OR", Keyword::Or),
            ("NOT", Keyword::Not),
            ("AS", Keyword::As),
            ("UNION", Keyword::Union),
            ("ALL", Keyword::All),
        ];
        TABLE
            .iter()
            .find(|(k, _)| k.eq_ignore_ascii_case(word))
            .map(|(_, kw)| *kw)
    }

    fn name(self) -> &'static str {
        match self {
            Keyword::Select => "SELECT",
            Keyword::Distinct => "DISTINCT",
            Keyword::From => "FROM",
            Keyword::Where => "WHERE",
            Keyword::And => "AND",
            Keyword::Or => "OR",
            Keyword::Not => "NOT",
            Keyword::As => "AS",
            Keyword::Union => "UNION",
            Keyword::All => "ALL",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Kw(Keyword),
    Ident(String),
    AExpr(AExpr),
    Str(String),
    Int(i64),
    Op(CmpOp),
    LParen,
    RParen,
    Comma,
    Star,
    Semi,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Kw(k) => k.name().to_string(),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::AExpr(a) => format!("A-Expression `{a}`"),
            Tok::Str(_) => "string literal".to_string(),
            Tok::Int(i) => format!("integer {i}"),
            Tok::Op(op) => format!("`{op}`"),
            Tok::LParen => "`(`".to_string(),
            Tok::RParen => "`)`".to_string(),
            Tok::Comma => "`,`".to_string(),
            Tok::Star => "`*`".to_string(),
            Tok::Semi => "`;`".to_string(),
            Tok::Eof => "end of input".to_string(),
        }
    }
}

struct Token {
    tok: Tok,
    /// Byte offset of the token start.
    at: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let syntax = |at: usize, expected: &str, found: String| ParseError::Syntax {
        offset: char_offset(text, at),
        expected: vec![expected.to_string()],
        found,
    };
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'(' => {
                i += 1;
                Tok::LParen
            }
            b')' => {
                i += 1;
                Tok::RParen
            }
            b',' => {
                i += 1;
                Tok::Comma
            }
            b'*' => {
                i += 1;
                Tok::Star
            }
            b';' => {
                i += 1;
                Tok::Semi
            }
            b'=' => {
                i += 1;
                Tok::Op(CmpOp::Eq)
            }
            b'!' if bytes.get(i + 1) == Some(&b'=') => {
                i += 2;
                Tok::Op(CmpOp::Ne)
            }
            b'<' => match bytes.get(i + 1) {
                Some(b'=') => {
                    i += 2;
                    Tok::Op(CmpOp::Le)
                }
                Some(b'>') => {
                    i += 2;
                    Tok::Op(CmpOp::Ne)
                }
                _ => {
                    i += 1;
                    Tok::Op(CmpOp::Lt)
                }
            },
            b'>' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    i += 2;
                    Tok::Op(CmpOp::Ge)
                } else {
                    i += 1;
                    Tok::Op(CmpOp::Gt)
                }
            }
            b'\'' => {
                let mut value = String::new();
                i += 1;
                let mut seg = i;
                loop {
                    match bytes.get(i) {
                        None => return Err(syntax(start, "closing quote", "end of input".into())),
                        Some(b'\'') if bytes.get(i + 1) == Some(&b'\'') => {
                            value.push_str(&text[seg..=i]);
                            i += 2;
                            seg = i;
                        }
                        Some(b'\'') => {
                            value.push_str(&text[seg..i]);
                            i += 1;
                            break;
                        }
                        Some(_) => i += 1,
                    }
                }
                Tok::Str(value)
            }
            b'0'..=b'9' | b'-' => {
                if c == b'-' {
                    i += 1;
                }
                let digits = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if digits == i {
                    return Err(syntax(start, "integer", "`-`".into()));
                }
                if i < bytes.len() && (bytes[i].is_ascii_alphabetic() || bytes[i] == b'_') {
                    return Err(syntax(i, "end of integer", format!("`{}`", bytes[i] as char)));
                }
                let n = text[start..i]
                    .parse::<i64>()
                    .map_err(|_| syntax(start, "64-bit integer", "out-of-range integer".into()))?;
                Tok::Int(n)
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                if matches!(bytes.get(i), Some(b'*') | Some(b'/')) {
                    let (expr, end) = aexpr::parse_prefix(text, start).map_err(|(pos, message)| ParseError::Syntax {
                        offset: char_offset(text, pos),
                        expected: vec![message.trim_start_matches("expected ").to_string()],
                        found: describe_at(text, pos),
                    })?;
                    i = end;
                    Tok::AExpr(expr)
                } else {
                    let word = &text[start..i];
                    match Keyword::lookup(word) {
                        Some(kw) => Tok::Kw(kw),
                        None => Tok::Ident(word.to_string()),
                    }
                }
            }
            _ => {
                return Err(syntax(start, "token", describe_at(text, start)));
            }
        };
        out.push(Token { tok, at: start });
    }
    out.push(Token {
        tok: Tok::Eof,
        at: text.len(),
    });
    Ok(out)
}

fn describe_at(text: &str, byte: usize) -> String {
    match text.get(byte..).and_then(|s| s.chars().next()) {
        Some(c) => format!("`{c}`"),
        None => "end of input".to_string(),
    }
}

struct Parser<'a> {
    text: &'a str,
    tokens: Vec<Token>,
    pos: usize,
}

/// Parses one KQL (or plain SQL) statement.
pub fn parse_kql(text: &str) -> Result<KqlQuery, ParseError> {
    let tokens = lex(text)?;
    let mut p = Parser { text, tokens, pos: 0 };
    let q = p.query()?;
    if p.peek() == &Tok::Semi {
        p.pos += 1;
    }
    if p.peek() != &Tok::Eof {
        return Err(p.unexpected(&["UNION ALL", "end of input"]));
    }
    Ok(q)
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn offset(&self) -> usize {
        char_offset(self.text, self.tokens[self.pos].at)
    }

    fn next(&mut self) -> Tok {
        let t = self.tokens[self.pos].tok.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        ParseError::Syntax {
            offset: self.offset(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().describe(),
        }
    }

    fn eat_kw(&mut self, kw: Keyword) -> bool {
        if self.peek() == &Tok::Kw(kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, kw: Keyword) -> Result<(), ParseError> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            Err(self.unexpected(&[kw.name()]))
        }
    }

    fn misplaced(&self, a: &AExpr, clause: ClausePosition) -> ParseError {
        ParseError::Position {
            offset: self.offset(),
            form: a.form(),
            text: a.to_string(),
            clause,
        }
    }

    fn query(&mut self) -> Result<KqlQuery, ParseError> {
        let mut branches = vec![self.select()?];
        while self.peek() == &Tok::Kw(Keyword::Union) {
            self.pos += 1;
            self.expect_kw(Keyword::All)?;
            branches.push(self.select()?);
        }
        Ok(Query { branches })
    }

    fn select(&mut self) -> Result<Select<ColumnRef, TableRef>, ParseError> {
        self.expect_kw(Keyword::Select)?;
        let distinct = self.eat_kw(Keyword::Distinct);
        let projection = if self.peek() == &Tok::Star {
            self.pos += 1;
            Projection::Star
        } else {
            let mut cols = vec![self.select_item()?];
            while self.peek() == &Tok::Comma {
                self.pos += 1;
                cols.push(self.select_item()?);
            }
            Projection::Columns(cols)
        };
        self.expect_kw(Keyword::From)?;
        let from = self.source()?;
        let selection = if self.eat_kw(Keyword::Where) {
            Some(self.or_expr()?)
        } else {
            None
        };
        Ok(Select {
            distinct,
            projection,
            from,
            selection,
        })
    }

    fn select_item(&mut self) -> Result<ColumnRef, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.pos += 1;
                Ok(ColumnRef::Field(name))
            }
            Tok::AExpr(a) => {
                if matches!(a.selector, Selector::Table(_)) {
                    return Err(self.misplaced(&a, ClausePosition::Select));
                }
                self.pos += 1;
                Ok(ColumnRef::Address(a))
            }
            _ => Err(self.unexpected(&["`*`", "field name", "A-Expression"])),
        }
    }

    fn source(&mut self) -> Result<FromItem<ColumnRef, TableRef>, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.pos += 1;
                Ok(FromItem::Table(TableRef::Named(name)))
            }
            Tok::AExpr(a) => {
                if !matches!(a.selector, Selector::Table(_)) {
                    return Err(self.misplaced(&a, ClausePosition::From));
                }
                self.pos += 1;
                Ok(FromItem::Table(TableRef::Address(a)))
            }
            Tok::LParen => {
                self.pos += 1;
                let query = self.query()?;
                if self.next() != Tok::RParen {
                    self.pos -= 1;
                    return Err(self.unexpected(&["`)`"]));
                }
                self.eat_kw(Keyword::As);
                match self.next() {
                    Tok::Ident(alias) => Ok(FromItem::Subquery {
                        query: Box::new(query),
                        alias,
                    }),
                    _ => {
                        self.pos -= 1;
                        Err(self.unexpected(&["subquery alias"]))
                    }
                }
            }
            _ => Err(self.unexpected(&["table name", "table selector", "`(`"])),
        }
    }

    fn or_expr(&mut self) -> Result<Condition<ColumnRef>, ParseError> {
        let mut left = self.and_expr()?;
        while self.eat_kw(Keyword::Or) {
            let right = self.and_expr()?;
            left = Condition::or(left, right);
        }
        Ok(left)
    }

    fn and_expr(&mut self) -> Result<Condition<ColumnRef>, ParseError> {
        let mut left = self.not_expr()?;
        while self.eat_kw(Keyword::And) {
            let right = self.not_expr()?;
            left = Condition::and(left, right);
        }
        Ok(left)
    }

    fn not_expr(&mut self) -> Result<Condition<ColumnRef>, ParseError> {
        if self.eat_kw(Keyword::Not) {
            return Ok(Condition::negate(self.not_expr()?));
        }
        if self.peek() == &Tok::LParen {
            self.pos += 1;
            let inner = self.or_expr()?;
            if self.peek() != &Tok::RParen {
                return Err(self.unexpected(&["`)`", "AND", "OR"]));
            }
            self.pos += 1;
            return Ok(Condition::paren(inner));
        }
        let operand = match self.peek().clone() {
            Tok::Ident(name) => ColumnRef::Field(name),
            Tok::AExpr(a) => {
                if !matches!(a.selector, Selector::Field { .. }) {
                    return Err(self.misplaced(&a, ClausePosition::Where));
                }
                ColumnRef::Address(a)
            }
            _ => return Err(self.unexpected(&["NOT", "`(`", "field name", "A-Expression"])),
        };
        self.pos += 1;
        let op = match self.peek() {
            Tok::Op(op) => *op,
            _ => return Err(self.unexpected(&["comparison operator"])),
        };
        self.pos += 1;
        let literal = match self.peek().clone() {
            Tok::Str(s) => Literal::Str(s),
            Tok::Int(i) => Literal::Int(i),
            _ => return Err(self.unexpected(&["literal"])),
        };
        self.pos += 1;
        Ok(Condition::Compare(Comparison { operand, op, literal }))
    }
}

/// Every embedded A-Expression with its clause, in textual order.
pub fn extract_aexprs(q: &KqlQuery) -> Vec<(ClausePosition, AExpr)> {
    let mut out = Vec::new();
    collect_query(q, &mut out);
    out
}

fn collect_query(q: &KqlQuery, out: &mut Vec<(ClausePosition, AExpr)>) {
    for s in &q.branches {
        if let Projection::Columns(cols) = &s.projection {
            for c in cols {
                if let ColumnRef::Address(a) = c {
                    out.push((ClausePosition::Select, a.clone()));
                }
            }
        }
        match &s.from {
            FromItem::Table(TableRef::Address(a)) => out.push((ClausePosition::From, a.clone())),
            FromItem::Table(TableRef::Named(_)) => {}
            FromItem::Subquery { query, .. } => collect_query(query, out),
        }
        if let Some(cond) = &s.selection {
            for c in cond.comparisons() {
                if let ColumnRef::Address(a) = &c.operand {
                    out.push((ClausePosition::Where, a.clone()));
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aexpr::Scope;
    use crate::fixtures::{NESTED_KQL, SENDERS_KQL};
    use crate::registry::TagRef;
    use proptest::prelude::*;

    fn addr(text: &str) -> ColumnRef {
        ColumnRef::Address(crate::aexpr::parse_aexpr(text).unwrap())
    }

    #[test]
    fn parses_distinct_senders_query() {
        let q = parse_kql(SENDERS_KQL).unwrap();
        assert_eq!(q.branches.len(), 1);
        let s = &q.branches[0];
        assert!(s.distinct);
        assert_eq!(s.projection, Projection::Columns(vec![addr("ALL*email_address*_:source")]));
        assert_eq!(
            s.from,
            FromItem::Table(TableRef::Address(AExpr::table(Scope::All, "emailmessage")))
        );
        let folder = |v: &str| Condition::compare(addr("ALL*folder"), CmpOp::Eq, Literal::Str(v.into()));
        assert_eq!(
            s.selection,
            Some(Condition::paren(Condition::or(folder("sent_items"), folder("sent"))))
        );
    }

    #[test]
    fn parses_nested_query() {
        let q = parse_kql(NESTED_KQL).unwrap();
        let s = &q.branches[0];
        assert!(!s.distinct);
        assert_eq!(s.projection, Projection::Columns(vec![addr("ALL*[emailmessage]")]));
        let FromItem::Subquery { query, alias } = &s.from else {
            panic!("expected subquery");
        };
        assert_eq!(alias, "example");
        assert_eq!(query.branches[0].projection, Projection::Star);
        let Some(Condition::Paren(inner)) = &s.selection else {
            panic!("expected parenthesized condition");
        };
        let Condition::And(l, r) = inner.as_ref() else {
            panic!("expected AND");
        };
        let sent = addr("ALL*datetime*_:sender");
        assert_eq!(
            **l,
            Condition::compare(sent.clone(), CmpOp::Ge, Literal::Str("2000-01-01 00:00:00-07:00".into()))
        );
        assert_eq!(
            **r,
            Condition::compare(sent, CmpOp::Lt, Literal::Str("2003-01-01 00:00:00-07:00".into()))
        );
    }

    #[test]
    fn counts_embedded_aexprs() {
        assert_eq!(extract_aexprs(&parse_kql(SENDERS_KQL).unwrap()).len(), 4);
        // bracket, table selector, sender address, two datetime occurrences
        let nested = extract_aexprs(&parse_kql(NESTED_KQL).unwrap());
        let texts: Vec<(ClausePosition, String)> = nested.iter().map(|(p, a)| (*p, a.to_string())).collect();
        assert_eq!(
            texts,
            vec![
                (ClausePosition::Select, "ALL*[emailmessage]".to_string()),
                (ClausePosition::From, "ALL/emailmessage".to_string()),
                (ClausePosition::Where, "ALL*email_address*_:sender".to_string()),
                (ClausePosition::Where, "ALL*datetime*_:sender".to_string()),
                (ClausePosition::Where, "ALL*datetime*_:sender".to_string()),
            ]
        );
        assert!(extract_aexprs(&parse_kql("SELECT a FROM t").unwrap()).is_empty());
    }

    #[test]
    fn enforces_positions() {
        let err = parse_kql("SELECT ALL/emailmessage FROM t").unwrap_err();
        assert_eq!(err.code(), "E_POSITION");
        assert_eq!(err.offset(), 7);
        let err = parse_kql("SELECT a FROM ALL*folder").unwrap_err();
        assert_eq!(err.code(), "E_POSITION");
        let err = parse_kql("SELECT a FROM t WHERE ALL*[emailmessage] = 'x'").unwrap_err();
        assert_eq!(err.code(), "E_POSITION");
        let err = parse_kql("SELECT a FROM t WHERE ALL/emailmessage = 'x'").unwrap_err();
        assert_eq!(err.code(), "E_POSITION");
    }

    #[test]
    fn syntax_errors_carry_expected_sets() {
        let err = parse_kql("SELECT FROM t").unwrap_err();
        match &err {
            ParseError::Syntax { offset, expected, .. } => {
                assert_eq!(*offset, 7);
                assert!(expected.iter().any(|e| e.contains("field name")));
            }
            other => panic!("{other:?}"),
        }
        for bad in [
            "",
            "SELECT",
            "SELECT a",
            "SELECT a FROM",
            "SELECT a FROM t WHERE",
            "SELECT a FROM t WHERE a",
            "SELECT a FROM t WHERE a =",
            "SELECT a FROM t WHERE a = b",
            "SELECT a FROM t WHERE 'x' = a",
            "SELECT a FROM t WHERE (a = 1",
            "SELECT a FROM t; SELECT b FROM t",
            "SELECT a FROM t ORDER BY a",
            "SELECT a FROM (SELECT * FROM t)",
            "SELECT a FROM t WHERE a = 'unterminated",
            "SELECT a, * FROM t",
            "SELECT ALL**x FROM t",
            "SELECT a FROM t WHERE a = 12abc",
            "SELECT a FROM t WHERE a = 99999999999999999999",
        ] {
            let err = parse_kql(bad).unwrap_err();
            assert_eq!(err.code(), "E_SYNTAX", "{bad}");
            assert!(err.offset() <= bad.chars().count(), "{bad}: {err}");
        }
    }

    #[test]
    fn keywords_are_case_insensitive() {
        let q = parse_kql("select distinct a from t where not a = 'x' and b < 3 or c >= 'y'").unwrap();
        assert_eq!(
            q.to_string(),
            "SELECT DISTINCT a FROM t WHERE NOT a = 'x' AND b < 3 OR c >= 'y'"
        );
    }

    #[test]
    fn star_needs_whitespace_to_be_sql() {
        // `t*x` is an A-Expression scoped to table t, `SELECT *` is a star
        let q = parse_kql("SELECT t*x FROM t").unwrap();
        assert_eq!(
            q.branches[0].projection,
            Projection::Columns(vec![ColumnRef::Address(AExpr::field(
                Scope::Table("t".into()),
                "x",
                vec![]
            ))])
        );
        let q = parse_kql("SELECT * FROM t").unwrap();
        assert_eq!(q.branches[0].projection, Projection::Star);
    }

    #[test]
    fn parses_union_and_optional_alias_keyword() {
        let q = parse_kql("SELECT a FROM t UNION ALL SELECT b FROM (SELECT * FROM u) x;").unwrap();
        assert_eq!(q.branches.len(), 2);
        assert_eq!(q.to_string(), "SELECT a FROM t UNION ALL SELECT b FROM (SELECT * FROM u) AS x");
    }

    #[test]
    fn literal_forms() {
        let q = parse_kql("SELECT a FROM t WHERE a = 'it''s' AND b <> -4 AND c != 0").unwrap();
        let comps: Vec<Literal> = q.branches[0]
            .selection
            .as_ref()
            .unwrap()
            .comparisons()
            .into_iter()
            .map(|c| c.literal.clone())
            .collect();
        assert_eq!(comps, vec![Literal::Str("it's".into()), Literal::Int(-4), Literal::Int(0)]);
        assert_eq!(q.to_string(), "SELECT a FROM t WHERE a = 'it''s' AND b != -4 AND c != 0");
    }

    #[test]
    fn tag_schemes_in_queries() {
        let q = parse_kql("SELECT ALL*a*ops:hot FROM t").unwrap();
        let found = extract_aexprs(&q);
        let tags: Vec<TagRef> = found[0].1.address().unwrap().tags.into_iter().collect();
        assert_eq!(tags, vec![TagRef::new("ops", "hot")]);
    }

    proptest! {
        #[test]
        fn never_panics_on_noise(bytes in proptest::collection::vec(any::<u8>(), 0..64)) {
            let text = String::from_utf8_lossy(&bytes);
            if let Err(e) = parse_kql(&text) {
                prop_assert!(e.offset() <= text.chars().count());
            }
        }

        #[test]
        fn never_panics_on_sqlish_noise(text in "(SELECT|FROM|WHERE|AND|OR|NOT|DISTINCT|UNION|ALL|AS|\\*|/|\\(|\\)|,|=|<|>=|'x'|7|a|ALL\\*b|ALL/c|\\[|\\]|:| ){0,16}") {
            if let Err(e) = parse_kql(&text) {
                prop_assert!(e.offset() <= text.chars().count());
            }
        }
    }
}
