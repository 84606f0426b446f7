//! Address Expressions.
//!
//! ```text
//! AExpr    := Scope ( '*' Dim ( '*' Scheme ':' Tag )*
//!                   | '*' '[' DsName ']'
//!                   | '/' DsName )
//! Scope    := 'ALL' | identifier
//! ```
//!
//! No whitespace is allowed anywhere inside an A-Expression. `ALL*a*b:c` is
//! a single field selector with one tag spec, never a product.

use std::fmt;

use thiserror::Error;

pub use crate::registry::Scope;
use crate::registry::{AddressTuple, TagRef};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Selector {
    /// `Scope*dim*scheme:tag...`: fields by Dimension and Tags.
    Field { dimension: String, tags: Vec<TagRef> },
    /// `Scope*[ds]`: fields whose Dimension belongs to a DimensionSet.
    DimSet(String),
    /// `Scope/ds`: tables carrying every Dimension of a DimensionSet.
    Table(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AExpr {
    pub scope: Scope,
    pub selector: Selector,
}

impl AExpr {
    pub fn field(scope: Scope, dimension: impl Into<String>, tags: Vec<TagRef>) -> AExpr {
        AExpr {
            scope,
            selector: Selector::Field {
                dimension: dimension.into(),
                tags,
            },
        }
    }

    pub fn dim_set(scope: Scope, ds: impl Into<String>) -> AExpr {
        AExpr {
            scope,
            selector: Selector::DimSet(ds.into()),
        }
    }

    pub fn table(scope: Scope, ds: impl Into<String>) -> AExpr {
        AExpr {
            scope,
            selector: Selector::Table(ds.into()),
        }
    }

    pub fn form(&self) -> &'static str {
        match self.selector {
            Selector::Field { .. } => "field selector",
            Selector::DimSet(_) => "dimension-set selector",
            Selector::Table(_) => "table selector",
        }
    }

    /// The Address Tuple of a field selector.
    pub fn address(&self) -> Option<AddressTuple> {
        match &self.selector {
            Selector::Field { dimension, tags } => Some(AddressTuple::new(dimension.clone(), tags.iter().cloned())),
            _ => None,
        }
    }
}

impl fmt::Display for AExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.scope)?;
        match &self.selector {
            Selector::Field { dimension, tags } => {
                write!(f, "*{dimension}")?;
                for t in tags {
                    write!(f, "*{t}")?;
                }
                Ok(())
            }
            Selector::DimSet(ds) => write!(f, "*[{ds}]"),
            Selector::Table(ds) => write!(f, "/{ds}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("E_SYNTAX at offset {offset}: {message}")]
pub struct AExprError {
    /// Character offset into the input.
    pub offset: usize,
    pub message: String,
}

/// Parses a complete A-Expression.
pub fn parse_aexpr(text: &str) -> Result<AExpr, AExprError> {
    let to_err = |(pos, message): (usize, String)| AExprError {
        offset: char_offset(text, pos),
        message,
    };
    let (expr, end) = parse_prefix(text, 0).map_err(to_err)?;
    if end != text.len() {
        return Err(to_err((end, "unexpected trailing input".to_string())));
    }
    Ok(expr)
}

pub(crate) fn char_offset(text: &str, byte: usize) -> usize {
    let byte = byte.min(text.len());
    let mut b = byte;
    while !text.is_char_boundary(b) {
        b -= 1;
    }
    text[..b].chars().count()
}

/// Parses the longest A-Expression starting at byte `start`. Returns the
/// expression and the byte offset just past it, or a byte offset and message.
pub(crate) fn parse_prefix(text: &str, start: usize) -> Result<(AExpr, usize), (usize, String)> {
    let mut cur = Cursor {
        bytes: text.as_bytes(),
        pos: start,
    };
    let scope_name = cur.ident("scope")?;
    let scope = if scope_name == "ALL" {
        Scope::All
    } else {
        Scope::Table(scope_name.to_string())
    };
    match cur.peek() {
        Some(b'*') => {
            cur.pos += 1;
            if cur.peek() == Some(b'[') {
                cur.pos += 1;
                let ds = cur.ident("dimension set")?;
                cur.expect(b']')?;
                return Ok((AExpr::dim_set(scope, ds), cur.pos));
            }
            let dimension = cur.ident("dimension")?;
            let mut tags: Vec<TagRef> = Vec::new();
            while cur.peek() == Some(b'*') {
                cur.pos += 1;
                let at = cur.pos;
                let scheme = cur.ident("tag scheme")?;
                cur.expect(b':')?;
                let name = cur.ident("tag")?;
                let tag = TagRef::new(scheme, name);
                if tags.contains(&tag) {
                    return Err((at, format!("duplicate tag spec {tag}")));
                }
                tags.push(tag);
            }
            Ok((AExpr::field(scope, dimension, tags), cur.pos))
        }
        Some(b'/') => {
            cur.pos += 1;
            let ds = cur.ident("dimension set")?;
            Ok((AExpr::table(scope, ds), cur.pos))
        }
        _ => Err((cur.pos, "expected '*' or '/' after scope".to_string())),
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn ident(&mut self, what: &str) -> Result<&'a str, (usize, String)> {
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.pos += 1,
            _ => return Err((start, format!("expected {what} identifier"))),
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
            self.pos += 1;
        }
        // identifiers are ASCII, so this slice is on char boundaries
        Ok(std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii"))
    }

    fn expect(&mut self, byte: u8) -> Result<(), (usize, String)> {
        if self.peek() == Some(byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err((self.pos, format!("expected '{}'", byte as char)))
        }
    }
}
