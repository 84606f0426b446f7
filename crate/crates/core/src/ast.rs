//! Query AST for the SQL subset.
//!
//! The tree is generic over its column (`C`) and table (`T`) leaves so the
//! same shape carries both KQL (leaves may be A-Expressions) and plain SQL
//! (leaves are physical names). `Display` renders canonical text: uppercase
//! keywords, single spaces, `, ` between select items, and parentheses only
//! where the source had them.

use std::fmt;

use crate::aexpr::AExpr;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query<C, T> {
    /// One or more SELECTs joined by `UNION ALL`.
    pub branches: Vec<Select<C, T>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Select<C, T> {
    pub distinct: bool,
    pub projection: Projection<C>,
    pub from: FromItem<C, T>,
    pub selection: Option<Condition<C>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Projection<C> {
    Star,
    Columns(Vec<C>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FromItem<C, T> {
    Table(T),
    Subquery { query: Box<Query<C, T>>, alias: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Condition<C> {
    Compare(Comparison<C>),
    Not(Box<Condition<C>>),
    And(Box<Condition<C>>, Box<Condition<C>>),
    Or(Box<Condition<C>>, Box<Condition<C>>),
    /// Parentheses written in the source.
    Paren(Box<Condition<C>>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comparison<C> {
    pub operand: C,
    pub op: CmpOp,
    pub literal: Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn as_str(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    /// The operator `op'` with `NOT (a op b)` ≡ `a op' b`.
    pub fn negate(self) -> CmpOp {
        match self {
            CmpOp::Eq => CmpOp::Ne,
            CmpOp::Ne => CmpOp::Eq,
            CmpOp::Lt => CmpOp::Ge,
            CmpOp::Le => CmpOp::Gt,
            CmpOp::Gt => CmpOp::Le,
            CmpOp::Ge => CmpOp::Lt,
        }
    }

    pub fn holds(self, ord: std::cmp::Ordering) -> bool {
        use std::cmp::Ordering::*;
        match self {
            CmpOp::Eq => ord == Equal,
            CmpOp::Ne => ord != Equal,
            CmpOp::Lt => ord == Less,
            CmpOp::Le => ord != Greater,
            CmpOp::Gt => ord == Greater,
            CmpOp::Ge => ord != Less,
        }
    }

    pub const ALL: [CmpOp; 6] = [CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge];
}

/// A literal as written. Quoted text is a string (or a timestamp, decided
/// against the column type at execution); bare digits are an integer.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Literal {
    Str(String),
    Int(i64),
}

/// A column reference in KQL: a physical field or an A-Expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnRef {
    Field(String),
    Address(AExpr),
}

/// A table reference in KQL: a physical table or a table selector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TableRef {
    Named(String),
    Address(AExpr),
}

pub type KqlQuery = Query<ColumnRef, TableRef>;

/// SQL over physical names only.
pub type PlainQuery = Query<String, String>;

impl<C, T> Query<C, T> {
    pub fn single(select: Select<C, T>) -> Self {
        Query { branches: vec![select] }
    }

    /// Rebuilds the tree with every leaf mapped.
    pub fn map<C2, T2>(self, fc: &mut impl FnMut(C) -> C2, ft: &mut impl FnMut(T) -> T2) -> Query<C2, T2> {
        Query {
            branches: self.branches.into_iter().map(|s| s.map(fc, ft)).collect(),
        }
    }
}

impl<C, T> Select<C, T> {
    pub fn map<C2, T2>(self, fc: &mut impl FnMut(C) -> C2, ft: &mut impl FnMut(T) -> T2) -> Select<C2, T2> {
        Select {
            distinct: self.distinct,
            projection: match self.projection {
                Projection::Star => Projection::Star,
                Projection::Columns(cols) => Projection::Columns(cols.into_iter().map(&mut *fc).collect()),
            },
            from: match self.from {
                FromItem::Table(t) => FromItem::Table(ft(t)),
                FromItem::Subquery { query, alias } => FromItem::Subquery {
                    query: Box::new(query.map(fc, ft)),
                    alias,
                },
            },
            selection: self.selection.map(|c| c.map(fc)),
        }
    }
}

impl PlainQuery {
    /// The same query as KQL with no A-Expressions.
    pub fn into_kql(self) -> KqlQuery {
        self.map(&mut ColumnRef::Field, &mut TableRef::Named)
    }
}

impl KqlQuery {
    /// `None` if any A-Expression remains.
    pub fn into_plain(self) -> Option<PlainQuery> {
        let plain = std::cell::Cell::new(true);
        let q = self.map(
            &mut |c| match c {
                ColumnRef::Field(f) => f,
                ColumnRef::Address(_) => {
                    plain.set(false);
                    String::new()
                }
            },
            &mut |t| match t {
                TableRef::Named(n) => n,
                TableRef::Address(_) => {
                    plain.set(false);
                    String::new()
                }
            },
        );
        plain.get().then_some(q)
    }
}

impl<C> Condition<C> {
    pub fn compare(operand: C, op: CmpOp, literal: Literal) -> Self {
        Condition::Compare(Comparison { operand, op, literal })
    }

    pub fn and(l: Condition<C>, r: Condition<C>) -> Self {
        Condition::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Condition<C>, r: Condition<C>) -> Self {
        Condition::Or(Box::new(l), Box::new(r))
    }

    pub fn negate(c: Condition<C>) -> Self {
        Condition::Not(Box::new(c))
    }

    pub fn paren(c: Condition<C>) -> Self {
        Condition::Paren(Box::new(c))
    }

    pub fn map<C2>(self, f: &mut impl FnMut(C) -> C2) -> Condition<C2> {
        match self {
            Condition::Compare(c) => Condition::Compare(Comparison {
                operand: f(c.operand),
                op: c.op,
                literal: c.literal,
            }),
            Condition::Not(c) => Condition::Not(Box::new(c.map(f))),
            Condition::Paren(c) => Condition::Paren(Box::new(c.map(f))),
            Condition::And(l, r) => Condition::And(Box::new(l.map(f)), Box::new(r.map(f))),
            Condition::Or(l, r) => Condition::Or(Box::new(l.map(f)), Box::new(r.map(f))),
        }
    }

    /// Comparisons left to right.
    pub fn comparisons(&self) -> Vec<&Comparison<C>> {
        let mut out = Vec::new();
        self.visit(&mut |c| out.push(c));
        out
    }

    fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Comparison<C>)) {
        match self {
            Condition::Compare(c) => f(c),
            Condition::Not(c) | Condition::Paren(c) => c.visit(f),
            Condition::And(l, r) | Condition::Or(l, r) => {
                l.visit(f);
                r.visit(f);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Condition::Or(..) => 1,
            Condition::And(..) => 2,
            Condition::Not(_) => 3,
            Condition::Compare(_) | Condition::Paren(_) => 4,
        }
    }
}

fn quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', "''"))
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Str(s) => f.write_str(&quote(s)),
            Literal::Int(i) => write!(f, "{i}"),
        }
    }
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for ColumnRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColumnRef::Field(name) => f.write_str(name),
            ColumnRef::Address(a) => write!(f, "{a}"),
        }
    }
}

impl fmt::Display for TableRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TableRef::Named(name) => f.write_str(name),
            TableRef::Address(a) => write!(f, "{a}"),
        }
    }
}

impl<C: fmt::Display> fmt::Display for Comparison<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.operand, self.op, self.literal)
    }
}

impl<C: fmt::Display> Condition<C> {
    // Trees from the parser never need the fallback parentheses; they only
    // guard hand-built trees against rendering into a different parse.
    fn fmt_child(&self, child: &Condition<C>, right: bool, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (p, c) = (self.precedence(), child.precedence());
        if c < p || (right && c == p && c < 3) {
            write!(f, "({child})")
        } else {
            write!(f, "{child}")
        }
    }
}

impl<C: fmt::Display> fmt::Display for Condition<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::Compare(c) => write!(f, "{c}"),
            Condition::Paren(c) => write!(f, "({c})"),
            Condition::Not(c) => {
                f.write_str("NOT ")?;
                self.fmt_child(c, false, f)
            }
            Condition::And(l, r) | Condition::Or(l, r) => {
                self.fmt_child(l, false, f)?;
                f.write_str(if matches!(self, Condition::And(..)) { " AND " } else { " OR " })?;
                self.fmt_child(r, true, f)
            }
        }
    }
}

impl<C: fmt::Display, T: fmt::Display> fmt::Display for Select<C, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SELECT ")?;
        if self.distinct {
            f.write_str("DISTINCT ")?;
        }
        match &self.projection {
            Projection::Star => f.write_str("*")?,
            Projection::Columns(cols) => {
                for (i, c) in cols.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{c}")?;
                }
            }
        }
        f.write_str(" FROM ")?;
        match &self.from {
            FromItem::Table(t) => write!(f, "{t}")?,
            FromItem::Subquery { query, alias } => write!(f, "({query}) AS {alias}")?,
        }
        if let Some(cond) = &self.selection {
            write!(f, " WHERE {cond}")?;
        }
        Ok(())
    }
}

impl<C: fmt::Display, T: fmt::Display> fmt::Display for Query<C, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.branches.iter().enumerate() {
            if i > 0 {
                f.write_str(" UNION ALL ")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cmp(name: &str, v: &str) -> Condition<String> {
        Condition::compare(name.to_string(), CmpOp::Eq, Literal::Str(v.into()))
    }

    #[test]
    fn renders_select_without_where() {
        let q: PlainQuery = Query::single(Select {
            distinct: false,
            projection: Projection::Columns(vec!["a".into(), "b".into()]),
            from: FromItem::Table("t".into()),
            selection: None,
        });
        assert_eq!(q.to_string(), "SELECT a, b FROM t");
    }

    #[test]
    fn escapes_quotes() {
        assert_eq!(Literal::Str("o'neil".into()).to_string(), "'o''neil'");
        assert_eq!(Literal::Int(-3).to_string(), "-3");
    }

    #[test]
    fn hand_built_trees_keep_their_meaning() {
        let c = Condition::and(Condition::or(cmp("a", "1"), cmp("b", "2")), cmp("c", "3"));
        assert_eq!(c.to_string(), "(a = '1' OR b = '2') AND c = '3'");
        let c = Condition::negate(Condition::and(cmp("a", "1"), cmp("b", "2")));
        assert_eq!(c.to_string(), "NOT (a = '1' AND b = '2')");
        let c = Condition::or(cmp("a", "1"), Condition::or(cmp("b", "2"), cmp("c", "3")));
        assert_eq!(c.to_string(), "a = '1' OR (b = '2' OR c = '3')");
    }

    #[test]
    fn negation_table_is_an_involution() {
        for op in CmpOp::ALL {
            assert_eq!(op.negate().negate(), op);
            for ord in [std::cmp::Ordering::Less, std::cmp::Ordering::Equal, std::cmp::Ordering::Greater] {
                assert_eq!(op.negate().holds(ord), !op.holds(ord));
            }
        }
    }
}
