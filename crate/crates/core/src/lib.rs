//! Knowledge Query Language (KQL).
//!
//! SQL queries may embed *A-Expressions*, ontological addresses that name
//! data by Dimension, Tags and DimensionSets instead of physical tables and
//! fields. This crate parses such queries, resolves every A-Expression
//! against a [`Registry`], renders the resulting plain SQL, emits an
//! equivalent MongoDB shell query, and executes either form against an
//! in-memory engine.
//!
//! ```
//! use kql_core::{fixtures, parse_kql, rewrite};
//!
//! let registry = fixtures::email_registry();
//! let kql = parse_kql(
//!     "SELECT DISTINCT ALL*email_address*_:source FROM ALL/emailmessage \
//!      WHERE ( ALL*folder = 'sent_items' OR ALL*folder = 'sent')",
//! )
//! .unwrap();
//! let sql = rewrite(&kql, &registry).unwrap();
//! assert_eq!(
//!     sql.to_string(),
//!     "SELECT DISTINCT sender_address FROM email_message_table \
//!      WHERE (message_folder = 'sent_items' OR message_folder = 'sent')"
//! );
//! ```

pub mod aexpr;
pub mod ast;
pub mod engine;
pub mod fixtures;
pub mod mongo;
pub mod parser;
pub mod registry;
pub mod rewriter;
pub mod value;

pub use aexpr::{parse_aexpr, AExpr, AExprError, Scope, Selector};
pub use ast::{CmpOp, ColumnRef, Comparison, Condition, FromItem, KqlQuery, Literal, PlainQuery, Projection, Query, Select, TableRef};
pub use engine::{execute, execute_mongo, load_table, Database, EngineError, ResultSet, Table};
pub use mongo::{emit, EmitError, Filter, MongoQueryDoc, Verb};
pub use parser::{extract_aexprs, parse_kql, ClausePosition, ParseError};
pub use registry::{AddressTuple, FieldRef, Registry, RegistryError, TagRef};
pub use rewriter::{rewrite, Provenance, RewriteError, SqlQuery, TimeBound};
pub use value::{Timestamp, Value, ValueType};
