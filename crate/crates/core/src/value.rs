//! Scalar values shared by the registry, the rewriter and the engine.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use chrono::{DateTime, FixedOffset};
use serde::{Deserialize, Serialize};

/// Declared type of a physical field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueType {
    String,
    Integer,
    Timestamp,
}

impl ValueType {
    pub fn as_str(self) -> &'static str {
        match self {
            ValueType::String => "string",
            ValueType::Integer => "integer",
            ValueType::Timestamp => "timestamp",
        }
    }
}

impl fmt::Display for ValueType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ValueType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "string" => Ok(ValueType::String),
            "integer" => Ok(ValueType::Integer),
            "timestamp" => Ok(ValueType::Timestamp),
            other => Err(format!("unknown value type {other:?}")),
        }
    }
}

const TIMESTAMP_FORMAT: &str = "%Y-%m-%d %H:%M:%S%:z";
const TIMESTAMP_LEN: usize = "YYYY-MM-DD HH:MM:SS+HH:MM".len();

/// A `YYYY-MM-DD HH:MM:SS±HH:MM` timestamp.
///
/// Ordering and [`Timestamp::instant_cmp`] compare UTC instants. Equality and
/// hashing are on the original text, which is what gets projected.
#[derive(Debug, Clone)]
pub struct Timestamp {
    text: String,
    instant: DateTime<FixedOffset>,
}

impl Timestamp {
    pub fn parse(text: &str) -> Option<Timestamp> {
        if text.len() != TIMESTAMP_LEN || !text.is_ascii() {
            return None;
        }
        let instant = DateTime::parse_from_str(text, TIMESTAMP_FORMAT).ok()?;
        Some(Timestamp {
            text: text.to_string(),
            instant,
        })
    }

    pub fn from_datetime(instant: DateTime<FixedOffset>) -> Timestamp {
        Timestamp {
            text: instant.format(TIMESTAMP_FORMAT).to_string(),
            instant,
        }
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn datetime(&self) -> DateTime<FixedOffset> {
        self.instant
    }

    pub fn epoch_seconds(&self) -> i64 {
        self.instant.timestamp()
    }

    pub fn instant_cmp(&self, other: &Timestamp) -> Ordering {
        self.instant.cmp(&other.instant)
    }
}

impl PartialEq for Timestamp {
    fn eq(&self, other: &Self) -> bool {
        self.text == other.text
    }
}

impl Eq for Timestamp {}

impl Hash for Timestamp {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.text.hash(state);
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// A single cell of a table or result set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Str(String),
    Int(i64),
    Ts(Timestamp),
}

impl Value {
    pub fn value_type(&self) -> ValueType {
        match self {
            Value::Str(_) => ValueType::String,
            Value::Int(_) => ValueType::Integer,
            Value::Ts(_) => ValueType::Timestamp,
        }
    }

    /// Compares two values of the same type: strings by code point,
    /// integers numerically, timestamps by UTC instant.
    pub fn compare(&self, other: &Value) -> Option<Ordering> {
        match (self, other) {
            (Value::Str(a), Value::Str(b)) => Some(a.cmp(b)),
            (Value::Int(a), Value::Int(b)) => Some(a.cmp(b)),
            (Value::Ts(a), Value::Ts(b)) => Some(a.instant_cmp(b)),
            _ => None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Str(s) => serde_json::Value::String(s.clone()),
            Value::Int(i) => serde_json::Value::from(*i),
            Value::Ts(t) => serde_json::Value::String(t.as_str().to_string()),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Str(s) => f.write_str(s),
            Value::Int(i) => write!(f, "{i}"),
            Value::Ts(t) => f.write_str(t.as_str()),
        }
    }
}
