//! The Knowledge Registry: Dimensions, Tags, DimensionSets and the bindings
//! of physical fields to Address Tuples.
//!
//! A registry is loaded from JSON, validated for referential closure, and is
//! immutable afterwards. [`Registry::mutate_tags`] returns a new registry.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use indexmap::{IndexMap, IndexSet};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::value::ValueType;

/// Name of the default TagScheme.
pub const DEFAULT_SCHEME: &str = "_";

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("E_IO: {path}: {message}")]
    Io { path: String, message: String },
    #[error("E_PARSE: {0}")]
    Parse(String),
    #[error("E_SCHEMA: {0}")]
    Schema(String),
    #[error("E_REF: {0}")]
    Ref(String),
    #[error("E_DUP: {0}")]
    Dup(String),
    #[error("E_UNBOUND: {table}.{field} has no dimension; tags require an address tuple")]
    Unbound { table: String, field: String },
}

impl RegistryError {
    pub fn code(&self) -> &'static str {
        match self {
            RegistryError::Io { .. } => "E_IO",
            RegistryError::Parse(_) => "E_PARSE",
            RegistryError::Schema(_) => "E_SCHEMA",
            RegistryError::Ref(_) => "E_REF",
            RegistryError::Dup(_) => "E_DUP",
            RegistryError::Unbound { .. } => "E_UNBOUND",
        }
    }
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A `(scheme, name)` reference to a declared Tag, written `scheme:name`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TagRef {
    pub scheme: String,
    pub name: String,
}

impl TagRef {
    pub fn new(scheme: impl Into<String>, name: impl Into<String>) -> Self {
        TagRef {
            scheme: scheme.into(),
            name: name.into(),
        }
    }

    /// A tag in the default `_` scheme.
    pub fn default_scheme(name: impl Into<String>) -> Self {
        TagRef::new(DEFAULT_SCHEME, name)
    }
}

impl fmt::Display for TagRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.scheme, self.name)
    }
}

impl FromStr for TagRef {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once(':') {
            Some((scheme, name)) if is_identifier(scheme) && is_identifier(name) => Ok(TagRef::new(scheme, name)),
            _ => Err(format!("malformed tag reference {s:?}, expected scheme:name")),
        }
    }
}

/// `<D, S>`: a Dimension paired with a (possibly empty) set of Tags.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AddressTuple {
    pub dimension: String,
    pub tags: BTreeSet<TagRef>,
}

impl AddressTuple {
    pub fn new(dimension: impl Into<String>, tags: impl IntoIterator<Item = TagRef>) -> Self {
        AddressTuple {
            dimension: dimension.into(),
            tags: tags.into_iter().collect(),
        }
    }

    /// True when this (field) address has the queried dimension and carries
    /// every queried tag.
    pub fn satisfies(&self, query: &AddressTuple) -> bool {
        self.dimension == query.dimension && query.tags.is_subset(&self.tags)
    }
}

impl fmt::Display for AddressTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}, {{", self.dimension)?;
        for (i, t) in self.tags.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str("}>")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dimension {
    pub name: String,
    pub description: Option<String>,
    pub values: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimensionSet {
    pub name: String,
    pub dimensions: IndexSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldBinding {
    pub table: String,
    pub field: String,
    pub address: Option<AddressTuple>,
    pub value_type: ValueType,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableDef {
    pub name: String,
    pub fields: Vec<FieldBinding>,
}

impl TableDef {
    pub fn field(&self, name: &str) -> Option<&FieldBinding> {
        self.fields.iter().find(|f| f.field == name)
    }

    /// Dimensions carried by this table's bound fields.
    pub fn dimensions(&self) -> BTreeSet<&str> {
        self.fields
            .iter()
            .filter_map(|f| f.address.as_ref().map(|a| a.dimension.as_str()))
            .collect()
    }
}

/// A physical `(table, field)` pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldRef {
    pub table: String,
    pub field: String,
}

impl FieldRef {
    pub fn new(table: impl Into<String>, field: impl Into<String>) -> Self {
        FieldRef {
            table: table.into(),
            field: field.into(),
        }
    }
}

impl fmt::Display for FieldRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.table, self.field)
    }
}

/// `ALL` tables, or one named table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scope {
    All,
    Table(String),
}

impl Scope {
    pub fn includes(&self, table: &str) -> bool {
        match self {
            Scope::All => true,
            Scope::Table(t) => t == table,
        }
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::All => f.write_str("ALL"),
            Scope::Table(t) => f.write_str(t),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub dimensions: usize,
    pub tags: usize,
    pub dimension_sets: usize,
    pub tables: usize,
    pub fields: usize,
    pub bound_fields: usize,
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} dimensions, {} tags, {} dimension sets, {} tables, {} fields, {} fields bound",
            self.dimensions, self.tags, self.dimension_sets, self.tables, self.fields, self.bound_fields
        )
    }
}

// On-disk representation.

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegistryFile {
    dimensions: Vec<DimensionFile>,
    tags: Vec<TagFile>,
    dimension_sets: Vec<DimensionSetFile>,
    tables: Vec<TableFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DimensionFile {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    values: Option<Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TagFile {
    scheme: String,
    name: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DimensionSetFile {
    name: String,
    dimensions: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableFile {
    name: String,
    fields: Vec<FieldFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldFile {
    name: String,
    #[serde(rename = "type")]
    value_type: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dimension: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tags: Option<Vec<String>>,
}

fn check_ident(kind: &str, name: &str) -> Result<(), RegistryError> {
    if is_identifier(name) {
        Ok(())
    } else {
        Err(RegistryError::Schema(format!("{kind} name {name:?} is not an identifier")))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Registry {
    dimensions: IndexMap<String, Dimension>,
    tags: IndexSet<TagRef>,
    dimension_sets: IndexMap<String, DimensionSet>,
    tables: IndexMap<String, TableDef>,
}

impl Registry {
    /// Parses and validates a registry from JSON text.
    pub fn from_json(text: &str) -> Result<Registry, RegistryError> {
        let raw: serde_json::Value = serde_json::from_str(text).map_err(|e| RegistryError::Parse(e.to_string()))?;
        let file: RegistryFile = serde_json::from_value(raw).map_err(|e| RegistryError::Schema(e.to_string()))?;
        Registry::from_file(file)
    }

    pub fn from_reader(mut reader: impl std::io::Read) -> Result<Registry, RegistryError> {
        let mut text = String::new();
        reader.read_to_string(&mut text).map_err(|e| RegistryError::Parse(e.to_string()))?;
        Registry::from_json(&text)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Registry, RegistryError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| RegistryError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Registry::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), RegistryError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| RegistryError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }

    fn from_file(file: RegistryFile) -> Result<Registry, RegistryError> {
        let mut reg = Registry::default();

        for d in file.dimensions {
            check_ident("dimension", &d.name)?;
            if reg.dimensions.contains_key(&d.name) {
                return Err(RegistryError::Dup(format!("dimension {:?} declared twice", d.name)));
            }
            reg.dimensions.insert(
                d.name.clone(),
                Dimension {
                    name: d.name,
                    description: d.description,
                    values: d.values,
                },
            );
        }

        for t in file.tags {
            check_ident("tag scheme", &t.scheme)?;
            check_ident("tag", &t.name)?;
            let tag = TagRef::new(t.scheme, t.name);
            if !reg.tags.insert(tag.clone()) {
                return Err(RegistryError::Dup(format!("tag {tag} declared twice")));
            }
        }

        for ds in file.dimension_sets {
            check_ident("dimension set", &ds.name)?;
            if ds.dimensions.is_empty() {
                return Err(RegistryError::Schema(format!("dimension set {:?} is empty", ds.name)));
            }
            if reg.dimension_sets.contains_key(&ds.name) {
                return Err(RegistryError::Dup(format!("dimension set {:?} declared twice", ds.name)));
            }
            let mut members = IndexSet::new();
            for d in ds.dimensions {
                if !reg.dimensions.contains_key(&d) {
                    return Err(RegistryError::Ref(format!(
                        "dimension set {:?} references undeclared dimension {d:?}",
                        ds.name
                    )));
                }
                if !members.insert(d.clone()) {
                    return Err(RegistryError::Dup(format!("dimension set {:?} lists {d:?} twice", ds.name)));
                }
            }
            reg.dimension_sets.insert(
                ds.name.clone(),
                DimensionSet {
                    name: ds.name,
                    dimensions: members,
                },
            );
        }

        for t in file.tables {
            check_ident("table", &t.name)?;
            if reg.tables.contains_key(&t.name) {
                return Err(RegistryError::Dup(format!("table {:?} declared twice", t.name)));
            }
            let mut fields: Vec<FieldBinding> = Vec::with_capacity(t.fields.len());
            for f in t.fields {
                check_ident("field", &f.name)?;
                if fields.iter().any(|b| b.field == f.name) {
                    return Err(RegistryError::Dup(format!("field {}.{} declared twice", t.name, f.name)));
                }
                let value_type = f
                    .value_type
                    .parse::<ValueType>()
                    .map_err(|e| RegistryError::Schema(format!("field {}.{}: {e}", t.name, f.name)))?;
                let address = match (f.dimension, f.tags) {
                    (None, None) => None,
                    (None, Some(_)) => {
                        return Err(RegistryError::Schema(format!(
                            "field {}.{} has tags but no dimension",
                            t.name, f.name
                        )))
                    }
                    (Some(dim), tags) => {
                        let mut set = BTreeSet::new();
                        for raw in tags.unwrap_or_default() {
                            let tag: TagRef = raw
                                .parse()
                                .map_err(|e| RegistryError::Schema(format!("field {}.{}: {e}", t.name, f.name)))?;
                            if !set.insert(tag.clone()) {
                                return Err(RegistryError::Dup(format!(
                                    "field {}.{} lists tag {tag} twice",
                                    t.name, f.name
                                )));
                            }
                        }
                        let address = AddressTuple { dimension: dim, tags: set };
                        reg.check_address(&address)
                            .map_err(|e| RegistryError::Ref(format!("field {}.{}: {e}", t.name, f.name)))?;
                        Some(address)
                    }
                };
                fields.push(FieldBinding {
                    table: t.name.clone(),
                    field: f.name,
                    address,
                    value_type,
                });
            }
            reg.tables.insert(t.name.clone(), TableDef { name: t.name, fields });
        }

        Ok(reg)
    }

    /// Canonical pretty-printed JSON: declaration order everywhere, field
    /// tags sorted, absent optionals omitted.
    pub fn to_json(&self) -> String {
        let file = RegistryFile {
            dimensions: self
                .dimensions
                .values()
                .map(|d| DimensionFile {
                    name: d.name.clone(),
                    description: d.description.clone(),
                    values: d.values.clone(),
                })
                .collect(),
            tags: self
                .tags
                .iter()
                .map(|t| TagFile {
                    scheme: t.scheme.clone(),
                    name: t.name.clone(),
                })
                .collect(),
            dimension_sets: self
                .dimension_sets
                .values()
                .map(|ds| DimensionSetFile {
                    name: ds.name.clone(),
                    dimensions: ds.dimensions.iter().cloned().collect(),
                })
                .collect(),
            tables: self
                .tables
                .values()
                .map(|t| TableFile {
                    name: t.name.clone(),
                    fields: t
                        .fields
                        .iter()
                        .map(|f| FieldFile {
                            name: f.field.clone(),
                            value_type: f.value_type.as_str().to_string(),
                            dimension: f.address.as_ref().map(|a| a.dimension.clone()),
                            tags: f
                                .address
                                .as_ref()
                                .filter(|a| !a.tags.is_empty())
                                .map(|a| a.tags.iter().map(|t| t.to_string()).collect()),
                        })
                        .collect(),
                })
                .collect(),
        };
        let mut out = serde_json::to_string_pretty(&file).expect("registry serializes");
        out.push('\n');
        out
    }

    fn check_address(&self, address: &AddressTuple) -> Result<(), String> {
        if !self.dimensions.contains_key(&address.dimension) {
            return Err(format!("undeclared dimension {:?}", address.dimension));
        }
        if let Some(tag) = address.tags.iter().find(|t| !self.tags.contains(*t)) {
            return Err(format!("undeclared tag {tag}"));
        }
        Ok(())
    }

    fn check_scope(&self, scope: &Scope) -> Result<(), RegistryError> {
        match scope {
            Scope::Table(t) if !self.tables.contains_key(t) => Err(RegistryError::Ref(format!("undeclared table {t:?}"))),
            _ => Ok(()),
        }
    }

    pub fn dimension(&self, name: &str) -> Option<&Dimension> {
        self.dimensions.get(name)
    }

    pub fn dimensions(&self) -> impl Iterator<Item = &Dimension> {
        self.dimensions.values()
    }

    pub fn has_tag(&self, tag: &TagRef) -> bool {
        self.tags.contains(tag)
    }

    pub fn tags(&self) -> impl Iterator<Item = &TagRef> {
        self.tags.iter()
    }

    pub fn dimension_set(&self, name: &str) -> Option<&DimensionSet> {
        self.dimension_sets.get(name)
    }

    pub fn dimension_sets(&self) -> impl Iterator<Item = &DimensionSet> {
        self.dimension_sets.values()
    }

    pub fn table(&self, name: &str) -> Option<&TableDef> {
        self.tables.get(name)
    }

    pub fn tables(&self) -> impl Iterator<Item = &TableDef> {
        self.tables.values()
    }

    pub fn binding(&self, table: &str, field: &str) -> Option<&FieldBinding> {
        self.tables.get(table).and_then(|t| t.field(field))
    }

    /// Every field binding, in table then field declaration order.
    pub fn bindings(&self) -> impl Iterator<Item = &FieldBinding> {
        self.tables.values().flat_map(|t| t.fields.iter())
    }

    pub fn summary(&self) -> Summary {
        Summary {
            dimensions: self.dimensions.len(),
            tags: self.tags.len(),
            dimension_sets: self.dimension_sets.len(),
            tables: self.tables.len(),
            fields: self.bindings().count(),
            bound_fields: self.bindings().filter(|b| b.address.is_some()).count(),
        }
    }

    /// Fields in `scope` whose address has `addr.dimension` and a superset of
    /// `addr.tags`.
    pub fn resolve_fields(&self, scope: &Scope, addr: &AddressTuple) -> Result<Vec<FieldRef>, RegistryError> {
        self.check_scope(scope)?;
        self.check_address(addr).map_err(RegistryError::Ref)?;
        Ok(self
            .bindings()
            .filter(|b| scope.includes(&b.table))
            .filter(|b| b.address.as_ref().is_some_and(|a| a.satisfies(addr)))
            .map(|b| FieldRef::new(&b.table, &b.field))
            .collect())
    }

    fn require_dimension_set(&self, name: &str) -> Result<&DimensionSet, RegistryError> {
        self.dimension_sets
            .get(name)
            .ok_or_else(|| RegistryError::Ref(format!("undeclared dimension set {name:?}")))
    }

    /// Tables carrying every Dimension of the DimensionSet.
    pub fn resolve_tables(&self, ds_name: &str) -> Result<Vec<String>, RegistryError> {
        let ds = self.require_dimension_set(ds_name)?;
        Ok(self
            .tables
            .values()
            .filter(|t| {
                let dims = t.dimensions();
                ds.dimensions.iter().all(|d| dims.contains(d.as_str()))
            })
            .map(|t| t.name.clone())
            .collect())
    }

    /// Fields in `scope` whose dimension is any member of the DimensionSet.
    pub fn expand_dimension_set(&self, scope: &Scope, ds_name: &str) -> Result<Vec<FieldRef>, RegistryError> {
        self.check_scope(scope)?;
        let ds = self.require_dimension_set(ds_name)?;
        Ok(self
            .bindings()
            .filter(|b| scope.includes(&b.table))
            .filter(|b| b.address.as_ref().is_some_and(|a| ds.dimensions.contains(&a.dimension)))
            .map(|b| FieldRef::new(&b.table, &b.field))
            .collect())
    }

    /// Returns a copy whose binding for `table.field` carries
    /// `(old ∪ add) \ remove`. `self` is left untouched.
    pub fn mutate_tags(&self, table: &str, field: &str, add: &[TagRef], remove: &[TagRef]) -> Result<Registry, RegistryError> {
        if let Some(tag) = add.iter().chain(remove).find(|t| !self.tags.contains(*t)) {
            return Err(RegistryError::Ref(format!("undeclared tag {tag}")));
        }
        let binding = self
            .binding(table, field)
            .ok_or_else(|| RegistryError::Ref(format!("no field {table}.{field}")))?;
        if binding.address.is_none() {
            return Err(RegistryError::Unbound {
                table: table.to_string(),
                field: field.to_string(),
            });
        }

        let mut next = self.clone();
        let binding = next
            .tables
            .get_mut(table)
            .and_then(|t| t.fields.iter_mut().find(|f| f.field == field))
            .expect("binding exists");
        let address = binding.address.as_mut().expect("bound");
        address.tags.extend(add.iter().cloned());
        for t in remove {
            address.tags.remove(t);
        }
        Ok(next)
    }
}
