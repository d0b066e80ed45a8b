use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Default upper bound on the number of valuations an exhaustive check may visit.
pub const DEFAULT_VALUATION_CAP: u64 = 1_000_000;

/// A ground value of some finite sort.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Enum { sort: Arc<str>, variant: Arc<str> },
    List(Vec<Value>),
}

impl Value {
    pub fn enum_value(sort: &str, variant: &str) -> Value {
        Value::Enum {
            sort: Arc::from(sort),
            variant: Arc::from(variant),
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    /// The type of the value. Empty lists get an unknown element type.
    pub fn ty(&self) -> Type {
        match self {
            Value::Bool(_) => Type::Bool,
            Value::Int(_) => Type::Int,
            Value::Enum { sort, .. } => Type::Enum(sort.clone()),
            Value::List(items) => Type::List(Box::new(items.first().map(Value::ty).unwrap_or(Type::Unknown))),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Enum { sort, variant } => write!(f, "{sort}::{variant}"),
            Value::List(items) => {
                write!(f, "[")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, "]")
            }
        }
    }
}

/// Structural type used for sort checking. All bounded integer sorts share `Int`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Type {
    Bool,
    Int,
    Enum(Arc<str>),
    List(Box<Type>),
    Unknown,
}

impl Type {
    pub fn compatible(&self, other: &Type) -> bool {
        match (self, other) {
            (Type::Unknown, _) | (_, Type::Unknown) => true,
            (Type::List(a), Type::List(b)) => a.compatible(b),
            (a, b) => a == b,
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Bool => write!(f, "bool"),
            Type::Int => write!(f, "int"),
            Type::Enum(s) => write!(f, "{s}"),
            Type::List(e) => write!(f, "list<{e}>"),
            Type::Unknown => write!(f, "?"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SortKind {
    Bool,
    Int { lo: i64, hi: i64 },
    Enum { values: Vec<String> },
    List { elem: String, max_len: usize },
}

/// A named finite sort.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sort {
    pub name: String,
    pub kind: SortKind,
}

impl Sort {
    pub fn new(name: impl Into<String>, kind: SortKind) -> Self {
        Sort {
            name: name.into(),
            kind,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SortEntry {
    pub sort: Sort,
    pub ty: Type,
    pub universe: Vec<Value>,
}

/// Finite universes for every sort in use, plus the enumeration cap.
#[derive(Clone, Debug)]
pub struct DomainSpec {
    sorts: BTreeMap<String, SortEntry>,
    cap: u64,
}

pub const BOOL_SORT: &str = "Bool";

impl DomainSpec {
    /// Builds universes for the given sorts. `Bool` is always available.
    pub fn new(sorts: &[Sort]) -> Result<Self> {
        let mut declared: BTreeMap<String, Sort> = BTreeMap::new();
        for s in sorts {
            if s.name == BOOL_SORT && s.kind == SortKind::Bool {
                continue;
            }
            if s.name == BOOL_SORT || declared.insert(s.name.clone(), s.clone()).is_some() {
                return Err(Error::InvalidModel(format!("duplicate sort `{}`", s.name)));
            }
        }
        declared.insert(BOOL_SORT.to_string(), Sort::new(BOOL_SORT, SortKind::Bool));
        let mut out = DomainSpec {
            sorts: BTreeMap::new(),
            cap: DEFAULT_VALUATION_CAP,
        };
        let names: Vec<String> = declared.keys().cloned().collect();
        for name in names {
            out.resolve(&name, &declared, &mut Vec::new())?;
        }
        Ok(out)
    }

    fn resolve(&mut self, name: &str, declared: &BTreeMap<String, Sort>, stack: &mut Vec<String>) -> Result<()> {
        if self.sorts.contains_key(name) {
            return Ok(());
        }
        if stack.iter().any(|s| s == name) {
            return Err(Error::InvalidModel(format!("cyclic sort `{name}`")));
        }
        let sort = declared
            .get(name)
            .ok_or_else(|| Error::UnknownSort(name.to_string()))?
            .clone();
        let (ty, universe) = match &sort.kind {
            SortKind::Bool => (Type::Bool, vec![Value::Bool(false), Value::Bool(true)]),
            SortKind::Int { lo, hi } => {
                if lo > hi || (*hi as i128 - *lo as i128) >= self.cap as i128 {
                    return Err(Error::InvalidModel(format!("bad int range in `{name}`")));
                }
                (Type::Int, (*lo..=*hi).map(Value::Int).collect())
            }
            SortKind::Enum { values } => {
                if values.is_empty() {
                    return Err(Error::InvalidModel(format!("empty enum `{name}`")));
                }
                let tag: Arc<str> = Arc::from(name);
                let universe = values
                    .iter()
                    .map(|v| Value::Enum {
                        sort: tag.clone(),
                        variant: Arc::from(v.as_str()),
                    })
                    .collect();
                (Type::Enum(tag), universe)
            }
            SortKind::List { elem, max_len } => {
                stack.push(name.to_string());
                self.resolve(elem, declared, stack)?;
                stack.pop();
                let entry = &self.sorts[elem];
                let base = entry.universe.len() as u128;
                let count: u128 = (0..=*max_len as u32).map(|k| base.pow(k)).sum();
                if count > self.cap as u128 {
                    return Err(Error::DomainTooLarge {
                        valuations: count,
                        cap: self.cap,
                    });
                }
                let mut universe = vec![Value::List(Vec::new())];
                let mut layer: Vec<Vec<Value>> = vec![Vec::new()];
                for _ in 0..*max_len {
                    let mut next = Vec::new();
                    for prefix in &layer {
                        for e in &entry.universe {
                            let mut l = prefix.clone();
                            l.push(e.clone());
                            next.push(l);
                        }
                    }
                    universe.extend(next.iter().cloned().map(Value::List));
                    layer = next;
                }
                (Type::List(Box::new(entry.ty.clone())), universe)
            }
        };
        self.sorts.insert(name.to_string(), SortEntry { sort, ty, universe });
        Ok(())
    }

    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn get(&self, sort: &str) -> Result<&SortEntry> {
        self.sorts.get(sort).ok_or_else(|| Error::UnknownSort(sort.to_string()))
    }

    pub fn universe(&self, sort: &str) -> Result<&[Value]> {
        Ok(&self.get(sort)?.universe)
    }

    pub fn ty(&self, sort: &str) -> Result<Type> {
        Ok(self.get(sort)?.ty.clone())
    }

    /// Declared sorts, excluding the implicit `Bool`.
    pub fn sorts(&self) -> impl Iterator<Item = &Sort> {
        self.sorts.values().map(|e| &e.sort)
    }

    pub fn contains(&self, sort: &str, v: &Value) -> bool {
        self.get(sort).map(|e| e.universe.contains(v)).unwrap_or(false)
    }

    /// Looks up an enum sort that has the given variant.
    pub fn enum_has_variant(&self, sort: &str, variant: &str) -> bool {
        matches!(self.sorts.get(sort), Some(SortEntry { sort: Sort { kind: SortKind::Enum { values }, .. }, .. }) if values.iter().any(|v| v == variant))
    }
}
