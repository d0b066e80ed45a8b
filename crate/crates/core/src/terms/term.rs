use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};

use super::sort::{DomainSpec, Type, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarKind {
    Model,
    Context,
    Interaction,
}

impl VarKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VarKind::Model => "model",
            VarKind::Context => "context",
            VarKind::Interaction => "interaction",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub sort: String,
    pub kind: VarKind,
}

impl VarDecl {
    pub fn new(name: impl Into<String>, sort: impl Into<String>, kind: VarKind) -> Arc<Self> {
        Arc::new(VarDecl {
            name: name.into(),
            sort: sort.into(),
            kind,
        })
    }
}

/// A declared variable at some time index. Index 0 is the plain variable.
///
/// Identity is the pair (name, time index).
#[derive(Clone, Debug)]
pub struct Var {
    decl: Arc<VarDecl>,
    time: u32,
}

impl Var {
    pub fn new(decl: Arc<VarDecl>) -> Self {
        Var { decl, time: 0 }
    }

    pub fn at(decl: Arc<VarDecl>, time: u32) -> Self {
        Var { decl, time }
    }

    pub fn name(&self) -> &str {
        &self.decl.name
    }

    pub fn sort(&self) -> &str {
        &self.decl.sort
    }

    pub fn kind(&self) -> VarKind {
        self.decl.kind
    }

    pub fn time(&self) -> u32 {
        self.time
    }

    pub fn decl(&self) -> &Arc<VarDecl> {
        &self.decl
    }

    pub fn with_time(&self, time: u32) -> Var {
        Var {
            decl: self.decl.clone(),
            time,
        }
    }

    pub fn shifted(&self) -> Var {
        self.with_time(self.time + 1)
    }
}

impl PartialEq for Var {
    fn eq(&self, other: &Self) -> bool {
        self.time == other.time && self.decl.name == other.decl.name
    }
}

impl Eq for Var {}

impl Hash for Var {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.decl.name.hash(state);
        self.time.hash(state);
    }
}

impl PartialOrd for Var {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Var {
    fn cmp(&self, other: &Self) -> Ordering {
        self.decl.name.cmp(&other.decl.name).then(self.time.cmp(&other.time))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.time == 0 {
            write!(f, "{}", self.decl.name)
        } else {
            write!(f, "{}@{}", self.decl.name, self.time)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    And,
    Or,
    Implies,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::And => "&&",
            BinOp::Or => "||",
            BinOp::Implies => "=>",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Add => "+",
            BinOp::Sub => "-",
        }
    }
}

/// A typed first-order term.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Const(Value),
    Var(Var),
    Not(Box<Term>),
    Bin(BinOp, Box<Term>, Box<Term>),
    Contains(Box<Term>, Box<Term>),
}

/// Valuation of variables.
pub type Valuation = BTreeMap<Var, Value>;

impl Term {
    pub fn tt() -> Term {
        Term::Const(Value::Bool(true))
    }

    pub fn ff() -> Term {
        Term::Const(Value::Bool(false))
    }

    pub fn var(v: Var) -> Term {
        Term::Var(v)
    }

    pub fn int(i: i64) -> Term {
        Term::Const(Value::Int(i))
    }

    pub fn bin(op: BinOp, a: Term, b: Term) -> Term {
        Term::Bin(op, Box::new(a), Box::new(b))
    }

    pub fn eq(a: Term, b: Term) -> Term {
        Term::bin(BinOp::Eq, a, b)
    }

    pub fn and(a: Term, b: Term) -> Term {
        Term::bin(BinOp::And, a, b)
    }

    pub fn or(a: Term, b: Term) -> Term {
        Term::bin(BinOp::Or, a, b)
    }

    pub fn implies(a: Term, b: Term) -> Term {
        Term::bin(BinOp::Implies, a, b)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Term) -> Term {
        Term::Not(Box::new(a))
    }

    pub fn contains(list: Term, elem: Term) -> Term {
        Term::Contains(Box::new(list), Box::new(elem))
    }

    /// Left-nested conjunction; `true` when empty.
    pub fn and_all(items: impl IntoIterator<Item = Term>) -> Term {
        items.into_iter().reduce(Term::and).unwrap_or_else(Term::tt)
    }

    /// Left-nested disjunction; `false` when empty.
    pub fn or_all(items: impl IntoIterator<Item = Term>) -> Term {
        items.into_iter().reduce(Term::or).unwrap_or_else(Term::ff)
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Term::Const(Value::Bool(true)))
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Term::Const(Value::Bool(false)))
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Const(_) => {}
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Not(a) => a.collect_vars(out),
            Term::Bin(_, a, b) | Term::Contains(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Const(_) => true,
            Term::Var(_) => false,
            Term::Not(a) => a.is_ground(),
            Term::Bin(_, a, b) | Term::Contains(a, b) => a.is_ground() && b.is_ground(),
        }
    }

    /// Rebuilds the term, replacing every variable through `f`.
    pub fn map_vars(&self, f: &mut impl FnMut(&Var) -> Term) -> Term {
        match self {
            Term::Const(c) => Term::Const(c.clone()),
            Term::Var(v) => f(v),
            Term::Not(a) => Term::Not(Box::new(a.map_vars(f))),
            Term::Bin(op, a, b) => Term::Bin(*op, Box::new(a.map_vars(f)), Box::new(b.map_vars(f))),
            Term::Contains(a, b) => Term::Contains(Box::new(a.map_vars(f)), Box::new(b.map_vars(f))),
        }
    }

    /// Simultaneous substitution: images are not rewritten again.
    pub fn substitute(&self, a: &BTreeMap<Var, Term>) -> Term {
        self.map_vars(&mut |v| a.get(v).cloned().unwrap_or_else(|| Term::Var(v.clone())))
    }

    /// Increments the time index of every variable.
    pub fn upshift(&self) -> Term {
        self.map_vars(&mut |v| Term::Var(v.shifted()))
    }

    /// Increments the time index of variables whose base name is in `names`.
    pub fn upshift_vars(&self, names: &BTreeSet<String>) -> Term {
        self.map_vars(&mut |v| {
            if names.contains(v.name()) {
                Term::Var(v.shifted())
            } else {
                Term::Var(v.clone())
            }
        })
    }

    /// Infers the type of the term, checking operator argument sorts.
    pub fn type_of(&self, d: &DomainSpec) -> Result<Type> {
        match self {
            Term::Const(v) => Ok(v.ty()),
            Term::Var(v) => d.ty(v.sort()),
            Term::Not(a) => {
                expect(&a.type_of(d)?, &Type::Bool, self)?;
                Ok(Type::Bool)
            }
            Term::Bin(op, a, b) => {
                let ta = a.type_of(d)?;
                let tb = b.type_of(d)?;
                match op {
                    BinOp::And | BinOp::Or | BinOp::Implies => {
                        expect(&ta, &Type::Bool, self)?;
                        expect(&tb, &Type::Bool, self)?;
                        Ok(Type::Bool)
                    }
                    BinOp::Eq | BinOp::Ne => {
                        expect(&tb, &ta, self)?;
                        Ok(Type::Bool)
                    }
                    BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
                        expect(&ta, &Type::Int, self)?;
                        expect(&tb, &Type::Int, self)?;
                        Ok(Type::Bool)
                    }
                    BinOp::Add | BinOp::Sub => {
                        expect(&ta, &Type::Int, self)?;
                        expect(&tb, &Type::Int, self)?;
                        Ok(Type::Int)
                    }
                }
            }
            Term::Contains(l, e) => {
                let tl = l.type_of(d)?;
                let te = e.type_of(d)?;
                match tl {
                    Type::List(inner) => {
                        expect(&te, &inner, self)?;
                        Ok(Type::Bool)
                    }
                    Type::Unknown => Ok(Type::Bool),
                    other => Err(Error::SortMismatch(format!(
                        "`contains` expects a list, found {other} in `{self}`"
                    ))),
                }
            }
        }
    }

    /// Checks that the term is a well-sorted boolean.
    pub fn check_bool(&self, d: &DomainSpec) -> Result<()> {
        let t = self.type_of(d)?;
        expect(&t, &Type::Bool, self)
    }
}

fn expect(found: &Type, want: &Type, t: &Term) -> Result<()> {
    if found.compatible(want) {
        Ok(())
    } else {
        Err(Error::SortMismatch(format!("expected {want}, found {found} in `{t}`")))
    }
}

pub(crate) fn prec(t: &Term) -> u8 {
    match t {
        Term::Bin(BinOp::Implies, ..) => 1,
        Term::Bin(BinOp::Or, ..) => 2,
        Term::Bin(BinOp::And, ..) => 3,
        Term::Bin(BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge, ..) => 4,
        Term::Bin(BinOp::Add | BinOp::Sub, ..) => 5,
        Term::Not(_) => 6,
        Term::Const(Value::Int(i)) if *i < 0 => 6,
        _ => 7,
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn wrap(f: &mut fmt::Formatter<'_>, t: &Term, paren: bool) -> fmt::Result {
            if paren {
                write!(f, "({t})")
            } else {
                write!(f, "{t}")
            }
        }
        match self {
            Term::Const(v) => write!(f, "{v}"),
            Term::Var(v) => write!(f, "{v}"),
            Term::Not(a) => {
                write!(f, "!")?;
                wrap(f, a, prec(a) < 6)
            }
            Term::Contains(l, e) => write!(f, "contains({l}, {e})"),
            Term::Bin(op, a, b) => {
                let p = prec(self);
                let (lp, rp) = match op {
                    // right associative
                    BinOp::Implies => (prec(a) <= p, prec(b) < p),
                    // non associative
                    BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
                        (prec(a) <= p, prec(b) <= p)
                    }
                    _ => (prec(a) < p, prec(b) <= p),
                };
                wrap(f, a, lp)?;
                write!(f, " {} ", op.symbol())?;
                wrap(f, b, rp)
            }
        }
    }
}
