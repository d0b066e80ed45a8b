use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

use super::eval::{find_difference, simplify};
use super::sort::DomainSpec;
use super::term::{Term, Valuation, Var};

/// A finite map from variables to terms.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Assignment(BTreeMap<Var, Term>);

impl Assignment {
    pub fn new() -> Self {
        Assignment(BTreeMap::new())
    }

    /// Inserts `var := term` after checking that the sorts agree.
    pub fn insert_checked(&mut self, var: Var, term: Term, d: &DomainSpec) -> Result<()> {
        let want = d.ty(var.sort())?;
        let found = term.type_of(d)?;
        if !want.compatible(&found) {
            return Err(Error::SortMismatch(format!(
                "cannot assign {found} to `{var}` of sort {}",
                var.sort()
            )));
        }
        self.0.insert(var, term);
        Ok(())
    }

    pub fn insert(&mut self, var: Var, term: Term) {
        self.0.insert(var, term);
    }

    pub fn get(&self, v: &Var) -> Option<&Term> {
        self.0.get(v)
    }

    pub fn contains(&self, v: &Var) -> bool {
        self.0.contains_key(v)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.0.iter()
    }

    pub fn map(&self) -> &BTreeMap<Var, Term> {
        &self.0
    }

    pub fn from_valuation(val: &Valuation) -> Self {
        Assignment(val.iter().map(|(k, v)| (k.clone(), Term::Const(v.clone()))).collect())
    }

    /// Applies `f` to every image.
    pub fn map_images(&self, mut f: impl FnMut(&Term) -> Term) -> Assignment {
        Assignment(self.0.iter().map(|(k, t)| (k.clone(), f(t))).collect())
    }

    /// Substitutes `other` into every image: `self[other]`.
    pub fn substitute(&self, other: &Assignment) -> Assignment {
        self.map_images(|t| t.substitute(&other.0))
    }

    /// Upshifts every image.
    pub fn upshift(&self) -> Assignment {
        self.map_images(Term::upshift)
    }

    /// Restricts the domain to the variables satisfying `keep`.
    pub fn restrict(&self, keep: impl Fn(&Var) -> bool) -> Assignment {
        Assignment(
            self.0
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, t)| (k.clone(), t.clone()))
                .collect(),
        )
    }

    /// Converts a ground assignment into the conjunction of its equalities.
    pub fn to_formula(&self) -> Result<Term> {
        let mut parts = Vec::new();
        for (k, t) in &self.0 {
            let t = simplify(t);
            if !t.is_ground() {
                return Err(Error::NonGroundImage(k.to_string()));
            }
            parts.push(Term::eq(Term::Var(k.clone()), t));
        }
        Ok(Term::and_all(parts))
    }

    /// Finds a shared variable whose images are not equivalent.
    pub fn incompatibility(&self, other: &Assignment, d: &DomainSpec) -> Result<Option<(Var, Valuation)>> {
        for (k, t) in &self.0 {
            if let Some(u) = other.0.get(k) {
                if let Some(w) = find_difference(t, u, d)? {
                    return Ok(Some((k.clone(), w)));
                }
            }
        }
        Ok(None)
    }

    /// Shared variables are mapped to equivalent terms.
    pub fn compatible(&self, other: &Assignment, d: &DomainSpec) -> Result<bool> {
        Ok(self.incompatibility(other, d)?.is_none())
    }

    /// Union keeping the left image on shared variables. Fails if incompatible.
    pub fn union(&self, other: &Assignment, d: &DomainSpec) -> Result<Assignment> {
        if let Some((v, w)) = self.incompatibility(other, d)? {
            return Err(Error::IncompatibleAssignments(format!(
                "`{v}` gets `{}` and `{}`, which differ at {}",
                self.0[&v],
                other.0[&v],
                show_valuation(&w)
            )));
        }
        let mut out = self.0.clone();
        for (k, t) in &other.0 {
            out.entry(k.clone()).or_insert_with(|| t.clone());
        }
        Ok(Assignment(out))
    }
}

impl FromIterator<(Var, Term)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (Var, Term)>>(iter: I) -> Self {
        Assignment(iter.into_iter().collect())
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        for (i, (k, t)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k} := {t}")?;
        }
        Ok(())
    }
}

/// Conjunction of `x == v` for every binding of the valuation.
pub fn valuation_formula(val: &Valuation) -> Term {
    Term::and_all(
        val.iter()
            .map(|(k, v)| Term::eq(Term::Var(k.clone()), Term::Const(v.clone()))),
    )
}

pub fn show_valuation(val: &Valuation) -> String {
    let parts: Vec<String> = val.iter().map(|(k, v)| format!("{k} = {v}")).collect();
    format!("{{{}}}", parts.join(", "))
}

/// Merges two valuations, keeping the left value on shared variables.
pub fn union_valuations(left: &Valuation, right: &Valuation) -> Valuation {
    let mut out = left.clone();
    for (k, v) in right {
        out.entry(k.clone()).or_insert_with(|| v.clone());
    }
    out
}
