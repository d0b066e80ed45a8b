//! Concrete semantics: gate values, the derived STS, its bounded LTS, test
//! cases, verdicts and a simulated system under test.

mod lts;
mod sts;
mod sut;

use std::fmt;

use crate::error::{Error, Result};
use crate::model::Bddts;
use crate::terms::{DomainSpec, Valuation, Value};

pub use lts::{
    derive_test_case, interpret, verdict, Lts, State, TestCase, Transition, Verdict, VerdictKind, DEFAULT_MAX_DEPTH,
};
pub use sts::{derive_sts, DerivedSts};
pub use sut::{run_against_sut, Run, Sut};

/// A gate together with concrete values for its interaction variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GateValue {
    pub gate: String,
    pub values: Vec<Value>,
}

impl fmt::Display for GateValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.gate)?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// All gate values of one gate, in lexicographic order of the universes.
pub fn gate_values(b: &Bddts, gate: &str, d: &DomainSpec) -> Result<Vec<GateValue>> {
    let g = b
        .gate(gate)
        .ok_or_else(|| Error::InvalidModel(format!("unknown gate `{gate}`")))?;
    let mut out: Vec<Vec<Value>> = vec![Vec::new()];
    for p in &g.params {
        let u = d.universe(p.sort())?;
        let count = out.len() as u128 * u.len() as u128;
        if count > d.cap() as u128 {
            return Err(Error::DomainTooLarge {
                valuations: count,
                cap: d.cap(),
            });
        }
        out = out
            .into_iter()
            .flat_map(|prefix| {
                u.iter().map(move |x| {
                    let mut p = prefix.clone();
                    p.push(x.clone());
                    p
                })
            })
            .collect();
    }
    Ok(out
        .into_iter()
        .map(|values| GateValue {
            gate: gate.to_string(),
            values,
        })
        .collect())
}

/// All gate values of all gates of `b`.
pub fn all_gate_values(b: &Bddts, d: &DomainSpec) -> Result<Vec<GateValue>> {
    let mut out = Vec::new();
    for g in &b.gates {
        out.extend(gate_values(b, &g.name, d)?);
    }
    Ok(out)
}

/// `ϑ_u`: the interaction variables of the gate bound to the values, at time 0.
pub fn gate_value_valuation(b: &Bddts, u: &GateValue) -> Result<Valuation> {
    let g = b
        .gate(&u.gate)
        .ok_or_else(|| Error::InvalidModel(format!("unknown gate `{}`", u.gate)))?;
    if g.params.len() != u.values.len() {
        return Err(Error::SortMismatch(format!("`{u}` has the wrong arity")));
    }
    Ok(g.params.iter().cloned().zip(u.values.iter().cloned()).collect())
}

/// `ϑ_ω`, with `ϑ_{ωu} = ϑ_ω⇑ ⊔ ϑ_u`: the values of the `i`-th of `n` gate
/// values sit at time index `n - i`.
pub fn gate_seq_valuation(b: &Bddts, omega: &[GateValue]) -> Result<Valuation> {
    let mut val = Valuation::new();
    for u in omega {
        let mut next: Valuation = val.into_iter().map(|(k, v)| (k.shifted(), v)).collect();
        for (k, v) in gate_value_valuation(b, u)? {
            next.entry(k).or_insert(v);
        }
        val = next;
    }
    Ok(val)
}

/// `ϑ̂_ξ`: `ϑ_ξ` extended with the context variables renamed by the last gate.
pub fn hat_valuation(b: &Bddts, xi: &[GateValue]) -> Result<Valuation> {
    let mut val = gate_seq_valuation(b, xi)?;
    let Some(last) = xi.last() else {
        return Ok(val);
    };
    let g = b
        .gate(&last.gate)
        .ok_or_else(|| Error::InvalidModel(format!("unknown gate `{}`", last.gate)))?;
    for (c, iv) in &g.renames {
        let (Some(cv), Some(ivv)) = (b.var(c), b.var(iv)) else {
            return Err(Error::RenamingNotDerivable {
                gate: g.name.clone(),
                variable: c.clone(),
            });
        };
        if let Some(x) = val.get(&ivv).cloned() {
            val.insert(cv, x);
        }
    }
    Ok(val)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::model_from_json;

    #[test]
    fn sequence_valuation_indices() {
        let b = model_from_json(include_str!("../../data/door.json")).unwrap();
        let u1 = GateValue {
            gate: "verify_badge".into(),
            values: vec![Value::Int(1234)],
        };
        let u2 = GateValue {
            gate: "trigger_door".into(),
            values: vec![Value::Int(1), Value::enum_value("DoorState", "OPEN")],
        };
        assert!(gate_seq_valuation(&b, &[]).unwrap().is_empty());
        let val = gate_seq_valuation(&b, &[u1.clone(), u2.clone()]).unwrap();
        let badge = b.var("badge").unwrap();
        assert_eq!(val.get(&badge.with_time(1)), Some(&Value::Int(1234)));
        assert_eq!(val.get(&b.var("door_id").unwrap()), Some(&Value::Int(1)));
        let hat = hat_valuation(&b, &[u1, u2]).unwrap();
        assert_eq!(
            hat.get(&b.var("Door").unwrap()),
            Some(&Value::enum_value("DoorState", "OPEN"))
        );
    }

    #[test]
    fn gate_value_enumeration() {
        let b = model_from_json(include_str!("../../data/door.json")).unwrap();
        let d = b.domain().unwrap();
        assert_eq!(gate_values(&b, "trigger_door", &d).unwrap().len(), 4);
        assert_eq!(all_gate_values(&b, &d).unwrap().len(), 7);
    }
}
