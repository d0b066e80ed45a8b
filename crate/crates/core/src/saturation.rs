//! Saturation: making every location explicit about unspecified behaviour.

use std::fmt;

use crate::error::{Error, Result};
use crate::model::{Bddts, Location, Nature, Switch, BOT, TOP};
use crate::terms::{find_implication_witness, find_model, show_valuation, Assignment, DomainSpec, Term, Valuation};

/// Saturates `b`.
///
/// Initial switches get the initial guard conjoined. For every location and
/// interaction with at least one switch, the uncovered part of the guard
/// space leads to `__top` (open location or input) or `__bot` (closed
/// location and output). Closed locations get a `true`-guarded switch to
/// `__bot` for every output they do not mention. Added switches whose guard
/// is unsatisfiable are dropped.
pub fn saturate(b: &Bddts, d: &DomainSpec) -> Result<Bddts> {
    if b.saturated {
        return Err(Error::AlreadySaturated);
    }
    if b.location(TOP).is_some() || b.location(BOT).is_some() {
        return Err(Error::InvalidModel(format!(
            "location names `{TOP}` and `{BOT}` are reserved"
        )));
    }
    let mut out = b.clone();
    for s in out.switches.iter_mut() {
        if s.from == b.initial {
            s.guard = Term::and(b.ig.clone(), s.guard.clone());
        }
    }
    let mut added = Vec::new();
    for l in &b.locations {
        for g in &b.gates {
            let phis: Vec<Term> = out.outgoing(&l.name, &g.name).map(|s| s.guard.clone()).collect();
            let closed_output = l.nature == Nature::Closed && g.is_output();
            let target = if closed_output { BOT } else { TOP };
            let guard = if phis.is_empty() {
                if !closed_output {
                    continue;
                }
                Term::tt()
            } else {
                Term::not(Term::or_all(phis))
            };
            if find_model(&guard, d)?.is_none() {
                continue;
            }
            added.push(Switch {
                from: l.name.clone(),
                gate: g.name.clone(),
                guard,
                assign: Assignment::new(),
                to: target.to_string(),
            });
        }
    }
    out.switches.extend(added);
    out.locations.push(Location {
        name: TOP.into(),
        nature: Nature::Open,
        og: None,
    });
    out.locations.push(Location {
        name: BOT.into(),
        nature: Nature::Open,
        og: Some(Term::ff()),
    });
    out.saturated = true;
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SaturationViolation {
    /// The guards for an interaction at a location do not cover everything.
    Uncovered {
        location: String,
        gate: String,
        witness: Valuation,
    },
    /// A closed location lacks an output interaction.
    MissingOutput { location: String, gate: String },
    /// An initial switch does not imply the initial guard and does not lead
    /// to an open sink without output guard.
    InitialGuard { switch: usize, witness: Valuation },
}

impl fmt::Display for SaturationViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SaturationViolation::Uncovered {
                location,
                gate,
                witness,
            } => write!(
                f,
                "location `{location}`: guards for `{gate}` miss {}",
                show_valuation(witness)
            ),
            SaturationViolation::MissingOutput { location, gate } => {
                write!(f, "closed location `{location}` has no switch for output `{gate}`")
            }
            SaturationViolation::InitialGuard { switch, witness } => write!(
                f,
                "initial switch {switch} is enabled outside the initial guard at {}",
                show_valuation(witness)
            ),
        }
    }
}

/// Checks the three saturation clauses and reports every failure.
pub fn saturation_violations(b: &Bddts, d: &DomainSpec) -> Result<Vec<SaturationViolation>> {
    let mut out = Vec::new();
    for l in &b.locations {
        for g in &b.gates {
            let phis: Vec<Term> = b.outgoing(&l.name, &g.name).map(|s| s.guard.clone()).collect();
            if phis.is_empty() {
                if l.nature == Nature::Closed && g.is_output() {
                    out.push(SaturationViolation::MissingOutput {
                        location: l.name.clone(),
                        gate: g.name.clone(),
                    });
                }
                continue;
            }
            if let Some(w) = find_model(&Term::not(Term::or_all(phis)), d)? {
                out.push(SaturationViolation::Uncovered {
                    location: l.name.clone(),
                    gate: g.name.clone(),
                    witness: w,
                });
            }
        }
    }
    for (i, s) in b.switches.iter().enumerate() {
        if s.from != b.initial {
            continue;
        }
        let open_sink = b.nature(&s.to) == Some(Nature::Open) && b.is_sink(&s.to) && b.og(&s.to).is_none();
        if open_sink {
            continue;
        }
        if let Some(w) = find_implication_witness(&s.guard, &b.ig, d)? {
            out.push(SaturationViolation::InitialGuard { switch: i, witness: w });
        }
    }
    Ok(out)
}

pub fn is_saturated(b: &Bddts, d: &DomainSpec) -> Result<bool> {
    Ok(saturation_violations(b, d)?.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::model_from_json;
    use crate::terms::sem_equiv;

    fn door() -> Bddts {
        model_from_json(include_str!("../data/door.json")).unwrap()
    }

    #[test]
    fn door_saturation_adds_completions() {
        let b = door();
        let d = b.domain().unwrap();
        let s = saturate(&b, &d).unwrap();
        let added: Vec<&Switch> = s.switches[b.switches.len()..].iter().collect();
        assert_eq!(added.len(), 3);
        let phi0 = b
            .parse_formula("badge == P_badge && contains(A_badge, badge)", &d)
            .unwrap();
        let top = added.iter().find(|s| s.from == "0").unwrap();
        assert_eq!(top.to, TOP);
        assert!(sem_equiv(&top.guard, &Term::not(Term::and(b.ig.clone(), phi0)), &d).unwrap());
        let bot_trigger = added
            .iter()
            .find(|s| s.from == "1" && s.gate == "trigger_door")
            .unwrap();
        assert_eq!(bot_trigger.to, BOT);
        assert!(sem_equiv(&bot_trigger.guard, &Term::not(b.switches[1].guard.clone()), &d).unwrap());
        let bot_verify = added
            .iter()
            .find(|s| s.from == "1" && s.gate == "verify_badge")
            .unwrap();
        assert_eq!((bot_verify.to.as_str(), bot_verify.guard.is_true()), (BOT, true));
        assert!(is_saturated(&s, &d).unwrap());
        assert!(s.validate(&d).unwrap().is_ok());
        assert_eq!(s.og(BOT), Some(&Term::ff()));
    }

    #[test]
    fn raw_door_is_not_saturated() {
        let b = door();
        let d = b.domain().unwrap();
        let v = saturation_violations(&b, &d).unwrap();
        assert!(v.contains(&SaturationViolation::MissingOutput {
            location: "1".into(),
            gate: "verify_badge".into()
        }));
        assert!(v
            .iter()
            .any(|x| matches!(x, SaturationViolation::Uncovered { location, .. } if location == "1")));
        assert!(v
            .iter()
            .any(|x| matches!(x, SaturationViolation::InitialGuard { switch: 0, .. })));
    }

    #[test]
    fn saturating_twice_is_refused() {
        let b = door();
        let d = b.domain().unwrap();
        let s = saturate(&b, &d).unwrap();
        assert_eq!(saturate(&s, &d).unwrap_err(), Error::AlreadySaturated);
    }
}
