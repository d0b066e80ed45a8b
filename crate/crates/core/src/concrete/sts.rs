use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::Bddts;
use crate::symbolic::check_ini;
use crate::terms::{DomainSpec, Term, Valuation, Var, VarKind};

/// A model whose goal-entering switches carry their output guard, together
/// with the initial valuation.
#[derive(Clone, Debug)]
pub struct DerivedSts {
    pub model: Bddts,
    pub ini: Valuation,
}

/// Embeds output guards into the switches that enter goal locations.
///
/// A switch `(l, g, φ, a, l')` with `OG(l')` defined gets the guard
/// `φ ∧ OG(l')[ρ^g][a]`: context variables are renamed to the interaction
/// variables of `g`, and model variables are read after the assignment.
pub fn derive_sts(b: &Bddts, ini: &Valuation, d: &DomainSpec) -> Result<DerivedSts> {
    if let Some(why) = b.output_richness_violation() {
        return Err(Error::NotOutputRich(why));
    }
    check_ini(b, ini, d)?;
    let mut model = b.clone();
    for s in model.switches.iter_mut() {
        let Some(og) = b.og(&s.to) else { continue };
        let g = b
            .gate(&s.gate)
            .ok_or_else(|| Error::InvalidModel(format!("unknown gate `{}`", s.gate)))?;
        let mut rho: BTreeMap<Var, Term> = BTreeMap::new();
        for v in og.vars() {
            if v.kind() != VarKind::Context {
                continue;
            }
            let iv = g
                .renames
                .get(v.name())
                .and_then(|iv| b.var(iv))
                .ok_or_else(|| Error::RenamingNotDerivable {
                    gate: g.name.clone(),
                    variable: v.name().to_string(),
                })?;
            rho.insert(v, Term::Var(iv));
        }
        let post = s.assign.restrict(|v| v.kind() == VarKind::Model);
        let embedded = og.substitute(&rho).substitute(post.map());
        s.guard = Term::and(s.guard.clone(), embedded);
    }
    Ok(DerivedSts {
        model,
        ini: ini.clone(),
    })
}
