//! Brute-force oracles shared by the property suites.
#![allow(dead_code)]

use std::collections::BTreeMap;

use bddts::concrete::{all_gate_values, gate_seq_valuation, hat_valuation, GateValue};
use bddts::symbolic::{all_inis, summaries, SymbolicSummary};
use bddts::terms::{holds, Assignment, DomainSpec, Term, Valuation};
use bddts::Bddts;

pub fn inis(b: &Bddts, d: &DomainSpec) -> Vec<Valuation> {
    all_inis(b, d).unwrap()
}

pub fn satisfies_ig(b: &Bddts, ini: &Valuation) -> bool {
    holds(&b.ig, ini).unwrap()
}

/// Every gate value sequence of length at most `k`, shortest first.
pub fn traces(b: &Bddts, d: &DomainSpec, k: usize) -> Vec<Vec<GateValue>> {
    let alphabet = all_gate_values(b, d).unwrap();
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Vec<GateValue>> = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::new();
        for w in &layer {
            for u in &alphabet {
                let mut v = w.clone();
                v.push(u.clone());
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

pub fn sigma_of(w: &[GateValue]) -> Vec<String> {
    w.iter().map(|u| u.gate.clone()).collect()
}

/// EC and GI of every sequence up to a bound, for one model and ini.
pub struct SymTable<'a> {
    pub b: &'a Bddts,
    pub ini: Valuation,
    pub map: BTreeMap<Vec<String>, SymbolicSummary>,
}

impl<'a> SymTable<'a> {
    pub fn new(b: &'a Bddts, ini: &Valuation, k: usize, d: &DomainSpec) -> Self {
        SymTable {
            b,
            ini: ini.clone(),
            map: summaries(b, ini, k, d).unwrap(),
        }
    }

    pub fn ec(&self, sigma: &[String]) -> Term {
        self.map.get(sigma).map(|s| s.ec.clone()).unwrap_or_else(Term::ff)
    }

    pub fn gi(&self, sigma: &[String]) -> Term {
        self.map.get(sigma).map(|s| s.gi.clone()).unwrap_or_else(Term::tt)
    }

    /// `ϑ_w ⊨ EC(σ_w)`.
    pub fn ec_holds(&self, w: &[GateValue]) -> bool {
        holds(&self.ec(&sigma_of(w)), &gate_seq_valuation(self.b, w).unwrap()).unwrap()
    }

    /// `ϑ̂_w ⊨ GI(σ_w)`.
    pub fn gi_holds(&self, w: &[GateValue]) -> bool {
        holds(&self.gi(&sigma_of(w)), &hat_valuation(self.b, w).unwrap()).unwrap()
    }

    /// Reachability of `w` in the test-case LTS, stated symbolically.
    pub fn reaches(&self, w: &[GateValue]) -> bool {
        self.ec_holds(w) && (0..=w.len()).all(|k| self.gi_holds(&w[..k]))
    }

    /// The pass and fail clauses of the symbolic characterisation of
    /// verdicts. `alphabet` is every gate value.
    pub fn verdict(&self, w: &[GateValue], alphabet: &[GateValue]) -> (bool, bool) {
        let pass = (0..=w.len()).any(|k| {
            let xi = &w[..k];
            self.reaches(xi)
                && alphabet.iter().all(|u| {
                    let mut ext = xi.to_vec();
                    ext.push(u.clone());
                    !self.ec_holds(&ext)
                })
        });
        let fail = (1..=w.len()).any(|k| self.ec_holds(&w[..k]) && !self.gi_holds(&w[..k]));
        (pass, fail)
    }
}

pub fn ini_formula(ini: &Valuation) -> Term {
    Assignment::from_valuation(ini).to_formula().unwrap()
}

/// Folded conditions of a set of models: EC with `∨`, GI with `∧`.
pub struct SetTable<'a>(pub Vec<SymTable<'a>>);

impl SetTable<'_> {
    pub fn ec_holds(&self, w: &[GateValue]) -> bool {
        self.0.iter().any(|t| t.ec_holds(w))
    }

    pub fn gi_holds(&self, w: &[GateValue]) -> bool {
        self.0.iter().all(|t| t.gi_holds(w))
    }

    pub fn passes(&self, w: &[GateValue], alphabet: &[GateValue]) -> bool {
        (0..=w.len()).any(|k| {
            let xi = &w[..k];
            self.ec_holds(xi)
                && (0..=k).all(|j| self.gi_holds(&w[..j]))
                && alphabet.iter().all(|u| {
                    let mut ext = xi.to_vec();
                    ext.push(u.clone());
                    !self.ec_holds(&ext)
                })
        })
    }
}

/// A pair whose initial locations enable different gates, with `σ` and
/// `ini` where `EC1 ∨ EC2` and the composed EC differ. Searches seeds in
/// order.
pub fn misaligned_ec_counterexample(seeds: std::ops::Range<u64>) -> Option<(u64, Vec<String>, Valuation)> {
    use bddts::composition::disjunction;
    use bddts::gen::{domain, model, signature};
    use bddts::saturation::saturate;
    use bddts::terms::sem_equiv;
    use rand::SeedableRng;

    let d = domain();
    for seed in seeds {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let sig = signature(&mut rng);
        let b1 = saturate(&model(&sig, &["i", "o"], &mut rng), &d).unwrap();
        let b2 = saturate(&model(&sig, &["o"], &mut rng), &d).unwrap();
        let c = disjunction(&b1, &b2, &d).unwrap();
        for ini in inis(&b1, &d) {
            let (t1, t2, tc) = (
                SymTable::new(&b1, &ini, 1, &d),
                SymTable::new(&b2, &ini, 1, &d),
                SymTable::new(&c, &ini, 1, &d),
            );
            let sigma = vec!["i".to_string()];
            let folded = Term::or(t1.ec(&sigma), t2.ec(&sigma));
            if !sem_equiv(&folded, &tc.ec(&sigma), &d).unwrap() {
                return Some((seed, sigma, ini));
            }
        }
    }
    None
}
