//! Seeded random models for property tests.
//!
//! All generated models share one small signature: model variables `m0`
//! (0..2) and `m1` (Bool), context variable `c0` over enum `E = {A, B}`, an
//! input gate `i(x)` and an output gate `o(z)` that renames `c0` to `z`.
//! Models are valid, deterministic and output-rich. Members of a pair or
//! triple share the assignment of each gate, so synchronised switches never
//! clash, and they enable the same gates at their initial location. No
//! switch enters the initial location, as in models built from scenarios.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::format::model_from_value;
use crate::model::Bddts;
use crate::terms::{is_satisfiable, DomainSpec};

pub const GATES: [&str; 2] = ["i", "o"];

/// Assignment table shared by the members of a family.
#[derive(Clone, Debug)]
pub struct Signature {
    pub assign: BTreeMap<&'static str, Vec<(&'static str, &'static str)>>,
}

const STATE_ATOMS: [&str; 8] = [
    "m0 == 0",
    "m0 != 2",
    "m0 >= 1",
    "m1",
    "!m1",
    "c0 == E::A",
    "c0 == E::B",
    "m0 == 2",
];
const I_ATOMS: [&str; 6] = ["x == 0", "x == 1", "x != 2", "x <= m0", "x > m0", "x >= 1"];
const O_ATOMS: [&str; 4] = ["z == E::A", "z == E::B", "z == c0", "z != c0"];
const OG_ATOMS: [&str; 7] = ["c0 == E::A", "c0 == E::B", "m1", "!m1", "m0 >= 1", "m0 == 0", "true"];

pub fn signature(rng: &mut impl Rng) -> Signature {
    let pick = |rng: &mut dyn rand::RngCore, xs: &[&'static str]| *xs.choose(rng).unwrap();
    let mut assign = BTreeMap::new();
    assign.insert(
        "i",
        vec![
            ("m0", pick(rng, &["x", "m0", "0", "2"])),
            ("m1", pick(rng, &["m1", "!m1", "true", "false", "x > m0", "x == 0"])),
        ],
    );
    assign.insert(
        "o",
        vec![
            ("m0", pick(rng, &["m0", "1", "0"])),
            ("m1", pick(rng, &["m1", "z == E::A", "z == c0", "!m1", "false"])),
        ],
    );
    Signature { assign }
}

fn skeleton() -> serde_json::Value {
    serde_json::json!({
        "sorts": [
            {"name": "N", "kind": "int", "lo": 0, "hi": 2},
            {"name": "E", "kind": "enum", "values": ["A", "B"]}
        ],
        "variables": [
            {"name": "m0", "sort": "N", "kind": "model"},
            {"name": "m1", "sort": "Bool", "kind": "model"},
            {"name": "c0", "sort": "E", "kind": "context"},
            {"name": "x", "sort": "N", "kind": "interaction"},
            {"name": "z", "sort": "E", "kind": "interaction"}
        ],
        "gates": [
            {"name": "i", "dir": "in", "params": ["x"]},
            {"name": "o", "dir": "out", "params": ["z"], "renames": {"c0": "z"}}
        ],
        "locations": [],
        "initial": "l0",
        "ig": "true",
        "switches": []
    })
}

/// The domain shared by all generated models.
pub fn domain() -> DomainSpec {
    model_from_value(skeleton())
        .and_then(|b| b.domain())
        .expect("generator domain")
}

fn atom(rng: &mut impl Rng, gate: &str) -> String {
    let own: &[&str] = if gate == "i" { &I_ATOMS } else { &O_ATOMS };
    let first = if rng.gen_bool(0.7) {
        own.choose(rng)
    } else {
        STATE_ATOMS.choose(rng)
    };
    let first = first.unwrap().to_string();
    match rng.gen_range(0..10) {
        0..=5 => first,
        6..=7 => format!("{first} && {}", STATE_ATOMS.choose(rng).unwrap()),
        _ => format!("{first} || {}", own.choose(rng).unwrap()),
    }
}

/// Guards of one to two switches with disjoint, satisfiable guards.
fn guards(rng: &mut impl Rng, gate: &str, d: &DomainSpec, parse: &dyn Fn(&str) -> crate::terms::Term) -> Vec<String> {
    for _ in 0..20 {
        let psi = atom(rng, gate);
        if !is_satisfiable(&parse(&psi), d).unwrap_or(false) {
            continue;
        }
        if rng.gen_bool(0.5) {
            let second = format!("!({psi}) && ({})", atom(rng, gate));
            if is_satisfiable(&parse(&second), d).unwrap_or(false) {
                return vec![psi, second];
            }
        }
        return vec![psi];
    }
    vec!["true".into()]
}

/// One model of a family. `initial_gates` are the gates with switches at
/// the initial location.
pub fn model(sig: &Signature, initial_gates: &[&str], rng: &mut impl Rng) -> Bddts {
    let d = domain();
    let base = model_from_value(skeleton()).expect("generator skeleton");
    let parse = |s: &str| base.parse_formula(s, &d).expect("generated formula parses");
    let n: usize = *[2, 3, 3, 4, 4].choose(rng).unwrap();
    let names: Vec<String> = (0..n).map(|k| format!("l{k}")).collect();
    let mut closed: Vec<bool> = (0..n).map(|k| k > 0 && rng.gen_bool(0.5)).collect();
    let goal = (n >= 3 && rng.gen_bool(0.85)).then_some(n - 1);
    if goal.is_some() {
        closed[n - 2] = true;
    }
    let mut switches = Vec::new();
    for k in 0..n {
        let mut gates: Vec<&str> = if k == 0 {
            initial_gates.to_vec()
        } else {
            GATES.iter().copied().filter(|_| rng.gen_bool(0.6)).collect()
        };
        let feeds_goal = goal.is_some() && k == n - 2;
        if feeds_goal && !gates.contains(&"o") {
            gates.push("o");
        }
        if gates.is_empty() && k + 1 < n {
            gates.push(GATES.choose(rng).unwrap());
        }
        let mut chained = false;
        for gate in gates {
            let legal = |t: usize| t != 0 && (Some(t) != goal || (gate == "o" && closed[k]));
            for (j, guard) in guards(rng, gate, &d, &parse).into_iter().enumerate() {
                let to = if feeds_goal && gate == "o" && j == 0 {
                    goal.unwrap()
                } else if !chained && k + 1 < n && legal(k + 1) {
                    chained = true;
                    k + 1
                } else {
                    let options: Vec<usize> = (0..n).filter(|&t| legal(t)).collect();
                    *options.choose(rng).unwrap()
                };
                let assign: serde_json::Map<String, serde_json::Value> = sig.assign[gate]
                    .iter()
                    .map(|(v, e)| (v.to_string(), e.to_string().into()))
                    .collect();
                switches.push(serde_json::json!({
                    "from": names[k], "gate": gate, "guard": guard, "assign": assign, "to": names[to]
                }));
            }
        }
    }
    let locations: Vec<serde_json::Value> = (0..n)
        .map(|k| {
            let mut l = serde_json::json!({ "name": names[k], "nature": if closed[k] { "closed" } else { "open" } });
            if Some(k) == goal {
                let og = if rng.gen_bool(0.4) {
                    format!("{} || {}", OG_ATOMS.choose(rng).unwrap(), OG_ATOMS.choose(rng).unwrap())
                } else {
                    OG_ATOMS[..6].choose(rng).unwrap().to_string()
                };
                l["og"] = og.into();
            }
            l
        })
        .collect();
    let ig = match rng.gen_range(0..10) {
        0..=2 => "true".to_string(),
        3..=7 => STATE_ATOMS.choose(rng).unwrap().to_string(),
        _ => format!(
            "{} || {}",
            STATE_ATOMS.choose(rng).unwrap(),
            STATE_ATOMS.choose(rng).unwrap()
        ),
    };
    let mut j = skeleton();
    j["locations"] = locations.into();
    j["switches"] = switches.into();
    j["ig"] = ig.into();
    model_from_value(j).expect("generated model is well formed")
}

fn initial_gates(rng: &mut impl Rng) -> Vec<&'static str> {
    match rng.gen_range(0..4) {
        0 => vec!["i"],
        1 => vec!["o"],
        _ => vec!["i", "o"],
    }
}

/// `k` models sharing a signature and initial gates.
pub fn family(seed: u64, k: usize) -> Vec<Bddts> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sig = signature(&mut rng);
    let init = initial_gates(&mut rng);
    (0..k).map(|_| model(&sig, &init, &mut rng)).collect()
}

pub fn random_model(seed: u64) -> Bddts {
    family(seed, 1).remove(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_models_are_valid_and_output_rich() {
        let d = domain();
        let mut with_goal = 0;
        for seed in 0..300 {
            let b = random_model(seed);
            let report = b.validate(&d).unwrap();
            assert!(report.is_ok(), "seed {seed}: {report}");
            assert!(b.is_output_rich(), "seed {seed}");
            assert!(b.locations.len() <= 4);
            with_goal += b.locations.iter().any(|l| l.og.is_some()) as usize;
        }
        assert!(with_goal > 150, "{with_goal}");
    }

    #[test]
    fn families_share_initial_gates() {
        for seed in 0..50 {
            let f = family(seed, 3);
            let init = |b: &Bddts| {
                let mut g: Vec<String> = b.initial_switches().map(|s| s.gate.clone()).collect();
                g.sort();
                g.dedup();
                g
            };
            assert!(f.iter().all(|b| init(b) == init(&f[0])));
            assert!(f[0].compatible_with(&f[1]).is_ok());
        }
    }

    #[test]
    fn generation_is_reproducible() {
        let a = crate::format::model_to_json(&random_model(9));
        assert_eq!(a, crate::format::model_to_json(&random_model(9)));
    }
}
