mod common;

use bddts::composition::disjunction;
use bddts::gen::{domain, family, random_model};
use bddts::saturation::saturate;
use bddts::symbolic::{enumerate_paths, path_condition, path_subsumes, Path};
use bddts::terms::{is_satisfiable, sem_equiv, sem_implies, Term};
use bddts::Bddts;
use common::{ini_formula, inis, satisfies_ig, traces, SymTable};

fn saturated_pair(seed: u64) -> (Bddts, Bddts, Bddts) {
    let d = domain();
    let f = family(seed, 2);
    let s1 = saturate(&f[0], &d).unwrap();
    let s2 = saturate(&f[1], &d).unwrap();
    let c = disjunction(&s1, &s2, &d).unwrap();
    (s1, s2, c)
}

/// Component `i` of a composed location name `(a,b)`.
fn component(name: &str, i: usize) -> Option<String> {
    let inner = name.strip_prefix('(')?.strip_suffix(')')?;
    let (a, b) = inner.split_once(',')?;
    let part = if i == 0 { a } else { b };
    (part != "⊥").then(|| part.to_string())
}

fn live(p: &Path) -> bool {
    p.labels.iter().all(|l| is_satisfiable(&l.guard, &domain()).unwrap())
}

#[test]
fn execution_conditions_are_prefix_closed() {
    let d = domain();
    for seed in 0..60 {
        let b = saturate(&random_model(seed), &d).unwrap();
        let ws = traces(&b, &d, 3);
        for ini in inis(&b, &d).iter().step_by(3) {
            let t = SymTable::new(&b, ini, 3, &d);
            for w in ws.iter().filter(|w| t.ec_holds(w)) {
                for k in 0..w.len() {
                    assert!(t.ec_holds(&w[..k]), "seed {seed}: prefix {k} of {w:?}");
                }
            }
        }
    }
}

#[test]
fn violated_initial_guard_collapses_both_conditions() {
    let d = domain();
    let mut checked = 0;
    for seed in 0..80 {
        let b = saturate(&random_model(seed), &d).unwrap();
        for ini in inis(&b, &d).into_iter().filter(|i| !satisfies_ig(&b, i)) {
            let t = SymTable::new(&b, &ini, 4, &d);
            let phi = ini_formula(&ini);
            for sigma in bddts::symbolic::sigmas(&b.interactions(), 4) {
                assert!(
                    !is_satisfiable(&Term::and(phi.clone(), t.ec(&sigma)), &d).unwrap(),
                    "seed {seed}"
                );
                assert!(sem_implies(&phi, &t.gi(&sigma), &d).unwrap(), "seed {seed}");
                checked += 1;
            }
        }
    }
    assert!(checked > 1000, "{checked}");
}

#[test]
fn composed_paths_subsume_component_paths() {
    let d = domain();
    for seed in 0..60 {
        let (s1, s2, c) = saturated_pair(seed);
        let comps = [enumerate_paths(&s1, 3), enumerate_paths(&s2, 3)];
        for pi in enumerate_paths(&c, 3) {
            for (i, paths) in comps.iter().enumerate() {
                let Some(li) = component(&pi.end, i) else { continue };
                let found = paths
                    .iter()
                    .filter(|p| p.end == li && p.sigma() == pi.sigma())
                    .any(|p| path_subsumes(p, &pi, &d).unwrap());
                assert!(found, "seed {seed}: {pi} has no subsumed path in component {i}");
            }
        }
    }
}

#[test]
fn location_paths_decompose_disjointly() {
    let d = domain();
    for seed in 0..60 {
        let (s1, _, c) = saturated_pair(seed);
        let left = enumerate_paths(&s1, 3);
        // A false label subsumes everything, so void paths are left out.
        for pi in enumerate_paths(&c, 3).into_iter().filter(live) {
            let Some(l1) = component(&pi.end, 0) else { continue };
            let owners: Vec<&Path> = left
                .iter()
                .filter(|p| p.end == l1 && p.sigma() == pi.sigma() && path_subsumes(p, &pi, &d).unwrap())
                .collect();
            assert_eq!(owners.len(), 1, "seed {seed}: {pi}");
        }
    }
}

#[test]
fn component_path_condition_splits_over_composed_paths() {
    let d = domain();
    for seed in 0..40 {
        let (s1, s2, c) = saturated_pair(seed);
        let composed = enumerate_paths(&c, 3);
        for (i, s) in [&s1, &s2].into_iter().enumerate() {
            for pi_i in enumerate_paths(s, 3) {
                let matching: Vec<&Path> = composed
                    .iter()
                    .filter(|p| component(&p.end, i).as_deref() == Some(pi_i.end.as_str()))
                    .filter(|p| p.sigma() == pi_i.sigma() && path_subsumes(&pi_i, p, &d).unwrap())
                    .collect();
                for ini in inis(&c, &d).iter().step_by(4) {
                    let eta = path_condition(s, &pi_i, ini, &d).unwrap();
                    let split = Term::or_all(matching.iter().map(|p| path_condition(&c, p, ini, &d).unwrap()));
                    assert!(
                        sem_equiv(&eta, &split, &d).unwrap(),
                        "seed {seed}: component {i} path {pi_i}"
                    );
                }
            }
        }
    }
}

#[test]
fn misaligned_initial_gates_break_execution_condition_composition() {
    let (seed, sigma, ini) = common::misaligned_ec_counterexample(0..50).expect("a counterexample within 50 seeds");
    assert_eq!(sigma, ["i"]);
    assert!(!ini.is_empty(), "seed {seed}");
}
