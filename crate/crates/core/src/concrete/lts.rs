use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::model::{Bddts, Nature};
use crate::symbolic::check_ini;
use crate::terms::{evaluate, holds, DomainSpec, Valuation, VarKind};

use super::{gate_value_valuation, gate_values, sts::derive_sts, GateValue};

/// Default exploration depth for test cases.
pub const DEFAULT_MAX_DEPTH: usize = 6;

/// A location with a total valuation of the model and context variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct State {
    pub location: String,
    pub valuation: Valuation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub from: usize,
    pub label: GateValue,
    pub to: usize,
}

/// Bounded labelled transition system. State 0 is initial.
#[derive(Clone, Debug)]
pub struct Lts {
    pub states: Vec<State>,
    pub transitions: Vec<Transition>,
    /// Whether the successors of a state were computed.
    pub expanded: Vec<bool>,
    succ: Vec<BTreeMap<GateValue, usize>>,
}

impl Lts {
    pub fn successor(&self, state: usize, u: &GateValue) -> Option<usize> {
        self.succ[state].get(u).copied()
    }

    pub fn enabled(&self, state: usize) -> impl Iterator<Item = &GateValue> {
        self.succ[state].keys()
    }

    pub fn is_sink(&self, state: usize) -> bool {
        self.expanded[state] && self.succ[state].is_empty()
    }

    pub(crate) fn from_parts(states: Vec<State>, transitions: Vec<Transition>, expanded: Vec<bool>) -> Self {
        let mut succ = vec![BTreeMap::new(); states.len()];
        for t in &transitions {
            succ[t.from].entry(t.label.clone()).or_insert(t.to);
        }
        Lts {
            states,
            transitions,
            expanded,
            succ,
        }
    }
}

/// Computes the successors of `state` in `model`.
pub(crate) fn successors(
    model: &Bddts,
    state: &State,
    values: &BTreeMap<String, Vec<GateValue>>,
) -> Result<Vec<(GateValue, State)>> {
    let mut out = Vec::new();
    for s in model.outgoing_all(&state.location) {
        for u in values.get(&s.gate).map(Vec::as_slice).unwrap_or(&[]) {
            let mut env = state.valuation.clone();
            env.extend(gate_value_valuation(model, u)?);
            if !holds(&s.guard, &env)? {
                continue;
            }
            let mut next = state.valuation.clone();
            for (x, e) in s.assign.iter() {
                if x.kind() == VarKind::Model {
                    next.insert(x.clone(), evaluate(e, &env)?);
                }
            }
            out.push((
                u.clone(),
                State {
                    location: s.to.clone(),
                    valuation: next,
                },
            ));
        }
    }
    Ok(out)
}

pub(crate) fn value_table(model: &Bddts, d: &DomainSpec) -> Result<BTreeMap<String, Vec<GateValue>>> {
    model
        .gates
        .iter()
        .map(|g| Ok((g.name.clone(), gate_values(model, &g.name, d)?)))
        .collect()
}

/// Explores the states of `model` reachable from `(initial, ini)` within
/// `max_depth` steps. Unassigned variables keep their values.
pub fn interpret(model: &Bddts, ini: &Valuation, d: &DomainSpec, max_depth: usize) -> Result<Lts> {
    check_ini(model, ini, d)?;
    let values = value_table(model, d)?;
    let start = State {
        location: model.initial.clone(),
        valuation: ini.clone(),
    };
    let mut index: HashMap<State, usize> = HashMap::from([(start.clone(), 0)]);
    let mut states = vec![start];
    let mut depth = vec![0usize];
    let mut expanded = vec![false];
    let mut transitions = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        if depth[i] >= max_depth {
            continue;
        }
        expanded[i] = true;
        for (u, next) in successors(model, &states[i], &values)? {
            let j = match index.get(&next) {
                Some(&j) => j,
                None => {
                    let j = states.len();
                    index.insert(next.clone(), j);
                    states.push(next);
                    depth.push(depth[i] + 1);
                    expanded.push(false);
                    queue.push_back(j);
                    j
                }
            };
            transitions.push(Transition {
                from: i,
                label: u,
                to: j,
            });
        }
    }
    Ok(Lts::from_parts(states, transitions, expanded))
}

/// A test case: the bounded LTS of the derived STS with pass states and
/// failure edges.
#[derive(Clone, Debug)]
pub struct TestCase {
    /// The model the test case was derived from.
    pub model: Bddts,
    pub ini: Valuation,
    pub max_depth: usize,
    pub lts: Lts,
    /// Open sink states.
    pub pass: BTreeSet<usize>,
    /// Output gate values leading to the failure state.
    pub fail: BTreeSet<(usize, GateValue)>,
}

impl TestCase {
    pub fn is_closed(&self, state: usize) -> bool {
        self.model.nature(&self.lts.states[state].location) == Some(Nature::Closed)
    }

    pub fn fails_on(&self, state: usize, u: &GateValue) -> bool {
        self.fail.contains(&(state, u.clone()))
    }
}

/// Builds `TC(b, ini)`.
pub fn derive_test_case(b: &Bddts, ini: &Valuation, d: &DomainSpec, max_depth: usize) -> Result<TestCase> {
    check_ini(b, ini, d)?;
    if !holds(&b.ig, ini)? {
        return Err(Error::IniViolatesIg);
    }
    let sts = derive_sts(b, ini, d)?;
    let lts = interpret(&sts.model, ini, d, max_depth)?;
    let mut pass = BTreeSet::new();
    let mut fail = BTreeSet::new();
    let values = value_table(b, d)?;
    for (i, st) in lts.states.iter().enumerate() {
        if !lts.expanded[i] {
            continue;
        }
        match b.nature(&st.location) {
            Some(Nature::Open) if lts.is_sink(i) => {
                pass.insert(i);
            }
            Some(Nature::Closed) => {
                for g in b.gates.iter().filter(|g| g.is_output()) {
                    for u in &values[&g.name] {
                        if lts.successor(i, u).is_none() {
                            fail.insert((i, u.clone()));
                        }
                    }
                }
            }
            _ => {}
        }
    }
    Ok(TestCase {
        model: b.clone(),
        ini: ini.clone(),
        max_depth,
        lts,
        pass,
        fail,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerdictKind {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictKind::Pass => "pass",
            VerdictKind::Fail => "fail",
            VerdictKind::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub kind: VerdictKind,
    /// The prefix that decided the verdict, or the consumed prefix when
    /// inconclusive.
    pub prefix: Vec<GateValue>,
    /// The walk stopped at the exploration bound.
    pub beyond_bound: bool,
}

/// Walks `omega` through the test case and reports the first terminal event.
pub fn verdict(tc: &TestCase, omega: &[GateValue]) -> Verdict {
    let mut q = 0usize;
    let done = |kind, n: usize, beyond_bound| Verdict {
        kind,
        prefix: omega[..n].to_vec(),
        beyond_bound,
    };
    for (n, u) in omega.iter().enumerate() {
        if tc.pass.contains(&q) {
            return done(VerdictKind::Pass, n, false);
        }
        if !tc.lts.expanded[q] {
            return done(VerdictKind::Inconclusive, n, true);
        }
        if tc.fails_on(q, u) {
            return done(VerdictKind::Fail, n + 1, false);
        }
        match tc.lts.successor(q, u) {
            Some(next) => q = next,
            None => return done(VerdictKind::Inconclusive, n, false),
        }
    }
    if tc.pass.contains(&q) {
        return done(VerdictKind::Pass, omega.len(), false);
    }
    done(VerdictKind::Inconclusive, omega.len(), !tc.lts.expanded[q])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::{inis_from_json, model_from_json};
    use crate::saturation::saturate;
    use crate::terms::Value;

    fn door() -> (Bddts, DomainSpec, Valuation) {
        let b = model_from_json(include_str!("../../data/door.json")).unwrap();
        let d = b.domain().unwrap();
        let ini = inis_from_json(include_str!("../../data/door_ini.json"), &b, &d)
            .unwrap()
            .remove(0);
        (b, d, ini)
    }

    fn verify(n: i64) -> GateValue {
        GateValue {
            gate: "verify_badge".into(),
            values: vec![Value::Int(n)],
        }
    }

    fn trigger(id: i64, cmd: &str) -> GateValue {
        GateValue {
            gate: "trigger_door".into(),
            values: vec![Value::Int(id), Value::enum_value("DoorState", cmd)],
        }
    }

    #[test]
    fn verify_enabled_only_for_the_presented_badge() {
        let (b, d, ini) = door();
        let lts = interpret(&b, &ini, &d, 2).unwrap();
        let enabled: Vec<&GateValue> = lts.enabled(0).collect();
        assert_eq!(enabled, vec![&verify(1234)]);
    }

    #[test]
    fn empty_model_has_one_state() {
        let (mut b, d, ini) = door();
        b.switches.clear();
        let lts = interpret(&b, &ini, &d, 3).unwrap();
        assert_eq!((lts.states.len(), lts.transitions.len()), (1, 0));
    }

    #[test]
    fn door_verdicts() {
        let (b, d, ini) = door();
        let sat = saturate(&b, &d).unwrap();
        let tc = derive_test_case(&sat, &ini, &d, DEFAULT_MAX_DEPTH).unwrap();
        let v = verdict(&tc, &[verify(1234), trigger(1, "CLOSED")]);
        assert_eq!((v.kind, v.prefix.len()), (VerdictKind::Fail, 2));
        let v = verdict(&tc, &[verify(1234), trigger(1, "OPEN")]);
        assert_eq!(v.kind, VerdictKind::Pass);
        let v = verdict(&tc, &[verify(1233)]);
        assert_eq!(v.kind, VerdictKind::Pass, "wrong badge leads to the open sink");
        let v = verdict(&tc, &[verify(1234), verify(1234)]);
        assert_eq!(v.kind, VerdictKind::Fail);
        let v = verdict(&tc, &[verify(1234)]);
        assert_eq!(v.kind, VerdictKind::Inconclusive);
        assert!(tc
            .fail
            .iter()
            .all(|(q, u)| tc.is_closed(*q) && b.gate(&u.gate).unwrap().is_output()));
    }

    #[test]
    fn violating_ini_is_rejected() {
        let (b, d, mut ini) = door();
        ini.insert(b.var("P_badge").unwrap(), Value::Int(1233));
        let sat = saturate(&b, &d).unwrap();
        assert_eq!(derive_test_case(&sat, &ini, &d, 3).unwrap_err(), Error::IniViolatesIg);
    }
}
