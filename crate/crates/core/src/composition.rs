//! Disjunctive composition of saturated models and isomorphism checking.

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::model::{Bddts, Location, Nature, Switch};
use crate::terms::{find_model, sem_equiv, DomainSpec, Term};

/// Default location bound for [`find_isomorphism`].
pub const DEFAULT_ISO_CAP: usize = 12;

const BOTTOM: &str = "⊥";

type Pair = (Option<String>, Option<String>);

fn pair_name(p: &Pair) -> String {
    let side = |s: &Option<String>| s.clone().unwrap_or_else(|| BOTTOM.to_string());
    format!("({},{})", side(&p.0), side(&p.1))
}

/// Disjunctive composition of two saturated, compatible models.
///
/// Only locations reachable from the pair of initial locations are built.
/// A composed location is closed when one of its components is closed.
/// Synchronised switches whose conjoined guard is unsatisfiable are dropped.
pub fn disjunction(b1: &Bddts, b2: &Bddts, d: &DomainSpec) -> Result<Bddts> {
    b1.compatible_with(b2).map_err(Error::IncompatibleModels)?;
    if !b1.saturated || !b2.saturated {
        return Err(Error::NotSaturated);
    }
    let start: Pair = (Some(b1.initial.clone()), Some(b2.initial.clone()));
    let mut seen: BTreeMap<String, Pair> = BTreeMap::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::from([start.clone()]);
    seen.insert(pair_name(&start), start.clone());
    order.push(start.clone());
    let mut switches = Vec::new();
    while let Some(p) = queue.pop_front() {
        let from = pair_name(&p);
        for g in &b1.gates {
            let t1: Vec<&Switch> =
                p.0.as_deref()
                    .map(|l| b1.outgoing(l, &g.name).collect())
                    .unwrap_or_default();
            let t2: Vec<&Switch> =
                p.1.as_deref()
                    .map(|l| b2.outgoing(l, &g.name).collect())
                    .unwrap_or_default();
            let mut emit = |target: Pair, guard: Term, assign| {
                let to = pair_name(&target);
                if !seen.contains_key(&to) {
                    seen.insert(to.clone(), target.clone());
                    order.push(target.clone());
                    queue.push_back(target);
                }
                switches.push(Switch {
                    from: from.clone(),
                    gate: g.name.clone(),
                    guard,
                    assign,
                    to,
                });
            };
            if !t1.is_empty() && !t2.is_empty() {
                for s1 in &t1 {
                    for s2 in &t2 {
                        let guard = Term::and(s1.guard.clone(), s2.guard.clone());
                        if find_model(&guard, d)?.is_none() {
                            continue;
                        }
                        let assign = s1.assign.union(&s2.assign, d)?;
                        emit((Some(s1.to.clone()), Some(s2.to.clone())), guard, assign);
                    }
                }
            } else if !t1.is_empty() {
                for s1 in &t1 {
                    emit((Some(s1.to.clone()), None), s1.guard.clone(), s1.assign.clone());
                }
            } else {
                for s2 in &t2 {
                    emit((None, Some(s2.to.clone())), s2.guard.clone(), s2.assign.clone());
                }
            }
        }
    }
    let locations = order
        .iter()
        .map(|p| {
            let l1 = p.0.as_deref().and_then(|l| b1.location(l));
            let l2 = p.1.as_deref().and_then(|l| b2.location(l));
            let closed = [l1, l2].iter().flatten().any(|l| l.nature == Nature::Closed);
            let og = match (l1.and_then(|l| l.og.clone()), l2.and_then(|l| l.og.clone())) {
                (Some(a), Some(b)) => Some(Term::and(a, b)),
                (a, b) => a.or(b),
            };
            Location {
                name: pair_name(p),
                nature: if closed { Nature::Closed } else { Nature::Open },
                og,
            }
        })
        .collect();
    Ok(Bddts {
        sorts: b1.sorts.clone(),
        variables: b1.variables.clone(),
        gates: b1.gates.clone(),
        locations,
        initial: pair_name(&start),
        ig: Term::or(b1.ig.clone(), b2.ig.clone()),
        switches,
        saturated: true,
    })
}

/// A location bijection with the matching of switches.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IsoWitness {
    pub locations: BTreeMap<String, String>,
    /// Pairs of switch indices.
    pub switches: Vec<(usize, usize)>,
}

struct Iso<'a> {
    b1: &'a Bddts,
    b2: &'a Bddts,
    d: &'a DomainSpec,
    out1: HashMap<&'a str, Vec<usize>>,
    out2: HashMap<&'a str, Vec<usize>>,
    guard_memo: HashMap<(usize, usize), bool>,
    og_memo: HashMap<(String, String), bool>,
}

#[derive(Clone, Default)]
struct State {
    f: BTreeMap<String, String>,
    finv: BTreeMap<String, String>,
    pending: Vec<String>,
    smap: Vec<(usize, usize)>,
}

impl<'a> Iso<'a> {
    fn switches_match(&mut self, i: usize, j: usize) -> Result<bool> {
        if let Some(r) = self.guard_memo.get(&(i, j)) {
            return Ok(*r);
        }
        let (s1, s2) = (&self.b1.switches[i], &self.b2.switches[j]);
        let r = s1.gate == s2.gate
            && sem_equiv(&s1.guard, &s2.guard, self.d)?
            && s1.assign.compatible(&s2.assign, self.d)?;
        self.guard_memo.insert((i, j), r);
        Ok(r)
    }

    fn locations_match(&mut self, l1: &str, l2: &str) -> Result<bool> {
        let (Some(a), Some(b)) = (self.b1.location(l1), self.b2.location(l2)) else {
            return Ok(false);
        };
        if a.nature != b.nature || a.og.is_some() != b.og.is_some() {
            return Ok(false);
        }
        let n1 = self.out1.get(l1).map(Vec::len).unwrap_or(0);
        let n2 = self.out2.get(l2).map(Vec::len).unwrap_or(0);
        if n1 != n2 {
            return Ok(false);
        }
        if let (Some(x), Some(y)) = (&a.og, &b.og) {
            let key = (l1.to_string(), l2.to_string());
            if let Some(r) = self.og_memo.get(&key) {
                return Ok(*r);
            }
            let r = sem_equiv(x, y, self.d)?;
            self.og_memo.insert(key, r);
            return Ok(r);
        }
        Ok(true)
    }

    fn map(&mut self, st: &mut State, l1: &str, l2: &str) -> Result<bool> {
        if let Some(m) = st.f.get(l1) {
            return Ok(m == l2);
        }
        if st.finv.contains_key(l2) || !self.locations_match(l1, l2)? {
            return Ok(false);
        }
        st.f.insert(l1.to_string(), l2.to_string());
        st.finv.insert(l2.to_string(), l1.to_string());
        st.pending.push(l1.to_string());
        Ok(true)
    }

    fn search(&mut self, mut st: State) -> Result<Option<State>> {
        if let Some(l1) = st.pending.pop() {
            let l2 = st.f[&l1].clone();
            let s1 = self.out1.get(l1.as_str()).cloned().unwrap_or_default();
            let s2 = self.out2.get(l2.as_str()).cloned().unwrap_or_default();
            let mut used = vec![false; s2.len()];
            return self.match_switches(st, &s1, &s2, 0, &mut used);
        }
        let next = self.b1.locations.iter().find(|l| !st.f.contains_key(&l.name));
        let Some(l1) = next.map(|l| l.name.clone()) else {
            return Ok(Some(st));
        };
        let candidates: Vec<String> = self
            .b2
            .locations
            .iter()
            .filter(|l| !st.finv.contains_key(&l.name))
            .map(|l| l.name.clone())
            .collect();
        for l2 in candidates {
            let mut branch = st.clone();
            if self.map(&mut branch, &l1, &l2)? {
                if let Some(done) = self.search(branch)? {
                    return Ok(Some(done));
                }
            }
        }
        Ok(None)
    }

    fn match_switches(
        &mut self,
        st: State,
        s1: &[usize],
        s2: &[usize],
        k: usize,
        used: &mut [bool],
    ) -> Result<Option<State>> {
        if k == s1.len() {
            return self.search(st);
        }
        let i = s1[k];
        for (pos, &j) in s2.iter().enumerate() {
            if used[pos] || !self.switches_match(i, j)? {
                continue;
            }
            let mut branch = st.clone();
            let (t1, t2) = (self.b1.switches[i].to.clone(), self.b2.switches[j].to.clone());
            if !self.map(&mut branch, &t1, &t2)? {
                continue;
            }
            branch.smap.push((i, j));
            used[pos] = true;
            let r = self.match_switches(branch, s1, s2, k + 1, used)?;
            used[pos] = false;
            if r.is_some() {
                return Ok(r);
            }
        }
        Ok(None)
    }
}

/// Searches for an isomorphism between two models with at most `cap`
/// locations each.
pub fn find_isomorphism(b1: &Bddts, b2: &Bddts, d: &DomainSpec, cap: usize) -> Result<Option<IsoWitness>> {
    for b in [b1, b2] {
        if b.locations.len() > cap {
            return Err(Error::IsoCapExceeded {
                locations: b.locations.len(),
                cap,
            });
        }
    }
    if b1.compatible_with(b2).is_err()
        || b1.locations.len() != b2.locations.len()
        || b1.switches.len() != b2.switches.len()
        || !sem_equiv(&b1.ig, &b2.ig, d)?
    {
        return Ok(None);
    }
    let mut iso = Iso {
        b1,
        b2,
        d,
        out1: out_index(b1),
        out2: out_index(b2),
        guard_memo: HashMap::new(),
        og_memo: HashMap::new(),
    };
    let mut st = State::default();
    if !iso.map(&mut st, &b1.initial, &b2.initial)? {
        return Ok(None);
    }
    Ok(iso.search(st)?.map(|st| {
        let mut switches = st.smap;
        switches.sort();
        IsoWitness {
            locations: st.f,
            switches,
        }
    }))
}

fn out_index(b: &Bddts) -> HashMap<&str, Vec<usize>> {
    let mut m: HashMap<&str, Vec<usize>> = HashMap::new();
    for (i, s) in b.switches.iter().enumerate() {
        m.entry(s.from.as_str()).or_default().push(i);
    }
    m
}

pub fn isomorphic(b1: &Bddts, b2: &Bddts, d: &DomainSpec) -> Result<bool> {
    Ok(find_isomorphism(b1, b2, d, DEFAULT_ISO_CAP)?.is_some())
}
