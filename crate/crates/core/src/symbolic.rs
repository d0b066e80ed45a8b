//! Symbolic semantics: paths, path conditions, execution conditions, goal
//! implications and bounded testing equivalence.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::model::Bddts;
use crate::terms::{
    find_difference, sem_implies, show_valuation, simplify, Assignment, DomainSpec, Term, Valuation, VarKind,
};

/// Default bound on the length of interaction sequences.
pub const DEFAULT_MAX_SIGMA: usize = 4;

/// A switch label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Label {
    pub gate: String,
    pub guard: Term,
    pub assign: Assignment,
}

/// A path from the initial location, tagged with its end location.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    pub labels: Vec<Label>,
    pub end: String,
}

impl Path {
    pub fn sigma(&self) -> Vec<String> {
        self.labels.iter().map(|l| l.gate.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.labels.is_empty() {
            return write!(f, "ε -> {}", self.end);
        }
        for (i, l) in self.labels.iter().enumerate() {
            if i > 0 {
                write!(f, " · ")?;
            }
            write!(f, "({}, {}, {})", l.gate, l.guard, l.assign)?;
        }
        write!(f, " -> {}", self.end)
    }
}

/// Checks that `ini` binds exactly the model and context variables of `b`
/// to values of their sorts.
pub fn check_ini(b: &Bddts, ini: &Valuation, d: &DomainSpec) -> Result<()> {
    for v in b.state_vars() {
        match ini.get(&v) {
            None => return Err(Error::IniNotTotal(format!("`{v}` is unbound"))),
            Some(x) if !d.contains(v.sort(), x) => {
                return Err(Error::IniNotTotal(format!(
                    "`{v}` = {x} is outside sort `{}`",
                    v.sort()
                )))
            }
            Some(_) => {}
        }
    }
    if let Some(k) = ini
        .keys()
        .find(|k| k.kind() == VarKind::Interaction || k.time() != 0 || b.decl(k.name()).is_none())
    {
        return Err(Error::IniNotTotal(format!("`{k}` is not a state variable")));
    }
    Ok(())
}

/// Every initial valuation over the sorts of `b`'s state variables.
pub fn all_inis(b: &Bddts, d: &DomainSpec) -> Result<Vec<Valuation>> {
    crate::terms::all_valuations(&b.state_vars().into_iter().collect(), d)
}

/// Path condition and path assignment, built step by step.
#[derive(Clone, Debug)]
pub struct SymState {
    /// Images of all model and context variables.
    pub assign: Assignment,
    pub eta: Term,
}

impl SymState {
    pub fn initial(ini: &Valuation) -> SymState {
        SymState {
            assign: Assignment::from_valuation(ini),
            eta: Term::tt(),
        }
    }

    /// Extends the path by one label. Unassigned model variables keep their
    /// image; context variables stay at their initial values.
    pub fn step(&self, label: &Label) -> SymState {
        let up = self.assign.upshift();
        let phi = label.guard.substitute(up.map());
        let eta = simplify(&Term::and(self.eta.upshift(), phi));
        let assign = up
            .iter()
            .map(|(x, img)| {
                let t = match label.assign.get(x) {
                    Some(e) if x.kind() == VarKind::Model => simplify(&e.substitute(up.map())),
                    _ => img.clone(),
                };
                (x.clone(), t)
            })
            .collect();
        SymState { assign, eta }
    }
}

fn label_of(s: &crate::model::Switch) -> Label {
    Label {
        gate: s.gate.clone(),
        guard: s.guard.clone(),
        assign: s.assign.clone(),
    }
}

/// All paths of length at most `max_len` from the initial location.
pub fn enumerate_paths(b: &Bddts, max_len: usize) -> Vec<Path> {
    let mut out = Vec::new();
    let mut stack = vec![Path {
        labels: Vec::new(),
        end: b.initial.clone(),
    }];
    while let Some(p) = stack.pop() {
        if p.len() < max_len {
            for s in b.outgoing_all(&p.end) {
                let mut labels = p.labels.clone();
                labels.push(label_of(s));
                stack.push(Path {
                    labels,
                    end: s.to.clone(),
                });
            }
        }
        out.push(p);
    }
    out.sort_by_key(Path::len);
    out
}

pub fn path_assignment(b: &Bddts, pi: &Path, ini: &Valuation, d: &DomainSpec) -> Result<Assignment> {
    check_ini(b, ini, d)?;
    Ok(run(pi, ini).assign)
}

pub fn path_condition(b: &Bddts, pi: &Path, ini: &Valuation, d: &DomainSpec) -> Result<Term> {
    check_ini(b, ini, d)?;
    Ok(run(pi, ini).eta)
}

fn run(pi: &Path, ini: &Valuation) -> SymState {
    pi.labels.iter().fold(SymState::initial(ini), |s, l| s.step(l))
}

/// Substitutes the model variable images of a path assignment.
fn apply_model_images(t: &Term, a: &Assignment) -> Term {
    t.substitute(a.restrict(|v| v.kind() == VarKind::Model).map())
}

/// Execution condition and goal implication of one interaction sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicSummary {
    pub sigma: Vec<String>,
    pub ec: Term,
    pub gi: Term,
}

#[derive(Default)]
struct Acc {
    etas: Vec<Term>,
    goals: Vec<Term>,
}

/// Computes EC and GI for every interaction sequence of length at most
/// `max_len` that some path realises. Sequences that are absent have EC
/// `false` and GI `true`.
///
/// The initial guard enters EC with `ini` substituted, and output guards keep
/// their context variables free.
pub fn summaries(
    b: &Bddts,
    ini: &Valuation,
    max_len: usize,
    d: &DomainSpec,
) -> Result<BTreeMap<Vec<String>, SymbolicSummary>> {
    if !b.saturated {
        return Err(Error::NotSaturated);
    }
    check_ini(b, ini, d)?;
    let mut acc: BTreeMap<Vec<String>, Acc> = BTreeMap::new();
    let mut stack = vec![(Vec::<String>::new(), b.initial.clone(), SymState::initial(ini))];
    while let Some((sigma, loc, st)) = stack.pop() {
        let entry = acc.entry(sigma.clone()).or_default();
        entry.etas.push(st.eta.clone());
        if let Some(og) = b.og(&loc) {
            let goal = simplify(&Term::implies(st.eta.clone(), apply_model_images(og, &st.assign)));
            entry.goals.push(goal);
        }
        if sigma.len() == max_len {
            continue;
        }
        for s in b.outgoing_all(&loc) {
            let next = st.step(&label_of(s));
            if next.eta.is_false() {
                continue;
            }
            let mut sg = sigma.clone();
            sg.push(s.gate.clone());
            stack.push((sg, s.to.clone(), next));
        }
    }
    let ig = simplify(&b.ig.substitute(Assignment::from_valuation(ini).map()));
    Ok(acc
        .into_iter()
        .map(|(sigma, a)| {
            let ec = simplify(&Term::and(ig.clone(), Term::or_all(a.etas)));
            let gi = simplify(&Term::and_all(a.goals));
            (sigma.clone(), SymbolicSummary { sigma, ec, gi })
        })
        .collect())
}

fn summary_for(b: &Bddts, ini: &Valuation, sigma: &[String], d: &DomainSpec) -> Result<Option<SymbolicSummary>> {
    if !b.saturated {
        return Err(Error::NotSaturated);
    }
    check_ini(b, ini, d)?;
    let mut etas = Vec::new();
    let mut goals = Vec::new();
    let mut frontier = vec![(b.initial.clone(), SymState::initial(ini))];
    for gate in sigma {
        let mut next = Vec::new();
        for (loc, st) in &frontier {
            for s in b.outgoing(loc, gate) {
                let n = st.step(&label_of(s));
                if !n.eta.is_false() {
                    next.push((s.to.clone(), n));
                }
            }
        }
        frontier = next;
    }
    for (loc, st) in frontier {
        if let Some(og) = b.og(&loc) {
            goals.push(simplify(&Term::implies(
                st.eta.clone(),
                apply_model_images(og, &st.assign),
            )));
        }
        etas.push(st.eta);
    }
    let ig = simplify(&b.ig.substitute(Assignment::from_valuation(ini).map()));
    Ok(Some(SymbolicSummary {
        sigma: sigma.to_vec(),
        ec: simplify(&Term::and(ig, Term::or_all(etas))),
        gi: simplify(&Term::and_all(goals)),
    }))
}

/// `IG[ini] ∧ ⋁ η_π` over the paths with interaction sequence `sigma`.
pub fn execution_condition(b: &Bddts, ini: &Valuation, sigma: &[String], d: &DomainSpec) -> Result<Term> {
    Ok(summary_for(b, ini, sigma, d)?.map(|s| s.ec).unwrap_or_else(Term::ff))
}

/// `⋀ (η_π ⇒ OG(l)[a_π])` over the goal-ending paths with sequence `sigma`.
pub fn goal_implication(b: &Bddts, ini: &Valuation, sigma: &[String], d: &DomainSpec) -> Result<Term> {
    Ok(summary_for(b, ini, sigma, d)?.map(|s| s.gi).unwrap_or_else(Term::tt))
}

/// `π1 ⊑ π2`: same interactions, each guard of `π2` implies the matching
/// guard of `π1`, and each assignment of `π1` is contained in that of `π2`.
pub fn path_subsumes(p1: &Path, p2: &Path, d: &DomainSpec) -> Result<bool> {
    if p1.len() != p2.len() {
        return Ok(false);
    }
    for (l1, l2) in p1.labels.iter().zip(&p2.labels) {
        if l1.gate != l2.gate || !sem_implies(&l2.guard, &l1.guard, d)? {
            return Ok(false);
        }
        for (x, t) in l1.assign.iter() {
            match l2.assign.get(x) {
                Some(u) if find_difference(t, u, d)?.is_none() => {}
                _ => return Ok(false),
            }
        }
    }
    Ok(true)
}

/// Paths with interaction sequence `sigma` ending in `loc`.
pub fn location_paths(b: &Bddts, sigma: &[String], loc: &str) -> Vec<Path> {
    enumerate_paths(b, sigma.len())
        .into_iter()
        .filter(|p| p.end == loc && p.sigma() == sigma)
        .collect()
}

/// The location paths that subsume `pi`.
pub fn location_paths_subsuming(
    b: &Bddts,
    sigma: &[String],
    loc: &str,
    pi: &Path,
    d: &DomainSpec,
) -> Result<Vec<Path>> {
    let mut out = Vec::new();
    for p in location_paths(b, sigma, loc) {
        if path_subsumes(pi, &p, d)? {
            out.push(p);
        }
    }
    Ok(out)
}

/// All interaction sequences over `gates` of length at most `k`, shortest
/// first and lexicographic within a length.
pub fn sigmas(gates: &[String], k: usize) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::new();
        for p in &layer {
            for g in gates {
                let mut q: Vec<String> = p.clone();
                q.push(g.clone());
                next.push(q);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    ExecutionCondition,
    GoalImplication,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EquivReport {
    Equivalent {
        bound: usize,
        inis: usize,
        sigmas: usize,
    },
    Counterexample {
        ini: Valuation,
        sigma: Vec<String>,
        side: Side,
        witness: Valuation,
    },
}

impl EquivReport {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, EquivReport::Equivalent { .. })
    }
}

impl fmt::Display for EquivReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EquivReport::Equivalent { bound, inis, sigmas } => write!(
                f,
                "equivalent up to |σ| ≤ {bound} ({inis} initial valuations, {sigmas} sequences each)"
            ),
            EquivReport::Counterexample {
                ini,
                sigma,
                side,
                witness,
            } => write!(
                f,
                "not equivalent: ini {}, σ = <{}>, {} differs at {}",
                show_valuation(ini),
                sigma.join(", "),
                match side {
                    Side::ExecutionCondition => "execution condition",
                    Side::GoalImplication => "goal implication",
                },
                show_valuation(witness)
            ),
        }
    }
}

fn folded(
    set: &[&Bddts],
    ini: &Valuation,
    k: usize,
    d: &DomainSpec,
) -> Result<Vec<BTreeMap<Vec<String>, SymbolicSummary>>> {
    let mut out = Vec::new();
    for b in set {
        let ig = b.ig.substitute(Assignment::from_valuation(ini).map());
        if !crate::terms::is_valid(&ig, d)? {
            continue;
        }
        out.push(summaries(b, ini, k, d)?);
    }
    Ok(out)
}

/// Bounded testing equivalence of two sets of saturated compatible models.
///
/// For each initial valuation the sets are restricted to the models whose
/// initial guard holds. Execution conditions are folded with `∨`, goal
/// implications with `∧`, and compared for every sequence up to `max_sigma`.
pub fn testing_equivalent(
    left: &[&Bddts],
    right: &[&Bddts],
    inis: &[Valuation],
    max_sigma: usize,
    d: &DomainSpec,
) -> Result<EquivReport> {
    let all: Vec<&Bddts> = left.iter().chain(right).copied().collect();
    let Some(first) = all.first() else {
        return Ok(EquivReport::Equivalent {
            bound: max_sigma,
            inis: inis.len(),
            sigmas: 0,
        });
    };
    for b in &all {
        if !b.saturated {
            return Err(Error::NotSaturated);
        }
        first.compatible_with(b).map_err(Error::IncompatibleModels)?;
    }
    let sigmas = sigmas(&first.interactions(), max_sigma);
    for ini in inis {
        let l = folded(left, ini, max_sigma, d)?;
        let r = folded(right, ini, max_sigma, d)?;
        for sigma in &sigmas {
            let fold = |sums: &[BTreeMap<Vec<String>, SymbolicSummary>]| {
                let ec = Term::or_all(
                    sums.iter()
                        .map(|m| m.get(sigma).map(|s| s.ec.clone()).unwrap_or_else(Term::ff)),
                );
                let gi = Term::and_all(
                    sums.iter()
                        .map(|m| m.get(sigma).map(|s| s.gi.clone()).unwrap_or_else(Term::tt)),
                );
                (ec, gi)
            };
            let (ec_l, gi_l) = fold(&l);
            let (ec_r, gi_r) = fold(&r);
            if let Some(w) = find_difference(&ec_l, &ec_r, d)? {
                return Ok(EquivReport::Counterexample {
                    ini: ini.clone(),
                    sigma: sigma.clone(),
                    side: Side::ExecutionCondition,
                    witness: w,
                });
            }
            if let Some(w) = find_difference(&gi_l, &gi_r, d)? {
                return Ok(EquivReport::Counterexample {
                    ini: ini.clone(),
                    sigma: sigma.clone(),
                    side: Side::GoalImplication,
                    witness: w,
                });
            }
        }
    }
    Ok(EquivReport::Equivalent {
        bound: max_sigma,
        inis: inis.len(),
        sigmas: sigmas.len(),
    })
}
