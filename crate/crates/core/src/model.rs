//! The BDDTS data model and its well-formedness checks.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::terms::{
    find_model, show_valuation, Assignment, DomainSpec, Scope, Sort, Term, Valuation, Var, VarDecl, VarKind,
};

/// Name of the location added for unspecified inputs and open-location outputs.
pub const TOP: &str = "__top";
/// Name of the location added for unspecified outputs of closed locations.
pub const BOT: &str = "__bot";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Nature {
    Open,
    Closed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Input,
    Output,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Input => "in",
            Direction::Output => "out",
        }
    }
}

/// A gate with its interaction variables. Every gate carries exactly one
/// interaction, so gate names double as interaction names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gate {
    pub name: String,
    pub direction: Direction,
    pub params: Vec<Var>,
    /// Context variable name to interaction variable name.
    pub renames: BTreeMap<String, String>,
}

impl Gate {
    pub fn is_output(&self) -> bool {
        self.direction == Direction::Output
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Location {
    pub name: String,
    pub nature: Nature,
    /// Output guard; `None` when undefined.
    pub og: Option<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Switch {
    pub from: String,
    pub gate: String,
    pub guard: Term,
    pub assign: Assignment,
    pub to: String,
}

impl fmt::Display for Switch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} --{} [{}] / {}--> {}",
            self.from, self.gate, self.guard, self.assign, self.to
        )
    }
}

#[derive(Clone, Debug)]
pub struct Bddts {
    pub sorts: Vec<Sort>,
    pub variables: Vec<Arc<VarDecl>>,
    pub gates: Vec<Gate>,
    pub locations: Vec<Location>,
    pub initial: String,
    pub ig: Term,
    pub switches: Vec<Switch>,
    pub saturated: bool,
}

impl Bddts {
    pub fn domain(&self) -> Result<DomainSpec> {
        DomainSpec::new(&self.sorts)
    }

    pub fn var_table(&self) -> BTreeMap<String, Arc<VarDecl>> {
        self.variables.iter().map(|d| (d.name.clone(), d.clone())).collect()
    }

    pub fn decl(&self, name: &str) -> Option<&Arc<VarDecl>> {
        self.variables.iter().find(|d| d.name == name)
    }

    pub fn var(&self, name: &str) -> Option<Var> {
        self.decl(name).map(|d| Var::new(d.clone()))
    }

    fn vars_of(&self, kind: VarKind) -> Vec<Var> {
        self.variables
            .iter()
            .filter(|d| d.kind == kind)
            .map(|d| Var::new(d.clone()))
            .collect()
    }

    pub fn model_vars(&self) -> Vec<Var> {
        self.vars_of(VarKind::Model)
    }

    pub fn context_vars(&self) -> Vec<Var> {
        self.vars_of(VarKind::Context)
    }

    pub fn interaction_vars(&self) -> Vec<Var> {
        self.vars_of(VarKind::Interaction)
    }

    /// Model and context variables.
    pub fn state_vars(&self) -> Vec<Var> {
        self.variables
            .iter()
            .filter(|d| d.kind != VarKind::Interaction)
            .map(|d| Var::new(d.clone()))
            .collect()
    }

    /// Parses a formula against this model's variables and sorts.
    pub fn parse_formula(&self, src: &str, d: &DomainSpec) -> Result<Term> {
        let vars = self.var_table();
        crate::terms::parse_formula(src, &Scope { vars: &vars, domain: d })
    }

    pub fn gate(&self, name: &str) -> Option<&Gate> {
        self.gates.iter().find(|g| g.name == name)
    }

    pub fn location(&self, name: &str) -> Option<&Location> {
        self.locations.iter().find(|l| l.name == name)
    }

    pub fn location_mut(&mut self, name: &str) -> Option<&mut Location> {
        self.locations.iter_mut().find(|l| l.name == name)
    }

    pub fn nature(&self, name: &str) -> Option<Nature> {
        self.location(name).map(|l| l.nature)
    }

    pub fn og(&self, name: &str) -> Option<&Term> {
        self.location(name).and_then(|l| l.og.as_ref())
    }

    /// Gate names in declaration order.
    pub fn interactions(&self) -> Vec<String> {
        self.gates.iter().map(|g| g.name.clone()).collect()
    }

    pub fn outgoing<'a>(&'a self, from: &'a str, gate: &'a str) -> impl Iterator<Item = &'a Switch> + 'a {
        self.switches.iter().filter(move |s| s.from == from && s.gate == gate)
    }

    pub fn outgoing_all<'a>(&'a self, from: &'a str) -> impl Iterator<Item = &'a Switch> + 'a {
        self.switches.iter().filter(move |s| s.from == from)
    }

    /// Switches leaving the initial location.
    pub fn initial_switches(&self) -> impl Iterator<Item = &Switch> {
        self.outgoing_all(&self.initial)
    }

    /// Locations with a defined output guard.
    pub fn goals(&self) -> impl Iterator<Item = &Location> {
        self.locations.iter().filter(|l| l.og.is_some())
    }

    /// Locations without outgoing switches.
    pub fn is_sink(&self, name: &str) -> bool {
        self.outgoing_all(name).next().is_none()
    }

    /// Every switch into a goal location is an output switch with a closed
    /// source, and the initial location has no output guard.
    pub fn is_output_rich(&self) -> bool {
        self.output_richness_violation().is_none()
    }

    pub fn output_richness_violation(&self) -> Option<String> {
        if self.og(&self.initial).is_some() {
            return Some(format!("initial location `{}` has an output guard", self.initial));
        }
        for s in &self.switches {
            if self.og(&s.to).is_none() {
                continue;
            }
            if !self.gate(&s.gate).map(Gate::is_output).unwrap_or(false) {
                return Some(format!("switch `{s}` enters a goal through an input"));
            }
            if self.nature(&s.from) != Some(Nature::Closed) {
                return Some(format!("switch `{s}` enters a goal from an open location"));
            }
        }
        None
    }

    /// Least fixpoint of active variables per location.
    pub fn active_vars(&self) -> BTreeMap<String, BTreeSet<Var>> {
        let mut active: BTreeMap<String, BTreeSet<Var>> = self
            .locations
            .iter()
            .map(|l| {
                let vs =
                    l.og.as_ref()
                        .map(|t| {
                            t.vars()
                                .into_iter()
                                .filter(|v| v.kind() != VarKind::Interaction)
                                .collect()
                        })
                        .unwrap_or_default();
                (l.name.clone(), vs)
            })
            .collect();
        loop {
            let mut changed = false;
            for s in &self.switches {
                let mut add: BTreeSet<Var> = s
                    .guard
                    .vars()
                    .into_iter()
                    .filter(|v| v.kind() != VarKind::Interaction)
                    .collect();
                if let Some(t) = active.get(&s.to) {
                    add.extend(t.iter().cloned());
                }
                let src = active.entry(s.from.clone()).or_default();
                for v in add {
                    changed |= src.insert(v);
                }
            }
            if !changed {
                return active;
            }
        }
    }

    /// Checks well-formedness under `d`.
    pub fn validate(&self, d: &DomainSpec) -> Result<ValidationReport> {
        let mut r = ValidationReport::default();
        self.check_declarations(d, &mut r);
        if !r.violations.is_empty() {
            return Ok(r);
        }
        match self.nature(&self.initial) {
            None => r.push(Violation::UnknownLocation(self.initial.clone())),
            Some(Nature::Closed) => r.push(Violation::InitialNotOpen(self.initial.clone())),
            Some(Nature::Open) => {}
        }
        self.check_formula("initial guard", &self.ig, None, d, &mut r);
        for l in &self.locations {
            if let Some(og) = &l.og {
                self.check_formula(&format!("output guard of `{}`", l.name), og, None, d, &mut r);
            }
        }
        let mut structurally_ok = true;
        for (i, s) in self.switches.iter().enumerate() {
            for loc in [&s.from, &s.to] {
                if self.location(loc).is_none() {
                    r.push(Violation::UnknownLocation(loc.clone()));
                    structurally_ok = false;
                }
            }
            let Some(g) = self.gate(&s.gate) else {
                r.push(Violation::UnknownGate(s.gate.clone()));
                structurally_ok = false;
                continue;
            };
            self.check_formula(&format!("guard of switch {i}"), &s.guard, Some(g), d, &mut r);
            for (x, e) in s.assign.iter() {
                if x.kind() != VarKind::Model || x.time() != 0 || self.decl(x.name()).is_none() {
                    r.push(Violation::AssignmentScope {
                        switch: i,
                        detail: format!("`{x}` is not a model variable"),
                    });
                    continue;
                }
                if let Err(e) = e.type_of(d).and_then(|t| {
                    let want = d.ty(x.sort())?;
                    if want.compatible(&t) {
                        Ok(())
                    } else {
                        Err(Error::SortMismatch(format!("`{x}` gets {t}")))
                    }
                }) {
                    r.push(Violation::Sort(format!("assignment of switch {i}: {e}")));
                }
                for v in e.vars() {
                    if !self.in_scope(&v, Some(g)) {
                        r.push(Violation::AssignmentScope {
                            switch: i,
                            detail: format!("`{v}` is out of scope in `{x} := {e}`"),
                        });
                    }
                }
            }
        }
        if !structurally_ok {
            return Ok(r);
        }
        let active = self.active_vars();
        for (i, s) in self.switches.iter().enumerate() {
            let missing: Vec<String> = active[&s.to]
                .iter()
                .filter(|v| v.kind() == VarKind::Model && !s.assign.contains(v))
                .map(|v| v.to_string())
                .collect();
            if !missing.is_empty() {
                r.push(Violation::AssignmentNotCovering { switch: i, missing });
            }
        }
        for (i, s) in self.switches.iter().enumerate() {
            for (j, t) in self.switches.iter().enumerate().skip(i + 1) {
                if s.from != t.from || s.gate != t.gate {
                    continue;
                }
                match find_model(&Term::and(s.guard.clone(), t.guard.clone()), d) {
                    Ok(Some(w)) => r.push(Violation::Nondeterminism {
                        first: i,
                        second: j,
                        witness: w,
                    }),
                    Ok(None) => {}
                    Err(e) => return Err(e),
                }
            }
        }
        Ok(r)
    }

    fn in_scope(&self, v: &Var, gate: Option<&Gate>) -> bool {
        if v.time() != 0
            || self
                .decl(v.name())
                .map(|d| d.as_ref() != v.decl().as_ref())
                .unwrap_or(true)
        {
            return false;
        }
        match v.kind() {
            VarKind::Model | VarKind::Context => true,
            VarKind::Interaction => gate.map(|g| g.params.contains(v)).unwrap_or(false),
        }
    }

    fn check_formula(&self, what: &str, t: &Term, gate: Option<&Gate>, d: &DomainSpec, r: &mut ValidationReport) {
        if let Err(e) = t.check_bool(d) {
            r.push(Violation::Sort(format!("{what}: {e}")));
        }
        for v in t.vars() {
            if !self.in_scope(&v, gate) {
                r.push(Violation::GuardScope {
                    what: what.to_string(),
                    var: v.to_string(),
                });
            }
        }
    }

    fn check_declarations(&self, d: &DomainSpec, r: &mut ValidationReport) {
        let mut seen = BTreeSet::new();
        for v in &self.variables {
            if !seen.insert(v.name.as_str()) {
                r.push(Violation::Declaration(format!("duplicate variable `{}`", v.name)));
            }
            if d.get(&v.sort).is_err() {
                r.push(Violation::Declaration(format!(
                    "variable `{}` has unknown sort `{}`",
                    v.name, v.sort
                )));
            }
        }
        let mut seen = BTreeSet::new();
        for l in &self.locations {
            if !seen.insert(l.name.as_str()) {
                r.push(Violation::Declaration(format!("duplicate location `{}`", l.name)));
            }
        }
        let mut owner: BTreeMap<String, &str> = BTreeMap::new();
        let mut seen = BTreeSet::new();
        for g in &self.gates {
            if !seen.insert(g.name.as_str()) {
                r.push(Violation::Declaration(format!("duplicate gate `{}`", g.name)));
            }
            let mut params = BTreeSet::new();
            for p in &g.params {
                if p.kind() != VarKind::Interaction || p.time() != 0 || self.decl(p.name()).is_none() {
                    r.push(Violation::GateArity {
                        gate: g.name.clone(),
                        detail: format!("`{p}` is not an interaction variable"),
                    });
                }
                if !params.insert(p.name()) {
                    r.push(Violation::GateArity {
                        gate: g.name.clone(),
                        detail: format!("`{p}` repeated"),
                    });
                }
                if let Some(other) = owner.insert(p.name().to_string(), &g.name) {
                    r.push(Violation::GateArity {
                        gate: g.name.clone(),
                        detail: format!("`{p}` also belongs to gate `{other}`"),
                    });
                }
            }
            for (c, iv) in &g.renames {
                let ok_c = self.decl(c).map(|x| x.kind == VarKind::Context).unwrap_or(false);
                let ok_iv = g.params.iter().any(|p| p.name() == iv);
                if !ok_c || !ok_iv {
                    r.push(Violation::GateArity {
                        gate: g.name.clone(),
                        detail: format!("renaming `{c}` -> `{iv}` must map a context variable to a parameter"),
                    });
                } else if self.decl(c).map(|x| &x.sort)
                    != g.params.iter().find(|p| p.name() == iv).map(|p| &p.decl().sort)
                {
                    r.push(Violation::GateArity {
                        gate: g.name.clone(),
                        detail: format!("renaming `{c}` -> `{iv}` changes sort"),
                    });
                }
            }
        }
    }

    /// Sorts, variables and gates agree.
    pub fn compatible_with(&self, other: &Bddts) -> Result<(), String> {
        let sorts =
            |b: &Bddts| -> BTreeMap<String, Sort> { b.sorts.iter().map(|s| (s.name.clone(), s.clone())).collect() };
        if sorts(self) != sorts(other) {
            return Err("sort declarations differ".into());
        }
        let vars = |b: &Bddts| -> BTreeSet<(String, String, VarKind)> {
            b.variables
                .iter()
                .map(|d| (d.name.clone(), d.sort.clone(), d.kind))
                .collect()
        };
        if vars(self) != vars(other) {
            return Err("variable declarations differ".into());
        }
        let gates =
            |b: &Bddts| -> BTreeMap<String, Gate> { b.gates.iter().map(|g| (g.name.clone(), g.clone())).collect() };
        if gates(self) != gates(other) {
            return Err("gate declarations differ".into());
        }
        Ok(())
    }
}

/// Checks that two models share variables and interactions.
pub fn compatible_models(b1: &Bddts, b2: &Bddts) -> bool {
    b1.compatible_with(b2).is_ok()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Declaration(String),
    UnknownLocation(String),
    UnknownGate(String),
    InitialNotOpen(String),
    GateArity {
        gate: String,
        detail: String,
    },
    GuardScope {
        what: String,
        var: String,
    },
    AssignmentScope {
        switch: usize,
        detail: String,
    },
    AssignmentNotCovering {
        switch: usize,
        missing: Vec<String>,
    },
    Nondeterminism {
        first: usize,
        second: usize,
        witness: Valuation,
    },
    Sort(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Declaration(s) => write!(f, "declaration: {s}"),
            Violation::UnknownLocation(l) => write!(f, "unknown location `{l}`"),
            Violation::UnknownGate(g) => write!(f, "unknown gate `{g}`"),
            Violation::InitialNotOpen(l) => write!(f, "initial location `{l}` is not open"),
            Violation::GateArity { gate, detail } => write!(f, "gate `{gate}`: {detail}"),
            Violation::GuardScope { what, var } => write!(f, "{what}: variable `{var}` is out of scope"),
            Violation::AssignmentScope { switch, detail } => write!(f, "switch {switch}: {detail}"),
            Violation::AssignmentNotCovering { switch, missing } => write!(
                f,
                "switch {switch}: assignment does not cover active variables {}",
                missing.join(", ")
            ),
            Violation::Nondeterminism { first, second, witness } => write!(
                f,
                "switches {first} and {second} are both enabled at {}",
                show_valuation(witness)
            ),
            Violation::Sort(s) => write!(f, "sort error: {s}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }

    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}
