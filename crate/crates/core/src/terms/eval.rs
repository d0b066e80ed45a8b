use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};

use super::sort::{DomainSpec, Value};
use super::term::{BinOp, Term, Valuation, Var};

/// Evaluates `t` under `val`. Every variable of `t` must be bound.
pub fn evaluate(t: &Term, val: &Valuation) -> Result<Value> {
    match t {
        Term::Const(v) => Ok(v.clone()),
        Term::Var(v) => val.get(v).cloned().ok_or_else(|| Error::UnboundVariable(v.to_string())),
        Term::Not(a) => Ok(Value::Bool(!bool_of(&evaluate(a, val)?, t)?)),
        Term::Bin(op, a, b) => {
            let x = evaluate(a, val)?;
            let y = evaluate(b, val)?;
            apply(*op, &x, &y, t)
        }
        Term::Contains(l, e) => {
            let l = evaluate(l, val)?;
            let e = evaluate(e, val)?;
            match l {
                Value::List(items) => Ok(Value::Bool(items.contains(&e))),
                _ => Err(mismatch(t)),
            }
        }
    }
}

/// Evaluates a boolean term.
pub fn holds(t: &Term, val: &Valuation) -> Result<bool> {
    bool_of(&evaluate(t, val)?, t)
}

fn mismatch(t: &Term) -> Error {
    Error::SortMismatch(format!("ill-sorted operands in `{t}`"))
}

fn bool_of(v: &Value, t: &Term) -> Result<bool> {
    v.as_bool().ok_or_else(|| mismatch(t))
}

fn apply(op: BinOp, x: &Value, y: &Value, t: &Term) -> Result<Value> {
    use Value::{Bool, Int};
    Ok(match (op, x, y) {
        (BinOp::And, Bool(a), Bool(b)) => Bool(*a && *b),
        (BinOp::Or, Bool(a), Bool(b)) => Bool(*a || *b),
        (BinOp::Implies, Bool(a), Bool(b)) => Bool(!*a || *b),
        (BinOp::Eq, a, b) => Bool(a == b),
        (BinOp::Ne, a, b) => Bool(a != b),
        (BinOp::Lt, Int(a), Int(b)) => Bool(a < b),
        (BinOp::Le, Int(a), Int(b)) => Bool(a <= b),
        (BinOp::Gt, Int(a), Int(b)) => Bool(a > b),
        (BinOp::Ge, Int(a), Int(b)) => Bool(a >= b),
        (BinOp::Add, Int(a), Int(b)) => Int(a.wrapping_add(*b)),
        (BinOp::Sub, Int(a), Int(b)) => Int(a.wrapping_sub(*b)),
        _ => return Err(mismatch(t)),
    })
}

/// Folds ground subterms and boolean identities. The result is semantically
/// equal to the input and mentions no new variables.
pub fn simplify(t: &Term) -> Term {
    match t {
        Term::Const(_) | Term::Var(_) => t.clone(),
        Term::Not(a) => match simplify(a) {
            Term::Const(Value::Bool(b)) => Term::Const(Value::Bool(!b)),
            Term::Not(inner) => *inner,
            s => Term::Not(Box::new(s)),
        },
        Term::Contains(l, e) => {
            let l = simplify(l);
            let e = simplify(e);
            if let (Term::Const(Value::List(items)), Term::Const(v)) = (&l, &e) {
                return Term::Const(Value::Bool(items.contains(v)));
            }
            Term::Contains(Box::new(l), Box::new(e))
        }
        Term::Bin(op, a, b) => {
            let a = simplify(a);
            let b = simplify(b);
            if let (Term::Const(x), Term::Const(y)) = (&a, &b) {
                if let Ok(v) = apply(*op, x, y, t) {
                    return Term::Const(v);
                }
            }
            match op {
                BinOp::And => {
                    if a.is_false() || b.is_false() {
                        return Term::ff();
                    }
                    if a.is_true() {
                        return b;
                    }
                    if b.is_true() || a == b {
                        return a;
                    }
                }
                BinOp::Or => {
                    if a.is_true() || b.is_true() {
                        return Term::tt();
                    }
                    if a.is_false() {
                        return b;
                    }
                    if b.is_false() || a == b {
                        return a;
                    }
                }
                BinOp::Implies => {
                    if a.is_false() || b.is_true() {
                        return Term::tt();
                    }
                    if a.is_true() {
                        return b;
                    }
                    if b.is_false() {
                        return simplify(&Term::not(a));
                    }
                }
                BinOp::Eq if a == b => return Term::tt(),
                BinOp::Ne if a == b => return Term::ff(),
                _ => {}
            }
            Term::Bin(*op, Box::new(a), Box::new(b))
        }
    }
}

/// Compact value used by the compiled evaluator. Enum and list values are
/// interned, so equality is identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Cv {
    B(bool),
    I(i64),
    E(u32),
    L(u32),
}

#[derive(Default)]
pub(crate) struct Interner {
    ids: HashMap<Value, u32>,
    lists: Vec<Vec<Cv>>,
}

impl Interner {
    pub(crate) fn intern(&mut self, v: &Value) -> Cv {
        match v {
            Value::Bool(b) => Cv::B(*b),
            Value::Int(i) => Cv::I(*i),
            Value::Enum { .. } => {
                let n = self.ids.len() as u32;
                Cv::E(*self.ids.entry(v.clone()).or_insert(n))
            }
            Value::List(items) => {
                if let Some(id) = self.ids.get(v) {
                    return Cv::L(*id);
                }
                let elems: Vec<Cv> = items.iter().map(|x| self.intern(x)).collect();
                let id = self.ids.len() as u32;
                self.ids.insert(v.clone(), id);
                if self.lists.len() <= id as usize {
                    self.lists.resize(id as usize + 1, Vec::new());
                }
                self.lists[id as usize] = elems;
                Cv::L(id)
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Ins {
    Push(Cv),
    Load(usize),
    Not,
    Bin(BinOp),
    Contains,
}

/// A term compiled to postfix form over indexed variable slots.
pub(crate) struct Compiled {
    code: Vec<Ins>,
}

impl Compiled {
    pub(crate) fn new(t: &Term, slots: &HashMap<Var, usize>, int: &mut Interner) -> Result<Self> {
        let mut code = Vec::new();
        emit(t, slots, int, &mut code)?;
        Ok(Compiled { code })
    }

    pub(crate) fn eval(&self, env: &[Cv], lists: &[Vec<Cv>], stack: &mut Vec<Cv>) -> Result<Cv> {
        stack.clear();
        for ins in &self.code {
            match *ins {
                Ins::Push(c) => stack.push(c),
                Ins::Load(i) => stack.push(env[i]),
                Ins::Not => match stack.last_mut() {
                    Some(Cv::B(b)) => *b = !*b,
                    _ => return Err(Error::SortMismatch("negation of a non-boolean".into())),
                },
                Ins::Contains => {
                    let e = stack.pop();
                    let l = stack.pop();
                    match (l, e) {
                        (Some(Cv::L(id)), Some(e)) => stack.push(Cv::B(lists[id as usize].contains(&e))),
                        _ => return Err(Error::SortMismatch("`contains` on a non-list".into())),
                    }
                }
                Ins::Bin(op) => {
                    let y = stack.pop();
                    let x = stack.pop();
                    let r = match (op, x, y) {
                        (BinOp::And, Some(Cv::B(a)), Some(Cv::B(b))) => Cv::B(a && b),
                        (BinOp::Or, Some(Cv::B(a)), Some(Cv::B(b))) => Cv::B(a || b),
                        (BinOp::Implies, Some(Cv::B(a)), Some(Cv::B(b))) => Cv::B(!a || b),
                        (BinOp::Eq, Some(a), Some(b)) => Cv::B(a == b),
                        (BinOp::Ne, Some(a), Some(b)) => Cv::B(a != b),
                        (BinOp::Lt, Some(Cv::I(a)), Some(Cv::I(b))) => Cv::B(a < b),
                        (BinOp::Le, Some(Cv::I(a)), Some(Cv::I(b))) => Cv::B(a <= b),
                        (BinOp::Gt, Some(Cv::I(a)), Some(Cv::I(b))) => Cv::B(a > b),
                        (BinOp::Ge, Some(Cv::I(a)), Some(Cv::I(b))) => Cv::B(a >= b),
                        (BinOp::Add, Some(Cv::I(a)), Some(Cv::I(b))) => Cv::I(a.wrapping_add(b)),
                        (BinOp::Sub, Some(Cv::I(a)), Some(Cv::I(b))) => Cv::I(a.wrapping_sub(b)),
                        _ => {
                            return Err(Error::SortMismatch(format!(
                                "ill-sorted operands for `{}`",
                                op.symbol()
                            )))
                        }
                    };
                    stack.push(r);
                }
            }
        }
        stack.pop().ok_or_else(|| Error::SortMismatch("empty program".into()))
    }
}

fn emit(t: &Term, slots: &HashMap<Var, usize>, int: &mut Interner, code: &mut Vec<Ins>) -> Result<()> {
    match t {
        Term::Const(v) => code.push(Ins::Push(int.intern(v))),
        Term::Var(v) => code.push(Ins::Load(
            *slots.get(v).ok_or_else(|| Error::UnboundVariable(v.to_string()))?,
        )),
        Term::Not(a) => {
            emit(a, slots, int, code)?;
            code.push(Ins::Not);
        }
        Term::Bin(op, a, b) => {
            emit(a, slots, int, code)?;
            emit(b, slots, int, code)?;
            code.push(Ins::Bin(*op));
        }
        Term::Contains(a, b) => {
            emit(a, slots, int, code)?;
            emit(b, slots, int, code)?;
            code.push(Ins::Contains);
        }
    }
    Ok(())
}

/// Exhaustive search over all valuations of a variable set.
pub(crate) struct Space {
    pub(crate) vars: Vec<Var>,
    pub(crate) slots: HashMap<Var, usize>,
    pub(crate) universes: Vec<Vec<Cv>>,
    pub(crate) raw: Vec<Vec<Value>>,
    pub(crate) interner: Interner,
}

impl Space {
    pub(crate) fn new(vars: BTreeSet<Var>, d: &DomainSpec) -> Result<Self> {
        let mut interner = Interner::default();
        let mut count: u128 = 1;
        let mut universes = Vec::new();
        let mut raw = Vec::new();
        for v in &vars {
            let u = d.universe(v.sort())?;
            count = count.saturating_mul(u.len() as u128);
            if count > d.cap() as u128 {
                return Err(Error::DomainTooLarge {
                    valuations: valuation_count(&vars, d)?,
                    cap: d.cap(),
                });
            }
            universes.push(u.iter().map(|x| interner.intern(x)).collect());
            raw.push(u.to_vec());
        }
        let vars: Vec<Var> = vars.into_iter().collect();
        let slots = vars.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
        Ok(Space {
            vars,
            slots,
            universes,
            raw,
            interner,
        })
    }

    pub(crate) fn compile(&mut self, t: &Term) -> Result<Compiled> {
        Compiled::new(t, &self.slots, &mut self.interner)
    }

    /// Visits every valuation until `f` returns `Some`.
    pub(crate) fn search<T>(
        &self,
        mut f: impl FnMut(&[Cv], &[Vec<Cv>], &[usize]) -> Result<Option<T>>,
    ) -> Result<Option<T>> {
        let n = self.vars.len();
        let mut idx = vec![0usize; n];
        let mut env: Vec<Cv> = self.universes.iter().map(|u| u[0]).collect();
        loop {
            if let Some(r) = f(&env, &self.interner.lists, &idx)? {
                return Ok(Some(r));
            }
            let mut k = 0;
            loop {
                if k == n {
                    return Ok(None);
                }
                idx[k] += 1;
                if idx[k] < self.universes[k].len() {
                    env[k] = self.universes[k][idx[k]];
                    break;
                }
                idx[k] = 0;
                env[k] = self.universes[k][0];
                k += 1;
            }
        }
    }

    pub(crate) fn valuation(&self, idx: &[usize]) -> Valuation {
        self.vars
            .iter()
            .zip(idx)
            .enumerate()
            .map(|(k, (v, i))| (v.clone(), self.raw[k][*i].clone()))
            .collect()
    }
}

fn valuation_count(vars: &BTreeSet<Var>, d: &DomainSpec) -> Result<u128> {
    let mut c: u128 = 1;
    for v in vars {
        c = c.saturating_mul(d.universe(v.sort())?.len() as u128);
    }
    Ok(c)
}

fn as_bool(c: Cv) -> Result<bool> {
    match c {
        Cv::B(b) => Ok(b),
        _ => Err(Error::SortMismatch("expected a boolean".into())),
    }
}

/// Finds a valuation of `vars(a) ∪ vars(b)` on which the two terms differ.
pub fn find_difference(a: &Term, b: &Term, d: &DomainSpec) -> Result<Option<Valuation>> {
    let a = simplify(a);
    let b = simplify(b);
    if a == b {
        return Ok(None);
    }
    let mut vars = a.vars();
    b.collect_vars(&mut vars);
    let mut space = Space::new(vars, d)?;
    let ca = space.compile(&a)?;
    let cb = space.compile(&b)?;
    let mut s1 = Vec::new();
    let mut s2 = Vec::new();
    let hit = space.search(|env, lists, idx| {
        let x = ca.eval(env, lists, &mut s1)?;
        let y = cb.eval(env, lists, &mut s2)?;
        Ok((x != y).then(|| idx.to_vec()))
    })?;
    Ok(hit.map(|idx| space.valuation(&idx)))
}

/// Semantic equivalence over the finite domain.
pub fn sem_equiv(a: &Term, b: &Term, d: &DomainSpec) -> Result<bool> {
    Ok(find_difference(a, b, d)?.is_none())
}

/// Finds a valuation making `a` true and `b` false.
pub fn find_implication_witness(a: &Term, b: &Term, d: &DomainSpec) -> Result<Option<Valuation>> {
    find_model(&Term::and(a.clone(), Term::not(b.clone())), d)
}

/// Semantic implication over the finite domain.
pub fn sem_implies(a: &Term, b: &Term, d: &DomainSpec) -> Result<bool> {
    Ok(find_implication_witness(a, b, d)?.is_none())
}

/// Finds a valuation satisfying the boolean term `t`.
pub fn find_model(t: &Term, d: &DomainSpec) -> Result<Option<Valuation>> {
    let t = simplify(t);
    if t.is_false() {
        return Ok(None);
    }
    let mut space = Space::new(t.vars(), d)?;
    let c = space.compile(&t)?;
    let mut s = Vec::new();
    let hit = space.search(|env, lists, idx| Ok(as_bool(c.eval(env, lists, &mut s)?)?.then(|| idx.to_vec())))?;
    Ok(hit.map(|idx| space.valuation(&idx)))
}

pub fn is_satisfiable(t: &Term, d: &DomainSpec) -> Result<bool> {
    Ok(find_model(t, d)?.is_some())
}

pub fn is_valid(t: &Term, d: &DomainSpec) -> Result<bool> {
    Ok(find_model(&Term::not(t.clone()), d)?.is_none())
}

/// Enumerates every valuation of `vars` over the domain.
pub fn all_valuations(vars: &BTreeSet<Var>, d: &DomainSpec) -> Result<Vec<Valuation>> {
    let space = Space::new(vars.clone(), d)?;
    let mut out = Vec::new();
    space.search::<()>(|_, _, idx| {
        out.push(space.valuation(idx));
        Ok(None)
    })?;
    Ok(out)
}

/// A set of terms evaluated repeatedly under valuations of a fixed variable set.
pub struct Evaluator {
    space: Space,
    programs: Vec<Compiled>,
    env: Vec<Cv>,
    stack: Vec<Cv>,
}

impl Evaluator {
    pub fn new(vars: BTreeSet<Var>, terms: &[&Term], d: &DomainSpec) -> Result<Self> {
        let mut space = Space::new(BTreeSet::new(), d)?;
        space.vars = vars.into_iter().collect();
        space.slots = space.vars.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
        let programs = terms
            .iter()
            .map(|t| space.compile(&simplify(t)))
            .collect::<Result<Vec<_>>>()?;
        let env = vec![Cv::B(false); space.vars.len()];
        Ok(Evaluator {
            space,
            programs,
            env,
            stack: Vec::new(),
        })
    }

    /// Binds the slot for `v` if `v` is tracked.
    pub fn bind(&mut self, v: &Var, value: &Value) {
        if let Some(&i) = self.space.slots.get(v) {
            self.env[i] = self.space.interner.intern(value);
        }
    }

    pub fn bind_all(&mut self, val: &Valuation) {
        for (v, x) in val {
            self.bind(v, x);
        }
    }

    pub fn holds(&mut self, term: usize) -> Result<bool> {
        as_bool(self.programs[term].eval(&self.env, &self.space.interner.lists, &mut self.stack)?)
    }
}
