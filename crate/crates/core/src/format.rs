//! JSON file formats for models, domains, initial valuations, test cases
//! and simulated systems under test, plus a text form for traces.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value as Json;

use crate::concrete::{derive_test_case, GateValue, Sut, TestCase};
use crate::error::{Error, Result};
use crate::model::{Bddts, Direction, Gate, Location, Nature, Switch};
use crate::terms::{
    lex, parse_formula, parse_term, Assignment, DomainSpec, Scope, Sort, SortKind, Tok, Type, Valuation, Value, Var,
    VarDecl, VarKind,
};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SortDto {
    pub name: String,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lo: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hi: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elem: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_len: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VarDto {
    pub name: String,
    pub sort: String,
    pub kind: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateDto {
    pub name: String,
    pub dir: String,
    pub params: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub renames: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocationDto {
    pub name: String,
    pub nature: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub og: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwitchDto {
    pub from: String,
    pub gate: String,
    pub guard: String,
    #[serde(default)]
    pub assign: BTreeMap<String, String>,
    pub to: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDto {
    pub sorts: Vec<SortDto>,
    pub variables: Vec<VarDto>,
    pub gates: Vec<GateDto>,
    pub locations: Vec<LocationDto>,
    pub initial: String,
    pub ig: String,
    pub switches: Vec<SwitchDto>,
    #[serde(default)]
    pub saturated: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainDto {
    pub sorts: Vec<SortDto>,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidModel(msg.into())
}

impl SortDto {
    pub fn to_sort(&self) -> Result<Sort> {
        let missing = |f: &str| invalid(format!("sort `{}` needs `{f}`", self.name));
        let kind = match self.kind.as_str() {
            "bool" => SortKind::Bool,
            "int" => SortKind::Int {
                lo: self.lo.ok_or_else(|| missing("lo"))?,
                hi: self.hi.ok_or_else(|| missing("hi"))?,
            },
            "enum" => SortKind::Enum {
                values: self.values.clone().ok_or_else(|| missing("values"))?,
            },
            "list" => SortKind::List {
                elem: self.elem.clone().ok_or_else(|| missing("elem"))?,
                max_len: self.max_len.ok_or_else(|| missing("max_len"))?,
            },
            other => return Err(invalid(format!("unknown sort kind `{other}`"))),
        };
        Ok(Sort::new(self.name.clone(), kind))
    }

    pub fn from_sort(s: &Sort) -> Self {
        let mut dto = SortDto {
            name: s.name.clone(),
            kind: String::new(),
            lo: None,
            hi: None,
            values: None,
            elem: None,
            max_len: None,
        };
        match &s.kind {
            SortKind::Bool => dto.kind = "bool".into(),
            SortKind::Int { lo, hi } => {
                dto.kind = "int".into();
                dto.lo = Some(*lo);
                dto.hi = Some(*hi);
            }
            SortKind::Enum { values } => {
                dto.kind = "enum".into();
                dto.values = Some(values.clone());
            }
            SortKind::List { elem, max_len } => {
                dto.kind = "list".into();
                dto.elem = Some(elem.clone());
                dto.max_len = Some(*max_len);
            }
        }
        dto
    }
}

fn parse_kind(s: &str) -> Result<VarKind> {
    match s {
        "model" => Ok(VarKind::Model),
        "context" => Ok(VarKind::Context),
        "interaction" => Ok(VarKind::Interaction),
        other => Err(invalid(format!("unknown variable kind `{other}`"))),
    }
}

fn parse_nature(s: &str) -> Result<Nature> {
    match s {
        "open" => Ok(Nature::Open),
        "closed" => Ok(Nature::Closed),
        other => Err(invalid(format!("unknown nature `{other}`"))),
    }
}

fn parse_dir(s: &str) -> Result<Direction> {
    match s {
        "in" | "input" => Ok(Direction::Input),
        "out" | "output" => Ok(Direction::Output),
        other => Err(invalid(format!("unknown gate direction `{other}`"))),
    }
}

impl ModelDto {
    pub fn to_model(&self) -> Result<Bddts> {
        let sorts = self.sorts.iter().map(SortDto::to_sort).collect::<Result<Vec<_>>>()?;
        let domain = DomainSpec::new(&sorts)?;
        let variables = self
            .variables
            .iter()
            .map(|v| Ok(VarDecl::new(v.name.clone(), v.sort.clone(), parse_kind(&v.kind)?)))
            .collect::<Result<Vec<_>>>()?;
        let table: BTreeMap<_, _> = variables.iter().map(|d| (d.name.clone(), d.clone())).collect();
        let scope = Scope {
            vars: &table,
            domain: &domain,
        };
        let formula = |what: String, src: &str| parse_formula(src, &scope).map_err(|e| invalid(format!("{what}: {e}")));
        let lookup = |name: &str| {
            table
                .get(name)
                .map(|d| Var::new(d.clone()))
                .ok_or_else(|| invalid(format!("unknown variable `{name}`")))
        };
        let gates = self
            .gates
            .iter()
            .map(|g| {
                Ok(Gate {
                    name: g.name.clone(),
                    direction: parse_dir(&g.dir)?,
                    params: g.params.iter().map(|p| lookup(p)).collect::<Result<Vec<_>>>()?,
                    renames: g.renames.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let locations = self
            .locations
            .iter()
            .map(|l| {
                Ok(Location {
                    name: l.name.clone(),
                    nature: parse_nature(&l.nature)?,
                    og: match &l.og {
                        Some(src) => Some(formula(format!("output guard of `{}`", l.name), src)?),
                        None => None,
                    },
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let ig = formula("initial guard".into(), &self.ig)?;
        let switches = self
            .switches
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let guard = formula(format!("guard of switch {i}"), &s.guard)?;
                let mut assign = Assignment::new();
                for (x, e) in &s.assign {
                    let t = parse_term(e, &scope).map_err(|e| invalid(format!("switch {i}: {e}")))?;
                    assign
                        .insert_checked(lookup(x)?, t, &domain)
                        .map_err(|e| invalid(format!("switch {i}: {e}")))?;
                }
                Ok(Switch {
                    from: s.from.clone(),
                    gate: s.gate.clone(),
                    guard,
                    assign,
                    to: s.to.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Bddts {
            sorts,
            variables,
            gates,
            locations,
            initial: self.initial.clone(),
            ig,
            switches,
            saturated: self.saturated,
        })
    }

    pub fn from_model(b: &Bddts) -> Self {
        ModelDto {
            sorts: b.sorts.iter().map(SortDto::from_sort).collect(),
            variables: b
                .variables
                .iter()
                .map(|d| VarDto {
                    name: d.name.clone(),
                    sort: d.sort.clone(),
                    kind: d.kind.as_str().into(),
                })
                .collect(),
            gates: b
                .gates
                .iter()
                .map(|g| GateDto {
                    name: g.name.clone(),
                    dir: g.direction.as_str().into(),
                    params: g.params.iter().map(|p| p.name().to_string()).collect(),
                    renames: g.renames.clone(),
                })
                .collect(),
            locations: b
                .locations
                .iter()
                .map(|l| LocationDto {
                    name: l.name.clone(),
                    nature: match l.nature {
                        Nature::Open => "open".into(),
                        Nature::Closed => "closed".into(),
                    },
                    og: l.og.as_ref().map(|t| t.to_string()),
                })
                .collect(),
            initial: b.initial.clone(),
            ig: b.ig.to_string(),
            switches: b
                .switches
                .iter()
                .map(|s| SwitchDto {
                    from: s.from.clone(),
                    gate: s.gate.clone(),
                    guard: s.guard.to_string(),
                    assign: s
                        .assign
                        .iter()
                        .map(|(k, t)| (k.name().to_string(), t.to_string()))
                        .collect(),
                    to: s.to.clone(),
                })
                .collect(),
            saturated: b.saturated,
        }
    }
}

pub fn model_from_json(src: &str) -> Result<Bddts> {
    let dto: ModelDto = serde_json::from_str(src)?;
    dto.to_model()
}

pub fn model_from_value(v: Json) -> Result<Bddts> {
    let dto: ModelDto = serde_json::from_value(v)?;
    dto.to_model()
}

pub fn model_to_json(b: &Bddts) -> String {
    serde_json::to_string_pretty(&ModelDto::from_model(b)).expect("model serialization")
}

pub fn model_to_value(b: &Bddts) -> Json {
    serde_json::to_value(ModelDto::from_model(b)).expect("model serialization")
}

/// Reads `{"sorts": [...]}`.
pub fn domain_from_json(src: &str) -> Result<DomainSpec> {
    let dto: DomainDto = serde_json::from_str(src)?;
    let sorts = dto.sorts.iter().map(SortDto::to_sort).collect::<Result<Vec<_>>>()?;
    DomainSpec::new(&sorts)
}

pub fn value_to_json(v: &Value) -> Json {
    match v {
        Value::Bool(b) => Json::Bool(*b),
        Value::Int(i) => Json::from(*i),
        Value::Enum { variant, .. } => Json::String(variant.to_string()),
        Value::List(items) => Json::Array(items.iter().map(value_to_json).collect()),
    }
}

/// Decodes a JSON value of the given sort. Enum values may be written as
/// `"VARIANT"` or `"Sort::VARIANT"`.
pub fn value_from_json(j: &Json, sort: &str, d: &DomainSpec) -> Result<Value> {
    let entry = d.get(sort)?;
    let bad = || Error::SortMismatch(format!("`{j}` is not a value of sort `{sort}`"));
    let v = match (&entry.ty, j) {
        (Type::Bool, Json::Bool(b)) => Value::Bool(*b),
        (Type::Int, Json::Number(n)) => Value::Int(n.as_i64().ok_or_else(bad)?),
        (Type::Enum(name), Json::String(s)) => {
            let variant = s.strip_prefix(&format!("{name}::")).unwrap_or(s);
            Value::enum_value(name, variant)
        }
        (Type::List(_), Json::Array(items)) => {
            let SortKind::List { elem, .. } = &entry.sort.kind else {
                return Err(bad());
            };
            Value::List(
                items
                    .iter()
                    .map(|x| value_from_json(x, elem, d))
                    .collect::<Result<_>>()?,
            )
        }
        _ => return Err(bad()),
    };
    if !d.contains(sort, &v) {
        return Err(bad());
    }
    Ok(v)
}

/// Reads a valuation `{"var": value, ...}` over the state variables of `b`.
pub fn valuation_from_value(j: &Json, b: &Bddts, d: &DomainSpec) -> Result<Valuation> {
    let Json::Object(map) = j else {
        return Err(Error::Json("expected an object of variable values".into()));
    };
    let mut out = Valuation::new();
    for (k, v) in map {
        let var = b.var(k).ok_or_else(|| Error::UnknownVariable(k.clone()))?;
        out.insert(var.clone(), value_from_json(v, var.sort(), d)?);
    }
    Ok(out)
}

/// Reads one initial valuation or an array of them.
pub fn inis_from_json(src: &str, b: &Bddts, d: &DomainSpec) -> Result<Vec<Valuation>> {
    let j: Json = serde_json::from_str(src)?;
    match &j {
        Json::Array(items) => items.iter().map(|x| valuation_from_value(x, b, d)).collect(),
        _ => Ok(vec![valuation_from_value(&j, b, d)?]),
    }
}

pub fn valuation_to_json(val: &Valuation) -> Json {
    Json::Object(val.iter().map(|(k, v)| (k.to_string(), value_to_json(v))).collect())
}

pub fn gate_value_to_json(u: &GateValue) -> Json {
    serde_json::json!({ "gate": u.gate, "values": u.values.iter().map(value_to_json).collect::<Vec<_>>() })
}

/// Reads `{"gate": "g", "values": [...]}`, checking values against the
/// interaction variables of the gate.
pub fn gate_value_from_json(j: &Json, b: &Bddts, d: &DomainSpec) -> Result<GateValue> {
    let bad = || Error::Json(format!("expected {{\"gate\": .., \"values\": [..]}}, found `{j}`"));
    let name = j.get("gate").and_then(Json::as_str).ok_or_else(bad)?;
    let values = j.get("values").and_then(Json::as_array).ok_or_else(bad)?;
    typed_gate_value(name, values, b, d)
}

fn typed_gate_value(name: &str, values: &[Json], b: &Bddts, d: &DomainSpec) -> Result<GateValue> {
    let g = b
        .gate(name)
        .ok_or_else(|| Error::InvalidModel(format!("unknown gate `{name}`")))?;
    if g.params.len() != values.len() {
        return Err(Error::SortMismatch(format!(
            "gate `{name}` takes {} values, got {}",
            g.params.len(),
            values.len()
        )));
    }
    let values = g
        .params
        .iter()
        .zip(values)
        .map(|(p, v)| value_from_json(v, p.sort(), d))
        .collect::<Result<_>>()?;
    Ok(GateValue {
        gate: name.to_string(),
        values,
    })
}

/// Reads a trace written as `g(1, OPEN) h([1, 2], true)`. Calls may be
/// separated by whitespace, commas or semicolons.
pub fn trace_from_text(src: &str, b: &Bddts, d: &DomainSpec) -> Result<Vec<GateValue>> {
    // `;` is not a term operator; it has the same width as `,`.
    let toks = lex(&src.replace(';', ","), 1, 1)?;
    let mut pos = 0;
    let err = |pos: usize, msg: &str| -> Error {
        let t = &toks[pos];
        Error::Parse {
            line: t.line,
            col: t.col,
            message: msg.to_string(),
        }
    };
    let is_op = |pos: usize, op: &str| matches!(toks[pos].tok, Tok::Op(o) if o == op);
    fn value(toks: &[crate::terms::Token], pos: &mut usize) -> Option<Json> {
        let t = toks[*pos].tok.clone();
        *pos += 1;
        match t {
            Tok::Int(n) => Some(Json::from(n)),
            Tok::Op("-") => match toks[*pos].tok {
                Tok::Int(n) => {
                    *pos += 1;
                    Some(Json::from(-n))
                }
                _ => None,
            },
            Tok::Ident(s) if s == "true" || s == "false" => Some(Json::Bool(s == "true")),
            Tok::Ident(s) => {
                if matches!(toks[*pos].tok, Tok::Op("::")) {
                    *pos += 1;
                    if let Tok::Ident(v) = toks[*pos].tok.clone() {
                        *pos += 1;
                        return Some(Json::String(format!("{s}::{v}")));
                    }
                    return None;
                }
                Some(Json::String(s))
            }
            Tok::Op("[") => {
                let mut items = Vec::new();
                if matches!(toks[*pos].tok, Tok::Op("]")) {
                    *pos += 1;
                    return Some(Json::Array(items));
                }
                loop {
                    items.push(value(toks, pos)?);
                    match toks[*pos].tok {
                        Tok::Op("]") => {
                            *pos += 1;
                            return Some(Json::Array(items));
                        }
                        Tok::Op(",") => *pos += 1,
                        _ => return None,
                    }
                }
            }
            _ => None,
        }
    }
    let mut out = Vec::new();
    while toks[pos].tok != Tok::End {
        if is_op(pos, ",") {
            pos += 1;
            continue;
        }
        let start = pos;
        let Tok::Ident(name) = toks[pos].tok.clone() else {
            return Err(err(pos, "expected a gate name"));
        };
        pos += 1;
        if !is_op(pos, "(") {
            return Err(err(pos, "expected `(`"));
        }
        pos += 1;
        let mut values = Vec::new();
        if is_op(pos, ")") {
            pos += 1;
        } else {
            loop {
                let at = pos;
                values.push(value(&toks, &mut pos).ok_or_else(|| err(at, "malformed value"))?);
                if is_op(pos, ")") {
                    pos += 1;
                    break;
                }
                if !is_op(pos, ",") {
                    return Err(err(pos, "expected `,` or `)`"));
                }
                pos += 1;
            }
        }
        let u = typed_gate_value(&name, &values, b, d).map_err(|e| err(start, &e.to_string()))?;
        out.push(u);
    }
    Ok(out)
}

/// A test case file keeps the model, the initial valuation and the depth
/// bound; the LTS is included for inspection and rebuilt on load.
pub fn test_case_to_value(tc: &TestCase) -> Json {
    let states: Vec<Json> = tc
        .lts
        .states
        .iter()
        .enumerate()
        .map(|(i, s)| {
            serde_json::json!({
                "id": i,
                "location": s.location,
                "valuation": valuation_to_json(&s.valuation),
                "expanded": tc.lts.expanded[i],
                "pass": tc.pass.contains(&i),
            })
        })
        .collect();
    let transitions: Vec<Json> = tc
        .lts
        .transitions
        .iter()
        .map(|t| serde_json::json!({ "from": t.from, "label": gate_value_to_json(&t.label), "to": t.to }))
        .collect();
    let fail: Vec<Json> = tc
        .fail
        .iter()
        .map(|(q, u)| serde_json::json!({ "from": q, "label": gate_value_to_json(u) }))
        .collect();
    serde_json::json!({
        "model": model_to_value(&tc.model),
        "ini": valuation_to_json(&tc.ini),
        "max_depth": tc.max_depth,
        "lts": { "states": states, "transitions": transitions, "fail": fail },
    })
}

pub fn test_case_from_json(src: &str) -> Result<TestCase> {
    let j: Json = serde_json::from_str(src)?;
    let model = model_from_value(
        j.get("model")
            .cloned()
            .ok_or_else(|| Error::Json("missing `model`".into()))?,
    )?;
    let d = model.domain()?;
    let ini = valuation_from_value(
        j.get("ini").ok_or_else(|| Error::Json("missing `ini`".into()))?,
        &model,
        &d,
    )?;
    let depth = j
        .get("max_depth")
        .and_then(Json::as_u64)
        .ok_or_else(|| Error::Json("missing `max_depth`".into()))?;
    let tc = derive_test_case(&model, &ini, &d, depth as usize)?;
    let stored = j.pointer("/lts/states").and_then(Json::as_array).map(Vec::len);
    if stored.is_some_and(|n| n != tc.lts.states.len()) {
        return Err(Error::InvalidModel(
            "stored LTS does not match its model; regenerate the test case".into(),
        ));
    }
    Ok(tc)
}

/// Reads `{"model": .., "ini": ..}`.
pub fn sut_from_json(src: &str) -> Result<Sut> {
    let j: Json = serde_json::from_str(src)?;
    let model = model_from_value(
        j.get("model")
            .cloned()
            .ok_or_else(|| Error::Json("missing `model`".into()))?,
    )?;
    let d = model.domain()?;
    let ini = valuation_from_value(
        j.get("ini").ok_or_else(|| Error::Json("missing `ini`".into()))?,
        &model,
        &d,
    )?;
    Ok(Sut { model, ini })
}

pub fn sut_to_value(sut: &Sut) -> Json {
    serde_json::json!({ "model": model_to_value(&sut.model), "ini": valuation_to_json(&sut.ini) })
}
