//! A small line-oriented Given-When-Then language that compiles to a model.
//!
//! ```text
//! sort Badge = int 1233..1235
//! sort DoorState = enum OPEN CLOSED
//! sort BadgeList = list Badge 2
//! model A_badge : BadgeList
//! context P_badge : Badge
//! interaction badge : Badge
//! rename trigger_door Door -> command
//!
//! Scenario: Door access
//!   Given P_badge == 1234
//!   When !verify_badge(badge) if badge == P_badge set AccessGranted := true
//!   Then !trigger_door(door_id, command) if AccessGranted
//!   And expect Door == DoorState::OPEN
//! ```
//!
//! `!g(..)` is an output and `?g(..)` an input. Gates are declared by their
//! first use. Each step is a switch from location `i` to `i + 1`. A location
//! is closed when the step leaving it is a Then step, and the final location
//! is open and carries the conjunction of the `expect` predicates.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{Bddts, Direction, Gate, Location, Nature, Switch};
use crate::terms::{lex, Assignment, DomainSpec, Parser, Scope, Sort, SortKind, Term, Var, VarDecl, VarKind};

#[derive(Clone, Debug)]
pub struct Scenario {
    pub title: Option<String>,
    pub model: Bddts,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Keyword {
    Given,
    When,
    Then,
}

struct Step {
    keyword: Keyword,
    line: usize,
    gate: String,
    guard: Term,
    assign: Assignment,
}

fn parse_error<T>(line: usize, col: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        line,
        col,
        message: message.into(),
    })
}

/// Whitespace separated words with their 1-based columns.
fn words(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s, &line[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter()
        .map(|(s, w)| (line[..s].chars().count() + 1, w))
        .collect()
}

fn parse_sort(ln: usize, ws: &[(usize, &str)]) -> Result<Sort> {
    let at = |i: usize| {
        ws.get(i)
            .map(|w| w.0)
            .unwrap_or_else(|| ws.last().map(|w| w.0 + w.1.len()).unwrap_or(1))
    };
    if ws.len() < 4 || ws[2].1 != "=" {
        return parse_error(
            ln,
            at(2),
            "expected `sort Name = int lo..hi | enum A B .. | list Elem n`",
        );
    }
    let name = ws[1].1.to_string();
    let kind = match ws[3].1 {
        "int" => {
            let range = ws.get(4).filter(|_| ws.len() == 5);
            let bounds = range
                .and_then(|(_, r)| r.split_once(".."))
                .and_then(|(lo, hi)| Some((lo.parse().ok()?, hi.parse().ok()?)));
            let Some((lo, hi)) = bounds else {
                return parse_error(ln, at(4), "expected a range `lo..hi`");
            };
            SortKind::Int { lo, hi }
        }
        "enum" if ws.len() > 4 => SortKind::Enum {
            values: ws[4..].iter().map(|w| w.1.to_string()).collect(),
        },
        "list" if ws.len() == 6 => {
            let Ok(max_len) = ws[5].1.parse() else {
                return parse_error(ln, at(5), "expected a maximum length");
            };
            SortKind::List {
                elem: ws[4].1.to_string(),
                max_len,
            }
        }
        other => return parse_error(ln, at(3), format!("malformed sort kind `{other}`")),
    };
    Ok(Sort::new(name, kind))
}

fn parse_var(ln: usize, ws: &[(usize, &str)], kind: VarKind) -> Result<Arc<VarDecl>> {
    if ws.len() != 4 || ws[2].1 != ":" {
        return parse_error(ln, ws[0].0, format!("expected `{} name : Sort`", ws[0].1));
    }
    Ok(VarDecl::new(ws[1].1.to_string(), ws[3].1.to_string(), kind))
}

/// Parses a scenario whose sorts are all declared in the text.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    parse_scenario_with(text, &[])
}

/// Parses a scenario with additional sorts, such as those of a domain file.
pub fn parse_scenario_with(text: &str, base_sorts: &[Sort]) -> Result<Scenario> {
    let mut sorts: Vec<Sort> = base_sorts.to_vec();
    let mut variables: Vec<Arc<VarDecl>> = Vec::new();
    let mut renames: Vec<(usize, usize, String, String, String)> = Vec::new();
    let mut step_lines = Vec::new();
    let mut title = None;
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let ws = words(raw);
        let Some(&(col, first)) = ws.first() else { continue };
        if first.starts_with('#') {
            continue;
        }
        match first {
            "sort" => {
                let s = parse_sort(ln, &ws)?;
                if sorts.iter().any(|o| o.name == s.name) {
                    return parse_error(ln, ws[1].0, format!("sort `{}` declared twice", s.name));
                }
                sorts.push(s);
            }
            "model" | "context" | "interaction" => {
                let kind = match first {
                    "model" => VarKind::Model,
                    "context" => VarKind::Context,
                    _ => VarKind::Interaction,
                };
                let v = parse_var(ln, &ws, kind)?;
                if variables.iter().any(|o| o.name == v.name) {
                    return parse_error(ln, ws[1].0, format!("variable `{}` declared twice", v.name));
                }
                variables.push(v);
            }
            "rename" => {
                if ws.len() != 5 || ws[3].1 != "->" {
                    return parse_error(ln, col, "expected `rename gate Context -> interaction`");
                }
                renames.push((ln, ws[1].0, ws[1].1.into(), ws[2].1.into(), ws[4].1.into()));
            }
            "Scenario:" | "Scenario" => {
                if title.is_some() {
                    return parse_error(ln, col, "only one scenario per file");
                }
                let rest = raw
                    .trim_start()
                    .trim_start_matches("Scenario")
                    .trim_start()
                    .trim_start_matches(':');
                title = Some(rest.trim().to_string());
            }
            "Given" | "When" | "Then" | "And" => step_lines.push((ln, col, first, raw)),
            other => return parse_error(ln, col, format!("unexpected `{other}`")),
        }
    }

    let domain = DomainSpec::new(&sorts).map_err(|e| Error::Parse {
        line: 1,
        col: 1,
        message: e.to_string(),
    })?;
    for v in &variables {
        if domain.get(&v.sort).is_err() {
            return Err(Error::UnknownSort(format!("`{}` of variable `{}`", v.sort, v.name)));
        }
    }
    let table: BTreeMap<String, Arc<VarDecl>> = variables.iter().map(|d| (d.name.clone(), d.clone())).collect();
    let scope = Scope {
        vars: &table,
        domain: &domain,
    };

    let mut givens = Vec::new();
    let mut expects = Vec::new();
    let mut steps: Vec<Step> = Vec::new();
    let mut gates: Vec<Gate> = Vec::new();
    let mut last: Option<Keyword> = None;
    let mut end = (1, 1);
    for (ln, col, first, raw) in step_lines {
        let body_col = col + first.len();
        let body: String = raw.chars().skip(body_col - 1).collect();
        end = (ln, raw.chars().count() + 1);
        let mut p = Parser::new(lex(&body, ln, body_col)?, &scope);
        let keyword = match first {
            "Given" => Keyword::Given,
            "When" => Keyword::When,
            "Then" => Keyword::Then,
            _ => match last {
                Some(k) => k,
                None => return parse_error(ln, col, "`And` needs a preceding step"),
            },
        };
        if let Some(prev) = last {
            if keyword < prev {
                return parse_error(
                    ln,
                    col,
                    format!("{keyword:?} after {prev:?}: steps go Given, When, Then"),
                );
            }
        }
        if keyword == Keyword::Then && last != Some(Keyword::When) && last != Some(Keyword::Then) {
            return parse_error(ln, col, "a Then step needs a preceding When step");
        }
        last = Some(keyword);
        if keyword == Keyword::Given {
            givens.push(p.term()?);
            if !p.at_end() {
                return p.error("unexpected input after predicate");
            }
            continue;
        }
        if p.is_ident("expect") {
            if keyword != Keyword::Then {
                return parse_error(ln, col, "`expect` belongs to a Then step");
            }
            p.next();
            expects.push(p.term()?);
            if !p.at_end() {
                return p.error("unexpected input after predicate");
            }
            continue;
        }
        let direction = if p.eat("!") {
            Direction::Output
        } else if p.eat("?") {
            Direction::Input
        } else {
            return p.error("expected `!gate(..)`, `?gate(..)` or `expect`");
        };
        let gate = p.ident()?;
        p.expect("(")?;
        let mut params: Vec<Var> = Vec::new();
        if !p.eat(")") {
            loop {
                let name = p.ident()?;
                match table.get(&name) {
                    Some(d) if d.kind == VarKind::Interaction => params.push(Var::new(d.clone())),
                    Some(_) => return p.error(format!("`{name}` is not an interaction variable")),
                    None => return p.error(format!("unknown variable `{name}`")),
                }
                if p.eat(")") {
                    break;
                }
                p.expect(",")?;
            }
        }
        match gates.iter().find(|g| g.name == gate) {
            Some(g) if g.direction != direction || g.params != params => {
                return parse_error(ln, body_col, format!("gate `{gate}` used with a different signature"));
            }
            Some(_) => {}
            None => gates.push(Gate {
                name: gate.clone(),
                direction,
                params,
                renames: BTreeMap::new(),
            }),
        }
        let guard = if p.is_ident("if") {
            p.next();
            p.term()?
        } else {
            Term::tt()
        };
        let mut assign = Assignment::new();
        if p.is_ident("set") {
            p.next();
            loop {
                let name = p.ident()?;
                let Some(d) = table.get(&name) else {
                    return p.error(format!("unknown variable `{name}`"));
                };
                p.expect(":=")?;
                let e = p.term()?;
                assign
                    .insert_checked(Var::new(d.clone()), e, &domain)
                    .or_else(|e| p.error(e.to_string()))?;
                if !p.eat(",") {
                    break;
                }
            }
        }
        if p.is_ident("expect") {
            if keyword != Keyword::Then {
                return p.error("`expect` belongs to a Then step");
            }
            p.next();
            expects.push(p.term()?);
        }
        if !p.at_end() {
            return p.error("unexpected input after step");
        }
        steps.push(Step {
            keyword,
            line: ln,
            gate,
            guard,
            assign,
        });
    }
    if !steps.iter().any(|s| s.keyword == Keyword::Then) {
        return parse_error(end.0, end.1, "scenario has no Then step");
    }

    for (ln, col, gate, ctx, iv) in renames {
        let Some(g) = gates.iter_mut().find(|g| g.name == gate) else {
            return parse_error(ln, col, format!("unknown gate `{gate}`"));
        };
        g.renames.insert(ctx, iv);
    }

    let mut locations = Vec::new();
    let mut switches = Vec::new();
    for (i, s) in steps.iter().enumerate() {
        let nature = if s.keyword == Keyword::Then {
            Nature::Closed
        } else {
            Nature::Open
        };
        locations.push(Location {
            name: i.to_string(),
            nature,
            og: None,
        });
        switches.push(Switch {
            from: i.to_string(),
            gate: s.gate.clone(),
            guard: s.guard.clone(),
            assign: s.assign.clone(),
            to: (i + 1).to_string(),
        });
    }
    let og = (!expects.is_empty()).then(|| Term::and_all(expects));
    locations.push(Location {
        name: steps.len().to_string(),
        nature: Nature::Open,
        og,
    });
    let mut model = Bddts {
        sorts,
        variables,
        gates,
        locations,
        initial: "0".into(),
        ig: Term::and_all(givens),
        switches,
        saturated: false,
    };
    // Steps only mention what they change; the rest is kept explicitly.
    let active = model.active_vars();
    for s in model.switches.iter_mut() {
        for v in active[&s.to].iter().filter(|v| v.kind() == VarKind::Model) {
            if !s.assign.contains(v) {
                s.assign.insert(v.clone(), Term::Var(v.clone()));
            }
        }
    }
    let report = model.validate(&domain)?;
    if !report.is_ok() {
        let line = steps.first().map(|s| s.line).unwrap_or(1);
        return parse_error(line, 1, report.to_string());
    }
    Ok(Scenario { title, model })
}
