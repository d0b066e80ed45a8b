//! Browser demo. Every export takes strings and returns a JSON string with
//! an `ok` field, so the same functions run natively in tests.

use bddts::composition::disjunction;
use bddts::concrete::derive_test_case;
use bddts::dot::{model_to_dot, test_case_to_dot};
use bddts::format::{inis_from_json, model_to_value, trace_from_text};
use bddts::saturation::saturate;
use bddts::scenario::parse_scenario;
use bddts::symbolic::{all_inis, testing_equivalent};
use bddts::Bddts;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Sequence bound for the equivalence check after composing.
const EQUIV_BOUND: usize = 3;

fn respond(r: Result<Value, String>) -> String {
    match r {
        Ok(mut v) => {
            v["ok"] = true.into();
            v.to_string()
        }
        Err(e) => json!({ "ok": false, "error": e }).to_string(),
    }
}

fn saturated(text: &str) -> Result<Bddts, String> {
    let sc = parse_scenario(text).map_err(|e| e.to_string())?;
    let d = sc.model.domain().map_err(|e| e.to_string())?;
    saturate(&sc.model, &d).map_err(|e| e.to_string())
}

/// Parses a scenario and saturates it.
#[wasm_bindgen]
pub fn saturate_scenario(text: &str) -> String {
    respond((|| {
        let sc = parse_scenario(text).map_err(|e| e.to_string())?;
        let sat = saturated(text)?;
        Ok(json!({
            "title": sc.title,
            "model": model_to_value(&sat),
            "dot": model_to_dot(&sat),
            "raw_dot": model_to_dot(&sc.model),
            "added": sat.switches.len() - sc.model.switches.len(),
        }))
    })())
}

/// Composes two scenarios and checks the composition against the pair.
#[wasm_bindgen]
pub fn compose_scenarios(left: &str, right: &str) -> String {
    respond((|| {
        let (b1, b2) = (saturated(left)?, saturated(right)?);
        let d = b1.domain().map_err(|e| e.to_string())?;
        let c = disjunction(&b1, &b2, &d).map_err(|e| e.to_string())?;
        let inis = all_inis(&c, &d).map_err(|e| e.to_string())?;
        let report = testing_equivalent(&[&b1, &b2], &[&c], &inis, EQUIV_BOUND, &d).map_err(|e| e.to_string())?;
        Ok(json!({
            "model": model_to_value(&c),
            "dot": model_to_dot(&c),
            "locations": c.locations.len(),
            "switches": c.switches.len(),
            "equivalent": report.is_equivalent(),
            "report": report.to_string(),
        }))
    })())
}

/// Verdict of the scenario's test case on a trace such as
/// `verify_badge(1234) trigger_door(1, OPEN)`.
#[wasm_bindgen]
pub fn verdict(scenario: &str, ini: &str, trace: &str) -> String {
    respond((|| {
        let b = saturated(scenario)?;
        let d = b.domain().map_err(|e| e.to_string())?;
        let mut inis = inis_from_json(ini, &b, &d).map_err(|e| e.to_string())?;
        if inis.len() != 1 {
            return Err(format!("expected one initial valuation, found {}", inis.len()));
        }
        let omega = trace_from_text(trace, &b, &d).map_err(|e| e.to_string())?;
        let tc = derive_test_case(&b, &inis.remove(0), &d, omega.len() + 1).map_err(|e| e.to_string())?;
        let v = bddts::concrete::verdict(&tc, &omega);
        Ok(json!({
            "verdict": v.kind.to_string(),
            "decided_after": v.prefix.len(),
            "steps": omega.len(),
            "dot": test_case_to_dot(&tc),
        }))
    })())
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOOR: &str = include_str!("../../core/data/door.feature");
    const DENIED: &str = include_str!("../../core/data/door_denied.feature");
    const INI: &str = include_str!("../../core/data/door_ini.json");

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn saturating_the_door_adds_three_switches() {
        let r = parse(&saturate_scenario(DOOR));
        assert_eq!(r["ok"], true);
        assert_eq!(r["title"], "Door access");
        assert_eq!(r["added"], 3);
        assert!(r["dot"].as_str().unwrap().contains("__top"));
    }

    #[test]
    fn composing_the_two_door_scenarios_is_equivalent() {
        let r = parse(&compose_scenarios(DOOR, DENIED));
        assert_eq!(r["ok"], true, "{r}");
        assert_eq!(r["equivalent"], true);
        assert!(r["report"].as_str().unwrap().starts_with("equivalent up to"));
    }

    #[test]
    fn verdicts_on_traces() {
        let pass = parse(&verdict(DOOR, INI, "verify_badge(1234) trigger_door(1, OPEN)"));
        assert_eq!(pass["verdict"], "pass");
        let fail = parse(&verdict(DOOR, INI, "verify_badge(1234) trigger_door(1, CLOSED)"));
        assert_eq!(fail["verdict"], "fail");
        assert_eq!(fail["decided_after"], 2);
    }

    #[test]
    fn errors_are_reported_not_thrown() {
        let r = parse(&saturate_scenario("Scenario: nothing\n"));
        assert_eq!(r["ok"], false);
        assert!(r["error"].as_str().unwrap().contains("Then"));
        let r = parse(&verdict(DOOR, INI, "verify_badge(1234"));
        assert_eq!(r["ok"], false);
    }
}
