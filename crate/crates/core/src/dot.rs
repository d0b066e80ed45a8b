//! Graphviz output for models and test cases.

use std::fmt::Write;

use crate::concrete::TestCase;
use crate::model::{Bddts, Nature};
use crate::terms::show_valuation;

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn nature(n: Nature) -> &'static str {
    match n {
        Nature::Open => "open",
        Nature::Closed => "closed",
    }
}

/// Locations become nodes labelled with name, nature and output guard;
/// switches become edges labelled `g [guard] / assignment`.
pub fn model_to_dot(b: &Bddts) -> String {
    let mut out = String::from("digraph bddts {\n  rankdir=LR;\n  __start [shape=point];\n");
    let _ = writeln!(out, "  __start -> {};", quote(&b.initial));
    let _ = writeln!(out, "  label={};", quote(&format!("IG: {}", b.ig)));
    for l in &b.locations {
        let mut label = format!("{}\n{}", l.name, nature(l.nature));
        if let Some(og) = &l.og {
            let _ = write!(label, "\nOG: {og}");
        }
        let shape = if l.nature == Nature::Closed { "box" } else { "ellipse" };
        let _ = writeln!(out, "  {} [label={}, shape={shape}];", quote(&l.name), quote(&label));
    }
    for s in &b.switches {
        let label = format!("{} [{}] / {}", s.gate, s.guard, s.assign);
        let _ = writeln!(
            out,
            "  {} -> {} [label={}];",
            quote(&s.from),
            quote(&s.to),
            quote(&label)
        );
    }
    out.push_str("}\n");
    out
}

/// States of the LTS become nodes; pass states are double circles and the
/// failure state is a double octagon.
pub fn test_case_to_dot(tc: &TestCase) -> String {
    let mut out = String::from("digraph testcase {\n  rankdir=LR;\n  __start [shape=point];\n  __start -> q0;\n");
    for (i, s) in tc.lts.states.iter().enumerate() {
        let shape = if tc.pass.contains(&i) {
            "doublecircle"
        } else if tc.lts.expanded[i] {
            "circle"
        } else {
            "circle, style=dashed"
        };
        let label = format!("{}\n{}", s.location, show_valuation(&s.valuation));
        let _ = writeln!(out, "  q{i} [label={}, shape={shape}];", quote(&label));
    }
    if !tc.fail.is_empty() {
        out.push_str("  q_f [label=\"fail\", shape=doubleoctagon];\n");
    }
    for t in &tc.lts.transitions {
        let _ = writeln!(
            out,
            "  q{} -> q{} [label={}];",
            t.from,
            t.to,
            quote(&t.label.to_string())
        );
    }
    for (q, u) in &tc.fail {
        let _ = writeln!(out, "  q{q} -> q_f [label={}, color=red];", quote(&u.to_string()));
    }
    out.push_str("}\n");
    out
}
