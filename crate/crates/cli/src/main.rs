use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use bddts::composition::{disjunction, find_isomorphism};
use bddts::concrete::{derive_test_case, run_against_sut, verdict, VerdictKind};
use bddts::dot::{model_to_dot, test_case_to_dot};
use bddts::format::{
    domain_from_json, gate_value_to_json, inis_from_json, model_from_json, model_to_json, sut_from_json,
    test_case_from_json, test_case_to_value, trace_from_text, valuation_to_json,
};
use bddts::saturation::{saturate, saturation_violations};
use bddts::scenario::parse_scenario_with;
use bddts::symbolic::{all_inis, testing_equivalent, EquivReport};
use bddts::terms::{show_valuation, DomainSpec};
use bddts::Bddts;
use clap::{Parser, Subcommand};
use serde_json::json;

/// Behaviour-driven transition systems: build, compose and test models.
#[derive(Parser)]
#[command(name = "bddts", version)]
struct Cli {
    /// Sorts to use instead of the ones declared in the model files.
    #[arg(long, global = true)]
    domain: Option<PathBuf>,
    /// Machine-readable report on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Turn a scenario file into a model.
    Parse {
        scenario: PathBuf,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Check a model for well-formedness.
    Validate { model: PathBuf },
    /// Saturate a model.
    Saturate {
        model: PathBuf,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Disjunctive composition of two or more saturated models, folded left.
    Compose {
        #[arg(num_args = 2.., required = true)]
        models: Vec<PathBuf>,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Look for an isomorphism between two models.
    Iso {
        left: PathBuf,
        right: PathBuf,
        /// Largest location count the search accepts.
        #[arg(long, default_value_t = 12)]
        cap: usize,
    },
    /// Bounded testing equivalence of two sets of models.
    CheckEquiv {
        #[arg(long, value_delimiter = ',', required = true)]
        left: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',', required = true)]
        right: Vec<PathBuf>,
        /// Initial valuations to check; all of them when omitted.
        #[arg(long)]
        ini: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        max_sigma: usize,
    },
    /// Build the test case of a model for one initial valuation.
    GenTests {
        model: PathBuf,
        #[arg(long)]
        ini: PathBuf,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Run a test case against a simulated system.
    Run {
        test_case: PathBuf,
        #[arg(long)]
        sut: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        max_steps: usize,
    },
    /// Verdict of a test case on a trace such as `a(1) b(OPEN)`.
    Verdict { test_case: PathBuf, trace: String },
    /// Graphviz rendering of a model or a test case.
    ExportDot {
        input: PathBuf,
        #[arg(short)]
        o: Option<PathBuf>,
    },
}

/// Writes to stdout, ignoring a closed pipe.
fn out(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(o: &Option<PathBuf>, text: &str) -> Result<()> {
    match o {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            out(text);
            Ok(())
        }
    }
}

struct Ctx {
    domain: Option<DomainSpec>,
    json: bool,
}

impl Ctx {
    fn load(&self, path: &Path) -> Result<(Bddts, DomainSpec)> {
        let b = model_from_json(&read(path)?).with_context(|| format!("loading {}", path.display()))?;
        let d = match &self.domain {
            Some(d) => d.clone(),
            None => b.domain()?,
        };
        Ok((b, d))
    }

    fn report(&self, value: serde_json::Value, text: impl FnOnce() -> String) {
        if self.json {
            out(&format!("{value:#}\n"));
        } else {
            out(&format!("{}\n", text()));
        }
    }
}

/// Exit status 0 for a positive result and 1 for a negative one.
fn status(ok: bool) -> u8 {
    if ok {
        0
    } else {
        1
    }
}

fn execute(cli: Cli) -> Result<u8> {
    let domain = match &cli.domain {
        Some(p) => Some(domain_from_json(&read(p)?)?),
        None => None,
    };
    let ctx = Ctx { domain, json: cli.json };
    match cli.cmd {
        Cmd::Parse { scenario, o } => {
            let base: Vec<_> = ctx.domain.iter().flat_map(|d| d.sorts().cloned()).collect();
            let sc = parse_scenario_with(&read(&scenario)?, &base)
                .with_context(|| format!("parsing {}", scenario.display()))?;
            emit(&o, &model_to_json(&sc.model))?;
            Ok(0)
        }
        Cmd::Validate { model } => {
            let (b, d) = ctx.load(&model)?;
            let report = b.validate(&d)?;
            let saturation: Vec<String> = if report.is_ok() {
                saturation_violations(&b, &d)?.iter().map(ToString::to_string).collect()
            } else {
                Vec::new()
            };
            let violations: Vec<String> = report.violations.iter().map(ToString::to_string).collect();
            ctx.report(
                json!({
                    "valid": report.is_ok(),
                    "violations": violations,
                    "saturated": report.is_ok() && saturation.is_empty(),
                    "saturation_violations": saturation,
                    "output_rich": b.is_output_rich(),
                }),
                || {
                    let mut out = if report.is_ok() {
                        "valid".to_string()
                    } else {
                        format!("invalid:\n{report}")
                    };
                    if report.is_ok() {
                        if saturation.is_empty() {
                            out.push_str("\nsaturated");
                        } else {
                            out.push_str("\nnot saturated:");
                            for s in &saturation {
                                out.push_str(&format!("\n  {s}"));
                            }
                        }
                    }
                    if let Some(v) = b.output_richness_violation() {
                        out.push_str(&format!("\nnot output-rich: {v}"));
                    }
                    out
                },
            );
            Ok(status(report.is_ok()))
        }
        Cmd::Saturate { model, o } => {
            let (b, d) = ctx.load(&model)?;
            emit(&o, &model_to_json(&saturate(&b, &d)?))?;
            Ok(0)
        }
        Cmd::Compose { models, o } => {
            let mut loaded = Vec::new();
            for path in &models {
                let (b, d) = ctx.load(path)?;
                if !b.saturated {
                    bail!("{} is not saturated; run `bddts saturate` first", path.display());
                }
                loaded.push((b, d, path));
            }
            let (mut acc, d, _) = loaded.remove(0);
            for (next, _, path) in &loaded {
                acc = disjunction(&acc, next, &d).with_context(|| format!("composing with {}", path.display()))?;
            }
            emit(&o, &model_to_json(&acc))?;
            Ok(0)
        }
        Cmd::Iso { left, right, cap } => {
            let (b1, d) = ctx.load(&left)?;
            let (b2, _) = ctx.load(&right)?;
            let found = find_isomorphism(&b1, &b2, &d, cap)?;
            match &found {
                Some(w) => ctx.report(json!({ "isomorphic": true, "locations": w.locations }), || {
                    let pairs: Vec<String> = w.locations.iter().map(|(a, b)| format!("  {a} -> {b}")).collect();
                    format!("isomorphic\n{}", pairs.join("\n"))
                }),
                None => ctx.report(json!({ "isomorphic": false }), || "not isomorphic".into()),
            }
            Ok(status(found.is_some()))
        }
        Cmd::CheckEquiv {
            left,
            right,
            ini,
            max_sigma,
        } => {
            let load_all = |paths: &[PathBuf]| {
                paths
                    .iter()
                    .map(|p| ctx.load(p).map(|(b, _)| b))
                    .collect::<Result<Vec<_>>>()
            };
            let (ls, rs) = (load_all(&left)?, load_all(&right)?);
            let d = match &ctx.domain {
                Some(d) => d.clone(),
                None => ls[0].domain()?,
            };
            let inis = match &ini {
                Some(p) => inis_from_json(&read(p)?, &ls[0], &d)?,
                None => all_inis(&ls[0], &d)?,
            };
            let report = testing_equivalent(
                &ls.iter().collect::<Vec<_>>(),
                &rs.iter().collect::<Vec<_>>(),
                &inis,
                max_sigma,
                &d,
            )?;
            let value = match &report {
                EquivReport::Equivalent { bound, inis, sigmas } => {
                    json!({ "equivalent": true, "bound": bound, "inis": inis, "sigmas": sigmas })
                }
                EquivReport::Counterexample {
                    ini,
                    sigma,
                    side,
                    witness,
                } => json!({
                    "equivalent": false,
                    "ini": valuation_to_json(ini),
                    "sigma": sigma,
                    "side": format!("{side:?}"),
                    "witness": show_valuation(witness),
                }),
            };
            ctx.report(value, || report.to_string());
            Ok(status(report.is_equivalent()))
        }
        Cmd::GenTests { model, ini, depth, o } => {
            let (b, d) = ctx.load(&model)?;
            let mut inis = inis_from_json(&read(&ini)?, &b, &d)?;
            if inis.len() != 1 {
                bail!("expected exactly one initial valuation, found {}", inis.len());
            }
            if !b.saturated {
                eprintln!("warning: {} is not saturated", model.display());
            }
            let tc = derive_test_case(&b, &inis.remove(0), &d, depth)?;
            eprintln!(
                "{} states, {} pass, {} fail edges",
                tc.lts.states.len(),
                tc.pass.len(),
                tc.fail.len()
            );
            emit(&o, &format!("{:#}\n", test_case_to_value(&tc)))?;
            Ok(0)
        }
        Cmd::Run {
            test_case,
            sut,
            seed,
            max_steps,
        } => {
            let tc = test_case_from_json(&read(&test_case)?)?;
            let s = sut_from_json(&read(&sut)?)?;
            let d = match &ctx.domain {
                Some(d) => d.clone(),
                None => tc.model.domain()?,
            };
            let run = run_against_sut(&tc, &s, &d, seed, max_steps)?;
            let transcript: Vec<String> = run.transcript.iter().map(ToString::to_string).collect();
            ctx.report(
                json!({
                    "verdict": run.verdict.kind.to_string(),
                    "transcript": run.transcript.iter().map(gate_value_to_json).collect::<Vec<_>>(),
                    "budget_exhausted": run.budget_exhausted,
                    "beyond_bound": run.verdict.beyond_bound,
                }),
                || {
                    let mut out = transcript
                        .iter()
                        .map(|t| format!("  {t}"))
                        .collect::<Vec<_>>()
                        .join("\n");
                    if !out.is_empty() {
                        out.push('\n');
                    }
                    out.push_str(&format!("verdict: {}", run.verdict.kind));
                    if run.budget_exhausted {
                        out.push_str(" (step budget exhausted)");
                    } else if run.verdict.beyond_bound {
                        out.push_str(" (beyond the depth bound)");
                    }
                    out
                },
            );
            Ok(status(run.verdict.kind == VerdictKind::Pass))
        }
        Cmd::Verdict { test_case, trace } => {
            let tc = test_case_from_json(&read(&test_case)?)?;
            let d = tc.model.domain()?;
            let omega = trace_from_text(&trace, &tc.model, &d)?;
            let v = verdict(&tc, &omega);
            ctx.report(
                json!({ "verdict": v.kind.to_string(), "prefix": v.prefix.len(), "beyond_bound": v.beyond_bound }),
                || format!("{} after {} of {} steps", v.kind, v.prefix.len(), omega.len()),
            );
            Ok(status(v.kind == VerdictKind::Pass))
        }
        Cmd::ExportDot { input, o } => {
            let text = read(&input)?;
            let probe: serde_json::Value = serde_json::from_str(&text)?;
            let dot = if probe.get("lts").is_some() {
                test_case_to_dot(&test_case_from_json(&text)?)
            } else {
                model_to_dot(&model_from_json(&text)?)
            };
            emit(&o, &dot)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
