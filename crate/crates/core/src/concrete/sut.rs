use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::Bddts;
use crate::symbolic::check_ini;
use crate::terms::{DomainSpec, Valuation};

use super::lts::{successors, value_table, State, TestCase, Verdict, VerdictKind};
use super::GateValue;

/// A simulated system under test: a model executed from an initial valuation.
/// Output guards play no role.
#[derive(Clone, Debug)]
pub struct Sut {
    pub model: Bddts,
    pub ini: Valuation,
}

/// Outcome of a test run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run {
    pub verdict: Verdict,
    pub transcript: Vec<GateValue>,
    pub budget_exhausted: bool,
}

/// Drives the SuT through the test case.
///
/// At an open test state the driver picks, with a seeded generator, either an
/// input the test case offers and the SuT accepts, or an output the SuT can
/// produce. At a closed test state only SuT outputs are observed.
pub fn run_against_sut(tc: &TestCase, sut: &Sut, d: &DomainSpec, seed: u64, max_steps: usize) -> Result<Run> {
    tc.model
        .compatible_with(&sut.model)
        .map_err(|e| Error::IncompatibleModels(format!("SuT gates do not match: {e}")))?;
    check_ini(&sut.model, &sut.ini, d)?;
    let values = value_table(&sut.model, d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q = 0usize;
    let mut s = State {
        location: sut.model.initial.clone(),
        valuation: sut.ini.clone(),
    };
    let mut transcript = Vec::new();
    let finish = |kind, transcript: Vec<GateValue>, beyond_bound, budget_exhausted| Run {
        verdict: Verdict {
            kind,
            prefix: transcript.clone(),
            beyond_bound,
        },
        transcript,
        budget_exhausted,
    };
    for _ in 0..max_steps {
        if tc.pass.contains(&q) {
            return Ok(finish(VerdictKind::Pass, transcript, false, false));
        }
        if !tc.lts.expanded[q] {
            return Ok(finish(VerdictKind::Inconclusive, transcript, true, false));
        }
        let moves = successors(&sut.model, &s, &values)?;
        let is_output = |u: &GateValue| sut.model.gate(&u.gate).map(|g| g.is_output()).unwrap_or(false);
        let mut options: Vec<usize> = Vec::new();
        for (k, (u, _)) in moves.iter().enumerate() {
            let offered_input = !is_output(u) && !tc.is_closed(q) && tc.lts.successor(q, u).is_some();
            if is_output(u) || offered_input {
                options.push(k);
            }
        }
        let Some(&pick) = options.choose(&mut rng) else {
            return Ok(finish(VerdictKind::Inconclusive, transcript, false, false));
        };
        let (u, next) = moves[pick].clone();
        transcript.push(u.clone());
        if tc.fails_on(q, &u) {
            return Ok(finish(VerdictKind::Fail, transcript, false, false));
        }
        match tc.lts.successor(q, &u) {
            Some(nq) => q = nq,
            None => return Ok(finish(VerdictKind::Inconclusive, transcript, false, false)),
        }
        s = next;
    }
    let kind = if tc.pass.contains(&q) {
        VerdictKind::Pass
    } else {
        VerdictKind::Inconclusive
    };
    Ok(finish(kind, transcript, false, kind == VerdictKind::Inconclusive))
}
