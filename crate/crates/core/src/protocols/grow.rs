//! Growing cats one qubit at a time: a Bell measurement on one qubit of an
//! N-cat and one qubit of a GHZ triple leaves an (N+1)-cat.

use std::collections::BTreeSet;

use rand::Rng;

use crate::catalg::{check_agreement, product_state, swap_simulate, CatLabel, SwapScenario};
use crate::error::{Error, Result};
use crate::protocols::{joint_overlap, Mode};
use crate::qstate::{Sign, PIPELINE_TOL};
use crate::report::{sig12, Check, OutcomeRecord, ProtocolReport};

pub const MIN_GROW: usize = 2;
pub const MAX_GROW: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct GrowOutcome {
    pub outcome: CatLabel,
    pub probability: f64,
    pub residual: Option<CatLabel>,
    /// `|⟨outcome ⊗ residual|ψ⟩|²`; equals `probability` when the measured
    /// pair really ends up in the outcome Bell state.
    pub joint_weight: f64,
}

/// Bell-measures the last qubit of `cat` together with the first qubit of a
/// fresh GHZ triple. `cat` is placed on qubits `0..n`, the GHZ on `n..n+3`.
pub fn grow_step(cat: &CatLabel) -> Result<(SwapScenario, Vec<GrowOutcome>, Agreement)> {
    let n = cat.len();
    if !(MIN_GROW..=MAX_GROW).contains(&n) {
        return Err(Error::range("N", n, MIN_GROW, MAX_GROW));
    }
    let cat = cat.relabel((0..n).collect())?;
    let ghz = CatLabel::ghz(vec![n, n + 1, n + 2])?;
    let scenario = SwapScenario::new(vec![cat, ghz], vec![vec![n - 1], vec![n]])?;
    let (outcomes, agreement) = run_scenario(&scenario)?;
    Ok((scenario, outcomes, agreement))
}

/// Result of comparing the simulation with the swapping law.
pub type Agreement = std::result::Result<(), String>;

fn run_scenario(scenario: &SwapScenario) -> Result<(Vec<GrowOutcome>, Agreement)> {
    let dist = swap_simulate(scenario)?;
    let agreement = check_agreement(scenario, &dist, PIPELINE_TOL);
    let cats: Vec<&CatLabel> = scenario.cats.iter().collect();
    let (state, layout) = product_state(&cats)?;
    let outcomes = dist
        .nonzero()
        .map(|e| {
            let joint_weight = match &e.residual {
                Some(r) => joint_overlap(&state, &layout, &e.outcome, r)?,
                None => 0.0,
            };
            Ok(GrowOutcome {
                outcome: e.outcome.clone(),
                probability: e.probability,
                residual: e.residual.clone(),
                joint_weight,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((outcomes, agreement))
}

fn add_outcomes<R: Rng + ?Sized>(report: &mut ProtocolReport, outcomes: &[GrowOutcome], mode: Mode, rng: &mut R) {
    let counts: Vec<Option<usize>> = match mode {
        Mode::Exhaustive => vec![None; outcomes.len()],
        Mode::Sampled { trials } => {
            let mut c = vec![0usize; outcomes.len()];
            for _ in 0..trials {
                let mut r = rng.gen::<f64>();
                let mut pick = outcomes.len() - 1;
                for (i, o) in outcomes.iter().enumerate() {
                    r -= o.probability;
                    if r < 0.0 {
                        pick = i;
                        break;
                    }
                }
                c[pick] += 1;
            }
            c.into_iter().map(Some).collect()
        }
    };
    for (o, count) in outcomes.iter().zip(counts) {
        if count == Some(0) {
            continue;
        }
        let mut rec = OutcomeRecord::new(Some(o.outcome.clone()), o.probability, o.residual.clone())
            .detail("joint_weight", sig12(o.joint_weight));
        rec.count = count;
        report.outcomes.push(rec);
    }
}

fn outcome_checks(
    report: &mut ProtocolReport,
    outcomes: &[GrowOutcome],
    agreement: &Agreement,
    expected_outcomes: usize,
    residual_len: usize,
) {
    report.check(Check::new(
        "supported outcomes",
        expected_outcomes.to_string(),
        outcomes.len().to_string(),
        outcomes.len() == expected_outcomes,
    ));
    let total: f64 = outcomes.iter().map(|o| o.probability).sum();
    report.check(Check::close("outcome probabilities sum to 1", 1.0, total, PIPELINE_TOL));
    let cats = outcomes
        .iter()
        .filter(|o| o.residual.as_ref().is_some_and(|r| r.len() == residual_len))
        .count();
    report.check(Check::new(
        format!("every residual is a {residual_len}-cat"),
        outcomes.len().to_string(),
        cats.to_string(),
        cats == outcomes.len(),
    ));
    let worst = outcomes.iter().map(|o| (o.joint_weight - o.probability).abs()).fold(0.0, f64::max);
    report.check(Check::close("measured qubits end in the outcome state", 0.0, worst, PIPELINE_TOL));
    report.check(Check::holds(
        "swap law agrees with simulation",
        agreement.clone().err().unwrap_or_else(|| "true".into()),
        agreement.is_ok(),
    ));
}

/// `|E(N)⟩ ⊗ |E(3)⟩ → |E(N+1)⟩ ⊗ |E(2)⟩` starting from the N-qubit GHZ.
pub fn grow_cat<R: Rng + ?Sized>(n: usize, mode: Mode, rng: &mut R) -> Result<ProtocolReport> {
    mode.validate()?;
    if !(MIN_GROW..=MAX_GROW).contains(&n) {
        return Err(Error::range("N", n, MIN_GROW, MAX_GROW));
    }
    let (scenario, outcomes, agreement) = grow_step(&CatLabel::ghz((0..n).collect())?)?;
    let mut report = ProtocolReport::new("grow", mode.to_string());
    report.value("N", n);
    report.value("residual_qubits", scenario.residual_qubits());
    add_outcomes(&mut report, &outcomes, mode, rng);
    outcome_checks(&mut report, &outcomes, &agreement, 4, n + 1);
    Ok(report)
}

/// Three Bell pairs with one qubit of each projected onto the GHZ basis.
pub fn ghz_from_three_bells<R: Rng + ?Sized>(mode: Mode, rng: &mut R) -> Result<ProtocolReport> {
    mode.validate()?;
    let bells = (0..3)
        .map(|i| CatLabel::ghz(vec![2 * i, 2 * i + 1]))
        .collect::<Result<Vec<_>>>()?;
    let scenario = SwapScenario::new(bells, vec![vec![1], vec![3], vec![5]])?;
    let (outcomes, agreement) = run_scenario(&scenario)?;
    let mut report = ProtocolReport::new("grow", mode.to_string());
    report.value("N", 2);
    report.value("via", "three Bell pairs");
    report.value("residual_qubits", scenario.residual_qubits());
    add_outcomes(&mut report, &outcomes, mode, rng);
    outcome_checks(&mut report, &outcomes, &agreement, 8, 3);
    Ok(report)
}

/// Grows from `from` to `to` qubits along every outcome branch. Branches
/// that reach the same (pattern, sign) are merged, so each step handles at
/// most `2^N` distinct cats.
pub fn grow_chain(from: usize, to: usize) -> Result<ProtocolReport> {
    if !(MIN_GROW..=MAX_GROW).contains(&from) || !(from..=MAX_GROW + 1).contains(&to) {
        return Err(Error::InvalidParameter(format!(
            "grow chain needs {MIN_GROW} <= from <= to <= {}, got {from}..{to}",
            MAX_GROW + 1
        )));
    }
    let mut report = ProtocolReport::new("grow-chain", "exhaustive");
    report.value("from", from);
    report.value("to", to);
    let mut frontier: BTreeSet<(String, Sign)> = BTreeSet::new();
    frontier.insert(("0".repeat(from), Sign::Plus));
    let mut all_ok = true;
    let mut branches = 0usize;
    for n in from..to {
        let mut next = BTreeSet::new();
        let mut step_ok = true;
        for (pattern, sign) in &frontier {
            let cat = CatLabel::parse((0..n).collect(), pattern, *sign)?;
            let (_, outcomes, agreement) = grow_step(&cat)?;
            branches += outcomes.len();
            step_ok &= outcomes.len() == 4 && agreement.is_ok();
            for o in &outcomes {
                let ok = o.residual.as_ref().is_some_and(|r| r.len() == n + 1)
                    && (o.probability - 0.25).abs() <= PIPELINE_TOL
                    && (o.joint_weight - o.probability).abs() <= PIPELINE_TOL;
                step_ok &= ok;
                if let Some(r) = &o.residual {
                    next.insert((r.pattern().to_string(), r.sign()));
                }
            }
        }
        report.check(Check::new(
            format!("{n} -> {} qubits on every branch", n + 1),
            format!("{} inputs x 4 outcomes give cats", frontier.len()),
            format!("{} distinct {}-cats", next.len(), n + 1),
            step_ok,
        ));
        all_ok &= step_ok;
        frontier = next;
    }
    report.value("branches", branches);
    report.value("passed", all_ok);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_to_five() {
        let mut rng = crate::rng::substream(0, 0);
        let report = grow_cat(4, Mode::Exhaustive, &mut rng).unwrap();
        assert!(report.passed(), "{:#?}", report.checks);
        assert_eq!(report.outcomes.len(), 4);
        for o in &report.outcomes {
            assert_eq!(o.residual.as_ref().unwrap().qubits(), &[0, 1, 2, 5, 6]);
        }
    }

    #[test]
    fn bell_plus_ghz_gives_ghz() {
        let mut rng = crate::rng::substream(0, 0);
        let report = grow_cat(2, Mode::Exhaustive, &mut rng).unwrap();
        assert!(report.passed());
        assert!(report.outcomes.iter().all(|o| o.residual.as_ref().unwrap().len() == 3));
    }

    #[test]
    fn three_bells() {
        let mut rng = crate::rng::substream(0, 0);
        let report = ghz_from_three_bells(Mode::Exhaustive, &mut rng).unwrap();
        assert!(report.passed(), "{:#?}", report.checks);
        assert_eq!(report.outcomes.len(), 8);
    }

    #[test]
    fn range_errors() {
        let mut rng = crate::rng::substream(0, 0);
        assert!(grow_cat(1, Mode::Exhaustive, &mut rng).is_err());
        assert!(grow_cat(11, Mode::Exhaustive, &mut rng).is_err());
        assert!(grow_chain(3, 2).is_err());
    }

    #[test]
    fn short_chain() {
        let report = grow_chain(2, 5).unwrap();
        assert!(report.passed());
        assert_eq!(report.checks.len(), 3);
    }

    #[test]
    fn sampled_grow() {
        let mut rng = crate::rng::substream(4, 0);
        let report = grow_cat(3, Mode::Sampled { trials: 200 }, &mut rng).unwrap();
        assert_eq!(report.outcomes.iter().map(|o| o.count.unwrap()).sum::<usize>(), 200);
    }
}
