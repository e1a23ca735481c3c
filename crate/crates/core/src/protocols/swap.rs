//! Report for a plain swap scenario: simulated distribution plus the law.

use rand::Rng;

use crate::catalg::{check_agreement, swap_simulate, SwapScenario};
use crate::error::Result;
use crate::protocols::Mode;
use crate::qstate::PIPELINE_TOL;
use crate::report::{Check, OutcomeRecord, ProtocolReport};

pub fn swap_report<R: Rng + ?Sized>(scenario: &SwapScenario, mode: Mode, rng: &mut R) -> Result<ProtocolReport> {
    mode.validate()?;
    let dist = swap_simulate(scenario)?;
    let mut report = ProtocolReport::new("swap", mode.to_string());
    report.value("measured_qubits", scenario.measured_qubits());
    report.value("residual_qubits", scenario.residual_qubits());

    let counts = match mode {
        Mode::Exhaustive => None,
        Mode::Sampled { trials } => Some(dist.sample(rng, trials)),
    };
    for (i, e) in dist.entries.iter().enumerate() {
        if e.probability <= 0.0 {
            continue;
        }
        let count = counts.as_ref().map(|c| c.get(&i).copied().unwrap_or(0));
        if count == Some(0) {
            continue;
        }
        let mut rec = OutcomeRecord::new(Some(e.outcome.clone()), e.probability, e.residual.clone());
        rec.count = count;
        report.outcomes.push(rec);
    }

    let supported: Vec<_> = dist.nonzero().collect();
    let expected = 0.5f64.powi(scenario.measured_cats().len() as i32);
    report.check(Check::close("outcome probabilities sum to 1", 1.0, dist.total_probability(), PIPELINE_TOL));
    let worst = supported.iter().map(|e| (e.probability - expected).abs()).fold(0.0, f64::max);
    report.check(Check::close("uniform outcome probability", 0.0, worst, PIPELINE_TOL));
    let cats = supported.iter().filter(|e| e.residual.is_some()).count();
    report.check(Check::new(
        "every residual is a cat",
        supported.len().to_string(),
        cats.to_string(),
        cats == supported.len(),
    ));
    let agreement = check_agreement(scenario, &dist, PIPELINE_TOL);
    report.check(Check::holds(
        "swap law agrees with simulation",
        agreement.clone().err().unwrap_or_else(|| "true".into()),
        agreement.is_ok(),
    ));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalg::CatLabel;

    #[test]
    fn bell_swap_report() {
        let s = SwapScenario::new(
            vec![CatLabel::ghz(vec![0, 1]).unwrap(), CatLabel::ghz(vec![2, 3]).unwrap()],
            vec![vec![1], vec![2]],
        )
        .unwrap();
        let mut rng = crate::rng::substream(0, 0);
        let r = swap_report(&s, Mode::Exhaustive, &mut rng).unwrap();
        assert!(r.passed());
        assert_eq!(r.outcomes.len(), 4);
        let r = swap_report(&s, Mode::Sampled { trials: 100 }, &mut rng).unwrap();
        assert_eq!(r.outcomes.iter().map(|o| o.count.unwrap()).sum::<usize>(), 100);
    }
}
