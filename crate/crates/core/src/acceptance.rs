//! The acceptance suite: eleven end-to-end criteria, each reduced to a
//! pass/fail line with a short measured summary. Shared by `catswap verify`
//! and the `acceptance` integration test.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::catalg::{
    check_agreement, identify_cat, swap_simulate, CatLabel, SwapDistribution, SwapScenario,
};
use crate::circuits::{
    analyze_cat, cat_generator_circuit, label_for_bits, zeilinger_branch,
};
use crate::catalg::cat_state;
use crate::error::Result;
use crate::protocols::{
    amplitude_swap_correct, conference_key, exchange_entangle, grow_chain, information_rates,
    superdense_exhaustive, BasisMode, Eavesdropper, Mode, NetworkTopology, SuperdenseAssignment,
};
use crate::qstate::{ket_index, Gate, Sign, StateVector, ALGEBRA_TOL, PIPELINE_TOL};
use crate::report::{emit_report, Format};
use crate::rng::substream;
use crate::scenario::{bundled, run_scenario, ScenarioConfig, BUNDLED};
use crate::timing::{direct_time, hierarchical_time, relay_time, LinkModel};

#[derive(Debug, Clone, PartialEq)]
pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for Criterion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{status}] {:>2}. {}: {}", self.id, self.name, self.detail)
    }
}

type Outcome = Result<(bool, String)>;
type Check = fn() -> Outcome;

pub const CRITERIA: &[(u8, &str, Check)] = &[
    (1, "Bell-swap table", bell_swap_table),
    (2, "generalized swap theorem", swap_theorem),
    (3, "GHZ projection on two Bells and a GHZ", ghz_from_bells),
    (4, "exchange network", exchange_network),
    (5, "amplitude correction", amplitude_correction),
    (6, "multiparty superdense coding", superdense),
    (7, "circuits", circuits),
    (8, "grow chain", grow),
    (9, "relay timing", timing),
    (10, "conferencing", conferencing),
    (11, "determinism", determinism),
];

pub fn run_criterion(id: u8) -> Option<Criterion> {
    CRITERIA.iter().find(|(i, _, _)| *i == id).map(|&(id, name, f)| {
        let (passed, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
        Criterion {
            id,
            name,
            passed,
            detail,
        }
    })
}

pub fn run_all() -> Vec<Criterion> {
    CRITERIA.iter().filter_map(|(id, _, _)| run_criterion(*id)).collect()
}

fn bell(qubits: [usize; 2], pattern: &str, sign: Sign) -> Result<CatLabel> {
    CatLabel::parse(qubits.to_vec(), pattern, sign)
}

/// Every supported entry is a cat with probability `2^-N'`, the entries sum
/// to one and the swap law reproduces them. Returns a failure message.
pub fn swap_law_holds(scenario: &SwapScenario, dist: &SwapDistribution) -> std::result::Result<(), String> {
    let expected = 0.5f64.powi(scenario.measured_cats().len() as i32);
    let total = dist.total_probability();
    if (total - 1.0).abs() > PIPELINE_TOL {
        return Err(format!("probabilities sum to {total}"));
    }
    for e in dist.nonzero() {
        if (e.probability - expected).abs() > PIPELINE_TOL {
            return Err(format!("outcome {} has p = {}, expected {expected}", e.outcome, e.probability));
        }
        if e.residual.is_none() {
            return Err(format!("outcome {} leaves a non-cat residual", e.outcome));
        }
    }
    check_agreement(scenario, dist, PIPELINE_TOL)
}

fn bell_swap_table() -> Outcome {
    let mut failures = Vec::new();
    let mut inputs = 0;
    for p1 in ["00", "01"] {
        for s1 in [Sign::Plus, Sign::Minus] {
            for p2 in ["00", "01"] {
                for s2 in [Sign::Plus, Sign::Minus] {
                    inputs += 1;
                    let scenario = SwapScenario::new(
                        vec![bell([0, 1], p1, s1)?, bell([2, 3], p2, s2)?],
                        vec![vec![1], vec![2]],
                    )?;
                    let dist = swap_simulate(&scenario)?;
                    let supported: Vec<_> = dist.nonzero().collect();
                    if supported.len() != 4 {
                        failures.push(format!("{p1}{s1}{p2}{s2}: {} outcomes", supported.len()));
                    }
                    if let Err(e) = swap_law_holds(&scenario, &dist) {
                        failures.push(e);
                    }
                }
            }
        }
    }
    // Φ+ ⊗ Φ+: the outer pair ends in the same Bell state that was measured.
    let scenario = SwapScenario::new(
        vec![bell([0, 1], "00", Sign::Plus)?, bell([2, 3], "00", Sign::Plus)?],
        vec![vec![1], vec![2]],
    )?;
    for e in swap_simulate(&scenario)?.nonzero() {
        let want = CatLabel::new(vec![0, 3], e.outcome.pattern().0.clone(), e.outcome.sign())?;
        if e.residual.as_ref() != Some(&want) {
            failures.push(format!("outcome {} left {:?}", e.outcome, e.residual));
        }
    }
    Ok(summary(failures, format!("{inputs} inputs x 4 outcomes at p = 0.25")))
}

fn summary(failures: Vec<String>, ok: String) -> (bool, String) {
    match failures.first() {
        None => (true, ok),
        Some(first) => (false, format!("{} failures, first: {first}", failures.len())),
    }
}

/// Fixed scenarios of up to 12 qubits.
pub fn scenario_catalog() -> Result<Vec<SwapScenario>> {
    let c = |q: &[usize], p: &str, s: Sign| CatLabel::parse(q.to_vec(), p, s);
    Ok(vec![
        SwapScenario::new(vec![c(&[0, 1], "00", Sign::Plus)?, c(&[2, 3], "00", Sign::Plus)?], vec![vec![1], vec![2]])?,
        SwapScenario::new(
            vec![c(&[0, 1], "00", Sign::Plus)?, c(&[2, 3], "00", Sign::Plus)?, c(&[4, 5, 6], "000", Sign::Plus)?],
            vec![vec![1], vec![2], vec![4]],
        )?,
        SwapScenario::new(
            vec![c(&[0, 1], "00", Sign::Plus)?, c(&[2, 3], "00", Sign::Plus)?, c(&[4, 5], "00", Sign::Plus)?],
            vec![vec![1], vec![3], vec![5]],
        )?,
        SwapScenario::new(
            vec![c(&[0, 1, 2, 3], "0000", Sign::Plus)?, c(&[4, 5, 6], "000", Sign::Plus)?],
            vec![vec![3], vec![4]],
        )?,
        SwapScenario::new(
            vec![c(&[0, 1, 2], "010", Sign::Minus)?, c(&[3, 4, 5], "011", Sign::Plus)?],
            vec![vec![1, 2], vec![3]],
        )?,
        SwapScenario::new(
            vec![c(&[0, 1, 2, 3], "0110", Sign::Minus)?, c(&[4, 5, 6, 7], "0001", Sign::Minus)?, c(&[8, 9], "01", Sign::Plus)?],
            vec![vec![2, 3], vec![4, 7], vec![9]],
        )?,
        SwapScenario::new(
            vec![c(&[0, 1, 2, 3, 4, 5], "000000", Sign::Plus)?, c(&[6, 7, 8, 9, 10, 11], "010101", Sign::Minus)?],
            vec![vec![0, 1, 2], vec![6, 7, 8]],
        )?,
        // one cat measured, one passing through untouched
        SwapScenario::new(
            vec![c(&[0, 1, 2], "001", Sign::Plus)?, c(&[3, 4], "00", Sign::Minus)?],
            vec![vec![0, 1], vec![]],
        )?,
        SwapScenario::new(
            (0..4).map(|i| c(&[2 * i, 2 * i + 1], "00", Sign::Plus)).collect::<Result<Vec<_>>>()?,
            (0..4).map(|i| vec![2 * i + 1]).collect(),
        )?,
    ])
}

/// A valid scenario of at most `max_qubits` qubits with shuffled qubit ids.
pub fn random_scenario<R: Rng + ?Sized>(rng: &mut R, max_qubits: usize) -> SwapScenario {
    loop {
        let count = rng.gen_range(1..=4);
        let mut sizes = Vec::new();
        let mut total = 0;
        for _ in 0..count {
            let size = rng.gen_range(2..=4);
            if total + size > max_qubits {
                break;
            }
            sizes.push(size);
            total += size;
        }
        let mut ids: Vec<usize> = (0..total).collect();
        ids.shuffle(rng);
        let mut cats = Vec::new();
        let mut measured = Vec::new();
        let mut next = 0;
        for size in sizes {
            let mut qubits = ids[next..next + size].to_vec();
            next += size;
            qubits.sort_unstable();
            let pattern: Vec<bool> = (0..size).map(|_| rng.gen()).collect();
            let label = CatLabel::new(qubits.clone(), pattern, Sign::from_bit(rng.gen())).expect("valid label");
            let chosen: Vec<usize> = qubits.iter().copied().filter(|_| rng.gen_bool(0.4)).collect();
            cats.push(label);
            measured.push(chosen);
        }
        let scenario = SwapScenario { cats, measured };
        if scenario.validate().is_ok() {
            return scenario;
        }
    }
}

fn swap_theorem() -> Outcome {
    let mut failures = Vec::new();
    let catalog = scenario_catalog()?;
    let mut entries = 0;
    for (i, s) in catalog.iter().enumerate() {
        let dist = swap_simulate(s)?;
        entries += dist.nonzero().count();
        if let Err(e) = swap_law_holds(s, &dist) {
            failures.push(format!("catalog #{i}: {e}"));
        }
    }
    let mut rng = substream(0x5eed, 2);
    for i in 0..500 {
        let s = random_scenario(&mut rng, 12);
        let dist = swap_simulate(&s)?;
        entries += dist.nonzero().count();
        if let Err(e) = swap_law_holds(&s, &dist) {
            failures.push(format!("random #{i}: {e}"));
        }
    }
    Ok(summary(
        failures,
        format!("{} catalog + 500 random scenarios, {entries} supported outcomes agree", catalog.len()),
    ))
}

fn ghz_from_bells() -> Outcome {
    let config = ScenarioConfig::from_toml(bundled("ghz-from-bells.toml").expect("bundled"))?;
    let report = run_scenario(&config)?;
    let ok = report.outcomes.len() == 8
        && report.outcomes.iter().all(|o| {
            o.outcome.as_ref().is_some_and(|c| c.len() == 3)
                && o.residual.as_ref().is_some_and(|r| r.len() == 4)
                && (o.probability - 0.125).abs() <= PIPELINE_TOL
        })
        && report.passed();
    Ok((ok, format!("{} outcomes, 3-cat outcome, 4-cat residual, p = 0.125 each", report.outcomes.len())))
}

fn exchange_network() -> Outcome {
    let users = ["A", "B", "C", "D"];
    let topo = NetworkTopology::star(&users);
    let mut failures = Vec::new();
    let mut subsets = 0;
    for mask in 0u32..16 {
        if mask.count_ones() < 2 {
            continue;
        }
        subsets += 1;
        let subset: Vec<String> = (0..4).filter(|i| mask >> i & 1 == 1).map(|i| users[i].to_string()).collect();
        let mut rng = substream(4, mask as u64);
        let report = exchange_entangle(&topo, &subset, Mode::Exhaustive, &mut rng)?;
        for c in report.failed_checks() {
            failures.push(format!("{}: {} (measured {})", subset.join(""), c.name, c.measured));
        }
    }
    Ok(summary(failures, format!("{subsets} subsets: users share cats, untouched pairs intact")))
}

fn amplitude_correction() -> Outcome {
    let mut failures = Vec::new();
    for k in 1..=50 {
        let theta = k as f64 * FRAC_PI_2 / 51.0;
        let mut rng = substream(5, k);
        let report = amplitude_swap_correct(theta, Mode::Exhaustive, &mut rng)?;
        for c in report.failed_checks() {
            failures.push(format!("theta {theta:.6}: {} (measured {})", c.name, c.measured));
        }
    }
    Ok(summary(failures, "50 angles match sin^2(2t)/2 and (1+cos^2(2t))/2".into()))
}

fn superdense() -> Outcome {
    let mut failures = Vec::new();
    for n in 1..=8 {
        let report = superdense_exhaustive(&SuperdenseAssignment::standard(n))?;
        for c in report.failed_checks() {
            failures.push(format!("N = {n}: {} (measured {})", c.name, c.measured));
        }
        let r = information_rates(n, 1.5, 1.5)?;
        if (r.r1 - r.r2).abs() > ALGEBRA_TOL || r.particles_multiparty != n + 1 || r.particles_pairwise != 2 * n {
            failures.push(format!("N = {n}: rates {r:?}"));
        }
        let (c1, c2) = crate::protocols::rates_from_circuits(n, 2.0, 1.0)?;
        let r = information_rates(n, 2.0, 1.0)?;
        if (c1 - r.r1).abs() > ALGEBRA_TOL || (c2 - r.r2).abs() > ALGEBRA_TOL {
            failures.push(format!("N = {n}: gate-count rates ({c1}, {c2}) vs {r:?}"));
        }
    }
    Ok(summary(failures, "N = 1..8: all messages decode to distinct labels; r1 = r2 at t_h = t_c".into()))
}

/// Uniform superposition of basis states written qubit 0 first.
fn kets(strings: &[&str]) -> Result<StateVector> {
    let n = strings[0].len();
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
    for s in strings {
        let bits: Vec<bool> = s.chars().map(|c| c == '1').collect();
        amps[ket_index(&bits)] += 1.0;
    }
    StateVector::from_unnormalized(amps)
}

fn circuits() -> Outcome {
    let mut failures = Vec::new();
    for n in 2..=8 {
        let gen = cat_generator_circuit(n)?;
        let qubits: Vec<usize> = (0..n).collect();
        for index in 0..1usize << n {
            let bits: Vec<bool> = (0..n).map(|k| index >> k & 1 == 1).collect();
            let out = gen.apply(&StateVector::basis(n, index)?)?;
            let label = label_for_bits(&qubits, &bits)?;
            if out.fidelity(&cat_state(&label)?)? < 1.0 - PIPELINE_TOL {
                failures.push(format!("generator n = {n}, input {index}"));
            }
            match analyze_cat(&out, &qubits) {
                Ok((read, _)) if read == bits => {}
                other => failures.push(format!("analyzer n = {n}, input {index}: {other:?}")),
            }
        }
    }
    for n in 2..=10 {
        for m in 2..=12 - n {
            let a = cat_state(&CatLabel::ghz((0..n).collect())?)?;
            let b = cat_state(&CatLabel::ghz((0..m).collect())?)?;
            let s = a.tensor(&b)?;
            let rest: Vec<usize> = (0..n + m).filter(|&q| q != n).collect();
            for bit in [false, true] {
                let p = zeilinger_branch(&s, n - 1, n, bit)?;
                let ok = (p.probability - 0.5).abs() <= PIPELINE_TOL
                    && match &p.residual {
                        Some(r) => identify_cat(r, &rest, PIPELINE_TOL)?.is_some(),
                        None => false,
                    };
                if !ok {
                    failures.push(format!("merge {n} + {m}, readout {bit}"));
                }
            }
        }
    }
    // Two Bell pairs, CNOT from the second qubit into the third, read the third.
    let start = kets(&["0000", "0011", "1100", "1111"])?;
    let after = start.apply_gate(Gate::Cnot { control: 1, target: 2 })?;
    if after.max_deviation(&kets(&["0000", "0011", "1110", "1101"])?) > ALGEBRA_TOL {
        failures.push("state after the CNOT differs".into());
    }
    for (bit, want) in [(false, ["000", "111"]), (true, ["001", "110"])] {
        let p = after.collapse(2, bit)?;
        let ok = (p.probability - 0.5).abs() <= ALGEBRA_TOL
            && p.residual.as_ref().is_some_and(|r| r.max_deviation(&kets(&want).unwrap()) <= ALGEBRA_TOL);
        if !ok {
            failures.push(format!("readout {} branch differs", bit as u8));
        }
    }
    Ok(summary(
        failures,
        "generator/analyzer bijective for n <= 8; merges give (N+M-1)-cats; two-Bell CNOT trace reproduced".into(),
    ))
}

fn grow() -> Outcome {
    let report = grow_chain(2, 11)?;
    let branches = report.values.get("branches").cloned().unwrap_or_default();
    Ok((
        report.passed(),
        format!("2 -> 11 qubits, {} steps, {branches} branches checked", report.checks.len()),
    ))
}

fn timing() -> Outcome {
    let mut failures = Vec::new();
    for (l, v) in [(4.0, 1.0), (8.0, 0.5), (1.0, 0.25), (10.0, 3.0)] {
        let m = LinkModel::new(l, v, 2.0 * v, l / (4.0 * v))?;
        let r = relay_time(&m, false);
        if r.bare != direct_time(&m) || r.advantageous {
            failures.push(format!("boundary L = {l}, v = {v}: t2 = {}, t1 = {}", r.bare, direct_time(&m)));
        }
    }
    for l in [0.5, 1.0, 4.0, 100.0] {
        for t_m in [0.0, 1e-9, 0.1, 1.0, 10.0] {
            let m = LinkModel::new(l, 1.0, 1.0, t_m)?;
            let r = relay_time(&m, true);
            if r.wins || r.total < direct_time(&m) {
                failures.push(format!("v = c, L = {l}, t_m = {t_m}: relay wins"));
            }
            for levels in 1..=6 {
                if hierarchical_time(&m, levels, true)? < direct_time(&m) {
                    failures.push(format!("v = c, L = {l}, t_m = {t_m}, {levels} levels: relay wins"));
                }
            }
        }
    }
    Ok(summary(failures, "t2 = t1 at t_m = L/4v; with v = c and classical time the relay never wins".into()))
}

fn conferencing() -> Outcome {
    let honest = conference_key(3, 10_000, BasisMode::Single, 10, Eavesdropper::None)?;
    let dual = conference_key(3, 10_000, BasisMode::Dual, 11, Eavesdropper::None)?;
    let attacked = conference_key(3, 10_000, BasisMode::Single, 12, Eavesdropper::InterceptResend { channel: 1 })?;
    let value = |r: &crate::report::ProtocolReport, k: &str| -> f64 {
        r.values.get(k).and_then(|v| v.as_str()).and_then(|s| s.parse().ok()).unwrap_or(f64::NAN)
    };
    let xxx_honest = value(&honest.report, "xxx_expectation");
    let sift = value(&dual.report, "sift_rate");
    let xxx_attack = value(&attacked.report, "xxx_expectation");
    let errors = value(&attacked.report, "error_rate");
    let ok = honest.report.passed()
        && dual.report.passed()
        && (xxx_honest - 1.0).abs() <= ALGEBRA_TOL
        && (sift - 0.5).abs() <= 0.02
        && xxx_attack.abs() <= 0.05
        && errors > 0.0
        && attacked.report.passed();
    Ok((
        ok,
        format!(
            "no attack: XXX = {xxx_honest}, product always +1; dual sift rate {sift:.4}; attack: XXX = {xxx_attack:.4}, key error rate {errors:.4}"
        ),
    ))
}

fn determinism() -> Outcome {
    let mut failures = Vec::new();
    for (name, text) in BUNDLED {
        let config = ScenarioConfig::from_toml(text)?;
        let a = emit_report(&run_scenario(&config)?, Format::Json);
        let b = emit_report(&run_scenario(&config)?, Format::Json);
        if a != b {
            failures.push(format!("{name} differs between runs"));
        }
    }
    Ok(summary(failures, format!("{} bundled scenarios byte-identical across runs", BUNDLED.len())))
}
