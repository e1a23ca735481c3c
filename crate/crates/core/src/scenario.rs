//! Declarative scenario files (TOML) and the dispatcher that runs them.
//!
//! ```toml
//! name = "bell-swap"
//! seed = 1
//!
//! [scenario]
//! kind = "swap"
//! cats = [
//!     { qubits = [0, 1], pattern = "00", sign = "+" },
//!     { qubits = [2, 3], pattern = "00", sign = "+" },
//! ]
//! measured = [[1], [2]]
//! ```
//!
//! `mode` defaults to exhaustive; `mode = { kind = "sampled", trials = 1000 }`
//! draws outcomes instead.

use std::collections::HashSet;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::catalg::{SwapScenario, MAX_BASIS_QUBITS};
use crate::error::{Error, Result};
use crate::protocols::{
    amplitude_swap_correct, conference_key, exchange_entangle, ghz_from_three_bells, grow_cat, grow_chain,
    information_rates, superdense_exhaustive, superdense_roundtrip, swap_report, BasisMode, Eavesdropper, Mode,
    NetworkTopology, SuperdenseAssignment,
};
use crate::qstate::MAX_QUBITS;
use crate::report::{Check, ProtocolReport};
use crate::rng::substream;
use crate::timing::{self, SweepGrid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "exhaustive")]
    pub mode: Mode,
    pub scenario: Scenario,
}

fn exhaustive() -> Mode {
    Mode::Exhaustive
}

/// Top-level fields other than `scenario`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    name: String,
    #[serde(default)]
    seed: u64,
    #[serde(default = "exhaustive")]
    mode: Mode,
}

fn at_path<T: serde::de::DeserializeOwned>(prefix: &str, value: toml::Value) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let path = match (prefix, path.as_str()) {
            ("", p) => p.to_string(),
            (pre, ".") => pre.trim_end_matches('.').to_string(),
            (pre, p) => format!("{pre}{p}"),
        };
        Error::config(path, e.into_inner().message().trim().to_string())
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Scenario {
    Swap(SwapScenario),
    Exchange(ExchangeParams),
    Grow(GrowParams),
    Superdense(SuperdenseParams),
    Amplitude(AmplitudeParams),
    Conference(ConferenceParams),
    TimingSweep(SweepGrid),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExchangeParams {
    /// Shorthand for a star of Φ+ pairs; ignored when `topology` is given.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub users: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topology: Option<NetworkTopology>,
    pub subset: Vec<String>,
}

impl ExchangeParams {
    pub fn topology(&self) -> NetworkTopology {
        match &self.topology {
            Some(t) => t.clone(),
            None => NetworkTopology::star(&self.users.iter().map(String::as_str).collect::<Vec<_>>()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowParams {
    pub n: usize,
    /// Build the 3-GHZ from three Bell pairs instead (requires `n = 2`).
    #[serde(default)]
    pub three_bells: bool,
    /// Follow every branch up to this many qubits.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain_to: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuperdenseParams {
    pub n: usize,
    /// `N + 1` bits such as `"0110"`; all messages when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assignment: Option<SuperdenseAssignment>,
    #[serde(default = "unit_time")]
    pub t_h: f64,
    #[serde(default = "unit_time")]
    pub t_c: f64,
}

fn unit_time() -> f64 {
    1.0
}

impl SuperdenseParams {
    pub fn assignment(&self) -> SuperdenseAssignment {
        self.assignment.clone().unwrap_or_else(|| SuperdenseAssignment::standard(self.n))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplitudeParams {
    /// Radians, strictly between 0 and π/2.
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConferenceParams {
    pub users: usize,
    pub rounds: usize,
    pub basis: BasisMode,
    #[serde(default = "no_eavesdropper")]
    pub eavesdropper: Eavesdropper,
}

fn no_eavesdropper() -> Eavesdropper {
    Eavesdropper::None
}

impl ScenarioConfig {
    /// Parses TOML; errors carry the path of the offending field.
    pub fn from_toml(text: &str) -> Result<Self> {
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::config(".", e.message()))?;
        let mut params = match table.remove("scenario") {
            Some(toml::Value::Table(t)) => t,
            Some(_) => return Err(Error::config("scenario", "expected a table")),
            None => return Err(Error::config(".", "missing field `scenario`")),
        };
        let kind = match params.remove("kind") {
            Some(toml::Value::String(k)) => k,
            Some(_) => return Err(Error::config("scenario.kind", "expected a string")),
            None => return Err(Error::config("scenario", "missing field `kind`")),
        };
        let header: Header = at_path("", toml::Value::Table(table))?;
        let params = toml::Value::Table(params);
        let scenario = match kind.as_str() {
            "swap" => Scenario::Swap(at_path("scenario.", params)?),
            "exchange" => Scenario::Exchange(at_path("scenario.", params)?),
            "grow" => Scenario::Grow(at_path("scenario.", params)?),
            "superdense" => Scenario::Superdense(at_path("scenario.", params)?),
            "amplitude" => Scenario::Amplitude(at_path("scenario.", params)?),
            "conference" => Scenario::Conference(at_path("scenario.", params)?),
            "timing-sweep" => Scenario::TimingSweep(at_path("scenario.", params)?),
            other => {
                return Err(Error::config(
                    "scenario.kind",
                    format!(
                        "unknown kind `{other}`, expected one of swap, exchange, grow, superdense, amplitude, conference, timing-sweep"
                    ),
                ))
            }
        };
        let config = ScenarioConfig {
            name: header.name,
            seed: header.seed,
            mode: header.mode,
            scenario,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config(".", e.to_string()))
    }

    /// Checks every parameter against the protocol's preconditions without
    /// building any state.
    pub fn validate(&self) -> Result<()> {
        self.mode.validate().map_err(|e| Error::config("mode", e.to_string()))?;
        let at = |field: &str| {
            let field = format!("scenario.{field}");
            move |e: Error| Error::config(field.clone(), e.to_string())
        };
        match &self.scenario {
            Scenario::Swap(s) => {
                let total: usize = s.cats.iter().map(|c| c.len()).sum();
                if total > MAX_QUBITS {
                    return Err(Error::config(
                        "scenario.cats",
                        format!("{total} qubits requested, at most {MAX_QUBITS} supported"),
                    ));
                }
                s.validate().map_err(at("cats"))?;
                let measured = s.measured_qubits().len();
                if measured > MAX_BASIS_QUBITS {
                    return Err(Error::config(
                        "scenario.measured",
                        format!("{measured} measured qubits, at most {MAX_BASIS_QUBITS} supported"),
                    ));
                }
                let simulated = s.simulated_qubits().len();
                if simulated > MAX_QUBITS {
                    return Err(Error::config(
                        "scenario.cats",
                        format!("measured cats span {simulated} qubits, at most {MAX_QUBITS} supported"),
                    ));
                }
            }
            Scenario::Exchange(p) => {
                if p.topology.is_none() && p.users.is_empty() {
                    return Err(Error::config("scenario.users", "give either users or topology"));
                }
                let topo = p.topology();
                topo.validate().map_err(at("topology"))?;
                let known: HashSet<&str> = topo.links.iter().map(|l| l.user.as_str()).collect();
                let mut seen = HashSet::new();
                for u in &p.subset {
                    if !known.contains(u.as_str()) {
                        return Err(Error::config("scenario.subset", format!("unknown user {u}")));
                    }
                    if !seen.insert(u) {
                        return Err(Error::config("scenario.subset", format!("user {u} listed twice")));
                    }
                }
                if seen.len() < 2 {
                    return Err(Error::config("scenario.subset", "at least 2 users are needed"));
                }
                if seen.len() > MAX_BASIS_QUBITS {
                    return Err(Error::config(
                        "scenario.subset",
                        format!("at most {MAX_BASIS_QUBITS} users can be measured together"),
                    ));
                }
            }
            Scenario::Grow(p) => {
                use crate::protocols::{MAX_GROW, MIN_GROW};
                if !(MIN_GROW..=MAX_GROW).contains(&p.n) {
                    return Err(Error::config("scenario.n", format!("must lie in {MIN_GROW}..={MAX_GROW}, got {}", p.n)));
                }
                if p.three_bells && p.n != 2 {
                    return Err(Error::config("scenario.three_bells", "only builds a 3-GHZ, so n must be 2"));
                }
                if let Some(to) = p.chain_to {
                    if !(p.n..=MAX_GROW + 1).contains(&to) {
                        return Err(Error::config(
                            "scenario.chain_to",
                            format!("must lie in {}..={}, got {to}", p.n, MAX_GROW + 1),
                        ));
                    }
                }
            }
            Scenario::Superdense(p) => {
                let a = p.assignment();
                a.validate().map_err(at("assignment"))?;
                if a.num_senders() != p.n {
                    return Err(Error::config(
                        "scenario.assignment",
                        format!("{} senders listed but n = {}", a.num_senders(), p.n),
                    ));
                }
                if let Some(m) = &p.message {
                    parse_bits(m, p.n + 1).map_err(at("message"))?;
                }
                information_rates(p.n, p.t_h, p.t_c).map_err(at("t_h"))?;
            }
            Scenario::Amplitude(p) => {
                if !(p.theta > 0.0 && p.theta < std::f64::consts::FRAC_PI_2) {
                    return Err(Error::config("scenario.theta", format!("must lie in (0, pi/2), got {}", p.theta)));
                }
            }
            Scenario::Conference(p) => {
                use crate::protocols::{MAX_ROUNDS, MAX_USERS, MIN_USERS};
                if !(MIN_USERS..=MAX_USERS).contains(&p.users) {
                    return Err(Error::config(
                        "scenario.users",
                        format!("must lie in {MIN_USERS}..={MAX_USERS}, got {}", p.users),
                    ));
                }
                if !(1..=MAX_ROUNDS).contains(&p.rounds) {
                    return Err(Error::config("scenario.rounds", format!("must lie in 1..={MAX_ROUNDS}, got {}", p.rounds)));
                }
                if let Eavesdropper::InterceptResend { channel } = p.eavesdropper {
                    if channel >= p.users {
                        return Err(Error::config(
                            "scenario.eavesdropper.channel",
                            format!("user {channel} does not exist"),
                        ));
                    }
                }
            }
            Scenario::TimingSweep(g) => {
                for (field, empty) in [
                    ("length", g.length.is_empty()),
                    ("speed", g.speed.is_empty()),
                    ("measurement_time", g.measurement_time.is_empty()),
                    ("levels", g.levels.is_empty()),
                ] {
                    if empty {
                        return Err(Error::config(format!("scenario.{field}"), "needs at least one value"));
                    }
                }
                for &l in &g.length {
                    for &v in &g.speed {
                        for &t in &g.measurement_time {
                            timing::LinkModel::new(l, v, g.classical_speed, t).map_err(at("length"))?;
                        }
                    }
                }
                for &levels in &g.levels {
                    if !(1..=timing::MAX_LEVELS).contains(&levels) {
                        return Err(Error::config(
                            "scenario.levels",
                            format!("must lie in 1..={}, got {levels}", timing::MAX_LEVELS),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// `"0110"` into bits, first character first.
pub fn parse_bits(text: &str, len: usize) -> Result<Vec<bool>> {
    let bits = text
        .chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Error::InvalidBits(text.to_string())),
        })
        .collect::<Result<Vec<_>>>()?;
    if bits.len() != len {
        return Err(Error::LengthMismatch {
            expected: len,
            found: bits.len(),
        });
    }
    Ok(bits)
}

/// Runs a validated config. Identical configs give identical reports apart
/// from `wall_clock`, which is never serialized.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ProtocolReport> {
    config.validate()?;
    let start = Instant::now();
    let mode = config.mode;
    let mut rng = substream(config.seed, 0);
    let mut report = match &config.scenario {
        Scenario::Swap(s) => swap_report(s, mode, &mut rng)?,
        Scenario::Exchange(p) => exchange_entangle(&p.topology(), &p.subset, mode, &mut rng)?,
        Scenario::Grow(p) => match (p.three_bells, p.chain_to) {
            (_, Some(to)) => grow_chain(p.n, to)?,
            (true, None) => ghz_from_three_bells(mode, &mut rng)?,
            (false, None) => grow_cat(p.n, mode, &mut rng)?,
        },
        Scenario::Superdense(p) => {
            let assignment = p.assignment();
            let mut report = match &p.message {
                Some(m) => superdense_roundtrip(&parse_bits(m, p.n + 1)?, &assignment)?.1,
                None => superdense_exhaustive(&assignment)?,
            };
            let rates = information_rates(p.n, p.t_h, p.t_c)?;
            report.value("rates", serde_json::to_value(rates).expect("rates serialize"));
            if p.t_h == p.t_c {
                report.check(Check::close("r1 = r2 when t_h = t_c", rates.r2, rates.r1, 1e-12));
            }
            report
        }
        Scenario::Amplitude(p) => amplitude_swap_correct(p.theta, mode, &mut rng)?,
        Scenario::Conference(p) => {
            let out = conference_key(p.users, p.rounds, p.basis, config.seed, p.eavesdropper)?;
            let mut report = out.report;
            report.value(
                "key_prefix",
                out.keys
                    .iter()
                    .map(|k| k.iter().take(32).map(|&b| if b { '1' } else { '0' }).collect::<String>())
                    .collect::<Vec<_>>(),
            );
            report
        }
        Scenario::TimingSweep(g) => timing_report(g)?,
    };
    report.scenario = config.name.clone();
    report.seed = Some(config.seed);
    report.wall_clock = start.elapsed();
    Ok(report)
}

fn timing_report(grid: &SweepGrid) -> Result<ProtocolReport> {
    let rows = timing::sweep(grid)?;
    let mut report = ProtocolReport::new("timing-sweep", "exhaustive");
    report.value("rows", serde_json::to_value(&rows).expect("rows serialize"));
    let mut consistent = true;
    let mut level_one = true;
    for &l in &grid.length {
        for &v in &grid.speed {
            for &t in &grid.measurement_time {
                let m = timing::LinkModel::new(l, v, grid.classical_speed, t)?;
                let r = timing::relay_time(&m, grid.include_classical);
                consistent &= r.advantageous == (timing::direct_time(&m) > r.bare);
                level_one &= timing::hierarchical_time(&m, 1, grid.include_classical)?.to_bits() == r.total.to_bits();
            }
        }
    }
    report.check(Check::holds("advantage flag matches t1 > bare t2", consistent.to_string(), consistent));
    report.check(Check::holds("one level equals the single relay", level_one.to_string(), level_one));
    Ok(report)
}

/// Scenario files shipped with the crate, by file name.
pub const BUNDLED: &[(&str, &str)] = &[
    ("bell-swap.toml", include_str!("../scenarios/bell-swap.toml")),
    ("ghz-from-bells.toml", include_str!("../scenarios/ghz-from-bells.toml")),
    ("exchange.toml", include_str!("../scenarios/exchange.toml")),
    ("grow.toml", include_str!("../scenarios/grow.toml")),
    ("amplitude.toml", include_str!("../scenarios/amplitude.toml")),
    ("superdense.toml", include_str!("../scenarios/superdense.toml")),
    ("conference.toml", include_str!("../scenarios/conference.toml")),
    ("timing.toml", include_str!("../scenarios/timing.toml")),
];

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}
