//! Entanglement distribution through a central exchange.
//!
//! Every user shares a Bell pair with the exchange. Projecting the exchange
//! halves of a chosen subset of pairs onto the cat basis leaves those users'
//! qubits in a cat state; the other pairs are not touched.

use std::collections::HashSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::catalg::{cat_basis_on, cat_state_any, identify_cat, product_state, swap_predict, CatLabel, Pattern, SwapScenario};
use crate::error::{Error, Result};
use crate::protocols::Mode;
use crate::qstate::{Sign, MAX_QUBITS, PIPELINE_TOL};
use crate::report::{sig12, Check, OutcomeRecord, ProtocolReport};

fn phi_plus_pattern() -> Pattern {
    Pattern(vec![false, false])
}

fn plus() -> Sign {
    Sign::Plus
}

/// One user's Bell pair with the exchange.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserLink {
    pub user: String,
    pub user_qubit: usize,
    pub exchange_qubit: usize,
    #[serde(default = "phi_plus_pattern")]
    pub pattern: Pattern,
    #[serde(default = "plus")]
    pub sign: Sign,
}

impl UserLink {
    /// The pair's cat label on `[user_qubit, exchange_qubit]`.
    pub fn label(&self) -> Result<CatLabel> {
        CatLabel::new(vec![self.user_qubit, self.exchange_qubit], self.pattern.0.clone(), self.sign)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkTopology {
    #[serde(default = "default_exchange")]
    pub exchange: String,
    pub links: Vec<UserLink>,
}

fn default_exchange() -> String {
    "O".into()
}

impl NetworkTopology {
    /// Users share Φ+ pairs; user `i` holds qubit `2i`, the exchange `2i + 1`.
    pub fn star(users: &[&str]) -> Self {
        NetworkTopology {
            exchange: default_exchange(),
            links: users
                .iter()
                .enumerate()
                .map(|(i, u)| UserLink {
                    user: u.to_string(),
                    user_qubit: 2 * i,
                    exchange_qubit: 2 * i + 1,
                    pattern: phi_plus_pattern(),
                    sign: Sign::Plus,
                })
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if 2 * self.links.len() > MAX_QUBITS {
            return Err(Error::TooManyQubits {
                requested: 2 * self.links.len(),
                max: MAX_QUBITS,
            });
        }
        let mut names = HashSet::new();
        let mut qubits = HashSet::new();
        for link in &self.links {
            if !names.insert(&link.user) {
                return Err(Error::InvalidScenario(format!("user {} has more than one pair", link.user)));
            }
            for q in [link.user_qubit, link.exchange_qubit] {
                if !qubits.insert(q) {
                    return Err(Error::InvalidScenario(format!("qubit {q} is used twice")));
                }
            }
            if link.pattern.len() != 2 {
                return Err(Error::InvalidScenario(format!("pair of {} needs a 2-bit pattern", link.user)));
            }
        }
        Ok(())
    }

    fn link_index(&self, user: &str) -> Result<usize> {
        self.links
            .iter()
            .position(|l| l.user == user)
            .ok_or_else(|| Error::InvalidScenario(format!("unknown user {user}")))
    }

    /// Link indices of `subset`, in topology order.
    fn subset_links(&self, subset: &[String]) -> Result<Vec<usize>> {
        let mut idx = subset.iter().map(|u| self.link_index(u)).collect::<Result<Vec<_>>>()?;
        idx.sort_unstable();
        let before = idx.len();
        idx.dedup();
        if idx.len() != before {
            return Err(Error::InvalidScenario("subset lists a user twice".into()));
        }
        if idx.len() < 2 {
            return Err(Error::InvalidScenario(format!("subset needs at least 2 users, got {}", idx.len())));
        }
        Ok(idx)
    }
}

/// Result of one exchange measurement outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct ExchangeOutcome {
    pub outcome: CatLabel,
    pub probability: f64,
    /// Cat label of the subset users' qubits, identified from the state.
    pub users: Option<CatLabel>,
    /// Label the swapping law predicts for the users.
    pub predicted: Option<CatLabel>,
    /// Smallest fidelity of an uninvolved pair with its original label.
    pub untouched_fidelity: f64,
    /// Single-qubit entropy of each subset user.
    pub user_entropies: Vec<f64>,
}

/// Analyzes every cat-basis outcome of the exchange measurement on `subset`.
pub fn exchange_outcomes(topology: &NetworkTopology, subset: &[String]) -> Result<Vec<ExchangeOutcome>> {
    topology.validate()?;
    let chosen = topology.subset_links(subset)?;
    let labels = topology.links.iter().map(|l| l.label()).collect::<Result<Vec<_>>>()?;
    let (state, layout) = product_state(&labels.iter().collect::<Vec<_>>())?;
    let position = |q: usize| layout.iter().position(|&x| x == q).unwrap();

    let measured_ids: Vec<usize> = chosen.iter().map(|&i| topology.links[i].exchange_qubit).collect();
    let measured_pos: Vec<usize> = measured_ids.iter().map(|&q| position(q)).collect();
    let user_ids: Vec<usize> = chosen.iter().map(|&i| topology.links[i].user_qubit).collect();
    let untouched: Vec<usize> = (0..topology.links.len()).filter(|i| !chosen.contains(i)).collect();
    let scenario = SwapScenario::new(
        chosen.iter().map(|&i| labels[i].clone()).collect(),
        chosen.iter().map(|&i| vec![topology.links[i].exchange_qubit]).collect(),
    )?;

    let mut out = Vec::new();
    for outcome in cat_basis_on(&measured_ids) {
        let projection = state.project_subset(&measured_pos, &cat_state_any(&outcome)?)?;
        let predicted = swap_predict(&scenario, &outcome)?.map(|p| p.residual);
        let Some(mut residual) = projection.residual else {
            out.push(ExchangeOutcome {
                outcome,
                probability: 0.0,
                users: None,
                predicted,
                untouched_fidelity: f64::NAN,
                user_entropies: Vec::new(),
            });
            continue;
        };
        let mut ids: Vec<usize> = layout.iter().copied().filter(|q| !measured_ids.contains(q)).collect();

        // peel off every uninvolved pair, recording how well it survived
        let mut untouched_fidelity: f64 = 1.0;
        for &j in &untouched {
            let link = &topology.links[j];
            let sub = [link.user_qubit, link.exchange_qubit].map(|q| ids.iter().position(|&x| x == q).unwrap());
            let p = residual.project_subset(&sub, &cat_state_any(&labels[j])?)?;
            untouched_fidelity = untouched_fidelity.min(p.probability);
            residual = p
                .residual
                .ok_or_else(|| Error::InvalidScenario(format!("pair of {} was destroyed", link.user)))?;
            ids.retain(|q| *q != link.user_qubit && *q != link.exchange_qubit);
        }
        debug_assert_eq!(ids, user_ids);

        let users = identify_cat(&residual, &user_ids, PIPELINE_TOL)?.map(|i| i.label);
        let user_entropies = (0..user_ids.len())
            .map(|k| residual.subsystem_entropy(&[k]))
            .collect::<Result<Vec<_>>>()?;
        out.push(ExchangeOutcome {
            outcome,
            probability: projection.probability,
            users,
            predicted,
            untouched_fidelity,
            user_entropies,
        });
    }
    Ok(out)
}

/// Runs the exchange measurement for `subset` and checks every outcome.
pub fn exchange_entangle<R: Rng + ?Sized>(
    topology: &NetworkTopology,
    subset: &[String],
    mode: Mode,
    rng: &mut R,
) -> Result<ProtocolReport> {
    mode.validate()?;
    let outcomes = exchange_outcomes(topology, subset)?;
    let k = topology.subset_links(subset)?.len();
    let uniform = 0.5f64.powi(k as i32);

    let mut report = ProtocolReport::new("exchange", mode.to_string());
    report.value("exchange", topology.exchange.clone());
    let members: Vec<&str> = topology.subset_links(subset)?.into_iter().map(|i| topology.links[i].user.as_str()).collect();
    report.value("subset", members);

    let supported: Vec<&ExchangeOutcome> = outcomes.iter().filter(|o| o.probability > 0.0).collect();
    let shown: Vec<(&ExchangeOutcome, Option<usize>)> = match mode {
        Mode::Exhaustive => supported.iter().map(|o| (*o, None)).collect(),
        Mode::Sampled { trials } => {
            let mut counts = vec![0usize; supported.len()];
            for _ in 0..trials {
                let mut r = rng.gen::<f64>();
                let mut pick = supported.len() - 1;
                for (i, o) in supported.iter().enumerate() {
                    r -= o.probability;
                    if r < 0.0 {
                        pick = i;
                        break;
                    }
                }
                counts[pick] += 1;
            }
            supported
                .iter()
                .zip(counts)
                .filter(|(_, c)| *c > 0)
                .map(|(o, c)| (*o, Some(c)))
                .collect()
        }
    };
    for (o, count) in &shown {
        let mut rec = OutcomeRecord::new(Some(o.outcome.clone()), o.probability, o.users.clone())
            .detail("untouched_fidelity", sig12(o.untouched_fidelity));
        rec.count = *count;
        report.outcomes.push(rec);
    }

    let total: f64 = outcomes.iter().map(|o| o.probability).sum();
    report.check(Check::close("outcome probabilities sum to 1", 1.0, total, PIPELINE_TOL));
    let worst_uniform = supported.iter().map(|o| (o.probability - uniform).abs()).fold(0.0, f64::max);
    report.check(Check::close(
        format!("{} equiprobable outcomes", 1 << k),
        0.0,
        worst_uniform,
        PIPELINE_TOL,
    ));
    report.check(Check::new(
        "supported outcome count",
        (1usize << k).to_string(),
        supported.len().to_string(),
        supported.len() == 1 << k,
    ));
    let cats = supported.iter().filter(|o| o.users.is_some()).count();
    report.check(Check::new(
        "subset users share a cat for every outcome",
        supported.len().to_string(),
        cats.to_string(),
        cats == supported.len(),
    ));
    let agree = supported.iter().filter(|o| o.users.is_some() && o.users == o.predicted).count();
    report.check(Check::new(
        "users' cat matches the swapping law",
        supported.len().to_string(),
        agree.to_string(),
        agree == supported.len(),
    ));
    if k < topology.links.len() {
        let worst = supported.iter().map(|o| o.untouched_fidelity).fold(1.0, f64::min);
        report.check(Check::close("untouched pairs keep fidelity 1", 1.0, worst, PIPELINE_TOL));
    }
    let worst_entropy = supported
        .iter()
        .flat_map(|o| o.user_entropies.iter())
        .map(|e| (e - 1.0).abs())
        .fold(0.0, f64::max);
    report.check(Check::close("subset user entropies are 1 bit", 0.0, worst_entropy, 1e-9));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn users(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn three_of_four_users_get_a_ghz() {
        let topo = NetworkTopology::star(&["A", "B", "C", "D"]);
        let outs = exchange_outcomes(&topo, &users(&["A", "B", "C"])).unwrap();
        assert_eq!(outs.len(), 8);
        for o in &outs {
            assert!((o.probability - 0.125).abs() < PIPELINE_TOL);
            let cat = o.users.as_ref().unwrap();
            assert_eq!(cat.qubits(), &[0, 2, 4]);
            assert_eq!(o.users, o.predicted);
            assert!((o.untouched_fidelity - 1.0).abs() < PIPELINE_TOL);
        }
    }

    #[test]
    fn two_users_is_plain_swapping() {
        let topo = NetworkTopology::star(&["A", "B", "C", "D"]);
        let mut rng = crate::rng::substream(0, 0);
        let report = exchange_entangle(&topo, &users(&["B", "A"]), Mode::Exhaustive, &mut rng).unwrap();
        assert!(report.passed(), "{:#?}", report.failed_checks().collect::<Vec<_>>());
        assert_eq!(report.outcomes.len(), 4);
        for o in &report.outcomes {
            assert_eq!(o.residual.as_ref().unwrap().len(), 2);
        }
    }

    #[test]
    fn all_four_users() {
        let topo = NetworkTopology::star(&["A", "B", "C", "D"]);
        let outs = exchange_outcomes(&topo, &users(&["A", "B", "C", "D"])).unwrap();
        assert_eq!(outs.len(), 16);
        assert!(outs.iter().all(|o| (o.probability - 1.0 / 16.0).abs() < PIPELINE_TOL && o.users.is_some()));
    }

    #[test]
    fn non_default_pair_labels() {
        let mut topo = NetworkTopology::star(&["A", "B", "C"]);
        topo.links[1].pattern = Pattern(vec![false, true]);
        topo.links[2].sign = Sign::Minus;
        let mut rng = crate::rng::substream(0, 0);
        let report = exchange_entangle(&topo, &users(&["A", "B", "C"]), Mode::Exhaustive, &mut rng).unwrap();
        assert!(report.passed());
    }

    #[test]
    fn sampled_mode_counts_trials() {
        let topo = NetworkTopology::star(&["A", "B", "C"]);
        let mut rng = crate::rng::substream(9, 0);
        let report = exchange_entangle(&topo, &users(&["A", "C"]), Mode::Sampled { trials: 500 }, &mut rng).unwrap();
        let total: usize = report.outcomes.iter().map(|o| o.count.unwrap()).sum();
        assert_eq!(total, 500);
        assert!(report.passed());
    }

    #[test]
    fn subset_errors() {
        let topo = NetworkTopology::star(&["A", "B"]);
        assert!(exchange_outcomes(&topo, &users(&["A"])).is_err());
        assert!(exchange_outcomes(&topo, &users(&["A", "Z"])).is_err());
        assert!(exchange_outcomes(&topo, &users(&["A", "A"])).is_err());
        let mut bad = NetworkTopology::star(&["A", "B"]);
        bad.links[1].user_qubit = 0;
        assert!(bad.validate().is_err());
    }
}
