use catswap::acceptance::{random_scenario, swap_law_holds};
use catswap::catalg::{cat_basis_on, cat_state, identify_cat, swap_predict, swap_simulate, CatLabel};
use catswap::circuits::{bits_for_label, cat_analyzer_circuit, cat_generator_circuit, label_for_bits};
use catswap::qstate::{Gate, Sign, StateVector};
use catswap::rng::substream;
use num_complex::Complex64;
use proptest::prelude::*;

fn state(n: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n)
        .prop_filter("nonzero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
        .prop_map(|v| StateVector::from_unnormalized(v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap())
}

fn gate(n: usize) -> impl Strategy<Value = Gate> {
    (0..4u8, 0..n, 0..n).prop_filter_map("distinct qubits", move |(k, a, b)| match k {
        0 => Some(Gate::H(a)),
        1 => Some(Gate::X(a)),
        2 => Some(Gate::Z(a)),
        _ if a != b => Some(Gate::Cnot { control: a, target: b }),
        _ => None,
    })
}

fn label(n: usize) -> impl Strategy<Value = CatLabel> {
    (prop::collection::vec(any::<bool>(), n), any::<bool>())
        .prop_map(move |(p, s)| CatLabel::new((0..n).collect(), p, Sign::from_bit(s)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gates_preserve_norm(s in state(4), gates in prop::collection::vec(gate(4), 0..12)) {
        let mut t = s.clone();
        for g in gates {
            t = t.apply_gate(g).unwrap();
        }
        prop_assert!((t.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gates_are_involutions(s in state(3), g in gate(3)) {
        let back = s.apply_gate(g).unwrap().apply_gate(g).unwrap();
        prop_assert!(back.max_deviation(&s) < 1e-12);
    }

    #[test]
    fn cat_basis_projections_are_complete(s in state(4), first in 0usize..3) {
        let subset = [first, first + 1];
        let total: f64 = cat_basis_on(&subset)
            .iter()
            .map(|l| {
                let local = l.relabel(vec![0, 1]).unwrap();
                s.project_subset(&subset, &cat_state(&local).unwrap()).unwrap().probability
            })
            .sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn entropy_is_symmetric_across_the_cut(s in state(4), mask in 1u32..15) {
        let a: Vec<usize> = (0..4).filter(|q| mask >> q & 1 == 1).collect();
        let b: Vec<usize> = (0..4).filter(|q| mask >> q & 1 == 0).collect();
        let (ea, eb) = (s.subsystem_entropy(&a).unwrap(), s.subsystem_entropy(&b).unwrap());
        prop_assert!((ea - eb).abs() < 1e-9);
        prop_assert!(ea >= 0.0 && ea <= a.len().min(b.len()) as f64 + 1e-9);
    }

    #[test]
    fn cat_states_are_identified(l in label(5)) {
        let s = cat_state(&l).unwrap();
        let id = identify_cat(&s, l.qubits(), 1e-10).unwrap().unwrap();
        prop_assert_eq!(id.label, l);
    }

    #[test]
    fn generator_matches_bijection(l in label(6)) {
        let bits = bits_for_label(&l);
        prop_assert_eq!(label_for_bits(l.qubits(), &bits).unwrap(), l.clone());
        let index = bits.iter().enumerate().fold(0, |acc, (k, &b)| acc | (b as usize) << k);
        let out = cat_generator_circuit(6).unwrap().apply(&StateVector::basis(6, index).unwrap()).unwrap();
        prop_assert!(out.fidelity(&cat_state(&l).unwrap()).unwrap() > 1.0 - 1e-12);
        let back = cat_analyzer_circuit(6).unwrap().apply(&out).unwrap();
        prop_assert!((back.probability(index) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tensor_then_permute_round_trips(a in state(2), b in state(2)) {
        let ab = a.tensor(&b).unwrap();
        let ba = b.tensor(&a).unwrap();
        prop_assert!(ab.permute(&[2, 3, 0, 1]).unwrap().max_deviation(&ba) < 1e-12);
    }

    #[test]
    fn random_scenarios_obey_the_swap_law(seed in any::<u64>()) {
        let mut rng = substream(seed, 0);
        let scenario = random_scenario(&mut rng, 10);
        let dist = swap_simulate(&scenario).unwrap();
        prop_assert_eq!(swap_law_holds(&scenario, &dist), Ok(()));
        // the prediction never allows an outcome the simulation rules out
        for e in &dist.entries {
            let p = swap_predict(&scenario, &e.outcome).unwrap();
            prop_assert_eq!(p.is_some(), e.probability > 1e-10);
        }
    }
}
