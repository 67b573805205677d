use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use proptest::prelude::*;
use qreduce::detector::{build_joint_initial, decompose, DetectorInit, DetectorModel, Evolution};
use qreduce::epr::{joint_probabilities, pair_state, singlet_state};
use qreduce::qkd::{estimate_qber, run_session, sift, MeasurerAgent, NoiseModel};
use qreduce::qstate::{
    bloch_from_density, born_probabilities, density_from_bloch, observable_matrix,
    pauli_commutator, pre_analyzer_state, reduction_unitaries, BlochVector, PureKet,
};
use qreduce::strategy::{
    average_density, mean_observable, partition_by_observable, run_strategy, run_strategy_serial,
    PlanPair, Selector, StrategyPlan,
};

fn direction() -> impl Strategy<Value = BlochVector> {
    (0.0..PI, 0.0..2.0 * PI).prop_map(|(t, p)| BlochVector::from_angles(t, p))
}

fn ball() -> impl Strategy<Value = BlochVector> {
    (direction(), 0.0..=1.0f64).prop_map(|(d, r)| d.scale(r))
}

fn dot(a: &BlochVector, b: &BlochVector) -> f64 {
    a.x * b.x + a.y * b.y + a.z * b.z
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bloch_round_trip(n in ball()) {
        let rho = density_from_bloch(n).unwrap();
        let back = bloch_from_density(rho.matrix()).unwrap();
        prop_assert!(back.approx_eq(&n, 1e-12));
    }

    #[test]
    fn born_matches_trace_formula(n in ball(), m in direction()) {
        let rho = density_from_bloch(n).unwrap();
        let mm = observable_matrix(m).unwrap();
        let proj = (nalgebra::Matrix2::<C64>::identity() + mm.matrix()) * C64::from(0.5);
        let tr = (rho.matrix() * proj).trace().re;
        if (n.norm() - 1.0).abs() < 1e-9 {
            let (pv, ph) = born_probabilities(n, m).unwrap();
            prop_assert!((pv - tr).abs() < 1e-12);
            prop_assert!((pv + ph - 1.0).abs() < 1e-12);
        }
        prop_assert!((tr - 0.5 * (1.0 + dot(&n, &m))).abs() < 1e-12);
    }

    #[test]
    fn purity_formula(n in ball()) {
        let rho = density_from_bloch(n).unwrap();
        prop_assert!((rho.purity() - 0.5 * (1.0 + dot(&n, &n))).abs() < 1e-12);
    }

    #[test]
    fn observable_squares_to_identity(m in direction()) {
        let mm = observable_matrix(m).unwrap();
        let sq = mm.matrix() * mm.matrix();
        prop_assert!((sq - nalgebra::Matrix2::<C64>::identity()).norm() < 1e-12);
    }

    #[test]
    fn commutator_identity(m in direction(), n in direction()) {
        let c = m.cross(&n);
        prop_assume!(c.norm() > 1e-6);
        let lhs = pauli_commutator(m, n).unwrap();
        let axis = observable_matrix(c.scale(1.0 / c.norm())).unwrap();
        let rhs = axis.matrix() * C64::new(0.0, 2.0 * c.norm());
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn reduction_reaches_eigenstates(n in direction(), m in direction()) {
        let pair = reduction_unitaries(n, m).unwrap();
        let mes = pre_analyzer_state(n, m).unwrap();
        prop_assert!(mes.apply(&pair.u_v).unwrap().same_up_to_phase(&PureKet::vertical(), 1e-12));
        prop_assert!(mes.apply(&pair.u_h).unwrap().same_up_to_phase(&PureKet::horizontal(), 1e-12));
    }

    #[test]
    fn pre_analyzer_amplitudes(n in direction(), m in direction()) {
        let (a0, a1) = pre_analyzer_state(n, m).unwrap().amplitudes();
        let c = dot(&n, &m);
        prop_assert!((a1.norm_sqr() - 0.5 * (1.0 + c)).abs() < 1e-12);
        prop_assert!((a0.norm_sqr() - 0.5 * (1.0 - c)).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn decompose_reassemble_identity(
        n in direction(),
        dim in 2usize..6,
        omega in 0.0..2.0f64,
        g0 in 0.1..2.0f64,
        t in 0.0..10.0f64,
        mixed in any::<bool>(),
    ) {
        let init = if mixed { DetectorInit::MaximallyMixed } else { DetectorInit::Ground };
        let model = DetectorModel::ladder(dim, omega, g0, 0.5, 5.0, init).unwrap();
        let photon = pre_analyzer_state(n, BlochVector::Z).unwrap();
        let initial = build_joint_initial(&model, &photon).unwrap();
        let state = Evolution::new(&model).state_at(&initial, t).unwrap();
        let dec = decompose(&state);
        prop_assert!(dec.reassemble().max_abs_diff(&state) < 1e-9);
        // p1 is fixed by the photon preparation, |<1|mes>|^2.
        prop_assert!((dec.p1 - 0.5 * (1.0 + n.z)).abs() < 1e-9);
        prop_assert!((state.trace() - 1.0).norm() < 1e-9);
    }

    #[test]
    fn plan_mean_matches_average_density(
        states in prop::collection::vec(direction(), 1..12),
        m in direction(),
    ) {
        let plan = StrategyPlan::cycled_states(&states, m, states.len() * 3).unwrap();
        let rho = average_density(&plan, Selector::All).unwrap();
        let tr = rho.expectation(&observable_matrix(m).unwrap());
        prop_assert!((tr - mean_observable(&plan).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn partition_is_exhaustive_and_disjoint(
        pairs in prop::collection::vec((direction(), 0usize..3), 1..60),
        seed in any::<u64>(),
    ) {
        let dirs = [BlochVector::X, BlochVector::Y, BlochVector::Z];
        let plan = StrategyPlan::new(
            pairs.iter().map(|&(n, i)| PlanPair { n, m: dirs[i] }).collect(),
        ).unwrap();
        let out = run_strategy(&plan, seed);
        let stats = partition_by_observable(&plan, &out).unwrap();
        let mut seen: Vec<usize> = stats.groups.iter().flat_map(|g| g.indices.clone()).collect();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..plan.len()).collect::<Vec<_>>());
        for g in &stats.groups {
            for &k in &g.indices {
                prop_assert!(plan.pairs()[k].m.approx_eq(&g.direction, 1e-9));
            }
        }
    }

    #[test]
    fn parallel_run_is_bit_identical(n in direction(), m in direction(), seed in any::<u64>()) {
        let plan = StrategyPlan::repeated(n, m, 500).unwrap();
        prop_assert_eq!(run_strategy(&plan, seed), run_strategy_serial(&plan, seed));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn singlet_is_basis_independent(a in direction(), b in direction()) {
        let sa = singlet_state(a).unwrap();
        let sb = singlet_state(b).unwrap();
        prop_assert!((sa.inner(&sb).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn singlet_marginals_are_uniform(n in direction(), l in direction(), r in direction()) {
        let p = joint_probabilities(&singlet_state(n).unwrap(), l, r).unwrap();
        for d in [1, -1] {
            prop_assert!((p.left_marginal(d) - 0.5).abs() < 1e-12);
            prop_assert!((p.right_marginal(d) - 0.5).abs() < 1e-12);
        }
        prop_assert!((p.covariance() + dot(&l, &r)).abs() < 1e-12);
    }

    #[test]
    fn no_signaling_both_sides(
        theta in 0.0..PI,
        phi in 0.0..2.0 * PI,
        n in direction(),
        l1 in direction(),
        l2 in direction(),
        r1 in direction(),
        r2 in direction(),
    ) {
        let s = pair_state(theta, phi, n).unwrap();
        let a = joint_probabilities(&s, l1, r1).unwrap();
        let b = joint_probabilities(&s, l1, r2).unwrap();
        let c = joint_probabilities(&s, l2, r1).unwrap();
        prop_assert!((a.left_marginal(1) - b.left_marginal(1)).abs() < 1e-12);
        prop_assert!((a.right_marginal(1) - c.right_marginal(1)).abs() < 1e-12);
        prop_assert!((a.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn remote_reduction_consistency(n in direction(), l in direction(), r in direction()) {
        let p = joint_probabilities(&singlet_state(n).unwrap(), l, r).unwrap();
        let conditional = p.get(1, 1) / p.left_marginal(1);
        let (pv, _) = born_probabilities(-l, r).unwrap();
        prop_assert!((conditional - pv).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn sifting_and_disclosure(seed in any::<u64>(), rounds in 50usize..600, eps in 0.0..0.3f64) {
        let left = MeasurerAgent::left([BlochVector::Z, BlochVector::X], seed ^ 1).unwrap();
        let right = MeasurerAgent::right_of(&left, seed ^ 2);
        let (l, r) = run_session(rounds, &left, &right, &NoiseModel::new(eps).unwrap(), seed).unwrap();
        let (lk, rk) = sift(&l, &r).unwrap();
        for &round in &lk.rounds {
            prop_assert_eq!(l[round].choice, r[round].choice);
        }
        let matched = l.iter().zip(&r).filter(|(a, b)| a.choice == b.choice).count();
        prop_assert_eq!(lk.len(), matched);
        if eps == 0.0 {
            prop_assert_eq!(&lk, &rk);
        }
        prop_assume!(lk.len() >= 4);
        let (q, fl, fr) = estimate_qber(&lk, &rk, 0.25, seed).unwrap();
        prop_assert_eq!(fl.len() + q.sampled, lk.len());
        for round in &q.disclosed_rounds {
            prop_assert!(!fl.rounds.contains(round));
            prop_assert!(!fr.rounds.contains(round));
        }
    }
}

#[test]
fn noiseless_sessions_always_agree() {
    for seed in 0..50u64 {
        for rounds in [1usize, 7, 100, 1001] {
            let left = MeasurerAgent::left([BlochVector::Z, BlochVector::X], seed).unwrap();
            let right = MeasurerAgent::right_of(&left, seed + 1000);
            let (l, r) =
                run_session(rounds, &left, &right, &NoiseModel::noiseless(), seed).unwrap();
            let (lk, rk) = sift(&l, &r).unwrap();
            assert_eq!(lk, rk, "seed {seed}, rounds {rounds}");
        }
    }
}
