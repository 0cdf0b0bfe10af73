use proptest::prelude::*;
use stringbreak::dynamics::{
    bubble_histogram, expmv, landau_zener_probability, propagate_ramp, KrylovWorkspace, ObservableSet,
    PropagatorConfig, RampSchedule,
};
use stringbreak::linalg::{cnorm, dense_lowest, lanczos_lowest, LanczosOptions};
use stringbreak::statics::{
    bubble_crossing_fields, enumerate_sector_minimum, g0_breaking_field, g0_energy_gap, ScanAxis,
};
use stringbreak::{effective_field, vacuum_field, ChainSpec, CouplingKernel, IsingHamiltonian, StateVector, C64};

fn exp_chain(ell: usize, xi: f64) -> ChainSpec {
    ChainSpec::static_chain(ell, CouplingKernel::exponential(xi).unwrap()).unwrap()
}

fn kernel() -> impl Strategy<Value = CouplingKernel> {
    prop_oneof![
        (0.3f64..3.0).prop_map(|xi| CouplingKernel::exponential(xi).unwrap()),
        (1.2f64..6.0).prop_map(|a| CouplingKernel::power_law(a).unwrap()),
    ]
}

fn random_state(n: usize, seed: &[f64]) -> StateVector {
    let amps: Vec<C64> = (0..1usize << n)
        .map(|i| {
            let a = seed[i % seed.len()] + 0.1 * i as f64;
            C64::new(a.sin(), (1.7 * a).cos())
        })
        .collect();
    let mut s = StateVector::new(n, amps).unwrap();
    s.normalize();
    s
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn hamiltonian_is_symmetric(ell in 1usize..7, k in kernel(), h in -1.0f64..1.0, g in 0.0f64..2.0) {
        let chain = ChainSpec::static_chain(ell, k).unwrap();
        let m = IsingHamiltonian::for_chain(&chain, h, g).unwrap().to_dense().unwrap();
        prop_assert_eq!((&m - m.transpose()).abs().max(), 0.0);
    }

    #[test]
    fn boundary_fields_are_reflection_symmetric(ell in 1usize..30, k in kernel()) {
        let chain = ChainSpec::static_chain(ell, k).unwrap();
        for f in [effective_field(&chain).unwrap(), vacuum_field(&chain).unwrap()] {
            for j in 0..ell {
                prop_assert!((f[j] - f[ell - 1 - j]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn classical_gap_matches_diagonal(ell in 1usize..12, k in kernel(), h in 0.0f64..1.0) {
        let chain = ChainSpec::static_chain(ell, k).unwrap();
        let op = IsingHamiltonian::for_chain(&chain, h, 0.0).unwrap();
        let direct = op.diag_at(op.dim() - 1) - op.diag_at(0);
        let closed = g0_energy_gap(&chain, h).unwrap();
        prop_assert!((direct - closed).abs() <= 1e-10 * closed.abs().max(1.0), "{} vs {}", direct, closed);
    }

    #[test]
    fn bubble_table_ends_at_breaking_field(ell in 1usize..40, xi in 0.3f64..1.44) {
        let chain = exp_chain(ell, xi);
        let table = bubble_crossing_fields(&chain).unwrap();
        prop_assert_eq!(table.len(), ell);
        prop_assert!((table[ell - 1].h_c - g0_breaking_field(&chain).unwrap()).abs() <= 1e-9);
    }

    #[test]
    fn sector_minima_are_edge_blocks(ell in 1usize..11, xi in 0.3f64..1.44, frac in 0.0f64..1.0, scale in 0.0f64..2.0) {
        let chain = exp_chain(ell, xi);
        let h = scale * g0_breaking_field(&chain).unwrap();
        let n_down = ((ell as f64) * frac).round() as usize;
        prop_assert!(enumerate_sector_minimum(&chain, h, n_down).unwrap().edge_adjacent);
    }

    #[test]
    fn bubble_distribution_is_normalized(n in 1usize..9, seed in prop::collection::vec(-3.0f64..3.0, 1..6)) {
        let s = random_state(n, &seed);
        let total: f64 = bubble_histogram(&s).iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn krylov_exponential_is_unitary(n in 2usize..8, dt in 0.001f64..0.5, g in 0.1f64..2.0,
                                     seed in prop::collection::vec(-3.0f64..3.0, 1..6)) {
        let op = IsingHamiltonian::for_chain(&exp_chain(n, 1.0), 0.2, g).unwrap();
        let mut v = random_state(n, &seed).into_amplitudes();
        let mut ws = KrylovWorkspace::new(v.len(), 20);
        expmv(|x, y| op.apply(x, y), &mut v, dt, 20, 1e-12, &mut ws).unwrap();
        prop_assert!((cnorm(&v) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn landau_zener_is_a_decreasing_probability(gap in 0.01f64..1.0, slope in 0.1f64..20.0,
                                                t1 in 0.0f64..100.0, dt in 0.0f64..100.0) {
        let a = landau_zener_probability(gap, slope, t1).unwrap();
        let b = landau_zener_probability(gap, slope, t1 + dt).unwrap();
        prop_assert!((0.0..=1.0).contains(&a) && b <= a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 6, ..ProptestConfig::default() })]

    #[test]
    fn iterative_and_dense_spectra_agree(ell in 7usize..11, h in 0.0f64..0.6, g in 0.2f64..2.0, k in 1usize..5) {
        let op = IsingHamiltonian::for_chain(&exp_chain(ell, 1.0), h, g).unwrap();
        let it = lanczos_lowest(&op, k, &LanczosOptions::default()).unwrap();
        let de = dense_lowest(&op.to_dense().unwrap(), k);
        for (a, b) in it.values.iter().zip(&de.values) {
            prop_assert!((a - b).abs() <= 1e-9);
        }
    }

    #[test]
    fn ramps_conserve_norm_and_reflection_symmetry(ell in 2usize..7, tau in 2.0f64..20.0, h_f in 0.1f64..1.0, g in 0.3f64..1.6) {
        let op = IsingHamiltonian::for_chain(&exp_chain(ell, 1.0), 0.0, g).unwrap();
        let s = RampSchedule::new(ScanAxis::H, tau, h_f, 21).unwrap();
        let r = propagate_ramp(&op, &s, &PropagatorConfig::default(), &ObservableSet::minimal(), None).unwrap();
        for sample in &r.samples {
            prop_assert!(sample.norm_drift <= 1e-10);
            for j in 0..ell {
                prop_assert!((sample.profile[j] - sample.profile[ell - 1 - j]).abs() <= 1e-8);
            }
        }
    }
}
