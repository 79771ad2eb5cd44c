//! Inequality hierarchy, saturation and proof identities over random instances.

use duality_core::interferometer::{
    from_global_unitary, from_unitary_pair, QuantonPrep, WwmBlocks,
};
use duality_core::linalg::{haar_random_unitary, ComplexMatrix};
use duality_core::measures::{
    chi_two_branch, d_two_level, hierarchy_report, is_restricted_class, mixed_state_bound,
    pure_state_identity, slack,
};
use duality_core::rng::SplitMix64;
use duality_core::sampling::{
    restricted_two_level, seeded_instance, BlockClass, InstanceClass, MarkerClass, QuantonClass,
};
use duality_core::InterferometerInstance;
use proptest::prelude::*;

const PURE_PAIR: InstanceClass = InstanceClass {
    marker: MarkerClass::Pure,
    quanton: QuantonClass::SPure,
    blocks: BlockClass::UnitaryPair,
};

fn any_instance() -> impl Strategy<Value = InterferometerInstance> {
    (any::<u64>(), 0usize..8, 2usize..=4, 0u64..1000)
        .prop_map(|(seed, c, dim, i)| seeded_instance(seed, InstanceClass::all()[c], dim, i))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn hierarchy_slacks_nonnegative(inst in any_instance()) {
        let rep = hierarchy_report(&inst).unwrap();
        for name in [slack::O2P, slack::O2Q, slack::O2, slack::O1] {
            prop_assert!(rep.slacks[name] >= -1e-9, "{} = {}", name, rep.slacks[name]);
        }
        prop_assert!(rep.d >= rep.p - 1e-10);
        prop_assert!(rep.xi >= rep.p.max(rep.q) - 1e-10);
        prop_assert!(rep.xi >= rep.p * rep.q - 1e-10);
        for x in [rep.v, rep.p, rep.q, rep.d, rep.xi] {
            prop_assert!((0.0..=1.0 + 1e-9).contains(&x));
        }
    }
}

#[test]
fn pure_preparations_saturate() {
    for class in [
        PURE_PAIR,
        InstanceClass {
            blocks: BlockClass::GeneralUnitary,
            ..PURE_PAIR
        },
    ] {
        for dim in 2..=4 {
            for i in 0..100 {
                let rep = hierarchy_report(&seeded_instance(11, class, dim, i)).unwrap();
                let v2 = rep.v * rep.v;
                assert!(
                    (v2 + rep.xi * rep.xi - 1.0).abs() <= 1e-10,
                    "{class} {dim} {i}"
                );
                assert!(
                    (v2 + rep.d * rep.d - 1.0).abs() <= 1e-10,
                    "{class} {dim} {i}"
                );
                assert!((rep.d - rep.xi).abs() <= 1e-10);
            }
        }
    }
}

#[test]
fn balanced_interferometers_collapse_to_quality() {
    // Unitary-pair blocks give w+ = w- = 1/2 for every s.
    for class in InstanceClass::all()
        .into_iter()
        .filter(|c| c.blocks == BlockClass::UnitaryPair)
    {
        for i in 0..100 {
            let rep = hierarchy_report(&seeded_instance(5, class, 3, i)).unwrap();
            assert!(rep.p <= 1e-12);
            assert!((rep.d - rep.q).abs() <= 1e-9);
            assert!((rep.xi - rep.q).abs() <= 1e-9);
        }
    }
}

#[test]
fn two_level_d_equals_max_p_r() {
    for class in InstanceClass::all() {
        for i in 0..60 {
            let rep = hierarchy_report(&seeded_instance(21, class, 2, i)).unwrap();
            assert!(
                (d_two_level(rep.p, rep.r.unwrap()) - rep.d).abs() <= 1e-10,
                "{class} {i}"
            );
        }
    }
}

#[test]
fn pure_identity_sweep() {
    let mut worst: f64 = 0.0;
    for dim in 2..=4 {
        for i in 0..334 {
            let id = pure_state_identity(&seeded_instance(3, PURE_PAIR, dim, i)).unwrap();
            worst = worst.max(id.residual);
            assert!(id.gamma_spectrum_defect <= 1e-9);
            assert!(id.gamma_quality_defect <= 1e-9);
            assert!(id.cross_term_defect <= 1e-9);
        }
    }
    assert!(worst <= 1e-9, "max residual {worst}");
}

#[test]
fn pure_identity_holds_for_general_blocks() {
    let class = InstanceClass {
        blocks: BlockClass::GeneralUnitary,
        ..PURE_PAIR
    };
    for i in 0..200 {
        let id = pure_state_identity(&seeded_instance(4, class, 3, i)).unwrap();
        assert!(id.residual <= 1e-9);
    }
}

#[test]
fn mixed_bound_sweep() {
    for blocks in InstanceClass::ALL_BLOCKS {
        let class = InstanceClass {
            marker: MarkerClass::Mixed,
            quanton: QuantonClass::SPure,
            blocks,
        };
        for dim in 2..=4 {
            for i in 0..170 {
                let inst = seeded_instance(8, class, dim, i);
                let m = mixed_state_bound(&inst).unwrap();
                assert!(m.slack >= -1e-9, "{class} {dim} {i}: {}", m.slack);
                assert!(m.recomposition_error <= 1e-10);
                // Triangle inequality over the spectral components.
                let bound: f64 = m
                    .weights
                    .iter()
                    .zip(&m.component_qualities)
                    .map(|(d, q)| d * q)
                    .sum();
                assert!(m.q <= bound + 1e-9);
                if blocks == BlockClass::UnitaryPair {
                    assert!(m.thetas_in_unit_interval());
                }
            }
        }
    }
}

#[test]
fn theta_can_exceed_one_for_nonunitary_blocks() {
    // Recorded, not asserted in the sweep: with nonunitary blocks the
    // per-component ratios use the mixture's w+-, so theta_k > 1 occurs.
    let class = InstanceClass {
        marker: MarkerClass::Mixed,
        quanton: QuantonClass::SPure,
        blocks: BlockClass::GeneralUnitary,
    };
    let exceed = (0..500)
        .filter(|&i| {
            !mixed_state_bound(&seeded_instance(1, class, 2, i))
                .unwrap()
                .thetas_in_unit_interval()
        })
        .count();
    assert!(exceed > 0);
}

#[test]
fn chain_and_chi_on_scalar_w_class() {
    let mut rng = SplitMix64::new(31);
    for _ in 0..500 {
        let inst = restricted_two_level(&mut rng, true);
        assert!(is_restricted_class(&inst));
        let rep = hierarchy_report(&inst).unwrap();
        assert!(rep.v <= rep.v_bound_xi + 1e-9);
        assert!(rep.v_bound_xi <= rep.v_bound_d + 1e-9);
        assert!(rep.slacks[slack::MAIN] >= -1e-9);
        let d1 = inst.rho_d0()[(0, 0)].re;
        let closed = chi_two_branch(d1, 1.0 - d1, rep.p, rep.r.unwrap(), rep.xi).unwrap();
        assert!((rep.chi.unwrap() - closed).abs() <= 1e-9);
    }
}

#[test]
fn restricted_class_counterexample_to_xi_dominance() {
    // Diagonal w-operators, |s| = 1, n = 2, yet D > Xi.
    let s = std::f64::consts::SQRT_2;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let hadamard = ComplexMatrix::from_real_rows(&[[h, h], [h, -h]]);
    let (a, b) = (0.15f64.sqrt(), 0.85f64.sqrt());
    let vpp = ComplexMatrix::real_diagonal(&[s, s * a]);
    let vpm = &ComplexMatrix::real_diagonal(&[0.0, s * b]) * &hadamard;
    // Complete the top block row to a unitary: bottom row [-S1, C2] with
    // S1 = diag(0, b), C2 = diag(1, a) H.
    let vmp = ComplexMatrix::real_diagonal(&[0.0, s * b]);
    let vmm = &ComplexMatrix::real_diagonal(&[s, s * a]) * &hadamard;
    let blocks = WwmBlocks::new(vpp, vpm, vmp, vmm).unwrap();
    let rho = ComplexMatrix::real_diagonal(&[0.15, 0.85]);
    let inst =
        InterferometerInstance::new(QuantonPrep::new(1.0).unwrap(), blocks, rho, 0.0).unwrap();
    assert!(is_restricted_class(&inst));
    let rep = hierarchy_report(&inst).unwrap();
    assert!(
        (rep.d - 0.7229).abs() < 1e-3 && (rep.xi - 0.6323).abs() < 1e-3,
        "{rep:?}"
    );
    assert!(rep.slacks[slack::MAIN] < -0.05);
    // The proven inequalities still hold.
    assert!(rep.violations() == vec![slack::MAIN]);
}

#[test]
fn instances_from_random_global_unitaries_are_valid() {
    for dim in [4, 6, 8] {
        let blocks = from_global_unitary(&haar_random_unitary(dim, dim as u64)).unwrap();
        let rho = duality_core::linalg::random_density(dim / 2, 1, 3).unwrap();
        let inst =
            InterferometerInstance::new(QuantonPrep::new(0.3).unwrap(), blocks, rho, 0.1).unwrap();
        assert!(hierarchy_report(&inst).unwrap().violations().is_empty());
    }
    let pair = from_unitary_pair(&haar_random_unitary(2, 1), &haar_random_unitary(2, 2)).unwrap();
    let rho = ComplexMatrix::identity(2).scale_real(0.5);
    let inst = InterferometerInstance::new(QuantonPrep::new(1.0).unwrap(), pair, rho, 0.0).unwrap();
    assert!(is_restricted_class(&inst));
}
