mod common;

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Vector2};
use proptest::prelude::*;
use ringfactor_core::sym_adapt::{
    operator, operator_from_averages, orbit_translation_from_projectors, Averaging, SubBlockRole,
};
use ringfactor_core::*;

fn ngon(n: usize, mass: f64) -> RingSystem {
    RingSystem::build(n, &[RingSpec::regular(1.0, Phase::Aligned, mass)]).unwrap()
}

fn mixed(n: usize) -> RingSystem {
    RingSystem::build(
        n,
        &[
            RingSpec::center(1.2),
            RingSpec::regular(1.0, Phase::Aligned, 0.8),
            RingSpec::regular(1.7, Phase::Staggered, 1.4),
            RingSpec::semiregular(2.3, 0.4 * PI / n as f64, 0.6),
        ],
    )
    .unwrap()
}

/// A displacement that is `v` at point `p` and zero elsewhere.
fn at_point(sys: &RingSystem, p: usize, v: Vector2<f64>) -> DVector<f64> {
    let mut d = DVector::zeros(sys.dim());
    d[2 * p] = v.x;
    d[2 * p + 1] = v.y;
    d
}

fn dim_of(parts: &[IsotypicComponent], label: IrrepLabel) -> usize {
    parts.iter().filter(|c| c.label == label).map(|c| c.dimension).sum()
}

#[test]
fn averaging_examples() {
    let sys = mixed(5);
    let x = sys.config_vector();
    let c0 = averaging_operator(&sys, Averaging::Cosine, 0);
    assert!((&c0 * &x - &x * 0.5).amax() < 1e-14);
    assert!(averaging_operator(&sys, Averaging::Sine, 0).amax() < 1e-15);
    assert!((averaging_operator(&sys, Averaging::Cosine, 5) - c0).amax() < 1e-14);
}

#[test]
fn projector_ranks() {
    let p = projector(&ngon(6, 1.0), IrrepLabel::Tau, 1).unwrap();
    assert_eq!(common::svd_rank(&p, 1e-8), 1);
    let sys = RingSystem::build(
        4,
        &[
            RingSpec::center(2.0),
            RingSpec::regular(1.0, Phase::Aligned, 1.0),
            RingSpec::regular(2.0, Phase::Staggered, 1.0),
        ],
    )
    .unwrap();
    let p = projector(&sys, IrrepLabel::Rho(1), 1).unwrap();
    assert_eq!(common::svd_rank(&p, 1e-8), 5);
    assert!((&p * &p - &p).amax() < 1e-13);
}

#[test]
fn two_constructions_of_the_operators_agree() {
    for n in [2, 3, 4, 7, 8] {
        let sys = mixed(n);
        for label in irrep_list(n).unwrap() {
            for i in 1..=label.degree() {
                for j in 1..=label.degree() {
                    let a = operator(&sys, label, i, j).unwrap();
                    let b = operator_from_averages(&sys, label, i, j).unwrap();
                    assert!((&a - &b).amax() < 1e-13, "n={n} {label} ({i},{j})");
                }
            }
        }
    }
}

#[test]
fn transfer_maps() {
    let sys = mixed(7);
    for k in 1..=3 {
        let p11 = projector(&sys, IrrepLabel::Rho(k), 1).unwrap();
        let p22 = projector(&sys, IrrepLabel::Rho(k), 2).unwrap();
        let p12 = transfer(&sys, k, 1, 2).unwrap();
        let p21 = transfer(&sys, k, 2, 1).unwrap();
        assert!((&p12 * &p21 - &p11).amax() < 1e-13);
        assert!((&p21 * &p22).amax() < 1e-13);
        let v = &p11 * sys.config_vector().map(|x| x.sin() + 0.3);
        let w = &p21 * &v;
        let (nv, nw) = (m_inner(&sys, &v, &v).unwrap(), m_inner(&sys, &w, &w).unwrap());
        assert!((nv - nw).abs() <= 1e-10 * nv);
    }
    assert!(transfer(&sys, 1, 1, 1).is_err());
}

#[test]
fn m_inner_examples() {
    for (spec, count) in
        [(RingSpec::regular(1.7, Phase::Staggered, 0.6), 6.0), (RingSpec::semiregular(1.7, 0.2, 0.6), 12.0)]
    {
        let sys = RingSystem::build(6, &[spec]).unwrap();
        let seed = sys.orbits()[0].seed;
        // The seed's radial vector scaled by the orbit size averages to the
        // orbit's own position vector.
        let d = at_point(&sys, seed, sys.positions()[seed] * count);
        let p = projector(&sys, IrrepLabel::Tau, 1).unwrap() * d;
        let got = m_inner(&sys, &p, &p).unwrap();
        assert!((got - 0.6 * 1.7 * 1.7 * count).abs() < 1e-12 * got);
    }
    let sys = mixed(4);
    let d = sys.config_vector().map(f64::cos);
    assert!(m_inner(&sys, &d, &j_apply(&d)).unwrap().abs() < 1e-13);
    let e = sys.config_vector().map(|x| x * x);
    let base = m_inner(&sys, &d, &e).unwrap();
    for g in DihedralElement::all(4).unwrap() {
        let s = sys.sigma_x_matrix(&g).unwrap();
        assert!((m_inner(&sys, &(&s * &d), &(&s * &e)).unwrap() - base).abs() < 1e-12 * base.abs());
    }
    assert!(m_inner(&sys, &d, &DVector::zeros(3)).is_err());
}

#[test]
fn isotypic_dimensions() {
    let parts = isotypic_decomposition(&ngon(5, 1.0)).unwrap();
    for label in [IrrepLabel::Tau, IrrepLabel::Alpha] {
        assert_eq!(dim_of(&parts, label), 1);
    }
    assert_eq!(dim_of(&parts, IrrepLabel::Rho(1)), 4);
    assert_eq!(dim_of(&parts, IrrepLabel::Rho(2)), 4);

    let sys = RingSystem::build(
        4,
        &[
            RingSpec::center(1.0),
            RingSpec::regular(1.0, Phase::Aligned, 1.0),
            RingSpec::regular(2.0, Phase::Staggered, 1.0),
            RingSpec::semiregular(3.0, 0.3, 1.0),
        ],
    )
    .unwrap();
    let parts = isotypic_decomposition(&sys).unwrap();
    for label in [IrrepLabel::Tau, IrrepLabel::Alpha, IrrepLabel::Phi, IrrepLabel::Psi] {
        assert_eq!(dim_of(&parts, label), 4);
    }
    assert_eq!(dim_of(&parts, IrrepLabel::Rho(1)), 18);
    assert_eq!(parts.iter().map(|c| c.dimension).sum::<usize>(), 34);

    let d2 = RingSystem::build(2, &[RingSpec::center(1.0), RingSpec::regular(1.0, Phase::Aligned, 1.0)]).unwrap();
    let parts = isotypic_decomposition(&d2).unwrap();
    assert_eq!(dim_of(&parts, IrrepLabel::Tau), 1);
    assert_eq!(dim_of(&parts, IrrepLabel::Phi), 2);
    assert_eq!(parts.iter().map(|c| c.dimension).sum::<usize>(), 6);
}

#[test]
fn j_relations_hold() {
    for n in [2, 3, 6, 9] {
        let report = j_relations_check(&mixed(n)).unwrap();
        assert!(report.pass, "n={n}: {:?}", report.entries);
        assert!(report.max_residual < 1e-12);
    }
}

#[test]
fn orbit_basis_sizes() {
    let pentagon = ngon(5, 1.0);
    let b = orbit_basis(&pentagon, 0).unwrap();
    assert_eq!(b.len(), 10);
    assert!(b.pairing_residual() < 1e-14);
    let semi = RingSystem::build(5, &[RingSpec::semiregular(1.0, 0.3, 1.0)]).unwrap();
    assert_eq!(orbit_basis(&semi, 0).unwrap().len(), 20);
    assert!(orbit_basis(&semi, 1).is_err());

    let sys = mixed(6);
    let total: usize = (0..sys.orbits().len()).map(|o| orbit_basis(&sys, o).unwrap().len()).sum();
    assert_eq!(total, sys.dim());
}

#[test]
fn global_basis_structure() {
    for n in [2, 3, 4, 5, 8] {
        let sys = mixed(n);
        let basis = assemble_global_basis(&sys).unwrap();
        assert_eq!(basis.len(), sys.dim());
        assert!(basis.normalized && !basis.m_orthogonality_partial);
        assert!(basis.pairing_residual() < 1e-12);
        assert!(basis.condition.is_finite());
        let gram = basis.m_gram(&sys);
        for i in 0..basis.len() {
            assert!((gram[(i, i)] - 1.0).abs() < 1e-12);
            for j in 0..i {
                if basis.is_m_orthogonal_pair(i, j) {
                    assert!(gram[(i, j)].abs() < 1e-10, "n={n} ({i},{j}) {}", gram[(i, j)]);
                }
            }
        }
        let covered: usize = basis.blocks.iter().map(|b| b.size()).sum();
        assert_eq!(covered, sys.dim());
    }
}

#[test]
fn two_ngons_tau_block_is_m_orthogonal() {
    let sys = RingSystem::build(
        6,
        &[RingSpec::regular(1.0, Phase::Aligned, 1.0), RingSpec::regular(1.5, Phase::Aligned, 1.0)],
    )
    .unwrap();
    let basis = assemble_global_basis(&sys).unwrap();
    let plan = basis.block("tau+alpha").unwrap();
    assert_eq!(plan.size(), 4);
    assert!(plan.sub_blocks.iter().any(|s| s.role == SubBlockRole::RotationScaling));
    let gram = basis.m_gram(&sys);
    for i in plan.columns.clone() {
        for j in plan.columns.start..i {
            assert!(gram[(i, j)].abs() < 1e-12);
        }
    }
}

#[test]
fn projector_translation_matches_rigid_shift() {
    let sys = mixed(5);
    for (oi, orbit) in sys.orbits().iter().enumerate() {
        let t = orbit_translation_from_projectors(&sys, oi).unwrap();
        for p in 0..sys.len() {
            let want = if orbit.points.contains(&p) { (1.0, 0.0) } else { (0.0, 0.0) };
            assert!((t[2 * p] - want.0).abs() < 1e-13 && (t[2 * p + 1] - want.1).abs() < 1e-13);
        }
    }
}

#[test]
fn degenerate_mass_norms_are_noted() {
    let build = |r2: f64, m2: f64| {
        RingSystem::build(4, &[RingSpec::regular(1.0, Phase::Aligned, 1.0), RingSpec::regular(r2, Phase::Aligned, m2)])
            .unwrap()
    };
    // Opposite total masses: the two translations cannot be told apart.
    let basis = assemble_global_basis(&build(1.5, -1.0)).unwrap();
    assert!(!basis.normalized);
    assert!(basis.notes.iter().any(|n| n.contains("translation")));
    // m R² cancels between the rings, so ϰ has zero mass norm.
    let basis = assemble_global_basis(&build(2.0, -0.25)).unwrap();
    assert!(basis.notes.iter().any(|n| n.contains("rotation-scaling")));
    assert_eq!(basis.len(), 16);
    assert!(basis.pairing_residual() < 1e-12);
    assert_eq!(basis.m_orthogonality_partial, basis.blocks.iter().any(|b| b.m_orthogonality_partial));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn projectors_are_complete_idempotent_and_equivariant(n in 2usize..9, seed in 0u64..1000) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let sys = common::random_system(&mut rng, n, (1, 1, 1));
        let mut total = DMatrix::zeros(sys.dim(), sys.dim());
        for label in irrep_list(n).unwrap() {
            for i in 1..=label.degree() {
                let p = projector(&sys, label, i).unwrap();
                prop_assert!((&p * &p - &p).amax() < 1e-12);
                for g in DihedralElement::all(n).unwrap() {
                    if label.degree() == 1 {
                        let s = sys.sigma_x_matrix(&g).unwrap();
                        prop_assert!((&s * &p - &p * &s).amax() < 1e-12);
                    }
                }
                total += p;
            }
        }
        prop_assert!((total - DMatrix::identity(sys.dim(), sys.dim())).amax() < 1e-12);
    }
}
