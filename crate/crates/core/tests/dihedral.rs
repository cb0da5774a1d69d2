use nalgebra::{DMatrix, Matrix2};
use proptest::prelude::*;
use ringfactor_core::*;

fn el(n: usize, j: usize, k: u8) -> DihedralElement {
    DihedralElement::new(n, j, k).unwrap()
}

#[test]
fn composition_and_inverse_examples() {
    assert_eq!(el(4, 2, 0).compose(&el(4, 3, 0)).unwrap(), el(4, 1, 0));
    assert!(el(5, 1, 1).compose(&el(5, 1, 1)).unwrap().is_identity());
    assert_eq!(el(3, 0, 1).compose(&el(3, 1, 0)).unwrap(), el(3, 2, 1));
    assert_eq!(el(6, 2, 0).inverse(), el(6, 4, 0));
    assert_eq!(el(6, 2, 1).inverse(), el(6, 2, 1));
    assert_eq!(el(2, 1, 0).inverse(), el(2, 1, 0));
}

#[test]
fn mismatched_orders_are_rejected() {
    let err = el(3, 1, 0).compose(&el(4, 1, 0)).unwrap_err();
    assert!(err.to_string().contains("group order mismatch"));
    assert!(standard_rep(5, &el(4, 0, 0)).is_err());
    assert!(DihedralElement::new(1, 0, 0).is_err());
}

#[test]
fn standard_rep_examples() {
    assert_eq!(standard_rep(4, &el(4, 1, 0)).unwrap(), Matrix2::new(0.0, -1.0, 1.0, 0.0));
    assert_eq!(standard_rep(3, &el(3, 3, 0)).unwrap(), Matrix2::identity());
    // s is the reflection across the x-axis used by the ring geometry.
    for n in 2..9 {
        assert_eq!(standard_rep(n, &el(n, 0, 1)).unwrap(), Matrix2::new(1.0, 0.0, 0.0, -1.0));
    }
}

#[test]
fn irrep_examples() {
    assert_eq!(irrep_matrix(4, IrrepLabel::Phi, &el(4, 1, 0)).unwrap()[(0, 0)], -1.0);
    assert_eq!(irrep_matrix(4, IrrepLabel::Psi, &el(4, 1, 1)).unwrap()[(0, 0)], 1.0);
    assert_eq!(irrep_matrix(5, IrrepLabel::Rho(2), &el(5, 0, 0)).unwrap(), DMatrix::identity(2, 2));
    assert!(irrep_matrix(5, IrrepLabel::Phi, &el(5, 1, 0)).is_err());
    assert!(irrep_matrix(5, IrrepLabel::Rho(3), &el(5, 1, 0)).is_err());
}

#[test]
fn irrep_lists() {
    use IrrepLabel::*;
    assert_eq!(irrep_list(4).unwrap(), vec![Tau, Alpha, Phi, Psi, Rho(1)]);
    assert_eq!(irrep_list(5).unwrap(), vec![Tau, Alpha, Rho(1), Rho(2)]);
    assert_eq!(irrep_list(2).unwrap(), vec![Tau, Alpha, Phi, Psi]);
    for n in 2..=12 {
        let sum: usize = irrep_list(n).unwrap().iter().map(|l| l.degree().pow(2)).sum();
        assert_eq!(sum, 2 * n, "n = {n}");
    }
}

/// Schur orthogonality: `Σ_g ρ_ij(g) ρ'_kl(g) = (2n/d) δ δ_ik δ_jl`.
#[test]
fn schur_orthogonality() {
    for n in 2..=10 {
        let group = DihedralElement::all(n).unwrap();
        let labels = irrep_list(n).unwrap();
        for a in &labels {
            for b in &labels {
                for (i, j, k, l) in index_quads(a.degree(), b.degree()) {
                    let sum: f64 = group
                        .iter()
                        .map(|g| irrep_matrix(n, *a, g).unwrap()[(i, j)] * irrep_matrix(n, *b, g).unwrap()[(k, l)])
                        .sum();
                    let want = if a == b && i == k && j == l { (2 * n) as f64 / a.degree() as f64 } else { 0.0 };
                    assert!((sum - want).abs() < 1e-12, "n={n} {a} {b} ({i}{j},{k}{l}): {sum}");
                }
            }
        }
    }
}

fn index_quads(da: usize, db: usize) -> Vec<(usize, usize, usize, usize)> {
    let mut out = Vec::new();
    for i in 0..da {
        for j in 0..da {
            for k in 0..db {
                for l in 0..db {
                    out.push((i, j, k, l));
                }
            }
        }
    }
    out
}

fn element() -> impl Strategy<Value = (usize, usize, u8, usize, u8, usize, u8)> {
    (2usize..=12).prop_flat_map(|n| (Just(n), 0..n, 0u8..2, 0..n, 0u8..2, 0..n, 0u8..2))
}

proptest! {
    #[test]
    fn group_axioms((n, j1, k1, j2, k2, j3, k3) in element()) {
        let (a, b, c) = (el(n, j1, k1), el(n, j2, k2), el(n, j3, k3));
        let ab_c = a.compose(&b).unwrap().compose(&c).unwrap();
        let a_bc = a.compose(&b.compose(&c).unwrap()).unwrap();
        prop_assert_eq!(ab_c, a_bc);
        prop_assert!(a.compose(&a.inverse()).unwrap().is_identity());
        prop_assert_eq!(DihedralElement::from_index(n, a.index()), a);
    }

    #[test]
    fn representations_are_homomorphisms((n, j1, k1, j2, k2, _, _) in element()) {
        let (g, h) = (el(n, j1, k1), el(n, j2, k2));
        let gh = g.compose(&h).unwrap();
        let std = standard_rep(n, &gh).unwrap() - standard_rep(n, &g).unwrap() * standard_rep(n, &h).unwrap();
        prop_assert!(std.amax() < 1e-12);
        for label in irrep_list(n).unwrap() {
            let m = |x: &DihedralElement| irrep_matrix(n, label, x).unwrap();
            prop_assert!((m(&gh) - m(&g) * m(&h)).amax() < 1e-12, "{}", label);
            prop_assert!((m(&g).transpose() * m(&g) - DMatrix::identity(label.degree(), label.degree())).amax() < 1e-12);
        }
    }
}
