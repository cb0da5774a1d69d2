//! Projection and transfer operators of the displacement representation,
//! isotypic decomposition, mass inner product and the symmetry-adapted
//! J-paired bases.

mod basis;

pub use basis::{
    assemble_global_basis, orbit_basis, orbit_translation_from_projectors, BlockPlan, SubBlock, SubBlockRole, SymBasis,
};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dihedral::{character_1d, irrep_list, rho_block, DihedralElement, IrrepLabel};
use crate::dynamics::{j_apply, j_matrix};
use crate::error::{Error, Result};
use crate::linalg::{column_space, rank, weighted_dot};
use crate::ring_geometry::RingSystem;

/// Threshold on singular values when counting ranks of projectors.
pub const RANK_TOL: f64 = 1e-8;

/// A vector in R^{2N}: one planar vector attached to each point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Displacement {
    pub values: DVector<f64>,
    pub label: String,
}

impl Displacement {
    pub fn new(values: DVector<f64>, label: impl Into<String>) -> Self {
        Self { values, label: label.into() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Selects the cosine or sine weights of an averaging operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Averaging {
    Cosine,
    Sine,
}

/// `(1/2n) Σ_{j=1..n} w(2πkj/n) σ_X(r^j)` with `w = cos` or `sin`.
pub fn averaging_operator(sys: &RingSystem, kind: Averaging, k: usize) -> DMatrix<f64> {
    let n = sys.n();
    let mut weights = vec![0.0; 2 * n];
    for j in 1..=n {
        let (c, s) = crate::dihedral::turn((k * j) as i64, n);
        let w = match kind {
            Averaging::Cosine => c,
            Averaging::Sine => s,
        };
        weights[j % n] += w / (2 * n) as f64;
    }
    sys.group_sum_matrix(&weights)
}

/// `e + s` (sign `+1`) or `e − s` (sign `−1`) acting on displacements.
pub fn reflection_factor(sys: &RingSystem, sign: f64) -> DMatrix<f64> {
    let n = sys.n();
    let mut weights = vec![0.0; 2 * n];
    weights[0] = 1.0;
    weights[n] = sign;
    sys.group_sum_matrix(&weights)
}

fn check_label(sys: &RingSystem, label: IrrepLabel) -> Result<()> {
    if label.is_valid_for(sys.n()) {
        Ok(())
    } else {
        Err(Error::InvalidIrrep { label: label.name(), n: sys.n() })
    }
}

fn check_sub_index(label: IrrepLabel, i: usize, j: usize) -> Result<()> {
    let d = label.degree();
    if (1..=d).contains(&i) && (1..=d).contains(&j) {
        Ok(())
    } else {
        Err(Error::InvalidIndex(format!("({i},{j}) is not a valid index pair for {label}")))
    }
}

/// Group-algebra weights of `p_ij` for `label`: `(d/2n)·r_ji(g⁻¹)` per element.
pub fn projector_weights(n: usize, label: IrrepLabel, i: usize, j: usize) -> Vec<f64> {
    let scale = label.degree() as f64 / (2 * n) as f64;
    (0..2 * n)
        .map(|idx| {
            let g = DihedralElement::from_index(n, idx);
            let value = match label {
                // r(g⁻¹) = r(g)ᵀ for orthogonal irreps, so r_ji(g⁻¹) = r_ij(g).
                IrrepLabel::Rho(k) => rho_block(n, k, &g)[(i - 1, j - 1)],
                other => character_1d(other, &g),
            };
            scale * value
        })
        .collect()
}

/// Projector (`i == j`) or transfer operator (`i != j`) `p_ij` of `label`.
pub fn operator(sys: &RingSystem, label: IrrepLabel, i: usize, j: usize) -> Result<DMatrix<f64>> {
    check_label(sys, label)?;
    check_sub_index(label, i, j)?;
    Ok(sys.group_sum_matrix(&projector_weights(sys.n(), label, i, j)))
}

/// Applies `p_ij` of `label` to a vector without forming the matrix.
pub fn apply_operator(
    sys: &RingSystem,
    label: IrrepLabel,
    i: usize,
    j: usize,
    v: &DVector<f64>,
) -> Result<DVector<f64>> {
    check_label(sys, label)?;
    check_sub_index(label, i, j)?;
    if v.len() != sys.dim() {
        return Err(Error::SizeMismatch { expected: sys.dim(), found: v.len() });
    }
    Ok(sys.group_sum_apply(&projector_weights(sys.n(), label, i, j), v))
}

/// Isotypic projector; `sublabel` selects `V_1` or `V_2` for degree-2 irreps
/// and must be 1 for one-dimensional ones.
pub fn projector(sys: &RingSystem, label: IrrepLabel, sublabel: usize) -> Result<DMatrix<f64>> {
    operator(sys, label, sublabel, sublabel)
}

/// Transfer isomorphism `p_ij` (`i != j`) from `V_j` to `V_i` of `Rho(k)`.
pub fn transfer(sys: &RingSystem, k: usize, i: usize, j: usize) -> Result<DMatrix<f64>> {
    if i == j {
        return Err(Error::InvalidIndex(format!("transfer needs distinct indices, got ({i},{j})")));
    }
    operator(sys, IrrepLabel::Rho(k), i, j)
}

/// The same operators written as products of averaging operators and
/// `e ± s`, as an independent construction route.
pub fn operator_from_averages(sys: &RingSystem, label: IrrepLabel, i: usize, j: usize) -> Result<DMatrix<f64>> {
    check_label(sys, label)?;
    check_sub_index(label, i, j)?;
    let n = sys.n();
    let plus = reflection_factor(sys, 1.0);
    let minus = reflection_factor(sys, -1.0);
    Ok(match label {
        IrrepLabel::Tau => averaging_operator(sys, Averaging::Cosine, 0) * plus,
        IrrepLabel::Alpha => averaging_operator(sys, Averaging::Cosine, 0) * minus,
        // c_0(−r) = c_{n/2}(r): the weights (−1)^j equal cos(πj).
        IrrepLabel::Phi => averaging_operator(sys, Averaging::Cosine, n / 2) * plus,
        IrrepLabel::Psi => averaging_operator(sys, Averaging::Cosine, n / 2) * minus,
        IrrepLabel::Rho(k) => {
            let c = averaging_operator(sys, Averaging::Cosine, k) * 2.0;
            let s = averaging_operator(sys, Averaging::Sine, k) * 2.0;
            match (i, j) {
                (1, 1) => c * plus,
                (2, 2) => c * minus,
                (1, 2) => s * (-minus),
                _ => s * plus,
            }
        }
    })
}

/// `⟨d1, d2⟩_M = d1ᵀ M d2`.
pub fn m_inner(sys: &RingSystem, d1: &DVector<f64>, d2: &DVector<f64>) -> Result<f64> {
    for d in [d1, d2] {
        if d.len() != sys.dim() {
            return Err(Error::SizeMismatch { expected: sys.dim(), found: d.len() });
        }
    }
    Ok(weighted_dot(&sys.mass_diagonal(), d1, d2))
}

/// The symplectic form `Ω_M(d1, d2) = ⟨d1, J d2⟩_M`.
pub fn omega_m(sys: &RingSystem, d1: &DVector<f64>, d2: &DVector<f64>) -> Result<f64> {
    m_inner(sys, d1, &j_apply(d2))
}

/// Dimension of each isotypic summand (of `V_1` for degree-2 irreps).
pub fn multiplicity(n: usize, type_abc: (usize, usize, usize), label: IrrepLabel) -> usize {
    let (a, b, c) = type_abc;
    let regular = b + 2 * c;
    match label {
        IrrepLabel::Tau | IrrepLabel::Alpha => regular,
        // For D_2 the center's planar displacements split as φ ⊕ ψ.
        IrrepLabel::Phi | IrrepLabel::Psi if n == 2 => a + regular,
        IrrepLabel::Phi | IrrepLabel::Psi => regular,
        IrrepLabel::Rho(1) => a + 2 * regular,
        IrrepLabel::Rho(_) => 2 * regular,
    }
}

/// One isotypic summand with an orthonormal (Euclidean) basis.
#[derive(Debug, Clone)]
pub struct IsotypicComponent {
    pub label: IrrepLabel,
    /// 1 or 2 for the `V_1`/`V_2` split of degree-2 irreps, 1 otherwise.
    pub sublabel: usize,
    pub basis: Vec<Displacement>,
    pub dimension: usize,
}

/// Every `(label, sublabel)` pair of D_n in table order.
pub fn summands(n: usize) -> Result<Vec<(IrrepLabel, usize)>> {
    Ok(irrep_list(n)?.into_iter().flat_map(|l| (1..=l.degree()).map(move |i| (l, i))).collect())
}

/// Rank of `p_ii` computed orbit block by orbit block (the operators never
/// mix orbits), together with a basis of its image.
fn image_by_orbits(sys: &RingSystem, p: &DMatrix<f64>) -> (usize, Vec<DVector<f64>>) {
    let mut total = 0;
    let mut vectors = Vec::new();
    for orbit in sys.orbits() {
        let r = orbit.coords();
        let block = p.view((r.start, r.start), (r.len(), r.len())).into_owned();
        for v in column_space(&block, RANK_TOL) {
            let mut full = DVector::zeros(sys.dim());
            full.rows_mut(r.start, r.len()).copy_from(&v);
            vectors.push(full);
        }
        total += rank(&block, RANK_TOL);
    }
    (total, vectors)
}

/// Images of all isotypic projectors with their dimensions checked against
/// the multiplicity formulas.
pub fn isotypic_decomposition(sys: &RingSystem) -> Result<Vec<IsotypicComponent>> {
    let mut out = Vec::new();
    for (label, sub) in summands(sys.n())? {
        let p = projector(sys, label, sub)?;
        let (dimension, vectors) = image_by_orbits(sys, &p);
        let expected = multiplicity(sys.n(), sys.type_abc(), label);
        if dimension != expected {
            return Err(Error::DecompositionMismatch(format!(
                "{label} (V_{sub}) has rank {dimension}, expected {expected}"
            )));
        }
        out.push(IsotypicComponent {
            label,
            sublabel: sub,
            basis: vectors
                .into_iter()
                .enumerate()
                .map(|(i, v)| Displacement::new(v, format!("{label}_{sub}[{i}]")))
                .collect(),
            dimension,
        });
    }
    Ok(out)
}

/// Residuals of the commutation relations between J and the group operators.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JRelationsReport {
    pub entries: Vec<(String, f64)>,
    pub max_residual: f64,
    pub threshold: f64,
    pub pass: bool,
    /// `‖Tᵀ M J + M J T‖` for the transfer maps (reported, not gated).
    pub hamiltonian_residuals: Vec<(String, f64)>,
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.amax()
}

pub fn j_relations_check(sys: &RingSystem) -> Result<JRelationsReport> {
    let n = sys.n();
    let j = j_matrix(sys.len());
    let mut entries = Vec::new();
    let r = sys.sigma_x_matrix(&DihedralElement::rotation(n, 1)?)?;
    let s = sys.sigma_x_matrix(&DihedralElement::reflection(n)?)?;
    entries.push(("J r - r J".to_string(), max_abs(&(&j * &r - &r * &j))));
    entries.push(("J s + s J".to_string(), max_abs(&(&j * &s + &s * &j))));

    let mut pairs = vec![(IrrepLabel::Tau, IrrepLabel::Alpha)];
    if n % 2 == 0 {
        pairs.push((IrrepLabel::Phi, IrrepLabel::Psi));
    }
    for (a, b) in pairs {
        let pa = projector(sys, a, 1)?;
        let pb = projector(sys, b, 1)?;
        entries.push((format!("J p_{a} - p_{b} J"), max_abs(&(&j * &pa - &pb * &j))));
        entries.push((format!("J p_{b} - p_{a} J"), max_abs(&(&j * &pb - &pa * &j))));
    }

    let mass = sys.mass_matrix();
    let mj = &mass * &j;
    let mut hamiltonian_residuals = Vec::new();
    for k in 1..=crate::dihedral::max_rho_index(n) {
        let l = IrrepLabel::Rho(k);
        let p = |i, jj| operator(sys, l, i, jj);
        let (p11, p12, p21, p22) = (p(1, 1)?, p(1, 2)?, p(2, 1)?, p(2, 2)?);
        entries.push((format!("J p11_{l} - p22_{l} J"), max_abs(&(&j * &p11 - &p22 * &j))));
        entries.push((format!("J p22_{l} - p11_{l} J"), max_abs(&(&j * &p22 - &p11 * &j))));
        entries.push((format!("J p12_{l} + p21_{l} J"), max_abs(&(&j * &p12 + &p21 * &j))));
        entries.push((format!("J p21_{l} + p12_{l} J"), max_abs(&(&j * &p21 + &p12 * &j))));
        let restrict = &p11 + &p22;
        for (name, t) in [("p12", &p12), ("p21", &p21)] {
            let h = t.transpose() * &mj + &mj * t;
            let res = restrict.transpose() * h * &restrict;
            hamiltonian_residuals.push((format!("{name}_{l}"), max_abs(&res)));
        }
    }

    let max_residual = entries.iter().map(|e| e.1).fold(0.0, f64::max);
    // ‖J‖_2 = 1.
    let threshold = 1e-11;
    Ok(JRelationsReport { entries, max_residual, threshold, pass: max_residual <= threshold, hamiltonian_residuals })
}
