//! Block-diagonalization of the stability operator in a symmetry-adapted
//! basis, per-block polynomial factors of the stability polynomial and
//! their validation against a dense determinant.

use std::ops::Range;

use nalgebra::{DMatrix, DVector, Schur};
use serde::{Deserialize, Serialize};

use crate::dynamics::{j_apply, j_matrix, PotentialKind, StabilityOperator};
use crate::error::{Error, Result};
use crate::extended::{cdd, dd, det, horner_log, norm, recip, roots_of_unity, shifted, Cdd, Dd};
use crate::linalg::log_det;
use crate::ring_geometry::RingSystem;
use crate::sym_adapt::{SubBlockRole, SymBasis};

/// Largest admissible condition number of the change of basis.
pub const MAX_CONDITION: f64 = 1e8;
/// Relative residual below which a configuration counts as a relative equilibrium.
pub const RELEQ_TOL: f64 = 1e-8;
/// Default gate for the oracle comparison.
pub const ORACLE_TOL: f64 = 1e-8;
/// Number of Chebyshev samples used by the oracle comparison.
pub const ORACLE_SAMPLES: usize = 20;
/// Unit roundoff of double-double arithmetic.
const EXTENDED_EPS: f64 = 1.0e-32;
/// Most circles visited while extracting coefficients.
const MAX_RADII: usize = 40;
/// Iteration budget of the Schur decomposition used for roots.
const SCHUR_MAX_ITER: usize = 10_000;

/// One diagonal block of the transformed operator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockReport {
    pub label: String,
    pub size: usize,
    pub columns: Range<usize>,
    pub a_block: DMatrix<f64>,
    pub j_block: DMatrix<f64>,
    /// Largest coupling to columns outside the block (or, for a sub-block,
    /// outside the sub-block but inside its parent), relative to ‖Ã‖_F.
    pub off_block_residual: f64,
    /// Largest deviation of `j_block` from the standard form of the block's
    /// J-pairs (`[[0, I], [−I, 0]]` per group of pairs).
    pub j_residual: f64,
}

/// `Ã = C⁻¹AC`, `J̃ = C⁻¹JC` and the block reports.
#[derive(Debug, Clone)]
pub struct Transformed {
    pub a_tilde: DMatrix<f64>,
    pub j_tilde: DMatrix<f64>,
    pub blocks: Vec<BlockReport>,
    /// Reports for the leading-pair / remainder split of each block.
    pub sub_blocks: Vec<(usize, SubBlockRole, bool, BlockReport)>,
    pub off_block_residual: f64,
    pub frobenius: f64,
}

#[cfg(test)]
fn standard_pairing(size: usize) -> DMatrix<f64> {
    let h = size / 2;
    let mut j = DMatrix::zeros(size, size);
    for i in 0..h {
        j[(i, h + i)] = 1.0;
        j[(h + i, i)] = -1.0;
    }
    j
}

/// Matrix of J on `cols` predicted by the recorded pairs `J u = w`.
fn paired_form(pairing: &[(usize, usize)], cols: &Range<usize>) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(cols.len(), cols.len());
    for &(u, w) in pairing.iter().filter(|(u, w)| cols.contains(u) && cols.contains(w)) {
        j[(w - cols.start, u - cols.start)] = 1.0;
        j[(u - cols.start, w - cols.start)] = -1.0;
    }
    j
}

fn coupling(m: &DMatrix<f64>, inside: &Range<usize>, within: &Range<usize>) -> f64 {
    let mut worst: f64 = 0.0;
    for r in within.clone() {
        for c in within.clone() {
            if inside.contains(&r) != inside.contains(&c) {
                worst = worst.max(m[(r, c)].abs());
            }
        }
    }
    worst
}

fn block_report(
    label: &str,
    a: &DMatrix<f64>,
    j: &DMatrix<f64>,
    cols: Range<usize>,
    within: &Range<usize>,
    pairing: &[(usize, usize)],
    denom: f64,
) -> BlockReport {
    let size = cols.len();
    let a_block = a.view((cols.start, cols.start), (size, size)).into_owned();
    let j_block = j.view((cols.start, cols.start), (size, size)).into_owned();
    let j_residual = (&j_block - paired_form(pairing, &cols)).amax();
    BlockReport {
        label: label.to_string(),
        size,
        off_block_residual: coupling(a, &cols, within) / denom,
        columns: cols,
        a_block,
        j_block,
        j_residual,
    }
}

pub fn transform(op: &StabilityOperator, basis: &SymBasis) -> Result<Transformed> {
    let dim = op.dim();
    if basis.change_of_basis.nrows() != dim || basis.change_of_basis.ncols() != dim {
        return Err(Error::SizeMismatch { expected: dim, found: basis.change_of_basis.ncols() });
    }
    if !(basis.condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned(basis.condition));
    }
    let c = &basis.change_of_basis;
    let lu = c.clone().lu();
    let a_tilde = lu.solve(&(&op.a * c)).ok_or(Error::IllConditioned(f64::INFINITY))?;
    let jc = DMatrix::from_columns(&c.column_iter().map(|col| j_apply(&col.into_owned())).collect::<Vec<_>>());
    let j_tilde = lu.solve(&jc).ok_or(Error::IllConditioned(f64::INFINITY))?;

    let frobenius = a_tilde.norm();
    let denom = frobenius.max(1e-12);
    let everything = 0..dim;
    let blocks: Vec<BlockReport> = basis
        .blocks
        .iter()
        .map(|b| block_report(&b.label, &a_tilde, &j_tilde, b.columns.clone(), &everything, &b.pairing, denom))
        .collect();
    let mut sub_blocks = Vec::new();
    for (bi, plan) in basis.blocks.iter().enumerate() {
        for sb in &plan.sub_blocks {
            let label = format!("{}:{}", plan.label, sb.label);
            let report =
                block_report(&label, &a_tilde, &j_tilde, sb.columns.clone(), &plan.columns, &plan.pairing, denom);
            sub_blocks.push((bi, sb.role, sb.separable, report));
        }
    }
    let off_block_residual = blocks.iter().map(|b| b.off_block_residual).fold(0.0, f64::max);
    Ok(Transformed { a_tilde, j_tilde, blocks, sub_blocks, off_block_residual, frobenius })
}

/// A polynomial factor in λ with ascending real coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyFactor {
    pub block_label: String,
    pub size: usize,
    pub degree: usize,
    pub coefficients: Vec<f64>,
    /// Low-order parts: `coefficients[k] + coefficients_low[k]` is the
    /// double-double value used for evaluation.
    pub coefficients_low: Vec<f64>,
    /// Roots as `(re, im)`, eigenvalues of the block's linearized pencil.
    pub roots: Vec<(f64, f64)>,
}

impl PolyFactor {
    fn extended(&self) -> Vec<Dd> {
        self.coefficients.iter().zip(&self.coefficients_low).map(|(&h, &l)| dd(h) + dd(l)).collect()
    }

    /// Value at a real point (may overflow for very large arguments; see
    /// [`PolyFactor::eval_log`]).
    pub fn eval(&self, x: f64) -> f64 {
        let (s, l) = self.eval_log(x);
        s * l.exp()
    }

    /// `(sign, ln|p(x)|)` from the coefficients.
    pub fn eval_log(&self, x: f64) -> (f64, f64) {
        horner_log(&self.extended(), x)
    }

    /// Largest odd-degree coefficient relative to the largest coefficient.
    pub fn odd_part(&self) -> f64 {
        let max = self.coefficients.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let odd = self.coefficients.iter().skip(1).step_by(2).fold(0.0f64, |m, c| m.max(c.abs()));
        if max == 0.0 {
            0.0
        } else {
            odd / max
        }
    }
}

/// Determinant of the block pencil at complex `z`, in double-double.
fn pencil_det(a: &DMatrix<f64>, j: &DMatrix<f64>, kind: &PotentialKind, omega: f64, z: Cdd) -> Cdd {
    let w = cdd(omega, 0.0);
    let (diag, jscale) = match kind {
        PotentialKind::Homogeneous { .. } => (z * z - w * w, z * w * cdd(2.0, 0.0)),
        PotentialKind::Vortex => (w, z),
    };
    det(shifted(a, j, diag, jscale), a.nrows())
}

/// Coefficients of the exact-degree interpolant of `eval` from values on
/// circles of geometrically decreasing radius; each coefficient is taken
/// from the circle where its estimated error is smallest.
fn interpolate_on_circles(eval: impl Fn(Cdd) -> Cdd, degree: usize, outer: f64) -> Vec<Dd> {
    let k_nodes = degree + 1;
    let nodes = roots_of_unity(k_nodes);
    let mut best = vec![f64::INFINITY; k_nodes];
    let mut coeffs = vec![dd(0.0); k_nodes];
    let mut radius = outer;
    for _ in 0..MAX_RADII {
        let r = cdd(radius, 0.0);
        // p has real coefficients, so p(z̄) = conj(p(z)).
        let mut values = vec![cdd(0.0, 0.0); k_nodes];
        for j in 0..k_nodes {
            let mirror = (k_nodes - j) % k_nodes;
            values[j] = if mirror < j { values[mirror].conj() } else { eval(nodes[j] * r) };
        }
        let peak = values.iter().map(norm).fold(0.0, f64::max);
        let noise = EXTENDED_EPS * k_nodes as f64 * peak;
        let mut c0 = 0.0;
        for k in 0..k_nodes {
            let sum =
                values.iter().enumerate().fold(cdd(0.0, 0.0), |acc, (j, v)| acc + *v * nodes[(j * k) % k_nodes].conj());
            let scaled = sum.re * recip(dd(k_nodes as f64));
            if k == 0 {
                c0 = scaled.hi();
            }
            let err = noise / radius.powi(k as i32);
            if err < best[k] {
                best[k] = err;
                coeffs[k] = scaled * recip(dd(radius).powi(k as i32));
            }
        }
        if peak == 0.0 || c0.abs() >= 0.5 * peak {
            break;
        }
        radius *= 0.5;
    }
    coeffs
}

/// Roots of a polynomial with ascending coefficients via the eigenvalues
/// of its companion matrix.
pub fn companion_roots(coefficients: &[f64]) -> Vec<(f64, f64)> {
    companion_or_none(coefficients).unwrap_or_default()
}

fn companion_or_none(coefficients: &[f64]) -> Option<Vec<(f64, f64)>> {
    let mut c = coefficients.to_vec();
    while c.len() > 1 && *c.last().unwrap() == 0.0 {
        c.pop();
    }
    let d = c.len() - 1;
    if d == 0 {
        return Some(Vec::new());
    }
    let lead = c[d];
    let mut comp = DMatrix::zeros(d, d);
    for i in 1..d {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..d {
        comp[(i, d - 1)] = -c[i] / lead;
    }
    eigenvalues_capped(comp)
}

/// Sorted complex eigenvalues, or `None` if the Schur iteration does not
/// settle within a fixed budget.
fn eigenvalues_capped(m: DMatrix<f64>) -> Option<Vec<(f64, f64)>> {
    let schur = Schur::try_new(m, f64::EPSILON, SCHUR_MAX_ITER)?;
    let mut roots: Vec<(f64, f64)> = schur.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect();
    roots.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    Some(roots)
}

/// Roots of one block's pencil from a first-order linearization:
/// `[[0, I], [ω² − A, −2ωJ]]` (homogeneous) or `J(A + ωI)` (vortex).
fn linearized_roots(a: &DMatrix<f64>, j: &DMatrix<f64>, kind: &PotentialKind, omega: f64) -> Option<Vec<(f64, f64)>> {
    let m = a.nrows();
    let id = DMatrix::<f64>::identity(m, m);
    let lin = match kind {
        PotentialKind::Homogeneous { .. } => {
            let mut l = DMatrix::zeros(2 * m, 2 * m);
            l.view_mut((0, m), (m, m)).copy_from(&id);
            l.view_mut((m, 0), (m, m)).copy_from(&(&id * (omega * omega) - a));
            l.view_mut((m, m), (m, m)).copy_from(&(j * (-2.0 * omega)));
            l
        }
        PotentialKind::Vortex => j * (a + &id * omega),
    };
    eigenvalues_capped(lin)
}

/// Crude bound on the modulus of the roots of a block's pencil.
fn root_bound(a: &DMatrix<f64>, kind: &PotentialKind, omega: f64) -> f64 {
    let norm_inf = |m: &DMatrix<f64>| m.row_iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
    let b = match kind {
        PotentialKind::Homogeneous { .. } => 2.0 * omega.abs() + norm_inf(a).sqrt(),
        PotentialKind::Vortex => norm_inf(&(a + DMatrix::identity(a.nrows(), a.ncols()) * omega)),
    };
    if b > 0.0 && b.is_finite() {
        b
    } else {
        1.0
    }
}

/// Factor `det(A_b + (λ²−ω²)I + 2λωJ_b)` (homogeneous, degree 2m) or
/// `det(A_b + ωI + λJ_b)` (vortex, degree m) of one block.
pub fn block_factor(block: &BlockReport, kind: &PotentialKind, omega: f64) -> PolyFactor {
    let m = block.size;
    let degree = match kind {
        PotentialKind::Homogeneous { .. } => 2 * m,
        PotentialKind::Vortex => m,
    };
    let (a, j) = (&block.a_block, &block.j_block);
    let outer = 2.0 * root_bound(a, kind, omega);
    let extended = interpolate_on_circles(|z| pencil_det(a, j, kind, omega, z), degree, outer);
    let coefficients: Vec<f64> = extended.iter().map(|c| c.hi()).collect();
    let coefficients_low: Vec<f64> = extended.iter().map(|c| c.lo()).collect();
    // The linearization is backward stable on the block itself; the
    // companion matrix inherits the conditioning of the monomial
    // coefficients and is only a fallback.
    let roots = linearized_roots(a, j, kind, omega).or_else(|| companion_or_none(&coefficients)).unwrap_or_default();
    PolyFactor { block_label: block.label.clone(), size: m, degree, coefficients, coefficients_low, roots }
}

/// The dense pencil `A + (λ²−ω²)I + 2λωJ` or `A + ωI + λJ`.
pub fn dense_pencil(op: &StabilityOperator, lambda: f64) -> DMatrix<f64> {
    let dim = op.dim();
    let j = j_matrix(dim / 2);
    let id = DMatrix::<f64>::identity(dim, dim);
    match op.kind {
        PotentialKind::Homogeneous { .. } => {
            &op.a + id * (lambda * lambda - op.omega * op.omega) + j * (2.0 * lambda * op.omega)
        }
        PotentialKind::Vortex => &op.a + id * op.omega + j * lambda,
    }
}

/// `(sign, ln|det|)` of the dense pencil at each sample.
pub fn dense_oracle_log(op: &StabilityOperator, samples: &[f64]) -> Vec<(f64, f64)> {
    samples.iter().map(|&l| log_det(dense_pencil(op, l))).collect()
}

/// Dense determinant of the full pencil at each sample.
pub fn dense_oracle(sys: &RingSystem, kind: &PotentialKind, omega: f64, samples: &[f64]) -> Result<Vec<f64>> {
    let op = crate::dynamics::stability_operator(sys, kind, omega)?;
    Ok(dense_oracle_log(&op, samples).into_iter().map(|(s, l)| s * l.exp()).collect())
}

/// Typical root modulus used to place the oracle samples.
pub fn sample_scale(op: &StabilityOperator) -> f64 {
    let dim = op.dim() as f64;
    let typical = op.a.norm() / dim.sqrt();
    let s = match op.kind {
        PotentialKind::Homogeneous { .. } => (typical + op.omega * op.omega).sqrt(),
        PotentialKind::Vortex => typical + op.omega.abs(),
    };
    if s > 0.0 && s.is_finite() {
        s
    } else {
        1.0
    }
}

/// Chebyshev points of the first kind on `[−2, 2]·scale`.
pub fn chebyshev_samples(scale: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| 2.0 * scale * ((2 * i + 1) as f64 * std::f64::consts::PI / (2 * count) as f64).cos()).collect()
}

/// `|Π factors(λ) / det(λ) − 1|` from log-space values.
fn relative_mismatch(factors: &[PolyFactor], lambda: f64, dense: (f64, f64)) -> f64 {
    let (mut sign, mut log) = (1.0, 0.0);
    for f in factors {
        let (s, l) = f.eval_log(lambda);
        sign *= s;
        log += l;
    }
    if dense.0 == 0.0 || sign == 0.0 {
        return if dense.0 == sign { 0.0 } else { f64::INFINITY };
    }
    (sign * dense.0 * (log - dense.1).exp() - 1.0).abs()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleReport {
    pub scale: f64,
    pub samples: Vec<f64>,
    pub relative_errors: Vec<f64>,
    pub max_relative_error: f64,
    /// Same comparison for the refined factor list, when available.
    pub refined_max_relative_error: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NamedResidual {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl NamedResidual {
    fn new(name: &str, residual: f64, threshold: f64) -> Self {
        Self { name: name.to_string(), residual, threshold, pass: residual <= threshold }
    }
}

/// Block dimensions predicted for a ring system of type `(a, b, c)`: one
/// (n odd) or two (n even) blocks of size `2(b+2c)`, `n/2−2` or `(n−3)/2`
/// blocks of size `4(b+2c)` and one of size `2(a+2b+4c)`. For D_2 the two
/// blocks have sizes `2(b+2c)` and `2(a+b+2c)`.
pub fn intro_degree_profile(n: usize, type_abc: (usize, usize, usize)) -> Vec<usize> {
    let (a, b, c) = type_abc;
    if n == 2 {
        return vec![2 * (b + 2 * c), 2 * (a + b + 2 * c)];
    }
    let mut out = vec![2 * (b + 2 * c)];
    if n % 2 == 0 {
        out.push(2 * (b + 2 * c));
    }
    let middle = if n % 2 == 0 { n / 2 - 2 } else { (n - 3) / 2 };
    out.extend(std::iter::repeat(4 * (b + 2 * c)).take(middle));
    out.push(2 * (a + 2 * b + 4 * c));
    out
}

/// Classical identities at a relative equilibrium.
pub fn classical_checks(sys: &RingSystem, op: &StabilityOperator) -> Vec<NamedResidual> {
    let a = &op.a;
    let an = a.norm();
    let dim = sys.dim();
    let x = sys.config_vector();
    let jx = j_apply(&x);
    let mut dh = DVector::zeros(dim);
    for p in 0..sys.len() {
        dh[2 * p] = 1.0;
    }
    let dv = j_apply(&dh);
    let rel = |v: &DVector<f64>, eig: f64| {
        let av = a * v;
        let denom = (an * v.norm()).max(1e-300);
        (av - v * eig).norm() / denom
    };
    let mut out = vec![
        NamedResidual::new("A Delta_h", rel(&dh, 0.0), 1e-9),
        NamedResidual::new("A Delta_v", rel(&dv, 0.0), 1e-9),
    ];
    let w = op.omega;
    match op.kind {
        PotentialKind::Homogeneous { .. } => {
            let k = op.kind.gradient_homogeneity();
            out.push(NamedResidual::new("A kappa - (2 gamma + 1) omega^2 kappa", rel(&x, k * w * w), 1e-8));
            out.push(NamedResidual::new("A J kappa - omega^2 J kappa", rel(&jx, w * w), 1e-8));
        }
        PotentialKind::Vortex => {
            out.push(NamedResidual::new("A kappa - omega kappa", rel(&x, w), 1e-8));
            out.push(NamedResidual::new("A J kappa + omega J kappa", rel(&jx, -w), 1e-8));
            if let Some(r) = vortex_j_eigen_residual(sys, op) {
                out.push(NamedResidual::new("J maps eigenvectors to eigenvectors", r, 1e-7));
            }
        }
    }
    out
}

/// Eigen-decomposition of `A = M⁻¹H` through the symmetric matrix
/// `M^{-1/2} H M^{-1/2}` (positive masses only).
pub fn operator_eigenpairs(sys: &RingSystem, op: &StabilityOperator) -> Option<Vec<(f64, DVector<f64>)>> {
    if !sys.all_masses_positive() {
        return None;
    }
    let m = sys.mass_diagonal();
    let sq: Vec<f64> = m.iter().map(|x| x.sqrt()).collect();
    let dim = op.dim();
    // H = M A, so M^{-1/2} H M^{-1/2} = M^{1/2} A M^{-1/2}.
    let s = DMatrix::from_fn(dim, dim, |r, c| sq[r] * op.a[(r, c)] / sq[c]);
    let s = (&s + s.transpose()) * 0.5;
    let eig = s.symmetric_eigen();
    Some(
        (0..dim)
            .map(|i| {
                let w = eig.eigenvectors.column(i);
                let v = DVector::from_fn(dim, |r, _| w[r] / sq[r]);
                (eig.eigenvalues[i], v)
            })
            .collect(),
    )
}

/// Largest `‖A(Jv) − μ'(Jv)‖ / (‖A‖_F ‖Jv‖)` over eigenvectors `v`, with
/// `μ'` the best-fitting eigenvalue.
pub fn vortex_j_eigen_residual(sys: &RingSystem, op: &StabilityOperator) -> Option<f64> {
    let pairs = operator_eigenpairs(sys, op)?;
    let an = op.a.norm().max(1e-300);
    Some(
        pairs
            .iter()
            .map(|(_, v)| {
                let jv = j_apply(v);
                let ajv = &op.a * &jv;
                let mu = jv.dot(&ajv) / jv.norm_squared();
                (ajv - &jv * mu).norm() / (an * jv.norm())
            })
            .fold(0.0, f64::max),
    )
}

/// Everything known about the factorization of one stability polynomial.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactorizationReport {
    pub kind: PotentialKind,
    pub omega: f64,
    pub factors: Vec<PolyFactor>,
    /// Factors after splitting the rotation/scaling and translation pairs
    /// (only at a relative equilibrium).
    pub refined_factors: Option<Vec<PolyFactor>>,
    /// Block dimensions (degrees in λ² for the homogeneous case, in λ for vortex).
    pub degree_profile: Vec<usize>,
    pub expected_profile: Vec<usize>,
    pub profile_matches: bool,
    /// Degrees in λ.
    pub lambda_degrees: Vec<usize>,
    pub degree_sum: usize,
    pub expected_degree_sum: usize,
    pub off_block_residual: f64,
    pub sub_block_residuals: Vec<(String, f64)>,
    pub oracle: OracleReport,
    pub oracle_residual: f64,
    pub verified: bool,
    /// Largest relative odd part over factors (homogeneous only).
    pub parity_residual: Option<f64>,
    pub at_relative_equilibrium: bool,
    pub classical_checks: Option<Vec<NamedResidual>>,
    pub flags: Vec<String>,
}

impl FactorizationReport {
    /// Refined factors when available, otherwise the block factors.
    pub fn finest_factors(&self) -> &[PolyFactor] {
        self.refined_factors.as_deref().unwrap_or(&self.factors)
    }
}

/// Transforms, factors every block and validates the product against the
/// dense determinant at Chebyshev samples.
pub fn factorize(sys: &RingSystem, op: &StabilityOperator, basis: &SymBasis) -> Result<FactorizationReport> {
    factorize_with(sys, op, basis, ORACLE_TOL)
}

pub fn factorize_with(
    sys: &RingSystem,
    op: &StabilityOperator,
    basis: &SymBasis,
    oracle_tol: f64,
) -> Result<FactorizationReport> {
    let t = transform(op, basis)?;
    let kind = op.kind;
    let omega = op.omega;
    let factors: Vec<PolyFactor> = t.blocks.iter().map(|b| block_factor(b, &kind, omega)).collect();
    let at_releq = op.is_relative_equilibrium(RELEQ_TOL);
    let mut flags = Vec::new();

    let refined_factors = if at_releq {
        let mut out = Vec::new();
        for bi in 0..t.blocks.len() {
            let subs: Vec<_> = t.sub_blocks.iter().filter(|s| s.0 == bi).collect();
            if !subs.is_empty() && subs.iter().all(|s| s.2) {
                out.extend(subs.iter().map(|s| block_factor(&s.3, &kind, omega)));
            } else {
                out.push(factors[bi].clone());
            }
        }
        Some(out)
    } else {
        flags.push("not a relative equilibrium".to_string());
        None
    };

    let degree_profile: Vec<usize> = t.blocks.iter().map(|b| b.size).collect();
    let expected_profile = intro_degree_profile(sys.n(), sys.type_abc());
    let mut sorted_got = degree_profile.clone();
    let mut sorted_want = expected_profile.clone();
    sorted_got.sort_unstable();
    sorted_want.sort_unstable();
    let lambda_degrees: Vec<usize> = factors.iter().map(|f| f.degree).collect();
    let degree_sum = lambda_degrees.iter().sum();
    let expected_degree_sum = match kind {
        PotentialKind::Homogeneous { .. } => 2 * sys.dim(),
        PotentialKind::Vortex => sys.dim(),
    };

    let scale = sample_scale(op);
    let samples = chebyshev_samples(scale, ORACLE_SAMPLES);
    let dense = dense_oracle_log(op, &samples);
    let mismatch = |fs: &[PolyFactor]| -> Vec<f64> {
        samples.iter().zip(&dense).map(|(&l, &d)| relative_mismatch(fs, l, d)).collect()
    };
    let relative_errors = mismatch(&factors);
    let max_relative_error = relative_errors.iter().copied().fold(0.0, f64::max);
    let refined_max_relative_error = refined_factors.as_ref().map(|fs| mismatch(fs).into_iter().fold(0.0, f64::max));
    let oracle_residual = max_relative_error.max(refined_max_relative_error.unwrap_or(0.0));
    let verified = oracle_residual <= oracle_tol;
    if !verified {
        flags.push("factorization unverified".to_string());
    }

    let parity_residual = match kind {
        PotentialKind::Homogeneous { .. } => {
            Some(factors.iter().chain(refined_factors.iter().flatten()).map(PolyFactor::odd_part).fold(0.0, f64::max))
        }
        PotentialKind::Vortex => None,
    };

    let classical = at_releq.then(|| classical_checks(sys, op));
    if basis.m_orthogonality_partial {
        flags.push("M-orthogonality partial".to_string());
    }

    Ok(FactorizationReport {
        kind,
        omega,
        factors,
        refined_factors,
        profile_matches: sorted_got == sorted_want,
        degree_profile,
        expected_profile,
        lambda_degrees,
        degree_sum,
        expected_degree_sum,
        off_block_residual: t.off_block_residual,
        sub_block_residuals: t.sub_blocks.iter().map(|s| (s.3.label.clone(), s.3.off_block_residual)).collect(),
        oracle: OracleReport { scale, samples, relative_errors, max_relative_error, refined_max_relative_error },
        oracle_residual,
        verified,
        parity_residual,
        at_relative_equilibrium: at_releq,
        classical_checks: classical,
        flags,
    })
}
