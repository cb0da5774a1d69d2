//! Pair potentials, their derivatives, the stability operator and the
//! relative-equilibrium residual and solver.

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring_geometry::{OrbitKind, RingSystem};

/// Homogeneous power-law potential or logarithmic vortex Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PotentialKind {
    /// `U = 1/(2γ+2) Σ m_i m_j |q_i − q_j|^{2γ+2}`.
    Homogeneous { gamma: f64 },
    /// `H = −Σ m_i m_j ln |q_i − q_j|`.
    Vortex,
}

impl PotentialKind {
    pub const NEWTONIAN_GAMMA: f64 = -1.5;

    pub fn newtonian() -> Self {
        PotentialKind::Homogeneous { gamma: Self::NEWTONIAN_GAMMA }
    }

    pub fn is_newtonian(&self) -> bool {
        matches!(self, PotentialKind::Homogeneous { gamma } if *gamma == Self::NEWTONIAN_GAMMA)
    }

    pub fn is_vortex(&self) -> bool {
        matches!(self, PotentialKind::Vortex)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            PotentialKind::Homogeneous { gamma } if !gamma.is_finite() => {
                Err(Error::InvalidPotential(format!("gamma {gamma} is not finite")))
            }
            PotentialKind::Homogeneous { gamma } if gamma == -1.0 => {
                Err(Error::InvalidPotential("gamma = -1 is excluded".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            _ if self.is_newtonian() => "homogeneous (gamma = -1.5, Newtonian)".into(),
            PotentialKind::Homogeneous { gamma } => format!("homogeneous (gamma = {gamma})"),
            PotentialKind::Vortex => "vortex".into(),
        }
    }

    /// Coefficient `k` with `D²F·q = k·∇F` (Euler's identity for the
    /// degree of homogeneity of the gradient).
    pub fn gradient_homogeneity(&self) -> f64 {
        match *self {
            PotentialKind::Homogeneous { gamma } => 2.0 * gamma + 1.0,
            PotentialKind::Vortex => -1.0,
        }
    }
}

fn point(coords: &[f64], i: usize) -> Vector2<f64> {
    Vector2::new(coords[2 * i], coords[2 * i + 1])
}

fn check_inputs(coords: &[f64], masses: &[f64], kind: &PotentialKind) -> Result<()> {
    kind.validate()?;
    if coords.len() != 2 * masses.len() {
        return Err(Error::SizeMismatch { expected: 2 * masses.len(), found: coords.len() });
    }
    Ok(())
}

fn separation(coords: &[f64], i: usize, j: usize) -> Result<(Vector2<f64>, f64)> {
    let d = point(coords, i) - point(coords, j);
    let r2 = d.norm_squared();
    if r2 == 0.0 || !r2.is_finite() {
        return Err(Error::Collision(format!("points {i} and {j} coincide")));
    }
    Ok((d, r2))
}

/// Potential value for raw coordinates `(x_1, y_1, …)`.
pub fn potential_of(coords: &[f64], masses: &[f64], kind: &PotentialKind) -> Result<f64> {
    check_inputs(coords, masses, kind)?;
    let mut total = 0.0;
    for i in 0..masses.len() {
        for j in i + 1..masses.len() {
            let (_, r2) = separation(coords, i, j)?;
            let mm = masses[i] * masses[j];
            total += match *kind {
                PotentialKind::Homogeneous { gamma } => mm * r2.powf(gamma + 1.0) / (2.0 * gamma + 2.0),
                PotentialKind::Vortex => -mm * 0.5 * r2.ln(),
            };
        }
    }
    Ok(total)
}

/// Gradient for raw coordinates.
pub fn gradient_of(coords: &[f64], masses: &[f64], kind: &PotentialKind) -> Result<DVector<f64>> {
    check_inputs(coords, masses, kind)?;
    let mut g = DVector::zeros(coords.len());
    for i in 0..masses.len() {
        for j in i + 1..masses.len() {
            let (d, r2) = separation(coords, i, j)?;
            let mm = masses[i] * masses[j];
            let f = match *kind {
                PotentialKind::Homogeneous { gamma } => d * (mm * r2.powf(gamma)),
                PotentialKind::Vortex => d * (-mm / r2),
            };
            g[2 * i] += f.x;
            g[2 * i + 1] += f.y;
            g[2 * j] -= f.x;
            g[2 * j + 1] -= f.y;
        }
    }
    Ok(g)
}

/// Analytic Hessian for raw coordinates. Each pair contributes a 2×2 block
/// `K` to both diagonal blocks and `−K` to the two off-diagonal blocks.
pub fn hessian_of(coords: &[f64], masses: &[f64], kind: &PotentialKind) -> Result<DMatrix<f64>> {
    check_inputs(coords, masses, kind)?;
    let dim = coords.len();
    let mut h = DMatrix::zeros(dim, dim);
    for i in 0..masses.len() {
        for j in i + 1..masses.len() {
            let (d, r2) = separation(coords, i, j)?;
            let mm = masses[i] * masses[j];
            let ddt = d * d.transpose();
            let k: Matrix2<f64> = match *kind {
                PotentialKind::Homogeneous { gamma } => {
                    let p = r2.powf(gamma);
                    (Matrix2::identity() * p + ddt * (2.0 * gamma * p / r2)) * mm
                }
                PotentialKind::Vortex => (Matrix2::identity() / r2 - ddt * (2.0 / (r2 * r2))) * (-mm),
            };
            let mut blk = h.view_mut((2 * i, 2 * j), (2, 2));
            blk -= k;
            let mut blk = h.view_mut((2 * j, 2 * i), (2, 2));
            blk -= k;
            let mut blk = h.view_mut((2 * i, 2 * i), (2, 2));
            blk += k;
            let mut blk = h.view_mut((2 * j, 2 * j), (2, 2));
            blk += k;
        }
    }
    Ok(h)
}

fn coords_of(sys: &RingSystem) -> Vec<f64> {
    sys.config_vector().as_slice().to_vec()
}

pub fn potential_value(sys: &RingSystem, kind: &PotentialKind) -> Result<f64> {
    potential_of(&coords_of(sys), sys.masses(), kind)
}

pub fn gradient(sys: &RingSystem, kind: &PotentialKind) -> Result<DVector<f64>> {
    gradient_of(&coords_of(sys), sys.masses(), kind)
}

pub fn hessian(sys: &RingSystem, kind: &PotentialKind) -> Result<DMatrix<f64>> {
    hessian_of(&coords_of(sys), sys.masses(), kind)
}

/// The block-diagonal matrix of quarter turns `[[0, −1], [1, 0]]`.
pub fn j_matrix(points: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * points, 2 * points);
    for p in 0..points {
        j[(2 * p, 2 * p + 1)] = -1.0;
        j[(2 * p + 1, 2 * p)] = 1.0;
    }
    j
}

/// `J·v` without forming J.
pub fn j_apply(v: &DVector<f64>) -> DVector<f64> {
    let mut out = DVector::zeros(v.len());
    for p in 0..v.len() / 2 {
        out[2 * p] = -v[2 * p + 1];
        out[2 * p + 1] = v[2 * p];
    }
    out
}

/// `ω²Mϰ − ∇U` (homogeneous) or `ωMϰ + ∇H` (vortex); zero exactly at a
/// relative equilibrium rotating with angular speed `ω`.
pub fn releq_residual(sys: &RingSystem, kind: &PotentialKind, omega: f64) -> Result<DVector<f64>> {
    let grad = gradient(sys, kind)?;
    let mx = sys.mass_diagonal().component_mul(&sys.config_vector());
    Ok(match kind {
        PotentialKind::Homogeneous { .. } => mx * (omega * omega) - grad,
        PotentialKind::Vortex => mx * omega + grad,
    })
}

/// Residual ∞-norm relative to the larger of the two balancing terms.
pub fn releq_relative_residual(sys: &RingSystem, kind: &PotentialKind, omega: f64) -> Result<f64> {
    let res = releq_residual(sys, kind, omega)?;
    let grad = gradient(sys, kind)?;
    let mx = sys.mass_diagonal().component_mul(&sys.config_vector());
    let speed = match kind {
        PotentialKind::Homogeneous { .. } => omega * omega,
        PotentialKind::Vortex => omega.abs(),
    };
    let scale = grad.amax().max(mx.amax() * speed).max(1e-300);
    Ok(res.amax() / scale)
}

/// `A = M⁻¹D²F(ϰ)` together with the data it was built from.
#[derive(Debug, Clone)]
pub struct StabilityOperator {
    pub a: DMatrix<f64>,
    pub kind: PotentialKind,
    pub omega: f64,
    /// ∞-norm of the relative-equilibrium residual at `omega`.
    pub releq_residual_norm: f64,
    /// Same residual for the opposite rotation sense `−omega`.
    pub releq_residual_norm_reversed: f64,
    /// Residual relative to the balancing terms; used for gating.
    pub releq_relative_residual: f64,
}

impl StabilityOperator {
    pub fn is_relative_equilibrium(&self, tol: f64) -> bool {
        self.releq_relative_residual <= tol
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }
}

pub fn stability_operator(sys: &RingSystem, kind: &PotentialKind, omega: f64) -> Result<StabilityOperator> {
    if !omega.is_finite() {
        return Err(Error::InvalidPotential(format!("omega {omega} is not finite")));
    }
    let mut a = hessian(sys, kind)?;
    for (r, m) in sys.mass_diagonal().iter().enumerate() {
        a.row_mut(r).scale_mut(1.0 / m);
    }
    Ok(StabilityOperator {
        a,
        kind: *kind,
        omega,
        releq_residual_norm: releq_residual(sys, kind, omega)?.amax(),
        releq_residual_norm_reversed: releq_residual(sys, kind, -omega)?.amax(),
        releq_relative_residual: releq_relative_residual(sys, kind, omega)?,
    })
}

/// Outcome of [`solve_releq`].
#[derive(Debug, Clone)]
pub struct ReleqSolution {
    pub system: RingSystem,
    pub radii: Vec<f64>,
    pub omega: f64,
    /// ∞-norm of the full residual at the returned iterate.
    pub residual_norm: f64,
    pub relative_residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

const MAX_ITERATIONS: usize = 50;
const REDUCED_TOL: f64 = 1e-12;

struct Reduced<'a> {
    template: &'a RingSystem,
    kind: PotentialKind,
    free: Vec<usize>,
}

impl Reduced<'_> {
    fn system(&self, x: &[f64]) -> Option<RingSystem> {
        let mut radii: Vec<f64> = self.template.rings().iter().map(|r| r.radius()).collect();
        for (slot, &ring) in self.free.iter().enumerate() {
            radii[ring] = x[1 + slot];
        }
        self.template.with_radii(&radii).ok()
    }

    /// Radial and tangential residual per unit mass at each orbit seed,
    /// plus the matching force scale.
    fn residual(&self, x: &[f64]) -> Option<(DVector<f64>, f64)> {
        let sys = self.system(x)?;
        let res = releq_residual(&sys, &self.kind, x[0]).ok()?;
        let grad = gradient(&sys, &self.kind).ok()?;
        let mut out = Vec::new();
        let mut scale: f64 = 0.0;
        for orbit in sys.orbits().iter().filter(|o| o.kind != OrbitKind::Center) {
            let p = sys.positions()[orbit.seed];
            let radial = p / p.norm();
            let tangential = Vector2::new(-radial.y, radial.x);
            let r = point(res.as_slice(), orbit.seed) / orbit.mass.abs();
            out.push(r.dot(&radial));
            out.push(r.dot(&tangential));
            scale = scale.max(point(grad.as_slice(), orbit.seed).norm() / orbit.mass.abs());
        }
        Some((DVector::from_vec(out), scale))
    }

    fn jacobian(&self, x: &[f64]) -> Option<DMatrix<f64>> {
        let rows = self.residual(x)?.0.len();
        let mut jac = DMatrix::zeros(rows, x.len());
        for c in 0..x.len() {
            let h = 1e-7 * x[c].abs() + 1e-9;
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[c] += h;
            xm[c] -= h;
            let diff = (self.residual(&xp)?.0 - self.residual(&xm)?.0) / (2.0 * h);
            jac.set_column(c, &diff);
        }
        Some(jac)
    }
}

/// Newton (Gauss–Newton on the radial and tangential residuals at one
/// representative point per orbit) for `ω` and the radii of the rings
/// listed in `free`. Fixed radii keep their template values.
pub fn solve_releq(
    template: &RingSystem,
    kind: &PotentialKind,
    free: &[usize],
    omega_guess: Option<f64>,
) -> Result<ReleqSolution> {
    kind.validate()?;
    let non_center: Vec<usize> =
        template.orbits().iter().enumerate().filter(|(_, o)| o.kind != OrbitKind::Center).map(|(i, _)| i).collect();
    let mut free_sorted = free.to_vec();
    free_sorted.sort_unstable();
    free_sorted.dedup();
    for &f in &free_sorted {
        if !non_center.contains(&f) {
            return Err(Error::InvalidIndex(format!("ring {f} has no free radius")));
        }
    }
    if free_sorted.len() >= non_center.len() {
        return Err(Error::InvalidIndex("at least one ring radius must stay fixed to set the length scale".into()));
    }
    let problem = Reduced { template, kind: *kind, free: free_sorted };

    let omega0 = match omega_guess {
        Some(w) => w,
        None => initial_omega(template, kind)?,
    };
    let mut x: Vec<f64> =
        std::iter::once(omega0).chain(problem.free.iter().map(|&r| template.rings()[r].radius())).collect();

    let (mut res, mut scale) =
        problem.residual(&x).ok_or_else(|| Error::SolverStalled("initial configuration is not admissible".into()))?;
    let mut iterations = 0;
    let mut converged = res.amax() <= REDUCED_TOL * scale;
    while !converged && iterations < MAX_ITERATIONS {
        iterations += 1;
        let jac = problem
            .jacobian(&x)
            .ok_or_else(|| Error::SolverStalled("finite-difference step left the admissible set".into()))?;
        let svd = jac.svd(true, true);
        let smax = svd.singular_values.max();
        if smax == 0.0 || svd.singular_values.min() <= 1e-13 * smax {
            return Err(Error::SolverStalled(format!("singular Jacobian at iteration {iterations}")));
        }
        let step =
            svd.solve(&(-&res), 0.0).map_err(|e| Error::SolverStalled(format!("least-squares step failed: {e}")))?;

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + t * b).collect();
            if let Some((r, s)) = problem.residual(&trial) {
                if r.norm() < res.norm() {
                    accepted = Some((trial, r, s));
                    break;
                }
            }
            t *= 0.5;
        }
        match accepted {
            Some((trial, r, s)) => {
                x = trial;
                res = r;
                scale = s;
            }
            None => break,
        }
        converged = res.amax() <= REDUCED_TOL * scale;
    }

    let system = problem.system(&x).ok_or_else(|| Error::SolverStalled("final iterate is not admissible".into()))?;
    let omega = x[0];
    Ok(ReleqSolution {
        radii: system.rings().iter().map(|r| r.radius()).collect(),
        omega,
        residual_norm: releq_residual(&system, kind, omega)?.amax(),
        relative_residual: releq_relative_residual(&system, kind, omega)?,
        iterations,
        converged,
        system,
    })
}

/// ω balancing the radial force at the first ring's seed.
fn initial_omega(sys: &RingSystem, kind: &PotentialKind) -> Result<f64> {
    let grad = gradient(sys, kind)?;
    let orbit = sys
        .orbits()
        .iter()
        .find(|o| o.kind != OrbitKind::Center)
        .ok_or_else(|| Error::InvalidRing("no ring".into()))?;
    let p = sys.positions()[orbit.seed];
    let radial = point(grad.as_slice(), orbit.seed).dot(&p) / (orbit.mass * p.norm_squared());
    Ok(match kind {
        PotentialKind::Homogeneous { .. } => radial.abs().sqrt(),
        PotentialKind::Vortex => -radial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_body_values() {
        let coords = [0.0, 0.0, 1.0, 0.0];
        assert_eq!(potential_of(&coords, &[1.0, 1.0], &PotentialKind::Vortex).unwrap(), 0.0);
        let u = potential_of(&coords, &[1.0, 1.0], &PotentialKind::newtonian()).unwrap();
        assert!((u + 1.0).abs() < 1e-15);
    }

    #[test]
    fn j_squares_to_minus_identity() {
        let j = j_matrix(3);
        assert_eq!(&j * &j, -DMatrix::identity(6, 6));
        assert_eq!(j.transpose(), -&j);
        assert_eq!(j_matrix(1), DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]));
    }

    #[test]
    fn rejects_excluded_gamma_and_collisions() {
        let kind = PotentialKind::Homogeneous { gamma: -1.0 };
        assert!(potential_of(&[0.0, 0.0, 1.0, 0.0], &[1.0, 1.0], &kind).is_err());
        let clash = [0.5, 0.5, 0.5, 0.5];
        assert!(matches!(gradient_of(&clash, &[1.0, 1.0], &PotentialKind::Vortex), Err(Error::Collision(_))));
    }

    #[test]
    fn homogeneity_coefficient() {
        assert_eq!(PotentialKind::newtonian().gradient_homogeneity(), -2.0);
        assert_eq!(PotentialKind::Vortex.gradient_homogeneity(), -1.0);
    }
}
