//! Shared fixtures for the integration tests: the random ring-system grid
//! and small independent reference computations.
#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ringfactor_core::*;

/// One system of the test grid together with its type.
pub struct GridCase {
    pub n: usize,
    pub abc: (usize, usize, usize),
    pub system: RingSystem,
    /// A rotation rate that is not a relative equilibrium for the system.
    pub omega: f64,
}

/// n = 2..=12, a ∈ {0, 1}, b, c ∈ {0, 1, 2}, b + c > 0. Masses, radii,
/// phases and gaps are drawn from a fixed seed so runs are reproducible.
pub fn grid() -> Vec<GridCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut out = Vec::new();
    for n in 2..=12 {
        for a in 0..=1 {
            for b in 0..=2 {
                for c in 0..=2 {
                    if b + c == 0 {
                        continue;
                    }
                    let system = random_system(&mut rng, n, (a, b, c));
                    let omega = rng.gen_range(0.5..1.5);
                    out.push(GridCase { n, abc: (a, b, c), system, omega });
                }
            }
        }
    }
    out
}

pub fn random_system(rng: &mut ChaCha8Rng, n: usize, (a, b, c): (usize, usize, usize)) -> RingSystem {
    let mut rings = Vec::new();
    if a == 1 {
        rings.push(RingSpec::center(rng.gen_range(0.5..2.0)));
    }
    let mut r = 1.0;
    for _ in 0..b {
        r += rng.gen_range(0.3..0.8);
        let phase = if rng.gen_bool(0.5) { Phase::Aligned } else { Phase::Staggered };
        rings.push(RingSpec::regular(r, phase, rng.gen_range(0.5..2.0)));
    }
    for _ in 0..c {
        r += rng.gen_range(0.3..0.8);
        let gap = rng.gen_range(0.1..0.9) * PI / n as f64;
        rings.push(RingSpec::semiregular(r, gap, rng.gen_range(0.5..2.0)));
    }
    RingSystem::build(n, &rings).expect("grid system")
}

pub fn kinds() -> [PotentialKind; 2] {
    [PotentialKind::newtonian(), PotentialKind::Vortex]
}

pub fn equal_mass_ngon(n: usize) -> RingSystem {
    RingSystem::build(n, &[RingSpec::regular(1.0, Phase::Aligned, 1.0)]).unwrap()
}

/// Pair-sum potential written out independently of the library.
pub fn reference_potential(coords: &[f64], masses: &[f64], kind: &PotentialKind) -> f64 {
    let mut total = 0.0;
    for i in 0..masses.len() {
        for j in 0..i {
            let r = (coords[2 * i] - coords[2 * j]).hypot(coords[2 * i + 1] - coords[2 * j + 1]);
            let mm = masses[i] * masses[j];
            total += match *kind {
                PotentialKind::Homogeneous { gamma } => mm * r.powf(2.0 * gamma + 2.0) / (2.0 * gamma + 2.0),
                PotentialKind::Vortex => -mm * r.ln(),
            };
        }
    }
    total
}

/// Central-difference Hessian of [`reference_potential`].
pub fn fd_hessian(sys: &RingSystem, kind: &PotentialKind, h: f64) -> DMatrix<f64> {
    let x0: Vec<f64> = sys.config_vector().iter().copied().collect();
    let m = sys.masses();
    let f = |x: &[f64]| reference_potential(x, m, kind);
    let dim = x0.len();
    let mut out = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..=i {
            let eval = |si: f64, sj: f64| {
                let mut x = x0.clone();
                x[i] += si * h;
                x[j] += sj * h;
                f(&x)
            };
            let v = (eval(1.0, 1.0) - eval(1.0, -1.0) - eval(-1.0, 1.0) + eval(-1.0, -1.0)) / (4.0 * h * h);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    out
}

/// Singular-value rank.
pub fn svd_rank(m: &DMatrix<f64>, tol: f64) -> usize {
    m.clone().svd(false, false).singular_values.iter().filter(|&&s| s > tol).count()
}

/// `(sign, ln|det|)` of a dense real matrix via LU.
pub fn log_det(m: DMatrix<f64>) -> (f64, f64) {
    let lu = m.lu();
    let u = lu.u();
    let mut sign = if lu.p().determinant::<f64>() < 0.0 { -1.0 } else { 1.0 };
    let mut log = 0.0;
    for i in 0..u.nrows() {
        let d = u[(i, i)];
        if d == 0.0 {
            return (0.0, f64::NEG_INFINITY);
        }
        sign *= d.signum();
        log += d.abs().ln();
    }
    (sign, log)
}

/// The stability pencil written out directly: `A + (λ²−ω²)I + 2λωJ` or
/// `A + ωI + λJ`.
pub fn pencil(a: &DMatrix<f64>, kind: &PotentialKind, omega: f64, lambda: f64) -> DMatrix<f64> {
    let dim = a.nrows();
    let j = j_matrix(dim / 2);
    let id = DMatrix::<f64>::identity(dim, dim);
    match kind {
        PotentialKind::Homogeneous { .. } => a + id * (lambda * lambda - omega * omega) + j * (2.0 * lambda * omega),
        PotentialKind::Vortex => a + id * omega + j * lambda,
    }
}

/// Relative eigen-residual `‖Av − μv‖ / (‖A‖_F ‖v‖)`.
pub fn eigen_residual(a: &DMatrix<f64>, v: &DVector<f64>, mu: f64) -> f64 {
    (a * v - v * mu).norm() / (a.norm() * v.norm())
}

/// Translation along x of every point.
pub fn horizontal_translation(sys: &RingSystem) -> DVector<f64> {
    DVector::from_fn(sys.dim(), |r, _| if r % 2 == 0 { 1.0 } else { 0.0 })
}
