//! D_n-symmetric ring systems: geometry, orbit bookkeeping and the
//! permutation action of the group on points and displacements.

use std::f64::consts::PI;
use std::ops::Range;

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::dihedral::{rho_block, turn, DihedralElement};
use crate::error::{Error, Result};

/// Angular offset of a regular ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    /// Vertices at `2πj/n`.
    Aligned,
    /// Vertices at `π/n + 2πj/n`.
    Staggered,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RingKind {
    Center,
    Regular { radius: f64, phase: Phase },
    Semiregular { radius: f64, half_gap: f64 },
}

/// One orbit of the group action: its shape and the mass (or vorticity)
/// shared by its points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingSpec {
    pub kind: RingKind,
    pub mass: f64,
}

impl RingSpec {
    pub fn center(mass: f64) -> Self {
        Self { kind: RingKind::Center, mass }
    }

    pub fn regular(radius: f64, phase: Phase, mass: f64) -> Self {
        Self { kind: RingKind::Regular { radius, phase }, mass }
    }

    pub fn semiregular(radius: f64, half_gap: f64, mass: f64) -> Self {
        Self { kind: RingKind::Semiregular { radius, half_gap }, mass }
    }

    pub fn radius(&self) -> f64 {
        match self.kind {
            RingKind::Center => 0.0,
            RingKind::Regular { radius, .. } | RingKind::Semiregular { radius, .. } => radius,
        }
    }

    /// Same ring with another radius (no effect on the center).
    pub fn with_radius(&self, r: f64) -> Self {
        let kind = match self.kind {
            RingKind::Center => RingKind::Center,
            RingKind::Regular { phase, .. } => RingKind::Regular { radius: r, phase },
            RingKind::Semiregular { half_gap, .. } => RingKind::Semiregular { radius: r, half_gap },
        };
        Self { kind, mass: self.mass }
    }

    pub fn point_count(&self, n: usize) -> usize {
        match self.kind {
            RingKind::Center => 1,
            RingKind::Regular { .. } => n,
            RingKind::Semiregular { .. } => 2 * n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrbitKind {
    Center,
    Regular,
    Semiregular,
}

/// Bookkeeping for one ring inside a [`RingSystem`].
#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    pub kind: OrbitKind,
    /// Point indices of the orbit (contiguous).
    pub points: Range<usize>,
    pub radius: f64,
    pub mass: f64,
    /// Seed vertex used for the orbit's basis construction.
    pub seed: usize,
    /// Whether the seed lies on the reflection axis of `s`.
    pub seed_on_axis: bool,
}

impl Orbit {
    pub fn size(&self) -> usize {
        self.points.len()
    }

    /// Coordinate range `2·start .. 2·end` in R^{2N}.
    pub fn coords(&self) -> Range<usize> {
        2 * self.points.start..2 * self.points.end
    }
}

/// A D_n-symmetric planar point set with masses.
#[derive(Debug, Clone)]
pub struct RingSystem {
    n: usize,
    rings: Vec<RingSpec>,
    positions: Vec<Vector2<f64>>,
    masses: Vec<f64>,
    orbit_index: Vec<usize>,
    orbits: Vec<Orbit>,
    type_abc: (usize, usize, usize),
    /// `perms[g.index()][i]` is the index of the image of point `i` under `g`.
    perms: Vec<Vec<usize>>,
}

impl RingSystem {
    pub fn build(n: usize, rings: &[RingSpec]) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidOrder(n));
        }
        if rings.is_empty() {
            return Err(Error::InvalidRing("no rings given".into()));
        }
        let centers = rings.iter().filter(|r| r.kind == RingKind::Center).count();
        if centers > 1 {
            return Err(Error::InvalidRing(format!("{centers} center points given; at most one allowed")));
        }
        if centers == rings.len() {
            return Err(Error::InvalidRing("a lone center point is not a ring system (need N >= 2)".into()));
        }

        let mut positions = Vec::new();
        let mut masses = Vec::new();
        let mut orbit_index = Vec::new();
        let mut orbits = Vec::new();
        let mut abc = (0, 0, 0);

        for (ring_id, ring) in rings.iter().enumerate() {
            if !ring.mass.is_finite() || ring.mass == 0.0 {
                return Err(Error::InvalidMass(ring.mass));
            }
            let start = positions.len();
            let (kind, seed_offset, on_axis) = match ring.kind {
                RingKind::Center => {
                    abc.0 += 1;
                    positions.push(Vector2::zeros());
                    (OrbitKind::Center, 0, true)
                }
                RingKind::Regular { radius, phase } => {
                    check_radius(radius, ring_id)?;
                    abc.1 += 1;
                    for j in 0..n {
                        let (c, s) = match phase {
                            Phase::Aligned => turn(j as i64, n),
                            Phase::Staggered => turn(2 * j as i64 + 1, 2 * n),
                        };
                        positions.push(Vector2::new(radius * c, radius * s));
                    }
                    match phase {
                        Phase::Aligned => (OrbitKind::Regular, 0, true),
                        Phase::Staggered if n % 2 == 1 => (OrbitKind::Regular, (n - 1) / 2, true),
                        Phase::Staggered => (OrbitKind::Regular, 0, false),
                    }
                }
                RingKind::Semiregular { radius, half_gap } => {
                    check_radius(radius, ring_id)?;
                    if !(half_gap.is_finite() && half_gap > 0.0 && half_gap < PI / n as f64) {
                        return Err(Error::InvalidHalfGap { half_gap, n });
                    }
                    abc.2 += 1;
                    for j in 0..n {
                        let base = std::f64::consts::TAU * j as f64 / n as f64;
                        for a in [base + half_gap, base - half_gap] {
                            positions.push(Vector2::new(radius * a.cos(), radius * a.sin()));
                        }
                    }
                    (OrbitKind::Semiregular, 0, false)
                }
            };
            let end = positions.len();
            masses.extend(std::iter::repeat(ring.mass).take(end - start));
            orbit_index.extend(std::iter::repeat(ring_id).take(end - start));
            orbits.push(Orbit {
                kind,
                points: start..end,
                radius: ring.radius(),
                mass: ring.mass,
                seed: start + seed_offset,
                seed_on_axis: on_axis,
            });
        }

        let scale = rings.iter().map(RingSpec::radius).fold(0.0, f64::max);
        let tol = 1e-9 * scale;
        check_collisions(&positions, &orbit_index, tol)?;

        let mut sys =
            Self { n, rings: rings.to_vec(), positions, masses, orbit_index, orbits, type_abc: abc, perms: Vec::new() };
        sys.perms = DihedralElement::all(n)?.iter().map(|g| sys.match_permutation(g, tol)).collect::<Result<_>>()?;
        Ok(sys)
    }

    fn match_permutation(&self, g: &DihedralElement, tol: f64) -> Result<Vec<usize>> {
        let m = rho_block(self.n, 1, g);
        let mut perm = vec![0; self.len()];
        for orbit in &self.orbits {
            for i in orbit.points.clone() {
                let image = m * self.positions[i];
                let hit = orbit.points.clone().find(|&p| (self.positions[p] - image).norm() <= tol);
                perm[i] = hit
                    .ok_or_else(|| Error::NotSymmetric(format!("no point matches the image of point {i} under {g}")))?;
            }
        }
        Ok(perm)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of points N.
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Dimension 2N of the displacement space.
    pub fn dim(&self) -> usize {
        2 * self.len()
    }

    pub fn rings(&self) -> &[RingSpec] {
        &self.rings
    }

    pub fn positions(&self) -> &[Vector2<f64>] {
        &self.positions
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn orbit_index(&self) -> &[usize] {
        &self.orbit_index
    }

    pub fn orbits(&self) -> &[Orbit] {
        &self.orbits
    }

    pub fn type_abc(&self) -> (usize, usize, usize) {
        self.type_abc
    }

    pub fn max_radius(&self) -> f64 {
        self.orbits.iter().map(|o| o.radius).fold(0.0, f64::max)
    }

    pub fn all_masses_positive(&self) -> bool {
        self.masses.iter().all(|&m| m > 0.0)
    }

    /// The configuration vector in R^{2N}.
    pub fn config_vector(&self) -> DVector<f64> {
        DVector::from_iterator(self.dim(), self.positions.iter().flat_map(|p| [p.x, p.y]))
    }

    /// Diagonal of the mass matrix M.
    pub fn mass_diagonal(&self) -> DVector<f64> {
        DVector::from_iterator(self.dim(), self.masses.iter().flat_map(|&m| [m, m]))
    }

    pub fn mass_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&self.mass_diagonal())
    }

    /// Permutation of point indices induced by `g`.
    pub fn group_permutation(&self, g: &DihedralElement) -> Result<Vec<usize>> {
        self.check_element(g)?;
        Ok(self.perms[g.index()].clone())
    }

    pub(crate) fn perm(&self, g: &DihedralElement) -> &[usize] {
        &self.perms[g.index()]
    }

    pub(crate) fn check_element(&self, g: &DihedralElement) -> Result<()> {
        if g.order() != self.n {
            return Err(Error::GroupOrderMismatch { left: self.n, right: g.order() });
        }
        Ok(())
    }

    /// Dense matrix of σ_X(g).
    pub fn sigma_x_matrix(&self, g: &DihedralElement) -> Result<DMatrix<f64>> {
        self.check_element(g)?;
        let m = rho_block(self.n, 1, g);
        let mut out = DMatrix::zeros(self.dim(), self.dim());
        for (i, &pi) in self.perm(g).iter().enumerate() {
            out.view_mut((2 * pi, 2 * i), (2, 2)).copy_from(&m);
        }
        Ok(out)
    }

    /// σ_X(g)·v without forming the matrix.
    pub fn sigma_x_apply(&self, g: &DihedralElement, v: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_element(g)?;
        if v.len() != self.dim() {
            return Err(Error::SizeMismatch { expected: self.dim(), found: v.len() });
        }
        let m = rho_block(self.n, 1, g);
        let mut out = DVector::zeros(self.dim());
        for (i, &pi) in self.perm(g).iter().enumerate() {
            let w = m * Vector2::new(v[2 * i], v[2 * i + 1]);
            out[2 * pi] = w.x;
            out[2 * pi + 1] = w.y;
        }
        Ok(out)
    }

    /// Accumulates `Σ_g weights[g.index()] · σ_X(g)` into a dense matrix.
    pub(crate) fn group_sum_matrix(&self, weights: &[f64]) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.dim(), self.dim());
        for (idx, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let g = DihedralElement::from_index(self.n, idx);
            let m: Matrix2<f64> = rho_block(self.n, 1, &g) * w;
            for (i, &pi) in self.perm(&g).iter().enumerate() {
                let mut blk = out.view_mut((2 * pi, 2 * i), (2, 2));
                blk += m;
            }
        }
        out
    }

    /// `Σ_g weights[g.index()] · σ_X(g) v` without forming matrices.
    pub(crate) fn group_sum_apply(&self, weights: &[f64], v: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.dim());
        for (idx, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let g = DihedralElement::from_index(self.n, idx);
            let m: Matrix2<f64> = rho_block(self.n, 1, &g) * w;
            for (i, &pi) in self.perm(&g).iter().enumerate() {
                let x = m * Vector2::new(v[2 * i], v[2 * i + 1]);
                out[2 * pi] += x.x;
                out[2 * pi + 1] += x.y;
            }
        }
        out
    }

    /// Copy of the system with one point's mass replaced. Breaks the mass
    /// symmetry on purpose; only meant for negative-control checks.
    #[doc(hidden)]
    pub fn with_perturbed_mass(&self, point: usize, mass: f64) -> Self {
        let mut out = self.clone();
        out.masses[point] = mass;
        out
    }

    /// Same rings with new radii (`radii[i]` for ring `i`; the center ignores it).
    pub fn with_radii(&self, radii: &[f64]) -> Result<Self> {
        if radii.len() != self.rings.len() {
            return Err(Error::SizeMismatch { expected: self.rings.len(), found: radii.len() });
        }
        let rings: Vec<_> = self.rings.iter().zip(radii).map(|(r, &x)| r.with_radius(x)).collect();
        Self::build(self.n, &rings)
    }
}

fn check_radius(radius: f64, ring: usize) -> Result<()> {
    if radius.is_finite() && radius > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidRing(format!("ring {ring}: radius {radius} must be positive and finite")))
    }
}

fn check_collisions(points: &[Vector2<f64>], orbit_index: &[usize], tol: f64) -> Result<()> {
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if (points[i] - points[j]).norm() <= tol {
                return Err(Error::Collision(format!(
                    "point {i} (ring {}) coincides with point {j} (ring {})",
                    orbit_index[i], orbit_index[j]
                )));
            }
        }
    }
    Ok(())
}
