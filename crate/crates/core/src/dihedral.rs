//! The dihedral group D_n, its standard planar representation and its
//! real irreducible representations.

use std::fmt;

use nalgebra::{DMatrix, Matrix2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `(cos, sin)` of the angle `2π·m/d`, exact at multiples of a quarter turn.
pub(crate) fn turn(m: i64, d: usize) -> (f64, f64) {
    let d = d as i64;
    let m = m.rem_euclid(d);
    if (4 * m) % d == 0 {
        return match 4 * m / d {
            0 => (1.0, 0.0),
            1 => (0.0, 1.0),
            2 => (-1.0, 0.0),
            _ => (0.0, -1.0),
        };
    }
    let angle = std::f64::consts::TAU * m as f64 / d as f64;
    (angle.cos(), angle.sin())
}

/// The element `r^j s^k` of D_n, with `r` the rotation by `2π/n` and `s`
/// the reflection across the x-axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DihedralElement {
    n: usize,
    j: usize,
    k: u8,
}

impl DihedralElement {
    /// Builds `r^j s^k`; `j` is reduced mod `n`.
    pub fn new(n: usize, j: usize, k: u8) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidOrder(n));
        }
        if k > 1 {
            return Err(Error::InvalidIndex(format!("reflection flag {k} is not 0 or 1")));
        }
        Ok(Self { n, j: j % n, k })
    }

    fn raw(n: usize, j: usize, k: u8) -> Self {
        Self { n, j: j % n, k }
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(n, 0, 0)
    }

    pub fn rotation(n: usize, j: usize) -> Result<Self> {
        Self::new(n, j, 0)
    }

    pub fn reflection(n: usize) -> Result<Self> {
        Self::new(n, 0, 1)
    }

    /// All `2n` elements: rotations `r^0..r^{n-1}` first, then `r^j s`.
    pub fn all(n: usize) -> Result<Vec<Self>> {
        if n < 2 {
            return Err(Error::InvalidOrder(n));
        }
        Ok((0..2 * n).map(|i| Self::from_index(n, i)).collect())
    }

    /// Inverse of [`DihedralElement::index`].
    pub fn from_index(n: usize, index: usize) -> Self {
        Self::raw(n, index % n, (index / n) as u8)
    }

    /// Position of the element in [`DihedralElement::all`].
    pub fn index(&self) -> usize {
        self.j + self.n * self.k as usize
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn rotation_exponent(&self) -> usize {
        self.j
    }

    pub fn reflection_flag(&self) -> u8 {
        self.k
    }

    pub fn is_reflection(&self) -> bool {
        self.k == 1
    }

    pub fn is_identity(&self) -> bool {
        self.j == 0 && self.k == 0
    }

    /// Group product `self · other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::GroupOrderMismatch { left: self.n, right: other.n });
        }
        let n = self.n;
        let j = if self.k == 0 { self.j + other.j } else { self.j + n - other.j };
        Ok(Self::raw(n, j, self.k ^ other.k))
    }

    pub fn inverse(&self) -> Self {
        if self.k == 1 {
            *self
        } else {
            Self::raw(self.n, self.n - self.j, 0)
        }
    }
}

impl fmt::Display for DihedralElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.j, self.k) {
            (0, 0) => write!(f, "e"),
            (0, _) => write!(f, "s"),
            (1, 0) => write!(f, "r"),
            (1, _) => write!(f, "r s"),
            (j, 0) => write!(f, "r^{j}"),
            (j, _) => write!(f, "r^{j} s"),
        }
    }
}

/// Matrix of `g` in the standard representation: rotation by `2πj/n`
/// composed with the reflection `diag(1, -1)` when `g` is a reflection.
pub fn standard_rep(n: usize, g: &DihedralElement) -> Result<Matrix2<f64>> {
    if g.n != n {
        return Err(Error::GroupOrderMismatch { left: n, right: g.n });
    }
    Ok(rho_block(n, 1, g))
}

/// Rotation/reflection block of the two-dimensional irrep of index `k`.
pub(crate) fn rho_block(n: usize, k: usize, g: &DihedralElement) -> Matrix2<f64> {
    let (c, s) = turn((k * g.j) as i64, n);
    if g.k == 0 {
        Matrix2::new(c, -s, s, c)
    } else {
        Matrix2::new(c, s, s, -c)
    }
}

/// Real irreducible representations of D_n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IrrepLabel {
    Tau,
    Alpha,
    Phi,
    Psi,
    Rho(usize),
}

impl IrrepLabel {
    pub fn degree(&self) -> usize {
        match self {
            IrrepLabel::Rho(_) => 2,
            _ => 1,
        }
    }

    /// Whether the label names an irrep of D_n.
    pub fn is_valid_for(&self, n: usize) -> bool {
        match *self {
            IrrepLabel::Tau | IrrepLabel::Alpha => n >= 2,
            IrrepLabel::Phi | IrrepLabel::Psi => n >= 2 && n % 2 == 0,
            IrrepLabel::Rho(k) => k >= 1 && k <= max_rho_index(n),
        }
    }

    /// `Rho(1)` is the standard representation for `n > 2`.
    pub fn is_standard(&self, n: usize) -> bool {
        n > 2 && *self == IrrepLabel::Rho(1)
    }

    /// Short ASCII name used in reports and file names.
    pub fn name(&self) -> String {
        match self {
            IrrepLabel::Tau => "tau".into(),
            IrrepLabel::Alpha => "alpha".into(),
            IrrepLabel::Phi => "phi".into(),
            IrrepLabel::Psi => "psi".into(),
            IrrepLabel::Rho(k) => format!("rho{k}"),
        }
    }
}

impl fmt::Display for IrrepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Largest `k` with `Rho(k)` irreducible for D_n.
pub fn max_rho_index(n: usize) -> usize {
    if n % 2 == 0 {
        (n / 2).saturating_sub(1)
    } else {
        (n - 1) / 2
    }
}

/// Complete list of real irreps of D_n: `Tau, Alpha, [Phi, Psi], Rho(1..)`.
pub fn irrep_list(n: usize) -> Result<Vec<IrrepLabel>> {
    if n < 2 {
        return Err(Error::InvalidOrder(n));
    }
    let mut labels = vec![IrrepLabel::Tau, IrrepLabel::Alpha];
    if n % 2 == 0 {
        labels.extend([IrrepLabel::Phi, IrrepLabel::Psi]);
    }
    labels.extend((1..=max_rho_index(n)).map(IrrepLabel::Rho));
    Ok(labels)
}

fn sign(odd: bool) -> f64 {
    if odd {
        -1.0
    } else {
        1.0
    }
}

/// Scalar value of a one-dimensional irrep.
pub(crate) fn character_1d(label: IrrepLabel, g: &DihedralElement) -> f64 {
    match label {
        IrrepLabel::Tau => 1.0,
        IrrepLabel::Alpha => sign(g.k == 1),
        IrrepLabel::Phi => sign(g.j % 2 == 1),
        IrrepLabel::Psi => sign((g.j + g.k as usize) % 2 == 1),
        IrrepLabel::Rho(_) => unreachable!("two-dimensional irrep"),
    }
}

/// Matrix of `g` in the irrep `label` (1×1 or 2×2).
pub fn irrep_matrix(n: usize, label: IrrepLabel, g: &DihedralElement) -> Result<DMatrix<f64>> {
    if n < 2 {
        return Err(Error::InvalidOrder(n));
    }
    if g.n != n {
        return Err(Error::GroupOrderMismatch { left: n, right: g.n });
    }
    if !label.is_valid_for(n) {
        return Err(Error::InvalidIrrep { label: label.name(), n });
    }
    Ok(match label {
        IrrepLabel::Rho(k) => {
            let b = rho_block(n, k, g);
            DMatrix::from_fn(2, 2, |r, c| b[(r, c)])
        }
        other => DMatrix::from_element(1, 1, character_1d(other, g)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(n: usize, j: usize, k: u8) -> DihedralElement {
        DihedralElement::new(n, j, k).unwrap()
    }

    #[test]
    fn composition_examples() {
        assert_eq!(el(4, 2, 0).compose(&el(4, 3, 0)).unwrap(), el(4, 1, 0));
        assert!(el(5, 1, 1).compose(&el(5, 1, 1)).unwrap().is_identity());
        assert_eq!(el(3, 0, 1).compose(&el(3, 1, 0)).unwrap(), el(3, 2, 1));
        assert!(matches!(el(3, 0, 0).compose(&el(4, 0, 0)), Err(Error::GroupOrderMismatch { left: 3, right: 4 })));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(el(6, 2, 0).inverse(), el(6, 4, 0));
        assert_eq!(el(6, 2, 1).inverse(), el(6, 2, 1));
        assert_eq!(el(2, 1, 0).inverse(), el(2, 1, 0));
    }

    #[test]
    fn standard_rep_quarter_turn_is_exact() {
        let m = standard_rep(4, &el(4, 1, 0)).unwrap();
        assert_eq!(m, Matrix2::new(0.0, -1.0, 1.0, 0.0));
        let e = standard_rep(3, &el(3, 3, 0)).unwrap();
        assert_eq!(e, Matrix2::identity());
        let s = standard_rep(7, &el(7, 0, 1)).unwrap();
        assert_eq!(s, Matrix2::new(1.0, 0.0, 0.0, -1.0));
    }

    #[test]
    fn irrep_table_entries() {
        let phi = irrep_matrix(4, IrrepLabel::Phi, &el(4, 1, 0)).unwrap();
        assert_eq!(phi[(0, 0)], -1.0);
        let psi = irrep_matrix(4, IrrepLabel::Psi, &el(4, 1, 1)).unwrap();
        assert_eq!(psi[(0, 0)], 1.0);
        let rho = irrep_matrix(5, IrrepLabel::Rho(2), &el(5, 0, 0)).unwrap();
        assert_eq!(rho, DMatrix::identity(2, 2));
        assert!(irrep_matrix(5, IrrepLabel::Phi, &el(5, 0, 0)).is_err());
    }

    #[test]
    fn irrep_inventory() {
        let l4 = irrep_list(4).unwrap();
        assert_eq!(l4.len(), 5);
        assert_eq!(l4.iter().map(|l| l.degree().pow(2)).sum::<usize>(), 8);
        let l5 = irrep_list(5).unwrap();
        assert_eq!(l5, vec![IrrepLabel::Tau, IrrepLabel::Alpha, IrrepLabel::Rho(1), IrrepLabel::Rho(2)]);
        let l2 = irrep_list(2).unwrap();
        assert!(l2.iter().all(|l| l.degree() == 1) && l2.len() == 4);
        assert!(IrrepLabel::Rho(1).is_standard(5));
        assert!(irrep_list(1).is_err());
    }

    #[test]
    fn display_forms() {
        assert_eq!(el(5, 0, 0).to_string(), "e");
        assert_eq!(el(5, 2, 1).to_string(), "r^2 s");
        assert_eq!(IrrepLabel::Rho(3).to_string(), "rho3");
    }
}
