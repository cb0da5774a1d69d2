//! Double-double arithmetic for polynomial extraction. Monomial
//! coefficients of high-degree factors lose most of their digits in plain
//! `f64`, so determinants, transforms and evaluation run at ~32 digits.

use nalgebra::{Complex, DMatrix};
use twofloat::TwoFloat;

pub(crate) type Dd = TwoFloat;
pub(crate) type Cdd = Complex<TwoFloat>;

pub(crate) fn dd(x: f64) -> Dd {
    TwoFloat::from(x)
}

pub(crate) fn cdd(re: f64, im: f64) -> Cdd {
    Complex::new(dd(re), dd(im))
}

/// `1/x` to double-double accuracy. The crate's `TwoFloat / TwoFloat`
/// computes its correction term without an FMA and is only accurate to
/// `f64` precision, so division goes through one Newton step instead.
pub(crate) fn recip(x: Dd) -> Dd {
    let q = dd(1.0 / x.hi());
    q + q * (dd(1.0) - x * q)
}

/// `1/z` for complex `z`.
pub(crate) fn cinv(z: Cdd) -> Cdd {
    let r = recip(z.re * z.re + z.im * z.im);
    Complex::new(z.re * r, -(z.im * r))
}

fn zero() -> Cdd {
    cdd(0.0, 0.0)
}

fn modulus_hint(z: &Cdd) -> f64 {
    z.re.hi().abs() + z.im.hi().abs()
}

/// Magnitude to double precision.
pub(crate) fn norm(z: &Cdd) -> f64 {
    z.re.hi().hypot(z.im.hi())
}

fn powu(z: Cdd, mut e: usize) -> Cdd {
    let mut base = z;
    let mut acc = cdd(1.0, 0.0);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base;
        }
        base = base * base;
        e >>= 1;
    }
    acc
}

/// The `k`-th roots of unity `exp(2πij/k)`, refined by one Newton step on
/// `z^k = 1` from their `f64` values.
pub(crate) fn roots_of_unity(k: usize) -> Vec<Cdd> {
    (0..k)
        .map(|j| {
            if j == 0 {
                return cdd(1.0, 0.0);
            }
            let (s, c) = (std::f64::consts::TAU * j as f64 / k as f64).sin_cos();
            let z = cdd(c, s);
            let f = powu(z, k) - cdd(1.0, 0.0);
            let df = powu(z, k - 1) * cdd(k as f64, 0.0);
            z - f * cinv(df)
        })
        .collect()
}

/// Determinant by Gaussian elimination with partial pivoting.
pub(crate) fn det(mut m: Vec<Cdd>, size: usize) -> Cdd {
    let mut out = cdd(1.0, 0.0);
    for col in 0..size {
        let pivot = (col..size)
            .max_by(|&a, &b| modulus_hint(&m[a * size + col]).total_cmp(&modulus_hint(&m[b * size + col])))
            .unwrap_or(col);
        if modulus_hint(&m[pivot * size + col]) == 0.0 {
            return zero();
        }
        if pivot != col {
            for c in 0..size {
                m.swap(col * size + c, pivot * size + c);
            }
            out = -out;
        }
        let p = m[col * size + col];
        out = out * p;
        let inv = cinv(p);
        for r in col + 1..size {
            let f = m[r * size + col] * inv;
            if modulus_hint(&f) == 0.0 {
                continue;
            }
            for c in col + 1..size {
                let v = m[col * size + c];
                m[r * size + c] = m[r * size + c] - f * v;
            }
        }
    }
    out
}

/// `a + d·I + e·J` at complex `z`, row-major, with `d`, `e` given per `z`.
pub(crate) fn shifted(a: &DMatrix<f64>, j: &DMatrix<f64>, diag: Cdd, jscale: Cdd) -> Vec<Cdd> {
    let m = a.nrows();
    let mut out = Vec::with_capacity(m * m);
    for r in 0..m {
        for c in 0..m {
            let mut v = cdd(a[(r, c)], 0.0);
            if r == c {
                v = v + diag;
            }
            let jv = j[(r, c)];
            if jv != 0.0 {
                v = v + jscale * cdd(jv, 0.0);
            }
            out.push(v);
        }
    }
    out
}

/// `(sign, ln|p(x)|)` of a real polynomial with ascending double-double
/// coefficients, in reversed form for `|x| > 1`.
pub(crate) fn horner_log(coefficients: &[Dd], x: f64) -> (f64, f64) {
    let degree = coefficients.len().saturating_sub(1);
    let (value, extra) = if x.abs() <= 1.0 {
        let xd = dd(x);
        (coefficients.iter().rev().fold(dd(0.0), |acc, &c| acc * xd + c), 0.0)
    } else {
        let inv = recip(dd(x));
        (coefficients.iter().fold(dd(0.0), |acc, &c| acc * inv + c), degree as f64 * x.abs().ln())
    };
    let v = value.hi();
    if v == 0.0 {
        return (0.0, f64::NEG_INFINITY);
    }
    let flip = x < 0.0 && x.abs() > 1.0 && degree % 2 == 1;
    let sign = if flip { -v.signum() } else { v.signum() };
    (sign, v.abs().ln() + extra)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_unity_are_accurate() {
        for z in roots_of_unity(7) {
            let e = powu(z, 7) - cdd(1.0, 0.0);
            assert!(norm(&e) < 1e-28);
        }
    }

    #[test]
    fn reciprocal_is_double_double_accurate() {
        for x in [3.0, 0.1, -7.25, 1e10] {
            let e = recip(dd(x)) * dd(x) - dd(1.0);
            assert!(e.hi().abs() < 1e-30, "{x}: {e:?}");
        }
    }

    #[test]
    fn determinant_of_small_matrix() {
        let m = vec![cdd(2.0, 0.0), cdd(1.0, 1.0), cdd(0.0, -1.0), cdd(3.0, 0.0)];
        // 6 − (1+i)(−i) = 6 − (1 − i) = 5 + i
        let d = det(m, 2);
        assert!((d.re.hi() - 5.0).abs() < 1e-30 && (d.im.hi() - 1.0).abs() < 1e-30);
    }

    #[test]
    fn horner_matches_direct_evaluation() {
        let c = [dd(-6.0), dd(11.0), dd(-6.0), dd(1.0)];
        for x in [0.5, 2.5, -3.0, 10.0] {
            let (s, l) = horner_log(&c, x);
            let direct = (x - 1.0) * (x - 2.0) * (x - 3.0);
            assert!((s * l.exp() - direct).abs() < 1e-12 * direct.abs().max(1.0));
        }
    }
}
