//! Algebraic identities on `(sm, cm)` value pairs.
//!
//! Every function here is a rational map on the pair `(s, c) = (sm(z), cm(z))`
//! and fails with [`Error::Degenerate`] when its denominator falls below the
//! given threshold, which happens exactly when the target argument is a pole.

use crate::{Complex, Error, Result};

/// Denominator magnitude below which an identity is treated as singular.
pub const DEFAULT_DENOM_TOL: f64 = 1e-8;

/// `(sm(z), cm(z))` for some argument `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionPair {
    pub s: Complex,
    pub c: Complex,
}

/// `(℘(z), ℘'(z))` for the lattice with `g₂ = 0`, `g₃ = 1/27`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeierstrassValue {
    pub p: Complex,
    pub p_prime: Complex,
}

impl FunctionPair {
    pub fn new(s: Complex, c: Complex) -> Self {
        Self { s, c }
    }

    /// The pair at `z = 0`.
    pub fn origin() -> Self {
        Self::new(Complex::new(0.0, 0.0), Complex::new(1.0, 0.0))
    }

    /// `|s³ + c³ - 1|`.
    pub fn cubic_residual(&self) -> f64 {
        (self.s * self.s * self.s + self.c * self.c * self.c - 1.0).norm()
    }

    /// Largest componentwise distance to `other`.
    pub fn distance(&self, other: &FunctionPair) -> f64 {
        (self.s - other.s).norm().max((self.c - other.c).norm())
    }

    /// Pair at the swapped argument `K - z`.
    pub fn reflect(self) -> Self {
        Self::new(self.c, self.s)
    }
}

impl WeierstrassValue {
    /// `|℘'² - 4℘³ + 1/27|`.
    pub fn ode_residual(&self) -> f64 {
        (self.p_prime * self.p_prime - 4.0 * self.p * self.p * self.p + 1.0 / 27.0).norm()
    }
}

fn guard(what: &'static str, d: Complex, tol: f64) -> Result<()> {
    let magnitude = d.norm();
    if magnitude < tol || !magnitude.is_finite() {
        Err(Error::Degenerate { what, magnitude })
    } else {
        Ok(())
    }
}

/// Pair at `a + z` from the pairs at `a` and at `z`.
///
/// ```text
/// c(a+z) = (c(a)c(z)² - s(a)²s(z)) / (s(a)c(a)s(z)² + c(z))
/// s(a+z) = (s(a) + c(a)²s(z)c(z))  / (s(a)c(a)s(z)² + c(z))
/// ```
pub fn add(a: FunctionPair, z: FunctionPair, denom_tol: f64) -> Result<FunctionPair> {
    let d = a.s * a.c * z.s * z.s + z.c;
    guard("addition", d, denom_tol)?;
    Ok(FunctionPair::new(
        (a.s + a.c * a.c * z.s * z.c) / d,
        (a.c * z.c * z.c - a.s * a.s * z.s) / d,
    ))
}

/// Pair at `2z` from the pair at `z`.
///
/// ```text
/// s(2z) = s(1 + c³) / (c(1 + s³))
/// c(2z) = (c³ - s³) / (c(1 + s³))
/// ```
pub fn duplicate(p: FunctionPair, denom_tol: f64) -> Result<FunctionPair> {
    let s3 = p.s * p.s * p.s;
    let c3 = p.c * p.c * p.c;
    let d = p.c * (1.0 + s3);
    guard("duplication", d, denom_tol)?;
    Ok(FunctionPair::new(p.s * (1.0 + c3) / d, (c3 - s3) / d))
}

/// Pair at `3z` from the pair at `z`.
///
/// ```text
/// D     = c³ - s⁶ + 3s³c³ + s³c⁶
/// s(3z) = sc(2 + c⁶ - s³c³ + s⁶) / D
/// c(3z) = (c⁶ - s³ - 3s³c³ - s⁶c³) / D
/// ```
pub fn triplicate(p: FunctionPair, denom_tol: f64) -> Result<FunctionPair> {
    let s3 = p.s * p.s * p.s;
    let c3 = p.c * p.c * p.c;
    let s6 = s3 * s3;
    let c6 = c3 * c3;
    let d = c3 - s6 + 3.0 * s3 * c3 + s3 * c6;
    guard("triplication", d, denom_tol)?;
    Ok(FunctionPair::new(
        p.s * p.c * (2.0 + c6 - s3 * c3 + s6) / d,
        (c6 - s3 - 3.0 * s3 * c3 - s6 * c3) / d,
    ))
}

/// Pair at `z + 2K`: `s(2K + z) = -c(z)/s(z)`, `c(2K + z) = 1/s(z)`.
pub fn translate_2k(p: FunctionPair, denom_tol: f64) -> Result<FunctionPair> {
    guard("2K translation", p.s, denom_tol)?;
    Ok(FunctionPair::new(-p.c / p.s, 1.0 / p.s))
}

/// `3℘ = s/(1 - c)`, `3℘' = (c + 1)/(c - 1)`.
pub fn to_weierstrass(p: FunctionPair, denom_tol: f64) -> Result<WeierstrassValue> {
    let one_minus_c = 1.0 - p.c;
    guard("Weierstrass map", one_minus_c, denom_tol)?;
    Ok(WeierstrassValue {
        p: p.s / (3.0 * one_minus_c),
        p_prime: -(p.c + 1.0) / (3.0 * one_minus_c),
    })
}

/// `c = (3℘' + 1)/(3℘' - 1)`, `s = 6℘/(1 - 3℘')`.
pub fn from_weierstrass(w: WeierstrassValue, denom_tol: f64) -> Result<FunctionPair> {
    let d = 3.0 * w.p_prime - 1.0;
    guard("inverse Weierstrass map", d, denom_tol)?;
    Ok(FunctionPair::new(
        -6.0 * w.p / d,
        (3.0 * w.p_prime + 1.0) / d,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = DEFAULT_DENOM_TOL;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn origin_is_additive_identity() {
        let z = FunctionPair::new(c(0.3, 0.1), c(0.9, -0.2));
        let sum = add(FunctionPair::origin(), z, TOL).unwrap();
        assert!(sum.distance(&z) < 1e-15);
    }

    #[test]
    fn origin_fixed_by_multiplication() {
        let o = FunctionPair::origin();
        assert_eq!(duplicate(o, TOL).unwrap(), o);
        assert_eq!(triplicate(o, TOL).unwrap(), o);
    }

    #[test]
    fn translate_closes_period() {
        // pair(K) = (1, 0) -> pair(3K) = pair(0)
        let p = translate_2k(FunctionPair::new(c(1.0, 0.0), c(0.0, 0.0)), TOL).unwrap();
        assert!(p.distance(&FunctionPair::origin()) < 1e-15);
    }

    #[test]
    fn weierstrass_at_k() {
        let w = to_weierstrass(FunctionPair::new(c(1.0, 0.0), c(0.0, 0.0)), TOL).unwrap();
        assert!((w.p - 1.0 / 3.0).norm() < 1e-15);
        assert!((w.p_prime + 1.0 / 3.0).norm() < 1e-15);
        // 27(℘'² - 4℘³) = -1
        let lhs = 27.0 * (w.p_prime * w.p_prime - 4.0 * w.p * w.p * w.p);
        assert!((lhs + 1.0).norm() < 1e-14);
        let back = from_weierstrass(w, TOL).unwrap();
        assert!(back.distance(&FunctionPair::new(c(1.0, 0.0), c(0.0, 0.0))) < 1e-15);
    }

    #[test]
    fn degenerate_denominators() {
        let pole_bound = FunctionPair::new(c(-1.0, 0.0), c(2f64.cbrt(), 0.0));
        assert!(matches!(
            duplicate(pole_bound, TOL),
            Err(Error::Degenerate { .. })
        ));
        assert!(matches!(
            to_weierstrass(FunctionPair::origin(), TOL),
            Err(Error::Degenerate { .. })
        ));
        assert!(matches!(
            translate_2k(FunctionPair::origin(), TOL),
            Err(Error::Degenerate { .. })
        ));
        let w = WeierstrassValue {
            p: c(0.0, 0.0),
            p_prime: c(1.0 / 3.0, 0.0),
        };
        assert!(matches!(
            from_weierstrass(w, TOL),
            Err(Error::Degenerate { .. })
        ));
    }

    #[test]
    fn reflect_swaps() {
        let p = FunctionPair::new(c(0.1, 0.0), c(0.2, 0.0));
        assert_eq!(p.reflect(), FunctionPair::new(c(0.2, 0.0), c(0.1, 0.0)));
    }
}
