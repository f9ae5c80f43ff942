//! Exact Taylor coefficients of `sm` and `cm` about the origin.
//!
//! Equating powers of `z` in `s' = c²`, `c' = -s²` gives
//!
//! ```text
//! (n+1)·s_{n+1} =  [zⁿ] c²
//! (n+1)·c_{n+1} = -[zⁿ] s²
//! ```
//!
//! which is run over exact rationals. Only every third coefficient is
//! nonzero (`s` carries `z^{3k+1}`, `c` carries `z^{3k}`), so the binary64
//! evaluation is Horner in `z³`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::json;

use crate::{Complex, Error, Result};

pub const DEFAULT_ORDER: usize = 48;
pub const MAX_ORDER: usize = 64;
/// Radius of the disc on which the truncated series is trusted.
pub const DEFAULT_RADIUS: f64 = 0.5;

const TAIL_GUARD: f64 = 2.0;

/// Taylor coefficients of `s = sm` and `c = cm` through `z^order`.
#[derive(Debug, Clone)]
pub struct SeriesPair {
    order: usize,
    radius: f64,
    s_coeffs: Vec<BigRational>,
    c_coeffs: Vec<BigRational>,
    // s(z) = z·Σ s_fast[k]·(z³)^k,  c(z) = Σ c_fast[k]·(z³)^k
    s_fast: Vec<f64>,
    c_fast: Vec<f64>,
    // ratio-test estimate of the convergence radius
    radius_estimate: Option<f64>,
}

impl SeriesPair {
    pub fn generate(order: usize) -> Result<Self> {
        if order == 0 || order > MAX_ORDER {
            return Err(Error::InvalidOrder {
                order,
                cap: MAX_ORDER,
            });
        }
        let zero = BigRational::zero();
        let mut s = vec![zero.clone(); order + 1];
        let mut c = vec![zero; order + 1];
        c[0] = BigRational::one();
        for n in 0..order {
            let mut cc = BigRational::zero();
            let mut ss = BigRational::zero();
            for k in 0..=n {
                if !c[k].is_zero() && !c[n - k].is_zero() {
                    cc += &c[k] * &c[n - k];
                }
                if !s[k].is_zero() && !s[n - k].is_zero() {
                    ss += &s[k] * &s[n - k];
                }
            }
            let scale = BigRational::from_integer(BigInt::from(n + 1));
            s[n + 1] = cc / &scale;
            c[n + 1] = -ss / scale;
        }

        let to_f64 = |q: &BigRational| q.to_f64().expect("coefficient fits in binary64");
        let s_fast: Vec<f64> = s.iter().skip(1).step_by(3).map(to_f64).collect();
        let c_fast: Vec<f64> = c.iter().step_by(3).map(to_f64).collect();

        let radius_estimate = match s_fast.len() {
            0 | 1 => None,
            len => {
                let ratio = (s_fast[len - 2] / s_fast[len - 1]).abs();
                Some(ratio.cbrt())
            }
        };

        Ok(Self {
            order,
            radius: DEFAULT_RADIUS,
            s_coeffs: s,
            c_coeffs: c,
            s_fast,
            c_fast,
            radius_estimate,
        })
    }

    /// Sets the radius of the disc accepted by [`SeriesPair::eval`].
    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = radius;
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Coefficient of `zⁿ` in `sm`, index `n`.
    pub fn s_coeffs(&self) -> &[BigRational] {
        &self.s_coeffs
    }

    /// Coefficient of `zⁿ` in `cm`, index `n`.
    pub fn c_coeffs(&self) -> &[BigRational] {
        &self.c_coeffs
    }

    /// Convergence radius inferred from the last two nonzero coefficients of `sm`.
    pub fn radius_estimate(&self) -> Option<f64> {
        self.radius_estimate
    }

    /// Estimated truncation error of both series at modulus `modulus`.
    ///
    /// The neglected tail is bounded by a geometric series whose ratio comes
    /// from the measured coefficient decay, with a factor 2 guard.
    pub fn tail_estimate(&self, modulus: f64) -> Option<f64> {
        if modulus == 0.0 {
            return Some(0.0);
        }
        let radius = self.radius_estimate?;
        let q = (modulus / radius).powi(3);
        if q >= 1.0 {
            return None;
        }
        let s_last = self.s_fast.len() - 1;
        let c_last = self.c_fast.len() - 1;
        let s_term = self.s_fast[s_last].abs() * modulus.powi((3 * s_last + 1) as i32);
        let c_term = self.c_fast[c_last].abs() * modulus.powi((3 * c_last) as i32);
        Some(TAIL_GUARD * s_term.max(c_term) * q / (1.0 - q))
    }

    /// Evaluates the truncated series at `z`, returning `(sm(z), cm(z))`.
    pub fn eval(&self, z: Complex, tol: f64) -> Result<(Complex, Complex)> {
        if !z.is_finite() {
            return Err(Error::NonFinite(z));
        }
        let modulus = z.norm();
        if modulus > self.radius {
            return Err(Error::RadiusExceeded {
                modulus,
                radius: self.radius,
            });
        }
        match self.tail_estimate(modulus) {
            Some(estimate) if estimate <= tol => {}
            estimate => {
                return Err(Error::SeriesTail {
                    order: self.order,
                    tol,
                    modulus,
                    estimate: estimate.unwrap_or(f64::INFINITY),
                })
            }
        }
        Ok(self.eval_unchecked(z))
    }

    pub(crate) fn eval_unchecked(&self, z: Complex) -> (Complex, Complex) {
        let z3 = z * z * z;
        let horner = |coeffs: &[f64]| {
            coeffs
                .iter()
                .rev()
                .fold(Complex::new(0.0, 0.0), |acc, &a| acc * z3 + a)
        };
        (z * horner(&self.s_fast), horner(&self.c_fast))
    }

    /// Coefficients as JSON: `[{n, s_num, s_den, c_num, c_den}, ...]` with
    /// decimal integer strings.
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<_> = (0..=self.order)
            .map(|n| {
                let (s, c) = (&self.s_coeffs[n], &self.c_coeffs[n]);
                json!({
                    "n": n,
                    "s_num": s.numer().to_string(),
                    "s_den": s.denom().to_string(),
                    "c_num": c.numer().to_string(),
                    "c_den": c.denom().to_string(),
                })
            })
            .collect();
        serde_json::Value::Array(rows)
    }

    /// Checks `(n+1)·s_{n+1} = [zⁿ]c²` and `(n+1)·c_{n+1} = -[zⁿ]s²` exactly.
    pub fn satisfies_recurrence(&self) -> bool {
        let (s, c) = (&self.s_coeffs, &self.c_coeffs);
        (0..self.order).all(|n| {
            let cc: BigRational = (0..=n).map(|k| &c[k] * &c[n - k]).sum();
            let ss: BigRational = (0..=n).map(|k| &s[k] * &s[n - k]).sum();
            let scale = BigRational::from_integer(BigInt::from(n + 1));
            &s[n + 1] * &scale == cc && &c[n + 1] * &scale == -ss
        })
    }
}
