//! The real constant `K`, the rotation `γ`, the period lattice and the
//! pole/zero representatives.

use serde_json::json;

use crate::evaluator::{local_pair, Tolerances};
use crate::quadrature::{abelian_integral, tanh_sinh};
use crate::series::SeriesPair;
use crate::{Complex, Error, Result};

/// Immutable record of the lattice data, built once per evaluator.
#[derive(Debug, Clone, PartialEq)]
pub struct DixonConstants {
    /// First positive zero of `cm`, `≈ 1.76663875`.
    pub k: f64,
    /// `exp(2πi/3) = (-1 + i√3)/2`.
    pub gamma: Complex,
    /// Radius `2^{-2/3}` of the disc where the local solution is guaranteed.
    pub r: f64,
    /// Lattice generators `(3K, 3Kγ)`.
    pub periods: (Complex, Complex),
    /// `-K`, `-Kγ`, `-Kγ̄`, indexed by the power of `γ`.
    pub pole_reps: [Complex; 3],
    /// `0`, `-K + Kγ` and `-K + Kγ̄` reduced into the centred cell (`K - Kγ`).
    pub zero_reps: [Complex; 3],
    pub g2: f64,
    pub g3: f64,
}

pub fn gamma() -> Complex {
    Complex::new(-0.5, 3f64.sqrt() / 2.0)
}

impl DixonConstants {
    /// Builds the record from `K` found as the root of `cm` on `(1.5, 2)`.
    pub fn compute(series: &SeriesPair, tol: &Tolerances) -> Result<Self> {
        let k = compute_k_root(series, tol, 1e-14)?;
        Ok(Self::from_k(k))
    }

    pub fn from_k(k: f64) -> Self {
        let g = gamma();
        let gbar = g.conj();
        let kc = Complex::new(k, 0.0);
        Self {
            k,
            gamma: g,
            r: 2f64.powf(-2.0 / 3.0),
            periods: (3.0 * kc, 3.0 * kc * g),
            pole_reps: [-kc, -kc * g, -kc * gbar],
            zero_reps: [Complex::new(0.0, 0.0), -kc + kc * g, kc - kc * g],
            g2: 0.0,
            g3: 1.0 / 27.0,
        }
    }

    /// `γʲ` for `j` taken modulo 3.
    pub fn gamma_pow(&self, j: usize) -> Complex {
        match j % 3 {
            0 => Complex::new(1.0, 0.0),
            1 => self.gamma,
            _ => self.gamma.conj(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let c = |z: Complex| json!({"re": z.re, "im": z.im});
        json!({
            "K": self.k,
            "gamma": c(self.gamma),
            "r": self.r,
            "periods": [c(self.periods.0), c(self.periods.1)],
            "pole_reps": self.pole_reps.iter().copied().map(c).collect::<Vec<_>>(),
            "zero_reps": self.zero_reps.iter().copied().map(c).collect::<Vec<_>>(),
            "g2": self.g2,
            "g3": self.g3,
        })
    }
}

/// `K` as the first positive zero of `cm`: bisection on `[1.5, 2]` followed by
/// Newton steps using `cm' = -sm²`. `cm` is evaluated by halving into the
/// series disc and duplicating back, which needs no lattice data.
pub fn compute_k_root(series: &SeriesPair, tol: &Tolerances, root_tol: f64) -> Result<f64> {
    if root_tol.is_nan() || root_tol < 1e-14 {
        return Err(Error::InvalidArgument(format!(
            "root tolerance {root_tol:e} below 1e-14"
        )));
    }
    let pair = |t: f64| local_pair(series, Complex::new(t, 0.0), tol);
    let (mut lo, mut hi) = (1.5, 2.0);
    if !(pair(lo)?.c.re > 0.0 && pair(hi)?.c.re < 0.0) {
        return Err(Error::BracketFailure { lo, hi });
    }
    while hi - lo > 1e-3 {
        let mid = 0.5 * (lo + hi);
        if pair(mid)?.c.re > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let mut t = 0.5 * (lo + hi);
    for _ in 0..50 {
        let p = pair(t)?;
        let step = p.c.re / (p.s.re * p.s.re);
        let next = t + step;
        t = if next > lo && next < hi {
            next
        } else {
            0.5 * (lo + hi)
        };
        if step.abs() <= 4.0 * f64::EPSILON * t {
            break;
        }
    }
    let residual = pair(t)?.c.norm();
    if residual > root_tol {
        return Err(Error::NewtonNoConvergence {
            best_residual: residual,
        });
    }
    Ok(t)
}

/// `K = ∫₀¹ (1 - σ³)^{-2/3} dσ` by tanh-sinh quadrature.
pub fn compute_k_quadrature(tol: f64) -> Result<f64> {
    if tol.is_nan() || tol < 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "quadrature tolerance {tol:e} below 1e-12"
        )));
    }
    let q = tanh_sinh(|_, tc| Complex::new(k_integrand(tc), 0.0), tol)?;
    Ok(q.value.re)
}

/// `(1 - σ³)^{-2/3}` given the complement `1 - σ`.
pub fn k_integrand(one_minus_sigma: f64) -> f64 {
    let sigma = 1.0 - one_minus_sigma;
    (one_minus_sigma * (1.0 + sigma + sigma * sigma)).powf(-2.0 / 3.0)
}

/// `∫₀^b (1 - σ³)^{-2/3} dσ` for real `b ∈ [-1, 1]`.
pub fn partial_k_integral(b: f64, tol: f64) -> Result<f64> {
    Ok(abelian_integral(Complex::new(b, 0.0), tol)?.re)
}
