//! Principal inverse of `sm`.
//!
//! The starting point is the Abelian integral `∫₀^w (1 - σ³)^{-2/3} dσ` along
//! the segment from 0 to `w`, which is holomorphic in the open unit disc.
//! Newton steps `z ← z - (sm(z) - w)/cm(z)²` against the forward evaluator
//! then polish it. The result is the preimage reached continuously along the
//! ray from 0; the other preimages (sm has order three) are not returned.

use crate::quadrature::abelian_integral;
use crate::{Complex, Error, Evaluator, Result};

const MAX_NEWTON: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseResult {
    pub z: Complex,
    /// `|sm(z) - w|`.
    pub residual: f64,
}

/// `sm⁻¹(w)` with the default evaluator.
pub fn sm_inverse(w: Complex, tol: f64) -> Result<InverseResult> {
    sm_inverse_with(Evaluator::global(), w, tol)
}

pub fn sm_inverse_with(ev: &Evaluator, w: Complex, tol: f64) -> Result<InverseResult> {
    if !w.is_finite() {
        return Err(Error::NonFinite(w));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tolerance {tol:e} must be positive"
        )));
    }
    let on_real_segment = w.im == 0.0 && w.re.abs() <= 1.0;
    if w.norm() >= 1.0 && !on_real_segment {
        return Err(Error::InverseDomain(w));
    }

    let mut z = abelian_integral(w, 1e-14)?;
    let residual_at = |z: Complex| -> Result<(f64, Complex, Complex)> {
        let p = ev.pair(z)?;
        Ok(((p.s - w).norm(), p.s, p.c))
    };
    let (mut residual, mut s, mut c) = residual_at(z)?;
    let mut best = (z, residual);

    for _ in 0..MAX_NEWTON {
        if residual <= tol {
            return Ok(InverseResult { z, residual });
        }
        let slope = c * c;
        if slope.norm() == 0.0 {
            break;
        }
        z -= (s - w) / slope;
        (residual, s, c) = residual_at(z)?;
        if residual < best.1 {
            best = (z, residual);
        } else if residual > 2.0 * best.1 {
            // diverging; keep the best iterate
            break;
        }
    }
    if best.1 <= tol {
        Ok(InverseResult {
            z: best.0,
            residual: best.1,
        })
    } else {
        Err(Error::NewtonNoConvergence {
            best_residual: best.1,
        })
    }
}
