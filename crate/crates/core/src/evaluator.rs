//! Global evaluation of `sm` and `cm`.
//!
//! The pipeline for an argument `z`:
//!
//! 1. reduce `z` modulo the lattice into the parallelogram centred at 0 with
//!    edges `3K` and `3Kγ`;
//! 2. report a pole when the reduced point is within `pole_tol` of `-Kγʲ`;
//! 3. within `near_tol` of such a pole, rotate by `γ⁻ʲ` so the pole sits at
//!    `-K ≡ 2K`, write the point as `2K + w` and use
//!    `s(2K + w) = -c(w)/s(w)`, `c(2K + w) = 1/s(w)`;
//! 4. otherwise halve into the series disc, sum the series, and duplicate
//!    back up;
//! 5. if a duplication denominator degenerates, retry at `K - z` and swap,
//!    since `s(K - z) = c(z)` and `c(K - z) = s(z)`.

use std::sync::OnceLock;

use crate::constants::DixonConstants;
use crate::identities::{self, FunctionPair};
use crate::par::{self, Execution};
use crate::series::{SeriesPair, DEFAULT_ORDER, DEFAULT_RADIUS};
use crate::{Complex, Error, Result};

const MAX_HALVINGS: u32 = 6;

/// Thresholds steering the evaluation pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Distance to a pole below which the value is reported as a pole.
    pub pole_tol: f64,
    /// Distance to a pole below which the `2K` translation path is taken.
    pub near_tol: f64,
    /// Smallest accepted duplication denominator.
    pub denom_tol: f64,
    /// Truncation error demanded from the series.
    pub series_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            pole_tol: 1e-12,
            near_tol: 0.05,
            denom_tol: identities::DEFAULT_DENOM_TOL,
            series_tol: 1e-16,
        }
    }
}

/// Value of `sm` or `cm`: finite, or a pole with its lattice representative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EllipticValue {
    Finite(Complex),
    Pole { rep: Complex },
}

impl EllipticValue {
    pub fn finite(self) -> Option<Complex> {
        match self {
            EllipticValue::Finite(v) => Some(v),
            EllipticValue::Pole { .. } => None,
        }
    }

    pub fn is_pole(&self) -> bool {
        matches!(self, EllipticValue::Pole { .. })
    }
}

/// `z = z_reduced + m·ω₁ + n·ω₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeReduction {
    pub m: i64,
    pub n: i64,
    pub z_reduced: Complex,
}

/// Closed parallelogram `origin + a·edge1 + b·edge2`, `a, b ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalCell {
    pub origin: Complex,
    pub edge1: Complex,
    pub edge2: Complex,
}

impl FundamentalCell {
    /// The cell with the lattice generators as edges, centred at 0.
    pub fn centred(constants: &DixonConstants) -> Self {
        let (edge1, edge2) = constants.periods;
        Self {
            origin: -(edge1 + edge2) / 2.0,
            edge1,
            edge2,
        }
    }

    /// Coordinates `(a, b)` of `z` with respect to the edges.
    pub fn coordinates(&self, z: Complex) -> (f64, f64) {
        let d = z - self.origin;
        let det = self.edge1.re * self.edge2.im - self.edge1.im * self.edge2.re;
        let a = (d.re * self.edge2.im - d.im * self.edge2.re) / det;
        let b = (self.edge1.re * d.im - self.edge1.im * d.re) / det;
        (a, b)
    }

    pub fn contains(&self, z: Complex, slack: f64) -> bool {
        let (a, b) = self.coordinates(z);
        (-slack..=1.0 + slack).contains(&a) && (-slack..=1.0 + slack).contains(&b)
    }
}

enum Reduced {
    Finite(FunctionPair),
    Pole(Complex),
}

/// Evaluator holding the series, the lattice constants and the thresholds.
#[derive(Debug, Clone)]
pub struct Evaluator {
    series: SeriesPair,
    constants: DixonConstants,
    tol: Tolerances,
}

impl Evaluator {
    pub fn new(order: usize) -> Result<Self> {
        Self::with_tolerances(order, Tolerances::default())
    }

    pub fn with_tolerances(order: usize, tol: Tolerances) -> Result<Self> {
        let series = SeriesPair::generate(order)?.with_radius(DEFAULT_RADIUS);
        let constants = DixonConstants::compute(&series, &tol)?;
        Ok(Self {
            series,
            constants,
            tol,
        })
    }

    /// Shared evaluator with the default order, built on first use.
    pub fn global() -> &'static Evaluator {
        static GLOBAL: OnceLock<Evaluator> = OnceLock::new();
        GLOBAL
            .get_or_init(|| Evaluator::new(DEFAULT_ORDER).expect("default evaluator construction"))
    }

    pub fn constants(&self) -> &DixonConstants {
        &self.constants
    }

    pub fn series(&self) -> &SeriesPair {
        &self.series
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn cell(&self) -> FundamentalCell {
        FundamentalCell::centred(&self.constants)
    }

    pub fn reduce(&self, z: Complex) -> Result<LatticeReduction> {
        if !z.is_finite() {
            return Err(Error::NonFinite(z));
        }
        let (w1, w2) = self.constants.periods;
        // z = a·ω₁ + b·ω₂ with ω₁ real
        let b = z.im / w2.im;
        let a = (z.re - b * w2.re) / w1.re;
        let (m, n) = (a.round(), b.round());
        Ok(LatticeReduction {
            m: m as i64,
            n: n as i64,
            z_reduced: z - w1 * m - w2 * n,
        })
    }

    pub fn sm_cm(&self, z: Complex) -> Result<(EllipticValue, EllipticValue)> {
        Ok(match self.eval(z, true)? {
            Reduced::Finite(p) => (EllipticValue::Finite(p.s), EllipticValue::Finite(p.c)),
            Reduced::Pole(rep) => (EllipticValue::Pole { rep }, EllipticValue::Pole { rep }),
        })
    }

    /// Pair at `z`, or an error if `z` is a pole.
    pub fn pair(&self, z: Complex) -> Result<FunctionPair> {
        match self.eval(z, true)? {
            Reduced::Finite(p) => Ok(p),
            Reduced::Pole(_) => Err(Error::Degenerate {
                what: "pole",
                magnitude: 0.0,
            }),
        }
    }

    pub fn sm(&self, z: Complex) -> Result<EllipticValue> {
        self.sm_cm(z).map(|(s, _)| s)
    }

    pub fn cm(&self, z: Complex) -> Result<EllipticValue> {
        self.sm_cm(z).map(|(_, c)| c)
    }

    /// `℘(z) = s/(3(1 - c))` for `g₂ = 0`, `g₃ = 1/27`.
    ///
    /// Near lattice points `1 - c` is formed as `s³/(1 + c + c²)`, giving
    /// `℘ = (1 + c + c²)/(3s²)`. At the poles of `sm` and `cm` the limit
    /// `-s/(3c)` equals `-p/(3K)` for the pole `p`.
    pub fn wp(&self, z: Complex) -> Result<EllipticValue> {
        let red = self.reduce(z)?;
        if red.z_reduced.norm() < self.tol.pole_tol {
            return Ok(EllipticValue::Pole {
                rep: Complex::new(0.0, 0.0),
            });
        }
        Ok(match self.eval(red.z_reduced, true)? {
            Reduced::Pole(p) => EllipticValue::Finite(-p / (3.0 * self.constants.k)),
            Reduced::Finite(FunctionPair { s, c }) => {
                let one_minus_c = 1.0 - c;
                if one_minus_c.norm() < 0.5 {
                    EllipticValue::Finite((1.0 + c + c * c) / (3.0 * s * s))
                } else {
                    EllipticValue::Finite(s / (3.0 * one_minus_c))
                }
            }
        })
    }

    pub fn sm_cm_batch(
        &self,
        zs: &[Complex],
        exec: Execution,
    ) -> Vec<Result<(EllipticValue, EllipticValue)>> {
        par::map(zs, exec, |&z| self.sm_cm(z))
    }

    fn eval(&self, z: Complex, allow_reflection: bool) -> Result<Reduced> {
        let zr = self.reduce(z)?.z_reduced;
        for (j, &pole) in self.constants.pole_reps.iter().enumerate() {
            let d = (zr - pole).norm();
            if d < self.tol.pole_tol {
                return Ok(Reduced::Pole(pole));
            }
            if d < self.tol.near_tol {
                return self.near_pole(zr, j).map(Reduced::Finite);
            }
        }
        match local_pair(&self.series, zr, &self.tol) {
            Ok(p) => Ok(Reduced::Finite(p)),
            Err(Error::Degenerate { .. }) if allow_reflection => {
                let k = Complex::new(self.constants.k, 0.0);
                match self.eval(k - zr, false) {
                    Ok(Reduced::Finite(p)) => Ok(Reduced::Finite(p.reflect())),
                    Ok(Reduced::Pole(_)) | Err(Error::NearSingular(_)) => {
                        Err(Error::NearSingular(z))
                    }
                    Err(e) => Err(e),
                }
            }
            Err(Error::Degenerate { .. }) => Err(Error::NearSingular(z)),
            Err(e) => Err(e),
        }
    }

    /// `zr` within `near_tol` of the pole `-Kγʲ`.
    fn near_pole(&self, zr: Complex, j: usize) -> Result<FunctionPair> {
        let g = &self.constants;
        let rotation = g.gamma_pow(3 - j);
        let w = rotation * zr + g.k;
        let small = local_pair(&self.series, w, &self.tol)?;
        let shifted = identities::translate_2k(small, f64::MIN_POSITIVE)?;
        Ok(FunctionPair::new(g.gamma_pow(j) * shifted.s, shifted.c))
    }
}

/// `(sm(z), cm(z))` by halving into the series disc and duplicating back.
///
/// Needs no lattice data, so it is only valid where no pole lies on the
/// chain `z, z/2, z/4, ...`; within `|z| < K` that is always the case.
pub(crate) fn local_pair(
    series: &SeriesPair,
    z: Complex,
    tol: &Tolerances,
) -> Result<FunctionPair> {
    let mut w = z;
    let mut halvings = 0;
    while w.norm() > series.radius() {
        if halvings == MAX_HALVINGS {
            return Err(Error::RadiusExceeded {
                modulus: z.norm(),
                radius: series.radius() * f64::from(1 << MAX_HALVINGS),
            });
        }
        w *= 0.5;
        halvings += 1;
    }
    let (s, c) = series.eval(w, tol.series_tol)?;
    let mut pair = FunctionPair::new(s, c);
    for _ in 0..halvings {
        pair = identities::duplicate(pair, tol.denom_tol)?;
    }
    Ok(pair)
}
