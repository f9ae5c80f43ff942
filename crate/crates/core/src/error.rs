use crate::Complex;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("argument is not finite: {0}")]
    NonFinite(Complex),

    #[error("series order {order} outside 1..={cap}")]
    InvalidOrder { order: usize, cap: usize },

    #[error("|z| = {modulus} exceeds the series evaluation radius {radius}")]
    RadiusExceeded { modulus: f64, radius: f64 },

    #[error("series of order {order} cannot reach tolerance {tol:e} at |z| = {modulus} (tail estimate {estimate:e})")]
    SeriesTail {
        order: usize,
        tol: f64,
        modulus: f64,
        estimate: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate denominator in {what}: |d| = {magnitude:e}")]
    Degenerate { what: &'static str, magnitude: f64 },

    #[error("root of cm not bracketed on [{lo}, {hi}]")]
    BracketFailure { lo: f64, hi: f64 },

    #[error("quadrature did not converge (error estimate {estimate:e})")]
    QuadratureNoConvergence { estimate: f64 },

    #[error("Newton iteration did not converge (best residual {best_residual:e})")]
    NewtonNoConvergence { best_residual: f64 },

    #[error("{0} lies outside the principal domain of the inverse")]
    InverseDomain(Complex),

    #[error("no non-degenerate evaluation path at {0}")]
    NearSingular(Complex),

    #[error("grid of {nx}x{ny} points exceeds the cap of {cap}")]
    GridTooLarge { nx: usize, ny: usize, cap: usize },

    #[error("cannot parse complex literal {0:?}")]
    Parse(String),
}
