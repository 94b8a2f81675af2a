use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("invalid interval [{lo}, {hi}]")]
    Interval { lo: f64, hi: f64 },

    /// Quadrature ran out of subdivision budget; carries what it had.
    #[error("quadrature did not converge: estimate {estimate} with error bound {error_bound}")]
    Quadrature { estimate: f64, error_bound: f64 },

    #[error("no sign change on [{lo}, {hi}] (f(lo) = {f_lo}, f(hi) = {f_hi})")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("series representation refused: {0}")]
    SeriesRefused(String),

    #[error("more than two modes found at {0:?}")]
    TooManyModes(Vec<f64>),

    #[error("profile likelihood undefined at rho = {rho}, mu = {mu}")]
    ProfileUndefined { rho: f64, mu: f64 },

    #[error("information matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("fit failed: {0}")]
    FitFailed(String),

    #[error("cdf value {0} outside [0, 1]")]
    Contract(f64),

    #[error("line {line}: cannot parse {token:?}")]
    Parse { line: usize, token: String },

    #[error("all {0} replications failed")]
    AllReplicationsFailed(usize),
}
