use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A constructor or operation received a parameter outside its range.
    InvalidParameter {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    /// A function was evaluated outside its domain (for instance at vacuum).
    Domain { what: &'static str, value: f64 },
    /// An iterative solve did not converge.
    NoConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },
    /// Density or temperature became nonpositive during a solver step.
    NonPositive {
        cell: usize,
        x: f64,
        t: f64,
        rho: f64,
        theta: f64,
    },
    /// The computational domain does not contain the wave with the required margin.
    Preflight {
        edge: &'static str,
        position: f64,
        limit: f64,
    },
    /// The asymptotic schedule produced an unusable cut-off density.
    Schedule { nu: f64, rho_plus: f64 },
    /// A rate fit could not be computed.
    Fit(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter {
                name,
                value,
                expected,
            } => write!(f, "invalid {name} = {value}: expected {expected}"),
            Error::Domain { what, value } => {
                write!(f, "{what} is undefined at {value}")
            }
            Error::NoConvergence {
                what,
                iterations,
                residual,
            } => write!(
                f,
                "{what} did not converge after {iterations} iterations (residual {residual:e})"
            ),
            Error::NonPositive {
                cell,
                x,
                t,
                rho,
                theta,
            } => write!(
                f,
                "nonpositive state in cell {cell} (x = {x}) at t = {t}: rho = {rho}, theta = {theta}"
            ),
            Error::Preflight {
                edge,
                position,
                limit,
            } => write!(
                f,
                "{edge} reaches x = {position}, beyond the admissible bound {limit}"
            ),
            Error::Schedule { nu, rho_plus } => write!(
                f,
                "schedule gives nu = {nu} >= rho_plus = {rho_plus}; use the practical schedule"
            ),
            Error::Fit(msg) => write!(f, "rate fit failed: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
