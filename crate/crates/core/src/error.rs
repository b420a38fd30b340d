use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GkpError {
    /// An argument lies outside the domain of the function (e.g. Im(tau) <= 0).
    #[error("domain error: {0}")]
    Domain(String),

    /// A parameter violates a type invariant. `param` names the offending field.
    #[error("range error: {param} = {value} violates {constraint}")]
    Range {
        param: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("series did not converge: needed {needed} terms per side, cap is {cap}")]
    NonConvergence { needed: usize, cap: usize },

    #[error("quadrature did not reach tolerance {tol:e} (estimated error {estimate:e})")]
    Quadrature { tol: f64, estimate: f64 },

    #[error("no solution: {0}")]
    Unsolvable(String),

    #[error("evaluation routes disagree: residual {residual:e} exceeds {threshold:e}")]
    RouteDisagreement { residual: f64, threshold: f64 },
}

pub type Result<T> = std::result::Result<T, GkpError>;

pub(crate) fn check_range(
    param: &'static str,
    value: f64,
    ok: bool,
    constraint: &'static str,
) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(GkpError::Range {
            param,
            value,
            constraint,
        })
    }
}
