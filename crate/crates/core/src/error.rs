use thiserror::Error;

/// Failure modes shared by every rate computation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RateError {
    #[error("parameter `{name}` = {value} is outside its domain ({expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("source never post-selects a slot (p_post = {0})")]
    DegenerateSource(f64),
    #[error("detection unit never clicks (p_exp = 0); gain is undefined")]
    NoClicks,
    #[error("no sign change of `{what}` on [{lo}, {hi}]")]
    NoBracket { what: &'static str, lo: f64, hi: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, RateError>;

pub(crate) fn check(name: &'static str, value: f64, ok: bool, expected: &'static str) -> Result<f64> {
    if ok && value.is_finite() {
        Ok(value)
    } else {
        Err(RateError::Domain { name, value, expected })
    }
}

pub(crate) fn check_unit(name: &'static str, value: f64) -> Result<f64> {
    check(name, value, (0.0..=1.0).contains(&value), "[0, 1]")
}
