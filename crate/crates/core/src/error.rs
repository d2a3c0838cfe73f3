use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
    #[error("singular point at ({u1}, {u2}): |N_h| = {nh:e}")]
    SingularPoint { u1: f64, u2: f64, nh: f64 },
    #[error("characteristic integration stopped at a singular point after {steps} steps")]
    StoppedAtSingular { steps: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("test function violates the tube condition: {0}")]
    TubeViolation(String),
    #[error("kink line leaves the tube |s| <= {s0} (root {root})")]
    TubeTooSmall { s0: f64, root: f64 },
    #[error("no certificate found: {0}")]
    CertificateNotFound(String),
}

pub type Result<T> = std::result::Result<T, Error>;
