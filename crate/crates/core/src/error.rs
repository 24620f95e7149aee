use thiserror::Error;

/// Every fallible operation in the crate reports through this type.
/// The `op` field names the public operation that failed.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{op}: argument out of domain: {msg}")]
    Domain { op: &'static str, msg: String },

    #[error("{op}: invalid input: {msg}")]
    InvalidInput { op: &'static str, msg: String },

    #[error("{op}: unsupported law: {msg}")]
    Unsupported { op: &'static str, msg: String },

    #[error("{op}: quadrature did not converge (estimated error {achieved:.3e}, target {target:.3e})")]
    Quadrature {
        op: &'static str,
        achieved: f64,
        target: f64,
    },

    #[error("{op}: sampler stuck after {proposals} proposals (acceptance rate {acceptance:.3e})")]
    SamplerStuck {
        op: &'static str,
        proposals: u64,
        acceptance: f64,
    },

    #[error("{op}: precondition violated: {msg}")]
    Precondition { op: &'static str, msg: String },

    #[error("{op}: divergence: {msg}")]
    Divergence { op: &'static str, msg: String },

    #[error("{op}: target is not self-decomposable: {msg}")]
    NotSelfDecomposable { op: &'static str, msg: String },

    #[error("{op}: degenerate split: {msg}")]
    DegenerateSplit { op: &'static str, msg: String },

    #[error("{op}: envelope failure: {msg}")]
    EnvelopeFailure { op: &'static str, msg: String },

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain { op, msg: msg.into() }
    }
    pub(crate) fn invalid(op: &'static str, msg: impl Into<String>) -> Self {
        Error::InvalidInput { op, msg: msg.into() }
    }
    pub(crate) fn unsupported(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Unsupported { op, msg: msg.into() }
    }
    pub(crate) fn precondition(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Precondition { op, msg: msg.into() }
    }

    /// True for errors caused by bad user-supplied parameters rather than
    /// by a numerical or sampling failure.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. }
                | Error::InvalidInput { .. }
                | Error::Unsupported { .. }
                | Error::Precondition { .. }
                | Error::NotSelfDecomposable { .. }
                | Error::DegenerateSplit { .. }
                | Error::Config(_)
        )
    }
}

/// Collects the first error raised inside an `f64`-valued closure, so that
/// fallible inner computations can be threaded through quadrature.
pub(crate) struct Trap(std::cell::RefCell<Option<Error>>);

impl Trap {
    pub(crate) fn new() -> Self {
        Trap(std::cell::RefCell::new(None))
    }

    pub(crate) fn catch(&self, r: Result<f64>) -> f64 {
        match r {
            Ok(v) => v,
            Err(e) => {
                let mut slot = self.0.borrow_mut();
                if slot.is_none() {
                    *slot = Some(e);
                }
                f64::NAN
            }
        }
    }

    /// The trapped error wins over whatever the outer computation reported.
    pub(crate) fn finish<T>(self, r: Result<T>) -> Result<T> {
        match self.0.into_inner() {
            Some(e) => Err(e),
            None => r,
        }
    }
}
