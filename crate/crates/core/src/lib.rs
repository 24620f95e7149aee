//! Quantile clocks: time changes `T(t) = int_0^t Q(1 - s/t) dL(s)` driven by
//! a subordinator `L`, with simulation, perfect sampling of the associated
//! Dirichlet-mean laws, inverse design of the driver, and option pricing.

pub mod bdlp;
pub mod clock;
pub mod error;
pub mod extended;
pub mod ggc;
pub mod law;
pub mod mc;
pub mod levy;
pub mod numeric;
pub mod pricing;
pub mod quantiles;
pub mod suite;
pub mod verify;

pub use error::{Error, Result};
pub use extended::ExtendedReal;
pub use law::Law;
pub use quantiles::{QuantileFamily, QuantileFunction, SpecialVariable};
