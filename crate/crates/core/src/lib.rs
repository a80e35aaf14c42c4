//! Coverage probability of multi-tier heterogeneous cellular networks under
//! Fox's H-function fading.
//!
//! * [`fox_h`] evaluates H-functions and composes them.
//! * [`fading`] builds named fading laws as H-function densities and samples them.
//! * [`coverage`] evaluates coverage under strongest-signal and max-SINR
//!   association for bounded and unbounded path loss.
//! * [`sim`] is an independent Poisson point process Monte Carlo estimator.
//! * [`scenario`] runs sweeps described in a TOML file and writes CSV.

pub mod coverage;
pub mod fading;
pub mod fox_h;
pub mod quad;
pub mod scenario;
pub mod sim;
pub mod special;
