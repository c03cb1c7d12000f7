//! Secure key rate per time slot of BB84 quantum key distribution with
//! realistic sources, lossy fiber and noisy detectors, secure against
//! individual attacks that include photon-number splitting.
//!
//! * [`sources`]: photon-number statistics of weak coherent pulses,
//!   heralded downconversion and ideal single photons.
//! * [`channel`]: fiber transmission, click probabilities and error rate.
//! * [`key_rate`]: error correction, privacy amplification and the gain.
//! * [`optimize`]: optimal mean photon number, analytic bounds, sweeps.
//! * [`pns`]: exact Fock-space check of the photon-number-splitting unitary.
//! * [`scenario`] and [`report`]: experiment presets and CSV/JSON output
//!   used by the `qkd-rate` binary.

pub mod channel;
pub mod error;
pub mod key_rate;
pub mod optimize;
pub mod pns;
pub mod report;
pub mod roots;
pub mod scenario;
pub mod sources;

pub use channel::{click_model, transmission, ClickModel, LinkBudget};
pub use error::{RateError, Result};
pub use key_rate::{
    collision_prob_single, ec_factor, gain_multi, gain_single, hoeffding_confidence, hoeffding_delta,
    shannon_ec_cost, tau1, tau1_multiphoton, EcModel, RatePoint,
};
pub use optimize::{
    bounds, optimize_operating_point, pdc_gain_bound, pdc_optimal_mu, rate_point, sweep,
    wcp_gain_bound, wcp_optimal_mu_approx, OperatingPoint, SweepConfig, SweepResult, SweepRow,
};
pub use sources::{pdc_stats, wcp_stats, PdcSource, PhotonStats, SinglePhotonSource, Source, WcpSource};
