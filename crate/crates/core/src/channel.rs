//! Fiber and receiver model: transmission, click probability and the
//! modelled error rate of the sifted key.
//!
//! Dark counts are taken independent of signal clicks. The error model
//! ignores coincidences between dark and signal clicks; `p_exp` itself keeps
//! the exact inclusion-exclusion. `dark_b` is the dark-count probability per
//! gating window of the whole detection unit, not of a single detector.

use serde::{Deserialize, Serialize};

use crate::error::{check, check_unit, RateError, Result};
use crate::sources::Source;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    /// Fiber loss in dB/km.
    pub alpha: f64,
    /// Fiber length in km.
    pub length: f64,
    /// Loss inside Bob's detection unit in dB.
    pub receiver_loss: f64,
    /// Single-photon detection efficiency of Bob's detection unit.
    pub eta_b: f64,
    /// Dark-count probability per time slot.
    pub dark_b: f64,
    /// Fraction of detected signal photons that land in the wrong detector.
    pub c_align: f64,
}

impl LinkBudget {
    pub fn validate(&self) -> Result<()> {
        check("alpha", self.alpha, self.alpha >= 0.0, ">= 0")?;
        check("length", self.length, self.length >= 0.0, ">= 0")?;
        check("receiver_loss", self.receiver_loss, self.receiver_loss >= 0.0, ">= 0")?;
        check("eta_b", self.eta_b, self.eta_b > 0.0 && self.eta_b <= 1.0, "(0, 1]")?;
        check("dark_b", self.dark_b, (0.0..1.0).contains(&self.dark_b), "[0, 1)")?;
        check("c_align", self.c_align, (0.0..=0.5).contains(&self.c_align), "[0, 1/2]")?;
        Ok(())
    }

    pub fn at_length(&self, length: f64) -> Self {
        Self { length, ..*self }
    }

    /// Channel transmission including the receiver loss.
    pub fn transmission(&self) -> f64 {
        transmission(self)
    }

    /// Probability that a single photon leaving Alice is registered by Bob.
    pub fn end_to_end_efficiency(&self) -> f64 {
        self.eta_b * self.transmission()
    }
}

/// `η_T = 10^{-(α l + L_c)/10}`.
pub fn transmission(link: &LinkBudget) -> f64 {
    10f64.powf(-(link.alpha * link.length + link.receiver_loss) / 10.0)
}

/// Click statistics of Bob's detection unit for one post-selected slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClickModel {
    pub p_signal: f64,
    pub p_dark: f64,
    pub p_exp: f64,
    /// Modelled error rate of the sifted key.
    pub e: f64,
}

impl ClickModel {
    /// Combines a signal click probability with dark counts and alignment
    /// errors.
    pub fn from_probabilities(p_signal: f64, dark_b: f64, c_align: f64) -> Result<Self> {
        check_unit("p_signal", p_signal)?;
        check_unit("dark_b", dark_b)?;
        check_unit("c_align", c_align)?;
        let p_exp = p_signal + dark_b - p_signal * dark_b;
        if !(p_exp > 0.0) {
            return Err(RateError::NoClicks);
        }
        let e = ((c_align * p_signal + 0.5 * dark_b) / p_exp).clamp(0.0, 0.5);
        Ok(Self { p_signal, p_dark: dark_b, p_exp, e })
    }
}

pub fn click_model(source: &Source, link: &LinkBudget) -> Result<ClickModel> {
    link.validate()?;
    let p_signal = source.signal_detection_prob(link.end_to_end_efficiency())?;
    ClickModel::from_probabilities(p_signal, link.dark_b, link.c_align)
}
