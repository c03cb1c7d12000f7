//! Photon-number statistics of the signal sources.
//!
//! Every [`PhotonStats`] is conditioned on Alice's post-selection; the
//! post-selection probability travels alongside so that callers form
//! unconditional per-slot quantities explicitly.
//!
//! The downconversion formulas are geometric sums over the thermal pair
//! distribution `P(n) = (1 - x) x^n` with `x = tanh²χ`. They are evaluated
//! in rearranged closed forms in which the `1/(1-y)` differences have been
//! combined, so that small `χ` does not lose precision to cancellation.

use serde::{Deserialize, Serialize};

use crate::error::{check, check_unit, RateError, Result};

/// Probabilities that a post-selected signal holds zero, one, or more
/// photons, together with the post-selection probability per slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhotonStats {
    pub s0: f64,
    pub s1: f64,
    pub sm: f64,
    pub p_post: f64,
}

impl PhotonStats {
    /// Expected unconditional multi-photon probability per time slot.
    pub fn unconditional_multi(&self) -> f64 {
        self.p_post * self.sm
    }
}

/// Attenuated laser pulse with phase randomisation: Poissonian photon number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WcpSource {
    mu: f64,
}

impl WcpSource {
    pub fn new(mu: f64) -> Result<Self> {
        check("mu", mu, mu > 0.0, "> 0")?;
        Ok(Self { mu })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }
}

/// Downconversion pair source heralded by a click in Alice's trigger detector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdcSource {
    chi: f64,
    eta_a: f64,
    dark_a: f64,
    eta_c: f64,
}

impl PdcSource {
    /// `chi` is the squeezing parameter, `eta_a` and `dark_a` describe the
    /// trigger detector and `eta_c` the efficiency of coupling the signal
    /// photon into the fiber.
    pub fn new(chi: f64, eta_a: f64, dark_a: f64, eta_c: f64) -> Result<Self> {
        check("chi", chi, chi > 0.0, "> 0")?;
        check_unit("eta_a", eta_a)?;
        check("dark_a", dark_a, (0.0..1.0).contains(&dark_a), "[0, 1)")?;
        check("eta_c", eta_c, eta_c > 0.0 && eta_c <= 1.0, "(0, 1]")?;
        Ok(Self { chi, eta_a, dark_a, eta_c })
    }

    /// Same as [`PdcSource::new`] but parametrised by the mean photon number
    /// per mode, `mu = sinh²χ`.
    pub fn from_mean_photon_number(mu: f64, eta_a: f64, dark_a: f64, eta_c: f64) -> Result<Self> {
        check("mu", mu, mu > 0.0, "> 0")?;
        Self::new(mu.sqrt().asinh(), eta_a, dark_a, eta_c)
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    pub fn eta_a(&self) -> f64 {
        self.eta_a
    }

    pub fn dark_a(&self) -> f64 {
        self.dark_a
    }

    pub fn eta_c(&self) -> f64 {
        self.eta_c
    }

    /// `sinh²χ`, the expected photon number in one mode.
    pub fn mean_photon_number(&self) -> f64 {
        self.chi.sinh().powi(2)
    }

    /// `tanh²χ`, the ratio of the geometric pair distribution.
    fn pair_ratio(&self) -> f64 {
        self.chi.tanh().powi(2)
    }

    /// Unconditional probability per slot that the trigger fires.
    pub fn post_selection_prob(&self) -> f64 {
        let x = self.pair_ratio();
        // 1/cosh²χ = 1 - x
        self.dark_a * (1.0 - x) + self.eta_a * x / (1.0 - (1.0 - self.eta_a) * x)
    }
}

/// A perfect single-photon emitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SinglePhotonSource;

/// Any of the supported signal sources.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Source {
    Wcp(WcpSource),
    Pdc(PdcSource),
    Single(SinglePhotonSource),
}

impl Source {
    pub fn stats(&self) -> Result<PhotonStats> {
        match self {
            Source::Wcp(s) => Ok(wcp_stats(s)),
            Source::Pdc(s) => pdc_stats(s),
            Source::Single(_) => Ok(PhotonStats { s0: 0.0, s1: 1.0, sm: 0.0, p_post: 1.0 }),
        }
    }

    /// Probability, conditioned on post-selection, that at least one signal
    /// photon is registered when each photon independently survives with
    /// probability `eta`. Coupling loss of a downconversion source is folded
    /// in here.
    pub fn signal_detection_prob(&self, eta: f64) -> Result<f64> {
        check_unit("eta", eta)?;
        match self {
            Source::Wcp(s) => Ok(-(-eta * s.mu).exp_m1()),
            Source::Pdc(s) => pdc_signal_detection_prob(s, eta),
            Source::Single(_) => Ok(eta),
        }
    }

    /// Mean photon number (`mu` or `sinh²χ`); `None` for the single-photon source.
    pub fn mean_photon_number(&self) -> Option<f64> {
        match self {
            Source::Wcp(s) => Some(s.mu),
            Source::Pdc(s) => Some(s.mean_photon_number()),
            Source::Single(_) => None,
        }
    }

    /// Copy of this source with the mean photon number replaced.
    pub fn with_mean_photon_number(&self, mu: f64) -> Result<Source> {
        match self {
            Source::Wcp(_) => Ok(Source::Wcp(WcpSource::new(mu)?)),
            Source::Pdc(s) => Ok(Source::Pdc(PdcSource::from_mean_photon_number(
                mu, s.eta_a, s.dark_a, s.eta_c,
            )?)),
            Source::Single(_) => Err(RateError::Config(
                "a single-photon source has no tunable photon number".into(),
            )),
        }
    }
}

impl From<WcpSource> for Source {
    fn from(s: WcpSource) -> Self {
        Source::Wcp(s)
    }
}

impl From<PdcSource> for Source {
    fn from(s: PdcSource) -> Self {
        Source::Pdc(s)
    }
}

impl From<SinglePhotonSource> for Source {
    fn from(s: SinglePhotonSource) -> Self {
        Source::Single(s)
    }
}

pub fn wcp_stats(src: &WcpSource) -> PhotonStats {
    let mu = src.mu;
    let s0 = (-mu).exp();
    let s1 = mu * s0;
    // 1 - (1 + mu) e^{-mu}, written to keep digits for small mu
    let sm = -(-mu).exp_m1() - s1;
    PhotonStats { s0, s1, sm, p_post: 1.0 }
}

pub fn pdc_stats(src: &PdcSource) -> Result<PhotonStats> {
    let x = src.pair_ratio();
    let vac = 1.0 - x;
    let p_post = src.post_selection_prob();
    if !(p_post > 0.0) {
        return Err(RateError::DegenerateSource(p_post));
    }
    let lost = 1.0 - src.eta_c;
    let missed = 1.0 - src.eta_a;
    let d1 = 1.0 - lost * x;
    let d2 = 1.0 - lost * missed * x;

    let s0 = vac * (src.dark_a + lost * src.eta_a * x / (d1 * d2)) / p_post;
    // Σ_n y^n n η_C (1-η_C)^{n-1} = η_C y / (1 - (1-η_C) y)², taken between y = x and y = (1-η_A) x
    let s1 = vac * src.eta_c * src.eta_a * x * (1.0 - lost * lost * missed * x * x)
        / (d1 * d1 * d2 * d2)
        / p_post;
    // Σ_n y^n P(≥2 of n photons coupled) = η_C² y² / ((1 - y)(1 - (1-η_C) y)²)
    let multi = |y: f64| src.eta_c.powi(2) * y * y / ((1.0 - y) * (1.0 - lost * y).powi(2));
    let sm = vac * (multi(x) - multi(missed * x)) / p_post;

    Ok(PhotonStats { s0, s1, sm, p_post })
}

fn pdc_signal_detection_prob(src: &PdcSource, eta: f64) -> Result<f64> {
    let x = src.pair_ratio();
    let p_post = src.post_selection_prob();
    if !(p_post > 0.0) {
        return Err(RateError::DegenerateSource(p_post));
    }
    let through = eta * src.eta_c;
    // Σ_n y^n (1 - (1-η)^n) = η y / ((1 - y)(1 - (1-η) y))
    let detected = |y: f64| through * y / ((1.0 - y) * (1.0 - (1.0 - through) * y));
    let missed = 1.0 - src.eta_a;
    Ok(((1.0 - x) * (detected(x) - detected(missed * x)) / p_post).clamp(0.0, 1.0))
}
