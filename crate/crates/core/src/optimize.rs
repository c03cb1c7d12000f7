//! Choice of the mean photon number, analytic upper bounds on the gain and
//! rate-versus-distance sweeps.
//!
//! The bounds drop error correction, privacy amplification on single-photon
//! signals and dark counts, keeping only the multi-photon deduction:
//! `G <= ½ (p_exp - S_m)` per slot. Bound 1 keeps fiber loss only, bound 2
//! adds the receiver loss and bound 3 also the detector efficiency. Each is
//! maximised over the mean photon number under its own efficiency.

use serde::{Deserialize, Serialize};

use crate::channel::{click_model, LinkBudget};
use crate::error::{check, RateError, Result};
use crate::key_rate::{gain_multi, EcModel, RatePoint};
use crate::roots::{bisect, log_scan_max};
use crate::sources::Source;

/// Default search bracket for the mean photon number.
pub const DEFAULT_MU_BRACKET: (f64, f64) = (1e-6, 2.0);

const ROOT_XTOL: f64 = 1e-14;
const SCAN_POINTS: usize = 64;
/// Golden-section tolerance on `ln μ`.
const LOG_MU_TOL: f64 = 1e-9;

fn check_eta(eta: f64) -> Result<f64> {
    check("eta", eta, eta > 0.0 && eta <= 1.0, "(0, 1]")
}

/// Root in `(0, 1]` of `η e^{-ημ} - μ e^{-μ}`, the stationary point of
/// [`wcp_gain_bound`].
pub fn wcp_optimal_mu_approx(eta: f64) -> Result<f64> {
    check_eta(eta)?;
    bisect(|mu| eta * (-eta * mu).exp() - mu * (-mu).exp(), 0.0, 1.0, ROOT_XTOL, "wcp optimality")
}

/// `½[(1 + μ) e^{-μ} - e^{-ημ}]` for weak coherent pulses; negative values
/// mean no secure key is possible.
pub fn wcp_gain_bound(mu: f64, eta: f64) -> f64 {
    // same expression as ½(p_signal - S_m), arranged to avoid cancellation
    let p_signal = -(-eta * mu).exp_m1();
    let sm = -(-mu).exp_m1() - mu * (-mu).exp();
    0.5 * (p_signal - sm)
}

/// `(μ_opt, bound)` for weak coherent pulses at efficiency `eta`.
pub fn wcp_optimal_bound(eta: f64) -> Result<(f64, f64)> {
    let mu = wcp_optimal_mu_approx(eta)?;
    Ok((mu, wcp_gain_bound(mu, eta)))
}

/// `½ μ (η/(1 + ημ) - μ/(1 + μ)²)` for downconversion with a perfect
/// trigger, `μ = sinh²χ`. Unconditional per-slot quantity.
pub fn pdc_gain_bound(mu: f64, eta: f64) -> f64 {
    0.5 * mu * (eta / (1.0 + eta * mu) - mu / (1.0 + mu).powi(2))
}

/// Positive root in `(0, 1]` of `-2μ - 2η²μ³ + η(1 + 3μ - μ² + μ³)`, the
/// stationary point of [`pdc_gain_bound`].
pub fn pdc_optimal_mu(eta: f64) -> Result<f64> {
    check_eta(eta)?;
    let cubic = |mu: f64| {
        -2.0 * mu - 2.0 * eta * eta * mu.powi(3) + eta * (1.0 + 3.0 * mu - mu * mu + mu.powi(3))
    };
    bisect(cubic, 0.0, 1.0, ROOT_XTOL, "pdc optimality")
}

pub fn pdc_optimal_bound(eta: f64) -> Result<(f64, f64)> {
    let mu = pdc_optimal_mu(eta)?;
    Ok((mu, pdc_gain_bound(mu, eta)))
}

/// Largest multi-photon envelope reachable by this kind of source at
/// efficiency `eta`.
pub fn source_bound(source: &Source, eta: f64) -> Result<f64> {
    match source {
        Source::Wcp(_) => wcp_optimal_bound(eta).map(|b| b.1),
        Source::Pdc(_) => pdc_optimal_bound(eta).map(|b| b.1),
        Source::Single(_) => Ok(0.5 * check_eta(eta)?),
    }
}

/// Bounds 1, 2 and 3 for `link`.
pub fn bounds(source: &Source, link: &LinkBudget) -> Result<[f64; 3]> {
    link.validate()?;
    let fiber_only = LinkBudget { receiver_loss: 0.0, eta_b: 1.0, ..*link };
    let with_receiver = LinkBudget { eta_b: 1.0, ..*link };
    Ok([
        source_bound(source, fiber_only.end_to_end_efficiency())?,
        source_bound(source, with_receiver.end_to_end_efficiency())?,
        source_bound(source, link.end_to_end_efficiency())?,
    ])
}

/// Gain of `source` sent through `link`.
pub fn rate_point(source: &Source, link: &LinkBudget, ec: &EcModel) -> Result<RatePoint> {
    let stats = source.stats()?;
    let click = click_model(source, link)?;
    gain_multi(&stats, &click, ec)
}

/// Best mean photon number and the rate it achieves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    /// `None` for sources without a tunable photon number.
    pub mu: Option<f64>,
    pub point: RatePoint,
}

/// Maximises the gain over the mean photon number in `bracket`. The gain
/// curve is unimodal in practice; a 64-point logarithmic pre-scan guards
/// against flat or insecure stretches before golden-section refinement.
/// When no photon number is secure, the least negative point is returned
/// with `secure = false`.
pub fn optimize_operating_point(
    source: &Source,
    link: &LinkBudget,
    bracket: (f64, f64),
    ec: &EcModel,
) -> Result<OperatingPoint> {
    let (lo, hi) = bracket;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(RateError::Config(format!("degenerate photon-number bracket ({lo}, {hi})")));
    }
    link.validate()?;
    if let Source::Single(_) = source {
        return Ok(OperatingPoint { mu: None, point: rate_point(source, link, ec)? });
    }
    let gain_at = |mu: f64| {
        source
            .with_mean_photon_number(mu)
            .and_then(|s| rate_point(&s, link, ec))
            .map_or(f64::NAN, |r| r.gain_raw)
    };
    let (mu, _) = log_scan_max(gain_at, lo, hi, SCAN_POINTS, LOG_MU_TOL);
    let point = rate_point(&source.with_mean_photon_number(mu)?, link, ec)?;
    Ok(OperatingPoint { mu: Some(mu), point })
}

/// Parameters of a rate-versus-distance sweep. The length stored in
/// `link` is ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub source: Source,
    pub link: LinkBudget,
    pub lengths: Vec<f64>,
    pub mu_search: (f64, f64),
    pub ec: EcModel,
    pub with_bounds: bool,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lengths.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
            return Err(RateError::Config("sweep lengths must be finite and nonnegative".into()));
        }
        if self.lengths.windows(2).any(|w| w[1] <= w[0]) {
            return Err(RateError::Config("sweep lengths must be strictly increasing".into()));
        }
        let (lo, hi) = self.mu_search;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(RateError::Config(format!("degenerate photon-number bracket ({lo}, {hi})")));
        }
        self.link.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub distance: f64,
    /// Optimised point, or the reason this distance could not be evaluated.
    pub outcome: std::result::Result<OperatingPoint, RateError>,
    pub bounds: Option<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// First distance at which the optimised gain is no longer positive.
    pub fn max_secure_distance(&self) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.outcome.as_ref().map_or(true, |op| !op.point.secure))
            .map(|r| r.distance)
    }
}

pub fn sweep(config: &SweepConfig) -> Result<SweepResult> {
    config.validate()?;
    let rows = config
        .lengths
        .iter()
        .map(|&distance| {
            let link = config.link.at_length(distance);
            let outcome = optimize_operating_point(&config.source, &link, config.mu_search, &config.ec);
            let bounds = if config.with_bounds { bounds(&config.source, &link).ok() } else { None };
            SweepRow { distance, outcome, bounds }
        })
        .collect();
    Ok(SweepResult { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sources::{PdcSource, SinglePhotonSource, WcpSource};

    fn kth(dark_b: f64, c_align: f64) -> LinkBudget {
        LinkBudget { alpha: 0.2, length: 0.0, receiver_loss: 1.0, eta_b: 0.18, dark_b, c_align }
    }

    #[test]
    fn wcp_root_at_unit_efficiency() {
        assert!((wcp_optimal_mu_approx(1.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wcp_root_residual() {
        for eta in [0.5, 0.1, 0.01, 1e-3] {
            let mu = wcp_optimal_mu_approx(eta).unwrap();
            let res = eta * (-eta * mu).exp() - mu * (-mu).exp();
            assert!(res.abs() < 1e-12, "eta={eta} residual {res}");
        }
        let mu = wcp_optimal_mu_approx(0.01).unwrap();
        assert!((mu / 0.01 - 1.0).abs() < 0.02);
        assert!(wcp_optimal_mu_approx(0.0).is_err());
    }

    #[test]
    fn wcp_bound_values() {
        assert!(wcp_gain_bound(1e-12, 1.0).abs() < 1e-12);
        let b = wcp_gain_bound(1.0, 0.0);
        assert!((b - 0.5 * (2.0 * (-1f64).exp() - 1.0)).abs() < 1e-15 && b < 0.0);
        let (_, g) = wcp_optimal_bound(0.01).unwrap();
        assert!((g / 2.5e-5 - 1.0).abs() < 0.1);
    }

    #[test]
    fn pdc_bound_values() {
        assert!((pdc_gain_bound(1.0, 1.0) - 0.125).abs() < 1e-15);
        for mu in [1e-4, 0.1, 1.0, 3.0] {
            assert!(pdc_gain_bound(mu, 0.0) < 0.0);
        }
        assert!((pdc_optimal_mu(1.0).unwrap() - 1.0).abs() < 1e-12);
        let mu = pdc_optimal_mu(1e-3).unwrap();
        assert!((mu / 5e-4 - 1.0).abs() < 0.05);
    }

    #[test]
    fn optimum_is_local_max() {
        let src = Source::Wcp(WcpSource::new(0.1).unwrap());
        let link = kth(2e-4, 0.01).at_length(20.0);
        let ec = EcModel::brassard_salvail();
        let op = optimize_operating_point(&src, &link, DEFAULT_MU_BRACKET, &ec).unwrap();
        let mu = op.mu.unwrap();
        for m in [mu / 2.0, mu * 2.0, mu * 1.01, mu / 1.01] {
            let r = rate_point(&src.with_mean_photon_number(m).unwrap(), &link, &ec).unwrap();
            assert!(r.gain_raw <= op.point.gain_raw);
        }
    }

    #[test]
    fn optimum_close_to_envelope_root_without_noise() {
        let src = Source::Wcp(WcpSource::new(0.1).unwrap());
        let ec = EcModel::ShannonIdeal;
        for length in [60.0, 80.0, 100.0] {
            let link = kth(0.0, 0.0).at_length(length);
            let eta = link.end_to_end_efficiency();
            assert!(eta <= 0.01);
            let op = optimize_operating_point(&src, &link, DEFAULT_MU_BRACKET, &ec).unwrap();
            let approx = wcp_optimal_mu_approx(eta).unwrap();
            assert!((op.mu.unwrap() / approx - 1.0).abs() < 0.05, "{length}: {:?} vs {approx}", op.mu);
        }
    }

    #[test]
    fn dark_counts_lower_the_optimum() {
        // Relevant dark-count levels pull the optimum below the noiseless one,
        // and every optimum sits below the envelope's stationary point.
        // Negligible levels (1e-6) can nudge it up by ~1e-4 relative.
        let src = Source::Wcp(WcpSource::new(0.1).unwrap());
        let ec = EcModel::brassard_salvail();
        let optimum = |dark: f64, length: f64| {
            let link = kth(dark, 0.01).at_length(length);
            optimize_operating_point(&src, &link, DEFAULT_MU_BRACKET, &ec).unwrap().mu.unwrap()
        };
        for length in [0.0, 10.0, 30.0, 50.0] {
            let clean = optimum(0.0, length);
            let approx_only = length == 0.0;
            let approx = wcp_optimal_mu_approx(kth(0.0, 0.0).at_length(length).end_to_end_efficiency()).unwrap();
            assert!(clean < approx);
            if approx_only {
                // dark counts are negligible next to p_signal ~ 1e-2 here
                continue;
            }
            let mut last = clean;
            for dark in [1e-4, 2e-4, 5e-4, 1e-3] {
                let mu = optimum(dark, length);
                assert!(mu <= last, "{length} km, dark {dark}: {mu} > {last}");
                last = mu;
            }
        }
    }

    #[test]
    fn bracket_rescaling_invariance() {
        let src = Source::Wcp(WcpSource::new(0.1).unwrap());
        let link = kth(2e-4, 0.01).at_length(10.0);
        let ec = EcModel::brassard_salvail();
        let base = optimize_operating_point(&src, &link, DEFAULT_MU_BRACKET, &ec).unwrap();
        for bracket in [(1e-7, 2.0), (1e-5, 2.0), (1e-6, 20.0), (1e-6, 0.2)] {
            let op = optimize_operating_point(&src, &link, bracket, &ec).unwrap();
            assert!((op.point.gain_raw - base.point.gain_raw).abs() < 1e-9);
        }
    }

    #[test]
    fn degenerate_bracket() {
        let src = Source::Wcp(WcpSource::new(0.1).unwrap());
        let link = kth(0.0, 0.0);
        for b in [(0.0, 1.0), (1.0, 1.0), (2.0, 1.0)] {
            assert!(matches!(
                optimize_operating_point(&src, &link, b, &EcModel::ShannonIdeal),
                Err(RateError::Config(_))
            ));
        }
    }

    #[test]
    fn bounds_are_ordered() {
        let link = kth(2e-4, 0.01);
        for src in [
            Source::Wcp(WcpSource::new(0.1).unwrap()),
            Source::Pdc(PdcSource::new(0.1, 0.5, 5e-8, 1.0).unwrap()),
            Source::Single(SinglePhotonSource),
        ] {
            let [b1, b2, b3] = bounds(&src, &link).unwrap();
            assert!(b1 >= b2 && b2 >= b3, "{b1} {b2} {b3}");
        }
    }

    #[test]
    fn sweep_marks_and_orders_rows() {
        let cfg = SweepConfig {
            source: Source::Wcp(WcpSource::new(0.1).unwrap()),
            link: kth(2e-4, 0.01),
            lengths: (0..40).map(|i| i as f64 * 5.0).collect(),
            mu_search: DEFAULT_MU_BRACKET,
            ec: EcModel::brassard_salvail(),
            with_bounds: true,
        };
        let res = sweep(&cfg).unwrap();
        assert_eq!(res.rows.len(), 40);
        let gains: Vec<f64> = res.rows.iter().map(|r| r.outcome.as_ref().unwrap().point.gain).collect();
        assert!(gains[0] > 0.0);
        assert!(gains.windows(2).all(|w| w[1] <= w[0]));
        assert!(res.max_secure_distance().is_some());

        let bad = SweepConfig { lengths: vec![5.0, 1.0], ..cfg };
        assert!(sweep(&bad).is_err());
    }
}
