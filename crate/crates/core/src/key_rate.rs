//! Error-correction cost, privacy-amplification shrinking and the secure
//! gain per time slot.
//!
//! All gains are asymptotic (long-key limit). The security parameter and
//! the collision probability of the whole key only fix how much extra is
//! removed beyond the fractions computed here, and vanish per bit in that
//! limit; finite statistics enter only through [`hoeffding_delta`].

use serde::{Deserialize, Serialize};

use crate::channel::ClickModel;
use crate::error::{check, check_unit, RateError, Result};
use crate::roots::bisect;
use crate::sources::PhotonStats;

/// Reconciliation overhead relative to the Shannon limit reported for the
/// bidirectional Brassard–Salvail protocol.
pub const BRASSARD_SALVAIL_TABLE: [(f64, f64); 4] =
    [(0.01, 1.16), (0.05, 1.16), (0.1, 1.22), (0.15, 1.35)];

/// How many redundant bits error correction spends, as a multiple `f[e]`
/// of the Shannon limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EcModel {
    /// `f[e] = 1`.
    ShannonIdeal,
    /// Piecewise-linear through `(e, f[e])` points, constant beyond the ends.
    Table(Vec<(f64, f64)>),
}

impl Default for EcModel {
    fn default() -> Self {
        Self::brassard_salvail()
    }
}

impl EcModel {
    pub fn brassard_salvail() -> Self {
        EcModel::Table(BRASSARD_SALVAIL_TABLE.to_vec())
    }

    pub fn from_table(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(RateError::Config("empty error-correction table".into()));
        }
        for &(e, f) in &points {
            check_unit("table e", e)?;
            check("table f[e]", f, f >= 1.0, ">= 1")?;
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(RateError::Config("table error rates must be strictly increasing".into()));
        }
        Ok(EcModel::Table(points))
    }

    pub fn factor(&self, e: f64) -> f64 {
        ec_factor(self, e)
    }
}

pub fn ec_factor(model: &EcModel, e: f64) -> f64 {
    let table = match model {
        EcModel::ShannonIdeal => return 1.0,
        EcModel::Table(t) => t,
    };
    let (first, last) = (table[0], table[table.len() - 1]);
    if e <= first.0 {
        return first.1;
    }
    if e >= last.0 {
        return last.1;
    }
    let i = table.partition_point(|&(x, _)| x <= e);
    let (x0, y0) = table[i - 1];
    let (x1, y1) = table[i];
    if e == x0 {
        return y0;
    }
    y0 + (y1 - y0) * (e - x0) / (x1 - x0)
}

/// `x log2 x`, continued by 0 at `x = 0`.
fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// Shannon limit of redundant bits per sifted bit: the binary entropy of `e`.
pub fn shannon_ec_cost(e: f64) -> f64 {
    -xlog2x(e) - xlog2x(1.0 - e)
}

/// Collision probability of Eve's bit value for a single-photon signal
/// observed at error rate `e`.
pub fn collision_prob_single(e: f64) -> f64 {
    if e < 0.5 {
        0.5 + 2.0 * e - 2.0 * e * e
    } else {
        1.0
    }
}

/// Fraction of the sifted key removed by privacy amplification for
/// single-photon signals.
pub fn tau1(e: f64) -> f64 {
    if e < 0.5 {
        (1.0 + 4.0 * e - 4.0 * e * e).log2()
    } else {
        1.0
    }
}

/// Shrinking fraction when a fraction `multi_fraction` of the sifted bits
/// may come from multi-photon signals that Eve knows completely. The
/// errors are attributed to the remaining single-photon bits.
pub fn tau1_multiphoton(e: f64, multi_fraction: f64) -> f64 {
    let single = 1.0 - multi_fraction.clamp(0.0, 1.0);
    if single <= 0.0 {
        return 1.0;
    }
    let rescaled = (e / single).min(0.5);
    1.0 + single * collision_prob_single(rescaled).log2()
}

/// Observables and derived quantities at one operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub p_post: f64,
    pub p_exp: f64,
    pub p_signal: f64,
    pub e: f64,
    pub sm: f64,
    /// Privacy-amplification shrinking fraction actually applied.
    pub tau1: f64,
    /// Error-correction bits per sifted bit, `f[e] h(e)`.
    pub ec_cost: f64,
    pub gain_raw: f64,
    pub gain: f64,
    pub secure: bool,
}

/// Secure bits per slot for an ideal single-photon source.
///
/// `p_signal` is not separately modelled here and is reported equal to `p_exp`.
pub fn gain_single(e: f64, p_exp: f64, ec: &EcModel) -> Result<RatePoint> {
    check_unit("e", e)?;
    check("p_exp", p_exp, p_exp > 0.0 && p_exp <= 1.0, "(0, 1]")?;
    let shrink = tau1(e);
    let ec_cost = ec_factor(ec, e) * shannon_ec_cost(e);
    let gain_raw = 0.5 * p_exp * (1.0 - shrink - ec_cost);
    Ok(finish(1.0, p_exp, p_exp, e, 0.0, shrink, ec_cost, gain_raw))
}

/// Secure bits per slot for a source with multi-photon signals, expressed
/// through observables: post-selection and click probabilities, the error
/// rate and the multi-photon probability of the post-selected signals.
///
/// The result never exceeds `½ p_post (p_exp - S_m)`.
pub fn gain_multi(stats: &PhotonStats, click: &ClickModel, ec: &EcModel) -> Result<RatePoint> {
    if !(click.p_exp > 0.0) {
        return Err(RateError::NoClicks);
    }
    check_unit("e", click.e)?;
    let p_exp = click.p_exp;
    let shrink = tau1_multiphoton(click.e, stats.sm / p_exp);
    let ec_cost = ec_factor(ec, click.e) * shannon_ec_cost(click.e);
    // Once S_m >= p_exp no single-photon bit is left; the deficit p_exp - S_m
    // is then charged in full so the gain keeps falling with S_m.
    let surviving = if stats.sm < p_exp { 1.0 - shrink } else { (p_exp - stats.sm) / p_exp };
    let gain_raw = 0.5 * stats.p_post * p_exp * (surviving - ec_cost);
    Ok(finish(stats.p_post, p_exp, click.p_signal, click.e, stats.sm, shrink, ec_cost, gain_raw))
}

#[allow(clippy::too_many_arguments)]
fn finish(
    p_post: f64,
    p_exp: f64,
    p_signal: f64,
    e: f64,
    sm: f64,
    tau1: f64,
    ec_cost: f64,
    gain_raw: f64,
) -> RatePoint {
    RatePoint {
        p_post,
        p_exp,
        p_signal,
        e,
        sm,
        tau1,
        ec_cost,
        gain_raw,
        gain: gain_raw.max(0.0),
        secure: gain_raw > 0.0,
    }
}

/// Largest error rate at which an ideal single-photon link still yields a
/// positive gain.
pub fn single_photon_error_threshold(ec: &EcModel, tol: f64) -> Result<f64> {
    let net = |e: f64| 1.0 - tau1(e) - ec_factor(ec, e) * shannon_ec_cost(e);
    bisect(net, 0.0, 0.5, tol, "single-photon gain")
}

/// Deviation `δ` such that `|m - <m>| <= δ n_tot` holds with probability at
/// least `confidence` (Hoeffding).
pub fn hoeffding_delta(n_tot: u64, confidence: f64) -> Result<f64> {
    if n_tot == 0 {
        return Err(RateError::Domain { name: "n_tot", value: 0.0, expected: ">= 1" });
    }
    check("confidence", confidence, confidence > 0.0 && confidence < 1.0, "(0, 1)")?;
    Ok(((-(-confidence).ln_1p()) / (2.0 * n_tot as f64)).sqrt())
}

/// Confidence `1 - exp(-2 n_tot δ²)` guaranteed by Hoeffding for deviation `δ`.
pub fn hoeffding_confidence(n_tot: u64, delta: f64) -> f64 {
    -(-2.0 * n_tot as f64 * delta * delta).exp_m1()
}
