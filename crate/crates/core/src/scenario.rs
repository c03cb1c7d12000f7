//! Experiment presets and the flat `key = value` scenario file format.
//!
//! ```text
//! # comment
//! name = my-link
//! alpha = 0.2          # dB/km
//! receiver_loss = 1    # dB
//! c_align = 0.01       # fraction, not percent
//! dark_b = 2e-4        # per time slot
//! eta_b = 0.18
//! source = pdc         # wcp | pdc | single
//! mu = 0.05
//! eta_a = 0.5
//! dark_a = 5e-8
//! ```
//!
//! All rates are fractions. The published percent figures of the presets
//! are converted once, here.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::LinkBudget;
use crate::error::{RateError, Result};
use crate::sources::{PdcSource, SinglePhotonSource, Source, WcpSource};

/// Trigger detector assumed for downconversion: the 830 nm detector of the
/// BT 8 setup (η = 0.50, dark count 5e-8 per slot).
pub const TRIGGER_ETA_A: f64 = 0.50;
pub const TRIGGER_DARK_A: f64 = 5e-8;

/// Photon number used when none is given and no optimisation is asked for.
pub const DEFAULT_MU: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceKind {
    Wcp,
    Pdc,
    Single,
}

impl FromStr for SourceKind {
    type Err = RateError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "wcp" => Ok(SourceKind::Wcp),
            "pdc" => Ok(SourceKind::Pdc),
            "single" => Ok(SourceKind::Single),
            other => Err(RateError::Config(format!("unknown source kind `{other}`"))),
        }
    }
}

impl fmt::Display for SourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SourceKind::Wcp => "wcp",
            SourceKind::Pdc => "pdc",
            SourceKind::Single => "single",
        })
    }
}

/// Source description before validation. For downconversion, `chi` wins
/// over `mu` when both are set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceSpec {
    pub kind: SourceKind,
    pub mu: Option<f64>,
    pub chi: Option<f64>,
    pub eta_a: f64,
    pub dark_a: f64,
    pub eta_c: f64,
}

impl Default for SourceSpec {
    fn default() -> Self {
        Self {
            kind: SourceKind::Wcp,
            mu: None,
            chi: None,
            eta_a: TRIGGER_ETA_A,
            dark_a: TRIGGER_DARK_A,
            eta_c: 1.0,
        }
    }
}

impl SourceSpec {
    pub fn build(&self) -> Result<Source> {
        let mu = self.mu.unwrap_or(DEFAULT_MU);
        Ok(match self.kind {
            SourceKind::Wcp => WcpSource::new(mu)?.into(),
            SourceKind::Pdc => match self.chi {
                Some(chi) => PdcSource::new(chi, self.eta_a, self.dark_a, self.eta_c)?.into(),
                None => PdcSource::from_mean_photon_number(mu, self.eta_a, self.dark_a, self.eta_c)?.into(),
            },
            SourceKind::Single => SinglePhotonSource.into(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    /// Informational only; 0 when unknown.
    pub wavelength_nm: f64,
    pub alpha: f64,
    pub receiver_loss: f64,
    pub c_align: f64,
    pub dark_b: f64,
    pub eta_b: f64,
    pub source: SourceSpec,
}

impl Scenario {
    fn preset(name: &str, wavelength_nm: f64, alpha: f64, receiver_loss: f64, error_pct: f64, dark_b: f64, eta_b_pct: f64) -> Self {
        Self {
            name: name.to_string(),
            wavelength_nm,
            alpha,
            receiver_loss,
            c_align: error_pct / 100.0,
            dark_b,
            eta_b: eta_b_pct / 100.0,
            source: SourceSpec::default(),
        }
    }

    /// The four published experiments: BT 8, BT 13, G 13 and KTH 15.
    pub fn presets() -> Vec<Scenario> {
        vec![
            Self::preset("BT8", 830.0, 2.5, 8.0, 1.0, 5e-8, 50.0),
            Self::preset("BT13", 1300.0, 0.38, 5.0, 0.8, 1e-5, 11.0),
            Self::preset("G13", 1300.0, 0.32, 3.2, 0.14, 8.2e-5, 17.0),
            Self::preset("KTH15", 1550.0, 0.2, 1.0, 1.0, 2e-4, 18.0),
        ]
    }

    /// Looks up a preset, ignoring case, spaces and dashes (`kth-15`, `KTH 15`).
    pub fn find_preset(name: &str) -> Option<Scenario> {
        let key: String = name.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_uppercase();
        Self::presets().into_iter().find(|s| s.name == key)
    }

    /// A preset name, or else a path to a scenario file.
    pub fn load(name_or_path: &str) -> Result<Scenario> {
        if let Some(s) = Self::find_preset(name_or_path) {
            return Ok(s);
        }
        let path = Path::new(name_or_path);
        let text = std::fs::read_to_string(path).map_err(|e| {
            RateError::Config(format!("`{name_or_path}` is neither a preset nor a readable file: {e}"))
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Scenario> {
        let mut s = Scenario {
            name: "custom".into(),
            wavelength_nm: 0.0,
            alpha: f64::NAN,
            receiver_loss: 0.0,
            c_align: 0.0,
            dark_b: 0.0,
            eta_b: 1.0,
            source: SourceSpec::default(),
        };
        let mut seen_alpha = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| RateError::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let num = || {
                value
                    .parse::<f64>()
                    .map_err(|_| RateError::Config(format!("line {}: `{key}` needs a number, got `{value}`", lineno + 1)))
            };
            match key {
                "name" => s.name = value.to_string(),
                "wavelength" | "wavelength_nm" => s.wavelength_nm = num()?,
                "alpha" => {
                    s.alpha = num()?;
                    seen_alpha = true;
                }
                "receiver_loss" | "l_c" => s.receiver_loss = num()?,
                "c_align" | "c" => s.c_align = num()?,
                "dark_b" | "d_b" => s.dark_b = num()?,
                "eta_b" => s.eta_b = num()?,
                "source" => s.source.kind = value.parse()?,
                "mu" => s.source.mu = Some(num()?),
                "chi" => s.source.chi = Some(num()?),
                "eta_a" => s.source.eta_a = num()?,
                "dark_a" | "d_a" => s.source.dark_a = num()?,
                "eta_c" => s.source.eta_c = num()?,
                other => return Err(RateError::Config(format!("line {}: unknown key `{other}`", lineno + 1))),
            }
        }
        if !seen_alpha {
            return Err(RateError::Config("scenario is missing `alpha`".into()));
        }
        s.link(0.0).validate()?;
        Ok(s)
    }

    pub fn link(&self, length: f64) -> LinkBudget {
        LinkBudget {
            alpha: self.alpha,
            length,
            receiver_loss: self.receiver_loss,
            eta_b: self.eta_b,
            dark_b: self.dark_b,
            c_align: self.c_align,
        }
    }

    /// Same fields in the file format accepted by [`Scenario::parse`].
    pub fn to_file_string(&self) -> String {
        let mut out = format!(
            "name = {}\nwavelength = {}\nalpha = {}\nreceiver_loss = {}\nc_align = {}\ndark_b = {}\neta_b = {}\nsource = {}\n",
            self.name, self.wavelength_nm, self.alpha, self.receiver_loss, self.c_align, self.dark_b, self.eta_b, self.source.kind
        );
        if let Some(mu) = self.source.mu {
            out.push_str(&format!("mu = {mu}\n"));
        }
        if let Some(chi) = self.source.chi {
            out.push_str(&format!("chi = {chi}\n"));
        }
        out.push_str(&format!(
            "eta_a = {}\ndark_a = {}\neta_c = {}\n",
            self.source.eta_a, self.source.dark_a, self.source.eta_c
        ));
        out
    }
}
