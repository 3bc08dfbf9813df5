//! Run configuration as a flat `key = value` text file.
//!
//! ```text
//! # packet
//! mass = 1
//! sigma_over_m = 0.01
//! pbar_over_m = 1
//! ell = 1
//! n_r = 0
//! oracle.order = 48
//! tolerances.normalization = 1e-7
//! ```
//!
//! Blank lines and `#` comments are ignored. Unknown or repeated keys are
//! errors. [`Config::to_text`] writes every key, and parsing that text
//! gives back an identical value.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::PacketSpec;
use crate::oracle::OracleSettings;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub normalization: f64,
    pub marginal: f64,
    /// Relative closed-form vs oracle agreement.
    pub oracle: f64,
    pub boost: f64,
    /// Coefficient c in the c·(σ/m)² allowance for frame-to-frame oracle drift.
    pub boost_oracle: f64,
    pub gouy: f64,
    pub gouy_ring: f64,
    pub observables: f64,
    pub exponent_oracle: f64,
    pub exponent_schrodinger: f64,
    pub exponent_spinor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            normalization: 1e-7,
            marginal: 1e-6,
            oracle: 0.01,
            boost: 1e-12,
            boost_oracle: 10.0,
            gouy: 1e-8,
            gouy_ring: 1e-4,
            observables: 1e-6,
            exponent_oracle: 0.3,
            exponent_schrodinger: 0.2,
            exponent_spinor: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub mass: f64,
    pub sigma_over_m: f64,
    pub pbar_over_m: f64,
    pub ell: i32,
    pub n_r: u32,
    pub oracle: OracleSettings,
    pub tolerances: Tolerances,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            mass: 1.0,
            sigma_over_m: 0.01,
            pbar_over_m: 1.0,
            ell: 1,
            n_r: 0,
            oracle: OracleSettings::default(),
            tolerances: Tolerances::default(),
        }
    }
}

pub const KEYS: [&str; 20] = [
    "mass",
    "sigma_over_m",
    "pbar_over_m",
    "ell",
    "n_r",
    "oracle.order",
    "oracle.kspan",
    "oracle.max_order",
    "oracle.target",
    "tolerances.normalization",
    "tolerances.marginal",
    "tolerances.oracle",
    "tolerances.boost",
    "tolerances.boost_oracle",
    "tolerances.gouy",
    "tolerances.gouy_ring",
    "tolerances.observables",
    "tolerances.exponent_oracle",
    "tolerances.exponent_schrodinger",
    "tolerances.exponent_spinor",
];

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> std::result::Result<T, String> {
    value.parse().map_err(|_| format!("invalid value `{value}` for `{key}`"))
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen = std::collections::HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Config { line: i + 1, msg };
            let (key, value) = line.split_once('=').ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(err(format!("duplicate key `{key}`")));
            }
            cfg.set(key, value).map_err(err)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let t = &mut self.tolerances;
        match key {
            "mass" => self.mass = parse_num(key, value)?,
            "sigma_over_m" => self.sigma_over_m = parse_num(key, value)?,
            "pbar_over_m" => self.pbar_over_m = parse_num(key, value)?,
            "ell" => self.ell = parse_num(key, value)?,
            "n_r" => self.n_r = parse_num(key, value)?,
            "oracle.order" => self.oracle.order = parse_num(key, value)?,
            "oracle.kspan" => self.oracle.k_span = parse_num(key, value)?,
            "oracle.max_order" => self.oracle.max_order = parse_num(key, value)?,
            "oracle.target" => self.oracle.target = parse_num(key, value)?,
            "tolerances.normalization" => t.normalization = parse_num(key, value)?,
            "tolerances.marginal" => t.marginal = parse_num(key, value)?,
            "tolerances.oracle" => t.oracle = parse_num(key, value)?,
            "tolerances.boost" => t.boost = parse_num(key, value)?,
            "tolerances.boost_oracle" => t.boost_oracle = parse_num(key, value)?,
            "tolerances.gouy" => t.gouy = parse_num(key, value)?,
            "tolerances.gouy_ring" => t.gouy_ring = parse_num(key, value)?,
            "tolerances.observables" => t.observables = parse_num(key, value)?,
            "tolerances.exponent_oracle" => t.exponent_oracle = parse_num(key, value)?,
            "tolerances.exponent_schrodinger" => t.exponent_schrodinger = parse_num(key, value)?,
            "tolerances.exponent_spinor" => t.exponent_spinor = parse_num(key, value)?,
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    fn get(&self, key: &str) -> String {
        let t = &self.tolerances;
        match key {
            "mass" => self.mass.to_string(),
            "sigma_over_m" => self.sigma_over_m.to_string(),
            "pbar_over_m" => self.pbar_over_m.to_string(),
            "ell" => self.ell.to_string(),
            "n_r" => self.n_r.to_string(),
            "oracle.order" => self.oracle.order.to_string(),
            "oracle.kspan" => self.oracle.k_span.to_string(),
            "oracle.max_order" => self.oracle.max_order.to_string(),
            "oracle.target" => self.oracle.target.to_string(),
            "tolerances.normalization" => t.normalization.to_string(),
            "tolerances.marginal" => t.marginal.to_string(),
            "tolerances.oracle" => t.oracle.to_string(),
            "tolerances.boost" => t.boost.to_string(),
            "tolerances.boost_oracle" => t.boost_oracle.to_string(),
            "tolerances.gouy" => t.gouy.to_string(),
            "tolerances.gouy_ring" => t.gouy_ring.to_string(),
            "tolerances.observables" => t.observables.to_string(),
            "tolerances.exponent_oracle" => t.exponent_oracle.to_string(),
            "tolerances.exponent_schrodinger" => t.exponent_schrodinger.to_string(),
            "tolerances.exponent_spinor" => t.exponent_spinor.to_string(),
            _ => unreachable!("key list and accessor out of sync"),
        }
    }

    /// Every key in a fixed order; `f64` Display is shortest round-trip.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for key in KEYS {
            let _ = writeln!(out, "{key} = {}", self.get(key));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        self.spec()?;
        let o = &self.oracle;
        if o.order < 2 || o.max_order < o.order || !(o.k_span > 0.0) || !(o.target > 0.0) {
            return Err(Error::InvalidParameter(format!("inconsistent oracle settings {o:?}")));
        }
        Ok(())
    }

    pub fn spec(&self) -> Result<PacketSpec> {
        PacketSpec::new(
            self.mass,
            self.sigma_over_m * self.mass,
            self.pbar_over_m * self.mass,
            self.ell,
            self.n_r,
        )
    }
}
