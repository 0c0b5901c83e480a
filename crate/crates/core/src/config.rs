//! Plain-text configuration: one `key = value unit` assignment per line, `#` comments.
//!
//! ```text
//! mirror1.mass   = 23 mg
//! mirror1.omega  = 1e6 rad_s
//! mirror1.gamma  = 1 rad_s
//! mirror2.mass   = 23 mg
//! mirror2.omega  = 1e6 rad_s
//! mirror2.gamma  = 1 rad_s
//! cavity.wavelength = 810 nm
//! cavity.length  = 1 mm
//! cavity.kappa   = 6e6 rad_s
//! cavity.detuning = 6e6 rad_s
//! cavity.power   = 1 W
//! temperature    = 1 K
//! ```
//!
//! Every value carries an explicit unit. `Hz`, `kHz` and `MHz` are cycle frequencies and are
//! multiplied by 2π; `rad_s` (or `rad/s`) is taken as is.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::params::{CavityParams, MechanicalMode, PhysicalConstants, SystemConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dimension {
    Mass,
    Rate,
    Length,
    Power,
    Temperature,
}

impl Dimension {
    fn units(self) -> &'static [(&'static str, f64)] {
        match self {
            Dimension::Mass => &[("kg", 1.0), ("g", 1e-3), ("mg", 1e-6), ("ug", 1e-9)],
            Dimension::Rate => &[
                ("rad_s", 1.0),
                ("rad/s", 1.0),
                ("Hz", TAU),
                ("kHz", TAU * 1e3),
                ("MHz", TAU * 1e6),
            ],
            Dimension::Length => &[("m", 1.0), ("mm", 1e-3), ("um", 1e-6), ("nm", 1e-9)],
            Dimension::Power => &[("W", 1.0), ("mW", 1e-3), ("uW", 1e-6)],
            Dimension::Temperature => &[("K", 1.0), ("mK", 1e-3)],
        }
    }

    fn canonical(self) -> &'static str {
        self.units()[0].0
    }
}

const KEYS: [(&str, Dimension); 12] = [
    ("mirror1.mass", Dimension::Mass),
    ("mirror1.omega", Dimension::Rate),
    ("mirror1.gamma", Dimension::Rate),
    ("mirror2.mass", Dimension::Mass),
    ("mirror2.omega", Dimension::Rate),
    ("mirror2.gamma", Dimension::Rate),
    ("cavity.wavelength", Dimension::Length),
    ("cavity.length", Dimension::Length),
    ("cavity.kappa", Dimension::Rate),
    ("cavity.detuning", Dimension::Rate),
    ("cavity.power", Dimension::Power),
    ("temperature", Dimension::Temperature),
];

fn key_error(key: &str, message: impl Into<String>) -> Error {
    Error::ConfigKey {
        key: key.to_string(),
        message: message.into(),
    }
}

fn parse_quantity(key: &str, dim: Dimension, raw: &str) -> Result<f64> {
    let mut parts = raw.split_whitespace();
    let number = parts
        .next()
        .ok_or_else(|| key_error(key, "missing value"))?;
    let value: f64 = number
        .parse()
        .map_err(|_| key_error(key, format!("`{number}` is not a number")))?;
    let allowed = || {
        dim.units()
            .iter()
            .map(|(u, _)| *u)
            .collect::<Vec<_>>()
            .join(", ")
    };
    let unit = parts.next().ok_or_else(|| {
        key_error(
            key,
            format!("missing unit (expected one of: {})", allowed()),
        )
    })?;
    if let Some(extra) = parts.next() {
        return Err(key_error(key, format!("unexpected trailing `{extra}`")));
    }
    let scale = dim
        .units()
        .iter()
        .find(|(u, _)| *u == unit)
        .map(|(_, s)| *s)
        .ok_or_else(|| {
            key_error(
                key,
                format!("unknown unit `{unit}` (expected one of: {})", allowed()),
            )
        })?;
    if !value.is_finite() {
        return Err(key_error(key, format!("value {value} is not finite")));
    }
    Ok(value * scale)
}

/// Parses and validates a configuration; physical constants are always CODATA.
pub fn parse_config(text: &str) -> Result<SystemConfig> {
    let mut values: BTreeMap<&'static str, f64> = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line_no = n + 1;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, raw) = content.split_once('=').ok_or_else(|| Error::Config {
            line: line_no,
            message: format!("expected `key = value unit`, got `{content}`"),
        })?;
        let key = key.trim();
        let (name, dim) = KEYS
            .iter()
            .find(|(k, _)| *k == key)
            .copied()
            .ok_or_else(|| Error::Config {
                line: line_no,
                message: format!("unknown key `{key}`"),
            })?;
        let value = parse_quantity(name, dim, raw.trim()).map_err(|e| match e {
            Error::ConfigKey { key, message } => Error::ConfigKey {
                key,
                message: format!("{message} (line {line_no})"),
            },
            other => other,
        })?;
        if values.insert(name, value).is_some() {
            return Err(Error::Config {
                line: line_no,
                message: format!("duplicate key `{key}`"),
            });
        }
    }
    let get = |key: &str| {
        values
            .get(key)
            .copied()
            .ok_or_else(|| key_error(key, "missing"))
    };
    let mode = |j: u8| -> Result<MechanicalMode> {
        Ok(MechanicalMode {
            mass: get(&format!("mirror{j}.mass"))?,
            omega_m: get(&format!("mirror{j}.omega"))?,
            gamma_m: get(&format!("mirror{j}.gamma"))?,
        })
    };
    let config = SystemConfig {
        constants: PhysicalConstants::CODATA,
        mirror1: mode(1)?,
        mirror2: mode(2)?,
        cavity: CavityParams {
            wavelength: get("cavity.wavelength")?,
            path_length: get("cavity.length")?,
            kappa: get("cavity.kappa")?,
            detuning: get("cavity.detuning")?,
            input_power: get("cavity.power")?,
        },
        temperature: get("temperature")?,
    };
    config.validate()?;
    Ok(config)
}

/// Serializes in canonical SI units with round-trip precision.
pub fn to_config_string(config: &SystemConfig) -> String {
    let values = [
        config.mirror1.mass,
        config.mirror1.omega_m,
        config.mirror1.gamma_m,
        config.mirror2.mass,
        config.mirror2.omega_m,
        config.mirror2.gamma_m,
        config.cavity.wavelength,
        config.cavity.path_length,
        config.cavity.kappa,
        config.cavity.detuning,
        config.cavity.input_power,
        config.temperature,
    ];
    let mut out = String::new();
    for ((key, dim), v) in KEYS.iter().zip(values) {
        let _ = writeln!(out, "{key} = {v:e} {}", dim.canonical());
    }
    out
}
