//! Seeded randomized comparison of the closed-form densities against the matrix oracle.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{build_system, oracle_densities};
use crate::params::{steady_state, CavityParams, MechanicalMode, PhysicalConstants, SystemConfig};
use crate::response::assemble_transfer;
use crate::spectra::spectral_point;

pub const DEFAULT_DRAWS: usize = 1000;
pub const DEFAULT_SEED: u64 = 20_231_017;
pub const DEFAULT_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    VarU,
    VarV,
    CommAbs,
    EntanglementDegree,
}

impl Quantity {
    pub const ALL: [Quantity; 4] = [
        Quantity::VarU,
        Quantity::VarV,
        Quantity::CommAbs,
        Quantity::EntanglementDegree,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::VarU => "var_u",
            Quantity::VarV => "var_v",
            Quantity::CommAbs => "comm_abs",
            Quantity::EntanglementDegree => "E",
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Quantity::ALL
            .into_iter()
            .find(|q| q.name() == s)
            .ok_or_else(|| {
                Error::invalid(
                    "quantity",
                    format!("unknown `{s}` (var_u, var_v, comm_abs, E)"),
                )
            })
    }
}

/// Multiplies one closed-form quantity by `factor` before comparison. Test hook only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Corruption {
    pub quantity: Quantity,
    pub factor: f64,
}

/// Log-uniform bounds of the random draws. `zero_fraction` of the temperature and power
/// draws are exactly zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingRanges {
    pub mass_kg: (f64, f64),
    pub omega_m_rad_s: (f64, f64),
    pub gamma_m_rad_s: (f64, f64),
    pub temperature_k: (f64, f64),
    pub power_w: (f64, f64),
    pub kappa_rad_s: (f64, f64),
    pub detuning_over_kappa: (f64, f64),
    pub wavelength_m: (f64, f64),
    pub length_m: (f64, f64),
    pub zero_fraction: f64,
}

impl Default for SamplingRanges {
    fn default() -> Self {
        Self {
            mass_kg: (1e-6, 1e-1),
            omega_m_rad_s: (1e5, 1e7),
            gamma_m_rad_s: (0.1, 1e3),
            temperature_k: (1e-3, 300.0),
            power_w: (1e-6, 10.0),
            kappa_rad_s: (1e5, 1e8),
            detuning_over_kappa: (0.05, 5.0),
            wavelength_m: (5e-7, 1.6e-6),
            length_m: (1e-4, 1e-1),
            zero_fraction: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub draws: usize,
    pub seed: u64,
    pub threshold: f64,
    pub ranges: SamplingRanges,
    pub corruption: Option<Corruption>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            draws: DEFAULT_DRAWS,
            seed: DEFAULT_SEED,
            threshold: DEFAULT_THRESHOLD,
            ranges: SamplingRanges::default(),
            corruption: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Draw {
    pub index: usize,
    pub config: SystemConfig,
    pub omega: f64,
    pub temperature: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantityError {
    pub quantity: Quantity,
    pub max_relative_error: f64,
    pub worst_draw: Option<Draw>,
    pub closed_form: f64,
    pub oracle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub draws: usize,
    pub seed: u64,
    pub threshold: f64,
    pub ranges: SamplingRanges,
    /// The configured base point is always compared first, ahead of the random draws.
    pub anchor_included: bool,
    pub singular_draws: usize,
    pub quantities: Vec<QuantityError>,
    pub failed: Vec<Quantity>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn worst_error(&self) -> f64 {
        self.quantities
            .iter()
            .map(|q| q.max_relative_error)
            .fold(0.0, f64::max)
    }

    pub fn error_of(&self, quantity: Quantity) -> f64 {
        self.quantities
            .iter()
            .find(|q| q.quantity == quantity)
            .map_or(f64::NAN, |q| q.max_relative_error)
    }
}

/// |a − b| / max(|a|, |b|), zero when both vanish.
pub fn relative_error(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let scale = a.abs().max(b.abs());
    if !scale.is_finite() {
        return f64::INFINITY;
    }
    (a - b).abs() / scale
}

fn log_uniform<R: Rng>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    (rng.gen_range(lo.ln()..=hi.ln())).exp()
}

fn maybe_zero<R: Rng>(rng: &mut R, frac: f64, range: (f64, f64)) -> f64 {
    if rng.gen_bool(frac) {
        0.0
    } else {
        log_uniform(rng, range)
    }
}

fn random_mode<R: Rng>(rng: &mut R, r: &SamplingRanges) -> MechanicalMode {
    MechanicalMode {
        mass: log_uniform(rng, r.mass_kg),
        omega_m: log_uniform(rng, r.omega_m_rad_s),
        gamma_m: log_uniform(rng, r.gamma_m_rad_s),
    }
}

/// Generates the draw sequence for `seed`; the first draw of a report is not from here.
pub fn random_draws(seed: u64, count: usize, ranges: &SamplingRanges) -> Vec<Draw> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|index| {
            let mirror1 = random_mode(&mut rng, ranges);
            let mirror2 = random_mode(&mut rng, ranges);
            let kappa = log_uniform(&mut rng, ranges.kappa_rad_s);
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let cavity = CavityParams {
                wavelength: rng.gen_range(ranges.wavelength_m.0..=ranges.wavelength_m.1),
                path_length: log_uniform(&mut rng, ranges.length_m),
                kappa,
                detuning: sign * kappa * log_uniform(&mut rng, ranges.detuning_over_kappa),
                input_power: maybe_zero(&mut rng, ranges.zero_fraction, ranges.power_w),
            };
            let temperature = maybe_zero(&mut rng, ranges.zero_fraction, ranges.temperature_k);
            // half near one resonance, half anywhere in the mechanical band
            let omega = if rng.gen_bool(0.5) {
                let m = if rng.gen_bool(0.5) {
                    &mirror1
                } else {
                    &mirror2
                };
                (m.omega_m + m.gamma_m * rng.gen_range(-20.0..=20.0))
                    .abs()
                    .max(1.0)
            } else {
                let lo = mirror1.omega_m.min(mirror2.omega_m) * 0.1;
                let hi = mirror1.omega_m.max(mirror2.omega_m) * 10.0;
                log_uniform(&mut rng, (lo, hi))
            };
            Draw {
                index,
                config: SystemConfig {
                    constants: PhysicalConstants::CODATA,
                    mirror1,
                    mirror2,
                    cavity,
                    temperature,
                },
                omega,
                temperature,
            }
        })
        .collect()
}

/// Closed-form and oracle values, in [`Quantity::ALL`] order.
pub fn compare_draw(draw: &Draw, corruption: Option<Corruption>) -> Result<([f64; 4], [f64; 4])> {
    let cfg = &draw.config;
    let ss = steady_state(cfg)?;
    let ts = assemble_transfer(&ss, cfg, draw.omega);
    let p = spectral_point(&ts, cfg, draw.temperature);
    let mut closed = [p.var_u, p.var_v, p.comm_abs, p.entanglement_degree];
    if let Some(c) = corruption {
        let i = Quantity::ALL.iter().position(|&q| q == c.quantity).unwrap();
        closed[i] *= c.factor;
    }
    let sys = build_system(cfg, &ss);
    let o = oracle_densities(&sys, draw.omega, draw.temperature)?;
    Ok((
        closed,
        [o.var_u, o.var_v, o.comm_abs, o.entanglement_degree],
    ))
}

/// Runs the comparison on `base` (at its resonance and temperature) plus `options.draws`
/// random draws.
pub fn run_verification(base: &SystemConfig, options: &VerifyOptions) -> Result<VerifyReport> {
    if options.draws < 1 {
        return Err(Error::invalid("draws", "must be >= 1"));
    }
    base.validate()?;
    let mut draws = vec![Draw {
        index: 0,
        config: *base,
        omega: base.mean_mechanical_frequency(),
        temperature: base.temperature,
    }];
    draws.extend(
        random_draws(options.seed, options.draws, &options.ranges)
            .into_iter()
            .map(|mut d| {
                d.index += 1;
                d
            }),
    );

    let outcomes: Vec<Result<([f64; 4], [f64; 4])>> = draws
        .par_iter()
        .map(|d| compare_draw(d, options.corruption))
        .collect();

    let mut quantities: Vec<QuantityError> = Quantity::ALL
        .iter()
        .map(|&quantity| QuantityError {
            quantity,
            max_relative_error: 0.0,
            worst_draw: None,
            closed_form: f64::NAN,
            oracle: f64::NAN,
        })
        .collect();
    let mut singular_draws = 0;
    for (draw, outcome) in draws.iter().zip(outcomes) {
        let (closed, oracle) = match outcome {
            Ok(v) => v,
            Err(Error::Singular { .. }) => {
                singular_draws += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        for (i, q) in quantities.iter_mut().enumerate() {
            let err = relative_error(closed[i], oracle[i]);
            // NaN compares false; treat it as the worst possible error
            let err = if err.is_nan() { f64::INFINITY } else { err };
            if q.worst_draw.is_none() || err > q.max_relative_error {
                q.max_relative_error = err;
                q.worst_draw = Some(*draw);
                q.closed_form = closed[i];
                q.oracle = oracle[i];
            }
        }
    }
    let failed: Vec<Quantity> = quantities
        .iter()
        .filter(|q| !(q.max_relative_error <= options.threshold))
        .map(|q| q.quantity)
        .collect();
    Ok(VerifyReport {
        draws: options.draws,
        seed: options.seed,
        threshold: options.threshold,
        ranges: options.ranges.clone(),
        anchor_included: true,
        singular_draws,
        passed: failed.is_empty(),
        failed,
        quantities,
    })
}
