//! Physical inputs, optomechanical couplings and the semiclassical steady state.
//!
//! Every frequency, rate and detuning is stored in angular units (rad/s).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fundamental constants (CODATA 2018 exact values).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// J·s
    pub hbar: f64,
    /// J/K
    pub k_boltzmann: f64,
    /// m/s
    pub c_light: f64,
}

impl PhysicalConstants {
    pub const CODATA: PhysicalConstants = PhysicalConstants {
        hbar: 1.054_571_817e-34,
        k_boltzmann: 1.380_649e-23,
        c_light: 299_792_458.0,
    };

    pub fn validate(&self) -> Result<()> {
        positive("constants.hbar", self.hbar)?;
        positive("constants.k_boltzmann", self.k_boltzmann)?;
        positive("constants.c_light", self.c_light)
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA
    }
}

/// A single mechanical oscillation mode of one mirror.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MechanicalMode {
    /// Effective mass, kg.
    pub mass: f64,
    /// Resonance frequency Ω, rad/s.
    pub omega_m: f64,
    /// Damping rate Γ, rad/s.
    pub gamma_m: f64,
}

impl MechanicalMode {
    pub fn new(mass: f64, omega_m: f64, gamma_m: f64) -> Result<Self> {
        let mode = Self {
            mass,
            omega_m,
            gamma_m,
        };
        mode.validate("mirror")?;
        Ok(mode)
    }

    pub fn validate(&self, prefix: &str) -> Result<()> {
        positive(&format!("{prefix}.mass"), self.mass)?;
        positive(&format!("{prefix}.omega"), self.omega_m)?;
        positive(&format!("{prefix}.gamma"), self.gamma_m)
    }

    pub fn quality_factor(&self) -> f64 {
        self.omega_m / self.gamma_m
    }
}

/// Driven optical cavity mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityParams {
    /// Laser wavelength, m.
    pub wavelength: f64,
    /// Optical path length L, m.
    pub path_length: f64,
    /// Cavity linewidth γ_b, rad/s.
    pub kappa: f64,
    /// Effective detuning Δ_b = ω_b0 − ω_b (including the radiation-pressure shift), rad/s.
    pub detuning: f64,
    /// Input power, W.
    pub input_power: f64,
}

impl CavityParams {
    pub fn validate(&self) -> Result<()> {
        positive("cavity.wavelength", self.wavelength)?;
        positive("cavity.length", self.path_length)?;
        positive("cavity.kappa", self.kappa)?;
        finite("cavity.detuning", self.detuning)?;
        non_negative("cavity.power", self.input_power)
    }

    /// Cavity resonance ω_b = 2πc/λ.
    pub fn optical_frequency(&self, constants: &PhysicalConstants) -> f64 {
        2.0 * PI * constants.c_light / self.wavelength
    }

    /// Laser frequency ω_b0 = ω_b + Δ_b.
    pub fn drive_frequency(&self, constants: &PhysicalConstants) -> f64 {
        self.optical_frequency(constants) + self.detuning
    }
}

/// Complete physical parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub constants: PhysicalConstants,
    pub mirror1: MechanicalMode,
    pub mirror2: MechanicalMode,
    pub cavity: CavityParams,
    /// Bath temperature, K.
    pub temperature: f64,
}

impl SystemConfig {
    /// Acoustic-mode mirror experiment: 810 nm, 1 W, L = 1 mm, Δ_b = γ_b = 6e6 rad/s,
    /// m = 23 mg, Γ = 1 rad/s, Ω1 = Ω2 = 1e6 rad/s.
    pub fn baseline() -> Self {
        let mirror = MechanicalMode {
            mass: 23e-6,
            omega_m: 1.0e6,
            gamma_m: 1.0,
        };
        Self {
            constants: PhysicalConstants::CODATA,
            mirror1: mirror,
            mirror2: mirror,
            cavity: CavityParams {
                wavelength: 810e-9,
                path_length: 1e-3,
                kappa: 6.0e6,
                detuning: 6.0e6,
                input_power: 1.0,
            },
            temperature: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.constants.validate()?;
        self.mirror1.validate("mirror1")?;
        self.mirror2.validate("mirror2")?;
        self.cavity.validate()?;
        non_negative("temperature", self.temperature)
    }

    /// Non-fatal physical oddities worth reporting to the user.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (name, mode) in [("mirror1", &self.mirror1), ("mirror2", &self.mirror2)] {
            if mode.quality_factor() < 1.0 {
                out.push(format!(
                    "{name}: quality factor {:.3} < 1 (overdamped mode)",
                    mode.quality_factor()
                ));
            }
        }
        out
    }

    pub fn mirror(&self, j: usize) -> &MechanicalMode {
        match j {
            0 => &self.mirror1,
            1 => &self.mirror2,
            _ => panic!("mirror index {j} out of range"),
        }
    }

    pub fn modes(&self) -> [MechanicalMode; 2] {
        [self.mirror1, self.mirror2]
    }

    /// Sets Ω2 = Ω1 + mismatch, keeping every other mirror-2 property.
    pub fn with_mismatch(mut self, mismatch: f64) -> Self {
        self.mirror2.omega_m = self.mirror1.omega_m + mismatch;
        self
    }

    pub fn with_power_scaled(mut self, multiplier: f64) -> Self {
        self.cavity.input_power *= multiplier;
        self
    }

    pub fn with_temperature(mut self, temperature: f64) -> Self {
        self.temperature = temperature;
        self
    }

    /// Exchanges the mirror labels.
    pub fn swapped(mut self) -> Self {
        std::mem::swap(&mut self.mirror1, &mut self.mirror2);
        self
    }

    /// Mean mechanical frequency (Ω1 + Ω2)/2.
    pub fn mean_mechanical_frequency(&self) -> f64 {
        0.5 * (self.mirror1.omega_m + self.mirror2.omega_m)
    }
}

/// Semiclassical working point around which the dynamics is linearized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyState {
    /// Intracavity amplitude β (dimensionless).
    pub beta: Complex64,
    /// |β|².
    pub photon_number: f64,
    /// ⟨q_j⟩_ss.
    pub q_ss: [f64; 2],
    /// G_j, rad/s.
    pub couplings: [f64; 2],
    /// |β| G_j, rad/s.
    pub effective_couplings: [f64; 2],
}

impl SteadyState {
    /// Assembles a steady state from an amplitude and couplings; the displacements follow
    /// ⟨q_j⟩ = (−1)^j G_j |β|² / Ω_j.
    pub fn from_parts(beta: Complex64, couplings: [f64; 2], omegas: [f64; 2]) -> Self {
        let photon_number = beta.norm_sqr();
        let amplitude = beta.norm();
        Self {
            beta,
            photon_number,
            q_ss: [
                -couplings[0] * photon_number / omegas[0],
                couplings[1] * photon_number / omegas[1],
            ],
            couplings,
            effective_couplings: [amplitude * couplings[0], amplitude * couplings[1]],
        }
    }

    /// Same state with β multiplied by e^{iφ}.
    pub fn with_beta_phase(&self, phase: f64) -> Self {
        let mut out = *self;
        out.beta = self.beta * Complex64::from_polar(1.0, phase);
        out
    }
}

/// G_j = (ω_b / 2L) √(ħ / m_j Ω_j).
pub fn derive_coupling(
    mode: &MechanicalMode,
    cavity: &CavityParams,
    constants: &PhysicalConstants,
) -> Result<f64> {
    mode.validate("mirror")?;
    positive("cavity.wavelength", cavity.wavelength)?;
    positive("cavity.length", cavity.path_length)?;
    let omega_b = cavity.optical_frequency(constants);
    let g =
        omega_b / (2.0 * cavity.path_length) * (constants.hbar / (mode.mass * mode.omega_m)).sqrt();
    if !g.is_finite() || g <= 0.0 {
        return Err(Error::invalid(
            "coupling",
            format!("G evaluates to {g}; inputs overflow or underflow"),
        ));
    }
    Ok(g)
}

/// |β^in| = √(P / ħω_b0), in √(photons/s).
pub fn input_amplitude(cavity: &CavityParams, constants: &PhysicalConstants) -> Result<f64> {
    non_negative("cavity.power", cavity.input_power)?;
    let photon_energy = constants.hbar * cavity.drive_frequency(constants);
    positive("drive photon energy", photon_energy)?;
    let amp = (cavity.input_power / photon_energy).sqrt();
    finite("input amplitude", amp)?;
    Ok(amp)
}

/// β = √γ_b β^in / (γ_b/2 − iΔ_b) with β^in real and positive.
pub fn steady_state(config: &SystemConfig) -> Result<SteadyState> {
    config.validate()?;
    let cav = &config.cavity;
    let beta_in = input_amplitude(cav, &config.constants)?;
    let denom = Complex64::new(0.5 * cav.kappa, -cav.detuning);
    let beta = Complex64::new(cav.kappa.sqrt() * beta_in, 0.0) / denom;
    let couplings = [
        derive_coupling(&config.mirror1, cav, &config.constants)?,
        derive_coupling(&config.mirror2, cav, &config.constants)?,
    ];
    Ok(SteadyState::from_parts(
        beta,
        couplings,
        [config.mirror1.omega_m, config.mirror2.omega_m],
    ))
}

/// Solves Δ = Δ_bare + K γ_b |β^in|² / (γ_b²/4 + Δ²), K = G1²/Ω1 + G2²/Ω2, on the branch
/// that tends to Δ_bare as the drive vanishes.
///
/// The detuning stored in `config.cavity` is ignored except through the drive frequency
/// entering |β^in|.
pub fn self_consistent_detuning(config: &SystemConfig, bare_detuning: f64) -> Result<f64> {
    config.validate()?;
    finite("bare detuning", bare_detuning)?;
    let cav = &config.cavity;
    let mut consts_cav = *cav;
    consts_cav.detuning = bare_detuning;
    let beta_in_sq = input_amplitude(&consts_cav, &config.constants)?.powi(2);
    let g1 = derive_coupling(&config.mirror1, cav, &config.constants)?;
    let g2 = derive_coupling(&config.mirror2, cav, &config.constants)?;
    let stiffness = g1 * g1 / config.mirror1.omega_m + g2 * g2 / config.mirror2.omega_m;
    let drive = stiffness * cav.kappa * beta_in_sq;
    let half_width_sq = 0.25 * cav.kappa * cav.kappa;

    if drive == 0.0 {
        return Ok(bare_detuning);
    }

    // f(Δ) = (Δ − Δ_bare)(γ²/4 + Δ²) rises from 0 at Δ_bare; the connected branch is the first
    // point where it reaches `drive`, provided f has not turned over before that.
    let f = |d: f64| (d - bare_detuning) * (half_width_sq + d * d);
    let mut hi = bare_detuning + drive / half_width_sq;
    // f'(Δ) = 3Δ² − 2Δ_bare Δ + γ²/4; its smaller root above Δ_bare is a local maximum of f.
    let disc = bare_detuning * bare_detuning - 3.0 * half_width_sq;
    if disc > 0.0 {
        let turn = (bare_detuning - disc.sqrt()) / 3.0;
        if turn > bare_detuning && turn < hi {
            if f(turn) < drive {
                return Err(Error::Convergence {
                    what: "self-consistent detuning (branch ends at a fold)".into(),
                    lo: bare_detuning,
                    hi: turn,
                });
            }
            hi = turn;
        }
    }
    let mut lo = bare_detuning;
    if !(f(hi) >= drive) {
        return Err(Error::Convergence {
            what: "self-consistent detuning".into(),
            lo,
            hi,
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < drive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // polish with a Newton step from the bracket midpoint
    let mut d = 0.5 * (lo + hi);
    let fp = 3.0 * d * d - 2.0 * bare_detuning * d + half_width_sq;
    if fp > 0.0 {
        let step = (f(d) - drive) / fp;
        if (d - step) >= lo && (d - step) <= hi {
            d -= step;
        }
    }
    Ok(d)
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite, got {v}")))
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be > 0, got {v}")))
    }
}

fn non_negative(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be >= 0, got {v}")))
    }
}
