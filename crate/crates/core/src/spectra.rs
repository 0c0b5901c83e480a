//! Spectral variance densities, the commutator density and the degree of entanglement
//!
//! ```text
//! E(ω) = ⟨R²_{q1−q2}⟩ ⟨R²_{p1+p2}⟩ / |⟨[R_{q1}, R_{p1}]⟩|²,   R_O(ω) = (O(ω) + O(−ω))/2
//! ```
//!
//! All second moments are densities with the 2πδ(ω + ω') factor stripped. The Brownian
//! noise enters through N_j(ω) = ω (Γ_j/Ω_j) coth(ħω / 2k_BT).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{MechanicalMode, PhysicalConstants, SteadyState, SystemConfig};
use crate::response::{assemble_transfer, TransferSet};

/// Evaluated densities and criteria at one (ω, T).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    pub omega: f64,
    pub temperature: f64,
    /// ⟨R²_{q1−q2}⟩
    pub var_u: f64,
    /// ⟨R²_{p1+p2}⟩
    pub var_v: f64,
    /// |⟨[R_{q1}, R_{p1}]⟩|
    pub comm_abs: f64,
    pub entanglement_degree: f64,
    /// |⟨[R_{q2}, R_{p2}]⟩|, the commutator with the mirror labels exchanged.
    pub comm_abs_mirror2: f64,
    pub flags: CriterionFlags,
    pub near_singular: bool,
    /// Set when the commutator density vanishes and E is reported as +∞.
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionFlags {
    /// E < 1
    pub product_entangled: bool,
    /// var_u + var_v < 2 comm_abs²
    pub sum_entangled: bool,
    /// E < 1/4
    pub epr: bool,
}

impl SpectralPoint {
    /// E computed with mirror 2's commutator in the denominator.
    pub fn entanglement_degree_mirror2(&self) -> f64 {
        degree(self.var_u, self.var_v, self.comm_abs_mirror2)
    }
}

/// N_j(ω) = ω (Γ_j/Ω_j) coth(ħω / 2k_BT); even in ω, analytic at T = 0 and at ω = 0.
pub fn thermal_kernel(
    mode: &MechanicalMode,
    omega: f64,
    temperature: f64,
    constants: &PhysicalConstants,
) -> f64 {
    let ratio = mode.gamma_m / mode.omega_m;
    let w = omega.abs();
    if temperature == 0.0 {
        return w * ratio;
    }
    let thermal_rate = 2.0 * constants.k_boltzmann * temperature / constants.hbar;
    let x = w / thermal_rate;
    // x coth x
    let x_coth = if x < 1e-4 {
        1.0 + x * x / 3.0
    } else {
        x / x.tanh()
    };
    ratio * thermal_rate * x_coth
}

fn kernels(config: &SystemConfig, omega: f64, temperature: f64) -> [f64; 2] {
    [
        thermal_kernel(&config.mirror1, omega, temperature, &config.constants),
        thermal_kernel(&config.mirror2, omega, temperature, &config.constants),
    ]
}

/// ⟨R²_{q1−q2}⟩ = ¼{|B1−B2|²(ω) + |B1−B2|²(−ω) + N1|Ξ11−Ξ21|² + N2|Ξ12−Ξ22|²}.
pub fn variance_u(ts: &TransferSet, config: &SystemConfig, temperature: f64) -> f64 {
    let n = kernels(config, ts.omega, temperature);
    let (p, m) = (&ts.plus, &ts.minus);
    0.25 * ((p.b_coef[0] - p.b_coef[1]).norm_sqr()
        + (m.b_coef[0] - m.b_coef[1]).norm_sqr()
        + n[0] * p.xi_diff[0].norm_sqr()
        + n[1] * p.xi_diff[1].norm_sqr())
}

/// ⟨R²_{p1+p2}⟩ with p_j(ω) = −i(ω/Ω_j) q_j(ω).
///
/// Mirror j's own block collects its vacuum term and the Brownian forces on both mirrors:
/// (ω/Ω_j)² {|B_j(ω)|² + |B_j(−ω)|² + N1|Ξ_{j1}|² + N2|Ξ_{j2}|²}.
pub fn variance_v(ts: &TransferSet, config: &SystemConfig, temperature: f64) -> f64 {
    let w = ts.omega;
    let n = kernels(config, w, temperature);
    let om = [config.mirror1.omega_m, config.mirror2.omega_m];
    let (p, m) = (&ts.plus, &ts.minus);
    let own = |j: usize| {
        p.b_coef[j].norm_sqr()
            + m.b_coef[j].norm_sqr()
            + n[0] * p.xi[j][0].norm_sqr()
            + n[1] * p.xi[j][1].norm_sqr()
    };
    let cross_b =
        2.0 * ((p.b_coef[0] * p.b_coef[1].conj()).re + (m.b_coef[0] * m.b_coef[1].conj()).re);
    let cross_xi: f64 = (0..2)
        .map(|k| n[k] * (p.xi[0][k] * m.xi[1][k] + m.xi[0][k] * p.xi[1][k]).re)
        .sum();
    let r1 = w / om[0];
    let r2 = w / om[1];
    0.25 * (r1 * r1 * own(0) + r2 * r2 * own(1) + r1 * r2 * (cross_b + cross_xi))
}

/// |⟨[R_{q1}, R_{p1}]⟩| = (ω/2Ω1) | |B1(ω)|² − |B1(−ω)|² + ω Σ_k (Γ_k/Ω_k) |Ξ_{1k}(ω)|² |.
///
/// Temperature independent.
pub fn commutator_density(ts: &TransferSet, config: &SystemConfig) -> f64 {
    commutator_density_of(ts, config, 0)
}

/// Commutator density of mirror `j` (0 or 1).
pub fn commutator_density_of(ts: &TransferSet, config: &SystemConfig, j: usize) -> f64 {
    let w = ts.omega;
    if w == 0.0 {
        return 0.0;
    }
    let modes = config.modes();
    let (p, m) = (&ts.plus, &ts.minus);
    // |B(ω)|² − |B(−ω)|² = |B(ω)|² (|L1(−ω)|² − |L1(ω)|²)/|L1(−ω)|², and the numerator is −4Δω.
    let vacuum =
        p.b_coef[j].norm_sqr() * (-4.0 * config.cavity.detuning * w) / m.lorentz.0.norm_sqr();
    let brownian: f64 = (0..2)
        .map(|k| modes[k].gamma_m / modes[k].omega_m * p.xi[j][k].norm_sqr())
        .sum();
    (0.5 * w / modes[j].omega_m * (vacuum + w * brownian)).abs()
}

fn degree(var_u: f64, var_v: f64, comm_abs: f64) -> f64 {
    if comm_abs > 0.0 {
        var_u * var_v / (comm_abs * comm_abs)
    } else {
        f64::INFINITY
    }
}

/// Sum-of-variances inseparability test in its squared-commutator form.
pub fn sum_criterion(var_u: f64, var_v: f64, comm_abs: f64) -> bool {
    var_u + var_v < 2.0 * comm_abs * comm_abs
}

/// E < 1/4.
pub fn epr_criterion(point: &SpectralPoint) -> bool {
    point.entanglement_degree < 0.25
}

/// Builds the spectral point from an already assembled transfer set.
pub fn spectral_point(ts: &TransferSet, config: &SystemConfig, temperature: f64) -> SpectralPoint {
    let var_u = variance_u(ts, config, temperature);
    let var_v = variance_v(ts, config, temperature);
    let comm_abs = commutator_density(ts, config);
    let comm_abs_mirror2 = commutator_density_of(ts, config, 1);
    let e = degree(var_u, var_v, comm_abs);
    let mut point = SpectralPoint {
        omega: ts.omega,
        temperature,
        var_u,
        var_v,
        comm_abs,
        entanglement_degree: e,
        comm_abs_mirror2,
        flags: CriterionFlags {
            product_entangled: e < 1.0,
            sum_entangled: sum_criterion(var_u, var_v, comm_abs),
            epr: false,
        },
        near_singular: ts.near_singular,
        degenerate: !(comm_abs > 0.0),
    };
    point.flags.epr = epr_criterion(&point);
    point
}

/// Degree of entanglement E(ω) at bath temperature `temperature`; ω must be positive.
pub fn entanglement_degree(
    config: &SystemConfig,
    ss: &SteadyState,
    omega: f64,
    temperature: f64,
) -> Result<SpectralPoint> {
    if omega == 0.0 {
        return Err(Error::DegenerateFrequency { omega });
    }
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::invalid("omega", format!("must be > 0, got {omega}")));
    }
    if !(temperature.is_finite() && temperature >= 0.0) {
        return Err(Error::invalid(
            "temperature",
            format!("must be >= 0, got {temperature}"),
        ));
    }
    let ts = assemble_transfer(ss, config, omega);
    Ok(spectral_point(&ts, config, temperature))
}
