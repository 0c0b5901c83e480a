//! Closed-form frequency-domain response of the two mirror modes.
//!
//! Fourier convention: O(ω) = ∫dt e^{iωt} O(t), so d/dt → −iω. The mirror positions are
//!
//! ```text
//! q_j(ω) = B_j(ω) b_in(ω) + B_j*(−ω) b_in†(ω) + Σ_k Ξ_{j,k}(ω) ξ_k(ω)
//! ```
//!
//! with
//!
//! ```text
//! B_j(ω)    = (−1)^j [1/(Ω_{3−j} χ_{3−j})] √γ_b G_j β* / ((γ_b/2 − i(Δ_b + ω)) D(ω))
//! Ξ_{j,k}(ω) = {δ_{jk}/(Ω_{3−j} χ_{3−j}) − i G_{3−j} G_{3−k} |β|² Λ(ω)} / D(ω)
//! D(ω)      = 1/(Ω_1 Ω_2 χ_1 χ_2) − i |β|² [G_1²/(Ω_2 χ_2) + G_2²/(Ω_1 χ_1)] Λ(ω)
//! Λ(ω)      = 1/(γ_b/2 − i(Δ_b + ω)) − 1/(γ_b/2 + i(Δ_b − ω))
//! ```

use num_complex::Complex64;

use crate::params::{CavityParams, MechanicalMode, SteadyState, SystemConfig};

/// |D(ω)| below this fraction of its uncoupled value flags the point as near-singular.
pub const DEFAULT_SINGULAR_THRESHOLD: f64 = 1e-6;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// χ(ω) = 1 / (Ω² − ω² − iωΓ).
pub fn susceptibility(mode: &MechanicalMode, omega: f64) -> Complex64 {
    inverse_response(mode, omega).inv() / mode.omega_m
}

/// 1/(Ω χ(ω)) = ((Ω − ω)(Ω + ω) − iωΓ)/Ω, evaluated without forming χ.
fn inverse_response(mode: &MechanicalMode, omega: f64) -> Complex64 {
    let om = mode.omega_m;
    Complex64::new((om - omega) * (om + omega), -omega * mode.gamma_m) / om
}

/// The two cavity factors (γ_b/2 − i(Δ_b + ω), γ_b/2 + i(Δ_b − ω)).
pub fn cavity_lorentzians(cavity: &CavityParams, omega: f64) -> (Complex64, Complex64) {
    let half = 0.5 * cavity.kappa;
    (
        Complex64::new(half, -(cavity.detuning + omega)),
        Complex64::new(half, cavity.detuning - omega),
    )
}

/// Subexpressions shared by every transfer coefficient at one frequency.
#[derive(Debug, Clone, Copy)]
struct Shared {
    chi: [Complex64; 2],
    inv: [Complex64; 2],
    lorentz: (Complex64, Complex64),
    bracket: Complex64,
    big_d: Complex64,
    big_d_free: Complex64,
}

fn shared(ss: &SteadyState, config: &SystemConfig, omega: f64) -> Shared {
    let modes = config.modes();
    let inv = [
        inverse_response(&modes[0], omega),
        inverse_response(&modes[1], omega),
    ];
    let chi = [
        inv[0].inv() / modes[0].omega_m,
        inv[1].inv() / modes[1].omega_m,
    ];
    let lorentz = cavity_lorentzians(&config.cavity, omega);
    // 1/L1 − 1/L2 = (L2 − L1)/(L1 L2) = 2iΔ/(L1 L2)
    let bracket = 2.0 * I * config.cavity.detuning / (lorentz.0 * lorentz.1);
    let g = ss.couplings;
    let big_d_free = inv[0] * inv[1];
    let big_d =
        big_d_free - I * ss.photon_number * (g[0] * g[0] * inv[1] + g[1] * g[1] * inv[0]) * bracket;
    Shared {
        chi,
        inv,
        lorentz,
        bracket,
        big_d,
        big_d_free,
    }
}

fn b_from(s: &Shared, ss: &SteadyState, config: &SystemConfig) -> [Complex64; 2] {
    let common = config.cavity.kappa.sqrt() * ss.beta.conj() / (s.lorentz.0 * s.big_d);
    [
        -s.inv[1] * ss.couplings[0] * common,
        s.inv[0] * ss.couplings[1] * common,
    ]
}

fn xi_from(s: &Shared, ss: &SteadyState) -> [[Complex64; 2]; 2] {
    let g = ss.couplings;
    let cross = I * ss.photon_number * s.bracket;
    let mut xi = [[Complex64::default(); 2]; 2];
    for (j, row) in xi.iter_mut().enumerate() {
        for (k, entry) in row.iter_mut().enumerate() {
            let diag = if j == k {
                s.inv[1 - j]
            } else {
                Complex64::default()
            };
            *entry = (diag - g[1 - j] * g[1 - k] * cross) / s.big_d;
        }
    }
    xi
}

/// Ξ_{1,k} − Ξ_{2,k} = {δ_{1k}/(Ω_2χ_2) − δ_{2k}/(Ω_1χ_1) − i G_{3−k}(G_2 − G_1)|β|²Λ}/D,
/// which avoids cancelling the two large cross terms for nearly identical couplings.
fn xi_diff_from(s: &Shared, ss: &SteadyState) -> [Complex64; 2] {
    let g = ss.couplings;
    let cross = I * ss.photon_number * s.bracket * (g[1] - g[0]);
    [
        (s.inv[1] - g[1] * cross) / s.big_d,
        (-s.inv[0] - g[0] * cross) / s.big_d,
    ]
}

/// D(ω).
pub fn denominator_d(ss: &SteadyState, config: &SystemConfig, omega: f64) -> Complex64 {
    shared(ss, config, omega).big_d
}

/// (B_1(ω), B_2(ω)): transduction of cavity vacuum noise into mirror motion.
pub fn radiation_transfer(ss: &SteadyState, config: &SystemConfig, omega: f64) -> [Complex64; 2] {
    b_from(&shared(ss, config, omega), ss, config)
}

/// Ξ_{j,k}(ω): response of mirror j to the Brownian force on mirror k.
pub fn brownian_transfer(
    ss: &SteadyState,
    config: &SystemConfig,
    omega: f64,
) -> [[Complex64; 2]; 2] {
    xi_from(&shared(ss, config, omega), ss)
}

/// All response functions at a single signed frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferHalf {
    pub omega: f64,
    pub chi: [Complex64; 2],
    pub lorentz: (Complex64, Complex64),
    pub big_d: Complex64,
    pub b_coef: [Complex64; 2],
    pub xi: [[Complex64; 2]; 2],
    /// Ξ_{1,k} − Ξ_{2,k}.
    pub xi_diff: [Complex64; 2],
    pub near_singular: bool,
}

/// Response functions at +ω and −ω.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferSet {
    pub omega: f64,
    pub plus: TransferHalf,
    pub minus: TransferHalf,
    pub near_singular: bool,
}

fn half(ss: &SteadyState, config: &SystemConfig, omega: f64, threshold: f64) -> TransferHalf {
    let s = shared(ss, config, omega);
    TransferHalf {
        omega,
        chi: s.chi,
        lorentz: s.lorentz,
        big_d: s.big_d,
        b_coef: b_from(&s, ss, config),
        xi: xi_from(&s, ss),
        xi_diff: xi_diff_from(&s, ss),
        near_singular: !(s.big_d.norm() >= threshold * s.big_d_free.norm()),
    }
}

pub fn assemble_transfer(ss: &SteadyState, config: &SystemConfig, omega: f64) -> TransferSet {
    assemble_transfer_with_threshold(ss, config, omega, DEFAULT_SINGULAR_THRESHOLD)
}

pub fn assemble_transfer_with_threshold(
    ss: &SteadyState,
    config: &SystemConfig,
    omega: f64,
    threshold: f64,
) -> TransferSet {
    let plus = half(ss, config, omega, threshold);
    let minus = half(ss, config, -omega, threshold);
    TransferSet {
        omega,
        plus,
        minus,
        near_singular: plus.near_singular || minus.near_singular,
    }
}
