//! Brute-force reference: direct frequency-domain inversion of the linearized Langevin
//! equations.
//!
//! State ordering is (b, b†, q1, p1, q2, p2); noise channels are (b_in, b_in†, ξ1, ξ2).
//! Nothing here reuses the closed forms in [`crate::response`] or [`crate::spectra`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::params::{PhysicalConstants, SteadyState, SystemConfig};

pub const STATES: usize = 6;
pub const CHANNELS: usize = 4;
const REFINEMENT_STEPS: usize = 2;

pub const B: usize = 0;
pub const B_DAG: usize = 1;
pub const Q1: usize = 2;
pub const P1: usize = 3;
pub const Q2: usize = 4;
pub const P2: usize = 5;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// dx/dt = A x + N n(t) for the fluctuation vector x.
#[derive(Debug, Clone, Copy)]
pub struct LinearSystem {
    pub drift: Matrix<STATES, STATES>,
    pub noise_map: Matrix<STATES, CHANNELS>,
    omegas: [f64; 2],
    gammas: [f64; 2],
    constants: PhysicalConstants,
}

pub fn build_system(config: &SystemConfig, ss: &SteadyState) -> LinearSystem {
    let zero = Complex64::default();
    let mut a = [[zero; STATES]; STATES];
    let cav = &config.cavity;
    let beta = ss.beta;
    let g = ss.couplings;
    let half = 0.5 * cav.kappa;

    // ḃ = iΔ b − iβ(G1 q1 − G2 q2) − (γ/2) b + √γ b_in
    a[B][B] = I * cav.detuning - half;
    a[B][Q1] = -I * beta * g[0];
    a[B][Q2] = I * beta * g[1];
    // adjoint row
    a[B_DAG][B_DAG] = a[B][B].conj();
    a[B_DAG][Q1] = a[B][Q1].conj();
    a[B_DAG][Q2] = a[B][Q2].conj();

    let modes = config.modes();
    for (j, (q, p)) in [(Q1, P1), (Q2, P2)].into_iter().enumerate() {
        let sign = if j == 0 { -1.0 } else { 1.0 };
        // q̇_j = Ω_j p_j
        a[q][p] = modes[j].omega_m.into();
        // ṗ_j = −Ω_j q_j + (−1)^j G_j (β* b + β b†) − Γ_j p_j + ξ_j
        a[p][q] = (-modes[j].omega_m).into();
        a[p][p] = (-modes[j].gamma_m).into();
        a[p][B] = sign * g[j] * beta.conj();
        a[p][B_DAG] = sign * g[j] * beta;
    }

    let mut n = [[zero; CHANNELS]; STATES];
    n[B][0] = cav.kappa.sqrt().into();
    n[B_DAG][1] = cav.kappa.sqrt().into();
    n[P1][2] = 1.0.into();
    n[P2][3] = 1.0.into();

    LinearSystem {
        drift: a,
        noise_map: n,
        omegas: [modes[0].omega_m, modes[1].omega_m],
        gammas: [modes[0].gamma_m, modes[1].gamma_m],
        constants: config.constants,
    }
}

impl LinearSystem {
    /// M(ω) = −iω·1 − A, so that M(ω) x(ω) = N n(ω).
    pub fn system_matrix(&self, omega: f64) -> Matrix<STATES, STATES> {
        let mut m = self.drift;
        for (i, row) in m.iter_mut().enumerate() {
            for entry in row.iter_mut() {
                *entry = -*entry;
            }
            row[i] -= I * omega;
        }
        m
    }

    /// Unsymmetrized Brownian density S(ω) in ⟨ξ(ω)ξ(ω')⟩ = 2πδ(ω+ω') S(ω):
    /// (Γ/Ω) ω (n̄(ω) + 1), with n̄ the Bose occupation.
    pub fn brownian_density(&self, channel: usize, omega: f64, temperature: f64) -> f64 {
        let ratio = self.gammas[channel] / self.omegas[channel];
        if temperature == 0.0 {
            return ratio * omega.max(0.0);
        }
        let kt_over_hbar = self.constants.k_boltzmann * temperature / self.constants.hbar;
        if omega == 0.0 {
            return ratio * kt_over_hbar;
        }
        let occupation = 1.0 / (omega / kt_over_hbar).exp_m1();
        ratio * omega * (occupation + 1.0)
    }

    /// ⟨n_c(ω) n_c'(−ω)⟩ densities.
    pub fn noise_correlation(&self, omega: f64, temperature: f64) -> [[f64; CHANNELS]; CHANNELS] {
        let mut s = [[0.0; CHANNELS]; CHANNELS];
        // ⟨b_in(t) b_in†(t')⟩ = δ(t − t'), ⟨b_in† b_in⟩ = 0
        s[0][1] = 1.0;
        s[2][2] = self.brownian_density(0, omega, temperature);
        s[3][3] = self.brownian_density(1, omega, temperature);
        s
    }

    /// [n_c(ω), n_c'(−ω)] densities; independent of temperature.
    pub fn noise_commutator(&self, omega: f64) -> [[f64; CHANNELS]; CHANNELS] {
        let mut k = [[0.0; CHANNELS]; CHANNELS];
        k[0][1] = 1.0;
        k[1][0] = -1.0;
        k[2][2] = self.gammas[0] / self.omegas[0] * omega;
        k[3][3] = self.gammas[1] / self.omegas[1] * omega;
        k
    }

    pub fn determinant(&self, omega: f64) -> Result<Complex64> {
        let id = identity::<STATES>();
        linalg::solve(self.system_matrix(omega), id)
            .map(|(_, det)| det)
            .ok_or(Error::Singular { omega })
    }

    /// The closed-form denominator recovered as det M(ω) / (M_bb M_b†b† Ω1 Ω2).
    pub fn denominator_from_determinant(&self, omega: f64) -> Result<Complex64> {
        let m = self.system_matrix(omega);
        let det = self.determinant(omega)?;
        Ok(det / (m[B][B] * m[B_DAG][B_DAG] * self.omegas[0] * self.omegas[1]))
    }
}

fn identity<const N: usize>() -> Matrix<N, N> {
    let mut m = [[Complex64::default(); N]; N];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0.into();
    }
    m
}

/// T(ω) with x(ω) = T(ω) n(ω).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub omega: f64,
    pub coefficients: Matrix<STATES, CHANNELS>,
}

impl TransferMatrix {
    pub fn row(&self, state: usize) -> [Complex64; CHANNELS] {
        self.coefficients[state]
    }
}

pub fn solve_transfer(sys: &LinearSystem, omega: f64) -> Result<TransferMatrix> {
    let (coefficients, _) =
        linalg::solve_refined(sys.system_matrix(omega), sys.noise_map, REFINEMENT_STEPS)
            .ok_or(Error::Singular { omega })?;
    Ok(TransferMatrix {
        omega,
        coefficients,
    })
}

/// Oracle values of the three densities and E.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleDensities {
    pub var_u: f64,
    pub var_v: f64,
    pub comm_abs: f64,
    pub entanglement_degree: f64,
}

type Row = [Complex64; CHANNELS];

fn combine(a: &Row, b: &Row, sign: f64) -> Row {
    let mut out = *a;
    for (o, v) in out.iter_mut().zip(b) {
        *o += sign * v;
    }
    out
}

/// Σ_cc' a_c(ω) W_cc' b_c'(−ω)
fn bilinear(a_plus: &Row, weights: &[[f64; CHANNELS]; CHANNELS], b_minus: &Row) -> Complex64 {
    let mut acc = Complex64::default();
    for c in 0..CHANNELS {
        for d in 0..CHANNELS {
            if weights[c][d] != 0.0 {
                acc += a_plus[c] * weights[c][d] * b_minus[d];
            }
        }
    }
    acc
}

pub fn oracle_densities(
    sys: &LinearSystem,
    omega: f64,
    temperature: f64,
) -> Result<OracleDensities> {
    let plus = solve_transfer(sys, omega)?;
    let minus = solve_transfer(sys, -omega)?;
    let s_plus = sys.noise_correlation(omega, temperature);
    let s_minus = sys.noise_correlation(-omega, temperature);

    let u = |t: &TransferMatrix| combine(&t.row(Q1), &t.row(Q2), -1.0);
    let v = |t: &TransferMatrix| combine(&t.row(P1), &t.row(P2), 1.0);

    // ⟨R_O²⟩ = ¼ [C_OO(ω) + C_OO(−ω)]
    let var = |row: &dyn Fn(&TransferMatrix) -> Row| {
        let forward = bilinear(&row(&plus), &s_plus, &row(&minus));
        let backward = bilinear(&row(&minus), &s_minus, &row(&plus));
        0.25 * (forward + backward).re
    };
    let var_u = var(&u);
    let var_v = var(&v);

    // ⟨[R_q, R_p]⟩ = ¼ ([q(ω), p(−ω)] + [q(−ω), p(ω)])
    let k_plus = sys.noise_commutator(omega);
    let k_minus = sys.noise_commutator(-omega);
    let comm = 0.25
        * (bilinear(&plus.row(Q1), &k_plus, &minus.row(P1))
            + bilinear(&minus.row(Q1), &k_minus, &plus.row(P1)));
    let comm_abs = comm.norm();
    let entanglement_degree = if comm_abs > 0.0 {
        var_u * var_v / (comm_abs * comm_abs)
    } else {
        f64::INFINITY
    };
    Ok(OracleDensities {
        var_u,
        var_v,
        comm_abs,
        entanglement_degree,
    })
}

/// ‖M(ω)T(ω) − N‖_max / ‖N‖_max.
pub fn residual(sys: &LinearSystem, transfer: &TransferMatrix) -> f64 {
    let m = sys.system_matrix(transfer.omega);
    let prod = linalg::mul(&m, &transfer.coefficients);
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for r in 0..STATES {
        for c in 0..CHANNELS {
            worst = worst.max((prod[r][c] - sys.noise_map[r][c]).norm());
            scale = scale.max(sys.noise_map[r][c].norm());
        }
    }
    worst / scale
}
