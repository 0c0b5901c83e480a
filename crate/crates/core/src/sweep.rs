//! Grid scans of E(ω, T): minimum location, entangled bandwidth and critical temperature.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{steady_state, SteadyState, SystemConfig};
use crate::response::{assemble_transfer, TransferSet};
use crate::spectra::{spectral_point, SpectralPoint};

/// Critical temperature bisection stops once the bracket is narrower than this (K).
pub const CRITICAL_TEMPERATURE_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Defaults to (Ω1 + Ω2)/2 when absent.
    pub omega_center: Option<f64>,
    pub omega_halfwidth: f64,
    pub omega_points: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub t_points: usize,
    /// Values of Ω2 − Ω1 used by [`run_mismatch_study`].
    pub mismatch_list: Vec<f64>,
}

impl Default for GridSpec {
    /// ±100 rad/s around the mean resonance with 401 points; 0.05–5 K with 100 points.
    fn default() -> Self {
        Self {
            omega_center: None,
            omega_halfwidth: 100.0,
            omega_points: 401,
            t_min: 0.05,
            t_max: 5.0,
            t_points: 100,
            mismatch_list: vec![0.0, 10.0, 20.0],
        }
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + step * i as f64 })
        .collect()
}

impl GridSpec {
    pub fn validate(&self, config: &SystemConfig) -> Result<()> {
        if self.omega_points < 2 || self.t_points < 2 {
            return Err(Error::Grid("omega_points and t_points must be >= 2".into()));
        }
        if !(self.omega_halfwidth > 0.0 && self.omega_halfwidth.is_finite()) {
            return Err(Error::Grid("omega_halfwidth must be > 0".into()));
        }
        let center = self.center(config);
        if !(center - self.omega_halfwidth > 0.0) {
            return Err(Error::Grid(format!(
                "omega window [{}, {}] must exclude 0",
                center - self.omega_halfwidth,
                center + self.omega_halfwidth
            )));
        }
        if !(self.t_min >= 0.0 && self.t_max > self.t_min && self.t_max.is_finite()) {
            return Err(Error::Grid(format!(
                "temperature range [{}, {}] is invalid",
                self.t_min, self.t_max
            )));
        }
        Ok(())
    }

    pub fn center(&self, config: &SystemConfig) -> f64 {
        self.omega_center
            .unwrap_or_else(|| config.mean_mechanical_frequency())
    }

    pub fn window(&self, config: &SystemConfig) -> (f64, f64) {
        let c = self.center(config);
        (c - self.omega_halfwidth, c + self.omega_halfwidth)
    }

    pub fn omegas(&self, config: &SystemConfig) -> Vec<f64> {
        let (lo, hi) = self.window(config);
        linspace(lo, hi, self.omega_points)
    }

    pub fn temperatures(&self) -> Vec<f64> {
        linspace(self.t_min, self.t_max, self.t_points)
    }

    pub fn omega_step(&self) -> f64 {
        2.0 * self.omega_halfwidth / (self.omega_points - 1) as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub omegas: Vec<f64>,
    pub temperatures: Vec<f64>,
    /// Temperature-major: `points[t * omegas.len() + w]`.
    pub points: Vec<SpectralPoint>,
    pub argmin_omega: Vec<f64>,
    pub min_entanglement: Vec<f64>,
    /// Measure of {ω : E < 1} per temperature, rad/s.
    pub bandwidth: Vec<f64>,
    pub critical_temperature: Option<f64>,
    pub near_singular_points: usize,
}

impl SweepResult {
    pub fn point(&self, t_index: usize, w_index: usize) -> &SpectralPoint {
        &self.points[t_index * self.omegas.len() + w_index]
    }

    pub fn row(&self, t_index: usize) -> &[SpectralPoint] {
        let n = self.omegas.len();
        &self.points[t_index * n..(t_index + 1) * n]
    }
}

/// Length of {ω : E(ω) < 1}, interpolating E linearly across each crossing.
pub fn entangled_bandwidth(omegas: &[f64], degrees: &[f64]) -> f64 {
    omegas
        .windows(2)
        .zip(degrees.windows(2))
        .map(|(w, e)| {
            let step = w[1] - w[0];
            match (e[0] < 1.0, e[1] < 1.0) {
                (true, true) => step,
                (false, false) => 0.0,
                (true, false) => crossing_fraction(e[0], e[1]) * step,
                (false, true) => crossing_fraction(e[1], e[0]) * step,
            }
        })
        .sum()
}

/// Fraction of the interval, measured from the entangled end, over which E < 1.
fn crossing_fraction(inside: f64, outside: f64) -> f64 {
    if !outside.is_finite() {
        return 0.5;
    }
    ((1.0 - inside) / (outside - inside)).clamp(0.0, 1.0)
}

fn argmin(points: &[SpectralPoint]) -> (f64, f64) {
    points.iter().fold((f64::NAN, f64::INFINITY), |best, p| {
        if p.entanglement_degree < best.1 {
            (p.omega, p.entanglement_degree)
        } else {
            best
        }
    })
}

fn transfers(ss: &SteadyState, config: &SystemConfig, omegas: &[f64]) -> Vec<TransferSet> {
    omegas
        .par_iter()
        .map(|&w| assemble_transfer(ss, config, w))
        .collect()
}

fn grid_min(transfers: &[TransferSet], config: &SystemConfig, temperature: f64) -> f64 {
    transfers
        .iter()
        .map(|ts| spectral_point(ts, config, temperature).entanglement_degree)
        .fold(f64::INFINITY, f64::min)
}

/// Evaluates E on the full (ω, T) grid of `grid` for `config` as given.
pub fn run_sweep(config: &SystemConfig, grid: &GridSpec) -> Result<SweepResult> {
    grid.validate(config)?;
    let ss = steady_state(config)?;
    let omegas = grid.omegas(config);
    let temperatures = grid.temperatures();
    let cache = transfers(&ss, config, &omegas);

    let n_w = omegas.len();
    let points: Vec<SpectralPoint> = (0..temperatures.len() * n_w)
        .into_par_iter()
        .map(|idx| spectral_point(&cache[idx % n_w], config, temperatures[idx / n_w]))
        .collect();

    let mut argmin_omega = Vec::with_capacity(temperatures.len());
    let mut min_entanglement = Vec::with_capacity(temperatures.len());
    let mut bandwidth = Vec::with_capacity(temperatures.len());
    for row in points.chunks(n_w) {
        let (w, e) = argmin(row);
        argmin_omega.push(w);
        min_entanglement.push(e);
        let degrees: Vec<f64> = row.iter().map(|p| p.entanglement_degree).collect();
        bandwidth.push(entangled_bandwidth(&omegas, &degrees));
    }

    let critical_temperature = min_entanglement
        .windows(2)
        .position(|m| m[0] < 1.0 && m[1] >= 1.0)
        .map(|i| {
            bisect_crossing(temperatures[i], temperatures[i + 1], |t| {
                grid_min(&cache, config, t)
            })
        });

    Ok(SweepResult {
        near_singular_points: points.iter().filter(|p| p.near_singular).count(),
        omegas,
        temperatures,
        points,
        argmin_omega,
        min_entanglement,
        bandwidth,
        critical_temperature,
    })
}

/// One sweep per entry of `grid.mismatch_list`, with Ω2 = Ω1 + mismatch.
pub fn run_mismatch_study(
    config: &SystemConfig,
    grid: &GridSpec,
) -> Result<Vec<(f64, SweepResult)>> {
    grid.mismatch_list
        .iter()
        .map(|&m| run_sweep(&config.with_mismatch(m), grid).map(|r| (m, r)))
        .collect()
}

/// Bisects on T for min E(T) = 1, given min E(lo) < 1 <= min E(hi).
fn bisect_crossing(mut lo: f64, mut hi: f64, min_e: impl Fn(f64) -> f64) -> f64 {
    while hi - lo > CRITICAL_TEMPERATURE_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if min_e(mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Minimum of E over a frequency window: grid scan followed by golden-section refinement
/// around the best sample.
pub fn minimum_over_window(
    config: &SystemConfig,
    ss: &SteadyState,
    window: (f64, f64),
    samples: usize,
    temperature: f64,
) -> (f64, f64) {
    let omegas = linspace(window.0, window.1, samples.max(3));
    let step = omegas[1] - omegas[0];
    let eval = |w: f64| {
        spectral_point(&assemble_transfer(ss, config, w), config, temperature).entanglement_degree
    };
    let (mut best_w, mut best_e) =
        omegas
            .iter()
            .map(|&w| (w, eval(w)))
            .fold(
                (f64::NAN, f64::INFINITY),
                |b, c| if c.1 < b.1 { c } else { b },
            );
    if !best_e.is_finite() {
        return (best_w, best_e);
    }
    let mut a = (best_w - step).max(window.0);
    let mut b = (best_w + step).min(window.1);
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = eval(x1);
    let mut f2 = eval(x2);
    for _ in 0..60 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = eval(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = eval(x2);
        }
    }
    for (w, e) in [(x1, f1), (x2, f2)] {
        if e < best_e {
            best_w = w;
            best_e = e;
        }
    }
    (best_w, best_e)
}

/// Temperature at which min over `omega_window` of E crosses 1, to within 1 mK.
pub fn find_critical_temperature(config: &SystemConfig, omega_window: (f64, f64)) -> Result<f64> {
    if !(omega_window.0 > 0.0 && omega_window.1 > omega_window.0) {
        return Err(Error::Grid(format!(
            "omega window [{}, {}] must be positive and non-empty",
            omega_window.0, omega_window.1
        )));
    }
    let ss = steady_state(config)?;
    let min_e = |t: f64| minimum_over_window(config, &ss, omega_window, 201, t).1;

    // T = 0 is not probed: the decoupled limit sits exactly at E = 1 there and rounding
    // decides the side.
    const T_FLOOR: f64 = 1e-3;
    const T_CEIL: f64 = 1e4;
    let mut lo = T_FLOOR;
    if !(min_e(lo) < 1.0) {
        return Err(Error::NoCrossing { lo, hi: T_CEIL });
    }
    let mut hi = 2.0 * lo;
    while min_e(hi) < 1.0 {
        lo = hi;
        hi *= 2.0;
        if hi > T_CEIL {
            return Err(Error::NoCrossing {
                lo: T_FLOOR,
                hi: T_CEIL,
            });
        }
    }
    Ok(bisect_crossing(lo, hi, min_e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub power_multiplier: f64,
    pub effective_couplings: [f64; 2],
    pub min_entanglement: f64,
    pub argmin_omega: f64,
    pub bandwidth: f64,
    pub near_singular_points: usize,
}

/// Scans E over the grid's frequency axis at `config.temperature` for each input-power
/// multiplier. min E is expected to be nonincreasing in the drive power.
pub fn coupling_scaling_study(
    config: &SystemConfig,
    grid: &GridSpec,
    power_multipliers: &[f64],
) -> Result<Vec<ScalingRow>> {
    grid.validate(config)?;
    let omegas = grid.omegas(config);
    power_multipliers
        .iter()
        .map(|&k| {
            if !(k >= 0.0 && k.is_finite()) {
                return Err(Error::invalid(
                    "power multiplier",
                    format!("must be >= 0, got {k}"),
                ));
            }
            let cfg = config.with_power_scaled(k);
            let ss = steady_state(&cfg)?;
            let row: Vec<SpectralPoint> = transfers(&ss, &cfg, &omegas)
                .iter()
                .map(|ts| spectral_point(ts, &cfg, cfg.temperature))
                .collect();
            let (w, e) = argmin(&row);
            let degrees: Vec<f64> = row.iter().map(|p| p.entanglement_degree).collect();
            Ok(ScalingRow {
                power_multiplier: k,
                effective_couplings: ss.effective_couplings,
                min_entanglement: e,
                argmin_omega: w,
                bandwidth: entangled_bandwidth(&omegas, &degrees),
                near_singular_points: row.iter().filter(|p| p.near_singular).count(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_grid() -> GridSpec {
        GridSpec {
            omega_points: 81,
            t_points: 12,
            ..GridSpec::default()
        }
    }

    #[test]
    fn bandwidth_interpolation() {
        let w = [0.0, 1.0, 2.0, 3.0];
        assert_eq!(entangled_bandwidth(&w, &[2.0, 2.0, 3.0, 1.5]), 0.0);
        assert_eq!(entangled_bandwidth(&w, &[0.5, 0.5, 0.5, 0.5]), 3.0);
        // crossings at 0.5 and 2.5
        let bw = entangled_bandwidth(&w, &[1.5, 0.5, 0.5, 1.5]);
        assert!((bw - 2.0).abs() < 1e-15);
        assert_eq!(
            entangled_bandwidth(&w, &[f64::INFINITY, 0.5, 1.0, 1.0]),
            1.5
        );
    }

    #[test]
    fn grid_validation() {
        let c = SystemConfig::baseline();
        assert!(GridSpec::default().validate(&c).is_ok());
        let bad = GridSpec {
            omega_points: 1,
            ..GridSpec::default()
        };
        assert!(bad.validate(&c).is_err());
        let crosses_zero = GridSpec {
            omega_center: Some(50.0),
            ..GridSpec::default()
        };
        assert!(crosses_zero.validate(&c).is_err());
        let omegas = GridSpec::default().omegas(&c);
        assert_eq!(omegas.len(), 401);
        assert_eq!(omegas[0], 1e6 - 100.0);
        assert_eq!(omegas[200], 1e6);
        assert_eq!(omegas[400], 1e6 + 100.0);
        let ts = GridSpec::default().temperatures();
        assert_eq!(ts[0], 0.05);
        assert!((ts[39] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn sweep_shape_and_determinism() {
        let c = SystemConfig::baseline();
        let g = small_grid();
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let four = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        let a = one.install(|| run_sweep(&c, &g)).unwrap();
        let b = four.install(|| run_sweep(&c, &g)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.points.len(), 81 * 12);
        assert_eq!(a.point(3, 7).omega, a.omegas[7]);
        assert_eq!(a.point(3, 7).temperature, a.temperatures[3]);
    }

    #[test]
    fn dark_cavity_never_crosses() {
        let c = SystemConfig::baseline().with_power_scaled(0.0);
        let err = find_critical_temperature(&c, (1e6 - 50.0, 1e6 + 50.0)).unwrap_err();
        assert!(matches!(err, Error::NoCrossing { .. }));
        let r = run_sweep(&c, &small_grid()).unwrap();
        assert!(r.bandwidth.iter().all(|&b| b == 0.0));
        assert!(r.critical_temperature.is_none());
    }

    #[test]
    fn scaling_study_rows() {
        let c = SystemConfig::baseline().with_temperature(1.0);
        let g = GridSpec {
            omega_points: 201,
            ..GridSpec::default()
        };
        let rows = coupling_scaling_study(&c, &g, &[0.0, 1.0, 4.0]).unwrap();
        assert!(rows[0].min_entanglement >= 1.0);
        assert!(rows[2].min_entanglement <= rows[1].min_entanglement);
        assert_eq!(rows[0].bandwidth, 0.0);
        assert!(coupling_scaling_study(&c, &g, &[-1.0]).is_err());
    }

    #[test]
    fn scaling_unit_multiplier_matches_sweep_bitwise() {
        let c = SystemConfig::baseline().with_temperature(0.05);
        let g = small_grid();
        let rows = coupling_scaling_study(&c, &g, &[1.0]).unwrap();
        let sweep = run_sweep(&c, &g).unwrap();
        assert_eq!(sweep.temperatures[0], 0.05);
        assert_eq!(rows[0].min_entanglement, sweep.min_entanglement[0]);
        assert_eq!(rows[0].argmin_omega, sweep.argmin_omega[0]);
        assert_eq!(rows[0].bandwidth, sweep.bandwidth[0]);
    }

    #[test]
    fn refined_minimum_not_above_grid_minimum() {
        let c = SystemConfig::baseline().with_mismatch(10.0);
        let ss = steady_state(&c).unwrap();
        let window = (
            c.mean_mechanical_frequency() - 100.0,
            c.mean_mechanical_frequency() + 100.0,
        );
        let (w, e) = minimum_over_window(&c, &ss, window, 41, 0.3);
        let coarse = linspace(window.0, window.1, 41)
            .into_iter()
            .map(|w| {
                crate::spectra::entanglement_degree(&c, &ss, w, 0.3)
                    .unwrap()
                    .entanglement_degree
            })
            .fold(f64::INFINITY, f64::min);
        assert!(e <= coarse);
        assert!((w - c.mean_mechanical_frequency()).abs() < 5.0);
    }
}
