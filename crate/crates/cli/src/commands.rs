use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use optomech_core::config::parse_config;
use optomech_core::sweep::{coupling_scaling_study, run_sweep, ScalingRow};
use optomech_core::table::write_figure_csv;
use optomech_core::verify::{run_verification, Corruption, Quantity, VerifyOptions};
use optomech_core::{
    entanglement_degree, self_consistent_detuning, steady_state, GridSpec, SpectralPoint,
    SteadyState, SweepResult, SystemConfig,
};
use serde::Serialize;

use crate::args::{
    ConfigArg, EvalArgs, FigureArgs, Format, SteadyStateArgs, SweepArgs, VerifyArgs,
};
use crate::error::CliError;
use crate::manifest::{sidecar_path, RunManifest, WithManifest};

type Result<T> = std::result::Result<T, CliError>;

pub fn load_config(arg: &ConfigArg) -> Result<SystemConfig> {
    let config = match &arg.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            parse_config(&text)?
        }
        None => SystemConfig::baseline(),
    };
    for w in config.warnings() {
        eprintln!("warning: {w}");
    }
    Ok(config)
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("output types serialize")
}

fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, format!("{text}\n")).map_err(|e| CliError::io(p, e)),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn write_csv(path: &Path, sweep: &SweepResult, manifest: &RunManifest) -> Result<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_figure_csv(&mut out, sweep)
        .and_then(|_| out.flush())
        .map_err(|e| CliError::io(path, e))?;
    let side = sidecar_path(path);
    fs::write(&side, to_json(manifest)).map_err(|e| CliError::io(&side, e))
}

#[derive(Serialize)]
struct SweepSummary<'a> {
    temperatures: &'a [f64],
    argmin_omega: &'a [f64],
    min_entanglement: &'a [f64],
    bandwidth: &'a [f64],
    critical_temperature: Option<f64>,
    near_singular_points: usize,
    rows: usize,
}

impl<'a> From<&'a SweepResult> for SweepSummary<'a> {
    fn from(s: &'a SweepResult) -> Self {
        Self {
            temperatures: &s.temperatures,
            argmin_omega: &s.argmin_omega,
            min_entanglement: &s.min_entanglement,
            bandwidth: &s.bandwidth,
            critical_temperature: s.critical_temperature,
            near_singular_points: s.near_singular_points,
            rows: s.points.len(),
        }
    }
}

#[derive(Serialize)]
struct EvalOutput {
    point: SpectralPoint,
    steady_state: SteadyState,
}

pub fn eval(args: &EvalArgs) -> Result<()> {
    let start = Instant::now();
    let config = load_config(&args.config)?;
    let temperature = args.temp.unwrap_or(config.temperature);
    if args.omega < 0.0 || !args.omega.is_finite() {
        return Err(CliError::Usage(format!(
            "--omega must be > 0, got {}",
            args.omega
        )));
    }
    if !(temperature >= 0.0 && temperature.is_finite()) {
        return Err(CliError::Usage(format!(
            "--temp must be >= 0, got {temperature}"
        )));
    }
    let ss = steady_state(&config)?;
    let point = entanglement_degree(&config, &ss, args.omega, temperature)?;
    let manifest = RunManifest::new("eval", &config).finish(start.elapsed());
    let output = EvalOutput {
        point,
        steady_state: ss,
    };
    write_text(
        None,
        &to_json(&WithManifest {
            manifest: &manifest,
            result: &output,
        }),
    )
}

pub fn figure_mismatch(figure: u8) -> Result<f64> {
    match figure {
        2 => Ok(0.0),
        3 => Ok(10.0),
        4 => Ok(20.0),
        n => Err(CliError::Usage(format!(
            "figure must be 2, 3 or 4, got {n}"
        ))),
    }
}

pub fn figure(args: &FigureArgs) -> Result<()> {
    let start = Instant::now();
    let mismatch = figure_mismatch(args.figure)?;
    let config = load_config(&args.config)?.with_mismatch(mismatch);
    let grid = args.grid.apply(GridSpec::default());
    let sweep = run_sweep(&config, &grid)?;
    let mut manifest = RunManifest::new(format!("figure {}", args.figure), &config);
    manifest.grid = Some(grid);
    let manifest = manifest.finish(start.elapsed());
    write_csv(&args.out, &sweep, &manifest)?;
    println!("{}", to_json(&SweepSummary::from(&sweep)));
    Ok(())
}

#[derive(Serialize)]
struct ScalingOutput<'a> {
    temperature: f64,
    rows: &'a [ScalingRow],
}

pub fn sweep(args: &SweepArgs) -> Result<()> {
    let start = Instant::now();
    let mut config = load_config(&args.config)?;
    if let Some(m) = args.mismatch {
        config = config.with_mismatch(m);
    }
    let grid = args.grid.apply(GridSpec::default());
    let mut manifest = RunManifest::new("sweep", &config);
    manifest.grid = Some(grid.clone());

    if let Some(multipliers) = &args.power_multipliers {
        if multipliers.iter().any(|k| k.is_nan() || *k < 0.0) {
            return Err(CliError::Usage("power multipliers must be >= 0".into()));
        }
        let rows = coupling_scaling_study(&config, &grid, multipliers)?;
        let manifest = manifest.finish(start.elapsed());
        let result = ScalingOutput {
            temperature: config.temperature,
            rows: &rows,
        };
        return match args.format {
            Format::Json => write_text(
                args.out.as_deref(),
                &to_json(&WithManifest {
                    manifest: &manifest,
                    result: &result,
                }),
            ),
            Format::Csv => {
                let mut text = String::from("power_multiplier,min_E,argmin_omega_rad_s,bandwidth_rad_s,near_singular_points\n");
                for r in &rows {
                    text.push_str(&format!(
                        "{:.16e},{:.16e},{:.16e},{:.16e},{}\n",
                        r.power_multiplier,
                        r.min_entanglement,
                        r.argmin_omega,
                        r.bandwidth,
                        r.near_singular_points
                    ));
                }
                match &args.out {
                    Some(p) => {
                        fs::write(p, text).map_err(|e| CliError::io(p, e))?;
                        let side = sidecar_path(p);
                        fs::write(&side, to_json(&manifest)).map_err(|e| CliError::io(&side, e))
                    }
                    None => io::stdout()
                        .write_all(text.as_bytes())
                        .map_err(|e| CliError::io(Path::new("<stdout>"), e)),
                }
            }
        };
    }

    let sweep = run_sweep(&config, &grid)?;
    let manifest = manifest.finish(start.elapsed());
    match (&args.out, args.format) {
        (Some(p), Format::Csv) => write_csv(p, &sweep, &manifest)?,
        (Some(p), Format::Json) => write_text(
            Some(p),
            &to_json(&WithManifest {
                manifest: &manifest,
                result: &sweep,
            }),
        )?,
        (None, _) => {}
    }
    println!("{}", to_json(&SweepSummary::from(&sweep)));
    Ok(())
}

pub fn parse_corruption(spec: &str) -> Result<Corruption> {
    let (name, factor) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("--corrupt expects name=factor, got `{spec}`")))?;
    let quantity: Quantity = name
        .parse()
        .map_err(|e: optomech_core::Error| CliError::Usage(e.to_string()))?;
    let factor: f64 = factor
        .parse()
        .map_err(|_| CliError::Usage(format!("--corrupt factor `{factor}` is not a number")))?;
    Ok(Corruption { quantity, factor })
}

pub fn verify(args: &VerifyArgs) -> Result<()> {
    let start = Instant::now();
    let config = load_config(&args.config)?;
    if args.draws < 1 {
        return Err(CliError::Usage("--draws must be >= 1".into()));
    }
    let options = VerifyOptions {
        draws: args.draws,
        seed: args.seed,
        threshold: args.threshold,
        corruption: args.corrupt.as_deref().map(parse_corruption).transpose()?,
        ..VerifyOptions::default()
    };
    let report = run_verification(&config, &options)?;
    let mut manifest = RunManifest::new("verify", &config);
    manifest.worst_oracle_error = Some(report.worst_error());
    manifest.seed = Some(args.seed);
    manifest.sampling = Some(options.ranges.clone());
    let manifest = manifest.finish(start.elapsed());
    write_text(
        args.out.as_deref(),
        &to_json(&WithManifest {
            manifest: &manifest,
            result: &report,
        }),
    )?;
    if report.passed {
        Ok(())
    } else {
        let names: Vec<String> = report
            .failed
            .iter()
            .map(|q| format!("{q} ({:.3e})", report.error_of(*q)))
            .collect();
        Err(CliError::Verification(format!(
            "relative error above {:e} for {}",
            report.threshold,
            names.join(", ")
        )))
    }
}

#[derive(Serialize)]
struct SteadyStateOutput {
    steady_state: SteadyState,
    optical_frequency_rad_s: f64,
    drive_frequency_rad_s: f64,
    bare_detuning_rad_s: Option<f64>,
    effective_detuning_rad_s: Option<f64>,
}

pub fn steady(args: &SteadyStateArgs) -> Result<()> {
    let start = Instant::now();
    let mut config = load_config(&args.config)?;
    let effective = args
        .bare_detuning
        .map(|bare| self_consistent_detuning(&config, bare))
        .transpose()?;
    if let Some(d) = effective {
        config.cavity.detuning = d;
    }
    let ss = steady_state(&config)?;
    let output = SteadyStateOutput {
        steady_state: ss,
        optical_frequency_rad_s: config.cavity.optical_frequency(&config.constants),
        drive_frequency_rad_s: config.cavity.drive_frequency(&config.constants),
        bare_detuning_rad_s: args.bare_detuning,
        effective_detuning_rad_s: effective,
    };
    let manifest = RunManifest::new("steady-state", &config).finish(start.elapsed());
    write_text(
        None,
        &to_json(&WithManifest {
            manifest: &manifest,
            result: &output,
        }),
    )
}
