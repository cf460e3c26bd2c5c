//! One function per subcommand. Each writes its artifacts plus
//! `manifest.json` and returns a short human-readable summary.

use polarisim_core::analysis::{
    fit_fpu, fit_lorentzian, linspace, sweep_point, SweepRecord, DEFAULT_FPU_BOUNDS,
};
use polarisim_core::modes::{
    build_h, build_h_damped, eigenvalues, pairing_distance, poles, rabi_splitting, MatrixKind,
    ModeMatrix, ResonanceSet,
};
use polarisim_core::response::{
    absorption_spectrum, pump_probe_spectrum, reflection_spectrum, transfer_function,
};
use polarisim_core::timedomain::{compare, simulate, transfer_from_trajectory, Integration, Pulse};
use polarisim_core::{Field, SpectralGrid, SystemParams};
use rayon::prelude::*;
use serde::Serialize;

use crate::cli::{Command, FitArgs, ModesArgs, OracleArgs, Source, SpectrumArgs, SweepArgs};
use crate::config::{apply_override, load_params, parse_grid};
use crate::error::{CliError, Result};
use crate::output::{read_samples, spectrum_csv, trajectory_csv, transfer_csv, OutputDir};

/// Largest accepted `max |Δ|T|²| / max |t|²` for the oracle command.
pub const ORACLE_TOLERANCE: f64 = 1e-3;

pub fn run(command: &Command) -> Result<String> {
    match command {
        Command::Spectrum(args) => spectrum(args),
        Command::Modes(args) => modes(args),
        Command::Sweep(args) => sweep(args),
        Command::Oracle(args) => oracle(args),
        Command::Fit(args) => fit(args),
    }
}

/// Loads the parameter source, applies overrides in order and validates.
pub fn resolve_params(source: &Source) -> Result<SystemParams> {
    let mut p = match (&source.config, source.paper_defaults) {
        (Some(path), false) => load_params(path)?,
        (None, true) => SystemParams::paper_defaults(),
        (Some(_), true) => {
            return Err(CliError::Usage(
                "--config and --paper-defaults are exclusive".into(),
            ))
        }
        (None, false) => {
            return Err(CliError::Usage(
                "a parameter source is required: --paper-defaults or --config PATH".into(),
            ))
        }
    };
    for assignment in &source.overrides {
        apply_override(&mut p, assignment)?;
    }
    p.validate()?;
    Ok(p)
}

#[derive(Serialize)]
struct ParamsJson {
    omega_0_cm1: f64,
    omega_c_cm1: f64,
    kappa_cm1: f64,
    gamma_m_cm1: f64,
    delta_cm1: f64,
    g1_coll_cm1: f64,
    g3_ratio: f64,
    f_pu: f64,
}

impl From<&SystemParams> for ParamsJson {
    fn from(p: &SystemParams) -> Self {
        ParamsJson {
            omega_0_cm1: p.omega_0,
            omega_c_cm1: p.omega_c,
            kappa_cm1: p.kappa,
            gamma_m_cm1: p.gamma_m,
            delta_cm1: p.delta,
            g1_coll_cm1: p.g1_coll,
            g3_ratio: p.g3_ratio,
            f_pu: p.f_pu,
        }
    }
}

#[derive(Serialize)]
struct GridJson {
    min_cm1: f64,
    max_cm1: f64,
    step_cm1: f64,
    points: usize,
}

impl From<&SpectralGrid> for GridJson {
    fn from(g: &SpectralGrid) -> Self {
        GridJson {
            min_cm1: g.min(),
            max_cm1: g.max(),
            step_cm1: g.step(),
            points: g.len(),
        }
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    params: Option<ParamsJson>,
    grid: Option<GridJson>,
    options: serde_json::Value,
    files: &'a [String],
}

fn finish(
    mut out: OutputDir,
    command: &'static str,
    params: Option<&SystemParams>,
    grid: Option<&SpectralGrid>,
    options: serde_json::Value,
) -> Result<OutputDir> {
    let mut files = out.written().to_vec();
    files.push("manifest.json".into());
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command,
        params: params.map(ParamsJson::from),
        grid: grid.map(GridJson::from),
        options,
        files: &files,
    };
    out.write_json("manifest.json", &manifest)?;
    Ok(out)
}

fn listing(out: &OutputDir) -> String {
    let dir = out.path().display();
    out.written()
        .iter()
        .map(|name| format!("wrote {dir}/{name}"))
        .collect::<Vec<_>>()
        .join("\n")
}

fn spectrum(args: &SpectrumArgs) -> Result<String> {
    let p = resolve_params(&args.source)?;
    let grid = parse_grid(&args.grid)?;
    let mut out = OutputDir::create(&args.source.out)?;
    let t = transfer_function(&p, &grid)?;
    out.write("transmission.csv", &spectrum_csv(&t.power()))?;
    out.write("transmission_transfer.csv", &transfer_csv(&t))?;
    out.write(
        "reflection.csv",
        &spectrum_csv(&reflection_spectrum(&p, &grid)?),
    )?;
    out.write(
        "absorption.csv",
        &spectrum_csv(&absorption_spectrum(&p, &grid)?),
    )?;
    if p.f_pu > 0.0 {
        out.write(
            "pump_probe.csv",
            &spectrum_csv(&pump_probe_spectrum(&p, &grid)?),
        )?;
    }
    let out = finish(
        out,
        "spectrum",
        Some(&p),
        Some(&grid),
        serde_json::json!({}),
    )?;
    Ok(listing(&out))
}

/// `{labels, re_cm1, im_cm1}` in ascending real part.
#[derive(Serialize)]
struct ResonancesJson {
    labels: Vec<&'static str>,
    re_cm1: Vec<f64>,
    im_cm1: Vec<f64>,
}

impl From<&ResonanceSet> for ResonancesJson {
    fn from(r: &ResonanceSet) -> Self {
        ResonancesJson {
            labels: r.iter().map(|(l, _)| l.as_str()).collect(),
            re_cm1: r.iter().map(|(_, z)| z.re).collect(),
            im_cm1: r.iter().map(|(_, z)| z.im).collect(),
        }
    }
}

#[derive(Serialize)]
struct MatrixJson {
    kind: &'static str,
    re: [[f64; 3]; 3],
    im: [[f64; 3]; 3],
}

impl From<&ModeMatrix> for MatrixJson {
    fn from(m: &ModeMatrix) -> Self {
        MatrixJson {
            kind: m.kind.as_str(),
            re: m.entries.map(|row| row.map(|z| z.re)),
            im: m.entries.map(|row| row.map(|z| z.im)),
        }
    }
}

#[derive(Serialize)]
struct ModesJson {
    poles: ResonancesJson,
    eigenvalues: ResonancesJson,
    matrix: MatrixJson,
    /// Pole–eigenvalue distance; absent when the matrix does not describe
    /// the damped system (lossless matrix with γ_m > 0).
    match_distance_cm1: Option<f64>,
    rabi_splitting_cm1: Option<f64>,
}

fn modes(args: &ModesArgs) -> Result<String> {
    let p = resolve_params(&args.source)?;
    let mut out = OutputDir::create(&args.source.out)?;
    let matrix = if args.damped {
        build_h_damped(&p)?
    } else {
        build_h(&p)
    };
    let poles = poles(&p)?;
    let eig = eigenvalues(&matrix)?;
    let comparable = matrix.kind == MatrixKind::Damped || p.gamma_m == 0.0;
    let report = ModesJson {
        poles: (&poles).into(),
        eigenvalues: (&eig).into(),
        matrix: (&matrix).into(),
        match_distance_cm1: comparable.then(|| pairing_distance(&poles, &eig)),
        rabi_splitting_cm1: if p.f_pu == 0.0 {
            Some(rabi_splitting(&p)?)
        } else {
            None
        },
    };
    out.write_json("resonances.json", &report)?;
    let options = serde_json::json!({ "damped": args.damped });
    let out = finish(out, "modes", Some(&p), None, options)?;
    let summary = match report.match_distance_cm1 {
        Some(d) => format!(
            "pole-eigenvalue distance {d:.3e} cm^-1 ({})",
            matrix.kind.as_str()
        ),
        None => "lossless matrix omits molecular damping; no distance reported".into(),
    };
    Ok(format!("{summary}\n{}", listing(&out)))
}

#[derive(Serialize)]
struct AbsorptionJson {
    lp: f64,
    up: f64,
    sum: f64,
    warnings: Vec<String>,
}

#[derive(Serialize)]
struct SweepRecordJson {
    parameter: &'static str,
    value: f64,
    error: Option<String>,
    poles: Option<ResonancesJson>,
    lossless_eigenvalues: Option<ResonancesJson>,
    h12_abs_cm1: Option<f64>,
    polariton_absorption: Option<AbsorptionJson>,
    polariton_absorption_error: Option<String>,
    dark_state_absorption: Option<f64>,
    transmission: Option<Vec<f64>>,
}

impl SweepRecordJson {
    fn new(field: Field, record: &SweepRecord) -> Self {
        let mut json = SweepRecordJson {
            parameter: field.key(),
            value: record.value,
            error: None,
            poles: None,
            lossless_eigenvalues: None,
            h12_abs_cm1: None,
            polariton_absorption: None,
            polariton_absorption_error: None,
            dark_state_absorption: None,
            transmission: None,
        };
        match &record.point {
            Err(e) => json.error = Some(e.to_string()),
            Ok(point) => {
                json.poles = Some((&point.poles).into());
                json.lossless_eigenvalues = Some((&point.eigenvalues).into());
                json.h12_abs_cm1 = Some(point.h12_abs);
                match &point.polariton_absorption {
                    Ok(a) => {
                        json.polariton_absorption = Some(AbsorptionJson {
                            lp: a.lp,
                            up: a.up,
                            sum: a.sum(),
                            warnings: a.warnings.iter().map(|w| format!("{w:?}")).collect(),
                        })
                    }
                    Err(e) => json.polariton_absorption_error = Some(e.to_string()),
                }
                json.dark_state_absorption = Some(point.dark_state_absorption);
                json.transmission = point.transmission.as_ref().map(|s| s.values().to_vec());
            }
        }
        json
    }
}

fn sweep(args: &SweepArgs) -> Result<String> {
    let p = resolve_params(&args.source)?;
    let field = Field::from_key(&args.param)
        .ok_or_else(|| CliError::Usage(format!("unknown sweep parameter `{}`", args.param)))?;
    let grid = if args.spectra {
        Some(parse_grid(&args.grid)?)
    } else {
        None
    };
    let mut out = OutputDir::create(&args.source.out)?;
    let values = linspace(args.from, args.to, args.steps);
    let records: Vec<SweepRecord> = values
        .par_iter()
        .map(|&v| sweep_point(&p, field, v, grid.as_ref()))
        .collect();
    let json: Vec<SweepRecordJson> = records
        .iter()
        .map(|r| SweepRecordJson::new(field, r))
        .collect();
    out.write_json("sweep.json", &json)?;
    let failed = records.iter().filter(|r| r.point.is_err()).count();
    let options = serde_json::json!({
        "param": field.key(),
        "from": args.from,
        "to": args.to,
        "steps": args.steps,
        "spectra": args.spectra,
    });
    let out = finish(out, "sweep", Some(&p), grid.as_ref(), options)?;
    Ok(format!(
        "{} records ({failed} failed)\n{}",
        records.len(),
        listing(&out)
    ))
}

#[derive(Serialize)]
struct OracleJson {
    max_relative_error: f64,
    worst_omega_cm1: f64,
    tolerance: f64,
    within_tolerance: bool,
    points: usize,
    dt_internal: f64,
    t_end_internal: f64,
    frame_cm1: f64,
    pulse_center_cm1: f64,
    pulse_sigma_internal: f64,
    pulse_t0_internal: f64,
}

fn oracle(args: &OracleArgs) -> Result<String> {
    let p = resolve_params(&args.source)?;
    let grid = parse_grid(&args.grid)?;
    let mut out = OutputDir::create(&args.source.out)?;
    let pulse = Pulse::broadband(p.omega_0);
    pulse.covers(&grid)?;
    let integration = Integration {
        dt: args.dt,
        t_end: args.t_end,
        frame: args.frame.unwrap_or(p.omega_0),
    };
    let traj = simulate(&p, &pulse, &integration)?;
    let recovered = transfer_from_trajectory(&traj, &grid)?;
    let report = compare(&p, &recovered)?;
    let within = report.max_relative_error < ORACLE_TOLERANCE;

    out.write("oracle_transmission.csv", &spectrum_csv(&recovered.power()))?;
    if args.trajectory {
        out.write("trajectory.csv", &trajectory_csv(&traj))?;
    }
    out.write_json(
        "oracle_report.json",
        &OracleJson {
            max_relative_error: report.max_relative_error,
            worst_omega_cm1: report.worst_omega,
            tolerance: ORACLE_TOLERANCE,
            within_tolerance: within,
            points: report.points,
            dt_internal: integration.dt,
            t_end_internal: integration.t_end,
            frame_cm1: integration.frame,
            pulse_center_cm1: pulse.center,
            pulse_sigma_internal: pulse.sigma_t,
            pulse_t0_internal: pulse.t0,
        },
    )?;
    let options = serde_json::json!({
        "dt": integration.dt,
        "t_end": integration.t_end,
        "frame": integration.frame,
        "trajectory": args.trajectory,
    });
    let out = finish(out, "oracle", Some(&p), Some(&grid), options)?;
    if !within {
        return Err(CliError::OracleMismatch {
            error: report.max_relative_error,
            tolerance: ORACLE_TOLERANCE,
            omega: report.worst_omega,
        });
    }
    Ok(format!(
        "max relative error {:.3e} (worst at {} cm^-1)\n{}",
        report.max_relative_error,
        report.worst_omega,
        listing(&out)
    ))
}

#[derive(Serialize)]
#[serde(tag = "model", rename_all = "snake_case")]
enum FitJson {
    Lorentzian {
        center_cm1: f64,
        fwhm_cm1: f64,
        amplitude: f64,
        baseline: f64,
        residual_rms: f64,
        iterations: usize,
        points: usize,
    },
    Fpu {
        f_pu: f64,
        residual: f64,
        residual_rms: f64,
        boundary_optimum: bool,
        lower_bound: f64,
        upper_bound: f64,
        points: usize,
    },
}

fn fit(args: &FitArgs) -> Result<String> {
    let data = read_samples(&args.data)?;
    let points = data.len();
    let (params, json, summary) = if args.lorentzian {
        // A parameter source is optional here; it is echoed if given.
        let params = if args.source.paper_defaults || args.source.config.is_some() {
            Some(resolve_params(&args.source)?)
        } else {
            None
        };
        let f = fit_lorentzian(&data)?;
        let summary = format!("center {:.6} cm^-1, FWHM {:.6} cm^-1", f.center, f.fwhm);
        let json = FitJson::Lorentzian {
            center_cm1: f.center,
            fwhm_cm1: f.fwhm,
            amplitude: f.amplitude,
            baseline: f.baseline,
            residual_rms: f.residual_rms,
            iterations: f.iterations,
            points,
        };
        (params, json, summary)
    } else {
        let p = resolve_params(&args.source)?;
        let bounds = (DEFAULT_FPU_BOUNDS.0, args.fpu_max);
        let f = fit_fpu(&p, &data, bounds)?;
        let mut summary = format!("f_pu {:.6}", f.f_pu);
        if f.boundary_optimum {
            summary.push_str(" (at search bound)");
        }
        let json = FitJson::Fpu {
            f_pu: f.f_pu,
            residual: f.residual,
            residual_rms: f.residual_rms,
            boundary_optimum: f.boundary_optimum,
            lower_bound: bounds.0,
            upper_bound: bounds.1,
            points,
        };
        (Some(p), json, summary)
    };
    let mut out = OutputDir::create(&args.source.out)?;
    out.write_json("fit.json", &json)?;
    let options = serde_json::json!({
        "data": args.data.display().to_string(),
        "model": if args.lorentzian { "lorentzian" } else { "fpu" },
        "fpu_max": args.fpu_max,
    });
    let out = finish(out, "fit", params.as_ref(), None, options)?;
    Ok(format!("{summary}\n{}", listing(&out)))
}
