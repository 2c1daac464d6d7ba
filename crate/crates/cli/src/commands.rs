//! The five subcommands: evolve, spectrum, sweep, classical, fit.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde_json::{json, Value};

use parosc::analysis::{
    fit_exponential, fit_powerlaw, row_error_label, sweep as run_sweep, FitModel, FitResult,
    SweepResult,
};
use parosc::classical::{
    classical_evolve, classical_evolve_traced, floquet_growth, pr_condition, riccati_solution,
};
use parosc::dynamics::{evolve, evolve_traced};
use parosc::spectral::{decompose, energy_expectation};
use parosc::state::ground_state;
use parosc::{DriveParams64, Error, GaussianState64};

use crate::cfg::{self, FileConfig};
use crate::output::{g17, plot_data, OutputStage};
use crate::{ClassicalArgs, CliError, EvolveArgs, FitArgs, SpectrumArgs, SweepArgs};

fn state_json(params: &DriveParams64, state: &GaussianState64) -> Value {
    json!({
        "h": params.h(),
        "eps_bar": params.eps_bar(),
        "r": params.ratio(),
        "nu": params.nu(),
        "tau_f": state.tau,
        "a_re": state.a.re,
        "a_im": state.a.im,
        "b_re": state.b.re,
        "b_im": state.b.im,
        "energy": energy_expectation(state),
        "norm_residual": state.norm_residual(),
    })
}

fn install_pool<R: Send>(threads: Option<usize>, run: impl FnOnce() -> R + Send) -> Result<R, CliError> {
    match threads {
        None => Ok(run()),
        Some(n) => {
            if n == 0 {
                return Err(CliError::Usage("--threads must be >= 1".into()));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Io(format!("building thread pool: {e}")))?;
            Ok(pool.install(run))
        }
    }
}

pub fn cmd_evolve(args: EvolveArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.base.config.as_deref())?;
    let params = cfg::resolve_drive(args.drive.h, args.drive.eps_bar, args.drive.r, args.drive.nu, &file)?;
    let config = cfg::resolve_sim_config(args.base.abs_tol, args.base.rel_tol, None, &file)?;
    let out_dir = args.base.out.or(file.out.clone()).unwrap_or_else(|| PathBuf::from("."));
    let samples = cfg::pick(args.samples, file.samples, 1001);

    let mut manifest = cfg::manifest_params(&params, &config);
    let mut stage = OutputStage::new("evolve");

    let final_state = if let Some(trace_name) = &args.trace {
        let trajectory = evolve_traced(&ground_state(), &params, &config, samples)
            .map_err(CliError::Numerical)?;
        let mut csv = String::from("tau,a_re,a_im,b_re,b_im,g,norm_residual,energy\n");
        for s in &trajectory {
            csv.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                g17(s.tau),
                g17(s.state.a.re),
                g17(s.state.a.im),
                g17(s.state.b.re),
                g17(s.state.b.im),
                g17(s.g),
                g17(s.norm_residual),
                g17(s.energy),
            ));
        }
        stage.add(trace_name, csv.into_bytes());
        manifest.insert("trace".into(), json!(trace_name));
        manifest.insert("samples".into(), json!(samples));
        trajectory.last().expect("at least two samples").state
    } else {
        evolve(&ground_state(), &params, &config).map_err(CliError::Numerical)?
    };

    stage.add_json("state.json", &state_json(&params, &final_state))?;
    stage.commit(&out_dir, manifest)
}

pub fn cmd_spectrum(args: SpectrumArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.base.config.as_deref())?;
    let params = cfg::resolve_drive(args.drive.h, args.drive.eps_bar, args.drive.r, args.drive.nu, &file)?;
    let config = cfg::resolve_sim_config(args.base.abs_tol, args.base.rel_tol, args.n_max, &file)?;
    let out_dir = args.base.out.or(file.out.clone()).unwrap_or_else(|| PathBuf::from("."));

    let state = evolve(&ground_state(), &params, &config).map_err(CliError::Numerical)?;
    let dec = decompose(&state, &config);

    let mut csv = String::from("n,p_n\n");
    for (n, p) in dec.iter_even() {
        csv.push_str(&format!("{n},{}\n", g17(p)));
    }

    let mut stage = OutputStage::new("spectrum");
    stage.add("spectrum.csv", csv.into_bytes());
    stage.add_json(
        "spectrum.json",
        &json!({
            "h": params.h(),
            "eps_bar": params.eps_bar(),
            "r": params.ratio(),
            "nu": params.nu(),
            "tau_f": state.tau,
            "n_max_used": dec.n_max_used,
            "tail_mass": dec.tail_mass,
            "energy_spectral": dec.energy_spectral,
            "energy_analytic": dec.energy_analytic,
            "truncated": dec.truncated,
            "norm_residual": state.norm_residual(),
        }),
    )?;
    stage.commit(&out_dir, cfg::manifest_params(&params, &config))
}

fn sweep_csv(result: &SweepResult<f64>) -> Vec<u8> {
    let mut csv = String::from("r,h,nu,p0,p2,p4,p6,energy,slope,regime,status\n");
    for row in &result.rows {
        match &row.outcome {
            Ok(obs) => {
                let slope = obs.slope.map(g17).unwrap_or_default();
                let status = match &obs.fit_error {
                    None => "ok".to_string(),
                    Some(e) => format!("fit_error:{}", row_error_label(e)),
                };
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{}\n",
                    g17(row.r),
                    g17(row.h),
                    row.nu,
                    g17(obs.p0),
                    g17(obs.p2),
                    g17(obs.p4),
                    g17(obs.p6),
                    g17(obs.energy),
                    slope,
                    obs.regime,
                    status,
                ));
            }
            Err(e) => {
                csv.push_str(&format!(
                    "{},{},{},,,,,,,,error:{}\n",
                    g17(row.r),
                    g17(row.h),
                    row.nu,
                    row_error_label(e),
                ));
            }
        }
    }
    csv.into_bytes()
}

pub fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.base.config.as_deref())?;
    let h = cfg::require(args.h, file.h, "h")?;
    let nu = cfg::require(args.nu, file.nu, "nu")?;
    let config = cfg::resolve_sim_config(args.base.abs_tol, args.base.rel_tol, args.n_max, &file)?;
    let out_dir = args.base.out.clone().or(file.out.clone()).unwrap_or_else(|| PathBuf::from("."));
    let r_min = cfg::pick(args.r_min, file.r_min, -1.0);
    let r_max = cfg::pick(args.r_max, file.r_max, 1.0);
    let r_steps = cfg::pick(args.r_steps, file.r_steps, 201);
    let threads = cfg::pick_opt(args.base.threads, file.threads);
    if r_steps == 0 {
        return Err(CliError::Usage("--r-steps must be >= 1".into()));
    }
    if r_steps > 1 && !(r_max > r_min) {
        return Err(CliError::Usage("--r-max must exceed --r-min".into()));
    }

    let grid: Vec<f64> = if r_steps == 1 {
        vec![r_min]
    } else {
        (0..r_steps)
            .map(|i| r_min + (r_max - r_min) * i as f64 / (r_steps - 1) as f64)
            .collect()
    };

    let result =
        install_pool(threads, || run_sweep(h, nu, &grid, &config))?.map_err(CliError::usage_from)?;

    let mut stage = OutputStage::new("sweep");
    stage.add("sweep.csv", sweep_csv(&result));

    // plot-ready two-column files, successful rows only
    let add_observable = |stage: &mut OutputStage,
                              name: &str,
                              extract: &dyn Fn(&parosc::analysis::RowObservables<f64>) -> Option<f64>| {
        let column = name.trim_end_matches(".dat");
        let rows = result.rows.iter().filter_map(|row| {
            let obs = row.outcome.as_ref().ok()?;
            Some((row.r, extract(obs)?))
        });
        stage.add(name, plot_data(&format!("r {column}"), rows));
    };
    add_observable(&mut stage, "p0.dat", &|o| Some(o.p0));
    add_observable(&mut stage, "p2.dat", &|o| Some(o.p2));
    add_observable(&mut stage, "p4.dat", &|o| Some(o.p4));
    add_observable(&mut stage, "p6.dat", &|o| Some(o.p6));
    add_observable(&mut stage, "energy.dat", &|o| Some(o.energy));
    add_observable(&mut stage, "slope.dat", &|o| o.slope);

    let mut manifest = BTreeMap::new();
    manifest.insert("h".into(), json!(h));
    manifest.insert("nu".into(), json!(nu));
    manifest.insert("r_min".into(), json!(r_min));
    manifest.insert("r_max".into(), json!(r_max));
    manifest.insert("r_steps".into(), json!(r_steps));
    if let Some(t) = threads {
        manifest.insert("threads".into(), json!(t));
    }
    cfg::merge_config(&mut manifest, &config);
    stage.commit(&out_dir, manifest)
}

pub fn cmd_classical(args: ClassicalArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.base.config.as_deref())?;
    let params = cfg::resolve_drive(args.drive.h, args.drive.eps_bar, args.drive.r, args.drive.nu, &file)?;
    let config = cfg::resolve_sim_config(args.base.abs_tol, args.base.rel_tol, None, &file)?;
    let out_dir = args.base.out.or(file.out.clone()).unwrap_or_else(|| PathBuf::from("."));
    let x0 = cfg::pick(args.x0, file.x0, 1.0);
    let v0 = cfg::pick(args.v0, file.v0, 0.0);
    let samples = cfg::pick(args.samples, file.samples, 1001);

    let trajectory =
        classical_evolve_traced(&params, x0, v0, &config, samples).map_err(CliError::Numerical)?;
    let (x_final, v_final) = classical_evolve(&params, x0, v0, &config).map_err(CliError::Numerical)?;
    let growth = floquet_growth(&params, &config).map_err(CliError::Numerical)?;
    let pr = match pr_condition(&params) {
        Ok(flag) => json!(flag),
        Err(Error::UndefinedRatio) => Value::Null,
        Err(e) => return Err(CliError::Numerical(e)),
    };

    // quantum-vs-classical oracle gap |B_evolve - B_riccati| at tau_final
    let quantum = evolve(&ground_state(), &params, &config).map_err(CliError::Numerical)?;
    let sol = riccati_solution(&params, &config).map_err(CliError::Numerical)?;
    let oracle_gap = (quantum.b - sol.width_b()).norm();

    let mut csv = String::from("tau,x,v,g\n");
    for s in &trajectory {
        csv.push_str(&format!("{},{},{},{}\n", g17(s.tau), g17(s.x), g17(s.v), g17(s.g)));
    }

    let mut stage = OutputStage::new("classical");
    stage.add("classical.csv", csv.into_bytes());
    stage.add_json(
        "classical.json",
        &json!({
            "h": params.h(),
            "eps_bar": params.eps_bar(),
            "r": params.ratio(),
            "nu": params.nu(),
            "x0": x0,
            "v0": v0,
            "x_final": x_final,
            "v_final": v_final,
            "floquet_growth": growth,
            "pr_condition": pr,
            "oracle_gap_b": oracle_gap,
            "wronskian": sol.wronskian(),
        }),
    )?;

    let mut manifest = cfg::manifest_params(&params, &config);
    manifest.insert("x0".into(), json!(x0));
    manifest.insert("v0".into(), json!(v0));
    manifest.insert("samples".into(), json!(samples));
    stage.commit(&out_dir, manifest)
}

fn fit_json(params: &DriveParams64, fit: &FitResult<f64>) -> Value {
    json!({
        "h": params.h(),
        "eps_bar": params.eps_bar(),
        "r": params.ratio(),
        "nu": params.nu(),
        "model": fit.model.to_string(),
        "slope": fit.slope,
        "intercept": fit.intercept,
        "r_squared": fit.r_squared,
        "n_first": fit.n_range.0,
        "n_last": fit.n_range.1,
        "points_used": fit.points_used,
    })
}

pub fn cmd_fit(args: FitArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.base.config.as_deref())?;
    let params = cfg::resolve_drive(args.drive.h, args.drive.eps_bar, args.drive.r, args.drive.nu, &file)?;
    let config = cfg::resolve_sim_config(args.base.abs_tol, args.base.rel_tol, args.n_max, &file)?;
    let out_dir = args.base.out.or(file.out.clone()).unwrap_or_else(|| PathBuf::from("."));

    let model_name = args
        .model
        .or(file.model.clone())
        .unwrap_or_else(|| "auto".to_string());
    let model = match model_name.as_str() {
        "power-law" | "power_law" => FitModel::PowerLaw,
        "exponential" => FitModel::Exponential,
        "auto" => {
            let r = params.ratio().ok_or_else(|| {
                CliError::Usage("--model auto needs h > 0; pass an explicit --model".into())
            })?;
            if r.abs() < 0.5 {
                FitModel::PowerLaw
            } else {
                FitModel::Exponential
            }
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown --model '{other}' (power-law | exponential | auto)"
            )))
        }
    };
    let n_range = match (
        cfg::pick_opt(args.fit_n_min, file.fit_n_min),
        cfg::pick_opt(args.fit_n_max, file.fit_n_max),
    ) {
        (None, None) => None,
        (lo, hi) => Some((lo.unwrap_or(2), hi.unwrap_or(40))),
    };

    let state = evolve(&ground_state(), &params, &config).map_err(CliError::Numerical)?;
    let dec = decompose(&state, &config);
    let fit = match model {
        FitModel::PowerLaw => fit_powerlaw(&dec, n_range),
        FitModel::Exponential => fit_exponential(&dec, n_range),
    }
    .map_err(CliError::Numerical)?;

    let points: Vec<(f64, f64)> = dec
        .iter_even()
        .filter(|&(n, _)| n >= fit.n_range.0 && n <= fit.n_range.1)
        .map(|(n, p)| (n as f64, p))
        .collect();

    let mut stage = OutputStage::new("fit");
    stage.add("fit.dat", plot_data("n p_n", points.into_iter()));
    stage.add_json("fit.json", &fit_json(&params, &fit))?;

    let mut manifest = cfg::manifest_params(&params, &config);
    manifest.insert("model".into(), json!(fit.model.to_string()));
    stage.commit(&out_dir, manifest)
}
