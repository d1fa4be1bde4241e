//! The five figure-reproducing commands. Each resolves its configuration
//! (defaults < config file < flags), computes everything up front, then
//! writes CSV with the resolved settings echoed in the comment header, so a
//! failed run never leaves a partial file behind.

use std::path::PathBuf;

use ptsim::{
    exact_records, fit_gamma, find_gamma_min, h_eff_eigenvalues, h_pt_eigenvalues,
    liouvillian_spectrum, order_param_sweep, population_sweep, propagate_mat_exp,
    propagate_numeric, propagate_spectral, reconstruct_pt_series, simulate_shots, to_pt_picture,
    ReadoutObservable, SystemParams, Trajectory,
};

use crate::config::{
    require_positive, GridSpec, InitialState, ObservableArg, PictureArg, RawConfig, TimesList,
};
use crate::csvio::{fmt9, with_suffix, CsvFile};
use crate::CliError;

const EVOLVE_CROSS_CHECK_TOL: f64 = 1e-7;

fn params_from_khz(omega_khz: f64, gamma_khz: f64) -> Result<SystemParams, CliError> {
    SystemParams::from_khz(omega_khz, gamma_khz).map_err(|e| CliError::Config(e.to_string()))
}

fn time_grid(t_max_us: f64, n_samples: usize) -> Result<Vec<f64>, CliError> {
    if n_samples < 2 {
        return Err(CliError::Config(format!("n_samples must be >= 2, got {n_samples}")));
    }
    let t_max = t_max_us * 1e-6;
    Ok((0..n_samples)
        .map(|i| t_max * i as f64 / (n_samples - 1) as f64)
        .collect())
}

pub fn cmd_spectrum(cfg: RawConfig) -> Result<(), CliError> {
    let omega_khz = require_positive("omega_khz", cfg.omega_khz.unwrap_or(32.0))?;
    let grid = cfg.gamma_grid.unwrap_or(GridSpec {
        start_khz: 0.0,
        stop_khz: 2.0 * omega_khz,
        count: 201,
    });
    let output = cfg.output.unwrap_or_else(|| PathBuf::from("spectrum.csv"));

    let mut csv = CsvFile::new("spectrum");
    csv.comment("omega_khz", omega_khz);
    csv.comment("gamma_grid", grid);
    csv.comment("output", output.display());
    csv.header("gamma_over_omega,re_hpt_e1,im_hpt_e1,re_hpt_e2,im_hpt_e2,re_heff_e1,im_heff_e1,re_heff_e2,im_heff_e2,re_l1,im_l1,re_l2,im_l2,re_l3,im_l3,re_l4,im_l4");

    for gamma_khz in grid.values_khz() {
        if gamma_khz < 0.0 {
            return Err(CliError::Config(format!("gamma grid must be non-negative, got {gamma_khz}")));
        }
        let p = params_from_khz(omega_khz, gamma_khz)?;
        let hpt = h_pt_eigenvalues(&p);
        let heff = h_eff_eigenvalues(&p);
        let spec = liouvillian_spectrum(&p).map_err(CliError::Numeric)?;
        let mut fields = vec![fmt9(p.gamma() / p.omega())];
        for e in hpt.iter().chain(heff.iter()).chain(spec.lambdas.iter()) {
            fields.push(fmt9(e.re));
            fields.push(fmt9(e.im));
        }
        csv.row(&fields);
    }
    csv.write_to(&output)
}

struct PictureRows<'a> {
    traj: &'a Trajectory,
    levels: usize,
}

fn trajectory_rows(rows: PictureRows, csv: &mut CsvFile) -> Result<(), CliError> {
    for ((t, state), obs) in rows
        .traj
        .times
        .iter()
        .zip(rows.traj.states.iter())
        .zip(rows.traj.observables.iter())
    {
        let m = state.mat();
        let rho22 = if rows.levels == 3 { fmt9(m.get(2, 2).re) } else { String::new() };
        csv.row(&[
            fmt9(t * 1e6),
            fmt9(obs.rho00),
            fmt9(obs.rho11),
            rho22,
            fmt9(m.get(0, 1).re),
            fmt9(m.get(0, 1).im),
            fmt9(obs.trace),
            fmt9(obs.sigma_z_norm),
            fmt9(obs.sigma_y_norm),
        ]);
    }
    Ok(())
}

const TRAJECTORY_HEADER: &str =
    "t_us,rho00,rho11,rho22,re_rho01,im_rho01,trace,sigma_z_norm,sigma_y_norm";

pub fn cmd_evolve(cfg: RawConfig) -> Result<(), CliError> {
    let omega_khz = require_positive("omega_khz", cfg.omega_khz.unwrap_or(32.0))?;
    let gamma_khz = cfg.gamma_khz.unwrap_or(1.0);
    if gamma_khz < 0.0 {
        return Err(CliError::Config(format!("gamma_khz must be >= 0, got {gamma_khz}")));
    }
    let t_max_us = require_positive("t_max_us", cfg.t_max_us.unwrap_or(50.0))?;
    let n_samples = cfg.n_samples.unwrap_or(512);
    let initial = cfg.initial_state.unwrap_or(InitialState::Ket0);
    let levels = cfg.levels.unwrap_or(2);
    let picture = cfg.picture.unwrap_or(PictureArg::Both);
    let output = cfg.output.unwrap_or_else(|| PathBuf::from("evolve.csv"));

    if levels != 2 && levels != 3 {
        return Err(CliError::Config(format!("levels must be 2 or 3, got {levels}")));
    }
    if levels == 3 && picture != PictureArg::Lossy {
        return Err(CliError::Config(
            "the PT picture is undefined for 3-level output; use --picture lossy with --levels 3".into(),
        ));
    }

    let p = params_from_khz(omega_khz, gamma_khz)?;
    let t_grid = time_grid(t_max_us, n_samples)?;
    let dt = match cfg.dt_us {
        Some(v) => require_positive("dt_us", v)? * 1e-6,
        None => p.default_dt().map_err(CliError::Numeric)?,
    };
    let rho0 = initial.density_matrix()?;

    let traj = propagate_numeric(&p, &rho0, &t_grid, dt, levels).map_err(CliError::Numeric)?;

    // Independent reference route: the closed form for |0⟩, otherwise the
    // spectral sum (or the matrix exponential inside the EP band).
    let reference_name;
    let mut max_diff: f64 = 0.0;
    match initial {
        InitialState::Ket0 => {
            reference_name = "closed_form";
            for (t, s) in t_grid.iter().zip(traj.states.iter()) {
                let r = ptsim::closed_form_lossy(&p, *t).map_err(CliError::Numeric)?;
                max_diff = max_diff.max(s.qubit_block().mat().max_abs_diff(r.mat()));
            }
        }
        _ if p.at_ep() => {
            reference_name = "mat_exp";
            for (t, s) in t_grid.iter().zip(traj.states.iter()) {
                let r = propagate_mat_exp(&p, &rho0, *t).map_err(CliError::Numeric)?;
                max_diff = max_diff.max(s.qubit_block().mat().max_abs_diff(r.mat()));
            }
        }
        _ => {
            reference_name = "spectral";
            let spec = liouvillian_spectrum(&p).map_err(CliError::Numeric)?;
            for (t, s) in t_grid.iter().zip(traj.states.iter()) {
                let r = propagate_spectral(&spec, &rho0, *t).map_err(CliError::Numeric)?;
                max_diff = max_diff.max(s.qubit_block().mat().max_abs_diff(r.mat()));
            }
        }
    }
    if max_diff >= EVOLVE_CROSS_CHECK_TOL {
        return Err(CliError::Numeric(ptsim::PtError::InvalidArgument(format!(
            "numeric/{reference_name} cross-check failed: max entry difference {max_diff:.3e} \
             exceeds {EVOLVE_CROSS_CHECK_TOL:.0e} (is dt too coarse?)"
        ))));
    }

    let echo = |csv: &mut CsvFile, pic: &str| {
        csv.comment("omega_khz", omega_khz);
        csv.comment("gamma_khz", gamma_khz);
        csv.comment("t_max_us", t_max_us);
        csv.comment("n_samples", n_samples);
        csv.comment("dt_us", dt * 1e6);
        csv.comment("initial_state", initial);
        csv.comment("levels", levels);
        csv.comment("picture", pic);
        csv.comment("output", output.display());
    };

    if picture == PictureArg::Lossy || picture == PictureArg::Both {
        let mut csv = CsvFile::new("evolve");
        echo(&mut csv, "lossy");
        csv.header(TRAJECTORY_HEADER);
        trajectory_rows(PictureRows { traj: &traj, levels }, &mut csv)?;
        csv.comment("reference", reference_name);
        csv.comment("max_abs_diff_numeric_vs_reference", fmt9(max_diff));
        csv.write_to(&with_suffix(&output, "lossy"))?;
    }

    if picture == PictureArg::Pt || picture == PictureArg::Both {
        let mut pt_states = Vec::with_capacity(traj.states.len());
        for (t, s) in t_grid.iter().zip(traj.states.iter()) {
            pt_states.push(to_pt_picture(s, p.gamma(), *t).map_err(CliError::Numeric)?);
        }
        let pt_traj = Trajectory::from_states(t_grid.clone(), pt_states).map_err(CliError::Numeric)?;
        let mut csv = CsvFile::new("evolve");
        echo(&mut csv, "pt");
        csv.header(TRAJECTORY_HEADER);
        trajectory_rows(PictureRows { traj: &pt_traj, levels }, &mut csv)?;
        csv.comment("reference", reference_name);
        csv.comment("max_abs_diff_numeric_vs_reference", fmt9(max_diff));
        csv.write_to(&with_suffix(&output, "pt"))?;
    }
    Ok(())
}

pub fn cmd_order_params(cfg: RawConfig) -> Result<(), CliError> {
    let omega_khz = require_positive("omega_khz", cfg.omega_khz.unwrap_or(32.0))?;
    let grid = cfg.gamma_grid.unwrap_or(GridSpec {
        start_khz: 2.0 * omega_khz / 40.0,
        stop_khz: 2.0 * omega_khz,
        count: 40,
    });
    let n_points = cfg.n_samples.unwrap_or(4096);
    let output = cfg.output.unwrap_or_else(|| PathBuf::from("order_params.csv"));

    let p0 = params_from_khz(omega_khz, 0.0)?;
    let omega = p0.omega();
    let gammas: Vec<f64> = grid
        .values_khz()
        .iter()
        .map(|g| g * 2.0 * std::f64::consts::PI * 1e3)
        .collect();
    if gammas.iter().any(|g| *g <= 0.0) {
        return Err(CliError::Config("order-params gamma grid must be strictly positive".into()));
    }
    let rows = order_param_sweep(omega, &gammas, n_points).map_err(CliError::Numeric)?;

    let mut csv = CsvFile::new("order-params");
    csv.comment("omega_khz", omega_khz);
    csv.comment("gamma_grid", grid);
    csv.comment("n_samples", n_points);
    csv.comment("output", output.display());
    csv.header("gamma_over_omega,sigma_z_analytic,sigma_z_numeric,sigma_y_analytic,sigma_y_numeric");
    for r in rows {
        csv.row(&[
            fmt9(r.gamma / omega),
            fmt9(r.sigma_z_analytic),
            fmt9(r.sigma_z_numeric),
            fmt9(r.sigma_y_analytic),
            fmt9(r.sigma_y_numeric),
        ]);
    }
    csv.write_to(&output)
}

pub fn cmd_turning_point(cfg: RawConfig) -> Result<(), CliError> {
    let omega_khz = require_positive("omega_khz", cfg.omega_khz.unwrap_or(32.0))?;
    let grid = cfg.gamma_grid.unwrap_or(GridSpec {
        start_khz: 0.0,
        stop_khz: 3.0 * omega_khz,
        count: 201,
    });
    // Default evaluation time: one Rabi period 2π/Ω.
    let times = cfg.times_us.unwrap_or(TimesList(vec![1000.0 / omega_khz]));
    let output = cfg.output.unwrap_or_else(|| PathBuf::from("turning_point.csv"));

    let p0 = params_from_khz(omega_khz, 0.0)?;
    let omega = p0.omega();
    let gammas: Vec<f64> = grid
        .values_khz()
        .iter()
        .map(|g| g * 2.0 * std::f64::consts::PI * 1e3)
        .collect();
    if gammas.iter().any(|g| *g < 0.0) {
        return Err(CliError::Config("turning-point gamma grid must be non-negative".into()));
    }

    let mut csv = CsvFile::new("turning-point");
    csv.comment("omega_khz", omega_khz);
    csv.comment("gamma_grid", grid);
    csv.comment("times_us", &times);
    csv.comment("output", output.display());
    let mut sweeps = Vec::new();
    for (k, t_us) in times.0.iter().enumerate() {
        csv.comment(&format!("t{k}_us"), t_us);
        sweeps.push(population_sweep(omega, &gammas, t_us * 1e-6).map_err(CliError::Numeric)?);
    }
    let cols: Vec<String> = (0..times.0.len()).map(|k| format!("rho00_t{k}")).collect();
    csv.header(&format!("gamma_over_omega,{}", cols.join(",")));
    for (i, &g) in gammas.iter().enumerate() {
        let mut fields = vec![fmt9(g / omega)];
        for sweep in &sweeps {
            fields.push(fmt9(sweep[i].1));
        }
        csv.row(&fields);
    }
    for (k, t_us) in times.0.iter().enumerate() {
        let gmin = find_gamma_min(omega, t_us * 1e-6).map_err(CliError::Numeric)?;
        csv.comment(&format!("gamma_min_over_omega_t{k}"), fmt9(gmin / omega));
    }
    csv.write_to(&output)
}

pub fn cmd_experiment(cfg: RawConfig) -> Result<(), CliError> {
    let omega_khz = require_positive("omega_khz", cfg.omega_khz.unwrap_or(32.0))?;
    let gamma_khz = cfg.gamma_khz.unwrap_or(10.0);
    if gamma_khz < 0.0 {
        return Err(CliError::Config(format!("gamma_khz must be >= 0, got {gamma_khz}")));
    }
    let t_max_us = require_positive("t_max_us", cfg.t_max_us.unwrap_or(100.0))?;
    let n_samples = cfg.n_samples.unwrap_or(20);
    let n_shots = cfg.n_shots.unwrap_or(800);
    let seed = cfg.seed.unwrap_or(1);
    let observable = cfg.observable.unwrap_or(ObservableArg::P0);
    let output = cfg.output.unwrap_or_else(|| PathBuf::from("experiment.csv"));

    if observable != ObservableArg::P0 {
        return Err(CliError::Config(
            "the fit runs on population data; use --observable p0 (sy series are simulation-only)".into(),
        ));
    }

    let p = params_from_khz(omega_khz, gamma_khz)?;
    let t_grid = time_grid(t_max_us, n_samples)?;
    let obs: ReadoutObservable = observable.into();
    // n_shots = 0 is the noiseless sentinel: records carry the exact
    // probabilities with zero error bars.
    let records = if n_shots == 0 {
        exact_records(&p, &t_grid, obs)
    } else {
        simulate_shots(&p, &t_grid, n_shots, seed, obs).map_err(CliError::Numeric)?
    };

    let fit = fit_gamma(&records, p.omega()).map_err(CliError::Numeric)?;
    let series = reconstruct_pt_series(&records, &fit).map_err(CliError::Numeric)?;
    let to_khz = 1.0 / (2.0 * std::f64::consts::PI * 1e3);

    let mut shots_csv = CsvFile::new("experiment");
    shots_csv.comment("omega_khz", omega_khz);
    shots_csv.comment("gamma_true_khz", gamma_khz);
    shots_csv.comment("t_max_us", t_max_us);
    shots_csv.comment("n_samples", n_samples);
    shots_csv.comment("n_shots", n_shots);
    shots_csv.comment("seed", seed);
    shots_csv.comment("observable", observable);
    shots_csv.comment("prng", ptsim::PRNG_ALGORITHM_ID);
    shots_csv.comment("output", output.display());
    shots_csv.header("t_us,n_shots,n_dark,p_hat,std_err");
    for r in &records {
        shots_csv.row(&[
            fmt9(r.t * 1e6),
            r.n_shots.to_string(),
            r.n_dark.to_string(),
            fmt9(r.p_hat),
            fmt9(r.std_err),
        ]);
    }
    shots_csv.write_to(&with_suffix(&output, "shots"))?;

    let mut fit_csv = CsvFile::new("experiment");
    fit_csv.comment("omega_khz", omega_khz);
    fit_csv.comment("gamma_true_khz", gamma_khz);
    fit_csv.comment("gamma_hat_khz", fmt9(fit.gamma_hat * to_khz));
    fit_csv.comment("gamma_stderr_khz", fmt9(fit.gamma_stderr * to_khz));
    fit_csv.comment("sse", fmt9(fit.sse));
    fit_csv.comment("n_iters", fit.n_iters);
    fit_csv.header("t_us,rho00_pt,std_err_pt");
    for (t, v, e) in &series {
        fit_csv.row(&[fmt9(t * 1e6), fmt9(*v), fmt9(*e)]);
    }
    fit_csv.write_to(&with_suffix(&output, "ptseries"))?;

    println!(
        "gamma_hat_khz = {} +/- {}",
        fmt9(fit.gamma_hat * to_khz),
        fmt9(fit.gamma_stderr * to_khz)
    );
    Ok(())
}
