use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::mpsc;

use boltzecho_core::analysis::{assemble_rows, cell_key, fit_cell, fit_decay_rate, required_cells, CellFit, CellStatus};
use boltzecho_core::echo::{boltzmann_echo_fast, loschmidt_echo_series, purity_series};
use boltzecho_core::maps::{classical_lyapunov_numeric, lyapunov_formula};
use boltzecho_core::{ClassicalMapParams, EchoConfig, EchoSeries, Error, SeriesKind, TorusSpace};
use rayon::prelude::*;

use crate::cli::{EchoArgs, KernelArgs, LyapunovArgs, SweepArgs};
use crate::config::{preset, FileConfig, GridConfig};
use crate::error::CliError;
use crate::output::{write_kernel_csv, write_series_csv, write_sweep_csv, Manifest, RunState, SeriesFit};

fn prepare_out_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))
}

fn series_for(kind: SeriesKind, cfg: &EchoConfig) -> Result<EchoSeries, Error> {
    match kind {
        SeriesKind::Be => boltzmann_echo_fast(cfg),
        SeriesKind::Le => loschmidt_echo_series(&cfg.with_epsilon(0.0)),
        SeriesKind::Purity => purity_series(cfg),
    }
}

pub fn echo(args: EchoArgs) -> Result<(), CliError> {
    let mut flags = FileConfig::from_flags(&args.run);
    if !args.kinds.is_empty() {
        flags.kinds = Some(args.kinds.clone());
    }
    let effective = FileConfig::resolve(&args.run, None, flags)?;
    let cfg = effective.echo_config()?;
    let kinds = effective.kinds()?;

    prepare_out_dir(&args.run.out_dir)?;
    let csv_path = args.run.out_dir.join("echo.csv");
    let manifest_path = args.run.out_dir.join("echo.manifest.json");
    let mut manifest = Manifest::new("echo", effective, vec!["echo.csv".into()]);

    let series = kinds
        .iter()
        .map(|&k| series_for(k, &cfg))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Config(e.to_string()))?;
    write_series_csv(&csv_path, &series)?;

    let mut unfittable = Vec::new();
    for s in &series {
        match fit_decay_rate(s) {
            Ok(f) => {
                println!(
                    "{}: gamma = {:.6} per step, window [{}, {}], r^2 = {:.6}, floor = {:.3e}",
                    s.kind, f.gamma, f.t_lo, f.t_hi, f.r_squared, f.floor_estimate
                );
                manifest.series.push(SeriesFit { kind: s.kind, fit: Some(f), error: None });
            }
            Err(e) => {
                println!("{}: {e}", s.kind);
                unfittable.push(s.kind.to_string());
                manifest.series.push(SeriesFit { kind: s.kind, fit: None, error: Some(e.to_string()) });
            }
        }
    }
    manifest.state = if unfittable.is_empty() { RunState::Complete } else { RunState::Partial };
    manifest.save(&manifest_path)?;
    println!("wrote {}", csv_path.display());
    if unfittable.is_empty() {
        Ok(())
    } else {
        Err(CliError::Unfittable(format!("no decay rate for {}", unfittable.join(", "))))
    }
}

pub fn sweep(args: SweepArgs) -> Result<(), CliError> {
    let preset_cfg = match &args.preset {
        Some(name) => Some(preset(name, args.run.desk)?),
        None => None,
    };
    let mut flags = FileConfig::from_flags(&args.run);
    flags.workers = args.workers;
    if !args.epsilons.is_empty() || !args.sigmas_over_hbar.is_empty() || !args.k_primes.is_empty() {
        if args.epsilons.is_empty() || (args.sigmas_over_hbar.is_empty() && args.k_primes.is_empty()) {
            return Err(CliError::Config("--epsilons needs --sigmas-over-hbar or --k-primes, and vice versa".into()));
        }
        flags.grid = Some(GridConfig {
            epsilon: args.epsilons.clone(),
            sigma_over_hbar: (!args.sigmas_over_hbar.is_empty()).then(|| args.sigmas_over_hbar.clone()),
            k_prime: (!args.k_primes.is_empty()).then(|| args.k_primes.clone()),
        });
    }
    let effective = FileConfig::resolve(&args.run, preset_cfg, flags)?;
    let cells = effective.sweep_cells()?;
    let workers = effective.workers.unwrap_or(1);
    if workers == 0 {
        return Err(CliError::Config("workers must be at least 1".into()));
    }

    let out_dir = &args.run.out_dir;
    prepare_out_dir(out_dir)?;
    let csv_path = out_dir.join("sweep.csv");
    let manifest_path = out_dir.join("sweep.manifest.json");

    let needed = required_cells(&cells);
    let mut done: HashMap<_, CellFit> = HashMap::new();
    if args.resume && manifest_path.exists() {
        let previous = Manifest::load(&manifest_path)?;
        if !same_run(&previous.effective_config, &effective) {
            return Err(CliError::Config(format!(
                "{} was written for a different configuration; remove it or drop --resume",
                manifest_path.display()
            )));
        }
        for c in previous.cells {
            if !matches!(c.status, CellStatus::Failed { .. }) {
                done.insert(cell_key(&c.config), c);
            }
        }
    }
    let todo: Vec<EchoConfig> = needed.iter().filter(|c| !done.contains_key(&cell_key(c))).copied().collect();
    eprintln!("{} series needed, {} reused, {} to compute on {workers} worker(s)", needed.len(), needed.len() - todo.len(), todo.len());

    let mut manifest = Manifest::new("sweep", effective, vec!["sweep.csv".into()]);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Io(format!("cannot start worker pool: {e}")))?;
    let (tx, rx) = mpsc::channel::<CellFit>();
    std::thread::scope(|scope| -> Result<(), CliError> {
        scope.spawn(move || {
            pool.install(|| {
                todo.par_iter().for_each_with(tx, |tx, c| {
                    let _ = tx.send(fit_cell(c));
                })
            })
        });
        // Single writer: the manifest is rewritten as each cell lands.
        for fit in rx {
            eprintln!(
                "  eps = {}, sigma/hbar = {:.4}: {}",
                fit.config.epsilon(),
                fit.config.sigma_over_hbar(),
                match &fit.status {
                    CellStatus::Ok => format!("gamma = {:.5}", fit.gamma()),
                    other => format!("{other:?}"),
                }
            );
            done.insert(cell_key(&fit.config), fit);
            manifest.cells = sorted_cells(&done);
            manifest.save(&manifest_path)?;
        }
        Ok(())
    })?;

    let fits = sorted_cells(&done);
    let result = assemble_rows(&cells, &fits).map_err(|e| CliError::Io(e.to_string()))?;
    write_sweep_csv(&csv_path, &result)?;
    let failed = fits.iter().filter(|c| !c.status.is_ok()).count();
    manifest.cells = fits;
    manifest.state = if failed == 0 { RunState::Complete } else { RunState::Partial };
    manifest.save(&manifest_path)?;
    println!("wrote {} ({} rows)", csv_path.display(), result.rows.len());
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::PartialSweep(format!("{failed} of {} series have no decay rate; see {}", needed.len(), manifest_path.display())))
    }
}

fn sorted_cells(done: &HashMap<boltzecho_core::analysis::CellKey, CellFit>) -> Vec<CellFit> {
    let mut keys: Vec<_> = done.keys().copied().collect();
    keys.sort();
    keys.into_iter().map(|k| done[&k].clone()).collect()
}

/// Equal up to the worker count, which never changes results.
// The grid may grow between runs; cells are matched by their own parameters.
fn same_run(a: &FileConfig, b: &FileConfig) -> bool {
    let strip = |c: &FileConfig| FileConfig { workers: None, grid: None, ..c.clone() };
    strip(a) == strip(b)
}

pub fn kernel_dump(args: KernelArgs) -> Result<(), CliError> {
    let effective = FileConfig::resolve(&args.run, None, FileConfig::from_flags(&args.run))?;
    let cfg = effective.echo_config()?;
    let space = TorusSpace::new(cfg.dim).map_err(|e| CliError::Config(e.to_string()))?;
    let kernel = cfg.kernel.build(space).map_err(|e| CliError::Config(e.to_string()))?;
    prepare_out_dir(&args.run.out_dir)?;
    let path: PathBuf = args.run.out_dir.join("kernel.csv");
    write_kernel_csv(&path, &kernel)?;
    let mut manifest = Manifest::new("kernel-dump", effective, vec!["kernel.csv".into()]);
    manifest.state = RunState::Complete;
    manifest.save(&args.run.out_dir.join("kernel.manifest.json"))?;
    println!("wrote {} ({} rows, model {}, epsilon {})", path.display(), cfg.dim * cfg.dim, cfg.model(), cfg.epsilon());
    Ok(())
}

pub fn lyapunov(args: LyapunovArgs) -> Result<(), CliError> {
    let refuse = |e: Error| CliError::Config(format!("refusing: {e}"));
    let closed = lyapunov_formula(args.a, args.b).map_err(refuse)?;
    let params = ClassicalMapParams::new(args.a, args.b, args.k).map_err(refuse)?;
    let est = classical_lyapunov_numeric(&params, args.iterations, args.trajectories, args.seed)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let rel = (est.mean - closed).abs() / closed;
    println!("a = {}, b = {}, k = {}", args.a, args.b, args.k);
    println!("closed form (k = 0): {closed:.6}");
    println!(
        "tangent map:         {:.6} +/- {:.1e} ({} trajectories x {} iterations, seed {})",
        est.mean, est.stderr, est.trajectories, est.iterations, args.seed
    );
    println!("relative difference: {:.4}%", 100.0 * rel);
    Ok(())
}
