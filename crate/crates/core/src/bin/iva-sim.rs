use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

use ofdm_iva::config::{load_config, SimConfig};
use ofdm_iva::error::Result;
use ofdm_iva::harness::{
    provenance_header, run_sweep, simulate_trial, split_seed, trials_csv, write_sweep_outputs, SweepOptions,
    SweepResult, SweepSpec, TrialOptions,
};
use ofdm_iva::metrics::aggregate;
use ofdm_iva::tmc::tmc_csv;

/// OFDM inverse-virtual-aperture imaging simulator.
///
/// Without --sweep, runs --n-mc trials (default 1) at the configured point.
/// With --sweep, runs the ρ_f × speed × heading grid (default n_mc 50).
#[derive(Parser, Debug)]
#[command(version)]
struct Cli {
    /// key=value scenario file; omitted keys take their defaults
    #[arg(long)]
    config: Option<PathBuf>,
    /// key=value sweep file (rho_f, speeds, headings, n_mc, out); empty file = default grid
    #[arg(long)]
    sweep: Option<PathBuf>,
    /// Master seed, overrides the config
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo trials per point
    #[arg(long = "n-mc")]
    n_mc: Option<usize>,
    /// Write the cropped image (PGM and CSV) of the first trial at each point
    #[arg(long)]
    export_image: bool,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Dump the sensing matrix of the first trial at each point
    #[arg(long)]
    dump_gs: bool,
    /// 1000 trials per point
    #[arg(long, conflicts_with = "n_mc")]
    full: bool,
    /// Worker threads, 0 = all cores
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Also write per-trial rows to trials.csv
    #[arg(long)]
    trials_csv: bool,
    /// Write the per-symbol motion compensation table of the first trial (single-point mode)
    #[arg(long)]
    tmc_csv: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(p) => load_config(p)?,
        None => SimConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.scenario.seed = seed;
    }
    let n_mc = if cli.full { Some(1000) } else { cli.n_mc };
    match &cli.sweep {
        Some(path) => sweep(cli, &cfg, path, n_mc),
        None => single(cli, &cfg, n_mc.unwrap_or(1)),
    }
}

fn sweep(cli: &Cli, cfg: &SimConfig, path: &Path, n_mc: Option<usize>) -> Result<()> {
    let mut spec = SweepSpec::load(path)?;
    if let Some(n) = n_mc {
        spec.n_mc = n;
    }
    if let Some(out) = &cli.out {
        spec.out_dir = out.clone();
    }
    spec.validate()?;
    let opts = SweepOptions {
        threads: cli.threads,
        write_trials: cli.trials_csv,
        export_image: cli.export_image,
        dump_gs: cli.dump_gs,
    };
    eprintln!("{} points x {} trials", spec.points().len(), spec.n_mc);
    let result = run_sweep(cfg, &spec, &opts)?;
    for p in &result.points {
        println!(
            "heading {:5.1}  v {:4.1}  rho_f {:.2}  IC_mean {:.4}  RMSE_c {:.4} m  ({} ok, {} failed)",
            p.heading_deg, p.speed, p.rho_f, p.ic_mean, p.rmse_c, p.n_ok, p.n_failed
        );
    }
    for f in write_sweep_outputs(&result, cfg, &spec, opts.write_trials)? {
        eprintln!("wrote {}", f.display());
    }
    Ok(())
}

fn single(cli: &Cli, cfg: &SimConfig, n_mc: usize) -> Result<()> {
    let out_dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    let mut reports = Vec::new();
    for i in 0..n_mc as u64 {
        let opts = TrialOptions {
            out_dir: Some(out_dir.clone()),
            export_image: cli.export_image && i == 0,
            dump_gs: cli.dump_gs && i == 0,
        };
        let out = simulate_trial(cfg, i, split_seed(cfg.scenario.seed, i), &opts)?;
        if cli.tmc_csv && i == 0 {
            std::fs::create_dir_all(&out_dir)?;
            std::fs::write(out_dir.join("tmc.csv"), tmc_csv(&out.tmc))?;
        }
        let r = &out.report;
        println!(
            "trial {i}  seed {}  IC {:.4}  r_hat {:.4} m  error {:+.4} m",
            r.seed,
            r.ic,
            r.centroid_range,
            r.centroid_error()
        );
        reports.push(out.report);
    }
    let (ic, rmse) = aggregate(&reports)?;
    println!("IC_mean {ic:.4}  RMSE_c {rmse:.4} m");
    if cli.trials_csv {
        let spec = SweepSpec {
            rho_f: vec![cfg.scenario.rho_f],
            speeds: vec![cfg.trajectory.speed],
            headings: vec![cfg.trajectory.heading_deg],
            n_mc,
            out_dir: out_dir.clone(),
        };
        let result = SweepResult { points: vec![], reports, failures: vec![] };
        let header = provenance_header(cfg, &spec, &ofdm_iva::harness::git_revision());
        std::fs::create_dir_all(&out_dir)?;
        std::fs::write(out_dir.join("trials.csv"), trials_csv(&result, &header))?;
    }
    Ok(())
}
