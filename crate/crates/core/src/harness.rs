//! Trial pipeline, Monte Carlo sweeps and result files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::SimConfig;
use crate::error::{IvaError, Result};
use crate::frontend::{echo_matrix, receive, write_sensing_matrix, CompositeBeam, SensingMatrix, SymbolGrid};
use crate::imaging::{form_image_rows, write_image_csv, write_pgm16, RangeDopplerImage};
use crate::metrics::{aggregate, centroid_range, image_contrast, threshold_image, CropWindow, MetricsReport};
use crate::scenario::{derive, DerivedParams};
use crate::target::{centroid_kinematics, cross_range_resolution, KinematicSnapshot};
use crate::tmc::{motion_compensate, TmcOutput};

/// SplitMix64 step applied to `master + (index + 1)·γ`.
pub fn split_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

// Independent streams per trial so the scattering phases of trial i are the
// same at every sweep point.
const STREAM_PHASES: u64 = 0;
const STREAM_GRID: u64 = 1;
const STREAM_NOISE: u64 = 2;

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Files written by a trial, all optional.
#[derive(Debug, Clone, Default)]
pub struct TrialOptions {
    pub out_dir: Option<PathBuf>,
    pub export_image: bool,
    pub dump_gs: bool,
}

/// Everything a trial produced, for inspection.
#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub report: MetricsReport,
    pub derived: DerivedParams,
    pub snapshot: KinematicSnapshot,
    pub delta_u: f64,
    pub tmc: TmcOutput,
    pub image: RangeDopplerImage,
    pub window: CropWindow,
}

/// Noisy (or noiseless) sensing matrix of one trial.
pub fn simulate_sensing(cfg: &SimConfig, derived: &DerivedParams, seed: u64) -> Result<SensingMatrix> {
    use rand::Rng;
    let beam = CompositeBeam::from_scenario(&cfg.scenario, derived)?;
    let mut rng_phase = stream(seed, STREAM_PHASES);
    let phases: Vec<f64> = (0..cfg.target.len())
        .map(|_| rng_phase.gen_range(0.0..std::f64::consts::TAU))
        .collect();
    let grid = SymbolGrid::qpsk(derived.k_s, cfg.scenario.m_s, &mut stream(seed, STREAM_GRID));
    let echo = echo_matrix(&cfg.target, &cfg.trajectory, &cfg.scenario, derived, &beam, &phases)?;
    receive(&echo, &grid, derived.sigma2, cfg.scenario.noise, &mut stream(seed, STREAM_NOISE))
}

/// Sensing matrix → motion compensation → image → metrics.
pub fn simulate_trial(cfg: &SimConfig, trial: u64, seed: u64, opts: &TrialOptions) -> Result<TrialOutcome> {
    let wrap = |e: IvaError| IvaError::Trial { trial, source: Box::new(e) };
    run_pipeline(cfg, trial, seed, opts).map_err(wrap)
}

fn run_pipeline(cfg: &SimConfig, trial: u64, seed: u64, opts: &TrialOptions) -> Result<TrialOutcome> {
    cfg.validate()?;
    let s = &cfg.scenario;
    let derived = derive(s)?;
    let snapshot = centroid_kinematics(&cfg.target, &cfg.trajectory, s)?;
    let delta_u = cross_range_resolution(&snapshot, &derived)?;

    let gs = simulate_sensing(cfg, &derived, seed)?;
    let tag = file_tag(cfg, trial);
    if opts.dump_gs {
        let dir = out_dir(opts)?;
        write_sensing_matrix(&dir.join(format!("gs_{tag}.bin")), &gs)?;
    }
    let tmc = motion_compensate(&gs, derived.k_p, s.delta_f, s.n_ref, s.cell_gate)?;
    drop(gs);

    let true_range = snapshot.range;
    let bin = tmc.profiles.bin_m;
    let lo = ((true_range - s.image_gate) / bin).floor().max(0.0) as usize;
    let hi = (((true_range + s.image_gate) / bin).ceil() as usize + 1).min(derived.k_p);
    let image = form_image_rows(&tmc.profiles, derived.m_p, s.t_sri, lo..hi)?
        .with_crossrange(&snapshot, derived.lambda)?;
    let window = CropWindow::resolve(&image, true_range, s.crop_half_range, s.crop_half_crossrange)?;
    let ic = image_contrast(&image, &window.region)?;
    let r_hat = centroid_range(&threshold_image(&image, s.epsilon)?)?;

    if opts.export_image {
        let dir = out_dir(opts)?;
        write_pgm16(&dir.join(format!("image_{tag}.pgm")), &image, &window.region)?;
        write_image_csv(&dir.join(format!("image_{tag}.csv")), &image, &window.region)?;
    }

    let report = MetricsReport {
        trial,
        seed,
        rho_f: s.rho_f,
        speed: cfg.trajectory.speed,
        heading_deg: cfg.trajectory.heading_deg,
        ic,
        centroid_range: r_hat,
        true_range,
    };
    Ok(TrialOutcome { report, derived, snapshot, delta_u, tmc, image, window })
}

/// Metrics of one trial; deterministic in `(cfg, seed)`.
pub fn run_trial(cfg: &SimConfig, trial: u64, seed: u64, opts: &TrialOptions) -> Result<MetricsReport> {
    simulate_trial(cfg, trial, seed, opts).map(|o| o.report)
}

fn out_dir(opts: &TrialOptions) -> Result<PathBuf> {
    let dir = opts.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn file_tag(cfg: &SimConfig, trial: u64) -> String {
    format!(
        "rho{:.2}_v{}_h{}_t{trial}",
        cfg.scenario.rho_f, cfg.trajectory.speed, cfg.trajectory.heading_deg
    )
}

/// Sweep grid: every (heading, speed, ρ_f) point gets `n_mc` trials.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub rho_f: Vec<f64>,
    pub speeds: Vec<f64>,
    pub headings: Vec<f64>,
    pub n_mc: usize,
    pub out_dir: PathBuf,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            rho_f: (2..=10).map(|i| i as f64 / 10.0).collect(),
            speeds: vec![10.0, 20.0, 30.0],
            headings: vec![270.0, 300.0],
            n_mc: 50,
            out_dir: PathBuf::from("out"),
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, list) in [("rho_f", &self.rho_f), ("speeds", &self.speeds), ("headings", &self.headings)] {
            if list.is_empty() {
                return Err(IvaError::field(name, "list must not be empty"));
            }
        }
        if self.n_mc == 0 {
            return Err(IvaError::field("n_mc", "must be at least 1"));
        }
        Ok(())
    }

    /// `key=value` text with keys `rho_f`, `speeds`, `headings` (comma
    /// lists), `n_mc` and `out`. Missing keys keep the defaults.
    pub fn parse(text: &str, origin: &Path) -> Result<SweepSpec> {
        let mut spec = SweepSpec::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| IvaError::Parse { path: origin.to_path_buf(), line: idx + 1, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key=value, got `{line}`")))?;
            let value = value.trim();
            let list = || -> Result<Vec<f64>> {
                value
                    .split(',')
                    .map(|v| v.trim().parse::<f64>().map_err(|_| err(format!("`{v}` is not a number"))))
                    .collect()
            };
            match key.trim() {
                "rho_f" => spec.rho_f = list()?,
                "speeds" => spec.speeds = list()?,
                "headings" => spec.headings = list()?,
                "n_mc" => spec.n_mc = value.parse().map_err(|_| err(format!("`{value}` is not a count")))?,
                "out" => spec.out_dir = PathBuf::from(value),
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<SweepSpec> {
        SweepSpec::parse(&fs::read_to_string(path)?, path)
    }

    /// Points in output order: heading, then speed, then ρ_f.
    pub fn points(&self) -> Vec<(f64, f64, f64)> {
        let mut pts = Vec::new();
        for &h in &self.headings {
            for &v in &self.speeds {
                for &r in &self.rho_f {
                    pts.push((h, v, r));
                }
            }
        }
        pts
    }
}

#[derive(Debug, Clone, Default)]
pub struct SweepOptions {
    /// Worker threads; 0 uses every core.
    pub threads: usize,
    pub write_trials: bool,
    /// Export the image of the first trial at each point.
    pub export_image: bool,
    /// Dump G_s of the first trial at each point.
    pub dump_gs: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointSummary {
    pub heading_deg: f64,
    pub speed: f64,
    pub rho_f: f64,
    pub ic_mean: f64,
    pub rmse_c: f64,
    pub n_ok: usize,
    pub n_failed: usize,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub points: Vec<PointSummary>,
    pub reports: Vec<MetricsReport>,
    pub failures: Vec<(u64, String)>,
}

impl SweepResult {
    pub fn point(&self, heading_deg: f64, speed: f64, rho_f: f64) -> Option<&PointSummary> {
        let close = |a: f64, b: f64| (a - b).abs() < 1e-9;
        self.points
            .iter()
            .find(|p| close(p.heading_deg, heading_deg) && close(p.speed, speed) && close(p.rho_f, rho_f))
    }
}

/// Runs every trial of the grid. Trial `i` of every point uses the seed
/// `split_seed(master, i)`; results do not depend on scheduling.
pub fn run_sweep(base: &SimConfig, spec: &SweepSpec, opts: &SweepOptions) -> Result<SweepResult> {
    spec.validate()?;
    let master = base.scenario.seed;
    let points = spec.points();
    let n_mc = spec.n_mc as u64;
    let jobs: Vec<(usize, u64)> = (0..points.len()).flat_map(|p| (0..n_mc).map(move |i| (p, i))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads)
        .build()
        .map_err(|e| IvaError::Config(format!("thread pool: {e}")))?;
    let outcomes: Vec<Result<MetricsReport>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(p, i)| {
                let (h, v, r) = points[p];
                let cfg = base.with_point(r, v, h);
                let trial_opts = TrialOptions {
                    out_dir: Some(spec.out_dir.clone()),
                    export_image: opts.export_image && i == 0,
                    dump_gs: opts.dump_gs && i == 0,
                };
                run_trial(&cfg, p as u64 * n_mc + i, split_seed(master, i), &trial_opts)
            })
            .collect()
    });

    let mut reports = Vec::new();
    let mut failures = Vec::new();
    let mut summaries = Vec::new();
    for (p, chunk) in outcomes.chunks(spec.n_mc).enumerate() {
        let (h, v, r) = points[p];
        let ok: Vec<MetricsReport> = chunk
            .iter()
            .enumerate()
            .filter_map(|(i, res)| match res {
                Ok(rep) => Some(rep.clone()),
                Err(e) => {
                    failures.push((p as u64 * n_mc + i as u64, e.to_string()));
                    None
                }
            })
            .collect();
        let (ic_mean, rmse_c) = aggregate(&ok).unwrap_or((f64::NAN, f64::NAN));
        summaries.push(PointSummary {
            heading_deg: h,
            speed: v,
            rho_f: r,
            ic_mean,
            rmse_c,
            n_ok: ok.len(),
            n_failed: chunk.len() - ok.len(),
        });
        reports.extend(ok);
    }
    for (trial, msg) in &failures {
        eprintln!("trial {trial} excluded: {msg}");
    }
    if !failures.is_empty() {
        eprintln!("{} of {} trials failed", failures.len(), jobs.len());
    }
    Ok(SweepResult { points: summaries, reports, failures })
}

/// Short git revision of the working directory, or `unknown`.
pub fn git_revision() -> String {
    std::process::Command::new("git")
        .args(["rev-parse", "--short", "HEAD"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .and_then(|o| String::from_utf8(o.stdout).ok())
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| "unknown".into())
}

/// Header comment shared by every result file.
pub fn provenance_header(base: &SimConfig, spec: &SweepSpec, git_rev: &str) -> String {
    format!(
        "# config_hash={} git_rev={git_rev} master_seed={} n_mc={}\n",
        base.hash(),
        base.scenario.seed,
        spec.n_mc
    )
}

pub fn ic_csv(result: &SweepResult, header: &str) -> String {
    let mut s = String::from(header);
    s.push_str("heading_deg,speed_mps,rho_f,ic_mean,n_ok,n_failed\n");
    for p in &result.points {
        let _ = writeln!(s, "{},{},{:.2},{:.9},{},{}", p.heading_deg, p.speed, p.rho_f, p.ic_mean, p.n_ok, p.n_failed);
    }
    s
}

pub fn rmse_csv(result: &SweepResult, header: &str) -> String {
    let mut s = String::from(header);
    s.push_str("heading_deg,speed_mps,rho_f,rmse_c_m,n_ok,n_failed\n");
    for p in &result.points {
        let _ = writeln!(s, "{},{},{:.2},{:.9},{},{}", p.heading_deg, p.speed, p.rho_f, p.rmse_c, p.n_ok, p.n_failed);
    }
    s
}

/// One row per successful trial, then a `summary` row whose `ic` and
/// `error` columns hold the overall IC mean and centroid RMSE.
pub fn trials_csv(result: &SweepResult, header: &str) -> String {
    let mut s = String::from(header);
    s.push_str("trial,seed,rho_f,speed_mps,heading_deg,ic,r_hat_m,error_m\n");
    for r in &result.reports {
        let _ = writeln!(
            s,
            "{},{},{:.2},{},{},{:.9},{:.9},{:.9}",
            r.trial,
            r.seed,
            r.rho_f,
            r.speed,
            r.heading_deg,
            r.ic,
            r.centroid_range,
            r.centroid_error()
        );
    }
    if let Ok((ic, rmse)) = aggregate(&result.reports) {
        let _ = writeln!(s, "summary,,,,,{ic:.9},,{rmse:.9}");
    }
    s
}

/// Writes `ic_mean_vs_rhof.csv`, `rmse_vs_rhof.csv` and optionally
/// `trials.csv` into the spec's output directory.
pub fn write_sweep_outputs(
    result: &SweepResult,
    base: &SimConfig,
    spec: &SweepSpec,
    write_trials: bool,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(&spec.out_dir)?;
    let header = provenance_header(base, spec, &git_revision());
    let mut files = vec![
        (spec.out_dir.join("ic_mean_vs_rhof.csv"), ic_csv(result, &header)),
        (spec.out_dir.join("rmse_vs_rhof.csv"), rmse_csv(result, &header)),
    ];
    if write_trials {
        files.push((spec.out_dir.join("trials.csv"), trials_csv(result, &header)));
    }
    for (path, text) in &files {
        fs::write(path, text)?;
    }
    Ok(files.into_iter().map(|(p, _)| p).collect())
}
