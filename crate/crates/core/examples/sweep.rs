//! A reduced ρ_f sweep written to CSV, the data behind the contrast and
//! centroid-error curves.
//!
//! cargo run --release --example sweep -- [n_mc] [out_dir]

use std::path::PathBuf;

use ofdm_iva::config::SimConfig;
use ofdm_iva::harness::{run_sweep, write_sweep_outputs, SweepOptions, SweepSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n_mc: usize = args.next().map(|a| a.parse()).transpose()?.unwrap_or(5);
    let out_dir = args.next().map(PathBuf::from).unwrap_or_else(|| PathBuf::from("target/sweep"));

    let spec = SweepSpec {
        rho_f: vec![0.2, 0.4, 0.6, 0.8, 1.0],
        speeds: vec![10.0, 30.0],
        headings: vec![270.0, 300.0],
        n_mc,
        out_dir,
    };
    let base = SimConfig::default();
    let result = run_sweep(&base, &spec, &SweepOptions { write_trials: true, ..Default::default() })?;

    println!("heading  speed  rho_f  IC_mean  RMSE_c (m)");
    for p in &result.points {
        println!("{:7.0}  {:5.0}  {:5.2}  {:7.3}  {:.4}", p.heading_deg, p.speed, p.rho_f, p.ic_mean, p.rmse_c);
    }
    for f in write_sweep_outputs(&result, &base, &spec, true)? {
        println!("wrote {}", f.display());
    }
    Ok(())
}
