//! Monte Carlo trials at one (ρ_f, speed, heading) point.
//!
//! cargo run --release --example monte_carlo_point -- [rho_f] [speed] [heading_deg] [n_mc]

use std::time::Instant;

use ofdm_iva::config::SimConfig;
use ofdm_iva::harness::{run_trial, split_seed, TrialOptions};
use ofdm_iva::metrics::aggregate;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<f64> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let rho_f = args.first().copied().unwrap_or(0.5);
    let speed = args.get(1).copied().unwrap_or(30.0);
    let heading = args.get(2).copied().unwrap_or(270.0);
    let n_mc = args.get(3).copied().unwrap_or(20.0) as u64;

    let cfg = SimConfig::default().with_point(rho_f, speed, heading);
    let start = Instant::now();
    let mut reports = Vec::new();
    for i in 0..n_mc {
        let rep = run_trial(&cfg, i, split_seed(cfg.scenario.seed, i), &TrialOptions::default())?;
        println!("trial {i:3}  IC {:.3}  r_hat {:.4} m  error {:+.4} m", rep.ic, rep.centroid_range, rep.centroid_error());
        reports.push(rep);
    }
    let (ic, rmse) = aggregate(&reports)?;
    println!(
        "\nrho_f = {rho_f}, v = {speed} m/s, heading {heading} deg: IC_mean = {ic:.3}, RMSE_c = {rmse:.4} m ({n_mc} trials, {:.1} s)",
        start.elapsed().as_secs_f64()
    );
    Ok(())
}
