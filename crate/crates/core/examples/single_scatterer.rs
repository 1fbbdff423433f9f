//! A single static point through the whole chain: the image peak must sit on
//! the range bin of the point and on the zero-Doppler column.
//!
//! cargo run --release --example single_scatterer -- [range_m]

use ofdm_iva::config::parse_config;
use ofdm_iva::frontend::{echo_matrix, CompositeBeam};
use ofdm_iva::imaging::form_image_rows;
use ofdm_iva::scenario::derive;
use ofdm_iva::tmc::motion_compensate;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let range: f64 = std::env::args().nth(1).map(|a| a.parse()).transpose()?.unwrap_or(64.4016);
    // a point at the target centre, seen from a base station on the ground
    let cfg = parse_config(&format!(
        "rho_f=0.5\nspeed=0\nnoise=false\nbeam=ideal\nbs_z=1.6\nmidpoint_x={range}\nscatterer=0,0,0,1"
    ))?;
    let s = &cfg.scenario;
    let d = derive(s)?;
    let beam = CompositeBeam::from_scenario(s, &d)?;
    let gs = echo_matrix(&cfg.target, &cfg.trajectory, s, &d, &beam, &[0.0])?;
    let tmc = motion_compensate(&gs, d.k_p, s.delta_f, s.n_ref, s.cell_gate)?;

    let bin = tmc.profiles.bin_m;
    let lo = ((range - 5.0) / bin) as usize;
    let image = form_image_rows(&tmc.profiles, d.m_p, s.t_sri, lo..lo + (10.0 / bin) as usize)?;
    let (r, c) = image.argmax();
    let expected_bin = (range / bin).round() as usize;
    println!("point at {range} m, range bin spacing {bin:.4} m");
    println!(
        "peak at bin {} ({:.4} m), expected bin {expected_bin}; Doppler column {c} of {}, {:.3} Hz",
        image.first_row + r,
        image.range_axis[r],
        image.cols(),
        image.doppler_axis[c]
    );
    Ok(())
}
