//! Resolutions, allocation fractions and transform sizes across ρ_f, plus
//! the cross-range resolution at each speed and heading.
//!
//! cargo run --example derived_params

use ofdm_iva::config::SimConfig;
use ofdm_iva::scenario::derive;
use ofdm_iva::target::{centroid_kinematics, cross_range_resolution};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = SimConfig::default();
    let d = derive(&base.scenario)?;
    println!("lambda {:.4} m, T_s {:.2} us, N_s {}, rho_t {:.4}", d.lambda, d.t_s * 1e6, d.n_s, d.rho_t);
    println!("noise power per subcarrier {:.3e} W, power per subcarrier {:.3e} W\n", d.sigma2, d.p_avg);

    println!("rho_f    K_s    B_s (MHz)  dr (m)   K_p     bin (m)");
    for i in 1..=10 {
        let rho_f = i as f64 / 10.0;
        let mut s = base.scenario.clone();
        s.rho_f = rho_f;
        let d = derive(&s)?;
        println!(
            "{rho_f:4.1}  {:6}  {:9.1}  {:6.4}  {:6}  {:.4}",
            d.k_s,
            d.b_s / 1e6,
            d.delta_r,
            d.k_p,
            d.range_bin_m
        );
    }

    println!("\nheading  speed  M_s  M_p   omega0 (rad/s)  du (m)");
    for heading in [270.0, 300.0] {
        for speed in [10.0, 20.0, 30.0] {
            let cfg = base.with_point(1.0, speed, heading);
            let d = derive(&cfg.scenario)?;
            let snap = centroid_kinematics(&cfg.target, &cfg.trajectory, &cfg.scenario)?;
            println!(
                "{heading:7.0}  {speed:5.0}  {:3}  {:4}  {:14.4}  {:.3}",
                cfg.scenario.m_s,
                d.m_p,
                snap.omega0,
                cross_range_resolution(&snap, &d)?
            );
        }
    }
    Ok(())
}
