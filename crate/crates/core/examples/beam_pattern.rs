//! Composite transmit/receive gain of the synthesized wide sensing beam.
//!
//! cargo run --example beam_pattern -- [beamwidth_deg] [steer_deg]

use ofdm_iva::frontend::synthesize_wide_beam;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<f64> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let width = args.first().copied().unwrap_or(30.0);
    let steer = args.get(1).copied().unwrap_or(0.0);

    let tx = synthesize_wide_beam(10, width, steer, 1.0)?;
    let rx = synthesize_wide_beam(10, width, steer, 1.0)?;
    let composite = |deg: f64| {
        let t = deg.to_radians();
        (rx.response(t) * tx.response(t).conj()).norm()
    };
    let peak = (-900..=900).map(|i| composite(i as f64 / 10.0)).fold(0.0, f64::max);

    println!("N = 10, beamwidth {width} deg, steered to {steer} deg");
    println!("angle   gain (dB rel. peak)");
    for deg in (-80..=80).step_by(5) {
        let g = 20.0 * (composite(deg as f64) / peak).log10();
        let bar = "#".repeat(((g + 40.0).max(0.0) / 1.0) as usize);
        println!("{deg:5}  {g:7.2}  {bar}");
    }
    Ok(())
}
