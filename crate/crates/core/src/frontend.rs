//! Signal synthesis and reception: QPSK grid, wide-beam weights, radar
//! equation gains, beamformed echoes and reciprocal filtering into the
//! sensing matrix `G_s`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::{Array2, ShapeBuilder};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{IvaError, Result};
use crate::scenario::{BeamModel, DerivedParams, ScenarioConfig, SPEED_OF_LIGHT};
use crate::target::{azimuth, exact_range, scatterer_positions, ExtendedTarget, TrajectoryState};

const GRID_STEP_DEG: f64 = 0.5;

/// ULA steering vector, element `p`: `exp(i (p − (n−1)/2) π sin θ)`.
pub fn array_response(n: usize, theta: f64) -> Vec<Complex64> {
    let centre = (n as f64 - 1.0) / 2.0;
    let s = PI * theta.sin();
    (0..n)
        .map(|p| Complex64::from_polar(1.0, (p as f64 - centre) * s))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamWeights {
    pub weights: Vec<Complex64>,
    pub norm_sq: f64,
}

impl BeamWeights {
    /// Array factor `wᴴ a(θ)`.
    pub fn response(&self, theta: f64) -> Complex64 {
        array_response(self.weights.len(), theta)
            .iter()
            .zip(&self.weights)
            .map(|(a, w)| w.conj() * a)
            .sum()
    }
}

/// Least-squares fit of `wᴴ a(θ)` to a flat sector mask on a 0.5° azimuth
/// grid, rescaled so that `‖w‖² = norm_sq`.
pub fn synthesize_wide_beam(n: usize, beamwidth_deg: f64, steer_deg: f64, norm_sq: f64) -> Result<BeamWeights> {
    if n == 0 {
        return Err(IvaError::Synthesis("array has no elements".into()));
    }
    if !(norm_sq > 0.0 && norm_sq.is_finite()) {
        return Err(IvaError::Synthesis(format!("invalid weight norm {norm_sq}")));
    }
    if n == 1 {
        return Ok(BeamWeights { weights: vec![Complex64::new(norm_sq.sqrt(), 0.0)], norm_sq });
    }
    let half = beamwidth_deg / 2.0;
    if beamwidth_deg.to_radians() < 2.0 / n as f64 {
        return Err(IvaError::Synthesis(format!(
            "{beamwidth_deg}° is narrower than the {n}-element aperture allows"
        )));
    }
    if steer_deg - half <= -90.0 || steer_deg + half >= 90.0 {
        return Err(IvaError::Synthesis("sector extends past endfire".into()));
    }

    let mut gram = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    let mut rhs = vec![Complex64::new(0.0, 0.0); n];
    let steps = (90.0 / GRID_STEP_DEG) as i64 - 1;
    for i in -steps..=steps {
        let deg = i as f64 * GRID_STEP_DEG;
        let a = array_response(n, deg.to_radians());
        let d = if (deg - steer_deg).abs() <= half { 1.0 } else { 0.0 };
        for p in 0..n {
            let ap = a[p].conj();
            rhs[p] += ap * d;
            for q in 0..n {
                gram[p][q] += ap * a[q];
            }
        }
    }
    let v = solve_complex(gram, rhs)?;
    let weights: Vec<Complex64> = v.iter().map(|x| x.conj()).collect();
    let energy: f64 = weights.iter().map(|w| w.norm_sqr()).sum();
    if energy <= 0.0 {
        return Err(IvaError::Synthesis("least-squares solution is zero".into()));
    }
    let scale = (norm_sq / energy).sqrt();
    Ok(BeamWeights { weights: weights.iter().map(|w| w * scale).collect(), norm_sq })
}

fn solve_complex(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Result<Vec<Complex64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .unwrap_or(col);
        if a[pivot][col].norm() < 1e-12 {
            return Err(IvaError::Synthesis("singular sector-fit system".into()));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                let t = a[col][k];
                a[row][k] -= f * t;
            }
            let t = b[col];
            b[row] -= f * t;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let tail: Complex64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Ok(x)
}

/// Composite transmit-receive gain Υ(θ).
#[derive(Debug, Clone, PartialEq)]
pub enum CompositeBeam {
    Synthesized { tx: BeamWeights, rx: BeamWeights },
    /// 1 inside `[lo, hi]` (radians), 0 outside.
    Ideal { lo: f64, hi: f64 },
}

impl CompositeBeam {
    pub fn from_scenario(scenario: &ScenarioConfig, derived: &DerivedParams) -> Result<Self> {
        match scenario.beam {
            BeamModel::Synthesized => Ok(CompositeBeam::Synthesized {
                tx: synthesize_wide_beam(scenario.n_t, scenario.beamwidth_t_deg, scenario.theta_s_deg, derived.p_avg)?,
                rx: synthesize_wide_beam(scenario.n_r, scenario.beamwidth_r_deg, scenario.theta_s_deg, 1.0)?,
            }),
            BeamModel::Ideal => {
                let half = scenario.beamwidth_t_deg.min(scenario.beamwidth_r_deg) / 2.0;
                Ok(CompositeBeam::Ideal {
                    lo: (scenario.theta_s_deg - half).to_radians(),
                    hi: (scenario.theta_s_deg + half).to_radians(),
                })
            }
        }
    }

    /// `(w_Rᴴ a_R(θ)) · (a_T(θ)ᴴ w_T)`.
    pub fn gain(&self, theta: f64) -> Complex64 {
        match self {
            CompositeBeam::Synthesized { tx, rx } => rx.response(theta) * tx.response(theta).conj(),
            CompositeBeam::Ideal { lo, hi } => {
                if theta >= *lo && theta <= *hi {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
        }
    }
}

/// Radar-equation amplitude `√(G_T G_R σ c² / ((4π)³ f_c² R⁴))`.
pub fn channel_gain(range: f64, rcs: f64, derived: &DerivedParams, f_c: f64) -> Result<f64> {
    if !(range > 0.0) {
        return Err(IvaError::Geometry(format!("non-positive range {range}")));
    }
    let four_pi_cubed = (4.0 * PI).powi(3);
    Ok((derived.g_t * derived.g_r * rcs * SPEED_OF_LIGHT * SPEED_OF_LIGHT
        / (four_pi_cubed * f_c * f_c * range.powi(4)))
    .sqrt())
}

/// Unit-modulus QPSK symbols on the sensing subcarriers, `K_s × M_s`.
#[derive(Debug, Clone)]
pub struct SymbolGrid {
    pub x: Array2<Complex64>,
}

impl SymbolGrid {
    pub fn qpsk<R: Rng + ?Sized>(k_s: usize, m_s: usize, rng: &mut R) -> Self {
        let mut x = Array2::zeros((k_s, m_s).f());
        for v in x.iter_mut() {
            let bits: u8 = rng.gen_range(0..4);
            let re = if bits & 1 == 0 { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 };
            let im = if bits & 2 == 0 { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 };
            *v = Complex64::new(re, im);
        }
        SymbolGrid { x }
    }
}

/// `G_s`: rows are subcarriers `k`, columns are sensing symbols `m_s`.
/// Stored column-major so each slow-time column is contiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct SensingMatrix {
    pub g: Array2<Complex64>,
}

impl SensingMatrix {
    pub fn k_s(&self) -> usize {
        self.g.nrows()
    }

    pub fn m_s(&self) -> usize {
        self.g.ncols()
    }

    pub fn column(&self, m: usize) -> Vec<Complex64> {
        self.g.column(m).to_vec()
    }
}

/// Noise-free beamformed echo `Σ_l β_l Υ(θ_l)` over the sensing grid, using
/// exact ranges at every slow-time sample and the supplied scattering
/// phases.
pub fn echo_matrix(
    target: &ExtendedTarget,
    traj: &TrajectoryState,
    scenario: &ScenarioConfig,
    derived: &DerivedParams,
    beam: &CompositeBeam,
    phases: &[f64],
) -> Result<SensingMatrix> {
    if phases.len() != target.len() {
        return Err(IvaError::Config(format!(
            "{} scattering phases for {} scatterers",
            phases.len(),
            target.len()
        )));
    }
    let k_s = derived.k_s;
    let mut g = Array2::<Complex64>::zeros((k_s, scenario.m_s).f());
    let bs = traj.bs_position;
    for m in 0..scenario.m_s {
        let positions = scatterer_positions(target, traj, m, scenario)?;
        let mut col = g.column_mut(m);
        let col = col.as_slice_mut().expect("column-major storage");
        for ((s, &p), &phi) in target.scatterers.iter().zip(&positions).zip(phases) {
            let range = exact_range(bs, p);
            let theta = azimuth(bs, p);
            if theta.abs() >= FRAC_PI_2 {
                continue;
            }
            let amp = channel_gain(range, s.rcs, derived, scenario.f_c)? * beam.gain(theta);
            let carrier = -4.0 * PI * scenario.f_c * range / SPEED_OF_LIGHT + phi;
            let base = amp * Complex64::from_polar(1.0, carrier);
            let slope = -4.0 * PI * scenario.delta_f * range / SPEED_OF_LIGHT;
            accumulate_ramp(col, base, slope);
        }
    }
    Ok(SensingMatrix { g })
}

/// `col[k] += base · exp(i k slope)`, by recurrence re-anchored every 256 bins.
fn accumulate_ramp(col: &mut [Complex64], base: Complex64, slope: f64) {
    let step = Complex64::from_polar(1.0, slope);
    for (block, chunk) in col.chunks_mut(256).enumerate() {
        let mut cur = base * Complex64::from_polar(1.0, slope * (block * 256) as f64);
        for v in chunk {
            *v += cur;
            cur *= step;
        }
    }
}

/// Forms `y = s·x + ñ` and divides by `x`. With unit-modulus symbols the
/// division leaves the noise variance at `σ²`.
pub fn receive<R: Rng + ?Sized>(
    echo: &SensingMatrix,
    grid: &SymbolGrid,
    sigma2: f64,
    noise: bool,
    rng: &mut R,
) -> Result<SensingMatrix> {
    if echo.g.dim() != grid.x.dim() {
        return Err(IvaError::Config("symbol grid and echo shapes differ".into()));
    }
    let sd = (sigma2 / 2.0).sqrt();
    let mut g = Array2::<Complex64>::zeros(echo.g.raw_dim().f());
    ndarray::Zip::from(&mut g).and(&echo.g).and(&grid.x).for_each(|out, &s, &x| {
        let mut y = s * x;
        if noise {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            y += Complex64::new(re * sd, im * sd);
        }
        *out = y / x;
    });
    Ok(SensingMatrix { g })
}

/// Full reception chain: scattering phases `φ_l ~ U(0, 2π)` are drawn
/// first, then the receiver noise.
pub fn sensing_matrix<R: Rng + ?Sized>(
    target: &ExtendedTarget,
    traj: &TrajectoryState,
    scenario: &ScenarioConfig,
    derived: &DerivedParams,
    beam: &CompositeBeam,
    grid: &SymbolGrid,
    rng: &mut R,
) -> Result<SensingMatrix> {
    let phases: Vec<f64> = (0..target.len()).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
    let echo = echo_matrix(target, traj, scenario, derived, beam, &phases)?;
    receive(&echo, grid, derived.sigma2, scenario.noise, rng)
}

const GS_MAGIC: &[u8; 4] = b"IVAG";

/// Binary dump: `"IVAG"`, u32 K_s, u32 M_s, u32 reserved (0), then
/// row-major interleaved little-endian f64 re/im.
pub fn write_sensing_matrix(path: &Path, gs: &SensingMatrix) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(GS_MAGIC)?;
    w.write_all(&(gs.k_s() as u32).to_le_bytes())?;
    w.write_all(&(gs.m_s() as u32).to_le_bytes())?;
    w.write_all(&0u32.to_le_bytes())?;
    for row in gs.g.rows() {
        for v in row {
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_sensing_matrix(path: &Path) -> Result<SensingMatrix> {
    let mut r = BufReader::new(File::open(path)?);
    let mut header = [0u8; 16];
    r.read_exact(&mut header)?;
    if &header[..4] != GS_MAGIC {
        return Err(IvaError::Data("bad G_s magic".into()));
    }
    let word = |i: usize| u32::from_le_bytes(header[i..i + 4].try_into().unwrap()) as usize;
    let (k_s, m_s) = (word(4), word(8));
    let mut g = Array2::<Complex64>::zeros((k_s, m_s).f());
    let mut buf = [0u8; 16];
    for k in 0..k_s {
        for m in 0..m_s {
            r.read_exact(&mut buf)?;
            let re = f64::from_le_bytes(buf[..8].try_into().unwrap());
            let im = f64::from_le_bytes(buf[8..].try_into().unwrap());
            g[[k, m]] = Complex64::new(re, im);
        }
    }
    Ok(SensingMatrix { g })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::fft;
    use crate::scenario::derive;
    use crate::target::{Scatterer, Vec3};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small_scenario() -> ScenarioConfig {
        ScenarioConfig { k: 128, rho_f: 0.5, m_s: 16, noise: false, beam: BeamModel::Ideal, ..Default::default() }
    }

    fn gain_db(b: &BeamWeights, deg: f64) -> f64 {
        20.0 * b.response(deg.to_radians()).norm().log10()
    }

    #[test]
    fn steering_vectors() {
        assert!(array_response(7, 0.0).iter().all(|v| (v - Complex64::new(1.0, 0.0)).norm() < 1e-15));
        let a = array_response(2, FRAC_PI_2);
        assert!((a[0] - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        assert!((a[1] - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        let (p, m) = (array_response(9, 0.3), array_response(9, -0.3));
        for (x, y) in p.iter().zip(&m) {
            assert!((x.conj() - y).norm() < 1e-12);
        }
    }

    #[test]
    fn wide_beam_shape() {
        let b = synthesize_wide_beam(10, 30.0, 0.0, 1.0).unwrap();
        let norm: f64 = b.weights.iter().map(|w| w.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);

        // ripple over the sector interior (transition band of one
        // aperture beamwidth excluded at each edge)
        let inner: Vec<f64> = (-100..=100).map(|i| gain_db(&b, i as f64 * 0.1)).collect();
        let hi = inner.iter().cloned().fold(f64::MIN, f64::max);
        let lo = inner.iter().cloned().fold(f64::MAX, f64::min);
        assert!(hi - lo <= 3.0, "ripple {} dB", hi - lo);

        // sidelobes beyond the transition band
        let side = (250..=890)
            .flat_map(|i| [i as f64 * 0.1, -(i as f64) * 0.1])
            .map(|d| gain_db(&b, d))
            .fold(f64::MIN, f64::max);
        assert!(side - hi <= -10.0, "sidelobe {} dB", side - hi);
    }

    #[test]
    fn single_element_is_omnidirectional() {
        let b = synthesize_wide_beam(1, 30.0, 0.0, 4.0).unwrap();
        assert_eq!(b.weights, vec![Complex64::new(2.0, 0.0)]);
        for d in [-80.0, -10.0, 0.0, 45.0] {
            assert!((b.response(f64::to_radians(d)).norm() - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetric_sector_gives_even_pattern() {
        let beam = CompositeBeam::Synthesized {
            tx: synthesize_wide_beam(10, 30.0, 0.0, 0.5).unwrap(),
            rx: synthesize_wide_beam(10, 30.0, 0.0, 1.0).unwrap(),
        };
        for i in 0..170 {
            let t = (i as f64 * 0.5).to_radians();
            assert!((beam.gain(t).norm() - beam.gain(-t).norm()).abs() < 1e-9);
        }
    }

    #[test]
    fn infeasible_beam() {
        assert!(matches!(synthesize_wide_beam(10, 5.0, 0.0, 1.0), Err(IvaError::Synthesis(_))));
        assert!(matches!(synthesize_wide_beam(10, 30.0, 80.0, 1.0), Err(IvaError::Synthesis(_))));
    }

    #[test]
    fn radar_equation() {
        let d = derive(&ScenarioConfig::default()).unwrap();
        let a = channel_gain(64.40, 1.0, &d, 6.7e9).unwrap();
        assert!((a - 2.42e-7).abs() < 0.01e-7, "{a}");
        let b = channel_gain(128.80, 1.0, &d, 6.7e9).unwrap();
        assert!((a / b - 4.0).abs() < 1e-12);
        let c = channel_gain(64.40, 4.0, &d, 6.7e9).unwrap();
        assert!((c / a - 2.0).abs() < 1e-12);
        assert!(channel_gain(0.0, 1.0, &d, 6.7e9).is_err());
    }

    #[test]
    fn qpsk_unit_modulus() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let grid = SymbolGrid::qpsk(64, 8, &mut rng);
        assert!(grid.x.iter().all(|v| (v.norm() - 1.0).abs() < 1e-15));
    }

    fn static_single() -> (ScenarioConfig, ExtendedTarget, TrajectoryState) {
        let sc = small_scenario();
        let t = ExtendedTarget::new(vec![Scatterer { local: Vec3::default(), rcs: 1.0 }]).unwrap();
        let tr = TrajectoryState { speed: 0.0, ..Default::default() };
        (sc, t, tr)
    }

    #[test]
    fn static_point_is_a_pure_ramp() {
        let (sc, t, tr) = static_single();
        let d = derive(&sc).unwrap();
        let beam = CompositeBeam::from_scenario(&sc, &d).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let grid = SymbolGrid::qpsk(d.k_s, sc.m_s, &mut rng);
        let gs = sensing_matrix(&t, &tr, &sc, &d, &beam, &grid, &mut rng).unwrap();
        let r = exact_range(tr.bs_position, tr.centre_at(0.0));
        let amp = channel_gain(r, 1.0, &d, sc.f_c).unwrap();
        let g00 = gs.g[[0, 0]];
        assert!((g00.norm() - amp).abs() < 1e-12 * amp.max(1.0));
        for m in 0..sc.m_s {
            for k in 0..d.k_s {
                let ramp = Complex64::from_polar(1.0, -4.0 * PI * k as f64 * sc.delta_f * r / SPEED_OF_LIGHT);
                assert!((gs.g[[k, m]] - g00 * ramp).norm() < 1e-9 * amp);
            }
        }
        // range-profile peak sits at 2R/c·K_sΔf (mod K_s), time-reversed
        let spec = fft(&gs.column(0), d.k_s).unwrap();
        let peak = (0..d.k_s).max_by(|&a, &b| spec[a].norm().total_cmp(&spec[b].norm())).unwrap();
        let bin = 2.0 * r / SPEED_OF_LIGHT * d.k_s as f64 * sc.delta_f;
        let expect = (d.k_s as f64 - bin).rem_euclid(d.k_s as f64).round() as usize % d.k_s;
        assert_eq!(peak, expect);
    }

    #[test]
    fn reciprocal_filter_preserves_noise_variance() {
        let (k_s, m_s) = (1000, 100);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let grid = SymbolGrid::qpsk(k_s, m_s, &mut rng);
        let echo = SensingMatrix { g: Array2::zeros((k_s, m_s).f()) };
        let sigma2 = 3.8e-16;
        let gs = receive(&echo, &grid, sigma2, true, &mut rng).unwrap();
        let var = gs.g.iter().map(|v| v.norm_sqr()).sum::<f64>() / (k_s * m_s) as f64;
        assert!((var / sigma2 - 1.0).abs() < 0.05, "ratio {}", var / sigma2);
    }

    #[test]
    fn linear_in_scatterers() {
        let sc = ScenarioConfig { beam: BeamModel::Synthesized, ..small_scenario() };
        let d = derive(&sc).unwrap();
        let beam = CompositeBeam::from_scenario(&sc, &d).unwrap();
        let tr = TrajectoryState { heading_deg: 300.0, ..Default::default() };
        let a = Scatterer { local: Vec3::new(2.5, 0.0, 0.0), rcs: 1.0 };
        let b = Scatterer { local: Vec3::new(0.0, -1.0, 0.0), rcs: 2.0 };
        let both = ExtendedTarget::new(vec![a, b]).unwrap();
        let ga = echo_matrix(&ExtendedTarget::new(vec![a]).unwrap(), &tr, &sc, &d, &beam, &[0.3]).unwrap();
        let gb = echo_matrix(&ExtendedTarget::new(vec![b]).unwrap(), &tr, &sc, &d, &beam, &[1.7]).unwrap();
        let gab = echo_matrix(&both, &tr, &sc, &d, &beam, &[0.3, 1.7]).unwrap();
        let scale = gab.g.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for ((x, y), z) in ga.g.iter().zip(gb.g.iter()).zip(gab.g.iter()) {
            assert!((x + y - z).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn transmit_power_scaling() {
        let sc = ScenarioConfig { beam: BeamModel::Synthesized, ..small_scenario() };
        let sc2 = ScenarioConfig { p_t_dbm: sc.p_t_dbm + 10.0 * 2f64.log10(), ..sc.clone() };
        let (d, d2) = (derive(&sc).unwrap(), derive(&sc2).unwrap());
        let (b, b2) = (CompositeBeam::from_scenario(&sc, &d).unwrap(), CompositeBeam::from_scenario(&sc2, &d2).unwrap());
        if let (CompositeBeam::Synthesized { tx, .. }, CompositeBeam::Synthesized { tx: tx2, .. }) = (&b, &b2) {
            let n1: f64 = tx.weights.iter().map(|w| w.norm_sqr()).sum();
            let n2: f64 = tx2.weights.iter().map(|w| w.norm_sqr()).sum();
            assert!((n2 / n1 - 2.0).abs() < 1e-9);
        } else {
            unreachable!();
        }
        let t = ExtendedTarget::vehicle();
        let tr = TrajectoryState::default();
        let phases = [0.1, 0.2, 0.3, 0.4, 0.5];
        let g1 = echo_matrix(&t, &tr, &sc, &d, &b, &phases).unwrap();
        let g2 = echo_matrix(&t, &tr, &sc2, &d2, &b2, &phases).unwrap();
        for (x, y) in g1.g.iter().zip(g2.g.iter()) {
            assert!((y - x * 2f64.sqrt()).norm() <= 1e-9 * x.norm().max(1e-20));
        }
    }

    #[test]
    fn dump_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut g = Array2::<Complex64>::zeros((5, 3).f());
        g.iter_mut().for_each(|v| *v = Complex64::new(rng.gen(), rng.gen()));
        let gs = SensingMatrix { g };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("gs.bin");
        write_sensing_matrix(&path, &gs).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(&bytes[..4], b"IVAG");
        assert_eq!(bytes.len(), 16 + 5 * 3 * 16);
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 5);
        // row-major: second value is (k=0, m=1)
        let re = f64::from_le_bytes(bytes[32..40].try_into().unwrap());
        assert_eq!(re, gs.g[[0, 1]].re);
        assert_eq!(read_sensing_matrix(&path).unwrap(), gs);
    }
}
