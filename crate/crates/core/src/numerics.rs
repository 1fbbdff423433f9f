//! Shared numerical primitives: discrete Fourier transforms, phase
//! unwrapping and the quadratic least-squares fit used to regularize range
//! drift.
//!
//! Transforms follow the usual engineering convention
//! `X[j] = Σ_i x[i]·exp(−i2πij/n)`; inverses carry the `1/n` factor.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::error::{IvaError, Result};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft(n, direction))
}

/// Smallest power of two greater than or equal to `n` (and at least 1).
pub fn next_pow2(n: usize) -> usize {
    n.max(1).next_power_of_two()
}

fn check_finite(x: &[Complex64]) -> Result<()> {
    match x.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
        Some(i) => Err(IvaError::Data(format!("non-finite sample at index {i}"))),
        None => Ok(()),
    }
}

fn padded(x: &[Complex64], n: usize) -> Result<Vec<Complex64>> {
    if !n.is_power_of_two() {
        return Err(IvaError::Config(format!(
            "transform size {n} is not a power of two"
        )));
    }
    if x.len() > n {
        return Err(IvaError::Config(format!(
            "input length {} exceeds transform size {n}",
            x.len()
        )));
    }
    check_finite(x)?;
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    buf[..x.len()].copy_from_slice(x);
    Ok(buf)
}

/// `n`-point forward FFT of `x`, zero-padded to `n`. `n` must be a power of two.
pub fn fft(x: &[Complex64], n: usize) -> Result<Vec<Complex64>> {
    let mut buf = padded(x, n)?;
    fft_in_place(&mut buf);
    Ok(buf)
}

/// `n`-point inverse FFT (scaled by `1/n`). `n` must be a power of two.
pub fn ifft(x: &[Complex64], n: usize) -> Result<Vec<Complex64>> {
    let mut buf = padded(x, n)?;
    ifft_in_place(&mut buf);
    Ok(buf)
}

/// Unnormalized forward DFT of any length, in place.
pub fn fft_in_place(buf: &mut [Complex64]) {
    if buf.len() > 1 {
        plan(buf.len(), FftDirection::Forward).process(buf);
    }
}

/// Inverse DFT of any length, in place, scaled by `1/len`.
pub fn ifft_in_place(buf: &mut [Complex64]) {
    let n = buf.len();
    if n > 1 {
        plan(n, FftDirection::Inverse).process(buf);
    }
    let scale = 1.0 / n.max(1) as f64;
    buf.iter_mut().for_each(|v| *v *= scale);
}

/// Wraps an angle into `(−π, π]`.
pub fn wrap_phase(phi: f64) -> f64 {
    let mut w = phi.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    w
}

/// One-dimensional phase unwrapping.
///
/// Each adjacent difference is wrapped into `(−π, π]` and accumulated, so
/// the output starts at `phi[0]` and differs from the input by integer
/// multiples of 2π.
pub fn unwrap_phase(phi: &[f64]) -> Result<Vec<f64>> {
    if let Some(i) = phi.iter().position(|v| !v.is_finite()) {
        return Err(IvaError::Data(format!("non-finite phase at index {i}")));
    }
    let mut out = Vec::with_capacity(phi.len());
    let mut iter = phi.iter();
    if let Some(&first) = iter.next() {
        out.push(first);
        let mut prev_in = first;
        let mut prev_out = first;
        for &p in iter {
            prev_out += wrap_phase(p - prev_in);
            prev_in = p;
            out.push(prev_out);
        }
    }
    Ok(out)
}

/// Quadratic `a0 + a1·j + a2·j²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadratic {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
}

impl Quadratic {
    pub fn eval(&self, j: f64) -> f64 {
        self.a0 + j * (self.a1 + j * self.a2)
    }
}

/// Least-squares quadratic through `samples[j-1]` at abscissae `j = 1..=M`.
///
/// The normal equations are solved in a centred, scaled basis and mapped
/// back to the raw index, which keeps the 3×3 system well conditioned for
/// M in the hundreds.
pub fn quadratic_ls_fit(samples: &[f64]) -> Result<Quadratic> {
    let m = samples.len();
    if m < 3 {
        return Err(IvaError::InsufficientData { needed: 3, got: m });
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(IvaError::Data("non-finite sample in quadratic fit".into()));
    }
    let centre = (m as f64 + 1.0) / 2.0;
    let scale = ((m as f64 - 1.0) / 2.0).max(1.0);

    let mut ata = [[0.0f64; 3]; 3];
    let mut atb = [0.0f64; 3];
    for (i, &y) in samples.iter().enumerate() {
        let t = ((i + 1) as f64 - centre) / scale;
        let basis = [1.0, t, t * t];
        for r in 0..3 {
            atb[r] += basis[r] * y;
            for c in 0..3 {
                ata[r][c] += basis[r] * basis[c];
            }
        }
    }
    let [b0, b1, b2] = solve3(ata, atb)?;

    // b0 + b1 (j-c)/s + b2 (j-c)²/s²
    let s2 = scale * scale;
    Ok(Quadratic {
        a0: b0 - b1 * centre / scale + b2 * centre * centre / s2,
        a1: b1 / scale - 2.0 * b2 * centre / s2,
        a2: b2 / s2,
    })
}

/// Gaussian elimination with partial pivoting on a 3×3 system.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Result<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap_or(col);
        if a[pivot][col].abs() < 1e-300 {
            return Err(IvaError::Data("singular normal equations".into()));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Direct O(n²) DFT, independent of the FFT path.
    fn brute_dft(x: &[Complex64], n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|j| {
                x.iter()
                    .enumerate()
                    .map(|(i, &v)| {
                        let ang = -2.0 * PI * (i * j % n) as f64 / n as f64;
                        v * Complex64::from_polar(1.0, ang)
                    })
                    .sum()
            })
            .collect()
    }

    fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect()
    }

    #[test]
    fn impulse_and_dc() {
        let x = fft(&[c(1.0, 0.0)], 4).unwrap();
        assert!(x.iter().all(|v| (v - c(1.0, 0.0)).norm() < 1e-15));
        let x = fft(&[c(1.0, 0.0); 4], 4).unwrap();
        assert!((x[0] - c(4.0, 0.0)).norm() < 1e-15);
        assert!(x[1..].iter().all(|v| v.norm() < 1e-15));
    }

    #[test]
    fn matches_brute_force_dft() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x = random_vec(&mut rng, 16);
        let fast = fft(&x, 16).unwrap();
        let slow = brute_dft(&x, 16);
        let err: f64 = fast.iter().zip(&slow).map(|(a, b)| (a - b).norm_sqr()).sum();
        let norm: f64 = slow.iter().map(|v| v.norm_sqr()).sum();
        assert!((err / norm).sqrt() < 1e-10);
    }

    #[test]
    fn arbitrary_length_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [3usize, 12, 100, 330] {
            let x = random_vec(&mut rng, n);
            let mut fast = x.clone();
            fft_in_place(&mut fast);
            let slow = brute_dft(&x, n);
            let err = fast.iter().zip(&slow).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(err < 1e-9 * n as f64, "n={n} err={err}");
            ifft_in_place(&mut fast);
            let back = fast.iter().zip(&x).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(back < 1e-12);
        }
    }

    #[test]
    fn zero_padding() {
        let x = fft(&[c(1.0, 0.0), c(1.0, 0.0)], 8).unwrap();
        let slow = brute_dft(&[c(1.0, 0.0), c(1.0, 0.0)], 8);
        for (a, b) in x.iter().zip(&slow) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_sizes_and_data() {
        assert!(matches!(fft(&[c(1.0, 0.0)], 12), Err(IvaError::Config(_))));
        assert!(matches!(fft(&[c(0.0, 0.0); 5], 4), Err(IvaError::Config(_))));
        assert!(matches!(fft(&[c(f64::NAN, 0.0)], 4), Err(IvaError::Data(_))));
    }

    #[test]
    fn round_trip_large() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = random_vec(&mut rng, 32768);
        let back = ifft(&fft(&x, 32768).unwrap(), 32768).unwrap();
        let err = back.iter().zip(&x).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10);
    }

    proptest! {
        #[test]
        fn round_trip_and_parseval(seed in any::<u64>(), log_n in 0u32..12) {
            let n = 1usize << log_n;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = random_vec(&mut rng, n);
            let spec = fft(&x, n).unwrap();
            let back = ifft(&spec, n).unwrap();
            let err = back.iter().zip(&x).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            prop_assert!(err < 1e-10);
            let e_time: f64 = x.iter().map(|v| v.norm_sqr()).sum();
            let e_freq: f64 = spec.iter().map(|v| v.norm_sqr()).sum::<f64>() / n as f64;
            prop_assert!((e_time - e_freq).abs() <= 1e-9 * e_time.max(1e-300));
        }

        #[test]
        fn unwrap_contract(phi in prop::collection::vec(-20.0f64..20.0, 1..64)) {
            let out = unwrap_phase(&phi).unwrap();
            prop_assert_eq!(out[0], phi[0]);
            for w in out.windows(2) {
                let d = w[1] - w[0];
                prop_assert!(d > -PI - 1e-12 && d <= PI + 1e-12);
            }
            for (o, i) in out.iter().zip(&phi) {
                let k = (o - i) / (2.0 * PI);
                prop_assert!((k - k.round()).abs() < 1e-9);
            }
        }

        #[test]
        fn unwrap_ignores_suffix_cycle(phi in prop::collection::vec(-4.0f64..4.0, 2..40), cut in 1usize..40) {
            let cut = cut.min(phi.len() - 1);
            let mut shifted = phi.clone();
            shifted[cut..].iter_mut().for_each(|v| *v += 2.0 * PI);
            let a = unwrap_phase(&phi).unwrap();
            let b = unwrap_phase(&shifted).unwrap();
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() < 1e-9);
            }
        }

        #[test]
        fn fit_residual_orthogonal(ys in prop::collection::vec(-100.0f64..100.0, 3..240)) {
            let q = quadratic_ls_fit(&ys).unwrap();
            let mut dots = [0.0f64; 3];
            let mut scale = [0.0f64; 3];
            for (i, y) in ys.iter().enumerate() {
                let j = (i + 1) as f64;
                let r = y - q.eval(j);
                for (p, (d, s)) in dots.iter_mut().zip(scale.iter_mut()).enumerate() {
                    let b = j.powi(p as i32);
                    *d += r * b;
                    *s += (y.abs() + 1.0) * b;
                }
            }
            for p in 0..3 {
                prop_assert!(dots[p].abs() <= 1e-8 * scale[p], "p={} dot={}", p, dots[p]);
            }
        }
    }

    #[test]
    fn unwrap_examples() {
        assert_eq!(unwrap_phase(&[0.0, 0.1, 0.2]).unwrap(), vec![0.0, 0.1, 0.2]);
        let out = unwrap_phase(&[0.0, 3.0, -3.0]).unwrap();
        assert!((out[2] - (-3.0 + 2.0 * PI)).abs() < 1e-12);
        assert!((out[2] - 3.2832).abs() < 1e-4);
        let out = unwrap_phase(&[3.1, -3.1, 3.1]).unwrap();
        assert!((out[1] - 3.1832).abs() < 1e-4);
        assert!((out[2] - 3.1).abs() < 1e-12);
        assert!(unwrap_phase(&[0.0, f64::INFINITY]).is_err());
        assert!(unwrap_phase(&[]).unwrap().is_empty());
    }

    #[test]
    fn fit_exact_data() {
        let lin: Vec<f64> = (1..=10).map(|j| 2.0 + 0.5 * j as f64).collect();
        let q = quadratic_ls_fit(&lin).unwrap();
        assert!((q.a0 - 2.0).abs() < 1e-9 && (q.a1 - 0.5).abs() < 1e-9 && q.a2.abs() < 1e-9);

        let quad: Vec<f64> = (1..=50)
            .map(|j| {
                let j = j as f64;
                1.0 - 0.1 * j + 0.02 * j * j
            })
            .collect();
        let q = quadratic_ls_fit(&quad).unwrap();
        assert!((q.a0 - 1.0).abs() < 1e-9);
        assert!((q.a1 + 0.1).abs() < 1e-9);
        assert!((q.a2 - 0.02).abs() < 1e-9);
    }

    #[test]
    fn fit_needs_three_samples() {
        assert!(matches!(
            quadratic_ls_fit(&[1.0, 2.0]),
            Err(IvaError::InsufficientData { needed: 3, got: 2 })
        ));
    }

    /// Raw-index normal equations solved by Cramer's rule.
    fn cramer_fit(ys: &[f64]) -> [f64; 3] {
        let mut s = [0.0f64; 5];
        let mut t = [0.0f64; 3];
        for (i, y) in ys.iter().enumerate() {
            let j = (i + 1) as f64;
            for (p, v) in s.iter_mut().enumerate() {
                *v += j.powi(p as i32);
            }
            for (p, v) in t.iter_mut().enumerate() {
                *v += y * j.powi(p as i32);
            }
        }
        let m = [[s[0], s[1], s[2]], [s[1], s[2], s[3]], [s[2], s[3], s[4]]];
        let det = |m: [[f64; 3]; 3]| {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        };
        let d = det(m);
        let mut out = [0.0; 3];
        for (col, o) in out.iter_mut().enumerate() {
            let mut mc = m;
            for row in 0..3 {
                mc[row][col] = t[row];
            }
            *o = det(mc) / d;
        }
        out
    }

    #[test]
    fn fit_noisy_matches_normal_equations() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ys: Vec<f64> = (1..=220)
            .map(|j| {
                let j = j as f64;
                3.0 + 0.2 * j - 0.001 * j * j + rng.gen_range(-0.5..0.5)
            })
            .collect();
        let q = quadratic_ls_fit(&ys).unwrap();
        let oracle = cramer_fit(&ys);
        assert!((q.a0 - oracle[0]).abs() < 1e-8);
        assert!((q.a1 - oracle[1]).abs() < 1e-8);
        assert!((q.a2 - oracle[2]).abs() < 1e-8);
    }
}
