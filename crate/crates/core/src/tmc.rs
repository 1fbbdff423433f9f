//! Translational motion compensation.
//!
//! Range alignment cross-correlates envelope range profiles against the
//! reference symbol `M_s/2 − 1`, regularizes the integer shifts with an
//! unwrap plus quadratic least-squares fit, and removes the fitted delay
//! with a phase ramp across subcarriers. Phase adjustment then estimates the
//! common phase error from the minimum-variance reference cells and strips
//! it from every range cell.

use std::f64::consts::PI;

use ndarray::{Array2, ShapeBuilder};
use num_complex::Complex64;

use crate::error::{IvaError, Result};
use crate::frontend::SensingMatrix;
use crate::numerics::{fft_in_place, ifft_in_place, quadratic_ls_fit, unwrap_phase, wrap_phase, Quadratic};
use crate::scenario::SPEED_OF_LIGHT;
use crate::target::reference_index;

#[derive(Debug, Clone)]
pub struct AlignmentResult {
    /// Delay-compensated grid Γ, `K_s × M_s`.
    pub gamma: SensingMatrix,
    /// Integer shifts in `[−K_s/2, K_s/2 − 1]`, range cells.
    pub raw_shifts: Vec<i64>,
    /// Unwrapped shifts before the fit.
    pub unwrapped_shifts: Vec<f64>,
    pub regularized_shifts: Vec<f64>,
    pub fitted: Quadratic,
    /// Seconds.
    pub delays: Vec<f64>,
    /// RMS of `unwrapped − regularized`, range cells.
    pub fit_residual_rms: f64,
}

/// Envelope cross-correlation shift of every symbol relative to the
/// reference symbol. Positive shifts mean the echo arrived later.
pub fn estimate_shifts(gs: &SensingMatrix) -> Result<Vec<i64>> {
    let (k_s, m_s) = gs.g.dim();
    if m_s < 2 {
        return Err(IvaError::InsufficientData { needed: 2, got: m_s });
    }
    let envelope_spectrum = |m: usize| -> Result<Vec<Complex64>> {
        let mut col = gs.column(m);
        fft_in_place(&mut col);
        if col.iter().all(|v| v.norm_sqr() == 0.0) {
            return Err(IvaError::UndefinedCorrelation(m));
        }
        let mut env: Vec<Complex64> = col.iter().map(|v| Complex64::new(v.norm(), 0.0)).collect();
        ifft_in_place(&mut env);
        Ok(env)
    };
    let reference: Vec<Complex64> = envelope_spectrum(reference_index(m_s))?
        .iter()
        .map(|v| v.conj())
        .collect();

    let half = (k_s / 2) as i64;
    let signed = |j: usize| -> i64 {
        let j = j as i64;
        if j >= k_s as i64 - half {
            j - k_s as i64
        } else {
            j
        }
    };

    (0..m_s)
        .map(|m| {
            let mut corr: Vec<Complex64> = envelope_spectrum(m)?
                .iter()
                .zip(&reference)
                .map(|(a, b)| a * b)
                .collect();
            ifft_in_place(&mut corr);
            // smallest |shift| wins ties
            let mut best = (f64::NEG_INFINITY, 0i64);
            for (j, v) in corr.iter().enumerate() {
                let q = signed(j);
                if v.re > best.0 || (v.re == best.0 && q.abs() < best.1.abs()) {
                    best = (v.re, q);
                }
            }
            Ok(best.1)
        })
        .collect()
}

/// Unwraps the shifts as phases `2πq/K_s`, then fits a quadratic over
/// `j = 1..M_s` and evaluates it at `m_s + 1`.
pub fn regularize_shifts(raw: &[i64], k_s: usize) -> Result<(Vec<f64>, Vec<f64>, Quadratic)> {
    if raw.len() < 3 {
        return Err(IvaError::InsufficientData { needed: 3, got: raw.len() });
    }
    let to_phase = 2.0 * PI / k_s as f64;
    let phases: Vec<f64> = raw.iter().map(|&q| q as f64 * to_phase).collect();
    let unwrapped: Vec<f64> = unwrap_phase(&phases)?.iter().map(|p| p / to_phase).collect();
    let fit = quadratic_ls_fit(&unwrapped)?;
    let regularized = (0..raw.len()).map(|m| fit.eval((m + 1) as f64)).collect();
    Ok((unwrapped, regularized, fit))
}

/// `Γ[k, m] = g[k, m]·exp(i2πkΔf τ_m)`.
pub fn compensate_delays(gs: &SensingMatrix, delays: &[f64], delta_f: f64) -> Result<SensingMatrix> {
    if delays.len() != gs.m_s() {
        return Err(IvaError::Config(format!("{} delays for {} symbols", delays.len(), gs.m_s())));
    }
    if delays.iter().any(|d| !d.is_finite()) {
        return Err(IvaError::Data("non-finite delay".into()));
    }
    let mut gamma = gs.g.clone();
    for (mut col, &tau) in gamma.columns_mut().into_iter().zip(delays) {
        let slope = 2.0 * PI * delta_f * tau;
        for (k, v) in col.iter_mut().enumerate() {
            *v *= Complex64::from_polar(1.0, slope * k as f64);
        }
    }
    Ok(SensingMatrix { g: gamma })
}

pub fn align_ranges(gs: &SensingMatrix, delta_f: f64) -> Result<AlignmentResult> {
    let k_s = gs.k_s();
    let raw_shifts = estimate_shifts(gs)?;
    let (unwrapped_shifts, regularized_shifts, fitted) = regularize_shifts(&raw_shifts, k_s)?;
    let delta_tau = 1.0 / (k_s as f64 * delta_f);
    let delays: Vec<f64> = regularized_shifts.iter().map(|q| q * delta_tau).collect();
    let gamma = compensate_delays(gs, &delays, delta_f)?;
    let fit_residual_rms = (unwrapped_shifts
        .iter()
        .zip(&regularized_shifts)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        / raw_shifts.len() as f64)
        .sqrt();
    Ok(AlignmentResult {
        gamma,
        raw_shifts,
        unwrapped_shifts,
        regularized_shifts,
        fitted,
        delays,
        fit_residual_rms,
    })
}

/// Aligned range profiles, `K_p × M_s`, bin `n` at range `n·bin_m`.
#[derive(Debug, Clone)]
pub struct RangeProfileSet {
    pub s: Array2<Complex64>,
    pub bin_m: f64,
    pub phase_corrected: bool,
    pub cpe: Option<Vec<f64>>,
}

impl RangeProfileSet {
    pub fn k_p(&self) -> usize {
        self.s.nrows()
    }

    pub fn m_s(&self) -> usize {
        self.s.ncols()
    }

    pub fn range_axis(&self) -> Vec<f64> {
        (0..self.k_p()).map(|n| n as f64 * self.bin_m).collect()
    }
}

/// Column-wise `K_p`-point FFT of Γ, reindexed as `Y[n] = X[(−n) mod K_p]`
/// (one-bin rotation plus left-right flip) so that bin 0 is zero delay and
/// range increases with the bin index.
pub fn range_profiles(gamma: &SensingMatrix, k_p: usize, delta_f: f64) -> Result<RangeProfileSet> {
    let k_s = gamma.k_s();
    if !k_p.is_power_of_two() || k_p < k_s {
        return Err(IvaError::Config(format!("K_p = {k_p} must be a power of two >= K_s = {k_s}")));
    }
    let mut s = Array2::<Complex64>::zeros((k_p, gamma.m_s()).f());
    let mut buf = vec![Complex64::new(0.0, 0.0); k_p];
    for (src, mut dst) in gamma.g.columns().into_iter().zip(s.columns_mut()) {
        buf.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for (b, v) in buf.iter_mut().zip(src.iter()) {
            *b = *v;
        }
        fft_in_place(&mut buf);
        for (n, d) in dst.iter_mut().enumerate() {
            *d = buf[(k_p - n) % k_p];
        }
    }
    Ok(RangeProfileSet {
        s,
        bin_m: SPEED_OF_LIGHT / (2.0 * k_p as f64 * delta_f),
        phase_corrected: false,
        cpe: None,
    })
}

/// Minimum-variance reference cells, most stable first.
///
/// Candidates must have a mean envelope of at least `gate` times the
/// strongest cell's mean; among them the `n_ref` cells with the smallest
/// variance of the mean-normalized envelope are returned.
pub fn select_reference_cells(profiles: &RangeProfileSet, n_ref: usize, gate: f64) -> Result<Vec<usize>> {
    if n_ref == 0 {
        return Err(IvaError::Selection("n_ref must be at least 1".into()));
    }
    let m_s = profiles.m_s() as f64;
    let stats: Vec<(f64, f64)> = profiles
        .s
        .rows()
        .into_iter()
        .map(|row| {
            let mean = row.iter().map(|v| v.norm()).sum::<f64>() / m_s;
            if mean == 0.0 {
                return (0.0, f64::INFINITY);
            }
            let var = row.iter().map(|v| (v.norm() / mean - 1.0).powi(2)).sum::<f64>() / m_s;
            (mean, var)
        })
        .collect();
    let peak = stats.iter().map(|s| s.0).fold(0.0, f64::max);
    if peak == 0.0 {
        return Err(IvaError::Selection("all range cells are empty".into()));
    }
    let mut candidates: Vec<usize> = (0..stats.len()).filter(|&n| stats[n].0 >= gate * peak).collect();
    if candidates.len() < n_ref {
        return Err(IvaError::Selection(format!(
            "only {} cells pass the energy gate, {n_ref} requested",
            candidates.len()
        )));
    }
    candidates.sort_by(|&a, &b| stats[a].1.total_cmp(&stats[b].1).then(a.cmp(&b)));
    candidates.truncate(n_ref);
    Ok(candidates)
}

/// Common-phase-error estimate: mean over the reference cells of the
/// unwrapped phase history relative to the first cell, plus the first
/// cell's own unwrapped phase history.
pub fn estimate_cpe(profiles: &RangeProfileSet, cells: &[usize]) -> Result<Vec<f64>> {
    let (&r0, _) = cells
        .split_first()
        .ok_or_else(|| IvaError::Selection("no reference cells".into()))?;
    let m_s = profiles.m_s();
    for &r in cells {
        if r >= profiles.k_p() {
            return Err(IvaError::IndexOutOfRange { index: r, len: profiles.k_p() });
        }
        if let Some(m) = (0..m_s).find(|&m| profiles.s[[r, m]].norm_sqr() == 0.0) {
            return Err(IvaError::PhaseUndefined { cell: r, symbol: m });
        }
    }
    let base: Vec<f64> = (0..m_s).map(|m| profiles.s[[r0, m]].arg()).collect();
    let mut acc = vec![0.0; m_s];
    for &r in cells {
        let diff: Vec<f64> = (0..m_s)
            .map(|m| wrap_phase(profiles.s[[r, m]].arg() - base[m]))
            .collect();
        for (a, d) in acc.iter_mut().zip(unwrap_phase(&diff)?) {
            *a += d;
        }
    }
    let base = unwrap_phase(&base)?;
    let n = cells.len() as f64;
    Ok(acc.iter().zip(&base).map(|(a, b)| a / n + b).collect())
}

/// `s̃[n, m] = s[n, m]·exp(−i φ̂_CPE(m))`.
pub fn apply_phase_correction(profiles: &RangeProfileSet, cpe: &[f64]) -> Result<RangeProfileSet> {
    if cpe.len() != profiles.m_s() {
        return Err(IvaError::Config(format!("{} CPE samples for {} symbols", cpe.len(), profiles.m_s())));
    }
    let mut s = profiles.s.clone();
    for (mut col, &phi) in s.columns_mut().into_iter().zip(cpe) {
        let rot = Complex64::from_polar(1.0, -phi);
        col.iter_mut().for_each(|v| *v *= rot);
    }
    Ok(RangeProfileSet {
        s,
        bin_m: profiles.bin_m,
        phase_corrected: true,
        cpe: Some(cpe.to_vec()),
    })
}

#[derive(Debug, Clone)]
pub struct TmcOutput {
    pub alignment: AlignmentResult,
    pub reference_cells: Vec<usize>,
    pub profiles: RangeProfileSet,
}

/// Range alignment, range profile formation and phase adjustment.
pub fn motion_compensate(
    gs: &SensingMatrix,
    k_p: usize,
    delta_f: f64,
    n_ref: usize,
    cell_gate: f64,
) -> Result<TmcOutput> {
    let alignment = align_ranges(gs, delta_f)?;
    let aligned = range_profiles(&alignment.gamma, k_p, delta_f)?;
    let reference_cells = select_reference_cells(&aligned, n_ref, cell_gate)?;
    let cpe = estimate_cpe(&aligned, &reference_cells)?;
    let profiles = apply_phase_correction(&aligned, &cpe)?;
    Ok(TmcOutput { alignment, reference_cells, profiles })
}

/// Debug CSV of the per-symbol TMC quantities.
pub fn tmc_csv(out: &TmcOutput) -> String {
    let mut s = String::from("m_s,q,q_bar,q_tilde,tau_s,phi_cpe\n");
    let a = &out.alignment;
    let cpe = out.profiles.cpe.as_deref().unwrap_or(&[]);
    for m in 0..a.raw_shifts.len() {
        s.push_str(&format!(
            "{m},{},{},{},{:e},{}\n",
            a.raw_shifts[m],
            a.unwrapped_shifts[m],
            a.regularized_shifts[m],
            a.delays[m],
            cpe.get(m).copied().unwrap_or(f64::NAN)
        ));
    }
    s
}
