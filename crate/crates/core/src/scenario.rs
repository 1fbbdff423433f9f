//! Waveform numerology, sensing allocation, and the quantities derived from
//! them.

use crate::error::{IvaError, Result};
use crate::numerics::next_pow2;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const BOLTZMANN: f64 = 1.38e-23;

/// Total OFDM symbol duration (CP included) of the default numerology.
pub const DEFAULT_SYMBOL_DURATION: f64 = 35.7e-6;

/// How the composite transmit/receive gain Υ(θ) is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BeamModel {
    /// Least-squares sector fit on the ULAs.
    Synthesized,
    /// Exact indicator: 1 inside the sensing sector, 0 outside.
    Ideal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub f_c: f64,
    pub delta_f: f64,
    /// Active subcarriers.
    pub k: usize,
    /// OFDM symbols per frame.
    pub m: usize,
    pub t_g: f64,
    pub t_f: f64,
    pub rho_f: f64,
    pub t_sri: f64,
    pub m_s: usize,
    pub p_t_dbm: f64,
    pub noise_figure_db: f64,
    pub t0: f64,
    pub n_t: usize,
    pub n_r: usize,
    pub beamwidth_t_deg: f64,
    pub beamwidth_r_deg: f64,
    pub theta_s_deg: f64,
    pub g_t_dbi: f64,
    pub g_r_dbi: f64,
    pub epsilon: f64,
    pub n_ref: usize,
    pub seed: u64,
    pub noise: bool,
    pub beam: BeamModel,
    /// Minimum mean envelope, relative to the strongest cell, for a range
    /// cell to be a phase-reference candidate.
    pub cell_gate: f64,
    pub crop_half_range: f64,
    pub crop_half_crossrange: f64,
    /// Half-extent (m) of the range rows around the true centroid for which
    /// the Doppler image is formed.
    pub image_gate: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        let delta_f = 30e3;
        ScenarioConfig {
            f_c: 6.7e9,
            delta_f,
            k: 13200,
            m: 280,
            t_g: DEFAULT_SYMBOL_DURATION - 1.0 / delta_f,
            t_f: 10e-3,
            rho_f: 1.0,
            t_sri: 1e-3,
            m_s: 220,
            p_t_dbm: 30.0,
            noise_figure_db: 5.0,
            t0: 290.0,
            n_t: 10,
            n_r: 10,
            beamwidth_t_deg: 30.0,
            beamwidth_r_deg: 30.0,
            theta_s_deg: 0.0,
            g_t_dbi: 0.0,
            g_r_dbi: 0.0,
            epsilon: 0.3,
            n_ref: 3,
            seed: 1,
            noise: true,
            beam: BeamModel::Synthesized,
            cell_gate: 0.1,
            crop_half_range: 6.0,
            crop_half_crossrange: 4.0,
            image_gate: 20.0,
        }
    }
}

impl ScenarioConfig {
    pub fn symbol_duration(&self) -> f64 {
        1.0 / self.delta_f + self.t_g
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(IvaError::field(name, format!("must be positive and finite, got {v}")))
            }
        };
        positive("f_c", self.f_c)?;
        positive("delta_f", self.delta_f)?;
        positive("T_f", self.t_f)?;
        positive("T_SRI", self.t_sri)?;
        positive("T0", self.t0)?;
        if self.k == 0 {
            return Err(IvaError::field("K", "must be at least 1"));
        }
        if self.m == 0 {
            return Err(IvaError::field("M", "must be at least 1"));
        }
        if !(self.t_g.is_finite() && self.t_g >= 0.0) {
            return Err(IvaError::field("T_g", "must be non-negative"));
        }
        if !(self.rho_f > 0.0 && self.rho_f <= 1.0) {
            return Err(IvaError::field("rho_f", format!("must lie in (0, 1], got {}", self.rho_f)));
        }
        if self.m_s < 4 || !self.m_s.is_multiple_of(2) {
            return Err(IvaError::field("M_s", format!("must be even and >= 4, got {}", self.m_s)));
        }
        if self.t_sri < self.symbol_duration() {
            return Err(IvaError::field("T_SRI", "shorter than one OFDM symbol"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(IvaError::field("epsilon", format!("must lie in (0, 1), got {}", self.epsilon)));
        }
        if self.n_ref == 0 {
            return Err(IvaError::field("n_ref", "must be at least 1"));
        }
        if self.n_t == 0 || self.n_r == 0 {
            return Err(IvaError::field("N_T", "array sizes must be at least 1"));
        }
        positive("beamwidth_T_deg", self.beamwidth_t_deg)?;
        positive("beamwidth_R_deg", self.beamwidth_r_deg)?;
        if !(self.cell_gate >= 0.0 && self.cell_gate < 1.0) {
            return Err(IvaError::field("cell_gate", "must lie in [0, 1)"));
        }
        positive("crop_half_range", self.crop_half_range)?;
        positive("crop_half_crossrange", self.crop_half_crossrange)?;
        positive("image_gate", self.image_gate)?;
        for (name, v) in [
            ("P_T_dBm", self.p_t_dbm),
            ("noise_figure_dB", self.noise_figure_db),
            ("theta_s_deg", self.theta_s_deg),
            ("G_T_dBi", self.g_t_dbi),
            ("G_R_dBi", self.g_r_dbi),
        ] {
            if !v.is_finite() {
                return Err(IvaError::field(name, "must be finite"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DerivedParams {
    pub lambda: f64,
    pub t_s: f64,
    pub k_s: usize,
    pub b_s: f64,
    /// Whole OFDM symbols per sensing repetition interval.
    pub n_s: usize,
    pub rho_t: f64,
    pub t_cpi: f64,
    pub delta_r: f64,
    pub delta_tau: f64,
    pub delta_fd: f64,
    pub k_p: usize,
    pub m_p: usize,
    /// Transmit power per subcarrier, W.
    pub p_avg: f64,
    pub sigma2: f64,
    /// Range spacing of the zero-padded profile bins.
    pub range_bin_m: f64,
    pub g_t: f64,
    pub g_r: f64,
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn derive(config: &ScenarioConfig) -> Result<DerivedParams> {
    config.validate()?;
    let t_s = config.symbol_duration();
    let n_s = (config.t_sri / t_s).round() as usize;
    if n_s < 1 {
        return Err(IvaError::InvalidSri(format!(
            "T_SRI = {} s holds no whole symbol of {} s",
            config.t_sri, t_s
        )));
    }
    let k_s = (config.rho_f * config.k as f64).round() as usize;
    if k_s < 8 {
        return Err(IvaError::DegenerateBand(k_s));
    }
    let b_s = k_s as f64 * config.delta_f;
    let k_p = next_pow2(2 * k_s);
    let p_t = db_to_linear(config.p_t_dbm - 30.0);
    Ok(DerivedParams {
        lambda: SPEED_OF_LIGHT / config.f_c,
        t_s,
        k_s,
        b_s,
        n_s,
        rho_t: t_s * config.m.div_ceil(n_s) as f64 / config.t_f,
        t_cpi: config.m_s as f64 * config.t_sri,
        delta_r: SPEED_OF_LIGHT / (2.0 * b_s),
        delta_tau: 1.0 / b_s,
        delta_fd: 1.0 / (config.m_s as f64 * config.t_sri),
        k_p,
        m_p: next_pow2(10 * config.m_s),
        p_avg: p_t / config.k as f64,
        sigma2: BOLTZMANN * config.t0 * db_to_linear(config.noise_figure_db) * config.delta_f,
        range_bin_m: SPEED_OF_LIGHT / (2.0 * k_p as f64 * config.delta_f),
        g_t: db_to_linear(config.g_t_dbi),
        g_r: db_to_linear(config.g_r_dbi),
    })
}
