//! `key=value` configuration files and the full simulation configuration.
//!
//! Keys missing from a file keep their default. `M_s`, `n_ref` and
//! `theta_s_deg` follow the heading / midpoint unless set explicitly.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{IvaError, Result};
use crate::scenario::{BeamModel, ScenarioConfig};
use crate::target::{ExtendedTarget, Scatterer, TrajectoryState, Vec3};

/// Everything a trial needs besides its seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub scenario: ScenarioConfig,
    pub target: ExtendedTarget,
    pub trajectory: TrajectoryState,
    pub auto_m_s: bool,
    pub auto_n_ref: bool,
    pub auto_theta_s: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        let mut cfg = SimConfig {
            scenario: ScenarioConfig::default(),
            target: ExtendedTarget::vehicle(),
            trajectory: TrajectoryState::default(),
            auto_m_s: true,
            auto_n_ref: true,
            auto_theta_s: true,
        };
        cfg.apply_auto();
        cfg
    }
}

fn is_broadside_heading(heading_deg: f64) -> bool {
    (heading_deg.rem_euclid(360.0) - 270.0).abs() < 1e-9
}

/// Sensing symbols per CPI for a heading: 220 crossing the boresight at
/// right angles, 200 otherwise.
pub fn auto_m_s(heading_deg: f64) -> usize {
    if is_broadside_heading(heading_deg) {
        220
    } else {
        200
    }
}

/// Phase reference cells for a heading: 3 at right angles, 5 otherwise.
pub fn auto_n_ref(heading_deg: f64) -> usize {
    if is_broadside_heading(heading_deg) {
        3
    } else {
        5
    }
}

impl SimConfig {
    pub fn apply_auto(&mut self) {
        let h = self.trajectory.heading_deg;
        if self.auto_m_s {
            self.scenario.m_s = auto_m_s(h);
        }
        if self.auto_n_ref {
            self.scenario.n_ref = auto_n_ref(h);
        }
        if self.auto_theta_s {
            self.scenario.theta_s_deg = self.trajectory.midpoint_azimuth_deg();
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        self.trajectory.validate()?;
        ExtendedTarget::new(self.target.scatterers.clone())?;
        Ok(())
    }

    /// Copy at one sweep point, re-applying the automatic rules.
    pub fn with_point(&self, rho_f: f64, speed: f64, heading_deg: f64) -> SimConfig {
        let mut cfg = self.clone();
        cfg.scenario.rho_f = rho_f;
        cfg.trajectory.speed = speed;
        cfg.trajectory.heading_deg = heading_deg;
        cfg.apply_auto();
        cfg
    }

    /// Parses config text; `origin` is only used in error messages.
    pub fn parse(text: &str, origin: &Path) -> Result<SimConfig> {
        let mut cfg = SimConfig::default();
        let mut scatterers: Vec<Scatterer> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| IvaError::Parse { path: origin.to_path_buf(), line: idx + 1, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key=value, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if key == "scatterer" {
                scatterers.push(parse_scatterer(value).map_err(err)?);
            } else {
                cfg.set(key, value).map_err(err)?;
            }
        }
        if !scatterers.is_empty() {
            cfg.target = ExtendedTarget { scatterers };
        }
        cfg.apply_auto();
        cfg.validate()?;
        Ok(cfg)
    }

    /// One `key=value` assignment (everything except `scatterer`).
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let s = &mut self.scenario;
        let t = &mut self.trajectory;
        match key {
            "f_c" => s.f_c = num(value)?,
            "delta_f" => s.delta_f = num(value)?,
            "K" => s.k = int(value)?,
            "M" => s.m = int(value)?,
            "T_g" => s.t_g = num(value)?,
            "T_f" => s.t_f = num(value)?,
            "rho_f" => s.rho_f = num(value)?,
            "T_SRI" => s.t_sri = num(value)?,
            "M_s" => {
                s.m_s = int(value)?;
                self.auto_m_s = false;
            }
            "P_T_dBm" => s.p_t_dbm = num(value)?,
            "noise_figure_dB" => s.noise_figure_db = num(value)?,
            "T0" => s.t0 = num(value)?,
            "N_T" => s.n_t = int(value)?,
            "N_R" => s.n_r = int(value)?,
            "beamwidth_T_deg" => s.beamwidth_t_deg = num(value)?,
            "beamwidth_R_deg" => s.beamwidth_r_deg = num(value)?,
            "theta_s_deg" => {
                s.theta_s_deg = num(value)?;
                self.auto_theta_s = false;
            }
            "G_T_dBi" => s.g_t_dbi = num(value)?,
            "G_R_dBi" => s.g_r_dbi = num(value)?,
            "epsilon" => s.epsilon = num(value)?,
            "n_ref" => {
                s.n_ref = int(value)?;
                self.auto_n_ref = false;
            }
            "seed" => s.seed = value.parse().map_err(|_| format!("`{value}` is not an unsigned integer"))?,
            "noise" => s.noise = boolean(value)?,
            "beam" => {
                s.beam = match value {
                    "synthesized" => BeamModel::Synthesized,
                    "ideal" => BeamModel::Ideal,
                    _ => return Err(format!("beam must be `synthesized` or `ideal`, got `{value}`")),
                }
            }
            "cell_gate" => s.cell_gate = num(value)?,
            "crop_half_range" => s.crop_half_range = num(value)?,
            "crop_half_crossrange" => s.crop_half_crossrange = num(value)?,
            "image_gate" => s.image_gate = num(value)?,
            "speed" => t.speed = num(value)?,
            "heading_deg" => t.heading_deg = num(value)?,
            "midpoint_x" => t.midpoint[0] = num(value)?,
            "midpoint_y" => t.midpoint[1] = num(value)?,
            "z_c" => t.z_c = num(value)?,
            "bs_x" => t.bs_position.x = num(value)?,
            "bs_y" => t.bs_position.y = num(value)?,
            "bs_z" => t.bs_position.z = num(value)?,
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    /// Every key in a fixed order with round-trip float formatting. Parsing
    /// the result reproduces `self`.
    pub fn canonical(&self) -> String {
        let s = &self.scenario;
        let t = &self.trajectory;
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k}={v}");
        };
        kv("f_c", format!("{:?}", s.f_c));
        kv("delta_f", format!("{:?}", s.delta_f));
        kv("K", s.k.to_string());
        kv("M", s.m.to_string());
        kv("T_g", format!("{:?}", s.t_g));
        kv("T_f", format!("{:?}", s.t_f));
        kv("rho_f", format!("{:?}", s.rho_f));
        kv("T_SRI", format!("{:?}", s.t_sri));
        if !self.auto_m_s {
            kv("M_s", s.m_s.to_string());
        }
        kv("P_T_dBm", format!("{:?}", s.p_t_dbm));
        kv("noise_figure_dB", format!("{:?}", s.noise_figure_db));
        kv("T0", format!("{:?}", s.t0));
        kv("N_T", s.n_t.to_string());
        kv("N_R", s.n_r.to_string());
        kv("beamwidth_T_deg", format!("{:?}", s.beamwidth_t_deg));
        kv("beamwidth_R_deg", format!("{:?}", s.beamwidth_r_deg));
        if !self.auto_theta_s {
            kv("theta_s_deg", format!("{:?}", s.theta_s_deg));
        }
        kv("G_T_dBi", format!("{:?}", s.g_t_dbi));
        kv("G_R_dBi", format!("{:?}", s.g_r_dbi));
        kv("epsilon", format!("{:?}", s.epsilon));
        if !self.auto_n_ref {
            kv("n_ref", s.n_ref.to_string());
        }
        kv("seed", s.seed.to_string());
        kv("noise", s.noise.to_string());
        kv("beam", match s.beam {
            BeamModel::Synthesized => "synthesized".into(),
            BeamModel::Ideal => "ideal".into(),
        });
        kv("cell_gate", format!("{:?}", s.cell_gate));
        kv("crop_half_range", format!("{:?}", s.crop_half_range));
        kv("crop_half_crossrange", format!("{:?}", s.crop_half_crossrange));
        kv("image_gate", format!("{:?}", s.image_gate));
        kv("speed", format!("{:?}", t.speed));
        kv("heading_deg", format!("{:?}", t.heading_deg));
        kv("midpoint_x", format!("{:?}", t.midpoint[0]));
        kv("midpoint_y", format!("{:?}", t.midpoint[1]));
        kv("z_c", format!("{:?}", t.z_c));
        kv("bs_x", format!("{:?}", t.bs_position.x));
        kv("bs_y", format!("{:?}", t.bs_position.y));
        kv("bs_z", format!("{:?}", t.bs_position.z));
        for sc in &self.target.scatterers {
            kv("scatterer", format!("{:?},{:?},{:?},{:?}", sc.local.x, sc.local.y, sc.local.z, sc.rcs));
        }
        out
    }

    /// Hex SHA-256 of [`canonical`](Self::canonical).
    pub fn hash(&self) -> String {
        Sha256::digest(self.canonical().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// Reads and validates a config file.
pub fn load_config(path: &Path) -> Result<SimConfig> {
    let text = std::fs::read_to_string(path)?;
    SimConfig::parse(&text, path)
}

/// Parses config text that did not come from a file.
pub fn parse_config(text: &str) -> Result<SimConfig> {
    SimConfig::parse(text, &PathBuf::from("<string>"))
}

fn num(v: &str) -> std::result::Result<f64, String> {
    v.parse::<f64>().map_err(|_| format!("`{v}` is not a number"))
}

fn int(v: &str) -> std::result::Result<usize, String> {
    v.parse::<usize>().map_err(|_| format!("`{v}` is not a non-negative integer"))
}

fn boolean(v: &str) -> std::result::Result<bool, String> {
    match v {
        "true" | "on" | "1" => Ok(true),
        "false" | "off" | "0" => Ok(false),
        _ => Err(format!("`{v}` is not a boolean")),
    }
}

fn parse_scatterer(v: &str) -> std::result::Result<Scatterer, String> {
    let parts: Vec<f64> = v.split(',').map(|p| num(p.trim())).collect::<std::result::Result<_, _>>()?;
    match parts[..] {
        [x, y, z, rcs] => Ok(Scatterer { local: Vec3::new(x, y, z), rcs }),
        [x, y, z] => Ok(Scatterer { local: Vec3::new(x, y, z), rcs: 1.0 }),
        _ => Err(format!("scatterer needs x,y,z[,rcs], got `{v}`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg, SimConfig::default());
        assert_eq!(cfg.scenario.f_c, 6.7e9);
        assert_eq!(cfg.scenario.delta_f, 30e3);
        assert_eq!(cfg.scenario.m_s, 220);
        assert_eq!(cfg.scenario.n_ref, 3);
        assert_eq!(cfg.target.len(), 5);
    }

    #[test]
    fn single_key_overrides() {
        let cfg = parse_config("# comment\n\nrho_f=0.5   # trailing\n").unwrap();
        let mut expect = SimConfig::default();
        expect.scenario.rho_f = 0.5;
        assert_eq!(cfg, expect);
    }

    #[test]
    fn rejects_bad_input() {
        match parse_config("rho_f=1.5") {
            Err(IvaError::InvalidField { field, .. }) => assert_eq!(field, "rho_f"),
            other => panic!("{other:?}"),
        }
        match parse_config("seed=3\nbogus=1") {
            Err(IvaError::Parse { line, message, .. }) => {
                assert_eq!(line, 2);
                assert!(message.contains("bogus"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_config("K=abc"), Err(IvaError::Parse { line: 1, .. })));
        assert!(matches!(parse_config("noise"), Err(IvaError::Parse { line: 1, .. })));
        assert!(matches!(parse_config("scatterer=1,2"), Err(IvaError::Parse { .. })));
        assert!(matches!(parse_config("scatterer=0,0,0,-1"), Err(IvaError::InvalidField { .. })));
    }

    #[test]
    fn heading_rules() {
        let cfg = parse_config("heading_deg=300").unwrap();
        assert_eq!((cfg.scenario.m_s, cfg.scenario.n_ref), (200, 5));
        let cfg = parse_config("heading_deg=300\nM_s=100\nn_ref=2").unwrap();
        assert_eq!((cfg.scenario.m_s, cfg.scenario.n_ref), (100, 2));
        let moved = cfg.with_point(0.4, 10.0, 270.0);
        assert_eq!((moved.scenario.m_s, moved.scenario.n_ref), (100, 2));
        let auto = SimConfig::default().with_point(0.4, 10.0, 300.0);
        assert_eq!((auto.scenario.m_s, auto.scenario.n_ref), (200, 5));
        assert_eq!(auto.scenario.rho_f, 0.4);
        assert_eq!(auto.trajectory.speed, 10.0);
        let off_axis = parse_config("midpoint_y=60").unwrap();
        assert!((off_axis.scenario.theta_s_deg - 45.0).abs() < 1e-12);
    }

    #[test]
    fn scatterer_list_replaces_vehicle() {
        let cfg = parse_config("scatterer=0,0,0\nscatterer=1,0,0,2.5").unwrap();
        assert_eq!(cfg.target.len(), 2);
        assert_eq!(cfg.target.scatterers[1].rcs, 2.5);
    }

    #[test]
    fn shipped_defaults_table_matches() {
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("config/default.cfg");
        assert_eq!(load_config(&path).unwrap(), SimConfig::default());
    }

    #[test]
    fn hash_tracks_content() {
        let a = SimConfig::default();
        assert_eq!(a.hash(), SimConfig::default().hash());
        assert_eq!(a.hash().len(), 64);
        assert_ne!(a.hash(), a.with_point(0.5, 30.0, 270.0).hash());
    }

    proptest! {
        #[test]
        fn canonical_round_trip(
            rho_f in 0.05f64..1.0,
            speed in 0.0f64..50.0,
            heading in 0.0f64..360.0,
            seed in any::<u64>(),
            fix_m_s in any::<bool>(),
        ) {
            let mut cfg = SimConfig::default().with_point(rho_f, speed, heading);
            cfg.scenario.seed = seed;
            if fix_m_s {
                cfg.set("M_s", "64").unwrap();
            }
            let back = parse_config(&cfg.canonical()).unwrap();
            prop_assert_eq!(back, cfg);
        }
    }
}
