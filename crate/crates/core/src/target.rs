//! Extended-target geometry and kinematics.
//!
//! Signal synthesis uses exact 3D positions from [`scatterer_positions`].
//! The iso-range expansion ([`iso_range_approximation`], [`range_drift_terms`])
//! and the apparent-rotation quantities in [`KinematicSnapshot`] are for
//! analysis, axis mapping and validation.

use std::ops::{Add, Mul, Sub};

use crate::error::{IvaError, Result};
use crate::scenario::{DerivedParams, ScenarioConfig};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Rotation about +z by `angle` radians.
    pub fn rotate_z(self, angle: f64) -> Vec3 {
        let (s, c) = angle.sin_cos();
        Vec3::new(c * self.x - s * self.y, s * self.x + c * self.y, self.z)
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, k: f64) -> Vec3 {
        Vec3::new(self.x * k, self.y * k, self.z * k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scatterer {
    /// Target-fixed coordinates (x' forward, y' left, z' up), m.
    pub local: Vec3,
    /// Radar cross-section, m².
    pub rcs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedTarget {
    pub scatterers: Vec<Scatterer>,
}

impl ExtendedTarget {
    pub fn new(scatterers: Vec<Scatterer>) -> Result<Self> {
        if scatterers.is_empty() {
            return Err(IvaError::field("scatterer", "target needs at least one scatterer"));
        }
        if let Some(s) = scatterers.iter().find(|s| !(s.rcs > 0.0 && s.rcs.is_finite())) {
            return Err(IvaError::field("scatterer", format!("RCS must be positive, got {}", s.rcs)));
        }
        Ok(ExtendedTarget { scatterers })
    }

    /// Five unit-RCS points: front, rear, roof, left, right.
    pub fn vehicle() -> Self {
        let p = |x, y| Scatterer { local: Vec3::new(x, y, 0.0), rcs: 1.0 };
        ExtendedTarget {
            scatterers: vec![p(2.5, 0.0), p(-2.5, 0.0), p(0.0, 0.0), p(0.0, 1.0), p(0.0, -1.0)],
        }
    }

    pub fn len(&self) -> usize {
        self.scatterers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scatterers.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryState {
    /// Ground position of the target centre at the reference symbol, m.
    pub midpoint: [f64; 2],
    pub z_c: f64,
    /// Heading Θ₀, degrees anticlockwise from +x.
    pub heading_deg: f64,
    pub speed: f64,
    pub bs_position: Vec3,
}

impl Default for TrajectoryState {
    fn default() -> Self {
        TrajectoryState {
            midpoint: [60.0, 0.0],
            z_c: 1.6,
            heading_deg: 270.0,
            speed: 30.0,
            bs_position: Vec3::new(0.0, 0.0, 25.0),
        }
    }
}

impl TrajectoryState {
    pub fn heading(&self) -> f64 {
        self.heading_deg.to_radians()
    }

    pub fn velocity(&self) -> Vec3 {
        let h = self.heading();
        Vec3::new(h.cos(), h.sin(), 0.0) * self.speed
    }

    pub fn centre_at(&self, t: f64) -> Vec3 {
        Vec3::new(self.midpoint[0], self.midpoint[1], self.z_c) + self.velocity() * t
    }

    /// Azimuth of the midpoint seen from the base station, degrees.
    pub fn midpoint_azimuth_deg(&self) -> f64 {
        (self.midpoint[1] - self.bs_position.y)
            .atan2(self.midpoint[0] - self.bs_position.x)
            .to_degrees()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.speed >= 0.0 && self.speed.is_finite()) {
            return Err(IvaError::field("speed", "must be non-negative"));
        }
        Ok(())
    }
}

/// Slow-time index of the reference profile, `M_s/2 − 1`.
pub fn reference_index(m_s: usize) -> usize {
    m_s / 2 - 1
}

/// Time of sensing symbol `m_s` relative to the reference symbol.
pub fn slow_time(m_s: usize, scenario: &ScenarioConfig) -> f64 {
    (m_s as f64 - reference_index(scenario.m_s) as f64) * scenario.t_sri
}

pub fn scatterer_positions(
    target: &ExtendedTarget,
    traj: &TrajectoryState,
    m_s: usize,
    scenario: &ScenarioConfig,
) -> Result<Vec<Vec3>> {
    if m_s >= scenario.m_s {
        return Err(IvaError::IndexOutOfRange { index: m_s, len: scenario.m_s });
    }
    let centre = traj.centre_at(slow_time(m_s, scenario));
    let heading = traj.heading();
    Ok(target
        .scatterers
        .iter()
        .map(|s| centre + s.local.rotate_z(heading))
        .collect())
}

pub fn exact_range(bs: Vec3, position: Vec3) -> f64 {
    (position - bs).norm()
}

/// Azimuth of `position` seen from `bs`, radians from +x.
pub fn azimuth(bs: Vec3, position: Vec3) -> f64 {
    (position.y - bs.y).atan2(position.x - bs.x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScattererGeometry {
    pub range: f64,
    pub azimuth: f64,
    /// Elevation of the line of sight below the BS horizon, rad.
    pub depression: f64,
}

/// Centroid and per-scatterer geometry at the reference symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct KinematicSnapshot {
    pub scatterers: Vec<ScattererGeometry>,
    /// R₀, m.
    pub range: f64,
    /// θ₀, rad.
    pub azimuth: f64,
    /// φ, rad.
    pub elevation: f64,
    /// Ψ₀ = Θ₀ − θ₀, rad.
    pub aspect: f64,
    /// Apparent rotation rate −dθ/dt, rad/s. Positive for both reference
    /// headings; its magnitude sets the cross-range scale.
    pub omega0: f64,
    /// Radial velocity, m/s.
    pub v0: f64,
    /// Centripetal acceleration (ω₀ cos φ)² R₀, m/s².
    pub a0: f64,
}

pub fn centroid_kinematics(
    target: &ExtendedTarget,
    traj: &TrajectoryState,
    scenario: &ScenarioConfig,
) -> Result<KinematicSnapshot> {
    traj.validate()?;
    let bs = traj.bs_position;
    let centre = traj.centre_at(0.0);
    let rel = centre - bs;
    let ground = rel.x.hypot(rel.y);
    if ground <= 1e-9 {
        return Err(IvaError::Geometry("target centre is directly below the base station".into()));
    }
    let range = rel.norm();
    let azimuth = rel.y.atan2(rel.x);
    let elevation = (bs.z - centre.z).atan2(ground);
    let vel = traj.velocity();
    let dtheta_dt = (rel.x * vel.y - rel.y * vel.x) / (ground * ground);
    let omega0 = -dtheta_dt;
    let v0 = rel.dot(vel) / range;
    let a0 = (omega0 * elevation.cos()).powi(2) * range;

    let positions = scatterer_positions(target, traj, reference_index(scenario.m_s), scenario)?;
    let scatterers = positions
        .iter()
        .map(|&p| {
            let r = p - bs;
            ScattererGeometry {
                range: r.norm(),
                azimuth: r.y.atan2(r.x),
                depression: (-r.z).atan2(r.x.hypot(r.y)),
            }
        })
        .collect();

    Ok(KinematicSnapshot {
        scatterers,
        range,
        azimuth,
        elevation,
        aspect: traj.heading() - azimuth,
        omega0,
        v0,
        a0,
    })
}

/// Δu = λ Δf_D / (2 ω₀ cos φ).
pub fn cross_range_resolution(snapshot: &KinematicSnapshot, derived: &DerivedParams) -> Result<f64> {
    let rate = snapshot.omega0.abs() * snapshot.elevation.cos();
    if rate < 1e-12 {
        return Err(IvaError::UndefinedCrossRange);
    }
    Ok(derived.lambda * derived.delta_fd / (2.0 * rate))
}

/// Range walk and range curvature of a scatterer, `offset` symbols away
/// from the snapshot epoch.
pub fn range_drift_terms(snapshot: &KinematicSnapshot, local: Vec3, offset: f64, t_sri: f64) -> (f64, f64) {
    let (s, c) = snapshot.aspect.sin_cos();
    let t = offset * t_sri;
    let w = snapshot.omega0;
    let cos_phi = snapshot.elevation.cos();
    let walk = (-local.x * s - local.y * c) * w * t * cos_phi;
    let curv = (-local.x * c + local.y * s) * 0.5 * w * w * t * t * cos_phi;
    (walk, curv)
}

/// Straight iso-range approximation of a scatterer's range at time `t`
/// from the snapshot epoch.
pub fn iso_range_approximation(snapshot: &KinematicSnapshot, local: Vec3, t: f64) -> f64 {
    let r_c = snapshot.range + snapshot.v0 * t + 0.5 * snapshot.a0 * t * t;
    let angle = snapshot.aspect + snapshot.omega0 * t;
    let (s, c) = angle.sin_cos();
    let (sphi, cphi) = snapshot.elevation.sin_cos();
    r_c + (local.x * c - local.y * s) * cphi + local.z * sphi
}

/// Cross-range coordinate `u = x' sin Ψ₀ + y' cos Ψ₀`.
pub fn cross_range_coordinate(snapshot: &KinematicSnapshot, local: Vec3) -> f64 {
    let (s, c) = snapshot.aspect.sin_cos();
    local.x * s + local.y * c
}

/// Range offset from the centroid predicted by the iso-range expansion at
/// the snapshot epoch.
pub fn range_offset(snapshot: &KinematicSnapshot, local: Vec3) -> f64 {
    let (s, c) = snapshot.aspect.sin_cos();
    let (sphi, cphi) = snapshot.elevation.sin_cos();
    (local.x * c - local.y * s) * cphi + local.z * sphi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::derive;

    fn scenario(m_s: usize) -> ScenarioConfig {
        ScenarioConfig { m_s, ..Default::default() }
    }

    fn traj(heading_deg: f64, speed: f64) -> TrajectoryState {
        TrajectoryState { heading_deg, speed, ..Default::default() }
    }

    fn close(a: Vec3, b: Vec3, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn reference_time_positions() {
        let sc = scenario(220);
        let r = reference_index(220);
        let p = scatterer_positions(&ExtendedTarget::vehicle(), &traj(270.0, 30.0), r, &sc).unwrap();
        assert!(close(p[2], Vec3::new(60.0, 0.0, 1.6), 1e-12));
        assert!(close(p[0], Vec3::new(60.0, -2.5, 1.6), 1e-12));
        // local y' = +1 maps to +x at this heading
        assert!(close(p[3], Vec3::new(61.0, 0.0, 1.6), 1e-12));

        let p = scatterer_positions(&ExtendedTarget::vehicle(), &traj(270.0, 30.0), r + 10, &sc).unwrap();
        assert!(close(p[2], Vec3::new(60.0, -0.3, 1.6), 1e-12));
    }

    #[test]
    fn index_out_of_range() {
        let sc = scenario(220);
        assert!(scatterer_positions(&ExtendedTarget::vehicle(), &traj(270.0, 30.0), 220, &sc).is_err());
    }

    #[test]
    fn exact_ranges() {
        let r = exact_range(Vec3::new(0.0, 0.0, 25.0), Vec3::new(60.0, 0.0, 1.6));
        assert!((r - (60f64.powi(2) + 23.4f64.powi(2)).sqrt()).abs() < 1e-12);
        assert!((r - 64.4016).abs() < 1e-4);
        assert_eq!(exact_range(Vec3::default(), Vec3::new(3.0, 4.0, 0.0)), 5.0);
        assert_eq!(exact_range(Vec3::new(1.0, 2.0, 3.0), Vec3::new(1.0, 2.0, 3.0)), 0.0);
    }

    #[test]
    fn kinematics_broadside_pass() {
        let k = centroid_kinematics(&ExtendedTarget::vehicle(), &traj(270.0, 30.0), &scenario(220)).unwrap();
        assert!(k.v0.abs() < 1e-12);
        assert!((k.omega0 - 0.5).abs() < 1e-12);
        assert!((k.elevation.cos() - 0.9317).abs() < 1e-4);
        assert!((k.range - 64.4016).abs() < 1e-4);
        assert!((k.a0 - (0.5 * k.elevation.cos()).powi(2) * k.range).abs() < 1e-12);
    }

    #[test]
    fn kinematics_oblique_pass() {
        let k = centroid_kinematics(&ExtendedTarget::vehicle(), &traj(300.0, 30.0), &scenario(200)).unwrap();
        assert!((k.omega0 - 30.0 * 60f64.to_radians().sin() / 60.0).abs() < 1e-12);
        assert!((k.omega0 - 0.4330).abs() < 1e-4);
        let expect_v0 = 30.0 * 60f64.to_radians().cos() * k.elevation.cos();
        assert!((k.v0 - expect_v0).abs() < 1e-12);
    }

    #[test]
    fn static_target() {
        let k = centroid_kinematics(&ExtendedTarget::vehicle(), &traj(270.0, 0.0), &scenario(220)).unwrap();
        assert_eq!(k.omega0, 0.0);
        assert_eq!(k.v0, 0.0);
        assert_eq!(k.a0, 0.0);
        let d = derive(&scenario(220)).unwrap();
        assert!(matches!(cross_range_resolution(&k, &d), Err(IvaError::UndefinedCrossRange)));
    }

    #[test]
    fn singular_geometry() {
        let t = TrajectoryState { midpoint: [0.0, 0.0], ..Default::default() };
        assert!(matches!(
            centroid_kinematics(&ExtendedTarget::vehicle(), &t, &scenario(220)),
            Err(IvaError::Geometry(_))
        ));
    }

    fn delta_u(heading: f64, speed: f64, m_s: usize) -> f64 {
        let sc = scenario(m_s);
        let k = centroid_kinematics(&ExtendedTarget::vehicle(), &traj(heading, speed), &sc).unwrap();
        cross_range_resolution(&k, &derive(&sc).unwrap()).unwrap()
    }

    #[test]
    fn cross_range_resolution_values() {
        assert!((delta_u(270.0, 30.0, 220) - 0.22).abs() < 0.02);
        assert!((delta_u(270.0, 10.0, 220) - 0.66).abs() < 0.02);
        assert!((delta_u(300.0, 30.0, 200) - 0.277).abs() < 0.005);
        assert!((delta_u(300.0, 30.0, 200) - 0.27).abs() < 0.03);
    }

    #[test]
    fn drift_terms() {
        let sc = scenario(220);
        let k = centroid_kinematics(&ExtendedTarget::vehicle(), &traj(270.0, 30.0), &sc).unwrap();
        assert_eq!(range_drift_terms(&k, Vec3::default(), 50.0, sc.t_sri), (0.0, 0.0));
        let front = Vec3::new(2.5, 0.0, 0.0);
        let dr = derive(&sc).unwrap().delta_r;
        for edge in [-(reference_index(220) as f64), (219 - reference_index(220)) as f64] {
            let (w, c) = range_drift_terms(&k, front, edge, sc.t_sri);
            assert!((w + c).abs() < dr, "walk {w} curv {c}");
        }
        let still = centroid_kinematics(&ExtendedTarget::vehicle(), &traj(270.0, 0.0), &sc).unwrap();
        assert_eq!(range_drift_terms(&still, front, 80.0, sc.t_sri), (0.0, 0.0));
    }

    #[test]
    fn rigid_body_over_cpi() {
        let sc = scenario(200);
        let t = ExtendedTarget::vehicle();
        let tr = traj(300.0, 30.0);
        let first = scatterer_positions(&t, &tr, 0, &sc).unwrap();
        for m in 1..200 {
            let p = scatterer_positions(&t, &tr, m, &sc).unwrap();
            for i in 0..p.len() {
                for j in i + 1..p.len() {
                    let d0 = (first[i] - first[j]).norm();
                    assert!(((p[i] - p[j]).norm() - d0).abs() < 1e-9);
                }
            }
        }
    }

    /// The iso-range expansion drops the d²/(2R) second-order term, and the
    /// centroid model truncates after the apparent-rotation acceleration
    /// (a few mm over the CPI); together they stay well inside one cell.
    #[test]
    fn iso_range_far_field_regime() {
        for (heading, m_s) in [(270.0, 220), (300.0, 200)] {
            let sc = scenario(m_s);
            let t = ExtendedTarget::vehicle();
            let tr = traj(heading, 30.0);
            let k = centroid_kinematics(&t, &tr, &sc).unwrap();
            let dr = derive(&sc).unwrap().delta_r;
            for m in 0..m_s {
                let pos = scatterer_positions(&t, &tr, m, &sc).unwrap();
                let ts = slow_time(m, &sc);
                for (s, p) in t.scatterers.iter().zip(&pos) {
                    let exact = exact_range(tr.bs_position, *p);
                    let approx = iso_range_approximation(&k, s.local, ts);
                    let offset = s.local.norm();
                    let bound = offset * offset / (2.0 * k.range) + 5e-3;
                    assert!((exact - approx).abs() < bound, "m={m} err={}", exact - approx);
                    assert!((exact - approx).abs() < 0.15 * dr);
                }
            }
        }
    }

    #[test]
    fn reference_centroid_range_exact() {
        let sc = scenario(220);
        let tr = traj(300.0, 20.0);
        let k = centroid_kinematics(&ExtendedTarget::vehicle(), &tr, &sc).unwrap();
        assert_eq!(k.range, (60f64 * 60.0 + 23.4 * 23.4).sqrt());
    }

    #[test]
    fn target_validation() {
        assert!(ExtendedTarget::new(vec![]).is_err());
        assert!(ExtendedTarget::new(vec![Scatterer { local: Vec3::default(), rcs: 0.0 }]).is_err());
    }
}
