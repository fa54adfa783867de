//! Tumbling-RSO attitude: constant-rate spin profiles and quaternion
//! kinematics.
//!
//! Convention: scalar-first unit quaternions, right-handed, active
//! rotations. Used everywhere in the crate.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hill::RotationMatrix3;

#[derive(Debug, Error)]
pub enum AttitudeError {
    #[error("tumble axis has zero norm")]
    ZeroAxis,
    #[error("quaternion norm {norm} deviates from 1 beyond tolerance")]
    NotUnit { norm: f64 },
}

/// Scalar-first unit quaternion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitQuaternion {
    pub w: f64,
    pub qx: f64,
    pub qy: f64,
    pub qz: f64,
}

impl UnitQuaternion {
    pub const IDENTITY: Self = Self { w: 1.0, qx: 0.0, qy: 0.0, qz: 0.0 };

    pub fn from_axis_angle(axis: &Vector3<f64>, angle: f64) -> Result<Self, AttitudeError> {
        let norm = axis.norm();
        if norm < 1e-12 {
            return Err(AttitudeError::ZeroAxis);
        }
        let (s, c) = (0.5 * angle).sin_cos();
        let u = axis / norm;
        Ok(Self { w: c, qx: s * u.x, qy: s * u.y, qz: s * u.z })
    }

    pub fn norm(&self) -> f64 {
        (self.w * self.w + self.qx * self.qx + self.qy * self.qy + self.qz * self.qz).sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self { w: self.w / n, qx: self.qx / n, qy: self.qy / n, qz: self.qz / n }
    }

    /// Hamilton product `self ⊗ rhs` (apply `rhs` first, then `self`).
    pub fn mul(&self, rhs: &Self) -> Self {
        let (w1, x1, y1, z1) = (self.w, self.qx, self.qy, self.qz);
        let (w2, x2, y2, z2) = (rhs.w, rhs.qx, rhs.qy, rhs.qz);
        Self {
            w: w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            qx: w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            qy: w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            qz: w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        }
    }

    pub fn conjugate(&self) -> Self {
        Self { w: self.w, qx: -self.qx, qy: -self.qy, qz: -self.qz }
    }

    pub fn rotate(&self, v: &Vector3<f64>) -> Vector3<f64> {
        // q v q*
        let qv = Vector3::new(self.qx, self.qy, self.qz);
        let t = 2.0 * qv.cross(v);
        v + self.w * t + qv.cross(&t)
    }

    /// Rotation matrix of this quaternion; errors if the norm is off by
    /// more than 1e-6.
    pub fn to_rotation_matrix(&self) -> Result<RotationMatrix3, AttitudeError> {
        let norm = self.norm();
        if (norm - 1.0).abs() > 1e-6 {
            return Err(AttitudeError::NotUnit { norm });
        }
        let q = self.normalized();
        let (w, x, y, z) = (q.w, q.qx, q.qy, q.qz);
        let m = Matrix3::new(
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        );
        Ok(RotationMatrix3(m))
    }

    /// Shepperd's method; inverse of [`Self::to_rotation_matrix`] up to sign.
    pub fn from_rotation_matrix(r: &RotationMatrix3) -> Self {
        let m = r.matrix();
        let trace = m[(0, 0)] + m[(1, 1)] + m[(2, 2)];
        let q = if trace > 0.0 {
            let s = (trace + 1.0).sqrt() * 2.0;
            Self {
                w: 0.25 * s,
                qx: (m[(2, 1)] - m[(1, 2)]) / s,
                qy: (m[(0, 2)] - m[(2, 0)]) / s,
                qz: (m[(1, 0)] - m[(0, 1)]) / s,
            }
        } else if m[(0, 0)] > m[(1, 1)] && m[(0, 0)] > m[(2, 2)] {
            let s = (1.0 + m[(0, 0)] - m[(1, 1)] - m[(2, 2)]).sqrt() * 2.0;
            Self {
                w: (m[(2, 1)] - m[(1, 2)]) / s,
                qx: 0.25 * s,
                qy: (m[(0, 1)] + m[(1, 0)]) / s,
                qz: (m[(0, 2)] + m[(2, 0)]) / s,
            }
        } else if m[(1, 1)] > m[(2, 2)] {
            let s = (1.0 + m[(1, 1)] - m[(0, 0)] - m[(2, 2)]).sqrt() * 2.0;
            Self {
                w: (m[(0, 2)] - m[(2, 0)]) / s,
                qx: (m[(0, 1)] + m[(1, 0)]) / s,
                qy: 0.25 * s,
                qz: (m[(1, 2)] + m[(2, 1)]) / s,
            }
        } else {
            let s = (1.0 + m[(2, 2)] - m[(0, 0)] - m[(1, 1)]).sqrt() * 2.0;
            Self {
                w: (m[(1, 0)] - m[(0, 1)]) / s,
                qx: (m[(0, 2)] + m[(2, 0)]) / s,
                qy: (m[(1, 2)] + m[(2, 1)]) / s,
                qz: 0.25 * s,
            }
        };
        q.normalized()
    }
}

/// Standard quaternion-to-DCM map.
pub fn attitude_to_dcm(q: &UnitQuaternion) -> Result<RotationMatrix3, AttitudeError> {
    q.to_rotation_matrix()
}

/// One constant-rate spin component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spin {
    /// Unit spin axis in the Hill frame.
    pub axis: Vector3<f64>,
    /// Angular rate (deg/s), non-negative.
    pub rate_deg_s: f64,
}

/// Constant-rate tumble profile: one or more spin axes.
///
/// A single-axis profile is exactly periodic with period `360 / rate`
/// seconds. Multi-axis profiles model a constant body-frame angular
/// velocity equal to the sum of the configured `axis · rate` vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TumbleProfile {
    spins: Vec<Spin>,
}

/// Integration step bound for multi-axis propagation (s).
const MULTI_AXIS_MAX_STEP: f64 = 0.01;

impl TumbleProfile {
    /// Non-tumbling (static scene) profile.
    pub fn static_profile() -> Self {
        Self { spins: Vec::new() }
    }

    pub fn single_axis(axis: Vector3<f64>, rate_deg_s: f64) -> Result<Self, AttitudeError> {
        Self::static_profile().with_axis(axis, rate_deg_s)
    }

    pub fn with_axis(mut self, axis: Vector3<f64>, rate_deg_s: f64) -> Result<Self, AttitudeError> {
        let norm = axis.norm();
        if norm < 1e-12 {
            return Err(AttitudeError::ZeroAxis);
        }
        self.spins.push(Spin { axis: axis / norm, rate_deg_s: rate_deg_s.abs() });
        Ok(self)
    }

    pub fn spins(&self) -> &[Spin] {
        &self.spins
    }

    /// Total body angular velocity (rad/s).
    pub fn angular_velocity(&self) -> Vector3<f64> {
        self.spins
            .iter()
            .map(|s| s.axis * s.rate_deg_s.to_radians())
            .sum()
    }

    pub fn is_static(&self) -> bool {
        self.spins.is_empty() || self.spins.iter().all(|s| s.rate_deg_s == 0.0)
    }
}

/// Body orientation at time `t` under the given tumble profile.
///
/// Single-axis profiles use the exact axis-angle form. Multi-axis profiles
/// integrate the quaternion kinematics `q' = ½ q ⊗ ω` with fixed-step RK4,
/// step ≤ 0.01 s, renormalizing as it goes.
pub fn propagate_attitude(p: &TumbleProfile, t: f64) -> UnitQuaternion {
    if p.is_static() || t == 0.0 {
        return UnitQuaternion::IDENTITY;
    }
    if p.spins.len() == 1 {
        let s = &p.spins[0];
        let angle = s.rate_deg_s.to_radians() * t;
        return UnitQuaternion::from_axis_angle(&s.axis, angle).expect("unit axis");
    }
    let omega = p.angular_velocity();
    let steps = (t.abs() / MULTI_AXIS_MAX_STEP).ceil().max(1.0) as usize;
    let h = t / steps as f64;
    let mut q = UnitQuaternion::IDENTITY;
    for _ in 0..steps {
        q = rk4_quat_step(&q, &omega, h).normalized();
    }
    q
}

fn quat_derivative(q: &UnitQuaternion, omega: &Vector3<f64>) -> [f64; 4] {
    // q' = ½ q ⊗ (0, ω) for body-frame angular velocity
    let om = UnitQuaternion { w: 0.0, qx: omega.x, qy: omega.y, qz: omega.z };
    let d = q.mul(&om);
    [0.5 * d.w, 0.5 * d.qx, 0.5 * d.qy, 0.5 * d.qz]
}

fn rk4_quat_step(q: &UnitQuaternion, omega: &Vector3<f64>, h: f64) -> UnitQuaternion {
    let add = |q: &UnitQuaternion, d: &[f64; 4], f: f64| UnitQuaternion {
        w: q.w + f * d[0],
        qx: q.qx + f * d[1],
        qy: q.qy + f * d[2],
        qz: q.qz + f * d[3],
    };
    let k1 = quat_derivative(q, omega);
    let k2 = quat_derivative(&add(q, &k1, 0.5 * h), omega);
    let k3 = quat_derivative(&add(q, &k2, 0.5 * h), omega);
    let k4 = quat_derivative(&add(q, &k3, h), omega);
    UnitQuaternion {
        w: q.w + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        qx: q.qx + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        qy: q.qy + h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
        qz: q.qz + h / 6.0 * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3]),
    }
}
