//! Clohessy–Wiltshire relative-motion dynamics in the Hill frame.
//!
//! The chief (the RSO) sits at the origin of the rotating Hill frame with
//! axes along the orbital radius (x), along-track (y), and orbital angular
//! momentum (z). The deputy's linearized relative motion about a circular
//! chief orbit is
//!
//! ```text
//! x'' =  3n²x + 2n y' + ux
//! y'' = -2n x'         + uy
//! z'' = -n²z           + uz
//! ```
//!
//! with mean motion `n = sqrt(mu / r³)`. Uncontrolled (`u = 0`) motion is
//! bounded exactly when the drift constant `y' + 2nx` vanishes.

use std::f64::consts::{PI, SQRT_2};
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Standard gravitational parameter of Earth (m³/s²).
pub const EARTH_MU: f64 = 3.986_004_418e14;
/// Earth equatorial radius (m).
pub const EARTH_RADIUS: f64 = 6_378_137.0;

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("non-finite state encountered at integration step {step}")]
    NonFiniteState { step: usize },
}

/// Circular chief orbit parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitParams {
    /// Gravitational parameter (m³/s²).
    pub mu: f64,
    /// Chief orbit radius (m).
    pub chief_radius: f64,
    /// Mean motion n = sqrt(mu / r³) (rad/s).
    pub mean_motion: f64,
}

impl OrbitParams {
    pub fn new(mu: f64, chief_radius: f64) -> Result<Self, DynamicsError> {
        let mean_motion = mean_motion(mu, chief_radius)?;
        Ok(Self { mu, chief_radius, mean_motion })
    }

    /// Circular Earth orbit at the given altitude.
    pub fn from_altitude_km(altitude_km: f64) -> Result<Self, DynamicsError> {
        Self::new(EARTH_MU, EARTH_RADIUS + altitude_km * 1000.0)
    }

    /// Default chief orbit: 500 km circular LEO.
    pub fn leo_default() -> Self {
        Self::from_altitude_km(500.0).expect("valid default orbit")
    }

    /// Orbital period 2π/n (s).
    pub fn period(&self) -> f64 {
        2.0 * PI / self.mean_motion
    }
}

/// Mean motion of a circular orbit, sqrt(mu / r³).
pub fn mean_motion(mu: f64, radius: f64) -> Result<f64, DynamicsError> {
    if !(mu > 0.0) {
        return Err(DynamicsError::NonPositive { name: "mu", value: mu });
    }
    if !(radius > 0.0) {
        return Err(DynamicsError::NonPositive { name: "radius", value: radius });
    }
    Ok((mu / (radius * radius * radius)).sqrt())
}

/// Hill-frame relative state of the deputy at epoch `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelativeState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub vx: f64,
    pub vy: f64,
    pub vz: f64,
    pub t: f64,
}

impl RelativeState {
    pub fn new(x: f64, y: f64, z: f64, vx: f64, vy: f64, vz: f64, t: f64) -> Self {
        Self { x, y, z, vx, vy, vz, t }
    }

    pub fn position(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    pub fn velocity(&self) -> Vector3<f64> {
        Vector3::new(self.vx, self.vy, self.vz)
    }

    pub fn is_finite(&self) -> bool {
        [self.x, self.y, self.z, self.vx, self.vy, self.vz, self.t]
            .iter()
            .all(|v| v.is_finite())
    }
}

/// CW state derivative for the uncontrolled case (`u = 0`).
pub fn cw_derivative(s: &RelativeState, n: f64) -> [f64; 6] {
    cw_derivative_controlled(s, n, Vector3::zeros())
}

/// CW state derivative with an explicit control acceleration `u` (m/s²).
pub fn cw_derivative_controlled(s: &RelativeState, n: f64, u: Vector3<f64>) -> [f64; 6] {
    [
        s.vx,
        s.vy,
        s.vz,
        3.0 * n * n * s.x + 2.0 * n * s.vy + u.x,
        -2.0 * n * s.vx + u.y,
        -n * n * s.z + u.z,
    ]
}

/// Exact solution of the uncontrolled CW equations, propagated by `dt`
/// seconds from `s0`. `cw_closed_form(s0, n, 0.0)` returns `s0` unchanged.
pub fn cw_closed_form(s0: &RelativeState, n: f64, dt: f64) -> RelativeState {
    if dt == 0.0 {
        return *s0;
    }
    let nt = n * dt;
    let (s, c) = nt.sin_cos();
    let x0 = s0.x;
    let y0 = s0.y;
    let z0 = s0.z;
    let vx0 = s0.vx;
    let vy0 = s0.vy;
    let vz0 = s0.vz;

    let x = (4.0 - 3.0 * c) * x0 + s / n * vx0 + 2.0 / n * (1.0 - c) * vy0;
    let y = 6.0 * (s - nt) * x0 + y0 + 2.0 / n * (c - 1.0) * vx0 + (4.0 * s - 3.0 * nt) / n * vy0;
    let z = c * z0 + s / n * vz0;
    let vx = 3.0 * n * s * x0 + c * vx0 + 2.0 * s * vy0;
    let vy = 6.0 * n * (c - 1.0) * x0 - 2.0 * s * vx0 + (4.0 * c - 3.0) * vy0;
    let vz = -n * s * z0 + c * vz0;

    RelativeState::new(x, y, z, vx, vy, vz, s0.t + dt)
}

/// Ordered sequence of relative states with the orbit they were
/// propagated under.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<RelativeState>,
    pub params: OrbitParams,
}

impl Trajectory {
    /// CSV with header `t,x,y,z,vx,vy,vz`, full double precision.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,x,y,z,vx,vy,vz\n");
        for s in &self.samples {
            writeln!(out, "{},{},{},{},{},{},{}", s.t, s.x, s.y, s.z, s.vx, s.vy, s.vz)
                .expect("string write");
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_csv())
    }
}

/// Classical fixed-step RK4 integration of the uncontrolled CW equations.
///
/// The returned trajectory holds `steps + 1` samples, starting with `s0`.
pub fn propagate_rk4(
    s0: &RelativeState,
    params: &OrbitParams,
    dt: f64,
    steps: usize,
) -> Result<Trajectory, DynamicsError> {
    if !(dt > 0.0) {
        return Err(DynamicsError::NonPositive { name: "dt", value: dt });
    }
    if steps == 0 {
        return Err(DynamicsError::NonPositive { name: "steps", value: 0.0 });
    }
    let n = params.mean_motion;
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push(*s0);
    let mut s = *s0;
    for step in 1..=steps {
        let k1 = cw_derivative(&s, n);
        let k2 = cw_derivative(&advance(&s, &k1, 0.5 * dt), n);
        let k3 = cw_derivative(&advance(&s, &k2, 0.5 * dt), n);
        let k4 = cw_derivative(&advance(&s, &k3, dt), n);
        let mut comps = [s.x, s.y, s.z, s.vx, s.vy, s.vz];
        for i in 0..6 {
            comps[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        s = RelativeState::new(
            comps[0], comps[1], comps[2], comps[3], comps[4], comps[5],
            s0.t + step as f64 * dt,
        );
        if !s.is_finite() {
            return Err(DynamicsError::NonFiniteState { step });
        }
        samples.push(s);
    }
    Ok(Trajectory { samples, params: *params })
}

fn advance(s: &RelativeState, d: &[f64; 6], h: f64) -> RelativeState {
    RelativeState::new(
        s.x + h * d[0],
        s.y + h * d[1],
        s.z + h * d[2],
        s.vx + h * d[3],
        s.vy + h * d[4],
        s.vz + h * d[5],
        s.t + h,
    )
}

/// Planar bounded initial condition at radial offset `x0`:
/// `(x0, 0, 0, 0, -2n x0, 0)` at t = 0. The along-track drift constant of
/// this state is identically zero, so the uncontrolled orbit is a closed
/// 2:1 ellipse around the chief.
pub fn bounded_ic(x0: f64, n: f64) -> RelativeState {
    RelativeState::new(x0, 0.0, 0.0, 0.0, -2.0 * n * x0, 0.0, 0.0)
}

/// Inclined bounded initial condition at offset `x0`:
/// `(0, x0, 0, 2n x0/√2, 0, 2n x0/√2)` at t = 0.
///
/// This is the planar bounded state rotated so the closed relative orbit is
/// inclined 45° out of the chief's orbital plane, which lets a fly-around
/// camera image the top and bottom faces of the target. Equals
/// `euler_dcm(45°, 0°, 90°)` applied to `bounded_ic(x0, n)` (position and
/// velocity blocks rotated separately), but computed directly so the zero
/// components are exact.
pub fn inclined_bounded_ic(x0: f64, n: f64) -> RelativeState {
    let v = 2.0 * n * x0 / SQRT_2;
    RelativeState::new(0.0, x0, 0.0, v, 0.0, v, 0.0)
}

/// Along-track drift constant `y' + 2nx`, conserved along any uncontrolled
/// CW trajectory; the orbit is bounded iff it is zero.
pub fn drift_constant(s: &RelativeState, n: f64) -> f64 {
    s.vy + 2.0 * n * s.x
}

/// Proper rotation matrix (row-major), guaranteed orthonormal with
/// determinant +1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationMatrix3(pub Matrix3<f64>);

impl RotationMatrix3 {
    pub const ORTHONORMALITY_TOL: f64 = 1e-12;

    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    /// Wraps a matrix after checking `RᵀR = I` and `det R = +1` to 1e-12.
    pub fn from_matrix(m: Matrix3<f64>) -> Option<Self> {
        let r = Self(m);
        if r.is_valid() {
            Some(r)
        } else {
            None
        }
    }

    pub fn is_valid(&self) -> bool {
        let m = &self.0;
        let defect = (m.transpose() * m - Matrix3::identity()).abs().max();
        defect <= Self::ORTHONORMALITY_TOL && (m.determinant() - 1.0).abs() <= Self::ORTHONORMALITY_TOL
    }

    pub fn apply(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.0 * v
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }
}

fn rot_x(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
}

fn rot_y(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

fn rot_z(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// Orbit-inclination rotation: `Rz(psi) · Ry(phi) · Rx(-theta)`.
///
/// `psi` and `phi` are right-handed rotations about the cross-track and
/// along-track axes; `theta` is measured clockwise about the radial axis.
/// With (45°, 0°, 90°) this maps the planar bounded state onto the 45°
/// inclined bounded state, the geometry used for the fly-around datasets.
pub fn euler_dcm(theta: f64, phi: f64, psi: f64) -> RotationMatrix3 {
    RotationMatrix3(rot_z(psi) * rot_y(phi) * rot_x(-theta))
}

/// Applies a rotation to position and velocity blocks of a state.
pub fn rotate_state(r: &RotationMatrix3, s: &RelativeState) -> RelativeState {
    let p = r.apply(&s.position());
    let v = r.apply(&s.velocity());
    RelativeState::new(p.x, p.y, p.z, v.x, v.y, v.z, s.t)
}
