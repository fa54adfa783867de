//! Scenario composition: deputy trajectory + RSO tumble → per-frame camera
//! poses and neural-rendering-ready dataset exports.
//!
//! The camera rides the inclined bounded relative orbit and always aims at
//! the chief at the Hill-frame origin. Exports follow the common
//! novel-view-synthesis convention: camera-to-world transforms with X
//! right, Y up, Z backward (the camera looks along its −Z axis), and a
//! normalized `time` field in [0, 1].

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{Matrix3, Matrix4, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attitude::{propagate_attitude, TumbleProfile, UnitQuaternion};
use crate::hill::{cw_closed_form, inclined_bounded_ic, OrbitParams, RotationMatrix3};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("camera position coincides with look target")]
    DegenerateLookAt,
    #[error("invalid config: {0}")]
    Config(String),
    #[error("frame {index}: {source}")]
    Frame {
        index: usize,
        #[source]
        source: Box<ScenarioError>,
    },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("transforms parse error: {0}")]
    Parse(#[from] serde_json::Error),
}

/// Pinhole camera intrinsics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraIntrinsics {
    pub width: u32,
    pub height: u32,
    /// Horizontal field of view (rad), in (0, π).
    pub horizontal_fov: f64,
}

impl CameraIntrinsics {
    pub fn new(width: u32, height: u32, horizontal_fov: f64) -> Result<Self, ScenarioError> {
        if width == 0 || height == 0 {
            return Err(ScenarioError::Config("image dimensions must be >= 1".into()));
        }
        if !(horizontal_fov > 0.0 && horizontal_fov < std::f64::consts::PI) {
            return Err(ScenarioError::Config(format!(
                "horizontal_fov must be in (0, pi), got {horizontal_fov}"
            )));
        }
        Ok(Self { width, height, horizontal_fov })
    }

    /// Focal length in pixels implied by width and horizontal FOV.
    pub fn focal_px(&self) -> f64 {
        0.5 * self.width as f64 / (0.5 * self.horizontal_fov).tan()
    }
}

impl Default for CameraIntrinsics {
    fn default() -> Self {
        // 800x800 with the camera_angle_x common in synthetic NVS datasets
        Self { width: 800, height: 800, horizontal_fov: 0.6911112 }
    }
}

/// Full description of one fly-around dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub orbit: OrbitParams,
    /// Initial radial offset fed to the inclined bounded IC (m).
    pub x0: f64,
    pub tumble: TumbleProfile,
    pub frame_count: usize,
    /// Scenario length (s).
    pub duration: f64,
    pub intrinsics: CameraIntrinsics,
    pub seed: u64,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.frame_count < 2 {
            return Err(ScenarioError::Config("frame_count must be >= 2".into()));
        }
        if !(self.duration > 0.0) {
            return Err(ScenarioError::Config("duration must be > 0".into()));
        }
        if !(self.x0 > 0.0) {
            return Err(ScenarioError::Config("x0 must be > 0".into()));
        }
        Ok(())
    }
}

impl Default for ScenarioConfig {
    /// x0 = 40 m, 3 deg/s z-axis tumble, one orbital period, 200 frames.
    fn default() -> Self {
        let orbit = OrbitParams::leo_default();
        Self {
            duration: orbit.period(),
            orbit,
            x0: 40.0,
            tumble: TumbleProfile::single_axis(Vector3::z(), 3.0).expect("unit axis"),
            frame_count: 200,
            intrinsics: CameraIntrinsics::default(),
            seed: 0,
        }
    }
}

/// Rigid camera-to-world transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub rotation: RotationMatrix3,
    pub translation: Vector3<f64>,
}

impl Pose {
    pub fn to_matrix4(&self) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(self.rotation.matrix());
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.translation);
        m
    }

    pub fn from_matrix4(m: &Matrix4<f64>) -> Option<Self> {
        let rot = RotationMatrix3::from_matrix(m.fixed_view::<3, 3>(0, 0).into_owned())?;
        let bottom = m.fixed_view::<1, 4>(3, 0);
        if bottom != Matrix4::identity().fixed_view::<1, 4>(3, 0) {
            return None;
        }
        Some(Self { rotation: rot, translation: m.fixed_view::<3, 1>(0, 3).into_owned() })
    }

    /// World-frame direction of the camera's −Z (look) axis.
    pub fn look_direction(&self) -> Vector3<f64> {
        -self.rotation.matrix().column(2)
    }
}

/// One frame of the exported dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRecord {
    pub index: usize,
    pub t: f64,
    pub time_normalized: f64,
    pub camera_pose: Pose,
    pub rso_attitude: UnitQuaternion,
    pub image_path: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub config: ScenarioConfig,
    pub frames: Vec<FrameRecord>,
}

/// Camera-to-world transform for a camera at `position` looking at
/// `target` (along the camera's −Z axis), with `up_hint` projected
/// perpendicular to the look direction. Falls back to the Hill radial
/// axis as hint when the projection degenerates.
pub fn camera_lookat(
    position: Vector3<f64>,
    target: Vector3<f64>,
    up_hint: Vector3<f64>,
) -> Result<Pose, ScenarioError> {
    let look = target - position;
    let dist = look.norm();
    if dist < 1e-12 {
        return Err(ScenarioError::DegenerateLookAt);
    }
    let f = look / dist;
    let mut up = up_hint - up_hint.dot(&f) * f;
    if up.norm() < 1e-9 {
        let hint = Vector3::x();
        up = hint - hint.dot(&f) * f;
    }
    let y = up.normalize();
    let z = -f;
    let x = y.cross(&z);
    let rot = Matrix3::from_columns(&[x, y, z]);
    let rotation = RotationMatrix3::from_matrix(rot)
        .expect("orthonormal by construction");
    Ok(Pose { rotation, translation: position })
}

/// Builds the full dataset: inclined bounded trajectory sampled at
/// `frame_count` uniform epochs over `duration`, camera aimed at the
/// origin, RSO attitude from the tumble profile. Deterministic: identical
/// configs produce identical datasets.
pub fn build_scenario(config: &ScenarioConfig) -> Result<Dataset, ScenarioError> {
    config.validate()?;
    let n = config.orbit.mean_motion;
    let s0 = inclined_bounded_ic(config.x0, n);
    let dt = config.duration / (config.frame_count - 1) as f64;

    let frames: Result<Vec<FrameRecord>, ScenarioError> = (0..config.frame_count)
        .into_par_iter()
        .map(|index| {
            let t = index as f64 * dt;
            let state = cw_closed_form(&s0, n, t);
            let camera_pose =
                camera_lookat(state.position(), Vector3::zeros(), Vector3::z()).map_err(|e| {
                    ScenarioError::Frame { index, source: Box::new(e) }
                })?;
            Ok(FrameRecord {
                index,
                t,
                time_normalized: t / config.duration,
                camera_pose,
                rso_attitude: propagate_attitude(&config.tumble, t),
                image_path: format!("./images/frame_{index:05}.png"),
            })
        })
        .collect();

    Ok(Dataset { config: config.clone(), frames: frames? })
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
struct TransformsFile {
    camera_angle_x: f64,
    frames: Vec<TransformsFrame>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
struct TransformsFrame {
    file_path: String,
    time: f64,
    transform_matrix: [[f64; 4]; 4],
}

/// Serializes the camera-transforms JSON for a dataset.
pub fn transforms_json(d: &Dataset) -> String {
    let file = TransformsFile {
        camera_angle_x: d.config.intrinsics.horizontal_fov,
        frames: d
            .frames
            .iter()
            .map(|f| {
                let m = f.camera_pose.to_matrix4();
                let mut rows = [[0.0; 4]; 4];
                for r in 0..4 {
                    for c in 0..4 {
                        rows[r][c] = m[(r, c)];
                    }
                }
                TransformsFrame {
                    file_path: f.image_path.clone(),
                    time: f.time_normalized,
                    transform_matrix: rows,
                }
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("serializable")
}

/// Writes the camera-transforms JSON file.
pub fn export_transforms(d: &Dataset, path: &Path) -> Result<(), ScenarioError> {
    std::fs::write(path, transforms_json(d))?;
    Ok(())
}

/// Parsed transforms entry: (fov, frames as (file_path, time, pose)).
pub fn import_transforms(path: &Path) -> Result<(f64, Vec<(String, f64, Matrix4<f64>)>), ScenarioError> {
    let text = std::fs::read_to_string(path)?;
    let file: TransformsFile = serde_json::from_str(&text)?;
    let frames = file
        .frames
        .into_iter()
        .map(|f| {
            let mut m = Matrix4::zeros();
            for r in 0..4 {
                for c in 0..4 {
                    m[(r, c)] = f.transform_matrix[r][c];
                }
            }
            (f.file_path, f.time, m)
        })
        .collect();
    Ok((file.camera_angle_x, frames))
}

/// Ground-truth CSV: camera pose and RSO attitude per frame.
pub fn ground_truth_csv(d: &Dataset) -> String {
    let mut out = String::from(
        "index,t,time_normalized,cam_px,cam_py,cam_pz,cam_qw,cam_qx,cam_qy,cam_qz,rso_qw,rso_qx,rso_qy,rso_qz\n",
    );
    for f in &d.frames {
        let p = f.camera_pose.translation;
        let cq = UnitQuaternion::from_rotation_matrix(&f.camera_pose.rotation);
        let rq = &f.rso_attitude;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            f.index, f.t, f.time_normalized, p.x, p.y, p.z, cq.w, cq.qx, cq.qy, cq.qz,
            rq.w, rq.qx, rq.qy, rq.qz
        )
        .expect("string write");
    }
    out
}

pub fn export_ground_truth(d: &Dataset, path: &Path) -> Result<(), ScenarioError> {
    std::fs::write(path, ground_truth_csv(d))?;
    Ok(())
}

/// Flat key-value config file (TOML syntax). Every key is optional;
/// unset keys take the defaults of [`ScenarioConfig`].
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfigFile {
    pub altitude_km: Option<f64>,
    pub x0: Option<f64>,
    pub tumble_axis: Option<String>,
    pub tumble_rate_deg_s: Option<f64>,
    pub frame_count: Option<usize>,
    /// Seconds, or the keyword "period" for one orbital period.
    pub duration: Option<toml::Value>,
    pub width: Option<u32>,
    pub height: Option<u32>,
    pub fov_deg: Option<f64>,
    pub seed: Option<u64>,
}

/// Parses "x" | "y" | "z" or a comma-separated 3-vector.
pub fn parse_axis(text: &str) -> Result<Vector3<f64>, ScenarioError> {
    match text.trim() {
        "x" => Ok(Vector3::x()),
        "y" => Ok(Vector3::y()),
        "z" => Ok(Vector3::z()),
        other => {
            let parts: Vec<&str> = other.split(',').collect();
            if parts.len() != 3 {
                return Err(ScenarioError::Config(format!(
                    "tumble_axis: expected x|y|z or three comma-separated numbers, got {other:?}"
                )));
            }
            let mut v = [0.0; 3];
            for (i, p) in parts.iter().enumerate() {
                v[i] = p.trim().parse::<f64>().map_err(|_| {
                    ScenarioError::Config(format!("tumble_axis: bad component {:?}", p.trim()))
                })?;
            }
            Ok(Vector3::new(v[0], v[1], v[2]))
        }
    }
}

impl ScenarioConfigFile {
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        toml::from_str(text).map_err(|e| ScenarioError::Config(e.to_string()))
    }

    pub fn resolve(&self) -> Result<ScenarioConfig, ScenarioError> {
        let mut cfg = ScenarioConfig::default();
        if let Some(alt) = self.altitude_km {
            cfg.orbit = OrbitParams::from_altitude_km(alt)
                .map_err(|e| ScenarioError::Config(format!("altitude_km: {e}")))?;
            cfg.duration = cfg.orbit.period();
        }
        if let Some(x0) = self.x0 {
            cfg.x0 = x0;
        }
        let rate = self.tumble_rate_deg_s.unwrap_or(3.0);
        let axis = match &self.tumble_axis {
            Some(a) => parse_axis(a)?,
            None => Vector3::z(),
        };
        cfg.tumble = if rate == 0.0 {
            TumbleProfile::static_profile()
        } else {
            TumbleProfile::single_axis(axis, rate)
                .map_err(|e| ScenarioError::Config(format!("tumble_axis: {e}")))?
        };
        if let Some(fc) = self.frame_count {
            cfg.frame_count = fc;
        }
        match &self.duration {
            None => {}
            Some(toml::Value::String(s)) if s == "period" => cfg.duration = cfg.orbit.period(),
            Some(toml::Value::Float(f)) => cfg.duration = *f,
            Some(toml::Value::Integer(i)) => cfg.duration = *i as f64,
            Some(other) => {
                return Err(ScenarioError::Config(format!(
                    "duration: expected seconds or \"period\", got {other}"
                )))
            }
        }
        let mut intr = cfg.intrinsics;
        if let Some(w) = self.width {
            intr.width = w;
        }
        if let Some(h) = self.height {
            intr.height = h;
        }
        if let Some(fov) = self.fov_deg {
            intr.horizontal_fov = fov.to_radians();
        }
        cfg.intrinsics = CameraIntrinsics::new(intr.width, intr.height, intr.horizontal_fov)?;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
