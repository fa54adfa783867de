//! Relative-motion scenario generation and 3D reconstruction evaluation.
//!
//! This crate covers two sides of an imaging campaign around a tumbling
//! resident space object (RSO):
//!
//! * **Generation** — Clohessy–Wiltshire relative dynamics ([`hill`]),
//!   tumble attitude profiles ([`attitude`]), and camera datasets ready
//!   for novel-view-synthesis pipelines ([`scenario`]).
//! * **Evaluation** — signed cloud-to-mesh distances with BVH acceleration,
//!   alignment, and distribution fits ([`mesh`], [`stats`]), plus
//!   full-reference image metrics ([`metrics`]).
//!
//! Each major capability has a runnable example under `examples/`; the
//! `flyaround` binary exposes the same operations as subcommands.

pub mod attitude;
pub mod cli;
pub mod hill;
pub mod mesh;
pub mod metrics;
pub mod scenario;
pub mod stats;

pub use hill::{OrbitParams, RelativeState, RotationMatrix3, Trajectory};
pub use attitude::{TumbleProfile, UnitQuaternion};
pub use scenario::{CameraIntrinsics, Dataset, FrameRecord, ScenarioConfig};
pub use mesh::{BvhAccel, SampledCloud, SimilarityTransform, TriangleMesh};
pub use stats::DistanceReport;
