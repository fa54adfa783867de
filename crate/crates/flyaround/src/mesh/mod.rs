//! Triangle-mesh geometry: I/O, surface sampling, BVH-accelerated signed
//! cloud-to-mesh distances, and alignment.

mod align;
mod bvh;
mod distance;
mod io;
mod sample;
pub mod shapes;

pub use align::{icp_refine, umeyama_align, IcpResult, SimilarityTransform};
pub use bvh::{build_bvh, closest_point_linear_scan, BvhAccel, ClosestHit};
pub use distance::{
    bidirectional_report, c2m_signed, closest_point_triangle, export_heatmap, signed_distances,
    unsigned_distances, BidirectionalReport, CoverageSummary, Pseudonormals, TriangleRegion,
    DEFAULT_MISSING_THRESHOLD_DIAGONAL_FRACTION,
};
pub use io::{load_mesh, load_obj, load_ply, load_ply_points, LoadStats};
pub use sample::{sample_surface, SampledCloud};

use nalgebra::{Point3, Vector3};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("i/o error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at {path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },
    #[error("parse error in {path} at byte offset {offset}: {msg}")]
    BinaryParse { path: String, offset: usize, msg: String },
    #[error("unsupported mesh format: {0}")]
    UnsupportedFormat(String),
    #[error("mesh has no usable triangles")]
    EmptyMesh,
    #[error("triangle index {index} out of range ({vertices} vertices)")]
    IndexOutOfRange { index: u32, vertices: usize },
    #[error("degenerate correspondence set: {0}")]
    RankDeficient(String),
    #[error("{0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Stats(#[from] crate::stats::StatsError),
}

/// Zero-area cutoff for triangle cleaning (m²).
pub const DEGENERATE_AREA_TOL: f64 = 1e-12;

/// Indexed triangle mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    pub vertices: Vec<Point3<f64>>,
    pub triangles: Vec<[u32; 3]>,
    /// Optional per-vertex normals as loaded; not used by distance queries
    /// (those derive pseudonormals from the faces).
    pub normals: Option<Vec<Vector3<f64>>>,
}

impl TriangleMesh {
    /// Validates indices, drops degenerate triangles, and rejects empty
    /// results. Returns the cleaned mesh and the dropped-triangle count.
    pub fn new(
        vertices: Vec<Point3<f64>>,
        triangles: Vec<[u32; 3]>,
    ) -> Result<(Self, usize), MeshError> {
        for tri in &triangles {
            for &i in tri {
                if i as usize >= vertices.len() {
                    return Err(MeshError::IndexOutOfRange { index: i, vertices: vertices.len() });
                }
            }
        }
        let mut mesh = Self { vertices, triangles, normals: None };
        let before = mesh.triangles.len();
        mesh.triangles.retain(|tri| {
            let [a, b, c] = mesh_triangle(&mesh.vertices, tri);
            triangle_area(&a, &b, &c) > DEGENERATE_AREA_TOL
        });
        if mesh.triangles.is_empty() {
            return Err(MeshError::EmptyMesh);
        }
        let dropped = before - mesh.triangles.len();
        Ok((mesh, dropped))
    }

    pub fn triangle_vertices(&self, index: usize) -> [Point3<f64>; 3] {
        mesh_triangle(&self.vertices, &self.triangles[index])
    }

    pub fn triangle_area(&self, index: usize) -> f64 {
        let [a, b, c] = self.triangle_vertices(index);
        triangle_area(&a, &b, &c)
    }

    pub fn triangle_normal(&self, index: usize) -> Vector3<f64> {
        let [a, b, c] = self.triangle_vertices(index);
        (b - a).cross(&(c - a)).normalize()
    }

    pub fn surface_area(&self) -> f64 {
        (0..self.triangles.len()).map(|i| self.triangle_area(i)).sum()
    }

    /// Axis-aligned bounding box (min, max corners).
    pub fn bounding_box(&self) -> (Point3<f64>, Point3<f64>) {
        let mut min = Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut max = Point3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &self.vertices {
            for k in 0..3 {
                min[k] = min[k].min(v[k]);
                max[k] = max[k].max(v[k]);
            }
        }
        (min, max)
    }

    pub fn bounding_box_diagonal(&self) -> f64 {
        let (min, max) = self.bounding_box();
        (max - min).norm()
    }

    pub fn transformed(&self, t: &SimilarityTransform) -> Self {
        Self {
            vertices: self.vertices.iter().map(|p| t.apply(p)).collect(),
            triangles: self.triangles.clone(),
            normals: None,
        }
    }

    pub fn translated(&self, offset: Vector3<f64>) -> Self {
        Self {
            vertices: self.vertices.iter().map(|p| p + offset).collect(),
            triangles: self.triangles.clone(),
            normals: self.normals.clone(),
        }
    }
}

fn mesh_triangle(vertices: &[Point3<f64>], tri: &[u32; 3]) -> [Point3<f64>; 3] {
    [
        vertices[tri[0] as usize],
        vertices[tri[1] as usize],
        vertices[tri[2] as usize],
    ]
}

pub fn triangle_area(a: &Point3<f64>, b: &Point3<f64>, c: &Point3<f64>) -> f64 {
    0.5 * (b - a).cross(&(c - a)).norm()
}
