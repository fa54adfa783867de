//! Area-uniform surface sampling.

use nalgebra::Point3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{MeshError, TriangleMesh};

/// Points drawn from a mesh surface, tagged with their source triangle
/// and the seed that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCloud {
    pub points: Vec<Point3<f64>>,
    pub source_triangle: Vec<u32>,
    pub seed: u64,
}

/// Draws `n` points area-uniformly from the mesh surface: triangle chosen
/// proportional to area (CDF binary search), position by uniform
/// barycentric sampling. Deterministic per seed.
pub fn sample_surface(mesh: &TriangleMesh, n: usize, seed: u64) -> Result<SampledCloud, MeshError> {
    if n == 0 {
        return Err(MeshError::InvalidArgument("sample count must be >= 1".into()));
    }
    let mut cdf = Vec::with_capacity(mesh.triangles.len());
    let mut acc = 0.0;
    for i in 0..mesh.triangles.len() {
        acc += mesh.triangle_area(i);
        cdf.push(acc);
    }
    let total = acc;
    if !(total > 0.0) {
        return Err(MeshError::EmptyMesh);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n);
    let mut source_triangle = Vec::with_capacity(n);
    for _ in 0..n {
        let target = rng.gen::<f64>() * total;
        let idx = cdf.partition_point(|&c| c <= target).min(cdf.len() - 1);
        let [a, b, c] = mesh.triangle_vertices(idx);
        // uniform barycentric via the sqrt trick
        let (r1, r2): (f64, f64) = (rng.gen(), rng.gen());
        let s = r1.sqrt();
        let (u, v) = (1.0 - s, s * (1.0 - r2));
        let w = 1.0 - u - v;
        points.push(Point3::from(a.coords * u + b.coords * v + c.coords * w));
        source_triangle.push(idx as u32);
    }
    Ok(SampledCloud { points, source_triangle, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{closest_point_triangle, shapes};

    #[test]
    fn cube_face_counts_are_balanced() {
        // six equal faces, two triangles each: ~1000 samples per face
        let cube = shapes::unit_cube();
        let cloud = sample_surface(&cube, 6000, 3).unwrap();
        let mut per_face = [0usize; 6];
        for &t in &cloud.source_triangle {
            per_face[t as usize / 2] += 1;
        }
        for (face, &count) in per_face.iter().enumerate() {
            assert!((800..=1200).contains(&count), "face {face}: {count}");
        }
    }

    #[test]
    fn single_sample_lies_on_mesh() {
        let cube = shapes::unit_cube();
        let cloud = sample_surface(&cube, 1, 99).unwrap();
        assert_eq!(cloud.points.len(), 1);
        let tri = cloud.source_triangle[0] as usize;
        let [a, b, c] = cube.triangle_vertices(tri);
        let (_, d2) = closest_point_triangle(&cloud.points[0], &a, &b, &c);
        assert!(d2.sqrt() < 1e-9);
    }

    #[test]
    fn same_seed_same_cloud() {
        let sphere = shapes::uv_sphere(1.0, 16, 16);
        let a = sample_surface(&sphere, 500, 1234).unwrap();
        let b = sample_surface(&sphere, 500, 1234).unwrap();
        assert_eq!(a, b);
        let c = sample_surface(&sphere, 500, 1235).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_samples_rejected() {
        assert!(sample_surface(&shapes::unit_cube(), 0, 0).is_err());
    }

    #[test]
    fn every_point_on_its_source_triangle() {
        let torus = shapes::torus(2.0, 0.5, 24, 12);
        let cloud = sample_surface(&torus, 2000, 7).unwrap();
        for (p, &t) in cloud.points.iter().zip(&cloud.source_triangle) {
            let [a, b, c] = torus.triangle_vertices(t as usize);
            let (_, d2) = closest_point_triangle(p, &a, &b, &c);
            assert!(d2.sqrt() < 1e-9);
        }
    }
}
