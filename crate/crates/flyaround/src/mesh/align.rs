//! Point-set alignment: least-squares similarity fitting and ICP
//! refinement against a reference mesh.

use nalgebra::{Matrix3, Point3, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bvh::BvhAccel;
use super::{MeshError, TriangleMesh};
use crate::hill::RotationMatrix3;

/// Uniform-scale rigid transform `p ↦ s·R·p + t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityTransform {
    pub scale: f64,
    pub rotation: RotationMatrix3,
    pub translation: Vector3<f64>,
}

impl SimilarityTransform {
    pub fn identity() -> Self {
        Self { scale: 1.0, rotation: RotationMatrix3::identity(), translation: Vector3::zeros() }
    }

    pub fn apply(&self, p: &Point3<f64>) -> Point3<f64> {
        Point3::from(self.scale * (self.rotation.matrix() * p.coords) + self.translation)
    }
}

/// Least-squares similarity (or rigid, when `with_scale` is false)
/// aligning `src` onto `dst`, minimizing Σ‖dst − (sR·src + t)‖².
///
/// Requires at least 3 non-collinear correspondences.
pub fn umeyama_align(
    src: &[Point3<f64>],
    dst: &[Point3<f64>],
    with_scale: bool,
) -> Result<SimilarityTransform, MeshError> {
    if src.len() != dst.len() {
        return Err(MeshError::InvalidArgument(format!(
            "correspondence length mismatch: {} vs {}",
            src.len(),
            dst.len()
        )));
    }
    if src.len() < 3 {
        return Err(MeshError::RankDeficient(format!(
            "need at least 3 correspondences, got {}",
            src.len()
        )));
    }
    let n = src.len() as f64;
    let mean_src: Vector3<f64> = src.iter().map(|p| p.coords).sum::<Vector3<f64>>() / n;
    let mean_dst: Vector3<f64> = dst.iter().map(|p| p.coords).sum::<Vector3<f64>>() / n;

    let mut cov = Matrix3::zeros();
    let mut var_src = 0.0;
    for (s, d) in src.iter().zip(dst) {
        let sc = s.coords - mean_src;
        let dc = d.coords - mean_dst;
        cov += dc * sc.transpose();
        var_src += sc.norm_squared();
    }
    cov /= n;
    var_src /= n;

    let svd = cov.svd(true, true);
    let u = svd.u.ok_or_else(|| MeshError::RankDeficient("SVD failed".into()))?;
    let v_t = svd.v_t.ok_or_else(|| MeshError::RankDeficient("SVD failed".into()))?;
    let sigma = svd.singular_values;
    // collinear inputs leave the rotation about the line unconstrained
    if sigma[1] <= 1e-12 * sigma[0].max(1e-300) {
        return Err(MeshError::RankDeficient("correspondences are collinear".into()));
    }

    let mut d_fix = Vector3::new(1.0, 1.0, 1.0);
    if (u * v_t).determinant() < 0.0 {
        d_fix.z = -1.0;
    }
    let rotation_m = u * Matrix3::from_diagonal(&d_fix) * v_t;
    let rotation = RotationMatrix3::from_matrix(rotation_m)
        .ok_or_else(|| MeshError::RankDeficient("degenerate rotation estimate".into()))?;

    let scale = if with_scale {
        let trace_ds = sigma.dot(&d_fix);
        if var_src <= 0.0 {
            return Err(MeshError::RankDeficient("zero-variance source points".into()));
        }
        trace_ds / var_src
    } else {
        1.0
    };
    let translation = mean_dst - scale * (rotation_m * mean_src);
    Ok(SimilarityTransform { scale, rotation, translation })
}

#[derive(Debug, Clone)]
pub struct IcpResult {
    pub transform: SimilarityTransform,
    /// Trimmed RMS after each iteration.
    pub rms_history: Vec<f64>,
    pub iterations: usize,
}

pub const ICP_CONVERGENCE_TOL: f64 = 1e-9;

/// Iterative closest point against a reference mesh.
///
/// Each iteration matches the transformed source points to their nearest
/// mesh points via the BVH, keeps the best `1 - trim_fraction` pairs, and
/// re-estimates a rigid update by the least-squares fit above. The scale
/// of `init` is preserved. Stops when the trimmed RMS change drops below
/// 1e-9 or after `max_iters` iterations; RMS is non-increasing.
pub fn icp_refine(
    src: &[Point3<f64>],
    reference: &TriangleMesh,
    accel: &BvhAccel,
    init: SimilarityTransform,
    max_iters: usize,
    trim_fraction: f64,
) -> Result<IcpResult, MeshError> {
    if !(0.0..0.5).contains(&trim_fraction) {
        return Err(MeshError::InvalidArgument(format!(
            "trim_fraction must be in [0, 0.5), got {trim_fraction}"
        )));
    }
    // bake the (fixed) scale into the working copy of the source
    let scaled: Vec<Point3<f64>> = src.iter().map(|p| Point3::from(init.scale * p.coords)).collect();
    let mut current = SimilarityTransform {
        scale: 1.0,
        rotation: init.rotation,
        translation: init.translation,
    };
    let keep = (((1.0 - trim_fraction) * scaled.len() as f64).round() as usize)
        .clamp(1, scaled.len());
    let mut rms_history = Vec::new();
    let mut prev_rms = f64::INFINITY;

    for _ in 0..max_iters {
        let transformed: Vec<Point3<f64>> = scaled.iter().map(|p| current.apply(p)).collect();
        let mut pairs: Vec<(f64, Point3<f64>, Point3<f64>)> = transformed
            .par_iter()
            .zip(scaled.par_iter())
            .map(|(t, s)| {
                let hit = accel.closest_point(reference, t);
                (hit.distance_squared, *s, hit.point)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        pairs.truncate(keep);
        let rms = (pairs.iter().map(|p| p.0).sum::<f64>() / keep as f64).sqrt();
        rms_history.push(rms);
        if rms < 1e-12 || prev_rms - rms < ICP_CONVERGENCE_TOL {
            break;
        }
        prev_rms = rms;

        let src_kept: Vec<Point3<f64>> = pairs.iter().map(|p| p.1).collect();
        let dst_kept: Vec<Point3<f64>> = pairs.iter().map(|p| p.2).collect();
        current = umeyama_align(&src_kept, &dst_kept, false)?;
    }

    Ok(IcpResult {
        transform: SimilarityTransform {
            scale: init.scale,
            rotation: current.rotation,
            translation: current.translation,
        },
        iterations: rms_history.len(),
        rms_history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hill::euler_dcm;
    use crate::mesh::{build_bvh, sample_surface, shapes};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_points(n: usize, seed: u64) -> Vec<Point3<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                Point3::new(
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                )
            })
            .collect()
    }

    #[test]
    fn identity_when_already_aligned() {
        let pts = random_points(50, 1);
        let t = umeyama_align(&pts, &pts, true).unwrap();
        assert!((t.scale - 1.0).abs() < 1e-12);
        assert!((t.rotation.matrix() - Matrix3::identity()).abs().max() < 1e-12);
        assert!(t.translation.norm() < 1e-12);
    }

    #[test]
    fn recovers_known_similarity() {
        let src = random_points(100, 2);
        let truth = SimilarityTransform {
            scale: 1.7,
            rotation: euler_dcm(0.4, -0.9, 1.3),
            translation: Vector3::new(0.3, -2.0, 5.5),
        };
        let dst: Vec<Point3<f64>> = src.iter().map(|p| truth.apply(p)).collect();
        let t = umeyama_align(&src, &dst, true).unwrap();
        assert!((t.scale - truth.scale).abs() < 1e-9);
        assert!((t.rotation.matrix() - truth.rotation.matrix()).abs().max() < 1e-9);
        assert!((t.translation - truth.translation).norm() < 1e-9);
    }

    #[test]
    fn rigid_mode_fixes_scale() {
        let src = random_points(60, 3);
        let dst: Vec<Point3<f64>> = src
            .iter()
            .map(|p| Point3::from(2.0 * p.coords + Vector3::new(1.0, 0.0, 0.0)))
            .collect();
        let t = umeyama_align(&src, &dst, false).unwrap();
        assert_eq!(t.scale, 1.0);
    }

    #[test]
    fn noisy_correspondences_small_residual() {
        use rand_distr::{Distribution, Normal};
        let src = random_points(500, 4);
        let truth = SimilarityTransform {
            scale: 1.0,
            rotation: euler_dcm(0.1, 0.2, -0.3),
            translation: Vector3::new(0.5, 0.5, -0.5),
        };
        let sigma = 1e-3;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let noise = Normal::new(0.0, sigma).unwrap();
        let dst: Vec<Point3<f64>> = src
            .iter()
            .map(|p| {
                let q = truth.apply(p);
                Point3::new(
                    q.x + noise.sample(&mut rng),
                    q.y + noise.sample(&mut rng),
                    q.z + noise.sample(&mut rng),
                )
            })
            .collect();
        let t = umeyama_align(&src, &dst, false).unwrap();
        let rms = (src
            .iter()
            .zip(&dst)
            .map(|(s, d)| (d - t.apply(s)).norm_squared())
            .sum::<f64>()
            / src.len() as f64)
            .sqrt();
        assert!(rms <= 3.0 * sigma * 3f64.sqrt(), "rms = {rms}");
    }

    #[test]
    fn collinear_points_rejected() {
        let src: Vec<Point3<f64>> = (0..10).map(|i| Point3::new(i as f64, 0.0, 0.0)).collect();
        assert!(matches!(
            umeyama_align(&src, &src, true),
            Err(MeshError::RankDeficient(_))
        ));
    }

    #[test]
    fn icp_already_aligned_returns_init() {
        let mesh = shapes::uv_sphere(1.0, 24, 24);
        let bvh = build_bvh(&mesh);
        let cloud = sample_surface(&mesh, 500, 6).unwrap();
        let result = icp_refine(
            &cloud.points,
            &mesh,
            &bvh,
            SimilarityTransform::identity(),
            20,
            0.0,
        )
        .unwrap();
        assert_eq!(result.iterations, 1);
        assert!((result.transform.scale - 1.0).abs() < 1e-9);
        assert!(result.transform.translation.norm() < 1e-9);
    }

    #[test]
    fn icp_recovers_small_translation() {
        let mesh = shapes::uv_sphere(1.0, 48, 48);
        let bvh = build_bvh(&mesh);
        let cloud = sample_surface(&mesh, 3000, 7).unwrap();
        let offset = Vector3::new(0.05, 0.0, 0.0);
        let shifted: Vec<Point3<f64>> = cloud.points.iter().map(|p| p + offset).collect();
        let result = icp_refine(
            &shifted,
            &mesh,
            &bvh,
            SimilarityTransform::identity(),
            50,
            0.1,
        )
        .unwrap();
        assert!(
            (result.transform.translation + offset).norm() < 1e-4,
            "recovered {:?}",
            result.transform.translation
        );
        for w in result.rms_history.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "rms increased: {:?}", result.rms_history);
        }
    }

    #[test]
    fn icp_rejects_bad_trim() {
        let mesh = shapes::unit_cube();
        let bvh = build_bvh(&mesh);
        let pts = random_points(10, 8);
        assert!(icp_refine(&pts, &mesh, &bvh, SimilarityTransform::identity(), 5, 0.9).is_err());
    }
}
