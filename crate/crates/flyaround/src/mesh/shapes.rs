//! Procedural test/benchmark meshes: cube, UV sphere, torus.
//!
//! All generators produce closed, watertight meshes with shared vertices,
//! outward-facing normals, and no degenerate triangles.

use nalgebra::Point3;

use super::TriangleMesh;
use std::f64::consts::PI;

/// Axis-aligned unit cube centered at the origin (8 vertices, 12
/// triangles).
pub fn unit_cube() -> TriangleMesh {
    cuboid(1.0, 1.0, 1.0)
}

/// Axis-aligned box centered at the origin with the given side lengths.
pub fn cuboid(sx: f64, sy: f64, sz: f64) -> TriangleMesh {
    let (hx, hy, hz) = (0.5 * sx, 0.5 * sy, 0.5 * sz);
    let vertices = vec![
        Point3::new(-hx, -hy, -hz),
        Point3::new(hx, -hy, -hz),
        Point3::new(hx, hy, -hz),
        Point3::new(-hx, hy, -hz),
        Point3::new(-hx, -hy, hz),
        Point3::new(hx, -hy, hz),
        Point3::new(hx, hy, hz),
        Point3::new(-hx, hy, hz),
    ];
    let triangles = vec![
        // -z
        [0, 2, 1],
        [0, 3, 2],
        // +z
        [4, 5, 6],
        [4, 6, 7],
        // -y
        [0, 1, 5],
        [0, 5, 4],
        // +y
        [2, 3, 7],
        [2, 7, 6],
        // -x
        [0, 4, 7],
        [0, 7, 3],
        // +x
        [1, 2, 6],
        [1, 6, 5],
    ];
    TriangleMesh { vertices, triangles, normals: None }
}

/// UV sphere of the given radius centered at the origin.
///
/// `rings` latitude bands and `segments` longitude slices produce
/// `2 * segments * (rings - 1)` triangles.
pub fn uv_sphere(radius: f64, rings: usize, segments: usize) -> TriangleMesh {
    assert!(rings >= 2 && segments >= 3);
    let mut vertices = Vec::with_capacity((rings - 1) * segments + 2);
    vertices.push(Point3::new(0.0, 0.0, radius)); // north pole
    for i in 1..rings {
        let theta = PI * i as f64 / rings as f64;
        let (st, ct) = theta.sin_cos();
        for j in 0..segments {
            let phi = 2.0 * PI * j as f64 / segments as f64;
            let (sp, cp) = phi.sin_cos();
            vertices.push(Point3::new(radius * st * cp, radius * st * sp, radius * ct));
        }
    }
    let south = vertices.len() as u32;
    vertices.push(Point3::new(0.0, 0.0, -radius));

    let ring_start = |i: usize| (1 + (i - 1) * segments) as u32;
    let mut triangles = Vec::new();
    // pole caps
    for j in 0..segments as u32 {
        let jn = (j + 1) % segments as u32;
        triangles.push([0, ring_start(1) + j, ring_start(1) + jn]);
        let last = ring_start(rings - 1);
        triangles.push([south, last + jn, last + j]);
    }
    // bands
    for i in 1..rings - 1 {
        let a = ring_start(i);
        let b = ring_start(i + 1);
        for j in 0..segments as u32 {
            let jn = (j + 1) % segments as u32;
            triangles.push([a + j, b + j, b + jn]);
            triangles.push([a + j, b + jn, a + jn]);
        }
    }
    TriangleMesh { vertices, triangles, normals: None }
}

/// Torus around the z-axis with major radius `major` and tube radius
/// `minor`; `nu` segments around the main ring, `nv` around the tube.
pub fn torus(major: f64, minor: f64, nu: usize, nv: usize) -> TriangleMesh {
    assert!(nu >= 3 && nv >= 3 && major > minor);
    let mut vertices = Vec::with_capacity(nu * nv);
    for i in 0..nu {
        let u = 2.0 * PI * i as f64 / nu as f64;
        let (su, cu) = u.sin_cos();
        for j in 0..nv {
            let v = 2.0 * PI * j as f64 / nv as f64;
            let (sv, cv) = v.sin_cos();
            let r = major + minor * cv;
            vertices.push(Point3::new(r * cu, r * su, minor * sv));
        }
    }
    let idx = |i: usize, j: usize| (i % nu * nv + j % nv) as u32;
    let mut triangles = Vec::with_capacity(2 * nu * nv);
    for i in 0..nu {
        for j in 0..nv {
            triangles.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
            triangles.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    TriangleMesh { vertices, triangles, normals: None }
}
