//! Bounding volume hierarchy for nearest-triangle queries.
//!
//! Binary tree, longest-axis median split, leaves of at most 4 triangles.
//! Closest-point queries prune by box distance against the best candidate
//! found so far, so they return exactly the global nearest triangle point.

use nalgebra::Point3;

use super::distance::{closest_point_triangle_region, TriangleRegion};
use super::TriangleMesh;

pub const LEAF_SIZE: usize = 4;

#[derive(Debug, Clone, Copy)]
struct Aabb {
    min: Point3<f64>,
    max: Point3<f64>,
}

impl Aabb {
    fn empty() -> Self {
        Self {
            min: Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY),
            max: Point3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
        }
    }

    fn grow(&mut self, p: &Point3<f64>) {
        for k in 0..3 {
            self.min[k] = self.min[k].min(p[k]);
            self.max[k] = self.max[k].max(p[k]);
        }
    }

    fn contains(&self, p: &Point3<f64>, tol: f64) -> bool {
        (0..3).all(|k| p[k] >= self.min[k] - tol && p[k] <= self.max[k] + tol)
    }

    /// Squared distance from a point to the box (0 inside).
    fn dist2(&self, p: &Point3<f64>) -> f64 {
        let mut d2 = 0.0;
        for k in 0..3 {
            let d = (self.min[k] - p[k]).max(0.0).max(p[k] - self.max[k]);
            d2 += d * d;
        }
        d2
    }

    fn longest_axis(&self) -> usize {
        let e = self.max - self.min;
        if e.x >= e.y && e.x >= e.z {
            0
        } else if e.y >= e.z {
            1
        } else {
            2
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum NodeKind {
    Internal { left: u32, right: u32 },
    Leaf { first: u32, count: u32 },
}

#[derive(Debug, Clone, Copy)]
struct Node {
    aabb: Aabb,
    kind: NodeKind,
}

/// Acceleration structure over a mesh's triangles. Immutable after
/// construction and shareable across threads.
#[derive(Debug)]
pub struct BvhAccel {
    nodes: Vec<Node>,
    /// Permutation of triangle indices; leaves reference ranges of it.
    order: Vec<u32>,
}

/// Result of a closest-point query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosestHit {
    pub point: Point3<f64>,
    pub distance_squared: f64,
    /// Index into the mesh's triangle list.
    pub triangle: u32,
    pub region: TriangleRegion,
}

pub fn build_bvh(mesh: &TriangleMesh) -> BvhAccel {
    let centroids: Vec<Point3<f64>> = (0..mesh.triangles.len())
        .map(|i| {
            let [a, b, c] = mesh.triangle_vertices(i);
            Point3::from((a.coords + b.coords + c.coords) / 3.0)
        })
        .collect();
    let mut order: Vec<u32> = (0..mesh.triangles.len() as u32).collect();
    let mut nodes = Vec::new();
    let len = order.len();
    build_node(mesh, &centroids, &mut order, 0, len, &mut nodes);
    BvhAccel { nodes, order }
}

fn triangle_aabb(mesh: &TriangleMesh, tri: u32) -> Aabb {
    let mut aabb = Aabb::empty();
    for p in mesh.triangle_vertices(tri as usize) {
        aabb.grow(&p);
    }
    aabb
}

fn build_node(
    mesh: &TriangleMesh,
    centroids: &[Point3<f64>],
    order: &mut [u32],
    first: usize,
    count: usize,
    nodes: &mut Vec<Node>,
) -> u32 {
    let mut aabb = Aabb::empty();
    for &tri in &order[first..first + count] {
        let t = triangle_aabb(mesh, tri);
        aabb.grow(&t.min);
        aabb.grow(&t.max);
    }
    let index = nodes.len() as u32;
    if count <= LEAF_SIZE {
        nodes.push(Node {
            aabb,
            kind: NodeKind::Leaf { first: first as u32, count: count as u32 },
        });
        return index;
    }
    // median split on the longest axis of the centroid bounds
    let mut cbox = Aabb::empty();
    for &tri in &order[first..first + count] {
        cbox.grow(&centroids[tri as usize]);
    }
    let axis = cbox.longest_axis();
    let mid = count / 2;
    order[first..first + count]
        .select_nth_unstable_by(mid, |&a, &b| {
            centroids[a as usize][axis].total_cmp(&centroids[b as usize][axis])
        });
    nodes.push(Node { aabb, kind: NodeKind::Internal { left: 0, right: 0 } });
    let left = build_node(mesh, centroids, order, first, mid, nodes);
    let right = build_node(mesh, centroids, order, first + mid, count - mid, nodes);
    nodes[index as usize].kind = NodeKind::Internal { left, right };
    index
}

impl BvhAccel {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n.kind, NodeKind::Leaf { .. }))
            .count()
    }

    /// Global nearest point on the mesh to `p`.
    pub fn closest_point(&self, mesh: &TriangleMesh, p: &Point3<f64>) -> ClosestHit {
        let mut best = ClosestHit {
            point: *p,
            distance_squared: f64::INFINITY,
            triangle: u32::MAX,
            region: TriangleRegion::Face,
        };
        self.visit(mesh, p, 0, &mut best);
        best
    }

    fn visit(&self, mesh: &TriangleMesh, p: &Point3<f64>, node: u32, best: &mut ClosestHit) {
        let n = &self.nodes[node as usize];
        if n.aabb.dist2(p) >= best.distance_squared {
            return;
        }
        match n.kind {
            NodeKind::Leaf { first, count } => {
                for &tri in &self.order[first as usize..(first + count) as usize] {
                    let [a, b, c] = mesh.triangle_vertices(tri as usize);
                    let (q, region) = closest_point_triangle_region(p, &a, &b, &c);
                    let d2 = (p - q).norm_squared();
                    if d2 < best.distance_squared {
                        *best = ClosestHit { point: q, distance_squared: d2, triangle: tri, region };
                    }
                }
            }
            NodeKind::Internal { left, right } => {
                // nearer child first for tighter pruning
                let dl = self.nodes[left as usize].aabb.dist2(p);
                let dr = self.nodes[right as usize].aabb.dist2(p);
                let (first, second) = if dl <= dr { (left, right) } else { (right, left) };
                self.visit(mesh, p, first, best);
                self.visit(mesh, p, second, best);
            }
        }
    }

    /// Structural sanity: every triangle referenced exactly once, every
    /// node box contains its subtree's triangles.
    pub fn check_invariants(&self, mesh: &TriangleMesh) -> bool {
        let mut seen = vec![false; mesh.triangles.len()];
        for &t in &self.order {
            if seen[t as usize] {
                return false;
            }
            seen[t as usize] = true;
        }
        if !seen.iter().all(|&s| s) {
            return false;
        }
        self.check_node(mesh, 0)
    }

    fn check_node(&self, mesh: &TriangleMesh, node: u32) -> bool {
        let n = &self.nodes[node as usize];
        match n.kind {
            NodeKind::Leaf { first, count } => self.order
                [first as usize..(first + count) as usize]
                .iter()
                .all(|&tri| {
                    mesh.triangle_vertices(tri as usize)
                        .iter()
                        .all(|p| n.aabb.contains(p, 1e-12))
                }),
            NodeKind::Internal { left, right } => {
                for child in [left, right] {
                    let c = &self.nodes[child as usize];
                    if !(0..3).all(|k| {
                        c.aabb.min[k] >= n.aabb.min[k] - 1e-12
                            && c.aabb.max[k] <= n.aabb.max[k] + 1e-12
                    }) {
                        return false;
                    }
                }
                self.check_node(mesh, left) && self.check_node(mesh, right)
            }
        }
    }
}

/// Brute-force nearest point over every triangle. The equivalence oracle
/// for BVH queries.
pub fn closest_point_linear_scan(mesh: &TriangleMesh, p: &Point3<f64>) -> ClosestHit {
    let mut best = ClosestHit {
        point: *p,
        distance_squared: f64::INFINITY,
        triangle: u32::MAX,
        region: TriangleRegion::Face,
    };
    for tri in 0..mesh.triangles.len() {
        let [a, b, c] = mesh.triangle_vertices(tri);
        let (q, region) = closest_point_triangle_region(p, &a, &b, &c);
        let d2 = (p - q).norm_squared();
        if d2 < best.distance_squared {
            best = ClosestHit { point: q, distance_squared: d2, triangle: tri as u32, region };
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{sample_surface, shapes};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_triangle_is_one_leaf() {
        let (mesh, _) = TriangleMesh::new(
            vec![
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(1.0, 0.0, 0.0),
                Point3::new(0.0, 1.0, 0.0),
            ],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let bvh = build_bvh(&mesh);
        assert_eq!(bvh.node_count(), 1);
        assert_eq!(bvh.leaf_count(), 1);
    }

    #[test]
    fn invariants_hold_on_torus() {
        let mesh = shapes::torus(2.0, 0.5, 32, 16);
        let bvh = build_bvh(&mesh);
        assert!(bvh.check_invariants(&mesh));
    }

    #[test]
    fn matches_linear_scan_on_random_queries() {
        let mesh = shapes::uv_sphere(1.0, 24, 24);
        let bvh = build_bvh(&mesh);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let p = Point3::new(
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            );
            let fast = bvh.closest_point(&mesh, &p);
            let slow = closest_point_linear_scan(&mesh, &p);
            assert!(
                (fast.distance_squared.sqrt() - slow.distance_squared.sqrt()).abs() < 1e-12,
                "at {p:?}"
            );
        }
    }

    #[test]
    fn surface_samples_have_zero_distance() {
        let mesh = shapes::unit_cube();
        let bvh = build_bvh(&mesh);
        let cloud = sample_surface(&mesh, 200, 8).unwrap();
        for p in &cloud.points {
            let hit = bvh.closest_point(&mesh, p);
            assert!(hit.distance_squared.sqrt() < 1e-9);
        }
    }
}
