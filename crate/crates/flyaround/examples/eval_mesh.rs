//! Signed cloud-to-mesh evaluation of a deliberately damaged
//! reconstruction: a sphere whose small detached component is missing.
//! Shows both distance directions, the coverage (missing-part) summary,
//! and the heatmap export.
//!
//!     cargo run --release --example eval_mesh

use flyaround::mesh::{bidirectional_report, export_heatmap, shapes, TriangleMesh};
use nalgebra::Vector3;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // reference = body + small instrument; reconstruction lost the instrument
    let body = shapes::uv_sphere(1.0, 48, 48);
    let instrument = shapes::uv_sphere(0.23, 24, 24).translated(Vector3::new(1.8, 0.0, 0.0));

    let mut vertices = body.vertices.clone();
    let mut triangles = body.triangles.clone();
    let base = vertices.len() as u32;
    vertices.extend(instrument.vertices.iter().copied());
    triangles.extend(instrument.triangles.iter().map(|t| [t[0] + base, t[1] + base, t[2] + base]));
    let (reference, _) = TriangleMesh::new(vertices, triangles)?;
    let recon = body;

    let report = bidirectional_report(&recon, &reference, 50_000, None, 42)?;
    for direction in [&report.recon_to_ref, &report.ref_to_recon] {
        let s = &direction.stats;
        println!(
            "{}: mean {:.3e} m, rms {:.3e} m, range [{:.3e}, {:.3e}] m",
            direction.direction, s.mean, s.rms, s.min, s.max
        );
    }
    let c = &report.coverage;
    println!(
        "coverage: {:.1}% of reference samples farther than {:.3} m from the reconstruction",
        100.0 * c.missing_fraction,
        c.missing_threshold
    );
    println!(
        "(instrument is {:.1}% of the reference area)",
        100.0 * instrument.surface_area() / reference.surface_area()
    );

    let out_dir = std::path::Path::new("example-output");
    std::fs::create_dir_all(out_dir)?;
    let path = out_dir.join("heatmap.ply");
    export_heatmap(&report.ref_cloud.points, &report.ref_to_recon.signed_distances, &path)?;
    println!("wrote {} (blue = inside, white = on-surface, red = outside/missing)", path.display());
    Ok(())
}
