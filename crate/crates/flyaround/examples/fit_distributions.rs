//! Distribution fitting over signed cloud-to-mesh distances: histogram
//! plus Gaussian and Weibull maximum-likelihood fits, the overlays used
//! on distance histograms.
//!
//!     cargo run --release --example fit_distributions

use flyaround::mesh::{bidirectional_report, shapes};
use flyaround::stats::{fit_gaussian, fit_weibull, histogram};
use nalgebra::Vector3;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // reconstruction = reference shifted 5 mm: a small systematic error
    let reference = shapes::uv_sphere(1.0, 48, 48);
    let recon = reference.translated(Vector3::new(0.005, 0.0, 0.0));

    let report = bidirectional_report(&recon, &reference, 50_000, None, 3)?;
    let d = &report.recon_to_ref.signed_distances;

    let g = fit_gaussian(d)?;
    println!("gaussian fit: mu = {:.4e} m, sigma = {:.4e} m", g.mu, g.sigma);

    let unsigned: Vec<f64> = d.iter().map(|v| v.abs()).collect();
    let w = fit_weibull(&unsigned)?;
    println!("weibull fit (on |d|): k = {:.3}, lambda = {:.4e} m", w.shape, w.scale);

    let h = histogram(d, 16)?;
    let peak = *h.counts.iter().max().unwrap() as f64;
    println!("\nsigned-distance histogram:");
    for (i, &count) in h.counts.iter().enumerate() {
        let bar = "#".repeat((40.0 * count as f64 / peak).round() as usize);
        println!("[{:+.4e}, {:+.4e}) {bar}", h.edges[i], h.edges[i + 1]);
    }
    Ok(())
}
