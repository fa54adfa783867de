//! PSNR/SSIM over a synthetic rendered-vs-ground-truth pair set: the
//! "renders" are the ground truth plus increasing Gaussian noise, so the
//! metric ordering is visible at a glance.
//!
//!     cargo run --example eval_images

use flyaround::metrics::{batch_eval, ImageBuffer};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn gradient(width: u32, height: u32) -> ImageBuffer {
    let data = (0..height)
        .flat_map(|y| (0..width).map(move |x| ((x * 5 + y * 11) % 256) as u8))
        .collect();
    ImageBuffer::new(width, height, 1, data).unwrap()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out_dir = std::path::Path::new("example-output");
    let rendered = out_dir.join("rendered");
    let gt = out_dir.join("gt");
    std::fs::create_dir_all(&rendered)?;
    std::fs::create_dir_all(&gt)?;

    let base = gradient(128, 128);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (i, sigma) in [0.0, 2.0, 8.0, 25.0].iter().enumerate() {
        let name = format!("frame_{i:02}.png");
        base.save_png(&gt.join(&name))?;
        let noise = Normal::new(0.0, *sigma).unwrap();
        let data = base
            .data
            .iter()
            .map(|&v| (v as f64 + noise.sample(&mut rng)).round().clamp(0.0, 255.0) as u8)
            .collect();
        ImageBuffer::new(base.width, base.height, 1, data)?.save_png(&rendered.join(&name))?;
    }

    let report = batch_eval(&rendered, &gt)?;
    print!("{}", report.to_csv());
    if let Some(mean) = report.mean_psnr_db {
        println!(
            "# mean PSNR {mean:.2} dB over finite rows ({} identical pair(s) excluded)",
            report.infinite_psnr_rows
        );
    }
    Ok(())
}
