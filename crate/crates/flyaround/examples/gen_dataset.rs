//! Builds the default fly-around camera dataset — 200 frames over one
//! orbital period at x0 = 40 m with a 3 deg/s z-axis tumble — and exports
//! the novel-view-synthesis files.
//!
//!     cargo run --example gen_dataset

use flyaround::scenario::{build_scenario, export_ground_truth, export_transforms, ScenarioConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = ScenarioConfig::default();
    println!(
        "{} frames over {:.1} s, x0 = {} m, tumble {:?} deg/s",
        config.frame_count,
        config.duration,
        config.x0,
        config.tumble.spins().iter().map(|s| s.rate_deg_s).collect::<Vec<_>>()
    );

    let dataset = build_scenario(&config)?;
    let first = &dataset.frames[0];
    println!(
        "frame 0: camera at ({:.2}, {:.2}, {:.2}) m looking {:?}",
        first.camera_pose.translation.x,
        first.camera_pose.translation.y,
        first.camera_pose.translation.z,
        first.camera_pose.look_direction().map(|v| (v * 1e3).round() / 1e3),
    );

    let out_dir = std::path::Path::new("example-output/dataset");
    std::fs::create_dir_all(out_dir)?;
    export_transforms(&dataset, &out_dir.join("transforms.json"))?;
    export_ground_truth(&dataset, &out_dir.join("ground_truth.csv"))?;
    println!("wrote {}/transforms.json and ground_truth.csv", out_dir.display());
    Ok(())
}
