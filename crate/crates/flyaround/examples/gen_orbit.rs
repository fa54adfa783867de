//! Propagates the two bounded relative orbits around the chief and writes
//! them as CSV: the planar 2:1 ellipse and the 45°-inclined fly-around.
//!
//!     cargo run --example gen_orbit

use flyaround::hill::{
    bounded_ic, cw_closed_form, drift_constant, inclined_bounded_ic, OrbitParams, Trajectory,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = OrbitParams::leo_default();
    let n = params.mean_motion;
    let period = params.period();
    println!("500 km LEO chief: n = {n:.6e} rad/s, period = {period:.1} s");

    let x0 = 40.0;
    let dt = 10.0;
    let steps = (period / dt).floor() as usize;

    let out_dir = std::path::Path::new("example-output");
    std::fs::create_dir_all(out_dir)?;

    for (name, ic) in [
        ("planar", bounded_ic(x0, n)),
        ("inclined", inclined_bounded_ic(x0, n)),
    ] {
        let samples: Vec<_> = (0..=steps)
            .map(|k| cw_closed_form(&ic, n, k as f64 * dt))
            .collect();
        let max_x = samples.iter().map(|s| s.x.abs()).fold(0.0, f64::max);
        let max_y = samples.iter().map(|s| s.y.abs()).fold(0.0, f64::max);
        let max_z = samples.iter().map(|s| s.z.abs()).fold(0.0, f64::max);
        let drift = samples.iter().map(|s| drift_constant(s, n).abs()).fold(0.0, f64::max);
        println!(
            "{name:>8}: max |x,y,z| = ({max_x:.2}, {max_y:.2}, {max_z:.2}) m, max drift = {drift:.2e} m/s"
        );

        let path = out_dir.join(format!("orbit_{name}.csv"));
        Trajectory { samples, params }.write_csv(&path)?;
        println!("          wrote {}", path.display());
    }
    Ok(())
}
