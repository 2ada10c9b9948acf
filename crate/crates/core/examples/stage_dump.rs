//! Walk the pipeline one stage at a time and save every intermediate image.
//!
//! Uses the individual stage functions rather than `run_pipeline`, which is
//! how you would splice a custom stage in.

use edgeforge::image::write_pgm_file;
use edgeforge::{
    build_gaussian_kernel, double_threshold, gaussian_blur, non_max_suppress, sobel, trace_edges,
    GrayImage, Thresholds, WorkerConfig,
};

fn main() -> edgeforge::Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "stages".into());
    std::fs::create_dir_all(&dir).expect("create output directory");

    let img = GrayImage::from_fn(128, 96, |x, y| {
        let ramp = (x + y) as f64;
        if (x / 32 + y / 32) % 2 == 0 {
            40.0 + ramp * 0.2
        } else {
            200.0 - ramp * 0.2
        }
    });
    let cfg = WorkerConfig::with_workers(4)?;

    let blurred = gaussian_blur(&img, &build_gaussian_kernel(1.4)?, &cfg);
    let grad = sobel(&blurred, &cfg);
    let thin = non_max_suppress(&grad, &cfg);
    let t = Thresholds::auto(thin.max_magnitude());
    let labels = double_threshold(&thin, &t);
    let edges = trace_edges(&labels);

    for (name, stage) in [
        ("0_input", img),
        ("1_blurred", blurred),
        ("2_magnitude", grad.magnitude_image()),
        ("3_thinned", thin.to_image()),
        ("4_edges", edges.to_image()),
    ] {
        let path = format!("{dir}/{name}.pgm");
        write_pgm_file(&path, &stage)?;
        println!("{path}");
    }
    let candidates = labels
        .labels()
        .iter()
        .filter(|l| **l != Default::default())
        .count();
    println!(
        "{candidates} candidates above low={:.1}, {} kept after tracing",
        t.low(),
        edges.edge_count()
    );
    Ok(())
}
