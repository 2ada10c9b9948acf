//! Detect edges in a PGM file, or in a generated test card when no path is given.
//!
//! ```text
//! cargo run --release --example detect_edges -- input.pgm edges.pgm
//! ```

use edgeforge::image::{read_pgm_file, write_pgm_file};
use edgeforge::{run_pipeline, GrayImage, PipelineConfig};

fn test_card() -> GrayImage {
    GrayImage::from_fn(160, 120, |x, y| {
        let (dx, dy) = (x as f64 - 100.0, y as f64 - 60.0);
        if dx * dx + dy * dy < 900.0 {
            210.0
        } else if x < 50 && y > 20 && y < 100 {
            150.0
        } else {
            30.0
        }
    })
}

fn main() -> edgeforge::Result<()> {
    let mut args = std::env::args().skip(1);
    let img = match args.next() {
        Some(path) => read_pgm_file(path)?,
        None => test_card(),
    };
    let out_path = args.next().unwrap_or_else(|| "edges.pgm".into());

    let cfg = PipelineConfig::default();
    let out = run_pipeline(&img, &cfg)?;
    let t = out.thresholds.expect("image has gradients");
    println!(
        "{}x{} image, {} workers, thresholds low={:.1} high={:.1}",
        img.width(),
        img.height(),
        cfg.workers.workers(),
        t.low(),
        t.high()
    );
    println!("{} edge pixels", out.edges.edge_count());
    write_pgm_file(&out_path, &out.edges.to_image())?;
    println!("wrote {out_path}");
    Ok(())
}
