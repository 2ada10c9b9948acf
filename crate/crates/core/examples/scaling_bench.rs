//! Time each pipeline stage across worker counts on seeded noise and print
//! the speedup table, fitted parallel fraction and the CSV report.
//!
//! ```text
//! cargo run --release --example scaling_bench -- 1024 1,2,4,8
//! ```

use edgeforge::bench::run_benchmark;
use edgeforge::{GrayImage, PipelineConfig};

fn main() -> edgeforge::Result<()> {
    let mut args = std::env::args().skip(1);
    let side: usize = args.next().map_or(512, |s| s.parse().expect("image side"));
    let counts: Vec<usize> = args
        .next()
        .map(|s| {
            s.split(',')
                .map(|w| w.parse().expect("worker count"))
                .collect()
        })
        .unwrap_or_else(|| vec![1, 2, 4]);

    let img = GrayImage::noise(side, side, 42);
    let report = run_benchmark(&img, &counts, 5, &PipelineConfig::default())?;

    println!(
        "{:<14} {:>7} {:>12} {:>8} {:>9}",
        "stage", "workers", "median ms", "speedup", "evenness"
    );
    for s in &report.speedups {
        println!(
            "{:<14} {:>7} {:>12.3} {:>8.3} {:>9.3}",
            s.stage,
            s.workers,
            s.median_ns / 1e6,
            s.speedup,
            s.evenness
        );
    }
    match report.fitted_parallel_fraction {
        Some(f) => println!("fitted parallel fraction: {f:.4}"),
        None => println!("fitted parallel fraction: n/a (single worker count)"),
    }
    std::fs::write("scaling.csv", report.to_csv()).expect("write scaling.csv");
    println!("full report in scaling.csv");
    Ok(())
}
