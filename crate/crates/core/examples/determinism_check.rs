//! Run the detector with 1..=16 workers and a few band granularities and
//! confirm every intermediate is bit-identical.

use edgeforge::{run_pipeline, GrayImage, PipelineConfig, WorkerConfig};

fn main() -> edgeforge::Result<()> {
    let img = GrayImage::noise(333, 257, 7);
    let base = run_pipeline(
        &img,
        &PipelineConfig::default().with_workers(WorkerConfig::serial()),
    )?;

    let mut runs = 0;
    for granularity in [1, 4, 16, 64] {
        for workers in 1..=16 {
            let cfg =
                PipelineConfig::default().with_workers(WorkerConfig::new(workers, granularity)?);
            let out = run_pipeline(&img, &cfg)?;
            let same = out.blurred.pixels() == base.blurred.pixels()
                && out.thinned.magnitude() == base.thinned.magnitude()
                && out.edges.edges() == base.edges.edges();
            assert!(
                same,
                "divergence at {workers} workers, granularity {granularity}"
            );
            runs += 1;
        }
    }
    println!(
        "{runs} configurations, all bit-identical ({} edge pixels)",
        base.edges.edge_count()
    );
    Ok(())
}
