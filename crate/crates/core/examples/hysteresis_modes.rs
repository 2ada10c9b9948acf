//! Serial breadth-first tracing versus band-parallel union-find tracing:
//! same edge set, different scaling behaviour.

use std::time::Instant;

use edgeforge::{
    run_pipeline, trace_edges, trace_edges_parallel, GrayImage, HysteresisMode, PipelineConfig,
    WorkerConfig,
};

fn main() -> edgeforge::Result<()> {
    let img = GrayImage::noise(1024, 1024, 3);
    let cfg = PipelineConfig {
        hysteresis: HysteresisMode::Parallel,
        ..PipelineConfig::default()
    };
    let out = run_pipeline(&img, &cfg)?;
    let labels = &out.edges;

    let start = Instant::now();
    let serial = trace_edges(labels);
    println!(
        "serial BFS:        {:>8.2} ms",
        start.elapsed().as_secs_f64() * 1e3
    );

    for workers in [1, 2, 4, 8] {
        let wc = WorkerConfig::with_workers(workers)?;
        let start = Instant::now();
        let par = trace_edges_parallel(labels, &wc);
        let ms = start.elapsed().as_secs_f64() * 1e3;
        assert_eq!(par.edges(), serial.edges());
        println!("union-find, {workers} wk: {ms:>8.2} ms");
    }
    println!("{} edge pixels in both", serial.edge_count());
    Ok(())
}
