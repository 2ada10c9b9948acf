//! Acceptance suite. Every test prints one `[PASS]`/`[FAIL]` line, written
//! straight to the process stderr so it survives output capture.

mod common;

use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::sync::{Mutex, MutexGuard};

use edgeforge::bench::{
    run_benchmark, run_benchmark_with, BenchOptions, SyntheticMode, SyntheticTarget,
};
use edgeforge::criteria::{
    amdahl_speedup, asymmetric_speedup, fit_parallel_fraction, localization_criterion,
    minimal_response_criterion, snr_criterion, EdgeModel, Filter1D, LocalizationDensity,
    SpeedupModel,
};
use edgeforge::pipeline::stage;
use edgeforge::{
    build_gaussian_kernel, double_threshold, gaussian_blur, non_max_suppress, save_pgm, sobel,
    trace_edges, trace_edges_parallel, EdgeMap, GrayImage, HysteresisMode, PipelineConfig,
    Thresholds, WorkerConfig,
};
use rand::Rng;

fn report(n: u32, pass: bool, detail: impl AsRef<str>) {
    let tag = if pass { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "[{tag}] criterion {n}: {}", detail.as_ref());
}

/// Held by every test so timing measurements never overlap other work.
static EXCLUSIVE: Mutex<()> = Mutex::new(());

fn exclusive() -> MutexGuard<'static, ()> {
    EXCLUSIVE.lock().unwrap_or_else(|e| e.into_inner())
}

fn cores() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

// ---------------------------------------------------------------------------

fn fixtures() -> Vec<(String, GrayImage)> {
    let mut v = Vec::new();
    for (w, h) in [(1, 1), (2, 3), (7, 5), (33, 17), (64, 64)] {
        v.push((format!("constant {w}x{h}"), GrayImage::filled(w, h, 93.0)));
    }
    for (w, h) in [(3, 1), (16, 16), (65, 40), (128, 97), (256, 256)] {
        v.push((
            format!("step {w}x{h}"),
            GrayImage::from_fn(w, h, |x, _| if 2 * x < w { 20.0 } else { 230.0 }),
        ));
    }
    for (w, h) in [(48, 48), (200, 31), (300, 300)] {
        v.push((
            format!("disk {w}x{h}"),
            GrayImage::from_fn(w, h, |x, y| {
                let (dx, dy) = (x as f64 - w as f64 / 2.0, y as f64 - h as f64 / 2.0);
                if dx * dx + dy * dy < (w.min(h) as f64 / 3.0).powi(2) {
                    200.0
                } else {
                    40.0
                }
            }),
        ));
    }
    for (i, (w, h)) in [
        (1, 9),
        (9, 1),
        (31, 31),
        (100, 60),
        (257, 129),
        (400, 333),
        (512, 512),
    ]
    .into_iter()
    .enumerate()
    {
        v.push((
            format!("noise {w}x{h}"),
            GrayImage::noise(w, h, 1000 + i as u64),
        ));
    }
    assert_eq!(v.len(), 20);
    v
}

fn detect(input: &Path, output: &Path, workers: usize, extra: &[&str]) {
    let status = Command::new(env!("CARGO_BIN_EXE_edgeforge"))
        .args(["detect", "--in"])
        .arg(input)
        .arg("--out")
        .arg(output)
        .args(["--workers", &workers.to_string()])
        .args(extra)
        .env_remove("EDGEFORGE_WORKERS")
        .output()
        .unwrap();
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
}

#[test]
fn criterion_1_detect_is_byte_identical_across_workers() {
    let _guard = exclusive();
    let dir = tempfile::tempdir().unwrap();
    let mut mismatches = Vec::new();
    for (i, (name, img)) in fixtures().iter().enumerate() {
        let input = dir.path().join(format!("in{i}.pgm"));
        std::fs::write(&input, save_pgm(img).unwrap()).unwrap();
        // Fine granularity on every other fixture so small images still split.
        let extra: &[&str] = if i % 2 == 0 {
            &[]
        } else {
            &["--granularity", "1"]
        };
        let mut first: Option<Vec<u8>> = None;
        for workers in [1, 2, 4, 8] {
            let out = dir.path().join(format!("out{i}_{workers}.pgm"));
            detect(&input, &out, workers, extra);
            let bytes = std::fs::read(&out).unwrap();
            match &first {
                None => first = Some(bytes),
                Some(b) if *b != bytes => mismatches.push(format!("{name} @ {workers} workers")),
                _ => {}
            }
        }
    }
    let pass = mismatches.is_empty();
    report(
        1,
        pass,
        format!(
            "20 fixtures x workers {{1,2,4,8}}: {} mismatches {mismatches:?}",
            mismatches.len()
        ),
    );
    assert!(pass);
}

// ---------------------------------------------------------------------------

#[test]
fn criterion_2_stages_match_scalar_references() {
    let _guard = exclusive();
    let mut rng = common::rng(2);
    let mut failures: Vec<String> = Vec::new();
    let mut worst_blur = 0.0f64;
    for case in 0..1000 {
        let cfg = WorkerConfig::new(rng.random_range(1..=8), rng.random_range(1..=3)).unwrap();

        let float_img = common::random_float_image(&mut rng, 16);
        let sigma = rng.random_range(0.3..2.5);
        let k = build_gaussian_kernel(sigma).unwrap();
        let blurred = gaussian_blur(&float_img, &k, &cfg);
        let want = common::blur_2d(&float_img, &common::gaussian_weights(sigma));
        for (a, b) in blurred.pixels().iter().zip(&want) {
            worst_blur = worst_blur.max((a - b).abs());
        }

        let img = common::random_int_image(&mut rng, 16);
        let (w, h) = (img.width(), img.height());
        let g = sobel(&img, &cfg);
        let r = common::sobel(&img);
        if g.gx() != &r.gx[..]
            || g.gy() != &r.gy[..]
            || g.magnitude() != &r.magnitude[..]
            || g.orientation() != &r.orientation[..]
        {
            failures.push(format!("sobel case {case}"));
        }

        let thin = non_max_suppress(&g, &cfg);
        if thin.magnitude() != &common::nms(w, h, &r.magnitude, &r.orientation)[..] {
            failures.push(format!("nms case {case}"));
        }

        let max = thin.max_magnitude();
        let high = rng.random_range(0.0..=max.max(1.0));
        let low = rng.random_range(0.0..=high);
        let map = double_threshold(&thin, &Thresholds::new(low, high).unwrap());
        if map.labels() != &common::threshold(thin.magnitude(), low, high)[..] {
            failures.push(format!("double_threshold case {case}"));
        }

        let traced = trace_edges_parallel(&map, &cfg);
        if traced.edges() != &common::trace(w, h, map.labels())[..] {
            failures.push(format!("trace_edges_parallel case {case}"));
        }
    }
    let pass = failures.is_empty() && worst_blur <= 1e-9;
    report(
        2,
        pass,
        format!(
            "1000 random images <=16x16: worst blur deviation {worst_blur:.3e} (<= 1e-9), exact-stage mismatches {}",
            failures.len()
        ),
    );
    assert!(pass, "{failures:?}");
}

// ---------------------------------------------------------------------------

fn snr_ramp(n: usize) -> f64 {
    let f = Filter1D::from_fn(1.0, n, |x| x).unwrap();
    snr_criterion(&f, &EdgeModel::new(1.0, 1.0).unwrap()).unwrap()
}

fn localization_uniform(n: usize) -> f64 {
    let t = 3f64.sqrt();
    let d = LocalizationDensity::new(t, vec![1.0 / (2.0 * t); n]).unwrap();
    localization_criterion(&d).unwrap()
}

fn minimal_response_sin(n: usize) -> f64 {
    let f = Filter1D::from_fn(std::f64::consts::PI, n, f64::sin).unwrap();
    minimal_response_criterion(&f).unwrap()
}

#[test]
fn criterion_3_criteria_closed_forms() {
    let _guard = exclusive();
    use std::f64::consts::PI;
    let unit = EdgeModel::new(1.0, 1.0).unwrap();
    let snr_box = snr_criterion(&Filter1D::from_fn(2.0, 2001, |_| 1.0).unwrap(), &unit).unwrap();
    let loc = localization_uniform(2001);
    let mr = minimal_response_sin(2001);

    // Nested grids (n -> 2n - 1 halves the spacing); error must at least halve.
    // ramp filter f(x) = x on [-1, 1]: (1/2) / sqrt(2/3)
    let snr_exact = 0.5 / (2.0f64 / 3.0).sqrt();
    let mut orders = Vec::new();
    let mut converges = true;
    for (label, exact, eval) in [
        ("snr(ramp)", snr_exact, snr_ramp as fn(usize) -> f64),
        ("localization(uniform)", 1.0, localization_uniform),
        ("minimal_response(sin)", 2.0 * PI, minimal_response_sin),
    ] {
        let mut n = 51;
        while n < 3300 {
            let (e1, e2) = ((eval(n) - exact).abs(), (eval(2 * n - 1) - exact).abs());
            converges &= e2 <= e1 / 2.0;
            orders.push(format!("{label} n={n}: {:.2}", e1 / e2));
            n = 2 * n - 1;
        }
    }

    let pass = (snr_box - 1.0).abs() <= 1e-4
        && (loc - 1.0).abs() <= 1e-4
        && (mr - 2.0 * PI).abs() <= 1e-3
        && converges;
    report(
        3,
        pass,
        format!(
            "snr(box)={snr_box:.8} loc(uniform)={loc:.8} min_resp(sin)={mr:.8} (2pi={:.8}); error halves per doubling: {converges}",
            2.0 * PI
        ),
    );
    assert!(pass, "{orders:#?}");
}

// ---------------------------------------------------------------------------

#[test]
fn criterion_4_asymmetric_speedup_model() {
    let _guard = exclusive();
    let s = asymmetric_speedup(&SpeedupModel::new(0.9, 8, 1).unwrap());
    // 1 / (0.1 + 0.9/8) = 80/17, printed to six figures as 4.70588.
    let value_ok = (s - 80.0 / 17.0).abs() <= 1e-9 && format!("{:.5}", s) == "4.70588";

    let mut exact_ok = true;
    for n in 1..=256u32 {
        exact_ok &= asymmetric_speedup(&SpeedupModel::new(1.0, n, 1).unwrap()) == f64::from(n);
    }

    let mut mono_ok = true;
    let fs: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
    for n in [1u32, 2, 4, 8, 16, 32, 64, 128, 256] {
        let mut r = 1;
        while r <= n {
            let mut prev = 0.0;
            for &f in &fs {
                let v = asymmetric_speedup(&SpeedupModel::new(f, n, r).unwrap());
                mono_ok &= v >= prev;
                prev = v;
            }
            r *= 2;
        }
    }
    for &f in &fs {
        for r in [1u32, 2, 4, 16] {
            let mut prev = 0.0;
            for n in r..=256 {
                let v = asymmetric_speedup(&SpeedupModel::new(f, n, r).unwrap());
                mono_ok &= v >= prev;
                prev = v;
            }
        }
    }

    let pass = value_ok && exact_ok && mono_ok;
    report(
        4,
        pass,
        format!(
            "S(0.9,8,1)={s:.9}; S(1,n,1)==n for n<=256: {exact_ok}; monotone in f and n: {mono_ok}"
        ),
    );
    assert!(pass);
}

// ---------------------------------------------------------------------------

#[test]
fn criterion_5_scaling_smoke_test() {
    let _guard = exclusive();
    let img = GrayImage::noise(2048, 2048, 5);
    let cfg = PipelineConfig::default();
    let host = cores();
    if host >= 4 {
        let report_ = run_benchmark(&img, &[1, 2, 4], 3, &cfg).unwrap();
        let s4 = report_.speedup(stage::PIPELINE, 4).unwrap().speedup;
        let eg = report_.speedup(stage::GAUSSIAN, 4).unwrap().evenness;
        let es = report_.speedup(stage::SOBEL, 4).unwrap().evenness;
        let pass = s4 >= 1.8 && eg <= 1.5 && es <= 1.5;
        report(
            5,
            pass,
            format!("{host} cores, 2048x2048: speedup@4={s4:.3} (>=1.8), evenness gaussian={eg:.3} sobel={es:.3} (<=1.5)"),
        );
        assert!(pass);
    } else {
        let report_ = run_benchmark(&img, &[1, 2], 3, &cfg).unwrap();
        let s2 = report_.speedup(stage::PIPELINE, 2).unwrap().speedup;
        let pass = s2 > 1.0;
        report(
            5,
            pass,
            format!(
                "{host} core(s) (<4, ordering check), 2048x2048: speedup@2={s2:.3} (must exceed 1)"
            ),
        );
        assert!(pass);
    }
}

// ---------------------------------------------------------------------------

#[test]
fn criterion_6_parallel_fraction_structure() {
    let _guard = exclusive();
    let img = GrayImage::noise(1024, 1024, 6);
    let counts = [1, 2, 4];
    let fit = |mode| {
        let cfg = PipelineConfig {
            hysteresis: mode,
            ..PipelineConfig::default()
        };
        run_benchmark(&img, &counts, 3, &cfg)
            .unwrap()
            .fitted_parallel_fraction
            .unwrap()
    };
    let f_serial = fit(HysteresisMode::Serial);
    let f_parallel = fit(HysteresisMode::Parallel);

    let mut synth_err = 0.0f64;
    for f in [0.0, 0.25, 0.5, 0.8, 0.95, 1.0] {
        let pts: Vec<(usize, f64)> = [1, 2, 4, 8, 16]
            .iter()
            .map(|&w| (w, 1.0 / amdahl_speedup(f, w as f64)))
            .collect();
        synth_err = synth_err.max((fit_parallel_fraction(&pts).unwrap() - f).abs());
    }
    let mut harness = SyntheticTarget::amdahl(
        std::time::Duration::from_millis(50),
        0.8,
        SyntheticMode::Inject,
    );
    let harness_f = run_benchmark_with(&mut harness, &BenchOptions::new(vec![1, 2, 4, 8], 3))
        .unwrap()
        .fitted_parallel_fraction
        .unwrap();
    synth_err = synth_err.max((harness_f - 0.8).abs());

    let pass = f_serial < f_parallel && synth_err <= 1e-3;
    report(
        6,
        pass,
        format!(
            "{} core(s): f(serial hysteresis)={f_serial:.4} < f(parallel hysteresis)={f_parallel:.4}: {}; synthetic recovery max error {synth_err:.2e} (<= 1e-3)",
            cores(),
            f_serial < f_parallel
        ),
    );
    assert!(pass);
}

// ---------------------------------------------------------------------------

#[test]
fn criterion_7_hysteresis_correctness() {
    let _guard = exclusive();
    let mut rng = common::rng(7);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let (w, h) = (rng.random_range(1..=64), rng.random_range(1..=64));
        let map = EdgeMap::from_labels(w, h, common::random_labels(&mut rng, w, h));
        let serial = trace_edges(&map);
        for workers in [2, 4, 8] {
            let cfg = WorkerConfig::new(workers, rng.random_range(1..=4)).unwrap();
            if trace_edges_parallel(&map, &cfg).edges() != serial.edges() {
                mismatches += 1;
            }
        }
    }

    let mut violations = 0;
    for _ in 0..200 {
        let img = common::random_int_image(&mut rng, 32);
        let cfg = WorkerConfig::serial();
        let thin = non_max_suppress(&sobel(&img, &cfg), &cfg);
        let max = thin.max_magnitude().max(1.0);
        let low = rng.random_range(0.0..max);
        let high = rng.random_range(low..=max);
        let base = trace_edges(&double_threshold(
            &thin,
            &Thresholds::new(low, high).unwrap(),
        ));
        let low2 = rng.random_range(low..=high);
        let high2 = rng.random_range(high..=max + 1.0);
        for t in [(low2, high), (low, high2), (low2, high2)] {
            let raised = trace_edges(&double_threshold(
                &thin,
                &Thresholds::new(t.0, t.1).unwrap(),
            ));
            if raised
                .edges()
                .iter()
                .zip(base.edges())
                .any(|(&r, &b)| r && !b)
            {
                violations += 1;
            }
        }
    }

    let pass = mismatches == 0 && violations == 0;
    report(
        7,
        pass,
        format!("1000 label maps x workers {{2,4,8}}: {mismatches} mismatches; 200 fields: {violations} monotonicity violations"),
    );
    assert!(pass);
}
