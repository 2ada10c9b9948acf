//! Score a few 1-D edge filters on detection (SNR), localization and
//! spacing of spurious maxima (minimal response).

use edgeforge::criteria::{
    localization_criterion, minimal_response_criterion, snr_criterion, EdgeModel, Filter1D,
    LocalizationDensity, DEFAULT_SAMPLES,
};

type Candidate = (&'static str, f64, fn(f64) -> f64);

fn main() -> edgeforge::Result<()> {
    let model = EdgeModel::new(1.0, 1.0)?;
    let filters: [Candidate; 4] = [
        ("box (difference of boxes)", 1.0, |x| {
            if x < 0.0 {
                -1.0
            } else if x > 0.0 {
                1.0
            } else {
                0.0
            }
        }),
        ("first derivative of Gaussian", 3.0, |x| {
            -x * (-x * x / 2.0).exp()
        }),
        ("sine, one period", std::f64::consts::PI, f64::sin),
        ("ramp", 1.0, |x| x),
    ];

    println!("{:<30} {:>10} {:>18}", "filter", "snr", "minimal response");
    for (name, support, f) in filters {
        let filter = Filter1D::from_fn(support, DEFAULT_SAMPLES, f)?;
        let snr = snr_criterion(&filter, &model)?;
        let mr = match minimal_response_criterion(&filter) {
            Ok(v) => format!("{v:.5}"),
            Err(_) => "n/a".to_string(),
        };
        println!("{name:<30} {snr:>10.5} {mr:>18}");
    }

    // Localization from a displacement density; a unit-variance uniform
    // density scores exactly 1, a tighter Gaussian scores higher.
    let t = 3f64.sqrt();
    let uniform = LocalizationDensity::normalized_from_fn(t, DEFAULT_SAMPLES, |_| 1.0)?;
    let tight =
        LocalizationDensity::normalized_from_fn(2.0, DEFAULT_SAMPLES, |y| (-y * y / 0.08).exp())?;
    println!(
        "localization, uniform on [-sqrt3, sqrt3]: {:.5}",
        localization_criterion(&uniform)?
    );
    println!(
        "localization, gaussian sd 0.2:            {:.5}",
        localization_criterion(&tight)?
    );
    Ok(())
}
