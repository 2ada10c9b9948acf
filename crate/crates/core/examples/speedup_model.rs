//! Asymmetric multicore speedup: one fast core built from `r` base-core
//! resources plus `n - r` base cores, with fast-core performance sqrt(r).
//!
//! Prints the best fast-core size for each parallel fraction and chip budget.

use edgeforge::criteria::{amdahl_speedup, asymmetric_speedup, PerfModel, SpeedupModel};

fn main() -> edgeforge::Result<()> {
    let budgets = [16u32, 64, 256];
    println!(
        "{:>6} {:>6} {:>8} {:>10} {:>10}",
        "f", "n", "best r", "speedup", "symmetric"
    );
    for f in [0.5, 0.9, 0.975, 0.99, 0.999] {
        for n in budgets {
            let mut best = (1, 0.0);
            for r in 1..=n {
                let s = asymmetric_speedup(&SpeedupModel::new(f, n, r)?);
                if s > best.1 {
                    best = (r, s);
                }
            }
            let symmetric = amdahl_speedup(f, f64::from(n));
            println!(
                "{f:>6} {n:>6} {:>8} {:>10.3} {:>10.3}",
                best.0, best.1, symmetric
            );
        }
    }

    // Other performance laws plug in through PerfModel.
    let linear = SpeedupModel::with_perf(0.9, 64, 16, PerfModel::Power(1.0))?;
    println!(
        "f=0.9 n=64 r=16 with perf(r)=r: {:.3}",
        asymmetric_speedup(&linear)
    );
    Ok(())
}
