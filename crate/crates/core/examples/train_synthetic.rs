//! Full training run on a 20-user, 40-item grid of uniform random
//! probabilities, then a round trip through the model file.
//!
//! `cargo run --release --example train_synthetic -- [dim] [iterations]`

use kmlearn::data::{generate_synthetic, SyntheticConfig};
use kmlearn::persist::StoredModel;
use kmlearn::trainer::{bcd_train, TrainConfig};

fn main() -> kmlearn::Result<()> {
    let mut args = std::env::args().skip(1);
    let dim = args.next().and_then(|s| s.parse().ok()).unwrap_or(8);
    let i_bcd = args.next().and_then(|s| s.parse().ok()).unwrap_or(10);

    let data = generate_synthetic(&SyntheticConfig::default())?;
    let cfg = TrainConfig {
        dim,
        i_bcd,
        ..TrainConfig::default()
    };
    let (params, report) = bcd_train(&data, &cfg)?;

    for (k, r) in report.rmse_per_iteration.iter().enumerate() {
        println!("iteration {:>2}: training RMSE {r:.5}", k + 1);
    }
    let h = report.phase_histogram;
    println!(
        "BQP {:.3}s, LCQP {:.3}s, dual iterations {}, eigensolves {}",
        report.wall_time_bqp, report.wall_time_lcqp, report.dual_iterations, report.eigensolves
    );
    println!(
        "phases: IA {} IB {} IIA {} IIB {}",
        h.ia, h.ib, h.iia, h.iib
    );

    let stored = StoredModel::from_params(&params, data.users(), data.items())?;
    let path = std::env::temp_dir().join("kmlearn_synthetic_model.json");
    stored.save(&path)?;
    let back = StoredModel::load(&path)?;
    println!(
        "model file {} ({} users, {} items), p(1,1) = {:.4}",
        path.display(),
        back.theta.len(),
        back.psi.len(),
        back.predict_raw(1, 1).unwrap()
    );
    Ok(())
}
