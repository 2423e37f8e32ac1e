//! Train/test evaluation and relation mining on MovieLens ratings.
//!
//! `cargo run --release --example movielens -- path/to/u.data`
//!
//! Without a path the example fabricates a small file in the same
//! tab-separated layout so the pipeline can still be followed end to end.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kmlearn::data::{load_ml100k, split, SplitConfig};
use kmlearn::interpret::{build_adjacency, influence_scores, mining_accuracy, RaterFilter};
use kmlearn::trainer::{bcd_train, TrainConfig};

fn fabricate() -> std::io::Result<std::path::PathBuf> {
    let path = std::env::temp_dir().join("kmlearn_fake_u.data");
    let mut f = std::fs::File::create(&path)?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for u in 1..=60u32 {
        let taste: f64 = rng.random();
        for i in 1..=80u32 {
            if rng.random::<f64>() < 0.3 {
                let appeal = (i % 7) as f64 / 6.0;
                let r = (1.0 + 4.0 * (0.5 * taste + 0.5 * appeal) + rng.random_range(-0.7..0.7))
                    .round();
                writeln!(f, "{u}\t{i}\t{}\t881250949", r.clamp(1.0, 5.0))?;
            }
        }
    }
    Ok(path)
}

fn main() -> kmlearn::Result<()> {
    let path = match std::env::args().nth(1) {
        Some(p) => p.into(),
        None => fabricate()?,
    };
    let data = split(&load_ml100k(&path)?, &SplitConfig::default())?;
    println!(
        "{} ratings, {} users, {} items from {}",
        data.len(),
        data.users().len(),
        data.items().len(),
        path.display()
    );

    for lambda_u in [0.0, 10.0] {
        let cfg = TrainConfig {
            dim: 8,
            i_bcd: 15,
            lambda_u,
            ..TrainConfig::default()
        };
        let (params, report) = bcd_train(&data, &cfg)?;
        let ev = report.test_evaluation.expect("split has test ratings");
        println!(
            "lambda_u {lambda_u:>4}: train RMSE {:.4}, test NRMSE {:.4} ({} rated, {} without parameters)",
            report.rmse_per_iteration.last().unwrap(),
            ev.rmse,
            ev.evaluated,
            ev.skipped
        );
        if lambda_u == 0.0 {
            let scores = influence_scores(&build_adjacency(&params.psi)?);
            let anchors = scores.values().filter(|&&s| s >= 1.0).count();
            let rows = mining_accuracy(&params, &data, 0.5, RaterFilter::LikersOnly)?;
            println!(
                "  {anchors} items with influence 1, {} accuracy rows",
                rows.len()
            );
            if !rows.is_empty() {
                let mean = rows.iter().map(|r| r.accuracy).sum::<f64>() / rows.len() as f64;
                println!("  mean accuracy {mean:.4}");
            }
            for r in rows.iter().take(5) {
                println!(
                    "    item {:>4}  user {:>4}  rated {:>3}  accuracy {:.2}%",
                    data.items().raw_of(r.item).unwrap(),
                    data.users().raw_of(r.user).unwrap(),
                    r.rated_count,
                    100.0 * r.accuracy
                );
            }
        }
    }
    Ok(())
}
