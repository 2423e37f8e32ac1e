//! Two users, two items, four genres: predict the missing rating and read
//! off the implied relation, then learn a model for the same data from
//! scratch.

use std::collections::BTreeMap;

use kmlearn::interpret::implied_relations;
use kmlearn::model::{training_rmse, IndicatorVector, KmParams, RatingDataset, SimplexVector};
use kmlearn::trainer::{bcd_train, TrainConfig};

fn main() -> kmlearn::Result<()> {
    // p(1,1)=0.8, p(1,2)=0.4, p(2,2)=0.6; p(2,1) is unknown
    let data = RatingDataset::from_triples([(1, 1, 0.8), (1, 2, 0.4), (2, 2, 0.6)], 1.0)?;

    let theta = BTreeMap::from([
        (0, SimplexVector::new(vec![0.4, 0.2, 0.1, 0.3])?),
        (1, SimplexVector::new(vec![0.1, 0.3, 0.1, 0.5])?),
    ]);
    let psi = BTreeMap::from([
        (0, IndicatorVector::from_binary(&[1, 0, 1, 1])?),
        (1, IndicatorVector::from_binary(&[0, 0, 1, 1])?),
    ]);
    let given = KmParams::new(4, theta, psi)?;
    println!(
        "given parameters: training RMSE {:.3e}",
        training_rmse(&given, &data)?
    );
    println!("predicted p(2,1) = {:.4}", given.predict_one(1, 0).unwrap());
    if let Some(rel) = implied_relations(&given.psi, 0, 1)? {
        println!(
            "liking item {} implies liking item {}; disliking item {} implies disliking item {}",
            rel.forward.0 + 1,
            rel.forward.1 + 1,
            rel.backward.0 + 1,
            rel.backward.1 + 1
        );
    }

    let cfg = TrainConfig {
        dim: 4,
        i_bcd: 10,
        ..TrainConfig::default()
    };
    let (learned, report) = bcd_train(&data, &cfg)?;
    println!(
        "learned from scratch: training RMSE per iteration {:?}",
        report.rmse_per_iteration
    );
    for (i, p) in &learned.psi {
        println!("  psi_{} = {:?}", i + 1, p.to_f64());
    }
    println!(
        "  learned p(2,1) = {:.4}",
        learned.predict_one(1, 0).unwrap()
    );
    Ok(())
}
