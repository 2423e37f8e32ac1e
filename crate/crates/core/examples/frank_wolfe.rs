//! The user block: a quadratic over the probability simplex solved by
//! Frank-Wolfe, checked against face enumeration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kmlearn::lcqp::{build_lcqp, duality_gap, solve_fw, FwConfig};
use kmlearn::model::{IndicatorVector, SimplexVector};
use kmlearn::oracles::lcqp_faces;

fn main() -> kmlearn::Result<()> {
    let d = 4;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let psis: Vec<IndicatorVector> = (0..9)
        .map(|_| IndicatorVector::new((0..d).map(|_| rng.random()).collect()))
        .collect();
    let ps: Vec<f64> = (0..9).map(|_| rng.random()).collect();
    let refs: Vec<&IndicatorVector> = psis.iter().collect();
    let inst = build_lcqp(&refs, &ps)?;

    for polish in [false, true] {
        let cfg = FwConfig {
            polish,
            ..FwConfig::default()
        };
        let out = solve_fw(&inst, &cfg, &SimplexVector::uniform(d)?)?;
        println!(
            "polish={polish:<5} iterations {:>3}  objective {:.10}  gap {:.2e}  theta {:?}",
            out.iterations,
            inst.objective(out.theta.as_slice()),
            duality_gap(&inst, out.theta.as_slice()),
            out.theta
                .as_slice()
                .iter()
                .map(|x| format!("{x:.4}"))
                .collect::<Vec<_>>()
        );
    }
    let (theta, best) = lcqp_faces(&inst)?;
    println!("face enumeration: objective {best:.10} at {theta:.4?}");
    Ok(())
}
