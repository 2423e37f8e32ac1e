//! Dual solve plus Gaussian randomization against brute-force enumeration
//! on small binary quadratic programs.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kmlearn::bqp::{BqpInstance, DualConfig, Method};
use kmlearn::oracles::bqp_exhaustive;
use kmlearn::rounding::{solve_bqp, RoundingConfig};

fn main() -> kmlearn::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut hits = 0;
    let trials = 25;
    for t in 0..trials {
        let d = rng.random_range(3..=10);
        let mut s = DMatrix::zeros(d, d);
        let mut v = DVector::zeros(d);
        for _ in 0..(d + 4) {
            let w = DVector::from_fn(d, |_, _| rng.random::<f64>());
            let th = &w / w.sum();
            let p: f64 = rng.random();
            s += &th * th.transpose();
            v += &th * p;
        }
        let inst = BqpInstance::new(s, v, 0.0)?;
        let rounding = RoundingConfig {
            i_rand: 100,
            seed: t,
        };
        let (psi, state) = solve_bqp(&inst, &DualConfig::default(), Method::EnhancedGd, &rounding)?;
        let oracle = bqp_exhaustive(&inst, false)?;
        let got = inst.objective(&psi);
        let hit = (got - oracle.best_objective).abs() <= 1e-9;
        hits += hit as usize;
        println!(
            "D={d:>2}  dual iters {:>4}  rounded {got:>9.5}  best {:>9.5}  worst {:>9.5}  {}",
            state.iterations,
            oracle.best_objective,
            oracle.worst_objective,
            if hit { "optimal" } else { "" }
        );
    }
    println!("{hits}/{trials} instances solved to optimality");
    Ok(())
}
