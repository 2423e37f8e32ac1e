//! Plain vs enhanced gradient descent on one regularized dual: same iterates,
//! fewer eigendecompositions.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kmlearn::bqp::{build_bqp, lift, solve_enhanced_gd, solve_gd, DualConfig};
use kmlearn::model::SimplexVector;

fn main() -> kmlearn::Result<()> {
    let d = 12;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let thetas: Vec<SimplexVector> = (0..30)
        .map(|_| {
            let w: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
            let s: f64 = w.iter().sum();
            SimplexVector::new(w.iter().map(|x| x / s).collect())
        })
        .collect::<Result<_, _>>()?;
    let ps: Vec<f64> = (0..30).map(|_| rng.random()).collect();
    let refs: Vec<&SimplexVector> = thetas.iter().collect();
    let lifted = lift(&build_bqp(&refs, &ps)?)?;

    let cfg = DualConfig {
        record_log: true,
        ..DualConfig::default()
    };
    let u0 = DVector::from_element(d + 1, 1.0);
    let plain = solve_gd(&lifted, &cfg, &u0)?;
    let enhanced = solve_enhanced_gd(&lifted, &cfg, &u0)?;

    println!("             iterations  eigensolves  h_gamma");
    println!(
        "plain        {:>10}  {:>11}  {:.10}",
        plain.iterations, plain.eigensolves, plain.h
    );
    println!(
        "enhanced     {:>10}  {:>11}  {:.10}",
        enhanced.iterations, enhanced.eigensolves, enhanced.h
    );
    let gap = (&plain.u - &enhanced.u).amax();
    println!("max |u_plain - u_enhanced| = {gap:.2e}");
    let c = enhanced.phase_counts;
    println!(
        "phases: IA {} IB {} IIA {} IIB {}",
        c.ia, c.ib, c.iia, c.iib
    );

    println!("\nfirst iterations of the enhanced run:");
    let mut csv = Vec::new();
    enhanced.write_log_csv(&mut csv)?;
    for line in String::from_utf8_lossy(&csv).lines().take(8) {
        println!("  {line}");
    }
    Ok(())
}
