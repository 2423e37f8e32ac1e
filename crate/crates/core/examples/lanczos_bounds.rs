//! Thresholded Lanczos on the dual matrix `C(u*)` of a binary subproblem:
//! Ritz values, their error bounds against the dense spectrum, and the
//! trace-based threshold for a few values of `a`.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kmlearn::bqp::{build_bqp, lift, solve_enhanced_gd, DualConfig};
use kmlearn::eigen::{exact_evd, ritz_error_bounds, thresholded_lanczos};
use kmlearn::model::SimplexVector;

fn main() -> kmlearn::Result<()> {
    let d = 40;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let thetas: Vec<SimplexVector> = (0..20)
        .map(|_| {
            let w: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
            let s: f64 = w.iter().sum();
            SimplexVector::new(w.iter().map(|x| x / s).collect())
        })
        .collect::<Result<_, _>>()?;
    let ps: Vec<f64> = (0..20).map(|_| rng.random()).collect();
    let refs: Vec<&SimplexVector> = thetas.iter().collect();
    let lifted = lift(&build_bqp(&refs, &ps)?)?;
    let state = solve_enhanced_gd(
        &lifted,
        &DualConfig::default(),
        &DVector::from_element(d + 1, 1.0),
    )?;
    let c = lifted.c_matrix(&state.u);
    let exact = exact_evd(&c)?;
    println!(
        "C(u*) is {}x{}, largest eigenvalues {:.5?}",
        d + 1,
        d + 1,
        &exact.values.as_slice()[..3]
    );

    for a in [1.0, 10.0, 100.0] {
        let run = thresholded_lanczos(&c, a)?;
        let t = run.threshold;
        let fac = &run.factorization;
        let bounds = ritz_error_bounds(fac, &run.pairs);
        println!(
            "a = {a:>5}: delta {:.3e}, m = {:>2}, beta_(m+1) = {:.3e}, cap {:.3e}",
            t.delta,
            fac.m(),
            fac.beta_next,
            t.beta_cap(fac.m())
        );
        for (k, &theta) in run.pairs.values.iter().take(3).enumerate() {
            let nearest = exact
                .values
                .iter()
                .map(|l| (l - theta).abs())
                .fold(f64::INFINITY, f64::min);
            let v = run.pairs.vectors.column(k);
            let residual = (&c * v - v * theta).norm();
            println!(
                "    ritz {theta:>9.5}  residual {residual:.2e}  nearest error {nearest:.2e}  bound {:.2e}",
                bounds.min_error_bounds[k]
            );
        }
    }
    let t = thresholded_lanczos(&c, 1.0)?.threshold;
    println!(
        "trace estimates: sigma_lb {:.5}, sigma_ub {:.5}, minkowski {:.5}",
        t.sigma_lb, t.sigma_ub, t.sigma_mink
    );
    Ok(())
}
