//! Worst-case expectations over a ball, two ways.
//!
//! The LP route optimizes over the coupling polytope; the superset route
//! evaluates the explicit extreme-point candidates. They agree to solver
//! precision, and the worst-case value grows with the radius.
//!
//! Run with: cargo run --example robust_maximize

use ambiball::extreme_sets::CenterSpec;
use ambiball::metric_space::PointSet;
use ambiball::optimizer::{self, LinearObjective, OptimizerError};
use ambiball::{BallMetric, DiscreteMeasure, FiniteMetricSpace};
use std::sync::Arc;

fn main() -> Result<(), OptimizerError> {
    let space = Arc::new(
        FiniteMetricSpace::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                vec![0.0, 0.4, 0.8],
                vec![0.4, 0.0, 0.5],
                vec![0.8, 0.5, 0.0],
            ],
        )
        .expect("valid metric"),
    );
    let mu = DiscreteMeasure::new(space.clone(), vec![(0, 0.7), (1, 0.3)]).expect("measure");
    // Loss of 0 at a, 1 at b, 3 at c: the adversary pushes mass outward.
    let objective = LinearObjective::new(vec![0.0, 1.0, 3.0]);

    println!(
        "{:>6} {:>12} {:>12} {:>12}",
        "eps", "prokhorov", "superset", "kantorovich"
    );
    let mut previous = f64::NEG_INFINITY;
    for eps in [0.0, 0.1, 0.25, 0.45, 0.7] {
        let center = Arc::new(CenterSpec::from_measure(&mu, eps)?);
        let lp = optimizer::maximize_linear_lp(&center, &objective, BallMetric::Prokhorov)?;
        let superset = optimizer::maximize_linear_superset(
            &center,
            &objective,
            BallMetric::Prokhorov,
            &PointSet::full(&space),
        )?;
        let kant = optimizer::maximize_linear_lp(&center, &objective, BallMetric::Kantorovich)?;
        println!(
            "{eps:>6} {:>12.6} {:>12.6} {:>12.6}",
            lp.value, superset.value, kant.value
        );
        assert!((lp.value - superset.value).abs() <= 1e-9, "methods agree");
        assert!(lp.value >= previous - 1e-12, "monotone in the radius");
        previous = lp.value;
    }

    let center = Arc::new(CenterSpec::from_measure(&mu, 0.25)?);
    let worst = optimizer::maximize_linear_lp(&center, &objective, BallMetric::Prokhorov)?;
    let atoms: Vec<String> = worst
        .argmax
        .atoms()
        .iter()
        .map(|&(p, w)| format!("{}:{w:.3}", space.label(p)))
        .collect();
    println!("worst-case measure at eps = 0.25: {}", atoms.join(" "));
    println!(
        "witness moves {:.3} of mass beyond the radius (budget 0.25)",
        worst.witness.mass_above(center.eps())
    );
    Ok(())
}
