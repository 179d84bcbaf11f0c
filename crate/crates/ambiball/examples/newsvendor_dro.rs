//! Distributionally robust newsvendor from demand samples.
//!
//! Demand history becomes an empirical center; the ambiguity set is the
//! Prokhorov ball around it. For a fixed order quantity the expected cost
//! is linear in the demand distribution, so the worst case over the ball
//! is one LP solve; sweeping the order quantity gives the robust order.
//!
//! Run with: cargo run --example newsvendor_dro

use ambiball::extreme_sets::CenterSpec;
use ambiball::metric_space::{FiniteMetricSpace, PointMetric, PointSet};
use ambiball::optimizer::{self, LinearObjective, OptimizerError};
use ambiball::BallMetric;
use std::sync::Arc;

const UNIT_COST: f64 = 1.0;
const PRICE: f64 = 3.0;

fn cost(order: f64, demand: f64) -> f64 {
    UNIT_COST * order - PRICE * order.min(demand)
}

fn main() -> Result<(), OptimizerError> {
    // Demand levels 0..4, distances scaled into [0,1] so a Prokhorov
    // radius mixes metric perturbation and mass reallocation sensibly.
    let levels = [0.0, 1.0, 2.0, 3.0, 4.0];
    let space = Arc::new(
        FiniteMetricSpace::from_points(
            &levels.iter().map(|&d| vec![d / 4.0]).collect::<Vec<_>>(),
            PointMetric::Euclidean,
            Some(levels.iter().map(|d| format!("d{d}")).collect()),
        )
        .expect("valid metric"),
    );

    // Observed demands: indices into the level list, with repeats.
    let samples = [1, 2, 2, 3, 2, 1, 4, 2];
    let center = Arc::new(optimizer::empirical_center(&samples, space.clone(), 0.2)?);
    let atoms: Vec<String> = center
        .measure()
        .atoms()
        .iter()
        .map(|&(p, w)| format!("{}:{w:.3}", space.label(p)))
        .collect();
    println!(
        "empirical center from {} samples: {}",
        samples.len(),
        atoms.join(" ")
    );

    println!(
        "{:>8} {:>16} {:>16}",
        "order", "empirical cost", "worst-case cost"
    );
    let mut best: Option<(f64, f64)> = None;
    for order in &levels {
        let per_level: Vec<f64> = levels.iter().map(|&d| cost(*order, d)).collect();
        let objective = LinearObjective::new(per_level);
        let empirical = objective.integral(&center.measure());
        let worst = optimizer::maximize_linear_lp(&center, &objective, BallMetric::Prokhorov)?;
        println!("{order:>8} {empirical:>16.4} {:>16.4}", worst.value);
        if best.is_none_or(|(_, v)| worst.value < v) {
            best = Some((*order, worst.value));
        }
    }
    let (robust_order, robust_cost) = best.expect("nonempty sweep");
    println!("robust order = {robust_order} (worst-case cost {robust_cost:.4})");

    // The same worst case through the generic convex route: expected cost
    // is linear, hence convex, in the measure.
    let check_order = robust_order;
    let per_level: Vec<f64> = levels.iter().map(|&d| cost(check_order, d)).collect();
    let convex = optimizer::maximize_convex(
        &Arc::new(CenterSpec::from_measure(&center.measure(), center.eps())?),
        |mu: &ambiball::DiscreteMeasure| mu.atoms().iter().map(|&(p, w)| w * per_level[p]).sum(),
        true,
        BallMetric::Prokhorov,
        &PointSet::full(&space),
    )?;
    println!(
        "convex-route check at order {check_order}: {:.4} (heuristic: {})",
        convex.value, convex.heuristic
    );
    assert!((convex.value - robust_cost).abs() <= 1e-9);
    Ok(())
}
