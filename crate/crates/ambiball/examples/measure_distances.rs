//! Prokhorov and Kantorovich distances with their certificates.
//!
//! Run with: cargo run --example measure_distances

use ambiball::distances::{self, DistanceError};
use ambiball::{DiscreteMeasure, FiniteMetricSpace};
use std::sync::Arc;

fn main() -> Result<(), DistanceError> {
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
    let mu1 = DiscreteMeasure::new(space.clone(), vec![(0, 0.6), (1, 0.4)]).expect("measure");
    let mu2 = DiscreteMeasure::new(space.clone(), vec![(1, 0.5), (2, 0.5)]).expect("measure");

    // Kantorovich: optimal transport plan plus a dual potential whose
    // pairing reproduces the primal value.
    let (dk, plan) = distances::kantorovich(&mu1, &mu2)?;
    println!("kantorovich = {dk:.6}");
    for &((i, j), w) in plan.atoms() {
        println!(
            "  move {w:.3} from {} to {}",
            space.label(i),
            space.label(j)
        );
    }
    let dual = distances::kantorovich_dual(&mu1, &mu2)?;
    println!(
        "dual value = {:.6}, lipschitz defect = {:.1e}",
        dual.value,
        dual.lipschitz_defect(&space)
    );
    assert!((dual.value - dk).abs() <= 1e-9, "strong duality");

    // Prokhorov: the minimal eps with excess mass at most eps.
    let dp = distances::prokhorov(&mu1, &mu2)?;
    println!("prokhorov = {dp:.6}");
    let (excess, _) = distances::min_excess_mass(&mu1, &mu2, dp)?;
    println!("excess mass at that radius = {excess:.6} (<= radius)");

    // Both are metrics; the triangle inequality holds on any triple.
    let mu3 = DiscreteMeasure::dirac(space.clone(), 2);
    let ab = distances::prokhorov(&mu1, &mu2)?;
    let bc = distances::prokhorov(&mu2, &mu3)?;
    let ac = distances::prokhorov(&mu1, &mu3)?;
    println!("triangle: {ac:.4} <= {ab:.4} + {bc:.4}");
    assert!(ac <= ab + bc + 1e-12);
    Ok(())
}
