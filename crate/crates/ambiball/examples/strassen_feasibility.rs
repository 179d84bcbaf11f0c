//! Coupling feasibility as a function of the radius.
//!
//! A coupling of two measures certifies d_Pr <= eps when the mass it moves
//! farther than eps is at most eps. Sweeping eps shows the feasibility
//! threshold landing exactly on the Prokhorov distance.
//!
//! Run with: cargo run --example strassen_feasibility

use ambiball::distances::{self, DistanceError};
use ambiball::{DiscreteMeasure, FiniteMetricSpace};
use std::sync::Arc;

fn main() -> Result<(), DistanceError> {
    let space = Arc::new(
        FiniteMetricSpace::new(
            vec!["a".into(), "b".into()],
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
        )
        .expect("valid metric"),
    );
    let mu1 = DiscreteMeasure::dirac(space.clone(), 0);
    let mu2 = DiscreteMeasure::new(space.clone(), vec![(0, 0.7), (1, 0.3)]).expect("measure");

    let dp = distances::prokhorov(&mu1, &mu2)?;
    println!("d_Pr = {dp}");
    println!("{:>6} {:>12} {:>10}", "eps", "excess mass", "feasible");
    for eps in [0.1, 0.2, 0.25, 0.29, 0.3, 0.35, 0.5] {
        let (excess, _) = distances::min_excess_mass(&mu1, &mu2, eps)?;
        let witness = distances::strassen_feasible(&mu1, &mu2, eps)?;
        println!("{eps:>6} {excess:>12.4} {:>10}", witness.is_some());
        assert_eq!(witness.is_some(), eps >= dp - 1e-9);
    }

    // The witness at the threshold moves exactly d_Pr of mass too far.
    let witness = distances::strassen_feasible(&mu1, &mu2, dp)?.expect("feasible at d_Pr");
    println!(
        "witness at eps = {dp}: moves {} beyond the radius",
        witness.mass_above(dp)
    );
    Ok(())
}
