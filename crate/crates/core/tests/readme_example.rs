//! The README's library quick start, kept compiling and passing.

use cpmap::fixedpoint::{fixed_point_space, verify_fixed_equals_commutant};
use cpmap::presets::phase_damping;
use cpmap::structure::anchor_projections;
use cpmap::Tolerance;

#[test]
fn readme_quick_start() -> cpmap::Result<()> {
    let tol = Tolerance::default();
    let ch = phase_damping(0.75)?; // unital, trace-preserving qubit channel

    let fixed = fixed_point_space(&ch, &tol)?;
    assert_eq!(fixed.dim(), 2); // the diagonal algebra

    let report = verify_fixed_equals_commutant(&ch, &tol)?;
    assert!(report.equal && report.multiplicatively_closed);

    let dec = anchor_projections(&ch, 0, &tol)?;
    assert_eq!(dec.anchor_dims, vec![1, 1]); // two rank-1 summands
    Ok(())
}
