//! Bessel identity suite (Wronskian, recurrence, derivative vs finite
//! difference) as an integration test against the public API.

use growup_core::specfun::{bessel_j, bessel_j_prime, BesselOrder};
use growup_core::verify::Recipe;

#[test]
fn identity_recipe_passes() {
    let report = Recipe::BesselIdentities.run();
    assert!(report.pass, "{}", report.summary_line());
}

#[test]
fn j_prime_from_recurrence() {
    // J'_ν = J_{ν−1} − (ν/x) J_ν
    for nu in [1.0, 1.5, 2.0] {
        let (o, om) = (BesselOrder::new(nu).unwrap(), BesselOrder::new(nu - 1.0).unwrap());
        for x in [0.3, 2.0, 11.0, 40.0] {
            let lhs = bessel_j_prime(o, x).unwrap();
            let rhs = bessel_j(om, x).unwrap() - nu / x * bessel_j(o, x).unwrap();
            assert!((lhs - rhs).abs() < 1e-12, "nu={nu} x={x}");
        }
    }
}
