//! Small tour: build bodies, evaluate functionals, estimate a geominimal
//! surface area, and run one inequality suite.

use geokit_core::bodies::{make_ball, make_ellipsoid};
use geokit_core::functionals::{mixed_p_affine, p_mixed_volume, PExponent};
use geokit_core::geominimal::{estimate_g, SearchConfig};
use geokit_core::harness::{fuzz_suite, HarnessConfig, RuleId};
use geokit_core::sphere::SphereGrid;
use geokit_core::SmoothBody;

fn main() -> geokit_core::Result<()> {
    let grid = SphereGrid::<f64>::for_dim(2, 256, None)?;
    let ball = make_ball(&grid, 1.0)?;
    let ellipse = make_ellipsoid(&grid, &[2.0, 0.0, 0.0, 1.0])?;
    let p = PExponent::new(2.0, 2)?;

    let v = p_mixed_volume(&ellipse, ball.support(), &p)?;
    println!("V_p(E, B) = {} (err {:.2e})", v.value, v.err);

    let pair: Vec<&SmoothBody> = vec![&ellipse, &ellipse];
    let asp = mixed_p_affine(&pair, &p)?;
    println!("as_p(E, E) = {}", asp.value);

    let est = estimate_g(3, &pair, &p, &SearchConfig::default())?;
    println!(
        "estimated G^(3)(E, E) = {} ({:?}, err {:.2e})",
        est.value.value, est.value.kind, est.value.err
    );

    let report = fuzz_suite(&[RuleId::DualH], 20, 7, &[2], &HarnessConfig::default())?;
    println!(
        "DUALH suite: verified {} violated {}",
        report.tallies.verified, report.tallies.violated
    );
    Ok(())
}
