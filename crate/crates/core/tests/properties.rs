//! Property tests for the module invariants.

use std::sync::Arc;

use proptest::prelude::*;

use geokit_core::bodies::{self, random_smooth_body, LinearMap};
use geokit_core::functionals::{
    dual_mixed_volume, p_mixed_volume, vpi_mixed, volume_radial, PExponent,
};
use geokit_core::sphere::{differentiate_periodic, SphereGrid};
use geokit_core::{SmoothBody, StarBody};

fn grid2(m: usize) -> Arc<SphereGrid<f64>> {
    SphereGrid::for_dim(2, m, None).unwrap()
}

fn star_from_coeffs(grid: &Arc<SphereGrid<f64>>, a1: f64, b2: f64, c3: f64) -> StarBody {
    let rho: Vec<f64> = (0..grid.node_count())
        .map(|j| {
            let t = grid.theta(j);
            1.0 + a1 * t.cos() + b2 * (2.0 * t).sin() + c3 * (3.0 * t).cos()
        })
        .collect();
    StarBody::new(grid.clone(), rho).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn integrate_is_linear(
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        phase in 0.0f64..6.28,
    ) {
        let grid = grid2(128);
        let f: Vec<f64> = (0..128).map(|j| (grid.theta(j) + phase).cos().exp()).collect();
        let g: Vec<f64> = (0..128).map(|j| (2.0 * grid.theta(j)).sin() + 1.5).collect();
        let combo: Vec<f64> = f.iter().zip(g.iter()).map(|(x, y)| a * x + b * y).collect();
        let lhs = grid.integrate(&combo).unwrap();
        let rhs = a * grid.integrate(&f).unwrap() + b * grid.integrate(&g).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-13 * (1.0 + lhs.abs()));
    }

    #[test]
    fn nonnegative_samples_integrate_nonnegative(scale in 0.0f64..5.0, phase in 0.0f64..6.28) {
        let grid = grid2(64);
        let samples: Vec<f64> =
            (0..64).map(|j| scale * (grid.theta(j) + phase).sin().max(0.0)).collect();
        prop_assert!(grid.integrate(&samples).unwrap() >= 0.0);
    }

    #[test]
    fn spectral_derivative_composes(a in -0.5f64..0.5, b in -0.5f64..0.5) {
        let grid = grid2(128);
        let samples: Vec<f64> = (0..128)
            .map(|j| {
                let t = grid.theta(j);
                (a * t.cos()).exp() + b * (3.0 * t).sin()
            })
            .collect();
        let twice = differentiate_periodic(&differentiate_periodic(&samples, 1).unwrap(), 1).unwrap();
        let second = differentiate_periodic(&samples, 2).unwrap();
        for (x, y) in twice.iter().zip(second.iter()) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn polar_involution_recovers_support(seed in 0u64..5000) {
        let grid = grid2(256);
        let body = random_smooth_body(&grid, seed, 4, 0.3).unwrap();
        let polar = bodies::polar_radial(body.support());
        let support = bodies::support_from_radial(&polar).unwrap();
        let back = bodies::support_from_radial(&bodies::polar_radial(&support)).unwrap();
        for j in 0..grid.node_count() {
            let rel = (back.h()[j] - body.h()[j]).abs() / body.h()[j];
            prop_assert!(rel < 5e-3, "node {} rel {}", j, rel);
        }
    }

    #[test]
    fn linear_images_preserve_positive_curvature_and_volume(
        seed in 0u64..5000,
        a in 0.5f64..1.6,
        d in 0.5f64..1.6,
        off in -0.3f64..0.3,
    ) {
        let grid = grid2(128);
        let body = random_smooth_body(&grid, seed, 4, 0.3).unwrap();
        let map = LinearMap::new(vec![a, off, -off * 0.5, d], 2).unwrap();
        let image = bodies::apply_linear(&body, &map).unwrap();
        prop_assert!(image.f().iter().all(|f| *f > 0.0));
        let expected = body.volume() * map.det_abs();
        prop_assert!((image.volume() - expected).abs() < 1e-6 * expected);
    }

    #[test]
    fn dual_mixed_volume_bounded_by_volumes(
        a1 in -0.3f64..0.3,
        b2 in -0.3f64..0.3,
        c3 in -0.2f64..0.2,
        a1b in -0.3f64..0.3,
        b2b in -0.3f64..0.3,
    ) {
        let grid = grid2(128);
        let l1 = star_from_coeffs(&grid, a1, b2, c3);
        let l2 = star_from_coeffs(&grid, a1b, b2b, -c3);
        let dual = dual_mixed_volume(&[&l1, &l2]).unwrap().value;
        let bound = volume_radial(&l1).unwrap().value * volume_radial(&l2).unwrap().value;
        prop_assert!(dual * dual <= bound + 1e-10);
    }

    #[test]
    fn p_mixed_volume_homogeneity(
        seed in 0u64..3000,
        p in prop::sample::select(vec![1.0f64, 2.0, 0.5, -0.5, -1.0, -3.0]),
        r in 0.5f64..2.0,
        s in 0.5f64..2.0,
    ) {
        let grid = grid2(128);
        let k = random_smooth_body(&grid, seed, 4, 0.3).unwrap();
        let q = random_smooth_body(&grid, seed ^ 0xABCD, 4, 0.3).unwrap();
        let pe = PExponent::new(p, 2).unwrap();
        let base = p_mixed_volume(&k, q.support(), &pe).unwrap().value;
        let scaled = p_mixed_volume(&k.dilate(r).unwrap(), &q.support().dilate(s).unwrap(), &pe)
            .unwrap()
            .value;
        let expected = r.powf(2.0 - p) * s.powf(p) * base;
        prop_assert!((scaled - expected).abs() < 1e-9 * expected.abs().max(1.0));
    }

    #[test]
    fn weighted_mixed_volume_log_convex_in_i(
        seed in 0u64..3000,
        i in -1.0f64..0.5,
        step in 0.25f64..1.5,
    ) {
        let grid = grid2(128);
        let k = random_smooth_body(&grid, seed, 4, 0.3).unwrap();
        let l = random_smooth_body(&grid, seed ^ 0x77, 4, 0.3).unwrap();
        let q1 = random_smooth_body(&grid, seed ^ 0x88, 4, 0.3).unwrap();
        let q2 = random_smooth_body(&grid, seed ^ 0x99, 4, 0.3).unwrap();
        let pe = PExponent::new(1.2, 2).unwrap();
        let j = i + step;
        let kk = j + step;
        let vi = vpi_mixed(&k, &l, q1.support(), q2.support(), &pe, i).unwrap().value;
        let vj = vpi_mixed(&k, &l, q1.support(), q2.support(), &pe, j).unwrap().value;
        let vk = vpi_mixed(&k, &l, q1.support(), q2.support(), &pe, kk).unwrap().value;
        prop_assert!(vj * vj <= vi * vk * (1.0 + 1e-11));
    }

    #[test]
    fn generator_meets_margin(seed in 0u64..20000, k_max in 2usize..6, margin in 0.15f64..0.6) {
        let grid = grid2(256);
        let body = random_smooth_body(&grid, seed, k_max, margin).unwrap();
        prop_assert!(body.f().iter().all(|f| *f >= margin - 1e-9));
        prop_assert!(body.h().iter().all(|h| *h >= margin - 1e-9));
        // Volume consistency against the exact planar area
        // (1/2) integral (h^2 - h'^2), which band-limited quadrature nails.
        let d1 = differentiate_periodic(body.h(), 1).unwrap();
        let samples: Vec<f64> =
            body.h().iter().zip(d1.iter()).map(|(h, dh)| h * h - dh * dh).collect();
        let exact = grid.integrate(&samples).unwrap() / 2.0;
        prop_assert!((body.volume() - exact).abs() < 1e-12 * exact);
        // The radial chain is a coarser cross-route; pinched bodies lose a
        // couple of digits to the slower spectral decay of rho.
        let star = bodies::radial_from_support(body.support()).unwrap();
        prop_assert!((star.volume() - exact).abs() < 1e-6 * exact);
    }
}

/// A thousand generator seeds keep the volume-consistency invariant.
#[test]
fn thousand_seed_volume_consistency() {
    let grid = grid2(256);
    let mut worst = 0.0f64;
    for seed in 0..1000u64 {
        let body = random_smooth_body(&grid, seed, 4, 0.25).unwrap();
        let d1 = differentiate_periodic(body.h(), 1).unwrap();
        let samples: Vec<f64> =
            body.h().iter().zip(d1.iter()).map(|(h, dh)| h * h - dh * dh).collect();
        let exact = grid.integrate(&samples).unwrap() / 2.0;
        worst = worst.max((body.volume() - exact).abs() / exact);
        let star = bodies::radial_from_support(body.support()).unwrap();
        worst = worst.max((star.volume() - exact).abs() / exact);
    }
    assert!(worst < 1e-8, "worst relative volume gap {worst:.3e}");
}

/// The scalar-generic kernels also instantiate at f32.
#[test]
fn f32_instantiation_smoke() {
    let grid = geokit_core::sphere::SphereGrid::<f32>::for_dim(2, 64, None).unwrap();
    let ball = geokit_core::bodies::make_ball(&grid, 1.0f32).unwrap();
    let refs: Vec<&geokit_core::bodies::SmoothBody<f32>> = vec![&ball, &ball];
    let pe = geokit_core::functionals::PExponent::<f32>::new(2.0, 2).unwrap();
    let asp = geokit_core::functionals::mixed_p_affine(&refs, &pe).unwrap();
    assert!((asp.value - 2.0 * std::f32::consts::PI).abs() < 1e-4);
    let cfg = geokit_core::geominimal::SearchConfig {
        starts: 3,
        max_iters: 80,
        tol: 1e-5,
        ..geokit_core::geominimal::SearchConfig::default()
    };
    let est = geokit_core::geominimal::estimate_g(1, &refs, &pe, &cfg).unwrap();
    assert!((est.value.value - 2.0 * std::f32::consts::PI).abs() / (2.0 * std::f32::consts::PI) < 1e-2);
}
