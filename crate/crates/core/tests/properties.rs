//! Property tests for the exact-structure invariants.

use proptest::prelude::*;

use hop_core::linalg;
use hop_core::ops::Model;
use hop_core::rootsys::{
    radial_decompose, reflect, Family, MultiplicityFunction, Normalization, RootSystem, WeylGroup,
};
use hop_core::stats::{ks_two_sample, pairwise_sum};

fn b2() -> (RootSystem, WeylGroup) {
    let sys = RootSystem::build(Family::B, 2, Normalization::Standard).unwrap();
    let w = WeylGroup::generate(&sys).unwrap();
    (sys, w)
}

proptest! {
    // r_α is an involution and fixes the wall.
    #[test]
    fn reflection_involution(
        ax in -3.0f64..3.0, ay in -3.0f64..3.0,
        x in -10.0f64..10.0, y in -10.0f64..10.0,
    ) {
        prop_assume!(ax * ax + ay * ay > 1e-2);
        let alpha = [ax, ay];
        let p = [x, y];
        let rp = reflect(&alpha, &p);
        let rrp = reflect(&alpha, &rp);
        prop_assert!(linalg::dist(&rrp, &p) < 1e-9);
        // the reflected point has the same norm
        prop_assert!((linalg::norm(&rp) - linalg::norm(&p)).abs() < 1e-9);
        // wall points are fixed: project p onto the wall first
        let t = linalg::dot(&alpha, &p) / linalg::norm2(&alpha);
        let wall = [p[0] - t * alpha[0], p[1] - t * alpha[1]];
        let rw = reflect(&alpha, &wall);
        prop_assert!(linalg::dist(&rw, &wall) < 1e-9);
    }

    // x = w · x^W, radial part W-invariant, chamber membership.
    #[test]
    fn decomposition_reconstructs(x in -8.0f64..8.0, y in -8.0f64..8.0) {
        let (sys, w) = b2();
        let p = [x, y];
        let d = radial_decompose(&sys, &w, &p);
        for a in 0..sys.n_positive {
            prop_assert!(sys.pairing(a, &d.radial) >= -1e-9);
        }
        let back = w.apply(d.angular, &d.radial);
        prop_assert!(linalg::dist(&back, &p) < 1e-9);
        // the radial part of any Weyl image agrees
        for i in 0..w.len() {
            let img = w.apply(i, &p);
            let di = radial_decompose(&sys, &w, &img);
            prop_assert!(linalg::dist(&di.radial, &d.radial) < 1e-8);
        }
    }

    // Drift equivariance b(w x) = w b(x) at random regular points.
    #[test]
    fn drift_equivariance(x in 0.05f64..4.0, gap in 0.05f64..3.0) {
        let (sys, _) = b2();
        let k = MultiplicityFunction::uniform(&sys, 1.0).unwrap();
        let m = Model::new(sys, k).unwrap();
        let p = [x + gap, x]; // interior of the chamber
        let b = m.drift(&p).unwrap();
        for i in 0..m.weyl.len() {
            let img = m.weyl.apply(i, &p);
            let bi = m.drift(&img).unwrap();
            let expect = m.weyl.apply(i, &b);
            prop_assert!(linalg::dist(&bi, &expect) < 1e-8);
        }
    }

    // Jump rate symmetric under its own reflection and positive.
    #[test]
    fn jump_rate_symmetry(x in 0.05f64..4.0, gap in 0.05f64..3.0) {
        let (sys, _) = b2();
        let k = MultiplicityFunction::uniform(&sys, 1.0).unwrap();
        let m = Model::new(sys, k).unwrap();
        let p = [x + gap, x];
        for a in 0..m.n_positive() {
            let r = m.jump_rate(a, &p).unwrap();
            prop_assert!(r > 0.0);
            let refl = m.system.reflect_index(a, &p);
            let r2 = m.c_alpha_raw(a, &refl) * 0.5;
            prop_assert!((r - r2).abs() <= 1e-12 * r.max(1.0));
        }
    }

    // Pairwise summation is shape-stable and close to the naive sum.
    #[test]
    fn pairwise_sum_consistency(xs in prop::collection::vec(-1e3f64..1e3, 1..400)) {
        let a = pairwise_sum(&xs);
        let b: f64 = xs.iter().sum();
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()));
        prop_assert_eq!(a, pairwise_sum(&xs.clone()));
    }

    // KS statistic lies in [0,1], vanishes on identical samples, and is
    // symmetric in its arguments.
    #[test]
    fn ks_statistic_properties(
        a in prop::collection::vec(-50.0f64..50.0, 2..60),
        b in prop::collection::vec(-50.0f64..50.0, 2..60),
    ) {
        let r1 = ks_two_sample(&a, &b).unwrap();
        let r2 = ks_two_sample(&b, &a).unwrap();
        prop_assert!((0.0..=1.0).contains(&r1.statistic));
        prop_assert!((r1.statistic - r2.statistic).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&r1.p));
        let same = ks_two_sample(&a, &a).unwrap();
        prop_assert_eq!(same.statistic, 0.0);
    }
}
