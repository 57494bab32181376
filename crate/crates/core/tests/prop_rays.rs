use proptest::prelude::*;
use rayforge_core::rays::{asymptotic_residual, ray_point, ray_point_at_depth};
use rayforge_core::{Complex, EntireMap, ExternalAddress, GrowthFn, RayConfig, Real};

fn small_map() -> impl Strategy<Value = EntireMap> {
    (1usize..=3)
        .prop_flat_map(|d| prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d))
        .prop_map(|c| EntireMap::from_f64(&c).unwrap())
}

fn address() -> impl Strategy<Value = ExternalAddress> {
    (prop::collection::vec(-3i64..=3, 0..3), prop::collection::vec(-3i64..=3, 1..3))
        .prop_map(|(p, c)| ExternalAddress::new(p, c).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn functional_equation(g in small_map(), s in address(), t in 10.0f64..25.0) {
        let cfg = RayConfig::default();
        let t = Real::from(t);
        let ft = GrowthFn::new(g.degree()).unwrap().apply(t).unwrap();
        let z = ray_point(&g, &s, t, &cfg).unwrap().position;
        let w = ray_point(&g, &s.shift(), ft, &cfg).unwrap().position;
        prop_assert!((g.evaluate(z).unwrap() - w).norm_f64() < 10.0 * cfg.tol);
    }

    #[test]
    fn deeper_seeds_stay_within_the_error_bound(c in (-1.0f64..1.0, -1.0f64..1.0), s in address(), t in 3.0f64..5.0) {
        let g = EntireMap::from_f64(&[c]).unwrap();
        let t = Real::from(t);
        let a = ray_point_at_depth(&g, &s, t, 1).unwrap();
        let b = ray_point_at_depth(&g, &s, t, 2).unwrap();
        prop_assert!((a.position - b.position).norm_f64() < a.err_bound);
    }

    #[test]
    fn asymptotic_residual_is_bounded_and_decays(s in address(), c in (-1.0f64..1.0, -1.0f64..1.0)) {
        let g = EntireMap::from_f64(&[c]).unwrap();
        let cfg = RayConfig::default();
        let r: Vec<f64> = [10.0, 15.0, 20.0, 25.0, 30.0]
            .iter()
            .map(|&t| asymptotic_residual(&ray_point(&g, &s, Real::from(t), &cfg).unwrap()))
            .collect();
        let bound = 10.0 * (1.0 + s.max_abs_entry() as f64);
        prop_assert!(r.iter().all(|&v| v < bound));
        prop_assert!(r[4] <= r[0]);
    }

    #[test]
    fn truncated_addresses_converge_monotonically(s in address(), tail in address(), t0 in 3.0f64..6.0) {
        let g = EntireMap::exponential();
        let cfg = RayConfig::default();
        // the n-th approximant must agree with s on exactly n entries
        let agree = |a: &ExternalAddress| (0..64).take_while(|&i| a.entry(i) == s.entry(i)).count();
        prop_assume!((1..5).all(|n| agree(&s.splice(n, &tail)) == n));
        let grid: Vec<Real> = (0..4).map(|k| Real::from(t0 + k as f64)).collect();
        let dist = |n: usize| -> f64 {
            let sn = s.splice(n, &tail);
            grid.iter()
                .map(|&t| (ray_point(&g, &sn, t, &cfg).unwrap().position - ray_point(&g, &s, t, &cfg).unwrap().position).norm_f64())
                .fold(0.0, f64::max)
        };
        let seq: Vec<f64> = (1..5).map(dist).collect();
        for w in seq.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12);
        }
    }

    #[test]
    fn positions_follow_coefficients(c in (-1.0f64..1.0, -1.0f64..1.0), dir in (-1.0f64..1.0, -1.0f64..1.0), s in address(), t in 5.0f64..15.0) {
        let cfg = RayConfig::default();
        let base = EntireMap::from_f64(&[c]).unwrap();
        let z0 = ray_point(&base, &s, Real::from(t), &cfg).unwrap().position;
        let seq: Vec<f64> = [1e-2, 1e-4, 1e-6]
            .iter()
            .map(|&e| {
                let g = EntireMap::from_f64(&[(c.0 + e * dir.0, c.1 + e * dir.1)]).unwrap();
                (ray_point(&g, &s, Real::from(t), &cfg).unwrap().position - z0).norm_f64()
            })
            .collect();
        prop_assert!(seq[1] <= seq[0] && seq[2] <= seq[1]);
        prop_assert!(seq[2] < 1e-5);
    }
}

#[test]
fn zero_ray_of_exp_is_real() {
    let g = EntireMap::exponential();
    let z = ray_point(&g, &"| 0".parse().unwrap(), Real::from(12.0), &RayConfig::default()).unwrap();
    assert_eq!(z.position.im, Real::ZERO);
    assert!((z.position - Complex::from_f64(12.0, 0.0)).norm_f64() < 1e-5);
}
