use proptest::prelude::*;
use rayforge_core::clusters::{cluster_decompose, h_index, GridConfig, MarkedGrid, QuotientDisk, SectorSet};
use rayforge_core::{Complex, EntireMap, EscapeSpec, ExternalAddress, Real};

fn address() -> impl Strategy<Value = ExternalAddress> {
    (prop::collection::vec(-2i64..=2, 0..3), prop::collection::vec(-2i64..=2, 1..3))
        .prop_map(|(p, c)| ExternalAddress::new(p, c).unwrap())
}

fn ray_grid() -> impl Strategy<Value = MarkedGrid> {
    prop::collection::vec((address(), prop::sample::select(vec![10.0, 12.0, 20.0])), 1..4).prop_map(|orbits| {
        let (addrs, ts): (Vec<_>, Vec<_>) = orbits.into_iter().unzip();
        let spec = EscapeSpec::new_allowing_overlap(1, addrs, ts.into_iter().map(Real::from).collect()).unwrap();
        MarkedGrid::build(&EntireMap::exponential(), &spec, 1, 0, &GridConfig::default()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partition_covers_each_point_once(grid in ray_grid()) {
        let part = cluster_decompose(&grid);
        let mut seen = std::collections::BTreeMap::new();
        for (c, cl) in part.clusters.iter().enumerate() {
            prop_assert!(cl.members.len() <= grid.m());
            for &p in &cl.members {
                prop_assert!(seen.insert(p, c).is_none());
            }
        }
        let total: usize = (0..grid.m()).map(|i| grid.positioned_depth(i) + 1).sum();
        prop_assert_eq!(seen.len(), total);
    }

    #[test]
    fn clustered_points_are_close(grid in ray_grid()) {
        let part = cluster_decompose(&grid);
        prop_assert_eq!(grid.proximity_violations(&part), Some(vec![]));
    }

    #[test]
    fn separation_index_is_bounded(first in -2i64..=2, a in address(), b in address()) {
        let sa = a.prepend(first);
        let sb = b.prepend(first);
        prop_assume!(!sa.overlapping(&sb));
        let bound = sa.preperiod().max(sb.preperiod()) + num_lcm(sa.period(), sb.period());
        let spec = EscapeSpec::new(1, vec![sa, sb], vec![Real::from(10.0); 2]).unwrap();
        let grid = MarkedGrid::build(&EntireMap::exponential(), &spec, 1, 0, &GridConfig::default()).unwrap();
        let h = h_index(&grid, (0, 0), (1, 0)).unwrap();
        prop_assert!(h >= 1 && h <= bound);
    }

    #[test]
    fn sector_bounds_are_monotone(x in 0.1f64..20.0, dx in 0.0f64..10.0, n in 0usize..4, d in 1usize..=3) {
        let b = |x, n| SectorSet::new(x, n, d).unwrap().bound();
        prop_assert!(b(x, n + 1) >= b(x, n));
        prop_assert!(b(x + dx, n) <= b(x, n));
    }

    #[test]
    fn quotient_disk_is_the_image_set(
        a in (-5.0f64..5.0, -5.0f64..5.0),
        b in (-5.0f64..5.0, -5.0f64..5.0),
        j in 1usize..6,
        l in 1usize..6,
        s in (-3i64..=3, -3i64..=3),
        d in 1usize..=3,
        r in (0.0f64..0.999, 0.0f64..0.999),
        th in (0.0f64..6.28, 0.0f64..6.28),
        edge in 0.0f64..6.28,
    ) {
        prop_assume!(s.0 != s.1);
        let (aij, akl) = (Complex::from_f64(a.0, a.1), Complex::from_f64(b.0, b.1));
        let q = QuotientDisk::from_points(aij, akl, j, l, s.0, s.1, d).unwrap();
        let map = |w: Complex, z: Complex| {
            (w - z).scale(Real::from(d)) / Complex::new(Real::ZERO, Real::TAU * Real::from(s.1 - s.0))
        };
        let w = akl + Complex::cis(Real::from(th.0)).scale(Real::from(r.0 / l as f64));
        let z = aij + Complex::cis(Real::from(th.1)).scale(Real::from(r.1 / j as f64));
        prop_assert!(q.contains(map(w, z)));
        // opposite boundary directions attain the radius
        let shrink = 1.0 - 1e-9;
        let w = akl + Complex::cis(Real::from(edge)).scale(Real::from(shrink / l as f64));
        let z = aij - Complex::cis(Real::from(edge)).scale(Real::from(shrink / j as f64));
        let gap = (q.radius - (map(w, z) - q.center).norm()).to_f64();
        prop_assert!(gap > 0.0 && gap < 1e-6);
    }
}

fn num_lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    a / gcd(a, b) * b
}
