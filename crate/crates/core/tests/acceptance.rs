//! Acceptance suite: ten end-to-end criteria, one PASS/FAIL line each.
//! Exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rayforge_core::certificates::{
    check_cluster_rigidity, check_negligible_rotation, expansivity_deviation, identity_positions, pullback_pair,
    RigidityConfig,
};
use rayforge_core::clusters::{cluster_decompose, h_index, sector_product_law, GridConfig, MarkedGrid};
use rayforge_core::rays::{asymptotic_residual, ray_point};
use rayforge_core::solver::{continuity_probe, max_jump, solve, trace, uniqueness_probe, ProbeConfig, ProbeMode};
use rayforge_core::{Complex, EntireMap, EscapeSpec, ExternalAddress, GrowthFn, RayConfig, Real, SolveConfig};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn addr(s: &str) -> ExternalAddress {
    s.parse().unwrap()
}

/// Real κ with `κ = log(F(t) - κ)`, by bisection in f64.
fn kappa_oracle(t: f64) -> f64 {
    let ft = t.exp_m1();
    let h = |k: f64| (ft - k).ln() - k;
    let (mut lo, mut hi) = (t - 1.0, t + 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn random_address(rng: &mut ChaCha8Rng) -> ExternalAddress {
    let pre: Vec<i64> = (0..rng.random_range(0..3)).map(|_| rng.random_range(-3..=3)).collect();
    let cyc: Vec<i64> = (0..rng.random_range(1..3)).map(|_| rng.random_range(-3..=3)).collect();
    ExternalAddress::new(pre, cyc).unwrap()
}

fn functional_equation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let cfg = RayConfig::default();
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let d = rng.random_range(1..=3usize);
        let coeffs: Vec<(f64, f64)> = (0..d).map(|_| (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let g = EntireMap::from_f64(&coeffs).unwrap();
        let s = random_address(&mut rng);
        let t = Real::from(rng.random_range(10.0..25.0));
        let ft = GrowthFn::new(d).unwrap().apply(t).unwrap();
        let z = ray_point(&g, &s, t, &cfg).unwrap().position;
        let w = ray_point(&g, &s.shift(), ft, &cfg).unwrap().position;
        worst = worst.max((g.evaluate(z).unwrap() - w).norm_f64());
    }
    outcome(worst < 1e-7, format!("max |g(R_s(t)) - R_σs(F(t))| = {worst:.3e} over 20 draws"))
}

fn asymptotics() -> Outcome {
    let g = EntireMap::exponential();
    let cfg = RayConfig::default();
    let ts = [10.0, 15.0, 20.0, 25.0, 30.0];
    let mut worst = 0.0f64;
    let mut monotone = true;
    for s in ["| 0", "3 | 0"] {
        let s = addr(s);
        let r: Vec<f64> = ts.iter().map(|&t| asymptotic_residual(&ray_point(&g, &s, Real::from(t), &cfg).unwrap())).collect();
        worst = worst.max(r.iter().copied().fold(0.0, f64::max));
        monotone &= r[1..].windows(2).all(|w| w[1] <= w[0]);
    }
    outcome(worst < 10.0 && monotone, format!("common bound {worst:.3e}, non-increasing beyond 15: {monotone}"))
}

fn pseudo_multiplicativity() -> Outcome {
    let mut violations = 0;
    let mut seed = 0;
    for x in [3.0, 5.0] {
        for k in [2, 3, 5] {
            seed += 1;
            violations += sector_product_law(x, k, 1, 10_000, seed).unwrap().violations;
        }
    }
    outcome(violations == 0, format!("{violations} violations in 6 x 10^4 products"))
}

fn negligible_rotation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let g = EntireMap::exponential();
    let mut passes = 0;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let e = rng.random_range(-2..=2);
        let a1 = rng.random_range(-3..=3);
        let b1 = loop {
            let b = rng.random_range(-3..=3);
            if b != a1 {
                break b;
            }
        };
        let tail_a = rng.random_range(-2..=2);
        let tail_b = rng.random_range(-2..=2);
        let sa = ExternalAddress::new(vec![e, a1], vec![tail_a]).unwrap();
        let sb = ExternalAddress::new(vec![e, b1], vec![tail_b]).unwrap();
        let t = rng.random_range(12.0..16.0);
        let spec = EscapeSpec::new_allowing_overlap(1, vec![sa, sb], vec![Real::from(t); 2]).unwrap();
        let grid = MarkedGrid::build(&g, &spec, 1, 0, &GridConfig::default()).unwrap();
        let pre = (grid.positions[0][1], grid.positions[1][1]);
        let post = pullback_pair(&g, pre, (e, e)).unwrap();
        let rep = check_negligible_rotation(Real::from(t), pre, post, 1).unwrap();
        worst = worst.max(rep.witnesses[0].value / rep.witnesses[0].bound);
        passes += rep.passed as usize;
    }
    outcome(passes == 100, format!("{passes}/100 in A_(t,0), worst value/bound {worst:.3e}"))
}

fn expansivity() -> Outcome {
    let c = |v: &[(f64, f64)]| EntireMap::from_f64(v).unwrap();
    let segments = [
        (c(&[(0.0, 0.0)]), c(&[(0.1, 0.0)])),
        (c(&[(1.0, 0.0)]), c(&[(1.0, 1.0)])),
        (c(&[(0.0, -0.5)]), c(&[(0.5, 0.0)])),
        (c(&[(0.2, 0.0), (1.0, 0.0)]), c(&[(0.5, 0.3), (1.0, 0.0)])),
        (c(&[(0.0, 0.0), (1.0, 0.0), (0.5, 0.0)]), c(&[(0.4, 0.0), (1.0, 0.0), (0.5, 0.0)])),
    ];
    let logs = [10.0, 15.0, 20.0];
    let mut slopes = Vec::new();
    for (g0, g1) in &segments {
        let ys: Vec<f64> = logs
            .iter()
            .map(|&l| expansivity_deviation(g0, g1, Complex::from(Real::from(l).exp()), 0, 16).unwrap().ln())
            .collect();
        let mx = logs.iter().sum::<f64>() / 3.0;
        let my = ys.iter().sum::<f64>() / 3.0;
        let num: f64 = logs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let den: f64 = logs.iter().map(|x| (x - mx) * (x - mx)).sum();
        slopes.push(num / den);
    }
    let ok = slopes.iter().all(|s| (-1.3..=-0.7).contains(s));
    outcome(ok, format!("slopes {:?}", slopes.iter().map(|s| format!("{s:.4}")).collect::<Vec<_>>()))
}

fn realization() -> Outcome {
    let cfg = SolveConfig::default();
    let spec = EscapeSpec::from_f64(1, vec![addr("| 0")], &[20.0]).unwrap();
    let r = match solve(&spec, &EntireMap::exponential(), &cfg) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("zero ray: {e}")),
    };
    let k = r.map.coeffs()[0].to_f64();
    let oracle_gap = (k.0 - kappa_oracle(20.0)).abs().max(k.1.abs());
    let spec1 = EscapeSpec::from_f64(1, vec![addr("| 1")], &[20.0]).unwrap();
    let r1 = match solve(&spec1, &EntireMap::exponential(), &cfg) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("periodic ray: {e}")),
    };
    let ok = r.max_residual() < 1e-9 && oracle_gap < 1e-6 && r1.max_certificate_error() < 1e-6;
    outcome(
        ok,
        format!(
            "residual {:.2e}, |κ - oracle| {:.2e}; periodic: certificate {:.2e} over j <= {}",
            r.max_residual(),
            oracle_gap,
            r1.max_certificate_error(),
            r1.certificate[0].len() - 1
        ),
    )
}

fn continuity_in_potential() -> Outcome {
    let cfg = SolveConfig::default();
    let spec = EscapeSpec::from_f64(1, vec![addr("| 0")], &[25.0]).unwrap();
    let path = |n: usize| -> Vec<Vec<Real>> {
        (0..n).map(|k| vec![Real::from(25.0 - 15.0 * k as f64 / (n - 1) as f64)]).collect()
    };
    let coarse = trace(&spec, &EntireMap::exponential(), &path(16), &cfg);
    let fine = trace(&spec, &EntireMap::exponential(), &path(31), &cfg);
    let (coarse, fine) = match (coarse, fine) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return outcome(false, format!("trace failed: {e}")),
    };
    let ratio = max_jump(&fine) / max_jump(&coarse);
    let kappas: Vec<f64> = coarse.iter().map(|r| r.map.coeffs()[0].re.to_f64()).collect();
    let decreasing = kappas.windows(2).all(|w| w[1] < w[0]);
    let oracle = coarse
        .iter()
        .zip(path(16))
        .map(|(r, t)| (r.map.coeffs()[0].re.to_f64() - kappa_oracle(t[0].to_f64())).abs())
        .fold(0.0, f64::max);
    let ok = (0.3..=0.7).contains(&ratio) && decreasing && oracle < 1e-6;
    outcome(ok, format!("jump ratio {ratio:.4}, monotone {decreasing}, max oracle gap {oracle:.2e}"))
}

fn continuity_in_address() -> Outcome {
    let cfg = SolveConfig::default();
    let spec = EscapeSpec::from_f64(1, vec![addr("| 1")], &[20.0]).unwrap();
    let probe = ProbeConfig::new(ProbeMode::Address, 1, 8);
    match continuity_probe(&spec, &EntireMap::exponential(), &probe, &cfg) {
        Ok(rep) => {
            let tail_ok = rep.distances.iter().filter(|(n, _)| *n >= 2).all(|&(_, v)| v < 1e-6);
            let shown: Vec<String> = rep.distances.iter().map(|(n, v)| format!("{n}:{v:.2e}")).collect();
            outcome(rep.passed && tail_ok, format!("distances {}", shown.join(" ")))
        }
        Err(e) => outcome(false, format!("probe failed: {e}")),
    }
}

fn uniqueness() -> Outcome {
    let cfg = SolveConfig::default();
    let spec = EscapeSpec::from_f64(1, vec![addr("| 0")], &[20.0]).unwrap();
    let sol = solve(&spec, &EntireMap::exponential(), &cfg).unwrap();
    let rep = uniqueness_probe(&spec, &sol.map, 20, 1.0, 9, &cfg).unwrap();
    outcome(
        rep.passed(),
        format!("{} reproduced, {} diverged, {} distinct", rep.reproduced, rep.diverged, rep.distinct.len()),
    )
}

fn cluster_machinery() -> Outcome {
    let spec = EscapeSpec::new_allowing_overlap(1, vec![addr("| 0"), addr("0 1 | 0")], vec![Real::from(20.0); 2]).unwrap();
    let grid = MarkedGrid::build(&EntireMap::exponential(), &spec, 2, 0, &GridConfig::default()).unwrap();
    let part = cluster_decompose(&grid);
    let same = part.cluster_of((0, 0)) == part.cluster_of((1, 0));
    let h = h_index(&grid, (0, 0), (1, 0));
    let prox = grid.proximity_violations(&part).map(|v| v.len());
    let rig = check_cluster_rigidity(&grid, &identity_positions(&grid), &RigidityConfig::default()).map(|r| r.passed);
    let ok = same && h == Ok(1) && prox == Some(0) && rig == Ok(true);
    outcome(ok, format!("same cluster {same}, H {h:?}, proximity violations {prox:?}, rigidity {rig:?}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, fn() -> Outcome); 10] = [
        ("1 functional equation", Duration::from_secs(10), functional_equation),
        ("2 asymptotics", Duration::from_secs(5), asymptotics),
        ("3 pseudo-multiplicativity", Duration::from_secs(5), pseudo_multiplicativity),
        ("4 negligible rotation", Duration::from_secs(30), negligible_rotation),
        ("5 expansivity", Duration::from_secs(10), expansivity),
        ("6 realization", Duration::from_secs(60), realization),
        ("7 continuity in potential", Duration::from_secs(120), continuity_in_potential),
        ("8 continuity in address", Duration::from_secs(120), continuity_in_address),
        ("9 uniqueness probe", Duration::from_secs(120), uniqueness),
        ("10 cluster machinery", Duration::from_secs(30), cluster_machinery),
    ];
    let mut failed = 0;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let passed = out.passed && took <= budget;
        failed += !passed as usize;
        println!(
            "{} criterion {name}: {} ({:.2}s of {}s)",
            if passed { "PASS" } else { "FAIL" },
            out.detail,
            took.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} of 10 passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
