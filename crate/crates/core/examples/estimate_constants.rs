//! Survey the empirical constants behind the shipped bounds: max observed
//! Q / bound over random suites, the proxy/Q equivalence band, and the
//! scale-covariance drift. Used to pick the frozen validation constants.

use anticonc::charfn::{q_proxy_symmetric, CfHandle, QuadratureSpec};
use anticonc::dist::{DiscreteDist1D, WeightMatrix};
use anticonc::exact::{q_exact_1d, q_monte_carlo, sample_h, weighted_sum_dist};
use anticonc::verify::{constant_suite, estimate_constant, instance_rng, random_law, random_weights};
use anticonc::{build_report, ReportOptions, Scenario};
use rand::Rng;

fn thm1_suite(seed: u64, d: usize) -> Vec<Scenario> {
    use anticonc::verify::{generate_family, FamilySpec};
    let mut out = Vec::new();
    let ns: &[usize] = if d == 1 { &[4, 8, 12, 16] } else { &[4, 6, 8] };
    let draws = if d == 1 { 3 } else { 2 };
    let mut idx = 0u64;
    for fam in 0..3 {
        for &n in ns {
            for _ in 0..draws {
                let mut rng = instance_rng(seed, idx);
                idx += 1;
                let family = match fam {
                    0 => FamilySpec::AllOnes { n, d, scale: 1.0 },
                    1 => FamilySpec::Arithmetic { n, d, step: 2.0 / n as f64 },
                    _ => FamilySpec::RandomUniform { n, d, seed: rng.random() },
                };
                let weights = generate_family(&family).unwrap();
                let law = if rng.random_range(0..2u32) == 0 {
                    DiscreteDist1D::probability([(-1.0, 0.5), (1.0, 0.5)]).unwrap()
                } else {
                    random_law(&mut rng, 3)
                };
                let tau = rng.random_range(0.1..1.0);
                let epsilon = rng.random_range(0.3..1.0);
                let spec = QuadratureSpec {
                    nodes_per_axis: if d == 1 { 257 } else { 65 },
                    ..QuadratureSpec::default()
                };
                out.push(Scenario::new(weights, law, tau, epsilon, spec, 1 << 16).unwrap());
            }
        }
    }
    out
}

fn max_ratio(suite: &[Scenario], bound: &str) -> (f64, usize, usize) {
    let mut max = f64::NEG_INFINITY;
    let mut used = 0;
    let mut id = 0;
    for (i, s) in suite.iter().enumerate() {
        let r = build_report(s, &ReportOptions { id: i as u64, ..Default::default() }).unwrap();
        let q = r.q_reference().unwrap();
        let b = match bound {
            "thm1_tail" => r.thm1_tail,
            "esseen" => r.esseen,
            "cor1" => r.cor1,
            "cor2" => r.cor2,
            _ => None,
        };
        if let Some(b) = b {
            if b < 1.0 && b > 0.0 {
                used += 1;
                if q / b > max {
                    max = q / b;
                    id = i;
                }
            }
        }
    }
    (max, used, id)
}

fn main() {
    let base = QuadratureSpec::default();

    println!("== estimate_constant over random d=1 suites ==");
    for bound in ["esseen", "thm1_tail", "thm1_floor", "cor1", "cor2"] {
        for seed in [1u64, 2] {
            let suite = constant_suite(seed, 50, 1, &base);
            match estimate_constant(bound, &suite, seed) {
                Ok(e) => println!("{bound} d=1 seed={seed}: max_ratio={:.6} argmax={}", e.max_ratio, e.argmax_scenario_id),
                Err(e) => println!("{bound} d=1 seed={seed}: {e}"),
            }
        }
    }

    println!("== structured thm1 suites ==");
    for d in [1usize, 2] {
        for seed in [11u64, 12] {
            let suite = thm1_suite(seed, d);
            let (max, used, id) = max_ratio(&suite, "thm1_tail");
            println!("thm1_tail d={d} seed={seed}: max_ratio={max:.6} used={used}/{} argmax={id}", suite.len());
        }
    }
    println!("== esseen over structured suites d=1 ==");
    for seed in [11u64, 12] {
        let suite = thm1_suite(seed, 1);
        let (max, used, id) = max_ratio(&suite, "esseen");
        println!("esseen d=1 seed={seed}: max_ratio={max:.6} used={used} argmax={id}");
    }

    println!("== proxy/Q band ==");
    let spec = QuadratureSpec::default();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for idx in 0..50u64 {
        let mut rng = instance_rng(501, idx);
        let n = rng.random_range(2..=10);
        let a = random_weights(&mut rng, n, 1);
        let lambda = rng.random_range(0.1..2.0);
        let tau = rng.random_range(0.3..1.5);
        let batch = sample_h(&a, lambda, 200_000, rng.random()).unwrap();
        let q = q_monte_carlo(&batch, tau).unwrap();
        let fhat = CfHandle::from_compound_poisson(&a, 1.0, lambda).unwrap();
        let proxy = q_proxy_symmetric(&fhat, tau, &spec).unwrap();
        let ratio = proxy.value / q.estimate;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    println!("H-sample ratios: [{lo:.4}, {hi:.4}]");

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for idx in 0..50u64 {
        let mut rng = instance_rng(502, idx);
        let n = rng.random_range(2..=8);
        let a = random_weights(&mut rng, n, 1);
        let f = random_law(&mut rng, 2);
        let g = weighted_sum_dist(&a, &f.symmetrize().unwrap(), 1 << 16)
            .unwrap()
            .to_1d()
            .unwrap();
        let tau = rng.random_range(0.3..1.5);
        let q = q_exact_1d(&g, tau).unwrap();
        let atoms: Vec<(f64, f64)> = g.iter().collect();
        let fhat = CfHandle::new_symmetric_nonneg(1, move |t: &[f64]| {
            let mut acc = 0.0;
            for &(z, m) in &atoms {
                acc += m * (t[0] * z).cos();
            }
            num_complex::Complex64::new(acc, 0.0)
        })
        .unwrap();
        let proxy = q_proxy_symmetric(&fhat, tau, &spec).unwrap();
        let ratio = proxy.value / q;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    println!("enumerated symmetrized ratios: [{lo:.4}, {hi:.4}]");

    println!("== scale covariance drift ==");
    let mut worst_exact = 0.0f64;
    let mut worst_bound = 0.0f64;
    for idx in 0..50u64 {
        let mut rng = instance_rng(503, idx);
        let s = anticonc::verify::random_scenario(&mut rng, 1, QuadratureSpec::default());
        let base_r = build_report(&s, &ReportOptions::default()).unwrap();
        for gamma in [0.1f64, 3.0] {
            let scaled = Scenario::new(
                s.weights.scaled(gamma).unwrap(),
                s.law_x.clone(),
                s.tau * gamma,
                s.epsilon * gamma,
                s.quadrature.clone(),
                s.enumeration_cap,
            )
            .unwrap();
            let r = build_report(&scaled, &ReportOptions::default()).unwrap();
            if let (Some(a), Some(b)) = (base_r.q_exact, r.q_exact) {
                worst_exact = worst_exact.max((a - b).abs() / a.abs().max(1e-300));
            }
            for (x, y) in [
                (base_r.esseen, r.esseen),
                (base_r.thm1_tail, r.thm1_tail),
                (base_r.cor1, r.cor1),
                (base_r.cor2, r.cor2),
            ] {
                if let (Some(x), Some(y)) = (x, y) {
                    worst_bound = worst_bound.max((x - y).abs() / x.abs().max(1e-300));
                }
            }
        }
    }
    println!("worst q_exact rel drift: {worst_exact:.3e}");
    println!("worst bound rel drift:   {worst_bound:.3e}");
}
