//! Scan parameter regimes for the verification suites: proxy/Q bands per
//! regime, non-vacuous counts for the comparison bounds, and max-ratio
//! stability across seeds. Throwaway survey tool.

use anticonc::charfn::{q_proxy_symmetric, CfHandle, QuadratureSpec};
use anticonc::dist::DiscreteDist1D;
use anticonc::exact::{q_exact_1d, q_monte_carlo, sample_h, weighted_sum_dist};
use anticonc::verify::{
    coarse_law, coarse_random_weights, estimate_constant, fine_scale_suite, generate_family,
    instance_rng, random_law, FamilySpec,
};
use anticonc::{build_report, ReportOptions, Scenario};
use rand::Rng;

fn proxy_band_h_coarse(seed: u64, count: usize) {
    let spec = QuadratureSpec::default();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for idx in 0..count as u64 {
        let mut rng = instance_rng(seed, idx);
        let n = rng.random_range(2..=8);
        let a = coarse_random_weights(&mut rng, n, 1);
        let lambda = rng.random_range(0.1..1.5);
        let tau = rng.random_range(0.4..1.2);
        let batch = sample_h(&a, lambda, 200_000, rng.random()).unwrap();
        let q = q_monte_carlo(&batch, tau).unwrap();
        let fhat = CfHandle::from_compound_poisson(&a, 1.0, lambda).unwrap();
        let proxy = q_proxy_symmetric(&fhat, tau, &spec).unwrap();
        let ratio = proxy.value / q.estimate;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    println!("H coarse seed={seed}: band [{lo:.3}, {hi:.3}]");
}

fn proxy_band_enum_coarse(seed: u64, count: usize) {
    let spec = QuadratureSpec::default();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for idx in 0..count as u64 {
        let mut rng = instance_rng(seed, idx);
        let n = rng.random_range(2..=8);
        let a = coarse_random_weights(&mut rng, n, 1);
        let f = coarse_law(&mut rng);
        let sym = f.symmetrize().unwrap();
        let g = weighted_sum_dist(&a, &sym, 1 << 16)
            .unwrap()
            .to_1d()
            .unwrap();
        let tau = rng.random_range(0.4..1.2);
        let q = q_exact_1d(&g, tau).unwrap();
        // product form: each factor is a squared cf modulus, hence nonnegative
        let aa = a.clone();
        let fhat = CfHandle::new_symmetric_nonneg(1, move |t: &[f64]| {
            let mut acc = 1.0;
            for row in aa.rows() {
                acc *= anticonc::cf_x(&sym, t[0] * row[0]).re;
            }
            num_complex::Complex64::new(acc, 0.0)
        })
        .unwrap();
        let proxy = q_proxy_symmetric(&fhat, tau, &spec).unwrap();
        let ratio = proxy.value / q;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    println!("enum coarse seed={seed}: band [{lo:.3}, {hi:.3}]");
}

fn thm1_suite_v3(seed: u64, d: usize) -> Vec<Scenario> {
    let mut out = Vec::new();
    let mut idx = 0u64;
    let (ns, draws): (&[usize], usize) = if d == 1 {
        (&[4, 8, 12, 16], 10)
    } else {
        (&[6, 8, 12], 5)
    };
    for fam in 0..3usize {
        for &n in ns {
            for _ in 0..draws {
                let mut rng = instance_rng(seed, idx);
                idx += 1;
                // d = 2 random-uniform enumerations explode in atom count
                let n_eff = if d == 2 && fam == 2 { n.min(8) } else { n };
                let family = match fam {
                    0 => FamilySpec::AllOnes { n: n_eff, d, scale: 1.0 },
                    1 => FamilySpec::Arithmetic { n: n_eff, d, step: 2.0 / n_eff as f64 },
                    _ => FamilySpec::RandomUniform { n: n_eff, d, seed: rng.random() },
                };
                let weights = generate_family(&family).unwrap();
                let law = if rng.random_range(0..2u32) == 0 {
                    DiscreteDist1D::probability([(-1.0, 0.5), (1.0, 0.5)]).unwrap()
                } else {
                    random_law(&mut rng, 3)
                };
                let (tau, epsilon) = if d == 1 {
                    (rng.random_range(0.1..1.0), rng.random_range(0.3..1.0))
                } else {
                    (rng.random_range(0.05..0.4), rng.random_range(0.5..1.5))
                };
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

fn max_ratio(suite: &[Scenario], bound: &str) -> (f64, usize) {
    let mut max = f64::NEG_INFINITY;
    let mut used = 0;
    for (i, s) in suite.iter().enumerate() {
        let r = build_report(s, &ReportOptions { id: i as u64, ..Default::default() }).unwrap();
        let q = match r.q_reference() {
            Some(q) => q,
            None => continue,
        };
        let b = match bound {
            "thm1_tail" => r.thm1_tail,
            "cor2" => r.cor2,
            _ => None,
        };
        if let Some(b) = b {
            if b < 1.0 && b > 0.0 {
                used += 1;
                max = max.max(q / b);
            }
        }
    }
    (max, used)
}

fn main() {
    println!("-- proxy/Q coarse regimes --");
    for seed in [701u64, 702, 703] {
        proxy_band_h_coarse(seed, 50);
    }
    for seed in [711u64, 712, 713] {
        proxy_band_enum_coarse(seed, 50);
    }

    println!("-- thm1 suites v3 --");
    for d in [1usize, 2] {
        for seed in [11u64, 12, 13, 14] {
            let suite = thm1_suite_v3(seed, d);
            let (max, used) = max_ratio(&suite, "thm1_tail");
            println!(
                "thm1_tail d={d} seed={seed}: max_ratio={max:.4} used={used}/{}",
                suite.len()
            );
        }
    }

    println!("-- cor2 fine-scale suites --");
    let base = QuadratureSpec::default();
    for seed in [621u64, 622, 623] {
        let suite = fine_scale_suite(seed, 50, &base);
        let (max, used) = max_ratio(&suite, "cor2");
        println!("cor2 seed={seed}: used={used}/50 max_ratio={max:.4}");
        match estimate_constant("cor2", &suite, seed) {
            Ok(e) => println!("  estimate_constant: {:.4} argmax {}", e.max_ratio, e.argmax_scenario_id),
            Err(e) => println!("  estimate_constant: {e}"),
        }
    }
}
