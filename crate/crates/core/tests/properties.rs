//! Property tests for the spec'd invariants. Statistical and
//! boundary-sensitive checks use fixed seeds; pure-arithmetic invariants
//! use proptest.

mod common;

use proptest::prelude::*;

use anticonc::charfn::{cf_x, cube_integral, CfHandle, QuadratureSpec};
use anticonc::dist::{strict_floor, strict_floor_f64, DiscreteDist1D, DiscreteDistD, WeightMatrix};
use anticonc::exact::{
    q_exact_1d, q_exact_2d, q_monte_carlo, sample_h, weighted_sum_dist, DEFAULT_ENUMERATION_CAP,
};
use anticonc::verify::{instance_rng, random_law, random_scenario, random_weights};
use anticonc::{build_report, ReportOptions};
use common::{q_brute_force_1d, q_subset_oracle_2d};
use rand::Rng;

fn arb_dist(max_atoms: usize) -> impl Strategy<Value = DiscreteDist1D> {
    prop::collection::vec((-3.0..3.0f64, 0.01..1.0f64), 1..=max_atoms).prop_map(|pairs| {
        let total: f64 = pairs.iter().map(|&(_, w)| w).sum();
        DiscreteDist1D::probability(pairs.into_iter().map(|(x, w)| (x, w / total)))
            .expect("normalized pairs form a law")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn q1d_matches_brute_force(f in arb_dist(50), lambda in 0.0..6.0f64) {
        let fast = q_exact_1d(&f, lambda).unwrap();
        let brute = q_brute_force_1d(&f, lambda);
        prop_assert!((fast - brute).abs() <= 1e-12, "{fast} vs {brute}");
    }

    #[test]
    fn q1d_monotone_and_dominates_max_mass(f in arb_dist(30), l1 in 0.0..4.0f64, l2 in 0.0..4.0f64) {
        let (lo, hi) = if l1 <= l2 { (l1, l2) } else { (l2, l1) };
        let q_lo = q_exact_1d(&f, lo).unwrap();
        let q_hi = q_exact_1d(&f, hi).unwrap();
        prop_assert!(q_lo <= q_hi + 1e-15);
        prop_assert!(q_lo >= f.max_mass() - 1e-15);
    }

    #[test]
    fn symmetrize_is_exactly_symmetric(f in arb_dist(12)) {
        let g = f.symmetrize().unwrap();
        let m = g.len();
        for i in 0..m {
            prop_assert_eq!(g.atoms()[i], -g.atoms()[m - 1 - i]);
            prop_assert_eq!(g.masses()[i], g.masses()[m - 1 - i]);
        }
        let diag: f64 = f.masses().iter().map(|p| p * p).sum();
        prop_assert!(g.mass_at(0.0) >= diag - 1e-15);
    }

    #[test]
    fn tail_mass_monotone_and_complements_origin(f in arb_dist(20), d1 in 0.0..4.0f64, d2 in 0.0..4.0f64) {
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        prop_assert!(f.tail_mass(lo).unwrap() >= f.tail_mass(hi).unwrap() - 1e-15);
        let at_zero = f.tail_mass(0.0).unwrap();
        prop_assert!((at_zero - (1.0 - f.mass_at(0.0))).abs() <= 1e-12);
    }

    #[test]
    fn restrict_and_normalize_partitions_mass(f in arb_dist(20), threshold in 0.0..3.0f64) {
        let (p1, g1) = f.restrict_and_normalize(threshold).unwrap();
        let inner: f64 = f.iter().filter(|&(z, _)| z.abs() <= threshold).map(|(_, m)| m).sum();
        prop_assert!((p1 + inner - 1.0).abs() <= 1e-12);
        match g1 {
            Some(g1) => {
                prop_assert!((g1.masses().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
                prop_assert!(g1.atoms().iter().all(|z| z.abs() > threshold));
            }
            None => prop_assert!(p1 == 0.0),
        }
    }

    #[test]
    fn strict_floor_vs_standard_floor(x in 0.001..1e9f64) {
        let sf = strict_floor(x).unwrap();
        if x.fract() == 0.0 {
            prop_assert_eq!(sf, x as u64 - 1);
        } else {
            prop_assert_eq!(sf, x.floor() as u64);
        }
        prop_assert_eq!(sf as f64, strict_floor_f64(x));
    }

    #[test]
    fn regularity_with_cover_constant(f in arb_dist(25), mu in 0.01..3.0f64, lam in 0.01..3.0f64) {
        let q_mu = q_exact_1d(&f, mu).unwrap();
        let q_lam = q_exact_1d(&f, lam).unwrap();
        if mu >= lam {
            let factor = 2.0 + strict_floor_f64(mu / lam);
            prop_assert!(q_mu <= factor * q_lam + 1e-12);
        }
    }

    #[test]
    fn symmetrization_identity_for_cf(f in arb_dist(8), s in -8.0..8.0f64) {
        let g = f.symmetrize().unwrap();
        let lhs = cf_x(&f, s).norm_sqr();
        let rhs = cf_x(&g, s).re;
        prop_assert!((lhs - rhs).abs() < 1e-10);
    }
}

#[test]
fn weighted_sum_mass_and_count() {
    for idx in 0..50u64 {
        let mut rng = instance_rng(401, idx);
        let d = if idx % 4 == 0 { 2 } else { 1 };
        let n = rng.random_range(1..=8);
        let a = random_weights(&mut rng, n, d);
        let f = random_law(&mut rng, 3);
        let fa = weighted_sum_dist(&a, &f, DEFAULT_ENUMERATION_CAP).unwrap();
        let total: f64 = fa.masses().iter().sum();
        assert!((total - 1.0).abs() <= 1e-12);
        assert!(fa.len() as u128 <= (f.len() as u128).pow(n as u32));
    }
}

#[test]
fn q2d_matches_subset_oracle() {
    for idx in 0..200u64 {
        let mut rng = instance_rng(402, idx);
        let m = rng.random_range(2..=9);
        let mut points = Vec::with_capacity(m * 2);
        for _ in 0..2 * m {
            points.push(rng.random_range(-2.0..2.0));
        }
        let raw: Vec<f64> = (0..m).map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let masses: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let f = DiscreteDistD::new(2, points, masses).unwrap();
        let lambda = rng.random_range(0.0..5.0);
        let fast = q_exact_2d(&f, lambda).unwrap();
        let oracle = q_subset_oracle_2d(&f, lambda);
        assert!(
            (fast - oracle).abs() <= 1e-12,
            "instance {idx}: {fast} vs {oracle} (lambda {lambda})"
        );
    }
}

#[test]
fn sample_h_scaling_identity() {
    // H_z^lambda is the law of z*eta with eta ~ H_1^lambda
    let a = WeightMatrix::from_1d(vec![1.0, 2.0, 3.0]).unwrap();
    let lambda = 1.0;
    let z = 2.5;
    let batch = sample_h(&a, lambda, 400_000, 77).unwrap();
    let scaled = batch.scaled(z);
    for (i, t) in [0.3, 0.9, 1.7].iter().enumerate() {
        let m = common::empirical_cf_moments(&scaled, &[*t]);
        let expected = anticonc::cf_h(&a, z, lambda, &[*t]).unwrap();
        assert!(
            (m.re_mean - expected).abs() <= 3.0 * m.re_se + 1e-9,
            "t index {i}: {} vs {expected}",
            m.re_mean
        );
        assert!(m.im_mean.abs() <= 3.0 * m.im_se + 1e-9);
    }
    // Q(H_z, tau) = Q(H_1, tau/|z|) within Monte Carlo error
    let tau = 1.2;
    let q_scaled = q_monte_carlo(&scaled, tau).unwrap();
    let q_base = q_monte_carlo(&batch, tau / z).unwrap();
    let tol = 4.0 * (q_scaled.stderr + q_base.stderr) + 1e-3;
    assert!(
        (q_scaled.estimate - q_base.estimate).abs() <= tol,
        "{} vs {}",
        q_scaled.estimate,
        q_base.estimate
    );
}

#[test]
fn bounds_invariant_under_row_permutation_and_negation() {
    for idx in 0..20u64 {
        let mut rng = instance_rng(403, idx);
        let s = random_scenario(&mut rng, 1, QuadratureSpec::default());
        let base = build_report(&s, &ReportOptions::default()).unwrap();

        // reverse the rows and negate every other one
        let mut rows = s.weights.to_nested();
        rows.reverse();
        for (k, row) in rows.iter_mut().enumerate() {
            if k % 2 == 0 {
                for x in row.iter_mut() {
                    *x = -*x;
                }
            }
        }
        let permuted = anticonc::Scenario::new(
            WeightMatrix::from_rows(&rows).unwrap(),
            s.law_x.clone(),
            s.tau,
            s.epsilon,
            s.quadrature.clone(),
            s.enumeration_cap,
        )
        .unwrap();
        let alt = build_report(&permuted, &ReportOptions::default()).unwrap();

        for (name, lhs, rhs) in [
            ("esseen", base.esseen, alt.esseen),
            ("thm1_tail", base.thm1_tail, alt.thm1_tail),
            ("thm1_floor", base.thm1_floor, alt.thm1_floor),
            ("cor1", base.cor1, alt.cor1),
            ("cor2", base.cor2, alt.cor2),
        ] {
            match (lhs, rhs) {
                (Some(x), Some(y)) => assert!(
                    (x - y).abs() <= 1e-12 * x.abs().max(1.0),
                    "instance {idx} {name}: {x} vs {y}"
                ),
                (None, None) => {}
                other => panic!("instance {idx} {name}: presence mismatch {other:?}"),
            }
        }
    }
}

#[test]
fn q_exact_negation_invariant_for_symmetric_law() {
    let x = DiscreteDist1D::probability([(-1.0, 0.5), (1.0, 0.5)]).unwrap();
    for idx in 0..20u64 {
        let mut rng = instance_rng(404, idx);
        let n = rng.random_range(2..=10);
        let a = random_weights(&mut rng, n, 1);
        let tau = rng.random_range(0.0..2.0);
        let q1 = q_exact_1d(
            &weighted_sum_dist(&a, &x, 1 << 20).unwrap().to_1d().unwrap(),
            tau,
        )
        .unwrap();
        let mut rows = a.to_nested();
        for (k, row) in rows.iter_mut().enumerate() {
            if k % 3 == 0 {
                row[0] = -row[0];
            }
        }
        let neg = WeightMatrix::from_rows(&rows).unwrap();
        let q2 = q_exact_1d(
            &weighted_sum_dist(&neg, &x, 1 << 20).unwrap().to_1d().unwrap(),
            tau,
        )
        .unwrap();
        assert!((q1 - q2).abs() <= 1e-12, "instance {idx}: {q1} vs {q2}");
    }
}

#[test]
fn quadrature_converges_on_shipped_integrands() {
    let spec = QuadratureSpec::default();
    let handles: Vec<(&str, CfHandle, f64)> = vec![
        (
            "gaussian",
            CfHandle::new_symmetric_nonneg(1, |t: &[f64]| {
                num_complex::Complex64::new((-t[0] * t[0] / 2.0).exp(), 0.0)
            })
            .unwrap(),
            0.7,
        ),
        (
            "compound_poisson",
            CfHandle::from_compound_poisson(&WeightMatrix::from_1d(vec![1.0, 2.0, 3.5]).unwrap(), 1.0, 1.3)
                .unwrap(),
            0.4,
        ),
        (
            "weighted_sum",
            CfHandle::from_weighted_sum(
                &WeightMatrix::from_1d(vec![1.0; 6]).unwrap(),
                &DiscreteDist1D::probability([(-1.0, 0.5), (1.0, 0.5)]).unwrap(),
            )
            .unwrap(),
            1.0,
        ),
    ];
    for (name, h, tau) in handles {
        let r = cube_integral(&h, tau, &spec).unwrap();
        assert!(r.converged, "{name} did not converge");
        assert!(
            r.est_error <= spec.rel_tol * r.value.abs().max(1e-300),
            "{name}: est_error {} vs value {}",
            r.est_error,
            r.value
        );
    }
}
