//! Evaluators for the infinitely divisible comparison bounds, the regularity
//! inequality, and assembled per-scenario reports.
//!
//! Scale conventions: every comparison value is built from `q_h` terms at
//! radius `tau / |z|`. A radius that degenerates to 0 (tau = 0, z != 0) is
//! evaluated at the scenario's `epsilon` instead, which stays a valid upper
//! bound because concentration functions are non-decreasing in the radius.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::charfn::{esseen_upper, q_h, CfHandle, QuadratureSpec};
use crate::dist::{strict_floor_f64, DiscreteDist1D, WeightMatrix};
use crate::error::{Error, Result};
use crate::exact::{
    q_exact_1d, q_exact_2d, q_monte_carlo, sample_weighted_sum, weighted_sum_dist, McEstimate,
    DEFAULT_2D_ATOM_CAP,
};
use crate::scenario::Scenario;

/// A bound value plus whether every quadrature behind it converged.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BoundValue {
    pub value: f64,
    pub converged: bool,
}

/// Check the comparison-measure hypothesis `V <= G` atom by atom: every `V`
/// atom must be a `G` atom (within merge tolerance) carrying no more than
/// the `G` mass plus 1e-12.
pub fn validate_v_le_g(v: &DiscreteDist1D, g: &DiscreteDist1D) -> Result<()> {
    for (z, vm) in v.iter() {
        let gm = g.mass_at(z);
        if gm == 0.0 {
            return Err(Error::contract(format!(
                "V atom z={z} is not an atom of G"
            )));
        }
        if vm > gm + 1e-12 {
            return Err(Error::contract(format!(
                "V mass {vm} exceeds G mass {gm} at atom z={z}"
            )));
        }
    }
    Ok(())
}

/// Mixture comparison bound: `Σ_j w_j · Q(H_1^λ, tau/|z_j|)` with
/// `λ = V{R}`, `W = V/λ`, over the atoms `z_j` of `V`. The `z = 0` atom
/// contributes `w_j · 1` (infinite radius).
///
/// The caller is responsible for `V <= G` ([`validate_v_le_g`]).
/// `epsilon` is used only as the evaluation radius when `tau = 0` makes a
/// term's radius degenerate.
pub fn theorem1_rhs(
    a: &WeightMatrix,
    v: &DiscreteDist1D,
    tau: f64,
    epsilon: f64,
    spec: &QuadratureSpec,
) -> Result<BoundValue> {
    let lambda = v.total_mass();
    if !(lambda > 0.0) {
        return Err(Error::domain(format!(
            "theorem1_rhs needs V with positive total mass, got {lambda}"
        )));
    }
    if tau.is_nan() || tau < 0.0 {
        return Err(Error::domain(format!("tau must be >= 0, got {tau}")));
    }
    if !(epsilon > 0.0) {
        return Err(Error::domain(format!("epsilon must be > 0, got {epsilon}")));
    }
    let mut value = 0.0;
    let mut converged = true;
    for (z, mass) in v.iter() {
        let w = mass / lambda;
        let term = if z == 0.0 {
            1.0
        } else {
            let radius = tau / z.abs();
            let radius = if radius == 0.0 { epsilon } else { radius };
            let qh = q_h(a, lambda, radius, spec)?;
            converged &= qh.converged;
            qh.value
        };
        value += w * term;
    }
    Ok(BoundValue { value, converged })
}

/// Tail-mixture corollary bound: the comparison bound instantiated with
/// `V = p1·G1`, the part of `G` beyond `tau/epsilon`
/// (`p1 = p(tau/epsilon)`). Returns the vacuous value 1 when the tail is
/// empty.
pub fn corollary1_rhs(
    a: &WeightMatrix,
    g: &DiscreteDist1D,
    tau: f64,
    epsilon: f64,
    spec: &QuadratureSpec,
) -> Result<BoundValue> {
    if !(epsilon > 0.0) {
        return Err(Error::domain(format!("epsilon must be > 0, got {epsilon}")));
    }
    if tau.is_nan() || tau < 0.0 {
        return Err(Error::domain(format!("tau must be >= 0, got {tau}")));
    }
    let delta = tau / epsilon;
    let p1 = g.tail_mass(delta)?;
    if p1 == 0.0 {
        return Ok(BoundValue {
            value: 1.0,
            converged: true,
        });
    }
    let mut value = 0.0;
    let mut converged = true;
    for (z, mass) in g.iter() {
        if z.abs() <= delta {
            continue;
        }
        let w = mass / p1;
        let radius = tau / z.abs();
        let radius = if radius == 0.0 { epsilon } else { radius };
        let qh = q_h(a, p1, radius, spec)?;
        converged &= qh.converged;
        value += w * qh.value;
    }
    Ok(BoundValue { value, converged })
}

/// Weight `(1 + floor(ratio))^{-d}` with the strict floor; ratio < 1 gives
/// exactly 1, and the diverging-ratio limit gives 0.
fn floor_weight(ratio: f64, d: usize) -> f64 {
    if ratio < 1.0 {
        1.0
    } else {
        (1.0 + strict_floor_f64(ratio)).powi(-(d as i32))
    }
}

/// Total mass of the floor-weighted comparison measure:
/// `λ(G, tau/epsilon) = Σ_z G{z} · (1 + floor(tau/(epsilon·|z|)))^{-d}`,
/// with the `z = 0` atom contributing 0.
///
/// Summed in two passes (weight-1 atoms first, in atom order) so that
/// `corollary2_lambda >= tail_mass(G, tau/epsilon)` holds exactly in
/// floating point, not just analytically.
pub fn corollary2_lambda(g: &DiscreteDist1D, tau: f64, epsilon: f64, d: usize) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(Error::domain(format!("epsilon must be > 0, got {epsilon}")));
    }
    if tau.is_nan() || tau < 0.0 {
        return Err(Error::domain(format!("tau must be >= 0, got {tau}")));
    }
    if d == 0 {
        return Err(Error::domain("dimension must be >= 1"));
    }
    let delta = tau / epsilon;
    let mut lambda = 0.0;
    for (z, mass) in g.iter() {
        if z != 0.0 && delta / z.abs() < 1.0 {
            lambda += mass;
        }
    }
    for (z, mass) in g.iter() {
        if z == 0.0 {
            continue;
        }
        let ratio = delta / z.abs();
        if ratio >= 1.0 {
            lambda += mass * floor_weight(ratio, d);
        }
    }
    Ok(lambda)
}

/// The floor-weighted comparison measure itself: `V{z} = w(z)·G{z}` over
/// the nonzero atoms. `None` when every weight vanishes.
pub fn floor_weighted_v(
    g: &DiscreteDist1D,
    tau: f64,
    epsilon: f64,
    d: usize,
) -> Result<Option<DiscreteDist1D>> {
    if !(epsilon > 0.0) {
        return Err(Error::domain(format!("epsilon must be > 0, got {epsilon}")));
    }
    let delta = tau / epsilon;
    let pairs: Vec<(f64, f64)> = g
        .iter()
        .filter(|&(z, _)| z != 0.0)
        .map(|(z, mass)| (z, mass * floor_weight(delta / z.abs(), d)))
        .filter(|&(_, m)| m > 0.0)
        .collect();
    if pairs.is_empty() {
        return Ok(None);
    }
    Ok(Some(DiscreteDist1D::sub_probability(pairs)?))
}

/// Floor-weighted corollary bound: `λ^{-1} · Q(H_1^λ, epsilon)` with
/// `λ = corollary2_lambda`.
pub fn corollary2_rhs(
    a: &WeightMatrix,
    g: &DiscreteDist1D,
    tau: f64,
    epsilon: f64,
    spec: &QuadratureSpec,
) -> Result<BoundValue> {
    let lambda = corollary2_lambda(g, tau, epsilon, a.dim())?;
    if lambda == 0.0 {
        return Err(Error::domain(
            "corollary2 lambda is 0; the bound is undefined (vacuous)",
        ));
    }
    let qh = q_h(a, lambda, epsilon, spec)?;
    Ok(BoundValue {
        value: qh.value / lambda,
        converged: qh.converged,
    })
}

/// Regularity comparison in d = 1: returns `(Q(F, mu), (1 + floor(mu/lambda)) · Q(F, lambda))`
/// with the strict floor, both sides exact.
pub fn regularity_check(f: &DiscreteDist1D, mu: f64, lambda: f64) -> Result<(f64, f64)> {
    if !(mu > 0.0) || !(lambda > 0.0) {
        return Err(Error::domain(format!(
            "regularity_check needs mu, lambda > 0, got mu={mu}, lambda={lambda}"
        )));
    }
    let lhs = q_exact_1d(f, mu)?;
    let q_lambda = q_exact_1d(f, lambda)?;
    let factor = 1.0 + strict_floor_f64(mu / lambda);
    Ok((lhs, factor * q_lambda))
}

/// Which comparison measure feeds the headline theorem bound.
#[derive(Clone, Debug)]
pub enum VChoice {
    /// `V = p1·G1`, the tail of `G` beyond `tau/epsilon`.
    Tail,
    /// The floor-weighted measure of the second corollary.
    FloorWeighted,
    /// Any validated `V <= G`.
    Custom(DiscreteDist1D),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    All,
    Esseen,
    Thm1,
    Cor1,
    Cor2,
}

impl Which {
    fn wants(self, other: Which) -> bool {
        self == Which::All || self == other
    }
}

#[derive(Clone, Debug)]
pub struct ReportOptions {
    pub id: u64,
    pub which: Which,
    pub v_choice: VChoice,
    pub mc_samples: usize,
    pub mc_seed: u64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            id: 0,
            which: Which::All,
            v_choice: VChoice::Tail,
            mc_samples: 200_000,
            mc_seed: 0,
        }
    }
}

fn serialize_tau<S: serde::Serializer>(tau: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if tau.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*tau)
    }
}

/// One scenario's exact/estimated concentration plus every bound value,
/// ratios against the reference, and diagnostic flags.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub id: u64,
    pub n: usize,
    pub d: usize,
    #[serde(serialize_with = "serialize_tau")]
    pub tau: f64,
    pub epsilon: f64,
    pub q_exact: Option<f64>,
    pub q_method: Option<String>,
    pub q_mc: Option<McEstimate>,
    pub q_mc_seed: Option<u64>,
    pub q_mc_count: Option<usize>,
    pub esseen: Option<f64>,
    pub thm1_tail: Option<f64>,
    pub thm1_floor: Option<f64>,
    pub thm1_custom: Option<f64>,
    pub cor1: Option<f64>,
    pub cor2: Option<f64>,
    pub cor2_lambda: Option<f64>,
    /// bound name -> bound / q, for whichever q is available.
    pub ratios: BTreeMap<String, f64>,
    pub flags: Vec<String>,
    /// Resolved scenario configuration.
    pub scenario: serde_json::Value,
}

pub const CSV_HEADER: &str = "scenario_id,n,d,tau,epsilon,q_exact,q_mc,q_mc_stderr,esseen,thm1_tail,thm1_floor,cor1,cor2,cor2_lambda,flags";

fn csv_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

impl BoundReport {
    pub fn to_csv_row(&self) -> String {
        let tau = if self.tau.is_infinite() {
            "inf".to_string()
        } else {
            format!("{}", self.tau)
        };
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.id,
            self.n,
            self.d,
            tau,
            self.epsilon,
            csv_opt(self.q_exact),
            csv_opt(self.q_mc.map(|m| m.estimate)),
            csv_opt(self.q_mc.map(|m| m.stderr)),
            csv_opt(self.esseen),
            csv_opt(self.thm1_tail),
            csv_opt(self.thm1_floor),
            csv_opt(self.cor1),
            csv_opt(self.cor2),
            csv_opt(self.cor2_lambda),
            self.flags.join(";")
        )
    }

    /// The reference concentration value ratios are computed against.
    pub fn q_reference(&self) -> Option<f64> {
        self.q_exact.or(self.q_mc.map(|m| m.estimate))
    }
}

fn record_bound(
    report: &mut BoundReport,
    name: &str,
    value: f64,
    converged: bool,
) {
    let slot = match name {
        "esseen" => &mut report.esseen,
        "thm1_tail" => &mut report.thm1_tail,
        "thm1_floor" => &mut report.thm1_floor,
        "thm1_custom" => &mut report.thm1_custom,
        "cor1" => &mut report.cor1,
        "cor2" => &mut report.cor2,
        _ => unreachable!(),
    };
    *slot = Some(value);
    if value >= 1.0 {
        report.flags.push(format!("vacuous:{name}"));
    }
    if !converged {
        report.flags.push(format!("quad_nonconverged:{name}"));
    }
}

/// Compute the scenario's concentration value and every requested bound.
///
/// The exact path enumerates `S_a` when `atoms^n` fits the scenario cap and
/// the dimension supports an exact supremum; otherwise it falls back to
/// Monte Carlo (d <= 2). Partial reports are allowed: absent fields carry a
/// flag instead of failing the whole report.
pub fn build_report(s: &Scenario, opts: &ReportOptions) -> Result<BoundReport> {
    let a = &s.weights;
    let d = a.dim();
    let mut report = BoundReport {
        id: opts.id,
        n: a.n(),
        d,
        tau: s.tau,
        epsilon: s.epsilon,
        q_exact: None,
        q_method: None,
        q_mc: None,
        q_mc_seed: None,
        q_mc_count: None,
        esseen: None,
        thm1_tail: None,
        thm1_floor: None,
        thm1_custom: None,
        cor1: None,
        cor2: None,
        cor2_lambda: None,
        ratios: BTreeMap::new(),
        flags: Vec::new(),
        scenario: s.to_json_value(),
    };

    // Reference concentration value.
    match compute_q(s, opts) {
        Ok(QOutcome::Exact(q)) => {
            report.q_exact = Some(q);
            report.q_method = Some("enumeration".into());
        }
        Ok(QOutcome::Mc(est)) => {
            report.q_mc = Some(est);
            report.q_method = Some("monte-carlo".into());
            report.q_mc_seed = Some(opts.mc_seed);
            report.q_mc_count = Some(opts.mc_samples);
        }
        Ok(QOutcome::Unavailable(why)) => report.flags.push(format!("no_q:{why}")),
        Err(e) => report.flags.push(format!("no_q:{e}")),
    }

    let g = s.law_x.symmetrize()?;
    let esseen_tau = if s.tau == 0.0 { s.epsilon } else { s.tau };

    if opts.which.wants(Which::Esseen) {
        match CfHandle::from_weighted_sum(a, &s.law_x)
            .and_then(|fhat| esseen_upper(&fhat, esseen_tau, &s.quadrature))
        {
            Ok(r) => record_bound(&mut report, "esseen", r.value, r.converged),
            Err(e) => report.flags.push(format!("error:esseen:{e}")),
        }
    }

    if opts.which.wants(Which::Thm1) {
        let delta = s.tau / s.epsilon;
        match g.tail_measure(delta)? {
            Some(v) => match theorem1_rhs(a, &v, s.tau, s.epsilon, &s.quadrature) {
                Ok(b) => record_bound(&mut report, "thm1_tail", b.value, b.converged),
                Err(e) => report.flags.push(format!("error:thm1_tail:{e}")),
            },
            None => report.flags.push("vacuous:thm1_tail(empty tail V)".into()),
        }
        match floor_weighted_v(&g, s.tau, s.epsilon, d)? {
            Some(v) => match theorem1_rhs(a, &v, s.tau, s.epsilon, &s.quadrature) {
                Ok(b) => record_bound(&mut report, "thm1_floor", b.value, b.converged),
                Err(e) => report.flags.push(format!("error:thm1_floor:{e}")),
            },
            None => report.flags.push("vacuous:thm1_floor(zero-mass V)".into()),
        }
        if let VChoice::Custom(v) = &opts.v_choice {
            validate_v_le_g(v, &g)?;
            match theorem1_rhs(a, v, s.tau, s.epsilon, &s.quadrature) {
                Ok(b) => record_bound(&mut report, "thm1_custom", b.value, b.converged),
                Err(e) => report.flags.push(format!("error:thm1_custom:{e}")),
            }
        }
    }

    if opts.which.wants(Which::Cor1) {
        match corollary1_rhs(a, &g, s.tau, s.epsilon, &s.quadrature) {
            Ok(b) => record_bound(&mut report, "cor1", b.value, b.converged),
            Err(e) => report.flags.push(format!("error:cor1:{e}")),
        }
    }

    if opts.which.wants(Which::Cor2) {
        let lambda = corollary2_lambda(&g, s.tau, s.epsilon, d)?;
        report.cor2_lambda = Some(lambda);
        if lambda == 0.0 {
            report.flags.push("vacuous:cor2(lambda=0)".into());
        } else {
            match corollary2_rhs(a, &g, s.tau, s.epsilon, &s.quadrature) {
                Ok(b) => record_bound(&mut report, "cor2", b.value, b.converged),
                Err(e) => report.flags.push(format!("error:cor2:{e}")),
            }
        }
    }

    if let Some(q) = report.q_reference() {
        if q > 0.0 {
            for (name, value) in [
                ("esseen", report.esseen),
                ("thm1_tail", report.thm1_tail),
                ("thm1_floor", report.thm1_floor),
                ("thm1_custom", report.thm1_custom),
                ("cor1", report.cor1),
                ("cor2", report.cor2),
            ] {
                if let Some(v) = value {
                    report.ratios.insert(name.into(), v / q);
                }
            }
        }
    }

    Ok(report)
}

enum QOutcome {
    Exact(f64),
    Mc(McEstimate),
    Unavailable(String),
}

fn compute_q(s: &Scenario, opts: &ReportOptions) -> Result<QOutcome> {
    let a = &s.weights;
    let d = a.dim();
    if d > 2 {
        return Ok(QOutcome::Unavailable(format!(
            "exact and Monte Carlo concentration are implemented for d <= 2, scenario has d = {d}"
        )));
    }
    match weighted_sum_dist(a, &s.law_x, s.enumeration_cap) {
        Ok(fa) => {
            if d == 1 {
                return Ok(QOutcome::Exact(q_exact_1d(&fa.to_1d()?, s.tau)?));
            }
            if fa.len() <= DEFAULT_2D_ATOM_CAP {
                return Ok(QOutcome::Exact(q_exact_2d(&fa, s.tau)?));
            }
            // fall through to Monte Carlo on too many planar atoms
        }
        Err(Error::ResourceCap(_)) => {}
        Err(e) => return Err(e),
    }
    let batch = sample_weighted_sum(a, &s.law_x, opts.mc_samples, opts.mc_seed)?;
    Ok(QOutcome::Mc(q_monte_carlo(&batch, s.tau)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charfn::QuadratureSpec;

    fn rademacher() -> DiscreteDist1D {
        DiscreteDist1D::probability([(-1.0, 0.5), (1.0, 0.5)]).unwrap()
    }

    fn sym_rademacher() -> DiscreteDist1D {
        rademacher().symmetrize().unwrap()
    }

    #[test]
    fn v_le_g_validation() {
        let g = sym_rademacher();
        let ok = DiscreteDist1D::sub_probability([(2.0, 0.25), (-2.0, 0.1)]).unwrap();
        assert!(validate_v_le_g(&ok, &g).is_ok());

        let wrong_atom = DiscreteDist1D::sub_probability([(1.0, 0.1)]).unwrap();
        let err = validate_v_le_g(&wrong_atom, &g).unwrap_err();
        assert!(err.to_string().contains("z=1"));

        let too_heavy = DiscreteDist1D::sub_probability([(2.0, 0.3)]).unwrap();
        assert!(validate_v_le_g(&too_heavy, &g).is_err());
    }

    #[test]
    fn theorem1_single_atom_and_origin() {
        let a = WeightMatrix::from_1d(vec![1.0, 1.0, 1.0]).unwrap();
        let spec = QuadratureSpec::default();

        // single off-origin atom: one q_h term
        let v = DiscreteDist1D::sub_probability([(2.0, 0.4)]).unwrap();
        let b = theorem1_rhs(&a, &v, 1.0, 1.0, &spec).unwrap();
        let expected = q_h(&a, 0.4, 0.5, &spec).unwrap().value;
        assert!((b.value - expected).abs() < 1e-15);

        // all mass at the origin: every term is Q(., inf) = 1
        let v0 = DiscreteDist1D::sub_probability([(0.0, 0.5)]).unwrap();
        let b = theorem1_rhs(&a, &v0, 1.0, 1.0, &spec).unwrap();
        assert_eq!(b.value, 1.0);

        assert!(theorem1_rhs(&a, &v, -1.0, 1.0, &spec).is_err());
    }

    #[test]
    fn theorem1_tail_equals_corollary1() {
        let a = WeightMatrix::from_1d(vec![1.0; 10]).unwrap();
        let g = sym_rademacher();
        let spec = QuadratureSpec::default();
        for (tau, eps) in [(1.0, 1.0), (0.5, 0.4), (0.0, 1.0), (1.5, 2.0)] {
            let cor1 = corollary1_rhs(&a, &g, tau, eps, &spec).unwrap();
            let v = g.tail_measure(tau / eps).unwrap();
            match v {
                Some(v) => {
                    let thm1 = theorem1_rhs(&a, &v, tau, eps, &spec).unwrap();
                    assert!(
                        (thm1.value - cor1.value).abs() <= 1e-12,
                        "tau={tau} eps={eps}: {} vs {}",
                        thm1.value,
                        cor1.value
                    );
                }
                None => assert_eq!(cor1.value, 1.0),
            }
        }
    }

    #[test]
    fn corollary1_vacuous_when_tail_empty() {
        let a = WeightMatrix::from_1d(vec![1.0]).unwrap();
        let g = sym_rademacher();
        // tau/eps = 4 is beyond every atom
        let b = corollary1_rhs(&a, &g, 4.0, 1.0, &QuadratureSpec::default()).unwrap();
        assert_eq!(b.value, 1.0);
    }

    #[test]
    fn corollary2_lambda_hand_values() {
        let g = sym_rademacher();
        // ratio 0.5 at z = +-2: weight 1, lambda = 0.5
        assert_eq!(corollary2_lambda(&g, 1.0, 1.0, 1).unwrap(), 0.5);
        // ratio 2 at z = +-2: strict_floor(2) = 1, weight 1/2, lambda = 0.25
        assert_eq!(corollary2_lambda(&g, 4.0, 1.0, 1).unwrap(), 0.25);
        // tau = 0: every nonzero atom carries weight 1
        assert_eq!(corollary2_lambda(&g, 0.0, 1.0, 1).unwrap(), 0.5);
    }

    #[test]
    fn corollary2_lambda_dominates_tail_mass() {
        let g = DiscreteDist1D::probability([
            (-3.0, 0.15),
            (-0.7, 0.2),
            (0.0, 0.3),
            (0.7, 0.2),
            (3.0, 0.15),
        ])
        .unwrap();
        for tau in [0.0, 0.3, 0.7, 1.0, 2.1, 5.0] {
            let lam = corollary2_lambda(&g, tau, 1.0, 1).unwrap();
            let p = g.tail_mass(tau / 1.0).unwrap();
            assert!(lam >= p, "tau={tau}: {lam} < {p}");
        }
    }

    #[test]
    fn corollary2_rhs_scales_by_lambda() {
        let a = WeightMatrix::from_1d(vec![1.0; 4]).unwrap();
        let g = sym_rademacher();
        let spec = QuadratureSpec::default();
        let lam = corollary2_lambda(&g, 1.0, 1.0, 1).unwrap();
        assert_eq!(lam, 0.5);
        let b = corollary2_rhs(&a, &g, 1.0, 1.0, &spec).unwrap();
        let qh = q_h(&a, 0.5, 1.0, &spec).unwrap().value;
        assert!((b.value - 2.0 * qh).abs() < 1e-14);

        // lambda = 0 is a domain error
        let delta0 = DiscreteDist1D::point_mass(0.0);
        assert!(corollary2_rhs(&a, &delta0, 1.0, 1.0, &spec).is_err());
    }

    #[test]
    fn regularity_examples() {
        let f = DiscreteDist1D::probability([(0.0, 0.5), (1.0, 0.5)]).unwrap();
        let (lhs, rhs) = regularity_check(&f, 2.0, 0.5).unwrap();
        assert_eq!(lhs, 1.0);
        assert!((rhs - 2.0).abs() < 1e-14);

        let point = DiscreteDist1D::point_mass(1.0);
        let (lhs, rhs) = regularity_check(&point, 3.0, 1.0).unwrap();
        assert_eq!(lhs, 1.0);
        assert_eq!(rhs, 3.0); // (1 + strict_floor(3)) * 1

        let (lhs, rhs) = regularity_check(&f, 1.0, 1.0).unwrap();
        assert!(lhs <= rhs); // factor (1 + strict_floor(1)) = 1
    }

    #[test]
    fn report_on_rademacher_n8() {
        let s = Scenario::new(
            WeightMatrix::from_1d(vec![1.0; 8]).unwrap(),
            rademacher(),
            0.0,
            1.0,
            QuadratureSpec::default(),
            1 << 24,
        )
        .unwrap();
        let r = build_report(&s, &ReportOptions::default()).unwrap();
        assert_eq!(r.q_exact, Some(70.0 / 256.0));
        assert_eq!(r.q_method.as_deref(), Some("enumeration"));
        assert!(r.esseen.is_some());
        assert!(r.thm1_tail.is_some());
        assert!(r.thm1_floor.is_some());
        assert!(r.cor1.is_some());
        assert!(r.cor2.is_some());
        assert_eq!(r.cor2_lambda, Some(0.5));
        for (name, ratio) in &r.ratios {
            assert!(*ratio > 0.0, "{name} ratio not positive");
        }
        // cor2_lambda = 1 - G{0} at tau = 0
        let g = rademacher().symmetrize().unwrap();
        assert_eq!(r.cor2_lambda.unwrap(), 1.0 - g.mass_at(0.0));
    }

    #[test]
    fn report_point_mass_is_all_vacuous_or_one() {
        let s = Scenario::new(
            WeightMatrix::from_1d(vec![1.0]).unwrap(),
            DiscreteDist1D::point_mass(1.0),
            1.0,
            1.0,
            QuadratureSpec::default(),
            1 << 24,
        )
        .unwrap();
        let r = build_report(&s, &ReportOptions::default()).unwrap();
        assert_eq!(r.q_exact, Some(1.0));
        assert_eq!(r.cor1, Some(1.0));
        assert_eq!(r.cor2_lambda, Some(0.0));
        assert!(r.cor2.is_none());
        assert!(r.flags.iter().any(|f| f.contains("vacuous:cor2")));
    }

    #[test]
    fn csv_row_has_frozen_columns() {
        assert_eq!(CSV_HEADER.split(',').count(), 15);
        let s = Scenario::new(
            WeightMatrix::from_1d(vec![1.0, 2.0]).unwrap(),
            rademacher(),
            0.5,
            1.0,
            QuadratureSpec::default(),
            1 << 24,
        )
        .unwrap();
        let r = build_report(&s, &ReportOptions::default()).unwrap();
        let row = r.to_csv_row();
        assert_eq!(row.split(',').count(), 15, "{row}");
    }

    #[test]
    fn custom_v_must_be_dominated() {
        let s = Scenario::new(
            WeightMatrix::from_1d(vec![1.0, 2.0]).unwrap(),
            rademacher(),
            0.5,
            1.0,
            QuadratureSpec::default(),
            1 << 24,
        )
        .unwrap();
        let bad = DiscreteDist1D::sub_probability([(1.0, 0.5)]).unwrap();
        let opts = ReportOptions {
            v_choice: VChoice::Custom(bad),
            ..ReportOptions::default()
        };
        assert!(matches!(build_report(&s, &opts), Err(Error::Contract(_))));
    }

    #[test]
    fn mass_merge_tolerance_documented() {
        // keep the shared constant visible in this module's contract
        assert!(crate::dist::MERGE_TOL <= 1e-12);
    }
}
