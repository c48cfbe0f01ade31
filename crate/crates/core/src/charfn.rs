//! Characteristic functions and cube quadrature.
//!
//! Integration domains are cubes `[-1/tau, 1/tau]^d` (the max-norm ball of
//! the frequency variable), while concentration balls downstream are
//! Euclidean. The two norms are deliberately different.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::{dot, DiscreteDist1D, WeightMatrix};
use crate::error::{Error, Result};

/// Hard ceiling on tensor-grid evaluations per refinement level. Refinement
/// stops (flagged, not failed) rather than cross it.
pub const EVAL_CAP: usize = 1 << 23;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadRule {
    Trapezoid,
    GaussLegendreComposite,
}

/// Cube-integration configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSpec {
    /// Odd node count per axis at the coarsest level (>= 3).
    pub nodes_per_axis: usize,
    /// How many node-doubling passes may follow the first level.
    pub max_refinements: u32,
    /// Refinement stops when the relative change drops below this.
    pub rel_tol: f64,
    pub rule: QuadRule,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            nodes_per_axis: 513,
            max_refinements: 6,
            rel_tol: 1e-6,
            rule: QuadRule::Trapezoid,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.nodes_per_axis < 3 || self.nodes_per_axis % 2 == 0 {
            return Err(Error::InvalidInput(format!(
                "nodes_per_axis must be odd and >= 3, got {}",
                self.nodes_per_axis
            )));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidInput(format!(
                "rel_tol must be positive, got {}",
                self.rel_tol
            )));
        }
        Ok(())
    }

    /// Fixed-grid variant (no refinement passes), used where several
    /// quantities must be compared on one aligned node set.
    pub fn fixed_grid(nodes_per_axis: usize) -> Self {
        Self {
            nodes_per_axis,
            max_refinements: 0,
            rel_tol: 1e-6,
            rule: QuadRule::Trapezoid,
        }
    }
}

/// Outcome of one cube integration.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    /// Last-refinement delta; 0 when no refinement pass was made.
    pub est_error: f64,
    pub converged: bool,
    pub nodes_per_axis: usize,
}

/// Several integrands evaluated on one shared node set.
#[derive(Clone, Debug)]
pub struct MultiQuadResult {
    pub values: Vec<f64>,
    pub est_errors: Vec<f64>,
    pub converged: bool,
    pub nodes_per_axis: usize,
}

fn nodes_1d(rule: QuadRule, half_width: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    match rule {
        QuadRule::Trapezoid => {
            let h = 2.0 * half_width / (n - 1) as f64;
            let xs: Vec<f64> = (0..n).map(|i| -half_width + h * i as f64).collect();
            let mut ws = vec![h; n];
            ws[0] = h / 2.0;
            ws[n - 1] = h / 2.0;
            (xs, ws)
        }
        QuadRule::GaussLegendreComposite => {
            // 8-point Gauss-Legendre per panel.
            const GX: [f64; 8] = [
                -0.9602898564975362,
                -0.7966664774136267,
                -0.525532409916329,
                -0.18343464249564978,
                0.18343464249564978,
                0.525532409916329,
                0.7966664774136267,
                0.9602898564975362,
            ];
            const GW: [f64; 8] = [
                0.10122853629037669,
                0.22238103445337434,
                0.31370664587788705,
                0.36268378337836177,
                0.36268378337836177,
                0.31370664587788705,
                0.22238103445337434,
                0.10122853629037669,
            ];
            let panels = ((n - 1) + 7) / 8;
            let hw = half_width / panels as f64;
            let mut xs = Vec::with_capacity(panels * 8);
            let mut ws = Vec::with_capacity(panels * 8);
            for p in 0..panels {
                let center = -half_width + (2 * p + 1) as f64 * hw;
                for k in 0..8 {
                    xs.push(center + hw * GX[k]);
                    ws.push(hw * GW[k]);
                }
            }
            (xs, ws)
        }
    }
}

/// One tensor-product pass: accumulates `k` integrand components at every
/// node of the grid. Nodes are evaluated in parallel chunks and the chunk
/// partials are reduced in a fixed order, so the result is deterministic.
fn level_values<F>(d: usize, half_width: f64, rule: QuadRule, n: usize, k: usize, f: &F) -> Vec<f64>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    let (xs, ws) = nodes_1d(rule, half_width, n);
    let m = xs.len();
    let partials: Vec<Vec<f64>> = match d {
        1 => {
            let chunk = 1024.max(m / (8 * rayon::current_num_threads().max(1)) + 1);
            (0..m)
                .collect::<Vec<_>>()
                .par_chunks(chunk)
                .map(|idxs| {
                    let mut acc = vec![0.0; k];
                    let mut vals = vec![0.0; k];
                    for &i in idxs {
                        f(&[xs[i]], &mut vals);
                        for (a, v) in acc.iter_mut().zip(&vals) {
                            *a += ws[i] * v;
                        }
                    }
                    acc
                })
                .collect()
        }
        2 => (0..m)
            .into_par_iter()
            .map(|i| {
                let mut acc = vec![0.0; k];
                let mut vals = vec![0.0; k];
                for j in 0..m {
                    f(&[xs[i], xs[j]], &mut vals);
                    let w = ws[i] * ws[j];
                    for (a, v) in acc.iter_mut().zip(&vals) {
                        *a += w * v;
                    }
                }
                acc
            })
            .collect(),
        3 => (0..m)
            .into_par_iter()
            .map(|i| {
                let mut acc = vec![0.0; k];
                let mut vals = vec![0.0; k];
                for j in 0..m {
                    let wij = ws[i] * ws[j];
                    for l in 0..m {
                        f(&[xs[i], xs[j], xs[l]], &mut vals);
                        let w = wij * ws[l];
                        for (a, v) in acc.iter_mut().zip(&vals) {
                            *a += w * v;
                        }
                    }
                }
                acc
            })
            .collect(),
        _ => unreachable!("dimension checked by callers"),
    };
    let mut total = vec![0.0; k];
    for p in partials {
        for (t, v) in total.iter_mut().zip(&p) {
            *t += v;
        }
    }
    total
}

fn grid_evals(d: usize, n: usize) -> usize {
    (0..d).try_fold(1usize, |acc, _| acc.checked_mul(n)).unwrap_or(usize::MAX)
}

/// Integrate `k` real integrands over the cube `[-half_width, half_width]^d`
/// on one shared, refined node set.
pub fn integrate_cube_multi<F>(
    d: usize,
    half_width: f64,
    spec: &QuadratureSpec,
    k: usize,
    f: F,
) -> Result<MultiQuadResult>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    if d == 0 || d > 3 {
        return Err(Error::UnsupportedDimension {
            d,
            why: "cube quadrature is implemented for d <= 3",
        });
    }
    if !(half_width > 0.0) || !half_width.is_finite() {
        return Err(Error::domain(format!(
            "cube half-width must be positive and finite, got {half_width}"
        )));
    }
    spec.validate()?;

    // Shrink the initial grid if the requested level alone would blow the
    // evaluation cap (relevant for d = 3 with the 513 default).
    let mut n = spec.nodes_per_axis;
    while n > 3 && grid_evals(d, n) > EVAL_CAP {
        n = (n - 1) / 2 + 1;
    }

    let mut values = level_values(d, half_width, spec.rule, n, k, &f);
    let mut est_errors = vec![0.0; k];
    let mut converged = spec.max_refinements == 0;
    for _ in 0..spec.max_refinements {
        let next = 2 * n - 1;
        if grid_evals(d, next) > EVAL_CAP {
            break;
        }
        let refined = level_values(d, half_width, spec.rule, next, k, &f);
        let mut all_ok = true;
        for i in 0..k {
            est_errors[i] = (refined[i] - values[i]).abs();
            if est_errors[i] > spec.rel_tol * refined[i].abs().max(1e-300) {
                all_ok = false;
            }
        }
        values = refined;
        n = next;
        if all_ok {
            converged = true;
            break;
        }
    }

    Ok(MultiQuadResult {
        values,
        est_errors,
        converged,
        nodes_per_axis: n,
    })
}

/// A characteristic function with its dimension and shape flags.
///
/// Construction spot-checks `f(0) = 1` and `|f| <= 1` on a deterministic
/// probe set; the symmetric-nonnegative flag additionally requires the
/// probed values to be real and nonnegative.
#[derive(Clone)]
pub struct CfHandle {
    d: usize,
    f: Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>,
    symmetric_nonneg: bool,
    /// Minimum nodes per axis this evaluator wants (0 = no preference).
    node_floor: usize,
}

const PROBE_SCALES: [f64; 8] = [0.73, -0.73, 1.91, -1.91, 3.7, -3.7, 8.3, -8.3];

impl CfHandle {
    pub fn new<F>(d: usize, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    {
        Self::build(d, Arc::new(f), false, 0)
    }

    pub fn new_symmetric_nonneg<F>(d: usize, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    {
        Self::build(d, Arc::new(f), true, 0)
    }

    fn build(
        d: usize,
        f: Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>,
        symmetric_nonneg: bool,
        node_floor: usize,
    ) -> Result<Self> {
        if d == 0 {
            return Err(Error::UnsupportedDimension {
                d,
                why: "characteristic functions need d >= 1",
            });
        }
        let zero = vec![0.0; d];
        let at_zero = f(&zero);
        if (at_zero - Complex64::new(1.0, 0.0)).norm() > 1e-9 {
            return Err(Error::contract(format!(
                "characteristic function must equal 1 at t = 0, got {at_zero}"
            )));
        }
        let mut probe = vec![0.0; d];
        for &s in &PROBE_SCALES {
            for (j, p) in probe.iter_mut().enumerate() {
                *p = s / (1.0 + 0.618 * j as f64);
            }
            let v = f(&probe);
            if v.norm() > 1.0 + 1e-9 {
                return Err(Error::contract(format!(
                    "characteristic function exceeds modulus 1 at {probe:?}: {v}"
                )));
            }
            if symmetric_nonneg && (v.im.abs() > 1e-9 || v.re < -1e-9) {
                return Err(Error::contract(format!(
                    "evaluator flagged symmetric-nonnegative is not real nonnegative at {probe:?}: {v}"
                )));
            }
        }
        Ok(Self {
            d,
            f,
            symmetric_nonneg,
            node_floor,
        })
    }

    /// Characteristic function of the weighted sum `S_a` with step law `F`.
    ///
    /// The product of `n` oscillating factors needs roughly `n`-proportional
    /// resolution, so the handle carries a `64·n` node floor.
    pub fn from_weighted_sum(a: &WeightMatrix, f: &DiscreteDist1D) -> Result<Self> {
        if !f.is_probability() {
            return Err(Error::domain("cf of a weighted sum needs a probability law"));
        }
        let a = a.clone();
        let f = f.clone();
        let n = a.n();
        Self::build(
            a.dim(),
            Arc::new(move |t: &[f64]| cf_fa_unchecked(&a, &f, t)),
            false,
            64 * n,
        )
    }

    /// `Ĥ_z^λ` for the weight matrix `a` (Lévy measure on the ±rows).
    pub fn from_compound_poisson(a: &WeightMatrix, z: f64, lambda_exp: f64) -> Result<Self> {
        if lambda_exp < 0.0 || !lambda_exp.is_finite() {
            return Err(Error::domain(format!(
                "lambda exponent must be finite and >= 0, got {lambda_exp}"
            )));
        }
        let a = a.clone();
        Self::build(
            a.dim(),
            Arc::new(move |t: &[f64]| Complex64::new(cf_h_unchecked(&a, z, lambda_exp, t), 0.0)),
            true,
            0,
        )
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn symmetric_nonneg(&self) -> bool {
        self.symmetric_nonneg
    }

    pub fn eval(&self, t: &[f64]) -> Complex64 {
        (self.f)(t)
    }

    fn effective_spec(&self, spec: &QuadratureSpec) -> QuadratureSpec {
        let mut s = spec.clone();
        if self.node_floor > s.nodes_per_axis {
            s.nodes_per_axis = self.node_floor | 1; // keep it odd
        }
        s
    }
}

/// Characteristic function of a one-dimensional discrete law at `s`.
pub fn cf_x(f: &DiscreteDist1D, s: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, m) in f.iter() {
        let (sin, cos) = (s * x).sin_cos();
        acc += Complex64::new(m * cos, m * sin);
    }
    acc
}

fn cf_fa_unchecked(a: &WeightMatrix, f: &DiscreteDist1D, t: &[f64]) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for row in a.rows() {
        acc *= cf_x(f, dot(t, row));
    }
    acc
}

/// Characteristic function of `S_a = Σ X_k a_k` at the d-vector `t`:
/// the product of the step cf at each `⟨t, a_k⟩`.
pub fn cf_fa(a: &WeightMatrix, f: &DiscreteDist1D, t: &[f64]) -> Result<Complex64> {
    if t.len() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: t.len(),
        });
    }
    Ok(cf_fa_unchecked(a, f, t))
}

fn cf_h_unchecked(a: &WeightMatrix, z: f64, lambda_exp: f64, t: &[f64]) -> f64 {
    let mut s = 0.0;
    for row in a.rows() {
        s += 1.0 - (dot(t, row) * z).cos();
    }
    (-0.5 * lambda_exp * s).exp()
}

/// `Ĥ_z^λ(t) = exp(−(λ/2) Σ_k (1 − cos(⟨t, a_k⟩ z)))`: strictly positive,
/// equal to 1 at `t = 0`.
pub fn cf_h(a: &WeightMatrix, z: f64, lambda_exp: f64, t: &[f64]) -> Result<f64> {
    if t.len() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: t.len(),
        });
    }
    if lambda_exp < 0.0 || !lambda_exp.is_finite() {
        return Err(Error::domain(format!(
            "lambda exponent must be finite and >= 0, got {lambda_exp}"
        )));
    }
    Ok(cf_h_unchecked(a, z, lambda_exp, t))
}

/// Integrate a characteristic-function handle over `[-1/tau, 1/tau]^d`:
/// the real value for symmetric-nonnegative handles, the modulus otherwise.
pub fn cube_integral(f: &CfHandle, tau: f64, spec: &QuadratureSpec) -> Result<QuadResult> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::domain(format!(
            "cube_integral needs finite tau > 0, got {tau}"
        )));
    }
    let eff = f.effective_spec(spec);
    let take_re = f.symmetric_nonneg;
    let g = &f.f;
    let r = integrate_cube_multi(f.d, 1.0 / tau, &eff, 1, move |t, out| {
        let v = g(t);
        out[0] = if take_re { v.re } else { v.norm() };
    })?;
    Ok(QuadResult {
        value: r.values[0],
        est_error: r.est_errors[0],
        converged: r.converged,
        nodes_per_axis: r.nodes_per_axis,
    })
}

/// Esséen functional: `tau^d · ∫_{|t| <= 1/tau} |fhat(t)| dt`.
///
/// Callers compare `Q(F, tau) <= C_d ·` this value. `tau = ∞` returns the
/// limit `2^d` (the integrand pinned at `|fhat(0)| = 1`).
pub fn esseen_upper(fhat: &CfHandle, tau: f64, spec: &QuadratureSpec) -> Result<QuadResult> {
    if tau.is_infinite() && tau > 0.0 {
        return Ok(QuadResult {
            value: 2f64.powi(fhat.d as i32),
            est_error: 0.0,
            converged: true,
            nodes_per_axis: 0,
        });
    }
    if !(tau > 0.0) {
        return Err(Error::domain(format!("esseen_upper needs tau > 0, got {tau}")));
    }
    let eff = fhat.effective_spec(spec);
    let g = &fhat.f;
    let r = integrate_cube_multi(fhat.d, 1.0 / tau, &eff, 1, move |t, out| {
        out[0] = g(t).norm();
    })?;
    let scale = tau.powi(fhat.d as i32);
    Ok(QuadResult {
        value: scale * r.values[0],
        est_error: scale * r.est_errors[0],
        converged: r.converged,
        nodes_per_axis: r.nodes_per_axis,
    })
}

/// Two-sided concentration proxy for symmetric laws with nonnegative cf:
/// `tau^d · ∫_{|t| <= 1/tau} fhat(t) dt`, equivalent to `Q(F, tau)` up to
/// dimension constants.
pub fn q_proxy_symmetric(fhat: &CfHandle, tau: f64, spec: &QuadratureSpec) -> Result<QuadResult> {
    if !fhat.symmetric_nonneg {
        return Err(Error::contract(
            "q_proxy_symmetric needs the symmetric-nonnegative flag; the proxy is invalid for general laws"
                ,
        ));
    }
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::domain(format!(
            "q_proxy_symmetric needs finite tau > 0, got {tau}"
        )));
    }
    let eff = fhat.effective_spec(spec);
    let g = &fhat.f;
    let r = integrate_cube_multi(fhat.d, 1.0 / tau, &eff, 1, move |t, out| {
        out[0] = g(t).re;
    })?;
    let scale = tau.powi(fhat.d as i32);
    Ok(QuadResult {
        value: scale * r.values[0],
        est_error: scale * r.est_errors[0],
        converged: r.converged,
        nodes_per_axis: r.nodes_per_axis,
    })
}

/// Proxy value for `Q(H_1^λ, radius)`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct QhValue {
    /// Clamped at 1: Q is a probability while the proxy need not be
    /// (λ = 0 gives exactly `2^d`).
    pub value: f64,
    /// Pre-clamp proxy, monotone non-increasing in λ on a fixed grid.
    pub raw: f64,
    pub est_error: f64,
    pub converged: bool,
}

/// Concentration of the comparison law `H_1^λ` at the given radius, via the
/// symmetric proxy. `radius = ∞` returns exactly 1.
pub fn q_h(a: &WeightMatrix, lambda_exp: f64, radius: f64, spec: &QuadratureSpec) -> Result<QhValue> {
    if lambda_exp < 0.0 || !lambda_exp.is_finite() {
        return Err(Error::domain(format!(
            "lambda exponent must be finite and >= 0, got {lambda_exp}"
        )));
    }
    if radius.is_infinite() && radius > 0.0 {
        return Ok(QhValue {
            value: 1.0,
            raw: 1.0,
            est_error: 0.0,
            converged: true,
        });
    }
    if !(radius > 0.0) {
        return Err(Error::domain(format!("q_h needs radius > 0, got {radius}")));
    }
    let fhat = CfHandle::from_compound_poisson(a, 1.0, lambda_exp)?;
    let r = q_proxy_symmetric(&fhat, radius, spec)?;
    Ok(QhValue {
        value: r.value.min(1.0),
        raw: r.value,
        est_error: r.est_error,
        converged: r.converged,
    })
}
