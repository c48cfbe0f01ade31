//! Exact and Monte Carlo concentration functions: enumeration of the
//! weighted-sum law, closed-window suprema in d = 1 and d = 2, and sampling
//! from the compound-Poisson comparison law.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::dist::{DiscreteDist1D, DiscreteDistD, WeightMatrix};
use crate::error::{Error, Result};

/// Default ceiling on enumerated outcomes (`atoms^n`). Beyond it, callers
/// must take the Monte Carlo path; keeps sorted aggregation under ~1 GB.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 24;

/// Default atom ceiling for the O(m^3) disk-coverage search.
pub const DEFAULT_2D_ATOM_CAP: usize = 2000;

/// Boundary slack for disk membership, relative to the squared radius.
/// Candidate centers are built from square roots, so the two generating
/// atoms can land a few ulps outside an exact-radius disk.
const DISK_REL_TOL: f64 = 1e-12;

/// Exact law of `S_a = Σ X_k a_k`: every combination of atoms enumerated,
/// mass products accumulated, points merged at construction tolerance.
pub fn weighted_sum_dist(
    a: &WeightMatrix,
    f: &DiscreteDist1D,
    cap: u64,
) -> Result<DiscreteDistD> {
    if !f.is_probability() {
        return Err(Error::domain("weighted_sum_dist needs a probability law"));
    }
    let m = f.len() as u128;
    let n = a.n();
    let d = a.dim();
    let mut outcomes: u128 = 1;
    for _ in 0..n {
        outcomes = outcomes.saturating_mul(m);
        if outcomes > cap as u128 {
            return Err(Error::ResourceCap(format!(
                "enumeration needs {m}^{n} outcomes, cap is {cap}; use the Monte Carlo path"
            )));
        }
    }
    let total = outcomes as usize;

    let mut points: Vec<f64> = Vec::with_capacity(total * d);
    let mut masses: Vec<f64> = Vec::with_capacity(total);
    let mut partial_point = vec![0.0; (n + 1) * d];
    let mut partial_mass = vec![1.0; n + 1];
    let mut digits = vec![0usize; n];
    let atoms = f.atoms();
    let probs = f.masses();

    // Depth-first odometer over atom indices, keeping running partial sums
    // so each leaf costs O(d).
    let mut k = 0usize;
    loop {
        if k == n {
            points.extend_from_slice(&partial_point[n * d..(n + 1) * d]);
            masses.push(partial_mass[n]);
            // backtrack to the deepest level that can still advance
            loop {
                if k == 0 {
                    let dist = DiscreteDistD::new(d, points, masses)?;
                    return Ok(dist);
                }
                k -= 1;
                digits[k] += 1;
                if digits[k] < atoms.len() {
                    break;
                }
                digits[k] = 0;
            }
        }
        let x = atoms[digits[k]];
        let p = probs[digits[k]];
        let row = a.row(k);
        for j in 0..d {
            partial_point[(k + 1) * d + j] = partial_point[k * d + j] + x * row[j];
        }
        partial_mass[k + 1] = partial_mass[k] * p;
        k += 1;
    }
}

/// Exact concentration function of a one-dimensional discrete law: the
/// supremum over `x` of the mass of the closed interval `[x, x + lambda]`.
///
/// For closed windows the supremum is attained with the left endpoint at an
/// atom, so a two-pointer sweep over prefix sums is exact.
pub fn q_exact_1d(f: &DiscreteDist1D, lambda: f64) -> Result<f64> {
    if lambda.is_nan() || lambda < 0.0 {
        return Err(Error::domain(format!(
            "q_exact_1d needs lambda >= 0, got {lambda}"
        )));
    }
    if !f.is_probability() {
        return Err(Error::domain("q_exact_1d needs a probability law"));
    }
    if lambda.is_infinite() {
        return Ok(1.0);
    }
    let atoms = f.atoms();
    let masses = f.masses();
    let m = atoms.len();
    let mut prefix = Vec::with_capacity(m + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for &mass in masses {
        acc += mass;
        prefix.push(acc);
    }
    let mut best = 0.0f64;
    let mut j = 0usize;
    for i in 0..m {
        if j < i {
            j = i;
        }
        let right = atoms[i] + lambda;
        while j + 1 < m && atoms[j + 1] <= right {
            j += 1;
        }
        best = best.max(prefix[j + 1] - prefix[i]);
    }
    Ok(best)
}

/// Exact concentration function of a planar law: maximum mass covered by a
/// closed Euclidean disk of radius `lambda / 2`.
///
/// Candidate centers: every atom, plus for each atom pair within `lambda`
/// the two circles having both on the boundary. O(m^3) total.
pub fn q_exact_2d(f: &DiscreteDistD, lambda: f64) -> Result<f64> {
    q_exact_2d_capped(f, lambda, DEFAULT_2D_ATOM_CAP)
}

pub fn q_exact_2d_capped(f: &DiscreteDistD, lambda: f64, atom_cap: usize) -> Result<f64> {
    if f.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: f.dim(),
        });
    }
    if lambda.is_nan() || lambda < 0.0 {
        return Err(Error::domain(format!(
            "q_exact_2d needs lambda >= 0, got {lambda}"
        )));
    }
    if lambda.is_infinite() {
        return Ok(1.0);
    }
    let m = f.len();
    if m > atom_cap {
        return Err(Error::ResourceCap(format!(
            "q_exact_2d got {m} atoms, cap is {atom_cap}"
        )));
    }
    if lambda == 0.0 {
        return Ok(f.max_mass());
    }

    let r = lambda / 2.0;
    let r2 = r * r;
    let tol = DISK_REL_TOL * (1.0 + r2);

    // atoms sorted by x for window pruning
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_unstable_by(|&a, &b| f.point(a)[0].partial_cmp(&f.point(b)[0]).unwrap());
    let xs: Vec<f64> = order.iter().map(|&i| f.point(i)[0]).collect();
    let ys: Vec<f64> = order.iter().map(|&i| f.point(i)[1]).collect();
    let ms: Vec<f64> = order.iter().map(|&i| f.masses()[i]).collect();

    let coverage = |cx: f64, cy: f64| -> f64 {
        let lo = xs.partition_point(|&x| x < cx - r - 1e-9);
        let mut mass = 0.0;
        for i in lo..m {
            if xs[i] > cx + r + 1e-9 {
                break;
            }
            let dx = xs[i] - cx;
            let dy = ys[i] - cy;
            if dx * dx + dy * dy <= r2 + tol {
                mass += ms[i];
            }
        }
        mass
    };

    let mut best = 0.0f64;
    for i in 0..m {
        best = best.max(coverage(xs[i], ys[i]));
    }
    for i in 0..m {
        let lo = i + 1;
        for j in lo..m {
            let dx = xs[j] - xs[i];
            if dx > lambda {
                break;
            }
            let dy = ys[j] - ys[i];
            let d2 = dx * dx + dy * dy;
            if d2 > lambda * lambda || d2 == 0.0 {
                continue;
            }
            let dist = d2.sqrt();
            let h2 = r2 - d2 / 4.0;
            let h = if h2 > 0.0 { h2.sqrt() } else { 0.0 };
            let mx = (xs[i] + xs[j]) / 2.0;
            let my = (ys[i] + ys[j]) / 2.0;
            let ux = -dy / dist;
            let uy = dx / dist;
            best = best.max(coverage(mx + h * ux, my + h * uy));
            best = best.max(coverage(mx - h * ux, my - h * uy));
        }
    }
    Ok(best)
}

/// A reproducible batch of d-dimensional sample points.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampleBatch {
    pub d: usize,
    pub count: usize,
    pub seed: u64,
    /// Row-major, `count * d` values.
    pub points: Vec<f64>,
}

impl SampleBatch {
    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.d..(i + 1) * self.d]
    }

    /// All points scaled by `z` (the law of `z·Y`).
    pub fn scaled(&self, z: f64) -> SampleBatch {
        SampleBatch {
            d: self.d,
            count: self.count,
            seed: self.seed,
            points: self.points.iter().map(|x| x * z).collect(),
        }
    }

    /// Plain CSV, one point per row, no header.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.count * 20);
        for i in 0..self.count {
            let p = self.point(i);
            for (j, x) in p.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                out.push_str(&format!("{x}"));
            }
            out.push('\n');
        }
        out
    }

    /// Empirical characteristic function at `t`.
    pub fn empirical_cf(&self, t: &[f64]) -> Result<num_complex::Complex64> {
        if t.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: t.len(),
            });
        }
        let mut re = 0.0;
        let mut im = 0.0;
        for i in 0..self.count {
            let s = crate::dist::dot(t, self.point(i));
            let (sin, cos) = s.sin_cos();
            re += cos;
            im += sin;
        }
        let n = self.count as f64;
        Ok(num_complex::Complex64::new(re / n, im / n))
    }
}

/// Monte Carlo estimate of a concentration function.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
}

const BOOTSTRAP_REPS: usize = 16;

fn max_window_fraction(sorted: &[f64], lambda: f64) -> f64 {
    let n = sorted.len();
    let mut best = 0usize;
    let mut j = 0usize;
    for i in 0..n {
        if j < i {
            j = i;
        }
        let right = sorted[i] + lambda;
        while j + 1 < n && sorted[j + 1] <= right {
            j += 1;
        }
        best = best.max(j + 1 - i);
    }
    best as f64 / n as f64
}

fn max_window_fraction_weighted(sorted: &[f64], weights: &[u32], lambda: f64) -> f64 {
    let n = sorted.len();
    let mut prefix: Vec<u64> = Vec::with_capacity(n + 1);
    prefix.push(0);
    let mut acc = 0u64;
    for &w in weights {
        acc += w as u64;
        prefix.push(acc);
    }
    let total = acc;
    if total == 0 {
        return 0.0;
    }
    let mut best = 0u64;
    let mut j = 0usize;
    for i in 0..n {
        if j < i {
            j = i;
        }
        let right = sorted[i] + lambda;
        while j + 1 < n && sorted[j + 1] <= right {
            j += 1;
        }
        best = best.max(prefix[j + 1] - prefix[i]);
    }
    best as f64 / total as f64
}

/// Poisson(1) by cdf-table inversion, one uniform per draw. Truncated at
/// 13 (tail mass below 1e-13), which is immaterial for bootstrap weights.
fn sample_poisson1(rng: &mut ChaCha8Rng) -> u32 {
    const CDF: [f64; 13] = [
        0.36787944117144233,
        0.7357588823428847,
        0.919698602928606,
        0.9810118431238462,
        0.9963401531726563,
        0.9994058151824183,
        0.9999167588507119,
        0.9999897508033253,
        0.9999988747974019,
        0.9999998885745217,
        0.9999999899522336,
        0.9999999991683892,
        0.9999999999364022,
    ];
    let u: f64 = rng.random();
    for (k, &c) in CDF.iter().enumerate() {
        if u < c {
            return k as u32;
        }
    }
    13
}

/// Monte Carlo concentration estimate from a sample batch.
///
/// d = 1: max fraction of samples in a closed window `[x, x + lambda]`
/// anchored at sample points, with a Poisson-bootstrap standard error.
/// d = 2: the disk-coverage analogue over a subsampled candidate set
/// (downward-biased; binomial-proportion standard error).
pub fn q_monte_carlo(batch: &SampleBatch, lambda: f64) -> Result<McEstimate> {
    if batch.count < 1000 {
        return Err(Error::domain(format!(
            "q_monte_carlo needs at least 1000 samples, got {}",
            batch.count
        )));
    }
    if lambda.is_nan() || lambda < 0.0 {
        return Err(Error::domain(format!(
            "q_monte_carlo needs lambda >= 0, got {lambda}"
        )));
    }
    if lambda.is_infinite() {
        return Ok(McEstimate {
            estimate: 1.0,
            stderr: 0.0,
        });
    }
    match batch.d {
        1 => {
            let mut sorted = batch.points.clone();
            sorted.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
            let estimate = max_window_fraction(&sorted, lambda);

            let mut rng = ChaCha8Rng::seed_from_u64(batch.seed ^ 0x9e37_79b9_7f4a_7c15);
            let mut reps = Vec::with_capacity(BOOTSTRAP_REPS);
            let mut weights = vec![0u32; sorted.len()];
            for _ in 0..BOOTSTRAP_REPS {
                for w in weights.iter_mut() {
                    *w = sample_poisson1(&mut rng);
                }
                reps.push(max_window_fraction_weighted(&sorted, &weights, lambda));
            }
            let mean = reps.iter().sum::<f64>() / reps.len() as f64;
            let var = reps.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>()
                / (reps.len() - 1) as f64;
            Ok(McEstimate {
                estimate,
                stderr: var.sqrt(),
            })
        }
        2 => {
            let n = batch.count;
            let r = lambda / 2.0;
            let r2 = r * r;
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_unstable_by(|&a, &b| {
                batch.points[a * 2].partial_cmp(&batch.points[b * 2]).unwrap()
            });
            let xs: Vec<f64> = order.iter().map(|&i| batch.points[i * 2]).collect();
            let ys: Vec<f64> = order.iter().map(|&i| batch.points[i * 2 + 1]).collect();

            let k = 256.min(n);
            let stride = n / k;
            let mut best = 0usize;
            for c in 0..k {
                let idx = c * stride;
                let (cx, cy) = (batch.points[idx * 2], batch.points[idx * 2 + 1]);
                let lo = xs.partition_point(|&x| x < cx - r);
                let mut cnt = 0usize;
                for i in lo..n {
                    if xs[i] > cx + r {
                        break;
                    }
                    let dx = xs[i] - cx;
                    let dy = ys[i] - cy;
                    if dx * dx + dy * dy <= r2 {
                        cnt += 1;
                    }
                }
                best = best.max(cnt);
            }
            let p = best as f64 / n as f64;
            Ok(McEstimate {
                estimate: p,
                stderr: (p * (1.0 - p) / n as f64).sqrt(),
            })
        }
        d => Err(Error::UnsupportedDimension {
            d,
            why: "Monte Carlo concentration is implemented for d <= 2",
        }),
    }
}

/// Draw `count` i.i.d. points from the compound-Poisson law `H_1^λ`:
/// jump count `N ~ Poisson(λ·n/2)`, each jump uniform on the `2n` points
/// `{±a_k}` (the normalized Lévy measure `(λ/4)·Σ(E_{a_k} + E_{-a_k})`).
pub fn sample_h(
    a: &WeightMatrix,
    lambda_exp: f64,
    count: usize,
    seed: u64,
) -> Result<SampleBatch> {
    if lambda_exp < 0.0 || !lambda_exp.is_finite() {
        return Err(Error::domain(format!(
            "lambda exponent must be finite and >= 0, got {lambda_exp}"
        )));
    }
    if count == 0 {
        return Err(Error::domain("count must be positive"));
    }
    let n = a.n();
    let d = a.dim();
    let mu = lambda_exp * n as f64 / 2.0;
    let mut points = vec![0.0; count * d];
    if mu > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let poisson = Poisson::new(mu)
            .map_err(|e| Error::domain(format!("invalid Poisson intensity {mu}: {e}")))?;
        for i in 0..count {
            let jumps = poisson.sample(&mut rng) as usize;
            let p = &mut points[i * d..(i + 1) * d];
            for _ in 0..jumps {
                let idx = rng.random_range(0..2 * n);
                let row = a.row(idx / 2);
                let sign = if idx % 2 == 0 { 1.0 } else { -1.0 };
                for (x, w) in p.iter_mut().zip(row) {
                    *x += sign * w;
                }
            }
        }
    }
    Ok(SampleBatch {
        d,
        count,
        seed,
        points,
    })
}

/// Draw `count` i.i.d. points of `S_a = Σ X_k a_k` directly.
pub fn sample_weighted_sum(
    a: &WeightMatrix,
    f: &DiscreteDist1D,
    count: usize,
    seed: u64,
) -> Result<SampleBatch> {
    if !f.is_probability() {
        return Err(Error::domain("sampling needs a probability law"));
    }
    if count == 0 {
        return Err(Error::domain("count must be positive"));
    }
    let n = a.n();
    let d = a.dim();
    let atoms = f.atoms();
    let mut cdf = Vec::with_capacity(f.len());
    let mut acc = 0.0;
    for &m in f.masses() {
        acc += m;
        cdf.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = vec![0.0; count * d];
    for i in 0..count {
        let p = &mut points[i * d..(i + 1) * d];
        for k in 0..n {
            let u: f64 = rng.random();
            let j = cdf.partition_point(|&c| c < u).min(atoms.len() - 1);
            let x = atoms[j];
            let row = a.row(k);
            for (acc, w) in p.iter_mut().zip(row) {
                *acc += x * w;
            }
        }
    }
    Ok(SampleBatch {
        d,
        count,
        seed,
        points,
    })
}
