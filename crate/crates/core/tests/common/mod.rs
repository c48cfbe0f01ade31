//! Independent oracles for the integration suites. These deliberately take
//! different algorithmic routes from the library so agreement is evidence,
//! not tautology.

use anticonc::dist::DiscreteDist1D;
use anticonc::exact::SampleBatch;
use anticonc::DiscreteDistD;

/// O(m^2) window scan: for every atom as left endpoint, accumulate mass
/// rightward while inside the closed window. No prefix sums, no two-pointer
/// state reuse.
pub fn q_brute_force_1d(f: &DiscreteDist1D, lambda: f64) -> f64 {
    let atoms = f.atoms();
    let masses = f.masses();
    let mut best = 0.0f64;
    for i in 0..atoms.len() {
        let mut acc = 0.0;
        for j in i..atoms.len() {
            if atoms[j] <= atoms[i] + lambda {
                acc += masses[j];
                if acc > best {
                    best = acc;
                }
            } else {
                break;
            }
        }
    }
    best
}

/// Minimal enclosing circle radius of a point set, brute force over the
/// pair (diameter) and triple (circumcircle) candidates. Points: (x, y).
fn mec_radius(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len();
    if n == 1 {
        return 0.0;
    }
    let contains_all = |cx: f64, cy: f64, r: f64| -> bool {
        let r2 = r * r * (1.0 + 1e-12) + 1e-18;
        pts.iter().all(|&(x, y)| {
            let dx = x - cx;
            let dy = y - cy;
            dx * dx + dy * dy <= r2
        })
    };
    let mut best = f64::INFINITY;
    for i in 0..n {
        for j in (i + 1)..n {
            let cx = (pts[i].0 + pts[j].0) / 2.0;
            let cy = (pts[i].1 + pts[j].1) / 2.0;
            let dx = pts[i].0 - cx;
            let dy = pts[i].1 - cy;
            let r = (dx * dx + dy * dy).sqrt();
            if r < best && contains_all(cx, cy, r) {
                best = r;
            }
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let (ax, ay) = pts[i];
                let (bx, by) = pts[j];
                let (cx, cy) = pts[k];
                let d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
                if d.abs() < 1e-12 {
                    continue;
                }
                let a2 = ax * ax + ay * ay;
                let b2 = bx * bx + by * by;
                let c2 = cx * cx + cy * cy;
                let ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d;
                let uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d;
                let dx = ax - ux;
                let dy = ay - uy;
                let r = (dx * dx + dy * dy).sqrt();
                if r < best && contains_all(ux, uy, r) {
                    best = r;
                }
            }
        }
    }
    best
}

/// Exhaustive planar oracle for small laws: maximum mass over all atom
/// subsets whose minimal enclosing circle fits in a disk of radius
/// `lambda / 2`. O(2^m · m^3); keep m <= 12.
pub fn q_subset_oracle_2d(f: &DiscreteDistD, lambda: f64) -> f64 {
    assert_eq!(f.dim(), 2);
    let m = f.len();
    assert!(m <= 12, "subset oracle is exponential");
    let pts: Vec<(f64, f64)> = (0..m).map(|i| (f.point(i)[0], f.point(i)[1])).collect();
    let masses = f.masses();
    let r_target = lambda / 2.0;
    let mut best = 0.0f64;
    for mask in 1u32..(1 << m) {
        let subset: Vec<(f64, f64)> = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| pts[i]).collect();
        let mass: f64 = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| masses[i]).sum();
        if mass <= best {
            continue;
        }
        if mec_radius(&subset) <= r_target * (1.0 + 1e-9) + 1e-15 {
            best = mass;
        }
    }
    best
}

/// Mean and standard error of `cos(t·Y)` and `sin(t·Y)` over a batch.
pub struct CfMoments {
    pub re_mean: f64,
    pub re_se: f64,
    pub im_mean: f64,
    pub im_se: f64,
}

pub fn empirical_cf_moments(batch: &SampleBatch, t: &[f64]) -> CfMoments {
    let n = batch.count as f64;
    let mut sc = 0.0;
    let mut sc2 = 0.0;
    let mut ss = 0.0;
    let mut ss2 = 0.0;
    for i in 0..batch.count {
        let s: f64 = t
            .iter()
            .zip(batch.point(i))
            .map(|(a, b)| a * b)
            .sum();
        let (sin, cos) = s.sin_cos();
        sc += cos;
        sc2 += cos * cos;
        ss += sin;
        ss2 += sin * sin;
    }
    let re_mean = sc / n;
    let im_mean = ss / n;
    let re_var = (sc2 / n - re_mean * re_mean).max(0.0);
    let im_var = (ss2 / n - im_mean * im_mean).max(0.0);
    CfMoments {
        re_mean,
        re_se: (re_var / n).sqrt(),
        im_mean,
        im_se: (im_var / n).sqrt(),
    }
}

/// `C(n, floor(n/2)) / 2^n` with the standard floor, exact in f64 for
/// n <= 20 (dyadic masses).
pub fn central_binomial_mass(n: usize) -> f64 {
    let mut binom: u128 = 1;
    for k in 0..(n / 2) {
        binom = binom * (n - k) as u128 / (k + 1) as u128;
    }
    binom as f64 / 2f64.powi(n as i32)
}
