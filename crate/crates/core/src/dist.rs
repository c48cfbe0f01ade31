//! Discrete distributions on the line and on `R^d`, weight matrices, and the
//! elementary functionals built on them: symmetrization, tail masses, and the
//! strict floor.
//!
//! All types are immutable after construction and all operations are pure,
//! so values can be shared freely across threads.

use crate::error::{Error, Result};

/// Two atoms closer than this (max-norm) are merged at construction, with
/// masses added and positions mass-weighted-averaged. Enumeration of sums
/// produces floating-point near-duplicates that must collapse.
pub const MERGE_TOL: f64 = 1e-12;

/// Probability laws must sum to 1 within this tolerance at construction;
/// they are then renormalized by the computed sum so downstream quadrature
/// does not amplify drift.
pub const PROB_TOL: f64 = 1e-12;

/// Largest integer `k` with `k < x`, for `x > 0`.
///
/// This is *not* the standard floor: at integer arguments it is one less
/// (`strict_floor(1.0) == 0`). Corollary-style weight formulas evaluate it
/// at ratios that can be exactly integral, so the integer case matters.
pub fn strict_floor(x: f64) -> Result<u64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::domain(format!(
            "strict_floor requires finite x > 0, got {x}"
        )));
    }
    if x > u64::MAX as f64 {
        return Err(Error::domain(format!(
            "strict_floor argument {x} exceeds u64 range"
        )));
    }
    let f = x.floor();
    if f == x {
        Ok(f as u64 - 1)
    } else {
        Ok(f as u64)
    }
}

/// `strict_floor` as an f64, defined for all positive arguments including
/// those beyond integer range. For `x >= 2^53` the subtraction at integral
/// arguments is absorbed by rounding, which is harmless for the reciprocal
/// weights this feeds into.
pub fn strict_floor_f64(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let f = x.floor();
    if f == x {
        f - 1.0
    } else {
        f
    }
}

/// Finite discrete measure on the real line: sorted atoms, positive masses,
/// and an explicit total mass.
///
/// Probability laws carry `total_mass == 1.0` exactly; sub-probability
/// measures (the `V` of the comparison theorem, with `V{R} = λ ≤ 1`) keep
/// their raw total so `V ≤ G` can be checked atom by atom without
/// renormalization artifacts.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteDist1D {
    atoms: Vec<f64>,
    masses: Vec<f64>,
    total_mass: f64,
}

fn merge_sorted_pairs(mut pairs: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pairs.sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(pairs.len());
    for (x, m) in pairs {
        match merged.last_mut() {
            Some((pos, mass)) if (x - *pos).abs() <= MERGE_TOL => {
                let new_mass = *mass + m;
                *pos = (*pos * *mass + x * m) / new_mass;
                *mass = new_mass;
            }
            _ => merged.push((x, m)),
        }
    }
    merged
}

fn collect_pairs(pairs: impl IntoIterator<Item = (f64, f64)>) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for (x, m) in pairs {
        if !x.is_finite() {
            return Err(Error::InvalidDistribution(format!("non-finite atom {x}")));
        }
        if !m.is_finite() || m < 0.0 {
            return Err(Error::InvalidDistribution(format!(
                "invalid mass {m} at atom {x}"
            )));
        }
        if m > 0.0 {
            out.push((x, m));
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidDistribution(
            "distribution needs at least one atom with positive mass".into(),
        ));
    }
    Ok(out)
}

impl DiscreteDist1D {
    /// Probability law from (atom, mass) pairs. Near-duplicate atoms are
    /// merged, the total is validated against 1 within [`PROB_TOL`], and
    /// masses are renormalized by the computed sum.
    pub fn probability(pairs: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let merged = merge_sorted_pairs(collect_pairs(pairs)?);
        let sum: f64 = merged.iter().map(|&(_, m)| m).sum();
        if (sum - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidDistribution(format!(
                "masses sum to {sum}, expected 1 within {PROB_TOL:e}"
            )));
        }
        let (atoms, masses) = merged.into_iter().map(|(x, m)| (x, m / sum)).unzip();
        Ok(Self {
            atoms,
            masses,
            total_mass: 1.0,
        })
    }

    /// Sub-probability measure: total mass is whatever the pairs sum to.
    pub fn sub_probability(pairs: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let merged = merge_sorted_pairs(collect_pairs(pairs)?);
        let total_mass: f64 = merged.iter().map(|&(_, m)| m).sum();
        let (atoms, masses) = merged.into_iter().unzip();
        Ok(Self {
            atoms,
            masses,
            total_mass,
        })
    }

    /// Point mass at `x`.
    pub fn point_mass(x: f64) -> Self {
        Self {
            atoms: vec![x],
            masses: vec![1.0],
            total_mass: 1.0,
        }
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn is_probability(&self) -> bool {
        self.total_mass == 1.0
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.atoms.iter().copied().zip(self.masses.iter().copied())
    }

    /// Mass of the atom at `z` (within merge tolerance), 0 if absent.
    pub fn mass_at(&self, z: f64) -> f64 {
        let idx = self
            .atoms
            .partition_point(|&a| a < z - MERGE_TOL);
        if idx < self.atoms.len() && (self.atoms[idx] - z).abs() <= MERGE_TOL {
            self.masses[idx]
        } else {
            0.0
        }
    }

    /// Largest single-atom mass.
    pub fn max_mass(&self) -> f64 {
        self.masses.iter().copied().fold(0.0, f64::max)
    }

    /// Tail functional: total mass of atoms `z` with `|z| > delta`
    /// (strictly; boundary atoms are excluded).
    pub fn tail_mass(&self, delta: f64) -> Result<f64> {
        if delta.is_nan() || delta < 0.0 {
            return Err(Error::domain(format!(
                "tail_mass requires delta >= 0, got {delta}"
            )));
        }
        Ok(self
            .iter()
            .filter(|&(z, _)| z.abs() > delta)
            .map(|(_, m)| m)
            .sum())
    }

    /// Law of `X1 - X2` for independent `X1, X2` distributed as `self`.
    ///
    /// Built to be symmetric by construction: positive differences are
    /// enumerated once (pairs i < j of the sorted atoms), merged, and
    /// mirrored bitwise to the negative side, so the mass at `z` equals
    /// the mass at `-z` exactly.
    pub fn symmetrize(&self) -> Result<DiscreteDist1D> {
        if !self.is_probability() {
            return Err(Error::domain(
                "symmetrize requires a probability law",
            ));
        }
        let m = self.len();
        let zero_mass: f64 = self.masses.iter().map(|p| p * p).sum();
        let mut positive: Vec<(f64, f64)> = Vec::with_capacity(m * (m - 1) / 2);
        for j in 1..m {
            for i in 0..j {
                // atoms sorted ascending, so the difference is positive
                positive.push((self.atoms[j] - self.atoms[i], self.masses[i] * self.masses[j]));
            }
        }
        let positive = merge_sorted_pairs(positive);

        let mut atoms = Vec::with_capacity(2 * positive.len() + 1);
        let mut masses = Vec::with_capacity(2 * positive.len() + 1);
        for &(x, mass) in positive.iter().rev() {
            atoms.push(-x);
            masses.push(mass);
        }
        atoms.push(0.0);
        masses.push(zero_mass);
        for &(x, mass) in &positive {
            atoms.push(x);
            masses.push(mass);
        }
        let total: f64 = masses.iter().sum();
        debug_assert!((total - 1.0).abs() < 1e-9);
        let masses: Vec<f64> = masses.into_iter().map(|x| x / total).collect();
        Ok(DiscreteDist1D {
            atoms,
            masses,
            total_mass: 1.0,
        })
    }

    /// Split off the tail beyond `threshold`: returns `p1 = tail_mass` and,
    /// when `p1 > 0`, the conditional law given `|z| > threshold`.
    pub fn restrict_and_normalize(
        &self,
        threshold: f64,
    ) -> Result<(f64, Option<DiscreteDist1D>)> {
        if threshold.is_nan() || threshold < 0.0 {
            return Err(Error::domain(format!(
                "restrict_and_normalize requires threshold >= 0, got {threshold}"
            )));
        }
        let p1 = self.tail_mass(threshold)?;
        if p1 == 0.0 {
            return Ok((0.0, None));
        }
        let tail: Vec<(f64, f64)> = self
            .iter()
            .filter(|&(z, _)| z.abs() > threshold)
            .map(|(z, m)| (z, m / p1))
            .collect();
        let cond = DiscreteDist1D::probability(tail)?;
        Ok((p1, Some(cond)))
    }

    /// Sub-measure holding exactly the atoms of `self` beyond `threshold`,
    /// with their original masses (the `V = p1·G1` of the mixture proof).
    pub fn tail_measure(&self, threshold: f64) -> Result<Option<DiscreteDist1D>> {
        if threshold.is_nan() || threshold < 0.0 {
            return Err(Error::domain(format!(
                "tail_measure requires threshold >= 0, got {threshold}"
            )));
        }
        let tail: Vec<(f64, f64)> = self.iter().filter(|&(z, _)| z.abs() > threshold).collect();
        if tail.is_empty() {
            return Ok(None);
        }
        Ok(Some(DiscreteDist1D::sub_probability(tail)?))
    }
}

/// Finite discrete probability law on `R^d`, stored as flat row-major points.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteDistD {
    d: usize,
    points: Vec<f64>,
    masses: Vec<f64>,
}

impl DiscreteDistD {
    /// Build from flat points (`count * d` values) and per-point masses.
    ///
    /// Points are sorted lexicographically and runs whose coordinates all
    /// lie within [`MERGE_TOL`] of the running group mean are merged. For
    /// d = 1 this catches every tolerance-neighbor; for d >= 2 it merges
    /// the rounding near-duplicates enumeration actually produces, but a
    /// pathological interleaving could keep two tolerance-close points
    /// apart.
    pub fn new(d: usize, points: Vec<f64>, masses: Vec<f64>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidDistribution("dimension must be >= 1".into()));
        }
        if points.len() != masses.len() * d {
            return Err(Error::InvalidDistribution(format!(
                "{} coordinates do not form {} points of dimension {d}",
                points.len(),
                masses.len()
            )));
        }
        if points.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidDistribution("non-finite coordinate".into()));
        }
        if masses.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(Error::InvalidDistribution("invalid mass".into()));
        }

        let n = masses.len();
        let mut order: Vec<usize> = (0..n).filter(|&i| masses[i] > 0.0).collect();
        if order.is_empty() {
            return Err(Error::InvalidDistribution(
                "distribution needs at least one point with positive mass".into(),
            ));
        }
        order.sort_unstable_by(|&a, &b| {
            points[a * d..(a + 1) * d]
                .partial_cmp(&points[b * d..(b + 1) * d])
                .unwrap()
        });

        let mut out_points: Vec<f64> = Vec::new();
        let mut out_masses: Vec<f64> = Vec::new();
        for &i in &order {
            let p = &points[i * d..(i + 1) * d];
            let m = masses[i];
            let merged = if let Some(last_mass) = out_masses.last_mut() {
                let start = out_points.len() - d;
                let rep = &mut out_points[start..];
                if rep.iter().zip(p).all(|(a, b)| (a - b).abs() <= MERGE_TOL) {
                    let new_mass = *last_mass + m;
                    for (r, &x) in rep.iter_mut().zip(p) {
                        *r = (*r * *last_mass + x * m) / new_mass;
                    }
                    *last_mass = new_mass;
                    true
                } else {
                    false
                }
            } else {
                false
            };
            if !merged {
                out_points.extend_from_slice(p);
                out_masses.push(m);
            }
        }

        let sum: f64 = out_masses.iter().sum();
        if (sum - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidDistribution(format!(
                "masses sum to {sum}, expected 1 within {PROB_TOL:e}"
            )));
        }
        for m in &mut out_masses {
            *m /= sum;
        }
        Ok(Self {
            d,
            points: out_points,
            masses: out_masses,
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.d..(i + 1) * self.d]
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn max_mass(&self) -> f64 {
        self.masses.iter().copied().fold(0.0, f64::max)
    }

    /// View a d = 1 law as a `DiscreteDist1D`.
    pub fn to_1d(&self) -> Result<DiscreteDist1D> {
        if self.d != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: self.d,
            });
        }
        DiscreteDist1D::probability(self.points.iter().copied().zip(self.masses.iter().copied()))
    }
}

/// The coefficient vectors `a = (a_1, ..., a_n)`, each row a point of `R^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightMatrix {
    n: usize,
    d: usize,
    rows: Vec<f64>,
}

impl WeightMatrix {
    pub fn new(n: usize, d: usize, rows: Vec<f64>) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::InvalidInput(format!(
                "weight matrix needs n >= 1 and d >= 1, got n={n}, d={d}"
            )));
        }
        if rows.len() != n * d {
            return Err(Error::InvalidInput(format!(
                "expected {} entries for a {n}x{d} weight matrix, got {}",
                n * d,
                rows.len()
            )));
        }
        if rows.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("weight entries must be finite".into()));
        }
        Ok(Self { n, d, rows })
    }

    /// One-dimensional weights from a plain vector.
    pub fn from_1d(weights: Vec<f64>) -> Result<Self> {
        let n = weights.len();
        Self::new(n, 1, weights)
    }

    /// Rows given as nested vectors (the JSON wire shape).
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidInput("weight matrix has no rows".into()));
        }
        let d = rows[0].len();
        let mut flat = Vec::with_capacity(n * d);
        for (k, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::InvalidInput(format!(
                    "row {k} has {} entries, expected {d}",
                    row.len()
                )));
            }
            flat.extend_from_slice(row);
        }
        Self::new(n, d, flat)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.rows[k * self.d..(k + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.rows.chunks_exact(self.d)
    }

    pub fn to_nested(&self) -> Vec<Vec<f64>> {
        self.rows().map(|r| r.to_vec()).collect()
    }

    /// All rows scaled by `gamma`.
    pub fn scaled(&self, gamma: f64) -> Result<WeightMatrix> {
        WeightMatrix::new(self.n, self.d, self.rows.iter().map(|x| x * gamma).collect())
    }
}

pub fn dot(t: &[f64], a: &[f64]) -> f64 {
    t.iter().zip(a).map(|(x, y)| x * y).sum()
}
