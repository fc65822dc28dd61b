//! Root continuation along a one-parameter family `s ∈ [0, 1]`.
//!
//! Each step re-solves the polynomial and matches every tracked root to its
//! nearest new root. A step is accepted when the matching is injective and
//! the smallest gap between a matched root and any other root exceeds
//! `gap_factor` times the largest movement; otherwise the step is halved.

use num_complex::Complex64;
use serde::Serialize;

use super::roots::lex_cmp;
use super::{RootConfig, UniPoly};
use crate::error::{Error, Result};

/// A polynomial in the fiber variable whose coefficients depend on `s`.
pub trait PolyFamily: Sync {
    fn poly_at(&self, s: f64) -> UniPoly;
}

impl<F> PolyFamily for F
where
    F: Fn(f64) -> UniPoly + Sync,
{
    fn poly_at(&self, s: f64) -> UniPoly {
        self(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrackConfig {
    pub initial_steps: usize,
    /// Number of halvings of the initial step before giving up.
    pub max_halvings: u32,
    pub gap_factor: f64,
    pub roots: RootConfig,
}

impl Default for TrackConfig {
    fn default() -> Self {
        Self { initial_steps: 256, max_halvings: 30, gap_factor: 4.0, roots: RootConfig::default() }
    }
}

/// A permutation of `0..n` in one-line notation: `i ↦ p[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn from_vec(v: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; v.len()];
        for &x in &v {
            if x >= v.len() || seen[x] {
                return Err(Error::InvalidArgument(format!("{v:?} is not a permutation")));
            }
            seen[x] = true;
        }
        Ok(Self(v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    /// `self` followed by `next`: `i ↦ next[self[i]]`.
    pub fn then(&self, next: &Permutation) -> Permutation {
        Permutation(self.0.iter().map(|&i| next.0[i]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Permutation(inv)
    }

    pub fn pow(&self, k: u32) -> Permutation {
        (0..k).fold(Self::identity(self.len()), |acc, _| acc.then(self))
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Cycles, each starting at its smallest element, ordered by that element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.0.len()];
        let mut out = Vec::new();
        for start in 0..self.0.len() {
            if seen[start] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cyc.push(i);
                i = self.0[i];
            }
            out.push(cyc);
        }
        out
    }

    /// Sorted cycle lengths.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        t.sort_unstable();
        t
    }
}

/// Result of continuing a set of roots from `s = 0` to `s = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tracking {
    /// `end_roots[i]` is the continuation of `start[i]`.
    pub end_roots: Vec<Complex64>,
    /// `i ↦` rank of `end_roots[i]` in `(re, im)` order. For a closed loop
    /// started from sorted roots this is the monodromy permutation.
    pub permutation: Permutation,
    pub steps: usize,
    pub refinements: usize,
    /// Smallest gap seen between a tracked root and any other root.
    pub min_gap: f64,
    /// Winding number of `Π_{i<j} (y_i - y_j)^2` over the tracked roots.
    pub discriminant_winding: f64,
}

impl Tracking {
    /// Matches the end roots onto `targets` by nearest neighbour; fails
    /// unless this is a bijection.
    pub fn permutation_onto(&self, targets: &[Complex64]) -> Result<Permutation> {
        let v = self.end_roots.iter().map(|z| nearest(targets, *z).0).collect();
        Permutation::from_vec(v)
    }
}

fn nearest(pool: &[Complex64], z: Complex64) -> (usize, f64) {
    pool.iter()
        .enumerate()
        .map(|(j, w)| (j, (w - z).norm()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap_or((usize::MAX, f64::INFINITY))
}

fn pair_phase_sum(prev: &[Complex64], next: &[Complex64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..prev.len() {
        for j in (i + 1)..prev.len() {
            let a = prev[i] - prev[j];
            let b = next[i] - next[j];
            acc += (b / a).arg();
        }
    }
    acc
}

/// Continues `start` (roots of `family.poly_at(0)`) to `s = 1`.
pub fn track_roots<F: PolyFamily + ?Sized>(family: &F, start: &[Complex64], cfg: &TrackConfig) -> Result<Tracking> {
    let initial = family.poly_at(0.0).roots(&cfg.roots)?;
    let degree = initial.degree;
    if start.len() > degree {
        return Err(Error::InvalidArgument(format!("{} start roots for a degree-{degree} polynomial", start.len())));
    }
    let h0 = 1.0 / cfg.initial_steps.max(1) as f64;
    let h_min = h0 * 0.5f64.powi(cfg.max_halvings as i32);
    let mut h = h0;
    let mut s = 0.0;
    let mut cur = start.to_vec();
    let mut steps = 0;
    let mut refinements = 0;
    let mut min_gap = f64::INFINITY;
    let mut phase = 0.0;

    while s < 1.0 {
        let s_next = if s + h >= 1.0 - 1e-15 { 1.0 } else { s + h };
        let set = family.poly_at(s_next).roots(&cfg.roots)?;
        if set.degree != degree {
            return Err(Error::DegreeDrop { s: s_next, from: degree, to: set.degree });
        }
        let pool = &set.raw;
        let mut matched = Vec::with_capacity(cur.len());
        let mut used = vec![false; pool.len()];
        let mut injective = true;
        let mut movement: f64 = 0.0;
        for z in &cur {
            let (j, d) = nearest(pool, *z);
            if j == usize::MAX || used[j] {
                injective = false;
                break;
            }
            used[j] = true;
            matched.push(j);
            movement = movement.max(d);
        }
        let mut gap = f64::INFINITY;
        if injective {
            for &j in &matched {
                for (k, w) in pool.iter().enumerate() {
                    if k != j {
                        gap = gap.min((pool[j] - w).norm());
                    }
                }
            }
        }
        if injective && gap > cfg.gap_factor * movement {
            let next: Vec<Complex64> = matched.iter().map(|&j| pool[j]).collect();
            phase += pair_phase_sum(&cur, &next);
            cur = next;
            s = s_next;
            steps += 1;
            min_gap = min_gap.min(gap);
            h = (h * 2.0).min(h0);
        } else {
            h *= 0.5;
            refinements += 1;
            if h < h_min {
                // a root escaping to infinity looks like a collision; tell them apart
                let p = family.poly_at(s);
                let coeffs = p.coeffs();
                let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
                if coeffs.len() > degree && coeffs[degree].norm() < 1e-8 * scale {
                    return Err(Error::DegreeDrop { s, from: degree, to: degree - 1 });
                }
                return Err(Error::Collision { s });
            }
        }
    }

    let mut order: Vec<usize> = (0..cur.len()).collect();
    order.sort_by(|&a, &b| lex_cmp(&cur[a], &cur[b]));
    let mut rank = vec![0; cur.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    Ok(Tracking {
        end_roots: cur,
        permutation: Permutation(rank),
        steps,
        refinements,
        min_gap,
        discriminant_winding: 2.0 * phase / std::f64::consts::TAU,
    })
}
