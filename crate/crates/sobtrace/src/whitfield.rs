//! The Whitney field of a sample set: one degree <= m-1 jet polynomial per
//! data point, interpolating f on that point's knot window, plus the two
//! jet-level trace functionals (full-sequence sum and exact variational sup).

use crate::error::{Error, Result};
use crate::knotsel::knot_table;
use crate::polycore::{lagrange_poly, Poly, SampleSet};

/// Jets P_x indexed like the sample set they were built from.
#[derive(Clone, Debug)]
pub struct WhitneyField {
    m: usize,
    knots: Vec<f64>,
    values: Vec<f64>,
    jets: Vec<Poly>,
}

impl WhitneyField {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn jets(&self) -> &[Poly] {
        &self.jets
    }

    pub fn len(&self) -> usize {
        self.knots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.knots.is_empty()
    }
}

/// Builds the field: each jet is the Lagrange polynomial on the knot window
/// of its point, stored centered at the point so coefficient j reads off
/// P^(j)(x) / j!.
///
/// Needs #E >= m so every window has the full m points; smaller sets belong
/// to the full-norm pipeline, which augments them first.
pub fn build_field(e: &SampleSet, m: usize) -> Result<WhitneyField> {
    if m == 0 {
        return Err(Error::UnsupportedOrder);
    }
    if e.len() < m {
        return Err(Error::TooFewPoints { needed: m, got: e.len() });
    }
    let table = knot_table(e, m)?;
    let mut jets = Vec::with_capacity(e.len());
    for (i, entry) in table.entries.iter().enumerate() {
        let lo = entry.window_start;
        let hi = lo + entry.s_set.len();
        let q = lagrange_poly(&e.xs()[lo..hi], &e.ys()[lo..hi])?;
        jets.push(q.recenter(e.x(i)).truncate(m - 1));
    }
    Ok(WhitneyField { m, knots: e.xs().to_vec(), values: e.ys().to_vec(), jets })
}

/// Mismatch sum between the jets of one ordered pair of knots:
/// sum over i < m of |P_a^(i)(x_a) - P_b^(i)(x_a)|^p / (x_b - x_a)^((m-i)p - 1).
fn pair_term(field: &WhitneyField, a: usize, b: usize, p: f64) -> f64 {
    let xa = field.knots[a];
    let gap = field.knots[b] - xa;
    let mut acc = 0.0;
    for i in 0..field.m {
        let diff = (field.jets[a].eval_deriv(xa, i) - field.jets[b].eval_deriv(xa, i)).abs();
        if diff > 0.0 {
            let expo = (field.m - i) as f64 * p - 1.0;
            acc += diff.powf(p) / gap.powf(expo);
        }
    }
    acc
}

fn require_trace_p(p: f64) -> Result<f64> {
    if p.is_finite() && p > 1.0 {
        Ok(p)
    } else {
        Err(Error::BadExponent)
    }
}

/// Jet trace functional over the full knot sequence: the p-th root of the
/// sum of [`pair_term`] over consecutive pairs. Zero for a single knot.
pub fn jet_sequence_functional(field: &WhitneyField, p: f64) -> Result<f64> {
    let p = require_trace_p(p)?;
    let mut acc = 0.0;
    for j in 0..field.len().saturating_sub(1) {
        acc += pair_term(field, j, j + 1, p);
    }
    Ok(acc.powf(1.0 / p))
}

const JET_ENUM_LIMIT: usize = 18;

/// Exact sup of the jet functional over all strictly increasing knot
/// subsequences of length >= 2, by enumeration. Guarded at 18 knots.
pub fn jet_variational_exact(field: &WhitneyField, p: f64) -> Result<f64> {
    let p = require_trace_p(p)?;
    let n = field.len();
    if n > JET_ENUM_LIMIT {
        return Err(Error::InstanceTooLarge { limit: JET_ENUM_LIMIT, got: n });
    }
    if n < 2 {
        return Ok(0.0);
    }
    // Pair terms are reused across subsequences; precompute them.
    let mut pair = vec![vec![0.0; n]; n];
    for a in 0..n {
        for b in a + 1..n {
            pair[a][b] = pair_term(field, a, b, p);
        }
    }
    let mut best = 0.0f64;
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() < 2 {
            continue;
        }
        let mut acc = 0.0;
        let mut prev: Option<usize> = None;
        let mut bits = mask;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            if let Some(a) = prev {
                acc += pair[a][i];
            }
            prev = Some(i);
        }
        best = best.max(acc);
    }
    Ok(best.powf(1.0 / p))
}
