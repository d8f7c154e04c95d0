//! Interpolation-knot selection: for each data point x, the set S_x of the
//! m points of E best concentrated around x, grown one nearest neighbor at a
//! time, with ties broken toward the smaller abscissa.
//!
//! Because the abscissae are strictly increasing, the growing set is always a
//! contiguous window of E and the only candidates at each step are the two
//! window neighbors.

use crate::error::{Error, Result};
use crate::polycore::SampleSet;

/// Knot selection for one data point.
#[derive(Clone, Debug, PartialEq)]
pub struct KnotEntry {
    /// Index of the window start in E; the window is `window_start..window_start + s_set.len()`.
    pub window_start: usize,
    /// The abscissae of S_x in increasing order.
    pub s_set: Vec<f64>,
    /// The base point s_x: the last point added to the chain.
    pub base: f64,
    /// The chain y_0(x), ..., in the order the points were added.
    pub chain: Vec<f64>,
}

/// Knot selections for every point of a sample set.
#[derive(Clone, Debug, PartialEq)]
pub struct KnotSelection {
    pub m: usize,
    pub entries: Vec<KnotEntry>,
}

/// The point of E outside `a` with minimal distance to `a`; ties between an
/// equally distant left and right candidate go to the smaller abscissa.
///
/// `a` lists members of E (matched exactly); it must be a nonempty proper
/// subset.
pub fn nearest_outside(e: &SampleSet, a: &[f64]) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::EmptyInput);
    }
    let in_a = |x: f64| a.iter().any(|&v| v == x);
    let mut best: Option<(f64, f64)> = None; // (distance, point)
    for &x in e.xs() {
        if in_a(x) {
            continue;
        }
        let d = a.iter().fold(f64::INFINITY, |m, &v| m.min((x - v).abs()));
        let better = match best {
            None => true,
            Some((bd, bx)) => d < bd || (d == bd && x < bx),
        };
        if better {
            best = Some((d, x));
        }
    }
    best.map(|(_, x)| x).ok_or(Error::Exhausted)
}

/// Runs the nearest-neighbor chain from the point at `idx` until it holds
/// min(m, #E) points. The window invariant makes each step a two-way
/// comparison between the neighbors of the current window.
pub fn knot_set(e: &SampleSet, idx: usize, m: usize) -> Result<KnotEntry> {
    if m == 0 {
        return Err(Error::UnsupportedOrder);
    }
    if idx >= e.len() {
        return Err(Error::TooFewPoints { needed: idx + 1, got: e.len() });
    }
    let xs = e.xs();
    let (mut lo, mut hi) = (idx, idx);
    let mut chain = vec![xs[idx]];
    let mut base = xs[idx];
    while hi - lo + 1 < m && (lo > 0 || hi + 1 < xs.len()) {
        let left = if lo > 0 { Some(xs[lo] - xs[lo - 1]) } else { None };
        let right = if hi + 1 < xs.len() { Some(xs[hi + 1] - xs[hi]) } else { None };
        let go_left = match (left, right) {
            (Some(l), Some(r)) => l <= r, // tie goes to the smaller abscissa
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (None, None) => unreachable!(),
        };
        if go_left {
            lo -= 1;
            base = xs[lo];
        } else {
            hi += 1;
            base = xs[hi];
        }
        chain.push(base);
    }
    Ok(KnotEntry { window_start: lo, s_set: xs[lo..=hi].to_vec(), base, chain })
}

/// Knot selections for all points of E at once.
pub fn knot_table(e: &SampleSet, m: usize) -> Result<KnotSelection> {
    let entries = (0..e.len()).map(|i| knot_set(e, i, m)).collect::<Result<Vec<_>>>()?;
    Ok(KnotSelection { m, entries })
}
