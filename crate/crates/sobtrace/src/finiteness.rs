//! Extremal constants and objects for the sup-norm theory: the exact trace
//! norm on a minimal point set, the Favard-type constant c_m, its explicit
//! upper companion C_m, the Euler spline built from an alternating B-spline
//! series, and the alternating-data experiment that lower-bounds the optimal
//! extension ratio.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::extend_lmp::{assemble_extension, lmp_seminorm};
use crate::functionals::n_infty;
use crate::polycore::{binom, bspline_deriv, divided_difference, factorial, Poly, SampleSet};
use crate::whitfield::build_field;

/// Exact sup-seminorm trace norm on m + 1 points: m! |d^m f|. The points may
/// come in any order but must be distinct.
pub fn trace_norm_simplex(points: &[f64], values: &[f64]) -> Result<f64> {
    if points.len() < 2 || points.len() != values.len() {
        return Err(Error::BadSimplex);
    }
    if points.iter().chain(values).any(|v| !v.is_finite()) {
        return Err(Error::BadSimplex);
    }
    let m = points.len() - 1;
    let d = divided_difference(points, values).map_err(|_| Error::BadSimplex)?;
    Ok(factorial(m) * d.abs())
}

// Shared tail shape: sum_{j >= start} (2j+1)^(-s), accelerated by the
// Euler-Maclaurin correction through the fourth Bernoulli term. With the
// cutoff at 1e6 the remainder sits far below 1e-30.
fn positive_tail(start: f64, s: f64) -> f64 {
    let u = 2.0 * start + 1.0;
    let integral = u.powf(1.0 - s) / (2.0 * (s - 1.0));
    let half = 0.5 * u.powf(-s);
    let b2 = s / 6.0 * u.powf(-s - 1.0);
    let b4 = -s * (s + 1.0) * (s + 2.0) / 90.0 * u.powf(-s - 3.0);
    integral + half + b2 + b4
}

/// Favard-type constant: (pi/2)^(m+1) divided by the symmetric series
/// sum over integer j of ((-1)^j / (2j+1))^(m+1). Pairing j with -j-1 gives
/// twice the one-sided series; for even m it alternates and is summed until
/// the next-term bound is negligible, for odd m it is positive and finished
/// with an integral-plus-correction tail.
pub fn favard_cm(m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::UnsupportedOrder);
    }
    let s = m as i32 + 1;
    let alternating = m % 2 == 0;
    let cutoff = 1_000_000u64;
    let mut sum = 0.0;
    // Descending order keeps the small terms from being absorbed early.
    for j in (0..cutoff).rev() {
        let term = (2.0 * j as f64 + 1.0).powi(-s);
        sum += if alternating && j % 2 == 1 { -term } else { term };
    }
    if !alternating {
        sum += positive_tail(cutoff as f64, s as f64);
    }
    let series = 2.0 * sum;
    Ok((std::f64::consts::FRAC_PI_2).powi(s) / series)
}

/// Explicit companion constant:
/// C_m = 2^(m-2)/m + sum_{i=1}^m C(m,i) C(m-1,i-1) 4^(m-i).
pub fn deboor_cm_upper(m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::UnsupportedOrder);
    }
    let mut sum = 2.0f64.powi(m as i32 - 2) / m as f64;
    for i in 1..=m {
        sum += binom(m, i) * binom(m - 1, i - 1) * 4.0f64.powi((m - i) as i32);
    }
    Ok(sum)
}

/// The Euler spline on [-W, W], assembled from the alternating series of
/// B-splines on consecutive integer windows. Each point is covered by
/// finitely many terms, so the interior [-W+m+1, W-m-1] is unaffected by
/// truncation.
#[derive(Clone, Debug)]
pub struct EulerSpline {
    m: usize,
    c_m: f64,
    window: usize,
    // One polynomial per half-integer cell of [-W, W], left to right.
    pieces: Vec<Poly>,
}

impl EulerSpline {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn c_m(&self) -> f64 {
        self.c_m
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// Largest |t| at which truncation provably does not matter.
    pub fn interior(&self) -> f64 {
        (self.window - self.m - 1) as f64
    }

    /// Derivative of the given order at t; zero outside [-W, W].
    pub fn eval(&self, t: f64, order: usize) -> f64 {
        let w = self.window as f64;
        if !(-w..=w).contains(&t) {
            return 0.0;
        }
        let cells = self.pieces.len();
        let j = (((t + w) * 2.0).floor() as usize).min(cells - 1);
        self.pieces[j].eval_deriv(t, order)
    }
}

/// Builds the truncated Euler spline series on [-W, W].
pub fn euler_spline(m: usize, w: usize) -> Result<EulerSpline> {
    if m == 0 {
        return Err(Error::UnsupportedOrder);
    }
    if w < m + 2 {
        return Err(Error::WindowTooSmall { needed: m + 2, got: w });
    }
    let c_m = favard_cm(m)?;
    let shift = (m as f64 + 1.0) / 2.0;
    let lo_i = -(w as i64) - (m as i64) - 2;
    let hi_i = (w as i64) + (m as i64) + 2;
    let spans: Vec<(f64, Vec<f64>)> = (lo_i..=hi_i)
        .map(|i| {
            let sign = if i.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let pts: Vec<f64> = (0..=(m as i64 + 1)).map(|k| (i + k) as f64).collect();
            (sign, pts)
        })
        .collect();
    let cells = 4 * w;
    let mut pieces = Vec::with_capacity(cells);
    for j in 0..cells {
        // Midpoints land strictly between knots, so every term is smooth
        // there and a degree-m Taylor expansion reproduces the cell exactly.
        let left = -(w as f64) + j as f64 / 2.0;
        let mid = left + 0.25;
        let u = mid + shift;
        let mut coeffs = vec![0.0; m + 1];
        for (r, c) in coeffs.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (sign, pts) in &spans {
                if u > pts[0] && u < pts[m + 1] {
                    acc += sign * bspline_deriv(pts, u, r)?;
                }
            }
            *c = c_m * acc / factorial(r);
        }
        pieces.push(Poly::new(mid, coeffs)?);
    }
    Ok(EulerSpline { m, c_m, window: w, pieces })
}

/// Outcome of the alternating-data extension experiment: the extension
/// sup-seminorm, the exact trace denominator 2^m, and their quotient.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct KmLowerExperiment {
    pub seminorm: f64,
    pub denominator: f64,
    pub ratio: f64,
}

/// Extends f(i) = (-1)^i on {0..n} and compares the extension sup-seminorm
/// with the exact trace norm m! sup |d^m f| = 2^m. The quotient is at least 1
/// because the mean-value bound forces the seminorm above every window
/// difference; it is not claimed optimal.
pub fn km_lower_experiment(m: usize, n: usize) -> Result<KmLowerExperiment> {
    if n < m + 2 {
        return Err(Error::TooFewPoints { needed: m + 2, got: n });
    }
    let xs: Vec<f64> = (0..=n).map(|i| i as f64).collect();
    let ys: Vec<f64> = (0..=n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let e = SampleSet::new(xs, ys)?;
    let field = build_field(&e, m)?;
    let ext = assemble_extension(&field)?;
    let seminorm = lmp_seminorm(&ext, crate::polycore::Exponent::Infinity)?;
    let denominator = factorial(m) * n_infty(&e, m)?;
    Ok(KmLowerExperiment { seminorm, denominator, ratio: seminorm / denominator })
}
