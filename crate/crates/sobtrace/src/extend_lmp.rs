//! Assembly of the piecewise-polynomial Whitney extension from a field of
//! jets: a two-endpoint Hermite polynomial on every bounded gap, the extreme
//! jets on the two unbounded tails. The result interpolates the data, is
//! C^{m-1} across every knot, and its degree never exceeds 2m-1 (a spline of
//! order 2m with knots at the data).

use crate::error::{Error, Result};
use crate::polycore::{hermite_gap, poly_p_integral, Exponent, Poly};
use crate::whitfield::WhitneyField;

/// The assembled extension F.
#[derive(Clone, Debug)]
pub struct PiecewiseExtension {
    m: usize,
    breaks: Vec<f64>,
    values: Vec<f64>,
    gap_polys: Vec<Poly>,
    left_tail: Poly,
    right_tail: Poly,
}

impl PiecewiseExtension {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    /// Data values at the breaks.
    pub fn knot_values(&self) -> &[f64] {
        &self.values
    }

    pub fn gap_polys(&self) -> &[Poly] {
        &self.gap_polys
    }

    pub fn left_tail(&self) -> &Poly {
        &self.left_tail
    }

    pub fn right_tail(&self) -> &Poly {
        &self.right_tail
    }

    /// Test aid: additively perturbs one coefficient of one gap polynomial.
    /// Used by the verification harness as a negative control.
    pub(crate) fn perturb_gap(&mut self, gap: usize, coeff: usize, delta: f64) {
        let mut c = self.gap_polys[gap].coeffs().to_vec();
        if coeff < c.len() {
            c[coeff] += delta;
            let center = self.gap_polys[gap].center();
            self.gap_polys[gap] = Poly::new(center, c).unwrap();
        }
    }
}

/// Builds the extension from a jet field with at least two knots.
pub fn assemble_extension(field: &WhitneyField) -> Result<PiecewiseExtension> {
    let n = field.len();
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    let m = field.m();
    let xs = field.knots();
    let jets = field.jets();
    let mut gap_polys = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        gap_polys.push(hermite_gap(&jets[i], &jets[i + 1], xs[i], xs[i + 1], m)?);
    }
    Ok(PiecewiseExtension {
        m,
        breaks: xs.to_vec(),
        values: field.values().to_vec(),
        gap_polys,
        left_tail: jets[0].clone(),
        right_tail: jets[n - 1].clone(),
    })
}

/// F^(order)(x). At a break the piece to the right of the break is used, so
/// the order-m value (discontinuous in general) is reported deterministically.
/// Orders above 2m-1 are identically zero.
pub fn extension_eval(f: &PiecewiseExtension, x: f64, order: usize) -> f64 {
    let piece = piece_at(f, x);
    piece.eval_deriv(x, order)
}

fn piece_at(f: &PiecewiseExtension, x: f64) -> &Poly {
    let n = f.breaks.len();
    if x < f.breaks[0] {
        &f.left_tail
    } else if x >= f.breaks[n - 1] {
        &f.right_tail
    } else {
        // breaks[j] <= x < breaks[j+1]
        let j = f.breaks.partition_point(|&b| b <= x) - 1;
        &f.gap_polys[j]
    }
}

/// Homogeneous Sobolev seminorm of the extension: the L_p norm of F^(m).
/// The tails have degree <= m-1 and contribute nothing, so only gaps count.
/// Finite p must exceed 1; p = infinity returns the sup over the gaps.
pub fn lmp_seminorm(f: &PiecewiseExtension, p: Exponent) -> Result<f64> {
    match p {
        Exponent::Finite(pf) => {
            if !(pf > 1.0) || !pf.is_finite() {
                return Err(Error::BadExponent);
            }
            let mut acc = 0.0;
            for (i, q) in f.gap_polys.iter().enumerate() {
                let dm = q.derivative(f.m);
                acc += poly_p_integral(&dm, f.breaks[i], f.breaks[i + 1], p)?;
            }
            Ok(acc.powf(1.0 / pf))
        }
        Exponent::Infinity => {
            let mut best = 0.0f64;
            for (i, q) in f.gap_polys.iter().enumerate() {
                let dm = q.derivative(f.m);
                best = best.max(poly_p_integral(&dm, f.breaks[i], f.breaks[i + 1], p)?);
            }
            Ok(best)
        }
    }
}

/// Largest relative one-sided derivative mismatch over all breaks and orders
/// 0..m-1; at or below roundoff for a correctly assembled extension.
pub fn smoothness_report(f: &PiecewiseExtension) -> f64 {
    let n = f.breaks.len();
    let mut worst = 0.0f64;
    for j in 0..n {
        let x = f.breaks[j];
        let left: &Poly = if j == 0 { &f.left_tail } else { &f.gap_polys[j - 1] };
        let right: &Poly = if j == n - 1 { &f.right_tail } else { &f.gap_polys[j] };
        for i in 0..f.m {
            let lv = left.eval_deriv(x, i);
            let rv = right.eval_deriv(x, i);
            worst = worst.max((lv - rv).abs() / (1.0 + rv.abs()));
        }
    }
    worst
}
