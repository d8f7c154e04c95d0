//! Polynomial arithmetic, divided differences, Lagrange interpolation,
//! B-splines, and the two-endpoint Hermite gap polynomial.
//!
//! Everything here is exact-degree arithmetic on low-degree polynomials in a
//! shifted monomial basis, plus the two numerical primitives the rest of the
//! crate leans on: adaptive Gauss-Legendre integration of |q|^p and an exact
//! sup-norm via critical-point isolation.

use crate::error::{Error, Result};
use std::str::FromStr;
use std::sync::OnceLock;

/// Strictly increasing abscissae with one value per abscissa.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl SampleSet {
    /// Validates and wraps raw data. Abscissae must be finite and strictly
    /// increasing, values finite, both nonempty and of equal length.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.is_empty() {
            return Err(Error::EmptyInput);
        }
        if xs.len() != ys.len() {
            return Err(Error::LengthMismatch { left: xs.len(), right: ys.len() });
        }
        if xs.iter().chain(ys.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        for i in 1..xs.len() {
            if xs[i] <= xs[i - 1] {
                return Err(Error::NotIncreasing { index: i });
            }
        }
        Ok(SampleSet { xs, ys })
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction guarantees at least one point
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn x(&self, i: usize) -> f64 {
        self.xs[i]
    }

    pub fn y(&self, i: usize) -> f64 {
        self.ys[i]
    }

    pub fn min_x(&self) -> f64 {
        self.xs[0]
    }

    pub fn max_x(&self) -> f64 {
        *self.xs.last().unwrap()
    }

    /// Sub-sample at the given strictly increasing indices.
    pub(crate) fn take(&self, idx: &[usize]) -> SampleSet {
        SampleSet {
            xs: idx.iter().map(|&i| self.xs[i]).collect(),
            ys: idx.iter().map(|&i| self.ys[i]).collect(),
        }
    }
}

/// Integrability exponent: a finite real or infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn finite(self) -> Option<f64> {
        match self {
            Exponent::Finite(p) => Some(p),
            Exponent::Infinity => None,
        }
    }

    /// True for finite p > 1, the range the trace functionals accept.
    pub fn is_trace_exponent(self) -> bool {
        matches!(self, Exponent::Finite(p) if p > 1.0 && p.is_finite())
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") || t == "∞" {
            return Ok(Exponent::Infinity);
        }
        match t.parse::<f64>() {
            Ok(p) if p.is_finite() => Ok(Exponent::Finite(p)),
            _ => Err(Error::BadExponent),
        }
    }
}

impl std::fmt::Display for Exponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

impl serde::Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => s.serialize_f64(*p),
            Exponent::Infinity => s.serialize_str("inf"),
        }
    }
}

/// Polynomial q(x) = sum a_j (x - center)^j in a shifted monomial basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    center: f64,
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(center: f64, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptyInput);
        }
        if !center.is_finite() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Poly { center, coeffs })
    }

    pub fn zero(center: f64) -> Self {
        Poly { center, coeffs: vec![0.0] }
    }

    pub fn constant(center: f64, value: f64) -> Self {
        Poly { center, coeffs: vec![value] }
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Nominal degree: index of the last stored coefficient.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Degree after ignoring exactly-zero trailing coefficients.
    pub fn trimmed_degree(&self) -> usize {
        let mut d = self.coeffs.len() - 1;
        while d > 0 && self.coeffs[d] == 0.0 {
            d -= 1;
        }
        d
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// True when every coefficient is at most `tol` in absolute value.
    pub fn is_negligible(&self, tol: f64) -> bool {
        self.max_abs_coeff() <= tol
    }

    /// Value of the `order`-th derivative at `x` (0 for order > degree).
    pub fn eval_deriv(&self, x: f64, order: usize) -> f64 {
        let n = self.coeffs.len();
        if order >= n {
            return 0.0;
        }
        let u = x - self.center;
        let mut acc = 0.0;
        for j in (order..n).rev() {
            acc = acc * u + self.coeffs[j] * falling(j, order);
        }
        acc
    }

    /// Exact derivative polynomial of the given order.
    pub fn derivative(&self, order: usize) -> Poly {
        let n = self.coeffs.len();
        if order >= n {
            return Poly::zero(self.center);
        }
        let coeffs = (order..n).map(|j| self.coeffs[j] * falling(j, order)).collect();
        Poly { center: self.center, coeffs }
    }

    /// Rewrites the polynomial about a new center (Ruffini-Horner shift).
    pub fn recenter(&self, new_center: f64) -> Poly {
        if new_center == self.center {
            return self.clone();
        }
        let d = new_center - self.center;
        let n = self.coeffs.len();
        let mut a = self.coeffs.clone();
        for k in 0..n {
            for j in (k..n - 1).rev() {
                a[j] += d * a[j + 1];
            }
        }
        Poly { center: new_center, coeffs: a }
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly { center: self.center, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    /// Sum, expressed about `self`'s center.
    pub fn add(&self, other: &Poly) -> Poly {
        let o = other.recenter(self.center);
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut coeffs = vec![0.0; n];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        for (i, c) in o.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        Poly { center: self.center, coeffs }
    }

    /// Product, expressed about `self`'s center.
    pub fn mul(&self, other: &Poly) -> Poly {
        let o = other.recenter(self.center);
        let mut coeffs = vec![0.0; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Poly { center: self.center, coeffs }
    }

    /// Drops all coefficients above `max_degree` (Taylor truncation when the
    /// basis is centered at the expansion point).
    pub fn truncate(&self, max_degree: usize) -> Poly {
        let keep = (max_degree + 1).min(self.coeffs.len());
        Poly { center: self.center, coeffs: self.coeffs[..keep].to_vec() }
    }
}

/// j (j-1) ... (j-r+1) as f64; 1 for r = 0.
fn falling(j: usize, r: usize) -> f64 {
    let mut f = 1.0;
    for t in 0..r {
        f *= (j - t) as f64;
    }
    f
}

/// Binomial coefficient as f64 (exact for the small arguments used here).
pub(crate) fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

pub(crate) fn factorial(n: usize) -> f64 {
    falling(n, n)
}

fn validate_nodes(points: &[f64], values: &[f64]) -> Result<()> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    if points.len() != values.len() {
        return Err(Error::LengthMismatch { left: points.len(), right: values.len() });
    }
    if points.iter().chain(values.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::DegenerateNodes);
    }
    Ok(())
}

/// Divided difference over the given nodes, by the Neville-style recursion.
///
/// The nodes may come in any order; the result is the leading coefficient of
/// the interpolating polynomial and is symmetric in the (point, value) pairs.
pub fn divided_difference(points: &[f64], values: &[f64]) -> Result<f64> {
    validate_nodes(points, values)?;
    let n = points.len();
    let mut table = values.to_vec();
    for k in 1..n {
        for i in 0..n - k {
            table[i] = (table[i + 1] - table[i]) / (points[i + k] - points[i]);
        }
    }
    Ok(table[0])
}

/// Interpolating polynomial through the given nodes, centered at the midpoint
/// of the node range. Degree is exactly `points.len() - 1` (possibly with a
/// zero leading coefficient).
pub fn lagrange_poly(points: &[f64], values: &[f64]) -> Result<Poly> {
    validate_nodes(points, values)?;
    let n = points.len();
    // Newton coefficients c[j] = divided difference over the first j+1 nodes.
    let mut c = values.to_vec();
    for k in 1..n {
        for i in (k..n).rev() {
            c[i] = (c[i] - c[i - 1]) / (points[i] - points[i - k]);
        }
    }
    let lo = points.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = points.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let center = 0.5 * (lo + hi);
    // Horner accumulation of the Newton form in the (x - center) basis.
    let mut acc = vec![0.0; 1];
    for j in (0..n).rev() {
        let d = center - points[j];
        let mut next = vec![0.0; acc.len() + 1];
        for (k, &a) in acc.iter().enumerate() {
            next[k + 1] += a;
            next[k] += a * d;
        }
        next[0] += c[j];
        // Keep length n: the top slot stays zero until the last iterations.
        next.truncate(n);
        acc = next;
    }
    Poly::new(center, acc)
}

fn omega_prime(points: &[f64], i: usize) -> f64 {
    let mut w = 1.0;
    for (j, &x) in points.iter().enumerate() {
        if j != i {
            w *= points[i] - x;
        }
    }
    w
}

fn require_bspline_nodes(points: &[f64]) -> Result<usize> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    if points.len() == 1 {
        return Err(Error::UnsupportedOrder);
    }
    if points.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    for i in 1..points.len() {
        if points[i] <= points[i - 1] {
            return Err(Error::NotIncreasing { index: i });
        }
    }
    Ok(points.len() - 1)
}

/// Normalized B-spline M_k over the nodes, evaluated at `t`:
/// k times the divided difference in u of (u - t)_+^{k-1}.
pub fn bspline_eval(points: &[f64], t: f64) -> Result<f64> {
    bspline_deriv(points, t, 0)
}

/// Derivative of order `order` of the normalized B-spline at `t`.
/// Zero identically for order >= k (the spline has degree k-1 per piece).
pub fn bspline_deriv(points: &[f64], t: f64, order: usize) -> Result<f64> {
    let k = require_bspline_nodes(points)?;
    if order > k - 1 {
        return Ok(0.0);
    }
    let pow = k - 1 - order;
    let mut sum = 0.0;
    for (i, &x) in points.iter().enumerate() {
        let u = x - t;
        if u > 0.0 {
            sum += u.powi(pow as i32) / omega_prime(points, i);
        }
    }
    let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * k as f64 * falling(k - 1, order) * sum)
}

/// Integral of the normalized B-spline over its support; equals 1. Computed
/// per knot interval with a fixed 16-node rule, which is exact for the
/// piecewise degree k-1 <= 31.
pub fn bspline_integral(points: &[f64]) -> Result<f64> {
    require_bspline_nodes(points)?;
    let mut total = 0.0;
    for w in points.windows(2) {
        total += gl16(&|t| bspline_eval(points, t).unwrap(), w[0], w[1]);
    }
    Ok(total)
}

fn check_jet_degree(p: &Poly, m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::UnsupportedOrder);
    }
    let d = p.trimmed_degree();
    if d > m - 1 {
        return Err(Error::JetDegreeTooHigh { max_degree: m - 1, got: d });
    }
    Ok(())
}

/// The unique polynomial of degree <= 2m-1 whose derivatives of orders
/// 0..m-1 at `a` match `p_a` and at `b` match `p_b`, built from the explicit
/// two-point Hermite formula with binomial weights and endpoint Taylor
/// truncations. The result is centered at the interval midpoint.
pub fn hermite_gap(p_a: &Poly, p_b: &Poly, a: f64, b: f64, m: usize) -> Result<Poly> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::BadInterval);
    }
    check_jet_degree(p_a, m)?;
    check_jet_degree(p_b, m)?;
    let c = 0.5 * (a + b);
    let w = b - a;
    // Work in the unit variable u = (x - a) / w so every intermediate
    // coefficient stays O(binomial); powers of w enter only twice, exactly:
    // scaling the jet coefficients in and the result coefficients out.
    // Jets stay centered at their own endpoint: the Taylor truncations below
    // must act on the endpoint expansion.
    let jet_in = |p: &Poly, at: f64, u_at: f64| -> Poly {
        let mut cs = p.recenter(at).coeffs().to_vec();
        cs.resize(m, 0.0);
        let mut s = 1.0;
        for coef in cs.iter_mut() {
            *coef *= s;
            s *= w;
        }
        Poly::new(u_at, cs).unwrap()
    };
    // (1 - u) and u about the unit midpoint.
    let one_minus_u = Poly::new(0.5, vec![0.5, -1.0]).unwrap();
    let u = Poly::new(0.5, vec![0.5, 1.0]).unwrap();

    let half = |lead: &Poly, other: &Poly, jet: &Poly| -> Poly {
        // lead^m * sum_k binom(m+k-1, m-1) other^k * jet truncated to m-1-k
        let mut lead_m = Poly::constant(0.5, 1.0);
        for _ in 0..m {
            lead_m = lead_m.mul(lead);
        }
        let mut sum = Poly::zero(0.5);
        let mut other_k = Poly::constant(0.5, 1.0);
        for k in 0..m {
            let coef = binom(m + k - 1, m - 1);
            let trunc = jet.truncate(m - 1 - k);
            sum = sum.add(&other_k.mul(&trunc).scale(coef));
            other_k = other_k.mul(other);
        }
        lead_m.mul(&sum)
    };

    let ja = jet_in(p_a, a, 0.0);
    let jb = jet_in(p_b, b, 1.0);
    let h_unit = half(&one_minus_u, &u, &ja)
        .add(&half(&u, &one_minus_u, &jb))
        .truncate(2 * m - 1);
    let mut cs = h_unit.coeffs().to_vec();
    let mut s = 1.0;
    for coef in cs.iter_mut() {
        *coef /= s;
        s *= w;
    }
    Ok(Poly::new(c, cs)?)
}

/// Same polynomial as [`hermite_gap`], obtained instead by solving the m x m
/// linear system for the coefficients of orders m..2m-1 about `a`. Used as an
/// independent cross-check of the explicit formula.
pub fn hermite_gap_via_system(p_a: &Poly, p_b: &Poly, a: f64, b: f64, m: usize) -> Result<Poly> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::BadInterval);
    }
    check_jet_degree(p_a, m)?;
    check_jet_degree(p_b, m)?;
    let w = b - a;
    // Unknowns g_k (k = m..2m-1) in H = P_a + sum g_k (x-a)^k / k!, with
    // H^{(n)}(b) = P_b^{(n)}(b) for n = 0..m-1.
    let mut mat = vec![vec![0.0; m]; m];
    let mut rhs = vec![0.0; m];
    for n in 0..m {
        for (col, k) in (m..2 * m).enumerate() {
            mat[n][col] = w.powi((k - n) as i32) / factorial(k - n);
        }
        rhs[n] = p_b.eval_deriv(b, n) - p_a.eval_deriv(b, n);
    }
    let g = solve_dense(mat, rhs)?;
    let mut coeffs = p_a.recenter(a).coeffs().to_vec();
    coeffs.resize(2 * m, 0.0);
    for (col, k) in (m..2 * m).enumerate() {
        coeffs[k] += g[col] / factorial(k);
    }
    Ok(Poly::new(a, coeffs)?.recenter(0.5 * (a + b)))
}

/// Dense linear solve with partial pivoting; small systems only.
pub(crate) fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[pivot][col].abs() == 0.0 {
            return Err(Error::DegenerateNodes);
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in row + 1..n {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    Ok(x)
}

/// Value of the `order`-th derivative of `q` at `x`.
pub fn poly_eval(q: &Poly, x: f64, order: usize) -> f64 {
    q.eval_deriv(x, order)
}

// 16-node Gauss-Legendre rule on [-1, 1], nodes found by Newton iteration on
// the degree-16 Legendre polynomial.
fn gl16_rule() -> &'static [(f64, f64); 16] {
    static RULE: OnceLock<[(f64, f64); 16]> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = 16usize;
        let mut rule = [(0.0f64, 0.0f64); 16];
        for i in 0..n {
            // Standard initial guess, then Newton on P_16.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_with_deriv(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre_with_deriv(n, x);
            rule[i] = (x, 2.0 / ((1.0 - x * x) * dp * dp));
        }
        rule
    })
}

fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Fixed 16-node Gauss-Legendre panel over [a, b].
pub(crate) fn gl16(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = 0.0;
    for &(x, w) in gl16_rule() {
        acc += w * f(mid + half * x);
    }
    acc * half
}

const PANEL_CAP: usize = 1 << 14;

/// Composite 16-node panels, panel count doubled until the value settles to
/// a 1e-10 relative change, capped at 2^14 panels.
pub(crate) fn adaptive_integral(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> Result<f64> {
    adaptive_integral_floor(f, a, b, 0.0)
}

/// Panel doubling with an absolute settling floor: a change below
/// 1e-10 * floor also counts as settled. Callers that know the natural
/// scale of the integral pass it as `floor` so that cells whose true
/// contribution is rounding noise do not spin until the panel cap.
pub(crate) fn adaptive_integral_floor(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    floor: f64,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut panels = 1usize;
    let mut prev = f64::NAN;
    loop {
        let h = (b - a) / panels as f64;
        let mut acc = 0.0;
        for i in 0..panels {
            let lo = a + h * i as f64;
            acc += gl16(f, lo, lo + h);
        }
        if prev.is_finite()
            && (acc - prev).abs() <= 1e-10 * acc.abs().max(floor).max(f64::MIN_POSITIVE)
        {
            return Ok(acc);
        }
        if panels >= PANEL_CAP {
            return Err(Error::QuadratureFailure { best: acc });
        }
        prev = acc;
        panels *= 2;
    }
}

/// For finite p >= 1: the integral of |q|^p over [a, b], computed between
/// consecutive sign changes of q so the integrand is smooth on every cell
/// (a kink at an interior root stalls the panel-doubling rule). For
/// p = infinity: the sup of |q| over [a, b], found exactly from the
/// endpoints and the real critical points of q (sign-change isolation on a
/// 64 * degree grid, polished by bisection).
pub fn poly_p_integral(q: &Poly, a: f64, b: f64, p: Exponent) -> Result<f64> {
    if !a.is_finite() || !b.is_finite() || a > b {
        return Err(Error::BadInterval);
    }
    if a == b {
        return Ok(0.0);
    }
    match p {
        Exponent::Finite(pf) => {
            if !(pf >= 1.0) || !pf.is_finite() {
                return Err(Error::BadExponent);
            }
            let mut cuts = vec![a];
            cuts.extend(sign_change_roots(q, a, b));
            cuts.push(b);
            // Cells whose contribution sits below rounding relevance for the
            // whole integral are allowed to settle on absolute smallness.
            let floor = 1e-6 * sup_abs_on(q, a, b).powf(pf) * (b - a);
            let mut acc = 0.0;
            for w in cuts.windows(2) {
                if w[1] > w[0] {
                    acc += adaptive_integral_floor(
                        &|x| q.eval_deriv(x, 0).abs().powf(pf),
                        w[0],
                        w[1],
                        floor,
                    )?;
                }
            }
            Ok(acc)
        }
        Exponent::Infinity => Ok(sup_abs_on(q, a, b)),
    }
}

/// Interior sign-change roots of q on [a, b]: isolated on a 64 * degree
/// grid, polished by bisection, returned in increasing order.
fn sign_change_roots(q: &Poly, a: f64, b: f64) -> Vec<f64> {
    let mut roots = Vec::new();
    if q.trimmed_degree() == 0 {
        return roots;
    }
    let samples = 64 * q.degree().max(1) + 1;
    let h = (b - a) / (samples - 1) as f64;
    let tol = 1e-13 * (1.0 + a.abs().max(b.abs()) + (b - a));
    let mut prev_x = a;
    let mut prev_v = q.eval_deriv(a, 0);
    for i in 1..samples {
        let x = if i + 1 == samples { b } else { a + h * i as f64 };
        let v = q.eval_deriv(x, 0);
        if v == 0.0 {
            roots.push(x);
        } else if prev_v != 0.0 && prev_v.signum() != v.signum() {
            roots.push(bisect_root(q, prev_x, x, tol));
        }
        prev_x = x;
        prev_v = v;
    }
    roots
}

/// Exact sup of |q| on [a, b] via endpoints plus the critical points of q.
fn sup_abs_on(q: &Poly, a: f64, b: f64) -> f64 {
    let mut best = q.eval_deriv(a, 0).abs().max(q.eval_deriv(b, 0).abs());
    let dq = q.derivative(1);
    if dq.trimmed_degree() == 0 && dq.coeffs()[0] == 0.0 {
        return best; // constant polynomial
    }
    let samples = 64 * q.degree().max(1) + 1;
    let h = (b - a) / (samples - 1) as f64;
    let tol = 1e-13 * (1.0 + a.abs().max(b.abs()) + (b - a));
    let mut prev_x = a;
    let mut prev_v = dq.eval_deriv(a, 0);
    for i in 1..samples {
        let x = if i + 1 == samples { b } else { a + h * i as f64 };
        let v = dq.eval_deriv(x, 0);
        if prev_v == 0.0 {
            best = best.max(q.eval_deriv(prev_x, 0).abs());
        } else if v != 0.0 && prev_v.signum() != v.signum() {
            let root = bisect_root(&dq, prev_x, x, tol);
            best = best.max(q.eval_deriv(root, 0).abs());
        }
        prev_x = x;
        prev_v = v;
    }
    if prev_v == 0.0 {
        best = best.max(q.eval_deriv(prev_x, 0).abs());
    }
    best
}

fn bisect_root(q: &Poly, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut flo = q.eval_deriv(lo, 0);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = q.eval_deriv(mid, 0);
        if fm == 0.0 {
            return mid;
        }
        if flo.signum() == fm.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn poly_from_std_coeffs(coeffs: &[f64]) -> Poly {
        Poly::new(0.0, coeffs.to_vec()).unwrap()
    }

    #[test]
    fn divided_difference_examples() {
        // 1. A single node returns its value.
        assert_eq!(divided_difference(&[0.0], &[7.0]).unwrap(), 7.0);
        // 2. Samples of x^2 have leading coefficient 1.
        assert!((divided_difference(&[0.0, 1.0, 2.0], &[0.0, 1.0, 4.0]).unwrap() - 1.0).abs() < 1e-12);
        // 3. Differences of a constant vanish.
        assert_eq!(divided_difference(&[0.0, 1.0, 3.0], &[2.0, 2.0, 2.0]).unwrap(), 0.0);
        // 4. Duplicate nodes are rejected.
        assert_eq!(
            divided_difference(&[0.0, 0.0], &[1.0, 2.0]).unwrap_err(),
            Error::DegenerateNodes
        );
    }

    #[test]
    fn lagrange_examples() {
        // 1. Linear interpolation through (0,1), (2,5).
        let q = lagrange_poly(&[0.0, 2.0], &[1.0, 5.0]).unwrap();
        assert!((q.eval_deriv(1.0, 0) - 3.0).abs() < 1e-12);
        // 2. Quadratic samples reproduce x^2 away from the nodes.
        let q = lagrange_poly(&[0.0, 1.0, 2.0], &[0.0, 1.0, 4.0]).unwrap();
        assert!((q.eval_deriv(10.0, 0) - 100.0).abs() < 1e-9);
        // 3. Interpolation conditions hold exactly at the nodes.
        let q = lagrange_poly(&[0.0, 1.0, 3.0], &[1.0, 0.0, 4.0]).unwrap();
        for (x, y) in [(0.0, 1.0), (1.0, 0.0), (3.0, 4.0)] {
            assert!((q.eval_deriv(x, 0) - y).abs() < 1e-12);
        }
    }

    #[test]
    fn poly_eval_examples() {
        // 1. (x^2)' at 3 is 6.
        let q = poly_from_std_coeffs(&[0.0, 0.0, 1.0]);
        assert_eq!(poly_eval(&q, 3.0, 1), 6.0);
        // 2. Orders above the degree give 0.
        assert_eq!(poly_eval(&q, 3.0, 3), 0.0);
        // 3. Third derivative of (x-5)^3 is 3! everywhere.
        let c = Poly::new(5.0, vec![0.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(poly_eval(&c, 5.0, 3), 6.0);
    }

    #[test]
    fn recenter_is_exact_for_quadratics() {
        let q = poly_from_std_coeffs(&[1.0, -2.0, 3.0]);
        let r = q.recenter(4.0);
        for x in [-3.0, 0.0, 0.5, 4.0, 11.0] {
            assert!((q.eval_deriv(x, 0) - r.eval_deriv(x, 0)).abs() < 1e-10);
        }
    }

    #[test]
    fn bspline_examples() {
        // 1. Order 1: the indicator of [x0, x1).
        assert_eq!(bspline_eval(&[0.0, 1.0], 0.5).unwrap(), 1.0);
        // 2. Order 2: the hat peaks at 1 over the middle node.
        assert!((bspline_eval(&[0.0, 1.0, 2.0], 1.0).unwrap() - 1.0).abs() < 1e-12);
        // 3. Zero outside the support.
        assert_eq!(bspline_eval(&[0.0, 1.0], 2.0).unwrap(), 0.0);
        // 4. A single node is rejected.
        assert_eq!(bspline_eval(&[0.0], 0.0).unwrap_err(), Error::UnsupportedOrder);
    }

    #[test]
    fn bspline_unit_integrals() {
        // 1. Two nodes.
        assert!((bspline_integral(&[0.0, 1.0]).unwrap() - 1.0).abs() < 1e-12);
        // 2. Wide uneven nodes.
        assert!((bspline_integral(&[0.0, 1.0, 2.0, 5.0]).unwrap() - 1.0).abs() < 1e-9);
        // 3. Tight interval: relative accuracy survives the 1e-6 scale.
        let v = bspline_integral(&[0.0, 1e-6]).unwrap();
        assert!((v - 1.0).abs() < 1e-6);
    }

    #[test]
    fn hermite_gap_examples() {
        // 1. Shared jet: uniqueness forces H = q.
        let q = poly_from_std_coeffs(&[2.0, -1.0]);
        let h = hermite_gap(&q, &q, 0.0, 3.0, 2).unwrap();
        for x in [0.0, 1.0, 2.7, 3.0] {
            assert!((h.eval_deriv(x, 0) - q.eval_deriv(x, 0)).abs() < 1e-10);
        }
        // 2. m = 1 endpoint interpolation: constants 0 and 1 over (0, 2).
        let h = hermite_gap(
            &Poly::constant(0.0, 0.0),
            &Poly::constant(2.0, 1.0),
            0.0,
            2.0,
            1,
        )
        .unwrap();
        assert!((h.eval_deriv(1.0, 0) - 0.5).abs() < 1e-12);
        // 3. m = 2 with both jets equal to x reproduces x.
        let idp = poly_from_std_coeffs(&[0.0, 1.0]);
        let h = hermite_gap(&idp, &idp, 0.0, 1.0, 2).unwrap();
        assert!((h.eval_deriv(0.25, 0) - 0.25).abs() < 1e-12);
        // 4. A backwards interval is rejected.
        assert_eq!(
            hermite_gap(&idp, &idp, 1.0, 0.0, 2).unwrap_err(),
            Error::BadInterval
        );
    }

    #[test]
    fn hermite_gap_frozen_cubic() {
        // Jets x and 3x-2 on (1, 2): H(1)=1, H'(1)=1, H(2)=4, H'(2)=3, so
        // H = 1 + t + 4t^2 - 2t^3 in t = x-1 and H'' = 8 - 12t.
        let pa = poly_from_std_coeffs(&[0.0, 1.0]);
        let pb = poly_from_std_coeffs(&[-2.0, 3.0]);
        let h = hermite_gap(&pa, &pb, 1.0, 2.0, 2).unwrap();
        assert!((h.eval_deriv(1.0, 0) - 1.0).abs() < 1e-12);
        assert!((h.eval_deriv(1.0, 1) - 1.0).abs() < 1e-12);
        assert!((h.eval_deriv(2.0, 0) - 4.0).abs() < 1e-12);
        assert!((h.eval_deriv(2.0, 1) - 3.0).abs() < 1e-12);
        assert!((h.eval_deriv(1.0, 2) - 8.0).abs() < 1e-10);
        assert!((h.eval_deriv(1.5, 2) - 2.0).abs() < 1e-10);
    }

    #[test]
    fn hermite_system_route_agrees() {
        // Random-ish fixed jets for m = 3; both constructions must coincide.
        let pa = poly_from_std_coeffs(&[1.0, -0.5, 0.25]);
        let pb = poly_from_std_coeffs(&[-2.0, 0.75, 1.5]);
        let (a, b) = (0.5, 2.75);
        let h1 = hermite_gap(&pa, &pb, a, b, 3).unwrap();
        let h2 = hermite_gap_via_system(&pa, &pb, a, b, 3).unwrap();
        for i in 0..=20 {
            let x = a + (b - a) * i as f64 / 20.0;
            assert!((h1.eval_deriv(x, 0) - h2.eval_deriv(x, 0)).abs() < 1e-8);
        }
    }

    #[test]
    fn p_integral_examples() {
        // 1. Constant squared over a unit interval.
        let c = Poly::constant(0.0, 3.0);
        assert!((poly_p_integral(&c, 0.0, 1.0, Exponent::Finite(2.0)).unwrap() - 9.0).abs() < 1e-9);
        // 2. Integral of x^2 over [0, 1].
        let x = poly_from_std_coeffs(&[0.0, 1.0]);
        let v = poly_p_integral(&x, 0.0, 1.0, Exponent::Finite(2.0)).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-10);
        // 3. Integral of |x|^3 over [-1, 1].
        let v = poly_p_integral(&x, -1.0, 1.0, Exponent::Finite(3.0)).unwrap();
        assert!((v - 0.5).abs() < 1e-10);
        // 4. p below 1 is rejected.
        assert_eq!(
            poly_p_integral(&x, 0.0, 1.0, Exponent::Finite(0.5)).unwrap_err(),
            Error::BadExponent
        );
    }

    #[test]
    fn sup_norm_examples() {
        // 1. x(1-x) on [0, 2]: the endpoint value 2 beats the interior 1/4.
        let q = poly_from_std_coeffs(&[0.0, 1.0, -1.0]);
        assert!((poly_p_integral(&q, 0.0, 2.0, Exponent::Infinity).unwrap() - 2.0).abs() < 1e-12);
        // 2. Interior critical point wins on [0, 1].
        assert!((poly_p_integral(&q, 0.0, 1.0, Exponent::Infinity).unwrap() - 0.25).abs() < 1e-12);
        // 3. Constant polynomial.
        let c = Poly::constant(0.0, -4.0);
        assert_eq!(poly_p_integral(&c, 1.0, 5.0, Exponent::Infinity).unwrap(), 4.0);
    }

    #[test]
    fn sup_norm_dominates_dense_samples() {
        let q = poly_from_std_coeffs(&[0.3, -1.2, 0.0, 2.0, -0.7]);
        let (a, b) = (-1.5, 2.0);
        let sup = poly_p_integral(&q, a, b, Exponent::Infinity).unwrap();
        let mut sampled: f64 = 0.0;
        for i in 0..=10_000 {
            let x = a + (b - a) * i as f64 / 10_000.0;
            sampled = sampled.max(q.eval_deriv(x, 0).abs());
        }
        assert!(sup >= sampled - 1e-9 * sampled.abs());
        assert!(sup <= sampled + 1e-6 * (1.0 + sampled));
    }

    #[test]
    fn exponent_parsing() {
        // 1. Plain numbers parse as finite.
        assert_eq!("2".parse::<Exponent>().unwrap(), Exponent::Finite(2.0));
        // 2. The infinity token, case-insensitive.
        assert_eq!("Inf".parse::<Exponent>().unwrap(), Exponent::Infinity);
        // 3. Garbage is rejected.
        assert!("two".parse::<Exponent>().is_err());
    }

    #[test]
    fn sample_set_validation() {
        // 1. Strictly increasing data is accepted.
        assert!(SampleSet::new(vec![0.0, 1.0], vec![1.0, 2.0]).is_ok());
        // 2. Duplicates are flagged with their index.
        assert_eq!(
            SampleSet::new(vec![0.0, 0.0], vec![1.0, 2.0]).unwrap_err(),
            Error::NotIncreasing { index: 1 }
        );
        // 3. NaN values are rejected.
        assert_eq!(
            SampleSet::new(vec![0.0, 1.0], vec![f64::NAN, 2.0]).unwrap_err(),
            Error::NonFinite
        );
    }

    fn sorted_nodes(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(0.01f64..2.0, 1..=max_len).prop_map(|incs| {
            let mut x = -1.0;
            incs.iter()
                .map(|d| {
                    x += d;
                    x
                })
                .collect()
        })
    }

    proptest! {
        // Leading-coefficient identity: k! * divided difference equals the
        // top coefficient of the interpolating polynomial.
        #[test]
        fn leading_coefficient_identity(
            xs in sorted_nodes(8),
            seed in proptest::collection::vec(-5.0f64..5.0, 8),
        ) {
            let ys: Vec<f64> = xs.iter().enumerate().map(|(i, _)| seed[i % seed.len()]).collect();
            let k = xs.len() - 1;
            let dd = divided_difference(&xs, &ys).unwrap();
            let q = lagrange_poly(&xs, &ys).unwrap();
            let lead = q.eval_deriv(0.0, k) / factorial(k);
            let scale = ys.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            prop_assert!((dd - lead).abs() <= 1e-9 * scale.max(dd.abs()));
        }

        // Divided differences are symmetric in the (point, value) pairs.
        #[test]
        fn permutation_invariance(
            xs in sorted_nodes(7),
            seed in proptest::collection::vec(-5.0f64..5.0, 7),
            rot in 0usize..7,
        ) {
            let ys: Vec<f64> = xs.iter().enumerate().map(|(i, _)| seed[i % seed.len()]).collect();
            let n = xs.len();
            let mut px: Vec<f64> = xs.clone();
            let mut py: Vec<f64> = ys.clone();
            px.rotate_left(rot % n);
            py.rotate_left(rot % n);
            let a = divided_difference(&xs, &ys).unwrap();
            let b = divided_difference(&px, &py).unwrap();
            let scale = a.abs().max(1e-6);
            prop_assert!((a - b).abs() <= 1e-7 * scale);
        }

        // Differences of order k annihilate polynomials of degree < k.
        #[test]
        fn annihilation(
            xs in sorted_nodes(7),
            coeffs in proptest::collection::vec(-3.0f64..3.0, 1..=6),
        ) {
            prop_assume!(xs.len() >= 2);
            let deg_used = coeffs.len().min(xs.len() - 1);
            let q = Poly::new(0.0, coeffs[..deg_used].to_vec()).unwrap();
            let ys: Vec<f64> = xs.iter().map(|&x| q.eval_deriv(x, 0)).collect();
            let dd = divided_difference(&xs, &ys).unwrap();
            let scale = ys.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            prop_assert!(dd.abs() <= 1e-9 * scale);
        }

        // 0 <= M_k <= k / (x_k - x_0) everywhere.
        #[test]
        fn bspline_bounds(xs in sorted_nodes(6), t in -2.0f64..12.0) {
            prop_assume!(xs.len() >= 2);
            let k = (xs.len() - 1) as f64;
            let span = xs.last().unwrap() - xs[0];
            let v = bspline_eval(&xs, t).unwrap();
            prop_assert!(v >= -1e-9 * (k / span));
            prop_assert!(v <= (k / span) * (1.0 + 1e-9) + 1e-12);
        }

        // Mean-value bound: |d^k F[S]| <= (1/(k-1)!) (1/(x_k-x_0)) int |F^(k)|.
        #[test]
        fn mean_value_bound(
            xs in sorted_nodes(6),
            coeffs in proptest::collection::vec(-2.0f64..2.0, 7),
        ) {
            prop_assume!(xs.len() >= 2);
            let q = Poly::new(0.0, coeffs).unwrap();
            let ys: Vec<f64> = xs.iter().map(|&x| q.eval_deriv(x, 0)).collect();
            let k = xs.len() - 1;
            let dd = divided_difference(&xs, &ys).unwrap().abs();
            let dk = q.derivative(k);
            let int_abs = poly_p_integral(&dk, xs[0], *xs.last().unwrap(), Exponent::Finite(1.0)).unwrap();
            let span = xs.last().unwrap() - xs[0];
            let bound = int_abs / (factorial(k - 1) * span);
            prop_assert!(dd <= bound * (1.0 + 1e-8) + 1e-12);
        }

        // Integral representation: d^k F[S] = (1/k!) int M_k F^(k).
        #[test]
        fn bspline_integral_representation(
            xs in sorted_nodes(5),
            coeffs in proptest::collection::vec(-2.0f64..2.0, 6),
        ) {
            prop_assume!(xs.len() >= 2);
            let q = Poly::new(0.0, coeffs).unwrap();
            let ys: Vec<f64> = xs.iter().map(|&x| q.eval_deriv(x, 0)).collect();
            let k = xs.len() - 1;
            let dd = divided_difference(&xs, &ys).unwrap();
            let dk = q.derivative(k);
            // Piecewise-polynomial integrand: integrate per knot interval.
            let mut rep = 0.0;
            for w in xs.windows(2) {
                rep += gl16(&|t| bspline_eval(&xs, t).unwrap() * dk.eval_deriv(t, 0), w[0], w[1]);
            }
            rep /= factorial(k);
            let scale = dd.abs().max(1.0);
            prop_assert!((dd - rep).abs() <= 1e-8 * scale);
        }
    }
}
