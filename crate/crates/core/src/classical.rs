//! Classical Poincaré series `P_{m,k}` on `Gamma_0(q)` and their Fourier
//! coefficients, by two independent routes: quadrature of the truncated coset
//! sum along `x + i y0`, and the Kloosterman/Bessel expansion.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::modgroup::{enumerate_g1_cosets, gamma0_indicator, CosetRepG1};
use crate::numerics::{bessel_j, cube_quadrature, e, kloosterman, pow_neg, QuadratureGrid};
use crate::report::ScanReport;

pub const DEFAULT_Y0: f64 = 1.1;
const MAX_QUAD_BOUND: u32 = 4096;
const MAX_QUAD_POINTS: usize = 1024;
pub const MAX_C: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClassicalParams {
    pub k: u32,
    pub m: u64,
    pub n: u64,
    pub q: u64,
    pub y0: f64,
    /// Truncation height: cosets with `max(|c|, |d|) <= bound`.
    pub bound: u32,
    /// Quadrature points on `[-1/2, 1/2]`.
    pub points: usize,
}

impl ClassicalParams {
    pub fn new(m: u64, n: u64, k: u32) -> Self {
        ClassicalParams { k, m, n, q: 1, y0: DEFAULT_Y0, bound: 30, points: 32 }
    }

    pub fn with_level(self, q: u64) -> Self {
        ClassicalParams { q, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 4 || self.k % 2 != 0 {
            return Err(Error::invalid(format!("weight must be even and at least 4, got {}", self.k)));
        }
        if self.m == 0 || self.n == 0 || self.q == 0 {
            return Err(Error::invalid("m, n and q must be positive"));
        }
        if !(self.y0 > 1.0) {
            return Err(Error::invalid(format!("y0 must exceed 1, got {}", self.y0)));
        }
        if self.bound == 0 {
            return Err(Error::invalid("truncation bound must be positive"));
        }
        QuadratureGrid::new(1, self.points)?;
        Ok(())
    }

    pub fn delta(&self) -> f64 {
        if self.m == self.n {
            1.0
        } else {
            0.0
        }
    }
}

/// The coset sum truncated at `bound`, restricted to `Gamma_0(q)`.
pub struct ClassicalSeries {
    k: u32,
    m: u64,
    cosets: Vec<CosetRepG1>,
}

impl ClassicalSeries {
    pub fn new(p: &ClassicalParams) -> Self {
        let cosets = enumerate_g1_cosets(p.bound).into_iter().filter(|r| gamma0_indicator(r, p.q) == 1).collect();
        ClassicalSeries { k: p.k, m: p.m, cosets }
    }

    pub fn cosets(&self) -> &[CosetRepG1] {
        &self.cosets
    }

    /// `(cz+d)^{-k} e(m gamma.z)`.
    pub fn term(&self, rep: &CosetRepG1, z: Complex64) -> Complex64 {
        let j = z * rep.c as f64 + rep.d as f64;
        let gz = (z * rep.a as f64 + rep.b as f64) / j;
        pow_neg(j, self.k) * e(gz * self.m as f64)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.cosets.iter().fold(Complex64::new(0.0, 0.0), |acc, r| acc + self.term(r, z))
    }

    /// `sum |cz+d|^{-k}` over the same cosets.
    pub fn abs_majorant(&self, z: Complex64) -> f64 {
        self.cosets.iter().map(|r| (z * r.c as f64 + r.d as f64).norm().powi(-(self.k as i32))).sum()
    }
}

pub fn eval_poincare_g1(z: Complex64, p: &ClassicalParams) -> Result<Complex64> {
    p.validate()?;
    if !(z.im > 0.0) {
        return Err(Error::invalid("z must lie in the upper half-plane"));
    }
    Ok(ClassicalSeries::new(p).eval(z))
}

/// Quadrature of `P(x + i y0) e(-n (x + i y0))` over `|x| <= 1/2`.
pub fn coeff_quadrature_g1(p: &ClassicalParams) -> Result<f64> {
    p.validate()?;
    let series = ClassicalSeries::new(p);
    let grid = QuadratureGrid::new(1, p.points)?;
    let v = cube_quadrature(
        |x: &[f64]| {
            let z = Complex64::new(x[0], p.y0);
            Ok(series.eval(z) * e(-z * p.n as f64))
        },
        &grid,
    )?;
    if v.im.abs() >= 1e-9 {
        return Err(Error::numerical(format!(
            "imaginary part {:.3e} of the quadrature coefficient exceeds 1e-9 (truncation too coarse)",
            v.im
        )));
    }
    Ok(v.re)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Doubles `bound` and `points` together until the coefficient moves by less
/// than `tol / 2`; the last change is the error estimate.
pub fn coeff_quadrature_adaptive(p: &ClassicalParams, tol: f64) -> Result<Estimate> {
    let mut cur = *p;
    let mut prev = coeff_quadrature_g1(&cur)?;
    loop {
        if cur.bound * 2 > MAX_QUAD_BOUND || cur.points * 2 > MAX_QUAD_POINTS {
            return Err(Error::envelope(format!(
                "quadrature did not reach tolerance {tol:e} within bound {MAX_QUAD_BOUND}, {MAX_QUAD_POINTS} points"
            )));
        }
        cur.bound *= 2;
        cur.points *= 2;
        let next = coeff_quadrature_g1(&cur)?;
        let change = (next - prev).abs();
        if change < tol / 2.0 {
            return Ok(Estimate { value: next, error: change });
        }
        prev = next;
    }
}

/// Partial Kloosterman-side sum with an analytic bound on the omitted tail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KloostermanSum {
    pub value: f64,
    pub tail_bound: f64,
}

/// `delta(m,n) + 2 pi i^{-k} sum_{c <= c_max, q | c} S(m,n;c)/c J_{k-1}(4 pi sqrt(mn)/c)`.
///
/// This is the symmetric quantity `sum_f omega_f lambda_f(m) lambda_f(n)`; the
/// Fourier coefficient itself carries the extra factor `(n/m)^{(k-1)/2}`
/// (see [`coeff_kloosterman`]).
pub fn petersson_kloosterman(m: u64, n: u64, k: u32, q: u64, c_max: u64) -> Result<KloostermanSum> {
    if k < 4 || k % 2 != 0 {
        return Err(Error::invalid(format!("weight must be even and at least 4, got {k}")));
    }
    if m == 0 || n == 0 || q == 0 {
        return Err(Error::invalid("m, n and q must be positive"));
    }
    if c_max < q {
        return Err(Error::invalid(format!("c_max = {c_max} must be at least q = {q}")));
    }
    if c_max > MAX_C {
        return Err(Error::envelope(format!("c_max = {c_max} exceeds {MAX_C}")));
    }
    let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let arg = 4.0 * PI * ((m * n) as f64).sqrt();
    let mut sum = 0.0;
    let mut c = q;
    while c <= c_max {
        let j = bessel_j(k - 1, arg / c as f64)?;
        if j != 0.0 {
            sum += kloosterman(m, n, c) / c as f64 * j;
        }
        c += q;
    }
    let delta = if m == n { 1.0 } else { 0.0 };
    Ok(KloostermanSum { value: delta + TAU * sign * sum, tail_bound: kloosterman_tail(m, n, k, c_max) })
}

/// `2 pi sum_{c > c_max} (2 pi sqrt(mn) / c)^{k-1} / (k-1)!`, majorized by the integral.
fn kloosterman_tail(m: u64, n: u64, k: u32, c_max: u64) -> f64 {
    let nu = (k - 1) as f64;
    let ln_fact: f64 = (2..k).map(|i| (i as f64).ln()).sum();
    let ln_a = nu * (TAU * ((m * n) as f64).sqrt()).ln() - ln_fact;
    let ln_tail = TAU.ln() + ln_a - (nu - 1.0) * (c_max as f64).ln() - (nu - 1.0).ln();
    ln_tail.exp()
}

/// Fourier coefficient `p_{m,k}(n)` on `Gamma_0(q)` from the Kloosterman expansion.
pub fn coeff_kloosterman(p: &ClassicalParams, c_max: u64) -> Result<KloostermanSum> {
    p.validate()?;
    let raw = petersson_kloosterman(p.m, p.n, p.k, p.q, c_max)?;
    let scale = (p.n as f64 / p.m as f64).powf((p.k as f64 - 1.0) / 2.0);
    Ok(KloostermanSum { value: scale * raw.value, tail_bound: scale * raw.tail_bound })
}

/// Smallest `c_max` (a multiple of `q`, doubling from 16) whose tail bound is below `tol`.
pub fn c_max_for(m: u64, n: u64, k: u32, q: u64, tol: f64) -> u64 {
    let mut c = q.max(16);
    while c < MAX_C && kloosterman_tail(m, n, k, c) >= tol {
        c = (c * 2).min(MAX_C);
    }
    c.max(q).min(MAX_C.max(q))
}

pub fn coeff_kloosterman_adaptive(p: &ClassicalParams, tol: f64) -> Result<Estimate> {
    p.validate()?;
    let scale = (p.n as f64 / p.m as f64).powf((p.k as f64 - 1.0) / 2.0);
    let c_max = c_max_for(p.m, p.n, p.k, p.q, tol / scale.max(1e-300));
    let r = coeff_kloosterman(p, c_max)?;
    Ok(Estimate { value: r.value, error: r.tail_bound })
}

/// A way of computing `p_{m,k}(n)` to a requested tolerance.
pub trait CoefficientMethod: Send + Sync {
    fn name(&self) -> &'static str;
    fn coefficient(&self, p: &ClassicalParams, tol: f64) -> Result<Estimate>;
}

pub struct QuadratureMethod;

impl CoefficientMethod for QuadratureMethod {
    fn name(&self) -> &'static str {
        "quadrature"
    }

    fn coefficient(&self, p: &ClassicalParams, tol: f64) -> Result<Estimate> {
        coeff_quadrature_adaptive(p, tol)
    }
}

pub struct KloostermanMethod;

impl CoefficientMethod for KloostermanMethod {
    fn name(&self) -> &'static str {
        "kloosterman"
    }

    fn coefficient(&self, p: &ClassicalParams, tol: f64) -> Result<Estimate> {
        coeff_kloosterman_adaptive(p, tol)
    }
}

/// Coefficient methods selectable by name.
pub struct MethodRegistry {
    methods: BTreeMap<&'static str, Box<dyn CoefficientMethod>>,
}

impl MethodRegistry {
    pub fn empty() -> Self {
        MethodRegistry { methods: BTreeMap::new() }
    }

    pub fn register(&mut self, method: Box<dyn CoefficientMethod>) {
        self.methods.insert(method.name(), method);
    }

    pub fn get(&self, name: &str) -> Result<&dyn CoefficientMethod> {
        self.methods.get(name).map(|m| m.as_ref()).ok_or_else(|| {
            Error::invalid(format!("unknown coefficient method '{name}' (known: {})", self.names().join(", ")))
        })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.methods.keys().copied().collect()
    }
}

impl Default for MethodRegistry {
    fn default() -> Self {
        let mut r = MethodRegistry::empty();
        r.register(Box::new(QuadratureMethod));
        r.register(Box::new(KloostermanMethod));
        r
    }
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let start = Instant::now();
    let v = f()?;
    Ok((v, start.elapsed().as_secs_f64()))
}

/// One row per weight, target `delta(m, n)`.
pub fn weight_limit_scan(method: &dyn CoefficientMethod, base: &ClassicalParams, ks: &[u32], tol: f64) -> Result<ScanReport> {
    let rows: Vec<(Estimate, f64)> = ks
        .par_iter()
        .map(|&k| timed(|| method.coefficient(&ClassicalParams { k, ..*base }, tol)))
        .collect::<Result<_>>()?;
    let mut report = ScanReport::new(["m", "n", "q", "k"]);
    for (&k, (est, secs)) in ks.iter().zip(rows) {
        report.push(vec![base.m as f64, base.n as f64, base.q as f64, k as f64], est.value, base.delta(), est.error, secs);
    }
    Ok(report)
}

/// One row per level, target `delta(m, n)`.
pub fn level_limit_scan(method: &dyn CoefficientMethod, base: &ClassicalParams, qs: &[u64], tol: f64) -> Result<ScanReport> {
    let rows: Vec<(Estimate, f64)> = qs
        .par_iter()
        .map(|&q| timed(|| method.coefficient(&ClassicalParams { q, ..*base }, tol)))
        .collect::<Result<_>>()?;
    let mut report = ScanReport::new(["m", "n", "k", "q"]);
    for (&q, (est, secs)) in qs.iter().zip(rows) {
        report.push(vec![base.m as f64, base.n as f64, base.k as f64, q as f64], est.value, base.delta(), est.error, secs);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn large_weight_series_approaches_exponential() {
        let z = Complex64::new(0.3, 1.1);
        // At k = 40 the deviation is dominated by the (c, d) = (1, 0) term,
        // |z|^{-40} exp(-2 pi Im(-1/z)).
        let v = eval_poincare_g1(z, &ClassicalParams::new(1, 1, 40)).unwrap();
        let dominant = z.norm().powi(-40) * (-TAU * (-z.inv()).im).exp();
        let dev = (v - e(z)).norm();
        assert!((dev - dominant).abs() < 0.05 * dominant, "{dev} vs {dominant}");
        let mut last = f64::INFINITY;
        for k in [12, 24, 40, 60, 80, 100] {
            let dev = (eval_poincare_g1(z, &ClassicalParams::new(1, 1, k)).unwrap() - e(z)).norm();
            assert!(dev < last);
            last = dev;
        }
        assert!(last < 1e-6);
    }

    #[test]
    fn huge_level_keeps_only_identity() {
        let p = ClassicalParams::new(1, 1, 12).with_level(1_000_000);
        let z = Complex64::new(0.3, 1.1);
        assert_eq!(ClassicalSeries::new(&p).cosets().len(), 1);
        assert!((eval_poincare_g1(z, &p).unwrap() - e(z)).norm() < 1e-15);
    }

    #[test]
    fn termwise_and_total_bounds() {
        let p = ClassicalParams::new(2, 1, 12);
        let series = ClassicalSeries::new(&p);
        for x in [-0.5, -0.2, 0.0, 0.35, 0.5] {
            let z = Complex64::new(x, p.y0);
            for r in series.cosets() {
                let j = z * r.c as f64 + r.d as f64;
                assert!(j.norm_sqr() >= (r.c as f64 * p.y0).powi(2) * (1.0 - 1e-15));
                let t = series.term(r, z).norm();
                assert!(t <= j.norm().powi(-12) * (1.0 + 1e-12));
                if r.c != 0 {
                    let t2 = ClassicalSeries { k: 14, ..ClassicalSeries::new(&p) }.term(r, z).norm();
                    assert!(t2 <= t);
                }
            }
            assert!(series.eval(z).norm() <= series.abs_majorant(z) + 1e-12);
        }
    }

    #[test]
    fn completion_change_invariance() {
        let p = ClassicalParams::new(3, 1, 12);
        let series = ClassicalSeries::new(&p);
        let z = Complex64::new(0.17, 1.1);
        for r in series.cosets() {
            let shifted = CosetRepG1 { a: r.a + 5 * r.c, b: r.b + 5 * r.d, ..*r };
            assert_eq!(shifted.a * shifted.d - shifted.b * shifted.c, 1);
            assert!((series.term(r, z) - series.term(&shifted, z)).norm() < 1e-12);
        }
    }

    #[test]
    fn quadrature_matches_kloosterman_at_weight_12() {
        let p = ClassicalParams::new(1, 1, 12);
        let quad = coeff_quadrature_g1(&p).unwrap();
        let kl = coeff_kloosterman(&p, 50).unwrap();
        assert!((quad - kl.value).abs() < 1e-6 + kl.tail_bound, "{quad} vs {}", kl.value);
    }

    #[test]
    fn kloosterman_examples() {
        let p = ClassicalParams::new(1, 2, 12);
        let r = coeff_kloosterman(&p, 100).unwrap();
        assert!(r.tail_bound < 1e-8);
        let p = ClassicalParams::new(1, 1, 12).with_level(25);
        let r = coeff_kloosterman(&p, 100).unwrap();
        assert!((r.value - 1.0).abs() < 0.01);
    }

    #[test]
    fn weight_sixty_orthogonality() {
        let p = ClassicalParams::new(1, 2, 60);
        assert!(coeff_quadrature_g1(&p).unwrap().abs() < 0.02);
        let p = ClassicalParams::new(1, 1, 60);
        assert!((coeff_quadrature_g1(&p).unwrap() - 1.0).abs() < 0.02);
    }

    #[test]
    fn level_one_row_matches_weight_scan() {
        let reg = MethodRegistry::default();
        let m = reg.get("kloosterman").unwrap();
        let base = ClassicalParams::new(1, 1, 12);
        let w = weight_limit_scan(m, &base, &[12], 1e-10).unwrap();
        let l = level_limit_scan(m, &base, &[1], 1e-10).unwrap();
        assert_eq!(w.rows[0].value, l.rows[0].value);
        assert!(reg.get("simpson").is_err());
        assert_eq!(reg.names(), vec!["kloosterman", "quadrature"]);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(ClassicalParams::new(1, 1, 5).validate().is_err());
        assert!(ClassicalParams { y0: 1.0, ..ClassicalParams::new(1, 1, 12) }.validate().is_err());
        assert!(petersson_kloosterman(1, 1, 12, 30, 20).is_err());
    }
}
