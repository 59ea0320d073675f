//! Genus-2 Siegel Poincaré series, their majorant, and Fourier coefficients
//! extracted by cube quadrature over `U_2(y0) = {x + i y0 I : |x_ij| <= 1/2}`.
//!
//! Coefficients pair with `x` through `Tr(t x) = t11 x11 + 2 t12 x12 + t22 x22`
//! and the cube is parametrized by `(x11, x12, x22)` with unit volume, so the
//! characters `e(Tr(t x))` are orthonormal and the midpoint rule is exact on them.

use std::collections::BTreeSet;
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::modgroup::{enumerate_g2_cosets, CosetRepG2};
use crate::numerics::{cube_quadrature, cube_quadrature_vec, e, pow_neg, ComplexMatrix, IntMatrix2, QuadratureGrid};
use crate::quadform::{act, orbit_count, HalfIntegralForm, UnimodularMatrix};
use crate::report::ScanReport;

pub const DEFAULT_Y0: f64 = 1.05;
pub const MAX_WEIGHT: u32 = 60;
pub const MAX_BOUND: u32 = 3;
pub const MAX_POINTS: usize = 32;

/// `z = x + i y` with `x`, `y` real symmetric and `y` positive definite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SiegelPoint {
    pub x: [[f64; 2]; 2],
    pub y: [[f64; 2]; 2],
}

impl SiegelPoint {
    pub fn new(x: [[f64; 2]; 2], y: [[f64; 2]; 2]) -> Result<Self> {
        if x[0][1] != x[1][0] || y[0][1] != y[1][0] {
            return Err(Error::invalid("Siegel point must have symmetric real and imaginary parts"));
        }
        if !(y[0][0] > 0.0 && y[0][0] * y[1][1] - y[0][1] * y[1][0] > 0.0) {
            return Err(Error::invalid("imaginary part of a Siegel point must be positive definite"));
        }
        Ok(SiegelPoint { x, y })
    }

    /// `x + i y0 I` with `x = (x11 x12; x12 x22)`.
    pub fn on_box(x11: f64, x12: f64, x22: f64, y0: f64) -> Self {
        SiegelPoint { x: [[x11, x12], [x12, x22]], y: [[y0, 0.0], [0.0, y0]] }
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        ComplexMatrix::from_real_imag(self.x, self.y)
    }
}

/// `Tr(t w)` for a form `t` and a (symmetric) complex matrix `w`.
#[inline]
pub fn trace_pairing(t: &HalfIntegralForm, w: &ComplexMatrix) -> Complex64 {
    w.get(0, 0) * t.s11 as f64 + (w.get(0, 1) + w.get(1, 0)) * (t.s12() as f64) + w.get(1, 1) * t.s22 as f64
}

fn powu(mut base: Complex64, mut exp: u32) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= base;
        }
        base *= base;
        exp >>= 1;
    }
    acc
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SiegelParams {
    pub s: HalfIntegralForm,
    pub t: HalfIntegralForm,
    pub k: u32,
    pub y0: f64,
    pub bound: u32,
    pub points: usize,
}

impl SiegelParams {
    pub fn new(s: HalfIntegralForm, t: HalfIntegralForm, k: u32) -> Self {
        SiegelParams { s, t, k, y0: DEFAULT_Y0, bound: 2, points: 16 }
    }

    pub fn validate(&self) -> Result<()> {
        validate_weight(self.k)?;
        if !(self.y0 > 1.0) {
            return Err(Error::invalid(format!("y0 must exceed 1, got {}", self.y0)));
        }
        if self.bound == 0 || self.bound > MAX_BOUND {
            return Err(Error::envelope(format!("truncation bound {} outside 1..={MAX_BOUND}", self.bound)));
        }
        if self.points > MAX_POINTS {
            return Err(Error::envelope(format!("{} points per axis exceeds {MAX_POINTS}", self.points)));
        }
        QuadratureGrid::new(3, self.points)?;
        Ok(())
    }
}

fn validate_weight(k: u32) -> Result<()> {
    if k % 2 != 0 || k < 6 {
        return Err(Error::invalid(format!("Siegel weight must be even and at least 6, got {k}")));
    }
    if k > MAX_WEIGHT {
        return Err(Error::envelope(format!("Siegel weight {k} exceeds {MAX_WEIGHT}")));
    }
    Ok(())
}

type Real2 = [[f64; 2]; 2];

struct Term {
    a: Real2,
    b: Real2,
    c: Real2,
    d: Real2,
}

#[inline]
fn real(m: &IntMatrix2) -> Real2 {
    [[m.get(0, 0) as f64, m.get(0, 1) as f64], [m.get(1, 0) as f64, m.get(1, 1) as f64]]
}

/// `r z + q` for real `r`, `q`.
#[inline]
fn affine(r: &Real2, z: &[[Complex64; 2]; 2], q: &Real2) -> [[Complex64; 2]; 2] {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = z[0][j] * r[i][0] + z[1][j] * r[i][1] + q[i][j];
        }
    }
    out
}

/// Per-coset quantities at one point: `det(cz+d)` and `e(Tr(s . gamma z))`.
#[derive(Clone, Copy, Debug)]
pub struct TermParts {
    pub det: Complex64,
    pub character: Complex64,
}

/// Truncated series `sum det(cz+d)^{-k} e(Tr(s gamma.z))` over the cosets of
/// entry height at most `bound`.
pub struct SiegelSeries {
    s: HalfIntegralForm,
    cosets: Vec<CosetRepG2>,
    terms: Vec<Term>,
}

impl SiegelSeries {
    pub fn new(s: HalfIntegralForm, bound: u32) -> Result<Self> {
        Ok(Self::from_cosets(s, enumerate_g2_cosets(bound)?))
    }

    pub fn from_cosets(s: HalfIntegralForm, cosets: Vec<CosetRepG2>) -> Self {
        let terms = cosets
            .iter()
            .map(|r| Term { a: real(&r.a), b: real(&r.b), c: real(&r.c), d: real(&r.d) })
            .collect();
        SiegelSeries { s, cosets, terms }
    }

    pub fn cosets(&self) -> &[CosetRepG2] {
        &self.cosets
    }

    pub fn len(&self) -> usize {
        self.cosets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cosets.is_empty()
    }

    fn parts_of(&self, term: &Term, z: &ComplexMatrix) -> Result<TermParts> {
        let j = affine(&term.c, &z.0, &term.d);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.norm_sqr() == 0.0 || !det.is_finite() {
            return Err(Error::numerical("c z + d is singular"));
        }
        let n = affine(&term.a, &z.0, &term.b);
        // w = n adj(j) / det
        let w00 = n[0][0] * j[1][1] - n[0][1] * j[1][0];
        let w01 = n[0][1] * j[0][0] - n[0][0] * j[0][1];
        let w10 = n[1][0] * j[1][1] - n[1][1] * j[1][0];
        let w11 = n[1][1] * j[0][0] - n[1][0] * j[0][1];
        let s = &self.s;
        let tr = (w00 * s.s11 as f64 + (w01 + w10) * s.s12() + w11 * s.s22 as f64) / det;
        Ok(TermParts { det, character: e(tr) })
    }

    /// Term data for every coset, in enumeration order.
    pub fn term_parts(&self, z: &SiegelPoint) -> Result<Vec<TermParts>> {
        let zc = z.to_complex();
        self.terms.iter().map(|t| self.parts_of(t, &zc)).collect()
    }

    pub fn eval(&self, z: &SiegelPoint, k: u32) -> Result<Complex64> {
        Ok(self.eval_multi(z, &[k])?[0])
    }

    /// Series values for several weights, sharing the per-coset work.
    /// Successive powers `det^{-k}` are reached by multiplying with
    /// `det^{-(k_i - k_{i-1})}` rather than re-exponentiating.
    pub fn eval_multi(&self, z: &SiegelPoint, ks: &[u32]) -> Result<Vec<Complex64>> {
        let zc = z.to_complex();
        let mut acc = vec![Complex64::new(0.0, 0.0); ks.len()];
        for term in &self.terms {
            let parts = self.parts_of(term, &zc)?;
            let inv = parts.det.inv();
            let mut power = pow_neg(parts.det, ks[0]);
            acc[0] += power * parts.character;
            let mut cached: Option<(u32, Complex64)> = None;
            for i in 1..ks.len() {
                if ks[i] > ks[i - 1] {
                    let diff = ks[i] - ks[i - 1];
                    let step = match cached {
                        Some((d, v)) if d == diff => v,
                        _ => {
                            let v = powu(inv, diff);
                            cached = Some((diff, v));
                            v
                        }
                    };
                    power *= step;
                } else {
                    power = pow_neg(parts.det, ks[i]);
                }
                acc[i] += power * parts.character;
            }
        }
        Ok(acc)
    }

    /// Majorant `sum |det(cz+d)|^{-k} exp(-2 pi Tr(s Im gamma.z))`.
    pub fn majorant(&self, z: &SiegelPoint, k: u32) -> Result<f64> {
        let zc = z.to_complex();
        let mut acc = 0.0;
        for term in &self.terms {
            let parts = self.parts_of(term, &zc)?;
            acc += parts.det.norm().powi(-(k as i32)) * parts.character.norm();
        }
        Ok(acc)
    }
}

pub fn eval_siegel_poincare(z: &SiegelPoint, p: &SiegelParams) -> Result<Complex64> {
    validate_weight(p.k)?;
    SiegelSeries::new(p.s, p.bound)?.eval(z, p.k)
}

pub fn eval_majorant(z: &SiegelPoint, p: &SiegelParams) -> Result<f64> {
    validate_weight(p.k)?;
    SiegelSeries::new(p.s, p.bound)?.majorant(z, p.k)
}

/// Coefficients `p_{s,k}(t)` at fixed truncation and grid, indexed
/// `[t][k]`. The series is evaluated once per node and shared by all `ts`.
pub fn siegel_coeffs_raw(
    series: &SiegelSeries,
    ts: &[HalfIntegralForm],
    ks: &[u32],
    y0: f64,
    points: usize,
) -> Result<Vec<Vec<f64>>> {
    let grid = QuadratureGrid::new(3, points)?;
    let width = ts.len() * ks.len();
    let integrand = |x: &[f64]| -> Result<Vec<Complex64>> {
        let z = SiegelPoint::on_box(x[0], x[1], x[2], y0);
        let zc = z.to_complex();
        let vals = series.eval_multi(&z, ks)?;
        let mut out = Vec::with_capacity(width);
        for t in ts {
            let dual = e(-trace_pairing(t, &zc));
            out.extend(vals.iter().map(|v| v * dual));
        }
        Ok(out)
    };
    let vals = cube_quadrature_vec(integrand, &grid, width)?;
    vals.chunks(ks.len().max(1))
        .map(|row| {
            row.iter()
                .zip(ks)
                .map(|(v, k)| {
                    if v.im.abs() >= 1e-6 {
                        return Err(Error::numerical(format!(
                            "imaginary part {:.3e} of the weight-{k} coefficient exceeds 1e-6",
                            v.im
                        )));
                    }
                    Ok(v.re)
                })
                .collect()
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CoeffEstimate {
    pub value: f64,
    pub error_estimate: f64,
}

/// Coefficients at `(bound, points)`, indexed `[t][k]`, with error estimates
/// `|v(bound+1, points) - v| + |v(bound, 2 points) - v|`.
pub fn siegel_coeffs(
    s: &HalfIntegralForm,
    ts: &[HalfIntegralForm],
    ks: &[u32],
    y0: f64,
    bound: u32,
    points: usize,
) -> Result<Vec<Vec<CoeffEstimate>>> {
    for t in ts {
        for &k in ks {
            SiegelParams { s: *s, t: *t, k, y0, bound, points }.validate()?;
        }
    }
    let base_series = SiegelSeries::new(*s, bound)?;
    let base = siegel_coeffs_raw(&base_series, ts, ks, y0, points)?;
    let finer = siegel_coeffs_raw(&base_series, ts, ks, y0, points * 2)?;
    drop(base_series);
    let taller = siegel_coeffs_raw(&SiegelSeries::new(*s, bound + 1)?, ts, ks, y0, points)?;
    Ok((0..ts.len())
        .map(|ti| {
            (0..ks.len())
                .map(|i| CoeffEstimate {
                    value: base[ti][i],
                    error_estimate: (taller[ti][i] - base[ti][i]).abs() + (finer[ti][i] - base[ti][i]).abs(),
                })
                .collect()
        })
        .collect())
}

pub fn siegel_coeff(p: &SiegelParams) -> Result<CoeffEstimate> {
    Ok(siegel_coeffs(&p.s, &[p.t], &[p.k], p.y0, p.bound, p.points)?[0][0])
}

/// Classes of `GL(2,Z)/{+-1}` with entries bounded by `bound`, canonical signs.
pub fn gl2_classes(bound: u32) -> Vec<UnimodularMatrix> {
    let b = bound as i64;
    let mut out = BTreeSet::new();
    for p in -b..=b {
        for q in -b..=b {
            for r in -b..=b {
                for s in -b..=b {
                    if let Ok(u) = UnimodularMatrix::new(IntMatrix2::new(p, q, r, s)) {
                        out.insert(u.sign_canonical());
                    }
                }
            }
        }
    }
    out.into_iter().collect()
}

/// Partial sum of the weight-limit function `sum_a e(Tr((a . s) z))`.
pub fn limit_function_partial(z: &SiegelPoint, s: &HalfIntegralForm, bound: u32) -> Complex64 {
    let zc = z.to_complex();
    gl2_classes(bound)
        .iter()
        .map(|a| e(trace_pairing(&act(a, s), &zc)))
        .fold(Complex64::new(0.0, 0.0), |acc, v| acc + v)
}

/// Coefficient of `e(Tr(t z))` in the limit partial sum, by cube quadrature.
pub fn limit_coefficient(s: &HalfIntegralForm, t: &HalfIntegralForm, bound: u32, y0: f64, points: usize) -> Result<f64> {
    let grid = QuadratureGrid::new(3, points)?;
    let v = cube_quadrature(
        |x: &[f64]| {
            let z = SiegelPoint::on_box(x[0], x[1], x[2], y0);
            Ok(limit_function_partial(&z, s, bound) * e(-trace_pairing(t, &z.to_complex())))
        },
        &grid,
    )?;
    Ok(v.re)
}

/// One row per weight, target `orbit_count(s, t)`.
pub fn siegel_weight_scan(
    s: &HalfIntegralForm,
    t: &HalfIntegralForm,
    ks: &[u32],
    y0: f64,
    bound: u32,
    points: usize,
) -> Result<ScanReport> {
    let start = Instant::now();
    let estimates = siegel_coeffs(s, &[*t], ks, y0, bound, points)?.remove(0);
    let per_row = start.elapsed().as_secs_f64() / ks.len().max(1) as f64;
    let target = orbit_count(s, t) as f64;
    let mut report = ScanReport::new(["k"]);
    for (k, est) in ks.iter().zip(estimates) {
        report.push(vec![*k as f64], est.value, target, est.error_estimate, per_row);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modgroup::SymplecticMatrix;

    fn small_series(s: HalfIntegralForm) -> SiegelSeries {
        SiegelSeries::new(s, 1).unwrap()
    }

    #[test]
    fn identity_term_at_scalar_point() {
        let s = HalfIntegralForm::new(2, 1, 3).unwrap();
        let z = SiegelPoint::on_box(0.0, 0.0, 0.0, 1.3);
        let series = small_series(s);
        let parts = series.term_parts(&z).unwrap();
        let expected = (-std::f64::consts::TAU * 1.3 * s.trace() as f64).exp();
        assert!((parts[0].character.re - expected).abs() < 1e-15);
        assert!((parts[0].det - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn every_character_bounded_by_one() {
        let s = HalfIntegralForm::hexagonal();
        let series = SiegelSeries::new(s, 2).unwrap();
        for (x11, x12, x22) in [(0.1, -0.3, 0.4), (-0.5, 0.5, 0.0), (0.2, 0.2, -0.2)] {
            let z = SiegelPoint::on_box(x11, x12, x22, 1.05);
            for p in series.term_parts(&z).unwrap() {
                assert!(p.character.norm() <= 1.0 + 1e-15);
            }
        }
    }

    #[test]
    fn majorant_dominates_series() {
        let s = HalfIntegralForm::identity();
        let series = SiegelSeries::new(s, 1).unwrap();
        let grid = QuadratureGrid::new(3, 4).unwrap();
        for idx in 0..grid.len() {
            let [a, b, c] = grid.coords(idx);
            let z = SiegelPoint::on_box(a, b, c, 1.05);
            for k in [6u32, 10, 20] {
                assert!(series.eval(&z, k).unwrap().norm() <= series.majorant(&z, k).unwrap() + 1e-15);
            }
            // non-increasing in k on the certified box
            assert!(series.majorant(&z, 12).unwrap() <= series.majorant(&z, 10).unwrap() + 1e-15);
        }
    }

    #[test]
    fn completion_change_leaves_terms_unchanged() {
        let s = HalfIntegralForm::hexagonal();
        let reps = enumerate_g2_cosets(1).unwrap();
        let u = IntMatrix2::new(1, -2, -2, 3);
        let shifted: Vec<CosetRepG2> = reps
            .iter()
            .map(|r| CosetRepG2 { a: r.a + u * r.c, b: r.b + u * r.d, ..*r })
            .collect();
        for r in &shifted {
            assert!(r.matrix().is_symplectic());
        }
        let z = SiegelPoint::on_box(0.13, -0.21, 0.37, 1.1);
        let p1 = SiegelSeries::from_cosets(s, reps.clone()).term_parts(&z).unwrap();
        let p2 = SiegelSeries::from_cosets(s, shifted).term_parts(&z).unwrap();
        for (x, y) in p1.iter().zip(&p2) {
            assert!((x.character - y.character).norm() < 1e-12);
        }
    }

    #[test]
    fn sign_flip_leaves_terms_unchanged() {
        let s = HalfIntegralForm::identity();
        let reps = enumerate_g2_cosets(1).unwrap();
        let flipped: Vec<CosetRepG2> = reps
            .iter()
            .map(|r| {
                let m: SymplecticMatrix = r.matrix().neg();
                CosetRepG2 { a: m.a, b: m.b, c: m.c, d: m.d }
            })
            .collect();
        let z = SiegelPoint::on_box(-0.3, 0.1, 0.2, 1.2);
        let a = SiegelSeries::from_cosets(s, reps).eval(&z, 8).unwrap();
        let b = SiegelSeries::from_cosets(s, flipped).eval(&z, 8).unwrap();
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn limit_function_bound_one() {
        // Oracle: sum over every unimodular a with entries <= 1, halved for +-a.
        let y = 0.9;
        let z = SiegelPoint::on_box(0.0, 0.0, 0.0, y);
        let mut expected = 0.0;
        let r = -1..=1i64;
        for p in r.clone() {
            for q in r.clone() {
                for s in r.clone() {
                    for t in r.clone() {
                        let m = IntMatrix2::new(p, q, s, t);
                        if m.det().abs() == 1 {
                            let tr = (p * p + q * q + s * s + t * t) as f64;
                            expected += 0.5 * (-std::f64::consts::TAU * y * tr).exp();
                        }
                    }
                }
            }
        }
        let v = limit_function_partial(&z, &HalfIntegralForm::identity(), 1);
        assert!((v.re - expected).abs() < 1e-15 && v.im.abs() < 1e-15);
        let far = SiegelPoint::on_box(0.0, 0.0, 0.0, 20.0);
        assert!(limit_function_partial(&far, &HalfIntegralForm::identity(), 2).norm() < 1e-100);
    }

    #[test]
    fn limit_coefficient_is_orbit_count() {
        let i = HalfIntegralForm::identity();
        let hex = HalfIntegralForm::hexagonal();
        let d12 = HalfIntegralForm::diag(1, 2).unwrap();
        for (s, t, target) in [(i, i, 4.0), (i, d12, 0.0), (hex, hex, 6.0), (d12, d12, 2.0)] {
            let v = limit_coefficient(&s, &t, 2, 1.05, 8).unwrap();
            assert!((v - target).abs() < 1e-9, "({s}) -> ({t}): {v}");
        }
    }

    #[test]
    fn params_validation() {
        let i = HalfIntegralForm::identity();
        assert!(SiegelParams::new(i, i, 4).validate().is_err());
        assert!(SiegelParams::new(i, i, 7).validate().is_err());
        assert!(SiegelParams::new(i, i, 62).validate().is_err());
        assert!(SiegelParams { bound: 4, ..SiegelParams::new(i, i, 10) }.validate().is_err());
        assert!(SiegelParams::new(i, i, 10).validate().is_ok());
    }
}
