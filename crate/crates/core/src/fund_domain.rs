//! The genus-2 Siegel fundamental domain: Minkowski reduction of `Im z`, the
//! Gottschling set `C_2`, membership testing, and numerical certification of
//! the height `y0` at which `|det(cz+d)| > 1` on the whole box `U_2(y0)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, IntMatrix2, QuadratureGrid};
use crate::quadform::UnimodularMatrix;
use crate::report::ScanReport;
use crate::siegel::SiegelPoint;

pub const DEFAULT_MARGIN_FLOOR: f64 = 1e-3;
const EQ_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GottschlingPair {
    pub c: IntMatrix2,
    pub d: IntMatrix2,
    pub rank_c: usize,
}

impl GottschlingPair {
    fn new(c: IntMatrix2, d: IntMatrix2) -> Self {
        GottschlingPair { c, d, rank_c: c.rank() }
    }

    pub fn det_at(&self, z: &ComplexMatrix) -> f64 {
        abs_det(&self.c, &self.d, z)
    }
}

#[inline]
fn abs_det(c: &IntMatrix2, d: &IntMatrix2, z: &ComplexMatrix) -> f64 {
    (ComplexMatrix::from_int(c) * *z + ComplexMatrix::from_int(d)).det().norm()
}

/// The 19 bottom rows cutting out the genus-2 fundamental domain: four with
/// `rank c = 1` (`|z11|`, `|z22|`, `|z11 + z22 - 2 z12 +- 1|`), and fifteen
/// with `c = I`.
pub fn gottschling_set() -> Vec<GottschlingPair> {
    let m = IntMatrix2::new;
    let mut out = vec![
        GottschlingPair::new(m(1, 0, 0, 0), m(0, 0, 0, 1)),
        GottschlingPair::new(m(0, 0, 0, 1), m(1, 0, 0, 0)),
        GottschlingPair::new(m(1, -1, 0, 0), m(1, 0, 1, 1)),
        GottschlingPair::new(m(1, -1, 0, 0), m(-1, 0, 1, 1)),
    ];
    out.push(GottschlingPair::new(IntMatrix2::IDENTITY, IntMatrix2::ZERO));
    for s in [1, -1] {
        for d in [
            m(s, 0, 0, 0),
            m(0, 0, 0, s),
            m(s, 0, 0, s),
            m(s, 0, 0, -s),
            m(0, s, s, 0),
            m(s, s, s, 0),
            m(0, s, s, s),
        ] {
            out.push(GottschlingPair::new(IntMatrix2::IDENTITY, d));
        }
    }
    out
}

/// Lagrange-Gauss reduction of a real positive-definite 2x2 matrix:
/// returns `(u^T y u, u)` with `0 <= 2 r12 <= r11 <= r22`.
pub fn minkowski_reduce(y: [[f64; 2]; 2]) -> Result<([[f64; 2]; 2], UnimodularMatrix)> {
    if y[0][1] != y[1][0] || !(y[0][0] > 0.0) || !(y[0][0] * y[1][1] - y[0][1] * y[0][1] > 0.0) {
        return Err(Error::invalid("minkowski_reduce needs a symmetric positive-definite matrix"));
    }
    let apply = |u: &IntMatrix2| -> [[f64; 2]; 2] {
        let (p, q, r, s) = (u.get(0, 0) as f64, u.get(0, 1) as f64, u.get(1, 0) as f64, u.get(1, 1) as f64);
        let q11 = y[0][0] * p * p + 2.0 * y[0][1] * p * r + y[1][1] * r * r;
        let q22 = y[0][0] * q * q + 2.0 * y[0][1] * q * s + y[1][1] * s * s;
        let q12 = y[0][0] * p * q + y[0][1] * (p * s + q * r) + y[1][1] * r * s;
        [[q11, q12], [q12, q22]]
    };
    let mut u = IntMatrix2::IDENTITY;
    for _ in 0..200 {
        let cur = apply(&u);
        let r = (cur[0][1] / cur[0][0]).round() as i64;
        if r != 0 {
            u = u * IntMatrix2::new(1, -r, 0, 1);
            continue;
        }
        if cur[0][0] > cur[1][1] {
            u = u * IntMatrix2::new(0, 1, 1, 0);
            continue;
        }
        break;
    }
    if apply(&u)[0][1] < 0.0 {
        u = u * IntMatrix2::new(1, 0, 0, -1);
    }
    Ok((apply(&u), UnimodularMatrix::new(u)?))
}

/// `0 <= 2|y12| <= y11 <= y22`, up to a rounding tolerance.
fn is_minkowski_reduced(y: &[[f64; 2]; 2]) -> bool {
    2.0 * y[0][1].abs() <= y[0][0] + EQ_TOL && y[0][0] <= y[1][1] + EQ_TOL
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Inside,
    Boundary,
    Outside,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Membership {
    pub status: Status,
    /// First violated condition when `status == Outside`; otherwise the
    /// first condition attained with equality, if any.
    pub condition: Option<String>,
}

/// Minkowski reduction of `Im z`, `|Re z_ij| <= 1/2`, and `|det(cz+d)| >= 1`
/// over the Gottschling set. Equality in the last two is reported as
/// `Boundary`; the Minkowski conditions only pass or fail.
pub fn in_fundamental_domain(z: &SiegelPoint) -> Membership {
    let mut boundary: Option<String> = None;
    if !is_minkowski_reduced(&z.y) {
        return Membership { status: Status::Outside, condition: Some("Im z is not Minkowski-reduced".into()) };
    }
    for row in &z.x {
        for v in row {
            if v.abs() > 0.5 + EQ_TOL {
                return Membership { status: Status::Outside, condition: Some("|Re z_ij| > 1/2".into()) };
            }
            if (v.abs() - 0.5).abs() <= EQ_TOL && boundary.is_none() {
                boundary = Some("|Re z_ij| = 1/2".into());
            }
        }
    }
    let zc = z.to_complex();
    for (i, pair) in gottschling_set().iter().enumerate() {
        let v = pair.det_at(&zc);
        let label = format!("|det(cz+d)| >= 1 for Gottschling pair {i} (c={}, d={})", pair.c, pair.d);
        if v < 1.0 - EQ_TOL {
            return Membership { status: Status::Outside, condition: Some(label) };
        }
        if v <= 1.0 + EQ_TOL && boundary.is_none() {
            boundary = Some(label);
        }
    }
    match boundary {
        Some(c) => Membership { status: Status::Boundary, condition: Some(c) },
        None => Membership { status: Status::Inside, condition: None },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoxMinimum {
    /// Minimum after local refinement (an upper bound on the true minimum).
    pub min: f64,
    pub argmin: [f64; 3],
    /// Grid minimum minus a Lipschitz allowance for the unsampled gaps.
    pub lower_bound: f64,
}

/// Minimizes `|det(c(x + i y0 I) + d)|` over `x` in `U_2` on the grid nodes,
/// then refines from the best node by a shrinking-step coordinate search.
pub fn min_det_over_box(c: &IntMatrix2, d: &IntMatrix2, y0: f64, grid: &QuadratureGrid) -> Result<BoxMinimum> {
    if grid.dim() != 3 {
        return Err(Error::invalid("min_det_over_box needs a 3-dimensional grid"));
    }
    if !(y0 > 0.0) {
        return Err(Error::invalid("y0 must be positive"));
    }
    let f = |x: [f64; 3]| abs_det(c, d, &SiegelPoint::on_box(x[0], x[1], x[2], y0).to_complex());
    let mut best = (f64::INFINITY, [0.0; 3]);
    for idx in 0..grid.len() {
        let x = grid.coords(idx);
        let v = f(x);
        if v < best.0 {
            best = (v, x);
        }
    }
    let grid_min = best.0;
    let (mut val, mut x) = best;
    let mut h = 1.0 / grid.points() as f64;
    while h > 1e-13 {
        let mut moved = false;
        for axis in 0..3 {
            for dir in [-1.0, 1.0] {
                let mut cand = x;
                cand[axis] = (cand[axis] + dir * h).clamp(-0.5, 0.5);
                let v = f(cand);
                if v < val {
                    val = v;
                    x = cand;
                    moved = true;
                }
            }
        }
        if !moved {
            h /= 2.0;
        }
    }
    let lip = lipschitz_bound(c, d, y0);
    let gap = 3f64.sqrt() / 2.0 / grid.points() as f64;
    Ok(BoxMinimum { min: val, argmin: x, lower_bound: grid_min - lip * gap })
}

/// Bound on the gradient of `|det(c z + d)|` in `(x11, x12, x22)` over `U_2(y0)`.
fn lipschitz_bound(c: &IntMatrix2, d: &IntMatrix2, y0: f64) -> f64 {
    let fro = |m: &IntMatrix2| (m.entries().iter().map(|v| (v * v) as f64).sum::<f64>()).sqrt();
    let m_max = fro(c) * (1.0 + y0 * 2f64.sqrt()) + fro(d);
    let dirs = [IntMatrix2::new(1, 0, 0, 0), IntMatrix2::new(0, 1, 1, 0), IntMatrix2::new(0, 0, 0, 1)];
    let g: f64 = dirs.iter().map(|e| fro(&(*c * *e)).powi(2)).sum::<f64>().sqrt();
    m_max * g
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairMinimum {
    pub index: usize,
    pub rank_c: usize,
    pub min: f64,
    pub lower_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DomainCertificate {
    pub y0: f64,
    pub grid_points: usize,
    pub margin_floor: f64,
    pub minima: Vec<PairMinimum>,
    /// `min over pairs - 1`.
    pub margin: f64,
    pub passed: bool,
}

/// Checks `|det(cz+d)| > 1 + margin_floor` on `U_2(y0)` for every pair of `C_2`.
pub fn certify_y0(y0: f64, grid: &QuadratureGrid) -> Result<DomainCertificate> {
    certify_y0_with_floor(y0, grid, DEFAULT_MARGIN_FLOOR)
}

pub fn certify_y0_with_floor(y0: f64, grid: &QuadratureGrid, margin_floor: f64) -> Result<DomainCertificate> {
    let minima: Vec<PairMinimum> = gottschling_set()
        .iter()
        .enumerate()
        .map(|(index, p)| {
            let m = min_det_over_box(&p.c, &p.d, y0, grid)?;
            Ok(PairMinimum { index, rank_c: p.rank_c, min: m.min, lower_bound: m.lower_bound })
        })
        .collect::<Result<_>>()?;
    let worst = minima.iter().map(|m| m.min).fold(f64::INFINITY, f64::min);
    Ok(DomainCertificate {
        y0,
        grid_points: grid.points(),
        margin_floor,
        margin: worst - 1.0,
        passed: worst > 1.0 + margin_floor,
        minima,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Y0Search {
    /// Midpoint of the final bracket.
    pub y0: f64,
    pub lo: f64,
    pub hi: f64,
    /// Certificate at the upper end of the bracket.
    pub certificate: DomainCertificate,
}

/// Bisection on `(1, 2]` for the smallest certified `y0`.
pub fn search_y0(tol: f64, grid: &QuadratureGrid) -> Result<Y0Search> {
    if !(tol >= 1e-3) {
        return Err(Error::invalid(format!("y0 search tolerance must be at least 1e-3, got {tol}")));
    }
    let (mut lo, mut hi) = (1.0f64, 2.0f64);
    let mut cert = certify_y0(hi, grid)?;
    if !cert.passed {
        return Err(Error::numerical("y0 = 2 does not certify; bisection bracket is invalid"));
    }
    while hi - lo >= tol {
        let mid = 0.5 * (lo + hi);
        let c = certify_y0(mid, grid)?;
        if c.passed {
            hi = mid;
            cert = c;
        } else {
            lo = mid;
        }
    }
    Ok(Y0Search { y0: 0.5 * (lo + hi), lo, hi, certificate: cert })
}

/// Coefficients `[p0, p1, p2]` of `|det(c(x + i a I) + d)|^2` as a polynomial
/// in `a^2`, fitted exactly through `a in {0, 1, 2}`.
pub fn det_alpha_polynomial(c: &IntMatrix2, d: &IntMatrix2, x: [[f64; 2]; 2]) -> [f64; 3] {
    let v = |alpha: f64| {
        let z = ComplexMatrix::from_real_imag(x, [[alpha, 0.0], [0.0, alpha]]);
        abs_det(c, d, &z).powi(2)
    };
    let (v0, v1, v2) = (v(0.0), v(1.0), v(2.0));
    let p2 = (v2 - v0 - 4.0 * (v1 - v0)) / 12.0;
    let p1 = (v1 - v0) - p2;
    [v0, p1, p2]
}

/// Index of the highest coefficient above `1e-9 (1 + max |p_i|)`.
pub fn top_degree(p: &[f64; 3]) -> usize {
    let scale = 1.0 + p.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    (0..3).rev().find(|&i| p[i].abs() > 1e-9 * scale).unwrap_or(0)
}

/// Rows per `y`: the largest `| |det(c(x+iy)+d)| / (y^2 |det c|) - 1 |` over `xs`.
pub fn rank_asymptotic_check(c: &IntMatrix2, d: &IntMatrix2, xs: &[[f64; 3]], ys: &[f64]) -> Result<ScanReport> {
    let det_c = c.det();
    if det_c == 0 {
        return Err(Error::invalid("rank_asymptotic_check needs det(c) != 0"));
    }
    let mut report = ScanReport::new(["y"]);
    for &y in ys {
        let dev = xs
            .iter()
            .map(|x| {
                let z = SiegelPoint::on_box(x[0], x[1], x[2], y).to_complex();
                (abs_det(c, d, &z) / (y * y * det_c.abs() as f64) - 1.0).abs()
            })
            .fold(0.0f64, f64::max);
        report.push(vec![y], dev, 0.0, 0.0, 0.0);
    }
    Ok(report)
}
