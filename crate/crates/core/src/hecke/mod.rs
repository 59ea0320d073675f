//! Level-one Hecke eigenforms from exact q-expansions, Petersson weights
//! fitted to Kloosterman-route Poincaré coefficients, and Weyl sums
//! `sum_f w_f prod_p U_{n(p)}(lambda_f(p))`.

mod poly;
mod qexp;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::classical::{c_max_for, petersson_kloosterman};
use crate::error::{Error, Result};

pub use poly::{real_roots, Poly, Sturm};
pub use qexp::{cusp_dimension, delta, eisenstein, miller_basis, QExpansion, MAX_PRECISION};

pub const MAX_WEIGHT: u32 = 60;
pub const MAX_PRIME: u64 = 50;
/// Tolerance on the Kloosterman truncation when fitting weights.
const WEIGHT_TOL: f64 = 1e-13;
const ROOT_STEPS: u32 = 200;

type QMatrix = Vec<Vec<BigRational>>;

pub fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&p| (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0)).collect()
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `a(T_p f, n) = a(f, pn) + p^{k-1} a(f, n/p)`.
pub fn hecke_coeff(f: &QExpansion, p: u64, n: usize) -> Result<BigRational> {
    let pn = p as usize * n;
    if pn > f.precision() {
        return Err(Error::invalid(format!("a({pn}) needed beyond precision {}", f.precision())));
    }
    let mut v = f.coeff(pn).clone();
    if n % p as usize == 0 {
        let pk = BigInt::from(p).pow(f.weight - 1);
        v += f.coeff(n / p as usize) * BigRational::from_integer(pk);
    }
    Ok(v)
}

/// Matrix of `T_p` on an echelon basis: column `j` holds `a(T_p f_j, 1..d)`.
pub fn hecke_matrix(basis: &[QExpansion], p: u64) -> Result<QMatrix> {
    let d = basis.len();
    let mut m = vec![vec![BigRational::zero(); d]; d];
    for (j, f) in basis.iter().enumerate() {
        for (i, row) in m.iter_mut().enumerate() {
            row[j] = hecke_coeff(f, p, i + 1)?;
        }
    }
    Ok(m)
}

pub fn mat_mul(a: &QMatrix, b: &QMatrix) -> QMatrix {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).fold(BigRational::zero(), |acc, l| acc + &a[i][l] * &b[l][j])).collect())
        .collect()
}

/// Characteristic polynomial `det(x I - M)` by Faddeev-LeVerrier.
pub fn char_poly(m: &QMatrix) -> Poly {
    let n = m.len();
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    let mut mk: QMatrix = vec![vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        // M_k = M (M_{k-1} + c_{n-k+1} I)
        let mut prev = mk.clone();
        for (i, row) in prev.iter_mut().enumerate() {
            row[i] += &coeffs[n - k + 1];
        }
        mk = mat_mul(m, &prev);
        let tr = (0..n).fold(BigRational::zero(), |acc, i| acc + &mk[i][i]);
        coeffs[n - k] = -tr / rat(k as i64);
    }
    Poly(coeffs)
}

fn det(mut a: QMatrix) -> BigRational {
    let n = a.len();
    let mut d = BigRational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if piv != col {
            a.swap(piv, col);
            d = -d;
        }
        d *= &a[col][col];
        for r in col + 1..n {
            let f = &a[r][col] / &a[col][col];
            if f.is_zero() {
                continue;
            }
            for c in col..n {
                let t = &f * &a[col][c];
                a[r][c] -= t;
            }
        }
    }
    d
}

/// A column of `adj(M - lambda I)` with the largest sup-norm; proportional
/// to the eigenvector when `lambda` is near a simple eigenvalue.
fn adjugate_column(m: &QMatrix, lambda: &BigRational) -> Vec<BigRational> {
    let n = m.len();
    if n == 1 {
        return vec![BigRational::one()];
    }
    let mut a = m.clone();
    for (i, row) in a.iter_mut().enumerate() {
        row[i] -= lambda;
    }
    let minor = |skip_r: usize, skip_c: usize| -> QMatrix {
        (0..n)
            .filter(|&r| r != skip_r)
            .map(|r| (0..n).filter(|&c| c != skip_c).map(|c| a[r][c].clone()).collect())
            .collect()
    };
    (0..n)
        .map(|j| {
            (0..n)
                .map(|i| {
                    let c = det(minor(j, i));
                    if (i + j) % 2 == 0 {
                        c
                    } else {
                        -c
                    }
                })
                .collect::<Vec<_>>()
        })
        .max_by(|x, y| {
            let nx = x.iter().map(|v| v.abs()).max().unwrap();
            let ny = y.iter().map(|v| v.abs()).max().unwrap();
            nx.cmp(&ny)
        })
        .unwrap()
}

/// Normalized eigenform: `lambda(n) = a(n) / n^{(k-1)/2}` with `a(1) = 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeckeEigenform {
    pub k: u32,
    /// `(p, lambda(p))` for primes up to the requested bound.
    pub lambda: Vec<(u64, f64)>,
    /// `lambda(n)` for `n = 0..=precision` (entry 0 is 0).
    pub normalized: Vec<f64>,
}

impl HeckeEigenform {
    pub fn lambda_p(&self, p: u64) -> Option<f64> {
        self.lambda.iter().find(|(q, _)| *q == p).map(|(_, v)| *v)
    }

    pub fn lambda_n(&self, n: usize) -> Option<f64> {
        self.normalized.get(n).copied()
    }

    pub fn precision(&self) -> usize {
        self.normalized.len() - 1
    }
}

pub fn default_precision(p_max: u64) -> usize {
    (p_max as usize).max(64)
}

pub fn hecke_eigensystem(k: u32, p_max: u64) -> Result<Vec<HeckeEigenform>> {
    hecke_eigensystem_with_precision(k, p_max, default_precision(p_max))
}

/// Diagonalizes `T_2` on the Miller basis and reads off `lambda(p)` for `p <= p_max`.
pub fn hecke_eigensystem_with_precision(k: u32, p_max: u64, precision: usize) -> Result<Vec<HeckeEigenform>> {
    if k > MAX_WEIGHT {
        return Err(Error::envelope(format!("weight {k} exceeds {MAX_WEIGHT}")));
    }
    if p_max > MAX_PRIME {
        return Err(Error::envelope(format!("prime bound {p_max} exceeds {MAX_PRIME}")));
    }
    if precision < p_max as usize {
        return Err(Error::invalid("precision must cover every requested prime"));
    }
    let basis = miller_basis(k, precision)?;
    let d = basis.len();
    if d == 0 {
        return Ok(Vec::new());
    }
    let t2 = hecke_matrix(&basis, 2)?;
    let t3 = hecke_matrix(&basis, 3)?;
    let roots = real_roots(&char_poly(&t2), ROOT_STEPS);
    if roots.len() != d {
        return Err(Error::numerical(format!("T_2 has {} distinct real eigenvalues on a {d}-dimensional space", roots.len())));
    }
    let scale2 = 2f64.powf((k as f64 - 1.0) / 2.0);
    for w in roots.windows(2) {
        if to_f64(&(&w[1] - &w[0])) / scale2 < 1e-8 {
            return Err(Error::numerical("T_2 has a repeated eigenvalue"));
        }
    }
    let primes = primes_up_to(p_max);
    let mut forms = Vec::with_capacity(d);
    for root in &roots {
        let mut v = adjugate_column(&t2, root);
        let v0 = v[0].clone();
        if v0.is_zero() {
            return Err(Error::numerical("eigenvector has vanishing first coefficient"));
        }
        for x in v.iter_mut() {
            *x /= &v0;
        }
        let coeff = |n: usize| -> BigRational {
            basis.iter().zip(&v).fold(BigRational::zero(), |acc, (f, c)| acc + f.coeff(n) * c)
        };
        // Simultaneous eigenvector: T_3 v = a(3) v.
        let a3 = coeff(3);
        let resid = (0..d)
            .map(|i| {
                let tv = (0..d).fold(BigRational::zero(), |acc, j| acc + &t3[i][j] * &v[j]);
                to_f64(&(tv - &a3 * &v[i])).abs()
            })
            .fold(0.0, f64::max);
        let vnorm = v.iter().map(|x| to_f64(x).abs()).fold(0.0, f64::max);
        if resid > 1e-12 * to_f64(&a3).abs().max(1.0) * vnorm {
            return Err(Error::numerical(format!("eigenvector of T_2 fails the T_3 check (residual {resid:.3e})")));
        }
        let mut normalized = vec![0.0];
        for n in 1..=precision {
            normalized.push(to_f64(&coeff(n)) / (n as f64).powf((k as f64 - 1.0) / 2.0));
        }
        let lambda = primes.iter().map(|&p| (p, normalized[p as usize])).collect();
        forms.push(HeckeEigenform { k, lambda, normalized });
    }
    Ok(forms)
}

/// `U_0 = 1`, `U_1 = x`, `U_{n+1} = x U_n - U_{n-1}`.
pub fn chebyshev_u(n: u32, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, x);
    if n == 0 {
        return 1.0;
    }
    for _ in 1..n {
        let next = x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Normalized Petersson sum `Delta(m, 1) = sum_f w_f lambda_f(m)`.
pub fn petersson_target(m: u64, k: u32) -> Result<f64> {
    Ok(petersson_kloosterman(m, 1, k, 1, c_max_for(m, 1, k, 1, WEIGHT_TOL))?.value)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralData {
    pub k: u32,
    pub forms: Vec<HeckeEigenform>,
    /// Petersson weights `w_f`, one per form.
    pub weights: Vec<f64>,
    /// Largest absolute residual of the fitted system.
    pub residual: f64,
}

impl SpectralData {
    /// `sum_f w_f prod_p U_{n(p)}(lambda_f(p))`.
    pub fn weyl_sum(&self, exponents: &[(u64, u32)]) -> Result<f64> {
        let mut acc = 0.0;
        for (f, w) in self.forms.iter().zip(&self.weights) {
            let mut term = *w;
            for &(p, n) in exponents {
                let l = f
                    .lambda_p(p)
                    .ok_or_else(|| Error::invalid(format!("lambda({p}) not computed (p must be a prime in range)")))?;
                term *= chebyshev_u(n, l);
            }
            acc += term;
        }
        Ok(acc)
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Least-squares fit of `sum_f w_f lambda_f(m) = Delta(m, 1)` over `m = 1..=m_max`.
pub fn estimate_weights(k: u32, m_max: usize, p_max: u64) -> Result<SpectralData> {
    let precision = default_precision(p_max).max(m_max);
    let forms = hecke_eigensystem_with_precision(k, p_max, precision)?;
    let d = forms.len();
    if d == 0 {
        return Ok(SpectralData { k, forms, weights: Vec::new(), residual: 0.0 });
    }
    if m_max < d {
        return Err(Error::invalid(format!("index bound {m_max} below the cusp dimension {d}")));
    }
    let rhs: Vec<f64> = (1..=m_max as u64).map(|m| petersson_target(m, k)).collect::<Result<_>>()?;
    let a = nalgebra::DMatrix::from_fn(m_max, d, |i, j| forms[j].normalized[i + 1]);
    let b = nalgebra::DVector::from_vec(rhs);
    let svd = a.clone().svd(true, true);
    let w = svd.solve(&b, 1e-14).map_err(|e| Error::numerical(format!("least squares failed: {e}")))?;
    let residual = (&a * &w - &b).amax();
    let weights: Vec<f64> = w.iter().copied().collect();
    if residual > 1e-5 {
        return Err(Error::numerical(format!("weight fit residual {residual:.3e} exceeds 1e-5")));
    }
    if let Some(bad) = weights.iter().find(|w| !w.is_positive()) {
        return Err(Error::numerical(format!("fitted Petersson weight {bad} is not positive")));
    }
    Ok(SpectralData { k, forms, weights, residual })
}

/// Spectral data for each weight, computed in parallel.
pub fn spectral_scan(ks: &[u32], m_max: usize, p_max: u64) -> Result<Vec<SpectralData>> {
    ks.par_iter().map(|&k| estimate_weights(k, m_max.max(cusp_dimension(k)), p_max)).collect()
}

/// Rows `(k, form, p, lambda(p), w)`.
pub fn eigen_table_csv(data: &[SpectralData]) -> String {
    let mut out = String::from("k,form,p,lambda,omega\n");
    for sd in data {
        for (i, (f, w)) in sd.forms.iter().zip(&sd.weights).enumerate() {
            for (p, l) in &f.lambda {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    sd.k,
                    i,
                    p,
                    crate::report::fmt_number(*l),
                    crate::report::fmt_number(*w)
                ));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests;
