use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub const MAX_PRECISION: usize = 200;

/// Truncated q-expansion `sum_{n <= N} a(n) q^n` with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QExpansion {
    pub weight: u32,
    coeffs: Vec<BigRational>,
}

impl QExpansion {
    pub fn new(weight: u32, coeffs: Vec<BigRational>) -> Self {
        QExpansion { weight, coeffs }
    }

    pub fn from_integers(weight: u32, coeffs: &[i64]) -> Self {
        Self::new(weight, coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    pub fn zero(weight: u32, precision: usize) -> Self {
        Self::new(weight, vec![BigRational::zero(); precision + 1])
    }

    pub fn one(precision: usize) -> Self {
        let mut q = Self::zero(0, precision);
        q.coeffs[0] = BigRational::one();
        q
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &BigRational {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff_f64(&self, n: usize) -> f64 {
        self.coeffs[n].to_f64().unwrap_or(f64::NAN)
    }

    /// Index of the first nonzero coefficient.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.precision() != other.precision() {
            return Err(Error::invalid("q-expansions must share a precision"));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        if self.weight != other.weight {
            return Err(Error::invalid("cannot add forms of different weight"));
        }
        Ok(Self::new(self.weight, self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.weight, self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Product truncated at the common precision.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let n = self.precision();
        let mut out = vec![BigRational::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=n - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Ok(Self::new(self.weight + other.weight, out))
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut acc = Self::one(self.precision());
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }
}

fn sigma(power: u32, n: u64) -> BigInt {
    let mut s = BigInt::zero();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            s += BigInt::from(d).pow(power);
            if d * d != n {
                s += BigInt::from(n / d).pow(power);
            }
        }
        d += 1;
    }
    s
}

fn check_precision(n: usize) -> Result<()> {
    if n == 0 || n > MAX_PRECISION {
        return Err(Error::envelope(format!("q-expansion precision {n} outside 1..={MAX_PRECISION}")));
    }
    Ok(())
}

/// `E4 = 1 + 240 sum sigma_3(n) q^n` and `E6 = 1 - 504 sum sigma_5(n) q^n`.
pub fn eisenstein(weight: u32, precision: usize) -> Result<QExpansion> {
    check_precision(precision)?;
    let (c, power) = match weight {
        4 => (240, 3),
        6 => (-504, 5),
        _ => return Err(Error::invalid(format!("Eisenstein series available for weight 4 or 6, got {weight}"))),
    };
    let mut coeffs = vec![BigRational::one()];
    for n in 1..=precision as u64 {
        coeffs.push(BigRational::from_integer(sigma(power, n) * c));
    }
    Ok(QExpansion::new(weight, coeffs))
}

/// `Delta = (E4^3 - E6^2) / 1728`.
pub fn delta(precision: usize) -> Result<QExpansion> {
    let e4 = eisenstein(4, precision)?;
    let e6 = eisenstein(6, precision)?;
    let d = e4.pow(3)?.sub(&e6.pow(2)?)?;
    Ok(d.scale(&BigRational::new(1.into(), 1728.into())))
}

/// Dimension of the level-one cusp space of weight `k`.
pub fn cusp_dimension(k: u32) -> usize {
    if k % 2 == 1 || k < 12 {
        return 0;
    }
    let base = (k / 12) as usize;
    if k % 12 == 2 {
        base - 1
    } else {
        base
    }
}

/// Echelon basis `f_i = q^i + O(q^{d+1})` of the weight-`k` cusp space, built
/// from `Delta^g E4^a E6^b` with `12 g + 4 a + 6 b = k`.
pub fn miller_basis(k: u32, precision: usize) -> Result<Vec<QExpansion>> {
    let d = cusp_dimension(k);
    if d == 0 {
        return Ok(Vec::new());
    }
    if k > 60 {
        return Err(Error::envelope(format!("weight {k} exceeds 60")));
    }
    if precision < d {
        return Err(Error::invalid(format!("precision {precision} below the cusp dimension {d}")));
    }
    let e4 = eisenstein(4, precision)?;
    let e6 = eisenstein(6, precision)?;
    let dl = delta(precision)?;
    let mut basis = Vec::with_capacity(d);
    for g in 1..=d as u32 {
        let rest = k - 12 * g;
        let (a, b) = (0..=rest / 6)
            .find_map(|b| {
                let r = rest - 6 * b;
                (r % 4 == 0).then_some((r / 4, b))
            })
            .ok_or_else(|| Error::numerical(format!("no monomial of weight {rest}")))?;
        basis.push(dl.pow(g)?.mul(&e4.pow(a)?)?.mul(&e6.pow(b)?)?);
    }
    // Clear the entries above each leading term.
    for i in (0..d).rev() {
        for j in 0..i {
            let c = basis[j].coeff(i + 1).clone();
            if !c.is_zero() {
                basis[j] = basis[j].sub(&basis[i].scale(&c))?;
            }
        }
    }
    debug_assert!(basis.iter().enumerate().all(|(i, f)| f.order() == Some(i + 1) && f.coeff(i + 1).is_one()));
    Ok(basis)
}
