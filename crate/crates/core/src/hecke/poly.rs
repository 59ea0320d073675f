//! Exact real-root isolation for rational polynomials with simple roots.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Coefficients from the constant term upward.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly(pub Vec<BigRational>);

impl Poly {
    fn trimmed(mut v: Vec<BigRational>) -> Self {
        while v.len() > 1 && v.last().is_some_and(|c| c.is_zero()) {
            v.pop();
        }
        Poly(v)
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.0.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        let v = self.0.iter().enumerate().skip(1).map(|(i, c)| c * BigRational::from_integer(BigInt::from(i))).collect();
        Self::trimmed(if self.0.len() > 1 { v } else { vec![BigRational::zero()] })
    }

    /// Remainder of `self` divided by `d`.
    pub fn rem(&self, d: &Poly) -> Self {
        let mut r = self.0.clone();
        let dl = d.0.last().expect("nonempty divisor").clone();
        let dd = d.degree();
        while r.len() > dd && !(r.len() == 1 && r[0].is_zero()) {
            let shift = r.len() - 1 - dd;
            let f = r.last().unwrap().clone() / &dl;
            for (i, c) in d.0.iter().enumerate() {
                r[shift + i] -= &f * c;
            }
            r.pop();
            if r.is_empty() {
                r.push(BigRational::zero());
            }
        }
        Self::trimmed(r)
    }

    /// Cauchy bound on the absolute value of every root.
    pub fn root_bound(&self) -> BigRational {
        let lead = self.0.last().unwrap().abs();
        let m = self.0[..self.degree()].iter().map(|c| c.abs() / &lead).fold(BigRational::zero(), |a, b| a.max(b));
        m + BigRational::one()
    }
}

fn sign(x: &BigRational) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

pub struct Sturm(Vec<Poly>);

impl Sturm {
    pub fn new(p: &Poly) -> Self {
        let mut seq = vec![p.clone(), p.derivative()];
        while !seq.last().unwrap().is_zero() && seq.last().unwrap().degree() > 0 {
            let n = seq.len();
            let r = seq[n - 2].rem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            seq.push(Poly(r.0.into_iter().map(|c| -c).collect()));
        }
        Sturm(seq)
    }

    fn variations(&self, x: &BigRational) -> usize {
        let signs: Vec<i8> = self.0.iter().map(|q| sign(&q.eval(x))).filter(|&s| s != 0).collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Number of distinct real roots in `(a, b]`.
    pub fn count(&self, a: &BigRational, b: &BigRational) -> usize {
        self.variations(a) - self.variations(b)
    }
}

/// Distinct real roots, ascending, each refined by `steps` bisections after isolation.
pub fn real_roots(p: &Poly, steps: u32) -> Vec<BigRational> {
    let sturm = Sturm::new(p);
    let r = p.root_bound();
    let mut stack = vec![(-r.clone(), r)];
    let mut isolated = Vec::new();
    while let Some((a, b)) = stack.pop() {
        match sturm.count(&a, &b) {
            0 => {}
            1 => isolated.push((a, b)),
            _ => {
                let mid = (&a + &b) / BigRational::from_integer(2.into());
                stack.push((mid.clone(), b));
                stack.push((a, mid));
            }
        }
    }
    isolated.sort();
    isolated
        .into_iter()
        .map(|(mut a, mut b)| {
            if p.eval(&b).is_zero() {
                return b;
            }
            let sb = sign(&p.eval(&b));
            let two = BigRational::from_integer(2.into());
            for _ in 0..steps {
                let mid = (&a + &b) / &two;
                let s = sign(&p.eval(&mid));
                if s == 0 {
                    return mid;
                }
                if s == sb {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            (a + b) / two
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int_poly(c: &[i64]) -> Poly {
        Poly(c.iter().map(|&v| BigRational::from_integer(v.into())).collect())
    }

    #[test]
    fn roots_of_small_polynomials() {
        // (x - 1)(x + 2)(x - 3)
        let p = int_poly(&[6, -5, -2, 1]);
        let roots = real_roots(&p, 60);
        let f: Vec<f64> = roots.iter().map(|r| num_traits::ToPrimitive::to_f64(r).unwrap()).collect();
        assert_eq!(f, vec![-2.0, 1.0, 3.0]);
        // x^2 - 2
        let roots = real_roots(&int_poly(&[-2, 0, 1]), 80);
        let v = num_traits::ToPrimitive::to_f64(&roots[1]).unwrap();
        assert!((v - 2f64.sqrt()).abs() < 1e-15);
        assert!(real_roots(&int_poly(&[1, 0, 1]), 10).is_empty());
    }

    #[test]
    fn repeated_roots_counted_once() {
        // (x - 1)^2 (x + 1)
        let p = int_poly(&[1, -1, -1, 1]);
        assert_eq!(real_roots(&p, 40).len(), 2);
    }
}
