use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use super::IntMatrix2;

/// A 2x2 complex matrix in double precision. Genus-1 quantities use plain
/// `Complex64` scalars instead.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexMatrix(pub [[Complex64; 2]; 2]);

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

impl ComplexMatrix {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        ComplexMatrix([[a, b], [c, d]])
    }

    pub fn zero() -> Self {
        ComplexMatrix([[ZERO; 2]; 2])
    }

    pub fn identity() -> Self {
        Self::scalar(Complex64::new(1.0, 0.0))
    }

    pub fn scalar(v: Complex64) -> Self {
        Self::new(v, ZERO, ZERO, v)
    }

    /// `x + i y` from real parts given row-major.
    pub fn from_real_imag(x: [[f64; 2]; 2], y: [[f64; 2]; 2]) -> Self {
        let mut m = Self::zero();
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] = Complex64::new(x[i][j], y[i][j]);
            }
        }
        m
    }

    pub fn from_int(a: &IntMatrix2) -> Self {
        let mut m = Self::zero();
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] = Complex64::new(a.get(i, j) as f64, 0.0);
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[i][j]
    }

    /// Closed 2x2 formula; no pivoting, so results are bit-reproducible.
    #[inline]
    pub fn det(&self) -> Complex64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det == ZERO || !det.is_finite() {
            return None;
        }
        let inv = det.inv();
        let [[a, b], [c, d]] = self.0;
        Some(Self::new(d * inv, -b * inv, -c * inv, a * inv))
    }

    pub fn transpose(&self) -> Self {
        let [[a, b], [c, d]] = self.0;
        Self::new(a, c, b, d)
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn is_symmetric(&self) -> bool {
        self.0[0][1] == self.0[1][0]
    }

    /// `(m + m^T) / 2`, which makes the symmetric flag exact.
    pub fn symmetrized(&self) -> Self {
        let off = (self.0[0][1] + self.0[1][0]) * 0.5;
        Self::new(self.0[0][0], off, off, self.0[1][1])
    }

    pub fn real_part(&self) -> [[f64; 2]; 2] {
        [[self.0[0][0].re, self.0[0][1].re], [self.0[1][0].re, self.0[1][1].re]]
    }

    pub fn imag_part(&self) -> [[f64; 2]; 2] {
        [[self.0[0][0].im, self.0[0][1].im], [self.0[1][0].im, self.0[1][1].im]]
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().flatten().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius-norm condition number; infinite when singular.
    pub fn condition(&self) -> f64 {
        match self.inverse() {
            Some(inv) => self.frobenius_norm() * inv.frobenius_norm(),
            None => f64::INFINITY,
        }
    }
}

impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;
    #[inline]
    fn mul(self, o: ComplexMatrix) -> ComplexMatrix {
        let a = &self.0;
        let b = &o.0;
        ComplexMatrix([
            [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
        ])
    }
}

impl Add for ComplexMatrix {
    type Output = ComplexMatrix;
    #[inline]
    fn add(self, o: ComplexMatrix) -> ComplexMatrix {
        let mut r = self;
        for i in 0..2 {
            for j in 0..2 {
                r.0[i][j] += o.0[i][j];
            }
        }
        r
    }
}

impl Sub for ComplexMatrix {
    type Output = ComplexMatrix;
    #[inline]
    fn sub(self, o: ComplexMatrix) -> ComplexMatrix {
        let mut r = self;
        for i in 0..2 {
            for j in 0..2 {
                r.0[i][j] -= o.0[i][j];
            }
        }
        r
    }
}
