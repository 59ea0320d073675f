use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// A 2x2 integer matrix, row-major.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntMatrix2(pub [[i64; 2]; 2]);

impl IntMatrix2 {
    pub const ZERO: Self = IntMatrix2([[0, 0], [0, 0]]);
    pub const IDENTITY: Self = IntMatrix2([[1, 0], [0, 1]]);

    pub const fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        IntMatrix2([[a, b], [c, d]])
    }

    pub fn diag(a: i64, d: i64) -> Self {
        Self::new(a, 0, 0, d)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.0[i][j]
    }

    pub fn det(&self) -> i64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.0[0][0], self.0[1][0], self.0[0][1], self.0[1][1])
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::ZERO
    }

    pub fn is_symmetric(&self) -> bool {
        self.0[0][1] == self.0[1][0]
    }

    pub fn rank(&self) -> usize {
        if self.det() != 0 {
            2
        } else if self.is_zero() {
            0
        } else {
            1
        }
    }

    /// Inverse of a unimodular matrix (`det = +-1`).
    pub fn unimodular_inverse(&self) -> Option<Self> {
        let det = self.det();
        if det.abs() != 1 {
            return None;
        }
        let [[a, b], [c, d]] = self.0;
        Some(Self::new(d * det, -b * det, -c * det, a * det))
    }

    pub fn max_abs(&self) -> i64 {
        self.0.iter().flatten().map(|v| v.abs()).max().unwrap_or(0)
    }

    pub fn entries(&self) -> [i64; 4] {
        [self.0[0][0], self.0[0][1], self.0[1][0], self.0[1][1]]
    }
}

impl Mul for IntMatrix2 {
    type Output = IntMatrix2;
    fn mul(self, o: IntMatrix2) -> IntMatrix2 {
        let a = &self.0;
        let b = &o.0;
        IntMatrix2([
            [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
        ])
    }
}

impl Add for IntMatrix2 {
    type Output = IntMatrix2;
    fn add(self, o: IntMatrix2) -> IntMatrix2 {
        let mut r = self;
        for i in 0..2 {
            for j in 0..2 {
                r.0[i][j] += o.0[i][j];
            }
        }
        r
    }
}

impl Sub for IntMatrix2 {
    type Output = IntMatrix2;
    fn sub(self, o: IntMatrix2) -> IntMatrix2 {
        self + (-o)
    }
}

impl Neg for IntMatrix2 {
    type Output = IntMatrix2;
    fn neg(self) -> IntMatrix2 {
        let [[a, b], [c, d]] = self.0;
        Self::new(-a, -b, -c, -d)
    }
}

impl fmt::Display for IntMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.0[0][0], self.0[0][1], self.0[1][0], self.0[1][1])
    }
}
