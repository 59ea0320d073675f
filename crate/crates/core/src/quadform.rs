//! Positive-definite half-integral binary forms and their `GL(2,Z)` arithmetic.
//!
//! A form `s = (s11 s12; s12 s22)` with integral diagonal and half-integral
//! off-diagonal is stored as the integer triple `(s11, 2 s12, s22)`, i.e. the
//! binary quadratic form `s11 x^2 + 2 s12 x y + s22 y^2`. All arithmetic here
//! is exact.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::IntMatrix2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HalfIntegralForm {
    pub s11: i64,
    /// Twice the off-diagonal entry.
    pub s12x2: i64,
    pub s22: i64,
}

impl HalfIntegralForm {
    pub fn new(s11: i64, s12x2: i64, s22: i64) -> Result<Self> {
        let f = HalfIntegralForm { s11, s12x2, s22 };
        if s11 <= 0 || f.disc4() <= 0 {
            return Err(Error::invalid(format!("form {f} is not positive definite")));
        }
        Ok(f)
    }

    pub fn identity() -> Self {
        HalfIntegralForm { s11: 1, s12x2: 0, s22: 1 }
    }

    /// The hexagonal form `(1 1/2; 1/2 1)`.
    pub fn hexagonal() -> Self {
        HalfIntegralForm { s11: 1, s12x2: 1, s22: 1 }
    }

    pub fn diag(s11: i64, s22: i64) -> Result<Self> {
        Self::new(s11, 0, s22)
    }

    /// `4 det(s) = 4 s11 s22 - (2 s12)^2`.
    pub fn disc4(&self) -> i64 {
        4 * self.s11 * self.s22 - self.s12x2 * self.s12x2
    }

    pub fn det(&self) -> f64 {
        self.disc4() as f64 / 4.0
    }

    pub fn trace(&self) -> i64 {
        self.s11 + self.s22
    }

    pub fn s12(&self) -> f64 {
        self.s12x2 as f64 / 2.0
    }

    pub fn to_f64(&self) -> [[f64; 2]; 2] {
        [[self.s11 as f64, self.s12()], [self.s12(), self.s22 as f64]]
    }

    /// `v^T s v`.
    pub fn value(&self, v: [i64; 2]) -> i64 {
        self.polar(v, v) / 2
    }

    /// `2 u^T s v`, always an integer.
    pub fn polar(&self, u: [i64; 2], v: [i64; 2]) -> i64 {
        2 * self.s11 * u[0] * v[0] + self.s12x2 * (u[0] * v[1] + u[1] * v[0]) + 2 * self.s22 * u[1] * v[1]
    }

    /// Integer vectors `v` with `v^T s v <= bound`.
    fn short_vectors(&self, bound: i64) -> Vec<[i64; 2]> {
        // v1^2 <= 4 s22 bound / disc4, v2^2 <= 4 s11 bound / disc4.
        let d = self.disc4();
        let r1 = isqrt(4 * self.s22 * bound / d) + 1;
        let r2 = isqrt(4 * self.s11 * bound / d) + 1;
        let mut out = Vec::new();
        for x in -r1..=r1 {
            for y in -r2..=r2 {
                if self.value([x, y]) <= bound {
                    out.push([x, y]);
                }
            }
        }
        out
    }

    /// Gauss-reduced: `0 <= 2 s12 <= s11 <= s22`.
    pub fn is_reduced(&self) -> bool {
        0 <= self.s12x2 && self.s12x2 <= self.s11 && self.s11 <= self.s22
    }
}

fn isqrt(n: i64) -> i64 {
    if n <= 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

impl fmt::Display for HalfIntegralForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.s11, self.s12x2, self.s22)
    }
}

impl FromStr for HalfIntegralForm {
    type Err = Error;

    /// Parses the triple syntax `"s11,2s12,s22"`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::invalid(format!("form '{s}' must be three comma-separated integers")));
        }
        let mut v = [0i64; 3];
        for (slot, p) in v.iter_mut().zip(&parts) {
            *slot = p.parse().map_err(|_| Error::invalid(format!("form '{s}': '{p}' is not an integer")))?;
        }
        HalfIntegralForm::new(v[0], v[1], v[2])
    }
}

/// Element of `GL(2,Z)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UnimodularMatrix(IntMatrix2);

impl UnimodularMatrix {
    pub fn new(m: IntMatrix2) -> Result<Self> {
        if m.det().abs() != 1 {
            return Err(Error::invalid(format!("{m} is not unimodular")));
        }
        Ok(UnimodularMatrix(m))
    }

    pub fn identity() -> Self {
        UnimodularMatrix(IntMatrix2::IDENTITY)
    }

    pub fn matrix(&self) -> IntMatrix2 {
        self.0
    }

    pub fn compose(&self, o: &UnimodularMatrix) -> UnimodularMatrix {
        UnimodularMatrix(self.0 * o.0)
    }

    pub fn inverse(&self) -> UnimodularMatrix {
        UnimodularMatrix(self.0.unimodular_inverse().expect("unimodular"))
    }

    pub fn neg(&self) -> UnimodularMatrix {
        UnimodularMatrix(-self.0)
    }

    fn columns(&self) -> [[i64; 2]; 2] {
        let m = self.0;
        [[m.get(0, 0), m.get(1, 0)], [m.get(0, 1), m.get(1, 1)]]
    }

    /// Canonical representative of `{a, -a}`: first nonzero entry positive.
    pub fn sign_canonical(&self) -> UnimodularMatrix {
        let first = self.0.entries().into_iter().find(|v| *v != 0).unwrap_or(1);
        if first < 0 {
            self.neg()
        } else {
            *self
        }
    }
}

/// `a . s = a^T s a`; the columns of `a` are the new basis vectors.
pub fn act(a: &UnimodularMatrix, s: &HalfIntegralForm) -> HalfIntegralForm {
    let [u, v] = a.columns();
    HalfIntegralForm { s11: s.value(u), s12x2: s.polar(u, v), s22: s.value(v) }
}

/// Gauss reduction under `GL(2,Z)`. Returns `(reduced, a)` with `a . s = reduced`.
pub fn reduce(s: &HalfIntegralForm) -> (HalfIntegralForm, UnimodularMatrix) {
    let mut f = *s;
    let mut acc = IntMatrix2::IDENTITY;
    let apply = |f: &mut HalfIntegralForm, acc: &mut IntMatrix2, g: IntMatrix2| {
        let g = UnimodularMatrix(g);
        *f = act(&g, f);
        *acc = *acc * g.0;
    };
    loop {
        // Shear to |b| <= a: x -> x, y -> y - r x with r = round(b / 2a).
        let a2 = 2 * f.s11;
        let r = (f.s12x2 + f.s11).div_euclid(a2);
        if r != 0 {
            apply(&mut f, &mut acc, IntMatrix2::new(1, -r, 0, 1));
        }
        if f.s11 > f.s22 {
            apply(&mut f, &mut acc, IntMatrix2::new(0, 1, 1, 0));
            continue;
        }
        break;
    }
    if f.s12x2 < 0 {
        apply(&mut f, &mut acc, IntMatrix2::new(1, 0, 0, -1));
    }
    debug_assert!(f.is_reduced());
    (f, UnimodularMatrix(acc))
}

pub fn is_equivalent(s: &HalfIntegralForm, t: &HalfIntegralForm) -> bool {
    reduce(s).0 == reduce(t).0
}

/// All `a in GL(2,Z)` with `a^T s a = t`.
pub fn transporters(s: &HalfIntegralForm, t: &HalfIntegralForm) -> Vec<UnimodularMatrix> {
    if s.disc4() != t.disc4() {
        return Vec::new();
    }
    let cands = s.short_vectors(t.s11.max(t.s22));
    let firsts: Vec<_> = cands.iter().filter(|v| s.value(**v) == t.s11).collect();
    let seconds: Vec<_> = cands.iter().filter(|v| s.value(**v) == t.s22).collect();
    let mut out = Vec::new();
    for u in &firsts {
        for v in &seconds {
            if s.polar(**u, **v) != t.s12x2 {
                continue;
            }
            let m = IntMatrix2::new(u[0], v[0], u[1], v[1]);
            if m.det().abs() == 1 {
                out.push(UnimodularMatrix(m));
            }
        }
    }
    out.sort();
    out
}

/// `Aut(s) = O(s, Z)`, sorted.
pub fn aut_group(s: &HalfIntegralForm) -> Vec<UnimodularMatrix> {
    transporters(s, s)
}

/// `#{a in GL(2,Z)/+-1 : a . s = t}`.
pub fn orbit_count(s: &HalfIntegralForm, t: &HalfIntegralForm) -> usize {
    transporters(s, t).len() / 2
}

/// A small generating set of a finite subgroup, chosen greedily.
pub fn generators(group: &[UnimodularMatrix]) -> Vec<UnimodularMatrix> {
    let mut gens: Vec<UnimodularMatrix> = Vec::new();
    let mut span: BTreeSet<UnimodularMatrix> = [UnimodularMatrix::identity()].into_iter().collect();
    for g in group {
        if span.contains(g) {
            continue;
        }
        gens.push(*g);
        // closure under multiplication by generators
        let mut frontier: Vec<UnimodularMatrix> = span.iter().copied().collect();
        while let Some(x) = frontier.pop() {
            for h in &gens {
                let y = x.compose(h);
                if span.insert(y) {
                    frontier.push(y);
                }
            }
        }
    }
    gens
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(a: i64, b: i64, c: i64) -> HalfIntegralForm {
        HalfIntegralForm::new(a, b, c).unwrap()
    }

    // Oracle: all integer matrices with entries in [-bound, bound].
    fn brute_aut(s: &HalfIntegralForm, bound: i64) -> usize {
        let mut n = 0;
        for p in -bound..=bound {
            for q in -bound..=bound {
                for r in -bound..=bound {
                    for t in -bound..=bound {
                        let m = IntMatrix2::new(p, q, r, t);
                        if m.det().abs() == 1 && act(&UnimodularMatrix(m), s) == *s {
                            n += 1;
                        }
                    }
                }
            }
        }
        n
    }

    #[test]
    fn act_basics() {
        let s = form(1, 0, 2);
        assert_eq!(act(&UnimodularMatrix::identity(), &s), s);
        let swap = UnimodularMatrix::new(IntMatrix2::new(0, 1, 1, 0)).unwrap();
        assert_eq!(act(&swap, &s), form(2, 0, 1));
        let shear = UnimodularMatrix::new(IntMatrix2::new(1, 2, 0, 1)).unwrap();
        assert_eq!(act(&shear, &HalfIntegralForm::identity()), form(1, 4, 5));
    }

    #[test]
    fn reduce_examples() {
        let (r, a) = reduce(&HalfIntegralForm::identity());
        assert_eq!(r, HalfIntegralForm::identity());
        assert_eq!(a, UnimodularMatrix::identity());
        let s = form(1, 4, 5);
        let (r, a) = reduce(&s);
        assert_eq!(r, HalfIntegralForm::identity());
        assert_eq!(act(&a, &s), r);
        let (r, _) = reduce(&form(5, 4, 1));
        assert_eq!(r, form(1, 0, 1));
    }

    #[test]
    fn reduce_5_4_1_matches_word_search() {
        // Oracle: breadth-first search over words in shear/swap/sign generators.
        let gens = [
            IntMatrix2::new(1, 1, 0, 1),
            IntMatrix2::new(1, -1, 0, 1),
            IntMatrix2::new(0, 1, 1, 0),
            IntMatrix2::new(1, 0, 0, -1),
        ];
        let mut layer = vec![form(5, 4, 1)];
        let mut found = false;
        for _ in 0..6 {
            let mut next = Vec::new();
            for f in &layer {
                if *f == HalfIntegralForm::identity() {
                    found = true;
                }
                for g in &gens {
                    next.push(act(&UnimodularMatrix(*g), f));
                }
            }
            layer = next;
        }
        assert!(found);
    }

    #[test]
    fn equivalence() {
        let i = HalfIntegralForm::identity();
        assert!(is_equivalent(&i, &i));
        assert!(!is_equivalent(&i, &HalfIntegralForm::hexagonal()));
        assert!(is_equivalent(&form(5, 4, 1), &i));
    }

    #[test]
    fn automorphism_orders() {
        assert_eq!(aut_group(&form(1, 0, 2)).len(), 4);
        assert_eq!(aut_group(&HalfIntegralForm::identity()).len(), 8);
        assert_eq!(aut_group(&HalfIntegralForm::hexagonal()).len(), 12);
        assert_eq!(brute_aut(&form(1, 0, 2), 2), 4);
        assert_eq!(brute_aut(&HalfIntegralForm::identity(), 2), 8);
        assert_eq!(brute_aut(&HalfIntegralForm::hexagonal(), 2), 12);
    }

    #[test]
    fn aut_is_a_group() {
        for s in [form(1, 0, 2), HalfIntegralForm::identity(), HalfIntegralForm::hexagonal(), form(2, 1, 3)] {
            let g = aut_group(&s);
            let set: BTreeSet<_> = g.iter().copied().collect();
            assert!(set.contains(&UnimodularMatrix::identity()));
            assert!(set.contains(&UnimodularMatrix::identity().neg()));
            for x in &g {
                assert!(set.contains(&x.inverse()));
                for y in &g {
                    assert!(set.contains(&x.compose(y)));
                }
            }
        }
    }

    #[test]
    fn orbit_counts() {
        let i = HalfIntegralForm::identity();
        assert_eq!(orbit_count(&i, &i), 4);
        assert_eq!(orbit_count(&i, &form(1, 0, 2)), 0);
        assert_eq!(orbit_count(&HalfIntegralForm::hexagonal(), &HalfIntegralForm::hexagonal()), 6);
        assert_eq!(orbit_count(&i, &form(5, 4, 1)), 4);
    }

    #[test]
    fn parse_and_display() {
        let f: HalfIntegralForm = "1,1,1".parse().unwrap();
        assert_eq!(f, HalfIntegralForm::hexagonal());
        assert_eq!(f.to_string(), "1,1,1");
        assert!("1,3,1".parse::<HalfIntegralForm>().is_err());
        assert!("1,0".parse::<HalfIntegralForm>().is_err());
        assert!("-1,0,1".parse::<HalfIntegralForm>().is_err());
    }

    #[test]
    fn generators_generate() {
        let g = aut_group(&HalfIntegralForm::hexagonal());
        let gens = generators(&g);
        assert!(gens.len() <= 3);
    }
}
