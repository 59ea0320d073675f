//! Coset representatives of `Gamma_inf \ SL(2,Z)`, `Gamma_inf \ Gamma_0(q)`
//! and `Gamma_inf \ Sp(4,Z)`, indexed by their bottom rows.

use num_integer::Integer;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{ext_gcd, ComplexMatrix, IntMatrix2};
use crate::siegel::SiegelPoint;

/// Largest genus-2 entry height accepted by [`enumerate_g2_cosets`].
pub const G2_MAX_BOUND: u32 = 4;

/// Coset of `Gamma_inf \ SL(2,Z)` with bottom row `(c, d)` and a completion `(a, b)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CosetRepG1 {
    pub c: i64,
    pub d: i64,
    pub a: i64,
    pub b: i64,
}

/// Finds `(a, b)` with `a d - b c = 1`.
pub fn complete_g1(c: i64, d: i64) -> Result<(i64, i64)> {
    let (g, u, v) = ext_gcd(d, c);
    if g != 1 {
        return Err(Error::invalid(format!("bottom row ({c}, {d}) is not coprime")));
    }
    // u d + v c = 1  =>  a = u, b = -v
    Ok((u, -v))
}

/// One representative per coset with `max(|c|, |d|) <= bound`, normalized to
/// `c > 0` or `(c, d) = (0, 1)`. The identity coset comes first.
pub fn enumerate_g1_cosets(bound: u32) -> Vec<CosetRepG1> {
    let b = bound as i64;
    let mut out = vec![CosetRepG1 { c: 0, d: 1, a: 1, b: 0 }];
    for c in 1..=b {
        for d in -b..=b {
            if c.gcd(&d) == 1 {
                let (a, bb) = complete_g1(c, d).expect("coprime by construction");
                out.push(CosetRepG1 { c, d, a, b: bb });
            }
        }
    }
    out
}

/// The `Delta_q` indicator: 1 iff `q | c`.
pub fn gamma0_indicator(rep: &CosetRepG1, q: u64) -> u8 {
    u8::from(rep.c.rem_euclid(q as i64) == 0)
}

/// An element of `Sp(4,Z)` given by its four 2x2 blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SymplecticMatrix {
    pub a: IntMatrix2,
    pub b: IntMatrix2,
    pub c: IntMatrix2,
    pub d: IntMatrix2,
}

impl SymplecticMatrix {
    pub const IDENTITY: Self = SymplecticMatrix {
        a: IntMatrix2::IDENTITY,
        b: IntMatrix2::ZERO,
        c: IntMatrix2::ZERO,
        d: IntMatrix2::IDENTITY,
    };

    /// `J = (0 I; -I 0)`.
    pub fn j() -> Self {
        SymplecticMatrix { a: IntMatrix2::ZERO, b: IntMatrix2::IDENTITY, c: -IntMatrix2::IDENTITY, d: IntMatrix2::ZERO }
    }

    pub fn to_rows(&self) -> [[i64; 4]; 4] {
        let mut m = [[0i64; 4]; 4];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = self.a.get(i, j);
                m[i][j + 2] = self.b.get(i, j);
                m[i + 2][j] = self.c.get(i, j);
                m[i + 2][j + 2] = self.d.get(i, j);
            }
        }
        m
    }

    pub fn from_rows(m: &[[i64; 4]; 4]) -> Self {
        let block = |r: usize, c: usize| IntMatrix2::new(m[r][c], m[r][c + 1], m[r + 1][c], m[r + 1][c + 1]);
        SymplecticMatrix { a: block(0, 0), b: block(0, 2), c: block(2, 0), d: block(2, 2) }
    }

    /// `gamma^T J gamma == J`, in exact integer arithmetic.
    pub fn is_symplectic(&self) -> bool {
        let g = self.to_rows();
        let j = SymplecticMatrix::j().to_rows();
        let mut jg = [[0i64; 4]; 4];
        for i in 0..4 {
            for k in 0..4 {
                jg[i][k] = (0..4).map(|l| j[i][l] * g[l][k]).sum();
            }
        }
        for i in 0..4 {
            for k in 0..4 {
                let v: i64 = (0..4).map(|l| g[l][i] * jg[l][k]).sum();
                if v != j[i][k] {
                    return false;
                }
            }
        }
        true
    }

    pub fn mul(&self, o: &SymplecticMatrix) -> SymplecticMatrix {
        SymplecticMatrix {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn neg(&self) -> SymplecticMatrix {
        SymplecticMatrix { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }
}

/// Word of `length` random generators: `J`, the partial involution on the
/// first coordinate, translations by symmetric `S` with entries in
/// `{-1, 0, 1}`, and `diag(U, U^{-T})` for elementary `U`.
pub fn random_symplectic<R: Rng>(rng: &mut R, length: usize) -> SymplecticMatrix {
    let j1 = SymplecticMatrix {
        a: IntMatrix2::diag(0, 1),
        b: IntMatrix2::diag(1, 0),
        c: IntMatrix2::diag(-1, 0),
        d: IntMatrix2::diag(0, 1),
    };
    let mut g = SymplecticMatrix::IDENTITY;
    for _ in 0..length {
        let step = match rng.gen_range(0..4) {
            0 => SymplecticMatrix::j(),
            1 => j1,
            2 => {
                let (x, y, z) = (rng.gen_range(-1..=1), rng.gen_range(-1..=1), rng.gen_range(-1..=1));
                SymplecticMatrix { b: IntMatrix2::new(x, y, y, z), ..SymplecticMatrix::IDENTITY }
            }
            _ => {
                let u = [IntMatrix2::new(1, 1, 0, 1), IntMatrix2::new(1, 0, -1, 1), IntMatrix2::new(0, 1, 1, 0)]
                    [rng.gen_range(0..3)];
                let uinv = u.unimodular_inverse().expect("elementary matrices are unimodular");
                SymplecticMatrix { a: u, b: IntMatrix2::ZERO, c: IntMatrix2::ZERO, d: uinv.transpose() }
            }
        };
        g = g.mul(&step);
    }
    g
}

/// Coset of `Gamma_inf \ Sp(4,Z)`: a symmetric primitive bottom row `(c, d)`
/// together with a completion `(a, b)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CosetRepG2 {
    pub c: IntMatrix2,
    pub d: IntMatrix2,
    pub a: IntMatrix2,
    pub b: IntMatrix2,
}

impl CosetRepG2 {
    pub fn matrix(&self) -> SymplecticMatrix {
        SymplecticMatrix { a: self.a, b: self.b, c: self.c, d: self.d }
    }
}

/// `c d^T` is symmetric.
pub fn is_symmetric_pair(c: &IntMatrix2, d: &IntMatrix2) -> bool {
    (*c * d.transpose()).is_symmetric()
}

/// gcd of the six 2x2 minors of the 2x4 block `[c d]`.
pub fn minors_gcd(c: &IntMatrix2, d: &IntMatrix2) -> i64 {
    let cols = [
        [c.get(0, 0), c.get(1, 0)],
        [c.get(0, 1), c.get(1, 1)],
        [d.get(0, 0), d.get(1, 0)],
        [d.get(0, 1), d.get(1, 1)],
    ];
    let mut g = 0i64;
    for i in 0..4 {
        for j in (i + 1)..4 {
            let minor = cols[i][0] * cols[j][1] - cols[i][1] * cols[j][0];
            g = g.gcd(&minor);
        }
    }
    g
}

pub fn is_primitive_pair(c: &IntMatrix2, d: &IntMatrix2) -> bool {
    minors_gcd(c, d) == 1
}

/// Sign rule: the first nonzero entry of `[c d]` in row-major order is positive.
pub fn is_sign_normalized(c: &IntMatrix2, d: &IntMatrix2) -> bool {
    let row_major = [c.get(0, 0), c.get(0, 1), d.get(0, 0), d.get(0, 1), c.get(1, 0), c.get(1, 1), d.get(1, 0), d.get(1, 1)];
    row_major.iter().find(|v| **v != 0).is_some_and(|v| *v > 0)
}

/// Applies the sign rule to a bottom row.
pub fn sign_normalize(c: IntMatrix2, d: IntMatrix2) -> (IntMatrix2, IntMatrix2) {
    if is_sign_normalized(&c, &d) {
        (c, d)
    } else {
        (-c, -d)
    }
}

/// Completes a symmetric primitive pair `(c, d)` to a symplectic matrix.
///
/// First solves `a0 d^T - b0 c^T = I` by unimodular row reduction of the
/// 4x2 matrix `[d^T; -c^T]`, then shifts `(a0, b0) -> (a0 + h c, b0 + h d)`
/// with `h = (0 x; 0 0)` to make `a b^T` symmetric.
pub fn complete_g2(c: &IntMatrix2, d: &IntMatrix2) -> Result<(IntMatrix2, IntMatrix2)> {
    if !is_symmetric_pair(c, d) {
        return Err(Error::invalid(format!("c d^T is not symmetric for c={c}, d={d}")));
    }
    if !is_primitive_pair(c, d) {
        return Err(Error::invalid(format!("[c d] is not primitive for c={c}, d={d}")));
    }
    let dt = d.transpose();
    let ct = c.transpose();
    let mut m = [[0i64; 2]; 4];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = dt.get(i, j);
            m[i + 2][j] = -ct.get(i, j);
        }
    }
    let mut u = [[0i64; 4]; 4];
    for (i, row) in u.iter_mut().enumerate() {
        row[i] = 1;
    }
    let swap = |m: &mut [[i64; 2]; 4], u: &mut [[i64; 4]; 4], i: usize, j: usize| {
        m.swap(i, j);
        u.swap(i, j);
    };
    let axpy = |m: &mut [[i64; 2]; 4], u: &mut [[i64; 4]; 4], dst: usize, src: usize, q: i64| {
        for k in 0..2 {
            m[dst][k] -= q * m[src][k];
        }
        for k in 0..4 {
            u[dst][k] -= q * u[src][k];
        }
    };
    for col in 0..2 {
        for row in (col + 1)..4 {
            while m[row][col] != 0 {
                let q = m[col][col].div_euclid(m[row][col]);
                axpy(&mut m, &mut u, col, row, q);
                swap(&mut m, &mut u, col, row);
            }
        }
        if m[col][col] < 0 {
            for k in 0..2 {
                m[col][k] = -m[col][k];
            }
            for k in 0..4 {
                u[col][k] = -u[col][k];
            }
        }
    }
    if m[0][0] != 1 || m[1][1] != 1 {
        return Err(Error::numerical("row reduction did not reach a unimodular pivot block"));
    }
    let h01 = m[0][1];
    axpy(&mut m, &mut u, 0, 1, h01);
    let a0 = IntMatrix2::new(u[0][0], u[0][1], u[1][0], u[1][1]);
    let b0 = IntMatrix2::new(u[0][2], u[0][3], u[1][2], u[1][3]);
    let x = a0 * b0.transpose() - b0 * a0.transpose();
    let h = IntMatrix2::new(0, x.get(0, 1), 0, 0);
    let a = a0 + h * *c;
    let b = b0 + h * *d;
    let gamma = SymplecticMatrix { a, b, c: *c, d: *d };
    if !gamma.is_symplectic() {
        return Err(Error::numerical(format!("completion of c={c}, d={d} is not symplectic")));
    }
    Ok((a, b))
}

/// One representative per coset of `Gamma_inf \ Sp(4,Z)` whose bottom-row
/// entries are bounded by `bound` in absolute value. The identity coset is
/// first; the rest follow lexicographic order of `(c, d)` entries.
pub fn enumerate_g2_cosets(bound: u32) -> Result<Vec<CosetRepG2>> {
    if bound > G2_MAX_BOUND {
        return Err(Error::envelope(format!("genus-2 coset bound {bound} exceeds {G2_MAX_BOUND}")));
    }
    let b = bound as i64;
    let range: Vec<i64> = (-b..=b).collect();
    let mut mats = Vec::with_capacity(range.len().pow(4));
    for &p in &range {
        for &q in &range {
            for &r in &range {
                for &s in &range {
                    mats.push(IntMatrix2::new(p, q, r, s));
                }
            }
        }
    }
    let mut out = vec![CosetRepG2 {
        c: IntMatrix2::ZERO,
        d: IntMatrix2::IDENTITY,
        a: IntMatrix2::IDENTITY,
        b: IntMatrix2::ZERO,
    }];
    for c in &mats {
        for d in &mats {
            if c.is_zero() && *d == IntMatrix2::IDENTITY {
                continue;
            }
            if is_sign_normalized(c, d) && is_symmetric_pair(c, d) && is_primitive_pair(c, d) {
                let (a, bb) = complete_g2(c, d)?;
                out.push(CosetRepG2 { c: *c, d: *d, a, b: bb });
            }
        }
    }
    Ok(out)
}

/// `gamma . z = (a z + b)(c z + d)^{-1}`.
pub fn symplectic_action(gamma: &SymplecticMatrix, z: &SiegelPoint) -> Result<SiegelPoint> {
    let zc = z.to_complex();
    let j = ComplexMatrix::from_int(&gamma.c) * zc + ComplexMatrix::from_int(&gamma.d);
    let cond = j.condition();
    if cond > 1e12 {
        return Err(Error::numerical(format!("c z + d is ill-conditioned (condition {cond:.3e})")));
    }
    let jinv = j.inverse().ok_or_else(|| Error::numerical("c z + d is singular"))?;
    let w = ((ComplexMatrix::from_int(&gamma.a) * zc + ComplexMatrix::from_int(&gamma.b)) * jinv).symmetrized();
    SiegelPoint::new(w.real_part(), w.imag_part())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn g1_bound_one() {
        let reps = enumerate_g1_cosets(1);
        let pairs: BTreeSet<(i64, i64)> = reps.iter().map(|r| (r.c, r.d)).collect();
        let expected: BTreeSet<(i64, i64)> = [(0, 1), (1, 0), (1, 1), (1, -1)].into_iter().collect();
        assert_eq!(pairs, expected);
        assert_eq!(reps[0], CosetRepG1 { c: 0, d: 1, a: 1, b: 0 });
    }

    #[test]
    fn g1_bound_one_against_brute_force() {
        // All SL(2,Z) matrices with entries in {-1,0,1}, reduced by sign and Gamma_inf.
        let mut seen = BTreeSet::new();
        let r = -1..=1i64;
        for a in r.clone() {
            for b in r.clone() {
                for c in r.clone() {
                    for d in r.clone() {
                        if a * d - b * c == 1 {
                            let (c, d) = if c < 0 || (c == 0 && d < 0) { (-c, -d) } else { (c, d) };
                            seen.insert((c, d));
                        }
                    }
                }
            }
        }
        let ours: BTreeSet<(i64, i64)> = enumerate_g1_cosets(1).iter().map(|r| (r.c, r.d)).collect();
        assert_eq!(ours, seen);
    }

    #[test]
    fn g1_invariants_and_nesting() {
        for bound in 1..12u32 {
            let reps = enumerate_g1_cosets(bound);
            let set: BTreeSet<(i64, i64)> = reps.iter().map(|r| (r.c, r.d)).collect();
            assert_eq!(set.len(), reps.len());
            for r in &reps {
                assert_eq!(r.a * r.d - r.b * r.c, 1);
                assert!(r.c > 0 || (r.c == 0 && r.d == 1));
                assert_eq!(r.c.gcd(&r.d), 1);
                assert_eq!(gamma0_indicator(r, 1), 1);
            }
            let next: BTreeSet<(i64, i64)> = enumerate_g1_cosets(bound + 1).iter().map(|r| (r.c, r.d)).collect();
            assert!(set.is_subset(&next));
        }
    }

    #[test]
    fn g1_completion() {
        assert_eq!(complete_g1(0, 1).unwrap(), (1, 0));
        assert_eq!(complete_g1(1, 0).unwrap(), (0, -1));
        let (a, b) = complete_g1(3, 5).unwrap();
        assert_eq!(5 * a - 3 * b, 1);
        assert!(complete_g1(4, 6).is_err());
    }

    #[test]
    fn gamma0() {
        let rep = |c, d| CosetRepG1 { c, d, a: 0, b: 0 };
        assert_eq!(gamma0_indicator(&rep(0, 1), 7), 1);
        assert_eq!(gamma0_indicator(&rep(1, 0), 7), 0);
        assert_eq!(gamma0_indicator(&rep(14, 3), 7), 1);
    }

    #[test]
    fn g2_special_cosets() {
        let reps = enumerate_g2_cosets(1).unwrap();
        assert_eq!(reps[0].c, IntMatrix2::ZERO);
        assert_eq!(reps[0].a, IntMatrix2::IDENTITY);
        assert!(reps.iter().any(|r| r.c == IntMatrix2::IDENTITY && r.d == IntMatrix2::ZERO));
        let (a, b) = complete_g2(&IntMatrix2::ZERO, &IntMatrix2::IDENTITY).unwrap();
        assert_eq!((a, b), (IntMatrix2::IDENTITY, IntMatrix2::ZERO));
        let (a, b) = complete_g2(&IntMatrix2::IDENTITY, &IntMatrix2::ZERO).unwrap();
        let g = SymplecticMatrix { a, b, c: IntMatrix2::IDENTITY, d: IntMatrix2::ZERO };
        assert!(g.is_symplectic());
    }

    #[test]
    fn g2_invariants() {
        let reps = enumerate_g2_cosets(2).unwrap();
        let set: BTreeSet<_> = reps.iter().map(|r| (r.c, r.d)).collect();
        assert_eq!(set.len(), reps.len());
        for r in &reps {
            assert!(is_symmetric_pair(&r.c, &r.d));
            assert!(is_primitive_pair(&r.c, &r.d));
            assert!(r.matrix().is_symplectic());
            assert!(is_sign_normalized(&r.c, &r.d) || (r.c.is_zero() && r.d == IntMatrix2::IDENTITY));
        }
    }

    #[test]
    fn g2_rejects_bad_pairs() {
        let c = IntMatrix2::new(2, 0, 0, 2);
        assert!(complete_g2(&c, &IntMatrix2::ZERO).is_err());
        let c = IntMatrix2::new(1, 0, 0, 0);
        let d = IntMatrix2::new(0, 1, 1, 0);
        assert!(!is_symmetric_pair(&c, &d));
        assert!(complete_g2(&c, &d).is_err());
        assert!(enumerate_g2_cosets(5).is_err());
    }

    #[test]
    fn j_and_identity_are_symplectic() {
        assert!(SymplecticMatrix::IDENTITY.is_symplectic());
        assert!(SymplecticMatrix::j().is_symplectic());
        assert!(SymplecticMatrix::j().mul(&SymplecticMatrix::j()).neg() == SymplecticMatrix::IDENTITY);
    }

    #[test]
    fn action_fixed_points() {
        let z = SiegelPoint::new([[0.1, -0.2], [-0.2, 0.3]], [[1.5, 0.2], [0.2, 1.1]]).unwrap();
        let w = symplectic_action(&SymplecticMatrix::IDENTITY, &z).unwrap();
        assert_eq!(w, z);
        let i = SiegelPoint::new([[0.0; 2]; 2], [[1.0, 0.0], [0.0, 1.0]]).unwrap();
        let w = symplectic_action(&SymplecticMatrix::j(), &i).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                assert!((w.x[r][c]).abs() < 1e-15);
                assert!((w.y[r][c] - i.y[r][c]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn random_words_are_symplectic() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut ranks = [0usize; 3];
        for _ in 0..200 {
            let g = random_symplectic(&mut rng, 6);
            assert!(g.is_symplectic());
            ranks[g.c.rank()] += 1;
        }
        assert!(ranks.iter().all(|&r| r > 0), "{ranks:?}");
    }
}
