use std::f64::consts::TAU;

/// Extended Euclid: returns `(g, u, v)` with `u*a + v*b = g = gcd(a, b) >= 0`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_u, mut u) = (1i64, 0i64);
    let (mut old_v, mut v) = (0i64, 1i64);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_u, u) = (u, old_u - q * u);
        (old_v, v) = (v, old_v - q * v);
    }
    if old_r < 0 {
        (-old_r, -old_u, -old_v)
    } else {
        (old_r, old_u, old_v)
    }
}

/// Inverse of `x` modulo `c`, in `0..c`, when `gcd(x, c) = 1`.
pub fn mod_inverse(x: i64, c: i64) -> Option<i64> {
    let (g, u, _) = ext_gcd(x.rem_euclid(c), c);
    (g == 1).then(|| u.rem_euclid(c))
}

pub fn euler_phi(mut c: u64) -> u64 {
    let mut result = c;
    let mut p = 2;
    while p * p <= c {
        if c % p == 0 {
            while c % p == 0 {
                c /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if c > 1 {
        result -= result / c;
    }
    result
}

/// Kloosterman sum `S(m, n; c)` by direct summation over units mod `c`.
///
/// The phase `m x + n xbar` is reduced mod `c` in integer arithmetic before
/// the cosine is taken, so large `m`, `n` lose no accuracy.
pub fn kloosterman(m: u64, n: u64, c: u64) -> f64 {
    assert!(c >= 1, "kloosterman modulus must be positive");
    if c == 1 {
        return 1.0;
    }
    let ci = c as i64;
    let (mr, nr) = ((m % c) as i64, (n % c) as i64);
    let mut total = 0.0;
    for x in 1..ci {
        if let Some(xbar) = mod_inverse(x, ci) {
            let phase = ((mr as i128 * x as i128 + nr as i128 * xbar as i128) % ci as i128) as f64;
            total += (TAU * phase / c as f64).cos();
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    // Oracle: complex exponential sum over all x with a brute-force inverse search.
    fn kloosterman_brute(m: u64, n: u64, c: u64) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for x in 0..c {
            for y in 0..c {
                if (x * y) % c == 1 % c {
                    let arg = TAU * ((m * x + n * y) % c) as f64 / c as f64;
                    s += Complex64::from_polar(1.0, arg);
                }
            }
        }
        s
    }

    #[test]
    fn small_values() {
        assert_eq!(kloosterman(1, 1, 1), 1.0);
        assert!((kloosterman(1, 1, 2) - 1.0).abs() < 1e-14);
        assert!((kloosterman(1, 1, 3) + 1.0).abs() < 1e-14);
    }

    #[test]
    fn matches_brute_force_and_is_real() {
        for c in 1..40 {
            for (m, n) in [(1, 1), (1, 2), (2, 3), (5, 7), (4, 6)] {
                let b = kloosterman_brute(m, n, c);
                assert!(b.im.abs() < 1e-10, "imaginary part {} at c={c}", b.im);
                assert!((kloosterman(m, n, c) - b.re).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn symmetric_and_bounded_by_phi() {
        for c in 1..=100u64 {
            for (m, n) in [(1, 2), (3, 7), (6, 10)] {
                let s = kloosterman(m, n, c);
                assert!((s - kloosterman(n, m, c)).abs() < 1e-9);
                assert!(s.abs() <= euler_phi(c) as f64 + 1e-9);
            }
        }
    }

    #[test]
    fn inverse_and_gcd() {
        assert_eq!(mod_inverse(3, 7), Some(5));
        assert_eq!(mod_inverse(2, 4), None);
        let (g, u, v) = ext_gcd(-12, 18);
        assert_eq!(g, 6);
        assert_eq!(u * -12 + v * 18, 6);
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(36), 12);
    }
}
