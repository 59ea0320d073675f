use crate::error::{Error, Result};

pub const BESSEL_MAX_ORDER: u32 = 200;
pub const BESSEL_MAX_ARG: f64 = 100.0;

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// The classical majorant `(x/2)^order / order!` of `|J_order(x)|`.
pub fn bessel_j_bound(order: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if order == 0 { 1.0 } else { 0.0 };
    }
    (order as f64 * (x / 2.0).ln() - ln_factorial(order)).exp()
}

/// Bessel function of the first kind `J_order(x)` for integer order.
///
/// Below the turning region (`(x/2)^2 <= order + 1`) the alternating power
/// series has monotonically shrinking terms and is summed directly. Above
/// it the series cancels catastrophically, and the value is taken from
/// Miller's backward recurrence normalized by `J_0 + 2 sum J_2j = 1`.
pub fn bessel_j(order: u32, x: f64) -> Result<f64> {
    if order > BESSEL_MAX_ORDER || !(0.0..=BESSEL_MAX_ARG).contains(&x) || x.is_nan() {
        return Err(Error::envelope(format!(
            "bessel_j(order={order}, x={x}) requires order <= {BESSEL_MAX_ORDER}, 0 <= x <= {BESSEL_MAX_ARG}"
        )));
    }
    if x == 0.0 {
        return Ok(if order == 0 { 1.0 } else { 0.0 });
    }
    let half = x / 2.0;
    if half * half <= order as f64 + 1.0 {
        Ok(power_series(order, x))
    } else {
        Ok(miller(order, x))
    }
}

fn power_series(order: u32, x: f64) -> f64 {
    let half_sq = (x / 2.0) * (x / 2.0);
    let mut term = bessel_j_bound(order, x);
    let mut sum = term;
    let mut j = 0u32;
    while term != 0.0 {
        j += 1;
        term *= -half_sq / (j as f64 * (order + j) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

fn miller(order: u32, x: f64) -> f64 {
    let top = order.max(x.ceil() as u32) as f64;
    let mut start = (top + 20.0 + (40.0 * top).sqrt()) as u32;
    start += start % 2;
    let two_over_x = 2.0 / x;
    let (mut next, mut cur) = (0.0f64, 1.0f64);
    let mut norm = 0.0;
    let mut wanted = 0.0;
    for k in (1..=start).rev() {
        // cur = J_k (unnormalized), next = J_{k+1}
        let prev = k as f64 * two_over_x * cur - next;
        next = cur;
        cur = prev;
        let idx = k - 1;
        if idx == order {
            wanted = cur;
        }
        if idx != 0 && idx % 2 == 0 {
            norm += 2.0 * cur;
        }
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
            wanted *= 1e-250;
        }
    }
    norm += cur;
    wanted / norm
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Bessel's integral `J_n(x) = (1/pi) int_0^pi cos(n t - x sin t) dt`,
    /// trapezoid rule (spectrally accurate for this periodic integrand).
    fn integral_oracle(n: u32, x: f64) -> f64 {
        let steps = 4000;
        let h = PI / steps as f64;
        let f = |t: f64| (n as f64 * t - x * t.sin()).cos();
        let mut s = 0.5 * (f(0.0) + f(PI));
        for i in 1..steps {
            s += f(i as f64 * h);
        }
        s * h / PI
    }

    /// Plain 50-term series (no early exit).
    fn series50(n: u32, x: f64) -> f64 {
        let mut s = 0.0;
        for j in 0..50u32 {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let lt = (n + 2 * j) as f64 * (x / 2.0).ln() - ln_factorial(j) - ln_factorial(n + j);
            s += sign * lt.exp();
        }
        s
    }

    #[test]
    fn zero_argument() {
        assert_eq!(bessel_j(1, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn small_argument_against_series() {
        let v = bessel_j(11, 1.0).unwrap();
        let o = series50(11, 1.0);
        assert!(((v - o) / o).abs() < 1e-15, "{v} vs {o}");
    }

    #[test]
    fn bound_at_four_pi() {
        let x = 4.0 * PI;
        let v = bessel_j(11, x).unwrap();
        let bound = bessel_j_bound(11, x);
        assert!((bound - (2.0 * PI).powi(11) / 39916800.0).abs() < 1e-10 * bound);
        assert!(v.abs() <= bound);
    }

    #[test]
    fn against_integral_representation() {
        for &n in &[0u32, 1, 5, 11, 23, 59, 120] {
            for &x in &[0.3, 2.0, 7.5, 12.566370614359172, 17.77, 30.0, 39.7, 64.0, 99.0] {
                let v = bessel_j(n, x).unwrap();
                let o = integral_oracle(n, x);
                assert!((v - o).abs() < 1e-13, "J_{n}({x}) = {v}, oracle {o}");
            }
        }
    }

    #[test]
    fn majorant_holds() {
        for n in [1u32, 3, 11, 19, 59] {
            for i in 1..200 {
                let x = i as f64 * 0.5;
                assert!(bessel_j(n, x).unwrap().abs() <= bessel_j_bound(n, x) * (1.0 + 1e-12) + 1e-300);
            }
        }
    }

    #[test]
    fn rejects_outside_envelope() {
        assert!(bessel_j(201, 1.0).is_err());
        assert!(bessel_j(3, 100.5).is_err());
        assert!(bessel_j(3, -1.0).is_err());
    }
}
