use super::*;

/// `q prod (1 - q^n)^24` in plain integer arithmetic.
fn delta_product(n: usize) -> Vec<BigInt> {
    let mut c = vec![BigInt::zero(); n + 1];
    c[1] = BigInt::one();
    for m in 1..=n {
        for _ in 0..24 {
            for i in (m..=n).rev() {
                let t = c[i - m].clone();
                c[i] -= t;
            }
        }
    }
    c
}

#[test]
fn eisenstein_examples() {
    let e4 = eisenstein(4, 10).unwrap();
    let e6 = eisenstein(6, 10).unwrap();
    assert_eq!(*e4.coeff(0), rat(1));
    assert_eq!(*e6.coeff(0), rat(1));
    assert_eq!(*e4.coeff(1), rat(240));
    assert_eq!(*e6.coeff(1), rat(-504));
    assert_eq!(*e4.coeff(2), rat(240 * 9));
    assert!(eisenstein(8, 10).is_err());
    assert!(eisenstein(4, 500).is_err());
}

#[test]
fn delta_matches_product_expansion() {
    let d = delta(40).unwrap();
    let oracle = delta_product(40);
    for (n, c) in oracle.iter().enumerate() {
        assert_eq!(*d.coeff(n), BigRational::from_integer(c.clone()), "n = {n}");
    }
    let basis = miller_basis(12, 40).unwrap();
    assert_eq!(basis.len(), 1);
    assert_eq!(basis[0], d);
    assert_eq!(*d.coeff(2), rat(-24));
    assert_eq!(*d.coeff(3), rat(252));
}

#[test]
fn basis_dimensions() {
    assert!(miller_basis(10, 20).unwrap().is_empty());
    assert!(miller_basis(14, 20).unwrap().is_empty());
    let b = miller_basis(24, 20).unwrap();
    assert_eq!(b.len(), 2);
    assert_eq!(b[0].order(), Some(1));
    assert_eq!(b[1].order(), Some(2));
    assert!(b[0].coeff(2).is_zero() && b[1].coeff(1).is_zero());
    for (k, d) in [(12, 1), (16, 1), (24, 2), (26, 1), (36, 3), (38, 2), (48, 4), (60, 5)] {
        assert_eq!(cusp_dimension(k), d);
        assert_eq!(miller_basis(k, 12).unwrap().len(), d);
    }
}

#[test]
fn t2_char_poly_at_weight_24() {
    let basis = miller_basis(24, 10).unwrap();
    let p = char_poly(&hecke_matrix(&basis, 2).unwrap());
    // Eigenvalues 540 +- 12 sqrt(144169).
    let expect = Poly(vec![rat(540 * 540 - 144 * 144169), rat(-1080), rat(1)]);
    assert_eq!(p, expect);
}

#[test]
fn hecke_operators_commute_exactly() {
    for k in [24, 36, 48, 60] {
        let basis = miller_basis(k, 30).unwrap();
        let t2 = hecke_matrix(&basis, 2).unwrap();
        let t3 = hecke_matrix(&basis, 3).unwrap();
        assert_eq!(mat_mul(&t2, &t3), mat_mul(&t3, &t2), "k = {k}");
    }
}

#[test]
fn ramanujan_eigenvalue() {
    let forms = hecke_eigensystem(12, 7).unwrap();
    assert_eq!(forms.len(), 1);
    let f = &forms[0];
    assert!((f.lambda_p(2).unwrap() + 24.0 / 2f64.powf(5.5)).abs() < 1e-15);
    assert!((f.lambda_p(2).unwrap() + 0.5303300859).abs() < 1e-10);
    assert_eq!(f.lambda_n(1), Some(1.0));
}

#[test]
fn recursion_and_multiplicativity() {
    for k in (12..=60).step_by(2) {
        for f in hecke_eigensystem(k, 50).unwrap() {
            assert_eq!(f.lambda_n(1), Some(1.0));
            for p in [2u64, 3, 5, 7] {
                let l = f.lambda_p(p).unwrap();
                let pp = (p * p) as usize;
                assert!((f.lambda_n(pp).unwrap() - (l * l - 1.0)).abs() < 1e-10, "k={k} p={p}");
                assert!((f.lambda_n(pp).unwrap() - chebyshev_u(2, l)).abs() < 1e-10);
            }
            for (m, n) in [(2usize, 3usize), (2, 5), (3, 5), (4, 3), (7, 8), (5, 9)] {
                let lhs = f.lambda_n(m * n).unwrap();
                assert!((lhs - f.lambda_n(m).unwrap() * f.lambda_n(n).unwrap()).abs() < 1e-10, "k={k} {m}*{n}");
            }
            for (_, l) in &f.lambda {
                assert!(l.abs() <= 2.0, "k={k}: {l}");
            }
        }
    }
}

#[test]
fn chebyshev_examples() {
    assert_eq!(chebyshev_u(0, 0.7), 1.0);
    assert_eq!(chebyshev_u(1, 0.5), 0.5);
    assert_eq!(chebyshev_u(2, 2.0), 3.0);
    for n in 0..12u32 {
        let theta = 0.37f64;
        let oracle = ((n as f64 + 1.0) * theta).sin() / theta.sin();
        assert!((chebyshev_u(n, 2.0 * theta.cos()) - oracle).abs() < 1e-12);
    }
}

#[test]
fn weights_at_weight_12() {
    let sd = estimate_weights(12, 1, 7).unwrap();
    assert_eq!(sd.weights.len(), 1);
    assert!((sd.weights[0] - petersson_target(1, 12).unwrap()).abs() < 1e-14);
    assert!(sd.residual < 1e-14);
    let sd = estimate_weights(12, 6, 7).unwrap();
    assert!(sd.residual < 1e-8);
    assert_eq!(sd.weyl_sum(&[]).unwrap(), sd.weight_sum());
    assert_eq!(sd.weyl_sum(&[(2, 0), (3, 0)]).unwrap(), sd.weight_sum());
    assert!(sd.weyl_sum(&[(4, 1)]).is_err());
}

#[test]
fn weights_positive_and_fit() {
    for k in [24, 36, 48] {
        let sd = estimate_weights(k, 12, 13).unwrap();
        assert!(sd.weights.iter().all(|w| *w > 0.0));
        assert!(sd.residual < 1e-8, "k={k} residual {}", sd.residual);
    }
}

#[test]
fn eigen_csv_header() {
    let sd = estimate_weights(12, 2, 3).unwrap();
    let csv = eigen_table_csv(&[sd]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "k,form,p,lambda,omega");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("12,0,2,"));
}
