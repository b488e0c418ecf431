//! Verification of the series corpus and its generic engines:
//!
//! - Kronecker symbol columns against square-count oracles and known tables.
//! - Theta descriptors: pentagonal-number and Gauss-square eta-quotient
//!   duals, the strange-series coefficient ladder, half-derivative folding.
//! - Lambert sums against divisor-count oracles; the two-sided weighted sum
//!   against directly assembled terms.
//! - Eta quotients: fractional exponents, partition counts, cancellation.
//! - Fine's series: the continued value of the first mock series, both
//!   functional equations, the false-theta specialization, pole rejection.
//! - Hecke-type double sums against their single-sum partners.
//! - Crank counts against partition counts, known small tables, and the
//!   alternating-triangular quotient identity.
//! - Corpus routes: printed expansions, product identities of the
//!   third-order family, partition statistics for the half-constant series,
//!   ideal-norm counts for the quadratic-field series, and tail sums against
//!   freshly built partial products.

use num_traits::{One, Signed, Zero};

use qlab_core::catalog::{
    bilateral_lambert, catalog_build, catalog_ids, crank_nonneg_series, eta_quotient, fine_f,
    from_exp_terms, half_derivative, hecke_double, kontsevich_tails, kronecker, lambert_sum,
    positive_crank_series, theta_build, theta_descriptor, CrankTable, MonomialParam,
    ThetaChar, ThetaDescriptor, ThetaKind,
};
use qlab_core::dsl::{parse, sum_terms};
use qlab_core::{exp, exp_int, rat, rat_int, CoreError, Exp, QSeries, Rat};

// ==== helpers ==============================================================

/// Integer truncated series starting at exponent 0.
fn ser(coeffs: &[i64], trunc: i64) -> QSeries {
    QSeries::from_int_coeffs(0, coeffs, trunc)
}

/// Integer coefficient of q^k, defaulting to 0.
fn coeff(s: &QSeries, k: i64) -> i64 {
    let c = s.coeff_int(k).unwrap_or_else(Rat::zero);
    assert!(c.denom().is_one(), "coefficient of q^{} is not integral: {}", k, c);
    let (_, digits) = c.numer().to_u64_digits();
    let mag = match digits.len() {
        0 => 0i64,
        1 => i64::try_from(digits[0]).expect("coefficient magnitude fits"),
        _ => panic!("coefficient of q^{} too large for the test", k),
    };
    if c.numer().is_negative() {
        -mag
    } else {
        mag
    }
}

/// Exact rational coefficient at a fractional exponent, defaulting to 0.
fn coeff_at(s: &QSeries, e: Exp) -> Rat {
    s.coeff(e).unwrap_or_else(Rat::zero)
}

/// (q^a; q^s)_inf truncated at the order.
fn poch_inf(coef: i64, base: i64, step: i64, order: i64) -> QSeries {
    QSeries::poch_infinite(&rat_int(coef), exp_int(base), exp_int(step), exp_int(order))
        .expect("positive-valuation product")
}

/// (q^a; q^s)_n truncated at the order.
fn poch_fin(coef: i64, base: i64, step: i64, n: u64, order: i64) -> QSeries {
    QSeries::poch_finite(&rat_int(coef), exp_int(base), exp_int(step), n, exp_int(order))
}

/// Partition numbers p(0..=n_max) by the Euler recurrence oracle.
fn partition_numbers(n_max: usize) -> Vec<i64> {
    let mut p = vec![0i64; n_max + 1];
    p[0] = 1;
    for n in 1..=n_max {
        let mut total = 0i64;
        let mut k = 1i64;
        loop {
            let g1 = (k * (3 * k - 1) / 2) as usize;
            if g1 > n {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            total += sign * p[n - g1];
            let g2 = (k * (3 * k + 1) / 2) as usize;
            if g2 <= n {
                total += sign * p[n - g2];
            }
            k += 1;
        }
        p[n] = total;
    }
    p
}

fn monomial_param(coef: i64, e: Exp) -> MonomialParam {
    MonomialParam::new(rat_int(coef), e)
}

// ==== kronecker symbol =====================================================

/// For odd primes the symbol must match the count of square roots mod p.
#[test]
fn kronecker_matches_square_counts_for_odd_primes() {
    for p in [3i64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        for d in -30..=30i64 {
            let expected = if d.rem_euclid(p) == 0 {
                0
            } else {
                let roots = (1..p).filter(|x| (x * x - d).rem_euclid(p) == 0).count();
                if roots > 0 {
                    1
                } else {
                    -1
                }
            };
            assert_eq!(
                kronecker(d, p),
                expected,
                "({}/{}) disagrees with the square-count oracle",
                d,
                p
            );
        }
    }
}

/// The (12/n) column: period 12 on odd n, zero on even n, even in n.
#[test]
fn kronecker_twelve_column() {
    assert_eq!(kronecker(12, 1), 1);
    assert_eq!(kronecker(12, 5), -1);
    assert_eq!(kronecker(12, 7), -1);
    assert_eq!(kronecker(12, 11), 1);
    assert_eq!(kronecker(12, 13), 1);
    for n in (1..60i64).step_by(2) {
        assert_eq!(kronecker(12, n), kronecker(12, n + 24));
        assert_eq!(kronecker(12, n), kronecker(12, -n), "(12/.) must be even");
        if n % 3 == 0 {
            assert_eq!(kronecker(12, n), 0);
        }
    }
    for n in (0..40i64).step_by(2) {
        assert_eq!(kronecker(12, n), 0);
    }
}

/// The (-12/n) column alternates on the units mod 12 and is odd in n.
#[test]
fn kronecker_minus_twelve_column() {
    assert_eq!(kronecker(-12, 1), 1);
    assert_eq!(kronecker(-12, 5), -1);
    assert_eq!(kronecker(-12, 7), 1);
    assert_eq!(kronecker(-12, 11), -1);
    for n in 1..40i64 {
        assert_eq!(kronecker(-12, -n), -kronecker(-12, n));
    }
}

/// Edge rows: n = 0, n = 1, the (d/2) table, and the (-4/n) column.
#[test]
fn kronecker_edge_rows() {
    assert_eq!(kronecker(1, 0), 1);
    assert_eq!(kronecker(-1, 0), 1);
    assert_eq!(kronecker(5, 0), 0);
    for d in -20..=20i64 {
        assert_eq!(kronecker(d, 1), 1);
    }
    for (d, v) in [(1i64, 1), (7, 1), (9, 1), (15, 1), (3, -1), (5, -1), (11, -1), (13, -1)] {
        assert_eq!(kronecker(d, 2), v, "({}/2)", d);
    }
    assert_eq!(kronecker(4, 2), 0);
    for n in (1..30i64).step_by(2) {
        let expected = if n % 4 == 1 { 1 } else { -1 };
        assert_eq!(kronecker(-4, n), expected);
    }
}

// ==== theta sums ===========================================================

/// The alternating pentagonal theta over Z is Euler's product (q)_inf.
#[test]
fn pentagonal_theta_equals_euler_product() {
    let theta = theta_build(&theta_descriptor("pent_full").unwrap(), 200);
    assert!(theta.agrees_with(&poch_inf(1, 1, 1, 200)));
}

/// The Kronecker-12 square theta is the eta product with its q^(1/24).
#[test]
fn eta_theta_equals_eta_product() {
    let theta = theta_build(&theta_descriptor("eta").unwrap(), 200);
    let product = eta_quotient(&[(1, 1)], 200).unwrap();
    assert!(theta.agrees_with(&product));
}

/// The weighted Kronecker-12 theta carries coefficients n (12/n):
/// 1, -5, -7, 11, 13 on the exponent ladder n^2/24.
#[test]
fn eta_weighted_strange_coefficients() {
    let s = theta_build(&theta_descriptor("eta_tilde").unwrap(), 9);
    for (n, c) in [(1i64, 1i64), (5, -5), (7, -7), (11, 11), (13, 13)] {
        assert_eq!(coeff_at(&s, exp(n * n, 24)), rat_int(c), "coefficient at {}^2/24", n);
    }
    assert!(coeff_at(&s, exp(2, 24)).is_zero());
    assert!(coeff_at(&s, exp(9, 24)).is_zero());
}

/// Gauss: sum over Z of (-1)^n q^(n^2) equals the eta quotient
/// with structure (q)_inf^2 / (q^2;q^2)_inf.
#[test]
fn alternating_square_theta_matches_eta_quotient() {
    let theta = theta_build(&theta_descriptor("theta_alt_sq_full").unwrap(), 200);
    let quotient = eta_quotient(&[(1, 2), (2, -1)], 200).unwrap();
    assert!(theta.agrees_with(&quotient));
    assert!(theta.agrees_with(&ser(&[1, -2, 0, 0, 2, 0, 0, 0, 0, -2], 10)));
}

/// The shifted square theta sum over Z of q^(2(n+1/4)^2) equals the dual
/// eta quotient (q^2;q^2)_inf^2 / (q)_inf shifted by q^(1/8).
#[test]
fn shifted_square_theta_matches_eta_quotient() {
    let theta = theta_build(&theta_descriptor("theta_shift8_full").unwrap(), 150);
    let quotient = eta_quotient(&[(2, 2), (1, -1)], 150).unwrap();
    assert!(theta.agrees_with(&quotient));
}

/// The full triangular theta folds onto twice the partial one, and the
/// partial one shifted by 1/8 enumerates the odd squares over 8.
#[test]
fn triangular_theta_folding() {
    let full = theta_build(&theta_descriptor("theta_tri_full").unwrap(), 120);
    let partial = theta_build(&theta_descriptor("theta_tri_partial").unwrap(), 120);
    assert!(full.agrees_with(&partial.scale(&rat_int(2))));
    let shifted = theta_build(&theta_descriptor("theta_shift8_full").unwrap(), 120);
    assert!(partial.shift(exp(1, 8)).truncate(exp_int(120)).agrees_with(&shifted));
}

/// The half-derivative of the alternating square theta is the weighted
/// one-sided sum of (-1)^n n q^(n^2).
#[test]
fn half_derivative_weights_the_square_theta() {
    let folded = half_derivative(&theta_descriptor("theta_alt_sq_full").unwrap()).unwrap();
    assert_eq!(folded, theta_descriptor("s_m1").unwrap());
    let s = theta_build(&folded, 80);
    let mut expected = Vec::new();
    let mut n = 1i64;
    while n * n < 80 {
        let sign = if n % 2 == 0 { 1 } else { -1 };
        expected.push((exp_int(n * n), rat_int(sign * n)));
        n += 1;
    }
    assert!(s.agrees_with(&from_exp_terms(&expected, exp_int(80))));
}

/// A one-sided unweighted pure-square descriptor gains the weight directly.
#[test]
fn half_derivative_on_unary_descriptor() {
    let d = half_derivative(&theta_descriptor("eta").unwrap()).unwrap();
    assert_eq!(d, theta_descriptor("eta_tilde").unwrap());
}

/// Shapes outside the operator's domain are rejected.
#[test]
fn half_derivative_rejects_non_unary_shapes() {
    let partial = theta_descriptor("theta_tri_partial").unwrap();
    assert!(matches!(half_derivative(&partial), Err(CoreError::NotUnary)));
    let weighted = theta_descriptor("s_m1").unwrap();
    assert!(matches!(half_derivative(&weighted), Err(CoreError::NotUnary)));
    let linear_term = theta_descriptor("pent_full").unwrap();
    assert!(matches!(half_derivative(&linear_term), Err(CoreError::NotUnary)));
    let odd_char = ThetaDescriptor {
        kind: ThetaKind::Full,
        character: ThetaChar::Kronecker(-12),
        exp_quad: (1, 0, 0, 24),
        weight_n: false,
    };
    assert!(matches!(half_derivative(&odd_char), Err(CoreError::NotUnary)));
}

/// Unknown theta names are reported, not guessed.
#[test]
fn theta_descriptor_rejects_unknown_ids() {
    assert!(matches!(
        theta_descriptor("no_such_theta"),
        Err(CoreError::UnknownSeries(_))
    ));
}

// ==== lambert sums =========================================================

/// sum q^n / (1 - q^n) counts divisors.
#[test]
fn lambert_counts_divisors() {
    let s = lambert_sum(&[1], 1, 1, -1, 60);
    for m in 1..60i64 {
        let d = (1..=m).filter(|k| m % k == 0).count() as i64;
        assert_eq!(coeff(&s, m), d, "divisor count of {}", m);
    }
    assert_eq!(coeff(&s, 4), 3);
    assert_eq!(coeff(&s, 6), 4);
}

/// sum q^n / (1 - q^(2n)) counts odd divisors.
#[test]
fn lambert_odd_divisor_layers() {
    let s = lambert_sum(&[1], 1, 2, -1, 60);
    for m in 1..60i64 {
        let d = (1..=m).filter(|k| m % k == 0 && (m / k) % 2 == 1).count() as i64;
        assert_eq!(coeff(&s, m), d, "odd-divisor count of {}", m);
    }
    assert_eq!(coeff(&s, 6), 2);
}

/// Periodic signs in the numerator and a plus-denominator both match brute
/// expansion.
#[test]
fn lambert_signed_variants_match_brute_force() {
    let order = 50i64;
    // sum (-1)^n q^n / (1 - q^n): coefficient is (even divisors) - (odd).
    let alt = lambert_sum(&[1, -1], 1, 1, -1, order);
    for m in 1..order {
        let expected: i64 = (1..=m)
            .filter(|k| m % k == 0)
            .map(|k| if k % 2 == 0 { 1 } else { -1 })
            .sum();
        assert_eq!(coeff(&alt, m), expected, "alternating sum at {}", m);
    }
    // sum q^n / (1 + q^n): brute double loop with sign (-1)^k per layer.
    let plus = lambert_sum(&[1], 1, 1, 1, order);
    for m in 1..order {
        let mut expected = 0i64;
        for n in 1..=m {
            let mut k = 0i64;
            loop {
                let e = n + n * k;
                if e > m {
                    break;
                }
                if e == m {
                    expected += if k % 2 == 0 { 1 } else { -1 };
                }
                k += 1;
            }
        }
        assert_eq!(coeff(&plus, m), expected, "plus-denominator sum at {}", m);
    }
}

/// The two-sided weighted sum matches terms assembled one by one through
/// ordinary series division.
#[test]
fn bilateral_weighted_sum_matches_directly_built_terms() {
    let order = 40i64;
    let bound = exp_int(order);
    let mut expected = QSeries::zero(bound);
    for n in -40..=40i64 {
        if n == 0 {
            continue;
        }
        let sign = if n.rem_euclid(2) == 0 { 1 } else { -1 };
        let e = n * (n - 1) / 2;
        let term = if n == 1 {
            // q^0 / (1 + q^0) = 1/2.
            QSeries::constant(rat(sign * n, 2), bound)
        } else if n > 1 {
            QSeries::monomial(rat_int(sign * n), exp_int(e), bound)
                .div_one_minus(&rat_int(-1), exp_int(n - 1))
                .unwrap()
        } else {
            // Negative index: multiply through by q^(1-n) first.
            QSeries::monomial(rat_int(sign * n), exp_int(e + 1 - n), bound)
                .div_one_minus(&rat_int(-1), exp_int(1 - n))
                .unwrap()
        };
        expected = expected.add(&term);
    }
    assert!(bilateral_lambert(order).agrees_with(&expected));
}

// ==== eta quotients ========================================================

/// The plain eta factor starts at q^(1/24) with pentagonal signs.
#[test]
fn eta_quotient_carries_fractional_shift() {
    let s = eta_quotient(&[(1, 1)], 10).unwrap();
    for (e24, c) in [(1i64, 1i64), (25, -1), (49, -1), (121, 1), (169, 1)] {
        assert_eq!(coeff_at(&s, exp(e24, 24)), rat_int(c), "coefficient at {}/24", e24);
    }
    assert!(coeff_at(&s, exp(2, 24)).is_zero());
}

/// 1/eta counts partitions on the ladder q^(n - 1/24).
#[test]
fn eta_inverse_counts_partitions() {
    let s = eta_quotient(&[(1, -1)], 30).unwrap();
    let p = partition_numbers(28);
    for (n, &pn) in p.iter().enumerate() {
        assert_eq!(
            coeff_at(&s, exp(24 * n as i64 - 1, 24)),
            rat_int(pn),
            "p({})",
            n
        );
    }
}

/// A quotient and its exact inverse cancel to 1.
#[test]
fn eta_quotient_inverse_pairs_cancel() {
    let s = eta_quotient(&[(1, 1), (2, 3), (1, -1), (2, -3)], 50).unwrap();
    assert!(s.agrees_with(&QSeries::one(exp_int(50))));
}

// ==== fine series ==========================================================

/// The continued value of F(1, -1; -1) is the first mock series of the
/// renormalization pair, with constant term 1/2.
#[test]
fn fine_continuation_reproduces_first_mock_series() {
    let one = monomial_param(1, Exp::zero());
    let neg_one = monomial_param(-1, Exp::zero());
    let s = fine_f(&one, &neg_one, &neg_one, 12).unwrap();
    assert_eq!(coeff_at(&s, Exp::zero()), rat(1, 2));
    let tail = [1i64, -2, 4, -5, 4, -4, 8, -10, 5, -4, 12];
    for (k, &c) in tail.iter().enumerate() {
        assert_eq!(coeff_at(&s, exp_int(k as i64 + 1)), rat_int(c), "q^{}", k + 1);
    }
}

/// Inside the direct region the argument recurrence
/// F(a, b; t) = (1-b)/(1-t) + (b - atq)/(1-t) F(a, b; tq) holds exactly.
#[test]
fn fine_direct_region_satisfies_argument_recurrence() {
    let order = 40i64;
    let bound = exp_int(order);
    let a = monomial_param(1, exp_int(1));
    let b = monomial_param(-1, exp_int(1));
    let t = monomial_param(1, exp_int(1));
    let tq = monomial_param(1, exp_int(2));
    let lhs = fine_f(&a, &b, &t, order).unwrap();
    let one = QSeries::one(bound);
    let inv_one_minus_t = one.mul_one_minus(&rat_int(1), exp_int(1)).invert().unwrap();
    let first = one
        .mul_one_minus(&rat_int(-1), exp_int(1))
        .mul(&inv_one_minus_t);
    let b_minus_atq = QSeries::monomial(rat_int(-1), exp_int(1), bound)
        .sub(&QSeries::monomial(rat_int(1), exp_int(3), bound));
    let rhs = first.add(
        &b_minus_atq
            .mul(&inv_one_minus_t)
            .mul(&fine_f(&a, &b, &tq, order).unwrap()),
    );
    assert!(lhs.agrees_with(&rhs));
}

/// The parameter-swap functional equation
/// F(a, b; t) = (1-b)/(1-t) F(at/b, t; b) holds on monomial parameters.
#[test]
fn fine_parameter_swap_identity() {
    let order = 50i64;
    let bound = exp_int(order);
    let lhs = fine_f(
        &monomial_param(1, exp_int(1)),
        &monomial_param(1, exp_int(2)),
        &monomial_param(1, exp_int(3)),
        order,
    )
    .unwrap();
    let swapped = fine_f(
        &monomial_param(1, exp_int(2)),
        &monomial_param(1, exp_int(3)),
        &monomial_param(1, exp_int(2)),
        order,
    )
    .unwrap();
    let factor = QSeries::one(bound)
        .mul_one_minus(&rat_int(1), exp_int(2))
        .div_one_minus(&rat_int(1), exp_int(3))
        .unwrap();
    assert!(lhs.agrees_with(&factor.mul(&swapped)));
}

/// (1 - a) F(a, -a; a) = 1 + 2 sum_{n>=1} (-1)^n a^(2n) q^(n^2) for a = q^m.
#[test]
fn fine_false_theta_specialization() {
    let order = 80i64;
    for m in [1i64, 2] {
        let a = monomial_param(1, exp_int(m));
        let neg_a = monomial_param(-1, exp_int(m));
        let f = fine_f(&a, &neg_a, &a, order).unwrap();
        let lhs = f.mul_one_minus(&rat_int(1), exp_int(m));
        let mut terms = vec![(Exp::zero(), rat_int(1))];
        let mut n = 1i64;
        while n * n + 2 * m * n < order {
            let sign = if n % 2 == 0 { 2 } else { -2 };
            terms.push((exp_int(n * n + 2 * m * n), rat_int(sign)));
            n += 1;
        }
        assert!(
            lhs.agrees_with(&from_exp_terms(&terms, exp_int(order))),
            "false-theta specialization at m = {}",
            m
        );
    }
}

/// Poles and out-of-fragment parameters are rejected; t = 0 gives 1.
#[test]
fn fine_rejects_poles_and_deep_parameters() {
    let zero = MonomialParam::zero();
    let one = monomial_param(1, Exp::zero());
    let q = monomial_param(1, exp_int(1));
    assert!(matches!(
        fine_f(&zero, &zero, &one, 10),
        Err(CoreError::Semantics(_))
    ));
    let b_deep = monomial_param(1, exp_int(-1));
    assert!(matches!(
        fine_f(&zero, &b_deep, &q, 10),
        Err(CoreError::Semantics(_))
    ));
    let a_deep = monomial_param(2, exp_int(-2));
    assert!(matches!(
        fine_f(&a_deep, &zero, &q, 10),
        Err(CoreError::Semantics(_))
    ));
    let t_deep = monomial_param(1, exp_int(-1));
    assert!(matches!(
        fine_f(&zero, &zero, &t_deep, 10),
        Err(CoreError::ZeroDenominator)
    ));
    assert!(fine_f(&q, &q, &zero, 10)
        .unwrap()
        .agrees_with(&QSeries::one(exp_int(10))));
}

/// The two-term route 2 - F(0, -1; -q) rebuilds the double-Pochhammer
/// square-exponent series.
#[test]
fn curious_fine_route_rebuilds_square_series() {
    let order = 60i64;
    let s = fine_f(
        &MonomialParam::zero(),
        &monomial_param(-1, Exp::zero()),
        &monomial_param(-1, exp_int(1)),
        order,
    )
    .unwrap();
    let route = QSeries::constant(rat_int(2), exp_int(order)).sub(&s);
    let f = catalog_build("f", order).unwrap();
    assert!(route.agrees_with(&f));
}

// ==== the four hypergeometric theta companions =============================

/// Each of the four two-variable-free series equals its theta expansion:
/// the pentagonal product, half the alternating squares, the triangular
/// numbers, and the signed square/double-square mixture.
#[test]
fn results_series_equal_their_thetas() {
    let f1 = catalog_build("F1", 150).unwrap();
    assert!(f1.agrees_with(&poch_inf(1, 1, 1, 150)));

    let f2 = catalog_build("F2", 100).unwrap();
    let alt_sq = theta_build(&theta_descriptor("theta_alt_sq_full").unwrap(), 100);
    assert!(f2.agrees_with(&alt_sq.scale(&rat(1, 2))));

    let f3 = catalog_build("F3", 150).unwrap();
    let tri = theta_build(&theta_descriptor("theta_tri_partial").unwrap(), 150);
    assert!(f3.agrees_with(&tri));

    let f4 = catalog_build("F4", 100).unwrap();
    let two_sq = theta_build(&theta_descriptor("theta_2sq_full").unwrap(), 100);
    let mixed = two_sq.sub(&theta_build(&theta_descriptor("theta_alt_sq_full").unwrap(), 100));
    assert!(f4.agrees_with(&mixed.scale(&rat(1, 2))));
    assert!(f4.agrees_with(&ser(&[0, 1, 1, 0, -1, 0, 0, 0, 1, 1], 10)));
}

// ==== hecke-type double sums ===============================================

/// The false-theta right side matches direct summation of
/// sum (-1)^n a^(2n) q^(n(n+1)/2) / (-aq; q)_n for a = q, q^2, -q.
#[test]
fn false_theta_family_matches_summed_left_side() {
    let order = 80i64;
    for (text, coef, m) in [
        ("(-1)^n * q^((n^2+5n)/2) / poch(-q^2;q)_n", 1i64, 1i64),
        ("(-1)^n * q^((n^2+9n)/2) / poch(-q^3;q)_n", 1, 2),
        ("(-1)^n * q^((n^2+5n)/2) / poch(q^2;q)_n", -1, 1),
    ] {
        let lhs = sum_terms(&parse(text).unwrap(), order).unwrap();
        let a = monomial_param(coef, exp_int(m));
        let rhs = hecke_double("ramanujan-false-rhs", Some(&a), order).unwrap();
        assert!(
            lhs.agrees_with(&rhs),
            "false-theta identity at a = {}q^{}",
            coef,
            m
        );
    }
}

/// The alternating double sum equals (q)_inf times the odd-Pochhammer
/// square-exponent series.
#[test]
fn hecke_psi_route_matches_catalog_psi() {
    let order = 100i64;
    let hecke = hecke_double("psi-hecke", None, order).unwrap();
    let psi = catalog_build("psi", order).unwrap();
    assert!(hecke.agrees_with(&psi.mul(&poch_inf(1, 1, 1, order))));
}

/// The unsigned double sum equals (q)_inf times the first third-order
/// companion series.
#[test]
fn hecke_unsigned_route_matches_companion() {
    let order = 100i64;
    let hecke = hecke_double("a-of-q-hecke", None, order).unwrap();
    let a = catalog_build("andrews_a", order).unwrap();
    assert!(hecke.agrees_with(&a.mul(&poch_inf(1, 1, 1, order))));
}

/// Leading terms of the triple-weight double sum, by hand expansion.
#[test]
fn weighted_double_sum_leading_terms() {
    let s = hecke_double("l6-hecke", None, 10).unwrap();
    assert!(s.agrees_with(&ser(&[1, 0, 3, -1, 0, 5, 0, -3, 1, 7], 10)));
}

/// Unknown families and a missing parameter are rejected.
#[test]
fn hecke_rejects_unknown_and_missing_param() {
    assert!(matches!(
        hecke_double("no-such-family", None, 10),
        Err(CoreError::UnknownFamily(_))
    ));
    assert!(matches!(
        hecke_double("ramanujan-false-rhs", None, 10),
        Err(CoreError::Semantics(_))
    ));
}

// ==== crank counts =========================================================

/// Row sums of the crank table are the partition numbers.
#[test]
fn crank_row_sums_count_partitions() {
    let table = CrankTable::new(30);
    let p = partition_numbers(30);
    for n in 0..=30usize {
        assert_eq!(table.row_sum(n), i128::from(p[n]), "row sum at n = {}", n);
    }
}

/// Small-n values, the signed n = 1 convention, and the m-symmetry.
#[test]
fn crank_small_values_and_symmetry() {
    let table = CrankTable::new(25);
    assert_eq!(table.m(0, 0), 1);
    assert_eq!(table.m(0, 1), -1);
    assert_eq!(table.m(1, 1), 1);
    assert_eq!(table.m(-1, 1), 1);
    assert_eq!(table.m(2, 1), 0);
    // n = 4: one partition at each crank in {-4, -2, 0, 2, 4}.
    for m in -4..=4i64 {
        let expected = if m % 2 == 0 { 1 } else { 0 };
        assert_eq!(table.m(m, 4), expected, "M({}, 4)", m);
    }
    for n in 0..=25usize {
        for m in 0..=25i64 {
            assert_eq!(table.m(m, n), table.m(-m, n), "symmetry at ({}, {})", m, n);
        }
    }
}

/// The nonnegative-crank series equals the alternating triangular theta
/// divided by (q)_inf.
#[test]
fn nonnegative_crank_matches_alternating_triangular_route() {
    let order = 100i64;
    let lhs = crank_nonneg_series(order);
    let theta = theta_build(&theta_descriptor("theta_tri_alt_partial").unwrap(), order);
    let rhs = theta.div(&poch_inf(1, 1, 1, order)).unwrap();
    assert!(lhs.agrees_with(&rhs));
}

/// Dropping the central column m = 0 from the nonnegative sum leaves the
/// positive sum.
#[test]
fn positive_and_nonnegative_crank_differ_by_central_column() {
    let order = 40i64;
    let pos = positive_crank_series(order);
    let nonneg = crank_nonneg_series(order);
    let table = CrankTable::new(39);
    for n in 0..40usize {
        let diff = i128::from(coeff(&nonneg, n as i64) - coeff(&pos, n as i64));
        assert_eq!(diff, table.m(0, n), "central column at n = {}", n);
    }
}

/// The square-plus-linear-exponent corpus series counts partitions of
/// nonnegative crank.
#[test]
fn cr_series_counts_nonnegative_cranks() {
    let order = 60i64;
    let cr = catalog_build("cr", order).unwrap();
    assert!(cr.agrees_with(&crank_nonneg_series(order)));
}

// ==== corpus routes ========================================================

/// The doubled constant-1/2 series equals twice the continued Fine value,
/// with the printed leading coefficients.
#[test]
fn doubled_half_series_equals_twice_first_mock() {
    let order = 80i64;
    let fbar = catalog_build("fbar", order).unwrap();
    let m1 = catalog_build("M1", order).unwrap();
    assert!(fbar.agrees_with(&m1.scale(&rat_int(2))));
    assert!(fbar.agrees_with(&ser(&[1, 2, -4, 8, -10, 8, -8, 16, -20, 10, -8, 24], 12)));
}

/// The second mock series has the printed expansion through q^12.
#[test]
fn m_two_printed_expansion() {
    let s = catalog_build("M2", 13).unwrap();
    assert!(s.agrees_with(&ser(&[0, 1, 2, 3, 3, 4, 5, 4, 5, 7, 5, 6, 8], 13)));
}

/// The odd-Pochhammer pole series equals the second mock series.
#[test]
fn pole_series_equals_second_mock() {
    let order = 120i64;
    let no = catalog_build("No011", order).unwrap();
    let m2 = catalog_build("M2", order).unwrap();
    assert!(no.agrees_with(&m2));
}

/// Product identities of the third-order family: d is the odd-modulus
/// quotient, b and c split it through the sign-flipped partner, and
/// b - d = -c.
#[test]
fn product_identities_for_the_third_order_family() {
    let order = 120i64;
    let x = poch_inf(-1, 1, 2, order)
        .div(&poch_inf(1, 1, 2, order))
        .unwrap();
    let d = catalog_build("andrews_d", order).unwrap();
    assert!(d.agrees_with(&x));
    // psi(-q) = sum (-1)^n q^(n^2) / (-q; q^2)_n.
    let psi_neg = sum_terms(
        &parse("(-1)^n * q^(n^2) / poch(-q;q^2)_n").unwrap(),
        order,
    )
    .unwrap();
    let b = catalog_build("andrews_b", order).unwrap();
    assert!(b.agrees_with(&x.mul(&psi_neg)));
    let c = catalog_build("andrews_c", order).unwrap();
    let one = QSeries::one(exp_int(order));
    assert!(c.agrees_with(&x.mul(&one.sub(&psi_neg))));
    assert!(b.sub(&d).agrees_with(&c.neg()));
}

/// The half-constant series, less its half, times (q)_inf is the
/// alternating tail sum, with the printed leading terms.
#[test]
fn half_constant_series_matches_alternating_tail_quotient() {
    let order = 60i64;
    let g1 = catalog_build("G1", order).unwrap();
    let pinf = poch_inf(1, 1, 1, order);
    let mut tails = QSeries::zero(exp_int(order));
    for n in 0..=(order as u64 + 2) {
        tails = tails.add(&poch_fin(1, 1, 1, n, order).sub(&pinf).scale(&rat_int(
            if n % 2 == 0 { 1 } else { -1 },
        )));
    }
    let centered = g1.sub(&QSeries::constant(rat(1, 2), exp_int(order)));
    assert!(centered.mul(&pinf).agrees_with(&tails));
    let printed = ser(&[0, 1, 0, 1, -1, 0, 0, 0, -1, 0, 1, 0, 0, -1, 1, 1], 16);
    assert!(tails.truncate(exp_int(16)).agrees_with(&printed));
}

/// Coefficients of the half-constant series count partitions whose least
/// part is odd.
#[test]
fn half_constant_series_counts_odd_least_parts() {
    let order = 40i64;
    let g1 = catalog_build("G1", order).unwrap();
    // q_ge[m][j]: partitions of m with all parts >= j.
    let n = order as usize;
    let mut q_ge = vec![vec![0i64; n + 2]; n + 1];
    for j in (1..=n + 1).rev() {
        for m in 0..=n {
            q_ge[m][j] = if m == 0 {
                1
            } else {
                let skip = if j <= n { q_ge[m][j + 1] } else { 0 };
                let take = if j <= m { q_ge[m - j][j] } else { 0 };
                skip + take
            };
        }
    }
    for m in 1..n {
        let lpo: i64 = (1..=m)
            .step_by(2)
            .map(|j| q_ge[m - j][j])
            .sum();
        assert_eq!(coeff_at(&g1, exp_int(m as i64)), rat_int(lpo), "count at {}", m);
    }
}

/// The quadratic-field series counts ideals by norm: its q^n coefficient is
/// -(-1)^n r(n) with r multiplicative, r(2^a) = 1, r(p^a) = a + 1 for
/// p = +-1 mod 8, and r(p^a) = 1 or 0 for p = +-3 mod 8 as a is even or odd.
#[test]
fn quadratic_field_series_counts_ideal_norms() {
    let order = 60i64;
    let h = catalog_build("h", order).unwrap();
    let r = |mut n: i64| -> i64 {
        let mut total = 1i64;
        let mut p = 2i64;
        while p * p <= n {
            if n % p == 0 {
                let mut a = 0i64;
                while n % p == 0 {
                    n /= p;
                    a += 1;
                }
                total *= match p.rem_euclid(8) {
                    2 => 1,
                    1 | 7 => a + 1,
                    _ => {
                        if a % 2 == 0 {
                            1
                        } else {
                            0
                        }
                    }
                };
            }
            p += 1;
        }
        if n > 1 {
            total *= match n.rem_euclid(8) {
                2 => 1,
                1 | 7 => 2,
                _ => 0,
            };
        }
        total
    };
    for m in 1..order {
        let sign = if m % 2 == 0 { -1 } else { 1 };
        assert_eq!(coeff(&h, m), sign * r(m), "ideal count at norm {}", m);
    }
}

/// The tail sum of the partial products matches freshly built differences.
#[test]
fn partial_product_tails_match_fresh_differences() {
    let order = 60i64;
    let pinf = poch_inf(1, 1, 1, order);
    let mut expected = QSeries::zero(exp_int(order));
    for n in 0..=(order as u64 + 2) {
        expected = expected.add(&poch_fin(1, 1, 1, n, order).sub(&pinf));
    }
    let s = kontsevich_tails(order).unwrap();
    assert!(s.agrees_with(&expected));
    // Leading terms from the hand expansion of the first four differences.
    assert_eq!(coeff(&s, 0), 0);
    assert_eq!(coeff(&s, 1), 1);
    assert_eq!(coeff(&s, 2), 2);
    assert_eq!(coeff(&s, 3), 1);
    assert_eq!(coeff(&s, 4), 1);
}

/// Every registered corpus name builds; unknown names are rejected; the
/// doubled odd-square series keeps its factor 2.
#[test]
fn catalog_enumerates_and_rejects() {
    for id in catalog_ids() {
        let s = catalog_build(id, 12).unwrap_or_else(|e| panic!("{} failed: {:?}", id, e));
        assert!(s.trunc_exp() >= exp_int(12), "{} under-truncated", id);
    }
    assert!(matches!(
        catalog_build("no_such_series", 10),
        Err(CoreError::UnknownSeries(_))
    ));
    let star = catalog_build("sigma_star", 10).unwrap();
    assert_eq!(coeff(&star, 1), -2);
    assert_eq!(coeff(&star, 2), -2);
}
