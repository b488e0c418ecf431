//! Renormalized tail sums: for a summand family H_n whose q -> q^-1
//! transform converges termwise, the series sum_n (H_n(q^-1) - H_inf(q^-1)),
//! and its registered splitting into a partial-theta part (the shadow) and a
//! product-times-divisor-sum part (the ghost).
//!
//! * [`summand`]: defining summands H_n(q) for the series ids this module
//!   can renormalize, in the same text language as [`crate::dsl`].
//! * [`tail_sum`] / [`tail_sum_direct`]: stabilized accumulation of
//!   H_n(q^-1) - H_inf(q^-1), with or without the internal q -> q^-1 step.
//! * [`tail_sum_alternating`] / [`tail_sum_direct_signed`]: the same sums
//!   with an extra (-1)^n on each difference, for families whose inverted
//!   terms only converge after sign-averaging.
//! * [`renormalize`] / [`renormalize_alt`]: registered shadow/ghost splits;
//!   the returned residual is tail - shadow - ghost and vanishes exactly
//!   when the registered split is an identity.
//! * [`chapman_rhs`]: weighted-product form of a telescoped tail sum.
//! * [`ajo_one_rhs`] / [`ajo_two_rhs`]: closed forms for tails of
//!   Pochhammer quotients in two and three monomial parameters.
//! * [`builtin`]: named auxiliary series (harmonic-weighted sums, weighted
//!   tail products, a bilateral sum) outside the plain summand language.

use alloc::string::String;

use num_traits::{One, Zero};

use crate::catalog::{self, MonomialParam};
use crate::dsl::{self, LimitResult, SignMode, TermDescriptor, TermEvaluator};
use crate::error::CoreError;
use crate::series::{Exp, QSeries, Rat};
use crate::{exp_int, rat, rat_int};

// ---- stabilized accumulation ----------------------------------------------

/// Consecutive all-zero differences required before a tail sum is considered
/// stable.
const STABLE_RUN: usize = 8;

fn iteration_cap(order: i64) -> i64 {
    4 * order.max(1) + 64
}

/// Accumulates term - limit over n = 0, 1, ... until the differences stay
/// zero for [`STABLE_RUN`] consecutive indices. With `signed` set, the n-th
/// difference is weighted by (-1)^n.
fn accumulate_tails(
    d: &TermDescriptor,
    lim: &QSeries,
    signed: bool,
    order: i64,
) -> Result<QSeries, CoreError> {
    let mut ev = TermEvaluator::new(d, order)?;
    let mut acc = QSeries::zero(exp_int(order));
    let cap = iteration_cap(order);
    let mut quiet = 0usize;
    while ev.n() <= cap {
        let mut diff = ev.term()?.sub(lim);
        if signed && ev.n() % 2 == 1 {
            diff = diff.neg();
        }
        if diff.is_zero() {
            quiet += 1;
            if quiet >= STABLE_RUN {
                return Ok(acc);
            }
        } else {
            quiet = 0;
            acc = acc.add(&diff);
        }
        ev.advance()?;
    }
    Err(CoreError::NonStabilizing)
}

fn expect_limit(d: &TermDescriptor, order: i64) -> Result<QSeries, CoreError> {
    match dsl::limit_at_infinity(d, order)? {
        LimitResult::Series(s) => Ok(s),
        LimitResult::NoLimit => Err(CoreError::NoLimit),
    }
}

/// sum_n (H_n(q^-1) - H_inf(q^-1)) for the summand family H_n described by
/// `d` in the |q| < 1 regime. The q -> q^-1 transform is applied internally.
pub fn tail_sum(d: &TermDescriptor, order: i64) -> Result<QSeries, CoreError> {
    tail_sum_direct(&dsl::q_inverse(d)?, order)
}

/// sum_n (H_n - H_inf) for a family already written in its convergent form.
pub fn tail_sum_direct(d: &TermDescriptor, order: i64) -> Result<QSeries, CoreError> {
    let lim = expect_limit(d, order)?;
    accumulate_tails(d, &lim, false, order)
}

/// sum_n (-1)^n (|H|_n(q^-1) - |H|_inf(q^-1)) where |H|_n is the summand
/// with any alternating sign stripped: the sign-averaged tail sum used for
/// families whose inverted terms oscillate.
pub fn tail_sum_alternating(d: &TermDescriptor, order: i64) -> Result<QSeries, CoreError> {
    tail_sum_direct_signed(&dsl::q_inverse(d)?, order)
}

/// Direct-form counterpart of [`tail_sum_alternating`].
pub fn tail_sum_direct_signed(d: &TermDescriptor, order: i64) -> Result<QSeries, CoreError> {
    let mut unsigned = d.clone();
    unsigned.sign_mode = SignMode::Plus;
    let lim = expect_limit(&unsigned, order)?;
    accumulate_tails(&unsigned, &lim, true, order)
}

// ---- summand registry ------------------------------------------------------

/// Defining summand H_n(q) for a renormalizable series id.
pub fn summand(id: &str) -> Result<TermDescriptor, CoreError> {
    let text = match id {
        "f" => "q^(n^2) / poch(-q;q)_n^2",
        "M1" => "(-1)^n * poch(q;q)_n / poch(-q;q)_n",
        "M2" => "q^(n+1) * poch(q^2;q^2)_n / poch(q;q^2)_(n+1)",
        "P1" => "q^(n) / poch(q;q)_n",
        "P2" => "q^(n^2) / poch(q;q)_n^2",
        "F1" => "(-1)^n * q^((n^2+n)/2) / poch(q;q)_n",
        "F2" => "(-1)^n * poch(-q;q)_n / poch(q;q)_n",
        "F3" => "q^(n) * poch(q;q^2)_n / poch(q^2;q^2)_n",
        "F4" => "(-1)^n * q^(2n+1) * poch(-q;q)_n / poch(q;q)_n / (1-q^(2n+1))",
        "sigma" => "q^((n^2+n)/2) / poch(-q;q)_n",
        "sigma_star" => "-2 * (-1)^n * q^(n^2+2n+1) / poch(q;q^2)_(n+1)",
        "W" => "(-1)^n * q^(n) * poch(q;q^2)_n / poch(-q^2;q^2)_n",
        "psi" => "q^(n^2) / poch(q;q^2)_n",
        "L6" => "(-1)^n * q^(n) * poch(q;q)_n^2 / poch(q;q^2)_(n+1)",
        "cr" => "q^(n^2+n) / poch(q;q)_n^2",
        "andrews_a" => "q^(n^2) * poch(-q;q)_n^2 / poch(q;q)_(2n)",
        "andrews_b" => "q^(n^2) * poch(-q^2;q^2)_n / poch(q;q)_(2n)",
        "andrews_c" => "q^(n^2+2n+1) * poch(-q^2;q^2)_n / poch(q;q)_(2n+1)",
        "andrews_d" => "q^(n^2) * poch(-q^2;q^2)_n / poch(q;q)_(2n+1)",
        _ => return Err(CoreError::UnknownSeries(String::from(id))),
    };
    dsl::parse(text)
}

// ---- registered decompositions ---------------------------------------------

/// One renormalization: the tail sum and its registered split. The residual
/// is tail - shadow - ghost; a zero residual certifies the split to the
/// working order.
#[derive(Clone, Debug)]
pub struct RenormResult {
    pub tail: QSeries,
    pub shadow: QSeries,
    pub ghost: QSeries,
    pub residual: QSeries,
}

fn theta(id: &str, order: i64) -> Result<QSeries, CoreError> {
    Ok(catalog::theta_build(&catalog::theta_descriptor(id)?, order))
}

fn pinf(c: i64, e: i64, step: i64, order: i64) -> Result<QSeries, CoreError> {
    QSeries::poch_infinite(&rat_int(c), exp_int(e), exp_int(step), exp_int(order))
}

/// Shadow and ghost for a registered id.
fn decomposition(id: &str, order: i64) -> Result<(QSeries, QSeries), CoreError> {
    let bound = exp_int(order);
    match id {
        "f" => {
            let shadow = theta("sf", order)?.scale(&rat_int(2));
            let ghost = theta("theta_tri_alt_partial", order)?
                .neg()
                .div(&pinf(-1, 1, 1, order)?.pow(2)?)?;
            Ok((shadow, ghost))
        }
        "M1" => {
            let shadow = theta("s_m1", order)?.scale(&rat_int(-4));
            let ghost = pinf(1, 1, 1, order)?
                .div(&pinf(-1, 1, 1, order)?)?
                .mul(&catalog::lambert_sum(&[1], 1, 2, -1, order))
                .scale(&rat_int(-2));
            Ok((shadow, ghost))
        }
        "M2" => {
            let quarter = QSeries::constant(rat(1, 4), bound);
            let shadow = theta("s_m2_n", order)?
                .add(&theta("theta_tri_partial", order)?.scale(&rat(1, 4)));
            let ghost = pinf(1, 2, 2, order)?
                .div(&pinf(1, 1, 2, order)?)?
                .mul(&catalog::lambert_sum(&[1, -1], 1, 1, -1, order).sub(&quarter));
            Ok((shadow, ghost))
        }
        "P1" => Ok((QSeries::zero(bound), QSeries::zero(bound))),
        "P2" => {
            let ghost =
                theta("theta_tri_alt_partial", order)?.div(&pinf(1, 1, 1, order)?.pow(2)?)?;
            Ok((QSeries::zero(bound), ghost))
        }
        "F1" => {
            let ghost = catalog::lambert_sum(&[1], 1, 1, -1, order)
                .div(&pinf(1, 1, 1, order)?)?
                .neg();
            Ok((QSeries::zero(bound), ghost))
        }
        "F2" => {
            let ghost = pinf(-1, 1, 1, order)?
                .div(&pinf(1, 1, 1, order)?)?
                .mul(&catalog::lambert_sum(&[1], 1, 2, -1, order))
                .scale(&rat_int(-2));
            Ok((QSeries::zero(bound), ghost))
        }
        "F3" => {
            let ghost = pinf(1, 1, 2, order)?
                .div(&pinf(1, 2, 2, order)?)?
                .mul(&catalog::lambert_sum(&[1, -1], 1, 1, -1, order))
                .neg();
            Ok((QSeries::zero(bound), ghost))
        }
        "F4" => {
            let inner = catalog::lambert_sum(&[1], 1, 2, -1, order)
                .scale(&rat_int(2))
                .sub(&catalog::catalog_build("h", order)?);
            let ghost = pinf(-1, 1, 1, order)?
                .div(&pinf(1, 1, 1, order)?)?
                .mul(&inner);
            Ok((QSeries::zero(bound), ghost))
        }
        _ => Err(CoreError::UnregisteredDecomposition(String::from(id))),
    }
}

/// Tail sum of the id's summand family together with its registered
/// shadow/ghost split.
pub fn renormalize(id: &str, order: i64) -> Result<RenormResult, CoreError> {
    let tail = tail_sum(&summand(id)?, order)?;
    let (shadow, ghost) = decomposition(id, order)?;
    let residual = tail.sub(&shadow).sub(&ghost);
    Ok(RenormResult {
        tail,
        shadow,
        ghost,
        residual,
    })
}

/// Variant split for ids whose shadow is only determined up to a partial
/// theta multiple: the weight-one triangular layer moves between shadow and
/// ghost. Registered for "M2", where any shadow
/// sum (n + alpha) q^(n(n+1)/2) is admissible.
pub fn renormalize_alt(id: &str, alpha: &Rat, order: i64) -> Result<RenormResult, CoreError> {
    match id {
        "M2" => {
            let tail = tail_sum(&summand("M2")?, order)?;
            let tri = theta("theta_tri_partial", order)?;
            let shadow = theta("s_m2_n", order)?.add(&tri.scale(alpha));
            let (_, base_ghost) = decomposition("M2", order)?;
            let ghost = base_ghost.add(&tri.scale(&(rat(1, 4) - alpha.clone())));
            let residual = tail.sub(&shadow).sub(&ghost);
            Ok(RenormResult {
                tail,
                shadow,
                ghost,
                residual,
            })
        }
        _ => Err(CoreError::UnregisteredDecomposition(String::from(id))),
    }
}

// ---- telescoped weighted products ------------------------------------------

/// sum_{n>=1} n * a_n * prod_{j=1}^{n-1} (1 + a_j) for a factor sequence
/// a_j = aj(j, order): the weighted-product form of
/// sum_{N>=0} (prod_inf (1+a_j) - prod_N (1+a_j)), valid whenever the
/// valuations of the a_j grow without bound.
pub fn chapman_rhs<F>(aj: F, order: i64) -> Result<QSeries, CoreError>
where
    F: Fn(u64, i64) -> Result<QSeries, CoreError>,
{
    let bound = exp_int(order);
    let mut acc = QSeries::zero(bound);
    let mut prod = QSeries::one(bound);
    let cap = iteration_cap(order) as u64;
    let mut quiet = 0usize;
    let mut n: u64 = 1;
    loop {
        if n > cap {
            return Err(CoreError::NonSummable);
        }
        let a = aj(n, order)?;
        let term = a.mul(&prod).scale(&rat_int(n as i64));
        if term.is_zero() {
            quiet += 1;
            if quiet >= STABLE_RUN {
                return Ok(acc);
            }
        } else {
            quiet = 0;
            acc = acc.add(&term);
        }
        prod = prod.add(&prod.mul(&a));
        n += 1;
    }
}

// ---- closed forms for Pochhammer-quotient tails ----------------------------

/// c * q^m / (1 - c * q^m) as a truncated series, for any integer m. The
/// exponent-zero case requires c != 1 and the caller screens it.
fn geometric_term(c: &Rat, m: i64, order: i64) -> Result<QSeries, CoreError> {
    let bound = exp_int(order);
    if c.is_zero() {
        return Ok(QSeries::zero(bound));
    }
    if m > 0 {
        return QSeries::monomial(c.clone(), exp_int(m), bound).div_one_minus(c, exp_int(m));
    }
    if m == 0 {
        let denom = Rat::one() - c.clone();
        if denom.is_zero() {
            return Err(CoreError::ZeroDenominator);
        }
        return Ok(QSeries::constant(c.clone() / denom, bound));
    }
    // c q^m / (1 - c q^m) = -1 / (1 - c^-1 q^-m) for m < 0.
    QSeries::constant(rat_int(-1), bound).div_one_minus(&(Rat::one() / c.clone()), exp_int(-m))
}

/// sum over n of c q^(e0 + k n) / (1 - c q^(e0 + k n)) for n = start.., with
/// singular indices (exponent 0, coefficient 1) skipped and counted.
fn lambda_sum(
    c: &Rat,
    e0: i64,
    k: i64,
    start: i64,
    order: i64,
    singular: &mut usize,
) -> Result<QSeries, CoreError> {
    let mut acc = QSeries::zero(exp_int(order));
    if c.is_zero() {
        return Ok(acc);
    }
    let mut n = start;
    loop {
        let m = e0 + k * n;
        if m > order {
            return Ok(acc);
        }
        if m == 0 && c.is_one() {
            *singular += 1;
        } else {
            acc = acc.add(&geometric_term(c, m, order)?);
        }
        n += 1;
    }
}

fn integral_exp(e: Exp) -> Result<i64, CoreError> {
    if *e.denom() == 1 {
        Ok(*e.numer())
    } else {
        Err(CoreError::Semantics(String::from(
            "parameter exponents must be integral",
        )))
    }
}

/// Closed form, in base q^k, for
/// sum_n ((t;q^k)_inf / (a;q^k)_inf - (t;q^k)_n / (a;q^k)_n):
/// a quotient sum plus the infinite-product prefactor times four geometric
/// layers. `a = None` is the vanishing-parameter limit. The two geometric
/// layers that can each contain one exactly-singular term must contain
/// equally many; those cancel in pairs and are skipped.
pub fn ajo_one_rhs(
    t: &MonomialParam,
    a: Option<&MonomialParam>,
    k: u32,
    order: i64,
) -> Result<QSeries, CoreError> {
    let bound = exp_int(order);
    let k = i64::from(k.max(1));
    if t.is_zero() {
        return Err(CoreError::Semantics(String::from(
            "first parameter must be nonzero",
        )));
    }
    let et = integral_exp(t.exp)?;
    let ct = t.coef.clone();
    let (ca, ea) = match a {
        Some(p) if !p.is_zero() => (Some(p.coef.clone()), integral_exp(p.exp)?),
        _ => (None, 0),
    };

    // Quotient sum: ratio_n = (q^k/a)_n / (q^k/t)_n * (a/t)^n, accumulated
    // incrementally; in the vanishing-parameter limit the numerator layer
    // (q^k/a)_n * a^n degenerates to (-1)^n q^(k n(n+1)/2).
    let mut quotient = QSeries::zero(bound);
    let mut ratio = QSeries::one(bound);
    let mut n: i64 = 1;
    loop {
        // Numerator factor for index n.
        ratio = match &ca {
            Some(ca) => {
                let m = k * n - ea;
                let cinv = Rat::one() / ca.clone();
                if m == 0 {
                    // (1 - cinv) is a constant factor, zero when cinv = 1;
                    // a zero factor terminates the whole quotient sum.
                    ratio.scale(&(Rat::one() - cinv))
                } else {
                    ratio.mul_one_minus(&cinv, exp_int(m))
                }
            }
            // Limit of (1 - q^(k n)/a) * a: the factor -q^(k n).
            None => ratio.scale(&rat_int(-1)).shift(exp_int(k * n)).truncate(bound),
        };
        // Denominator factor (1 - q^(k n)/t) and the step of (1/t)^n.
        let md = k * n - et;
        let ctinv = Rat::one() / ct.clone();
        if md == 0 && ctinv.is_one() {
            return Err(CoreError::ZeroDenominator);
        }
        ratio = if md == 0 {
            ratio.scale(&(Rat::one() / (Rat::one() - ctinv)))
        } else {
            ratio.div_one_minus(&ctinv, exp_int(md))?
        };
        ratio = ratio
            .scale(&(Rat::one() / ct.clone()))
            .shift(exp_int(-et))
            .truncate(bound);
        // Step of a^n for a nonvanishing parameter.
        if let Some(ca) = &ca {
            ratio = ratio.scale(ca).shift(exp_int(ea)).truncate(bound);
        }
        if ratio.is_zero() {
            break;
        }
        quotient = quotient.add(&ratio);
        // Valuation of the ratio grows in every convergent configuration;
        // a non-growing configuration runs into the cap.
        n += 1;
        if n > iteration_cap(order) {
            return Err(CoreError::NonSummable);
        }
    }

    // Prefactor (t)_inf / (a)_inf.
    let mut prefactor = QSeries::one(bound).mul_poch_factors(&ct, t.exp, exp_int(k), None, false)?;
    if let Some(ca) = &ca {
        prefactor = prefactor.mul_poch_factors(ca, exp_int(ea), exp_int(k), None, true)?;
    }

    // Geometric layers. The q^n/t layer and the (a/t) q^n layer may each
    // contain one exactly-singular term; these cancel as a pair.
    let one = Rat::one();
    let mut sing_plus = 0usize;
    let mut sing_minus = 0usize;
    let mut layers = lambda_sum(&one, 0, k, 1, order, &mut sing_plus)?;
    layers = layers.add(&lambda_sum(
        &(Rat::one() / ct.clone()),
        -et,
        k,
        1,
        order,
        &mut sing_plus,
    )?);
    layers = layers.sub(&lambda_sum(&ct, et, k, 0, order, &mut sing_minus)?);
    match &ca {
        Some(ca) => {
            let c = ca.clone() / ct.clone();
            layers = layers.sub(&lambda_sum(&c, ea - et, k, 0, order, &mut sing_minus)?);
        }
        None => {}
    }
    if sing_plus != sing_minus {
        return Err(CoreError::ZeroDenominator);
    }

    Ok(quotient.add(&prefactor.mul(&layers)))
}

/// Closed form, in base q^k, for
/// sum_n ((a)_inf (b)_inf / ((q^k)_inf (c)_inf) - (a)_n (b)_n / ((q^k)_n (c)_n))
/// with all Pochhammer symbols in step q^k: the infinite-product prefactor
/// times (a divisor layer, minus a geometric layer in the first parameter,
/// minus a quotient sum driven by the second and third parameters).
/// Parameters are monomials, possibly zero.
pub fn ajo_two_rhs(
    a: &MonomialParam,
    b: &MonomialParam,
    c: &MonomialParam,
    k: u32,
    order: i64,
) -> Result<QSeries, CoreError> {
    let bound = exp_int(order);
    let one = Rat::one();
    let k = i64::from(k.max(1));

    // Prefactor (a)_inf (b)_inf / ((q^k)_inf (c)_inf).
    let mut prefactor =
        QSeries::one(bound).mul_poch_factors(&one, exp_int(k), exp_int(k), None, true)?;
    for (p, invert) in [(a, false), (b, false), (c, true)] {
        if !p.is_zero() {
            prefactor =
                prefactor.mul_poch_factors(&p.coef, p.exp, exp_int(k), None, invert)?;
        }
    }

    // Divisor layer minus the geometric layer of the first parameter.
    let mut sing = 0usize;
    let mut inner = lambda_sum(&one, 0, k, 1, order, &mut sing)?;
    if !a.is_zero() {
        let ea = integral_exp(a.exp)?;
        inner = inner.sub(&lambda_sum(&a.coef, ea, k, 0, order, &mut sing)?);
    }
    if sing != 0 {
        return Err(CoreError::ZeroDenominator);
    }

    // Quotient sum: sum_{n>=1} (c/b)_n b^n / ((a)_n (1 - q^(k n))), with
    // (c/b)_n b^n expanded as prod_{j=0}^{n-1} (b - c q^(k j)) so that a
    // zero second parameter degenerates gracefully.
    if !(b.is_zero() && c.is_zero()) {
        let eb = if b.is_zero() { 0 } else { integral_exp(b.exp)? };
        let ec = if c.is_zero() { 0 } else { integral_exp(c.exp)? };
        let ea = if a.is_zero() { 0 } else { integral_exp(a.exp)? };
        let mut running = QSeries::one(bound);
        let mut quotient = QSeries::zero(bound);
        let mut n: i64 = 1;
        loop {
            // Multiply by (b - c q^(k(n-1))) / (1 - a q^(k(n-1))).
            let mut factor = QSeries::zero(bound);
            if !b.is_zero() {
                factor = factor.add(&QSeries::monomial(b.coef.clone(), exp_int(eb), bound));
            }
            if !c.is_zero() {
                factor = factor.sub(&QSeries::monomial(
                    c.coef.clone(),
                    exp_int(ec + k * (n - 1)),
                    bound,
                ));
            }
            running = running.mul(&factor).truncate(bound);
            if !a.is_zero() {
                let m = ea + k * (n - 1);
                if m == 0 {
                    let denom = one.clone() - a.coef.clone();
                    if denom.is_zero() {
                        return Err(CoreError::ZeroDenominator);
                    }
                    running = running.scale(&(one.clone() / denom));
                } else {
                    running = running.div_one_minus(&a.coef, exp_int(m))?;
                }
            }
            if running.is_zero() {
                break;
            }
            quotient = quotient.add(&running.div_one_minus(&one, exp_int(k * n))?);
            n += 1;
            if n > iteration_cap(order) {
                return Err(CoreError::NonSummable);
            }
        }
        inner = inner.sub(&quotient);
    }

    Ok(prefactor.mul(&inner))
}

// ---- named auxiliary series ------------------------------------------------

/// Named series outside the plain summand language: harmonic-weighted and
/// index-weighted quadratic-exponent sums, an unweighted bilateral sum,
/// weighted tail products, and the closed layer forms of the two
/// triple-product tail sums.
pub fn builtin(name: &str, order: i64) -> Result<QSeries, CoreError> {
    let bound = exp_int(order);
    let one = Rat::one();
    match name {
        // sum_{n>=1} (-1)^(n-1) q^(n^2) / (q^2;q^2)_n * sum_{j=1}^n 1/(1-q^(2j))
        "harmonic-alt-qsq" => {
            let mut acc = QSeries::zero(bound);
            let mut pochinv = QSeries::one(bound);
            let mut harmonic = QSeries::zero(bound);
            let mut n: i64 = 1;
            while n * n <= order {
                pochinv = pochinv.div_one_minus(&one, exp_int(2 * n))?;
                harmonic = harmonic.add(&QSeries::one(bound).div_one_minus(&one, exp_int(2 * n))?);
                let sign = if n % 2 == 1 { 1 } else { -1 };
                let term = pochinv
                    .mul(&harmonic)
                    .shift(exp_int(n * n))
                    .truncate(bound)
                    .scale(&rat_int(sign));
                acc = acc.add(&term);
                n += 1;
            }
            Ok(acc)
        }
        // sum_{n>=1} q^(n(2n-1)) / (q)_(2n) * sum_{j=1}^{2n} 1/(1-q^j)
        "harmonic-hex-dbl" => {
            let mut acc = QSeries::zero(bound);
            let mut pochinv = QSeries::one(bound);
            let mut harmonic = QSeries::zero(bound);
            let mut n: i64 = 1;
            while n * (2 * n - 1) <= order {
                for j in [2 * n - 1, 2 * n] {
                    pochinv = pochinv.div_one_minus(&one, exp_int(j))?;
                    harmonic = harmonic.add(&QSeries::one(bound).div_one_minus(&one, exp_int(j))?);
                }
                let term = pochinv
                    .mul(&harmonic)
                    .shift(exp_int(n * (2 * n - 1)))
                    .truncate(bound);
                acc = acc.add(&term);
                n += 1;
            }
            Ok(acc)
        }
        // sum_{n>=1} q^(n^2) / (q)_n^2 * sum_{j=1}^n 1/(1-q^j)
        "harmonic-sq-sq" => {
            let mut acc = QSeries::zero(bound);
            let mut pochinv = QSeries::one(bound);
            let mut harmonic = QSeries::zero(bound);
            let mut n: i64 = 1;
            while n * n <= order {
                pochinv = pochinv
                    .div_one_minus(&one, exp_int(n))?
                    .div_one_minus(&one, exp_int(n))?;
                harmonic = harmonic.add(&QSeries::one(bound).div_one_minus(&one, exp_int(n))?);
                let term = pochinv
                    .mul(&harmonic)
                    .shift(exp_int(n * n))
                    .truncate(bound);
                acc = acc.add(&term);
                n += 1;
            }
            Ok(acc)
        }
        // sum_{n>=1} (-1)^n n q^(n^2) / (q^2;q^2)_n
        "weight-alt-qsq" => {
            let mut acc = QSeries::zero(bound);
            let mut pochinv = QSeries::one(bound);
            let mut n: i64 = 1;
            while n * n <= order {
                pochinv = pochinv.div_one_minus(&one, exp_int(2 * n))?;
                let sign = if n % 2 == 0 { n } else { -n };
                let term = pochinv.shift(exp_int(n * n)).truncate(bound).scale(&rat_int(sign));
                acc = acc.add(&term);
                n += 1;
            }
            Ok(acc)
        }
        // sum_{n>=1} (-1)^n q^(n^2) / (q^2;q^2)_n * sum_{j=1}^n q^j/(1-q^j)
        "divisor-alt-qsq" => {
            let mut acc = QSeries::zero(bound);
            let mut pochinv = QSeries::one(bound);
            let mut divisor = QSeries::zero(bound);
            let mut n: i64 = 1;
            while n * n <= order {
                pochinv = pochinv.div_one_minus(&one, exp_int(2 * n))?;
                divisor = divisor.add(
                    &QSeries::monomial(one.clone(), exp_int(n), bound)
                        .div_one_minus(&one, exp_int(n))?,
                );
                let sign = if n % 2 == 1 { -1 } else { 1 };
                let term = pochinv
                    .mul(&divisor)
                    .shift(exp_int(n * n))
                    .truncate(bound)
                    .scale(&rat_int(sign));
                acc = acc.add(&term);
                n += 1;
            }
            Ok(acc)
        }
        // sum_{n in Z} (-1)^n q^(n(n-1)/2) / (1 + q^(n-1)), with the n <= -1
        // half rewritten as (-1)^n q^((n-1)(n-2)/2) / (1 + q^(1-n)).
        "bilateral-alternating" => {
            let neg = rat_int(-1);
            let mut acc = QSeries::constant(rat(-1, 2), bound); // n = 1
            acc = acc.add(
                &QSeries::monomial(one.clone(), exp_int(1), bound)
                    .div_one_minus(&neg, exp_int(1))?,
            ); // n = 0
            let mut n: i64 = 2;
            while n * (n - 1) / 2 <= order {
                let sign = if n % 2 == 0 { 1 } else { -1 };
                let term = QSeries::monomial(rat_int(sign), exp_int(n * (n - 1) / 2), bound)
                    .div_one_minus(&neg, exp_int(n - 1))?;
                acc = acc.add(&term);
                n += 1;
            }
            n = -1;
            while (n - 1) * (n - 2) / 2 <= order {
                let sign = if n % 2 == 0 { 1 } else { -1 };
                let term =
                    QSeries::monomial(rat_int(sign), exp_int((n - 1) * (n - 2) / 2), bound)
                        .div_one_minus(&neg, exp_int(1 - n))?;
                acc = acc.add(&term);
                n -= 1;
            }
            Ok(acc)
        }
        // sum_{n>=1} n q^n (q^(n+1);q)_inf and its (+q) counterpart
        "weighted-tail-product-pos" | "weighted-tail-product-neg" => {
            let coef = if name == "weighted-tail-product-pos" {
                one.clone()
            } else {
                rat_int(-1)
            };
            let mut prod = QSeries::one(bound)
                .mul_poch_factors(&coef, exp_int(1), exp_int(1), None, false)?;
            let mut acc = QSeries::zero(bound);
            let mut n: i64 = 1;
            while n <= order {
                prod = prod.div_one_minus(&coef, exp_int(n))?;
                let term = prod.shift(exp_int(n)).truncate(bound).scale(&rat_int(n));
                acc = acc.add(&term);
                n += 1;
            }
            Ok(acc)
        }
        // (-q)_inf - 1/2 - (1/2) sum_{n>=0} W_n (2n (1+q^(2n)) + q^(2n)
        //   + (1+q^(2n)) sum_{j=1}^n q^j/(1-q^j))
        // with W_n = (-1;q)_n q^((3n^2-n)/2) / (q)_n: the closed layer form
        // of the growing-product tail sum.
        "triple-neg-q-rhs" => {
            let mut acc = QSeries::zero(bound);
            let mut w = QSeries::one(bound);
            let mut harmonic = QSeries::zero(bound);
            let mut n: i64 = 0;
            while (3 * n * n - n) / 2 <= order {
                if n >= 1 {
                    harmonic = harmonic.add(
                        &QSeries::monomial(one.clone(), exp_int(n), bound)
                            .div_one_minus(&one, exp_int(n))?,
                    );
                }
                let shifted = w.shift(exp_int(2 * n)).truncate(bound);
                let pair = w.add(&shifted);
                acc = acc
                    .add(&pair.scale(&rat_int(2 * n)))
                    .add(&shifted)
                    .add(&pair.mul(&harmonic).truncate(bound));
                if n == 0 {
                    w = w.scale(&rat_int(2));
                } else {
                    w = w.mul_one_minus(&rat_int(-1), exp_int(n));
                }
                w = w
                    .shift(exp_int(3 * n + 1))
                    .truncate(bound)
                    .div_one_minus(&one, exp_int(n + 1))?;
                n += 1;
            }
            let pinf = QSeries::poch_infinite(&rat_int(-1), exp_int(1), exp_int(1), bound)?;
            Ok(pinf
                .sub(&QSeries::constant(rat(1, 2), bound))
                .sub(&acc.scale(&rat(1, 2))))
        }
        // sum_{n>=0} V_n (q^(4n+1) - 2n (1-q^(4n+1))
        //   - (1-q^(4n+1)) sum_{j=1}^n q^(2j)/(1-q^(2j)))
        // with V_n = (-1)^n q^(3n^2) (q;q^2)_n / (q^2;q^2)_n: the closed
        // layer form of the odd-product tail sum.
        "triple-odd-poch-rhs" => {
            let mut acc = QSeries::zero(bound);
            let mut v = QSeries::one(bound);
            let mut even_divisor = QSeries::zero(bound);
            let mut n: i64 = 0;
            while 3 * n * n <= order {
                if n >= 1 {
                    even_divisor = even_divisor.add(
                        &QSeries::monomial(one.clone(), exp_int(2 * n), bound)
                            .div_one_minus(&one, exp_int(2 * n))?,
                    );
                }
                let shifted = v.shift(exp_int(4 * n + 1)).truncate(bound);
                let branch = v.sub(&shifted);
                acc = acc
                    .add(&shifted)
                    .sub(&branch.scale(&rat_int(2 * n)))
                    .sub(&branch.mul(&even_divisor).truncate(bound));
                v = v
                    .mul_one_minus(&one, exp_int(2 * n + 1))
                    .shift(exp_int(6 * n + 3))
                    .truncate(bound)
                    .div_one_minus(&one, exp_int(2 * n + 2))?
                    .neg();
                n += 1;
            }
            Ok(acc)
        }
        _ => Err(CoreError::UnknownFamily(String::from(name))),
    }
}
