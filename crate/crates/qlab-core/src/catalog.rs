//! Named builders for the series corpus and the generic engines they share.
//!
//! Provided here:
//!
//! - [`kronecker`]: the full Kronecker symbol (d/n) on all integer pairs.
//! - [`ThetaDescriptor`] with [`theta_build`], [`half_derivative`], and the
//!   registered [`theta_descriptor`] table: sparse quadratic-exponent sums
//!   chi(n) [n] q^((alpha n^2 + beta n + gamma)/D) over n >= 0, n >= 1, or Z.
//! - [`lambert_sum`] and [`bilateral_lambert`]: divisor-type sums
//!   sum c(n) q^(an) / (1 -+ q^(bn)) expanded exactly.
//! - [`eta_quotient`]: finite products prod eta(s z)^p as q-series with the
//!   fractional leading exponent carried exactly.
//! - [`fine_f`]: Fine's basic hypergeometric series F(a, b; t) for monomial
//!   parameters, continued to |t| = 1 through its t -> tq recurrence.
//! - [`hecke_double`]: indefinite-theta / Hecke-type double sums.
//! - [`CrankTable`] with [`positive_crank_series`] and
//!   [`crank_nonneg_series`]: exact crank counts M(m, n).
//! - [`kontsevich_tails`]: the tail sum of the partial products (q)_n.
//! - [`catalog_build`] and [`catalog_ids`]: the named series corpus.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::dsl::{parse, sum_terms};
use crate::error::CoreError;
use crate::series::{Exp, QSeries, Rat};
use crate::{exp_int, rat, rat_int};

/// Exact monomial parameter c * q^e for specializing series families.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialParam {
    pub coef: Rat,
    pub exp: Exp,
}

impl MonomialParam {
    pub fn new(coef: Rat, exp: Exp) -> Self {
        MonomialParam { coef, exp }
    }

    /// The zero parameter (coefficient 0).
    pub fn zero() -> Self {
        MonomialParam::new(Rat::zero(), Exp::zero())
    }

    /// Integer-coefficient monomial c * q^e with integer exponent.
    pub fn int(coef: i64, exp: i64) -> Self {
        MonomialParam::new(rat_int(coef), exp_int(exp))
    }

    /// True when the parameter is the constant 0.
    pub fn is_zero(&self) -> bool {
        self.coef.is_zero()
    }

    /// True when the parameter is exactly the constant 1.
    pub fn is_one(&self) -> bool {
        self.coef.is_one() && self.exp.is_zero()
    }
}

/// Index range of a theta sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThetaKind {
    /// n >= 0.
    Partial,
    /// n over all of Z.
    Full,
    /// n >= 1.
    Unary,
}

/// Multiplier character chi(n) of a theta sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ThetaChar {
    None,
    /// Periodic sign vector indexed by n mod period.
    Period(Vec<i8>),
    /// Kronecker symbol (d/n).
    Kronecker(i64),
}

/// Description of a theta-type sum: chi(n) [n] q^((alpha n^2 + beta n + gamma)/D).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaDescriptor {
    pub kind: ThetaKind,
    pub character: ThetaChar,
    /// (alpha, beta, gamma, D) with D >= 1.
    pub exp_quad: (i64, i64, i64, i64),
    /// Multiply the n-th term by n.
    pub weight_n: bool,
}

// ---- kronecker symbol ------------------------------------------------------

/// Legendre symbol (d/p) for an odd prime p, by Euler's criterion.
fn legendre(d: i64, p: i64) -> i32 {
    let m = p as u128;
    let mut base = d.rem_euclid(p) as u128;
    if base == 0 {
        return 0;
    }
    let mut e = ((p - 1) / 2) as u64;
    let mut r: u128 = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = r * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    if r == 1 {
        1
    } else {
        -1
    }
}

/// Full Kronecker symbol (d/n), extended multiplicatively from the Legendre
/// symbol by (d/2) = 0, 1, -1 for d even, d = +-1 (mod 8), d = +-3 (mod 8),
/// (d/-1) = sign(d), and (d/0) = 1 exactly when d = +-1.
pub fn kronecker(d: i64, n: i64) -> i32 {
    if n == 0 {
        return if d == 1 || d == -1 { 1 } else { 0 };
    }
    let mut acc = 1i32;
    let mut n = n;
    if n < 0 {
        if d < 0 {
            acc = -acc;
        }
        n = -n;
    }
    let d2 = match d.rem_euclid(8) {
        1 | 7 => 1,
        3 | 5 => -1,
        _ => 0,
    };
    while n % 2 == 0 {
        if d2 == 0 {
            return 0;
        }
        acc *= d2;
        n /= 2;
    }
    let mut p = 3i64;
    while p * p <= n {
        while n % p == 0 {
            let s = legendre(d, p);
            if s == 0 {
                return 0;
            }
            acc *= s;
            n /= p;
        }
        p += 2;
    }
    if n > 1 {
        let s = legendre(d, n);
        if s == 0 {
            return 0;
        }
        acc *= s;
    }
    acc
}

// ---- sparse term assembly --------------------------------------------------

/// Assembles a series from exact (exponent, coefficient) terms, at the least
/// common grain of the exponents and the bound; terms at or above the bound
/// are dropped.
pub fn from_exp_terms(terms: &[(Exp, Rat)], trunc: Exp) -> QSeries {
    let mut grain: i64 = *trunc.denom();
    for (e, _) in terms {
        grain = lcm_i64(grain, *e.denom());
    }
    let g = u32::try_from(grain).expect("grain overflow");
    let tu = trunc.numer() * (grain / trunc.denom());
    let mut map: BTreeMap<i64, Rat> = BTreeMap::new();
    for (e, c) in terms {
        if c.is_zero() {
            continue;
        }
        let k = e.numer() * (grain / e.denom());
        if k < tu {
            *map.entry(k).or_insert_with(Rat::zero) += c;
        }
    }
    let Some((&lo, _)) = map.iter().next() else {
        return QSeries::zero_grain(g, tu);
    };
    let mut coeffs = vec![Rat::zero(); (tu - lo).max(0) as usize];
    for (k, c) in map {
        coeffs[(k - lo) as usize] = c;
    }
    QSeries::from_units(g, lo, coeffs, tu).normalize_grain()
}

fn lcm_i64(a: i64, b: i64) -> i64 {
    fn gcd(mut a: i64, mut b: i64) -> i64 {
        while b != 0 {
            let r = a % b;
            a = b;
            b = r;
        }
        a.abs()
    }
    a / gcd(a, b) * b
}

// ---- theta sums ------------------------------------------------------------

fn theta_chi(character: &ThetaChar, n: i64) -> i64 {
    match character {
        ThetaChar::None => 1,
        ThetaChar::Period(v) => {
            let m = v.len() as i64;
            i64::from(v[n.rem_euclid(m) as usize])
        }
        ThetaChar::Kronecker(d) => i64::from(kronecker(*d, n)),
    }
}

fn char_is_even(character: &ThetaChar) -> bool {
    match character {
        ThetaChar::None => true,
        ThetaChar::Period(v) => {
            let m = v.len() as i64;
            (0..m).all(|n| theta_chi(character, n) == theta_chi(character, -n % m))
        }
        // (d/-n) = sign(d) * (d/n).
        ThetaChar::Kronecker(d) => *d > 0,
    }
}

/// Expands a theta descriptor to its exact series, walking the index range in
/// both directions until the convex exponent clears the bound.
///
/// Requires alpha >= 1 so every direction eventually terminates.
pub fn theta_build(td: &ThetaDescriptor, order: i64) -> QSeries {
    let (alpha, beta, gamma, den) = td.exp_quad;
    assert!(alpha >= 1, "theta exponent must grow quadratically");
    assert!(den >= 1, "theta exponent denominator must be positive");
    let bound = exp_int(order);
    let exp_at = |n: i64| Exp::new(alpha * n * n + beta * n + gamma, den);
    // Real vertex of the exponent parabola is at -beta / (2 alpha).
    let past_vertex_up = |n: i64| 2 * alpha * n + beta > 0;
    let past_vertex_down = |n: i64| 2 * alpha * n + beta < 0;
    let mut terms: Vec<(Exp, Rat)> = Vec::new();
    let mut push = |n: i64| {
        let mut c = theta_chi(&td.character, n);
        if td.weight_n {
            c *= n;
        }
        if c != 0 {
            terms.push((exp_at(n), rat_int(c)));
        }
    };
    let start = match td.kind {
        ThetaKind::Partial => 0,
        ThetaKind::Full => 0,
        ThetaKind::Unary => 1,
    };
    let mut n = start;
    while !(past_vertex_up(n) && exp_at(n) >= bound) {
        push(n);
        n += 1;
    }
    if td.kind == ThetaKind::Full {
        let mut n = start - 1;
        while !(past_vertex_down(n) && exp_at(n) >= bound) {
            push(n);
            n -= 1;
        }
    }
    from_exp_terms(&terms, bound)
}

/// The half-derivative normalization: termwise multiplication by the index.
///
/// Defined on pure-square descriptors (beta = 0) that are not yet weighted:
/// a one-sided sum over n >= 1 gains the weight directly, a two-sided sum
/// with even character folds to n >= 1 (the registered numeric factors of
/// the surrounding identities are not part of the operator). Anything else
/// is rejected with `NotUnary`.
pub fn half_derivative(td: &ThetaDescriptor) -> Result<ThetaDescriptor, CoreError> {
    if td.weight_n {
        return Err(CoreError::NotUnary);
    }
    let (_, beta, _, _) = td.exp_quad;
    if beta != 0 {
        return Err(CoreError::NotUnary);
    }
    match td.kind {
        ThetaKind::Unary => {}
        ThetaKind::Full => {
            if !char_is_even(&td.character) {
                return Err(CoreError::NotUnary);
            }
        }
        ThetaKind::Partial => return Err(CoreError::NotUnary),
    }
    Ok(ThetaDescriptor {
        kind: ThetaKind::Unary,
        character: td.character.clone(),
        exp_quad: td.exp_quad,
        weight_n: true,
    })
}

/// Looks up a registered theta descriptor by name.
pub fn theta_descriptor(id: &str) -> Result<ThetaDescriptor, CoreError> {
    use ThetaKind::{Full, Partial, Unary};
    let (kind, character, exp_quad, weight_n) = match id {
        // sum_{n>=1} (12/n) q^(n^2/24): the eta function as a sparse sum.
        "eta" => (Unary, ThetaChar::Kronecker(12), (1, 0, 0, 24), false),
        // sum_{n>=1} (12/n) n q^(n^2/24).
        "eta_tilde" => (Unary, ThetaChar::Kronecker(12), (1, 0, 0, 24), true),
        // sum_{n>=1} (-12/n) n q^(n^2/24).
        "eta_tilde_neg" => (Unary, ThetaChar::Kronecker(-12), (1, 0, 0, 24), true),
        // sum_{n>=1} (-12/n) q^((n^2-1)/24).
        "sf" => (Unary, ThetaChar::Kronecker(-12), (1, 0, -1, 24), false),
        // sum_{n>=1} (12/n) n q^((n^2-1)/24).
        "eta_tilde_shift" => (Unary, ThetaChar::Kronecker(12), (1, 0, -1, 24), true),
        // sum_{n in Z} (-1)^n q^(n^2).
        "theta_alt_sq_full" => (Full, ThetaChar::Period(vec![1, -1]), (1, 0, 0, 1), false),
        // sum_{n>=0} q^(n(n+1)/2).
        "theta_tri_partial" => (Partial, ThetaChar::None, (1, 1, 0, 2), false),
        // sum_{n>=0} (-1)^n q^(n(n+1)/2).
        "theta_tri_alt_partial" => (Partial, ThetaChar::Period(vec![1, -1]), (1, 1, 0, 2), false),
        // sum_{n in Z} q^(n(n+1)/2).
        "theta_tri_full" => (Full, ThetaChar::None, (1, 1, 0, 2), false),
        // sum_{n in Z} (-1)^n q^(n(3n+1)/2).
        "pent_full" => (Full, ThetaChar::Period(vec![1, -1]), (3, 1, 0, 2), false),
        // sum_{n>=1} (-1)^n n q^(n^2).
        "s_m1" => (Unary, ThetaChar::Period(vec![1, -1]), (1, 0, 0, 1), true),
        // sum_{n>=0} n q^(n(n+1)/2).
        "s_m2_n" => (Partial, ThetaChar::None, (1, 1, 0, 2), true),
        // sum_{n in Z} q^(2n^2).
        "theta_2sq_full" => (Full, ThetaChar::None, (2, 0, 0, 1), false),
        // sum_{n in Z} q^(2(n+1/4)^2) = sum q^((16n^2+8n+1)/8).
        "theta_shift8_full" => (Full, ThetaChar::None, (16, 8, 1, 8), false),
        // sum_{n>=0} (-1)^n q^(6n^2+4n) and its q^(4n+2)-shifted partner:
        // together they expand sum (-1)^n q^(6n^2+4n) (1 + q^(4n+2)).
        "psi_pt_a" => (Partial, ThetaChar::Period(vec![1, -1]), (6, 4, 0, 1), false),
        "psi_pt_b" => (Partial, ThetaChar::Period(vec![1, -1]), (6, 8, 2, 1), false),
        _ => return Err(CoreError::UnknownSeries(String::from(id))),
    };
    Ok(ThetaDescriptor {
        kind,
        character,
        exp_quad,
        weight_n,
    })
}

// ---- lambert sums ----------------------------------------------------------

/// Expands sum_{n>=1} c(n) q^(an) / (1 - s q^(bn)) exactly, where c is
/// periodic (indexed by n mod its length) and s = `denom_sign` is +-1.
///
/// Requires a >= 1 and b >= 1 so each geometric layer advances.
pub fn lambert_sum(c: &[i8], a: i64, b: i64, denom_sign: i32, order: i64) -> QSeries {
    assert!(a >= 1 && b >= 1, "lambert exponents must be positive");
    assert!(!c.is_empty(), "lambert character must be nonempty");
    assert!(denom_sign == 1 || denom_sign == -1, "denominator sign must be +-1");
    let m = c.len() as i64;
    let mut map: BTreeMap<i64, i64> = BTreeMap::new();
    let mut n = 1i64;
    while a * n < order {
        let cn = i64::from(c[n.rem_euclid(m) as usize]);
        if cn != 0 {
            // q^(an) / (1 - s q^(bn)) = sum_{k>=0} s^k q^(an + bnk).
            let mut k = 0i64;
            loop {
                let e = a * n + b * n * k;
                if e >= order {
                    break;
                }
                let s = if denom_sign == -1 || k % 2 == 0 { cn } else { -cn };
                *map.entry(e).or_insert(0) += s;
                k += 1;
            }
        }
        n += 1;
    }
    let terms: Vec<(Exp, Rat)> = map
        .into_iter()
        .map(|(e, v)| (exp_int(e), rat_int(v)))
        .collect();
    from_exp_terms(&terms, exp_int(order))
}

/// The two-sided weighted sum sum_{n in Z} n (-1)^n q^(n(n-1)/2) / (1 + q^(n-1)).
///
/// The n = 0 term vanishes, n = 1 contributes -1/2, and for n <= -1 the term
/// is rewritten with positive exponents as
/// n (-1)^n q^((n-1)(n-2)/2) / (1 + q^(1-n)) before geometric expansion.
pub fn bilateral_lambert(order: i64) -> QSeries {
    let mut terms: Vec<(Exp, Rat)> = Vec::new();
    // n = 1: 1 * (-1) * q^0 / (1 + q^0).
    terms.push((Exp::zero(), rat(-1, 2)));
    let mut geometric = |coef: i64, base: i64, step: i64| {
        // coef * q^base / (1 + q^step) = coef * sum_k (-1)^k q^(base + k step).
        let mut k = 0i64;
        loop {
            let e = base + k * step;
            if e >= order {
                break;
            }
            let c = if k % 2 == 0 { coef } else { -coef };
            terms.push((exp_int(e), rat_int(c)));
            k += 1;
        }
    };
    let mut n = 2i64;
    while n * (n - 1) / 2 < order {
        let sign = if n % 2 == 0 { 1 } else { -1 };
        geometric(sign * n, n * (n - 1) / 2, n - 1);
        n += 1;
    }
    let mut n = -1i64;
    while (n - 1) * (n - 2) / 2 < order {
        let sign = if n.rem_euclid(2) == 0 { 1 } else { -1 };
        geometric(sign * n, (n - 1) * (n - 2) / 2, 1 - n);
        n -= 1;
    }
    from_exp_terms(&terms, exp_int(order))
}

// ---- eta quotients ---------------------------------------------------------

/// Expands prod_i eta(s_i z)^(p_i) as a q-series, where eta(s z) corresponds
/// to q^(s/24) prod_{k>=1} (1 - q^(sk)).
pub fn eta_quotient(factors: &[(u32, i32)], order: i64) -> Result<QSeries, CoreError> {
    let mut shift24: i64 = 0;
    for &(s, p) in factors {
        assert!(s >= 1, "eta argument scale must be positive");
        shift24 += i64::from(s) * i64::from(p);
    }
    let work = exp_int(order + shift24.abs() / 24 + 2);
    let mut acc = QSeries::one(work);
    for &(s, p) in factors {
        let step = exp_int(i64::from(s));
        let prod = QSeries::poch_infinite(&Rat::one(), step, step, work)?;
        acc = acc.mul(&prod.pow(i64::from(p))?);
    }
    Ok(acc
        .shift(Exp::new(shift24, 24))
        .truncate(exp_int(order))
        .normalize_grain())
}

// ---- Fine's basic hypergeometric series ------------------------------------

/// The series 1 - c q^e as an exact binomial.
fn one_minus(p: &MonomialParam, bound: Exp) -> QSeries {
    QSeries::one(bound).mul_one_minus(&p.coef, p.exp)
}

/// Fine's series F(a, b; t) = sum_{n>=0} (aq; q)_n / (bq; q)_n t^n for
/// monomial parameters.
///
/// Direct summation needs the valuation of t to be positive; for valuation
/// <= 0 the sum is continued through the recurrence
/// F(a, b; t) = (1 - b)/(1 - t) + (b - atq)/(1 - t) F(a, b; tq),
/// applied until the shifted argument t q^K has positive valuation. The
/// parameters a and b must have valuation > -1 so the Pochhammer entries
/// stay inside the expansion window; t = 1 (and any t q^k = 1 crossed by the
/// recurrence) is a pole.
pub fn fine_f(
    a: &MonomialParam,
    b: &MonomialParam,
    t: &MonomialParam,
    order: i64,
) -> Result<QSeries, CoreError> {
    let bound = exp_int(order);
    if t.is_zero() {
        return Ok(QSeries::one(bound));
    }
    if t.is_one() {
        return Err(CoreError::Semantics(String::from(
            "fine series has a pole at t = 1",
        )));
    }
    let neg_one = -Exp::one();
    if !a.is_zero() && a.exp <= neg_one {
        return Err(CoreError::Semantics(String::from(
            "fine parameter a must have valuation > -1",
        )));
    }
    if !b.is_zero() && b.exp <= neg_one {
        return Err(CoreError::Semantics(String::from(
            "fine parameter b must have valuation > -1",
        )));
    }
    // Steps of t -> tq needed before the argument has positive valuation.
    let k_steps = (Exp::one() - t.exp).ceil().to_integer().max(0);
    let t_den = *t.exp.denom();
    let slack = k_steps * (t.exp.numer().abs() / t_den + 2) + 2;
    let work = exp_int(order + slack);
    let mut acc = QSeries::zero(work);
    let mut prefix = QSeries::one(work);
    for k in 0..k_steps {
        let tk = MonomialParam::new(t.coef.clone(), t.exp + exp_int(k));
        if tk.is_one() {
            return Err(CoreError::ZeroDenominator);
        }
        let denom = one_minus(&tk, work).invert()?;
        // (1 - b) / (1 - t_k) contribution.
        acc = acc.add(&prefix.mul(&one_minus(b, work)).mul(&denom));
        // (b - a t_k q) / (1 - t_k) carried into the next step.
        let b_series = QSeries::monomial(b.coef.clone(), b.exp, work);
        let atq = QSeries::monomial(
            a.coef.clone() * tk.coef.clone(),
            a.exp + tk.exp + Exp::one(),
            work,
        );
        prefix = prefix.mul(&b_series.sub(&atq)).mul(&denom);
    }
    // Direct summation of prefix * F(a, b; t q^K); u_0 = prefix and
    // u_{n+1} = u_n (1 - a q^(n+1)) / (1 - b q^(n+1)) * t q^K.
    let tk_exp = t.exp + exp_int(k_steps);
    let mut u = prefix;
    let mut n = 0i64;
    let cap = order.max(1) * 8 * t_den + 1024;
    while !u.is_zero() {
        acc = acc.add(&u);
        let j = exp_int(n + 1);
        u = u
            .mul_one_minus(&a.coef, a.exp + j)
            .div_one_minus(&b.coef, b.exp + j)?
            .scale(&t.coef)
            .shift(tk_exp)
            .truncate(work);
        n += 1;
        if n > cap {
            return Err(CoreError::NonConvergent);
        }
    }
    Ok(acc.truncate(bound).normalize_grain())
}

// ---- Hecke-type double sums ------------------------------------------------

/// Expands a registered Hecke-type (indefinite theta) double sum.
///
/// Families:
/// - `"ramanujan-false-rhs"` (takes the monomial parameter a):
///   sum_{n>=0} a^(3n) q^(n(3n+1)/2) (1 - a^2 q^(2n+1)).
/// - `"psi-hecke"`: sum_{n>=0} (-1)^n q^(2n^2+n) (1 - q^(6n+6))
///   sum_{j=0}^n q^(-j(j+1)/2).
/// - `"a-of-q-hecke"`: the same double sum without the alternating sign.
/// - `"l6-hecke"`: sum_{n>=0} sum_{r=0}^n (-1)^(n+r) (2r+1)
///   q^(n^2+2n-r(r+1)/2).
pub fn hecke_double(
    id: &str,
    param: Option<&MonomialParam>,
    order: i64,
) -> Result<QSeries, CoreError> {
    let bound = exp_int(order);
    let mut terms: Vec<(Exp, Rat)> = Vec::new();
    match id {
        "ramanujan-false-rhs" => {
            let a = param.ok_or_else(|| {
                CoreError::Semantics(String::from("this family takes a monomial parameter"))
            })?;
            if a.is_zero() {
                return Ok(QSeries::one(bound));
            }
            let mut n = 0i64;
            loop {
                let e1 = Exp::new(n * (3 * n + 1), 2) + a.exp * exp_int(3 * n);
                let e2 = e1 + a.exp * exp_int(2) + exp_int(2 * n + 1);
                // The exponent step e1(n+1) - e1(n) = 3n + 2 + 3 exp(a); once
                // it is positive both exponents stay above the bound for good.
                let increasing = exp_int(3 * n + 2) + a.exp * exp_int(3) > Exp::zero();
                if increasing && e1 >= bound && e2 >= bound {
                    break;
                }
                let c1 = pow_rat(&a.coef, 3 * n);
                terms.push((e1, c1.clone()));
                terms.push((e2, -(c1 * a.coef.clone() * a.coef.clone())));
                n += 1;
            }
        }
        "psi-hecke" | "a-of-q-hecke" => {
            let alternating = id == "psi-hecke";
            let mut n = 0i64;
            // The innermost exponent minimum is (3n^2 + n)/2 at j = n.
            while n * (3 * n + 1) / 2 < order {
                let s = if alternating && n % 2 != 0 { -1 } else { 1 };
                for j in 0..=n {
                    let e1 = Exp::new(2 * (2 * n * n + n) - j * (j + 1), 2);
                    let e2 = e1 + exp_int(6 * n + 6);
                    terms.push((e1, rat_int(s)));
                    terms.push((e2, rat_int(-s)));
                }
                n += 1;
            }
        }
        "l6-hecke" => {
            let mut n = 0i64;
            // Minimum exponent over r is (n^2 + 3n)/2 at r = n.
            while n * (n + 3) / 2 < order {
                for r in 0..=n {
                    let sign = if (n + r) % 2 == 0 { 1 } else { -1 };
                    let e = Exp::new(2 * (n * n + 2 * n) - r * (r + 1), 2);
                    terms.push((e, rat_int(sign * (2 * r + 1))));
                }
                n += 1;
            }
        }
        _ => return Err(CoreError::UnknownFamily(String::from(id))),
    }
    Ok(from_exp_terms(&terms, bound))
}

fn pow_rat(c: &Rat, k: i64) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..k {
        acc *= c;
    }
    acc
}

// ---- crank counts ----------------------------------------------------------

/// Exact table of crank counts M(m, n) for 0 <= n <= n_max, computed from the
/// generating function (q)_inf / ((zq)_inf (z^(-1)q)_inf) = sum M(m, n) z^m q^n.
pub struct CrankTable {
    n_max: usize,
    /// rows[n][m + n_max] = M(m, n).
    rows: Vec<Vec<i128>>,
}

impl CrankTable {
    pub fn new(n_max: usize) -> Self {
        let width = 2 * n_max + 1;
        let mut arr = vec![vec![0i128; width]; n_max + 1];
        arr[0][n_max] = 1;
        for j in 1..=n_max {
            // Multiply by 1/(1 - z q^j): ascending n reuses updated rows.
            for n in j..=n_max {
                for ofs in 1..width {
                    let add = arr[n - j][ofs - 1];
                    if add != 0 {
                        arr[n][ofs] += add;
                    }
                }
            }
            // Multiply by 1/(1 - z^(-1) q^j).
            for n in j..=n_max {
                for ofs in 0..width - 1 {
                    let add = arr[n - j][ofs + 1];
                    if add != 0 {
                        arr[n][ofs] += add;
                    }
                }
            }
        }
        // Multiply by (q)_inf via the pentagonal number expansion.
        let mut rows = vec![vec![0i128; width]; n_max + 1];
        for n in 0..=n_max {
            rows[n].clone_from(&arr[n]);
            let mut k = 1usize;
            loop {
                let g1 = k * (3 * k - 1) / 2;
                if g1 > n {
                    break;
                }
                let sign: i128 = if k % 2 == 1 { -1 } else { 1 };
                for ofs in 0..width {
                    rows[n][ofs] += sign * arr[n - g1][ofs];
                }
                let g2 = k * (3 * k + 1) / 2;
                if g2 <= n {
                    for ofs in 0..width {
                        rows[n][ofs] += sign * arr[n - g2][ofs];
                    }
                }
                k += 1;
            }
        }
        CrankTable { n_max, rows }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// The count M(m, n); zero outside the stored crank range.
    pub fn m(&self, m: i64, n: usize) -> i128 {
        assert!(n <= self.n_max, "row out of range");
        let ofs = m + self.n_max as i64;
        if ofs < 0 || ofs >= self.rows[n].len() as i64 {
            return 0;
        }
        self.rows[n][ofs as usize]
    }

    /// sum_m M(m, n).
    pub fn row_sum(&self, n: usize) -> i128 {
        self.rows[n].iter().sum()
    }
}

fn crank_sum_series(order: i64, include_zero: bool) -> QSeries {
    let n_max = (order - 1).max(0) as usize;
    let table = CrankTable::new(n_max);
    let mut terms: Vec<(Exp, Rat)> = Vec::new();
    for n in 0..=n_max {
        let mut total: i128 = 0;
        let lo = if include_zero { 0 } else { 1 };
        for m in lo..=(n_max as i64) {
            total += table.m(m, n);
        }
        if total != 0 {
            let big = num_bigint::BigInt::from(total);
            terms.push((exp_int(n as i64), Rat::from_integer(big)));
        }
    }
    from_exp_terms(&terms, exp_int(order))
}

/// sum_n (sum_{m > 0} M(m, n)) q^n: counts of partitions with positive crank.
pub fn positive_crank_series(order: i64) -> QSeries {
    crank_sum_series(order, false)
}

/// sum_n (sum_{m >= 0} M(m, n)) q^n: counts of partitions with nonnegative
/// crank.
pub fn crank_nonneg_series(order: i64) -> QSeries {
    crank_sum_series(order, true)
}

// ---- partial-product tails -------------------------------------------------

/// sum_{n>=0} ((q)_n - (q)_inf): each summand has valuation n + 1, so the
/// sum truncates exactly.
pub fn kontsevich_tails(order: i64) -> Result<QSeries, CoreError> {
    let bound = exp_int(order);
    let pinf = QSeries::poch_infinite(&Rat::one(), Exp::one(), Exp::one(), bound)?;
    let mut partial = QSeries::one(bound);
    let mut acc = QSeries::zero(bound);
    let mut n = 0i64;
    loop {
        let diff = partial.sub(&pinf);
        if diff.is_zero() {
            return Ok(acc);
        }
        acc = acc.add(&diff);
        n += 1;
        if n > order.max(0) + 8 {
            return Ok(acc);
        }
        partial = partial.mul_one_minus(&Rat::one(), exp_int(n));
    }
}

// ---- the named corpus ------------------------------------------------------

/// Identifiers accepted by [`catalog_build`].
pub fn catalog_ids() -> &'static [&'static str] {
    &[
        "sigma",
        "sigma_star",
        "f",
        "fbar",
        "No011",
        "M1",
        "M2",
        "P1",
        "P2",
        "F1",
        "F2",
        "F3",
        "F4",
        "psi",
        "andrews_a",
        "andrews_b",
        "andrews_c",
        "andrews_d",
        "cr",
        "C1",
        "L6",
        "W",
        "G1",
        "h",
        "kontsevich_tails",
        "eta",
        "eta_tilde",
    ]
}

/// Direct-summation descriptors of the corpus entries built through the term
/// language, exactly as summed (after reindexing every sum to start at n = 0).
fn catalog_descriptor(id: &str) -> Option<&'static str> {
    Some(match id {
        "sigma" => "q^((n^2+n)/2) / poch(-q;q)_n",
        "sigma_star" => "(-1)^n * -2 * q^(n^2+2n+1) / poch(q;q^2)_(n+1)",
        "f" => "q^(n^2) / poch(-q;q)_n^2",
        "No011" => "(-1)^n * q^(n^2+2n+1) / poch(q;q^2)_(n+1) / (1-q^(2n+1))",
        "M2" => "q^(n+1) * poch(q^2;q^2)_n / poch(q;q^2)_(n+1)",
        "P1" => "q^(n) / poch(q;q)_n",
        "P2" => "q^(n^2) / poch(q;q)_n^2",
        "F1" => "(-1)^n * q^((n^2+n)/2) / poch(q;q)_n",
        "F3" => "q^(n) * poch(q;q^2)_n / poch(q^2;q^2)_n",
        "F4" => "(-1)^n * q^(2n+1) * poch(-q;q)_n / poch(q;q)_n / (1-q^(2n+1))",
        "psi" => "q^(n^2) / poch(q;q^2)_n",
        "andrews_a" => "q^(n^2) * poch(-q;q)_n^2 / poch(q;q)_(2n)",
        "andrews_b" => "q^(n^2) * poch(-q^2;q^2)_n / poch(q;q)_(2n)",
        "andrews_c" => "q^(n^2+2n+1) * poch(-q^2;q^2)_n / poch(q;q)_(2n+1)",
        "andrews_d" => "q^(n^2) * poch(-q^2;q^2)_n / poch(q;q)_(2n+1)",
        "cr" => "q^(n^2+n) / poch(q;q)_n^2",
        "L6" => "(-1)^n * q^(n) * poch(q;q)_n^2 / poch(q;q^2)_(n+1)",
        "W" => "(-1)^n * q^(n) * poch(q;q^2)_n / poch(-q^2;q^2)_n",
        "h" => "q^(n+1) * poch(q;q)_(2n+1) / poch(-q;q)_(2n+2)",
        _ => return None,
    })
}

/// Builds a corpus series by name, truncated at the order.
pub fn catalog_build(id: &str, order: i64) -> Result<QSeries, CoreError> {
    let bound = exp_int(order);
    if let Some(text) = catalog_descriptor(id) {
        let d = parse(text).expect("registered descriptor parses");
        return sum_terms(&d, order);
    }
    match id {
        // Fine's F(1, -1; -1) = sum (q)_n / (-q)_n (-1)^n.
        "M1" => fine_f(
            &MonomialParam::int(1, 0),
            &MonomialParam::int(-1, 0),
            &MonomialParam::int(-1, 0),
            order,
        ),
        // Fine's F(-1, 1; -1) = sum (-q)_n / (q)_n (-1)^n.
        "F2" => fine_f(
            &MonomialParam::int(-1, 0),
            &MonomialParam::int(1, 0),
            &MonomialParam::int(-1, 0),
            order,
        ),
        // 1 + 2 sum_{n>=1} q^(n(n+1)/2) / ((-q)_n (1 + q^n)): the n = 0
        // summand of the descriptor equals 1/2, so doubling the n >= 0 sum
        // absorbs the constant.
        "fbar" => {
            let d = parse("q^((n^2+n)/2) / poch(-q;q)_n / (1+q^(n))")
                .expect("registered descriptor parses");
            Ok(sum_terms(&d, order)?.scale(&rat_int(2)))
        }
        // (1/(q)_inf) sum_{n>=1} (-1)^(n+1) q^(n(n+1)/2) / (1 - q^n).
        "C1" => {
            let d = parse("(-1)^n * q^((n^2+3n+2)/2) / (1-q^(n+1))")
                .expect("registered descriptor parses");
            let inner = sum_terms(&d, order)?;
            let pinf = QSeries::poch_infinite(&Rat::one(), Exp::one(), Exp::one(), bound)?;
            inner.div(&pinf)
        }
        // 1/2 + sum_{n>=1} q^n (-q)_(n-1) / (q^2;q^2)_n.
        "G1" => {
            let d = parse("q^(n+1) * poch(-q;q)_n / poch(q^2;q^2)_(n+1)")
                .expect("registered descriptor parses");
            Ok(sum_terms(&d, order)?.add(&QSeries::constant(rat(1, 2), bound)))
        }
        "kontsevich_tails" => kontsevich_tails(order),
        "eta" => eta_quotient(&[(1, 1)], order),
        "eta_tilde" => Ok(theta_build(&theta_descriptor("eta_tilde")?, order)),
        _ => Err(CoreError::UnknownSeries(String::from(id))),
    }
}
