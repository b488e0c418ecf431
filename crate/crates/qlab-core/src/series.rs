//! Truncated exact Laurent series in q^(1/D).
//!
//! A [`QSeries`] stores dense rational coefficients for exponents k/D with k
//! in a contiguous window `[min_exp, min_exp + len)`, together with an honest
//! truncation bound `trunc`: all coefficients for exponents strictly below
//! `trunc/D` are exact, and nothing is known from `trunc/D` on. Every
//! operation propagates the bound pessimistically and never fabricates
//! coefficients beyond it.
//!
//! Canonical form: a nonzero series has `coeffs[0] != 0` and a nonzero last
//! entry (interior zeros are stored); the zero-in-window series has empty
//! `coeffs` and `min_exp == trunc`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::min;
use core::fmt;
use core::fmt::Write as _;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::CoreError;

/// Arbitrary-precision rational coefficient.
pub type Rat = num_rational::BigRational;

/// Exact rational exponent (machine-word sized; exponents stay tiny).
pub type Exp = num_rational::Rational64;

/// Truncated Laurent series in q^(1/grain) with rational coefficients.
#[derive(Clone, Debug)]
pub struct QSeries {
    grain: u32,
    min_exp: i64,
    coeffs: Vec<Rat>,
    trunc: i64,
}

pub(crate) fn lcm_u32(a: u32, b: u32) -> u32 {
    (u64::from(a) / u64::from(a.gcd(&b)) * u64::from(b))
        .try_into()
        .expect("grain lcm overflow")
}

impl QSeries {
    // ---- constructors ----------------------------------------------------

    /// The zero series known modulo q^trunc.
    pub fn zero(trunc: Exp) -> Self {
        let grain = *trunc.denom() as u32;
        let t = *trunc.numer();
        QSeries {
            grain,
            min_exp: t,
            coeffs: Vec::new(),
            trunc: t,
        }
    }

    /// The zero series at an explicit grain, trunc in units of 1/grain.
    pub fn zero_grain(grain: u32, trunc_units: i64) -> Self {
        assert!(grain >= 1, "grain must be positive");
        QSeries {
            grain,
            min_exp: trunc_units,
            coeffs: Vec::new(),
            trunc: trunc_units,
        }
    }

    /// The constant series 1.
    pub fn one(trunc: Exp) -> Self {
        Self::monomial(Rat::one(), Exp::zero(), trunc)
    }

    /// A constant series.
    pub fn constant(c: Rat, trunc: Exp) -> Self {
        Self::monomial(c, Exp::zero(), trunc)
    }

    /// The monomial c * q^e, known modulo q^trunc.
    pub fn monomial(c: Rat, e: Exp, trunc: Exp) -> Self {
        let grain = lcm_u32(*e.denom() as u32, *trunc.denom() as u32);
        let g = i64::from(grain);
        let eu = e.numer() * (g / e.denom());
        let tu = trunc.numer() * (g / trunc.denom());
        if c.is_zero() || eu >= tu {
            return Self::zero_grain(grain, tu);
        }
        QSeries {
            grain,
            min_exp: eu,
            coeffs: vec![c],
            trunc: tu,
        }
    }

    /// Build from explicit parts (units of 1/grain); the window is
    /// canonicalized and clipped to the truncation bound.
    pub fn from_units(grain: u32, min_exp: i64, coeffs: Vec<Rat>, trunc_units: i64) -> Self {
        assert!(grain >= 1, "grain must be positive");
        let mut s = QSeries {
            grain,
            min_exp,
            coeffs,
            trunc: trunc_units,
        };
        s.canonicalize();
        s
    }

    /// Build from integer coefficients starting at exponent `min_exp` (grain 1).
    pub fn from_int_coeffs(min_exp: i64, coeffs: &[i64], trunc: i64) -> Self {
        let v = coeffs.iter().map(|&c| Rat::from_integer(c.into())).collect();
        Self::from_units(1, min_exp, v, trunc)
    }

    fn canonicalize(&mut self) {
        // Clip anything at or past the truncation bound.
        if self.min_exp >= self.trunc {
            self.coeffs.clear();
        } else {
            let window = (self.trunc - self.min_exp) as usize;
            self.coeffs.truncate(window);
        }
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.min_exp += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.min_exp = self.trunc;
        }
    }

    // ---- accessors -------------------------------------------------------

    /// Exponent denominator D: all exponents are multiples of 1/D.
    pub fn grain(&self) -> u32 {
        self.grain
    }

    /// Truncation bound in units of 1/grain.
    pub fn trunc_units(&self) -> i64 {
        self.trunc
    }

    /// Truncation bound as an exponent value.
    pub fn trunc_exp(&self) -> Exp {
        Exp::new(self.trunc, i64::from(self.grain))
    }

    /// True if every known coefficient is zero.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Number of stored coefficients (canonical window width).
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    /// True if no coefficients are stored.
    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Valuation (lowest nonzero exponent) in units, if nonzero.
    pub fn min_exp_units(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then_some(self.min_exp)
    }

    /// Valuation as an exponent value, if nonzero.
    pub fn valuation(&self) -> Option<Exp> {
        self.min_exp_units()
            .map(|u| Exp::new(u, i64::from(self.grain)))
    }

    /// Coefficient at `k` units of 1/grain; `None` when past the bound.
    pub fn coeff_units(&self, k: i64) -> Option<Rat> {
        if k >= self.trunc {
            return None;
        }
        let i = k - self.min_exp;
        if i < 0 || i as usize >= self.coeffs.len() {
            Some(Rat::zero())
        } else {
            Some(self.coeffs[i as usize].clone())
        }
    }

    /// Coefficient of q^e; `None` when e is at or past the truncation bound.
    pub fn coeff(&self, e: Exp) -> Option<Rat> {
        let g = i64::from(self.grain);
        if g % e.denom() == 0 {
            return self.coeff_units(e.numer() * (g / e.denom()));
        }
        // Exponent not representable at this grain: zero inside the window.
        if e < self.trunc_exp() {
            Some(Rat::zero())
        } else {
            None
        }
    }

    /// Coefficient of q^k for integer k.
    pub fn coeff_int(&self, k: i64) -> Option<Rat> {
        self.coeff(Exp::from_integer(k))
    }

    /// Iterator over stored (exponent, coefficient) pairs, ascending.
    pub fn terms(&self) -> impl Iterator<Item = (Exp, &Rat)> {
        let g = i64::from(self.grain);
        let m = self.min_exp;
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, c)| (Exp::new(m + i as i64, g), c))
    }

    // ---- grain handling --------------------------------------------------

    /// Rebase to a multiple of the current grain.
    pub fn rebase(&self, grain: u32) -> QSeries {
        assert!(
            grain % self.grain == 0,
            "rebase target must be a multiple of the grain"
        );
        let f = i64::from(grain / self.grain);
        if f == 1 {
            return self.clone();
        }
        if self.coeffs.is_empty() {
            return QSeries::zero_grain(grain, self.trunc * f);
        }
        let mut coeffs = vec![Rat::zero(); (self.coeffs.len() - 1) * f as usize + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * f as usize] = c.clone();
        }
        QSeries {
            grain,
            min_exp: self.min_exp * f,
            coeffs,
            trunc: self.trunc * f,
        }
    }

    /// Reduce the grain to the smallest one representing every nonzero
    /// exponent and the truncation bound exactly.
    pub fn normalize_grain(&self) -> QSeries {
        if self.grain == 1 {
            return self.clone();
        }
        // min_exp is a nonzero exponent (canonical form) or equals trunc.
        let mut g = i64::from(self.grain).gcd(&self.trunc);
        for (i, c) in self.coeffs.iter().enumerate() {
            if g == 1 {
                break;
            }
            if !c.is_zero() {
                g = g.gcd(&(self.min_exp + i as i64));
            }
        }
        if g <= 1 {
            return self.clone();
        }
        let coeffs = self.coeffs.iter().step_by(g as usize).cloned().collect();
        QSeries {
            grain: self.grain / g as u32,
            min_exp: self.min_exp / g,
            coeffs,
            trunc: self.trunc / g,
        }
    }

    fn to_common(&self, other: &QSeries) -> (QSeries, QSeries) {
        let g = lcm_u32(self.grain, other.grain);
        (self.rebase(g), other.rebase(g))
    }

    // ---- ring operations -------------------------------------------------

    /// Coefficient-wise sum; the bound is the minimum of the inputs'.
    pub fn add(&self, other: &QSeries) -> QSeries {
        let (a, b) = self.to_common(other);
        let trunc = min(a.trunc, b.trunc);
        let start = min(
            min(a.min_exp, b.min_exp),
            trunc, // both zero
        );
        if start >= trunc {
            return QSeries::zero_grain(a.grain, trunc);
        }
        let mut coeffs = vec![Rat::zero(); (trunc - start) as usize];
        for s in [&a, &b] {
            for (i, c) in s.coeffs.iter().enumerate() {
                let k = s.min_exp + i as i64;
                if k < trunc {
                    coeffs[(k - start) as usize] += c;
                }
            }
        }
        QSeries::from_units(a.grain, start, coeffs, trunc)
    }

    /// Coefficient-wise difference.
    pub fn sub(&self, other: &QSeries) -> QSeries {
        self.add(&other.neg())
    }

    /// Negation.
    pub fn neg(&self) -> QSeries {
        QSeries {
            grain: self.grain,
            min_exp: self.min_exp,
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
            trunc: self.trunc,
        }
    }

    /// Scalar multiple.
    pub fn scale(&self, c: &Rat) -> QSeries {
        if c.is_zero() {
            return QSeries::zero_grain(self.grain, self.trunc);
        }
        QSeries {
            grain: self.grain,
            min_exp: self.min_exp,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
            trunc: self.trunc,
        }
    }

    /// Multiply by q^e (shifts the truncation bound along).
    pub fn shift(&self, e: Exp) -> QSeries {
        let g = lcm_u32(self.grain, *e.denom() as u32);
        let s = self.rebase(g);
        let u = e.numer() * (i64::from(g) / e.denom());
        QSeries {
            grain: g,
            min_exp: s.min_exp + u,
            coeffs: s.coeffs,
            trunc: s.trunc + u,
        }
    }

    /// Multiply by q^(u/grain) without changing grain.
    pub fn shift_units(&self, u: i64) -> QSeries {
        QSeries {
            grain: self.grain,
            min_exp: self.min_exp + u,
            coeffs: self.coeffs.clone(),
            trunc: self.trunc + u,
        }
    }

    /// Cauchy product. The result is known modulo
    /// q^min(Ta + val_b, Tb + val_a).
    pub fn mul(&self, other: &QSeries) -> QSeries {
        let (a, b) = self.to_common(other);
        // A zero window still carries its bound: treat its valuation as the
        // bound itself (the best possible knowledge about the product).
        let va = a.min_exp; // == trunc when zero, by canonical form
        let vb = b.min_exp;
        let trunc = min(a.trunc + vb, b.trunc + va);
        if a.coeffs.is_empty() || b.coeffs.is_empty() {
            return QSeries::zero_grain(a.grain, trunc);
        }
        let start = va + vb;
        if start >= trunc {
            return QSeries::zero_grain(a.grain, trunc);
        }
        let width = (trunc - start) as usize;
        let mut coeffs = vec![Rat::zero(); width];
        for (i, ca) in a.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            if i >= width {
                break;
            }
            let limit = width - i;
            for (j, cb) in b.coeffs.iter().enumerate().take(limit) {
                if cb.is_zero() {
                    continue;
                }
                coeffs[i + j] += ca * cb;
            }
        }
        QSeries::from_units(a.grain, start, coeffs, trunc)
    }

    /// Multiplicative inverse. The unit part after factoring q^val is
    /// inverted by the standard recurrence; the bound shrinks by 2*val.
    pub fn invert(&self) -> Result<QSeries, CoreError> {
        if self.coeffs.is_empty() {
            return Err(CoreError::ZeroSeries);
        }
        let m0 = self.min_exp;
        let lead = self.coeffs[0].clone();
        let width = (self.trunc - m0) as usize;
        // u = self / (lead * q^m0) - 1 has valuation > 0.
        let mut inv = vec![Rat::zero(); width];
        inv[0] = Rat::one();
        for k in 1..width {
            let mut acc = Rat::zero();
            for j in 1..=k {
                let uj = match self.coeffs.get(j) {
                    Some(c) if !c.is_zero() => c / &lead,
                    _ => continue,
                };
                acc += uj * &inv[k - j];
            }
            inv[k] = -acc;
        }
        let lead_inv = Rat::one() / lead;
        for c in inv.iter_mut() {
            *c *= &lead_inv;
        }
        Ok(QSeries::from_units(
            self.grain,
            -m0,
            inv,
            self.trunc - 2 * m0,
        ))
    }

    /// Quotient a/b = a * invert(b).
    pub fn div(&self, other: &QSeries) -> Result<QSeries, CoreError> {
        Ok(self.mul(&other.invert()?))
    }

    /// Integer power; negative powers go through invert.
    pub fn pow(&self, k: i64) -> Result<QSeries, CoreError> {
        if k < 0 {
            return self.invert()?.pow(-k);
        }
        let mut acc = QSeries::one(self.trunc_exp());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        Ok(acc)
    }

    /// Exponent dilation e -> r*e for positive rational r (substitution
    /// q -> q^r); the resulting grain is normalized.
    pub fn dilate(&self, r: Exp) -> QSeries {
        assert!(r > Exp::zero(), "dilation ratio must be positive");
        let rn = *r.numer();
        let rd = *r.denom();
        // New exponents k*rn / (grain*rd): widen the grain by rd, stretch
        // unit indices by rn.
        let grain = self.grain.checked_mul(rd as u32).expect("grain overflow");
        if self.coeffs.is_empty() {
            return QSeries::zero_grain(grain, self.trunc * rn).normalize_grain();
        }
        let stride = rn as usize;
        let mut coeffs = vec![Rat::zero(); (self.coeffs.len() - 1) * stride + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * stride] = c.clone();
        }
        QSeries::from_units(grain, self.min_exp * rn, coeffs, self.trunc * rn).normalize_grain()
    }

    /// Restrict the bound to an earlier one (no-op if already tighter).
    pub fn truncate(&self, t: Exp) -> QSeries {
        let g = lcm_u32(self.grain, *t.denom() as u32);
        let s = self.rebase(g);
        let tu = t.numer() * (i64::from(g) / t.denom());
        s.truncate_units(tu)
    }

    /// Restrict the bound in units of 1/grain.
    pub fn truncate_units(&self, tu: i64) -> QSeries {
        let tu = min(tu, self.trunc);
        QSeries::from_units(self.grain, self.min_exp, self.coeffs.clone(), tu)
    }

    // ---- binomial workhorses ---------------------------------------------

    /// Multiply by (1 - c*q^(m/grain)) in O(len).
    pub fn mul_binomial_units(&self, c: &Rat, m: i64) -> QSeries {
        if c.is_zero() {
            return self.clone();
        }
        if m == 0 {
            return self.scale(&(Rat::one() - c));
        }
        let trunc = self.trunc + min(0, m);
        if self.coeffs.is_empty() {
            return QSeries::zero_grain(self.grain, trunc);
        }
        let start = min(self.min_exp, self.min_exp + m);
        if start >= trunc {
            return QSeries::zero_grain(self.grain, trunc);
        }
        let mut coeffs = vec![Rat::zero(); (trunc - start) as usize];
        for (i, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let k = self.min_exp + i as i64;
            if k < trunc {
                coeffs[(k - start) as usize] += x;
            }
            let ks = k + m;
            if ks < trunc {
                coeffs[(ks - start) as usize] -= c * x;
            }
        }
        QSeries::from_units(self.grain, start, coeffs, trunc)
    }

    /// Divide by (1 - c*q^(m/grain)) in O(len). Any m is accepted: m = 0
    /// divides by the constant 1 - c (erroring when c = 1), and m < 0 is
    /// normalized through (1 - c*q^m) = -c*q^m * (1 - (1/c)*q^(-m)).
    pub fn div_binomial_units(&self, c: &Rat, m: i64) -> Result<QSeries, CoreError> {
        if c.is_zero() {
            return Ok(self.clone());
        }
        if m == 0 {
            let d = Rat::one() - c;
            if d.is_zero() {
                return Err(CoreError::ZeroDenominator);
            }
            return Ok(self.scale(&(Rat::one() / d)));
        }
        if m < 0 {
            let cinv = Rat::one() / c;
            return self
                .scale(&-cinv.clone())
                .shift_units(-m)
                .div_binomial_units(&cinv, -m);
        }
        if self.coeffs.is_empty() {
            return Ok(self.clone());
        }
        // y_k = x_k + c * y_{k-m}, ascending over the full window.
        let width = (self.trunc - self.min_exp) as usize;
        let mut y = vec![Rat::zero(); width];
        for (i, x) in self.coeffs.iter().enumerate() {
            y[i] = x.clone();
        }
        for k in 0..width {
            if (k as i64) >= m {
                let prev = y[k - m as usize].clone();
                if !prev.is_zero() {
                    y[k] += c * prev;
                }
            }
        }
        Ok(QSeries::from_units(self.grain, self.min_exp, y, self.trunc))
    }

    /// Multiply by (1 - c*q^e).
    pub fn mul_one_minus(&self, c: &Rat, e: Exp) -> QSeries {
        let g = lcm_u32(self.grain, *e.denom() as u32);
        let s = self.rebase(g);
        let m = e.numer() * (i64::from(g) / e.denom());
        s.mul_binomial_units(c, m)
    }

    /// Divide by (1 - c*q^e).
    pub fn div_one_minus(&self, c: &Rat, e: Exp) -> Result<QSeries, CoreError> {
        let g = lcm_u32(self.grain, *e.denom() as u32);
        let s = self.rebase(g);
        let m = e.numer() * (i64::from(g) / e.denom());
        s.div_binomial_units(c, m)
    }

    /// Multiply (or divide, when `invert` is set) by the factors
    /// prod_j (1 - coef * q^(base + j*step)) for j = 0..count, or — when
    /// `count` is `None` — until the factors stop touching the window.
    ///
    /// Factors of nonpositive exponent are legitimate here; the strict
    /// infinite-product entry point enforces positivity separately.
    pub fn mul_poch_factors(
        &self,
        coef: &Rat,
        base: Exp,
        step: Exp,
        count: Option<u64>,
        invert: bool,
    ) -> Result<QSeries, CoreError> {
        assert!(step > Exp::zero(), "pochhammer step must be positive");
        if coef.is_zero() {
            return Ok(self.clone());
        }
        let g = lcm_u32(
            self.grain,
            lcm_u32(*base.denom() as u32, *step.denom() as u32),
        );
        let mut s = self.rebase(g);
        let gg = i64::from(g);
        let b = base.numer() * (gg / base.denom());
        let st = step.numer() * (gg / step.denom());
        let mut j: u64 = 0;
        loop {
            if let Some(n) = count {
                if j >= n {
                    break;
                }
            }
            let m = b + st * j as i64;
            if count.is_none() {
                // Window width shrinks only through negative-exponent factors,
                // which cannot occur infinitely often (step > 0); once the
                // factor exponent clears the window the rest are 1.
                let width = s.trunc - min(s.min_exp, s.trunc);
                if m >= width && m > 0 {
                    break;
                }
            }
            s = if invert {
                s.div_binomial_units(coef, m)?
            } else {
                s.mul_binomial_units(coef, m)
            };
            j += 1;
            if j > (1 << 40) {
                return Err(CoreError::NonConvergent);
            }
        }
        Ok(s)
    }

    /// Finite q-Pochhammer product prod_{j=0}^{n-1} (1 - coef*q^(base+j*step)).
    pub fn poch_finite(coef: &Rat, base: Exp, step: Exp, n: u64, trunc: Exp) -> QSeries {
        QSeries::one(trunc)
            .mul_poch_factors(coef, base, step, Some(n), false)
            .expect("finite pochhammer multiplication cannot fail")
    }

    /// Infinite q-Pochhammer product, truncated. Errors with
    /// `DivergentProduct` when a factor would have valuation <= 0.
    pub fn poch_infinite(coef: &Rat, base: Exp, step: Exp, trunc: Exp) -> Result<QSeries, CoreError> {
        if !coef.is_zero() && base <= Exp::zero() {
            return Err(CoreError::DivergentProduct);
        }
        QSeries::one(trunc).mul_poch_factors(coef, base, step, None, false)
    }

    // ---- comparison ------------------------------------------------------

    /// True when the two series agree on every exponent below the smaller
    /// truncation bound.
    pub fn agrees_with(&self, other: &QSeries) -> bool {
        self.first_mismatch(other).is_none()
    }

    /// Smallest exponent below the common bound where the series differ.
    pub fn first_mismatch(&self, other: &QSeries) -> Option<Exp> {
        let (a, b) = self.to_common(other);
        let trunc = min(a.trunc, b.trunc);
        let start = min(a.min_exp, b.min_exp);
        for k in start..trunc {
            let ca = a.coeff_units(k).unwrap_or_else(Rat::zero);
            let cb = b.coeff_units(k).unwrap_or_else(Rat::zero);
            if ca != cb {
                return Some(Exp::new(k, i64::from(a.grain)));
            }
        }
        None
    }

    // ---- serialization helpers ------------------------------------------

    /// Canonical byte encoding of the nonzero coefficients, independent of
    /// grain and truncation bound: for each nonzero term in ascending
    /// exponent order, the reduced exponent and the reduced coefficient.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for (e, c) in self.terms() {
            if c.is_zero() {
                continue;
            }
            out.extend_from_slice(&e.numer().to_le_bytes());
            out.extend_from_slice(&e.denom().to_le_bytes());
            let (sign, mag) = c.numer().clone().into_parts();
            out.push(match sign {
                num_bigint::Sign::Minus => 0xff,
                _ => 1,
            });
            let nb = mag.to_bytes_le();
            out.extend_from_slice(&(nb.len() as u32).to_le_bytes());
            out.extend_from_slice(&nb);
            let db = c.denom().to_biguint().expect("positive denominator").to_bytes_le();
            out.extend_from_slice(&(db.len() as u32).to_le_bytes());
            out.extend_from_slice(&db);
        }
        out
    }

    /// CSV export: header `k,exp_num,exp_den,coeff_num,coeff_den`, one row
    /// per stored coefficient (k is the exponent in units of 1/grain).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,exp_num,exp_den,coeff_num,coeff_den\n");
        let g = i64::from(self.grain);
        for (i, c) in self.coeffs.iter().enumerate() {
            let k = self.min_exp + i as i64;
            let e = Exp::new(k, g);
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                k,
                e.numer(),
                e.denom(),
                c.numer(),
                c.denom()
            );
        }
        out
    }
}

impl PartialEq for QSeries {
    /// Structural equality at a common grain: identical windows, identical
    /// coefficients, identical truncation bound.
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = self.to_common(other);
        a.trunc == b.trunc && a.min_exp == b.min_exp && a.coeffs == b.coeffs
    }
}

impl Eq for QSeries {}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        let shown = 12usize;
        for (i, (e, c)) in self.terms().filter(|(_, c)| !c.is_zero()).enumerate() {
            if i >= shown {
                write!(f, " + ...")?;
                break;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if wrote {
                f.write_str(if neg { " - " } else { " + " })?;
            } else if neg {
                f.write_str("-")?;
            }
            wrote = true;
            let unit_coeff = mag.is_one();
            if !unit_coeff || e.is_zero() {
                write!(f, "{mag}")?;
            }
            if !e.is_zero() {
                if !unit_coeff {
                    write!(f, "*")?;
                }
                if e.is_one() {
                    write!(f, "q")?;
                } else if e.is_integer() {
                    write!(f, "q^{}", e.numer())?;
                } else {
                    write!(f, "q^({}/{})", e.numer(), e.denom())?;
                }
            }
        }
        if !wrote {
            write!(f, "0")?;
        }
        let t = self.trunc_exp();
        if t.is_integer() {
            write!(f, " + O(q^{})", t.numer())
        } else {
            write!(f, " + O(q^({}/{}))", t.numer(), t.denom())
        }
    }
}
