//! Truncated polynomials in an auxiliary variable x with [`QSeries`]
//! coefficients.
//!
//! A [`BiSeries`] is known modulo x^var_trunc and modulo q^trunc in every
//! coefficient; all coefficients share one grain and one q-truncation. The
//! layer exists to carry two-variable functional equations and to read off
//! single-variable identities by specializing x to a monomial in q.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::min;

use num_traits::{One, Zero};

use crate::error::CoreError;
use crate::series::{lcm_u32, Exp, QSeries, Rat};

/// Polynomial in x of degree < var_trunc with q-series coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct BiSeries {
    var_trunc: usize,
    coeffs: Vec<QSeries>,
}

impl BiSeries {
    /// The zero polynomial with the given bounds.
    pub fn zero(var_trunc: usize, grain: u32, q_trunc_units: i64) -> Self {
        assert!(var_trunc >= 1, "variable bound must be positive");
        BiSeries {
            var_trunc,
            coeffs: vec![QSeries::zero_grain(grain, q_trunc_units); var_trunc],
        }
    }

    /// The constant polynomial 1.
    pub fn one(var_trunc: usize, grain: u32, q_trunc_units: i64) -> Self {
        let mut s = Self::zero(var_trunc, grain, q_trunc_units);
        s.coeffs[0] = QSeries::one(Exp::new(q_trunc_units, i64::from(grain)));
        s
    }

    /// Build from explicit x-coefficients; they are rebased to a shared
    /// grain and truncated to a shared q-bound (the tightest present).
    pub fn from_coeffs(var_trunc: usize, coeffs: Vec<QSeries>) -> Self {
        assert!(!coeffs.is_empty() && coeffs.len() <= var_trunc);
        let grain = coeffs.iter().fold(1u32, |g, c| lcm_u32(g, c.grain()));
        let mut rebased: Vec<QSeries> = coeffs.iter().map(|c| c.rebase(grain)).collect();
        let t = rebased.iter().map(QSeries::trunc_units).min().unwrap();
        for c in rebased.iter_mut() {
            *c = c.truncate_units(t);
        }
        while rebased.len() < var_trunc {
            rebased.push(QSeries::zero_grain(grain, t));
        }
        BiSeries {
            var_trunc,
            coeffs: rebased,
        }
    }

    /// Degree bound in x.
    pub fn var_trunc(&self) -> usize {
        self.var_trunc
    }

    /// Shared grain of the coefficients.
    pub fn grain(&self) -> u32 {
        self.coeffs[0].grain()
    }

    /// Shared q-truncation bound in units of 1/grain.
    pub fn q_trunc_units(&self) -> i64 {
        self.coeffs[0].trunc_units()
    }

    /// Coefficient of x^j.
    pub fn coeff_x(&self, j: usize) -> &QSeries {
        &self.coeffs[j]
    }

    fn to_common(&self, other: &BiSeries) -> (BiSeries, BiSeries) {
        let m = min(self.var_trunc, other.var_trunc);
        let g = lcm_u32(self.grain(), other.grain());
        let t = min(
            self.q_trunc_units() * i64::from(g / self.grain()),
            other.q_trunc_units() * i64::from(g / other.grain()),
        );
        let conv = |s: &BiSeries| BiSeries {
            var_trunc: m,
            coeffs: s.coeffs[..m]
                .iter()
                .map(|c| c.rebase(g).truncate_units(t))
                .collect(),
        };
        (conv(self), conv(other))
    }

    /// Coefficient-wise sum at the common bounds.
    pub fn add(&self, other: &BiSeries) -> BiSeries {
        let (a, b) = self.to_common(other);
        BiSeries {
            var_trunc: a.var_trunc,
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(x, y)| x.add(y))
                .collect(),
        }
    }

    /// Coefficient-wise difference.
    pub fn sub(&self, other: &BiSeries) -> BiSeries {
        self.add(&other.neg())
    }

    /// Negation.
    pub fn neg(&self) -> BiSeries {
        BiSeries {
            var_trunc: self.var_trunc,
            coeffs: self.coeffs.iter().map(QSeries::neg).collect(),
        }
    }

    /// Multiply every coefficient by a series in q alone.
    pub fn scale_q(&self, s: &QSeries) -> BiSeries {
        Self::from_coeffs(
            self.var_trunc,
            self.coeffs.iter().map(|c| c.mul(s)).collect(),
        )
    }

    /// Double Cauchy product truncated in both variables.
    pub fn bi_mul(&self, other: &BiSeries) -> BiSeries {
        let (a, b) = self.to_common(other);
        let m = a.var_trunc;
        let t = a.q_trunc_units();
        let g = a.grain();
        let mut coeffs = vec![QSeries::zero_grain(g, t); m];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate().take(m - i) {
                if y.is_zero() {
                    continue;
                }
                coeffs[i + j] = coeffs[i + j].add(&x.mul(y).truncate_units(t));
            }
        }
        BiSeries {
            var_trunc: m,
            coeffs,
        }
    }

    /// Substitution x -> x*q^m: the x^j coefficient picks up q^{j m}. The
    /// shared q-bound is kept, so information shifted past it is dropped.
    pub fn substitute_xq(&self, m: Exp) -> BiSeries {
        assert!(m > Exp::zero(), "substitution exponent must be positive");
        let g = lcm_u32(self.grain(), *m.denom() as u32);
        let t = self.q_trunc_units() * i64::from(g / self.grain());
        let mu = m.numer() * (i64::from(g) / m.denom());
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| {
                c.rebase(g)
                    .shift_units(mu * j as i64)
                    .truncate_units(t)
            })
            .collect();
        BiSeries {
            var_trunc: self.var_trunc,
            coeffs,
        }
    }

    /// Multiply by (1 - c*q^e*x^k).
    pub fn mul_x_binomial(&self, c: &Rat, e: Exp, k: usize) -> BiSeries {
        if c.is_zero() {
            return self.clone();
        }
        if k == 0 {
            return Self::from_coeffs(
                self.var_trunc,
                self.coeffs.iter().map(|x| x.mul_one_minus(c, e)).collect(),
            );
        }
        let mut coeffs = self.coeffs.clone();
        for j in k..self.var_trunc {
            let lower = self.coeffs[j - k].shift(e).scale(&-c.clone());
            coeffs[j] = coeffs[j].add(&lower);
        }
        Self::from_coeffs(self.var_trunc, coeffs)
    }

    /// Divide by (1 - c*q^e*x^k) for k >= 1: ascending recurrence
    /// y_j = x_j + c*q^e*y_{j-k}.
    pub fn div_x_binomial(&self, c: &Rat, e: Exp, k: usize) -> BiSeries {
        assert!(k >= 1, "x-power must be positive for this recurrence");
        if c.is_zero() {
            return self.clone();
        }
        let mut y = self.coeffs.clone();
        for j in k..self.var_trunc {
            let lower = y[j - k].shift(e).scale(c);
            y[j] = y[j].add(&lower);
        }
        Self::from_coeffs(self.var_trunc, y)
    }

    /// Specialize x = c*q^e. The exponent must be at least one grain unit,
    /// so the x-bound translates into the honest q-bound e*var_trunc.
    pub fn specialize_x(&self, c: &Rat, e: Exp) -> Result<QSeries, CoreError> {
        let g = i64::from(self.grain());
        if g % e.denom() != 0 {
            return Err(CoreError::Semantics(String::from(
                "specialization exponent is not representable at the shared grain",
            )));
        }
        let eu = e.numer() * (g / e.denom());
        if eu < 1 {
            return Err(CoreError::Semantics(String::from(
                "specialization exponent must be at least one grain unit",
            )));
        }
        let t = min(
            self.q_trunc_units(),
            eu.saturating_mul(self.var_trunc as i64),
        );
        let mut acc = QSeries::zero_grain(self.grain(), t);
        let mut cp = Rat::one();
        for (j, coeff) in self.coeffs.iter().enumerate() {
            if cp.is_zero() {
                break;
            }
            if !coeff.is_zero() {
                let term = coeff
                    .shift_units(eu * j as i64)
                    .scale(&cp)
                    .truncate_units(t);
                acc = acc.add(&term);
            }
            cp *= c;
        }
        Ok(acc.truncate_units(t))
    }
}
