//! Symbolic q-hypergeometric summands H_n(q): a small text language, exact
//! expansion at given n, the formal q -> q^-1 transform, and n -> infinity
//! limits.
//!
//! A [`TermDescriptor`] is a product
//!
//! ```text
//!   (-1)^n * const * q^((A n^2 + B n + C)/D)
//!     * prod PochFactor^(+-power) * prod LinFactor^(+-1)
//! ```
//!
//! where a [`PochFactor`] is (c q^e; q^s)_{u n + v} and a [`LinFactor`] is
//! (1 +- q^{u n + v}). The fragment is deliberately small: it covers every
//! summand this crate needs while staying closed under [`q_inverse`].
//!
//! Grammar (exact; whitespace is free between tokens):
//!
//! ```text
//!   term   := factor { ("*" | "/") factor }
//!   factor := "(-1)^n"
//!           | rational                      (integer, optionally negative)
//!           | "q^(" poly ")" | "q^" uint | "q"
//!           | "poch(" base ";" step ")_" len [ "^" int ]
//!           | "(1" ("+" | "-") " q^(" lin ")" ")"
//!   base   := ["-"] [ uint ["/" uint] "*" ] [ "q" [ "^" expnt ] ]
//!           | ["-"] uint ["/" uint]
//!   step   := "q" [ "^" expnt ]
//!   len    := "n" | uint | "(" lin ")"
//!   expnt  := uint | "(" poly ")"
//!   poly   := quadratic expression in n over rationals with + - * / ( )
//!   lin    := linear expression in n with integer coefficients
//! ```
//!
//! A negative Pochhammer power `^-k` is stored as the opposite position with
//! power k.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt::Write as _;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::CoreError;
use crate::series::{Exp, QSeries, Rat};

/// Overall sign pattern of the summand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignMode {
    /// No n-dependent sign.
    Plus,
    /// A factor (-1)^n.
    Alternating,
}

/// Which side of the fraction bar a factor sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Position {
    Numerator,
    Denominator,
}

impl Position {
    fn flip(self) -> Position {
        match self {
            Position::Numerator => Position::Denominator,
            Position::Denominator => Position::Numerator,
        }
    }
}

/// q-Pochhammer factor (c q^e; q^s)_{u n + v}, raised to `power`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PochFactor {
    /// Rational coefficient c of the base monomial.
    pub coef: Rat,
    /// Exponent e of the base monomial.
    pub base_exp: Exp,
    /// Step exponent s > 0.
    pub step: Exp,
    /// Length u n + v with u in {0, 1, 2} and v >= 0.
    pub length: (u32, i64),
    pub position: Position,
    /// Repetition count, at least 1.
    pub power: u32,
}

/// Binomial factor (1 + sign * q^{u n + v}).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinFactor {
    /// Exponent u n + v.
    pub exp: (i64, i64),
    /// +1 or -1.
    pub sign: i8,
    pub position: Position,
}

/// Symbolic description of one summand H_n(q).
#[derive(Clone, Debug, PartialEq)]
pub struct TermDescriptor {
    pub sign_mode: SignMode,
    pub constant: Rat,
    /// q-exponent (A n^2 + B n + C)/D with D >= 1, gcd-reduced.
    pub exp_poly: (i64, i64, i64, i64),
    pub factors: Vec<PochFactor>,
    pub linear_factors: Vec<LinFactor>,
}

/// Outcome of [`limit_at_infinity`]: absence of a limit is a value.
#[derive(Clone, Debug, PartialEq)]
pub enum LimitResult {
    Series(QSeries),
    NoLimit,
}

impl Default for TermDescriptor {
    fn default() -> Self {
        Self::new()
    }
}

impl TermDescriptor {
    /// The constant summand 1.
    pub fn new() -> Self {
        TermDescriptor {
            sign_mode: SignMode::Plus,
            constant: Rat::one(),
            exp_poly: (0, 0, 0, 1),
            factors: Vec::new(),
            linear_factors: Vec::new(),
        }
    }

    // Builder helpers for programmatic catalog construction.

    /// Toggle the (-1)^n factor.
    pub fn alternating(mut self) -> Self {
        self.sign_mode = match self.sign_mode {
            SignMode::Plus => SignMode::Alternating,
            SignMode::Alternating => SignMode::Plus,
        };
        self
    }

    /// Multiply the constant prefactor.
    pub fn times_const(mut self, c: Rat) -> Self {
        self.constant *= c;
        self
    }

    /// Add (a2 n^2 + a1 n + a0) to the q-exponent.
    pub fn times_q_pow(mut self, a2: Exp, a1: Exp, a0: Exp) -> Self {
        let (qa, qb, qc) = (
            self.exp_a2() + a2,
            self.exp_a1() + a1,
            self.exp_a0() + a0,
        );
        self.set_exp(qa, qb, qc);
        self
    }

    /// Multiply by (c q^e; q^s)_{u n + v}.
    pub fn times_poch(self, coef: Rat, base_exp: Exp, step: Exp, u: u32, v: i64) -> Self {
        self.poch(coef, base_exp, step, u, v, Position::Numerator, 1)
    }

    /// Divide by (c q^e; q^s)_{u n + v}.
    pub fn over_poch(self, coef: Rat, base_exp: Exp, step: Exp, u: u32, v: i64) -> Self {
        self.poch(coef, base_exp, step, u, v, Position::Denominator, 1)
    }

    /// Multiply by (c q^e; q^s)_{u n + v} ^ power at a given position.
    pub fn poch(
        mut self,
        coef: Rat,
        base_exp: Exp,
        step: Exp,
        u: u32,
        v: i64,
        position: Position,
        power: u32,
    ) -> Self {
        assert!(step > Exp::zero() && u <= 2 && v >= 0 && power >= 1);
        self.factors.push(PochFactor {
            coef,
            base_exp,
            step,
            length: (u, v),
            position,
            power,
        });
        self
    }

    /// Multiply by (1 + sign q^{u n + v}).
    pub fn times_lin(mut self, u: i64, v: i64, sign: i8) -> Self {
        assert!(sign == 1 || sign == -1);
        self.linear_factors.push(LinFactor {
            exp: (u, v),
            sign,
            position: Position::Numerator,
        });
        self
    }

    /// Divide by (1 + sign q^{u n + v}).
    pub fn over_lin(mut self, u: i64, v: i64, sign: i8) -> Self {
        assert!(sign == 1 || sign == -1);
        self.linear_factors.push(LinFactor {
            exp: (u, v),
            sign,
            position: Position::Denominator,
        });
        self
    }

    fn exp_a2(&self) -> Exp {
        Exp::new(self.exp_poly.0, self.exp_poly.3)
    }

    fn exp_a1(&self) -> Exp {
        Exp::new(self.exp_poly.1, self.exp_poly.3)
    }

    fn exp_a0(&self) -> Exp {
        Exp::new(self.exp_poly.2, self.exp_poly.3)
    }

    fn set_exp(&mut self, a2: Exp, a1: Exp, a0: Exp) {
        let d = a2.denom().lcm(a1.denom()).lcm(a0.denom());
        let (a, b, c) = (
            a2.numer() * (d / a2.denom()),
            a1.numer() * (d / a1.denom()),
            a0.numer() * (d / a0.denom()),
        );
        let g = a.gcd(&b).gcd(&c).gcd(&d).max(1);
        self.exp_poly = (a / g, b / g, c / g, d / g);
    }

    /// q-exponent at index n.
    pub fn exp_at(&self, n: i64) -> Exp {
        let (a, b, c, d) = self.exp_poly;
        Exp::new(a * n * n + b * n + c, d)
    }

    /// Exponent increment E(n+1) - E(n).
    pub fn delta_exp(&self, n: i64) -> Exp {
        let (a, b, _, d) = self.exp_poly;
        Exp::new(a * (2 * n + 1) + b, d)
    }

    /// True when the valuation of the n-th term grows, so direct summation
    /// terminates: exponent degree positive with positive leading growth.
    pub fn summable(&self) -> bool {
        let (a, b, _, _) = self.exp_poly;
        a > 0 || (a == 0 && b > 0)
    }

    /// Canonical form: reduced exponent tuple, sorted factor lists, equal
    /// adjacent Pochhammer factors merged into powers.
    pub fn canonicalize(mut self) -> Self {
        let (a2, a1, a0) = (self.exp_a2(), self.exp_a1(), self.exp_a0());
        self.set_exp(a2, a1, a0);
        self.factors.sort_by(poch_key_cmp);
        let mut merged: Vec<PochFactor> = Vec::with_capacity(self.factors.len());
        for f in self.factors.drain(..) {
            match merged.last_mut() {
                Some(m) if poch_key_cmp(m, &f) == Ordering::Equal => m.power += f.power,
                _ => merged.push(f),
            }
        }
        self.factors = merged;
        self.linear_factors
            .sort_by_key(|l| (l.position, l.exp, l.sign));
        self
    }

    /// Exact value of H_n(q) truncated at the integer order.
    pub fn expand(&self, n: i64, order: i64) -> Result<QSeries, CoreError> {
        assert!(n >= 0, "summand index must be nonnegative");
        let bound = Exp::from_integer(order);
        let mut c = self.constant.clone();
        if self.sign_mode == SignMode::Alternating && n % 2 != 0 {
            c = -c;
        }
        let mut s = QSeries::monomial(c, self.exp_at(n), bound);
        for f in &self.factors {
            let len = i64::from(f.length.0) * n + f.length.1;
            if len < 0 {
                return Err(CoreError::Semantics(String::from(
                    "pochhammer length is negative at this index",
                )));
            }
            for _ in 0..f.power {
                s = s.mul_poch_factors(
                    &f.coef,
                    f.base_exp,
                    f.step,
                    Some(len as u64),
                    f.position == Position::Denominator,
                )?;
            }
        }
        for l in &self.linear_factors {
            let m = Exp::from_integer(l.exp.0 * n + l.exp.1);
            let c = Rat::from_integer((-l.sign).into());
            s = match l.position {
                Position::Numerator => s.mul_one_minus(&c, m),
                Position::Denominator => s.div_one_minus(&c, m)?,
            };
        }
        Ok(s.truncate(bound))
    }

    /// Render to the canonical text form; `parse` round-trips it.
    pub fn render(&self) -> String {
        let mut num: Vec<String> = Vec::new();
        let mut den: Vec<String> = Vec::new();
        if self.sign_mode == SignMode::Alternating {
            num.push(String::from("(-1)^n"));
        }
        if !self.constant.is_one() {
            num.push(render_rat(&self.constant));
        }
        if self.exp_poly.0 != 0 || self.exp_poly.1 != 0 || self.exp_poly.2 != 0 {
            num.push(format!("q^({})", render_exp_poly(self.exp_poly)));
        }
        for f in &self.factors {
            let mut t = format!(
                "poch({};{})_{}",
                render_base(&f.coef, f.base_exp),
                render_step(f.step),
                render_len(f.length)
            );
            if f.power != 1 {
                let _ = write!(t, "^{}", f.power);
            }
            match f.position {
                Position::Numerator => num.push(t),
                Position::Denominator => den.push(t),
            }
        }
        for l in &self.linear_factors {
            let t = format!(
                "(1{}q^({}))",
                if l.sign > 0 { "+" } else { "-" },
                render_lin(l.exp)
            );
            match l.position {
                Position::Numerator => num.push(t),
                Position::Denominator => den.push(t),
            }
        }
        if num.is_empty() {
            num.push(String::from("1"));
        }
        let mut out = num.join(" * ");
        for d in den {
            let _ = write!(out, " / {d}");
        }
        out
    }
}

fn poch_key_cmp(a: &PochFactor, b: &PochFactor) -> Ordering {
    (a.position, a.base_exp, a.step, a.length)
        .cmp(&(b.position, b.base_exp, b.step, b.length))
        .then_with(|| a.coef.cmp(&b.coef))
}

fn render_rat(c: &Rat) -> String {
    if c.denom().is_one() {
        format!("{}", c.numer())
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// Exponent of q rendered for base/step positions: "", "^2", "^(1/2)".
fn render_qexp(e: Exp) -> String {
    if e.is_one() {
        String::new()
    } else if e.is_integer() && e > Exp::zero() {
        format!("^{}", e.numer())
    } else if e.is_integer() {
        format!("^({})", e.numer())
    } else {
        format!("^({}/{})", e.numer(), e.denom())
    }
}

fn render_base(coef: &Rat, e: Exp) -> String {
    if e.is_zero() {
        return render_rat(coef);
    }
    let mag = coef.abs();
    let sign = if coef.is_negative() { "-" } else { "" };
    if mag.is_one() {
        format!("{sign}q{}", render_qexp(e))
    } else {
        format!("{sign}{}*q{}", render_rat(&mag), render_qexp(e))
    }
}

fn render_step(s: Exp) -> String {
    format!("q{}", render_qexp(s))
}

fn render_len((u, v): (u32, i64)) -> String {
    match (u, v) {
        (0, v) => format!("{v}"),
        (1, 0) => String::from("n"),
        (1, v) => format!("(n+{v})"),
        (u, 0) => format!("({u}*n)"),
        (u, v) => format!("({u}*n+{v})"),
    }
}

fn render_lin((u, v): (i64, i64)) -> String {
    let mut s = String::new();
    match u {
        0 => {}
        1 => s.push('n'),
        -1 => s.push_str("-n"),
        _ => {
            let _ = write!(s, "{u}*n");
        }
    }
    if v != 0 || u == 0 {
        if s.is_empty() {
            let _ = write!(s, "{v}");
        } else if v > 0 {
            let _ = write!(s, "+{v}");
        } else if v < 0 {
            let _ = write!(s, "{v}");
        }
    }
    s
}

fn render_exp_poly((a, b, c, d): (i64, i64, i64, i64)) -> String {
    let mut s = String::new();
    let mut terms = 0;
    if a != 0 {
        match a {
            1 => s.push_str("n^2"),
            -1 => s.push_str("-n^2"),
            _ => {
                let _ = write!(s, "{a}*n^2");
            }
        }
        terms += 1;
    }
    if b != 0 {
        if !s.is_empty() && b > 0 {
            s.push('+');
        }
        match b {
            1 => s.push('n'),
            -1 => s.push_str("-n"),
            _ => {
                let _ = write!(s, "{b}*n");
            }
        }
        terms += 1;
    }
    if c != 0 || terms == 0 {
        if !s.is_empty() && c >= 0 {
            s.push('+');
        }
        let _ = write!(s, "{c}");
        terms += 1;
    }
    if d == 1 {
        s
    } else if terms > 1 {
        format!("({s})/{d}")
    } else {
        format!("{s}/{d}")
    }
}

// ---- parser ---------------------------------------------------------------

/// Quadratic polynomial in n with rational coefficients, used while parsing.
#[derive(Clone, Copy, Debug)]
struct Quad {
    a2: Exp,
    a1: Exp,
    a0: Exp,
}

impl Quad {
    fn constant(c: Exp) -> Quad {
        Quad {
            a2: Exp::zero(),
            a1: Exp::zero(),
            a0: c,
        }
    }

    fn add(self, o: Quad) -> Quad {
        Quad {
            a2: self.a2 + o.a2,
            a1: self.a1 + o.a1,
            a0: self.a0 + o.a0,
        }
    }

    fn neg(self) -> Quad {
        Quad {
            a2: -self.a2,
            a1: -self.a1,
            a0: -self.a0,
        }
    }

    fn mul(self, o: Quad, at: usize) -> Result<Quad, CoreError> {
        let cubic = self.a2 * o.a1 + self.a1 * o.a2;
        let quartic = self.a2 * o.a2;
        if !cubic.is_zero() || !quartic.is_zero() {
            return Err(CoreError::Syntax {
                offset: at,
                message: String::from("exponent polynomial exceeds degree 2"),
            });
        }
        Ok(Quad {
            a2: self.a2 * o.a0 + self.a1 * o.a1 + self.a0 * o.a2,
            a1: self.a1 * o.a0 + self.a0 * o.a1,
            a0: self.a0 * o.a0,
        })
    }

    fn div(self, o: Quad, at: usize) -> Result<Quad, CoreError> {
        if !o.a2.is_zero() || !o.a1.is_zero() {
            return Err(CoreError::Syntax {
                offset: at,
                message: String::from("division is only defined by constants"),
            });
        }
        if o.a0.is_zero() {
            return Err(CoreError::Syntax {
                offset: at,
                message: String::from("division by zero"),
            });
        }
        Ok(Quad {
            a2: self.a2 / o.a0,
            a1: self.a1 / o.a0,
            a0: self.a0 / o.a0,
        })
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn err(&self, message: &str) -> CoreError {
        CoreError::Syntax {
            offset: self.pos,
            message: String::from(message),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), CoreError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn starts_with(&mut self, s: &str) -> bool {
        self.skip_ws();
        self.src[self.pos..].starts_with(s.as_bytes())
    }

    fn eat_str(&mut self, s: &str) -> bool {
        if self.starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn parse_uint(&mut self) -> Result<i64, CoreError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected a number"));
        }
        core::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse::<i64>().ok())
            .ok_or_else(|| self.err("number out of range"))
    }

    fn parse_int(&mut self) -> Result<i64, CoreError> {
        let neg = self.eat(b'-');
        let v = self.parse_uint()?;
        Ok(if neg { -v } else { v })
    }

    /// Quadratic expression: sum of products of atoms.
    fn parse_quad(&mut self) -> Result<Quad, CoreError> {
        let mut acc = if self.eat(b'-') {
            self.parse_quad_product()?.neg()
        } else {
            self.parse_quad_product()?
        };
        loop {
            if self.eat(b'+') {
                acc = acc.add(self.parse_quad_product()?);
            } else if self.eat(b'-') {
                acc = acc.add(self.parse_quad_product()?.neg());
            } else {
                return Ok(acc);
            }
        }
    }

    fn parse_quad_product(&mut self) -> Result<Quad, CoreError> {
        let mut acc = self.parse_quad_atom()?;
        loop {
            if self.eat(b'*') {
                let at = self.pos;
                acc = acc.mul(self.parse_quad_atom()?, at)?;
            } else if self.eat(b'/') {
                let at = self.pos;
                acc = acc.div(self.parse_quad_atom()?, at)?;
            } else if matches!(self.peek(), Some(b'n') | Some(b'(')) {
                // Implicit multiplication: 2n, 2(n+1), n(n+1).
                let at = self.pos;
                acc = acc.mul(self.parse_quad_atom()?, at)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn parse_quad_atom(&mut self) -> Result<Quad, CoreError> {
        match self.peek() {
            Some(b'n') => {
                self.pos += 1;
                if self.eat_str("^2") {
                    Ok(Quad {
                        a2: Exp::one(),
                        a1: Exp::zero(),
                        a0: Exp::zero(),
                    })
                } else {
                    Ok(Quad {
                        a2: Exp::zero(),
                        a1: Exp::one(),
                        a0: Exp::zero(),
                    })
                }
            }
            Some(b'(') => {
                self.pos += 1;
                let q = self.parse_quad()?;
                self.expect(b')')?;
                Ok(q)
            }
            Some(c) if c.is_ascii_digit() => {
                let v = self.parse_uint()?;
                Ok(Quad::constant(Exp::from_integer(v)))
            }
            _ => Err(self.err("expected n, a number, or a parenthesized expression")),
        }
    }

    /// Exponent after "q^": either an unsigned integer or a parenthesized
    /// rational expression.
    fn parse_qexp(&mut self) -> Result<Quad, CoreError> {
        if self.peek() == Some(b'(') {
            self.pos += 1;
            let q = self.parse_quad()?;
            self.expect(b')')?;
            Ok(q)
        } else {
            Ok(Quad::constant(Exp::from_integer(self.parse_uint()?)))
        }
    }

    fn quad_constant(&self, q: Quad) -> Result<Exp, CoreError> {
        if !q.a2.is_zero() || !q.a1.is_zero() {
            return Err(CoreError::Syntax {
                offset: self.pos,
                message: String::from("expected an n-free exponent here"),
            });
        }
        Ok(q.a0)
    }

    /// Base of a Pochhammer factor: c or c*q^e or +-q^e.
    fn parse_base(&mut self) -> Result<(Rat, Exp), CoreError> {
        let neg = self.eat(b'-');
        let mut coef = Exp::one();
        let mut have_coef = false;
        if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            let n = self.parse_uint()?;
            let d = if self.eat(b'/') { self.parse_uint()? } else { 1 };
            if d == 0 {
                return Err(self.err("zero denominator in base coefficient"));
            }
            coef = Exp::new(n, d);
            have_coef = true;
        }
        let mut e = Exp::zero();
        let has_q = if have_coef {
            if self.eat(b'*') {
                if !self.eat(b'q') {
                    return Err(self.err("expected q after '*' in base"));
                }
                true
            } else {
                false
            }
        } else {
            self.eat(b'q')
        };
        if has_q {
            e = if self.eat(b'^') {
                let q = self.parse_qexp()?;
                self.quad_constant(q)?
            } else {
                Exp::one()
            };
        } else if !have_coef {
            return Err(self.err("expected a base monomial"));
        }
        let c = exp_to_rat(if neg { -coef } else { coef });
        Ok((c, e))
    }

    fn parse_step(&mut self) -> Result<Exp, CoreError> {
        if !self.eat(b'q') {
            return Err(self.err("expected q in step"));
        }
        let s = if self.eat(b'^') {
            let q = self.parse_qexp()?;
            self.quad_constant(q)?
        } else {
            Exp::one()
        };
        if s <= Exp::zero() {
            return Err(CoreError::Semantics(String::from(
                "pochhammer step must be positive",
            )));
        }
        Ok(s)
    }

    /// Length subscript: n, an unsigned integer, or (linear poly).
    fn parse_len(&mut self) -> Result<(u32, i64), CoreError> {
        let q = match self.peek() {
            Some(b'n') => {
                self.pos += 1;
                Quad {
                    a2: Exp::zero(),
                    a1: Exp::one(),
                    a0: Exp::zero(),
                }
            }
            Some(b'(') => {
                self.pos += 1;
                let q = self.parse_quad()?;
                self.expect(b')')?;
                q
            }
            _ => Quad::constant(Exp::from_integer(self.parse_uint()?)),
        };
        if !q.a2.is_zero() {
            return Err(CoreError::Semantics(String::from(
                "pochhammer length must be linear in n",
            )));
        }
        if !q.a1.is_integer() || !q.a0.is_integer() {
            return Err(CoreError::Semantics(String::from(
                "pochhammer length must have integer coefficients",
            )));
        }
        let (u, v) = (*q.a1.numer(), *q.a0.numer());
        if !(0..=2).contains(&u) {
            return Err(CoreError::Semantics(String::from(
                "pochhammer length slope must be 0, 1, or 2",
            )));
        }
        if v < 0 {
            return Err(CoreError::Semantics(String::from(
                "pochhammer length is negative at n = 0",
            )));
        }
        Ok((u as u32, v))
    }

    fn parse_lin_exp(&mut self) -> Result<(i64, i64), CoreError> {
        let q = self.parse_quad()?;
        if !q.a2.is_zero() {
            return Err(CoreError::Semantics(String::from(
                "binomial exponent must be linear in n",
            )));
        }
        if !q.a1.is_integer() || !q.a0.is_integer() {
            return Err(CoreError::Semantics(String::from(
                "binomial exponent must have integer coefficients",
            )));
        }
        Ok((*q.a1.numer(), *q.a0.numer()))
    }

    fn parse_factor(&mut self, d: &mut TermDescriptor, pos: Position) -> Result<(), CoreError> {
        if self.eat_str("(-1)^n") {
            // (-1)^(-n) = (-1)^n, so position is irrelevant.
            d.sign_mode = match d.sign_mode {
                SignMode::Plus => SignMode::Alternating,
                SignMode::Alternating => SignMode::Plus,
            };
            return Ok(());
        }
        if self.eat_str("poch(") {
            let (coef, base_exp) = self.parse_base()?;
            self.expect(b';')?;
            let step = self.parse_step()?;
            self.expect(b')')?;
            self.expect(b'_')?;
            let length = self.parse_len()?;
            let mut power: i64 = 1;
            if self.eat(b'^') {
                power = self.parse_int()?;
            }
            if power == 0 {
                return Ok(());
            }
            let position = if power < 0 { pos.flip() } else { pos };
            if coef.is_zero() {
                return Ok(()); // every factor is (1 - 0) = 1
            }
            d.factors.push(PochFactor {
                coef,
                base_exp,
                step,
                length,
                position,
                power: power.unsigned_abs() as u32,
            });
            return Ok(());
        }
        if self.starts_with("(1+") || self.starts_with("(1-") {
            self.expect(b'(')?;
            self.expect(b'1')?;
            let sign: i8 = if self.eat(b'+') {
                1
            } else {
                self.expect(b'-')?;
                -1
            };
            if !self.eat(b'q') {
                return Err(self.err("expected q in binomial factor"));
            }
            self.expect(b'^')?;
            self.expect(b'(')?;
            let exp = self.parse_lin_exp()?;
            self.expect(b')')?;
            self.expect(b')')?;
            d.linear_factors.push(LinFactor {
                exp,
                sign,
                position: pos,
            });
            return Ok(());
        }
        if self.peek() == Some(b'q') {
            self.pos += 1;
            let q = if self.eat(b'^') {
                self.parse_qexp()?
            } else {
                Quad {
                    a2: Exp::zero(),
                    a1: Exp::zero(),
                    a0: Exp::one(),
                }
            };
            let (a2, a1, a0) = match pos {
                Position::Numerator => (q.a2, q.a1, q.a0),
                Position::Denominator => (-q.a2, -q.a1, -q.a0),
            };
            *d = core::mem::take(d).times_q_pow(a2, a1, a0);
            return Ok(());
        }
        // Rational constant, optionally negative.
        let neg = self.eat(b'-');
        if !matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            return Err(self.err("expected a factor"));
        }
        let v = self.parse_uint()?;
        let mut c = Rat::from_integer(v.into());
        if neg {
            c = -c;
        }
        if pos == Position::Denominator {
            if c.is_zero() {
                return Err(CoreError::Semantics(String::from("division by zero")));
            }
            d.constant /= c;
        } else {
            d.constant *= c;
        }
        Ok(())
    }
}

fn exp_to_rat(e: Exp) -> Rat {
    Rat::new((*e.numer()).into(), (*e.denom()).into())
}

/// Parse the summand language into a canonical descriptor.
pub fn parse(text: &str) -> Result<TermDescriptor, CoreError> {
    let mut p = Parser::new(text);
    let mut d = TermDescriptor::new();
    p.parse_factor(&mut d, Position::Numerator)?;
    loop {
        if p.eat(b'*') {
            p.parse_factor(&mut d, Position::Numerator)?;
        } else if p.eat(b'/') {
            p.parse_factor(&mut d, Position::Denominator)?;
        } else {
            break;
        }
    }
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(d.canonicalize())
}

// ---- q -> q^-1 transform --------------------------------------------------

/// The formal substitution q -> q^-1, re-expressed inside the fragment.
///
/// Per Pochhammer factor (c q^e; q^s)_L the rewrite is
///
/// ```text
///   prod_j (1 - c q^-(e+js)) = (-c)^L q^-(eL + s L(L-1)/2) (c^-1 q^e; q^s)_L
/// ```
///
/// and per binomial (1 +- q^m) it is (+-1) q^-m (1 +- q^m); the monomial
/// corrections accumulate into the exponent polynomial, the sign corrections
/// into sign_mode and the constant. Fails with `OutOfFragment` when a
/// correction (-c)^{u n} is not expressible, i.e. |c| != 1 with u > 0.
pub fn q_inverse(d: &TermDescriptor) -> Result<TermDescriptor, CoreError> {
    let mut out = TermDescriptor::new();
    out.sign_mode = d.sign_mode;
    out.constant = d.constant.clone();
    // E(n) -> -E(n), then corrections add on.
    let mut a2 = -d.exp_a2();
    let mut a1 = -d.exp_a1();
    let mut a0 = -d.exp_a0();
    for f in &d.factors {
        let (u, v) = (i64::from(f.length.0), f.length.1);
        let p = i64::from(f.power);
        // eL + s L(L-1)/2 with L = u n + v, as a quadratic in n.
        let e = f.base_exp;
        let s = f.step;
        let half = Exp::new(1, 2);
        let c2 = s * half * Exp::from_integer(u * u);
        let c1 = e * Exp::from_integer(u) + s * half * Exp::from_integer(2 * u * v - u);
        let c0 = e * Exp::from_integer(v) + s * half * Exp::from_integer(v * v - v);
        let dir = match f.position {
            Position::Numerator => -Exp::from_integer(p),
            Position::Denominator => Exp::from_integer(p),
        };
        a2 += dir * c2;
        a1 += dir * c1;
        a0 += dir * c0;
        // Constant correction (-c)^{+-pL}.
        let minus_c = -f.coef.clone();
        if minus_c.abs().is_one() {
            // (-c)^L = (-c)^{un} (-c)^v; both positions contribute the same
            // factor since (+-1)^-1 = +-1.
            if minus_c.is_negative() {
                // (-1)^{un}: u=1 toggles the alternating sign; u=2 is inert.
                if u % 2 != 0 && p % 2 != 0 {
                    out.sign_mode = match out.sign_mode {
                        SignMode::Plus => SignMode::Alternating,
                        SignMode::Alternating => SignMode::Plus,
                    };
                }
                if (v * p) % 2 != 0 {
                    out.constant = -out.constant;
                }
            }
        } else if u == 0 {
            let vp = v
                .checked_mul(p)
                .and_then(|x| x.to_i32())
                .ok_or(CoreError::OutOfFragment)?;
            let e = match f.position {
                Position::Numerator => vp,
                Position::Denominator => -vp,
            };
            out.constant *= pow_rat(&minus_c, e)?;
        } else {
            return Err(CoreError::OutOfFragment);
        }
        // The factor itself becomes (c^-1 q^e; q^s)_L at the same position.
        if f.coef.is_zero() {
            return Err(CoreError::OutOfFragment);
        }
        out.factors.push(PochFactor {
            coef: Rat::one() / f.coef.clone(),
            base_exp: f.base_exp,
            step: f.step,
            length: f.length,
            position: f.position,
            power: f.power,
        });
    }
    for l in &d.linear_factors {
        let (u, v) = l.exp;
        let dir = match l.position {
            Position::Numerator => -1,
            Position::Denominator => 1,
        };
        a1 += Exp::from_integer(dir * u);
        a0 += Exp::from_integer(dir * v);
        if l.sign < 0 {
            out.constant = -out.constant;
        }
        out.linear_factors.push(l.clone());
    }
    out.set_exp(a2, a1, a0);
    Ok(out.canonicalize())
}

fn pow_rat(c: &Rat, e: i32) -> Result<Rat, CoreError> {
    if c.is_zero() && e < 0 {
        return Err(CoreError::ZeroDenominator);
    }
    let mut acc = Rat::one();
    for _ in 0..e.unsigned_abs() {
        acc *= c;
    }
    if e < 0 {
        acc = Rat::one() / acc;
    }
    Ok(acc)
}

// ---- n -> infinity limit --------------------------------------------------

/// Limit of H_n(q) as n -> infinity, as a truncated series, when it exists:
/// exponent growth forces 0; a constant exponent turns growing Pochhammer
/// lengths into infinite products; an oscillating sign with a nonzero
/// product limit has no limit.
pub fn limit_at_infinity(d: &TermDescriptor, order: i64) -> Result<LimitResult, CoreError> {
    let (a, b, _, _) = d.exp_poly;
    if a > 0 || (a == 0 && b > 0) {
        return Ok(LimitResult::Series(QSeries::zero(Exp::from_integer(order))));
    }
    if a < 0 || b < 0 {
        return Ok(LimitResult::NoLimit);
    }
    // Constant exponent: the limit is const * q^(C/D) * prod of limits.
    let bound = Exp::from_integer(order);
    let mut s = QSeries::monomial(d.constant.clone(), d.exp_at(0), bound);
    for f in &d.factors {
        let invert = f.position == Position::Denominator;
        let count = if f.length.0 == 0 {
            Some(f.length.1 as u64)
        } else {
            None
        };
        for _ in 0..f.power {
            s = match s.mul_poch_factors(&f.coef, f.base_exp, f.step, count, invert) {
                Ok(v) => v,
                // A denominator factor vanishing exactly is a pole at
                // every large n: no limit.
                Err(CoreError::ZeroDenominator) => return Ok(LimitResult::NoLimit),
                Err(e) => return Err(e),
            };
        }
    }
    for l in &d.linear_factors {
        if l.exp.0 > 0 {
            continue; // (1 +- q^{un+v}) -> 1
        }
        if l.exp.0 < 0 {
            return Ok(LimitResult::NoLimit);
        }
        let c = Rat::from_integer((-l.sign).into());
        let m = Exp::from_integer(l.exp.1);
        s = match l.position {
            Position::Numerator => s.mul_one_minus(&c, m),
            Position::Denominator => match s.div_one_minus(&c, m) {
                Ok(v) => v,
                Err(CoreError::ZeroDenominator) => return Ok(LimitResult::NoLimit),
                Err(e) => return Err(e),
            },
        };
    }
    if s.is_zero() {
        return Ok(LimitResult::Series(s.truncate(bound)));
    }
    if d.sign_mode == SignMode::Alternating {
        return Ok(LimitResult::NoLimit);
    }
    Ok(LimitResult::Series(s.truncate(bound)))
}

// ---- incremental evaluation -----------------------------------------------

/// Incrementally evaluates H_0, H_1, ... as truncated series.
///
/// The n-independent "core" sign^n * const * q^E(n) * Pochhammer products is
/// carried between indices: each step multiplies the sign, shifts by
/// E(n+1) - E(n), and extends every Pochhammer factor by its new binomials.
/// Binomial (lin) factors are applied fresh per index so a vanishing one
/// zeroes only its own term.
pub struct TermEvaluator {
    d: TermDescriptor,
    order: i64,
    n: i64,
    core: QSeries,
    /// Minimum of E over all future indices, and the first index from which
    /// E is nondecreasing: truncating the core at order + (E(n) - floor)
    /// before that index, and at order after it, keeps every term exact.
    exp_floor: Exp,
    monotone_from: i64,
}

impl TermEvaluator {
    pub fn new(d: &TermDescriptor, order: i64) -> Result<Self, CoreError> {
        let d = d.clone().canonicalize();
        let (a, b, _, _) = d.exp_poly;
        if a < 0 || (a == 0 && b < 0) {
            return Err(CoreError::NonSummable);
        }
        // E is convex; find the integer index minimizing it.
        let monotone_from = if a == 0 {
            0
        } else {
            let v = -b / (2 * a);
            [v - 1, v, v + 1]
                .into_iter()
                .filter(|&n| n >= 0)
                .chain(core::iter::once(0))
                .min_by_key(|&n| d.exp_at(n))
                .expect("nonempty")
        };
        let exp_floor = d.exp_at(monotone_from);
        let mut ev = TermEvaluator {
            d,
            order,
            n: 0,
            core: QSeries::zero(Exp::from_integer(order)),
            exp_floor,
            monotone_from,
        };
        ev.core = ev.build_core(0)?;
        Ok(ev)
    }

    fn core_bound(&self, n: i64) -> Exp {
        if n >= self.monotone_from {
            Exp::from_integer(self.order)
        } else {
            Exp::from_integer(self.order) + (self.d.exp_at(n) - self.exp_floor)
        }
    }

    fn build_core(&self, n: i64) -> Result<QSeries, CoreError> {
        let mut c = self.d.constant.clone();
        if self.d.sign_mode == SignMode::Alternating && n % 2 != 0 {
            c = -c;
        }
        let mut s = QSeries::monomial(c, self.d.exp_at(n), self.core_bound(n));
        for f in &self.d.factors {
            let len = i64::from(f.length.0) * n + f.length.1;
            if len < 0 {
                return Err(CoreError::Semantics(String::from(
                    "pochhammer length is negative at this index",
                )));
            }
            for _ in 0..f.power {
                s = s.mul_poch_factors(
                    &f.coef,
                    f.base_exp,
                    f.step,
                    Some(len as u64),
                    f.position == Position::Denominator,
                )?;
            }
        }
        Ok(s)
    }

    /// Current index.
    pub fn n(&self) -> i64 {
        self.n
    }

    /// H_n truncated at the order.
    pub fn term(&self) -> Result<QSeries, CoreError> {
        let mut s = self.core.clone();
        for l in &self.d.linear_factors {
            let m = Exp::from_integer(l.exp.0 * self.n + l.exp.1);
            let c = Rat::from_integer((-l.sign).into());
            s = match l.position {
                Position::Numerator => s.mul_one_minus(&c, m),
                Position::Denominator => s.div_one_minus(&c, m)?,
            };
        }
        Ok(s.truncate(Exp::from_integer(self.order)))
    }

    /// Step to index n + 1.
    pub fn advance(&mut self) -> Result<(), CoreError> {
        let n = self.n;
        let mut s = self.core.clone();
        if self.d.sign_mode == SignMode::Alternating {
            s = s.neg();
        }
        s = s.shift(self.d.delta_exp(n));
        for f in &self.d.factors {
            let old_len = i64::from(f.length.0) * n + f.length.1;
            let new_len = old_len + i64::from(f.length.0);
            for j in old_len..new_len {
                let m = f.base_exp + f.step * Exp::from_integer(j);
                for _ in 0..f.power {
                    s = match f.position {
                        Position::Numerator => s.mul_one_minus(&f.coef, m),
                        Position::Denominator => s.div_one_minus(&f.coef, m)?,
                    };
                }
            }
        }
        self.n = n + 1;
        self.core = s.truncate(self.core_bound(self.n));
        Ok(())
    }
}

/// Direct summation sum_{n>=0} H_n(q) truncated at the order; terminates
/// when eight consecutive terms vanish below the order.
pub fn sum_terms(d: &TermDescriptor, order: i64) -> Result<QSeries, CoreError> {
    if !d.summable() {
        return Err(CoreError::NonSummable);
    }
    let cap = 4 * order.max(0) + 64;
    let mut ev = TermEvaluator::new(d, order)?;
    let mut acc = QSeries::zero(Exp::from_integer(order));
    let mut quiet = 0u32;
    loop {
        let t = ev.term()?;
        if t.is_zero() {
            quiet += 1;
            if quiet >= 8 {
                return Ok(acc);
            }
        } else {
            quiet = 0;
            acc = acc.add(&t);
        }
        if ev.n() >= cap {
            return Err(CoreError::NonSummable);
        }
        ev.advance()?;
    }
}
