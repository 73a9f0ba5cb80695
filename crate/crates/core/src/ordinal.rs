//! Ordinals below epsilon-zero in Cantor normal form.
//!
//! An [`Ordinal`] is a finite sum `w^e1*c1 + w^e2*c2 + ...` with strictly
//! decreasing exponents (themselves ordinals) and positive coefficients.
//! Values are canonical on construction, so structural equality is ordinal
//! equality.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
struct Term {
    exp: Ordinal,
    coeff: BigUint,
}

/// An ordinal below epsilon-zero.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Ordinal {
    terms: Vec<Term>,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Ordinal::finite(1u32)
    }

    /// The first infinite ordinal.
    pub fn omega() -> Self {
        omega_pow(&Ordinal::one())
    }

    pub fn finite(n: impl Into<BigUint>) -> Self {
        let n = n.into();
        if n.is_zero() {
            Ordinal::zero()
        } else {
            Ordinal { terms: vec![Term { exp: Ordinal::zero(), coeff: n }] }
        }
    }

    /// `w^exp * coeff`; a zero coefficient gives 0.
    pub fn monomial(exp: Ordinal, coeff: impl Into<BigUint>) -> Self {
        let coeff = coeff.into();
        if coeff.is_zero() {
            Ordinal::zero()
        } else {
            Ordinal { terms: vec![Term { exp, coeff }] }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.terms.iter().all(|t| t.exp.is_zero())
    }

    /// The value as an integer when the ordinal is finite.
    pub fn as_finite(&self) -> Option<BigUint> {
        match self.terms.as_slice() {
            [] => Some(BigUint::zero()),
            [t] if t.exp.is_zero() => Some(t.coeff.clone()),
            _ => None,
        }
    }

    pub fn as_u64(&self) -> Option<u64> {
        self.as_finite().and_then(|n| n.to_u64())
    }

    pub fn is_successor(&self) -> bool {
        self.terms.last().is_some_and(|t| t.exp.is_zero())
    }

    pub fn is_limit(&self) -> bool {
        self.terms.last().is_some_and(|t| !t.exp.is_zero())
    }

    /// Coefficient of the `w^0` term.
    pub fn finite_part(&self) -> BigUint {
        match self.terms.last() {
            Some(t) if t.exp.is_zero() => t.coeff.clone(),
            _ => BigUint::zero(),
        }
    }

    /// The ordinal with its finite part removed (zero or a limit).
    pub fn infinite_part(&self) -> Ordinal {
        let mut terms = self.terms.clone();
        if terms.last().is_some_and(|t| t.exp.is_zero()) {
            terms.pop();
        }
        Ordinal { terms }
    }

    /// True when the two ordinals differ by a finite amount.
    pub fn differs_finitely(&self, other: &Ordinal) -> bool {
        self.infinite_part() == other.infinite_part()
    }

    pub fn predecessor(&self) -> Option<Ordinal> {
        self.sub_finite(1)
    }

    /// `self - k` for finite `k`, defined when the finite part is at least `k`.
    pub fn sub_finite(&self, k: u64) -> Option<Ordinal> {
        let fin = self.finite_part();
        let k = BigUint::from(k);
        if fin < k {
            return None;
        }
        let rest = fin - k;
        Some(self.infinite_part() + Ordinal::finite(rest))
    }

    pub fn succ(&self) -> Ordinal {
        self.clone() + Ordinal::one()
    }

    /// Exponent of the leading term, `None` for zero.
    pub fn leading_exponent(&self) -> Option<&Ordinal> {
        self.terms.first().map(|t| &t.exp)
    }

    /// The `(exponent, coefficient)` pairs in decreasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&Ordinal, &BigUint)> {
        self.terms.iter().map(|t| (&t.exp, &t.coeff))
    }

    /// The `n`-th member of the canonical fundamental sequence of a limit.
    ///
    /// For `g + w^(e+1)` this is `g + w^e * n`; for `g + w^e` with `e` a
    /// limit it is `g + w^(e[n])`. The sequence is strictly increasing and
    /// cofinal in `self`.
    pub fn fundamental(&self, n: u64) -> Option<Ordinal> {
        let last = self.terms.last()?;
        if last.exp.is_zero() {
            return None;
        }
        let mut prefix = Ordinal { terms: self.terms[..self.terms.len() - 1].to_vec() };
        if last.coeff > BigUint::one() {
            prefix.terms.push(Term { exp: last.exp.clone(), coeff: &last.coeff - 1u32 });
        }
        let step = if last.exp.is_successor() {
            Ordinal::monomial(last.exp.predecessor().expect("successor"), n)
        } else {
            omega_pow(&last.exp.fundamental(n).expect("limit exponent"))
        };
        Some(prefix + step)
    }

    fn fmt_exponent(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let simple = self.terms.len() == 1 && self.terms[0].coeff.is_one();
        if self.is_finite() || simple {
            write!(f, "{self}")
        } else {
            write!(f, "({self})")
        }
    }
}

/// `w^a`.
pub fn omega_pow(a: &Ordinal) -> Ordinal {
    Ordinal::monomial(a.clone(), 1u32)
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Self {
        Ordinal::finite(n)
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(&other.terms) {
            let c = a.exp.cmp(&b.exp).then_with(|| a.coeff.cmp(&b.coeff));
            if c != Ordering::Equal {
                return c;
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add<&Ordinal> for &Ordinal {
    type Output = Ordinal;

    fn add(self, rhs: &Ordinal) -> Ordinal {
        let Some(head) = rhs.terms.first() else {
            return self.clone();
        };
        let mut terms: Vec<Term> =
            self.terms.iter().take_while(|t| t.exp > head.exp).cloned().collect();
        let merged = self.terms.iter().find(|t| t.exp == head.exp);
        match merged {
            Some(t) => {
                terms.push(Term { exp: head.exp.clone(), coeff: &t.coeff + &head.coeff });
                terms.extend(rhs.terms[1..].iter().cloned());
            }
            None => terms.extend(rhs.terms.iter().cloned()),
        }
        Ordinal { terms }
    }
}

impl Add for Ordinal {
    type Output = Ordinal;

    fn add(self, rhs: Ordinal) -> Ordinal {
        &self + &rhs
    }
}

impl Mul<&Ordinal> for &Ordinal {
    type Output = Ordinal;

    fn mul(self, rhs: &Ordinal) -> Ordinal {
        let Some(lead) = self.terms.first() else {
            return Ordinal::zero();
        };
        let mut out = Ordinal::zero();
        for t in &rhs.terms {
            let piece = if t.exp.is_zero() {
                let mut terms = vec![Term { exp: lead.exp.clone(), coeff: &lead.coeff * &t.coeff }];
                terms.extend(self.terms[1..].iter().cloned());
                Ordinal { terms }
            } else {
                Ordinal::monomial(&lead.exp + &t.exp, t.coeff.clone())
            };
            out = out + piece;
        }
        out
    }
}

impl Mul for Ordinal {
    type Output = Ordinal;

    fn mul(self, rhs: Ordinal) -> Ordinal {
        &self * &rhs
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            if t.exp.is_zero() {
                write!(f, "{}", t.coeff)?;
                continue;
            }
            write!(f, "w")?;
            if t.exp != Ordinal::one() {
                write!(f, "^")?;
                t.exp.fmt_exponent(f)?;
            }
            if !t.coeff.is_one() {
                write!(f, "*{}", t.coeff)?;
            }
        }
        Ok(())
    }
}

/// Parses and evaluates ordinal expressions: naturals, `w` (or `ω`),
/// `+`, `*`, `w^x` and parentheses. Canonical output of `Display` parses
/// back to the same value.
impl FromStr for Ordinal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser { chars: s.chars().filter(|c| !c.is_whitespace()).collect(), pos: 0 };
        let v = p.expr()?;
        if p.pos != p.chars.len() {
            return Err(p.err("trailing input"));
        }
        Ok(v)
    }
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn err(&self, msg: &str) -> Error {
        let src: String = self.chars.iter().collect();
        Error::Parse(format!("{msg} at offset {} in `{src}`", self.pos))
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Ordinal> {
        let mut v = self.term()?;
        while self.peek() == Some('+') {
            self.pos += 1;
            v = v + self.term()?;
        }
        Ok(v)
    }

    fn term(&mut self) -> Result<Ordinal> {
        let mut v = self.factor()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            v = v * self.factor()?;
        }
        Ok(v)
    }

    fn factor(&mut self) -> Result<Ordinal> {
        let start = self.pos;
        let base = self.atom()?;
        if self.peek() != Some('^') {
            return Ok(base);
        }
        if base != Ordinal::omega() || self.chars[start] == '(' {
            return Err(self.err("only `w^x` exponentiation is supported"));
        }
        self.pos += 1;
        let exp = self.factor()?;
        Ok(omega_pow(&exp))
    }

    fn atom(&mut self) -> Result<Ordinal> {
        match self.peek() {
            Some('w') | Some('ω') => {
                self.pos += 1;
                Ok(Ordinal::omega())
            }
            Some('(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let digits: String = self.chars[start..self.pos].iter().collect();
                let n: BigUint = digits.parse().map_err(|_| self.err("bad number"))?;
                Ok(Ordinal::finite(n))
            }
            _ => Err(self.err("expected a number, `w` or `(`")),
        }
    }
}

impl Serialize for Ordinal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Ordinal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// An omega-sequence of ranks cofinal in a limit, known by its limit and a
/// sample of members. Member `i` of the sample sits at fundamental-sequence
/// index `index` and must differ finitely from `limit[index]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankTail {
    pub limit: Ordinal,
    #[serde(default)]
    pub sample: Vec<(u64, Ordinal)>,
}

/// A finite description of a set of ordinals: explicit members plus
/// omega-sequence tails.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankSetDescription {
    pub explicit: BTreeSet<Ordinal>,
    pub tails: Vec<RankTail>,
}

impl RankTail {
    pub fn validate(&self) -> Result<()> {
        if !self.limit.is_limit() {
            return Err(Error::MalformedDescription(format!(
                "tail limit {} is not a limit ordinal",
                self.limit
            )));
        }
        for (idx, v) in &self.sample {
            let base = self.limit.fundamental(*idx).expect("limit");
            if *v >= self.limit || !v.differs_finitely(&base) {
                return Err(Error::MalformedDescription(format!(
                    "tail member {v} at index {idx} does not track {}[{idx}] = {base}",
                    self.limit
                )));
            }
        }
        Ok(())
    }
}

impl RankSetDescription {
    /// Largest element or limit mentioned, `None` for the empty set.
    pub fn supremum(&self) -> Option<Ordinal> {
        let e = self.explicit.iter().next_back().cloned();
        let t = self.tails.iter().map(|t| t.limit.clone()).max();
        e.max(t)
    }
}

/// Order type of the set described by `s`.
///
/// Each tail is cofinal in its limit and has only finitely many members
/// below any smaller ordinal, so every distinct tail limit contributes one
/// block of type `w`; explicit members at or above the largest limit add a
/// finite remainder and everything else is absorbed.
pub fn order_type_of_finite_described_set(s: &RankSetDescription) -> Result<Ordinal> {
    for t in &s.tails {
        t.validate()?;
    }
    let limits: BTreeSet<&Ordinal> = s.tails.iter().map(|t| &t.limit).collect();
    let top = limits.iter().next_back();
    let above = s.explicit.iter().filter(|e| top.is_none_or(|l| *e >= *l)).count() as u64;
    Ok(Ordinal::omega() * Ordinal::from(limits.len() as u64) + Ordinal::from(above))
}
