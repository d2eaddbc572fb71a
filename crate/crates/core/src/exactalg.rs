//! Multivariate polynomials with exact rational coefficients.
//!
//! Indeterminates come from a small fixed registry ([`Var`]), so a monomial is
//! a dense exponent array. Terms are kept in a `BTreeMap` keyed by monomial in
//! graded lexicographic order, which makes structural equality coincide with
//! mathematical equality and gives a deterministic text form.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub const NVARS: usize = 6;

/// Registered indeterminates, listed in their canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Lambda,
    X,
    Y,
    A,
    B,
    P,
}

impl Var {
    pub const ALL: [Var; NVARS] = [Var::Lambda, Var::X, Var::Y, Var::A, Var::B, Var::P];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::Lambda => "λ",
            Var::X => "x",
            Var::Y => "y",
            Var::A => "a",
            Var::B => "b",
            Var::P => "p",
        }
    }

    pub fn latex(self) -> &'static str {
        match self {
            Var::Lambda => "\\lambda",
            other => other.name(),
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Var {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "λ" | "lambda" => Ok(Var::Lambda),
            "x" => Ok(Var::X),
            "y" => Ok(Var::Y),
            "a" => Ok(Var::A),
            "b" => Ok(Var::B),
            "p" => Ok(Var::P),
            _ => Err(Error::Parse(format!("unknown variable {s:?}"))),
        }
    }
}

/// Exponent vector over the variable registry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial([u16; NVARS]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0; NVARS]);

    pub fn var(v: Var) -> Self {
        let mut e = [0; NVARS];
        e[v.index()] = 1;
        Monomial(e)
    }

    pub fn exponent(&self, v: Var) -> u16 {
        self.0[v.index()]
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| u32::from(e)).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0.iter()) {
            *a += *b;
        }
        Monomial(e)
    }

    fn with_exponent(&self, v: Var, exp: u16) -> Monomial {
        let mut e = self.0;
        e[v.index()] = exp;
        Monomial(e)
    }
}

// Graded lexicographic: total degree first, then exponents in registry order.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in the registry variables over ℚ.
///
/// No stored coefficient is zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::ONE, c);
        }
        Poly { terms }
    }

    pub fn int(n: i64) -> Self {
        Poly::constant(Rational::from_integer(n.into()))
    }

    pub fn rat(num: i64, den: i64) -> Self {
        Poly::constant(rat(num, den))
    }

    pub fn var(v: Var) -> Self {
        Poly::monomial(Monomial::var(v), Rational::one())
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(iter: I) -> Self {
        let mut acc: HashMap<Monomial, Rational> = HashMap::new();
        for (m, c) in iter {
            *acc.entry(m).or_insert_with(Rational::zero) += c;
        }
        Poly::from_accumulator(acc)
    }

    fn from_accumulator(acc: HashMap<Monomial, Rational>) -> Self {
        Poly {
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    /// The value of a constant polynomial, `None` if any variable occurs.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::ONE).cloned(),
            _ => None,
        }
    }

    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&Monomial::ONE)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending canonical order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn vars(&self) -> Vec<Var> {
        Var::ALL
            .into_iter()
            .filter(|&v| self.terms.keys().any(|m| m.exponent(v) > 0))
            .collect()
    }

    pub fn degree_in(&self, v: Var) -> u16 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, a)| (*m, a * c)).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Exact division by a variable; `None` when some term lacks it.
    pub fn div_var(&self, v: Var) -> Option<Poly> {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e == 0 {
                return None;
            }
            terms.insert(m.with_exponent(v, e - 1), c.clone());
        }
        Some(Poly { terms })
    }

    /// Coefficients of `v^0, v^1, ...`, each free of `v`.
    pub fn coefficients_in(&self, v: Var) -> Vec<Poly> {
        let deg = self.degree_in(v) as usize;
        let mut out = vec![BTreeMap::new(); deg + 1];
        for (m, c) in &self.terms {
            out[m.exponent(v) as usize].insert(m.with_exponent(v, 0), c.clone());
        }
        out.into_iter().map(|terms| Poly { terms }).collect()
    }

    /// Simultaneous substitution; unassigned variables stay as they are.
    pub fn substitute(&self, assignments: &BTreeMap<Var, Poly>) -> Poly {
        if assignments.is_empty() {
            return self.clone();
        }
        let mut powers: HashMap<(Var, u16), Poly> = HashMap::new();
        let mut acc: HashMap<Monomial, Rational> = HashMap::new();
        for (m, c) in &self.terms {
            let mut kept = *m;
            let mut factor = Poly::one();
            for (&v, image) in assignments {
                let e = m.exponent(v);
                if e == 0 {
                    continue;
                }
                kept = kept.with_exponent(v, 0);
                let p = powers
                    .entry((v, e))
                    .or_insert_with(|| image.pow(u32::from(e)));
                factor = &factor * &*p;
            }
            for (fm, fc) in factor.terms {
                *acc.entry(fm.mul(&kept)).or_insert_with(Rational::zero) += fc * c;
            }
        }
        Poly::from_accumulator(acc)
    }

    pub fn substitute_one(&self, v: Var, image: &Poly) -> Poly {
        self.substitute(&BTreeMap::from([(v, image.clone())]))
    }

    pub fn eval(&self, point: &BTreeMap<Var, Rational>) -> Result<Rational> {
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for v in Var::ALL {
                let e = m.exponent(v);
                if e == 0 {
                    continue;
                }
                let value = point.get(&v).ok_or(Error::UnboundVariable(v))?;
                term *= num_traits::pow(value.clone(), e as usize);
            }
            total += term;
        }
        Ok(total)
    }

    /// Pins the given variables to rational values, leaving the rest symbolic.
    pub fn pin(&self, point: &BTreeMap<Var, Rational>) -> Poly {
        let assignments = point
            .iter()
            .map(|(v, c)| (*v, Poly::constant(c.clone())))
            .collect();
        self.substitute(&assignments)
    }

    pub fn to_latex(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            match (i, negative) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            let a = c.abs();
            let unit = a.is_one() && !m.is_one();
            if !unit {
                if a.is_integer() {
                    out.push_str(&a.numer().to_string());
                } else {
                    out.push_str(&format!("\\frac{{{}}}{{{}}}", a.numer(), a.denom()));
                }
            }
            for v in Var::ALL {
                match m.exponent(v) {
                    0 => {}
                    1 => out.push_str(v.latex()),
                    e => out.push_str(&format!("{}^{{{}}}", v.latex(), e)),
                }
                if m.exponent(v) > 0 && v == Var::Lambda {
                    out.push(' ');
                }
            }
            let trimmed = out.trim_end().len();
            out.truncate(trimmed);
        }
        out
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, m: &Monomial, mut first: bool) -> fmt::Result {
    for v in Var::ALL {
        let e = m.exponent(v);
        if e == 0 {
            continue;
        }
        if !first {
            f.write_str("*")?;
        }
        first = false;
        if e == 1 {
            write!(f, "{}", v)?;
        } else {
            write!(f, "{}^{}", v, e)?;
        }
    }
    Ok(())
}

/// Highest term first, e.g. `-19/30*λ^4 + 2/3*λ^2 - 1/30`.
impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let a = c.abs();
            if a.is_one() && !m.is_one() {
                write_monomial(f, m, true)?;
            } else {
                write!(f, "{}", a)?;
                write_monomial(f, m, false)?;
            }
        }
        Ok(())
    }
}

impl FromStr for Poly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut pieces: Vec<(bool, String)> = Vec::new();
        let mut negative = false;
        let mut current = String::new();
        for (i, ch) in compact.chars().enumerate() {
            if (ch == '+' || ch == '-') && !(current.is_empty() && i == 0) {
                if current.is_empty() {
                    return Err(Error::Parse(format!("dangling sign in {s:?}")));
                }
                pieces.push((negative, std::mem::take(&mut current)));
                negative = ch == '-';
            } else if (ch == '+' || ch == '-') && i == 0 {
                negative = ch == '-';
            } else {
                current.push(ch);
            }
        }
        if current.is_empty() {
            return Err(Error::Parse(format!("trailing sign in {s:?}")));
        }
        pieces.push((negative, current));

        let mut terms = Vec::with_capacity(pieces.len());
        for (negative, body) in pieces {
            let mut coeff = Rational::one();
            let mut mono = Monomial::ONE;
            for factor in body.split('*') {
                if factor.is_empty() {
                    return Err(Error::Parse(format!("empty factor in {s:?}")));
                }
                if factor.starts_with(|c: char| c.is_ascii_digit()) {
                    coeff *= parse_rational(factor)?;
                } else {
                    let (name, exp) = match factor.split_once('^') {
                        Some((n, e)) => (
                            n,
                            e.parse::<u16>()
                                .map_err(|_| Error::Parse(format!("bad exponent {e:?}")))?,
                        ),
                        None => (factor, 1),
                    };
                    let v: Var = name.parse()?;
                    mono = mono.with_exponent(v, mono.exponent(v) + exp);
                }
            }
            if negative {
                coeff = -coeff;
            }
            terms.push((mono, coeff));
        }
        Ok(Poly::from_terms(terms))
    }
}

/// Parses `n` or `n/d` (with optional sign); rejects a zero denominator.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: BigInt = num.trim().parse().map_err(|_| bad())?;
    let den: BigInt = den.trim().parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

impl From<Rational> for Poly {
    fn from(c: Rational) -> Self {
        Poly::constant(c)
    }
}

impl From<Var> for Poly {
    fn from(v: Var) -> Self {
        Poly::var(v)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(mut self) -> Poly {
        for c in self.terms.values_mut() {
            *c = -std::mem::take(c);
        }
        self
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            match self.terms.get_mut(m) {
                Some(a) => {
                    *a += c;
                    if a.is_zero() {
                        self.terms.remove(m);
                    }
                }
                None => {
                    self.terms.insert(*m, c.clone());
                }
            }
        }
    }
}

impl SubAssign<&Poly> for Poly {
    fn sub_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            match self.terms.get_mut(m) {
                Some(a) => {
                    *a -= c;
                    if a.is_zero() {
                        self.terms.remove(m);
                    }
                }
                None => {
                    self.terms.insert(*m, -c);
                }
            }
        }
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = self.as_constant() {
            return rhs.scale(&c);
        }
        if let Some(c) = rhs.as_constant() {
            return self.scale(&c);
        }
        let mut acc: HashMap<Monomial, Rational> =
            HashMap::with_capacity(self.terms.len() * rhs.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                *acc.entry(ma.mul(mb)).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        Poly::from_accumulator(acc)
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: &Poly) -> Poly {
                (&self).$method(rhs)
            }
        }
        impl $tr<Poly> for &Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                self.$method(&rhs)
            }
        }
    )*};
}

forward_owned!(Add add, Sub sub, Mul mul);

impl std::iter::Sum for Poly {
    fn sum<I: Iterator<Item = Poly>>(iter: I) -> Poly {
        let mut acc = Poly::zero();
        for p in iter {
            acc += &p;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lam() -> Poly {
        Poly::var(Var::Lambda)
    }
    fn x() -> Poly {
        Poly::var(Var::X)
    }

    #[test]
    fn falling_three_expands() {
        let p = &(&x() * &(x() - lam())) * &(x() - lam() * Poly::int(2));
        let expected: Poly = "x^3 - 3*λ*x^2 + 2*λ^2*x".parse().unwrap();
        assert_eq!(p, expected);
    }

    #[test]
    fn trivial_products() {
        assert_eq!(Poly::rat(1, 2) * Poly::int(2), Poly::one());
        assert!((lam() * Poly::zero()).is_zero());
    }

    #[test]
    fn substitution_examples() {
        let beta2: Poly = "1/6 - 1/6*λ^2".parse().unwrap();
        assert_eq!(
            beta2.substitute_one(Var::Lambda, &Poly::zero()),
            Poly::rat(1, 6)
        );

        let fall2 = x() * x() - lam() * x();
        let subs = BTreeMap::from([
            (Var::Lambda, lam() * Poly::rat(1, 2)),
            (Var::X, x() * Poly::rat(1, 2)),
        ]);
        let expected: Poly = "1/4*x^2 - 1/4*λ*x".parse().unwrap();
        assert_eq!(fall2.substitute(&subs), expected);

        let beta1x: Poly = "x - 1/2 + 1/2*λ".parse().unwrap();
        let expected: Poly = "-1/2 + 1/2*λ".parse().unwrap();
        assert_eq!(beta1x.substitute_one(Var::X, &Poly::zero()), expected);
    }

    #[test]
    fn evaluation() {
        let beta2: Poly = "1/6 - 1/6*λ^2".parse().unwrap();
        let at = BTreeMap::from([(Var::Lambda, rat(1, 1))]);
        assert!(beta2.eval(&at).unwrap().is_zero());

        let p: Poly = "x - 1/2 + 1/2*λ".parse().unwrap();
        let at = BTreeMap::from([(Var::X, rat(1, 2)), (Var::Lambda, rat(0, 1))]);
        assert!(p.eval(&at).unwrap().is_zero());

        assert_eq!(Poly::one().eval(&BTreeMap::new()).unwrap(), rat(1, 1));
        assert_eq!(
            x().eval(&BTreeMap::new()),
            Err(Error::UnboundVariable(Var::X))
        );
    }

    #[test]
    fn display_matches_canonical_form() {
        let beta4 =
            Poly::rat(-19, 30) * lam().pow(4) + Poly::rat(2, 3) * lam().pow(2) - Poly::rat(1, 30);
        assert_eq!(beta4.to_string(), "-19/30*λ^4 + 2/3*λ^2 - 1/30");
        assert_eq!(Poly::zero().to_string(), "0");
        assert_eq!((x() * lam() * Poly::int(-3)).to_string(), "-3*λ*x");
        assert_eq!(
            beta4.to_latex(),
            "-\\frac{19}{30}\\lambda^{4} + \\frac{2}{3}\\lambda^{2} - \\frac{1}{30}"
        );
        assert_eq!((lam() * x()).to_latex(), "\\lambda x");
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!("".parse::<Poly>().is_err());
        assert!("x +".parse::<Poly>().is_err());
        assert!("q^2".parse::<Poly>().is_err());
        assert!("1/0".parse::<Poly>().is_err());
    }

    #[test]
    fn div_var_and_coefficients() {
        let p: Poly = "x^2*λ + 3*x".parse().unwrap();
        assert_eq!(p.div_var(Var::X).unwrap(), "x*λ + 3".parse().unwrap());
        assert!(p.div_var(Var::Lambda).is_none());
        let cs = p.coefficients_in(Var::X);
        assert_eq!(cs, vec![Poly::zero(), Poly::int(3), lam()]);
    }

    fn arb_poly() -> impl Strategy<Value = Poly> {
        let term = (-5i64..=5, 1i64..=4, prop::array::uniform3(0u16..=2)).prop_map(|(n, d, e)| {
            let mut m = Monomial::ONE;
            m = m.with_exponent(Var::Lambda, e[0]);
            m = m.with_exponent(Var::X, e[1]);
            m = m.with_exponent(Var::A, e[2]);
            (m, rat(n, d))
        });
        prop::collection::vec(term, 0..5).prop_map(Poly::from_terms)
    }

    proptest! {
        #[test]
        fn ring_axioms(p in arb_poly(), q in arb_poly(), r in arb_poly()) {
            prop_assert_eq!(&p * &q, &q * &p);
            prop_assert_eq!(&p + &q, &q + &p);
            prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
            prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
            prop_assert!((&p - &p).is_zero());
        }

        #[test]
        fn substitution_is_a_homomorphism(p in arb_poly(), q in arb_poly(), img in arb_poly()) {
            let id = BTreeMap::from([(Var::X, x()), (Var::Lambda, lam())]);
            prop_assert_eq!(p.substitute(&id), p.clone());
            let s = BTreeMap::from([(Var::X, img.clone()), (Var::A, lam() + Poly::int(1))]);
            prop_assert_eq!((&p * &q).substitute(&s), p.substitute(&s) * q.substitute(&s));
            prop_assert_eq!((&p + &q).substitute(&s), p.substitute(&s) + q.substitute(&s));
        }

        #[test]
        fn canonical_and_text_round_trip(p in arb_poly(), q in arb_poly()) {
            // Two construction orders of the same value.
            let left = &(&p + &q) * &q;
            let right = &(&q * &q) + &(&q * &p);
            prop_assert_eq!(&left, &right);
            let reparsed: Poly = left.to_string().parse().unwrap();
            prop_assert_eq!(reparsed, left);
        }
    }
}
