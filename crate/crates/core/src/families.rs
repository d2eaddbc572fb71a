//! Degenerate polynomial families built from their generating functions,
//! plus recurrence-based constructions that never touch a series.

use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactalg::{Poly, Rational, Var};
use crate::fps::{binomial, factorial, Series};

/// `(base)_{n,λ} = base (base - λ) ... (base - (n-1)λ)`.
pub fn falling_lambda(base: &Poly, n: usize) -> Poly {
    let lambda = Poly::var(Var::Lambda);
    let mut acc = Poly::one();
    let mut shift = Poly::zero();
    for _ in 0..n {
        acc = &acc * &(base - &shift);
        shift = &shift + &lambda;
    }
    acc
}

/// `e_λ^{base}(t)` truncated at `order`.
pub fn deg_exponential(base: &Poly, order: usize) -> Series {
    let lambda = Poly::var(Var::Lambda);
    let mut falling = Poly::one();
    let mut coeffs = Vec::with_capacity(order + 1);
    for n in 0..=order {
        if n > 0 {
            let shift = lambda.scale(&Rational::from_integer(BigInt::from(n - 1)));
            falling = &falling * &(base - &shift);
        }
        coeffs.push(falling.scale(&Rational::new(BigInt::one(), factorial(n))));
    }
    Series::from_coeffs(coeffs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyId {
    FallingLambda,
    DegBernoulli,
    DegEuler,
    HigherBernoulli,
    HigherEuler,
    ShefferT,
    Stirling1,
    ShefferY,
}

impl FamilyId {
    pub const ALL: [FamilyId; 8] = [
        FamilyId::FallingLambda,
        FamilyId::DegBernoulli,
        FamilyId::DegEuler,
        FamilyId::HigherBernoulli,
        FamilyId::HigherEuler,
        FamilyId::ShefferT,
        FamilyId::Stirling1,
        FamilyId::ShefferY,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyId::FallingLambda => "falling-lambda",
            FamilyId::DegBernoulli => "deg-bernoulli",
            FamilyId::DegEuler => "deg-euler",
            FamilyId::HigherBernoulli => "higher-bernoulli",
            FamilyId::HigherEuler => "higher-euler",
            FamilyId::ShefferT => "sheffer-t",
            FamilyId::Stirling1 => "stirling1",
            FamilyId::ShefferY => "sheffer-y",
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = FamilyId::ALL.iter().map(|f| f.name()).collect();
                Error::BadParams(format!(
                    "unknown family {s:?}; expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

/// Generating-function constructors at a fixed truncation order.
#[derive(Debug)]
pub struct Families {
    order: usize,
    bernoulli_base: OnceLock<Series>,
    euler_base: OnceLock<Series>,
}

impl Clone for Families {
    fn clone(&self) -> Self {
        Families::new(self.order)
    }
}

impl Families {
    pub fn new(order: usize) -> Self {
        Families {
            order,
            bernoulli_base: OnceLock::new(),
            euler_base: OnceLock::new(),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    fn check(&self, n: usize) -> Result<()> {
        if n > self.order {
            return Err(Error::OrderExceeded {
                requested: n,
                order: self.order,
            });
        }
        Ok(())
    }

    /// `t / (e_λ(t) - 1)`.
    pub fn bernoulli_base(&self) -> &Series {
        self.bernoulli_base.get_or_init(|| {
            // One extra order is spent by the division by t.
            let e = deg_exponential(&Poly::one(), self.order + 1);
            (&e - &Series::one(self.order + 1))
                .div_t()
                .and_then(|s| s.reciprocal())
                .expect("(e_λ(t) - 1)/t has constant term 1")
        })
    }

    /// `2 / (e_λ(t) + 1)`.
    pub fn euler_base(&self) -> &Series {
        self.euler_base.get_or_init(|| {
            let e = deg_exponential(&Poly::one(), self.order);
            (&e + &Series::one(self.order))
                .scale(&Poly::rat(1, 2))
                .reciprocal()
                .expect("(e_λ(t) + 1)/2 has constant term 1")
        })
    }

    pub fn exponential(&self, at: &Poly) -> Series {
        deg_exponential(at, self.order)
    }

    pub fn bernoulli_gf(&self, at: &Poly) -> Series {
        self.bernoulli_base() * &self.exponential(at)
    }

    pub fn euler_gf(&self, at: &Poly) -> Series {
        self.euler_base() * &self.exponential(at)
    }

    /// Raises a unit-constant series to `exponent`. Integer constants use
    /// repeated multiplication, anything else `exp(exponent · log base)`.
    pub fn power(base: &Series, exponent: &Poly) -> Result<Series> {
        match exponent.as_constant() {
            Some(c) if c.is_integer() => {
                let k: i64 = c
                    .to_integer()
                    .try_into()
                    .map_err(|_| Error::BadParams(format!("order {c} is too large")))?;
                base.pow_int(k)
            }
            _ => base.pow_symbolic(exponent),
        }
    }

    pub fn bernoulli_higher_gf(&self, order: &Poly, at: &Poly) -> Result<Series> {
        Ok(&Self::power(self.bernoulli_base(), order)? * &self.exponential(at))
    }

    pub fn euler_higher_gf(&self, order: &Poly, at: &Poly) -> Result<Series> {
        Ok(&Self::power(self.euler_base(), order)? * &self.exponential(at))
    }

    pub fn sheffer_t_gf(&self, ord_a: &Poly, ord_b: &Poly, at: &Poly) -> Result<Series> {
        let first = Self::power(self.bernoulli_base(), ord_a)?;
        let second = Self::power(self.euler_base(), ord_b)?;
        Ok(&(&first * &second) * &self.exponential(at))
    }

    pub fn bernoulli_deg(&self, n: usize, at: &Poly) -> Result<Poly> {
        self.check(n)?;
        self.bernoulli_gf(at).egf_coefficient(n)
    }

    pub fn euler_deg(&self, n: usize, at: &Poly) -> Result<Poly> {
        self.check(n)?;
        self.euler_gf(at).egf_coefficient(n)
    }

    pub fn bernoulli_higher(&self, n: usize, order: &Poly, at: &Poly) -> Result<Poly> {
        self.check(n)?;
        self.bernoulli_higher_gf(order, at)?.egf_coefficient(n)
    }

    pub fn euler_higher(&self, n: usize, order: &Poly, at: &Poly) -> Result<Poly> {
        self.check(n)?;
        self.euler_higher_gf(order, at)?.egf_coefficient(n)
    }

    pub fn sheffer_t(&self, n: usize, ord_a: &Poly, ord_b: &Poly, at: &Poly) -> Result<Poly> {
        self.check(n)?;
        self.sheffer_t_gf(ord_a, ord_b, at)?.egf_coefficient(n)
    }

    /// `β_{n,λ}(at)` for every `n` up to the truncation order.
    pub fn bernoulli_seq(&self, at: &Poly) -> Vec<Poly> {
        self.bernoulli_gf(at).egf_coefficients()
    }

    pub fn euler_seq(&self, at: &Poly) -> Vec<Poly> {
        self.euler_gf(at).egf_coefficients()
    }

    pub fn bernoulli_higher_seq(&self, order: &Poly, at: &Poly) -> Result<Vec<Poly>> {
        Ok(self.bernoulli_higher_gf(order, at)?.egf_coefficients())
    }

    pub fn euler_higher_seq(&self, order: &Poly, at: &Poly) -> Result<Vec<Poly>> {
        Ok(self.euler_higher_gf(order, at)?.egf_coefficients())
    }

    pub fn sheffer_t_seq(&self, ord_a: &Poly, ord_b: &Poly, at: &Poly) -> Result<Vec<Poly>> {
        Ok(self.sheffer_t_gf(ord_a, ord_b, at)?.egf_coefficients())
    }

    pub fn falling_seq(&self, at: &Poly) -> Vec<Poly> {
        (0..=self.order).map(|n| falling_lambda(at, n)).collect()
    }
}

fn falling_one_table(n: usize) -> Vec<Poly> {
    let one = Poly::one();
    (0..=n).map(|k| falling_lambda(&one, k)).collect()
}

fn extend_memo(memo: &Mutex<Vec<Poly>>, n: usize, next: impl Fn(&[Poly], usize) -> Poly) -> Poly {
    let mut known = memo.lock().unwrap_or_else(|e| e.into_inner());
    while known.len() <= n {
        let m = known.len();
        let value = next(&known, m);
        known.push(value);
    }
    known[n].clone()
}

/// `β_{n,λ}` from `(β+1)_{n,λ} - β_{n,λ} = δ_{n,1}` with the umbral
/// replacement `(β)_{k,λ} ↦ β_{k,λ}`.
///
/// The top term cancels, so the relation at index `m+1` is solved for `β_{m,λ}`:
/// `(m+1) β_m = δ_{m,0} - Σ_{k<m} C(m+1,k) β_k (1)_{m+1-k,λ}`.
pub fn bernoulli_deg_rec(n: usize) -> Poly {
    static MEMO: Mutex<Vec<Poly>> = Mutex::new(Vec::new());
    extend_memo(&MEMO, n, |known, m| {
        if m == 0 {
            return Poly::one();
        }
        let ones = falling_one_table(m + 1);
        let sum: Poly = (0..m)
            .map(|k| {
                (&known[k] * &ones[m + 1 - k]).scale(&Rational::from_integer(binomial(m + 1, k)))
            })
            .sum();
        (-sum).scale(&Rational::new(BigInt::one(), BigInt::from(m + 1)))
    })
}

/// `𝓔_{n,λ}` from `(𝓔+1)_{n,λ} + 𝓔_{n,λ} = 2δ_{n,0}`:
/// `2 𝓔_n = -Σ_{k<n} C(n,k) 𝓔_k (1)_{n-k,λ}` for `n ≥ 1`.
pub fn euler_deg_rec(n: usize) -> Poly {
    static MEMO: Mutex<Vec<Poly>> = Mutex::new(Vec::new());
    extend_memo(&MEMO, n, |known, m| {
        if m == 0 {
            return Poly::one();
        }
        let ones = falling_one_table(m);
        let sum: Poly = (0..m)
            .map(|k| (&known[k] * &ones[m - k]).scale(&Rational::from_integer(binomial(m, k))))
            .sum();
        sum.scale(&Rational::new(BigInt::from(-1), BigInt::from(2)))
    })
}

/// Signed Stirling numbers of the first kind from
/// `S₁(n+1,k) = S₁(n,k-1) - n S₁(n,k)`.
pub fn stirling1(n: usize, k: usize) -> Result<BigInt> {
    if k > n {
        return Err(Error::IndexOutOfRange(format!("S1({n},{k}) needs k <= n")));
    }
    static ROWS: Mutex<Vec<Vec<BigInt>>> = Mutex::new(Vec::new());
    let mut rows = ROWS.lock().unwrap_or_else(|e| e.into_inner());
    if rows.is_empty() {
        rows.push(vec![BigInt::one()]);
    }
    while rows.len() <= n {
        let m = rows.len() - 1;
        let prev = &rows[m];
        let next: Vec<BigInt> = (0..=m + 1)
            .map(|j| {
                let left = if j > 0 {
                    prev[j - 1].clone()
                } else {
                    BigInt::zero()
                };
                let right = prev.get(j).cloned().unwrap_or_default();
                left - right * BigInt::from(m)
            })
            .collect();
        rows.push(next);
    }
    Ok(rows[n][k].clone())
}

/// `S₁(n,k)` as the `n`-th EGF coefficient of `log^k(1+t)/k!`.
pub fn stirling1_via_series(n: usize, k: usize) -> Result<BigInt> {
    if k > n {
        return Err(Error::IndexOutOfRange(format!("S1({n},{k}) needs k <= n")));
    }
    let mut one_plus_t = Series::one(n);
    if n >= 1 {
        one_plus_t = &one_plus_t + &Series::t(n);
    }
    let log = one_plus_t.log()?;
    let power = log.pow_int(k as i64)?;
    let value = power
        .egf_coefficient(n)?
        .as_constant()
        .expect("rational series")
        / Rational::from_integer(factorial(k));
    debug_assert!(value.is_integer());
    Ok(value.to_integer())
}
