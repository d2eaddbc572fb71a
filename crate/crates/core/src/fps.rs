//! Truncated formal power series in `t` with polynomial coefficients.
//!
//! Coefficients are ordinary (`c_n` multiplies `t^n`); the exponential
//! generating function convention only enters through [`Series::egf_coefficient`].

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactalg::{Poly, Rational};

pub const DEFAULT_ORDER: usize = 16;

/// Coefficients of `t^0..=t^order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Series {
    coeffs: Vec<Poly>,
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn inv_int(n: usize) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(n))
}

impl Series {
    /// Panics if `coeffs` is empty.
    pub fn from_coeffs(coeffs: Vec<Poly>) -> Self {
        assert!(!coeffs.is_empty(), "a series keeps at least t^0");
        Series { coeffs }
    }

    pub fn from_fn(order: usize, f: impl FnMut(usize) -> Poly) -> Self {
        Series {
            coeffs: (0..=order).map(f).collect(),
        }
    }

    /// Builds from exponential-generating-function coefficients `a_n`, i.e. `Σ a_n t^n / n!`.
    pub fn from_egf(values: Vec<Poly>) -> Self {
        let coeffs = values
            .into_iter()
            .enumerate()
            .map(|(n, p)| p.scale(&Rational::new(BigInt::one(), factorial(n))))
            .collect();
        Series::from_coeffs(coeffs)
    }

    pub fn constant(c: Poly, order: usize) -> Self {
        let mut coeffs = vec![Poly::zero(); order + 1];
        coeffs[0] = c;
        Series { coeffs }
    }

    pub fn one(order: usize) -> Self {
        Series::constant(Poly::one(), order)
    }

    /// `t` itself, truncated at `order`.
    pub fn t(order: usize) -> Self {
        let mut s = Series::constant(Poly::zero(), order);
        if order >= 1 {
            s.coeffs[1] = Poly::one();
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Result<&Poly> {
        self.coeffs.get(n).ok_or(Error::OrderExceeded {
            requested: n,
            order: self.order(),
        })
    }

    pub fn truncate(&self, order: usize) -> Series {
        let keep = order.min(self.order());
        Series {
            coeffs: self.coeffs[..=keep].to_vec(),
        }
    }

    pub fn map_coeffs(&self, f: impl Fn(&Poly) -> Poly) -> Series {
        Series {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, c: &Poly) -> Series {
        self.map_coeffs(|p| p * c)
    }

    /// `n! · [t^n] F`.
    pub fn egf_coefficient(&self, n: usize) -> Result<Poly> {
        Ok(self.coeff(n)?.scale(&Rational::from_integer(factorial(n))))
    }

    /// All EGF coefficients `0..=order`.
    pub fn egf_coefficients(&self) -> Vec<Poly> {
        let mut fact = BigInt::one();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| {
                if n > 0 {
                    fact *= BigInt::from(n);
                }
                c.scale(&Rational::from_integer(fact.clone()))
            })
            .collect()
    }

    /// Multiplicative inverse; the constant term must be a nonzero rational.
    pub fn reciprocal(&self) -> Result<Series> {
        let c0 = self.coeffs[0]
            .as_constant()
            .filter(|c| !c.is_zero())
            .ok_or(Error::NonUnitConstantTerm)?;
        let inv0 = c0.recip();
        let neg_inv0 = -inv0.clone();
        let mut out: Vec<Poly> = Vec::with_capacity(self.coeffs.len());
        out.push(Poly::constant(inv0));
        for n in 1..self.coeffs.len() {
            let acc: Poly = (1..=n)
                .filter(|&k| !self.coeffs[k].is_zero())
                .map(|k| &self.coeffs[k] * &out[n - k])
                .sum();
            out.push(acc.scale(&neg_inv0));
        }
        Ok(Series { coeffs: out })
    }

    /// Logarithm of a series with constant term 1, from `L' F = F'`.
    pub fn log(&self) -> Result<Series> {
        if !self.coeffs[0].is_one() {
            return Err(Error::NonUnitConstantTerm);
        }
        let mut out = vec![Poly::zero(); self.coeffs.len()];
        for n in 1..self.coeffs.len() {
            let inner: Poly = (1..n)
                .filter(|&k| !out[k].is_zero() && !self.coeffs[n - k].is_zero())
                .map(|k| (&out[k] * &self.coeffs[n - k]).scale(&Rational::from_integer(k.into())))
                .sum();
            out[n] = &self.coeffs[n] - &inner.scale(&inv_int(n));
        }
        Ok(Series { coeffs: out })
    }

    /// Exponential of a series with zero constant term.
    pub fn exp(&self) -> Result<Series> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        let mut out: Vec<Poly> = Vec::with_capacity(self.coeffs.len());
        out.push(Poly::one());
        for n in 1..self.coeffs.len() {
            let acc: Poly = (1..=n)
                .filter(|&k| !self.coeffs[k].is_zero())
                .map(|k| (&self.coeffs[k] * &out[n - k]).scale(&Rational::from_integer(k.into())))
                .sum();
            out.push(acc.scale(&inv_int(n)));
        }
        Ok(Series { coeffs: out })
    }

    /// `F^e = exp(e · log F)` for a polynomial exponent `e`.
    pub fn pow_symbolic(&self, e: &Poly) -> Result<Series> {
        let log = self.log()?;
        log.scale(e).exp()
    }

    /// Integer power by repeated multiplication; negative powers go through the reciprocal.
    pub fn pow_int(&self, k: i64) -> Result<Series> {
        let base = if k < 0 {
            self.reciprocal()?
        } else {
            self.clone()
        };
        let mut e = k.unsigned_abs();
        let mut square = base;
        let mut acc = Series::one(self.order());
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &square;
            }
            e >>= 1;
            if e > 0 {
                square = &square * &square;
            }
        }
        Ok(acc)
    }

    /// `F(c·t)`.
    pub fn scale_t(&self, c: &Poly) -> Series {
        let mut power = Poly::one();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (n, a) in self.coeffs.iter().enumerate() {
            if n > 0 {
                power = &power * c;
            }
            coeffs.push(a * &power);
        }
        Series { coeffs }
    }

    /// `F / t`; the recorded order drops by one.
    pub fn div_t(&self) -> Result<Series> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        if self.coeffs.len() < 2 {
            return Err(Error::OrderExceeded {
                requested: 1,
                order: 0,
            });
        }
        Ok(Series {
            coeffs: self.coeffs[1..].to_vec(),
        })
    }

    /// `t · F`; the order grows by one and the new top coefficient is exact.
    pub fn mul_t(&self) -> Series {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Poly::zero());
        coeffs.extend(self.coeffs.iter().cloned());
        Series { coeffs }
    }
}

impl Add<&Series> for &Series {
    type Output = Series;
    fn add(self, rhs: &Series) -> Series {
        let n = self.coeffs.len().min(rhs.coeffs.len());
        Series {
            coeffs: (0..n).map(|i| &self.coeffs[i] + &rhs.coeffs[i]).collect(),
        }
    }
}

impl Sub<&Series> for &Series {
    type Output = Series;
    fn sub(self, rhs: &Series) -> Series {
        let n = self.coeffs.len().min(rhs.coeffs.len());
        Series {
            coeffs: (0..n).map(|i| &self.coeffs[i] - &rhs.coeffs[i]).collect(),
        }
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        self.map_coeffs(|p| -p)
    }
}

impl Mul<&Series> for &Series {
    type Output = Series;
    fn mul(self, rhs: &Series) -> Series {
        let n = self.coeffs.len().min(rhs.coeffs.len());
        let coeffs = (0..n)
            .map(|i| {
                (0..=i)
                    .filter(|&k| !self.coeffs[k].is_zero() && !rhs.coeffs[i - k].is_zero())
                    .map(|k| &self.coeffs[k] * &rhs.coeffs[i - k])
                    .sum()
            })
            .collect();
        Series { coeffs }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr<Series> for Series {
            type Output = Series;
            fn $method(self, rhs: Series) -> Series {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Series> for Series {
            type Output = Series;
            fn $method(self, rhs: &Series) -> Series {
                (&self).$method(rhs)
            }
        }
    )*};
}

forward_owned!(Add add, Sub sub, Mul mul);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{rat, Var};
    use crate::families::deg_exponential;
    use proptest::prelude::*;

    fn lam() -> Poly {
        Poly::var(Var::Lambda)
    }

    fn poly_series(cs: &[Poly], order: usize) -> Series {
        Series::from_fn(order, |n| cs.get(n).cloned().unwrap_or_else(Poly::zero))
    }

    #[test]
    fn product_truncates() {
        let a = poly_series(&[Poly::one(), Poly::one()], 4);
        let b = poly_series(&[Poly::one(), Poly::int(-1)], 4);
        assert_eq!(
            &a * &b,
            poly_series(&[Poly::one(), Poly::zero(), Poly::int(-1)], 4)
        );
        let short = poly_series(&[Poly::one(), Poly::one()], 2);
        assert_eq!((&a * &short).order(), 2);
    }

    #[test]
    fn product_of_degenerate_exponentials() {
        let x = Poly::var(Var::X);
        let y = Poly::var(Var::Y);
        let prod = &deg_exponential(&x, 4) * &deg_exponential(&y, 4);
        let s = &x + &y;
        let expected = (&(&s * &s) - &(&lam() * &s)).scale(&rat(1, 2));
        assert_eq!(prod.coeff(2).unwrap(), &expected);
    }

    #[test]
    fn reciprocal_geometric() {
        let f = poly_series(&[Poly::one(), Poly::one()], 5);
        let g = f.reciprocal().unwrap();
        for n in 0..=5 {
            assert_eq!(
                g.coeff(n).unwrap(),
                &Poly::int(if n % 2 == 0 { 1 } else { -1 })
            );
        }
        assert_eq!(&f * &g, Series::one(5));
        assert_eq!(g.reciprocal().unwrap(), f);
    }

    #[test]
    fn reciprocal_rejects_symbolic_constant() {
        let f = poly_series(&[lam()], 3);
        assert_eq!(f.reciprocal(), Err(Error::NonUnitConstantTerm));
        let z = poly_series(&[Poly::zero(), Poly::one()], 3);
        assert_eq!(z.reciprocal(), Err(Error::NonUnitConstantTerm));
    }

    #[test]
    fn reciprocal_of_bernoulli_half_mgf() {
        let half = rat(1, 2);
        let e = deg_exponential(&Poly::one(), 6);
        let mgf = (&e + &Series::one(6)).scale(&Poly::constant(half));
        let inv = mgf.reciprocal().unwrap();
        assert_eq!(inv.coeff(1).unwrap(), &Poly::rat(-1, 2));
    }

    #[test]
    fn log_of_one_plus_t() {
        let f = poly_series(&[Poly::one(), Poly::one()], 6);
        let l = f.log().unwrap();
        assert!(l.coeff(0).unwrap().is_zero());
        for n in 1..=6i64 {
            let sign = if n % 2 == 1 { 1 } else { -1 };
            assert_eq!(l.coeff(n as usize).unwrap(), &Poly::rat(sign, n));
        }
        assert_eq!(
            poly_series(&[Poly::int(2)], 3).log(),
            Err(Error::NonUnitConstantTerm)
        );
    }

    // Oracle: log(e_λ(t)) = log(1+λt)/λ = Σ (-λ)^{n-1} t^n / n.
    #[test]
    fn log_of_degenerate_exponential() {
        let l = deg_exponential(&Poly::one(), 7).log().unwrap();
        for n in 1..=7usize {
            let expected = lam()
                .pow((n - 1) as u32)
                .scale(&rat(if n % 2 == 1 { 1 } else { -1 }, n as i64));
            assert_eq!(l.coeff(n).unwrap(), &expected, "n = {n}");
        }
    }

    #[test]
    fn exp_examples() {
        let e = Series::t(6).exp().unwrap();
        for n in 0..=6 {
            assert_eq!(
                e.coeff(n).unwrap(),
                &Poly::constant(Rational::new(BigInt::one(), factorial(n)))
            );
        }
        let f = poly_series(&[Poly::one(), Poly::one()], 6);
        assert_eq!(f.log().unwrap().exp().unwrap(), f);
        assert_eq!(f.exp(), Err(Error::NonzeroConstantTerm));
    }

    // Oracle: (1+t)^a = Σ C(a, n) t^n with C(a, n) = a(a-1)...(a-n+1)/n!.
    #[test]
    fn symbolic_binomial_series() {
        let a = Poly::var(Var::A);
        let f = poly_series(&[Poly::one(), Poly::one()], 6);
        let g = f.pow_symbolic(&a).unwrap();
        let mut falling = Poly::one();
        for n in 0..=6usize {
            let expected = falling.scale(&Rational::new(BigInt::one(), factorial(n)));
            assert_eq!(g.coeff(n).unwrap(), &expected, "n = {n}");
            falling = &falling * &(&a - &Poly::int(n as i64));
        }
    }

    #[test]
    fn power_edge_cases() {
        let f = deg_exponential(&Poly::one(), 6);
        let f = (&f + &Series::one(6)).scale(&Poly::rat(1, 2));
        assert_eq!(f.pow_symbolic(&Poly::one()).unwrap(), f);
        assert_eq!(f.pow_symbolic(&Poly::zero()).unwrap(), Series::one(6));
        assert_eq!(f.pow_int(0).unwrap(), Series::one(6));
        assert_eq!(f.pow_int(-1).unwrap(), f.reciprocal().unwrap());
    }

    #[test]
    fn bernoulli_base_first_order_power() {
        // (e_λ(t) - 1)/t = 1 + (1-λ)t/2 + ..., so the a-th power of its inverse starts 1 - a(1-λ)t/2.
        let a = Poly::var(Var::A);
        let e = deg_exponential(&Poly::one(), 5);
        let base = (&e - &Series::one(5))
            .div_t()
            .unwrap()
            .reciprocal()
            .unwrap();
        let g = base.pow_symbolic(&a).unwrap();
        let expected = (&a * &(&Poly::one() - &lam())).scale(&rat(-1, 2));
        assert_eq!(g.coeff(1).unwrap(), &expected);
    }

    #[test]
    fn scaling_and_shifts() {
        let f = poly_series(&[Poly::one(), Poly::one()], 3);
        assert_eq!(
            f.scale_t(&Poly::int(2)),
            poly_series(&[Poly::one(), Poly::int(2)], 3)
        );
        let e = Series::t(4).exp().unwrap().scale_t(&lam());
        assert_eq!(e.coeff(3).unwrap(), &lam().pow(3).scale(&rat(1, 6)));

        let em1 = &deg_exponential(&Poly::one(), 5) - &Series::one(5);
        let q = em1.div_t().unwrap();
        assert_eq!(q.order(), 4);
        assert_eq!(q.coeff(0).unwrap(), &Poly::one());
        assert_eq!(q.mul_t(), em1);
        assert_eq!(f.div_t(), Err(Error::NonzeroConstantTerm));
    }

    #[test]
    fn egf_extraction() {
        let x = Poly::var(Var::X);
        let e = deg_exponential(&x, 4);
        assert_eq!(e.egf_coefficient(2).unwrap(), &(&x * &x) - &(&lam() * &x));
        assert_eq!(e.egf_coefficient(0).unwrap(), Poly::one());
        assert_eq!(
            e.egf_coefficient(5),
            Err(Error::OrderExceeded {
                requested: 5,
                order: 4
            })
        );
        assert_eq!(Series::from_egf(e.egf_coefficients()), e);
    }

    #[test]
    fn integer_power_matches_repeated_product() {
        let base = &deg_exponential(&Poly::one(), 6) + &Series::one(6);
        let base = base.scale(&Poly::rat(1, 2));
        let mut brute = Series::one(6);
        for k in 0..=4i64 {
            assert_eq!(base.pow_int(k).unwrap(), brute);
            assert_eq!(base.pow_symbolic(&Poly::int(k)).unwrap(), brute);
            brute = &brute * &base;
        }
    }

    fn arb_unit_series() -> impl Strategy<Value = Series> {
        prop::collection::vec((-4i64..=4, 1i64..=3, 0u32..=2), 5).prop_map(|cs| {
            let mut coeffs: Vec<Poly> = cs
                .into_iter()
                .map(|(n, d, e)| Poly::var(Var::Lambda).pow(e).scale(&rat(n, d)))
                .collect();
            coeffs[0] = Poly::one();
            Series::from_coeffs(coeffs)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn exp_log_inverse_pair(f in arb_unit_series()) {
            let l = f.log().unwrap();
            prop_assert_eq!(l.exp().unwrap(), f.clone());
            prop_assert_eq!(l.exp().unwrap().log().unwrap(), l);
        }

        #[test]
        fn symbolic_power_laws(f in arb_unit_series()) {
            let a = Poly::var(Var::A);
            let b = Poly::var(Var::B);
            let fa = f.pow_symbolic(&a).unwrap();
            let fb = f.pow_symbolic(&b).unwrap();
            prop_assert_eq!(&fa * &fb, f.pow_symbolic(&(&a + &b)).unwrap());
            let a3 = a.scale(&rat(3, 1));
            prop_assert_eq!(fa.pow_int(3).unwrap(), f.pow_symbolic(&a3).unwrap());
        }

        #[test]
        fn div_mul_t_round_trip(f in arb_unit_series()) {
            let shifted = f.mul_t();
            prop_assert_eq!(shifted.div_t().unwrap(), f);
        }
    }
}
