//! Random variables seen through their degenerate moments `E[(Y)_{n,λ}]`,
//! the Sheffer polynomials they induce, and a seeded Monte-Carlo check.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactalg::{Poly, Rational, Var};
use crate::families::falling_lambda;
use crate::fps::{binomial, Series};

/// Exact source of `E[(Y)_{n,λ}]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MomentProvider {
    /// `Y ~ U[0,1]`.
    Uniform01,
    /// `Y ~ Ber(p)`; `p` may be symbolic.
    Bernoulli(Poly),
    /// Sum of `m` independent copies of the base variable.
    IidSum(Box<MomentProvider>, usize),
    /// Sum of two independent variables.
    IndependentSum(Box<MomentProvider>, Box<MomentProvider>),
    /// The point mass at 0.
    Zero,
    /// Explicit moments `E[(Y)_{0,λ}], E[(Y)_{1,λ}], ...`; the first must be 1.
    Custom(Vec<Poly>),
}

impl MomentProvider {
    pub fn bernoulli_half() -> Self {
        MomentProvider::Bernoulli(Poly::rat(1, 2))
    }

    pub fn iid(base: MomentProvider, m: usize) -> Self {
        MomentProvider::IidSum(Box::new(base), m)
    }

    pub fn sum(first: MomentProvider, second: MomentProvider) -> Self {
        MomentProvider::IndependentSum(Box::new(first), Box::new(second))
    }

    pub fn custom(moments: Vec<Poly>) -> Result<Self> {
        match moments.first() {
            Some(m0) if m0.is_one() => Ok(MomentProvider::Custom(moments)),
            _ => Err(Error::BadParams("custom moments must start with 1".into())),
        }
    }

    pub fn moment(&self, n: usize) -> Result<Poly> {
        Ok(self.moments(n)?.swap_remove(n))
    }

    /// Moments `0..=n_max`.
    pub fn moments(&self, n_max: usize) -> Result<Vec<Poly>> {
        match self {
            MomentProvider::Uniform01 => Ok((0..=n_max).map(uniform01_moment).collect()),
            MomentProvider::Bernoulli(pv) => Ok((0..=n_max)
                .map(|n| {
                    if n == 0 {
                        Poly::one()
                    } else {
                        pv * &falling_lambda(&Poly::one(), n)
                    }
                })
                .collect()),
            MomentProvider::Zero => Ok(point_mass_zero(n_max)),
            MomentProvider::Custom(ms) => {
                if ms.len() <= n_max {
                    return Err(Error::MomentUnavailable(ms.len()));
                }
                Ok(ms[..=n_max].to_vec())
            }
            MomentProvider::IidSum(base, m) => {
                let base = base.moments(n_max)?;
                let mut acc = point_mass_zero(n_max);
                for _ in 0..*m {
                    acc = binomial_convolution(&acc, &base);
                }
                Ok(acc)
            }
            MomentProvider::IndependentSum(first, second) => Ok(binomial_convolution(
                &first.moments(n_max)?,
                &second.moments(n_max)?,
            )),
        }
    }

    /// `E[e_λ^Y(t)]` as a formal series.
    pub fn mgf_series(&self, order: usize) -> Result<Series> {
        Ok(Series::from_egf(self.moments(order)?))
    }

    pub fn is_samplable(&self) -> bool {
        match self {
            MomentProvider::Uniform01 | MomentProvider::Zero => true,
            MomentProvider::Bernoulli(p) => p.as_constant().is_some(),
            MomentProvider::IidSum(base, _) => base.is_samplable(),
            MomentProvider::IndependentSum(a, b) => a.is_samplable() && b.is_samplable(),
            MomentProvider::Custom(_) => false,
        }
    }

    fn sampler(&self) -> Result<Sampler> {
        match self {
            MomentProvider::Uniform01 => Ok(Sampler::Uniform),
            MomentProvider::Zero => Ok(Sampler::Zero),
            MomentProvider::Bernoulli(p) => {
                let p = p
                    .as_constant()
                    .ok_or_else(|| Error::UnsamplableProvider("symbolic Bernoulli p".into()))?;
                let pf = p.to_f64().unwrap_or(f64::NAN);
                if !(0.0..=1.0).contains(&pf) {
                    return Err(Error::UnsamplableProvider(format!("p = {p} outside [0,1]")));
                }
                Ok(Sampler::Bernoulli(pf))
            }
            MomentProvider::IidSum(base, m) => Ok(Sampler::Sum(vec![base.sampler()?; *m])),
            MomentProvider::IndependentSum(a, b) => {
                Ok(Sampler::Sum(vec![a.sampler()?, b.sampler()?]))
            }
            MomentProvider::Custom(_) => Err(Error::UnsamplableProvider(
                "custom moment sequences carry no distribution".into(),
            )),
        }
    }
}

fn point_mass_zero(n_max: usize) -> Vec<Poly> {
    (0..=n_max)
        .map(|n| if n == 0 { Poly::one() } else { Poly::zero() })
        .collect()
}

/// `∫₀¹ (y)_{n,λ} dy`, integrating the expansion in powers of `y` termwise.
pub fn uniform01_moment(n: usize) -> Poly {
    let expanded = falling_lambda(&Poly::var(Var::Y), n);
    expanded
        .coefficients_in(Var::Y)
        .into_iter()
        .enumerate()
        .map(|(j, c)| c.scale(&Rational::new(BigInt::one(), BigInt::from(j + 1))))
        .sum()
}

/// Moments of an independent sum via `(u+v)_{n,λ} = Σ C(n,k) (u)_{k,λ} (v)_{n-k,λ}`.
fn binomial_convolution(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let n_max = a.len().min(b.len());
    (0..n_max)
        .map(|n| {
            (0..=n)
                .map(|k| (&a[k] * &b[n - k]).scale(&Rational::from_integer(binomial(n, k))))
                .sum()
        })
        .collect()
}

/// Degenerate Sheffer polynomials attached to a random variable:
/// the EGF coefficients of `e_λ^x(t) / E[e_λ^Y(t)]`.
#[derive(Debug, Clone)]
pub struct ShefferY {
    provider: MomentProvider,
    order: usize,
    inverse_mgf: Series,
}

impl ShefferY {
    pub fn new(provider: MomentProvider, order: usize) -> Result<Self> {
        let inverse_mgf = provider.mgf_series(order)?.reciprocal()?;
        Ok(ShefferY {
            provider,
            order,
            inverse_mgf,
        })
    }

    pub fn provider(&self) -> &MomentProvider {
        &self.provider
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn inverse_mgf(&self) -> &Series {
        &self.inverse_mgf
    }

    pub fn generating_function(&self, at: &Poly) -> Series {
        &self.inverse_mgf * &crate::families::deg_exponential(at, self.order)
    }

    pub fn sheffer_poly(&self, n: usize, at: &Poly) -> Result<Poly> {
        if n > self.order {
            return Err(Error::OrderExceeded {
                requested: n,
                order: self.order,
            });
        }
        self.generating_function(at).egf_coefficient(n)
    }

    pub fn sheffer_seq(&self, at: &Poly) -> Vec<Poly> {
        self.generating_function(at).egf_coefficients()
    }
}

/// Writes `p(z)` as `Σ c_j (z)_{j,λ}` with every `c_j` free of `z`.
///
/// Uses `(z)_{j,λ} = z (z-λ)_{j-1,λ}`: peel off `p(0)`, divide by `z`, shift `z → z+λ`.
pub fn falling_basis(p: &Poly, z: Var) -> Vec<Poly> {
    let shift = BTreeMap::from([(z, &Poly::var(z) + &Poly::var(Var::Lambda))]);
    let at_zero = BTreeMap::from([(z, Poly::zero())]);
    let mut rest = p.clone();
    let mut out = Vec::new();
    while !rest.is_zero() {
        let c = rest.substitute(&at_zero);
        out.push(c.clone());
        rest = (&rest - &c)
            .div_var(z)
            .expect("p - p(0) is divisible by z")
            .substitute(&shift);
    }
    if out.is_empty() {
        out.push(Poly::zero());
    }
    out
}

/// Coefficients `d_k` with `p(z + Y) = Σ d_k (Y)_{k,λ}`, each `d_k` a polynomial in `z`.
pub fn shifted_falling_coeffs(p: &Poly, z: Var) -> Vec<Poly> {
    let c = falling_basis(p, z);
    let zp = Poly::var(z);
    (0..c.len())
        .map(|k| {
            (k..c.len())
                .map(|j| {
                    (&c[j] * &falling_lambda(&zp, j - k))
                        .scale(&Rational::from_integer(binomial(j, k)))
                })
                .sum()
        })
        .collect()
}

/// `E[Σ coeffs[k] (Y)_{k,λ}] = Σ coeffs[k] E[(Y)_{k,λ}]`.
pub fn expect_falling_basis(coeffs: &[Poly], provider: &MomentProvider) -> Result<Poly> {
    if coeffs.is_empty() {
        return Ok(Poly::zero());
    }
    let moments = provider.moments(coeffs.len() - 1)?;
    Ok(coeffs.iter().zip(&moments).map(|(c, m)| c * m).sum())
}

/// `E[p(z + Y)]` for a polynomial `p` in `z`.
pub fn expect_shifted(p: &Poly, z: Var, provider: &MomentProvider) -> Result<Poly> {
    expect_falling_basis(&shifted_falling_coeffs(p, z), provider)
}

#[derive(Debug, Clone)]
enum Sampler {
    Uniform,
    Bernoulli(f64),
    Zero,
    Sum(Vec<Sampler>),
}

impl Sampler {
    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            Sampler::Uniform => rng.random::<f64>(),
            Sampler::Bernoulli(p) => {
                if rng.random::<f64>() < *p {
                    1.0
                } else {
                    0.0
                }
            }
            Sampler::Zero => 0.0,
            Sampler::Sum(parts) => parts.iter().map(|s| s.draw(rng)).sum(),
        }
    }
}

/// What the Monte-Carlo run averages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum McTarget {
    /// `S^Y_{n,λ}(x + Y)`; its mean is `(x)_{n,λ}`.
    Thm31,
    /// `S^{Y^{(m)}}_{n,λ}(x + Y^{(l)})`; its mean is `S^{Y^{(m-l)}}_{n,λ}(x)`.
    Thm37 { m: usize, l: usize },
    /// `(Y)_{n,λ}`; its mean is the `n`-th moment.
    FallingMoment,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub exact: Rational,
    pub estimate: f64,
    pub std_error: f64,
    pub z: f64,
    pub samples: u64,
    pub seed: u64,
}

impl McEstimate {
    pub fn exact_f64(&self) -> f64 {
        self.exact.to_f64().unwrap_or(f64::NAN)
    }

    pub fn pass(&self) -> bool {
        self.z.abs() <= 3.0
    }
}

/// Samples per shard; each shard draws from its own ChaCha8 stream.
pub const SHARD_SIZE: u64 = 8192;

struct Prepared {
    exact: Rational,
    /// The integrand as a polynomial in `x`, with λ pinned.
    integrand: Vec<f64>,
    shift: Sampler,
}

fn prepare(
    target: &McTarget,
    provider: &MomentProvider,
    lambda: &Rational,
    x: &Rational,
    n: usize,
) -> Result<Prepared> {
    let xp = Poly::var(Var::X);
    let pin_lambda = BTreeMap::from([(Var::Lambda, lambda.clone())]);
    let pin_all = BTreeMap::from([(Var::Lambda, lambda.clone()), (Var::X, x.clone())]);
    let (integrand, exact, shift) = match target {
        McTarget::Thm31 => {
            let sy = ShefferY::new(provider.clone(), n)?;
            let poly = sy.sheffer_poly(n, &xp)?;
            let exact = falling_lambda(&xp, n).eval(&pin_all)?;
            (poly, exact, provider.sampler()?)
        }
        McTarget::Thm37 { m, l } => {
            if l > m {
                return Err(Error::BadParams(format!("need m >= l, got m={m}, l={l}")));
            }
            let sy = ShefferY::new(MomentProvider::iid(provider.clone(), *m), n)?;
            let poly = sy.sheffer_poly(n, &xp)?;
            let reduced = ShefferY::new(MomentProvider::iid(provider.clone(), m - l), n)?;
            let exact = reduced.sheffer_poly(n, &xp)?.eval(&pin_all)?;
            let shift = MomentProvider::iid(provider.clone(), *l).sampler()?;
            (poly, exact, shift)
        }
        McTarget::FallingMoment => {
            let poly = falling_lambda(&xp, n);
            let exact = provider.moment(n)?.eval(&pin_lambda)?;
            (poly, exact, provider.sampler()?)
        }
    };
    let pinned = integrand.pin(&pin_lambda);
    if let Some(v) = pinned.vars().into_iter().find(|&v| v != Var::X) {
        return Err(Error::UnboundVariable(v));
    }
    let integrand = pinned
        .coefficients_in(Var::X)
        .iter()
        .map(|c| c.constant_term().to_f64().unwrap_or(f64::NAN))
        .collect();
    Ok(Prepared {
        exact,
        integrand,
        shift,
    })
}

fn horner(coeffs: &[f64], at: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * at + c)
}

/// Seeded Monte-Carlo estimate of `E[target]`, with its standard error.
///
/// For [`McTarget::FallingMoment`] the sampled value is substituted for `x`
/// directly, so `x` should be 0. Results depend only on `(seed, samples)`,
/// never on the number of worker threads.
pub fn mc_estimate(
    target: &McTarget,
    provider: &MomentProvider,
    lambda: &Rational,
    x: &Rational,
    n: usize,
    samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    if samples == 0 {
        return Err(Error::BadParams("samples must be positive".into()));
    }
    let prep = prepare(target, provider, lambda, x, n)?;
    let xf = match target {
        McTarget::FallingMoment => 0.0,
        _ => x.to_f64().unwrap_or(f64::NAN),
    };
    let shards = samples.div_ceil(SHARD_SIZE);
    // (count, mean, sum of squared deviations) per shard.
    let parts: Vec<(f64, f64, f64)> = (0..shards)
        .into_par_iter()
        .map(|shard| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(shard);
            let count = SHARD_SIZE.min(samples - shard * SHARD_SIZE);
            let (mut mean, mut m2) = (0.0f64, 0.0f64);
            for i in 0..count {
                let v = horner(&prep.integrand, xf + prep.shift.draw(&mut rng));
                let d = v - mean;
                mean += d / (i + 1) as f64;
                m2 += d * (v - mean);
            }
            (count as f64, mean, m2)
        })
        .collect();
    let (mut count, mut mean, mut m2) = (0.0f64, 0.0f64, 0.0f64);
    for (c, m, s) in parts {
        let total = count + c;
        let d = m - mean;
        mean += d * c / total;
        m2 += s + d * d * count * c / total;
        count = total;
    }
    let variance = if count > 1.0 { m2 / (count - 1.0) } else { 0.0 };
    let std_error = (variance / count).sqrt();
    let exact_f = prep.exact.to_f64().unwrap_or(f64::NAN);
    let diff = mean - exact_f;
    let z = if std_error > 0.0 {
        diff / std_error
    } else if diff.abs() <= 1e-12 * exact_f.abs().max(1.0) {
        0.0
    } else {
        f64::INFINITY.copysign(diff)
    };
    Ok(McEstimate {
        exact: prep.exact,
        estimate: mean,
        std_error,
        z,
        samples,
        seed,
    })
}

impl MomentProvider {
    /// Parses `uniform01`, `zero`, `ber:<p>` (rational or `p`), and `iid:<m>:<inner>`.
    pub fn parse_spec(spec: &str) -> Result<Self> {
        let bad = || Error::BadParams(format!("bad provider spec {spec:?}"));
        match spec {
            "uniform01" | "u01" => return Ok(MomentProvider::Uniform01),
            "zero" => return Ok(MomentProvider::Zero),
            _ => {}
        }
        if let Some(p) = spec.strip_prefix("ber:") {
            let p = if p == "p" {
                Poly::var(Var::P)
            } else {
                Poly::constant(crate::exactalg::parse_rational(p).map_err(|_| bad())?)
            };
            return Ok(MomentProvider::Bernoulli(p));
        }
        if let Some(rest) = spec.strip_prefix("iid:") {
            let (m, inner) = rest.split_once(':').ok_or_else(bad)?;
            let m: usize = m.parse().map_err(|_| bad())?;
            return Ok(MomentProvider::iid(MomentProvider::parse_spec(inner)?, m));
        }
        Err(bad())
    }
}

/// Convenience for tests and callers working with machine integers.
pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}
