//! Registry of polynomial identities between the families, each an
//! executable pair of sides compared coefficient by coefficient.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactalg::{Poly, Rational, Var};
use crate::families::{stirling1, Families};
use crate::fps::{binomial, factorial, Series};
use crate::randvar::{expect_shifted, MomentProvider, ShefferY};

/// Produces the values of one side for `n = 0..=max_n` (extra entries are ignored).
pub type Side = Arc<dyn Fn(&Families, usize) -> Result<Vec<Poly>> + Send + Sync>;

#[derive(Clone)]
pub struct Variant {
    pub label: String,
    pub lhs: Side,
    pub rhs: Side,
}

#[derive(Clone)]
pub struct IdentityCase {
    pub id: String,
    pub description: String,
    /// Indeterminates kept symbolic by the check.
    pub symbols: Vec<Var>,
    pub variants: Vec<Variant>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub variant: String,
    pub n: usize,
    pub lhs: Poly,
    pub rhs: Poly,
    pub diff: Poly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub id: String,
    pub max_n: usize,
    pub symbols: Vec<Var>,
    pub equal: bool,
    pub first_mismatch: Option<Mismatch>,
    /// Set when a side could not be evaluated; such a report is never equal.
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    /// Truncation order available to the check; must exceed `max_n` by one.
    pub order: usize,
    /// Variables to pin to rational values before comparing.
    pub pins: BTreeMap<Var, Rational>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            order: crate::fps::DEFAULT_ORDER,
            pins: BTreeMap::new(),
        }
    }
}

pub const DEFAULT_MAX_N: usize = 8;
/// Shift identities read index `n + 1`.
pub const SHIFT_MARGIN: usize = 1;

const ALIASES: &[(&str, &str)] = &[
    ("thm2.3-bernoulli", "thm2.3-B"),
    ("thm2.3-euler", "thm2.3-E"),
];

#[derive(Clone)]
pub struct Registry {
    cases: Vec<IdentityCase>,
}

impl Registry {
    pub fn empty() -> Self {
        Registry { cases: Vec::new() }
    }

    pub fn standard() -> Self {
        Registry {
            cases: standard_cases(),
        }
    }

    pub fn push(&mut self, case: IdentityCase) {
        self.cases.push(case);
    }

    pub fn cases(&self) -> &[IdentityCase] {
        &self.cases
    }

    pub fn ids(&self) -> Vec<&str> {
        self.cases.iter().map(|c| c.id.as_str()).collect()
    }

    pub fn get(&self, id: &str) -> Option<&IdentityCase> {
        let id = ALIASES
            .iter()
            .find(|(alias, _)| *alias == id)
            .map_or(id, |(_, target)| target);
        self.cases.iter().find(|c| c.id == id)
    }

    /// Cases matching `filter`: a glob, or an exact id (which must exist).
    pub fn select(&self, filter: &str) -> Result<Vec<&IdentityCase>> {
        if filter.is_empty() {
            return Ok(Vec::new());
        }
        if !filter.contains(['*', '?', '[']) {
            return self
                .get(filter)
                .map(|c| vec![c])
                .ok_or_else(|| Error::UnknownIdentity(filter.to_string()));
        }
        let pattern = glob::Pattern::new(filter)
            .map_err(|e| Error::BadParams(format!("bad filter {filter:?}: {e}")))?;
        Ok(self
            .cases
            .iter()
            .filter(|c| pattern.matches(&c.id))
            .collect())
    }

    /// Replaces the right side of the first variant of `id` with one that is off by 1 for `n ≥ 1`.
    pub fn with_fault(mut self, id: &str) -> Result<Self> {
        let case = self
            .cases
            .iter_mut()
            .find(|c| c.id == id)
            .ok_or_else(|| Error::UnknownIdentity(id.to_string()))?;
        let variant = case
            .variants
            .first_mut()
            .ok_or_else(|| Error::BadParams(format!("{id} has no variants")))?;
        let original = variant.rhs.clone();
        variant.rhs = Arc::new(move |fam: &Families, max_n: usize| {
            let mut values = original(fam, max_n)?;
            for v in values.iter_mut().skip(1) {
                *v = &*v + &Poly::one();
            }
            Ok(values)
        });
        Ok(self)
    }
}

pub fn verify_case(case: &IdentityCase, max_n: usize, config: &VerifyConfig) -> Result<Report> {
    if max_n + SHIFT_MARGIN > config.order {
        return Err(Error::OrderExceeded {
            requested: max_n + SHIFT_MARGIN,
            order: config.order,
        });
    }
    let fam = Families::new(max_n + SHIFT_MARGIN);
    let mut report = Report {
        id: case.id.clone(),
        max_n,
        symbols: case
            .symbols
            .iter()
            .copied()
            .filter(|v| !config.pins.contains_key(v))
            .collect(),
        equal: true,
        first_mismatch: None,
        error: None,
    };
    for variant in &case.variants {
        let outcome = (|| -> Result<Option<Mismatch>> {
            let lhs = (variant.lhs)(&fam, max_n)?;
            let rhs = (variant.rhs)(&fam, max_n)?;
            if lhs.len() <= max_n || rhs.len() <= max_n {
                return Err(Error::OrderExceeded {
                    requested: max_n,
                    order: lhs.len().min(rhs.len()).saturating_sub(1),
                });
            }
            for n in 0..=max_n {
                let l = lhs[n].pin(&config.pins);
                let r = rhs[n].pin(&config.pins);
                if l != r {
                    let diff = &l - &r;
                    return Ok(Some(Mismatch {
                        variant: variant.label.clone(),
                        n,
                        lhs: l,
                        rhs: r,
                        diff,
                    }));
                }
            }
            Ok(None)
        })();
        match outcome {
            Ok(None) => {}
            Ok(Some(m)) => {
                report.equal = false;
                report.first_mismatch = Some(m);
                break;
            }
            Err(e) => {
                report.equal = false;
                report.error = Some(format!("{}: {e}", variant.label));
                break;
            }
        }
    }
    Ok(report)
}

pub fn verify(
    registry: &Registry,
    id: &str,
    max_n: usize,
    config: &VerifyConfig,
) -> Result<Report> {
    let case = registry
        .get(id)
        .ok_or_else(|| Error::UnknownIdentity(id.to_string()))?;
    verify_case(case, max_n, config)
}

/// Runs every case selected by `filter` (all cases for `None`); reports keep registry order.
pub fn verify_all(
    registry: &Registry,
    filter: Option<&str>,
    max_n: usize,
    config: &VerifyConfig,
) -> Result<Vec<Report>> {
    let selected: Vec<&IdentityCase> = match filter {
        None => registry.cases.iter().collect(),
        Some(f) => registry.select(f)?,
    };
    selected
        .par_iter()
        .map(|case| verify_case(case, max_n, config))
        .collect()
}

// ---------------------------------------------------------------------------
// Building blocks for the sides.

fn v(var: Var) -> Poly {
    Poly::var(var)
}

fn c(n: i64) -> Poly {
    Poly::int(n)
}

fn int(n: usize) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn at(seq: &[Poly], i: isize) -> Poly {
    if i < 0 {
        Poly::zero()
    } else {
        seq[i as usize].clone()
    }
}

/// `Σ_k C(n,k) f_k g_{n-k}` for each `n`.
fn conv(f: &[Poly], g: &[Poly]) -> Vec<Poly> {
    let len = f.len().min(g.len());
    (0..len)
        .map(|n| {
            (0..=n)
                .map(|k| (&f[k] * &g[n - k]).scale(&Rational::from_integer(binomial(n, k))))
                .sum()
        })
        .collect()
}

/// `n · seq[n-1]`.
fn n_times_prev(seq: &[Poly]) -> Vec<Poly> {
    (0..seq.len())
        .map(|n| at(seq, n as isize - 1).scale(&int(n)))
        .collect()
}

fn zip_with(f: &[Poly], g: &[Poly], op: impl Fn(&Poly, &Poly) -> Poly) -> Vec<Poly> {
    f.iter().zip(g).map(|(a, b)| op(a, b)).collect()
}

fn side<F>(f: F) -> Side
where
    F: Fn(&Families, usize) -> Result<Vec<Poly>> + Send + Sync + 'static,
{
    Arc::new(f)
}

fn variant(label: &str, lhs: Side, rhs: Side) -> Variant {
    Variant {
        label: label.to_string(),
        lhs,
        rhs,
    }
}

fn case(id: &str, description: &str, symbols: &[Var], variants: Vec<Variant>) -> IdentityCase {
    IdentityCase {
        id: id.to_string(),
        description: description.to_string(),
        symbols: symbols.to_vec(),
        variants,
    }
}

fn sheffer_seq(provider: &MomentProvider, fam: &Families, at: &Poly) -> Result<Vec<Poly>> {
    Ok(ShefferY::new(provider.clone(), fam.order())?.sheffer_seq(at))
}

/// `C(n,k) / C(n-k+m, m) · λ^{n-k} · S₁(n-k+m, m)`.
fn stirling_weight(n: usize, k: usize, m: usize) -> Result<Poly> {
    let j = n - k;
    let w = Rational::new(binomial(n, k), binomial(j + m, m))
        * Rational::from_integer(stirling1(j + m, m)?);
    Ok(v(Var::Lambda).pow(j as u32).scale(&w))
}

/// `Σ_k weight(n,k,m) · terms[k]`, the shape shared by the uniform i.i.d.-sum identities.
fn stirling_combination(terms: &[Poly], m: usize) -> Result<Vec<Poly>> {
    (0..terms.len())
        .map(|n| {
            (0..=n)
                .map(|k| Ok(&stirling_weight(n, k, m)? * &terms[k]))
                .sum::<Result<Poly>>()
        })
        .collect()
}

// ---------------------------------------------------------------------------

fn standard_cases() -> Vec<IdentityCase> {
    use Var::{Lambda, A, B, P, X, Y};
    let x = || v(X);
    let y = || v(Y);
    let a = || v(A);
    let b = || v(B);
    let xy = move || &x() + &y();
    let x1 = move || &x() + &c(1);
    let zero = Poly::zero;

    let mut out = Vec::new();

    out.push(case(
        "prop2.1-B",
        "β^(a+b)_n(x+y) = Σ C(n,k) β^(a)_k(x) β^(b)_{n-k}(y)",
        &[Lambda, X, Y, A, B],
        vec![variant(
            "main",
            side(move |f, _| f.bernoulli_higher_seq(&(&a() + &b()), &xy())),
            side(move |f, _| {
                Ok(conv(
                    &f.bernoulli_higher_seq(&a(), &x())?,
                    &f.bernoulli_higher_seq(&b(), &y())?,
                ))
            }),
        )],
    ));

    out.push(case(
        "prop2.1-E",
        "𝓔^(a+b)_n(x+y) = Σ C(n,k) 𝓔^(a)_k(x) 𝓔^(b)_{n-k}(y)",
        &[Lambda, X, Y, A, B],
        vec![variant(
            "main",
            side(move |f, _| f.euler_higher_seq(&(&a() + &b()), &xy())),
            side(move |f, _| {
                Ok(conv(
                    &f.euler_higher_seq(&a(), &x())?,
                    &f.euler_higher_seq(&b(), &y())?,
                ))
            }),
        )],
    ));

    out.push(case(
        "cor2.2-B",
        "β^(a)_n(x+y) = Σ C(n,k) β^(a)_k(x) (y)_{n-k,λ}",
        &[Lambda, X, Y, A],
        vec![variant(
            "main",
            side(move |f, _| f.bernoulli_higher_seq(&a(), &xy())),
            side(move |f, _| {
                Ok(conv(
                    &f.bernoulli_higher_seq(&a(), &x())?,
                    &f.falling_seq(&y()),
                ))
            }),
        )],
    ));

    out.push(case(
        "cor2.2-E",
        "𝓔^(a)_n(x+y) = Σ C(n,k) 𝓔^(a)_k(x) (y)_{n-k,λ}",
        &[Lambda, X, Y, A],
        vec![variant(
            "main",
            side(move |f, _| f.euler_higher_seq(&a(), &xy())),
            side(move |f, _| Ok(conv(&f.euler_higher_seq(&a(), &x())?, &f.falling_seq(&y())))),
        )],
    ));

    out.push(case(
        "thm2.3-B",
        "β^(α)_n(x+1) - β^(α)_n(x) = n β^(α-1)_{n-1}(x)",
        &[Lambda, X, A],
        vec![variant(
            "main",
            side(move |f, _| {
                let shifted = f.bernoulli_higher_seq(&a(), &x1())?;
                let plain = f.bernoulli_higher_seq(&a(), &x())?;
                Ok(zip_with(&shifted, &plain, |p, q| p - q))
            }),
            side(move |f, _| {
                Ok(n_times_prev(
                    &f.bernoulli_higher_seq(&(&a() - &c(1)), &x())?,
                ))
            }),
        )],
    ));

    out.push(case(
        "thm2.3-E",
        "𝓔^(α)_n(x+1) + 𝓔^(α)_n(x) = 2 𝓔^(α-1)_n(x)",
        &[Lambda, X, A],
        vec![variant(
            "main",
            side(move |f, _| {
                let shifted = f.euler_higher_seq(&a(), &x1())?;
                let plain = f.euler_higher_seq(&a(), &x())?;
                Ok(zip_with(&shifted, &plain, |p, q| p + q))
            }),
            side(move |f, _| {
                Ok(f.euler_higher_seq(&(&a() - &c(1)), &x())?
                    .iter()
                    .map(|p| p.scale(&int(2)))
                    .collect())
            }),
        )],
    ));

    out.push(case(
        "thm2.4",
        "β_n(x) = (n/2) 𝓔_{n-1}(x) + Σ C(n,k) β_k 𝓔_{n-k}(x)",
        &[Lambda, X],
        vec![variant(
            "main",
            side(move |f, _| Ok(f.bernoulli_seq(&x()))),
            side(move |f, _| {
                let e = f.euler_seq(&x());
                let half = n_times_prev(&e)
                    .iter()
                    .map(|p| p.scale(&Rational::new(1.into(), 2.into())))
                    .collect::<Vec<_>>();
                let sum = conv(&f.bernoulli_seq(&zero()), &e);
                Ok(zip_with(&half, &sum, |p, q| p + q))
            }),
        )],
    ));

    out.push(case(
        "prop-T-add",
        "T^(a,b)_n(x+y) = Σ C(n,k) β^(a)_k(x) 𝓔^(b)_{n-k}(y)",
        &[Lambda, X, Y, A, B],
        vec![variant(
            "main",
            side(move |f, _| f.sheffer_t_seq(&a(), &b(), &xy())),
            side(move |f, _| {
                Ok(conv(
                    &f.bernoulli_higher_seq(&a(), &x())?,
                    &f.euler_higher_seq(&b(), &y())?,
                ))
            }),
        )],
    ));

    out.push(case(
        "prop-T-expand",
        "T^(a,b)_n(x) = Σ C(n,k) T^(a,b)_k(0) (x)_{n-k,λ}",
        &[Lambda, X, A, B],
        vec![variant(
            "main",
            side(move |f, _| f.sheffer_t_seq(&a(), &b(), &x())),
            side(move |f, _| {
                Ok(conv(
                    &f.sheffer_t_seq(&a(), &b(), &zero())?,
                    &f.falling_seq(&x()),
                ))
            }),
        )],
    ));

    out.push(case(
        "thm-T-two-expansions",
        "T^(a,b)_n(x) = Σ C(n,k) T^(a-1,b)_k(0) β_{n-k}(x) = Σ C(n,k) T^(a,b-1)_k(0) 𝓔_{n-k}(x)",
        &[Lambda, X, A, B],
        vec![
            variant(
                "via-bernoulli",
                side(move |f, _| f.sheffer_t_seq(&a(), &b(), &x())),
                side(move |f, _| {
                    Ok(conv(
                        &f.sheffer_t_seq(&(&a() - &c(1)), &b(), &zero())?,
                        &f.bernoulli_seq(&x()),
                    ))
                }),
            ),
            variant(
                "via-euler",
                side(move |f, _| f.sheffer_t_seq(&a(), &b(), &x())),
                side(move |f, _| {
                    Ok(conv(
                        &f.sheffer_t_seq(&a(), &(&b() - &c(1)), &zero())?,
                        &f.euler_seq(&x()),
                    ))
                }),
            ),
        ],
    ));

    out.push(case(
        "thm2.7",
        "2^n β_{n,λ/2}(x/2) = Σ C(n,k) β_k 𝓔_{n-k}(x)",
        &[Lambda, X],
        vec![variant(
            "main",
            side(move |f, _| {
                let halve = BTreeMap::from([
                    (Lambda, v(Lambda).scale(&Rational::new(1.into(), 2.into()))),
                    (X, x().scale(&Rational::new(1.into(), 2.into()))),
                ]);
                let gf = f.bernoulli_gf(&x()).map_coeffs(|p| p.substitute(&halve));
                Ok(gf.scale_t(&c(2)).egf_coefficients())
            }),
            side(move |f, _| Ok(conv(&f.bernoulli_seq(&zero()), &f.euler_seq(&x())))),
        )],
    ));

    out.push(case(
        "thm2.8",
        "T^(a,b)_n(x+1) - T^(a,b)_n(x) = n T^(a-1,b)_{n-1}(x)",
        &[Lambda, X, A, B],
        vec![variant(
            "main",
            side(move |f, _| {
                let shifted = f.sheffer_t_seq(&a(), &b(), &x1())?;
                let plain = f.sheffer_t_seq(&a(), &b(), &x())?;
                Ok(zip_with(&shifted, &plain, |p, q| p - q))
            }),
            side(move |f, _| {
                Ok(n_times_prev(&f.sheffer_t_seq(
                    &(&a() - &c(1)),
                    &b(),
                    &x(),
                )?))
            }),
        )],
    ));

    let thm31_providers = [
        ("uniform01", MomentProvider::Uniform01),
        ("ber(1/2)", MomentProvider::bernoulli_half()),
        ("ber(p)", MomentProvider::Bernoulli(v(P))),
    ];
    out.push(case(
        "thm3.1",
        "E[S^Y_n(x+Y)] = (x)_{n,λ}",
        &[Lambda, X, P],
        thm31_providers
            .into_iter()
            .map(|(label, pr)| {
                variant(
                    label,
                    side(move |f, _| {
                        sheffer_seq(&pr, f, &x())?
                            .iter()
                            .map(|s| expect_shifted(s, X, &pr))
                            .collect()
                    }),
                    side(move |f, _| Ok(f.falling_seq(&x()))),
                )
            })
            .collect(),
    ));

    let pairs = [
        (
            "uniform01+ber(1/2)",
            MomentProvider::Uniform01,
            MomentProvider::bernoulli_half(),
        ),
        (
            "ber(p)+uniform01",
            MomentProvider::Bernoulli(v(P)),
            MomentProvider::Uniform01,
        ),
        (
            "uniform01+uniform01",
            MomentProvider::Uniform01,
            MomentProvider::Uniform01,
        ),
    ];
    let mut thm32 = Vec::new();
    for (label, y1, y2) in pairs {
        let (y1b, y2b) = (y1.clone(), y2.clone());
        thm32.push(variant(
            label,
            side(move |f, _| sheffer_seq(&MomentProvider::sum(y1.clone(), y2.clone()), f, &xy())),
            side(move |f, _| {
                Ok(conv(
                    &sheffer_seq(&y1b, f, &x())?,
                    &sheffer_seq(&y2b, f, &y())?,
                ))
            }),
        ));
    }
    for (label, y1) in [
        ("uniform01 with Y2=0", MomentProvider::Uniform01),
        ("ber(p) with Y2=0", MomentProvider::Bernoulli(v(P))),
    ] {
        let y1b = y1.clone();
        thm32.push(variant(
            label,
            side(move |f, _| sheffer_seq(&y1, f, &x())),
            side(move |f, _| Ok(conv(&sheffer_seq(&y1b, f, &zero())?, &f.falling_seq(&x())))),
        ));
    }
    out.push(case(
        "thm3.2",
        "S^{Y1+Y2}_n(x+y) = Σ C(n,k) S^{Y1}_k(x) S^{Y2}_{n-k}(y)",
        &[Lambda, X, Y, P],
        thm32,
    ));

    out.push(case(
        "thm3.3",
        "S^{U[0,1]}_n(x) = Σ C(n,k) β_k(x) (-λ)^{n-k} (n-k)!/(n-k+1)",
        &[Lambda, X],
        vec![variant(
            "main",
            side(move |f, _| sheffer_seq(&MomentProvider::Uniform01, f, &x())),
            side(move |f, _| {
                let weights: Vec<Poly> = (0..=f.order())
                    .map(|j| {
                        let w = Rational::new(factorial(j), BigInt::from(j + 1));
                        (-v(Lambda)).pow(j as u32).scale(&w)
                    })
                    .collect();
                Ok(conv(&f.bernoulli_seq(&x()), &weights))
            }),
        )],
    ));

    out.push(case(
        "thm3.4",
        "Y ~ Ber(1/2): S^Y_n(x) = 𝓔_n(x)",
        &[Lambda, X],
        vec![variant(
            "main",
            side(move |f, _| sheffer_seq(&MomentProvider::bernoulli_half(), f, &x())),
            side(move |f, _| Ok(f.euler_seq(&x()))),
        )],
    ));

    out.push(case(
        "thm3.5",
        "Y ~ U[0,1]: S^{Y^(m)}_n(x) = Σ C(n,k)/C(n-k+m,m) λ^{n-k} S1(n-k+m,m) β^(m)_k(x)",
        &[Lambda, X],
        (1..=3usize)
            .map(|m| {
                variant(
                    &format!("m={m}"),
                    side(move |f, _| {
                        sheffer_seq(&MomentProvider::iid(MomentProvider::Uniform01, m), f, &x())
                    }),
                    side(move |f, _| {
                        stirling_combination(&f.bernoulli_higher_seq(&c(m as i64), &x())?, m)
                    }),
                )
            })
            .collect(),
    ));

    let ml_pairs = [(2usize, 1usize), (3, 1), (3, 2)];

    out.push(case(
        "thm3.6",
        "Y ~ U[0,1]: Σ_k w_m(n,k) E[β^(m)_k(x+Y^(l))] = Σ_k w_{m-l}(n,k) β^(m-l)_k(x)",
        &[Lambda, X],
        ml_pairs
            .iter()
            .map(|&(m, l)| {
                variant(
                    &format!("m={m},l={l}"),
                    side(move |f, _| {
                        let shift = MomentProvider::iid(MomentProvider::Uniform01, l);
                        let expected: Vec<Poly> = f
                            .bernoulli_higher_seq(&c(m as i64), &x())?
                            .iter()
                            .map(|p| expect_shifted(p, X, &shift))
                            .collect::<Result<_>>()?;
                        stirling_combination(&expected, m)
                    }),
                    side(move |f, _| {
                        stirling_combination(
                            &f.bernoulli_higher_seq(&c((m - l) as i64), &x())?,
                            m - l,
                        )
                    }),
                )
            })
            .collect(),
    ));

    out.push(case(
        "thm3.7",
        "Y ~ Ber(1/2): E[S^{Y^(m)}_n(x+Y^(l))] = 𝓔^(m-l)_n(x)",
        &[Lambda, X],
        ml_pairs
            .iter()
            .map(|&(m, l)| {
                variant(
                    &format!("m={m},l={l}"),
                    side(move |f, _| {
                        let half = MomentProvider::bernoulli_half();
                        let shift = MomentProvider::iid(half.clone(), l);
                        sheffer_seq(&MomentProvider::iid(half, m), f, &x())?
                            .iter()
                            .map(|s| expect_shifted(s, X, &shift))
                            .collect()
                    }),
                    side(move |f, _| f.euler_higher_seq(&c((m - l) as i64), &x())),
                )
            })
            .collect(),
    ));

    out.push(case(
        "thm3.8",
        "T^(a,b-1)_n(x) = (T^(a,b)_n(x+1) + T^(a,b)_n(x))/2",
        &[Lambda, X, A, B],
        vec![variant(
            "main",
            side(move |f, _| f.sheffer_t_seq(&a(), &(&b() - &c(1)), &x())),
            side(move |f, _| {
                let shifted = f.sheffer_t_seq(&a(), &b(), &x1())?;
                let plain = f.sheffer_t_seq(&a(), &b(), &x())?;
                let half = Rational::new(1.into(), 2.into());
                Ok(zip_with(&shifted, &plain, |p, q| (p + q).scale(&half)))
            }),
        )],
    ));

    out.push(case(
        "thm3.9",
        "T^(a,b)_n(x) = T^(a,b-1)_n(x) - (n/2) T^(a-1,b)_{n-1}(x)",
        &[Lambda, X, A, B],
        vec![variant(
            "main",
            side(move |f, _| f.sheffer_t_seq(&a(), &b(), &x())),
            side(move |f, _| {
                let first = f.sheffer_t_seq(&a(), &(&b() - &c(1)), &x())?;
                let second = n_times_prev(&f.sheffer_t_seq(&(&a() - &c(1)), &b(), &x())?);
                let half = Rational::new(1.into(), 2.into());
                Ok(zip_with(&first, &second, |p, q| p - &q.scale(&half)))
            }),
        )],
    ));

    // [β^(a)_k(x) + (k/2) β^(a-1)_{k-1}(x)] for each k.
    let bracket = move |f: &Families| -> Result<Vec<Poly>> {
        let main = f.bernoulli_higher_seq(&a(), &x())?;
        let lower = n_times_prev(&f.bernoulli_higher_seq(&(&a() - &c(1)), &x())?);
        let half = Rational::new(1.into(), 2.into());
        Ok(zip_with(&main, &lower, |p, q| p + &q.scale(&half)))
    };

    out.push(case(
        "thm3.10",
        "Σ C(n,k) β^(a)_k(x) 𝓔^(b-1)_{n-k}(y) = Σ C(n,k) [β^(a)_k(x) + (k/2) β^(a-1)_{k-1}(x)] 𝓔^(b)_{n-k}(y)",
        &[Lambda, X, Y, A, B],
        vec![variant(
            "main",
            side(move |f, _| {
                Ok(conv(
                    &f.bernoulli_higher_seq(&a(), &x())?,
                    &f.euler_higher_seq(&(&b() - &c(1)), &y())?,
                ))
            }),
            side(move |f, _| Ok(conv(&bracket(f)?, &f.euler_higher_seq(&b(), &y())?))),
        )],
    ));

    out.push(case(
        "thm3.11-B",
        "β^(a)_n(x+y) = Σ C(n,k) [β^(a)_k(x) + (k/2) β^(a-1)_{k-1}(x)] 𝓔_{n-k}(y)",
        &[Lambda, X, Y, A],
        vec![variant(
            "main",
            side(move |f, _| f.bernoulli_higher_seq(&a(), &xy())),
            side(move |f, _| Ok(conv(&bracket(f)?, &f.euler_seq(&y())))),
        )],
    ));

    out.push(case(
        "thm3.11-E",
        "𝓔^(b)_n(x+y) = Σ C(n,k) 2/(k+1) β_{n-k}(x) (𝓔^(b-1)_{k+1}(y) - 𝓔^(b)_{k+1}(y))",
        &[Lambda, X, Y, B],
        vec![variant(
            "main",
            side(move |f, _| f.euler_higher_seq(&b(), &xy())),
            side(move |f, max_n| {
                if f.order() < max_n + 1 {
                    return Err(Error::OrderExceeded {
                        requested: max_n + 1,
                        order: f.order(),
                    });
                }
                let bern = f.bernoulli_seq(&x());
                let lower = f.euler_higher_seq(&(&b() - &c(1)), &y())?;
                let upper = f.euler_higher_seq(&b(), &y())?;
                Ok((0..=max_n)
                    .map(|n| {
                        (0..=n)
                            .map(|k| {
                                let w = Rational::new(binomial(n, k) * 2, BigInt::from(k + 1));
                                (&bern[n - k] * &(&lower[k + 1] - &upper[k + 1])).scale(&w)
                            })
                            .sum()
                    })
                    .collect())
            }),
        )],
    ));

    out.push(case(
        "eq50-volkenborn",
        "S^{U[0,1]}_n(x) = n-th EGF coefficient of log(1+λt)/(λ(e_λ(t)-1)) e_λ^x(t)",
        &[Lambda, X],
        vec![variant(
            "main",
            side(move |f, _| sheffer_seq(&MomentProvider::Uniform01, f, &x())),
            side(move |f, _| {
                let order = f.order();
                let one_plus_lt = &Series::one(order + 1) + &Series::t(order + 1).scale(&v(Lambda));
                let log = one_plus_lt.log()?;
                // log(1+λt) has a factor λ in every coefficient.
                let log_over_lambda = log.map_coeffs(|p| {
                    p.div_var(Lambda).unwrap_or_else(|| {
                        debug_assert!(p.is_zero());
                        Poly::zero()
                    })
                });
                let kernel = log_over_lambda.div_t()?;
                let gf = &(&kernel * f.bernoulli_base()) * &f.exponential(&x());
                Ok(gf.egf_coefficients())
            }),
        )],
    ));

    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> VerifyConfig {
        VerifyConfig::default()
    }

    #[test]
    fn registry_ids_are_unique_and_listed() {
        let reg = Registry::standard();
        let ids = reg.ids();
        let mut sorted = ids.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), ids.len());
        for id in [
            "prop2.1-B",
            "prop2.1-E",
            "cor2.2-B",
            "cor2.2-E",
            "thm2.3-B",
            "thm2.3-E",
            "thm2.4",
            "prop-T-add",
            "prop-T-expand",
            "thm-T-two-expansions",
            "thm2.7",
            "thm2.8",
            "thm3.1",
            "thm3.2",
            "thm3.3",
            "thm3.4",
            "thm3.5",
            "thm3.6",
            "thm3.7",
            "thm3.8",
            "thm3.9",
            "thm3.10",
            "thm3.11-B",
            "thm3.11-E",
            "eq50-volkenborn",
        ] {
            assert!(reg.get(id).is_some(), "{id} missing");
        }
    }

    #[test]
    fn aliases_and_unknown_ids() {
        let reg = Registry::standard();
        let r = verify(&reg, "thm2.3-bernoulli", 6, &cfg()).unwrap();
        assert!(r.equal);
        assert_eq!(r.id, "thm2.3-B");
        assert_eq!(
            verify(&reg, "no-such-id", 4, &cfg()).unwrap_err(),
            Error::UnknownIdentity("no-such-id".into())
        );
        assert!(matches!(
            reg.select("no-such-id"),
            Err(Error::UnknownIdentity(_))
        ));
        assert!(reg.select("zzz*").unwrap().is_empty());
    }

    #[test]
    fn spot_checks() {
        let reg = Registry::standard();
        for id in ["thm2.7", "thm3.3", "thm3.4", "thm2.4"] {
            let r = verify(&reg, id, 8, &cfg()).unwrap();
            assert!(r.equal, "{r:?}");
        }
    }

    #[test]
    fn order_too_small_is_rejected() {
        let reg = Registry::standard();
        let small = VerifyConfig { order: 8, ..cfg() };
        assert!(matches!(
            verify(&reg, "thm2.4", 8, &small),
            Err(Error::OrderExceeded { .. })
        ));
    }

    #[test]
    fn pins_are_applied() {
        let reg = Registry::standard();
        let config = VerifyConfig {
            order: 16,
            pins: BTreeMap::from([(Var::A, Rational::from_integer(3.into()))]),
        };
        let r = verify(&reg, "thm2.8", 5, &config).unwrap();
        assert!(r.equal);
        assert!(!r.symbols.contains(&Var::A));
        assert!(r.symbols.contains(&Var::B));
    }

    #[test]
    fn fault_injection_is_reported() {
        let reg = Registry::standard().with_fault("thm3.4").unwrap();
        let reports = verify_all(&reg, Some("thm3.*"), 4, &cfg()).unwrap();
        let bad: Vec<_> = reports.iter().filter(|r| !r.equal).collect();
        assert_eq!(bad.len(), 1);
        let m = bad[0].first_mismatch.as_ref().unwrap();
        assert_eq!(bad[0].id, "thm3.4");
        assert_eq!(m.n, 1);
        assert_eq!(m.diff, Poly::int(-1));
    }

    #[test]
    fn empty_filter_selects_nothing() {
        let reg = Registry::standard();
        assert!(verify_all(&reg, Some(""), 4, &cfg()).unwrap().is_empty());
    }

    #[test]
    fn reports_follow_registry_order() {
        let reg = Registry::standard();
        let reports = verify_all(&reg, Some("thm2.*"), 3, &cfg()).unwrap();
        let ids: Vec<_> = reports.iter().map(|r| r.id.as_str()).collect();
        assert_eq!(ids, ["thm2.3-B", "thm2.3-E", "thm2.4", "thm2.7", "thm2.8"]);
    }

    // Building at x+1 and substituting x -> x+1 afterwards must agree.
    #[test]
    fn shifted_construction_matches_substitution() {
        let f = Families::new(6);
        let a = v(Var::A);
        let b = v(Var::B);
        let x = v(Var::X);
        let shift = BTreeMap::from([(Var::X, &x + &c(1))]);
        let built = f.sheffer_t_seq(&a, &b, &(&x + &c(1))).unwrap();
        let substituted: Vec<Poly> = f
            .sheffer_t_seq(&a, &b, &x)
            .unwrap()
            .iter()
            .map(|p| p.substitute(&shift))
            .collect();
        assert_eq!(built, substituted);
        let built = f.bernoulli_higher_seq(&a, &(&x + &c(1))).unwrap();
        let substituted: Vec<Poly> = f
            .bernoulli_higher_seq(&a, &x)
            .unwrap()
            .iter()
            .map(|p| p.substitute(&shift))
            .collect();
        assert_eq!(built, substituted);
    }
}
