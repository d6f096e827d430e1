use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::excellence::SamplerConfig;
use crate::rational::{check_epsilon, serialize_rational, Rational, RationalRepr};
use crate::stability::{TreeConvention, DEFAULT_BUDGET};

/// Knobs that do not follow from `(n, ε, t)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub seed: u64,
    /// Reshuffles allowed per piece after the first refinement attempt.
    pub max_retries: u32,
    pub sampler: Option<SamplerConfig>,
    /// Node budget for every stability search.
    pub budget: u64,
    /// Largest height tried when the tree bound is certified from the graph.
    pub tree_cap: u32,
    pub convention: TreeConvention,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 0,
            max_retries: 20,
            sampler: Some(SamplerConfig::default()),
            budget: DEFAULT_BUDGET,
            tree_cap: 6,
            convention: TreeConvention::Strict,
        }
    }
}

/// The constants of the construction for a graph of `n` vertices.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineParams {
    #[serde(serialize_with = "serialize_rational")]
    pub epsilon: Rational,
    pub t: u32,
    pub n: usize,
    /// `ε/4`, the excellence threshold of the first extraction pass.
    #[serde(serialize_with = "serialize_rational")]
    pub alpha: Rational,
    /// `ε/3`, the threshold after random refinement.
    #[serde(serialize_with = "serialize_rational")]
    pub beta: Rational,
    /// `ceil(1/α)`.
    pub q: u64,
    /// Base piece size, the last term of the size sequence.
    pub c: usize,
    pub config: PipelineConfig,
}

/// `s_0 > s_1 > ... > s_{t-1}` with `s_l = q^(t-1-l) c`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SizeSequence(pub Vec<usize>);

impl SizeSequence {
    pub fn first(&self) -> usize {
        self.0[0]
    }

    pub fn last(&self) -> usize {
        *self.0.last().expect("nonempty")
    }

    pub fn get(&self, l: usize) -> Option<usize> {
        self.0.get(l).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Decay by `ε`, divisibility by the last term, and last term above `t`.
    pub fn check(&self, eps: Rational) -> bool {
        let s = &self.0;
        let t = s.len();
        let decay = (0..t.saturating_sub(2)).all(|l| {
            eps * Rational::from_integer(s[l] as i64) >= Rational::from_integer(s[l + 1] as i64)
        });
        let last = self.last();
        decay && last > 0 && s.iter().all(|&x| x % last == 0) && last > t
    }
}

/// `α, β, q, c` and the size sequence, with the minimum-size condition enforced but without
/// the admissibility requirement `ε < 1/2^t`; see [`make_params`].
pub fn compute_constants(
    n: usize,
    eps: Rational,
    t: u32,
    config: PipelineConfig,
) -> Result<(PipelineParams, SizeSequence)> {
    check_epsilon(eps)?;
    if t == 0 {
        return Err(Error::InvalidParameter("tree bound t must be >= 1".into()));
    }
    let alpha = eps / 4;
    let beta = eps / 3;
    let q = (Rational::one() / alpha).ceil().to_integer() as u64;
    let q_pow = q
        .checked_pow(t - 1)
        .filter(|&p| p <= i64::MAX as u64)
        .ok_or(Error::Overflow("q^(t-1)"))?;

    // minimum size: α²n/4 - 1 > max{t, 3/ε}
    let n_r = Rational::from_integer(n as i64);
    let lhs = alpha * alpha * n_r / 4 - 1;
    let rhs = Rational::from_integer(t as i64).max(Rational::from_integer(3) / eps);
    if lhs <= rhs {
        return Err(Error::InsufficientN {
            n,
            detail: format!(
                "need alpha^2 n / 4 - 1 > max(t, 3/epsilon), got {} <= {}",
                RationalRepr::from(lhs).decimal,
                RationalRepr::from(rhs).decimal
            ),
        });
    }

    // largest c with q^(t-1) c <= αn/2; the open lower end then holds
    let half = alpha * n_r / 2;
    let c = (half / Rational::from_integer(q_pow as i64)).floor().to_integer();
    let c = usize::try_from(c).map_err(|_| Error::Overflow("c"))?;
    let mut sizes = Vec::with_capacity(t as usize);
    for l in 0..t {
        let factor = q.checked_pow(t - 1 - l).ok_or(Error::Overflow("size sequence"))?;
        let s = (c as u64).checked_mul(factor).ok_or(Error::Overflow("size sequence"))?;
        sizes.push(usize::try_from(s).map_err(|_| Error::Overflow("size sequence"))?);
    }
    if c <= t as usize {
        return Err(Error::InsufficientN {
            n,
            detail: format!("base piece size c = {c} must exceed t = {t}"),
        });
    }
    let sizes = SizeSequence(sizes);
    debug_assert!(sizes.check(eps));
    Ok((
        PipelineParams {
            epsilon: eps,
            t,
            n,
            alpha,
            beta,
            q,
            c,
            config,
        },
        sizes,
    ))
}

/// `ε < 1/2^t`.
pub fn check_admissible(eps: Rational, t: u32) -> Result<()> {
    let ok = t < 62 && eps * Rational::from_integer(1i64 << t) < Rational::one();
    if !ok {
        return Err(Error::EpsilonTooLarge {
            epsilon: eps.to_string(),
            t,
        });
    }
    Ok(())
}

/// Constants and size sequence for the pipeline, requiring `ε < 1/2^t` and
/// the size condition on `n`.
pub fn make_params(
    n: usize,
    eps: Rational,
    t: u32,
    config: PipelineConfig,
) -> Result<(PipelineParams, SizeSequence)> {
    check_epsilon(eps)?;
    check_admissible(eps, t)?;
    compute_constants(n, eps, t, config)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoremBound {
    /// `4 q^(t-1) / α`, which `n/c` never exceeds.
    pub exact: RationalRepr,
    /// `4 (8/ε)^(t-2)`.
    pub nominal: RationalRepr,
    #[serde(skip)]
    pub exact_value: BigRational,
    #[serde(skip)]
    pub nominal_value: BigRational,
}

impl TheoremBound {
    /// Whether `pieces <= exact`.
    pub fn admits(&self, pieces: usize) -> bool {
        BigRational::from_integer(BigInt::from(pieces)) <= self.exact_value
    }
}

fn big(r: Rational) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

fn repr(r: &BigRational) -> RationalRepr {
    let num = r.numer().to_i64();
    let den = r.denom().to_i64();
    let decimal = r.to_f64().map_or_else(|| "inf".into(), |x| format!("{x:.6}"));
    match (num, den) {
        (Some(num), Some(den)) => RationalRepr { num, den, decimal },
        // beyond i64: keep the decimal, flag the fraction as unrepresentable
        _ => RationalRepr {
            num: 0,
            den: 0,
            decimal,
        },
    }
}

/// Both piece-count bounds for `(ε, t)` as exact rationals.
pub fn theorem_bound(eps: Rational, t: u32) -> Result<TheoremBound> {
    check_epsilon(eps)?;
    check_admissible(eps, t)?;
    let alpha = big(eps / 4);
    let q = BigInt::from((Rational::one() / (eps / 4)).ceil().to_integer());
    let four = BigRational::from_integer(BigInt::from(4));
    let exact = &four * BigRational::from_integer(Pow::pow(q, t - 1)) / alpha;
    let base = BigRational::from_integer(BigInt::from(8)) / big(eps);
    let nominal = if t >= 2 {
        &four * Pow::pow(base, t - 2)
    } else {
        &four / base
    };
    Ok(TheoremBound {
        exact: repr(&exact),
        nominal: repr(&nominal),
        exact_value: exact,
        nominal_value: nominal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn benchmark_constants() {
        let (p, s) = make_params(30000, r(1, 5), 2, PipelineConfig::default()).unwrap();
        assert_eq!(p.alpha, r(1, 20));
        assert_eq!(p.beta, r(1, 15));
        assert_eq!(p.q, 20);
        assert_eq!(p.c, 37);
        assert_eq!(s.0, vec![740, 37]);
        assert!(s.check(r(1, 5)));
    }

    #[test]
    fn three_level_constants() {
        let (p, s) = compute_constants(1_000_000, r(1, 5), 3, PipelineConfig::default()).unwrap();
        assert_eq!(p.q, 20);
        assert_eq!(p.c, 62);
        assert_eq!(s.0, vec![24800, 1240, 62]);
        // 1/5 is not below 1/8, so the admissible version refuses
        assert!(matches!(
            make_params(1_000_000, r(1, 5), 3, PipelineConfig::default()),
            Err(Error::EpsilonTooLarge { t: 3, .. })
        ));
    }

    #[test]
    fn small_n_is_rejected() {
        let err = make_params(1000, r(1, 5), 2, PipelineConfig::default()).unwrap_err();
        assert!(matches!(err, Error::InsufficientN { n: 1000, .. }));
        assert!(err.to_string().contains("-0.375"));
    }

    #[test]
    fn admissibility() {
        assert!(make_params(30000, r(1, 4), 2, PipelineConfig::default()).is_err());
        assert!(check_admissible(r(1, 5), 2).is_ok());
        assert!(check_admissible(r(1, 8), 3).is_err());
    }

    #[test]
    fn bound_values() {
        let b = theorem_bound(r(1, 5), 2).unwrap();
        assert_eq!(b.exact_value, BigRational::from_integer(1600.into()));
        assert_eq!(b.nominal_value, BigRational::from_integer(4.into()));
        assert!(b.admits(1600) && !b.admits(1601));
        let b = theorem_bound(r(1, 10), 3).unwrap();
        assert_eq!(b.nominal_value, BigRational::from_integer(320.into()));
        let b = theorem_bound(r(1, 32), 4).unwrap();
        assert_eq!(b.nominal_value, BigRational::from_integer(262144.into()));
    }

    proptest! {
        #[test]
        fn size_sequence_invariants(n in 20_000usize..5_000_000, den in 5i64..40, t in 1u32..4) {
            let eps = r(1, den);
            if let Ok((p, s)) = compute_constants(n, eps, t, PipelineConfig::default()) {
                prop_assert!(s.check(eps));
                prop_assert_eq!(s.len(), t as usize);
                let q_pow = p.q.pow(t - 1) as i64;
                let half = p.alpha * Rational::from_integer(n as i64) / 2;
                let top = Rational::from_integer(q_pow * p.c as i64);
                prop_assert!(top <= half);
                prop_assert!(top > half - Rational::from_integer(q_pow));
                prop_assert!(Rational::from_integer(p.q as i64) * p.alpha >= Rational::one());
                prop_assert!(Rational::from_integer(p.q as i64) * p.alpha <= Rational::from_integer(2));
            }
        }
    }
}
