//! Lattice slices `A_{p,s} = {(i_1, …, i_p) ∈ [0, n-1]^p : Σ i_j = s n}`,
//! their limiting densities, and the limiting variance of the trace statistic.
//!
//! All counts and densities are exact. `f_density(p, s)` is the Irwin–Hall
//! density at `s`, i.e. the `(p-1)`-volume of `{y ∈ [0,1]^p : Σ y = s}`
//! projected on the first `p-1` coordinates, and is the limit of
//! `|A_{p,s}| / n^{p-1}`.

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::circulant::TestPolynomial;
use crate::error::{Error, Result};

fn factorial(k: u32) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * i)
}

fn check_level(p: u32, s: u32) -> Result<()> {
    if p == 0 {
        return Err(Error::invalid("tuple length p must be at least 1"));
    }
    if s >= p {
        return Err(Error::invalid(format!("level s = {s} out of range 0..={}", p - 1)));
    }
    Ok(())
}

/// `f_p(s) = (1/(p-1)!) Σ_{k=0}^{s} (-1)^k C(p,k) (s-k)^{p-1}`.
pub fn f_density(p: u32, s: u32) -> Result<BigRational> {
    if p < 2 {
        return Err(Error::invalid(format!("density needs p >= 2, got {p}")));
    }
    check_level(p, s)?;
    let numerator = (0..=s).fold(BigInt::zero(), |acc, k| {
        let term = binomial(BigInt::from(p), BigInt::from(k)) * BigInt::from(s - k).pow(p - 1);
        if k % 2 == 0 {
            acc + term
        } else {
            acc - term
        }
    });
    Ok(BigRational::new(numerator, factorial(p - 1)))
}

/// `|A_{p,s}|` by inclusion–exclusion over the coordinates forced to exceed `n-1`:
/// `Σ_k (-1)^k C(p,k) C(sn - kn + p - 1, p - 1)`.
pub fn count_slice_exact(p: u32, s: u32, n: u64) -> Result<BigInt> {
    check_level(p, s)?;
    if n == 0 {
        return Err(Error::invalid("box size n must be at least 1"));
    }
    let target = BigInt::from(s) * n;
    let width = BigInt::from(n);
    let mut total = BigInt::zero();
    for k in 0..=p {
        let rest = &target - &width * k;
        if rest.is_negative() {
            break;
        }
        let term = binomial(BigInt::from(p), BigInt::from(k))
            * binomial(rest + (p - 1), BigInt::from(p - 1));
        if k % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    Ok(total)
}

fn check_budget(n: u64, exponent: u32, budget: u64) -> Result<()> {
    let required = (n as u128).saturating_pow(exponent);
    if required > budget as u128 {
        return Err(Error::BudgetExceeded { required, budget });
    }
    Ok(())
}

/// Visits every tuple of `[0, n-1]^len`, calling `f` with the tuple.
fn for_each_tuple(len: usize, n: u64, mut f: impl FnMut(&[u64])) {
    let mut idx = vec![0u64; len];
    loop {
        f(&idx);
        let mut pos = 0;
        loop {
            if pos == len {
                return;
            }
            idx[pos] += 1;
            if idx[pos] < n {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// `|A_{p,s}|` by visiting all `n^p` tuples.
pub fn count_slice_bruteforce(p: u32, s: u32, n: u64, budget: u64) -> Result<BigInt> {
    check_level(p, s)?;
    if n == 0 {
        return Err(Error::invalid("box size n must be at least 1"));
    }
    check_budget(n, p, budget)?;
    let target = s as u64 * n;
    let mut count: u64 = 0;
    for_each_tuple(p as usize, n, |t| {
        if t.iter().sum::<u64>() == target {
            count += 1;
        }
    });
    Ok(BigInt::from(count))
}

/// `|A'_{p,s}|`: tuples of `A_{p,s}` whose coordinates are pairwise distinct.
/// Enumerates the first `p-1` coordinates; the last is determined by the sum.
pub fn count_slice_distinct(p: u32, s: u32, n: u64, budget: u64) -> Result<BigInt> {
    check_level(p, s)?;
    if n == 0 {
        return Err(Error::invalid("box size n must be at least 1"));
    }
    check_budget(n, p - 1, budget)?;
    let target = s as u64 * n;
    let mut count: u64 = 0;
    for_each_tuple((p - 1) as usize, n, |t| {
        let partial: u64 = t.iter().sum();
        if partial > target {
            return;
        }
        let last = target - partial;
        if last >= n {
            return;
        }
        let distinct = t
            .iter()
            .enumerate()
            .all(|(i, a)| *a != last && t[i + 1..].iter().all(|b| a != b));
        if distinct {
            count += 1;
        }
    });
    Ok(BigInt::from(count))
}

/// `|A_{p,s}| / n^{p-1}` as an exact rational.
pub fn slice_density(p: u32, s: u32, n: u64) -> Result<BigRational> {
    let count = count_slice_exact(p, s, n)?;
    Ok(BigRational::new(count, BigInt::from(n).pow(p - 1)))
}

/// One row of the density table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticeSliceCount {
    pub p: u32,
    pub s: u32,
    pub n: u64,
    #[serde(serialize_with = "serialize_display")]
    pub count: BigInt,
    #[serde(serialize_with = "serialize_display")]
    pub density: BigRational,
    #[serde(serialize_with = "serialize_display")]
    pub f_density: BigRational,
}

impl LatticeSliceCount {
    pub fn compute(p: u32, s: u32, n: u64) -> Result<Self> {
        let count = count_slice_exact(p, s, n)?;
        let density = BigRational::new(count.clone(), BigInt::from(n).pow(p - 1));
        Ok(Self { p, s, n, count, density, f_density: f_density(p, s)? })
    }

    /// `density - f_p(s)`.
    pub fn gap(&self) -> BigRational {
        &self.density - &self.f_density
    }
}

fn serialize_display<T: std::fmt::Display, S: serde::Serializer>(
    v: &T,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// Rows for `s = 0..p` at box size `n`.
pub fn density_table(p: u32, n: u64) -> Result<Vec<LatticeSliceCount>> {
    if p < 2 {
        return Err(Error::invalid(format!("density table needs p >= 2, got {p}")));
    }
    (0..p).map(|s| LatticeSliceCount::compute(p, s, n)).collect()
}

/// Per-degree weights `ℓ! Σ_s f_ℓ(s)` and the limiting variance
/// `Σ_ℓ a_ℓ² ℓ! Σ_s f_ℓ(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitingVariance {
    pub weights: Vec<(u32, BigRational)>,
    pub exact: Option<BigRational>,
    pub value: f64,
}

/// Weight `ℓ! Σ_{s=0}^{ℓ-1} f_ℓ(s)` of `a_ℓ²` in the limiting variance.
pub fn variance_weight(degree: u32) -> Result<BigRational> {
    let mass = (0..degree).try_fold(BigRational::zero(), |acc, s| {
        Ok::<_, Error>(acc + f_density(degree, s)?)
    })?;
    Ok(mass * BigRational::from_integer(factorial(degree)))
}

/// Limiting variance for exact rational coefficients `a_2, …, a_d`.
pub fn limiting_variance_exact(coeffs_from_degree_two: &[BigRational]) -> Result<BigRational> {
    coeffs_from_degree_two
        .iter()
        .enumerate()
        .try_fold(BigRational::zero(), |acc, (i, a)| {
            Ok(acc + a * a * variance_weight(i as u32 + 2)?)
        })
}

pub fn limiting_variance(poly: &TestPolynomial) -> Result<LimitingVariance> {
    let mut weights = Vec::new();
    let mut value = 0.0;
    let mut exact = Some(BigRational::zero());
    for (k, a) in poly.terms() {
        let w = variance_weight(k as u32)?;
        value += a * a * w.to_f64().unwrap_or(f64::INFINITY);
        exact = match (exact, BigRational::from_float(a)) {
            (Some(acc), Some(ar)) => Some(acc + &ar * &ar * &w),
            _ => None,
        };
        weights.push((k as u32, w));
    }
    Ok(LimitingVariance { weights, exact, value })
}

/// `E Z^order` for `Z ~ N(0, variance)`: zero for odd orders,
/// `(2k)!/(k! 2^k) σ^{2k}` for order `2k`.
pub fn gaussian_central_moment(order: u32, variance: f64) -> Result<f64> {
    if order == 0 {
        return Err(Error::invalid("moment order must be at least 1"));
    }
    if !(variance > 0.0) {
        return Err(Error::invalid(format!("variance must be positive, got {variance}")));
    }
    if order % 2 == 1 {
        return Ok(0.0);
    }
    let k = order / 2;
    // (2k)!/(k! 2^k) = (2k-1)!!
    let double_factorial: f64 = (1..=k).map(|i| (2 * i - 1) as f64).product();
    Ok(double_factorial * variance.powi(k as i32))
}
