//! Two-sided Mann–Whitney U test on distortion moduli.
//!
//! Tie-free samples with `n_a·n_b <= EXACT_LIMIT` use the exact null
//! distribution of U, counted with the largest-element recurrence
//! `N(m, n, u) = N(m−1, n, u−n) + N(m, n−1, u)`. Everything else uses the
//! normal approximation with tie-corrected variance and a 0.5 continuity
//! correction.

use serde::{Serialize, Serializer};
use libm::erfc;

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::{median, DistortionSeries};

/// Largest `n_a·n_b` handled by the exact distribution.
pub const EXACT_LIMIT: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TestMethod {
    Exact,
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MannWhitney {
    /// `U_a`: number of (a, b) pairs with a > b, ties counting one half.
    pub u_statistic: f64,
    pub p_value: f64,
    pub method: TestMethod,
}

/// Number of tie-free arrangements of `m` and `n` items giving each value of
/// `U_a`, indexed by `u` in `0..=m·n`.
pub fn exact_u_counts(m: usize, n: usize) -> Vec<u128> {
    // table[j] holds the distribution for (i, j) while sweeping i upwards
    let mut table: Vec<Vec<u128>> = (0..=n).map(|_| vec![1u128]).collect();
    for i in 1..=m {
        let mut row: Vec<Vec<u128>> = Vec::with_capacity(n + 1);
        row.push(vec![1]);
        for j in 1..=n {
            let mut dist = vec![0u128; i * j + 1];
            // largest element from a: beats all j items of b
            for (u, &c) in table[j].iter().enumerate() {
                dist[u + j] += c;
            }
            // largest element from b: contributes nothing
            for (u, &c) in row[j - 1].iter().enumerate() {
                dist[u] += c;
            }
            row.push(dist);
        }
        table = row;
    }
    table.swap_remove(n)
}

/// Average ranks (1-based) of the pooled sample and the tie-group sizes.
fn pooled_ranks(a: &[f64], b: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut idx: Vec<(f64, usize)> = a.iter().chain(b).copied().zip(0..).collect();
    idx.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite values"));
    let mut ranks = vec![0.0; idx.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < idx.len() {
        let mut j = i + 1;
        while j < idx.len() && idx[j].0 == idx[i].0 {
            j += 1;
        }
        let avg = (i + j + 1) as f64 / 2.0;
        for &(_, k) in &idx[i..j] {
            ranks[k] = avg;
        }
        if j - i > 1 {
            ties.push(j - i);
        }
        i = j;
    }
    (ranks, ties)
}

/// Two-sided Mann–Whitney U test of `a` against `b`.
pub fn mann_whitney(a: &[f64], b: &[f64]) -> Result<MannWhitney> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InsufficientData(format!(
            "rank test needs two non-empty samples, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.iter().chain(b).any(|x| !x.is_finite()) {
        return Err(Error::param("rank test samples must be finite"));
    }
    let (na, nb) = (a.len(), b.len());
    let (ranks, ties) = pooled_ranks(a, b);
    let rank_sum_a: f64 = ranks[..na].iter().sum();
    let u_a = rank_sum_a - (na * (na + 1)) as f64 / 2.0;

    if ties.is_empty() && na * nb <= EXACT_LIMIT {
        let counts = exact_u_counts(na, nb);
        // tie-free ⇒ U is an integer
        let u = u_a.round() as usize;
        let le: u128 = counts[..=u].iter().sum();
        let ge: u128 = counts[u..].iter().sum();
        let total: u128 = counts.iter().sum();
        let p = ((2 * le.min(ge)) as f64 / total as f64).min(1.0);
        return Ok(MannWhitney {
            u_statistic: u_a,
            p_value: p,
            method: TestMethod::Exact,
        });
    }

    let (naf, nbf) = (na as f64, nb as f64);
    let n = naf + nbf;
    let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / (n * (n - 1.0));
    let var = naf * nbf / 12.0 * ((n + 1.0) - tie_term);
    let mean = naf * nbf / 2.0;
    let p = if var <= 0.0 {
        1.0
    } else {
        let z = ((u_a - mean).abs() - 0.5).max(0.0) / var.sqrt();
        erfc(z / std::f64::consts::SQRT_2).clamp(0.0, 1.0)
    };
    Ok(MannWhitney {
        u_statistic: u_a,
        p_value: p,
        method: TestMethod::Normal,
    })
}

/// Ratio of medians `median(b) / median(a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MedianRatio<T> {
    Finite(T),
    /// `median(a) = 0` while `median(b) > 0`.
    Infinite,
    /// Both medians are zero.
    Undefined,
}

impl<T: Real> MedianRatio<T> {
    pub fn value(self) -> Option<T> {
        match self {
            MedianRatio::Finite(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_degenerate(self) -> bool {
        !matches!(self, MedianRatio::Finite(_))
    }
}

/// Serialized as a number, the string `"inf"`, or `null`.
impl<T: Real> Serialize for MedianRatio<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            MedianRatio::Finite(r) => r.serialize(s),
            MedianRatio::Infinite => s.serialize_str("inf"),
            MedianRatio::Undefined => s.serialize_none(),
        }
    }
}

pub fn median_ratio<T: Real>(median_a: T, median_b: T) -> MedianRatio<T> {
    if median_a == T::zero() {
        if median_b == T::zero() {
            MedianRatio::Undefined
        } else {
            MedianRatio::Infinite
        }
    } else {
        MedianRatio::Finite(median_b / median_a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareOptions {
    pub alpha: f64,
    pub stride: usize,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self { alpha: 0.05, stride: 1 }
    }
}

impl CompareOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::param(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if self.stride == 0 {
            return Err(Error::param("stride must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Real"))]
pub struct ComparisonResult<T> {
    pub a: String,
    pub b: String,
    pub n_a: usize,
    pub n_b: usize,
    pub u_statistic: T,
    pub p_value: T,
    pub method: TestMethod,
    pub median_a: T,
    pub median_b: T,
    pub median_ratio: MedianRatio<T>,
    pub median_ratio_degenerate: bool,
    pub significant: bool,
    pub alpha: T,
    pub stride: usize,
}

/// Compares the difficulty of two datasets: is `b` distorted differently
/// from `a`?
pub fn compare<T: Real>(
    a: &DistortionSeries<T>,
    b: &DistortionSeries<T>,
    opts: CompareOptions,
) -> Result<ComparisonResult<T>> {
    opts.validate()?;
    let a_dec = a.decimate(opts.stride)?;
    let b_dec = b.decimate(opts.stride)?;
    let xa: Vec<f64> = a_dec.modulus().iter().map(|x| x.to_f64_lossy()).collect();
    let xb: Vec<f64> = b_dec.modulus().iter().map(|x| x.to_f64_lossy()).collect();
    let test = mann_whitney(&xa, &xb)?;
    let median_a = median(a_dec.modulus())?;
    let median_b = median(b_dec.modulus())?;
    let ratio = median_ratio(median_a, median_b);
    Ok(ComparisonResult {
        a: a.dataset_name().to_string(),
        b: b.dataset_name().to_string(),
        n_a: xa.len(),
        n_b: xb.len(),
        u_statistic: T::lit(test.u_statistic),
        p_value: T::lit(test.p_value),
        method: test.method,
        median_a,
        median_b,
        median_ratio: ratio,
        median_ratio_degenerate: ratio.is_degenerate(),
        significant: test.p_value < opts.alpha,
        alpha: T::lit(opts.alpha),
        stride: opts.stride,
    })
}
