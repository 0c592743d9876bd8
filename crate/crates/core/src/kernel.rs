//! Exact rational arithmetic and truncated power series.
//!
//! Every series carries its truncation bound explicitly. Binary operations
//! on series with different bounds are rejected instead of silently
//! truncating to the smaller one.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ground field elements. Always reduced, denominator positive.
pub type Rational = BigRational;

pub fn rational(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rational_to_string(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// Power series `c_0 + c_1 z + ... + c_B z^B` known up to the bound `B`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruncatedSeries {
    coeffs: Vec<Rational>,
}

impl TruncatedSeries {
    pub fn zero(bound: usize) -> Self {
        TruncatedSeries {
            coeffs: vec![Rational::zero(); bound + 1],
        }
    }

    pub fn one(bound: usize) -> Self {
        let mut s = Self::zero(bound);
        s.coeffs[0] = Rational::one();
        s
    }

    /// Builds a series from its coefficients; the bound is `coeffs.len() - 1`.
    ///
    /// Panics on an empty vector, which would have no bound at all.
    pub fn from_rationals(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least one coefficient");
        TruncatedSeries { coeffs }
    }

    pub fn from_integers<I, T>(coeffs: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<BigInt>,
    {
        Self::from_rationals(
            coeffs
                .into_iter()
                .map(|c| Rational::from_integer(c.into()))
                .collect(),
        )
    }

    /// `(1 - z^degree)^{-multiplicity}` expanded up to `bound`.
    pub fn geometric_factor(degree: usize, multiplicity: usize, bound: usize) -> Result<Self> {
        if degree == 0 {
            return Err(Error::ZeroDegreeFactor);
        }
        let mut s = Self::one(bound);
        // C(b + j - 1, j) at z^{a j}
        let b = BigInt::from(multiplicity);
        let mut c = BigInt::one();
        let mut j = 0usize;
        while (j + 1) * degree <= bound {
            c = c * (&b + BigInt::from(j)) / BigInt::from(j + 1);
            j += 1;
            s.coeffs[j * degree] = Rational::from_integer(c.clone());
        }
        Ok(s)
    }

    pub fn bound(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, d: usize) -> &Rational {
        &self.coeffs[d]
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    fn check_bounds(&self, other: &Self) -> Result<()> {
        if self.bound() != other.bound() {
            return Err(Error::MismatchedBounds(self.bound(), other.bound()));
        }
        Ok(())
    }

    /// Cauchy product truncated at the common bound.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_bounds(other)?;
        let bound = self.bound();
        let mut out = Self::zero(bound);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=bound - i].iter().enumerate() {
                if !b.is_zero() {
                    out.coeffs[i + j] += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_bounds(other)?;
        Ok(TruncatedSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_bounds(other)?;
        Ok(TruncatedSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn scale(&self, k: &Rational) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    /// Multiplies by the polynomial `1 - z^degree`, in place.
    pub fn mul_one_minus_power(&mut self, degree: usize) {
        if degree == 0 {
            self.coeffs.iter_mut().for_each(|c| *c = Rational::zero());
            return;
        }
        for d in (degree..self.coeffs.len()).rev() {
            let t = self.coeffs[d - degree].clone();
            self.coeffs[d] -= t;
        }
    }

    /// Re-truncates to a smaller bound.
    pub fn truncate(&self, bound: usize) -> Result<Self> {
        if bound > self.bound() {
            return Err(Error::MismatchedBounds(bound, self.bound()));
        }
        Ok(TruncatedSeries {
            coeffs: self.coeffs[..=bound].to_vec(),
        })
    }

    /// Coefficients as integers; fails on the first non-integral one.
    pub fn to_integers(&self) -> Result<Vec<BigInt>> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(d, c)| {
                if c.is_integer() {
                    Ok(c.to_integer())
                } else {
                    Err(Error::NonIntegral(d))
                }
            })
            .collect()
    }

    /// Checks that every coefficient of `self` is at most the matching one of `other`.
    pub fn dominated_by(&self, other: &Self) -> Result<Dominance> {
        self.check_bounds(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .position(|(a, b)| a > b)
            .map_or(Dominance::Dominated, Dominance::FirstFailure))
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(rational_to_string).collect();
        write!(f, "[{}] + O(z^{})", parts.join(", "), self.bound() + 1)
    }
}

/// Outcome of a coefficient-wise comparison of two series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dominance {
    Dominated,
    /// Smallest degree where the left series exceeds the right one.
    FirstFailure(usize),
}

/// `a` dominated by `b`, coefficient-wise.
pub fn dominates(a: &TruncatedSeries, b: &TruncatedSeries) -> Result<Dominance> {
    a.dominated_by(b)
}

pub fn series_mul(a: &TruncatedSeries, b: &TruncatedSeries) -> Result<TruncatedSeries> {
    a.mul(b)
}

/// Polynomial with integer coefficients indexed by degree.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct DegreePolynomial {
    coeffs: Vec<BigInt>,
}

impl DegreePolynomial {
    pub fn new<I, T>(coeffs: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<BigInt>,
    {
        let mut coeffs: Vec<BigInt> = coeffs.into_iter().map(Into::into).collect();
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        DegreePolynomial { coeffs }
    }

    /// `z^{d_1} + ... + z^{d_k}`.
    pub fn from_degrees(degrees: &[usize]) -> Self {
        let top = degrees.iter().copied().max().map_or(0, |d| d + 1);
        let mut coeffs = vec![BigInt::zero(); top];
        for &d in degrees {
            coeffs[d] += 1;
        }
        Self::new(coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of the polynomial; `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, d: usize) -> BigInt {
        self.coeffs.get(d).cloned().unwrap_or_default()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Value at z = 1.
    pub fn total(&self) -> BigInt {
        self.coeffs.iter().sum()
    }

    /// Lowest degree with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Weakly increasing then weakly decreasing. With `skip_ends`, degree 0
    /// and the top degree are left out of the comparison.
    pub fn is_unimodal(&self, skip_ends: bool) -> bool {
        let c: &[BigInt] = if skip_ends {
            if self.coeffs.len() <= 2 {
                return true;
            }
            &self.coeffs[1..self.coeffs.len() - 1]
        } else {
            &self.coeffs
        };
        let mut falling = false;
        for w in c.windows(2) {
            if w[1] > w[0] {
                if falling {
                    return false;
                }
            } else if w[1] < w[0] {
                falling = true;
            }
        }
        true
    }

    pub fn is_palindromic(&self) -> bool {
        self.coeffs.iter().eq(self.coeffs.iter().rev())
    }

    pub fn has_negative_coefficient(&self) -> bool {
        self.coeffs.iter().any(Signed::is_negative)
    }

    pub fn to_u64_vec(&self) -> Option<Vec<u64>> {
        self.coeffs.iter().map(ToPrimitive::to_u64).collect()
    }
}

impl fmt::Display for DegreePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match d {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}z")?,
                _ => write!(f, "{c}z^{d}")?,
            }
        }
        Ok(())
    }
}

pub(crate) fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}
