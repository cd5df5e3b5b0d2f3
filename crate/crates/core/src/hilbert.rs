//! Dense real vectors in `R^d` with the Euclidean inner product.
//!
//! [`Vector`] is an immutable value: every operation returns a new vector.
//! Checked entry points ([`Vector::inner`], [`Vector::axpy`], ...) report a
//! dimension mismatch as an error. The operator overloads on references are
//! meant for solver internals where dimensions were validated up front, and
//! panic on mismatch.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of `R^d`, `d >= 1`, with finite entries.
///
/// Serializes as a plain JSON array of numbers.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Vector {
    entries: Vec<f64>,
}

impl Vector {
    /// Builds a vector, rejecting empty input and non-finite entries.
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyVector);
        }
        if let Some(index) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { entries })
    }

    /// Wraps entries without validation. Arithmetic results go through here;
    /// callers that can overflow check [`Vector::is_finite`] afterwards.
    pub(crate) fn from_raw(entries: Vec<f64>) -> Self {
        debug_assert!(!entries.is_empty());
        Self { entries }
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "vector dimension must be positive");
        Self::from_raw(vec![0.0; dim])
    }

    /// The `i`-th standard basis vector.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        Self::from_raw(v)
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.entries
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|v| v.is_finite())
    }

    fn check_dim(&self, other: &Vector) -> Result<()> {
        if self.dim() == other.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            })
        }
    }

    /// `sum_i x_i y_i`.
    pub fn inner(&self, other: &Vector) -> Result<f64> {
        self.check_dim(other)?;
        Ok(self.dot(other))
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn norm_squared(&self) -> f64 {
        self.dot(self)
    }

    /// `a * x + y`.
    pub fn axpy(a: f64, x: &Vector, y: &Vector) -> Result<Vector> {
        x.check_dim(y)?;
        Ok(Self::axpy_unchecked(a, x, y))
    }

    /// `||self - other||`.
    pub fn distance(&self, other: &Vector) -> Result<f64> {
        self.check_dim(other)?;
        Ok(self.dist(other))
    }

    pub fn scale(&self, c: f64) -> Vector {
        Self::from_raw(self.entries.iter().map(|v| c * v).collect())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Vector {
        Self::from_raw(self.entries.iter().map(|&v| f(v)).collect())
    }

    pub(crate) fn dot(&self, other: &Vector) -> f64 {
        assert_eq!(self.dim(), other.dim(), "vector dimension mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub(crate) fn dist(&self, other: &Vector) -> f64 {
        assert_eq!(self.dim(), other.dim(), "vector dimension mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub(crate) fn axpy_unchecked(a: f64, x: &Vector, y: &Vector) -> Vector {
        assert_eq!(x.dim(), y.dim(), "vector dimension mismatch");
        Self::from_raw(
            x.entries
                .iter()
                .zip(&y.entries)
                .map(|(xi, yi)| a * xi + yi)
                .collect(),
        )
    }

    /// Convex-style combination `a * x + b * y`.
    pub(crate) fn lincomb(a: f64, x: &Vector, b: f64, y: &Vector) -> Vector {
        assert_eq!(x.dim(), y.dim(), "vector dimension mismatch");
        Self::from_raw(
            x.entries
                .iter()
                .zip(&y.entries)
                .map(|(xi, yi)| a * xi + b * yi)
                .collect(),
        )
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(entries: Vec<f64>) -> Result<Self> {
        Vector::new(entries)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.entries
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.entries).finish()
    }
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.entries[i]
    }
}

impl Add for &Vector {
    type Output = Vector;

    fn add(self, rhs: &Vector) -> Vector {
        Vector::axpy_unchecked(1.0, self, rhs)
    }
}

impl Sub for &Vector {
    type Output = Vector;

    fn sub(self, rhs: &Vector) -> Vector {
        Vector::lincomb(1.0, self, -1.0, rhs)
    }
}

impl Mul<&Vector> for f64 {
    type Output = Vector;

    fn mul(self, rhs: &Vector) -> Vector {
        rhs.scale(self)
    }
}

impl Neg for &Vector {
    type Output = Vector;

    fn neg(self) -> Vector {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> Vector {
        Vector::new(x.to_vec()).unwrap()
    }

    #[test]
    fn inner_products() {
        assert_eq!(v(&[1.0, 0.0]).inner(&v(&[0.0, 1.0])).unwrap(), 0.0);
        assert_eq!(v(&[1.0, 2.0]).inner(&v(&[3.0, 4.0])).unwrap(), 11.0);
        let x = v(&[0.3, -1.7, 2.2]);
        assert!((x.inner(&x).unwrap() - x.norm().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn inner_rejects_mismatched_dims() {
        let err = v(&[1.0]).inner(&v(&[1.0, 2.0])).unwrap_err();
        assert!(matches!(
            err,
            Error::DimensionMismatch {
                expected: 1,
                found: 2
            }
        ));
    }

    #[test]
    fn norms() {
        assert_eq!(v(&[3.0, 4.0]).norm(), 5.0);
        assert_eq!(Vector::zeros(7).norm(), 0.0);
        let x = v(&[1.5, -2.0, 0.25]);
        assert!((x.scale(-3.0).norm() - 3.0 * x.norm()).abs() < 1e-12);
    }

    #[test]
    fn axpy_cases() {
        let x = v(&[1.0, 1.0]);
        let y = v(&[2.0, 3.0]);
        assert_eq!(Vector::axpy(0.0, &x, &y).unwrap(), y);
        assert_eq!(Vector::axpy(1.0, &x, &y).unwrap(), v(&[3.0, 4.0]));
        assert_eq!(Vector::axpy(-1.0, &y, &y).unwrap(), Vector::zeros(2));
        assert!(Vector::axpy(1.0, &x, &v(&[1.0])).is_err());
    }

    #[test]
    fn construction_rejects_bad_entries() {
        assert!(matches!(Vector::new(vec![]), Err(Error::EmptyVector)));
        assert!(matches!(
            Vector::new(vec![1.0, f64::NAN]),
            Err(Error::NonFinite { index: 1 })
        ));
        assert!(Vector::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn json_is_a_plain_array() {
        let x = v(&[1.0, -0.5]);
        assert_eq!(serde_json::to_string(&x).unwrap(), "[1.0,-0.5]");
        let back: Vector = serde_json::from_str("[1.0,-0.5]").unwrap();
        assert_eq!(back, x);
        assert!(serde_json::from_str::<Vector>("[]").is_err());
    }
}
