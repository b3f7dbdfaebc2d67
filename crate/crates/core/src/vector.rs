//! Dense real vectors with a finiteness guarantee at construction.

use std::ops::{Add, Index, Mul, Neg, Sub};

use nalgebra::DVector;

use crate::error::{Error, Result};

/// A point in ℝⁿ (n ≥ 1).
///
/// Checked constructors reject NaN and ±∞. Arithmetic between vectors does not
/// re-check every entry; solver loops call [`RealVector::is_finite`] once per
/// iteration instead and report divergence.
#[derive(Clone, Debug, PartialEq)]
pub struct RealVector(DVector<f64>);

impl RealVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::invalid("vector dimension must be at least 1"));
        }
        if let Some(i) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("entry {i} is not finite")));
        }
        Ok(Self(DVector::from_vec(entries)))
    }

    pub fn from_dvector(v: DVector<f64>) -> Result<Self> {
        Self::new(v.data.into())
    }

    /// Wraps an already-validated nalgebra vector. Used on hot paths.
    pub(crate) fn from_raw(v: DVector<f64>) -> Self {
        Self(v)
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "vector dimension must be at least 1");
        Self(DVector::zeros(n))
    }

    pub fn from_element(n: usize, value: f64) -> Self {
        assert!(n >= 1, "vector dimension must be at least 1");
        Self(DVector::from_element(n, value))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn as_dvector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn into_dvector(self) -> DVector<f64> {
        self.0
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.0.as_slice().to_vec()
    }

    pub fn iter(&self) -> impl Iterator<Item = &f64> {
        self.0.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.0.dot(&other.0)
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.norm_squared()
    }

    pub fn dist_sq(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    pub fn dist(&self, other: &Self) -> f64 {
        self.dist_sq(other).sqrt()
    }

    /// `self + a * x`
    pub fn axpy(&self, a: f64, x: &Self) -> Self {
        let mut out = self.0.clone();
        out.axpy(a, &x.0, 1.0);
        Self(out)
    }

    pub fn map(&self, f: impl FnMut(f64) -> f64) -> Self {
        Self(self.0.map(f))
    }

    pub fn zip_map(&self, other: &Self, f: impl FnMut(f64, f64) -> f64) -> Self {
        Self(self.0.zip_map(&other.0, f))
    }

    /// Concatenation `(self, other)`.
    pub fn concat(&self, other: &Self) -> Self {
        let mut v = self.to_vec();
        v.extend_from_slice(other.as_slice());
        Self(DVector::from_vec(v))
    }
}

impl Index<usize> for RealVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for &RealVector {
    type Output = RealVector;
    fn add(self, rhs: &RealVector) -> RealVector {
        RealVector(&self.0 + &rhs.0)
    }
}

impl Sub for &RealVector {
    type Output = RealVector;
    fn sub(self, rhs: &RealVector) -> RealVector {
        RealVector(&self.0 - &rhs.0)
    }
}

impl Mul<f64> for &RealVector {
    type Output = RealVector;
    fn mul(self, rhs: f64) -> RealVector {
        RealVector(&self.0 * rhs)
    }
}

impl Neg for &RealVector {
    type Output = RealVector;
    fn neg(self) -> RealVector {
        RealVector(-&self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_and_empty() {
        assert!(RealVector::new(vec![1.0, f64::NAN]).is_err());
        assert!(RealVector::new(vec![f64::INFINITY]).is_err());
        assert!(RealVector::new(vec![]).is_err());
    }

    #[test]
    fn basic_arithmetic() {
        let a = RealVector::new(vec![1.0, 2.0]).unwrap();
        let b = RealVector::new(vec![3.0, -1.0]).unwrap();
        assert_eq!((&a + &b).to_vec(), vec![4.0, 1.0]);
        assert_eq!((&a - &b).to_vec(), vec![-2.0, 3.0]);
        assert_eq!(a.axpy(2.0, &b).to_vec(), vec![7.0, 0.0]);
        assert_eq!(a.dot(&b), 1.0);
        assert_eq!(a.dist_sq(&b), 13.0);
        assert_eq!(a.concat(&b).to_vec(), vec![1.0, 2.0, 3.0, -1.0]);
    }
}
