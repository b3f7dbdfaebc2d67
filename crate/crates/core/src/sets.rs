//! Closed convex feasible sets with exact Euclidean projections.

use crate::error::{check_dim, Error, Result};
use crate::vector::RealVector;

#[derive(Clone, Debug, PartialEq)]
pub enum FeasibleSet {
    WholeSpace,
    NonnegativeOrthant,
    Box { lower: RealVector, upper: RealVector },
    EuclideanBall { center: RealVector, radius: f64 },
}

impl FeasibleSet {
    pub fn boxed(lower: RealVector, upper: RealVector) -> Result<Self> {
        check_dim(lower.dim(), upper.dim())?;
        if lower.iter().zip(upper.iter()).any(|(l, u)| l > u) {
            return Err(Error::invalid("box requires lower <= upper componentwise"));
        }
        Ok(Self::Box { lower, upper })
    }

    pub fn ball(center: RealVector, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid("ball radius must be positive and finite"));
        }
        Ok(Self::EuclideanBall { center, radius })
    }

    /// Dimension the set is pinned to, if any. Whole space and orthant are dimension-free.
    pub fn fixed_dim(&self) -> Option<usize> {
        match self {
            Self::WholeSpace | Self::NonnegativeOrthant => None,
            Self::Box { lower, .. } => Some(lower.dim()),
            Self::EuclideanBall { center, .. } => Some(center.dim()),
        }
    }

    pub fn is_whole_space(&self) -> bool {
        matches!(self, Self::WholeSpace)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::WholeSpace => "whole-space",
            Self::NonnegativeOrthant => "nonnegative-orthant",
            Self::Box { .. } => "box",
            Self::EuclideanBall { .. } => "ball",
        }
    }

    /// Closed-form membership test with absolute slack `tol`.
    pub fn contains(&self, z: &RealVector, tol: f64) -> bool {
        if let Some(n) = self.fixed_dim() {
            if n != z.dim() {
                return false;
            }
        }
        match self {
            Self::WholeSpace => true,
            Self::NonnegativeOrthant => z.iter().all(|&v| v >= -tol),
            Self::Box { lower, upper } => z
                .iter()
                .zip(lower.iter().zip(upper.iter()))
                .all(|(&v, (&l, &u))| v >= l - tol && v <= u + tol),
            Self::EuclideanBall { center, radius } => z.dist(center) <= radius + tol,
        }
    }

    /// Euclidean projection onto the set.
    pub fn project(&self, z: &RealVector) -> Result<RealVector> {
        if let Some(n) = self.fixed_dim() {
            check_dim(n, z.dim())?;
        }
        Ok(self.project_unchecked(z))
    }

    pub(crate) fn project_unchecked(&self, z: &RealVector) -> RealVector {
        match self {
            Self::WholeSpace => z.clone(),
            Self::NonnegativeOrthant => z.map(|v| v.max(0.0)),
            Self::Box { lower, upper } => {
                let clamped: Vec<f64> = z
                    .iter()
                    .zip(lower.iter().zip(upper.iter()))
                    .map(|(&v, (&l, &u))| v.clamp(l, u))
                    .collect();
                RealVector::from_raw(clamped.into())
            }
            Self::EuclideanBall { center, radius } => {
                let offset = z - center;
                let d = offset.norm();
                if d <= *radius {
                    z.clone()
                } else {
                    center.axpy(radius / d, &offset)
                }
            }
        }
    }
}

/// Free-function form of [`FeasibleSet::project`].
pub fn project(set: &FeasibleSet, z: &RealVector) -> Result<RealVector> {
    set.project(z)
}
