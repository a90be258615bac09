use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An ordered list of finite reals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Series(Vec<f64>);

impl Series {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Series {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Series {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<Series> for Vec<f64> {
    fn from(s: Series) -> Self {
        s.0
    }
}

/// Aligned observation pairs `(x_i, y_i)`, at least three of them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedSample {
    x: Series,
    y: Series,
}

impl PairedSample {
    pub const MIN_LEN: usize = 3;

    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        Self::from_series(Series::new(x)?, Series::new(y)?)
    }

    pub fn from_series(x: Series, y: Series) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch {
                left: x.len(),
                right: y.len(),
            });
        }
        if x.len() < Self::MIN_LEN {
            return Err(Error::DegenerateInput(format!(
                "need at least {} paired observations, got {}",
                Self::MIN_LEN,
                x.len()
            )));
        }
        Ok(Self { x, y })
    }

    pub fn x(&self) -> &Series {
        &self.x
    }

    pub fn y(&self) -> &Series {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// The same observations with the roles of `x` and `y` exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            x: self.y.clone(),
            y: self.x.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        assert_eq!(
            Series::new(vec![1.0, f64::NAN]),
            Err(Error::NonFinite { index: 1 })
        );
        assert!(Series::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn paired_sample_checks_lengths() {
        assert!(matches!(
            PairedSample::new(vec![1.0, 2.0, 3.0], vec![1.0, 2.0]),
            Err(Error::LengthMismatch { left: 3, right: 2 })
        ));
        assert!(matches!(
            PairedSample::new(vec![1.0, 2.0], vec![1.0, 2.0]),
            Err(Error::DegenerateInput(_))
        ));
    }
}
