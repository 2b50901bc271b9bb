use crate::error::{Error, Result};

/// A finite real scalar sequence, the argument of the Orlicz norm.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidParameter("vector must have n >= 1 entries".into()));
        }
        if let Some(bad) = entries.iter().find(|e| !e.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite vector entry {bad}")));
        }
        Ok(Self(entries))
    }

    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false // n >= 1 by construction
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, e| m.max(e.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0.0)
    }
}

impl std::ops::Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}
