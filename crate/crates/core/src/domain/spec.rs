use super::Distribution;
use crate::error::{Error, Result};

/// The triple `(n, (r_1..r_n), Z)`: dimension, per-row nonzero counts and
/// the weight law.
///
/// An entry law that varies with `n` is expressed by building a new spec
/// per `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    n: usize,
    r: Vec<usize>,
    dist: Distribution,
}

impl ModelSpec {
    pub fn new(n: usize, r: Vec<usize>, dist: Distribution) -> Result<Self> {
        if n == 0 {
            return Err(Error::Argument("n must be positive".into()));
        }
        if r.len() != n {
            return Err(Error::Argument(format!(
                "expected {n} row counts, got {}",
                r.len()
            )));
        }
        if let Some((i, &ri)) = r.iter().enumerate().find(|(_, &ri)| ri == 0 || ri > n) {
            return Err(Error::Argument(format!(
                "row {i} count r = {ri} outside 1..={n}"
            )));
        }
        Ok(ModelSpec { n, r, dist })
    }

    /// Every row has the same count `r`.
    pub fn homogeneous(n: usize, r: usize, dist: Distribution) -> Result<Self> {
        Self::new(n, vec![r; n], dist)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> &[usize] {
        &self.r
    }

    pub fn dist(&self) -> &Distribution {
        &self.dist
    }

    pub fn r_low(&self) -> usize {
        *self.r.iter().min().expect("n >= 1")
    }

    pub fn r_up(&self) -> usize {
        *self.r.iter().max().expect("n >= 1")
    }

    /// The common row count when all rows agree.
    pub fn homogeneous_r(&self) -> Option<usize> {
        (self.r_low() == self.r_up()).then(|| self.r_low())
    }

    /// `δ / ν²` of the weight law.
    pub fn moment_ratio(&self) -> f64 {
        self.dist.moment_ratio()
    }

    /// Same rows and counts under a different weight law.
    pub fn with_dist(&self, dist: Distribution) -> Self {
        ModelSpec {
            dist,
            ..self.clone()
        }
    }

    /// Compact label such as `(3,(1,2,3),const:1)`.
    pub fn label(&self) -> String {
        let r: Vec<String> = self.r.iter().map(|x| x.to_string()).collect();
        format!("({},({}),{})", self.n, r.join(","), self.dist)
    }
}
