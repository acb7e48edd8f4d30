//! Logical Ising models with optional higher-order terms.

use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("logical index {index} outside 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("coupling {0}-{0} is a self-interaction")]
    SelfCoupling(usize),
    #[error("multi-body term {0:?} repeats an index")]
    RepeatedIndex(Vec<usize>),
    #[error("multi-body term {0:?} needs at least 3 logicals")]
    TooFewBodies(Vec<usize>),
    #[error("non-finite coefficient on {0:?}")]
    NonFinite(Vec<usize>),
    #[error("expected {expected} local fields, found {found}")]
    FieldCount { expected: usize, found: usize },
}

/// `H = Σ h_i z_i + Σ_{i<j} J_ij z_i z_j + Σ_K K Π_{k∈K} z_k`, indices 1-based.
///
/// Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct LogicalModel {
    n: usize,
    h: Vec<f64>,
    j: BTreeMap<(usize, usize), f64>,
    k: BTreeMap<Vec<usize>, f64>,
}

impl LogicalModel {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            h: vec![0.0; n],
            ..Self::default()
        }
    }

    pub fn with_fields(h: Vec<f64>) -> Result<Self, ModelError> {
        let mut m = Self::new(h.len());
        for (i, v) in h.into_iter().enumerate() {
            m.set_field(i + 1, v)?;
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn check_index(&self, i: usize) -> Result<(), ModelError> {
        if i == 0 || i > self.n {
            return Err(ModelError::IndexOutOfRange {
                index: i,
                n: self.n,
            });
        }
        Ok(())
    }

    pub fn set_field(&mut self, i: usize, value: f64) -> Result<(), ModelError> {
        self.check_index(i)?;
        if !value.is_finite() {
            return Err(ModelError::NonFinite(vec![i]));
        }
        self.h[i - 1] = value;
        Ok(())
    }

    pub fn set_coupling(&mut self, i: usize, j: usize, value: f64) -> Result<(), ModelError> {
        self.check_index(i)?;
        self.check_index(j)?;
        if i == j {
            return Err(ModelError::SelfCoupling(i));
        }
        if !value.is_finite() {
            return Err(ModelError::NonFinite(vec![i, j]));
        }
        let key = (i.min(j), i.max(j));
        if value == 0.0 {
            self.j.remove(&key);
        } else {
            self.j.insert(key, value);
        }
        Ok(())
    }

    pub fn set_multibody(&mut self, spins: &[usize], value: f64) -> Result<(), ModelError> {
        let mut key = spins.to_vec();
        key.sort_unstable();
        for &i in &key {
            self.check_index(i)?;
        }
        if key.windows(2).any(|w| w[0] == w[1]) {
            return Err(ModelError::RepeatedIndex(spins.to_vec()));
        }
        if key.len() < 3 {
            return Err(ModelError::TooFewBodies(spins.to_vec()));
        }
        if !value.is_finite() {
            return Err(ModelError::NonFinite(key));
        }
        if value == 0.0 {
            self.k.remove(&key);
        } else {
            self.k.insert(key, value);
        }
        Ok(())
    }

    pub fn fields(&self) -> &[f64] {
        &self.h
    }

    pub fn field(&self, i: usize) -> f64 {
        self.h[i - 1]
    }

    pub fn couplings(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.j
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.j.get(&(i.min(j), i.max(j))).copied().unwrap_or(0.0)
    }

    pub fn multibody(&self) -> &BTreeMap<Vec<usize>, f64> {
        &self.k
    }

    /// Every nonzero term as (sorted logical subset, coefficient).
    pub fn terms(&self) -> Vec<(Vec<usize>, f64)> {
        let mut out: Vec<(Vec<usize>, f64)> = self
            .h
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, &v)| (vec![i + 1], v))
            .collect();
        out.extend(self.j.iter().map(|(&(i, j), &v)| (vec![i, j], v)));
        out.extend(self.k.iter().map(|(key, &v)| (key.clone(), v)));
        out
    }

    /// Energy of a ±1 configuration, `z[k-1]` for logical `k`.
    pub fn energy(&self, z: &[i8]) -> f64 {
        assert_eq!(z.len(), self.n, "configuration length");
        let mut e = 0.0;
        for (i, &h) in self.h.iter().enumerate() {
            e += h * f64::from(z[i]);
        }
        for (&(i, j), &v) in &self.j {
            e += v * f64::from(z[i - 1] * z[j - 1]);
        }
        for (key, &v) in &self.k {
            let p: i8 = key.iter().map(|&i| z[i - 1]).product();
            e += v * f64::from(p);
        }
        e
    }
}
