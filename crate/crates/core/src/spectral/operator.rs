use std::sync::Arc;

use nalgebra::DMatrix;

use super::{PreparedSystem, SpectralError};

const QUTRIT_X: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// `H(s)` as a diagonal plus single-site transverse generators. Qubits use
/// Pauli X; qutrits use the spin-1 Sx matrix.
#[derive(Clone, Debug)]
pub struct AssembledOperator {
    dims: Vec<usize>,
    strides: Vec<usize>,
    diagonal: Arc<Vec<f64>>,
    s: f64,
    /// `(site, coefficient)` with the coefficient `(1 - s)·sign`.
    transverse: Vec<(usize, f64)>,
}

/// Assembles `H(s) = (1 - s)·sign·Σ_driven X + s·H_final`.
pub fn assemble(system: &PreparedSystem, s: f64) -> Result<AssembledOperator, SpectralError> {
    if !(0.0..=1.0).contains(&s) {
        return Err(SpectralError::InvalidSchedulePoint(s));
    }
    let mut strides = Vec::with_capacity(system.dims.len());
    let mut acc = 1;
    for &d in &system.dims {
        strides.push(acc);
        acc *= d;
    }
    let c = (1.0 - s) * system.driver_sign;
    let transverse = if c == 0.0 {
        Vec::new()
    } else {
        (0..system.dims.len())
            .filter(|&k| system.driven[k])
            .map(|k| (k, c))
            .collect()
    };
    Ok(AssembledOperator {
        dims: system.dims.clone(),
        strides,
        diagonal: Arc::clone(&system.diagonal),
        s,
        transverse,
    })
}

impl AssembledOperator {
    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn is_diagonal(&self) -> bool {
        self.transverse.is_empty()
    }

    pub fn diagonal_entry(&self, i: usize) -> f64 {
        self.s * self.diagonal[i]
    }

    pub fn diagonal_entries(&self) -> Vec<f64> {
        self.diagonal.iter().map(|d| self.s * d).collect()
    }

    /// Calls `f(j, value)` for every nonzero off-diagonal entry in row `i`.
    pub fn for_each_offdiagonal(&self, i: usize, mut f: impl FnMut(usize, f64)) {
        for &(k, c) in &self.transverse {
            let stride = self.strides[k];
            let digit = (i / stride) % self.dims[k];
            match self.dims[k] {
                2 => {
                    let j = if digit == 0 { i + stride } else { i - stride };
                    f(j, c);
                }
                _ => {
                    if digit > 0 {
                        f(i - stride, c * QUTRIT_X);
                    }
                    if digit + 1 < self.dims[k] {
                        f(i + stride, c * QUTRIT_X);
                    }
                }
            }
        }
    }

    /// `y = H x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.s * self.diagonal[i] * x[i];
        }
        for &(k, c) in &self.transverse {
            let stride = self.strides[k];
            let d = self.dims[k];
            let block = stride * d;
            for base in (0..x.len()).step_by(block) {
                for off in 0..stride {
                    let i0 = base + off;
                    match d {
                        2 => {
                            let i1 = i0 + stride;
                            y[i0] += c * x[i1];
                            y[i1] += c * x[i0];
                        }
                        _ => {
                            let (i1, i2) = (i0 + stride, i0 + 2 * stride);
                            let cq = c * QUTRIT_X;
                            y[i0] += cq * x[i1];
                            y[i1] += cq * (x[i0] + x[i2]);
                            y[i2] += cq * x[i1];
                        }
                    }
                }
            }
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diagonal_entry(i);
            self.for_each_offdiagonal(i, |j, v| m[(i, j)] += v);
        }
        m
    }
}
