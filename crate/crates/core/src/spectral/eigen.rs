use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{AssembledOperator, SolverOptions, SpectralError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverMethod {
    /// Operator has no off-diagonal part; eigenvalues are the sorted diagonal.
    Diagonal,
    Dense,
    Lanczos,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub degeneracy_threshold: f64,
    pub method: SolverMethod,
    pub iterations: usize,
    /// Largest `‖Hv - λv‖` over the returned pairs (0 for exact paths).
    pub residual: f64,
}

impl SpectrumResult {
    /// `λ1 - λ0`, or 0 when below the degeneracy threshold.
    pub fn gap(&self) -> Option<f64> {
        let g = self.eigenvalues.get(1)? - self.eigenvalues[0];
        Some(if g < self.degeneracy_threshold {
            0.0
        } else {
            g
        })
    }
}

fn check_k(k: usize, dim: usize) -> Result<(), SpectralError> {
    if k == 0 || k > dim {
        return Err(SpectralError::InvalidK { k, dim });
    }
    Ok(())
}

fn sorted_smallest(mut values: Vec<f64>, k: usize) -> Vec<f64> {
    if k < values.len() {
        values.select_nth_unstable_by(k, |a, b| a.total_cmp(b));
        values.truncate(k);
    }
    values.sort_by(|a, b| a.total_cmp(b));
    values
}

/// The `k` smallest eigenvalues (with multiplicity).
pub fn lowest_eigs(
    op: &AssembledOperator,
    k: usize,
    opts: &SolverOptions,
) -> Result<SpectrumResult, SpectralError> {
    let dim = op.dim();
    check_k(k, dim)?;
    let result = |eigenvalues, method, iterations, residual| SpectrumResult {
        eigenvalues,
        degeneracy_threshold: opts.degeneracy_threshold,
        method,
        iterations,
        residual,
    };
    if op.is_diagonal() {
        return Ok(result(
            sorted_smallest(op.diagonal_entries(), k),
            SolverMethod::Diagonal,
            0,
            0.0,
        ));
    }
    if dim <= opts.dense_max {
        let values = op.to_dense().symmetric_eigenvalues();
        return Ok(result(
            sorted_smallest(values.as_slice().to_vec(), k),
            SolverMethod::Dense,
            0,
            0.0,
        ));
    }
    let mut locked: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut values = Vec::with_capacity(k);
    let mut iterations = 0;
    let mut residual: f64 = 0.0;
    for _ in 0..k {
        let pair = lanczos_lowest(op, &locked, opts)?;
        iterations += pair.iterations;
        residual = residual.max(pair.residual);
        values.push(pair.value);
        locked.push(pair.vector);
    }
    values.sort_by(|a, b| a.total_cmp(b));
    Ok(result(values, SolverMethod::Lanczos, iterations, residual))
}

/// Lowest eigenvalue and a normalised eigenvector.
pub fn ground_state(
    op: &AssembledOperator,
    opts: &SolverOptions,
) -> Result<(f64, Vec<f64>), SpectralError> {
    let dim = op.dim();
    check_k(1, dim)?;
    if op.is_diagonal() {
        // First index among equal minima.
        let diag = op.diagonal_entries();
        let i = (0..dim).fold(0, |best, i| if diag[i] < diag[best] { i } else { best });
        let mut vec = vec![0.0; dim];
        vec[i] = 1.0;
        return Ok((diag[i], vec));
    }
    if dim <= opts.dense_max {
        let eig = SymmetricEigen::new(op.to_dense());
        let i = eig.eigenvalues.imin();
        return Ok((
            eig.eigenvalues[i],
            eig.eigenvectors.column(i).iter().copied().collect(),
        ));
    }
    let pair = lanczos_lowest(op, &[], opts)?;
    Ok((pair.value, pair.vector))
}

struct RitzPair {
    value: f64,
    vector: Vec<f64>,
    iterations: usize,
    residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn orthogonalise(w: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for u in basis {
            let c = dot(w, u);
            axpy(-c, u, w);
        }
    }
}

/// Lowest eigenpair in the complement of `locked`, by Lanczos with full
/// reorthogonalisation, restarted from the current Ritz vector.
fn lanczos_lowest(
    op: &AssembledOperator,
    locked: &[Vec<f64>],
    opts: &SolverOptions,
) -> Result<RitzPair, SpectralError> {
    let dim = op.dim();
    let free = dim - locked.len();
    // Keep the Krylov basis under ~1 GiB.
    let memory_cap = ((1usize << 27) / dim.max(1)).max(8);
    let m_max = opts.krylov_dim.min(free).min(memory_cap).max(1);

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ locked.len() as u64);
    let mut v: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() - 0.5).collect();
    orthogonalise(&mut v, locked);
    let n0 = norm(&v);
    v.iter_mut().for_each(|x| *x /= n0);

    let mut iterations = 0;
    let mut last_residual = f64::INFINITY;
    let mut w = vec![0.0; dim];
    for _ in 0..=opts.max_restarts {
        let mut basis: Vec<Vec<f64>> = vec![v.clone()];
        let mut alphas: Vec<f64> = Vec::new();
        let mut betas: Vec<f64> = Vec::new();
        loop {
            let j = basis.len() - 1;
            op.apply(&basis[j], &mut w);
            iterations += 1;
            let alpha = dot(&w, &basis[j]);
            axpy(-alpha, &basis[j], &mut w);
            if j > 0 {
                axpy(-betas[j - 1], &basis[j - 1], &mut w);
            }
            orthogonalise(&mut w, locked);
            orthogonalise(&mut w, &basis);
            alphas.push(alpha);
            let beta = norm(&w);
            let exhausted = beta < 1e-12 || basis.len() >= m_max;
            if exhausted || alphas.len().is_multiple_of(5) {
                let (theta, coeffs) = tridiagonal_lowest(&alphas, &betas);
                let estimate = (beta * coeffs[coeffs.len() - 1]).abs();
                let tol = opts.tol * theta.abs().max(1.0);
                if estimate <= tol || exhausted {
                    let mut y = vec![0.0; dim];
                    for (c, b) in coeffs.iter().zip(&basis) {
                        axpy(*c, b, &mut y);
                    }
                    orthogonalise(&mut y, locked);
                    let ny = norm(&y);
                    y.iter_mut().for_each(|x| *x /= ny);
                    op.apply(&y, &mut w);
                    iterations += 1;
                    let rayleigh = dot(&w, &y);
                    axpy(-rayleigh, &y, &mut w);
                    last_residual = norm(&w);
                    if last_residual <= opts.tol * rayleigh.abs().max(1.0) {
                        return Ok(RitzPair {
                            value: rayleigh,
                            vector: y,
                            iterations,
                            residual: last_residual,
                        });
                    }
                    v = y;
                    break;
                }
            }
            betas.push(beta);
            basis.push(w.iter().map(|x| x / beta).collect());
        }
    }
    Err(SpectralError::NonConvergence {
        iterations,
        residual: last_residual,
    })
}

fn tridiagonal_lowest(alphas: &[f64], betas: &[f64]) -> (f64, Vec<f64>) {
    let m = alphas.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alphas[i]
        } else if i + 1 == j {
            betas[i]
        } else if j + 1 == i {
            betas[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let i = eig.eigenvalues.imin();
    (
        eig.eigenvalues[i],
        eig.eigenvectors.column(i).iter().copied().collect(),
    )
}
