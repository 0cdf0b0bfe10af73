//! Lowest eigenpairs of real symmetric operators.
//!
//! The iterative solver is a thick-restart Lanczos (Krylov–Schur) method with
//! full re-orthogonalization: every new Krylov vector is orthogonalized twice
//! against the whole basis, the projected matrix is built from the
//! Gram–Schmidt coefficients, and on restart the lowest Ritz vectors are kept
//! together with the current residual direction.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::vector::{axpy, dot, norm, scale};
use crate::model::IsingHamiltonian;
use crate::{Error, Result};

pub trait SymmetricOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl SymmetricOperator for IsingHamiltonian {
    fn dim(&self) -> usize {
        IsingHamiltonian::dim(self)
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        IsingHamiltonian::apply(self, x, y)
    }
}

impl SymmetricOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, out) in y.iter_mut().enumerate() {
            *out = self.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
}

#[derive(Clone, Debug)]
pub struct LanczosOptions {
    /// Residual target `‖Av - θv‖ ≤ tol · max(1, |θ|)`.
    pub tol: f64,
    pub max_restarts: usize,
    /// Krylov basis size before a restart; `None` picks `max(2k + 20, 40)`.
    pub subspace: Option<usize>,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions {
            tol: 1e-10,
            max_restarts: 500,
            subspace: None,
            seed: 0x5eed,
        }
    }
}

/// Eigenpairs in ascending order of eigenvalue.
#[derive(Clone, Debug)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    /// `‖Av - θv‖` for each pair, computed explicitly.
    pub residuals: Vec<f64>,
}

/// Flips the sign so the largest-magnitude entry is positive.
fn fix_sign(v: &mut [f64]) {
    let mut best = 0usize;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() * (1.0 + 1e-12) {
            best = i;
        }
    }
    if v[best] < 0.0 {
        scale(-1.0, v);
    }
}

fn residual<A: SymmetricOperator + ?Sized>(op: &A, theta: f64, v: &[f64]) -> f64 {
    let mut av = vec![0.0; v.len()];
    op.apply(v, &mut av);
    axpy(-theta, v, &mut av);
    norm(&av)
}

fn sorted_eigen(t: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(t);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    (values, vectors)
}

/// Lowest `k` eigenpairs of a dense symmetric matrix.
pub fn dense_lowest(m: &DMatrix<f64>, k: usize) -> EigenPairs {
    let k = k.min(m.nrows());
    let (values, vecs) = sorted_eigen(m.clone());
    let mut out = EigenPairs {
        values: values[..k].to_vec(),
        vectors: Vec::with_capacity(k),
        residuals: Vec::with_capacity(k),
    };
    for i in 0..k {
        let mut v: Vec<f64> = vecs.column(i).iter().copied().collect();
        fix_sign(&mut v);
        out.residuals.push(residual(m, values[i], &v));
        out.vectors.push(v);
    }
    out
}

fn random_unit(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let nv = norm(&v);
    scale(1.0 / nv, &mut v);
    v
}

/// Orthogonalizes `w` against `basis` twice; returns the accumulated coefficients.
fn orthogonalize(basis: &[Vec<f64>], w: &mut [f64]) -> Vec<f64> {
    let mut coeffs = vec![0.0; basis.len()];
    for _ in 0..2 {
        for (c, v) in coeffs.iter_mut().zip(basis) {
            let proj = dot(v, w);
            axpy(-proj, v, w);
            *c += proj;
        }
    }
    coeffs
}

/// Lowest `k` eigenpairs by thick-restart Lanczos.
pub fn lanczos_lowest<A: SymmetricOperator + ?Sized>(
    op: &A,
    k: usize,
    opts: &LanczosOptions,
) -> Result<EigenPairs> {
    let n = op.dim();
    if k == 0 || k > n {
        return Err(Error::Domain(format!("requested {k} eigenpairs of a {n}-dimensional operator")));
    }
    let m = opts.subspace.unwrap_or((2 * k + 20).max(40));
    if n <= m.max(64) {
        let mut dense = DMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        let mut col = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|x| *x = 0.0);
            e[j] = 1.0;
            op.apply(&e, &mut col);
            dense.column_mut(j).copy_from_slice(&col);
        }
        return Ok(dense_lowest(&dense, k));
    }
    let m = m.max(k + 2);
    let keep = (k + (m - k) / 2).min(m - 1);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut basis: Vec<Vec<f64>> = vec![random_unit(n, &mut rng)];
    let mut t = DMatrix::<f64>::zeros(m, m);
    let mut start = 0usize;
    let mut restarts = 0usize;
    let mut w = vec![0.0; n];

    loop {
        let mut beta_last = 0.0;
        let mut size = m;
        for j in start..m {
            op.apply(&basis[j], &mut w);
            let coeffs = orthogonalize(&basis, &mut w);
            for (i, c) in coeffs.iter().enumerate() {
                t[(i, j)] = *c;
                t[(j, i)] = *c;
            }
            let beta = norm(&w);
            let scale_est = t[(j, j)].abs().max(1.0);
            if j + 1 == m {
                beta_last = beta;
                break;
            }
            if beta <= 1e-13 * scale_est {
                // Invariant subspace: continue with a fresh orthogonal direction.
                let mut fresh = random_unit(n, &mut rng);
                orthogonalize(&basis, &mut fresh);
                let nf = norm(&fresh);
                if nf < 1e-8 {
                    size = j + 1;
                    beta_last = 0.0;
                    break;
                }
                scale(1.0 / nf, &mut fresh);
                basis.push(fresh);
                t[(j + 1, j)] = 0.0;
                t[(j, j + 1)] = 0.0;
            } else {
                let mut next = w.clone();
                scale(1.0 / beta, &mut next);
                basis.push(next);
                t[(j + 1, j)] = beta;
                t[(j, j + 1)] = beta;
            }
        }

        let proj = t.view((0, 0), (size, size)).into_owned();
        let (theta, s) = sorted_eigen(proj);
        let wanted = k.min(size);
        let estimates: Vec<f64> = (0..wanted)
            .map(|i| beta_last * s[(size - 1, i)].abs())
            .collect();
        let converged = estimates
            .iter()
            .zip(&theta)
            .all(|(r, th)| *r <= opts.tol * th.abs().max(1.0));

        if converged || size < m {
            let mut out = EigenPairs {
                values: theta[..wanted].to_vec(),
                vectors: Vec::with_capacity(wanted),
                residuals: Vec::with_capacity(wanted),
            };
            for i in 0..wanted {
                let mut y = vec![0.0; n];
                for l in 0..size {
                    axpy(s[(l, i)], &basis[l], &mut y);
                }
                let ny = norm(&y);
                scale(1.0 / ny, &mut y);
                fix_sign(&mut y);
                out.residuals.push(residual(op, theta[i], &y));
                out.vectors.push(y);
            }
            return Ok(out);
        }

        restarts += 1;
        if restarts > opts.max_restarts {
            let worst = estimates.iter().cloned().fold(0.0, f64::max);
            return Err(Error::Solver {
                restarts: opts.max_restarts,
                residual: worst,
            });
        }

        let mut next_basis = Vec::with_capacity(m);
        for i in 0..keep {
            let mut y = vec![0.0; n];
            for l in 0..m {
                axpy(s[(l, i)], &basis[l], &mut y);
            }
            next_basis.push(y);
        }
        let mut u = std::mem::take(&mut w);
        scale(1.0 / beta_last, &mut u);
        next_basis.push(u);
        w = vec![0.0; n];

        t.fill(0.0);
        for i in 0..keep {
            t[(i, i)] = theta[i];
            let b = beta_last * s[(m - 1, i)];
            t[(keep, i)] = b;
            t[(i, keep)] = b;
        }
        basis = next_basis;
        start = keep;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(n: usize) -> DMatrix<f64> {
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                2.0
            } else if i.abs_diff(j) == 1 {
                -1.0
            } else {
                0.0
            }
        })
    }

    #[test]
    fn path_laplacian_lowest_modes() {
        let n = 300;
        let op = laplacian(n);
        let pairs = lanczos_lowest(&op, 6, &LanczosOptions::default()).unwrap();
        for (i, v) in pairs.values.iter().enumerate() {
            let exact = 2.0 - 2.0 * (std::f64::consts::PI * (i + 1) as f64 / (n + 1) as f64).cos();
            assert!((v - exact).abs() < 1e-10, "mode {i}: {v} vs {exact}");
        }
        for r in &pairs.residuals {
            assert!(*r < 1e-8);
        }
    }

    #[test]
    fn near_degenerate_pairs_are_resolved() {
        // Two decoupled chains, the second shifted by 1e-4: levels come in close pairs.
        let n = 150;
        let block = laplacian(n);
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(&block);
        m.view_mut((n, n), (n, n))
            .copy_from(&(block + DMatrix::identity(n, n) * 1e-4));
        let pairs = lanczos_lowest(&m, 4, &LanczosOptions::default()).unwrap();
        let dense = dense_lowest(&m, 4);
        for (a, b) in pairs.values.iter().zip(&dense.values) {
            assert!((a - b).abs() < 1e-10);
        }
        assert!((pairs.values[1] - pairs.values[0] - 1e-4).abs() < 1e-9);
    }

    #[test]
    fn sign_convention() {
        let mut v = vec![0.1, -0.9, 0.3];
        fix_sign(&mut v);
        assert_eq!(v, vec![-0.1, 0.9, -0.3]);
    }
}
