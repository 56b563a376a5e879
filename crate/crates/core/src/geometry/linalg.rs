//! Dense symmetric eigensolvers.
//!
//! [`jacobi_eigen`] is the cyclic Jacobi method and serves every matrix up
//! to [`DENSE_LIMIT`] rows. Larger matrices go through orthogonal subspace
//! iteration whose small Rayleigh–Ritz matrix is again handed to Jacobi.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

/// Largest order diagonalized directly by Jacobi sweeps.
pub const DENSE_LIMIT: usize = 256;

/// Off-diagonal Frobenius norm, relative to the full norm, at which sweeps stop.
pub const JACOBI_TOL: f64 = 1e-12;

const MAX_SWEEPS: usize = 100;
const MAX_SUBSPACE_ITERS: usize = 2000;
const RITZ_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EigenError {
    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("matrix has {len} entries, expected {n}x{n}")]
    Dimension { len: usize, n: usize },
    #[error("no convergence after {0} iterations")]
    NotConverged(usize),
}

/// Eigenvalues with unit eigenvectors, in matching order.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

impl SymEigen {
    /// Reorders by decreasing modulus and keeps the first `k`.
    fn top_by_modulus(mut self, k: usize) -> Self {
        let mut order: Vec<usize> = (0..self.values.len()).collect();
        order.sort_by(|&a, &b| {
            self.values[b]
                .abs()
                .total_cmp(&self.values[a].abs())
                .then(a.cmp(&b))
        });
        order.truncate(k);
        let values = order.iter().map(|&i| self.values[i]).collect();
        let vectors = order
            .iter()
            .map(|&i| std::mem::take(&mut self.vectors[i]))
            .collect();
        SymEigen { values, vectors }
    }
}

/// Checks squareness and exact symmetry of a row-major matrix.
pub fn check_symmetric(a: &[f64], n: usize) -> Result<(), EigenError> {
    if a.len() != n * n {
        return Err(EigenError::Dimension { len: a.len(), n });
    }
    for i in 0..n {
        for j in i + 1..n {
            if a[i * n + j] != a[j * n + i] {
                return Err(EigenError::NotSymmetric { row: i, col: j });
            }
        }
    }
    Ok(())
}

/// Cyclic Jacobi rotations until the off-diagonal norm is at most
/// `tol · ‖A‖_F`. Eigenvalues come back unsorted.
pub fn jacobi_eigen(a: &[f64], n: usize, tol: f64) -> Result<SymEigen, EigenError> {
    check_symmetric(a, n)?;
    let mut a = a.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let frob = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(&a, n);
        if off <= tol * frob {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k * n + p], a[k * n + q]);
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p * n + k], a[q * n + k]);
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged && off_diagonal_norm(&a, n) > tol * frob {
        return Err(EigenError::NotConverged(MAX_SWEEPS));
    }
    Ok(SymEigen {
        values: (0..n).map(|i| a[i * n + i]).collect(),
        vectors: (0..n)
            .map(|j| (0..n).map(|i| v[i * n + j]).collect())
            .collect(),
    })
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j] * a[i * n + j];
            }
        }
    }
    s.sqrt()
}

/// The `k` eigenpairs of largest modulus.
///
/// `rng` seeds the starting block of the subspace iteration, so the result
/// is a deterministic function of the matrix and the generator state.
pub fn top_eigenpairs(
    a: &[f64],
    n: usize,
    k: usize,
    rng: &mut ChaCha8Rng,
) -> Result<SymEigen, EigenError> {
    check_symmetric(a, n)?;
    let k = k.min(n);
    if n <= DENSE_LIMIT {
        return Ok(jacobi_eigen(a, n, JACOBI_TOL)?.top_by_modulus(k));
    }
    let p = (2 * k + 8).min(n);
    let mut q: Vec<Vec<f64>> = (0..p)
        .map(|_| (0..n).map(|_| rng.random::<f64>() - 0.5).collect())
        .collect();
    orthonormalize(&mut q, rng);
    for _ in 0..MAX_SUBSPACE_ITERS {
        let z = mat_block(a, n, &q);
        // Rayleigh–Ritz on span(q)
        let mut h = vec![0.0; p * p];
        for i in 0..p {
            for j in 0..p {
                h[i * p + j] = dot(&q[i], &z[j]);
            }
        }
        for i in 0..p {
            for j in i + 1..p {
                let s = 0.5 * (h[i * p + j] + h[j * p + i]);
                h[i * p + j] = s;
                h[j * p + i] = s;
            }
        }
        let ritz = jacobi_eigen(&h, p, JACOBI_TOL)?.top_by_modulus(p);
        let x = combine(&q, &ritz.vectors);
        let ax = combine(&z, &ritz.vectors);
        let scale = ritz.values[0].abs().max(f64::MIN_POSITIVE);
        let worst = (0..k)
            .map(|j| {
                ax[j]
                    .iter()
                    .zip(&x[j])
                    .map(|(u, w)| (u - ritz.values[j] * w).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max);
        if worst <= RITZ_TOL * scale {
            return Ok(SymEigen {
                values: ritz.values[..k].to_vec(),
                vectors: x.into_iter().take(k).collect(),
            });
        }
        q = ax;
        orthonormalize(&mut q, rng);
    }
    Err(EigenError::NotConverged(MAX_SUBSPACE_ITERS))
}

/// `A · [q₀ … q_{p-1}]`, one pass over the rows of `A`.
fn mat_block(a: &[f64], n: usize, q: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let p = q.len();
    // row-major copy of the block so each row of A meets contiguous memory
    let mut qt = vec![0.0; n * p];
    for (j, col) in q.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            qt[i * p + j] = *v;
        }
    }
    let rows: Vec<Vec<f64>> = a
        .par_chunks_exact(n)
        .map(|row| {
            let mut out = vec![0.0; p];
            for (l, &a_il) in row.iter().enumerate() {
                if a_il != 0.0 {
                    for (o, qv) in out.iter_mut().zip(&qt[l * p..(l + 1) * p]) {
                        *o += a_il * qv;
                    }
                }
            }
            out
        })
        .collect();
    (0..p)
        .map(|j| rows.iter().map(|r| r[j]).collect())
        .collect()
}

/// Columns `Σ_l basis[l] · coeffs[j][l]`.
fn combine(basis: &[Vec<f64>], coeffs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = basis[0].len();
    coeffs
        .iter()
        .map(|u| {
            let mut out = vec![0.0; n];
            for (b, &w) in basis.iter().zip(u) {
                for (o, x) in out.iter_mut().zip(b) {
                    *o += w * x;
                }
            }
            out
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Modified Gram–Schmidt, applied twice. Columns that collapse (rank-deficient
/// images) are replaced by fresh random directions.
fn orthonormalize(q: &mut [Vec<f64>], rng: &mut ChaCha8Rng) {
    let n = q.first().map_or(0, Vec::len);
    let reference = q.iter().map(|c| dot(c, c).sqrt()).fold(0.0, f64::max);
    for j in 0..q.len() {
        let mut attempts = 0;
        loop {
            for _ in 0..2 {
                for i in 0..j {
                    let (done, rest) = q.split_at_mut(j);
                    let proj = dot(&done[i], &rest[0]);
                    for (x, y) in rest[0].iter_mut().zip(&done[i]) {
                        *x -= proj * y;
                    }
                }
            }
            let norm = dot(&q[j], &q[j]).sqrt();
            if norm > 1e-12 * reference.max(1e-300) && norm > 0.0 {
                q[j].iter_mut().for_each(|x| *x /= norm);
                break;
            }
            attempts += 1;
            assert!(attempts < 100, "cannot extend orthonormal basis");
            q[j] = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn two_by_two_rotation() {
        // eigenvalues 3 and 1 with vectors (1, 1)/√2 and (1, -1)/√2
        let a = [2.0, 1.0, 1.0, 2.0];
        let e = jacobi_eigen(&a, 2, JACOBI_TOL).unwrap().top_by_modulus(2);
        assert!((e.values[0] - 3.0).abs() < 1e-12);
        assert!((e.values[1] - 1.0).abs() < 1e-12);
        let v = &e.vectors[0];
        assert!((v[0].abs() - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((v[0] - v[1]).abs() < 1e-12);
    }

    #[test]
    fn rotated_diagonal() {
        // R diag(5, -2) Rᵀ for a rotation by 0.3 rad
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let a = [
            5.0 * c * c - 2.0 * s * s,
            5.0 * c * s + 2.0 * c * s,
            5.0 * c * s + 2.0 * c * s,
            5.0 * s * s - 2.0 * c * c,
        ];
        let e = jacobi_eigen(&a, 2, JACOBI_TOL).unwrap().top_by_modulus(2);
        assert!((e.values[0] - 5.0).abs() < 1e-12);
        assert!((e.values[1] + 2.0).abs() < 1e-12);
        assert!((e.vectors[0][0].abs() - c).abs() < 1e-12);
    }

    #[test]
    fn rank_one_update() {
        // I + u uᵀ has eigenvalue 1 + |u|² along u and 1 elsewhere
        let u = [1.0, 2.0, -1.0, 0.5];
        let n = u.len();
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = u[i] * u[j] + if i == j { 1.0 } else { 0.0 };
            }
        }
        let e = jacobi_eigen(&a, n, JACOBI_TOL).unwrap().top_by_modulus(n);
        let u2: f64 = u.iter().map(|x| x * x).sum();
        assert!((e.values[0] - (1.0 + u2)).abs() < 1e-12);
        for v in &e.values[1..] {
            assert!((v - 1.0).abs() < 1e-12);
        }
        let align = dot(&e.vectors[0], &u).abs() / u2.sqrt();
        assert!((align - 1.0).abs() < 1e-12);
    }

    #[test]
    fn scaled_all_ones() {
        let n = 50;
        let a = vec![1.0 / n as f64; n * n];
        let e = jacobi_eigen(&a, n, JACOBI_TOL).unwrap().top_by_modulus(n);
        assert!((e.values[0] - 1.0).abs() < 1e-12);
        assert!(e.values[1..].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn rejects_asymmetric_input() {
        assert_eq!(
            jacobi_eigen(&[1.0, 2.0, 3.0, 4.0], 2, JACOBI_TOL).unwrap_err(),
            EigenError::NotSymmetric { row: 0, col: 1 }
        );
        assert!(matches!(
            jacobi_eigen(&[1.0, 2.0, 3.0], 2, JACOBI_TOL),
            Err(EigenError::Dimension { .. })
        ));
    }

    #[test]
    fn subspace_iteration_matches_jacobi() {
        // symmetric matrix with known spectrum: Q diag(d) Qᵀ, Q from Householder
        let n = DENSE_LIMIT + 44;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let w: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
        let w2 = dot(&w, &w);
        let d: Vec<f64> = (0..n)
            .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 } / (1.0 + i as f64))
            .collect();
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                // (I - 2wwᵀ/|w|²) diag(d) (I - 2wwᵀ/|w|²)
                let mut s = 0.0;
                for (l, dl) in d.iter().enumerate() {
                    let hil = (if i == l { 1.0 } else { 0.0 }) - 2.0 * w[i] * w[l] / w2;
                    let hjl = (if j == l { 1.0 } else { 0.0 }) - 2.0 * w[j] * w[l] / w2;
                    s += hil * dl * hjl;
                }
                a[i * n + j] = s;
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                let s = 0.5 * (a[i * n + j] + a[j * n + i]);
                a[i * n + j] = s;
                a[j * n + i] = s;
            }
        }
        let e = top_eigenpairs(&a, n, 4, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        for (got, want) in e.values.iter().zip([1.0, -0.5, 1.0 / 3.0, -0.25]) {
            assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        }
        let again = top_eigenpairs(&a, n, 4, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(e.values, again.values);
    }

    #[test]
    fn subspace_iteration_on_rank_one() {
        let n = DENSE_LIMIT + 1;
        let a = vec![1.0 / n as f64; n * n];
        let e = top_eigenpairs(&a, n, 4, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-12);
        assert!(e.values[1..].iter().all(|v| v.abs() < 1e-12));
    }
}
