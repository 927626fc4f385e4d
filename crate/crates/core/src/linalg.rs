//! Compressed-row sparse matrices and the two SPD solvers used by the
//! least-squares systems: Jacobi-preconditioned conjugate gradients and a
//! sparse Cholesky factorization.

use faer::linalg::solvers::SolveCore;
use faer::sparse::{SparseColMatRef, SymbolicSparseColMatRef};
use faer::{Conj, MatMut, Side};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Zero matrix with the pattern given by sorted, duplicate-free rows.
    pub fn from_pattern(rows: Vec<Vec<usize>>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        let nnz: usize = rows.iter().map(Vec::len).sum();
        let mut col_idx = Vec::with_capacity(nnz);
        for r in rows {
            debug_assert!(r.windows(2).all(|w| w[0] < w[1]));
            col_idx.extend_from_slice(&r);
            row_ptr.push(col_idx.len());
        }
        Self {
            n,
            row_ptr,
            col_idx,
            values: vec![0.0; nnz],
        }
    }

    pub fn from_dense(a: &[Vec<f64>]) -> Self {
        let rows = a
            .iter()
            .map(|r| (0..r.len()).filter(|&j| r[j] != 0.0).collect())
            .collect();
        let mut m = Self::from_pattern(rows);
        for (i, r) in a.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                if v != 0.0 {
                    m.add(i, j, v);
                }
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    fn position(&self, i: usize, j: usize) -> Option<usize> {
        let (lo, hi) = (self.row_ptr[i], self.row_ptr[i + 1]);
        self.col_idx[lo..hi].binary_search(&j).ok().map(|p| lo + p)
    }

    /// Adds `v` to entry `(i, j)`, which must be in the pattern.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let p = self.position(i, j).expect("entry outside sparsity pattern");
        self.values[p] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.position(i, j).map_or(0.0, |p| self.values[p])
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |M − Mᵀ|` over stored entries; a missing transposed entry counts as 0.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn is_structurally_symmetric(&self) -> bool {
        (0..self.n).all(|i| self.row(i).all(|(j, _)| self.position(j, i).is_some()))
    }

    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            let mut s = 0.0;
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.values[p] * x[self.col_idx[p]];
            }
            *yi = s;
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_vec(x, &mut y);
        y
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for (i, row) in d.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = v;
            }
        }
        d
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverKind {
    /// Cholesky below `direct_threshold` unknowns, PCG above.
    Auto,
    Direct,
    Cg,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub kind: SolverKind,
    pub tol: f64,
    pub max_iterations: usize,
    pub direct_threshold: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            kind: SolverKind::Auto,
            tol: 1e-10,
            max_iterations: 50_000,
            direct_threshold: 4_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveStats {
    pub direct: bool,
    pub iterations: usize,
    pub relative_residual: f64,
}

pub fn solve(m: &CsrMatrix, b: &[f64], cfg: &SolverConfig) -> Result<(Vec<f64>, SolveStats)> {
    let direct = match cfg.kind {
        SolverKind::Direct => true,
        SolverKind::Cg => false,
        SolverKind::Auto => m.dim() < cfg.direct_threshold,
    };
    if direct {
        let x = cholesky_solve(m, b)?;
        let relative_residual = relative_residual(m, &x, b);
        Ok((
            x,
            SolveStats {
                direct,
                iterations: 0,
                relative_residual,
            },
        ))
    } else {
        let (x, iterations) = pcg(m, b, cfg.tol, cfg.max_iterations)?;
        let relative_residual = relative_residual(m, &x, b);
        Ok((
            x,
            SolveStats {
                direct,
                iterations,
                relative_residual,
            },
        ))
    }
}

pub fn relative_residual(m: &CsrMatrix, x: &[f64], b: &[f64]) -> f64 {
    let r = m.apply(x);
    let num: f64 = r.iter().zip(b).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let den = norm(b);
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Conjugate gradients preconditioned by the inverse diagonal; stops when
/// `‖b − Mx‖ ≤ tol ‖b‖`.
pub fn pcg(m: &CsrMatrix, b: &[f64], tol: f64, max_iterations: usize) -> Result<(Vec<f64>, usize)> {
    let n = m.dim();
    let inv_diag: Vec<f64> = m
        .diagonal()
        .into_iter()
        .map(|d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let mut x = vec![0.0; n];
    let bnorm = norm(b);
    if bnorm == 0.0 {
        return Ok((x, 0));
    }
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut q = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut rnorm = bnorm;
    for it in 1..=max_iterations {
        m.mul_vec(&p, &mut q);
        let alpha = rz / dot(&p, &q);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        rnorm = norm(&r);
        if rnorm <= tol * bnorm {
            return Ok((x, it));
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::SolverDiverged {
        iterations: max_iterations,
        residual: rnorm / bnorm,
    })
}

/// Sparse Cholesky solve. The matrix is symmetric, so its row-compressed
/// arrays double as the column-compressed arrays of the same matrix.
pub fn cholesky_solve(m: &CsrMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = m.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    let symbolic = SymbolicSparseColMatRef::new_checked(n, n, &m.row_ptr, None, &m.col_idx);
    let a = SparseColMatRef::new(symbolic, &m.values);
    let llt = a
        .sp_cholesky(Side::Lower)
        .map_err(|e| Error::Factorization(format!("{e:?}")))?;
    let mut x = b.to_vec();
    llt.solve_in_place_with_conj(Conj::No, MatMut::from_column_major_slice_mut(&mut x, n, 1));
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (*seed >> 11) as f64 / (1u64 << 53) as f64
    }

    /// 2D five-point Laplacian plus a shift, an SPD test matrix.
    fn laplacian(n: usize) -> CsrMatrix {
        let idx = |i: usize, j: usize| i * n + j;
        let mut rows = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let mut r = vec![idx(i, j)];
                if i > 0 {
                    r.push(idx(i - 1, j));
                }
                if i + 1 < n {
                    r.push(idx(i + 1, j));
                }
                if j > 0 {
                    r.push(idx(i, j - 1));
                }
                if j + 1 < n {
                    r.push(idx(i, j + 1));
                }
                r.sort();
                rows.push(r);
            }
        }
        let mut m = CsrMatrix::from_pattern(rows);
        for i in 0..n {
            for j in 0..n {
                m.add(idx(i, j), idx(i, j), 4.0 + 0.01 * (i + j) as f64);
                for (a, b) in [(i.wrapping_sub(1), j), (i + 1, j), (i, j.wrapping_sub(1)), (i, j + 1)] {
                    if a < n && b < n {
                        m.add(idx(i, j), idx(a, b), -1.0);
                    }
                }
            }
        }
        m
    }

    #[test]
    fn dense_round_trip_and_products() {
        let d = vec![vec![2.0, -1.0, 0.0], vec![-1.0, 2.0, -1.0], vec![0.0, -1.0, 2.0]];
        let m = CsrMatrix::from_dense(&d);
        assert_eq!(m.nnz(), 7);
        assert_eq!(m.to_dense(), d);
        assert_eq!(m.apply(&[1.0, 1.0, 1.0]), vec![1.0, 0.0, 1.0]);
        assert!(m.is_structurally_symmetric());
        assert_eq!(m.asymmetry(), 0.0);
        assert_eq!(m.get(0, 2), 0.0);
    }

    #[test]
    fn both_solvers_recover_a_known_solution() {
        let m = laplacian(30);
        let mut s = 3;
        let x0: Vec<f64> = (0..m.dim()).map(|_| lcg(&mut s) - 0.5).collect();
        let b = m.apply(&x0);
        let rel = |x: &[f64]| norm(&x.iter().zip(&x0).map(|(a, b)| a - b).collect::<Vec<_>>()) / norm(&x0);

        let xd = cholesky_solve(&m, &b).unwrap();
        assert!(rel(&xd) < 1e-12);
        let (xc, its) = pcg(&m, &b, 1e-12, 10_000).unwrap();
        assert!(its > 0);
        assert!(rel(&xc) < 1e-8);
        let diff: f64 = xc.iter().zip(&xd).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(diff / xd.iter().fold(0.0f64, |m, v| m.max(v.abs())) < 1e-8);
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let m = laplacian(5);
        let b = vec![0.0; m.dim()];
        for kind in [SolverKind::Direct, SolverKind::Cg] {
            let cfg = SolverConfig {
                kind,
                ..SolverConfig::default()
            };
            let (x, _) = solve(&m, &b, &cfg).unwrap();
            assert!(x.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn cg_reports_non_convergence() {
        let m = laplacian(20);
        let b = vec![1.0; m.dim()];
        match pcg(&m, &b, 1e-14, 2) {
            Err(Error::SolverDiverged { iterations, residual }) => {
                assert_eq!(iterations, 2);
                assert!(residual > 1e-14);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn indefinite_matrix_fails_to_factor() {
        let m = CsrMatrix::from_dense(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        assert!(matches!(cholesky_solve(&m, &[1.0, 1.0]), Err(Error::Factorization(_))));
    }
}
