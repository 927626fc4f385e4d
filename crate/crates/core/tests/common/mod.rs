//! Dense reference assembly, written from scratch: barycentric Lagrange
//! bases, a collapsed Gauss rule and a global-coordinate dof lookup.

#![allow(dead_code)]

use lsfem::assembly::{Formulation, Spaces};
use lsfem::mesh::Mesh;
use lsfem::problems::BenchmarkProblem;

type P = [f64; 2];

/// 3×3 Gauss–Legendre on the square collapsed onto the reference triangle.
/// Exact for polynomials of total degree 4 (and more).
pub fn collapsed_gauss() -> Vec<(P, f64)> {
    let s = (0.6f64).sqrt();
    let g = [(-s, 5.0 / 9.0), (0.0, 8.0 / 9.0), (s, 5.0 / 9.0)];
    let mut out = Vec::new();
    for &(a, wa) in &g {
        for &(b, wb) in &g {
            let u = 0.5 * (a + 1.0);
            let v = 0.5 * (b + 1.0);
            // (u, v) ∈ [0,1]² ↦ (u, v(1 − u)), Jacobian (1 − u)
            out.push(([u, v * (1.0 - u)], 0.25 * wa * wb * (1.0 - u)));
        }
    }
    out
}

fn barycentric(t: [P; 3], x: P) -> ([f64; 3], [P; 3]) {
    let det = (t[1][0] - t[0][0]) * (t[2][1] - t[0][1]) - (t[2][0] - t[0][0]) * (t[1][1] - t[0][1]);
    let mut grads = [[0.0; 2]; 3];
    let mut lam = [0.0; 3];
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        // λ_i vanishes on the opposite edge (t_j, t_k)
        grads[i] = [(t[j][1] - t[k][1]) / det, (t[k][0] - t[j][0]) / det];
        lam[i] = ((t[j][0] - x[0]) * (t[k][1] - x[1]) - (t[k][0] - x[0]) * (t[j][1] - x[1])) / det;
    }
    (lam, grads)
}

/// Nodes, values and gradients of the degree-1 or degree-2 Lagrange basis.
pub fn lagrange(degree: usize, t: [P; 3], x: P) -> (Vec<P>, Vec<f64>, Vec<P>) {
    let (l, g) = barycentric(t, x);
    let mut nodes: Vec<P> = t.to_vec();
    let mut val = Vec::new();
    let mut grad = Vec::new();
    match degree {
        1 => {
            val.extend(l);
            grad.extend(g);
        }
        2 => {
            for i in 0..3 {
                val.push(l[i] * (2.0 * l[i] - 1.0));
                let c = 4.0 * l[i] - 1.0;
                grad.push([c * g[i][0], c * g[i][1]]);
            }
            for (i, j) in [(0, 1), (1, 2), (2, 0)] {
                nodes.push([0.5 * (t[i][0] + t[j][0]), 0.5 * (t[i][1] + t[j][1])]);
                val.push(4.0 * l[i] * l[j]);
                grad.push([
                    4.0 * (l[i] * g[j][0] + l[j] * g[i][0]),
                    4.0 * (l[i] * g[j][1] + l[j] * g[i][1]),
                ]);
            }
        }
        _ => panic!("oracle covers degrees 1 and 2"),
    }
    (nodes, val, grad)
}

fn find(coords: &[P], p: P) -> usize {
    coords
        .iter()
        .position(|c| (c[0] - p[0]).abs() < 1e-12 && (c[1] - p[1]).abs() < 1e-12)
        .expect("node not found")
}

/// Dense matrix of `(v,τ),(w,ρ) ↦ Σ_K ∫_K w_K (A:∇τ)(A:∇ρ) + (τ − ∇v)·(ρ − ∇w)`
/// over all unknowns, numbered like the library's block layout.
pub fn dense_matrix(mesh: &Mesh, problem: &BenchmarkProblem, formulation: Formulation, degree: usize) -> Vec<Vec<f64>> {
    let spaces = Spaces::new(mesh, formulation, degree).unwrap();
    let layout = &spaces.layout;
    let n = layout.total();
    let sdeg = match formulation {
        Formulation::L2 => 1,
        Formulation::Weighted => degree - 1,
    };
    let mut m = vec![vec![0.0; n]; n];
    let rule = collapsed_gauss();
    for k in 0..mesh.num_triangles() {
        let t = mesh.corners(k);
        let e = |a: P, b: P| (a[0] - b[0]).hypot(a[1] - b[1]);
        let h = e(t[0], t[1]).max(e(t[1], t[2])).max(e(t[2], t[0]));
        let w = match formulation {
            Formulation::L2 => 1.0,
            Formulation::Weighted => h * h,
        };
        let area = 0.5 * ((t[1][0] - t[0][0]) * (t[2][1] - t[0][1]) - (t[2][0] - t[0][0]) * (t[1][1] - t[0][1])).abs();
        for &(r, wq) in &rule {
            let x = [
                t[0][0] + r[0] * (t[1][0] - t[0][0]) + r[1] * (t[2][0] - t[0][0]),
                t[0][1] + r[0] * (t[1][1] - t[0][1]) + r[1] * (t[2][1] - t[0][1]),
            ];
            let dx = 2.0 * area * wq;
            let a = problem.a(x).unwrap();
            // each unknown contributes (τ − ∇v) and A:∇τ at x
            let mut rows: Vec<(usize, [f64; 3])> = Vec::new();
            let (un, _, ug) = lagrange(degree, t, x);
            for (i, p) in un.iter().enumerate() {
                let g = layout.u_offset() + find(spaces.u.coordinates(), *p);
                rows.push((g, [-ug[i][0], -ug[i][1], 0.0]));
            }
            let (sn, sv, sg) = lagrange(sdeg, t, x);
            for (i, p) in sn.iter().enumerate() {
                let s = find(spaces.sigma.coordinates(), *p);
                let c0 = a[0][0] * sg[i][0] + a[0][1] * sg[i][1];
                let c1 = a[1][0] * sg[i][0] + a[1][1] * sg[i][1];
                rows.push((layout.sigma_offset(0) + s, [sv[i], 0.0, c0]));
                rows.push((layout.sigma_offset(1) + s, [0.0, sv[i], c1]));
            }
            for (gi, ri) in &rows {
                for (gj, rj) in &rows {
                    m[*gi][*gj] += dx * (ri[0] * rj[0] + ri[1] * rj[1] + w * ri[2] * rj[2]);
                }
            }
        }
    }
    m
}

/// Largest entrywise difference between the library matrix and the oracle.
pub fn oracle_mismatch(mesh: &Mesh, problem: &BenchmarkProblem, formulation: Formulation, degree: usize) -> f64 {
    let (lib, _) = lsfem::assembly::assemble_full(mesh, problem, formulation, degree).unwrap();
    let dense = dense_matrix(mesh, problem, formulation, degree);
    assert_eq!(lib.dim(), dense.len());
    let got = lib.to_dense();
    let mut worst = 0.0f64;
    for i in 0..dense.len() {
        for j in 0..dense.len() {
            worst = worst.max((got[i][j] - dense[i][j]).abs());
        }
    }
    worst
}

/// Deterministic uniform numbers in [-1, 1).
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 52) as f64 - 1.0
    }
}
