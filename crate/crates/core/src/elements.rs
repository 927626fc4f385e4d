//! Lagrange bases of degree 1–3 on the reference triangle and the affine
//! reference-to-physical element map.
//!
//! Local node order: the three vertices `(0,0), (1,0), (0,1)`, then the edge
//! nodes edge by edge, then (k = 3) the barycenter. Local edge `e` joins
//! vertex `(e+1) % 3` to vertex `(e+2) % 3`, i.e. it is opposite vertex `e`.
//! For k = 3 the two nodes of an edge are listed from its first endpoint to
//! its second.

use crate::error::{Error, Result};

pub type Vec2 = [f64; 2];
pub type Mat2 = [[f64; 2]; 2];

/// Endpoints (local vertex indices) of local edge `e`.
pub const fn edge_vertices(e: usize) -> (usize, usize) {
    ((e + 1) % 3, (e + 2) % 3)
}

pub fn node_count(degree: usize) -> usize {
    (degree + 1) * (degree + 2) / 2
}

/// Barycentric derivative data of one basis function: value, `∂/∂λᵢ` and
/// `∂²/∂λᵢ∂λⱼ`.
type BaryJet = (f64, [f64; 3], [[f64; 3]; 3]);

#[derive(Debug, Clone)]
pub struct ReferenceBasis {
    degree: usize,
    nodes: Vec<Vec2>,
}

/// Values and reference derivatives of every basis function at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisEval {
    pub values: Vec<f64>,
    pub grads: Vec<Vec2>,
    pub hessians: Vec<Mat2>,
}

impl ReferenceBasis {
    pub fn new(degree: usize) -> Result<Self> {
        if !(1..=3).contains(&degree) {
            return Err(Error::UnsupportedDegree(degree));
        }
        let verts = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let mut nodes = verts.to_vec();
        for e in 0..3 {
            let (a, b) = edge_vertices(e);
            let (pa, pb) = (verts[a], verts[b]);
            for j in 1..degree {
                let t = j as f64 / degree as f64;
                nodes.push([pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])]);
            }
        }
        if degree == 3 {
            nodes.push([1.0 / 3.0, 1.0 / 3.0]);
        }
        Ok(Self { degree, nodes })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[Vec2] {
        &self.nodes
    }

    pub fn eval(&self, point: Vec2) -> BasisEval {
        let lam = [1.0 - point[0] - point[1], point[0], point[1]];
        let n = self.node_count();
        let mut out = BasisEval {
            values: Vec::with_capacity(n),
            grads: Vec::with_capacity(n),
            hessians: Vec::with_capacity(n),
        };
        for i in 0..n {
            let (v, d, h) = self.bary_jet(i, lam);
            // ∂λ/∂ξ = (−1, 1, 0), ∂λ/∂η = (−1, 0, 1)
            let g = [[-1.0, 1.0, 0.0], [-1.0, 0.0, 1.0]];
            let mut grad = [0.0; 2];
            let mut hess = [[0.0; 2]; 2];
            for r in 0..2 {
                grad[r] = (0..3).map(|a| g[r][a] * d[a]).sum();
                for c in 0..2 {
                    let mut s = 0.0;
                    for a in 0..3 {
                        for b in 0..3 {
                            s += g[r][a] * h[a][b] * g[c][b];
                        }
                    }
                    hess[r][c] = s;
                }
            }
            out.values.push(v);
            out.grads.push(grad);
            out.hessians.push(hess);
        }
        out
    }

    fn bary_jet(&self, i: usize, lam: [f64; 3]) -> BaryJet {
        let mut d = [0.0; 3];
        let mut h = [[0.0; 3]; 3];
        match (self.degree, i) {
            (1, i) => {
                d[i] = 1.0;
                (lam[i], d, h)
            }
            (2, i) if i < 3 => {
                let l = lam[i];
                d[i] = 4.0 * l - 1.0;
                h[i][i] = 4.0;
                (l * (2.0 * l - 1.0), d, h)
            }
            (2, i) => {
                let (a, b) = edge_vertices(i - 3);
                d[a] = 4.0 * lam[b];
                d[b] = 4.0 * lam[a];
                h[a][b] = 4.0;
                h[b][a] = 4.0;
                (4.0 * lam[a] * lam[b], d, h)
            }
            (3, i) if i < 3 => {
                let l = lam[i];
                d[i] = 0.5 * (27.0 * l * l - 18.0 * l + 2.0);
                h[i][i] = 27.0 * l - 9.0;
                (0.5 * l * (3.0 * l - 1.0) * (3.0 * l - 2.0), d, h)
            }
            (3, 9) => {
                let [l0, l1, l2] = lam;
                d = [27.0 * l1 * l2, 27.0 * l0 * l2, 27.0 * l0 * l1];
                h = [[0.0, 27.0 * l2, 27.0 * l1], [27.0 * l2, 0.0, 27.0 * l0], [27.0 * l1, 27.0 * l0, 0.0]];
                (27.0 * l0 * l1 * l2, d, h)
            }
            (3, i) => {
                // node near `p` on the edge (p, q): 9/2 λp λq (3λp − 1)
                let (a, b) = edge_vertices((i - 3) / 2);
                let (p, q) = if (i - 3) % 2 == 0 { (a, b) } else { (b, a) };
                let (lp, lq) = (lam[p], lam[q]);
                d[p] = 4.5 * (6.0 * lp * lq - lq);
                d[q] = 4.5 * (3.0 * lp * lp - lp);
                h[p][p] = 27.0 * lq;
                h[p][q] = 4.5 * (6.0 * lp - 1.0);
                h[q][p] = h[p][q];
                (4.5 * lp * lq * (3.0 * lp - 1.0), d, h)
            }
            _ => unreachable!("degree validated at construction"),
        }
    }

    /// Tabulates the basis at every point of a rule.
    pub fn tabulate(&self, points: &[Vec2]) -> Tabulation {
        let evals = points.iter().map(|&p| self.eval(p)).collect();
        Tabulation {
            n: self.node_count(),
            evals,
        }
    }
}

/// Basis data at a fixed list of reference points.
#[derive(Debug, Clone)]
pub struct Tabulation {
    n: usize,
    evals: Vec<BasisEval>,
}

impl Tabulation {
    pub fn basis_count(&self) -> usize {
        self.n
    }

    pub fn at(&self, q: usize) -> &BasisEval {
        &self.evals[q]
    }
}

/// Affine map `x = p₀ + J ξ` from the reference triangle onto a physical one.
#[derive(Debug, Clone, Copy)]
pub struct ElementMap {
    origin: Vec2,
    jac: Mat2,
    inv_t: Mat2,
    det: f64,
}

impl ElementMap {
    pub fn new(v: [Vec2; 3]) -> Result<Self> {
        let jac = [[v[1][0] - v[0][0], v[2][0] - v[0][0]], [v[1][1] - v[0][1], v[2][1] - v[0][1]]];
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        let scale = (jac[0][0].abs() + jac[0][1].abs()).max(jac[1][0].abs() + jac[1][1].abs());
        if !det.is_finite() || det.abs() <= 1e-300 || det.abs() <= 1e-14 * scale * scale {
            return Err(Error::SingularMap { det });
        }
        // J⁻ᵀ = (1/det) [[ j11, −j10], [−j01, j00]]
        let inv_t = [[jac[1][1] / det, -jac[1][0] / det], [-jac[0][1] / det, jac[0][0] / det]];
        Ok(Self {
            origin: v[0],
            jac,
            inv_t,
            det,
        })
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    pub fn jacobian(&self) -> Mat2 {
        self.jac
    }

    pub fn inverse_transpose(&self) -> Mat2 {
        self.inv_t
    }

    pub fn apply(&self, p: Vec2) -> Vec2 {
        [
            self.origin[0] + self.jac[0][0] * p[0] + self.jac[0][1] * p[1],
            self.origin[1] + self.jac[1][0] * p[0] + self.jac[1][1] * p[1],
        ]
    }

    /// `J⁻ᵀ ∇̂φ`
    pub fn push_gradient(&self, g: Vec2) -> Vec2 {
        let m = &self.inv_t;
        [m[0][0] * g[0] + m[0][1] * g[1], m[1][0] * g[0] + m[1][1] * g[1]]
    }

    /// `J⁻ᵀ D̂²φ J⁻¹` (no curvature term for affine maps).
    pub fn push_hessian(&self, h: Mat2) -> Mat2 {
        let m = &self.inv_t;
        let mut tmp = [[0.0; 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                tmp[r][c] = m[r][0] * h[0][c] + m[r][1] * h[1][c];
            }
        }
        let mut out = [[0.0; 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                // (J⁻¹)[k][c] = inv_t[c][k]
                out[r][c] = tmp[r][0] * m[c][0] + tmp[r][1] * m[c][1];
            }
        }
        out
    }
}
