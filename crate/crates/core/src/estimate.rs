//! Element indicators `η_K² = w_K ‖f + A:∇σ_h‖²_K + ‖σ_h − ∇u_h‖²_K` and
//! errors against the exact solution.

use crate::assembly::{eval_pair, ElementTables, Formulation, SolutionPair, Spaces};
use crate::elements::ElementMap;
use crate::error::Result;
use crate::mesh::Mesh;
use crate::problems::{frobenius, BenchmarkProblem};

/// Quadrature degree shared by the indicators and the error norms.
pub fn estimate_rule_degree(degree: usize) -> usize {
    2 * degree + 6
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementIndicator {
    pub eta_sq: Vec<f64>,
    pub eta: f64,
    pub formulation: Formulation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub level: usize,
    /// free unknowns
    pub dofs: usize,
    /// mesh vertices
    pub nodes: usize,
    pub h_max: f64,
    /// least-squares norm `|||(u − u_h, σ − σ_h)|||`
    pub ls: f64,
    pub l2_u: f64,
    pub h1_u: f64,
    pub l2_sigma: f64,
    /// `‖h A:D²_h(u − u_h)‖₀`, k ≥ 2 only
    pub wbh2_a: Option<f64>,
    /// `‖h D²_h(u − u_h)‖₀`, k ≥ 2 only
    pub wbh2: Option<f64>,
    pub eta: f64,
    /// per-element `|||e|||²_K`
    pub ls_sq: Vec<f64>,
}

/// Indicators with the default rule of degree `2k + 6`.
pub fn indicators(mesh: &Mesh, problem: &BenchmarkProblem, spaces: &Spaces, sol: &SolutionPair) -> Result<ElementIndicator> {
    indicators_with_rule(mesh, problem, spaces, sol, estimate_rule_degree(spaces.degree))
}

pub fn indicators_with_rule(
    mesh: &Mesh,
    problem: &BenchmarkProblem,
    spaces: &Spaces,
    sol: &SolutionPair,
    rule_degree: usize,
) -> Result<ElementIndicator> {
    let tables = ElementTables::new(spaces, rule_degree)?;
    let mut eta_sq = Vec::with_capacity(mesh.num_triangles());
    for k in 0..mesh.num_triangles() {
        let map = ElementMap::new(mesh.corners(k))?;
        let w = spaces.formulation.weight(mesh.element_diameter(k)?);
        let jac = map.det().abs();
        let mut s = 0.0;
        for (q, (p, wq)) in tables.rule.iter().enumerate() {
            let x = map.apply(p);
            let (_, gu, sh, gs) = eval_pair(spaces, &tables, &map, k, q, sol);
            let a = problem.a(x)?;
            let pde = problem.f(x)? + frobenius(a, gs);
            let (d0, d1) = (sh[0] - gu[0], sh[1] - gu[1]);
            s += wq * jac * (w * pde * pde + d0 * d0 + d1 * d1);
        }
        eta_sq.push(s);
    }
    let eta = eta_sq.iter().sum::<f64>().sqrt();
    Ok(ElementIndicator {
        eta_sq,
        eta,
        formulation: spaces.formulation,
    })
}

/// The least-squares functional `J(v, τ; f)` evaluated with a rule of the
/// given degree.
pub fn functional(
    mesh: &Mesh,
    problem: &BenchmarkProblem,
    spaces: &Spaces,
    sol: &SolutionPair,
    rule_degree: usize,
) -> Result<f64> {
    Ok(indicators_with_rule(mesh, problem, spaces, sol, rule_degree)?
        .eta_sq
        .iter()
        .sum())
}

/// All error norms against the exact solution, plus the estimator, on the
/// shared rule of degree `2k + 6`.
pub fn error_norms(mesh: &Mesh, problem: &BenchmarkProblem, spaces: &Spaces, sol: &SolutionPair) -> Result<ErrorReport> {
    let tables = ElementTables::new(spaces, estimate_rule_degree(spaces.degree))?;
    let want_h2 = spaces.degree >= 2;
    let nt = mesh.num_triangles();
    let mut ls_sq = Vec::with_capacity(nt);
    let (mut l2u, mut h1u, mut l2s, mut wa, mut wf, mut eta2) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for k in 0..nt {
        let map = ElementMap::new(mesh.corners(k))?;
        let h = mesh.element_diameter(k)?;
        let w = spaces.formulation.weight(h);
        let jac = map.det().abs();
        let cell = spaces.u.cell_dofs(k);
        let mut ls_k = 0.0;
        for (q, (p, wq)) in tables.rule.iter().enumerate() {
            let dx = wq * jac;
            let x = map.apply(p);
            let (uh, guh, sh, gsh) = eval_pair(spaces, &tables, &map, k, q, sol);
            let u = problem.exact.value(x)?;
            let gu = problem.exact.gradient(x)?;
            let hu = problem.exact.hessian(x)?;
            let a = problem.a(x)?;

            let e = u - uh;
            let ge = [gu[0] - guh[0], gu[1] - guh[1]];
            let es = [gu[0] - sh[0], gu[1] - sh[1]];
            l2u += dx * e * e;
            h1u += dx * (ge[0] * ge[0] + ge[1] * ge[1]);
            l2s += dx * (es[0] * es[0] + es[1] * es[1]);

            // A:∇(σ − σ_h) with ∇σ = D²u
            let pde = frobenius(a, hu) - frobenius(a, gsh);
            let (d0, d1) = (es[0] - ge[0], es[1] - ge[1]);
            ls_k += dx * (w * pde * pde + d0 * d0 + d1 * d1);

            let ind = problem.f(x)? + frobenius(a, gsh);
            eta2 += dx * (w * ind * ind + (sh[0] - guh[0]).powi(2) + (sh[1] - guh[1]).powi(2));

            if want_h2 {
                let eu = tables.u.at(q);
                let mut hh = [[0.0; 2]; 2];
                for (i, &g) in cell.iter().enumerate() {
                    let c = sol.u[g];
                    for r in 0..2 {
                        for s in 0..2 {
                            hh[r][s] += c * eu.hessians[i][r][s];
                        }
                    }
                }
                let hh = map.push_hessian(hh);
                let d = [[hu[0][0] - hh[0][0], hu[0][1] - hh[0][1]], [hu[1][0] - hh[1][0], hu[1][1] - hh[1][1]]];
                let ad = frobenius(a, d);
                wa += dx * h * h * ad * ad;
                wf += dx * h * h * frobenius(d, d);
            }
        }
        ls_sq.push(ls_k);
    }
    Ok(ErrorReport {
        level: 0,
        dofs: spaces.layout.num_free(),
        nodes: mesh.num_vertices(),
        h_max: mesh.h_max(),
        ls: ls_sq.iter().sum::<f64>().sqrt(),
        l2_u: l2u.sqrt(),
        h1_u: h1u.sqrt(),
        l2_sigma: l2s.sqrt(),
        wbh2_a: want_h2.then(|| wa.sqrt()),
        wbh2: want_h2.then(|| wf.sqrt()),
        eta: eta2.sqrt(),
        ls_sq,
    })
}
