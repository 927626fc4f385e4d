//! Least-squares system assembly and solution.
//!
//! Unknowns are `(u, σ₁, σ₂)` with `u ∈ S_k` and `σ ∈ S_{k−1}²` (weighted) or
//! `S_1²` (l2). On each element `K` with weight `w_K` the bilinear form is
//! `(ρ − ∇w, τ − ∇v)_K + w_K (A:∇ρ, A:∇τ)_K` and the load is
//! `−w_K (f, A:∇τ)_K`.

use std::fmt;
use std::str::FromStr;

use crate::dofmap::{BlockLayout, DofMap};
use crate::elements::{ElementMap, ReferenceBasis, Tabulation, Vec2};
use crate::error::{Error, Result};
use crate::linalg::{self, CsrMatrix, SolveStats, SolverConfig};
use crate::mesh::Mesh;
use crate::problems::BenchmarkProblem;
use crate::quadrature::{rule_for_degree, QuadRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Formulation {
    /// PDE residual weighted by `h_K²`, `u ∈ S_k`, `σ ∈ S_{k−1}²`, k ∈ {2, 3}.
    Weighted,
    /// Unweighted, `u ∈ S_1`, `σ ∈ S_1²`.
    L2,
}

impl Formulation {
    pub fn name(self) -> &'static str {
        match self {
            Self::Weighted => "weighted",
            Self::L2 => "l2",
        }
    }

    pub fn check_degree(self, degree: usize) -> Result<()> {
        let ok = match self {
            Self::Weighted => degree == 2 || degree == 3,
            Self::L2 => degree == 1,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::FormulationDegree {
                formulation: self.name(),
                degree,
            })
        }
    }

    pub fn sigma_degree(self, degree: usize) -> usize {
        match self {
            Self::Weighted => degree - 1,
            Self::L2 => 1,
        }
    }

    /// Element weight `w_K` of the PDE residual term.
    pub fn weight(self, h: f64) -> f64 {
        match self {
            Self::Weighted => h * h,
            Self::L2 => 1.0,
        }
    }
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Formulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weighted" => Ok(Self::Weighted),
            "l2" => Ok(Self::L2),
            _ => Err(Error::UnknownName {
                kind: "formulation",
                name: s.to_string(),
            }),
        }
    }
}

/// Quadrature degree for system assembly.
pub fn assembly_rule_degree(degree: usize) -> usize {
    2 * degree + 4
}

/// Discrete spaces of one formulation on one mesh.
#[derive(Debug, Clone)]
pub struct Spaces {
    pub formulation: Formulation,
    pub degree: usize,
    pub u: DofMap,
    pub sigma: DofMap,
    pub layout: BlockLayout,
}

impl Spaces {
    pub fn new(mesh: &Mesh, formulation: Formulation, degree: usize) -> Result<Self> {
        formulation.check_degree(degree)?;
        let u = DofMap::new(mesh, degree)?;
        let sigma = DofMap::new(mesh, formulation.sigma_degree(degree))?;
        let layout = BlockLayout::new(&u, &sigma);
        Ok(Self {
            formulation,
            degree,
            u,
            sigma,
            layout,
        })
    }

    /// Global indices of all unknowns of triangle `k`: u, then σ₁, then σ₂.
    pub fn cell_unknowns(&self, k: usize, out: &mut Vec<usize>) {
        out.clear();
        out.extend_from_slice(self.u.cell_dofs(k));
        for c in 0..2 {
            let off = self.layout.sigma_offset(c);
            out.extend(self.sigma.cell_dofs(k).iter().map(|&g| g + off));
        }
    }
}

#[derive(Debug, Clone)]
pub struct SparseSystem {
    /// Matrix over the free unknowns, in the order of `layout.free()`.
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub spaces: Spaces,
    /// Dirichlet values at `layout.constrained()`.
    pub lift: Vec<f64>,
}

impl SparseSystem {
    pub fn formulation(&self) -> Formulation {
        self.spaces.formulation
    }

    pub fn layout(&self) -> &BlockLayout {
        &self.spaces.layout
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionPair {
    /// Coefficients over all `S_k` DOFs, boundary values included.
    pub u: Vec<f64>,
    pub sigma: [Vec<f64>; 2],
}

impl SolutionPair {
    pub fn zeros(spaces: &Spaces) -> Self {
        let ns = spaces.sigma.total_dofs();
        Self {
            u: vec![0.0; spaces.u.total_dofs()],
            sigma: [vec![0.0; ns], vec![0.0; ns]],
        }
    }

    /// Nodal interpolants `(Π u, Π ∇u)` of the exact solution.
    pub fn interpolate(spaces: &Spaces, problem: &BenchmarkProblem) -> Result<Self> {
        let u = spaces.u.interpolate(|p| problem.exact.value(p))?;
        let s0 = spaces.sigma.interpolate(|p| Ok(problem.exact.gradient(p)?[0]))?;
        let s1 = spaces.sigma.interpolate(|p| Ok(problem.exact.gradient(p)?[1]))?;
        Ok(Self { u, sigma: [s0, s1] })
    }

    pub fn from_global(spaces: &Spaces, x: &[f64]) -> Self {
        let l = &spaces.layout;
        let (nu, ns) = (l.u_dofs, l.sigma_dofs);
        Self {
            u: x[..nu].to_vec(),
            sigma: [x[nu..nu + ns].to_vec(), x[nu + ns..nu + 2 * ns].to_vec()],
        }
    }

    pub fn to_global(&self) -> Vec<f64> {
        let mut x = self.u.clone();
        x.extend_from_slice(&self.sigma[0]);
        x.extend_from_slice(&self.sigma[1]);
        x
    }
}

/// Per-point data shared by the element kernels.
pub(crate) struct ElementTables {
    pub rule: &'static QuadRule,
    pub u: Tabulation,
    pub sigma: Tabulation,
}

impl ElementTables {
    pub fn new(spaces: &Spaces, rule_degree: usize) -> Result<Self> {
        let rule = rule_for_degree(rule_degree)?;
        let u = ReferenceBasis::new(spaces.u.degree())?.tabulate(&rule.points);
        let sigma = ReferenceBasis::new(spaces.sigma.degree())?.tabulate(&rule.points);
        Ok(Self { rule, u, sigma })
    }
}

/// Local matrix and load vector of triangle `k`, over `cell_unknowns` order.
fn element_system(
    mesh: &Mesh,
    problem: &BenchmarkProblem,
    spaces: &Spaces,
    tables: &ElementTables,
    k: usize,
    kmat: &mut [f64],
    kvec: &mut [f64],
) -> Result<()> {
    let map = ElementMap::new(mesh.corners(k))?;
    let w = spaces.formulation.weight(mesh.element_diameter(k)?);
    let sw = w.sqrt();
    let nu = tables.u.basis_count();
    let ns = tables.sigma.basis_count();
    let n = nu + 2 * ns;
    kmat[..n * n].fill(0.0);
    kvec[..n].fill(0.0);
    // residual vectors (r₁ₓ, r₁ᵧ, √w r₂) of every local unknown
    let mut res = vec![[0.0f64; 3]; n];
    let jac = map.det().abs();
    for (q, (p, wq)) in tables.rule.iter().enumerate() {
        let x = map.apply(p);
        let a = problem.a(x)?;
        let f = problem.f(x)?;
        let dx = wq * jac;
        let eu = tables.u.at(q);
        for i in 0..nu {
            let g = map.push_gradient(eu.grads[i]);
            res[i] = [-g[0], -g[1], 0.0];
        }
        let es = tables.sigma.at(q);
        for i in 0..ns {
            let psi = es.values[i];
            let g = map.push_gradient(es.grads[i]);
            res[nu + i] = [psi, 0.0, sw * (a[0][0] * g[0] + a[0][1] * g[1])];
            res[nu + ns + i] = [0.0, psi, sw * (a[1][0] * g[0] + a[1][1] * g[1])];
        }
        for i in 0..n {
            let ri = res[i];
            if ri == [0.0; 3] {
                continue;
            }
            kvec[i] -= dx * sw * f * ri[2];
            let row = &mut kmat[i * n..(i + 1) * n];
            for (j, rj) in res.iter().enumerate() {
                row[j] += dx * (ri[0] * rj[0] + ri[1] * rj[1] + ri[2] * rj[2]);
            }
        }
    }
    Ok(())
}

/// Sparsity pattern coupling all unknowns that share a triangle. `index`
/// maps global unknowns to rows (None = eliminated).
fn pattern(mesh: &Mesh, spaces: &Spaces, index: &dyn Fn(usize) -> Option<usize>, n: usize) -> CsrMatrix {
    let mut rows: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut cell = Vec::new();
    let mut local = Vec::new();
    for k in 0..mesh.num_triangles() {
        spaces.cell_unknowns(k, &mut cell);
        local.clear();
        local.extend(cell.iter().filter_map(|&g| index(g)));
        for &i in &local {
            rows[i].extend_from_slice(&local);
        }
    }
    for r in &mut rows {
        r.sort_unstable();
        r.dedup();
    }
    CsrMatrix::from_pattern(rows)
}

/// Matrix and load over every unknown, before boundary elimination.
pub fn assemble_full(mesh: &Mesh, problem: &BenchmarkProblem, formulation: Formulation, degree: usize) -> Result<(CsrMatrix, Vec<f64>)> {
    let spaces = Spaces::new(mesh, formulation, degree)?;
    let n = spaces.layout.total();
    let mut m = pattern(mesh, &spaces, &|g| Some(g), n);
    let mut b = vec![0.0; n];
    let tables = ElementTables::new(&spaces, assembly_rule_degree(degree))?;
    let nl = tables.u.basis_count() + 2 * tables.sigma.basis_count();
    let (mut kmat, mut kvec) = (vec![0.0; nl * nl], vec![0.0; nl]);
    let mut cell = Vec::new();
    for k in 0..mesh.num_triangles() {
        element_system(mesh, problem, &spaces, &tables, k, &mut kmat, &mut kvec)?;
        spaces.cell_unknowns(k, &mut cell);
        for (i, &gi) in cell.iter().enumerate() {
            b[gi] += kvec[i];
            for (j, &gj) in cell.iter().enumerate() {
                m.add(gi, gj, kmat[i * nl + j]);
            }
        }
    }
    Ok((m, b))
}

/// Assembles the system over the free unknowns. Boundary values of `u` are
/// the nodal interpolant of `g`, moved to the right-hand side.
pub fn assemble(mesh: &Mesh, problem: &BenchmarkProblem, formulation: Formulation, degree: usize) -> Result<SparseSystem> {
    let spaces = Spaces::new(mesh, formulation, degree)?;
    let layout = &spaces.layout;
    let coords = spaces.u.coordinates();
    let lift = layout
        .constrained()
        .iter()
        .map(|&g| problem.g(coords[g]))
        .collect::<Result<Vec<_>>>()?;
    let mut lift_of = vec![0.0; layout.u_dofs];
    for (&g, &v) in layout.constrained().iter().zip(&lift) {
        lift_of[g] = v;
    }

    let nfree = layout.num_free();
    let mut m = pattern(mesh, &spaces, &|g| layout.free_index(g), nfree);
    let mut b = vec![0.0; nfree];
    let tables = ElementTables::new(&spaces, assembly_rule_degree(degree))?;
    let nl = tables.u.basis_count() + 2 * tables.sigma.basis_count();
    let (mut kmat, mut kvec) = (vec![0.0; nl * nl], vec![0.0; nl]);
    let mut cell = Vec::new();
    let mut rows = Vec::with_capacity(nl);
    for k in 0..mesh.num_triangles() {
        element_system(mesh, problem, &spaces, &tables, k, &mut kmat, &mut kvec)?;
        spaces.cell_unknowns(k, &mut cell);
        rows.clear();
        rows.extend(cell.iter().map(|&g| layout.free_index(g)));
        for (i, ri) in rows.iter().enumerate() {
            let Some(ri) = *ri else { continue };
            b[ri] += kvec[i];
            for (j, rj) in rows.iter().enumerate() {
                let v = kmat[i * nl + j];
                match rj {
                    Some(rj) => m.add(ri, *rj, v),
                    None => b[ri] -= v * lift_of[cell[j]],
                }
            }
        }
    }
    Ok(SparseSystem {
        matrix: m,
        rhs: b,
        spaces,
        lift,
    })
}

/// Solves the assembled system and re-inserts the Dirichlet values.
pub fn solve_ls(system: &SparseSystem, cfg: &SolverConfig) -> Result<(SolutionPair, SolveStats)> {
    let (xf, stats) = linalg::solve(&system.matrix, &system.rhs, cfg)?;
    let layout = system.layout();
    let mut x = vec![0.0; layout.total()];
    for (&g, &v) in layout.free().iter().zip(&xf) {
        x[g] = v;
    }
    for (&g, &v) in layout.constrained().iter().zip(&system.lift) {
        x[g] = v;
    }
    Ok((SolutionPair::from_global(&system.spaces, &x), stats))
}

/// Evaluates `(u_h, σ_h, ∇u_h, ∇σ_h)` of a discrete pair at one reference
/// point of triangle `k`. Returns `(u, ∇u, σ, ∇σ)` with `∇σ[c] = ∇σ_c`.
pub(crate) fn eval_pair(
    spaces: &Spaces,
    tables: &ElementTables,
    map: &ElementMap,
    k: usize,
    q: usize,
    sol: &SolutionPair,
) -> (f64, Vec2, Vec2, [Vec2; 2]) {
    let eu = tables.u.at(q);
    let (mut u, mut gu) = (0.0, [0.0; 2]);
    for (i, &g) in spaces.u.cell_dofs(k).iter().enumerate() {
        let c = sol.u[g];
        u += c * eu.values[i];
        gu[0] += c * eu.grads[i][0];
        gu[1] += c * eu.grads[i][1];
    }
    let es = tables.sigma.at(q);
    let mut s = [0.0; 2];
    let mut gs = [[0.0; 2]; 2];
    for (i, &g) in spaces.sigma.cell_dofs(k).iter().enumerate() {
        for c in 0..2 {
            let v = sol.sigma[c][g];
            s[c] += v * es.values[i];
            gs[c][0] += v * es.grads[i][0];
            gs[c][1] += v * es.grads[i][1];
        }
    }
    (u, map.push_gradient(gu), s, [map.push_gradient(gs[0]), map.push_gradient(gs[1])])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::DomainId;
    use crate::problems::{BenchmarkName, Coefficient, ExactSolution};

    fn laplace_on(domain: DomainId) -> BenchmarkProblem {
        BenchmarkProblem::new("t", domain, Coefficient::Identity, ExactSolution::SineProduct)
    }

    #[test]
    fn formulation_degree_pairs() {
        assert!(Formulation::L2.check_degree(1).is_ok());
        assert!(Formulation::L2.check_degree(2).is_err());
        assert!(Formulation::Weighted.check_degree(1).is_err());
        assert!(Formulation::Weighted.check_degree(3).is_ok());
        assert_eq!("l2".parse::<Formulation>().unwrap(), Formulation::L2);
        assert!("h1".parse::<Formulation>().is_err());
        let m = Mesh::initial(DomainId::TwoTriangle);
        let p = laplace_on(DomainId::UnitSquare);
        assert!(matches!(
            assemble(&m, &p, Formulation::L2, 2),
            Err(Error::FormulationDegree { degree: 2, .. })
        ));
    }

    #[test]
    fn zero_data_gives_zero_rhs() {
        let m = Mesh::initial(DomainId::UnitSquareCentered).uniform_refine();
        let p = BenchmarkProblem::new("zero", DomainId::UnitSquareCentered, Coefficient::A1, ExactSolution::Zero);
        for (f, k) in [(Formulation::L2, 1), (Formulation::Weighted, 2), (Formulation::Weighted, 3)] {
            let s = assemble(&m, &p, f, k).unwrap();
            assert!(s.rhs.iter().all(|&v| v == 0.0));
            let (sol, _) = solve_ls(&s, &SolverConfig::default()).unwrap();
            assert!(sol.to_global().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn symmetric_and_positive_definite() {
        let m = Mesh::initial(DomainId::UnitSquareCentered).uniform_refine().uniform_refine();
        let p = BenchmarkProblem::catalog(BenchmarkName::SmoothA1);
        let mut seed = 11u64;
        for (f, k) in [(Formulation::L2, 1), (Formulation::Weighted, 2), (Formulation::Weighted, 3)] {
            let s = assemble(&m, &p, f, k).unwrap();
            assert!(s.matrix.is_structurally_symmetric());
            assert!(s.matrix.asymmetry() <= 1e-13 * s.matrix.max_abs());
            for _ in 0..20 {
                let x: Vec<f64> = (0..s.matrix.dim())
                    .map(|_| {
                        seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                        (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
                    })
                    .collect();
                let mx = s.matrix.apply(&x);
                assert!(x.iter().zip(&mx).map(|(a, b)| a * b).sum::<f64>() > 0.0);
            }
        }
    }

    /// Scaling a mesh by 2 scales `(∇w, ∇v)` by 1, `(∇w, τ)` by 2, `(ρ, τ)` by 4,
    /// and the weighted `(A:∇ρ, A:∇τ)` term by `h² · 1 = 4`.
    #[test]
    fn scaled_mesh_block_ratios() {
        let m1 = Mesh::initial(DomainId::TwoTriangle);
        let mut m2 = m1.clone();
        for v in &mut m2.vertices {
            *v = [2.0 * v[0], 2.0 * v[1]];
        }
        let p = BenchmarkProblem::new("z", DomainId::TwoTriangle, Coefficient::Identity, ExactSolution::Zero);
        let (a1, _) = assemble_full(&m1, &p, Formulation::Weighted, 2).unwrap();
        let (a2, _) = assemble_full(&m2, &p, Formulation::Weighted, 2).unwrap();
        let sp = Spaces::new(&m1, Formulation::Weighted, 2).unwrap();
        let l = &sp.layout;
        for i in 0..l.total() {
            for (j, v1) in a1.row(i) {
                let v2 = a2.get(i, j);
                let expect = match (l.block_of(i) == 0, l.block_of(j) == 0) {
                    (true, true) => 1.0,
                    (true, false) | (false, true) => 2.0,
                    (false, false) => 4.0,
                };
                assert!((v2 - expect * v1).abs() <= 1e-12 * v1.abs().max(1.0), "({i},{j}) {v1} {v2}");
            }
        }
    }

    /// `u = x² − y²` with `A = I` lies in the weighted discrete space for k ≥ 2
    /// (f = 0, σ = ∇u ∈ S₁²), so the solve must reproduce it.
    #[test]
    fn reproduces_discrete_solutions() {
        let ex = ExactSolution::Quadratic([0.0, 0.0, 0.0, 1.0, 0.0, -1.0]);
        let p = BenchmarkProblem::new("q", DomainId::UnitSquare, Coefficient::Identity, ex);
        let m = Mesh::initial(DomainId::UnitSquare).uniform_refine();
        for k in [2, 3] {
            let s = assemble(&m, &p, Formulation::Weighted, k).unwrap();
            let (sol, _) = solve_ls(&s, &SolverConfig::default()).unwrap();
            let exact = SolutionPair::interpolate(&s.spaces, &p).unwrap();
            let err = sol
                .to_global()
                .iter()
                .zip(exact.to_global())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(err < 1e-10, "k={k}: {err}");
        }
    }

    #[test]
    fn galerkin_residual_and_solver_agreement() {
        let m = Mesh::initial(DomainId::UnitSquareCentered).uniform_refine().uniform_refine();
        let p = BenchmarkProblem::catalog(BenchmarkName::SmoothA1);
        let s = assemble(&m, &p, Formulation::Weighted, 2).unwrap();
        let direct = SolverConfig {
            kind: linalg::SolverKind::Direct,
            ..SolverConfig::default()
        };
        let cg = SolverConfig {
            kind: linalg::SolverKind::Cg,
            ..SolverConfig::default()
        };
        let (xd, sd) = solve_ls(&s, &direct).unwrap();
        let (xc, sc) = solve_ls(&s, &cg).unwrap();
        assert!(sd.direct && !sc.direct);
        assert!(sd.relative_residual <= 1e-9);
        assert!(sc.relative_residual <= 1e-9);
        let (xd, xc) = (xd.to_global(), xc.to_global());
        let scale = xd.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let diff = xd.iter().zip(&xc).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(diff <= 1e-8 * scale, "{diff}");
    }

    #[test]
    fn boundary_values_are_interpolated_data() {
        let p = BenchmarkProblem::catalog(BenchmarkName::SingularR74);
        let m = Mesh::initial(p.domain).uniform_refine();
        let s = assemble(&m, &p, Formulation::Weighted, 2).unwrap();
        let (sol, _) = solve_ls(&s, &SolverConfig::default()).unwrap();
        for &g in s.layout().constrained() {
            assert_eq!(sol.u[g], p.g(s.spaces.u.coordinates()[g]).unwrap());
        }
    }
}
