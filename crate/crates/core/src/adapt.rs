//! Dörfler marking and the solve–estimate–mark–refine loop.

use crate::assembly::{assemble, solve_ls, Formulation, Spaces};
use crate::error::{Error, Result};
use crate::estimate::{error_norms, indicators, ErrorReport};
use crate::linalg::SolverConfig;
use crate::mesh::Mesh;
use crate::problems::BenchmarkProblem;

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptConfig {
    pub theta: f64,
    pub max_levels: usize,
    /// Meshes with more free unknowns than this are not solved.
    pub max_dofs: usize,
    pub stop_eta: f64,
    /// Optional stop once `‖∇(u − u_h)‖₀` drops to this value.
    pub stop_h1: Option<f64>,
    pub solver: SolverConfig,
}

impl Default for AdaptConfig {
    fn default() -> Self {
        Self {
            theta: 0.5,
            max_levels: 30,
            max_dofs: 150_000,
            stop_eta: 0.0,
            stop_h1: None,
            solver: SolverConfig::default(),
        }
    }
}

impl AdaptConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(Error::Config(format!("theta must lie in (0, 1], got {}", self.theta)));
        }
        Ok(())
    }
}

/// Smallest set of elements, taken greedily by decreasing `η_K²` (ties by
/// lower index), whose indicators sum to at least `theta · Σ η_K²`.
/// Returned indices are sorted.
pub fn dorfler_mark(eta_sq: &[f64], theta: f64) -> Vec<usize> {
    let total: f64 = eta_sq.iter().sum();
    let mut order: Vec<usize> = (0..eta_sq.len()).collect();
    order.sort_by(|&a, &b| eta_sq[b].total_cmp(&eta_sq[a]).then(a.cmp(&b)));
    let goal = theta * total;
    let mut marked = Vec::new();
    let mut acc = 0.0;
    for k in order {
        if acc >= goal && !marked.is_empty() || eta_sq[k] <= 0.0 {
            break;
        }
        acc += eta_sq[k];
        marked.push(k);
    }
    marked.sort_unstable();
    marked
}

/// Output of one adaptive run: a report per solved level and the meshes.
#[derive(Debug, Clone)]
pub struct AdaptiveRun {
    pub reports: Vec<ErrorReport>,
    pub meshes: Vec<Mesh>,
}

pub fn adaptive_loop(
    problem: &BenchmarkProblem,
    formulation: Formulation,
    degree: usize,
    config: &AdaptConfig,
) -> Result<AdaptiveRun> {
    adaptive_loop_from(Mesh::initial(problem.domain), problem, formulation, degree, config)
}

pub fn adaptive_loop_from(
    mut mesh: Mesh,
    problem: &BenchmarkProblem,
    formulation: Formulation,
    degree: usize,
    config: &AdaptConfig,
) -> Result<AdaptiveRun> {
    config.validate()?;
    formulation.check_degree(degree)?;
    let mut reports = Vec::new();
    let mut meshes = Vec::new();
    for level in 0..config.max_levels {
        if Spaces::new(&mesh, formulation, degree)?.layout.num_free() > config.max_dofs {
            break;
        }
        let system = assemble(&mesh, problem, formulation, degree)?;
        let (sol, _) = solve_ls(&system, &config.solver)?;
        let mut report = error_norms(&mesh, problem, &system.spaces, &sol)?;
        report.level = level;
        let done = report.eta <= config.stop_eta || config.stop_h1.is_some_and(|t| report.h1_u <= t);
        let next = if done || level + 1 == config.max_levels {
            None
        } else {
            let ind = indicators(&mesh, problem, &system.spaces, &sol)?;
            Some(mesh.bisect(&dorfler_mark(&ind.eta_sq, config.theta))?)
        };
        reports.push(report);
        meshes.push(mesh.clone());
        match next {
            Some(m) => mesh = m,
            None => break,
        }
    }
    Ok(AdaptiveRun { reports, meshes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::BenchmarkName;

    /// Brute force over all subsets: the smallest cardinality reaching the goal.
    fn min_cardinality(eta: &[f64], theta: f64) -> usize {
        let total: f64 = eta.iter().sum();
        (0u32..1 << eta.len())
            .filter(|&s| (0..eta.len()).filter(|i| s >> i & 1 == 1).map(|i| eta[i]).sum::<f64>() >= theta * total)
            .map(|s| s.count_ones() as usize)
            .min()
            .unwrap()
    }

    #[test]
    fn marking_examples() {
        assert_eq!(dorfler_mark(&[9.0, 4.0, 1.0], 0.5), vec![0]);
        assert_eq!(min_cardinality(&[9.0, 4.0, 1.0], 0.5), 1);
        assert_eq!(dorfler_mark(&[1.0; 10], 0.3).len(), 3);
        assert_eq!(dorfler_mark(&[0.5, 0.0, 2.0, 1.0], 1.0), vec![0, 2, 3]);
        // ties go to the lower index
        assert_eq!(dorfler_mark(&[1.0, 3.0, 3.0, 1.0], 0.4), vec![1, 2]);
        assert_eq!(dorfler_mark(&[1.0, 3.0, 3.0, 1.0], 0.3), vec![1]);
    }

    #[test]
    fn marking_is_minimal() {
        let mut s = 5u64;
        for n in 1..12 {
            for theta in [0.1, 0.25, 0.5, 0.8, 1.0] {
                let eta: Vec<f64> = (0..n)
                    .map(|_| {
                        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                        ((s >> 11) as f64 / (1u64 << 53) as f64).powi(3) + 1e-6
                    })
                    .collect();
                let m = dorfler_mark(&eta, theta);
                assert_eq!(m.len(), min_cardinality(&eta, theta), "{eta:?} {theta}");
                let total: f64 = eta.iter().sum();
                let got: f64 = m.iter().map(|&i| eta[i]).sum();
                assert!(got >= theta * total);
                let smallest = m.iter().map(|&i| eta[i]).fold(f64::INFINITY, f64::min);
                assert!(got - smallest < theta * total);
            }
        }
    }

    #[test]
    fn rejects_bad_theta() {
        let p = BenchmarkProblem::catalog(BenchmarkName::SmoothA1);
        for theta in [0.0, -0.5, 1.5, f64::NAN] {
            let cfg = AdaptConfig {
                theta,
                ..AdaptConfig::default()
            };
            assert!(matches!(adaptive_loop(&p, Formulation::L2, 1, &cfg), Err(Error::Config(_))));
        }
    }

    #[test]
    fn loop_grows_and_is_deterministic() {
        let p = BenchmarkProblem::catalog(BenchmarkName::SmoothA1);
        let cfg = AdaptConfig {
            max_levels: 6,
            ..AdaptConfig::default()
        };
        let a = adaptive_loop(&p, Formulation::Weighted, 2, &cfg).unwrap();
        assert_eq!(a.reports.len(), 6);
        for w in a.reports.windows(2) {
            assert!(w[1].dofs > w[0].dofs);
        }
        for m in &a.meshes {
            assert!(m.is_conforming());
        }
        let b = adaptive_loop(&p, Formulation::Weighted, 2, &cfg).unwrap();
        assert_eq!(a.meshes, b.meshes);
    }

    #[test]
    fn stops_on_dofs_and_eta() {
        let p = BenchmarkProblem::catalog(BenchmarkName::SingularR74);
        let cfg = AdaptConfig {
            max_dofs: 400,
            ..AdaptConfig::default()
        };
        let run = adaptive_loop(&p, Formulation::L2, 1, &cfg).unwrap();
        assert!(run.reports.iter().all(|r| r.dofs <= 400));
        assert!(run.reports.len() > 1);

        let cfg = AdaptConfig {
            stop_eta: f64::INFINITY,
            ..AdaptConfig::default()
        };
        assert_eq!(adaptive_loop(&p, Formulation::L2, 1, &cfg).unwrap().reports.len(), 1);
    }

    #[test]
    fn corner_refinement_on_l_shape() {
        let p = BenchmarkProblem::catalog(BenchmarkName::LshapeA5);
        let cfg = AdaptConfig {
            max_levels: 12,
            ..AdaptConfig::default()
        };
        let run = adaptive_loop(&p, Formulation::L2, 1, &cfg).unwrap();
        let m = run.meshes.last().unwrap();
        let d = m.diameters();
        let nearest = (0..m.num_triangles())
            .min_by(|&a, &b| {
                let c = |k: usize| {
                    let [p0, p1, p2] = m.corners(k);
                    ((p0[0] + p1[0] + p2[0]) / 3.0).hypot((p0[1] + p1[1] + p2[1]) / 3.0)
                };
                c(a).total_cmp(&c(b))
            })
            .unwrap();
        assert!(d[nearest] < 0.1 * m.h_max(), "{} vs {}", d[nearest], m.h_max());
    }
}
