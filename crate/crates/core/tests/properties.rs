use lsfem::adapt::dorfler_mark;
use lsfem::assembly::{Formulation, SolutionPair, Spaces};
use lsfem::estimate::{error_norms, indicators};
use lsfem::mesh::{DomainId, Mesh};
use lsfem::problems::{BenchmarkName, BenchmarkProblem};
use proptest::prelude::*;

fn domain() -> impl Strategy<Value = DomainId> {
    prop::sample::select(vec![DomainId::UnitSquareCentered, DomainId::LShape, DomainId::HalfSquare, DomainId::TwoTriangle])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bisection_keeps_mesh_valid(d in domain(), picks in prop::collection::vec(prop::collection::vec(any::<u16>(), 1..6), 1..7)) {
        let mut mesh = Mesh::initial(d);
        let angle0 = mesh.min_angle();
        for p in picks {
            let nt = mesh.num_triangles();
            let marked: Vec<usize> = p.iter().map(|&i| i as usize % nt).collect();
            let next = mesh.bisect(&marked).unwrap();
            prop_assert!(next.is_conforming());
            prop_assert!((next.total_area() - d.area()).abs() < 1e-12);
            prop_assert!(next.num_triangles() > nt);
            // newest-vertex bisection only produces finitely many shapes
            prop_assert!(next.min_angle() >= angle0 / 2.0 - 1e-12);
            mesh = next;
        }
    }

    #[test]
    fn estimator_identity_holds_for_any_discrete_pair(
        seed in prop::collection::vec(-1.0f64..1.0, 8),
        k in 1usize..=3,
        which in 0usize..3,
    ) {
        let name = [BenchmarkName::SmoothA3, BenchmarkName::DiscontSs13, BenchmarkName::LshapeA7][which];
        let p = BenchmarkProblem::catalog(name);
        let mesh = Mesh::initial(p.domain).uniform_refine();
        let f = if k == 1 { Formulation::L2 } else { Formulation::Weighted };
        let sp = Spaces::new(&mesh, f, k).unwrap();
        let x: Vec<f64> = (0..sp.layout.total()).map(|i| seed[i % 8] * (1.0 + i as f64).sqrt()).collect();
        let pair = SolutionPair::from_global(&sp, &x);
        let r = error_norms(&mesh, &p, &sp, &pair).unwrap();
        let ind = indicators(&mesh, &p, &sp, &pair).unwrap();
        prop_assert!((ind.eta - r.ls).abs() <= 1e-10 * r.ls);
    }

    #[test]
    fn marking_reaches_the_bulk(eta in prop::collection::vec(0.0f64..10.0, 1..40), theta in 0.05f64..=1.0) {
        let m = dorfler_mark(&eta, theta);
        let total: f64 = eta.iter().sum();
        let got: f64 = m.iter().map(|&i| eta[i]).sum();
        prop_assert!(got >= theta * total * (1.0 - 1e-12));
        prop_assert!(m.windows(2).all(|w| w[0] < w[1]));
    }
}
