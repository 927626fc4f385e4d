use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported polynomial degree {0}")]
    UnsupportedDegree(usize),

    #[error("quadrature degree {0} outside the supported range 1..=12")]
    QuadratureDegree(usize),

    #[error("singular element map (det = {det:e})")]
    SingularMap { det: f64 },

    #[error("coefficient {name} evaluated outside its domain at ({x}, {y})")]
    DomainMismatch { name: &'static str, x: f64, y: f64 },

    #[error("exact solution of {name} requested at the singular point ({x}, {y})")]
    SingularPoint { name: &'static str, x: f64, y: f64 },

    #[error("unknown {kind} '{name}'")]
    UnknownName { kind: &'static str, name: String },

    #[error("formulation {formulation} does not admit degree {degree}")]
    FormulationDegree { formulation: &'static str, degree: usize },

    #[error("refinement closure did not terminate after {0} sweeps (inconsistent refinement edges)")]
    ClosureDiverged(usize),

    #[error("triangle index {index} out of range ({count} triangles)")]
    TriangleIndex { index: usize, count: usize },

    #[error("conjugate gradient stalled after {iterations} iterations (relative residual {residual:e})")]
    SolverDiverged { iterations: usize, residual: f64 },

    #[error("sparse Cholesky factorization failed: {0}")]
    Factorization(String),

    #[error("rate fit needs at least two positive samples")]
    RateInput,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed mesh file, line {line}: {msg}")]
    MeshFormat { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
