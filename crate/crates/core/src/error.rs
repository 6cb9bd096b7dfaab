use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure surfaced by the toolkit. Each variant maps to a stable,
/// module-qualified code via [`Error::code`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty matrix")]
    EmptyMatrix,
    #[error("matrix is not Hermitian: asymmetry {asymmetry:.3e} exceeds tolerance")]
    NotHermitian { asymmetry: f64 },
    #[error("non-finite value in {context}")]
    NonFinite { context: String },
    #[error("tolerance must be non-negative, got {0}")]
    NegativeTolerance(f64),
    #[error("not positive semidefinite (min eigenvalue {min_eigenvalue:.6e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("eigenvalue iteration did not converge")]
    EigenFailed,
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("point {id} lies on or outside the boundary of the domain")]
    Domain { id: String },
    #[error("invalid point set: {0}")]
    PointSet(String),
    #[error("invalid kernel: {0}")]
    Kernel(String),
    #[error("unknown point id {0}")]
    UnknownPoint(String),
    #[error("kernel vanishes against base point at {id}")]
    VanishesAgainstBase { id: String },
    #[error("kernel not irreducible at pair ({a}, {b})")]
    NotIrreducible { a: String, b: String },

    #[error("empty problem")]
    EmptyProblem,
    #[error("inconsistent targets: {0}")]
    Targets(String),
    #[error("unbounded bracket: no feasible norm below {upper}")]
    UnboundedBracket { upper: f64 },
    #[error("degenerate extremal problem: evaluation point equals the base point")]
    DegenerateExtremal,

    #[error("kernel is not CNP on this sample (min eigenvalue {min_eigenvalue:.6e})")]
    NotCnp { min_eigenvalue: f64 },
    #[error("xi must be a unit vector (norm {norm})")]
    NonUnitXi { norm: f64 },
    #[error("invalid disk embedding: {0}")]
    Embedding(String),

    #[error("value {re}{im:+}i lies on or outside the unit circle")]
    OutsideDisk { re: f64, im: f64 },
    #[error("normalization factor |a|/a undefined at 0")]
    ZeroInBlaschke,
    #[error("empty test-function family")]
    EmptyFamily,
    #[error("empty sample")]
    EmptySample,
    #[error("test function {name} exceeds modulus 1 (modulus {modulus})")]
    EscapesDisk { name: String, modulus: f64 },
    #[error("invalid sample: {0}")]
    Sample(String),

    #[error("invalid planar set: {0}")]
    PlanarSet(String),
    #[error("puncture {re}{im:+}i collides with a sample point")]
    PunctureCollision { re: f64, im: f64 },
    #[error("puncture at the origin: the base point must lie outside the removed set")]
    PunctureAtOrigin,
}

impl Error {
    /// Stable `module.reason` code for reports and exit diagnostics.
    pub fn code(&self) -> &'static str {
        use Error::*;
        match self {
            EmptyMatrix => "linalg.empty_matrix",
            NotHermitian { .. } => "linalg.not_hermitian",
            NonFinite { .. } => "linalg.non_finite",
            NegativeTolerance(_) => "linalg.negative_tolerance",
            NotPsd { .. } => "linalg.not_psd",
            EigenFailed => "linalg.eigen_failed",
            Dimension(_) => "linalg.dimension",
            Domain { .. } => "kernels.domain",
            PointSet(_) => "kernels.point_set",
            Kernel(_) => "kernels.invalid_kernel",
            UnknownPoint(_) => "kernels.unknown_point",
            VanishesAgainstBase { .. } => "kernels.vanishes_against_base",
            NotIrreducible { .. } => "kernels.not_irreducible",
            EmptyProblem => "pick.empty_problem",
            Targets(_) => "pick.targets",
            UnboundedBracket { .. } => "pick.unbounded_bracket",
            DegenerateExtremal => "pick.degenerate_extremal",
            NotCnp { .. } => "realization.not_cnp",
            NonUnitXi { .. } => "realization.non_unit_xi",
            Embedding(_) => "realization.embedding",
            OutsideDisk { .. } => "disk.outside",
            ZeroInBlaschke => "disk.zero_in_blaschke",
            EmptyFamily => "disk.empty_family",
            EmptySample => "disk.empty_sample",
            EscapesDisk { .. } => "disk.escapes_disk",
            Sample(_) => "disk.sample",
            PlanarSet(_) => "capacity.planar_set",
            PunctureCollision { .. } => "capacity.puncture_collision",
            PunctureAtOrigin => "capacity.puncture_at_origin",
        }
    }
}
