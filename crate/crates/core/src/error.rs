use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty Pauli string")]
    EmptyPauli,
    #[error("invalid character {ch:?} at position {pos} in Pauli string")]
    BadPauliChar { ch: char, pos: usize },
    #[error("qubit-count mismatch: {left} vs {right}")]
    QubitMismatch { left: usize, right: usize },
    #[error("observables {0} and {1} do not commute")]
    NotMutuallyCommuting(String, String),
    #[error("product of context is not proportional to the identity (got {0})")]
    NotIdentityProduct(String),
    #[error("inconsistent generators: the signed group contains -I")]
    InconsistentGenerators,
    #[error("invalid identity product: {0}")]
    InvalidIdentityProduct(String),
    #[error("dense limit exceeded: {n_qubits} qubits requested, limit is {limit}")]
    DenseLimit { n_qubits: usize, limit: usize },
    #[error("expected a rank-1 projector, found rank {0}")]
    NotPure(u64),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("invalid context {index}: {reason}")]
    InvalidContext { index: usize, reason: String },
    #[error("invalid basis {index}: {reason}")]
    InvalidBasis { index: usize, reason: String },
    #[error("exhaustive coloring limited to {limit} projectors, set has {size}")]
    ExhaustiveLimit { size: usize, limit: usize },
    #[error("unknown catalog set {0:?}")]
    UnknownSet(String),
    #[error("invalid catalog parameters: {0}")]
    CatalogParameters(String),
    #[error("pre/post overlap {0:.3e} is below tolerance; weak values undefined")]
    VanishingOverlap(f64),
    #[error("all weak values in the basis vanish")]
    DegenerateBasis,
    #[error("{which}-selected state is not contained in any projector of the set")]
    NotRepresentable { which: &'static str },
    #[error("N must be even for this construction (got {0}); odd N requires the (N-1)-qubit reduction over sub-identity-products")]
    OddNonKs(usize),
    #[error("n must be odd (got {0})")]
    EvenPhaseIndex(i64),
    #[error("degenerate theta {0}: pre/post overlap vanishes")]
    DegenerateTheta(f64),
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
    #[error("linking context {0} violates c(Q,U) = c(Q,V)")]
    UvConditionViolated(usize),
    #[error("{0} nonzero orbits; symbolic solution needs exactly one (use the numeric engine)")]
    MultipleNonzeroOrbits(usize),
    #[error("sum rule unsatisfiable symbolically: equal numbers of positive and negative relative signs")]
    SumRuleUnsatisfiable,
    #[error("no maximum conflict pattern: {0}")]
    NoMaximumConflict(String),
    #[error("N must be odd and at least 3 (got {0})")]
    EvenWheel(usize),
    #[error("basis matrices do not sum to the identity (residual {0:.3e})")]
    IncompleteBasis(f64),
    #[error("post-selection has zero probability on every branch")]
    ZeroPostselection,
    #[error("invalid measurement step {index}: {reason}")]
    InvalidStep { index: usize, reason: String },
    #[error("input is not a projector: {0}")]
    NotProjector(String),
    #[error("search budget must be positive")]
    ZeroBudget,
    #[error("exhaustive stabilizer search limited to {limit} qubits, set has {n_qubits}")]
    SearchLimit { n_qubits: usize, limit: usize },
    #[error("{0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
