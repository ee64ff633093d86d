use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ambient dimension {0} outside supported range 2..=7")]
    UnsupportedDimension(usize),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("two-form is not antisymmetric (entry ({0},{1}))")]
    NotAntisymmetric(usize, usize),

    #[error("two-form spectrum does not match i(2r-m) for m = {m}: defect {defect:.3e}")]
    SpectrumMismatch { m: usize, defect: f64 },

    #[error("structure constants violate {0}")]
    InvalidStructure(String),

    #[error("not a Riemannian flow: h fails skew-symmetry by {0:.3e}")]
    FlowViolation(f64),

    #[error("vector field is not orthogonal to xi (component {0:.3e})")]
    NotTransversal(f64),

    #[error("operation requires a {expected} manifold")]
    WrongKind { expected: &'static str },

    #[error("spinor field of this shape is not defined on a {0} manifold")]
    FieldMismatch(&'static str),

    #[error("{0} requires real parameters")]
    ComplexParameters(&'static str),

    #[error("spinor is not a transversal Killing spinor: residual {0:.3e}")]
    NotKilling(f64),

    #[error("manifold is not Sasakian")]
    NotSasakian,

    #[error("mean curvature is nonzero ({0:.3e})")]
    NotMinimal(f64),

    #[error("spinor is not in the requested eigenbundle (defect {0:.3e})")]
    WrongEigenbundle(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("deformation check failed: {0}")]
    DeformationMismatch(String),

    #[error("unknown manifold '{0}'")]
    UnknownManifold(String),

    #[error("xi is not invariant under the point group (defect {0:.3e})")]
    NonInvariantXi(f64),

    #[error("lift is not compatible with the rotation of generator {generator} (defect {defect:.3e})")]
    LiftMismatch { generator: String, defect: f64 },

    #[error("{0}")]
    Unsupported(String),

    #[error("descriptor: {0}")]
    Descriptor(String),
}

pub type Result<T> = std::result::Result<T, Error>;
