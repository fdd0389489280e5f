use thiserror::Error;

/// Errors produced anywhere in the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("object `{0}` has no identity morphism")]
    MissingIdentity(String),

    #[error("identity law fails for `{0}`")]
    IdentityLaw(String),

    #[error("composition is not associative on ({h}, {g}, {f})")]
    NonAssociative { h: String, g: String, f: String },

    #[error("composition table has no entry for ({g}, {f})")]
    IncompleteComposition { g: String, f: String },

    #[error("invalid composition entry ({g}, {f}) = {gf}: {reason}")]
    InvalidComposition {
        g: String,
        f: String,
        gf: String,
        reason: String,
    },

    #[error("dangling reference to `{0}`")]
    DanglingReference(String),

    #[error("duplicate name `{0}`")]
    DuplicateName(String),

    #[error("generator closure exceeds {0} morphisms")]
    ClosureCap(usize),

    #[error("unknown catalog entry `{0}`")]
    UnknownName(String),

    #[error("functoriality fails on ({g}, {f})")]
    NotFunctorial { g: String, f: String },

    #[error("no action given for morphism `{0}`")]
    MissingAction(String),

    #[error("element `{element}` is not in the set at `{object}`")]
    DanglingElement { object: String, element: String },

    #[error("family is not natural at morphism `{0}`")]
    NotNatural(String),

    #[error("presheaves live over different base categories")]
    BaseMismatch,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("size cap exceeded: {what} reached {size} (cap {cap})")]
    SizeCap { what: String, size: usize, cap: usize },

    #[error("unknown object `{0}`")]
    UnknownObject(String),

    #[error("subobjects have different ambient presheaves")]
    AmbientMismatch,

    #[error("family is not closed under restriction at `{0}`")]
    NotSubfunctor(String),

    #[error("unbound variable `{0}`")]
    UnboundVariable(String),

    #[error("sort error: {0}")]
    SortError(String),

    #[error("Π is not functorial on this arrow: {0}")]
    PiNotFunctorial(String),

    #[error("prerequisite failed: {0}")]
    PrereqFailed(String),

    #[error("triangle identity failed: {0}")]
    TriangleIdentityFailed(String),

    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
