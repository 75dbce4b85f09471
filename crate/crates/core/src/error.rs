use thiserror::Error;

/// Errors raised by the library. [`Error::code`] gives a module-qualified code.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate polygon: vanishing bracket at index {index}")]
    DegeneratePolygon { index: usize },
    #[error("frame bracket [P0,P1] does not equal s[0]")]
    FrameMismatch,
    #[error("continuant needs i <= j+1, got i={i}, j={j}")]
    IndexOrder { i: i64, j: i64 },
    #[error("operation needs n in {expected}, got n={got}")]
    WrongArity { expected: &'static str, got: usize },
    #[error("monodromy determinant is not 1")]
    BadMonodromy,

    #[error("collinear pair: reflection denominator vanishes")]
    CollinearPair,
    #[error("c must be nonzero")]
    ZeroC,
    #[error("branch lost at step {step}: both partners match the excluded polygon")]
    BranchLost { step: usize },
    #[error("no real c-related partner at step {step}")]
    NoRealPartner { step: usize },
    #[error("every polygon is c-related (identity Lax map)")]
    AllRelated,
    #[error("fixed point is irrational; use the float backend")]
    IrrationalRoot,
    #[error("reflection chain does not close (alternating sum {residual:e})")]
    NotClosedChain { residual: f64 },
    #[error("singular Bianchi completion at vertex {index}")]
    SingularCompletion { index: usize },
    #[error("input polygons are not related as required")]
    NotRelated,

    #[error("defined only for odd n, got n={n}")]
    EvenArity { n: usize },
    #[error("Lax matrix is singular at this spectral value")]
    SingularSpectral,
    #[error("integration blew up at t={time}")]
    StepBlowup { time: f64 },

    #[error("vanishing short diagonal at index {index}")]
    DegenerateDiagonal { index: usize },

    #[error("polygon must be closed")]
    NotClosed,
    #[error("tangent vector {which} violates fixed-s tangency (residual {residual:e})")]
    NotTangent { which: &'static str, residual: f64 },
    #[error("singular linear system")]
    SingularSystem,

    #[error("quadrilateral normalization is degenerate")]
    DegenerateQuad,
    #[error("conic fit is singular")]
    FitSingular,
    #[error("pentagon chart is singular")]
    ChartSingular,

    #[error("rejection sampling exhausted after {attempts} attempts")]
    ExhaustedRejection { attempts: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable code of the form `module.kind`.
    pub fn code(&self) -> &'static str {
        use Error::*;
        match self {
            DegeneratePolygon { .. } => "core_polygon.degenerate_polygon",
            FrameMismatch => "core_polygon.frame_mismatch",
            IndexOrder { .. } => "core_polygon.index_order",
            WrongArity { .. } => "core_polygon.wrong_arity",
            BadMonodromy => "core_polygon.bad_monodromy",
            CollinearPair => "lax_crelation.collinear_pair",
            ZeroC => "lax_crelation.zero_c",
            BranchLost { .. } => "lax_crelation.branch_lost",
            NoRealPartner { .. } => "lax_crelation.no_real_partner",
            AllRelated => "lax_crelation.all_related",
            IrrationalRoot => "lax_crelation.irrational_root",
            NotClosedChain { .. } => "lax_crelation.not_closed_chain",
            SingularCompletion { .. } => "lax_crelation.singular_completion",
            NotRelated => "lax_crelation.not_related",
            EvenArity { .. } => "integrals_flow.even_arity",
            SingularSpectral => "integrals_flow.singular_spectral",
            StepBlowup { .. } => "integrals_flow.step_blowup",
            DegenerateDiagonal { .. } => "recutting.degenerate_diagonal",
            NotClosed => "symplectic_center.not_closed",
            NotTangent { .. } => "symplectic_center.not_tangent",
            SingularSystem => "symplectic_center.singular_system",
            DegenerateQuad => "smallgons.degenerate_quad",
            FitSingular => "smallgons.fit_singular",
            ChartSingular => "smallgons.chart_singular",
            ExhaustedRejection { .. } => "cli_harness.exhausted_rejection",
            Parse(_) => "cli_harness.parse",
            InvalidInput(_) => "cli_harness.invalid_input",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
