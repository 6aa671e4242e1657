use maxlab_sparse::SparseError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("degenerate tetrahedron {tet} (signed volume {volume:e})")]
    DegenerateElement { tet: usize, volume: f64 },

    #[error("invalid source: {0}")]
    Source(String),

    #[error("{context}: {source}")]
    Setup {
        context: String,
        #[source]
        source: SparseError,
    },

    #[error("singular local block in subdomain {subdomain}: {source}")]
    SingularSubdomain {
        subdomain: usize,
        #[source]
        source: SparseError,
    },

    #[error("singular diagonal block {block} in block low-rank factorization")]
    SingularBlock { block: usize },

    #[error("non-positive curvature {curvature:e} at CG iteration {iteration}")]
    Indefinite { iteration: usize, curvature: f64 },

    #[error("unknown solver strategy '{0}'")]
    UnknownStrategy(String),

    #[error(transparent)]
    Sparse(#[from] SparseError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn setup(context: impl Into<String>, source: SparseError) -> Self {
        Error::Setup { context: context.into(), source }
    }
}
