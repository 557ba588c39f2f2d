use std::path::PathBuf;

use nonholo_core::extension::ExtensionError;
use nonholo_core::field::FieldError;
use nonholo_core::geometry::GeometryError;
use nonholo_core::ode::OdeError;
use nonholo_core::symcore::ExprError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    SystemFile { path: PathBuf, message: String },
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Extension(#[from] ExtensionError),
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error("numerical singularity: {0}")]
    Singular(String),
    #[error("verification failed: {}", .0.join(", "))]
    Verification(Vec<String>),
}

impl Error {
    /// 0 success, 1 verification failure, 2 usage or IO error, 3 numerical
    /// singularity.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Verification(_) => 1,
            Error::Singular(_) => 3,
            Error::Geometry(GeometryError::Singular | GeometryError::DegenerateField)
            | Error::Extension(ExtensionError::Geometry(GeometryError::Singular))
            | Error::Ode(OdeError::Geometry(GeometryError::Singular) | OdeError::UndefinedPlane)
            | Error::Expr(ExprError::Singular) => 3,
            _ => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Error {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
