use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mesh parse error at line {line}: {message}")]
    MeshParse { line: usize, message: String },

    #[error("mesh has no triangles")]
    EmptyMesh,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("frame {frame}: could not place models without overlap after {attempts} attempts")]
    PlacementExhausted { frame: u64, attempts: usize },

    #[error("asset resolution failed: {0}")]
    Asset(String),

    #[error("frame {frame}: id buffer references instance {instance} which is not in the scene")]
    CorruptFrame { frame: u64, instance: u32 },

    #[error("no label mapping for class(es): {}", .0.join(", "))]
    UnmappedLabel(Vec<String>),

    #[error("detection classes not present in ground truth: {}", .0.join(", "))]
    ClassMismatch(Vec<String>),

    #[error("degenerate bounding box [{0}, {1}) x [{2}, {3})")]
    DegenerateBox(u32, u32, u32, u32),

    #[error("value {value} outside domain: {what}")]
    Domain { what: &'static str, value: String },

    #[error("ground truth set is empty")]
    EmptyGroundTruth,

    #[error("manifest validation failed: {0}")]
    Manifest(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn image(path: impl Into<PathBuf>, source: image::ImageError) -> Self {
        Error::Image {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.to_string(),
        }
    }
}
