//! Crate-wide error types.

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mask has no foreground pixel")]
    EmptyMask,

    #[error("image has zero width or height")]
    EmptyImage,

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: String, right: String },

    #[error("landmark set is degenerate (fewer than 3 distinct points or all collinear)")]
    DegenerateLandmarks,

    #[error("region boundary has fewer than 3 pixels")]
    DegenerateRegion,

    #[error("input points are collinear")]
    CollinearInput,

    #[error("polygon has zero perimeter")]
    ZeroPerimeter,

    #[error("anchor set contains duplicate points")]
    DuplicateAnchors,

    #[error("centroid lies on or outside the anchor boundary")]
    DegenerateCentroid,

    #[error("triangle is degenerate (twice-area below 1e-9)")]
    DegenerateTriangle,

    #[error("source triangle for affine solve is collinear")]
    CollinearSource,

    #[error("expected {expected} patches, got {got}")]
    WrongPatchCount { expected: usize, got: usize },

    #[error("patch {index} is {got}, expected {expected}")]
    WrongPatchSize {
        index: usize,
        expected: String,
        got: String,
    },

    #[error("need at least one genuine and one impostor score")]
    EmptyClass,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn dims(lw: usize, lh: usize, rw: usize, rh: usize) -> Self {
        Error::DimensionMismatch {
            left: format!("{lw}x{lh}"),
            right: format!("{rw}x{rh}"),
        }
    }
}

/// An [`Error`] annotated with the pipeline stage that produced it.
///
/// The message embeds the cause, so no separate `source()` is exposed;
/// wrappers that print error chains show the stage and cause exactly once.
#[derive(Debug, Error)]
#[error("stage `{stage}`: {error}")]
pub struct PipelineError {
    pub stage: &'static str,
    pub error: Error,
}

impl PipelineError {
    pub fn new(stage: &'static str, error: Error) -> Self {
        Self { stage, error }
    }
}

/// Extension to annotate stage names onto fallible pipeline steps.
pub(crate) trait StageExt<T> {
    fn stage(self, name: &'static str) -> Result<T, PipelineError>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, name: &'static str) -> Result<T, PipelineError> {
        self.map_err(|e| PipelineError::new(name, e))
    }
}
