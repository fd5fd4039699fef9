use thiserror::Error;

/// Errors produced by the detection and evaluation primitives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum Error {
    #[error("mask radius {0} is below the minimum of 2")]
    RadiusTooSmall(u32),
    #[error("region does not fit inside the channel")]
    OutOfBounds,
    #[error("channel dimensions do not match the buffer length")]
    DimensionMismatch,
    #[error("no candidate center and radius admits an in-frame mask")]
    NoValidCandidate,
    #[error("no candidate pupil has a darker perimeter than its exterior")]
    NoPupilContrast,
    #[error("ring {0} of the radial profile is empty")]
    EmptyRing(u32),
    #[error("equality factor is undefined when both measures are zero")]
    BothZero,
    #[error("annotated eye centers coincide")]
    MalformedAnnotation,
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("annotated area is zero")]
    DegenerateAnnotation,
    #[error("at least two annotators are required")]
    TooFewAnnotators,
    #[error("synthetic eye specification is inconsistent")]
    InvalidSpec,
    #[error("eye region is smaller than 15x15 or outside the frame")]
    InvalidRegion,
}

pub type Result<T> = core::result::Result<T, Error>;
