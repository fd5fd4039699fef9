//! Iris and pupil localization in low-resolution visible-spectrum eye images.
//!
//! The detector scores every candidate iris `(center, radius)` inside a rough eye
//! region with a bank of zero-sum three-region masks (iris disk, sclera collar,
//! skin border) over luminance, a saturation proxy (the V chroma plane) and
//! horizontal symmetry, then finds the pupil inside the winning iris with a
//! radial gradient criterion. Frame confidence combines both eyes and drives
//! best-frame retention over a stream.
//!
//! The crate is `no_std` + `alloc`. The `rayon` feature adds a parallel search
//! with results identical to the sequential one.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod error;
pub mod image;
pub mod iris;
pub mod mask;
pub mod metrics;
pub mod num;
pub mod pupil;
pub mod roi;
pub mod select;
pub mod synth;

pub use error::{Error, Result};
pub use image::{to_luma_satv, Channel, EyeRegion, Frame, RegionView, Side};
pub use iris::{detect_iris, IrisDetector, IrisEstimate, RadiusPolicy, ScanEngine, ScoreAccumulators, Scores};
pub use mask::{build_mask, classify_cell, CellLabel, MaskBank, MaskSet};
pub use metrics::{Circle, EyeAnnotation, Overlap, Prf, RelativeErrors};
pub use pupil::{detect_pupil, PupilEstimate, RadialProfile};
pub use select::{BestFrameState, FrameResult};
