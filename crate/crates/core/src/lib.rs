//! Optical character recognition by per-label weight matrices.
//!
//! Glyph images are digitized into fixed-size binary grids ([`grid`]).
//! Each labeled character owns an integer weight matrix that grows by one
//! bipolar copy of every pattern taught under it ([`knowledge`]). A
//! candidate is scored against every matrix and the label with the highest
//! recognition quotient wins if it clears a threshold ([`recognition`]).
//!
//! Knowledge bases persist as plain-text profiles ([`store`]), and can be
//! driven from the `glyphforge` command line ([`cli`]) or an HTTP teaching
//! service ([`service`]).

pub mod cli;
pub mod error;
pub mod grid;
pub mod knowledge;
pub mod recognition;
pub mod service;
pub mod store;

pub use error::{Error, Result};
pub use grid::{digitize, BinaryGrid, BipolarGrid, DigitizeParams, GridDims, Raster};
pub use knowledge::{KnowledgeBase, Label, WeightMatrix};
pub use recognition::{
    candidate_score, classify, ideal_score, recognition_quotient, Decision, DecisionKind,
    LabelScore, Quotient,
};
