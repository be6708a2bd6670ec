//! Recurrent regression network (RRNN).
//!
//! A tanh recurrent encoder-decoder trained with a reconstruction loss, a
//! sequence-statistic loss, and a softmax loss on hidden states, together
//! with the sequence constructions used for cross-pose still images and
//! for video clips.

pub mod bptt;
pub mod cli;
pub mod error;
pub mod eval;
pub mod format;
pub mod linalg;
pub mod model;
pub mod optim;
pub mod protocols;

pub use error::{Error, Result};
