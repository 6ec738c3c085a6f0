//! Abuse-level prediction from diffusion behaviour.
//!
//! A message's label is predicted from the way people react to it: every
//! spreader→receiver edge of its cascade is classified by a MAP multinomial
//! logistic model and the edges vote. Messages without cascades fall back to
//! a model over author and message features only.

pub mod blr;
pub mod crowd;
pub mod datamodel;
pub mod error;
pub mod eval;
pub mod features;
pub mod forest;
pub mod graph;
pub mod synth;
pub mod pipeline;
pub mod cli;
