//! Serre-weight sets attached to tame semisimple inertial parameters for
//! `GL_n` over a p-adic field `K`.
//!
//! The library computes and compares the weight-set predictors `W_obv`
//! (obvious weights), `C(W_obv)` (closure under shared Jordan–Hölder factors
//! of reductions of lifts), `W_expl` (explicit predicted weights), `W^?`
//! (exact for `GL_3` over `Q_p`, and the generic characterization for all n),
//! and the cycle-based predictor [`weight_sets::adp_weights`], together with
//! the supporting affine-Weyl alcove machinery and the base-p digit-witness
//! algorithm behind nonemptiness of `W_obv`.
//!
//! Everything is exact integer arithmetic; all predictors are pure functions
//! of a [`tame_types::TameType`] and are safe to evaluate in parallel.

pub mod alcove_geometry;
pub mod context;
pub mod corpus;
pub mod digit_witness;
pub mod jordan_holder;
pub mod tame_types;
pub mod weight_lattice;
pub mod weight_sets;

pub use context::Context;
pub use tame_types::{TamePiece, TameType};
pub use weight_lattice::{HodgeType, SerreWeight};
pub use weight_sets::WeightSet;
