//! Exact-arithmetic engine for explicit Lubin-Tate (phi,Gamma)-modules
//! attached to absolutely irreducible mod-p representations of the absolute
//! Galois group of a p-adic field.
//!
//! The crate is organized in layers:
//!
//! * [`ffield`] — finite fields `F_{p^m}` with deterministic moduli,
//!   embeddings, Frobenius powers, normal bases and semilinear fixed points;
//! * [`padic`] — precision-tracked arithmetic in the ring of integers of a
//!   local field given by residue degree and an Eisenstein polynomial;
//! * [`series`] — truncated Laurent series over a finite field;
//! * [`lubin_tate`] — the Frobenius power series, the endomorphisms `[a](t)`
//!   and their mod-pi reductions;
//! * [`unit_exp`] — `Z_p`-exponentiation of 1-units in characteristic p;
//! * [`reps`] — the combinatorial classification of irreducible classes;
//! * [`phigamma`] — the explicit module matrices and their identity checks;
//! * [`tame_ext`] — the tame extension `F'((y))` with `y^d = t` and the
//!   product-ring verification of the proof vectors.

pub mod error;
pub mod ffield;
pub mod json;
pub mod lubin_tate;
pub mod padic;
pub mod phigamma;
pub mod report;
pub mod reps;
pub mod series;
pub mod tame_ext;
pub mod unit_exp;

pub use error::{Error, Result};
