//! k-th medians, total orderizations and total-orderization-invariance
//! checks on finite distributive lattices.
//!
//! The crate is organised bottom-up:
//!
//! * [`lattice`]: finite distributive lattices, Birkhoff embeddings, and
//!   the implicit real chain used for the weighted geometric mean example.
//! * [`median`]: k-th medians (direct, dual and bit-counting forms),
//!   relative medians and total orderizations.
//! * [`maps`]: n-ary maps, symmetry and lattice n-homomorphism checks,
//!   diagonals and homomorphism enumeration.
//! * [`toi`]: the four equivalent characterisations of total
//!   orderization invariance and their cross-check.
//! * [`theorems`]: replayable verification runs over lattice/map matrices.
//! * [`io`]: the JSON lattice and map file formats and tuple parsing.

pub mod error;
pub mod io;
pub mod lattice;
pub mod maps;
pub mod median;
pub mod report;
pub mod search;
pub mod theorems;
pub mod toi;

pub use error::{Error, Result};
pub use lattice::{Element, FiniteLattice, ImplicitChain, Lattice, LatticeKind, SamplePlan};
pub use maps::{Codomain, Domain, MultiMap};
pub use report::{CheckReport, Law, Value, Verdict, Witness};
