//! Unitary elements of finite-group algebras and the ternary combination of
//! qudit density matrices built from them.
//!
//! * [`groups`]: permutations, Cayley-table groups, regular representations.
//! * [`repr`]: irreps, the group Fourier transform, block synthesis/extraction.
//! * [`state`]: density matrices, partial traces, commutators, entropies.
//! * [`combine`]: partial swap, ternary combination and its parametrizations.
//! * [`linkage`]: four-bar linkage orbits of the ternary parameters.
//! * [`experiments`]: the request/report types behind the `qmix` CLI.

pub mod combine;
pub mod error;
pub mod experiments;
pub mod groups;
pub mod io;
pub mod linalg;
pub mod linkage;
pub mod repr;
pub mod state;

pub use error::{Error, ErrorClass, Result};
pub use groups::{CoeffVector, FiniteGroup, Perm};
pub use linalg::{CMatrix, C64};
pub use repr::{BlockUnitaries, Irrep, IrrepSet};
pub use state::{DensityMatrix, EntropyFunctional};
