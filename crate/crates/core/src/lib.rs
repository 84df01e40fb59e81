//! Triple-score intersecting set families.
//!
//! A family `F` of subsets of `[n]` is `ell`-good when every three distinct
//! members `A, B, C` satisfy `|A∩B| + |B∩C| + |C∩A| >= ell`. This crate
//! provides the score and its dual, the shifting calculus, closed-form
//! bounds for the largest such families (uniform `g(n, k, ell)` and
//! non-uniform `h(n, ell)`), extremal constructions and exact search.

pub mod bounds;
pub mod constructions;
pub mod error;
pub mod format;
pub mod search;
pub mod sets;
pub mod shifting;
pub mod verify;

pub use error::{Error, Result};
pub use sets::{Family, GroundSet, Subset, TripleProfile};
