//! Lower algebraic K-theory of hyperbolic simplex reflection groups.
//!
//! The pipeline runs from a Coxeter diagram to a report of `Wh_n` for
//! `n <= 1`:
//!
//! 1. [`coxeter`] classifies parabolic subgroups and builds the truncated
//!    fundamental domain with its stabilizers.
//! 2. [`geodesics`] traces the edges of the simplex through the reflection
//!    tessellation to find maximal virtually cyclic subgroups of hyperbolic type.
//! 3. [`evc`] joins the domain with those point classes and a cusp model.
//! 4. [`spectral`] builds the `E^2` page from the knowledge base in [`kb`] and
//!    [`nil`] resolves the Nil terms that remain.

// Errors carry derivation logs and are only built on failure paths.
#![allow(clippy::result_large_err)]

pub mod abelian;
pub mod catalog;
pub mod coxeter;
pub mod evc;
pub mod geodesics;
pub mod intlinalg;
pub mod kb;
pub mod nil;
pub mod spectral;

pub use abelian::{AbGroup, KExpr, KSymbol, Summand};
pub use catalog::GroupId;
pub use coxeter::CoxeterDiagram;
pub use intlinalg::{ChainComplexZ, IntMatrix};
