//! Coxeter diagrams, parabolic subgroups, and the truncated fundamental domain.

mod classify;
mod diagram;
mod inventory;
mod realize;

pub use classify::{classify_subdiagram, gram_matrix, triangle_order, SubdiagramType};
pub use diagram::{CoxeterDiagram, Label};
pub use inventory::{
    edge_id, facet_id, truncated_domain_inventory, vertex_id, Cell, CellInventory, CellKind,
    InventoryViolation,
};
pub use realize::{
    identify_group, mirror_normals, realize_vertex_group, reflection, MatrixGroup, EPS, ORDER_CAP,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoxeterError {
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("subset {subset:?} is not a set of generator indices below {rank}")]
    SubsetOutOfRange { subset: Vec<usize>, rank: usize },
    #[error("parabolic subgroup on {0:?} is not finite")]
    NotFinite(Vec<usize>),
    #[error("cosine matrix of {0:?} is not positive definite")]
    Degenerate(Vec<usize>),
    #[error("group closure exceeded {0} elements")]
    ClosureCap(usize),
    #[error("group product left the enumerated element set")]
    NotClosed,
    #[error("vertex {vertex:?}: enumerated order {found}, expected {expected}")]
    OrderMismatch {
        vertex: Vec<usize>,
        expected: u64,
        found: u64,
    },
    #[error("not a hyperbolic simplex group: {reason} (subdiagram {subset:?})")]
    NotHyperbolicSimplex { subset: Vec<String>, reason: String },
    #[error("cannot orient the boundary of cell {0}")]
    NonOrientable(String),
}

impl CoxeterError {
    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        CoxeterError::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}
