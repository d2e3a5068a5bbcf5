//! Quotient cell inventory of a model for `E_VC(Γ)`: the truncated domain
//! joined with one point per hyperbolic virtually cyclic class and a model
//! for the cusp group.

use serde::Serialize;
use thiserror::Error;

use crate::catalog::GroupId;
use crate::coxeter::{truncated_domain_inventory, Cell, CellInventory, CellKind, CoxeterDiagram, CoxeterError};
use crate::geodesics::{analyze_edges, type_ii_iii_forms, GeodesicError, Shape, StabilizerKind};
use crate::kb::{validate_adapted_family, JoinIntersections, KnowledgeBase, RepresentativeKind};

#[derive(Debug, Error)]
pub enum EvcError {
    #[error(transparent)]
    Coxeter(#[from] CoxeterError),
    #[error(transparent)]
    Geodesic(#[from] GeodesicError),
    #[error("no join intersection for {a} and {b}")]
    MissingIntersection { a: GroupId, b: GroupId },
    #[error("adapted family fails conditions {0:?}")]
    FamilyNotAdapted(Vec<u8>),
    #[error("{0} is not a hyperbolic class of the adapted family")]
    NotInFamily(GroupId),
    #[error("edge P{}∩P{} has an infinite stabilizer with no name", .0[0] + 1, .0[1] + 1)]
    Unnamed([usize; 2]),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JoinInput {
    pub base: CellInventory,
    pub vc_points: Vec<GroupId>,
    pub cusp_model: CellInventory,
    pub intersections: JoinIntersections,
}

pub fn vc_point_id(g: &GroupId) -> String {
    format!("hyp:{g}")
}

/// `Y`: hyperbolic vc points followed by the cusp model.
pub fn y_inventory(vc_points: &[GroupId], cusp_model: &CellInventory) -> CellInventory {
    let mut y = CellInventory::default();
    for g in vc_points {
        y.push(0, Cell::new(vc_point_id(g), g.clone(), CellKind::HyperbolicVc));
    }
    for (p, cells) in cusp_model.dims.iter().enumerate() {
        for c in cells {
            y.push(p, c.clone());
        }
    }
    y
}

/// Join of two quotient inventories: the cells of each factor, plus a
/// `(p+q+1)`-cell `x*y` for every `p`-cell `x` and `q`-cell `y`, whose
/// stabilizer is read from `table`.
pub fn join(
    x: &CellInventory,
    y: &CellInventory,
    table: &JoinIntersections,
) -> Result<CellInventory, EvcError> {
    let (Some(dx), Some(dy)) = (x.dim(), y.dim()) else {
        return Ok(if x.dim().is_some() { x.clone() } else { y.clone() });
    };
    let mut out = CellInventory::default();
    out.dims.resize_with(dx + dy + 2, Vec::new);
    for src in [x, y] {
        for (p, cells) in src.dims.iter().enumerate().filter(|(_, c)| !c.is_empty()) {
            out.dims[p].extend(cells.iter().cloned());
        }
    }
    for p in 0..=dx {
        for a in x.cells(p) {
            for q in 0..=dy {
                for b in y.cells(q) {
                    let stab = table.lookup(&a.stabilizer, &b.stabilizer).ok_or_else(|| {
                        EvcError::MissingIntersection {
                            a: a.stabilizer.clone(),
                            b: b.stabilizer.clone(),
                        }
                    })?;
                    let kind = if stab.is_finite() { CellKind::Finite } else { b.kind };
                    out.dims[p + q + 1].push(Cell::new(format!("{}*{}", a.cell_id, b.cell_id), stab, kind));
                }
            }
        }
    }
    Ok(out)
}

pub fn join_inventory(j: &JoinInput) -> Result<CellInventory, EvcError> {
    join(&j.base, &y_inventory(&j.vc_points, &j.cusp_model), &j.intersections)
}

/// Maximal hyperbolic vc classes: the type II/III forms, then the named
/// stabilizers of geodesics through simplex edges.
pub fn hyperbolic_vc_classes(d: &CoxeterDiagram) -> Result<Vec<GroupId>, EvcError> {
    let forms = type_ii_iii_forms();
    let mut out: Vec<GroupId> = forms.type_iii.into_iter().chain(forms.type_ii).collect();
    let mut named = Vec::new();
    for row in analyze_edges(d)? {
        let g = match (&row.stabilizer.kind, &row.stabilizer.name) {
            (StabilizerKind::Finite, _) => continue,
            (_, Some(name)) => name.clone(),
            (StabilizerKind::GraphOfGroups { vertices, edges, shape: Shape::Segment }, None)
                if vertices.len() == 2 && edges.len() == 1 =>
            {
                GroupId::amalgam(vertices[0].clone(), edges[0].clone(), vertices[1].clone())
            }
            (StabilizerKind::Form { group }, None) => group.clone(),
            _ => return Err(EvcError::Unnamed(row.edge)),
        };
        named.push(g);
    }
    named.sort_by_key(ToString::to_string);
    named.dedup();
    for g in named {
        if !out.contains(&g) {
            out.push(g);
        }
    }
    Ok(out)
}

/// End-to-end quotient inventory for `d`. Refuses to run unless the KB's
/// family passes every adapted-family check.
pub fn model_inventory(d: &CoxeterDiagram, kb: &KnowledgeBase) -> Result<CellInventory, EvcError> {
    let report = validate_adapted_family(&kb.adapted_family);
    if !report.all_pass() {
        return Err(EvcError::FamilyNotAdapted(report.failed()));
    }
    let vc_points = hyperbolic_vc_classes(d)?;
    for g in &vc_points {
        let listed = kb
            .adapted_family
            .representatives
            .iter()
            .any(|r| r.kind == RepresentativeKind::MaxHyperbolicVc && r.group == *g);
        if !listed {
            return Err(EvcError::NotInFamily(g.clone()));
        }
    }
    join_inventory(&JoinInput {
        base: truncated_domain_inventory(d)?,
        vc_points,
        cusp_model: kb.cusp_model.clone(),
        intersections: kb.join_intersections.clone(),
    })
}
