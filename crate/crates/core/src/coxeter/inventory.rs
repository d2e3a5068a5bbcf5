use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::classify::{classify_subdiagram, SubdiagramType};
use super::diagram::{CoxeterDiagram, Label};
use super::CoxeterError;
use crate::catalog::{can_embed, GroupId};
use crate::intlinalg::{ChainComplexZ, IntMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum CellKind {
    Finite,
    #[serde(rename = "parabolicVC")]
    ParabolicVc,
    #[serde(rename = "hyperbolicVC")]
    HyperbolicVc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub cell_id: String,
    pub stabilizer: GroupId,
    pub kind: CellKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<Vec<(String, i64)>>,
}

impl Cell {
    pub fn new(id: impl Into<String>, stabilizer: GroupId, kind: CellKind) -> Self {
        Cell {
            cell_id: id.into(),
            stabilizer,
            kind,
            boundary: None,
        }
    }
}

/// Quotient cells by dimension, each with its stabilizer.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellInventory {
    pub dims: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InventoryViolation {
    UnknownBoundaryCell { cell: String, face: String },
    StabilizerNotSubgroup { cell: String, face: String },
}

impl CellInventory {
    /// Top dimension, `None` when empty.
    pub fn dim(&self) -> Option<usize> {
        self.dims.iter().rposition(|cells| !cells.is_empty())
    }

    pub fn cells(&self, p: usize) -> &[Cell] {
        self.dims.get(p).map_or(&[], Vec::as_slice)
    }

    pub fn counts(&self) -> Vec<usize> {
        self.dims.iter().map(Vec::len).collect()
    }

    pub fn push(&mut self, p: usize, cell: Cell) {
        if self.dims.len() <= p {
            self.dims.resize_with(p + 1, Vec::new);
        }
        self.dims[p].push(cell);
    }

    pub fn find(&self, p: usize, id: &str) -> Option<&Cell> {
        self.cells(p).iter().find(|c| c.cell_id == id)
    }

    /// Distinct stabilizer labels in dimension `p`.
    pub fn stabilizer_labels(&self, p: usize) -> BTreeSet<String> {
        self.cells(p).iter().map(|c| c.stabilizer.to_string()).collect()
    }

    pub fn stabilizer_multiset(&self, p: usize) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for c in self.cells(p) {
            *out.entry(c.stabilizer.to_string()).or_insert(0) += 1;
        }
        out
    }

    /// Boundary cells must exist one dimension down, and each cell's
    /// stabilizer must embed in the stabilizers of its faces.
    pub fn violations(&self) -> Vec<InventoryViolation> {
        let mut out = Vec::new();
        for p in 1..self.dims.len() {
            for cell in &self.dims[p] {
                for (face, _) in cell.boundary.iter().flatten() {
                    match self.find(p - 1, face) {
                        None => out.push(InventoryViolation::UnknownBoundaryCell {
                            cell: cell.cell_id.clone(),
                            face: face.clone(),
                        }),
                        Some(f) if !can_embed(&cell.stabilizer, &f.stabilizer) => {
                            out.push(InventoryViolation::StabilizerNotSubgroup {
                                cell: cell.cell_id.clone(),
                                face: face.clone(),
                            })
                        }
                        Some(_) => {}
                    }
                }
            }
        }
        out
    }

    /// Cellular chain complex with integer coefficients, if every cell above
    /// dimension 0 carries its boundary.
    pub fn chain_complex(&self) -> Option<ChainComplexZ> {
        let top = self.dim()?;
        let ranks: Vec<usize> = (0..=top).map(|p| self.cells(p).len()).collect();
        let mut diffs = Vec::with_capacity(top);
        for p in 1..=top {
            let rows: HashMap<&str, usize> = self
                .cells(p - 1)
                .iter()
                .enumerate()
                .map(|(i, c)| (c.cell_id.as_str(), i))
                .collect();
            let mut m = IntMatrix::zeros(ranks[p - 1], ranks[p]);
            for (j, cell) in self.cells(p).iter().enumerate() {
                for (face, sign) in cell.boundary.as_ref()? {
                    let i = *rows.get(face.as_str())?;
                    let v = m.get(i, j) + sign;
                    m.set(i, j, v);
                }
            }
            diffs.push(m);
        }
        Some(ChainComplexZ::new(ranks, diffs))
    }
}

fn set_name(prefix: &str, s: &[usize]) -> String {
    let parts: Vec<String> = s.iter().map(|i| (i + 1).to_string()).collect();
    format!("{prefix}[{}]", parts.join(","))
}

/// Id of the simplex vertex `P_a ∩ P_b ∩ P_c`.
pub fn vertex_id(t: &[usize]) -> String {
    set_name("v", t)
}

/// Id of the simplex edge `P_a ∩ P_b`.
pub fn edge_id(e: &[usize]) -> String {
    set_name("e", e)
}

/// Id of the facet `P_a`.
pub fn facet_id(a: usize) -> String {
    format!("f{}", a + 1)
}

fn trunc_vertex_id(ideal: &[usize], e: &[usize]) -> String {
    format!("{}{}", set_name("t", ideal), set_name("e", e))
}

fn trunc_edge_id(ideal: &[usize], a: usize) -> String {
    format!("{}{}", set_name("t", ideal), facet_id(a))
}

fn cross_section_id(ideal: &[usize]) -> String {
    set_name("t", ideal)
}

fn without(s: &[usize], x: usize) -> Vec<usize> {
    s.iter().copied().filter(|&y| y != x).collect()
}

/// Truncated fundamental simplex of a rank-4 hyperbolic simplex group.
///
/// Finite vertices keep their parabolic stabilizers; every ideal vertex is
/// cut off by a 2-cell whose own vertices, edges and face carry the rank-2,
/// rank-1 and trivial parabolics. Incidence numbers are computed so that the
/// boundary of a boundary vanishes.
pub fn truncated_domain_inventory(d: &CoxeterDiagram) -> Result<CellInventory, CoxeterError> {
    let not_simplex = |subset: Vec<usize>, reason: &str| CoxeterError::NotHyperbolicSimplex {
        subset: subset.iter().map(|&i| CoxeterDiagram::generator_name(i)).collect(),
        reason: reason.to_string(),
    };
    if d.rank() != 4 {
        return Err(not_simplex((0..d.rank()).collect(), "rank must be 4"));
    }
    for a in 0..4 {
        for b in a + 1..4 {
            if d.label(a, b) == Label::Infinity {
                return Err(not_simplex(vec![a, b], "facets with label inf do not meet"));
            }
        }
    }
    match classify_subdiagram(d, &[0, 1, 2, 3])? {
        SubdiagramType::Indefinite => {}
        _ => return Err(not_simplex(vec![0, 1, 2, 3], "full diagram is not indefinite")),
    }

    let triples: Vec<Vec<usize>> = (0..4).map(|skip| without(&[0, 1, 2, 3], 3 - skip)).collect();
    let mut ideal: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut inv = CellInventory::default();

    for t in &triples {
        match classify_subdiagram(d, t)? {
            SubdiagramType::Finite { id, .. } => {
                let id = id.expect("rank-3 finite parabolics carry a label");
                inv.push(0, Cell::new(vertex_id(t), id, CellKind::Finite));
            }
            SubdiagramType::Affine { .. } => {
                ideal.insert(t.clone());
            }
            SubdiagramType::Indefinite => {
                return Err(not_simplex(t.clone(), "vertex subgroup is neither finite nor affine"))
            }
        }
    }
    for t in &ideal {
        for a in t.iter().rev() {
            let e = without(t, *a);
            let m = d.label(e[0], e[1]).finite().expect("checked above");
            inv.push(0, Cell::new(trunc_vertex_id(t, &e), GroupId::dihedral(m), CellKind::Finite));
        }
    }

    let endpoint = |e: &[usize], other: usize| -> String {
        let mut t = e.to_vec();
        t.push(other);
        t.sort_unstable();
        if ideal.contains(&t) {
            trunc_vertex_id(&t, e)
        } else {
            vertex_id(&t)
        }
    };
    for a in 0..4 {
        for b in a + 1..4 {
            let e = [a, b];
            let others: Vec<usize> = (0..4).filter(|x| !e.contains(x)).collect();
            let m = d.label(a, b).finite().expect("checked above");
            let mut cell = Cell::new(edge_id(&e), GroupId::dihedral(m), CellKind::Finite);
            cell.boundary = Some(vec![(endpoint(&e, others[0]), -1), (endpoint(&e, others[1]), 1)]);
            inv.push(1, cell);
        }
    }
    for t in &ideal {
        for &a in t {
            let rest = without(t, a);
            let mut e0 = vec![a, rest[0]];
            let mut e1 = vec![a, rest[1]];
            e0.sort_unstable();
            e1.sort_unstable();
            let mut cell = Cell::new(trunc_edge_id(t, a), GroupId::C2, CellKind::Finite);
            cell.boundary = Some(vec![(trunc_vertex_id(t, &e0), -1), (trunc_vertex_id(t, &e1), 1)]);
            inv.push(1, cell);
        }
    }

    for a in 0..4 {
        let mut faces: Vec<String> = (0..4)
            .filter(|&b| b != a)
            .map(|b| edge_id(&[a.min(b), a.max(b)]))
            .collect();
        faces.extend(ideal.iter().filter(|t| t.contains(&a)).map(|t| trunc_edge_id(t, a)));
        inv.push(2, Cell::new(facet_id(a), GroupId::C2, CellKind::Finite).with_faces(faces));
    }
    for t in &ideal {
        let faces = t.iter().map(|&a| trunc_edge_id(t, a)).collect();
        inv.push(2, Cell::new(cross_section_id(t), GroupId::Trivial, CellKind::Finite).with_faces(faces));
    }
    let faces = inv.cells(2).iter().map(|c| c.cell_id.clone()).collect();
    inv.push(3, Cell::new("s", GroupId::Trivial, CellKind::Finite).with_faces(faces));

    orient(&mut inv)?;
    Ok(inv)
}

impl Cell {
    /// Unsigned boundary placeholder, filled in by [`orient`].
    fn with_faces(mut self, faces: Vec<String>) -> Self {
        self.boundary = Some(faces.into_iter().map(|f| (f, 0)).collect());
        self
    }
}

/// Assign incidence signs to cells of dimension >= 2 whose boundary is given
/// unsigned: in a regular complex each codimension-2 face of a cell lies in
/// exactly two of its faces, and their contributions must cancel.
fn orient(inv: &mut CellInventory) -> Result<(), CoxeterError> {
    for p in 2..inv.dims.len() {
        let lower: HashMap<String, Vec<(String, i64)>> = inv.dims[p - 1]
            .iter()
            .map(|c| (c.cell_id.clone(), c.boundary.clone().unwrap_or_default()))
            .collect();
        for cell in &mut inv.dims[p] {
            let Some(bd) = cell.boundary.as_mut() else { continue };
            if bd.iter().all(|(_, s)| *s != 0) {
                continue;
            }
            let n = bd.len();
            let mut by_ridge: BTreeMap<String, Vec<(usize, i64)>> = BTreeMap::new();
            for (k, (face, _)) in bd.iter().enumerate() {
                for (ridge, s) in lower.get(face).into_iter().flatten() {
                    by_ridge.entry(ridge.clone()).or_default().push((k, *s));
                }
            }
            let mut sign = vec![0i64; n];
            sign[0] = 1;
            let mut queue = VecDeque::from([0usize]);
            while let Some(k) = queue.pop_front() {
                for incid in by_ridge.values() {
                    let Some(&(_, sk)) = incid.iter().find(|(i, _)| *i == k) else { continue };
                    for &(j, sj) in incid {
                        if j == k {
                            continue;
                        }
                        let want = -sign[k] * sk * sj;
                        if sign[j] == 0 {
                            sign[j] = want;
                            queue.push_back(j);
                        } else if sign[j] != want {
                            return Err(CoxeterError::NonOrientable(cell.cell_id.clone()));
                        }
                    }
                }
            }
            if sign.contains(&0) {
                return Err(CoxeterError::NonOrientable(cell.cell_id.clone()));
            }
            for ((_, s), v) in bd.iter_mut().zip(sign) {
                *s = v;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::AbGroup;
    use crate::intlinalg::homology;

    fn inv344() -> CellInventory {
        truncated_domain_inventory(&CoxeterDiagram::parse("[3,4,4]").unwrap()).unwrap()
    }

    fn labels(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn counts_344() {
        assert_eq!(inv344().counts(), vec![6, 9, 5, 1]);
    }

    #[test]
    fn vertex_stabilizers_344() {
        let inv = inv344();
        assert_eq!(
            inv.stabilizer_labels(0),
            labels(&["D2", "D4", "D6", "C2xD4", "C2xS4"])
        );
        assert_eq!(inv.stabilizer_multiset(0).get("D4"), Some(&2));
        assert_eq!(inv.stabilizer_labels(1), labels(&["C2", "D2", "D3", "D4"]));
        assert_eq!(inv.stabilizer_labels(2), labels(&["Trivial", "C2"]));
        assert_eq!(inv.stabilizer_multiset(2).get("C2"), Some(&4));
    }

    #[test]
    fn boundary_of_boundary_and_ball_homology() {
        let inv = inv344();
        let c = inv.chain_complex().unwrap();
        let h = homology(&c).unwrap();
        assert_eq!(h[0], AbGroup::free(1));
        assert!(h[1..].iter().all(AbGroup::is_zero));
        assert_eq!(c.euler_characteristic(), 1);
    }

    #[test]
    fn stabilizers_consistent() {
        assert!(inv344().violations().is_empty());
    }

    #[test]
    fn compact_simplex_untruncated() {
        let d = CoxeterDiagram::parse("[5,3,5]").unwrap();
        let inv = truncated_domain_inventory(&d).unwrap();
        assert_eq!(inv.counts(), vec![4, 6, 4, 1]);
        let h = homology(&inv.chain_complex().unwrap()).unwrap();
        assert_eq!(h[0], AbGroup::free(1));
        assert!(h[1..].iter().all(AbGroup::is_zero));
    }

    #[test]
    fn rejects_non_hyperbolic() {
        for text in ["[3,3,3]", "[4,3,4]", "[3,4]", "[7,3,7]"] {
            let d = CoxeterDiagram::parse(text).unwrap();
            assert!(matches!(
                truncated_domain_inventory(&d),
                Err(CoxeterError::NotHyperbolicSimplex { .. })
            ), "{text}");
        }
    }
}
