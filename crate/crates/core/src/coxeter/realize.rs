use std::collections::HashMap;

use nalgebra::{Matrix3, Vector3};

use super::classify::{check_subset, classify_subdiagram, gram_matrix, SubdiagramType};
use super::diagram::CoxeterDiagram;
use super::CoxeterError;
use crate::catalog::{label_for, CayleyTable, Fingerprint, GroupId};

/// Arithmetic tolerance for matrix identities.
pub const EPS: f64 = 1e-9;
/// Grid used to deduplicate group elements.
const GRID: f64 = 1e6;
/// Hard cap on enumerated group order.
pub const ORDER_CAP: usize = 240;

type Key = [i64; 9];

fn key(m: &Matrix3<f64>) -> Key {
    let mut k = [0i64; 9];
    for (slot, v) in k.iter_mut().zip(m.iter()) {
        *slot = (v * GRID).round() as i64;
    }
    k
}

/// Finite group of 3x3 orthogonal matrices, enumerated to closure.
#[derive(Debug, Clone)]
pub struct MatrixGroup {
    generators: Vec<Matrix3<f64>>,
    elements: Vec<Matrix3<f64>>,
    index: HashMap<Key, usize>,
    /// Unit normals of the generating mirrors, when built from a diagram.
    normals: Vec<Vector3<f64>>,
}

impl MatrixGroup {
    /// Breadth-first closure of `generators`; element 0 is the identity.
    pub fn generate(generators: Vec<Matrix3<f64>>) -> Result<Self, CoxeterError> {
        let id = Matrix3::identity();
        let mut elements = vec![id];
        let mut index = HashMap::from([(key(&id), 0usize)]);
        let mut i = 0;
        while i < elements.len() {
            for g in &generators {
                let x = elements[i] * g;
                let k = key(&x);
                if let std::collections::hash_map::Entry::Vacant(slot) = index.entry(k) {
                    if elements.len() == ORDER_CAP {
                        return Err(CoxeterError::ClosureCap(ORDER_CAP));
                    }
                    slot.insert(elements.len());
                    elements.push(x);
                }
            }
            i += 1;
        }
        Ok(MatrixGroup {
            generators,
            elements,
            index,
            normals: Vec::new(),
        })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Matrix3<f64>] {
        &self.generators
    }

    pub fn elements(&self) -> &[Matrix3<f64>] {
        &self.elements
    }

    pub fn normals(&self) -> &[Vector3<f64>] {
        &self.normals
    }

    pub fn index_of(&self, m: &Matrix3<f64>) -> Option<usize> {
        self.index.get(&key(m)).copied()
    }

    /// Same group with every element replaced by `q g q^T`.
    pub fn conjugate(&self, q: &Matrix3<f64>) -> Result<Self, CoxeterError> {
        let gens = self.generators.iter().map(|g| q * g * q.transpose()).collect();
        let mut out = MatrixGroup::generate(gens)?;
        out.normals = self.normals.iter().map(|n| q * n).collect();
        Ok(out)
    }

    pub fn cayley_table(&self) -> Result<CayleyTable, CoxeterError> {
        let mul = self
            .elements
            .iter()
            .map(|a| {
                self.elements
                    .iter()
                    .map(|b| self.index_of(&(a * b)).ok_or(CoxeterError::NotClosed))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CayleyTable::new(mul))
    }

    pub fn fingerprint(&self) -> Result<Fingerprint, CoxeterError> {
        Ok(self.cayley_table()?.fingerprint())
    }

    /// Largest deviation of any element from orthogonality.
    pub fn orthogonality_defect(&self) -> f64 {
        self.elements
            .iter()
            .map(|m| (m.transpose() * m - Matrix3::identity()).abs().max())
            .fold(0.0, f64::max)
    }
}

/// Reflection in the plane orthogonal to the unit vector `n`.
pub fn reflection(n: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::identity() - 2.0 * n * n.transpose()
}

/// Unit normals whose pairwise inner products are the cosine Gram matrix.
pub fn mirror_normals(d: &CoxeterDiagram, subset: &[usize]) -> Result<Vec<Vector3<f64>>, CoxeterError> {
    if subset.len() != 3 {
        return Err(CoxeterError::SubsetOutOfRange {
            subset: subset.to_vec(),
            rank: d.rank(),
        });
    }
    let g = gram_matrix(d, subset);
    let chol = g.cholesky().ok_or(CoxeterError::Degenerate(subset.to_vec()))?;
    let l = chol.l();
    Ok((0..3)
        .map(|i| Vector3::new(l[(i, 0)], l[(i, 1)], l[(i, 2)]))
        .collect())
}

pub(crate) fn realize_subset(d: &CoxeterDiagram, s: &[usize]) -> Result<MatrixGroup, CoxeterError> {
    let normals = mirror_normals(d, s)?;
    let mut group = MatrixGroup::generate(normals.iter().map(reflection).collect())?;
    group.normals = normals;
    Ok(group)
}

/// Rank-3 parabolic subgroup as a group of orthogonal matrices.
pub fn realize_vertex_group(d: &CoxeterDiagram, vertex: &[usize]) -> Result<MatrixGroup, CoxeterError> {
    let s = check_subset(d, vertex)?;
    let SubdiagramType::Finite { order, .. } = classify_subdiagram(d, &s)? else {
        return Err(CoxeterError::NotFinite(s));
    };
    let group = realize_subset(d, &s)?;
    if let Some(expected) = order {
        if group.order() as u64 != expected {
            return Err(CoxeterError::OrderMismatch {
                vertex: s,
                expected,
                found: group.order() as u64,
            });
        }
    }
    Ok(group)
}

/// Catalog label by fingerprint, `Opaque` if nothing matches.
pub fn identify_group(g: &MatrixGroup) -> GroupId {
    match g.fingerprint() {
        Ok(fp) => label_for(&fp),
        Err(_) => GroupId::Opaque("unclosed".to_string()),
    }
}
