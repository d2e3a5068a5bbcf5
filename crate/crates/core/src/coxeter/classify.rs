use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use super::diagram::{CoxeterDiagram, Label};
use super::realize::{identify_group, realize_subset};
use super::CoxeterError;
use crate::catalog::GroupId;

const EIGEN_EPS: f64 = 1e-9;

/// Type of a parabolic subgroup.
///
/// `order` and `id` are exact for subsets of size at most 3; larger finite
/// subsets are recognized by positive definiteness only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SubdiagramType {
    Finite {
        order: Option<u64>,
        id: Option<GroupId>,
    },
    Affine {
        id: GroupId,
    },
    Indefinite,
}

impl SubdiagramType {
    pub fn is_finite(&self) -> bool {
        matches!(self, SubdiagramType::Finite { .. })
    }

    pub fn is_affine(&self) -> bool {
        matches!(self, SubdiagramType::Affine { .. })
    }

    fn finite(order: u64, id: GroupId) -> Self {
        SubdiagramType::Finite {
            order: Some(order),
            id: Some(id),
        }
    }
}

pub(crate) fn check_subset(d: &CoxeterDiagram, subset: &[usize]) -> Result<Vec<usize>, CoxeterError> {
    let mut s = subset.to_vec();
    s.sort_unstable();
    if s.windows(2).any(|w| w[0] == w[1]) || s.last().is_some_and(|&i| i >= d.rank()) {
        return Err(CoxeterError::SubsetOutOfRange {
            subset: subset.to_vec(),
            rank: d.rank(),
        });
    }
    Ok(s)
}

/// Cosine Gram matrix of a subset of generators.
pub fn gram_matrix(d: &CoxeterDiagram, subset: &[usize]) -> DMatrix<f64> {
    let n = subset.len();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            1.0
        } else {
            d.label(subset[i], subset[j]).gram_entry()
        }
    })
}

/// Order of the rank-3 triangle group with labels `(p, q, r)`, if finite:
/// `4 / (1/p + 1/q + 1/r - 1)` computed in integers.
pub fn triangle_order(p: u32, q: u32, r: u32) -> Option<u64> {
    let (p, q, r) = (u64::from(p), u64::from(q), u64::from(r));
    let num = q * r + p * r + p * q;
    let den = p * q * r;
    (num > den).then(|| 4 * den / (num - den))
}

fn rank3_affine_id(labels: [u32; 3]) -> Option<GroupId> {
    match labels {
        [2, 4, 4] => Some(GroupId::P4m),
        [2, 3, 6] => Some(GroupId::P6m),
        [3, 3, 3] => Some(GroupId::P3m1),
        _ => None,
    }
}

fn rank3_finite_id(labels: [u32; 3]) -> Option<GroupId> {
    match labels {
        [2, 2, n] => Some(GroupId::dihedral_x_c2(n)),
        [2, 3, 3] => Some(GroupId::S4),
        [2, 3, 4] => Some(GroupId::C2xS4),
        _ => None,
    }
}

/// Classify the parabolic subgroup generated by `subset` (0-based indices).
pub fn classify_subdiagram(
    d: &CoxeterDiagram,
    subset: &[usize],
) -> Result<SubdiagramType, CoxeterError> {
    let s = check_subset(d, subset)?;
    Ok(match s.len() {
        0 => SubdiagramType::finite(1, GroupId::Trivial),
        1 => SubdiagramType::finite(2, GroupId::C2),
        2 => match d.label(s[0], s[1]) {
            Label::Finite(m) => SubdiagramType::finite(2 * u64::from(m), GroupId::dihedral(m)),
            Label::Infinity => SubdiagramType::Affine { id: GroupId::Dinf },
        },
        3 => classify_rank3(d, &s)?,
        _ => classify_by_gram(d, &s),
    })
}

fn classify_rank3(d: &CoxeterDiagram, s: &[usize]) -> Result<SubdiagramType, CoxeterError> {
    let raw = [d.label(s[0], s[1]), d.label(s[0], s[2]), d.label(s[1], s[2])];
    let mut finite: Vec<u32> = raw.iter().filter_map(|l| l.finite()).collect();
    finite.sort_unstable();
    match finite.len() {
        3 => {
            let labels = [finite[0], finite[1], finite[2]];
            if let Some(order) = triangle_order(labels[0], labels[1], labels[2]) {
                let id = match rank3_finite_id(labels) {
                    Some(id) => id,
                    None => identify_group(&realize_subset(d, s)?),
                };
                return Ok(SubdiagramType::finite(order, id));
            }
            let (p, q, r) = (
                u64::from(labels[0]),
                u64::from(labels[1]),
                u64::from(labels[2]),
            );
            if q * r + p * r + p * q == p * q * r {
                let id = rank3_affine_id(labels).unwrap_or_else(|| {
                    GroupId::Opaque(format!("affine{labels:?}"))
                });
                return Ok(SubdiagramType::Affine { id });
            }
            Ok(SubdiagramType::Indefinite)
        }
        2 if finite == [2, 2] => Ok(SubdiagramType::Affine {
            id: GroupId::DinfxC2,
        }),
        _ => Ok(SubdiagramType::Indefinite),
    }
}

fn classify_by_gram(d: &CoxeterDiagram, s: &[usize]) -> SubdiagramType {
    let eig = SymmetricEigen::new(gram_matrix(d, s));
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min > EIGEN_EPS {
        SubdiagramType::Finite {
            order: None,
            id: None,
        }
    } else if min > -EIGEN_EPS {
        let names: Vec<String> = s.iter().map(|&i| CoxeterDiagram::generator_name(i)).collect();
        SubdiagramType::Affine {
            id: GroupId::Opaque(format!("affine[{}]", names.join(","))),
        }
    } else {
        SubdiagramType::Indefinite
    }
}
