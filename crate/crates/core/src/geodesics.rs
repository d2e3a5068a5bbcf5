//! Geodesics along the edges of the fundamental simplex.
//!
//! A geodesic running along the simplex edge `P_a ∩ P_b` reaches a vertex `v`
//! and continues in the antipodal direction. Folding that direction back into
//! the chamber of the vertex group `W_v` tells which simplex edge the
//! continuation projects to. Repeating this either returns to the starting
//! directed edge (the projection is periodic) or runs into an ideal vertex.

use std::collections::{BTreeMap, HashMap};

use nalgebra::{Matrix3, Vector3};
use serde::Serialize;
use thiserror::Error;

use crate::catalog::GroupId;
use crate::coxeter::{
    classify_subdiagram, gram_matrix, identify_group, realize_vertex_group, CoxeterDiagram,
    CoxeterError, MatrixGroup, EPS,
};

/// Tolerance for matching a folded vector to an edge direction.
pub const MATCH_TOL: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum GeodesicError {
    #[error(transparent)]
    Coxeter(#[from] CoxeterError),
    #[error("geodesics are traced on rank-4 simplex diagrams, got rank {0}")]
    NotSimplex(usize),
    #[error("edge {0:?} is not a pair of distinct facets")]
    BadEdge([usize; 2]),
    #[error("folded direction at vertex {vertex:?} matches no edge direction")]
    NoMatchingDirection { vertex: [usize; 3] },
    #[error("chamber folding at vertex {vertex:?} did not terminate")]
    FoldDidNotTerminate { vertex: [usize; 3] },
    #[error("trace from {0} did not close up or escape")]
    Runaway(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Toward {
    Vertex([usize; 3]),
    Ideal,
}

/// Simplex edge `P_a ∩ P_b` traversed toward one of its endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DirectedEdge {
    pub edge: [usize; 2],
    pub toward: Toward,
}

impl std::fmt::Display for DirectedEdge {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let [a, b] = self.edge;
        match self.toward {
            Toward::Vertex([x, y, z]) => {
                write!(f, "P{}∩P{} -> v[{},{},{}]", a + 1, b + 1, x + 1, y + 1, z + 1)
            }
            Toward::Ideal => write!(f, "P{}∩P{} -> ideal", a + 1, b + 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Outcome {
    Periodic { period: usize },
    Escapes,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeodesicTrace {
    pub start: DirectedEdge,
    pub steps: Vec<DirectedEdge>,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Segment,
    Cycle,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum StabilizerKind {
    Finite,
    GraphOfGroups {
        vertices: Vec<GroupId>,
        edges: Vec<GroupId>,
        shape: Shape,
    },
    Form { group: GroupId },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StabilizerDescription {
    pub kind: StabilizerKind,
    /// Resolved name; `None` for finite stabilizers.
    pub name: Option<GroupId>,
}

fn sorted3(mut v: [usize; 3]) -> [usize; 3] {
    v.sort_unstable();
    v
}

fn sorted2(mut v: [usize; 2]) -> [usize; 2] {
    v.sort_unstable();
    v
}

/// Both simplex vertices on the edge `e`, in increasing order.
fn endpoints(e: [usize; 2]) -> [[usize; 3]; 2] {
    let mut others = (0..4).filter(|x| !e.contains(x));
    let (x, y) = (others.next().unwrap(), others.next().unwrap());
    [sorted3([e[0], e[1], x]), sorted3([e[0], e[1], y])]
}

/// Unit direction of each simplex edge through `vertex`, pointing into the
/// chamber: for the pair `{a, b}` it is the dual-basis vector of the third
/// normal, normalized.
pub fn edge_directions(
    d: &CoxeterDiagram,
    vertex: [usize; 3],
) -> Result<BTreeMap<[usize; 2], Vector3<f64>>, GeodesicError> {
    let v = sorted3(vertex);
    let normals = crate::coxeter::mirror_normals(d, &v)?;
    let ginv = gram_matrix(d, &v)
        .try_inverse()
        .ok_or(CoxeterError::Degenerate(v.to_vec()))?;
    let mut out = BTreeMap::new();
    for c in 0..3 {
        let w: Vector3<f64> = (0..3).map(|k| normals[k] * ginv[(c, k)]).sum();
        let pair = sorted2([v[(c + 1) % 3], v[(c + 2) % 3]]);
        out.insert(pair, w.normalize());
    }
    Ok(out)
}

struct VertexData {
    group: MatrixGroup,
    dirs: BTreeMap<[usize; 2], Vector3<f64>>,
}

/// Reflect `x` across violated walls of `g`'s chamber until none is
/// violated. Returns the folded vector and the number of reflections, or
/// `None` if more than `|g|` were needed.
pub fn fold_into_chamber(g: &MatrixGroup, mut x: Vector3<f64>) -> Option<(Vector3<f64>, usize)> {
    for steps in 0..=g.order() {
        match g.normals().iter().find(|n| n.dot(&x) < -EPS) {
            Some(n) => x -= 2.0 * n.dot(&x) * n,
            None => return Some((x, steps)),
        }
    }
    None
}

/// Per-diagram cache of realized finite vertices.
pub struct Tracer<'a> {
    d: &'a CoxeterDiagram,
    finite: HashMap<[usize; 3], Option<VertexData>>,
}

impl<'a> Tracer<'a> {
    pub fn new(d: &'a CoxeterDiagram) -> Result<Self, GeodesicError> {
        if d.rank() != 4 {
            return Err(GeodesicError::NotSimplex(d.rank()));
        }
        let mut finite = HashMap::new();
        for skip in 0..4 {
            let v: Vec<usize> = (0..4).filter(|&x| x != skip).collect();
            let key = [v[0], v[1], v[2]];
            let data = if classify_subdiagram(d, &v)?.is_finite() {
                Some(VertexData {
                    group: realize_vertex_group(d, &v)?,
                    dirs: edge_directions(d, key)?,
                })
            } else {
                None
            };
            finite.insert(key, data);
        }
        Ok(Tracer { d, finite })
    }

    fn vertex(&self, v: [usize; 3]) -> Option<&VertexData> {
        self.finite.get(&v).and_then(Option::as_ref)
    }

    fn toward(&self, v: [usize; 3]) -> Toward {
        if self.vertex(v).is_some() {
            Toward::Vertex(v)
        } else {
            Toward::Ideal
        }
    }

    fn fold(&self, v: [usize; 3], x: Vector3<f64>) -> Result<Vector3<f64>, GeodesicError> {
        let data = self.vertex(v).expect("fold is only called at finite vertices");
        fold_into_chamber(&data.group, x)
            .map(|(y, _)| y)
            .ok_or(GeodesicError::FoldDidNotTerminate { vertex: v })
    }

    /// The directed edge following `current` once the geodesic passes its
    /// endpoint.
    fn next(&self, current: DirectedEdge) -> Result<DirectedEdge, GeodesicError> {
        let Toward::Vertex(v) = current.toward else {
            return Ok(current);
        };
        let data = self.vertex(v).expect("directed edges only point at finite vertices");
        let u = data.dirs[&current.edge];
        let folded = self.fold(v, -u)?;
        let (&edge, _) = data
            .dirs
            .iter()
            .find(|(_, dir)| (*dir - folded).norm() < MATCH_TOL)
            .ok_or(GeodesicError::NoMatchingDirection { vertex: v })?;
        let far = endpoints(edge)
            .into_iter()
            .find(|w| *w != v)
            .expect("an edge has two endpoints");
        Ok(DirectedEdge {
            edge,
            toward: self.toward(far),
        })
    }

    /// Follow the geodesic from `start` until it repeats `start` or escapes.
    pub fn trace_from(&self, start: DirectedEdge) -> Result<GeodesicTrace, GeodesicError> {
        if start.toward == Toward::Ideal {
            return Ok(GeodesicTrace {
                start,
                steps: vec![start],
                outcome: Outcome::Escapes,
            });
        }
        let bound = 2 * 6 + 1;
        let mut steps = Vec::new();
        let mut cur = start;
        for _ in 0..bound {
            cur = self.next(cur)?;
            steps.push(cur);
            if cur.toward == Toward::Ideal {
                return Ok(GeodesicTrace {
                    start,
                    steps,
                    outcome: Outcome::Escapes,
                });
            }
            if cur == start {
                let period = steps.len();
                return Ok(GeodesicTrace {
                    start,
                    steps,
                    outcome: Outcome::Periodic { period },
                });
            }
        }
        Err(GeodesicError::Runaway(start.to_string()))
    }

    /// Trace the geodesic extending the simplex edge `P_a ∩ P_b`.
    pub fn trace_type1(&self, edge: [usize; 2]) -> Result<GeodesicTrace, GeodesicError> {
        if edge[0] == edge[1] || edge.iter().any(|&x| x >= 4) {
            return Err(GeodesicError::BadEdge(edge));
        }
        let edge = sorted2(edge);
        let ends = endpoints(edge);
        let start = if ends.iter().all(|&w| self.vertex(w).is_some()) {
            DirectedEdge {
                edge,
                toward: Toward::Vertex(ends[0]),
            }
        } else {
            DirectedEdge {
                edge,
                toward: Toward::Ideal,
            }
        };
        self.trace_from(start)
    }

    /// Elements of `W_v` preserving the line through `u`, and those fixing `u`.
    fn line_stabilizer(&self, v: [usize; 3], u: &Vector3<f64>) -> (Vec<Matrix3<f64>>, usize) {
        let data = self.vertex(v).expect("finite vertex");
        let mut line = Vec::new();
        let mut fixed = 0;
        for g in data.group.elements() {
            let gu = g * u;
            if (gu - u).norm() < MATCH_TOL {
                fixed += 1;
                line.push(*g);
            } else if (gu + u).norm() < MATCH_TOL {
                line.push(*g);
            }
        }
        (line, fixed)
    }

    /// Name the stabilizer of the geodesic described by `t`.
    pub fn stabilizer_of_trace(
        &self,
        t: &GeodesicTrace,
    ) -> Result<StabilizerDescription, GeodesicError> {
        let Outcome::Periodic { period } = t.outcome else {
            return Ok(StabilizerDescription {
                kind: StabilizerKind::Finite,
                name: None,
            });
        };
        let mut vertex_groups = Vec::new();
        let mut edge_groups = Vec::new();
        let mut splits = true;
        for step in &t.steps {
            let Toward::Vertex(v) = step.toward else {
                unreachable!("periodic traces never reach an ideal vertex")
            };
            let u = self.vertex(v).expect("finite").dirs[&step.edge];
            let (line, fixed) = self.line_stabilizer(v, &u);
            let line_group = MatrixGroup::generate(line.clone())?;
            let fixer = MatrixGroup::generate(
                line.iter()
                    .filter(|g| (*g * u - u).norm() < MATCH_TOL)
                    .copied()
                    .collect(),
            )?;
            debug_assert_eq!(fixer.order(), fixed);
            vertex_groups.push(identify_group(&line_group));
            edge_groups.push(identify_group(&fixer));
            splits &= line.len() == 2 * fixed && has_central_flip(&line, &u);
        }
        if period == 2 && t.steps[0].edge == t.steps[1].edge {
            // list the turning vertices in the order the trace starts from
            vertex_groups.rotate_right(1);
            let [a, b] = t.steps[0].edge;
            let m = self
                .d
                .label(a, b)
                .finite()
                .expect("edges between finite vertices have finite labels");
            let edge_group = GroupId::dihedral(m);
            let name = if splits {
                GroupId::product_with_dinf(edge_group.clone())
            } else {
                GroupId::amalgam(
                    vertex_groups[0].clone(),
                    edge_group.clone(),
                    vertex_groups[1].clone(),
                )
            };
            return Ok(StabilizerDescription {
                kind: StabilizerKind::GraphOfGroups {
                    vertices: vertex_groups,
                    edges: vec![edge_group],
                    shape: Shape::Segment,
                },
                name: Some(name),
            });
        }
        let label: Vec<String> = t.steps.iter().map(ToString::to_string).collect();
        Ok(StabilizerDescription {
            kind: StabilizerKind::GraphOfGroups {
                vertices: vertex_groups,
                edges: edge_groups,
                shape: Shape::Cycle,
            },
            name: Some(GroupId::Opaque(format!("cycle:{}", label.join(";")))),
        })
    }
}

/// An involution in `line` that reverses `u` and commutes with all of `line`.
fn has_central_flip(line: &[Matrix3<f64>], u: &Vector3<f64>) -> bool {
    let id = Matrix3::identity();
    line.iter().any(|z| {
        (z * u + u).norm() < MATCH_TOL
            && (z * z - id).abs().max() < MATCH_TOL
            && line.iter().all(|g| (z * g - g * z).abs().max() < MATCH_TOL)
    })
}

/// One row of the per-edge geodesic table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeReport {
    pub edge: [usize; 2],
    pub trace: GeodesicTrace,
    pub stabilizer: StabilizerDescription,
}

/// Trace every edge of the simplex.
pub fn analyze_edges(d: &CoxeterDiagram) -> Result<Vec<EdgeReport>, GeodesicError> {
    let tracer = Tracer::new(d)?;
    let mut out = Vec::new();
    for a in 0..4 {
        for b in a + 1..4 {
            let trace = tracer.trace_type1([a, b])?;
            let stabilizer = tracer.stabilizer_of_trace(&trace)?;
            out.push(EdgeReport {
                edge: [a, b],
                trace,
                stabilizer,
            });
        }
    }
    Ok(out)
}

/// Trace the geodesic extending `edge` (0-based facet indices).
pub fn trace_type1(d: &CoxeterDiagram, edge: [usize; 2]) -> Result<GeodesicTrace, GeodesicError> {
    Tracer::new(d)?.trace_type1(edge)
}

pub fn stabilizer_of_trace(
    d: &CoxeterDiagram,
    t: &GeodesicTrace,
) -> Result<StabilizerDescription, GeodesicError> {
    Tracer::new(d)?.stabilizer_of_trace(t)
}

/// Possible stabilizers of geodesics lying in exactly one mirror (type II)
/// or in no mirror (type III).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TypeForms {
    pub type_ii: Vec<GroupId>,
    pub type_iii: Vec<GroupId>,
}

pub fn type_ii_iii_forms() -> TypeForms {
    TypeForms {
        type_ii: vec![GroupId::ZxC2, GroupId::DinfxC2],
        type_iii: vec![GroupId::Z, GroupId::Dinf],
    }
}
