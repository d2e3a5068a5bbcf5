//! Citation-carrying table of lower K-groups of finite and virtually cyclic
//! groups, plus the instance fixtures the pipeline consumes for `[3,4,4]`.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::abelian::{AbGroup, AbelianError, KExpr, KSymbol};
use crate::catalog::{can_embed, GroupId};
use crate::coxeter::{CellInventory, CellKind};
use crate::intlinalg::{smith_normal_form, IntMatrix};
use crate::nil::RuleId;

/// Fixture for `[3,4,4]`, compiled into the library.
pub const BUNDLED_KB: &str = include_str!("../data/kb_gamma3.json");

pub const KB_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum KbError {
    #[error("KB JSON: {0}")]
    Json(String),
    #[error("unsupported KB version {0}")]
    Version(u32),
    #[error("entry {index}: unknown group label `{label}`")]
    UnknownGroup { index: usize, label: String },
    #[error("entry {index}: opaque group `{label}` needs allow_opaque")]
    OpaqueNotAllowed { index: usize, label: String },
    #[error("duplicate entry for ({group}, {q})")]
    Duplicate { group: GroupId, q: i32 },
    #[error("entry ({group}, {q}) has no citation")]
    MissingCitation { group: GroupId, q: i32 },
    #[error("entry ({group}, {q}) has a malformed value: {message}")]
    MalformedValue { group: GroupId, q: i32, message: String },
    #[error("entry ({group}, {q}) is nonzero, but K_q of a finite group vanishes for q <= -2")]
    NonzeroBelowMinusOne { group: GroupId, q: i32 },
    #[error("Wh_q is only tabulated for q <= 1, got q = {0}")]
    DegreeTooHigh(i32),
    #[error("no KB entry for ({group}, {q}) and no vanishing rule applies")]
    MissingEntry { group: GroupId, q: i32 },
    #[error("differential q={q} d_{from_dim}: {message}")]
    Differential { q: i32, from_dim: usize, message: String },
    #[error("join intersection {a} ∩ {b} = {group}: {message}")]
    Intersection {
        a: GroupId,
        b: GroupId,
        group: GroupId,
        message: String,
    },
    #[error("cusp model: {0}")]
    CuspModel(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KbEntry {
    pub group: GroupId,
    pub q: i32,
    #[serde(with = "value_repr")]
    pub value: KExpr,
    pub citation: String,
}

/// Entry values are stored flat: the group's fields plus optional symbols.
mod value_repr {
    use super::*;

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Repr {
        free_rank: usize,
        #[serde(default)]
        invariant_factors: Vec<u64>,
        #[serde(default)]
        omega: Vec<u64>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        symbols: Vec<KSymbol>,
    }

    pub fn serialize<S: serde::Serializer>(v: &KExpr, s: S) -> Result<S::Ok, S::Error> {
        Repr {
            free_rank: v.resolved.free_rank(),
            invariant_factors: v.resolved.invariant_factors().to_vec(),
            omega: v.resolved.omega_orders().iter().copied().collect(),
            symbols: v.symbols().to_vec(),
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> Result<KExpr, D::Error> {
        let r = Repr::deserialize(d)?;
        let g = AbGroup::from_parts(r.free_rank, r.invariant_factors, r.omega)
            .map_err(|e: AbelianError| serde::de::Error::custom(e.to_string()))?;
        Ok(KExpr::new(g, r.symbols))
    }
}

/// Homology the loader demands of a differential fixture.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedHomology {
    pub kernel: AbGroup,
    pub cokernel: AbGroup,
}

/// Boundary map `C_from -> C_to` of a coefficient complex at a fixed `q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifferentialFixture {
    pub q: i32,
    pub from_dim: usize,
    pub to_dim: usize,
    /// Basis labels of the target.
    pub rows: Vec<String>,
    /// Basis labels of the source.
    pub cols: Vec<String>,
    pub matrix: IntMatrix,
    pub expected: ExpectedHomology,
    pub provenance: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepresentativeKind {
    Peripheral,
    MaxHyperbolicVc,
    Whole,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Representative {
    pub id: String,
    pub group: GroupId,
    pub kind: RepresentativeKind,
    pub self_normalizing: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Intersection {
    pub a: String,
    pub b: String,
    pub group: GroupId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VcClass {
    pub id: String,
    pub group: GroupId,
}

/// Conjugacy-class representatives of a family adapted to `(FIN, VC)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdaptedFamilyFixture {
    pub representatives: Vec<Representative>,
    pub intersections: Vec<Intersection>,
    pub in_scope_vc: Vec<VcClass>,
    /// In-scope vc class id to the representative containing it.
    pub coverage: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JoinIntersection {
    pub a: GroupId,
    pub b: GroupId,
    pub group: GroupId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JoinIntersections {
    pub provenance: String,
    pub entries: Vec<JoinIntersection>,
}

impl JoinIntersections {
    /// Stabilizer of a join cell; a trivial factor forces a trivial result.
    pub fn lookup(&self, a: &GroupId, b: &GroupId) -> Option<GroupId> {
        if *a == GroupId::Trivial || *b == GroupId::Trivial {
            return Some(GroupId::Trivial);
        }
        self.entries
            .iter()
            .find(|e| (e.a == *a && e.b == *b) || (e.a == *b && e.b == *a))
            .map(|e| e.group.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KnowledgeBase {
    pub version: u32,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub allow_opaque: bool,
    pub entries: Vec<KbEntry>,
    pub differentials: Vec<DifferentialFixture>,
    pub cusp_model: CellInventory,
    pub adapted_family: AdaptedFamilyFixture,
    pub join_intersections: JoinIntersections,
    #[serde(skip)]
    index: HashMap<(GroupId, i32), usize>,
}

/// A value together with where it came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KbLookup {
    pub value: KExpr,
    pub citation: String,
}

#[derive(Deserialize)]
struct RawKb {
    version: u32,
    #[serde(default)]
    allow_opaque: bool,
    entries: Vec<Value>,
    #[serde(default)]
    differentials: Vec<DifferentialFixture>,
    #[serde(default)]
    cusp_model: CellInventory,
    adapted_family: AdaptedFamilyFixture,
    join_intersections: JoinIntersections,
}

fn json_err(e: serde_json::Error) -> KbError {
    KbError::Json(e.to_string())
}

fn parse_entry(index: usize, raw: Value, allow_opaque: bool) -> Result<KbEntry, KbError> {
    let label = raw
        .get("group")
        .and_then(Value::as_str)
        .ok_or_else(|| KbError::Json(format!("entry {index}: missing `group`")))?
        .to_string();
    let group: GroupId = label
        .parse()
        .map_err(|_| KbError::UnknownGroup { index, label: label.clone() })?;
    if matches!(group, GroupId::Opaque(_)) && !allow_opaque {
        return Err(KbError::OpaqueNotAllowed { index, label });
    }
    let q = raw
        .get("q")
        .and_then(Value::as_i64)
        .and_then(|q| i32::try_from(q).ok())
        .ok_or_else(|| KbError::Json(format!("entry {index}: missing or invalid `q`")))?;
    match raw.get("citation").and_then(Value::as_str) {
        Some(c) if !c.trim().is_empty() => {}
        _ => return Err(KbError::MissingCitation { group, q }),
    }
    serde_json::from_value(raw).map_err(|e| KbError::MalformedValue {
        group,
        q,
        message: e.to_string(),
    })
}

impl KnowledgeBase {
    /// Parse and validate KB JSON.
    pub fn from_json(text: &str) -> Result<Self, KbError> {
        let raw: RawKb = serde_json::from_str(text).map_err(json_err)?;
        if raw.version != KB_VERSION {
            return Err(KbError::Version(raw.version));
        }
        let entries = raw
            .entries
            .into_iter()
            .enumerate()
            .map(|(i, v)| parse_entry(i, v, raw.allow_opaque))
            .collect::<Result<Vec<_>, _>>()?;
        let mut index = HashMap::new();
        for (k, e) in entries.iter().enumerate() {
            if e.q > 1 {
                return Err(KbError::DegreeTooHigh(e.q));
            }
            if index.insert((e.group.clone(), e.q), k).is_some() {
                return Err(KbError::Duplicate {
                    group: e.group.clone(),
                    q: e.q,
                });
            }
            if e.q <= -2 && e.group.is_finite() && !e.value.is_zero() {
                return Err(KbError::NonzeroBelowMinusOne {
                    group: e.group.clone(),
                    q: e.q,
                });
            }
        }
        let kb = KnowledgeBase {
            version: raw.version,
            allow_opaque: raw.allow_opaque,
            entries,
            differentials: raw.differentials,
            cusp_model: raw.cusp_model,
            adapted_family: raw.adapted_family,
            join_intersections: raw.join_intersections,
            index,
        };
        kb.check_differentials()?;
        kb.check_join_intersections()?;
        kb.check_cusp_model()?;
        Ok(kb)
    }

    pub fn bundled() -> Self {
        KnowledgeBase::from_json(BUNDLED_KB).expect("bundled KB is valid")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("KB serializes")
    }

    pub fn entry(&self, group: &GroupId, q: i32) -> Option<&KbEntry> {
        self.index.get(&(group.clone(), q)).map(|&k| &self.entries[k])
    }

    /// `Wh_q(group)`: the table value, or 0 below `q = -1` by the Carter or
    /// Farrell-Jones vanishing results.
    pub fn lookup_wh(&self, group: &GroupId, q: i32) -> Result<KbLookup, KbError> {
        if q > 1 {
            return Err(KbError::DegreeTooHigh(q));
        }
        if let Some(e) = self.entry(group, q) {
            return Ok(KbLookup {
                value: e.value.clone(),
                citation: e.citation.clone(),
            });
        }
        let rule = if q <= -2 && group.is_finite() {
            Some(RuleId::CarterVanish)
        } else if q <= -2 && group.is_infinite_vc() {
            Some(RuleId::FjVcVanish)
        } else {
            None
        };
        match rule {
            Some(r) => Ok(KbLookup {
                value: KExpr::zero(),
                citation: r.citation().to_string(),
            }),
            None => Err(KbError::MissingEntry {
                group: group.clone(),
                q,
            }),
        }
    }

    pub fn differential(&self, q: i32, from_dim: usize) -> Option<&DifferentialFixture> {
        self.differentials
            .iter()
            .find(|d| d.q == q && d.from_dim == from_dim)
    }

    fn check_differentials(&self) -> Result<(), KbError> {
        for d in &self.differentials {
            let fail = |message: String| KbError::Differential {
                q: d.q,
                from_dim: d.from_dim,
                message,
            };
            if d.to_dim + 1 != d.from_dim {
                return Err(fail(format!("target dimension {} is not from_dim - 1", d.to_dim)));
            }
            if d.matrix.rows() != d.rows.len() || d.matrix.cols() != d.cols.len() {
                return Err(fail(format!(
                    "matrix is {}x{} but there are {} row and {} column labels",
                    d.matrix.rows(),
                    d.matrix.cols(),
                    d.rows.len(),
                    d.cols.len()
                )));
            }
            let snf = smith_normal_form(&d.matrix);
            let rank = snf.rank();
            let kernel = AbGroup::free(d.cols.len() - rank);
            let cokernel = AbGroup::from_diagonal(&snf.diagonal()[..rank], d.rows.len())
                .map_err(|e| fail(e.to_string()))?;
            if kernel != d.expected.kernel || cokernel != d.expected.cokernel {
                return Err(fail(format!(
                    "kernel {kernel} and cokernel {cokernel}, fixture expects {} and {}",
                    d.expected.kernel, d.expected.cokernel
                )));
            }
        }
        Ok(())
    }

    fn check_join_intersections(&self) -> Result<(), KbError> {
        for e in &self.join_intersections.entries {
            let fail = |message: &str| KbError::Intersection {
                a: e.a.clone(),
                b: e.b.clone(),
                group: e.group.clone(),
                message: message.to_string(),
            };
            if !can_embed(&e.group, &e.a) || !can_embed(&e.group, &e.b) {
                return Err(fail("not a subgroup of both factors"));
            }
            if let Some(other) = self.join_intersections.lookup(&e.a, &e.b) {
                if other != e.group {
                    return Err(fail("conflicts with another entry for the same pair"));
                }
            }
        }
        Ok(())
    }

    fn check_cusp_model(&self) -> Result<(), KbError> {
        let peripheral: Vec<&GroupId> = self
            .adapted_family
            .representatives
            .iter()
            .filter(|r| r.kind == RepresentativeKind::Peripheral)
            .map(|r| &r.group)
            .collect();
        for p in 0..self.cusp_model.dims.len() {
            for c in self.cusp_model.cells(p) {
                let want = if c.stabilizer.is_finite() {
                    CellKind::Finite
                } else {
                    CellKind::ParabolicVc
                };
                if c.kind != want {
                    return Err(KbError::CuspModel(format!("{} has kind {:?}", c.cell_id, c.kind)));
                }
                if !peripheral.is_empty() && !peripheral.iter().any(|g| can_embed(&c.stabilizer, g)) {
                    return Err(KbError::CuspModel(format!(
                        "{} stabilizer {} is not in a peripheral subgroup",
                        c.cell_id, c.stabilizer
                    )));
                }
            }
        }
        Ok(())
    }
}

pub fn load_kb(path: &std::path::Path) -> Result<KnowledgeBase, KbError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| KbError::Json(format!("{}: {e}", path.display())))?;
    KnowledgeBase::from_json(&text)
}

/// Outcome of one adapted-family condition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionResult {
    pub condition: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdaptedFamilyReport {
    pub conditions: Vec<ConditionResult>,
}

impl AdaptedFamilyReport {
    pub fn all_pass(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> Vec<u8> {
        self.conditions
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.condition)
            .collect()
    }
}

/// Check the four adapted-family conditions on a fixture.
pub fn validate_adapted_family(f: &AdaptedFamilyFixture) -> AdaptedFamilyReport {
    let reps: HashMap<&str, &Representative> =
        f.representatives.iter().map(|r| (r.id.as_str(), r)).collect();

    let mut c1 = Vec::new();
    let mut seen: BTreeMap<(String, String), &GroupId> = BTreeMap::new();
    for x in &f.intersections {
        for id in [&x.a, &x.b] {
            if !reps.contains_key(id.as_str()) {
                c1.push(format!("intersection names unknown class {id}"));
            }
        }
        let key = if x.a <= x.b {
            (x.a.clone(), x.b.clone())
        } else {
            (x.b.clone(), x.a.clone())
        };
        if let Some(prev) = seen.insert(key, &x.group) {
            if *prev != x.group {
                c1.push(format!("{} ∩ {} listed as both {prev} and {}", x.a, x.b, x.group));
            }
        }
        if !x.group.is_finite() {
            c1.push(format!("{} ∩ {} = {} is infinite", x.a, x.b, x.group));
        }
    }
    for (i, a) in f.representatives.iter().enumerate() {
        for b in &f.representatives[i + 1..] {
            let key = if a.id <= b.id {
                (a.id.clone(), b.id.clone())
            } else {
                (b.id.clone(), a.id.clone())
            };
            if !seen.contains_key(&key) {
                c1.push(format!("no intersection entry for {} and {}", a.id, b.id));
            }
        }
    }

    let c3: Vec<String> = f
        .representatives
        .iter()
        .filter(|r| !r.self_normalizing)
        .map(|r| format!("{} is not self-normalizing", r.id))
        .collect();

    let mut c4 = Vec::new();
    for v in &f.in_scope_vc {
        if !v.group.is_infinite_vc() {
            c4.push(format!("{} ({}) is not infinite virtually cyclic", v.id, v.group));
            continue;
        }
        match f.coverage.get(&v.id).and_then(|r| reps.get(r.as_str())) {
            None => c4.push(format!("{} has no coverage witness", v.id)),
            Some(r) if r.kind == RepresentativeKind::Whole => {}
            Some(r) if !can_embed(&v.group, &r.group) => {
                c4.push(format!("{} ({}) does not embed in {} ({})", v.id, v.group, r.id, r.group))
            }
            Some(_) => {}
        }
    }

    let result = |condition, name, detail: Vec<String>| ConditionResult {
        condition,
        name,
        passed: detail.is_empty(),
        detail,
    };
    AdaptedFamilyReport {
        conditions: vec![
            result(1, "finite pairwise intersections", c1),
            ConditionResult {
                condition: 2,
                name: "closed under conjugation",
                passed: true,
                detail: vec!["holds by representation: classes are stored by representative".into()],
            },
            result(3, "self-normalizing", c3),
            result(4, "covers every infinite virtually cyclic subgroup", c4),
        ],
    }
}
