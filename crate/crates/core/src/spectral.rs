//! `E^2` page of the Quinn spectral sequence
//! `E^2_{p,q} = H_p(E_VC(Γ)/Γ; {Wh_q(ZΓ_σ)}) ⇒ Wh_{p+q}(Γ)` and the report
//! assembled from it.
//!
//! Only free coefficients enter chain maps. Anything else (torsion, `⊕_∞`,
//! unresolved Nil symbols) must sit in a dimension whose neighbours carry
//! zero coefficients, so every incident differential is zero and the
//! coefficient passes to homology unchanged.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::abelian::{AbGroup, KExpr};
use crate::catalog::GroupId;
use crate::coxeter::{CellInventory, CoxeterDiagram};
use crate::evc::{model_inventory, EvcError};
use crate::intlinalg::{homology, ChainComplexZ, IntLinAlgError, IntMatrix};
use crate::kb::{KbError, KnowledgeBase};
use crate::nil::{citations, DerivationStep, NilEngine, NilError};

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("cell {cell} (stabilizer {stabilizer}) at q={q}: {source}")]
    Coefficient {
        cell: String,
        stabilizer: GroupId,
        q: i32,
        source: KbError,
    },
    #[error("q={q}: coefficient {coefficient} of {cell} is not free and meets a nonzero neighbour")]
    NotIsolated { q: i32, cell: String, coefficient: KExpr },
    #[error("q={q}: no boundary fixture for d_{from_dim}; free-rank bounds (NOT-A-RESULT): {}", fmt_bounds(bounds))]
    MissingDifferential {
        q: i32,
        from_dim: usize,
        bounds: Vec<RankBounds>,
    },
    #[error("q={q}: boundary fixture for d_{from_dim} does not fit the inventory: {message}")]
    FixtureMismatch { q: i32, from_dim: usize, message: String },
    #[error(transparent)]
    Evc(#[from] EvcError),
    #[error(transparent)]
    IntLinAlg(#[from] IntLinAlgError),
    #[error("E^2_{{{p},{q}}} = {value} should vanish")]
    NonzeroBand { p: usize, q: i32, value: KExpr },
    #[error("E^2_{{{},{}}} and E^2_{{{},{}}} are both nonzero, so the sequence need not collapse", .source_pos.0, .source_pos.1, .target.0, .target.1)]
    CollapseNotForced {
        source_pos: (usize, i32),
        target: (usize, i32),
    },
    #[error("resolving Wh_{n}: {source}")]
    Nil { n: i32, source: NilError },
}

/// Free rank of `H_p` when a differential is unknown.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RankBounds {
    pub p: usize,
    pub min: usize,
    pub max: usize,
}

fn fmt_bounds(b: &[RankBounds]) -> String {
    b.iter()
        .map(|r| format!("rank H_{} in [{}, {}]", r.p, r.min, r.max))
        .collect::<Vec<_>>()
        .join(", ")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoeffCell {
    pub cell_id: String,
    pub stabilizer: GroupId,
    pub coefficient: KExpr,
    pub citation: String,
}

impl CoeffCell {
    fn free_rank(&self) -> Option<usize> {
        let g = &self.coefficient.resolved;
        (self.coefficient.is_resolved() && g.invariant_factors().is_empty() && g.is_finitely_generated())
            .then(|| g.free_rank())
    }
}

/// Cellular chains with coefficients `Wh_q` of the stabilizers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoeffComplex {
    pub q: i32,
    pub cells: Vec<Vec<CoeffCell>>,
    /// Basis labels of the free part: `id`, or `id#k` for rank above one.
    pub basis: Vec<Vec<String>>,
    /// `differentials[p - 1]` is the free part of `d_p`.
    pub differentials: Vec<IntMatrix>,
    /// Non-free coefficients per dimension, passed through to homology.
    pub isolated: Vec<KExpr>,
}

impl CoeffComplex {
    pub fn free_ranks(&self) -> Vec<usize> {
        self.basis.iter().map(Vec::len).collect()
    }

    pub fn free_part(&self) -> ChainComplexZ {
        ChainComplexZ::new(self.free_ranks(), self.differentials.clone())
    }

    /// `H_p` of the free part plus the isolated coefficients.
    pub fn homology(&self) -> Result<Vec<KExpr>, SpectralError> {
        let free = homology(&self.free_part())?;
        Ok(free
            .into_iter()
            .zip(&self.isolated)
            .map(|(h, iso)| KExpr::from_group(h).direct_sum(iso))
            .collect())
    }
}

fn basis_labels(cell: &str, rank: usize) -> Vec<String> {
    match rank {
        1 => vec![cell.to_string()],
        _ => (0..rank).map(|k| format!("{cell}#{k}")).collect(),
    }
}

fn rank_bounds(ranks: &[usize], known: &HashMap<usize, usize>) -> Vec<RankBounds> {
    let top = ranks.len();
    let max_rank = |p: usize| -> usize {
        if p == 0 || p >= top {
            return 0;
        }
        known
            .get(&p)
            .copied()
            .unwrap_or_else(|| ranks[p].min(ranks[p - 1]))
    };
    let min_rank = |p: usize| -> usize {
        if p == 0 || p >= top {
            return 0;
        }
        known.get(&p).copied().unwrap_or(0)
    };
    (0..top)
        .map(|p| RankBounds {
            p,
            min: ranks[p].saturating_sub(max_rank(p) + max_rank(p + 1)),
            max: ranks[p] - min_rank(p) - min_rank(p + 1),
        })
        .collect()
}

/// Coefficient complex of `inv` at degree `q`.
pub fn build_complex(inv: &CellInventory, kb: &KnowledgeBase, q: i32) -> Result<CoeffComplex, SpectralError> {
    let mut cells = Vec::with_capacity(inv.dims.len());
    for p in 0..inv.dims.len() {
        let mut row = Vec::with_capacity(inv.cells(p).len());
        for c in inv.cells(p) {
            let hit = kb
                .lookup_wh(&c.stabilizer, q)
                .map_err(|source| SpectralError::Coefficient {
                    cell: c.cell_id.clone(),
                    stabilizer: c.stabilizer.clone(),
                    q,
                    source,
                })?;
            row.push(CoeffCell {
                cell_id: c.cell_id.clone(),
                stabilizer: c.stabilizer.clone(),
                coefficient: hit.value,
                citation: hit.citation,
            });
        }
        cells.push(row);
    }

    let dim_is_zero = |p: usize| cells.get(p).is_none_or(|r: &Vec<CoeffCell>| r.iter().all(|c| c.coefficient.is_zero()));
    let mut basis = Vec::with_capacity(cells.len());
    let mut isolated = Vec::with_capacity(cells.len());
    for (p, row) in cells.iter().enumerate() {
        let mut labels = Vec::new();
        let mut iso = KExpr::zero();
        for c in row {
            match c.free_rank() {
                Some(r) => labels.extend(basis_labels(&c.cell_id, r)),
                None => {
                    let neighbours_zero = (p == 0 || dim_is_zero(p - 1)) && dim_is_zero(p + 1);
                    if !neighbours_zero {
                        return Err(SpectralError::NotIsolated {
                            q,
                            cell: c.cell_id.clone(),
                            coefficient: c.coefficient.clone(),
                        });
                    }
                    iso = iso.direct_sum(&c.coefficient);
                }
            }
        }
        basis.push(labels);
        isolated.push(iso);
    }

    let ranks: Vec<usize> = basis.iter().map(Vec::len).collect();
    let mut differentials = Vec::new();
    let mut known = HashMap::new();
    let mut missing = None;
    for p in 1..ranks.len() {
        if ranks[p] == 0 || ranks[p - 1] == 0 {
            differentials.push(IntMatrix::zeros(ranks[p - 1], ranks[p]));
            continue;
        }
        match kb.differential(q, p) {
            Some(fx) => {
                let m = align_fixture(&fx.rows, &fx.cols, &fx.matrix, &basis[p - 1], &basis[p]).map_err(
                    |message| SpectralError::FixtureMismatch { q, from_dim: p, message },
                )?;
                known.insert(p, crate::intlinalg::rank(&m));
                differentials.push(m);
            }
            None => {
                missing.get_or_insert(p);
                differentials.push(IntMatrix::zeros(ranks[p - 1], ranks[p]));
            }
        }
    }
    if let Some(from_dim) = missing {
        return Err(SpectralError::MissingDifferential {
            q,
            from_dim,
            bounds: rank_bounds(&ranks, &known),
        });
    }
    let out = CoeffComplex {
        q,
        cells,
        basis,
        differentials,
        isolated,
    };
    crate::intlinalg::validate_complex(&out.free_part())?;
    Ok(out)
}

/// Reorder a fixture matrix to the given bases, matching by label.
fn align_fixture(
    rows: &[String],
    cols: &[String],
    m: &IntMatrix,
    row_basis: &[String],
    col_basis: &[String],
) -> Result<IntMatrix, String> {
    let pick = |labels: &[String], basis: &[String], what: &str| -> Result<Vec<usize>, String> {
        let mut a: Vec<&String> = labels.iter().collect();
        let mut b: Vec<&String> = basis.iter().collect();
        a.sort();
        b.sort();
        if a != b {
            return Err(format!("{what} labels {labels:?} differ from basis {basis:?}"));
        }
        Ok(basis
            .iter()
            .map(|l| labels.iter().position(|x| x == l).unwrap())
            .collect())
    };
    let r = pick(rows, row_basis, "row")?;
    let c = pick(cols, col_basis, "column")?;
    Ok(m.select(&r, &c))
}

/// `E^2_{p,q}` for the given degrees.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct E2Page {
    pub entries: BTreeMap<(usize, i32), KExpr>,
    /// Citations of every coefficient that entered a nonzero term.
    pub citations: BTreeSet<String>,
}

#[derive(Serialize)]
struct E2Entry<'a> {
    p: usize,
    q: i32,
    value: &'a KExpr,
    text: String,
}

impl Serialize for E2Page {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<E2Entry> = self
            .entries
            .iter()
            .rev()
            .map(|(&(p, q), v)| E2Entry {
                p,
                q,
                value: v,
                text: v.to_string(),
            })
            .collect();
        rows.serialize(s)
    }
}

impl E2Page {
    pub fn get(&self, p: usize, q: i32) -> KExpr {
        self.entries.get(&(p, q)).cloned().unwrap_or_else(KExpr::zero)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = ((usize, i32), &KExpr)> {
        self.entries
            .iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|(&k, v)| (k, v))
    }

    /// Every `d^r`, `r >= 2`, must have a zero source or a zero target.
    pub fn check_collapse(&self) -> Result<(), SpectralError> {
        let nz: BTreeSet<(usize, i32)> = self.nonzero().map(|(k, _)| k).collect();
        for &(p, q) in &nz {
            for r in 2..=p {
                let target = (p - r, q + r as i32 - 1);
                if nz.contains(&target) {
                    return Err(SpectralError::CollapseNotForced {
                        source_pos: (p, q),
                        target,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Homology of the coefficient complexes for each `q` in `qs`.
pub fn e2_page(inv: &CellInventory, kb: &KnowledgeBase, qs: impl IntoIterator<Item = i32>) -> Result<E2Page, SpectralError> {
    let mut page = E2Page::default();
    for q in qs {
        let c = build_complex(inv, kb, q)?;
        for (p, h) in c.homology()?.into_iter().enumerate() {
            page.entries.insert((p, q), h);
        }
        for row in &c.cells {
            for cell in row.iter().filter(|c| !c.coefficient.is_zero()) {
                page.citations.insert(cell.citation.clone());
            }
        }
    }
    Ok(page)
}

/// Degrees from 1 down to `-(dim + 2)`.
pub fn default_q_range(inv: &CellInventory) -> Vec<i32> {
    let dim = inv.dim().unwrap_or(0) as i32;
    (-(dim + 2)..=1).rev().collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KResult {
    pub n: i32,
    pub name: String,
    /// `⊕_{p+q=n} E^2_{p,q}` before Nil resolution.
    pub e2_sum: KExpr,
    pub value: AbGroup,
    pub text: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub log: Vec<DerivationStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KReport {
    pub group: String,
    pub cell_counts: Vec<usize>,
    pub results: Vec<KResult>,
    pub e2: E2Page,
    pub assumptions: Vec<String>,
    pub provenance: Vec<String>,
}

impl KReport {
    pub fn result(&self, n: i32) -> Option<&KResult> {
        self.results.iter().find(|r| r.n == n)
    }
}

fn k_name(n: i32) -> String {
    match n {
        1 => "Wh".into(),
        0 => "K̃_0".into(),
        _ => format!("K_{n}"),
    }
}

/// Full pipeline: inventory, `E^2` page, collapse, Nil resolution.
pub fn lower_k_report(d: &CoxeterDiagram, kb: &KnowledgeBase) -> Result<KReport, SpectralError> {
    let inv = model_inventory(d, kb)?;
    let qs = default_q_range(&inv);
    let page = e2_page(&inv, kb, qs.iter().copied())?;
    for (&(p, q), v) in &page.entries {
        if q <= -2 && !v.is_zero() {
            return Err(SpectralError::NonzeroBand { p, q, value: v.clone() });
        }
    }
    page.check_collapse()?;

    let engine = NilEngine::new(Some(kb));
    let mut provenance: BTreeSet<String> = page.citations.clone();
    let mut results = Vec::new();
    for n in [1, 0, -1] {
        let sum = page
            .entries
            .iter()
            .filter(|(&(p, q), _)| p as i32 + q == n)
            .fold(KExpr::zero(), |acc, (_, v)| acc.direct_sum(v));
        let res = engine.resolve(&sum).map_err(|source| SpectralError::Nil { n, source })?;
        provenance.extend(citations(&res.log));
        results.push(KResult {
            n,
            name: k_name(n),
            e2_sum: sum,
            text: res.value.to_string(),
            value: res.value,
            log: res.log,
        });
    }
    results.push(KResult {
        n: -2,
        name: "K_n, n <= -2".into(),
        e2_sum: KExpr::zero(),
        value: AbGroup::zero(),
        text: "0".into(),
        log: vec![],
    });
    for (p, fx) in kb.differentials.iter().enumerate() {
        if page.entries.keys().any(|&(_, q)| q == fx.q) {
            provenance.insert(format!("boundary fixture {p} (q={}): {}", fx.q, fx.provenance));
        }
    }

    Ok(KReport {
        group: d.to_string(),
        cell_counts: inv.counts(),
        results,
        e2: page,
        assumptions: vec![
            "E^2 collapses: every d^r with r >= 2 has zero source or zero target (Quinn 1982)".into(),
            "extensions along each antidiagonal p+q=n are split".into(),
            "K_n for n <= -2 is read off the vanishing band q <= -2 (Carter 1980; Farrell-Jones 1995)".into(),
        ],
        provenance: provenance.into_iter().collect(),
    })
}

/// Four-line summary, one line per degree.
pub fn render_text(r: &KReport, verbose: bool) -> String {
    let mut out = String::new();
    let g = "Γ";
    let lines = [
        (1, format!("Wh({g})")),
        (0, format!("K̃_0(Z{g})")),
        (-1, format!("K_-1(Z{g})")),
        (-2, format!("K_n(Z{g}), n ≤ -2")),
    ];
    let _ = writeln!(out, "Lower algebraic K-theory of {g} = {}", r.group);
    for (n, label) in lines {
        if let Some(res) = r.result(n) {
            // Pad by visible width; the tilde in K̃ is a combining mark.
            let width = label.chars().filter(|c| !('\u{300}'..='\u{36f}').contains(c)).count();
            let _ = writeln!(out, "  {label}{} ≅ {}", " ".repeat(20usize.saturating_sub(width)), res.text);
        }
    }
    if verbose {
        let _ = writeln!(out, "\nE^2 page (nonzero terms):");
        for ((p, q), v) in r.e2.nonzero() {
            let _ = writeln!(out, "  E^2_{{{p},{q}}} = {v}");
        }
        for res in &r.results {
            if !res.log.is_empty() {
                let _ = writeln!(out, "\nDerivation for {}:", res.name);
                out.push_str(&crate::nil::render_log(&res.log));
            }
        }
        let _ = writeln!(out, "\nAssumptions:");
        for a in &r.assumptions {
            let _ = writeln!(out, "  - {a}");
        }
        let _ = writeln!(out, "\nSources:");
        for c in &r.provenance {
            let _ = writeln!(out, "  - {c}");
        }
    }
    out
}
