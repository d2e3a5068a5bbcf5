//! Rewrite system that resolves Nil and `Wh_q` symbols to concrete groups,
//! recording every step with its literature citation.
//!
//! Each rule rewrites one symbol at a time. Rules that need auxiliary facts
//! (vanishing of other Nil groups, KB values) record them as premises, each
//! with its own sub-derivation, so a log reads as a proof sketch.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use serde::Serialize;
use thiserror::Error;

use crate::abelian::{AbGroup, KExpr, KSymbol};
use crate::catalog::GroupId;
use crate::kb::KnowledgeBase;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleId {
    CarterVanish,
    FjVcVanish,
    BhsSplit,
    WaldhausenAmalgam,
    MvIso,
    Madsen,
    DichotomyNk1D2,
    HarmonVanish,
    FjSurjection,
    F2Sandwich,
}

impl RuleId {
    /// Default priority order.
    pub const ALL: [RuleId; 10] = [
        RuleId::CarterVanish,
        RuleId::FjVcVanish,
        RuleId::BhsSplit,
        RuleId::WaldhausenAmalgam,
        RuleId::MvIso,
        RuleId::Madsen,
        RuleId::DichotomyNk1D2,
        RuleId::HarmonVanish,
        RuleId::FjSurjection,
        RuleId::F2Sandwich,
    ];

    pub fn number(self) -> usize {
        RuleId::ALL.iter().position(|&r| r == self).unwrap() + 1
    }

    pub fn name(self) -> &'static str {
        match self {
            RuleId::CarterVanish => "carter_vanish",
            RuleId::FjVcVanish => "fj_vc_vanish",
            RuleId::BhsSplit => "bhs_split",
            RuleId::WaldhausenAmalgam => "waldhausen_amalgam",
            RuleId::MvIso => "mv_iso",
            RuleId::Madsen => "madsen",
            RuleId::DichotomyNk1D2 => "dichotomy_nk1_d2",
            RuleId::HarmonVanish => "harmon_vanish",
            RuleId::FjSurjection => "fj_surjection",
            RuleId::F2Sandwich => "f2_sandwich",
        }
    }

    pub fn citation(self) -> &'static str {
        match self {
            RuleId::CarterVanish => "Carter 1980: K_q(ZF) = 0 for finite F and q <= -2",
            RuleId::FjVcVanish => {
                "Farrell-Jones 1995: K_q(ZQ) = 0 for infinite virtually cyclic Q and q <= -2"
            }
            RuleId::BhsSplit => {
                "Bass 1968, Fundamental Theorem: K_i(R[Z]) = K_i(R) ⊕ K_{i-1}(R) ⊕ NK_i(R) ⊕ NK_i(R)"
            }
            RuleId::WaldhausenAmalgam => {
                "Connolly-Prassidis 2002, Lemma 3.8: with vanishing vertex and edge terms, \
                 Wh_i(A *_C B) = NK_i(ZC; B1, B2), i = 0, 1"
            }
            RuleId::MvIso => {
                "Mayer-Vietoris sequence of the Cartesian square Z[D2] -> Z[C2], F_2[C2] \
                 together with NK_i(Z[C2]) = 0 (Harmon 1987)"
            }
            RuleId::Madsen => "Madsen 1995: NK_1(F_2[C2]) and NK_2(F_2[C2]) are ⊕_∞ Z/2",
            RuleId::DichotomyNk1D2 => {
                "Farrell 1977: a Bass Nil group is trivial or infinitely generated; \
                 NK_1(Z[D2]) is nontrivial (Bass 1968) and a quotient of NK_2(F_2[C2])"
            }
            RuleId::HarmonVanish => "Harmon 1987: NK_i(Z[C2]) = NK_i(Z[D3]) = 0 for i = 0, 1",
            RuleId::FjSurjection => {
                "Farrell-Jones 1995, Theorem 2.6; Quinn 1982, Theorem 8.7: \
                 2·NK_i(Z[D_k]) surjects onto NK_i(ZD_k; M1, M2)"
            }
            RuleId::F2Sandwich => {
                "Farrell-Hsiang 1978 transfer: NK_i(Z[D_k]) injects into NK_i(ZD_k; M1, M2); \
                 an F_2-vector space squeezed between two copies of ⊕_∞ Z/2 is ⊕_∞ Z/2"
            }
        }
    }

    /// `"R5 mv_iso"`.
    pub fn label(self) -> String {
        format!("R{} {}", self.number(), self.name())
    }

    /// Accepts `"R5"`, `"mv_iso"` or `"R5 mv_iso"`.
    pub fn parse(s: &str) -> Option<RuleId> {
        let s = s.trim();
        RuleId::ALL.into_iter().find(|r| {
            let n = format!("R{}", r.number());
            s == n || s == r.name() || s == r.label()
        })
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl Serialize for RuleId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Auxiliary fact used by a step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Premise {
    pub claim: String,
    pub citation: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub derivation: Vec<DerivationStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DerivationStep {
    pub rule: RuleId,
    pub input: KExpr,
    pub output: KExpr,
    pub citation: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub premises: Vec<Premise>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Resolution {
    pub value: AbGroup,
    pub log: Vec<DerivationStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NilError {
    #[error("{rule} does not match any symbol of {expr}")]
    NoMatch { rule: RuleId, expr: KExpr },
    #[error("unresolved symbols [{}] after trying {}", surviving.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "), attempted.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "))]
    Unresolved {
        surviving: Vec<KSymbol>,
        attempted: Vec<RuleId>,
        log: Vec<DerivationStep>,
    },
    #[error("replayed step {index} ({rule}) gives {found}, log says {expected}")]
    Replay {
        index: usize,
        rule: RuleId,
        expected: KExpr,
        found: KExpr,
    },
}

/// `NK_i(F_q[G])` known to be `⊕_∞ Z/2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MadsenAxiom {
    pub i: i32,
    pub field_order: u64,
    pub group: GroupId,
}

/// `NK_i(Z[G]) = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VanishingAxiom {
    pub i: i32,
    pub ring: GroupId,
}

/// `W = A *_base B` whose `Wh_i` is a Waldhausen Nil group with bimodule tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmalgamShape {
    pub names: Vec<GroupId>,
    pub vertex: GroupId,
    pub base: GroupId,
    pub tag: String,
}

/// Transfer argument: `NK_i(Z[base])` embeds in the Waldhausen Nil group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InjectionWitness {
    pub base: GroupId,
    pub tag: String,
    pub degrees: Vec<i32>,
    pub citation: String,
}

/// Table-driven inputs of the rule system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NilAxioms {
    pub madsen: Vec<MadsenAxiom>,
    pub harmon: Vec<VanishingAxiom>,
    pub amalgams: Vec<AmalgamShape>,
    pub injections: Vec<InjectionWitness>,
}

impl Default for NilAxioms {
    fn default() -> Self {
        let d2 = GroupId::Dihedral(2);
        let d3 = GroupId::Dihedral(3);
        NilAxioms {
            madsen: [1, 2]
                .into_iter()
                .map(|i| MadsenAxiom {
                    i,
                    field_order: 2,
                    group: GroupId::C2,
                })
                .collect(),
            harmon: [GroupId::C2, d3.clone()]
                .into_iter()
                .flat_map(|ring| [0, 1].map(|i| VanishingAxiom { i, ring: ring.clone() }))
                .collect(),
            amalgams: vec![
                AmalgamShape {
                    names: vec![
                        GroupId::product_with_dinf(d2.clone()),
                        GroupId::amalgam(GroupId::DihedralxC2(2), d2.clone(), GroupId::DihedralxC2(2)),
                    ],
                    vertex: GroupId::DihedralxC2(2),
                    base: d2.clone(),
                    tag: "B".into(),
                },
                AmalgamShape {
                    names: vec![
                        GroupId::product_with_dinf(d3.clone()),
                        GroupId::amalgam(GroupId::Dihedral(6), d3.clone(), GroupId::Dihedral(6)),
                    ],
                    vertex: GroupId::Dihedral(6),
                    base: d3,
                    tag: "C".into(),
                },
            ],
            injections: vec![InjectionWitness {
                base: d2,
                tag: "B".into(),
                degrees: vec![0, 1],
                citation: "Farrell-Hsiang 1978; Farrell-Hsiang 1968, Proposition 20: transfer for \
                           the index-2 subgroup D2 x Z of D2 x Dinf; the composite is x + τ(x), \
                           injective on each NK_i(Z[D2]) summand"
                    .into(),
            }],
        }
    }
}

type Rewrite = (KExpr, Vec<Premise>);

/// Deterministic rewriting engine.
#[derive(Debug, Clone)]
pub struct NilEngine<'a> {
    kb: Option<&'a KnowledgeBase>,
    order: Vec<RuleId>,
    axioms: NilAxioms,
}

fn omega2() -> AbGroup {
    AbGroup::omega(2).expect("2 is prime")
}

fn bass(i: i32, ring: &GroupId) -> KSymbol {
    KSymbol::BassNil { i, ring: ring.clone() }
}

fn twice(s: KSymbol) -> KExpr {
    KExpr::new(AbGroup::zero(), vec![s.clone(), s])
}

/// Lexicographic size `(WhQ, WaldNil, BassNil, NK over F_p)`; every rule
/// strictly decreases it.
pub fn measure(e: &KExpr) -> [usize; 4] {
    let mut m = [0; 4];
    for s in e.symbols() {
        let k = match s {
            KSymbol::WhQ { .. } => 0,
            KSymbol::WaldNil { .. } => 1,
            KSymbol::BassNil { .. } => 2,
            KSymbol::NkFiniteField { .. } => 3,
        };
        m[k] += 1;
    }
    m
}

impl<'a> NilEngine<'a> {
    pub fn new(kb: Option<&'a KnowledgeBase>) -> Self {
        NilEngine {
            kb,
            order: RuleId::ALL.to_vec(),
            axioms: NilAxioms::default(),
        }
    }

    /// Same engine with a different priority order.
    pub fn with_order(mut self, order: Vec<RuleId>) -> Self {
        self.order = order;
        self
    }

    pub fn with_axioms(mut self, axioms: NilAxioms) -> Self {
        self.axioms = axioms;
        self
    }

    pub fn order(&self) -> &[RuleId] {
        &self.order
    }

    /// One rewrite of the first symbol (in sorted order) that `rule` matches.
    pub fn apply_rule(&self, rule: RuleId, e: &KExpr) -> Result<DerivationStep, NilError> {
        for sym in e.symbols() {
            if let Some((replacement, premises)) = self.rewrite(rule, sym) {
                let output = e.substitute(sym, &replacement).expect("symbol is present");
                return Ok(DerivationStep {
                    rule,
                    input: e.clone(),
                    output,
                    citation: rule.citation().to_string(),
                    premises,
                });
            }
        }
        Err(NilError::NoMatch {
            rule,
            expr: e.clone(),
        })
    }

    /// Rewrite to a fixpoint, trying rules in priority order.
    pub fn resolve(&self, e: &KExpr) -> Result<Resolution, NilError> {
        let mut cur = e.clone();
        let mut log = Vec::new();
        'outer: while !cur.is_resolved() {
            for &rule in &self.order {
                if let Ok(step) = self.apply_rule(rule, &cur) {
                    cur = step.output.clone();
                    log.push(step);
                    continue 'outer;
                }
            }
            return Err(NilError::Unresolved {
                surviving: cur.symbols().to_vec(),
                attempted: self.order.clone(),
                log,
            });
        }
        Ok(Resolution {
            value: cur.resolved,
            log,
        })
    }

    pub fn resolve_symbol(&self, s: KSymbol) -> Result<Resolution, NilError> {
        self.resolve(&KExpr::symbol(s))
    }

    /// Re-run every step of `log` from `initial` and check it lands where
    /// the log says.
    pub fn replay(&self, initial: &KExpr, log: &[DerivationStep]) -> Result<KExpr, NilError> {
        let mut cur = initial.clone();
        for (index, step) in log.iter().enumerate() {
            let again = self.apply_rule(step.rule, &cur)?;
            if again.output != step.output || step.input != cur {
                return Err(NilError::Replay {
                    index,
                    rule: step.rule,
                    expected: step.output.clone(),
                    found: again.output,
                });
            }
            cur = again.output;
        }
        Ok(cur)
    }

    fn sub(&self, e: KExpr) -> Option<Resolution> {
        self.resolve(&e).ok()
    }

    fn rewrite(&self, rule: RuleId, sym: &KSymbol) -> Option<Rewrite> {
        match rule {
            RuleId::CarterVanish => match sym {
                KSymbol::WhQ { q, group } if *q <= -2 && group.is_finite() => Some((KExpr::zero(), vec![])),
                KSymbol::BassNil { i, ring } if *i <= -2 && ring.is_finite() => {
                    Some((KExpr::zero(), vec![]))
                }
                _ => None,
            },
            RuleId::FjVcVanish => match sym {
                KSymbol::WhQ { q, group } if *q <= -2 && group.is_infinite_vc() => {
                    Some((KExpr::zero(), vec![]))
                }
                _ => None,
            },
            RuleId::BhsSplit => self.bhs(sym),
            RuleId::WaldhausenAmalgam => self.waldhausen(sym),
            RuleId::MvIso => match sym {
                KSymbol::BassNil { i: 0, ring } if *ring == GroupId::Dihedral(2) => {
                    let mut premises = Vec::new();
                    for i in [0, 1] {
                        let r = self.sub(KExpr::symbol(bass(i, &GroupId::C2)))?;
                        if !r.value.is_zero() {
                            return None;
                        }
                        premises.push(Premise {
                            claim: format!("NK_{i}(Z[C2]) = 0"),
                            citation: RuleId::HarmonVanish.citation().into(),
                            derivation: r.log,
                        });
                    }
                    let target = KSymbol::NkFiniteField {
                        i: 1,
                        field_order: 2,
                        group: GroupId::C2,
                    };
                    Some((KExpr::symbol(target), premises))
                }
                _ => None,
            },
            RuleId::Madsen => match sym {
                KSymbol::NkFiniteField {
                    i,
                    field_order,
                    group,
                } if self
                    .axioms
                    .madsen
                    .iter()
                    .any(|a| a.i == *i && a.field_order == *field_order && a.group == *group) =>
                {
                    Some((omega2().into(), vec![]))
                }
                _ => None,
            },
            RuleId::DichotomyNk1D2 => match sym {
                KSymbol::BassNil { i: 1, ring } if *ring == GroupId::Dihedral(2) => {
                    let source = KSymbol::NkFiniteField {
                        i: 2,
                        field_order: 2,
                        group: GroupId::C2,
                    };
                    let r = self.sub(KExpr::symbol(source))?;
                    if r.value != omega2() {
                        return None;
                    }
                    let c2 = self.sub(KExpr::symbol(bass(1, &GroupId::C2)))?;
                    if !c2.value.is_zero() {
                        return None;
                    }
                    let premises = vec![
                        Premise {
                            claim: "NK_1(Z[C2]) = 0, so Mayer-Vietoris gives NK_2(F_2[C2]) ->> NK_1(Z[D2])"
                                .into(),
                            citation: RuleId::MvIso.citation().into(),
                            derivation: c2.log,
                        },
                        Premise {
                            claim: "NK_2(F_2[C2]) = ⊕_∞ Z/2, so NK_1(Z[D2]) has exponent 2 and countable rank"
                                .into(),
                            citation: RuleId::Madsen.citation().into(),
                            derivation: r.log,
                        },
                        Premise {
                            claim: "NK_1(Z[D2]) is nontrivial, hence infinitely generated".into(),
                            citation: "Bass 1968; Farrell 1977".into(),
                            derivation: vec![],
                        },
                    ];
                    Some((omega2().into(), premises))
                }
                _ => None,
            },
            RuleId::HarmonVanish => match sym {
                KSymbol::BassNil { i, ring }
                    if self.axioms.harmon.iter().any(|a| a.i == *i && a.ring == *ring) =>
                {
                    Some((KExpr::zero(), vec![]))
                }
                _ => None,
            },
            RuleId::FjSurjection => match sym {
                KSymbol::WaldNil { i, base, .. } if matches!(i, 0 | 1) => {
                    let r = self.sub(twice(bass(*i, base)))?;
                    if !r.value.is_zero() {
                        return None;
                    }
                    let premises = vec![Premise {
                        claim: format!("2·NK_{i}(Z[{base}]) = 0 surjects onto {sym}"),
                        citation: RuleId::FjSurjection.citation().into(),
                        derivation: r.log,
                    }];
                    Some((KExpr::zero(), premises))
                }
                _ => None,
            },
            RuleId::F2Sandwich => match sym {
                KSymbol::WaldNil { i, base, tag } => {
                    let witness = self
                        .axioms
                        .injections
                        .iter()
                        .find(|w| w.base == *base && w.tag == *tag && w.degrees.contains(i))?;
                    let upper = self.sub(twice(bass(*i, base)))?;
                    let lower = self.sub(KExpr::symbol(bass(*i, base)))?;
                    if upper.value != omega2() || lower.value != omega2() {
                        return None;
                    }
                    let premises = vec![
                        Premise {
                            claim: format!(
                                "2·NK_{i}(Z[{base}]) = {} surjects onto {sym}",
                                upper.value
                            ),
                            citation: RuleId::FjSurjection.citation().into(),
                            derivation: upper.log,
                        },
                        Premise {
                            claim: format!("NK_{i}(Z[{base}]) = {} injects into {sym}", lower.value),
                            citation: witness.citation.clone(),
                            derivation: lower.log,
                        },
                    ];
                    Some((omega2().into(), premises))
                }
                _ => None,
            },
        }
    }

    fn bhs(&self, sym: &KSymbol) -> Option<Rewrite> {
        let KSymbol::WhQ { q, group } = sym else { return None };
        let base = match group {
            GroupId::Z => GroupId::Trivial,
            GroupId::ZxC2 => GroupId::C2,
            GroupId::ProductWithZ(b) => (**b).clone(),
            _ => return None,
        };
        let kb = self.kb?;
        let top = kb.lookup_wh(&base, *q).ok()?;
        let shift = kb.lookup_wh(&base, q - 1).ok()?;
        if !top.value.is_resolved() || !shift.value.is_resolved() {
            return None;
        }
        let premises = vec![
            Premise {
                claim: format!("Wh_{q}({base}) = {}", top.value),
                citation: top.citation,
                derivation: vec![],
            },
            Premise {
                claim: format!("Wh_{}({base}) = {}", q - 1, shift.value),
                citation: shift.citation,
                derivation: vec![],
            },
        ];
        let out = top
            .value
            .direct_sum(&shift.value)
            .direct_sum(&twice(bass(*q, &base)));
        Some((out, premises))
    }

    fn waldhausen(&self, sym: &KSymbol) -> Option<Rewrite> {
        let KSymbol::WhQ { q, group } = sym else { return None };
        if !matches!(q, 0 | 1) {
            return None;
        }
        let shape = self.axioms.amalgams.iter().find(|a| a.names.contains(group))?;
        let kb = self.kb?;
        let mut premises = Vec::new();
        for g in [&shape.vertex, &shape.base] {
            let v = kb.lookup_wh(g, *q).ok()?;
            if !v.value.is_zero() {
                return None;
            }
            premises.push(Premise {
                claim: format!("Wh_{q}({g}) = 0"),
                citation: v.citation,
                derivation: vec![],
            });
        }
        let out = KSymbol::WaldNil {
            i: *q,
            base: shape.base.clone(),
            tag: shape.tag.clone(),
        };
        Some((KExpr::symbol(out), premises))
    }
}

/// Every rule used in `log`, premises included.
pub fn rules_used(log: &[DerivationStep]) -> BTreeSet<RuleId> {
    let mut out = BTreeSet::new();
    for step in log {
        out.insert(step.rule);
        for p in &step.premises {
            out.extend(rules_used(&p.derivation));
        }
    }
    out
}

/// Every citation string in `log`, premises included.
pub fn citations(log: &[DerivationStep]) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for step in log {
        out.insert(step.citation.clone());
        for p in &step.premises {
            out.insert(p.citation.clone());
            out.extend(citations(&p.derivation));
        }
    }
    out
}

/// Indented proof sketch.
pub fn render_log(log: &[DerivationStep]) -> String {
    let mut out = String::new();
    render_into(&mut out, log, 0);
    out
}

fn render_into(out: &mut String, log: &[DerivationStep], depth: usize) {
    let pad = "  ".repeat(depth);
    for step in log {
        let _ = writeln!(out, "{pad}{}  ⟶  {}   [{}]", step.input, step.output, step.rule);
        let _ = writeln!(out, "{pad}    {}", step.citation);
        for p in &step.premises {
            let _ = writeln!(out, "{pad}    since {}   ({})", p.claim, p.citation);
            render_into(out, &p.derivation, depth + 3);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(n: u32) -> GroupId {
        GroupId::Dihedral(n)
    }

    fn wald(i: i32, n: u32, tag: &str) -> KSymbol {
        KSymbol::WaldNil {
            i,
            base: d(n),
            tag: tag.into(),
        }
    }

    #[test]
    fn madsen_axiom() {
        let e = NilEngine::new(None);
        let x = KExpr::symbol(KSymbol::NkFiniteField {
            i: 1,
            field_order: 2,
            group: GroupId::C2,
        });
        let step = e.apply_rule(RuleId::Madsen, &x).unwrap();
        assert_eq!(step.output, omega2().into());
    }

    #[test]
    fn harmon_on_d3() {
        let e = NilEngine::new(None);
        let step = e
            .apply_rule(RuleId::HarmonVanish, &KExpr::symbol(bass(0, &d(3))))
            .unwrap();
        assert!(step.output.is_zero());
    }

    #[test]
    fn no_match_is_an_error() {
        let e = NilEngine::new(None);
        let err = e
            .apply_rule(RuleId::Madsen, &KExpr::symbol(bass(0, &d(3))))
            .unwrap_err();
        assert!(matches!(err, NilError::NoMatch { rule: RuleId::Madsen, .. }));
    }

    #[test]
    fn concrete_is_fixed() {
        let g: KExpr = AbGroup::free(2).into();
        let r = NilEngine::new(None).resolve(&g).unwrap();
        assert_eq!(r.value, AbGroup::free(2));
        assert!(r.log.is_empty());
    }

    #[test]
    fn waldhausen_d3_vanishes() {
        let e = NilEngine::new(None);
        for i in [0, 1] {
            let r = e.resolve_symbol(wald(i, 3, "C")).unwrap();
            assert!(r.value.is_zero());
            assert_eq!(r.log[0].rule, RuleId::FjSurjection);
            assert!(rules_used(&r.log).contains(&RuleId::HarmonVanish));
        }
    }

    #[test]
    fn waldhausen_d2_is_omega() {
        let e = NilEngine::new(None);
        for i in [0, 1] {
            let r = e.resolve_symbol(wald(i, 2, "B")).unwrap();
            assert_eq!(r.value, omega2());
            assert_eq!(r.log[0].rule, RuleId::F2Sandwich);
            let used = rules_used(&r.log);
            assert!(used.contains(&RuleId::Madsen));
            let lemma = if i == 0 { RuleId::MvIso } else { RuleId::DichotomyNk1D2 };
            assert!(used.contains(&lemma));
        }
    }

    #[test]
    fn unknown_tag_is_unresolved() {
        let err = NilEngine::new(None)
            .resolve_symbol(wald(0, 2, "X"))
            .unwrap_err();
        match err {
            NilError::Unresolved { surviving, attempted, .. } => {
                assert_eq!(surviving, vec![wald(0, 2, "X")]);
                assert_eq!(attempted.len(), 10);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn low_degrees_vanish() {
        let e = NilEngine::new(None);
        let x = KExpr::new(
            AbGroup::zero(),
            vec![
                KSymbol::WhQ { q: -3, group: GroupId::C2xS4 },
                KSymbol::WhQ { q: -2, group: GroupId::product_with_dinf(d(3)) },
            ],
        );
        let r = e.resolve(&x).unwrap();
        assert!(r.value.is_zero());
        assert_eq!(r.log.len(), 2);
    }

    #[test]
    fn rule_labels_round_trip() {
        for r in RuleId::ALL {
            assert_eq!(RuleId::parse(&r.label()), Some(r));
            assert_eq!(RuleId::parse(r.name()), Some(r));
        }
        assert_eq!(RuleId::MvIso.label(), "R5 mv_iso");
        assert_eq!(RuleId::parse("R11"), None);
    }

    #[test]
    fn render_mentions_every_rule() {
        let r = NilEngine::new(None).resolve_symbol(wald(0, 2, "B")).unwrap();
        let text = render_log(&r.log);
        for rule in rules_used(&r.log) {
            assert!(text.contains(&rule.label()), "{rule} missing");
        }
    }
}
