//! Countable abelian groups in invariant-factor normal form, and formal sums
//! of such groups with unresolved K-theory symbols.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::GroupId;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AbelianError {
    #[error("malformed summand {0}: cyclic orders must be at least 2")]
    Malformed(String),
    #[error("diagonal has {len} entries but ambient rank is {ambient}")]
    DiagonalTooLong { len: usize, ambient: usize },
    #[error("negative diagonal entry {0}")]
    NegativeEntry(BigInt),
    #[error("torsion order {0} does not fit in 64 bits")]
    Overflow(BigInt),
    #[error("invariant factors {0:?} do not form a divisor chain")]
    NotDivisorChain(Vec<u64>),
    #[error("omega order {0} is not a prime power")]
    OmegaNotPrimePower(u64),
}

/// One raw summand: `Z`, `Z/d`, or a countably infinite sum of `Z/d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Summand {
    Free,
    Cyclic(u64),
    Omega(u64),
}

impl fmt::Display for Summand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Summand::Free => f.write_str("Z"),
            Summand::Cyclic(d) => write!(f, "Z/{d}"),
            Summand::Omega(d) => write!(f, "⊕_∞ Z/{d}"),
        }
    }
}

/// Abelian group `Z^r ⊕ Z/f1 ⊕ … ⊕ Z/fk ⊕ (⊕_∞ Z/d for d in omega)`.
///
/// Fields are private so every value is in normal form: `f1 | f2 | …`, each
/// omega order is a prime power, and no finite summand survives whose primary
/// part is already absorbed by an omega summand of the same order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawAbGroup")]
pub struct AbGroup {
    free_rank: usize,
    invariant_factors: Vec<u64>,
    omega: BTreeSet<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAbGroup {
    free_rank: usize,
    #[serde(default)]
    invariant_factors: Vec<u64>,
    #[serde(default)]
    omega: Vec<u64>,
}

impl TryFrom<RawAbGroup> for AbGroup {
    type Error = AbelianError;

    fn try_from(raw: RawAbGroup) -> Result<Self, Self::Error> {
        AbGroup::from_parts(raw.free_rank, raw.invariant_factors, raw.omega)
    }
}

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// `(p, e)` with `d = p^e`, if `d` is a prime power.
pub fn prime_power(d: u64) -> Option<(u64, u32)> {
    match factorize(d).as_slice() {
        [single] => Some(*single),
        _ => None,
    }
}

/// Canonical group for a list of summands.
pub fn normalize(raw: &[Summand]) -> Result<AbGroup, AbelianError> {
    let mut free_rank = 0;
    let mut primary: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    let mut omega = BTreeSet::new();
    for s in raw {
        match *s {
            Summand::Free => free_rank += 1,
            Summand::Cyclic(d) | Summand::Omega(d) if d < 2 => {
                return Err(AbelianError::Malformed(s.to_string()))
            }
            Summand::Cyclic(d) => {
                for (p, e) in factorize(d) {
                    primary.entry(p).or_default().push(e);
                }
            }
            Summand::Omega(d) => {
                for (p, e) in factorize(d) {
                    omega.insert(p.pow(e));
                }
            }
        }
    }
    for (p, exps) in primary.iter_mut() {
        exps.retain(|&e| !omega.contains(&p.pow(e)));
        exps.sort_unstable_by(|a, b| b.cmp(a));
    }
    let len = primary.values().map(Vec::len).max().unwrap_or(0);
    let mut invariant_factors: Vec<u64> = (0..len)
        .map(|k| {
            primary
                .iter()
                .filter_map(|(p, exps)| exps.get(k).map(|&e| p.pow(e)))
                .product()
        })
        .collect();
    invariant_factors.reverse();
    Ok(AbGroup {
        free_rank,
        invariant_factors,
        omega,
    })
}

impl AbGroup {
    pub fn zero() -> Self {
        AbGroup {
            free_rank: 0,
            invariant_factors: Vec::new(),
            omega: BTreeSet::new(),
        }
    }

    pub fn free(rank: usize) -> Self {
        AbGroup {
            free_rank: rank,
            ..AbGroup::zero()
        }
    }

    /// `Z/d`; `d` of 0 or 1 is rejected.
    pub fn cyclic(d: u64) -> Result<Self, AbelianError> {
        normalize(&[Summand::Cyclic(d)])
    }

    /// Countably infinite direct sum of `Z/d`.
    pub fn omega(d: u64) -> Result<Self, AbelianError> {
        normalize(&[Summand::Omega(d)])
    }

    /// Build from stored fields, rejecting anything not already in normal form.
    pub fn from_parts(
        free_rank: usize,
        invariant_factors: Vec<u64>,
        omega: Vec<u64>,
    ) -> Result<Self, AbelianError> {
        if invariant_factors.windows(2).any(|w| w[1] % w[0] != 0) {
            return Err(AbelianError::NotDivisorChain(invariant_factors));
        }
        if let Some(&d) = omega.iter().find(|&&d| prime_power(d).is_none()) {
            return Err(AbelianError::OmegaNotPrimePower(d));
        }
        let mut parts = vec![Summand::Free; free_rank];
        parts.extend(invariant_factors.iter().map(|&d| Summand::Cyclic(d)));
        parts.extend(omega.iter().map(|&d| Summand::Omega(d)));
        let g = normalize(&parts)?;
        let omega: BTreeSet<u64> = omega.into_iter().collect();
        if g.invariant_factors != invariant_factors || g.omega != omega {
            // a finite summand was absorbed by omega; the stored form was not canonical
            return Err(AbelianError::NotDivisorChain(invariant_factors));
        }
        Ok(g)
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn invariant_factors(&self) -> &[u64] {
        &self.invariant_factors
    }

    pub fn omega_orders(&self) -> &BTreeSet<u64> {
        &self.omega
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty() && self.omega.is_empty()
    }

    pub fn is_finitely_generated(&self) -> bool {
        self.omega.is_empty()
    }

    /// Order of the torsion subgroup, `None` if infinite.
    pub fn torsion_order(&self) -> Option<u64> {
        if !self.omega.is_empty() {
            return None;
        }
        self.invariant_factors
            .iter()
            .try_fold(1u64, |acc, &f| acc.checked_mul(f))
    }

    pub fn summands(&self) -> Vec<Summand> {
        let mut out = vec![Summand::Free; self.free_rank];
        out.extend(self.invariant_factors.iter().map(|&d| Summand::Cyclic(d)));
        out.extend(self.omega.iter().map(|&d| Summand::Omega(d)));
        out
    }

    pub fn direct_sum(&self, other: &AbGroup) -> AbGroup {
        let mut parts = self.summands();
        parts.extend(other.summands());
        normalize(&parts).expect("summands of normal forms are well formed")
    }

    /// Cokernel of a map `Z^k -> Z^ambient` whose Smith diagonal is `diag`.
    pub fn from_diagonal(diag: &[BigInt], ambient_rank: usize) -> Result<AbGroup, AbelianError> {
        if diag.len() > ambient_rank {
            return Err(AbelianError::DiagonalTooLong {
                len: diag.len(),
                ambient: ambient_rank,
            });
        }
        let mut parts = Vec::new();
        let mut nonzero = 0;
        for d in diag {
            if d.is_negative() {
                return Err(AbelianError::NegativeEntry(d.clone()));
            }
            if d.is_zero() {
                continue;
            }
            nonzero += 1;
            if !d.is_one() {
                let v = d.to_u64().ok_or_else(|| AbelianError::Overflow(d.clone()))?;
                parts.push(Summand::Cyclic(v));
            }
        }
        parts.extend(std::iter::repeat_n(Summand::Free, ambient_rank - nonzero));
        normalize(&parts)
    }
}

impl std::iter::Sum for AbGroup {
    fn sum<I: Iterator<Item = AbGroup>>(iter: I) -> AbGroup {
        iter.fold(AbGroup::zero(), |acc, g| acc.direct_sum(&g))
    }
}

impl fmt::Display for AbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.invariant_factors.iter().map(|d| format!("Z/{d}")));
        parts.extend(self.omega.iter().map(|d| format!("⊕_∞ Z/{d}")));
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" ⊕ "))
        }
    }
}

/// Unresolved K-theoretic summand.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KSymbol {
    /// `NK_i(Z[ring])`
    BassNil { i: i32, ring: GroupId },
    /// `NK_i(Z[base]; bimodules)`; `tag` names the bimodule pair.
    WaldNil { i: i32, base: GroupId, tag: String },
    /// `Wh_q(group)`
    WhQ { q: i32, group: GroupId },
    /// `NK_i(F_p[group])`
    NkFiniteField { i: i32, field_order: u64, group: GroupId },
}

impl fmt::Display for KSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KSymbol::BassNil { i, ring } => write!(f, "NK_{i}(Z[{ring}])"),
            KSymbol::WaldNil { i, base, tag } => write!(f, "NK_{i}(Z{base}; {tag}1, {tag}2)"),
            KSymbol::WhQ { q, group } => write!(f, "Wh_{q}({group})"),
            KSymbol::NkFiniteField {
                i,
                field_order,
                group,
            } => write!(f, "NK_{i}(F_{field_order}[{group}])"),
        }
    }
}

/// Formal direct sum of a resolved group and a multiset of symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "RawKExpr")]
pub struct KExpr {
    pub resolved: AbGroup,
    /// Kept sorted so equal multisets compare equal.
    symbols: Vec<KSymbol>,
}

#[derive(Deserialize)]
struct RawKExpr {
    resolved: AbGroup,
    #[serde(default)]
    symbols: Vec<KSymbol>,
}

impl From<RawKExpr> for KExpr {
    fn from(raw: RawKExpr) -> Self {
        KExpr::new(raw.resolved, raw.symbols)
    }
}

impl KExpr {
    pub fn zero() -> Self {
        KExpr::from_group(AbGroup::zero())
    }

    pub fn from_group(g: AbGroup) -> Self {
        KExpr {
            resolved: g,
            symbols: Vec::new(),
        }
    }

    pub fn symbol(s: KSymbol) -> Self {
        KExpr {
            resolved: AbGroup::zero(),
            symbols: vec![s],
        }
    }

    pub fn new(resolved: AbGroup, mut symbols: Vec<KSymbol>) -> Self {
        symbols.sort();
        KExpr { resolved, symbols }
    }

    pub fn symbols(&self) -> &[KSymbol] {
        &self.symbols
    }

    pub fn is_resolved(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.symbols.is_empty() && self.resolved.is_zero()
    }

    pub fn direct_sum(&self, other: &KExpr) -> KExpr {
        let mut symbols = self.symbols.clone();
        symbols.extend(other.symbols.iter().cloned());
        KExpr::new(self.resolved.direct_sum(&other.resolved), symbols)
    }

    /// Replace one occurrence of `target` by `replacement`.
    pub fn substitute(&self, target: &KSymbol, replacement: &KExpr) -> Option<KExpr> {
        let pos = self.symbols.iter().position(|s| s == target)?;
        let mut rest = self.symbols.clone();
        rest.remove(pos);
        Some(KExpr::new(self.resolved.clone(), rest).direct_sum(replacement))
    }
}

impl From<AbGroup> for KExpr {
    fn from(g: AbGroup) -> Self {
        KExpr::from_group(g)
    }
}

impl fmt::Display for KExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.resolved.is_zero() || self.symbols.is_empty() {
            parts.push(self.resolved.to_string());
        }
        parts.extend(self.symbols.iter().map(ToString::to_string));
        f.write_str(&parts.join(" ⊕ "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(parts: &[Summand]) -> AbGroup {
        normalize(parts).unwrap()
    }

    #[test]
    fn crt_merges_coprime() {
        let a = g(&[Summand::Cyclic(2), Summand::Cyclic(3)]);
        assert_eq!(a.invariant_factors(), &[6]);
    }

    #[test]
    fn same_prime_stays_split() {
        let a = g(&[Summand::Cyclic(2), Summand::Cyclic(4)]);
        assert_eq!(a.invariant_factors(), &[2, 4]);
    }

    #[test]
    fn omega_absorbs_matching_order() {
        let a = g(&[Summand::Omega(2), Summand::Cyclic(2), Summand::Free]);
        assert_eq!(a.free_rank(), 1);
        assert!(a.invariant_factors().is_empty());
        assert_eq!(a.omega_orders().iter().copied().collect::<Vec<_>>(), vec![2]);
    }

    #[test]
    fn omega_does_not_absorb_higher_power() {
        let a = g(&[Summand::Omega(2), Summand::Cyclic(4)]);
        assert_eq!(a.invariant_factors(), &[4]);
    }

    #[test]
    fn omega_of_composite_splits() {
        let a = g(&[Summand::Omega(6), Summand::Cyclic(6)]);
        assert!(a.invariant_factors().is_empty());
        assert_eq!(a.omega_orders().len(), 2);
    }

    #[test]
    fn malformed_orders_rejected() {
        assert!(normalize(&[Summand::Cyclic(1)]).is_err());
        assert!(normalize(&[Summand::Cyclic(0)]).is_err());
        assert!(normalize(&[Summand::Omega(1)]).is_err());
    }

    #[test]
    fn z4_plus_z4_is_not_z2_z8() {
        let z4 = AbGroup::cyclic(4).unwrap();
        assert_eq!(z4.direct_sum(&z4).invariant_factors(), &[4, 4]);
    }

    #[test]
    fn omega_plus_omega() {
        let w = AbGroup::omega(2).unwrap();
        assert_eq!(w.direct_sum(&w), w);
    }

    #[test]
    fn zero_is_identity() {
        let z2 = AbGroup::free(2);
        assert_eq!(z2.direct_sum(&AbGroup::zero()), z2);
    }

    #[test]
    fn from_diagonal_cases() {
        let big = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        assert_eq!(AbGroup::from_diagonal(&big(&[1, 1]), 4).unwrap(), AbGroup::free(2));
        assert_eq!(
            AbGroup::from_diagonal(&big(&[2]), 1).unwrap(),
            AbGroup::cyclic(2).unwrap()
        );
        let h = AbGroup::from_diagonal(&big(&[2, 4]), 3).unwrap();
        assert_eq!(h.free_rank(), 1);
        assert_eq!(h.invariant_factors(), &[2, 4]);
        assert!(AbGroup::from_diagonal(&big(&[1, 1]), 1).is_err());
        assert!(AbGroup::from_diagonal(&big(&[-2]), 1).is_err());
    }

    #[test]
    fn display() {
        let g = g(&[
            Summand::Cyclic(4),
            Summand::Cyclic(4),
            Summand::Omega(2),
        ]);
        assert_eq!(g.to_string(), "Z/4 ⊕ Z/4 ⊕ ⊕_∞ Z/2");
        assert_eq!(AbGroup::zero().to_string(), "0");
        assert_eq!(AbGroup::free(2).to_string(), "Z^2");
    }

    #[test]
    fn serde_shape() {
        let g = g(&[Summand::Cyclic(4), Summand::Cyclic(4), Summand::Omega(2)]);
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"free_rank":0,"invariant_factors":[4,4],"omega":[2]}"#);
        assert_eq!(serde_json::from_str::<AbGroup>(&s).unwrap(), g);
        assert!(serde_json::from_str::<AbGroup>(
            r#"{"free_rank":0,"invariant_factors":[4,6],"omega":[]}"#
        )
        .is_err());
        assert!(serde_json::from_str::<AbGroup>(
            r#"{"free_rank":0,"invariant_factors":[2],"omega":[2]}"#
        )
        .is_err());
    }

    #[test]
    fn kexpr_multiset() {
        let a = KSymbol::BassNil {
            i: 0,
            ring: GroupId::Dihedral(2),
        };
        let b = KSymbol::WhQ {
            q: 1,
            group: GroupId::Z,
        };
        let x = KExpr::symbol(a.clone()).direct_sum(&KExpr::symbol(b.clone()));
        let y = KExpr::symbol(b.clone()).direct_sum(&KExpr::symbol(a.clone()));
        assert_eq!(x, y);
        let z = x.substitute(&a, &KExpr::zero()).unwrap();
        assert_eq!(z, KExpr::symbol(b));
        assert!(z.substitute(&a, &KExpr::zero()).is_none());
    }
}
