//! Group labels, finite-group fingerprints and the subgroup table.
//!
//! Every stabilizer that flows through the pipeline is named by a [`GroupId`].
//! Finite labels are backed by a small permutation realization so that
//! fingerprints and subgroup containment can be computed rather than typed
//! in by hand; infinite labels use structural rules.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Catalog label of a group.
///
/// `Dihedral(n)` is the dihedral group of order `2n`, so `Dihedral(2)` is the
/// Klein four-group. Constructors such as [`GroupId::dihedral_x_c2`] return the
/// canonical label when two spellings name isomorphic groups (for odd `n`,
/// `D_n x C2` is `D_2n`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroupId {
    Trivial,
    C2,
    Dihedral(u32),
    DihedralxC2(u32),
    C2xD4,
    S4,
    C2xS4,
    Z,
    Dinf,
    ZxC2,
    DinfxC2,
    ProductWithDinf(Box<GroupId>),
    ProductWithZ(Box<GroupId>),
    Amalgam(Box<GroupId>, Box<GroupId>, Box<GroupId>),
    P4m,
    P6m,
    P3m1,
    Opaque(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown group label `{0}`")]
pub struct ParseGroupIdError(pub String);

impl GroupId {
    pub fn dihedral(n: u32) -> GroupId {
        match n {
            0 => GroupId::Trivial,
            1 => GroupId::C2,
            n => GroupId::Dihedral(n),
        }
    }

    /// `D_n x C2`, canonicalized.
    pub fn dihedral_x_c2(n: u32) -> GroupId {
        match n {
            0 => GroupId::C2,
            1 => GroupId::Dihedral(2),
            4 => GroupId::C2xD4,
            n if n % 2 == 1 => GroupId::Dihedral(2 * n),
            n => GroupId::DihedralxC2(n),
        }
    }

    /// `base x C2` for the finite labels where the product has a catalog name.
    pub fn times_c2(&self) -> Option<GroupId> {
        match self {
            GroupId::Trivial => Some(GroupId::C2),
            GroupId::C2 => Some(GroupId::Dihedral(2)),
            GroupId::Dihedral(n) => Some(GroupId::dihedral_x_c2(*n)),
            GroupId::S4 => Some(GroupId::C2xS4),
            _ => None,
        }
    }

    pub fn product_with_dinf(base: GroupId) -> GroupId {
        match base {
            GroupId::Trivial => GroupId::Dinf,
            GroupId::C2 => GroupId::DinfxC2,
            b => GroupId::ProductWithDinf(Box::new(b)),
        }
    }

    pub fn product_with_z(base: GroupId) -> GroupId {
        match base {
            GroupId::Trivial => GroupId::Z,
            GroupId::C2 => GroupId::ZxC2,
            b => GroupId::ProductWithZ(Box::new(b)),
        }
    }

    pub fn amalgam(v0: GroupId, edge: GroupId, v1: GroupId) -> GroupId {
        GroupId::Amalgam(Box::new(v0), Box::new(edge), Box::new(v1))
    }

    /// Order of a finite group, `None` for infinite or unknown groups.
    pub fn order(&self) -> Option<u64> {
        match self {
            GroupId::Trivial => Some(1),
            GroupId::C2 => Some(2),
            GroupId::Dihedral(n) => Some(2 * u64::from(*n)),
            GroupId::DihedralxC2(n) => Some(4 * u64::from(*n)),
            GroupId::C2xD4 => Some(16),
            GroupId::S4 => Some(24),
            GroupId::C2xS4 => Some(48),
            GroupId::Opaque(key) => key.parse::<Fingerprint>().ok().map(|fp| fp.order),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.order().is_some()
    }

    /// Infinite virtually cyclic: a finite kernel extended by `Z` or `D_inf`.
    pub fn is_infinite_vc(&self) -> bool {
        self.vc_shape().is_some()
    }

    /// `(finite kernel, dihedral quotient?)` for infinite virtually cyclic labels.
    fn vc_shape(&self) -> Option<(GroupId, bool)> {
        match self {
            GroupId::Z => Some((GroupId::Trivial, false)),
            GroupId::ZxC2 => Some((GroupId::C2, false)),
            GroupId::Dinf => Some((GroupId::Trivial, true)),
            GroupId::DinfxC2 => Some((GroupId::C2, true)),
            GroupId::ProductWithZ(b) if b.is_finite() => Some(((**b).clone(), false)),
            GroupId::ProductWithDinf(b) if b.is_finite() => Some(((**b).clone(), true)),
            GroupId::Amalgam(v0, e, v1) if v0.is_finite() && v1.is_finite() => {
                Some(((**e).clone(), true))
            }
            _ => None,
        }
    }

    /// Finite groups into which every finite subgroup of `self` embeds.
    fn finite_subgroup_bounds(&self) -> Vec<GroupId> {
        match self {
            g if g.is_finite() => vec![g.clone()],
            GroupId::Z => vec![GroupId::Trivial],
            GroupId::ZxC2 | GroupId::Dinf => vec![GroupId::C2],
            GroupId::DinfxC2 => vec![GroupId::Dihedral(2)],
            GroupId::ProductWithZ(b) => vec![(**b).clone()],
            GroupId::ProductWithDinf(b) => b.times_c2().into_iter().collect(),
            GroupId::Amalgam(v0, _, v1) => vec![(**v0).clone(), (**v1).clone()],
            GroupId::P4m => vec![GroupId::Dihedral(4)],
            GroupId::P6m => vec![GroupId::Dihedral(6)],
            GroupId::P3m1 => vec![GroupId::Dihedral(3)],
            _ => vec![],
        }
    }

    fn is_wallpaper(&self) -> bool {
        matches!(self, GroupId::P4m | GroupId::P6m | GroupId::P3m1)
    }
}

/// Whether `sub` is (isomorphic to) a subgroup of `sup`, per the catalog.
///
/// Finite pairs are decided by enumerating the subgroups of `sup` and
/// comparing fingerprints. Infinite virtually cyclic groups are compared by
/// their finite kernel and whether they surject onto `Z` or `D_inf`.
pub fn can_embed(sub: &GroupId, sup: &GroupId) -> bool {
    if sub == sup || *sub == GroupId::Trivial {
        return true;
    }
    if let GroupId::Opaque(_) = sup {
        return false;
    }
    if sub.is_finite() {
        if sup.is_finite() {
            let (Some(sub_fp), Some(subs)) = (fingerprint_of(sub), subgroup_fingerprints(sup))
            else {
                return false;
            };
            return subs.contains(&sub_fp);
        }
        return sup
            .finite_subgroup_bounds()
            .iter()
            .any(|b| b != sup && can_embed(sub, b));
    }
    if sup.is_finite() {
        return false;
    }
    match (sub.vc_shape(), sup.vc_shape()) {
        (Some((k_sub, dih_sub)), Some((k_sup, dih_sup))) => {
            (!dih_sub || dih_sup) && can_embed(&k_sub, &k_sup)
        }
        (Some((k_sub, _)), None) if sup.is_wallpaper() => can_embed(&k_sub, &GroupId::C2),
        _ => false,
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupId::Trivial => f.write_str("Trivial"),
            GroupId::C2 => f.write_str("C2"),
            GroupId::Dihedral(n) => write!(f, "D{n}"),
            GroupId::DihedralxC2(n) => write!(f, "D{n}xC2"),
            GroupId::C2xD4 => f.write_str("C2xD4"),
            GroupId::S4 => f.write_str("S4"),
            GroupId::C2xS4 => f.write_str("C2xS4"),
            GroupId::Z => f.write_str("Z"),
            GroupId::Dinf => f.write_str("Dinf"),
            GroupId::ZxC2 => f.write_str("ZxC2"),
            GroupId::DinfxC2 => f.write_str("DinfxC2"),
            GroupId::ProductWithDinf(b) => write!(f, "{b}xDinf"),
            GroupId::ProductWithZ(b) => write!(f, "{b}xZ"),
            GroupId::Amalgam(a, e, b) => write!(f, "Amalgam({a},{e},{b})"),
            GroupId::P4m => f.write_str("P4m"),
            GroupId::P6m => f.write_str("P6m"),
            GroupId::P3m1 => f.write_str("P3m1"),
            GroupId::Opaque(k) => write!(f, "Opaque({k})"),
        }
    }
}

impl FromStr for GroupId {
    type Err = ParseGroupIdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseGroupIdError(s.to_string());
        let fixed = match s {
            "Trivial" | "1" => Some(GroupId::Trivial),
            "C2" => Some(GroupId::C2),
            "C2xD4" => Some(GroupId::C2xD4),
            "S4" => Some(GroupId::S4),
            "C2xS4" => Some(GroupId::C2xS4),
            "Z" => Some(GroupId::Z),
            "Dinf" => Some(GroupId::Dinf),
            "ZxC2" => Some(GroupId::ZxC2),
            "DinfxC2" => Some(GroupId::DinfxC2),
            "P4m" => Some(GroupId::P4m),
            "P6m" => Some(GroupId::P6m),
            "P3m1" => Some(GroupId::P3m1),
            _ => None,
        };
        if let Some(g) = fixed {
            return Ok(g);
        }
        if let Some(inner) = s.strip_prefix("Opaque(").and_then(|r| r.strip_suffix(')')) {
            return Ok(GroupId::Opaque(inner.to_string()));
        }
        if let Some(inner) = s.strip_prefix("Amalgam(").and_then(|r| r.strip_suffix(')')) {
            let parts = split_top_level(inner);
            if parts.len() != 3 {
                return Err(err());
            }
            let mut it = parts.into_iter().map(str::parse::<GroupId>);
            let (a, e, b) = (it.next().unwrap()?, it.next().unwrap()?, it.next().unwrap()?);
            return Ok(GroupId::amalgam(a, e, b));
        }
        if let Some(base) = s.strip_suffix("xDinf") {
            return Ok(GroupId::product_with_dinf(base.parse()?));
        }
        if let Some(base) = s.strip_suffix("xZ") {
            return Ok(GroupId::product_with_z(base.parse()?));
        }
        if let Some(n) = s.strip_prefix('D').and_then(|r| r.strip_suffix("xC2")) {
            let n: u32 = n.parse().map_err(|_| err())?;
            return Ok(GroupId::dihedral_x_c2(n));
        }
        if let Some(n) = s.strip_prefix('D') {
            let n: u32 = n.parse().map_err(|_| err())?;
            if n == 0 {
                return Err(err());
            }
            return Ok(GroupId::dihedral(n));
        }
        Err(err())
    }
}

fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

impl Serialize for GroupId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GroupId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Isomorphism-invariant summary of a finite group.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fingerprint {
    pub order: u64,
    /// element order -> number of elements of that order
    pub element_orders: BTreeMap<u64, u64>,
    pub center_size: u64,
    pub abelian: bool,
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "o{}|", self.order)?;
        let orders: Vec<String> = self
            .element_orders
            .iter()
            .map(|(o, c)| format!("{o}:{c}"))
            .collect();
        write!(
            f,
            "{}|z{}|{}",
            orders.join(","),
            self.center_size,
            if self.abelian { "ab" } else { "na" }
        )
    }
}

impl FromStr for Fingerprint {
    type Err = ParseGroupIdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseGroupIdError(s.to_string());
        let mut fields = s.split('|');
        let order = fields
            .next()
            .and_then(|f| f.strip_prefix('o'))
            .and_then(|f| f.parse().ok())
            .ok_or_else(err)?;
        let mut element_orders = BTreeMap::new();
        for pair in fields.next().ok_or_else(err)?.split(',') {
            let (o, c) = pair.split_once(':').ok_or_else(err)?;
            element_orders.insert(o.parse().map_err(|_| err())?, c.parse().map_err(|_| err())?);
        }
        let center_size = fields
            .next()
            .and_then(|f| f.strip_prefix('z'))
            .and_then(|f| f.parse().ok())
            .ok_or_else(err)?;
        let abelian = match fields.next() {
            Some("ab") => true,
            Some("na") => false,
            _ => return Err(err()),
        };
        if fields.next().is_some() {
            return Err(err());
        }
        Ok(Fingerprint {
            order,
            element_orders,
            center_size,
            abelian,
        })
    }
}

/// A finite group given by its multiplication table. Element 0 is the identity.
#[derive(Debug, Clone)]
pub struct CayleyTable {
    mul: Vec<Vec<usize>>,
}

impl CayleyTable {
    /// `mul[i][j]` is the index of `e_i * e_j`; index 0 must be the identity.
    pub fn new(mul: Vec<Vec<usize>>) -> Self {
        debug_assert!(mul.iter().all(|row| row.len() == mul.len()));
        CayleyTable { mul }
    }

    pub fn order(&self) -> usize {
        self.mul.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a][b]
    }

    pub fn element_order(&self, a: usize) -> u64 {
        let mut k = 1;
        let mut x = a;
        while x != 0 {
            x = self.mul[x][a];
            k += 1;
        }
        k
    }

    pub fn commutes(&self, a: usize, b: usize) -> bool {
        self.mul[a][b] == self.mul[b][a]
    }

    pub fn fingerprint(&self) -> Fingerprint {
        let n = self.order();
        let mut element_orders = BTreeMap::new();
        for a in 0..n {
            *element_orders.entry(self.element_order(a)).or_insert(0) += 1;
        }
        let center_size = (0..n)
            .filter(|&a| (0..n).all(|b| self.commutes(a, b)))
            .count() as u64;
        Fingerprint {
            order: n as u64,
            element_orders,
            center_size,
            abelian: center_size == n as u64,
        }
    }

    /// Smallest subgroup containing `gens`, as a sorted element list.
    pub fn closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul[x][g];
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        (0..self.order()).filter(|&i| seen[i]).collect()
    }

    /// All subgroups, each as a sorted element list.
    pub fn subgroups(&self) -> Vec<Vec<usize>> {
        let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut queue = VecDeque::new();
        let trivial = vec![0usize];
        found.insert(trivial.clone());
        queue.push_back(trivial);
        while let Some(h) = queue.pop_front() {
            let member: BTreeSet<usize> = h.iter().copied().collect();
            for g in 0..self.order() {
                if member.contains(&g) {
                    continue;
                }
                let mut gens = h.clone();
                gens.push(g);
                let k = self.closure(&gens);
                if found.insert(k.clone()) {
                    queue.push_back(k);
                }
            }
        }
        found.into_iter().collect()
    }

    /// Restriction of the table to a subgroup, reindexed.
    pub fn restrict(&self, elements: &[usize]) -> CayleyTable {
        let index: HashMap<usize, usize> =
            elements.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let mul = elements
            .iter()
            .map(|&a| elements.iter().map(|&b| index[&self.mul[a][b]]).collect())
            .collect();
        CayleyTable { mul }
    }
}

type Perm = Vec<u8>;

fn compose(a: &Perm, b: &Perm) -> Perm {
    // apply b first, then a
    b.iter().map(|&i| a[i as usize]).collect()
}

fn perm_table(degree: usize, gens: &[Perm]) -> CayleyTable {
    let id: Perm = (0..degree as u8).collect();
    let mut elements = vec![id];
    let mut index: HashMap<Perm, usize> = HashMap::from([(elements[0].clone(), 0)]);
    let mut i = 0;
    while i < elements.len() {
        for g in gens {
            let y = compose(&elements[i], g);
            if !index.contains_key(&y) {
                index.insert(y.clone(), elements.len());
                elements.push(y);
            }
        }
        i += 1;
    }
    let mul = elements
        .iter()
        .map(|a| elements.iter().map(|b| index[&compose(a, b)]).collect())
        .collect();
    CayleyTable::new(mul)
}

fn dihedral_gens(n: usize, offset: usize, degree: usize) -> Vec<Perm> {
    let mut rot: Perm = (0..degree as u8).collect();
    let mut refl: Perm = (0..degree as u8).collect();
    for i in 0..n {
        rot[offset + i] = (offset + (i + 1) % n) as u8;
        refl[offset + i] = (offset + (n - i) % n) as u8;
    }
    vec![rot, refl]
}

fn swap_gen(degree: usize, a: usize, b: usize) -> Perm {
    let mut p: Perm = (0..degree as u8).collect();
    p.swap(a, b);
    p
}

/// Permutation realization of a finite catalog label.
pub fn realize(label: &GroupId) -> Option<CayleyTable> {
    let table = match label {
        GroupId::Trivial => perm_table(1, &[]),
        GroupId::C2 => perm_table(2, &[swap_gen(2, 0, 1)]),
        GroupId::Dihedral(2) => perm_table(4, &[swap_gen(4, 0, 1), swap_gen(4, 2, 3)]),
        GroupId::Dihedral(n) => {
            let n = *n as usize;
            perm_table(n, &dihedral_gens(n, 0, n))
        }
        GroupId::DihedralxC2(n) => {
            let n = *n as usize;
            let mut gens = if n == 2 {
                vec![swap_gen(6, 0, 1), swap_gen(6, 2, 3)]
            } else {
                dihedral_gens(n, 0, n + 2)
            };
            let deg = if n == 2 { 6 } else { n + 2 };
            gens.push(swap_gen(deg, deg - 2, deg - 1));
            perm_table(deg, &gens)
        }
        GroupId::C2xD4 => {
            let mut gens = dihedral_gens(4, 0, 6);
            gens.push(swap_gen(6, 4, 5));
            perm_table(6, &gens)
        }
        GroupId::S4 => perm_table(4, &[vec![1, 2, 3, 0], swap_gen(4, 0, 1)]),
        GroupId::C2xS4 => perm_table(
            6,
            &[vec![1, 2, 3, 0, 4, 5], swap_gen(6, 0, 1), swap_gen(6, 4, 5)],
        ),
        _ => return None,
    };
    Some(table)
}

/// Finite labels with precomputed fingerprints, in match-priority order.
pub fn catalog_labels() -> Vec<GroupId> {
    let mut out = vec![GroupId::Trivial, GroupId::C2];
    out.extend((2..=6).map(GroupId::Dihedral));
    for n in 2..=6 {
        let g = GroupId::dihedral_x_c2(n);
        if !out.contains(&g) {
            out.push(g);
        }
    }
    out.push(GroupId::S4);
    out.push(GroupId::C2xS4);
    out
}

fn fingerprint_cache() -> &'static Mutex<HashMap<GroupId, Option<Fingerprint>>> {
    static CACHE: OnceLock<Mutex<HashMap<GroupId, Option<Fingerprint>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn subgroup_cache() -> &'static Mutex<HashMap<GroupId, Option<BTreeSet<Fingerprint>>>> {
    static CACHE: OnceLock<Mutex<HashMap<GroupId, Option<BTreeSet<Fingerprint>>>>> =
        OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Fingerprint of a finite label (from its realization, or parsed from an
/// `Opaque` key).
pub fn fingerprint_of(label: &GroupId) -> Option<Fingerprint> {
    if let GroupId::Opaque(key) = label {
        return key.parse().ok();
    }
    let mut cache = fingerprint_cache().lock().expect("fingerprint cache poisoned");
    cache
        .entry(label.clone())
        .or_insert_with(|| realize(label).map(|t| t.fingerprint()))
        .clone()
}

fn subgroup_fingerprints(label: &GroupId) -> Option<BTreeSet<Fingerprint>> {
    if let Some(hit) = subgroup_cache()
        .lock()
        .expect("subgroup cache poisoned")
        .get(label)
    {
        return hit.clone();
    }
    let computed = realize(label).map(|t| {
        t.subgroups()
            .iter()
            .map(|h| t.restrict(h).fingerprint())
            .collect::<BTreeSet<_>>()
    });
    subgroup_cache()
        .lock()
        .expect("subgroup cache poisoned")
        .insert(label.clone(), computed.clone());
    computed
}

/// Catalog label for a fingerprint, or `Opaque` when nothing matches.
pub fn label_for(fp: &Fingerprint) -> GroupId {
    catalog_labels()
        .into_iter()
        .find(|l| fingerprint_of(l).as_ref() == Some(fp))
        .unwrap_or_else(|| GroupId::Opaque(fp.to_string()))
}
