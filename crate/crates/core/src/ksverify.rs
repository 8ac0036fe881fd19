//! Kochen-Specker sets in observable form and projector form.
//!
//! An [`ObservableKsSet`] lists Pauli observables and the identity products
//! (contexts) built from them. A [`ProjectorKsSet`] lists projectors and the
//! complete orthogonal bases they form. Both can be checked with the parity
//! criterion; projector sets can also be checked by exhaustive 0/1 coloring
//! and observable sets by solving the product rule over GF(2).

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::dense;
use crate::error::{Error, Result};
use crate::pauli::{id_sign, Letter, PauliObservable, Sign};
use crate::stabilizer::{complete_cliques, eigenbasis, IdentityProduct, StabilizerProjector};

/// Projector count above which exhaustive coloring refuses to run.
pub const EXHAUSTIVE_LIMIT: usize = 40;

/// One context of an observable set: member indices and the ID sign.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Context {
    pub members: Vec<usize>,
    pub sign: Sign,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ObservableKsSet {
    pub name: String,
    pub n_qubits: usize,
    pub observables: Vec<PauliObservable>,
    pub contexts: Vec<Context>,
}

#[derive(Deserialize)]
struct RawObservableSet {
    name: String,
    n_qubits: usize,
    observables: Vec<PauliObservable>,
    contexts: Vec<Context>,
}

impl<'de> Deserialize<'de> for ObservableKsSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawObservableSet::deserialize(d)?;
        ObservableKsSet::new(raw.name, raw.n_qubits, raw.observables, raw.contexts).map_err(serde::de::Error::custom)
    }
}

impl ObservableKsSet {
    /// Build and validate. Every context must be an identity product with
    /// the stated sign, and every observable must appear in some context.
    pub fn new(
        name: impl Into<String>,
        n_qubits: usize,
        observables: Vec<PauliObservable>,
        contexts: Vec<Context>,
    ) -> Result<Self> {
        let set = Self { name: name.into(), n_qubits, observables, contexts };
        set.validate()?;
        Ok(set)
    }

    /// Build from member index lists, computing each sign.
    pub fn from_member_lists(
        name: impl Into<String>,
        n_qubits: usize,
        observables: Vec<PauliObservable>,
        members: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let mut contexts = Vec::with_capacity(members.len());
        for (index, m) in members.into_iter().enumerate() {
            let obs = m
                .iter()
                .map(|&k| observables.get(k).cloned())
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::InvalidContext { index, reason: "member index out of range".into() })?;
            let sign = id_sign(&obs).map_err(|e| Error::InvalidContext { index, reason: e.to_string() })?;
            contexts.push(Context { members: m, sign });
        }
        Self::new(name, n_qubits, observables, contexts)
    }

    pub fn validate(&self) -> Result<()> {
        for o in &self.observables {
            if o.n_qubits() != self.n_qubits {
                return Err(Error::QubitMismatch { left: self.n_qubits, right: o.n_qubits() });
            }
        }
        let mut seen = vec![false; self.observables.len()];
        for (index, c) in self.contexts.iter().enumerate() {
            let members = self.context_observables(index).ok_or_else(|| Error::InvalidContext {
                index,
                reason: "member index out of range".into(),
            })?;
            let s = id_sign(&members).map_err(|e| Error::InvalidContext { index, reason: e.to_string() })?;
            if s != c.sign {
                return Err(Error::InvalidContext { index, reason: format!("stated sign {} but product is {}I", c.sign, s) });
            }
            for &m in &c.members {
                seen[m] = true;
            }
        }
        if let Some(k) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidContext {
                index: self.contexts.len(),
                reason: format!("observable {} is in no context", self.observables[k]),
            });
        }
        Ok(())
    }

    pub fn context_observables(&self, index: usize) -> Option<Vec<PauliObservable>> {
        self.contexts.get(index)?.members.iter().map(|&k| self.observables.get(k).cloned()).collect()
    }

    pub fn identity_product(&self, index: usize) -> Result<IdentityProduct> {
        let obs = self
            .context_observables(index)
            .ok_or_else(|| Error::InvalidContext { index, reason: "no such context".into() })?;
        IdentityProduct::new(obs)
    }

    pub fn negative_contexts(&self) -> usize {
        self.contexts.iter().filter(|c| c.sign.is_minus()).count()
    }

    /// Number of contexts each observable belongs to.
    pub fn incidence(&self) -> Vec<usize> {
        let mut inc = vec![0; self.observables.len()];
        for c in &self.contexts {
            for &m in &c.members {
                inc[m] += 1;
            }
        }
        inc
    }

    pub fn index_of(&self, obs: &PauliObservable) -> Option<usize> {
        self.observables.iter().position(|o| o.same_letters(obs))
    }
}

/// A projector in a projector-form set: a stabilizer projector or a raw ray.
#[derive(Clone, Debug, PartialEq)]
pub enum SetProjector {
    Stabilizer(StabilizerProjector),
    Ray(Vec<C64>),
}

impl SetProjector {
    /// A ray, normalized on ingestion.
    pub fn ray(v: Vec<C64>) -> Result<Self> {
        Ok(SetProjector::Ray(dense::normalize(&v)?))
    }

    pub fn dimension(&self) -> usize {
        match self {
            SetProjector::Stabilizer(p) => 1 << p.n_qubits(),
            SetProjector::Ray(v) => v.len(),
        }
    }

    pub fn rank(&self) -> u64 {
        match self {
            SetProjector::Stabilizer(p) => p.rank(),
            SetProjector::Ray(_) => 1,
        }
    }

    pub fn as_stabilizer(&self) -> Option<&StabilizerProjector> {
        match self {
            SetProjector::Stabilizer(p) => Some(p),
            SetProjector::Ray(_) => None,
        }
    }

    /// `Π|v⟩`.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        match self {
            SetProjector::Stabilizer(p) => p.apply(v),
            SetProjector::Ray(r) => {
                let a = dense::inner(r, v);
                r.iter().map(|x| x * a).collect()
            }
        }
    }

    pub fn dense_matrix(&self) -> Result<DMatrix<C64>> {
        match self {
            SetProjector::Stabilizer(p) => p.dense_matrix(),
            SetProjector::Ray(r) => {
                let d = r.len();
                Ok(DMatrix::from_fn(d, d, |i, j| r[i] * r[j].conj()))
            }
        }
    }

    pub fn orthogonal(&self, other: &SetProjector) -> bool {
        match (self, other) {
            (SetProjector::Stabilizer(a), SetProjector::Stabilizer(b)) => a.orthogonal(b),
            (SetProjector::Ray(a), SetProjector::Ray(b)) => dense::inner(a, b).norm() < 1e-9,
            (SetProjector::Ray(r), p @ SetProjector::Stabilizer(_))
            | (p @ SetProjector::Stabilizer(_), SetProjector::Ray(r)) => dense::norm_sqr(&p.apply(r)) < 1e-9,
        }
    }

    /// Diagonal in the computational basis.
    pub fn is_diagonal(&self) -> bool {
        match self {
            SetProjector::Stabilizer(p) => p.is_diagonal(),
            SetProjector::Ray(r) => r.iter().filter(|x| x.norm() > 1e-9).count() == 1,
        }
    }

    /// `⟨v|Π|v⟩ ≈ 1` for a normalized `v`.
    pub fn contains_state(&self, v: &[C64]) -> bool {
        (dense::norm_sqr(&self.apply(v)) - 1.0).abs() < 1e-9
    }

    /// `⟨v|Π|v⟩ ≈ 0`.
    pub fn annihilates(&self, v: &[C64]) -> bool {
        dense::norm_sqr(&self.apply(v)) < 1e-9
    }
}

impl fmt::Display for SetProjector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetProjector::Stabilizer(p) => write!(f, "{p}"),
            SetProjector::Ray(r) => {
                f.write_str("(")?;
                for (k, a) in r.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    if a.im.abs() < 1e-12 {
                        write!(f, "{:.4}", a.re)?;
                    } else {
                        write!(f, "{:.4}{:+.4}i", a.re, a.im)?;
                    }
                }
                f.write_str(")")
            }
        }
    }
}

/// Which bases to include when turning an observable set into a projector set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisMode {
    /// Only the eigenbases of the contexts.
    Eigen,
    /// Eigenbases followed by every other complete orthogonal basis.
    WithHybrids,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProjectorKsSet {
    pub name: String,
    pub dimension: usize,
    pub projectors: Vec<SetProjector>,
    pub bases: Vec<Vec<usize>>,
}

impl ProjectorKsSet {
    pub fn new(name: impl Into<String>, projectors: Vec<SetProjector>, bases: Vec<Vec<usize>>) -> Result<Self> {
        let dimension = projectors.first().map(SetProjector::dimension).unwrap_or(0);
        let set = Self { name: name.into(), dimension, projectors, bases };
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<()> {
        for p in &self.projectors {
            if p.dimension() != self.dimension {
                return Err(Error::DimensionMismatch(self.dimension, p.dimension()));
            }
        }
        for (index, b) in self.bases.iter().enumerate() {
            if let Some(&k) = b.iter().find(|&&k| k >= self.projectors.len()) {
                return Err(Error::InvalidBasis { index, reason: format!("projector index {k} out of range") });
            }
            for (i, &p) in b.iter().enumerate() {
                for &q in &b[i + 1..] {
                    if p == q || !self.projectors[p].orthogonal(&self.projectors[q]) {
                        return Err(Error::InvalidBasis { index, reason: format!("projectors {p} and {q} are not orthogonal") });
                    }
                }
            }
            let total: u64 = b.iter().map(|&k| self.projectors[k].rank()).sum();
            if total != self.dimension as u64 {
                return Err(Error::InvalidBasis { index, reason: format!("ranks sum to {total}, dimension is {}", self.dimension) });
            }
        }
        Ok(())
    }

    /// Projector form of an observable set: the eigenbases of all contexts in
    /// context order, optionally followed by the remaining complete bases in
    /// lexicographic order of their sorted member indices.
    pub fn from_observable_set(set: &ObservableKsSet, mode: BasisMode) -> Result<Self> {
        let mut projectors: Vec<StabilizerProjector> = Vec::new();
        let mut lookup: HashMap<StabilizerProjector, usize> = HashMap::new();
        let mut bases = Vec::new();
        for index in 0..set.contexts.len() {
            let id = set.identity_product(index)?;
            let mut basis = Vec::new();
            for p in eigenbasis(&id, set.n_qubits)? {
                let k = *lookup.entry(p.clone()).or_insert_with(|| {
                    projectors.push(p);
                    projectors.len() - 1
                });
                basis.push(k);
            }
            bases.push(basis);
        }
        if mode == BasisMode::WithHybrids {
            let known: BTreeSet<Vec<usize>> = bases
                .iter()
                .map(|b| {
                    let mut s = b.clone();
                    s.sort_unstable();
                    s
                })
                .collect();
            let ranks: Vec<u64> = projectors.iter().map(StabilizerProjector::rank).collect();
            let all = complete_cliques(&ranks, 1 << set.n_qubits, |i, j| projectors[i].orthogonal(&projectors[j]));
            bases.extend(all.into_iter().filter(|b| !known.contains(b)));
        }
        let projectors = projectors.into_iter().map(SetProjector::Stabilizer).collect();
        Self::new(set.name.clone(), projectors, bases)
    }

    /// A set of raw vectors with every complete orthogonal basis among them.
    pub fn from_rays(name: impl Into<String>, rays: Vec<Vec<C64>>) -> Result<Self> {
        let projectors = rays.into_iter().map(SetProjector::ray).collect::<Result<Vec<_>>>()?;
        let dim = projectors.first().map(SetProjector::dimension).unwrap_or(0) as u64;
        let ranks = vec![1; projectors.len()];
        let bases = complete_cliques(&ranks, dim, |i, j| projectors[i].orthogonal(&projectors[j]));
        Self::new(name, projectors, bases)
    }

    /// A set consisting of one basis.
    pub fn single_basis(name: impl Into<String>, projectors: Vec<SetProjector>) -> Result<Self> {
        let basis = (0..projectors.len()).collect();
        Self::new(name, projectors, vec![basis])
    }

    pub fn incidence(&self) -> Vec<usize> {
        let mut inc = vec![0; self.projectors.len()];
        for b in &self.bases {
            for &k in b {
                inc[k] += 1;
            }
        }
        inc
    }

    /// Every orthogonal pair of projectors appears together in some basis.
    pub fn is_saturated(&self) -> bool {
        let n = self.projectors.len();
        let mut together = vec![vec![false; n]; n];
        for b in &self.bases {
            for &p in b {
                for &q in b {
                    together[p][q] = true;
                }
            }
        }
        (0..n).all(|i| (i + 1..n).all(|j| together[i][j] || !self.projectors[i].orthogonal(&self.projectors[j])))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KsVerdict {
    #[serde(rename = "KS_by_parity")]
    KsByParity,
    #[serde(rename = "KS_by_exhaustion")]
    KsByExhaustion,
    Colorable,
    #[serde(rename = "NotKS_parity_fails")]
    NotKsParityFails,
}

impl KsVerdict {
    pub fn is_ks(self) -> bool {
        matches!(self, KsVerdict::KsByParity | KsVerdict::KsByExhaustion)
    }
}

impl fmt::Display for KsVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KsVerdict::KsByParity => "KS_by_parity",
            KsVerdict::KsByExhaustion => "KS_by_exhaustion",
            KsVerdict::Colorable => "Colorable",
            KsVerdict::NotKsParityFails => "NotKS_parity_fails",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    /// Incidence counts per element, with the number of negative contexts
    /// (observable form) or total bases (projector form).
    Parity { incidence: Vec<usize>, contexts: usize, negative_contexts: usize },
    /// The search space was exhausted after visiting this many nodes.
    Exhausted { nodes: u64 },
    /// A projector coloring: one entry per projector, exactly one 1 per basis.
    ProjectorColoring { values: Vec<u8> },
    /// An eigenvalue per observable satisfying every product rule.
    ObservableColoring { values: Vec<Sign> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KsCertificate {
    pub verdict: KsVerdict,
    pub evidence: Evidence,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyMode {
    Parity,
    Exhaustive,
}

impl FromStr for VerifyMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "parity" => Ok(VerifyMode::Parity),
            "exhaustive" => Ok(VerifyMode::Exhaustive),
            _ => Err(Error::Input(format!("unknown mode {s:?} (expected parity or exhaustive)"))),
        }
    }
}

/// Parity test: every observable in an even number of contexts and an odd
/// number of negative contexts.
pub fn verify_observable_ks(set: &ObservableKsSet) -> Result<KsCertificate> {
    set.validate()?;
    let incidence = set.incidence();
    let negative = set.negative_contexts();
    let ks = incidence.iter().all(|c| c % 2 == 0) && negative % 2 == 1;
    Ok(KsCertificate {
        verdict: if ks { KsVerdict::KsByParity } else { KsVerdict::NotKsParityFails },
        evidence: Evidence::Parity { incidence, contexts: set.contexts.len(), negative_contexts: negative },
    })
}

/// Decide whether ±1 values can be given to the observables so every context
/// multiplies to its sign. This is a linear system over GF(2).
pub fn color_observables(set: &ObservableKsSet) -> Option<Vec<Sign>> {
    let n = set.observables.len();
    let words = n.div_ceil(64);
    let mut rows: Vec<(Vec<u64>, bool)> = set
        .contexts
        .iter()
        .map(|c| {
            let mut v = vec![0u64; words];
            for &m in &c.members {
                v[m / 64] ^= 1 << (m % 64);
            }
            (v, c.sign.is_minus())
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let bit = |v: &Vec<u64>| (v[col / 64] >> (col % 64)) & 1 == 1;
        let Some(k) = (r..rows.len()).find(|&k| bit(&rows[k].0)) else { continue };
        rows.swap(r, k);
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && bit(&row.0) {
                for (a, b) in row.0.iter_mut().zip(&pivot.0) {
                    *a ^= b;
                }
                row.1 ^= pivot.1;
            }
        }
        pivots.push(col);
        r += 1;
    }
    if rows[r..].iter().any(|row| row.1) {
        return None;
    }
    let mut values = vec![Sign::Plus; n];
    for (row, &col) in rows.iter().zip(&pivots) {
        values[col] = Sign::from_parity(row.1);
    }
    Some(values)
}

/// Observable-form check with a chosen mode. Exhaustive mode solves the
/// product rules exactly and returns a witness coloring when one exists.
pub fn verify_observable_ks_with(set: &ObservableKsSet, mode: VerifyMode) -> Result<KsCertificate> {
    match mode {
        VerifyMode::Parity => verify_observable_ks(set),
        VerifyMode::Exhaustive => {
            set.validate()?;
            Ok(match color_observables(set) {
                Some(values) => KsCertificate { verdict: KsVerdict::Colorable, evidence: Evidence::ObservableColoring { values } },
                None => KsCertificate {
                    verdict: KsVerdict::KsByExhaustion,
                    evidence: Evidence::Exhausted { nodes: set.contexts.len() as u64 },
                },
            })
        }
    }
}

pub fn verify_projector_ks(set: &ProjectorKsSet, mode: VerifyMode) -> Result<KsCertificate> {
    match mode {
        VerifyMode::Parity => {
            let incidence = set.incidence();
            let ks = incidence.iter().all(|c| c % 2 == 0) && set.bases.len() % 2 == 1;
            Ok(KsCertificate {
                verdict: if ks { KsVerdict::KsByParity } else { KsVerdict::NotKsParityFails },
                evidence: Evidence::Parity { incidence, contexts: set.bases.len(), negative_contexts: set.bases.len() },
            })
        }
        VerifyMode::Exhaustive => {
            let (coloring, nodes) = exhaustive_coloring(set)?;
            Ok(match coloring {
                Some(values) => KsCertificate { verdict: KsVerdict::Colorable, evidence: Evidence::ProjectorColoring { values } },
                None => KsCertificate { verdict: KsVerdict::KsByExhaustion, evidence: Evidence::Exhausted { nodes } },
            })
        }
    }
}

/// Backtracking search for a 0/1 coloring with exactly one 1 per basis.
/// Branches on the uncovered basis with the fewest open members.
pub fn exhaustive_coloring(set: &ProjectorKsSet) -> Result<(Option<Vec<u8>>, u64)> {
    let n = set.projectors.len();
    if n > EXHAUSTIVE_LIMIT {
        return Err(Error::ExhaustiveLimit { size: n, limit: EXHAUSTIVE_LIMIT });
    }
    let masks: Vec<u64> = set.bases.iter().map(|b| b.iter().fold(0u64, |m, &k| m | (1 << k))).collect();
    let mut neighbours = vec![0u64; n];
    for m in &masks {
        for k in 0..n {
            if m >> k & 1 == 1 {
                neighbours[k] |= m & !(1 << k);
            }
        }
    }
    fn search(masks: &[u64], neighbours: &[u64], ones: u64, zeros: u64, nodes: &mut u64) -> Option<u64> {
        *nodes += 1;
        let mut best: Option<(u32, u64)> = None;
        for &m in masks {
            if m & ones != 0 {
                continue;
            }
            let open = m & !zeros;
            let c = open.count_ones();
            if c == 0 {
                return None;
            }
            if best.is_none_or(|(bc, _)| c < bc) {
                best = Some((c, open));
            }
        }
        let Some((_, mut open)) = best else {
            return Some(ones);
        };
        while open != 0 {
            let k = open.trailing_zeros() as usize;
            open &= open - 1;
            if let Some(sol) = search(masks, neighbours, ones | (1 << k), zeros | neighbours[k], nodes) {
                return Some(sol);
            }
        }
        None
    }
    let mut nodes = 0;
    let sol = search(&masks, &neighbours, 0, 0, &mut nodes);
    Ok((sol.map(|ones| (0..n).map(|k| (ones >> k & 1) as u8).collect()), nodes))
}

/// Re-check a certificate against the set it was produced for.
pub fn recheck_projector_certificate(set: &ProjectorKsSet, cert: &KsCertificate) -> bool {
    match &cert.evidence {
        Evidence::ProjectorColoring { values } => set.bases.iter().all(|b| b.iter().map(|&k| u32::from(values[k])).sum::<u32>() == 1),
        Evidence::Parity { incidence, contexts, .. } => {
            let ks = incidence.iter().all(|c| c % 2 == 0) && contexts % 2 == 1;
            *incidence == set.incidence() && ks == (cert.verdict == KsVerdict::KsByParity)
        }
        Evidence::Exhausted { .. } => matches!(exhaustive_coloring(set), Ok((None, _))),
        Evidence::ObservableColoring { .. } => false,
    }
}

pub fn recheck_observable_certificate(set: &ObservableKsSet, cert: &KsCertificate) -> bool {
    match &cert.evidence {
        Evidence::ObservableColoring { values } => set
            .contexts
            .iter()
            .all(|c| Sign::product(c.members.iter().map(|&k| values[k])) == c.sign),
        Evidence::Parity { incidence, negative_contexts, .. } => {
            let ks = incidence.iter().all(|c| c % 2 == 0) && negative_contexts % 2 == 1;
            *incidence == set.incidence() && *negative_contexts == set.negative_contexts() && ks == (cert.verdict == KsVerdict::KsByParity)
        }
        Evidence::Exhausted { .. } => color_observables(set).is_none(),
        Evidence::ProjectorColoring { .. } => false,
    }
}

/// Catalog set names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CatalogName {
    Square3,
    Square2,
    Wheel(usize),
    GhzStar,
    ClassicalId { n: usize, m: usize },
}

impl FromStr for CatalogName {
    type Err = Error;

    /// Accepts `square3`, `square2`, `ghz_star`, `wheelN`, `wheel(N)`,
    /// `wheel:N`, `classical_id(N,m)` and `classical_id:N,m`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "square3" => return Ok(CatalogName::Square3),
            "square2" => return Ok(CatalogName::Square2),
            "ghz_star" => return Ok(CatalogName::GhzStar),
            _ => {}
        }
        let args = |rest: &str| -> Option<Vec<usize>> {
            let inner = rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')).or_else(|| rest.strip_prefix(':')).unwrap_or(rest);
            inner.split(',').map(|a| a.trim().parse().ok()).collect()
        };
        if let Some(rest) = s.strip_prefix("wheel") {
            if let Some([n]) = args(rest).as_deref() {
                return Ok(CatalogName::Wheel(*n));
            }
        }
        if let Some(rest) = s.strip_prefix("classical_id") {
            if let Some([n, m]) = args(rest).as_deref() {
                return Ok(CatalogName::ClassicalId { n: *n, m: *m });
            }
        }
        Err(Error::UnknownSet(s.to_string()))
    }
}

impl fmt::Display for CatalogName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatalogName::Square3 => f.write_str("square3"),
            CatalogName::Square2 => f.write_str("square2"),
            CatalogName::Wheel(n) => write!(f, "wheel{n}"),
            CatalogName::GhzStar => f.write_str("ghz_star"),
            CatalogName::ClassicalId { n, m } => write!(f, "classical_id({n},{m})"),
        }
    }
}

fn obs_list(items: &[&str]) -> Vec<PauliObservable> {
    items.iter().map(|s| s.parse().expect("catalog literal")).collect()
}

/// Build a catalog set from its name.
pub fn catalog(name: &CatalogName) -> Result<ObservableKsSet> {
    let label = name.to_string();
    match name {
        CatalogName::Square3 => {
            let obs = obs_list(&["ZIZ", "ZZI", "IZZ", "XIX", "XXI", "IXX", "YIY", "YYI", "IYY"]);
            let contexts = vec![vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8], vec![3, 6, 0], vec![4, 7, 1], vec![5, 8, 2]];
            ObservableKsSet::from_member_lists(label, 3, obs, contexts)
        }
        CatalogName::Square2 => {
            let obs = obs_list(&["XI", "IX", "XX", "IZ", "ZI", "ZZ", "XZ", "ZX", "YY"]);
            let contexts = vec![vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8], vec![0, 3, 6], vec![1, 4, 7], vec![2, 5, 8]];
            ObservableKsSet::from_member_lists(label, 2, obs, contexts)
        }
        CatalogName::Wheel(n) => wheel(*n, label),
        CatalogName::GhzStar => {
            let obs = obs_list(&["XII", "IXI", "IIX", "XXX", "IYI", "IIY", "XYY", "YII", "YXY", "YYX"]);
            let contexts = vec![vec![0, 1, 2, 3], vec![0, 4, 5, 6], vec![7, 1, 5, 8], vec![7, 4, 2, 9], vec![3, 6, 8, 9]];
            ObservableKsSet::from_member_lists(label, 3, obs, contexts)
        }
        CatalogName::ClassicalId { n, m } => classical_id(*n, *m, label),
    }
}

/// Catalog lookup by string name.
pub fn catalog_by_name(name: &str) -> Result<ObservableKsSet> {
    catalog(&name.parse()?)
}

fn pair(n: usize, j: usize, l: Letter) -> PauliObservable {
    let mut letters = vec![Letter::I; n];
    letters[j] = l;
    letters[(j + 1) % n] = l;
    PauliObservable::from_letters(&letters, Sign::Plus)
}

fn wheel(n: usize, label: String) -> Result<ObservableKsSet> {
    if n < 3 {
        return Err(Error::CatalogParameters(format!("wheel needs N >= 3, got {n}")));
    }
    let mut obs = Vec::with_capacity(3 * n);
    for l in [Letter::Z, Letter::X, Letter::Y] {
        obs.extend((0..n).map(|j| pair(n, j, l)));
    }
    let mut contexts: Vec<Vec<usize>> = (0..3).map(|r| (r * n..(r + 1) * n).collect()).collect();
    contexts.extend((0..n).map(|j| vec![n + j, 2 * n + j, j]));
    ObservableKsSet::from_member_lists(label, n, obs, contexts)
}

fn classical_id(n: usize, m: usize, label: String) -> Result<ObservableKsSet> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::CatalogParameters(format!("classical_id needs even N > 0, got {n}")));
    }
    if m % 2 == 0 {
        return Err(Error::CatalogParameters(format!("classical_id needs odd m, got {m}")));
    }
    let q = n + m;
    let obs: Vec<PauliObservable> = (0..q)
        .map(|k| {
            let letters: Vec<Letter> = (0..q).map(|j| if (j + q - k) % q < m { Letter::I } else { Letter::Z }).collect();
            PauliObservable::from_letters(&letters, Sign::Plus)
        })
        .collect();
    ObservableKsSet::from_member_lists(label, q, obs, vec![(0..q).collect()])
}

/// Close every context under multiplication. Missing products are appended
/// with sign `+1`; every commuting triple `P, Q, ±PQ` of the enlarged list
/// that is not already a context becomes a new context.
pub fn complete_substabilizers(set: &ObservableKsSet) -> ObservableKsSet {
    let mut observables = set.observables.clone();
    let find = |list: &[PauliObservable], p: &PauliObservable| list.iter().position(|o| o.same_letters(p));
    for index in 0..set.contexts.len() {
        let members = set.context_observables(index).expect("validated set");
        let mut elements = vec![PauliObservable::identity(set.n_qubits)];
        for m in &members {
            if elements.iter().any(|e| e.same_letters(m)) {
                continue;
            }
            let extra: Vec<_> = elements.iter().map(|e| e.multiply(m).expect("same size").observable).collect();
            elements.extend(extra);
        }
        for e in elements {
            if !e.is_identity() && find(&observables, &e).is_none() {
                observables.push(e);
            }
        }
    }
    let mut contexts = set.contexts.clone();
    let mut known: BTreeSet<Vec<usize>> = contexts
        .iter()
        .map(|c| {
            let mut m = c.members.clone();
            m.sort_unstable();
            m
        })
        .collect();
    let count = observables.len();
    for i in 0..count {
        for j in i + 1..count {
            if !observables[i].commutes_with(&observables[j]) {
                continue;
            }
            let prod = observables[i].multiply(&observables[j]).expect("same size").observable;
            let Some(k) = find(&observables, &prod) else { continue };
            if k <= j {
                continue;
            }
            let members = vec![i, j, k];
            if known.insert(members.clone()) {
                let sign = id_sign(&[observables[i].clone(), observables[j].clone(), observables[k].clone()])
                    .expect("commuting triple with identity product");
                contexts.push(Context { members, sign });
            }
        }
    }
    ObservableKsSet { name: set.name.clone(), n_qubits: set.n_qubits, observables, contexts }
}

/// A 3×3 grid of three-member contexts: three disjoint rows and three
/// disjoint columns, each column meeting each row once.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SquareSubset {
    pub rows: [usize; 3],
    pub columns: [usize; 3],
    pub negative: usize,
}

impl SquareSubset {
    pub fn is_ks(&self) -> bool {
        self.negative % 2 == 1
    }
}

/// All square-shaped subsets of a set's three-member contexts, each reported
/// once.
pub fn find_squares(set: &ObservableKsSet) -> Vec<SquareSubset> {
    let triples: Vec<usize> = (0..set.contexts.len()).filter(|&c| set.contexts[c].members.len() == 3).collect();
    let members = |c: usize| -> BTreeSet<usize> { set.contexts[c].members.iter().copied().collect() };
    let disjoint = |a: usize, b: usize| members(a).is_disjoint(&members(b));
    let mut seen: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    let mut out = Vec::new();
    for (ai, &a) in triples.iter().enumerate() {
        for (bi, &b) in triples.iter().enumerate().skip(ai + 1) {
            if !disjoint(a, b) {
                continue;
            }
            for &c in triples.iter().skip(bi + 1) {
                if !disjoint(a, c) || !disjoint(b, c) {
                    continue;
                }
                let rows = [a, b, c];
                let cols: Vec<usize> = triples
                    .iter()
                    .copied()
                    .filter(|&q| !rows.contains(&q))
                    .filter(|&q| rows.iter().all(|&r| members(q).intersection(&members(r)).count() == 1))
                    .collect();
                for (xi, &x) in cols.iter().enumerate() {
                    for (yi, &y) in cols.iter().enumerate().skip(xi + 1) {
                        if !disjoint(x, y) {
                            continue;
                        }
                        for &z in cols.iter().skip(yi + 1) {
                            if !disjoint(x, z) || !disjoint(y, z) {
                                continue;
                            }
                            let key: BTreeSet<usize> = [a, b, c, x, y, z].into_iter().collect();
                            if !seen.insert(key) {
                                continue;
                            }
                            let negative = [a, b, c, x, y, z].iter().filter(|&&k| set.contexts[k].sign.is_minus()).count();
                            out.push(SquareSubset { rows, columns: [x, y, z], negative });
                        }
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square3_parity() {
        let set = catalog(&CatalogName::Square3).unwrap();
        let cert = verify_observable_ks(&set).unwrap();
        assert_eq!(cert.verdict, KsVerdict::KsByParity);
        assert_eq!(set.negative_contexts(), 3);
        assert!(recheck_observable_certificate(&set, &cert));
        assert_eq!(color_observables(&set), None);
    }

    #[test]
    fn wheel_signs() {
        for n in 3..=7 {
            let set = catalog(&CatalogName::Wheel(n)).unwrap();
            let signs: Vec<_> = set.contexts.iter().map(|c| c.sign).collect();
            assert!(signs[..3].iter().all(|s| *s == Sign::Plus));
            assert!(signs[3..].iter().all(|s| *s == Sign::Minus));
            assert!(set.incidence().iter().all(|&c| c == 2));
            let ks = verify_observable_ks(&set).unwrap().verdict.is_ks();
            assert_eq!(ks, n % 2 == 1);
        }
        assert!(matches!(catalog_by_name("wheel2"), Err(Error::CatalogParameters(_))));
    }

    #[test]
    fn ghz_star_parity() {
        let set = catalog(&CatalogName::GhzStar).unwrap();
        assert_eq!(set.negative_contexts(), 1);
        assert_eq!(verify_observable_ks(&set).unwrap().verdict, KsVerdict::KsByParity);
        assert_eq!(set.contexts[4].sign, Sign::Minus);
    }

    #[test]
    fn classical_id_4_1() {
        let set = catalog_by_name("classical_id(4,1)").unwrap();
        let strings: Vec<String> = set.observables.iter().map(|o| o.to_string()).collect();
        assert_eq!(strings, vec!["+IZZZZ", "+ZIZZZ", "+ZZIZZ", "+ZZZIZ", "+ZZZZI"]);
        assert_eq!(set.contexts[0].sign, Sign::Plus);
        assert!(catalog_by_name("classical_id(3,1)").is_err());
        assert!(catalog_by_name("classical_id(4,2)").is_err());
    }

    #[test]
    fn names() {
        assert_eq!("wheel(5)".parse::<CatalogName>().unwrap(), CatalogName::Wheel(5));
        assert_eq!("wheel:5".parse::<CatalogName>().unwrap(), CatalogName::Wheel(5));
        assert_eq!("classical_id:6,3".parse::<CatalogName>().unwrap(), CatalogName::ClassicalId { n: 6, m: 3 });
        assert!(matches!("pentagram".parse::<CatalogName>(), Err(Error::UnknownSet(_))));
    }

    #[test]
    fn square_projector_set() {
        let set = ProjectorKsSet::from_observable_set(&catalog(&CatalogName::Square3).unwrap(), BasisMode::WithHybrids).unwrap();
        assert_eq!(set.projectors.len(), 24);
        assert_eq!(set.bases.len(), 24);
        assert_eq!(set.bases[6], vec![0, 1, 12, 15]);
        assert_eq!(set.bases[23], vec![10, 11, 12, 14]);
        assert!(set.is_saturated());
        assert_eq!(verify_projector_ks(&set, VerifyMode::Parity).unwrap().verdict, KsVerdict::NotKsParityFails);
        let cert = verify_projector_ks(&set, VerifyMode::Exhaustive).unwrap();
        assert_eq!(cert.verdict, KsVerdict::KsByExhaustion);
    }

    #[test]
    fn single_basis_colorable() {
        let sq = ProjectorKsSet::from_observable_set(&catalog(&CatalogName::Square3).unwrap(), BasisMode::Eigen).unwrap();
        let one = ProjectorKsSet::single_basis("row", sq.projectors[..4].to_vec()).unwrap();
        let cert = verify_projector_ks(&one, VerifyMode::Exhaustive).unwrap();
        assert_eq!(cert.verdict, KsVerdict::Colorable);
        assert!(recheck_projector_certificate(&one, &cert));
    }

    #[test]
    fn completion() {
        let sq = catalog(&CatalogName::Square3).unwrap();
        assert_eq!(complete_substabilizers(&sq), sq);
        let w4 = catalog(&CatalogName::Wheel(4)).unwrap();
        let done = complete_substabilizers(&w4);
        assert_eq!(done.observables.len(), 12 + 9);
        assert_eq!(complete_substabilizers(&done), done);
        let ks_squares = find_squares(&done).into_iter().filter(SquareSubset::is_ks).count();
        assert_eq!(ks_squares, 4);
        assert_eq!(color_observables(&done), None);
    }

    #[test]
    fn invalid_sign_rejected() {
        let obs = obs_list(&["ZI", "IZ", "ZZ"]);
        let bad = ObservableKsSet::new("x", 2, obs, vec![Context { members: vec![0, 1, 2], sign: Sign::Minus }]);
        assert!(matches!(bad, Err(Error::InvalidContext { .. })));
    }
}
