//! Symbolic weak values in a conflict eigenbasis.
//!
//! A structure names a pre-selected context, a post-selected context, a
//! conflict context and linking contexts `(Q, U, V)` with `Q` in the conflict
//! context, `U` in the pre context and `V` in the post context. When every
//! conflict observable commutes with `U` exactly as it commutes with `V`,
//!
//! ```text
//! w(p) = λ'_Q(p) · λ_U · λ_V · s_QUV · w(p')
//! ```
//!
//! where `p'` is the pattern `p` with every conflict eigenvalue that
//! anticommutes with `U` flipped. Chaining these relations splits the
//! conflict eigenbasis into orbits of equal magnitude; the sum rule then fixes
//! that magnitude when only one orbit survives.
//!
//! No Pauli strings are needed for any of this. When they are supplied, the
//! engine can also find orbits that vanish because a conflict-group element is
//! a product of pre- and post-stabilizer elements.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ksverify::{catalog, CatalogName, ObservableKsSet};
use crate::oracle;
use crate::pauli::{id_sign, PauliObservable, SignedGroup, Sign};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Pre,
    Post,
    Conflict,
    Linking,
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureContext {
    pub members: Vec<usize>,
    pub sign: Sign,
    pub role: Role,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigenvalues: Option<Vec<Sign>>,
}

/// Commutation entries: `1` commute, `-1` anticommute, `0` unknown.
pub type CommutationMatrix = Vec<Vec<i8>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbstractKsStructure {
    pub symbols: Vec<String>,
    pub commutes: CommutationMatrix,
    pub contexts: Vec<StructureContext>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub paulis: Option<Vec<PauliObservable>>,
    /// Optional pure pre-selected state as signed stabilizer generators.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pre_state: Option<Vec<PauliObservable>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub post_state: Option<Vec<PauliObservable>>,
}

#[derive(Deserialize)]
struct RawStructure {
    symbols: Vec<String>,
    #[serde(default)]
    commutes: Option<CommutationMatrix>,
    contexts: Vec<StructureContext>,
    #[serde(default)]
    paulis: Option<Vec<PauliObservable>>,
    #[serde(default)]
    pre_state: Option<Vec<PauliObservable>>,
    #[serde(default)]
    post_state: Option<Vec<PauliObservable>>,
}

impl<'de> Deserialize<'de> for AbstractKsStructure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawStructure::deserialize(d)?;
        let commutes = match (raw.commutes, &raw.paulis) {
            (Some(c), _) => c,
            (None, Some(p)) => commutation_from_paulis(p),
            (None, None) => return Err(serde::de::Error::custom("structure needs \"commutes\" or \"paulis\"")),
        };
        let s = AbstractKsStructure {
            symbols: raw.symbols,
            commutes,
            contexts: raw.contexts,
            paulis: raw.paulis,
            pre_state: raw.pre_state,
            post_state: raw.post_state,
        };
        s.validate().map_err(serde::de::Error::custom)?;
        Ok(s)
    }
}

fn commutation_from_paulis(p: &[PauliObservable]) -> CommutationMatrix {
    p.iter()
        .map(|a| p.iter().map(|b| if a.commutes_with(b) { 1 } else { -1 }).collect())
        .collect()
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidStructure(msg.into())
}

/// A linking context with its members sorted into roles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Link {
    pub context: usize,
    /// Position of `Q` within the conflict context.
    pub q: usize,
    pub u: usize,
    pub v: usize,
    pub sign: Sign,
    /// Conflict positions that anticommute with `U`.
    pub flips: u64,
}

impl AbstractKsStructure {
    pub fn validate(&self) -> Result<()> {
        let n = self.symbols.len();
        if self.commutes.len() != n || self.commutes.iter().any(|r| r.len() != n) {
            return Err(bad("commutation matrix must be square with one row per symbol"));
        }
        for i in 0..n {
            for j in 0..n {
                if self.commutes[i][j] != self.commutes[j][i] {
                    return Err(bad(format!("commutation entry ({i},{j}) is not symmetric")));
                }
                if !matches!(self.commutes[i][j], -1..=1) {
                    return Err(bad(format!("commutation entry ({i},{j}) must be -1, 0 or 1")));
                }
            }
        }
        for (k, c) in self.contexts.iter().enumerate() {
            if c.members.iter().any(|&m| m >= n) {
                return Err(bad(format!("context {k} has a member out of range")));
            }
            for (a, &x) in c.members.iter().enumerate() {
                for &y in &c.members[a + 1..] {
                    if self.commutes[x][y] == -1 {
                        return Err(bad(format!("context {k}: {} and {} anticommute", self.symbols[x], self.symbols[y])));
                    }
                }
            }
            if let Some(e) = &c.eigenvalues {
                if e.len() != c.members.len() {
                    return Err(bad(format!("context {k}: eigenvalue count differs from member count")));
                }
                if Sign::product(e.iter().copied()) != c.sign {
                    return Err(bad(format!("context {k}: eigenvalues multiply to the wrong sign")));
                }
            }
        }
        for role in [Role::Pre, Role::Post, Role::Conflict] {
            let count = self.contexts.iter().filter(|c| c.role == role).count();
            if count != 1 {
                return Err(bad(format!("need exactly one {role:?} context, found {count}")));
            }
        }
        if self.conflict().members.len() > 63 {
            return Err(bad("conflict context is limited to 63 members"));
        }
        if let Some(p) = &self.paulis {
            if p.len() != n {
                return Err(bad("one Pauli string per symbol is required"));
            }
            let derived = commutation_from_paulis(p);
            for i in 0..n {
                for j in 0..n {
                    if self.commutes[i][j] != 0 && self.commutes[i][j] != derived[i][j] {
                        return Err(bad(format!("commutation of {} and {} disagrees with the Pauli data", self.symbols[i], self.symbols[j])));
                    }
                }
            }
            for (k, c) in self.contexts.iter().enumerate() {
                let obs: Vec<_> = c.members.iter().map(|&m| p[m].clone()).collect();
                let s = id_sign(&obs).map_err(|e| bad(format!("context {k}: {e}")))?;
                if s != c.sign {
                    return Err(bad(format!("context {k}: stated sign {} but the Pauli product gives {}", c.sign, s)));
                }
            }
        }
        self.fixed_eigenvalues()?;
        self.links()?;
        Ok(())
    }

    fn by_role(&self, role: Role) -> &StructureContext {
        self.contexts.iter().find(|c| c.role == role).expect("validated")
    }

    pub fn pre(&self) -> &StructureContext {
        self.by_role(Role::Pre)
    }

    pub fn post(&self) -> &StructureContext {
        self.by_role(Role::Post)
    }

    pub fn conflict(&self) -> &StructureContext {
        self.by_role(Role::Conflict)
    }

    /// `c` between two symbols, or an error if it is unknown.
    pub fn c(&self, a: usize, b: usize) -> Result<Sign> {
        match self.commutes[a][b] {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => Err(bad(format!("commutation of {} and {} is unknown", self.symbols[a], self.symbols[b]))),
        }
    }

    /// Eigenvalues fixed by the pre- and post-selection, per symbol.
    ///
    /// Missing eigenvalue lists default to `+1` everywhere except the last
    /// free member, which absorbs the context sign.
    pub fn fixed_eigenvalues(&self) -> Result<Vec<Option<Sign>>> {
        let mut lambda: Vec<Option<Sign>> = vec![None; self.symbols.len()];
        for ctx in [self.pre(), self.post()] {
            match &ctx.eigenvalues {
                Some(e) => {
                    for (&m, &l) in ctx.members.iter().zip(e) {
                        if lambda[m].is_some_and(|x| x != l) {
                            return Err(bad(format!("{} has inconsistent pre/post eigenvalues", self.symbols[m])));
                        }
                        lambda[m] = Some(l);
                    }
                }
                None => {
                    let free: Vec<usize> = ctx.members.iter().copied().filter(|&m| lambda[m].is_none()).collect();
                    for &m in &free {
                        lambda[m] = Some(Sign::Plus);
                    }
                    let prod = Sign::product(ctx.members.iter().map(|&m| lambda[m].expect("set above")));
                    if prod != ctx.sign {
                        let &last = free.last().ok_or_else(|| bad("cannot satisfy the post-context sign"))?;
                        lambda[last] = Some(-Sign::Plus);
                    }
                }
            }
        }
        Ok(lambda)
    }

    pub fn links(&self) -> Result<Vec<Link>> {
        let conflict = &self.conflict().members;
        let pre = &self.pre().members;
        let post = &self.post().members;
        let mut out = Vec::new();
        for (k, ctx) in self.contexts.iter().enumerate().filter(|(_, c)| c.role == Role::Linking) {
            if ctx.members.len() != 3 {
                return Err(bad(format!("linking context {k} must have three members")));
            }
            let Some(qi) = ctx.members.iter().position(|m| conflict.contains(m)) else {
                return Err(bad(format!("linking context {k} has no conflict member")));
            };
            let rest: Vec<usize> = (0..3).filter(|&i| i != qi).map(|i| ctx.members[i]).collect();
            let (u, v) = if pre.contains(&rest[0]) && post.contains(&rest[1]) {
                (rest[0], rest[1])
            } else if pre.contains(&rest[1]) && post.contains(&rest[0]) {
                (rest[1], rest[0])
            } else {
                return Err(bad(format!("linking context {k} needs one pre member and one post member")));
            };
            let q = conflict.iter().position(|&m| m == ctx.members[qi]).expect("found above");
            let mut flips = 0u64;
            for (pos, &cq) in conflict.iter().enumerate() {
                let cu = self.c(cq, u)?;
                let cv = self.c(cq, v)?;
                if cu != cv {
                    return Err(Error::UvConditionViolated(k));
                }
                if cu.is_minus() {
                    flips |= 1 << pos;
                }
            }
            out.push(Link { context: k, q, u, v, sign: ctx.sign, flips });
        }
        if out.is_empty() {
            return Err(bad("no linking contexts"));
        }
        Ok(out)
    }

    pub fn context_sign_product(&self) -> Sign {
        Sign::product(self.contexts.iter().map(|c| c.sign))
    }

    /// Structure from an observable set with the named contexts; the
    /// commutation matrix comes from the Pauli strings.
    pub fn from_observable_set(
        set: &ObservableKsSet,
        pre: usize,
        post: usize,
        conflict: usize,
        links: &[usize],
    ) -> Result<Self> {
        let mut contexts = Vec::new();
        for (k, c) in set.contexts.iter().enumerate() {
            let role = if k == pre {
                Role::Pre
            } else if k == post {
                Role::Post
            } else if k == conflict {
                Role::Conflict
            } else if links.contains(&k) {
                Role::Linking
            } else {
                continue;
            };
            contexts.push(StructureContext { members: c.members.clone(), sign: c.sign, role, eigenvalues: None });
        }
        let names = set.observables.iter().map(|o| o.to_string()[1..].to_string()).collect();
        let s = Self {
            symbols: names,
            commutes: commutation_from_paulis(&set.observables),
            contexts,
            paulis: Some(set.observables.clone()),
            pre_state: None,
            post_state: None,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_states(mut self, pre: Vec<PauliObservable>, post: Vec<PauliObservable>) -> Result<Self> {
        self.pre_state = Some(pre);
        self.post_state = Some(post);
        self.validate()?;
        Ok(self)
    }
}

/// λ_Q·λ_U·λ_V·s for a linking context, after checking the UV condition.
pub fn uv_coefficient(structure: &AbstractKsStructure, link_context: usize, lambda_q: Sign, lambda_u: Sign, lambda_v: Sign) -> Result<Sign> {
    let links = structure.links()?;
    let link = links
        .iter()
        .find(|l| l.context == link_context)
        .ok_or_else(|| bad(format!("context {link_context} is not a linking context")))?;
    Ok(lambda_q * lambda_u * lambda_v * link.sign)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub link: usize,
    pub coefficient: Sign,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orbit {
    /// Pattern indices in discovery order; the first is the orbit root.
    pub members: Vec<usize>,
    /// False when some cycle multiplies to `-1`, which forces every weak
    /// value in the orbit to vanish.
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitGraph {
    /// Conflict eigenvalue patterns: bit `i` set means member `i` is `-1`.
    pub patterns: Vec<u64>,
    pub conflict_members: Vec<usize>,
    pub edges: Vec<Edge>,
    pub orbits: Vec<Orbit>,
    pub orbit_of: Vec<usize>,
    /// Sign of each pattern's weak value relative to its orbit root.
    pub relative: Vec<Sign>,
    pub links: Vec<Link>,
    pub lambda: Vec<Option<Sign>>,
}

impl OrbitGraph {
    pub fn pattern_index(&self, mask: u64) -> Option<usize> {
        self.patterns.iter().position(|&p| p == mask)
    }

    pub fn eigenvalue(&self, pattern: usize, position: usize) -> Sign {
        Sign::from_parity(self.patterns[pattern] >> position & 1 == 1)
    }

    /// Position of a pattern in the conflict eigenbasis ordering (first
    /// `M-1` members in counting order, first member most significant).
    pub fn eigenbasis_position(&self, pattern: usize) -> usize {
        let m = self.conflict_members.len();
        let mask = self.patterns[pattern];
        (0..m - 1).fold(0, |acc, i| (acc << 1) | ((mask >> i) & 1) as usize)
    }

    pub fn render_pattern(&self, structure: &AbstractKsStructure, pattern: usize) -> String {
        let parts: Vec<String> = self
            .conflict_members
            .iter()
            .enumerate()
            .map(|(i, &m)| format!("{}{}", self.eigenvalue(pattern, i), structure.symbols[m]))
            .collect();
        format!("|{}|", parts.join(","))
    }
}

/// All patterns of the conflict context, linked by every linking context.
pub fn build_orbits(structure: &AbstractKsStructure) -> Result<OrbitGraph> {
    structure.validate()?;
    let conflict = structure.conflict();
    let m = conflict.members.len();
    let lambda = structure.fixed_eigenvalues()?;
    let links = structure.links()?;
    let parity = conflict.sign.is_minus();
    let patterns: Vec<u64> = (0..1u64 << m).filter(|p| (p.count_ones() % 2 == 1) == parity).collect();
    let index: BTreeMap<u64, usize> = patterns.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut edges = Vec::new();
    for (from, &p) in patterns.iter().enumerate() {
        for (li, link) in links.iter().enumerate() {
            let lu = lambda[link.u].expect("pre symbols are fixed");
            let lv = lambda[link.v].expect("post symbols are fixed");
            let lq = Sign::from_parity(p >> link.q & 1 == 1);
            let to = index[&(p ^ link.flips)];
            edges.push(Edge { from, to, link: li, coefficient: lq * lu * lv * link.sign });
        }
    }
    let mut orbit_of = vec![usize::MAX; patterns.len()];
    let mut relative = vec![Sign::Plus; patterns.len()];
    let mut orbits = Vec::new();
    let mut adjacency: Vec<Vec<&Edge>> = vec![Vec::new(); patterns.len()];
    for e in &edges {
        adjacency[e.from].push(e);
    }
    for root in 0..patterns.len() {
        if orbit_of[root] != usize::MAX {
            continue;
        }
        let id = orbits.len();
        let mut members = vec![root];
        let mut consistent = true;
        orbit_of[root] = id;
        let mut queue = VecDeque::from([root]);
        while let Some(p) = queue.pop_front() {
            for e in &adjacency[p] {
                // w(p) = k·w(p'), so the relative sign of p' is k·r(p).
                let want = e.coefficient * relative[p];
                if orbit_of[e.to] == usize::MAX {
                    orbit_of[e.to] = id;
                    relative[e.to] = want;
                    members.push(e.to);
                    queue.push_back(e.to);
                } else if relative[e.to] != want {
                    consistent = false;
                }
            }
        }
        orbits.push(Orbit { members, consistent });
    }
    Ok(OrbitGraph { patterns, conflict_members: conflict.members.clone(), edges, orbits, orbit_of, relative, links, lambda })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZeroReason {
    /// Some cycle of relations multiplies to `-1`.
    InconsistentCycle,
    /// A conflict symbol is also fixed by the pre- or post-selection.
    FixedSymbol(usize),
    /// A conflict-group element equals `±T·S` with `S` stabilizing the
    /// pre-selected state and `T` the post-selected state.
    ProductConstraint(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroOrbit {
    pub orbit: usize,
    pub reason: ZeroReason,
}

/// Orbits whose weak values must vanish.
pub fn detect_zero_orbits(structure: &AbstractKsStructure, graph: &OrbitGraph) -> Result<Vec<ZeroOrbit>> {
    let mut found: BTreeMap<usize, ZeroReason> = BTreeMap::new();
    for (i, o) in graph.orbits.iter().enumerate() {
        if !o.consistent {
            found.entry(i).or_insert(ZeroReason::InconsistentCycle);
        }
    }
    for (pos, &sym) in graph.conflict_members.iter().enumerate() {
        if let Some(l) = graph.lambda[sym] {
            for (p, _) in graph.patterns.iter().enumerate() {
                if graph.eigenvalue(p, pos) != l {
                    found.entry(graph.orbit_of[p]).or_insert(ZeroReason::FixedSymbol(sym));
                }
            }
        }
    }
    if let Some(paulis) = &structure.paulis {
        for (orbit, reason) in product_constraints(structure, graph, paulis)? {
            found.entry(orbit).or_insert(reason);
        }
    }
    Ok(found.into_iter().map(|(orbit, reason)| ZeroOrbit { orbit, reason }).collect())
}

fn state_group(n: usize, state: Option<&Vec<PauliObservable>>, ctx: &StructureContext, paulis: &[PauliObservable], lambda: &[Option<Sign>]) -> Result<SignedGroup> {
    let mut g = SignedGroup::new(n);
    match state {
        Some(gens) => {
            for o in gens {
                g.insert(o.clone())?;
            }
        }
        None => {
            for &m in &ctx.members {
                let l = lambda[m].expect("fixed by selection");
                g.insert(paulis[m].clone().with_sign(paulis[m].sign() * l))?;
            }
        }
    }
    Ok(g)
}

fn product_constraints(structure: &AbstractKsStructure, graph: &OrbitGraph, paulis: &[PauliObservable]) -> Result<Vec<(usize, ZeroReason)>> {
    let n = paulis[0].n_qubits();
    let pre = state_group(n, structure.pre_state.as_ref(), structure.pre(), paulis, &graph.lambda)?;
    let post = state_group(n, structure.post_state.as_ref(), structure.post(), paulis, &graph.lambda)?;
    if pre.rank() > 16 || post.rank() > 16 {
        return Ok(Vec::new());
    }
    let conflict: Vec<PauliObservable> = graph.conflict_members.iter().map(|&m| paulis[m].clone()).collect();
    let pre_el = pre.elements();
    let post_el: Vec<PauliObservable> = post.elements().into_iter().filter(|t| conflict.iter().all(|q| q.commutes_with(t))).collect();
    // Pattern groups: the conflict members with each pattern's eigenvalues.
    let groups: Vec<SignedGroup> = (0..graph.patterns.len())
        .map(|p| {
            let pairs: Vec<_> = conflict.iter().enumerate().map(|(i, q)| (q.clone(), graph.eigenvalue(p, i))).collect();
            SignedGroup::from_eigenpairs(n, &pairs)
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for t in &post_el {
        for s in &pre_el {
            if !t.commutes_with(s) {
                continue;
            }
            let w = t.commuting_product(s);
            if w.is_identity() || groups[0].eigenvalue(&w).is_none() {
                continue;
            }
            // ⟨Φ|Π|Ψ⟩ = ⟨Φ|Π·T·S|Ψ⟩ = ℓ_p(W)·⟨Φ|Π|Ψ⟩, so patterns with ℓ_p(W) = -1 vanish.
            for (p, g) in groups.iter().enumerate() {
                if g.eigenvalue(&w) == Some(Sign::Minus) {
                    out.push((graph.orbit_of[p], ZeroReason::ProductConstraint(w.to_string())));
                }
            }
        }
    }
    Ok(out)
}

/// The maximum conflict pattern: each linked conflict symbol opposite to
/// its forced value, each selected symbol at its selected value, and at most
/// one remaining symbol fixed by the context sign.
pub fn maximum_conflict_pattern(structure: &AbstractKsStructure, graph: &OrbitGraph) -> Result<usize> {
    let m = graph.conflict_members.len();
    let mut values: Vec<Option<Sign>> = vec![None; m];
    for link in &graph.links {
        let lu = graph.lambda[link.u].expect("fixed");
        let lv = graph.lambda[link.v].expect("fixed");
        let want = -(link.sign * lu * lv);
        if values[link.q].is_some_and(|x| x != want) {
            return Err(Error::NoMaximumConflict(format!("links disagree on {}", structure.symbols[graph.conflict_members[link.q]])));
        }
        values[link.q] = Some(want);
    }
    for (pos, &sym) in graph.conflict_members.iter().enumerate() {
        if values[pos].is_none() {
            values[pos] = graph.lambda[sym];
        }
    }
    let unknown: Vec<usize> = (0..m).filter(|&i| values[i].is_none()).collect();
    let known = Sign::product(values.iter().flatten().copied());
    match unknown[..] {
        [] if known != structure.conflict().sign => {
            return Err(Error::NoMaximumConflict("eigenvalues contradict the conflict sign".into()));
        }
        [] => {}
        [i] => values[i] = Some(known * structure.conflict().sign),
        _ => return Err(Error::NoMaximumConflict(format!("{} conflict symbols are undetermined", unknown.len()))),
    }
    let mask = values.iter().enumerate().fold(0u64, |acc, (i, v)| acc | (u64::from(v.expect("filled").is_minus()) << i));
    graph.pattern_index(mask).ok_or_else(|| Error::NoMaximumConflict("pattern not in the basis".into()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitSolution {
    /// Weak value per pattern.
    pub values: Vec<f64>,
    pub nonzero_orbit: usize,
    pub anchor: usize,
    /// Common magnitude `w` of the nonzero orbit.
    pub magnitude: f64,
    /// Counts of positive and negative weak values in the nonzero orbit.
    pub positive: usize,
    pub negative: usize,
}

impl OrbitSolution {
    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn cumulative_anomaly(&self) -> f64 {
        -self.values.iter().filter(|v| **v < 0.0).sum::<f64>()
    }
}

/// Solve the sum rule on the single nonzero orbit.
pub fn solve_orbit_weak_values(graph: &OrbitGraph, zero_orbits: &[usize], anchor: usize) -> Result<OrbitSolution> {
    let live: Vec<usize> = (0..graph.orbits.len()).filter(|o| !zero_orbits.contains(o) && graph.orbits[*o].consistent).collect();
    let [orbit] = live[..] else {
        return Err(Error::MultipleNonzeroOrbits(live.len()));
    };
    let anchor = if graph.orbit_of[anchor] == orbit { anchor } else { graph.orbits[orbit].members[0] };
    let rel = |p: usize| graph.relative[p] * graph.relative[anchor];
    let members = &graph.orbits[orbit].members;
    let positive = members.iter().filter(|&&p| rel(p) == Sign::Plus).count();
    let negative = members.len() - positive;
    if positive == negative {
        return Err(Error::SumRuleUnsatisfiable);
    }
    let v = 1.0 / (positive as f64 - negative as f64);
    let mut values = vec![0.0; graph.patterns.len()];
    for &p in members {
        values[p] = rel(p).to_f64() * v;
    }
    let negative = values.iter().filter(|x| **x < 0.0).count();
    let positive = members.len() - negative;
    Ok(OrbitSolution { values, nonzero_orbit: orbit, anchor, magnitude: v.abs(), positive, negative })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignProduct {
    /// Product of the relation coefficients from the anchor through every
    /// linking context.
    pub linked: Sign,
    /// Signs of the anchor's weak value and of its neighbour through each
    /// linking context, multiplied together.
    pub neighbourhood: Sign,
    /// Product of every context sign in the structure.
    pub contexts: Sign,
    /// Product of the signs of every nonzero value in the orbit.
    pub all_values: Sign,
}

impl SignProduct {
    pub fn holds(&self) -> bool {
        self.linked == self.contexts
    }
}

/// The sign-product relation: multiplying the anchor relation over every
/// linking context reproduces the product of all context signs.
pub fn sign_product_check(structure: &AbstractKsStructure, graph: &OrbitGraph, solution: &OrbitSolution) -> SignProduct {
    let sign_of = |p: usize| Sign::from_parity(solution.values[p] < 0.0);
    let edges: Vec<&Edge> = graph.edges.iter().filter(|e| e.from == solution.anchor).collect();
    let linked = Sign::product(edges.iter().map(|e| e.coefficient));
    let neighbourhood = edges.iter().fold(sign_of(solution.anchor), |acc, e| acc * sign_of(e.to));
    let all_values = Sign::product(solution.values.iter().filter(|v| v.abs() > 0.0).map(|v| Sign::from_parity(*v < 0.0)));
    SignProduct { linked, neighbourhood, contexts: structure.context_sign_product(), all_values }
}

/// Complete symbolic analysis of one structure.
#[derive(Clone, Debug)]
pub struct OrbitAnalysis {
    pub graph: OrbitGraph,
    pub zero_orbits: Vec<ZeroOrbit>,
    pub anchor: usize,
    pub solution: Result<OrbitSolution>,
    pub sign_product: Option<SignProduct>,
}

pub fn analyze(structure: &AbstractKsStructure) -> Result<OrbitAnalysis> {
    let graph = build_orbits(structure)?;
    let zero_orbits = detect_zero_orbits(structure, &graph)?;
    let anchor = maximum_conflict_pattern(structure, &graph)?;
    let zero: Vec<usize> = zero_orbits.iter().map(|z| z.orbit).collect();
    let solution = solve_orbit_weak_values(&graph, &zero, anchor);
    let sign_product = solution.as_ref().ok().map(|s| sign_product_check(structure, &graph, s));
    Ok(OrbitAnalysis { graph, zero_orbits, anchor, solution, sign_product })
}

/// Dense weak values of the conflict eigenprojectors, per pattern, for a
/// structure with Pauli data and pure selected states.
pub fn dense_pattern_weak_values(structure: &AbstractKsStructure, graph: &OrbitGraph) -> Result<Vec<C64>> {
    let paulis = structure.paulis.as_ref().ok_or_else(|| bad("dense check needs Pauli strings"))?;
    let signed = |ctx: &StructureContext| -> Vec<PauliObservable> {
        ctx.members
            .iter()
            .map(|&m| paulis[m].clone().with_sign(paulis[m].sign() * graph.lambda[m].expect("fixed")))
            .collect()
    };
    let pre_gens = structure.pre_state.clone().unwrap_or_else(|| signed(structure.pre()));
    let post_gens = structure.post_state.clone().unwrap_or_else(|| signed(structure.post()));
    let pre = oracle::DenseState::stabilizer(&pre_gens)?;
    let post = oracle::DenseState::stabilizer(&post_gens)?;
    let n = paulis[0].n_qubits();
    crate::dense::check_vector_limit(n)?;
    (0..graph.patterns.len())
        .map(|p| {
            let gens: Vec<_> = graph
                .conflict_members
                .iter()
                .enumerate()
                .map(|(i, &m)| (paulis[m].clone(), graph.eigenvalue(p, i)))
                .collect();
            let v = oracle::apply_projector(n, &gens, pre.amplitudes());
            let overlap = post.amplitudes().dotc(pre.amplitudes());
            if overlap.norm() <= 1e-10 {
                return Err(Error::VanishingOverlap(overlap.norm()));
            }
            Ok(post.amplitudes().dotc(&v) / overlap)
        })
        .collect()
}

/// `(w_N, ν_N, 𝒜_N)` for an odd Wheel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WheelClosedForms {
    pub magnitude: f64,
    pub negatives: u64,
    pub cumulative_anomaly: f64,
}

impl fmt::Display for WheelClosedForms {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w = {}, nu = {}, A = {}", self.magnitude, self.negatives, self.cumulative_anomaly)
    }
}

pub fn wheel_closed_forms(n: usize) -> Result<WheelClosedForms> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::EvenWheel(n));
    }
    let h = ((n - 1) / 2) as i32;
    Ok(WheelClosedForms {
        magnitude: 2f64.powi(-h),
        negatives: (1u64 << (n - 2)) - (1u64 << ((n - 3) / 2)),
        cumulative_anomaly: 2f64.powi(h - 1) - 0.5,
    })
}

/// Square with rows as contexts and the pre/post/conflict roles of the
/// standard walkthrough: pre = X row, post = Y row, conflict = Z row.
pub fn square3_structure() -> Result<AbstractKsStructure> {
    let set = catalog(&CatalogName::Square3)?;
    AbstractKsStructure::from_observable_set(&set, 1, 2, 0, &[3, 4, 5])?.with_states(
        vec!["+XII".parse()?, "+IXI".parse()?, "+IIX".parse()?],
        vec!["+YII".parse()?, "+IYI".parse()?, "+IIY".parse()?],
    )
}

/// Wheel with the product selection `|+X⟩^N`, `|+Y⟩^N` and the Z row as
/// conflict context.
pub fn wheel_structure(n: usize) -> Result<AbstractKsStructure> {
    let set = catalog(&CatalogName::Wheel(n))?;
    let links: Vec<usize> = (3..3 + n).collect();
    let single = |l: char| -> Result<Vec<PauliObservable>> {
        (0..n)
            .map(|j| {
                let s: String = (0..n).map(|k| if k == j { l } else { 'I' }).collect();
                s.parse()
            })
            .collect()
    };
    AbstractKsStructure::from_observable_set(&set, 1, 2, 0, &links)?.with_states(single('X')?, single('Y')?)
}

/// The six-qubit Arch as abstract sign and commutation data.
///
/// Contexts: `(A,B,C,D,E)` negative (pre), `(B,F,G,H)` positive (post),
/// `(A,I,J,K)` positive (conflict) and the links `(C,F,I)`, `(D,G,J)`,
/// `(E,H,K)`. `C` and `F` anticommute with `J`, `K`; `D` and `G` with `I`,
/// `K`; `E` and `H` with `I`, `J`; `A` commutes with all of them.
pub fn arch_structure() -> AbstractKsStructure {
    let symbols: Vec<String> = "ABCDEFGHIJK".chars().map(String::from).collect();
    let idx = |c: char| (c as u8 - b'A') as usize;
    let n = symbols.len();
    let mut commutes = vec![vec![0i8; n]; n];
    let contexts_raw: [(&str, Sign, Role); 6] = [
        ("ABCDE", Sign::Minus, Role::Pre),
        ("BFGH", Sign::Plus, Role::Post),
        ("AIJK", Sign::Plus, Role::Conflict),
        ("CFI", Sign::Plus, Role::Linking),
        ("DGJ", Sign::Plus, Role::Linking),
        ("EHK", Sign::Plus, Role::Linking),
    ];
    for (members, _, _) in &contexts_raw {
        for a in members.chars() {
            for b in members.chars() {
                commutes[idx(a)][idx(b)] = 1;
            }
        }
    }
    for i in 0..n {
        commutes[i][i] = 1;
    }
    let anti = [("CF", "JK"), ("DG", "IK"), ("EH", "IJ")];
    for u in "CDEFGH".chars() {
        for q in "AIJK".chars() {
            let flipped = anti.iter().any(|(us, qs)| us.contains(u) && qs.contains(q));
            let c = if flipped { -1 } else { 1 };
            commutes[idx(u)][idx(q)] = c;
            commutes[idx(q)][idx(u)] = c;
        }
    }
    let contexts = contexts_raw
        .iter()
        .map(|(m, s, r)| StructureContext { members: m.chars().map(idx).collect(), sign: *s, role: *r, eigenvalues: None })
        .collect();
    let s = AbstractKsStructure { symbols, commutes, contexts, paulis: None, pre_state: None, post_state: None };
    s.validate().expect("arch data is consistent");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_single_orbit() {
        let s = square3_structure().unwrap();
        let a = analyze(&s).unwrap();
        assert_eq!(a.graph.orbits.len(), 1);
        assert!(a.zero_orbits.is_empty());
        let sol = a.solution.unwrap();
        assert_eq!(sol.values[a.anchor], -0.5);
        assert_eq!(sol.values.iter().filter(|v| **v == 0.5).count(), 3);
        let sp = a.sign_product.unwrap();
        assert!(sp.holds());
        assert_eq!(sp.neighbourhood, Sign::Minus);
        assert_eq!(sp.all_values, Sign::Minus);
    }

    #[test]
    fn wheel4_sign_product() {
        let sp = analyze(&wheel_structure(4).unwrap()).unwrap().sign_product.unwrap();
        assert_eq!(sp.contexts, Sign::Plus);
        assert!(sp.holds());
    }

    #[test]
    fn square_coefficients() {
        let s = square3_structure().unwrap();
        let g = build_orbits(&s).unwrap();
        let anchor = maximum_conflict_pattern(&s, &g).unwrap();
        for e in g.edges.iter().filter(|e| e.from == anchor) {
            assert_eq!(e.coefficient, Sign::Minus);
        }
        assert_eq!(uv_coefficient(&s, 3, Sign::Plus, Sign::Plus, Sign::Plus).unwrap(), Sign::Minus);
    }

    #[test]
    fn wheel4_has_a_zero_orbit() {
        let s = wheel_structure(4).unwrap();
        let a = analyze(&s).unwrap();
        assert_eq!(a.graph.orbits.len(), 2);
        assert_eq!(a.zero_orbits.len(), 1);
        let sol = a.solution.unwrap();
        let mut nonzero: Vec<f64> = sol.values.iter().copied().filter(|v| *v != 0.0).collect();
        nonzero.sort_by(f64::total_cmp);
        assert_eq!(nonzero, vec![-0.5, 0.5, 0.5, 0.5]);
        assert_eq!(sol.values[a.anchor], -0.5);
    }

    #[test]
    fn arch_orbit() {
        let s = arch_structure();
        let a = analyze(&s).unwrap();
        let sol = a.solution.unwrap();
        assert_eq!(a.graph.orbits[sol.nonzero_orbit].members.len(), 4);
        assert_eq!(sol.values[a.anchor], -0.5);
        let sp = a.sign_product.unwrap();
        assert_eq!(sp.contexts, Sign::Minus);
        assert!(sp.holds());
        let links = s.links().unwrap();
        let lam = s.fixed_eigenvalues().unwrap();
        for l in &links {
            let lq = a.graph.eigenvalue(a.anchor, l.q);
            assert_eq!(lq * lam[l.u].unwrap() * lam[l.v].unwrap() * l.sign, Sign::Minus);
        }
    }

    #[test]
    fn closed_forms() {
        assert_eq!(wheel_closed_forms(3).unwrap(), WheelClosedForms { magnitude: 0.5, negatives: 1, cumulative_anomaly: 0.5 });
        assert_eq!(wheel_closed_forms(5).unwrap(), WheelClosedForms { magnitude: 0.25, negatives: 6, cumulative_anomaly: 1.5 });
        assert_eq!(wheel_closed_forms(7).unwrap(), WheelClosedForms { magnitude: 0.125, negatives: 28, cumulative_anomaly: 3.5 });
        assert_eq!(wheel_closed_forms(4), Err(Error::EvenWheel(4)));
    }

    #[test]
    fn uv_violation_detected() {
        let mut s = arch_structure();
        let (c, j) = (2, 9);
        s.commutes[c][j] = 1;
        s.commutes[j][c] = 1;
        assert_eq!(s.validate(), Err(Error::UvConditionViolated(3)));
    }
}

#[cfg(test)]
mod dense_tests {
    use super::*;

    fn agree(s: &AbstractKsStructure) -> OrbitSolution {
        let a = analyze(s).unwrap();
        let dense = dense_pattern_weak_values(s, &a.graph).unwrap();
        let sol = a.solution.unwrap();
        for (p, d) in dense.iter().enumerate() {
            assert!((d.re - sol.values[p]).abs() < 1e-9 && d.im.abs() < 1e-9, "pattern {p}: {d} vs {}", sol.values[p]);
        }
        sol
    }

    #[test]
    fn square_and_wheels_match_dense() {
        agree(&square3_structure().unwrap());
        agree(&wheel_structure(4).unwrap());
        for n in [3, 5, 7] {
            let sol = agree(&wheel_structure(n).unwrap());
            let cf = wheel_closed_forms(n).unwrap();
            assert!((sol.magnitude - cf.magnitude).abs() < 1e-12);
            assert_eq!(sol.negative as u64, cf.negatives);
            assert!((sol.cumulative_anomaly() - cf.cumulative_anomaly).abs() < 1e-12);
        }
    }

    #[test]
    fn wheel6_zero_orbit_is_dense_zero() {
        let s = wheel_structure(6).unwrap();
        let a = analyze(&s).unwrap();
        assert_eq!(a.graph.orbits.len(), 2);
        let dense = dense_pattern_weak_values(&s, &a.graph).unwrap();
        for z in &a.zero_orbits {
            for &p in &a.graph.orbits[z.orbit].members {
                assert!(dense[p].norm() < 1e-9);
            }
        }
        agree(&s);
    }
}
