//! Pre/post-selection: weak values, ABL probabilities and the staged
//! truth-value propagation that exposes conflict bases.
//!
//! The weak value of a projector is `⟨Φ|Π|Ψ⟩ / ⟨Φ|Ψ⟩`. The ABL probability
//! of outcome `i` in a measured basis is `|v_w(Π_i)|² / Σ_k |v_w(Π_k)|²`.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::dense;
use crate::error::{Error, Result};
use crate::ksverify::{catalog, CatalogName, ProjectorKsSet, SetProjector};
use crate::pauli::PauliObservable;
use crate::stabilizer::StabilizerProjector;

/// Overlaps `|⟨Φ|Ψ⟩|` at or below this are treated as zero.
pub const OVERLAP_TOL: f64 = 1e-10;
/// Equality tolerance for weak values and probabilities.
pub const EQ_TOL: f64 = 1e-9;

/// A pure state: a rank-1 stabilizer projector or an explicit vector.
#[derive(Clone, Debug, PartialEq)]
pub enum PpsState {
    Stabilizer(StabilizerProjector),
    Vector(Vec<C64>),
}

impl PpsState {
    pub fn to_vector(&self) -> Result<Vec<C64>> {
        match self {
            PpsState::Stabilizer(p) => p.dense_vector(),
            PpsState::Vector(v) => dense::normalize(v),
        }
    }
}

/// A pre-selected state `|Ψ⟩` and post-selected state `|Φ⟩`.
#[derive(Clone, Debug)]
pub struct PpsPair {
    pub pre_state: PpsState,
    pub post_state: PpsState,
    pub pre: Vec<C64>,
    pub post: Vec<C64>,
    /// `⟨Φ|Ψ⟩`.
    pub overlap: C64,
}

impl PpsPair {
    pub fn new(pre_state: PpsState, post_state: PpsState) -> Result<Self> {
        let pre = pre_state.to_vector()?;
        let post = post_state.to_vector()?;
        if pre.len() != post.len() {
            return Err(Error::DimensionMismatch(pre.len(), post.len()));
        }
        let overlap = dense::inner(&post, &pre);
        if overlap.norm() <= OVERLAP_TOL {
            return Err(Error::VanishingOverlap(overlap.norm()));
        }
        Ok(Self { pre_state, post_state, pre, post, overlap })
    }

    pub fn from_stabilizers(pre: StabilizerProjector, post: StabilizerProjector) -> Result<Self> {
        for p in [&pre, &post] {
            if !p.is_pure() {
                return Err(Error::NotPure(p.rank()));
            }
        }
        Self::new(PpsState::Stabilizer(pre), PpsState::Stabilizer(post))
    }

    pub fn from_vectors(pre: Vec<C64>, post: Vec<C64>) -> Result<Self> {
        Self::new(PpsState::Vector(pre), PpsState::Vector(post))
    }

    /// Parse generator lists such as `"+XIX,+XXI,+IXX"`.
    pub fn parse(pre: &str, post: &str) -> Result<Self> {
        Self::from_stabilizers(StabilizerProjector::parse(pre)?, StabilizerProjector::parse(post)?)
    }

    pub fn dimension(&self) -> usize {
        self.pre.len()
    }

    /// `⟨Φ|v⟩ / ⟨Φ|Ψ⟩` for `v = A|Ψ⟩`.
    fn ratio(&self, applied: &[C64]) -> C64 {
        dense::inner(&self.post, applied) / self.overlap
    }
}

pub fn weak_value(p: &SetProjector, pps: &PpsPair) -> Result<C64> {
    if p.dimension() != pps.dimension() {
        return Err(Error::DimensionMismatch(p.dimension(), pps.dimension()));
    }
    Ok(pps.ratio(&p.apply(&pps.pre)))
}

pub fn weak_value_stabilizer(p: &StabilizerProjector, pps: &PpsPair) -> Result<C64> {
    weak_value(&SetProjector::Stabilizer(p.clone()), pps)
}

/// Weak value of an arbitrary operator given as a dense matrix.
pub fn weak_value_matrix(m: &DMatrix<C64>, pps: &PpsPair) -> Result<C64> {
    if m.nrows() != pps.dimension() || m.ncols() != pps.dimension() {
        return Err(Error::DimensionMismatch(m.nrows(), pps.dimension()));
    }
    let v = m * DVector::from_column_slice(&pps.pre);
    Ok(pps.ratio(v.as_slice()))
}

/// Weak value of a Pauli observable.
pub fn pauli_weak_value(o: &PauliObservable, pps: &PpsPair) -> Result<C64> {
    if 1usize << o.n_qubits() != pps.dimension() {
        return Err(Error::DimensionMismatch(1 << o.n_qubits(), pps.dimension()));
    }
    Ok(pps.ratio(&dense::apply_pauli(o, &pps.pre)))
}

/// ABL probabilities for every member of a measured basis.
pub fn abl_probabilities(basis: &[&SetProjector], pps: &PpsPair) -> Result<Vec<f64>> {
    let w = basis.iter().map(|p| weak_value(p, pps)).collect::<Result<Vec<_>>>()?;
    abl_from_weak_values(&w)
}

pub fn abl_probability(basis: &[&SetProjector], i: usize, pps: &PpsPair) -> Result<f64> {
    let probs = abl_probabilities(basis, pps)?;
    probs.get(i).copied().ok_or_else(|| Error::Input(format!("basis has {} members, index {i} requested", probs.len())))
}

fn abl_from_weak_values(w: &[C64]) -> Result<Vec<f64>> {
    let total: f64 = w.iter().map(|x| x.norm_sqr()).sum();
    if total < EQ_TOL * EQ_TOL {
        return Err(Error::DegenerateBasis);
    }
    Ok(w.iter().map(|x| x.norm_sqr() / total).collect())
}

#[derive(Clone, Debug)]
pub struct BasisReport {
    pub members: Vec<usize>,
    pub weak_values: Vec<C64>,
    /// `|Σ v_w − 1|`.
    pub sum_residual: f64,
    pub abl: Vec<f64>,
    /// Number of nonzero weak values.
    pub delta: usize,
}

#[derive(Clone, Debug)]
pub struct WeakValueReport {
    pub weak_values: Vec<C64>,
    pub bases: Vec<BasisReport>,
}

impl WeakValueReport {
    pub fn max_sum_residual(&self) -> f64 {
        self.bases.iter().map(|b| b.sum_residual).fold(0.0, f64::max)
    }
}

pub fn weak_value_report(set: &ProjectorKsSet, pps: &PpsPair) -> Result<WeakValueReport> {
    let weak_values = set.projectors.iter().map(|p| weak_value(p, pps)).collect::<Result<Vec<_>>>()?;
    let mut bases = Vec::with_capacity(set.bases.len());
    for b in &set.bases {
        let w: Vec<C64> = b.iter().map(|&k| weak_values[k]).collect();
        let sum: C64 = w.iter().sum();
        bases.push(BasisReport {
            members: b.clone(),
            sum_residual: (sum - 1.0).norm(),
            abl: abl_from_weak_values(&w)?,
            delta: w.iter().filter(|x| x.norm() > EQ_TOL).count(),
            weak_values: w,
        });
    }
    Ok(WeakValueReport { weak_values, bases })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TruthValue {
    One,
    Zero,
    Unassigned,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Pps,
    ForcedOne,
    ForcedZero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Entry {
    pub value: TruthValue,
    pub provenance: Option<Provenance>,
}

impl Entry {
    const UNASSIGNED: Entry = Entry { value: TruthValue::Unassigned, provenance: None };

    pub fn is_forced(&self) -> bool {
        matches!(self.provenance, Some(Provenance::ForcedOne | Provenance::ForcedZero))
    }
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = match self.value {
            TruthValue::One => "1",
            TruthValue::Zero => "0",
            TruthValue::Unassigned => ".",
        };
        if self.is_forced() {
            write!(f, "{v}*")
        } else {
            f.write_str(v)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConflictReason {
    AllZero,
    MultipleOnes,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConflictBasis {
    pub basis: usize,
    pub reason: ConflictReason,
}

/// The realist valuation after one round of forcing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruthAssignment {
    pub entries: Vec<Entry>,
    pub conflict_bases: Vec<ConflictBasis>,
}

impl TruthAssignment {
    pub fn with_provenance(&self, p: Provenance) -> Vec<usize> {
        (0..self.entries.len()).filter(|&k| self.entries[k].provenance == Some(p)).collect()
    }

    pub fn forced_ones(&self) -> Vec<usize> {
        self.with_provenance(Provenance::ForcedOne)
    }

    pub fn forced_zeros(&self) -> Vec<usize> {
        self.with_provenance(Provenance::ForcedZero)
    }

    pub fn conflict_indices(&self) -> Vec<usize> {
        self.conflict_bases.iter().map(|c| c.basis).collect()
    }
}

/// Single-round staged propagation.
///
/// 1. Projectors containing the pre- or post-selected state get 1; those
///    orthogonal to either get 0.
/// 2. A basis whose members are all 0 apart from one unassigned member forces
///    that member to 1.
/// 3. Unassigned projectors orthogonal to a forced 1 are forced to 0.
/// 4. Bases that are all 0 or have several 1s are conflict bases.
///
/// Forced values never seed further forcing.
pub fn propagate(set: &ProjectorKsSet, pps: &PpsPair) -> Result<TruthAssignment> {
    let n = set.projectors.len();
    let mut entries = vec![Entry::UNASSIGNED; n];
    let (mut has_pre, mut has_post) = (false, false);
    for (k, p) in set.projectors.iter().enumerate() {
        if p.dimension() != pps.dimension() {
            return Err(Error::DimensionMismatch(p.dimension(), pps.dimension()));
        }
        let in_pre = p.contains_state(&pps.pre);
        let in_post = p.contains_state(&pps.post);
        has_pre |= in_pre;
        has_post |= in_post;
        if in_pre || in_post {
            entries[k] = Entry { value: TruthValue::One, provenance: Some(Provenance::Pps) };
        } else if p.annihilates(&pps.pre) || p.annihilates(&pps.post) {
            entries[k] = Entry { value: TruthValue::Zero, provenance: Some(Provenance::Pps) };
        }
    }
    if !has_pre {
        return Err(Error::NotRepresentable { which: "pre" });
    }
    if !has_post {
        return Err(Error::NotRepresentable { which: "post" });
    }
    let stage1 = entries.clone();
    let mut forced_one = Vec::new();
    for b in &set.bases {
        let open: Vec<usize> = b.iter().copied().filter(|&k| stage1[k].value != TruthValue::Zero).collect();
        if let [k] = open[..] {
            if stage1[k].value == TruthValue::Unassigned && entries[k].value == TruthValue::Unassigned {
                entries[k] = Entry { value: TruthValue::One, provenance: Some(Provenance::ForcedOne) };
                forced_one.push(k);
            }
        }
    }
    for k in 0..n {
        if entries[k].value == TruthValue::Unassigned
            && forced_one.iter().any(|&f| set.projectors[f].orthogonal(&set.projectors[k]))
        {
            entries[k] = Entry { value: TruthValue::Zero, provenance: Some(Provenance::ForcedZero) };
        }
    }
    let mut conflict_bases = Vec::new();
    for (i, b) in set.bases.iter().enumerate() {
        let ones = b.iter().filter(|&&k| entries[k].value == TruthValue::One).count();
        if b.iter().all(|&k| entries[k].value == TruthValue::Zero) {
            conflict_bases.push(ConflictBasis { basis: i, reason: ConflictReason::AllZero });
        } else if ones >= 2 {
            conflict_bases.push(ConflictBasis { basis: i, reason: ConflictReason::MultipleOnes });
        }
    }
    Ok(TruthAssignment { entries, conflict_bases })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PigeonholeReport {
    pub pigeonhole: bool,
    /// Conflict bases made only of computational-basis-diagonal projectors.
    pub classical_conflict_bases: Vec<usize>,
    /// Member of a conflict basis orthogonal to every forced 1.
    pub max_conflict_projector: Option<usize>,
}

pub fn detect_pigeonhole(assignment: &TruthAssignment, set: &ProjectorKsSet) -> PigeonholeReport {
    let classical: Vec<usize> = assignment
        .conflict_bases
        .iter()
        .map(|c| c.basis)
        .filter(|&b| set.bases[b].iter().all(|&k| set.projectors[k].is_diagonal()))
        .collect();
    let forced = assignment.forced_ones();
    let opposes_all = |k: usize| !forced.is_empty() && forced.iter().all(|&f| set.projectors[f].orthogonal(&set.projectors[k]));
    let search_order = classical.iter().copied().chain(assignment.conflict_indices());
    let mut max_conflict = None;
    for b in search_order {
        if let Some(&k) = set.bases[b].iter().find(|&&k| opposes_all(k)) {
            max_conflict = Some(k);
            break;
        }
    }
    PigeonholeReport { pigeonhole: !classical.is_empty(), classical_conflict_bases: classical, max_conflict_projector: max_conflict }
}

/// Single-qubit pre and post states of the non-KS construction, with
/// `α = nπ/2N`: `|Ψ⟩ = cos(θ/2)|0⟩ + sin(θ/2)|1⟩` and the unnormalized
/// `|Φ⟩ = sin(θ/2)cos α|0⟩ − i cos(θ/2)sin α|1⟩`.
pub fn nonks_qubit_states(n_even: usize, n: i64, theta: f64) -> ([C64; 2], [C64; 2]) {
    let alpha = n as f64 * PI / (2.0 * n_even as f64);
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let pre = [C64::new(c, 0.0), C64::new(s, 0.0)];
    let post = [C64::new(s * alpha.cos(), 0.0), C64::new(0.0, -c * alpha.sin())];
    (pre, post)
}

/// `e^{−inπ(N+1)/2N} [cos^{N+1}(nπ/2N) + (i sin(nπ/2N))^{N+1}]`.
pub fn nonks_closed_form(n_even: usize, n: i64) -> C64 {
    let alpha = n as f64 * PI / (2.0 * n_even as f64);
    let k = (n_even + 1) as i32;
    let bracket = C64::new(alpha.cos().powi(k), 0.0) + C64::new(0.0, alpha.sin()).powi(k);
    C64::from_polar(1.0, -alpha * f64::from(k)) * bracket
}

#[derive(Clone, Debug)]
pub struct NonKsReport {
    /// Number of qubits, `N + 1`.
    pub n_qubits: usize,
    pub z_weak_values: Vec<C64>,
    /// Each observable of the positive ID with its weak value.
    pub id_weak_values: Vec<(PauliObservable, C64)>,
    /// True when every ID observable is forced to −1 and the product of the
    /// forced values contradicts the positive sign.
    pub conflict: bool,
    /// Weak value of the all-`+1` projector on the ID.
    pub max_conflict_weak_value: C64,
    pub closed_form: C64,
    pub pps: PpsPair,
}

/// The `(N+1)`-qubit product-state pigeonhole built on the positive ID whose
/// observables each carry `N` Z letters and one identity.
pub fn nonks_pigeonhole(n_even: usize, n: i64, theta: f64) -> Result<NonKsReport> {
    if n_even == 0 || n_even % 2 == 1 {
        return Err(Error::OddNonKs(n_even));
    }
    if n.rem_euclid(2) == 0 {
        return Err(Error::EvenPhaseIndex(n));
    }
    if theta.sin().abs() < EQ_TOL {
        return Err(Error::DegenerateTheta(theta));
    }
    let q = n_even + 1;
    dense::check_vector_limit(q)?;
    let (pre1, post1) = nonks_qubit_states(n_even, n, theta);
    let single = PpsPair::from_vectors(pre1.to_vec(), post1.to_vec())?;
    let z_single = pauli_weak_value(&"Z".parse()?, &single)?;
    let mut pre = vec![C64::new(1.0, 0.0)];
    let mut post = vec![C64::new(1.0, 0.0)];
    for _ in 0..q {
        pre = dense::kron(&pre, &pre1);
        post = dense::kron(&post, &post1);
    }
    let pps = PpsPair::from_vectors(pre, post)?;
    let id = catalog(&CatalogName::ClassicalId { n: n_even, m: 1 })?;
    let mut id_weak_values = Vec::with_capacity(q);
    for o in &id.observables {
        id_weak_values.push((o.clone(), pauli_weak_value(o, &pps)?));
    }
    let all_minus = id_weak_values.iter().all(|(_, w)| (w + 1.0).norm() < EQ_TOL);
    // An odd number of forced −1 values multiplies to −1, against the +1 sign.
    let conflict = all_minus && q % 2 == 1 && !id.contexts[0].sign.is_minus();
    let gens = id.observables.iter().map(|o| (o.clone(), crate::pauli::Sign::Plus)).collect();
    let max_conflict = StabilizerProjector::new(q, gens)?;
    Ok(NonKsReport {
        n_qubits: q,
        z_weak_values: vec![z_single; q],
        id_weak_values,
        conflict,
        max_conflict_weak_value: weak_value_stabilizer(&max_conflict, &pps)?,
        closed_form: nonks_closed_form(n_even, n),
        pps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ksverify::BasisMode;

    fn square() -> ProjectorKsSet {
        ProjectorKsSet::from_observable_set(&catalog(&CatalogName::Square3).unwrap(), BasisMode::WithHybrids).unwrap()
    }

    fn standard_pps() -> PpsPair {
        PpsPair::parse("+XII,+IXI,+IIX", "+YII,+IYI,+IIY").unwrap()
    }

    #[test]
    fn projector_one_weak_value() {
        let set = square();
        let w = weak_value(&set.projectors[0], &standard_pps()).unwrap();
        assert!((w - C64::new(-0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn single_qubit_anomaly() {
        let pps = PpsPair::parse("+X", "+Y").unwrap();
        let w = weak_value_stabilizer(&StabilizerProjector::parse("+Z").unwrap(), &pps).unwrap();
        let want = C64::from_polar(0.5f64.sqrt(), PI / 4.0);
        assert!((w - want).norm() < 1e-12);
    }

    #[test]
    fn vanishing_overlap() {
        assert!(matches!(PpsPair::parse("+Z", "-Z"), Err(Error::VanishingOverlap(_))));
    }

    #[test]
    fn propagation_matches_square_walkthrough() {
        let set = square();
        let a = propagate(&set, &standard_pps()).unwrap();
        assert_eq!(a.forced_ones(), vec![12, 16, 20]);
        assert_eq!(a.forced_zeros(), vec![0, 1, 2, 3]);
        assert_eq!(a.conflict_indices(), vec![0, 9, 10, 11]);
        let ph = detect_pigeonhole(&a, &set);
        assert!(ph.pigeonhole);
        assert_eq!(ph.max_conflict_projector, Some(0));
    }

    #[test]
    fn row_and_column_pps_forces_nothing() {
        let set = square();
        let pps = PpsPair::parse("+XII,+IXI,+IIX", "+XIX,+YIY,+XXX").unwrap();
        let a = propagate(&set, &pps).unwrap();
        assert!(a.forced_ones().is_empty());
        assert!(!detect_pigeonhole(&a, &set).pigeonhole);
    }

    #[test]
    fn pre_equals_post() {
        let set = square();
        let pps = PpsPair::parse("+XII,+IXI,+IIX", "+XII,+IXI,+IIX").unwrap();
        let a = propagate(&set, &pps).unwrap();
        assert!(a.conflict_bases.is_empty());
    }

    #[test]
    fn nonks_values() {
        let r = nonks_pigeonhole(4, 1, PI / 2.0).unwrap();
        assert!((r.max_conflict_weak_value - r.closed_form).norm() < 1e-9);
        assert!(r.closed_form.re < 0.0);
        assert!(r.conflict);
        assert!(matches!(nonks_pigeonhole(3, 1, 1.0), Err(Error::OddNonKs(3))));
        assert!(matches!(nonks_pigeonhole(4, 2, 1.0), Err(Error::EvenPhaseIndex(2))));
        assert!(matches!(nonks_pigeonhole(4, 1, 0.0), Err(Error::DegenerateTheta(_))));
    }
}
