//! Dense brute-force ground truth.
//!
//! Everything here is built from explicit matrices: Pauli operators are
//! Kronecker products of 2×2 matrices and projectors are matrix products of
//! `(I + λO)/2`. None of it goes through the symplectic group algebra, so it
//! can be used to check that algebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::pauli::{Letter, PauliObservable, Sign};

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// A normalized state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    amplitudes: CVector,
}

impl DenseState {
    pub fn new(amplitudes: CVector) -> Result<Self> {
        let n = amplitudes.norm();
        if n < 1e-12 {
            return Err(Error::Input("zero state vector".into()));
        }
        Ok(Self { amplitudes: amplitudes / C64::new(n, 0.0) })
    }

    pub fn from_slice(v: &[C64]) -> Result<Self> {
        Self::new(CVector::from_column_slice(v))
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// Tensor product of single-qubit states, first factor most significant.
    pub fn product(factors: &[[C64; 2]]) -> Result<Self> {
        let mut v = CVector::from_element(1, ONE);
        for f in factors {
            v = v.kronecker(&CVector::from_column_slice(f));
        }
        Self::new(v)
    }

    /// The joint `+1` eigenvector of signed observables, taken from the
    /// largest column of their projector.
    pub fn stabilizer(observables: &[PauliObservable]) -> Result<Self> {
        let p = signed_projector(observables)?;
        let (col, _) = (0..p.ncols())
            .map(|j| (j, p.column(j).norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .ok_or(Error::InconsistentGenerators)?;
        if p.column(col).norm() < 1e-9 {
            return Err(Error::InconsistentGenerators);
        }
        Self::new(p.column(col).into_owned())
    }
}

fn letter_matrix(l: Letter) -> CMatrix {
    let i = C64::new(0.0, 1.0);
    match l {
        Letter::I => CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ONE]),
        Letter::X => CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        Letter::Y => CMatrix::from_row_slice(2, 2, &[ZERO, -i, i, ZERO]),
        Letter::Z => CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
    }
}

/// Dense matrix of a signed Pauli observable.
pub fn pauli_matrix(p: &PauliObservable) -> CMatrix {
    let mut m = CMatrix::from_element(1, 1, C64::new(p.sign().to_f64(), 0.0));
    for l in p.letters() {
        m = m.kronecker(&letter_matrix(l));
    }
    m
}

/// `∏ (I + λ_i O_i)/2` as a dense matrix.
pub fn projector_matrix(n_qubits: usize, generators: &[(PauliObservable, Sign)]) -> CMatrix {
    let d = 1usize << n_qubits;
    let id = CMatrix::identity(d, d);
    let mut m = id.clone();
    for (o, l) in generators {
        m *= (&id + pauli_matrix(o) * C64::new(l.to_f64(), 0.0)) * C64::new(0.5, 0.0);
    }
    m
}

/// `∏ (I + λ_i O_i)/2 · v`, one dense matrix-vector product at a time.
pub fn apply_projector(n_qubits: usize, generators: &[(PauliObservable, Sign)], v: &CVector) -> CVector {
    let _ = n_qubits;
    let mut out = v.clone();
    for (o, l) in generators {
        let ov = pauli_matrix(o) * &out;
        out = (&out + ov * C64::new(l.to_f64(), 0.0)) * C64::new(0.5, 0.0);
    }
    out
}

/// Projector onto the joint `+1` space of signed observables.
pub fn signed_projector(observables: &[PauliObservable]) -> Result<CMatrix> {
    let n = observables.first().map(PauliObservable::n_qubits).ok_or(Error::EmptyPauli)?;
    let gens: Vec<_> = observables.iter().map(|o| (o.clone(), Sign::Plus)).collect();
    Ok(projector_matrix(n, &gens))
}

pub fn ray_projector(v: &CVector) -> CMatrix {
    let u = v / C64::new(v.norm(), 0.0);
    &u * u.adjoint()
}

/// Sign `s` with `∏ O_i = s·I` by explicit matrix multiplication, or `None`
/// when the product is not `±I`.
pub fn oracle_id_sign(context: &[PauliObservable]) -> Option<Sign> {
    let n = context.first()?.n_qubits();
    let d = 1usize << n;
    let mut m = CMatrix::identity(d, d);
    for o in context {
        m *= pauli_matrix(o);
    }
    let id = CMatrix::identity(d, d);
    if (&m - &id).norm() < 1e-9 {
        Some(Sign::Plus)
    } else if (&m + &id).norm() < 1e-9 {
        Some(Sign::Minus)
    } else {
        None
    }
}

/// `⟨Φ|P|Ψ⟩ / ⟨Φ|Ψ⟩`.
pub fn oracle_weak_value(pre: &DenseState, post: &DenseState, p: &CMatrix) -> Result<C64> {
    let overlap = post.amplitudes.dotc(&pre.amplitudes);
    if overlap.norm() <= 1e-10 {
        return Err(Error::VanishingOverlap(overlap.norm()));
    }
    if p.nrows() != pre.dimension() {
        return Err(Error::DimensionMismatch(p.nrows(), pre.dimension()));
    }
    Ok(post.amplitudes.dotc(&(p * &pre.amplitudes)) / overlap)
}

/// ABL probabilities `|⟨Φ|P_k|Ψ⟩|²` normalized over a complete basis.
pub fn oracle_abl(pre: &DenseState, post: &DenseState, basis: &[CMatrix]) -> Result<Vec<f64>> {
    let d = pre.dimension();
    let mut total = CMatrix::zeros(d, d);
    for p in basis {
        if p.nrows() != d {
            return Err(Error::DimensionMismatch(p.nrows(), d));
        }
        total += p;
    }
    let residual = (total - CMatrix::identity(d, d)).norm();
    if residual > 1e-9 {
        return Err(Error::IncompleteBasis(residual));
    }
    let amps: Vec<f64> = basis.iter().map(|p| post.amplitudes.dotc(&(p * &pre.amplitudes)).norm_sqr()).collect();
    let sum: f64 = amps.iter().sum();
    if sum < 1e-20 {
        return Err(Error::ZeroPostselection);
    }
    Ok(amps.into_iter().map(|a| a / sum).collect())
}

/// Summed fine-grained ABL probability of the pieces of a split projector
/// against the coarse projector's own ABL probability.
///
/// `coarse` is a complete basis; member `index` is replaced by `pieces`
/// (which must sum to it) to form the fine basis.
pub fn coarse_graining_gap(
    pre: &DenseState,
    post: &DenseState,
    coarse: &[CMatrix],
    index: usize,
    pieces: &[CMatrix],
) -> Result<(f64, f64)> {
    let coarse_p = oracle_abl(pre, post, coarse)?[index];
    let mut fine: Vec<CMatrix> = pieces.to_vec();
    fine.extend(coarse.iter().enumerate().filter(|(k, _)| *k != index).map(|(_, m)| m.clone()));
    let fine_p = oracle_abl(pre, post, &fine)?;
    Ok((coarse_p, fine_p[..pieces.len()].iter().sum()))
}

/// One step of a sequential projective measurement.
#[derive(Clone, Debug)]
pub enum MeasurementStep {
    /// Two-outcome measurement of a Pauli observable, outcomes `+1` and `−1`.
    Parity(PauliObservable),
    /// A complete basis of projectors; outcome `k` is the member index.
    Basis { label: String, projectors: Vec<CMatrix> },
}

impl MeasurementStep {
    pub fn label(&self) -> String {
        match self {
            MeasurementStep::Parity(o) => o.to_string(),
            MeasurementStep::Basis { label, .. } => label.clone(),
        }
    }

    fn outcomes(&self, d: usize, index: usize) -> Result<Vec<(i64, CMatrix)>> {
        match self {
            MeasurementStep::Parity(o) => {
                if 1usize << o.n_qubits() != d {
                    return Err(Error::InvalidStep { index, reason: format!("{o} does not act on dimension {d}") });
                }
                let id = CMatrix::identity(d, d);
                let m = pauli_matrix(o);
                Ok(vec![(1, (&id + &m) * C64::new(0.5, 0.0)), (-1, (&id - &m) * C64::new(0.5, 0.0))])
            }
            MeasurementStep::Basis { projectors, .. } => {
                let mut total = CMatrix::zeros(d, d);
                for p in projectors {
                    if p.nrows() != d || p.ncols() != d {
                        return Err(Error::InvalidStep { index, reason: "projector dimension mismatch".into() });
                    }
                    total += p;
                }
                if (total - CMatrix::identity(d, d)).norm() > 1e-9 {
                    return Err(Error::InvalidStep { index, reason: "basis projectors do not sum to the identity".into() });
                }
                Ok(projectors.iter().cloned().enumerate().map(|(k, p)| (k as i64, p)).collect())
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct StepOutcome {
    pub label: String,
    pub outcome: i64,
    /// Probability of this outcome given the previous ones.
    pub probability: f64,
}

#[derive(Clone, Debug)]
pub struct Branch {
    pub steps: Vec<StepOutcome>,
    /// Product of the step probabilities.
    pub sequence_probability: f64,
    /// `|⟨Φ|final⟩|²` for the normalized final state.
    pub postselection_probability: f64,
    pub joint_probability: f64,
    /// Probability of this branch given successful post-selection.
    pub conditional_probability: f64,
    pub final_state: CVector,
}

#[derive(Clone, Debug)]
pub struct MeasurementRecord {
    pub labels: Vec<String>,
    /// Branches with nonzero sequence probability, in outcome order.
    pub branches: Vec<Branch>,
    /// Total probability of passing the post-selection.
    pub postselection_probability: f64,
}

impl MeasurementRecord {
    /// `P(step = outcome | post-selection)`.
    pub fn marginal(&self, step: usize, outcome: i64) -> f64 {
        self.branches.iter().filter(|b| b.steps[step].outcome == outcome).map(|b| b.conditional_probability).sum()
    }

    /// Outcomes that are certain (probability 1 within `1e-9`) given
    /// post-selection, one entry per step.
    pub fn certain_outcomes(&self) -> Vec<Option<i64>> {
        (0..self.labels.len())
            .map(|s| {
                let mut seen: Vec<i64> = self.branches.iter().filter(|b| b.conditional_probability > 1e-12).map(|b| b.steps[s].outcome).collect();
                seen.dedup();
                seen.sort_unstable();
                seen.dedup();
                match seen[..] {
                    [o] if (self.marginal(s, o) - 1.0).abs() < 1e-9 => Some(o),
                    _ => None,
                }
            })
            .collect()
    }
}

/// Enumerate every outcome branch of the measurement sequence exactly, then
/// post-select on `post`.
pub fn sequential_measure(pre: &DenseState, post: &DenseState, steps: &[MeasurementStep]) -> Result<MeasurementRecord> {
    let d = pre.dimension();
    if post.dimension() != d {
        return Err(Error::DimensionMismatch(d, post.dimension()));
    }
    let options = steps.iter().enumerate().map(|(i, s)| s.outcomes(d, i)).collect::<Result<Vec<_>>>()?;
    let mut frontier = vec![(Vec::<StepOutcome>::new(), 1.0f64, pre.amplitudes.clone())];
    for (step, opts) in steps.iter().zip(&options) {
        let mut next = Vec::new();
        for (hist, prob, state) in &frontier {
            for (outcome, proj) in opts {
                let v = proj * state;
                let p = v.norm_squared();
                if p < 1e-14 {
                    continue;
                }
                let mut h = hist.clone();
                h.push(StepOutcome { label: step.label(), outcome: *outcome, probability: p });
                next.push((h, prob * p, v / C64::new(p.sqrt(), 0.0)));
            }
        }
        frontier = next;
    }
    let mut branches: Vec<Branch> = frontier
        .into_iter()
        .map(|(steps, seq, state)| {
            let post_p = post.amplitudes.dotc(&state).norm_sqr();
            Branch {
                steps,
                sequence_probability: seq,
                postselection_probability: post_p,
                joint_probability: seq * post_p,
                conditional_probability: 0.0,
                final_state: state,
            }
        })
        .collect();
    let total: f64 = branches.iter().map(|b| b.joint_probability).sum();
    if total < 1e-14 {
        return Err(Error::ZeroPostselection);
    }
    for b in &mut branches {
        b.conditional_probability = b.joint_probability / total;
    }
    Ok(MeasurementRecord { labels: steps.iter().map(MeasurementStep::label).collect(), branches, postselection_probability: total })
}
