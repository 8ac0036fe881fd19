//! Mean King analysis.
//!
//! The suitor wins only if some pre/post-selection gives every projector he
//! may measure a weak value of exactly 0 or 1. [`king_witness`] checks one
//! pair, [`search_pps`] looks for such a pair, and [`povm_integrality`] rules
//! it out whenever the projectors sum to a non-integer multiple of `I`.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dense;
use crate::error::{Error, Result};
use crate::ksverify::{ProjectorKsSet, SetProjector};
use crate::ppsengine::{weak_value, PpsPair, OVERLAP_TOL};
use crate::stabilizer::all_stabilizer_states;

pub const KING_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KingVerdict {
    AllZeroOne,
    Witness,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KingWitness {
    pub verdict: KingVerdict,
    /// Lowest-index projector whose weak value is not 0 or 1.
    pub witness: Option<usize>,
    #[serde(serialize_with = "ser_complex_opt")]
    pub witness_value: Option<C64>,
    /// Largest distance of any weak value from `{0, 1}`.
    pub deviation: f64,
}

fn ser_complex_opt<S: serde::Serializer>(v: &Option<C64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    v.map(|c| [c.re, c.im]).serialize(s)
}

impl fmt::Display for KingWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.witness, self.witness_value) {
            (Some(i), Some(w)) => {
                let (re, im) = (w.re + 0.0, if w.im.abs() < 5e-7 { 0.0 } else { w.im });
                write!(f, "witness: projector {} has weak value {re:.6}{im:+.6}i (deviation {:.3e})", i + 1, self.deviation)
            }
            _ => write!(f, "all weak values in {{0, 1}} (deviation {:.3e})", self.deviation),
        }
    }
}

fn distance_from_bits(w: C64) -> f64 {
    w.norm().min((w - 1.0).norm())
}

/// Check the all-0/1 condition for one pre/post-selection.
pub fn king_witness(projectors: &[SetProjector], pps: &PpsPair, tol: f64) -> Result<KingWitness> {
    let values = projectors.iter().map(|p| weak_value(p, pps)).collect::<Result<Vec<_>>>()?;
    Ok(witness_from_values(&values, tol))
}

pub fn king_witness_set(set: &ProjectorKsSet, pps: &PpsPair, tol: f64) -> Result<KingWitness> {
    king_witness(&set.projectors, pps, tol)
}

fn witness_from_values(values: &[C64], tol: f64) -> KingWitness {
    let dist: Vec<f64> = values.iter().map(|&w| distance_from_bits(w)).collect();
    let deviation = dist.iter().copied().fold(0.0, f64::max);
    match dist.iter().position(|&d| d > tol) {
        Some(i) => KingWitness { verdict: KingVerdict::Witness, witness: Some(i), witness_value: Some(values[i]), deviation },
        None => KingWitness { verdict: KingVerdict::AllZeroOne, witness: None, witness_value: None, deviation },
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PovmReport {
    pub sum: DMatrix<C64>,
    pub is_multiple_of_identity: bool,
    /// `c` when the sum equals `c·I`.
    pub multiple: Option<f64>,
    pub is_integer: bool,
}

impl PovmReport {
    /// A non-integer multiple of `I` rules out every all-0/1 assignment.
    pub fn certifies_impossibility(&self) -> bool {
        self.is_multiple_of_identity && !self.is_integer
    }
}

/// `Σ P_i` and whether it is an integer multiple of the identity.
pub fn povm_integrality(projectors: &[DMatrix<C64>], dimension: usize) -> Result<PovmReport> {
    const TOL: f64 = 1e-9;
    let mut sum = DMatrix::<C64>::zeros(dimension, dimension);
    for (i, p) in projectors.iter().enumerate() {
        if p.nrows() != dimension || p.ncols() != dimension {
            return Err(Error::DimensionMismatch(p.nrows(), dimension));
        }
        if (p - p.adjoint()).norm() > TOL {
            return Err(Error::NotProjector(format!("matrix {i} is not Hermitian")));
        }
        if (p * p - p).norm() > TOL {
            return Err(Error::NotProjector(format!("matrix {i} is not idempotent")));
        }
        sum += p;
    }
    let c = sum[(0, 0)].re;
    let off = (&sum - DMatrix::<C64>::identity(dimension, dimension) * C64::new(c, 0.0)).norm();
    let is_multiple = off <= TOL;
    let multiple = is_multiple.then_some(c);
    let is_integer = multiple.is_some_and(|c| (c - c.round()).abs() <= TOL);
    Ok(PovmReport { sum, is_multiple_of_identity: is_multiple, multiple, is_integer })
}

pub fn povm_integrality_set(projectors: &[SetProjector]) -> Result<PovmReport> {
    let d = projectors.first().map(SetProjector::dimension).ok_or_else(|| Error::Input("empty projector list".into()))?;
    let mats = projectors.iter().map(SetProjector::dense_matrix).collect::<Result<Vec<_>>>()?;
    povm_integrality(&mats, d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchStrategy {
    /// Every ordered pair of pure stabilizer states, at most three qubits.
    ExhaustiveStabilizer,
    /// Haar-random pure states from a seeded generator.
    RandomHaar { seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchReport {
    pub best_deviation: f64,
    #[serde(serialize_with = "ser_vec")]
    pub best_pre: Vec<C64>,
    #[serde(serialize_with = "ser_vec")]
    pub best_post: Vec<C64>,
    /// Candidate index of the minimizer.
    pub best_index: usize,
    /// Candidates with non-vanishing overlap that were evaluated.
    pub evaluated: usize,
    pub all_failed: bool,
}

fn ser_vec<S: serde::Serializer>(v: &[C64], s: S) -> std::result::Result<S::Ok, S::Error> {
    v.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>().serialize(s)
}

/// Haar-random unit vector of dimension `d`.
pub fn haar_vector<R: rand::Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..d)
            .map(|_| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
            .collect();
        if let Ok(n) = dense::normalize(&v) {
            return n;
        }
    }
}

/// Deviation for one pair from precomputed `P_i|Ψ⟩`, or `None` when the
/// overlap vanishes.
fn pair_deviation(post: &[C64], pre: &[C64], applied: &[Vec<C64>]) -> Option<f64> {
    let overlap = dense::inner(post, pre);
    if overlap.norm() <= OVERLAP_TOL {
        return None;
    }
    Some(applied.iter().map(|a| distance_from_bits(dense::inner(post, a) / overlap)).fold(0.0, f64::max))
}

/// Minimize the king-witness deviation over candidate pairs.
///
/// `budget` caps the number of candidates: ordered stabilizer pairs in
/// exhaustive mode, random pairs otherwise.
pub fn search_pps(projectors: &[SetProjector], strategy: SearchStrategy, budget: usize) -> Result<SearchReport> {
    if budget == 0 {
        return Err(Error::ZeroBudget);
    }
    let d = projectors.first().map(SetProjector::dimension).ok_or_else(|| Error::Input("empty projector list".into()))?;
    let (pres, posts, pairs): (Vec<Vec<C64>>, Vec<Vec<C64>>, Box<dyn Fn(usize) -> (usize, usize) + Sync>) = match strategy {
        SearchStrategy::ExhaustiveStabilizer => {
            if !d.is_power_of_two() {
                return Err(Error::Input(format!("exhaustive stabilizer search needs a qubit dimension, got {d}")));
            }
            let n = d.trailing_zeros() as usize;
            let states = all_stabilizer_states(n)?
                .iter()
                .map(|s| s.dense_vector())
                .collect::<Result<Vec<_>>>()?;
            let m = states.len();
            (states.clone(), states, Box::new(move |k| (k / m, k % m)))
        }
        SearchStrategy::RandomHaar { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut pres = Vec::with_capacity(budget);
            let mut posts = Vec::with_capacity(budget);
            for _ in 0..budget {
                pres.push(haar_vector(d, &mut rng));
                posts.push(haar_vector(d, &mut rng));
            }
            (pres, posts, Box::new(|k| (k, k)))
        }
    };
    let total = match strategy {
        SearchStrategy::ExhaustiveStabilizer => (pres.len() * posts.len()).min(budget),
        SearchStrategy::RandomHaar { .. } => budget,
    };
    let applied: Vec<Vec<Vec<C64>>> = pres.par_iter().map(|v| projectors.iter().map(|p| p.apply(v)).collect()).collect();
    let best = (0..total)
        .into_par_iter()
        .filter_map(|k| {
            let (i, j) = pairs(k);
            pair_deviation(&posts[j], &pres[i], &applied[i]).map(|dev| (dev, k, 1usize))
        })
        .reduce(
            || (f64::INFINITY, usize::MAX, 0),
            |a, b| {
                let count = a.2 + b.2;
                let pick = if (b.0, b.1) < (a.0, a.1) { b } else { a };
                (pick.0, pick.1, count)
            },
        );
    let (best_deviation, best_index, evaluated) = best;
    if best_index == usize::MAX {
        return Err(Error::VanishingOverlap(0.0));
    }
    let (i, j) = pairs(best_index);
    Ok(SearchReport {
        best_deviation,
        best_pre: pres[i].clone(),
        best_post: posts[j].clone(),
        best_index,
        evaluated,
        all_failed: best_deviation > KING_TOL,
    })
}

/// The 13 qutrit rays of Yu and Oh.
pub fn yu_oh_rays() -> Vec<Vec<C64>> {
    let raw: [[f64; 3]; 13] = [
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 1.0, -1.0],
        [1.0, 0.0, -1.0],
        [1.0, -1.0, 0.0],
        [0.0, 1.0, 1.0],
        [1.0, 0.0, 1.0],
        [1.0, 1.0, 0.0],
        [-1.0, 1.0, 1.0],
        [1.0, -1.0, 1.0],
        [1.0, 1.0, -1.0],
        [1.0, 1.0, 1.0],
    ];
    raw.iter()
        .map(|r| dense::normalize(&r.map(|x| C64::new(x, 0.0))).expect("nonzero"))
        .collect()
}

pub fn yu_oh_projectors() -> Vec<SetProjector> {
    yu_oh_rays().into_iter().map(SetProjector::Ray).collect()
}
