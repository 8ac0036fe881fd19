//! Stabilizer projectors of arbitrary rank.
//!
//! A projector is given by commuting generators `O_i` with eigenvalues `λ_i`
//! and equals `∏ (I + λ_i O_i)/2`. With `l` independent generators on `N`
//! qubits its rank is `2^(N-l)`. Two projectors are orthogonal exactly when
//! their signed groups share an observable with opposite eigenvalues.

use std::fmt;
use std::hash::{Hash, Hasher};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::dense;
use crate::error::{Error, Result};
use crate::pauli::{id_sign, PauliObservable, SignedGroup, Sign};

/// An ordered context of commuting observables whose product is `s·I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityProduct {
    members: Vec<PauliObservable>,
    sign: Sign,
}

impl IdentityProduct {
    pub fn new(members: Vec<PauliObservable>) -> Result<Self> {
        let sign = id_sign(&members)?;
        Ok(Self { members, sign })
    }

    pub fn members(&self) -> &[PauliObservable] {
        &self.members
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn n_qubits(&self) -> usize {
        self.members[0].n_qubits()
    }
}

#[derive(Clone)]
pub struct StabilizerProjector {
    n: usize,
    generators: Vec<(PauliObservable, Sign)>,
    group: SignedGroup,
}

impl PartialEq for StabilizerProjector {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group
    }
}

impl Eq for StabilizerProjector {}

impl Hash for StabilizerProjector {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.group.hash(h);
    }
}

impl StabilizerProjector {
    pub fn new(n_qubits: usize, generators: Vec<(PauliObservable, Sign)>) -> Result<Self> {
        let group = SignedGroup::from_eigenpairs(n_qubits, &generators)?;
        Ok(Self { n: n_qubits, generators, group })
    }

    /// The full space on `n` qubits.
    pub fn identity(n_qubits: usize) -> Self {
        Self { n: n_qubits, generators: Vec::new(), group: SignedGroup::new(n_qubits) }
    }

    /// Parse `"+XIX,+XXI,-IXX"`: each entry is an observable whose leading
    /// sign is its eigenvalue.
    pub fn parse(text: &str) -> Result<Self> {
        let mut gens = Vec::new();
        for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let obs: PauliObservable = part.parse()?;
            let lambda = obs.sign();
            gens.push((obs.unsigned(), lambda));
        }
        let n = gens.first().map(|g| g.0.n_qubits()).ok_or(Error::EmptyPauli)?;
        Self::new(n, gens)
    }

    /// The rank-1 state stabilized by `λ_i O_i` for the given letters.
    pub fn from_signed(observables: &[PauliObservable]) -> Result<Self> {
        let n = observables.first().map(PauliObservable::n_qubits).ok_or(Error::EmptyPauli)?;
        Self::new(n, observables.iter().map(|o| (o.unsigned(), o.sign())).collect())
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[(PauliObservable, Sign)] {
        &self.generators
    }

    pub fn group(&self) -> &SignedGroup {
        &self.group
    }

    /// Number of independent generators `l`.
    pub fn independent_generators(&self) -> usize {
        self.group.rank()
    }

    pub fn rank(&self) -> u64 {
        projector_rank(self)
    }

    pub fn is_pure(&self) -> bool {
        self.group.rank() == self.n
    }

    /// Eigenvalue of `obs` on the whole range, if it is fixed.
    pub fn eigenvalue(&self, obs: &PauliObservable) -> Option<Sign> {
        self.group.eigenvalue(obs)
    }

    /// True when the range of `other` lies inside the range of `self`.
    pub fn contains(&self, other: &StabilizerProjector) -> bool {
        self.n == other.n && self.group.rows().iter().all(|r| other.group.eigenvalue(r) == Some(Sign::Plus))
    }

    /// Diagonal in the computational basis.
    pub fn is_diagonal(&self) -> bool {
        self.group.is_z_type()
    }

    pub fn orthogonal(&self, other: &StabilizerProjector) -> bool {
        orthogonal(self, other)
    }

    /// `Π|v⟩`.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let mut out = v.to_vec();
        for r in self.group.rows() {
            out = dense::apply_half_projector(r, &out);
        }
        out
    }

    /// One computational basis index inside the support of the range.
    fn support_seed(&self) -> usize {
        // Z-type rows constrain the parity of z·b; solve them over GF(2).
        let n = self.n;
        let mut eqs: Vec<(usize, bool)> = self
            .group
            .rows()
            .iter()
            .filter(|r| r.is_z_type())
            .map(|r| (r.dense_masks().1, r.sign().is_minus()))
            .collect();
        let mut b = 0usize;
        let mut pivots = Vec::new();
        let mut i = 0;
        for bit in (0..n).rev() {
            let m = 1usize << bit;
            if let Some(k) = (i..eqs.len()).find(|&k| eqs[k].0 & m != 0) {
                eqs.swap(i, k);
                let (pm, pr) = eqs[i];
                for (k, e) in eqs.iter_mut().enumerate() {
                    if k != i && e.0 & m != 0 {
                        e.0 ^= pm;
                        e.1 ^= pr;
                    }
                }
                pivots.push(m);
                i += 1;
            }
        }
        for (e, m) in eqs.iter().zip(pivots) {
            if e.1 {
                b |= m;
            }
        }
        b
    }

    /// Dense matrix `∏ (I + λ_i O_i)/2`.
    pub fn dense_matrix(&self) -> Result<DMatrix<C64>> {
        dense::check_matrix_limit(self.n)?;
        let d = 1usize << self.n;
        let mut m = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
        for j in 0..d {
            let col = self.apply(&dense::basis_state(d, j));
            for (i, a) in col.into_iter().enumerate() {
                m[(i, j)] = a;
            }
        }
        Ok(m)
    }

    /// The normalized state of a rank-1 projector, first nonzero amplitude
    /// real and positive.
    pub fn dense_vector(&self) -> Result<Vec<C64>> {
        if !self.is_pure() {
            return Err(Error::NotPure(self.rank()));
        }
        dense_vector(self)
    }

    /// Normalized vector in the range, seeded from a computational basis
    /// state in the support. Works for any rank.
    pub fn representative(&self) -> Result<Vec<C64>> {
        dense::check_vector_limit(self.n)?;
        let d = 1usize << self.n;
        let v = self.apply(&dense::basis_state(d, self.support_seed()));
        dense::canonicalize(&v).ok_or(Error::InconsistentGenerators)
    }
}

impl fmt::Display for StabilizerProjector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("|")?;
        for (k, (o, l)) in self.generators.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", o.clone().with_sign(o.sign() * *l))?;
        }
        f.write_str("|")
    }
}

impl fmt::Debug for StabilizerProjector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StabilizerProjector{self}")
    }
}

pub fn projector_rank(p: &StabilizerProjector) -> u64 {
    1u64 << (p.n - p.group.rank())
}

pub fn orthogonal(p: &StabilizerProjector, q: &StabilizerProjector) -> bool {
    p.group.opposes(&q.group)
}

/// Joint eigenbasis of an identity product: one projector per eigenvalue
/// pattern of the first `M-1` members in counting order (`++, +-, -+, --`,
/// first member most significant), the last eigenvalue fixed by the sign.
pub fn eigenbasis(id: &IdentityProduct, n_qubits: usize) -> Result<Vec<StabilizerProjector>> {
    let m = id.members.len();
    if id.n_qubits() != n_qubits {
        return Err(Error::QubitMismatch { left: n_qubits, right: id.n_qubits() });
    }
    if m < 2 {
        return Err(Error::InvalidIdentityProduct("fewer than two members".into()));
    }
    let free = m - 1;
    let mut out = Vec::with_capacity(1 << free);
    for pattern in 0..(1usize << free) {
        let mut gens = Vec::with_capacity(m);
        let mut prod = Sign::Plus;
        for (k, obs) in id.members[..free].iter().enumerate() {
            let l = Sign::from_parity((pattern >> (free - 1 - k)) & 1 == 1);
            prod = prod * l;
            gens.push((obs.clone(), l));
        }
        gens.push((id.members[free].clone(), id.sign * prod));
        out.push(StabilizerProjector::new(n_qubits, gens)?);
    }
    Ok(out)
}

/// All subsets of pairwise-orthogonal projectors whose ranks add up to
/// `2^N`, as sorted index lists in lexicographic order.
pub fn enumerate_complete_bases(projectors: &[StabilizerProjector]) -> Vec<Vec<usize>> {
    let Some(first) = projectors.first() else {
        return Vec::new();
    };
    let ranks: Vec<u64> = projectors.iter().map(projector_rank).collect();
    let ortho = |i: usize, j: usize| orthogonal(&projectors[i], &projectors[j]);
    complete_cliques(&ranks, 1u64 << first.n, ortho)
}

/// Depth-first search for orthogonal cliques whose ranks sum to `dim`.
pub(crate) fn complete_cliques(ranks: &[u64], dim: u64, ortho: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let n = ranks.len();
    let table: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i != j && ortho(i, j)).collect()).collect();
    let mut out = Vec::new();
    let mut stack = Vec::new();
    fn dfs(
        start: usize,
        left: u64,
        ranks: &[u64],
        table: &[Vec<bool>],
        stack: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if left == 0 {
            out.push(stack.clone());
            return;
        }
        for j in start..ranks.len() {
            if ranks[j] <= left && stack.iter().all(|&i| table[i][j]) {
                stack.push(j);
                dfs(j + 1, left - ranks[j], ranks, table, stack, out);
                stack.pop();
            }
        }
    }
    dfs(0, dim, ranks, &table, &mut stack, &mut out);
    out
}

/// See [`StabilizerProjector::dense_vector`].
pub fn dense_vector(state: &StabilizerProjector) -> Result<Vec<C64>> {
    if !state.is_pure() {
        return Err(Error::NotPure(state.rank()));
    }
    state.representative()
}

pub fn dense_matrix(p: &StabilizerProjector) -> Result<DMatrix<C64>> {
    p.dense_matrix()
}

/// Extend a projector to a pure state by appending `+L_j` single-qubit
/// observables in qubit order, where `L` is the only non-identity letter the
/// generators use on qubit `j`. `None` when this does not reach rank 1.
pub fn complete_to_pure(p: &StabilizerProjector) -> Option<StabilizerProjector> {
    use crate::pauli::Letter;
    let n = p.n_qubits();
    let mut gens = p.generators().to_vec();
    let mut group = p.group().clone();
    for j in 0..n {
        if group.rank() == n {
            break;
        }
        let mut letters = gens.iter().map(|(o, _)| o.letter(j)).filter(|l| *l != Letter::I);
        let Some(first) = letters.next() else { continue };
        if letters.any(|l| l != first) {
            continue;
        }
        let single = PauliObservable::single(n, j, first);
        if group.contains_letters(&single) || gens.iter().any(|(o, _)| !o.commutes_with(&single)) {
            continue;
        }
        group.insert(single.clone()).ok()?;
        gens.push((single, Sign::Plus));
    }
    (group.rank() == n).then(|| StabilizerProjector::new(n, gens).expect("commuting generators"))
}

/// Every pure stabilizer state on `n` qubits (1080 for `n = 3`).
pub fn all_stabilizer_states(n: usize) -> Result<Vec<StabilizerProjector>> {
    const LIMIT: usize = 3;
    if n == 0 || n > LIMIT {
        return Err(Error::SearchLimit { n_qubits: n, limit: LIMIT });
    }
    let paulis: Vec<PauliObservable> = (1..1usize << (2 * n)).map(|k| pauli_from_index(n, k)).collect();
    let mut seen = std::collections::HashSet::new();
    let mut groups: Vec<Vec<PauliObservable>> = Vec::new();
    fn extend(
        n: usize,
        start: usize,
        gens: &mut Vec<PauliObservable>,
        group: &SignedGroup,
        paulis: &[PauliObservable],
        seen: &mut std::collections::HashSet<Vec<PauliObservable>>,
        groups: &mut Vec<Vec<PauliObservable>>,
    ) {
        if gens.len() == n {
            if seen.insert(group.rows().iter().map(PauliObservable::unsigned).collect()) {
                groups.push(gens.clone());
            }
            return;
        }
        for (k, p) in paulis.iter().enumerate().skip(start) {
            if group.contains_letters(p) || gens.iter().any(|g| !g.commutes_with(p)) {
                continue;
            }
            let mut next = group.clone();
            if next.insert(p.clone()).is_err() {
                continue;
            }
            gens.push(p.clone());
            extend(n, k + 1, gens, &next, paulis, seen, groups);
            gens.pop();
        }
    }
    extend(n, 0, &mut Vec::new(), &SignedGroup::new(n), &paulis, &mut seen, &mut groups);
    let mut out = Vec::with_capacity(groups.len() << n);
    for gens in &groups {
        for signs in 0..1usize << n {
            let pairs = gens.iter().enumerate().map(|(i, g)| (g.clone(), Sign::from_parity(signs >> i & 1 == 1))).collect();
            out.push(StabilizerProjector::new(n, pairs)?);
        }
    }
    Ok(out)
}

/// Pauli string for `k` in base 4, qubit 0 most significant (`0=I, 1=X, 2=Z, 3=Y`).
fn pauli_from_index(n: usize, k: usize) -> PauliObservable {
    use crate::pauli::Letter;
    let letters: Vec<Letter> = (0..n)
        .map(|j| match (k >> (2 * (n - 1 - j))) & 3 {
            0 => Letter::I,
            1 => Letter::X,
            2 => Letter::Z,
            _ => Letter::Y,
        })
        .collect();
    PauliObservable::from_letters(&letters, Sign::Plus)
}

/// A random pure stabilizer state built from random commuting generators
/// with random eigenvalues. Not uniform over stabilizer states.
pub fn random_stabilizer_state<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> StabilizerProjector {
    let mut group = SignedGroup::new(n);
    let mut gens = Vec::with_capacity(n);
    while gens.len() < n {
        let p = pauli_from_index(n, rng.random_range(1..1usize << (2 * n)));
        if group.contains_letters(&p) || gens.iter().any(|(g, _): &(PauliObservable, Sign)| !g.commutes_with(&p)) {
            continue;
        }
        let l = if rng.random::<bool>() { Sign::Plus } else { Sign::Minus };
        group.insert(p.clone()).expect("commuting and independent");
        gens.push((p, l));
    }
    StabilizerProjector::new(n, gens).expect("commuting and independent")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn completion_of_row_state() {
        let p = complete_to_pure(&proj("+XIX,+XXI,+IXX")).unwrap();
        assert_eq!(p, proj("+XII,+IXI,+IIX"));
        assert!(complete_to_pure(&proj("+XYI,+YXI")).is_none());
    }

    #[test]
    fn stabilizer_state_counts() {
        assert_eq!(all_stabilizer_states(1).unwrap().len(), 6);
        assert_eq!(all_stabilizer_states(2).unwrap().len(), 60);
        let three = all_stabilizer_states(3).unwrap();
        assert_eq!(three.len(), 1080);
        let distinct: std::collections::HashSet<_> = three.iter().cloned().collect();
        assert_eq!(distinct.len(), 1080);
    }

    #[test]
    fn random_state_is_pure() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in 1..6 {
            let s = random_stabilizer_state(n, &mut rng);
            assert!(s.is_pure());
        }
    }

    fn proj(s: &str) -> StabilizerProjector {
        StabilizerProjector::parse(s).unwrap()
    }

    fn id(list: &[&str]) -> IdentityProduct {
        IdentityProduct::new(list.iter().map(|s| s.parse().unwrap()).collect()).unwrap()
    }

    #[test]
    fn ranks() {
        assert_eq!(proj("+ZIZ,+ZZI,+XXX").rank(), 1);
        assert_eq!(proj("-ZIZ,+XIX,+YIY").rank(), 2);
        assert_eq!(StabilizerProjector::identity(3).rank(), 8);
        assert_eq!(proj("+ZIZ,+ZZI,+IZZ"), proj("+ZZI,+IZZ"));
    }

    #[test]
    fn inconsistent_rejected() {
        assert_eq!(StabilizerProjector::parse("+ZIZ,+ZZI,-IZZ"), Err(Error::InconsistentGenerators));
    }

    #[test]
    fn orthogonality() {
        assert!(proj("+ZIZ,+ZZI").orthogonal(&proj("-ZIZ,+XIX")));
        assert!(!proj("+XIX,+XXI").orthogonal(&proj("+YIY,+YYI")));
        // Projector 1 against f1 = |+D,+G,-A|.
        assert!(proj("+ZIZ,+ZZI,+IZZ").orthogonal(&proj("+XIX,+YIY,-ZIZ")));
    }

    #[test]
    fn square_row_eigenbasis() {
        let b = eigenbasis(&id(&["ZIZ", "ZZI", "IZZ"]), 3).unwrap();
        assert_eq!(b.len(), 4);
        assert_eq!(b[1], proj("+ZIZ,-ZZI,-IZZ"));
        assert_eq!(b[2], proj("-ZIZ,+ZZI,-IZZ"));
        for p in &b {
            assert_eq!(p.rank(), 2);
        }
        assert_eq!(enumerate_complete_bases(&b), vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn negative_column_eigenbasis() {
        let b = eigenbasis(&id(&["XIX", "YIY", "ZIZ"]), 3).unwrap();
        assert_eq!(b[0], proj("+XIX,+YIY,-ZIZ"));
        assert_eq!(b[1], proj("+XIX,-YIY,+ZIZ"));
    }

    #[test]
    fn dense_forms() {
        assert_eq!(proj("+Z").dense_vector().unwrap(), vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let v = proj("+XII,+IXI,+IIX").dense_vector().unwrap();
        for a in v {
            assert!((a - C64::new(8f64.sqrt().recip(), 0.0)).norm() < 1e-12);
        }
        let m = proj("+ZIZ,+ZZI").dense_matrix().unwrap();
        for i in 0..8 {
            for j in 0..8 {
                let want = if i == j && (i == 0 || i == 7) { 1.0 } else { 0.0 };
                assert!((m[(i, j)] - C64::new(want, 0.0)).norm() < 1e-12);
            }
        }
        let ones = proj("-ZII,-IZI,-IIZ").dense_vector().unwrap();
        assert!((ones[7] - C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(matches!(proj("+ZZ").dense_vector(), Err(Error::NotPure(2))));
    }

    #[test]
    fn containment() {
        let big = proj("+ZIZ,+ZZI");
        assert!(big.contains(&proj("+ZIZ,+ZZI,+XXX")));
        assert!(!big.contains(&proj("+XII,+IXI,+IIX")));
    }
}
