//! Exact N-qubit Pauli-group algebra.
//!
//! Observables are stored in the symplectic form: one bit vector for the X
//! part and one for the Z part, plus a Hermitian sign. The single-qubit letter
//! at position `j` is `I` (x=0,z=0), `X` (1,0), `Z` (0,1) or `Y` (1,1), and the
//! operator for a bit pair is `i^(x·z) X^x Z^z`, so that `Y = iXZ`.
//!
//! Products are tracked exactly with an `i`-power counter; no floating point is
//! involved anywhere in this module.

use std::fmt;
use std::ops::{Mul, Neg};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An eigenvalue or identity-product sign, `+1` or `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Sign {
    #[default]
    Plus,
    Minus,
}

impl Sign {
    pub fn from_i8(v: i8) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    /// `Minus` when `odd` is true.
    pub fn from_parity(odd: bool) -> Sign {
        if odd {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn to_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn to_f64(self) -> f64 {
        f64::from(self.to_i8())
    }

    pub fn is_minus(self) -> bool {
        self == Sign::Minus
    }

    pub fn product<I: IntoIterator<Item = Sign>>(iter: I) -> Sign {
        iter.into_iter().fold(Sign::Plus, |a, b| a * b)
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_parity(self.is_minus() != rhs.is_minus())
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        self * Sign::Minus
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.is_minus() { "-" } else { "+" })
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i8(self.to_i8())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Sign, D::Error> {
        let v = i8::deserialize(d)?;
        Sign::from_i8(v).ok_or_else(|| serde::de::Error::custom(format!("sign must be 1 or -1, got {v}")))
    }
}

/// A power of `i`: `i^k` with `k` in `0..4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_power(k: i64) -> Phase {
        Phase(k.rem_euclid(4) as u8)
    }

    pub fn power(self) -> u8 {
        self.0
    }

    pub fn from_sign(s: Sign) -> Phase {
        if s.is_minus() {
            Phase::MINUS_ONE
        } else {
            Phase::ONE
        }
    }

    /// `Some` for the real phases `±1`.
    pub fn as_sign(self) -> Option<Sign> {
        match self.0 {
            0 => Some(Sign::Plus),
            2 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn to_complex(self) -> num_complex::Complex64 {
        use num_complex::Complex64 as C;
        match self.0 {
            0 => C::new(1.0, 0.0),
            1 => C::new(0.0, 1.0),
            2 => C::new(-1.0, 0.0),
            _ => C::new(0.0, -1.0),
        }
    }
}

impl Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            0 => "+1",
            1 => "+i",
            2 => "-1",
            _ => "-i",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Z => (false, true),
            Letter::Y => (true, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Letter {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (false, true) => Letter::Z,
            (true, true) => Letter::Y,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }
}

fn words(n: usize) -> usize {
    n.div_ceil(64)
}

fn popcount_and(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(p, q)| (p & q).count_ones()).sum()
}

fn xor_into(a: &mut [u64], b: &[u64]) {
    for (p, q) in a.iter_mut().zip(b) {
        *p ^= q;
    }
}

fn get_bit(v: &[u64], j: usize) -> bool {
    (v[j / 64] >> (j % 64)) & 1 == 1
}

fn set_bit(v: &mut [u64], j: usize, on: bool) {
    if on {
        v[j / 64] |= 1 << (j % 64);
    } else {
        v[j / 64] &= !(1 << (j % 64));
    }
}

/// A Hermitian N-qubit Pauli observable `±P₁⊗…⊗P_N`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliObservable {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    sign: Sign,
}

impl PauliObservable {
    pub fn identity(n: usize) -> Self {
        Self { n, x: vec![0; words(n)], z: vec![0; words(n)], sign: Sign::Plus }
    }

    pub fn from_letters(letters: &[Letter], sign: Sign) -> Self {
        let mut p = Self::identity(letters.len());
        for (j, l) in letters.iter().enumerate() {
            p.set_letter(j, *l);
        }
        p.sign = sign;
        p
    }

    /// A single-letter operator on qubit `qubit` of an `n`-qubit register.
    pub fn single(n: usize, qubit: usize, letter: Letter) -> Self {
        let mut p = Self::identity(n);
        p.set_letter(qubit, letter);
        p
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn with_sign(mut self, sign: Sign) -> Self {
        self.sign = sign;
        self
    }

    /// The same letters with sign `+1`.
    pub fn unsigned(&self) -> Self {
        self.clone().with_sign(Sign::Plus)
    }

    pub fn letter(&self, j: usize) -> Letter {
        Letter::from_bits(get_bit(&self.x, j), get_bit(&self.z, j))
    }

    pub fn set_letter(&mut self, j: usize, l: Letter) {
        let (xb, zb) = l.bits();
        set_bit(&mut self.x, j, xb);
        set_bit(&mut self.z, j, zb);
    }

    pub fn letters(&self) -> Vec<Letter> {
        (0..self.n).map(|j| self.letter(j)).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().all(|w| *w == 0) && self.z.iter().all(|w| *w == 0)
    }

    /// True when no qubit carries an X or Y, i.e. the operator is diagonal in
    /// the computational basis.
    pub fn is_z_type(&self) -> bool {
        self.x.iter().all(|w| *w == 0)
    }

    pub fn same_letters(&self, other: &Self) -> bool {
        self.n == other.n && self.x == other.x && self.z == other.z
    }

    pub fn weight(&self) -> usize {
        self.x.iter().zip(&self.z).map(|(a, b)| (a | b).count_ones() as usize).sum()
    }

    fn y_count(&self) -> u32 {
        popcount_and(&self.x, &self.z)
    }

    /// X and Z bit masks with qubit `j` at integer bit `n-1-j` (qubit 0 is
    /// the most significant), for dense state-vector arithmetic.
    pub(crate) fn dense_masks(&self) -> (usize, usize) {
        let mut xm = 0usize;
        let mut zm = 0usize;
        for j in 0..self.n {
            let bit = 1usize << (self.n - 1 - j);
            if get_bit(&self.x, j) {
                xm |= bit;
            }
            if get_bit(&self.z, j) {
                zm |= bit;
            }
        }
        (xm, zm)
    }

    /// Phase in front of `X^x Z^z` for this observable: `sign · i^(#Y)`.
    pub(crate) fn xz_phase(&self) -> Phase {
        Phase::from_sign(self.sign) * Phase::from_power(i64::from(self.y_count()))
    }

    /// Bit `b` of the concatenated `(x | z)` vector of length `2n`.
    pub(crate) fn symplectic_bit(&self, b: usize) -> bool {
        if b < self.n {
            get_bit(&self.x, b)
        } else {
            get_bit(&self.z, b - self.n)
        }
    }

    pub(crate) fn lowest_symplectic_bit(&self) -> Option<usize> {
        (0..2 * self.n).find(|&b| self.symplectic_bit(b))
    }

    fn check_same_size(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::QubitMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }

    /// The literal matrix product `self · other`, with its `i`-power phase.
    pub fn multiply(&self, other: &Self) -> Result<PhasedProduct> {
        self.check_same_size(other)?;
        let mut x = self.x.clone();
        let mut z = self.z.clone();
        xor_into(&mut x, &other.x);
        xor_into(&mut z, &other.z);
        let out = PauliObservable { n: self.n, x, z, sign: Sign::Plus };
        // (i^a X^x1 Z^z1)(i^b X^x2 Z^z2) = i^(a+b) (-1)^(z1·x2) X^x3 Z^z3
        let k = i64::from(self.y_count()) + i64::from(other.y_count()) + 2 * i64::from(popcount_and(&self.z, &other.x))
            - i64::from(out.y_count());
        let phase = Phase::from_sign(self.sign) * Phase::from_sign(other.sign) * Phase::from_power(k);
        Ok(PhasedProduct { phase, observable: out })
    }

    /// `+1` if the two observables commute, `-1` if they anticommute.
    pub fn commutation_sign(&self, other: &Self) -> Result<Sign> {
        self.check_same_size(other)?;
        let s = popcount_and(&self.x, &other.z) + popcount_and(&self.z, &other.x);
        Ok(Sign::from_parity(s % 2 == 1))
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        matches!(self.commutation_sign(other), Ok(Sign::Plus))
    }

    /// Product of two commuting observables as a Hermitian observable.
    pub(crate) fn commuting_product(&self, other: &Self) -> PauliObservable {
        let prod = self.multiply(other).expect("sizes checked by caller");
        prod.hermitian().expect("commuting Pauli product is Hermitian")
    }
}

impl fmt::Display for PauliObservable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.sign)?;
        for j in 0..self.n {
            write!(f, "{}", self.letter(j).as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliObservable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pauli({self})")
    }
}

impl FromStr for PauliObservable {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let mut chars = text.chars().peekable();
        let sign = match chars.peek() {
            Some('+') => {
                chars.next();
                Sign::Plus
            }
            Some('-') | Some('−') => {
                chars.next();
                Sign::Minus
            }
            _ => Sign::Plus,
        };
        let offset = usize::from(text.len() != chars.clone().map(char::len_utf8).sum::<usize>());
        let mut letters = Vec::new();
        for (pos, ch) in chars.enumerate() {
            let l = match ch {
                'I' => Letter::I,
                'X' => Letter::X,
                'Y' => Letter::Y,
                'Z' => Letter::Z,
                _ => return Err(Error::BadPauliChar { ch, pos: pos + offset }),
            };
            letters.push(l);
        }
        if letters.is_empty() {
            return Err(Error::EmptyPauli);
        }
        Ok(PauliObservable::from_letters(&letters, sign))
    }
}

impl Serialize for PauliObservable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliObservable {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parse a signed Pauli string such as `"-YIY"`.
pub fn parse_pauli(text: &str) -> Result<PauliObservable> {
    text.parse()
}

/// A Pauli product carrying its full phase; the observable part has sign `+1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhasedProduct {
    pub phase: Phase,
    pub observable: PauliObservable,
}

impl PhasedProduct {
    /// The product as a Hermitian observable, if the phase is real.
    pub fn hermitian(&self) -> Option<PauliObservable> {
        self.phase.as_sign().map(|s| self.observable.clone().with_sign(s))
    }
}

impl fmt::Display for PhasedProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letters = self.observable.to_string();
        write!(f, "({})·{}", self.phase, &letters[1..])
    }
}

pub fn multiply(p: &PauliObservable, q: &PauliObservable) -> Result<PhasedProduct> {
    p.multiply(q)
}

pub fn commutation_sign(p: &PauliObservable, q: &PauliObservable) -> Result<Sign> {
    p.commutation_sign(q)
}

/// The sign `s` of an identity product: the ordered product of the context
/// equals `s·I`.
pub fn id_sign(context: &[PauliObservable]) -> Result<Sign> {
    let first = context.first().ok_or_else(|| Error::NotIdentityProduct("empty context".into()))?;
    for (i, p) in context.iter().enumerate() {
        for q in &context[i + 1..] {
            if p.commutation_sign(q)? == Sign::Minus {
                return Err(Error::NotMutuallyCommuting(p.to_string(), q.to_string()));
            }
        }
    }
    let mut acc = PhasedProduct { phase: Phase::ONE, observable: PauliObservable::identity(first.n) };
    for p in context {
        let step = acc.observable.multiply(p)?;
        acc = PhasedProduct { phase: acc.phase * step.phase, observable: step.observable };
    }
    if !acc.observable.is_identity() {
        return Err(Error::NotIdentityProduct(acc.to_string()));
    }
    acc.phase.as_sign().ok_or_else(|| Error::NotIdentityProduct(acc.to_string()))
}

/// Outcome of conjugating a stabilizer description by a Pauli operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Conjugation {
    /// The relative phase `a` when `U` belongs to the stabilizer group (then
    /// `a = λ_U`); `None` when the phase depends on the state representative.
    pub phase: Option<Sign>,
    /// New eigenvalues `λ'_i = c_{iU}·λ_i`, in input order.
    pub eigenvalues: Vec<(PauliObservable, Sign)>,
}

/// Apply `U` to the joint eigenstate described by `state`.
pub fn conjugate_stabilizer(u: &PauliObservable, state: &[(PauliObservable, Sign)]) -> Result<Conjugation> {
    let group = SignedGroup::from_eigenpairs(u.n_qubits(), state)?;
    let mut out = Vec::with_capacity(state.len());
    for (obs, lambda) in state {
        out.push((obs.clone(), u.commutation_sign(obs)? * *lambda));
    }
    Ok(Conjugation { phase: group.eigenvalue(u), eigenvalues: out })
}

/// An abelian group of signed Pauli operators that stabilize a common
/// subspace, kept in fully reduced row-echelon form over GF(2).
///
/// Every row is a signed Hermitian observable with eigenvalue `+1` on the
/// subspace. Rows are sorted by pivot (lowest set symplectic bit) and each
/// pivot bit is set in exactly one row, so two groups are equal exactly when
/// their row lists are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignedGroup {
    n: usize,
    rows: Vec<PauliObservable>,
    pivots: Vec<usize>,
}

impl SignedGroup {
    pub fn new(n: usize) -> Self {
        Self { n, rows: Vec::new(), pivots: Vec::new() }
    }

    /// The group generated by `λ_i·O_i` for each `(O_i, λ_i)`.
    pub fn from_eigenpairs(n: usize, pairs: &[(PauliObservable, Sign)]) -> Result<Self> {
        let mut g = Self::new(n);
        for (obs, lambda) in pairs {
            let signed = obs.clone().with_sign(obs.sign() * *lambda);
            g.insert(signed)?;
        }
        Ok(g)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    /// Number of independent generators.
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[PauliObservable] {
        &self.rows
    }

    /// Multiply `p` by rows until no pivot bit is left. Returns the residual
    /// with its accumulated phase.
    fn reduce(&self, p: &PauliObservable) -> PhasedProduct {
        let mut cur = PhasedProduct { phase: Phase::from_sign(p.sign), observable: p.unsigned() };
        for (row, &pivot) in self.rows.iter().zip(&self.pivots) {
            if cur.observable.symplectic_bit(pivot) {
                let step = cur.observable.multiply(row).expect("sizes match");
                cur = PhasedProduct { phase: cur.phase * step.phase, observable: step.observable };
            }
        }
        cur
    }

    /// Insert a signed stabilizer element. Returns `Ok(true)` if it was
    /// independent of the existing rows.
    pub fn insert(&mut self, p: PauliObservable) -> Result<bool> {
        if p.n_qubits() != self.n {
            return Err(Error::QubitMismatch { left: self.n, right: p.n_qubits() });
        }
        for row in &self.rows {
            if !row.commutes_with(&p) {
                return Err(Error::NotMutuallyCommuting(row.to_string(), p.to_string()));
            }
        }
        let red = self.reduce(&p);
        let new_row = red.hermitian().expect("commuting reduction keeps a real phase");
        if new_row.is_identity() {
            return match new_row.sign() {
                Sign::Plus => Ok(false),
                Sign::Minus => Err(Error::InconsistentGenerators),
            };
        }
        let pivot = new_row.lowest_symplectic_bit().expect("nonidentity");
        for row in &mut self.rows {
            if row.symplectic_bit(pivot) {
                *row = row.commuting_product(&new_row);
            }
        }
        let at = self.pivots.partition_point(|&q| q < pivot);
        self.rows.insert(at, new_row);
        self.pivots.insert(at, pivot);
        Ok(true)
    }

    /// If `±p` belongs to the group, the eigenvalue of `p` on the stabilized
    /// subspace.
    pub fn eigenvalue(&self, p: &PauliObservable) -> Option<Sign> {
        if p.n_qubits() != self.n {
            return None;
        }
        let red = self.reduce(p);
        if red.observable.is_identity() {
            red.phase.as_sign()
        } else {
            None
        }
    }

    pub fn contains_letters(&self, p: &PauliObservable) -> bool {
        self.eigenvalue(p).is_some()
    }

    /// True when the rows mention no X or Y.
    pub fn is_z_type(&self) -> bool {
        self.rows.iter().all(PauliObservable::is_z_type)
    }

    /// Every element of the group (2^rank of them), each with sign `+1` on
    /// the stabilized subspace. Intended for small groups.
    pub fn elements(&self) -> Vec<PauliObservable> {
        let mut out = vec![PauliObservable::identity(self.n)];
        for row in &self.rows {
            let extra: Vec<_> = out.iter().map(|e| e.commuting_product(row)).collect();
            out.extend(extra);
        }
        out
    }

    /// True when some observable lies in both groups with opposite
    /// eigenvalues, i.e. the two stabilized subspaces are orthogonal.
    pub fn opposes(&self, other: &SignedGroup) -> bool {
        if self.n != other.n {
            return false;
        }
        // Gaussian elimination on (a, b) pairs keyed by letters(a)·letters(b);
        // each pair reducing to zero letters exhibits a shared element.
        struct Entry {
            a: PauliObservable,
            b: PauliObservable,
            key: PauliObservable,
            pivot: usize,
        }
        let id = PauliObservable::identity(self.n);
        let mut reduced: Vec<Entry> = Vec::new();
        let candidates = self
            .rows
            .iter()
            .map(|r| (r.clone(), id.clone()))
            .chain(other.rows.iter().map(|r| (id.clone(), r.clone())));
        for (mut a, mut b) in candidates {
            let mut key = a.multiply(&b).expect("sizes match").observable;
            for e in &reduced {
                if key.symplectic_bit(e.pivot) {
                    a = a.commuting_product(&e.a);
                    b = b.commuting_product(&e.b);
                    key = key.multiply(&e.key).expect("sizes match").observable;
                }
            }
            match key.lowest_symplectic_bit() {
                None => {
                    if a.sign() != b.sign() {
                        return true;
                    }
                }
                Some(pivot) => reduced.push(Entry { a, b, key, pivot }),
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliObservable {
        s.parse().unwrap()
    }

    #[test]
    fn parse_examples() {
        let a = p("+ZIZ");
        assert_eq!(a.letters(), vec![Letter::Z, Letter::I, Letter::Z]);
        assert_eq!(a.sign(), Sign::Plus);
        let b = p("-XXI");
        assert_eq!(b.letters(), vec![Letter::X, Letter::X, Letter::I]);
        assert_eq!(b.sign(), Sign::Minus);
        let c = p("YIY");
        assert_eq!(c.sign(), Sign::Plus);
        assert_eq!(c.to_string(), "+YIY");
    }

    #[test]
    fn parse_errors() {
        assert_eq!(parse_pauli(""), Err(Error::EmptyPauli));
        assert_eq!(parse_pauli("+"), Err(Error::EmptyPauli));
        assert_eq!(parse_pauli("ZQZ"), Err(Error::BadPauliChar { ch: 'Q', pos: 1 }));
        assert_eq!(parse_pauli("-ZzZ"), Err(Error::BadPauliChar { ch: 'z', pos: 2 }));
    }

    #[test]
    fn single_qubit_products() {
        let zx = p("Z").multiply(&p("X")).unwrap();
        assert_eq!(zx.phase, Phase::I);
        assert_eq!(zx.observable, p("Y"));
        let xz = p("X").multiply(&p("Z")).unwrap();
        assert_eq!(xz.phase, Phase::MINUS_I);
        let yy = p("-Y").multiply(&p("Y")).unwrap();
        assert_eq!(yy.phase, Phase::MINUS_ONE);
        assert!(yy.observable.is_identity());
    }

    #[test]
    fn three_qubit_product() {
        let r = p("ZIZ").multiply(&p("XIX")).unwrap();
        assert_eq!(r.phase, Phase::MINUS_ONE);
        assert_eq!(r.observable, p("YIY"));
        let sq = p("-XYZ").multiply(&p("-XYZ")).unwrap();
        assert_eq!(sq.phase, Phase::ONE);
        assert!(sq.observable.is_identity());
    }

    #[test]
    fn qubit_mismatch() {
        assert!(matches!(p("ZZ").multiply(&p("Z")), Err(Error::QubitMismatch { .. })));
        assert!(p("ZZ").commutation_sign(&p("ZZZ")).is_err());
    }

    #[test]
    fn commutation_examples() {
        assert_eq!(commutation_sign(&p("Z"), &p("X")).unwrap(), Sign::Minus);
        assert_eq!(commutation_sign(&p("ZIZ"), &p("XIX")).unwrap(), Sign::Plus);
        assert_eq!(commutation_sign(&p("ZIZ"), &p("ZZI")).unwrap(), Sign::Plus);
        assert_eq!(commutation_sign(&p("ZZI"), &p("XIX")).unwrap(), Sign::Minus);
    }

    #[test]
    fn id_sign_examples() {
        assert_eq!(id_sign(&[p("ZIZ"), p("ZZI"), p("IZZ")]).unwrap(), Sign::Plus);
        assert_eq!(id_sign(&[p("ZIZ"), p("XIX"), p("YIY")]).unwrap(), Sign::Minus);
        assert_eq!(id_sign(&[p("XXX"), p("XYY"), p("YXY"), p("YYX")]).unwrap(), Sign::Minus);
        assert_eq!(id_sign(&[p("-ZIZ"), p("ZZI"), p("IZZ")]).unwrap(), Sign::Minus);
    }

    #[test]
    fn id_sign_errors() {
        assert!(matches!(id_sign(&[p("ZI"), p("XI"), p("YI")]), Err(Error::NotMutuallyCommuting(..))));
        assert!(matches!(id_sign(&[p("ZI"), p("IZ")]), Err(Error::NotIdentityProduct(_))));
    }

    #[test]
    fn conjugation_by_member_gives_its_eigenvalue() {
        let state = vec![(p("ZIZ"), Sign::Minus), (p("ZZI"), Sign::Plus), (p("ZII"), Sign::Plus)];
        let c = conjugate_stabilizer(&p("ZIZ"), &state).unwrap();
        assert_eq!(c.phase, Some(Sign::Minus));
        assert_eq!(c.eigenvalues, state);
        // IZZ = ZIZ·ZZI has eigenvalue −1·+1.
        let c2 = conjugate_stabilizer(&p("IZZ"), &state).unwrap();
        assert_eq!(c2.phase, Some(Sign::Minus));
    }

    #[test]
    fn conjugation_flips_anticommuting_eigenvalues() {
        let state = vec![(p("ZIZ"), Sign::Plus), (p("ZZI"), Sign::Plus), (p("IZZ"), Sign::Plus)];
        let c = conjugate_stabilizer(&p("XIX"), &state).unwrap();
        let lambdas: Vec<_> = c.eigenvalues.iter().map(|e| e.1).collect();
        assert_eq!(lambdas, vec![Sign::Plus, Sign::Minus, Sign::Minus]);
        assert_eq!(c.phase, None);
        let same = conjugate_stabilizer(&p("ZZZ"), &state).unwrap();
        assert_eq!(same.eigenvalues, state);
    }

    #[test]
    fn conjugation_rejects_inconsistent_state() {
        let state = vec![(p("ZIZ"), Sign::Plus), (p("ZZI"), Sign::Plus), (p("IZZ"), Sign::Minus)];
        assert_eq!(conjugate_stabilizer(&p("XXX"), &state), Err(Error::InconsistentGenerators));
    }

    #[test]
    fn group_canonical_form() {
        let a = SignedGroup::from_eigenpairs(3, &[(p("ZIZ"), Sign::Plus), (p("ZZI"), Sign::Plus)]).unwrap();
        let b = SignedGroup::from_eigenpairs(3, &[(p("IZZ"), Sign::Plus), (p("ZZI"), Sign::Plus)]).unwrap();
        assert_eq!(a, b);
        let mut c = a.clone();
        assert!(!c.insert(p("IZZ")).unwrap());
        assert_eq!(c, a);
        assert_eq!(c.insert(p("-IZZ")), Err(Error::InconsistentGenerators));
        assert_eq!(a.elements().len(), 4);
    }

    #[test]
    fn opposition() {
        let a = SignedGroup::from_eigenpairs(2, &[(p("ZI"), Sign::Plus), (p("IZ"), Sign::Plus)]).unwrap();
        let b = SignedGroup::from_eigenpairs(2, &[(p("ZI"), Sign::Minus), (p("IX"), Sign::Plus)]).unwrap();
        assert!(a.opposes(&b));
        let c = SignedGroup::from_eigenpairs(2, &[(p("XI"), Sign::Plus), (p("IX"), Sign::Plus)]).unwrap();
        assert!(!a.opposes(&c));
        // ZZ is shared: +1 in a, −1 in d.
        let d = SignedGroup::from_eigenpairs(2, &[(p("ZZ"), Sign::Minus), (p("XX"), Sign::Plus)]).unwrap();
        assert!(a.opposes(&d));
        let e = SignedGroup::from_eigenpairs(2, &[(p("ZZ"), Sign::Plus), (p("XX"), Sign::Plus)]).unwrap();
        assert!(!a.opposes(&e));
    }
}
