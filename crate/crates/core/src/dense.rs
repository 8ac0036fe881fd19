//! Small state-vector helpers shared by the projector and weak-value code.
//!
//! Qubit 0 is the most significant bit of a basis-state index.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::pauli::PauliObservable;

pub const DEFAULT_VECTOR_LIMIT: usize = 14;
pub const DEFAULT_MATRIX_LIMIT: usize = 10;

/// Qubit caps for dense vectors and matrices. `CONTEXTUA_DENSE_LIMIT` (a
/// single integer) overrides both.
pub fn dense_limits() -> (usize, usize) {
    match std::env::var("CONTEXTUA_DENSE_LIMIT").ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        Some(k) => (k, k),
        None => (DEFAULT_VECTOR_LIMIT, DEFAULT_MATRIX_LIMIT),
    }
}

pub(crate) fn check_vector_limit(n: usize) -> Result<()> {
    let limit = dense_limits().0;
    if n > limit {
        return Err(Error::DenseLimit { n_qubits: n, limit });
    }
    Ok(())
}

pub(crate) fn check_matrix_limit(n: usize) -> Result<()> {
    let limit = dense_limits().1;
    if n > limit {
        return Err(Error::DenseLimit { n_qubits: n, limit });
    }
    Ok(())
}

/// `P|v⟩` for a signed Pauli observable.
pub fn apply_pauli(p: &PauliObservable, v: &[C64]) -> Vec<C64> {
    let (xm, zm) = p.dense_masks();
    let phase = p.xz_phase().to_complex();
    let mut out = vec![C64::new(0.0, 0.0); v.len()];
    for (b, amp) in v.iter().enumerate() {
        let s = if (zm & b).count_ones() % 2 == 1 { -phase } else { phase };
        out[b ^ xm] = s * amp;
    }
    out
}

/// `(I + P)/2 |v⟩`.
pub(crate) fn apply_half_projector(p: &PauliObservable, v: &[C64]) -> Vec<C64> {
    let pv = apply_pauli(p, v);
    v.iter().zip(pv).map(|(a, b)| (a + b) * 0.5).collect()
}

/// `⟨a|b⟩`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum()
}

/// Normalize and rotate the global phase so the first amplitude with
/// magnitude above `1e-12` is real and positive. Returns `None` for a zero
/// vector.
pub fn canonicalize(v: &[C64]) -> Option<Vec<C64>> {
    let n = norm_sqr(v).sqrt();
    if n < 1e-12 {
        return None;
    }
    let first = v.iter().find(|x| x.norm() > 1e-12 * n)?;
    let rot = first.conj() / (first.norm() * n);
    Some(
        v.iter()
            .map(|x| {
                let y = x * rot;
                C64::new(clean(y.re), clean(y.im))
            })
            .collect(),
    )
}

fn clean(x: f64) -> f64 {
    if x.abs() < 1e-15 {
        0.0
    } else {
        x
    }
}

/// Normalize a raw vector, rejecting the zero vector.
pub fn normalize(v: &[C64]) -> Result<Vec<C64>> {
    let n = norm_sqr(v).sqrt();
    if n < 1e-12 {
        return Err(Error::Input("zero vector".into()));
    }
    Ok(v.iter().map(|x| x / n).collect())
}

/// Tensor product `a ⊗ b` with `a` on the more significant qubits.
pub fn kron(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

pub fn basis_state(dim: usize, k: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); dim];
    v[k] = C64::new(1.0, 0.0);
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_action() {
        let y: PauliObservable = "Y".parse().unwrap();
        let out = apply_pauli(&y, &basis_state(2, 0));
        assert!((out[1] - C64::new(0.0, 1.0)).norm() < 1e-15);
        let zx: PauliObservable = "-ZX".parse().unwrap();
        let out = apply_pauli(&zx, &basis_state(4, 2));
        // ZX|10⟩ = -|11⟩, with the extra sign giving +|11⟩.
        assert!((out[3] - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn canonical_phase() {
        let v = vec![C64::new(0.0, 0.0), C64::new(0.0, 2.0)];
        let c = canonicalize(&v).unwrap();
        assert!((c[1] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(canonicalize(&[C64::new(0.0, 0.0)]).is_none());
    }
}
