//! Matrix-free action of a Pauli-sum Hamiltonian.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;

use super::state::{check_qubits, Scalar, StateVector};
use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianTerms;

/// Rows per rayon task.
const CHUNK: usize = 1 << 12;

/// Terms grouped by their X mask. The Z-only terms form a real diagonal;
/// every other group shifts basis states by one fixed mask.
#[derive(Clone, Debug)]
pub struct CompiledHamiltonian<S: Scalar> {
    n: usize,
    diagonal: Vec<f64>,
    /// `(x mask, [(coefficient * i^phase, z mask)])`.
    groups: Vec<(usize, Vec<(S, u64)>)>,
    norm_bound: f64,
}

impl<S: Scalar> CompiledHamiltonian<S> {
    pub fn new(h: &HamiltonianTerms) -> Result<Self> {
        let n = h.n();
        check_qubits(n)?;
        let mut diag_terms = Vec::new();
        let mut groups: BTreeMap<u64, Vec<(S, u64)>> = BTreeMap::new();
        for t in h.terms().iter().filter(|t| t.coefficient != 0.0) {
            let (x, z) = t.op.masks();
            let c = t.op.phase().to_complex() * t.coefficient;
            if x == 0 {
                // Z-only Hermitian terms have real coefficients.
                diag_terms.push((c.re, z));
            } else {
                let s = S::from_complex(c).ok_or_else(|| {
                    Error::InvalidArgument("Hamiltonian has imaginary matrix elements".into())
                })?;
                groups.entry(x).or_default().push((s, z));
            }
        }
        let dim = 1usize << n;
        let diagonal = (0..dim)
            .into_par_iter()
            .with_min_len(CHUNK)
            .map(|j| {
                diag_terms
                    .iter()
                    .map(|&(c, z)| {
                        if (z & j as u64).count_ones() % 2 == 1 {
                            -c
                        } else {
                            c
                        }
                    })
                    .sum()
            })
            .collect();
        Ok(CompiledHamiltonian {
            n,
            diagonal,
            groups: groups.into_iter().map(|(x, ts)| (x as usize, ts)).collect(),
            norm_bound: h.norm_bound(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    pub fn is_diagonal(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    /// `out = H v`, gathering each output amplitude independently.
    pub fn apply_into(&self, v: &[S], out: &mut [S]) {
        assert_eq!(v.len(), self.dim());
        assert_eq!(out.len(), self.dim());
        out.par_iter_mut()
            .with_min_len(CHUNK)
            .enumerate()
            .for_each(|(j, o)| {
                let mut acc = v[j] * S::from_real(self.diagonal[j]);
                for (x, terms) in &self.groups {
                    let k = j ^ x;
                    // <j| i^p X^x Z^z |k> = i^p (-1)^{z.k}
                    for &(c, z) in terms {
                        if (z & k as u64).count_ones() % 2 == 1 {
                            acc -= c * v[k];
                        } else {
                            acc += c * v[k];
                        }
                    }
                }
                *o = acc;
            });
    }

    pub fn apply(&self, v: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); v.len()];
        self.apply_into(v, &mut out);
        out
    }

    /// Z masks whose parity every term conserves, in reduced echelon form.
    pub fn z_symmetries(&self) -> Vec<u64> {
        let mut masks: Vec<u64> = Vec::new();
        // Rows of the constraint system are the X masks; its nullspace over
        // the n bits is the symmetry group.
        let xs: Vec<u64> = self.groups.iter().map(|&(x, _)| x as u64).collect();
        let rows = reduce(xs);
        let pivots: Vec<u32> = rows.iter().map(|r| 63 - r.leading_zeros()).collect();
        for free in (0..self.n as u32).filter(|b| !pivots.contains(b)) {
            let mut m = 1u64 << free;
            for (r, &p) in rows.iter().zip(&pivots) {
                if r >> free & 1 == 1 {
                    m |= 1 << p;
                }
            }
            masks.push(m);
        }
        reduce(masks)
    }
}

/// Reduced echelon form with each pivot at the highest set bit.
fn reduce(mut rows: Vec<u64>) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::new();
    while let Some(top) = rows.iter().copied().filter(|&r| r != 0).max() {
        let bit = 63 - top.leading_zeros();
        rows.retain(|&r| r != top);
        for r in rows.iter_mut().chain(out.iter_mut()) {
            if *r >> bit & 1 == 1 {
                *r ^= top;
            }
        }
        out.push(top);
    }
    out
}

/// A Hermitian operator acting on amplitude vectors.
pub trait LinearOperator<S: Scalar>: Sync {
    fn dim(&self) -> usize;
    fn apply_into(&self, v: &[S], out: &mut [S]);
}

impl<S: Scalar> LinearOperator<S> for CompiledHamiltonian<S> {
    fn dim(&self) -> usize {
        CompiledHamiltonian::dim(self)
    }

    fn apply_into(&self, v: &[S], out: &mut [S]) {
        CompiledHamiltonian::apply_into(self, v, out)
    }
}

const TABLE_BITS: usize = 12;

/// Joint eigenspaces of commuting Z-parity symmetries. Sector `s` holds the
/// basis states `k` with parity `(s >> j) & 1` under mask `j`; a state's
/// index inside its sector is its free (non-pivot) bits, packed.
#[derive(Clone, Debug)]
pub struct SymmetrySectors {
    n: usize,
    masks: Vec<u64>,
    pivots: Vec<u32>,
    pack: [Vec<u32>; 2],
    unpack: [Vec<u64>; 2],
}

impl SymmetrySectors {
    /// `masks` must be in the reduced form of [`CompiledHamiltonian::z_symmetries`].
    pub fn new(n: usize, masks: Vec<u64>) -> Result<Self> {
        check_qubits(n)?;
        let pivots: Vec<u32> = masks.iter().map(|m| 63 - m.leading_zeros()).collect();
        for (i, m) in masks.iter().enumerate() {
            if *m == 0
                || *m >> n != 0
                || pivots
                    .iter()
                    .enumerate()
                    .any(|(j, &p)| j != i && m >> p & 1 == 1)
            {
                return Err(Error::InvalidArgument(
                    "symmetry masks are not in reduced form".into(),
                ));
            }
        }
        let pivot_mask: u64 = pivots.iter().map(|&p| 1u64 << p).sum();
        let free: Vec<u32> = (0..n as u32)
            .filter(|&b| pivot_mask >> b & 1 == 0)
            .collect();
        let half = 1usize << TABLE_BITS;
        let pack_part = |shift: usize| -> Vec<u32> {
            (0..half as u64)
                .map(|chunk| {
                    let k = chunk << shift;
                    free.iter()
                        .enumerate()
                        .filter(|&(_, &b)| k >> b & 1 == 1)
                        .map(|(i, _)| 1u32 << i)
                        .sum()
                })
                .collect()
        };
        let unpack_part = |shift: usize| -> Vec<u64> {
            (0..half as u64)
                .map(|chunk| {
                    let i = chunk << shift;
                    free.iter()
                        .enumerate()
                        .filter(|&(j, _)| i >> j & 1 == 1)
                        .map(|(_, &b)| 1u64 << b)
                        .sum()
                })
                .collect()
        };
        Ok(SymmetrySectors {
            n,
            pack: [pack_part(0), pack_part(TABLE_BITS)],
            unpack: [unpack_part(0), unpack_part(TABLE_BITS)],
            masks,
            pivots,
        })
    }

    pub fn masks(&self) -> &[u64] {
        &self.masks
    }

    pub fn count(&self) -> usize {
        1 << self.masks.len()
    }

    pub fn sector_dim(&self) -> usize {
        1 << (self.n - self.masks.len())
    }

    pub fn sector_of(&self, k: u64) -> usize {
        self.masks
            .iter()
            .enumerate()
            .map(|(j, m)| ((m & k).count_ones() as usize % 2) << j)
            .sum()
    }

    /// Position of basis state `k` inside its sector.
    pub fn index(&self, k: u64) -> usize {
        let lo = (k & ((1 << TABLE_BITS) - 1)) as usize;
        let hi = (k >> TABLE_BITS) as usize;
        (self.pack[0][lo] + self.pack[1][hi]) as usize
    }

    /// Basis state at position `i` of sector `s`.
    pub fn state(&self, s: usize, i: usize) -> u64 {
        let mut k = self.unpack[0][i & ((1 << TABLE_BITS) - 1)] | self.unpack[1][i >> TABLE_BITS];
        for (j, (&m, &p)) in self.masks.iter().zip(&self.pivots).enumerate() {
            if ((m & k).count_ones() as usize & 1) != (s >> j & 1) {
                k |= 1 << p;
            }
        }
        k
    }
}

/// `H` restricted to one symmetry sector.
pub struct SectorOperator<'a, S: Scalar> {
    op: &'a CompiledHamiltonian<S>,
    sectors: &'a SymmetrySectors,
    states: Vec<u64>,
}

impl<'a, S: Scalar> SectorOperator<'a, S> {
    pub fn new(
        op: &'a CompiledHamiltonian<S>,
        sectors: &'a SymmetrySectors,
        s: usize,
    ) -> Result<Self> {
        if sectors.n != op.n || s >= sectors.count() {
            return Err(Error::InvalidArgument(format!(
                "sector {s} does not belong to this operator"
            )));
        }
        let states = (0..sectors.sector_dim())
            .map(|i| sectors.state(s, i))
            .collect();
        Ok(SectorOperator {
            op,
            sectors,
            states,
        })
    }

    pub fn states(&self) -> &[u64] {
        &self.states
    }

    /// Scatter a sector vector into the full space.
    pub fn embed(&self, v: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); self.op.dim()];
        for (&k, &x) in self.states.iter().zip(v) {
            out[k as usize] = x;
        }
        out
    }
}

impl<S: Scalar> LinearOperator<S> for SectorOperator<'_, S> {
    fn dim(&self) -> usize {
        self.states.len()
    }

    fn apply_into(&self, v: &[S], out: &mut [S]) {
        assert_eq!(v.len(), self.states.len());
        assert_eq!(out.len(), self.states.len());
        out.par_iter_mut()
            .with_min_len(CHUNK)
            .enumerate()
            .for_each(|(i, o)| {
                let j = self.states[i] as usize;
                let mut acc = v[i] * S::from_real(self.op.diagonal[j]);
                for (x, terms) in &self.op.groups {
                    let k = j ^ x;
                    let vk = v[self.sectors.index(k as u64)];
                    for &(c, z) in terms {
                        if (z & k as u64).count_ones() % 2 == 1 {
                            acc -= c * vk;
                        } else {
                            acc += c * vk;
                        }
                    }
                }
                *o = acc;
            });
    }
}

/// `H v` for a state of matching size.
pub fn matvec<S: Scalar>(h: &HamiltonianTerms, v: &StateVector<S>) -> Result<StateVector<S>> {
    if h.n() != v.n() {
        return Err(Error::SizeMismatch {
            left: h.n(),
            right: v.n(),
        });
    }
    let op = CompiledHamiltonian::<S>::new(h)?;
    StateVector::from_amplitudes(v.n(), op.apply(v.amplitudes()))
}

/// Dense matrix of `h` for small systems, as row-major complex entries.
pub fn dense_matrix(h: &HamiltonianTerms) -> Result<nalgebra::DMatrix<Complex64>> {
    let op = CompiledHamiltonian::<Complex64>::new(h)?;
    let dim = op.dim();
    let mut m = nalgebra::DMatrix::zeros(dim, dim);
    let mut e = vec![Complex64::new(0.0, 0.0); dim];
    for col in 0..dim {
        e[col] = Complex64::new(1.0, 0.0);
        let hc = op.apply(&e);
        e[col] = Complex64::new(0.0, 0.0);
        for (row, val) in hc.into_iter().enumerate() {
            m[(row, col)] = val;
        }
    }
    Ok(m)
}
