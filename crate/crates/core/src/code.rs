//! Stabilizer groups, code parameters, syndromes and charge tables.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec};
use crate::hamiltonian::HamiltonianTerms;
use crate::pauli::PauliOperator;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilizerGroup {
    n: usize,
    generators: Vec<PauliOperator>,
    #[serde(skip)]
    check_matrix: BitMatrix,
}

impl StabilizerGroup {
    /// Group generated by the Pauli content of the terms of `h`.
    pub fn from_terms(h: &HamiltonianTerms) -> Result<Self> {
        Self::from_generators(h.n(), h.terms().iter().map(|t| t.op.clone()).collect())
    }

    /// Checks Hermiticity, pairwise commutation, and that the relations
    /// among the generators never produce `-I`.
    pub fn from_generators(n: usize, generators: Vec<PauliOperator>) -> Result<Self> {
        for (i, g) in generators.iter().enumerate() {
            if g.n() != n {
                return Err(Error::SizeMismatch {
                    left: n,
                    right: g.n(),
                });
            }
            if !g.is_hermitian() {
                return Err(Error::InvalidArgument(format!(
                    "generator {i} ({g}) is not Hermitian"
                )));
            }
        }
        for i in 0..generators.len() {
            for j in i + 1..generators.len() {
                if generators[i].anticommutes_unchecked(&generators[j]) {
                    return Err(Error::NonCommuting {
                        first: i,
                        second: j,
                    });
                }
            }
        }
        let check_matrix =
            BitMatrix::from_rows(2 * n, generators.iter().map(|g| g.symplectic()).collect());
        // Commuting Hermitian generators: every relation multiplies to +I or -I.
        for combo in &check_matrix.echelon().relations {
            let mut prod = PauliOperator::identity(n);
            for i in combo.iter_ones() {
                prod = &prod * &generators[i];
            }
            if !prod.is_identity() {
                return Err(Error::MinusIdentity {
                    relation: combo.iter_ones().collect(),
                });
            }
        }
        Ok(StabilizerGroup {
            n,
            generators,
            check_matrix,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PauliOperator] {
        &self.generators
    }

    pub fn check_matrix(&self) -> &BitMatrix {
        &self.check_matrix
    }

    /// Independent products of generators equal to `+I`.
    pub fn relations(&self) -> Vec<Vec<usize>> {
        self.check_matrix
            .echelon()
            .relations
            .iter()
            .map(|c| c.iter_ones().collect())
            .collect()
    }

    /// Syndrome bit `i` is set iff `error` anticommutes with generator `i`.
    pub fn syndrome(&self, error: &PauliOperator) -> Result<BitVec> {
        if error.n() != self.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: error.n(),
            });
        }
        Ok(BitVec::from_bools(
            &self
                .generators
                .iter()
                .map(|g| g.anticommutes_unchecked(error))
                .collect::<Vec<_>>(),
        ))
    }

    /// Is `op` (up to phase) in the group?
    pub fn contains(&self, op: &PauliOperator) -> bool {
        op.n() == self.n && self.check_matrix.in_row_span(&op.symplectic())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeParameters {
    pub n: usize,
    pub generators: usize,
    pub rank: usize,
    pub k: usize,
    /// `2^k`.
    pub degeneracy: u128,
}

pub fn rank_and_logicals(g: &StabilizerGroup) -> Result<CodeParameters> {
    let rank = g.check_matrix.rank();
    let k = g.n - rank;
    let degeneracy = 1u128
        .checked_shl(k as u32)
        .filter(|_| k < 128)
        .ok_or_else(|| {
            Error::InvalidArgument(format!("degeneracy 2^{k} does not fit in 128 bits"))
        })?;
    Ok(CodeParameters {
        n: g.n,
        generators: g.generators.len(),
        rank,
        k,
        degeneracy,
    })
}

/// Largest qubit count accepted by [`brute_force_code_dimension`].
pub const BRUTE_FORCE_MAX_QUBITS: usize = 12;

/// Dimension of the joint `+1` eigenspace of the generators, computed as the
/// trace of the product of projectors `(1 + S) / 2` on explicit state vectors.
pub fn brute_force_code_dimension(g: &StabilizerGroup) -> Result<usize> {
    let n = g.n;
    if n > BRUTE_FORCE_MAX_QUBITS {
        return Err(Error::TooManyQubits {
            n,
            max: BRUTE_FORCE_MAX_QUBITS,
        });
    }
    let dim = 1usize << n;
    let mut trace = num_complex::Complex64::new(0.0, 0.0);
    let mut next = vec![num_complex::Complex64::new(0.0, 0.0); dim];
    for j in 0..dim {
        let mut psi = vec![num_complex::Complex64::new(0.0, 0.0); dim];
        psi[j] = 1.0.into();
        for s in &g.generators {
            next.copy_from_slice(&psi);
            for (b, amp) in psi.iter().enumerate() {
                if amp.norm_sqr() == 0.0 {
                    continue;
                }
                let (b2, ph) = s.apply(b as u64)?;
                next[b2 as usize] += amp * ph.to_complex();
            }
            for (p, q) in psi.iter_mut().zip(&next) {
                *p = q * 0.5;
            }
        }
        trace += psi[j];
    }
    if trace.im.abs() > 1e-9 || (trace.re - trace.re.round()).abs() > 1e-9 {
        return Err(Error::Invariant(format!(
            "projector trace {trace} is not an integer"
        )));
    }
    Ok(trace.re.round() as usize)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodeFamily {
    Toric,
    Color,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Vacuum,
    Boson,
    Fermion,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChargeLabel {
    pub family: CodeFamily,
    /// Element of the fusion group as a bit pattern.
    pub bits: u8,
    pub name: String,
    pub statistics: Statistics,
    /// Colour-code fermions split into two families of three.
    pub fermion_family: Option<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChargeTable {
    pub family: CodeFamily,
    /// Indexed by `bits`; entry 0 is the vacuum.
    pub charges: Vec<ChargeLabel>,
    /// `fusion[a][b]` is the bits of `a x b`.
    pub fusion: Vec<Vec<u8>>,
}

impl ChargeTable {
    pub fn nontrivial(&self) -> usize {
        self.charges.len() - 1
    }

    pub fn fuse(&self, a: u8, b: u8) -> u8 {
        self.fusion[a as usize][b as usize]
    }

    pub fn count(&self, stats: Statistics) -> usize {
        self.charges
            .iter()
            .filter(|c| c.statistics == stats)
            .count()
    }
}

const KLEIN: [&str; 4] = ["1", "r", "g", "b"];

/// Charges of the toric code (`e`, `m`, `f`) or the colour code. A colour
/// code charge is a pair of Klein-group elements, one for each of the two
/// plaquette operator types. It is a fermion when both entries are
/// non-trivial and differ.
pub fn charge_table(family: CodeFamily) -> ChargeTable {
    let size: u8 = match family {
        CodeFamily::Toric => 4,
        CodeFamily::Color => 16,
    };
    let charges = (0..size)
        .map(|bits| {
            let (name, statistics, fermion_family) = match family {
                CodeFamily::Toric => {
                    let (name, stats) = match bits {
                        0 => ("1", Statistics::Vacuum),
                        1 => ("e", Statistics::Boson),
                        2 => ("m", Statistics::Boson),
                        _ => ("f", Statistics::Fermion),
                    };
                    (name.to_string(), stats, None)
                }
                CodeFamily::Color => {
                    let (vx, vy) = (bits & 3, bits >> 2);
                    let stats = if bits == 0 {
                        Statistics::Vacuum
                    } else if vx != 0 && vy != 0 && vx != vy {
                        Statistics::Fermion
                    } else {
                        Statistics::Boson
                    };
                    // (r,g), (g,b), (b,r) form one family; the reversed pairs the other.
                    let fam =
                        (stats == Statistics::Fermion)
                            .then(|| if vy == vx % 3 + 1 { 1 } else { 2 });
                    (
                        format!("({},{})", KLEIN[vx as usize], KLEIN[vy as usize]),
                        stats,
                        fam,
                    )
                }
            };
            ChargeLabel {
                family,
                bits,
                name,
                statistics,
                fermion_family,
            }
        })
        .collect();
    let fusion = (0..size)
        .map(|a| (0..size).map(|b| a ^ b).collect())
        .collect();
    ChargeTable {
        family,
        charges,
        fusion,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeReport {
    pub parameters: CodeParameters,
    pub relations: Vec<Vec<usize>>,
    /// Present for codes small enough for the explicit projector check.
    pub brute_force_dimension: Option<usize>,
    pub charges: ChargeTable,
}

pub fn code_report(g: &StabilizerGroup, family: CodeFamily) -> Result<CodeReport> {
    Ok(CodeReport {
        parameters: rank_and_logicals(g)?,
        relations: g.relations(),
        brute_force_dimension: if g.n() <= BRUTE_FORCE_MAX_QUBITS {
            Some(brute_force_code_dimension(g)?)
        } else {
            None
        },
        charges: charge_table(family),
    })
}
