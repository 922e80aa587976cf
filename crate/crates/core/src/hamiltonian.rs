//! Weighted Pauli-term Hamiltonians: the two-body ruby model, the XXZZ toric
//! code, the color code and its strong-coupling effective model.

use std::collections::BTreeMap;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Color, RubyLattice, SquareLattice, TwoColex};
use crate::pauli::{PauliKind, PauliOperator};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Couplings {
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
}

impl Couplings {
    pub fn new(jx: f64, jy: f64, jz: f64) -> Result<Self> {
        let c = Couplings { jx, jy, jz };
        c.check_finite()?;
        Ok(c)
    }

    pub fn check_finite(&self) -> Result<()> {
        if [self.jx, self.jy, self.jz].iter().all(|j| j.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "couplings must be finite: {self:?}"
            )))
        }
    }

    /// Coupling on an edge of the given colour.
    pub fn for_color(&self, color: Color) -> f64 {
        match color {
            Color::Red => self.jx,
            Color::Green => self.jy,
            Color::Blue => self.jz,
        }
    }
}

/// One weighted term `coefficient * op`. `op` is always the `+` tensor
/// product of letters; signs live in the coefficient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coefficient: f64,
    pub op: PauliOperator,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianTerms {
    n: usize,
    terms: Vec<Term>,
}

#[derive(Serialize)]
struct TermLine<'a> {
    coefficient: f64,
    pauli_text: &'a str,
}

impl HamiltonianTerms {
    pub fn new(n: usize) -> Self {
        HamiltonianTerms {
            n,
            terms: Vec::new(),
        }
    }

    /// Append `coefficient * op`. `op` must be Hermitian; a `-` sign on it
    /// is moved into the coefficient.
    pub fn push(&mut self, coefficient: f64, op: PauliOperator) -> Result<()> {
        if op.n() != self.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: op.n(),
            });
        }
        if !coefficient.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "non-finite coefficient for {op}"
            )));
        }
        let sign = op
            .sign()
            .ok_or_else(|| Error::InvalidArgument(format!("term {op} is not Hermitian")))?;
        self.terms.push(Term {
            coefficient: coefficient * sign,
            op: op.hermitian_representative(),
        });
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Indices of terms whose coefficient is exactly zero. They are kept so
    /// that terms stay in bijection with lattice edges or faces.
    pub fn zero_terms(&self) -> Vec<usize> {
        (0..self.terms.len())
            .filter(|&i| self.terms[i].coefficient == 0.0)
            .collect()
    }

    /// True if the matrix is real in the computational basis (every term has
    /// an even number of Y letters).
    pub fn is_real(&self) -> bool {
        self.terms
            .iter()
            .all(|t| t.op.count_kind(PauliKind::Y) % 2 == 0)
    }

    /// `sum |c|`, an upper bound on the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient.abs()).sum()
    }

    /// First pair of terms that anticommute, if any.
    pub fn first_anticommuting_pair(&self) -> Option<(usize, usize)> {
        for i in 0..self.terms.len() {
            for j in i + 1..self.terms.len() {
                if self.terms[i].op.anticommutes_unchecked(&self.terms[j].op) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Does `op` commute with every term (regardless of coefficients)?
    pub fn commutes_with(&self, op: &PauliOperator) -> Result<bool> {
        for t in &self.terms {
            if !t.op.commutes(op)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Terms `{coefficient, pauli_text}`, one JSON object per line.
    pub fn write_json_lines<W: Write>(&self, mut w: W) -> Result<()> {
        for t in &self.terms {
            let line = TermLine {
                coefficient: t.coefficient,
                pauli_text: &t.op.to_text(),
            };
            serde_json::to_writer(&mut w, &line)?;
            writeln!(w)?;
        }
        Ok(())
    }

    /// Nonzero matrix elements as `row col real imag` lines, column-major.
    pub fn write_sparse<W: Write>(&self, mut w: W) -> Result<()> {
        const MAX: usize = 20;
        if self.n > MAX {
            return Err(Error::TooManyQubits {
                n: self.n,
                max: MAX,
            });
        }
        let masks: Vec<(u64, u64, Complex64)> = self
            .terms
            .iter()
            .map(|t| {
                let (x, z) = t.op.masks();
                (x, z, t.op.phase().to_complex() * t.coefficient)
            })
            .collect();
        for col in 0..(1u64 << self.n) {
            let mut entries: BTreeMap<u64, Complex64> = BTreeMap::new();
            for &(x, z, c) in &masks {
                let sign = if (z & col).count_ones() % 2 == 0 {
                    1.0
                } else {
                    -1.0
                };
                *entries.entry(col ^ x).or_default() += c * sign;
            }
            for (row, v) in entries {
                if v.re != 0.0 || v.im != 0.0 {
                    // `+ 0.0` turns -0 into 0.
                    writeln!(w, "{row} {col} {} {}", v.re + 0.0, v.im + 0.0)?;
                }
            }
        }
        Ok(())
    }
}

/// `H = sum_edges J_w s^w_a s^w_b` with red -> x, green -> y, blue -> z, one
/// term per edge in edge order.
pub fn build_two_body(lat: &RubyLattice, c: &Couplings) -> HamiltonianTerms {
    let n = lat.num_sites();
    let mut h = HamiltonianTerms::new(n);
    for e in &lat.edges {
        let kind = match e.color {
            Color::Red => PauliKind::X,
            Color::Green => PauliKind::Y,
            Color::Blue => PauliKind::Z,
        };
        let op =
            PauliOperator::uniform(n, [e.a, e.b], kind).expect("edge endpoints are valid sites");
        h.push(c.for_color(e.color), op)
            .expect("two-body terms are Hermitian");
    }
    let zeros = h.zero_terms().len();
    if zeros > 0 {
        log::warn!("two-body Hamiltonian has {zeros} zero-coefficient terms (kept)");
    }
    h
}

/// Plaquette stabilizer `X_1 X_2 Z_3 Z_4` of the toric code.
pub fn toric_plaquette(sq: &SquareLattice, p: usize) -> PauliOperator {
    let c = sq.plaquettes[p].corners;
    PauliOperator::from_sparse(
        sq.num_sites(),
        [
            (c[0], PauliKind::X),
            (c[1], PauliKind::X),
            (c[2], PauliKind::Z),
            (c[3], PauliKind::Z),
        ],
    )
    .expect("plaquette corners are distinct sites")
}

/// `H = -sum_p A_p`.
pub fn build_toric(sq: &SquareLattice) -> HamiltonianTerms {
    let mut h = HamiltonianTerms::new(sq.num_sites());
    for p in 0..sq.plaquettes.len() {
        h.push(-1.0, toric_plaquette(sq, p))
            .expect("plaquettes are Hermitian");
    }
    h
}

/// `(B^x_f, B^y_f)`: X, respectively Y, on every vertex of face `f`.
pub fn color_stabilizers(colex: &TwoColex, f: usize) -> Result<(PauliOperator, PauliOperator)> {
    let support = colex.face_support(f);
    if !support.len().is_multiple_of(2) {
        return Err(Error::OddFace {
            face: f,
            len: support.len(),
        });
    }
    let n = colex.num_vertices();
    Ok((
        PauliOperator::uniform(n, support.iter().copied(), PauliKind::X)?,
        PauliOperator::uniform(n, support.iter().copied(), PauliKind::Y)?,
    ))
}

/// `H_cc = -sum_f (B^x_f + B^y_f)`, two terms per face.
pub fn build_color_code(colex: &TwoColex) -> Result<HamiltonianTerms> {
    let mut h = HamiltonianTerms::new(colex.num_vertices());
    for f in 0..colex.faces.len() {
        let (bx, by) = color_stabilizers(colex, f)?;
        h.push(-1.0, bx)?;
        h.push(-1.0, by)?;
    }
    Ok(h)
}

/// Reading of the printed relation for the effective `k_x`, `k_y`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EffectiveRule {
    /// `k_x ~ |J_y|^3`, `k_y ~ |J_x|^3`, symmetric under x <-> y.
    #[default]
    Symmetric,
    /// `k_y ~ |J_z|^3` exactly as printed, evaluated without rescaling.
    Literal,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectiveValues {
    pub kx: f64,
    pub ky: f64,
    pub kz: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectiveCoefficients {
    pub rule: EffectiveRule,
    /// Values used by [`build_effective`].
    pub kx: f64,
    pub ky: f64,
    pub kz: f64,
    /// The formulas exactly as printed, for audit.
    pub literal: EffectiveValues,
}

pub const KZ_PREFACTOR: f64 = 3.0 / 8.0;
pub const KXY_PREFACTOR: f64 = 55489.0 / 13824.0;

/// Effective couplings of the `Q = 0` sector.
///
/// The formulas are stated in units `J_z = 1/4`. For the symmetric rule,
/// other `J_z` are handled by dimensional analysis: `k_z` is sixth order in
/// `J_x, J_y` over five powers of the triangle gap `4 J_z`, `k_x, k_y` are
/// ninth order over eight powers.
pub fn effective_coefficients(c: &Couplings, rule: EffectiveRule) -> Result<EffectiveCoefficients> {
    c.check_finite()?;
    let pxy = (c.jx * c.jy).abs().powi(3);
    let literal = EffectiveValues {
        kx: KXY_PREFACTOR * pxy * c.jy.abs().powi(3),
        ky: KXY_PREFACTOR * pxy * c.jz.abs().powi(3),
        kz: KZ_PREFACTOR * pxy,
    };
    let (kx, ky, kz) = match rule {
        EffectiveRule::Literal => (literal.kx, literal.ky, literal.kz),
        EffectiveRule::Symmetric => {
            if c.jz == 0.0 {
                return Err(Error::InvalidArgument(
                    "effective couplings need jz != 0".into(),
                ));
            }
            let gap = 4.0 * c.jz.abs();
            (
                KXY_PREFACTOR * pxy * c.jy.abs().powi(3) / gap.powi(8),
                KXY_PREFACTOR * pxy * c.jx.abs().powi(3) / gap.powi(8),
                KZ_PREFACTOR * pxy / gap.powi(5),
            )
        }
    };
    Ok(EffectiveCoefficients {
        rule,
        kx,
        ky,
        kz,
        literal,
    })
}

/// `H_eff = -sum_f (k_x B^x_f + k_y B^y_f + k_z B^x_f B^y_f)`, three terms
/// per face. The sign of `B^x B^y` is folded into its coefficient.
pub fn build_effective(
    colex: &TwoColex,
    c: &Couplings,
    rule: EffectiveRule,
) -> Result<HamiltonianTerms> {
    let k = effective_coefficients(c, rule)?;
    let mut h = HamiltonianTerms::new(colex.num_vertices());
    for f in 0..colex.faces.len() {
        let (bx, by) = color_stabilizers(colex, f)?;
        let bxy = bx.multiply(&by)?;
        h.push(-k.kx, bx)?;
        h.push(-k.ky, by)?;
        h.push(-k.kz, bxy)?;
    }
    Ok(h)
}
