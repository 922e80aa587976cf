//! n-qubit Pauli operators in binary symplectic form with exact phases.
//!
//! An operator is stored as `i^phase * prod_j X_j^{x_j} Z_j^{z_j}` with X to
//! the left of Z on every site. Y therefore carries `phase = 1` (Y = iXZ).
//!
//! The text form writes the tensor product of letters, so the printed
//! coefficient is `i^(phase - #Y)`:
//!
//! ```
//! use ruby_tcc::pauli::{PauliKind, PauliOperator};
//! let y = PauliOperator::single(2, 0, PauliKind::Y).unwrap();
//! assert_eq!(y.phase_exp(), 1);
//! assert_eq!(y.to_text(), "Y0");
//! let p = PauliOperator::parse(3, "-iX0 Z2").unwrap();
//! assert_eq!(PauliOperator::parse(3, &p.to_text()).unwrap(), p);
//! ```

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::BitVec;

/// A power of `i`, stored mod 4.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn new(exp: i64) -> Self {
        Phase(exp.rem_euclid(4) as u8)
    }

    pub fn exp(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }

    /// `+1` or `-1` for real phases.
    pub fn sign(self) -> Option<f64> {
        match self.0 {
            0 => Some(1.0),
            2 => Some(-1.0),
            _ => None,
        }
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    pub fn conj(self) -> Self {
        Phase::new(-(self.0 as i64))
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
        f.write_str(["+1", "+i", "-1", "-i"][self.0 as usize])
    }
}

/// Single-qubit Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PauliKind {
    X,
    Y,
    Z,
}

impl PauliKind {
    pub const ALL: [PauliKind; 3] = [PauliKind::X, PauliKind::Y, PauliKind::Z];

    pub fn bits(self) -> (bool, bool) {
        match self {
            PauliKind::X => (true, false),
            PauliKind::Y => (true, true),
            PauliKind::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Option<Self> {
        match (x, z) {
            (true, false) => Some(PauliKind::X),
            (true, true) => Some(PauliKind::Y),
            (false, true) => Some(PauliKind::Z),
            (false, false) => None,
        }
    }

    pub fn letter(self) -> char {
        match self {
            PauliKind::X => 'X',
            PauliKind::Y => 'Y',
            PauliKind::Z => 'Z',
        }
    }

    fn from_letter(c: char) -> Option<Self> {
        match c {
            'X' | 'x' => Some(PauliKind::X),
            'Y' | 'y' => Some(PauliKind::Y),
            'Z' | 'z' => Some(PauliKind::Z),
            _ => None,
        }
    }
}

/// An n-qubit Pauli operator `i^phase_exp * X^x Z^z`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    n: usize,
    x: BitVec,
    z: BitVec,
    phase: Phase,
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        PauliOperator {
            n,
            x: BitVec::zeros(n),
            z: BitVec::zeros(n),
            phase: Phase::ONE,
        }
    }

    /// Build from raw parts. `phase_exp` is reduced mod 4.
    pub fn from_parts(x: BitVec, z: BitVec, phase_exp: i64) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::SizeMismatch {
                left: x.len(),
                right: z.len(),
            });
        }
        Ok(PauliOperator {
            n: x.len(),
            x,
            z,
            phase: Phase::new(phase_exp),
        })
    }

    /// Hermitian single-site Pauli.
    pub fn single(n: usize, site: usize, kind: PauliKind) -> Result<Self> {
        PauliOperator::from_sparse(n, [(site, kind)])
    }

    /// The tensor product of the given letters with coefficient `+1`.
    /// Repeated sites are rejected.
    pub fn from_sparse(
        n: usize,
        letters: impl IntoIterator<Item = (usize, PauliKind)>,
    ) -> Result<Self> {
        let mut op = PauliOperator::identity(n);
        let mut ys = 0i64;
        for (site, kind) in letters {
            if site >= n {
                return Err(Error::SiteOutOfRange { site, n });
            }
            if op.x.get(site) || op.z.get(site) {
                return Err(Error::DuplicateSite { site });
            }
            let (xb, zb) = kind.bits();
            op.x.set(site, xb);
            op.z.set(site, zb);
            if kind == PauliKind::Y {
                ys += 1;
            }
        }
        op.phase = Phase::new(ys);
        Ok(op)
    }

    /// The same letter on every listed site.
    pub fn uniform(
        n: usize,
        sites: impl IntoIterator<Item = usize>,
        kind: PauliKind,
    ) -> Result<Self> {
        PauliOperator::from_sparse(n, sites.into_iter().map(|s| (s, kind)))
    }

    /// Hermitian representative of a symplectic vector `[x | z]` of length 2n.
    pub fn from_symplectic(v: &BitVec) -> Self {
        let n = v.len() / 2;
        let mut op = PauliOperator {
            n,
            x: v.slice(0, n),
            z: v.slice(n, n),
            phase: Phase::ONE,
        };
        op.phase = Phase::new(op.y_count() as i64);
        op
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn xbits(&self) -> &BitVec {
        &self.x
    }

    pub fn zbits(&self) -> &BitVec {
        &self.z
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn phase_exp(&self) -> u8 {
        self.phase.exp()
    }

    /// `[x | z]` as a single bit vector of length 2n.
    pub fn symplectic(&self) -> BitVec {
        self.x.concat(&self.z)
    }

    pub fn kind_at(&self, site: usize) -> Option<PauliKind> {
        PauliKind::from_bits(self.x.get(site), self.z.get(site))
    }

    pub fn support(&self) -> Vec<usize> {
        self.x.or(&self.z).iter_ones().collect()
    }

    pub fn weight(&self) -> usize {
        self.x.or(&self.z).count_ones()
    }

    /// Non-identity letters in ascending site order.
    pub fn letters(&self) -> Vec<(usize, PauliKind)> {
        self.support()
            .into_iter()
            .filter_map(|s| self.kind_at(s).map(|k| (s, k)))
            .collect()
    }

    pub fn count_kind(&self, kind: PauliKind) -> usize {
        match kind {
            PauliKind::X => self.x.count_ones() - self.y_count(),
            PauliKind::Y => self.y_count(),
            PauliKind::Z => self.z.count_ones() - self.y_count(),
        }
    }

    fn y_count(&self) -> usize {
        self.x.and_count(&self.z)
    }

    /// Is the operator a multiple of the identity?
    pub fn is_identity_up_to_phase(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    pub fn is_identity(&self) -> bool {
        self.is_identity_up_to_phase() && self.phase == Phase::ONE
    }

    pub fn is_hermitian(&self) -> bool {
        (self.phase.exp() as usize + self.y_count()).is_multiple_of(2)
    }

    /// Coefficient in front of the tensor product of letters.
    pub fn letter_phase(&self) -> Phase {
        self.phase * Phase::new(-(self.y_count() as i64))
    }

    /// Same Pauli content with coefficient `+1` in front of the letters.
    pub fn hermitian_representative(&self) -> Self {
        let mut out = self.clone();
        out.phase = Phase::new(self.y_count() as i64);
        out
    }

    /// Sign `s` with `self = s * self.hermitian_representative()`;
    /// `None` if the operator is not Hermitian.
    pub fn sign(&self) -> Option<f64> {
        self.letter_phase().sign()
    }

    pub fn with_phase(&self, phase: Phase) -> Self {
        let mut out = self.clone();
        out.phase = phase;
        out
    }

    pub fn negate(&self) -> Self {
        self.with_phase(self.phase * Phase::MINUS_ONE)
    }

    pub fn adjoint(&self) -> Self {
        // (i^p X Z)^dag = i^-p Z X = i^-p (-1)^{x.z} X Z
        self.with_phase(self.phase.conj() * Phase::new(2 * self.y_count() as i64))
    }

    fn check_size(&self, other: &PauliOperator) -> Result<()> {
        if self.n != other.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    /// Exact product `self * other`.
    pub fn multiply(&self, other: &PauliOperator) -> Result<Self> {
        self.check_size(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &PauliOperator) -> Self {
        let swaps = self.z.and_count(&other.x) as i64;
        PauliOperator {
            n: self.n,
            x: self.x.xor(&other.x),
            z: self.z.xor(&other.z),
            phase: Phase::new(self.phase.exp() as i64 + other.phase.exp() as i64 + 2 * swaps),
        }
    }

    /// Symplectic inner product mod 2.
    pub fn anticommutes_unchecked(&self, other: &PauliOperator) -> bool {
        (self.x.and_count(&other.z) + self.z.and_count(&other.x)) % 2 == 1
    }

    pub fn commutes(&self, other: &PauliOperator) -> Result<bool> {
        self.check_size(other)?;
        Ok(!self.anticommutes_unchecked(other))
    }

    pub fn square(&self) -> Self {
        self.mul_unchecked(self)
    }

    /// Action on a computational basis state:
    /// `P|j> = scalar * |new_index>`.
    pub fn apply(&self, basis_index: u64) -> Result<(u64, Phase)> {
        if self.n > 63 {
            return Err(Error::TooManyQubits { n: self.n, max: 63 });
        }
        let dim = 1u64 << self.n;
        if basis_index >= dim {
            return Err(Error::IndexOutOfRange {
                index: basis_index,
                dim,
            });
        }
        let (x, z) = self.masks();
        let flips = (z & basis_index).count_ones() as i64;
        Ok((
            basis_index ^ x,
            Phase::new(self.phase.exp() as i64 + 2 * flips),
        ))
    }

    /// `(x, z)` as machine words, qubit j at bit j. Requires `n <= 64`.
    pub fn masks(&self) -> (u64, u64) {
        (
            self.x.to_u64().expect("operator wider than 64 qubits"),
            self.z.to_u64().expect("operator wider than 64 qubits"),
        )
    }

    /// Extend to a larger register, sites keep their indices.
    pub fn embed(&self, n: usize) -> Result<Self> {
        if n < self.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: n,
            });
        }
        let mut x = BitVec::zeros(n);
        let mut z = BitVec::zeros(n);
        for i in self.x.iter_ones() {
            x.set(i, true);
        }
        for i in self.z.iter_ones() {
            z.set(i, true);
        }
        Ok(PauliOperator {
            n,
            x,
            z,
            phase: self.phase,
        })
    }

    /// Canonical text: optional coefficient then letters in ascending site
    /// order, e.g. `-iX0 Z3 Y7`. The identity prints as `I`.
    pub fn to_text(&self) -> String {
        let prefix = match self.letter_phase().exp() {
            0 => "",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        let body = if self.is_identity_up_to_phase() {
            "I".to_string()
        } else {
            self.letters()
                .iter()
                .map(|(s, k)| format!("{}{}", k.letter(), s))
                .collect::<Vec<_>>()
                .join(" ")
        };
        format!("{prefix}{body}")
    }

    /// Strict parser: one letter per site.
    pub fn parse(n: usize, text: &str) -> Result<Self> {
        let (phase, tokens) = tokenize(text)?;
        let mut seen = BTreeSet::new();
        for &(site, _) in &tokens {
            if !seen.insert(site) {
                return Err(Error::DuplicateSite { site });
            }
        }
        let op = PauliOperator::from_sparse(n, tokens)?;
        Ok(op.with_phase(op.phase * phase))
    }

    /// Lenient parser: tokens are multiplied left to right, so repeated sites
    /// are allowed (`-iX0 Z0` is `-Y0`).
    pub fn parse_product(n: usize, text: &str) -> Result<Self> {
        let (phase, tokens) = tokenize(text)?;
        let mut op = PauliOperator::identity(n).with_phase(phase);
        for (site, kind) in tokens {
            op = op.mul_unchecked(&PauliOperator::single(n, site, kind)?);
        }
        Ok(op)
    }
}

fn parse_error(text: &str, reason: impl Into<String>) -> Error {
    Error::Parse {
        text: text.to_string(),
        reason: reason.into(),
    }
}

fn tokenize(text: &str) -> Result<(Phase, Vec<(usize, PauliKind)>)> {
    let trimmed = text.trim();
    let (negative, rest) = if let Some(r) = trimmed.strip_prefix('-') {
        (true, r)
    } else if let Some(r) = trimmed.strip_prefix('\u{2212}') {
        (true, r)
    } else if let Some(r) = trimmed.strip_prefix('+') {
        (false, r)
    } else {
        (false, trimmed)
    };
    let rest = rest.trim_start();
    let (imag, rest) = match rest.strip_prefix('i') {
        Some(r) => (true, r),
        None => (false, rest),
    };
    let phase = Phase::new(if negative { 2 } else { 0 } + if imag { 1 } else { 0 });
    let body = rest.trim();
    if body.is_empty() {
        return Err(parse_error(text, "missing operator"));
    }
    if body == "I" {
        return Ok((phase, Vec::new()));
    }
    let mut tokens = Vec::new();
    for tok in body.split_whitespace() {
        let mut chars = tok.chars();
        let letter = chars
            .next()
            .expect("split_whitespace yields nonempty tokens");
        let kind = PauliKind::from_letter(letter)
            .ok_or_else(|| parse_error(text, format!("unknown letter in token {tok:?}")))?;
        let digits = chars.as_str();
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(parse_error(
                text,
                format!("bad site index in token {tok:?}"),
            ));
        }
        let site: usize = digits
            .parse()
            .map_err(|_| parse_error(text, format!("site index overflow in token {tok:?}")))?;
        tokens.push((site, kind));
    }
    Ok((phase, tokens))
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pauli[{}]({})", self.n, self.to_text())
    }
}

/// Panics if the qubit counts differ; use [`PauliOperator::multiply`] for a
/// checked product.
impl Mul for &PauliOperator {
    type Output = PauliOperator;
    fn mul(self, rhs: &PauliOperator) -> PauliOperator {
        assert_eq!(self.n, rhs.n, "Pauli size mismatch");
        self.mul_unchecked(rhs)
    }
}

#[derive(Serialize, Deserialize)]
struct PauliRepr {
    n: usize,
    pauli: String,
}

impl Serialize for PauliOperator {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        PauliRepr {
            n: self.n,
            pauli: self.to_text(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PauliOperator {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let repr = PauliRepr::deserialize(deserializer)?;
        PauliOperator::parse(repr.n, &repr.pauli).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(n: usize, s: &str) -> PauliOperator {
        PauliOperator::parse(n, s).unwrap()
    }

    #[test]
    fn singles() {
        let x = PauliOperator::single(1, 0, PauliKind::X).unwrap();
        let y = PauliOperator::single(1, 0, PauliKind::Y).unwrap();
        let z = PauliOperator::single(1, 0, PauliKind::Z).unwrap();
        assert_eq!(
            (x.xbits().get(0), x.zbits().get(0), x.phase_exp()),
            (true, false, 0)
        );
        assert_eq!(
            (y.xbits().get(0), y.zbits().get(0), y.phase_exp()),
            (true, true, 1)
        );
        assert_eq!(
            (z.xbits().get(0), z.zbits().get(0), z.phase_exp()),
            (false, true, 0)
        );
        assert!(PauliOperator::single(1, 1, PauliKind::X).is_err());
    }

    #[test]
    fn products_of_singles() {
        let x = p(1, "X0");
        let z = p(1, "Z0");
        let y = p(1, "Y0");
        // XZ = -iY
        let xz = x.multiply(&z).unwrap();
        assert_eq!(xz, y.with_phase(y.phase() * Phase::MINUS_I));
        assert_eq!(xz.phase_exp(), 0);
        assert!(x.multiply(&x).unwrap().is_identity());
        // ZX = iY
        assert_eq!(&z * &x, y.with_phase(y.phase() * Phase::I));
        assert!(x.multiply(&p(2, "X0")).is_err());
    }

    #[test]
    fn commutation_examples() {
        assert!(p(2, "X0 X1").commutes(&p(2, "Z0 Z1")).unwrap());
        assert!(!p(2, "X0").commutes(&p(2, "Z0")).unwrap());
        assert!(p(2, "Y0 Y1").commutes(&p(2, "X0 X1")).unwrap());
    }

    #[test]
    fn apply_examples() {
        assert_eq!(p(1, "X0").apply(0).unwrap(), (1, Phase::ONE));
        assert_eq!(p(1, "Z0").apply(1).unwrap(), (1, Phase::MINUS_ONE));
        assert_eq!(p(1, "Y0").apply(0).unwrap(), (1, Phase::I));
        assert_eq!(p(1, "Y0").apply(1).unwrap(), (0, Phase::MINUS_I));
        assert!(p(1, "X0").apply(2).is_err());
    }

    #[test]
    fn text_round_trip_and_canonical_form() {
        let op = p(2, "X0 Z1");
        assert_eq!(op.xbits().to_u64(), Some(0b01));
        assert_eq!(op.zbits().to_u64(), Some(0b10));
        assert_eq!(op.phase_exp(), 0);
        assert_eq!(
            PauliOperator::single(2, 0, PauliKind::Y).unwrap().to_text(),
            "Y0"
        );
        assert_eq!(p(8, "+i Y7 X0").to_text(), "+iX0 Y7");
        assert_eq!(p(8, " -i  Z3 X0").to_text(), "-iX0 Z3");
        assert_eq!(p(2, "\u{2212}I").to_text(), "-I");
        for s in ["I", "-I", "+iI", "-iY1 Y2", "X0 Y1 Z2"] {
            assert_eq!(p(3, s).to_text(), s);
        }
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            PauliOperator::parse(2, "X0 Z0"),
            Err(Error::DuplicateSite { site: 0 })
        ));
        assert!(matches!(
            PauliOperator::parse(2, "Q0"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            PauliOperator::parse(2, "X"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            PauliOperator::parse(2, "X5"),
            Err(Error::SiteOutOfRange { .. })
        ));
        assert!(matches!(
            PauliOperator::parse(2, ""),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            PauliOperator::parse(2, "X0 -Z1"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn parse_product_matches_multiply() {
        let xz = p(1, "X0").multiply(&p(1, "Z0")).unwrap();
        let expected = xz.with_phase(xz.phase() * Phase::MINUS_I);
        let parsed = PauliOperator::parse_product(1, "\u{2212}iX0 Z0").unwrap();
        assert_eq!(parsed, expected);
        assert_eq!(parsed.phase_exp(), 3);
        assert_eq!(parsed.to_text(), "-Y0");
    }

    #[test]
    fn hermiticity_and_adjoint() {
        assert!(p(2, "Y0 Y1").is_hermitian());
        assert!(!p(2, "+iX0").is_hermitian());
        let a = p(3, "+iX0 Y1 Z2");
        let ad = a.adjoint();
        assert!(a.multiply(&ad).unwrap().is_identity());
    }

    #[test]
    fn serde_round_trip() {
        let a = p(5, "-iX0 Y3");
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, r#"{"n":5,"pauli":"-iX0 Y3"}"#);
        let back: PauliOperator = serde_json::from_str(&json).unwrap();
        assert_eq!(back, a);
    }

    fn arb_pauli(n: usize) -> impl Strategy<Value = PauliOperator> {
        (prop::collection::vec(0u8..4, n), 0i64..4).prop_map(move |(letters, ph)| {
            let mut x = BitVec::zeros(n);
            let mut z = BitVec::zeros(n);
            for (i, l) in letters.iter().enumerate() {
                x.set(i, l & 1 == 1);
                z.set(i, l & 2 == 2);
            }
            PauliOperator::from_parts(x, z, ph).unwrap()
        })
    }

    proptest! {
        #[test]
        fn associativity(a in arb_pauli(7), b in arb_pauli(7), c in arb_pauli(7)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        }

        #[test]
        fn commutation_matches_products(a in arb_pauli(6), b in arb_pauli(6)) {
            prop_assert_eq!(a.commutes(&b).unwrap(), &a * &b == &b * &a);
        }

        #[test]
        fn text_round_trip(a in arb_pauli(12)) {
            prop_assert_eq!(PauliOperator::parse(12, &a.to_text()).unwrap(), a);
        }

        #[test]
        fn squares_are_plus_minus_identity(a in arb_pauli(6)) {
            let sq = a.square();
            prop_assert!(sq.is_identity_up_to_phase());
            prop_assert!(sq.phase().is_real());
            if a.is_hermitian() {
                prop_assert!(sq.is_identity());
            }
        }

        #[test]
        fn hermitian_closure(a in arb_pauli(6), b in arb_pauli(6)) {
            let (a, b) = (a.hermitian_representative(), b.hermitian_representative());
            if a.commutes(&b).unwrap() {
                prop_assert!((&a * &b).is_hermitian());
            }
        }

        #[test]
        fn apply_composes(a in arb_pauli(5), b in arb_pauli(5), j in 0u64..32) {
            let (j1, s1) = a.apply(j).unwrap();
            let (j2, s2) = b.apply(j1).unwrap();
            let (k, s) = (&b * &a).apply(j).unwrap();
            prop_assert_eq!((j2, s1 * s2), (k, s));
        }
    }
}
