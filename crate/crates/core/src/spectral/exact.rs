//! Spectra that need no iterative solver.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;
use crate::hamiltonian::HamiltonianTerms;
use crate::pauli::PauliOperator;

/// Largest number of independent terms enumerated by [`commuting_spectrum`].
pub const MAX_INDEPENDENT_TERMS: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub energy: f64,
    pub multiplicity: u128,
}

/// Exact spectrum of a sum of pairwise commuting Pauli terms.
///
/// The independent terms take every joint sign pattern; each dependent
/// term's sign follows from the operator identity expressing it through
/// the independent ones. Each pattern is `2^(n - rank)`-fold degenerate.
/// Levels closer than `merge_tol` are merged.
pub fn commuting_spectrum(h: &HamiltonianTerms, merge_tol: f64) -> Result<Vec<Level>> {
    if let Some((a, b)) = h.first_anticommuting_pair() {
        return Err(Error::NonCommuting {
            first: a,
            second: b,
        });
    }
    let n = h.n();
    let terms: Vec<_> = h.terms().iter().filter(|t| t.coefficient != 0.0).collect();
    let mut independent: Vec<usize> = Vec::new();
    let mut span = BitMatrix::new(2 * n);
    // (term, sign, independent positions it is built from)
    let mut dependent: Vec<(usize, f64, Vec<usize>)> = Vec::new();
    for (i, t) in terms.iter().enumerate() {
        match span.solve_combination(&t.op.symplectic()) {
            None => {
                span.push_row(t.op.symplectic());
                independent.push(i);
            }
            Some(combo) => {
                let parts: Vec<usize> = combo.iter_ones().collect();
                let mut prod = PauliOperator::identity(n);
                for &k in &parts {
                    prod = &prod * &terms[independent[k]].op;
                }
                let ratio = t.op.multiply(&prod)?;
                let sign = ratio.phase().sign().ok_or_else(|| {
                    Error::Invariant("commuting Hermitian terms gave an imaginary relation".into())
                })?;
                dependent.push((i, sign, parts));
            }
        }
    }
    let r = independent.len();
    if r > MAX_INDEPENDENT_TERMS {
        return Err(Error::InvalidArgument(format!(
            "{r} independent terms exceed the enumeration limit {MAX_INDEPENDENT_TERMS}"
        )));
    }
    let multiplicity = 1u128 << (n - r);
    let mut energies: Vec<f64> = (0..1u64 << r)
        .map(|pattern| {
            let s = |k: usize| if pattern >> k & 1 == 1 { -1.0 } else { 1.0 };
            let mut e: f64 = independent
                .iter()
                .enumerate()
                .map(|(k, &i)| terms[i].coefficient * s(k))
                .sum();
            for (i, sign, parts) in &dependent {
                e += terms[*i].coefficient * sign * parts.iter().map(|&k| s(k)).product::<f64>();
            }
            e
        })
        .collect();
    energies.sort_by(f64::total_cmp);
    let mut levels: Vec<Level> = Vec::new();
    for e in energies {
        match levels.last_mut() {
            Some(l) if (e - l.energy).abs() <= merge_tol => l.multiplicity += multiplicity,
            _ => levels.push(Level {
                energy: e,
                multiplicity,
            }),
        }
    }
    Ok(levels)
}

/// Every eigenvalue with multiplicity, sorted.
pub fn expand_levels(levels: &[Level]) -> Result<Vec<f64>> {
    let total: u128 = levels.iter().map(|l| l.multiplicity).sum();
    if total > 1 << 24 {
        return Err(Error::InvalidArgument(format!(
            "{total} eigenvalues are too many to list"
        )));
    }
    Ok(levels
        .iter()
        .flat_map(|l| std::iter::repeat_n(l.energy, l.multiplicity as usize))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{
        build_color_code, build_effective, build_toric, Couplings, EffectiveRule,
    };
    use crate::lattice::{build_ruby, build_square, contract_triangles};

    #[test]
    fn toric_ground_state() {
        let h = build_toric(&build_square(2).unwrap());
        let levels = commuting_spectrum(&h, 1e-12).unwrap();
        assert_eq!(levels[0].energy, -4.0);
        assert_eq!(levels[0].multiplicity, 4);
        let total: u128 = levels.iter().map(|l| l.multiplicity).sum();
        assert_eq!(total, 16);
    }

    #[test]
    fn color_code_ground_multiplicity() {
        let colex = contract_triangles(&build_ruby(1, 1).unwrap()).unwrap();
        let levels = commuting_spectrum(&build_color_code(&colex).unwrap(), 1e-12).unwrap();
        assert_eq!(levels[0].multiplicity, 16);
        assert_eq!(levels[0].energy, -6.0);
    }

    #[test]
    fn effective_model_has_sign_relation() {
        // X^6 Y^6 Z^6 = -1 on each face; the sign must enter the levels.
        let colex = contract_triangles(&build_ruby(1, 1).unwrap()).unwrap();
        let c = Couplings::new(0.05, 0.05, 0.25).unwrap();
        let h = build_effective(&colex, &c, EffectiveRule::Symmetric).unwrap();
        let levels = commuting_spectrum(&h, 1e-15).unwrap();
        let all = expand_levels(&levels).unwrap();
        assert_eq!(all.len(), 64);
        let dense = crate::spectral::operator::dense_matrix(&h).unwrap();
        let mut ev: Vec<f64> = nalgebra::SymmetricEigen::new(dense)
            .eigenvalues
            .iter()
            .cloned()
            .collect();
        ev.sort_by(f64::total_cmp);
        for (a, b) in all.iter().zip(&ev) {
            assert!((a - b).abs() < 1e-15, "{a} vs {b}");
        }
    }

    #[test]
    fn anticommuting_rejected() {
        let mut h = HamiltonianTerms::new(1);
        h.push(1.0, PauliOperator::parse(1, "X0").unwrap()).unwrap();
        h.push(1.0, PauliOperator::parse(1, "Z0").unwrap()).unwrap();
        assert!(commuting_spectrum(&h, 0.0).is_err());
    }
}
