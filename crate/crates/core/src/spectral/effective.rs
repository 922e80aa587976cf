//! Strong-coupling comparison of the two-body model with the effective
//! color-code Hamiltonian.

use serde::{Deserialize, Serialize};

use super::exact::{commuting_spectrum, expand_levels};
use super::{lowest_eigs, Cluster, SolverOptions};
use crate::error::{Error, Result};
use crate::hamiltonian::{
    build_effective, build_two_body, effective_coefficients, Couplings, EffectiveCoefficients,
    EffectiveRule,
};
use crate::lattice::{contract_triangles, RubyLattice};

/// Largest triangle count: the low sector has `2^T` states.
pub const MAX_TRIANGLES: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CompareOptions {
    pub solver: SolverOptions,
    pub rule: EffectiveRule,
    /// Largest accepted `max |residual| / (|scale| * effective spread)`.
    pub pattern_tol: f64,
    /// Smallest accepted gap above the low sector, in units of its spread.
    pub gap_ratio: f64,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions {
            solver: SolverOptions::default(),
            rule: EffectiveRule::Symmetric,
            pattern_tol: 0.2,
            gap_ratio: 10.0,
        }
    }
}

/// Least-squares fit `low - mean(low) ~ scale * (eff - mean(eff))` over the
/// sorted lists.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternAlignment {
    pub scale: f64,
    pub low_mean: f64,
    pub effective_mean: f64,
    pub effective_spread: f64,
    pub max_deviation: f64,
    pub rms_deviation: f64,
    /// `max_deviation / (|scale| * effective_spread)`; `None` when the
    /// fit is degenerate or not a positive rescaling.
    pub relative_deviation: Option<f64>,
}

pub fn align_patterns(low: &[f64], eff: &[f64]) -> Result<PatternAlignment> {
    if low.len() != eff.len() || low.is_empty() {
        return Err(Error::SizeMismatch {
            left: low.len(),
            right: eff.len(),
        });
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (ml, me) = (mean(low), mean(eff));
    let lc: Vec<f64> = low.iter().map(|x| x - ml).collect();
    let ec: Vec<f64> = eff.iter().map(|x| x - me).collect();
    let ee: f64 = ec.iter().map(|x| x * x).sum();
    let scale = if ee > 0.0 {
        lc.iter().zip(&ec).map(|(a, b)| a * b).sum::<f64>() / ee
    } else {
        0.0
    };
    let dev: Vec<f64> = lc.iter().zip(&ec).map(|(a, b)| a - scale * b).collect();
    let max_deviation = dev.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let rms_deviation = (dev.iter().map(|d| d * d).sum::<f64>() / dev.len() as f64).sqrt();
    let spread = eff.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - eff.iter().cloned().fold(f64::INFINITY, f64::min);
    let relative_deviation =
        (scale > 0.0 && spread > 0.0).then(|| max_deviation / (scale * spread));
    Ok(PatternAlignment {
        scale,
        low_mean: ml,
        effective_mean: me,
        effective_spread: spread,
        max_deviation,
        rms_deviation,
        relative_deviation,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectiveComparison {
    pub couplings: Couplings,
    pub triangles: usize,
    pub sector_size: usize,
    pub coefficients: EffectiveCoefficients,
    pub low_sector: Vec<f64>,
    pub low_clusters: Vec<Cluster>,
    pub low_spread: f64,
    pub next_eigenvalue: Option<f64>,
    pub gap: Option<f64>,
    /// `gap / low_spread`.
    pub gap_ratio: Option<f64>,
    pub effective_spectrum: Vec<f64>,
    pub effective_clusters: Vec<Cluster>,
    pub alignment: PatternAlignment,
    pub multiplicities_match: bool,
    pub gap_ok: bool,
    pub pattern_ok: bool,
    pub options: CompareOptions,
}

impl EffectiveComparison {
    pub fn passed(&self) -> bool {
        self.gap_ok && self.pattern_ok
    }
}

/// Lowest `2^T` two-body eigenvalues against the full effective spectrum.
pub fn compare_effective(
    lat: &RubyLattice,
    c: &Couplings,
    opts: &CompareOptions,
) -> Result<EffectiveComparison> {
    let t = lat.triangles.len();
    if t > MAX_TRIANGLES {
        return Err(Error::InvalidArgument(format!(
            "{t} triangles; the comparison supports at most {MAX_TRIANGLES}"
        )));
    }
    let sector_size = 1usize << t;
    let colex = contract_triangles(lat)?;
    let coefficients = effective_coefficients(c, opts.rule)?;
    let heff = build_effective(&colex, c, opts.rule)?;
    let levels = commuting_spectrum(&heff, 1e-12 * heff.norm_bound())?;
    let effective_spectrum = expand_levels(&levels)?;
    let effective_clusters = levels
        .iter()
        .map(|l| Cluster {
            value: l.energy,
            multiplicity: l.multiplicity as usize,
        })
        .collect::<Vec<_>>();

    let h = build_two_body(lat, c);
    let report = lowest_eigs(&h, sector_size, &opts.solver)?;
    let low_sector = report.eigenvalues;
    let low_spread = low_sector[low_sector.len() - 1] - low_sector[0];
    let gap = report
        .next_eigenvalue
        .map(|e| e - low_sector[low_sector.len() - 1]);
    let gap_ratio = gap.map(|g| {
        if low_spread > 0.0 {
            g / low_spread
        } else {
            f64::INFINITY
        }
    });
    let alignment = align_patterns(&low_sector, &effective_spectrum)?;
    let multiplicities_match = report
        .clusters
        .iter()
        .map(|c| c.multiplicity)
        .eq(effective_clusters.iter().map(|c| c.multiplicity));
    Ok(EffectiveComparison {
        couplings: *c,
        triangles: t,
        sector_size,
        coefficients,
        low_clusters: report.clusters,
        low_sector,
        low_spread,
        next_eigenvalue: report.next_eigenvalue,
        gap,
        gap_ratio,
        effective_spectrum,
        effective_clusters,
        gap_ok: gap_ratio.is_some_and(|r| r >= opts.gap_ratio),
        pattern_ok: alignment
            .relative_deviation
            .is_some_and(|d| d <= opts.pattern_tol),
        alignment,
        multiplicities_match,
        options: *opts,
    })
}
