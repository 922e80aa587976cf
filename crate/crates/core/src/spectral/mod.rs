//! Exact diagonalisation of Pauli-sum Hamiltonians.

mod effective;
mod exact;
mod krylov;
mod operator;
mod state;

use log::{debug, info};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianTerms;
use crate::pauli::PauliOperator;

pub use effective::{
    align_patterns, compare_effective, CompareOptions, EffectiveComparison, PatternAlignment,
};
pub use exact::{commuting_spectrum, expand_levels, Level, MAX_INDEPENDENT_TERMS};
pub use krylov::KrylovOptions;
pub use operator::{
    dense_matrix, matvec, CompiledHamiltonian, LinearOperator, SectorOperator, SymmetrySectors,
};
pub use state::{expectation, Scalar, StateVector, MAX_QUBITS};

/// Systems up to this many qubits are diagonalised densely.
pub const DENSE_MAX_QUBITS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Largest accepted residual `||H v - lambda v||`.
    pub tol: f64,
    /// Eigenvalues closer than `cluster_tol * sum|c|` are merged.
    pub cluster_tol: f64,
    pub seed: u64,
    pub block: usize,
    pub max_restarts: usize,
    /// Keep computing past the requested count until the last cluster is
    /// complete.
    pub complete_last_cluster: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-9,
            cluster_tol: 1e-8,
            seed: 0,
            block: 8,
            max_restarts: 300,
            complete_last_cluster: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub value: f64,
    pub multiplicity: usize,
}

/// Group sorted eigenvalues whose neighbours differ by at most
/// `tol * max(1, max |e|)`.
pub fn cluster(eigs: &[f64], tol: f64) -> Vec<Cluster> {
    let scale = eigs.iter().fold(1.0f64, |m, e| m.max(e.abs()));
    cluster_abs(eigs, tol * scale)
}

fn cluster_abs(eigs: &[f64], threshold: f64) -> Vec<Cluster> {
    let mut out: Vec<(f64, usize, f64)> = Vec::new();
    for &e in eigs {
        match out.last_mut() {
            Some((sum, count, last)) if e - *last <= threshold => {
                *sum += e;
                *count += 1;
                *last = e;
            }
            _ => out.push((e, 1, e)),
        }
    }
    out.into_iter()
        .map(|(sum, count, _)| Cluster {
            value: sum / count as f64,
            multiplicity: count,
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Diagonal,
    Dense,
    BlockKrylov,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IomExpectation {
    pub name: String,
    /// `Re <v_i|P|v_i>` per eigenvector.
    pub values: Vec<f64>,
    pub max_imaginary: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub n: usize,
    pub requested: usize,
    pub method: Method,
    pub eigenvalues: Vec<f64>,
    pub clusters: Vec<Cluster>,
    /// Spacing between the first two clusters.
    pub gap: Option<f64>,
    /// Lowest computed eigenvalue above the reported ones.
    pub next_eigenvalue: Option<f64>,
    pub residuals: Vec<f64>,
    pub cluster_threshold: f64,
    pub restarts: usize,
    pub matvecs: usize,
    /// Z-parity symmetry sectors solved separately.
    pub sectors: usize,
    pub options: SolverOptions,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub iom_expectations: Option<Vec<IomExpectation>>,
}

pub enum Eigenvectors {
    Basis(Vec<u64>),
    Real(Vec<Vec<f64>>),
    Complex(Vec<Vec<Complex64>>),
}

pub struct Eigenpairs {
    pub report: SpectrumReport,
    pub vectors: Eigenvectors,
}

impl Eigenpairs {
    pub fn len(&self) -> usize {
        self.report.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Eigenvector `i` as a complex state.
    pub fn state(&self, i: usize) -> Result<StateVector<Complex64>> {
        let n = self.report.n;
        match &self.vectors {
            Eigenvectors::Basis(idx) => StateVector::basis(n, idx[i]),
            Eigenvectors::Real(v) => {
                StateVector::from_amplitudes(n, v[i].clone()).map(|s| s.to_complex())
            }
            Eigenvectors::Complex(v) => StateVector::from_amplitudes(n, v[i].clone()),
        }
    }

    /// `<v_i|P|v_i>` for every eigenvector.
    pub fn expectations(&self, op: &PauliOperator) -> Result<Vec<Complex64>> {
        let n = self.report.n;
        (0..self.len())
            .map(|i| match &self.vectors {
                Eigenvectors::Basis(idx) => expectation(op, &StateVector::<f64>::basis(n, idx[i])?),
                Eigenvectors::Real(v) => {
                    expectation(op, &StateVector::from_amplitudes(n, v[i].clone())?)
                }
                Eigenvectors::Complex(v) => {
                    expectation(op, &StateVector::from_amplitudes(n, v[i].clone())?)
                }
            })
            .collect()
    }

    /// Attach expectation values of named operators to the report.
    pub fn attach_expectations<'a>(
        &mut self,
        ops: impl IntoIterator<Item = (String, &'a PauliOperator)>,
    ) -> Result<()> {
        let mut table = Vec::new();
        for (name, op) in ops {
            let e = self.expectations(op)?;
            table.push(IomExpectation {
                name,
                values: e.iter().map(|c| c.re).collect(),
                max_imaginary: e.iter().fold(0.0, |m, c| m.max(c.im.abs())),
            });
        }
        self.report.iom_expectations = Some(table);
        Ok(())
    }
}

/// The `m` lowest eigenvalues of `h`.
pub fn lowest_eigs(h: &HamiltonianTerms, m: usize, opts: &SolverOptions) -> Result<SpectrumReport> {
    Ok(lowest_eigenpairs(h, m, opts)?.report)
}

/// The `m` lowest eigenpairs of `h`.
pub fn lowest_eigenpairs(
    h: &HamiltonianTerms,
    m: usize,
    opts: &SolverOptions,
) -> Result<Eigenpairs> {
    let n = h.n();
    state::check_qubits(n)?;
    let dim = 1usize << n;
    if m > dim {
        return Err(Error::InvalidArgument(format!(
            "{m} eigenvalues requested from dimension {dim}"
        )));
    }
    if !(opts.tol > 0.0 && opts.cluster_tol >= 0.0) {
        return Err(Error::InvalidArgument("tolerances must be positive".into()));
    }
    if h.is_real() {
        solve::<f64>(h, m, opts)
    } else {
        solve::<Complex64>(h, m, opts)
    }
}

trait Wrap: Scalar {
    fn wrap(v: Vec<Vec<Self>>) -> Eigenvectors;
}

impl Wrap for f64 {
    fn wrap(v: Vec<Vec<f64>>) -> Eigenvectors {
        Eigenvectors::Real(v)
    }
}

impl Wrap for Complex64 {
    fn wrap(v: Vec<Vec<Complex64>>) -> Eigenvectors {
        Eigenvectors::Complex(v)
    }
}

fn solve<S: Wrap>(h: &HamiltonianTerms, m: usize, opts: &SolverOptions) -> Result<Eigenpairs> {
    let op = CompiledHamiltonian::<S>::new(h)?;
    let n = h.n();
    let dim = op.dim();
    let threshold = opts.cluster_tol * h.norm_bound().max(1.0);
    let mut restarts = 0;
    let mut matvecs = 0;
    let mut sectors = 1;

    // Every path yields more eigenpairs than requested when it can, so the
    // cluster at the cut and the next level are known.
    let (method, values, vectors, residuals) = if op.is_diagonal() {
        let mut idx: Vec<u64> = (0..dim as u64).collect();
        let d = op.diagonal();
        idx.sort_by(|&a, &b| d[a as usize].total_cmp(&d[b as usize]));
        let values: Vec<f64> = idx.iter().map(|&i| d[i as usize]).collect();
        let residuals = vec![0.0; dim];
        (
            Method::Diagonal,
            values,
            Eigenvectors::Basis(idx),
            residuals,
        )
    } else if n <= DENSE_MAX_QUBITS {
        let mut mat = DMatrix::<S>::zeros(dim, dim);
        let mut e = vec![S::zero(); dim];
        for col in 0..dim {
            e[col] = S::one();
            for (row, val) in op.apply(&e).into_iter().enumerate() {
                mat[(row, col)] = val;
            }
            e[col] = S::zero();
        }
        let eig = SymmetricEigen::new(mat);
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vecs: Vec<Vec<S>> = order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).iter().cloned().collect())
            .collect();
        let residuals = residuals_of(&op, &values_of(&order, &eig.eigenvalues), &vecs);
        (Method::Dense, values, S::wrap(vecs), residuals)
    } else {
        let sym = SymmetrySectors::new(n, op.z_symmetries())?;
        let sdim = sym.sector_dim();
        info!("{} symmetry sectors of dimension {sdim}", sym.count());
        // One eigenpair past the request locates the next level.
        let mut wants = vec![(m + 1).min(sdim); sym.count()];
        let mut solved: Vec<Option<SectorSolution<S>>> = (0..sym.count()).map(|_| None).collect();
        let merged = loop {
            for (s, slot) in solved.iter_mut().enumerate() {
                if slot.as_ref().is_some_and(|x| x.values.len() >= wants[s]) {
                    continue;
                }
                let sector = SectorOperator::new(&op, &sym, s)?;
                let sol = solve_sector(&sector, wants[s], opts)?;
                restarts += sol.restarts;
                matvecs += sol.matvecs;
                *slot = Some(sol);
            }
            let mut merged: Vec<(f64, usize, usize)> = solved
                .iter()
                .enumerate()
                .flat_map(|(s, sol)| {
                    let values = &sol.as_ref().expect("every sector is solved").values;
                    values.iter().enumerate().map(move |(i, &v)| (v, s, i))
                })
                .collect();
            merged.sort_by(|a, b| a.0.total_cmp(&b.0));
            let keep = cluster_cut(
                &merged.iter().map(|e| e.0).collect::<Vec<_>>(),
                m,
                threshold,
                opts,
            );
            if opts.complete_last_cluster && keep > 0 {
                // A truncated sector may hide more of the last cluster.
                let edge = merged[keep - 1].0 + threshold;
                let mut grown = false;
                for (s, sol) in solved.iter().enumerate() {
                    let values = &sol.as_ref().expect("every sector is solved").values;
                    if values.len() < sdim && values.last().is_some_and(|&v| v <= edge) {
                        wants[s] = (wants[s] + opts.block.max(1)).min(sdim);
                        grown = true;
                    }
                }
                if grown {
                    continue;
                }
            }
            merged.truncate(keep + 1);
            break merged;
        };
        let mut values = Vec::with_capacity(merged.len());
        let mut vectors = Vec::with_capacity(merged.len());
        let mut residuals = Vec::with_capacity(merged.len());
        for &(v, s, i) in &merged {
            let sector = SectorOperator::new(&op, &sym, s)?;
            let local = &solved[s].as_ref().expect("every sector is solved").vectors[i];
            residuals.push(residuals_of(&sector, &[v], std::slice::from_ref(local))[0]);
            values.push(v);
            vectors.push(sector.embed(local));
        }
        sectors = sym.count();
        (Method::BlockKrylov, values, S::wrap(vectors), residuals)
    };

    let keep = cluster_cut(&values, m, threshold, opts);
    let next_eigenvalue = values.get(keep).copied();
    let values: Vec<f64> = values[..keep].to_vec();
    let residuals: Vec<f64> = residuals[..keep].to_vec();
    let vectors = match vectors {
        Eigenvectors::Basis(mut v) => {
            v.truncate(keep);
            Eigenvectors::Basis(v)
        }
        Eigenvectors::Real(mut v) => {
            v.truncate(keep);
            Eigenvectors::Real(v)
        }
        Eigenvectors::Complex(mut v) => {
            v.truncate(keep);
            Eigenvectors::Complex(v)
        }
    };
    let worst = residuals.iter().cloned().fold(0.0, f64::max);
    if worst > 10.0 * opts.tol.max(1e-13 * h.norm_bound()) {
        return Err(Error::NotConverged {
            iterations: restarts,
            converged: residuals.iter().filter(|&&r| r <= opts.tol).count(),
            requested: keep,
            max_residual: worst,
        });
    }
    let clusters = cluster_abs(&values, threshold);
    let gap = (clusters.len() > 1).then(|| clusters[1].value - clusters[0].value);
    Ok(Eigenpairs {
        report: SpectrumReport {
            n,
            requested: m,
            method,
            eigenvalues: values,
            clusters,
            gap,
            next_eigenvalue,
            residuals,
            cluster_threshold: threshold,
            restarts,
            matvecs,
            sectors,
            options: *opts,
            iom_expectations: None,
        },
        vectors,
    })
}

/// Requested count, extended over the cluster at the cut when asked.
fn cluster_cut(values: &[f64], m: usize, threshold: f64, opts: &SolverOptions) -> usize {
    let mut keep = m.min(values.len());
    if opts.complete_last_cluster && keep > 0 {
        while keep < values.len() && values[keep] - values[keep - 1] <= threshold {
            keep += 1;
        }
    }
    keep
}

struct SectorSolution<S: Scalar> {
    values: Vec<f64>,
    vectors: Vec<Vec<S>>,
    restarts: usize,
    matvecs: usize,
}

/// The `want` lowest eigenpairs of one sector, or all of them when the
/// sector is small enough to diagonalise densely.
fn solve_sector<S: Scalar>(
    sector: &SectorOperator<'_, S>,
    want: usize,
    opts: &SolverOptions,
) -> Result<SectorSolution<S>> {
    let dim = sector.dim();
    let b = opts.block.max(1);
    if dim <= 1 << DENSE_MAX_QUBITS || want + 3 * b > dim {
        let mut mat = DMatrix::<S>::zeros(dim, dim);
        let mut e = vec![S::zero(); dim];
        for col in 0..dim {
            e[col] = S::one();
            sector.apply_into(&e, mat.column_mut(col).as_mut_slice());
            e[col] = S::zero();
        }
        let eig = SymmetricEigen::new(mat);
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        return Ok(SectorSolution {
            values: values_of(&order, &eig.eigenvalues),
            vectors: order
                .iter()
                .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
                .collect(),
            restarts: 0,
            matvecs: dim,
        });
    }
    let kopts = KrylovOptions {
        nev: want,
        tol: opts.tol,
        block: b,
        max_basis: (2 * want + 2 * b).max(want + 20 * b),
        max_restarts: opts.max_restarts,
        seed: opts.seed,
    };
    debug!("block Krylov: {want} eigenpairs of {dim}");
    let res = krylov::lowest(sector, &kopts)?;
    Ok(SectorSolution {
        values: res.values,
        vectors: res.vectors,
        restarts: res.restarts,
        matvecs: res.matvecs,
    })
}

fn values_of(order: &[usize], ev: &nalgebra::DVector<f64>) -> Vec<f64> {
    order.iter().map(|&i| ev[i]).collect()
}

fn residuals_of<S: Scalar>(
    op: &impl LinearOperator<S>,
    values: &[f64],
    vectors: &[Vec<S>],
) -> Vec<f64> {
    use rayon::prelude::*;
    values
        .iter()
        .zip(vectors)
        .map(|(&lam, v)| {
            let mut hv = vec![S::zero(); v.len()];
            op.apply_into(v, &mut hv);
            let l = S::from_real(lam);
            hv.par_iter()
                .zip(v.par_iter())
                .map(|(a, b)| (*a - l * *b).modulus_squared())
                .sum::<f64>()
                .sqrt()
        })
        .collect()
}

/// Eigenvalues one per line at full precision.
pub fn write_eigenvalues<W: std::io::Write>(values: &[f64], mut w: W) -> Result<()> {
    for v in values {
        writeln!(w, "{v:?}")?;
    }
    Ok(())
}
