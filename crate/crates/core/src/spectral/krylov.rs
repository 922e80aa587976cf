//! Thick-restart block Krylov eigensolver for the lowest eigenpairs.
//!
//! Block Arnoldi with two passes of block classical Gram-Schmidt against the
//! whole basis; for Hermitian operators the projected matrix is Hermitian
//! and the method is a block Lanczos with full reorthogonalisation. After
//! each sweep the lowest Ritz vectors are kept and the last residual block
//! continues the expansion. A block vector that collapses during
//! orthogonalisation is replaced by a fresh random direction so exactly
//! degenerate eigenvalues with multiplicity above the block size are still
//! found.
//!
//! The basis is one column-major matrix so projections and Ritz
//! recombinations are matrix products.

use log::debug;
use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::operator::LinearOperator;
use super::state::{dot, norm, Scalar};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KrylovOptions {
    pub nev: usize,
    pub tol: f64,
    pub block: usize,
    pub max_basis: usize,
    pub max_restarts: usize,
    pub seed: u64,
}

pub struct KrylovResult<S: Scalar> {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<S>>,
    pub restarts: usize,
    pub matvecs: usize,
}

/// `a[:, ..k]^H * b`.
fn adjoint_mul<S: Scalar>(a: &DMatrix<S>, k: usize, b: &DMatrix<S>) -> DMatrix<S> {
    let dim = a.nrows();
    assert!(b.nrows() == dim && k <= a.ncols());
    let n = b.ncols();
    let mut out = DMatrix::<S>::zeros(k, n);
    if k == 0 || n == 0 {
        return out;
    }
    // a^H b = conj(a^T conj(b))
    let bc = b.map(|x| x.conjugate());
    // SAFETY: `a^T` is `k x dim` with row stride `dim`, `bc` is `dim x n`
    // column-major and `out` is a fresh `k x n` matrix.
    unsafe {
        S::gemm_raw(
            k,
            dim,
            n,
            S::one(),
            a.as_ptr(),
            dim as isize,
            1,
            bc.as_ptr(),
            1,
            dim as isize,
            S::zero(),
            out.as_mut_ptr(),
            1,
            k as isize,
        );
    }
    out.apply(|x| *x = x.conjugate());
    out
}

/// `c -= a[:, ..k] * coef`.
fn sub_mul<S: Scalar>(c: &mut DMatrix<S>, a: &DMatrix<S>, k: usize, coef: &DMatrix<S>) {
    let dim = a.nrows();
    let n = c.ncols();
    assert!(c.nrows() == dim && k <= a.ncols() && coef.shape() == (k, n));
    if k == 0 || n == 0 {
        return;
    }
    // SAFETY: shapes checked above; `c` is a separate allocation.
    unsafe {
        S::gemm_raw(
            dim,
            k,
            n,
            -S::one(),
            a.as_ptr(),
            1,
            dim as isize,
            coef.as_ptr(),
            1,
            k as isize,
            S::one(),
            c.as_mut_ptr(),
            1,
            dim as isize,
        );
    }
}

/// `a[:, ..k] * s`.
fn mul<S: Scalar>(a: &DMatrix<S>, k: usize, s: &DMatrix<S>) -> DMatrix<S> {
    let mut out = DMatrix::<S>::zeros(a.nrows(), s.ncols());
    sub_mul(&mut out, a, k, &(-s));
    out
}

fn random_columns<S: Scalar>(dim: usize, n: usize, rng: &mut ChaCha8Rng) -> DMatrix<S> {
    DMatrix::from_fn(dim, n, |_, _| S::random(rng))
}

/// Orthonormalise the columns of `w` against the first `k` columns of
/// `basis` and among themselves. Returns the coefficients against the basis
/// (`k x b`) and the upper triangular factor within the block (`b x b`).
fn orthonormalize_block<S: Scalar>(
    basis: &DMatrix<S>,
    k: usize,
    w: &mut DMatrix<S>,
    rng: &mut ChaCha8Rng,
    deflate: f64,
) -> (DMatrix<S>, DMatrix<S>) {
    let (dim, b) = w.shape();
    let before: Vec<f64> = (0..b).map(|i| norm(w.column(i).as_slice())).collect();
    let mut proj = adjoint_mul(basis, k, w);
    sub_mul(w, basis, k, &proj);
    let second = adjoint_mul(basis, k, w);
    sub_mul(w, basis, k, &second);
    proj += second;

    let mut r = DMatrix::<S>::zeros(b, b);
    for i in 0..b {
        for _ in 0..2 {
            for j in 0..i {
                let c = dot(w.column(j).as_slice(), w.column(i).as_slice());
                r[(j, i)] += c;
                let qj = w.column(j).clone_owned();
                w.column_mut(i).axpy(-c, &qj, S::one());
            }
        }
        let nrm = norm(w.column(i).as_slice());
        if nrm > deflate * before[i].max(1.0) {
            r[(i, i)] = S::from_real(nrm);
            w.column_mut(i).scale_mut(1.0 / nrm);
            continue;
        }
        // Collapsed direction: the relation keeps a residual below the
        // deflation threshold and a random direction takes its place.
        loop {
            let mut fresh = random_columns::<S>(dim, 1, rng);
            for _ in 0..2 {
                let c = adjoint_mul(basis, k, &fresh);
                sub_mul(&mut fresh, basis, k, &c);
                for j in 0..i {
                    let c = dot(w.column(j).as_slice(), fresh.as_slice());
                    fresh.column_mut(0).axpy(-c, &w.column(j), S::one());
                }
            }
            let fnrm = norm(fresh.as_slice());
            if fnrm > 1e-3 {
                fresh.scale_mut(1.0 / fnrm);
                w.column_mut(i).copy_from(&fresh);
                break;
            }
        }
    }
    (proj, r)
}

/// Lowest `nev` eigenpairs of a Hermitian operator.
pub fn lowest<S: Scalar>(
    op: &impl LinearOperator<S>,
    opts: &KrylovOptions,
) -> Result<KrylovResult<S>> {
    let dim = op.dim();
    let nev = opts.nev;
    if nev == 0 {
        return Ok(KrylovResult {
            values: Vec::new(),
            vectors: Vec::new(),
            restarts: 0,
            matvecs: 0,
        });
    }
    let b = opts.block.clamp(1, dim);
    let max_basis = opts.max_basis.max(nev + 3 * b).min(dim.saturating_sub(b));
    if max_basis < nev + 2 * b {
        return Err(Error::InvalidArgument(format!(
            "dimension {dim} too small for {nev} eigenpairs with block {b}; use the dense solver"
        )));
    }
    let deflate = 1e-10;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut matvecs = 0;

    let mut basis = DMatrix::<S>::zeros(dim, max_basis + b);
    let mut w = random_columns::<S>(dim, b, &mut rng);
    orthonormalize_block(&basis, 0, &mut w, &mut rng, deflate);
    basis.columns_mut(0, b).copy_from(&w);
    // Projected matrix; row block `p..p+b` couples to the pending block.
    let mut t = DMatrix::<S>::zeros(max_basis + b, max_basis + b);
    let mut p = 0;

    for restart in 0..=opts.max_restarts {
        while p + b <= max_basis {
            for i in 0..b {
                op.apply_into(
                    basis.column(p + i).as_slice(),
                    w.column_mut(i).as_mut_slice(),
                );
            }
            matvecs += b;
            let (proj, r) = orthonormalize_block(&basis, p + b, &mut w, &mut rng, deflate);
            t.view_mut((0, p), (p + b, b)).copy_from(&proj);
            t.view_mut((p + b, p), (b, b)).copy_from(&r);
            basis.columns_mut(p + b, b).copy_from(&w);
            p += b;
        }

        let tpp = t.view((0, 0), (p, p)).into_owned();
        let tpp = (&tpp + tpp.adjoint()) * S::from_real(0.5);
        let eig = SymmetricEigen::new(tpp);
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let f = t.view((p, 0), (b, p)).into_owned();
        let residuals: Vec<f64> = order[..nev]
            .iter()
            .map(|&i| (&f * eig.eigenvectors.column(i)).norm())
            .collect();
        let max_res = residuals.iter().cloned().fold(0.0, f64::max);
        debug!(
            "restart {restart}: basis {p}, lowest {:.12}, max residual {max_res:.3e}",
            eig.eigenvalues[order[0]]
        );
        if max_res <= opts.tol {
            let s = DMatrix::from_fn(p, nev, |r, c| eig.eigenvectors[(r, order[c])]);
            let ritz = mul(&basis, p, &s);
            return Ok(KrylovResult {
                values: order[..nev].iter().map(|&i| eig.eigenvalues[i]).collect(),
                vectors: ritz
                    .column_iter()
                    .map(|c| c.iter().copied().collect())
                    .collect(),
                restarts: restart,
                matvecs,
            });
        }
        if restart == opts.max_restarts {
            return Err(Error::NotConverged {
                iterations: restart,
                converged: residuals.iter().filter(|&&r| r <= opts.tol).count(),
                requested: nev,
                max_residual: max_res,
            });
        }

        // Thick restart: keep the lowest Ritz vectors plus the pending block.
        let keep = (nev + b).max((max_basis - b) / 2).min(p - b);
        let s = DMatrix::from_fn(p, keep, |r, c| eig.eigenvectors[(r, order[c])]);
        let ritz = mul(&basis, p, &s);
        let pending = basis.columns(p, b).clone_owned();
        basis.columns_mut(keep, b).copy_from(&pending);
        basis.columns_mut(0, keep).copy_from(&ritz);
        drop(ritz);
        let fs = &f * &s;
        t.fill(S::zero());
        for (c, &i) in order[..keep].iter().enumerate() {
            t[(c, c)] = S::from_real(eig.eigenvalues[i]);
        }
        t.view_mut((keep, 0), (b, keep)).copy_from(&fs);
        p = keep;
    }
    unreachable!("the last restart returns")
}
