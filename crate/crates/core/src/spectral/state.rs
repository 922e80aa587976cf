//! Scalars and state vectors.

use std::fmt;

use nalgebra::ComplexField;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pauli::PauliOperator;

/// Largest qubit count the state-vector code accepts.
pub const MAX_QUBITS: usize = 24;

/// Field of amplitudes: `f64` for real Hamiltonians, `Complex64` otherwise.
pub trait Scalar:
    ComplexField<RealField = f64> + Copy + Default + Send + Sync + fmt::Debug + 'static
{
    /// `None` if `c` cannot be represented (a real scalar with imaginary part).
    fn from_complex(c: Complex64) -> Option<Self>;
    fn to_complex(self) -> Complex64;
    fn random(rng: &mut ChaCha8Rng) -> Self;

    /// `c = alpha * a * b + beta * c` on raw strided storage.
    ///
    /// # Safety
    /// The pointers and strides must describe valid `m x k`, `k x n` and
    /// `m x n` matrices, and `c` must not alias `a` or `b`.
    #[allow(clippy::too_many_arguments)]
    unsafe fn gemm_raw(
        m: usize,
        k: usize,
        n: usize,
        alpha: Self,
        a: *const Self,
        rsa: isize,
        csa: isize,
        b: *const Self,
        rsb: isize,
        csb: isize,
        beta: Self,
        c: *mut Self,
        rsc: isize,
        csc: isize,
    );
}

impl Scalar for f64 {
    fn from_complex(c: Complex64) -> Option<Self> {
        (c.im == 0.0).then_some(c.re)
    }

    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }

    fn random(rng: &mut ChaCha8Rng) -> Self {
        rng.random::<f64>() - 0.5
    }

    unsafe fn gemm_raw(
        m: usize,
        k: usize,
        n: usize,
        alpha: Self,
        a: *const Self,
        rsa: isize,
        csa: isize,
        b: *const Self,
        rsb: isize,
        csb: isize,
        beta: Self,
        c: *mut Self,
        rsc: isize,
        csc: isize,
    ) {
        // SAFETY: forwarded from the caller.
        unsafe {
            matrixmultiply::dgemm(m, k, n, alpha, a, rsa, csa, b, rsb, csb, beta, c, rsc, csc)
        }
    }
}

impl Scalar for Complex64 {
    fn from_complex(c: Complex64) -> Option<Self> {
        Some(c)
    }

    fn to_complex(self) -> Complex64 {
        self
    }

    fn random(rng: &mut ChaCha8Rng) -> Self {
        Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    }

    unsafe fn gemm_raw(
        m: usize,
        k: usize,
        n: usize,
        alpha: Self,
        a: *const Self,
        rsa: isize,
        csa: isize,
        b: *const Self,
        rsb: isize,
        csb: isize,
        beta: Self,
        c: *mut Self,
        rsc: isize,
        csc: isize,
    ) {
        use matrixmultiply::CGemmOption::Standard;
        // SAFETY: `Complex64` is `repr(C)` with the layout of `[f64; 2]`;
        // the rest is forwarded from the caller.
        unsafe {
            matrixmultiply::zgemm(
                Standard,
                Standard,
                m,
                k,
                n,
                [alpha.re, alpha.im],
                a.cast(),
                rsa,
                csa,
                b.cast(),
                rsb,
                csb,
                [beta.re, beta.im],
                c.cast(),
                rsc,
                csc,
            )
        }
    }
}

pub(crate) fn check_qubits(n: usize) -> Result<()> {
    if n > MAX_QUBITS {
        Err(Error::TooManyQubits { n, max: MAX_QUBITS })
    } else {
        Ok(())
    }
}

pub(crate) fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (x, y)| acc + x.conjugate() * *y)
}

pub(crate) fn norm<S: Scalar>(a: &[S]) -> f64 {
    a.iter().map(|x| x.modulus_squared()).sum::<f64>().sqrt()
}

/// Amplitudes over the computational basis of `n` qubits; bit `i` of the
/// basis index is qubit `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<S: Scalar = Complex64> {
    n: usize,
    amps: Vec<S>,
}

impl<S: Scalar> StateVector<S> {
    pub fn zeros(n: usize) -> Result<Self> {
        check_qubits(n)?;
        Ok(StateVector {
            n,
            amps: vec![S::zero(); 1 << n],
        })
    }

    pub fn basis(n: usize, index: u64) -> Result<Self> {
        let mut v = Self::zeros(n)?;
        let dim = v.amps.len() as u64;
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        v.amps[index as usize] = S::one();
        Ok(v)
    }

    pub fn from_amplitudes(n: usize, amps: Vec<S>) -> Result<Self> {
        check_qubits(n)?;
        if amps.len() != 1 << n {
            return Err(Error::SizeMismatch {
                left: 1 << n,
                right: amps.len(),
            });
        }
        if !amps.iter().all(|a| a.to_complex().is_finite()) {
            return Err(Error::InvalidArgument("amplitudes must be finite".into()));
        }
        Ok(StateVector { n, amps })
    }

    /// Normalised random state from a seeded generator.
    pub fn random(n: usize, seed: u64) -> Result<Self> {
        check_qubits(n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amps = (0..1usize << n).map(|_| S::random(&mut rng)).collect();
        let mut v = StateVector { n, amps };
        v.normalize();
        Ok(v)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[S] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [S] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<S> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amps)
    }

    pub fn normalize(&mut self) {
        let nrm = self.norm();
        if nrm > 0.0 {
            let s = S::from_real(1.0 / nrm);
            self.amps.iter_mut().for_each(|a| *a *= s);
        }
    }

    /// `<self|other>`, antilinear in `self`.
    pub fn inner(&self, other: &Self) -> Result<S> {
        self.check_same(other)?;
        Ok(dot(&self.amps, &other.amps))
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: S, other: &Self) -> Result<()> {
        self.check_same(other)?;
        for (a, b) in self.amps.iter_mut().zip(&other.amps) {
            *a += alpha * *b;
        }
        Ok(())
    }

    pub fn distance(&self, other: &Self) -> Result<f64> {
        self.check_same(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (*a - *b).modulus_squared())
            .sum::<f64>()
            .sqrt())
    }

    /// `P|self>`. Fails for a real state and an operator with imaginary
    /// matrix elements.
    pub fn apply_pauli(&self, op: &PauliOperator) -> Result<Self> {
        self.check_op(op)?;
        let (x, z) = op.masks();
        let c = S::from_complex(op.phase().to_complex()).ok_or_else(|| {
            Error::InvalidArgument(format!("{op} is not real; use complex amplitudes"))
        })?;
        let mut out = vec![S::zero(); self.amps.len()];
        for (j, a) in self.amps.iter().enumerate() {
            let sign = if (z & j as u64).count_ones() % 2 == 1 {
                -c
            } else {
                c
            };
            out[j ^ x as usize] = sign * *a;
        }
        Ok(StateVector {
            n: self.n,
            amps: out,
        })
    }

    pub fn to_complex(&self) -> StateVector<Complex64> {
        StateVector {
            n: self.n,
            amps: self.amps.iter().map(|a| a.to_complex()).collect(),
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    fn check_op(&self, op: &PauliOperator) -> Result<()> {
        if op.n() != self.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: op.n(),
            });
        }
        Ok(())
    }
}

/// `<v|P|v>` for any amplitude field.
pub fn expectation<S: Scalar>(op: &PauliOperator, v: &StateVector<S>) -> Result<Complex64> {
    v.check_op(op)?;
    let (x, z) = op.masks();
    let ph = op.phase().to_complex();
    let amps = v.amplitudes();
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, a) in amps.iter().enumerate() {
        let k = j ^ x as usize;
        let sign = if (z & j as u64).count_ones() % 2 == 1 {
            -1.0
        } else {
            1.0
        };
        acc += amps[k].to_complex().conj() * ph * sign * a.to_complex();
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_expectations() {
        let v = StateVector::<Complex64>::basis(3, 0).unwrap();
        let z0 = PauliOperator::parse(3, "Z0").unwrap();
        assert_eq!(expectation(&z0, &v).unwrap(), Complex64::new(1.0, 0.0));
        let x0 = PauliOperator::parse(3, "X0").unwrap();
        assert_eq!(expectation(&x0, &v).unwrap(), Complex64::new(0.0, 0.0));
        assert!(StateVector::<f64>::basis(2, 4).is_err());
    }

    #[test]
    fn identity_expectation_of_random_state() {
        let v = StateVector::<Complex64>::random(5, 7).unwrap();
        let e = expectation(&PauliOperator::identity(5), &v).unwrap();
        assert!((e.re - 1.0).abs() < 1e-12 && e.im.abs() < 1e-12);
    }

    #[test]
    fn apply_matches_expectation() {
        let v = StateVector::<Complex64>::random(4, 3).unwrap();
        let op = PauliOperator::parse_product(4, "Y0 X2 Z3").unwrap();
        let pv = v.apply_pauli(&op).unwrap();
        let e = expectation(&op, &v).unwrap();
        let direct = v.inner(&pv).unwrap();
        assert!((e - direct).norm() < 1e-12);
        assert!(e.im.abs() < 1e-12);
    }

    #[test]
    fn real_state_rejects_imaginary_operator() {
        let v = StateVector::<f64>::random(2, 1).unwrap();
        assert!(v
            .apply_pauli(&PauliOperator::parse(2, "Y0").unwrap())
            .is_err());
        assert!(v
            .apply_pauli(&PauliOperator::parse(2, "Y0 Y1").unwrap())
            .is_ok());
    }

    #[test]
    fn too_many_qubits() {
        assert!(matches!(
            StateVector::<f64>::zeros(25),
            Err(Error::TooManyQubits { .. })
        ));
    }

    #[test]
    fn seeded_random_is_deterministic() {
        let a = StateVector::<f64>::random(6, 42).unwrap();
        let b = StateVector::<f64>::random(6, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.amplitudes(), b.amplitudes());
    }
}
