use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::real::Real;

/// Pure state on `n` qubits, big-endian: qubit 0 is the most significant
/// bit of the amplitude index.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T> {
    pub n: usize,
    pub amplitudes: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// Validates length and normalization.
    pub fn new(n: usize, amplitudes: Vec<Complex<T>>) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidInput("need at least one qubit".into()));
        }
        if amplitudes.len() != 1 << n {
            return Err(Error::InvalidInput(format!(
                "expected {} amplitudes for {} qubits, got {}",
                1usize << n,
                n,
                amplitudes.len()
            )));
        }
        let s = Self { n, amplitudes };
        let norm = s.norm_sqr();
        if !norm.is_finite() || (norm - T::one()).abs() > Self::norm_tol() {
            return Err(Error::InvalidInput(format!(
                "state not normalized: sum of squared magnitudes is {norm}"
            )));
        }
        Ok(s)
    }

    /// Skips the normalization check; for internal construction of states
    /// that are normalized by construction.
    pub fn new_unchecked(n: usize, amplitudes: Vec<Complex<T>>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1 << n);
        Self { n, amplitudes }
    }

    fn norm_tol() -> T {
        T::of(1e-10).max(T::epsilon() * T::of(100.0))
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Computational basis state |x>.
    pub fn basis(n: usize, x: usize) -> Self {
        assert!(x < (1 << n));
        let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << n];
        amps[x] = Complex::new(T::one(), T::zero());
        Self { n, amplitudes: amps }
    }

    /// Rescales to unit norm.
    pub fn normalized(mut self) -> Self {
        let norm = self.norm_sqr().sqrt();
        assert!(norm > T::zero(), "cannot normalize the zero vector");
        for a in &mut self.amplitudes {
            *a = *a / norm;
        }
        self
    }

    /// <self|other>
    pub fn inner(&self, other: &Self) -> Complex<T> {
        assert_eq!(self.n, other.n);
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .fold(Complex::new(T::zero(), T::zero()), |acc, v| acc + v)
    }

    /// Kronecker product; `self` supplies the high (leading) qubits.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amps.push(a * b);
            }
        }
        Self { n: self.n + other.n, amplitudes: amps }
    }

    /// Amplitudes drawn with re, im ~ U[0,1), then normalized.
    pub fn random_uniform<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let amps: Vec<Complex<T>> = (0..1usize << n)
            .map(|_| Complex::new(T::of(rng.gen::<f64>()), T::of(rng.gen::<f64>())))
            .collect();
        Self { n, amplitudes: amps }.normalized()
    }
}
