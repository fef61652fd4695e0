use num_complex::Complex;

use crate::error::{Error, Result};
use crate::real::Real;

/// Dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    pub nrows: usize,
    pub ncols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> Mat<T> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, data: vec![Complex::new(T::zero(), T::zero()); nrows * ncols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex::new(T::one(), T::zero()));
        }
        m
    }

    pub fn from_cols(cols: &[Vec<Complex<T>>]) -> Self {
        let ncols = cols.len();
        let nrows = cols.first().map_or(0, |c| c.len());
        let mut m = Self::zeros(nrows, ncols);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), nrows);
            for (i, &v) in col.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data[i * self.ncols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex<T>) {
        self.data[i * self.ncols + j] = v;
    }

    pub fn col(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.nrows).map(|i| self.get(i, j)).collect()
    }

    pub fn row(&self, i: usize) -> Vec<Complex<T>> {
        self.data[i * self.ncols..(i + 1) * self.ncols].to_vec()
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let mut out = Self::zeros(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows);
        let mut out = Self::zeros(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = self.get(i, k);
                if a.norm_sqr() == T::zero() {
                    continue;
                }
                for j in 0..other.ncols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(self.ncols, v.len());
        (0..self.nrows)
            .map(|i| {
                let mut acc = Complex::new(T::zero(), T::zero());
                for j in 0..self.ncols {
                    acc = acc + self.get(i, j) * v[j];
                }
                acc
            })
            .collect()
    }

    pub fn frob_norm(&self) -> T {
        self.data.iter().map(|v| v.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

pub struct Svd<T> {
    /// nrows x min(nrows, ncols); square when nrows <= ncols.
    pub u: Mat<T>,
    /// Descending, length min(nrows, ncols).
    pub s: Vec<T>,
    /// min(nrows, ncols) x ncols; square when nrows >= ncols.
    pub vh: Mat<T>,
}

fn inner<T: Real>(x: &[Complex<T>], y: &[Complex<T>]) -> Complex<T> {
    let mut acc = Complex::new(T::zero(), T::zero());
    for (a, b) in x.iter().zip(y) {
        acc = acc + a.conj() * *b;
    }
    acc
}

fn norm_sqr<T: Real>(x: &[Complex<T>]) -> T {
    x.iter().map(|v| v.norm_sqr()).sum()
}

/// One unit vector orthogonal to every column in `existing`, chosen
/// deterministically from the standard basis.
pub fn orthonormal_complement_vector<T: Real>(
    existing: &[Vec<Complex<T>>],
    dim: usize,
) -> Vec<Complex<T>> {
    for cand in 0..dim {
        let mut v = vec![Complex::new(T::zero(), T::zero()); dim];
        v[cand] = Complex::new(T::one(), T::zero());
        // two Gram-Schmidt passes for stability
        for _ in 0..2 {
            for col in existing {
                let c = inner(col, &v);
                for (vi, ci) in v.iter_mut().zip(col) {
                    *vi = *vi - c * *ci;
                }
            }
        }
        let n = norm_sqr(&v).sqrt();
        if n > T::of(0.5) {
            for vi in &mut v {
                *vi = *vi / n;
            }
            return v;
        }
    }
    panic!("no orthogonal complement direction: dim {dim}, {} existing", existing.len());
}

/// One-sided Jacobi on a tall (nrows >= ncols) matrix given as columns.
/// Returns (u columns, sigma, v columns) with M = U diag(S) V^H.
fn jacobi_tall<T: Real>(
    mut w: Vec<Vec<Complex<T>>>,
    nrows: usize,
) -> (Vec<Vec<Complex<T>>>, Vec<T>, Vec<Vec<Complex<T>>>) {
    let ncols = w.len();
    let mut v: Vec<Vec<Complex<T>>> = (0..ncols)
        .map(|j| {
            let mut col = vec![Complex::new(T::zero(), T::zero()); ncols];
            col[j] = Complex::new(T::one(), T::zero());
            col
        })
        .collect();

    let conv = T::epsilon() * T::of(8.0);
    for _sweep in 0..60 {
        let mut rotated = false;
        for i in 0..ncols {
            for j in i + 1..ncols {
                let alpha = norm_sqr(&w[i]);
                let beta = norm_sqr(&w[j]);
                let gamma = inner(&w[i], &w[j]);
                let g = gamma.norm();
                if g <= conv * (alpha * beta).sqrt() || g == T::zero() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let tau = (beta - alpha) / (g + g);
                let t = tau.signum() / (tau.abs() + (T::one() + tau * tau).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                let (cc, ss) = (Complex::new(c, T::zero()), Complex::new(s, T::zero()));
                for k in 0..nrows {
                    let wi = w[i][k];
                    let wj = w[j][k];
                    w[i][k] = cc * wi - ss * phase.conj() * wj;
                    w[j][k] = ss * phase * wi + cc * wj;
                }
                for k in 0..ncols {
                    let vi = v[i][k];
                    let vj = v[j][k];
                    v[i][k] = cc * vi - ss * phase.conj() * vj;
                    v[j][k] = ss * phase * vi + cc * vj;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut norms: Vec<T> = w.iter().map(|c| norm_sqr(c).sqrt()).collect();
    let mut order: Vec<usize> = (0..ncols).collect();
    order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).unwrap());
    w = order.iter().map(|&j| w[j].clone()).collect();
    v = order.iter().map(|&j| v[j].clone()).collect();
    norms = order.iter().map(|&j| norms[j]).collect();

    let null_tol = norms[0] * T::epsilon() * T::of(64.0);
    let mut u: Vec<Vec<Complex<T>>> = Vec::with_capacity(ncols);
    for (j, col) in w.into_iter().enumerate() {
        if norms[j] > null_tol && norms[j] > T::zero() {
            let n = norms[j];
            u.push(col.into_iter().map(|v| v / n).collect());
        } else {
            norms[j] = T::zero();
            u.push(orthonormal_complement_vector(&u, nrows));
        }
    }
    (u, norms, v)
}

/// Complex SVD: M = U diag(S) Vh, S descending. The short side comes back
/// square, so rows <= cols yields a full square U.
pub fn svd<T: Real>(m: &Mat<T>) -> Result<Svd<T>> {
    if !m.is_finite() {
        return Err(Error::InvalidInput("matrix has non-finite entries".into()));
    }
    if m.nrows == 0 || m.ncols == 0 {
        return Err(Error::InvalidInput("matrix must be nonempty".into()));
    }
    if m.nrows >= m.ncols {
        let cols: Vec<Vec<Complex<T>>> = (0..m.ncols).map(|j| m.col(j)).collect();
        let (u, s, v) = jacobi_tall(cols, m.nrows);
        Ok(Svd { u: Mat::from_cols(&u), s, vh: Mat::from_cols(&v).dagger() })
    } else {
        let mh = m.dagger();
        let cols: Vec<Vec<Complex<T>>> = (0..mh.ncols).map(|j| mh.col(j)).collect();
        let (u2, s, v2) = jacobi_tall(cols, mh.nrows);
        Ok(Svd { u: Mat::from_cols(&v2), s, vh: Mat::from_cols(&u2).dagger() })
    }
}
