use num_complex::Complex;

use crate::bipartition::Bipartition;
use crate::error::{Error, Result};
use crate::linalg::{svd, Mat, Svd};
use crate::real::Real;
use crate::state::StateVector;

/// Default singular-value cutoff used for rank counting.
pub fn default_tol<T: Real>() -> T {
    T::of(1e-10).max(T::epsilon() * T::of(300.0))
}

/// psi = sum_i sigma[i] leftCols[:,i] (x) rightCols[:,i].
/// `sigma` keeps the full spectrum; the column matrices keep `rank` columns.
#[derive(Clone, Debug)]
pub struct SchmidtDecomposition<T> {
    pub bipartition: Bipartition,
    pub sigma: Vec<T>,
    pub left_cols: Mat<T>,
    pub right_cols: Mat<T>,
    pub rank: usize,
    pub tol: T,
}

#[derive(Clone, Debug)]
pub struct TruncationResult<T> {
    pub keep: usize,
    pub normalizer: T,
    pub sigma_prime: Vec<T>,
    pub loss: T,
}

fn split_index(n: usize, subset: &[usize], global: usize) -> usize {
    let mut x = 0usize;
    for (t, &q) in subset.iter().enumerate() {
        let bit = (global >> (n - 1 - q)) & 1;
        x |= bit << (subset.len() - 1 - t);
    }
    x
}

/// Regroups amplitudes into a 2^|A| x 2^|B| matrix: row bits are the
/// subset-A qubit values, column bits the subset-B values.
pub fn reshape_to_matrix<T: Real>(psi: &StateVector<T>, bp: &Bipartition) -> Result<Mat<T>> {
    if !bp.covers_range(psi.n) {
        return Err(Error::InvalidInput("bipartition does not cover the state's qubits".into()));
    }
    let mut m = Mat::zeros(1 << bp.a().len(), 1 << bp.b().len());
    for (g, &amp) in psi.amplitudes.iter().enumerate() {
        let x = split_index(psi.n, bp.a(), g);
        let y = split_index(psi.n, bp.b(), g);
        m.set(x, y, amp);
    }
    Ok(m)
}

/// Inverse of `reshape_to_matrix`.
pub fn flatten_from_matrix<T: Real>(m: &Mat<T>, bp: &Bipartition) -> StateVector<T> {
    let n = bp.n();
    let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << n];
    for (g, slot) in amps.iter_mut().enumerate() {
        let x = split_index(n, bp.a(), g);
        let y = split_index(n, bp.b(), g);
        *slot = m.get(x, y);
    }
    StateVector::new_unchecked(n, amps)
}

/// Full SVD of the reshaped state; building block for `schmidt_decompose`
/// and the synthesis pipeline, which also needs columns past the rank.
pub fn schmidt_svd<T: Real>(psi: &StateVector<T>, bp: &Bipartition) -> Result<Svd<T>> {
    svd(&reshape_to_matrix(psi, bp)?)
}

pub fn schmidt_decompose<T: Real>(
    psi: &StateVector<T>,
    bp: &Bipartition,
    tol: T,
) -> Result<SchmidtDecomposition<T>> {
    let f = schmidt_svd(psi, bp)?;
    let rank = f.s.iter().take_while(|&&s| s > tol).count().max(1);
    let left_cols = Mat::from_cols(&(0..rank).map(|j| f.u.col(j)).collect::<Vec<_>>());
    // columns are the right Schmidt vectors: row i of Vh, unconjugated
    let right_cols =
        Mat::from_cols(&(0..rank).map(|i| f.vh.row(i)).collect::<Vec<_>>());
    Ok(SchmidtDecomposition { bipartition: bp.clone(), sigma: f.s, left_cols, right_cols, rank, tol })
}

pub fn truncate<T: Real>(sd: &SchmidtDecomposition<T>, r: usize) -> Result<TruncationResult<T>> {
    if r < 1 {
        return Err(Error::InvalidInput("must keep at least one coefficient".into()));
    }
    if r >= sd.rank {
        return Ok(TruncationResult {
            keep: sd.rank,
            normalizer: T::one(),
            sigma_prime: sd.sigma.clone(),
            loss: T::zero(),
        });
    }
    let kept: T = sd.sigma[..r].iter().map(|&s| s * s).sum();
    let z = kept.sqrt();
    let loss: T = sd.sigma[r..].iter().map(|&s| s * s).sum();
    let sigma_prime = sd.sigma[..r].iter().map(|&s| s / z).collect();
    Ok(TruncationResult { keep: r, normalizer: z, sigma_prime, loss })
}

/// Reassembles sum_i sigma[i] |alpha_i>|beta_i> and renormalizes.
pub fn reconstruct<T: Real>(sd: &SchmidtDecomposition<T>) -> StateVector<T> {
    assemble(sd, &sd.sigma[..sd.rank])
}

/// Reassembles from the top `r` coefficients, renormalized.
pub fn reconstruct_truncated<T: Real>(
    sd: &SchmidtDecomposition<T>,
    r: usize,
) -> Result<StateVector<T>> {
    let t = truncate(sd, r)?;
    Ok(assemble(sd, &t.sigma_prime[..t.keep.min(sd.rank)]))
}

fn assemble<T: Real>(sd: &SchmidtDecomposition<T>, sigma: &[T]) -> StateVector<T> {
    let (da, db) = (sd.left_cols.nrows, sd.right_cols.nrows);
    let mut m = Mat::zeros(da, db);
    for (i, &s) in sigma.iter().enumerate() {
        for x in 0..da {
            let ls = sd.left_cols.get(x, i) * Complex::new(s, T::zero());
            if ls.norm_sqr() == T::zero() {
                continue;
            }
            for y in 0..db {
                m.set(x, y, m.get(x, y) + ls * sd.right_cols.get(y, i));
            }
        }
    }
    flatten_from_matrix(&m, &sd.bipartition).normalized()
}
