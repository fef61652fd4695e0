use crate::bipartition::Bipartition;
use crate::error::{Error, Result};
use crate::real::Real;
use crate::schmidt::{default_tol, schmidt_svd};
use crate::state::StateVector;

/// Tr(rho^2) of either reduced state: sum sigma_i^4.
pub fn purity_from_sigma<T: Real>(sigma: &[T]) -> Result<T> {
    let total: T = sigma.iter().map(|&s| s * s).sum();
    if (total - T::one()).abs() > T::of(1e-8).max(T::epsilon() * T::of(100.0)) {
        return Err(Error::InvalidInput(format!(
            "spectrum not normalized: sum of squares is {total}"
        )));
    }
    Ok(sigma.iter().map(|&s| s * s * s * s).sum())
}

/// log2(rank), in e-bits.
pub fn schmidt_measure<T: Real>(rank: usize) -> Result<T> {
    if rank < 1 {
        return Err(Error::InvalidInput("rank must be at least 1".into()));
    }
    Ok(T::of(rank as f64).log2())
}

/// ceil(log2(rank)): qubits needed to carry the coefficients.
pub fn m_of(rank: usize) -> Result<usize> {
    if rank < 1 {
        return Err(Error::InvalidInput("rank must be at least 1".into()));
    }
    Ok(rank.next_power_of_two().trailing_zeros() as usize)
}

/// Average complement of single-qubit purities, in [0, 1].
pub fn meyer_wallach<T: Real>(psi: &StateVector<T>) -> Result<T> {
    if psi.n < 2 {
        return Err(Error::InvalidInput("needs at least 2 qubits".into()));
    }
    let universe: Vec<usize> = (0..psi.n).collect();
    let mut acc = T::zero();
    for q in 0..psi.n {
        let bp = Bipartition::split(&universe, &[q])?;
        let f = schmidt_svd(psi, &bp)?;
        acc += purity_from_sigma(&f.s)?;
    }
    Ok(T::of(2.0) * (T::one() - acc / T::of(psi.n as f64)))
}

/// |<a|b>|^2
pub fn fidelity<T: Real>(a: &StateVector<T>, b: &StateVector<T>) -> Result<T> {
    if a.n != b.n {
        return Err(Error::InvalidInput("dimension mismatch".into()));
    }
    Ok(a.inner(b).norm_sqr().min(T::one()))
}

#[derive(Clone, Debug)]
pub struct MeasureReport<T> {
    pub purity: T,
    pub schmidt_rank: usize,
    pub schmidt_measure: T,
    pub m_qubits: usize,
    pub meyer_wallach: T,
}

/// All measures of `psi` across `bp` (Meyer-Wallach is bipartition-free).
pub fn measure<T: Real>(psi: &StateVector<T>, bp: &Bipartition) -> Result<MeasureReport<T>> {
    let f = schmidt_svd(psi, bp)?;
    let tol = default_tol::<T>();
    let rank = f.s.iter().take_while(|&&s| s > tol).count().max(1);
    Ok(MeasureReport {
        purity: purity_from_sigma(&f.s)?,
        schmidt_rank: rank,
        schmidt_measure: schmidt_measure(rank)?,
        m_qubits: m_of(rank)?,
        meyer_wallach: if psi.n >= 2 { meyer_wallach(psi)? } else { T::zero() },
    })
}
