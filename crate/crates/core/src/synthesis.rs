use num_complex::Complex;

use crate::circuit::{elide_tol, Circuit};
use crate::cost::{lrsp_estimate, rational_to_f64};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::measures::m_of;
use crate::real::Real;
use crate::schmidt::{default_tol, schmidt_svd};
use crate::state::StateVector;
use crate::Bipartition;

#[derive(Clone, Debug)]
pub struct LrspConfig<T> {
    /// Rank cap; None keeps the full rank.
    pub r: Option<usize>,
    pub tol: T,
    /// Recurse into both halves when the cut has rank 1.
    pub recurse_product: bool,
}

impl<T: Real> Default for LrspConfig<T> {
    fn default() -> Self {
        Self { r: None, tol: default_tol(), recurse_product: true }
    }
}

impl<T: Real> LrspConfig<T> {
    pub fn with_rank(r: usize) -> Self {
        Self { r: Some(r), ..Self::default() }
    }
}

#[derive(Clone, Debug)]
pub struct SynthesisReport<T> {
    pub n: usize,
    pub rank: usize,
    pub m: usize,
    pub predicted_loss: T,
    pub cnots: usize,
    pub depth: usize,
    pub model_estimate: f64,
    /// CNOTs per pipeline phase; a rank-1 recursion reports its halves
    /// under phases 3 and 4.
    pub phase_breakdown: [usize; 4],
}

fn log2_exact(len: usize, what: &str) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::InvalidInput(format!("{what} length {len} is not a power of two >= 2")));
    }
    Ok(len.trailing_zeros() as usize)
}

fn gray(x: usize) -> usize {
    x ^ (x >> 1)
}

/// Multiplexed rotation on `target` selected by qubits 0..target, realized
/// in Gray-code order with 2^target CNOTs (none when target = 0).
fn multiplexed<T: Real>(
    c: &mut Circuit<T>,
    target: usize,
    angles: &[T],
    push_rot: fn(&mut Circuit<T>, usize, T),
) {
    let j = target;
    assert_eq!(angles.len(), 1 << j);
    let tol = elide_tol::<T>();
    if angles.iter().all(|a| a.abs() < tol) {
        return;
    }
    if j == 0 {
        push_rot(c, target, angles[0]);
        return;
    }
    let len = 1usize << j;
    for idx in 0..len {
        let g = gray(idx);
        let mut acc = T::zero();
        for (b, &a) in angles.iter().enumerate() {
            if (b & g).count_ones() % 2 == 0 {
                acc += a;
            } else {
                acc -= a;
            }
        }
        push_rot(c, target, acc / T::of(len as f64));
        let flip = gray(idx) ^ gray((idx + 1) % len);
        let d = flip.trailing_zeros() as usize;
        c.push_cx(j - 1 - d, target);
    }
}

/// diag(e^{i phases[x]}) on qubits 0..k-1, where len = 2^k; built from
/// multiplexed-Rz stages plus an exact globalPhase credit.
pub fn diagonal_into<T: Real>(c: &mut Circuit<T>, phases: &[T]) {
    let mut k = phases.len().trailing_zeros() as usize;
    assert_eq!(phases.len(), 1 << k);
    assert!(k <= c.n);
    let mut cur = phases.to_vec();
    while k > 0 {
        let half = 1usize << (k - 1);
        let mut diffs = Vec::with_capacity(half);
        let mut means = Vec::with_capacity(half);
        for y in 0..half {
            diffs.push(cur[2 * y + 1] - cur[2 * y]);
            means.push((cur[2 * y + 1] + cur[2 * y]) / T::of(2.0));
        }
        multiplexed(c, k - 1, &diffs, Circuit::push_rz);
        cur = means;
        k -= 1;
    }
    c.add_global_phase(cur[0]);
}

fn vec_norm_sqr<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().map(|a| a.norm_sqr()).sum()
}

fn check_unit<T: Real>(v: &[Complex<T>], what: &str) -> Result<()> {
    let norm = vec_norm_sqr(v);
    if (norm - T::one()).abs() > T::of(1e-8).max(T::epsilon() * T::of(100.0)) {
        return Err(Error::InvalidInput(format!(
            "{what} not normalized: squared norm {norm}"
        )));
    }
    Ok(())
}

/// Amplitude-encodes `v`: a cascade of multiplexed Ry stages fixes the
/// magnitudes, then a diagonal fixes the phases (skipped when `v` is
/// real-nonnegative).
pub fn prep_state<T: Real>(v: &[Complex<T>]) -> Result<Circuit<T>> {
    let q = log2_exact(v.len(), "state")?;
    check_unit(v, "state")?;
    let mut c = Circuit::new(q);

    // squared subtree norms, level by level from the leaves
    let mut levels: Vec<Vec<T>> = vec![v.iter().map(|a| a.norm_sqr()).collect()];
    for _ in 0..q {
        let prev = levels.last().unwrap();
        levels.push(prev.chunks(2).map(|p| p[0] + p[1]).collect());
    }
    levels.reverse(); // levels[j] has 2^j entries

    for j in 0..q {
        let child = &levels[j + 1];
        let angles: Vec<T> = (0..1 << j)
            .map(|b| {
                let n1 = child[2 * b + 1].max(T::zero()).sqrt();
                let n0 = child[2 * b].max(T::zero()).sqrt();
                T::of(2.0) * n1.atan2(n0)
            })
            .collect();
        multiplexed(&mut c, j, &angles, Circuit::push_ry);
    }

    let amp_tol = T::of(1e-12).max(T::epsilon() * T::of(8.0));
    let real_nonneg =
        v.iter().all(|a| a.im.abs() < amp_tol && a.re > -amp_tol);
    if !real_nonneg {
        let phases: Vec<T> =
            v.iter().map(|a| if a.norm_sqr() > amp_tol * amp_tol { a.arg() } else { T::zero() }).collect();
        diagonal_into(&mut c, &phases);
    }
    c.simplify();
    Ok(c)
}

/// I - (1+w)|u><u| as prep(u)^-1, phase w at |0...0>, prep(u).
pub fn reflection<T: Real>(u: &[Complex<T>], w: Complex<T>) -> Result<Circuit<T>> {
    check_unit(u, "reflection axis")?;
    if (w.norm() - T::one()).abs() > T::of(1e-8).max(T::epsilon() * T::of(100.0)) {
        return Err(Error::InvalidInput("reflection phase must have unit modulus".into()));
    }
    let p = prep_state(u)?;
    let mut c = p.inverse();
    let mut phases = vec![T::zero(); u.len()];
    phases[0] = (-w).arg();
    diagonal_into(&mut c, &phases);
    c.append(&p);
    c.simplify();
    Ok(c)
}

/// W on k qubits with W|targets[j]> = cols[j], up to 1e-12-scale column
/// residues. Columns must be orthonormal, targets distinct.
fn householder_isometry<T: Real>(
    k: usize,
    targets: &[usize],
    cols: &[Vec<Complex<T>>],
) -> Result<Circuit<T>> {
    let dim = 1usize << k;
    let skip_tol = T::of(1e-12).max(T::epsilon() * T::of(32.0));
    let mut work: Vec<Vec<Complex<T>>> = cols.to_vec();
    let mut mus: Vec<Complex<T>> = Vec::with_capacity(cols.len());
    let mut axes: Vec<Vec<Complex<T>>> = Vec::new();

    for j in 0..work.len() {
        let t = targets[j];
        let xt = work[j][t];
        let a = xt.norm();
        if T::one() - a <= skip_tol {
            mus.push(xt / a);
            continue;
        }
        let mu = if a > skip_tol { -(xt / a) } else { Complex::new(-T::one(), T::zero()) };
        let mut u = work[j].clone();
        u[t] = u[t] - mu;
        let un = (T::of(2.0) * (T::one() + a)).sqrt();
        for e in &mut u {
            *e = *e / un;
        }
        for l in j + 1..work.len() {
            let mut c_val = Complex::new(T::zero(), T::zero());
            for (ue, ye) in u.iter().zip(&work[l]) {
                c_val = c_val + ue.conj() * *ye;
            }
            let two = Complex::new(T::of(2.0), T::zero());
            for (ye, ue) in work[l].iter_mut().zip(&u) {
                *ye = *ye - two * c_val * *ue;
            }
        }
        mus.push(mu);
        axes.push(u);
    }

    let mut circ = Circuit::new(k);
    let mut phases = vec![T::zero(); dim];
    for (j, mu) in mus.iter().enumerate() {
        phases[targets[j]] = mu.arg();
    }
    diagonal_into(&mut circ, &phases);
    for u in axes.iter().rev() {
        circ.append(&reflection(u, Complex::new(T::one(), T::zero()))?);
    }
    circ.simplify();
    Ok(circ)
}

fn check_isometric<T: Real>(v: &Mat<T>) -> Result<()> {
    let tol = T::of(1e-10).max(T::epsilon() * T::of(64.0));
    for a in 0..v.ncols {
        for b in a..v.ncols {
            let mut acc = Complex::new(T::zero(), T::zero());
            for i in 0..v.nrows {
                acc = acc + v.get(i, a).conj() * v.get(i, b);
            }
            let want = if a == b { T::one() } else { T::zero() };
            if (acc.norm() - want).abs() > tol {
                return Err(Error::InvalidInput("columns are not isometric".into()));
            }
        }
    }
    Ok(())
}

/// Circuit sending |j> to column j for every column, shared phase exact.
pub fn synth_isometry<T: Real>(v: &Mat<T>) -> Result<Circuit<T>> {
    let k = if v.nrows == 1 {
        return Err(Error::InvalidInput("need at least one qubit".into()));
    } else {
        log2_exact(v.nrows, "isometry row")?
    };
    if v.ncols < 1 || v.ncols > v.nrows {
        return Err(Error::InvalidInput(format!(
            "column count {} outside 1..={}",
            v.ncols, v.nrows
        )));
    }
    check_isometric(v)?;
    if v.ncols == 1 {
        return prep_state(&v.col(0));
    }
    let targets: Vec<usize> = (0..v.ncols).collect();
    let cols: Vec<Vec<Complex<T>>> = (0..v.ncols).map(|j| v.col(j)).collect();
    householder_isometry(k, &targets, &cols)
}

pub fn synth_unitary<T: Real>(u: &Mat<T>) -> Result<Circuit<T>> {
    if u.nrows != u.ncols {
        return Err(Error::InvalidInput("not square".into()));
    }
    synth_isometry(u)
}

/// Low-rank state preparation over the half split: Schmidt-coefficient
/// prep, a CNOT ladder, then one isometry per side. A rank-1 cut recurses
/// into the two factors instead.
pub fn lrsp<T: Real>(
    psi: &StateVector<T>,
    cfg: &LrspConfig<T>,
) -> Result<(Circuit<T>, SynthesisReport<T>)> {
    if let Some(r) = cfg.r {
        if r < 1 {
            return Err(Error::InvalidInput("rank cap must be at least 1".into()));
        }
    }
    let n = psi.n;
    if n == 1 {
        let c = prep_state(&psi.amplitudes)?;
        let depth = c.depth();
        return Ok((
            c,
            SynthesisReport {
                n,
                rank: 1,
                m: 0,
                predicted_loss: T::zero(),
                cnots: 0,
                depth,
                model_estimate: 0.0,
                phase_breakdown: [0; 4],
            },
        ));
    }

    let half = n / 2;
    let bp = Bipartition::half_split(n)?;
    let f = schmidt_svd(psi, &bp)?;
    let full_rank = f.s.iter().take_while(|&&s| s > cfg.tol).count().max(1);
    let rank = full_rank.min(cfg.r.unwrap_or(usize::MAX));
    let m = m_of(rank)?;

    let (sigma_prime, predicted_loss) = if rank >= full_rank {
        (f.s[..full_rank].to_vec(), T::zero())
    } else {
        let z = f.s[..rank].iter().map(|&s| s * s).sum::<T>().sqrt();
        let loss = f.s[rank..].iter().map(|&s| s * s).sum::<T>();
        (f.s[..rank].iter().map(|&s| s / z).collect(), loss)
    };

    let model_estimate = rational_to_f64(lrsp_estimate(n, m)?.total);
    let mut circ = Circuit::new(n);
    let phase_breakdown: [usize; 4];

    if rank == 1 && cfg.recurse_product {
        let alpha = StateVector::new_unchecked(half, f.u.col(0)).normalized();
        let beta = StateVector::new_unchecked(n - half, f.vh.row(0)).normalized();
        let child_cfg = LrspConfig { r: None, tol: cfg.tol, recurse_product: true };
        let (ca, _) = lrsp(&alpha, &child_cfg)?;
        let (cb, _) = lrsp(&beta, &child_cfg)?;
        circ.append_mapped(&ca, &(0..half).collect::<Vec<_>>());
        circ.append_mapped(&cb, &(half..n).collect::<Vec<_>>());
        phase_breakdown = [0, 0, ca.cnot_count(), cb.cnot_count()];
    } else {
        let dim_m = 1usize << m;
        let mut sigma_pad: Vec<Complex<T>> =
            sigma_prime.iter().map(|&s| Complex::new(s, T::zero())).collect();
        sigma_pad.resize(dim_m, Complex::new(T::zero(), T::zero()));

        let mut p1_cnots = 0;
        if m > 0 {
            let p1 = prep_state(&sigma_pad)?;
            p1_cnots = p1.cnot_count();
            circ.append_mapped(&p1, &(0..m).collect::<Vec<_>>());
        }
        for q in 0..m {
            circ.push_cx(q, q + half);
        }

        let ka = half;
        let kb = n - half;
        let targets_a: Vec<usize> = (0..dim_m).map(|j| j << (ka - m)).collect();
        let cols_a: Vec<Vec<Complex<T>>> = (0..dim_m).map(|j| f.u.col(j)).collect();
        let ca = householder_isometry(ka, &targets_a, &cols_a)?;
        circ.append_mapped(&ca, &(0..ka).collect::<Vec<_>>());

        let targets_b: Vec<usize> = (0..dim_m).map(|j| j << (kb - m)).collect();
        let cols_b: Vec<Vec<Complex<T>>> = (0..dim_m).map(|j| f.vh.row(j)).collect();
        let cb = householder_isometry(kb, &targets_b, &cols_b)?;
        circ.append_mapped(&cb, &(ka..n).collect::<Vec<_>>());

        phase_breakdown = [p1_cnots, m, ca.cnot_count(), cb.cnot_count()];
    }

    let report = SynthesisReport {
        n,
        rank,
        m,
        predicted_loss,
        cnots: circ.cnot_count(),
        depth: circ.depth(),
        model_estimate,
        phase_breakdown,
    };
    Ok((circ, report))
}
