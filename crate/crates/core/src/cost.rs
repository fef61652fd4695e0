use num_integer::binomial;
use num_rational::Ratio;

use crate::error::{Error, Result};

/// Exact arithmetic keeps the closed-form counts free of rounding.
pub type Rational = Ratio<i64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    IsoEven,
    IsoOdd,
    UniEven,
    UniOdd,
}

/// Analytic CNOT count, split by pipeline phase.
#[derive(Clone, Debug, PartialEq)]
pub struct CostEstimate {
    pub phase1: Rational,
    pub phase2: Rational,
    pub phase34: Rational,
    pub total: Rational,
    pub regime: Regime,
    pub k: usize,
}

pub fn rational_to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl CostEstimate {
    pub fn total_f64(&self) -> f64 {
        rational_to_f64(self.total)
    }
}

fn int(v: i64) -> Rational {
    Rational::from_integer(v)
}

fn pow2(e: usize) -> Rational {
    int(1i64 << e)
}

fn check_args(n: usize, m: usize) -> Result<usize> {
    if n < 2 {
        return Err(Error::InvalidInput("need at least 2 qubits".into()));
    }
    if n > 40 {
        return Err(Error::ResourceLimit("count overflows past 40 qubits".into()));
    }
    let k = n / 2;
    if m > k {
        return Err(Error::InvalidInput(format!("m = {m} exceeds k = {k}")));
    }
    Ok(k)
}

// 23/48 * 4^k - 3/2 * 2^k + 4/3: one square-unitary stage
fn unitary_term(k: usize) -> Rational {
    Rational::new(23, 48) * pow2(2 * k) - Rational::new(3, 2) * pow2(k) + Rational::new(4, 3)
}

// 2^(m+k) - 2^k/24: one isometry stage
fn isometry_term(m: usize, k: usize) -> Rational {
    pow2(m + k) - pow2(k) / int(24)
}

/// CNOTs predicted for the four-phase pipeline at rank 2^m on n qubits.
pub fn lrsp_estimate(n: usize, m: usize) -> Result<CostEstimate> {
    let k = check_args(n, m)?;
    let even = n % 2 == 0;
    let phase1 = pow2(m) - int(m as i64) - int(1);
    let phase2 = int(m as i64);
    let (phase34, regime) = if m < k {
        if even {
            (int(2) * isometry_term(m, k), Regime::IsoEven)
        } else {
            (isometry_term(m, k) + isometry_term(m, k + 1), Regime::IsoOdd)
        }
    } else if even {
        (int(2) * unitary_term(k), Regime::UniEven)
    } else {
        (unitary_term(k) + unitary_term(k + 1), Regime::UniOdd)
    };
    let total = phase1 + phase2 + phase34;
    Ok(CostEstimate { phase1, phase2, phase34, total, regime, k })
}

/// Closed-form upper bound on the same count.
pub fn table1_bound(n: usize, m: usize) -> Result<Rational> {
    let k = check_args(n, m)?;
    let even = n % 2 == 0;
    Ok(if m < k {
        let per_side = pow2(m) - Rational::new(1, 24);
        if even {
            int(2) * pow2(k) * per_side
        } else {
            int(3) * pow2(k) * per_side
        }
    } else if even {
        Rational::new(23, 24) * pow2(n)
    } else {
        Rational::new(115, 96) * pow2(n)
    })
}

/// Number of bipartitions of n qubits, counting complementary half
/// splits separately.
pub fn bipartition_count(n: usize) -> Result<u64> {
    if n < 2 {
        return Err(Error::InvalidInput("need at least 2 qubits".into()));
    }
    Ok((1..=n / 2).map(|k| binomial(n as u64, k as u64)).sum())
}

/// CNOTs of a generic q-qubit state preparation: 2^q - q - 1.
pub fn baseline_sp_count(q: usize) -> u64 {
    assert!(q >= 1 && q < 64);
    (1u64 << q) - q as u64 - 1
}
