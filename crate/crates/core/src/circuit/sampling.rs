use std::collections::{BTreeMap, HashMap};

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::circuit::{apply_gate, Circuit, Gate};
use crate::real::Real;
use crate::state::StateVector;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShotCounts {
    pub shots: u64,
    pub histogram: BTreeMap<usize, u64>,
}

impl ShotCounts {
    pub fn count(&self, x: usize) -> u64 {
        self.histogram.get(&x).copied().unwrap_or(0)
    }
}

/// Shot i draws from ChaCha8(seed) on stream 2i+1; noise trajectories use
/// stream 2i, so p = 0 reproduces the noiseless histogram exactly.
fn measure_rng(seed: u64, shot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2 * shot + 1);
    rng
}

fn noise_rng(seed: u64, shot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2 * shot);
    rng
}

fn draw_outcome(probs: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let r: f64 = rng.gen();
    let mut acc = 0.0;
    for (x, &p) in probs.iter().enumerate() {
        acc += p;
        if r < acc {
            return x;
        }
    }
    probs.len() - 1
}

fn probabilities<T: Real>(psi: &StateVector<T>) -> Vec<f64> {
    psi.amplitudes.iter().map(|a| a.norm_sqr().to_f64().unwrap_or(0.0)).collect()
}

/// i.i.d. computational-basis draws from |a_x|^2.
pub fn sample<T: Real>(psi: &StateVector<T>, shots: u64, seed: u64) -> ShotCounts {
    assert!(shots >= 1);
    let probs = probabilities(psi);
    let mut histogram = BTreeMap::new();
    for i in 0..shots {
        let x = draw_outcome(&probs, &mut measure_rng(seed, i));
        *histogram.entry(x).or_insert(0) += 1;
    }
    ShotCounts { shots, histogram }
}

// Pauli pair index 1..15: high two bits act on the control, low two on the
// target; 0=I, 1=X, 2=Y, 3=Z.
fn apply_pauli<T: Real>(amps: &mut [Complex<T>], n: usize, q: usize, p: u8) {
    let mask = 1usize << (n - 1 - q);
    match p {
        0 => {}
        1 => {
            for x in 0..amps.len() {
                if x & mask == 0 {
                    amps.swap(x, x | mask);
                }
            }
        }
        2 => {
            let i = Complex::new(T::zero(), T::one());
            for x in 0..amps.len() {
                if x & mask == 0 {
                    let (a0, a1) = (amps[x], amps[x | mask]);
                    amps[x] = -i * a1;
                    amps[x | mask] = i * a0;
                }
            }
        }
        3 => {
            for (x, a) in amps.iter_mut().enumerate() {
                if x & mask != 0 {
                    *a = -*a;
                }
            }
        }
        _ => unreachable!(),
    }
}

type Insertions = Vec<(u32, u8)>;

fn simulate_with_insertions<T: Real>(c: &Circuit<T>, insertions: &Insertions) -> Vec<f64> {
    let mut amps = StateVector::<T>::basis(c.n, 0).amplitudes;
    let mut cnot_idx = 0u32;
    let mut ins = insertions.iter().peekable();
    for g in &c.gates {
        apply_gate(&mut amps, c.n, g);
        if let Gate::Cx { control, target } = *g {
            while let Some(&&(at, pauli)) = ins.peek() {
                if at != cnot_idx {
                    break;
                }
                apply_pauli(&mut amps, c.n, control, pauli >> 2);
                apply_pauli(&mut amps, c.n, target, pauli & 3);
                ins.next();
            }
            cnot_idx += 1;
        }
    }
    amps.iter().map(|a| a.norm_sqr().to_f64().unwrap_or(0.0)).collect()
}

/// Monte Carlo with CNOT depolarizing noise: after each CNOT, with
/// probability `p_cnot` a uniformly random non-identity two-qubit Pauli
/// hits its operands. Trajectories sharing an insertion pattern are
/// simulated once.
pub fn simulate_noisy<T: Real>(
    c: &Circuit<T>,
    p_cnot: f64,
    shots: u64,
    seed: u64,
) -> ShotCounts {
    assert!((0.0..=1.0).contains(&p_cnot));
    assert!(shots >= 1);
    let n_cnots = c.cnot_count() as u32;

    let mut patterns: Vec<Insertions> = Vec::new();
    let mut index_of: HashMap<Insertions, usize> = HashMap::new();
    let mut shot_pattern: Vec<usize> = Vec::with_capacity(shots as usize);
    for i in 0..shots {
        let mut rng = noise_rng(seed, i);
        let mut ins: Insertions = Vec::new();
        for j in 0..n_cnots {
            if p_cnot > 0.0 && rng.gen::<f64>() < p_cnot {
                ins.push((j, rng.gen_range(1..16u8)));
            }
        }
        let idx = *index_of.entry(ins.clone()).or_insert_with(|| {
            patterns.push(ins);
            patterns.len() - 1
        });
        shot_pattern.push(idx);
    }

    let prob_sets: Vec<Vec<f64>> =
        patterns.par_iter().map(|ins| simulate_with_insertions(c, ins)).collect();

    let mut histogram = BTreeMap::new();
    for (i, &pat) in shot_pattern.iter().enumerate() {
        let x = draw_outcome(&prob_sets[pat], &mut measure_rng(seed, i as u64));
        *histogram.entry(x).or_insert(0) += 1;
    }
    ShotCounts { shots, histogram }
}

/// Mean absolute error between empirical frequencies and |a_x|^2,
/// averaged over all 2^n outcomes.
pub fn mae<T: Real>(counts: &ShotCounts, target: &StateVector<T>) -> f64 {
    let probs = probabilities(target);
    let shots = counts.shots as f64;
    let total: f64 = probs
        .iter()
        .enumerate()
        .map(|(x, &p)| (counts.count(x) as f64 / shots - p).abs())
        .sum();
    total / probs.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn bell_circuit() -> Circuit<f64> {
        let mut c = Circuit::new(2);
        c.push_ry(0, PI / 2.0);
        c.push_cx(0, 1);
        c
    }

    #[test]
    fn basis_state_samples_deterministically() {
        let counts = sample(&StateVector::<f64>::basis(2, 0), 100, 1);
        assert_eq!(counts.count(0), 100);
        assert_eq!(counts.histogram.len(), 1);
    }

    #[test]
    fn plus_state_is_roughly_balanced() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = StateVector::new_unchecked(1, vec![Complex::new(h, 0.0), Complex::new(h, 0.0)]);
        let counts = sample(&plus, 8192, 42);
        let f = counts.count(0) as f64 / 8192.0;
        assert!((0.47..=0.53).contains(&f), "frequency {f}");
        assert_eq!(sample(&plus, 8192, 42), counts);
        assert_ne!(sample(&plus, 8192, 43), counts);
    }

    #[test]
    fn zero_noise_matches_noiseless_exactly() {
        let c = bell_circuit();
        let noiseless = sample(&c.simulate(), 4096, 7);
        let noisy = simulate_noisy(&c, 0.0, 4096, 7);
        assert_eq!(noiseless, noisy);
    }

    #[test]
    fn cnot_free_circuit_ignores_noise() {
        let mut c = Circuit::<f64>::new(2);
        c.push_ry(0, 0.7);
        c.push_ry(1, 1.1);
        assert_eq!(simulate_noisy(&c, 0.9, 2048, 3), sample(&c.simulate(), 2048, 3));
    }

    #[test]
    fn full_noise_breaks_bell_statistics() {
        let c = bell_circuit();
        let counts = simulate_noisy(&c, 1.0, 8192, 9);
        // Bell outcomes 00 and 11 should no longer carry ~all the weight
        let bell_frac = (counts.count(0) + counts.count(3)) as f64 / 8192.0;
        assert!(bell_frac < 0.9, "bell fraction {bell_frac}");
    }

    #[test]
    fn mae_examples() {
        let zero = StateVector::<f64>::basis(1, 0);
        let counts = sample(&zero, 64, 5);
        assert_eq!(mae(&counts, &zero), 0.0);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = StateVector::new_unchecked(1, vec![Complex::new(h, 0.0), Complex::new(h, 0.0)]);
        assert!((mae(&counts, &plus) - 0.5).abs() < 1e-12);
    }
}
