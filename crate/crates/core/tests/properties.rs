use num_complex::Complex;
use proptest::prelude::*;

use qsp_core::baa::compose_loss;
use qsp_core::circuit::qasm::{emit_qasm, parse_qasm};
use qsp_core::circuit::Circuit;
use qsp_core::linalg::{svd, Mat};
use qsp_core::measures::{fidelity, purity_from_sigma};
use qsp_core::schmidt::{default_tol, reconstruct, schmidt_decompose, truncate};
use qsp_core::state::StateVector;
use qsp_core::synthesis::prep_state;
use qsp_core::Bipartition;

fn arb_amplitudes(len: usize) -> impl Strategy<Value = Vec<Complex<f64>>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), len..=len)
        .prop_filter_map("norm too small", |pairs| {
            let norm: f64 = pairs.iter().map(|(re, im)| re * re + im * im).sum::<f64>().sqrt();
            if norm < 1e-3 {
                return None;
            }
            Some(pairs.iter().map(|&(re, im)| Complex::new(re / norm, im / norm)).collect())
        })
}

fn arb_state(n: usize) -> impl Strategy<Value = StateVector<f64>> {
    arb_amplitudes(1 << n).prop_map(move |amps| StateVector::new_unchecked(n, amps))
}

#[derive(Clone, Debug)]
enum GateSpec {
    U(usize, f64, f64, f64),
    Cx(usize, usize),
}

fn arb_circuit() -> impl Strategy<Value = Circuit<f64>> {
    (1usize..=4)
        .prop_flat_map(|n| {
            let gate = prop_oneof![
                (0..n, -3.1..3.1f64, -3.1..3.1f64, -3.1..3.1f64)
                    .prop_map(|(q, t, p, l)| GateSpec::U(q, t, p, l)),
                (0..n, 0..n.max(2) - 1).prop_map(move |(c, t_raw)| {
                    let t = if t_raw >= c { t_raw + 1 } else { t_raw };
                    GateSpec::Cx(c, t.min(n - 1))
                }),
            ];
            (
                Just(n),
                prop::collection::vec(gate, 0..24),
                -3.0..3.0f64,
            )
        })
        .prop_map(|(n, specs, phase)| {
            let mut c = Circuit::new(n);
            c.add_global_phase(phase);
            for s in specs {
                match s {
                    GateSpec::U(q, t, p, l) => c.push_u(q, t, p, l),
                    GateSpec::Cx(ctl, tgt) => {
                        if ctl != tgt {
                            c.push_cx(ctl, tgt);
                        }
                    }
                }
            }
            c
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn svd_reconstructs_matrix(
        rows in 1usize..=8,
        cols in 1usize..=8,
        seed_pairs in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 64..=64),
    ) {
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                let (re, im) = seed_pairs[i * 8 + j];
                m.set(i, j, Complex::new(re, im));
            }
        }
        let f = svd(&m).unwrap();
        let min = rows.min(cols);
        // rebuild U diag(S) Vh
        for i in 0..rows {
            for j in 0..cols {
                let mut acc = Complex::new(0.0, 0.0);
                for t in 0..min {
                    acc += f.u.get(i, t) * f.s[t] * f.vh.get(t, j);
                }
                prop_assert!((acc - m.get(i, j)).norm() < 1e-9);
            }
        }
        for t in 1..min {
            prop_assert!(f.s[t - 1] >= f.s[t]);
        }
    }

    #[test]
    fn schmidt_roundtrips_and_truncates(psi in (2usize..=4).prop_flat_map(arb_state)) {
        let bp = Bipartition::half_split(psi.n).unwrap();
        let sd = schmidt_decompose(&psi, &bp, default_tol()).unwrap();
        let back = reconstruct(&sd);
        prop_assert!(fidelity(&back, &psi).unwrap() > 1.0 - 1e-9);

        let full: f64 = sd.sigma.iter().map(|s| s * s).sum();
        prop_assert!((full - 1.0).abs() < 1e-8);
        for r in 1..=sd.rank {
            let t = truncate(&sd, r).unwrap();
            let z2 = t.normalizer * t.normalizer;
            prop_assert!((z2 + t.loss - 1.0).abs() < 1e-8);
            for w in t.sigma_prime.windows(2) {
                prop_assert!(w[0] >= w[1]);
            }
        }
        let t_full = truncate(&sd, sd.rank).unwrap();
        prop_assert!(t_full.loss == 0.0);
    }

    #[test]
    fn prep_state_hits_target(psi in (1usize..=4).prop_flat_map(arb_state)) {
        let c = prep_state(&psi.amplitudes).unwrap();
        prop_assert!(fidelity(&c.simulate(), &psi).unwrap() > 1.0 - 1e-9);
    }

    #[test]
    fn qasm_roundtrip_identical(c in arb_circuit()) {
        let back: Circuit<f64> = parse_qasm(&emit_qasm(&c)).unwrap();
        prop_assert_eq!(&back, &c);
        let a = c.simulate();
        let b = back.simulate();
        for (va, vb) in a.amplitudes.iter().zip(&b.amplitudes) {
            prop_assert!((va - vb).norm() < 1e-12);
        }
    }

    #[test]
    fn depth_bounded_by_gate_count(c in arb_circuit()) {
        prop_assert!(c.depth() <= c.gate_count());
    }

    #[test]
    fn simulate_preserves_norm(c in arb_circuit()) {
        let out = c.simulate();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn compose_loss_in_unit_interval(losses in prop::collection::vec(0.0..=1.0f64, 0..6)) {
        let total = compose_loss(&losses);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&total));
        for (i, &l) in losses.iter().enumerate() {
            // composing more losses never decreases the total
            prop_assert!(total >= compose_loss(&losses[..i]) - 1e-12);
            prop_assert!(total + 1e-12 >= l);
        }
    }

    #[test]
    fn purity_within_bounds(psi in (2usize..=4).prop_flat_map(arb_state)) {
        let bp = Bipartition::half_split(psi.n).unwrap();
        let sd = schmidt_decompose(&psi, &bp, default_tol()).unwrap();
        let d = 1usize << (psi.n / 2);
        let p = purity_from_sigma(&sd.sigma).unwrap();
        prop_assert!(p <= 1.0 + 1e-9);
        prop_assert!(p >= 1.0 / d as f64 - 1e-9);
    }
}
