//! One test per shipped guarantee; each prints a numbered PASS/FAIL line.
//! Run with `--nocapture` to see the lines on success.

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qsp_core::baa::{baa_search, branch, brute_force_plans, compose_loss, enumerate_bipartitions, synth_plan, CostFn, FactorState};
use qsp_core::circuit::qasm::{emit_qasm, parse_qasm};
use qsp_core::circuit::sampling::{mae, sample, simulate_noisy};
use qsp_core::circuit::Circuit;
use qsp_core::cost::{lrsp_estimate, table1_bound, Rational};
use qsp_core::measures::{fidelity, purity_from_sigma};
use qsp_core::schmidt::{schmidt_decompose, schmidt_svd, truncate, default_tol};
use qsp_core::state::StateVector;
use qsp_core::synthesis::{lrsp, LrspConfig};
use qsp_core::Bipartition;

fn random_state(n: usize, seed: u64) -> StateVector<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    StateVector::random_uniform(n, &mut rng)
}

fn product_state(n: usize, seed: u64) -> StateVector<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut psi = StateVector::<f64>::random_uniform(1, &mut rng);
    for _ in 1..n {
        psi = psi.tensor(&StateVector::<f64>::random_uniform(1, &mut rng));
    }
    psi
}

fn synth_full(psi: &StateVector<f64>) -> Circuit<f64> {
    lrsp(psi, &LrspConfig::default()).unwrap().0
}

fn synth_capped(psi: &StateVector<f64>, r: usize) -> (Circuit<f64>, f64) {
    let (c, rep) = lrsp(psi, &LrspConfig::with_rank(r)).unwrap();
    (c, rep.predicted_loss)
}

#[test]
fn crit01_cost_formulas_exact() {
    assert_eq!(lrsp_estimate(4, 2).unwrap().total, Rational::from_integer(9));
    for n in 2..=20usize {
        let k = n / 2;
        for m in 0..=k {
            let est = lrsp_estimate(n, m).unwrap().total;
            let bound = table1_bound(n, m).unwrap();
            if m < k {
                assert_eq!(
                    est - bound,
                    Rational::from_integer((1i64 << m) - 1),
                    "estimate minus bound at n={n} m={m}"
                );
            } else if n % 2 == 0 {
                assert_eq!(
                    bound - est,
                    Rational::from_integer(1i64 << (k + 1)) - Rational::new(5, 3),
                    "bound minus estimate at n={n} m={m}"
                );
                assert!(est <= bound);
            }
        }
    }
    println!("[01] closed-form estimate (4,2) = 9 and bound identities exact for n <= 20: PASS");
}

#[test]
fn crit02_exact_synthesis_fidelity() {
    let mut worst = 1.0f64;
    for i in 0..200u64 {
        let n = 2 + (i as usize % 7);
        let psi = random_state(n, 200 + i);
        let c = synth_full(&psi);
        let f = fidelity(&c.simulate(), &psi).unwrap();
        assert!(f >= 1.0 - 1e-9, "state {i} (n={n}) fidelity {f}");
        worst = worst.min(f);
    }
    println!("[02] 200 full-rank syntheses at n = 2..8 reach fidelity >= 1 - 1e-9 (worst {worst:.3e}): PASS");
}

#[test]
fn crit03_truncation_contract() {
    let mut worst = 0.0f64;
    for i in 0..50u64 {
        let n = if i % 2 == 0 { 4 } else { 6 };
        let psi = random_state(n, 300 + i);
        let bp = Bipartition::half_split(n).unwrap();
        let f = schmidt_svd(&psi, &bp).unwrap();
        for r in 1..=f.s.len() {
            let (c, _) = synth_capped(&psi, r);
            let fid = fidelity(&c.simulate(), &psi).unwrap();
            let expect = 1.0 - f.s[r..].iter().map(|s| s * s).sum::<f64>();
            let err = (fid - expect).abs();
            assert!(err < 1e-6, "state {i} r={r}: fidelity {fid} vs {expect}");
            worst = worst.max(err);
        }
    }
    println!("[03] truncated fidelity matches 1 - tail(sigma^2) within 1e-6 (worst {worst:.3e}): PASS");
}

#[test]
fn crit04_spectrum_numerics() {
    let raw = [0.9033f64, 0.3256, 0.2348, 0.1509];
    let z: f64 = raw.iter().map(|s| s * s).sum::<f64>().sqrt();
    let sigma: Vec<f64> = raw.iter().map(|s| s / z).collect();
    let purity = purity_from_sigma(&sigma).unwrap();
    assert!((purity - 0.6807).abs() < 5e-4, "purity {purity}");

    // embed the spectrum in a 2+2-qubit state and truncate through the pipeline
    let mut amps = vec![Complex::new(0.0, 0.0); 16];
    for (i, &s) in sigma.iter().enumerate() {
        amps[i * 4 + i] = Complex::new(s, 0.0);
    }
    let psi = StateVector::new_unchecked(4, amps);
    let bp = Bipartition::half_split(4).unwrap();
    let sd = schmidt_decompose(&psi, &bp, default_tol()).unwrap();
    let keep2 = truncate(&sd, 2).unwrap().loss;
    let keep3 = truncate(&sd, 3).unwrap().loss;
    assert!((keep2 - 0.077931).abs() < 1e-3, "keep-2 loss {keep2}");
    assert!((keep3 - 0.022792).abs() < 1e-3, "keep-3 loss {keep3}");
    println!("[04] quoted 4-coefficient spectrum: purity {purity:.4}, losses {keep2:.6}/{keep3:.6}: PASS");
}

#[test]
fn crit05_product_shortcut() {
    for n in 1..=10usize {
        let psi = product_state(n, 500 + n as u64);
        let (c, rep) = lrsp(&psi, &LrspConfig::default()).unwrap();
        assert_eq!(c.cnot_count(), 0, "n={n} used CNOTs");
        assert_eq!(rep.cnots, 0);
        let f = fidelity(&c.simulate(), &psi).unwrap();
        assert!(f >= 1.0 - 1e-9, "n={n} fidelity {f}");
    }
    println!("[05] separable states up to n = 10 synthesize with exactly 0 CNOTs: PASS");
}

#[test]
fn crit06_scaling_trend() {
    let n = 8;
    let k = n / 2;
    let mut all_counts = Vec::new();
    for i in 0..5u64 {
        let psi = random_state(n, 600 + i);
        let counts: Vec<usize> =
            (0..=k).map(|m| synth_capped(&psi, 1 << m).0.cnot_count()).collect();
        for m in 0..k - 1 {
            assert!(
                counts[m] <= counts[m + 1],
                "state {i}: count({m}) = {} > count({}) = {}",
                counts[m],
                m + 1,
                counts[m + 1]
            );
        }
        assert!(
            counts[0] <= counts[k] / 4,
            "state {i}: count(0) = {} vs count({k}) = {}",
            counts[0],
            counts[k]
        );
        all_counts.push(counts);
    }
    let last_two: Vec<(usize, usize)> =
        all_counts.iter().map(|c| (c[k - 1], c[k])).collect();
    println!(
        "[06] n = 8 realized CNOTs non-decreasing for m <= k-1 and count(0) <= count(k)/4; \
         m = k-1 vs k pairs {last_two:?} (full-rank step can break monotonicity): PASS"
    );
}

#[test]
fn crit07_shot_noise_mae() {
    let states: Vec<StateVector<f64>> = (0..10u64).map(|i| random_state(7, 700 + i)).collect();
    let circuits: Vec<Vec<Circuit<f64>>> = states
        .iter()
        .map(|psi| (0..=3).map(|m| synth_capped(psi, 1 << m).0).collect())
        .collect();

    let mut mean_clean = [0.0f64; 4];
    let mut mean_noisy = [0.0f64; 4];
    for (i, psi) in states.iter().enumerate() {
        for m in 0..=3usize {
            let c = &circuits[i][m];
            let seed = 7000 + i as u64 * 10 + m as u64;
            let clean = sample(&c.simulate(), 8192, seed);
            mean_clean[m] += mae(&clean, psi) / 10.0;
            let noisy = simulate_noisy(c, 0.02, 8192, 70_000 + i as u64 * 10 + m as u64);
            mean_noisy[m] += mae(&noisy, psi) / 10.0;
        }
    }

    assert!(
        mean_clean[3] < mean_clean[0],
        "noiseless MAE(m=3) {} should beat MAE(m=0) {}",
        mean_clean[3],
        mean_clean[0]
    );
    assert!(
        (0.0018..=0.0075).contains(&mean_clean[0]),
        "noiseless MAE(m=0) {} outside [0.0018, 0.0075]",
        mean_clean[0]
    );
    for m in 1..=3usize {
        assert!(
            mean_noisy[0] < mean_noisy[m],
            "noisy MAE should be minimized at m=0: {mean_noisy:?}"
        );
    }
    println!(
        "[07] 7-qubit shot ensemble: noiseless mean MAE {mean_clean:?} (m=0 in band, m=3 lower); \
         p=0.02 mean MAE {mean_noisy:?} minimized at m=0: PASS"
    );
}

#[test]
fn crit08_search_matches_oracle() {
    let budgets = [0.01f64, 0.05, 0.1, 0.3];
    for i in 0..50u64 {
        let n = 3 + (i as usize % 3);
        let psi = random_state(n, 800 + i);
        for &budget in &budgets {
            for cost_fn in [CostFn::Model, CostFn::Realized] {
                let fast = baa_search(&psi, budget, cost_fn).unwrap();
                let slow = brute_force_plans(&psi, budget, cost_fn).unwrap();
                assert_eq!(
                    fast.saved_cnots, slow.saved_cnots,
                    "state {i} (n={n}) budget {budget} {cost_fn:?}"
                );
                assert!((fast.total_loss - slow.total_loss).abs() < 1e-9);
            }
        }
    }
    let product = product_state(3, 888);
    let plan = baa_search(&product, 0.0, CostFn::Model).unwrap();
    assert_eq!(plan.saved_cnots, 4, "3-qubit full product saves 4 CNOTs");
    assert_eq!(plan.factors.len(), 3);
    println!("[08] search equals exhaustive oracle on 50 states x 4 budgets x 2 cost models; product n=3 saves 4: PASS");
}

#[test]
fn crit09_loss_composition() {
    let two_step = compose_loss::<f64>(&[0.0583, 0.2657]);
    assert!((two_step - 0.3085).abs() < 1e-3, "composed loss {two_step}");

    let budgets = [0.01f64, 0.05, 0.1, 0.3];
    let mut worst = 0.0f64;
    let mut worst_chain = 0.0f64;
    let mut mismatches: Vec<String> = Vec::new();
    let mut checked = 0usize;
    for i in 0..12u64 {
        let n = 3 + (i as usize % 3);
        let psi = random_state(n, 900 + i);
        for &budget in &budgets {
            let plan = baa_search(&psi, budget, CostFn::Model).unwrap();
            let circ = synth_plan(&plan).unwrap();
            let fid = fidelity(&circ.simulate(), &psi).unwrap();
            let expect: f64 =
                plan.steps.iter().fold(1.0, |acc, s| acc * (1.0 - s.step_loss));
            let err = (fid - expect).abs();
            checked += 1;
            worst = worst.max(err);
            let forked = is_forked(&plan);
            if !forked {
                worst_chain = worst_chain.max(err);
            }
            if err >= 1e-6 {
                let steps: Vec<String> = plan
                    .steps
                    .iter()
                    .map(|s| {
                        format!(
                            "{:?} -> {:?}|{:?} loses {:.6}",
                            s.factor_qubits,
                            s.bipartition.a(),
                            s.bipartition.b(),
                            s.step_loss
                        )
                    })
                    .collect();
                mismatches.push(format!(
                    "state {i} (n={n}, seed {}) budget {budget}: fidelity {fid:.12} vs \
                     prod(1 - l_i) = {expect:.12} (diff {err:.3e}; {}; steps: {})",
                    900 + i,
                    if forked { "forked hierarchy" } else { "chain hierarchy" },
                    steps.join("; ")
                ));
            }
        }
    }
    println!(
        "[09] two-step composition 0.0583 then 0.2657 gives {two_step:.4} (expected ~0.3085): ok"
    );
    if mismatches.is_empty() {
        println!(
            "[09] all {checked} synthesized plans hit prod(1 - l_i) within 1e-6 \
             (worst {worst:.3e}): PASS"
        );
        return;
    }
    println!(
        "[09] finding: {} of {checked} synthesized plans miss prod(1 - l_i) by >= 1e-6 \
         (worst {worst:.3e}; worst over chain-shaped plans {worst_chain:.3e}).",
        mismatches.len()
    );
    println!(
        "     Every mismatching plan splits both sides of some earlier cut. Multiplying \
         per-step overlaps is exact only when each cut refines one side at a time: the \
         discarded Schmidt terms of a cut stay orthogonal to later refinements of the \
         kept side, but once both sides are refined their cross terms no longer cancel. \
         The synthesized circuit itself is faithful: its fidelity matches the direct \
         inner product of the plan's leaf factors to machine precision."
    );
    for m in &mismatches {
        println!("     {m}");
    }
    panic!(
        "[09] synthesized-plan fidelity must equal prod(1 - l_i) within 1e-6: FAIL \
         ({} of {checked} plans mismatch, worst {worst:.3e})",
        mismatches.len()
    );
}

/// True when some step's cut has both of its sides split again later in the plan.
fn is_forked(plan: &qsp_core::baa::ApproxPlan<f64>) -> bool {
    let key = |v: &[usize]| {
        let mut s = v.to_vec();
        s.sort_unstable();
        s
    };
    for (k, s) in plan.steps.iter().enumerate() {
        let a = key(s.bipartition.a());
        let b = key(s.bipartition.b());
        let later = &plan.steps[k + 1..];
        let hit_a = later.iter().any(|t| key(&t.factor_qubits) == a);
        let hit_b = later.iter().any(|t| key(&t.factor_qubits) == b);
        if hit_a && hit_b {
            return true;
        }
    }
    false
}

/// Every full-product refinement hierarchy of `factor`, as (description, product of (1 - step loss)).
fn full_split_trees(factor: &FactorState<f64>) -> Vec<(Vec<String>, f64)> {
    if factor.qubits.len() == 1 {
        return vec![(Vec::new(), 1.0)];
    }
    let mut out = Vec::new();
    for bp in enumerate_bipartitions(&factor.qubits).unwrap() {
        let (ca, cb, loss) = branch(factor, &bp).unwrap();
        let label = format!("{:?}|{:?} loses {loss:.6}", bp.a(), bp.b());
        for (da, pa) in full_split_trees(&ca) {
            for (db, pb) in full_split_trees(&cb) {
                let mut desc = vec![label.clone()];
                desc.extend(da.iter().cloned());
                desc.extend(db.iter().cloned());
                out.push((desc, (1.0 - loss) * pa * pb));
            }
        }
    }
    out
}

#[test]
fn crit10_path_independence_study() {
    let mut max_spread = 0.0f64;
    let mut example: Option<(usize, StateVector<f64>, (Vec<String>, f64), (Vec<String>, f64))> =
        None;
    for i in 0..100usize {
        let n = if i < 50 { 3 } else { 4 };
        let psi = random_state(n, 1000 + i as u64);
        let root = FactorState { qubits: (0..n).collect(), state: psi.clone() };
        let trees = full_split_trees(&root);
        let losses: Vec<f64> = trees.iter().map(|(_, p)| 1.0 - p).collect();
        let (lo_idx, hi_idx) = (
            (0..losses.len()).min_by(|&a, &b| losses[a].total_cmp(&losses[b])).unwrap(),
            (0..losses.len()).max_by(|&a, &b| losses[a].total_cmp(&losses[b])).unwrap(),
        );
        let spread = losses[hi_idx] - losses[lo_idx];
        if spread > max_spread {
            max_spread = spread;
            example = Some((
                i,
                psi.clone(),
                (trees[lo_idx].0.clone(), losses[lo_idx]),
                (trees[hi_idx].0.clone(), losses[hi_idx]),
            ));
        }
    }

    if max_spread < 1e-6 {
        println!("[10] full-product loss spread across hierarchies < 1e-6 (max {max_spread:.3e}): PASS");
        return;
    }

    let (idx, psi, (lo_desc, lo), (hi_desc, hi)) = example.unwrap();
    println!("[10] full-product loss is NOT hierarchy-independent: FAIL (max spread {max_spread:.6})");
    println!("     counterexample: state #{idx}, n={}, amplitudes:", psi.n);
    for (x, a) in psi.amplitudes.iter().enumerate() {
        println!("       |{x:0width$b}>  {:+.12} {:+.12}i", a.re, a.im, width = psi.n);
    }
    println!("     cheapest hierarchy (total loss {lo:.6}):");
    for s in &lo_desc {
        println!("       split {s}");
    }
    println!("     costliest hierarchy (total loss {hi:.6}):");
    for s in &hi_desc {
        println!("       split {s}");
    }
    println!("     note: reordering steps WITHIN one hierarchy never changes the total (each");
    println!("     step loss depends only on its own factor); only the hierarchy choice does.");
    panic!(
        "full-product total loss varies by {max_spread:.6} across split hierarchies \
         (threshold 1e-6); see printed counterexample"
    );
}

#[test]
fn crit11_qasm_roundtrip() {
    let mut rng = ChaCha8Rng::seed_from_u64(1100);
    for i in 0..100 {
        let c = random_circuit(&mut rng);
        let back: Circuit<f64> = parse_qasm(&emit_qasm(&c)).unwrap();
        assert_eq!(back, c, "circuit {i} changed structurally");
        let a = c.simulate();
        let b = back.simulate();
        for (x, (va, vb)) in a.amplitudes.iter().zip(&b.amplitudes).enumerate() {
            assert!((va - vb).norm() < 1e-9, "circuit {i} amplitude {x}");
        }
    }
    println!("[11] 100 random circuits survive emit/parse with identical simulation: PASS");
}

fn random_circuit(rng: &mut ChaCha8Rng) -> Circuit<f64> {
    use rand::Rng;
    let n = rng.gen_range(1..=5);
    let mut c = Circuit::new(n);
    c.add_global_phase(rng.gen_range(-3.0..3.0));
    for _ in 0..rng.gen_range(0..30) {
        if n >= 2 && rng.gen_bool(0.4) {
            let control = rng.gen_range(0..n);
            let mut target = rng.gen_range(0..n);
            while target == control {
                target = rng.gen_range(0..n);
            }
            c.push_cx(control, target);
        } else {
            let q = rng.gen_range(0..n);
            c.push_u(
                q,
                rng.gen_range(-3.1..3.1),
                rng.gen_range(-3.1..3.1),
                rng.gen_range(-3.1..3.1),
            );
        }
    }
    c
}
