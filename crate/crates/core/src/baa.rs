use std::collections::{HashMap, VecDeque};

use num_complex::Complex;

use crate::circuit::Circuit;
use crate::cost::baseline_sp_count;
use crate::error::{Error, Result};
use crate::real::Real;
use crate::schmidt::schmidt_svd;
use crate::state::StateVector;
use crate::synthesis::{lrsp, LrspConfig};
use crate::Bipartition;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CostFn {
    /// Closed-form dense-prep CNOT count 2^q - q - 1 per factor.
    Model,
    /// CNOTs of the synthesized full-rank circuit per factor.
    Realized,
}

/// A factor of an approximate product decomposition: the global qubit
/// labels it covers (sorted ascending) and its local state in that order.
#[derive(Clone, Debug)]
pub struct FactorState<T> {
    pub qubits: Vec<usize>,
    pub state: StateVector<T>,
}

#[derive(Clone, Debug)]
pub struct PlanStep<T> {
    pub factor_qubits: Vec<usize>,
    pub bipartition: Bipartition,
    pub step_loss: T,
}

#[derive(Clone, Debug)]
pub struct ApproxPlan<T> {
    pub factors: Vec<FactorState<T>>,
    pub steps: Vec<PlanStep<T>>,
    pub total_loss: T,
    pub predicted_cnots: u64,
    pub saved_cnots: i64,
    pub cost_fn: CostFn,
}

/// All distinct splits of `qubits` into two non-empty blocks, canonical
/// side A no larger than B, ordered by (|A|, A lexicographic).
pub fn enumerate_bipartitions(qubits: &[usize]) -> Result<Vec<Bipartition>> {
    let q = qubits.len();
    if q < 2 {
        return Err(Error::InvalidInput("cannot split fewer than 2 qubits".into()));
    }
    if q > 20 {
        return Err(Error::ResourceLimit(format!("{q} qubits give too many subsets")));
    }
    let mut qs = qubits.to_vec();
    qs.sort_unstable();
    qs.dedup();
    if qs.len() != q {
        return Err(Error::InvalidInput("duplicate qubit labels".into()));
    }
    let mut out = Vec::new();
    for mask in 1u64..(1 << q) - 1 {
        let size = mask.count_ones() as usize;
        if size > q / 2 {
            continue;
        }
        if q % 2 == 0 && size == q / 2 && mask & 1 == 0 {
            continue;
        }
        let subset: Vec<usize> = (0..q).filter(|i| mask >> i & 1 == 1).map(|i| qs[i]).collect();
        out.push(Bipartition::split(&qs, &subset)?);
    }
    out.sort_by(|x, y| (x.a().len(), x.a()).cmp(&(y.a().len(), y.a())));
    Ok(out)
}

/// Rank-1 split of a factor along `bp` (global labels): returns the two
/// nearest product factors and the fidelity lost, exactly 0 when the cut
/// is a product cut up to 1e-14.
pub fn branch<T: Real>(
    factor: &FactorState<T>,
    bp: &Bipartition,
) -> Result<(FactorState<T>, FactorState<T>, T)> {
    let mut qs = factor.qubits.clone();
    qs.sort_unstable();
    if bp.universe() != qs {
        return Err(Error::InvalidInput("split does not cover this factor".into()));
    }
    let local_a: Vec<usize> = bp
        .a()
        .iter()
        .map(|g| qs.binary_search(g).expect("label in universe"))
        .collect();
    let universe: Vec<usize> = (0..qs.len()).collect();
    let local_bp = Bipartition::split(&universe, &local_a)?;
    let f = schmidt_svd(&factor.state, &local_bp)?;
    let s1 = f.s[0];
    let mut loss = T::one() - s1 * s1;
    if loss <= T::of(1e-14) {
        loss = T::zero();
    }
    let child_a = FactorState {
        qubits: bp.a().to_vec(),
        state: StateVector::new_unchecked(bp.a().len(), f.u.col(0)).normalized(),
    };
    let child_b = FactorState {
        qubits: bp.b().to_vec(),
        state: StateVector::new_unchecked(bp.b().len(), f.vh.row(0)).normalized(),
    };
    Ok((child_a, child_b, loss))
}

/// 1 - prod(1 - l_i), folded in sequence order.
pub fn compose_loss<T: Real>(losses: &[T]) -> T {
    T::one() - losses.iter().fold(T::one(), |acc, &l| acc * (T::one() - l))
}

type StateKey = Vec<(i64, i64)>;
type NodeKey = Vec<(Vec<usize>, StateKey)>;

/// Global-phase-canonical quantization at 1e-12 resolution.
fn state_key<T: Real>(amps: &[Complex<T>]) -> StateKey {
    let ph = amps
        .iter()
        .find(|a| a.norm() > T::of(1e-6))
        .map(|a| a.conj() / a.norm())
        .unwrap_or_else(|| Complex::new(T::one(), T::zero()));
    amps.iter()
        .map(|a| {
            let b = *a * ph;
            let q = |v: T| (v.to_f64().unwrap_or(0.0) / 1e-12).round() as i64;
            (q(b.re), q(b.im))
        })
        .collect()
}

fn node_key<T: Real>(factors: &[FactorState<T>]) -> NodeKey {
    factors
        .iter()
        .map(|f| (f.qubits.clone(), state_key(&f.state.amplitudes)))
        .collect()
}

type RealizedCache = HashMap<(usize, StateKey), u64>;

fn factor_cost<T: Real>(
    factor: &FactorState<T>,
    cost_fn: CostFn,
    cache: &mut RealizedCache,
) -> Result<u64> {
    let q = factor.qubits.len();
    match cost_fn {
        CostFn::Model => Ok(baseline_sp_count(q)),
        CostFn::Realized => {
            let key = (q, state_key(&factor.state.amplitudes));
            if let Some(&c) = cache.get(&key) {
                return Ok(c);
            }
            let (circ, _) = lrsp(&factor.state, &LrspConfig::default())?;
            let c = circ.cnot_count() as u64;
            cache.insert(key, c);
            Ok(c)
        }
    }
}

fn plan_cost<T: Real>(
    factors: &[FactorState<T>],
    cost_fn: CostFn,
    cache: &mut RealizedCache,
) -> Result<u64> {
    let mut total = 0u64;
    for f in factors {
        total += factor_cost(f, cost_fn, cache)?;
    }
    Ok(total)
}

type StepSig = Vec<(Vec<usize>, usize, Vec<usize>)>;

fn step_sig<T>(steps: &[PlanStep<T>]) -> StepSig {
    steps
        .iter()
        .map(|s| (s.factor_qubits.clone(), s.bipartition.a().len(), s.bipartition.a().to_vec()))
        .collect()
}

/// True when (saved_a, loss_a, steps_a) beats b: more CNOTs saved, then
/// lower loss beyond 1e-12, then the smaller step sequence.
fn better<T: Real>(
    saved_a: i64,
    loss_a: T,
    sig_a: &StepSig,
    saved_b: i64,
    loss_b: T,
    sig_b: &StepSig,
) -> bool {
    if saved_a != saved_b {
        return saved_a > saved_b;
    }
    let d = loss_a - loss_b;
    if d < -T::of(1e-12) {
        return true;
    }
    if d > T::of(1e-12) {
        return false;
    }
    sig_a < sig_b
}

struct Node<T> {
    factors: Vec<FactorState<T>>,
    steps: Vec<PlanStep<T>>,
    loss: T,
}

fn check_budget<T: Real>(budget: T) -> Result<()> {
    if !(budget >= T::zero() && budget <= T::one()) {
        return Err(Error::InvalidInput(format!("loss budget {budget} outside [0, 1]")));
    }
    Ok(())
}

fn expansions<T: Real>(node: &Node<T>, budget: T) -> Result<Vec<Node<T>>> {
    let mut out = Vec::new();
    for (fi, factor) in node.factors.iter().enumerate() {
        if factor.qubits.len() < 2 {
            continue;
        }
        for bp in enumerate_bipartitions(&factor.qubits)? {
            let (ca, cb, sl) = branch(factor, &bp)?;
            let new_loss = T::one() - (T::one() - node.loss) * (T::one() - sl);
            if !(new_loss <= budget) {
                continue;
            }
            let mut factors: Vec<FactorState<T>> = node
                .factors
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != fi)
                .map(|(_, f)| f.clone())
                .collect();
            factors.push(ca);
            factors.push(cb);
            factors.sort_by_key(|f| f.qubits[0]);
            let mut steps = node.steps.clone();
            steps.push(PlanStep {
                factor_qubits: factor.qubits.clone(),
                bipartition: bp,
                step_loss: sl,
            });
            out.push(Node { factors, steps, loss: new_loss });
        }
    }
    Ok(out)
}

fn finish_plan<T: Real>(
    node: Node<T>,
    cost: u64,
    baseline: u64,
    cost_fn: CostFn,
) -> ApproxPlan<T> {
    ApproxPlan {
        total_loss: node.loss,
        factors: node.factors,
        steps: node.steps,
        predicted_cnots: cost,
        saved_cnots: baseline as i64 - cost as i64,
        cost_fn,
    }
}

/// Breadth-first search over split sequences staying within `budget`
/// total loss, deduplicating factor sets, maximizing saved CNOTs.
pub fn baa_search<T: Real>(
    psi: &StateVector<T>,
    budget: T,
    cost_fn: CostFn,
) -> Result<ApproxPlan<T>> {
    check_budget(budget)?;
    let n = psi.n;
    let mut cache = RealizedCache::new();
    let root = FactorState { qubits: (0..n).collect(), state: psi.clone() };
    let baseline = factor_cost(&root, cost_fn, &mut cache)?;

    let start = Node { factors: vec![root], steps: Vec::new(), loss: T::zero() };
    let mut seen: HashMap<NodeKey, T> = HashMap::new();
    seen.insert(node_key(&start.factors), T::zero());
    let mut queue = VecDeque::new();
    queue.push_back(start);

    let mut best: Option<(i64, T, StepSig, ApproxPlan<T>)> = None;
    while let Some(node) = queue.pop_front() {
        let cost = plan_cost(&node.factors, cost_fn, &mut cache)?;
        let saved = baseline as i64 - cost as i64;
        let sig = step_sig(&node.steps);
        let take = match &best {
            None => true,
            Some((bs, bl, bsig, _)) => better(saved, node.loss, &sig, *bs, *bl, bsig),
        };

        let children = expansions(&node, budget)?;
        if take {
            best = Some((saved, node.loss, sig, finish_plan(node, cost, baseline, cost_fn)));
        }
        for child in children {
            let key = node_key(&child.factors);
            match seen.get(&key) {
                Some(&old) if child.loss >= old - T::of(1e-12) => continue,
                _ => {
                    seen.insert(key, child.loss);
                    queue.push_back(child);
                }
            }
        }
    }
    Ok(best.expect("root plan always feasible").3)
}

/// Exhaustive ordered-sequence enumeration under the same budget and
/// ranking; exponential, refused above 6 qubits.
pub fn brute_force_plans<T: Real>(
    psi: &StateVector<T>,
    budget: T,
    cost_fn: CostFn,
) -> Result<ApproxPlan<T>> {
    check_budget(budget)?;
    if psi.n > 6 {
        return Err(Error::ResourceLimit(format!(
            "exhaustive plan enumeration capped at 6 qubits, got {}",
            psi.n
        )));
    }
    let mut cache = RealizedCache::new();
    let root = FactorState { qubits: (0..psi.n).collect(), state: psi.clone() };
    let baseline = factor_cost(&root, cost_fn, &mut cache)?;
    let start = Node { factors: vec![root], steps: Vec::new(), loss: T::zero() };

    let mut best: Option<(i64, T, StepSig, ApproxPlan<T>)> = None;
    let mut stack = vec![start];
    while let Some(node) = stack.pop() {
        let cost = plan_cost(&node.factors, cost_fn, &mut cache)?;
        let saved = baseline as i64 - cost as i64;
        let sig = step_sig(&node.steps);
        let take = match &best {
            None => true,
            Some((bs, bl, bsig, _)) => better(saved, node.loss, &sig, *bs, *bl, bsig),
        };
        let children = expansions(&node, budget)?;
        if take {
            best = Some((saved, node.loss, sig, finish_plan(node, cost, baseline, cost_fn)));
        }
        stack.extend(children);
    }
    Ok(best.expect("root plan always feasible").3)
}

/// Synthesizes each factor exactly and lays them side by side.
pub fn synth_plan<T: Real>(plan: &ApproxPlan<T>) -> Result<Circuit<T>> {
    let n: usize = plan.factors.iter().map(|f| f.qubits.len()).sum();
    let mut all: Vec<usize> = plan.factors.iter().flat_map(|f| f.qubits.iter().copied()).collect();
    all.sort_unstable();
    if all.iter().enumerate().any(|(i, &q)| i != q) {
        return Err(Error::InvalidInput("factors must partition the register".into()));
    }
    let mut order: Vec<&FactorState<T>> = plan.factors.iter().collect();
    order.sort_by_key(|f| f.qubits[0]);
    let mut circ = Circuit::new(n);
    for f in order {
        let (c, _) = lrsp(&f.state, &LrspConfig::default())?;
        circ.append_mapped(&c, &f.qubits);
    }
    Ok(circ)
}
