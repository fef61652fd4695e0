pub mod qasm;
pub mod sampling;

use num_complex::Complex;

use crate::real::Real;
use crate::state::StateVector;

/// Angle below which a rotation is dropped as identity.
pub fn elide_tol<T: Real>() -> T {
    T::of(1e-12).max(T::epsilon() * T::of(8.0))
}

/// Wraps into (-pi, pi].
pub fn wrap_angle<T: Real>(x: T) -> T {
    let two_pi = T::of(std::f64::consts::TAU);
    let mut y = x - two_pi * (x / two_pi).round();
    if y <= -T::of(std::f64::consts::PI) {
        y += two_pi;
    }
    y
}

#[derive(Clone, Debug, PartialEq)]
pub enum Gate<T> {
    /// U(theta,phi,lambda) =
    ///   [[cos(theta/2),            -e^{i lambda} sin(theta/2)],
    ///    [e^{i phi} sin(theta/2),   e^{i(phi+lambda)} cos(theta/2)]]
    U { q: usize, theta: T, phi: T, lambda: T },
    Cx { control: usize, target: usize },
}

impl<T: Real> Gate<T> {
    pub fn touches(&self, qubit: usize) -> bool {
        match *self {
            Gate::U { q, .. } => q == qubit,
            Gate::Cx { control, target } => control == qubit || target == qubit,
        }
    }

    pub fn max_qubit(&self) -> usize {
        match *self {
            Gate::U { q, .. } => q,
            Gate::Cx { control, target } => control.max(target),
        }
    }

    /// 2x2 matrix entries (u00, u01, u10, u11) of a one-qubit gate.
    pub fn unitary2(&self) -> Option<[Complex<T>; 4]> {
        match *self {
            Gate::U { theta, phi, lambda, .. } => {
                let half = theta / T::of(2.0);
                let (c, s) = (half.cos(), half.sin());
                let e = |a: T| Complex::new(a.cos(), a.sin());
                Some([
                    Complex::new(c, T::zero()),
                    -e(lambda) * s,
                    e(phi) * s,
                    e(phi + lambda) * c,
                ])
            }
            Gate::Cx { .. } => None,
        }
    }

    pub fn inverse(&self) -> Self {
        match *self {
            Gate::U { q, theta, phi, lambda } => {
                Gate::U { q, theta: -theta, phi: -lambda, lambda: -phi }
            }
            Gate::Cx { control, target } => Gate::Cx { control, target },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit<T> {
    pub n: usize,
    pub gates: Vec<Gate<T>>,
    pub global_phase: T,
}

impl<T: Real> Circuit<T> {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        Self { n, gates: Vec::new(), global_phase: T::zero() }
    }

    pub fn push_u(&mut self, q: usize, theta: T, phi: T, lambda: T) {
        assert!(q < self.n);
        let tol = elide_tol::<T>();
        if theta.abs() < tol && wrap_angle(phi + lambda).abs() < tol {
            return;
        }
        self.gates.push(Gate::U { q, theta, phi, lambda });
    }

    pub fn push_ry(&mut self, q: usize, theta: T) {
        self.push_u(q, theta, T::zero(), T::zero());
    }

    /// Rz(phi) = e^{-i phi/2} U(0,0,phi); the prefactor goes to globalPhase.
    pub fn push_rz(&mut self, q: usize, phi: T) {
        if phi.abs() < elide_tol::<T>() {
            return;
        }
        self.global_phase -= phi / T::of(2.0);
        self.push_u(q, T::zero(), T::zero(), phi);
    }

    pub fn push_cx(&mut self, control: usize, target: usize) {
        assert!(control < self.n && target < self.n && control != target);
        self.gates.push(Gate::Cx { control, target });
    }

    pub fn add_global_phase(&mut self, p: T) {
        self.global_phase += p;
    }

    pub fn append(&mut self, other: &Self) {
        let map: Vec<usize> = (0..other.n).collect();
        self.append_mapped(other, &map);
    }

    /// Appends `other` with its qubit i placed on `map[i]`.
    pub fn append_mapped(&mut self, other: &Self, map: &[usize]) {
        assert_eq!(map.len(), other.n);
        assert!(map.iter().all(|&q| q < self.n));
        for g in &other.gates {
            match *g {
                Gate::U { q, theta, phi, lambda } => {
                    self.gates.push(Gate::U { q: map[q], theta, phi, lambda })
                }
                Gate::Cx { control, target } => {
                    self.gates.push(Gate::Cx { control: map[control], target: map[target] })
                }
            }
        }
        self.global_phase += other.global_phase;
    }

    /// Reversed gate order with each gate inverted; globalPhase negated.
    pub fn inverse(&self) -> Self {
        Self {
            n: self.n,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
            global_phase: -self.global_phase,
        }
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    pub fn cnot_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::Cx { .. })).count()
    }

    /// Critical path length with as-soon-as-possible scheduling.
    pub fn depth(&self) -> usize {
        let mut frontier = vec![0usize; self.n];
        for g in &self.gates {
            match *g {
                Gate::U { q, .. } => frontier[q] += 1,
                Gate::Cx { control, target } => {
                    let layer = frontier[control].max(frontier[target]) + 1;
                    frontier[control] = layer;
                    frontier[target] = layer;
                }
            }
        }
        frontier.into_iter().max().unwrap_or(0)
    }

    /// Drops identity rotations and cancels adjacent equal CNOT pairs
    /// (adjacent up to gates on disjoint qubits), to a fixpoint.
    pub fn simplify(&mut self) {
        let tol = elide_tol::<T>();
        loop {
            let mut gates: Vec<Option<Gate<T>>> = std::mem::take(&mut self.gates)
                .into_iter()
                .map(|g| match g {
                    Gate::U { theta, phi, lambda, .. }
                        if theta.abs() < tol && wrap_angle(phi + lambda).abs() < tol =>
                    {
                        None
                    }
                    g => Some(g),
                })
                .collect();
            let mut changed = gates.iter().any(|g| g.is_none());
            for i in 0..gates.len() {
                let Some(Gate::Cx { control, target }) = gates[i].clone() else { continue };
                for j in i + 1..gates.len() {
                    let Some(ref g) = gates[j] else { continue };
                    if g.touches(control) || g.touches(target) {
                        if *g == (Gate::Cx { control, target }) {
                            gates[i] = None;
                            gates[j] = None;
                            changed = true;
                        }
                        break;
                    }
                }
            }
            self.gates = gates.into_iter().flatten().collect();
            if !changed {
                break;
            }
        }
    }

    pub fn simulate(&self) -> StateVector<T> {
        self.simulate_from(&StateVector::basis(self.n, 0))
    }

    pub fn simulate_from(&self, start: &StateVector<T>) -> StateVector<T> {
        assert_eq!(start.n, self.n);
        let mut amps = start.amplitudes.clone();
        for g in &self.gates {
            apply_gate(&mut amps, self.n, g);
        }
        let gp = Complex::new(self.global_phase.cos(), self.global_phase.sin());
        for a in &mut amps {
            *a = *a * gp;
        }
        StateVector::new_unchecked(self.n, amps)
    }
}

pub(crate) fn apply_gate<T: Real>(amps: &mut [Complex<T>], n: usize, g: &Gate<T>) {
    match *g {
        Gate::U { q, .. } => {
            let [u00, u01, u10, u11] = g.unitary2().unwrap();
            let mask = 1usize << (n - 1 - q);
            for x in 0..amps.len() {
                if x & mask == 0 {
                    let (a0, a1) = (amps[x], amps[x | mask]);
                    amps[x] = u00 * a0 + u01 * a1;
                    amps[x | mask] = u10 * a0 + u11 * a1;
                }
            }
        }
        Gate::Cx { control, target } => {
            let cmask = 1usize << (n - 1 - control);
            let tmask = 1usize << (n - 1 - target);
            for x in 0..amps.len() {
                if x & cmask != 0 && x & tmask == 0 {
                    amps.swap(x, x | tmask);
                }
            }
        }
    }
}
