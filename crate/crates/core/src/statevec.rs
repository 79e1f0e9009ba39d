//! Dense state-vector simulation with Pauli-observable measurements.

use num_complex::Complex;
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::circuit::{Circuit, Gate};
use crate::linalg::{Mat2, Mat4, Pauli, UnitaryMatrix, C};
use crate::scalar::Real;

/// Largest register the simulator will allocate.
pub const MAX_QUBITS: usize = 24;

/// Probability below which a forced branch is rejected.
pub const IMPOSSIBLE_BRANCH: f64 = 1e-14;

/// Simulation failures.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StateError {
    #[error("{qubits} qubits exceed the simulation cap of {cap}")]
    CapExceeded { qubits: usize, cap: usize },
    #[error("qubit {qubit} out of range for {n} qubits")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("forced branch has probability {prob:e}")]
    ImpossibleBranch { prob: f64 },
    #[error("qubit {0} is not in a computational basis state")]
    NotComputational(usize),
    #[error("amplitude vector length {0} is not a power of two")]
    BadLength(usize),
    #[error("observable acts twice on qubit {0}")]
    RepeatedQubit(usize),
}

/// Deterministic random source: one ChaCha8 stream per `(seed, stream)`.
#[derive(Clone, Debug)]
pub struct TrialRng {
    rng: ChaCha8Rng,
}

impl TrialRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        TrialRng { rng }
    }

    /// Uniform sample in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn coin(&mut self) -> bool {
        self.rng.random::<bool>()
    }

    pub fn angle(&mut self) -> f64 {
        self.rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)
    }

    /// Haar-random single-qubit state.
    pub fn qubit_state<T: Real>(&mut self) -> [C<T>; 2] {
        let v: Vec<f64> = (0..4).map(|_| self.normal()).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        [
            Complex::new(T::lit(v[0] / n), T::lit(v[1] / n)),
            Complex::new(T::lit(v[2] / n), T::lit(v[3] / n)),
        ]
    }

    /// Haar-random single-qubit unitary.
    pub fn unitary(&mut self) -> Mat2 {
        let [a, b] = self.qubit_state::<f64>();
        let ph = Complex::from_polar(1.0, self.angle());
        Mat2::new([[a, -b.conj() * ph], [b, a.conj() * ph]])
    }
}

/// How a measurement outcome is selected.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Pick {
    /// Sample with this uniform number in `[0, 1)`.
    Random(f64),
    /// Project onto the given outcome.
    Forced(bool),
}

/// One tensor factor `conj† · P · conj` of a product observable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Factor<T = f64> {
    pub qubit: usize,
    pub pauli: Pauli,
    pub conj: Option<Mat2<T>>,
}

impl<T: Real> Factor<T> {
    pub fn plain(qubit: usize, pauli: Pauli) -> Self {
        Factor { qubit, pauli, conj: None }
    }

    pub fn rotated(qubit: usize, pauli: Pauli, conj: Mat2<T>) -> Self {
        Factor { qubit, pauli, conj: Some(conj) }
    }
}

/// Tensor product of single-qubit observables; outcome `j` is eigenvalue `(−1)^j`.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservableSpec<T = f64> {
    pub factors: Vec<Factor<T>>,
}

impl<T: Real> ObservableSpec<T> {
    pub fn new(factors: Vec<Factor<T>>) -> Self {
        ObservableSpec { factors }
    }

    pub fn single(qubit: usize, pauli: Pauli) -> Self {
        ObservableSpec { factors: vec![Factor::plain(qubit, pauli)] }
    }
}

/// Initial states for fresh qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrepKind {
    Zero,
    Plus,
    /// `(|00⟩ + |11⟩)/√2` on two fresh qubits.
    Bell,
    /// `Λ(Z)|++⟩` on two fresh qubits.
    CzPlusPlus,
}

/// Pure state of `n` qubits; qubit 0 is the least significant index bit.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T = f64> {
    n: usize,
    amps: Vec<C<T>>,
}

fn zero<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

impl<T: Real> StateVector<T> {
    /// `|0…0⟩` on `n` qubits.
    pub fn zeros(n: usize) -> Result<Self, StateError> {
        if n > MAX_QUBITS {
            return Err(StateError::CapExceeded { qubits: n, cap: MAX_QUBITS });
        }
        let mut amps = vec![zero(); 1 << n];
        amps[0] = Complex::new(T::one(), T::zero());
        Ok(StateVector { n, amps })
    }

    pub fn from_amplitudes(amps: Vec<C<T>>) -> Result<Self, StateError> {
        let len = amps.len();
        if !len.is_power_of_two() {
            return Err(StateError::BadLength(len));
        }
        let n = len.trailing_zeros() as usize;
        if n > MAX_QUBITS {
            return Err(StateError::CapExceeded { qubits: n, cap: MAX_QUBITS });
        }
        Ok(StateVector { n, amps })
    }

    /// Tensor product of single-qubit states, `states[q]` on qubit `q`.
    pub fn product(states: &[[C<T>; 2]]) -> Result<Self, StateError> {
        let mut s = StateVector::from_amplitudes(vec![Complex::new(T::one(), T::zero())])?;
        for st in states {
            s.push_qubit(*st)?;
        }
        Ok(s)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amps
    }

    pub fn norm(&self) -> T {
        self.amps.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr()).sqrt()
    }

    pub fn inner(&self, other: &Self) -> C<T> {
        self.amps.iter().zip(&other.amps).fold(zero(), |acc, (a, b)| acc + a.conj() * *b)
    }

    fn check(&self, q: usize) -> Result<(), StateError> {
        if q >= self.n {
            return Err(StateError::QubitOutOfRange { qubit: q, n: self.n });
        }
        Ok(())
    }

    /// Appends a qubit in `state` as the new highest index.
    pub fn push_qubit(&mut self, state: [C<T>; 2]) -> Result<usize, StateError> {
        if self.n + 1 > MAX_QUBITS {
            return Err(StateError::CapExceeded { qubits: self.n + 1, cap: MAX_QUBITS });
        }
        let old = std::mem::take(&mut self.amps);
        let mut amps = Vec::with_capacity(old.len() * 2);
        amps.extend(old.iter().map(|a| *a * state[0]));
        amps.extend(old.iter().map(|a| *a * state[1]));
        self.amps = amps;
        self.n += 1;
        Ok(self.n - 1)
    }

    /// Appends fresh qubits in the given resource state; returns their indices.
    pub fn prepare(&mut self, kind: PrepKind) -> Result<Vec<usize>, StateError> {
        let one = Complex::new(T::one(), T::zero());
        let h = Complex::new(T::FRAC_1_SQRT_2(), T::zero());
        match kind {
            PrepKind::Zero => Ok(vec![self.push_qubit([one, zero()])?]),
            PrepKind::Plus => Ok(vec![self.push_qubit([h, h])?]),
            PrepKind::Bell => {
                let a = self.push_qubit([h, h])?;
                let b = self.push_qubit([one, zero()])?;
                self.apply_2q(a, b, &Mat4::cx())?;
                Ok(vec![a, b])
            }
            PrepKind::CzPlusPlus => {
                let a = self.push_qubit([h, h])?;
                let b = self.push_qubit([h, h])?;
                self.apply_cz(a, b)?;
                Ok(vec![a, b])
            }
        }
    }

    pub fn apply_1q(&mut self, q: usize, u: &Mat2<T>) -> Result<(), StateError> {
        self.check(q)?;
        let bit = 1usize << q;
        let m = &u.m;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
        Ok(())
    }

    /// Applies a 4×4 unitary; `q0` is the high bit of the matrix index.
    pub fn apply_2q(&mut self, q0: usize, q1: usize, u: &Mat4<T>) -> Result<(), StateError> {
        self.check(q0)?;
        self.check(q1)?;
        if q0 == q1 {
            return Err(StateError::RepeatedQubit(q0));
        }
        let (b0, b1) = (1usize << q0, 1usize << q1);
        for i in 0..self.amps.len() {
            if i & b0 == 0 && i & b1 == 0 {
                let idx = [i, i | b1, i | b0, i | b0 | b1];
                let v = idx.map(|k| self.amps[k]);
                for (r, &k) in idx.iter().enumerate() {
                    self.amps[k] = (0..4).fold(zero(), |acc, j| acc + u.m[r][j] * v[j]);
                }
            }
        }
        Ok(())
    }

    pub fn apply_cz(&mut self, a: usize, b: usize) -> Result<(), StateError> {
        self.check(a)?;
        self.check(b)?;
        if a == b {
            return Err(StateError::RepeatedQubit(a));
        }
        let mask = (1usize << a) | (1usize << b);
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *amp = -*amp;
            }
        }
        Ok(())
    }

    pub fn apply_pauli(&mut self, q: usize, p: Pauli) -> Result<(), StateError> {
        if p == Pauli::I {
            return self.check(q);
        }
        self.apply_1q(q, &p.matrix())
    }

    pub fn apply_unitary(&mut self, qubits: &[usize], u: &UnitaryMatrix<T>) -> Result<(), StateError> {
        match (u, qubits) {
            (UnitaryMatrix::One(m), &[q]) => self.apply_1q(q, m),
            (UnitaryMatrix::Two(m), &[a, b]) => self.apply_2q(a, b, m),
            _ => Err(StateError::QubitOutOfRange { qubit: qubits.len(), n: self.n }),
        }
    }

    pub fn apply_gate(&mut self, g: &Gate<T>) -> Result<(), StateError> {
        match *g {
            Gate::Cz(a, b) => self.apply_cz(a, b),
            _ => self.apply_unitary(&g.qubits(), &g.matrix()),
        }
    }

    pub fn apply_circuit(&mut self, c: &Circuit<T>) -> Result<(), StateError> {
        c.gates().iter().try_for_each(|g| self.apply_gate(g))
    }

    fn apply_observable(&self, obs: &ObservableSpec<T>) -> Result<Self, StateError> {
        let mut seen = Vec::new();
        let mut out = self.clone();
        for f in &obs.factors {
            if seen.contains(&f.qubit) {
                return Err(StateError::RepeatedQubit(f.qubit));
            }
            seen.push(f.qubit);
            match f.conj {
                Some(u) => out.apply_1q(f.qubit, &(u.dagger() * f.pauli.matrix() * u))?,
                None => out.apply_pauli(f.qubit, f.pauli)?,
            }
        }
        Ok(out)
    }

    /// Projective measurement of a product observable; returns the outcome
    /// bit and its probability, leaving the normalized post-measurement state.
    pub fn measure(&mut self, obs: &ObservableSpec<T>, pick: Pick) -> Result<(bool, T), StateError> {
        let flipped = self.apply_observable(obs)?;
        let half = T::lit(0.5);
        let p0 = self
            .amps
            .iter()
            .zip(&flipped.amps)
            .fold(T::zero(), |acc, (a, b)| acc + ((*a + *b) * half).norm_sqr());
        let p0 = p0.max(T::zero()).min(T::one());
        let bit = match pick {
            Pick::Random(u) => T::lit(u) >= p0,
            Pick::Forced(b) => b,
        };
        let p = if bit { T::one() - p0 } else { p0 };
        if p.to_f64().unwrap() < IMPOSSIBLE_BRANCH {
            return Err(StateError::ImpossibleBranch { prob: p.to_f64().unwrap() });
        }
        let scale = half / p.sqrt();
        for (a, b) in self.amps.iter_mut().zip(&flipped.amps) {
            *a = if bit { (*a - *b) * scale } else { (*a + *b) * scale };
        }
        Ok((bit, p))
    }

    /// Removes qubit `q`, which must hold a computational basis state.
    /// Returns the bit value it held.
    pub fn discard(&mut self, q: usize) -> Result<bool, StateError> {
        self.check(q)?;
        let bit = 1usize << q;
        let p1 = self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit != 0)
            .fold(T::zero(), |acc, (_, a)| acc + a.norm_sqr());
        let tol = T::lit(1e-9);
        let value = if p1 <= tol {
            false
        } else if p1 >= T::one() - tol {
            true
        } else {
            return Err(StateError::NotComputational(q));
        };
        let low = bit - 1;
        let amps = (0..self.amps.len() / 2)
            .map(|i| {
                let full = (i & low) | ((i & !low) << 1) | if value { bit } else { 0 };
                self.amps[full]
            })
            .collect();
        self.amps = amps;
        self.n -= 1;
        Ok(value)
    }

    /// Removes `qubits`, which must be unentangled with the rest of the
    /// register. Returns their joint state, indexed with `qubits[0]` as the
    /// least significant bit.
    pub fn factor_out(&mut self, qubits: &[usize]) -> Result<Vec<C<T>>, StateError> {
        for (i, &q) in qubits.iter().enumerate() {
            self.check(q)?;
            if qubits[..i].contains(&q) {
                return Err(StateError::RepeatedQubit(q));
            }
        }
        let k = qubits.len();
        let rest: Vec<usize> = (0..self.n).filter(|q| !qubits.contains(q)).collect();
        let split = |i: usize| {
            let s = qubits.iter().enumerate().fold(0, |acc, (j, &q)| acc | (((i >> q) & 1) << j));
            let r = rest.iter().enumerate().fold(0, |acc, (j, &q)| acc | (((i >> q) & 1) << j));
            (s, r)
        };
        let (ns, nr) = (1usize << k, 1usize << rest.len());
        let mut m = vec![zero::<T>(); ns * nr];
        for (i, a) in self.amps.iter().enumerate() {
            let (s, r) = split(i);
            m[s * nr + r] = *a;
        }
        let col_norm = |r: usize| (0..ns).fold(T::zero(), |acc, s| acc + m[s * nr + r].norm_sqr());
        let best = (0..nr).max_by(|&x, &y| col_norm(x).partial_cmp(&col_norm(y)).unwrap()).unwrap();
        let bn = col_norm(best).sqrt();
        let chi: Vec<C<T>> = (0..ns).map(|s| m[s * nr + best] / bn).collect();
        let remaining: Vec<C<T>> = (0..nr)
            .map(|r| (0..ns).fold(zero(), |acc, s| acc + chi[s].conj() * m[s * nr + r]))
            .collect();
        let mut residual = T::zero();
        for s in 0..ns {
            for r in 0..nr {
                residual = residual + (m[s * nr + r] - chi[s] * remaining[r]).norm_sqr();
            }
        }
        if residual > T::lit(1e-12) {
            return Err(StateError::NotComputational(qubits[0]));
        }
        self.amps = remaining;
        self.n -= k;
        Ok(chi)
    }

    /// Permutes qubits: new qubit `i` is old qubit `order[i]`.
    pub fn reorder(&self, order: &[usize]) -> Result<Self, StateError> {
        if order.len() != self.n {
            return Err(StateError::QubitOutOfRange { qubit: order.len(), n: self.n });
        }
        for &q in order {
            self.check(q)?;
        }
        let mut amps = vec![zero(); self.amps.len()];
        for (i, a) in self.amps.iter().enumerate() {
            let j = order.iter().enumerate().fold(0, |acc, (new, &old)| acc | (((i >> old) & 1) << new));
            amps[j] = *a;
        }
        Ok(StateVector { n: self.n, amps })
    }

    /// Converts to another scalar precision.
    pub fn cast<U: Real>(&self) -> StateVector<U> {
        let amps = self
            .amps
            .iter()
            .map(|a| Complex::new(U::lit(a.re.to_f64().unwrap()), U::lit(a.im.to_f64().unwrap())))
            .collect();
        StateVector { n: self.n, amps }
    }
}

/// `|⟨a|b⟩|`, insensitive to global phase.
pub fn fidelity<T: Real>(a: &StateVector<T>, b: &StateVector<T>) -> T {
    if a.n != b.n {
        return T::zero();
    }
    a.inner(b).norm()
}

/// Random product input state on `n` qubits.
pub fn random_product_state(n: usize, rng: &mut TrialRng) -> Result<StateVector, StateError> {
    let states: Vec<[C<f64>; 2]> = (0..n).map(|_| rng.qubit_state()).collect();
    StateVector::product(&states)
}

/// Random (generally entangled) state: a product state scrambled by a
/// layer of random single-qubit unitaries and CZs.
pub fn random_state(n: usize, rng: &mut TrialRng) -> Result<StateVector, StateError> {
    let mut s = random_product_state(n, rng)?;
    for _ in 0..2 {
        for a in 0..n.saturating_sub(1) {
            s.apply_cz(a, a + 1)?;
        }
        for q in 0..n {
            let u = rng.unitary();
            s.apply_1q(q, &u)?;
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qubit_zero_is_least_significant() {
        let mut s = StateVector::<f64>::zeros(2).unwrap();
        s.apply_pauli(0, Pauli::X).unwrap();
        assert!((s.amplitudes()[1].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn measurement_probabilities_and_collapse() {
        let mut s = StateVector::<f64>::zeros(1).unwrap();
        s.apply_1q(0, &Mat2::hadamard()).unwrap();
        let (bit, p) = s.measure(&ObservableSpec::single(0, Pauli::Z), Pick::Forced(true)).unwrap();
        assert!(bit && (p - 0.5).abs() < 1e-12);
        assert!((s.amplitudes()[1].norm() - 1.0).abs() < 1e-12);
        let e = s.measure(&ObservableSpec::single(0, Pauli::Z), Pick::Forced(false));
        assert!(matches!(e, Err(StateError::ImpossibleBranch { .. })));
    }

    #[test]
    fn bell_state_has_correlated_parities() {
        let mut s = StateVector::<f64>::zeros(0).unwrap();
        let q = s.prepare(PrepKind::Bell).unwrap();
        for p in [Pauli::X, Pauli::Z] {
            let obs = ObservableSpec::new(vec![Factor::plain(q[0], p), Factor::plain(q[1], p)]);
            let mut t = s.clone();
            let (bit, prob) = t.measure(&obs, Pick::Random(0.3)).unwrap();
            assert!(!bit && (prob - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rotated_factor_measures_conjugated_observable() {
        let mut s = StateVector::<f64>::zeros(1).unwrap();
        s.apply_1q(0, &Mat2::hadamard()).unwrap();
        let obs = ObservableSpec::new(vec![Factor::rotated(0, Pauli::Z, Mat2::hadamard())]);
        let (bit, p) = s.measure(&obs, Pick::Random(0.99)).unwrap();
        assert!(!bit && (p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn discard_keeps_remaining_order() {
        let mut s = StateVector::<f64>::zeros(3).unwrap();
        s.apply_pauli(2, Pauli::X).unwrap();
        s.apply_pauli(1, Pauli::X).unwrap();
        assert!(s.discard(1).unwrap());
        assert_eq!(s.num_qubits(), 2);
        assert!((s.amplitudes()[2].norm() - 1.0).abs() < 1e-12);
        s.apply_1q(0, &Mat2::hadamard()).unwrap();
        assert_eq!(s.discard(0), Err(StateError::NotComputational(0)));
    }

    #[test]
    fn factor_out_bell_pair() {
        let mut s = StateVector::<f64>::zeros(1).unwrap();
        s.apply_1q(0, &Mat2::hadamard()).unwrap();
        let q = s.prepare(PrepKind::Bell).unwrap();
        let chi = s.factor_out(&q).unwrap();
        assert_eq!(s.num_qubits(), 1);
        assert!((chi[0].norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((s.amplitudes()[1].norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        let mut e = StateVector::<f64>::zeros(0).unwrap();
        let q = e.prepare(PrepKind::Bell).unwrap();
        assert!(e.factor_out(&q[..1]).is_err());
    }

    #[test]
    fn reorder_moves_qubits() {
        let mut s = StateVector::<f64>::zeros(3).unwrap();
        s.apply_pauli(0, Pauli::X).unwrap();
        let t = s.reorder(&[2, 0, 1]).unwrap();
        assert!((t.amplitudes()[2].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(StateVector::<f64>::zeros(25), Err(StateError::CapExceeded { .. })));
    }

    #[test]
    fn rng_streams_are_reproducible() {
        let mut a = TrialRng::new(7, 3);
        let mut b = TrialRng::new(7, 3);
        let mut c = TrialRng::new(7, 4);
        let (x, y, z) = (a.uniform(), b.uniform(), c.uniform());
        assert_eq!(x, y);
        assert_ne!(x, z);
    }
}
