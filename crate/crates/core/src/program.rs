//! Block-structured programs of preparations, gates and product-observable
//! measurements, executed on a state vector with Pauli-frame feed-forward.
//!
//! Teleportation schedules are programs without gate operations; the
//! circuit-level primitive catalog uses gates as well.

use std::collections::BTreeMap;

use crate::linalg::{Mat2, Pauli, UnitaryMatrix};
use crate::pauli::{frame_update, FrameError, OutcomeRecord, PauliFrame, Primitive, PrimitiveKind};
use crate::statevec::{Factor, ObservableSpec, Pick, PrepKind, StateError, StateVector, TrialRng};

/// A qubit named relative to a block: a logical wire or a block-local ancilla.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QubitRef {
    Wire(usize),
    Anc(usize),
}

/// Basis rotation of an observable factor, `conj† · P · conj`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Conj {
    Fixed(Mat2),
    /// `base · Q† · Z^b X^a`: absorbs the wire's frame `X^a Z^b` and its
    /// queued non-Pauli byproduct `Q`.
    Adaptive { base: Mat2, wire: usize },
}

/// One factor of a measured product observable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObsFactor {
    pub at: QubitRef,
    pub pauli: Pauli,
    pub conj: Option<Conj>,
}

impl ObsFactor {
    pub fn plain(at: QubitRef, pauli: Pauli) -> Self {
        ObsFactor { at, pauli, conj: None }
    }

    pub fn adaptive(at: QubitRef, pauli: Pauli, base: Mat2, wire: usize) -> Self {
        ObsFactor { at, pauli, conj: Some(Conj::Adaptive { base, wire }) }
    }
}

/// Gate applied inside a program.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateOp {
    Fixed(UnitaryMatrix),
    /// `X_{(−1)^b θ}` or `Z_{(−1)^a θ}` on the wire's current qubit.
    AdaptiveRot { axis: Pauli, theta: f64, wire: usize },
    /// `base · Q† · Z^b X^a`.
    AdaptiveUnitary { base: Mat2, wire: usize },
}

/// Program operation.
#[derive(Clone, Debug, PartialEq)]
pub enum Op {
    /// Fresh ancillas. `CzPlusPlus` is made by measuring `X⊗Z` on `|0⟩|+⟩`,
    /// leaving a known `Z^e` on the first ancilla.
    Prep { kind: PrepKind, at: Vec<QubitRef> },
    Gate { at: Vec<QubitRef>, gate: Box<GateOp> },
    Measure { factors: Vec<ObsFactor>, name: String },
    /// Drops qubits that are no longer entangled with the register.
    Release { at: Vec<QubitRef> },
}

/// Queues `base† Z^{Σ outcomes} base` onto a wire's pending byproduct.
#[derive(Clone, Debug, PartialEq)]
pub struct QueueUpdate {
    pub wire: usize,
    pub base: Mat2,
    pub outcomes: Vec<String>,
}

/// Operations realizing one primitive, followed by its frame update.
#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub kind: PrimitiveKind,
    pub wires: Vec<usize>,
    pub ancillas: usize,
    pub ops: Vec<Op>,
    /// Where each wire lives after the block.
    pub dests: Vec<QubitRef>,
    pub queue: Vec<QueueUpdate>,
    pub clifford: Option<Mat2>,
}

impl Block {
    pub fn new(kind: PrimitiveKind, wires: Vec<usize>, ancillas: usize) -> Self {
        let dests = wires.iter().map(|&w| QubitRef::Wire(w)).collect();
        Block { kind, wires, ancillas, ops: Vec::new(), dests, queue: Vec::new(), clifford: None }
    }

    pub fn op(mut self, op: Op) -> Self {
        self.ops.push(op);
        self
    }

    pub fn measure(self, factors: Vec<ObsFactor>, name: &str) -> Self {
        self.op(Op::Measure { factors, name: name.to_string() })
    }

    pub fn prep(self, kind: PrepKind, at: Vec<QubitRef>) -> Self {
        self.op(Op::Prep { kind, at })
    }

    pub fn gate(self, at: Vec<QubitRef>, gate: GateOp) -> Self {
        self.op(Op::Gate { at, gate: Box::new(gate) })
    }

    pub fn release(self, at: Vec<QubitRef>) -> Self {
        self.op(Op::Release { at })
    }

    pub fn moving_to(mut self, dests: Vec<QubitRef>) -> Self {
        self.dests = dests;
        self
    }

    /// Number of measurement outcomes the block produces.
    pub fn outcome_count(&self) -> usize {
        self.ops
            .iter()
            .map(|op| match op {
                Op::Measure { .. } => 1,
                Op::Prep { kind: PrepKind::CzPlusPlus, .. } => 1,
                _ => 0,
            })
            .sum()
    }
}

/// Sequence of blocks on `width` logical wires.
#[derive(Clone, Debug, PartialEq)]
pub struct Program {
    pub width: usize,
    pub blocks: Vec<Block>,
}

impl Program {
    pub fn outcome_count(&self) -> usize {
        self.blocks.iter().map(Block::outcome_count).sum()
    }

    pub fn has_gates(&self) -> bool {
        self.blocks.iter().flat_map(|b| &b.ops).any(|op| matches!(op, Op::Gate { .. }))
    }
}

/// Execution failures.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExecError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error("block {block}: {message}")]
    Malformed { block: usize, message: String },
    #[error("forced branch list exhausted at step {0}")]
    BranchesExhausted(usize),
    #[error("input state has {got} qubits, program expects {expected}")]
    InputWidth { got: usize, expected: usize },
}

/// Chooses measurement outcomes.
pub trait Brancher {
    fn pick(&mut self, step: usize) -> Result<Pick, ExecError>;
}

/// Samples outcomes from a seeded stream.
pub struct RandomBranches(pub TrialRng);

impl Brancher for RandomBranches {
    fn pick(&mut self, _step: usize) -> Result<Pick, ExecError> {
        Ok(Pick::Random(self.0.uniform()))
    }
}

/// Forces the listed effective outcomes in step order.
pub struct ForcedBranches(pub Vec<bool>);

impl Brancher for ForcedBranches {
    fn pick(&mut self, step: usize) -> Result<Pick, ExecError> {
        self.0.get(step).map(|&b| Pick::Forced(b)).ok_or(ExecError::BranchesExhausted(step))
    }
}

/// Execution switches.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ExecOptions {
    /// Prepare ancillas with a known Pauli error that commutes with their
    /// later measurements: `X` on `|0⟩`, `Z` on `|+⟩` and on the first
    /// qubit of `Λ(Z)|++⟩`.
    pub inject_prep_errors: bool,
}

/// Outcome of running a program.
#[derive(Clone, Debug)]
pub struct Run {
    /// Wire `w` is qubit `w`.
    pub state: StateVector,
    pub frame: PauliFrame,
    /// Queued non-Pauli byproduct per wire (identity unless pseudo-simulated).
    pub pending: Vec<Mat2>,
    /// Effective outcomes, after known ancilla errors are accounted for.
    pub record: OutcomeRecord,
    /// Raw measured bits.
    pub raw: Vec<bool>,
    /// Probability of the realized branch.
    pub probability: f64,
}

struct Machine<'a> {
    state: StateVector,
    labels: Vec<u64>,
    next_label: u64,
    frame: PauliFrame,
    pending: Vec<Mat2>,
    errors: BTreeMap<u64, Pauli>,
    record: OutcomeRecord,
    raw: Vec<bool>,
    step: usize,
    probability: f64,
    brancher: &'a mut dyn Brancher,
    opts: ExecOptions,
}

fn mul_pauli(p: Pauli, q: Pauli) -> Pauli {
    let (a1, b1) = p.bits();
    let (a2, b2) = q.bits();
    Pauli::from_bits(a1 ^ a2, b1 ^ b2)
}

impl Machine<'_> {
    fn index(&self, label: u64) -> usize {
        self.labels.iter().position(|&l| l == label).expect("live label")
    }

    fn alloc(&mut self, kind: PrepKind) -> Result<Vec<u64>, ExecError> {
        let qs = self.state.prepare(kind)?;
        let mut out = Vec::new();
        for _ in qs {
            self.labels.push(self.next_label);
            out.push(self.next_label);
            self.next_label += 1;
        }
        Ok(out)
    }

    fn add_error(&mut self, label: u64, p: Pauli) {
        let e = self.errors.entry(label).or_insert(Pauli::I);
        *e = mul_pauli(*e, p);
    }

    fn inject(&mut self, label: u64, p: Pauli) -> Result<(), ExecError> {
        let i = self.index(label);
        self.state.apply_pauli(i, p)?;
        self.add_error(label, p);
        Ok(())
    }

    fn resolve(&self, r: QubitRef, anc: &[u64], block: usize) -> Result<u64, ExecError> {
        match r {
            QubitRef::Wire(w) => self.frame.loc.get(w).copied().map(|l| l as u64).ok_or(ExecError::Malformed {
                block,
                message: format!("unknown wire {w}"),
            }),
            QubitRef::Anc(i) => anc.get(i).copied().ok_or(ExecError::Malformed {
                block,
                message: format!("ancilla {i} used before preparation"),
            }),
        }
    }

    fn adaptive(&self, base: &Mat2, wire: usize) -> Mat2 {
        let zx = if self.frame.b[wire] { Pauli::Z.matrix() } else { Mat2::identity() }
            * if self.frame.a[wire] { Pauli::X.matrix() } else { Mat2::identity() };
        *base * self.pending[wire].dagger() * zx
    }

    fn measure(&mut self, factors: &[(u64, Pauli, Option<Mat2>)], name: &str) -> Result<bool, ExecError> {
        let mut flip = false;
        let mut spec = Vec::new();
        for &(label, pauli, conj) in factors {
            if let Some(&e) = self.errors.get(&label) {
                if conj.is_some() && e != Pauli::I {
                    return Err(ExecError::Malformed {
                        block: usize::MAX,
                        message: "known ancilla error on a rotated factor".into(),
                    });
                }
                flip ^= e.anticommutes(pauli);
            }
            spec.push(Factor { qubit: self.index(label), pauli, conj });
        }
        let pick = match self.brancher.pick(self.step)? {
            Pick::Forced(eff) => Pick::Forced(eff ^ flip),
            other => other,
        };
        let (bit, p) = self.state.measure(&ObservableSpec::new(spec), pick)?;
        self.probability *= p;
        self.raw.push(bit);
        self.record.push(self.step, name, bit ^ flip);
        self.step += 1;
        Ok(bit ^ flip)
    }

    fn release(&mut self, labels: &[u64]) -> Result<(), ExecError> {
        let idx: Vec<usize> = labels.iter().map(|&l| self.index(l)).collect();
        self.state.factor_out(&idx)?;
        self.labels.retain(|l| !labels.contains(l));
        for l in labels {
            self.errors.remove(l);
        }
        Ok(())
    }

    fn run_block(&mut self, bi: usize, block: &Block) -> Result<(), ExecError> {
        let mut anc: Vec<u64> = Vec::new();
        let mut local = OutcomeRecord::new();
        let ancilla_slot = |r: &QubitRef| match r {
            QubitRef::Anc(i) => Ok(*i),
            QubitRef::Wire(_) => Err(ExecError::Malformed { block: bi, message: "prep on a wire".into() }),
        };
        for op in &block.ops {
            match op {
                Op::Prep { kind, at } => {
                    let slots = at.iter().map(ancilla_slot).collect::<Result<Vec<_>, _>>()?;
                    let labels = match kind {
                        PrepKind::CzPlusPlus => {
                            let a = self.alloc(PrepKind::Zero)?[0];
                            let b = self.alloc(PrepKind::Plus)?[0];
                            let e = self.measure(&[(a, Pauli::X, None), (b, Pauli::Z, None)], "e")?;
                            local.push(self.step - 1, "e", e);
                            if e {
                                self.add_error(a, Pauli::Z);
                            }
                            if self.opts.inject_prep_errors {
                                self.inject(a, Pauli::Z)?;
                            }
                            vec![a, b]
                        }
                        _ => {
                            let labels = self.alloc(*kind)?;
                            if self.opts.inject_prep_errors {
                                match kind {
                                    PrepKind::Zero => self.inject(labels[0], Pauli::X)?,
                                    PrepKind::Plus => self.inject(labels[0], Pauli::Z)?,
                                    _ => {}
                                }
                            }
                            labels
                        }
                    };
                    if slots.len() != labels.len() {
                        return Err(ExecError::Malformed { block: bi, message: "prep arity".into() });
                    }
                    for (s, l) in slots.into_iter().zip(labels) {
                        if anc.len() <= s {
                            anc.resize(s + 1, u64::MAX);
                        }
                        anc[s] = l;
                    }
                }
                Op::Gate { at, gate } => {
                    let labels = at.iter().map(|r| self.resolve(*r, &anc, bi)).collect::<Result<Vec<_>, _>>()?;
                    let idx: Vec<usize> = labels.iter().map(|&l| self.index(l)).collect();
                    let u = match **gate {
                        GateOp::Fixed(u) => u,
                        GateOp::AdaptiveRot { axis, theta, wire } => {
                            let (sign_bit, m) = match axis {
                                Pauli::X => (self.frame.b[wire], Mat2::xrot as fn(f64) -> Mat2),
                                _ => (self.frame.a[wire], Mat2::zrot as fn(f64) -> Mat2),
                            };
                            UnitaryMatrix::One(m(if sign_bit { -theta } else { theta }))
                        }
                        GateOp::AdaptiveUnitary { base, wire } => UnitaryMatrix::One(self.adaptive(&base, wire)),
                    };
                    self.state.apply_unitary(&idx, &u)?;
                }
                Op::Measure { factors, name } => {
                    let mut resolved = Vec::new();
                    for f in factors {
                        let l = self.resolve(f.at, &anc, bi)?;
                        let conj = f.conj.map(|c| match c {
                            Conj::Fixed(m) => m,
                            Conj::Adaptive { base, wire } => self.adaptive(&base, wire),
                        });
                        resolved.push((l, f.pauli, conj));
                    }
                    let bit = self.measure(&resolved, name)?;
                    local.push(self.step - 1, name.clone(), bit);
                }
                Op::Release { at } => {
                    let labels = at.iter().map(|r| self.resolve(*r, &anc, bi)).collect::<Result<Vec<_>, _>>()?;
                    self.release(&labels)?;
                }
            }
        }
        let dests = block.dests.iter().map(|r| self.resolve(*r, &anc, bi)).collect::<Result<Vec<_>, _>>()?;
        let prim = Primitive {
            kind: block.kind,
            wires: block.wires.clone(),
            dests: dests.iter().map(|&l| l as usize).collect(),
            clifford: block.clifford,
        };
        self.frame = frame_update(&self.frame, &prim, &local)?;
        for q in &block.queue {
            let mut parity = false;
            for n in &q.outcomes {
                parity ^= local.require(n)?;
            }
            if parity {
                let byproduct = q.base.dagger() * Pauli::Z.matrix() * q.base;
                self.pending[q.wire] = self.pending[q.wire] * byproduct;
            }
        }
        for (&w, &l) in block.wires.iter().zip(&dests) {
            if let Some(e) = self.errors.remove(&l) {
                let (a, b) = e.bits();
                self.frame.a[w] ^= a;
                self.frame.b[w] ^= b;
            }
        }
        Ok(())
    }
}

/// Runs `program` on `input` (wire `w` on qubit `w`) carrying the Pauli
/// frame `frame`, i.e. the physical input is `frame · ψ`.
pub fn run_program(
    program: &Program,
    input: &StateVector,
    frame: &PauliFrame,
    brancher: &mut dyn Brancher,
    opts: ExecOptions,
) -> Result<Run, ExecError> {
    if input.num_qubits() != program.width || frame.width() != program.width {
        return Err(ExecError::InputWidth { got: input.num_qubits(), expected: program.width });
    }
    let mut f = frame.clone();
    f.loc = (0..program.width).collect();
    let mut m = Machine {
        state: input.clone(),
        labels: (0..program.width as u64).collect(),
        next_label: program.width as u64,
        frame: f,
        pending: vec![Mat2::identity(); program.width],
        errors: BTreeMap::new(),
        record: OutcomeRecord::new(),
        raw: Vec::new(),
        step: 0,
        probability: 1.0,
        brancher,
        opts,
    };
    for (bi, block) in program.blocks.iter().enumerate() {
        m.run_block(bi, block)?;
    }
    if m.labels.len() != program.width {
        return Err(ExecError::Malformed {
            block: program.blocks.len(),
            message: format!("{} qubits live at the end, expected {}", m.labels.len(), program.width),
        });
    }
    let order: Vec<usize> = (0..program.width).map(|w| m.index(m.frame.loc[w] as u64)).collect();
    let state = m.state.reorder(&order)?;
    let mut frame = m.frame;
    frame.loc = (0..program.width).collect();
    Ok(Run { state, frame, pending: m.pending, record: m.record, raw: m.raw, probability: m.probability })
}

/// Runs every outcome branch with nonzero probability, in lexicographic
/// order of the effective outcome bits.
pub fn enumerate_branches(
    program: &Program,
    input: &StateVector,
    frame: &PauliFrame,
    opts: ExecOptions,
) -> Result<Vec<Run>, ExecError> {
    let k = program.outcome_count();
    let mut runs = Vec::new();
    for mask in 0..(1u64 << k) {
        let bits: Vec<bool> = (0..k).map(|i| (mask >> (k - 1 - i)) & 1 == 1).collect();
        match run_program(program, input, frame, &mut ForcedBranches(bits), opts) {
            Ok(r) => runs.push(r),
            Err(ExecError::State(StateError::ImpossibleBranch { .. })) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(runs)
}
