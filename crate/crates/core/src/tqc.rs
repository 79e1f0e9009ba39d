//! Teleportation-based (measurement-only) compilation: circuits become
//! schedules of ancilla preparations and one- and two-qubit measurements.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, CompositeForm, ElementaryOp};
use crate::linalg::{Mat2, Pauli};
use crate::pauli::{PauliFrame, PrimitiveKind};
use crate::program::{
    run_program, Block, Brancher, Conj, ExecError, ExecOptions, ObsFactor, Op, Program, QueueUpdate, QubitRef, Run,
};
use crate::statevec::{Factor, ObservableSpec, PrepKind, StateError, StateVector};

const A0: QubitRef = QubitRef::Anc(0);
const A1: QubitRef = QubitRef::Anc(1);

/// Single-qubit gate simulation style.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum SingleStyle {
    /// Ancilla `|0⟩`, measure `(U′†XU′)⊗X` then `U′†ZU′`.
    #[default]
    ZTeleport,
    /// Ancilla `|+⟩`, measure `(U′†ZU′)⊗Z` then `U′†XU′`.
    XTeleport,
}

/// CZ simulation style.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum CzStyle {
    /// Two ancillas in `Λ(Z)|++⟩`, depth 3.
    TwoAncilla,
    /// One ancilla, depth 4.
    #[default]
    OneAncilla,
}

/// Full simulation (every gate) or combined pseudo-simulation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TqcMode {
    Full,
    Pseudo,
}

/// Measurement-resource totals of a schedule.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resources {
    pub ancillas: usize,
    pub two_qubit: usize,
    pub single_qubit: usize,
    pub depth: usize,
}

impl Resources {
    /// Closed form for pseudo-simulation of `m` CZs on `n` wires.
    pub fn pseudo_formula(m: usize, n: usize) -> Self {
        Resources { ancillas: m, two_qubit: 2 * m, single_qubit: 2 * m + n, depth: 0 }
    }

    /// Closed form for full simulation of `m` CZs on `n` wires.
    pub fn full_formula(m: usize, n: usize) -> Self {
        Resources { ancillas: 3 * m, two_qubit: 4 * m, single_qubit: 6 * m + n, depth: 0 }
    }

    pub fn counts(&self) -> (usize, usize, usize) {
        (self.ancillas, self.two_qubit, self.single_qubit)
    }
}

/// `|0⟩` ancilla; `M_{(U′†XU′)⊗X}` → c; `M_{U′†ZU′}` → k; output `X^k Z^c U ψ` on the ancilla.
pub fn uzttqc_block(wire: usize, u: Mat2) -> Block {
    let w = QubitRef::Wire(wire);
    Block::new(PrimitiveKind::UZTeleportTqc, vec![wire], 1)
        .prep(PrepKind::Zero, vec![A0])
        .measure(vec![ObsFactor::adaptive(w, Pauli::X, u, wire), ObsFactor::plain(A0, Pauli::X)], "c")
        .measure(vec![ObsFactor::adaptive(w, Pauli::Z, u, wire)], "k")
        .release(vec![w])
        .moving_to(vec![A0])
}

/// `|+⟩` ancilla; `M_{(U′†ZU′)⊗Z}` → d; `M_{U′†XU′}` → k; output `Z^k X^d U ψ` on the ancilla.
pub fn uxttqc_block(wire: usize, u: Mat2) -> Block {
    let w = QubitRef::Wire(wire);
    Block::new(PrimitiveKind::UXTeleportTqc, vec![wire], 1)
        .prep(PrepKind::Plus, vec![A0])
        .measure(vec![ObsFactor::adaptive(w, Pauli::Z, u, wire), ObsFactor::plain(A0, Pauli::Z)], "d")
        .measure(vec![ObsFactor::adaptive(w, Pauli::X, u, wire)], "k")
        .release(vec![w])
        .moving_to(vec![A0])
}

/// CZ through a measured `Λ(Z)|++⟩` pair.
pub fn xtcz4tqc_block(p: usize, q: usize) -> Block {
    let (wp, wq) = (QubitRef::Wire(p), QubitRef::Wire(q));
    Block::new(PrimitiveKind::CzTwoAncillaTqc, vec![p, q], 2)
        .prep(PrepKind::CzPlusPlus, vec![A0, A1])
        .measure(vec![ObsFactor::plain(wp, Pauli::Z), ObsFactor::plain(A0, Pauli::X)], "d1")
        .measure(vec![ObsFactor::plain(A1, Pauli::X), ObsFactor::plain(wq, Pauli::Z)], "d2")
        .measure(vec![ObsFactor::plain(A0, Pauli::Z)], "k1")
        .measure(vec![ObsFactor::plain(A1, Pauli::Z)], "k2")
        .release(vec![A0])
        .release(vec![A1])
}

/// CZ through one `|+⟩` ancilla.
pub fn xtcz5tqc_block(p: usize, q: usize) -> Block {
    let (wp, wq) = (QubitRef::Wire(p), QubitRef::Wire(q));
    Block::new(PrimitiveKind::CzOneAncillaTqc, vec![p, q], 1)
        .prep(PrepKind::Plus, vec![A0])
        .measure(vec![ObsFactor::plain(wp, Pauli::Z), ObsFactor::plain(A0, Pauli::Z)], "d1")
        .measure(vec![ObsFactor::plain(A0, Pauli::X), ObsFactor::plain(wq, Pauli::Z)], "d2")
        .measure(vec![ObsFactor::plain(A0, Pauli::Z)], "k2")
        .release(vec![A0])
}

/// Composite gate `(U†⊗V†)Λ(Z)(U⊗V)` by one-ancilla CZ measured in bases
/// rotated by `U`, `V`, the frame and the queued byproducts. The non-Pauli
/// byproducts `U†Z^{d2}U` and `V†Z^{d1+k2}V` are queued.
pub fn pseudo_cz_block(p: usize, q: usize, u: Mat2, v: Mat2) -> Block {
    let (wp, wq) = (QubitRef::Wire(p), QubitRef::Wire(q));
    let mut b = Block::new(PrimitiveKind::RotatedCz, vec![p, q], 1)
        .prep(PrepKind::Plus, vec![A0])
        .measure(vec![ObsFactor::adaptive(wp, Pauli::Z, u, p), ObsFactor::plain(A0, Pauli::Z)], "d1")
        .measure(vec![ObsFactor::plain(A0, Pauli::X), ObsFactor::adaptive(wq, Pauli::Z, v, q)], "d2")
        .measure(vec![ObsFactor::plain(A0, Pauli::Z)], "k2")
        .release(vec![A0]);
    b.queue = vec![
        QueueUpdate { wire: p, base: u, outcomes: vec!["d2".into()] },
        QueueUpdate { wire: q, base: v, outcomes: vec!["d1".into(), "k2".into()] },
    ];
    b
}

pub fn compile_single_qubit(u: Mat2, wire: usize, style: SingleStyle) -> Block {
    match style {
        SingleStyle::ZTeleport => uzttqc_block(wire, u),
        SingleStyle::XTeleport => uxttqc_block(wire, u),
    }
}

pub fn compile_cz(p: usize, q: usize, style: CzStyle) -> Block {
    match style {
        CzStyle::TwoAncilla => xtcz4tqc_block(p, q),
        CzStyle::OneAncilla => xtcz5tqc_block(p, q),
    }
}

/// Compilation failures.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TqcError {
    #[error("schedule contains a unitary gate operation")]
    NotMeasurementOnly,
    #[error("composite gate acts twice on wire {0}")]
    BadComposite(usize),
    #[error(transparent)]
    Exec(#[from] ExecError),
}

/// Measurement-only schedule plus the per-wire gate folded into readout.
#[derive(Clone, Debug, PartialEq)]
pub struct TqcSchedule {
    pub mode: TqcMode,
    pub program: Program,
    /// Single-qubit gate after the last entangling step on each wire,
    /// absorbed into the readout basis.
    pub residual: Vec<Mat2>,
    pub resources: Resources,
}

impl TqcSchedule {
    pub fn width(&self) -> usize {
        self.program.width
    }

    pub fn new(mode: TqcMode, program: Program, residual: Vec<Mat2>) -> Result<Self, TqcError> {
        if program.has_gates() {
            return Err(TqcError::NotMeasurementOnly);
        }
        let resources = count_resources(&program, true);
        Ok(TqcSchedule { mode, program, residual, resources })
    }
}

/// Every single-qubit gate run is simulated before its CZ; the run after the
/// last CZ on a wire goes into the readout basis.
pub fn compile_full(c: &Circuit, single: SingleStyle, cz: CzStyle) -> Result<TqcSchedule, TqcError> {
    let mut pending = vec![Mat2::identity(); c.width()];
    let mut blocks = Vec::new();
    for op in c.elementary_ops(false) {
        match op {
            ElementaryOp::Single(w, m) => pending[w] = m * pending[w],
            ElementaryOp::Cz(p, q) => {
                blocks.push(compile_single_qubit(pending[p], p, single));
                blocks.push(compile_single_qubit(pending[q], q, single));
                blocks.push(compile_cz(p, q, cz));
                pending[p] = Mat2::identity();
                pending[q] = Mat2::identity();
            }
        }
    }
    TqcSchedule::new(TqcMode::Full, Program { width: c.width(), blocks }, pending)
}

/// One rotated-basis CZ per composite gate; all single-qubit gates are
/// absorbed into measurement bases.
pub fn compile_pseudo(c: &Circuit) -> Result<TqcSchedule, TqcError> {
    compile_pseudo_form(&CompositeForm::from_circuit(c))
}

pub fn compile_pseudo_form(form: &CompositeForm) -> Result<TqcSchedule, TqcError> {
    let mut blocks = Vec::new();
    for comp in &form.composites {
        if comp.p == comp.q {
            return Err(TqcError::BadComposite(comp.p));
        }
        blocks.push(pseudo_cz_block(comp.p, comp.q, comp.u, comp.v));
    }
    TqcSchedule::new(TqcMode::Pseudo, Program { width: form.width, blocks }, form.finals.clone())
}

/// Counts ancillas, one- and two-qubit measurements and ASAP depth.
/// A `|0⟩`/`|+⟩` preparation is one single-qubit measurement; a `Λ(Z)|++⟩`
/// or Bell preparation is one two-qubit measurement. With `readout`, one
/// final single-qubit measurement per wire is included.
pub fn count_resources(p: &Program, readout: bool) -> Resources {
    let mut r = Resources::default();
    let mut ready: HashMap<u64, usize> = HashMap::new();
    let mut loc: Vec<u64> = (0..p.width as u64).collect();
    let mut next = p.width as u64;
    let layer = |ready: &mut HashMap<u64, usize>, qs: &[u64]| {
        let d = qs.iter().map(|q| ready.get(q).copied().unwrap_or(0)).max().unwrap_or(0) + 1;
        for q in qs {
            ready.insert(*q, d);
        }
        d
    };
    let mut depth = 0;
    for b in &p.blocks {
        let mut anc: HashMap<usize, u64> = HashMap::new();
        let resolve = |r: &QubitRef, anc: &HashMap<usize, u64>, loc: &[u64]| match r {
            QubitRef::Wire(w) => loc[*w],
            QubitRef::Anc(i) => anc[i],
        };
        for op in &b.ops {
            match op {
                Op::Prep { kind, at } => {
                    let mut qs = Vec::new();
                    for a in at {
                        if let QubitRef::Anc(i) = a {
                            anc.insert(*i, next);
                            qs.push(next);
                            next += 1;
                        }
                    }
                    r.ancillas += qs.len();
                    match kind {
                        PrepKind::Zero | PrepKind::Plus => r.single_qubit += 1,
                        PrepKind::Bell | PrepKind::CzPlusPlus => r.two_qubit += 1,
                    }
                    depth = depth.max(layer(&mut ready, &qs));
                }
                Op::Measure { factors, .. } => {
                    let qs: Vec<u64> = factors.iter().map(|f| resolve(&f.at, &anc, &loc)).collect();
                    if qs.len() == 1 {
                        r.single_qubit += 1;
                    } else {
                        r.two_qubit += 1;
                    }
                    depth = depth.max(layer(&mut ready, &qs));
                }
                Op::Gate { .. } | Op::Release { .. } => {}
            }
        }
        for (w, d) in b.wires.iter().zip(&b.dests) {
            loc[*w] = resolve(d, &anc, &loc);
        }
    }
    if readout {
        r.single_qubit += p.width;
        for q in loc {
            depth = depth.max(layer(&mut ready, &[q]));
        }
    }
    r.depth = depth;
    r
}

/// Result of executing a schedule body.
#[derive(Clone, Debug)]
pub struct TqcRun {
    pub run: Run,
    /// Per-wire rotation `T_w = G_w · Q_w† · Z^b X^a`; measuring `T†ZT`
    /// on wire `w` reads out the circuit's output qubit `w`.
    pub readout: Vec<Mat2>,
}

impl TqcRun {
    /// State whose computational-basis measurement is the readout.
    pub fn logical_output(&self) -> Result<StateVector, StateError> {
        let mut s = self.run.state.clone();
        for (w, t) in self.readout.iter().enumerate() {
            s.apply_1q(w, t)?;
        }
        Ok(s)
    }
}

pub fn execute(
    s: &TqcSchedule,
    input: &StateVector,
    frame: &PauliFrame,
    brancher: &mut dyn Brancher,
    opts: ExecOptions,
) -> Result<TqcRun, TqcError> {
    let run = run_program(&s.program, input, frame, brancher, opts)?;
    let readout = (0..s.width())
        .map(|w| {
            let zx = if run.frame.b[w] { Pauli::Z.matrix() } else { Mat2::identity() }
                * if run.frame.a[w] { Pauli::X.matrix() } else { Mat2::identity() };
            s.residual[w] * run.pending[w].dagger() * zx
        })
        .collect();
    Ok(TqcRun { run, readout })
}

/// Measures `T_w† Z T_w` on every wire; returns the outcome bits.
pub fn measure_readout(r: &TqcRun, brancher: &mut dyn Brancher) -> Result<Vec<bool>, TqcError> {
    let mut state = r.run.state.clone();
    let mut bits = Vec::new();
    for (w, t) in r.readout.iter().enumerate() {
        let obs = ObservableSpec::new(vec![Factor::rotated(w, Pauli::Z, *t)]);
        let pick = brancher.pick(w)?;
        let (bit, _) = state.measure(&obs, pick).map_err(ExecError::from)?;
        bits.push(bit);
    }
    Ok(bits)
}

fn mat_tokens(m: &Mat2) -> String {
    let mut out = String::new();
    for row in &m.m {
        for v in row {
            let _ = write!(out, " {} {}", v.re, v.im);
        }
    }
    out
}

/// Line-oriented schedule listing.
pub fn dump(s: &TqcSchedule) -> String {
    let mut out = format!(
        "# tqc {} width={}\n",
        match s.mode {
            TqcMode::Full => "full",
            TqcMode::Pseudo => "pseudo",
        },
        s.width()
    );
    let mut gates: Vec<Mat2> = Vec::new();
    let mut lines = Vec::new();
    let mut next_anc = 0usize;
    let gate_name = |m: &Mat2, gates: &mut Vec<Mat2>| {
        let idx = gates.iter().position(|g| g == m).unwrap_or_else(|| {
            gates.push(*m);
            gates.len() - 1
        });
        format!("U{idx}")
    };
    for b in &s.program.blocks {
        let base = next_anc;
        next_anc += b.ancillas;
        let name = |r: &QubitRef| match r {
            QubitRef::Wire(w) => format!("w{w}"),
            QubitRef::Anc(i) => format!("a{}", base + i),
        };
        lines.push(format!("# {} {}", b.kind.name(), b.wires.iter().map(|w| format!("w{w}")).collect::<Vec<_>>().join(" ")));
        for op in &b.ops {
            match op {
                Op::Prep { kind, at } => {
                    let k = match kind {
                        PrepKind::Zero => "zero",
                        PrepKind::Plus => "plus",
                        PrepKind::CzPlusPlus => "czpp",
                        PrepKind::Bell => "bell",
                    };
                    lines.push(format!("prep {} {k}", at.iter().map(name).collect::<Vec<_>>().join(",")));
                }
                Op::Measure { factors, name: outcome } => {
                    let qs: Vec<String> = factors.iter().map(|f| name(&f.at)).collect();
                    let obs: Vec<String> = factors
                        .iter()
                        .map(|f| match f.conj {
                            None => f.pauli.symbol().to_string(),
                            Some(Conj::Fixed(m)) => format!("{}^{}", f.pauli.symbol(), gate_name(&m, &mut gates)),
                            Some(Conj::Adaptive { base, .. }) => {
                                format!("{}^{}'", f.pauli.symbol(), gate_name(&base, &mut gates))
                            }
                        })
                        .collect();
                    let tag = if qs.len() == 1 { "m1" } else { "m2" };
                    lines.push(format!("{tag} {} {} -> {outcome}", qs.join(" "), obs.join(" ")));
                }
                Op::Gate { .. } | Op::Release { .. } => {}
            }
        }
    }
    for (w, g) in s.residual.iter().enumerate() {
        lines.push(format!("m1 w{w} Z^{}' -> out{w}", gate_name(g, &mut gates)));
    }
    for (i, g) in gates.iter().enumerate() {
        let _ = writeln!(out, "gate U{i}{}", mat_tokens(g));
    }
    for l in lines {
        out.push_str(&l);
        out.push('\n');
    }
    let r = &s.resources;
    let _ = writeln!(
        out,
        "# resources ancillas={} two_qubit={} single_qubit={} depth={}",
        r.ancillas, r.two_qubit, r.single_qubit, r.depth
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cz_primitive_resources() {
        let p4 = Program { width: 2, blocks: vec![xtcz4tqc_block(0, 1)] };
        let r = count_resources(&p4, false);
        assert_eq!((r.counts(), r.depth), ((2, 3, 2), 3));
        let p5 = Program { width: 2, blocks: vec![xtcz5tqc_block(0, 1)] };
        let r = count_resources(&p5, false);
        assert_eq!((r.counts(), r.depth), ((1, 2, 2), 4));
    }

    #[test]
    fn identity_circuit_is_readout_only() {
        let c = Circuit::new(1).unwrap();
        let s = compile_full(&c, SingleStyle::ZTeleport, CzStyle::OneAncilla).unwrap();
        assert!(s.program.blocks.is_empty());
        assert_eq!(s.resources.counts(), (0, 0, 1));
    }
}
