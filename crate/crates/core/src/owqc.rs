//! One-way compilation: cycle forms become single-qubit measurement
//! patterns on graph states, either circuit-dependent (`Tg`) or on fixed
//! substrates (remote CZ, cancellation, routing).
//!
//! Every data vertex carries one logical wire between two measurements.
//! Even columns hold the wire in a Hadamard-rotated frame (physical state
//! `H·X^a Z^b·χ`), odd columns in the plain frame (`X^a Z^b·χ`). An X step
//! measures an even-column vertex after `Z_{(−1)^b θ}` in the X basis and
//! applies `X_θ`; a Z step measures an odd-column vertex after
//! `Z_{(−1)^a θ}` and applies `Z_θ`. Edges between odd-column vertices of
//! two wires act as CZ between the wires.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::FRAC_PI_4;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::circuit::{euler_decompose, Angle, Cycle, CycleForm, CycleFormError};
use crate::graph::{
    build_graph_state, EdgeStyle, GraphError, GraphSpec, Role, SubstrateDiagram, VertexId,
};
use crate::linalg::{Mat2, Pauli};
use crate::pauli::{OutcomeRecord, PauliFrame};
use crate::program::{Brancher, ExecError};
use crate::statevec::{Factor, ObservableSpec, StateError, StateVector, MAX_QUBITS};

/// One-way scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    /// Circuit-dependent graph: CZ edges only where the circuit has them.
    Tg,
    /// Two-ancilla chains between neighbouring wires, X-measured to enact
    /// a CZ or Z-measured to delete it.
    RemoteI,
    /// One ancilla between neighbouring wires, Y-measured to enact or
    /// Z-measured to delete.
    RemoteII,
    /// Fixed CZ pairs applied twice around an interspersed X rotation
    /// that either cancels them or leaves a CX-equivalent gate.
    Cancellation,
    /// Diamonds: each wire is routed through an interaction or a bypass
    /// vertex.
    Routing,
}

impl Variant {
    pub const ALL: [Variant; 5] =
        [Variant::Tg, Variant::RemoteI, Variant::RemoteII, Variant::Cancellation, Variant::Routing];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Tg => "tg",
            Variant::RemoteI => "remote1",
            Variant::RemoteII => "remote2",
            Variant::Cancellation => "cancel",
            Variant::Routing => "route",
        }
    }
}

/// Measurement performed at a pattern step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StepKind {
    /// X-basis measurement after `Z_{(−1)^b θ}` on a Hadamard-frame vertex.
    XRot,
    /// X-basis measurement after `Z_{(−1)^a θ − Σ(−1)^d π/4}` on a
    /// plain-frame vertex.
    ZRot,
    /// Deletion.
    Mz,
    /// Ancilla measurement enacting a CZ through a two-vertex chain.
    Mx,
    /// Ancilla measurement enacting a CZ through one vertex.
    My,
}

impl StepKind {
    pub fn name(self) -> &'static str {
        match self {
            StepKind::XRot => "xrot",
            StepKind::ZRot => "zrot",
            StepKind::Mz => "mz",
            StepKind::Mx => "mx",
            StepKind::My => "my",
        }
    }
}

/// One single-qubit measurement and its feed-forward.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternStep {
    pub vertex: VertexId,
    pub kind: StepKind,
    /// Wire carried by a data step.
    pub wire: Option<usize>,
    /// Vertex the wire moves to.
    pub to: Option<VertexId>,
    pub angle: f64,
    /// Wires whose X bit feeds this wire's Z bit (CZ partners).
    pub partners: Vec<usize>,
    /// Y-measured ancillas whose outcome shifts the angle by `−(−1)^d π/4`.
    pub shifts: Vec<VertexId>,
    /// Vertices that receive `Z^s` from this outcome.
    pub z_onto: Vec<VertexId>,
}

impl PatternStep {
    fn data(kind: StepKind, wire: usize, vertex: VertexId, to: VertexId, angle: Angle) -> Self {
        PatternStep {
            vertex,
            kind,
            wire: Some(wire),
            to: Some(to),
            angle: angle.radians(),
            partners: Vec::new(),
            shifts: Vec::new(),
            z_onto: Vec::new(),
        }
    }

    fn ancilla(kind: StepKind, vertex: VertexId) -> Self {
        PatternStep {
            vertex,
            kind,
            wire: None,
            to: None,
            angle: 0.0,
            partners: Vec::new(),
            shifts: Vec::new(),
            z_onto: Vec::new(),
        }
    }
}

/// Graph plus an ordered list of adaptive measurements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementPattern {
    pub variant: Variant,
    pub width: usize,
    pub graph: GraphSpec,
    /// Input vertex of each wire (Hadamard frame).
    pub inputs: Vec<VertexId>,
    /// Output vertex of each wire (Hadamard frame).
    pub outputs: Vec<VertexId>,
    pub steps: Vec<PatternStep>,
}

/// Fixed-substrate description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubstrateScheme {
    pub variant: Variant,
    pub width: usize,
    pub cycles: usize,
    /// Lattice rows per logical wire.
    pub rows_per_wire: usize,
    /// Lattice columns per circuit cycle.
    pub cols_per_cycle: usize,
}

impl SubstrateScheme {
    /// Physical qubits per logical qubit per cycle.
    pub fn cost_per_wire_per_cycle(&self) -> usize {
        self.rows_per_wire * self.cols_per_cycle
    }
}

/// Compilation and execution failures.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OwqcError {
    #[error(transparent)]
    CycleForm(#[from] CycleFormError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Exec(#[from] ExecError),
    #[error("{0:?} has no cluster embedding")]
    NoEmbedding(Variant),
    #[error("step {step}: {message}")]
    Malformed { step: usize, message: String },
    #[error("{live} live qubits exceed the simulator cap")]
    CapExceeded { live: usize },
}

fn v(row: usize, col: usize) -> VertexId {
    VertexId::new(row, col)
}

fn add_row(g: &mut GraphSpec, row: usize, cols: usize) {
    for c in 0..cols {
        g.add_vertex(v(row, c), Role::Data);
        if c > 0 {
            g.add_edge(v(row, c - 1), v(row, c)).expect("row vertices exist");
        }
    }
}

fn x_steps(steps: &mut Vec<PatternStep>, rows: &[usize], col: usize, x: &[Angle]) {
    for (w, &r) in rows.iter().enumerate() {
        steps.push(PatternStep::data(StepKind::XRot, w, v(r, col), v(r, col + 1), x[w]));
    }
}

fn z_steps(steps: &mut Vec<PatternStep>, rows: &[usize], col: usize, cy: &Cycle, shifts: &BTreeMap<usize, Vec<VertexId>>) {
    for (w, &r) in rows.iter().enumerate() {
        let mut s = PatternStep::data(StepKind::ZRot, w, v(r, col), v(r, col + 1), cy.z[w]);
        s.partners = cy.partner(w).into_iter().collect();
        s.shifts = shifts.get(&w).cloned().unwrap_or_default();
        steps.push(s);
    }
}

/// Circuit-dependent graph: `n` rows, `2m+1` columns, vertical edges only
/// at odd columns where the cycle has a CZ.
pub fn compile_tg(cf: &CycleForm) -> Result<MeasurementPattern, OwqcError> {
    cf.validate()?;
    let n = cf.width;
    let cols = 2 * cf.cycles.len() + 1;
    let mut g = GraphSpec::new();
    for w in 0..n {
        add_row(&mut g, w, cols);
    }
    let rows: Vec<usize> = (0..n).collect();
    let mut steps = Vec::new();
    for (k, cy) in cf.cycles.iter().enumerate() {
        for &(a, b) in &cy.cz {
            g.add_edge(v(a, 2 * k + 1), v(b, 2 * k + 1))?;
        }
        x_steps(&mut steps, &rows, 2 * k, &cy.x);
        z_steps(&mut steps, &rows, 2 * k + 1, cy, &BTreeMap::new());
    }
    Ok(MeasurementPattern {
        variant: Variant::Tg,
        width: n,
        graph: g,
        inputs: rows.iter().map(|&r| v(r, 0)).collect(),
        outputs: rows.iter().map(|&r| v(r, cols - 1)).collect(),
        steps,
    })
}

/// Remote-CZ substrates: data on rows `stride·w`, ancilla chains of length
/// `stride − 1` between neighbouring wires at every odd column.
fn compile_remote(cf: &CycleForm, variant: Variant) -> Result<MeasurementPattern, OwqcError> {
    cf.validate()?;
    let stride = if variant == Variant::RemoteI { 3 } else { 2 };
    let n = cf.width;
    let cols = 2 * cf.cycles.len() + 1;
    let rows: Vec<usize> = (0..n).map(|w| stride * w).collect();
    let mut g = GraphSpec::new();
    for &r in &rows {
        add_row(&mut g, r, cols);
    }
    for c in (1..cols).step_by(2) {
        for w in 0..n.saturating_sub(1) {
            let mut prev = v(rows[w], c);
            for r in rows[w] + 1..rows[w + 1] {
                g.add_vertex(v(r, c), Role::Ancilla);
                g.add_edge(prev, v(r, c))?;
                prev = v(r, c);
            }
            g.add_edge(prev, v(rows[w + 1], c))?;
        }
    }
    let mut steps = Vec::new();
    for (k, cy) in cf.cycles.iter().enumerate() {
        let c = 2 * k + 1;
        x_steps(&mut steps, &rows, 2 * k, &cy.x);
        let mut shifts: BTreeMap<usize, Vec<VertexId>> = BTreeMap::new();
        for w in 0..n.saturating_sub(1) {
            let enact = cy.cz.contains(&(w, w + 1));
            let (top, bottom) = (rows[w], rows[w + 1]);
            match (variant, enact) {
                (Variant::RemoteI, true) => {
                    let mut s1 = PatternStep::ancilla(StepKind::Mx, v(top + 1, c));
                    s1.z_onto = vec![v(bottom, c)];
                    let mut s2 = PatternStep::ancilla(StepKind::Mx, v(top + 2, c));
                    s2.z_onto = vec![v(top, c)];
                    steps.push(s1);
                    steps.push(s2);
                }
                (Variant::RemoteII, true) => {
                    steps.push(PatternStep::ancilla(StepKind::My, v(top + 1, c)));
                    shifts.entry(w).or_default().push(v(top + 1, c));
                    shifts.entry(w + 1).or_default().push(v(top + 1, c));
                }
                _ => {
                    for r in top + 1..bottom {
                        steps.push(PatternStep::ancilla(StepKind::Mz, v(r, c)));
                    }
                }
            }
        }
        z_steps(&mut steps, &rows, c, cy, &shifts);
    }
    Ok(MeasurementPattern {
        variant,
        width: n,
        graph: g,
        inputs: rows.iter().map(|&r| v(r, 0)).collect(),
        outputs: rows.iter().map(|&r| v(r, cols - 1)).collect(),
        steps,
    })
}

/// Pairs `(i, i+1)` with `i ≡ parity (mod 2)`.
fn layer_pairs(n: usize, parity: usize) -> Vec<(usize, usize)> {
    (parity..n.saturating_sub(1)).step_by(2).map(|i| (i, i + 1)).collect()
}

/// Interspersed X angle that turns `Λ(Z)(I⊗X)Λ(Z)` into a CX-equivalent gate.
pub const INTERSPERSED_ENACT: f64 = -FRAC_PI_4;

/// Pair-layer parity, enacted pairs and the free gate per wire.
type Half = (usize, Vec<(usize, usize)>, Vec<Mat2>);

/// Rewrites a cycle form as cancellation subunits. Each subunit has two
/// halves (even pairs, then odd pairs); a half is two cycles sharing the
/// full pair layer, `Λ(Z)·(I⊗X_int)·Λ(Z)`, so `X_int = 0` cancels the pair
/// and `X_int = −π/4` leaves `(Z_{−π/4}⊗X_{−π/4})Λ(X)`. A CZ is recovered as
/// `(Z_{π/4} ⊗ H·X_{π/4})·that·(I⊗H)`, with the local gates merged into the
/// free rotations around it. One lead subunit, one per cycle, one flush.
pub fn cancellation_form(cf: &CycleForm) -> Result<CycleForm, OwqcError> {
    cf.validate()?;
    let n = cf.width;
    let mut halves: Vec<Half> = Vec::new();
    let mut pend = vec![Mat2::identity(); n];
    let mut push_half = |parity: usize, enact: Vec<(usize, usize)>, pend: &mut Vec<Mat2>| {
        for &(_, t) in &enact {
            pend[t] = Mat2::hadamard() * pend[t];
        }
        halves.push((parity, enact.clone(), pend.clone()));
        *pend = vec![Mat2::identity(); n];
        for &(c, t) in &enact {
            pend[c] = Mat2::zrot(FRAC_PI_4);
            pend[t] = Mat2::hadamard() * Mat2::xrot(FRAC_PI_4);
        }
    };
    push_half(0, Vec::new(), &mut pend);
    push_half(1, Vec::new(), &mut pend);
    for cy in &cf.cycles {
        for (w, p) in pend.iter_mut().enumerate() {
            *p = Mat2::zrot(cy.z[w].radians()) * Mat2::xrot(cy.x[w].radians()) * *p;
        }
        for parity in 0..2 {
            let enact: Vec<(usize, usize)> = cy.cz.iter().copied().filter(|&(a, _)| a % 2 == parity).collect();
            push_half(parity, enact, &mut pend);
        }
    }
    push_half(0, Vec::new(), &mut pend);
    push_half(1, Vec::new(), &mut pend);
    let mut cycles: Vec<Cycle> = Vec::new();
    for (parity, enact, pre) in halves {
        let pairs = layer_pairs(n, parity);
        let mut first = Cycle { x: vec![Angle::zero(); n], z: vec![Angle::zero(); n], cz: pairs.clone() };
        for (w, u) in pre.iter().enumerate() {
            let e = euler_decompose(u);
            if let Some(prev) = cycles.last_mut() {
                prev.z[w] = e.theta1;
            } else if !e.theta1.is_zero(1e-12) {
                return Err(OwqcError::Malformed { step: 0, message: "lead half needs a leading Z".into() });
            }
            first.x[w] = e.theta2;
            first.z[w] = e.theta3;
        }
        let mut second = Cycle { x: vec![Angle::zero(); n], z: vec![Angle::zero(); n], cz: pairs };
        for &(_, t) in &enact {
            second.x[t] = Angle::new(INTERSPERSED_ENACT);
        }
        cycles.push(first);
        cycles.push(second);
    }
    Ok(CycleForm { width: n, cycles })
}

fn compile_cancellation(cf: &CycleForm) -> Result<MeasurementPattern, OwqcError> {
    let mut p = compile_tg(&cancellation_form(cf)?)?;
    p.variant = Variant::Cancellation;
    Ok(p)
}

/// Diamond chains: wire `w` runs along row `3w+1` at even columns; each
/// diamond offers an upper (row `3w`) and a lower (row `3w+2`) vertex at
/// the odd column between. At diamond `j` the lower vertex of wire `w` is
/// linked to the upper vertex of wire `w+1` when `j ≡ w (mod 2)`. Each
/// cycle uses two diamonds, the first for even pairs, the second for odd.
fn compile_routing(cf: &CycleForm) -> Result<MeasurementPattern, OwqcError> {
    cf.validate()?;
    let n = cf.width;
    let diamonds = 2 * cf.cycles.len();
    let cols = 2 * diamonds + 1;
    let mut g = GraphSpec::new();
    for w in 0..n {
        for j in 0..=diamonds {
            g.add_vertex(v(3 * w + 1, 2 * j), Role::Data);
        }
        for j in 0..diamonds {
            let (l, r) = (v(3 * w + 1, 2 * j), v(3 * w + 1, 2 * j + 2));
            for side in [3 * w, 3 * w + 2] {
                g.add_vertex(v(side, 2 * j + 1), Role::Routing);
                g.add_edge(l, v(side, 2 * j + 1))?;
                g.add_edge(v(side, 2 * j + 1), r)?;
            }
        }
    }
    for j in 0..diamonds {
        for w in (j % 2..n.saturating_sub(1)).step_by(2) {
            g.add_edge(v(3 * w + 2, 2 * j + 1), v(3 * w + 3, 2 * j + 1))?;
        }
    }
    let mut steps = Vec::new();
    for j in 0..diamonds {
        let cy = &cf.cycles[j / 2];
        let parity = j % 2;
        let idle = vec![Angle::zero(); n];
        let (x, z) = if parity == 0 { (&cy.x, &cy.z) } else { (&idle, &idle) };
        let enacted: Vec<(usize, usize)> = cy.cz.iter().copied().filter(|&(a, _)| a % 2 == parity).collect();
        let c = 2 * j + 1;
        let selected: Vec<VertexId> = (0..n)
            .map(|w| {
                let partner_below = w % 2 == parity;
                let pair = if partner_below { (w, w + 1) } else { (w.wrapping_sub(1), w) };
                let interact = enacted.contains(&pair);
                match (partner_below, interact) {
                    (true, true) | (false, false) => v(3 * w + 2, c),
                    (false, true) | (true, false) => v(3 * w, c),
                }
            })
            .collect();
        for (w, sel) in selected.iter().enumerate() {
            let other = if sel.row == 3 * w { v(3 * w + 2, c) } else { v(3 * w, c) };
            steps.push(PatternStep::ancilla(StepKind::Mz, other));
        }
        for w in 0..n {
            steps.push(PatternStep::data(StepKind::XRot, w, v(3 * w + 1, 2 * j), selected[w], x[w]));
        }
        for w in 0..n {
            let mut s = PatternStep::data(StepKind::ZRot, w, selected[w], v(3 * w + 1, 2 * j + 2), z[w]);
            s.partners = enacted
                .iter()
                .filter_map(|&(a, b)| if a == w { Some(b) } else if b == w { Some(a) } else { None })
                .collect();
            steps.push(s);
        }
    }
    Ok(MeasurementPattern {
        variant: Variant::Routing,
        width: n,
        graph: g,
        inputs: (0..n).map(|w| v(3 * w + 1, 0)).collect(),
        outputs: (0..n).map(|w| v(3 * w + 1, cols - 1)).collect(),
        steps,
    })
}

/// Compiles a cycle form for a one-way scheme.
pub fn compile_pattern(cf: &CycleForm, variant: Variant) -> Result<MeasurementPattern, OwqcError> {
    match variant {
        Variant::Tg => compile_tg(cf),
        Variant::RemoteI | Variant::RemoteII => compile_remote(cf, variant),
        Variant::Cancellation => compile_cancellation(cf),
        Variant::Routing => compile_routing(cf),
    }
}

/// Substrate geometry of a fixed-substrate scheme plus its pattern.
pub fn compile_universal(cf: &CycleForm, variant: Variant) -> Result<(SubstrateScheme, MeasurementPattern), OwqcError> {
    let (rows_per_wire, cols_per_cycle) = match variant {
        Variant::Tg => (1, 2),
        Variant::RemoteI => (3, 2),
        Variant::RemoteII => (2, 2),
        Variant::Cancellation => (1, 8),
        Variant::Routing => (3, 4),
    };
    let scheme = SubstrateScheme { variant, width: cf.width, cycles: cf.cycles.len(), rows_per_wire, cols_per_cycle };
    Ok((scheme, compile_pattern(cf, variant)?))
}

/// Square lattice and the vertices whose Z-measurement carves out the
/// substrate graph.
#[derive(Clone, Debug, PartialEq)]
pub struct Embedding {
    pub lattice: GraphSpec,
    pub deletions: Vec<VertexId>,
}

/// Cluster embedding of a remote-CZ substrate: the full lattice over the
/// pattern's bounding box; deleting the ancilla-row vertices at even
/// columns leaves the substrate graph. With no cycles the substrate is the
/// bare input column.
pub fn embed_in_cluster(s: &SubstrateScheme) -> Result<Embedding, OwqcError> {
    if !matches!(s.variant, Variant::RemoteI | Variant::RemoteII) {
        return Err(OwqcError::NoEmbedding(s.variant));
    }
    let stride = s.rows_per_wire;
    if s.cycles == 0 {
        let mut lattice = GraphSpec::new();
        for w in 0..s.width {
            lattice.add_vertex(v(stride * w, 0), Role::Data);
        }
        return Ok(Embedding { lattice, deletions: Vec::new() });
    }
    let rows = stride * (s.width - 1) + 1;
    let cols = 2 * s.cycles + 1;
    let mut lattice = crate::graph::cluster_lattice(rows, cols);
    let mut deletions = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if r % stride != 0 && c % 2 == 0 {
                deletions.push(v(r, c));
            }
        }
    }
    for &d in &deletions {
        lattice.add_vertex(d, Role::Deletion);
    }
    Ok(Embedding { lattice, deletions })
}

/// Result of running a pattern.
#[derive(Clone, Debug)]
pub struct PatternRun {
    /// Output vertex of wire `w` is qubit `w`, physical state `H·X^a Z^b·χ`.
    pub state: StateVector,
    pub frame: PauliFrame,
    pub record: OutcomeRecord,
    pub probability: f64,
    /// Largest number of simultaneously live qubits.
    pub peak_qubits: usize,
}

impl PatternRun {
    /// Undoes the output Hadamard and the Pauli frame.
    pub fn corrected_output(&self) -> Result<StateVector, StateError> {
        let mut s = self.state.clone();
        for w in 0..self.frame.width() {
            s.apply_1q(w, &Mat2::hadamard())?;
            if self.frame.a[w] {
                s.apply_pauli(w, Pauli::X)?;
            }
            if self.frame.b[w] {
                s.apply_pauli(w, Pauli::Z)?;
            }
        }
        Ok(s)
    }
}

struct Exec<'a> {
    pattern: &'a MeasurementPattern,
    state: StateVector,
    live: Vec<VertexId>,
    measured: BTreeSet<VertexId>,
    pending: BTreeMap<VertexId, bool>,
    outcomes: BTreeMap<VertexId, bool>,
    loc: Vec<VertexId>,
    hframe: Vec<bool>,
    frame: PauliFrame,
    record: OutcomeRecord,
    probability: f64,
    peak: usize,
}

impl Exec<'_> {
    fn index(&self, u: VertexId) -> Option<usize> {
        self.live.iter().position(|&x| x == u)
    }

    fn activate(&mut self, u: VertexId) -> Result<(), OwqcError> {
        if self.index(u).is_some() || self.measured.contains(&u) {
            return Ok(());
        }
        if self.live.len() + 1 > MAX_QUBITS {
            return Err(OwqcError::CapExceeded { live: self.live.len() + 1 });
        }
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let q = self.state.push_qubit([num_complex::Complex::new(h, 0.0), num_complex::Complex::new(h, 0.0)])?;
        self.live.push(u);
        for nb in self.pattern.graph.neighbors(u) {
            if let Some(i) = self.index(nb) {
                if i != q {
                    self.state.apply_cz(i, q)?;
                }
            }
        }
        self.peak = self.peak.max(self.live.len());
        Ok(())
    }

    fn fold(&mut self, w: usize) {
        if self.pending.remove(&self.loc[w]) == Some(true) {
            if self.hframe[w] {
                self.frame.a[w] ^= true;
            } else {
                self.frame.b[w] ^= true;
            }
        }
    }

    fn measure(&mut self, step: usize, u: VertexId, f: Factor, brancher: &mut dyn Brancher) -> Result<bool, OwqcError> {
        let q = self.index(u).ok_or(OwqcError::Malformed { step, message: format!("vertex {u} not live") })?;
        let spec = ObservableSpec::new(vec![Factor { qubit: q, ..f }]);
        let (bit, p) = self.state.measure(&spec, brancher.pick(step)?)?;
        self.probability *= p;
        self.state.factor_out(&[q])?;
        self.live.remove(q);
        self.measured.insert(u);
        Ok(bit)
    }

    fn run_step(&mut self, i: usize, s: &PatternStep, lazy: bool, brancher: &mut dyn Brancher) -> Result<(), OwqcError> {
        let bad = |m: &str| OwqcError::Malformed { step: i, message: m.to_string() };
        if self.measured.contains(&s.vertex) {
            return Err(bad("vertex measured twice"));
        }
        if lazy {
            self.activate(s.vertex)?;
            for nb in self.pattern.graph.neighbors(s.vertex) {
                self.activate(nb)?;
            }
        }
        let name = s.vertex.to_string();
        match s.kind {
            StepKind::XRot | StepKind::ZRot => {
                let w = s.wire.ok_or(bad("data step without a wire"))?;
                let to = s.to.ok_or(bad("data step without a destination"))?;
                if self.loc[w] != s.vertex {
                    return Err(bad("wire is not at the measured vertex"));
                }
                let want_h = s.kind == StepKind::XRot;
                if self.hframe[w] != want_h {
                    return Err(bad("step does not match the wire's frame"));
                }
                if self.measured.contains(&to) {
                    return Err(bad("destination already measured"));
                }
                self.fold(w);
                let alpha = if want_h {
                    if self.frame.b[w] { -s.angle } else { s.angle }
                } else {
                    for &p in &s.partners {
                        self.frame.b[w] ^= self.frame.a[p];
                    }
                    let mut a = if self.frame.a[w] { -s.angle } else { s.angle };
                    for y in &s.shifts {
                        let d = *self.outcomes.get(y).ok_or(bad("shift outcome not yet measured"))?;
                        a -= if d { -FRAC_PI_4 } else { FRAC_PI_4 };
                    }
                    a
                };
                let bit = self.measure(i, s.vertex, Factor::rotated(0, Pauli::X, Mat2::zrot(alpha)), brancher)?;
                if want_h {
                    self.frame.a[w] ^= bit;
                } else {
                    self.frame.b[w] ^= bit;
                }
                self.loc[w] = to;
                self.hframe[w] = !want_h;
                self.outcomes.insert(s.vertex, bit);
                self.record.push(i, name, bit);
            }
            StepKind::Mz => {
                let bit = self.measure(i, s.vertex, Factor::plain(0, Pauli::Z), brancher)?;
                if bit {
                    for nb in self.pattern.graph.neighbors(s.vertex) {
                        if !self.measured.contains(&nb) {
                            *self.pending.entry(nb).or_insert(false) ^= true;
                        }
                    }
                }
                self.outcomes.insert(s.vertex, bit);
                self.record.push(i, name, bit);
            }
            StepKind::Mx | StepKind::My => {
                let p = if s.kind == StepKind::Mx { Pauli::X } else { Pauli::Y };
                let raw = self.measure(i, s.vertex, Factor::plain(0, p), brancher)?;
                let bit = raw ^ self.pending.remove(&s.vertex).unwrap_or(false);
                if bit {
                    for &u in &s.z_onto {
                        *self.pending.entry(u).or_insert(false) ^= true;
                    }
                }
                self.outcomes.insert(s.vertex, bit);
                self.record.push(i, name, bit);
            }
        }
        Ok(())
    }
}

fn execute(
    p: &MeasurementPattern,
    input: &StateVector,
    frame: &PauliFrame,
    brancher: &mut dyn Brancher,
    lazy: bool,
) -> Result<PatternRun, OwqcError> {
    let n = p.width;
    if input.num_qubits() != n || frame.width() != n {
        return Err(ExecError::InputWidth { got: input.num_qubits(), expected: n }.into());
    }
    let mut state = input.clone();
    for w in 0..n {
        if frame.b[w] {
            state.apply_pauli(w, Pauli::Z)?;
        }
        if frame.a[w] {
            state.apply_pauli(w, Pauli::X)?;
        }
        state.apply_1q(w, &Mat2::hadamard())?;
    }
    let mut ex = Exec {
        pattern: p,
        state,
        live: p.inputs.clone(),
        measured: BTreeSet::new(),
        pending: BTreeMap::new(),
        outcomes: BTreeMap::new(),
        loc: p.inputs.clone(),
        hframe: vec![true; n],
        frame: PauliFrame { loc: (0..n).collect(), ..frame.clone() },
        record: OutcomeRecord::new(),
        probability: 1.0,
        peak: n,
    };
    for (i, a) in p.inputs.iter().enumerate() {
        for b in &p.inputs[i + 1..] {
            if p.graph.has_edge(*a, *b) {
                ex.state.apply_cz(i, i + 1 + p.inputs[i + 1..].iter().position(|x| x == b).unwrap())?;
            }
        }
    }
    if !lazy {
        for u in p.graph.vertices().collect::<Vec<_>>() {
            ex.activate(u)?;
        }
    }
    for (i, s) in p.steps.iter().enumerate() {
        ex.run_step(i, s, lazy, brancher)?;
    }
    for w in 0..n {
        if ex.loc[w] != p.outputs[w] || !ex.hframe[w] {
            return Err(OwqcError::Malformed { step: p.steps.len(), message: format!("wire {w} did not reach its output") });
        }
        if lazy {
            ex.activate(p.outputs[w])?;
        }
        ex.fold(w);
    }
    if ex.live.len() != n {
        return Err(OwqcError::Malformed { step: p.steps.len(), message: format!("{} unmeasured vertices", ex.live.len() - n) });
    }
    let order: Vec<usize> = p.outputs.iter().map(|&o| ex.index(o).unwrap()).collect();
    let state = ex.state.reorder(&order)?;
    Ok(PatternRun { state, frame: ex.frame, record: ex.record, probability: ex.probability, peak_qubits: ex.peak })
}

/// Builds the whole graph state up front, then measures.
pub fn execute_pattern(
    p: &MeasurementPattern,
    input: &StateVector,
    frame: &PauliFrame,
    brancher: &mut dyn Brancher,
) -> Result<PatternRun, OwqcError> {
    execute(p, input, frame, brancher, false)
}

/// Creates each vertex (and its edges to live vertices) only when a
/// neighbour is about to be measured.
pub fn execute_windowed(
    p: &MeasurementPattern,
    input: &StateVector,
    frame: &PauliFrame,
    brancher: &mut dyn Brancher,
) -> Result<PatternRun, OwqcError> {
    execute(p, input, frame, brancher, true)
}

/// Largest live-qubit count of windowed execution, computed without
/// simulating.
pub fn window_size(p: &MeasurementPattern) -> usize {
    let mut live: BTreeSet<VertexId> = p.inputs.iter().copied().collect();
    let mut measured = BTreeSet::new();
    let mut peak = live.len();
    for s in &p.steps {
        for u in std::iter::once(s.vertex).chain(p.graph.neighbors(s.vertex)) {
            if !measured.contains(&u) {
                live.insert(u);
            }
        }
        peak = peak.max(live.len());
        live.remove(&s.vertex);
        measured.insert(s.vertex);
    }
    peak
}

/// Runs every outcome branch (lexicographic order) with nonzero probability.
pub fn enumerate_pattern_branches(
    p: &MeasurementPattern,
    input: &StateVector,
    frame: &PauliFrame,
) -> Result<Vec<PatternRun>, OwqcError> {
    let k = p.steps.len();
    let mut runs = Vec::new();
    for mask in 0..(1u64 << k) {
        let bits: Vec<bool> = (0..k).map(|i| (mask >> (k - 1 - i)) & 1 == 1).collect();
        match execute_windowed(p, input, frame, &mut crate::program::ForcedBranches(bits)) {
            Ok(r) => runs.push(r),
            Err(OwqcError::State(StateError::ImpossibleBranch { .. })) => {}
            Err(OwqcError::Exec(ExecError::State(StateError::ImpossibleBranch { .. }))) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(runs)
}

fn dep_of(s: &PatternStep) -> String {
    match (s.kind, s.wire) {
        (StepKind::XRot, Some(w)) => format!("{w}:b"),
        (StepKind::ZRot, Some(w)) => format!("{w}:a"),
        _ => "-".into(),
    }
}

/// One line per measurement.
pub fn dump(p: &MeasurementPattern) -> String {
    let mut out = format!(
        "# pattern {} width={} vertices={} edges={} steps={}\n",
        p.variant.name(),
        p.width,
        p.graph.num_vertices(),
        p.graph.num_edges(),
        p.steps.len()
    );
    for s in &p.steps {
        let angle = match s.kind {
            StepKind::XRot | StepKind::ZRot => format!("{}", s.angle),
            _ => "-".into(),
        };
        let _ = write!(out, "meas {} kind={} angle={angle} dep={}", s.vertex, s.kind.name(), dep_of(s));
        if let Some(to) = s.to {
            let _ = write!(out, " to={to}");
        }
        for w in &s.partners {
            let _ = write!(out, " cz={w}:a");
        }
        for y in &s.shifts {
            let _ = write!(out, " shift={y}");
        }
        for u in &s.z_onto {
            let _ = write!(out, " z={u}");
        }
        out.push('\n');
    }
    for (w, o) in p.outputs.iter().enumerate() {
        let _ = writeln!(out, "out {o} wire={w}");
    }
    out
}

/// Substrate diagram: X steps are labelled `M<wire>`, Z steps `N<wire>`,
/// with one prime per earlier step of the wire (`[k]` past three);
/// ancillas by measurement kind.
pub fn diagram(p: &MeasurementPattern) -> SubstrateDiagram {
    let mut d = SubstrateDiagram::default();
    let mut count: BTreeMap<(usize, StepKind), usize> = BTreeMap::new();
    let mut last: Vec<Option<VertexId>> = vec![None; p.width];
    for s in &p.steps {
        let label = match (s.kind, s.wire) {
            (StepKind::XRot | StepKind::ZRot, Some(w)) => {
                let c = count.entry((w, s.kind)).or_insert(0);
                let letter = if s.kind == StepKind::XRot { 'M' } else { 'N' };
                let l = if *c <= 3 { format!("{letter}{}{}", w + 1, "′".repeat(*c)) } else { format!("{letter}{}[{c}]", w + 1) };
                *c += 1;
                if let Some(prev) = last[w] {
                    d.deps.push((prev, s.vertex));
                }
                last[w] = Some(s.vertex);
                l
            }
            _ => s.kind.name().to_string(),
        };
        d.labels.insert(s.vertex, label);
        let note = match s.kind {
            StepKind::XRot | StepKind::ZRot => format!("{} {:.6} dep={}", s.kind.name(), s.angle, dep_of(s)),
            _ => s.kind.name().to_string(),
        };
        d.notes.insert(s.vertex, note);
    }
    for (w, o) in p.outputs.iter().enumerate() {
        d.labels.insert(*o, format!("O{}", w + 1));
    }
    for u in p.graph.vertices() {
        d.labels.entry(u).or_insert_with(|| "·".into());
    }
    for (a, b) in p.graph.edges() {
        let style = if p.variant == Variant::Tg && a.col == b.col { EdgeStyle::Optional } else { EdgeStyle::Solid };
        d.edges.push((a, b, style));
    }
    d
}

/// Graph state of the pattern's substrate (all vertices `|+⟩`).
pub fn substrate_state(p: &MeasurementPattern) -> Result<StateVector, OwqcError> {
    Ok(build_graph_state(&p.graph)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Circuit;

    #[test]
    fn tg_layout_counts() {
        let c = Circuit::parse("qubits 2\nxrot 0 0.3\ncz 0 1\nzrot 1 0.2").unwrap();
        let cf = CycleForm::from_circuit(&c);
        let p = compile_tg(&cf).unwrap();
        let m = cf.cycles.len();
        assert_eq!(p.graph.num_vertices(), 2 * (2 * m + 1));
        assert_eq!(p.steps.len(), 2 * 2 * m);
    }

    #[test]
    fn zero_cycles_is_input_column() {
        let cf = CycleForm { width: 3, cycles: Vec::new() };
        let p = compile_tg(&cf).unwrap();
        assert_eq!(p.graph.num_vertices(), 3);
        assert!(p.steps.is_empty());
        let (s, _) = compile_universal(&cf, Variant::RemoteI).unwrap();
        let e = embed_in_cluster(&s).unwrap();
        assert!(e.deletions.is_empty());
        assert_eq!(e.lattice.num_vertices(), 3);
    }

    #[test]
    fn remote_costs() {
        let cf = CycleForm { width: 2, cycles: vec![Cycle::identity(2)] };
        assert_eq!(compile_universal(&cf, Variant::RemoteI).unwrap().0.cost_per_wire_per_cycle(), 6);
        assert_eq!(compile_universal(&cf, Variant::RemoteII).unwrap().0.cost_per_wire_per_cycle(), 4);
    }

    #[test]
    fn dump_line_format() {
        let cf = CycleForm { width: 1, cycles: vec![Cycle::identity(1)] };
        let text = dump(&compile_tg(&cf).unwrap());
        assert!(text.contains("meas 0,0 kind=xrot angle=0 dep=0:b to=0,1\n"));
        assert!(text.contains("meas 0,1 kind=zrot angle=0 dep=0:a to=0,2\n"));
    }
}
