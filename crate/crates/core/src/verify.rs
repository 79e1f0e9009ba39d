//! Equivalence oracles and the trial harness: branch enumeration over
//! primitives and patterns, seeded random trials for whole schemes,
//! resource tallies and the named acceptance checks.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::{Angle, Circuit, CycleForm, Gate};
use crate::graph::{build_graph_state, delete_vertex, GraphError, GraphSpec, Role, VertexId};
use crate::linalg::{Mat2, Mat4, Pauli, UnitaryMatrix};
use crate::owqc::{self, OwqcError, Variant};
use crate::pauli::PauliFrame;
use crate::primitives::{catalog_entry, CATALOG};
use crate::program::{
    enumerate_branches, ExecError, ExecOptions, Program, RandomBranches, Run,
};
use crate::statevec::{
    fidelity, random_product_state, random_state, Factor, ObservableSpec, Pick, StateError,
    StateVector, TrialRng,
};
use crate::tqc::{self, count_resources, CzStyle, Resources, SingleStyle, TqcError};

/// Fidelity floor for whole-scheme equivalence.
pub const SCHEME_TOL: f64 = 1e-9;
/// Fidelity floor for primitives, identities and graph states.
pub const EXACT_TOL: f64 = 1e-10;
/// Largest number of outcome bits enumerated exhaustively.
pub const BRANCH_CAP: usize = 12;

/// Verification failures that prevent producing a report.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VerifyError {
    #[error("{bits} outcome bits exceed the branch cap of {cap}")]
    BranchCap { bits: usize, cap: usize },
    #[error("unknown primitive {0}")]
    UnknownPrimitive(String),
    #[error("unknown scheme {0}")]
    UnknownScheme(String),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Exec(#[from] ExecError),
    #[error(transparent)]
    Tqc(#[from] TqcError),
    #[error(transparent)]
    Owqc(#[from] OwqcError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Compiler selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Scheme {
    TqcFull,
    TqcPseudo,
    OneWay(Variant),
}

impl Scheme {
    pub const ALL: [Scheme; 7] = [
        Scheme::TqcFull,
        Scheme::TqcPseudo,
        Scheme::OneWay(Variant::Tg),
        Scheme::OneWay(Variant::RemoteI),
        Scheme::OneWay(Variant::RemoteII),
        Scheme::OneWay(Variant::Cancellation),
        Scheme::OneWay(Variant::Routing),
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::TqcFull => "tqc-full",
            Scheme::TqcPseudo => "tqc-pseudo",
            Scheme::OneWay(v) => v.name(),
        }
    }

    /// Expands a selector; `all` yields every scheme.
    pub fn select(s: &str) -> Result<Vec<Scheme>, VerifyError> {
        if s == "all" {
            return Ok(Scheme::ALL.to_vec());
        }
        Ok(vec![s.parse()?])
    }
}

impl FromStr for Scheme {
    type Err = VerifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scheme::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| VerifyError::UnknownScheme(s.to_string()))
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One enumerated branch.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchRow {
    /// Named outcome bits in measurement order, e.g. `c=0 d=1`.
    pub outcomes: String,
    pub probability: f64,
    pub fidelity: f64,
    /// Output frame as `a,b` per wire.
    pub frame: String,
}

/// A tally compared with its closed form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResourceRow {
    pub name: String,
    pub measured: String,
    pub expected: String,
    pub ok: bool,
}

/// Outcome of a verification run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub scheme: String,
    pub circuit_digest: String,
    pub trials: usize,
    pub seed: u64,
    pub min_fidelity: f64,
    pub mean_fidelity: f64,
    /// Probability mass of the enumerated branches (per input), when enumerated.
    pub probability_sums: Vec<f64>,
    pub branches: Vec<BranchRow>,
    pub resources: Vec<ResourceRow>,
    pub tolerance: f64,
    pub passed: bool,
}

impl VerificationReport {
    fn new(scheme: &str, digest: &str, seed: u64, tolerance: f64) -> Self {
        VerificationReport {
            scheme: scheme.to_string(),
            circuit_digest: digest.to_string(),
            trials: 0,
            seed,
            min_fidelity: 1.0,
            mean_fidelity: 1.0,
            probability_sums: Vec::new(),
            branches: Vec::new(),
            resources: Vec::new(),
            tolerance,
            passed: true,
        }
    }

    fn finish(mut self, fids: &[f64]) -> Self {
        self.trials = fids.len();
        if !fids.is_empty() {
            self.min_fidelity = fids.iter().copied().fold(f64::INFINITY, f64::min);
            self.mean_fidelity = fids.iter().sum::<f64>() / fids.len() as f64;
        }
        let probs_ok = self.probability_sums.iter().all(|p| (p - 1.0).abs() <= 1e-10);
        self.passed = self.min_fidelity >= 1.0 - self.tolerance && probs_ok && self.resources.iter().all(|r| r.ok);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "scheme {}", self.scheme);
        let _ = writeln!(out, "circuit {}", self.circuit_digest);
        let _ = writeln!(out, "seed {} trials {}", self.seed, self.trials);
        let _ = writeln!(out, "fidelity min {:.15} mean {:.15} tolerance {:e}", self.min_fidelity, self.mean_fidelity, self.tolerance);
        for (i, p) in self.probability_sums.iter().enumerate() {
            let _ = writeln!(out, "input {i} probability sum {p:.15}");
        }
        for b in &self.branches {
            let _ = writeln!(out, "branch {} p={:.6} fidelity={:.15} frame={}", b.outcomes, b.probability, b.fidelity, b.frame);
        }
        for r in &self.resources {
            let _ = writeln!(out, "resource {} measured={} expected={} {}", r.name, r.measured, r.expected, if r.ok { "ok" } else { "MISMATCH" });
        }
        let _ = writeln!(out, "{}", if self.passed { "PASS" } else { "FAIL" });
        out
    }
}

fn frame_text(f: &PauliFrame) -> String {
    (0..f.width()).map(|w| format!("{},{}", f.a[w] as u8, f.b[w] as u8)).collect::<Vec<_>>().join(" ")
}

fn random_frame(n: usize, rng: &mut TrialRng) -> PauliFrame {
    PauliFrame::from_bits(&(0..n).map(|_| (rng.coin(), rng.coin())).collect::<Vec<_>>())
}

/// Physical state `X^a Z^b·ψ` carrying the frame.
pub fn with_frame(psi: &StateVector, frame: &PauliFrame) -> Result<StateVector, StateError> {
    let mut s = psi.clone();
    for w in 0..frame.width() {
        s.apply_1q(w, &frame.operator(w))?;
    }
    Ok(s)
}

/// Logical output of a program run: `Q_w† Z^b X^a` on each wire.
pub fn corrected(run: &Run) -> Result<StateVector, StateError> {
    let mut s = run.state.clone();
    for w in 0..run.frame.width() {
        if run.frame.a[w] {
            s.apply_pauli(w, Pauli::X)?;
        }
        if run.frame.b[w] {
            s.apply_pauli(w, Pauli::Z)?;
        }
        s.apply_1q(w, &run.pending[w].dagger())?;
    }
    Ok(s)
}

/// Applies a program to every branch of every input and compares with
/// `ideal`, which maps (input state, input frame, run) to the expected
/// output.
fn branch_report<F>(
    name: &str,
    program: &Program,
    inputs: &[(StateVector, PauliFrame)],
    ideal: F,
) -> Result<VerificationReport, VerifyError>
where
    F: Fn(&StateVector, &PauliFrame, &Run) -> Result<StateVector, VerifyError>,
{
    let bits = program.outcome_count();
    if bits > BRANCH_CAP {
        return Err(VerifyError::BranchCap { bits, cap: BRANCH_CAP });
    }
    let mut report = VerificationReport::new(name, "-", 0, EXACT_TOL);
    let mut fids = Vec::new();
    for (i, (input, frame)) in inputs.iter().enumerate() {
        let runs = enumerate_branches(program, &with_frame(input, frame)?, frame, ExecOptions::default())?;
        let mut total = 0.0;
        for run in &runs {
            let f = fidelity(&corrected(run)?, &ideal(input, frame, run)?);
            total += run.probability;
            fids.push(f);
            if i == 0 {
                report.branches.push(BranchRow {
                    outcomes: run.record.entries.iter().map(|o| format!("{}={}", o.name, o.bit as u8)).collect::<Vec<_>>().join(" "),
                    probability: run.probability,
                    fidelity: f,
                    frame: frame_text(&run.frame),
                });
            }
        }
        report.probability_sums.push(total);
    }
    Ok(report.finish(&fids))
}

/// Inputs for branch checks: product states with random frames, plus
/// entangled spot checks on multi-wire fragments.
pub fn branch_inputs(width: usize, count: usize, rng: &mut TrialRng) -> Result<Vec<(StateVector, PauliFrame)>, StateError> {
    (0..count)
        .map(|i| {
            let s = if width > 1 && i % 4 == 3 { random_state(width, rng)? } else { random_product_state(width, rng)? };
            Ok((s, random_frame(width, rng)))
        })
        .collect()
}

/// Exhaustive branch check of a catalog primitive on `inputs` random inputs.
pub fn verify_primitive(name: &str, inputs: usize, seed: u64) -> Result<VerificationReport, VerifyError> {
    let mut rng = TrialRng::new(seed, 0);
    let entry = catalog_entry(name, &mut rng).ok_or_else(|| VerifyError::UnknownPrimitive(name.to_string()))?;
    let cases = branch_inputs(entry.program.width, inputs, &mut rng)?;
    let mut r = branch_report(name, &entry.program, &cases, |input, frame, run| {
        let mut want = input.clone();
        for g in entry.ideal.gates(&run.record, frame).map_err(ExecError::from)? {
            want.apply_unitary(&g.wires, &g.unitary)?;
        }
        Ok(want)
    })?;
    r.seed = seed;
    Ok(r)
}

/// Exhaustive branch check of a measurement pattern against its cycle form.
pub fn verify_pattern_branches(
    cf: &CycleForm,
    variant: Variant,
    inputs: usize,
    seed: u64,
) -> Result<VerificationReport, VerifyError> {
    let p = owqc::compile_pattern(cf, variant)?;
    if p.steps.len() > BRANCH_CAP {
        return Err(VerifyError::BranchCap { bits: p.steps.len(), cap: BRANCH_CAP });
    }
    let circuit = cf.to_circuit();
    let mut rng = TrialRng::new(seed, 0);
    let mut report = VerificationReport::new(variant.name(), &circuit.digest(), seed, SCHEME_TOL);
    let mut fids = Vec::new();
    for (i, (input, frame)) in branch_inputs(cf.width, inputs, &mut rng)?.iter().enumerate() {
        let mut want = input.clone();
        want.apply_circuit(&circuit)?;
        let mut total = 0.0;
        for run in owqc::enumerate_pattern_branches(&p, input, frame)? {
            let f = fidelity(&run.corrected_output()?, &want);
            total += run.probability;
            fids.push(f);
            if i == 0 {
                report.branches.push(BranchRow {
                    outcomes: run.record.entries.iter().map(|o| (o.bit as u8).to_string()).collect(),
                    probability: run.probability,
                    fidelity: f,
                    frame: frame_text(&run.frame),
                });
            }
        }
        report.probability_sums.push(total);
    }
    Ok(report.finish(&fids))
}

enum Compiled {
    Tqc(tqc::TqcSchedule),
    Pattern(owqc::MeasurementPattern),
}

fn compile(c: &Circuit, scheme: Scheme) -> Result<Compiled, VerifyError> {
    Ok(match scheme {
        Scheme::TqcFull => Compiled::Tqc(tqc::compile_full(c, SingleStyle::default(), CzStyle::default())?),
        Scheme::TqcPseudo => Compiled::Tqc(tqc::compile_pseudo(c)?),
        Scheme::OneWay(v) => Compiled::Pattern(owqc::compile_pattern(&CycleForm::from_circuit(c), v)?),
    })
}

fn trial(compiled: &Compiled, c: &Circuit, seed: u64, t: u64) -> Result<f64, VerifyError> {
    let mut rng = TrialRng::new(seed, t);
    let n = c.width();
    let input = random_product_state(n, &mut rng)?;
    let frame = random_frame(n, &mut rng);
    let mut want = input.clone();
    want.apply_circuit(c)?;
    let got = match compiled {
        Compiled::Tqc(s) => {
            tqc::execute(s, &with_frame(&input, &frame)?, &frame, &mut RandomBranches(rng), ExecOptions::default())?.logical_output()?
        }
        Compiled::Pattern(p) => owqc::execute_windowed(p, &input, &frame, &mut RandomBranches(rng))?.corrected_output()?,
    };
    Ok(fidelity(&got, &want))
}

/// Seeded random trials: each trial draws a product input, an input frame
/// and random outcomes from ChaCha stream `trial`. Trials run in parallel
/// and are reduced in trial order.
pub fn verify_random(c: &Circuit, scheme: Scheme, trials: usize, seed: u64) -> Result<VerificationReport, VerifyError> {
    let compiled = compile(c, scheme)?;
    let fids = (0..trials as u64)
        .into_par_iter()
        .map(|t| trial(&compiled, c, seed, t))
        .collect::<Result<Vec<f64>, VerifyError>>()?;
    let mut report = VerificationReport::new(scheme.name(), &c.digest(), seed, SCHEME_TOL);
    if let Compiled::Tqc(s) = &compiled {
        report.resources.push(ResourceRow {
            name: "schedule".into(),
            measured: resources_text(&s.resources),
            expected: resources_text(&count_resources(&s.program, true)),
            ok: s.resources == count_resources(&s.program, true),
        });
    }
    Ok(report.finish(&fids))
}

fn resources_text(r: &Resources) -> String {
    format!("({},{},{}) depth {}", r.ancillas, r.two_qubit, r.single_qubit, r.depth)
}

fn counts_row(name: String, got: (usize, usize, usize), want: (usize, usize, usize)) -> ResourceRow {
    ResourceRow { name, measured: format!("{got:?}"), expected: format!("{want:?}"), ok: got == want }
}

/// Circuit with `m` CZ gates spread over neighbouring pairs of `n` wires,
/// separated by Hadamards so no two merge.
pub fn cz_ladder(n: usize, m: usize) -> Circuit {
    let mut c = Circuit::new(n).expect("width is positive");
    for k in 0..m {
        let a = k % (n - 1).max(1);
        c.push(Gate::H(a)).unwrap();
        c.push(Gate::Cz(a, a + 1)).unwrap();
    }
    c
}

/// TQC pseudo and full schedule tallies of an `m`-CZ circuit on `n` wires
/// against their closed forms.
pub fn schedule_resources(n: usize, m: usize) -> Result<Vec<ResourceRow>, VerifyError> {
    let c = cz_ladder(n, m);
    let p = tqc::compile_pseudo(&c)?;
    let f = tqc::compile_full(&c, SingleStyle::default(), CzStyle::default())?;
    Ok(vec![
        counts_row(format!("pseudo n={n} m={m}"), p.resources.counts(), Resources::pseudo_formula(m, n).counts()),
        counts_row(format!("full n={n} m={m}"), f.resources.counts(), Resources::full_formula(m, n).counts()),
    ])
}

/// TQC CZ block tallies and per-cycle substrate costs of the remote-CZ
/// schemes.
pub fn fixed_resources() -> Result<Vec<ResourceRow>, VerifyError> {
    let mut rows = Vec::new();
    for (name, block, want) in [
        ("xtcz4tqc", tqc::xtcz4tqc_block(0, 1), ((2, 3, 2), 3)),
        ("xtcz5tqc", tqc::xtcz5tqc_block(0, 1), ((1, 2, 2), 4)),
    ] {
        let r = count_resources(&Program { width: 2, blocks: vec![block] }, false);
        rows.push(ResourceRow {
            name: name.into(),
            measured: format!("{:?} depth {}", r.counts(), r.depth),
            expected: format!("{:?} depth {}", want.0, want.1),
            ok: (r.counts(), r.depth) == want,
        });
    }
    for (variant, want) in [(Variant::RemoteI, 6), (Variant::RemoteII, 4)] {
        let cf = CycleForm { width: 1, cycles: vec![crate::circuit::Cycle::identity(1)] };
        let (s, _) = owqc::compile_universal(&cf, variant)?;
        let got = s.cost_per_wire_per_cycle();
        rows.push(ResourceRow {
            name: format!("{} qubits per wire per cycle", variant.name()),
            measured: got.to_string(),
            expected: want.to_string(),
            ok: got == want,
        });
    }
    Ok(rows)
}

/// Every closed-form tally for `n ≤ n_max`, `m ≤ m_max`.
pub fn assert_resources(n_max: usize, m_max: usize) -> Result<Vec<ResourceRow>, VerifyError> {
    let mut rows = Vec::new();
    for n in 1..=n_max {
        for m in 0..=m_max {
            if n > 1 || m == 0 {
                rows.extend(schedule_resources(n, m)?);
            }
        }
    }
    rows.extend(fixed_resources()?);
    Ok(rows)
}

/// Table of resource rows as a report.
pub fn resource_report(rows: Vec<ResourceRow>) -> VerificationReport {
    let mut r = VerificationReport::new("resources", "-", 0, SCHEME_TOL);
    r.resources = rows;
    r.finish(&[])
}

/// Named pass/fail result of an acceptance check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, failures: Vec<String>, summary: String) -> Self {
        let passed = failures.is_empty();
        let detail = if passed { summary } else { failures.join("; ") };
        Check { name: name.to_string(), passed, detail }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

fn kron(a: Mat2, b: Mat2) -> Mat4 {
    Mat4::kron(&a, &b)
}

/// The two-qubit gate identities, as `(name, lhs, rhs)`. Matrices
/// index the first factor as the high bit; `V(X)` is the CX controlled by
/// the second factor.
pub fn gate_identities() -> Vec<(&'static str, Mat4, Mat4)> {
    let (i, h) = (Mat2::identity(), Mat2::hadamard());
    let (x, z) = (Pauli::X.matrix(), Pauli::Z.matrix());
    let (cz, cx) = (Mat4::cz(), Mat4::cx());
    let vx = Mat4::swap() * cx * Mat4::swap();
    vec![
        ("hxh=z", kron(h * x * h, i), kron(z, i)),
        ("hzh=x", kron(h * z * h, i), kron(x, i)),
        ("cxcz", kron(i, h) * cz * kron(i, h), cx),
        ("cxxc", kron(h, h) * cx * kron(h, h), vx),
        ("czcom1", cz * kron(x, i) * cz, kron(x, z)),
        ("czcom2", cz * kron(z, i) * cz, kron(z, i)),
        ("cxcom1", cx * kron(x, i) * cx, kron(x, x)),
        ("cxcom2", cx * kron(i, x) * cx, kron(i, x)),
        ("cxcom3", cx * kron(z, i) * cx, kron(z, i)),
        ("cxcom4", cx * kron(i, z) * cx, kron(z, z)),
    ]
}

fn forced(s: &mut StateVector, obs: &ObservableSpec, bit: bool) -> Result<Option<f64>, StateError> {
    match s.measure(obs, Pick::Forced(bit)) {
        Ok((_, p)) => Ok(Some(p)),
        Err(StateError::ImpossibleBranch { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn plus_zero() -> [num_complex::Complex<f64>; 2] {
    [num_complex::Complex::new(1.0, 0.0), num_complex::Complex::new(0.0, 0.0)]
}

/// Worst fidelity and probability gap of a branch comparison.
#[derive(Default)]
struct Worst {
    fidelity: f64,
    prob_gap: f64,
}

impl Worst {
    fn new() -> Self {
        Worst { fidelity: 1.0, prob_gap: 0.0 }
    }

    fn see(&mut self, f: f64, gap: f64) {
        self.fidelity = self.fidelity.min(f);
        self.prob_gap = self.prob_gap.max(gap);
    }

    fn failures(&self, name: &str, out: &mut Vec<String>) {
        if self.fidelity < 1.0 - EXACT_TOL || self.prob_gap > EXACT_TOL {
            out.push(format!("{name}: fidelity {:.3e} below 1, probability gap {:.3e}", 1.0 - self.fidelity, self.prob_gap));
        }
    }
}

/// Ancilla `|0⟩`, H, CZ to both inputs, H, measure: same outcome
/// distribution and post-states as measuring `Z⊗Z` directly.
fn parity_circuit_check(psi: &StateVector, w: &mut Worst) -> Result<(), StateError> {
    for j in [false, true] {
        let mut a = psi.clone();
        let anc = a.push_qubit(plus_zero())?;
        a.apply_1q(anc, &Mat2::hadamard())?;
        a.apply_cz(anc, 0)?;
        a.apply_cz(anc, 1)?;
        a.apply_1q(anc, &Mat2::hadamard())?;
        let pa = forced(&mut a, &ObservableSpec::single(anc, Pauli::Z), j)?;
        let mut b = psi.clone();
        let zz = ObservableSpec::new(vec![Factor::plain(0, Pauli::Z), Factor::plain(1, Pauli::Z)]);
        let pb = forced(&mut b, &zz, j)?;
        match (pa, pb) {
            (Some(pa), Some(pb)) => {
                a.discard(anc)?;
                w.see(fidelity(&a, &b), (pa - pb).abs());
            }
            (None, None) => {}
            (pa, pb) => w.see(1.0, (pa.unwrap_or(0.0) - pb.unwrap_or(0.0)).abs()),
        }
    }
    Ok(())
}

/// CX from wire 1 onto wire 0 then measuring wire 0 leaves on wire 1 what
/// CX from wire 0 onto wire 1, measuring wire 1 and `X^j` leaves on wire 0.
fn cx_measure_check(psi: &StateVector, w: &mut Worst) -> Result<(), StateError> {
    let cx = UnitaryMatrix::Two(Mat4::cx());
    for j in [false, true] {
        let mut a = psi.clone();
        a.apply_unitary(&[1, 0], &cx)?;
        let pa = forced(&mut a, &ObservableSpec::single(0, Pauli::Z), j)?;
        let mut b = psi.clone();
        b.apply_unitary(&[0, 1], &cx)?;
        let pb = forced(&mut b, &ObservableSpec::single(1, Pauli::Z), j)?;
        if let (Some(pa), Some(pb)) = (pa, pb) {
            a.discard(0)?;
            b.discard(1)?;
            if j {
                b.apply_pauli(0, Pauli::X)?;
            }
            w.see(fidelity(&a, &b), (pa - pb).abs());
        } else if pa.is_some() != pb.is_some() {
            w.see(1.0, pa.or(pb).unwrap_or(0.0));
        }
    }
    Ok(())
}

/// `(U⊗V)`, CZ, `(H⊗V†)`, measure wire 0 equals measuring
/// `(U†XU)⊗(V†ZV)`, then `U†ZU` on wire 0 with outcome `k`, then
/// `V†Z^kV` on wire 1, branch by branch on the surviving wire.
fn rotated_pair_check(psi: &StateVector, u: Mat2, v: Mat2, w: &mut Worst) -> Result<(), StateError> {
    for j in [false, true] {
        let mut a = psi.clone();
        a.apply_1q(0, &u)?;
        a.apply_1q(1, &v)?;
        a.apply_cz(0, 1)?;
        a.apply_1q(0, &Mat2::hadamard())?;
        a.apply_1q(1, &v.dagger())?;
        let pa = forced(&mut a, &ObservableSpec::single(0, Pauli::Z), j)?;
        let mut pb_total = 0.0;
        for k in [false, true] {
            let mut b = psi.clone();
            let joint = ObservableSpec::new(vec![Factor::rotated(0, Pauli::X, u), Factor::rotated(1, Pauli::Z, v)]);
            let Some(p1) = forced(&mut b, &joint, j)? else { continue };
            let Some(p2) = forced(&mut b, &ObservableSpec::new(vec![Factor::rotated(0, Pauli::Z, u)]), k)? else { continue };
            pb_total += p1 * p2;
            b.apply_1q(0, &u)?;
            b.discard(0)?;
            if k {
                b.apply_1q(0, &(v.dagger() * Pauli::Z.matrix() * v))?;
            }
            if pa.is_some() {
                let mut a1 = a.clone();
                a1.discard(0)?;
                w.see(fidelity(&a1, &b), 0.0);
            }
        }
        w.see(1.0, (pa.unwrap_or(0.0) - pb_total).abs());
    }
    Ok(())
}

/// Gate identities to 1e-12, then the three measurement equivalences on
/// `states` random two-qubit states.
pub fn check_identities(states: usize, seed: u64) -> Result<Check, VerifyError> {
    let mut failures = Vec::new();
    let mut worst_gate: f64 = 0.0;
    for (name, lhs, rhs) in gate_identities() {
        let d = lhs.max_abs_diff(&rhs);
        worst_gate = worst_gate.max(d);
        if d > 1e-12 {
            failures.push(format!("{name} off by {d:.3e}"));
        }
    }
    let mut rng = TrialRng::new(seed, 0);
    let (mut parity, mut cxm, mut rot) = (Worst::new(), Worst::new(), Worst::new());
    for _ in 0..states {
        let psi = random_state(2, &mut rng)?;
        parity_circuit_check(&psi, &mut parity)?;
        cx_measure_check(&psi, &mut cxm)?;
        let (u, v) = (rng.unitary(), rng.unitary());
        rotated_pair_check(&psi, u, v, &mut rot)?;
    }
    parity.failures("parity measurement circuit", &mut failures);
    cxm.failures("cx then measure", &mut failures);
    rot.failures("rotated pair measurement", &mut failures);
    let worst = parity.fidelity.min(cxm.fidelity).min(rot.fidelity);
    Ok(Check::new(
        "identity suite",
        failures,
        format!("10 gate identities within {worst_gate:.1e}; 3 measurement equivalences on {states} states, min fidelity {worst:.15}"),
    ))
}

/// Every catalog primitive, every branch, `inputs` random inputs each.
pub fn check_primitives(inputs: usize, seed: u64) -> Result<(Check, Vec<VerificationReport>), VerifyError> {
    let reports = CATALOG
        .par_iter()
        .map(|name| verify_primitive(name, inputs, seed))
        .collect::<Result<Vec<_>, _>>()?;
    let failures = reports.iter().filter(|r| !r.passed).map(|r| format!("{} min fidelity {:.15}", r.scheme, r.min_fidelity)).collect();
    let min = reports.iter().map(|r| r.min_fidelity).fold(1.0, f64::min);
    let branches: usize = reports.iter().map(|r| r.branches.len()).sum();
    Ok((
        Check::new("primitive branch oracles", failures, format!("{} primitives, {branches} branches per input, min fidelity {min:.15}", reports.len())),
        reports,
    ))
}

/// Random circuit on `n` wires whose cycle form has at most `max_cycles`
/// cycles: random rotations, Hadamards and CZ/CX between neighbours.
pub fn random_circuit(n: usize, max_cycles: usize, rng: &mut TrialRng) -> Circuit {
    loop {
        let mut c = Circuit::new(n).expect("width is positive");
        let two = if n > 1 { 1 + rng.below(max_cycles.max(1)) } else { 0 };
        for _ in 0..two {
            for q in 0..n {
                match rng.below(3) {
                    0 => c.push(Gate::XRot(q, Angle::new(rng.angle()))).unwrap(),
                    1 => c.push(Gate::ZRot(q, Angle::new(rng.angle()))).unwrap(),
                    _ => c.push(Gate::H(q)).unwrap(),
                }
            }
            let a = rng.below(n - 1);
            if rng.coin() {
                c.push(Gate::Cz(a, a + 1)).unwrap();
            } else {
                c.push(Gate::Cx(a + 1, a)).unwrap();
            }
        }
        for q in 0..n {
            c.push(Gate::XRot(q, Angle::new(rng.angle()))).unwrap();
        }
        if CycleForm::from_circuit(&c).cycles.len() <= max_cycles {
            return c;
        }
    }
}

/// `circuits` random circuits with `n ∈ {2,3,4}` and at most four cycles,
/// every scheme, `trials` seeded trials each.
pub fn check_end_to_end(circuits: usize, trials: usize, seed: u64) -> Result<Check, VerifyError> {
    let mut rng = TrialRng::new(seed, u64::MAX);
    let mut failures = Vec::new();
    let mut min: f64 = 1.0;
    for i in 0..circuits {
        let c = random_circuit(2 + i % 3, 4, &mut rng);
        for scheme in Scheme::ALL {
            let r = verify_random(&c, scheme, trials, seed.wrapping_add(i as u64))?;
            min = min.min(r.min_fidelity);
            if !r.passed {
                failures.push(format!("circuit {i} {scheme}: min fidelity {:.15}", r.min_fidelity));
            }
        }
    }
    Ok(Check::new(
        "end-to-end equivalence",
        failures,
        format!("{circuits} circuits x {} schemes x {trials} trials, min fidelity {min:.15}", Scheme::ALL.len()),
    ))
}

/// Closed-form resource counts.
pub fn check_resources() -> Result<Check, VerifyError> {
    let rows = assert_resources(4, 5)?;
    let failures = rows.iter().filter(|r| !r.ok).map(|r| format!("{}: {} vs {}", r.name, r.measured, r.expected)).collect();
    Ok(Check::new("resource counts", failures, format!("{} tallies match their closed forms", rows.len())))
}

/// All labelled connected graphs on `k` vertices (row 0, columns `0..k`).
pub fn connected_graphs(k: usize) -> Vec<GraphSpec> {
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b))).collect();
    (0u32..1 << pairs.len())
        .filter_map(|mask| {
            let mut g = GraphSpec::new();
            for c in 0..k {
                g.add_vertex(VertexId::new(0, c), Role::Data);
            }
            for (i, &(a, b)) in pairs.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    g.add_edge(VertexId::new(0, a), VertexId::new(0, b)).unwrap();
                }
            }
            g.is_connected().then_some(g)
        })
        .collect()
}

fn apply_frame_z(s: &mut StateVector, f: &PauliFrame) -> Result<(), StateError> {
    for q in 0..f.width() {
        if f.b[q] {
            s.apply_pauli(q, Pauli::Z)?;
        }
    }
    Ok(())
}

/// Z-measuring any vertex of any connected graph with at most
/// `max_vertices` vertices leaves the graph state of the remaining graph
/// after `Z^s` on its former neighbours, for both outcomes.
pub fn check_deletion(max_vertices: usize) -> Result<Check, VerifyError> {
    let graphs: Vec<GraphSpec> = (2..=max_vertices).flat_map(connected_graphs).collect();
    let results = graphs
        .par_iter()
        .map(|g| -> Result<(f64, usize), VerifyError> {
            let state: StateVector = build_graph_state(g)?;
            let mut worst: f64 = 1.0;
            let mut cases = 0;
            for v in g.vertices().collect::<Vec<_>>() {
                for bit in [false, true] {
                    let d = match delete_vertex(&state, g, v, Pick::Forced(bit)) {
                        Ok(d) => d,
                        Err(GraphError::State(StateError::ImpossibleBranch { .. })) => continue,
                        Err(e) => return Err(e.into()),
                    };
                    let mut s = d.state;
                    apply_frame_z(&mut s, &d.frame)?;
                    let mut want_graph = g.clone();
                    want_graph.remove_vertex(v)?;
                    worst = worst.min(fidelity(&s, &build_graph_state(&want_graph)?));
                    cases += 1;
                }
            }
            Ok((worst, cases))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let worst = results.iter().map(|r| r.0).fold(1.0, f64::min);
    let cases: usize = results.iter().map(|r| r.1).sum();
    let failures = if worst < 1.0 - EXACT_TOL { vec![format!("min fidelity {worst:.15}")] } else { Vec::new() };
    Ok(Check::new(
        "deletion principle",
        failures,
        format!("{} connected graphs, {cases} deletions, min fidelity {worst:.15}", graphs.len()),
    ))
}

fn same_graph(a: &GraphSpec, b: &GraphSpec) -> bool {
    a.vertices().eq(b.vertices()) && {
        let mut ea: Vec<_> = a.edges().map(|(x, y)| (x.min(y), x.max(y))).collect();
        let mut eb: Vec<_> = b.edges().map(|(x, y)| (x.min(y), x.max(y))).collect();
        ea.sort();
        eb.sort();
        ea == eb
    }
}

/// Carves the substrate of a remote-CZ scheme out of a cluster state by
/// Z-measuring the deletion set along one random branch; returns the
/// fidelity with the substrate's own graph state and whether the graphs
/// agree.
pub fn embedding_fidelity(variant: Variant, n: usize, m: usize, seed: u64) -> Result<(f64, bool), VerifyError> {
    let cf = CycleForm { width: n, cycles: vec![crate::circuit::Cycle::identity(n); m] };
    let (scheme, pattern) = owqc::compile_universal(&cf, variant)?;
    let emb = owqc::embed_in_cluster(&scheme)?;
    let mut rng = TrialRng::new(seed, 0);
    let mut graph = emb.lattice.clone();
    let mut state: StateVector = build_graph_state(&graph)?;
    let mut owed: std::collections::BTreeMap<VertexId, bool> = std::collections::BTreeMap::new();
    for &v in &emb.deletions {
        let d = delete_vertex(&state, &graph, v, Pick::Random(rng.uniform()))?;
        for (i, u) in d.graph.vertices().enumerate() {
            if d.frame.b[i] {
                *owed.entry(u).or_insert(false) ^= true;
            }
        }
        owed.remove(&v);
        state = d.state;
        graph = d.graph;
    }
    for (i, u) in graph.vertices().enumerate() {
        if owed.get(&u) == Some(&true) {
            state.apply_pauli(i, Pauli::Z)?;
        }
    }
    let same = same_graph(&graph, &pattern.graph);
    let want: StateVector = build_graph_state(&pattern.graph)?;
    Ok((if same { fidelity(&state, &want) } else { 0.0 }, same))
}

/// Remote-CZ substrates for `n = 2`, one cycle, recovered from the cluster.
pub fn check_embedding(seed: u64) -> Result<Check, VerifyError> {
    let mut failures = Vec::new();
    let mut parts = Vec::new();
    for variant in [Variant::RemoteI, Variant::RemoteII] {
        let (f, same) = embedding_fidelity(variant, 2, 1, seed)?;
        if !same || f < 1.0 - EXACT_TOL {
            failures.push(format!("{}: graph match {same}, fidelity {f:.15}", variant.name()));
        }
        parts.push(format!("{} fidelity {f:.15}", variant.name()));
    }
    Ok(Check::new("cluster embedding", failures, parts.join(", ")))
}

/// Two runs of the same seeded verification serialize identically.
pub fn check_determinism(seed: u64) -> Result<Check, VerifyError> {
    let c = random_circuit(3, 3, &mut TrialRng::new(seed, 1));
    let mut failures = Vec::new();
    for scheme in Scheme::ALL {
        let a = verify_random(&c, scheme, 50, seed)?.to_json();
        let b = verify_random(&c, scheme, 50, seed)?.to_json();
        if a != b {
            failures.push(format!("{scheme} reports differ"));
        }
    }
    Ok(Check::new("determinism", failures, format!("{} schemes, byte-identical reports", Scheme::ALL.len())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scheme_selector_round_trips() {
        for s in Scheme::ALL {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
        assert_eq!(Scheme::select("all").unwrap().len(), 7);
        assert!(Scheme::select("bogus").is_err());
    }

    #[test]
    fn connected_graph_counts() {
        // labelled connected graphs: 1, 4, 38, 728
        let counts: Vec<usize> = (2..=5).map(|k| connected_graphs(k).len()).collect();
        assert_eq!(counts, vec![1, 4, 38, 728]);
    }

    #[test]
    fn measurement_free_fragment_is_plain_overlap() {
        let p = Program { width: 1, blocks: Vec::new() };
        let mut rng = TrialRng::new(1, 0);
        let cases = branch_inputs(1, 3, &mut rng).unwrap();
        let r = branch_report("empty", &p, &cases, |i, _, _| Ok(i.clone())).unwrap();
        assert_eq!(r.branches.len(), 1);
        assert!(r.passed);
    }
}
