//! Catalog of teleportation-based gate primitives as executable programs,
//! each paired with the ideal gate it implements.

use crate::linalg::{Mat2, Mat4, Pauli, UnitaryMatrix};
use crate::pauli::{FrameError, OutcomeRecord, PauliFrame, PrimitiveKind};
use crate::program::{Block, GateOp, ObsFactor, Program, QubitRef};
use crate::statevec::{PrepKind, TrialRng};
use crate::tqc;

const W0: QubitRef = QubitRef::Wire(0);
const W1: QubitRef = QubitRef::Wire(1);
const A0: QubitRef = QubitRef::Anc(0);
const A1: QubitRef = QubitRef::Anc(1);

fn fixed1(m: Mat2) -> GateOp {
    GateOp::Fixed(UnitaryMatrix::One(m))
}

fn fixed2(m: Mat4) -> GateOp {
    GateOp::Fixed(UnitaryMatrix::Two(m))
}

fn z(at: QubitRef) -> ObsFactor {
    ObsFactor::plain(at, Pauli::Z)
}

fn x(at: QubitRef) -> ObsFactor {
    ObsFactor::plain(at, Pauli::X)
}

/// Gate applied to wires by an ideal primitive.
#[derive(Clone, Debug, PartialEq)]
pub struct IdealGate {
    pub wires: Vec<usize>,
    pub unitary: UnitaryMatrix,
}

/// Gate a primitive should realize.
#[derive(Clone, Debug, PartialEq)]
pub enum Ideal {
    Fixed(Vec<IdealGate>),
    /// `Λ(Z)·(R⊗R)` with `R_i = Z_{(−1)^{d+a_i} π/4}`, where `d` is the
    /// Y-measurement outcome and `a_i` the input X bit of wire `i`.
    CzWithYPhase,
}

impl Ideal {
    pub fn gates(&self, record: &OutcomeRecord, input: &PauliFrame) -> Result<Vec<IdealGate>, FrameError> {
        match self {
            Ideal::Fixed(g) => Ok(g.clone()),
            Ideal::CzWithYPhase => {
                let d = record.require("d")?;
                let r = |a: bool| {
                    let sign = if d ^ a { -1.0 } else { 1.0 };
                    Mat2::zrot(sign * std::f64::consts::FRAC_PI_4)
                };
                let u = Mat4::cz() * Mat4::kron(&r(input.a[0]), &r(input.a[1]));
                Ok(vec![IdealGate { wires: vec![0, 1], unitary: UnitaryMatrix::Two(u) }])
            }
        }
    }
}

/// A primitive program and the gate it should realize.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub program: Program,
    pub ideal: Ideal,
}

/// Names accepted by [`catalog_entry`].
pub const CATALOG: &[&str] = &[
    "teleport",
    "teleportu",
    "teleportgc",
    "zt",
    "xt",
    "uzt",
    "uxt",
    "zrot",
    "xrot",
    "1bittelepcz0",
    "1bittelepcz1",
    "xtcz",
    "xtcz2",
    "xtcz3",
    "xtcz4",
    "xtcz5",
    "uzttqc",
    "uxttqc",
    "xtcz4tqc",
    "xtcz5tqc",
    "pseudo-cz",
    "rcz-enact",
    "rcz-delete",
    "rcz2-enact",
    "rcz2-delete",
    "xt-routing",
    "zt-routing",
];

fn z_teleport_ops(b: Block, wire: QubitRef, anc: QubitRef) -> Block {
    b.prep(PrepKind::Zero, vec![anc])
        .gate(vec![wire, anc], fixed2(Mat4::cx()))
        .gate(vec![wire], fixed1(Mat2::hadamard()))
        .measure(vec![z(wire)], "c")
        .release(vec![wire])
}

fn x_teleport_ops(b: Block, wire: QubitRef, anc: QubitRef) -> Block {
    b.prep(PrepKind::Plus, vec![anc])
        .gate(vec![anc, wire], fixed2(Mat4::cx()))
        .measure(vec![z(wire)], "d")
        .release(vec![wire])
}

fn bell_measure(b: Block, conj: Option<Mat2>) -> Block {
    let f = |p: Pauli| match conj {
        Some(u) => ObsFactor::adaptive(W0, p, u, 0),
        None => ObsFactor::plain(W0, p),
    };
    b.measure(vec![f(Pauli::X), x(A0)], "c").measure(vec![f(Pauli::Z), z(A0)], "d").release(vec![W0, A0])
}

fn one(program: Block, width: usize) -> Program {
    Program { width, blocks: vec![program] }
}

fn ideal1(u: Mat2) -> Vec<IdealGate> {
    vec![IdealGate { wires: vec![0], unitary: UnitaryMatrix::One(u) }]
}

fn ideal2_identity() -> Vec<IdealGate> {
    vec![IdealGate { wires: vec![0, 1], unitary: UnitaryMatrix::Two(Mat4::identity()) }]
}

fn ideal_cz() -> Vec<IdealGate> {
    vec![IdealGate { wires: vec![0, 1], unitary: UnitaryMatrix::Two(Mat4::cz()) }]
}

/// Single-qubit Cliffords used to exercise Clifford teleportation.
pub fn clifford_samples() -> Vec<Mat2> {
    let s = Mat2::zrot(std::f64::consts::FRAC_PI_4);
    vec![Mat2::hadamard(), Mat2::hprime(), s, Pauli::X.matrix(), s * Mat2::hadamard()]
}

/// Builds a catalog entry, drawing any free parameter (angle, unitary)
/// from `rng`.
pub fn catalog_entry(name: &str, rng: &mut TrialRng) -> Option<CatalogEntry> {
    use PrimitiveKind as K;
    let (program, ideal) = match name {
        "teleport" => {
            let b = Block::new(K::Teleport, vec![0], 2).prep(PrepKind::Bell, vec![A0, A1]);
            (one(bell_measure(b, None).moving_to(vec![A1]), 1), ideal1(Mat2::identity()))
        }
        "teleportu" => {
            let u = rng.unitary();
            let b = Block::new(K::TeleportRotated, vec![0], 2).prep(PrepKind::Bell, vec![A0, A1]);
            (one(bell_measure(b, Some(u)).moving_to(vec![A1]), 1), ideal1(u))
        }
        "teleportgc" => {
            let cl = clifford_samples();
            let u = cl[rng.below(cl.len())];
            let mut b = Block::new(K::TeleportClifford, vec![0], 2)
                .prep(PrepKind::Bell, vec![A0, A1])
                .gate(vec![A1], fixed1(u));
            b.clifford = Some(u);
            (one(bell_measure(b, None).moving_to(vec![A1]), 1), ideal1(u))
        }
        "zt" => (one(z_teleport_ops(Block::new(K::ZTeleport, vec![0], 1), W0, A0).moving_to(vec![A0]), 1), ideal1(Mat2::identity())),
        "xt" => (one(x_teleport_ops(Block::new(K::XTeleport, vec![0], 1), W0, A0).moving_to(vec![A0]), 1), ideal1(Mat2::identity())),
        "uzt" | "uxt" => {
            let u = rng.unitary();
            let kind = if name == "uzt" { K::UZTeleport } else { K::UXTeleport };
            let b = Block::new(kind, vec![0], 1).gate(vec![W0], GateOp::AdaptiveUnitary { base: u, wire: 0 });
            let b = if name == "uzt" { z_teleport_ops(b, W0, A0) } else { x_teleport_ops(b, W0, A0) };
            (one(b.moving_to(vec![A0]), 1), ideal1(u))
        }
        "zrot" => {
            let theta = rng.angle();
            let b = Block::new(K::ZRotation, vec![0], 1).gate(vec![W0], GateOp::AdaptiveRot { axis: Pauli::Z, theta, wire: 0 });
            (one(z_teleport_ops(b, W0, A0).moving_to(vec![A0]), 1), ideal1(Mat2::zrot(theta)))
        }
        "xrot" => {
            let theta = rng.angle();
            let b = Block::new(K::XRotation, vec![0], 1).gate(vec![W0], GateOp::AdaptiveRot { axis: Pauli::X, theta, wire: 0 });
            (one(x_teleport_ops(b, W0, A0).moving_to(vec![A0]), 1), ideal1(Mat2::xrot(theta)))
        }
        "1bittelepcz0" | "1bittelepcz1" => {
            let k = name.ends_with('1');
            let mut b = Block::new(K::OneBitTeleportCz { k }, vec![0, 1], 2)
                .prep(PrepKind::Zero, vec![A0])
                .prep(PrepKind::Zero, vec![A1])
                .gate(vec![W0, A0], fixed2(Mat4::cx()))
                .gate(vec![W1, A1], fixed2(Mat4::cx()));
            if k {
                b = b.gate(vec![A0, A1], fixed2(Mat4::cz()));
            }
            let b = b
                .gate(vec![W0], fixed1(Mat2::hadamard()))
                .gate(vec![W1], fixed1(Mat2::hadamard()))
                .measure(vec![z(W0)], "c1")
                .measure(vec![z(W1)], "c2")
                .release(vec![W0])
                .release(vec![W1])
                .moving_to(vec![A0, A1]);
            let ideal = if k { ideal_cz() } else { ideal1(Mat2::identity()) };
            (one(b, 2), ideal)
        }
        "xtcz" | "xtcz2" => {
            let mut b = Block::new(K::XTeleportCz, vec![0, 1], 2)
                .prep(PrepKind::Plus, vec![A0])
                .prep(PrepKind::Plus, vec![A1]);
            if name == "xtcz2" {
                b = b.gate(vec![A0, A1], fixed2(Mat4::cz()));
            }
            b = b
                .gate(vec![A0, W0], fixed2(Mat4::cx()))
                .gate(vec![A1, W1], fixed2(Mat4::cx()))
                .measure(vec![z(W0)], "d1")
                .measure(vec![z(W1)], "d2")
                .release(vec![W0])
                .release(vec![W1]);
            if name == "xtcz" {
                b = b.gate(vec![A0, A1], fixed2(Mat4::cz()));
            }
            (one(b.moving_to(vec![A0, A1]), 2), ideal_cz())
        }
        "xtcz3" => {
            let b = Block::new(K::RemoteCz, vec![0, 1], 2)
                .prep(PrepKind::Plus, vec![A0])
                .prep(PrepKind::Plus, vec![A1])
                .gate(vec![A0, A1], fixed2(Mat4::cz()))
                .gate(vec![W0, A0], fixed2(Mat4::cx()))
                .gate(vec![W1, A1], fixed2(Mat4::cx()))
                .measure(vec![z(A0)], "d1")
                .measure(vec![z(A1)], "d2")
                .release(vec![A0])
                .release(vec![A1]);
            (one(b, 2), ideal_cz())
        }
        "xtcz4" => {
            let b = Block::new(K::RemoteCz, vec![0, 1], 2)
                .prep(PrepKind::Plus, vec![A0])
                .prep(PrepKind::Plus, vec![A1])
                .gate(vec![A0, A1], fixed2(Mat4::cz()))
                .gate(vec![W0, A0], fixed2(Mat4::cz()))
                .gate(vec![W1, A1], fixed2(Mat4::cz()))
                .gate(vec![A0], fixed1(Mat2::hadamard()))
                .gate(vec![A1], fixed1(Mat2::hadamard()))
                .measure(vec![z(A0)], "d1")
                .measure(vec![z(A1)], "d2")
                .release(vec![A0])
                .release(vec![A1]);
            (one(b, 2), ideal_cz())
        }
        "xtcz5" => {
            let b = Block::new(K::RemoteCz, vec![0, 1], 1)
                .prep(PrepKind::Plus, vec![A0])
                .measure(vec![z(W0), z(A0)], "d1")
                .gate(vec![A0, W1], fixed2(Mat4::cz()))
                .gate(vec![A0], fixed1(Mat2::hadamard()))
                .measure(vec![z(A0)], "d2")
                .release(vec![A0]);
            (one(b, 2), ideal_cz())
        }
        "uzttqc" | "uxttqc" => {
            let u = rng.unitary();
            let b = if name == "uzttqc" { tqc::uzttqc_block(0, u) } else { tqc::uxttqc_block(0, u) };
            (one(b, 1), ideal1(u))
        }
        "xtcz4tqc" => (one(tqc::xtcz4tqc_block(0, 1), 2), ideal_cz()),
        "xtcz5tqc" => (one(tqc::xtcz5tqc_block(0, 1), 2), ideal_cz()),
        "pseudo-cz" => {
            let (u, v) = (rng.unitary(), rng.unitary());
            let w = Mat4::kron(&u.dagger(), &v.dagger()) * Mat4::cz() * Mat4::kron(&u, &v);
            let ideal = vec![IdealGate { wires: vec![0, 1], unitary: UnitaryMatrix::Two(w) }];
            (one(tqc::pseudo_cz_block(0, 1, u, v), 2), ideal)
        }
        "rcz-enact" | "rcz-delete" => {
            let enact = name == "rcz-enact";
            let mut b = Block::new(K::RemoteCzChain { enact }, vec![0, 1], 2)
                .prep(PrepKind::Plus, vec![A0])
                .prep(PrepKind::Plus, vec![A1])
                .gate(vec![W0, A0], fixed2(Mat4::cz()))
                .gate(vec![A0, A1], fixed2(Mat4::cz()))
                .gate(vec![A1, W1], fixed2(Mat4::cz()));
            b = if enact {
                b.measure(vec![x(A0)], "d1").measure(vec![x(A1)], "d2")
            } else {
                b.measure(vec![z(A0)], "s1").measure(vec![z(A1)], "s2")
            };
            let b = b.release(vec![A0]).release(vec![A1]);
            (one(b, 2), if enact { ideal_cz() } else { ideal2_identity() })
        }
        "rcz2-enact" | "rcz2-delete" => {
            let enact = name == "rcz2-enact";
            let b = Block::new(K::RemoteCzY { enact }, vec![0, 1], 1)
                .prep(PrepKind::Plus, vec![A0])
                .gate(vec![W0, A0], fixed2(Mat4::cz()))
                .gate(vec![A0, W1], fixed2(Mat4::cz()));
            let b = if enact {
                b.measure(vec![ObsFactor::plain(A0, Pauli::Y)], "d")
            } else {
                b.measure(vec![z(A0)], "s")
            };
            let b = b.release(vec![A0]);
            if enact {
                return Some(CatalogEntry { name: name.to_string(), program: one(b, 2), ideal: Ideal::CzWithYPhase });
            }
            (one(b, 2), ideal2_identity())
        }
        "xt-routing" => {
            // Two candidate destinations; measuring the second leaves it in |k⟩.
            let b = Block::new(K::XTeleportRouting, vec![0], 2)
                .prep(PrepKind::Plus, vec![A0])
                .prep(PrepKind::Plus, vec![A1])
                .gate(vec![A0, W0], fixed2(Mat4::cx()))
                .gate(vec![A1, W0], fixed2(Mat4::cx()))
                .measure(vec![z(A1)], "k")
                .measure(vec![z(W0)], "d")
                .release(vec![W0])
                .release(vec![A1])
                .moving_to(vec![A0]);
            (one(b, 1), ideal1(Mat2::identity()))
        }
        "zt-routing" => {
            // A known |k⟩ is produced by measuring |+⟩, then both candidate
            // sources feed the destination.
            let b = Block::new(K::ZTeleportRouting, vec![0], 2)
                .prep(PrepKind::Plus, vec![A0])
                .measure(vec![z(A0)], "k")
                .prep(PrepKind::Zero, vec![A1])
                .gate(vec![A0, A1], fixed2(Mat4::cx()))
                .gate(vec![W0, A1], fixed2(Mat4::cx()))
                .gate(vec![W0], fixed1(Mat2::hadamard()))
                .measure(vec![z(W0)], "c")
                .release(vec![W0])
                .release(vec![A0])
                .moving_to(vec![A1]);
            (one(b, 1), ideal1(Mat2::identity()))
        }
        _ => return None,
    };
    Some(CatalogEntry { name: name.to_string(), program, ideal: Ideal::Fixed(ideal) })
}
