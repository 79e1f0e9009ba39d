//! Pauli-frame bookkeeping: byproduct tracking, Clifford conjugation and the
//! closed-form frame updates of every teleportation primitive.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::linalg::{Mat2, Mat4, Pauli};

/// Per-wire Pauli byproduct `X^a Z^b` and the physical qubit holding each wire.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliFrame {
    pub a: Vec<bool>,
    pub b: Vec<bool>,
    pub loc: Vec<usize>,
}

impl PauliFrame {
    /// Trivial frame with wire `w` on physical qubit `w`.
    pub fn identity(width: usize) -> Self {
        PauliFrame { a: vec![false; width], b: vec![false; width], loc: (0..width).collect() }
    }

    pub fn from_bits(bits: &[(bool, bool)]) -> Self {
        let mut f = Self::identity(bits.len());
        for (w, &(a, b)) in bits.iter().enumerate() {
            f.a[w] = a;
            f.b[w] = b;
        }
        f
    }

    pub fn width(&self) -> usize {
        self.a.len()
    }

    pub fn pauli(&self, w: usize) -> Pauli {
        Pauli::from_bits(self.a[w], self.b[w])
    }

    /// `X^a Z^b` for wire `w`.
    pub fn operator(&self, w: usize) -> Mat2 {
        let x = if self.a[w] { Pauli::X.matrix() } else { Mat2::identity() };
        let z = if self.b[w] { Pauli::Z.matrix() } else { Mat2::identity() };
        x * z
    }

    pub fn is_trivial(&self) -> bool {
        !self.a.iter().chain(&self.b).any(|&v| v)
    }

    /// Bitwise product of two frames; locations are taken from `self`.
    pub fn compose(&self, other: &PauliFrame) -> Result<PauliFrame, FrameError> {
        if self.width() != other.width() {
            return Err(FrameError::WidthMismatch { left: self.width(), right: other.width() });
        }
        let mut out = self.clone();
        for w in 0..self.width() {
            out.a[w] ^= other.a[w];
            out.b[w] ^= other.b[w];
        }
        Ok(out)
    }

    fn check_wire(&self, w: usize) -> Result<(), FrameError> {
        if w >= self.width() {
            return Err(FrameError::UnknownWire(w));
        }
        Ok(())
    }
}

impl fmt::Display for PauliFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for w in 0..self.width() {
            if w > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", self.pauli(w).symbol())?;
        }
        Ok(())
    }
}

/// Frame-level failures.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FrameError {
    #[error("frame widths differ: {left} vs {right}")]
    WidthMismatch { left: usize, right: usize },
    #[error("wire {0} is not tracked by the frame")]
    UnknownWire(usize),
    #[error("outcome `{0}` missing for frame update")]
    MissingOutcome(String),
    #[error("gate is not Clifford: Pauli image is not a Pauli")]
    NotClifford,
    #[error("{0} expects {1} wire(s)")]
    Arity(&'static str, usize),
}

/// One recorded measurement outcome.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Outcome {
    pub step: usize,
    pub name: String,
    pub bit: bool,
}

/// Ordered measurement outcomes of a run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub entries: Vec<Outcome>,
}

impl OutcomeRecord {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, step: usize, name: impl Into<String>, bit: bool) {
        self.entries.push(Outcome { step, name: name.into(), bit });
    }

    /// Most recent outcome with the given name.
    pub fn get(&self, name: &str) -> Option<bool> {
        self.entries.iter().rev().find(|o| o.name == name).map(|o| o.bit)
    }

    pub fn require(&self, name: &str) -> Result<bool, FrameError> {
        self.get(name).ok_or_else(|| FrameError::MissingOutcome(name.to_string()))
    }

    pub fn bits(&self) -> Vec<bool> {
        self.entries.iter().map(|o| o.bit).collect()
    }
}

fn pauli_image(u: &Mat2, p: Pauli) -> Result<(Pauli, bool), FrameError> {
    let img = *u * p.matrix() * u.dagger();
    for q in [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z] {
        let m = q.matrix::<f64>();
        if img.approx_eq(&m, 1e-9) {
            return Ok((q, false));
        }
        if img.approx_eq(&m.scale(num_complex::Complex::new(-1.0, 0.0)), 1e-9) {
            return Ok((q, true));
        }
    }
    Err(FrameError::NotClifford)
}

/// Frame `P'` with `U · P = P' · U` up to phase, for a one- or two-qubit
/// Clifford `U` acting on the listed wires.
pub fn conjugate_through(
    frame: &PauliFrame,
    gate: &crate::linalg::UnitaryMatrix,
    wires: &[usize],
) -> Result<PauliFrame, FrameError> {
    use crate::linalg::UnitaryMatrix;
    let mut out = frame.clone();
    match gate {
        UnitaryMatrix::One(u) => {
            let &[w] = wires else { return Err(FrameError::Arity("single-qubit gate", 1)) };
            frame.check_wire(w)?;
            let (img, _) = pauli_image(u, frame.pauli(w))?;
            let (a, b) = img.bits();
            out.a[w] = a;
            out.b[w] = b;
        }
        UnitaryMatrix::Two(u) => {
            let &[w0, w1] = wires else { return Err(FrameError::Arity("two-qubit gate", 2)) };
            frame.check_wire(w0)?;
            frame.check_wire(w1)?;
            let p = Mat4::kron(&frame.pauli(w0).matrix(), &frame.pauli(w1).matrix());
            let img = *u * p * u.dagger();
            let mut found = None;
            'search: for q0 in [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z] {
                for q1 in [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z] {
                    if img.eq_up_to_phase(&Mat4::kron(&q0.matrix(), &q1.matrix()), 1e-9) {
                        found = Some((q0, q1));
                        break 'search;
                    }
                }
            }
            let (q0, q1) = found.ok_or(FrameError::NotClifford)?;
            (out.a[w0], out.b[w0]) = q0.bits();
            (out.a[w1], out.b[w1]) = q1.bits();
        }
    }
    Ok(out)
}

/// Teleportation and gate primitives with closed-form frame updates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PrimitiveKind {
    /// Bell-measurement teleportation: `(a+d, b+c)`.
    Teleport,
    /// Rotated Bell measurement absorbing the frame: `(d, c)`.
    TeleportRotated,
    /// Clifford teleported through the resource: Clifford image of `(a+d, b+c)`.
    TeleportClifford,
    /// One-bit Z teleportation: `(a, b+c)`.
    ZTeleport,
    /// One-bit X teleportation: `(a+d, b)`.
    XTeleport,
    /// Z teleportation with frame-absorbing rotated measurement: `(0, c)`.
    UZTeleport,
    /// X teleportation with frame-absorbing rotated measurement: `(d, 0)`.
    UXTeleport,
    /// Adaptive Z rotation then Z teleportation: `(a, b+c)`.
    ZRotation,
    /// Adaptive X rotation then X teleportation: `(a+d, b)`.
    XRotation,
    /// Z teleportations on two wires with an optional CZ in between.
    OneBitTeleportCz { k: bool },
    /// X teleportations on two wires with a CZ between the ancillas.
    XTeleportCz,
    /// CZ through ancillas, data stays in place: `b1 += a2+d2`, `b2 += a1+d1`.
    RemoteCz,
    /// Measurement-only rotated Z teleportation: `(k, c)`.
    UZTeleportTqc,
    /// Measurement-only rotated X teleportation: `(d, k)`.
    UXTeleportTqc,
    /// Measurement-only CZ with two ancillas.
    CzTwoAncillaTqc,
    /// Measurement-only CZ with one ancilla.
    CzOneAncillaTqc,
    /// Graph CZ across a two-vertex ancilla chain (`d1`, `d2`, or deletion `s1`, `s2`).
    RemoteCzChain { enact: bool },
    /// Graph CZ across one Y-measured ancilla (`s` on deletion).
    RemoteCzY { enact: bool },
    /// Routed X teleportation: `(a+k+d, b)`.
    XTeleportRouting,
    /// Routed Z teleportation: `(a+k, b+c)`.
    ZTeleportRouting,
    /// CZ measured in rotated bases; the frame is unchanged and the
    /// non-Pauli byproducts are queued on the wires.
    RotatedCz,
}

impl PrimitiveKind {
    pub fn arity(self) -> usize {
        use PrimitiveKind::*;
        match self {
            OneBitTeleportCz { .. } | XTeleportCz | RemoteCz | CzTwoAncillaTqc | CzOneAncillaTqc => 2,
            RemoteCzChain { .. } | RemoteCzY { .. } | RotatedCz => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        use PrimitiveKind::*;
        match self {
            Teleport => "teleport",
            TeleportRotated => "teleportu",
            TeleportClifford => "teleportgc",
            ZTeleport => "zt",
            XTeleport => "xt",
            UZTeleport => "uzt",
            UXTeleport => "uxt",
            ZRotation => "zrot",
            XRotation => "xrot",
            OneBitTeleportCz { .. } => "1bittelepcz",
            XTeleportCz => "xtcz",
            RemoteCz => "xtcz4",
            UZTeleportTqc => "uzttqc",
            UXTeleportTqc => "uxttqc",
            CzTwoAncillaTqc => "xtcz4tqc",
            CzOneAncillaTqc => "xtcz5tqc",
            RemoteCzChain { .. } => "rcz",
            RemoteCzY { .. } => "rcz2",
            XTeleportRouting => "xt-routing",
            ZTeleportRouting => "zt-routing",
            RotatedCz => "pseudo-cz",
        }
    }
}

/// A primitive applied to specific wires, with the physical qubits the
/// wires occupy afterwards.
#[derive(Clone, Debug, PartialEq)]
pub struct Primitive {
    pub kind: PrimitiveKind,
    pub wires: Vec<usize>,
    pub dests: Vec<usize>,
    /// Clifford carried by `TeleportClifford`.
    pub clifford: Option<Mat2>,
}

impl Primitive {
    /// Primitive whose wires stay on their current qubits.
    pub fn in_place(kind: PrimitiveKind, wires: Vec<usize>, frame: &PauliFrame) -> Self {
        let dests = wires.iter().map(|&w| frame.loc[w]).collect();
        Primitive { kind, wires, dests, clifford: None }
    }

    pub fn moving(kind: PrimitiveKind, wires: Vec<usize>, dests: Vec<usize>) -> Self {
        Primitive { kind, wires, dests, clifford: None }
    }
}

/// Applies the closed-form frame update of `p` given its outcomes.
///
/// Outcome names: `c`, `d`, `k` for one-wire primitives; `c1`, `c2`,
/// `d1`, `d2`, `k1`, `k2`, `s1`, `s2` for two-wire ones.
pub fn frame_update(
    frame: &PauliFrame,
    p: &Primitive,
    outcomes: &OutcomeRecord,
) -> Result<PauliFrame, FrameError> {
    use PrimitiveKind::*;
    if p.wires.len() != p.kind.arity() || p.dests.len() != p.wires.len() {
        return Err(FrameError::Arity(p.kind.name(), p.kind.arity()));
    }
    for &w in &p.wires {
        frame.check_wire(w)?;
    }
    let o = |n: &str| outcomes.require(n);
    let mut f = frame.clone();
    let w = p.wires[0];
    match p.kind {
        Teleport | TeleportClifford => {
            f.a[w] ^= o("d")?;
            f.b[w] ^= o("c")?;
            if p.kind == TeleportClifford {
                let u = p.clifford.ok_or(FrameError::NotClifford)?;
                f = conjugate_through(&f, &crate::linalg::UnitaryMatrix::One(u), &[w])?;
            }
        }
        TeleportRotated => {
            f.a[w] = o("d")?;
            f.b[w] = o("c")?;
        }
        ZTeleport | ZRotation => f.b[w] ^= o("c")?,
        XTeleport | XRotation => f.a[w] ^= o("d")?,
        UZTeleport => {
            f.a[w] = false;
            f.b[w] = o("c")?;
        }
        UXTeleport => {
            f.a[w] = o("d")?;
            f.b[w] = false;
        }
        UZTeleportTqc => {
            f.a[w] = o("k")?;
            f.b[w] = o("c")?;
        }
        UXTeleportTqc => {
            f.a[w] = o("d")?;
            f.b[w] = o("k")?;
        }
        XTeleportRouting => f.a[w] ^= o("k")? ^ o("d")?,
        ZTeleportRouting => {
            f.a[w] ^= o("k")?;
            f.b[w] ^= o("c")?;
        }
        OneBitTeleportCz { k } => {
            let (w1, w2) = (w, p.wires[1]);
            f.b[w1] ^= (frame.a[w2] & k) ^ o("c1")?;
            f.b[w2] ^= (frame.a[w1] & k) ^ o("c2")?;
        }
        XTeleportCz => {
            let (w1, w2) = (w, p.wires[1]);
            let (d1, d2) = (o("d1")?, o("d2")?);
            f.a[w1] ^= d1;
            f.a[w2] ^= d2;
            f.b[w1] ^= frame.a[w2] ^ d2;
            f.b[w2] ^= frame.a[w1] ^ d1;
        }
        RemoteCz | CzOneAncillaTqc | CzTwoAncillaTqc => {
            let (w1, w2) = (w, p.wires[1]);
            let (d1, d2) = (o("d1")?, o("d2")?);
            f.b[w1] ^= frame.a[w2] ^ d2;
            f.b[w2] ^= frame.a[w1] ^ d1;
            if p.kind == CzTwoAncillaTqc {
                f.b[w1] ^= o("k1")?;
            }
            if p.kind != RemoteCz {
                f.b[w2] ^= o("k2")?;
            }
        }
        RemoteCzChain { enact: true } => {
            let (w1, w2) = (w, p.wires[1]);
            f.b[w1] ^= frame.a[w2] ^ o("d2")?;
            f.b[w2] ^= frame.a[w1] ^ o("d1")?;
        }
        RemoteCzChain { enact: false } => {
            f.b[w] ^= o("s1")?;
            f.b[p.wires[1]] ^= o("s2")?;
        }
        RemoteCzY { enact: true } => {
            let (w1, w2) = (w, p.wires[1]);
            f.b[w1] ^= frame.a[w2];
            f.b[w2] ^= frame.a[w1];
        }
        RotatedCz => {}
        RemoteCzY { enact: false } => {
            let s = o("s")?;
            f.b[w] ^= s;
            f.b[p.wires[1]] ^= s;
        }
    }
    for (&w, &d) in p.wires.iter().zip(&p.dests) {
        f.loc[w] = d;
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::UnitaryMatrix;

    #[test]
    fn hadamard_swaps_frame_bits() {
        let f = PauliFrame::from_bits(&[(true, false)]);
        let g = conjugate_through(&f, &UnitaryMatrix::One(Mat2::hadamard()), &[0]).unwrap();
        assert_eq!((g.a[0], g.b[0]), (false, true));
    }

    #[test]
    fn cz_propagates_x_into_partner_z() {
        let f = PauliFrame::from_bits(&[(true, false), (false, false)]);
        let g = conjugate_through(&f, &UnitaryMatrix::Two(Mat4::cz()), &[0, 1]).unwrap();
        assert_eq!(g, PauliFrame::from_bits(&[(true, false), (false, true)]));
    }

    #[test]
    fn cx_rules() {
        let f = PauliFrame::from_bits(&[(true, false), (false, true)]);
        let g = conjugate_through(&f, &UnitaryMatrix::Two(Mat4::cx()), &[0, 1]).unwrap();
        assert_eq!(g, PauliFrame::from_bits(&[(true, true), (true, true)]));
    }

    #[test]
    fn non_clifford_rejected() {
        let f = PauliFrame::from_bits(&[(true, false)]);
        let t = UnitaryMatrix::One(Mat2::zrot(std::f64::consts::PI / 8.0));
        assert_eq!(conjugate_through(&f, &t, &[0]), Err(FrameError::NotClifford));
    }

    #[test]
    fn compose_checks_width() {
        let f = PauliFrame::identity(2);
        assert!(f.compose(&PauliFrame::identity(3)).is_err());
        let g = PauliFrame::from_bits(&[(true, true), (false, true)]);
        assert_eq!(f.compose(&g).unwrap(), g);
    }

    #[test]
    fn missing_outcome_is_an_error() {
        let f = PauliFrame::identity(1);
        let p = Primitive::in_place(PrimitiveKind::ZTeleport, vec![0], &f);
        assert_eq!(
            frame_update(&f, &p, &OutcomeRecord::new()),
            Err(FrameError::MissingOutcome("c".into()))
        );
    }
}
