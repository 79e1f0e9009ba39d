//! Gate-level circuits, the text format, Euler decomposition and normal forms.

mod cycles;
mod euler;
mod parse;

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::linalg::{Mat2, Mat4, Pauli, UnitaryMatrix};
use crate::scalar::Real;

pub use cycles::{Composite, CompositeForm, Cycle, CycleForm, CycleFormError, ElementaryOp};
pub use euler::{euler_decompose, EulerAngles};
pub use parse::ParseError;

/// Rotation angle canonicalized to `(−π, π]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Angle<T = f64>(T);

impl<T: Real> Angle<T> {
    pub fn new(radians: T) -> Self {
        let two_pi = T::PI() + T::PI();
        let mut r = radians % two_pi;
        if r <= -T::PI() {
            r = r + two_pi;
        } else if r > T::PI() {
            r = r - two_pi;
        }
        Angle(r)
    }

    pub fn zero() -> Self {
        Angle(T::zero())
    }

    pub fn radians(self) -> T {
        self.0
    }

    pub fn is_zero(self, tol: T) -> bool {
        self.0.abs() <= tol
    }
}

impl<T: Real> std::ops::Neg for Angle<T> {
    type Output = Self;

    fn neg(self) -> Self {
        Angle::new(-self.0)
    }
}

impl<T: Real> std::ops::Add for Angle<T> {
    type Output = Self;

    fn add(self, other: Self) -> Self {
        Angle::new(self.0 + other.0)
    }
}

/// `(−1)^bit · θ`, the sign-adapted angle used by feed-forward.
pub fn adapted_angle<T: Real>(bit: bool, theta: Angle<T>) -> Angle<T> {
    if bit {
        -theta
    } else {
        theta
    }
}

/// One gate of the circuit model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate<T = f64> {
    I(usize),
    X(usize),
    Y(usize),
    Z(usize),
    H(usize),
    /// `(Z + Y)/√2`.
    Hp(usize),
    XRot(usize, Angle<T>),
    ZRot(usize, Angle<T>),
    Cz(usize, usize),
    /// Control first, target second.
    Cx(usize, usize),
    Swap(usize, usize),
}

impl<T: Real> Gate<T> {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::I(q) | Gate::X(q) | Gate::Y(q) | Gate::Z(q) | Gate::H(q) | Gate::Hp(q) => vec![q],
            Gate::XRot(q, _) | Gate::ZRot(q, _) => vec![q],
            Gate::Cz(a, b) | Gate::Cx(a, b) | Gate::Swap(a, b) => vec![a, b],
        }
    }

    pub fn matrix(&self) -> UnitaryMatrix<T> {
        match *self {
            Gate::I(_) => UnitaryMatrix::One(Mat2::identity()),
            Gate::X(_) => UnitaryMatrix::One(Pauli::X.matrix()),
            Gate::Y(_) => UnitaryMatrix::One(Pauli::Y.matrix()),
            Gate::Z(_) => UnitaryMatrix::One(Pauli::Z.matrix()),
            Gate::H(_) => UnitaryMatrix::One(Mat2::hadamard()),
            Gate::Hp(_) => UnitaryMatrix::One(Mat2::hprime()),
            Gate::XRot(_, a) => UnitaryMatrix::One(Mat2::xrot(a.radians())),
            Gate::ZRot(_, a) => UnitaryMatrix::One(Mat2::zrot(a.radians())),
            Gate::Cz(..) => UnitaryMatrix::Two(Mat4::cz()),
            Gate::Cx(..) => UnitaryMatrix::Two(Mat4::cx()),
            Gate::Swap(..) => UnitaryMatrix::Two(Mat4::swap()),
        }
    }
}

impl<T: Real> fmt::Display for Gate<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::I(q) => write!(f, "i {q}"),
            Gate::X(q) => write!(f, "x {q}"),
            Gate::Y(q) => write!(f, "y {q}"),
            Gate::Z(q) => write!(f, "z {q}"),
            Gate::H(q) => write!(f, "h {q}"),
            Gate::Hp(q) => write!(f, "hp {q}"),
            Gate::XRot(q, a) => write!(f, "xrot {q} {}", a.radians()),
            Gate::ZRot(q, a) => write!(f, "zrot {q} {}", a.radians()),
            Gate::Cz(a, b) => write!(f, "cz {a} {b}"),
            Gate::Cx(a, b) => write!(f, "cx {a} {b}"),
            Gate::Swap(a, b) => write!(f, "swap {a} {b}"),
        }
    }
}

/// Ordered gate list on `width` qubits. Qubit 0 is the least significant
/// bit of a basis-state index.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit<T = f64> {
    width: usize,
    gates: Vec<Gate<T>>,
}

/// Reasons a gate cannot be added to a circuit.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CircuitError {
    #[error("qubit {qubit} out of range for width {width}")]
    QubitOutOfRange { qubit: usize, width: usize },
    #[error("two-qubit gate acts twice on qubit {0}")]
    RepeatedQubit(usize),
    #[error("non-finite rotation angle")]
    NonFiniteAngle,
    #[error("circuit width must be at least 1")]
    EmptyWidth,
}

impl<T: Real> Circuit<T> {
    pub fn new(width: usize) -> Result<Self, CircuitError> {
        if width == 0 {
            return Err(CircuitError::EmptyWidth);
        }
        Ok(Circuit { width, gates: Vec::new() })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate<T>] {
        &self.gates
    }

    pub fn push(&mut self, gate: Gate<T>) -> Result<(), CircuitError> {
        let qs = gate.qubits();
        for &q in &qs {
            if q >= self.width {
                return Err(CircuitError::QubitOutOfRange { qubit: q, width: self.width });
            }
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(CircuitError::RepeatedQubit(qs[0]));
        }
        if let Gate::XRot(_, a) | Gate::ZRot(_, a) = gate {
            if !a.radians().is_finite() {
                return Err(CircuitError::NonFiniteAngle);
            }
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn with(mut self, gate: Gate<T>) -> Result<Self, CircuitError> {
        self.push(gate)?;
        Ok(self)
    }

    /// Parses the line-oriented circuit text format.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        parse::parse(text)
    }

    /// Canonical text form; parsing it yields an equal circuit.
    pub fn to_text(&self) -> String {
        let mut out = format!("qubits {}\n", self.width);
        for g in &self.gates {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }

    /// Hex SHA-256 of the canonical text form.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_text().as_bytes()))
    }

    /// Rewrites the circuit into single-qubit unitaries and CZ gates.
    /// With `nearest_neighbor`, every CZ acts on wires `i, i+1`.
    pub fn elementary_ops(&self, nearest_neighbor: bool) -> Vec<ElementaryOp<T>> {
        cycles::expand(self, nearest_neighbor)
    }
}
