//! Compilers from gate-level circuits to measurement-only teleportation
//! schedules and one-way measurement patterns, with a state-vector verifier.

pub mod circuit;
pub mod graph;
pub mod linalg;
pub mod owqc;
pub mod pauli;
pub mod primitives;
pub mod program;
pub mod scalar;
pub mod statevec;
pub mod tqc;
pub mod verify;

pub use circuit::{Angle, Circuit, CycleForm, Gate};
pub use linalg::{Mat2, Mat4, Pauli, UnitaryMatrix};
pub use pauli::{OutcomeRecord, PauliFrame};
pub use scalar::Real;
pub use statevec::{fidelity, StateVector, TrialRng};

pub type StateVectorF64 = StateVector<f64>;
pub type StateVectorF32 = StateVector<f32>;
pub type Mat2F64 = Mat2<f64>;
pub type Mat2F32 = Mat2<f32>;
pub type CircuitF64 = Circuit<f64>;
pub type CircuitF32 = Circuit<f32>;
