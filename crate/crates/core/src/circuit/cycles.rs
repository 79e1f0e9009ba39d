use serde::{Deserialize, Serialize};

use super::{euler_decompose, Angle, Circuit, Gate};
use crate::linalg::{Mat2, UnitaryMatrix};
use crate::scalar::Real;

const DIAG_TOL: f64 = 1e-12;

/// Single-qubit unitary or CZ, the vocabulary all compilers consume.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ElementaryOp<T = f64> {
    Single(usize, Mat2<T>),
    /// Smaller wire index first.
    Cz(usize, usize),
}

fn push_cx<T: Real>(out: &mut Vec<ElementaryOp<T>>, c: usize, t: usize, nn: bool) {
    out.push(ElementaryOp::Single(t, Mat2::hadamard()));
    push_cz(out, c, t, nn);
    out.push(ElementaryOp::Single(t, Mat2::hadamard()));
}

fn push_swap<T: Real>(out: &mut Vec<ElementaryOp<T>>, a: usize, b: usize, nn: bool) {
    push_cx(out, a, b, nn);
    push_cx(out, b, a, nn);
    push_cx(out, a, b, nn);
}

fn push_cz<T: Real>(out: &mut Vec<ElementaryOp<T>>, a: usize, b: usize, nn: bool) {
    let (lo, hi) = (a.min(b), a.max(b));
    if !nn || hi == lo + 1 {
        out.push(ElementaryOp::Cz(lo, hi));
        return;
    }
    for k in (lo + 1..hi).rev() {
        push_swap(out, k, k + 1, nn);
    }
    out.push(ElementaryOp::Cz(lo, lo + 1));
    for k in lo + 1..hi {
        push_swap(out, k, k + 1, nn);
    }
}

pub(super) fn expand<T: Real>(c: &Circuit<T>, nn: bool) -> Vec<ElementaryOp<T>> {
    let mut out = Vec::new();
    for g in c.gates() {
        match *g {
            Gate::Cz(a, b) => push_cz(&mut out, a, b, nn),
            Gate::Cx(a, b) => push_cx(&mut out, a, b, nn),
            Gate::Swap(a, b) => push_swap(&mut out, a, b, nn),
            single => {
                let UnitaryMatrix::One(m) = single.matrix() else { unreachable!() };
                out.push(ElementaryOp::Single(single.qubits()[0], m));
            }
        }
    }
    out
}

/// One cycle: X rotations on every wire, then Z rotations, then a layer of
/// disjoint nearest-neighbour CZ gates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cycle {
    pub x: Vec<Angle>,
    pub z: Vec<Angle>,
    pub cz: Vec<(usize, usize)>,
}

impl Cycle {
    pub fn identity(width: usize) -> Self {
        Cycle { x: vec![Angle::zero(); width], z: vec![Angle::zero(); width], cz: Vec::new() }
    }

    pub fn touches(&self, w: usize) -> bool {
        self.cz.iter().any(|&(a, b)| a == w || b == w)
    }

    /// Partner of wire `w` in this cycle's CZ layer.
    pub fn partner(&self, w: usize) -> Option<usize> {
        self.cz.iter().find_map(|&(a, b)| {
            if a == w {
                Some(b)
            } else if b == w {
                Some(a)
            } else {
                None
            }
        })
    }
}

/// Circuit rewritten as a sequence of cycles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleForm {
    pub width: usize,
    pub cycles: Vec<Cycle>,
}

/// Reasons a cycle form is malformed.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CycleFormError {
    #[error("cycle {cycle}: layer length does not match width {width}")]
    LayerLength { cycle: usize, width: usize },
    #[error("cycle {cycle}: CZ ({a},{b}) is not between adjacent wires")]
    NotNearestNeighbor { cycle: usize, a: usize, b: usize },
    #[error("cycle {cycle}: CZ pairs overlap on wire {wire}")]
    Overlap { cycle: usize, wire: usize },
}

/// Euler split preferring the form with the fewest outer Z rotations, so
/// a pure X rotation keeps its angle and sign.
fn split(u: &Mat2<f64>) -> super::EulerAngles {
    let e = euler_decompose(u);
    let half_turn = |x: f64| Angle::new(Angle::new(2.0 * x).radians() / 2.0);
    let h = std::f64::consts::FRAC_PI_2;
    let mut alt = e;
    alt.theta1 = half_turn(e.theta1.radians() - h);
    alt.theta2 = -e.theta2;
    alt.theta3 = half_turn(e.theta3.radians() + h);
    alt.phase = num_complex::Complex::new(1.0, 0.0);
    let ov = (alt.matrix().dagger() * *u).trace() / 2.0;
    alt.phase = ov / ov.norm();
    let outer = |x: &super::EulerAngles| [x.theta1, x.theta3].iter().filter(|t| !t.is_zero(DIAG_TOL)).count();
    if outer(&alt) < outer(&e) {
        alt
    } else {
        e
    }
}

/// Last cycle, when it leaves wires `i` and `j` idle and can host their
/// pending gates (the leading Z of each split goes one cycle earlier).
fn idle_slot(cycles: &[Cycle], pending: &[Mat2<f64>], i: usize, j: usize) -> Option<(usize, [super::EulerAngles; 2])> {
    let k = cycles.len().checked_sub(1)?;
    let last = &cycles[k];
    let splits = [split(&pending[i]), split(&pending[j])];
    let free = [i, j].iter().zip(&splits).all(|(&w, e)| {
        !last.touches(w) && last.x[w].is_zero(DIAG_TOL) && last.z[w].is_zero(DIAG_TOL) && (k > 0 || e.theta1.is_zero(DIAG_TOL))
    });
    free.then_some((k, splits))
}

fn z_angle_of_diagonal(u: &Mat2<f64>) -> Option<Angle> {
    if u.m[0][1].norm() > DIAG_TOL || u.m[1][0].norm() > DIAG_TOL {
        return None;
    }
    Some(Angle::new((u.m[1][1] / u.m[0][0]).arg() / 2.0))
}

impl CycleForm {
    /// Greedy normalization: pending single-qubit gates are Euler-split,
    /// the leading Z folds into the previous cycle, and CZs whose wires
    /// carry only diagonal pending gates join the previous cycle.
    pub fn from_circuit(c: &Circuit) -> CycleForm {
        let width = c.width();
        let mut cycles: Vec<Cycle> = Vec::new();
        let mut pending = vec![Mat2::<f64>::identity(); width];

        fn fold_z(cycles: &mut Vec<Cycle>, width: usize, w: usize, a: Angle) {
            if a.is_zero(DIAG_TOL) {
                return;
            }
            if cycles.is_empty() {
                cycles.push(Cycle::identity(width));
            }
            let last = cycles.last_mut().unwrap();
            last.z[w] = last.z[w] + a;
        }

        for op in c.elementary_ops(true) {
            match op {
                ElementaryOp::Single(q, m) => pending[q] = m * pending[q],
                ElementaryOp::Cz(i, j) => {
                    let diag = (z_angle_of_diagonal(&pending[i]), z_angle_of_diagonal(&pending[j]));
                    let joinable = cycles.last().is_some_and(|l| !l.touches(i) && !l.touches(j));
                    if let (true, (Some(ai), Some(aj))) = (joinable, diag) {
                        let last = cycles.last_mut().unwrap();
                        last.z[i] = last.z[i] + ai;
                        last.z[j] = last.z[j] + aj;
                        last.cz.push((i, j));
                    } else if let Some((k, splits)) = idle_slot(&cycles, &pending, i, j) {
                        for (w, e) in [i, j].into_iter().zip(splits) {
                            if let Some(prev) = k.checked_sub(1) {
                                cycles[prev].z[w] = cycles[prev].z[w] + e.theta1;
                            }
                            cycles[k].x[w] = e.theta2;
                            cycles[k].z[w] = e.theta3;
                        }
                        cycles[k].cz.push((i, j));
                    } else {
                        let mut next = Cycle::identity(width);
                        for w in [i, j] {
                            let e = split(&pending[w]);
                            fold_z(&mut cycles, width, w, e.theta1);
                            next.x[w] = e.theta2;
                            next.z[w] = e.theta3;
                        }
                        next.cz.push((i, j));
                        cycles.push(next);
                    }
                    pending[i] = Mat2::identity();
                    pending[j] = Mat2::identity();
                }
            }
        }

        let mut tail: Option<Cycle> = None;
        for (w, p) in pending.iter().enumerate() {
            if p.eq_up_to_phase(&Mat2::identity(), DIAG_TOL) {
                continue;
            }
            match (z_angle_of_diagonal(p), cycles.is_empty()) {
                (Some(a), false) => fold_z(&mut cycles, width, w, a),
                _ => {
                    let e = split(p);
                    fold_z(&mut cycles, width, w, e.theta1);
                    let t = tail.get_or_insert_with(|| Cycle::identity(width));
                    t.x[w] = e.theta2;
                    t.z[w] = e.theta3;
                }
            }
        }
        cycles.extend(tail);
        CycleForm { width, cycles }
    }

    pub fn validate(&self) -> Result<(), CycleFormError> {
        for (k, cy) in self.cycles.iter().enumerate() {
            if cy.x.len() != self.width || cy.z.len() != self.width {
                return Err(CycleFormError::LayerLength { cycle: k, width: self.width });
            }
            let mut used = vec![false; self.width];
            for &(a, b) in &cy.cz {
                if b != a + 1 || b >= self.width {
                    return Err(CycleFormError::NotNearestNeighbor { cycle: k, a, b });
                }
                for w in [a, b] {
                    if used[w] {
                        return Err(CycleFormError::Overlap { cycle: k, wire: w });
                    }
                    used[w] = true;
                }
            }
        }
        Ok(())
    }

    /// Equivalent gate-level circuit.
    pub fn to_circuit(&self) -> Circuit {
        let mut c = Circuit::new(self.width).expect("cycle form width is positive");
        for cy in &self.cycles {
            for w in 0..self.width {
                c.push(Gate::XRot(w, cy.x[w])).unwrap();
                c.push(Gate::ZRot(w, cy.z[w])).unwrap();
            }
            for &(a, b) in &cy.cz {
                c.push(Gate::Cz(a, b)).unwrap();
            }
        }
        c
    }
}

/// `(U† ⊗ V†) · CZ_{pq} · (U ⊗ V)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Composite {
    pub p: usize,
    pub q: usize,
    pub u: Mat2,
    pub v: Mat2,
}

/// Circuit written as composite gates followed by one single-qubit gate
/// per wire before readout.
#[derive(Clone, Debug, PartialEq)]
pub struct CompositeForm {
    pub width: usize,
    pub composites: Vec<Composite>,
    pub finals: Vec<Mat2>,
}

impl CompositeForm {
    /// Each composite conjugates by the product of all single-qubit gates
    /// applied so far on its wires; `finals` holds the full products.
    pub fn from_circuit(c: &Circuit) -> CompositeForm {
        let mut acc = vec![Mat2::<f64>::identity(); c.width()];
        let mut composites = Vec::new();
        for op in c.elementary_ops(false) {
            match op {
                ElementaryOp::Single(q, m) => acc[q] = m * acc[q],
                ElementaryOp::Cz(p, q) => composites.push(Composite { p, q, u: acc[p], v: acc[q] }),
            }
        }
        CompositeForm { width: c.width(), composites, finals: acc }
    }
}
