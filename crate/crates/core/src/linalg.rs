//! Dense 2×2 and 4×4 complex matrices.
//!
//! Two-qubit matrices index their basis as `2·b_first + b_second`, where
//! `b_first` is the bit of the first listed qubit.

use std::ops::Mul;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// Complex number over a [`Real`] scalar.
pub type C<T> = Complex<T>;

fn c<T: Real>(re: f64, im: f64) -> C<T> {
    Complex::new(T::lit(re), T::lit(im))
}

/// Single-qubit Pauli operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix<T: Real>(self) -> Mat2<T> {
        match self {
            Pauli::I => Mat2::identity(),
            Pauli::X => Mat2::new([[c(0., 0.), c(1., 0.)], [c(1., 0.), c(0., 0.)]]),
            Pauli::Y => Mat2::new([[c(0., 0.), c(0., -1.)], [c(0., 1.), c(0., 0.)]]),
            Pauli::Z => Mat2::new([[c(1., 0.), c(0., 0.)], [c(0., 0.), c(-1., 0.)]]),
        }
    }

    /// Pauli with the given X and Z exponents, ignoring phase (`X^a Z^b`).
    pub fn from_bits(a: bool, b: bool) -> Pauli {
        match (a, b) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (false, true) => Pauli::Z,
            (true, true) => Pauli::Y,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Z => (false, true),
            Pauli::Y => (true, true),
        }
    }

    pub fn anticommutes(self, other: Pauli) -> bool {
        let (a1, b1) = self.bits();
        let (a2, b2) = other.bits();
        (a1 & b2) ^ (b1 & a2)
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// 2×2 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2<T = f64> {
    pub m: [[C<T>; 2]; 2],
}

impl<T: Real> Mat2<T> {
    pub fn new(m: [[C<T>; 2]; 2]) -> Self {
        Mat2 { m }
    }

    pub fn identity() -> Self {
        Self::diag(c(1., 0.), c(1., 0.))
    }

    pub fn diag(d0: C<T>, d1: C<T>) -> Self {
        let z = C::new(T::zero(), T::zero());
        Mat2::new([[d0, z], [z, d1]])
    }

    pub fn hadamard() -> Self {
        let s = T::FRAC_1_SQRT_2();
        let p = C::new(s, T::zero());
        Mat2::new([[p, p], [p, -p]])
    }

    /// `(Z + Y)/√2`, the Clifford exchanging Y and Z.
    pub fn hprime() -> Self {
        let s = T::FRAC_1_SQRT_2();
        Mat2::new([[C::new(s, T::zero()), C::new(T::zero(), -s)], [C::new(T::zero(), s), C::new(-s, T::zero())]])
    }

    /// `e^{-iθX}`.
    pub fn xrot(theta: T) -> Self {
        let (s, co) = theta.sin_cos();
        let d = C::new(co, T::zero());
        let o = C::new(T::zero(), -s);
        Mat2::new([[d, o], [o, d]])
    }

    /// `e^{-iθZ}`.
    pub fn zrot(theta: T) -> Self {
        Self::diag(C::from_polar(T::one(), -theta), C::from_polar(T::one(), theta))
    }

    pub fn dagger(&self) -> Self {
        let m = &self.m;
        Mat2::new([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn scale(&self, s: C<T>) -> Self {
        let m = &self.m;
        Mat2::new([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    pub fn det(&self) -> C<T> {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> C<T> {
        self.m[0][0] + self.m[1][1]
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut d = T::zero();
        for r in 0..2 {
            for k in 0..2 {
                d = d.max((self.m[r][k] - other.m[r][k]).norm());
            }
        }
        d
    }

    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        self.max_abs_diff(other) <= tol
    }

    /// Phase `λ` with `self ≈ λ·other`, if both are equal up to a unit phase.
    pub fn phase_relative_to(&self, other: &Self, tol: T) -> Option<C<T>> {
        let ov = (other.dagger() * *self).trace() / T::lit(2.0);
        if (ov.norm() - T::one()).abs() > tol {
            return None;
        }
        let ph = ov / ov.norm();
        other.scale(ph).approx_eq(self, tol).then_some(ph)
    }

    pub fn eq_up_to_phase(&self, other: &Self, tol: T) -> bool {
        self.phase_relative_to(other, tol).is_some()
    }

    pub fn is_unitary(&self, tol: T) -> bool {
        (self.dagger() * *self).approx_eq(&Self::identity(), tol)
    }

    /// Converts to another scalar precision.
    pub fn cast<U: Real>(&self) -> Mat2<U> {
        let f = |z: C<T>| C::new(U::lit(z.re.to_f64().unwrap()), U::lit(z.im.to_f64().unwrap()));
        Mat2::new([[f(self.m[0][0]), f(self.m[0][1])], [f(self.m[1][0]), f(self.m[1][1])]])
    }
}

impl<T: Real> Mul for Mat2<T> {
    type Output = Mat2<T>;
    fn mul(self, rhs: Mat2<T>) -> Mat2<T> {
        let a = &self.m;
        let b = &rhs.m;
        let mut out = [[C::new(T::zero(), T::zero()); 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (k, slot) in row.iter_mut().enumerate() {
                *slot = a[r][0] * b[0][k] + a[r][1] * b[1][k];
            }
        }
        Mat2::new(out)
    }
}

/// 4×4 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat4<T = f64> {
    pub m: [[C<T>; 4]; 4],
}

impl<T: Real> Mat4<T> {
    pub fn zero() -> Self {
        Mat4 { m: [[C::new(T::zero(), T::zero()); 4]; 4] }
    }

    pub fn identity() -> Self {
        Self::diag([c(1., 0.); 4])
    }

    pub fn diag(d: [C<T>; 4]) -> Self {
        let mut out = Self::zero();
        for (i, v) in d.into_iter().enumerate() {
            out.m[i][i] = v;
        }
        out
    }

    pub fn cz() -> Self {
        Self::diag([c(1., 0.), c(1., 0.), c(1., 0.), c(-1., 0.)])
    }

    /// Controlled-X with the first qubit as control.
    pub fn cx() -> Self {
        let mut out = Self::zero();
        for (r, k) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
            out.m[r][k] = c(1., 0.);
        }
        out
    }

    pub fn swap() -> Self {
        let mut out = Self::zero();
        for (r, k) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            out.m[r][k] = c(1., 0.);
        }
        out
    }

    /// `a ⊗ b` with `a` acting on the first qubit.
    pub fn kron(a: &Mat2<T>, b: &Mat2<T>) -> Self {
        let mut out = Self::zero();
        for r in 0..4 {
            for k in 0..4 {
                out.m[r][k] = a.m[r >> 1][k >> 1] * b.m[r & 1][k & 1];
            }
        }
        out
    }

    pub fn dagger(&self) -> Self {
        let mut out = Self::zero();
        for r in 0..4 {
            for k in 0..4 {
                out.m[r][k] = self.m[k][r].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: C<T>) -> Self {
        let mut out = *self;
        for row in out.m.iter_mut() {
            for v in row.iter_mut() {
                *v = *v * s;
            }
        }
        out
    }

    pub fn trace(&self) -> C<T> {
        (0..4).fold(C::new(T::zero(), T::zero()), |acc, i| acc + self.m[i][i])
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut d = T::zero();
        for r in 0..4 {
            for k in 0..4 {
                d = d.max((self.m[r][k] - other.m[r][k]).norm());
            }
        }
        d
    }

    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        self.max_abs_diff(other) <= tol
    }

    pub fn phase_relative_to(&self, other: &Self, tol: T) -> Option<C<T>> {
        let ov = (other.dagger() * *self).trace() / T::lit(4.0);
        if (ov.norm() - T::one()).abs() > tol {
            return None;
        }
        let ph = ov / ov.norm();
        other.scale(ph).approx_eq(self, tol).then_some(ph)
    }

    pub fn eq_up_to_phase(&self, other: &Self, tol: T) -> bool {
        self.phase_relative_to(other, tol).is_some()
    }

    pub fn is_unitary(&self, tol: T) -> bool {
        (self.dagger() * *self).approx_eq(&Self::identity(), tol)
    }
}

impl<T: Real> Mul for Mat4<T> {
    type Output = Mat4<T>;
    fn mul(self, rhs: Mat4<T>) -> Mat4<T> {
        let mut out = Self::zero();
        for r in 0..4 {
            for k in 0..4 {
                let mut acc = C::new(T::zero(), T::zero());
                for j in 0..4 {
                    acc = acc + self.m[r][j] * rhs.m[j][k];
                }
                out.m[r][k] = acc;
            }
        }
        out
    }
}

/// Unitary on one or two qubits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum UnitaryMatrix<T = f64> {
    One(Mat2<T>),
    Two(Mat4<T>),
}

impl<T: Real> UnitaryMatrix<T> {
    pub fn dim(&self) -> usize {
        match self {
            UnitaryMatrix::One(_) => 2,
            UnitaryMatrix::Two(_) => 4,
        }
    }

    pub fn eq_up_to_phase(&self, other: &Self, tol: T) -> bool {
        match (self, other) {
            (UnitaryMatrix::One(a), UnitaryMatrix::One(b)) => a.eq_up_to_phase(b, tol),
            (UnitaryMatrix::Two(a), UnitaryMatrix::Two(b)) => a.eq_up_to_phase(b, tol),
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C<f64>, re: f64, im: f64) -> bool {
        (a - C::new(re, im)).norm() < 1e-12
    }

    #[test]
    fn rotations_follow_exponential_convention() {
        let t = 0.37;
        let x = Mat2::<f64>::xrot(t);
        assert!(close(x.m[0][0], t.cos(), 0.0));
        assert!(close(x.m[0][1], 0.0, -t.sin()));
        let z = Mat2::<f64>::zrot(t);
        assert!(close(z.m[0][0], t.cos(), -t.sin()));
        assert!(close(z.m[1][1], t.cos(), t.sin()));
    }

    #[test]
    fn quarter_turn_rotations_are_paulis_up_to_phase() {
        let h = std::f64::consts::FRAC_PI_2;
        assert!(Mat2::xrot(h).eq_up_to_phase(&Pauli::X.matrix(), 1e-12));
        assert!(Mat2::zrot(h).eq_up_to_phase(&Pauli::Z.matrix(), 1e-12));
    }

    #[test]
    fn hadamard_swaps_x_and_z() {
        let h = Mat2::<f64>::hadamard();
        assert!((h * Pauli::X.matrix() * h).approx_eq(&Pauli::Z.matrix(), 1e-12));
        let hp = Mat2::<f64>::hprime();
        assert!(hp.is_unitary(1e-12));
        assert!((hp * Pauli::Y.matrix() * hp.dagger()).eq_up_to_phase(&Pauli::Z.matrix(), 1e-12));
    }

    #[test]
    fn cx_is_hadamard_conjugated_cz() {
        let h = Mat2::<f64>::hadamard();
        let i = Mat2::identity();
        let lhs = Mat4::kron(&i, &h) * Mat4::cz() * Mat4::kron(&i, &h);
        assert!(lhs.approx_eq(&Mat4::cx(), 1e-12));
    }

    #[test]
    fn kron_puts_first_factor_on_high_bit() {
        let x = Pauli::X.matrix::<f64>();
        let k = Mat4::kron(&x, &Mat2::identity());
        assert!(close(k.m[2][0], 1.0, 0.0));
        assert!(close(k.m[1][0], 0.0, 0.0));
    }

    #[test]
    fn anticommutation_table() {
        use Pauli::*;
        assert!(X.anticommutes(Z) && X.anticommutes(Y) && Y.anticommutes(Z));
        assert!(!X.anticommutes(X) && !I.anticommutes(Y));
    }
}
