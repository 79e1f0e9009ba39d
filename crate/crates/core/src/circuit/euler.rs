use num_complex::Complex;

use super::Angle;
use crate::linalg::{Mat2, C};
use crate::scalar::Real;

/// `U = phase · Z_{θ3} · X_{θ2} · Z_{θ1}` with `θ2 ∈ [0, π/2]` and
/// `θ1, θ3 ∈ (−π/2, π/2]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EulerAngles<T = f64> {
    pub theta1: Angle<T>,
    pub theta2: Angle<T>,
    pub theta3: Angle<T>,
    pub phase: C<T>,
}

impl<T: Real> EulerAngles<T> {
    pub fn matrix(&self) -> Mat2<T> {
        (Mat2::zrot(self.theta3.radians())
            * Mat2::xrot(self.theta2.radians())
            * Mat2::zrot(self.theta1.radians()))
        .scale(self.phase)
    }
}

/// Decomposes a single-qubit unitary into Z·X·Z rotations. When only the
/// sum or difference of the outer angles is determined, `θ1` is set to 0.
pub fn euler_decompose<T: Real>(u: &Mat2<T>) -> EulerAngles<T> {
    let eps = T::lit(1e-12);
    let det = u.det();
    let root = det.sqrt();
    let v = u.scale(Complex::new(T::one(), T::zero()) / root);
    let cos_b = v.m[0][0].norm();
    let sin_b = v.m[0][1].norm();
    let b = sin_b.atan2(cos_b);
    let i = Complex::new(T::zero(), T::one());
    // v00 = cos b · e^{−i(a+c)}, v01 = −i sin b · e^{i(a−c)}
    let (a, c) = if sin_b <= eps {
        let s = -v.m[0][0].arg();
        (T::zero(), s)
    } else if cos_b <= eps {
        let d = (i * v.m[0][1]).arg();
        (T::zero(), -d)
    } else {
        let s = -v.m[0][0].arg();
        let d = (i * v.m[0][1]).arg();
        ((s + d) / T::lit(2.0), (s - d) / T::lit(2.0))
    };
    // Z_{θ+π} = −Z_θ, so outer angles are reduced into (−π/2, π/2].
    let half_turn = |x: T| {
        let r = Angle::new(x + x).radians();
        Angle::new(r / T::lit(2.0))
    };
    let mut e = EulerAngles {
        theta1: half_turn(a),
        theta2: Angle::new(b),
        theta3: half_turn(c),
        phase: Complex::new(T::one(), T::zero()),
    };
    let m = e.matrix();
    let ov = (m.dagger() * *u).trace() / T::lit(2.0);
    e.phase = ov / ov.norm();
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn hadamard_is_three_quarter_turns() {
        let e = euler_decompose(&Mat2::<f64>::hadamard());
        for t in [e.theta1, e.theta2, e.theta3] {
            assert!((t.radians() - FRAC_PI_4).abs() < 1e-12);
        }
        assert!((e.phase - Complex::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn identity_and_z_rotation_ties() {
        let e = euler_decompose(&Mat2::<f64>::identity());
        assert!(e.theta1.is_zero(1e-12) && e.theta2.is_zero(1e-12) && e.theta3.is_zero(1e-12));
        let e = euler_decompose(&Mat2::<f64>::zrot(0.3));
        assert!(e.theta1.is_zero(1e-12) && e.theta2.is_zero(1e-12));
        assert!((e.theta3.radians() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn x_rotation_beyond_quarter_turn() {
        let u = Mat2::<f64>::xrot(2.0);
        let e = euler_decompose(&u);
        assert!(e.theta2.radians() >= 0.0 && e.theta2.radians() <= FRAC_PI_2 + 1e-12);
        assert!(e.matrix().approx_eq(&u, 1e-12));
    }
}
