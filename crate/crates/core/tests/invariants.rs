use std::f64::consts::PI;

use mbqc::circuit::euler_decompose;
use mbqc::linalg::UnitaryMatrix;
use mbqc::owqc::{compile_pattern, execute_windowed, Variant};
use mbqc::pauli::conjugate_through;
use mbqc::program::RandomBranches;
use mbqc::statevec::{random_product_state, random_state};
use mbqc::verify::random_circuit;
use mbqc::{fidelity, Angle, Circuit, CycleForm, Mat2, Mat4, Pauli, PauliFrame, TrialRng};
use proptest::prelude::*;

fn frame_matrix(f: &PauliFrame) -> Mat4 {
    // Wire 0 is the low bit, so it is the second Kronecker factor.
    Mat4::kron(&f.operator(1), &f.operator(0))
}

fn cliffords() -> Vec<(Option<Mat2>, Option<Mat4>)> {
    let s = Mat2::zrot(-PI / 4.0);
    vec![
        (Some(Mat2::hadamard()), None),
        (Some(Mat2::hprime()), None),
        (Some(s), None),
        (Some(Pauli::Y.matrix()), None),
        (None, Some(Mat4::cz())),
        (None, Some(Mat4::cx())),
        (None, Some(Mat4::swap())),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn angles_are_canonical(r in -100.0f64..100.0) {
        let a = Angle::new(r).radians();
        prop_assert!(a > -PI && a <= PI);
        prop_assert!(((r - a) / (2.0 * PI) - ((r - a) / (2.0 * PI)).round()).abs() < 1e-9);
    }

    #[test]
    fn euler_angles_reconstruct_the_unitary(seed in any::<u64>()) {
        let u = TrialRng::new(seed, 0).unitary();
        let e = euler_decompose(&u);
        prop_assert!(e.matrix().approx_eq(&u, 1e-9));
        prop_assert!(e.theta2.radians() >= -1e-12 && e.theta2.radians() <= PI / 2.0 + 1e-12);
    }

    #[test]
    fn frame_composition_is_an_involution(bits in proptest::collection::vec(any::<(bool, bool)>(), 1..6), other in any::<u64>()) {
        let f = PauliFrame::from_bits(&bits);
        let mut rng = TrialRng::new(other, 0);
        let g = PauliFrame::from_bits(&bits.iter().map(|_| (rng.coin(), rng.coin())).collect::<Vec<_>>());
        prop_assert_eq!(f.compose(&g).unwrap().compose(&g).unwrap(), f.clone());
        prop_assert_eq!(f.compose(&g).unwrap(), g.compose(&f).unwrap());
    }

    #[test]
    fn conjugation_matches_matrix_product(bits in any::<[(bool, bool); 2]>(), which in 0usize..7) {
        let f = PauliFrame::from_bits(&bits);
        let (one, two) = cliffords()[which];
        let (gate, u) = match (one, two) {
            (Some(m), _) => (UnitaryMatrix::One(m), Mat4::kron(&Mat2::identity(), &m)),
            (_, Some(m)) => (UnitaryMatrix::Two(m), m),
            _ => unreachable!(),
        };
        let wires: &[usize] = if one.is_some() { &[0] } else { &[1, 0] };
        let g = conjugate_through(&f, &gate, wires).unwrap();
        prop_assert!((u * frame_matrix(&f) * u.dagger()).eq_up_to_phase(&frame_matrix(&g), 1e-9));
    }

    #[test]
    fn circuit_text_round_trips(seed in any::<u64>(), n in 1usize..5) {
        let c = random_circuit(n, 4, &mut TrialRng::new(seed, 0));
        let back = Circuit::parse(&c.to_text()).unwrap();
        prop_assert_eq!(back.digest(), c.digest());
        let psi = random_state(n, &mut TrialRng::new(seed, 1)).unwrap();
        let (mut a, mut b) = (psi.clone(), psi);
        a.apply_circuit(&c).unwrap();
        b.apply_circuit(&back).unwrap();
        prop_assert!(fidelity(&a, &b) > 1.0 - 1e-12);
    }

    #[test]
    fn cycle_form_preserves_the_unitary(seed in any::<u64>(), n in 1usize..5) {
        let c = random_circuit(n, 4, &mut TrialRng::new(seed, 0));
        let cf = CycleForm::from_circuit(&c);
        prop_assert!(cf.validate().is_ok());
        let psi = random_state(n, &mut TrialRng::new(seed, 1)).unwrap();
        let (mut a, mut b) = (psi.clone(), psi);
        a.apply_circuit(&c).unwrap();
        b.apply_circuit(&cf.to_circuit()).unwrap();
        prop_assert!(fidelity(&a, &b) > 1.0 - 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn patterns_are_outcome_independent(seed in any::<u64>(), n in 1usize..4, which in 0usize..5) {
        let variant = Variant::ALL[which];
        let mut rng = TrialRng::new(seed, 0);
        let c = random_circuit(n, 2, &mut rng);
        let cf = CycleForm::from_circuit(&c);
        let p = compile_pattern(&cf, variant).unwrap();
        let input = random_product_state(n, &mut rng).unwrap();
        let frame = PauliFrame::from_bits(&(0..n).map(|_| (rng.coin(), rng.coin())).collect::<Vec<_>>());
        let mut want = input.clone();
        want.apply_circuit(&c).unwrap();
        for stream in 1..3 {
            let run = execute_windowed(&p, &input, &frame, &mut RandomBranches(TrialRng::new(seed, stream))).unwrap();
            prop_assert!(fidelity(&run.corrected_output().unwrap(), &want) > 1.0 - 1e-9);
        }
    }
}
