use std::f64::consts::FRAC_PI_4;

use mbqc::circuit::{Angle, Cycle};
use mbqc::owqc::{
    compile_pattern, diagram, enumerate_pattern_branches, execute_pattern, execute_windowed, window_size, Variant,
};
use mbqc::program::ForcedBranches;
use mbqc::statevec::random_product_state;
use mbqc::verify::{random_circuit, verify_pattern_branches};
use mbqc::{fidelity, Circuit, CycleForm, Gate, Mat2, PauliFrame, StateVector, TrialRng};
use num_complex::Complex;

const TWO_CYCLES: &str = include_str!("../../../circuits/two_cycles.mbq");

fn random_cycles(n: usize, m: usize, rng: &mut TrialRng) -> CycleForm {
    let cycles = (0..m)
        .map(|k| Cycle {
            x: (0..n).map(|_| Angle::new(rng.angle())).collect(),
            z: (0..n).map(|_| Angle::new(rng.angle())).collect(),
            cz: (k % 2..n.saturating_sub(1)).step_by(2).map(|w| (w, w + 1)).collect(),
        })
        .collect();
    CycleForm { width: n, cycles }
}

#[test]
fn two_cycle_example_labels_and_branches() {
    let c = Circuit::parse(TWO_CYCLES).unwrap();
    let cf = CycleForm::from_circuit(&c);
    assert_eq!(cf.cycles.len(), 2);
    let p = compile_pattern(&cf, Variant::Tg).unwrap();
    let labels: Vec<String> = diagram(&p).labels.into_values().collect();
    for want in ["M1", "N1", "M1′", "N1′", "O1", "M2", "N2", "M2′", "N2′", "O2"] {
        assert!(labels.iter().any(|l| l == want), "missing {want} in {labels:?}");
    }
    let r = verify_pattern_branches(&cf, Variant::Tg, 8, 5).unwrap();
    assert!(r.passed, "{}", r.to_text());
    assert_eq!(r.branches.len(), 1 << p.steps.len());
    for s in &r.probability_sums {
        assert!((s - 1.0).abs() < 1e-9);
    }
}

#[test]
fn full_and_windowed_agree_on_forced_branches() {
    let mut rng = TrialRng::new(17, 0);
    for variant in Variant::ALL {
        // The cancellation schedule's lead and flush subunits alone fill the cap.
        let (n, m) = if variant == Variant::Cancellation { (1, 0) } else { (3, 1) };
        let cf = random_cycles(n, m, &mut rng);
        let p = compile_pattern(&cf, variant).unwrap();
        assert!(p.graph.num_vertices() <= mbqc::statevec::MAX_QUBITS, "{variant:?}");
        let input = random_product_state(n, &mut rng).unwrap();
        let frame = PauliFrame::from_bits(&[(true, false), (false, true), (true, true)][..n]);
        for _ in 0..4 {
            let bits: Vec<bool> = (0..p.steps.len()).map(|_| rng.coin()).collect();
            let full = execute_pattern(&p, &input, &frame, &mut ForcedBranches(bits.clone()));
            let windowed = execute_windowed(&p, &input, &frame, &mut ForcedBranches(bits));
            match (full, windowed) {
                (Ok(a), Ok(b)) => {
                    assert_eq!(a.frame, b.frame);
                    assert!((a.probability - b.probability).abs() < 1e-9);
                    assert!(fidelity(&a.state, &b.state) > 1.0 - 1e-9);
                }
                (Err(_), Err(_)) => {}
                (a, b) => panic!("{variant:?}: full {:?} windowed ok={}", a.err(), b.is_ok()),
            }
        }
    }
}

#[test]
fn window_does_not_grow_with_cycles() {
    let mut rng = TrialRng::new(2, 0);
    for variant in Variant::ALL {
        let sizes: Vec<usize> =
            (2..=6).map(|m| window_size(&compile_pattern(&random_cycles(3, m, &mut rng), variant).unwrap())).collect();
        assert!(sizes.windows(2).all(|w| w[1] <= w[0].max(sizes[0])), "{variant:?} {sizes:?}");
        let p = compile_pattern(&random_cycles(3, 4, &mut rng), variant).unwrap();
        let input = random_product_state(3, &mut rng).unwrap();
        let run = execute_windowed(&p, &input, &PauliFrame::identity(3), &mut mbqc::program::RandomBranches(rng.clone()))
            .unwrap();
        assert!(run.peak_qubits <= window_size(&p));
        assert!(run.peak_qubits < mbqc::statevec::MAX_QUBITS);
    }
}

#[test]
fn remote_cz_entangles_plus_states_in_every_branch() {
    for variant in [Variant::RemoteI, Variant::RemoteII] {
        let cf = CycleForm {
            width: 2,
            cycles: vec![Cycle { x: vec![Angle::zero(); 2], z: vec![Angle::zero(); 2], cz: vec![(0, 1)] }],
        };
        let p = compile_pattern(&cf, variant).unwrap();
        let h = 0.5f64.sqrt();
        let plus = [Complex::new(h, 0.0), Complex::new(h, 0.0)];
        let input = StateVector::product(&[plus, plus]).unwrap();
        let mut want = input.clone();
        want.apply_cz(0, 1).unwrap();
        let runs = enumerate_pattern_branches(&p, &input, &PauliFrame::identity(2)).unwrap();
        let total: f64 = runs.iter().map(|r| r.probability).sum();
        assert!((total - 1.0).abs() < 1e-9);
        for r in runs {
            assert!(fidelity(&r.corrected_output().unwrap(), &want) > 1.0 - 1e-9, "{variant:?}");
        }
    }
}

#[test]
fn cancellation_identity_holds_only_with_local_corrections() {
    use mbqc::Mat4;
    let i = Mat2::identity();
    let cz = Mat4::cz();
    let exact_lhs = cz * Mat4::kron(&i, &Mat2::xrot(-FRAC_PI_4)) * cz;
    let exact_rhs = Mat4::kron(&Mat2::zrot(-FRAC_PI_4), &Mat2::xrot(-FRAC_PI_4)) * Mat4::cx();
    assert!(exact_lhs.eq_up_to_phase(&exact_rhs, 1e-12));
    let literal_lhs = cz * Mat4::kron(&i, &Mat2::xrot(-2.0 * FRAC_PI_4)) * cz;
    let literal_rhs = Mat4::kron(&i, &Mat2::xrot(2.0 * FRAC_PI_4)) * Mat4::cx();
    assert!(!literal_lhs.eq_up_to_phase(&literal_rhs, 1e-6));
}

#[test]
fn f32_kernel_tracks_f64() {
    let mut rng = TrialRng::new(4, 0);
    let c = random_circuit(3, 3, &mut rng);
    let c32: Circuit<f32> = Circuit::parse(&c.to_text()).unwrap();
    let input = random_product_state(3, &mut rng).unwrap();
    let mut a = input.clone();
    a.apply_circuit(&c).unwrap();
    let mut b = input.cast::<f32>();
    b.apply_circuit(&c32).unwrap();
    assert!((b.norm() - 1.0).abs() < 1e-5);
    assert!(fidelity(&a.cast::<f32>(), &b) > 1.0 - 1e-4);
    let g: Gate<f32> = Gate::XRot(0, Angle::new(0.25));
    assert_eq!(g.qubits(), vec![0]);
}
