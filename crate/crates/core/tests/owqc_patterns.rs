use mbqc::circuit::{Angle, Cycle};
use mbqc::owqc::{compile_pattern, execute_pattern, execute_windowed, Variant};
use mbqc::program::RandomBranches;
use mbqc::statevec::random_product_state;
use mbqc::{fidelity, CycleForm, PauliFrame, TrialRng};

fn random_form(n: usize, m: usize, rng: &mut TrialRng) -> CycleForm {
    let cycles = (0..m)
        .map(|k| {
            let mut cz = Vec::new();
            let mut w = k % 2;
            while w + 1 < n {
                if rng.coin() {
                    cz.push((w, w + 1));
                }
                w += 2;
            }
            Cycle {
                x: (0..n).map(|_| Angle::new(rng.angle())).collect(),
                z: (0..n).map(|_| Angle::new(rng.angle())).collect(),
                cz,
            }
        })
        .collect();
    CycleForm { width: n, cycles }
}

#[test]
fn every_variant_reproduces_the_circuit() {
    let mut rng = TrialRng::new(3, 0);
    for variant in Variant::ALL {
        for n in 1..=3 {
            for m in 0..=2 {
                let cf = random_form(n, m, &mut rng);
                let p = compile_pattern(&cf, variant).unwrap();
                let input = random_product_state(n, &mut rng).unwrap();
                let frame = PauliFrame::from_bits(&(0..n).map(|_| (rng.coin(), rng.coin())).collect::<Vec<_>>());
                let mut want = input.clone();
                want.apply_circuit(&cf.to_circuit()).unwrap();
                let run = execute_windowed(&p, &input, &frame, &mut RandomBranches(TrialRng::new(9, n as u64))).unwrap();
                let f = fidelity(&run.corrected_output().unwrap(), &want);
                assert!(f > 1.0 - 1e-9, "{variant:?} n={n} m={m} fidelity {f}");
                if p.graph.num_vertices() <= 16 {
                    let full = execute_pattern(&p, &input, &frame, &mut RandomBranches(TrialRng::new(9, n as u64))).unwrap();
                    assert!(fidelity(&full.corrected_output().unwrap(), &want) > 1.0 - 1e-9);
                }
            }
        }
    }
}
