//! Acceptance criteria 1–7, one PASS/FAIL line each.

mod common;

use std::io::Write;
use std::time::{Duration, Instant};

use mbqc::primitives::{catalog_entry, CATALOG};
use mbqc::program::{enumerate_branches, ExecOptions};
use mbqc::verify::{self, branch_inputs, with_frame, Check};
use mbqc::TrialRng;

const SEED: u64 = 20260;

fn report(index: usize, check: &Check, elapsed: Duration, budget: Duration) -> bool {
    let in_time = elapsed <= budget;
    let ok = check.passed && in_time;
    let _ = writeln!(
        std::io::stderr(),
        "criterion {index}: {} {} ({:.2?} of {:.0?}) {}",
        if ok { "PASS" } else { "FAIL" },
        check.name,
        elapsed,
        budget,
        check.detail
    );
    ok
}

fn timed<F: FnOnce() -> Check>(f: F) -> (Check, Duration) {
    let t = Instant::now();
    let c = f();
    (c, t.elapsed())
}

/// Every branch of every primitive on 20 inputs: output frame equals the
/// closed form.
fn frame_closed_forms(inputs: usize) -> Check {
    let mut failures = Vec::new();
    let mut branches = 0;
    for (i, name) in CATALOG.iter().enumerate() {
        let mut rng = TrialRng::new(SEED, i as u64);
        let entry = catalog_entry(name, &mut rng).unwrap();
        let clifford = entry.program.blocks.first().and_then(|b| b.clifford);
        for (psi, frame) in branch_inputs(entry.program.width, inputs, &mut rng).unwrap() {
            let phys = with_frame(&psi, &frame).unwrap();
            for run in enumerate_branches(&entry.program, &phys, &frame, ExecOptions::default()).unwrap() {
                branches += 1;
                let want = common::expected_frame(name, &frame, &run.record, clifford);
                let got: Vec<(bool, bool)> = (0..frame.width()).map(|w| (run.frame.a[w], run.frame.b[w])).collect();
                if got != want {
                    failures.push(format!("{name}: frame {got:?}, closed form {want:?}"));
                }
            }
        }
    }
    failures.truncate(5);
    Check { name: "frame closed forms".into(), passed: failures.is_empty(), detail: if failures.is_empty() { format!("{branches} branches") } else { failures.join("; ") } }
}

#[test]
fn acceptance_criteria() {
    let mut all = true;

    let (c, t) = timed(|| verify::check_identities(50, SEED).unwrap());
    all &= report(1, &c, t, Duration::from_secs(5));

    let (c, t) = timed(|| {
        let (fid, _) = verify::check_primitives(20, SEED).unwrap();
        let frames = frame_closed_forms(20);
        Check {
            name: "primitive branch oracles".into(),
            passed: fid.passed && frames.passed,
            detail: format!("{}; {}", fid.detail, frames.detail),
        }
    });
    all &= report(2, &c, t, Duration::from_secs(60));

    let (c, t) = timed(|| verify::check_end_to_end(25, 200, SEED).unwrap());
    all &= report(3, &c, t, Duration::from_secs(600));

    let (c, t) = timed(|| verify::check_resources().unwrap());
    all &= report(4, &c, t, Duration::from_secs(60));

    let (c, t) = timed(|| verify::check_deletion(5).unwrap());
    all &= report(5, &c, t, Duration::from_secs(30));

    let (c, t) = timed(|| verify::check_embedding(SEED).unwrap());
    all &= report(6, &c, t, Duration::from_secs(60));

    let (c, t) = timed(|| verify::check_determinism(SEED).unwrap());
    all &= report(7, &c, t, Duration::from_secs(60));

    assert!(all, "acceptance criteria failed");
}
