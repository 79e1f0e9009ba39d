//! Closed-form frame updates of the catalog primitives, written out per
//! primitive from their circuit identities.

#![allow(dead_code)]

use mbqc::linalg::{Mat2, Pauli};
use mbqc::{OutcomeRecord, PauliFrame};

fn bit(rec: &OutcomeRecord, name: &str) -> bool {
    rec.get(name).unwrap_or_else(|| panic!("outcome {name} missing"))
}

/// Pauli `X^a Z^b` conjugated by `u`, as bits.
fn clifford_image(u: &Mat2, a: bool, b: bool) -> (bool, bool) {
    let p = |x: bool, z: bool| {
        (if x { Pauli::X.matrix() } else { Mat2::identity() }) * (if z { Pauli::Z.matrix() } else { Mat2::identity() })
    };
    let img = *u * p(a, b) * u.dagger();
    for (x, z) in [(false, false), (true, false), (false, true), (true, true)] {
        if img.eq_up_to_phase(&p(x, z), 1e-9) {
            return (x, z);
        }
    }
    panic!("not a Clifford");
}

/// Output frame `[(a, b)]` per wire after primitive `name`, given the input
/// frame and the outcomes.
pub fn expected_frame(name: &str, f: &PauliFrame, rec: &OutcomeRecord, clifford: Option<Mat2>) -> Vec<(bool, bool)> {
    let o = |n: &str| bit(rec, n);
    let a = |w: usize| f.a[w];
    let b = |w: usize| f.b[w];
    match name {
        "teleport" => vec![(a(0) ^ o("d"), b(0) ^ o("c"))],
        "teleportu" => vec![(o("d"), o("c"))],
        "teleportgc" => vec![clifford_image(&clifford.expect("clifford"), a(0) ^ o("d"), b(0) ^ o("c"))],
        "zt" | "zrot" => vec![(a(0), b(0) ^ o("c"))],
        "xt" | "xrot" => vec![(a(0) ^ o("d"), b(0))],
        "uzt" => vec![(false, o("c"))],
        "uxt" => vec![(o("d"), false)],
        "1bittelepcz0" => vec![(a(0), b(0) ^ o("c1")), (a(1), b(1) ^ o("c2"))],
        "1bittelepcz1" => vec![(a(0), b(0) ^ a(1) ^ o("c1")), (a(1), b(1) ^ a(0) ^ o("c2"))],
        "xtcz" | "xtcz2" => vec![
            (a(0) ^ o("d1"), b(0) ^ a(1) ^ o("d2")),
            (a(1) ^ o("d2"), b(1) ^ a(0) ^ o("d1")),
        ],
        "xtcz3" | "xtcz4" | "xtcz5" | "rcz-enact" => {
            vec![(a(0), b(0) ^ a(1) ^ o("d2")), (a(1), b(1) ^ a(0) ^ o("d1"))]
        }
        "uzttqc" => vec![(o("k"), o("c"))],
        "uxttqc" => vec![(o("d"), o("k"))],
        "xtcz4tqc" => vec![(a(0), b(0) ^ a(1) ^ o("d2") ^ o("k1")), (a(1), b(1) ^ a(0) ^ o("d1") ^ o("k2"))],
        "xtcz5tqc" => vec![(a(0), b(0) ^ a(1) ^ o("d2")), (a(1), b(1) ^ a(0) ^ o("d1") ^ o("k2"))],
        "pseudo-cz" => vec![(a(0), b(0)), (a(1), b(1))],
        "rcz-delete" => vec![(a(0), b(0) ^ o("s1")), (a(1), b(1) ^ o("s2"))],
        "rcz2-enact" => vec![(a(0), b(0) ^ a(1)), (a(1), b(1) ^ a(0))],
        "rcz2-delete" => vec![(a(0), b(0) ^ o("s")), (a(1), b(1) ^ o("s"))],
        "xt-routing" => vec![(a(0) ^ o("k") ^ o("d"), b(0))],
        "zt-routing" => vec![(a(0) ^ o("k"), b(0) ^ o("c"))],
        other => panic!("no closed form for {other}"),
    }
}
