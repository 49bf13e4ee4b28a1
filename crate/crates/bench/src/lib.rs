//! Fixtures shared by the benchmarks.

use ndescent::etale::{kummer_representatives, DescentClass};
use ndescent::pipeline::Setup;

/// The set-up for `y^2 = x^3 + a4 x + a6` over `F_p` at `n = 3`, with one
/// class per element of `E(F_p)/3E(F_p)`.
pub fn fixture(p: u64, a4: i64, a6: i64) -> (Setup, Vec<DescentClass>) {
    let setup = Setup::new(p, a4, a6, 3, 1).expect("valid curve");
    let classes = kummer_representatives(&setup.curve, 3)
        .iter()
        .map(|pt| setup.etale.class_from_point(pt, 1).expect("Kummer class"))
        .collect();
    (setup, classes)
}
