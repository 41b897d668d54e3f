//! Exact lattice counts on the zero locus of q against the main term.
//!
//! N_q(B; m, B0) counts the points of a congruence class B = B0 mod m inside
//! a box with q(B) = 0. The count is exact (tally-array convolutions, NTT for
//! the big boxes); the prediction is
//! m^{-8} (prod_{p|m} S(q;p)^{-1}) S(q) S_inf(B; q). Watch the relative gap
//! shrink as the box grows.

use sqfree::circle::{lattice_count, lattice_main_term, BoxSpec, VSlice};
use sqfree::Budget;

fn main() {
    let budget = Budget::default();
    println!(
        "{:>6} {:>3} {:>20} {:>22} {:>8}",
        "X", "m", "exact count", "main term (midpoint)", "gap"
    );
    for x in [25.0f64, 50.0, 100.0, 200.0, 400.0] {
        let bx = BoxSpec::standard(x);
        for m in [1u64, 3] {
            let b0 = if m == 1 {
                VSlice::default()
            } else {
                VSlice {
                    b11: 1,
                    b44: 3,
                    ..VSlice::default()
                }
            };
            let count = lattice_count(&bx, m, &b0, &budget).unwrap();
            let main = lattice_main_term(&bx, m, 1e-6).unwrap();
            let rel = (count as f64 - main.midpoint()) / main.midpoint();
            println!(
                "{x:>6} {m:>3} {count:>20} {:>22.3} {:>7.2}%",
                main.midpoint(),
                100.0 * rel
            );
        }
    }
}
