//! Exact squarefree counts over height boxes.
//!
//! Counts the pairs with H(a, b) < X whose value 256 b^3 - 27 a^4 is
//! squarefree, shows the empirical fraction drifting toward the limiting
//! density, and verifies the Moebius identity
//! N = sum_m mu(m) N_m - (zero pairs) * M(sqrt(max)) exactly where the range
//! of m can be exhausted.

use sqfree::sieve::{count_n, moebius_identity_check, BoxMode};
use sqfree::Budget;

fn main() {
    let budget = Budget::default();
    println!("{:>3} {:>12} {:>12} {:>10}", "X", "squarefree", "pairs", "fraction");
    for x in 1..=8u32 {
        let c = count_n(x, 256, -27, BoxMode::HeightLt, &budget).unwrap();
        println!("{x:>3} {:>12} {:>12} {:>10.5}", c.count, c.pairs, c.fraction());
    }
    println!("limit: 0.28031 (the Euler product; see the density example)");
    println!();
    for x in [2u32, 3] {
        let id = moebius_identity_check(x, 256, -27, BoxMode::HeightLt).unwrap();
        println!(
            "X = {x}: N = {}, sum mu(m) N_m = {} over m <= {}, zero pairs {} x Mertens {} -> identity {}",
            id.count,
            id.moebius_sum,
            id.m_max,
            id.zero_pairs,
            id.mertens,
            if id.holds() { "exact" } else { "BROKEN" }
        );
    }
}
