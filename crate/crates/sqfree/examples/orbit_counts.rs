//! Orbit counts over F_p.
//!
//! d_p counts the matrices in V(F_p) that are soluble but not distinguished:
//! the local obstruction data entering the sieve weights. The stabilizer
//! formula walks the p^2 trinomial invariants and sums index-minus-fixed
//! differences per factorization shape; brute force enumerates all p^9
//! matrices. Both must agree, and d_p / p^8 drifts toward 7/32.

use sqfree::orbits::{count_dp, group_order_fp, invariant_fibers, DpMethod};
use sqfree::Budget;

fn main() {
    let budget = Budget::default();
    println!("{:>4} {:>14} {:>14} {:>10}", "p", "formula", "brute", "d_p/p^8");
    for p in [3u64, 5] {
        let f = count_dp(p, DpMethod::OrbitFormula, &budget).unwrap();
        let b = count_dp(p, DpMethod::Brute, &budget).unwrap();
        println!(
            "{p:>4} {f:>14} {b:>14} {:>10.6}",
            f as f64 / (p as f64).powi(8)
        );
        assert_eq!(f, b);
    }
    for p in [7u64, 11, 31, 101, 499] {
        let f = count_dp(p, DpMethod::OrbitFormula, &budget).unwrap();
        println!(
            "{p:>4} {f:>14} {:>14} {:>10.6}",
            "-",
            f as f64 / (p as f64).powi(8)
        );
    }
    println!("{:>4} {:>14} {:>14} {:>10.6}", "lim", "-", "-", 7.0 / 32.0);
    println!();
    println!(
        "fibers of the invariant map at p = 3 (group order {}):",
        group_order_fp(3)
    );
    for ((a, b), size) in invariant_fibers(3).unwrap() {
        println!("  x^4 + {a}x + {b}: {size} matrices");
    }
}
