//! The singular series of the invariant quadratic form.
//!
//! C_q(r) is the normalized complete exponential sum of q over V(Z/r); it is
//! multiplicative, vanishes at odd primes, decays like 4 r^{-7/2}, and its sum
//! S(q) = prod_p S(q; p) is the local part of the circle-method main term.

use sqfree::circle::{cq, singular_series, singular_series_p, CqMethod};
use sqfree::Budget;

fn main() {
    let budget = Budget::default();
    println!("{:>4} {:>22} {:>22}", "r", "C_q(r) factored", "brute");
    for r in 1..=6u64 {
        let f = cq(r, CqMethod::Factored, &budget).unwrap();
        let b = cq(r, CqMethod::Brute, &budget).unwrap();
        println!("{r:>4} {f:>22.15} {b:>22.15}");
    }
    for r in [8u64, 16, 32, 9, 27] {
        let f = cq(r, CqMethod::Factored, &budget).unwrap();
        println!("{r:>4} {f:>22.15} {:>22}", "-");
    }
    println!();
    let c2 = cq(2, CqMethod::Factored, &budget).unwrap();
    let c3 = cq(3, CqMethod::Factored, &budget).unwrap();
    let c6 = cq(6, CqMethod::Factored, &budget).unwrap();
    println!("multiplicativity: C_q(6) - C_q(2) C_q(3) = {:.2e}", c6 - c2 * c3);
    println!();
    let s = singular_series(1e-6).unwrap();
    println!("S(q)    in {s}");
    let mut prod = 1.0;
    for p in [2u64, 3, 5, 7, 11, 13] {
        let sp = singular_series_p(p, 1e-10).unwrap();
        prod *= sp.midpoint();
        println!("S(q;{p:>2}) in {sp}");
    }
    println!("product of the factors above: {prod:.10} (tail factors are 1 + O(p^-7/2))");
}
