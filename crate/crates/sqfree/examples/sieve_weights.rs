//! Selberg sieve weights from the orbit counts.
//!
//! The local density g(p) = d_p S(q;p)^{-1} / p^8 feeds the Selberg upper
//! bound; the band 1/32 <= g(p) <= 7/8 keeps every h(p) = g/(1-g) and the
//! truncated normalizer H = sum_{m < sqrt(D)} h(m) under control.

use sqfree::circle::selberg_quantities;
use sqfree::Budget;

fn main() {
    let budget = Budget::default();
    let d = 1.0e6;
    let rep = selberg_quantities(7, 101, d, &budget).unwrap();
    println!("{:>5} {:>16} {:>10} {:>10} {:>6}", "p", "d_p", "g(p)", "h(p)", "band");
    for e in &rep.entries {
        println!(
            "{:>5} {:>16} {:>10.6} {:>10.6} {:>6}",
            e.p,
            e.dp,
            e.g,
            e.h,
            if e.in_band { "ok" } else { "OUT" }
        );
    }
    println!();
    println!(
        "H = sum of h(m) over squarefree m < sqrt({d:.0}) from these primes: {:.6}",
        rep.h_sum
    );
    println!(
        "band: [1/32, 7/8] = [{:.5}, {:.5}]; {:.0}% of primes inside",
        1.0 / 32.0,
        7.0 / 8.0,
        100.0 * rep.band_pass_fraction
    );
}
