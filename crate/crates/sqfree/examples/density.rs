//! The squarefree density as an Euler product.
//!
//! Prints the leading local factors of C(alpha, beta) = prod_p (1 - rho(p^2)/p^4)
//! for the flagship pair (256, -27), where rho(p^2) counts residue pairs with
//! p^2 | 256 b^3 - 27 a^4, then encloses the full product with a tail bound.

use sqfree::density::{euler_product, rho};

fn main() {
    let (alpha, beta) = (256i64, -27i64);
    println!("local factors of C({alpha}, {beta}):");
    println!("{:>6} {:>10} {:>12}", "p", "rho(p^2)", "factor");
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23] {
        let ld = rho(p * p, alpha, beta).unwrap();
        println!(
            "{p:>6} {:>10} {:>12.8}",
            ld.count,
            1.0 - ld.fraction()
        );
    }
    println!();
    for pmax in [100u64, 10_000, 100_000] {
        let ev = euler_product(alpha, beta, pmax).unwrap();
        println!(
            "p <= {pmax:>6}: C in [{:.8}, {:.8}]  (width {:.2e})",
            ev.lower,
            ev.upper,
            ev.width()
        );
    }
    println!();
    println!("so a fraction ~0.2803 of the values 256 b^3 - 27 a^4 are squarefree,");
    println!("once the pairs are ordered by height max(|a|^(1/3), |b|^(1/4)).");
}
