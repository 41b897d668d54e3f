//! Strong vs weak divisibility of the discriminant.
//!
//! p^2 | Delta(a, b) happens two ways: strongly, when every lift of
//! (a, b) mod p keeps the divisibility (for p >= 5 that is p | a, p | b), or
//! weakly. Weak pairs are the interesting ones: they admit the matrix lift
//! of the embedding example. This prints the census over a box and the exact
//! tail sums that control the error term of the sieve.

use sqfree::sieve::{classify, enumerate_w, tail_sum, BoxMode, DivKind};
use sqfree::Budget;

fn main() {
    let budget = Budget::default();
    let x = 4u32;
    println!("pairs with height < {x}, by class at p:");
    println!("{:>4} {:>9} {:>9}", "p", "strong", "weak");
    for p in [3u64, 5, 7, 11, 13] {
        let strong = enumerate_w(x, p, DivKind::Strong, &budget).unwrap().len();
        let weak = enumerate_w(x, p, DivKind::Weak, &budget).unwrap().len();
        println!("{p:>4} {strong:>9} {weak:>9}");
    }
    println!();
    let sample = enumerate_w(x, 35, DivKind::Weak, &budget).unwrap();
    println!("first weak pairs for m = 35: ");
    for pair in sample.iter().take(5) {
        let c5 = classify(pair.a, pair.b, 5).unwrap();
        let c7 = classify(pair.a, pair.b, 7).unwrap();
        println!(
            "  ({}, {})  classes at 5, 7: {:?}, {:?}",
            pair.a, pair.b, c5.kind, c7.kind
        );
    }
    println!();
    println!("tail sums sum_(m > M) N_m at X = 2 (exact):");
    for m_min in [1u64, 4, 16, 64, 256] {
        let t = tail_sum(2, m_min, 256, -27, BoxMode::HeightLt).unwrap();
        println!("  M = {m_min:>4}: {t}");
    }
}
