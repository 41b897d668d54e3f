//! Lifting weak pairs to symmetric matrices.
//!
//! A pair (a, b) whose discriminant every p | m divides weakly lifts to a
//! quarter-integer symmetric 4x4 matrix B with invariant polynomial
//! det(A0 x - B) = x^4 + ax + b and (1,3)-entry m. The construction shifts x
//! by the CRT double root r, at which point m divides f'(r) and m^2 divides
//! f(r), and those two quotients land in the matrix.

use sqfree::orbits::{crt_double_root, shifted_coeffs, sigma_m};
use sqfree::sieve::{enumerate_w, DivKind};
use sqfree::Budget;

fn main() {
    let budget = Budget::default();
    for m in [5u64, 7, 35] {
        let pool = enumerate_w(6, m, DivKind::Weak, &budget).unwrap();
        let pair = pool[pool.len() / 2];
        let (a, b) = (pair.a, pair.b);
        let r = crt_double_root(a, b, m).unwrap();
        let [c1, c2, c3, c4] = shifted_coeffs(a, b, r as i64);
        let s = sigma_m(a, b, m).unwrap();
        println!("m = {m}: lift of (a, b) = ({a}, {b})");
        println!("  double root r = {r} mod {m}");
        println!("  f(x + {r}) = x^4 + {c1} x^3 + {c2} x^2 + {c3} x + {c4}");
        println!(
            "  divisibility: {m} | {c3} and {} | {c4}",
            (m as i128) * (m as i128)
        );
        println!("  4B = {:?}", s.to_mat4());
        println!(
            "  invariant polynomial: {}  (= x^4 + {a}x + {b})",
            if s.invariant_poly().as_int_coeffs() == Some([0, 0, a as i128, b as i128]) {
                "verified"
            } else {
                "MISMATCH"
            }
        );
        println!("  (1,3) entry: {}", s.get4(0, 2) / 4);
        println!();
    }
}
