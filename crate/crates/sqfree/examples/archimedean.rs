//! The archimedean density S_inf and its two evaluation routes.
//!
//! S_inf(B; q) = vol(B) x (density of q at 0). The slab route convolves the
//! exact one-dimensional distributions of the four hyperbolic pair products
//! and integrates the square term in closed form; monte-carlo just samples.
//! Doubling every side multiplies S_inf by 2^7 (volume 2^9, density 2^-2).

use sqfree::circle::{singular_integral, BoxSpec, SingularIntegralMethod};

fn main() {
    for x in [25.0f64, 50.0, 100.0] {
        let bx = BoxSpec::standard(x);
        let slab = singular_integral(&bx, SingularIntegralMethod::Slab).unwrap();
        let mc = singular_integral(
            &bx,
            SingularIntegralMethod::MonteCarlo {
                samples: 4_000_000,
                seed: 7,
            },
        )
        .unwrap();
        println!("X = {x}:");
        println!("  slab        [{:.6e}, {:.6e}]", slab.lo, slab.hi);
        println!("  monte-carlo [{:.6e}, {:.6e}]", mc.lo, mc.hi);
        println!(
            "  overlap: {}; X^7 scaling: S_inf / X^7 = {:.6}",
            slab.intersects(&mc),
            slab.midpoint() / x.powi(7)
        );
    }
    let a = singular_integral(&BoxSpec::standard(60.0), SingularIntegralMethod::Slab).unwrap();
    let b = singular_integral(&BoxSpec::standard(120.0), SingularIntegralMethod::Slab).unwrap();
    println!();
    println!(
        "doubling the box: ratio {:.4} (2^7 = 128)",
        b.midpoint() / a.midpoint()
    );
}
