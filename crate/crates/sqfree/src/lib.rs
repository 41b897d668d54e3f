//! Tools for studying squarefree values of the binary form `beta*a^4 + alpha*b^3`.
//!
//! The flagship specialization `(alpha, beta) = (256, -27)` is the discriminant
//! `256*b^3 - 27*a^4` of the trinomial quartic `x^4 + a*x + b`, so the crate doubles
//! as a toolkit for counting monic quartics with squarefree discriminant. The parts:
//!
//! * [`density`]: local densities `rho(m)` of the congruence `m | beta*a^4 + alpha*b^3`,
//!   and the rigorously enclosed Euler product giving the squarefree density
//!   (about 28.03% in the flagship case).
//! * [`sieve`]: exhaustive squarefree counts over height boxes, the hybrid
//!   square-residue sieve, strong/weak square divisibility of the discriminant,
//!   and exact inclusion-exclusion cross-checks.
//! * [`orbits`]: the representation of quartics by symmetric 4x4 matrices
//!   `B` with invariant `det(A0*x - B)`, embeddings of weakly divisible pairs,
//!   solubility and distinguishedness over `F_p`, and orbit counts `d_p`.
//! * [`circle`]: quadratic exponential sums for the invariant form `q` on the
//!   traceless slice, singular series and singular integral, exact congruence-
//!   constrained lattice point counts, and the sieve weights built from them.
//!
//! Everything numeric is either exact (integer/rational) or carries an explicit
//! enclosure; randomized estimates are seeded and reproducible.

pub mod arith;
pub mod checks;
pub mod circle;
pub mod density;
pub mod error;
pub mod interval;
pub mod orbits;
pub mod sieve;

pub use error::{Error, Result};
pub use interval::Interval;

/// Resource limits for operations whose cost grows quickly with their inputs.
/// Callers hit these before memory or runtime does; the CLI maps refusals to a
/// dedicated exit code.
#[derive(Clone, Copy, Debug)]
pub struct Budget {
    /// Largest modulus for which `rho` will enumerate a residue table.
    pub max_rho_modulus: u64,
    /// Largest height parameter accepted by the exhaustive squarefree counts.
    pub max_count_x: u32,
    /// Largest prime for the brute-force orbit count over `W(F_p)` (10 coordinates).
    pub max_dp_brute: u32,
    /// Largest half-width accepted by the exact lattice point count.
    pub max_lattice_x: i64,
    /// Largest modulus for brute-force exponential sums (`r^9` terms).
    pub max_cq_brute: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_rho_modulus: 1 << 26,
            max_count_x: 8,
            max_dp_brute: 5,
            max_lattice_x: 2000,
            max_cq_brute: 6,
        }
    }
}

impl Budget {
    /// Budget with the long-run gates opened (slow verification paths).
    pub fn long() -> Self {
        Budget {
            max_count_x: 12,
            max_dp_brute: 7,
            max_lattice_x: 4000,
            ..Budget::default()
        }
    }
}
