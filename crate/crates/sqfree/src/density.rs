//! Local densities of beta*a^4 + alpha*b^3 and the Euler product built from
//! them.
//!
//! rho(m) counts residue pairs (a, b) mod m with m | beta*a^4 + alpha*b^3.
//! Three routes to rho(p^2) coexist on purpose:
//!   * bucket enumeration, O(p^2) time and memory, no theory;
//!   * per-residue cube-root counting through the cyclic group (Z/p^2)^*;
//!   * a closed form in terms of v_p(alpha), v_p(beta).
//! The closed form is what makes the Euler product over p <= 10^5 cheap; the
//! other two exist to catch it lying.

use crate::arith::{
    gcd_u64, inv_mod, mulmod, powmod, primes_upto, reduce_i64, valuation_capped,
};
use crate::error::{budget, domain, range, Result};
use crate::interval::{Interval, IntervalValue};

/// Largest prime-power modulus rho() will enumerate directly.
const BUCKET_CAP: u64 = 1 << 26;

/// Count of residue pairs (a, b) mod `modulus` with
/// `modulus | beta*a^4 + alpha*b^3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LocalDensity {
    pub modulus: u64,
    pub count: u128,
    pub alpha: i64,
    pub beta: i64,
}

impl LocalDensity {
    /// count / modulus^2, the density of the solution set in (Z/m)^2.
    pub fn fraction(&self) -> f64 {
        self.count as f64 / (self.modulus as f64 * self.modulus as f64)
    }
}

/// Exact rho(m) for any m >= 1: per prime power by bucket enumeration, glued
/// multiplicatively across coprime factors.
pub fn rho(m: u64, alpha: i64, beta: i64) -> Result<LocalDensity> {
    if m == 0 {
        return range("rho: modulus must be >= 1");
    }
    if alpha == 0 || beta == 0 {
        return domain("rho: alpha and beta must be nonzero");
    }
    let mut count: u128 = 1;
    for (p, k) in crate::arith::factor_u64(m)? {
        let q = p
            .checked_pow(k)
            .filter(|&q| q <= BUCKET_CAP)
            .ok_or_else(|| {
                crate::error::Error::Budget(format!(
                    "rho: prime power {p}^{k} exceeds enumerable modulus {BUCKET_CAP}"
                ))
            })?;
        count *= rho_prime_power(q, alpha, beta) as u128;
    }
    Ok(LocalDensity {
        modulus: m,
        count,
        alpha,
        beta,
    })
}

/// Bucket enumeration mod a prime power q: histogram alpha*b^3 over all b,
/// then sum the histogram at -beta*a^4 over all a. O(q) time and memory.
fn rho_prime_power(q: u64, alpha: i64, beta: i64) -> u64 {
    let ar = reduce_i64(alpha, q);
    let br = reduce_i64(beta, q);
    let mut hist = vec![0u32; q as usize];
    for b in 0..q {
        let b3 = mulmod(mulmod(b, b, q), b, q);
        hist[mulmod(ar, b3, q) as usize] += 1;
    }
    let mut count = 0u64;
    for a in 0..q {
        let a2 = mulmod(a, a, q);
        let a4 = mulmod(a2, a2, q);
        let target = (q - mulmod(br, a4, q)) % q;
        count += hist[target as usize] as u64;
    }
    count
}

/// rho(p^2) by counting, for each a, the cube roots of -beta*a^4/alpha in
/// Z/p^2. Uses that (Z/p^2)^* is cyclic of order n = p(p-1) (n = 2 at p = 2):
/// a unit c has gcd(3, n) cube roots when c^(n/gcd(3,n)) = 1 and none
/// otherwise, c = 0 has p roots, and v_p(c) = 1 has none. Needs p not
/// dividing alpha so the equation solves for b^3.
pub fn rho_p2_rootcount(p: u64, alpha: i64, beta: i64) -> Result<u128> {
    if alpha == 0 || beta == 0 {
        return domain("rho_p2_rootcount: alpha and beta must be nonzero");
    }
    let q = p
        .checked_mul(p)
        .filter(|&q| q <= BUCKET_CAP)
        .ok_or_else(|| crate::error::Error::Budget(format!("rho_p2_rootcount: p^2 too large, p={p}")))?;
    let ar = reduce_i64(alpha, q);
    if ar % p == 0 {
        return domain(format!("rho_p2_rootcount: p={p} divides alpha"));
    }
    let ainv = inv_mod(ar, q).expect("unit alpha");
    let br = reduce_i64(beta, q);
    let n = if p == 2 { 2 } else { p * (p - 1) };
    let g = gcd_u64(3, n);
    let mut count = 0u128;
    for a in 0..q {
        let a2 = mulmod(a, a, q);
        let a4 = mulmod(a2, a2, q);
        let c = mulmod((q - mulmod(br, a4, q)) % q, ainv, q);
        count += if c == 0 {
            p as u128
        } else if c % p == 0 {
            0
        } else if powmod(c, n / g, q) == 1 {
            g as u128
        } else {
            0
        };
    }
    Ok(count)
}

/// Closed form for rho(p^2), any prime p, in terms of the capped valuations
/// A = min(v_p(alpha), 2) and B = min(v_p(beta), 2):
///
///   (A, B) = (0, 0)          -> 2p^2 - p
///   {A, B} = {0, 1}          -> p^2
///   A >= 2, B >= 2, or A=B=1 -> p^3
///
/// Derived by splitting pairs on (v_p(a), v_p(b)); the unit-unit count is
/// always phi(p^2) because a character with chi^3 = chi^4 = 1 is trivial.
/// Requires min(A, B) <= 1, i.e. p^2 does not divide gcd(alpha, beta).
pub fn rho_p2_closed(p: u64, alpha: i64, beta: i64) -> Result<u128> {
    if alpha == 0 || beta == 0 {
        return domain("rho_p2_closed: alpha and beta must be nonzero");
    }
    let a = valuation_capped(alpha as i128, p, 2);
    let b = valuation_capped(beta as i128, p, 2);
    if a >= 2 && b >= 2 {
        return domain(format!("rho_p2_closed: p^2 | gcd(alpha, beta) at p={p}"));
    }
    let p = p as u128;
    let p2 = p * p;
    Ok(if a >= 2 || b >= 2 || (a == 1 && b == 1) {
        p2 * p
    } else if a == 0 && b == 0 {
        2 * p2 - p
    } else {
        p2
    })
}

/// For (alpha, beta) = (256, -27): does enumerated rho(p^2) equal the stated
/// closed form p^3 (p = 2, 3) / 2p^2 - p (p >= 5)? Every route available at p
/// must agree: bucket enumeration always, cube-root counting when p is odd
/// (p = 2 divides 256), and the valuation closed form.
pub fn rho_formula_check(p: u64) -> Result<bool> {
    if !crate::arith::is_prime_u64(p) {
        return domain(format!("rho_formula_check: {p} is not prime"));
    }
    let (alpha, beta) = (256i64, -27i64);
    let expected: u128 = match p {
        2 | 3 => (p as u128).pow(3),
        _ => 2 * (p as u128) * (p as u128) - p as u128,
    };
    let q = p
        .checked_mul(p)
        .filter(|&q| q <= BUCKET_CAP)
        .ok_or_else(|| crate::error::Error::Budget(format!("rho_formula_check: p={p} too large")))?;
    let mut ok = rho_prime_power(q, alpha, beta) as u128 == expected;
    if p % 2 == 1 {
        ok &= rho_p2_rootcount(p, alpha, beta)? == expected;
    }
    ok &= rho_p2_closed(p, alpha, beta)? == expected;
    Ok(ok)
}

pub(crate) fn require_squarefree_gcd(alpha: i64, beta: i64) -> Result<()> {
    let g = gcd_u64(alpha.unsigned_abs(), beta.unsigned_abs());
    let fac = crate::arith::factor_u64(g).map_err(|e| {
        crate::error::Error::Budget(format!("cannot verify gcd(alpha, beta) squarefree: {e}"))
    })?;
    if fac.iter().any(|&(_, k)| k > 1) {
        return domain(format!("gcd(alpha, beta) = {g} is not squarefree"));
    }
    Ok(())
}

/// Interval containing prod_p (1 - rho(p^2) p^-4).
///
/// Finite part: exact rational factors (p^4 - rho(p^2)) / p^4 from the closed
/// form, accumulated with outward rounding. Tail over p > p_max: primes not
/// dividing alpha*beta contribute factors >= 1 - 2/p^2 whose total defect is
/// at most 2/p_max; at most k = floor(log_{p_max} |alpha*beta|) primes divide
/// alpha*beta and each contributes a factor >= 1 - 1/p_max (rho <= p^3
/// there). So the tail lies in [1 - (2 + k)/p_max, 1].
pub fn euler_product(alpha: i64, beta: i64, p_max: u64) -> Result<IntervalValue> {
    if alpha == 0 || beta == 0 {
        return domain("euler_product: alpha and beta must be nonzero");
    }
    if p_max < 5 {
        return domain("euler_product: p_max must be >= 5");
    }
    require_squarefree_gcd(alpha, beta)?;
    let mut finite = Interval::point(1.0);
    for p in primes_upto(p_max) {
        let r = rho_p2_closed(p, alpha, beta)? as i128;
        let p4 = (p as i128).pow(4);
        if r >= p4 {
            return budget(format!("euler_product: vanishing factor at p={p}"));
        }
        finite = finite.mul(&Interval::from_ratio(p4 - r, p4));
    }
    let ab = (alpha as i128 * beta as i128).unsigned_abs();
    let mut k = 0u32;
    let mut pw = p_max as u128;
    while pw <= ab {
        k += 1;
        pw = pw.saturating_mul(p_max as u128);
    }
    let defect = ((2.0 + k as f64) / p_max as f64).next_up();
    let tail = Interval::new((1.0 - defect).next_down().max(0.0), 1.0);
    let iv = finite.mul(&tail);
    Ok(IntervalValue::new(
        iv,
        format!(
            "euler product of (1 - rho(p^2)/p^4) over p <= {p_max}, \
             tail enclosed in [1 - {defect:.3e}, 1]"
        ),
    ))
}
