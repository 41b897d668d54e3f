//! Integer primitives used everywhere: prime sieves, modular arithmetic,
//! integer roots, Mobius/Mertens tables, small factorization.

use crate::error::{budget, range, Result};

/// Primes `<= n` by a plain sieve of Eratosthenes.
pub fn primes_upto(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut comp = vec![false; n + 1];
    let mut out = Vec::new();
    for p in 2..=n {
        if !comp[p] {
            out.push(p as u64);
            let mut q = p * p;
            while q <= n {
                comp[q] = true;
                q += p;
            }
        }
    }
    out
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a as i128
}

pub fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn powmod(mut a: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a, m);
        }
        a = mulmod(a, a, m);
        e >>= 1;
    }
    acc
}

/// Modular inverse via extended Euclid; `None` when `gcd(a, m) != 1`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r.abs() != 1 {
        return None;
    }
    // old_r may be -1 when a started reduced; normalize.
    let inv = old_s * old_r.signum();
    Some(inv.rem_euclid(m as i128) as u64)
}

/// Reduce a signed value into `[0, m)`.
pub fn reduce_i64(v: i64, m: u64) -> u64 {
    (v as i128).rem_euclid(m as i128) as u64
}

pub fn reduce_i128(v: i128, m: u64) -> u64 {
    v.rem_euclid(m as i128) as u64
}

/// Combine `x = r1 mod m1`, `x = r2 mod m2` for coprime moduli.
pub fn crt_pair(r1: u64, m1: u64, r2: u64, m2: u64) -> Option<(u64, u64)> {
    let inv = inv_mod(m1 % m2, m2)?;
    let d = (r2 + m2 - r1 % m2) % m2;
    let t = mulmod(d, inv, m2);
    let m = m1.checked_mul(m2)?;
    Some((r1 + m1 * t, m))
}

pub fn isqrt_u128(n: u128) -> u128 {
    if n == 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as u128;
    // float seed can be off by a couple of ulps either way
    while x > 0 && x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

pub fn is_square_u128(n: u128) -> bool {
    let s = isqrt_u128(n);
    s * s == n
}

pub fn icbrt_u128(n: u128) -> u128 {
    if n == 0 {
        return 0;
    }
    let mut x = (n as f64).cbrt() as u128;
    while x > 0 && x * x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Mobius function on `0..=n` (index 0 unused, set to 0).
pub fn mobius_upto(n: u64) -> Vec<i8> {
    let n = n as usize;
    let mut mu = vec![1i8; n + 1];
    if n >= 1 {
        mu[0] = 0;
    }
    let mut sieved = vec![false; n + 1];
    for p in 2..=n {
        if !sieved[p] {
            let mut q = p;
            while q <= n {
                sieved[q] = true;
                q += p;
            }
            let mut q = p;
            while q <= n {
                mu[q] = -mu[q];
                q += p;
            }
            let p2 = p.checked_mul(p);
            if let Some(p2) = p2 {
                let mut q = p2;
                while q <= n {
                    mu[q] = 0;
                    q += p2;
                }
            }
        }
    }
    mu
}

/// Mertens sum `sum_{k<=n} mu(k)`.
pub fn mertens(n: u64) -> i64 {
    mobius_upto(n).iter().map(|&m| m as i64).sum()
}

/// Deterministic Miller-Rabin, valid for all u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Factor by trial division. Intended for desk-scale inputs; refuses when the
/// remaining cofactor would need more than `10^7` trial divisors and is not a
/// prime or prime power detectable directly.
pub fn factor_u64(n: u64) -> Result<Vec<(u64, u32)>> {
    if n == 0 {
        return range("factor_u64(0) is undefined");
    }
    let mut n = n;
    let mut out: Vec<(u64, u32)> = Vec::new();
    let push = |p: u64, k: u32, out: &mut Vec<(u64, u32)>| {
        if k > 0 {
            out.push((p, k));
        }
    };
    for p in [2u64, 3, 5] {
        let mut k = 0;
        while n % p == 0 {
            n /= p;
            k += 1;
        }
        push(p, k, &mut out);
    }
    let mut d = 7u64;
    // wheel over residues coprime to 30
    let steps = [4u64, 2, 4, 2, 4, 6, 2, 6];
    let mut i = 0;
    while d <= 10_000_000 && d as u128 * d as u128 <= n as u128 {
        if n % d == 0 {
            let mut k = 0;
            while n % d == 0 {
                n /= d;
                k += 1;
            }
            push(d, k, &mut out);
        }
        d += steps[i];
        i = (i + 1) % steps.len();
    }
    if n > 1 {
        if (n as u128) <= 10_000_000u128 * 10_000_000u128 || is_prime_u64(n) {
            // either guaranteed prime (no divisor below sqrt) or tested prime
            if is_prime_u64(n) {
                push(n, 1, &mut out);
            } else if is_square_u128(n as u128) {
                let s = isqrt_u128(n as u128) as u64;
                if is_prime_u64(s) {
                    push(s, 2, &mut out);
                } else {
                    return budget(format!("cofactor {n} resists trial division"));
                }
            } else {
                return budget(format!("cofactor {n} resists trial division"));
            }
        } else {
            return budget(format!("cofactor {n} too large for trial division"));
        }
    }
    Ok(out)
}

/// p-adic valuation capped at `cap` (the cap keeps callers in O(cap) even for
/// huge valuations).
pub fn valuation_capped(mut n: i128, p: u64, cap: u32) -> u32 {
    if n == 0 {
        return cap;
    }
    let p = p as i128;
    let mut v = 0;
    while v < cap && n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieve_matches_known_prime_counts() {
        assert_eq!(primes_upto(10), vec![2, 3, 5, 7]);
        assert_eq!(primes_upto(100).len(), 25);
        assert_eq!(primes_upto(100_000).len(), 9592);
    }

    #[test]
    fn modular_inverse_and_crt() {
        for m in [3u64, 5, 7, 9, 25, 49, 101] {
            for a in 1..m {
                if gcd_u64(a, m) == 1 {
                    let inv = inv_mod(a, m).unwrap();
                    assert_eq!(mulmod(a, inv, m), 1, "a={a} m={m}");
                }
            }
        }
        let (r, m) = crt_pair(2, 5, 3, 7).unwrap();
        assert_eq!(m, 35);
        assert_eq!(r % 5, 2);
        assert_eq!(r % 7, 3);
    }

    #[test]
    fn integer_roots_are_exact_at_boundaries() {
        for n in [0u128, 1, 2, 3, 4, 8, 9, 15, 16, 24, 25, 26, 1 << 62] {
            let s = isqrt_u128(n);
            assert!(s * s <= n && (s + 1) * (s + 1) > n, "isqrt({n})");
            let c = icbrt_u128(n);
            assert!(c * c * c <= n && (c + 1) * (c + 1) * (c + 1) > n, "icbrt({n})");
        }
    }

    #[test]
    fn mobius_small_values() {
        let mu = mobius_upto(30);
        assert_eq!(mu[1], 1);
        assert_eq!(mu[2], -1);
        assert_eq!(mu[4], 0);
        assert_eq!(mu[6], 1);
        assert_eq!(mu[30], -1);
        assert_eq!(mertens(10), -1);
    }

    #[test]
    fn miller_rabin_agrees_with_sieve() {
        let ps = primes_upto(2000);
        for n in 2..2000u64 {
            assert_eq!(is_prime_u64(n), ps.binary_search(&n).is_ok(), "n={n}");
        }
    }

    #[test]
    fn factoring_round_trips() {
        for n in [1u64, 2, 6, 12, 360, 1009, 1024, 999966000289] {
            let f = factor_u64(n).unwrap();
            let back: u64 = f.iter().map(|&(p, k)| p.pow(k)).product();
            assert_eq!(back, n);
            for &(p, _) in &f {
                assert!(is_prime_u64(p));
            }
        }
    }
}
