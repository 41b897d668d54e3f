//! End-to-end consistency checks, one numbered criterion per function.
//!
//! Each criterion exercises a documented guarantee of this crate against an
//! independent route: closed forms against enumeration, fast counts against
//! nested-loop oracles, analytic main terms against exact lattice counts.
//! They power both `tests/acceptance.rs` and the `verify` subcommand of the
//! CLI, so pass/fail semantics live here and the callers only format lines.

use crate::arith::gcd_i128;
use crate::circle::{
    cq, lattice_count, singular_integral_checked, singular_series, singular_series_p,
    selberg_quantities, BoxSpec, CqMethod, VSlice,
};
use crate::density::{euler_product, rho_formula_check, rho_p2_closed};
use crate::interval::Interval;
use crate::orbits::{
    count_dp, crt_double_root, group_order_fp, invariant_fibers, shifted_coeffs, sigma_m,
    DpMethod, QuarticPoly,
};
use crate::sieve::{
    count_n, enumerate_w, moebius_identity_check, reduction_identity_check, BoxMode, DivKind,
};
use crate::Budget;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

/// Shared knobs for a verification run.
#[derive(Clone, Debug)]
pub struct CheckConfig {
    pub budget: Budget,
    pub seed: u64,
    /// Extends the exhaustive checks (Moebius identity at X = 3, brute-force
    /// orbit counts at p = 7) past the default desk-scale sizes.
    pub long: bool,
    /// Trims the two many-minute criteria so the suite answers in well under
    /// a minute; the trimmed scope is stated in each report.
    pub quick: bool,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            budget: Budget::default(),
            seed: 1729,
            long: false,
            quick: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub seconds: f64,
    pub detail: String,
}

impl CriterionReport {
    /// The one-line pass/fail summary.
    pub fn line(&self) -> String {
        format!(
            "criterion {:02} {:<28} {} ({:6.2}s)  {}",
            self.id,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.seconds,
            self.detail
        )
    }
}

fn run(
    id: usize,
    name: &'static str,
    body: impl FnOnce() -> crate::error::Result<(bool, String)>,
) -> CriterionReport {
    let start = Instant::now();
    let (passed, detail) = match body() {
        Ok(x) => x,
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionReport {
        id,
        name,
        passed,
        seconds: start.elapsed().as_secs_f64(),
        detail,
    }
}

/// 1: the density constant. The Euler product over p <= 1e5 must be tighter
/// than 1e-4, sit inside 0.28035 +- 5e-4, and its p in {2, 3} part must be
/// exactly 1/3.
pub fn density_enclosure(_cfg: &CheckConfig) -> CriterionReport {
    run(1, "density_enclosure", || {
        let ev = euler_product(256, -27, 100_000)?;
        let iv = ev.interval();
        let window = Interval::new(0.28035 - 0.0005, 0.28035 + 0.0005);
        let mut num: i128 = 1;
        let mut den: i128 = 1;
        for p in [2i128, 3] {
            let r = rho_p2_closed(p as u64, 256, -27)? as i128;
            num *= p.pow(4) - r;
            den *= p.pow(4);
        }
        let g = gcd_i128(num, den);
        let (num, den) = (num / g, den / g);
        let ok = iv.width() < 1e-4 && window.contains_interval(&iv) && (num, den) == (1, 3);
        Ok((
            ok,
            format!(
                "C(256,-27) in {iv}, width {:.2e}, partial product over 2,3 = {num}/{den}",
                iv.width()
            ),
        ))
    })
}

/// 2: the local density closed forms at every prime p <= 1000.
pub fn local_density_formula(_cfg: &CheckConfig) -> CriterionReport {
    run(2, "local_density_formula", || {
        let primes = crate::arith::primes_upto(1000);
        let mut failed = Vec::new();
        for &p in &primes {
            if !rho_formula_check(p)? {
                failed.push(p);
            }
        }
        let ok = failed.is_empty();
        Ok((
            ok,
            if ok {
                format!("all {} primes match p^3 / 2p^2-p", primes.len())
            } else {
                format!("mismatch at {failed:?}")
            },
        ))
    })
}

/// 3: the Moebius identity, exhaustively, with the zero-pair correction.
pub fn moebius_identity(cfg: &CheckConfig) -> CriterionReport {
    run(3, "moebius_identity", || {
        let mut detail = String::new();
        let mut ok = true;
        let xs: &[u32] = if cfg.long { &[2, 3] } else { &[2] };
        for &x in xs {
            let id = moebius_identity_check(x, 256, -27, BoxMode::HeightLt)?;
            ok &= id.holds();
            detail.push_str(&format!(
                "X={x}: count {} = sum {} - {}*{} over m <= {}; ",
                id.count, id.moebius_sum, id.zero_pairs, id.mertens, id.m_max
            ));
        }
        Ok((ok, detail.trim_end_matches("; ").to_string()))
    })
}

/// 4: the empirical squarefree fraction at X = 8 sits in the loose band
/// [0.26, 0.30] around the limiting density.
pub fn empirical_density(cfg: &CheckConfig) -> CriterionReport {
    run(4, "empirical_density", || {
        let c = count_n(8, 256, -27, BoxMode::HeightLt, &cfg.budget)?;
        let f = c.fraction();
        Ok((
            (0.26..=0.30).contains(&f),
            format!("{} of {} pairs squarefree, fraction {f:.5}", c.count, c.pairs),
        ))
    })
}

/// 5: the weak-pair embedding. For sampled weak pairs the lifted matrix has
/// the right invariant polynomial, carries m in its (1,3) entry, and the
/// shifted coefficients inherit the p | c3', p^2 | c4' divisibilities.
pub fn weak_pair_embedding(cfg: &CheckConfig) -> CriterionReport {
    run(5, "weak_pair_embedding", || {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut checked = 0usize;
        for m in [5u64, 7, 35] {
            let pool = enumerate_w(8, m, DivKind::Weak, &cfg.budget)?;
            if pool.len() < 100 {
                return Ok((false, format!("only {} weak pairs for m = {m}", pool.len())));
            }
            let sample: Vec<_> = pool.choose_multiple(&mut rng, 100).cloned().collect();
            for pair in sample {
                let s = sigma_m(pair.a, pair.b, m)?;
                let want =
                    QuarticPoly::from_int_coeffs(0, 0, pair.a as i128, pair.b as i128);
                if s.invariant_poly() != want {
                    return Ok((
                        false,
                        format!("invariant mismatch at (a,b,m) = ({}, {}, {m})", pair.a, pair.b),
                    ));
                }
                if s.get4(0, 2) != 4 * m as i64 {
                    return Ok((
                        false,
                        format!("(1,3) entry != m at (a,b,m) = ({}, {}, {m})", pair.a, pair.b),
                    ));
                }
                let r = crt_double_root(pair.a, pair.b, m)? as i64;
                let [_, _, c3, c4] = shifted_coeffs(pair.a, pair.b, r);
                for &(p, _) in &crate::arith::factor_u64(m)? {
                    let p = p as i128;
                    if c3 % p != 0 || c4 % (p * p) != 0 {
                        return Ok((
                            false,
                            format!(
                                "shift divisibility fails at (a,b,m) = ({}, {}, {m}), p = {p}",
                                pair.a, pair.b
                            ),
                        ));
                    }
                }
                checked += 1;
            }
        }
        Ok((true, format!("{checked} sampled embeddings verified for m in {{5, 7, 35}}")))
    })
}

/// 6: the orbit-counting formula against brute enumeration of V(F_p), plus
/// the fiber sizes of the invariant map at p = 3.
pub fn orbit_count_agreement(cfg: &CheckConfig) -> CriterionReport {
    run(6, "orbit_count_agreement", || {
        let mut ps = vec![3u64];
        if !cfg.quick {
            ps.push(5);
        }
        if cfg.long {
            ps.push(7);
        }
        let mut detail = String::new();
        for &p in &ps {
            let brute = count_dp(p, DpMethod::Brute, &cfg.budget)?;
            let formula = count_dp(p, DpMethod::OrbitFormula, &cfg.budget)?;
            if brute != formula {
                return Ok((false, format!("d_{p}: brute {brute} != formula {formula}")));
            }
            detail.push_str(&format!("d_{p} = {brute}; "));
        }
        let fibers = invariant_fibers(3)?;
        let want = group_order_fp(3);
        let nfib = fibers.len();
        for ((a, b), size) in fibers {
            if size as u128 != want {
                return Ok((
                    false,
                    format!("fiber over x^4 + {a}x + {b} has {size} points, want {want}"),
                ));
            }
        }
        detail.push_str(&format!("all {nfib} fibers at p = 3 have {want} points"));
        if cfg.quick {
            detail.push_str(" (quick: p = 5 skipped)");
        }
        Ok((true, detail))
    })
}

/// 7: the singular series. Normalization, multiplicativity to 1e-12, the
/// 4 r^{-7/2} decay for r <= 500, and positivity with the zeta(7/2) distance
/// bound.
pub fn exponential_sum_bounds(cfg: &CheckConfig) -> CriterionReport {
    run(7, "exponential_sum_bounds", || {
        if cq(1, CqMethod::Brute, &cfg.budget)? != 1.0
            || cq(1, CqMethod::Factored, &cfg.budget)? != 1.0
        {
            return Ok((false, "C_q(1) != 1".into()));
        }
        let c6 = cq(6, CqMethod::Brute, &cfg.budget)?;
        let c2 = cq(2, CqMethod::Brute, &cfg.budget)?;
        let c3 = cq(3, CqMethod::Brute, &cfg.budget)?;
        if (c6 - c2 * c3).abs() > 1e-12 {
            return Ok((
                false,
                format!("C_q(6) = {c6} vs C_q(2) C_q(3) = {}", c2 * c3),
            ));
        }
        for r in 1..=500u64 {
            let v = cq(r, CqMethod::Factored, &cfg.budget)?;
            if v.abs() > 4.0 * (r as f64).powf(-3.5) + 1e-12 {
                return Ok((false, format!("|C_q({r})| = {} breaks the decay bound", v.abs())));
            }
        }
        let s = singular_series(1e-6)?;
        let zeta_7_2 = 1.126_733_867_317_056_6;
        if (s.midpoint() - 1.0).abs() > 4.0 * (zeta_7_2 - 1.0) || s.lo <= 0.0 {
            return Ok((false, format!("S(q) = {s} escapes its a priori bounds")));
        }
        for p in [2u64, 3, 5, 7, 11, 13] {
            let sp = singular_series_p(p, 1e-8)?;
            if sp.lo <= 0.0 {
                return Ok((false, format!("S(q; {p}) = {sp} is not positive")));
            }
        }
        Ok((
            true,
            format!("S(q) = {s}; multiplicativity and decay verified to r = 500"),
        ))
    })
}

/// 8: the circle-method main term. At X = 2000 the exact congruence-class
/// lattice counts sit within 5% of m^{-8} (prod S(q;p)^{-1}) S(q) S_inf, with
/// the two singular-integral methods overlapping.
pub fn lattice_vs_main_term(cfg: &CheckConfig) -> CriterionReport {
    run(8, "lattice_vs_main_term", || {
        let bx = BoxSpec::standard(2000.0);
        let sinf = singular_integral_checked(&bx, 20_000_000, cfg.seed)?;
        let series = singular_series(1e-6)?;
        let mut worst = 0.0f64;
        let mut detail = String::new();
        for m in [1u64, 3, 5] {
            // mod 1 every base point gives the same (full) class, so the
            // three prescribed B0 collapse to one representative
            let classes: Vec<VSlice> = if m == 1 {
                vec![VSlice::default()]
            } else {
                let m = m as i64;
                vec![
                    VSlice { b11: 1, b44: m, ..VSlice::default() },
                    VSlice { b22: 1, b33: m, ..VSlice::default() },
                    VSlice { b12: 1, b34: m, ..VSlice::default() },
                ]
            };
            let mut main = series.mul(&sinf).scale((m as f64).powi(-8));
            for &(p, _) in &crate::arith::factor_u64(m)? {
                main = main.mul(&singular_series_p(p, 1e-8)?.recip());
            }
            for b0 in &classes {
                let count = lattice_count(&bx, m, b0, &cfg.budget)? as f64;
                let rel = (count - main.midpoint()).abs() / main.midpoint();
                worst = worst.max(rel);
                if rel > 0.05 {
                    return Ok((
                        false,
                        format!(
                            "m = {m}: count {count:.4e} vs main term {:.4e} ({:.2}% off)",
                            main.midpoint(),
                            100.0 * rel
                        ),
                    ));
                }
            }
            detail.push_str(&format!("m={m} ok; "));
        }
        detail.push_str(&format!(
            "worst deviation {:.2}%, S_inf in [{:.6e}, {:.6e}] (slab, overlaps monte-carlo)",
            100.0 * worst,
            sinf.lo,
            sinf.hi
        ));
        Ok((true, detail))
    })
}

/// Nested-loop oracle for one congruence class in one integer box.
fn lattice_oracle(w: &[i64; 9], m: i64, b0: &VSlice) -> u128 {
    let c0 = b0.coords();
    let vals: Vec<Vec<i64>> = (0..9)
        .map(|i| {
            (-w[i]..=w[i])
                .filter(|x| (x - c0[i]).rem_euclid(m) == 0)
                .collect()
        })
        .collect();
    // coordinate order b12, b34, b13, b24, b14, b22, b33, b11, b44 with the
    // partial value of q carried down the nest
    let mut count = 0u128;
    for &b12 in &vals[1] {
        for &b34 in &vals[7] {
            let s2 = 2 * b12 * b34;
            for &b13 in &vals[2] {
                for &b24 in &vals[5] {
                    let s3 = s2 + 2 * b13 * b24;
                    for &b14 in &vals[3] {
                        let s4 = s3 + 2 * b14 * b14;
                        for &b22 in &vals[4] {
                            for &b33 in &vals[6] {
                                let s5 = s4 + b22 * b33;
                                for &b11 in &vals[0] {
                                    for &b44 in &vals[8] {
                                        if s5 + b11 * b44 == 0 {
                                            count += 1;
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    count
}

/// 9: the convolution counter against literal nested loops, over every valid
/// integer box with all sides at most 4, for m = 1 and a class mod 3.
pub fn lattice_exact_oracle(cfg: &CheckConfig) -> CriterionReport {
    run(9, "lattice_exact_oracle", || {
        let mut boxes = 0usize;
        for t in 1i64..=4 {
            // per hyperbolic pair, the factorizations of t^2 with both sides <= 4
            let splits: Vec<(i64, i64)> = (1..=4)
                .flat_map(|a| (1..=4).map(move |b| (a, b)))
                .filter(|&(a, b)| a * b == t * t)
                .collect();
            for &(a0, b0) in &splits {
                for &(a1, b1) in &splits {
                    for &(a2, b2) in &splits {
                        for &(a3, b3) in &splits {
                            let hw = [
                                a0 as f64, a2 as f64, a3 as f64, t as f64, a1 as f64,
                                b3 as f64, b1 as f64, b2 as f64, b0 as f64,
                            ];
                            let bx = BoxSpec::new(hw, t as f64, 0.0)?;
                            let w = bx.int_half_widths();
                            for m in [1u64, 3] {
                                let base = if m == 1 {
                                    VSlice::default()
                                } else {
                                    VSlice { b11: 1, b44: 3, ..VSlice::default() }
                                };
                                let got = lattice_count(&bx, m, &base, &cfg.budget)?;
                                let want = lattice_oracle(&w, m as i64, &base);
                                if got != want {
                                    return Ok((
                                        false,
                                        format!("box {hw:?}, m = {m}: {got} != oracle {want}"),
                                    ));
                                }
                            }
                            boxes += 1;
                        }
                    }
                }
            }
        }
        Ok((true, format!("{boxes} boxes, m in {{1, 3}}, exact agreement")))
    })
}

/// 10: the sieve weight band 1/32 <= g(p) <= 7/8 for 7 <= p <= 101, with
/// out-of-band primes recorded; at least 80% must land inside.
pub fn sieve_weight_band(cfg: &CheckConfig) -> CriterionReport {
    run(10, "sieve_weight_band", || {
        let rep = selberg_quantities(7, 101, 1.0e6, &cfg.budget)?;
        let out: Vec<String> = rep
            .entries
            .iter()
            .filter(|e| !e.in_band)
            .map(|e| format!("g({}) = {:.4}", e.p, e.g))
            .collect();
        let ok = rep.band_pass_fraction >= 0.8;
        let mut detail = format!(
            "{}/{} primes in band",
            rep.entries.iter().filter(|e| e.in_band).count(),
            rep.entries.len()
        );
        if !out.is_empty() {
            detail.push_str(&format!("; outside: {}", out.join(", ")));
        }
        Ok((ok, detail))
    })
}

/// 11: the reduction identity on 1e4 seeded random tuples, exactly.
pub fn reduction_identity(cfg: &CheckConfig) -> CriterionReport {
    run(11, "reduction_identity", || {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let nonzero = |rng: &mut ChaCha8Rng, lim: i64| loop {
            let v = rng.gen_range(-lim..=lim);
            if v != 0 {
                return v;
            }
        };
        for _ in 0..10_000 {
            let alpha = nonzero(&mut rng, 50);
            let beta = nonzero(&mut rng, 50);
            let a = rng.gen_range(-100i64..=100);
            let b = rng.gen_range(-100i64..=100);
            if !reduction_identity_check(alpha, beta, a, b)? {
                return Ok((
                    false,
                    format!("identity fails at (alpha, beta, a, b) = ({alpha}, {beta}, {a}, {b})"),
                ));
            }
        }
        Ok((true, "10000 random tuples verified exactly".into()))
    })
}

/// Every criterion in order. Quick mode drops the two many-minute items
/// (empirical density at X = 8 and the X = 2000 lattice comparison) and trims
/// the brute orbit count to p = 3.
pub fn run_all(cfg: &CheckConfig) -> Vec<CriterionReport> {
    let mut out = vec![
        density_enclosure(cfg),
        local_density_formula(cfg),
        moebius_identity(cfg),
    ];
    if !cfg.quick {
        out.push(empirical_density(cfg));
    }
    out.push(weak_pair_embedding(cfg));
    out.push(orbit_count_agreement(cfg));
    out.push(exponential_sum_bounds(cfg));
    if !cfg.quick {
        out.push(lattice_vs_main_term(cfg));
    }
    out.push(lattice_exact_oracle(cfg));
    out.push(sieve_weight_band(cfg));
    out.push(reduction_identity(cfg));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_is_deterministic_and_fast_members_pass() {
        let cfg = CheckConfig {
            quick: true,
            ..CheckConfig::default()
        };
        // the cheap structural ones; heavyweight criteria run in the
        // dedicated acceptance target
        let r = moebius_identity(&cfg);
        assert!(r.passed, "{}", r.line());
        let r = reduction_identity(&cfg);
        assert!(r.passed, "{}", r.line());
        let again = reduction_identity(&cfg);
        assert_eq!(r.passed, again.passed);
        assert_eq!(r.detail, again.detail);
    }

    #[test]
    fn report_line_shape() {
        let rep = CriterionReport {
            id: 3,
            name: "moebius_identity",
            passed: true,
            seconds: 0.25,
            detail: "X=2 ok".into(),
        };
        let line = rep.line();
        assert!(line.contains("criterion 03"));
        assert!(line.contains("PASS"));
    }
}
