//! Circle-method quantities for the invariant quadratic form `q` on the
//! traceless slice of the symmetric-matrix representation.
//!
//! The slice `V` fixes `b23 = -b14`, leaving nine free coordinates, and
//!
//! ```text
//! q(B) = -b11*b44 - b22*b33 - 2*b12*b34 - 2*b13*b24 - 2*b14^2
//! ```
//!
//! so `q` splits into four hyperbolic coordinate pairs (coefficients
//! 1, 1, 2, 2) and one square term. Everything here leans on that splitting:
//! complete exponential sums factor into hyperbolic sums and one quadratic
//! Gauss sum, the archimedean density factors into one-dimensional
//! distributions, and the exact lattice counts reduce to one-dimensional
//! convolutions of pair-product tallies.

use crate::arith::{factor_u64, gcd_u64, inv_mod, is_prime_u64, primes_upto};
use crate::error::{budget, consistency, domain, range, Result};
use crate::interval::Interval;
use crate::orbits::{FpMatrix, SymMatrix};
use crate::Budget;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::PI;

pub use num_complex::Complex64;

/// A point of the slice `V`: the nine free entries of a symmetric 4x4 matrix
/// with `b23 = -b14`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct VSlice {
    pub b11: i64,
    pub b12: i64,
    pub b13: i64,
    pub b14: i64,
    pub b22: i64,
    pub b24: i64,
    pub b33: i64,
    pub b34: i64,
    pub b44: i64,
}

/// Fixed coordinate order used by every array in this module.
const COORD_NAMES: [&str; 9] = [
    "b11", "b12", "b13", "b14", "b22", "b24", "b33", "b34", "b44",
];

/// Hyperbolic pairs as (coordinate index, coordinate index, coefficient in q).
/// The first two carry coefficient 1, the last two coefficient 2; the square
/// term is coordinate 3 (`b14`) with coefficient 2.
const HYP_PAIRS: [(usize, usize, i64); 4] = [(0, 8, 1), (4, 6, 1), (1, 7, 2), (2, 5, 2)];
const SQ_COORD: usize = 3;

impl VSlice {
    pub fn from_coords(c: [i64; 9]) -> Self {
        VSlice {
            b11: c[0],
            b12: c[1],
            b13: c[2],
            b14: c[3],
            b22: c[4],
            b24: c[5],
            b33: c[6],
            b34: c[7],
            b44: c[8],
        }
    }

    pub fn coords(&self) -> [i64; 9] {
        [
            self.b11, self.b12, self.b13, self.b14, self.b22, self.b24, self.b33, self.b34,
            self.b44,
        ]
    }

    /// The corresponding integral symmetric matrix (quarter-integer storage,
    /// so every entry is scaled by 4; `b23` is pinned to `-b14`).
    pub fn to_sym(&self) -> SymMatrix {
        SymMatrix::from_entries4x([
            4 * self.b11,
            4 * self.b12,
            4 * self.b13,
            4 * self.b14,
            4 * self.b22,
            -4 * self.b14,
            4 * self.b24,
            4 * self.b33,
            4 * self.b34,
            4 * self.b44,
        ])
    }
}

/// `q(B)`, exactly. Declines with a range error instead of wrapping.
pub fn q_form(b: &VSlice) -> Result<i128> {
    let c = b.coords();
    let mut acc: i128 = 0;
    for &(i, j, k) in &HYP_PAIRS {
        let prod = (c[i] as i128)
            .checked_mul(c[j] as i128)
            .and_then(|t| t.checked_mul(k as i128));
        acc = match prod.and_then(|t| acc.checked_add(t)) {
            Some(v) => v,
            None => return range("q_form: entry products overflow i128"),
        };
    }
    let s = c[SQ_COORD] as i128;
    acc = match s
        .checked_mul(s)
        .and_then(|t| t.checked_mul(2))
        .and_then(|t| acc.checked_add(t))
    {
        Some(v) => v,
        None => return range("q_form: square term overflows i128"),
    };
    Ok(-acc)
}

/// The bilinear form `<v, w> = q(v + w) - q(v) - q(w)`, expanded so it is
/// exact even when `v + w` would overflow.
pub fn bilinear(v: &VSlice, w: &VSlice) -> Result<i128> {
    let a = v.coords();
    let b = w.coords();
    let mut acc: i128 = 0;
    for &(i, j, k) in &HYP_PAIRS {
        let cross = (a[i] as i128)
            .checked_mul(b[j] as i128)
            .zip((a[j] as i128).checked_mul(b[i] as i128))
            .and_then(|(x, y)| x.checked_add(y))
            .and_then(|t| t.checked_mul(k as i128));
        acc = match cross.and_then(|t| acc.checked_add(t)) {
            Some(v) => v,
            None => return range("bilinear: entry products overflow i128"),
        };
    }
    let sq = (a[SQ_COORD] as i128)
        .checked_mul(b[SQ_COORD] as i128)
        .and_then(|t| t.checked_mul(4));
    match sq.and_then(|t| acc.checked_add(t)) {
        Some(v) => Ok(-v),
        None => range("bilinear: square term overflows i128"),
    }
}

/// An axis-aligned box `|b_ij| <= X_ij` in `V(R)`, with the side constraints
/// that make the circle-method main term uniform: the four hyperbolic pair
/// products all equal `c2^2 X^2` and `X14 = c2 X`.
#[derive(Clone, Debug)]
pub struct BoxSpec {
    half_widths: [f64; 9],
    scale: f64,
    delta: f64,
    c1: f64,
    c2: f64,
}

impl BoxSpec {
    /// Validates the pair-product constraints (to relative 1e-9) and derives
    /// the constants `c1`, `c2`.
    pub fn new(half_widths: [f64; 9], scale: f64, delta: f64) -> Result<BoxSpec> {
        if !(scale > 0.0) || !scale.is_finite() {
            return domain(format!("box scale must be positive, got {scale}"));
        }
        if !(0.0..0.5).contains(&delta) {
            return domain(format!("box delta must lie in [0, 0.5), got {delta}"));
        }
        for (i, &w) in half_widths.iter().enumerate() {
            if !(w > 0.0) || !w.is_finite() {
                return domain(format!(
                    "half-width {} must be positive, got {w}",
                    COORD_NAMES[i]
                ));
            }
        }
        let c2 = half_widths[SQ_COORD] / scale;
        let target = c2 * c2 * scale * scale;
        for &(i, j, _) in &HYP_PAIRS {
            let prod = half_widths[i] * half_widths[j];
            if (prod - target).abs() > 1e-9 * target {
                return domain(format!(
                    "pair product {}*{} = {prod} differs from c2^2 X^2 = {target}",
                    COORD_NAMES[i], COORD_NAMES[j]
                ));
            }
        }
        let lo_bound = scale.powf(1.0 - 2.0 * delta);
        let hi_bound = scale.powf(1.0 + 2.0 * delta);
        let mut c1 = 1.0f64;
        for &w in &half_widths {
            c1 = c1.max(w / hi_bound).max(lo_bound / w);
        }
        Ok(BoxSpec {
            half_widths,
            scale,
            delta,
            c1,
            c2,
        })
    }

    /// The cube `|b_ij| <= x`: scale `x`, `delta = 0`, `c1 = c2 = 1`.
    pub fn standard(x: f64) -> BoxSpec {
        BoxSpec::new([x; 9], x, 0.0).expect("cube is always a valid box")
    }

    pub fn half_widths(&self) -> [f64; 9] {
        self.half_widths
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn volume(&self) -> f64 {
        self.half_widths.iter().map(|w| 2.0 * w).product()
    }

    /// All half-widths multiplied by `k` (scale follows along, so the box
    /// constraints stay satisfied).
    pub fn scaled(&self, k: f64) -> Result<BoxSpec> {
        let mut hw = self.half_widths;
        for w in hw.iter_mut() {
            *w *= k;
        }
        BoxSpec::new(hw, self.scale * k, self.delta)
    }

    /// Integer half-widths for lattice work (floor of each side).
    pub fn int_half_widths(&self) -> [i64; 9] {
        let mut w = [0i64; 9];
        for (wi, &x) in w.iter_mut().zip(self.half_widths.iter()) {
            *wi = x.floor() as i64;
        }
        w
    }
}

/// The complete hyperbolic sum `sum_{x,y mod r} e(a x y / r) = r * gcd(a, r)`,
/// returned exactly. The inner sum over `y` vanishes unless `r | a x`, which
/// happens for exactly `gcd(a, r)` values of `x`.
pub fn hyperbolic_sum(a: i64, r: u64) -> u128 {
    assert!(r >= 1, "hyperbolic_sum needs a positive modulus");
    let ar = a.rem_euclid(r as i64) as u64;
    r as u128 * gcd_u64(ar, r) as u128
}

/// The quadratic Gauss sum `sum_{x mod r} e(a x^2 / r)`, by direct summation.
/// The exponent is reduced mod `r` in integers before any floating point, so
/// each term carries only the sin/cos rounding of a reduced angle.
pub fn gauss_sum(a: i64, r: u64) -> Complex64 {
    gauss_sum_with_err(a, r).0
}

fn gauss_sum_with_err(a: i64, r: u64) -> (Complex64, f64) {
    assert!(r >= 1, "gauss_sum needs a positive modulus");
    let ar = a.rem_euclid(r as i64) as u64;
    let mut acc = Complex64::new(0.0, 0.0);
    for x in 0..r {
        // a x^2 mod r in integers: a x mod r first, then times x again
        let k = (ar as u128 * (x as u128) % r as u128 * (x as u128) % r as u128) as u64;
        let theta = 2.0 * PI * (k as f64) / (r as f64);
        acc += Complex64::new(theta.cos(), theta.sin());
    }
    // each term is unit modulus: ~1 ulp of angle error plus summation error
    let err = 5e-16 * r as f64 + 2e-16 * r as f64;
    (acc, err)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CqMethod {
    /// Histogram `q` over all r^9 points of `V(Z/r)`. The oracle; gated by
    /// `budget.max_cq_brute`.
    Brute,
    /// Per residue `a`, the product of the four hyperbolic sums and one Gauss
    /// sum that `q`'s pair splitting gives, divided by r^9.
    Factored,
}

/// The normalized complete sum
/// `C_q(r) = r^{-9} sum_{gcd(a,r)=1} sum_{B mod r} e(a q(B) / r)`.
pub fn cq(r: u64, method: CqMethod, budget_cfg: &Budget) -> Result<f64> {
    match method {
        CqMethod::Factored => Ok(cq_factored_with_err(r)?.0),
        CqMethod::Brute => cq_brute(r, budget_cfg),
    }
}

/// Factored evaluation plus a worst-case round-off bound, for series tails.
fn cq_factored_with_err(r: u64) -> Result<(f64, f64)> {
    if r == 0 {
        return domain("cq: modulus must be positive");
    }
    let r9 = (r as f64).powi(9);
    let terms: Vec<(f64, f64, f64)> = (0..r)
        .into_par_iter()
        .filter(|&a| gcd_u64(a, r) == 1)
        .map(|a| {
            let a = a as i64;
            let h11 = hyperbolic_sum(-a, r) as f64;
            let h22 = hyperbolic_sum(-a, r) as f64;
            let h12 = hyperbolic_sum(-2 * a, r) as f64;
            let h13 = hyperbolic_sum(-2 * a, r) as f64;
            let (g, gerr) = gauss_sum_with_err(-2 * a, r);
            let hyper = h11 * h22 * h12 * h13;
            let term = g * hyper;
            (term.re, term.im, hyper * gerr)
        })
        .collect();
    let mut re = 0.0;
    let mut im = 0.0;
    let mut err = 0.0;
    for (tr, ti, te) in terms {
        re += tr;
        im += ti;
        err += te;
    }
    debug_assert!(im.abs() <= err + 1e-9 * re.abs().max(1.0));
    let value = re / r9;
    let err = err / r9 + 1e-14 * value.abs() + f64::MIN_POSITIVE;
    Ok((value, err))
}

fn cq_brute(r: u64, budget_cfg: &Budget) -> Result<f64> {
    if r == 0 {
        return domain("cq: modulus must be positive");
    }
    if r > budget_cfg.max_cq_brute {
        return budget(format!(
            "cq: brute histogram of {r}^9 residue points exceeds max_cq_brute = {}",
            budget_cfg.max_cq_brute
        ));
    }
    let r9: u64 = r.pow(9);
    let hist = (0..r)
        .into_par_iter()
        .map(|c0| {
            let mut hist = vec![0u64; r as usize];
            let r8 = r.pow(8);
            for code in 0..r8 {
                let mut c = [0u64; 9];
                c[0] = c0;
                let mut t = code;
                for v in c.iter_mut().skip(1) {
                    *v = t % r;
                    t /= r;
                }
                let mut s: u64 = 0;
                for &(i, j, k) in &HYP_PAIRS {
                    s = (s + c[i] * c[j] % r * k as u64) % r;
                }
                s = (s + 2 * c[SQ_COORD] * c[SQ_COORD]) % r;
                // q = -s mod r
                hist[((r - s % r) % r) as usize] += 1;
            }
            hist
        })
        .reduce(
            || vec![0u64; r as usize],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    debug_assert_eq!(hist.iter().sum::<u64>(), r9);
    let mut acc = Complex64::new(0.0, 0.0);
    for a in 0..r {
        if gcd_u64(a, r) != 1 {
            continue;
        }
        for (v, &count) in hist.iter().enumerate() {
            let theta = 2.0 * PI * ((a as u128 * v as u128 % r as u128) as f64) / (r as f64);
            acc += (count as f64) * Complex64::new(theta.cos(), theta.sin());
        }
    }
    debug_assert!(acc.im.abs() < 1e-6 * (r9 as f64));
    Ok(acc.re / r9 as f64)
}

/// Truncation point for `sum_{r > R} 4 r^{-7/2} <= (8/5) R^{-5/2} <= cap`.
fn series_cutoff(cap: f64) -> u64 {
    let r = (8.0 / (5.0 * cap)).powf(0.4).ceil();
    (r as u64).max(1)
}

/// The singular series `S(q) = sum_{r >= 1} C_q(r)`, enclosed to about the
/// requested tolerance: the tail after the cutoff is bounded through
/// `|C_q(r)| <= 4 r^{-7/2}`, and accumulated round-off widens the result.
pub fn singular_series(tolerance: f64) -> Result<Interval> {
    if !(tolerance > 0.0) || tolerance < 1e-12 {
        return domain(format!(
            "singular_series: tolerance must lie in [1e-12, inf), got {tolerance}"
        ));
    }
    let cutoff = series_cutoff(tolerance / 4.0);
    let terms: Vec<Result<(f64, f64)>> = (2..=cutoff)
        .into_par_iter()
        .map(cq_factored_with_err)
        .collect();
    let mut sum = 1.0f64;
    let mut err = 0.0f64;
    for t in terms {
        let (v, e) = t?;
        sum += v;
        err += e;
    }
    let tail = 1.6 * (cutoff as f64).powf(-2.5);
    let slack = tail + err + 1e-14 * sum.abs();
    let enclosure = Interval::new(sum - slack, sum + slack);
    if enclosure.lo <= 0.0 {
        return consistency(format!(
            "singular series enclosure [{}, {}] is not positive",
            enclosure.lo, enclosure.hi
        ));
    }
    Ok(enclosure)
}

/// The local factor `S(q; p) = sum_{l >= 0} C_q(p^l)`, same contract as
/// `singular_series`. The tail after level `L` is bounded by
/// `4 p^{-7(L+1)/2} / (1 - p^{-7/2})`.
pub fn singular_series_p(p: u64, tolerance: f64) -> Result<Interval> {
    if !is_prime_u64(p) {
        return domain(format!("singular_series_p: p = {p} is not prime"));
    }
    if !(tolerance > 0.0) || tolerance < 1e-12 {
        return domain(format!(
            "singular_series_p: tolerance must lie in [1e-12, inf), got {tolerance}"
        ));
    }
    let pf = p as f64;
    let denom = 1.0 - pf.powf(-3.5);
    let mut levels = 0u32;
    while 4.0 * pf.powf(-3.5 * (levels as f64 + 1.0)) / denom > tolerance / 4.0 {
        levels += 1;
        if p.checked_pow(levels).map_or(true, |r| r > 4_000_000) {
            return domain(format!(
                "singular_series_p: tolerance {tolerance} needs prime-power moduli beyond 4e6"
            ));
        }
    }
    let mut sum = 1.0f64;
    let mut err = 0.0f64;
    for l in 1..=levels {
        let (v, e) = cq_factored_with_err(p.pow(l))?;
        sum += v;
        err += e;
    }
    let tail = 4.0 * pf.powf(-3.5 * (levels as f64 + 1.0)) / denom;
    let slack = tail + err + 1e-14 * sum.abs();
    let enclosure = Interval::new(sum - slack, sum + slack);
    if enclosure.lo <= 0.0 {
        return consistency(format!(
            "singular series factor at {p} is not positive: [{}, {}]",
            enclosure.lo, enclosure.hi
        ));
    }
    Ok(enclosure)
}

/// The congruence-restricted arc coefficient
/// `c_q(a; r, m, B0) = (rm)^{-9} sum_{B = B0 mod m} e(a q(B) / rm)`
/// (sum over `B mod rm`). For `gcd(r, m) = 1` it collapses to
/// `m^{-9} c_q(a; r)`; when a prime divides both the linear form
/// `<B0, *>` kills it, and the zero is returned structurally.
pub fn cq_arm(a: i64, r: u64, m: u64, b0: &VSlice) -> Result<Complex64> {
    if r == 0 {
        return domain("cq_arm: modulus r must be positive");
    }
    if gcd_u64(a.rem_euclid(r as i64) as u64, r) != 1 {
        return domain(format!("cq_arm: a = {a} is not coprime to r = {r}"));
    }
    check_congruence_class(m, b0)?;
    if gcd_u64(r, m) != 1 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    // c_q(a; r) through the pair splitting, then the m^{-9} normalization
    let h11 = hyperbolic_sum(-a, r) as f64;
    let h22 = hyperbolic_sum(-a, r) as f64;
    let h12 = hyperbolic_sum(-2 * a, r) as f64;
    let h13 = hyperbolic_sum(-2 * a, r) as f64;
    let g = gauss_sum(-2 * a, r);
    let r9 = (r as f64).powi(9);
    let m9 = (m as f64).powi(9);
    Ok(g * (h11 * h22 * h12 * h13) / r9 / m9)
}

/// Shared preconditions on a congruence class `B = B0 mod m`: `m` odd and
/// squarefree, `B0` nonzero mod every prime of `m`, and `m | q(B0)`.
fn check_congruence_class(m: u64, b0: &VSlice) -> Result<Vec<u64>> {
    if m == 0 {
        return domain("congruence modulus must be positive");
    }
    if m % 2 == 0 {
        return domain(format!("congruence modulus m = {m} must be odd"));
    }
    let facs = factor_u64(m)?;
    for &(p, e) in &facs {
        if e > 1 {
            return domain(format!("congruence modulus m = {m} is divisible by {p}^2"));
        }
        if b0.coords().iter().all(|&c| c.rem_euclid(p as i64) == 0) {
            return domain(format!("base point is zero mod {p}"));
        }
    }
    let q0 = q_form(b0)?;
    if q0.rem_euclid(m as i128) != 0 {
        return domain(format!(
            "congruence class is empty for q = 0: q(B0) = {q0} is not divisible by m = {m}"
        ));
    }
    Ok(facs.into_iter().map(|(p, _)| p).collect())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SingularIntegralMethod {
    /// Deterministic: the density of `q = 0` as a window volume
    /// `vol{|q| < eps} / (2 eps)`, with the window average done exactly
    /// against the square term and the shrinking-window limit taken by
    /// extrapolation in eps^2.
    Slab,
    /// Independent stochastic estimate; the interval is a 3-sigma band.
    MonteCarlo { samples: u64, seed: u64 },
}

/// The archimedean density `S_inf(B; q) = int_R int_B e(theta q) dB dtheta`,
/// i.e. `vol(B) * (density of q(B) at 0)`.
pub fn singular_integral(bx: &BoxSpec, method: SingularIntegralMethod) -> Result<Interval> {
    match method {
        SingularIntegralMethod::Slab => singular_integral_slab(bx),
        SingularIntegralMethod::MonteCarlo { samples, seed } => {
            singular_integral_mc(bx, samples, seed)
        }
    }
}

/// Runs both methods and insists their intervals overlap; returns the slab
/// enclosure (the tighter of the two).
pub fn singular_integral_checked(bx: &BoxSpec, samples: u64, seed: u64) -> Result<Interval> {
    let slab = singular_integral_slab(bx)?;
    let mc = singular_integral_mc(bx, samples, seed)?;
    if !slab.intersects(&mc) {
        return consistency(format!(
            "slab [{}, {}] and monte-carlo [{}, {}] singular integrals are disjoint",
            slab.lo, slab.hi, mc.lo, mc.hi
        ));
    }
    Ok(slab)
}

/// Exact one-sided area of `{x y <= s}` inside `[0, A] x [0, B]`, `s >= 0`.
fn product_area(s: f64, ab: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= ab {
        ab
    } else {
        s + s * (ab / s).ln()
    }
}

/// CDF of `Y = k * x * y` with `x, y` uniform on `[-A, A] x [-B, B]`.
fn pair_cdf(t: f64, k: f64, ab: f64) -> f64 {
    let smax = k * ab;
    if t <= -smax {
        0.0
    } else if t >= smax {
        1.0
    } else {
        0.5 + t.signum() * product_area(t.abs() / k, ab) / (2.0 * ab)
    }
}

/// Antiderivative of the CDF of `S = 2 b14^2`, `b14` uniform on `[-c, c]`:
/// `Phi(t) = int_0^t P(S <= u) du`.
fn square_cdf_integral(t: f64, c: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let tstar = 2.0 * c * c;
    if t <= tstar {
        t.powf(1.5) * 2.0 / (3.0 * std::f64::consts::SQRT_2 * c)
    } else {
        4.0 / 3.0 * c * c + (t - tstar)
    }
}

fn singular_integral_slab(bx: &BoxSpec) -> Result<Interval> {
    let hw = bx.half_widths;
    // grid pitch: fine enough that the pair-product densities are smooth at
    // this scale; the eps window is handled exactly, not by the grid
    let max_span: f64 = HYP_PAIRS
        .iter()
        .map(|&(i, j, k)| k as f64 * hw[i] * hw[j])
        .fold(0.0, f64::max);
    let h = max_span / 1024.0;

    // cell masses of each scaled pair product on the common grid
    let mut dist: Vec<(Vec<f64>, i64)> = Vec::new();
    for &(i, j, k) in &HYP_PAIRS {
        let ab = hw[i] * hw[j];
        let kf = k as f64;
        let cells = (kf * ab / h).ceil() as i64 + 1;
        let mut mass = vec![0.0f64; (2 * cells + 1) as usize];
        for (idx, m) in mass.iter_mut().enumerate() {
            let center = (idx as i64 - cells) as f64 * h;
            *m = pair_cdf(center + 0.5 * h, kf, ab) - pair_cdf(center - 0.5 * h, kf, ab);
        }
        dist.push((mass, -cells));
    }
    // convolve the four pair distributions
    let (mut acc, mut acc_off) = dist[0].clone();
    for (mass, off) in dist.iter().skip(1) {
        let mut next = vec![0.0f64; acc.len() + mass.len() - 1];
        for (ia, &va) in acc.iter().enumerate() {
            if va == 0.0 {
                continue;
            }
            for (ib, &vb) in mass.iter().enumerate() {
                next[ia + ib] += va * vb;
            }
        }
        acc = next;
        acc_off += off;
    }

    // window probabilities with the square term integrated exactly
    let c14 = hw[SQ_COORD];
    let window = |eps: f64| -> f64 {
        let mut p = 0.0f64;
        for (idx, &m) in acc.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            let lo = (idx as i64 + acc_off) as f64 * h - 0.5 * h;
            let hi = lo + h;
            // average of F_S(eps - v) - F_S(-eps - v) over the cell
            let avg = (square_cdf_integral(eps - lo, c14) - square_cdf_integral(eps - hi, c14)
                - square_cdf_integral(-eps - lo, c14)
                + square_cdf_integral(-eps - hi, c14))
                / h;
            p += m * avg;
        }
        p
    };

    let eps0 = bx.scale * bx.scale * 1e-3;
    let f0 = window(eps0) / (2.0 * eps0);
    let f1 = window(eps0 / 2.0) / eps0;
    let f2 = window(eps0 / 4.0) / (0.5 * eps0);
    // the window average is even in eps, so extrapolate linearly in eps^2
    let first = (4.0 * f1 - f0) / 3.0;
    let second = (4.0 * f2 - f1) / 3.0;
    let spread = (second - first).abs();
    let vol = bx.volume();
    let mid = vol * second;
    let slack = vol * (4.0 * spread) + mid.abs() * 5e-4 + f64::MIN_POSITIVE;
    let enclosure = Interval::new(mid - slack, mid + slack);
    if enclosure.lo <= 0.0 {
        return consistency(format!(
            "slab singular integral is not positive: [{}, {}]",
            enclosure.lo, enclosure.hi
        ));
    }
    Ok(enclosure)
}

fn singular_integral_mc(bx: &BoxSpec, samples: u64, seed: u64) -> Result<Interval> {
    if samples == 0 {
        return domain("monte-carlo singular integral needs at least one sample");
    }
    let hw = bx.half_widths;
    let eps = bx.scale * bx.scale * 1e-3;
    let batch: u64 = 1 << 20;
    let batches = samples.div_ceil(batch);
    let hits: u64 = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (b.wrapping_mul(0x9E37_79B9_7F4A_7C15)));
            let lo = b * batch;
            let n = batch.min(samples - lo);
            let mut hits = 0u64;
            for _ in 0..n {
                let mut c = [0.0f64; 9];
                for (ci, &w) in c.iter_mut().zip(hw.iter()) {
                    *ci = rng.gen_range(-w..=w);
                }
                let mut z = 2.0 * c[SQ_COORD] * c[SQ_COORD];
                for &(i, j, k) in &HYP_PAIRS {
                    z += k as f64 * c[i] * c[j];
                }
                if z.abs() < eps {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let n = samples as f64;
    let p = hits as f64 / n;
    let sigma_p = (p * (1.0 - p) / n).sqrt();
    let vol = bx.volume();
    let mid = vol * p / (2.0 * eps);
    let slack = vol * (3.0 * sigma_p) / (2.0 * eps) + mid.abs() * 1e-4 + f64::MIN_POSITIVE;
    Ok(Interval::new(mid - slack, mid + slack))
}

// ---------------------------------------------------------------------------
// Exact lattice counts
//
// N_q(B; m, B0) = #{B in B, B = B0 mod m, q(B) = 0}. Writing v_t for the four
// pair products and s for b14^2, the condition q = 0 reads
//
//   v_1 + v_2 + 2 v_3 + 2 v_4 + 2 s = 0,
//
// so the count is a single coefficient of the convolution of five integer
// tally arrays, each of size O(X^2). The first two tallies are convolved and
// the even-index half extracted (the parity of v_1 + v_2 is forced), which
// keeps every transform within one fixed power-of-two length.

/// NTT-friendly primes `= 1 mod 2^24` with verified generators. The Garner
/// product 1.6e37 exceeds any admissible box volume, so reconstructing modulo
/// all four is exact without a separate magnitude check.
const NTT_PRIMES: [(u32, u32); 4] = [
    (2_113_929_217, 5),  // 63 * 2^25 + 1
    (2_013_265_921, 31), // 15 * 2^27 + 1
    (1_811_939_329, 13), // 27 * 2^26 + 1
    (2_130_706_433, 3),  // 127 * 2^24 + 1
];

const MAX_PAIR_PRODUCT: i64 = 4_194_303; // keeps every transform inside 2^24

/// Montgomery arithmetic mod an odd `p < 2^31`.
#[derive(Clone, Copy)]
struct Mont {
    p: u32,
    ninv: u32, // -p^{-1} mod 2^32
    r2: u32,   // 2^64 mod p
}

impl Mont {
    fn new(p: u32) -> Mont {
        let mut inv = p;
        for _ in 0..4 {
            inv = inv.wrapping_mul(2u32.wrapping_sub(p.wrapping_mul(inv)));
        }
        debug_assert_eq!(p.wrapping_mul(inv), 1);
        let r2 = ((1u128 << 64) % p as u128) as u32;
        Mont {
            p,
            ninv: inv.wrapping_neg(),
            r2,
        }
    }

    #[inline(always)]
    fn mul(&self, a: u32, b: u32) -> u32 {
        let t = a as u64 * b as u64;
        let m = (t as u32).wrapping_mul(self.ninv);
        let u = ((t + m as u64 * self.p as u64) >> 32) as u32;
        if u >= self.p {
            u - self.p
        } else {
            u
        }
    }

    #[inline(always)]
    fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline(always)]
    fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    fn to_mont(&self, a: u32) -> u32 {
        self.mul(a, self.r2)
    }

    fn from_mont(&self, a: u32) -> u32 {
        self.mul(a, 1)
    }

    fn pow(&self, mut base: u32, mut e: u64) -> u32 {
        // base in montgomery form
        let mut acc = self.to_mont(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
}

/// Twiddle tables for one prime and one transform length.
struct NttPlan {
    mont: Mont,
    n: usize,
    tw: Vec<u32>,  // w^j, j < n/2, montgomery form
    itw: Vec<u32>, // w^{-j}
    n_inv: u32,    // montgomery form
}

impl NttPlan {
    fn new(p: u32, g: u32, n: usize) -> NttPlan {
        assert!(n.is_power_of_two());
        assert_eq!((p as u64 - 1) % n as u64, 0, "order {n} unavailable mod {p}");
        let mont = Mont::new(p);
        let w = mont.pow(mont.to_mont(g), (p as u64 - 1) / n as u64);
        let winv = mont.pow(w, n as u64 - 1);
        debug_assert_eq!(mont.from_mont(mont.pow(w, n as u64 / 2)), p - 1);
        let one = mont.to_mont(1);
        let mut tw = vec![one; n / 2];
        let mut itw = vec![one; n / 2];
        for j in 1..n / 2 {
            tw[j] = mont.mul(tw[j - 1], w);
            itw[j] = mont.mul(itw[j - 1], winv);
        }
        let n_inv = mont.pow(
            mont.to_mont(n as u32 % p),
            p as u64 - 2,
        );
        NttPlan {
            mont,
            n,
            tw,
            itw,
            n_inv,
        }
    }

    /// Decimation-in-frequency forward transform: natural order in,
    /// bit-reversed order out. Pointwise products of two outputs feed either
    /// `inverse` or a plain sum, so the permutation is never materialized.
    fn forward(&self, a: &mut [u32]) {
        let m = &self.mont;
        let mut len = self.n;
        while len >= 2 {
            let half = len / 2;
            let stride = self.n / len;
            for block in a.chunks_exact_mut(len) {
                let (lo, hi) = block.split_at_mut(half);
                for j in 0..half {
                    let u = lo[j];
                    let v = hi[j];
                    lo[j] = m.add(u, v);
                    hi[j] = m.mul(m.sub(u, v), self.tw[j * stride]);
                }
            }
            len = half;
        }
    }

    /// Decimation-in-time inverse: bit-reversed in, natural order out,
    /// without the 1/n scaling (callers fold it where cheapest).
    fn inverse_unscaled(&self, a: &mut [u32]) {
        let m = &self.mont;
        let mut len = 2;
        while len <= self.n {
            let half = len / 2;
            let stride = self.n / len;
            for block in a.chunks_exact_mut(len) {
                let (lo, hi) = block.split_at_mut(half);
                for j in 0..half {
                    let u = lo[j];
                    let v = m.mul(hi[j], self.itw[j * stride]);
                    lo[j] = m.add(u, v);
                    hi[j] = m.sub(u, v);
                }
            }
            len *= 2;
        }
    }
}

/// Integer count arrays for one congruence-constrained box: tallies of each
/// pair product and of `b14^2`.
struct LatticeTallies {
    pair: [Vec<u32>; 4], // pair[t][v + P_t] = #{(x,y) admissible, x y = v}
    p_off: [i64; 4],
    square: Vec<u32>, // square[v] = #{h admissible, h^2 = v}
}

/// Admissible values of one coordinate: |x| <= w, x = r mod m.
fn coord_values(w: i64, m: u64, r: i64) -> impl Iterator<Item = i64> {
    let m = m as i64;
    let r = r.rem_euclid(m);
    let start = -w + (r - (-w)).rem_euclid(m);
    (0..).map(move |k| start + k * m).take_while(move |&x| x <= w)
}

fn build_tallies(w: &[i64; 9], m: u64, b0: &VSlice) -> LatticeTallies {
    let c0 = b0.coords();
    let mut pair: [Vec<u32>; 4] = Default::default();
    let mut p_off = [0i64; 4];
    for (t, &(i, j, _)) in HYP_PAIRS.iter().enumerate() {
        let cap = w[i] * w[j];
        let mut arr = vec![0u32; (2 * cap + 1) as usize];
        for x in coord_values(w[i], m, c0[i]) {
            for y in coord_values(w[j], m, c0[j]) {
                arr[(x * y + cap) as usize] += 1;
            }
        }
        pair[t] = arr;
        p_off[t] = cap;
    }
    let wq = w[SQ_COORD];
    let mut square = vec![0u32; (wq * wq + 1) as usize];
    for h in coord_values(wq, m, c0[SQ_COORD]) {
        square[(h * h) as usize] += 1;
    }
    LatticeTallies {
        pair,
        p_off,
        square,
    }
}

/// Plain convolution of two small tally arrays, exactly in u64.
fn conv_u64(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (ia, &va) in a.iter().enumerate() {
        if va == 0 {
            continue;
        }
        for (ib, &vb) in b.iter().enumerate() {
            out[ia + ib] += va * vb;
        }
    }
    out
}

/// The number of lattice points of the congruence class `B = B0 mod m` inside
/// the box with `q(B) = 0`, exactly. Counts by convolving the five tally
/// arrays; small boxes run a direct convolution, larger ones a four-prime NTT
/// whose Garner reconstruction is provably below the modulus product.
pub fn lattice_count(bx: &BoxSpec, m: u64, b0: &VSlice, budget_cfg: &Budget) -> Result<u128> {
    check_congruence_class(m, b0)?;
    let w = bx.int_half_widths();
    if w.iter().any(|&x| x < 1) {
        return domain("lattice_count: every half-width must be at least 1");
    }
    if bx.scale > budget_cfg.max_lattice_x as f64 {
        let est = bx.volume() / (8.0 * bx.c2 * bx.c2 * bx.scale * bx.scale)
            / (m as f64).powi(8);
        return budget(format!(
            "lattice_count: scale {} exceeds max_lattice_x = {}; crude count estimate {:.3e}",
            bx.scale, budget_cfg.max_lattice_x, est
        ));
    }
    for (t, &(i, j, _)) in HYP_PAIRS.iter().enumerate() {
        let _ = t;
        if w[i] * w[j] > MAX_PAIR_PRODUCT {
            return budget(format!(
                "lattice_count: pair product {}*{} = {} exceeds {}",
                COORD_NAMES[i],
                COORD_NAMES[j],
                w[i] * w[j],
                MAX_PAIR_PRODUCT
            ));
        }
    }
    if w[SQ_COORD] * w[SQ_COORD] > MAX_PAIR_PRODUCT {
        return budget(format!(
            "lattice_count: b14^2 spread {} exceeds {}",
            w[SQ_COORD] * w[SQ_COORD],
            MAX_PAIR_PRODUCT
        ));
    }
    let tallies = build_tallies(&w, m, b0);
    let small = tallies.pair.iter().all(|a| a.len() <= 8193) && tallies.square.len() <= 4097;
    if small {
        lattice_count_direct(&tallies)
    } else {
        lattice_count_ntt(&tallies)
    }
}

/// Index bookkeeping shared by both convolution routes.
///
/// With offsets `P_t`, the equation `v1 + v2 + 2(v3 + v4 + s) = 0` becomes:
/// index of `a1 * a2` at `2u + par` (only that parity occurs), and then
/// `u + x3 + x4 + xs = K2` with `K2 = (P_0 + P_1 - par)/2 + P_2 + P_3`.
struct LatticeIndexing {
    par: usize,
    k2: usize,
    r_len: usize,    // full a1*a2 support
    rpar_len: usize, // halved support
}

fn lattice_indexing(t: &LatticeTallies) -> LatticeIndexing {
    let p01 = (t.p_off[0] + t.p_off[1]) as usize;
    let par = p01 % 2;
    let k2 = (p01 - par) / 2 + (t.p_off[2] + t.p_off[3]) as usize;
    let r_len = t.pair[0].len() + t.pair[1].len() - 1;
    let rpar_len = (r_len - 1 - par) / 2 + 1;
    LatticeIndexing {
        par,
        k2,
        r_len,
        rpar_len,
    }
}

fn lattice_count_direct(t: &LatticeTallies) -> Result<u128> {
    let ix = lattice_indexing(t);
    let wide = |a: &[u32]| a.iter().map(|&x| x as u64).collect::<Vec<u64>>();
    let r = conv_u64(&wide(&t.pair[0]), &wide(&t.pair[1]));
    let rpar: Vec<u64> = (0..ix.rpar_len).map(|u| r[2 * u + ix.par]).collect();
    let d = conv_u64(&wide(&t.pair[2]), &wide(&t.pair[3]));
    let de = conv_u64(&d, &wide(&t.square));
    let mut count: u128 = 0;
    for (u, &ru) in rpar.iter().enumerate() {
        if ru == 0 || u > ix.k2 {
            continue;
        }
        let rest = ix.k2 - u;
        if rest < de.len() {
            count += ru as u128 * de[rest] as u128;
        }
    }
    Ok(count)
}

fn lattice_count_ntt(t: &LatticeTallies) -> Result<u128> {
    let ix = lattice_indexing(t);
    let sq_len = t.square.len();
    let max_in = t
        .pair
        .iter()
        .map(|a| a.len())
        .chain([ix.r_len, ix.rpar_len, sq_len])
        .max()
        .unwrap();
    // cyclic length: holds the full a1*a2 product and, for the final
    // coefficient pick, wraps no occupied index onto K2
    let max_s = (ix.rpar_len - 1) + (t.pair[2].len() - 1) + (t.pair[3].len() - 1) + (sq_len - 1);
    let mut n = max_in.next_power_of_two();
    while n < (1 << 24) && (ix.r_len > n || ix.k2 + n <= max_s) {
        n *= 2;
    }
    if ix.r_len > n || ix.k2 + n <= max_s {
        return budget(format!(
            "lattice_count: convolution support {max_s} does not fit a 2^24 transform"
        ));
    }

    let mut residues = [0u64; 4];
    for (slot, &(p, g)) in NTT_PRIMES.iter().enumerate() {
        let plan = NttPlan::new(p, g, n);
        let mont = plan.mont;
        let load = |dst: &mut Vec<u32>, src: &[u32], shift: usize| {
            dst.fill(0);
            for (i, &v) in src.iter().enumerate() {
                if v != 0 {
                    dst[(i + shift) % n] = mont.to_mont(v % p);
                }
            }
        };
        let mut buf1 = vec![0u32; n];
        let mut buf2 = vec![0u32; n];
        // R = a1 * a2, materialized to take its even-parity half
        load(&mut buf1, &t.pair[0], 0);
        plan.forward(&mut buf1);
        load(&mut buf2, &t.pair[1], 0);
        plan.forward(&mut buf2);
        for (x, &y) in buf1.iter_mut().zip(buf2.iter()) {
            *x = mont.mul(*x, y);
        }
        plan.inverse_unscaled(&mut buf1);
        let rpar: Vec<u32> = (0..ix.rpar_len)
            .map(|u| mont.mul(buf1[2 * u + ix.par], plan.n_inv))
            .collect();
        // spectrum of rpar * a3 * a4 * shifted square tally; the shift puts
        // the wanted coefficient K2 at cyclic index 0
        buf1.fill(0);
        buf1[..ix.rpar_len].copy_from_slice(&rpar);
        plan.forward(&mut buf1);
        for (src, shift) in [
            (&t.pair[2], 0usize),
            (&t.pair[3], 0usize),
            (&t.square, n - (ix.k2 % n)),
        ] {
            load(&mut buf2, src, shift % n);
            plan.forward(&mut buf2);
            for (x, &y) in buf1.iter_mut().zip(buf2.iter()) {
                *x = mont.mul(*x, y);
            }
        }
        let mut sum: u64 = 0;
        for &v in &buf1 {
            sum += v as u64;
        }
        let sum = mont.mul((sum % p as u64) as u32, plan.n_inv);
        residues[slot] = mont.from_mont(sum) as u64;
    }
    Ok(garner4(&residues))
}

/// Mixed-radix reconstruction modulo the product of the four NTT primes.
fn garner4(res: &[u64; 4]) -> u128 {
    let mut x: u128 = res[0] as u128;
    let mut modulus: u128 = NTT_PRIMES[0].0 as u128;
    for i in 1..4 {
        let p = NTT_PRIMES[i].0 as u64;
        let m_mod_p = (modulus % p as u128) as u64;
        let inv = inv_mod(m_mod_p, p).expect("NTT primes are pairwise coprime");
        let x_mod_p = (x % p as u128) as u64;
        let diff = (res[i] + p - x_mod_p) % p;
        let t = (diff as u128 * inv as u128 % p as u128) as u64;
        x += modulus * t as u128;
        modulus *= p as u128;
    }
    x
}

/// The circle-method prediction for `lattice_count`:
/// `m^{-8} (prod_{p|m} S(q;p)^{-1}) S(q) S_inf(B;q)`, as an interval.
pub fn lattice_main_term(bx: &BoxSpec, m: u64, series_tol: f64) -> Result<Interval> {
    let facs = factor_u64(m)?;
    let mut acc = singular_series(series_tol)?;
    for &(p, e) in &facs {
        if e > 1 {
            return domain(format!("lattice_main_term: m = {m} is not squarefree"));
        }
        acc = acc.mul(&singular_series_p(p, series_tol)?.recip());
    }
    let inf = singular_integral(bx, SingularIntegralMethod::Slab)?;
    Ok(acc.mul(&inf).scale((m as f64).powi(-8)))
}

// ---------------------------------------------------------------------------
// Selberg sieve weights

#[derive(Clone, Debug)]
pub struct SelbergEntry {
    pub p: u64,
    pub dp: u128,
    /// g(p) = d_p * S(q;p)^{-1} / p^8.
    pub g: f64,
    /// h(p) = g(p) / (1 - g(p)).
    pub h: f64,
    /// Whether 1/32 <= g(p) <= 7/8.
    pub in_band: bool,
}

#[derive(Clone, Debug)]
pub struct SelbergReport {
    pub entries: Vec<SelbergEntry>,
    /// H = sum over squarefree m | P with m < sqrt(D) of h(m).
    pub h_sum: f64,
    pub d: f64,
    pub band_pass_fraction: f64,
}

/// Sieve weights over the primes in `[p_lo, p_hi]`: the local densities
/// `g(p)` from the orbit-formula count `d_p`, their band check, the
/// multiplicative `h`, and the normalizer `H` truncated at `sqrt(D)`.
pub fn selberg_quantities(
    p_lo: u64,
    p_hi: u64,
    d: f64,
    budget_cfg: &Budget,
) -> Result<SelbergReport> {
    if p_lo < 3 || p_hi < p_lo {
        return domain(format!(
            "selberg_quantities: need 3 <= p_lo <= p_hi, got [{p_lo}, {p_hi}]"
        ));
    }
    if !(d > 1.0) {
        return domain(format!("selberg_quantities: D must exceed 1, got {d}"));
    }
    let primes: Vec<u64> = primes_upto(p_hi)
        .into_iter()
        .filter(|&p| p >= p_lo)
        .collect();
    let mut entries = Vec::with_capacity(primes.len());
    for &p in &primes {
        let dp = crate::orbits::count_dp(p, crate::orbits::DpMethod::OrbitFormula, budget_cfg)?;
        let sp = singular_series_p(p, 1e-10)?.midpoint();
        let g = dp as f64 / (p as f64).powi(8) / sp;
        if !(0.0..1.0).contains(&g) {
            return consistency(format!("g({p}) = {g} escapes (0, 1)"));
        }
        let h = g / (1.0 - g);
        let in_band = (1.0 / 32.0..=7.0 / 8.0).contains(&g);
        entries.push(SelbergEntry {
            p,
            dp,
            g,
            h,
            in_band,
        });
    }
    // H = sum of h(m) over squarefree m | P below sqrt(D), by depth-first
    // products (h is multiplicative with h(1) = 1)
    let bound = d.sqrt();
    let hs: Vec<(f64, f64)> = entries.iter().map(|e| (e.p as f64, e.h)).collect();
    fn dfs(hs: &[(f64, f64)], from: usize, m: f64, hm: f64, bound: f64) -> f64 {
        let mut total = hm;
        for i in from..hs.len() {
            let (p, hp) = hs[i];
            if m * p >= bound {
                break;
            }
            total += dfs(hs, i + 1, m * p, hm * hp, bound);
        }
        total
    }
    let h_sum = dfs(&hs, 0, 1.0, 1.0, bound);
    let passed = entries.iter().filter(|e| e.in_band).count();
    let band_pass_fraction = if entries.is_empty() {
        1.0
    } else {
        passed as f64 / entries.len() as f64
    };
    Ok(SelbergReport {
        entries,
        h_sum,
        d,
        band_pass_fraction,
    })
}

// ---------------------------------------------------------------------------
// Exponential sum vs integral

/// A real quadratic phase `f(x) = a2 x^2 + a1 x + a0`.
#[derive(Clone, Copy, Debug)]
pub struct QuadPhase {
    pub a2: f64,
    pub a1: f64,
    pub a0: f64,
}

impl QuadPhase {
    pub fn eval(&self, x: f64) -> f64 {
        (self.a2 * x + self.a1) * x + self.a0
    }

    pub fn deriv(&self, x: f64) -> f64 {
        2.0 * self.a2 * x + self.a1
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ExpIntegralCheck {
    pub sum: Complex64,
    pub integral: Complex64,
    pub residual: f64,
}

fn e_of(phase: f64) -> Complex64 {
    let frac = 2.0 * PI * (phase - phase.floor());
    Complex64::new(frac.cos(), frac.sin())
}

/// Compares `sum_{lo < n < hi} e(f(n))` against `int_lo^hi e(f(x)) dx` for a
/// quadratic `f` with `|f'| <= 1/2` on the interval (the stationary-phase-free
/// regime where the two agree to an absolute constant).
pub fn exp_sum_vs_integral_check(f: &QuadPhase, lo: f64, hi: f64) -> Result<ExpIntegralCheck> {
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return domain(format!("bad interval [{lo}, {hi}]"));
    }
    let d_lo = f.deriv(lo).abs();
    let d_hi = f.deriv(hi).abs();
    if d_lo > 0.5 || d_hi > 0.5 {
        return domain(format!(
            "|f'| reaches {:.4} on [{lo}, {hi}]; the comparison needs |f'| <= 1/2",
            d_lo.max(d_hi)
        ));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut n = lo.floor() as i64 + 1;
    if (n as f64) <= lo {
        n += 1;
    }
    while (n as f64) < hi {
        sum += e_of(f.eval(n as f64));
        n += 1;
    }
    // composite Simpson; the integrand oscillates at most once per two units
    let segments = (((hi - lo) * 8.0).ceil() as usize).clamp(64, 4_000_000) & !1;
    let h = (hi - lo) / segments as f64;
    let mut integral = e_of(f.eval(lo)) + e_of(f.eval(hi));
    for k in 1..segments {
        let weight = if k % 2 == 1 { 4.0 } else { 2.0 };
        integral += weight * e_of(f.eval(lo + k as f64 * h));
    }
    integral *= h / 3.0;
    let residual = (sum - integral).norm();
    Ok(ExpIntegralCheck {
        sum,
        integral,
        residual,
    })
}

// ---------------------------------------------------------------------------
// Empirical classification of the zero locus

#[derive(Clone, Debug)]
pub struct ZeroLocusAtP {
    pub p: u64,
    pub points: u64,
    /// Points whose reduction mod p has vanishing discriminant or is
    /// distinguished (the union the sieve removes at p).
    pub reducible: u64,
}

impl ZeroLocusAtP {
    pub fn fraction(&self) -> f64 {
        if self.points == 0 {
            0.0
        } else {
            self.reducible as f64 / self.points as f64
        }
    }
}

/// Enumerates every integer point of the box with `q(B) = 0` (no congruence)
/// and classifies each modulo the given primes. Intended for small boxes; the
/// enumeration is refused beyond roughly 2e7 tuples.
pub fn zero_locus_classified(bx: &BoxSpec, primes: &[u64]) -> Result<Vec<ZeroLocusAtP>> {
    let w = bx.int_half_widths();
    let outer: i128 = [1usize, 2, 3, 4, 5, 6, 7]
        .iter()
        .map(|&i| 2 * w[i] as i128 + 1)
        .product();
    if outer > 20_000_000 {
        return budget(format!(
            "zero_locus_classified: {outer} outer tuples exceed the enumeration cap"
        ));
    }
    for &p in primes {
        if p < 3 || !is_prime_u64(p) {
            return domain(format!("zero_locus_classified: {p} is not an odd prime"));
        }
    }
    // tally (b11, b44) pairs by product, then walk the other seven coordinates
    let cap = w[0] * w[8];
    let mut by_product: Vec<Vec<(i64, i64)>> = vec![Vec::new(); (2 * cap + 1) as usize];
    for x in -w[0]..=w[0] {
        for y in -w[8]..=w[8] {
            by_product[(x * y + cap) as usize].push((x, y));
        }
    }
    let mut points: Vec<VSlice> = Vec::new();
    let mut c = [0i64; 9];
    let ranges: Vec<Vec<i64>> = (1..=7).map(|i| (-w[i]..=w[i]).collect()).collect();
    let mut stack_walk = |points: &mut Vec<VSlice>| {
        for &c1 in &ranges[0] {
            c[1] = c1;
            for &c2 in &ranges[1] {
                c[2] = c2;
                for &c3 in &ranges[2] {
                    c[3] = c3;
                    for &c4 in &ranges[3] {
                        c[4] = c4;
                        for &c5 in &ranges[4] {
                            c[5] = c5;
                            for &c6 in &ranges[5] {
                                c[6] = c6;
                                for &c7 in &ranges[6] {
                                    c[7] = c7;
                                    let rest =
                                        c[4] * c[6] + 2 * (c[1] * c[7] + c[2] * c[5] + c[3] * c[3]);
                                    if rest.abs() > cap {
                                        continue;
                                    }
                                    for &(x, y) in &by_product[(-rest + cap) as usize] {
                                        c[0] = x;
                                        c[8] = y;
                                        points.push(VSlice::from_coords(c));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    };
    stack_walk(&mut points);
    let mut out = Vec::new();
    for &p in primes {
        let mut reducible = 0u64;
        for b in &points {
            let fp = FpMatrix::from_sym(&b.to_sym(), p)?;
            if fp.disc() == 0 || fp.is_distinguished()? {
                reducible += 1;
            }
        }
        out.push(ZeroLocusAtP {
            p,
            points: points.len() as u64,
            reducible,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Budget;
    use proptest::prelude::*;
    use rand::{Rng, RngCore};

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn random_slice(rng: &mut ChaCha8Rng, bound: i64) -> VSlice {
        let mut c = [0i64; 9];
        for v in c.iter_mut() {
            *v = rng.gen_range(-bound..=bound);
        }
        VSlice::from_coords(c)
    }

    #[test]
    fn q_matches_x2_coefficient_of_invariant_poly() {
        let mut rng = rng(11);
        for _ in 0..2000 {
            let b = random_slice(&mut rng, 50);
            let f = b.to_sym().invariant_poly();
            let c = f.as_int_coeffs().expect("integer matrix, integral poly");
            assert_eq!(c[0], 0, "traceless slice");
            assert_eq!(c[1], q_form(&b).unwrap(), "x^2 coefficient is q");
        }
    }

    #[test]
    fn q_examples_and_overflow() {
        assert_eq!(q_form(&VSlice::default()).unwrap(), 0);
        let unit_pair = VSlice {
            b11: 1,
            b44: 1,
            ..VSlice::default()
        };
        assert_eq!(q_form(&unit_pair).unwrap(), -1);
        let huge = VSlice {
            b11: i64::MAX,
            b44: i64::MAX,
            b14: i64::MAX,
            b22: i64::MAX,
            b33: i64::MAX,
            ..VSlice::default()
        };
        assert!(matches!(q_form(&huge), Err(crate::Error::Range(_))));
    }

    #[test]
    fn bilinear_polarizes_q() {
        let mut rng = rng(12);
        for _ in 0..100_000 {
            let v = random_slice(&mut rng, 1000);
            assert_eq!(
                bilinear(&v, &v).unwrap(),
                2 * q_form(&v).unwrap(),
                "<B, B> = 2 q(B)"
            );
        }
        for _ in 0..10_000 {
            let v = random_slice(&mut rng, 1000);
            let w = random_slice(&mut rng, 1000);
            let sum = VSlice::from_coords(std::array::from_fn(|i| {
                v.coords()[i] + w.coords()[i]
            }));
            assert_eq!(
                bilinear(&v, &w).unwrap(),
                q_form(&sum).unwrap() - q_form(&v).unwrap() - q_form(&w).unwrap()
            );
        }
    }

    #[test]
    fn box_spec_validation() {
        let bx = BoxSpec::standard(100.0);
        assert_eq!(bx.c2(), 1.0);
        assert_eq!(bx.volume(), 200.0f64.powi(9));
        // skewing one pair off its partner breaks the product constraint
        let mut hw = [100.0f64; 9];
        hw[0] = 50.0;
        assert!(BoxSpec::new(hw, 100.0, 0.0).is_err());
        // compensating keeps it valid
        hw[8] = 200.0;
        let skew = BoxSpec::new(hw, 100.0, 0.1).unwrap();
        assert!(skew.c1() >= 2.0f64.powf(0.5).recip());
        assert!(BoxSpec::new([0.0; 9], 1.0, 0.0).is_err());
    }

    #[test]
    fn hyperbolic_sum_direct_oracle() {
        for r in 1..=40u64 {
            for a in 0..r {
                let mut acc = Complex64::new(0.0, 0.0);
                for x in 0..r {
                    for y in 0..r {
                        let k = (a * x % r) * y % r;
                        let theta = 2.0 * PI * k as f64 / r as f64;
                        acc += Complex64::new(theta.cos(), theta.sin());
                    }
                }
                let exact = hyperbolic_sum(a as i64, r) as f64;
                assert!(
                    (acc.re - exact).abs() < 1e-6 && acc.im.abs() < 1e-6,
                    "r = {r}, a = {a}: direct {acc} vs {exact}"
                );
            }
        }
        for r in 1..=100u64 {
            assert_eq!(hyperbolic_sum(1, r), r as u128);
        }
        assert_eq!(hyperbolic_sum(-3, 9), 27);
    }

    #[test]
    fn gauss_sum_magnitude_bound() {
        assert_eq!(gauss_sum(1, 1), Complex64::new(1.0, 0.0));
        for r in 1..=200u64 {
            for a in 0..r {
                let g = gauss_sum(a as i64, r);
                let bound = (2.0 * gcd_u64(a, r).max(1) as f64 * r as f64).sqrt();
                assert!(
                    g.norm() <= bound + 1e-9,
                    "|G({a}, {r})| = {} > {bound}",
                    g.norm()
                );
            }
        }
    }

    #[test]
    fn cq_brute_is_the_oracle_for_factored() {
        let budget = Budget::default();
        for r in 1..=6u64 {
            let b = cq(r, CqMethod::Brute, &budget).unwrap();
            let f = cq(r, CqMethod::Factored, &budget).unwrap();
            assert!(
                (b - f).abs() < 1e-9,
                "r = {r}: brute {b} vs factored {f}"
            );
        }
    }

    #[test]
    fn cq_known_values_and_gate() {
        let budget = Budget::default();
        assert_eq!(cq(1, CqMethod::Brute, &budget).unwrap(), 1.0);
        assert_eq!(cq(1, CqMethod::Factored, &budget).unwrap(), 1.0);
        let c2 = cq(2, CqMethod::Brute, &budget).unwrap();
        assert!((c2 - 0.25).abs() < 1e-12, "C_q(2) = {c2}");
        assert!(matches!(
            cq(7, CqMethod::Brute, &budget),
            Err(crate::Error::Budget(_))
        ));
        assert!(cq(0, CqMethod::Factored, &budget).is_err());
    }

    #[test]
    fn cq_multiplicative_up_to_30() {
        let budget = Budget::default();
        for r in 2..30u64 {
            for s in 2..30u64 {
                if r * s > 30 || gcd_u64(r, s) != 1 {
                    continue;
                }
                let lhs = cq(r * s, CqMethod::Factored, &budget).unwrap();
                let rhs = cq(r, CqMethod::Factored, &budget).unwrap()
                    * cq(s, CqMethod::Factored, &budget).unwrap();
                assert!(
                    (lhs - rhs).abs() < 1e-9,
                    "C_q({r}*{s}) = {lhs} vs product {rhs}"
                );
            }
        }
        // the flagship instance of multiplicativity, to full precision
        let c6 = cq(6, CqMethod::Factored, &budget).unwrap();
        let c2 = cq(2, CqMethod::Factored, &budget).unwrap();
        let c3 = cq(3, CqMethod::Factored, &budget).unwrap();
        assert!((c6 - c2 * c3).abs() < 1e-12);
    }

    #[test]
    fn cq_decay_bound_to_500() {
        let budget = Budget::default();
        for r in 1..=500u64 {
            let v = cq(r, CqMethod::Factored, &budget).unwrap();
            let bound = 4.0 * (r as f64).powf(-3.5);
            assert!(
                v.abs() <= bound + 1e-12,
                "|C_q({r})| = {} > 4 r^(-7/2) = {bound}",
                v.abs()
            );
        }
    }

    #[test]
    fn singular_series_enclosures() {
        let s = singular_series(1e-5).unwrap();
        assert!(s.width() <= 1e-5);
        assert!(s.lo > 0.0);
        let zeta_bound = 4.0 * (1.126_733_867_581_087_6 - 1.0);
        assert!((s.midpoint() - 1.0).abs() <= zeta_bound);
        for p in [2u64, 3, 5, 7, 11] {
            let sp = singular_series_p(p, 1e-8).unwrap();
            assert!(sp.lo > 0.0);
            let bound = 4.0 / ((p as f64).powf(3.5) - 1.0);
            assert!(
                (sp.midpoint() - 1.0).abs() <= bound + 1e-8,
                "S(q; {p}) = {} vs 1 +- {bound}",
                sp.midpoint()
            );
        }
        assert!(singular_series(0.0).is_err());
        assert!(singular_series_p(4, 1e-6).is_err());
    }

    /// Direct-summation oracle for the congruence-restricted coefficient:
    /// parameterize B1 = B0 + m C with C mod r.
    fn cq_arm_direct(a: i64, r: u64, m: u64, b0: &VSlice) -> Complex64 {
        let rm = (r * m) as i128;
        let mut acc = Complex64::new(0.0, 0.0);
        let mut c = [0i64; 9];
        let n = (r as u64).pow(9);
        for code in 0..n {
            let mut t = code;
            for v in c.iter_mut() {
                *v = (t % r) as i64;
                t /= r;
            }
            let b1 = VSlice::from_coords(std::array::from_fn(|i| {
                b0.coords()[i] + m as i64 * c[i]
            }));
            let qv = q_form(&b1).unwrap().rem_euclid(rm);
            let theta = 2.0 * PI * (qv as f64) / rm as f64;
            acc += Complex64::new(theta.cos(), theta.sin());
        }
        let scale = (r as f64).powi(9) * (m as f64).powi(9);
        acc * (a as f64 * 0.0 + 1.0) / scale
    }

    /// Oracle with the `a` multiplier kept in the exponent.
    fn cq_arm_direct_a(a: i64, r: u64, m: u64, b0: &VSlice) -> Complex64 {
        let rm = (r * m) as i128;
        let mut acc = Complex64::new(0.0, 0.0);
        let mut c = [0i64; 9];
        let n = (r as u64).pow(9);
        for code in 0..n {
            let mut t = code;
            for v in c.iter_mut() {
                *v = (t % r) as i64;
                t /= r;
            }
            let b1 = VSlice::from_coords(std::array::from_fn(|i| {
                b0.coords()[i] + m as i64 * c[i]
            }));
            let qv = (a as i128 * q_form(&b1).unwrap()).rem_euclid(rm);
            let theta = 2.0 * PI * (qv as f64) / rm as f64;
            acc += Complex64::new(theta.cos(), theta.sin());
        }
        acc / ((r as f64).powi(9) * (m as f64).powi(9))
    }

    #[test]
    fn cq_arm_against_direct_sums() {
        // q(B0) = -3, nonzero mod 3: a valid class mod 3
        let b0 = VSlice {
            b11: 1,
            b44: 3,
            ..VSlice::default()
        };
        // coprime moduli: collapses to m^{-9} c_q(a; r)
        for (a, r) in [(1i64, 2u64), (1, 4), (3, 4)] {
            let got = cq_arm(a, r, 3, &b0).unwrap();
            let want = cq_arm_direct_a(a, r, 3, &b0);
            assert!(
                (got - want).norm() < 1e-9,
                "a = {a}, r = {r}: {got} vs {want}"
            );
        }
        // shared prime: the sum vanishes, and the function returns a
        // structural zero
        let direct = cq_arm_direct_a(1, 3, 3, &b0);
        assert!(direct.norm() < 1e-9 * 3f64.powi(9));
        let got = cq_arm(1, 3, 3, &b0).unwrap();
        assert_eq!(got, Complex64::new(0.0, 0.0));
        let _ = cq_arm_direct(1, 3, 3, &b0);
    }

    #[test]
    fn cq_arm_preconditions() {
        let b0 = VSlice {
            b11: 1,
            b44: 3,
            ..VSlice::default()
        };
        assert!(cq_arm(2, 4, 3, &b0).is_err(), "a not coprime to r");
        assert!(cq_arm(1, 2, 6, &b0).is_err(), "m even");
        assert!(cq_arm(1, 2, 9, &b0).is_err(), "m not squarefree");
        let zero_mod_5 = VSlice {
            b11: 5,
            b44: 5,
            ..VSlice::default()
        };
        assert!(cq_arm(1, 2, 5, &zero_mod_5).is_err(), "B0 = 0 mod 5");
        let bad_q = VSlice {
            b11: 1,
            b44: 1,
            ..VSlice::default()
        };
        assert!(cq_arm(1, 2, 3, &bad_q).is_err(), "q(B0) not divisible by m");
    }

    #[test]
    fn singular_integral_methods_overlap() {
        let bx = BoxSpec::standard(40.0);
        let slab = singular_integral(&bx, SingularIntegralMethod::Slab).unwrap();
        let mc = singular_integral(
            &bx,
            SingularIntegralMethod::MonteCarlo {
                samples: 2_000_000,
                seed: 7,
            },
        )
        .unwrap();
        assert!(slab.lo > 0.0);
        assert!(
            slab.intersects(&mc),
            "slab [{}, {}] vs mc [{}, {}]",
            slab.lo,
            slab.hi,
            mc.lo,
            mc.hi
        );
        assert!(singular_integral_checked(&bx, 1_000_000, 3).is_ok());
    }

    #[test]
    fn singular_integral_scaling_law() {
        // doubling every half-width scales the density by 2^7
        let a = singular_integral(&BoxSpec::standard(50.0), SingularIntegralMethod::Slab)
            .unwrap();
        let b = singular_integral(&BoxSpec::standard(100.0), SingularIntegralMethod::Slab)
            .unwrap();
        let ratio = b.midpoint() / a.midpoint();
        assert!(
            (ratio - 128.0).abs() < 128.0 * 5e-3,
            "scaling ratio {ratio} far from 128"
        );
    }

    /// Literal nine-loop enumeration of the congruence class.
    fn lattice_oracle(w: &[i64; 9], m: i64, b0: &VSlice) -> u128 {
        fn admissible(w: i64, m: i64, r: i64) -> Vec<i64> {
            (-w..=w).filter(|x| (x - r) % m == 0).collect()
        }
        let c0 = b0.coords();
        let vals: Vec<Vec<i64>> = (0..9).map(|i| admissible(w[i], m, c0[i])).collect();
        let mut count = 0u128;
        for &b11 in &vals[0] {
            for &b12 in &vals[1] {
                for &b13 in &vals[2] {
                    for &b14 in &vals[3] {
                        for &b22 in &vals[4] {
                            for &b24 in &vals[5] {
                                for &b33 in &vals[6] {
                                    for &b34 in &vals[7] {
                                        for &b44 in &vals[8] {
                                            let q = b11 * b44
                                                + b22 * b33
                                                + 2 * (b12 * b34 + b13 * b24 + b14 * b14);
                                            if q == 0 {
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

    #[test]
    fn lattice_count_matches_nested_loops() {
        let budget = Budget::default();
        // cubes and a skewed box, m = 1 and m = 3 with a valid class
        let cases: Vec<([f64; 9], f64)> = vec![
            ([2.0; 9], 2.0),
            ([3.0; 9], 3.0),
            ([1.0, 4.0, 2.0, 2.0, 4.0, 2.0, 1.0, 1.0, 4.0], 2.0),
        ];
        for (hw, x) in cases {
            let bx = BoxSpec::new(hw, x, 0.49).unwrap();
            let w = bx.int_half_widths();
            let got = lattice_count(&bx, 1, &VSlice::default(), &budget).unwrap();
            let want = lattice_oracle(&w, 1, &VSlice::default());
            assert_eq!(got, want, "m = 1, box {hw:?}");
            let b0 = VSlice {
                b11: 1,
                b44: 3,
                ..VSlice::default()
            };
            let got = lattice_count(&bx, 3, &b0, &budget).unwrap();
            let want = lattice_oracle(&w, 3, &b0);
            assert_eq!(got, want, "m = 3, box {hw:?}");
        }
    }

    #[test]
    fn lattice_direct_equals_ntt_route() {
        // large enough that the pair products exceed the direct-path cap
        let bx = BoxSpec::standard(78.0);
        let t = build_tallies(&bx.int_half_widths(), 1, &VSlice::default());
        let direct = lattice_count_direct(&t).unwrap();
        let ntt = lattice_count_ntt(&t).unwrap();
        assert_eq!(direct, ntt);
        // and with a congruence class mod 15
        let b0 = VSlice {
            b11: 1,
            b44: 15,
            b12: 2,
            ..VSlice::default()
        };
        let t = build_tallies(&bx.int_half_widths(), 15, &b0);
        assert_eq!(
            lattice_count_direct(&t).unwrap(),
            lattice_count_ntt(&t).unwrap()
        );
    }

    #[test]
    fn lattice_count_guards() {
        let budget = Budget::default();
        let b0 = VSlice {
            b11: 1,
            b44: 1,
            ..VSlice::default()
        };
        // m does not divide q(B0) = -1
        assert!(matches!(
            lattice_count(&BoxSpec::standard(3.0), 3, &b0, &budget),
            Err(crate::Error::Domain(_))
        ));
        // oversized box is refused with an estimate
        let big = BoxSpec::standard(3000.0);
        match lattice_count(&big, 1, &VSlice::default(), &budget) {
            Err(crate::Error::Budget(msg)) => assert!(msg.contains("estimate")),
            other => panic!("expected budget refusal, got {other:?}"),
        }
        // even or non-squarefree m
        assert!(lattice_count(&BoxSpec::standard(3.0), 2, &VSlice::default(), &budget).is_err());
        assert!(lattice_count(&BoxSpec::standard(3.0), 9, &VSlice::default(), &budget).is_err());
    }

    #[test]
    fn ntt_convolution_on_random_arrays() {
        // the transform pair against a schoolbook convolution
        let mut rng = rng(5);
        for _ in 0..20 {
            let la = rng.gen_range(1..40usize);
            let lb = rng.gen_range(1..40usize);
            let a: Vec<u32> = (0..la).map(|_| rng.next_u32() % 1000).collect();
            let b: Vec<u32> = (0..lb).map(|_| rng.next_u32() % 1000).collect();
            let want: Vec<u64> = {
                let aw: Vec<u64> = a.iter().map(|&x| x as u64).collect();
                let bw: Vec<u64> = b.iter().map(|&x| x as u64).collect();
                conv_u64(&aw, &bw)
            };
            let n = (la + lb - 1).next_power_of_two().max(2);
            for &(p, g) in &NTT_PRIMES {
                let plan = NttPlan::new(p, g, n);
                let mont = plan.mont;
                let mut fa = vec![0u32; n];
                let mut fb = vec![0u32; n];
                for (i, &v) in a.iter().enumerate() {
                    fa[i] = mont.to_mont(v);
                }
                for (i, &v) in b.iter().enumerate() {
                    fb[i] = mont.to_mont(v);
                }
                plan.forward(&mut fa);
                plan.forward(&mut fb);
                for (x, &y) in fa.iter_mut().zip(fb.iter()) {
                    *x = mont.mul(*x, y);
                }
                plan.inverse_unscaled(&mut fa);
                for (i, &wv) in want.iter().enumerate() {
                    let got = mont.from_mont(mont.mul(fa[i], plan.n_inv)) as u64;
                    assert_eq!(got, wv % p as u64, "prime {p}, index {i}");
                }
            }
        }
    }

    #[test]
    fn garner_roundtrip() {
        let mut rng = rng(9);
        for _ in 0..200 {
            let x = (rng.next_u64() as u128) << 40 ^ rng.next_u64() as u128;
            let res = std::array::from_fn(|i| (x % NTT_PRIMES[i].0 as u128) as u64);
            assert_eq!(garner4(&res), x);
        }
    }

    #[test]
    fn selberg_band_holds_for_small_primes() {
        let budget = Budget::default();
        let rep = selberg_quantities(7, 31, 100.0, &budget).unwrap();
        assert_eq!(rep.entries.len(), 8);
        for e in &rep.entries {
            assert!(e.in_band, "g({}) = {} out of band", e.p, e.g);
            assert!(e.h >= 1.0 / 31.0 && e.h <= 8.0);
        }
        assert!(rep.band_pass_fraction == 1.0);
        // sqrt(100) = 10 admits only m = 1 and m = 7
        let h7 = rep.entries[0].h;
        assert!((rep.h_sum - (1.0 + h7)).abs() < 1e-12);
        // a deeper truncation brings in every prime and the pair products
        let deep = selberg_quantities(7, 31, 1.0e6, &budget).unwrap();
        let singles: f64 = deep.entries.iter().map(|e| e.h).sum();
        let mut pairs = 0.0;
        for (i, a) in deep.entries.iter().enumerate() {
            for b in deep.entries.iter().skip(i + 1) {
                if a.p * b.p < 1000 {
                    pairs += a.h * b.h;
                }
            }
        }
        assert!((deep.h_sum - (1.0 + singles + pairs)).abs() < 1e-9);
        assert!(selberg_quantities(7, 5, 10.0, &budget).is_err());
    }

    #[test]
    fn exp_sum_vs_integral_examples() {
        // zero phase: the sum counts interior integers, the integral the length
        let zero = QuadPhase {
            a2: 0.0,
            a1: 0.0,
            a0: 0.0,
        };
        let check = exp_sum_vs_integral_check(&zero, 0.0, 1000.0).unwrap();
        assert!(check.residual <= 1.0, "residual {}", check.residual);
        // slow quadratic over a long interval
        let l = 1000.0;
        let slow = QuadPhase {
            a2: 1.0 / (8.0 * l),
            a1: 0.0,
            a0: 0.0,
        };
        let check = exp_sum_vs_integral_check(&slow, 0.0, l).unwrap();
        assert!(check.residual <= 10.0, "residual {}", check.residual);
        // steep phase is rejected
        let steep = QuadPhase {
            a2: 1.0,
            a1: 0.0,
            a0: 0.0,
        };
        assert!(exp_sum_vs_integral_check(&steep, 0.0, 10.0).is_err());
    }

    #[test]
    fn exp_sum_vs_integral_random_battery() {
        let mut rng = rng(21);
        for _ in 0..100 {
            let len = rng.gen_range(10.0..2000.0f64);
            let lo = rng.gen_range(-1000.0..1000.0f64);
            let hi = lo + len;
            // pick a1 so the derivative stays within [-1/2, 1/2] on [lo, hi]
            let a2 = rng.gen_range(-0.2..0.2f64) / len;
            let mid = lo + 0.5 * len;
            let a1 = rng.gen_range(-0.2..0.2f64) - 2.0 * a2 * mid;
            let f = QuadPhase {
                a2,
                a1,
                a0: rng.gen_range(-1.0..1.0),
            };
            assert!(f.deriv(lo).abs() <= 0.5 && f.deriv(hi).abs() <= 0.5);
            let check = exp_sum_vs_integral_check(&f, lo, hi).unwrap();
            assert!(
                check.residual <= 10.0,
                "residual {} for f = {f:?} on [{lo}, {hi}]",
                check.residual
            );
        }
    }

    #[test]
    fn zero_locus_classification_smoke() {
        let bx = BoxSpec::standard(2.0);
        let reports = zero_locus_classified(&bx, &[3, 5]).unwrap();
        assert_eq!(reports.len(), 2);
        for r in &reports {
            assert!(r.points > 0);
            assert!(r.reducible <= r.points);
            // disc = 0 alone already captures a healthy share
            assert!(r.fraction() > 0.2, "p = {}: {}", r.p, r.fraction());
        }
        assert!(zero_locus_classified(&bx, &[4]).is_err());
        assert!(zero_locus_classified(&BoxSpec::standard(50.0), &[3]).is_err());
    }

    proptest! {
        #[test]
        fn hyperbolic_sum_is_r_gcd(a in -1000i64..1000, r in 1u64..500) {
            let v = hyperbolic_sum(a, r);
            let g = gcd_u64(a.rem_euclid(r as i64) as u64, r);
            prop_assert_eq!(v, r as u128 * g as u128);
        }

        #[test]
        fn q_form_never_panics_on_moderate_inputs(c in proptest::array::uniform9(-1_000_000i64..1_000_000)) {
            let b = VSlice::from_coords(c);
            let q = q_form(&b).unwrap();
            let q2 = bilinear(&b, &b).unwrap();
            prop_assert_eq!(q2, 2 * q);
        }
    }
}
