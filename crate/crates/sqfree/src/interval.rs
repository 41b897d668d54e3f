//! Directed-rounding intervals over f64. Every arithmetic step widens the
//! result by one ulp on each side, so a chain of operations encloses the true
//! real value whenever the inputs did.

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "inverted interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    /// Enclosure of the rational p/q, q > 0.
    pub fn from_ratio(p: i128, q: i128) -> Self {
        assert!(q > 0);
        let x = p as f64 / q as f64;
        // one division, one ulp of slack each way covers the rounding
        Interval {
            lo: x.next_down(),
            hi: x.next_up(),
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn add(&self, other: &Interval) -> Self {
        Interval {
            lo: (self.lo + other.lo).next_down(),
            hi: (self.hi + other.hi).next_up(),
        }
    }

    pub fn sub(&self, other: &Interval) -> Self {
        Interval {
            lo: (self.lo - other.hi).next_down(),
            hi: (self.hi - other.lo).next_up(),
        }
    }

    /// Product, valid for any sign combination.
    pub fn mul(&self, other: &Interval) -> Self {
        let cands = [
            self.lo * other.lo,
            self.lo * other.hi,
            self.hi * other.lo,
            self.hi * other.hi,
        ];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for c in cands {
            lo = lo.min(c);
            hi = hi.max(c);
        }
        Interval {
            lo: lo.next_down(),
            hi: hi.next_up(),
        }
    }

    pub fn scale(&self, k: f64) -> Self {
        self.mul(&Interval::point(k))
    }

    pub fn recip(&self) -> Self {
        assert!(
            self.lo > 0.0 || self.hi < 0.0,
            "reciprocal of interval containing zero"
        );
        Interval {
            lo: (1.0 / self.hi).next_down(),
            hi: (1.0 / self.lo).next_up(),
        }
    }
}

/// A computed real value with a rigorous enclosure and a note on how it was
/// obtained.
#[derive(Clone, Debug)]
pub struct IntervalValue {
    pub lower: f64,
    pub upper: f64,
    pub description: String,
}

impl IntervalValue {
    pub fn new(iv: Interval, description: impl Into<String>) -> Self {
        IntervalValue {
            lower: iv.lo,
            upper: iv.hi,
            description: description.into(),
        }
    }

    pub fn interval(&self) -> Interval {
        Interval::new(self.lower, self.upper)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{:.12}, {:.12}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_encloses_exact_value() {
        let third = Interval::from_ratio(1, 3);
        assert!(third.lo < 1.0 / 3.0 + 1e-18);
        assert!(third.contains(0.3333333333333333));
        assert!(third.width() < 1e-15);
    }

    #[test]
    fn product_signs() {
        let a = Interval::new(-2.0, 3.0);
        let b = Interval::new(-5.0, 1.0);
        let p = a.mul(&b);
        assert!(p.contains(-15.0) && p.contains(10.0));
        assert!(p.lo <= -15.0 && p.hi >= 10.0);
    }

    #[test]
    fn chained_products_stay_enclosing() {
        // prod (1 - 2/p^2 + 1/p^3) over a few primes, against a high-precision
        // rational computed with i128 arithmetic
        let primes = [5i128, 7, 11, 13];
        let mut iv = Interval::point(1.0);
        let mut num = 1i128;
        let mut den = 1i128;
        for p in primes {
            let f_num = p * p * p - 2 * p + 1;
            let f_den = p * p * p;
            num *= f_num;
            den *= f_den;
            iv = iv.mul(&Interval::from_ratio(f_num, f_den));
        }
        let exact = num as f64 / den as f64;
        assert!(iv.contains(exact));
        assert!(iv.width() < 1e-14);
    }
}
