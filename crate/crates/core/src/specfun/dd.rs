//! Minimal double-double arithmetic (Dekker/Bailey style) used to evaluate
//! the alternating Bessel series in its cancellation regime. The ascending
//! series at z around the series/asymptotic switch point sums terms about
//! ten orders of magnitude larger than the result; plain f64 term rounding
//! would cap the absolute accuracy near 1e-7 there, while the contract asks
//! for 1e-11. Carrying the terms in ~31 digits removes the limitation.

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    Dd { hi: s, lo: err }
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> Dd {
    // requires |a| >= |b|
    let s = a + b;
    let err = b - (s - a);
    Dd { hi: s, lo: err }
}

#[inline]
fn two_prod(a: f64, b: f64) -> Dd {
    let p = a * b;
    let err = a.mul_add(b, -p);
    Dd { hi: p, lo: err }
}

impl Dd {
    #[inline]
    pub fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact sum of two doubles.
    #[inline]
    pub fn from_sum(a: f64, b: f64) -> Self {
        two_sum(a, b)
    }

    /// Exact product of two doubles.
    #[inline]
    pub fn from_prod(a: f64, b: f64) -> Self {
        two_prod(a, b)
    }

    #[inline]
    pub fn add(self, other: Dd) -> Dd {
        let s = two_sum(self.hi, other.hi);
        let e = self.lo + other.lo + s.lo;
        quick_two_sum(s.hi, e)
    }

    #[inline]
    pub fn mul(self, other: Dd) -> Dd {
        let p = two_prod(self.hi, other.hi);
        let e = self.hi * other.lo + self.lo * other.hi + p.lo;
        quick_two_sum(p.hi, e)
    }

    #[inline]
    pub fn div(self, other: Dd) -> Dd {
        let q1 = self.hi / other.hi;
        // residual r = self - q1*other, evaluated in double-double
        let r = self.add(other.mul(Dd::from(-q1)));
        let q2 = r.hi / other.hi;
        quick_two_sum(q1, q2)
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.hi + self.lo
    }
}
