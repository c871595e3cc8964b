//! Truncated Taylor (jet) arithmetic and the Gevrey bump.
//!
//! A jet stores `c_n = g^(n)(t0) / n!` up to a fixed order. The bump jet is
//! composed from exp/log/reciprocal jets of the two boundary exponentials,
//! and `leibniz_derivatives` forms the derivative stack of a product.

use crate::error::{Error, Result};

/// Truncated Taylor expansion of a scalar function at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    center: f64,
    coeffs: Vec<f64>,
}

impl Jet {
    /// Jet with the given Taylor coefficients `c_0..c_N`.
    pub fn from_coeffs(center: f64, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Domain("a jet needs at least the constant term".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("jet coefficients".into()));
        }
        Ok(Jet { center, coeffs })
    }

    /// Constant-c jet of the given order.
    pub fn constant(center: f64, c: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = c;
        Jet { center, coeffs }
    }

    /// Jet of the identity `t` at `center`.
    pub fn variable(center: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = center;
        if order >= 1 {
            coeffs[1] = 1.0;
        }
        Jet { center, coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// n-th derivative at the center, `n! * c_n`.
    pub fn derivative(&self, n: usize) -> f64 {
        let mut fact = 1.0;
        for k in 2..=n {
            fact *= k as f64;
        }
        fact * self.coeffs[n]
    }

    /// All derivatives `g^(0..N)` at the center.
    pub fn derivatives(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        let mut fact = 1.0;
        for (n, c) in self.coeffs.iter().enumerate() {
            if n >= 2 {
                fact *= n as f64;
            }
            out.push(fact * c);
        }
        out
    }

    fn check_match(&self, other: &Jet) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Jet) -> Result<Jet> {
        self.check_match(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Jet { center: self.center, coeffs })
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, other: &Jet) -> Result<Jet> {
        self.check_match(other)?;
        let n = self.coeffs.len();
        let mut coeffs = vec![0.0; n];
        for i in 0..n {
            let a = self.coeffs[i];
            if a == 0.0 {
                continue;
            }
            for j in 0..n - i {
                coeffs[i + j] += a * other.coeffs[j];
            }
        }
        Ok(Jet { center: self.center, coeffs })
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet {
            center: self.center,
            coeffs: self.coeffs.iter().map(|c| s * c).collect(),
        }
    }

    /// exp(g), from (e^g)' = g' e^g coefficient-wise.
    pub fn exp(&self) -> Jet {
        let n = self.coeffs.len();
        let mut out = vec![0.0; n];
        out[0] = self.coeffs[0].exp();
        for k in 1..n {
            let mut acc = 0.0;
            for i in 1..=k {
                acc += i as f64 * self.coeffs[i] * out[k - i];
            }
            out[k] = acc / k as f64;
        }
        Jet { center: self.center, coeffs: out }
    }

    /// ln(g); requires a positive constant term.
    pub fn ln(&self) -> Result<Jet> {
        if self.coeffs[0] <= 0.0 {
            return Err(Error::Domain(format!(
                "log of a jet with nonpositive constant term {}",
                self.coeffs[0]
            )));
        }
        let n = self.coeffs.len();
        let g0 = self.coeffs[0];
        let mut out = vec![0.0; n];
        out[0] = g0.ln();
        for k in 1..n {
            let mut acc = k as f64 * self.coeffs[k];
            for i in 1..k {
                acc -= i as f64 * out[i] * self.coeffs[k - i];
            }
            out[k] = acc / (k as f64 * g0);
        }
        Ok(Jet { center: self.center, coeffs: out })
    }

    /// 1/g; requires a nonzero constant term.
    pub fn reciprocal(&self) -> Result<Jet> {
        if self.coeffs[0] == 0.0 {
            return Err(Error::SingularJet);
        }
        let n = self.coeffs.len();
        let g0 = self.coeffs[0];
        let mut out = vec![0.0; n];
        out[0] = 1.0 / g0;
        for k in 1..n {
            let mut acc = 0.0;
            for i in 1..=k {
                acc += self.coeffs[i] * out[k - i];
            }
            out[k] = -acc / g0;
        }
        Jet::from_coeffs(self.center, out)
    }

    /// Jet of `t -> g(a t + b)` given `self` as the jet of `g` at
    /// `a t0 + b`: rescales coefficient n by `a^n` and re-centers at `t0`.
    pub fn affine_compose(&self, a: f64, t0: f64) -> Jet {
        let mut pow = 1.0;
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let v = c * pow;
                pow *= a;
                v
            })
            .collect();
        Jet { center: t0, coeffs }
    }
}

/// Gevrey bump: 1 on t <= 0, 0 on t >= 1, and on (0,1)
///
/// ```text
/// phi_s(t) = e1 / (e1 + e2),   e1 = exp(-(1-t)^(-1/(s-1))),
///                              e2 = exp(-t^(-1/(s-1))).
/// ```
///
/// Evaluated as `1 / (1 + exp(D))` with `D = (1-t)^(-b) - t^(-b)`,
/// `b = 1/(s-1)`, which is the same function without the 0/0 that the
/// two-exponential form hits in floating point once both numerator and
/// denominator underflow.
pub fn bump_jet(s: f64, t: f64, order: usize) -> Result<Jet> {
    if !(1.0 < s && s < 2.0) {
        return Err(Error::Domain(format!("Gevrey order must lie in (1,2), got {s}")));
    }
    // outside (0,1) the bump is identically 1 / identically 0, all
    // derivatives zero; just inside, the one-sided exponentials are below
    // 1e-300 and the constant jets are the correctly rounded values
    if t <= 1e-3 {
        return Ok(Jet::constant(t, 1.0, order));
    }
    if t >= 1.0 - 1e-3 {
        return Ok(Jet::constant(t, 0.0, order));
    }
    let b = 1.0 / (s - 1.0);
    let ln_a = -b * (1.0 - t).ln(); // ln (1-t)^(-b)
    let ln_b = -b * t.ln(); // ln t^(-b)
    if ln_a.max(ln_b) > 700.0 {
        // one of the exponentials dwarfs everything representable; the bump
        // is flat 0 or 1 here to double precision (s very close to 1)
        let c = match ln_a.partial_cmp(&ln_b) {
            Some(std::cmp::Ordering::Less) => 1.0,
            Some(std::cmp::Ordering::Greater) => 0.0,
            _ => 0.5,
        };
        return Ok(Jet::constant(t, c, order));
    }
    let tj = Jet::variable(t, order);
    let uj = Jet::constant(t, 1.0, order).add(&tj.scale(-1.0))?; // 1 - t
    let a_pow = tj.ln()?.scale(-b).exp(); // t^(-b)
    let u_pow = uj.ln()?.scale(-b).exp(); // (1-t)^(-b)
    let d = u_pow.add(&a_pow.scale(-1.0))?;
    let d0 = d.value();
    if d0 > 700.0 {
        return Ok(Jet::constant(t, 0.0, order));
    }
    // exponentiate whichever sign keeps the leading value <= 1, so the
    // growing derivative coefficients are never amplified by a huge e^{D}
    let one = Jet::constant(t, 1.0, order);
    let phi = if d0 >= 0.0 {
        // phi = e^{-D} / (1 + e^{-D})
        let em = d.scale(-1.0).exp();
        em.mul(&one.add(&em)?.reciprocal()?)?
    } else {
        // phi = 1 / (1 + e^{D})
        one.add(&d.exp())?.reciprocal()?
    };
    if phi.coeffs().iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("bump jet coefficients".into()));
    }
    Ok(phi)
}

/// Derivative stack of the product `y = phi * Y`:
/// `y^(n) = sum_i C(n,i) phi^(i) Y^(n-i)`.
///
/// `phi` is a jet whose chain-rule rescaling (if any) has already been
/// applied; `y_of` are the derivatives `Y^(0..N)` at the same point.
/// Binomials come from the exact multiplicative recurrence, which is
/// rounding-free in f64 through n = 56.
pub fn leibniz_derivatives(phi: &Jet, y_derivs: &[f64]) -> Result<Vec<f64>> {
    if phi.order() + 1 != y_derivs.len() {
        return Err(Error::OrderMismatch {
            left: phi.order() + 1,
            right: y_derivs.len(),
        });
    }
    let phi_derivs = phi.derivatives();
    let n_max = y_derivs.len();
    let mut out = Vec::with_capacity(n_max);
    for n in 0..n_max {
        let mut binom = 1.0;
        let mut acc = 0.0;
        let mut comp = 0.0; // Neumaier compensation
        for i in 0..=n {
            let term = binom * phi_derivs[i] * y_derivs[n - i];
            let t = acc + term;
            comp += if acc.abs() >= term.abs() {
                (acc - t) + term
            } else {
                (term - t) + acc
            };
            acc = t;
            binom = binom * (n - i) as f64 / (i + 1) as f64;
        }
        out.push(acc + comp);
    }
    Ok(out)
}
