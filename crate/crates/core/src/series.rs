//! Truncated Laurent series in `t = q^{1/s}` with complex coefficients.
//!
//! A series stores the coefficients of `t^lead, t^{lead+1}, …` and an
//! exclusive precision `prec`: every exponent below `prec` is known (those
//! past the stored coefficients are zero), exponents at or above `prec` are
//! unknown. Polynomials carry the sentinel precision [`EXACT`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_integer::Integer;

use crate::error::{Error, Result};

/// Precision of a series with no truncation.
pub const EXACT: i64 = i64::MAX / 4;

/// Relative magnitude below which a leading coefficient counts as zero.
pub const ZERO_THRESHOLD: f64 = 1e-13;

const C0: Complex64 = Complex64::new(0.0, 0.0);

fn clamp(p: i64) -> i64 {
    p.min(EXACT)
}

#[derive(Clone, PartialEq)]
pub struct LaurentSeries {
    scale: u32,
    lead: i64,
    coeffs: Vec<Complex64>,
    prec: i64,
}

impl LaurentSeries {
    /// Builds a series from coefficients of `t^lead, t^{lead+1}, …`, dropping
    /// anything at or above `prec`.
    pub fn new(scale: u32, lead: i64, coeffs: Vec<Complex64>, prec: i64) -> LaurentSeries {
        assert!(scale >= 1, "scale must be positive");
        let mut s = LaurentSeries { scale, lead, coeffs, prec: clamp(prec) };
        s.normalize();
        s
    }

    pub fn zero(scale: u32, prec: i64) -> LaurentSeries {
        LaurentSeries::new(scale, 0, Vec::new(), prec)
    }

    pub fn constant(c: Complex64, scale: u32) -> LaurentSeries {
        LaurentSeries::new(scale, 0, vec![c], EXACT)
    }

    pub fn one(scale: u32) -> LaurentSeries {
        LaurentSeries::constant(Complex64::new(1.0, 0.0), scale)
    }

    /// `c·t^e`, exact.
    pub fn monomial(c: Complex64, e: i64, scale: u32) -> LaurentSeries {
        LaurentSeries::new(scale, e, vec![c], EXACT)
    }

    /// Accumulates `(exponent, coefficient)` terms below `prec`.
    pub fn from_terms(scale: u32, prec: i64, terms: impl IntoIterator<Item = (i64, Complex64)>) -> LaurentSeries {
        let terms: Vec<(i64, Complex64)> = terms.into_iter().filter(|&(e, _)| e < prec).collect();
        let Some(lo) = terms.iter().map(|t| t.0).min() else {
            return LaurentSeries::zero(scale, prec);
        };
        let hi = terms.iter().map(|t| t.0).max().unwrap();
        let mut coeffs = vec![C0; (hi - lo + 1) as usize];
        for (e, c) in terms {
            coeffs[(e - lo) as usize] += c;
        }
        LaurentSeries::new(scale, lo, coeffs, prec)
    }

    fn normalize(&mut self) {
        let keep = (self.prec - self.lead).clamp(0, self.coeffs.len() as i64) as usize;
        self.coeffs.truncate(keep);
        while self.coeffs.last() == Some(&C0) {
            self.coeffs.pop();
        }
        let skip = self.coeffs.iter().take_while(|c| **c == C0).count();
        if skip > 0 {
            self.coeffs.drain(..skip);
            self.lead += skip as i64;
        }
        if self.coeffs.is_empty() {
            self.lead = 0;
        }
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn lead(&self) -> i64 {
        self.lead
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec >= EXACT
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// True when every known coefficient is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest exponent with a nonzero coefficient, or `prec` for a zero series.
    pub fn valuation(&self) -> i64 {
        if self.coeffs.is_empty() {
            self.prec
        } else {
            self.lead
        }
    }

    /// Coefficient of `t^e`; `e` must be below the precision.
    pub fn coeff(&self, e: i64) -> Complex64 {
        assert!(e < self.prec, "coefficient of t^{e} is beyond the precision {}", self.prec);
        if e < self.lead {
            return C0;
        }
        self.coeffs.get((e - self.lead) as usize).copied().unwrap_or(C0)
    }

    /// Nonzero `(exponent, coefficient)` pairs in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs.iter().enumerate().filter(|(_, c)| **c != C0).map(move |(i, c)| (self.lead + i as i64, *c))
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Lowers the precision to `prec` (never raises it).
    pub fn truncate(&self, prec: i64) -> LaurentSeries {
        LaurentSeries::new(self.scale, self.lead, self.coeffs.clone(), self.prec.min(prec))
    }

    /// Re-expresses the series in `t' = q^{1/new_scale}`; `new_scale` must be a multiple of the scale.
    pub fn rescale(&self, new_scale: u32) -> Result<LaurentSeries> {
        if !new_scale.is_multiple_of(self.scale) {
            return Err(Error::Scale { scale: new_scale, exponent: format!("1/{}", self.scale) });
        }
        let k = (new_scale / self.scale) as i64;
        if k == 1 {
            return Ok(self.clone());
        }
        let prec = if self.is_exact() { EXACT } else { self.prec.saturating_mul(k) };
        Ok(LaurentSeries::from_terms(new_scale, prec, self.terms().map(|(e, c)| (e * k, c))))
    }

    fn aligned(a: &LaurentSeries, b: &LaurentSeries) -> (LaurentSeries, LaurentSeries) {
        let s = a.scale.lcm(&b.scale);
        (a.rescale(s).unwrap(), b.rescale(s).unwrap())
    }

    pub fn scale_by(&self, c: Complex64) -> LaurentSeries {
        let coeffs = self.coeffs.iter().map(|x| x * c).collect();
        LaurentSeries::new(self.scale, self.lead, coeffs, self.prec)
    }

    /// Multiplies by `t^e`.
    pub fn shift(&self, e: i64) -> LaurentSeries {
        let prec = if self.is_exact() { EXACT } else { self.prec + e };
        LaurentSeries::new(self.scale, self.lead + e, self.coeffs.clone(), prec)
    }

    fn add_impl(a: &LaurentSeries, b: &LaurentSeries) -> LaurentSeries {
        if a.scale != b.scale {
            let (a, b) = LaurentSeries::aligned(a, b);
            return LaurentSeries::add_impl(&a, &b);
        }
        let prec = a.prec.min(b.prec);
        LaurentSeries::from_terms(a.scale, prec, a.terms().chain(b.terms()))
    }

    fn mul_impl(a: &LaurentSeries, b: &LaurentSeries) -> LaurentSeries {
        if a.scale != b.scale {
            let (a, b) = LaurentSeries::aligned(a, b);
            return LaurentSeries::mul_impl(&a, &b);
        }
        let bound = |x: &LaurentSeries, y: &LaurentSeries| {
            if x.is_exact() {
                EXACT
            } else {
                x.prec.saturating_add(y.valuation())
            }
        };
        let prec = clamp(bound(a, b).min(bound(b, a)));
        if a.is_zero() || b.is_zero() {
            return LaurentSeries::zero(a.scale, prec);
        }
        let lead = a.lead + b.lead;
        let len = ((prec - lead).max(0) as usize).min(a.coeffs.len() + b.coeffs.len() - 1);
        let mut out = vec![C0; len];
        for (i, x) in a.coeffs.iter().enumerate().take(len) {
            for (j, y) in b.coeffs.iter().enumerate().take(len - i) {
                out[i + j] += x * y;
            }
        }
        LaurentSeries::new(a.scale, lead, out, prec)
    }

    /// Multiplicative inverse.
    ///
    /// Leading coefficients below [`ZERO_THRESHOLD`] times `max(1, max|cₖ|2^{−k})`
    /// are discarded first; the weight keeps large high-order coefficients
    /// from masking a small leading one. Exact series invert only when they
    /// are monomials.
    pub fn inv(&self) -> Result<LaurentSeries> {
        let weighted = self.coeffs.iter().enumerate().map(|(k, c)| c.norm() * 0.5f64.powi(k as i32));
        let thresh = ZERO_THRESHOLD * weighted.fold(1.0, f64::max);
        let skip = self.coeffs.iter().take_while(|c| c.norm() < thresh).count();
        if skip == self.coeffs.len() {
            return Err(Error::ZeroSeries);
        }
        let lead = self.lead + skip as i64;
        let c = &self.coeffs[skip..];
        if self.is_exact() {
            if c.len() == 1 {
                return Ok(LaurentSeries::monomial(c[0].inv(), -lead, self.scale));
            }
            return Err(Error::UnboundedPrecision);
        }
        let prec = self.prec - 2 * lead;
        let n = (self.prec - lead) as usize;
        let b0 = c[0].inv();
        let mut out = Vec::with_capacity(n);
        out.push(b0);
        for k in 1..n {
            let mut acc = C0;
            for j in 1..=k.min(c.len() - 1) {
                acc += c[j] * out[k - j];
            }
            out.push(-acc * b0);
        }
        Ok(LaurentSeries::new(self.scale, -lead, out, prec))
    }

    pub fn div(&self, other: &LaurentSeries) -> Result<LaurentSeries> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, k: u32) -> LaurentSeries {
        let mut acc = LaurentSeries::one(self.scale);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Evaluates the known part at `t`.
    pub fn eval(&self, t: Complex64) -> Complex64 {
        let mut acc = C0;
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc * t.powi(self.lead as i32)
    }

    /// Evaluates the known part at `q`, taking `t = exp(log(q)/s)` on the principal branch.
    pub fn eval_q(&self, q: Complex64) -> Complex64 {
        self.eval((q.ln() / self.scale as f64).exp())
    }
}

impl Add for &LaurentSeries {
    type Output = LaurentSeries;
    fn add(self, o: &LaurentSeries) -> LaurentSeries {
        LaurentSeries::add_impl(self, o)
    }
}

impl Sub for &LaurentSeries {
    type Output = LaurentSeries;
    fn sub(self, o: &LaurentSeries) -> LaurentSeries {
        LaurentSeries::add_impl(self, &-o)
    }
}

impl Mul for &LaurentSeries {
    type Output = LaurentSeries;
    fn mul(self, o: &LaurentSeries) -> LaurentSeries {
        LaurentSeries::mul_impl(self, o)
    }
}

impl Neg for &LaurentSeries {
    type Output = LaurentSeries;
    fn neg(self) -> LaurentSeries {
        self.scale_by(Complex64::new(-1.0, 0.0))
    }
}

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.scale;
        for (i, (e, c)) in self.terms().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:.6}{:+.6}i)q^({e}/{s})", c.re, c.im)?;
        }
        if self.is_exact() {
            if self.is_zero() {
                write!(f, "0")?;
            }
            Ok(())
        } else {
            write!(f, " + O(q^({}/{s}))", self.prec)
        }
    }
}
