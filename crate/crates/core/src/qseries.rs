//! q-expansions on the Tate curve: `s_k`, `a₄`, `a₆`, the coordinates
//! `X(u,q)` and `Y(u,q)`, the normalized theta function, cross ratios and the
//! sextic invariant `z ↦ (z²−z+1)³/(z²(z−1)²)`.
//!
//! All series are in `t = q^{1/s}`. A quadruple of common order `n` is
//! expanded with `s = 2n`, which makes every exponent integral.

use num_complex::Complex64;
use serde::Serialize;

use crate::classifier::ConstantTag;
use crate::cyclo::{Cyclo, CycloSeries};
use crate::error::{Error, Result};
use crate::rat::Rat;
use crate::series::LaurentSeries;
use crate::torsion::{Quad, TorsionCoord};

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);

/// Default truncation, in powers of `q`.
pub const DEFAULT_TERMS: i64 = 8;
/// Coefficients below this count as zero in constancy checks.
pub const CONSTANCY_TOL: f64 = 1e-9;

/// `exp(2πiθ)`, exact when `4θ` is an integer.
pub fn zeta(theta: Rat) -> Complex64 {
    let t = theta.mod1();
    match (t.num() * 4 % t.den() == 0).then(|| t.num() * 4 / t.den()) {
        Some(0) => C1,
        Some(1) => Complex64::new(0.0, 1.0),
        Some(2) => Complex64::new(-1.0, 0.0),
        Some(3) => Complex64::new(0.0, -1.0),
        _ => Complex64::from_polar(1.0, std::f64::consts::TAU * t.to_f64()),
    }
}

/// `u = exp(2πiθ) q^r` for rational `θ` and `r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UPoint {
    pub theta: Rat,
    pub r: Rat,
}

impl UPoint {
    pub fn new(theta: Rat, r: Rat) -> UPoint {
        UPoint { theta, r }
    }

    pub fn from_coord(p: &TorsionCoord) -> UPoint {
        UPoint { theta: p.theta(), r: p.r() }
    }

    pub fn mul(&self, o: &UPoint) -> UPoint {
        UPoint { theta: self.theta + o.theta, r: self.r + o.r }
    }

    pub fn inv(&self) -> UPoint {
        UPoint { theta: -self.theta, r: -self.r }
    }

    /// Whether `u ∈ q^Z`.
    pub fn in_q_lattice(&self) -> bool {
        self.theta.is_integer() && self.r.is_integer()
    }

    pub fn zeta(&self) -> Complex64 {
        zeta(self.theta)
    }

    /// `ζ^m`, computed from the exact angle `mθ`.
    fn zeta_pow(&self, m: i64) -> Complex64 {
        zeta(self.theta.checked_mul_int(m).expect("angle overflow"))
    }
}

/// `x·s` as an integer exponent.
fn exponent(x: Rat, scale: u32) -> Result<i64> {
    let v = x.checked_mul_int(scale as i64)?;
    if v.is_integer() {
        Ok(v.num())
    } else {
        Err(Error::Scale { scale, exponent: x.to_string() })
    }
}

/// Exclusive precision that keeps every power of `q` up to `q^d`.
pub fn prec_for(d: i64, scale: u32) -> i64 {
    d * scale as i64 + 1
}

fn divisor_power_sums(k: u32, up_to: i64) -> Vec<i128> {
    let mut out = vec![0i128; up_to.max(0) as usize + 1];
    for d in 1..=up_to {
        let p = (d as i128).pow(k);
        let mut m = d;
        while m <= up_to {
            out[m as usize] += p;
            m += d;
        }
    }
    out
}

fn integral_q_series(coeffs: Vec<i128>, scale: u32, prec: i64) -> LaurentSeries {
    let terms = coeffs.into_iter().enumerate().map(|(m, c)| (m as i64 * scale as i64, Complex64::new(c as f64, 0.0)));
    LaurentSeries::from_terms(scale, prec, terms)
}

/// `s_k(q) = Σ_{n≥1} n^k q^n/(1−q^n)`; the coefficient of `q^m` is `σ_k(m)`.
pub fn s_k_series(k: u32, scale: u32, prec: i64) -> LaurentSeries {
    let top = (prec - 1).div_euclid(scale as i64);
    integral_q_series(divisor_power_sums(k, top), scale, prec)
}

pub fn a4_series(scale: u32, prec: i64) -> LaurentSeries {
    let top = (prec - 1).div_euclid(scale as i64);
    let c = divisor_power_sums(3, top).into_iter().map(|x| -5 * x).collect();
    integral_q_series(c, scale, prec)
}

pub fn a6_series(scale: u32, prec: i64) -> LaurentSeries {
    let top = (prec - 1).div_euclid(scale as i64);
    let s3 = divisor_power_sums(3, top);
    let s5 = divisor_power_sums(5, top);
    let c = s3
        .iter()
        .zip(&s5)
        .map(|(a, b)| {
            let num = 5 * a + 7 * b;
            assert_eq!(num % 12, 0, "a6 coefficient is not integral");
            -num / 12
        })
        .collect();
    integral_q_series(c, scale, prec)
}

/// Non-constant terms of `X` as `(exponent, power of ζ, integer coefficient)`
/// for `u = ζ t^rr`, `0 ≤ rr < s`.
fn x_terms(rr: i64, s: i64, prec: i64) -> Vec<(i64, i64, i64)> {
    let mut terms = Vec::new();
    if rr != 0 {
        terms.extend((1..).take_while(|m| m * rr < prec).map(|m| (m * rr, m, m)));
    }
    for n in (1..).take_while(|n| n * s - rr < prec) {
        let (up, down, flat) = (n * s + rr, n * s - rr, n * s);
        for m in (1..).take_while(|m| m * down < prec) {
            terms.push((m * down, -m, m));
            if m * up < prec {
                terms.push((m * up, m, m));
            }
            if m * flat < prec {
                terms.push((m * flat, 0, -2 * m));
            }
        }
    }
    terms
}

/// Non-constant terms of `Y − s₁`, laid out like [`x_terms`].
fn y_terms(rr: i64, s: i64, prec: i64) -> Vec<(i64, i64, i64)> {
    let tri = |m: i64| m * (m - 1) / 2;
    let mut terms = Vec::new();
    if rr != 0 {
        terms.extend((2..).take_while(|m| m * rr < prec).map(|m| (m * rr, m, tri(m))));
    }
    for n in (1..).take_while(|n| n * s - rr < prec) {
        let (up, down) = (n * s + rr, n * s - rr);
        for m in (1..).take_while(|m| m * down < prec) {
            terms.push((m * down, -m, -tri(m + 1)));
            if m >= 2 && m * up < prec {
                terms.push((m * up, m, tri(m)));
            }
        }
    }
    terms
}

fn complex_terms(u: &UPoint, terms: Vec<(i64, i64, i64)>) -> impl Iterator<Item = (i64, Complex64)> + '_ {
    terms.into_iter().map(|(e, p, c)| (e, u.zeta_pow(p) * c as f64))
}

/// `X(u,q)` expanded to exclusive precision `prec` in `t = q^{1/scale}`.
///
/// `u` is reduced modulo `q^Z` first.
pub fn x_series(u: &UPoint, scale: u32, prec: i64) -> Result<LaurentSeries> {
    if u.in_q_lattice() {
        return Err(Error::IdentityPoint);
    }
    let rr = exponent(u.r.mod1(), scale)?;
    let mut terms: Vec<(i64, Complex64)> = complex_terms(u, x_terms(rr, scale as i64, prec)).collect();
    if rr == 0 {
        let z = u.zeta();
        terms.push((0, z / ((C1 - z) * (C1 - z))));
    }
    Ok(LaurentSeries::from_terms(scale, prec, terms))
}

/// `Y(u,q)` expanded like [`x_series`].
pub fn y_series(u: &UPoint, scale: u32, prec: i64) -> Result<LaurentSeries> {
    if u.in_q_lattice() {
        return Err(Error::IdentityPoint);
    }
    let rr = exponent(u.r.mod1(), scale)?;
    let mut terms: Vec<(i64, Complex64)> = complex_terms(u, y_terms(rr, scale as i64, prec)).collect();
    if rr == 0 {
        let z = u.zeta();
        terms.push((0, z * z / ((C1 - z) * (C1 - z) * (C1 - z))));
    }
    let y = LaurentSeries::from_terms(scale, prec, terms);
    Ok(&y + &s_k_series(1, scale, prec))
}

/// `Y² + XY − X³ − a₄X − a₆` at `u`; vanishes when `(X, Y)` lies on the Tate curve.
pub fn tate_point_residual(u: &UPoint, scale: u32, prec: i64) -> Result<LaurentSeries> {
    let x = x_series(u, scale, prec)?;
    let y = y_series(u, scale, prec)?;
    let a4 = a4_series(scale, prec);
    let a6 = a6_series(scale, prec);
    let lhs = &(&y * &y) + &(&x * &y);
    let rhs = &(&(&x * &x) * &x) + &(&(&a4 * &x) + &a6);
    Ok(&lhs - &rhs)
}

/// [`tate_point_residual`] computed exactly in `Z[ζ_N]`, `N` the denominator
/// of the angle of `u`.
///
/// For `u` a root of unity the coordinates are rescaled to
/// `X' = (1−ζ)²X`, `Y' = (1−ζ)³Y`, which have integral coefficients; the
/// residual is then multiplied by `(1−ζ)⁶ ≠ 0`.
pub fn tate_residual_exact(u: &UPoint, scale: u32, prec: i64) -> Result<CycloSeries> {
    Ok(ExactTate::new(u, scale, prec)?.residual())
}

/// Rescaled coordinates `X'`, `Y'`, the rescaling unit `w` and `a₄`, `a₆`.
struct ExactTate {
    x: CycloSeries,
    y: CycloSeries,
    w: Cyclo,
    a4: CycloSeries,
    a6: CycloSeries,
}

impl ExactTate {
    fn new(u: &UPoint, scale: u32, prec: i64) -> Result<ExactTate> {
        if u.in_q_lattice() {
            return Err(Error::IdentityPoint);
        }
        let theta = u.theta.mod1();
        let n = theta.den() as usize;
        let a = theta.num();
        let len = prec.max(1) as usize;
        let rr = exponent(u.r.mod1(), scale)?;
        let s = scale as i64;
        let root = |p: i64, c: i64| Cyclo::root(n, a * p, c as i128);
        let series = |terms: Vec<(i64, i64, i64)>| {
            CycloSeries::from_terms(n, len, terms.into_iter().map(|(e, p, c)| (e, root(p, c))))
        };
        let integral = |c: Vec<i128>| {
            CycloSeries::from_terms(n, len, c.into_iter().enumerate().map(|(m, v)| (m as i64 * s, Cyclo::int(n, v))))
        };
        let top = (prec - 1).div_euclid(s);
        let s3 = divisor_power_sums(3, top);
        let a4 = integral(s3.iter().map(|x| -5 * x).collect());
        let a6 = integral(s3.iter().zip(divisor_power_sums(5, top)).map(|(a, b)| -(5 * a + 7 * b) / 12).collect());
        let mut x = series(x_terms(rr, s, prec));
        let mut y = &series(y_terms(rr, s, prec)) + &integral(divisor_power_sums(1, top));
        let one = Cyclo::int(n, 1);
        let w = if rr == 0 { &one - &root(1, 1) } else { one };
        if rr == 0 {
            let w2 = &w * &w;
            x = x.scale_by(&w2);
            x.coeffs[0] = &x.coeffs[0] + &root(1, 1);
            y = y.scale_by(&(&w2 * &w));
            y.coeffs[0] = &y.coeffs[0] + &root(2, 1);
        }
        Ok(ExactTate { x, y, w, a4, a6 })
    }

    /// `Y'² + wX'Y' − X'³ − w⁴a₄X' − w⁶a₆`.
    fn residual(&self) -> CycloSeries {
        let (x, y, w) = (&self.x, &self.y, &self.w);
        let w2 = w * w;
        let w4 = &w2 * &w2;
        let w6 = &w4 * &w2;
        let lhs = &(y * y) + &(x * y).scale_by(w);
        let rhs = &(&(x * x) * x) + &(&(&self.a4 * x).scale_by(&w4) + &self.a6.scale_by(&w6));
        &lhs - &rhs
    }
}

/// Multiplies a dense power series in place by `1 − c t^e`, `e > 0`.
fn mul_binomial(a: &mut [Complex64], c: Complex64, e: usize) {
    for k in (e..a.len()).rev() {
        let v = a[k - e];
        a[k] -= c * v;
    }
}

/// Divides a dense power series in place by `1 − t^e`, `e > 0`.
fn div_geometric(a: &mut [Complex64], e: usize) {
    for k in e..a.len() {
        let v = a[k - e];
        a[k] += v;
    }
}

/// `Θ(u,q) = (1−u) ∏_{n≥1} (1−qⁿu)(1−qⁿu⁻¹)/(1−qⁿ)²` for any rational lift of `u`.
///
/// Factors whose exponent is not positive are kept as exact Laurent
/// polynomials; the rest is expanded far enough that the final precision is
/// at least `prec`.
pub fn theta_series(u: &UPoint, scale: u32, prec: i64) -> Result<LaurentSeries> {
    if u.in_q_lattice() {
        return Err(Error::IdentityPoint);
    }
    let s = scale as i64;
    let rr = exponent(u.r, scale)?;
    // (coefficient, exponent) of each factor 1 − c t^e
    let mut factors: Vec<(Complex64, i64)> = vec![(u.zeta(), rr)];
    let pair = |n: i64| [(u.zeta(), n * s + rr), (u.zeta_pow(-1), n * s - rr)];
    // only the first few factors can have non-positive exponent
    let first_positive = rr.abs() / s + 1;
    factors.extend((1..first_positive).flat_map(pair));
    let neg_total: i64 = factors.iter().filter(|f| f.1 < 0).map(|f| -f.1).sum();
    let big = prec + neg_total;
    factors.extend((first_positive..).map_while(|n| (n * s - rr.abs() < big).then(|| pair(n))).flatten());
    let mut dense = vec![C0; big.max(1) as usize];
    dense[0] = C1;
    let mut exact = LaurentSeries::one(scale);
    for &(c, e) in &factors {
        if e > 0 {
            if e < big {
                mul_binomial(&mut dense, c, e as usize);
            }
        } else {
            let f = LaurentSeries::from_terms(scale, crate::series::EXACT, [(0, C1), (e, -c)]);
            exact = &exact * &f;
        }
    }
    for n in (1..).take_while(|n| n * s < big) {
        div_geometric(&mut dense, (n * s) as usize);
        div_geometric(&mut dense, (n * s) as usize);
    }
    let regular = LaurentSeries::new(scale, 0, dense, big);
    let out = &regular * &exact;
    if out.is_zero() {
        return Err(Error::IdentityPoint);
    }
    Ok(out)
}

/// Largest coefficient of `X(u₁) − X(u₂) + u₂Θ(u₁u₂)Θ(u₁u₂⁻¹)/(Θ(u₁)²Θ(u₂)²)`,
/// together with the precision it was checked to.
pub fn x_diff_identity_residual(u1: &UPoint, u2: &UPoint, scale: u32, prec: i64) -> Result<(f64, i64)> {
    let margin = 4 * scale as i64;
    let p = prec + margin;
    let lhs = &x_series(u1, scale, p)? - &x_series(u2, scale, p)?;
    let quotient = theta_quotient(&[u1.mul(u2), u1.mul(&u2.inv())], &[*u1, *u1, *u2, *u2], scale, p)?;
    let u2s = LaurentSeries::monomial(u2.zeta(), exponent(u2.r, scale)?, scale);
    let rhs = -&(&u2s * &quotient);
    let res = (&lhs - &rhs).truncate(prec);
    Ok((res.max_abs(), res.prec()))
}

/// A coordinate on `P¹`: a series, or the point at infinity.
#[derive(Clone, Debug, PartialEq)]
pub enum XValue {
    Finite(LaurentSeries),
    Infinity,
}

/// `X(u,q)`, or infinity at the origin of the curve.
pub fn x_value_series(p: &TorsionCoord, scale: u32, prec: i64) -> Result<XValue> {
    if p.is_identity() {
        Ok(XValue::Infinity)
    } else {
        Ok(XValue::Finite(x_series(&UPoint::from_coord(p), scale, prec)?))
    }
}

/// `(z₁−z₂)(z₃−z₄) / ((z₁−z₄)(z₃−z₂))`; a point at infinity drops the two
/// factors it occurs in.
pub fn cross_ratio_series(z: [&XValue; 4]) -> Result<LaurentSeries> {
    let infinite = z.iter().filter(|v| matches!(v, XValue::Infinity)).count();
    if infinite > 1 {
        return Err(Error::Degenerate("more than one point at infinity".into()));
    }
    let scale = z
        .iter()
        .find_map(|v| match v {
            XValue::Finite(s) => Some(s.scale()),
            XValue::Infinity => None,
        })
        .unwrap();
    let one = LaurentSeries::one(scale);
    // difference factor, or 1 if either side is infinite
    let diff = |i: usize, j: usize| match (z[i], z[j]) {
        (XValue::Finite(a), XValue::Finite(b)) => a - b,
        _ => one.clone(),
    };
    let num = &diff(0, 1) * &diff(2, 3);
    let den = &diff(0, 3) * &diff(2, 1);
    num.div(&den).map_err(|e| match e {
        Error::ZeroSeries => Error::Degenerate("two of the points coincide".into()),
        e => e,
    })
}

/// `(z²−z+1)³ / (z²(z−1)²)`.
pub fn j6_series(z: &LaurentSeries) -> Result<LaurentSeries> {
    let one = LaurentSeries::one(z.scale());
    let zm1 = z - &one;
    let num = (&(&(z * z) - z) + &one).pow(3);
    let den = &(z * z) * &(&zm1 * &zm1);
    num.div(&den).map_err(|e| match e {
        Error::ZeroSeries => Error::Degenerate("cross ratio is 0, 1 or ∞".into()),
        e => e,
    })
}

pub fn j6_value(z: Complex64) -> Result<Complex64> {
    let den = z * z * (z - C1) * (z - C1);
    if den.norm() < 1e-300 || !z.is_finite() {
        return Err(Error::Degenerate(format!("j6 is infinite at {z}")));
    }
    let w = z * z - z + C1;
    Ok(w * w * w / den)
}

/// Cross ratio of the `X`-coordinates of the points of `s` in sorted order,
/// computed directly from the four `X` series. Every power of `q` up to
/// `q^d` is kept.
///
/// Dividing by `(X₁−X₄)(X₃−X₂)` amplifies rounding error by the growth of
/// the reciprocal's coefficients; [`cross_ratio_of_quad`] avoids this.
pub fn x_cross_ratio(s: &Quad, d: i64) -> Result<LaurentSeries> {
    let scale = 2 * s.common_order() as u32;
    // differences and the division by the denominator lose at most 2 powers of q
    let work = prec_for(d + 2, scale);
    let xs = s.points().iter().map(|p| x_value_series(p, scale, work)).collect::<Result<Vec<_>>>()?;
    let cr = cross_ratio_series([&xs[0], &xs[1], &xs[2], &xs[3]])?;
    Ok(cr.truncate(prec_for(d, scale)))
}

/// `K·t^V·exp(L)` with `L` a power series without constant term.
struct LogForm {
    constant: Complex64,
    valuation: i64,
    log: Vec<Complex64>,
}

impl LogForm {
    fn new(len: usize) -> LogForm {
        LogForm { constant: C1, valuation: 0, log: vec![C0; len] }
    }

    /// Multiplies by `(1 − c t^e)^sign`.
    fn binomial(&mut self, c: Complex64, e: i64, sign: f64) -> Result<()> {
        let (c, e) = match e.cmp(&0) {
            std::cmp::Ordering::Equal => {
                let k = C1 - c;
                if k.norm() < 1e-13 {
                    return Err(Error::IdentityPoint);
                }
                self.constant *= if sign > 0.0 { k } else { k.inv() };
                return Ok(());
            }
            std::cmp::Ordering::Less => {
                // 1 − c t^e = −c t^e (1 − c⁻¹ t^{−e})
                self.constant *= if sign > 0.0 { -c } else { -c.inv() };
                self.valuation += e * sign as i64;
                (c.inv(), -e)
            }
            std::cmp::Ordering::Greater => (c, e),
        };
        let mut ck = c;
        let len = self.log.len() as i64;
        for k in (1..).take_while(|k| k * e < len) {
            self.log[(k * e) as usize] -= ck * (sign / k as f64);
            ck *= c;
        }
        Ok(())
    }

    /// Multiplies by `((1−w)∏_{n≥1}(1−qⁿw)(1−qⁿw⁻¹))^sign`.
    fn theta_core(&mut self, w: &UPoint, scale: u32, sign: f64) -> Result<()> {
        if w.in_q_lattice() {
            return Err(Error::Degenerate(format!("theta argument {}·q^{} is a power of q", w.theta, w.r)));
        }
        let s = scale as i64;
        let e = exponent(w.r, scale)?;
        let len = self.log.len() as i64;
        let (z, zi) = (w.zeta(), w.zeta_pow(-1));
        self.binomial(z, e, sign)?;
        for n in (1..).take_while(|n| n * s - e.abs() < len) {
            self.binomial(z, n * s + e, sign)?;
            self.binomial(zi, n * s - e, sign)?;
        }
        Ok(())
    }

    fn into_series(self, scale: u32) -> LaurentSeries {
        let l = &self.log;
        let mut out = vec![C0; l.len()];
        out[0] = C1;
        for n in 1..l.len() {
            let acc: Complex64 = (1..=n).map(|k| l[k] * out[n - k] * k as f64).sum();
            out[n] = acc / n as f64;
        }
        let len = out.len() as i64;
        LaurentSeries::new(scale, self.valuation, out, self.valuation + len).scale_by(self.constant)
    }
}

/// `∏Θ(num) / ∏Θ(den)` as a series, exact relative precision `rel` past its
/// leading term.
///
/// The factors are combined through their logarithms, so no reciprocal
/// series is ever formed.
pub fn theta_quotient_series(num: &[UPoint], den: &[UPoint], scale: u32, rel: i64) -> Result<LaurentSeries> {
    let mut f = LogForm::new(rel.max(1) as usize);
    for w in num {
        f.theta_core(w, scale, 1.0)?;
    }
    for w in den {
        f.theta_core(w, scale, -1.0)?;
    }
    // each Θ carries ∏(1−qⁿ)⁻²
    let excess = 2.0 * (den.len() as f64 - num.len() as f64);
    if excess != 0.0 {
        let s = scale as i64;
        for n in (1..).take_while(|n| n * s < rel) {
            f.binomial(C1, n * s, excess)?;
        }
    }
    Ok(f.into_series(scale))
}

/// [`theta_quotient_series`] up to exclusive precision `prec`.
pub fn theta_quotient(num: &[UPoint], den: &[UPoint], scale: u32, prec: i64) -> Result<LaurentSeries> {
    let probe = theta_quotient_series(num, den, scale, 1)?;
    Ok(theta_quotient_series(num, den, scale, prec - probe.lead())?.truncate(prec))
}

/// `Θ(u₁u₂)Θ(u₁u₂⁻¹)Θ(u₃u₄)Θ(u₃u₄⁻¹) / (Θ(u₁u₄)Θ(u₁u₄⁻¹)Θ(u₃u₂)Θ(u₃u₂⁻¹))`
/// up to exclusive precision `prec`.
pub fn theta_ratio_series(u: [UPoint; 4], scale: u32, prec: i64) -> Result<LaurentSeries> {
    let args = |a: usize, b: usize| [u[a].mul(&u[b]), u[a].mul(&u[b].inv())];
    let num = [args(0, 1), args(2, 3)].concat();
    let den = [args(0, 3), args(2, 1)].concat();
    theta_quotient(&num, &den, scale, prec)
}

/// Cross ratio of the `X`-coordinates of the points of `s` in sorted order,
/// up to `q^d`, evaluated through the theta-product form of `X(u)−X(v)`.
pub fn cross_ratio_of_quad(s: &Quad, d: i64) -> Result<LaurentSeries> {
    let scale = 2 * s.common_order() as u32;
    let u = s.points().map(|p| UPoint::from_coord(&p));
    theta_ratio_series(u, scale, prec_for(d, scale))
}

/// `μ_S`: the sextic invariant of the cross ratio, up to `q^d`.
pub fn mu_series(s: &Quad, d: i64) -> Result<LaurentSeries> {
    let scale = 2 * s.common_order() as u32;
    let target = prec_for(d, scale);
    // dividing by z²(z−1)² costs precision when the cross ratio has a zero or pole at q = 0
    let mut extra = 2;
    loop {
        let mu = j6_series(&cross_ratio_of_quad(s, d + extra)?)?;
        if mu.prec() >= target {
            return Ok(mu.truncate(target));
        }
        extra *= 2;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Constancy {
    Constant { re: f64, im: f64 },
    Nonconstant { exponent: i64, re: f64, im: f64 },
}

impl Constancy {
    pub fn is_constant(&self) -> bool {
        matches!(self, Constancy::Constant { .. })
    }
}

/// Constant iff every coefficient of nonzero exponent is below `tol` in
/// magnitude; otherwise reports the lowest offending exponent.
pub fn is_constant(f: &LaurentSeries, tol: f64) -> Constancy {
    if let Some((e, c)) = f.terms().find(|(e, c)| *e != 0 && c.norm() >= tol) {
        return Constancy::Nonconstant { exponent: e, re: c.re, im: c.im };
    }
    let c = if f.prec() > 0 { f.coeff(0) } else { C0 };
    Constancy::Constant { re: c.re, im: c.im }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verification {
    pub quad: Quad,
    pub scale: u32,
    pub terms: i64,
    pub precision: i64,
    #[serde(flatten)]
    pub constancy: Constancy,
    pub tag: Option<ConstantTag>,
}

/// Expands `μ_S` to `q^d` and decides whether it is constant.
pub fn verify_quad(s: &Quad, d: i64, tol: f64) -> Result<Verification> {
    let mu = mu_series(s, d)?;
    let constancy = is_constant(&mu, tol);
    let tag = match constancy {
        Constancy::Constant { re, im } => ConstantTag::matching(re, im, tol),
        Constancy::Nonconstant { .. } => None,
    };
    Ok(Verification { quad: *s, scale: mu.scale(), terms: d, precision: mu.prec(), constancy, tag })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::FamilyTable;
    use crate::torsion::parse_quad;

    fn q(n: i64, d: i64) -> Rat {
        Rat::new(n, d).unwrap()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn exact_quarter_roots() {
        assert_eq!(zeta(q(1, 4)), Complex64::new(0.0, 1.0));
        assert_eq!(zeta(q(-1, 4)) + zeta(q(1, 4)), C0);
        assert_eq!(zeta(q(5, 2)), Complex64::new(-1.0, 0.0));
        assert!(close(zeta(q(1, 3)), Complex64::new(-0.5, 3f64.sqrt() / 2.0), 1e-15));
    }

    #[test]
    fn divisor_sums() {
        let s1 = s_k_series(1, 1, 10);
        assert_eq!(s1.coeff(2), Complex64::new(3.0, 0.0));
        assert_eq!(s1.coeff(6), Complex64::new(12.0, 0.0));
        assert_eq!(s_k_series(3, 1, 10).coeff(1), C1);
        let a4 = a4_series(1, 10);
        assert_eq!(a4.coeff(1), Complex64::new(-5.0, 0.0));
        assert_eq!(a4.coeff(0), C0);
        assert_eq!(a6_series(1, 10).coeff(1), Complex64::new(-1.0, 0.0));
        // a6 = -(5σ3 + 7σ5)/12 at m = 2: -(45 + 231)/12 = -23
        assert_eq!(a6_series(1, 10).coeff(2), Complex64::new(-23.0, 0.0));
    }

    #[test]
    fn s1_as_double_sum() {
        let prec = 30;
        let terms = (1..prec).flat_map(|n| (1..prec).map(move |m| (n * m, m)));
        let dbl = LaurentSeries::from_terms(
            1,
            prec,
            terms.filter(|(e, _)| *e < prec).map(|(e, m)| (e, Complex64::new(m as f64, 0.0))),
        );
        assert_eq!(dbl, s_k_series(1, 1, prec));
    }

    #[test]
    fn leading_terms() {
        let s = 8;
        let p = prec_for(4, s);
        // u = ζ on the unit circle
        let z = q(1, 4);
        let x = x_series(&UPoint::new(q(1, 8), Rat::ZERO), s, p).unwrap();
        let zt = zeta(q(1, 8));
        assert!(close(x.coeff(0), (zt + zt.inv() - C1 - C1).inv(), 1e-12));
        // u = ζ q^{1/4}
        let x = x_series(&UPoint::new(q(3, 8), z), s, p).unwrap();
        assert_eq!(x.lead(), 2);
        assert!(close(x.coeff(2), zeta(q(3, 8)), 1e-12));
        // u = ζ q^{1/2} with ζ ≠ i
        let x = x_series(&UPoint::new(q(1, 8), Rat::HALF), s, p).unwrap();
        assert_eq!(x.lead(), 4);
        assert!(close(x.coeff(4), zt + zt.inv(), 1e-12));
        // u = i q^{1/2}
        let x = x_series(&UPoint::new(z, Rat::HALF), s, p).unwrap();
        assert_eq!(x.lead(), 8);
        assert!(close(x.coeff(8), Complex64::new(-6.0, 0.0), 1e-12));
    }

    #[test]
    fn exact_tate_residual_is_not_vacuous() {
        for u in [UPoint::new(q(1, 3), Rat::ZERO), UPoint::new(q(2, 5), q(1, 5))] {
            let s = 30;
            let p = prec_for(3, s);
            let mut e = ExactTate::new(&u, s, p).unwrap();
            assert!(e.residual().is_zero());
            let w2 = (&e.w * &e.w).to_complex();
            let xf = x_series(&u, s, p).unwrap();
            for (k, c) in e.x.coeffs.iter().enumerate().skip(1) {
                assert!((c.to_complex() - xf.coeff(k as i64) * w2).norm() < 1e-9);
            }
            e.a6.coeffs[s as usize] = &e.a6.coeffs[s as usize] + &Cyclo::int(e.w.order(), 1);
            assert!(!e.residual().is_zero());
        }
    }

    #[test]
    fn identity_is_rejected() {
        let o = UPoint::new(Rat::ZERO, Rat::ZERO);
        assert_eq!(x_series(&o, 4, 10), Err(Error::IdentityPoint));
        assert_eq!(theta_series(&UPoint::new(Rat::ONE, Rat::int(-2)), 4, 10), Err(Error::IdentityPoint));
        assert!(matches!(x_series(&UPoint::new(Rat::ZERO, q(1, 3)), 4, 10), Err(Error::Scale { .. })));
    }

    #[test]
    fn x_is_even() {
        for (t, r) in [(q(1, 5), q(1, 5)), (q(2, 7), q(3, 7)), (q(1, 8), Rat::ZERO), (q(1, 6), Rat::HALF)] {
            let s = 2 * 280;
            let p = prec_for(2, s);
            let a = x_series(&UPoint::new(t, r), s, p).unwrap();
            let b = x_series(&UPoint::new(-t, Rat::ONE - r), s, p).unwrap();
            assert!((&a - &b).max_abs() < 1e-12);
        }
    }

    #[test]
    fn tate_residuals_vanish() {
        for (t, r) in [(Rat::ZERO, q(1, 3)), (q(1, 4), q(1, 8)), (q(1, 2), Rat::HALF), (q(1, 5), Rat::ZERO)] {
            let s = 2 * 120;
            let res = tate_point_residual(&UPoint::new(t, r), s, prec_for(8, s)).unwrap();
            assert!(res.max_abs() < 1e-8, "{t} {r}: {}", res.max_abs());
        }
    }

    #[test]
    fn theta_leading_factor() {
        let s = 6;
        let th = theta_series(&UPoint::new(q(1, 3), Rat::ZERO), s, prec_for(4, s)).unwrap();
        assert!(close(th.coeff(0), C1 - zeta(q(1, 3)), 1e-14));
    }

    #[test]
    fn theta_functional_equation_as_series() {
        let s = 12;
        let p = prec_for(8, s);
        for (t, r) in [(q(1, 3), q(1, 6)), (q(1, 4), Rat::ZERO), (q(5, 12), q(-7, 12))] {
            let u = UPoint::new(t, r);
            let base = theta_series(&u, s, p + 4 * s as i64).unwrap();
            let shifted = theta_series(&UPoint::new(t, r + Rat::ONE), s, p).unwrap();
            let inverse = theta_series(&u.inv(), s, p).unwrap();
            let uinv = LaurentSeries::monomial(-zeta(-t), -exponent(r, s).unwrap(), s);
            let rhs = &uinv * &base;
            assert!((&shifted - &rhs).truncate(p).max_abs() < 1e-10);
            assert!((&inverse - &rhs).truncate(p).max_abs() < 1e-10);
        }
    }

    #[test]
    fn x_difference_identity() {
        let s = 2 * 3;
        let (res, prec) = x_diff_identity_residual(
            &UPoint::new(Rat::ZERO, q(1, 3)),
            &UPoint::new(q(1, 3), Rat::ZERO),
            s,
            prec_for(6, s),
        )
        .unwrap();
        assert!(res < 1e-8);
        assert!(prec >= prec_for(6, s));
    }

    #[test]
    fn j6_values() {
        let w = zeta(q(1, 3));
        assert!(close(j6_value(Complex64::new(2.0, 0.0)).unwrap(), Complex64::new(6.75, 0.0), 1e-14));
        assert!(j6_value(-w * w).unwrap().norm() < 1e-14);
        assert!(close(j6_value(Complex64::new(0.0, -1.0)).unwrap(), Complex64::new(0.5, 0.0), 1e-14));
        assert!(close(j6_value(w).unwrap(), Complex64::new(8.0 / 3.0, 0.0), 1e-14));
        assert!(j6_value(C1).is_err());
        assert!(j6_value(C0).is_err());
    }

    #[test]
    fn j6_is_s3_invariant() {
        for z in [Complex64::new(0.3, 1.7), Complex64::new(-2.0, 0.4)] {
            let v = j6_value(z).unwrap();
            for w in [z.inv(), C1 - z, C1 - z.inv(), z / (z - C1), (C1 - z).inv()] {
                assert!(close(j6_value(w).unwrap(), v, 1e-10));
            }
        }
    }

    #[test]
    fn cross_ratio_degenerate_inputs() {
        let x = x_series(&UPoint::new(q(1, 3), Rat::ZERO), 6, 13).unwrap();
        let v = XValue::Finite(x);
        assert!(matches!(cross_ratio_series([&v, &v, &v, &v]), Err(Error::Degenerate(_))));
        let inf = XValue::Infinity;
        assert!(matches!(cross_ratio_series([&inf, &v, &inf, &v]), Err(Error::Degenerate(_))));
    }

    #[test]
    fn family_constants() {
        for m in FamilyTable::instantiate(8) {
            let v = verify_quad(&m.quad, DEFAULT_TERMS, CONSTANCY_TOL).unwrap();
            assert_eq!(v.tag, Some(m.constant), "{}: {:?}", m.name(), v.constancy);
        }
    }

    #[test]
    fn theta_form_matches_x_form() {
        let s5 = parse_quad("0,1/5;0,2/5;1/5,0;2/5,0").unwrap();
        let quads = FamilyTable::instantiate(8).into_iter().map(|m| m.quad).chain([s5]);
        for s in quads {
            let a = cross_ratio_of_quad(&s, 3).unwrap();
            let b = x_cross_ratio(&s, 3).unwrap();
            assert_eq!(a.prec(), b.prec());
            assert!((&a - &b).max_abs() < 1e-8, "{s}");
        }
    }

    #[test]
    fn level_five_quad_is_nonconstant() {
        let s5 = parse_quad("0,1/5;0,2/5;1/5,0;2/5,0").unwrap();
        let v = verify_quad(&s5, DEFAULT_TERMS, CONSTANCY_TOL).unwrap();
        assert!(!v.constancy.is_constant());
        let Constancy::Nonconstant { re, im, .. } = v.constancy else { unreachable!() };
        assert!(re.hypot(im) > 1e-3);
    }

    #[test]
    fn constancy_of_trivial_series() {
        assert_eq!(is_constant(&LaurentSeries::zero(4, 10), 1e-9), Constancy::Constant { re: 0.0, im: 0.0 });
        let f = LaurentSeries::from_terms(1, 10, [(0, C1), (3, Complex64::new(1e-6, 0.0))]);
        assert_eq!(is_constant(&f, 1e-9), Constancy::Nonconstant { exponent: 3, re: 1e-6, im: 0.0 });
        let g = LaurentSeries::from_terms(1, 10, [(-2, Complex64::new(0.5, 0.0)), (0, C1)]);
        assert!(matches!(is_constant(&g, 1e-9), Constancy::Nonconstant { exponent: -2, .. }));
    }
}
