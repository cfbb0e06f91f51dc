//! Seeded randomized checks of the theta-function and Tate-curve identities,
//! and of nonconstancy for good quadruples.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::classifier::FamilyTable;
use crate::error::Result;
use crate::goodness::{good_quad, witness_form, Goodness};
use crate::numeric::{default_terms, mu_value, product_ratio, theta_value, x_value, y_value};
use crate::qseries::{
    cross_ratio_of_quad, is_constant, prec_for, tate_point_residual, tate_residual_exact, theta_series,
    x_diff_identity_residual, x_series, y_series, zeta, Constancy, UPoint, CONSTANCY_TOL, DEFAULT_TERMS,
};
use crate::rat::Rat;
use crate::series::LaurentSeries;
use crate::torsion::{points_of_level, Quad};

pub const THETA_TOL: f64 = 1e-10;
pub const X_DIFF_TOL: f64 = 1e-8;
pub const SPREAD_TOL: f64 = 1e-9;
pub const TATE_TOL: f64 = 1e-8;
/// Depth in powers of `q` of the series compared with direct sums.
pub const DIRECT_TERMS: i64 = 16;

fn sample_q<R: Rng>(rng: &mut R, max_abs: f64) -> Complex64 {
    Complex64::from_polar(rng.gen_range(0.02..max_abs), rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Points of order dividing `n`, other than the origin.
fn nonzero_points(n: u64) -> Vec<UPoint> {
    points_of_level(n).into_iter().filter(|p| !p.is_identity()).map(|p| UPoint::from_coord(&p)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThetaReport {
    pub trials: usize,
    pub seed: u64,
    /// `|Θ(qu) + u⁻¹Θ(u)|` and `|Θ(u⁻¹) + u⁻¹Θ(u)|` by direct products, `|q| ≤ 0.5`.
    pub functional_equation_max: f64,
    /// The same equations on series at `D ~ q⁸`, shifting `u` by `q^{±1}, q^{±2}`.
    pub series_functional_equation_max: f64,
    pub x_difference_pairs: usize,
    /// `X(u₁) − X(u₂) + u₂Θ(u₁u₂)Θ(u₁u₂⁻¹)/(Θ(u₁)²Θ(u₂)²)` at `D ~ q⁶`.
    pub x_difference_max: f64,
    pub product_quads: usize,
    /// Spread of the theta-product cross ratio over five sample `q`.
    pub product_spread_max: f64,
    pub pass: bool,
}

/// Direct functional-equation residual at random `(u, q)`, relative to `max(1, |Θ|)`.
fn direct_functional_equation<R: Rng>(rng: &mut R) -> Result<f64> {
    let q = sample_q(rng, 0.5);
    let u = Complex64::from_polar(rng.gen_range(0.2..3.0), rng.gen_range(0.0..std::f64::consts::TAU));
    let terms = default_terms(q);
    let base = theta_value(u, q, terms)? / u;
    let shifted = theta_value(q * u, q, terms)?;
    let inverse = theta_value(u.inv(), q, terms)?;
    let size = base.norm().max(1.0);
    Ok(((shifted + base).norm() / size).max((inverse + base).norm() / size))
}

/// `Θ(qᵏu) = (−1)ᵏu^{−k}q^{−k(k−1)/2}Θ(u)` and `Θ(u⁻¹) = −u⁻¹Θ(u)` on series.
fn series_functional_equation<R: Rng>(rng: &mut R) -> Result<f64> {
    let s = 24u32;
    let si = s as i64;
    let p = prec_for(8, s);
    let (theta, r) = loop {
        let theta = Rat::new(rng.gen_range(0..24), 24)?;
        let r = Rat::new(rng.gen_range(-24..24), 24)?;
        if !UPoint::new(theta, r).in_q_lattice() {
            break (theta, r);
        }
    };
    let k = *[-2i64, -1, 1, 2].choose(rng).expect("nonempty");
    let u = UPoint::new(theta, r);
    let base = theta_series(&u, s, p + 3 * si)?;
    let shifted = theta_series(&UPoint::new(theta, r + Rat::int(k)), s, p)?;
    let rs = r.checked_mul_int(si)?.num();
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let factor = LaurentSeries::monomial(zeta(-theta.checked_mul_int(k)?) * sign, -rs * k - k * (k - 1) / 2 * si, s);
    let inverse = theta_series(&u.inv(), s, p)?;
    let uinv = LaurentSeries::monomial(-zeta(-theta), -rs, s);
    let a = (&shifted - &(&factor * &base)).truncate(p).max_abs();
    let b = (&inverse - &(&uinv * &base)).truncate(p).max_abs();
    Ok(a.max(b))
}

fn x_difference_pair<R: Rng>(rng: &mut R) -> Result<f64> {
    let n = rng.gen_range(2..=12u64);
    let pts = nonzero_points(n);
    let pick: Vec<&UPoint> = pts.choose_multiple(rng, 2).collect();
    let s = 2 * n as u32;
    Ok(x_diff_identity_residual(pick[0], pick[1], s, prec_for(6, s))?.0)
}

/// Runs `trials` draws of each randomized identity and the product-form check
/// on every member of the family table at order `≤ 12`.
pub fn theta_check(trials: usize, seed: u64) -> Result<ThetaReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fe: f64 = 0.0;
    let mut sfe: f64 = 0.0;
    let mut xd: f64 = 0.0;
    for _ in 0..trials {
        fe = fe.max(direct_functional_equation(&mut rng)?);
        sfe = sfe.max(series_functional_equation(&mut rng)?);
        xd = xd.max(x_difference_pair(&mut rng)?);
    }
    let qs: Vec<Complex64> = (0..5).map(|_| sample_q(&mut rng, 0.3)).collect();
    let family = FamilyTable::instantiate(12);
    let spreads = family
        .par_iter()
        .map(|m| {
            let v = qs.iter().map(|&q| product_ratio(&m.quad, q)).collect::<Result<Vec<_>>>()?;
            Ok(v.iter().map(|z| (z - v[0]).norm()).fold(0.0, f64::max))
        })
        .collect::<Result<Vec<f64>>>()?;
    let spread = spreads.into_iter().fold(0.0, f64::max);
    Ok(ThetaReport {
        trials,
        seed,
        functional_equation_max: fe,
        series_functional_equation_max: sfe,
        x_difference_pairs: trials,
        x_difference_max: xd,
        product_quads: family.len(),
        product_spread_max: spread,
        pass: fe < THETA_TOL && sfe < THETA_TOL && xd < X_DIFF_TOL && spread < SPREAD_TOL,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TateReport {
    pub order: u64,
    pub terms: i64,
    pub points: usize,
    /// Points whose residual vanishes identically in `Z[ζ_N]`.
    pub exact_zero: usize,
    /// Largest float residual, and the same relative to the size of `X³`.
    pub float_residual_max: f64,
    pub float_relative_max: f64,
    pub direct_q: f64,
    /// Largest `|X_series − X_direct|`, `|Y_series − Y_direct|` at `q = direct_q`.
    pub series_vs_direct_max: f64,
    pub pass: bool,
}

/// Tate-curve equation for every nonzero point of order dividing `order`,
/// plus series against direct summation at `q = 0.05`.
pub fn tate_check(order: u64, terms: i64) -> Result<TateReport> {
    let pts = nonzero_points(order);
    let s = 2 * order as u32;
    let q0 = Complex64::new(0.05, 0.0);
    let dt = default_terms(q0);
    let rows = pts
        .par_iter()
        .map(|u| {
            let p = prec_for(terms, s);
            let exact = tate_residual_exact(u, s, p)?;
            let float = tate_point_residual(u, s, p)?.max_abs();
            let x = x_series(u, s, p)?;
            let size = (&(&x * &x) * &x).max_abs().max(1.0);
            let pd = prec_for(DIRECT_TERMS, s);
            let uq = u.eval(q0);
            let dx = (x_series(u, s, pd)?.eval_q(q0) - x_value(uq, q0, dt)?).norm();
            let dy = (y_series(u, s, pd)?.eval_q(q0) - y_value(uq, q0, dt)?).norm();
            Ok((exact.is_zero() && exact.max_abs() < TATE_TOL, float, float / size, dx.max(dy)))
        })
        .collect::<Result<Vec<_>>>()?;
    let exact_zero = rows.iter().filter(|r| r.0).count();
    let fmax = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let frel = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    let dmax = rows.iter().map(|r| r.3).fold(0.0, f64::max);
    Ok(TateReport {
        order,
        terms,
        points: pts.len(),
        exact_zero,
        float_residual_max: fmax,
        float_relative_max: frel,
        direct_q: q0.re,
        series_vs_direct_max: dmax,
        pass: exact_zero == pts.len() && dmax < TATE_TOL,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NonconstancyCheck {
    pub quad: Quad,
    pub witness: (i64, i64),
    pub witness_form: Quad,
    /// `(r₃ − r₂)·s` for the sorted witness form.
    pub expected_exponent: i64,
    pub constancy: Constancy,
    pub mu_at_0_1: (f64, f64),
    pub mu_at_0_2: (f64, f64),
    pub exponent_matches: bool,
    pub numeric_separated: bool,
}

/// A uniformly random 4-subset of the points of order dividing a random
/// level in `2..=max_order`, redrawn until it is good.
pub fn random_good_quad<R: Rng>(rng: &mut R, max_order: u64) -> Quad {
    loop {
        let n = rng.gen_range(2..=max_order);
        let pts = points_of_level(n);
        if pts.len() < 4 {
            continue;
        }
        let pick: Vec<_> = pts.choose_multiple(rng, 4).copied().collect();
        let s = Quad::new([pick[0], pick[1], pick[2], pick[3]]).expect("distinct points");
        if matches!(good_quad(&s), Goodness::Good { .. }) {
            return s;
        }
    }
}

/// Lowest-term and numeric nonconstancy for one good quadruple.
pub fn nonconstancy_check(s: &Quad) -> Result<Option<NonconstancyCheck>> {
    let Goodness::Good { a, b } = good_quad(s) else {
        return Ok(None);
    };
    let w = witness_form(s, a, b)?;
    let scale = 2 * w.common_order() as i64;
    let r = w.points().map(|p| p.r());
    let expected = (r[2] - r[1]).checked_mul_int(scale)?.num();
    let constancy = is_constant(&cross_ratio_of_quad(&w, DEFAULT_TERMS)?, CONSTANCY_TOL);
    let m1 = mu_value(s, Complex64::new(0.1, 0.0))?;
    let m2 = mu_value(s, Complex64::new(0.2, 0.0))?;
    Ok(Some(NonconstancyCheck {
        quad: *s,
        witness: (a, b),
        witness_form: w,
        expected_exponent: expected,
        exponent_matches: matches!(constancy, Constancy::Nonconstant { exponent, .. } if exponent == expected),
        constancy,
        mu_at_0_1: (m1.re, m1.im),
        mu_at_0_2: (m2.re, m2.im),
        numeric_separated: (m1 - m2).norm() > 1e-3,
    }))
}
