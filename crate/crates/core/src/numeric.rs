//! Direct summation of the Tate-curve functions at a complex `q`, used as an
//! oracle independent of the series code.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qseries::{j6_value, UPoint};
use crate::torsion::Quad;

const C1: Complex64 = Complex64::new(1.0, 0.0);

fn check_disc(q: Complex64) -> Result<()> {
    if q.norm() < 1.0 && q.norm() > 0.0 {
        Ok(())
    } else {
        Err(Error::OutsideDisc(q.norm()))
    }
}

/// Number of terms after which `|q|^n` drops below `1e-17`.
pub fn default_terms(q: Complex64) -> usize {
    (17.0 * std::f64::consts::LN_10 / -q.norm().ln()).ceil() as usize + 2
}

impl UPoint {
    /// `exp(2πiθ)·exp(r log q)` on the principal branch.
    pub fn eval(&self, q: Complex64) -> Complex64 {
        self.zeta() * (q.ln() * self.r.to_f64()).exp()
    }
}

fn s1_value(q: Complex64, terms: usize) -> Complex64 {
    (1..=terms as i32).map(|n| q.powi(n) * n as f64 / (C1 - q.powi(n))).sum()
}

/// `X(u,q) = Σ_{n∈Z} qⁿu/(1−qⁿu)² − 2s₁(q)`, summed over `|n| ≤ terms`.
pub fn x_value(u: Complex64, q: Complex64, terms: usize) -> Result<Complex64> {
    check_disc(q)?;
    let f = |w: Complex64| w / ((C1 - w) * (C1 - w));
    let mut acc = f(u);
    if !acc.is_finite() {
        return Err(Error::IdentityPoint);
    }
    for n in 1..=terms as i32 {
        let qn = q.powi(n);
        // w/(1−w)² is invariant under w ↦ 1/w
        acc += f(qn * u) + f(qn / u);
    }
    Ok(acc - s1_value(q, terms) * 2.0)
}

/// `Y(u,q) = Σ_{n∈Z} (qⁿu)²/(1−qⁿu)³ + s₁(q)`, summed over `|n| ≤ terms`.
pub fn y_value(u: Complex64, q: Complex64, terms: usize) -> Result<Complex64> {
    check_disc(q)?;
    let f = |w: Complex64| w * w / ((C1 - w) * (C1 - w) * (C1 - w));
    let mut acc = f(u);
    if !acc.is_finite() {
        return Err(Error::IdentityPoint);
    }
    for n in 1..=terms as i32 {
        let qn = q.powi(n);
        acc += f(qn * u) + f(u / qn);
    }
    Ok(acc + s1_value(q, terms))
}

/// `Θ(u,q) = (1−u)∏_{n=1}^{terms}(1−qⁿu)(1−qⁿu⁻¹)/(1−qⁿ)²`.
pub fn theta_value(u: Complex64, q: Complex64, terms: usize) -> Result<Complex64> {
    check_disc(q)?;
    let mut acc = C1 - u;
    for n in 1..=terms as i32 {
        let qn = q.powi(n);
        acc *= (C1 - qn * u) * (C1 - qn / u) / ((C1 - qn) * (C1 - qn));
    }
    Ok(acc)
}

/// A point of `P¹(C)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum P1 {
    Finite(Complex64),
    Infinity,
}

impl P1 {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            P1::Finite(z) => Some(z),
            P1::Infinity => None,
        }
    }
}

/// `(z₁−z₂)(z₃−z₄) / ((z₁−z₄)(z₃−z₂))`; a point at infinity drops the two
/// factors it occurs in.
pub fn cross_ratio(z: [P1; 4]) -> Result<Complex64> {
    if z.iter().filter(|v| **v == P1::Infinity).count() > 1 {
        return Err(Error::Degenerate("more than one point at infinity".into()));
    }
    let diff = |i: usize, j: usize| match (z[i], z[j]) {
        (P1::Finite(a), P1::Finite(b)) => a - b,
        _ => C1,
    };
    let den = diff(0, 3) * diff(2, 1);
    if den.norm() < 1e-300 {
        return Err(Error::Degenerate("two of the points coincide".into()));
    }
    Ok(diff(0, 1) * diff(2, 3) / den)
}

/// Cross ratio of the `X`-coordinates of the sorted points of `s`.
pub fn x_cross_ratio_value(s: &Quad, q: Complex64) -> Result<Complex64> {
    let terms = default_terms(q);
    let mut z = [P1::Infinity; 4];
    for (slot, p) in z.iter_mut().zip(s.points()) {
        if !p.is_identity() {
            *slot = P1::Finite(x_value(UPoint::from_coord(p).eval(q), q, terms)?);
        }
    }
    cross_ratio(z)
}

/// `μ_S(q)` by direct summation.
pub fn mu_value(s: &Quad, q: Complex64) -> Result<Complex64> {
    j6_value(x_cross_ratio_value(s, q)?)
}

/// `Θ(u₁u₂)Θ(u₁u₂⁻¹)Θ(u₃u₄)Θ(u₃u₄⁻¹) / (Θ(u₁u₄)Θ(u₁u₄⁻¹)Θ(u₃u₂)Θ(u₃u₂⁻¹))`
/// for the sorted points of `s`.
///
/// Falls back to the `X`-difference form if some `u_i u_j^{±1}` lies in `q^Z`.
pub fn product_ratio(s: &Quad, q: Complex64) -> Result<Complex64> {
    check_disc(q)?;
    let u = s.points().map(|p| UPoint::from_coord(&p));
    let args = |a: usize, b: usize| [u[a].mul(&u[b]), u[a].mul(&u[b].inv())];
    let num = [args(0, 1), args(2, 3)].concat();
    let den = [args(0, 3), args(2, 1)].concat();
    if num.iter().chain(&den).any(UPoint::in_q_lattice) {
        return x_cross_ratio_value(s, q);
    }
    let terms = default_terms(q);
    let prod = |ws: &[UPoint]| -> Result<Complex64> { ws.iter().map(|w| theta_value(w.eval(q), q, terms)).product() };
    Ok(prod(&num)? / prod(&den)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::{prec_for, theta_series, x_series, y_series};
    use crate::rat::Rat;
    use crate::torsion::parse_quad;

    fn q(n: i64, d: i64) -> Rat {
        Rat::new(n, d).unwrap()
    }

    #[test]
    fn rejects_q_outside_disc() {
        assert!(matches!(x_value(C1 * 0.5, C1, 10), Err(Error::OutsideDisc(_))));
        assert!(matches!(theta_value(C1 * 0.5, Complex64::new(0.0, 2.0), 10), Err(Error::OutsideDisc(_))));
    }

    #[test]
    fn series_agree_with_direct_sums() {
        let q0 = Complex64::new(0.05, 0.0);
        let terms = default_terms(q0);
        for u in [UPoint::new(q(1, 3), Rat::ZERO), UPoint::new(q(3, 8), q(1, 4)), UPoint::new(q(1, 4), Rat::HALF)] {
            let s = 24;
            let xs = x_series(&u, s, prec_for(12, s)).unwrap();
            let xd = x_value(u.eval(q0), q0, terms).unwrap();
            assert!((xs.eval_q(q0) - xd).norm() < 1e-8);
            let ys = y_series(&u, s, prec_for(12, s)).unwrap();
            let yd = y_value(u.eval(q0), q0, terms).unwrap();
            assert!((ys.eval_q(q0) - yd).norm() < 1e-8, "{} {}", ys.eval_q(q0), yd);
            let ts = theta_series(&u, s, prec_for(12, s)).unwrap();
            let td = theta_value(u.eval(q0), q0, terms).unwrap();
            assert!((ts.eval_q(q0) - td).norm() < 1e-8);
        }
    }

    #[test]
    fn theta_functional_equation() {
        let q0 = Complex64::new(0.3, -0.2);
        let terms = default_terms(q0);
        let u = Complex64::new(0.4, 0.9);
        let a = theta_value(q0 * u, q0, terms).unwrap();
        let b = theta_value(u, q0, terms).unwrap() / u;
        let c = theta_value(u.inv(), q0, terms).unwrap();
        assert!((a + b).norm() < 1e-12);
        assert!((c + b).norm() < 1e-12);
    }

    #[test]
    fn case_ten_is_one_half() {
        let s = parse_quad("0,1/8;1/4,1/8;1/4,3/8;1/2,1/8").unwrap();
        for q0 in
            [Complex64::new(0.1, 0.0), Complex64::from_polar(0.1, std::f64::consts::PI / 7.0), Complex64::new(0.0, 0.2)]
        {
            assert!((mu_value(&s, q0).unwrap() - 0.5).norm() < 1e-9);
        }
    }

    #[test]
    fn level_five_quad_moves() {
        let s5 = parse_quad("0,1/5;0,2/5;1/5,0;2/5,0").unwrap();
        let a = mu_value(&s5, Complex64::new(0.1, 0.0)).unwrap();
        let b = mu_value(&s5, Complex64::new(0.2, 0.0)).unwrap();
        assert!((a - b).norm() > 1e-3);
    }

    #[test]
    fn theta_ratio_matches_cross_ratio() {
        for text in ["0,1/4;1/2,0;1/2,1/4;1/2,1/2", "0,0;0,1/3;1/3,0;1/3,1/3", "0,1/5;0,2/5;1/5,0;2/5,0"] {
            let s = parse_quad(text).unwrap();
            let q0 = Complex64::new(0.15, 0.1);
            let a = product_ratio(&s, q0).unwrap();
            let b = x_cross_ratio_value(&s, q0).unwrap();
            assert!((a - b).norm() < 1e-10, "{text}: {a} {b}");
        }
    }
}
