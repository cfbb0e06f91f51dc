//! Simultaneous root finding for low-degree complex polynomials (Aberth–Ehrlich).

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const ROOT_TOL: f64 = 1e-12;
pub const MAX_ITER: usize = 200;
const RESTARTS: usize = 8;

/// Value and derivative of `Σ cₖxᵏ` (coefficients lowest degree first).
fn horner(c: &[Complex64], x: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = p;
    for &ck in c.iter().rev() {
        dp = dp * x + p;
        p = p * x + ck;
    }
    (p, dp)
}

fn aberth(c: &[Complex64], mut z: Vec<Complex64>) -> Option<Vec<Complex64>> {
    let n = z.len();
    for _ in 0..MAX_ITER {
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let (p, dp) = horner(c, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !step.is_finite() {
                return None;
            }
            z[i] -= step;
            worst = worst.max(step.norm() / z[i].norm().max(1.0));
        }
        if worst < ROOT_TOL {
            return Some(z);
        }
    }
    None
}

/// All complex roots of `Σ cₖxᵏ`, coefficients given lowest degree first.
///
/// Starting points lie on a circle of the Cauchy radius; on stagnation the
/// iteration restarts from randomly perturbed points.
pub fn poly_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let deg = coeffs.iter().rposition(|c| c.norm() > 0.0).ok_or_else(|| Error::Degenerate("zero polynomial".into()))?;
    let c = &coeffs[..=deg];
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = c[deg];
    let radius = 1.0 + c[..deg].iter().map(|x| (x / lead).norm()).fold(0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for attempt in 0..=RESTARTS {
        let start = (0..deg)
            .map(|k| {
                let jitter = if attempt == 0 { 0.0 } else { rng.gen_range(-0.5..0.5) };
                let angle = std::f64::consts::TAU * (k as f64 + 0.25 + jitter) / deg as f64;
                Complex64::from_polar(radius * (0.5 + 0.1 * attempt as f64), angle + 0.4)
            })
            .collect();
        if let Some(z) = aberth(c, start) {
            return Ok(z);
        }
    }
    Err(Error::NoConvergence(MAX_ITER))
}
