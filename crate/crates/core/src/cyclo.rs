//! Exact arithmetic in `Z[ζ_N]`, used where double precision cannot resolve
//! a residual that is identically zero.
//!
//! Elements are stored in the group ring `Z[x]/(xᴺ−1)`; equality in the field
//! is decided by reducing modulo the cyclotomic polynomial `Φ_N`.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cyclo {
    c: Vec<i128>,
}

impl Cyclo {
    pub fn zero(n: usize) -> Cyclo {
        Cyclo { c: vec![0; n.max(1)] }
    }

    pub fn int(n: usize, v: i128) -> Cyclo {
        let mut z = Cyclo::zero(n);
        z.c[0] = v;
        z
    }

    /// `v·ζᵏ`.
    pub fn root(n: usize, k: i64, v: i128) -> Cyclo {
        let mut z = Cyclo::zero(n);
        let len = z.c.len() as i64;
        z.c[k.rem_euclid(len) as usize] = v;
        z
    }

    pub fn order(&self) -> usize {
        self.c.len()
    }

    fn checked_mul(&self, o: &Cyclo) -> Result<Cyclo> {
        let n = self.order();
        let mut out = vec![0i128; n];
        for (i, &a) in self.c.iter().enumerate().filter(|(_, a)| **a != 0) {
            for (j, &b) in o.c.iter().enumerate().filter(|(_, b)| **b != 0) {
                let k = (i + j) % n;
                out[k] = a.checked_mul(b).and_then(|p| out[k].checked_add(p)).ok_or(Error::Overflow)?;
            }
        }
        Ok(Cyclo { c: out })
    }

    /// Remainder modulo `Φ_N`; zero exactly when the element is `0` in `Q(ζ_N)`.
    pub fn reduce(&self) -> Vec<i128> {
        let phi = cyclotomic_poly(self.order());
        let deg = phi.len() - 1;
        let mut r = self.c.clone();
        for top in (deg..r.len()).rev() {
            let lead = r[top];
            if lead != 0 {
                for (k, &p) in phi.iter().enumerate() {
                    r[top - deg + k] -= lead * p;
                }
            }
        }
        r.truncate(deg);
        r
    }

    pub fn is_zero(&self) -> bool {
        self.reduce().iter().all(|&v| v == 0)
    }

    pub fn to_complex(&self) -> Complex64 {
        let n = self.order() as f64;
        self.reduce()
            .iter()
            .enumerate()
            .map(|(k, &v)| Complex64::from_polar(v as f64, std::f64::consts::TAU * k as f64 / n))
            .sum()
    }
}

impl Add for &Cyclo {
    type Output = Cyclo;
    fn add(self, o: &Cyclo) -> Cyclo {
        Cyclo { c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &Cyclo {
    type Output = Cyclo;
    fn sub(self, o: &Cyclo) -> Cyclo {
        Cyclo { c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect() }
    }
}

impl Mul for &Cyclo {
    type Output = Cyclo;
    fn mul(self, o: &Cyclo) -> Cyclo {
        self.checked_mul(o).expect("cyclotomic coefficient overflow")
    }
}

/// Integer coefficients of `Φ_n`, lowest degree first.
pub fn cyclotomic_poly(n: usize) -> Vec<i128> {
    let n = n.max(1);
    // xⁿ − 1 divided by Φ_d for every proper divisor d
    let mut p = vec![0i128; n + 1];
    p[0] = -1;
    p[n] = 1;
    for d in (1..n).filter(|d| n.is_multiple_of(*d)) {
        p = exact_div(&p, &cyclotomic_poly(d));
    }
    p
}

fn exact_div(num: &[i128], den: &[i128]) -> Vec<i128> {
    let mut r = num.to_vec();
    let dd = den.len() - 1;
    let mut q = vec![0i128; num.len() - dd];
    for top in (dd..r.len()).rev() {
        let c = r[top];
        q[top - dd] = c;
        for (k, &p) in den.iter().enumerate() {
            r[top - dd + k] -= c * p;
        }
    }
    debug_assert!(r.iter().all(|&v| v == 0));
    q
}

/// Dense power series `Σ aₖtᵏ`, `k < len`, with coefficients in `Z[ζ_N]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycloSeries {
    pub coeffs: Vec<Cyclo>,
}

impl CycloSeries {
    pub fn zero(n: usize, len: usize) -> CycloSeries {
        CycloSeries { coeffs: vec![Cyclo::zero(n); len] }
    }

    /// Sums `(exponent, coefficient)` terms below the length.
    pub fn from_terms(n: usize, len: usize, terms: impl IntoIterator<Item = (i64, Cyclo)>) -> CycloSeries {
        let mut s = CycloSeries::zero(n, len);
        for (e, c) in terms {
            if (0..len as i64).contains(&e) {
                s.coeffs[e as usize] = &s.coeffs[e as usize] + &c;
            }
        }
        s
    }

    pub fn scale_by(&self, c: &Cyclo) -> CycloSeries {
        CycloSeries { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// Largest coefficient, after reduction, as a complex number.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.to_complex().norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Cyclo::is_zero)
    }
}

impl Add for &CycloSeries {
    type Output = CycloSeries;
    fn add(self, o: &CycloSeries) -> CycloSeries {
        CycloSeries { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &CycloSeries {
    type Output = CycloSeries;
    fn sub(self, o: &CycloSeries) -> CycloSeries {
        CycloSeries { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect() }
    }
}

impl Mul for &CycloSeries {
    type Output = CycloSeries;
    fn mul(self, o: &CycloSeries) -> CycloSeries {
        let len = self.coeffs.len().min(o.coeffs.len());
        let n = self.coeffs.first().map_or(1, Cyclo::order);
        let mut out = CycloSeries::zero(n, len);
        for (i, a) in self.coeffs.iter().enumerate().take(len) {
            if a.c.iter().all(|&v| v == 0) {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(len - i) {
                out.coeffs[i + j] = &out.coeffs[i + j] + &(a * b);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_poly(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(cyclotomic_poly(11), vec![1; 11]);
    }

    #[test]
    fn sum_of_primitive_roots() {
        // 1 + ζ + … + ζ⁴ = 0 for ζ a primitive fifth root
        let s = (0..5).fold(Cyclo::zero(5), |acc, k| &acc + &Cyclo::root(5, k, 1));
        assert!(s.is_zero());
        assert!(!Cyclo::root(5, 2, 1).is_zero());
        // ζ₆² − ζ₆ + 1 = 0
        let z = &(&Cyclo::root(6, 2, 1) - &Cyclo::root(6, 1, 1)) + &Cyclo::int(6, 1);
        assert!(z.is_zero());
    }

    proptest! {
        #[test]
        fn evaluation_is_a_ring_map(n in 1usize..=12, a in prop::collection::vec(-5i128..5, 12), b in prop::collection::vec(-5i128..5, 12)) {
            let x = Cyclo { c: a[..n].to_vec() };
            let y = Cyclo { c: b[..n].to_vec() };
            let direct = |v: &Cyclo| -> Complex64 {
                v.c.iter().enumerate().map(|(k, &c)| Complex64::from_polar(c as f64, std::f64::consts::TAU * k as f64 / n as f64)).sum()
            };
            prop_assert!(((&x * &y).to_complex() - direct(&x) * direct(&y)).norm() < 1e-9);
            prop_assert!((x.to_complex() - direct(&x)).norm() < 1e-9);
        }
    }
}
