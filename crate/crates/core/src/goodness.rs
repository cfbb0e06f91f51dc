//! The "good" predicate on quadruples and the arithmetic progressions used to
//! bound the search for quadruples that are not good.

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rat::Rat;
use crate::sl2::{act, lift_coprime, Mat2};
use crate::torsion::Quad;

/// True iff the sorted folded values `f₁ ≤ f₂ ≤ f₃ ≤ f₄` satisfy `f₂ < f₃`.
pub fn good_scalars(xs: [Rat; 4]) -> bool {
    let mut f = xs.map(Rat::fold);
    f.sort();
    f[1] < f[2]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Goodness {
    /// A coprime integer pair `(a, b)` for which `{a r_i + b θ_i}` is good.
    Good {
        a: i64,
        b: i64,
    },
    NotGood,
}

impl Goodness {
    pub fn is_good(&self) -> bool {
        matches!(self, Goodness::Good { .. })
    }
}

/// The integer form of [`good_scalars`] for `{a x_i + b y_i} / n`.
pub fn good_residue(pairs: &[(u32, u32); 4], n: u32, a: u32, b: u32) -> bool {
    let (n64, a, b) = (n as u64, a as u64, b as u64);
    let mut f = pairs.map(|(x, y)| {
        let v = ((a * x as u64 + b * y as u64) % n64) as u32;
        v.min(n - v)
    });
    f.sort_unstable();
    f[1] < f[2]
}

pub const QUICK_PAIRS: [(u32, u32); 3] = [(0, 1), (1, 0), (1, 1)];

pub fn quick_witness(pairs: &[(u32, u32); 4], n: u32) -> Option<(u32, u32)> {
    QUICK_PAIRS.into_iter().map(|(a, b)| (a % n, b % n)).find(|&(a, b)| good_residue(pairs, n, a, b))
}

/// First primitive residue pair making the quadruple good: the quick pairs
/// are tried first, then all `(a, b)` in lexicographic order.
pub fn residue_witness(pairs: &[(u32, u32); 4], n: u32) -> Option<(u32, u32)> {
    quick_witness(pairs, n).or_else(|| {
        (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .filter(|&(a, b)| a.gcd(&b).gcd(&n) == 1)
            .find(|&(a, b)| good_residue(pairs, n, a, b))
    })
}

/// Decides goodness by scanning residue pairs modulo the common order.
pub fn good_quad(s: &Quad) -> Goodness {
    let n = s.common_order();
    let pairs = s.points().map(|p| {
        let (x, y) = p.scaled(n);
        (x as u32, y as u32)
    });
    match residue_witness(&pairs, n as u32) {
        None => Goodness::NotGood,
        Some((a, b)) => {
            let (a, b) = lift_coprime(a as i64, b as i64, n as i64);
            debug_assert!(good_scalars(combination(s, a, b)));
            Goodness::Good { a, b }
        }
    }
}

/// The four values `a r_i + b θ_i`.
pub fn combination(s: &Quad, a: i64, b: i64) -> [Rat; 4] {
    s.points().map(|p| p.r().checked_mul_int(a).unwrap() + p.theta().checked_mul_int(b).unwrap())
}

/// `γ·S` for a `γ ∈ SL₂(Z)` with first row `(a, b)`; when `(a, b)` is a
/// witness the sorted `r`-coordinates of the result satisfy `r₂ < r₃`.
pub fn witness_form(s: &Quad, a: i64, b: i64) -> Result<Quad> {
    let e = a.extended_gcd(&b);
    if e.gcd != 1 {
        return Err(Error::Determinant(e.gcd));
    }
    Ok(act(&Mat2::new(a, b, -e.y, e.x)?, s))
}

/// The solutions of `α c + β ≡ 0 (mod 1)`: empty, or `c ≡ residue (mod modulus)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Progression {
    pub residue: Option<i64>,
    /// `ord(α)`; equal to 1 when `α ≡ 0`.
    pub modulus: i64,
}

impl Progression {
    pub fn solve(alpha: Rat, beta: Rat) -> Progression {
        let alpha = alpha.mod1();
        let (p, q) = (alpha.num(), alpha.den());
        let gamma = (-beta).mod1();
        // c·p/q ≡ γ needs γ·q to be an integer
        let residue = if q % gamma.den() != 0 {
            None
        } else {
            let g = gamma.num() * (q / gamma.den());
            let inv = p.extended_gcd(&q).x;
            Some((g * inv).rem_euclid(q))
        };
        Progression { residue, modulus: q }
    }

    pub fn is_empty(&self) -> bool {
        self.residue.is_none()
    }

    pub fn contains(&self, c: i64) -> bool {
        self.residue.is_some_and(|r| (c - r).rem_euclid(self.modulus) == 0)
    }
}

/// The eight progressions `A_1..A_8` attached to a quadruple of the shape
/// `{(0,θ₁), (r,θ₂), (r,θ₃), (r₄,θ₄)}` with `r ≤ r₄`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProgressionData {
    pub sets: [Progression; 8],
}

impl ProgressionData {
    pub fn moduli(&self) -> [i64; 8] {
        self.sets.map(|p| p.modulus)
    }
}

pub fn has_canonical_shape(s: &Quad) -> bool {
    let p = s.points();
    p[0].r().is_zero() && p[1].r() == p[2].r() && p[1].r() <= p[3].r()
}

pub fn progression_data(s: &Quad) -> Result<ProgressionData> {
    if !has_canonical_shape(s) {
        return Err(Error::Shape(s.to_string()));
    }
    let p = s.points();
    let (r, r4) = (p[1].r(), p[3].r());
    let (t2, t3, t4) = (p[1].theta(), p[2].theta(), p[3].theta());
    let solve = Progression::solve;
    let sets = [
        solve(r, t2),
        solve(r, t3),
        solve(r4, t4),
        solve(r + r, t2 + t3),
        solve(r4 + r, t4 + t2),
        solve(r4 + r, t4 + t3),
        solve(r4 - r, t4 - t2),
        solve(r4 - r, t4 - t3),
    ];
    Ok(ProgressionData { sets })
}

/// Whether the nonempty progressions cover every integer.
pub fn covers_z(pd: &ProgressionData) -> bool {
    let live: Vec<&Progression> = pd.sets.iter().filter(|p| !p.is_empty()).collect();
    if live.is_empty() {
        return false;
    }
    let l = live.iter().fold(1i64, |acc, p| acc.lcm(&p.modulus));
    (0..l).all(|c| live.iter().any(|p| p.contains(c)))
}

/// `Σ 1/d_i` over the nonempty progressions.
pub fn harmonic_sum(pd: &ProgressionData) -> Rat {
    pd.sets.iter().filter(|p| !p.is_empty()).fold(Rat::ZERO, |acc, p| acc + Rat::new(1, p.modulus).unwrap())
}
