//! Points of `±\Q²/Z²` reduced into the fundamental domain, and unordered
//! quadruples of them.
//!
//! The fundamental domain `R` is
//!
//! ```text
//! {0} × [0,1/2]  ∪  (0,1/2) × [0,1)  ∪  {1/2} × [0,1/2]
//! ```
//!
//! A point `(r, θ)` stands for the torsion point `[nr]w₁ + [nθ]w₂` of an
//! elliptic curve with an `n`-torsion basis `{w₁, w₂}`, modulo sign.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rat::Rat;

/// A point of the fundamental domain. Ordered lexicographically by `(r, θ)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorsionCoord {
    r: Rat,
    theta: Rat,
}

pub fn in_fundamental_domain(r: Rat, theta: Rat) -> bool {
    if theta < Rat::ZERO {
        return false;
    }
    if r.is_zero() || r == Rat::HALF {
        theta <= Rat::HALF
    } else {
        Rat::ZERO < r && r < Rat::HALF && theta < Rat::ONE
    }
}

/// `F(r, θ)`: the point of `R` congruent to `±(r, θ)` modulo `Z²`.
pub fn f_pair(r: Rat, theta: Rat) -> TorsionCoord {
    let r1 = r.mod1();
    let t1 = theta.mod1();
    let (r, theta) = if r1.is_zero() || r1 == Rat::HALF {
        // -r ≡ r here, so only θ needs folding.
        (r1, t1.fold())
    } else if r1 < Rat::HALF {
        (r1, t1)
    } else {
        (Rat::ONE - r1, (-t1).mod1())
    };
    TorsionCoord { r, theta }
}

impl TorsionCoord {
    pub fn new(r: Rat, theta: Rat) -> Result<TorsionCoord> {
        if in_fundamental_domain(r, theta) {
            Ok(TorsionCoord { r, theta })
        } else {
            Err(Error::OutsideDomain(r.to_string(), theta.to_string()))
        }
    }

    pub fn r(&self) -> Rat {
        self.r
    }

    pub fn theta(&self) -> Rat {
        self.theta
    }

    /// Smallest `m >= 1` with `m·(r, θ) ≡ 0` modulo `Z²`.
    pub fn order(&self) -> u64 {
        self.r.den().lcm(&self.theta.den()) as u64
    }

    pub fn is_identity(&self) -> bool {
        self.r.is_zero() && self.theta.is_zero()
    }

    /// Integer coordinates `(r·n, θ·n)`; `n` must be a multiple of the order.
    pub fn scaled(&self, n: u64) -> (u64, u64) {
        debug_assert_eq!(n % self.order(), 0);
        let n = n as i64;
        ((self.r.num() * (n / self.r.den())) as u64, (self.theta.num() * (n / self.theta.den())) as u64)
    }

    pub fn from_scaled(x: u64, y: u64, n: u64) -> TorsionCoord {
        f_pair(
            Rat::new(x as i64, n as i64).expect("nonzero level"),
            Rat::new(y as i64, n as i64).expect("nonzero level"),
        )
    }
}

impl fmt::Display for TorsionCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.r, self.theta)
    }
}

impl fmt::Debug for TorsionCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.r, self.theta)
    }
}

/// An unordered set of four distinct points of `R`, stored sorted.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Quad {
    points: [TorsionCoord; 4],
}

impl Quad {
    pub fn new(mut points: [TorsionCoord; 4]) -> Result<Quad> {
        points.sort();
        if let Some(w) = points.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicatePoint(w[0].to_string()));
        }
        Ok(Quad { points })
    }

    /// Reduces each pair with [`f_pair`] before sorting.
    pub fn from_pairs(pairs: [(Rat, Rat); 4]) -> Result<Quad> {
        Quad::new(pairs.map(|(r, t)| f_pair(r, t)))
    }

    /// Convenience constructor from `(r_num, r_den, θ_num, θ_den)` tuples.
    pub fn from_fracs(fr: [(i64, i64, i64, i64); 4]) -> Result<Quad> {
        let mut pairs = [(Rat::ZERO, Rat::ZERO); 4];
        for (slot, (a, b, c, d)) in pairs.iter_mut().zip(fr) {
            *slot = (Rat::new(a, b)?, Rat::new(c, d)?);
        }
        Quad::from_pairs(pairs)
    }

    pub fn points(&self) -> &[TorsionCoord; 4] {
        &self.points
    }

    /// Least common multiple of the four point orders.
    pub fn common_order(&self) -> u64 {
        self.points.iter().fold(1u64, |acc, p| acc.lcm(&p.order()))
    }

    pub fn contains(&self, p: &TorsionCoord) -> bool {
        self.points.contains(p)
    }
}

/// Parses `"p/q,p/q; p/q,p/q; p/q,p/q; p/q,p/q"`.
pub fn parse_quad(text: &str) -> Result<Quad> {
    let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let parts: Vec<&str> = cleaned.split(';').collect();
    if parts.len() != 4 {
        return Err(Error::Syntax(format!("expected 4 points separated by ';', found {}", parts.len())));
    }
    let mut pairs = [(Rat::ZERO, Rat::ZERO); 4];
    for (slot, part) in pairs.iter_mut().zip(parts) {
        let (r, t) =
            part.split_once(',').ok_or_else(|| Error::Syntax(format!("point {part:?} is not of the form r,theta")))?;
        if t.contains(',') {
            return Err(Error::Syntax(format!("point {part:?} has too many coordinates")));
        }
        *slot = (r.parse()?, t.parse()?);
    }
    Quad::from_pairs(pairs)
}

pub fn format_quad(q: &Quad) -> String {
    q.points.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(";")
}

impl FromStr for Quad {
    type Err = Error;
    fn from_str(s: &str) -> Result<Quad> {
        parse_quad(s)
    }
}

impl fmt::Display for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_quad(self))
    }
}

impl fmt::Debug for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.points.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p:?}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for Quad {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_quad(self))
    }
}

/// All points of `R` whose order divides `n`, in increasing order.
pub fn points_of_level(n: u64) -> Vec<TorsionCoord> {
    let mut pts: Vec<TorsionCoord> =
        (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).map(|(x, y)| TorsionCoord::from_scaled(x, y, n)).collect();
    pts.sort();
    pts.dedup();
    pts
}
