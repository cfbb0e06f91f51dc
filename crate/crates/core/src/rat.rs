//! Exact reduced fractions over fixed-width integers.
//!
//! Intermediate products are formed in `i128` and narrowed back to `i64`
//! after reduction; a result that does not fit is an [`Error::Overflow`].
//! The operator impls panic on overflow instead of wrapping.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_integer::Integer;

use crate::error::{Error, Result};

/// A rational number `num/den` with `gcd(|num|, den) = 1` and `den >= 1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rat {
    num: i64,
    den: i64,
}

fn narrow(num: i128, den: i128) -> Result<Rat> {
    if den == 0 {
        return Err(Error::ZeroDenominator);
    }
    let g = num.gcd(&den);
    let (mut n, mut d) = (num / g, den / g);
    if d < 0 {
        n = -n;
        d = -d;
    }
    let num = i64::try_from(n).map_err(|_| Error::Overflow)?;
    let den = i64::try_from(d).map_err(|_| Error::Overflow)?;
    // i64::MIN has no negation; keep it out so Neg stays total.
    if num == i64::MIN {
        return Err(Error::Overflow);
    }
    Ok(Rat { num, den })
}

impl Rat {
    pub const ZERO: Rat = Rat { num: 0, den: 1 };
    pub const ONE: Rat = Rat { num: 1, den: 1 };
    pub const HALF: Rat = Rat { num: 1, den: 2 };

    pub fn new(num: i64, den: i64) -> Result<Rat> {
        narrow(num as i128, den as i128)
    }

    pub fn int(n: i64) -> Rat {
        assert!(n != i64::MIN, "i64::MIN is not representable");
        Rat { num: n, den: 1 }
    }

    pub fn num(self) -> i64 {
        self.num
    }

    pub fn den(self) -> i64 {
        self.den
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn is_integer(self) -> bool {
        self.den == 1
    }

    pub fn checked_add(self, o: Rat) -> Result<Rat> {
        let n = self.num as i128 * o.den as i128 + o.num as i128 * self.den as i128;
        narrow(n, self.den as i128 * o.den as i128)
    }

    pub fn checked_sub(self, o: Rat) -> Result<Rat> {
        self.checked_add(-o)
    }

    pub fn checked_mul(self, o: Rat) -> Result<Rat> {
        narrow(self.num as i128 * o.num as i128, self.den as i128 * o.den as i128)
    }

    pub fn checked_mul_int(self, k: i64) -> Result<Rat> {
        narrow(self.num as i128 * k as i128, self.den as i128)
    }

    pub fn checked_div(self, o: Rat) -> Result<Rat> {
        if o.num == 0 {
            return Err(Error::ZeroDenominator);
        }
        narrow(self.num as i128 * o.den as i128, self.den as i128 * o.num as i128)
    }

    pub fn floor(self) -> i64 {
        self.num.div_euclid(self.den)
    }

    /// Representative of `self` modulo 1 in `[0, 1)`.
    pub fn mod1(self) -> Rat {
        Rat { num: self.num.rem_euclid(self.den), den: self.den }
    }

    /// The unique element of `[0, 1/2]` congruent to `±self` modulo 1.
    pub fn fold(self) -> Rat {
        let y = self.mod1();
        if 2 * y.num <= y.den {
            y
        } else {
            Rat { num: y.den - y.num, den: y.den }
        }
    }

    /// Additive order of `self` in `Q/Z`.
    pub fn order(self) -> i64 {
        self.den
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// `x mod 1` in `[0, 1)`.
pub fn mod1(x: Rat) -> Rat {
    x.mod1()
}

/// `F(x)`: the element of `[0, 1/2]` congruent to `±x` modulo 1.
pub fn f_scalar(x: Rat) -> Rat {
    x.fold()
}

impl Ord for Rat {
    fn cmp(&self, o: &Rat) -> Ordering {
        (self.num as i128 * o.den as i128).cmp(&(o.num as i128 * self.den as i128))
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, o: &Rat) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat { num: -self.num, den: self.den }
    }
}

impl Add for Rat {
    type Output = Rat;
    fn add(self, o: Rat) -> Rat {
        self.checked_add(o).expect("rational overflow")
    }
}

impl Sub for Rat {
    type Output = Rat;
    fn sub(self, o: Rat) -> Rat {
        self.checked_sub(o).expect("rational overflow")
    }
}

impl Mul for Rat {
    type Output = Rat;
    fn mul(self, o: Rat) -> Rat {
        self.checked_mul(o).expect("rational overflow")
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Rat {
        Rat::int(n)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rat {
    type Err = Error;

    /// Accepts `p/q` or a bare integer `p`; surrounding whitespace is ignored.
    fn from_str(s: &str) -> Result<Rat> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Syntax(format!("cannot parse rational {s:?}"));
        match s.split_once('/') {
            Some((p, q)) => {
                let p: i64 = p.parse().map_err(|_| bad())?;
                let q: i64 = q.parse().map_err(|_| bad())?;
                Rat::new(p, q)
            }
            None => {
                let p: i64 = s.parse().map_err(|_| bad())?;
                Rat::new(p, 1)
            }
        }
    }
}
