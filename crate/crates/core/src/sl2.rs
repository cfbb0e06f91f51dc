//! `SL₂(Z)`, its finite quotients `SL₂(Z/n)`, and their left action on
//! quadruples: `γ·{(r_i, θ_i)} = {F((r_i, θ_i)·γᵀ)}`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::rat::Rat;
use crate::torsion::{f_pair, Quad, TorsionCoord};

/// An integral matrix `[[a, b], [c, d]]` with `ad − bc = 1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat2 {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 { a: 1, b: 0, c: 0, d: 1 };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Mat2> {
        let det = (a as i128) * (d as i128) - (b as i128) * (c as i128);
        if det != 1 {
            return Err(Error::Determinant(i64::try_from(det).unwrap_or(i64::MAX)));
        }
        Ok(Mat2 { a, b, c, d })
    }

    pub fn entries(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn checked_mul(&self, o: &Mat2) -> Result<Mat2> {
        let m = |x: i64, y: i64, z: i64, w: i64| -> Result<i64> {
            let v = x as i128 * y as i128 + z as i128 * w as i128;
            i64::try_from(v).map_err(|_| Error::Overflow)
        };
        Ok(Mat2 {
            a: m(self.a, o.a, self.b, o.c)?,
            b: m(self.a, o.b, self.b, o.d)?,
            c: m(self.c, o.a, self.d, o.c)?,
            d: m(self.c, o.b, self.d, o.d)?,
        })
    }

    pub fn inverse(&self) -> Mat2 {
        Mat2 { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn transpose(&self) -> Mat2 {
        Mat2 { a: self.a, b: self.c, c: self.b, d: self.d }
    }

    pub fn neg(&self) -> Mat2 {
        Mat2 { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }

    pub fn reduce(&self, n: u32) -> Mat2ModN {
        let r = |v: i64| v.rem_euclid(n as i64) as u32;
        Mat2ModN { n, e: [r(self.a), r(self.b), r(self.c), r(self.d)] }
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Mat2 {
    type Err = Error;

    /// Parses `[[a,b],[c,d]]`; whitespace is ignored.
    fn from_str(s: &str) -> Result<Mat2> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Syntax(format!("cannot parse matrix {s:?}, expected [[a,b],[c,d]]"));
        let inner = s.strip_prefix("[[").and_then(|t| t.strip_suffix("]]")).ok_or_else(bad)?;
        let (r1, r2) = inner.split_once("],[").ok_or_else(bad)?;
        let nums: Vec<i64> =
            r1.split(',').chain(r2.split(',')).map(|t| t.parse::<i64>().map_err(|_| bad())).collect::<Result<_>>()?;
        if nums.len() != 4 {
            return Err(bad());
        }
        Mat2::new(nums[0], nums[1], nums[2], nums[3])
    }
}

/// A matrix over `Z/n` with determinant `1`. Entries are stored as `[a, b, c, d]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat2ModN {
    n: u32,
    e: [u32; 4],
}

impl Mat2ModN {
    pub fn new(n: u32, a: i64, b: i64, c: i64, d: i64) -> Result<Mat2ModN> {
        assert!(n >= 1, "modulus must be positive");
        let m = n as i64;
        let e = [a, b, c, d].map(|v| v.rem_euclid(m) as u32);
        let det = (e[0] as i64 * e[3] as i64 - e[1] as i64 * e[2] as i64).rem_euclid(m);
        if det != 1 % m {
            return Err(Error::Determinant(det));
        }
        Ok(Mat2ModN { n, e })
    }

    pub fn identity(n: u32) -> Mat2ModN {
        Mat2ModN { n, e: [1 % n, 0, 0, 1 % n] }
    }

    pub fn minus_identity(n: u32) -> Mat2ModN {
        Mat2ModN { n, e: [(n - 1) % n, 0, 0, (n - 1) % n] }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn entries(&self) -> [u32; 4] {
        self.e
    }

    pub fn mul(&self, o: &Mat2ModN) -> Mat2ModN {
        assert_eq!(self.n, o.n, "moduli differ");
        let n = self.n as u64;
        let [a, b, c, d] = self.e.map(u64::from);
        let [p, q, r, s] = o.e.map(u64::from);
        let e = [a * p + b * r, a * q + b * s, c * p + d * r, c * q + d * s].map(|v| (v % n) as u32);
        Mat2ModN { n: self.n, e }
    }

    pub fn inverse(&self) -> Mat2ModN {
        let n = self.n;
        let [a, b, c, d] = self.e;
        Mat2ModN { n, e: [d, (n - b) % n, (n - c) % n, a] }
    }

    pub fn transpose(&self) -> Mat2ModN {
        let [a, b, c, d] = self.e;
        Mat2ModN { n: self.n, e: [a, c, b, d] }
    }

    pub fn inverse_transpose(&self) -> Mat2ModN {
        self.inverse().transpose()
    }

    pub fn neg(&self) -> Mat2ModN {
        let n = self.n;
        Mat2ModN { n, e: self.e.map(|v| (n - v) % n) }
    }

    /// A matrix of `SL₂(Z)` reducing to `self` modulo `n`.
    pub fn lift(&self) -> Mat2 {
        let n = self.n as i64;
        let [a, b, c, d] = self.e.map(i64::from);
        let (a1, b1) = lift_coprime(a, b, n);
        let eg = a1.extended_gcd(&b1);
        debug_assert_eq!(eg.gcd, 1);
        let (u, v) = (eg.x, eg.y);
        // [[a1, b1], [-v, u]] has determinant 1; every other lift with first
        // row (a1, b1) differs from it by k times that first row.
        let (c0, d0) = (-v, u);
        let e = (c - c0).rem_euclid(n);
        let f = (d - d0).rem_euclid(n);
        let k = (u.rem_euclid(n) * e + v.rem_euclid(n) * f).rem_euclid(n);
        let m = Mat2::new(a1, b1, c0 + k * a1, d0 + k * b1).expect("lift has determinant 1");
        debug_assert_eq!(m.reduce(self.n), *self);
        m
    }
}

impl fmt::Display for Mat2ModN {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.e;
        write!(f, "[[{a},{b}],[{c},{d}]] mod {}", self.n)
    }
}

impl fmt::Debug for Mat2ModN {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Lifts a residue pair `(a, b)` with `gcd(a, b, n) = 1` to a coprime integer
/// pair with the same residues modulo `n`.
///
/// `b` becomes its least positive residue (or `n` when `b ≡ 0`), and `a` is
/// shifted by the first multiple of `n` that makes the pair coprime.
pub fn lift_coprime(a: i64, b: i64, n: i64) -> (i64, i64) {
    assert!(n >= 1);
    let a = a.rem_euclid(n);
    let b = match b.rem_euclid(n) {
        0 => n,
        r => r,
    };
    assert_eq!(a.gcd(&b).gcd(&n), 1, "residue pair ({a}, {b}) is not primitive mod {n}");
    (0..b).map(|k| a + k * n).find(|a1| a1.gcd(&b) == 1).map(|a1| (a1, b)).expect("a coprime shift exists below b")
}

/// `|SL₂(Z/n)| = n³ ∏_{p | n} (1 − 1/p²)`.
pub fn sl2_order(n: u32) -> u64 {
    let mut order = (n as u64).pow(3);
    let mut m = n as u64;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            order = order / (p * p) * (p * p - 1);
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        order = order / (m * m) * (m * m - 1);
    }
    order
}

/// All elements of `SL₂(Z/n)` in increasing entry order.
pub fn enumerate_sl2_mod_n(n: u32) -> Vec<Mat2ModN> {
    assert!(n >= 1);
    let m = n as u64;
    let mut out = Vec::with_capacity(sl2_order(n) as usize);
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                for d in 0..m {
                    if (a * d + m * m - b * c) % m == 1 % m {
                        out.push(Mat2ModN { n, e: [a, b, c, d].map(|v| v as u32) });
                    }
                }
            }
        }
    }
    out
}

/// A finite set of residue matrices, expected to be a subgroup.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SubgroupModN {
    n: u32,
    elements: BTreeSet<Mat2ModN>,
}

impl SubgroupModN {
    pub fn from_elements(n: u32, elements: impl IntoIterator<Item = Mat2ModN>) -> SubgroupModN {
        let elements: BTreeSet<_> = elements.into_iter().collect();
        assert!(elements.iter().all(|g| g.n == n), "mixed moduli");
        SubgroupModN { n, elements }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, g: &Mat2ModN) -> bool {
        self.elements.contains(g)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Mat2ModN> {
        self.elements.iter()
    }

    pub fn is_subset(&self, other: &SubgroupModN) -> bool {
        self.elements.is_subset(&other.elements)
    }

    /// Contains the identity and is closed under products and inverses.
    pub fn is_subgroup(&self) -> bool {
        self.contains(&Mat2ModN::identity(self.n))
            && self.elements.iter().all(|g| self.contains(&g.inverse()))
            && self.elements.iter().all(|g| self.elements.iter().all(|h| self.contains(&g.mul(h))))
    }

    /// Number of classes `{g, −g}` in the set: the order of its image in `PSL₂(Z/n)`.
    pub fn psl_quotient_order(&self) -> usize {
        self.elements
            .iter()
            .filter(|g| {
                let m = g.neg();
                **g <= m || !self.contains(&m)
            })
            .count()
    }
}

fn act_point(g: &Mat2, p: &TorsionCoord) -> TorsionCoord {
    let [a, b, c, d] = g.entries().map(Rat::int);
    f_pair(a * p.r() + b * p.theta(), c * p.r() + d * p.theta())
}

/// `γ·S` computed with exact rational arithmetic.
pub fn act(g: &Mat2, s: &Quad) -> Quad {
    let pts = s.points().map(|p| act_point(g, &p));
    Quad::new(pts).expect("the action of SL₂ is injective on points")
}

/// `γ·S` for a residue matrix; `n` must be a multiple of the common order of `S`.
pub fn act_mod(g: &Mat2ModN, s: &Quad) -> Quad {
    let n = g.n as u64;
    let [a, b, c, d] = g.e.map(u64::from);
    let pts = s.points().map(|p| {
        let (x, y) = p.scaled(n);
        TorsionCoord::from_scaled((a * x + b * y) % n, (c * x + d * y) % n, n)
    });
    Quad::new(pts).expect("the action of SL₂ is injective on points")
}

pub fn orbit(s: &Quad) -> BTreeSet<Quad> {
    let n = s.common_order() as u32;
    enumerate_sl2_mod_n(n).iter().map(|g| act_mod(g, s)).collect()
}

/// The lexicographically least quad in the orbit of `s`, with a matrix of
/// `SL₂(Z)` carrying `s` to it.
pub fn minimal_representative(s: &Quad) -> (Quad, Mat2) {
    let n = s.common_order() as u32;
    let (q, g) = enumerate_sl2_mod_n(n).into_iter().map(|g| (act_mod(&g, s), g)).min().expect("SL₂(Z/n) is nonempty");
    (q, g.lift())
}

/// The image modulo `n` of `Γ_S = {γ^{−T} : γ·S = S}`.
pub fn stabilizer_gamma_s(s: &Quad) -> SubgroupModN {
    let n = s.common_order() as u32;
    let elems = enumerate_sl2_mod_n(n).into_iter().filter(|g| act_mod(g, s) == *s).map(|g| g.inverse_transpose());
    SubgroupModN::from_elements(n, elems)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torsion::parse_quad;

    fn s5() -> Quad {
        parse_quad("0,1/5;0,2/5;1/5,0;2/5,0").unwrap()
    }

    #[test]
    fn level_five_images() {
        let g1: Mat2 = "[[1,2],[1,3]]".parse().unwrap();
        let g2: Mat2 = "[[1,1],[2,3]]".parse().unwrap();
        assert_eq!(act(&g1, &s5()), parse_quad("1/5,1/5;1/5,4/5;2/5,2/5;2/5,3/5").unwrap());
        assert_eq!(act(&g2, &s5()), parse_quad("1/5,2/5;1/5,3/5;2/5,1/5;2/5,4/5").unwrap());
        assert_eq!(act(&Mat2::IDENTITY, &s5()), s5());
        let orb = orbit(&s5());
        assert!(orb.contains(&act(&g1, &s5())));
        assert!(orb.contains(&act(&g2, &s5())));
        assert_eq!(minimal_representative(&act(&g1, &s5())).0, s5());
    }

    #[test]
    fn group_orders() {
        assert_eq!(enumerate_sl2_mod_n(1).len(), 1);
        assert_eq!(enumerate_sl2_mod_n(2).len(), 6);
        assert_eq!(enumerate_sl2_mod_n(5).len(), 120);
        for n in 1..=12 {
            assert_eq!(enumerate_sl2_mod_n(n).len() as u64, sl2_order(n), "n = {n}");
        }
    }

    #[test]
    fn small_orbits() {
        let two = parse_quad("0,0;0,1/2;1/2,0;1/2,1/2").unwrap();
        assert_eq!(orbit(&two).len(), 1);
        // the four points of order 3 in R, so the whole group fixes the set
        let c3 = parse_quad("0,1/3;1/3,0;1/3,1/3;1/3,2/3").unwrap();
        assert_eq!(orbit(&c3).len(), 1);
        assert_eq!(stabilizer_gamma_s(&c3).len(), 24);
        let st = stabilizer_gamma_s(&two);
        assert_eq!(st.len(), 6);
        assert!(st.is_subgroup());
    }

    #[test]
    fn stabilizer_of_level_five_quad() {
        let st = stabilizer_gamma_s(&s5());
        assert!(st.is_subgroup());
        assert!(st.contains(&Mat2ModN::minus_identity(5)));
        assert_eq!(st.psl_quotient_order(), 4);
        let pm = SubgroupModN::from_elements(5, [Mat2ModN::identity(5), Mat2ModN::minus_identity(5)]);
        assert_eq!(pm.psl_quotient_order(), 1);
    }

    #[test]
    fn case_ten_is_minimal() {
        let c10 = parse_quad("0,1/8;1/4,1/8;1/4,3/8;1/2,1/8").unwrap();
        let (m, g) = minimal_representative(&c10);
        assert_eq!(m, c10);
        assert_eq!(act(&g, &c10), m);
    }

    #[test]
    fn matrix_text() {
        let g: Mat2 = " [[2, 1], [ 1,1]] ".parse().unwrap();
        assert_eq!(g.to_string(), "[[2,1],[1,1]]");
        assert_eq!("[[2,1],[1,2]]".parse::<Mat2>(), Err(Error::Determinant(3)));
        assert!(matches!("[[1,0],[0]]".parse::<Mat2>(), Err(Error::Syntax(_))));
        assert!(matches!("[1,0,0,1]".parse::<Mat2>(), Err(Error::Syntax(_))));
    }

    #[test]
    fn lifts_reduce_correctly() {
        for n in 1..=12 {
            for g in enumerate_sl2_mod_n(n) {
                assert_eq!(g.lift().reduce(n), g);
            }
        }
    }

    #[test]
    fn coprime_lifts() {
        assert_eq!(lift_coprime(0, 0, 1), (0, 1));
        assert_eq!(lift_coprime(0, 1, 5), (0, 1));
        assert_eq!(lift_coprime(2, 0, 3), (2, 3));
        assert_eq!(lift_coprime(-1, 3, 3), (2, 3));
        assert_eq!(lift_coprime(4, 6, 9), (13, 6));
    }

    mod props {
        use super::*;
        use crate::level::Level;
        use proptest::prelude::*;

        fn mat() -> impl Strategy<Value = Mat2> {
            (1u32..=7, any::<prop::sample::Index>()).prop_map(|(n, i)| {
                let all = enumerate_sl2_mod_n(n);
                all[i.index(all.len())].lift()
            })
        }

        fn quad(max_n: u32) -> impl Strategy<Value = Quad> {
            (2..=max_n).prop_flat_map(|n| {
                let len = Level::new(n).len();
                proptest::sample::subsequence((0..len as u16).collect::<Vec<_>>(), 4).prop_map(move |ix| {
                    let lv = Level::new(n);
                    lv.quad([ix[0], ix[1], ix[2], ix[3]])
                })
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(1000))]

            #[test]
            fn action_laws(g1 in mat(), g2 in mat(), s in quad(12)) {
                prop_assert_eq!(act(&Mat2::IDENTITY, &s), s);
                let g12 = g1.checked_mul(&g2).unwrap();
                prop_assert_eq!(act(&g12, &s), act(&g1, &act(&g2, &s)));
                prop_assert_eq!(act(&g1.neg(), &s), act(&g1, &s));
                prop_assert_eq!(act(&g1, &s).common_order(), s.common_order());
                let n = s.common_order() as u32;
                prop_assert_eq!(act_mod(&g1.reduce(n), &s), act(&g1, &s));
                prop_assert_eq!(act(&g1.inverse(), &act(&g1, &s)), s);
            }

            #[test]
            fn minimal_representative_is_idempotent(s in quad(8)) {
                let (m, g) = minimal_representative(&s);
                prop_assert_eq!(act(&g, &s), m);
                prop_assert!(m <= s);
                prop_assert_eq!(minimal_representative(&m).0, m);
            }
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(200))]

            #[test]
            fn stabilizers_are_subgroups(s in quad(6)) {
                let st = stabilizer_gamma_s(&s);
                prop_assert!(st.is_subgroup());
                prop_assert!(st.contains(&Mat2ModN::minus_identity(st.n())));
            }
        }
    }
}
