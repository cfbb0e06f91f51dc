//! Integer model of the points of `R` whose order divides a fixed level `n`.
//!
//! A point `(x/n, y/n)` is stored as its `±`-canonical integer pair. For
//! canonical pairs, comparing `(x, y)` lexicographically is the same as
//! comparing the rational points, so point indices follow the order of `R`.

use num_integer::Integer;

use crate::sl2::Mat2ModN;
use crate::torsion::{Quad, TorsionCoord};

/// Canonical representative of `±(x, y)` in `(Z/n)²`.
pub fn canonical(n: u32, x: u32, y: u32) -> (u32, u32) {
    let (x, y) = (x % n, y % n);
    let neg = |v: u32| (n - v) % n;
    if 2 * x == n || x == 0 {
        (x, y.min(neg(y)))
    } else if 2 * x < n {
        (x, y)
    } else {
        (n - x, neg(y))
    }
}

pub struct Level {
    n: u32,
    points: Vec<(u32, u32)>,
    index: Vec<u16>,
}

impl Level {
    pub fn new(n: u32) -> Level {
        assert!(n >= 1, "level must be positive");
        let mut points: Vec<(u32, u32)> = (0..n).flat_map(|x| (0..n).map(move |y| canonical(n, x, y))).collect();
        points.sort_unstable();
        points.dedup();
        assert!(points.len() < u16::MAX as usize, "level {n} too large");
        let mut index = vec![0u16; (n * n) as usize];
        for x in 0..n {
            for y in 0..n {
                let c = canonical(n, x, y);
                let i = points.binary_search(&c).expect("canonical point listed");
                index[(x * n + y) as usize] = i as u16;
            }
        }
        Level { n, points, index }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn pair(&self, i: u16) -> (u32, u32) {
        self.points[i as usize]
    }

    pub fn coord(&self, i: u16) -> TorsionCoord {
        let (x, y) = self.pair(i);
        TorsionCoord::from_scaled(x as u64, y as u64, self.n as u64)
    }

    pub fn index_of(&self, x: u32, y: u32) -> u16 {
        let n = self.n;
        self.index[((x % n) * n + y % n) as usize]
    }

    /// Index of `p`, or `None` if the order of `p` does not divide `n`.
    pub fn index_of_coord(&self, p: &TorsionCoord) -> Option<u16> {
        let n = self.n as u64;
        if !n.is_multiple_of(p.order()) {
            return None;
        }
        let (x, y) = p.scaled(n);
        Some(self.index_of(x as u32, y as u32))
    }

    /// Order of the point with index `i`.
    pub fn order(&self, i: u16) -> u32 {
        let (x, y) = self.pair(i);
        self.n / x.gcd(&y).gcd(&self.n)
    }

    /// The permutation of point indices induced by `g`.
    pub fn permutation(&self, g: &Mat2ModN) -> Vec<u16> {
        debug_assert_eq!(g.n(), self.n);
        let n = self.n as u64;
        let [a, b, c, d] = g.entries().map(u64::from);
        self.points
            .iter()
            .map(|&(x, y)| {
                let (x, y) = (x as u64, y as u64);
                self.index_of(((a * x + b * y) % n) as u32, ((c * x + d * y) % n) as u32)
            })
            .collect()
    }

    pub fn quad_key(&self, q: &Quad) -> Option<[u16; 4]> {
        let mut key = [0u16; 4];
        for (k, p) in key.iter_mut().zip(q.points()) {
            *k = self.index_of_coord(p)?;
        }
        key.sort_unstable();
        Some(key)
    }

    pub fn quad(&self, key: [u16; 4]) -> Quad {
        Quad::new(key.map(|i| self.coord(i))).expect("distinct indices give distinct points")
    }
}

/// Applies a point permutation to a sorted key, returning the sorted image.
pub fn permute_key(perm: &[u16], key: [u16; 4]) -> [u16; 4] {
    let mut out = key.map(|i| perm[i as usize]);
    out.sort_unstable();
    out
}
