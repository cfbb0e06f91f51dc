//! Exhaustive search for quadruples that are not good, and the table of
//! families they are expected to fall into.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::goodness::{
    covers_z, good_quad, harmonic_sum, has_canonical_shape, progression_data, quick_witness, residue_witness, Goodness,
};
use crate::level::{permute_key, Level};
use crate::rat::Rat;
use crate::sl2::{enumerate_sl2_mod_n, Mat2ModN};
use crate::torsion::Quad;

/// The value of the sextic invariant on a family with constant image.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ConstantTag {
    #[serde(rename = "27/4")]
    TwentySevenQuarters,
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1/2")]
    Half,
    #[serde(rename = "8/3")]
    EightThirds,
}

impl ConstantTag {
    pub const ALL: [ConstantTag; 4] =
        [ConstantTag::TwentySevenQuarters, ConstantTag::Zero, ConstantTag::Half, ConstantTag::EightThirds];

    pub fn value(self) -> f64 {
        match self {
            ConstantTag::TwentySevenQuarters => 27.0 / 4.0,
            ConstantTag::Zero => 0.0,
            ConstantTag::Half => 0.5,
            ConstantTag::EightThirds => 8.0 / 3.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ConstantTag::TwentySevenQuarters => "27/4",
            ConstantTag::Zero => "0",
            ConstantTag::Half => "1/2",
            ConstantTag::EightThirds => "8/3",
        }
    }

    /// The tag within `tol` of a complex value, if any.
    pub fn matching(re: f64, im: f64, tol: f64) -> Option<ConstantTag> {
        ConstantTag::ALL.into_iter().find(|t| (re - t.value()).hypot(im) < tol)
    }
}

impl fmt::Display for ConstantTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyMember {
    /// Case number, 1 through 11.
    pub case: u8,
    /// The parameter `a` (case 1) or `b` (case 2).
    #[serde(serialize_with = "ser_opt_rat")]
    pub param: Option<Rat>,
    pub quad: Quad,
    pub constant: ConstantTag,
}

fn ser_opt_rat<S: serde::Serializer>(v: &Option<Rat>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(r) => s.serialize_str(&r.to_string()),
        None => s.serialize_none(),
    }
}

impl FamilyMember {
    pub fn order(&self) -> u64 {
        self.quad.common_order()
    }

    pub fn name(&self) -> String {
        match (self.case, self.param) {
            (1, Some(a)) => format!("case 1 (a = {a})"),
            (2, Some(b)) => format!("case 2 (b = {b})"),
            (k, _) => format!("case {k}"),
        }
    }
}

const SPORADIC: [(u8, &str, ConstantTag); 9] = [
    (3, "0,1/3;1/3,0;1/3,1/3;1/3,2/3", ConstantTag::Zero),
    (4, "0,1/4;1/4,0;1/4,1/4;1/4,1/2", ConstantTag::Half),
    (5, "0,1/4;1/2,0;1/2,1/4;1/2,1/2", ConstantTag::TwentySevenQuarters),
    (6, "0,1/6;1/6,0;1/6,1/6;1/3,2/3", ConstantTag::Zero),
    (7, "0,1/6;1/6,0;1/6,1/3;1/3,5/6", ConstantTag::EightThirds),
    (8, "0,1/6;1/3,0;1/3,1/6;1/3,1/3", ConstantTag::EightThirds),
    (9, "0,1/6;1/3,1/6;1/3,1/2;1/3,5/6", ConstantTag::Zero),
    (10, "0,1/8;1/4,1/8;1/4,3/8;1/2,1/8", ConstantTag::Half),
    (11, "0,1/12;1/3,1/12;1/3,11/12;1/2,1/4", ConstantTag::Zero),
];

/// `{(0,a), (0,1/4), (0,1/2−a), (1/2,1/4)}`.
pub fn case1(a: Rat) -> Quad {
    let q = Rat::new(1, 4).unwrap();
    Quad::from_pairs([(Rat::ZERO, a), (Rat::ZERO, q), (Rat::ZERO, Rat::HALF - a), (Rat::HALF, q)])
        .expect("case 1 points are distinct")
}

/// `{(0,b), (1/4,0), (1/4,1/2), (1/2,b)}`.
pub fn case2(b: Rat) -> Quad {
    let q = Rat::new(1, 4).unwrap();
    Quad::from_pairs([(Rat::ZERO, b), (q, Rat::ZERO), (q, Rat::HALF), (Rat::HALF, b)])
        .expect("case 2 points are distinct")
}

pub struct FamilyTable;

impl FamilyTable {
    pub fn sporadic() -> Vec<FamilyMember> {
        SPORADIC
            .iter()
            .map(|&(case, text, constant)| FamilyMember {
                case,
                param: None,
                quad: text.parse().expect("table entry parses"),
                constant,
            })
            .collect()
    }

    /// Every member of the table whose common order is at most `max_order`,
    /// sorted by quad.
    pub fn instantiate(max_order: u64) -> Vec<FamilyMember> {
        let mut out: Vec<FamilyMember> = FamilyTable::sporadic();
        let tag = ConstantTag::TwentySevenQuarters;
        let mut a_values = vec![Rat::ZERO];
        // lcm(2r, 4) ≥ 2r bounds the parameter range
        a_values.extend((3..).take_while(|r| 2 * r <= max_order as i64).map(|r| Rat::new(1, 2 * r).unwrap()));
        out.extend(a_values.into_iter().map(|a| FamilyMember {
            case: 1,
            param: Some(a),
            quad: case1(a),
            constant: tag,
        }));
        out.extend(
            (2..)
                .take_while(|r| 2 * r <= max_order as i64)
                .map(|r| Rat::new(1, 2 * r).unwrap())
                .map(|b| FamilyMember { case: 2, param: Some(b), quad: case2(b), constant: tag }),
        );
        out.retain(|m| m.order() <= max_order);
        out.sort_by_key(|m| m.quad);
        out
    }

    /// The table entry equal to `quad`, which must be a minimal representative.
    pub fn lookup(quad: &Quad) -> Option<FamilyMember> {
        FamilyTable::instantiate(quad.common_order()).into_iter().find(|m| m.quad == *quad)
    }
}

/// Elements of `SL₂(Z/n)` up to sign.
fn psl_elements(n: u32) -> Vec<Mat2ModN> {
    enumerate_sl2_mod_n(n).into_iter().filter(|g| *g <= g.neg()).collect()
}

fn lcm_order(lv: &Level, key: &[u16; 4]) -> u32 {
    key.iter().fold(1u32, |acc, &i| acc.lcm(&lv.order(i)))
}

/// Orbit minima among the quads of exact common order `n`, as level keys.
fn minimal_keys(lv: &Level, perms: &[Vec<u16>]) -> Vec<[u16; 4]> {
    let n = lv.n();
    let len = lv.len() as u16;
    let mut seen: HashSet<[u16; 4]> = HashSet::new();
    let mut out = Vec::new();
    // Lexicographic iteration: the first unseen member of an orbit is its minimum.
    for i in 0..len {
        for j in i + 1..len {
            for k in j + 1..len {
                for l in k + 1..len {
                    let key = [i, j, k, l];
                    if lcm_order(lv, &key) != n || seen.contains(&key) {
                        continue;
                    }
                    out.push(key);
                    for p in perms {
                        seen.insert(permute_key(p, key));
                    }
                }
            }
        }
    }
    out
}

/// All orbit minima whose common order is exactly `n`, in increasing order.
pub fn enumerate_minimal_quads(n: u32) -> Vec<Quad> {
    let lv = Level::new(n);
    let perms: Vec<Vec<u16>> = psl_elements(n).iter().map(|g| lv.permutation(g)).collect();
    minimal_keys(&lv, &perms).into_iter().map(|k| lv.quad(k)).collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ClassifyStats {
    pub max_order: u32,
    pub minimal_quads: usize,
    pub quick_good: usize,
    pub pruned: usize,
    pub full_scans: usize,
    pub not_good: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Classified {
    pub quad: Quad,
    pub order: u64,
    pub status: Goodness,
}

enum Decision {
    Quick,
    Pruned,
    Scanned(bool),
}

fn decide(lv: &Level, key: [u16; 4], prune: bool) -> Decision {
    let n = lv.n();
    let pairs = key.map(|i| lv.pair(i));
    if quick_witness(&pairs, n).is_some() {
        return Decision::Quick;
    }
    if prune {
        let quad = lv.quad(key);
        if has_canonical_shape(&quad) {
            let pd = progression_data(&quad).expect("shape checked");
            if harmonic_sum(&pd) < Rat::ONE || !covers_z(&pd) {
                return Decision::Pruned;
            }
        }
    }
    Decision::Scanned(residue_witness(&pairs, n).is_some())
}

/// The orbit minima of common order in `2..=max_order` that are not good.
///
/// With `prune`, a minimum of the canonical shape whose progressions fail to
/// cover `Z` (or have harmonic sum below 1) is skipped as good without a
/// full residue scan.
pub fn classify(max_order: u32, prune: bool) -> (Vec<Classified>, ClassifyStats) {
    let mut stats = ClassifyStats { max_order, ..Default::default() };
    let mut found = Vec::new();
    for n in 2..=max_order {
        let lv = Level::new(n);
        let perms: Vec<Vec<u16>> = psl_elements(n).par_iter().map(|g| lv.permutation(g)).collect();
        let keys = minimal_keys(&lv, &perms);
        let decisions: Vec<Decision> = keys.par_iter().map(|&k| decide(&lv, k, prune)).collect();
        stats.minimal_quads += keys.len();
        for (key, d) in keys.into_iter().zip(decisions) {
            match d {
                Decision::Quick => stats.quick_good += 1,
                Decision::Pruned => stats.pruned += 1,
                Decision::Scanned(good) => {
                    stats.full_scans += 1;
                    if !good {
                        let quad = lv.quad(key);
                        debug_assert_eq!(good_quad(&quad), Goodness::NotGood);
                        found.push(Classified { quad, order: n as u64, status: Goodness::NotGood });
                    }
                }
            }
        }
    }
    found.sort_by_key(|c| c.quad);
    stats.not_good = found.len();
    (found, stats)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatchReport {
    pub max_order: u64,
    pub pass: bool,
    pub expected: usize,
    pub found: usize,
    pub missing: Vec<Quad>,
    pub extra: Vec<Quad>,
}

/// Compares search results with the family table instantiated at `max_order`.
pub fn match_family_table(results: &[Quad], max_order: u64) -> MatchReport {
    let expected: BTreeSet<Quad> = FamilyTable::instantiate(max_order).into_iter().map(|m| m.quad).collect();
    let found: BTreeSet<Quad> = results.iter().copied().collect();
    let missing: Vec<Quad> = expected.difference(&found).copied().collect();
    let extra: Vec<Quad> = found.difference(&expected).copied().collect();
    MatchReport {
        max_order,
        pass: missing.is_empty() && extra.is_empty() && found.len() == results.len(),
        expected: expected.len(),
        found: results.len(),
        missing,
        extra,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sl2::minimal_representative;

    #[test]
    fn small_levels() {
        assert!(enumerate_minimal_quads(1).is_empty());
        let two = enumerate_minimal_quads(2);
        assert_eq!(two, vec!["0,0;0,1/2;1/2,0;1/2,1/2".parse().unwrap()]);
    }

    #[test]
    fn level_three_by_brute_force() {
        // every 4-subset of order-3 level points, reduced by the slow path
        let lv = Level::new(3);
        let mut minima = BTreeSet::new();
        let len = lv.len() as u16;
        for i in 0..len {
            for j in i + 1..len {
                for k in j + 1..len {
                    for l in k + 1..len {
                        let q = lv.quad([i, j, k, l]);
                        if q.common_order() == 3 {
                            minima.insert(minimal_representative(&q).0);
                        }
                    }
                }
            }
        }
        let fast: BTreeSet<Quad> = enumerate_minimal_quads(3).into_iter().collect();
        assert_eq!(fast, minima);
    }

    #[test]
    fn table_sizes() {
        assert_eq!(FamilyTable::instantiate(12).len(), 17);
        assert_eq!(FamilyTable::instantiate(5).len(), 5);
        assert_eq!(FamilyTable::instantiate(2).len(), 0);
        let orders: Vec<u64> = FamilyTable::sporadic().iter().map(|m| m.order()).collect();
        assert_eq!(orders, vec![3, 4, 4, 6, 6, 6, 6, 8, 12]);
    }

    #[test]
    fn table_entries_are_minimal_and_inequivalent() {
        let table = FamilyTable::instantiate(12);
        for m in &table {
            assert_eq!(minimal_representative(&m.quad).0, m.quad, "{}", m.name());
            assert_eq!(good_quad(&m.quad), Goodness::NotGood, "{}", m.name());
        }
        let quads: BTreeSet<Quad> = table.iter().map(|m| m.quad).collect();
        assert_eq!(quads.len(), table.len());
    }

    #[test]
    fn classify_small_bounds() {
        let (r2, _) = classify(2, true);
        assert!(r2.is_empty());
        assert!(match_family_table(&[], 2).pass);
        let (r5, _) = classify(5, true);
        let quads: Vec<Quad> = r5.iter().map(|c| c.quad).collect();
        let rep = match_family_table(&quads, 5);
        assert!(rep.pass, "{rep:?}");
        assert_eq!(quads.len(), 5);
    }

    #[test]
    fn pruning_agrees_up_to_eight() {
        let (a, sa) = classify(8, true);
        let (b, sb) = classify(8, false);
        assert_eq!(a, b);
        assert_eq!(sa.minimal_quads, sb.minimal_quads);
        assert_eq!(sb.pruned, 0);
    }

    #[test]
    fn fault_injection_reports_missing() {
        let table = FamilyTable::instantiate(12);
        let c10 = FamilyTable::sporadic()[7].quad;
        let without: Vec<Quad> = table.iter().map(|m| m.quad).filter(|q| *q != c10).collect();
        let rep = match_family_table(&without, 12);
        assert!(!rep.pass);
        assert_eq!(rep.missing, vec![c10]);
        assert!(rep.extra.is_empty());
    }

    #[test]
    fn tags() {
        assert_eq!(ConstantTag::matching(6.75, 0.0, 1e-9), Some(ConstantTag::TwentySevenQuarters));
        assert_eq!(ConstantTag::matching(0.5, 1e-6, 1e-9), None);
        assert_eq!(FamilyTable::lookup(&case2(Rat::new(1, 6).unwrap())).unwrap().case, 2);
    }
}
