//! `Δ_S = {γ : μ_S∘γ = μ_S}` computed from q-expansions, compared with the
//! stabilizer `Γ_S`, and the level-5 partition of the order-5 points.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::qseries::mu_series;
use crate::series::LaurentSeries;
use crate::sl2::{act, act_mod, enumerate_sl2_mod_n, stabilizer_gamma_s, Mat2, Mat2ModN, SubgroupModN};
use crate::torsion::{parse_quad, points_of_level, Quad};

/// Default truncation for `Δ_S`, in powers of `q`.
pub const DELTA_TERMS: i64 = 4;
pub const DELTA_TOL: f64 = 1e-8;

/// How a residue matrix `g` is turned into the quad whose `μ` is `μ_S∘g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// `g^{−T}·S`, the bookkeeping used for `Γ_S`.
    InverseTranspose,
    /// `g·S`.
    Direct,
}

impl Convention {
    fn image(self, g: &Mat2ModN, s: &Quad) -> Quad {
        match self {
            Convention::InverseTranspose => act_mod(&g.inverse_transpose(), s),
            Convention::Direct => act_mod(g, s),
        }
    }
}

/// Coefficientwise agreement on the common known range, relative to the
/// size of the coefficients.
pub fn series_match(a: &LaurentSeries, b: &LaurentSeries, tol: f64) -> bool {
    a.scale() == b.scale() && max_difference(a, b) <= tol * a.max_abs().max(b.max_abs()).max(1.0)
}

fn max_difference(a: &LaurentSeries, b: &LaurentSeries) -> f64 {
    let prec = a.prec().min(b.prec());
    (a - b).truncate(prec).max_abs()
}

fn ser_group<S: Serializer>(g: &SubgroupModN, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(g.iter().map(|m| m.to_string()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeltaReport {
    pub quad: Quad,
    pub n: u32,
    pub terms: i64,
    pub tol: f64,
    pub convention: Convention,
    /// Whether the other convention also satisfied the containment check.
    pub both_conventions_consistent: bool,
    pub gamma_s_order_mod_pm: usize,
    pub delta_s_order_mod_pm: usize,
    #[serde(serialize_with = "ser_group")]
    pub gamma_s: SubgroupModN,
    #[serde(serialize_with = "ser_group")]
    pub delta_s: SubgroupModN,
}

/// The image of `Δ_S` in `SL₂(Z/n)`: residue matrices whose image quad has a
/// `μ` series equal to `μ_S` up to `q^d`.
///
/// The convention is fixed by requiring `Γ_S ⊆ Δ_S` and closure of the
/// result; `g^{−T}` is preferred when both pass.
pub fn delta_s(s: &Quad, d: i64, tol: f64) -> Result<DeltaReport> {
    let n = s.common_order() as u32;
    let group = enumerate_sl2_mod_n(n);
    let base = mu_series(s, d)?;
    let images: BTreeSet<Quad> = group.iter().map(|g| act_mod(g, s)).collect();
    let matches: BTreeMap<Quad, bool> =
        images.into_par_iter().map(|q| Ok((q, series_match(&mu_series(&q, d)?, &base, tol)))).collect::<Result<_>>()?;
    let gamma = stabilizer_gamma_s(s);
    let candidate = |c: Convention| {
        let elems = group.iter().filter(|g| matches[&c.image(g, s)]).copied();
        let delta = SubgroupModN::from_elements(n, elems);
        (gamma.is_subset(&delta) && delta.is_subgroup()).then_some(delta)
    };
    let preferred = candidate(Convention::InverseTranspose);
    let other = candidate(Convention::Direct);
    let both = preferred.is_some() && other.is_some();
    let (convention, delta) = match (preferred, other) {
        (Some(d), _) => (Convention::InverseTranspose, d),
        (None, Some(d)) => (Convention::Direct, d),
        (None, None) => {
            return Err(Error::Convention(format!(
                "no convention gives a subgroup of SL₂(Z/{n}) containing Γ_S for {s}"
            )))
        }
    };
    Ok(DeltaReport {
        quad: *s,
        n,
        terms: d,
        tol,
        convention,
        both_conventions_consistent: both,
        gamma_s_order_mod_pm: gamma.psl_quotient_order(),
        delta_s_order_mod_pm: delta.psl_quotient_order(),
        gamma_s: gamma,
        delta_s: delta,
    })
}

/// `{(0,1/5),(0,2/5),(1/5,0),(2/5,0)}`.
pub fn level_five_quad() -> Quad {
    parse_quad("0,1/5;0,2/5;1/5,0;2/5,0").expect("valid quad")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartitionReport {
    pub quads: Vec<Quad>,
    pub pairwise_disjoint: bool,
    /// The union is exactly the points of `R` of exact order `n`.
    pub covers_order_n: bool,
    pub order_n_points: usize,
    pub mu_equal: bool,
    pub max_mu_difference: f64,
}

/// Checks that `S` and its images under `gs` have equal `μ` series and
/// partition the points of exact order `n`.
pub fn delta_partition(s: &Quad, gs: &[Mat2], d: i64, tol: f64) -> Result<PartitionReport> {
    let n = s.common_order();
    let quads: Vec<Quad> = std::iter::once(*s).chain(gs.iter().map(|g| act(g, s))).collect();
    let mus = quads.iter().map(|q| mu_series(q, d)).collect::<Result<Vec<_>>>()?;
    let mut max_mu_difference: f64 = 0.0;
    let mut mu_equal = true;
    for (i, a) in mus.iter().enumerate() {
        for b in &mus[i + 1..] {
            max_mu_difference = max_mu_difference.max(max_difference(a, b));
            mu_equal &= series_match(a, b, tol);
        }
    }
    let all: Vec<_> = quads.iter().flat_map(|q| q.points().iter().copied()).collect();
    let union: BTreeSet<_> = all.iter().copied().collect();
    let target: BTreeSet<_> = points_of_level(n).into_iter().filter(|p| p.order() == n).collect();
    Ok(PartitionReport {
        pairwise_disjoint: union.len() == all.len(),
        covers_order_n: union == target,
        order_n_points: target.len(),
        mu_equal,
        max_mu_difference,
        quads,
    })
}

/// The three level-5 quads `S`, `(1 2;1 3)·S` and `(1 1;2 3)·S`.
pub fn level_five_partition(d: i64, tol: f64) -> Result<PartitionReport> {
    let gs = [Mat2::new(1, 2, 1, 3)?, Mat2::new(1, 1, 2, 3)?];
    delta_partition(&level_five_quad(), &gs, d, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::FamilyTable;
    use crate::sl2::sl2_order;

    #[test]
    fn level_five_orders() {
        let r = delta_s(&level_five_quad(), DELTA_TERMS, DELTA_TOL).unwrap();
        assert_eq!(r.gamma_s_order_mod_pm, 4);
        assert_eq!(r.delta_s_order_mod_pm, 12);
        assert!(r.gamma_s.is_subset(&r.delta_s));
        assert!(r.delta_s.contains(&Mat2ModN::minus_identity(5)));
    }

    #[test]
    fn constant_families_have_full_delta() {
        for m in FamilyTable::instantiate(6) {
            let r = delta_s(&m.quad, 3, DELTA_TOL).unwrap();
            assert_eq!(r.delta_s.len() as u64, sl2_order(r.n), "{}", m.name());
        }
    }

    #[test]
    fn level_five_partition_holds() {
        let r = level_five_partition(DELTA_TERMS, DELTA_TOL).unwrap();
        assert_eq!(r.order_n_points, 12);
        assert!(r.pairwise_disjoint);
        assert!(r.covers_order_n);
        assert!(r.mu_equal, "{}", r.max_mu_difference);
    }

    #[test]
    fn mismatched_series_do_not_match() {
        let a = mu_series(&level_five_quad(), 3).unwrap();
        let b = mu_series(&parse_quad("0,1/5;0,2/5;1/5,1/5;2/5,3/5").unwrap(), 3).unwrap();
        assert!(series_match(&a, &a, 1e-12));
        assert!(!series_match(&a, &b, DELTA_TOL));
    }
}
