//! Linear sets `B(U)` of PG(r-1, q^t) defined by F_q-subspaces `U` of
//! `F_{q^t}^r`, viewed as subspaces of PG(rt-1, q) through field reduction.

mod equivalence;
mod line;
mod projection;
mod pseudo;

pub use equivalence::{
    canonical_form, equivalence_classes, orbit_classes, CanonicalForm, CenterOrbits,
    EquivalenceClass, EquivalenceReport, Family, GroupKind,
};
pub use line::{
    intersect_linear_sets, intersect_subgeometries, subline_through, Intersection, Subgeometry,
    SubgeometryDecomposition,
};
pub use projection::{project_subgeometry, Projection, ProjectionSpec};
pub use pseudo::{build_l_rho_f, pseudoregulus_of, LRhoF, Pseudoregulus};

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::linalg;
use crate::projspace::{PointCodec, ProjSubspace, SemilinearMap};
use crate::reduction::ReductionContext;

/// A point of a linear set with its weight.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct WeightedPoint {
    pub point: Vec<u32>,
    pub weight: u32,
}

/// The linear set `B(U)`.
#[derive(Clone, Debug)]
pub struct LinearSet {
    ctx: ReductionContext,
    u: ProjSubspace,
    points: Vec<WeightedPoint>,
}

fn q_number(q: u64, i: u32) -> u64 {
    (q.pow(i) - 1) / (q - 1)
}

impl LinearSet {
    /// Builds `B(U)` by sending every point of `U` to the point of
    /// PG(r-1, q^t) whose reduction contains it.
    pub fn new(ctx: &ReductionContext, u: &ProjSubspace) -> Result<Self> {
        if u.is_empty() {
            return Err(Error::Precondition("linear set of an empty subspace".into()));
        }
        if u.ambient_n() != ctx.n() {
            return Err(Error::DimensionMismatch {
                expected: ctx.n(),
                got: u.ambient_n(),
            });
        }
        let u = u.over(ctx.small())?;
        let codec = PointCodec::new(ctx.big(), ctx.r());
        let mut counts: HashMap<u64, u64> = HashMap::new();
        u.for_each_point(|w| {
            let v = ctx.unreduce_vector(w).expect("length checked");
            *counts.entry(codec.encode(&v)).or_default() += 1;
        });
        let q = ctx.q() as u64;
        let mut points = Vec::with_capacity(counts.len());
        for (idx, c) in counts {
            let weight = (1..=ctx.t() as u32)
                .find(|&w| q_number(q, w) == c)
                .ok_or_else(|| {
                    Error::Invariant(format!("point meets U in {c} points, not a subspace"))
                })?;
            points.push(WeightedPoint {
                point: codec.decode(idx),
                weight,
            });
        }
        points.sort();
        Ok(LinearSet {
            ctx: ctx.clone(),
            u,
            points,
        })
    }

    /// `B(U)` for `U` spanned by the reductions of the given vectors of
    /// `F_{q^t}^r` (that is, the F_q-span of the vectors themselves).
    pub fn from_vectors(ctx: &ReductionContext, vectors: &[Vec<u32>]) -> Result<Self> {
        let gens: Vec<Vec<u32>> = vectors.iter().map(|v| ctx.reduce_vector(v)).collect();
        let u = ProjSubspace::canonical(ctx.small(), ctx.n(), &gens)?;
        Self::new(ctx, &u)
    }

    pub fn ctx(&self) -> &ReductionContext {
        &self.ctx
    }

    pub fn subspace(&self) -> &ProjSubspace {
        &self.u
    }

    /// `dim_{F_q} U`.
    pub fn rank(&self) -> usize {
        self.u.rank()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[WeightedPoint] {
        &self.points
    }

    /// Normalized point vectors, sorted.
    pub fn point_set(&self) -> Vec<Vec<u32>> {
        self.points.iter().map(|p| p.point.clone()).collect()
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        let mut v = v.to_vec();
        if linalg::normalize(self.ctx.tower(), &mut v).is_err() {
            return false;
        }
        self.points.binary_search_by(|p| p.point.cmp(&v)).is_ok()
    }

    pub fn weight_of(&self, v: &[u32]) -> Option<u32> {
        let mut v = v.to_vec();
        linalg::normalize(self.ctx.tower(), &mut v).ok()?;
        self.points
            .binary_search_by(|p| p.point.cmp(&v))
            .ok()
            .map(|i| self.points[i].weight)
    }

    /// `(x_1, ..., x_m)`, `m = min(k, t)`.
    pub fn weight_distribution(&self) -> Vec<u64> {
        let m = self.rank().min(self.ctx.t());
        let mut x = vec![0u64; m];
        for p in &self.points {
            x[p.weight as usize - 1] += 1;
        }
        x
    }

    /// Checks the four weight relations of a linear set of rank `k`.
    pub fn weight_identities(&self) -> WeightIdentities {
        let q = self.ctx.q() as u64;
        let k = self.rank() as u32;
        let x = self.weight_distribution();
        let size = self.len() as u64;
        let weighted: u64 = x
            .iter()
            .enumerate()
            .map(|(i, &xi)| xi * q_number(q, i as u32 + 1))
            .sum();
        let bound = q_number(q, k);
        WeightIdentities {
            histogram: x.clone(),
            size,
            size_is_sum: size == x.iter().sum::<u64>(),
            weighted_count: weighted == bound,
            size_bound: size <= bound,
            size_mod_q: size % q == 1 % q,
        }
    }

    pub fn is_scattered(&self) -> bool {
        self.points.iter().all(|p| p.weight == 1)
    }

    /// A scattered linear set of rank above `rt/2` would contradict the
    /// scattered bound; returns false in that case.
    pub fn scattered_bound_holds(&self) -> bool {
        !self.is_scattered() || 2 * self.rank() <= self.ctx.n()
    }

    /// Rank 3 on a projective line with `q^2 + 1` points.
    pub fn is_club(&self) -> bool {
        let q = self.ctx.q() as usize;
        self.ctx.r() == 2 && self.rank() == 3 && self.len() == q * q + 1
    }

    /// Points of PG(rt-1, q) covered by the reductions of the points of `B(U)`.
    pub fn covered_points(&self) -> Vec<bool> {
        let codec = PointCodec::new(self.ctx.small(), self.ctx.n());
        let mut covered = vec![false; codec.len() as usize];
        for p in &self.points {
            let e = self.ctx.reduce_point(&p.point).expect("nonzero point");
            e.for_each_point(|v| covered[codec.encode(v) as usize] = true);
        }
        covered
    }

    /// Same point set as `other`.
    pub fn same_points(&self, other: &LinearSet) -> bool {
        self.points.len() == other.points.len()
            && self
                .points
                .iter()
                .zip(&other.points)
                .all(|(a, b)| a.point == b.point)
    }
}

/// Result of [`LinearSet::weight_identities`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightIdentities {
    pub histogram: Vec<u64>,
    pub size: u64,
    /// `|S| = x_1 + ... + x_m`
    pub size_is_sum: bool,
    /// `Σ x_i (q^i - 1)/(q - 1) = (q^k - 1)/(q - 1)`
    pub weighted_count: bool,
    /// `|S| <= (q^k - 1)/(q - 1)`
    pub size_bound: bool,
    /// `|S| ≡ 1 (mod q)`
    pub size_mod_q: bool,
}

impl WeightIdentities {
    pub fn all_hold(&self) -> bool {
        self.size_is_sum && self.weighted_count && self.size_bound && self.size_mod_q
    }
}

/// Subspaces `π'` through a point with `B(π') = B(π)`.
#[derive(Clone, Debug)]
pub struct AltSubspaces {
    /// Images `π^{φ_ω}` through the point.
    pub scalar_images: Vec<ProjSubspace>,
    /// Every such subspace, found by exhaustive search inside the covered points.
    pub all: Vec<ProjSubspace>,
}

/// The collineation `F_q x -> F_q ω x` of PG(rt-1, q).
pub fn scalar_collineation(ctx: &ReductionContext, omega: u32) -> Result<SemilinearMap> {
    let r = ctx.r();
    let m: Vec<Vec<u32>> = (0..r)
        .map(|i| (0..r).map(|j| if i == j { omega } else { 0 }).collect())
        .collect();
    ctx.blow_up_map(&SemilinearMap::new(ctx.big(), m, 0)?)
}

/// All subspaces of the same dimension as `U` passing through `rp` and
/// defining the same linear set.
pub fn alt_subspaces_through(l: &LinearSet, rp: &[u32], budget: u128) -> Result<AltSubspaces> {
    let ctx = l.ctx();
    if rp.len() != ctx.n() {
        return Err(Error::DimensionMismatch {
            expected: ctx.n(),
            got: rp.len(),
        });
    }
    let src = ctx.source_point(rp)?;
    if !l.contains(&src) {
        return Err(Error::Precondition(
            "point is not covered by the linear set".into(),
        ));
    }
    let r_pt = ProjSubspace::point(ctx.small(), rp)?;

    let mut scalar = BTreeSet::new();
    for &omega in ctx.big().nonzero() {
        let img = scalar_collineation(ctx, omega)?.act(l.subspace())?;
        if img.contains(&r_pt) {
            scalar.insert(img);
        }
    }

    let codec = PointCodec::new(ctx.small(), ctx.n());
    let covered = l.covered_points();
    let candidates: Vec<Vec<u32>> = (0..codec.len())
        .filter(|&i| covered[i as usize])
        .map(|i| codec.decode(i))
        .collect();
    let inside = |s: &ProjSubspace| {
        let mut ok = true;
        s.for_each_point(|v| ok &= covered[codec.encode(v) as usize]);
        ok
    };
    let mut level: BTreeSet<ProjSubspace> = BTreeSet::from([r_pt]);
    for _ in 1..l.rank() {
        let mut next = BTreeSet::new();
        for s in &level {
            for c in &candidates {
                if s.contains_vector(c) {
                    continue;
                }
                let grown = s.span(&ProjSubspace::point(ctx.small(), c)?)?;
                if !next.contains(&grown) && inside(&grown) {
                    next.insert(grown);
                    if next.len() as u128 > budget {
                        return Err(Error::BudgetExceeded {
                            count: next.len() as u128,
                            budget,
                        });
                    }
                }
            }
        }
        level = next;
    }
    let mut all = Vec::new();
    for s in level {
        if LinearSet::new(ctx, &s)?.same_points(l) {
            all.push(s);
        }
    }
    let scalar_images: Vec<ProjSubspace> = scalar.into_iter().collect();
    if let Some(s) = scalar_images.iter().find(|s| !all.contains(s)) {
        return Err(Error::Invariant(format!(
            "scalar image {s:?} does not define the same linear set"
        )));
    }
    Ok(AltSubspaces { scalar_images, all })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_one_is_a_point() {
        let ctx = ReductionContext::new(2, 3, 2).unwrap();
        let l = LinearSet::from_vectors(&ctx, &[vec![1, 5]]).unwrap();
        assert_eq!(l.len(), 1);
        assert_eq!(l.points()[0].weight, 1);
        assert!(l.is_scattered());
    }

    #[test]
    fn full_space_has_weight_t_everywhere() {
        let ctx = ReductionContext::new(2, 2, 3).unwrap();
        let u = ProjSubspace::whole(ctx.small(), 4);
        let l = LinearSet::new(&ctx, &u).unwrap();
        assert_eq!(l.len(), 10);
        assert!(l.points().iter().all(|p| p.weight == 2));
        assert!(l.weight_identities().all_hold());
    }

    #[test]
    fn club_in_pg18() {
        let ctx = ReductionContext::new(2, 3, 2).unwrap();
        let g = ctx.tower().generator();
        // U = {(a, b) : a in F_8, b in F_2} has rank 4; take a rank-3 part
        // containing all of F_8 x {0}'s 2-dim piece plus (0,1).
        let l = LinearSet::from_vectors(&ctx, &[vec![1, 0], vec![g, 0], vec![0, 1]]).unwrap();
        assert_eq!(l.rank(), 3);
        assert!(l.is_club());
        assert_eq!(l.weight_distribution(), vec![4, 1, 0]);
        assert!(!l.is_scattered());
    }

    #[test]
    fn empty_subspace_rejected() {
        let ctx = ReductionContext::new(2, 2, 2).unwrap();
        let u = ProjSubspace::empty(ctx.small(), 4);
        assert!(LinearSet::new(&ctx, &u).is_err());
    }

    #[test]
    fn regulus_has_unique_transversal() {
        let ctx = ReductionContext::new(2, 2, 3).unwrap();
        let l = LinearSet::from_vectors(&ctx, &[vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(l.len(), 4);
        let covered = l.covered_points();
        let codec = PointCodec::new(ctx.small(), 4);
        for i in 0..codec.len() {
            if covered[i as usize] {
                let alt = alt_subspaces_through(&l, &codec.decode(i), 1 << 20).unwrap();
                assert_eq!(alt.all.len(), 1);
            }
        }
    }
}
