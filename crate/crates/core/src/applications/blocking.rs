//! Blocking sets: exhaustive checks, linear blocking sets and the cone
//! construction.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gf::Field;
use crate::linalg;
use crate::linset::LinearSet;
use crate::projspace::{self, ProjSubspace};
use crate::reduction::ReductionContext;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    BlockingCandidate,
    SemiovalCandidate,
    Cone,
    Base,
}

/// A set of points of PG(n-1, q), stored normalized, sorted and without
/// repetitions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSetInstance {
    field: Field,
    n: usize,
    points: Vec<Vec<u32>>,
    pub role: Role,
}

impl PointSetInstance {
    pub fn new(field: &Field, n: usize, points: &[Vec<u32>], role: Role) -> Result<Self> {
        let mut set = BTreeSet::new();
        for p in points {
            if p.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: p.len(),
                });
            }
            if let Some(&x) = p.iter().find(|&&x| !field.contains(x)) {
                return Err(Error::NotInSubfield(x));
            }
            let mut v = p.clone();
            linalg::normalize(field.tower(), &mut v)?;
            set.insert(v);
        }
        Ok(PointSetInstance {
            field: field.clone(),
            n,
            points: set.into_iter().collect(),
            role,
        })
    }

    pub fn from_subspace(s: &ProjSubspace, role: Role) -> Self {
        PointSetInstance {
            field: s.field().clone(),
            n: s.ambient_n(),
            points: s.points(),
            role,
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> &[Vec<u32>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        let mut v = v.to_vec();
        linalg::normalize(self.field.tower(), &mut v).is_ok() && self.points.binary_search(&v).is_ok()
    }

    pub fn without(&self, v: &[u32]) -> Self {
        let mut out = self.clone();
        out.points.retain(|p| p != v);
        out
    }
}

#[derive(Clone, Debug)]
pub struct BlockingReport {
    /// Projective dimension of the subspaces to be blocked.
    pub k: usize,
    pub size: usize,
    pub subspaces_checked: usize,
    pub blocking: bool,
    /// A `k`-space missing the set.
    pub unblocked: Option<ProjSubspace>,
    /// Set when minimality was requested on a blocking set.
    pub minimal: Option<bool>,
    /// A point whose removal leaves a blocking set.
    pub removable: Option<Vec<u32>>,
    /// `|B| < 3(q^{n-k} + 1)/2`.
    pub small: bool,
    /// Some hyperplane holds exactly `|B| - q^{n-k}` points.
    pub redei: bool,
}

/// Tests whether `b` meets every subspace of projective dimension `k`.
///
/// Minimality is decided exhaustively: `B \ {x}` blocks iff no `k`-space meets
/// `B` in `x` alone, so one sweep over the `k`-spaces settles every point.
pub fn is_blocking(b: &PointSetInstance, k: usize, minimal: bool, budget: u128) -> Result<BlockingReport> {
    let n = b.n;
    if k + 1 >= n {
        return Err(Error::Precondition(format!(
            "{k}-spaces are not proper subspaces of PG({}, q)",
            n - 1
        )));
    }
    let spaces = projspace::enumerate(&b.field, n, k, budget)?;
    // For each k-space: number of points of B in it, and the last such point.
    let hits: Vec<(usize, usize)> = spaces
        .par_iter()
        .map(|s| {
            let mut cnt = 0;
            let mut last = 0;
            for (i, p) in b.points.iter().enumerate() {
                if s.contains_vector(p) {
                    cnt += 1;
                    last = i;
                }
            }
            (cnt, last)
        })
        .collect();
    let unblocked = hits.iter().position(|h| h.0 == 0).map(|i| spaces[i].clone());
    let blocking = unblocked.is_none();
    let (minimal, removable) = if minimal && blocking {
        let mut tangent = vec![false; b.len()];
        for &(cnt, last) in &hits {
            if cnt == 1 {
                tangent[last] = true;
            }
        }
        let removable = tangent.iter().position(|t| !t).map(|i| b.points[i].clone());
        (Some(removable.is_none()), removable)
    } else {
        (None, None)
    };
    let q = b.field.order() as u64;
    let e = (n - 1 - k) as u32;
    let qe = q.pow(e);
    let small = 2 * (b.len() as u64) < 3 * (qe + 1);
    let redei = match (b.len() as u64).checked_sub(qe) {
        Some(target) => projspace::enumerate(&b.field, n, n - 2, budget)?
            .par_iter()
            .any(|h| b.points.iter().filter(|p| h.contains_vector(p)).count() as u64 == target),
        None => false,
    };
    Ok(BlockingReport {
        k,
        size: b.len(),
        subspaces_checked: spaces.len(),
        blocking,
        unblocked,
        minimal,
        removable,
        small,
        redei,
    })
}

/// Number of tangent lines at each point of a planar point set.
pub fn tangent_counts(s: &PointSetInstance) -> Result<Vec<usize>> {
    if s.n != 3 {
        return Err(Error::Precondition("tangent counts are taken in a plane".into()));
    }
    let lines = projspace::enumerate(&s.field, 3, 1, u128::MAX)?;
    let mut counts = vec![0; s.len()];
    for line in &lines {
        let on: Vec<usize> = (0..s.len()).filter(|&i| line.contains_vector(&s.points[i])).collect();
        if let [i] = on[..] {
            counts[i] += 1;
        }
    }
    Ok(counts)
}

/// Every point of the set lies on exactly one tangent line.
pub fn is_semioval(s: &PointSetInstance) -> Result<bool> {
    Ok(!s.is_empty() && tangent_counts(s)?.iter().all(|&c| c == 1))
}

#[derive(Clone, Debug)]
pub struct LinearBlockingSet {
    /// The subspace `π` of PG(nt-1, q), of rank `nt - kt + 1`.
    pub pi: ProjSubspace,
    pub linear_set: LinearSet,
    /// `rank π + kt > nt`, so `π` meets the image of every `(k-1)`-space.
    pub dimension_argument: bool,
    /// Exhaustive check w.r.t. `(k-1)`-spaces of PG(n-1, q^t).
    pub report: BlockingReport,
}

/// `B(π)` for `π` spanned by the reductions of `b_j e_i` taken in the order
/// `j = 0, 1, ...` (and `i = 0..n` within each `j`), `b_j` the basis of
/// `F_{q^t}` over `F_q`, keeping the first `nt - kt + 1`.
pub fn linear_blocking_set(ctx: &ReductionContext, k: usize, budget: u128) -> Result<LinearBlockingSet> {
    let (n, t) = (ctx.r(), ctx.t());
    if k == 0 || k >= n {
        return Err(Error::Precondition(format!(
            "need 1 <= k < n, got k = {k}, n = {n}"
        )));
    }
    let rank = n * t - k * t + 1;
    let basis = ctx.basis().basis();
    let gens: Vec<Vec<u32>> = (0..t)
        .flat_map(|j| (0..n).map(move |i| (i, j)))
        .take(rank)
        .map(|(i, j)| {
            let mut v = vec![0; n];
            v[i] = basis[j];
            v
        })
        .collect();
    let linear_set = LinearSet::from_vectors(ctx, &gens)?;
    let pi = linear_set.subspace().clone();
    let dimension_argument = pi.rank() + k * t > n * t;
    let b = PointSetInstance::new(ctx.big(), n, &linear_set.point_set(), Role::BlockingCandidate)?;
    let report = is_blocking(&b, k - 1, true, budget)?;
    Ok(LinearBlockingSet {
        pi,
        linear_set,
        dimension_argument,
        report,
    })
}

#[derive(Clone, Debug)]
pub struct ConeBlockingSet {
    /// Tangent lines at each base point; not all equal to one.
    pub base_tangents: Vec<usize>,
    pub base_report: BlockingReport,
    /// Points of the cone `K` in PG(nt-1, q).
    pub cone: PointSetInstance,
    /// `B(K)` in PG(n-1, q^t).
    pub blocking_set: PointSetInstance,
    pub report: BlockingReport,
}

impl ConeBlockingSet {
    pub fn minimal_blocking(&self) -> bool {
        self.report.blocking && self.report.minimal == Some(true)
    }
}

/// Cone with vertex `vertex` over a base given in coordinates of the plane
/// `plane`, and its image `B(K)`, checked to be a minimal blocking set w.r.t.
/// `(k-1)`-spaces.
pub fn cone_blocking_set(
    ctx: &ReductionContext,
    k: usize,
    vertex: &ProjSubspace,
    plane: &ProjSubspace,
    base: &PointSetInstance,
    budget: u128,
) -> Result<ConeBlockingSet> {
    let (n, t) = (ctx.r(), ctx.t());
    if k == 0 || k >= n || n * t < k * t + 2 {
        return Err(Error::Precondition(format!("no cone for n = {n}, k = {k}")));
    }
    let small = ctx.small();
    for s in [vertex, plane] {
        if s.ambient_n() != n * t || s.field() != small {
            return Err(Error::Precondition("vertex and plane must lie in PG(nt-1, q)".into()));
        }
    }
    if vertex.rank() != n * t - k * t - 1 {
        return Err(Error::Precondition(format!(
            "vertex must have dimension {}",
            n as isize * t as isize - k as isize * t as isize - 2
        )));
    }
    if plane.rank() != 3 {
        return Err(Error::Precondition("base must lie in a plane".into()));
    }
    if !vertex.meet(plane)?.is_empty() {
        return Err(Error::Precondition("vertex meets the base plane".into()));
    }
    if base.n() != 3 || base.field() != small {
        return Err(Error::Precondition("base must be a point set of PG(2, q)".into()));
    }
    let base_tangents = tangent_counts(base)?;
    if !base.is_empty() && base_tangents.iter().all(|&c| c == 1) {
        return Err(Error::Precondition("base is a semioval".into()));
    }
    let base_report = is_blocking(base, 1, true, budget)?;
    if !base_report.blocking || base_report.minimal != Some(true) {
        return Err(Error::Precondition("base is not a minimal blocking set of its plane".into()));
    }
    let f = ctx.tower();
    let mut cone = BTreeSet::new();
    for p in base.points() {
        let b = linalg::vec_mat(f, p, plane.rows());
        let join = vertex.span(&ProjSubspace::point(small, &b)?)?;
        join.for_each_point(|v| {
            cone.insert(v.to_vec());
        });
    }
    let cone: Vec<Vec<u32>> = cone.into_iter().collect();
    let sources = cone
        .iter()
        .map(|w| ctx.source_point(w))
        .collect::<Result<Vec<_>>>()?;
    let cone = PointSetInstance::new(small, n * t, &cone, Role::Cone)?;
    let blocking_set = PointSetInstance::new(ctx.big(), n, &sources, Role::BlockingCandidate)?;
    let report = is_blocking(&blocking_set, k - 1, true, budget)?;
    Ok(ConeBlockingSet {
        base_tangents,
        base_report,
        cone,
        blocking_set,
        report,
    })
}

/// The points of PG(2, q0) inside PG(2, q), `q0` the subfield of degree `d`.
pub fn subplane(field: &Field, d: u32) -> Result<PointSetInstance> {
    let sub = field.tower().subfield(d)?;
    if !field.contains(sub.primitive()) || sub.order() > field.order() {
        return Err(Error::FieldMismatch);
    }
    let pts = projspace::all_points(&sub, 3);
    PointSetInstance::new(field, 3, &pts, Role::Base)
}

/// The conic `X0 X2 = X1^2` of PG(2, q).
pub fn conic(field: &Field) -> Result<PointSetInstance> {
    let f = field.tower();
    let mut pts = vec![vec![0, 0, 1]];
    for &x in field.elements() {
        pts.push(vec![1, x, f.mul(x, x)]);
    }
    PointSetInstance::new(field, 3, &pts, Role::SemiovalCandidate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldTower;

    fn gf(q: u64) -> Field {
        FieldTower::of_order(q).unwrap().full()
    }

    #[test]
    fn line_of_pg24() {
        let f = gf(4);
        let line = ProjSubspace::canonical(&f, 3, &[vec![1, 0, 0], vec![0, 1, 0]]).unwrap();
        let b = PointSetInstance::from_subspace(&line, Role::BlockingCandidate);
        let r = is_blocking(&b, 1, true, u128::MAX).unwrap();
        assert!(r.blocking && r.minimal == Some(true) && r.redei);
        assert_eq!(r.subspaces_checked, 21);
        let r = is_blocking(&b.without(&[1, 0, 0]), 1, true, u128::MAX).unwrap();
        assert!(!r.blocking);
        assert!(r.unblocked.unwrap().contains_vector(&[1, 0, 0]));
    }

    #[test]
    fn baer_subplane_and_conic() {
        let f = gf(4);
        let baer = subplane(&f, 1).unwrap();
        assert_eq!(baer.len(), 7);
        let r = is_blocking(&baer, 1, true, u128::MAX).unwrap();
        assert!(r.blocking && r.minimal == Some(true) && r.small);
        assert_eq!(tangent_counts(&baer).unwrap(), vec![2; 7]);
        let c = conic(&f).unwrap();
        assert_eq!(c.len(), 5);
        assert!(is_semioval(&c).unwrap());
    }

    #[test]
    fn non_minimal_set_names_a_removable_point() {
        let f = gf(2);
        let line = ProjSubspace::canonical(&f, 3, &[vec![1, 0, 0], vec![0, 1, 0]]).unwrap();
        let mut pts = line.points();
        pts.push(vec![0, 0, 1]);
        let b = PointSetInstance::new(&f, 3, &pts, Role::BlockingCandidate).unwrap();
        let r = is_blocking(&b, 1, true, u128::MAX).unwrap();
        assert_eq!(r.minimal, Some(false));
        assert!(is_blocking(&b.without(r.removable.as_ref().unwrap()), 1, false, u128::MAX)
            .unwrap()
            .blocking);
    }
}
