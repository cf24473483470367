//! Sublines, intersections of linear sets and intersections of subgeometries.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::gf::Field;
use crate::linalg::{self, Matrix};
use crate::projspace::ProjSubspace;
use crate::reduction::ReductionContext;

use super::LinearSet;

fn normalized(ctx: &ReductionContext, v: &[u32]) -> Result<Vec<u32>> {
    let mut v = v.to_vec();
    linalg::normalize(ctx.tower(), &mut v)?;
    Ok(v)
}

/// The F_q-subline through three distinct collinear points of PG(r-1, q^t).
///
/// Writing `c = λa + μb`, the map `(x, y) -> xλa + yμb` sends `0, ∞, 1` of
/// PG(1, q^t) to `a, b, c`; the subline is the image of PG(1, q), i.e. the
/// rank-2 linear set of `<λa, μb>_{F_q}`.
pub fn subline_through(
    ctx: &ReductionContext,
    a: &[u32],
    b: &[u32],
    c: &[u32],
) -> Result<LinearSet> {
    let (a, b, c) = (normalized(ctx, a)?, normalized(ctx, b)?, normalized(ctx, c)?);
    if a == b || a == c || b == c {
        return Err(Error::Precondition("subline needs three distinct points".into()));
    }
    let f = ctx.tower();
    let coeffs = linalg::combination(f, &[a.clone(), b.clone()], &c)
        .ok_or_else(|| Error::Precondition("points are not collinear".into()))?;
    let (lambda, mu) = (coeffs[0], coeffs[1]);
    let l = LinearSet::from_vectors(ctx, &[linalg::scale(f, &a, lambda), linalg::scale(f, &b, mu)])?;
    let q = ctx.q() as usize;
    if l.len() != q + 1 || !l.contains(&a) || !l.contains(&b) || !l.contains(&c) {
        return Err(Error::Invariant("subline does not have q+1 points through the inputs".into()));
    }
    Ok(l)
}

/// The common points of two linear sets, with the applicable size bounds.
#[derive(Clone, Debug)]
pub struct Intersection {
    pub points: Vec<Vec<u32>>,
    /// Set when one operand is a subline: the size lies in
    /// `{0, ..., min(q+1, k)} ∪ {q+1}`.
    pub subline_bound: Option<bool>,
    /// Set for two rank-3 linear sets of a line with `q > 3`: at most `2q+2`
    /// common points (`2q+3` for even `q`).
    pub rank3_bound: Option<bool>,
}

impl Intersection {
    pub fn count(&self) -> usize {
        self.points.len()
    }

    pub fn bounds_hold(&self) -> bool {
        self.subline_bound.unwrap_or(true) && self.rank3_bound.unwrap_or(true)
    }
}

fn is_subline(l: &LinearSet) -> bool {
    l.rank() == 2 && l.is_scattered()
}

pub fn intersect_linear_sets(a: &LinearSet, b: &LinearSet) -> Result<Intersection> {
    let (ca, cb) = (a.ctx(), b.ctx());
    if ca.tower() != cb.tower() || ca.r() != cb.r() || ca.q() != cb.q() {
        return Err(Error::FieldMismatch);
    }
    let sa: BTreeSet<Vec<u32>> = a.point_set().into_iter().collect();
    let points: Vec<Vec<u32>> = b
        .point_set()
        .into_iter()
        .filter(|p| sa.contains(p))
        .collect();
    let q = ca.q() as usize;
    let n = points.len();
    let subline_bound = if is_subline(a) || is_subline(b) {
        let k = if is_subline(a) { b.rank() } else { a.rank() };
        Some(n <= (q + 1).min(k) || n == q + 1)
    } else {
        None
    };
    let rank3_bound = if ca.r() == 2 && a.rank() == 3 && b.rank() == 3 && q > 3 {
        let cap = if q.is_multiple_of(2) { 2 * q + 3 } else { 2 * q + 2 };
        Some(n <= cap)
    } else {
        None
    };
    Ok(Intersection {
        points,
        subline_bound,
        rank3_bound,
    })
}

/// A subgeometry `{ x B : x ∈ F_{p^d}^{n+1} }` of PG(n, q).
#[derive(Clone, Debug)]
pub struct Subgeometry {
    pub field: Field,
    pub degree: u32,
    pub frame: Matrix,
}

impl Subgeometry {
    pub fn new(field: &Field, degree: u32, frame: Matrix) -> Result<Self> {
        let f = field.tower();
        if frame.iter().any(|r| r.len() != frame.len()) {
            return Err(Error::DimensionMismatch {
                expected: frame.len(),
                got: frame.first().map_or(0, |r| r.len()),
            });
        }
        if linalg::determinant(f, &frame) == 0 {
            return Err(Error::Singular);
        }
        f.subfield(degree)?;
        Ok(Subgeometry {
            field: field.clone(),
            degree,
            frame,
        })
    }

    pub fn canonical(field: &Field, n: usize, degree: u32) -> Result<Self> {
        Self::new(field, degree, linalg::identity(n))
    }

    /// Normalized points, sorted.
    pub fn points(&self) -> Vec<Vec<u32>> {
        let f = self.field.tower();
        let sub = f.subfield(self.degree).expect("checked at construction");
        let mut out = Vec::new();
        ProjSubspace::whole(&sub, self.frame.len()).for_each_point(|x| {
            let mut v = linalg::vec_mat(f, x, &self.frame);
            linalg::normalize(f, &mut v).expect("frame is invertible");
            out.push(v);
        });
        out.sort();
        out
    }
}

/// Decomposition of `G ∩ G'` into subgeometries of independent subspaces.
#[derive(Clone, Debug)]
pub struct SubgeometryDecomposition {
    pub intersection: Vec<Vec<u32>>,
    pub components: Vec<Vec<Vec<u32>>>,
    /// `gcd` of the two subgeometry degrees.
    pub component_degree: u32,
    /// Each component is a subgeometry of order `p^m` of its span.
    pub components_are_subgeometries: bool,
    /// The spans of the components are independent.
    pub independent: bool,
    /// `k <= (q - 1)/(p^{t'} - 1)`, `t'` the larger degree.
    pub count_bound: bool,
}

impl SubgeometryDecomposition {
    pub fn verified(&self) -> bool {
        self.components_are_subgeometries && self.independent && self.count_bound
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Tests whether `pts` is the full point set of a subgeometry of order
/// `p^m` of its span, by building a frame from the points themselves.
fn is_subgeometry(field: &Field, pts: &[Vec<u32>], m: u32) -> bool {
    let f = field.tower();
    if pts.len() == 1 {
        return true;
    }
    let mut basis: Matrix = Vec::new();
    for p in pts {
        let mut trial = basis.clone();
        trial.push(p.clone());
        if linalg::rank(f, &trial) == trial.len() {
            basis = trial;
        }
    }
    let unit = pts.iter().find_map(|p| {
        let c = linalg::combination(f, &basis, p)?;
        c.iter().all(|&x| x != 0).then_some(c)
    });
    let Some(unit) = unit else {
        return false;
    };
    let scaled: Matrix = basis
        .iter()
        .zip(&unit)
        .map(|(b, &c)| linalg::scale(f, b, c))
        .collect();
    let Ok(sub) = f.subfield(m) else {
        return false;
    };
    let mut expected = Vec::new();
    ProjSubspace::whole(&sub, scaled.len()).for_each_point(|x| {
        let mut v = linalg::vec_mat(f, x, &scaled);
        linalg::normalize(f, &mut v).expect("independent rows");
        expected.push(v);
    });
    expected.sort();
    let mut got = pts.to_vec();
    got.sort();
    expected == got
}

pub fn intersect_subgeometries(g1: &Subgeometry, g2: &Subgeometry) -> Result<SubgeometryDecomposition> {
    if g1.field != g2.field || g1.frame.len() != g2.frame.len() {
        return Err(Error::FieldMismatch);
    }
    let f = g1.field.tower();
    let b: BTreeSet<Vec<u32>> = g2.points().into_iter().collect();
    let inter: Vec<Vec<u32>> = g1.points().into_iter().filter(|p| b.contains(p)).collect();
    let n = inter.len();

    // Two common points belong to the same component iff their line holds a
    // third common point.
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if find(&mut parent, i) == find(&mut parent, j) {
                continue;
            }
            let line = [inter[i].clone(), inter[j].clone()];
            let third = (0..n).any(|k| {
                k != i && k != j && {
                    let mut m = line.to_vec();
                    m.push(inter[k].clone());
                    linalg::rank(f, &m) == 2
                }
            });
            if third {
                let (a, c) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = c;
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<Vec<u32>>> = Default::default();
    for i in 0..n {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(inter[i].clone());
    }
    let mut components: Vec<Vec<Vec<u32>>> = groups.into_values().collect();
    components.sort();

    let m = gcd(g1.degree, g2.degree);
    let components_are_subgeometries = components.iter().all(|c| is_subgeometry(&g1.field, c, m));
    let ranks: usize = components.iter().map(|c| linalg::rank(f, c)).sum();
    let all: Matrix = components.iter().flatten().cloned().collect();
    let independent = all.is_empty() || linalg::rank(f, &all) == ranks;
    let big = g1.degree.max(g2.degree);
    let q = f.order() as u64;
    let cap = (q - 1) / ((f.p() as u64).pow(big) - 1);
    Ok(SubgeometryDecomposition {
        intersection: inter,
        count_bound: components.len() as u64 <= cap,
        components,
        component_degree: m,
        components_are_subgeometries,
        independent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subline_of_pg19() {
        let ctx = ReductionContext::new(2, 2, 3).unwrap();
        let s = subline_through(&ctx, &[1, 0], &[1, 1], &[0, 1]).unwrap();
        let pts = s.point_set();
        assert_eq!(pts, vec![vec![0, 1], vec![1, 0], vec![1, 1], vec![1, 2]]);
        assert!(subline_through(&ctx, &[1, 0], &[1, 0], &[0, 1]).is_err());
    }

    #[test]
    fn q2_subline_is_the_three_points() {
        let ctx = ReductionContext::new(2, 2, 2).unwrap();
        let s = subline_through(&ctx, &[1, 0], &[1, 1], &[0, 1]).unwrap();
        assert_eq!(s.len(), 3);
    }

    #[test]
    fn self_intersection() {
        let ctx = ReductionContext::new(2, 3, 2).unwrap();
        let g = ctx.tower().generator();
        let l = LinearSet::from_vectors(&ctx, &[vec![1, 0], vec![g, 1], vec![0, g]]).unwrap();
        let i = intersect_linear_sets(&l, &l).unwrap();
        assert_eq!(i.points, l.point_set());
    }

    #[test]
    fn subgeometry_self_and_disjoint() {
        let t = crate::gf::FieldTower::of_order(4).unwrap();
        let f = t.full();
        let g = Subgeometry::canonical(&f, 3, 1).unwrap();
        let d = intersect_subgeometries(&g, &g).unwrap();
        assert_eq!(d.components.len(), 1);
        assert!(d.verified());
    }
}
