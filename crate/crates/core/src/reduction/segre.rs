//! The Segre map and the Segre variety S_{l,k}.

use crate::error::{Error, Result};
use crate::gf::Field;
use crate::linalg;
use crate::projspace::ProjSubspace;

use super::ReductionContext;

/// `σ_{l,k}(x, y)`: the normalized point with coordinates `x_i y_j` at
/// position `i (k+1) + j`.
pub fn segre_point(field: &Field, x: &[u32], y: &[u32]) -> Result<Vec<u32>> {
    if x.iter().all(|&a| a == 0) || y.iter().all(|&a| a == 0) {
        return Err(Error::ZeroVector);
    }
    let f = field.tower();
    let mut out: Vec<u32> = x
        .iter()
        .flat_map(|&a| y.iter().map(move |&b| f.mul(a, b)))
        .collect();
    linalg::normalize(f, &mut out)?;
    Ok(out)
}

/// Rank-one test on the `(l+1) x (k+1)` coordinate matrix of `pt`.
pub fn is_on_segre(field: &Field, pt: &[u32], l: usize, k: usize) -> Result<bool> {
    let (rows, cols) = (l + 1, k + 1);
    if pt.len() != rows * cols {
        return Err(Error::DimensionMismatch {
            expected: rows * cols,
            got: pt.len(),
        });
    }
    let m: Vec<Vec<u32>> = pt.chunks(cols).map(|c| c.to_vec()).collect();
    Ok(linalg::rank(field.tower(), &m) == 1)
}

/// Outcome of reducing a set of subgeometry points onto a Segre variety.
#[derive(Clone, Debug)]
pub struct SegreCheck {
    /// The (t-1)-spaces `F(P)`, one per input point.
    pub system: Vec<ProjSubspace>,
    pub points_checked: usize,
    pub points_on_variety: usize,
}

impl SegreCheck {
    pub fn all_on_variety(&self) -> bool {
        self.points_checked == self.points_on_variety
    }
}

/// Reduces points of the canonical subgeometry PG(r-1, q) ⊂ PG(r-1, q^t) and
/// checks that every point of each image lies on S_{r-1,t-1}, reading the
/// coordinate at `i*t + s` as matrix entry `(i, s)`.
pub fn subgeometry_on_segre(ctx: &ReductionContext, points: &[Vec<u32>]) -> Result<SegreCheck> {
    let mut system = Vec::with_capacity(points.len());
    let mut checked = 0;
    let mut on = 0;
    for p in points {
        if let Some(&x) = p.iter().find(|&&x| !ctx.small().contains(x)) {
            return Err(Error::NotInSubfield(x));
        }
        let img = ctx.reduce_point(p)?;
        let mut err = None;
        img.for_each_point(|v| {
            checked += 1;
            match is_on_segre(ctx.small(), v, ctx.r() - 1, ctx.t() - 1) {
                Ok(true) => on += 1,
                Ok(false) => {}
                Err(e) => err = Some(e),
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        system.push(img);
    }
    Ok(SegreCheck {
        system,
        points_checked: checked,
        points_on_variety: on,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldTower;
    use crate::projspace;

    #[test]
    fn segre_examples() {
        let f = FieldTower::of_order(2).unwrap().full();
        assert_eq!(segre_point(&f, &[1, 0], &[1, 0]).unwrap(), vec![1, 0, 0, 0]);
        assert!(!is_on_segre(&f, &[1, 0, 0, 1], 1, 1).unwrap());
        let on = projspace::all_points(&f, 4)
            .iter()
            .filter(|p| is_on_segre(&f, p, 1, 1).unwrap())
            .count();
        assert_eq!(on, 9);
        assert!(segre_point(&f, &[0, 0], &[1, 0]).is_err());
    }

    #[test]
    fn rational_line_lies_on_segre() {
        let ctx = ReductionContext::new(2, 2, 2).unwrap();
        let pts = projspace::all_points(ctx.small(), 2);
        let c = subgeometry_on_segre(&ctx, &pts).unwrap();
        assert_eq!(c.system.len(), 3);
        assert_eq!(c.points_checked, 9);
        assert!(c.all_on_variety());
        assert!(subgeometry_on_segre(&ctx, &[vec![1, 2]]).is_err());
    }
}
