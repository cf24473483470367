//! Linear sets as projections of subgeometries.

use crate::error::{Error, Result};
use crate::gf::Field;
use crate::linalg::{self, Matrix};
use crate::projspace::ProjSubspace;
use crate::reduction::ReductionContext;

use super::LinearSet;

/// Projection of a subgeometry PG(k-1, q) of PG(k-1, q^t) from a center
/// onto a screen.
#[derive(Clone, Debug)]
pub struct ProjectionSpec {
    /// `F_q`, as a subfield view of the tower of `F_{q^t}`.
    pub small: Field,
    /// The center `Ω*`, of projective dimension `k - r - 1`.
    pub center: ProjSubspace,
    /// The screen `Ω`, of projective dimension `r - 1`.
    pub screen: ProjSubspace,
    /// Rows `b_i` with `Σ = { x B : x ∈ F_q^k }`; the canonical subgeometry
    /// when this is the identity.
    pub frame: Matrix,
}

impl ProjectionSpec {
    /// Projection of the canonical subgeometry.
    pub fn canonical(small: &Field, center: ProjSubspace, screen: ProjSubspace) -> Self {
        let k = screen.ambient_n();
        ProjectionSpec {
            small: small.clone(),
            center,
            screen,
            frame: linalg::identity(k),
        }
    }
}

/// The image `Γ` of the subgeometry together with its description as `B(U)`.
#[derive(Clone, Debug)]
pub struct Projection {
    /// Projected points in screen coordinates, sorted and distinct.
    pub gamma: Vec<Vec<u32>>,
    pub linear_set: LinearSet,
    /// `<Γ> = Ω`.
    pub spans_screen: bool,
}

/// Projects `Σ` from `Ω*` onto `Ω`, expressing image points in the
/// coordinates given by the rows of `Ω`.
pub fn project_subgeometry(spec: &ProjectionSpec) -> Result<Projection> {
    let big = spec.screen.field().clone();
    let f = big.tower();
    let k = spec.screen.ambient_n();
    let r = spec.screen.rank();
    if spec.center.ambient_n() != k || spec.frame.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: spec.center.ambient_n(),
        });
    }
    if spec.center.rank() + r != k || !spec.center.meet(&spec.screen)?.is_empty() {
        return Err(Error::Precondition(
            "center and screen must be complementary".into(),
        ));
    }
    if linalg::determinant(f, &spec.frame) == 0 {
        return Err(Error::Singular);
    }
    let ctx = ReductionContext::with_tower(f, r, spec.small.degree())?;
    let mut basis = spec.center.rows().clone();
    basis.extend(spec.screen.rows().iter().cloned());
    let c = spec.center.rank();
    let screen_coords = |v: &[u32]| -> Vec<u32> {
        let coeffs = linalg::combination(f, &basis, v).expect("center and screen span");
        coeffs[c..].to_vec()
    };

    let sigma = ProjSubspace::whole(&spec.small, k);
    let mut gamma = Vec::new();
    let mut err = None;
    sigma.for_each_point(|x| {
        let v = linalg::vec_mat(f, x, &spec.frame);
        let mut y = screen_coords(&v);
        if linalg::normalize(f, &mut y).is_err() {
            err.get_or_insert_with(|| {
                Error::Precondition(format!(
                    "subgeometry point {:?} lies in the center",
                    v
                ))
            });
            return;
        }
        gamma.push(y);
    });
    if let Some(e) = err {
        return Err(e);
    }
    gamma.sort();
    gamma.dedup();

    let gens: Vec<Vec<u32>> = spec
        .frame
        .iter()
        .map(|b| ctx.reduce_vector(&screen_coords(b)))
        .collect();
    let u = ProjSubspace::canonical(ctx.small(), ctx.n(), &gens)?;
    if u.rank() != k {
        return Err(Error::Invariant(format!(
            "projected subspace has rank {} instead of {k}",
            u.rank()
        )));
    }
    let linear_set = LinearSet::new(&ctx, &u)?;
    if linear_set.point_set() != gamma {
        return Err(Error::Invariant(
            "pointwise projection differs from B(U)".into(),
        ));
    }
    let spans_screen = linalg::rank(f, &gamma) == r;
    Ok(Projection {
        gamma,
        linear_set,
        spans_screen,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldTower;

    #[test]
    fn empty_center_gives_subgeometry() {
        let t = FieldTower::of_order(8).unwrap();
        let big = t.full();
        let small = t.subfield(1).unwrap();
        let spec = ProjectionSpec::canonical(
            &small,
            ProjSubspace::empty(&big, 2),
            ProjSubspace::whole(&big, 2),
        );
        let p = project_subgeometry(&spec).unwrap();
        assert_eq!(p.gamma.len(), 3);
        assert!(p.spans_screen);
        assert!(p.linear_set.is_scattered());
    }

    #[test]
    fn plane_onto_line() {
        let t = FieldTower::of_order(8).unwrap();
        let big = t.full();
        let small = t.subfield(1).unwrap();
        let g = t.generator();
        let center = ProjSubspace::point(&big, &[1, g, t.mul(g, g)]).unwrap();
        let screen =
            ProjSubspace::canonical(&big, 3, &[vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        let p = project_subgeometry(&ProjectionSpec::canonical(&small, center, screen)).unwrap();
        assert_eq!(p.linear_set.rank(), 3);
        assert!(p.gamma.len() <= 7);
        let rational = ProjSubspace::point(&big, &[1, 1, 0]).unwrap();
        let screen =
            ProjSubspace::canonical(&big, 3, &[vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        assert!(project_subgeometry(&ProjectionSpec::canonical(&small, rational, screen)).is_err());
    }
}
