use fieldred::applications::*;
use fieldred::gf::FieldTower;
use fieldred::projspace::{ProjSubspace, DEFAULT_BUDGET};
use fieldred::reduction::ReductionContext;

fn unit(n: usize, i: usize) -> Vec<u32> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

#[test]
fn rank3_linear_sets_block_lines() {
    for (q, lines, size) in [(2, 21, 7), (3, 91, 13)] {
        let ctx = ReductionContext::new(3, 2, q).unwrap();
        let lb = linear_blocking_set(&ctx, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(lb.pi.rank(), 3);
        assert!(lb.dimension_argument);
        assert_eq!(lb.report.subspaces_checked, lines);
        assert_eq!(lb.linear_set.len(), size);
        assert!(lb.report.blocking);
        assert_eq!(lb.report.minimal, Some(true));
        // exhaustive re-check by removal
        let b = PointSetInstance::new(ctx.big(), 3, &lb.linear_set.point_set(), Role::BlockingCandidate).unwrap();
        for p in b.points() {
            assert!(!is_blocking(&b.without(p), 1, false, DEFAULT_BUDGET).unwrap().blocking);
        }
    }
}

#[test]
fn linear_set_of_larger_rank_blocks_planes() {
    // PG(3, 4) w.r.t. planes: rank 2*4 - 3*2 + 1 = 3
    let ctx = ReductionContext::new(4, 2, 2).unwrap();
    let lb = linear_blocking_set(&ctx, 3, DEFAULT_BUDGET).unwrap();
    assert_eq!(lb.pi.rank(), 3);
    assert!(lb.report.blocking);
}

fn cone_setup() -> (ReductionContext, ProjSubspace, ProjSubspace) {
    let ctx = ReductionContext::new(3, 2, 4).unwrap();
    let small = ctx.small().clone();
    let plane = ProjSubspace::canonical(&small, 6, &[unit(6, 0), unit(6, 1), unit(6, 2)]).unwrap();
    let vertex = ProjSubspace::point(&small, &unit(6, 5)).unwrap();
    (ctx, vertex, plane)
}

#[test]
fn cone_over_baer_subplane_is_minimal() {
    let (ctx, vertex, plane) = cone_setup();
    let base = subplane(ctx.small(), 1).unwrap();
    let c = cone_blocking_set(&ctx, 2, &vertex, &plane, &base, DEFAULT_BUDGET).unwrap();
    assert_eq!(c.base_tangents, vec![2; 7]);
    assert_eq!(c.cone.len(), 7 * 4 + 1);
    assert_eq!(c.report.subspaces_checked, 273);
    assert!(c.minimal_blocking());
    for p in c.blocking_set.points() {
        assert!(!is_blocking(&c.blocking_set.without(p), 1, false, DEFAULT_BUDGET).unwrap().blocking);
    }
}

#[test]
fn cone_over_line_is_minimal() {
    let (ctx, vertex, plane) = cone_setup();
    let line = ProjSubspace::canonical(ctx.small(), 3, &[unit(3, 0), unit(3, 1)]).unwrap();
    let base = PointSetInstance::from_subspace(&line, Role::Base);
    let c = cone_blocking_set(&ctx, 2, &vertex, &plane, &base, DEFAULT_BUDGET).unwrap();
    assert!(c.minimal_blocking());
}

#[test]
fn cone_rejects_conic_and_bad_vertex() {
    let (ctx, vertex, plane) = cone_setup();
    let c = conic(ctx.small()).unwrap();
    let err = cone_blocking_set(&ctx, 2, &vertex, &plane, &c, DEFAULT_BUDGET).unwrap_err();
    assert!(err.to_string().contains("semioval"));
    let base = subplane(ctx.small(), 1).unwrap();
    let bad = ProjSubspace::point(ctx.small(), &unit(6, 0)).unwrap();
    assert!(cone_blocking_set(&ctx, 2, &bad, &plane, &base, DEFAULT_BUDGET).is_err());
}

#[test]
fn dickson_81() {
    let k = FieldTower::of_order(9).unwrap();
    let tbl = SemifieldTable::dickson(&k, 1).unwrap();
    assert_eq!(tbl.order(), 81);
    let r = check_semifield(&tbl);
    assert!(r.is_semifield());
    assert_eq!(r.identity, Some(1));
    assert!(r.is_proper(81));
    assert_eq!(r.nuclei.commutative_center.order(), 81);
    for s in [&r.nuclei.left, &r.nuclei.middle, &r.nuclei.right, &r.nuclei.nucleus, &r.nuclei.center] {
        assert!(s.is_field, "{s:?}");
    }
    let sp = semifield_spread(&tbl, None).unwrap();
    assert_eq!(sp.components.len(), 82);
    assert!(sp.components.iter().all(|c| c.len() == 81));
    assert!(sp.partition && sp.closed_under_addition && sp.invertible);
    assert_eq!(sp.linear_set.rank(), 4);
    assert!(sp.linear_set.len() > 1);
    let total: usize = sp.components.iter().map(|c| c.len() - 1).sum();
    assert_eq!(total, 81 * 81 - 1);
}

#[test]
fn field_tables_give_one_point() {
    for q in [4u64, 8, 9, 16] {
        let t = FieldTower::of_order(q).unwrap();
        let tbl = SemifieldTable::from_field(&t);
        let sp = semifield_spread(&tbl, None).unwrap();
        assert_eq!(sp.l, 1);
        assert_eq!(sp.linear_set.len(), 1);
        assert_eq!(sp.linear_set.points()[0].weight, t.h());
        // over the prime field L(S) is the whole (h-1)-space spanned by R_x
        let sp = semifield_spread(&tbl, Some(t.p())).unwrap();
        assert_eq!(sp.l, t.h() as usize);
        assert!(sp.partition && sp.invertible);
        let p = t.p() as usize;
        assert_eq!(sp.linear_set.len(), (p.pow(t.h()) - 1) / (p - 1));
    }
}

#[test]
fn table_file_round_trip() {
    let k = FieldTower::of_order(9).unwrap();
    let tbl = SemifieldTable::dickson(&k, 1).unwrap();
    assert_eq!(SemifieldTable::parse(&tbl.to_text()).unwrap(), tbl);
}
