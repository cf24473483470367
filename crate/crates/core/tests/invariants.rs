use fieldred::applications::SemifieldTable;
use fieldred::linalg;
use fieldred::linset::LinearSet;
use fieldred::projspace::{PointCodec, ProjSubspace};
use fieldred::reduction::ReductionContext;
use fieldred::{FieldTower, SemilinearMap};
use proptest::prelude::*;

const ORDERS: [u64; 12] = [2, 3, 4, 5, 7, 8, 9, 16, 25, 27, 64, 81];

fn tower() -> impl Strategy<Value = FieldTower> {
    prop::sample::select(&ORDERS[..]).prop_map(|q| FieldTower::of_order(q).unwrap())
}

fn tower_with_elements(k: usize) -> impl Strategy<Value = (FieldTower, Vec<u32>)> {
    tower().prop_flat_map(move |f| {
        let q = f.order();
        (Just(f), prop::collection::vec(0..q, k))
    })
}

/// Coefficient-wise addition mod p, independent of the log tables.
fn naive_add(f: &FieldTower, a: u32, b: u32) -> u32 {
    let ca = f.coefficients(a);
    let cb = f.coefficients(b);
    let c: Vec<u32> = ca.iter().zip(&cb).map(|(x, y)| (x + y) % f.p()).collect();
    f.from_coefficients(&c).unwrap()
}

proptest! {
    #[test]
    fn field_axioms((f, e) in tower_with_elements(3)) {
        let (a, b, c) = (e[0], e[1], e[2]);
        prop_assert_eq!(f.add(a, b), naive_add(&f, a, b));
        prop_assert_eq!(f.add(a, f.neg(a)), 0);
        prop_assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        if a != 0 {
            prop_assert_eq!(f.mul(a, f.inv(a)), 1);
            prop_assert_eq!(f.pow(a, f.order() as u64 - 1), 1);
        }
    }

    #[test]
    fn frobenius_is_an_automorphism((f, e) in tower_with_elements(2), s in 0u32..6) {
        let (a, b) = (e[0], e[1]);
        let s = s % f.h();
        prop_assert_eq!(f.frob(f.add(a, b), s), f.add(f.frob(a, s), f.frob(b, s)));
        prop_assert_eq!(f.frob(f.mul(a, b), s), f.mul(f.frob(a, s), f.frob(b, s)));
        prop_assert_eq!(f.frob(a, s), f.pow(a, (f.p() as u64).pow(s)));
    }

    #[test]
    fn trace_and_norm_land_in_subfield((f, e) in tower_with_elements(1)) {
        let x = e[0];
        for d in f.subfield_degrees() {
            let tr = f.trace_to(x, d).unwrap();
            let no = f.norm_to(x, d).unwrap();
            prop_assert!(f.in_subfield(tr, d).unwrap());
            prop_assert!(f.in_subfield(no, d).unwrap());
            prop_assert_eq!(no == 0, x == 0);
        }
    }

    #[test]
    fn element_text_round_trip((f, e) in tower_with_elements(1)) {
        let s = f.format_element(e[0]);
        prop_assert_eq!(f.parse_element(&s).unwrap(), e[0]);
    }
}

fn context() -> impl Strategy<Value = ReductionContext> {
    prop::sample::select(&[(2usize, 2usize, 2u64), (2, 2, 3), (2, 3, 2), (3, 2, 2), (2, 2, 4), (3, 2, 3)][..])
        .prop_map(|(r, t, q)| ReductionContext::new(r, t, q).unwrap())
}

fn big_vector(ctx: &ReductionContext, seed: &[u32]) -> Vec<u32> {
    let els = ctx.big().elements();
    seed.iter().take(ctx.r()).map(|&i| els[i as usize % els.len()]).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reduce_round_trip(ctx in context(), seed in prop::collection::vec(any::<u32>(), 3), c in any::<u32>()) {
        let v = big_vector(&ctx, &seed);
        let w = ctx.reduce_vector(&v);
        prop_assert_eq!(w.len(), ctx.n());
        prop_assert!(w.iter().all(|&x| ctx.small().contains(x)));
        prop_assert_eq!(ctx.unreduce_vector(&w).unwrap(), v.clone());
        // F_q-linearity
        let f = ctx.tower();
        let lam = ctx.small().elements()[c as usize % ctx.q() as usize];
        prop_assert_eq!(ctx.reduce_vector(&linalg::scale(f, &v, lam)), linalg::scale(f, &w, lam));
    }

    #[test]
    fn point_reduces_to_spread_element(ctx in context(), seed in prop::collection::vec(1u32.., 3)) {
        let v = big_vector(&ctx, &seed);
        prop_assume!(v.iter().any(|&x| x != 0));
        let pt = ctx.reduce_point(&v).unwrap();
        prop_assert_eq!(pt.rank(), ctx.t());
        let back = ctx.preimage(&pt).unwrap().unwrap();
        prop_assert_eq!(back, ProjSubspace::point(ctx.big(), &v).unwrap());
    }

    #[test]
    fn blow_up_is_a_homomorphism(
        ctx in context(),
        a in prop::collection::vec(any::<u32>(), 9),
        b in prop::collection::vec(any::<u32>(), 9),
        s in 0u32..4,
        seed in prop::collection::vec(any::<u32>(), 3),
    ) {
        let r = ctx.r();
        let big = ctx.big();
        let f = ctx.tower();
        let mat = |e: &[u32]| -> Vec<Vec<u32>> {
            (0..r).map(|i| big_vector(&ctx, &e[i * 3..])).collect()
        };
        let (ma, mb) = (mat(&a), mat(&b));
        prop_assume!(linalg::determinant(f, &ma) != 0 && linalg::determinant(f, &mb) != 0);
        let s = s % big.degree();
        let phi = SemilinearMap::new(big, ma, s).unwrap();
        let psi = SemilinearMap::new(big, mb, 0).unwrap();
        let bphi = ctx.blow_up_map(&phi).unwrap();
        let bpsi = ctx.blow_up_map(&psi).unwrap();
        let v = big_vector(&ctx, &seed);
        prop_assert_eq!(bphi.apply_vector(&ctx.reduce_vector(&v)), ctx.reduce_vector(&phi.apply_vector(&v)));
        let lhs = ctx.blow_up_map(&phi.compose(&psi).unwrap()).unwrap();
        let rhs = bphi.compose(&bpsi).unwrap();
        prop_assert_eq!(lhs.matrix(), rhs.matrix());
        prop_assert_eq!(lhs.s(), rhs.s());
        let inv = ctx.blow_up_map(&phi.inverse().unwrap()).unwrap();
        let binv = bphi.inverse().unwrap();
        prop_assert_eq!(inv.matrix(), binv.matrix());
    }

    #[test]
    fn weight_identities_hold(ctx in context(), rows in prop::collection::vec(prop::collection::vec(any::<u32>(), 6), 1..5)) {
        let small = ctx.small();
        let n = ctx.n();
        let gens: Vec<Vec<u32>> = rows
            .iter()
            .map(|row| (0..n).map(|i| small.elements()[row[i % row.len()].wrapping_add(i as u32) as usize % small.order() as usize]).collect())
            .collect();
        let u = ProjSubspace::canonical(small, n, &gens).unwrap();
        prop_assume!(u.rank() > 0);
        let ls = LinearSet::new(&ctx, &u).unwrap();
        prop_assert!(ls.weight_identities().all_hold());
        // every vector of U is counted once by the weights of its points
        let q = ctx.q() as u64;
        let total: u64 = ls.points().iter().map(|p| q.pow(p.weight) - 1).sum();
        prop_assert_eq!(total, q.pow(u.rank() as u32) - 1);
        for p in ls.points() {
            let w = ctx.reduce_point(&p.point).unwrap().meet(&u).unwrap().rank();
            prop_assert_eq!(w as u32, p.weight);
        }
    }

    #[test]
    fn codec_round_trip((f, e) in tower_with_elements(4)) {
        let full = f.full();
        let codec = PointCodec::new(&full, 4);
        prop_assume!(e.iter().any(|&x| x != 0));
        let idx = codec.encode(&e);
        prop_assert!(idx < codec.len());
        let pt = codec.decode(idx);
        prop_assert_eq!(
            ProjSubspace::point(&full, &pt).unwrap(),
            ProjSubspace::point(&full, &e).unwrap()
        );
    }

    #[test]
    fn subspace_dimension_formula(
        (f, e) in tower_with_elements(24),
        k1 in 1usize..4,
        k2 in 1usize..4,
    ) {
        let full = f.full();
        let n = 4;
        let a = ProjSubspace::canonical(&full, n, &e[..k1 * n].chunks(n).map(<[u32]>::to_vec).collect::<Vec<_>>()).unwrap();
        let b = ProjSubspace::canonical(&full, n, &e[12..12 + k2 * n].chunks(n).map(<[u32]>::to_vec).collect::<Vec<_>>()).unwrap();
        let j = a.span(&b).unwrap();
        let m = a.meet(&b).unwrap();
        prop_assert_eq!(j.rank() + m.rank(), a.rank() + b.rank());
        prop_assert!(j.contains(&a) && j.contains(&b));
        prop_assert!(a.contains(&m) && b.contains(&m));
        if a.rank() > 0 {
            prop_assert_eq!(ProjSubspace::parse_text(&full, &a.to_text()).unwrap(), a);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn semifield_text_round_trip(q in prop::sample::select(&[4u64, 8, 9, 25, 27][..]), dickson in any::<bool>()) {
        let k = FieldTower::of_order(q).unwrap();
        let tbl = if dickson && q % 2 == 1 {
            SemifieldTable::dickson(&k, 1).unwrap()
        } else {
            SemifieldTable::from_field(&k)
        };
        let back = SemifieldTable::parse(&tbl.to_text()).unwrap();
        prop_assert_eq!(back, tbl);
    }
}
