use fieldred::linset::{equivalence_classes, orbit_classes, Family, GroupKind};
use fieldred::projspace::DEFAULT_BUDGET;
use fieldred::reduction::ReductionContext;

#[test]
fn scattered_rank3_in_pg1_16_form_one_class() {
    let ctx = ReductionContext::new(2, 4, 2).unwrap();
    let rep = equivalence_classes(&ctx, &Family::ScatteredRank3, GroupKind::Projective, DEFAULT_BUDGET)
        .unwrap();
    assert_eq!(rep.class_count(), 1);
    assert!(rep.methods_agree());
    assert!(rep.witnesses_verified);
}

#[test]
fn clubs_in_pg1_32_split_under_pgl_only() {
    let ctx = ReductionContext::new(2, 5, 2).unwrap();
    let pgl = equivalence_classes(&ctx, &Family::Clubs, GroupKind::Projective, DEFAULT_BUDGET).unwrap();
    let pgaml = equivalence_classes(&ctx, &Family::Clubs, GroupKind::Semilinear, DEFAULT_BUDGET).unwrap();
    assert!(pgl.class_count() >= 2);
    assert_eq!(pgaml.class_count(), 1);
    assert!(pgl.methods_agree() && pgaml.methods_agree());
    assert!(pgl.witnesses_verified && pgaml.witnesses_verified);
    let orbits = orbit_classes(&ctx, &Family::Clubs, GroupKind::Projective, DEFAULT_BUDGET).unwrap();
    assert_eq!(orbits.centers, 7 * 30);
    assert_eq!(orbits.sizes.iter().sum::<usize>(), 210);
}

#[test]
fn orbit_method_rejects_custom_family() {
    let ctx = ReductionContext::new(2, 3, 2).unwrap();
    assert!(orbit_classes(&ctx, &Family::Custom(vec![]), GroupKind::Projective, DEFAULT_BUDGET).is_err());
    let line = ReductionContext::new(2, 2, 2).unwrap();
    assert!(equivalence_classes(&line, &Family::Clubs, GroupKind::Projective, DEFAULT_BUDGET).is_err());
}
