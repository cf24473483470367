use fieldred::gf::{prime_power, Field, FieldTower};
use fieldred::polar::*;

fn big_field(q: u64, t: usize) -> (Field, u32) {
    let (p, e) = prime_power(q).unwrap();
    (FieldTower::new(p, e * t as u32, None).unwrap().full(), e)
}

/// Compares the predicted type of `Tr ∘ f` with brute-force classification
/// for every trace functional. Returns the mismatching cells.
fn mismatches(src: &FormSpec, small_deg: u32) -> Vec<String> {
    let big = src.field().clone();
    let small = big.tower().subfield(small_deg).unwrap();
    let ty = classify(src).unwrap();
    let mut out = Vec::new();
    for &a in big.nonzero() {
        let l = TraceFunctional::new(&big, &small, a).unwrap();
        let got = classify(&trace_compose(src, &l).unwrap()).unwrap().label;
        let pred = predicted_type(&TableQuery::new(src, &ty, &l).unwrap()).unwrap();
        if got != pred {
            out.push(format!("{:?} r={} a={a}: got {got}, predicted {pred}", ty.label, src.n()));
        }
    }
    out
}

#[test]
fn quadric_and_symplectic_sources_match_prediction() {
    let mut bad = Vec::new();
    for q in [2u64, 3, 5] {
        for t in [2usize, 3] {
            let (big, e) = big_field(q, t);
            for r in (1..=3usize).filter(|r| r * t <= 8) {
                let mut srcs = Vec::new();
                if r % 2 == 0 {
                    for kind in [StandardKind::Hyperbolic, StandardKind::Elliptic, StandardKind::Alternating] {
                        srcs.push(standard_form(kind, r, &big).unwrap());
                    }
                } else {
                    srcs.push(parabolic_form(&big, r, 1).unwrap());
                    if q % 2 == 1 {
                        let ns = *big.nonzero().iter().find(|&&x| !big.is_square(x).unwrap()).unwrap();
                        srcs.push(parabolic_form(&big, r, ns).unwrap());
                    }
                }
                for s in &srcs {
                    bad.extend(mismatches(s, e).into_iter().map(|m| format!("q={q} t={t} {m}")));
                }
            }
        }
    }
    assert!(bad.is_empty(), "{}", bad.join("\n"));
}

#[test]
fn hermitian_sources_match_prediction() {
    let mut bad = Vec::new();
    for (q, t, rmax) in [(2u64, 2usize, 4usize), (3, 2, 4), (4, 2, 4), (5, 2, 4), (2, 4, 2), (3, 4, 2), (4, 3, 2)] {
        let (big, e) = big_field(q, t);
        for r in 1..=rmax {
            let h = standard_form(StandardKind::Hermitian, r, &big).unwrap();
            bad.extend(mismatches(&h, e).into_iter().map(|m| format!("q={q} t={t} {m}")));
        }
    }
    assert!(bad.is_empty(), "{}", bad.join("\n"));
}
