//! Verification suites: each one re-derives a family of results by exhaustive
//! computation at small parameters and records one entry per check.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::applications::{self, PointSetInstance, Role, SemifieldTable};
use crate::error::{Error, Result};
use crate::gf::{Field, FieldTower};
use crate::linalg;
use crate::linset::{self, Family, GroupKind, LinearSet};
use crate::polar::{self, FormKind, FormSpec, PolarLabel, StandardKind, TableQuery, TraceFunctional};
use crate::projspace::{self, PointCodec, ProjSubspace};
use crate::reduction::{self, ReductionContext, Spread};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Status {
    Pass,
    Fail,
    SkippedBudget,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::SkippedBudget => "skipped-budget",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub status: Status,
    /// Present on every failure.
    pub witness: Option<String>,
    pub values: BTreeMap<String, String>,
}

impl Check {
    pub fn with(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.values.insert(key.to_string(), value.to_string());
        self
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: String,
    pub criterion: usize,
    pub grid: Vec<String>,
    pub checks: Vec<Check>,
    pub elapsed: Duration,
}

impl SuiteReport {
    pub fn status(&self) -> Status {
        if self.checks.iter().any(|c| c.status == Status::Fail) {
            Status::Fail
        } else if self.checks.iter().any(|c| c.status == Status::SkippedBudget) {
            Status::SkippedBudget
        } else {
            Status::Pass
        }
    }

    pub fn count(&self, status: Status) -> usize {
        self.checks.iter().filter(|c| c.status == status).count()
    }

    pub fn to_text(&self, timing: bool) -> String {
        let mut out = format!(
            "suite {} (criterion {}): {}\n",
            self.suite,
            self.criterion,
            self.status().name()
        );
        if !self.grid.is_empty() {
            let _ = writeln!(out, "  grid: {}", self.grid.join(" "));
        }
        for c in &self.checks {
            let _ = write!(out, "  [{}] {}", c.status.name(), c.name);
            for (k, v) in &c.values {
                let _ = write!(out, " {k}={v}");
            }
            out.push('\n');
            if let Some(w) = &c.witness {
                let _ = writeln!(out, "      witness: {w}");
            }
        }
        if timing {
            let _ = writeln!(out, "  elapsed: {:.3}s", self.elapsed.as_secs_f64());
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Budget {
    Small,
    Medium,
    Large,
    /// Explicit object limit.
    Custom(u128),
}

impl Budget {
    /// `small`, `medium`, `large` or a plain object count.
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "small" => Ok(Budget::Small),
            "medium" => Ok(Budget::Medium),
            "large" => Ok(Budget::Large),
            other => other
                .parse::<u128>()
                .map(Budget::Custom)
                .map_err(|_| Error::Parse(format!("unknown budget '{s}'"))),
        }
    }

    pub fn name(self) -> String {
        match self {
            Budget::Small => "small".into(),
            Budget::Medium => "medium".into(),
            Budget::Large => "large".into(),
            Budget::Custom(n) => n.to_string(),
        }
    }

    /// Largest number of objects a single enumeration may produce.
    pub fn limit(self) -> u128 {
        match self {
            Budget::Small => projspace::DEFAULT_BUDGET,
            Budget::Medium => 10 * projspace::DEFAULT_BUDGET,
            Budget::Large => 100 * projspace::DEFAULT_BUDGET,
            Budget::Custom(n) => n,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Config {
    pub budget: Budget,
    /// Recorded in reports; every suite is exhaustive, so nothing is sampled.
    pub seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            budget: Budget::Small,
            seed: 0,
        }
    }
}

/// Suite names in criterion order.
pub const SUITES: [&str; 13] = [
    "lemma-field-reduction",
    "segre-spread-design",
    "segre-variety",
    "polar-tables",
    "quadric-counts",
    "linset-weights",
    "scattered-bound",
    "subline-intersections",
    "equivalence",
    "two-planes",
    "pseudoregulus",
    "blocking-sets",
    "semifields",
];

#[derive(Default)]
struct Recorder {
    grid: Vec<String>,
    checks: Vec<Check>,
}

impl Recorder {
    fn check(&mut self, name: impl Into<String>, ok: bool, witness: impl FnOnce() -> String) -> &mut Check {
        self.checks.push(Check {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            witness: (!ok).then(witness),
            values: BTreeMap::new(),
        });
        self.checks.last_mut().expect("just pushed")
    }

    fn skip(&mut self, name: impl Into<String>, reason: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            status: Status::SkippedBudget,
            witness: None,
            values: BTreeMap::from([("reason".to_string(), reason.into())]),
        });
    }

    /// Unwraps a result; errors become a failed (or budget-skipped) check.
    fn ok<T>(&mut self, name: &str, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e @ Error::BudgetExceeded { .. }) => {
                self.skip(name, e.to_string());
                None
            }
            Err(e) => {
                self.check(name, false, || e.to_string());
                None
            }
        }
    }
}

pub fn criterion_of(suite: &str) -> Option<usize> {
    SUITES.iter().position(|&s| s == suite).map(|i| i + 1)
}

pub fn run_suite(name: &str, cfg: &Config) -> Result<SuiteReport> {
    let criterion = criterion_of(name).ok_or_else(|| {
        Error::Precondition(format!("unknown suite '{name}'; expected one of {}", SUITES.join(", ")))
    })?;
    let start = Instant::now();
    let mut rec = Recorder::default();
    let b = cfg.budget.limit();
    match criterion {
        1 => lemma_field_reduction(&mut rec, b),
        2 => segre_spread_design(&mut rec, b),
        3 => segre_variety(&mut rec),
        4 => polar_tables(&mut rec),
        5 => quadric_counts(&mut rec),
        6 => linset_weights(&mut rec, b),
        7 => scattered_bound(&mut rec, b),
        8 => subline_intersections(&mut rec, b),
        9 => equivalence(&mut rec, b),
        10 => two_planes(&mut rec, cfg.budget),
        11 => pseudoregulus(&mut rec, b),
        12 => blocking_sets(&mut rec, b),
        13 => semifields(&mut rec),
        _ => unreachable!("criterion index comes from SUITES"),
    }
    Ok(SuiteReport {
        suite: name.to_string(),
        criterion,
        grid: rec.grid,
        checks: rec.checks,
        elapsed: start.elapsed(),
    })
}

fn fmt_sub(s: &ProjSubspace) -> String {
    format!("{s:?}")
}

/// Independent partition test: every point of PG(n-1, q) lies in exactly one
/// element. Returns a point covered a wrong number of times.
fn partition_witness(field: &Field, n: usize, elements: &[ProjSubspace]) -> Option<String> {
    let codec = PointCodec::new(field, n);
    let mut cover = vec![0u32; codec.len() as usize];
    for e in elements {
        e.for_each_point(|v| cover[codec.encode(v) as usize] += 1);
    }
    cover
        .iter()
        .position(|&c| c != 1)
        .map(|i| format!("point {:?} covered {} times", codec.decode(i as u64), cover[i]))
}

fn lemma_field_reduction(rec: &mut Recorder, budget: u128) {
    for (r, t, q, size) in [(2, 2, 2, 5), (2, 2, 3, 10), (3, 2, 2, 21), (2, 3, 2, 9)] {
        let tag = format!("({r},{t},{q})");
        rec.grid.push(tag.clone());
        let Some(ctx) = rec.ok(&tag, ReductionContext::new(r, t, q)) else {
            continue;
        };
        let mut subs = Vec::new();
        for k in 0..r {
            let Some(s) = rec.ok(&tag, projspace::enumerate(ctx.big(), r, k, budget)) else {
                return;
            };
            subs.extend(s);
        }
        let Some(images) = rec.ok(
            &tag,
            subs.iter().map(|s| ctx.field_reduce(s)).collect::<Result<Vec<_>>>(),
        ) else {
            continue;
        };
        let mut seen: HashMap<&ProjSubspace, usize> = HashMap::new();
        let mut clash = None;
        for (i, img) in images.iter().enumerate() {
            if let Some(j) = seen.insert(img, i) {
                clash.get_or_insert((j, i));
            }
        }
        rec.check(format!("{tag} (i) injective"), clash.is_none(), || {
            let (a, b) = clash.unwrap();
            format!("{} and {} have the same image", fmt_sub(&subs[a]), fmt_sub(&subs[b]))
        })
        .with("subspaces", subs.len());

        let bad = subs.iter().zip(&images).find(|(s, i)| i.rank() != t * s.rank());
        rec.check(format!("{tag} (ii) image dimension kt-1"), bad.is_none(), || {
            let (s, i) = bad.unwrap();
            format!("{} maps to {}", fmt_sub(s), fmt_sub(i))
        });

        let points: Vec<&ProjSubspace> = subs
            .iter()
            .zip(&images)
            .filter(|(s, _)| s.rank() == 1)
            .map(|(_, i)| i)
            .collect();
        let mut overlap = None;
        'outer: for i in 0..points.len() {
            for j in i + 1..points.len() {
                if rec_meet(points[i], points[j]) != 0 {
                    overlap = Some((i, j));
                    break 'outer;
                }
            }
        }
        rec.check(format!("{tag} (iii) point images pairwise disjoint"), overlap.is_none(), || {
            let (i, j) = overlap.unwrap();
            format!("{} meets {}", fmt_sub(points[i]), fmt_sub(points[j]))
        });
        let owned: Vec<ProjSubspace> = points.iter().map(|&p| p.clone()).collect();
        let cover = partition_witness(ctx.small(), ctx.n(), &owned);
        rec.check(format!("{tag} (iv) point images cover PG(rt-1,q)"), cover.is_none(), || {
            cover.clone().unwrap()
        });
        let qq = q;
        let formula = (qq.pow((r * t) as u32) - 1) / (qq.pow(t as u32) - 1);
        let spread = rec.ok(&tag, ctx.desarguesian_spread(budget));
        let got = spread.as_ref().map_or(0, |s| s.len() as u64);
        rec.check(format!("{tag} (v) spread cardinality"), got == formula && formula == size, || {
            format!("spread has {got} elements, formula {formula}, expected {size}")
        })
        .with("elements", got);

        let mut meet_bad = None;
        let mut span_bad = None;
        for i in 0..subs.len() {
            for j in i..subs.len() {
                let m = subs[i].meet(&subs[j]).and_then(|m| ctx.field_reduce(&m));
                let mi = images[i].meet(&images[j]);
                if meet_bad.is_none() && (m.is_err() || mi.is_err() || m.ok() != mi.ok()) {
                    meet_bad = Some((i, j));
                }
                let s = subs[i].span(&subs[j]).and_then(|m| ctx.field_reduce(&m));
                let si = images[i].span(&images[j]);
                if span_bad.is_none() && (s.is_err() || si.is_err() || s.ok() != si.ok()) {
                    span_bad = Some((i, j));
                }
            }
        }
        rec.check(format!("{tag} (vi) F(A meet B) = F(A) meet F(B)"), meet_bad.is_none(), || {
            let (i, j) = meet_bad.unwrap();
            format!("A = {}, B = {}", fmt_sub(&subs[i]), fmt_sub(&subs[j]))
        });
        // Span: F(<A, B>) = <F(A), F(B)>, and F(S) is the union of the F(P), P in S.
        let mut cover_bad = None;
        for (s, img) in subs.iter().zip(&images) {
            let mut pts = 0u64;
            let mut inside = true;
            s.for_each_point(|v| {
                let e = ctx.reduce_point(v).expect("nonzero");
                pts += e.point_count();
                inside &= img.contains(&e);
            });
            if !inside || pts != img.point_count() {
                cover_bad.get_or_insert_with(|| fmt_sub(s));
            }
        }
        rec.check(
            format!("{tag} (vii) F(<A,B>) = <F(A),F(B)> and F(S) = union of F(P)"),
            span_bad.is_none() && cover_bad.is_none(),
            || match span_bad {
                Some((i, j)) => format!("span of {} and {}", fmt_sub(&subs[i]), fmt_sub(&subs[j])),
                None => format!("points of F({}) not covered by point images", cover_bad.clone().unwrap()),
            },
        );
    }
}

fn rec_meet(a: &ProjSubspace, b: &ProjSubspace) -> usize {
    a.meet(b).map_or(usize::MAX, |m| m.rank())
}

fn segre_spread_design(rec: &mut Recorder, budget: u128) {
    rec.grid.push("(2,2,2)".into());
    let Some(ctx) = rec.ok("context", ReductionContext::new(2, 2, 2)) else {
        return;
    };
    let mut spreads: Vec<(&str, Spread)> = Vec::new();
    if let Some(d) = rec.ok("D_{2,2,2}", ctx.desarguesian_spread(budget)) {
        spreads.push(("D_{2,2,2}", d));
    }
    if let Some(c) = rec.ok("conjugate spread", ctx.spread_via_conjugates(&ctx.default_skew_space())) {
        spreads.push(("conjugate spread", c));
    }
    for (name, sp) in &spreads {
        let w = partition_witness(sp.field(), sp.n(), sp.elements());
        rec.check(format!("{name} is a line spread of PG(3,2)"), w.is_none() && sp.len() == 5, || {
            w.clone().unwrap_or_else(|| format!("{} elements", sp.len()))
        })
        .with("elements", sp.len());
        let nw = sp.normality_witness();
        rec.check(format!("{name} is normal"), nw.is_none(), || {
            let (i, j) = nw.unwrap();
            format!("span of elements {i} and {j} is not partitioned")
        });
    }
    let Some((_, d)) = spreads.first() else {
        return;
    };
    let e = d.elements();
    if let Some(reg) = rec.ok("regulus", reduction::regulus_through(&e[0], &e[1], &e[2])) {
        let outside = reg.elements.iter().find(|x| !e.contains(x));
        rec.check("regulus through three elements lies in D_{2,2,2}", outside.is_none(), || {
            fmt_sub(outside.unwrap())
        })
        .with("regulus_size", reg.elements.len());
    }
    let Some(design) = rec.ok("design", reduction::abb_design(d, budget)) else {
        return;
    };
    // Pair counts recomputed here rather than through DesignInstance::check.
    let v = design.v;
    let mut cnt: HashMap<(u32, u32), usize> = HashMap::new();
    for b in &design.blocks {
        for (i, &x) in b.iter().enumerate() {
            for &y in &b[i + 1..] {
                *cnt.entry((x.min(y), x.max(y))).or_default() += 1;
            }
        }
    }
    let pairs = v * (v - 1) / 2;
    let bad = (0..v as u32)
        .flat_map(|a| (a + 1..v as u32).map(move |b| (a, b)))
        .find(|p| cnt.get(p).copied().unwrap_or(0) != 1);
    let ok = v == 16 && design.k == 4 && design.blocks.len() == 20 && cnt.len() == 120 && bad.is_none();
    rec.check("affine design of D_{2,2,2} is a 2-(16,4,1) design", ok, || match bad {
        Some((a, b)) => format!("pair ({a},{b}) lies in {} blocks", cnt.get(&(a, b)).copied().unwrap_or(0)),
        None => format!("v={v} k={} blocks={}", design.k, design.blocks.len()),
    })
    .with("pairs", pairs)
    .with("blocks", design.blocks.len())
    .with("valid", design.is_valid());
}

fn segre_variety(rec: &mut Recorder) {
    for (r, t, q) in [(2usize, 2usize, 2u64), (3, 2, 3)] {
        let tag = format!("PG({},{}) in PG({},{})", r - 1, q, r - 1, q.pow(t as u32));
        rec.grid.push(format!("({r},{t},{q})"));
        let Some(ctx) = rec.ok(&tag, ReductionContext::new(r, t, q)) else {
            continue;
        };
        let pts = projspace::all_points(ctx.small(), r);
        if let Some(c) = rec.ok(&tag, reduction::subgeometry_on_segre(&ctx, &pts)) {
            let expected = pts.len() * projspace::point_count(t, q) as usize;
            rec.check(format!("{tag}: images lie on S_(r-1,t-1)"), c.all_on_variety() && c.points_checked == expected, || {
                format!("{} of {} points on the variety", c.points_on_variety, c.points_checked)
            })
            .with("points", c.points_checked);
        }
        // Oracle: |S_{r-1,t-1}| = |PG(r-1,q)| |PG(t-1,q)|, counted by the rank-one test.
        let on = projspace::all_points(ctx.small(), r * t)
            .iter()
            .filter(|p| reduction::is_on_segre(ctx.small(), p, r - 1, t - 1).unwrap_or(false))
            .count() as u64;
        let expected = projspace::point_count(r, q) * projspace::point_count(t, q);
        rec.check(format!("{tag}: |S_(r-1,t-1)| by rank-one count"), on == expected, || {
            format!("{on} points, expected {expected}")
        });
        // A point outside the subgeometry leaves the variety.
        let g = ctx.tower().generator();
        let mut v = vec![0; r];
        v[0] = 1;
        v[1] = g;
        if let Some(img) = rec.ok(&tag, ctx.reduce_point(&v)) {
            let mut off = 0;
            img.for_each_point(|w| off += !reduction::is_on_segre(ctx.small(), w, r - 1, t - 1).unwrap_or(true) as usize);
            rec.check(format!("{tag}: non-rational point leaves the variety"), off > 0, || {
                "image of (1, g, ...) lies on the variety".into()
            });
        }
    }
}

/// One cell of the polar reduction grid.
struct PolarCell {
    tag: String,
    source: FormSpec,
    source_label: PolarLabel,
    composed: FormSpec,
    predicted: Result<PolarLabel>,
    got: Result<PolarLabel>,
    gill: bool,
}

fn field_of(q: u64, t: usize) -> Result<(Field, u32)> {
    let (p, e) = crate::gf::prime_power(q).ok_or(Error::NotPrime(q))?;
    Ok((FieldTower::new(p, e * t as u32, None)?.full(), e))
}

fn degenerate_quadric(big: &Field, r: usize) -> Result<FormSpec> {
    let mut m = vec![vec![0; r]; r];
    m[0][0] = 1;
    FormSpec::new(big, FormKind::Quadratic, m, 0)
}

fn polar_sources(q: u64, r: usize, big: &Field, hermitian: bool) -> Result<Vec<FormSpec>> {
    let mut out = Vec::new();
    if hermitian {
        out.push(polar::standard_form(StandardKind::Hermitian, r, big)?);
        if r >= 2 {
            let mut m = vec![vec![0; r]; r];
            m[0][0] = 1;
            out.push(FormSpec::new(big, FormKind::Hermitian, m, big.degree() / 2)?);
        }
        if r.is_multiple_of(2) {
            out.push(polar::standard_form(StandardKind::Alternating, r, big)?);
        }
        return Ok(out);
    }
    if r.is_multiple_of(2) {
        out.push(polar::standard_form(StandardKind::Hyperbolic, r, big)?);
        out.push(polar::standard_form(StandardKind::Elliptic, r, big)?);
        out.push(polar::standard_form(StandardKind::Alternating, r, big)?);
    } else {
        out.push(polar::parabolic_form(big, r, 1)?);
        if q % 2 == 1 {
            let ns = *big
                .nonzero()
                .iter()
                .find(|&&x| !big.is_square(x).unwrap_or(true))
                .expect("odd order fields have non-squares");
            out.push(polar::parabolic_form(big, r, ns)?);
        }
    }
    if r >= 2 {
        out.push(degenerate_quadric(big, r)?);
    }
    if q.is_multiple_of(2) {
        out.push(FormSpec::new(big, FormKind::PseudoSymplectic, linalg::identity(r), 0)?);
    }
    Ok(out)
}

/// The quadratic grid (q in {2,3,5}, t in {2,3}, rt <= 8) and the
/// hermitian/alternating grid, every nonzero α.
fn polar_grid() -> Result<Vec<PolarCell>> {
    let mut specs: Vec<(u64, usize, usize, bool)> = Vec::new();
    for q in [2u64, 3, 5] {
        for t in [2usize, 3] {
            for r in 1..=3usize {
                if r * t <= 8 {
                    specs.push((q, t, r, false));
                }
            }
        }
    }
    for (q, t, rmax) in [(2u64, 2usize, 4usize), (3, 2, 4), (4, 2, 4), (5, 2, 4), (2, 4, 2), (3, 4, 2), (4, 3, 2)] {
        for r in 1..=rmax {
            specs.push((q, t, r, true));
        }
    }
    let cells: Vec<Result<Vec<PolarCell>>> = specs
        .par_iter()
        .map(|&(q, t, r, herm)| {
            let (big, e) = field_of(q, t)?;
            let small = big.tower().subfield(e)?;
            let mut cells = Vec::new();
            for src in polar_sources(q, r, &big, herm)? {
                let ty = polar::classify(&src)?;
                let nondeg = ty.label != PolarLabel::Degenerate;
                for &a in big.nonzero() {
                    let l = TraceFunctional::new(&big, &small, a)?;
                    let composed = polar::trace_compose(&src, &l)?;
                    let got = polar::classify(&composed).map(|c| c.label);
                    let predicted = TableQuery::new(&src, &ty, &l).and_then(|tq| polar::predicted_type(&tq));
                    cells.push(PolarCell {
                        tag: format!(
                            "q={q} t={t} r={r} source={} [{}] alpha={}",
                            ty.label,
                            src.to_text(),
                            big.tower().format_element(a)
                        ),
                        gill: polar::gill_nondegenerate(src.is_quadratic(), nondeg, r, q),
                        source: src.clone(),
                        source_label: ty.label,
                        composed,
                        predicted,
                        got,
                    });
                }
            }
            Ok(cells)
        })
        .collect();
    let mut out = Vec::new();
    for c in cells {
        out.extend(c?);
    }
    Ok(out)
}

fn polar_tables(rec: &mut Recorder) {
    rec.grid = vec![
        "quadratic q in {2,3,5}, t in {2,3}, rt <= 8".into(),
        "hermitian/alternating (q,t) in {(2,2),(3,2),(4,2),(5,2),(2,4),(3,4),(4,3)}, rt <= 8".into(),
    ];
    let Some(cells) = rec.ok("grid", polar_grid()) else {
        return;
    };
    let mut by_row: BTreeMap<(String, &'static str), (usize, Option<String>)> = BTreeMap::new();
    let mut gill_bad = None;
    let mut labels = BTreeSet::new();
    for c in &cells {
        let row = (
            if c.source.is_quadratic() { "quadratic" } else { c.source.kind().name() }.to_string(),
            c.source_label.name(),
        );
        let e = by_row.entry(row).or_default();
        e.0 += 1;
        match (&c.predicted, &c.got) {
            (Ok(p), Ok(g)) if p == g => {
                labels.insert(g.name());
            }
            (p, g) => {
                e.1.get_or_insert_with(|| format!("{}: predicted {p:?}, computed {g:?}", c.tag));
            }
        }
        if let Ok(g) = &c.got {
            if c.gill != (*g != PolarLabel::Degenerate) && gill_bad.is_none() {
                gill_bad = Some(format!("{}: predicate says {}, computed {g}", c.tag, c.gill));
            }
        }
    }
    for ((kind, label), (n, bad)) in &by_row {
        rec.check(format!("table row {kind}/{label}"), bad.is_none(), || bad.clone().unwrap())
            .with("cells", n);
    }
    rec.check("nondegeneracy predicate exact", gill_bad.is_none(), || gill_bad.clone().unwrap())
        .with("cells", cells.len());
    let needed = ["degenerate", "atypical", "hyperbolic", "elliptic", "parabolic", "hermitian", "symplectic", "pseudo-symplectic"];
    let missing: Vec<&str> = needed.iter().copied().filter(|l| !labels.contains(l)).collect();
    rec.check("every output type occurs in the grid", missing.is_empty(), || {
        format!("never produced: {}", missing.join(", "))
    })
    .with("types", labels.len());
}

fn quadric_counts(rec: &mut Recorder) {
    rec.grid = vec!["all forms of the polar-tables grid and their reductions".into()];
    let Some(cells) = rec.ok("grid", polar_grid()) else {
        return;
    };
    let mut seen: HashSet<String> = HashSet::new();
    let mut forms: Vec<(String, FormSpec, PolarLabel)> = Vec::new();
    for c in &cells {
        if seen.insert(format!("{:?}", c.source.matrix()) + &c.source.field().order().to_string()) {
            forms.push((c.tag.clone(), c.source.clone(), c.source_label));
        }
        if let Ok(g) = c.got {
            forms.push((format!("{} (reduced)", c.tag), c.composed.clone(), g));
        }
    }
    let quadric = |l: PolarLabel| matches!(l, PolarLabel::Hyperbolic | PolarLabel::Elliptic | PolarLabel::Parabolic);
    let forms: Vec<_> = forms.into_iter().filter(|f| quadric(f.2)).collect();
    let results: Vec<(String, PolarLabel, u64, Option<u64>)> = forms
        .par_iter()
        .map(|(tag, f, l)| {
            let q = f.field().order() as u64;
            (tag.clone(), *l, polar::projective_zero_count(f), polar::expected_zero_count(*l, f.n(), q))
        })
        .collect();
    let mut by_label: BTreeMap<&str, (usize, Option<String>)> = BTreeMap::new();
    for (tag, l, got, want) in &results {
        let e = by_label.entry(l.name()).or_default();
        e.0 += 1;
        if Some(*got) != *want {
            e.1.get_or_insert_with(|| format!("{tag}: {got} zeros, formula {want:?}"));
        }
    }
    for (label, (n, bad)) in &by_label {
        rec.check(format!("{label} quadrics match q^(n-1) +- 1 counts"), bad.is_none(), || bad.clone().unwrap())
            .with("forms", n);
    }
    rec.check("quadrics encountered", !results.is_empty(), || "no quadric in the grid".into())
        .with("forms", results.len());
}

fn linset_weights(rec: &mut Recorder, budget: u128) {
    rec.grid.push("(2,3,2)".into());
    let Some(ctx) = rec.ok("context", ReductionContext::new(2, 3, 2)) else {
        return;
    };
    let Some(subs) = rec.ok("enumerate", projspace::enumerate(ctx.small(), 6, 2, budget)) else {
        return;
    };
    rec.check("rank-3 subspaces of PG(5,2)", subs.len() == 1395, || format!("{} subspaces", subs.len()))
        .with("count", subs.len());
    let sets: Vec<Result<LinearSet>> = subs.par_iter().map(|u| LinearSet::new(&ctx, u)).collect();
    let mut identities_bad = None;
    let mut weight_bad = None;
    let mut kinds: BTreeMap<&str, usize> = BTreeMap::new();
    let mut club_bad = None;
    for (u, l) in subs.iter().zip(sets) {
        let Some(l) = rec.ok(&fmt_sub(u), l) else {
            continue;
        };
        let w = l.weight_identities();
        if !w.all_hold() && identities_bad.is_none() {
            identities_bad = Some(format!("{}: {w:?}", fmt_sub(u)));
        }
        // Oracle: the weight of P is the rank of U meet F(P).
        for p in l.points() {
            let m = ctx.reduce_point(&p.point).and_then(|e| e.meet(u)).map(|m| m.rank());
            if m != Ok(p.weight as usize) && weight_bad.is_none() {
                weight_bad = Some(format!("{} point {:?}: weight {} vs meet {m:?}", fmt_sub(u), p.point, p.weight));
            }
        }
        let kind = match (l.len(), l.weight_distribution().as_slice()) {
            (7, [7, 0, 0]) => "scattered",
            (5, [4, 1, 0]) => "club",
            (1, [0, 0, 1]) => "point",
            _ => "other",
        };
        if l.is_club() != (kind == "club") || (l.is_scattered() != (kind == "scattered")) {
            club_bad.get_or_insert_with(|| format!("{}: size {} histogram {:?}", fmt_sub(u), l.len(), l.weight_distribution()));
        }
        *kinds.entry(kind).or_default() += 1;
    }
    rec.check("weight identities (i)-(iv)", identities_bad.is_none(), || identities_bad.clone().unwrap());
    rec.check("weights equal rank of U meet F(P)", weight_bad.is_none(), || weight_bad.clone().unwrap());
    let other = kinds.get("other").copied().unwrap_or(0);
    let c = rec.check(
        "clubs have size 5 with (4,1), scattered sets size 7",
        other == 0 && club_bad.is_none() && kinds.contains_key("club") && kinds.contains_key("scattered"),
        || club_bad.clone().unwrap_or_else(|| format!("{other} sets of another shape")),
    );
    for (k, n) in &kinds {
        c.with(k, n);
    }
}

fn scattered_bound(rec: &mut Recorder, budget: u128) {
    for (r, t, q) in [(2usize, 2usize, 2u64), (2, 2, 3)] {
        let tag = format!("({r},{t},{q})");
        rec.grid.push(tag.clone());
        let Some(ctx) = rec.ok(&tag, ReductionContext::new(r, t, q)) else {
            continue;
        };
        let n = r * t;
        let mut scattered = vec![0usize; n + 1];
        let mut total = vec![0usize; n + 1];
        let mut witness = None;
        for k in 1..=n {
            let Some(subs) = rec.ok(&tag, projspace::enumerate(ctx.small(), n, k - 1, budget)) else {
                return;
            };
            for u in &subs {
                let Some(l) = rec.ok(&tag, LinearSet::new(&ctx, u)) else {
                    return;
                };
                total[k] += 1;
                if l.is_scattered() {
                    scattered[k] += 1;
                    if 2 * k > n {
                        witness.get_or_insert_with(|| fmt_sub(u));
                    }
                }
            }
        }
        let above: usize = scattered[n / 2 + 1..].iter().sum();
        rec.check(format!("{tag} no scattered set of rank > rt/2"), above == 0, || witness.clone().unwrap())
            .with("subspaces_above", total[n / 2 + 1..].iter().sum::<usize>());
        rec.check(format!("{tag} scattered sets of rank rt/2 exist"), scattered[n / 2] > 0, || {
            "none found".into()
        })
        .with("count", scattered[n / 2]);
    }
}

fn point_mask(codec: &PointCodec, l: &LinearSet) -> u64 {
    l.points().iter().fold(0u64, |m, p| m | 1 << codec.encode(&p.point))
}

fn subline_intersections(rec: &mut Recorder, budget: u128) {
    rec.grid.push("PG(1,16) over F_2".into());
    let Some(ctx) = rec.ok("context", ReductionContext::new(2, 4, 2)) else {
        return;
    };
    let codec = PointCodec::new(ctx.big(), 2);
    let mut families: Vec<BTreeMap<u64, LinearSet>> = Vec::new();
    for k in [2usize, 3] {
        let Some(subs) = rec.ok("enumerate", projspace::enumerate(ctx.small(), 8, k - 1, budget)) else {
            return;
        };
        let sets: Vec<Result<LinearSet>> = subs.par_iter().map(|u| LinearSet::new(&ctx, u)).collect();
        let mut by_mask = BTreeMap::new();
        for l in sets {
            let Some(l) = rec.ok("linear set", l) else {
                return;
            };
            if k == 2 && !l.is_scattered() {
                continue;
            }
            by_mask.entry(point_mask(&codec, &l)).or_insert(l);
        }
        families.push(by_mask);
    }
    let (sublines, rank3) = (&families[0], &families[1]);
    // |PGL(2,16)| / |PGL(2,2)| = 4080 / 6
    rec.check("number of F_2-sublines", sublines.len() == 680, || format!("{} sublines", sublines.len()))
        .with("sublines", sublines.len())
        .with("rank3_sets", rank3.len());
    let masks3: Vec<u64> = rank3.keys().copied().collect();
    let found: Vec<BTreeMap<u32, (u64, u64)>> = sublines
        .keys()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&&a| {
            let mut m = BTreeMap::new();
            for &b in &masks3 {
                m.entry((a & b).count_ones()).or_insert((a, b));
            }
            m
        })
        .collect();
    let mut sizes: BTreeMap<u32, (u64, u64)> = BTreeMap::new();
    for m in found {
        for (k, v) in m {
            sizes.entry(k).or_insert(v);
        }
    }
    let allowed: BTreeSet<u32> = [0, 1, 2, 3].into();
    let realized: BTreeSet<u32> = sizes.keys().copied().collect();
    let bad = realized.difference(&allowed).next().copied();
    let list = realized.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
    rec.check("intersection sizes within {0..min(q+1,k)} u {q+1}", bad.is_none(), || {
        let (a, b) = sizes[&bad.unwrap()];
        format!("{:?} meets {:?}", sublines[&a].point_set(), rank3[&b].point_set())
    })
    .with("sizes", &list);
    rec.check("every size 0..3 is realized", realized == allowed, || format!("realized {list}"));
    // Cross-check one witness per size with the library intersection.
    let mut agree = None;
    for (&k, &(a, b)) in &sizes {
        match linset::intersect_linear_sets(&sublines[&a], &rank3[&b]) {
            Ok(i) if i.count() == k as usize && i.bounds_hold() => {}
            other => {
                agree.get_or_insert(format!("size {k}: {other:?}"));
            }
        }
    }
    rec.check("witnesses agree with intersect_linear_sets", agree.is_none(), || agree.clone().unwrap());
}

fn equivalence(rec: &mut Recorder, budget: u128) {
    let cases: [(usize, Family, GroupKind, &str); 5] = [
        (3, Family::Clubs, GroupKind::Projective, "= 1"),
        (3, Family::ScatteredRank3, GroupKind::Projective, "= 1"),
        (4, Family::ScatteredRank3, GroupKind::Projective, "= 1"),
        (5, Family::Clubs, GroupKind::Semilinear, "= 1"),
        (5, Family::Clubs, GroupKind::Projective, ">= 2"),
    ];
    for (t, family, group, want) in cases {
        let name = format!("{} in PG(1,{}) under {}", family.label(), 1u32 << t, group.label());
        rec.grid.push(format!("(2,{t},2)"));
        let Some(ctx) = rec.ok(&name, ReductionContext::new(2, t, 2)) else {
            continue;
        };
        let Some(rep) = rec.ok(&name, linset::equivalence_classes(&ctx, &family, group, budget)) else {
            continue;
        };
        let n = rep.class_count();
        let count_ok = if want == "= 1" { n == 1 } else { n >= 2 };
        let centers = rep.center_orbits.as_ref().map_or(0, |o| o.centers);
        rec.check(
            format!("{name}: classes {want}"),
            count_ok && rep.methods_agree() && rep.witnesses_verified && centers <= 1057,
            || {
                format!(
                    "{n} classes, orbit count {:?}, witnesses verified {}, {centers} centers",
                    rep.center_orbits.as_ref().map(|o| o.count()),
                    rep.witnesses_verified
                )
            },
        )
        .with("classes", n)
        .with("members", rep.members)
        .with("centers", centers);
    }
}

/// `U = { (x, x^q) }`, a scattered linear set of rank 3 in PG(1, q^3).
pub fn scattered_rank3(ctx: &ReductionContext) -> Result<LinearSet> {
    let f = ctx.tower();
    let d = ctx.small_degree();
    let gens: Vec<Vec<u32>> = ctx.basis().basis().iter().map(|&b| vec![b, f.frob(b, d)]).collect();
    LinearSet::from_vectors(ctx, &gens)
}

fn two_planes(rec: &mut Recorder, budget: Budget) {
    for q in [5u64, 7] {
        let name = format!("PG(1,{})", q.pow(3));
        rec.grid.push(format!("(2,3,{q})"));
        if q == 7 && budget.limit() < Budget::Large.limit() {
            rec.skip(format!("{name}: two planes through each point"), "q = 7 runs with --budget large");
            continue;
        }
        let Some(ctx) = rec.ok(&name, ReductionContext::new(2, 3, q)) else {
            continue;
        };
        let Some(l) = rec.ok(&name, scattered_rank3(&ctx)) else {
            continue;
        };
        if !l.is_scattered() {
            rec.check(format!("{name}: scattered"), false, || "U = {(x, x^q)} is not scattered".into());
            continue;
        }
        let pi = l.subspace().clone();
        let pts = pi.points();
        let results: Vec<Result<linset::AltSubspaces>> = pts
            .par_iter()
            .map(|p| linset::alt_subspaces_through(&l, p, budget.limit()))
            .collect();
        let mut bad = None;
        for (p, r) in pts.iter().zip(results) {
            match r {
                Ok(a) if a.all.len() == 2 && a.all.contains(&pi) => {}
                Ok(a) => {
                    bad.get_or_insert(format!("point {p:?} lies on {} planes: {:?}", a.all.len(), a.all));
                }
                Err(e) => {
                    bad.get_or_insert(format!("point {p:?}: {e}"));
                }
            }
        }
        rec.check(format!("{name}: exactly two planes through each point of pi"), bad.is_none(), || bad.clone().unwrap())
            .with("points", pts.len());
    }
}

fn pseudoregulus(rec: &mut Recorder, budget: u128) {
    rec.grid.push("PG(3,8), q=2, t=3, r=2".into());
    let Some(ctx) = rec.ok("context", ReductionContext::new(4, 3, 2)) else {
        return;
    };
    let big = ctx.big();
    let unit = |i: usize| {
        let mut v = vec![0; 4];
        v[i] = 1;
        v
    };
    let (Some(t1), Some(t2)) = (
        rec.ok("T1", ProjSubspace::canonical(big, 4, &[unit(0), unit(1)])),
        rec.ok("T2", ProjSubspace::canonical(big, 4, &[unit(2), unit(3)])),
    ) else {
        return;
    };
    let rhos: Vec<u32> = big.nonzero().to_vec();
    let results: Vec<(u32, Result<(linset::LRhoF, linset::Pseudoregulus)>)> = rhos
        .par_iter()
        .map(|&rho| {
            let r = linset::build_l_rho_f(&ctx, &t1, &t2, 1, None, rho)
                .and_then(|lr| linset::pseudoregulus_of(&lr.linear_set, budget).map(|p| (lr, p)));
            (rho, r)
        })
        .collect();
    for (rho, r) in results {
        let name = format!("rho={}", ctx.tower().format_element(rho));
        let Some((lr, p)) = rec.ok(&name, r) else {
            continue;
        };
        let spectrum: Vec<String> = p.spectrum.iter().map(|x| x.to_string()).collect();
        let expect: BTreeSet<usize> = [0, 1, 3, 7].into();
        let ts: BTreeSet<&ProjSubspace> = p.transversals.iter().collect();
        let ok = lr.linear_set.is_scattered()
            && lr.linear_set.rank() == 6
            && p.verified(2)
            && p.secants.len() == 9
            && p.spectrum == expect
            && ts == BTreeSet::from([&t1, &t2]);
        rec.check(format!("{name}: scattered rank 6, 9 disjoint 7-secants, transversals T1 T2"), ok, || {
            format!(
                "rank {} scattered {} secants {} transversals {:?} spectrum {:?}",
                lr.linear_set.rank(),
                lr.linear_set.is_scattered(),
                p.secants.len(),
                p.transversals,
                p.spectrum
            )
        })
        .with("secants", p.secants.len())
        .with("spectrum", spectrum.join(","));
    }
}

fn blocking_sets(rec: &mut Recorder, budget: u128) {
    for (q, lines) in [(2u64, 21usize), (3, 91)] {
        let name = format!("rank-3 linear set in PG(2,{})", q * q);
        rec.grid.push(format!("(3,2,{q}), k=2"));
        let Some(ctx) = rec.ok(&name, ReductionContext::new(3, 2, q)) else {
            continue;
        };
        let Some(lb) = rec.ok(&name, applications::linear_blocking_set(&ctx, 2, budget)) else {
            continue;
        };
        let r = &lb.report;
        rec.check(format!("{name} blocks all lines"), r.blocking && r.subspaces_checked == lines && lb.dimension_argument, || {
            format!("unblocked line {:?}, {} lines checked", r.unblocked, r.subspaces_checked)
        })
        .with("lines", r.subspaces_checked)
        .with("size", r.size);
        let Some(b) = rec.ok(&name, PointSetInstance::new(ctx.big(), 3, &lb.linear_set.point_set(), Role::BlockingCandidate)) else {
            continue;
        };
        removal_check(rec, &name, &b, r.minimal, budget);
    }
    let name = "cone over a Baer subplane of PG(2,4) in PG(2,16)";
    rec.grid.push("(3,2,4), k=2, cone".into());
    let Some(ctx) = rec.ok(name, ReductionContext::new(3, 2, 4)) else {
        return;
    };
    let small = ctx.small();
    let unit = |i: usize| {
        let mut v = vec![0; 6];
        v[i] = 1;
        v
    };
    let (Some(plane), Some(vertex), Some(base)) = (
        rec.ok(name, ProjSubspace::canonical(small, 6, &[unit(0), unit(1), unit(2)])),
        rec.ok(name, ProjSubspace::point(small, &unit(5))),
        rec.ok(name, applications::subplane(small, 1)),
    ) else {
        return;
    };
    if let Some(c) = rec.ok(name, applications::cone_blocking_set(&ctx, 2, &vertex, &plane, &base, budget)) {
        rec.check(format!("{name}: base is not a semioval"), c.base_tangents.iter().any(|&x| x != 1), || {
            format!("tangent counts {:?}", c.base_tangents)
        });
        rec.check(format!("{name} blocks all lines"), c.report.blocking, || format!("{:?}", c.report.unblocked))
            .with("lines", c.report.subspaces_checked)
            .with("size", c.report.size);
        removal_check(rec, name, &c.blocking_set, c.report.minimal, budget);
    }
    if let Some(conic) = rec.ok("conic", applications::conic(small)) {
        let r = applications::cone_blocking_set(&ctx, 2, &vertex, &plane, &conic, budget);
        rec.check("conic base rejected as a semioval", matches!(&r, Err(Error::Precondition(m)) if m.contains("semioval")), || {
            format!("{:?}", r.map(|c| c.report.size))
        });
    }
}

/// Minimality by deleting each point in turn and re-running the blocking test.
fn removal_check(rec: &mut Recorder, name: &str, b: &PointSetInstance, reported: Option<bool>, budget: u128) {
    let res: Vec<(Vec<u32>, Result<bool>)> = b
        .points()
        .par_iter()
        .map(|p| (p.clone(), applications::is_blocking(&b.without(p), 1, false, budget).map(|r| r.blocking)))
        .collect();
    let mut bad = None;
    for (p, r) in res {
        match r {
            Ok(false) => {}
            other => {
                bad.get_or_insert(format!("removing {p:?}: {other:?}"));
            }
        }
    }
    rec.check(format!("{name} minimal by point removal"), bad.is_none() && reported == Some(true), || {
        bad.clone().unwrap_or_else(|| format!("tangent criterion says {reported:?}"))
    })
    .with("points", b.len());
}

fn semifields(rec: &mut Recorder) {
    for q in [4u64, 8, 9] {
        let name = format!("GF({q})");
        rec.grid.push(name.clone());
        let Some(t) = rec.ok(&name, FieldTower::of_order(q)) else {
            continue;
        };
        let tbl = SemifieldTable::from_field(&t);
        let r = applications::check_semifield(&tbl);
        let n = q as usize;
        let nuc = &r.nuclei;
        let full = [&nuc.left, &nuc.middle, &nuc.right, &nuc.nucleus, &nuc.commutative_center, &nuc.center]
            .iter()
            .all(|s| s.order() == n && s.is_field);
        rec.check(format!("{name}: (S1)-(S4) with full nuclei"), r.is_semifield() && full, || format!("{r:?}"));
        if q == 4 {
            spread_check(rec, &name, &tbl, 5);
        }
    }
    let name = "Dickson semifield of order 81";
    rec.grid.push("Dickson 81".into());
    let Some(k) = rec.ok(name, FieldTower::of_order(9)) else {
        return;
    };
    let Some(tbl) = rec.ok(name, SemifieldTable::dickson(&k, 1)) else {
        return;
    };
    let r = applications::check_semifield(&tbl);
    let fields = [&r.nuclei.left, &r.nuclei.middle, &r.nuclei.right, &r.nuclei.nucleus, &r.nuclei.center]
        .iter()
        .all(|s| s.is_field);
    rec.check(format!("{name}: (S1)-(S4), proper"), r.is_semifield() && r.is_proper(81) && fields, || {
        format!("{r:?}")
    })
    .with("left_nucleus", r.nuclei.left.order())
    .with("middle_nucleus", r.nuclei.middle.order())
    .with("right_nucleus", r.nuclei.right.order())
    .with("center", r.nuclei.center.order());
    spread_check(rec, name, &tbl, 82);
}

fn spread_check(rec: &mut Recorder, name: &str, tbl: &SemifieldTable, components: usize) {
    let Some(sp) = rec.ok(name, applications::semifield_spread(tbl, None)) else {
        return;
    };
    let n = tbl.order() as usize;
    let nonzero: usize = sp.components.iter().map(|c| c.len() - 1).sum();
    let ok = sp.components.len() == components && sp.partition && sp.closed_under_addition && nonzero == n * n - 1;
    rec.check(format!("{name}: spread partition"), ok, || {
        format!("{} components covering {nonzero} nonzero vectors, partition {}", sp.components.len(), sp.partition)
    })
    .with("components", sp.components.len())
    .with("nonzero_vectors", nonzero);
    rec.check(format!("{name}: nonzero spread-set elements invertible"), sp.invertible, || {
        "singular R_x".into()
    })
    .with("linear_set_points", sp.linear_set.len())
    .with("linear_set_rank", sp.linear_set.rank());
}
