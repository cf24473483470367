use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use fieldred::applications::{self, PointSetInstance, Role, SemifieldTable};
use fieldred::harness::{self, Budget, Config, Status, SuiteReport};
use fieldred::linset::{self, Family, GroupKind, LinearSet};
use fieldred::polar::{self, FormKind, FormSpec, StandardKind, TableQuery, TraceFunctional};
use fieldred::projspace::{self, ProjSubspace};
use fieldred::reduction::{self, ReductionContext};
use fieldred::{Error, FieldTower};

#[derive(Parser)]
#[command(name = "fieldred", version, about = "Field reduction and finite geometry toolkit")]
struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Enumeration budget: small, medium, large or an object count.
    /// FIELDRED_BUDGET overrides it.
    #[arg(long, global = true, default_value = "small")]
    budget: String,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Include wall time in reports.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Finite field data and arithmetic.
    Field(FieldArgs),
    /// Field-reduce a subspace of PG(r-1, q^t) into PG(rt-1, q).
    Reduce(ReduceArgs),
    /// The Desarguesian spread D_{r,t,q}, or the spread from conjugate spans.
    Spread(SpreadArgs),
    /// Reduce the canonical subgeometry PG(r-1, q) onto the Segre variety.
    Segre(CtxArgs),
    /// Linear sets.
    #[command(subcommand)]
    Linset(LinsetCommand),
    /// Forms and polar spaces.
    #[command(subcommand)]
    Polar(PolarCommand),
    /// Linear blocking sets and the cone construction.
    Blocking(BlockingArgs),
    /// Semifield axioms, nuclei and spread sets.
    Semifield(SemifieldArgs),
    /// Run verification suites.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct CtxArgs {
    #[arg(long)]
    r: usize,
    #[arg(long)]
    t: usize,
    #[arg(long)]
    q: u64,
}

impl CtxArgs {
    fn ctx(&self) -> fieldred::Result<ReductionContext> {
        ReductionContext::new(self.r, self.t, self.q)
    }
}

#[derive(Args)]
struct FieldArgs {
    #[arg(long)]
    q: u64,
    /// Monic modulus c0,c1,...,1 (default: least primitive polynomial).
    #[arg(long)]
    modulus: Option<String>,
    #[arg(long, value_enum)]
    op: Option<Op>,
    #[arg(long)]
    a: Option<String>,
    #[arg(long)]
    b: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Op {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Args)]
struct ReduceArgs {
    #[command(flatten)]
    ctx: CtxArgs,
    /// Spanning vectors over F_{q^t}, rows separated by ';'.
    #[arg(long)]
    rows: String,
}

#[derive(Args)]
struct SpreadArgs {
    #[command(flatten)]
    ctx: CtxArgs,
    /// Build the spread from conjugate spans of the default skew space.
    #[arg(long)]
    conjugate: bool,
}

#[derive(Subcommand)]
enum LinsetCommand {
    /// Points, weights and identities of B(U), U the F_q-span of the vectors.
    Analyze {
        #[command(flatten)]
        ctx: CtxArgs,
        /// Vectors over F_{q^t}, rows separated by ';'.
        #[arg(long)]
        vectors: String,
    },
    /// Equivalence classes of clubs or scattered rank-3 sets of PG(1, q^t).
    Classes {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        q: u64,
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, value_enum, default_value_t = GroupArg::Pgl)]
        group: GroupArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Clubs,
    Scattered,
}

#[derive(Clone, Copy, ValueEnum)]
enum GroupArg {
    Pgl,
    Pgammal,
}

#[derive(Subcommand)]
enum PolarCommand {
    /// Classify a form over GF(q).
    Classify {
        #[arg(long)]
        q: u64,
        /// Standard form kind (hyperbolic, elliptic, parabolic, hermitian, alternating).
        #[arg(long, conflicts_with = "kind")]
        standard: Option<String>,
        /// Form kind for --coeffs (quadratic, symmetric, alternating, hermitian, ...).
        #[arg(long, requires = "coeffs")]
        kind: Option<String>,
        /// Upper triangle (quadratic) or full matrix, row by row, comma separated.
        #[arg(long)]
        coeffs: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        s: u32,
    },
    /// Compose a standard form over GF(q^t) with Tr(alpha x) and compare the
    /// computed type with the predicted one.
    Reduce {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        alpha: String,
        /// Parabolic forms: the coefficient of the anisotropic square.
        #[arg(long)]
        gamma: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ConeBase {
    Baer,
    Line,
    Conic,
}

#[derive(Args)]
struct BlockingArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    t: usize,
    #[arg(long)]
    q: u64,
    /// Blocking with respect to (k-1)-spaces of PG(n-1, q^t).
    #[arg(long)]
    k: usize,
    /// Use the cone construction (n = 3, k = 2 only) with this planar base.
    #[arg(long, value_enum)]
    cone: Option<ConeBase>,
}

#[derive(Args)]
struct SemifieldArgs {
    /// Table file: `p m`, then p^m rows of p^m indices.
    #[arg(long, conflicts_with_all = ["field", "dickson"])]
    file: Option<String>,
    /// Use the multiplication table of GF(q).
    #[arg(long, conflicts_with = "dickson")]
    field: Option<u64>,
    /// Dickson semifield on GF(q)^2, q odd and not prime.
    #[arg(long)]
    dickson: Option<u64>,
    /// Also build the spread and the linear set L(S).
    #[arg(long)]
    spread: bool,
    /// Order of the left-nucleus subfield used as scalars (default: all of it).
    #[arg(long, requires = "spread")]
    nucleus_order: Option<u32>,
    /// Print the table in file format instead of a report.
    #[arg(long)]
    dump: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name, or `all`.
    #[arg(long, default_value = "all")]
    suite: String,
}

/// Command outcome: report plus whether every check passed.
struct Outcome {
    report: Value,
    ok: bool,
    skipped: bool,
}

impl Outcome {
    fn new(report: Value, ok: bool) -> Self {
        Outcome {
            report,
            ok,
            skipped: false,
        }
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn parse_rows(t: &FieldTower, s: &str) -> fieldred::Result<Vec<Vec<u32>>> {
    s.split(';')
        .filter(|r| !r.trim().is_empty())
        .map(|r| projspace::parse_row(t, r))
        .collect()
}

fn fmt_vec(t: &FieldTower, v: &[u32]) -> String {
    format!("({})", projspace::format_vector(t, v))
}

/// Canonical rows, `;`-separated.
fn subspace_rows(s: &ProjSubspace) -> Value {
    Value::String(s.to_text())
}

fn run(cli: &Cli, cfg: &Config) -> fieldred::Result<Outcome> {
    let budget = cfg.budget.limit();
    match &cli.command {
        Command::Field(a) => field(a),
        Command::Reduce(a) => {
            let ctx = a.ctx.ctx()?;
            let rows = parse_rows(ctx.tower(), &a.rows)?;
            let src = ProjSubspace::canonical(ctx.big(), ctx.r(), &rows)?;
            let img = ctx.field_reduce(&src)?;
            let ok = img.rank() == ctx.t() * src.rank();
            Ok(Outcome::new(
                json!({
                    "source": {"dimension": src.dim(), "rows": subspace_rows(&src)},
                    "image": {"dimension": img.dim(), "rows": subspace_rows(&img)},
                    "checks": {"image_dimension_kt_minus_1": ok},
                }),
                ok,
            ))
        }
        Command::Spread(a) => {
            let ctx = a.ctx.ctx()?;
            let sp = if a.conjugate {
                ctx.spread_via_conjugates(&ctx.default_skew_space())?
            } else {
                ctx.desarguesian_spread(budget)?
            };
            let q = a.ctx.q as u128;
            let formula = (q.pow((a.ctx.r * a.ctx.t) as u32) - 1) / (q.pow(a.ctx.t as u32) - 1);
            let count_ok = sp.len() as u128 == formula;
            let normal = sp.is_normal();
            let elements: Vec<Value> = sp.elements().iter().map(subspace_rows).collect();
            Ok(Outcome::new(
                json!({
                    "construction": if a.conjugate { "conjugate" } else { "desarguesian" },
                    "elements": elements,
                    "checks": {
                        "partition": true,
                        "cardinality": count_ok,
                        "normal": normal,
                    },
                    "count": sp.len(),
                }),
                count_ok && normal,
            ))
        }
        Command::Segre(a) => {
            let ctx = a.ctx()?;
            let pts = projspace::all_points(ctx.small(), ctx.r());
            let c = reduction::subgeometry_on_segre(&ctx, &pts)?;
            Ok(Outcome::new(
                json!({
                    "subgeometry_points": pts.len(),
                    "points_checked": c.points_checked,
                    "points_on_variety": c.points_on_variety,
                    "checks": {"all_on_variety": c.all_on_variety()},
                }),
                c.all_on_variety(),
            ))
        }
        Command::Linset(LinsetCommand::Analyze { ctx, vectors }) => {
            let ctx = ctx.ctx()?;
            let v = parse_rows(ctx.tower(), vectors)?;
            let l = LinearSet::from_vectors(&ctx, &v)?;
            let w = l.weight_identities();
            let points: Vec<Value> = l
                .points()
                .iter()
                .map(|p| json!({"point": fmt_vec(ctx.tower(), &p.point), "weight": p.weight}))
                .collect();
            Ok(Outcome::new(
                json!({
                    "rank": l.rank(),
                    "size": l.len(),
                    "histogram": w.histogram,
                    "scattered": l.is_scattered(),
                    "club": l.is_club(),
                    "points": points,
                    "checks": {
                        "size_is_sum": w.size_is_sum,
                        "weighted_count": w.weighted_count,
                        "size_bound": w.size_bound,
                        "size_mod_q": w.size_mod_q,
                        "scattered_bound": l.scattered_bound_holds(),
                    },
                }),
                w.all_hold() && l.scattered_bound_holds(),
            ))
        }
        Command::Linset(LinsetCommand::Classes { t, q, family, group }) => {
            let ctx = ReductionContext::new(2, *t, *q)?;
            let fam = match family {
                FamilyArg::Clubs => Family::Clubs,
                FamilyArg::Scattered => Family::ScatteredRank3,
            };
            let g = match group {
                GroupArg::Pgl => GroupKind::Projective,
                GroupArg::Pgammal => GroupKind::Semilinear,
            };
            let rep = linset::equivalence_classes(&ctx, &fam, g, budget)?;
            let classes: Vec<Value> = rep
                .classes
                .iter()
                .map(|c| {
                    json!({
                        "members": c.members,
                        "representative": c.representative.iter().map(|p| fmt_vec(ctx.tower(), p)).collect::<Vec<_>>(),
                    })
                })
                .collect();
            let ok = rep.methods_agree() && rep.witnesses_verified;
            Ok(Outcome::new(
                json!({
                    "family": fam.label(),
                    "group": g.label(),
                    "members": rep.members,
                    "class_count": rep.class_count(),
                    "classes": classes,
                    "center_orbits": rep.center_orbits.as_ref().map(|o| json!({"centers": o.centers, "orbits": o.count(), "sizes": o.sizes})),
                    "checks": {"methods_agree": rep.methods_agree(), "witnesses_verified": rep.witnesses_verified},
                }),
                ok,
            ))
        }
        Command::Polar(PolarCommand::Classify { q, standard, kind, coeffs, n, s }) => {
            let field = FieldTower::of_order(*q)?.full();
            let f = match (standard, kind, coeffs) {
                (Some(k), _, _) => {
                    let n = n.ok_or_else(|| usage("--standard needs --n"))?;
                    polar::standard_form(StandardKind::parse(k)?, n, &field)?
                }
                (None, Some(k), Some(c)) => {
                    let vals = projspace::parse_row(field.tower(), c)?;
                    FormSpec::from_coefficients(&field, FormKind::parse(k)?, &vals, *s)?
                }
                _ => return Err(usage("give --standard KIND --n N, or --kind KIND --coeffs LIST")),
            };
            let ty = polar::classify(&f)?;
            let zeros = polar::projective_zero_count(&f);
            let expected = polar::expected_zero_count(ty.label, f.n(), *q);
            let ok = expected.is_none_or(|e| e == zeros);
            Ok(Outcome::new(
                json!({
                    "form": f.to_text(),
                    "type": ty.label.name(),
                    "witt_index": ty.witt_index,
                    "sign": ty.sign,
                    "projective_zeros": zeros,
                    "expected_zeros": expected,
                    "checks": {"zero_count": ok},
                }),
                ok,
            ))
        }
        Command::Polar(PolarCommand::Reduce { kind, q, t, r, alpha, gamma }) => polar_reduce(kind, *q, *t, *r, alpha, gamma.as_deref()),
        Command::Blocking(a) => blocking(a, budget),
        Command::Semifield(a) => semifield(a),
        Command::Verify(a) => verify(&a.suite, cfg, cli.timing),
    }
}

fn field(a: &FieldArgs) -> fieldred::Result<Outcome> {
    let (p, h) = fieldred::gf::prime_power(a.q).ok_or(Error::NotPrime(a.q))?;
    let modulus = match &a.modulus {
        Some(m) => Some(
            m.split(',')
                .map(|c| c.trim().parse::<u32>().map_err(|e| usage(e.to_string())))
                .collect::<fieldred::Result<Vec<_>>>()?,
        ),
        None => None,
    };
    let t = FieldTower::new(p, h, modulus.as_deref())?;
    let mut report = json!({
        "spec": t.spec_string(),
        "p": t.p(),
        "h": t.h(),
        "order": t.order(),
        "generator": t.format_element(t.generator()),
        "subfield_degrees": t.subfield_degrees(),
    });
    if let Some(op) = a.op {
        let x = t.parse_element(a.a.as_deref().ok_or_else(|| usage("--op needs --a"))?)?;
        let y = t.parse_element(a.b.as_deref().ok_or_else(|| usage("--op needs --b"))?)?;
        let z = match op {
            Op::Add => t.add(x, y),
            Op::Sub => t.sub(x, y),
            Op::Mul => t.mul(x, y),
            Op::Div => t.try_inv(y).map(|inv| t.mul(x, inv)).ok_or(Error::DivisionByZero)?,
        };
        report["result"] = Value::String(t.format_element(z));
    }
    Ok(Outcome::new(report, true))
}

fn polar_reduce(kind: &str, q: u64, t: usize, r: usize, alpha: &str, gamma: Option<&str>) -> fieldred::Result<Outcome> {
    let (p, e) = fieldred::gf::prime_power(q).ok_or(Error::NotPrime(q))?;
    let tower = FieldTower::new(p, e * t as u32, None)?;
    let big = tower.full();
    let small = tower.subfield(e)?;
    let kind = StandardKind::parse(kind)?;
    let src = match (kind, gamma) {
        (StandardKind::Parabolic, Some(g)) => polar::parabolic_form(&big, r, tower.parse_element(g)?)?,
        (_, Some(_)) => return Err(usage("--gamma applies to parabolic forms only")),
        _ => polar::standard_form(kind, r, &big)?,
    };
    let a = tower.parse_element(alpha)?;
    let l = TraceFunctional::new(&big, &small, a)?;
    let source = polar::classify(&src)?;
    let composed = polar::trace_compose(&src, &l)?;
    let computed = polar::classify(&composed)?;
    let predicted = polar::predicted_type(&TableQuery::new(&src, &source, &l)?)?;
    let agree = predicted == computed.label;
    Ok(Outcome::new(
        json!({
            "source": {"form": src.to_text(), "type": source.label.name()},
            "reduced": {"form": composed.to_text(), "type": computed.label.name(), "witt_index": computed.witt_index},
            "predicted": predicted.name(),
            "alpha": tower.format_element(a),
            "checks": {"predicted_matches_computed": agree},
        }),
        agree,
    ))
}

fn blocking(a: &BlockingArgs, budget: u128) -> fieldred::Result<Outcome> {
    let ctx = ReductionContext::new(a.n, a.t, a.q)?;
    let tw = ctx.tower();
    let summary = |r: &applications::BlockingReport| {
        json!({
            "size": r.size,
            "subspaces_checked": r.subspaces_checked,
            "blocking": r.blocking,
            "minimal": r.minimal,
            "small": r.small,
            "redei": r.redei,
            "unblocked": r.unblocked.as_ref().map(subspace_rows),
            "removable": r.removable.as_ref().map(|p| fmt_vec(tw, p)),
        })
    };
    let Some(base) = a.cone else {
        let lb = applications::linear_blocking_set(&ctx, a.k, budget)?;
        let ok = lb.report.blocking && lb.report.minimal == Some(true) && lb.dimension_argument;
        return Ok(Outcome::new(
            json!({
                "pi": subspace_rows(&lb.pi),
                "rank": lb.pi.rank(),
                "points": lb.linear_set.point_set().iter().map(|p| fmt_vec(tw, p)).collect::<Vec<_>>(),
                "report": summary(&lb.report),
                "checks": {"dimension_argument": lb.dimension_argument, "blocking": lb.report.blocking, "minimal": lb.report.minimal == Some(true)},
            }),
            ok,
        ));
    };
    if a.n != 3 || a.k != 2 {
        return Err(usage("the cone example lives in PG(2, q^t) with k = 2"));
    }
    let small = ctx.small();
    let nt = a.n * a.t;
    let unit = |i: usize| {
        let mut v = vec![0; nt];
        v[i] = 1;
        v
    };
    let plane = ProjSubspace::canonical(small, nt, &[unit(0), unit(1), unit(2)])?;
    let vgens: Vec<Vec<u32>> = (nt - (nt - a.k * a.t + 1) + 2..nt).map(unit).collect();
    let vertex = ProjSubspace::canonical(small, nt, &vgens)?;
    let base = match base {
        ConeBase::Baer => {
            let d = small.degree();
            if d % 2 != 0 {
                return Err(usage("a Baer subplane needs q to be a square"));
            }
            applications::subplane(small, d / 2)?
        }
        ConeBase::Line => PointSetInstance::from_subspace(&ProjSubspace::canonical(small, 3, &[vec![1, 0, 0], vec![0, 1, 0]])?, Role::Base),
        ConeBase::Conic => applications::conic(small)?,
    };
    let c = applications::cone_blocking_set(&ctx, a.k, &vertex, &plane, &base, budget)?;
    Ok(Outcome::new(
        json!({
            "vertex": subspace_rows(&vertex),
            "plane": subspace_rows(&plane),
            "base_tangents": c.base_tangents,
            "cone_points": c.cone.len(),
            "report": summary(&c.report),
            "checks": {"blocking": c.report.blocking, "minimal": c.report.minimal == Some(true)},
        }),
        c.minimal_blocking(),
    ))
}

fn substructure(s: &applications::Substructure) -> Value {
    json!({"order": s.order(), "is_field": s.is_field})
}

fn semifield(a: &SemifieldArgs) -> fieldred::Result<Outcome> {
    let tbl = match (&a.file, a.field, a.dickson) {
        (Some(path), _, _) => {
            let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{path}: {e}")))?;
            SemifieldTable::parse(&text)?
        }
        (_, Some(q), _) => SemifieldTable::from_field(&FieldTower::of_order(q)?),
        (_, _, Some(q)) => SemifieldTable::dickson(&FieldTower::of_order(q)?, 1)?,
        _ => return Err(usage("give --file, --field or --dickson")),
    };
    if a.dump {
        return Ok(Outcome::new(Value::String(tbl.to_text()), true));
    }
    let r = applications::check_semifield(&tbl);
    let n = &r.nuclei;
    let mut report = json!({
        "order": tbl.order(),
        "p": tbl.p(),
        "m": tbl.m(),
        "axioms": {"S1": r.s1, "S2": r.s2, "S3": r.s3, "S4": r.s4},
        "distributivity_witness": r.distributivity_witness,
        "zero_divisor": r.zero_divisor,
        "identity": r.identity,
        "proper": r.is_proper(tbl.order()),
        "nuclei": {
            "left": substructure(&n.left),
            "middle": substructure(&n.middle),
            "right": substructure(&n.right),
            "nucleus": substructure(&n.nucleus),
            "commutative_center": substructure(&n.commutative_center),
            "center": substructure(&n.center),
        },
    });
    let mut ok = r.is_semifield();
    if a.spread && ok {
        let sp = applications::semifield_spread(&tbl, a.nucleus_order)?;
        let nonzero: usize = sp.components.iter().map(|c| c.len() - 1).sum();
        let tw = sp.linear_set.ctx().tower();
        report["spread"] = json!({
            "components": sp.components.len(),
            "nonzero_vectors": nonzero,
            "partition": sp.partition,
            "closed_under_addition": sp.closed_under_addition,
            "invertible": sp.invertible,
            "scalar_order": sp.scalar_order,
            "l": sp.l,
            "linear_set": {
                "rank": sp.linear_set.rank(),
                "size": sp.linear_set.len(),
                "histogram": sp.linear_set.weight_distribution(),
                "points": sp.linear_set.points().iter().map(|p| json!({"point": fmt_vec(tw, &p.point), "weight": p.weight})).collect::<Vec<_>>(),
            },
        });
        ok &= sp.partition && sp.closed_under_addition && sp.invertible;
    }
    Ok(Outcome::new(report, ok))
}

fn suite_json(rep: &SuiteReport, timing: bool) -> Value {
    let checks: Vec<Value> = rep
        .checks
        .iter()
        .map(|c| {
            let mut m = Map::new();
            m.insert("name".into(), json!(c.name));
            m.insert("status".into(), json!(c.status.name()));
            if let Some(w) = &c.witness {
                m.insert("witness".into(), json!(w));
            }
            if !c.values.is_empty() {
                m.insert("values".into(), json!(c.values));
            }
            Value::Object(m)
        })
        .collect();
    let mut v = json!({
        "suite": rep.suite,
        "criterion": rep.criterion,
        "grid": rep.grid,
        "status": rep.status().name(),
        "checks": checks,
    });
    if timing {
        v["wall_time_s"] = json!((rep.elapsed.as_secs_f64() * 1000.0).round() / 1000.0);
    }
    v
}

fn verify(suite: &str, cfg: &Config, timing: bool) -> fieldred::Result<Outcome> {
    let names: Vec<&str> = if suite == "all" {
        harness::SUITES.to_vec()
    } else {
        harness::criterion_of(suite).ok_or_else(|| {
            usage(format!("unknown suite '{suite}'; expected all or one of {}", harness::SUITES.join(", ")))
        })?;
        vec![suite]
    };
    let mut reports = Vec::new();
    for n in names {
        reports.push(harness::run_suite(n, cfg)?);
    }
    let ok = reports.iter().all(|r| r.status() != Status::Fail);
    let skipped = reports.iter().any(|r| r.status() == Status::SkippedBudget);
    let mut out = Outcome::new(
        json!({
            "budget": cfg.budget.name(),
            "seed": cfg.seed,
            "suites": reports.iter().map(|r| suite_json(r, timing)).collect::<Vec<_>>(),
        }),
        ok,
    );
    out.skipped = skipped;
    // Text rendering keeps the suite layout.
    out.report["text"] = Value::String(reports.iter().map(|r| r.to_text(timing)).collect());
    Ok(out)
}

fn render_text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                match x {
                    Value::Object(_) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_text(x, indent + 1, out);
                    }
                    Value::Array(a) if a.iter().any(|e| e.is_object() || e.is_array()) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_text(x, indent + 1, out);
                    }
                    _ => out.push_str(&format!("{pad}{k}: {}\n", scalar(x))),
                }
            }
        }
        Value::Array(a) => {
            for x in a {
                match x {
                    Value::Object(_) | Value::Array(_) if x.as_array().is_none_or(|a| a.iter().any(|e| e.is_object() || e.is_array())) => {
                        out.push_str(&format!("{pad}-\n"));
                        render_text(x, indent + 1, out);
                    }
                    _ => out.push_str(&format!("{pad}- {}\n", scalar(x))),
                }
            }
        }
        _ => out.push_str(&format!("{pad}{}\n", scalar(v))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(a) => format!("[{}]", a.iter().map(scalar).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BudgetExceeded { .. } => 3,
        Error::Invariant(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let budget_arg = std::env::var("FIELDRED_BUDGET").unwrap_or_else(|_| cli.budget.clone());
    let budget = match Budget::parse(&budget_arg) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cfg = Config {
        budget,
        seed: cli.seed,
    };
    match run(&cli, &cfg) {
        Ok(mut out) => {
            let text = out
                .report
                .as_object_mut()
                .and_then(|m| m.remove("text"))
                .and_then(|t| t.as_str().map(str::to_string));
            let body = match cli.format {
                Format::Json => format!("{}\n", serde_json::to_string_pretty(&out.report).expect("serializable")),
                Format::Text => match (text, &out.report) {
                    (Some(t), _) => t,
                    (None, Value::String(s)) => s.clone(),
                    (None, v) => {
                        let mut s = String::new();
                        render_text(v, 0, &mut s);
                        s
                    }
                },
            };
            // a closed pipe (e.g. `| head`) is not an error
            let mut stdout = std::io::stdout().lock();
            if let Err(e) = stdout.write_all(body.as_bytes()).and_then(|_| stdout.flush()) {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            }
            ExitCode::from(if !out.ok {
                1
            } else if out.skipped {
                3
            } else {
                0
            })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
