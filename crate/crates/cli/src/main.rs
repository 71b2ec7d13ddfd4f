mod config;

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::Ratio;
use num_traits::One;
use quadcantor::cns::CnsBasis;
use quadcantor::fractal::IfsSpec;
use quadcantor::ideals::{factor_element, factor_rational_prime, ElementFactorization, PrimeIdeal, SplitKind};
use quadcantor::intersection::{self, full_intersection, Mode};
use quadcantor::membership::{build_state_graph, Coding};
use quadcantor::ordercalc::{c2_constant, ord_mod, ord_prime_power_detailed};
use quadcantor::quadring::{FieldSpec, QuadInt};
use quadcantor::{Error, Ifs};
use serde_json::{json, Value};

const SUBCOMMANDS: &[&str] = &[
    "factor",
    "order",
    "member",
    "intersect",
    "bound",
    "dim",
    "render",
    "cns",
];

#[derive(Parser)]
#[command(
    name = "quadcantor",
    version,
    about = "Points with finite alpha-adic expansion on self-similar sets"
)]
#[command(args_override_self = true)]
struct Cli {
    /// Field parameter d: negative and squarefree.
    #[arg(short = 'd', global = true, default_value_t = -1, allow_hyphen_values = true)]
    d: i64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Prime ideal factorization of an element.
    Factor {
        #[arg(allow_hyphen_values = true)]
        element: String,
    },
    /// Multiplicative order of beta modulo a prime power.
    Order(OrderArgs),
    /// Decide whether a point lies on the attractor.
    Member(MemberArgs),
    /// Enumerate D_alpha ∩ S.
    Intersect(IntersectArgs),
    /// Certificate computation trace.
    Bound(BoundArgs),
    /// Dimension and covering constants.
    Dim(DimArgs),
    /// Sample the attractor to CSV and optionally SVG.
    Render(RenderArgs),
    /// Canonical number system expansions with base -n+i.
    Cns(CnsArgs),
}

#[derive(Args)]
struct IfsArgs {
    #[arg(long, allow_hyphen_values = true)]
    beta: String,
    /// Comma-separated digit list.
    #[arg(long, allow_hyphen_values = true)]
    digits: String,
}

#[derive(Args)]
struct OrderArgs {
    #[arg(long, allow_hyphen_values = true)]
    beta: String,
    /// Rational prime below the prime ideal.
    #[arg(long)]
    p: String,
    /// Which prime above p, in splitting order.
    #[arg(long, default_value_t = 0)]
    prime: usize,
    #[arg(long)]
    n: u32,
    /// Also compute the order by direct powering.
    #[arg(long)]
    brute: bool,
}

#[derive(Args)]
struct MemberArgs {
    #[command(flatten)]
    ifs: IfsArgs,
    /// Point as `num/den`.
    #[arg(long, allow_hyphen_values = true)]
    point: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Certified,
    Bounded,
}

#[derive(Args)]
struct IntersectArgs {
    #[arg(long, allow_hyphen_values = true)]
    alpha: String,
    #[command(flatten)]
    ifs: IfsArgs,
    #[arg(long, value_enum, default_value_t = ModeArg::Bounded)]
    mode: ModeArg,
    #[arg(long, default_value_t = 3)]
    nmax: u32,
    #[arg(long, default_value_t = intersection::DEFAULT_CAP)]
    cap: u64,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long, allow_hyphen_values = true)]
    alpha: String,
    #[command(flatten)]
    ifs: IfsArgs,
}

#[derive(Args)]
struct DimArgs {
    #[command(flatten)]
    ifs: IfsArgs,
    /// Rows of the covering table, at delta = 2^-j.
    #[arg(long, default_value_t = 8)]
    rows: u32,
    /// Comma-separated ascending depths for the box-counting estimate.
    #[arg(long)]
    depths: Option<String>,
    #[arg(long, default_value_t = 1 << 22)]
    cap: u64,
}

#[derive(Args)]
struct RenderArgs {
    #[command(flatten)]
    ifs: IfsArgs,
    #[arg(long)]
    depth: u32,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long, default_value_t = 1 << 22)]
    cap: u64,
}

#[derive(Args)]
struct CnsArgs {
    #[arg(long)]
    n: u32,
    #[arg(
        long,
        allow_hyphen_values = true,
        required_unless_present = "evaluate",
        conflicts_with = "evaluate"
    )]
    expand: Option<String>,
    #[arg(long)]
    evaluate: Option<String>,
}

/// Failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } => 1,
            Error::CapExceeded { .. } => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn io_failure(e: std::io::Error, path: &std::path::Path) -> Failure {
    Failure {
        code: 2,
        message: format!("cannot write {}: {e}", path.display()),
    }
}

type Outcome = Result<String, Failure>;

fn s<V: ToString>(v: V) -> Value {
    Value::String(v.to_string())
}

fn float(v: f64) -> Value {
    Value::String(format!("{v:.12}"))
}

fn record(mut body: Value) -> String {
    body["schema"] = json!(1);
    let mut out = serde_json::to_string_pretty(&body).expect("serialisable");
    out.push('\n');
    out
}

fn parse_ifs(field: FieldSpec, args: &IfsArgs) -> Result<Ifs, Error> {
    let beta = field.parse(&args.beta)?;
    let digits = args
        .digits
        .split(',')
        .map(|t| field.parse(t))
        .collect::<Result<Vec<_>, _>>()?;
    IfsSpec::new(beta, digits)
}

fn kind_name(k: SplitKind) -> &'static str {
    match k {
        SplitKind::Ramified => "ramified",
        SplitKind::Split => "split",
        SplitKind::Inert => "inert",
    }
}

fn prime_json(q: &PrimeIdeal<BigInt>) -> Value {
    let (a, b, c) = q.hnf().hnf();
    json!({
        "ideal": s(q),
        "p": s(q.p()),
        "e": s(q.e()),
        "f": s(q.f()),
        "kind": kind_name(q.kind()),
        "hnf": [s(a), s(b), s(c)],
    })
}

fn factorization_json(f: &ElementFactorization<BigInt>) -> Value {
    let factors: Vec<Value> = f
        .factors
        .iter()
        .map(|(q, b)| {
            let mut v = prime_json(q);
            v["exponent"] = s(b);
            v
        })
        .collect();
    let product = f.reconstruct();
    let (a, b, c) = product.hnf();
    json!({
        "element": s(&f.element),
        "norm": s(f.element.norm()),
        "factors": factors,
        "product_hnf": [s(a), s(b), s(c)],
    })
}

fn digits_json(d: &[QuadInt<BigInt>]) -> Value {
    Value::Array(d.iter().map(s).collect())
}

fn coding_json(c: Option<&Coding<BigInt>>) -> (Value, Value) {
    match c {
        Some(c) => (digits_json(&c.preperiod), digits_json(&c.period)),
        None => (json!([]), json!([])),
    }
}

fn run_factor(field: FieldSpec, element: &str) -> Outcome {
    let alpha = field.parse(element)?;
    let f = factor_element(&alpha)?;
    let mut body = factorization_json(&f);
    body["field"] = s(field.d());
    Ok(record(body))
}

fn run_order(field: FieldSpec, a: &OrderArgs) -> Outcome {
    let beta = field.parse(&a.beta)?;
    let p: BigInt = a.p.trim().parse().map_err(|_| Error::Parse {
        token: a.p.clone(),
        reason: "expected a rational prime".into(),
    })?;
    let splitting = factor_rational_prime(field, &p)?;
    let prime = splitting
        .primes
        .get(a.prime)
        .ok_or_else(|| Error::Precondition(format!("{p} has {} prime(s) above it", splitting.primes.len())))?;
    let res = ord_prime_power_detailed(&beta, prime, a.n)?;
    let mut body = json!({
        "field": s(field.d()),
        "beta": s(&beta),
        "prime": prime_json(prime),
        "n": s(a.n),
        "order": s(&res.order),
        "m": s(&res.stabilization.m),
        "n0": s(res.stabilization.n0),
        "used_closed_form": res.used_closed_form,
    });
    if a.brute {
        body["brute_force"] = s(ord_mod(&beta, &prime.pow(a.n))?);
    }
    Ok(record(body))
}

fn run_member(field: FieldSpec, a: &MemberArgs) -> Outcome {
    let spec = parse_ifs(field, &a.ifs)?;
    let z = field.parse_point(&a.point)?;
    let graph = build_state_graph(z.num(), z.den(), &spec)?;
    let coding = graph.coding();
    let (pre, per) = coding_json(coding.as_ref());
    let u_norm = z.den() * z.den();
    Ok(record(json!({
        "point": s(&z),
        "member": graph.is_member(),
        "preperiod": pre,
        "period": per,
        "states": s(graph.len()),
        "bound": s(spec.period_bound(&u_norm)),
    })))
}

fn precondition_json(r: &intersection::PreconditionReport<BigInt>) -> Value {
    json!({
        "alpha_beta_coprime": r.alpha_beta_coprime,
        "case_ii_eligible": r.case_ii_eligible,
        "case_i_applicable": r.case_i_applicable,
        "case_ii_applicable": r.case_ii_applicable,
        "applicable_case": r.applicable_case.map_or(Value::Null, |c| json!(c.name())),
        "alpha_factorization": factorization_json(&r.alpha_factorization),
    })
}

fn covering_json(c: &quadcantor::fractal::CoveringConstants<BigInt>) -> Value {
    json!({
        "radius_sq": s(&c.radius_sq),
        "sigma": float(c.sigma),
        "digit_count": s(c.digit_count),
        "beta_norm": s(&c.beta_norm),
        "c1": float(c.c1()),
    })
}

fn certificate_json(c: &intersection::CertifiedBound<BigInt>) -> Value {
    json!({
        "case": c.case.name(),
        "n0": s(c.n0),
        "formula_n0": s(c.formula_n0),
        "ell": s(c.ell),
        "c1": float(c.c1),
        "c2": s(&c.c2),
        "k_star": s(c.k_star),
        "x_threshold": s(&c.x_threshold),
        "x_min": s(&c.x_min),
    })
}

fn run_intersect(field: FieldSpec, a: &IntersectArgs) -> Outcome {
    let alpha = field.parse(&a.alpha)?;
    let spec = parse_ifs(field, &a.ifs)?;
    let mode = match a.mode {
        ModeArg::Certified => Mode::Certified { fallback_nmax: a.nmax },
        ModeArg::Bounded => Mode::Bounded { nmax: a.nmax },
    };
    let r = full_intersection(&alpha, &spec, mode, a.cap)?;
    let points: Vec<Value> = r
        .points
        .iter()
        .map(|p| {
            let (pre, per) = coding_json(Some(&p.coding));
            json!({
                "value": s(&p.value),
                "num": s(&p.numerator),
                "den_pow": s(p.den_pow),
                "tuple": p.tuple.exponents.iter().map(s).collect::<Vec<_>>(),
                "preperiod": pre,
                "period": per,
            })
        })
        .collect();
    Ok(record(json!({
        "field": s(field.d()),
        "alpha": s(&alpha),
        "beta": s(spec.beta()),
        "digits": digits_json(spec.digits()),
        "mode": match a.mode { ModeArg::Certified => "certified", ModeArg::Bounded => "bounded" },
        "preconditions": precondition_json(&r.preconditions),
        "sigma": float(r.covering.sigma),
        "c1_params": covering_json(&r.covering),
        "c2": r.lower_bound.as_ref().map_or(Value::Null, |lb| s(&lb.c2)),
        "n0": r.certified.as_ref().map_or(Value::Null, |c| s(c.n0)),
        "level": s(r.level),
        "exhausted": r.exhausted,
        "points": points,
    })))
}

fn run_bound(field: FieldSpec, a: &BoundArgs) -> Outcome {
    let alpha = field.parse(&a.alpha)?;
    let spec = parse_ifs(field, &a.ifs)?;
    let report = intersection::preconditions(&alpha, &spec)?;
    let covering = spec.covering_constants();
    let mut body = json!({
        "preconditions": precondition_json(&report),
        "c1_params": covering_json(&covering),
        "certificate": Value::Null,
    });
    if report.applicable_case.is_some() {
        let primes: Vec<_> = report.alpha_factorization.primes().cloned().collect();
        let lb = c2_constant(spec.beta(), &primes)?;
        body["stabilization_exponents"] = Value::Array(lb.exponents.iter().map(s).collect());
        if let Some(c) = intersection::certified_bound(&report, &covering, &lb) {
            body["certificate"] = certificate_json(&c);
        }
    }
    Ok(record(body))
}

fn run_dim(field: FieldSpec, a: &DimArgs) -> Outcome {
    let spec = parse_ifs(field, &a.ifs)?;
    let table: Vec<Value> = (0..=a.rows)
        .map(|j| {
            let delta = Ratio::new(BigInt::one(), BigInt::one() << j);
            let delta_sq = &delta * &delta;
            json!({
                "delta": s(&delta),
                "level": s(spec.covering_level_sq(&delta_sq)),
                "bound": s(spec.covering_bound_sq(&delta_sq)),
            })
        })
        .collect();
    let mut body = json!({
        "beta": s(spec.beta()),
        "digits": digits_json(spec.digits()),
        "sigma": float(spec.similarity_dimension()),
        "radius_sq": s(spec.bounding_radius_sq()),
        "covering": table,
    });
    if let Some(depths) = &a.depths {
        let depths = depths
            .split(',')
            .map(|t| {
                t.trim().parse::<u32>().map_err(|_| Error::Parse {
                    token: t.to_string(),
                    reason: "expected a depth".into(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let est = spec.box_dim_estimate(&depths, a.cap)?;
        body["box_dimension"] = json!({
            "slope": float(est.slope),
            "counts": est.counts.iter().map(|(k, c)| json!([s(k), s(c)])).collect::<Vec<_>>(),
        });
    }
    Ok(record(body))
}

fn svg_scatter(points: &[Complex<f64>]) -> String {
    const SIZE: f64 = 800.0;
    const MARGIN: f64 = 10.0;
    let (mut lo_x, mut hi_x, mut lo_y, mut hi_y) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for z in points {
        lo_x = lo_x.min(z.re);
        hi_x = hi_x.max(z.re);
        lo_y = lo_y.min(z.im);
        hi_y = hi_y.max(z.im);
    }
    let span = (hi_x - lo_x).max(hi_y - lo_y).max(f64::MIN_POSITIVE);
    let scale = (SIZE - 2.0 * MARGIN) / span;
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    );
    for z in points {
        let x = MARGIN + (z.re - lo_x) * scale;
        let y = SIZE - MARGIN - (z.im - lo_y) * scale;
        let _ = writeln!(out, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"0.8\" fill=\"black\"/>");
    }
    out.push_str("</svg>\n");
    out
}

fn run_render(field: FieldSpec, a: &RenderArgs) -> Outcome {
    let spec = parse_ifs(field, &a.ifs)?;
    if a.depth == 0 {
        return Err(Error::Precondition("depth must be at least 1".into()).into());
    }
    let points = spec.sample_points::<f64>(a.depth, a.cap)?;
    let mut csv = String::from("re,im\n");
    for z in &points {
        let _ = writeln!(csv, "{:.12},{:.12}", z.re, z.im);
    }
    fs::write(&a.out, csv).map_err(|e| io_failure(e, &a.out))?;
    if let Some(svg) = &a.svg {
        fs::write(svg, svg_scatter(&points)).map_err(|e| io_failure(e, svg))?;
    }
    Ok(record(json!({
        "points": s(points.len()),
        "out": a.out.display().to_string(),
        "svg": a.svg.as_ref().map_or(Value::Null, |p| json!(p.display().to_string())),
    })))
}

/// Plain output: `[0,1,3,1]` for an expansion, the element for an evaluation.
fn run_cns(a: &CnsArgs) -> Outcome {
    let basis = CnsBasis::<BigInt>::new(a.n)?;
    let g = FieldSpec::gaussian();
    if let Some(text) = &a.expand {
        let digits = basis.expand(&g.parse(text)?)?;
        let body: Vec<String> = digits.iter().map(ToString::to_string).collect();
        return Ok(format!("[{}]\n", body.join(",")));
    }
    let text = a.evaluate.as_deref().unwrap_or_default();
    let text = text.trim().trim_start_matches('[').trim_end_matches(']');
    let digits = if text.trim().is_empty() {
        Vec::new()
    } else {
        text.split(',')
            .map(|t| {
                t.trim().parse::<BigInt>().map_err(|_| Error::Parse {
                    token: t.to_string(),
                    reason: "expected a digit".into(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?
    };
    Ok(format!("{}\n", basis.evaluate(&digits)?))
}

fn dispatch(cli: &Cli) -> Outcome {
    let field = FieldSpec::new(cli.d)?;
    match &cli.command {
        Command::Factor { element } => run_factor(field, element),
        Command::Order(a) => run_order(field, a),
        Command::Member(a) => run_member(field, a),
        Command::Intersect(a) => run_intersect(field, a),
        Command::Bound(a) => run_bound(field, a),
        Command::Dim(a) => run_dim(field, a),
        Command::Render(a) => run_render(field, a),
        Command::Cns(a) => run_cns(a),
    }
}

fn main() -> ExitCode {
    let argv = match config::expand_argv(std::env::args().collect(), SUBCOMMANDS) {
        Ok(argv) => argv,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match dispatch(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
