//! The `maprad` command line. [`run`] is the whole program; `main` only
//! forwards the process arguments and exit code.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use maprad_core::arens_eells::{ae_norm, enumerate_acyclic_plans, AeError, DEFAULT_ENUMERATION_BUDGET};
use maprad_core::euclid::{euclidean_map_rad_search, meb_euclidean, SearchParams};
use maprad_core::io::{
    input_kind, measure_json, measure_on, parse_input, plan_json, resolve_space, Input, IoError,
    Kind,
};
use maprad_core::metric::{builtin, graph_metric, kuratowski_embedding, EmbeddedPointSet, FiniteMetricSpace, MetricError, Norm};
use maprad_core::park::{
    is_parkable, parkability_report, section_polytope, Hyperplane, ParkError, PolytopeH, PolytopeV,
};
use maprad_core::radius::{
    chebyshev_supnorm, map_corad_bruteforce, map_rad_bruteforce, map_rad_conv, map_rad_nmv,
    sextuple, sextuple_dimension, RadiusError, Within, DEFAULT_BRUTE_BUDGET,
};
use maprad_core::rational::Rational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};
use thiserror::Error;

#[derive(Debug, Parser)]
#[command(name = "maprad", version, about = "Mapping radii, Arens-Eells norms and parkability")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads; falls back to MAPRAD_THREADS, then to all cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WithinArg {
    Ambient,
    Hull,
}

/// A space given as a file or a builtin name.
#[derive(Debug, Args)]
pub struct SpaceArgs {
    /// Space or graph file, or a builtin name such as D_3 or cycle(4,8).
    pub input: Option<String>,
    #[arg(long, conflicts_with = "input")]
    pub builtin: Option<String>,
    /// Pieces per edge when the input is a graph.
    #[arg(short = 'k', long, default_value_t = 1)]
    pub k: usize,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long, default_value_t = SearchParams::default().restarts)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate any input file and summarize it.
    Validate(SpaceArgs),
    /// map-rad(X, Conv) with its optimal measure.
    Conv(SpaceArgs),
    /// map-rad(X, NmV) with its measure and per-point plans.
    Nmv(SpaceArgs),
    /// diam/2, Euclidean bracket, NmV, Conv, rad_X and diam.
    Sextuple {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Arens-Eells norm of a measure file with an optimal plan.
    AeNorm { measure: PathBuf },
    /// All acyclic plans of a measure file with their costs.
    AeEnumerate {
        measure: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_BUDGET as u64)]
        budget: u64,
    },
    /// Euclidean minimum enclosing ball of a point set.
    Meb(SpaceArgs),
    /// Sup-norm Chebyshev ball of a point set.
    Cheb {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, value_enum, default_value_t = WithinArg::Ambient)]
        within: WithinArg,
    },
    /// map-rad(X, Y) over all nonexpansive maps.
    Brute {
        x: String,
        y: String,
        #[arg(long, default_value_t = DEFAULT_BRUTE_BUDGET)]
        budget: u64,
    },
    /// map-corad(X, Y) over all nonexpansive maps.
    Corad {
        x: String,
        y: String,
        #[arg(long, default_value_t = DEFAULT_BRUTE_BUDGET)]
        budget: u64,
    },
    /// Certified lower bound for map-rad(X, E^n) by multi-start search.
    SearchEuc {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(short = 'n', long)]
        n: Option<usize>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Is the vertex polytope C parkable in the half-space polytope B?
    Park { c: PathBuf, b: PathBuf },
    /// Section of B by the hyperplane normal·x = offset.
    Section {
        b: PathBuf,
        /// Comma-separated rationals.
        #[arg(long, allow_hyphen_values = true)]
        normal: String,
        #[arg(long, allow_hyphen_values = true)]
        offset: String,
    },
    /// Test sections of B for parkability.
    ParkReport {
        b: PathBuf,
        /// Hyperplane list file.
        #[arg(long, conflicts_with = "random")]
        planes: Option<PathBuf>,
        /// Number of random hyperplanes.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Radius(#[from] RadiusError),
    #[error(transparent)]
    Ae(#[from] AeError),
    #[error(transparent)]
    Park(#[from] ParkError),
}

fn variant_name(debug: String) -> String {
    debug
        .split(|c: char| !c.is_alphanumeric())
        .next()
        .unwrap_or_default()
        .to_string()
}

impl CliError {
    fn to_json(&self) -> Value {
        let kind = match self {
            CliError::Usage(_) => "UsageError".to_string(),
            CliError::Io(IoError::Metric(e)) | CliError::Metric(e) => variant_name(format!("{e:?}")),
            CliError::Io(IoError::Park(e)) | CliError::Park(e) => variant_name(format!("{e:?}")),
            CliError::Io(e) => e.kind_name().to_string(),
            CliError::Radius(e) => variant_name(format!("{e:?}")),
            CliError::Ae(e) => variant_name(format!("{e:?}")),
        };
        let mut err = json!({"kind": kind, "message": self.to_string()});
        if let CliError::Io(IoError::Parse { line, column, .. }) = self {
            err["line"] = json!(line);
            err["column"] = json!(column);
        }
        if let CliError::Io(IoError::Metric(MetricError::TriangleViolation { a, b, c, .. }))
        | CliError::Metric(MetricError::TriangleViolation { a, b, c, .. }) = self
        {
            err["triple"] = json!([a, b, c]);
        }
        json!({ "error": err })
    }
}

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn floats(v: &[f64]) -> Value {
    json!(v.iter().map(|&x| round12(x)).collect::<Vec<_>>())
}

fn load_space(args: &SpaceArgs) -> Result<FiniteMetricSpace, CliError> {
    if args.k == 0 {
        return Err(CliError::Usage("-k must be at least 1".into()));
    }
    let reference = args
        .builtin
        .as_deref()
        .or(args.input.as_deref())
        .ok_or_else(|| CliError::Usage("an input file or --builtin is required".into()))?;
    space_from_ref(reference, args.k)
}

/// Files take precedence over builtin names.
fn space_from_ref(reference: &str, k: usize) -> Result<FiniteMetricSpace, CliError> {
    let path = Path::new(reference);
    if path.is_file() {
        return match parse_input(path, None)? {
            Input::Space(x) => Ok(x),
            Input::Graph(g) => Ok(maprad_core::metric::discretize_graph(&g, k)?),
            other => Err(IoError::KindMismatch {
                expected: Kind::Space,
                found: input_kind(&other),
            }
            .into()),
        };
    }
    Ok(builtin(reference)?.discretized(k)?)
}

/// A point set file, or the Kuratowski embedding of a space.
fn load_points(args: &SpaceArgs, norm: Norm) -> Result<EmbeddedPointSet, CliError> {
    if let Some(input) = args.input.as_deref() {
        let path = Path::new(input);
        if path.is_file() {
            if let Input::PointSet(mut a) = parse_input(path, None)? {
                a.norm = norm;
                return Ok(a);
            }
        }
    }
    let mut a = kuratowski_embedding(&load_space(args)?);
    a.norm = norm;
    Ok(a)
}

fn load_measure(path: &Path) -> Result<(FiniteMetricSpace, maprad_core::SignedMeasure), CliError> {
    let file = match parse_input(path, Some(Kind::Measure))? {
        Input::Measure(m) => m,
        _ => unreachable!("kind checked"),
    };
    let base = path.parent().unwrap_or(Path::new("."));
    let x = resolve_space(&file.space, base)?;
    let mu = measure_on(&x, &file.coeffs)?;
    Ok((x, mu))
}

fn load_h(path: &Path) -> Result<PolytopeH, CliError> {
    match parse_input(path, Some(Kind::PolytopeH))? {
        Input::PolytopeH(b) => Ok(b),
        _ => unreachable!("kind checked"),
    }
}

fn load_v(path: &Path) -> Result<PolytopeV, CliError> {
    match parse_input(path, Some(Kind::PolytopeV))? {
        Input::PolytopeV(c) => Ok(c),
        _ => unreachable!("kind checked"),
    }
}

fn parse_rationals(s: &str) -> Result<Vec<Rational>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<Rational>()
                .map_err(|e| CliError::Usage(format!("bad rational {t:?}: {e}")))
        })
        .collect()
}

fn labels_of(x: &FiniteMetricSpace, idx: &[usize]) -> Value {
    json!(idx.iter().map(|&i| x.label(i)).collect::<Vec<_>>())
}

fn search_params(s: &SearchArgs) -> SearchParams {
    SearchParams {
        restarts: s.restarts.max(1),
        seed: s.seed,
        ..SearchParams::default()
    }
}

fn validate(args: &SpaceArgs) -> Result<Value, CliError> {
    if let Some(input) = args.input.as_deref() {
        let path = Path::new(input);
        if path.is_file() {
            return Ok(match parse_input(path, None)? {
                Input::Space(x) => space_summary(&x),
                Input::Graph(g) => {
                    let x = graph_metric(&g)?;
                    json!({
                        "kind": "graph",
                        "vertices": g.vertices().len(),
                        "edges": g.edges().len(),
                        "diameter": x.diameter().to_string(),
                    })
                }
                Input::Measure(_) => {
                    let (x, mu) = load_measure(path)?;
                    json!({
                        "kind": "measure",
                        "points": x.len(),
                        "support": mu.coeffs().len(),
                        "mass": mu.mass().to_string(),
                        "zero_mass": mu.in_u0(),
                    })
                }
                Input::PolytopeV(c) => {
                    let redundant: Vec<usize> = c
                        .redundant_points()?
                        .iter()
                        .enumerate()
                        .filter(|(_, r)| **r)
                        .map(|(i, _)| i)
                        .collect();
                    json!({"kind": "polytope-v", "dim": c.dim, "vertices": c.vertices.len(), "redundant": redundant})
                }
                Input::PolytopeH(b) => json!({"kind": "polytope-h", "dim": b.dim, "rows": b.rows.len()}),
                Input::PointSet(a) => json!({"kind": "point-set", "dim": a.dim, "points": a.points.len(), "norm": a.norm}),
                Input::Hyperplanes(h) => json!({"kind": "hyperplanes", "count": h.len()}),
            });
        }
    }
    Ok(space_summary(&load_space(args)?))
}

fn space_summary(x: &FiniteMetricSpace) -> Value {
    let (rad, center) = x.intrinsic_radius();
    json!({
        "kind": "space",
        "points": x.len(),
        "labels": x.labels(),
        "diameter": x.diameter().to_string(),
        "radius": rad.to_string(),
        "center": x.label(center),
    })
}

fn random_planes(b: &PolytopeH, count: usize, seed: u64) -> Vec<Hyperplane> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let normal: Vec<i64> = loop {
                let n: Vec<i64> = (0..b.dim).map(|_| rng.random_range(-5..=5)).collect();
                if n.iter().any(|&c| c != 0) {
                    break n;
                }
            };
            let l1: i64 = normal.iter().map(|c| c.abs()).sum();
            let offset = Rational::new(rng.random_range(-4 * l1..=4 * l1), 4);
            Hyperplane {
                normal: normal.into_iter().map(Rational::from_integer).collect(),
                offset,
            }
        })
        .collect()
}

fn dispatch(command: &Command) -> Result<Value, CliError> {
    Ok(match command {
        Command::Validate(args) => validate(args)?,
        Command::Conv(args) => {
            let x = load_space(args)?;
            let r = map_rad_conv(&x)?;
            json!({
                "value": r.value.to_string(),
                "measure": measure_json(&x, &r.measure),
                "tight_points": labels_of(&x, &r.tight_points),
            })
        }
        Command::Nmv(args) => {
            let x = load_space(args)?;
            let r = map_rad_nmv(&x)?;
            let mut plans = Map::new();
            for (i, p) in r.plans.iter().enumerate() {
                plans.insert(x.label(i).to_string(), plan_json(&x, p));
            }
            json!({
                "value": r.value.to_string(),
                "measure": measure_json(&x, &r.mu),
                "plans": plans,
            })
        }
        Command::Sextuple { space, search } => {
            let x = load_space(space)?;
            let s = sextuple(&x, &search_params(search))?;
            json!({
                "half_diameter": s.half_diameter.to_string(),
                "euc": {
                    "lower": s.euc_lower.to_string(),
                    "search": round12(s.euc_search),
                    "dimension": sextuple_dimension(&x),
                },
                "nmv": s.nmv.to_string(),
                "conv": s.conv.to_string(),
                "rad": s.rad.to_string(),
                "diameter": s.diameter.to_string(),
            })
        }
        Command::AeNorm { measure } => {
            let (x, mu) = load_measure(measure)?;
            let (value, plan) = ae_norm(&x, &mu)?;
            json!({"value": value.to_string(), "plan": plan_json(&x, &plan)})
        }
        Command::AeEnumerate { measure, budget } => {
            let (x, mu) = load_measure(measure)?;
            let plans = enumerate_acyclic_plans(&x, &mu, *budget as usize)?;
            let list: Vec<Value> = plans
                .iter()
                .map(|(p, c)| json!({"plan": plan_json(&x, p), "cost": c.to_string()}))
                .collect();
            json!({"count": list.len(), "plans": list})
        }
        Command::Meb(args) => {
            let a = load_points(args, Norm::Euclidean)?;
            let ball = meb_euclidean(&a)?;
            json!({
                "radius": round12(ball.radius),
                "center": floats(&ball.center),
                "support": ball.support,
                "tolerance": maprad_core::euclid::TOLERANCE,
            })
        }
        Command::Cheb { space, within } => {
            let a = load_points(space, Norm::Sup)?;
            let w = match within {
                WithinArg::Ambient => Within::Ambient,
                WithinArg::Hull => Within::Hull,
            };
            let ball = chebyshev_supnorm(&a, w)?;
            json!({"radius": ball.radius, "center": ball.center, "support": ball.support})
        }
        Command::Brute { x, y, budget } | Command::Corad { x, y, budget } => {
            let xs = space_from_ref(x, 1)?;
            let ys = space_from_ref(y, 1)?;
            let (value, f) = if matches!(command, Command::Brute { .. }) {
                map_rad_bruteforce(&xs, &ys, *budget)?
            } else {
                map_corad_bruteforce(&xs, &ys, *budget)?
            };
            let mut map = Map::new();
            for (i, &fi) in f.iter().enumerate() {
                map.insert(xs.label(i).to_string(), json!(ys.label(fi)));
            }
            json!({"value": value.to_string(), "map": map})
        }
        Command::SearchEuc { space, n, search } => {
            let x = load_space(space)?;
            let dim = n.unwrap_or_else(|| sextuple_dimension(&x));
            if dim == 0 {
                return Err(CliError::Usage("-n must be at least 1".into()));
            }
            let res = euclidean_map_rad_search(&x, dim, &search_params(search));
            let mut config = Map::new();
            for (i, p) in res.config.iter().enumerate() {
                config.insert(x.label(i).to_string(), floats(p));
            }
            json!({
                "bound": round12(res.bound),
                "dimension": res.dimension,
                "restart": res.restart,
                "config": config,
                "params": res.params,
                "tolerance": res.tolerance,
            })
        }
        Command::Park { c, b } => {
            let res = is_parkable(&load_v(c)?, &load_h(b)?)?;
            json!({"parkable": res.parkable, "v": res.v})
        }
        Command::Section { b, normal, offset } => {
            let h = Hyperplane {
                normal: parse_rationals(normal)?,
                offset: offset
                    .trim()
                    .parse()
                    .map_err(|e| CliError::Usage(format!("bad offset {offset:?}: {e}")))?,
            };
            let sec = section_polytope(&load_h(b)?, &h)?;
            json!({"dim": sec.dim, "vertices": sec.vertices})
        }
        Command::ParkReport {
            b,
            planes,
            random,
            seed,
        } => {
            let body = load_h(b)?;
            let sample = match (planes, random) {
                (Some(p), _) => match parse_input(p, Some(Kind::Hyperplanes))? {
                    Input::Hyperplanes(h) => h,
                    _ => unreachable!("kind checked"),
                },
                (None, Some(n)) => random_planes(&body, *n, *seed),
                (None, None) => return Err(CliError::Usage("park-report needs --planes or --random".into())),
            };
            let rep = parkability_report(&body, &sample)?;
            serde_json::to_value(rep).expect("serializable")
        }
    })
}

/// `key: value` lines, nested keys joined with dots.
fn render_text(v: &Value, prefix: &str, out: &mut String) {
    match v {
        Value::Object(m) if !m.is_empty() => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                render_text(x, &key, out);
            }
        }
        Value::Array(a) if a.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, x) in a.iter().enumerate() {
                render_text(x, &format!("{prefix}[{i}]"), out);
            }
        }
        Value::String(s) => out.push_str(&format!("{prefix}: {s}\n")),
        other => out.push_str(&format!("{prefix}: {other}\n")),
    }
}

fn threads_from_env(flag: Option<usize>) -> Option<usize> {
    flag.or_else(|| std::env::var("MAPRAD_THREADS").ok()?.trim().parse().ok())
        .filter(|&n| n > 0)
}

fn emit(out: &mut dyn Write, format: Format, v: &Value) {
    let text = match format {
        Format::Json => serde_json::to_string_pretty(v).expect("serializable") + "\n",
        Format::Text => {
            let mut s = String::new();
            render_text(v, "", &mut s);
            s
        }
    };
    let _ = out.write_all(text.as_bytes());
}

/// Runs one invocation and returns the exit code: 0 on success, 1 on domain
/// errors (reported as JSON on `out`), 2 on usage errors (reported on
/// `err`).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return if code == 0 { 0 } else { 2 };
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads_from_env(cli.threads) {
        builder = builder.num_threads(n);
    }
    let result = match builder.build() {
        Ok(pool) => pool.install(|| {
            std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| dispatch(&cli.command)))
        }),
        Err(e) => Ok(Err(CliError::Usage(format!("cannot start thread pool: {e}")))),
    };
    match result {
        Ok(Ok(v)) => {
            emit(out, cli.format, &v);
            0
        }
        Ok(Err(CliError::Usage(msg))) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Ok(Err(e)) => {
            emit(out, Format::Json, &e.to_json());
            1
        }
        Err(_) => {
            let v = json!({"error": {"kind": "InternalError", "message": "solver panicked"}});
            emit(out, Format::Json, &v);
            1
        }
    }
}
