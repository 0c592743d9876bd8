use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use invring::gensets::{
    algorithm1_secondaries, elementary_parameters, minimal_generating_set_with, Arithmetic, MgsOptions,
    SecondaryOptions,
};
use invring::hilbert::{
    conjectured_sop_degrees, connected_multigraph_counts, degrees_from_counts, dominance_certificate,
    hilbert_series, isolated_quasi_connected_degrees, limit_hilbert_series, mu_formula, secondary_degrees_for,
    simple_counts, SopDegrees,
};
use invring::orbits::{encode_vector, parse_polynomial, parse_vector_for, separates};
use invring::studies::{mu_brute_force, run_suites};
use invring::{Action, ActionSpec, Error, InvariantPolynomial, Product, TruncatedSeries, WeightedGraph, ENGINE_VERSION};

#[derive(Parser, Debug)]
#[command(name = "invring", version, about = "Invariants of graphs under vertex relabelling")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Emit JSON instead of plain text.
    #[arg(long, global = true)]
    json: bool,
    /// Directory of the result cache; caching is off when unset.
    #[arg(long, global = true, env = "INVRING_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    no_cache: bool,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "INVRING_THREADS")]
    threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Graph,
    Digraph,
    Natural,
    Alternating,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ProductArg {
    Usual,
    Chain,
}

impl From<ProductArg> for Product {
    fn from(p: ProductArg) -> Self {
        match p {
            ProductArg::Usual => Product::Usual,
            ProductArg::Chain => Product::Chain,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ArithmeticArg {
    Exact,
    Modular,
}

impl From<ArithmeticArg> for Arithmetic {
    fn from(a: ArithmeticArg) -> Self {
        match a {
            ArithmeticArg::Exact => Arithmetic::Exact,
            ArithmeticArg::Modular => Arithmetic::Modular,
        }
    }
}

#[derive(Args, Debug, Clone)]
struct ActionArgs {
    /// Number of vertices (or points for `natural` and `alternating`).
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value = "graph")]
    action: Kind,
}

impl ActionArgs {
    fn spec(&self) -> Result<ActionSpec, Error> {
        Ok(match self.action {
            Kind::Graph => ActionSpec::GraphEdges { n: self.n },
            Kind::Digraph => ActionSpec::DigraphArcs { n: self.n },
            Kind::Natural => ActionSpec::Natural { m: self.n },
            Kind::Alternating => ActionSpec::alternating(self.n)?,
        })
    }

    fn action(&self) -> Result<Arc<Action>, Error> {
        Action::new(self.spec()?)
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GeneratorFamily {
    /// Orbit sums of simple (di)graphs.
    Simple,
    /// Quasi-connected multigraphs leaving a vertex isolated.
    IsolatedQuasiConnected,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum Expect {
    Dominated,
    Failure,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Hilbert series coefficients up to a bound.
    Hilbert {
        #[command(flatten)]
        a: ActionArgs,
        #[arg(long)]
        bound: usize,
    },
    /// Dimension of a homogeneous component, by the series and by enumeration.
    Dimension {
        #[command(flatten)]
        a: ActionArgs,
        #[arg(long)]
        degree: usize,
    },
    /// Canonical representatives of one degree.
    Enumerate {
        #[command(flatten)]
        a: ActionArgs,
        #[arg(long)]
        degree: usize,
        /// Only 0/1 vectors.
        #[arg(long)]
        simple: bool,
    },
    /// Product of two invariants given as `c*enc + ...`.
    Mul {
        #[command(flatten)]
        a: ActionArgs,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[arg(long, value_enum, default_value = "usual")]
        product: ProductArg,
    },
    /// Chain product of two invariants.
    ChainMul {
        #[command(flatten)]
        a: ActionArgs,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// Value of an invariant at a weighted graph.
    Eval {
        #[command(flatten)]
        a: ActionArgs,
        #[arg(long)]
        invariant: String,
        #[arg(long)]
        graph: String,
    },
    /// Whether a set of invariants tells two weighted graphs apart.
    Separate {
        #[command(flatten)]
        a: ActionArgs,
        #[arg(long = "invariant", required = true)]
        invariants: Vec<String>,
        #[arg(long)]
        first: String,
        #[arg(long)]
        second: String,
    },
    /// Secondary degree polynomial for a system of parameter degrees.
    SecondaryDegrees {
        #[command(flatten)]
        a: ActionArgs,
        /// Comma separated degrees; elementary symmetric degrees by default.
        #[arg(long, value_delimiter = ',', conflicts_with = "conjectured")]
        degrees: Option<Vec<usize>>,
        /// Use the degrees `1..n, 2..C(n-1,2)`.
        #[arg(long)]
        conjectured: bool,
    },
    /// Fewest edges of a multigraph with no odd automorphism.
    Mu {
        #[arg(long)]
        n: usize,
    },
    /// Counts of connected multigraphs by vertices and edges.
    ConnectedCounts {
        #[arg(long)]
        max_k: usize,
        #[arg(long)]
        max_d: usize,
    },
    /// Hilbert series of the limit ring.
    LimitHilbert {
        #[arg(long)]
        bound: usize,
    },
    /// Compares the Hilbert series with the free series of a generator family.
    Dominance {
        #[command(flatten)]
        a: ActionArgs,
        #[arg(long)]
        bound: usize,
        #[arg(long, value_enum, default_value = "simple", conflicts_with = "degrees")]
        generators: GeneratorFamily,
        /// Explicit generator degrees, comma separated.
        #[arg(long, value_delimiter = ',')]
        degrees: Option<Vec<usize>>,
        /// Exit with status 1 when the outcome differs.
        #[arg(long, value_enum)]
        expect: Option<Expect>,
    },
    /// Minimal generating set up to a degree cap.
    Mgs {
        #[command(flatten)]
        a: ActionArgs,
        #[arg(long)]
        cap: usize,
        #[arg(long, value_enum, default_value = "usual")]
        product: ProductArg,
        #[arg(long, value_enum, default_value = "exact")]
        arithmetic: ArithmeticArg,
    },
    /// Secondary invariants over the elementary symmetric parameters.
    Secondaries {
        #[command(flatten)]
        a: ActionArgs,
        #[arg(long)]
        cap: usize,
        #[arg(long, value_enum, default_value = "usual")]
        product: ProductArg,
        #[arg(long, value_enum, default_value = "modular")]
        arithmetic: ArithmeticArg,
    },
    /// Runs reproduction suites.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        slow: bool,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Hilbert { .. } => "hilbert",
            Command::Dimension { .. } => "dimension",
            Command::Enumerate { .. } => "enumerate",
            Command::Mul { .. } => "mul",
            Command::ChainMul { .. } => "chain-mul",
            Command::Eval { .. } => "eval",
            Command::Separate { .. } => "separate",
            Command::SecondaryDegrees { .. } => "secondary-degrees",
            Command::Mu { .. } => "mu",
            Command::ConnectedCounts { .. } => "connected-counts",
            Command::LimitHilbert { .. } => "limit-hilbert",
            Command::Dominance { .. } => "dominance",
            Command::Mgs { .. } => "mgs",
            Command::Secondaries { .. } => "secondaries",
            Command::Verify { .. } => "verify",
        }
    }
}

/// What a command printed, and whether it reports a mathematical failure.
struct Outcome {
    text: String,
    failed: bool,
}

fn ok(text: String) -> Outcome {
    Outcome { text, failed: false }
}

fn strs<T: ToString>(v: &[T]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

fn series_out(json: bool, a: Value, s: &TruncatedSeries) -> Result<Outcome, Error> {
    let c = strs(&s.to_integers()?);
    Ok(ok(if json {
        let mut v = a;
        v["bound"] = json!(s.bound());
        v["coefficients"] = json!(c);
        v.to_string()
    } else {
        c.join(" ")
    }))
}

fn header(a: &ActionArgs) -> Result<Value, Error> {
    Ok(json!({ "n": a.n, "action": a.spec()?.name() }))
}

fn poly_out(json: bool, p: &InvariantPolynomial) -> Outcome {
    ok(if json {
        json!({ "encoding": p.encode(), "invariant": p.to_json() }).to_string()
    } else {
        p.encode()
    })
}

fn run(cmd: &Command, json: bool) -> Result<Outcome, Error> {
    match cmd {
        Command::Hilbert { a, bound } => series_out(json, header(a)?, &hilbert_series(&a.spec()?, *bound)?),
        Command::Dimension { a, degree } => {
            let action = a.action()?;
            let from_series = hilbert_series(action.spec(), *degree)?.to_integers()?[*degree].to_string();
            let enumerated = action.enumerate_canonical(*degree).dim();
            let agree = from_series == enumerated.to_string();
            Ok(Outcome {
                text: if json {
                    let mut v = header(a)?;
                    v["degree"] = json!(degree);
                    v["hilbert"] = json!(from_series);
                    v["enumerated"] = json!(enumerated);
                    v.to_string()
                } else {
                    from_series
                },
                failed: !agree,
            })
        }
        Command::Enumerate { a, degree, simple } => {
            let action = a.action()?;
            let basis = if *simple {
                action.enumerate_canonical_simple(*degree)
            } else {
                action.enumerate_canonical(*degree)
            };
            let rows: Vec<(String, u64)> = basis
                .graphs
                .iter()
                .map(|g| (encode_vector(action.spec(), &g.rep), g.orbit_size))
                .collect();
            Ok(ok(if json {
                let mut v = header(a)?;
                v["degree"] = json!(degree);
                v["count"] = json!(rows.len());
                v["graphs"] = rows.iter().map(|(e, o)| json!({ "encoding": e, "orbit_size": o })).collect();
                v.to_string()
            } else {
                rows.iter().map(|(e, o)| format!("{e} {o}")).collect::<Vec<_>>().join("\n")
            }))
        }
        Command::Mul { a, left, right, product } => {
            let action = a.action()?;
            let p = parse_polynomial(&action, left)?.product(&parse_polynomial(&action, right)?, (*product).into())?;
            Ok(poly_out(json, &p))
        }
        Command::ChainMul { a, left, right } => {
            let action = a.action()?;
            let p = invring::chain::chain_mul(&parse_polynomial(&action, left)?, &parse_polynomial(&action, right)?)?;
            Ok(poly_out(json, &p))
        }
        Command::Eval { a, invariant, graph } => {
            let action = a.action()?;
            let p = parse_polynomial(&action, invariant)?;
            let w = WeightedGraph::from_vector(&parse_vector_for(action.spec(), graph)?);
            let value = p.evaluate(&w)?.to_string();
            Ok(ok(if json { json!({ "value": value }).to_string() } else { value }))
        }
        Command::Separate { a, invariants, first, second } => {
            let action = a.action()?;
            let set = invariants
                .iter()
                .map(|s| parse_polynomial(&action, s))
                .collect::<Result<Vec<_>, _>>()?;
            let wa = WeightedGraph::from_vector(&parse_vector_for(action.spec(), first)?);
            let wb = WeightedGraph::from_vector(&parse_vector_for(action.spec(), second)?);
            let sep = separates(&set, &wa, &wb)?;
            Ok(ok(if json { json!({ "separated": sep }).to_string() } else { sep.to_string() }))
        }
        Command::SecondaryDegrees { a, degrees, conjectured } => {
            let spec = a.spec()?;
            let sop = if *conjectured {
                conjectured_sop_degrees(a.n)
            } else if let Some(d) = degrees {
                SopDegrees::new(d.clone())
            } else {
                SopDegrees::elementary(spec.positions())
            };
            let p = secondary_degrees_for(&spec, &sop)?;
            let c = strs(p.coeffs());
            Ok(ok(if json {
                let mut v = header(a)?;
                v["parameters"] = json!(sop.degrees());
                v["coefficients"] = json!(c);
                v["count"] = json!(p.total().to_string());
                v.to_string()
            } else {
                c.join(" ")
            }))
        }
        Command::Mu { n } => {
            let (d, g) = mu_brute_force(*n)?;
            Ok(ok(if json {
                json!({
                    "n": n,
                    "edges": d,
                    "witness": encode_vector(&ActionSpec::GraphEdges { n: *n }, &g),
                    "mu_n": mu_formula(*n),
                })
                .to_string()
            } else {
                d.to_string()
            }))
        }
        Command::ConnectedCounts { max_k, max_d } => {
            let t = connected_multigraph_counts(*max_k, *max_d);
            let rows: Vec<Vec<String>> = (1..=*max_k)
                .map(|k| (0..=*max_d).map(|d| t.get(k, d).to_string()).collect())
                .collect();
            Ok(ok(if json {
                json!({ "max_k": max_k, "max_d": max_d, "rows": rows }).to_string()
            } else {
                rows.iter().map(|r| r.join(" ")).collect::<Vec<_>>().join("\n")
            }))
        }
        Command::LimitHilbert { bound } => series_out(json, json!({ "action": "limit" }), &limit_hilbert_series(*bound)),
        Command::Dominance { a, bound, generators, degrees, expect } => {
            let spec = a.spec()?;
            let h = hilbert_series(&spec, *bound)?;
            let gens = match (degrees, generators) {
                (Some(d), _) => {
                    let mut m = std::collections::BTreeMap::new();
                    for &x in d {
                        *m.entry(x).or_insert_with(Default::default) += 1;
                    }
                    m
                }
                (None, GeneratorFamily::Simple) => degrees_from_counts(&simple_counts(&spec, *bound)?)?,
                (None, GeneratorFamily::IsolatedQuasiConnected) => isolated_quasi_connected_degrees(a.n, *bound),
            };
            let cert = dominance_certificate(&h, &gens, *bound)?;
            let failed = match expect {
                Some(Expect::Dominated) => cert.first_failure().is_some(),
                Some(Expect::Failure) => cert.first_failure().is_none(),
                None => false,
            };
            Ok(Outcome {
                text: if json {
                    let mut v = header(a)?;
                    v["bound"] = json!(bound);
                    v["first_failure"] = json!(cert.first_failure());
                    v["hilbert"] = json!(cert.hilbert);
                    v["free"] = json!(cert.free);
                    v.to_string()
                } else {
                    match cert.first_failure() {
                        Some(d) => format!("fails at degree {d}: {} > {}", cert.hilbert[d], cert.free[d]),
                        None => format!("dominated through degree {bound}"),
                    }
                },
                failed,
            })
        }
        Command::Mgs { a, cap, product, arithmetic } => {
            let action = a.action()?;
            let mut opts = MgsOptions::new(*cap);
            opts.product = (*product).into();
            opts.arithmetic = (*arithmetic).into();
            let r = minimal_generating_set_with(&action, &opts);
            Ok(ok(if json {
                let mut v = r.to_json();
                v["n"] = json!(a.n);
                v["action"] = json!(a.spec()?.name());
                v.to_string()
            } else {
                let mut lines = vec![format!(
                    "{} generators, s = {}, beta >= {}{}",
                    r.generators.len(),
                    strs(r.s.coeffs()).join(" "),
                    r.beta_observed,
                    if r.complete { " (complete)" } else { "" }
                )];
                lines.extend(r.generators.iter().map(|g| format!("{} {}", g.degree, g.poly.encode())));
                lines.join("\n")
            }))
        }
        Command::Secondaries { a, cap, product, arithmetic } => {
            let action = a.action()?;
            let sop = elementary_parameters(&action)?;
            let mut opts = SecondaryOptions::new(*cap);
            opts.product = (*product).into();
            opts.arithmetic = (*arithmetic).into();
            let r = algorithm1_secondaries(&action, &sop, &opts)?;
            Ok(ok(if json {
                r.to_json().to_string()
            } else {
                let mut lines = vec![format!(
                    "{} secondaries, degrees {}",
                    r.secondaries.len(),
                    strs(r.degree_polynomial().coeffs()).join(" ")
                )];
                lines.extend(r.secondaries.iter().map(|s| {
                    format!("{} {}{}", s.degree, s.poly.encode(), if s.irreducible { " irreducible" } else { "" })
                }));
                lines.join("\n")
            }))
        }
        Command::Verify { suite, slow } => {
            let verdicts = run_suites(suite, *slow)?;
            let failed = verdicts.iter().any(|v| !v.passed);
            let text = verdicts
                .iter()
                .map(|v| {
                    if json {
                        serde_json::to_string(v).expect("verdicts serialize")
                    } else {
                        format!("{} {} ({:.2}s)", if v.passed { "PASS" } else { "FAIL" }, v.suite, v.runtime_secs)
                    }
                })
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Outcome { text, failed })
        }
    }
}

/// Cache entries are whole outputs keyed by engine version, subcommand and
/// the parsed configuration.
fn cache_key(cmd: &Command, json: bool) -> String {
    let mut h = Sha256::new();
    h.update(ENGINE_VERSION.as_bytes());
    h.update([0]);
    h.update(cmd.name().as_bytes());
    h.update([0]);
    h.update(format!("{cmd:?} json={json}").as_bytes());
    hex::encode(h.finalize())
}

fn cache_read(path: &Path) -> Option<Outcome> {
    let v: Value = serde_json::from_slice(&fs::read(path).ok()?).ok()?;
    if v["engine"] != ENGINE_VERSION {
        return None;
    }
    Some(Outcome {
        text: v["output"].as_str()?.to_string(),
        failed: v["failed"].as_bool()?,
    })
}

fn cache_write(dir: &Path, path: &Path, cmd: &Command, out: &Outcome) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let body = json!({
        "engine": ENGINE_VERSION,
        "subcommand": cmd.name(),
        "output": out.text,
        "failed": out.failed,
    });
    // write then rename so a concurrent reader never sees half an entry
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    fs::write(&tmp, body.to_string())?;
    fs::rename(tmp, path)
}

fn execute(cli: &Cli) -> Result<Outcome, Error> {
    // verify reports timings, which are not worth replaying
    let cacheable = !cli.global.no_cache && !matches!(cli.command, Command::Verify { .. });
    let dir = cli.global.cache_dir.as_ref().filter(|_| cacheable);
    let path = dir.map(|d| d.join(format!("{}.json", cache_key(&cli.command, cli.global.json))));
    if let Some(hit) = path.as_deref().and_then(cache_read) {
        return Ok(hit);
    }
    let out = run(&cli.command, cli.global.json)?;
    if let (Some(dir), Some(path)) = (dir, &path) {
        if let Err(e) = cache_write(dir, path, &cli.command, &out) {
            eprintln!("warning: could not write cache entry {}: {e}", path.display());
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match execute(&cli) {
        Ok(out) => {
            println!("{}", out.text);
            if out.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
