mod cache;
mod error;
mod output;
mod plot;
mod scan;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qrgraph::charsum::{incomplete_2d_sum, weil_sum};
use qrgraph::extremal::{independence_number, lower_bound_plan, max_clique, ramsey_upper, solve_ell, DEFAULT_BUDGET};
use qrgraph::ff::{Field, FieldElement};
use qrgraph::graph::{self, build_graph, ExportFormat, GraphInstance};
use qrgraph::poly::{check_admissible, parse_poly, UniPoly};
use qrgraph::quasirand::{discrepancy_exhaustive, discrepancy_sampled_with, mixing_certificate, tuple_census};
use qrgraph::spectral::{self, a_squared_stats, hw_gap, min_lambda2_check, power_top_two, MAX_DENSE};
use serde_json::{json, Map, Value};

use cache::Cache;
use error::CliError;
use output::{emit, emit_json, to_json_doc};

#[derive(Parser)]
#[command(name = "qrgraph", version, about = "Quasi-random graphs from polynomials over finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
struct FieldArgs {
    /// Field characteristic.
    #[arg(long)]
    p: Option<u64>,
    /// Extension degree.
    #[arg(long, default_value_t = 1)]
    m: u32,
    /// Field order, as an alternative to --p/--m.
    #[arg(long)]
    q: Option<u64>,
}

impl FieldArgs {
    fn field(&self) -> Result<Field, CliError> {
        match (self.p, self.q) {
            (Some(p), None) => Ok(Field::new(p, self.m)?),
            (None, Some(q)) => Ok(Field::of_order(q)?),
            (Some(_), Some(_)) => Err(CliError::Usage("give either --p/--m or --q, not both".into())),
            (None, None) => Err(CliError::Usage("missing field: pass --p (and --m) or --q".into())),
        }
    }

    fn request(&self) -> Value {
        json!({"p": self.p, "m": self.m, "q": self.q})
    }
}

#[derive(Args, Clone, Debug)]
struct OutArgs {
    /// Write the result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Cache directory; QUASIRAND_CACHE_DIR takes precedence.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    #[arg(long)]
    no_cache: bool,
}

#[derive(Args, Clone, Debug)]
struct GraphArgs {
    /// Polynomial in x and y; `t` is the field generator when m > 1.
    #[arg(long)]
    f: String,
    #[command(flatten)]
    field: FieldArgs,
}

impl GraphArgs {
    fn build(&self) -> Result<(Field, GraphInstance), CliError> {
        let field = self.field.field()?;
        let f = parse_poly(&self.f, &field)?;
        let g = build_graph(&f, &field)?;
        Ok((field, g))
    }

    fn request(&self, command: &str) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("command".into(), command.into());
        m.insert("f".into(), self.f.clone().into());
        m.insert("field".into(), self.field.request());
        m
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GraphFormat {
    Dimacs,
    Edgelist,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum NamedFamily {
    Paley,
    PaleySum,
    Dio,
    Gendio,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum SpectrumFormat {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Decide admissibility (exit 0 admissible, 2 not admissible, 1 error).
    Admissible {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a graph and export it.
    Build {
        #[arg(long, required_unless_present = "family")]
        f: Option<String>,
        #[arg(long, value_enum, conflicts_with = "f")]
        family: Option<NamedFamily>,
        /// Coefficient a of `a*x*y + b` for --family gendio.
        #[arg(long, default_value = "1")]
        a: String,
        /// Coefficient b of `a*x*y + b` for --family gendio.
        #[arg(long, default_value = "1")]
        b: String,
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, value_enum, default_value = "dimacs")]
        format: GraphFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spectrum, A^2 statistics, Hoffman-Wielandt check and mixing certificate.
    Spectrum {
        #[command(flatten)]
        graph: GraphArgs,
        /// Band constant for the A^2 statistics.
        #[arg(long, default_value_t = 2.0)]
        c: f64,
        /// Power-method iterations used beyond the dense limit.
        #[arg(long, default_value_t = 300)]
        iterations: usize,
        /// `csv` writes the eigenvalues alone, one per line.
        #[arg(long, value_enum, default_value = "json")]
        format: SpectrumFormat,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Discrepancy constant for QR(theta).
    Discrepancy {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 0.5)]
        theta: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Enumerate every pair of subsets (q <= 13).
        #[arg(long)]
        exhaustive: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Clique number, or independence number with --complement.
    Clique {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long)]
        complement: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Count m-cliques against the random-graph prediction.
    Tuples {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long = "size", default_value_t = 3)]
        size: u32,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Character sums: `--g` for the Weil sum, `--f` for the two-variable sum.
    Charsum {
        #[arg(long, conflicts_with = "f", required_unless_present = "f")]
        g: Option<String>,
        #[arg(long, default_value = "1")]
        a: String,
        #[arg(long)]
        f: Option<String>,
        /// all, squares, nonsquares, subfield, range:K or a comma list.
        #[arg(long, default_value = "all")]
        set: String,
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Solve for ell(theta); optionally a lower-bound plan and a Ramsey bound.
    Bounds {
        #[arg(long, default_value_t = 0.75)]
        theta: f64,
        /// Graph order for the lower-bound plan.
        #[arg(long)]
        q: Option<u64>,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, requires = "l")]
        k: Option<u64>,
        #[arg(long, requires = "k")]
        l: Option<u64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Batch scan over a family and a list of field orders, as CSV.
    Scan(scan::ScanArgs),
    /// SVG plot from a scan or spectrum CSV.
    Plot(plot::PlotArgs),
}

fn parse_element(src: &str, field: &Field) -> Result<FieldElement, CliError> {
    let p = parse_poly(src, field)?;
    if p.deg_x() > 0 || p.deg_y() > 0 {
        return Err(CliError::Usage(format!("'{src}' is not a constant")));
    }
    Ok(p.coeff(0, 0))
}

fn parse_set(spec: &str, field: &Field) -> Result<Vec<FieldElement>, CliError> {
    let all = || field.elements();
    let set: Vec<FieldElement> = match spec {
        "all" => all().collect(),
        "squares" => all().filter(|&a| !a.is_zero() && field.is_square(a)).collect(),
        "nonsquares" => all().filter(|&a| !field.is_square(a)).collect(),
        "subfield" => field
            .half_subfield()
            .ok_or_else(|| CliError::Usage(format!("F_{} has index-2 subfield only when q is a square", field.q())))?,
        s if s.starts_with("range:") => {
            let k: u64 = s[6..].parse().map_err(|_| CliError::Usage(format!("bad set '{s}'")))?;
            all().take(k as usize).collect()
        }
        s => s
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| {
                let i: u64 = t.trim().parse().map_err(|_| CliError::Usage(format!("bad set element '{t}'")))?;
                Ok(field.element(i)?)
            })
            .collect::<Result<_, CliError>>()?,
    };
    Ok(set)
}

fn header(q: usize, f: &str, body: Value) -> Value {
    let mut m = Map::new();
    m.insert("q".into(), q.into());
    m.insert("f".into(), f.into());
    if let Value::Object(rest) = body {
        m.extend(rest);
    }
    Value::Object(m)
}

/// Serves from the cache when possible, otherwise computes and stores.
fn run_cached<F>(request: Map<String, Value>, out: &OutArgs, compute: F) -> Result<(), CliError>
where
    F: FnOnce() -> Result<Value, CliError>,
{
    let request = Value::Object(request);
    let cache = Cache::resolve(out.cache_dir.as_deref(), out.no_cache);
    if let Some(c) = &cache {
        if let Some(mut doc) = c.get(&request) {
            doc["cached"] = true.into();
            return emit_json(&doc, out.out.as_deref());
        }
    }
    let mut doc = compute()?;
    if let Some(c) = &cache {
        c.put(&request, &doc)?;
        doc["cached"] = false.into();
    }
    emit_json(&doc, out.out.as_deref())
}

fn export_bytes(g: &GraphInstance, format: GraphFormat) -> Result<Vec<u8>, CliError> {
    let fmt = match format {
        GraphFormat::Dimacs => ExportFormat::Dimacs,
        GraphFormat::Edgelist => ExportFormat::EdgeList,
        GraphFormat::Json => ExportFormat::Json,
    };
    let mut bytes = Vec::new();
    graph::export(g, fmt, &mut bytes)?;
    Ok(bytes)
}

fn spectrum_doc(g: &GraphInstance, c: f64, iterations: usize) -> Result<Value, CliError> {
    let stats = a_squared_stats(g, c);
    if g.q() > MAX_DENSE {
        let approx = power_top_two(g, iterations);
        return Ok(header(
            g.q(),
            g.f_string(),
            json!({
                "approx_spectrum": to_json_doc(&approx)?,
                "a_squared": to_json_doc(&stats)?,
                "hw_rhs": output::round_sig(spectral::hw_rhs(g)),
            }),
        ));
    }
    let s = spectral::eigenvalues(g)?;
    let hw = hw_gap(g, &s);
    let mix = mixing_certificate(g, &s);
    Ok(header(
        g.q(),
        g.f_string(),
        json!({
            "spectrum": to_json_doc(&s)?,
            "a_squared": to_json_doc(&stats)?,
            "hw": to_json_doc(&hw)?,
            "min_lambda2": output::round_sig(min_lambda2_check(g, &s)),
            "mixing": to_json_doc(&mix)?,
        }),
    ))
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Admissible { graph, out } => {
            let field = graph.field.field()?;
            let f = parse_poly(&graph.f, &field)?;
            let report = check_admissible(&f, &field)?;
            let doc = header(field.q() as usize, &f.render(&field), to_json_doc(&report)?);
            emit_json(&doc, out.as_deref())?;
            Ok(if report.admissible { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
        Command::Build {
            f,
            family,
            a,
            b,
            field,
            format,
            out,
        } => {
            let field = field.field()?;
            let g = match (f, family) {
                (Some(expr), _) => build_graph(&parse_poly(&expr, &field)?, &field)?,
                (None, Some(NamedFamily::Paley)) => graph::paley(&field)?,
                (None, Some(NamedFamily::PaleySum)) => graph::paley_sum(&field)?,
                (None, Some(NamedFamily::Dio)) => graph::diophantine(&field)?,
                (None, Some(NamedFamily::Gendio)) => {
                    graph::gen_dio(parse_element(&a, &field)?, parse_element(&b, &field)?, &field)?
                }
                (None, None) => return Err(CliError::Usage("pass --f or --family".into())),
            };
            emit(&export_bytes(&g, format)?, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Spectrum {
            graph,
            c,
            iterations,
            format,
            out,
        } => {
            if format == SpectrumFormat::Csv {
                let (_, g) = graph.build()?;
                let s = spectral::eigenvalues(&g)?;
                let mut text = String::from("lambda\n");
                for l in &s.lambda {
                    text.push_str(&output::fmt_sig(*l));
                    text.push('\n');
                }
                emit(text.as_bytes(), out.out.as_deref())?;
                return Ok(ExitCode::SUCCESS);
            }
            let mut req = graph.request("spectrum");
            req.insert("c".into(), c.into());
            req.insert("iterations".into(), iterations.into());
            run_cached(req, &out, || {
                let (_, g) = graph.build()?;
                spectrum_doc(&g, c, iterations)
            })?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Discrepancy {
            graph,
            theta,
            samples,
            seed,
            workers,
            exhaustive,
            out,
        } => {
            let seed = match (seed, exhaustive) {
                (Some(s), _) => s,
                (None, true) => 0,
                (None, false) => return Err(CliError::Usage("--seed is required for sampled discrepancy".into())),
            };
            let mut req = graph.request("discrepancy");
            req.extend([
                ("theta".into(), theta.into()),
                ("samples".into(), samples.into()),
                ("seed".into(), seed.into()),
                ("workers".into(), workers.into()),
                ("exhaustive".into(), exhaustive.into()),
            ]);
            run_cached(req, &out, || {
                let (_, g) = graph.build()?;
                let report = if exhaustive {
                    discrepancy_exhaustive(&g, theta)?
                } else {
                    discrepancy_sampled_with(&g, theta, samples, seed, workers)?
                };
                Ok(header(g.q(), g.f_string(), to_json_doc(&report)?))
            })?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Clique {
            graph,
            budget,
            complement,
            out,
        } => {
            let mut req = graph.request("clique");
            req.insert("budget".into(), budget.into());
            req.insert("complement".into(), complement.into());
            run_cached(req, &out, || {
                let (_, g) = graph.build()?;
                let r = if complement {
                    independence_number(&g, budget)
                } else {
                    max_clique(&g, budget)
                };
                let mut body = to_json_doc(&r)?;
                if complement {
                    let m = body.as_object_mut().expect("object");
                    let omega = m.remove("omega").expect("omega");
                    let mut renamed = Map::new();
                    renamed.insert("alpha".into(), omega);
                    renamed.extend(std::mem::take(m));
                    body = Value::Object(renamed);
                }
                Ok(header(g.q(), g.f_string(), body))
            })?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Tuples { graph, size, out } => {
            let mut req = graph.request("tuples");
            req.insert("size".into(), size.into());
            run_cached(req, &out, || {
                let (_, g) = graph.build()?;
                Ok(header(g.q(), g.f_string(), to_json_doc(&tuple_census(&g, size)?)?))
            })?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Charsum {
            g,
            a,
            f,
            set,
            field,
            out,
        } => {
            let mut req = Map::new();
            req.extend([
                ("command".into(), "charsum".into()),
                ("g".into(), json!(g)),
                ("a".into(), a.clone().into()),
                ("f".into(), json!(f)),
                ("set".into(), set.clone().into()),
                ("field".into(), field.request()),
            ]);
            run_cached(req, &out, || {
                let fld = field.field()?;
                let q = fld.q() as usize;
                if let Some(g) = &g {
                    let gp = UniPoly::parse(g, &fld)?;
                    let r = weil_sum(&gp, parse_element(&a, &fld)?, &fld)?;
                    let mut doc = json!({"q": q, "g": gp.render(&fld)});
                    doc.as_object_mut().unwrap().extend(to_json_doc(&r)?.as_object().unwrap().clone());
                    Ok(doc)
                } else {
                    let fp = parse_poly(f.as_deref().expect("clap requires f"), &fld)?;
                    let c = parse_set(&set, &fld)?;
                    let r = incomplete_2d_sum(&fp, &c, &fld)?;
                    let mut body = to_json_doc(&r)?;
                    body["set_size"] = c.len().into();
                    Ok(header(q, &fp.render(&fld), body))
                }
            })?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Bounds { theta, q, c, k, l, out } => {
            let mut req = Map::new();
            req.extend([
                ("command".into(), "bounds".into()),
                ("theta".into(), theta.into()),
                ("q".into(), json!(q)),
                ("c".into(), c.into()),
                ("k".into(), json!(k)),
                ("l".into(), json!(l)),
            ]);
            run_cached(req, &out, || {
                let report = match q {
                    Some(q) => lower_bound_plan(q, theta, c)?,
                    None => solve_ell(theta)?,
                };
                let mut doc = to_json_doc(&report)?;
                if let (Some(k), Some(l)) = (k, l) {
                    doc["ramsey_main_term"] = to_json_doc(&ramsey_upper(k, l)?)?;
                }
                Ok(doc)
            })?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Scan(args) => {
            scan::run(&args)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Plot(args) => {
            plot::run(&args)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn report_error(e: &CliError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(1)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let msg = e.render().to_string();
            return report_error(&CliError::Usage(msg.trim().to_string()));
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => report_error(&e),
    }
}
