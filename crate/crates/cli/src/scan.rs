//! Batch scans: one CSV row per (q, f).

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use qrgraph::extremal::{independence_number, max_clique, DEFAULT_BUDGET};
use qrgraph::ff::{Field, FieldElement};
use qrgraph::graph::{self, build_graph, family_member, GraphInstance};
use qrgraph::poly::{parse_poly, random_admissible, BivarPoly, ComposeVariant, UniPoly};
use qrgraph::quasirand::{discrepancy_sampled, mixing_certificate, tuple_census};
use qrgraph::spectral::{self, power_top_two, SpectrumReport, MAX_DENSE};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::CliError;
use crate::output::{emit, fmt_sig};

pub const COLUMNS: [&str; 14] = [
    "q",
    "f",
    "family",
    "d",
    "e",
    "lambda1",
    "lambda2",
    "c_hat_12",
    "c_hat_34",
    "theta_cert",
    "omega",
    "alpha",
    "census_m3_relerr",
    "error",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScanFamily {
    #[value(name = "paley")]
    Paley,
    #[value(name = "paley_sum")]
    PaleySum,
    #[value(name = "dio")]
    Dio,
    #[value(name = "gendio")]
    Gendio,
    #[value(name = "H_d")]
    Hd,
    #[value(name = "random_admissible")]
    RandomAdmissible,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Analysis {
    Spectrum,
    Discrepancy,
    Clique,
    Census,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Plain,
    Tilde,
}

#[derive(Args, Clone, Debug)]
pub struct ScanArgs {
    #[arg(long, value_enum)]
    pub family: ScanFamily,
    /// Comma-separated odd prime powers; may be empty.
    #[arg(long, default_value = "")]
    pub q: String,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "spectrum")]
    pub analyses: Vec<Analysis>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Total degree for random_admissible; degree of g for H_d.
    #[arg(long, default_value_t = 3)]
    pub d: u32,
    /// Draws per q for random_admissible.
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    /// Bidegree-(1,1) base polynomial for H_d.
    #[arg(long, default_value = "x*y+1")]
    pub f: String,
    /// Inner polynomial for H_d; defaults to x^d.
    #[arg(long)]
    pub g: Option<String>,
    #[arg(long, value_enum, default_value = "plain")]
    pub variant: Variant,
    /// Random pairs per discrepancy run.
    #[arg(long, default_value_t = 1000)]
    pub samples: u64,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

enum Job {
    Named(ScanFamily, Field),
    GenDio(Field, FieldElement, FieldElement),
    Poly(Field, BivarPoly),
    Failed { q: u64, error: String },
}

fn family_tag(f: ScanFamily) -> &'static str {
    match f {
        ScanFamily::Paley => "paley",
        ScanFamily::PaleySum => "paley_sum",
        ScanFamily::Dio => "dio",
        ScanFamily::Gendio => "gendio",
        ScanFamily::Hd => "H_d",
        ScanFamily::RandomAdmissible => "random_admissible",
    }
}

pub fn parse_q_list(src: &str) -> Result<Vec<u64>, CliError> {
    src.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| CliError::Usage(format!("bad q '{s}'"))))
        .collect()
}

struct Drawn {
    jobs: Vec<Job>,
    attempts: u64,
    draws: u64,
}

fn plan(args: &ScanArgs, qs: &[u64]) -> Drawn {
    let mut jobs = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let (mut attempts, mut draws) = (0, 0);
    for &q in qs {
        let field = match Field::of_order(q) {
            Ok(f) => f,
            Err(e) => {
                jobs.push(Job::Failed { q, error: e.to_string() });
                continue;
            }
        };
        match args.family {
            ScanFamily::Paley | ScanFamily::PaleySum | ScanFamily::Dio => jobs.push(Job::Named(args.family, field)),
            ScanFamily::Gendio => {
                for a in field.elements().skip(1) {
                    for b in field.elements().skip(1) {
                        jobs.push(Job::GenDio(field.clone(), a, b));
                    }
                }
            }
            ScanFamily::Hd => jobs.push(Job::Named(ScanFamily::Hd, field)),
            ScanFamily::RandomAdmissible => {
                for _ in 0..args.count {
                    match random_admissible(args.d, &field, &mut rng) {
                        Ok(draw) => {
                            attempts += draw.attempts as u64;
                            draws += 1;
                            jobs.push(Job::Poly(field.clone(), draw.poly));
                        }
                        Err(e) => {
                            attempts += qrgraph::poly::MAX_ATTEMPTS as u64;
                            jobs.push(Job::Failed { q, error: e.to_string() });
                        }
                    }
                }
            }
        }
    }
    Drawn { jobs, attempts, draws }
}

#[derive(Default)]
struct Row {
    cells: Vec<String>,
}

impl Row {
    fn new() -> Row {
        Row {
            cells: vec![String::new(); COLUMNS.len()],
        }
    }

    fn set(&mut self, col: &str, value: impl Into<String>) {
        let i = COLUMNS.iter().position(|&c| c == col).expect("known column");
        self.cells[i] = value.into();
    }
}

fn build_job(job: &Job, args: &ScanArgs) -> Result<GraphInstance, CliError> {
    Ok(match job {
        Job::Named(ScanFamily::Paley, f) => graph::paley(f)?,
        Job::Named(ScanFamily::PaleySum, f) => graph::paley_sum(f)?,
        Job::Named(ScanFamily::Dio, f) => graph::diophantine(f)?,
        Job::Named(ScanFamily::Hd, f) => {
            let base = parse_poly(&args.f, f)?;
            let g = match &args.g {
                Some(src) => UniPoly::parse(src, f)?,
                None => UniPoly::x().pow(f, args.d as u64),
            };
            let variant = match args.variant {
                Variant::Plain => ComposeVariant::Plain,
                Variant::Tilde => ComposeVariant::Tilde,
            };
            family_member(&base, &g, variant, f)?
        }
        Job::Named(..) => unreachable!("named jobs are paley, paley_sum, dio and H_d"),
        Job::GenDio(f, a, b) => graph::gen_dio(*a, *b, f)?,
        Job::Poly(f, p) => build_graph(p, f)?,
        Job::Failed { error, .. } => return Err(CliError::Internal(error.clone())),
    })
}

fn job_q(job: &Job) -> u64 {
    match job {
        Job::Named(_, f) | Job::GenDio(f, ..) | Job::Poly(f, _) => f.q() as u64,
        Job::Failed { q, .. } => *q,
    }
}

fn run_row(index: usize, job: &Job, args: &ScanArgs) -> Row {
    let mut row = Row::new();
    row.set("q", job_q(job).to_string());
    row.set("family", family_tag(args.family));
    let g = match build_job(job, args) {
        Ok(g) => g,
        Err(e) => {
            row.set("error", e.to_string());
            return row;
        }
    };
    let prov = g.provenance().expect("built from a polynomial");
    row.set("f", prov.f.clone());
    row.set("d", prov.poly.degree().to_string());
    row.set("e", g.edge_count().to_string());
    let mut errors = Vec::new();
    let seed = args.seed ^ index as u64;
    for analysis in &args.analyses {
        let res: Result<(), CliError> = (|| {
            match analysis {
                Analysis::Spectrum => {
                    let s = if g.q() <= MAX_DENSE {
                        spectral::eigenvalues(&g)?
                    } else {
                        let a = power_top_two(&g, 300);
                        SpectrumReport {
                            lambda: vec![a.lambda1, a.lambda2],
                            lambda1_dev: 0.0,
                            lambda2_ratio_34: 0.0,
                            lambda2_ratio_12: 0.0,
                            trace_check: 0.0,
                        }
                    };
                    row.set("lambda1", fmt_sig(s.lambda1()));
                    row.set("lambda2", fmt_sig(s.lambda2()));
                    row.set("theta_cert", fmt_sig(mixing_certificate(&g, &s).theta_cert));
                }
                Analysis::Discrepancy => {
                    row.set("c_hat_12", fmt_sig(discrepancy_sampled(&g, 0.5, args.samples, seed)?.c_hat));
                    row.set("c_hat_34", fmt_sig(discrepancy_sampled(&g, 0.75, args.samples, seed)?.c_hat));
                }
                Analysis::Clique => {
                    let w = max_clique(&g, args.budget);
                    let a = independence_number(&g, args.budget);
                    row.set("omega", w.omega.to_string());
                    row.set("alpha", a.omega.to_string());
                    if !w.exact || !a.exact {
                        errors.push("clique budget exhausted; omega/alpha are lower bounds".to_string());
                    }
                }
                Analysis::Census => {
                    row.set("census_m3_relerr", fmt_sig(tuple_census(&g, 3)?.rel_err));
                }
            }
            Ok(())
        })();
        if let Err(e) = res {
            errors.push(e.to_string());
        }
    }
    row.set("error", errors.join("; "));
    row
}

pub fn scan_csv(args: &ScanArgs) -> Result<(Vec<u8>, u64, u64), CliError> {
    let qs = parse_q_list(&args.q)?;
    let drawn = plan(args, &qs);
    let rows: Vec<Row> = drawn
        .jobs
        .par_iter()
        .enumerate()
        .map(|(i, job)| run_row(i, job, args))
        .collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(COLUMNS).map_err(|e| CliError::Internal(e.to_string()))?;
    for r in &rows {
        w.write_record(&r.cells).map_err(|e| CliError::Internal(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Internal(e.to_string()))?;
    Ok((bytes, drawn.attempts, drawn.draws))
}

pub fn run(args: &ScanArgs) -> Result<(), CliError> {
    let (bytes, attempts, draws) = scan_csv(args)?;
    if args.family == ScanFamily::RandomAdmissible && attempts > 0 {
        let rejected = attempts - draws;
        eprintln!(
            "scan: random_admissible rejection rate {} ({rejected} of {attempts} draws rejected)",
            fmt_sig(rejected as f64 / attempts as f64)
        );
    }
    emit(&bytes, args.out.as_deref())
}
