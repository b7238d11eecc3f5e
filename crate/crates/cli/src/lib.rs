//! `nclab` command-line front end. Every command writes one report (JSON by
//! default) holding the tool version, the fully resolved configuration and a
//! SHA-256 over the inputs.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nclab::polyparse::GRAMMAR;
use nclab::subproduct::{verify_similarity, SimilarityCertificate};
use nclab::{
    counterexample_ideal, counterexample_norm, counterexample_poly, in_variety,
    nullstellensatz_witnesses, parse_ideal_file, parse_poly, relation_residuals, rfd_gap,
    sample_variety, search_max_on_variety, separating_point, FockTruncation, GradedIdeal,
    IdealConfig, NcPoly, SearchConfig, SubproductSystem, VERSION,
};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "nclab", version, about = "Homogeneous ideals, subproduct systems and nc varieties")]
struct Cli {
    #[command(flatten)]
    common: Common,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Worker threads (falls back to NCLAB_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Numerical tolerance (overrides the ideal file).
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
struct IdealArgs {
    /// Ideal file (`vars <d>` header, `gen <poly>` lines).
    #[arg(long)]
    ideal: PathBuf,

    /// Truncation degree N; default max(4, generator degree + 2).
    #[arg(long)]
    max_degree: Option<usize>,
}

#[derive(Args, Debug, Clone)]
struct SearchArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,

    #[arg(long, default_value_t = 32)]
    restarts: usize,

    #[arg(long, default_value_t = 1e-8)]
    feasibility_tol: f64,
}

impl SearchArgs {
    fn config(&self) -> SearchConfig {
        SearchConfig {
            restarts: self.restarts,
            seed: self.seed,
            feasibility_tol: self.feasibility_tol,
            ..SearchConfig::default()
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fiber dimensions dim X_0, ..., dim X_N.
    Fibers {
        #[command(flatten)]
        ideal: IdealArgs,
        /// Alias for --max-degree.
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Membership of a polynomial in the ideal.
    IdealMember {
        #[command(flatten)]
        ideal: IdealArgs,
        #[arg(long)]
        poly: String,
    },
    /// Norm of f(S) on the truncated Fock space.
    FockNorm {
        #[command(flatten)]
        ideal: IdealArgs,
        #[arg(long)]
        poly: String,
    },
    /// Random points of the variety at a given level.
    VarietySample {
        #[command(flatten)]
        ideal: IdealArgs,
        #[arg(long)]
        level: usize,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Compression of r*S to the low Fock blocks.
    SeparatingPoint {
        #[command(flatten)]
        ideal: IdealArgs,
        #[arg(long)]
        poly: String,
        #[arg(long, default_value_t = 0.5)]
        r: f64,
    },
    /// Penalized search for max |f| on the level-n variety.
    SearchMax {
        #[command(flatten)]
        ideal: IdealArgs,
        #[arg(long)]
        poly: String,
        #[arg(long)]
        level: usize,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Check a similarity certificate X -> Y.
    SimilarityVerify {
        #[command(flatten)]
        ideal: IdealArgs,
        /// Ideal file of the target system.
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        cert: PathBuf,
    },
    /// Fock norm of the counterexample polynomial against the bounded-level search.
    RfdGap {
        /// Number of variables; a comma list gives a grid.
        #[arg(long, value_delimiter = ',', required = true)]
        d: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        level: Vec<usize>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Separating points for a basis of X_n.
    Nullstellensatz {
        #[command(flatten)]
        ideal: IdealArgs,
        #[arg(long)]
        degree: usize,
        #[arg(long, default_value_t = 0.5)]
        r: f64,
    },
    /// The truncated counterexample ideal.
    Counterexample {
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 3)]
        max_degree: usize,
        #[arg(long)]
        check_relations: bool,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Fibers { .. } => "fibers",
            Command::IdealMember { .. } => "ideal-member",
            Command::FockNorm { .. } => "fock-norm",
            Command::VarietySample { .. } => "variety-sample",
            Command::SeparatingPoint { .. } => "separating-point",
            Command::SearchMax { .. } => "search-max",
            Command::SimilarityVerify { .. } => "similarity-verify",
            Command::RfdGap { .. } => "rfd-gap",
            Command::Nullstellensatz { .. } => "nullstellensatz",
            Command::Counterexample { .. } => "counterexample",
        }
    }
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Numerical(String),
}

impl From<nclab::Error> for Failure {
    fn from(e: nclab::Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// Hash over every input consumed by a command, in order.
#[derive(Default)]
struct Inputs {
    hasher: Sha256,
}

impl Inputs {
    fn add(&mut self, bytes: &[u8]) {
        self.hasher.update((bytes.len() as u64).to_le_bytes());
        self.hasher.update(bytes);
    }

    fn read(&mut self, path: &PathBuf) -> Outcome<String> {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        self.add(text.as_bytes());
        Ok(text)
    }

    fn digest(self) -> String {
        hex::encode(self.hasher.finalize())
    }
}

struct Loaded {
    ideal: GradedIdeal,
    max_degree: usize,
    tol: f64,
}

fn load_ideal(args: &IdealArgs, tol: Option<f64>, inputs: &mut Inputs) -> Outcome<Loaded> {
    let text = inputs.read(&args.ideal)?;
    let file = parse_ideal_file(&text)?;
    let gen_degree = file.generators.iter().filter_map(NcPoly::degree).max().unwrap_or(0);
    let max_degree = args
        .max_degree
        .or(file.options.max_degree)
        .unwrap_or_else(|| (gen_degree + 2).max(4));
    let tol = tol.or(file.options.tolerance).unwrap_or(nclab::ideal::DEFAULT_TOL);
    let cfg = IdealConfig {
        tol,
        ..IdealConfig::default()
    };
    let ideal = GradedIdeal::generated(file.dim_vars, &file.generators, max_degree, cfg)?;
    Ok(Loaded {
        ideal,
        max_degree,
        tol,
    })
}

fn poly_arg(text: &str, d: usize, inputs: &mut Inputs) -> Outcome<NcPoly> {
    inputs.add(text.as_bytes());
    Ok(parse_poly(text, d)?)
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

/// Result payload plus an optional CSV rendering.
struct Payload {
    config: Value,
    result: Value,
    csv: Option<String>,
}

fn execute(command: &Command, common: &Common, inputs: &mut Inputs) -> Outcome<Payload> {
    let tol = common.tol;
    match command {
        Command::Fibers { ideal, degree } => {
            let mut args = ideal.clone();
            args.max_degree = degree.or(args.max_degree);
            let l = load_ideal(&args, tol, inputs)?;
            let dims = SubproductSystem::from_ideal(&l.ideal, l.max_degree)?.dims();
            let mut csv = String::from("degree,dim\n");
            for (n, k) in dims.iter().enumerate() {
                let _ = writeln!(csv, "{n},{k}");
            }
            Ok(Payload {
                config: json!({"ideal": ideal.ideal, "max_degree": l.max_degree, "tol": l.tol}),
                result: json!({"dims": dims, "ideal_dims": l.ideal.dims()}),
                csv: Some(csv),
            })
        }
        Command::IdealMember { ideal, poly } => {
            let l = load_ideal(ideal, tol, inputs)?;
            let f = poly_arg(poly, l.ideal.dim_vars(), inputs)?;
            let ext = l.ideal.extended(f.degree().unwrap_or(0).max(l.max_degree))?;
            let m = ext.member(&f)?;
            Ok(Payload {
                config: json!({"ideal": ideal.ideal, "max_degree": ext.max_degree(), "tol": l.tol, "poly": poly}),
                result: json!({"poly": f, "is_member": m.is_member, "residual": m.residual}),
                csv: None,
            })
        }
        Command::FockNorm { ideal, poly } => {
            let l = load_ideal(ideal, tol, inputs)?;
            let f = poly_arg(poly, l.ideal.dim_vars(), inputs)?;
            let fock = FockTruncation::new(SubproductSystem::from_ideal(&l.ideal, l.max_degree)?);
            let norm = fock.fock_norm_lower_bound(&f)?;
            Ok(Payload {
                config: json!({"ideal": ideal.ideal, "max_degree": l.max_degree, "tol": l.tol, "poly": poly}),
                result: json!({"poly": f, "value": norm.value, "exact": norm.exact, "total_dim": norm.total_dim}),
                csv: None,
            })
        }
        Command::VarietySample { ideal, level, search } => {
            let l = load_ideal(ideal, tol, inputs)?;
            let cfg = search.config();
            let samples = sample_variety(&l.ideal, *level, &cfg)?;
            let mut checked = Vec::with_capacity(samples.len());
            for s in &samples {
                let c = in_variety(&l.ideal, &s.point, cfg.feasibility_tol, None)?;
                checked.push(json!({"sample": s, "variety": c}));
            }
            Ok(Payload {
                config: json!({"ideal": ideal.ideal, "max_degree": l.max_degree, "tol": l.tol,
                               "level": level, "search": cfg}),
                result: json!({"seed": cfg.seed, "samples": checked}),
                csv: None,
            })
        }
        Command::SeparatingPoint { ideal, poly, r } => {
            let l = load_ideal(ideal, tol, inputs)?;
            let f = poly_arg(poly, l.ideal.dim_vars(), inputs)?;
            let sp = separating_point(&l.ideal, &f, *r)?;
            Ok(Payload {
                config: json!({"ideal": ideal.ideal, "max_degree": l.max_degree, "tol": l.tol, "poly": poly, "r": r}),
                result: to_json(&sp),
                csv: None,
            })
        }
        Command::SearchMax {
            ideal,
            poly,
            level,
            search,
        } => {
            let l = load_ideal(ideal, tol, inputs)?;
            let f = poly_arg(poly, l.ideal.dim_vars(), inputs)?;
            let cfg = search.config();
            let report = search_max_on_variety(&l.ideal, &f, *level, &cfg)?;
            Ok(Payload {
                config: json!({"ideal": ideal.ideal, "max_degree": l.max_degree, "tol": l.tol,
                               "poly": poly, "level": level, "search": cfg}),
                result: to_json(&report),
                csv: None,
            })
        }
        Command::SimilarityVerify {
            ideal,
            target,
            cert,
        } => {
            let lx = load_ideal(ideal, tol, inputs)?;
            let target_args = IdealArgs {
                ideal: target.clone(),
                max_degree: Some(lx.max_degree),
            };
            let ly = load_ideal(&target_args, Some(lx.tol), inputs)?;
            let cert_text = inputs.read(cert)?;
            let certificate = SimilarityCertificate::parse(&cert_text)?;
            let x = SubproductSystem::from_ideal(&lx.ideal, lx.max_degree)?;
            let y = SubproductSystem::from_ideal(&ly.ideal, lx.max_degree)?;
            let report = verify_similarity(&certificate, &x, &y)?;
            Ok(Payload {
                config: json!({"ideal": ideal.ideal, "target": target, "cert": cert,
                               "max_degree": lx.max_degree, "tol": lx.tol}),
                result: json!({"report": report, "x_dims": x.dims(), "y_dims": y.dims()}),
                csv: None,
            })
        }
        Command::RfdGap { d, level, search } => {
            use rayon::prelude::*;
            let cfg = search.config();
            let cells: Vec<(usize, usize)> = d
                .iter()
                .flat_map(|&dd| level.iter().map(move |&l| (dd, l)))
                .collect();
            let reports = cells
                .par_iter()
                .map(|&(dd, l)| rfd_gap(dd, l, &cfg))
                .collect::<nclab::Result<Vec<_>>>()?;
            let mut csv = String::from("d,level,fock_value,variety_value,gap,gen_residual,seed,regime_guaranteed\n");
            for r in &reports {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{},{},{}",
                    r.d, r.level, r.fock_value, r.variety_value, r.gap, r.gen_residual, r.seed, r.regime_guaranteed
                );
            }
            let warnings: Vec<String> = reports
                .iter()
                .filter(|r| !r.regime_guaranteed)
                .map(|r| format!("d={} is not above level^2={}; no gap is guaranteed", r.d, r.level * r.level))
                .collect();
            for w in &warnings {
                eprintln!("warning: {w}");
            }
            let result = if reports.len() == 1 {
                to_json(&reports[0])
            } else {
                json!({"grid": reports})
            };
            Ok(Payload {
                config: json!({"d": d, "level": level, "search": cfg}),
                result: json!({"gap": result, "warnings": warnings}),
                csv: Some(csv),
            })
        }
        Command::Nullstellensatz { ideal, degree, r } => {
            let l = load_ideal(ideal, tol, inputs)?;
            let w = nullstellensatz_witnesses(&l.ideal, *degree, *r)?;
            Ok(Payload {
                config: json!({"ideal": ideal.ideal, "max_degree": l.max_degree, "tol": l.tol,
                               "degree": degree, "r": r}),
                result: json!({"count": w.witnesses.len(), "witnesses": w}),
                csv: None,
            })
        }
        Command::Counterexample {
            d,
            max_degree,
            check_relations,
        } => {
            let j = counterexample_ideal(*d, *max_degree)?;
            let x = SubproductSystem::from_ideal(&j, j.max_degree())?;
            let mut result = json!({
                "f": counterexample_poly(*d),
                "norm": counterexample_norm(*d),
                "ideal_dims": j.dims(),
                "dims": x.dims(),
            });
            if *check_relations {
                let rel = relation_residuals(&j)?;
                let worst = rel.iter().map(|r| r.residual).fold(0.0, f64::max);
                result["relations"] = to_json(&rel);
                result["max_residual"] = json!(worst);
                result["all_members"] = json!(rel.iter().all(|r| r.member));
            }
            Ok(Payload {
                config: json!({"d": d, "max_degree": j.max_degree(), "check_relations": check_relations}),
                result,
                csv: None,
            })
        }
    }
}

fn thread_count(flag: Option<usize>) -> Outcome<Option<usize>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var("NCLAB_THREADS") {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::Input(format!("NCLAB_THREADS={v} is not a thread count"))),
        _ => Ok(None),
    }
}

fn emit(common: &Common, text: &str) -> Outcome<()> {
    match &common.output {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Input(format!("{}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::Input(e.to_string()))
        }
    }
}

fn run_cli(cli: Cli) -> Outcome<()> {
    let threads = thread_count(cli.common.threads)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Failure::Input(format!("thread pool: {e}")))?;
    let mut inputs = Inputs::default();
    let payload = pool.install(|| execute(&cli.command, &cli.common, &mut inputs))?;

    let text = match cli.common.format {
        Format::Csv => payload.csv.ok_or_else(|| {
            Failure::Input(format!("{} has no CSV output", cli.command.name()))
        })?,
        Format::Json => {
            let mut config = payload.config;
            config["command"] = json!(cli.command.name());
            config["format"] = json!(cli.common.format);
            config["output"] = json!(cli.common.output);
            config["threads"] = json!(threads);
            let report = json!({
                "command": cli.command.name(),
                "version": VERSION,
                "config": config,
                "input_sha256": inputs.digest(),
                "result": payload.result,
            });
            serde_json::to_string_pretty(&report).expect("reports serialize") + "\n"
        }
    };
    emit(&cli.common, &text)
}

/// Runs the tool on `argv` (including the program name) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            if code == EXIT_INPUT {
                eprintln!("\npolynomial grammar:\n{GRAMMAR}");
            }
            return code;
        }
    };
    match run_cli(cli) {
        Ok(()) => EXIT_OK,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("\npolynomial grammar:\n{GRAMMAR}");
            EXIT_INPUT
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            EXIT_NUMERICAL
        }
    }
}
