//! Command-line interface to the fusion module library.

use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use fusionmod::compat::hom_dim;
use fusionmod::dual::dual_rings;
use fusionmod::enumerate::{enumerate_modules, EnumerationConfig};
use fusionmod::expr::{format_object, parse_object};
use fusionmod::io::{load_modules_json, load_modules_text, load_ring, save_modules_json, save_modules_text, save_ring};
use fusionmod::module::restrict_and_decompose;
use fusionmod::verify::{run_suite, Context, Suite};
use fusionmod::{catalog_names, catalog_ring, FusionModule, FusionRing};

/// Environment variable read for the worker count when `--workers` is absent.
const WORKERS_ENV: &str = "FUSIONMOD_WORKERS";

#[derive(Parser)]
#[command(name = "fusionmod", version, about = "Fusion rings and fusion modules over Q(sqrt 5)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect catalog rings or ring files.
    Ring {
        #[command(subcommand)]
        action: RingAction,
    },
    /// Enumerate all fusion modules over a ring.
    Enumerate {
        ring: String,
        #[arg(long)]
        out: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        max_rank: Option<usize>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Print the algebra table of every module.
    Algebras {
        ring: String,
        /// Read modules from a file instead of enumerating.
        #[arg(long)]
        modules: Option<String>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Dual ring candidates of one module.
    Dual {
        ring: String,
        /// 1-based module index in enumeration order, or a module file
        /// (`FILE` or `FILE#INDEX`).
        #[arg(long)]
        module: String,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// dim Hom(X, Y) of two objects.
    Hom { ring: String, x: String, y: String },
    /// Frobenius-Perron dimension of an object.
    Dim { ring: String, expr: String },
    /// Restrict a module to a subring and split it.
    Restrict {
        ring: String,
        #[arg(long)]
        module: String,
        /// Comma-separated subring basis, as indices or labels.
        #[arg(long)]
        subring: String,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Run the reproduction suite.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::Paper)]
        suite: SuiteArg,
        /// Print the report as JSON on stdout and the table on stderr.
        #[arg(long)]
        json: bool,
        #[arg(long)]
        workers: Option<usize>,
    },
}

#[derive(Subcommand)]
enum RingAction {
    /// List catalog ring names.
    List,
    /// Show a catalog ring or ring file.
    Show {
        name: String,
        #[arg(long)]
        json: bool,
    },
    /// Validate a ring file.
    Check { file: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Paper,
    Quick,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    msg: String,
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        msg: msg.into(),
    }
}

fn failed(msg: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        msg: msg.into(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn workers(flag: Option<usize>) -> Result<Option<usize>, Failure> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| usage(format!("{WORKERS_ENV} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

/// A catalog name or a path to a ring JSON file.
fn resolve_ring(name: &str) -> Result<Arc<FusionRing>, Failure> {
    if let Ok(c) = catalog_ring(name) {
        return Ok(c.ring);
    }
    if Path::new(name).is_file() {
        let src = std::fs::read_to_string(name).map_err(|e| usage(format!("{name}: {e}")))?;
        return load_ring(&src).map(Arc::new).map_err(|e| usage(format!("{name}: {e}")));
    }
    Err(usage(format!(
        "unknown ring {name:?}; catalog rings are {}",
        catalog_names().join(", ")
    )))
}

fn enumerate(ring: &Arc<FusionRing>, max_rank: Option<usize>, workers: Option<usize>) -> Result<Vec<FusionModule>, Failure> {
    let cfg = EnumerationConfig {
        max_rank,
        worker_count: workers,
        ..EnumerationConfig::default()
    };
    enumerate_modules(ring, &cfg)
        .map(|o| o.modules)
        .map_err(|e| failed(e.to_string()))
}

fn read_modules(ring: &Arc<FusionRing>, path: &str) -> Result<Vec<FusionModule>, Failure> {
    let src = std::fs::read_to_string(path).map_err(|e| usage(format!("{path}: {e}")))?;
    if src.trim_start().starts_with('{') {
        load_modules_json(ring, &src)
    } else {
        load_modules_text(ring, &src)
    }
    .map_err(|e| usage(format!("{path}: {e}")))
}

/// `N` selects the `N`-th enumerated module; anything else names a module
/// file, optionally suffixed by `#N`.
fn select_module(ring: &Arc<FusionRing>, sel: &str, workers: Option<usize>) -> Result<FusionModule, Failure> {
    let pick = |list: Vec<FusionModule>, n: usize| -> Result<FusionModule, Failure> {
        if n == 0 || n > list.len() {
            return Err(usage(format!("module index {n} out of range 1..={}", list.len())));
        }
        Ok(list[n - 1].clone())
    };
    if let Ok(n) = sel.parse::<usize>() {
        return pick(enumerate(ring, None, workers)?, n);
    }
    let (path, index) = match sel.rsplit_once('#') {
        Some((p, i)) => (p, Some(i.parse::<usize>().map_err(|_| usage(format!("bad module index in {sel:?}")))?)),
        None => (sel, None),
    };
    let list = read_modules(ring, path)?;
    match index {
        Some(n) => pick(list, n),
        None if list.len() == 1 => pick(list, 1),
        None => Err(usage(format!("{path} holds {} modules; select one with {path}#N", list.len()))),
    }
}

fn algebra_line(k: &FusionModule) -> String {
    k.algebra_table()
        .iter()
        .map(|(x, n)| {
            if *n > 1 {
                format!("{} (x{n})", format_object(x))
            } else {
                format_object(x)
            }
        })
        .collect::<Vec<_>>()
        .join(" | ")
}

fn dims_line(r: &FusionRing) -> Result<String, Failure> {
    let dims = r.fp_dims().map_err(|e| failed(e.to_string()))?;
    Ok(dims.iter().map(|d| d.to_d_string()).collect::<Vec<_>>().join(", "))
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Ring { action } => ring_command(action),
        Command::Enumerate {
            ring,
            out,
            format,
            max_rank,
            workers: w,
        } => {
            let r = resolve_ring(&ring)?;
            let modules = enumerate(&r, max_rank, workers(w)?)?;
            let body = match format {
                Format::Json => save_modules_json(&r, &modules),
                Format::Text => save_modules_text(&r, &modules),
            };
            match out {
                Some(path) => {
                    std::fs::write(&path, body).map_err(|e| failed(format!("{path}: {e}")))?;
                    println!("{} modules written to {path}", modules.len());
                }
                None => print!("{body}"),
            }
            Ok(())
        }
        Command::Algebras { ring, modules, workers: w } => {
            let r = resolve_ring(&ring)?;
            let list = match modules {
                Some(path) => read_modules(&r, &path)?,
                None => enumerate(&r, None, workers(w)?)?,
            };
            for (k, m) in list.iter().enumerate() {
                println!("{:>3} | {}", k + 1, algebra_line(m));
            }
            Ok(())
        }
        Command::Dual {
            ring,
            module,
            json,
            workers: w,
        } => {
            let r = resolve_ring(&ring)?;
            let k = select_module(&r, &module, workers(w)?)?;
            let cands = dual_rings(&k).map_err(|e| failed(e.to_string()))?;
            if json {
                let v: Vec<serde_json::Value> = cands
                    .iter()
                    .map(|c| {
                        let ring: serde_json::Value = serde_json::from_str(&save_ring(&c.ring)).expect("ring JSON");
                        let l: Vec<Vec<Vec<u32>>> = c.l.iter().map(|m| m.rows()).collect();
                        json!({ "ring": ring, "L": l })
                    })
                    .collect();
                println!("{}", serde_json::to_string_pretty(&v).expect("candidates serialize"));
            } else {
                for (x, c) in cands.iter().enumerate() {
                    println!("candidate {}: rank {}, dims {}", x + 1, c.ring.rank(), dims_line(&c.ring)?);
                }
            }
            Ok(())
        }
        Command::Hom { ring, x, y } => {
            let r = resolve_ring(&ring)?;
            let a = parse_object(&r, &x).map_err(|e| usage(e.to_string()))?;
            let b = parse_object(&r, &y).map_err(|e| usage(e.to_string()))?;
            println!("{}", hom_dim(&a, &b).map_err(|e| failed(e.to_string()))?);
            Ok(())
        }
        Command::Dim { ring, expr } => {
            let r = resolve_ring(&ring)?;
            let a = parse_object(&r, &expr).map_err(|e| usage(e.to_string()))?;
            println!("{}", a.dim().map_err(|e| failed(e.to_string()))?.to_d_string());
            Ok(())
        }
        Command::Restrict {
            ring,
            module,
            subring,
            workers: w,
        } => {
            let r = resolve_ring(&ring)?;
            let k = select_module(&r, &module, workers(w)?)?;
            let idx = subring
                .split(',')
                .map(|s| {
                    let s = s.trim();
                    s.parse::<usize>()
                        .ok()
                        .filter(|&i| i < r.rank())
                        .or_else(|| r.index_of(s))
                        .ok_or_else(|| usage(format!("unknown basis element {s:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let parts = restrict_and_decompose(&k, &idx).map_err(|e| usage(e.to_string()))?;
            for (x, p) in parts.iter().enumerate() {
                println!("component {}: rank {} | {}", x + 1, p.rank(), algebra_line(p));
            }
            Ok(())
        }
        Command::Verify { suite, json, workers: w } => {
            let suite = match suite {
                SuiteArg::Paper => Suite::Paper,
                SuiteArg::Quick => Suite::Quick,
            };
            let ctx = Context::new().with_workers(workers(w)?);
            let report = run_suite(suite, &ctx);
            if json {
                println!("{}", report.to_json());
                eprint!("{}", report.to_table());
            } else {
                print!("{}", report.to_table());
            }
            if report.pass() {
                Ok(())
            } else {
                Err(failed(format!("{} of {} checks failed", report.summary.failed, report.summary.total)))
            }
        }
    }
}

fn ring_command(action: RingAction) -> Result<(), Failure> {
    match action {
        RingAction::List => {
            for name in catalog_names() {
                let r = catalog_ring(name).map_err(|e| failed(e.to_string()))?.ring;
                println!("{name}\trank {}", r.rank());
            }
            Ok(())
        }
        RingAction::Show { name, json } => {
            let r = resolve_ring(&name)?;
            if json {
                print!("{}", save_ring(&r));
                return Ok(());
            }
            println!("name: {}", r.name());
            println!("rank: {}", r.rank());
            println!("labels: {}", r.labels().join(", "));
            println!("dims: {}", dims_line(&r)?);
            println!(
                "global dimension: {}",
                r.global_dim().map_err(|e| failed(e.to_string()))?.to_d_string()
            );
            println!("commutative: {}", r.is_commutative());
            Ok(())
        }
        RingAction::Check { file } => {
            let src = std::fs::read_to_string(&file).map_err(|e| usage(format!("{file}: {e}")))?;
            match load_ring(&src) {
                Ok(r) => {
                    r.fp_data().map_err(|e| failed(e.to_string()))?;
                    println!("valid: {} (rank {})", r.name(), r.rank());
                    Ok(())
                }
                Err(e) => Err(failed(format!("invalid ring: {e}"))),
            }
        }
    }
}
