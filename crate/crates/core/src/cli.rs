//! The `linkage-morse` command line.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::area::gradient_fd_error;
use crate::catalog::{build_catalog, planar_index, Catalog};
use crate::config::{check_odd, perturb_lengths, random_configuration, LengthVector, PerturbationSpec};
use crate::error::{Error, Result};
use crate::morse::{
    hessian_report, numeric_index, planar_numeric_index, random_search, refine_critical, summarize, HessianReport,
};
use crate::render::{render_svg, svg_filename, RenderSpec};
use crate::topology::{betti_decorated, betti_m3, verify_perfect, BettiTable};

pub const THREADS_ENV: &str = "LINKAGE_MORSE_THREADS";
/// Catalogs up to this size get numeric indices attached.
const NUMERIC_INDEX_MAX_N: usize = 11;
const FD_STEP: f64 = 1e-5;
const FD_LIMIT: f64 = 1e-6;

#[derive(Parser, Debug)]
#[command(
    name = "linkage-morse",
    version,
    about = "Critical points of the oriented area on polygonal linkages"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate and realize all critical pairs.
    Catalog {
        /// Append a machine-readable JSON line to the output.
        #[arg(long)]
        json: bool,
        #[arg(long, value_parser = odd_n)]
        n: usize,
        #[command(flatten)]
        perturb: Perturb,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Betti numbers of the configuration space.
    Betti {
        /// Append a machine-readable JSON line to the output.
        #[arg(long)]
        json: bool,
        #[arg(long, value_parser = odd_n)]
        n: usize,
        /// Use the decorated space instead of the polygon space.
        #[arg(long)]
        decorated: bool,
    },
    /// Compare the Morse census with the Betti numbers.
    Verify {
        /// Append a machine-readable JSON line to the output.
        #[arg(long)]
        json: bool,
        #[arg(long, value_parser = odd_n)]
        n: usize,
        /// Verify every odd n from `--n` up to this value.
        #[arg(long, value_parser = odd_n)]
        max: Option<usize>,
    },
    /// Numeric Morse indices of every catalog entry.
    Hessian {
        /// Append a machine-readable JSON line to the output.
        #[arg(long)]
        json: bool,
        #[arg(long, value_parser = odd_n)]
        n: usize,
        #[command(flatten)]
        perturb: Perturb,
        /// Index of the planar area function instead.
        #[arg(long)]
        planar: bool,
    },
    /// Random-restart search for critical points.
    Search {
        #[arg(long, value_parser = odd_n)]
        n: usize,
        #[arg(long)]
        restarts: usize,
        #[arg(long)]
        seed: u64,
        /// Write all search results to FILE and append the summary JSON line.
        #[arg(long = "json", value_name = "FILE")]
        results: Option<PathBuf>,
    },
    /// Analytic gradient against central finite differences.
    Gradcheck {
        /// Append a machine-readable JSON line to the output.
        #[arg(long)]
        json: bool,
        #[arg(long, value_parser = odd_n)]
        n: usize,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        seed: u64,
    },
    /// One SVG per catalog entry.
    Render {
        /// Append a machine-readable JSON line to the output.
        #[arg(long)]
        json: bool,
        #[arg(long, value_parser = odd_n)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
struct Perturb {
    /// Relative length perturbation magnitude.
    #[arg(long, requires = "seed")]
    perturb: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

impl Perturb {
    fn lengths(&self, n: usize) -> Result<LengthVector> {
        match self.perturb {
            Some(eps) => perturb_lengths(n, PerturbationSpec::new(eps, self.seed.unwrap_or(0))?),
            None => LengthVector::equilateral(n),
        }
    }
}

fn odd_n(s: &str) -> std::result::Result<usize, String> {
    let n: usize = s.parse().map_err(|e| format!("{e}"))?;
    check_odd(n).map_err(|e| e.to_string())?;
    Ok(n)
}

enum Outcome {
    Ok,
    Failed,
}

/// Runs the CLI on `argv` (program name first) and returns the exit code:
/// 0 on success, 2 when a verification fails, 1 on usage errors.
pub fn run_cli<O: Write, E: Write>(argv: &[String], out: &mut O, err: &mut E) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    1
                }
            };
        }
    };
    init_threads();
    match dispatch(&cli, out) {
        Ok(Outcome::Ok) => 0,
        Ok(Outcome::Failed) => 2,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::BadParity(_) | Error::InvalidLengths(_) | Error::InvalidArgument(_) | Error::Io(_) => 1,
                _ => 2,
            }
        }
    }
}

/// Sizes the global worker pool from `LINKAGE_MORSE_THREADS`, once.
pub fn init_threads() {
    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(0);
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
}

fn dispatch<O: Write>(cli: &Cli, out: &mut O) -> Result<Outcome> {
    match &cli.command {
        Command::Catalog {
            json,
            n,
            perturb,
            out: path,
        } => cmd_catalog(*n, perturb, path.as_ref(), *json, out),
        Command::Betti { json, n, decorated } => cmd_betti(*n, *decorated, *json, out),
        Command::Verify { json, n, max } => cmd_verify(*n, max.unwrap_or(*n), *json, out),
        Command::Hessian {
            json,
            n,
            perturb,
            planar,
        } => cmd_hessian(*n, perturb, *planar, *json, out),
        Command::Search {
            n,
            restarts,
            seed,
            results,
        } => cmd_search(*n, *restarts, *seed, results.as_ref(), out),
        Command::Gradcheck { json, n, samples, seed } => cmd_gradcheck(*n, *samples, *seed, *json, out),
        Command::Render { json, n, out: dir } => cmd_render(*n, dir, *json, out),
    }
}

/// Column-aligned table; numeric-looking cells are right-aligned.
pub fn format_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| {
                let pad = " ".repeat(w - c.chars().count());
                let numeric = c.parse::<f64>().is_ok() || *c == "-";
                if numeric {
                    format!("{pad}{c}")
                } else {
                    format!("{c}{pad}")
                }
            })
            .collect();
        parts.join("  ").trim_end().to_string()
    };
    let mut text = line(headers.to_vec());
    text.push('\n');
    for row in rows {
        text.push_str(&line(row.iter().map(String::as_str).collect()));
        text.push('\n');
    }
    text
}

fn emit_json<O: Write, T: Serialize + ?Sized>(out: &mut O, enabled: bool, value: &T) -> Result<()> {
    if enabled {
        writeln!(out, "{}", crate::json::to_string(value)?)?;
    }
    Ok(())
}

fn cmd_catalog<O: Write>(
    n: usize,
    perturb: &Perturb,
    path: Option<&PathBuf>,
    json: bool,
    out: &mut O,
) -> Result<Outcome> {
    let lengths = perturb.lengths(n)?;
    let mut catalog = build_catalog(n, &lengths)?;
    if n <= NUMERIC_INDEX_MAX_N {
        use rayon::prelude::*;
        catalog.entries.par_iter_mut().for_each(|e| {
            e.index_numeric = numeric_index(e).ok().map(|r| r.negatives as u32);
        });
    }
    let rows: Vec<Vec<String>> = catalog
        .entries
        .iter()
        .map(|e| {
            vec![
                e.ctype.sign_word(),
                e.ctype.omega().to_string(),
                format!("{:.9}", e.theta()),
                format!("{:.9}", e.radius),
                format!("{:.9}", e.s_value),
                e.index_combinatorial.to_string(),
                e.index_numeric.map_or("-".into(), |m| m.to_string()),
            ]
        })
        .collect();
    write!(
        out,
        "{}",
        format_table(&["signs", "omega", "theta", "radius", "S", "index", "numeric"], &rows)
    )?;
    writeln!(out, "{} entries", catalog.len())?;
    if let Some(path) = path {
        let file = std::io::BufWriter::new(std::fs::File::create(path)?);
        crate::json::to_writer(file, &catalog.to_json(), true)?;
        writeln!(out, "wrote {}", path.display())?;
    }
    emit_json(out, json, &json!({ "n": n, "entries": catalog.len() }))?;
    let consistent = catalog
        .entries
        .iter()
        .all(|e| e.index_numeric.is_none_or(|m| m == e.index_combinatorial));
    Ok(if consistent { Outcome::Ok } else { Outcome::Failed })
}

fn cmd_betti<O: Write>(n: usize, decorated: bool, json: bool, out: &mut O) -> Result<Outcome> {
    let table: BettiTable = if decorated { betti_decorated(n)? } else { betti_m3(n)? };
    let rows: Vec<Vec<String>> = table
        .betti
        .iter()
        .enumerate()
        .map(|(d, b)| vec![d.to_string(), b.to_string()])
        .collect();
    write!(out, "{}", format_table(&["degree", "betti"], &rows))?;
    writeln!(out, "total {}", table.total())?;
    let betti: Vec<String> = table.betti.iter().map(|b| b.to_string()).collect();
    emit_json(
        out,
        json,
        &json!({ "n": n, "decorated": decorated, "dim": table.dim, "betti": betti }),
    )?;
    Ok(Outcome::Ok)
}

fn cmd_verify<O: Write>(n: usize, max: usize, json: bool, out: &mut O) -> Result<Outcome> {
    if max < n {
        return Err(Error::InvalidArgument(format!("--max {max} is below --n {n}")));
    }
    let mut reports = Vec::new();
    for m in (n..=max).step_by(2) {
        let report = verify_perfect(m)?;
        writeln!(
            out,
            "n = {}: {} critical points, total Betti {}, {}",
            m,
            report.total_critical,
            report.total_betti,
            if report.verdict { "perfect" } else { "NOT perfect" }
        )?;
        let rows: Vec<Vec<String>> = report
            .per_index
            .iter()
            .map(|r| vec![r.degree.to_string(), r.morse_count.to_string(), r.betti.to_string()])
            .collect();
        write!(out, "{}", format_table(&["degree", "morse", "betti"], &rows))?;
        reports.push(report);
    }
    emit_json(out, json, &reports)?;
    Ok(if reports.iter().all(|r| r.verdict) {
        Outcome::Ok
    } else {
        Outcome::Failed
    })
}

fn cmd_hessian<O: Write>(n: usize, perturb: &Perturb, planar: bool, json: bool, out: &mut O) -> Result<Outcome> {
    use rayon::prelude::*;
    let lengths = perturb.lengths(n)?;
    let catalog: Catalog = build_catalog(n, &lengths)?;
    let reports: Vec<(String, u32, Result<HessianReport>)> = catalog
        .entries
        .par_iter()
        .map(|e| {
            if planar {
                (e.key(), planar_index(&e.ctype), planar_numeric_index(e))
            } else if lengths.is_equilateral() {
                (e.key(), e.index_combinatorial, numeric_index(e))
            } else {
                let polished = refine_critical(&e.config, 1);
                (e.key(), e.index_combinatorial, hessian_report(&polished.config))
            }
        })
        .collect();

    let mut ok = true;
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for (key, expected, report) in &reports {
        match report {
            Ok(r) => {
                ok &= r.negatives as u32 == *expected;
                rows.push(vec![
                    key.clone(),
                    expected.to_string(),
                    r.negatives.to_string(),
                    r.zeros.to_string(),
                    format!("{:.3e}", r.gradient_residual),
                ]);
                records.push(json!({
                    "key": key, "index_combinatorial": expected, "index_numeric": r.negatives,
                    "zeros": r.zeros, "residual": r.gradient_residual, "perturbation_seed": r.perturbation_seed,
                }));
            }
            Err(e) => {
                ok = false;
                rows.push(vec![
                    key.clone(),
                    expected.to_string(),
                    "-".into(),
                    "-".into(),
                    e.to_string(),
                ]);
                records.push(json!({ "key": key, "index_combinatorial": expected, "error": e.to_string() }));
            }
        }
    }
    write!(
        out,
        "{}",
        format_table(&["type", "combinatorial", "numeric", "zeros", "residual"], &rows)
    )?;
    writeln!(out, "{}", if ok { "all indices agree" } else { "index mismatch" })?;
    emit_json(out, json, &records)?;
    Ok(if ok { Outcome::Ok } else { Outcome::Failed })
}

fn cmd_search<O: Write>(n: usize, restarts: usize, seed: u64, path: Option<&PathBuf>, out: &mut O) -> Result<Outcome> {
    let results = random_search(n, restarts, seed)?;
    let s = summarize(&results);
    let rows = vec![
        vec!["restarts".into(), s.restarts.to_string()],
        vec!["converged".into(), s.converged.to_string()],
        vec!["PlanarCyclic".into(), s.planar_cyclic.to_string()],
        vec!["PlanarUnmatched".into(), s.planar_unmatched.to_string()],
        vec!["NonPlanarCandidate".into(), s.non_planar.to_string()],
        vec!["NotConverged".into(), s.not_converged.to_string()],
        vec!["max match distance".into(), format!("{:.3e}", s.max_match_distance)],
        vec!["distinct entries hit".into(), s.histogram.len().to_string()],
    ];
    write!(out, "{}", format_table(&["quantity", "value"], &rows))?;
    if let Some(path) = path {
        let file = std::io::BufWriter::new(std::fs::File::create(path)?);
        crate::json::to_writer(file, &results, true)?;
        writeln!(out, "wrote {}", path.display())?;
    }
    emit_json(out, path.is_some(), &s)?;
    Ok(if s.non_planar == 0 && s.planar_unmatched == 0 {
        Outcome::Ok
    } else {
        Outcome::Failed
    })
}

fn cmd_gradcheck<O: Write>(n: usize, samples: usize, seed: u64, json: bool, out: &mut O) -> Result<Outcome> {
    let lengths = LengthVector::equilateral(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let worst = (0..samples)
        .map(|_| gradient_fd_error(&random_configuration(&lengths, &mut rng), FD_STEP))
        .fold(0.0, f64::max);
    writeln!(out, "max relative FD error over {samples} samples: {worst:.3e}")?;
    emit_json(
        out,
        json,
        &json!({ "n": n, "samples": samples, "seed": seed, "max_error": worst }),
    )?;
    Ok(if worst < FD_LIMIT { Outcome::Ok } else { Outcome::Failed })
}

fn cmd_render<O: Write>(n: usize, dir: &PathBuf, json: bool, out: &mut O) -> Result<Outcome> {
    use rayon::prelude::*;
    let catalog = build_catalog(n, &LengthVector::equilateral(n)?)?;
    std::fs::create_dir_all(dir)?;
    let docs: Vec<(String, String)> = catalog
        .entries
        .par_iter()
        .map(|e| (svg_filename(n, e), render_svg(&RenderSpec::new(e))))
        .collect();
    for (name, svg) in &docs {
        std::fs::write(dir.join(name), svg)?;
    }
    writeln!(out, "wrote {} files to {}", docs.len(), dir.display())?;
    let names: Vec<&str> = docs.iter().map(|(name, _)| name.as_str()).collect();
    emit_json(out, json, &names)?;
    Ok(Outcome::Ok)
}
