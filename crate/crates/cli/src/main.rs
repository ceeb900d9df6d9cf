//! gridtomo command line: validate direction sets, inspect ghost geometry,
//! project phantoms, reconstruct, cross-check with the brute-force oracle,
//! and tabulate CGLS-vs-BRA accuracy.
//!
//! Exit codes: 0 success, 2 the direction set is not one of binary
//! uniqueness, 3 dimension mismatch, 1 any other error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gridtomo::bench::{run_bench_on, thread_cap, trend_violations, write_bench_csv};
use gridtomo::bra::{BraConfig};
use gridtomo::formats::{
    self, layout_manifest, read_gtp_file, write_gtp_file, write_manifest_file, ImageFormat,
};
use gridtomo::ghost::{
    build_bad_configuration, build_ghost_gu, build_ghost_index, enlarging_region,
    expand_fs,
};
use gridtomo::lattice::{
    check_binary_uniqueness, construct_set_odd_n, detect_structure_all,
};
use gridtomo::oracle::{alpha_closed_form, dense_min_norm, enumerate_binary_solutions};
use gridtomo::phantom::{generate_phantom, PhantomSpec};
use gridtomo::{DirectionSet, Error, GridDims, Image, SparseProjectionMatrix};

#[derive(Parser)]
#[command(
    name = "gridtomo",
    about = "Exact binary tomography on the lattice grid model",
    version
)]
struct Cli {
    /// Default seed for phantom specs that omit one.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Force fully sequential execution (bench workers, solver accumulation).
    #[arg(long, global = true)]
    deterministic: bool,
    /// Image output format: pgm, pgm-binary, or csv.
    #[arg(long, global = true, default_value = "pgm")]
    format: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Problem {
    /// Grid dimensions as MxN (width x height).
    #[arg(long)]
    grid: String,
    /// JSON file holding four [a, b] direction pairs.
    #[arg(long)]
    dirs: PathBuf,
}

impl Problem {
    fn parse(&self) -> Result<(GridDims, DirectionSet), Error> {
        let grid = parse_grid(&self.grid)?;
        let dirs = formats::read_direction_set_file(&self.dirs)?;
        Ok((grid, dirs))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check whether a direction set guarantees a unique binary image.
    Validate {
        #[command(flatten)]
        problem: Problem,
        /// Also list every matching role assignment.
        #[arg(long)]
        verbose: bool,
    },
    /// Print the switching configuration, enlarging region, and overlaps.
    Ghost {
        #[command(flatten)]
        problem: Problem,
        /// Render |g_u| for the translation P,Q as an ASCII PGM.
        #[arg(long, value_name = "P,Q")]
        render_gu: Option<String>,
        /// Output path for the rendering.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Forward-project a phantom into a GTP projection file.
    Project {
        #[command(flatten)]
        problem: Problem,
        /// Phantom spec: file:PATH | random:D[:SEED] | shapes:CLASS[:SEED] | fixture:NAME.
        #[arg(long)]
        phantom: String,
        #[arg(long)]
        out: PathBuf,
        /// Sidecar JSON manifest of (direction, t, bin) triples.
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Also save the generated phantom image.
        #[arg(long)]
        save_phantom: Option<PathBuf>,
    },
    /// Reconstruct the binary image from a GTP projection file.
    Reconstruct {
        #[command(flatten)]
        problem: Problem,
        #[arg(long)]
        proj: PathBuf,
        /// CGLS iteration count.
        #[arg(long)]
        kappa: usize,
        /// Optional early-stop tolerance on the normal residual.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: PathBuf,
        /// Proceed even if the set fails the uniqueness check.
        #[arg(long)]
        force: bool,
        /// Write run diagnostics as JSON.
        #[arg(long)]
        diag: Option<PathBuf>,
        /// Write the per-iteration residual trace as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Brute-force validation tools.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Compare plain CGLS rounding against the corrected reconstruction.
    Bench {
        #[command(flatten)]
        problem: Problem,
        #[arg(long)]
        phantom: String,
        /// Comma-separated iteration counts, e.g. 10,20,50.
        #[arg(long)]
        schedule: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the constructive direction set for an odd grid side.
    SuggestDirs {
        #[arg(long)]
        odd_n: i64,
        /// Write the set as dirs JSON instead of printing it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Enumerate every binary solution of the system (up to a cap).
    Enumerate {
        #[command(flatten)]
        problem: Problem,
        #[arg(long)]
        proj: PathBuf,
        #[arg(long, default_value_t = 16)]
        cap: usize,
        /// Write each solution as PREFIX-<i>.<ext>.
        #[arg(long)]
        out_prefix: Option<String>,
    },
    /// Dense SVD minimum-norm solve (small grids only).
    Minnorm {
        #[command(flatten)]
        problem: Problem,
        #[arg(long)]
        proj: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Output CSV image of the real-valued solution.
        #[arg(long)]
        out: PathBuf,
    },
    /// Closed-form ghost weights evaluated on a known phantom.
    Alphas {
        #[command(flatten)]
        problem: Problem,
        /// Phantom spec for the ground truth.
        #[arg(long)]
        phantom: String,
    },
}

fn parse_grid(text: &str) -> Result<GridDims, Error> {
    let (m, n) = text
        .split_once(['x', 'X'])
        .ok_or_else(|| Error::parse(0, format!("grid must look like MxN, got {text:?}")))?;
    let m = m
        .trim()
        .parse::<usize>()
        .map_err(|e| Error::parse(0, format!("bad grid width: {e}")))?;
    let n = n
        .trim()
        .parse::<usize>()
        .map_err(|e| Error::parse(0, format!("bad grid height: {e}")))?;
    if m == 0 || n == 0 {
        return Err(Error::parse(0, "grid sides must be positive"));
    }
    Ok(GridDims::new(m, n))
}

fn parse_schedule(text: &str) -> Result<Vec<usize>, Error> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|e| Error::parse(0, format!("bad schedule entry {s:?}: {e}")))
        })
        .collect()
}

fn load_projection(
    path: &Path,
    a: &SparseProjectionMatrix,
) -> Result<gridtomo::ProjectionVector, Error> {
    let gtp = read_gtp_file(path)?;
    gtp.matches_layout(a.layout())?;
    Ok(gtp.projection())
}

fn image_format(text: &str) -> Result<ImageFormat, Error> {
    text.parse()
}

fn cmd_validate(problem: &Problem, verbose: bool) -> Result<u8, Error> {
    let (grid, dirs) = problem.parse()?;
    let report = check_binary_uniqueness(&dirs, grid);
    let mut value = serde_json::to_value(&report).map_err(|e| Error::parse(0, e.to_string()))?;
    if verbose {
        let all = detect_structure_all(&dirs);
        value["all_structure_matches"] =
            serde_json::to_value(&all).map_err(|e| Error::parse(0, e.to_string()))?;
    }
    println!("{}", serde_json::to_string_pretty(&value).unwrap());
    Ok(if report.is_binary_uniqueness_set { 0 } else { 2 })
}

fn cmd_ghost(
    problem: &Problem,
    render_gu: Option<&str>,
    out: Option<&Path>,
) -> Result<u8, Error> {
    let (grid, dirs) = problem.parse()?;
    let report = check_binary_uniqueness(&dirs, grid);
    let fs = expand_fs(&dirs);
    println!("F_S = {fs}");
    println!("terms: {}", fs.len());
    let Some(case) = report.structure else {
        return Err(Error::NoStructure);
    };
    let bad = build_bad_configuration(&dirs, case)?;
    println!(
        "case: {:?}, roles (u1..u4): {:?}",
        case.tag,
        case.role_vectors(&dirs)
    );
    println!("lambda0: {:?}", bad.lambda0());
    println!(
        "lambda_delta: {:?} (weight {})",
        bad.lambda_delta(),
        bad.delta_weight()
    );
    if !report.valid {
        println!("set is not valid on {grid}; no enlarging region");
        return Ok(2);
    }
    let region = enlarging_region(&dirs, grid);
    println!(
        "enlarging region E: {} x {} ({} translations)",
        region.width(),
        region.height(),
        region.len()
    );
    let index = build_ghost_index(&bad, &region);
    let mut by_mult = std::collections::BTreeMap::new();
    for cov in index.coverage().values() {
        *by_mult.entry(cov.multiplicity()).or_insert(0usize) += 1;
    }
    println!("|H| = {} pixels; coverage histogram:", index.len());
    for (mult, count) in by_mult {
        println!("  coverage {mult}: {count} pixels");
    }
    if let Some(spec) = render_gu {
        let (p, q) = spec
            .split_once(',')
            .ok_or_else(|| Error::parse(0, "render-gu takes P,Q"))?;
        let u = (
            p.trim()
                .parse::<i64>()
                .map_err(|e| Error::parse(0, format!("bad P: {e}")))?,
            q.trim()
                .parse::<i64>()
                .map_err(|e| Error::parse(0, format!("bad Q: {e}")))?,
        );
        let g = build_ghost_gu(&bad, u, &region, grid)?;
        let magnitudes =
            Image::from_values(grid, g.values().iter().map(|v| v.abs()).collect());
        let path = out.ok_or_else(|| Error::parse(0, "render-gu needs --out"))?;
        let mut buf = Vec::new();
        formats::write_pgm_gray(&mut buf, &magnitudes, 2)?;
        fs::write(path, buf)?;
        println!("wrote |g_{u:?}| to {}", path.display());
    }
    Ok(if report.is_binary_uniqueness_set { 0 } else { 2 })
}

fn cmd_project(
    problem: &Problem,
    phantom: &str,
    out: &Path,
    manifest: Option<&Path>,
    save_phantom: Option<&Path>,
    seed: u64,
    format: ImageFormat,
) -> Result<u8, Error> {
    let (grid, dirs) = problem.parse()?;
    let spec = PhantomSpec::parse(phantom, grid, seed)?;
    let truth = generate_phantom(&spec)?;
    let a = SparseProjectionMatrix::build(&dirs, grid);
    let p = a.forward_project(&truth)?;
    write_gtp_file(out, a.layout(), &p)?;
    println!("wrote {} bins to {}", p.len(), out.display());
    if let Some(path) = manifest {
        write_manifest_file(path, a.layout())?;
        println!(
            "wrote manifest ({} entries) to {}",
            layout_manifest(a.layout()).len(),
            path.display()
        );
    }
    if let Some(path) = save_phantom {
        formats::save_image(path, &truth, format)?;
        println!("wrote phantom to {}", path.display());
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_reconstruct(
    problem: &Problem,
    proj: &Path,
    kappa: usize,
    tol: Option<f64>,
    out: &Path,
    force: bool,
    diag: Option<&Path>,
    trace_path: Option<&Path>,
    deterministic: bool,
    format: ImageFormat,
) -> Result<u8, Error> {
    let (grid, dirs) = problem.parse()?;
    let a = SparseProjectionMatrix::build(&dirs, grid);
    let p = load_projection(proj, &a)?;
    let mut cfg = BraConfig::new(kappa);
    cfg.residual_tol = tol;
    cfg.force = force;
    cfg.deterministic = deterministic;
    let res = gridtomo::bra(&dirs, grid, &p, &cfg)?;
    formats::save_image(out, &res.binary, format)?;
    println!(
        "wrote reconstruction to {} ({} iterations, residual {:.3e})",
        out.display(),
        res.kappa_used,
        res.diagnostics.residual_norm
    );
    if res.diagnostics.forced {
        eprintln!("warning: uniqueness check was bypassed; the result carries no guarantee");
    }
    if !res.diagnostics.near_half.is_empty() {
        eprintln!(
            "warning: {} pixels within {} of 1/2 before rounding; consider more iterations",
            res.diagnostics.near_half.len(),
            res.diagnostics.near_half_margin
        );
    }
    if let Some(path) = diag {
        let value = serde_json::json!({
            "kappa_used": res.kappa_used,
            "weights": res.weights,
            "diagnostics": res.diagnostics,
        });
        fs::write(path, serde_json::to_string_pretty(&value).unwrap())?;
        println!("wrote diagnostics to {}", path.display());
    }
    if let Some(path) = trace_path {
        let mut csv = String::from("iteration,residual_norm,normal_residual\n");
        for (i, (r, nr)) in res
            .trace
            .residual_norms
            .iter()
            .zip(&res.trace.normal_residuals)
            .enumerate()
        {
            csv.push_str(&format!("{i},{r},{nr}\n"));
        }
        fs::write(path, csv)?;
        println!("wrote trace to {}", path.display());
    }
    Ok(0)
}

fn cmd_oracle(
    cmd: &OracleCommand,
    seed: u64,
    format: ImageFormat,
) -> Result<u8, Error> {
    match cmd {
        OracleCommand::Enumerate {
            problem,
            proj,
            cap,
            out_prefix,
        } => {
            let (grid, dirs) = problem.parse()?;
            let a = SparseProjectionMatrix::build(&dirs, grid);
            let p = load_projection(proj, &a)?;
            let res = enumerate_binary_solutions(&a, &p, *cap)?;
            println!(
                "{} binary solution(s){}",
                res.solutions.len(),
                if res.truncated { " (cap reached, more exist)" } else { "" }
            );
            if let Some(prefix) = out_prefix {
                let ext = match format {
                    ImageFormat::Csv => "csv",
                    _ => "pgm",
                };
                for (i, sol) in res.solutions.iter().enumerate() {
                    let path = PathBuf::from(format!("{prefix}-{i}.{ext}"));
                    formats::save_image(&path, sol, format)?;
                    println!("wrote {}", path.display());
                }
            }
            Ok(0)
        }
        OracleCommand::Minnorm {
            problem,
            proj,
            tol,
            out,
        } => {
            let (grid, dirs) = problem.parse()?;
            let a = SparseProjectionMatrix::build(&dirs, grid);
            let p = load_projection(proj, &a)?;
            let x = dense_min_norm(&a, &p, *tol)?;
            formats::save_image(out, &x, ImageFormat::Csv)?;
            println!("wrote minimum-norm solution to {}", out.display());
            Ok(0)
        }
        OracleCommand::Alphas { problem, phantom } => {
            let (grid, dirs) = problem.parse()?;
            let report = check_binary_uniqueness(&dirs, grid);
            let Some(case) = report.structure else {
                return Err(Error::NoStructure);
            };
            if !report.valid {
                return Err(Error::NotUniquenessSet(format!(
                    "set is not valid on {grid}"
                )));
            }
            let bad = build_bad_configuration(&dirs, case)?;
            let region = enlarging_region(&dirs, grid);
            let spec = PhantomSpec::parse(phantom, grid, seed)?;
            let truth = generate_phantom(&spec)?;
            let entries: Vec<serde_json::Value> = region
                .points()
                .map(|u| {
                    serde_json::json!({
                        "u": [u.0, u.1],
                        "alpha": alpha_closed_form(&truth, &bad, u),
                    })
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&entries).unwrap());
            Ok(0)
        }
    }
}

fn cmd_bench(
    problem: &Problem,
    phantom: &str,
    schedule: &str,
    out: &Path,
    seed: u64,
    deterministic: bool,
) -> Result<u8, Error> {
    let (grid, dirs) = problem.parse()?;
    let spec = PhantomSpec::parse(phantom, grid, seed)?;
    let schedule = parse_schedule(schedule)?;
    let workers = if deterministic { 1 } else { thread_cap() };
    let rows = run_bench_on(&spec, &dirs, &schedule, workers)?;
    for i in trend_violations(&rows) {
        eprintln!(
            "note: plain CGLS beat the corrected reconstruction at kappa={} \
             ({:.2}% vs {:.2}%)",
            rows[i].kappa, rows[i].cgls_percent, rows[i].bra_percent
        );
    }
    let mut csv = Vec::new();
    write_bench_csv(&mut csv, &rows)?;
    fs::write(out, csv)?;
    println!("wrote {} rows to {}", rows.len(), out.display());
    Ok(0)
}

fn cmd_suggest_dirs(odd_n: i64, out: Option<&Path>) -> Result<u8, Error> {
    let s = construct_set_odd_n(odd_n)?;
    match out {
        Some(path) => {
            formats::write_direction_set_file(path, &s)?;
            println!("wrote direction set to {}", path.display());
        }
        None => println!("{}", serde_json::to_string(&s).unwrap()),
    }
    Ok(0)
}

fn run(cli: &Cli) -> Result<u8, Error> {
    let format = image_format(&cli.format)?;
    match &cli.command {
        Command::Validate { problem, verbose } => cmd_validate(problem, *verbose),
        Command::Ghost {
            problem,
            render_gu,
            out,
        } => cmd_ghost(problem, render_gu.as_deref(), out.as_deref()),
        Command::Project {
            problem,
            phantom,
            out,
            manifest,
            save_phantom,
        } => cmd_project(
            problem,
            phantom,
            out,
            manifest.as_deref(),
            save_phantom.as_deref(),
            cli.seed,
            format,
        ),
        Command::Reconstruct {
            problem,
            proj,
            kappa,
            tol,
            out,
            force,
            diag,
            trace,
        } => cmd_reconstruct(
            problem,
            proj,
            *kappa,
            *tol,
            out,
            *force,
            diag.as_deref(),
            trace.as_deref(),
            cli.deterministic,
            format,
        ),
        Command::Oracle(cmd) => cmd_oracle(cmd, cli.seed, format),
        Command::Bench {
            problem,
            phantom,
            schedule,
            out,
        } => cmd_bench(problem, phantom, schedule, out, cli.seed, cli.deterministic),
        Command::SuggestDirs { odd_n, out } => cmd_suggest_dirs(*odd_n, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::NotUniquenessSet(_) => 2,
                Error::DimensionMismatch(_) => 3,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}
