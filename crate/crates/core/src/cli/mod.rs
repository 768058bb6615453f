//! The `symdecomp` command line.
//!
//! Exit codes: 0 success, 2 parse or input error, 3 numerical failure,
//! 4 verification mismatch.

pub mod bench;
pub mod expr;

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::combinatorics::{partitions_of, Partition};
use crate::decompose::{
    block_diagonalize_with, joint_spectrum, multiplicities, verify_decomposition, DecomposeOptions,
    DecompositionResult, SplitStrategy,
};
use crate::error::{Error, Result};
use crate::operator::Operator;
use crate::oracle::{kronecker_row, multiplicities_by_characters, TRACE_ORACLE_MAX_N};
use crate::repbuild::{
    irrep_representation, matrix_to_rows, rows_to_matrix, tensor_product_all, validate_generators,
    RepresentationFile, DEFAULT_VALIDATION_TOL,
};

use bench::{BenchConfig, BenchFamily, DEFAULT_BENCH_CAP};
use expr::{parse_partition, RepSpecExpression};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "symdecomp",
    version,
    about = "Decompose orthogonal representations of the symmetric group into irreducibles"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Round floats to five significant digits and indent the JSON output.
    #[arg(long, global = true)]
    pub pretty: bool,
    /// Refuse representations whose dimension exceeds this.
    #[arg(long, global = true, default_value_t = 5000)]
    pub max_dim: usize,
    /// Allow regular(n) beyond n = 6.
    #[arg(long, global = true)]
    pub allow_large: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Multiplicities from the joint YJM spectrum.
    Multiplicities {
        /// Representation expression, e.g. "tensor(irrep(2,1),irrep(2,1))".
        spec: String,
        /// Include the sorted joint spectrum.
        #[arg(long)]
        spectrum: bool,
        /// Compare with the character oracle (n <= 8); exit 4 on mismatch.
        #[arg(long)]
        check: bool,
    },
    /// Full block diagonalization.
    Decompose {
        spec: String,
        /// Write Q as {"d": d, "q": rows} to this file.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Skip the independent re-check of Q.
        #[arg(long)]
        no_verify: bool,
        /// Solve the intertwiner equations over all entries of Q̄.
        #[arg(long)]
        dense_split: bool,
    },
    /// Kronecker coefficients of two partitions by pipeline and oracle, or
    /// the decomposition of a longer tensor product.
    Kronecker {
        /// Comma-separated partitions, e.g. "3,2,1" "2,2,2".
        #[arg(num_args = 2.., required = true)]
        partitions: Vec<String>,
    },
    /// Time a family of tensor products and emit CSV.
    Bench {
        #[arg(long, value_enum)]
        family: BenchFamily,
        /// N, A..B or a comma-separated list.
        #[arg(long)]
        n: String,
        /// Tensor powers; ignored by the pair families.
        #[arg(long, default_value = "1")]
        k: String,
        #[arg(long, default_value_t = DEFAULT_BENCH_CAP)]
        cap: usize,
        #[arg(long, default_value_t = 1)]
        repeats: usize,
        /// Time the full block diagonalization.
        #[arg(long)]
        full: bool,
        /// Write the CSV here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write a log-log gnuplot script.
        #[arg(long)]
        gnuplot: Option<PathBuf>,
    },
    /// Check a representation file against the defining relations.
    Validate {
        path: PathBuf,
        /// Per-dimension tolerance.
        #[arg(long, default_value_t = DEFAULT_VALIDATION_TOL)]
        tol: f64,
    },
}

/// What a command produced.
#[derive(Debug, Default)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidArgument(_)
        | Error::InvalidPartition { .. }
        | Error::ContentInvariant(_)
        | Error::DimensionGuard { .. }
        | Error::Parse(_)
        | Error::Io(_)
        | Error::Json(_) => EXIT_PARSE,
        Error::HomomorphismViolation(_)
        | Error::Validation(_)
        | Error::SpectrumNotInteger(_)
        | Error::NotCommuting { .. }
        | Error::NumericalFailure { .. }
        | Error::InconsistentSpectrum { .. }
        | Error::MultiplicityMismatch { .. }
        | Error::DependentColumns { .. } => EXIT_NUMERICAL,
        Error::OracleInconsistency(_) => EXIT_MISMATCH,
    }
}

/// Parses arguments and runs one command. Clap usage errors exit with 2.
pub fn run_from<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => Outcome {
            code: if e.use_stderr() { EXIT_PARSE } else { EXIT_OK },
            stdout: if e.use_stderr() {
                String::new()
            } else {
                e.to_string()
            },
            stderr: if e.use_stderr() {
                e.to_string()
            } else {
                String::new()
            },
        },
    }
}

pub fn execute(cli: &Cli) -> Outcome {
    let result = match &cli.command {
        Command::Multiplicities {
            spec,
            spectrum,
            check,
        } => cmd_multiplicities(&cli.global, spec, *spectrum, *check),
        Command::Decompose {
            spec,
            output,
            no_verify,
            dense_split,
        } => cmd_decompose(&cli.global, spec, output.as_ref(), *no_verify, *dense_split),
        Command::Kronecker { partitions } => cmd_kronecker(&cli.global, partitions),
        Command::Bench {
            family,
            n,
            k,
            cap,
            repeats,
            full,
            output,
            gnuplot,
        } => bench::parse_range(n)
            .and_then(|ns| bench::parse_range(k).map(|ks| (ns, ks)))
            .map_err(Error::Parse)
            .and_then(|(ns, ks)| {
                cmd_bench(
                    &BenchConfig {
                        family: *family,
                        ns,
                        ks,
                        cap: *cap,
                        repeats: *repeats,
                        full: *full,
                    },
                    output.as_ref(),
                    gnuplot.as_ref(),
                )
            }),
        Command::Validate { path, tol } => cmd_validate(&cli.global, path, *tol),
    };
    result.unwrap_or_else(|e| Outcome {
        stdout: String::new(),
        stderr: format!("error: {e}\n"),
        code: exit_code(&e),
    })
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(num) if num.is_f64() => {
            let x = num.as_f64().unwrap();
            if let Ok(r) = format!("{x:.4e}").parse::<f64>() {
                *v = json!(r);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn render(global: &GlobalArgs, mut v: Value) -> String {
    if global.pretty {
        round_floats(&mut v);
        serde_json::to_string_pretty(&v).unwrap() + "\n"
    } else {
        serde_json::to_string(&v).unwrap() + "\n"
    }
}

fn result_json(
    expr: &RepSpecExpression,
    rep_n: usize,
    d: usize,
    r: &DecompositionResult,
    seconds: f64,
) -> Value {
    json!({
        "expression": expr.to_string(),
        "n": rep_n,
        "d": d,
        "components": r.components,
        "residual": r.residual,
        "seconds": seconds,
    })
}

fn load(global: &GlobalArgs, spec: &str) -> Result<(RepSpecExpression, crate::Representation)> {
    let expr = RepSpecExpression::parse(spec)?;
    expr.check_dimension(global.max_dim)?;
    let rep = expr.build(global.allow_large)?;
    Ok((expr, rep))
}

fn oracle_comparison(
    rep: &crate::Representation,
    r: &DecompositionResult,
) -> Result<(Value, bool)> {
    let expected = multiplicities_by_characters(rep)?;
    let mut agree = true;
    let rows: Vec<Value> = expected
        .into_iter()
        .map(|(shape, m)| {
            let found = r.multiplicity(&shape);
            agree &= found == m;
            json!({"partition": shape, "pipeline": found, "oracle": m, "agree": found == m})
        })
        .collect();
    Ok((Value::Array(rows), agree))
}

fn cmd_multiplicities(
    global: &GlobalArgs,
    spec: &str,
    spectrum: bool,
    check: bool,
) -> Result<Outcome> {
    let (expr, rep) = load(global, spec)?;
    let start = Instant::now();
    let r = multiplicities(&rep)?;
    let seconds = start.elapsed().as_secs_f64();
    let mut out = result_json(&expr, rep.n(), rep.dim(), &r, seconds);
    if spectrum {
        out["spectrum"] = json!(joint_spectrum(&rep)?.1.to_vecs());
    }
    let mut code = EXIT_OK;
    if check {
        if rep.n() > TRACE_ORACLE_MAX_N {
            return Err(Error::InvalidArgument(format!(
                "--check needs n <= {TRACE_ORACLE_MAX_N}"
            )));
        }
        let (table, agree) = oracle_comparison(&rep, &r)?;
        out["oracle"] = table;
        if !agree {
            code = EXIT_MISMATCH;
        }
    }
    Ok(Outcome {
        stdout: render(global, out),
        stderr: String::new(),
        code,
    })
}

fn cmd_decompose(
    global: &GlobalArgs,
    spec: &str,
    output: Option<&PathBuf>,
    no_verify: bool,
    dense_split: bool,
) -> Result<Outcome> {
    let (expr, rep) = load(global, spec)?;
    let options = DecomposeOptions {
        strategy: if dense_split {
            SplitStrategy::Dense
        } else {
            SplitStrategy::Restricted
        },
        ..DecomposeOptions::default()
    };
    let start = Instant::now();
    let r = block_diagonalize_with(&rep, &options)?;
    let seconds = start.elapsed().as_secs_f64();
    let mut out = result_json(&expr, rep.n(), rep.dim(), &r, seconds);
    let mut code = EXIT_OK;
    if !no_verify {
        let report = verify_decomposition(&rep, &r);
        if !report.passed() {
            code = EXIT_MISMATCH;
        }
        out["verification"] = json!({
            "passed": report.passed(),
            "orthogonality": report.orthogonality,
            "block_residual": report.block_residual,
            "tolerance": report.tolerance,
            "oracle_checked": report.oracle_mismatches.is_some(),
            "oracle_mismatches": report.oracle_mismatches,
        });
    }
    if let Some(path) = output {
        let q = r.q.as_ref().expect("block_diagonalize returns Q");
        let text = serde_json::to_string(&json!({"d": rep.dim(), "q": matrix_to_rows(q)}))?;
        fs::write(path, text)?;
        out["q_file"] = json!(path.display().to_string());
    }
    Ok(Outcome {
        stdout: render(global, out),
        stderr: String::new(),
        code,
    })
}

fn cmd_kronecker(global: &GlobalArgs, args: &[String]) -> Result<Outcome> {
    let shapes: Vec<Partition> = args
        .iter()
        .map(|a| parse_partition(a))
        .collect::<Result<_>>()?;
    let n = shapes[0].n();
    if shapes.iter().any(|s| s.n() != n) {
        return Err(Error::Parse(
            "all partitions must have the same size".into(),
        ));
    }
    let factors = shapes
        .iter()
        .map(irrep_representation)
        .collect::<Result<Vec<_>>>()?;
    let d: usize = factors.iter().map(|f| f.dim()).product();
    if d > global.max_dim {
        return Err(Error::DimensionGuard {
            what: "tensor product".into(),
            dimension: d,
            cap: global.max_dim,
        });
    }
    let rep = tensor_product_all(&factors)?;
    let start = Instant::now();
    let r = multiplicities(&rep)?;
    let seconds = start.elapsed().as_secs_f64();

    let oracle: Option<Vec<(Partition, u64)>> = if shapes.len() == 2 {
        Some(kronecker_row(&shapes[0], &shapes[1])?)
    } else if n <= TRACE_ORACLE_MAX_N {
        Some(
            multiplicities_by_characters(&rep)?
                .into_iter()
                .map(|(p, m)| (p, m as u64))
                .collect(),
        )
    } else {
        None
    };
    let mut agree = true;
    let rows: Vec<Value> = partitions_of(n)?
        .into_iter()
        .enumerate()
        .map(|(i, nu)| {
            let found = r.multiplicity(&nu) as u64;
            match &oracle {
                Some(o) => {
                    let g = o[i].1;
                    agree &= g == found;
                    json!({"partition": nu, "pipeline": found, "oracle": g, "agree": g == found})
                }
                None => json!({"partition": nu, "pipeline": found}),
            }
        })
        .collect();
    let out = json!({
        "factors": shapes,
        "n": n,
        "d": d,
        "table": rows,
        "agree": oracle.as_ref().map(|_| agree),
        "residual": r.residual,
        "seconds": seconds,
    });
    Ok(Outcome {
        stdout: render(global, out),
        stderr: if agree {
            String::new()
        } else {
            "pipeline and character oracle disagree\n".into()
        },
        code: if agree { EXIT_OK } else { EXIT_MISMATCH },
    })
}

fn cmd_bench(
    config: &BenchConfig,
    output: Option<&PathBuf>,
    gnuplot: Option<&PathBuf>,
) -> Result<Outcome> {
    let (rows, notices) = bench::run_bench(config)?;
    let csv = bench::to_csv(&rows);
    let mut stderr: String = notices.iter().map(|n| format!("{n}\n")).collect();
    let points: Vec<(usize, f64)> = rows.iter().map(|r| (r.d, r.seconds)).collect();
    if let Some(slope) = bench::loglog_slope(&points) {
        stderr.push_str(&format!("log-log slope of time vs d: {slope:.3}\n"));
    }
    if let Some(path) = gnuplot {
        fs::write(path, bench::to_gnuplot(&rows))?;
    }
    let stdout = match output {
        Some(path) => {
            fs::write(path, &csv)?;
            String::new()
        }
        None => csv,
    };
    Ok(Outcome {
        stdout,
        stderr,
        code: EXIT_OK,
    })
}

fn cmd_validate(global: &GlobalArgs, path: &PathBuf, tol: f64) -> Result<Outcome> {
    let text = fs::read_to_string(path)?;
    let file: RepresentationFile =
        serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    let mut generators = Vec::with_capacity(file.generators.len());
    for rows in &file.generators {
        let m = rows_to_matrix(rows)?;
        if m.nrows() != m.ncols() {
            return Err(Error::Parse(format!(
                "generator is {}x{}, not square",
                m.nrows(),
                m.ncols()
            )));
        }
        generators.push(Operator::from_dense(m));
    }
    let report = validate_generators(file.n, file.d, &generators, tol);
    let mut out = serde_json::to_value(&report)?;
    out["passed"] = json!(report.passed());
    out["failures"] = json!(report.failures());
    Ok(Outcome {
        stdout: render(global, out),
        stderr: String::new(),
        code: if report.passed() {
            EXIT_OK
        } else {
            EXIT_MISMATCH
        },
    })
}
