//! Command-line front end: reproduces the solution and error tables and emits
//! plot-ready CSV.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use henstock_ode::fixtures::{Fixture, FixtureId, DEFAULT_DEPTH};
use henstock_ode::reference::{hake_sequence, rk4_baseline, Rk4Outcome};
use henstock_ode::{
    exact_via_formula, measured_error, theorem_bound, QuadratureConfig, SurrogateSolution,
    MAX_LEVEL,
};

/// Environment variable capping the worker threads (0 = automatic).
pub const THREADS_ENV: &str = "HENSTOCK_ODE_THREADS";

const TABLE1_X: [f64; 6] = [0.0, 0.125, 0.25, 0.5, 0.75, 1.0];
const TABLE1_LEVELS: [u32; 4] = [4, 5, 6, 7];
const TABLE2_LEVELS: std::ops::RangeInclusive<u32> = 4..=10;

#[derive(Parser, Debug)]
#[command(
    name = "henstock-ode",
    version,
    about = "Linear ODEs with singular coefficients"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Fixture to solve.
    #[arg(long, global = true, value_parser = parse_problem)]
    pub problem: Option<FixtureId>,

    /// Dyadic level n (2^n cells).
    #[arg(long, global = true, default_value_t = 7,
          value_parser = clap::value_parser!(u32).range(0..=MAX_LEVEL as i64))]
    pub level: u32,

    /// Evaluate on N equispaced points instead of the grid nodes.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(2..))]
    pub dense: Option<u32>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Truncation depth of the sawtooth examples.
    #[arg(long, global = true, default_value_t = DEFAULT_DEPTH)]
    pub depth: usize,
}

#[derive(Subcommand, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    /// Exact and surrogate solution on the grid.
    Solve,
    /// Surrogate solution of example3 at N = 16, 32, 64, 128.
    Table1,
    /// Grid error of example4 for n = 4..10.
    Table2,
    /// Ingredients of the a-priori error bound.
    Bound,
    /// Grid error and error bound for n = 1..level.
    Convergence,
    /// Surrogate against fixed-step RK4 at x = 1.
    CompareRk,
    /// Signed and absolute partial sums over dyadic segments.
    Hake,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Pretty,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub problem: Option<FixtureId>,
    pub level: u32,
    pub dense: Option<u32>,
    pub format: Format,
    pub output_path: Option<PathBuf>,
    pub depth: usize,
}

impl From<Cli> for RunConfig {
    fn from(cli: Cli) -> Self {
        Self {
            command: cli.command,
            problem: cli.problem,
            level: cli.level,
            dense: cli.dense,
            format: cli.format,
            output_path: cli.out,
            depth: cli.depth,
        }
    }
}

fn parse_problem(s: &str) -> std::result::Result<FixtureId, String> {
    s.parse().map_err(|e: henstock_ode::Error| e.to_string())
}

/// A rectangular result; cells are already formatted.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

/// Full-precision number: 10 significant digits, exact zero as `0`.
pub fn num(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else {
        format!("{v:.9e}")
    }
}

fn abscissa(x: f64) -> String {
    format!("{x}")
}

fn rounded(v: f64) -> String {
    format!("{v:.5}")
}

/// Closed form where available, otherwise the quadrature formula.
fn exact_solution(f: &Fixture) -> impl Fn(f64) -> henstock_ode::Result<f64> + '_ {
    let cfg = QuadratureConfig::default();
    move |x| match f.closed_form(x) {
        Some(y) => Ok(y),
        None => exact_via_formula(&f.spec, x, &cfg),
    }
}

fn fixture(config: &RunConfig) -> Result<Fixture> {
    let id = config.problem.unwrap_or(FixtureId::Example3);
    Ok(id.build(config.depth)?)
}

fn fixed_problem(config: &RunConfig, id: FixtureId) -> Result<Fixture> {
    match config.problem {
        Some(other) if other != id => bail!("this table is defined for {id}, not {other}"),
        _ => Ok(id.build(config.depth)?),
    }
}

fn solve(config: &RunConfig, pretty: bool) -> Result<Table> {
    let f = fixture(config)?;
    let sol = SurrogateSolution::from_problem(&f.spec, config.level)?;
    let exact = exact_solution(&f);
    let xs: Vec<f64> = match config.dense {
        Some(n) => (0..n).map(|j| j as f64 / (n - 1) as f64).collect(),
        None => {
            let cells = 1u64 << config.level;
            (0..=cells).map(|j| j as f64 / cells as f64).collect()
        }
    };
    let fmt = if pretty { rounded } else { num };
    let rows = xs
        .into_iter()
        .map(|x| {
            let y = exact(x)?;
            let yt = sol.eval(x)?;
            Ok(vec![abscissa(x), fmt(y), fmt(yt), num((yt - y).abs())])
        })
        .collect::<Result<_>>()?;
    Ok(Table {
        header: vec!["x", "y_exact", "y_approx", "abs_err"],
        rows,
    })
}

fn table1(config: &RunConfig, pretty: bool) -> Result<Table> {
    let f = fixed_problem(config, FixtureId::Example3)?;
    let sols = TABLE1_LEVELS
        .iter()
        .map(|&n| SurrogateSolution::from_problem(&f.spec, n))
        .collect::<henstock_ode::Result<Vec<_>>>()?;
    let fmt = if pretty { rounded } else { num };
    let rows = TABLE1_X
        .iter()
        .map(|&x| {
            let mut row = vec![abscissa(x), fmt(f.closed_form(x).context("closed form")?)];
            for sol in &sols {
                row.push(fmt(sol.eval(x)?));
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    Ok(Table {
        header: vec!["x", "y_exact", "N16", "N32", "N64", "N128"],
        rows,
    })
}

fn grid_error(f: &Fixture, n: u32) -> Result<f64> {
    let sol = SurrogateSolution::from_problem(&f.spec, n)?;
    Ok(measured_error(&sol, exact_solution(f), n)?)
}

fn table2(config: &RunConfig) -> Result<Table> {
    let f = fixed_problem(config, FixtureId::Example4)?;
    let rows = TABLE2_LEVELS
        .map(|n| Ok(vec![n.to_string(), num(grid_error(&f, n)?)]))
        .collect::<Result<_>>()?;
    Ok(Table {
        header: vec!["n", "delta_n"],
        rows,
    })
}

fn bound(config: &RunConfig) -> Result<Table> {
    let f = fixture(config)?;
    let budget = theorem_bound(&f.spec, config.level)?;
    let mut rows: Vec<Vec<String>> = budget
        .fields()
        .into_iter()
        .map(|(name, v)| vec![name.to_string(), num(v)])
        .collect();
    rows.push(vec![
        "exact_metadata".into(),
        u8::from(budget.exact_metadata).to_string(),
    ]);
    Ok(Table {
        header: vec!["field", "value"],
        rows,
    })
}

fn convergence(config: &RunConfig) -> Result<Table> {
    let f = fixture(config)?;
    let rows = (1..=config.level.max(1))
        .map(|n| {
            let delta = grid_error(&f, n)?;
            let bound = theorem_bound(&f.spec, n)?.bound;
            Ok(vec![n.to_string(), num(delta), num(bound)])
        })
        .collect::<Result<_>>()?;
    Ok(Table {
        header: vec!["n", "delta_n", "bound"],
        rows,
    })
}

fn compare_rk(config: &RunConfig) -> Result<Table> {
    let f = fixture(config)?;
    let x = 1.0;
    let h = (-(config.level as f64)).exp2();
    let y = exact_solution(&f)(x)?;
    let sol = SurrogateSolution::from_problem(&f.spec, config.level)?;
    let yt = sol.eval(x)?;
    let surrogate = vec![
        "surrogate".into(),
        abscissa(h),
        abscissa(x),
        num(yt),
        num((yt - y).abs()),
        "finite".into(),
    ];
    let rk = match rk4_baseline(&f.spec, h, x)? {
        Rk4Outcome::Finite(v) => vec![
            "rk4".into(),
            abscissa(h),
            abscissa(x),
            num(v),
            num((v - y).abs()),
            "finite".into(),
        ],
        Rk4Outcome::NonFinite(s) => {
            let mut note = String::new();
            write!(
                note,
                "non-finite at step {} stage {} t={}",
                s.step, s.stage, s.t
            )?;
            vec![
                "rk4".into(),
                abscissa(h),
                abscissa(x),
                String::new(),
                String::new(),
                note,
            ]
        }
    };
    Ok(Table {
        header: vec!["method", "step", "x", "y_approx", "abs_err", "status"],
        rows: vec![surrogate, rk],
    })
}

fn hake(config: &RunConfig) -> Result<Table> {
    let f = fixture(config)?;
    let Some(segments) = f.segments.as_ref() else {
        bail!(
            "{} has no dyadic segment integrals; use example1 or example2",
            f.id
        );
    };
    let rows = hake_sequence(segments)
        .into_iter()
        .map(|s| vec![s.depth.to_string(), num(s.signed), num(s.absolute)])
        .collect();
    Ok(Table {
        header: vec!["depth", "signed", "absolute"],
        rows,
    })
}

/// Computes the table for `config`.
pub fn compute(config: &RunConfig) -> Result<Table> {
    let pretty = config.format == Format::Pretty;
    match config.command {
        Command::Solve => solve(config, pretty),
        Command::Table1 => table1(config, pretty),
        Command::Table2 => table2(config),
        Command::Bound => bound(config),
        Command::Convergence => convergence(config),
        Command::CompareRk => compare_rk(config),
        Command::Hake => hake(config),
    }
}

pub fn write_csv<W: Write>(table: &Table, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_pretty<W: Write>(table: &Table, mut out: W) -> Result<()> {
    let mut widths: Vec<usize> = table.header.iter().map(|h| h.len()).collect();
    for row in &table.rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let header: Vec<String> = table.header.iter().map(|h| h.to_string()).collect();
    for row in std::iter::once(&header).chain(&table.rows) {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, &w)| format!("{cell:>w$}"))
            .collect();
        writeln!(out, "{}", line.join("  ").trim_end())?;
    }
    Ok(())
}

/// Runs `config`, writing to `out` unless an output path is set.
pub fn run<W: Write>(config: &RunConfig, out: W) -> Result<()> {
    let table = compute(config)?;
    match &config.output_path {
        Some(path) => {
            let file = std::fs::File::create(path)
                .with_context(|| format!("cannot create {}", path.display()))?;
            emit(config.format, &table, std::io::BufWriter::new(file))
        }
        None => emit(config.format, &table, out),
    }
}

fn emit<W: Write>(format: Format, table: &Table, out: W) -> Result<()> {
    match format {
        Format::Csv => write_csv(table, out),
        Format::Pretty => write_pretty(table, out),
    }
}

/// Thread count from [`THREADS_ENV`]; `None` means automatic.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => bail!("{THREADS_ENV}: {e}"),
        Ok(s) => {
            let n: usize = s.trim().parse().with_context(|| {
                format!("{THREADS_ENV} must be a non-negative integer, got `{s}`")
            })?;
            Ok((n > 0).then_some(n))
        }
    }
}
