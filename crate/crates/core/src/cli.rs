//! `screenest` command line: `check`, `solve`, `oracle`, `refine`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::config::{MethodSpec, RunConfig};
use crate::error::{Error, Result};
use crate::model::{check_h1, check_h2, check_h3, check_premium, check_uniqueness, market_size, ScreeningInstance};
use crate::oracle::{compare, CompareOptions};
use crate::report;
use crate::solver::{refinement_study, solve_numeric, solve_uniform, NumericOptions, SolutionBundle};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_HYPOTHESIS: i32 = 3;
pub const EXIT_NON_NESTED: i32 = 4;
pub const EXIT_SOLVE: i32 = 5;
pub const EXIT_ORACLE: i32 = 6;
pub const EXIT_REFINE: i32 = 7;

#[derive(Debug, Parser)]
#[command(name = "screenest", version, about = "Monopolist screening with two-dimensional types")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Auto,
    Closed,
    Numeric,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the nestedness hypotheses, premium and uniqueness conditions.
    Check { config: PathBuf },
    /// Solve for breakpoints, prices and regions.
    Solve {
        config: PathBuf,
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Write regions.svg (and levels.svg for non-nested candidates).
        #[arg(long)]
        svg: bool,
        /// Write solution.csv and regions.csv (default when --svg is absent).
        #[arg(long)]
        csv: bool,
    },
    /// Compare a solution against the brute-force oracle.
    Oracle {
        config: PathBuf,
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long)]
        search_grid: Option<usize>,
    },
    /// Grid-refinement study against the continuous limit.
    Refine {
        config: PathBuf,
        #[arg(long)]
        y: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        ns: Option<Vec<usize>>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

fn load(path: &Path) -> std::result::Result<(RunConfig, ScreeningInstance), Error> {
    let cfg = RunConfig::from_path(path)?;
    let inst = cfg.instance().map_err(|e| Error::Config(e.to_string()))?;
    Ok((cfg, inst))
}

/// Runs a parsed command, writing the human-readable report to `out`.
/// Returns the process exit code.
pub fn run(cli: &Cli, out: &mut dyn Write) -> i32 {
    let config = match &cli.command {
        Command::Check { config } | Command::Solve { config, .. } | Command::Oracle { config, .. } | Command::Refine { config, .. } => config,
    };
    let (cfg, inst) = match load(config) {
        Ok(v) => v,
        Err(e) => {
            let _ = writeln!(out, "error: {e}");
            return EXIT_CONFIG;
        }
    };
    let result = match &cli.command {
        Command::Check { .. } => cmd_check(&inst, out),
        Command::Solve { method, out_dir, svg, csv, .. } => {
            let method = method.map(|m| match m {
                MethodArg::Auto => MethodSpec::Auto,
                MethodArg::Closed => MethodSpec::Closed,
                MethodArg::Numeric => MethodSpec::Numeric,
            });
            cmd_solve(&inst, method.unwrap_or(cfg.solve.method), out_dir, *svg, *csv || !*svg, out)
        }
        Command::Oracle { resolution, search_grid, .. } => {
            let opts = CompareOptions {
                resolution: resolution.unwrap_or(cfg.oracle.resolution),
                search_grid: search_grid.unwrap_or(cfg.oracle.search_grid),
                ..Default::default()
            };
            cmd_oracle(&inst, cfg.solve.method, &opts, out)
        }
        Command::Refine { y, ns, out_dir, .. } => {
            let y = y.or(cfg.refine.y);
            let ns = ns.clone().or_else(|| cfg.refine.ns.clone());
            cmd_refine(&cfg, &inst, y, ns, out_dir, out)
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(out, "error: {e}");
            match e {
                Error::Config(_) => EXIT_CONFIG,
                _ => EXIT_SOLVE,
            }
        }
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

pub fn cmd_check(inst: &ScreeningInstance, out: &mut dyn Write) -> Result<i32> {
    let mut all = true;
    let mut row = |out: &mut dyn Write, name: &str, pass: bool, detail: String| -> Result<()> {
        all &= pass;
        writeln!(out, "{name:<12} {:<5} {detail}", verdict(pass))?;
        Ok(())
    };
    writeln!(out, "{:<12} {:<5} detail", "check", "")?;
    let premium = check_premium(inst);
    row(out, "premium", premium, format!("c(z_1) = {:.6e}, F(y_1) = {:.6e}", inst.grid.costs[1], inst.grid.zs[1][1]))?;
    match market_size(inst) {
        Ok(m) => row(out, "market", true, format!("M = {m} of N = {}", inst.grid.n()))?,
        Err(e) => row(out, "market", false, e.to_string())?,
    }
    if inst.grid.n() >= 2 {
        let h1 = check_h1(inst);
        row(out, "H1", h1.pass, format!("margin {:.6e} at {:?}", h1.margin, h1.worst_triple))?;
        for (name, rep) in [("H2", check_h2(inst)), ("H3", check_h3(inst))] {
            match rep {
                Ok(r) => {
                    let failing: Vec<usize> = r.failing().map(|x| x.i).collect();
                    let detail = match r.worst_margin() {
                        Some(m) => format!("worst lhs-rhs {m:.6e}; failing i = {failing:?}"),
                        None => "no interior indices".into(),
                    };
                    row(out, name, r.pass, detail)?;
                }
                Err(e) => row(out, name, false, e.to_string())?,
            }
        }
    } else {
        writeln!(out, "H1-H3        skip  need N >= 2")?;
    }
    match check_uniqueness(inst) {
        Ok(u) => row(
            out,
            "uniqueness",
            u.pass,
            format!("|f_x1| <= alpha: {}; edge margin {:.6e} at x2 = {:.3}", u.gradient_condition, u.edge_margin, u.worst_x2),
        )?,
        Err(e) => row(out, "uniqueness", false, e.to_string())?,
    }
    let audit = inst.density.validate_bounds();
    for c in &audit.contradictions {
        writeln!(out, "warning: {c}")?;
    }
    Ok(if all { EXIT_OK } else { EXIT_HYPOTHESIS })
}

pub fn solve(inst: &ScreeningInstance, method: MethodSpec) -> Result<SolutionBundle> {
    match method {
        MethodSpec::Closed => solve_uniform(inst),
        MethodSpec::Numeric => solve_numeric(inst, &NumericOptions::default()),
        MethodSpec::Auto if inst.density.is_uniform() => solve_uniform(inst),
        MethodSpec::Auto => solve_numeric(inst, &NumericOptions::default()),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes)?;
    Ok(())
}

pub fn cmd_solve(
    inst: &ScreeningInstance,
    method: MethodSpec,
    out_dir: &Path,
    svg: bool,
    csv: bool,
    out: &mut dyn Write,
) -> Result<i32> {
    let b = solve(inst, method)?;
    fs::create_dir_all(out_dir)?;
    if csv {
        let mut buf = Vec::new();
        report::write_solution_csv(&mut buf, &b)?;
        write_file(&out_dir.join("solution.csv"), &buf)?;
        buf.clear();
        report::write_regions_csv(&mut buf, &b)?;
        write_file(&out_dir.join("regions.csv"), &buf)?;
    }
    if svg {
        write_file(&out_dir.join("regions.svg"), report::regions_svg(inst, &b).as_bytes())?;
        if !b.is_nested() {
            write_file(&out_dir.join("levels.svg"), report::levels_svg(inst, &b).as_bytes())?;
        }
    }
    writeln!(out, "method       {}", b.method)?;
    writeln!(out, "market_size  {}", b.breakpoints.m())?;
    writeln!(out, "profit       {}", report::num(b.profit))?;
    writeln!(out, "total_mass   {}", report::num(b.regions.total_mass()))?;
    writeln!(out, "nested       {}", b.is_nested())?;
    if !b.is_nested() {
        writeln!(
            out,
            "violations   monotone={} no_crossings={} positive_masses={} crossings={}",
            b.nested.monotone,
            b.nested.no_crossings,
            b.nested.positive_masses,
            b.nested.crossing_count()
        )?;
    }
    Ok(if b.is_nested() { EXIT_OK } else { EXIT_NON_NESTED })
}

pub fn cmd_oracle(inst: &ScreeningInstance, method: MethodSpec, opts: &CompareOptions, out: &mut dyn Write) -> Result<i32> {
    let b = solve(inst, method)?;
    if !b.is_nested() {
        writeln!(out, "solution is not nested; oracle comparison needs a nested bundle")?;
        return Ok(EXIT_NON_NESTED);
    }
    let v = compare(inst, &b, opts)?;
    writeln!(out, "bundle_profit  {}", report::num(v.bundle_profit))?;
    writeln!(out, "oracle_profit  {}", report::num(v.oracle_profit))?;
    writeln!(out, "profit_delta   {}", report::num(v.profit_delta()))?;
    writeln!(out, "mass_deviation {}", report::num(v.max_mass_deviation))?;
    writeln!(out, "opt_out_mass   {}", report::num(v.opt_out_mass))?;
    match &v.brute {
        Some(bf) => writeln!(
            out,
            "search_best    {} over {} tariffs (slack {})",
            report::num(bf.best_profit),
            bf.evaluated,
            report::num(bf.best_profit - v.bundle_profit)
        )?,
        None => writeln!(out, "search_best    skipped (market size above {})", crate::oracle::MAX_SEARCH_GOODS)?,
    }
    writeln!(out, "verdict        {}", verdict(v.pass))?;
    Ok(if v.pass { EXIT_OK } else { EXIT_ORACLE })
}

pub fn cmd_refine(
    cfg: &RunConfig,
    inst: &ScreeningInstance,
    y: Option<f64>,
    ns: Option<Vec<usize>>,
    out_dir: &Path,
    out: &mut dyn Write,
) -> Result<i32> {
    let y = y.ok_or_else(|| Error::Config("refine needs --y or refine.y".into()))?;
    let ns = ns.ok_or_else(|| Error::Config("refine needs --ns or refine.ns".into()))?;
    let grid = cfg.refine_grid()?;
    let table = refinement_study(&inst.curve, &inst.cost, &inst.density, grid, inst.rule, y, &ns)?;
    fs::create_dir_all(out_dir)?;
    let mut buf = Vec::new();
    report::write_refine_csv(&mut buf, &table)?;
    write_file(&out_dir.join("refine.csv"), &buf)?;
    for r in &table.rows {
        writeln!(out, "N={:<6} y={:.6} t={:.10} t_y={:.10} err={:.3e}", r.n, r.y_i, r.t_i, r.t_y, r.abs_err)?;
    }
    let ok = table.eventually_decreasing();
    writeln!(out, "eventually_decreasing {ok}")?;
    Ok(if ok { EXIT_OK } else { EXIT_REFINE })
}

/// Sizes the global worker pool from `SCREENEST_THREADS` (0 or unset: auto).
pub fn init_threads() {
    let n = std::env::var("SCREENEST_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()).unwrap_or(0);
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
}
