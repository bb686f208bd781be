//! `iwg`: Jacobians, voltage covers and Iwasawa invariants from the command line.
//!
//! Exit status: 0 on success, 1 when the mathematics refuses (disconnected
//! graph, non-conforming fit, size guard, failed verification), 2 on bad input.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use iwg_core::iwasawa::{stickelberger_with, verify_example1_with};
use iwg_core::tower::TowerReport;
use iwg_core::voltage::derive_with_limit;
use iwg_core::{
    analyze_tower, fit_invariants, jacobian_with_removed, spanning_tree_count, Error, Graph,
    TowerSpec, VoltageAssignment, DEFAULT_MAX_VERTICES,
};

#[derive(Debug, Parser)]
#[command(
    name = "iwg",
    version,
    about = "Jacobians of cyclic voltage p-towers of graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Base graph in edge-list format.
    #[arg(long, global = true)]
    graph: Option<PathBuf>,
    /// Voltage file for the base graph.
    #[arg(long, global = true)]
    voltages: Option<PathBuf>,
    /// Use K_N with voltage 1 on edge {1, 2} and prime P instead of files.
    #[arg(long, global = true, num_args = 2, value_names = ["N", "P"])]
    seed_example1: Option<Vec<u64>>,
    #[arg(long, global = true)]
    p: Option<u64>,
    /// Top tower level M (derive: the level to build).
    #[arg(long, global = true)]
    levels: Option<u32>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Comma-separated exponents e_0,e_1,... for `fit`.
    #[arg(long, global = true, value_delimiter = ',')]
    exponents: Option<Vec<u64>>,
    #[arg(long, global = true, env = "IWG_MAX_VERTICES", default_value_t = DEFAULT_MAX_VERTICES)]
    max_vertices: usize,
    #[arg(long, global = true, default_value_t = 1)]
    removed_vertex: usize,
    /// Include full invariant factors and timings.
    #[arg(long, global = true)]
    verbose: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Jacobian invariant factors and spanning-tree count.
    Jacobian,
    /// Print the derived graph at level --levels in edge-list format.
    Derive,
    /// Per-level Sylow p-data up to level --levels.
    Tower,
    /// Fit mu, lambda, nu to --exponents or to a tower run.
    Fit,
    /// Determinant of the voltage Laplacian and the rank verdict.
    Theta,
    /// Check the complete-graph closed form for mu and lambda.
    #[command(name = "verify-example1")]
    VerifyExample1 {
        /// Number of vertices; defaults to N from --seed-example1.
        #[arg(long)]
        n: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn refusal(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Disconnected
            | Error::SizeGuard { .. }
            | Error::EnumerationGuard { .. }
            | Error::NonConformingFit { .. }
            | Error::ConnectivityViolation { .. } => Failure::refusal(e.to_string()),
            _ => Failure::input(e.to_string()),
        }
    }
}

type Outcome = Result<String, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = run(&cli);
    if cli.verbose {
        eprintln!("elapsed: {:.3?}", start.elapsed());
    }
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("iwg: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Jacobian => jacobian_cmd(cli),
        Command::Derive => derive_cmd(cli),
        Command::Tower => tower_cmd(cli),
        Command::Fit => fit_cmd(cli),
        Command::Theta => theta_cmd(cli),
        Command::VerifyExample1 { n } => verify_cmd(cli, *n),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_graph(cli: &Cli) -> Result<Graph, Failure> {
    if let Some(seed) = &cli.seed_example1 {
        return Ok(Graph::complete(seed[0] as usize)?);
    }
    let path = cli
        .graph
        .as_ref()
        .ok_or_else(|| Failure::input("--graph is required"))?;
    Graph::parse(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn prime(cli: &Cli) -> Result<u64, Failure> {
    match (&cli.seed_example1, cli.p) {
        (Some(seed), Some(p)) if seed[1] != p => Err(Failure::input(format!(
            "--p {p} conflicts with --seed-example1 prime {}",
            seed[1]
        ))),
        (Some(seed), _) => Ok(seed[1]),
        (None, Some(p)) => Ok(p),
        (None, None) => Err(Failure::input("--p is required")),
    }
}

fn load_voltages(cli: &Cli) -> Result<VoltageAssignment, Failure> {
    let p = prime(cli)?;
    if let Some(seed) = &cli.seed_example1 {
        return Ok(VoltageAssignment::single_voltage_complete(
            seed[0] as usize,
            p,
        )?);
    }
    let base = load_graph(cli)?;
    let path = cli
        .voltages
        .as_ref()
        .ok_or_else(|| Failure::input("--voltages is required for this command"))?;
    VoltageAssignment::parse(base, p, &read(path)?)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn levels(cli: &Cli) -> Result<u32, Failure> {
    cli.levels
        .ok_or_else(|| Failure::input("--levels is required"))
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn jacobian_cmd(cli: &Cli) -> Outcome {
    let g = load_graph(cli)?;
    let jac = jacobian_with_removed(&g, cli.removed_vertex)?;
    let trees = spanning_tree_count(&g);
    match cli.format.unwrap_or(Format::Text) {
        Format::Text => Ok(format!(
            "J(X) ≅ {}, spanning trees = {trees}\n",
            jac.describe()
        )),
        Format::Json => Ok(json(&serde_json::json!({
            "factors": jac.factors.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "rank_of_free_part": jac.rank_of_free_part,
            "spanning_trees": trees.to_string(),
        }))),
        Format::Csv => Err(Failure::input("jacobian supports --format text|json")),
    }
}

fn derive_cmd(cli: &Cli) -> Outcome {
    let va = load_voltages(cli)?;
    let d = derive_with_limit(&va, levels(cli)?, cli.max_vertices)?;
    Ok(d.graph.to_edge_list())
}

fn tower_spec(cli: &Cli) -> Result<TowerSpec, Failure> {
    let va = load_voltages(cli)?;
    Ok(TowerSpec {
        max_vertices: cli.max_vertices,
        include_total_order: cli.verbose,
        ..TowerSpec::new(va, levels(cli)?)
    })
}

fn tower_text(report: &TowerReport) -> String {
    let mut s = format!("p = {}\n", report.p);
    for l in &report.levels {
        let _ = write!(
            s,
            "m={} vertices={} connected={}",
            l.m, l.vertices, l.connected
        );
        if let (Some(e), Some(r), Some(parts)) = (l.e_m, l.p_rank, &l.p_part_factors) {
            let parts: Vec<String> = parts.iter().map(ToString::to_string).collect();
            let _ = write!(s, " e_m={e} p_rank={r} p_part=[{}]", parts.join(", "));
        }
        if let Some(order) = &l.total_order {
            let _ = write!(s, " |J|={order}");
        }
        s.push('\n');
    }
    if let Some(m) = report.first_disconnected_level {
        let _ = writeln!(s, "first disconnected level: {m}");
    }
    if let Some(m) = report.truncated_at_level {
        let _ = writeln!(s, "truncated: level {m} exceeds the vertex limit");
    }
    s
}

fn tower_cmd(cli: &Cli) -> Outcome {
    let report = analyze_tower(&tower_spec(cli)?)?;
    let out = match cli.format.unwrap_or(Format::Json) {
        Format::Json => json(&report),
        Format::Csv => report.to_csv(),
        Format::Text => tower_text(&report),
    };
    if let Some(m) = report.truncated_at_level {
        eprintln!(
            "iwg: report truncated at level {m} (vertex limit {})",
            cli.max_vertices
        );
        // the partial report is still useful; print it before refusing
        print!("{out}");
        return Err(Failure::refusal(format!(
            "level {m} exceeds the vertex limit"
        )));
    }
    Ok(out)
}

fn fit_cmd(cli: &Cli) -> Outcome {
    let (exponents, p) = match &cli.exponents {
        Some(e) => (e.clone(), prime(cli)?),
        None => {
            let spec = tower_spec(cli)?;
            let report = analyze_tower(&spec)?;
            if let Some(m) = report.first_disconnected_level {
                return Err(Failure::refusal(format!("level {m} is disconnected")));
            }
            if let Some(m) = report.truncated_at_level {
                return Err(Failure::refusal(format!(
                    "level {m} exceeds the vertex limit"
                )));
            }
            (report.exponents(), spec.prime())
        }
    };
    let fit = fit_invariants(&exponents, p)?;
    match cli.format.unwrap_or(Format::Json) {
        Format::Json => Ok(format!(
            "{}\n",
            serde_json::to_string(&fit).expect("serializable")
        )),
        Format::Text => Ok(format!(
            "μ={} λ={} ν={} m0={} ({} levels verified)\n",
            fit.mu, fit.lambda, fit.nu, fit.m0, fit.verified_levels
        )),
        Format::Csv => Ok(format!(
            "mu,lambda,nu,m0,verified_levels\n{},{},{},{},{}\n",
            fit.mu, fit.lambda, fit.nu, fit.m0, fit.verified_levels
        )),
    }
}

fn theta_cmd(cli: &Cli) -> Outcome {
    let va = load_voltages(cli)?;
    let sr = stickelberger_with(&va, cli.levels, Default::default());
    match cli.format.unwrap_or(Format::Json) {
        Format::Json => Ok(json(&sr)),
        Format::Text => {
            let v = sr
                .content_valuation
                .map_or("inf".to_string(), |v| v.to_string());
            let mut s = format!(
                "Θ = {}\nv_p(content) = {v}\nverdict: {}\n",
                sr.theta, sr.verdict
            );
            for (m, t) in sr.level_reductions.iter().flatten() {
                let _ = writeln!(s, "Θ mod (x^{}^{m} - 1) = {t}", va.prime());
            }
            Ok(s)
        }
        Format::Csv => Err(Failure::input("theta supports --format json|text")),
    }
}

fn verify_cmd(cli: &Cli, n: Option<usize>) -> Outcome {
    let seeded = cli.seed_example1.as_ref().map(|s| s[0] as usize);
    let n = match (n, seeded) {
        (Some(a), Some(b)) if a != b => {
            return Err(Failure::input(format!(
                "--n {a} conflicts with --seed-example1 {b}"
            )))
        }
        (Some(n), _) | (None, Some(n)) => n,
        (None, None) => return Err(Failure::input("--n is required")),
    };
    let p = prime(cli)?;
    let verdict = verify_example1_with(n, p, levels(cli)?, cli.max_vertices, Default::default())?;
    let out = match cli.format.unwrap_or(Format::Text) {
        Format::Json => json(&verdict),
        _ => format!("{verdict}\n"),
    };
    if verdict.pass {
        Ok(out)
    } else {
        print!("{out}");
        Err(Failure::refusal("closed form not matched"))
    }
}
