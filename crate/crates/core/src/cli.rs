//! Command-line front end: network-file ingestion, analysis, simulation,
//! boundary sweeps, scaling tables, and passifiability reports.
//!
//! Exit codes: 0 success, 1 usage/parse error, 2 assumption violation
//! (A1/A2), 3 numerical failure.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::digraph;
use crate::error::{Error, Result};
use crate::gains;
use crate::netfile::NetworkFile;
use crate::passify::{self, AgentModel};
use crate::presets;
use crate::region;
use crate::sim::{self, NetworkSpec};
use crate::svg;

#[derive(Parser)]
#[command(
    name = "passinet",
    version,
    about = "Consensus analysis and simulation for passifiable SIMO agent networks on weighted digraphs"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spectrum report, passifiability verdict, and gain thresholds
    Analyze(AnalyzeArgs),
    /// Integrate the closed loop and write trace CSV / SVG plots
    Simulate(SimulateArgs),
    /// Sweep the sufficient gain-region boundary
    Region(RegionArgs),
    /// Table of cycle thresholds against the quadratic asymptote
    Scaling(ScalingArgs),
    /// Transfer function, hyper-minimum-phase test, and kappa0 of the agent
    Passify(PassifyArgs),
}

#[derive(Args, Clone)]
struct InputArgs {
    /// Network file (JSON); see the README for the schema
    file: Option<PathBuf>,
    /// Built-in preset: three_node, cycle, or dodeca
    #[arg(long, conflicts_with = "file")]
    preset: Option<String>,
    /// Vertex count for --preset cycle
    #[arg(long)]
    n: Option<usize>,
    /// Gain case for --preset three_node: 1 identical, 2 nonidentical
    #[arg(long)]
    case: Option<u8>,
    /// Leading-ring gain for --preset dodeca (default 5.5)
    #[arg(long)]
    nu: Option<f64>,
    /// Outer-ring gain for --preset dodeca (default 1.0)
    #[arg(long)]
    mu: Option<f64>,
    /// Identical gain to use when the file has no gains block
    #[arg(long)]
    k: Option<f64>,
}

impl InputArgs {
    fn network_file(&self) -> Result<NetworkFile> {
        match (&self.file, &self.preset) {
            (Some(path), None) => NetworkFile::load(path),
            (None, Some(name)) => presets::by_name(name, self.n, self.case, self.nu, self.mu),
            (None, None) => Err(Error::InvalidInput(
                "provide a network file or --preset NAME".into(),
            )),
            (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
        }
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Always run the bisection threshold search (otherwise only for the
    /// built-in double-integrator agent)
    #[arg(long)]
    exact: bool,
    /// Machine-readable JSON report
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Simulation horizon in seconds (overrides the file)
    #[arg(long)]
    t_end: Option<f64>,
    /// Integration step in seconds (overrides the file)
    #[arg(long)]
    dt: Option<f64>,
    /// Convergence tolerance on e(t_end) (overrides the file)
    #[arg(long)]
    tol: Option<f64>,
    /// Trace CSV path
    #[arg(long)]
    out: Option<PathBuf>,
    /// SVG with the disagreement curve(s)
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Phase-plane SVG (agents with two states only)
    #[arg(long)]
    phase_svg: Option<PathBuf>,
    /// Keep every D-th integration step in the CSV
    #[arg(long, default_value_t = 10)]
    decimate: usize,
}

#[derive(Args)]
struct RegionArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Sphere clipping margin
    #[arg(long, default_value_t = 0.05)]
    eps: f64,
    /// Samples per angular dimension (defaults depend on dimension)
    #[arg(long)]
    samples: Option<usize>,
    /// Boundary CSV path
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScalingArgs {
    /// Largest cycle size in the table
    #[arg(long, default_value_t = 200)]
    n_max: usize,
    /// CSV path (defaults to stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PassifyArgs {
    #[command(flatten)]
    input: InputArgs,
}

/// Parse arguments, dispatch, and map errors onto the exit-code convention.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    let seed = std::env::var("PASSINET_SEED")
        .ok()
        .and_then(|s| s.parse::<u64>().ok())
        .unwrap_or(42);
    let outcome = match cli.command {
        Command::Analyze(args) => cmd_analyze(&args),
        Command::Simulate(args) => cmd_simulate(&args, seed),
        Command::Region(args) => cmd_region(&args),
        Command::Scaling(args) => cmd_scaling(&args),
        Command::Passify(args) => cmd_passify(&args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn fmt_complex(z: num_complex::Complex64) -> String {
    format!("{:.9}{:+.9}i", z.re, z.im)
}

fn is_double_integrator(agent: &AgentModel) -> bool {
    *agent == AgentModel::double_integrator()
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<i32> {
    let file = args.input.network_file()?;
    let agent = file.agent_model()?;
    let graph = file.digraph()?;
    if let Some(gains) = &file.gains {
        graph.validate_gains(gains)?;
    }

    let spectrum = digraph::spectrum_report(&graph, None)?;
    let pass = passify::passify_report(&agent)?;
    let a2 = spectrum.has_spanning_tree;
    let a1 = pass.is_hmp;

    let sufficient = if a1 && a2 {
        Some(gains::sufficient_gain_identical(&agent, &graph)?)
    } else {
        None
    };
    // sufficient threshold along the file's gain direction, if one is given
    let sufficient_direction = match (&file.gains, a1 && a2) {
        (Some(g), true) => {
            let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            let k_prime: Vec<f64> = g.iter().map(|x| x / norm).collect();
            Some(gains::sufficient_gain_nonidentical(&agent, &graph, &k_prime)?)
        }
        _ => None,
    };
    let di = is_double_integrator(&agent);
    let theorem5 = if di && a2 {
        let tol = digraph::zero_eigenvalue_tol(&graph.laplace_matrix());
        let nonzero: Vec<_> = spectrum
            .eigenvalues
            .iter()
            .copied()
            .filter(|z| z.norm() >= tol)
            .collect();
        Some(gains::general_threshold(&nonzero)?)
    } else {
        None
    };
    let bisection = if a1 && a2 && (di || args.exact) {
        let hi = sufficient.unwrap_or(1.0).max(1e-3) * 1.5 + 0.1;
        match gains::threshold_bisection(&agent, &graph, 0.0, hi) {
            Ok(k) => Some(k),
            // consensus may hold for every positive gain (stable A)
            Err(Error::Bracket(msg)) if msg.contains("already achieved") => Some(0.0),
            Err(e) => return Err(e),
        }
    } else {
        None
    };

    if args.json {
        let report = serde_json::json!({
            "assumptions": {"a1_hyper_minimum_phase": a1, "a2_spanning_tree": a2},
            "spectrum": {
                "eigenvalues": spectrum.eigenvalues.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
                "zero_multiplicity": spectrum.zero_multiplicity,
                "r": spectrum.r,
                "has_spanning_tree": spectrum.has_spanning_tree,
                "leading_set": spectrum.leading_set,
                "v_left": spectrum.v_left,
            },
            "agent": {
                "numerator": pass.numerator.coeffs().iter().map(|c| c.re).collect::<Vec<_>>(),
                "denominator": pass.denominator.coeffs().iter().map(|c| c.re).collect::<Vec<_>>(),
                "is_hmp": pass.is_hmp,
                "kappa0": pass.kappa0,
                "kappa0_tolerance": 1e-6,
                "already_passive": pass.already_passive,
            },
            "thresholds": {
                "sufficient_identical": sufficient,
                "sufficient_along_gains": sufficient_direction,
                "exact_closed_form": theorem5,
                "exact_bisection": bisection,
            },
        });
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
    } else {
        println!("spectrum of L:");
        for z in &spectrum.eigenvalues {
            println!("  {}", fmt_complex(*z));
        }
        println!("  zero multiplicity: {}", spectrum.zero_multiplicity);
        match spectrum.r {
            Some(r) => println!("  r(L) = {r:.9}"),
            None => println!("  r(L) undefined (no nonzero eigenvalues)"),
        }
        println!(
            "topology: spanning tree: {}{}",
            if a2 { "yes" } else { "NO (A2 violated)" },
            spectrum
                .leading_set
                .as_ref()
                .map(|s| format!(", leading set {s:?}"))
                .unwrap_or_default()
        );
        if let Some(v) = &spectrum.v_left {
            let joined: Vec<String> = v.iter().map(|x| format!("{x:.9}")).collect();
            println!("  v(L) = [{}]", joined.join(", "));
        }
        println!("agent:");
        println!("  numerator:   {}", pass.numerator);
        println!("  denominator: {}", pass.denominator);
        println!(
            "  hyper-minimum-phase (A1): {}",
            if a1 { "yes" } else { "NO (A1 violated)" }
        );
        if let Some(k0) = pass.kappa0 {
            println!(
                "  kappa0 = {k0:.9} (tolerance 1e-6{})",
                if pass.already_passive {
                    ", clamped: already strictly passive"
                } else {
                    ""
                }
            );
        }
        println!("thresholds:");
        if let Some(k) = sufficient {
            println!("  sufficient identical gain: k > {k:.9}");
        }
        if let Some(k) = sufficient_direction {
            println!("  sufficient along file gains direction: k > {k:.9}");
        }
        if let Some(k) = theorem5 {
            println!("  exact closed form (double integrators): k > {k:.9}");
        }
        if let Some(k) = bisection {
            println!("  exact by bisection: k > {k:.9}");
        }
    }

    Ok(if a1 && a2 { 0 } else { 2 })
}

fn write_trace_csv(
    path: &Path,
    trace: &sim::SimTrace,
    spec: &NetworkSpec,
    decimate: usize,
) -> Result<()> {
    let n = spec.agent_count();
    let dim = spec.agent.state_dim();
    let mut out = String::new();
    out.push('t');
    for i in 1..=n {
        for d in 1..=dim {
            out.push_str(&format!(",x_{i}_{d}"));
        }
    }
    out.push_str(",e");
    if trace.c_pred.is_some() {
        for d in 1..=dim {
            out.push_str(&format!(",c_{d}"));
        }
    }
    out.push('\n');
    let step = decimate.max(1);
    let last = trace.t.len() - 1;
    for idx in (0..trace.t.len()).filter(|i| i % step == 0 || *i == last) {
        out.push_str(&format!("{}", trace.t[idx]));
        for x in &trace.states[idx] {
            out.push_str(&format!(",{x}"));
        }
        out.push_str(&format!(",{}", trace.e[idx]));
        if let Some(c) = &trace.c_pred {
            for x in &c[idx] {
                out.push_str(&format!(",{x}"));
            }
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn phase_plane_series(trace: &sim::SimTrace, spec: &NetworkSpec) -> Vec<svg::Series> {
    let n = spec.agent_count();
    (0..n)
        .map(|i| {
            let pts: Vec<(f64, f64)> = trace
                .states
                .iter()
                .map(|s| (s[2 * i], s[2 * i + 1]))
                .collect();
            svg::Series::new(format!("S_{}", i + 1), pts)
        })
        .collect()
}

fn suffixed(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    path.with_file_name(format!("{stem}{suffix}.{ext}"))
}

fn cmd_simulate(args: &SimulateArgs, seed: u64) -> Result<i32> {
    // the three-node preset without an explicit case runs both gain cases
    // and overlays their disagreement curves
    let both_cases =
        args.input.preset.as_deref() == Some("three_node") && args.input.case.is_none();
    let runs: Vec<(String, NetworkFile)> = if both_cases {
        vec![
            ("case1".into(), presets::three_node(1)?),
            ("case2".into(), presets::three_node(2)?),
        ]
    } else {
        vec![(String::new(), args.input.network_file()?)]
    };

    let mut e_curves = Vec::new();
    for (label, file) in &runs {
        let (spec, mut opts) = file.resolve(args.input.k, seed)?;
        if let Some(t_end) = args.t_end {
            opts.t_end = t_end;
        }
        if let Some(dt) = args.dt {
            opts.dt = dt;
        }
        if let Some(tol) = args.tol {
            opts.tol_conv = tol;
        }
        let trace = sim::simulate(&spec, &opts)?;
        let report = sim::convergence_report(&trace, &spec)?;
        let tag = if label.is_empty() {
            String::new()
        } else {
            format!("{label}: ")
        };
        println!(
            "{tag}converged={} e({})={:.6e}{}{}",
            trace.converged,
            opts.t_end,
            report.final_disagreement,
            report
                .final_error_to_c
                .map(|v| format!(" max|x_i-c|={v:.6e}"))
                .unwrap_or_default(),
            if report.agrees_with_exact_test {
                ""
            } else {
                " (finite-horizon verdict differs from the exact test)"
            }
        );

        if let Some(out) = &args.out {
            let path = if label.is_empty() {
                out.clone()
            } else {
                suffixed(out, &format!("_{label}"))
            };
            write_trace_csv(&path, &trace, &spec, args.decimate)?;
            println!("{tag}trace written to {}", path.display());
        }
        if let Some(phase) = &args.phase_svg {
            if spec.agent.state_dim() != 2 {
                return Err(Error::InvalidInput(
                    "phase-plane plot needs agents with exactly two states".into(),
                ));
            }
            let path = if label.is_empty() {
                phase.clone()
            } else {
                suffixed(phase, &format!("_{label}"))
            };
            let chart = svg::line_chart(
                "agent trajectories",
                "x_1",
                "x_2",
                &phase_plane_series(&trace, &spec),
            );
            std::fs::write(&path, chart)?;
            println!("{tag}phase plane written to {}", path.display());
        }
        let name = if label.is_empty() { "e(t)".into() } else { format!("e(t) {label}") };
        e_curves.push(svg::Series::new(
            name,
            trace.t.iter().copied().zip(trace.e.iter().copied()).collect(),
        ));
    }

    if let Some(path) = &args.svg {
        let chart = svg::line_chart("disagreement", "t [s]", "e(t)", &e_curves);
        std::fs::write(path, chart)?;
        println!("disagreement plot written to {}", path.display());
    }
    Ok(0)
}

fn cmd_region(args: &RegionArgs) -> Result<i32> {
    let file = args.input.network_file()?;
    let agent = file.agent_model()?;
    let graph = file.digraph()?;
    let trace = region::trace_boundary(&agent, &graph, args.eps, args.samples)?;

    if let Some(v) = trace.reduced_vertex {
        println!("leader vertex {v}: gain coordinate dropped from the sphere (emitted as 0)");
    }
    let describe = |s: &region::BoundarySample| -> String {
        let dir: Vec<String> = s.k_prime.iter().map(|x| format!("{x:.6}")).collect();
        format!("h_rho = {:.9} at k' = [{}]", s.radius, dir.join(", "))
    };
    println!("samples: {}", trace.samples.len());
    println!("min {}", describe(&trace.samples[trace.min_index]));
    println!("max {}", describe(&trace.samples[trace.max_index]));

    if let Some(path) = &args.out {
        let n = graph.n();
        let mut out = String::new();
        for i in 1..=n {
            out.push_str(&format!("k_prime_{i},"));
        }
        out.push_str("radius,");
        for i in 1..=n {
            out.push_str(&format!("point_{i},"));
        }
        out.push_str("gamma,rho\n");
        for s in &trace.samples {
            for x in &s.k_prime {
                out.push_str(&format!("{x},"));
            }
            out.push_str(&format!("{},", s.radius));
            for x in &s.point {
                out.push_str(&format!("{x},"));
            }
            match s.polar {
                Some((gamma, rho)) => out.push_str(&format!("{gamma},{rho}\n")),
                None => out.push_str(",\n"),
            }
        }
        std::fs::write(path, out)?;
        println!("boundary written to {}", path.display());
    }
    Ok(0)
}

fn cmd_scaling(args: &ScalingArgs) -> Result<i32> {
    if args.n_max < 3 {
        return Err(Error::InvalidInput("--n-max must be at least 3".into()));
    }
    let mut rows = String::from("N,threshold,asymptote,ratio\n");
    let mut table = String::new();
    table.push_str(&format!(
        "{:>5} {:>16} {:>16} {:>10}\n",
        "N", "threshold", "N^2/(2 pi^2)", "ratio"
    ));
    for n in 3..=args.n_max {
        let thr = gains::cycle_threshold(n)?;
        let asym = (n * n) as f64 / (2.0 * std::f64::consts::PI * std::f64::consts::PI);
        let ratio = thr / asym;
        rows.push_str(&format!("{n},{thr},{asym},{ratio}\n"));
        table.push_str(&format!("{n:>5} {thr:>16.8} {asym:>16.8} {ratio:>10.6}\n"));
    }
    match &args.out {
        Some(path) => {
            std::fs::write(path, rows)?;
            println!("scaling table written to {}", path.display());
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(table.as_bytes());
        }
    }
    Ok(0)
}

fn cmd_passify(args: &PassifyArgs) -> Result<i32> {
    let file = args.input.network_file()?;
    let agent = file.agent_model()?;
    let report = passify::passify_report(&agent)?;
    println!("transfer function g' C' (sI - A)^(-1) B:");
    println!("  numerator:   {}", report.numerator);
    println!("  denominator: {}", report.denominator);
    println!(
        "hyper-minimum-phase: {}",
        if report.is_hmp { "yes" } else { "no" }
    );
    match report.kappa0 {
        Some(k0) => println!(
            "kappa0 = {k0:.9} (tolerance 1e-6{})",
            if report.already_passive {
                ", clamped: already strictly passive"
            } else {
                ""
            }
        ),
        None => println!("kappa0: undefined (A1 violated)"),
    }
    Ok(0)
}
