//! Batch front-end: generate environments, run embeddings, walks and
//! diagnostics, emit CSV/JSON/SVG reports.
//!
//! All randomness flows from explicit `--seed` flags; identical invocations
//! produce byte-identical outputs (timestamps are confined to the run
//! manifest written next to each output).

mod manifest;

use clap::{Args, Parser, Subcommand};
use planewalk::analysis::{
    csv_document, ks_uniform, render_svg, write_csv, CsvField, Scene, Style,
};
use planewalk::dyadic::{mass_transport_check, DyadicSystem2D, TransportRule};
use planewalk::environment::{
    atomic_write_bytes, read_env_file, write_env_file, write_json_17, ValidationOptions,
};
use planewalk::generators::{
    gen_grid, gen_long_range, gen_percolation_faces, gen_split_grid, vertex_cells,
    ConductanceLaw, GridSpec, LongRangeSpec, PercolationSpec,
};
use planewalk::geometry::{dcmp, dcmp_loc, Point, Square, TimedCurve};
use planewalk::harmonic::{
    corrector_approx, dirichlet_energy, energy_decomposition, phi0, phi_m, Embedding, FieldView,
};
use planewalk::walk::{
    estimate_sigma, exit_law_prokhorov, recurrence_resistance, return_time_stats, run_walk,
    StopRule,
};
use planewalk::{CellConfiguration, Error};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "planewalk", version, about = "Random walks on planar random environments")]
struct Cli {
    /// Worker threads for walk batches and per-square solves (results do
    /// not depend on this).
    #[arg(long, global = true, env = "PLANEWALK_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an environment file.
    Gen(GenArgs),
    /// Check the environment hypotheses; exit 1 on violations.
    Validate(ValidateArgs),
    /// Compute an embedding (centroids, glued harmonic, or corrector).
    Embed(EmbedArgs),
    /// Energy decomposition over a mass ladder.
    Energy(EnergyArgs),
    /// Simulate a walk and export its trace.
    Walk(WalkArgs),
    /// Estimate the quadratic-variation covariance.
    Sigma(SigmaArgs),
    /// Recurrence diagnostics: resistance bounds and return statistics.
    Recurrence(RecurrenceArgs),
    /// Compare walk exit laws against diffusion harmonic measure.
    ExitLaw(ExitLawArgs),
    /// Mass-transport balance check.
    TransportCheck(TransportArgs),
    /// Compare two timed curves modulo parameterization.
    Dcmp(DcmpArgs),
    /// Bundle: validate, moments, a small covariance run, and an SVG.
    Report(ReportArgs),
}

#[derive(Args)]
struct GenArgs {
    /// grid | split-grid | percolation | long-range
    #[arg(long)]
    variant: String,
    /// Cells per side (grid, percolation, long-range).
    #[arg(long, default_value_t = 16)]
    n: u32,
    /// Split-grid refinement level.
    #[arg(long, default_value_t = 3)]
    k: u32,
    /// Conductance law: `const:<c>` or `uniform:<lo>:<hi>`.
    #[arg(long, default_value = "const:1")]
    law: String,
    /// Bond percolation open probability.
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    /// Long-range interaction radius.
    #[arg(long, default_value_t = 1)]
    range: u32,
    /// Apply a uniform unit shift (grid).
    #[arg(long)]
    shift: bool,
    /// Replace the face configuration by its vertex cells (grid only).
    #[arg(long)]
    vertex_cells: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    env: PathBuf,
    /// Probe this many horizontal and vertical lines for the
    /// connectedness-along-lines check.
    #[arg(long, default_value_t = 0)]
    lines: u32,
    /// Skip the pairwise interior-overlap scan.
    #[arg(long)]
    skip_overlap: bool,
}

#[derive(Args)]
struct EmbedArgs {
    #[arg(long)]
    env: PathBuf,
    /// phi0 | phi-m | corrector
    #[arg(long, default_value = "phi0")]
    mode: String,
    /// Mass budget for phi-m / corrector tail proxy.
    #[arg(long, default_value_t = 16.0)]
    m: f64,
    /// Side of the centered solve region (defaults to 80% of the window).
    #[arg(long)]
    region_side: Option<f64>,
    #[arg(long, default_value_t = 0)]
    dyadic_seed: u64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(short, long)]
    output: PathBuf,
    /// Also render the embedded graph.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct EnergyArgs {
    #[arg(long)]
    env: PathBuf,
    #[arg(long, default_value_t = 0)]
    dyadic_seed: u64,
    /// Mass ladder, colon separated, e.g. 4:8:16:32.
    #[arg(long, default_value = "4:8:16:32")]
    ladder: String,
    #[arg(long)]
    region_side: Option<f64>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct WalkArgs {
    #[arg(long)]
    env: PathBuf,
    /// Number of jumps (exclusive with --horizon).
    #[arg(long)]
    steps: Option<usize>,
    /// Time horizon.
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Truncate on first contact with the frozen window rim.
    #[arg(long)]
    stop_on_boundary: bool,
    #[arg(short, long)]
    output: PathBuf,
    /// Also export the centroid-embedded walk as a timed curve (t,x,y),
    /// consumable by `dcmp`.
    #[arg(long)]
    curve: Option<PathBuf>,
}

#[derive(Args)]
struct SigmaArgs {
    #[arg(long)]
    env: PathBuf,
    #[arg(long, default_value_t = 1000)]
    walks: usize,
    #[arg(long, default_value_t = 250.0)]
    horizon: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// phi0 | corrector
    #[arg(long, default_value = "phi0")]
    embedding: String,
    /// Corrector mass budget (with --embedding corrector).
    #[arg(long, default_value_t = 64.0)]
    m: f64,
    #[arg(long)]
    region_side: Option<f64>,
    #[arg(long, default_value_t = 0)]
    dyadic_seed: u64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct RecurrenceArgs {
    #[arg(long)]
    env: PathBuf,
    #[arg(long, default_value_t = 5)]
    r_max: u32,
    #[arg(long, default_value_t = 0)]
    dyadic_seed: u64,
    /// Also run this many return-time excursions.
    #[arg(long, default_value_t = 0)]
    returns: usize,
    #[arg(long, default_value_t = 100_000)]
    step_cap: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct ExitLawArgs {
    #[arg(long)]
    env: PathBuf,
    /// Side of the centered square whose triple enlargement the walk exits.
    #[arg(long, default_value_t = 16.0)]
    side: f64,
    #[arg(long, default_value_t = 2000)]
    samples: usize,
    /// Diagonal of the diffusion covariance.
    #[arg(long, default_value_t = 2.0)]
    sigma_diag: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct TransportArgs {
    /// grid | split-grid (the sampled environment family).
    #[arg(long, default_value = "grid")]
    variant: String,
    #[arg(long, default_value_t = 16)]
    n: u32,
    #[arg(long, default_value_t = 4)]
    k: u32,
    /// identity | right-neighbor | upward | upward-broken
    #[arg(long, default_value = "identity")]
    rule: String,
    #[arg(long, default_value_t = 100)]
    envs: usize,
    #[arg(long, default_value_t = 100)]
    points: usize,
    #[arg(long, default_value_t = 4.0)]
    radius: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct DcmpArgs {
    /// Curve file: CSV with header t,x,y.
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    /// Integrate the exit-time-stopped comparison instead.
    #[arg(long)]
    loc: bool,
    #[arg(long, default_value_t = 8.0)]
    r_max: f64,
    #[arg(long, default_value_t = 64)]
    n_quad: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    env: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    walks: usize,
    #[arg(long, default_value_t = 50.0)]
    horizon: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidArgument(_) | Error::Format(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn dispatch(command: Command) -> planewalk::Result<ExitCode> {
    match command {
        Command::Gen(args) => cmd_gen(args),
        Command::Validate(args) => cmd_validate(args),
        Command::Embed(args) => cmd_embed(args),
        Command::Energy(args) => cmd_energy(args),
        Command::Walk(args) => cmd_walk(args),
        Command::Sigma(args) => cmd_sigma(args),
        Command::Recurrence(args) => cmd_recurrence(args),
        Command::ExitLaw(args) => cmd_exit_law(args),
        Command::TransportCheck(args) => cmd_transport(args),
        Command::Dcmp(args) => cmd_dcmp(args),
        Command::Report(args) => cmd_report(args),
    }
}

fn cmd_gen(args: GenArgs) -> planewalk::Result<ExitCode> {
    let mut config = match args.variant.as_str() {
        "grid" => gen_grid(&GridSpec {
            n: args.n,
            law: ConductanceLaw::parse(&args.law)?,
            shift: args.shift,
            seed: args.seed,
        })?,
        "split-grid" => gen_split_grid(args.k)?,
        "percolation" => {
            gen_percolation_faces(&PercolationSpec { n: args.n, p: args.p, seed: args.seed })?
        }
        "long-range" => gen_long_range(&LongRangeSpec {
            n: args.n,
            range: args.range,
            law: ConductanceLaw::parse(&args.law)?,
            seed: args.seed,
        })?,
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown variant {other}; use grid | split-grid | percolation | long-range"
            )))
        }
    };
    if args.vertex_cells {
        config = vertex_cells(&config)?;
    }
    write_env_file(&config, &args.output)?;
    manifest::write(
        &args.output,
        "gen",
        args.seed,
        &[("variant", args.variant.clone()), ("n", args.n.to_string())],
    )?;
    println!(
        "generated {} cells, {} edges -> {}",
        config.n_cells(),
        config.n_edges(),
        args.output.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(args: ValidateArgs) -> planewalk::Result<ExitCode> {
    let config = read_env_file(&args.env)?;
    let window = config.window();
    let mut opts = ValidationOptions {
        skip_overlap: args.skip_overlap,
        ..Default::default()
    };
    for i in 0..args.lines {
        let f = (i as f64 + 0.5) / args.lines as f64;
        let y = window.anchor.y + f * window.side;
        let x = window.anchor.x + f * window.side;
        opts.probe_segments.push((
            Point::new(window.anchor.x, y),
            Point::new(window.anchor.x + window.side, y),
        ));
        opts.probe_segments.push((
            Point::new(x, window.anchor.y),
            Point::new(x, window.anchor.y + window.side),
        ));
    }
    let report = config.validate(&opts);
    for v in &report.violations {
        println!("violation: {v}");
    }
    println!(
        "checked {} cell pairs, {} probe segments: {}",
        report.pairs_checked,
        report.segments_checked,
        if report.is_clean() { "clean" } else { "violations found" }
    );
    Ok(if report.is_clean() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

#[derive(Serialize)]
struct EmbeddingFile {
    label: String,
    residual: f64,
    values: Vec<[f64; 2]>,
}

fn default_region(config: &CellConfiguration, side: Option<f64>) -> planewalk::Result<Square> {
    let window = config.window();
    Square::centered(window.center(), side.unwrap_or(0.8 * window.side))
}

fn compute_embedding(
    config: &CellConfiguration,
    mode: &str,
    m: f64,
    region_side: Option<f64>,
    dyadic_seed: u64,
    tol: f64,
) -> planewalk::Result<Embedding> {
    match mode {
        "phi0" => Ok(phi0(config)),
        "phi-m" => {
            let d = DyadicSystem2D::sample_uniform(dyadic_seed);
            let region = default_region(config, region_side)?;
            Ok(phi_m(config, &d, m, &region, tol)?.0)
        }
        "corrector" => {
            let d = DyadicSystem2D::sample_uniform(dyadic_seed);
            let region = default_region(config, region_side)?;
            Ok(corrector_approx(config, &d, &region, m, tol)?.0)
        }
        other => Err(Error::InvalidArgument(format!(
            "unknown embedding mode {other}; use phi0 | phi-m | corrector"
        ))),
    }
}

fn cmd_embed(args: EmbedArgs) -> planewalk::Result<ExitCode> {
    let config = read_env_file(&args.env)?;
    let emb = compute_embedding(
        &config,
        &args.mode,
        args.m,
        args.region_side,
        args.dyadic_seed,
        args.tol,
    )?;
    let file = EmbeddingFile {
        label: emb.label.to_string(),
        residual: emb.residual,
        values: emb.values().iter().map(|p| [p.x, p.y]).collect(),
    };
    write_json_17(&args.output, &file)?;
    if let Some(svg_path) = &args.svg {
        let mut scene = Scene::new();
        scene.add_embedding(&config, &emb, &Style::default());
        atomic_write_bytes(svg_path, render_svg(&scene).as_bytes())?;
    }
    manifest::write(
        &args.output,
        "embed",
        args.dyadic_seed,
        &[("mode", args.mode.clone()), ("m", args.m.to_string())],
    )?;
    println!("embedding {} residual {:.3e} -> {}", file.label, file.residual, args.output.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_energy(args: EnergyArgs) -> planewalk::Result<ExitCode> {
    let config = read_env_file(&args.env)?;
    let ladder: Vec<f64> = args
        .ladder
        .split(':')
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("bad ladder entry {s}")))
        })
        .collect::<planewalk::Result<_>>()?;
    let d = DyadicSystem2D::sample_uniform(args.dyadic_seed);
    let region = default_region(&config, args.region_side)?;
    let report = energy_decomposition(&config, &d, &region, &ladder, args.tol)?;
    let mut rows = Vec::new();
    for (j, (&m, &e)) in ladder.iter().zip(&report.increment_energies).enumerate() {
        rows.push(vec![
            CsvField::Int(j as i64 + 1),
            CsvField::Real(m),
            CsvField::Real(e),
        ]);
    }
    rows.push(vec![
        CsvField::Text("sum".into()),
        CsvField::Real(*ladder.last().unwrap()),
        CsvField::Real(report.increments_sum),
    ]);
    rows.push(vec![
        CsvField::Text("direct".into()),
        CsvField::Real(*ladder.last().unwrap()),
        CsvField::Real(report.direct),
    ]);
    rows.push(vec![
        CsvField::Text("rel_gap".into()),
        CsvField::Real(0.0),
        CsvField::Real(report.rel_gap),
    ]);
    rows.push(vec![
        CsvField::Text("max_orthogonality".into()),
        CsvField::Real(0.0),
        CsvField::Real(report.max_orthogonality_ratio),
    ]);
    write_csv(&args.output, &["step", "mass", "energy"], &rows)?;
    manifest::write(&args.output, "energy", args.dyadic_seed, &[("ladder", args.ladder.clone())])?;
    println!(
        "decomposition over {} cells: gap {:.3e}, orthogonality {:.3e}",
        report.domain_cells, report.rel_gap, report.max_orthogonality_ratio
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_walk(args: WalkArgs) -> planewalk::Result<ExitCode> {
    let config = read_env_file(&args.env)?;
    let rule = match (args.steps, args.horizon) {
        (Some(n), None) => StopRule::Steps(n),
        (None, Some(t)) => StopRule::Horizon(t),
        _ => {
            return Err(Error::InvalidArgument(
                "exactly one of --steps and --horizon is required".into(),
            ))
        }
    };
    let start = config.center_cell();
    let trace = run_walk(&config, start, rule, args.seed, args.stop_on_boundary)?;
    let rows: Vec<Vec<CsvField>> = trace
        .cells()
        .iter()
        .zip(trace.jump_times())
        .enumerate()
        .map(|(j, (&cell, &tau))| {
            vec![
                CsvField::Int(j as i64),
                CsvField::Int(cell.0 as i64),
                CsvField::Real(tau),
            ]
        })
        .collect();
    write_csv(&args.output, &["jump", "cell", "tau"], &rows)?;
    if let Some(curve_path) = &args.curve {
        let base = phi0(&config);
        let curve =
            planewalk::walk::embed_walk(&config, &trace, &planewalk::walk::CellPlacement::Embedded(&base))?;
        let rows: Vec<Vec<CsvField>> = curve
            .samples()
            .iter()
            .map(|&(t, p)| vec![CsvField::Real(t), CsvField::Real(p.x), CsvField::Real(p.y)])
            .collect();
        write_csv(curve_path, &["t", "x", "y"], &rows)?;
    }
    manifest::write(&args.output, "walk", args.seed, &[])?;
    println!(
        "walk of {} jumps (truncated: {}) -> {}",
        trace.len() - 1,
        trace.truncated_at_boundary,
        args.output.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_sigma(args: SigmaArgs) -> planewalk::Result<ExitCode> {
    let config = read_env_file(&args.env)?;
    let emb = compute_embedding(
        &config,
        &args.embedding,
        args.m,
        args.region_side,
        args.dyadic_seed,
        args.tol,
    )?;
    let start = config.center_cell();
    let est = estimate_sigma(&config, &emb, start, args.walks, args.horizon, args.seed)?;
    let sigma = est.sigma.unwrap_or([[f64::NAN, f64::NAN], [f64::NAN, f64::NAN]]);
    let rows = vec![vec![
        CsvField::Real(est.c_10),
        CsvField::Real(est.se_10),
        CsvField::Real(est.c_01),
        CsvField::Real(est.se_01),
        CsvField::Real(est.c_diag),
        CsvField::Real(est.se_diag),
        CsvField::Real(est.rho),
        CsvField::Real(est.rho_se),
        CsvField::Real(sigma[0][0]),
        CsvField::Real(sigma[0][1]),
        CsvField::Real(sigma[1][1]),
        CsvField::Int(est.walks_used as i64),
        CsvField::Int(est.walks_discarded as i64),
    ]];
    write_csv(
        &args.output,
        &[
            "c_10", "se_10", "c_01", "se_01", "c_diag", "se_diag", "rho", "rho_se",
            "sigma_xx", "sigma_xy", "sigma_yy", "walks_used", "walks_discarded",
        ],
        &rows,
    )?;
    manifest::write(&args.output, "sigma", args.seed, &[("walks", args.walks.to_string())])?;
    if est.boundary_warning {
        eprintln!(
            "warning: {} of {} walks hit the window rim before the horizon",
            est.walks_discarded, args.walks
        );
    }
    println!(
        "c = ({:.4}, {:.4}, {:.4}), rho = {:.4} -> {}",
        est.c_10,
        est.c_01,
        est.c_diag,
        est.rho,
        args.output.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_recurrence(args: RecurrenceArgs) -> planewalk::Result<ExitCode> {
    let config = read_env_file(&args.env)?;
    let d = DyadicSystem2D::sample_uniform(args.dyadic_seed);
    let rows_data = recurrence_resistance(&config, &d, args.r_max)?;
    let mut rows: Vec<Vec<CsvField>> = rows_data
        .iter()
        .map(|r| {
            vec![
                CsvField::Int(r.r as i64),
                CsvField::Real(r.energy),
                CsvField::Real(r.resistance_bound),
            ]
        })
        .collect();
    if args.returns > 0 {
        let rep = return_time_stats(
            &config,
            config.center_cell(),
            args.returns,
            args.step_cap,
            args.seed,
        )?;
        rows.push(vec![
            CsvField::Text("return_fraction".into()),
            CsvField::Real(rep.return_fraction),
            CsvField::Real(rep.median_return_steps.unwrap_or(0) as f64),
        ]);
    }
    write_csv(&args.output, &["r", "energy", "resistance_bound"], &rows)?;
    manifest::write(&args.output, "recurrence", args.seed, &[])?;
    println!("{} annuli -> {}", rows_data.len(), args.output.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_exit_law(args: ExitLawArgs) -> planewalk::Result<ExitCode> {
    let config = read_env_file(&args.env)?;
    let square = Square::centered(config.window().center(), args.side)?;
    let sigma = [[args.sigma_diag, 0.0], [0.0, args.sigma_diag]];
    let report = exit_law_prokhorov(
        &config,
        config.center_cell(),
        &square,
        sigma,
        args.samples,
        args.seed,
    )?;
    write_csv(
        &args.output,
        &["side", "prokhorov", "samples", "step_over_side"],
        &[vec![
            CsvField::Real(args.side),
            CsvField::Real(report.prokhorov),
            CsvField::Int(report.walk_samples as i64),
            CsvField::Real(report.step_over_side),
        ]],
    )?;
    manifest::write(&args.output, "exit-law", args.seed, &[("side", args.side.to_string())])?;
    println!("prokhorov {:.4} at side {}", report.prokhorov, args.side);
    Ok(ExitCode::SUCCESS)
}

fn cmd_transport(args: TransportArgs) -> planewalk::Result<ExitCode> {
    let rule = match args.rule.as_str() {
        "identity" => TransportRule::identity(args.radius),
        "right-neighbor" => TransportRule::to_right_neighbor(args.radius),
        "upward" => TransportRule::upward_covariant(args.radius),
        "upward-broken" => TransportRule::upward_broken(args.radius),
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown rule {other}; use identity | right-neighbor | upward | upward-broken"
            )))
        }
    };
    let n = args.n;
    let k = args.k;
    let sampler: Box<dyn Fn(u64) -> CellConfiguration + Sync> = match args.variant.as_str() {
        "grid" => Box::new(move |seed| {
            gen_grid(&GridSpec {
                n,
                law: ConductanceLaw::Constant(1.0),
                shift: true,
                seed,
            })
            .expect("grid sampler")
        }),
        "split-grid" => Box::new(move |_| gen_split_grid(k).expect("split-grid sampler")),
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown variant {other}; use grid | split-grid"
            )))
        }
    };
    let report = mass_transport_check(&*sampler, &rule, args.envs, args.points, args.radius, args.seed);
    write_csv(
        &args.output,
        &[
            "rule", "outflow", "outflow_se", "inflow", "inflow_se", "diff", "diff_se", "z",
            "samples",
        ],
        &[vec![
            CsvField::Text(rule.name.into()),
            CsvField::Real(report.outflow_mean),
            CsvField::Real(report.outflow_se),
            CsvField::Real(report.inflow_mean),
            CsvField::Real(report.inflow_se),
            CsvField::Real(report.diff_mean),
            CsvField::Real(report.diff_se),
            CsvField::Real(report.z_score),
            CsvField::Int(report.samples as i64),
        ]],
    )?;
    manifest::write(&args.output, "transport-check", args.seed, &[("rule", args.rule.clone())])?;
    if report.support_warning {
        eprintln!("warning: rule support reaches the integration radius");
    }
    println!("z = {:.3} over {} samples", report.z_score, report.samples);
    Ok(ExitCode::SUCCESS)
}

fn read_curve(path: &Path) -> planewalk::Result<TimedCurve> {
    let text = std::fs::read_to_string(path)?;
    let mut samples = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            continue; // header
        }
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::Format(format!("curve line {i}: expected t,x,y")));
        }
        let t: f64 = parts[0]
            .trim()
            .parse()
            .map_err(|_| Error::Format(format!("curve line {i}: bad t")))?;
        let x: f64 = parts[1]
            .trim()
            .parse()
            .map_err(|_| Error::Format(format!("curve line {i}: bad x")))?;
        let y: f64 = parts[2]
            .trim()
            .parse()
            .map_err(|_| Error::Format(format!("curve line {i}: bad y")))?;
        samples.push((t, Point::new(x, y)));
    }
    TimedCurve::new(samples)
}

fn cmd_dcmp(args: DcmpArgs) -> planewalk::Result<ExitCode> {
    let a = read_curve(&args.a)?;
    let b = read_curve(&args.b)?;
    let (value, tail) = if args.loc {
        let r = dcmp_loc(&a, &b, args.r_max, args.n_quad)?;
        (r.value, r.tail_bound)
    } else {
        (dcmp(&a, &b), 0.0)
    };
    if let Some(out) = &args.output {
        write_csv(
            out,
            &["value", "tail_bound"],
            &[vec![CsvField::Real(value), CsvField::Real(tail)]],
        )?;
        manifest::write(out, "dcmp", 0, &[])?;
    }
    println!("{}", planewalk::environment::fmt_real_17(value));
    Ok(ExitCode::SUCCESS)
}

fn cmd_report(args: ReportArgs) -> planewalk::Result<ExitCode> {
    let config = read_env_file(&args.env)?;
    std::fs::create_dir_all(&args.out_dir)?;

    // validation summary
    let report = config.validate(&ValidationOptions::default());
    let window = config.window();
    let moments = config.moment_stats(&window);
    let summary_rows = vec![vec![
        CsvField::Int(config.n_cells() as i64),
        CsvField::Int(config.n_edges() as i64),
        CsvField::Int(report.violations.len() as i64),
        CsvField::Real(moments.mean_diam2_pi_over_area),
        CsvField::Real(moments.mean_diam2_pi_star_over_area),
        CsvField::Real(moments.max_diam_over_side),
    ]];
    let summary = args.out_dir.join("summary.csv");
    write_csv(
        &summary,
        &[
            "cells",
            "edges",
            "violations",
            "moment_pi",
            "moment_pi_star",
            "max_diam_over_side",
        ],
        &summary_rows,
    )?;

    // small covariance run
    let emb = phi0(&config);
    let est = estimate_sigma(
        &config,
        &emb,
        config.center_cell(),
        args.walks,
        args.horizon,
        args.seed,
    )?;
    write_csv(
        &args.out_dir.join("sigma.csv"),
        &["c_10", "c_01", "c_diag", "rho"],
        &[vec![
            CsvField::Real(est.c_10),
            CsvField::Real(est.c_01),
            CsvField::Real(est.c_diag),
            CsvField::Real(est.rho),
        ]],
    )?;

    // drawing
    let mut scene = Scene::new();
    scene.add_environment(&config, &Style::default());
    atomic_write_bytes(
        &args.out_dir.join("environment.svg"),
        render_svg(&scene).as_bytes(),
    )?;

    // dyadic law sanity line
    let ks = {
        let samples: Vec<f64> = (0..1000)
            .map(|i| {
                DyadicSystem2D::sample_uniform(args.seed.wrapping_add(i))
                    .scale_offset()
            })
            .collect();
        ks_uniform(&samples)?
    };
    let doc = csv_document(&["ks_scale_offset"], &[vec![CsvField::Real(ks)]]);
    atomic_write_bytes(&args.out_dir.join("dyadic.csv"), doc.as_bytes())?;

    manifest::write(&summary, "report", args.seed, &[])?;
    println!("report bundle -> {}", args.out_dir.display());
    Ok(ExitCode::SUCCESS)
}

// keep the energy/dirichlet symbols linked for the doc examples
#[allow(dead_code)]
fn _doc_anchor(config: &CellConfiguration) -> planewalk::Result<f64> {
    dirichlet_energy(config, FieldView::Points(phi0(config).values()), None)
}
