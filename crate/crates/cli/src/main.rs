use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mafstsp_core::baselines::{
    bound_sources, hc_vns_solve, lower_bound, nearest_neighbor_solution, LowerBoundMode, VnsConfig,
};
use mafstsp_core::bench::{bench, BenchConfig, BenchMethod};
use mafstsp_core::eval::validate_solution;
use mafstsp_core::export::export_geojson;
use mafstsp_core::fullmilp::{build_full_milp, FullModelConfig};
use mafstsp_core::milp::export_lp;
use mafstsp_core::partition::{partition, PartitionMethod};
use mafstsp_core::pipeline::{pipeline_sources, solve, RunConfig};
use mafstsp_core::roadnet::{generate_instance, load_instance, road_distances, save_instance, GenSpec};
use mafstsp_core::settsp::{build_set_system, build_set_tsp_milp, Backend, SetCosts, SetMode};
use mafstsp_core::{Error, Instance, Solution};

const EXIT_FINDINGS: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BACKEND: u8 = 3;

#[derive(Parser)]
#[command(name = "mafstsp", version, about = "Truck-and-drone delivery routing on road networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance.
    Gen(GenArgs),
    /// Solve an instance with the three-phase pipeline.
    Solve(SolveArgs),
    /// Check a solution against an instance.
    Validate { instance: PathBuf, solution: PathBuf },
    /// Solve with a reference method.
    Baseline(BaselineArgs),
    /// Lower bound on the optimal cost.
    Bound {
        instance: PathBuf,
        #[arg(long, default_value = "relaxed")]
        mode: LowerBoundMode,
    },
    /// Run methods over a directory of instances and write CSV.
    Bench(BenchArgs),
    /// Write a MILP model in LP format.
    ExportMilp(ExportMilpArgs),
    /// Write routes as GeoJSON.
    ExportGeojson {
        instance: PathBuf,
        solution: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Args)]
struct GenArgs {
    /// Grid size as ROWSxCOLS.
    #[arg(long, conflicts_with = "random")]
    grid: Option<String>,
    /// Random geometric network with this many vertices.
    #[arg(long)]
    random: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    block_km: f64,
    #[arg(long, default_value_t = 3.0)]
    side_km: f64,
    #[arg(long, default_value_t = 0.3)]
    link_km: f64,
    #[arg(long, default_value_t = 1)]
    depots: usize,
    #[arg(long, default_value_t = 10)]
    customers: usize,
    #[arg(long)]
    truck_speed: Option<f64>,
    #[arg(long)]
    drone_speed: Option<f64>,
    #[arg(long)]
    range: Option<f64>,
    #[arg(long)]
    drones: Option<usize>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct RunFlags {
    /// JSON run configuration; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    partition: Option<PartitionMethod>,
    #[arg(long)]
    theta: Option<f64>,
    /// auto, exact_dp, greedy_ls or external_milp:<command>.
    #[arg(long)]
    backend: Option<Backend>,
    #[arg(long)]
    mode: Option<SetMode>,
    #[arg(long)]
    budget: Option<f64>,
    #[arg(long)]
    drones: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
}

impl RunFlags {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
            }
            None => RunConfig::default(),
        };
        if let Some(v) = self.partition {
            cfg.partition = v;
        }
        if self.theta.is_some() {
            cfg.theta_km = self.theta;
        }
        if let Some(v) = &self.backend {
            cfg.backend = v.clone();
        }
        if let Some(v) = self.mode {
            cfg.mode = v;
        }
        if let Some(v) = self.budget {
            cfg.budget_s = v;
        }
        if self.drones.is_some() {
            cfg.drones = self.drones;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if self.threads.is_some() {
            cfg.threads = self.threads;
        }
        Ok(cfg.with_env_solver())
    }
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[command(flatten)]
    run: RunFlags,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Where to write per-phase timings and backend choices.
    #[arg(long)]
    metrics: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BaselineMethod {
    HcVns,
    TruckOnly,
}

#[derive(Args)]
struct BaselineArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "hc-vns")]
    method: BaselineMethod,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = VnsConfig::default().max_iterations)]
    max_iterations: usize,
    #[arg(long, default_value_t = VnsConfig::default().no_improve_patience)]
    patience: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    suite: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "pipeline")]
    methods: Vec<BenchMethod>,
    #[arg(long, value_delimiter = ',')]
    sweep_drones: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    sweep_drone_speed: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    sweep_range: Vec<f64>,
    /// Also compute a lower bound and the gap to it.
    #[arg(long)]
    bound: Option<LowerBoundMode>,
    #[command(flatten)]
    run: RunFlags,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelKind {
    /// Whole problem over time-indexed truck positions.
    Full,
    /// Set tour of one depot's group after partitioning.
    SetTour,
}

#[derive(Args)]
struct ExportMilpArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "full")]
    model: ModelKind,
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long)]
    big_m: Option<f64>,
    /// Depot whose group the set-tour model covers; defaults to the first.
    #[arg(long)]
    depot: Option<usize>,
    #[command(flatten)]
    run: RunFlags,
    #[arg(short, long)]
    output: PathBuf,
}

fn load(path: &Path) -> Result<Instance> {
    load_instance(path).with_context(|| format!("loading instance {}", path.display()))
}

fn write_solution(sol: &Solution, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => Ok(sol.save(path)?),
        None => {
            println!("{}", sol.to_json());
            Ok(())
        }
    }
}

fn gen(args: GenArgs) -> Result<()> {
    let mut spec = match (&args.grid, args.random) {
        (Some(g), None) => {
            let (r, c) = g.split_once(['x', 'X']).context("--grid expects ROWSxCOLS")?;
            GenSpec::grid(r.parse()?, c.parse()?, args.block_km, args.depots, args.customers)
        }
        (None, Some(n)) => GenSpec::random_geometric(n, args.side_km, args.link_km, args.depots, args.customers),
        _ => bail!("pass exactly one of --grid or --random"),
    };
    if let Some(v) = args.truck_speed {
        spec.truck_speed_kmh = v;
    }
    if let Some(v) = args.drone_speed {
        spec.drone_speed_kmh = v;
    }
    if let Some(v) = args.range {
        spec.drone_range_km = v;
    }
    if let Some(v) = args.drones {
        spec.drones_per_truck = v;
    }
    spec.theta_partition_km = args.theta;
    let inst: Instance = generate_instance(&spec, args.seed)?;
    save_instance(&inst, &args.output)?;
    Ok(())
}

fn run_solve(args: SolveArgs) -> Result<()> {
    let inst = load(&args.instance)?;
    let mut cfg = args.run.resolve()?;
    cfg.output = args.output.or(cfg.output);
    cfg.metrics_output = args.metrics.or(cfg.metrics_output);
    let (sol, metrics) = solve(&inst, &cfg)?;
    write_solution(&sol, cfg.output.as_deref())?;
    if let Some(path) = &cfg.metrics_output {
        fs::write(path, serde_json::to_string_pretty(&metrics)?)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    eprintln!("cost {:.6} h over {} group(s)", sol.total_cost, sol.groups.len());
    Ok(())
}

fn run_validate(instance: &Path, solution: &Path) -> Result<ExitCode> {
    let inst = load(instance)?;
    let sol = Solution::load(solution)?;
    let report = validate_solution(&inst, &sol);
    if report.is_clean() {
        println!("ok: cost {:.6} h", sol.total_cost);
        return Ok(ExitCode::SUCCESS);
    }
    for f in &report.findings {
        println!("{:?}: {}", f.code, f.message);
    }
    Ok(ExitCode::from(EXIT_FINDINGS))
}

fn run_baseline(args: BaselineArgs) -> Result<()> {
    let inst = load(&args.instance)?;
    let mut sol = match args.method {
        BaselineMethod::HcVns => {
            let cfg = VnsConfig {
                max_iterations: args.max_iterations,
                no_improve_patience: args.patience,
                seed: args.seed,
                ..VnsConfig::default()
            };
            hc_vns_solve(&inst, &cfg)?
        }
        BaselineMethod::TruckOnly => {
            let o = road_distances(&inst, inst.depots.iter().chain(&inst.customers).copied())?;
            nearest_neighbor_solution(&inst, &o)?
        }
    };
    let name = match args.method {
        BaselineMethod::HcVns => "hc_vns",
        BaselineMethod::TruckOnly => "truck_only",
    };
    sol.meta.insert("method".into(), name.into());
    let report = validate_solution(&inst, &sol);
    if !report.is_clean() {
        return Err(Error::Validation(report.messages()).into());
    }
    write_solution(&sol, args.output.as_deref())
}

fn run_bound(instance: &Path, mode: LowerBoundMode) -> Result<()> {
    let inst = load(instance)?;
    let o = road_distances(&inst, bound_sources(&inst))?;
    println!("{:.9}", lower_bound(&inst, &o, mode)?);
    Ok(())
}

fn run_bench(args: BenchArgs) -> Result<()> {
    let cfg = BenchConfig {
        methods: args.methods,
        drones: args.sweep_drones,
        drone_speeds_kmh: args.sweep_drone_speed,
        ranges_km: args.sweep_range,
        lower_bound: args.bound,
        run: args.run.resolve()?,
        vns: VnsConfig::default(),
    };
    let report = bench(&args.suite, &cfg)?;
    match &args.output {
        Some(path) => {
            let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            report.write_csv(file)?;
        }
        None => report.write_csv(std::io::stdout().lock())?,
    }
    for (name, err) in &report.failures {
        eprintln!("failed: {name}: {err}");
    }
    Ok(())
}

fn run_export_milp(args: ExportMilpArgs) -> Result<()> {
    let inst = load(&args.instance)?;
    let model = match args.model {
        ModelKind::Full => {
            let o = road_distances(&inst, 0..inst.network.len())?;
            let mut cfg = FullModelConfig::for_instance(&inst, &o)?;
            if let Some(t) = args.horizon {
                cfg.horizon = t;
            }
            if let Some(m) = args.big_m {
                cfg.big_m = m;
            }
            build_full_milp(&inst, &o, &cfg)?
        }
        ModelKind::SetTour => {
            let run = args.run.resolve()?;
            let o = road_distances(&inst, pipeline_sources(&inst, &run))?;
            let theta = run.theta_km.unwrap_or_else(|| inst.partition_theta());
            let assignment = partition(&inst, &o, run.partition, theta)?;
            let depot = args.depot.or_else(|| inst.depots.first().copied()).context("instance has no depots")?;
            if !inst.depots.contains(&depot) {
                bail!("vertex {depot} is not a depot");
            }
            let system = build_set_system(&inst, depot, assignment.group(depot), inst.drone_range, run.mode);
            build_set_tsp_milp(&SetCosts::new(&inst, &o, &system)).0
        }
    };
    export_lp(&model, &args.output)?;
    eprintln!("{} variables, {} constraints", model.vars().len(), model.constraints().len());
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gen(args) => gen(args)?,
        Command::Solve(args) => run_solve(args)?,
        Command::Validate { instance, solution } => return run_validate(&instance, &solution),
        Command::Baseline(args) => run_baseline(args)?,
        Command::Bound { instance, mode } => run_bound(&instance, mode)?,
        Command::Bench(args) => run_bench(args)?,
        Command::ExportMilp(args) => run_export_milp(args)?,
        Command::ExportGeojson { instance, solution, output } => {
            let inst = load(&instance)?;
            let sol = Solution::load(&solution)?;
            export_geojson(&inst, &sol, &output)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let mut core = err.chain().find_map(|e| e.downcast_ref::<Error>());
    while let Some(Error::Phase { source, .. }) = core {
        core = Some(source);
    }
    match core {
        Some(Error::Validation(_)) => EXIT_FINDINGS,
        Some(Error::Backend { .. } | Error::InvalidSolverOutput(_)) => EXIT_BACKEND,
        _ => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            if let Some(Error::Validation(msgs)) = err.chain().find_map(|e| e.downcast_ref::<Error>()) {
                for m in msgs {
                    eprintln!("  {m}");
                }
            }
            ExitCode::from(exit_code(&err))
        }
    }
}
