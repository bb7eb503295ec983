//! Subcommand implementations.

use std::io::Write;
use std::path::{Path, PathBuf};

use noma_ee::montecarlo::{linear_grid, run_experiment, ExperimentSpec, Scenario, Strategy, SweepVariable};
use noma_ee::{
    dinkelbach_maximize, generate_channel, maximize_ee, tdma_max_ee, tdma_required_power, ChannelState,
    OptimizerConfig, Problem, QosBasis, QosProfile, SystemParams, TdmaConfig,
};
use serde::Serialize;

use crate::args::{
    Command, FigureArgs, InstanceArgs, OutputFormat, PhysicalArgs, StrategyArg, SweepArgs, SweepKind, TdmaArgs,
};
use crate::error::{CliError, CliResult, EXIT_INFEASIBLE, EXIT_OK};
use crate::output::{records_to_csv, records_to_json, sidecar_path, write_file, FigureMetadata};
use crate::report::{
    AllocateReport, AllocationReport, CrossCheck, FeasibilityReport, InstanceSummary, OptimizeReport, TdmaReport,
};

pub const DEFAULT_POWER_DBM: f64 = 20.0;
pub const DEFAULT_NOISE_DBM: f64 = -70.0;
pub const DEFAULT_CIRCUIT_DBM: f64 = 30.0;
pub const DEFAULT_ALPHA: f64 = 3.0;

/// Runs one parsed command, writing reports to `stdout`. Returns the exit code
/// for runs that complete; `feasibility` exits with the infeasible code when
/// the budget is too small.
pub fn execute(command: Command, stdout: &mut dyn Write) -> CliResult<i32> {
    match command {
        Command::Feasibility(args) => feasibility(&args, stdout),
        Command::Allocate { instance, theta } => allocate(&instance, theta, stdout),
        Command::Optimize { instance, cross_check } => optimize(&instance, cross_check, stdout),
        Command::Tdma { instance, tdma } => run_tdma(&instance, &tdma, stdout),
        Command::Figure1(args) => figure("figure1", ExperimentSpec::figure1(args.seed), &args, stdout),
        Command::Figure2(args) => figure("figure2", ExperimentSpec::figure2(args.seed), &args, stdout),
        Command::Figure3(args) => figure("figure3", ExperimentSpec::figure3(args.seed), &args, stdout),
        Command::Sweep(args) => sweep(&args, stdout),
    }
}

struct Instance {
    params: SystemParams<f64>,
    channel: ChannelState<f64>,
    qos: QosProfile<f64>,
}

impl Instance {
    fn summary(&self) -> InstanceSummary {
        InstanceSummary::new(&self.params, &self.channel, self.qos.r_min())
    }
}

fn system_params(p: &PhysicalArgs) -> CliResult<SystemParams<f64>> {
    Ok(SystemParams::from_dbm(
        p.power_dbm.unwrap_or(DEFAULT_POWER_DBM),
        p.noise_dbm.unwrap_or(DEFAULT_NOISE_DBM),
        p.circuit_dbm.unwrap_or(DEFAULT_CIRCUIT_DBM),
        p.alpha.unwrap_or(DEFAULT_ALPHA),
    )?)
}

fn build_instance(args: &InstanceArgs) -> CliResult<Instance> {
    let params = system_params(&args.physical)?;
    let channel = if let Some(gains) = &args.gains {
        ChannelState::from_gains(gains.clone())?
    } else {
        let distances = match (&args.distances, args.users) {
            (Some(d), _) => d.clone(),
            (None, Some(k)) => vec![args.distance; k],
            (None, None) => return Err(CliError::Usage("give --gains, --distances or --users".into())),
        };
        generate_channel(&distances, params.pathloss_exponent, args.seed)?
    };
    let k = channel.users();
    let r_min = match args.rmin.len() {
        1 => vec![args.rmin[0]; k],
        n if n == k => args.rmin.clone(),
        n => {
            return Err(CliError::Usage(format!(
                "--rmin has {n} values for {k} users; give one value or one per user"
            )))
        }
    };
    let qos = QosProfile::new(r_min)?;
    Ok(Instance { params, channel, qos })
}

fn emit<R: Serialize + std::fmt::Display>(
    report: &R,
    format: OutputFormat,
    output: Option<&Path>,
    stdout: &mut dyn Write,
) -> CliResult<()> {
    let bytes = match format {
        OutputFormat::Text => report.to_string().into_bytes(),
        OutputFormat::Json => {
            let mut b = serde_json::to_vec_pretty(report).map_err(|e| CliError::Output(e.to_string()))?;
            b.push(b'\n');
            b
        }
        OutputFormat::Csv => {
            return Err(CliError::Usage(
                "single-instance reports support --format text or json".into(),
            ))
        }
    };
    match output {
        Some(path) => write_file(path, &bytes),
        None => stdout
            .write_all(&bytes)
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}

fn feasibility(args: &InstanceArgs, stdout: &mut dyn Write) -> CliResult<i32> {
    let inst = build_instance(args)?;
    let min = noma_ee::min_power(&inst.channel, &inst.params, &inst.qos)?;
    let feasible = noma_ee::is_feasible(&inst.params, &min);
    let report = FeasibilityReport::new(inst.summary(), &min, feasible);
    emit(&report, args.format, args.output.as_deref(), stdout)?;
    Ok(if feasible { EXIT_OK } else { EXIT_INFEASIBLE })
}

fn allocate(args: &InstanceArgs, theta: f64, stdout: &mut dyn Write) -> CliResult<i32> {
    if !(theta.is_finite() && theta <= 1.0) {
        return Err(CliError::Usage(format!("--theta must be at most 1, got {theta}")));
    }
    let inst = build_instance(args)?;
    let problem = Problem::new(inst.params, inst.channel.clone(), inst.qos.clone())?;
    problem.require_feasible()?;
    let alloc = problem.allocation(theta)?;
    let report = AllocateReport {
        instance: inst.summary(),
        theta_min: problem.theta_min(),
        allocation: AllocationReport::new(&alloc, inst.params.total_power_w),
    };
    emit(&report, args.format, args.output.as_deref(), stdout)?;
    Ok(EXIT_OK)
}

fn optimize(args: &InstanceArgs, cross_check: bool, stdout: &mut dyn Write) -> CliResult<i32> {
    let inst = build_instance(args)?;
    let problem = Problem::new(inst.params, inst.channel.clone(), inst.qos.clone())?;
    let config = OptimizerConfig::default();
    let opt = maximize_ee(&problem, &config)?;
    let cross_check = if cross_check {
        let d = dinkelbach_maximize(&problem, &config)?;
        Some(CrossCheck {
            theta_star: d.theta_star,
            ee: d.allocation.ee,
            iterations: d.iterations,
            relative_gap: (opt.allocation.ee - d.allocation.ee).abs() / d.allocation.ee.abs(),
        })
    } else {
        None
    };
    let report = OptimizeReport {
        instance: inst.summary(),
        theta_min: problem.theta_min(),
        theta_star: opt.theta_star,
        boundary: opt.boundary.as_str().to_string(),
        iterations: opt.iterations,
        allocation: AllocationReport::new(&opt.allocation, inst.params.total_power_w),
        cross_check,
    };
    emit(&report, args.format, args.output.as_deref(), stdout)?;
    Ok(EXIT_OK)
}

fn tdma_config(args: &TdmaArgs) -> TdmaConfig {
    let mut cfg = TdmaConfig::default();
    if let Some(n) = args.grid_points {
        cfg.grid_points = n;
    }
    if let Some(q) = args.tdma_qos {
        cfg.qos_basis = q.into();
    }
    cfg
}

fn basis_name(b: QosBasis) -> &'static str {
    match b {
        QosBasis::PerSlot => "per-slot",
        QosBasis::TimeAveraged => "time-averaged",
    }
}

fn run_tdma(args: &InstanceArgs, tdma: &TdmaArgs, stdout: &mut dyn Write) -> CliResult<i32> {
    let inst = build_instance(args)?;
    let cfg = tdma_config(tdma);
    let required = tdma_required_power(&inst.channel, &inst.params, &inst.qos, cfg.qos_basis)?;
    let result = tdma_max_ee(&inst.channel, &inst.params, &inst.qos, &cfg)?;
    let report = TdmaReport::new(inst.summary(), basis_name(cfg.qos_basis), required, &result);
    emit(&report, args.format, args.output.as_deref(), stdout)?;
    Ok(if result.feasible { EXIT_OK } else { EXIT_INFEASIBLE })
}

/// Parses `start:stop:step` or a comma-separated list.
pub fn parse_grid(text: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::Usage(format!("cannot parse grid {text:?}; use start:stop:step or a,b,c"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    let parts: Vec<&str> = text.split(':').collect();
    let values = match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if !(start.is_finite() && stop.is_finite() && step.is_finite() && step > 0.0 && stop >= start) {
                return Err(bad());
            }
            if (stop - start) / step > 1e6 {
                return Err(CliError::Usage(format!("grid {text:?} has too many points")));
            }
            linear_grid(start, stop, step)
        }
        [list] => list.split(',').map(num).collect::<CliResult<Vec<f64>>>()?,
        _ => return Err(bad()),
    };
    if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
        return Err(bad());
    }
    Ok(values)
}

fn apply_overrides(spec: &mut ExperimentSpec, args: &FigureArgs) -> CliResult<()> {
    let p = &args.physical;
    if let Some(v) = p.power_dbm {
        spec.total_power_dbm = v;
    }
    if let Some(v) = p.noise_dbm {
        spec.noise_dbm = v;
    }
    if let Some(v) = p.circuit_dbm {
        spec.circuit_dbm = v;
    }
    if let Some(v) = p.alpha {
        spec.pathloss_exponent = v;
    }
    if let Some(v) = args.rmin {
        spec.r_min = v;
    }
    if let Some(n) = args.trials {
        spec.trials = n;
    }
    if let Some(g) = &args.grid {
        spec.sweep_values = parse_grid(g)?;
    }
    spec.tdma = tdma_config(&args.tdma);
    Ok(())
}

fn figure(command: &str, mut spec: ExperimentSpec, args: &FigureArgs, stdout: &mut dyn Write) -> CliResult<i32> {
    apply_overrides(&mut spec, args)?;
    spec.validate()?;
    let (ext, format) = match args.format {
        OutputFormat::Csv => ("csv", "csv"),
        OutputFormat::Json => ("json", "json"),
        OutputFormat::Text => return Err(CliError::Usage("figure output supports --format csv or json".into())),
    };
    let output = args
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{command}.{ext}")));
    let records = run_experiment(&spec)?;
    let bytes = match args.format {
        OutputFormat::Json => records_to_json(&records)?,
        _ => records_to_csv(&records)?,
    };
    write_file(&output, &bytes)?;
    let meta = FigureMetadata::new(command, &output, format, spec);
    let mut meta_bytes = serde_json::to_vec_pretty(&meta).map_err(|e| CliError::Output(e.to_string()))?;
    meta_bytes.push(b'\n');
    let meta_path = sidecar_path(&output);
    write_file(&meta_path, &meta_bytes)?;
    writeln!(
        stdout,
        "wrote {} rows to {} (metadata {})",
        records.len(),
        output.display(),
        meta_path.display()
    )
    .map_err(|e| CliError::io("<stdout>", e))?;
    Ok(EXIT_OK)
}

fn parse_distances(text: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("cannot parse distances {text:?}")))
        })
        .collect()
}

fn sweep(args: &SweepArgs, stdout: &mut dyn Write) -> CliResult<i32> {
    let mut scenarios: Vec<Scenario> = args
        .users
        .iter()
        .map(|&k| Scenario::equidistant(k, args.distance))
        .collect();
    for d in &args.distances {
        let distances = parse_distances(d)?;
        let label = format!("d={}", d.replace(',', "/"));
        scenarios.push(Scenario::new(label, distances));
    }
    if scenarios.is_empty() {
        return Err(CliError::Usage("sweep needs --users or --distances".into()));
    }
    if args.figure.grid.is_none() {
        return Err(CliError::Usage("sweep needs --grid".into()));
    }
    let mut strategies: Vec<Strategy> = args
        .strategies
        .iter()
        .map(|s| match s {
            StrategyArg::Eepa => Strategy::Eepa,
            StrategyArg::Maxse => Strategy::MaxSe,
            StrategyArg::Tdma => Strategy::Tdma,
        })
        .collect();
    strategies.dedup();
    let mut spec = ExperimentSpec::figure1(args.figure.seed);
    spec.name = "sweep".into();
    spec.sweep_variable = match args.sweep {
        SweepKind::Power => SweepVariable::TotalPowerDbm,
        SweepKind::Rmin => SweepVariable::RMin,
    };
    spec.scenarios = scenarios;
    spec.strategies = strategies;
    figure("sweep", spec, &args.figure, stdout)
}

