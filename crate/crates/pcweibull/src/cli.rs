//! Command-line surface: prior evaluation and sampling, distance
//! conversions, table reproduction, data simulation, fitting, and the
//! theta sensitivity sweep. All randomized commands take --seed and are
//! bit-reproducible.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::divergence::{alpha_from_distance, distance, Branch};
use crate::error::{Error, Result};
use crate::inference::{
    fit_grid, fit_mcmc, sensitivity_sweep, AlphaPrior, Engine, FitConfig, PosteriorResult,
    PriorChoice, DEFAULT_BETA_PRIOR_SD,
};
use crate::pc_prior::{self, PcPriorSpec, TailSpec};
use crate::reference_priors::{
    distance_table, gamma_prior_on_distance_scale, pc_prior_on_distance_scale, GammaConvention,
    GammaPriorSpec,
};
use crate::weibull::{simulate, SurvivalDataset};

const OUT_DIR_ENV: &str = "PCWEIBULL_OUT_DIR";
const CONFIG_VERSION: u64 = 1;

#[derive(Parser)]
#[command(name = "pcweibull", version, about = "Penalized-complexity prior for the Weibull shape: prior evaluation, distance tables, and censored Weibull regression")]
pub struct Cli {
    /// Significant digits for printed values
    #[arg(long, global = true, default_value_t = 6)]
    pub precision: usize,
    /// JSON config file supplying flag defaults (flags on the command line win)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Evaluate, sample, or invert the PC prior
    Prior {
        #[command(subcommand)]
        action: PriorAction,
    },
    /// Convert between shape values and distances to the base model
    Distance {
        #[command(subcommand)]
        direction: DistanceDirection,
    },
    /// Reproduce the gamma-prior distance tables and the per-branch curves
    Tables(TablesArgs),
    /// Fit the censored Weibull regression (or simulate a dataset)
    Fit(FitArgs),
}

#[derive(Args, Clone)]
pub struct PriorParams {
    /// Exponential rate on the distance scale
    #[arg(long)]
    pub theta: Option<f64>,
    /// Tail bound U in P(d > U) = p (use with --tail-p)
    #[arg(long)]
    pub tail_u: Option<f64>,
    /// Tail probability p in P(d > U) = p (use with --tail-u)
    #[arg(long)]
    pub tail_p: Option<f64>,
}

impl PriorParams {
    fn resolve(&self) -> Result<PcPriorSpec> {
        match (self.theta, self.tail_u, self.tail_p) {
            (Some(theta), None, None) => PcPriorSpec::new(theta),
            (None, Some(u), Some(p)) => pc_prior::theta_from_tail(&TailSpec::new(u, p)?),
            (None, None, None) => Err(Error::Config(
                "supply either --theta or the pair --tail-u/--tail-p".into(),
            )),
            _ => Err(Error::Config(
                "supply exactly one of --theta or the pair --tail-u/--tail-p".into(),
            )),
        }
    }
}

#[derive(Subcommand, Clone)]
pub enum PriorAction {
    /// Prior density at shape values
    Density {
        #[command(flatten)]
        params: PriorParams,
        #[command(flatten)]
        grid: AlphaInput,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Prior CDF at shape values
    Cdf {
        #[command(flatten)]
        params: PriorParams,
        #[command(flatten)]
        grid: AlphaInput,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Prior quantiles
    Quantile {
        #[command(flatten)]
        params: PriorParams,
        /// Probability levels, comma-separated
        #[arg(long, value_delimiter = ',', required = true)]
        q: Vec<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Draw shapes from the prior
    Sample {
        #[command(flatten)]
        params: PriorParams,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args, Clone)]
pub struct AlphaInput {
    /// Shape values, comma-separated
    #[arg(long, value_delimiter = ',')]
    pub alpha: Vec<f64>,
    /// Shape grid as lo:hi:n
    #[arg(long)]
    pub alpha_grid: Option<String>,
}

impl AlphaInput {
    fn values(&self) -> Result<Vec<f64>> {
        match (&self.alpha_grid, self.alpha.is_empty()) {
            (Some(spec), true) => parse_grid(spec),
            (None, false) => Ok(self.alpha.clone()),
            _ => Err(Error::Config(
                "supply exactly one of --alpha or --alpha-grid".into(),
            )),
        }
    }
}

#[derive(Subcommand, Clone)]
pub enum DistanceDirection {
    /// Shape values to distances
    ToDistance {
        #[arg(long, value_delimiter = ',', required = true)]
        alpha: Vec<f64>,
    },
    /// Distances to shape values on one branch
    ToAlpha {
        #[arg(long, value_delimiter = ',', required = true)]
        d: Vec<f64>,
        #[arg(long, value_enum)]
        branch: BranchArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
pub enum BranchArg {
    Lower,
    Upper,
}

impl From<BranchArg> for Branch {
    fn from(value: BranchArg) -> Self {
        match value {
            BranchArg::Lower => Branch::Lower,
            BranchArg::Upper => Branch::Upper,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ConventionArg {
    Rate,
    Scale,
}

impl From<ConventionArg> for GammaConvention {
    fn from(value: ConventionArg) -> Self {
        match value {
            ConventionArg::Rate => GammaConvention::Rate,
            ConventionArg::Scale => GammaConvention::Scale,
        }
    }
}

#[derive(Args, Clone)]
pub struct TablesArgs {
    /// Gamma(a,a) parameter
    #[arg(long)]
    pub a: f64,
    #[arg(long, value_enum, default_value = "scale")]
    pub convention: ConventionArg,
    /// Distances, comma-separated
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.1, 0.5, 0.8, 1.45])]
    pub d: Vec<f64>,
    /// Emit per-branch pushforward curves on a distance grid instead
    #[arg(long)]
    pub figure5: bool,
    /// Distance grid for --figure5 as lo:hi:n
    #[arg(long, default_value = "0.01:3:300")]
    pub d_grid: String,
    /// Also include the PC prior pushforward (at this theta) in --figure5 output
    #[arg(long)]
    pub with_pc_theta: Option<f64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum EngineArg {
    Grid,
    Mcmc,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum PriorArg {
    Pc,
    Gamma,
    Improper,
}

#[derive(Args, Clone)]
pub struct FitArgs {
    /// Input dataset CSV (header: time,event,x1,...,xK)
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Simulate a dataset instead of fitting
    #[arg(long)]
    pub simulate: bool,
    /// True shape (simulation)
    #[arg(long)]
    pub alpha: Option<f64>,
    /// True coefficients, comma-separated (simulation; default intercept 0)
    #[arg(long, value_delimiter = ',')]
    pub beta: Option<Vec<f64>>,
    /// Number of subjects (simulation)
    #[arg(long)]
    pub n: Option<usize>,
    /// Expected censored fraction (simulation)
    #[arg(long)]
    pub censor_rate: Option<f64>,
    /// Standard-normal covariate columns in addition to the intercept (simulation)
    #[arg(long)]
    pub covariates: Option<usize>,

    #[arg(long, value_enum)]
    pub prior: Option<PriorArg>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub tail_u: Option<f64>,
    #[arg(long)]
    pub tail_p: Option<f64>,
    /// Gamma(a,a) parameter (with --prior gamma)
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long, value_enum)]
    pub convention: Option<ConventionArg>,
    /// Gaussian prior sd for the coefficients
    #[arg(long)]
    pub beta_sd: Option<f64>,

    #[arg(long, value_enum)]
    pub engine: Option<EngineArg>,
    /// Shape range as lo:hi
    #[arg(long)]
    pub alpha_range: Option<String>,
    #[arg(long)]
    pub alpha_grid_points: Option<usize>,
    #[arg(long)]
    pub beta_grid_points: Option<usize>,
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub credible_level: Option<f64>,
    /// Run the sensitivity sweep over these thetas, comma-separated
    #[arg(long, value_delimiter = ',')]
    pub sweep_theta: Option<Vec<f64>>,

    /// Output directory (default: $PCWEIBULL_OUT_DIR or the working directory)
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Output path for --simulate
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Clone)]
pub struct OutputArgs {
    /// Output file (default: stdout)
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Config(format!("grid spec must be lo:hi:n, got `{spec}`")));
    }
    let lo: f64 = parts[0].parse().map_err(|_| Error::Config(format!("bad grid lo `{}`", parts[0])))?;
    let hi: f64 = parts[1].parse().map_err(|_| Error::Config(format!("bad grid hi `{}`", parts[1])))?;
    let n: usize = parts[2].parse().map_err(|_| Error::Config(format!("bad grid count `{}`", parts[2])))?;
    if !(lo < hi) || n < 2 {
        return Err(Error::Config(format!("grid needs lo < hi and n >= 2, got `{spec}`")));
    }
    Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
}

fn fmt_sig(x: f64, sig: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if mag < -4 || mag > 9 {
        return format!("{:.*e}", sig.saturating_sub(1), x);
    }
    let decimals = (sig as i32 - 1 - mag).max(0) as usize;
    format!("{:.*}", decimals, x)
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, content)?;
            Ok(())
        }
        None => {
            std::io::stdout().write_all(content.as_bytes())?;
            Ok(())
        }
    }
}

fn value_table(
    header: (&str, &str),
    rows: &[(f64, f64)],
    out: &OutputArgs,
    sig: usize,
) -> Result<()> {
    let content = match out.format {
        FormatArg::Csv => {
            let mut s = format!("{},{}\n", header.0, header.1);
            for (x, y) in rows {
                s.push_str(&format!("{},{}\n", fmt_sig(*x, sig), fmt_sig(*y, sig)));
            }
            s
        }
        FormatArg::Json => {
            let items: Vec<_> = rows
                .iter()
                .map(|(x, y)| json!({ header.0: x, header.1: y }))
                .collect();
            format!("{}\n", serde_json::to_string_pretty(&items).unwrap())
        }
    };
    write_output(&out.out, &content)
}

/// Run a parsed command; the Ok value is the process exit code 0.
pub fn run(cli: Cli) -> Result<()> {
    let config = load_config(cli.config.as_deref())?;
    let sig = cli.precision;
    match cli.command {
        Command::Prior { action } => run_prior(action, sig),
        Command::Distance { direction } => run_distance(direction),
        Command::Tables(args) => run_tables(args, sig),
        Command::Fit(args) => run_fit(merge_fit_config(args, config.as_ref())?, sig),
    }
}

fn run_prior(action: PriorAction, sig: usize) -> Result<()> {
    match action {
        PriorAction::Density { params, grid, out } => {
            let spec = params.resolve()?;
            let rows: Vec<(f64, f64)> = grid
                .values()?
                .into_iter()
                .map(|a| Ok((a, pc_prior::density(a, &spec)?)))
                .collect::<Result<_>>()?;
            value_table(("alpha", "density"), &rows, &out, sig)
        }
        PriorAction::Cdf { params, grid, out } => {
            let spec = params.resolve()?;
            let rows: Vec<(f64, f64)> = grid
                .values()?
                .into_iter()
                .map(|a| Ok((a, pc_prior::cdf(a, &spec)?)))
                .collect::<Result<_>>()?;
            value_table(("alpha", "cdf"), &rows, &out, sig)
        }
        PriorAction::Quantile { params, q, out } => {
            let spec = params.resolve()?;
            let rows: Vec<(f64, f64)> = q
                .into_iter()
                .map(|qq| Ok((qq, pc_prior::quantile(qq, &spec)?)))
                .collect::<Result<_>>()?;
            value_table(("q", "alpha"), &rows, &out, sig)
        }
        PriorAction::Sample { params, n, seed, out } => {
            let spec = params.resolve()?;
            let report = pc_prior::sample(n, &spec, seed)?;
            let content = match out.format {
                FormatArg::Csv => {
                    let mut s = String::from("alpha\n");
                    for v in &report.values {
                        s.push_str(&fmt_sig(*v, sig));
                        s.push('\n');
                    }
                    s
                }
                FormatArg::Json => format!(
                    "{}\n",
                    serde_json::to_string_pretty(&json!({
                        "values": report.values,
                        "saturated_retries": report.saturated_retries,
                    }))
                    .unwrap()
                ),
            };
            if report.saturated_retries > 0 {
                eprintln!(
                    "note: {} draw(s) fell below the lower-branch floor and were redrawn",
                    report.saturated_retries
                );
            }
            write_output(&out.out, &content)
        }
    }
}

fn run_distance(direction: DistanceDirection) -> Result<()> {
    match direction {
        DistanceDirection::ToDistance { alpha } => {
            for a in alpha {
                println!("{:.6}", distance(a)?.d);
            }
        }
        DistanceDirection::ToAlpha { d, branch } => {
            for dd in d {
                println!("{:.6}", alpha_from_distance(dd, branch.into())?);
            }
        }
    }
    Ok(())
}

fn run_tables(args: TablesArgs, sig: usize) -> Result<()> {
    let spec = GammaPriorSpec::new(args.a, args.convention.into())?;
    if args.figure5 {
        let d_grid = parse_grid(&args.d_grid)?;
        let lower = gamma_prior_on_distance_scale(&spec, Branch::Lower, &d_grid)?;
        let upper = gamma_prior_on_distance_scale(&spec, Branch::Upper, &d_grid)?;
        let pc = args
            .with_pc_theta
            .map(|theta| pc_prior_on_distance_scale(theta, &d_grid))
            .transpose()?;
        let mut s = String::from("distance,gamma_lower,gamma_upper");
        if pc.is_some() {
            s.push_str(",pc");
        }
        s.push('\n');
        for (i, &d) in d_grid.iter().enumerate() {
            s.push_str(&format!(
                "{},{},{}",
                fmt_sig(d, sig),
                fmt_sig(lower[i].1, sig),
                fmt_sig(upper[i].1, sig)
            ));
            if let Some(pc) = &pc {
                s.push_str(&format!(",{}", fmt_sig(pc[i].1, sig)));
            }
            s.push('\n');
        }
        return write_output(&args.out.out, &s);
    }
    let rows = distance_table(&args.d, &spec)?;
    let mut s = String::from("distance,alpha_lower,dens_lower,alpha_upper,dens_upper\n");
    for row in rows {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_sig(row.distance, sig),
            fmt_sig(row.alpha_lower, sig),
            fmt_sig(row.dens_lower, sig),
            fmt_sig(row.alpha_upper, sig),
            fmt_sig(row.dens_upper, sig)
        ));
    }
    write_output(&args.out.out, &s)
}

fn load_config(path: Option<&Path>) -> Result<Option<serde_json::Value>> {
    let Some(path) = path else { return Ok(None) };
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("bad config JSON: {e}")))?;
    match value.get("version").and_then(|v| v.as_u64()) {
        Some(CONFIG_VERSION) => Ok(Some(value)),
        Some(v) => Err(Error::Config(format!(
            "config version {v} not supported (expected {CONFIG_VERSION})"
        ))),
        None => Err(Error::Config("config must carry a numeric `version` field".into())),
    }
}

// Fill unset fit flags from the `fit` section of the config file.
fn merge_fit_config(mut args: FitArgs, config: Option<&serde_json::Value>) -> Result<FitArgs> {
    let Some(section) = config.and_then(|c| c.get("fit")) else {
        return Ok(args);
    };
    macro_rules! fill {
        ($field:ident, $key:literal, $conv:expr) => {
            if args.$field.is_none() {
                if let Some(v) = section.get($key) {
                    args.$field = Some($conv(v).ok_or_else(|| {
                        Error::Config(format!("config fit.{} has the wrong type", $key))
                    })?);
                }
            }
        };
    }
    fill!(theta, "theta", |v: &serde_json::Value| v.as_f64());
    fill!(tail_u, "tail_u", |v: &serde_json::Value| v.as_f64());
    fill!(tail_p, "tail_p", |v: &serde_json::Value| v.as_f64());
    fill!(a, "a", |v: &serde_json::Value| v.as_f64());
    fill!(beta_sd, "beta_sd", |v: &serde_json::Value| v.as_f64());
    fill!(alpha_range, "alpha_range", |v: &serde_json::Value| {
        v.as_str().map(str::to_string)
    });
    fill!(alpha_grid_points, "alpha_grid_points", |v: &serde_json::Value| {
        v.as_u64().map(|x| x as usize)
    });
    fill!(beta_grid_points, "beta_grid_points", |v: &serde_json::Value| {
        v.as_u64().map(|x| x as usize)
    });
    fill!(iters, "iters", |v: &serde_json::Value| v.as_u64().map(|x| x as usize));
    fill!(burn_in, "burn_in", |v: &serde_json::Value| v.as_u64().map(|x| x as usize));
    fill!(seed, "seed", |v: &serde_json::Value| v.as_u64());
    fill!(credible_level, "credible_level", |v: &serde_json::Value| v.as_f64());
    if args.engine.is_none() {
        if let Some(v) = section.get("engine").and_then(|v| v.as_str()) {
            args.engine = Some(match v {
                "grid" => EngineArg::Grid,
                "mcmc" => EngineArg::Mcmc,
                "both" => EngineArg::Both,
                other => return Err(Error::Config(format!("unknown engine `{other}` in config"))),
            });
        }
    }
    Ok(args)
}

fn fit_config_from_args(args: &FitArgs) -> Result<FitConfig> {
    let mut cfg = FitConfig::default();
    if let Some(spec) = &args.alpha_range {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 2 {
            return Err(Error::Config(format!("--alpha-range must be lo:hi, got `{spec}`")));
        }
        let lo: f64 = parts[0].parse().map_err(|_| Error::Config("bad alpha range lo".into()))?;
        let hi: f64 = parts[1].parse().map_err(|_| Error::Config("bad alpha range hi".into()))?;
        cfg.alpha_range = (lo, hi);
    }
    if let Some(n) = args.alpha_grid_points {
        cfg.alpha_grid_points = n;
    }
    if let Some(n) = args.beta_grid_points {
        cfg.beta_grid_points = n;
    }
    if let Some(n) = args.iters {
        cfg.mcmc_iters = n;
    }
    if let Some(n) = args.burn_in {
        cfg.burn_in = n;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(c) = args.credible_level {
        cfg.credible_level = c;
    }
    cfg.engine = match args.engine.unwrap_or(EngineArg::Grid) {
        EngineArg::Grid => Engine::Grid,
        EngineArg::Mcmc => Engine::Mcmc,
        EngineArg::Both => Engine::Both,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn prior_from_args(args: &FitArgs) -> Result<PriorChoice> {
    let beta_sd = args.beta_sd.unwrap_or(DEFAULT_BETA_PRIOR_SD);
    let alpha_prior = match args.prior.unwrap_or(PriorArg::Pc) {
        PriorArg::Pc => {
            let params = PriorParams {
                theta: args.theta.or(if args.tail_u.is_none() { Some(pc_prior::DEFAULT_THETA) } else { None }),
                tail_u: args.tail_u,
                tail_p: args.tail_p,
            };
            AlphaPrior::Pc(params.resolve()?)
        }
        PriorArg::Gamma => {
            let a = args
                .a
                .ok_or_else(|| Error::Config("--prior gamma requires --a".into()))?;
            let convention = args.convention.unwrap_or(ConventionArg::Rate);
            AlphaPrior::Gamma(GammaPriorSpec::new(a, convention.into())?)
        }
        PriorArg::Improper => AlphaPrior::ImproperUniform,
    };
    PriorChoice::new(alpha_prior, beta_sd)
}

fn result_json(result: &PosteriorResult) -> serde_json::Value {
    serde_json::to_value(result).unwrap()
}

fn marginal_csv(result: &PosteriorResult, sig: usize) -> String {
    let mut s = String::from("alpha,density\n");
    for (a, dens) in &result.alpha_marginal {
        s.push_str(&format!("{},{}\n", fmt_sig(*a, sig), fmt_sig(*dens, sig)));
    }
    s
}

fn out_dir(args: &FitArgs) -> PathBuf {
    args.out_dir
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn run_fit(args: FitArgs, sig: usize) -> Result<()> {
    if args.simulate {
        return run_simulate(&args);
    }
    let data_path = args
        .data
        .clone()
        .ok_or_else(|| Error::Config("supply --data (or --simulate)".into()))?;
    let data = SurvivalDataset::from_csv_path(&data_path)?;
    let cfg = fit_config_from_args(&args)?;
    let prior = prior_from_args(&args)?;
    let dir = out_dir(&args);
    std::fs::create_dir_all(&dir)?;

    if let Some(thetas) = &args.sweep_theta {
        let beta_sd = args.beta_sd.unwrap_or(DEFAULT_BETA_PRIOR_SD);
        let sweep = sensitivity_sweep(&data, thetas, beta_sd, &cfg)?;
        let mut summaries = Vec::new();
        for (theta, result) in &sweep {
            let marginal_path = dir.join(format!("marginal_theta_{theta}.csv"));
            std::fs::write(&marginal_path, marginal_csv(result, sig))?;
            summaries.push(json!({
                "theta": theta,
                "marginal_csv": marginal_path.to_string_lossy(),
                "result": result_json(result),
            }));
        }
        let report = json!({ "sweep": summaries });
        let path = dir.join("sweep_summary.json");
        std::fs::write(&path, format!("{}\n", serde_json::to_string_pretty(&report).unwrap()))?;
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
        return Ok(());
    }

    let report = match cfg.engine {
        Engine::Both => {
            let grid = fit_grid(&data, &prior, &cfg)?;
            let mcmc = fit_mcmc(&data, &prior, &cfg)?;
            let delta = (grid.alpha_summary.mean - mcmc.alpha_summary.mean).abs();
            std::fs::write(dir.join("marginal_grid.csv"), marginal_csv(&grid, sig))?;
            std::fs::write(dir.join("marginal_mcmc.csv"), marginal_csv(&mcmc, sig))?;
            json!({
                "grid": result_json(&grid),
                "mcmc": result_json(&mcmc),
                "diagnostics": { "alpha_mean_abs_delta": delta },
            })
        }
        Engine::Grid => {
            let result = fit_grid(&data, &prior, &cfg)?;
            std::fs::write(dir.join("marginal.csv"), marginal_csv(&result, sig))?;
            result_json(&result)
        }
        Engine::Mcmc => {
            let result = fit_mcmc(&data, &prior, &cfg)?;
            std::fs::write(dir.join("marginal.csv"), marginal_csv(&result, sig))?;
            result_json(&result)
        }
    };
    let path = dir.join("fit_summary.json");
    std::fs::write(&path, format!("{}\n", serde_json::to_string_pretty(&report).unwrap()))?;
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
    Ok(())
}

fn run_simulate(args: &FitArgs) -> Result<()> {
    let alpha = args
        .alpha
        .ok_or_else(|| Error::Config("--simulate requires --alpha".into()))?;
    let n = args.n.ok_or_else(|| Error::Config("--simulate requires --n".into()))?;
    let seed = args.seed.ok_or_else(|| Error::Config("--simulate requires --seed".into()))?;
    let censor_rate = args.censor_rate.unwrap_or(0.0);
    let extra = args.covariates.unwrap_or(0);
    let beta = args.beta.clone().unwrap_or_else(|| vec![0.0; extra + 1]);
    if beta.len() != extra + 1 {
        return Err(Error::Config(format!(
            "--beta needs {} value(s) for an intercept plus {extra} covariate(s)",
            extra + 1
        )));
    }
    // covariate draws use a seed derived from the data seed
    let mut rng = crate::numerics::derive_rng(seed, 1);
    let covariates: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let mut row = vec![1.0];
            for _ in 0..extra {
                row.push(crate::numerics::sample_standard_normal(&mut rng));
            }
            row
        })
        .collect();
    let data = simulate(alpha, &beta, covariates, censor_rate, seed)?;
    match &args.out {
        Some(path) => data.to_csv_path(path)?,
        None => data.to_csv_writer(std::io::stdout())?,
    }
    Ok(())
}

/// Process exit code for an error, per the documented contract:
/// 2 for usage/input problems, 1 for numeric or model failures.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Csv { .. } | Error::Dataset(_) | Error::Domain(_) | Error::Shape(_) => 2,
        _ => 1,
    }
}
