//! Command-line front end.
//!
//! Settings are resolved as flags, then the flat JSON file given by
//! `--config`, then built-in defaults.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::analytics::{
    binomial_pmf, compute_bound_report, estimate_p_out_mc, iid_delay_bound, levy_delay_upper, u_bar_bound,
    BinomialTail, EmpiricalCcdf, Estimate, REPORT_GAMMA,
};
use crate::error::{ensure_arg, Error, Result};
use crate::experiments::{
    delay_point, dominating_constants, neighbor_binomial_gof, pair_meeting_samples, run_delay_sweep,
    run_dominance_check, sample_neighbor_counts, CcdfRow, DominancePlan, SweepPlan, DEFAULT_EXPONENT_TOLERANCE,
    MAX_CENSORED_FRACTION,
};
use crate::flight::FlightLaw;
use crate::report::{write_csv, write_json};
use crate::streams::{StreamSeed, DEFAULT_SEED};
use crate::world::{ensure_beta, ModelConfig, Mobility};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SubcommandKind {
    Bounds,
    Meet,
    Delay,
    Sweep,
    Gof,
    Dominance,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Levy,
    Iid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SamplerArg {
    Pareto,
    Stable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
    Both,
}

impl OutputFormat {
    fn csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }

    fn json(self) -> bool {
        matches!(self, OutputFormat::Json | OutputFormat::Both)
    }
}

fn parse_seed(s: &str) -> std::result::Result<u64, String> {
    let clean: String = s.chars().filter(|&c| c != '_').collect();
    let parsed = match clean.strip_prefix("0x").or_else(|| clean.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => clean.parse(),
    };
    parsed.map_err(|e| format!("invalid seed {s:?}: {e}"))
}

/// One layer of settings; every field is optional so layers can be merged.
#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    #[arg(skip)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subcommand: Option<SubcommandKind>,
    /// Mobility model [default: iid]
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelKind>,
    /// Flight-length sampler for the Lévy model [default: pareto]
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampler: Option<SamplerArg>,
    /// Tail exponent α in (0, 2]; the lower exponent for `dominance` [default: 1]
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Upper tail exponent for `dominance` [default: 2]
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_high: Option<f64>,
    /// Shortest Pareto flight length [default: 1]
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_th: Option<f64>,
    /// Stable-law scale s [default: 1]
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    /// Number of nodes; the disc has radius sqrt(n) [default: 400]
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    /// Communication range (exclusive with --beta)
    #[arg(long, conflicts_with = "beta")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    /// Range exponent with r = n^beta, beta in [0, 0.25]
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Trials, pairs or placements per point [default: 10000]
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    /// Slots simulated before a trial is censored [default: 1000 iid, 10000 levy]
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<u32>,
    /// Master seed, decimal or 0x-hex [default: 0x5EED_CAFE]
    #[arg(long, value_parser = parse_seed)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Worker threads [default: all cores]
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    /// Output directory [default: .]
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Output format [default: both]
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
    /// Exit with status 2 when the run's bound or scaling assertion fails
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check: Option<bool>,
    /// Network sizes for `sweep`, comma separated [default: 250,500,1000,2000,4000]
    #[arg(long, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_grid: Option<Vec<u64>>,
    /// Largest τ (or t) tabulated by `meet` and `dominance` [default: 30]
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_max: Option<u64>,
    /// Slack on the fitted exponent for `sweep --check` [default: 0.15]
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Flat JSON file with any of the settings above
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl ConfigLayer {
    /// Fields of `self`, falling back to `lower` where unset.
    fn over(self, lower: ConfigLayer) -> ConfigLayer {
        let range_set = self.r.is_some() || self.beta.is_some();
        ConfigLayer {
            subcommand: self.subcommand.or(lower.subcommand),
            model: self.model.or(lower.model),
            sampler: self.sampler.or(lower.sampler),
            alpha: self.alpha.or(lower.alpha),
            alpha_high: self.alpha_high.or(lower.alpha_high),
            z_th: self.z_th.or(lower.z_th),
            scale: self.scale.or(lower.scale),
            n: self.n.or(lower.n),
            r: if range_set { self.r } else { lower.r },
            beta: if range_set { self.beta } else { lower.beta },
            trials: self.trials.or(lower.trials),
            horizon: self.horizon.or(lower.horizon),
            seed: self.seed.or(lower.seed),
            workers: self.workers.or(lower.workers),
            out: self.out.or(lower.out),
            format: self.format.or(lower.format),
            check: self.check.or(lower.check),
            n_grid: self.n_grid.or(lower.n_grid),
            tau_max: self.tau_max.or(lower.tau_max),
            tolerance: self.tolerance.or(lower.tolerance),
            config: None,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form bounds and Monte Carlo estimates for one configuration
    Bounds(ConfigLayer),
    /// Pair meeting-time CCDF against the geometric bound
    Meet(ConfigLayer),
    /// Two-hop scheme delay at one network size
    Delay(ConfigLayer),
    /// Delay scaling over a grid of network sizes
    Sweep(ConfigLayer),
    /// Chi-square test of the relay-count binomial law
    Gof(ConfigLayer),
    /// Meeting-time CCDFs for two tail exponents
    Dominance(ConfigLayer),
}

#[derive(Parser, Debug)]
#[command(name = "meetsim", version, about = "Meeting-time and two-hop delay simulator for Lévy flight and i.i.d. mobility")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// A fully resolved and validated run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub subcommand: SubcommandKind,
    pub model: ModelKind,
    pub sampler: SamplerArg,
    pub alpha: f64,
    pub alpha_high: f64,
    pub z_th: f64,
    pub scale: f64,
    pub n: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    pub trials: u64,
    pub horizon: u32,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    pub out: PathBuf,
    pub format: OutputFormat,
    pub check: bool,
    pub n_grid: Vec<u64>,
    pub tau_max: u64,
    pub tolerance: f64,
}

impl RunConfig {
    fn resolve(layer: ConfigLayer) -> Result<Self> {
        let subcommand = layer
            .subcommand
            .ok_or_else(|| Error::InvalidArgument("missing required field: subcommand".into()))?;
        let model = layer.model.unwrap_or(ModelKind::Iid);
        let default_horizon = match model {
            ModelKind::Iid => Mobility::Iid.default_horizon(),
            ModelKind::Levy => 10_000,
        };
        let cfg = RunConfig {
            subcommand,
            model,
            sampler: layer.sampler.unwrap_or(SamplerArg::Pareto),
            alpha: layer.alpha.unwrap_or(1.0),
            alpha_high: layer.alpha_high.unwrap_or(2.0),
            z_th: layer.z_th.unwrap_or(crate::flight::DEFAULT_Z_TH),
            scale: layer.scale.unwrap_or(crate::flight::DEFAULT_SCALE),
            n: layer.n.unwrap_or(400),
            r: layer.r,
            beta: layer.beta,
            trials: layer.trials.unwrap_or(10_000),
            horizon: layer.horizon.unwrap_or(default_horizon),
            seed: layer.seed.unwrap_or(DEFAULT_SEED),
            workers: layer.workers,
            out: layer.out.unwrap_or_else(|| PathBuf::from(".")),
            format: layer.format.unwrap_or(OutputFormat::Both),
            check: layer.check.unwrap_or(false),
            n_grid: layer.n_grid.unwrap_or_else(|| vec![250, 500, 1000, 2000, 4000]),
            tau_max: layer.tau_max.unwrap_or(30),
            tolerance: layer.tolerance.unwrap_or(DEFAULT_EXPONENT_TOLERANCE),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_arg!(self.alpha > 0.0 && self.alpha <= 2.0, "alpha must be in (0, 2], got {}", self.alpha);
        ensure_arg!(
            self.alpha_high > 0.0 && self.alpha_high <= 2.0,
            "alpha-high must be in (0, 2], got {}",
            self.alpha_high
        );
        ensure_arg!(self.z_th > 0.0, "z-th must be positive, got {}", self.z_th);
        ensure_arg!(self.scale > 0.0, "scale must be positive, got {}", self.scale);
        ensure_arg!(self.n >= 2, "n must be at least 2, got {}", self.n);
        ensure_arg!(!(self.r.is_some() && self.beta.is_some()), "--r and --beta are mutually exclusive");
        if let Some(beta) = self.beta {
            ensure_beta(beta)?;
        }
        if let Some(r) = self.r {
            ensure_arg!(r > 0.0 && r.is_finite(), "r must be positive, got {r}");
        }
        ensure_arg!(
            self.r.is_some() || self.beta.is_some(),
            "missing required field: one of --r or --beta"
        );
        ensure_arg!(self.trials >= 1, "trials must be positive");
        ensure_arg!(self.horizon >= 1, "horizon must be positive");
        if let Some(w) = self.workers {
            ensure_arg!(w >= 1, "workers must be positive");
        }
        ensure_arg!(self.tolerance >= 0.0, "tolerance must be nonnegative");
        if self.subcommand == SubcommandKind::Sweep {
            ensure_arg!(self.n_grid.len() >= 2, "n-grid needs at least two sizes");
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Parses a flat JSON settings document as the only layer above the defaults.
    pub fn from_json(text: &str) -> Result<Self> {
        Self::resolve(serde_json::from_str(text)?)
    }

    fn range_at(&self, n: u64) -> f64 {
        self.r.unwrap_or_else(|| (n as f64).powf(self.beta.expect("validated")))
    }

    fn mobility(&self, alpha: f64) -> Result<Mobility> {
        Ok(match self.model {
            ModelKind::Iid => Mobility::Iid,
            ModelKind::Levy => Mobility::LevyFlight(match self.sampler {
                SamplerArg::Pareto => FlightLaw::truncated_pareto(alpha, self.z_th)?,
                SamplerArg::Stable => FlightLaw::stable(alpha, self.scale)?,
            }),
        })
    }

    fn model_config(&self) -> Result<ModelConfig> {
        Ok(ModelConfig::new(self.n, self.range_at(self.n), self.mobility(self.alpha)?)?
            .horizon(self.horizon)
            .seed(self.seed))
    }
}

/// Outcome of a command-line invocation before it becomes an exit code.
#[derive(Debug)]
pub enum ParseOutcome {
    Run(Box<RunConfig>),
    /// `--help` or `--version`: print and exit 0.
    Display(String),
}

pub fn parse_args<I, T>(argv: I) -> Result<ParseOutcome>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Ok(ParseOutcome::Display(e.to_string())),
                _ => Err(Error::InvalidArgument(e.to_string())),
            };
        }
    };
    let (kind, mut flags) = match cli.command {
        Command::Bounds(l) => (SubcommandKind::Bounds, l),
        Command::Meet(l) => (SubcommandKind::Meet, l),
        Command::Delay(l) => (SubcommandKind::Delay, l),
        Command::Sweep(l) => (SubcommandKind::Sweep, l),
        Command::Gof(l) => (SubcommandKind::Gof, l),
        Command::Dominance(l) => (SubcommandKind::Dominance, l),
    };
    flags.subcommand = Some(kind);
    let file = match &flags.config {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            let mut layer: ConfigLayer = serde_json::from_str(&text)?;
            layer.subcommand = None;
            layer
        }
        None => ConfigLayer::default(),
    };
    Ok(ParseOutcome::Run(Box::new(RunConfig::resolve(flags.over(file))?)))
}

#[derive(Serialize)]
struct KeyValue<'a> {
    quantity: &'a str,
    value: f64,
}

#[derive(Serialize)]
struct MeetSummary {
    model: String,
    n: u64,
    r: f64,
    trials: u64,
    horizon: u32,
    mean_ceil_t: Estimate,
    mean_t: Estimate,
    censored_fraction: f64,
    p_hat_upper: f64,
    p_out_upper: f64,
    ceil_t_bound: f64,
    all_rows_within_bound: bool,
    rows: Vec<CcdfRow>,
}

#[derive(Serialize)]
struct DelaySummary {
    point: crate::experiments::DelayPoint,
    bound: f64,
    bound_kind: &'static str,
    within_bound: bool,
}

#[derive(Serialize)]
struct SweepSummary {
    sweep: crate::experiments::DelaySweep,
    bound_exponent: f64,
    tolerance: f64,
    passes: bool,
}

#[derive(Serialize)]
struct GofRow {
    relays: u64,
    observed: u64,
    expected: f64,
}

#[derive(Serialize)]
struct GofSummary {
    n: u64,
    r: f64,
    placements: u64,
    p_out_mc: Estimate,
    result: crate::experiments::GofResult,
}

#[derive(Serialize)]
struct DominanceSummary {
    plan: DominancePlan,
    all_hold: bool,
    rows: Vec<crate::experiments::DominanceRow>,
}

fn emit<T: Serialize, S: Serialize>(cfg: &RunConfig, name: &str, rows: &[T], summary: &S) -> Result<()> {
    fs::create_dir_all(&cfg.out)?;
    let out: &Path = &cfg.out;
    if cfg.format.csv() {
        write_csv(&out.join(format!("{name}.csv")), rows)?;
    }
    if cfg.format.json() {
        write_json(&out.join(format!("{name}.json")), summary)?;
    }
    Ok(())
}

fn run_bounds(cfg: &RunConfig) -> Result<bool> {
    let model = cfg.model_config()?;
    let report = compute_bound_report(&model, cfg.trials, StreamSeed::new(cfg.seed).derive("bounds"))?;
    let rows = [
        KeyValue { quantity: "p_out_lower", value: report.p_out_lower },
        KeyValue { quantity: "p_out_upper", value: report.p_out_upper },
        KeyValue { quantity: "p_out_mc", value: report.p_out_mc.value },
        KeyValue { quantity: "p_hat_lower", value: report.p_hat_lower },
        KeyValue { quantity: "p_hat_upper", value: report.p_hat_upper },
        KeyValue { quantity: "p_hat_mc", value: report.p_hat_mc.value },
        KeyValue { quantity: "delay_upper", value: report.delay_upper },
        KeyValue { quantity: "capacity_lambda", value: report.capacity_lambda.unwrap_or(f64::NAN) },
    ];
    emit(cfg, "bounds", &rows, &report)?;
    Ok(report.p_out_mc.within(report.p_out_lower, report.p_out_upper, 3.0)
        && report.p_hat_mc.within(report.p_hat_lower, report.p_hat_upper, 3.0))
}

fn run_meet(cfg: &RunConfig) -> Result<bool> {
    let model = cfg.model_config()?;
    let (p_hat, p_out) = dominating_constants(&model)?;
    let samples = pair_meeting_samples(&model, StreamSeed::new(cfg.seed).derive("meet"), cfg.trials)?;
    let slots: Vec<Option<u32>> = samples.iter().map(|s| s.contact_slot).collect();
    let ccdf = EmpiricalCcdf::from_slots(&slots, cfg.horizon);
    let tau_max = cfg.tau_max.min(u64::from(cfg.horizon) - 1);
    let rows: Vec<CcdfRow> = (0..=tau_max)
        .map(|tau| {
            Ok(CcdfRow {
                model: model.model.name().to_string(),
                n: model.n,
                r: model.r,
                tau,
                empirical: ccdf.at(tau),
                stderr: ccdf.stderr(tau),
                bound: crate::analytics::ccdf_geometric_bound(tau, p_hat, p_out)?,
                trials: ccdf.trials,
                censored_fraction: ccdf.censored_fraction(),
            })
        })
        .collect::<Result<_>>()?;
    let ceil: Vec<f64> = slots.iter().map(|s| f64::from(s.unwrap_or(cfg.horizon))).collect();
    let t: Vec<f64> = samples.iter().map(|s| s.meeting_time.value_or_horizon()).collect();
    let ok = rows.iter().all(|r| r.within_bound(3.0));
    let summary = MeetSummary {
        model: model.model.name().to_string(),
        n: model.n,
        r: model.r,
        trials: cfg.trials,
        horizon: cfg.horizon,
        mean_ceil_t: Estimate::from_values(&ceil),
        mean_t: Estimate::from_values(&t),
        censored_fraction: ccdf.censored_fraction(),
        p_hat_upper: p_hat,
        p_out_upper: p_out,
        ceil_t_bound: levy_delay_upper(p_hat, p_out)?,
        all_rows_within_bound: ok,
        rows: rows.clone(),
    };
    emit(cfg, "meet", &rows, &summary)?;
    Ok(ok)
}

fn run_delay(cfg: &RunConfig) -> Result<bool> {
    let model = cfg.model_config()?;
    let (p_hat, p_out) = dominating_constants(&model)?;
    let point = delay_point(&model, StreamSeed::new(cfg.seed).derive("delay").derive_index(cfg.n), cfg.trials)?;
    let (bound, bound_kind) = match model.model {
        Mobility::Iid => (
            iid_delay_bound(
                model.n,
                model.r,
                p_hat,
                p_out,
                REPORT_GAMMA,
                &|m| u_bar_bound(m, p_hat, p_out),
                BinomialTail::Exact,
            )?,
            "iid_three_term",
        ),
        Mobility::LevyFlight(_) => (levy_delay_upper(p_hat, p_out)?, "expected_ceil_meeting_time"),
    };
    let within = point.censored_fraction < MAX_CENSORED_FRACTION && point.mean <= bound + 3.0 * point.stderr;
    let summary = DelaySummary { point: point.clone(), bound, bound_kind, within_bound: within };
    emit(cfg, "delay", &[point], &summary)?;
    Ok(within)
}

fn run_sweep(cfg: &RunConfig) -> Result<bool> {
    let plan = SweepPlan {
        n_grid: cfg.n_grid.clone(),
        beta: cfg.beta.unwrap_or(0.0),
        r_override: cfg.r,
        model: cfg.mobility(cfg.alpha)?,
        trials_per_point: cfg.trials,
        horizon: cfg.horizon,
        master_seed: cfg.seed,
    };
    let sweep = run_delay_sweep(&plan)?;
    let beta = cfg.beta.unwrap_or_else(|| {
        let n0 = cfg.n_grid[0] as f64;
        (cfg.r.expect("validated").ln() / n0.ln()).max(0.0)
    });
    let bound_exponent = match cfg.model {
        ModelKind::Iid => (0.5 - 3.0 * beta).max(0.0),
        ModelKind::Levy => ((1.0 + cfg.alpha) / 2.0 - beta).min(1.0),
    };
    let passes = sweep.fit.as_ref().is_some_and(|f| f.slope <= bound_exponent + cfg.tolerance);
    let summary = SweepSummary { sweep: sweep.clone(), bound_exponent, tolerance: cfg.tolerance, passes };
    emit(cfg, "sweep", &sweep.points, &summary)?;
    Ok(passes)
}

fn run_gof(cfg: &RunConfig) -> Result<bool> {
    let r = cfg.range_at(cfg.n);
    let seed = StreamSeed::new(cfg.seed).derive("gof");
    let counts = sample_neighbor_counts(seed.derive("placements"), cfg.n, r, cfg.trials)?;
    let p_out = estimate_p_out_mc(seed.derive("p_out"), cfg.n, r, cfg.trials.max(100_000) * 10)?;
    let q = 1.0 - p_out.value;
    let result = neighbor_binomial_gof(&counts, cfg.n, q)?;
    let mut observed = vec![0u64; cfg.n as usize - 1];
    for &c in &counts {
        observed[c as usize] += 1;
    }
    let last = observed.iter().rposition(|&o| o > 0).unwrap_or(0);
    let rows: Vec<GofRow> = (0..=last)
        .map(|k| GofRow {
            relays: k as u64,
            observed: observed[k],
            expected: counts.len() as f64 * binomial_pmf(cfg.n - 2, q, k as u64),
        })
        .collect();
    let summary = GofSummary { n: cfg.n, r, placements: cfg.trials, p_out_mc: p_out, result };
    emit(cfg, "gof", &rows, &summary)?;
    Ok(result.pass)
}

fn run_dominance(cfg: &RunConfig) -> Result<bool> {
    ensure_arg!(cfg.model == ModelKind::Levy, "dominance compares Lévy tail exponents; use --model levy");
    ensure_arg!(
        cfg.sampler == SamplerArg::Pareto,
        "dominance requires the truncated Pareto sampler"
    );
    let plan = DominancePlan {
        n: cfg.n,
        r: cfg.range_at(cfg.n),
        alpha_low: cfg.alpha,
        alpha_high: cfg.alpha_high,
        z_th: cfg.z_th,
        trials: cfg.trials,
        t_grid: (0..=cfg.tau_max).collect(),
        master_seed: cfg.seed,
    };
    let rows = run_dominance_check(&plan)?;
    let all_hold = rows.iter().all(|r| r.holds);
    emit(cfg, "dominance", &rows, &DominanceSummary { plan, all_hold, rows: rows.clone() })?;
    Ok(all_hold)
}

fn dispatch(cfg: &RunConfig) -> Result<bool> {
    match cfg.subcommand {
        SubcommandKind::Bounds => run_bounds(cfg),
        SubcommandKind::Meet => run_meet(cfg),
        SubcommandKind::Delay => run_delay(cfg),
        SubcommandKind::Sweep => run_sweep(cfg),
        SubcommandKind::Gof => run_gof(cfg),
        SubcommandKind::Dominance => run_dominance(cfg),
    }
}

/// Runs a resolved configuration and returns the process exit code.
pub fn run(cfg: &RunConfig) -> i32 {
    let outcome = match cfg.workers {
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(|| dispatch(cfg)),
            Err(e) => Err(Error::InvalidArgument(format!("cannot start {k} workers: {e}"))),
        },
        None => dispatch(cfg),
    };
    match outcome {
        Ok(true) => EXIT_OK,
        Ok(false) if cfg.check => {
            eprintln!("check failed for `{:?}`", cfg.subcommand);
            EXIT_CHECK_FAILED
        }
        Ok(false) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INVALID
        }
    }
}

pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match parse_args(argv) {
        Ok(ParseOutcome::Run(cfg)) => run(&cfg),
        Ok(ParseOutcome::Display(text)) => {
            print!("{text}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("{e}");
            EXIT_INVALID
        }
    }
}
