//! Sweeps over network size, CCDF-versus-bound tables, delay scaling fits and
//! goodness-of-fit checks.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::analytics::{
    binomial_pmf, ccdf_geometric_bound, cosine_diff_tail_constants, p_hat_bounds_iid, p_hat_bounds_levy,
    p_out_bounds, EmpiricalCcdf, Estimate,
};
use crate::error::{ensure_arg, Error, Result};
use crate::flight::{FlightLaw, SamplerKind};
use crate::streams::{parallel_trials, StreamSeed};
use crate::world::{
    ensure_beta, placement_neighbor_count, simulate_pair_meeting, simulate_scheme_delay, MeetingSample,
    ModelConfig, Mobility,
};

/// Default one-sided slack on fitted exponents.
pub const DEFAULT_EXPONENT_TOLERANCE: f64 = 0.15;
/// Points whose censored fraction reaches this are unusable.
pub const MAX_CENSORED_FRACTION: f64 = 0.01;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPlan {
    pub n_grid: Vec<u64>,
    pub beta: f64,
    /// Fixed range used instead of `n^β` when set.
    pub r_override: Option<f64>,
    pub model: Mobility,
    pub trials_per_point: u64,
    pub horizon: u32,
    pub master_seed: u64,
}

impl SweepPlan {
    pub fn validate(&self) -> Result<()> {
        ensure_arg!(!self.n_grid.is_empty(), "n grid must not be empty");
        ensure_arg!(
            self.n_grid.windows(2).all(|w| w[0] < w[1]),
            "n grid must be strictly increasing: {:?}",
            self.n_grid
        );
        ensure_beta(self.beta)?;
        ensure_arg!(self.trials_per_point >= 1, "trials per point must be positive");
        ensure_arg!(self.horizon >= 1, "horizon must be positive");
        if let Some(r) = self.r_override {
            ensure_arg!(r > 0.0, "range must be positive, got {r}");
        }
        Ok(())
    }

    pub fn range_at(&self, n: u64) -> f64 {
        self.r_override.unwrap_or_else(|| (n as f64).powf(self.beta))
    }

    pub fn config_at(&self, n: u64) -> Result<ModelConfig> {
        Ok(ModelConfig::new(n, self.range_at(n), self.model)?.horizon(self.horizon).seed(self.master_seed))
    }
}

pub fn pair_meeting_samples(cfg: &ModelConfig, seed: StreamSeed, trials: u64) -> Result<Vec<MeetingSample>> {
    parallel_trials(seed, trials, |t| simulate_pair_meeting(&t, cfg)).into_iter().collect()
}

/// Model-appropriate `(P̂_upper, P_o_upper)` used by the geometric CCDF bound.
pub fn dominating_constants(cfg: &ModelConfig) -> Result<(f64, f64)> {
    let (_, p_out_upper) = p_out_bounds(cfg.n, cfg.r)?;
    let p_hat_upper = match &cfg.model {
        Mobility::Iid => p_hat_bounds_iid(cfg.n, cfg.r)?.1,
        Mobility::LevyFlight(law) => {
            let tail = cosine_diff_tail_constants(law.alpha, law.tail_c)?;
            p_hat_bounds_levy(cfg.n, cfg.r, &tail, law.alpha)?.upper
        }
    };
    Ok((p_hat_upper, p_out_upper))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CcdfRow {
    pub model: String,
    pub n: u64,
    pub r: f64,
    pub tau: u64,
    pub empirical: f64,
    pub stderr: f64,
    pub bound: f64,
    pub trials: u64,
    pub censored_fraction: f64,
}

impl CcdfRow {
    pub fn within_bound(&self, k_sigma: f64) -> bool {
        self.empirical <= self.bound + k_sigma * self.stderr
    }
}

pub fn run_ccdf_sweep(plan: &SweepPlan, tau_max: u64) -> Result<Vec<CcdfRow>> {
    plan.validate()?;
    ensure_arg!(
        tau_max < u64::from(plan.horizon),
        "tau_max = {tau_max} must be below the horizon {}",
        plan.horizon
    );
    let seed = StreamSeed::new(plan.master_seed).derive("ccdf");
    let mut rows = Vec::new();
    for &n in &plan.n_grid {
        let cfg = plan.config_at(n)?;
        let (p_hat, p_out) = dominating_constants(&cfg)?;
        let samples = pair_meeting_samples(&cfg, seed.derive_index(n), plan.trials_per_point)?;
        let slots: Vec<Option<u32>> = samples.iter().map(|s| s.contact_slot).collect();
        let ccdf = EmpiricalCcdf::from_slots(&slots, plan.horizon);
        for tau in 0..=tau_max {
            rows.push(CcdfRow {
                model: cfg.model.name().to_string(),
                n,
                r: cfg.r,
                tau,
                empirical: ccdf.at(tau),
                stderr: ccdf.stderr(tau),
                bound: ccdf_geometric_bound(tau, p_hat, p_out)?,
                trials: ccdf.trials,
                censored_fraction: ccdf.censored_fraction(),
            });
        }
    }
    Ok(rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitPoint {
    pub n: f64,
    pub mean: f64,
    pub stderr: f64,
    pub censored_fraction: f64,
}

impl FitPoint {
    pub fn new(n: f64, mean: f64, stderr: f64) -> Self {
        Self { n, mean, stderr, censored_fraction: 0.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub slope_stderr: f64,
    pub points: Vec<FitPoint>,
}

impl ScalingFit {
    pub fn censored_fractions(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.censored_fraction).collect()
    }
}

/// Ordinary least squares of `ln mean` on `ln n`.
pub fn fit_loglog(points: &[FitPoint]) -> Result<ScalingFit> {
    ensure_arg!(points.len() >= 2, "need at least two points, got {}", points.len());
    for p in points {
        ensure_arg!(p.n > 0.0, "n must be positive, got {}", p.n);
        ensure_arg!(p.mean > 0.0 && p.mean.is_finite(), "mean at n = {} must be positive, got {}", p.n, p.mean);
        ensure_arg!(
            p.censored_fraction < MAX_CENSORED_FRACTION,
            "censored fraction {} at n = {} is not below {}",
            p.censored_fraction,
            p.n,
            MAX_CENSORED_FRACTION
        );
    }
    let k = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.n.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.mean.ln()).collect();
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    ensure_arg!(sxx > 0.0, "all n values are equal");
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let sst: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let r_squared = if sst > 0.0 { (1.0 - sse / sst).clamp(0.0, 1.0) } else { 1.0 };
    let slope_stderr = if points.len() > 2 { (sse / (k - 2.0) / sxx).sqrt() } else { 0.0 };
    Ok(ScalingFit { slope, intercept, r_squared, slope_stderr, points: points.to_vec() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DelayPoint {
    pub model: String,
    pub n: u64,
    pub r: f64,
    pub trials: u64,
    /// Censored samples enter at their horizon.
    pub mean: f64,
    pub stderr: f64,
    pub median: f64,
    pub censored_fraction: f64,
    pub dest_in_range_fraction: f64,
    pub mean_neighbor_count: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DelaySweep {
    pub points: Vec<DelayPoint>,
    pub fit: Option<ScalingFit>,
    pub invalid_reason: Option<String>,
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

pub fn delay_point(cfg: &ModelConfig, seed: StreamSeed, trials: u64) -> Result<DelayPoint> {
    let samples: Vec<_> =
        parallel_trials(seed, trials, |t| simulate_scheme_delay(&t, cfg)).into_iter().collect::<Result<_>>()?;
    let mut delays: Vec<f64> = samples.iter().map(|s| s.delay.value_or_horizon()).collect();
    let est = Estimate::from_values(&delays);
    let k = trials as f64;
    Ok(DelayPoint {
        model: cfg.model.name().to_string(),
        n: cfg.n,
        r: cfg.r,
        trials,
        mean: est.value,
        stderr: est.stderr,
        median: median(&mut delays),
        censored_fraction: samples.iter().filter(|s| s.delay.is_censored()).count() as f64 / k,
        dest_in_range_fraction: samples.iter().filter(|s| s.dest_in_range).count() as f64 / k,
        mean_neighbor_count: samples.iter().map(|s| s.neighbor_count as f64).sum::<f64>() / k,
    })
}

pub const MIN_SWEEP_POINTS: usize = 3;
pub const MIN_SWEEP_TRIALS: u64 = 1000;

pub fn run_delay_sweep(plan: &SweepPlan) -> Result<DelaySweep> {
    plan.validate()?;
    ensure_arg!(
        plan.n_grid.len() >= MIN_SWEEP_POINTS,
        "a delay sweep needs at least {MIN_SWEEP_POINTS} grid points"
    );
    ensure_arg!(
        plan.trials_per_point >= MIN_SWEEP_TRIALS,
        "a delay sweep needs at least {MIN_SWEEP_TRIALS} trials per point"
    );
    let seed = StreamSeed::new(plan.master_seed).derive("delay");
    let points = plan
        .n_grid
        .iter()
        .map(|&n| delay_point(&plan.config_at(n)?, seed.derive_index(n), plan.trials_per_point))
        .collect::<Result<Vec<_>>>()?;
    let fit_points: Vec<FitPoint> = points
        .iter()
        .map(|p| FitPoint { n: p.n as f64, mean: p.mean, stderr: p.stderr, censored_fraction: p.censored_fraction })
        .collect();
    let (fit, invalid_reason) = match fit_loglog(&fit_points) {
        Ok(f) => (Some(f), None),
        Err(Error::InvalidArgument(msg)) => (None, Some(msg)),
        Err(e) => return Err(e),
    };
    Ok(DelaySweep { points, fit, invalid_reason })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GofResult {
    pub chi2: f64,
    pub dof: u64,
    pub p_value: f64,
    pub pass: bool,
    pub samples: u64,
}

pub const MIN_GOF_SAMPLES: usize = 10_000;
pub const GOF_LEVEL: f64 = 0.01;

/// Chi-square test of relay counts against `Binomial(n - 2, p_out_c)`, with
/// neighbouring cells merged until every expected count is at least 5.
pub fn neighbor_binomial_gof(samples: &[u64], n: u64, p_out_c: f64) -> Result<GofResult> {
    ensure_arg!(samples.len() >= MIN_GOF_SAMPLES, "need at least {MIN_GOF_SAMPLES} samples, got {}", samples.len());
    ensure_arg!(n >= 3, "need n >= 3");
    ensure_arg!(p_out_c > 0.0 && p_out_c < 1.0, "p_out_c must be in (0, 1), got {p_out_c}");
    let trials = n - 2;
    let total = samples.len() as f64;
    let mut observed = vec![0u64; trials as usize + 1];
    for &s in samples {
        ensure_arg!(s <= trials, "count {s} exceeds n - 2 = {trials}");
        observed[s as usize] += 1;
    }
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut acc_e, mut acc_o, mut used_e) = (0.0, 0.0, 0.0);
    for k in 0..=trials {
        let e = total * binomial_pmf(trials, p_out_c, k);
        acc_e += e;
        acc_o += observed[k as usize] as f64;
        if acc_e >= 5.0 && total - used_e - acc_e >= 5.0 {
            cells.push((acc_o, acc_e));
            used_e += acc_e;
            acc_e = 0.0;
            acc_o = 0.0;
        }
    }
    match cells.last_mut() {
        Some(last) => {
            last.0 += acc_o;
            last.1 += acc_e;
        }
        None => cells.push((acc_o, acc_e)),
    }
    ensure_arg!(cells.len() >= 2, "too few cells for a chi-square test");
    let chi2: f64 = cells.iter().map(|&(o, e)| (o - e).powi(2) / e).sum();
    let dof = cells.len() as u64 - 1;
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let p_value = 1.0 - dist.cdf(chi2);
    Ok(GofResult { chi2, dof, p_value, pass: p_value >= GOF_LEVEL, samples: samples.len() as u64 })
}

/// Relay counts `|I(s)| - 1` from `placements` uniform placements, keeping
/// only those with the destination out of range.
pub fn sample_neighbor_counts(seed: StreamSeed, n: u64, r: f64, placements: u64) -> Result<Vec<u64>> {
    let out: Vec<Option<u64>> =
        parallel_trials(seed, placements, |t| placement_neighbor_count(&t, n, r)).into_iter().collect::<Result<_>>()?;
    Ok(out.into_iter().flatten().collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominancePlan {
    pub n: u64,
    pub r: f64,
    pub alpha_low: f64,
    pub alpha_high: f64,
    pub z_th: f64,
    pub trials: u64,
    pub t_grid: Vec<u64>,
    pub master_seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominanceRow {
    pub t: u64,
    pub ccdf_low_alpha: f64,
    pub stderr_low_alpha: f64,
    pub ccdf_high_alpha: f64,
    pub stderr_high_alpha: f64,
    pub holds: bool,
}

/// Empirical CCDFs of the meeting time for two tail exponents on shared
/// trial seeds, so both sides use the same initial placements.
pub fn run_dominance_check(plan: &DominancePlan) -> Result<Vec<DominanceRow>> {
    ensure_arg!(plan.alpha_low <= plan.alpha_high, "alpha_low must not exceed alpha_high");
    ensure_arg!(!plan.t_grid.is_empty(), "t grid must not be empty");
    let horizon = plan.t_grid.iter().copied().max().unwrap_or(0).max(1);
    ensure_arg!(horizon <= u64::from(u32::MAX), "t grid too large");
    let seed = StreamSeed::new(plan.master_seed).derive("dominance");
    let ccdf_for = |alpha: f64| -> Result<EmpiricalCcdf> {
        let law = FlightLaw::truncated_pareto(alpha, plan.z_th)?;
        debug_assert_eq!(law.sampler, SamplerKind::TruncatedPareto);
        let cfg = ModelConfig::new(plan.n, plan.r, Mobility::LevyFlight(law))?
            .horizon(horizon as u32)
            .seed(plan.master_seed);
        let samples = pair_meeting_samples(&cfg, seed, plan.trials)?;
        let slots: Vec<Option<u32>> = samples.iter().map(|s| s.contact_slot).collect();
        Ok(EmpiricalCcdf::from_slots(&slots, horizon as u32))
    };
    let low = ccdf_for(plan.alpha_low)?;
    let high = ccdf_for(plan.alpha_high)?;
    Ok(plan
        .t_grid
        .iter()
        .map(|&t| {
            let (a, b) = (low.at(t), high.at(t));
            let (sa, sb) = (low.stderr(t), high.stderr(t));
            DominanceRow {
                t,
                ccdf_low_alpha: a,
                stderr_low_alpha: sa,
                ccdf_high_alpha: b,
                stderr_high_alpha: sb,
                holds: a <= b + 3.0 * sa.hypot(sb),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn fit_examples() {
        let f = fit_loglog(&[FitPoint::new(10.0, 10.0, 0.0), FitPoint::new(100.0, 100.0, 0.0)]).unwrap();
        assert!((f.slope - 1.0).abs() < 1e-12 && f.intercept.abs() < 1e-12 && f.r_squared == 1.0);
        let flat: Vec<_> = [10.0, 20.0, 40.0].iter().map(|&n| FitPoint::new(n, 3.0, 0.1)).collect();
        assert!(fit_loglog(&flat).unwrap().slope.abs() < 1e-12);
        let exact: Vec<_> = [250.0, 500.0, 1000.0, 2000.0, 4000.0]
            .iter()
            .map(|&n: &f64| FitPoint::new(n, 3.0 * n.powf(0.5), 0.0))
            .collect();
        assert!((fit_loglog(&exact).unwrap().slope - 0.5).abs() < 1e-9);
        assert!(fit_loglog(&[FitPoint::new(10.0, 0.0, 0.0), FitPoint::new(20.0, 1.0, 0.0)]).is_err());
        let mut censored = exact.clone();
        censored[2].censored_fraction = 0.02;
        assert!(fit_loglog(&censored).is_err());
    }

    #[test]
    fn ols_slope_sampling_oracle() {
        // ln y = 0.3 + 0.7 ln n + N(0, σ²); slope sd = σ / sqrt(Sxx).
        let ns = [100.0f64, 200.0, 400.0, 800.0, 1600.0];
        let sigma = 0.1;
        let xs: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
        let mx = xs.iter().sum::<f64>() / 5.0;
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let sd = sigma / sxx.sqrt();
        let mut rng = StreamSeed::new(4).stream(0);
        let mut covered = 0;
        for _ in 0..100 {
            let pts: Vec<FitPoint> = ns
                .iter()
                .map(|&n| {
                    let z: f64 = rng.sample(rand_distr::StandardNormal);
                    FitPoint::new(n, (0.3 + 0.7 * n.ln() + sigma * z).exp(), 0.0)
                })
                .collect();
            let f = fit_loglog(&pts).unwrap();
            if (f.slope - 0.7).abs() <= 2.0 * sd {
                covered += 1;
            }
        }
        assert!(covered >= 90, "covered {covered}");
    }

    #[test]
    fn gof_accepts_binomial_draws() {
        let (n, p) = (60u64, 0.1);
        let mut passes = 0;
        for rep in 0..100 {
            let mut rng = StreamSeed::new(8).stream(rep);
            let samples: Vec<u64> =
                (0..10_000).map(|_| (0..n - 2).filter(|_| rng.random::<f64>() < p).count() as u64).collect();
            if neighbor_binomial_gof(&samples, n, p).unwrap().pass {
                passes += 1;
            }
        }
        assert!(passes >= 95, "passes {passes}");
    }

    #[test]
    fn gof_rejects_bad_inputs() {
        assert!(neighbor_binomial_gof(&[1; 100], 60, 0.1).is_err());
        assert!(neighbor_binomial_gof(&[100; 10_000], 60, 0.1).is_err());
    }

    #[test]
    fn plan_validation() {
        let mut plan = SweepPlan {
            n_grid: vec![100, 50],
            beta: 0.0,
            r_override: None,
            model: Mobility::Iid,
            trials_per_point: 10,
            horizon: 100,
            master_seed: 1,
        };
        assert!(plan.validate().is_err());
        plan.n_grid = vec![50, 100];
        assert!(plan.validate().is_ok());
        plan.beta = 0.3;
        assert!(plan.validate().is_err());
    }

    #[test]
    fn ccdf_sweep_is_replayable() {
        let plan = SweepPlan {
            n_grid: vec![100, 200],
            beta: 0.25,
            r_override: None,
            model: Mobility::Iid,
            trials_per_point: 500,
            horizon: 100,
            master_seed: 3,
        };
        let a = run_ccdf_sweep(&plan, 10).unwrap();
        let b = run_ccdf_sweep(&plan, 10).unwrap();
        assert_eq!(a, b);
        for w in a.windows(2).filter(|w| w[0].n == w[1].n) {
            assert!(w[1].empirical <= w[0].empirical);
        }
    }

    #[test]
    fn equal_alphas_give_equal_ccdfs() {
        let plan = DominancePlan {
            n: 100,
            r: 2.0,
            alpha_low: 1.0,
            alpha_high: 1.0,
            z_th: 1.0,
            trials: 500,
            t_grid: (0..10).collect(),
            master_seed: 1,
        };
        for row in run_dominance_check(&plan).unwrap() {
            assert_eq!(row.ccdf_low_alpha, row.ccdf_high_alpha);
            assert!(row.holds);
        }
    }
}
