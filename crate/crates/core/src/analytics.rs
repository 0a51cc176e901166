//! Closed-form bounds and Monte Carlo estimators for the meeting process.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;

use crate::error::{ensure_arg, Result};
use crate::flight::sample_flight;
use crate::geometry::{in_s_rotated, in_s_star_rotated, uniform_point_in_disc, Point2};
use crate::streams::{parallel_count, parallel_trials, StreamSeed};
use crate::world::{ensure_beta, ModelConfig, Mobility};

/// A Monte Carlo proportion with its binomial standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub trials: u64,
}

impl Estimate {
    pub fn from_count(hits: u64, trials: u64) -> Self {
        let p = hits as f64 / trials as f64;
        Self { value: p, stderr: (p * (1.0 - p) / trials as f64).sqrt(), trials }
    }

    /// Sample mean with the standard error of the mean.
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Self { value: mean, stderr: (var / n).sqrt(), trials: values.len() as u64 }
    }

    /// True when `lo - k·σ ≤ value ≤ hi + k·σ`.
    pub fn within(&self, lo: f64, hi: f64, k: f64) -> bool {
        self.value >= lo - k * self.stderr && self.value <= hi + k * self.stderr
    }
}

fn sqrt_n(n: u64) -> f64 {
    (n as f64).sqrt()
}

/// Bounds on the probability that two uniform nodes start out of range.
pub fn p_out_bounds(n: u64, r: f64) -> Result<(f64, f64)> {
    ensure_arg!(n >= 1, "n must be positive");
    ensure_arg!(r > 0.0 && r <= sqrt_n(n), "r must be in (0, sqrt(n)] = (0, {}], got {r}", sqrt_n(n));
    let q = r * r / n as f64;
    Ok((1.0 - q, 1.0 - q / 3.0))
}

pub fn estimate_p_out_mc(seed: StreamSeed, n: u64, r: f64, trials: u64) -> Result<Estimate> {
    ensure_arg!(trials >= 1, "trials must be at least 1");
    ensure_arg!(n >= 1 && r >= 0.0, "need n >= 1 and r >= 0");
    let radius = sqrt_n(n);
    let hits = parallel_count(seed, trials, |rng| {
        let a = uniform_point_in_disc(rng, radius).expect("positive radius");
        let b = uniform_point_in_disc(rng, radius).expect("positive radius");
        a.dist(b) > r
    });
    Ok(Estimate::from_count(hits, trials))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailConstants {
    pub c_l: f64,
    pub c_u: f64,
    pub cos_integral: f64,
}

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
    let m = 0.5 * (a + b);
    let fm = f(m);
    (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
}

#[allow(clippy::too_many_arguments)]
fn adaptive_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    m: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let (lm, flm, left) = simpson(f, a, fa, m, fm);
    let (rm, frm, right) = simpson(f, m, fm, b, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive_step(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1)
        + adaptive_step(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature to absolute tolerance `tol`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    adaptive_step(f, a, fa, b, fb, m, fm, whole, tol, 60)
}

/// Constants bracketing the tail of `Z₁cosθ₁ - Z₂cosθ₂` for flights whose
/// length tail is `c/z^α`.
pub fn cosine_diff_tail_constants(alpha: f64, c: f64) -> Result<TailConstants> {
    ensure_arg!(alpha > 0.0 && alpha <= 2.0, "alpha must be in (0, 2], got {alpha}");
    ensure_arg!(c > 0.0, "tail constant c must be positive, got {c}");
    let cos_integral = integrate(&|t: f64| t.cos().max(0.0).powf(alpha), 0.0, PI / 2.0, 1e-12);
    Ok(TailConstants {
        c_l: c / (2.0 * PI) * cos_integral,
        c_u: 2f64.powf(1.0 + alpha) * c / PI * cos_integral,
        cos_integral,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevyPHatBounds {
    pub lower: f64,
    pub upper: f64,
    pub n_th_caveat: String,
}

pub const N_TH_CAVEAT: &str =
    "Levy no-contact bounds hold only for n above an unspecified threshold n_th; checks run at n >= 1e4";

pub fn p_hat_bounds_levy(n: u64, r: f64, tail: &TailConstants, alpha: f64) -> Result<LevyPHatBounds> {
    let d = 2.0 * sqrt_n(n);
    ensure_arg!(r > 0.0 && r < d, "r must be in (0, 2 sqrt(n)) = (0, {d}), got {r}");
    ensure_arg!(alpha > 0.0 && alpha <= 2.0, "alpha must be in (0, 2], got {alpha}");
    let arc = (r / d).asin();
    let upper = 1.0 - 2.0 * tail.c_l / PI * (d + r).powf(-alpha) * arc;
    let lower = 1.0 - 2f64.powf(alpha / 2.0 + 2.0) * tail.c_u / PI * (d - r).powf(-alpha) * arc;
    Ok(LevyPHatBounds {
        lower: lower.clamp(0.0, 1.0),
        upper: upper.clamp(0.0, 1.0),
        n_th_caveat: N_TH_CAVEAT.to_string(),
    })
}

pub fn p_hat_bounds_iid(n: u64, r: f64) -> Result<(f64, f64)> {
    let sn = sqrt_n(n);
    ensure_arg!(r > 0.0 && r < 2.0 * sn, "r must be in (0, 2 sqrt(n)) = (0, {}), got {r}", 2.0 * sn);
    let arc = (r / (2.0 * sn)).asin();
    let upper = 1.0 - arc / PI;
    let lower = 1.0 - r * r / (2.0 * n as f64) - 2.0 * r / (PI * sn) - 5.0 / PI * arc;
    Ok((lower.clamp(0.0, 1.0), upper))
}

/// Per-slot no-contact probability from the worst-case start `L = 2√n`.
pub fn estimate_p_hat_mc(seed: StreamSeed, model: &Mobility, n: u64, r: f64, trials: u64) -> Result<Estimate> {
    estimate_h1_mc(seed, model, n, r, 2.0 * sqrt_n(n), trials)
}

/// One-slot no-contact probability given initial distance `l0`.
pub fn estimate_h1_mc(
    seed: StreamSeed,
    model: &Mobility,
    n: u64,
    r: f64,
    l0: f64,
    trials: u64,
) -> Result<Estimate> {
    estimate_h1_mc_rotated(seed, model, n, r, l0, PI / 2.0, trials)
}

/// As [`estimate_h1_mc`] with the anchor of the no-contact set rotated to angle `theta`.
pub fn estimate_h1_mc_rotated(
    seed: StreamSeed,
    model: &Mobility,
    n: u64,
    r: f64,
    l0: f64,
    theta: f64,
    trials: u64,
) -> Result<Estimate> {
    ensure_arg!(trials >= 1, "trials must be at least 1");
    ensure_arg!(n >= 1, "n must be positive");
    let d = 2.0 * sqrt_n(n);
    ensure_arg!(l0 > r && l0 <= d * (1.0 + 1e-12), "l0 must be in (r, 2 sqrt(n)], got {l0}");
    // Validate the anchor once so the per-trial calls cannot fail.
    in_s_rotated(l0, theta, Point2::ORIGIN, r)?;
    let radius = sqrt_n(n);
    let hits = match model {
        Mobility::LevyFlight(law) => {
            law.validate()?;
            parallel_count(seed, trials, |rng| {
                let dv = sample_flight(rng, law).vector_v - sample_flight(rng, law).vector_v;
                in_s_rotated(l0, theta, dv, r).expect("validated anchor")
            })
        }
        Mobility::Iid => parallel_count(seed, trials, |rng| {
            let a = uniform_point_in_disc(rng, radius).expect("positive radius");
            let b = uniform_point_in_disc(rng, radius).expect("positive radius");
            in_s_star_rotated(l0, theta, a - b, r).expect("validated anchor")
        }),
    };
    Ok(Estimate::from_count(hits, trials))
}

pub fn ccdf_geometric_bound(tau: u64, p_hat: f64, p_out: f64) -> Result<f64> {
    ensure_arg!((0.0..=1.0).contains(&p_hat), "p_hat must be in [0, 1], got {p_hat}");
    ensure_arg!((0.0..=1.0).contains(&p_out), "p_out must be in [0, 1], got {p_out}");
    Ok(p_hat.powf(tau as f64) * p_out)
}

/// Empirical `P{T > τ}` from contact slots (`⌈T⌉`, `None` when censored).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCcdf {
    /// `values[τ]` for `τ = 0..=horizon`.
    pub values: Vec<f64>,
    pub trials: u64,
    pub censored: u64,
}

impl EmpiricalCcdf {
    pub fn from_slots(slots: &[Option<u32>], horizon: u32) -> Self {
        let h = horizon as usize;
        let mut counts = vec![0u64; h + 2];
        let mut censored = 0;
        for s in slots {
            match s {
                Some(k) => counts[(*k as usize).min(h + 1)] += 1,
                None => censored += 1,
            }
        }
        let trials = slots.len() as u64;
        let mut above = trials;
        let mut values = Vec::with_capacity(h + 1);
        for c in counts.iter().take(h + 1) {
            above -= c;
            values.push(above as f64 / trials as f64);
        }
        Self { values, trials, censored }
    }

    /// Value at `τ`; past the horizon only the censored mass is known.
    pub fn at(&self, tau: u64) -> f64 {
        let i = (tau as usize).min(self.values.len() - 1);
        self.values[i]
    }

    pub fn stderr(&self, tau: u64) -> f64 {
        let p = self.at(tau);
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    pub fn censored_fraction(&self) -> f64 {
        self.censored as f64 / self.trials as f64
    }
}

/// Summand below which the sum is closed with a geometric remainder.
const U_BAR_CUTOFF: f64 = 1e-12;
pub const DEFAULT_TAIL_CUT: u64 = 100_000;

/// `Σ_τ P{T > τ}^m`, the expected minimum of `m` independent copies of `⌈T⌉`.
pub fn u_bar_from_ccdf(ccdf: &dyn Fn(u64) -> f64, m: u32, tail_cut: u64) -> Result<f64> {
    ensure_arg!(m >= 1, "m must be a positive integer");
    ensure_arg!(tail_cut >= 1, "tail_cut must be positive");
    let mut sum = 0.0;
    let mut prev_value = f64::INFINITY;
    let mut prev_term = f64::NAN;
    for tau in 0..tail_cut {
        let v = ccdf(tau);
        ensure_arg!((0.0..=1.0).contains(&v), "ccdf({tau}) = {v} is not a probability");
        ensure_arg!(v <= prev_value + 1e-12, "ccdf increases at tau = {tau}");
        let term = v.powf(f64::from(m));
        sum += term;
        if term == 0.0 {
            return Ok(sum);
        }
        if term < U_BAR_CUTOFF || tau + 1 == tail_cut {
            if prev_term.is_finite() && prev_term > 0.0 {
                let ratio = term / prev_term;
                if ratio < 1.0 {
                    sum += term * ratio / (1.0 - ratio);
                }
            }
            return Ok(sum);
        }
        prev_value = v;
        prev_term = term;
    }
    Ok(sum)
}

pub fn u_bar_bound(m: u32, p_hat: f64, p_out: f64) -> Result<f64> {
    ensure_arg!(m >= 1, "m must be a positive integer");
    ensure_arg!((0.0..1.0).contains(&p_hat), "p_hat must be in [0, 1), got {p_hat}");
    ensure_arg!((0.0..=1.0).contains(&p_out), "p_out must be in [0, 1], got {p_out}");
    let m = f64::from(m);
    Ok(p_out.powf(m) / (1.0 - p_hat.powf(m)))
}

/// `P{B ≤ x}` for `B ~ Binomial(trials, p)`, summed in log space.
pub fn binomial_cdf(trials: u64, p: f64, x: f64) -> Result<f64> {
    ensure_arg!((0.0..=1.0).contains(&p), "p must be in [0, 1], got {p}");
    if x < 0.0 {
        return Ok(0.0);
    }
    let k_max = x.floor() as u64;
    if k_max >= trials || p == 0.0 {
        return Ok(1.0);
    }
    if p == 1.0 {
        return Ok(0.0);
    }
    let (lp, lq) = (p.ln(), (-p).ln_1p());
    let logs: Vec<f64> = (0..=k_max)
        .map(|k| ln_binomial(trials, k) + k as f64 * lp + (trials - k) as f64 * lq)
        .collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = logs.iter().map(|l| (l - top).exp()).sum();
    Ok((top + s.ln()).exp().min(1.0))
}

pub fn binomial_pmf(trials: u64, p: f64, k: u64) -> f64 {
    if k > trials {
        return 0.0;
    }
    if p == 0.0 || p == 1.0 {
        let at = if p == 0.0 { 0 } else { trials };
        return if k == at { 1.0 } else { 0.0 };
    }
    (ln_binomial(trials, k) + k as f64 * p.ln() + (trials - k) as f64 * (-p).ln_1p()).exp()
}

/// Lower-tail Chernoff bound `exp(-(np - x)² / (2np))`.
pub fn binomial_chernoff_tail(trials: u64, p: f64, x: f64) -> Result<f64> {
    ensure_arg!((0.0..=1.0).contains(&p), "p must be in [0, 1], got {p}");
    let mean = trials as f64 * p;
    ensure_arg!(x >= 0.0 && x <= mean, "x must be in [0, np] = [0, {mean}], got {x}");
    Ok((-(mean - x).powi(2) / (2.0 * mean)).exp())
}

/// The algebraic relaxation `2(3n / (n - 2 - 3γn))² / r²` of the Chernoff term.
pub fn chernoff_relaxed(n: u64, gamma: f64, r: f64) -> Result<f64> {
    ensure_gamma(gamma)?;
    let nf = n as f64;
    let denom = nf - 2.0 - 3.0 * gamma * nf;
    ensure_arg!(denom > 0.0, "n = {n} too small for gamma = {gamma}");
    Ok(2.0 * (3.0 * nf / denom).powi(2) / (r * r))
}

fn ensure_gamma(gamma: f64) -> Result<()> {
    ensure_arg!(gamma > 0.0 && gamma < 1.0 / 3.0, "gamma must be in (0, 1/3), got {gamma}");
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinomialTail {
    Exact,
    /// Chernoff surrogate; falls back to 1 when the threshold exceeds the mean.
    Chernoff,
}

/// Upper bound on the i.i.d. two-hop delay, given the relay-count binomial
/// with success probability `1 - p_out` over `n - 2` nodes.
pub fn iid_delay_bound(
    n: u64,
    r: f64,
    p_hat: f64,
    p_out: f64,
    gamma: f64,
    u_bar_fn: &dyn Fn(u32) -> Result<f64>,
    tail: BinomialTail,
) -> Result<f64> {
    ensure_gamma(gamma)?;
    ensure_arg!(n >= 2, "need at least two nodes");
    ensure_arg!(
        n as f64 >= 2.0 / (1.0 - 3.0 * gamma),
        "n = {n} below the Chernoff threshold 2/(1 - 3 gamma)"
    );
    ensure_arg!((0.0..=1.0).contains(&p_hat) && (0.0..=1.0).contains(&p_out), "probabilities must be in [0, 1]");
    if p_out == 0.0 {
        return Ok(0.0);
    }
    let m_gamma = (gamma * r * r).ceil().max(1.0) as u32;
    let x = f64::from(m_gamma) - 2.0;
    let trials = n - 2;
    let q = 1.0 - p_out;
    let tail_prob = match tail {
        BinomialTail::Exact => binomial_cdf(trials, q, x)?,
        BinomialTail::Chernoff if x < 0.0 => 0.0,
        BinomialTail::Chernoff if x <= trials as f64 * q => binomial_chernoff_tail(trials, q, x)?,
        BinomialTail::Chernoff => 1.0,
    };
    Ok(p_out + p_out * u_bar_fn(1)? * tail_prob + p_out * u_bar_fn(m_gamma)?)
}

/// Bound on `E⌈T⌉` from the geometric CCDF domination.
pub fn levy_delay_upper(p_hat: f64, p_out: f64) -> Result<f64> {
    ensure_arg!((0.0..1.0).contains(&p_hat), "p_hat must be in [0, 1), got {p_hat}");
    ensure_arg!((0.0..=1.0).contains(&p_out), "p_out must be in [0, 1], got {p_out}");
    Ok(p_out / (1.0 - p_hat))
}

/// `(1 - a/n)^k` evaluated through `ln_1p`.
fn pow_one_minus(frac: f64, k: f64) -> f64 {
    (k * (-frac).ln_1p()).exp()
}

/// Probability that a cell holding a fraction `a/n` of the area has at least
/// two of `n` uniform nodes.
pub fn occupancy_b_n(n: u64, a: f64) -> Result<f64> {
    ensure_arg!(n >= 2, "need at least two nodes");
    let nf = n as f64;
    ensure_arg!(a > 0.0 && a <= nf, "cell size a must be in (0, n], got {a}");
    let f = a / nf;
    Ok(1.0 - pow_one_minus(f, nf) - a * pow_one_minus(f, nf - 1.0))
}

/// Per-node throughput of the two-hop scheme with range `n^β`.
pub fn capacity_per_node(n: u64, beta: f64) -> Result<f64> {
    ensure_beta(beta)?;
    ensure_arg!(n >= 2, "need at least two nodes");
    let nf = n as f64;
    let scale = nf.powf(-2.0 * beta);
    let f = nf.powf(2.0 * beta - 1.0);
    Ok(scale - scale * pow_one_minus(f, nf) - pow_one_minus(f, nf - 1.0))
}

/// `λ / n^{-2β}`; tends to `1 - 2/e` at β = 0 and to 1 for β > 0.
pub fn capacity_limit_ratio(n: u64, beta: f64) -> Result<f64> {
    Ok(capacity_per_node(n, beta)? * (n as f64).powf(2.0 * beta))
}

/// Monte Carlo of [`occupancy_b_n`] with `a = n^{2β}`: square cells of area
/// `πa` tiling the disc of area `πn`, only cells wholly inside the disc counted.
/// The estimate is the mean per-placement fraction of cells holding two or more
/// nodes, with the standard error across placements.
pub fn estimate_occupancy_mc(seed: StreamSeed, n: u64, beta: f64, placements: u64) -> Result<Estimate> {
    ensure_beta(beta)?;
    ensure_arg!(n >= 2 && placements >= 2, "need n >= 2 and at least two placements");
    let radius = sqrt_n(n);
    let side = (PI * (n as f64).powf(2.0 * beta)).sqrt();
    let cells_per_axis = (2.0 * radius / side).floor() as i64 + 2;
    let offset = cells_per_axis as f64 * side / 2.0;
    let inside: Vec<bool> = (0..cells_per_axis * cells_per_axis)
        .map(|c| {
            let (i, j) = (c % cells_per_axis, c / cells_per_axis);
            let x0 = i as f64 * side - offset;
            let y0 = j as f64 * side - offset;
            [(x0, y0), (x0 + side, y0), (x0, y0 + side), (x0 + side, y0 + side)]
                .iter()
                .all(|&(x, y)| x.hypot(y) <= radius)
        })
        .collect();
    let usable = inside.iter().filter(|&&b| b).count();
    ensure_arg!(usable > 0, "no cell of side {side} fits inside the disc");
    let fractions = parallel_trials(seed, placements, |trial| {
        let mut rng = trial.node(0);
        let mut counts = vec![0u32; inside.len()];
        for _ in 0..n {
            let p = uniform_point_in_disc(&mut rng, radius).expect("positive radius");
            let i = ((p.x + offset) / side).floor() as i64;
            let j = ((p.y + offset) / side).floor() as i64;
            if (0..cells_per_axis).contains(&i) && (0..cells_per_axis).contains(&j) {
                counts[(j * cells_per_axis + i) as usize] += 1;
            }
        }
        let crowded = counts.iter().zip(&inside).filter(|&(&c, &ok)| ok && c >= 2).count();
        crowded as f64 / usable as f64
    });
    Ok(Estimate::from_values(&fractions))
}

pub fn asin_envelope(x: f64) -> Result<(f64, f64)> {
    ensure_arg!((0.0..=1.0).contains(&x), "x must be in [0, 1], got {x}");
    Ok((x, PI / 2.0 * x))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TradeoffModel {
    Levy { alpha: f64 },
    Iid,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TradeoffPoint {
    /// Throughput order `λ = n^{-η}`.
    pub eta: f64,
    /// Range exponent with `r = n^β`, `β = η/2`.
    pub beta: f64,
    /// Delay order `D = O(n^e)`.
    pub delay_exponent: f64,
}

impl TradeoffPoint {
    pub fn delay_order(&self, n: f64) -> f64 {
        n.powf(self.delay_exponent)
    }

    pub fn lambda_order(&self, n: f64) -> f64 {
        n.powf(-self.eta)
    }
}

/// Delay-throughput envelope for throughput orders `n^{-η}`, `η ∈ [0, 1/2]`.
pub fn tradeoff_curve(model: TradeoffModel, eta_grid: &[f64]) -> Result<Vec<TradeoffPoint>> {
    if let TradeoffModel::Levy { alpha } = model {
        ensure_arg!(alpha > 0.0 && alpha <= 2.0, "alpha must be in (0, 2], got {alpha}");
    }
    eta_grid
        .iter()
        .map(|&eta| {
            ensure_arg!((0.0..=0.5).contains(&eta), "eta must be in [0, 0.5], got {eta}");
            let delay_exponent = match model {
                TradeoffModel::Levy { alpha } => 0.5 * (1.0 + alpha - eta).min(2.0),
                TradeoffModel::Iid => 0.5 * (1.0 - 3.0 * eta).max(0.0),
            };
            Ok(TradeoffPoint { eta, beta: eta / 2.0, delay_exponent })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct H1Entry {
    pub l0: f64,
    pub value: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub model: String,
    pub n: u64,
    pub r: f64,
    pub p_out_lower: f64,
    pub p_out_upper: f64,
    pub p_out_mc: Estimate,
    pub p_hat_lower: f64,
    pub p_hat_upper: f64,
    pub p_hat_mc: Estimate,
    pub h1_mc: Option<Vec<H1Entry>>,
    pub u_bar: BTreeMap<u32, f64>,
    pub delay_upper: f64,
    pub capacity_lambda: Option<f64>,
    pub n_th_note: String,
}

pub const REPORT_GAMMA: f64 = 0.1;

pub fn compute_bound_report(cfg: &ModelConfig, mc_trials: u64, seed: StreamSeed) -> Result<BoundReport> {
    cfg.validate()?;
    let (n, r) = (cfg.n, cfg.r);
    let (p_out_lower, p_out_upper) = p_out_bounds(n, r)?;
    let (p_hat_lower, p_hat_upper, note) = match &cfg.model {
        Mobility::LevyFlight(law) => {
            let tail = cosine_diff_tail_constants(law.alpha, law.tail_c)?;
            let b = p_hat_bounds_levy(n, r, &tail, law.alpha)?;
            (b.lower, b.upper, b.n_th_caveat)
        }
        Mobility::Iid => {
            let (lo, hi) = p_hat_bounds_iid(n, r)?;
            (lo, hi, "i.i.d. bounds hold for every n".to_string())
        }
    };
    let p_out_mc = estimate_p_out_mc(seed.derive("p_out"), n, r, mc_trials)?;
    let p_hat_mc = estimate_p_hat_mc(seed.derive("p_hat"), &cfg.model, n, r, mc_trials)?;
    let diameter = 2.0 * sqrt_n(n);
    let h1 = [1.5 * r, 3.0 * r]
        .into_iter()
        .filter(|&l| l < diameter)
        .enumerate()
        .map(|(i, l0)| {
            let e = estimate_h1_mc(seed.derive("h1").derive_index(i as u64), &cfg.model, n, r, l0, mc_trials)?;
            Ok(H1Entry { l0, value: e.value, stderr: e.stderr })
        })
        .chain(std::iter::once(Ok(H1Entry { l0: diameter, value: p_hat_mc.value, stderr: p_hat_mc.stderr })))
        .collect::<Result<Vec<_>>>()?;
    let m_gamma = (REPORT_GAMMA * r * r).ceil().max(1.0) as u32;
    let mut u_bar = BTreeMap::new();
    let mut m = 1u32;
    while u64::from(m) < n && m <= 1024 {
        u_bar.insert(m, u_bar_bound(m, p_hat_upper, p_out_upper)?);
        m *= 2;
    }
    u_bar.insert(m_gamma, u_bar_bound(m_gamma, p_hat_upper, p_out_upper)?);
    let delay_upper = match cfg.model {
        Mobility::Iid => iid_delay_bound(
            n,
            r,
            p_hat_upper,
            p_out_upper,
            REPORT_GAMMA,
            &|m| u_bar_bound(m, p_hat_upper, p_out_upper),
            BinomialTail::Exact,
        )?,
        Mobility::LevyFlight(_) => levy_delay_upper(p_hat_upper, p_out_upper)?,
    };
    let capacity_lambda = if n >= 2 {
        let beta = r.ln() / (n as f64).ln();
        (0.0..=0.25).contains(&beta).then(|| capacity_per_node(n, beta)).transpose()?
    } else {
        None
    };
    Ok(BoundReport {
        model: cfg.model.name().to_string(),
        n,
        r,
        p_out_lower,
        p_out_upper,
        p_out_mc,
        p_hat_lower,
        p_hat_upper,
        p_hat_mc,
        h1_mc: Some(h1),
        u_bar,
        delay_upper,
        capacity_lambda,
        n_th_note: note,
    })
}
