//! Flight sampling for the Lévy model, i.i.d. relocation and intra-slot
//! interpolation.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_arg, Result};
use crate::geometry::{uniform_point_in_disc, DiscWorld, Point2, SubSegment, WrappedPath};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerKind {
    Stable,
    TruncatedPareto,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlightLaw {
    pub alpha: f64,
    pub scale_s: f64,
    /// Constant of the power-law tail `P{Z > z} = c / z^α`.
    pub tail_c: f64,
    pub z_th: f64,
    pub sampler: SamplerKind,
}

pub const DEFAULT_Z_TH: f64 = 1.0;
pub const DEFAULT_SCALE: f64 = 1.0;

impl FlightLaw {
    /// Pareto lengths with all mass above `z_th`, so `tail_c = z_th^α`.
    pub fn truncated_pareto(alpha: f64, z_th: f64) -> Result<Self> {
        let law = Self {
            alpha,
            scale_s: DEFAULT_SCALE,
            tail_c: z_th.powf(alpha),
            z_th,
            sampler: SamplerKind::TruncatedPareto,
        };
        law.validate()?;
        Ok(law)
    }

    /// `|Z*|` for symmetric stable `Z*` with characteristic function `exp(-|st|^α)`.
    /// The tail constant is the asymptotic one; at α = 2 there is no power tail
    /// and it is set to 1 for bookkeeping only.
    pub fn stable(alpha: f64, scale_s: f64) -> Result<Self> {
        ensure_alpha(alpha)?;
        let tail_c = if alpha < 2.0 {
            2.0 / PI * statrs::function::gamma::gamma(alpha) * (PI * alpha / 2.0).sin() * scale_s.powf(alpha)
        } else {
            1.0
        };
        let law = Self { alpha, scale_s, tail_c, z_th: DEFAULT_Z_TH, sampler: SamplerKind::Stable };
        law.validate()?;
        Ok(law)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_alpha(self.alpha)?;
        ensure_arg!(self.scale_s > 0.0 && self.scale_s.is_finite(), "scale s must be positive, got {}", self.scale_s);
        ensure_arg!(self.tail_c > 0.0 && self.tail_c.is_finite(), "tail constant c must be positive, got {}", self.tail_c);
        ensure_arg!(self.z_th > 0.0 && self.z_th.is_finite(), "z_th must be positive, got {}", self.z_th);
        if self.sampler == SamplerKind::TruncatedPareto {
            let expect = self.z_th.powf(self.alpha);
            ensure_arg!(
                (self.tail_c - expect).abs() <= 1e-12 * expect,
                "truncated Pareto requires c = z_th^alpha = {expect}, got {}",
                self.tail_c
            );
        }
        Ok(())
    }

    /// `P{Z > z}` for the truncated Pareto law; `None` for the stable sampler.
    pub fn pareto_ccdf(&self, z: f64) -> Option<f64> {
        match self.sampler {
            SamplerKind::TruncatedPareto if z <= self.z_th => Some(1.0),
            SamplerKind::TruncatedPareto => Some(self.tail_c / z.powf(self.alpha)),
            SamplerKind::Stable => None,
        }
    }
}

fn ensure_alpha(alpha: f64) -> Result<()> {
    ensure_arg!(alpha > 0.0 && alpha <= 2.0, "alpha must be in (0, 2], got {alpha}");
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Flight {
    pub angle_theta: f64,
    pub length_z: f64,
    pub vector_v: Point2,
}

impl Flight {
    pub fn new(angle_theta: f64, length_z: f64) -> Self {
        Self { angle_theta, length_z, vector_v: Point2::from_polar(length_z, angle_theta) }
    }
}

/// Uniform on `(0, 1]`.
fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

/// Chambers-Mallows-Stuck draw of a symmetric stable variable.
pub fn sample_stable_symmetric<R: Rng + ?Sized>(rng: &mut R, alpha: f64, scale_s: f64) -> Result<f64> {
    ensure_alpha(alpha)?;
    ensure_arg!(scale_s > 0.0, "scale s must be positive, got {scale_s}");
    let v = loop {
        let v = PI * (rng.random::<f64>() - 0.5);
        if v > -PI / 2.0 {
            break v;
        }
    };
    let w: f64 = rng.sample(Exp1);
    let x = if alpha == 1.0 {
        v.tan()
    } else {
        let a = (alpha * v).sin() / v.cos().powf(1.0 / alpha);
        let b = ((v - alpha * v).cos() / w).powf((1.0 - alpha) / alpha);
        a * b
    };
    Ok(scale_s * x)
}

pub fn sample_flight_length<R: Rng + ?Sized>(rng: &mut R, law: &FlightLaw) -> f64 {
    match law.sampler {
        SamplerKind::TruncatedPareto => law.z_th * open_unit(rng).powf(-1.0 / law.alpha),
        SamplerKind::Stable => sample_stable_symmetric(rng, law.alpha, law.scale_s)
            .expect("validated law")
            .abs(),
    }
}

pub fn sample_flight<R: Rng + ?Sized>(rng: &mut R, law: &FlightLaw) -> Flight {
    let angle = 2.0 * PI * open_unit(rng);
    let length = sample_flight_length(rng, law);
    Flight::new(angle, length)
}

/// Pieces of one Lévy slot starting at `x_prev`.
pub fn next_position_levy(x_prev: Point2, flight: &Flight, world: &DiscWorld) -> Result<Vec<SubSegment>> {
    levy_path(x_prev, flight, world)?.to_sub_segments()
}

/// Lazy form of [`next_position_levy`], usable for arbitrarily long flights.
pub fn levy_path(x_prev: Point2, flight: &Flight, world: &DiscWorld) -> Result<WrappedPath> {
    WrappedPath::new(x_prev, flight.vector_v, world)
}

pub fn next_position_iid<R: Rng + ?Sized>(rng: &mut R, world: &DiscWorld) -> Point2 {
    uniform_point_in_disc(rng, world.radius).expect("world radius is positive")
}

pub fn interpolate(x_prev: Point2, x_next: Point2, delta: f64) -> Result<Point2> {
    ensure_arg!((0.0..=1.0).contains(&delta), "delta must be in [0, 1], got {delta}");
    Ok(x_prev.lerp(x_next, delta))
}
