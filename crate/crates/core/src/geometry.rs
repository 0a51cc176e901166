//! Planar primitives on the wrapped disc of radius `√n`.
//!
//! The disc wraps antipodally: a path leaving through boundary point `p`
//! re-enters at `-p` with the same heading. After the first exit such a path
//! is periodic, alternating between two parallel chords of equal length, which
//! [`WrappedPath`] exploits to represent arbitrarily long flights in O(1).

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_arg, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_polar(radius: f64, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(radius * c, radius * s)
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    /// Rotation about the origin by `angle` radians.
    pub fn rotate(self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// `(1-δ)·self + δ·other`
    pub fn lerp(self, other: Point2, delta: f64) -> Self {
        self + (other - self) * delta
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, k: f64) -> Point2 {
        Point2::new(self.x * k, self.y * k)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

/// Relative slack used when checking that a point lies in the closed disc.
pub const DISC_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscWorld {
    pub n: u64,
    pub radius: f64,
}

impl DiscWorld {
    pub fn new(n: u64) -> Result<Self> {
        ensure_arg!(n >= 1, "n must be a positive integer, got {n}");
        Ok(Self { n, radius: (n as f64).sqrt() })
    }

    /// Largest possible distance between two nodes.
    pub fn diameter(&self) -> f64 {
        2.0 * self.radius
    }

    pub fn contains(&self, p: Point2) -> bool {
        p.norm() <= self.radius * (1.0 + DISC_TOLERANCE)
    }
}

/// One straight piece of a slot's motion, covering slot time `[t_begin, t_end]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubSegment {
    pub start: Point2,
    pub end: Point2,
    pub t_begin: f64,
    pub t_end: f64,
}

impl SubSegment {
    pub fn new(start: Point2, end: Point2, t_begin: f64, t_end: f64) -> Self {
        Self { start, end, t_begin, t_end }
    }

    /// Position at slot time `t`, which must lie in this piece's interval.
    pub fn at(&self, t: f64) -> Point2 {
        let span = self.t_end - self.t_begin;
        if span <= 0.0 {
            return self.start;
        }
        let local = ((t - self.t_begin) / span).clamp(0.0, 1.0);
        self.start.lerp(self.end, local)
    }

    pub fn length(&self) -> f64 {
        self.start.dist(self.end)
    }
}

pub fn uniform_point_in_disc<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> Result<Point2> {
    ensure_arg!(radius > 0.0 && radius.is_finite(), "radius must be positive, got {radius}");
    let rho = radius * rng.random::<f64>().sqrt();
    let angle = 2.0 * PI * rng.random::<f64>();
    Ok(Point2::from_polar(rho, angle))
}

/// Minimiser of `|a + δ(b-a) - q|` over `δ ∈ [0,1]`.
fn closest_param(a: Point2, b: Point2, q: Point2) -> f64 {
    let d = b - a;
    let len_sq = d.norm_sq();
    if len_sq == 0.0 {
        return 0.0;
    }
    ((q - a).dot(d) / len_sq).clamp(0.0, 1.0)
}

pub fn min_dist_segment_to_point(a: Point2, b: Point2, q: Point2) -> f64 {
    let delta = closest_param(a, b, q);
    a.lerp(b, delta).dist(q)
}

pub fn segment_hits_disc(a: Point2, b: Point2, center: Point2, r: f64) -> Result<bool> {
    ensure_arg!(r >= 0.0, "range r must be nonnegative, got {r}");
    Ok(min_dist_segment_to_point(a, b, center) <= r)
}

/// Earliest `δ ∈ [0,1]` with `|a + δ(b-a) - center| ≤ r`, or `None` when the
/// segment misses the closed disc. Agrees with [`segment_hits_disc`].
pub fn first_contact_param(a: Point2, b: Point2, center: Point2, r: f64) -> Option<f64> {
    let w = a - center;
    let c = w.norm_sq() - r * r;
    if c <= 0.0 {
        return Some(0.0);
    }
    if min_dist_segment_to_point(a, b, center) > r {
        return None;
    }
    let d = b - a;
    let qa = d.norm_sq();
    let qb = w.dot(d);
    let disc = qb * qb - qa * c;
    let delta = if disc >= 0.0 { (-qb - disc.sqrt()) / qa } else { -qb / qa };
    Some(delta.clamp(0.0, 1.0))
}

fn orientation(a: Point2, b: Point2, c: Point2) -> f64 {
    (b - a).cross(c - a)
}

/// Euclidean distance between two closed segments.
pub fn segment_segment_distance(a0: Point2, a1: Point2, b0: Point2, b1: Point2) -> f64 {
    let o1 = orientation(a0, a1, b0);
    let o2 = orientation(a0, a1, b1);
    let o3 = orientation(b0, b1, a0);
    let o4 = orientation(b0, b1, a1);
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return 0.0;
    }
    min_dist_segment_to_point(a0, a1, b0)
        .min(min_dist_segment_to_point(a0, a1, b1))
        .min(min_dist_segment_to_point(b0, b1, a0))
        .min(min_dist_segment_to_point(b0, b1, a1))
}

/// Earliest `δ ∈ [0,1]` at which `p0 + δ(p1-p0)` comes within `r` of the
/// static segment `c0c1`, i.e. enters the capsule around it.
pub fn first_entry_capsule(p0: Point2, p1: Point2, c0: Point2, c1: Point2, r: f64) -> Option<f64> {
    let mut best = first_contact_param(p0, p1, c0, r);
    let keep = |best: &mut Option<f64>, cand: Option<f64>| {
        if let Some(t) = cand {
            *best = Some(best.map_or(t, |b| b.min(t)));
        }
    };
    keep(&mut best, first_contact_param(p0, p1, c1, r));
    let axis = c1 - c0;
    let len = axis.norm();
    if len > 0.0 {
        let u = axis * (1.0 / len);
        let v = Point2::new(-u.y, u.x);
        let rel = p0 - c0;
        let d = p1 - p0;
        let (pu, pv) = (rel.dot(u), rel.dot(v));
        let (du, dv) = (d.dot(u), d.dot(v));
        // Liang-Barsky clip against 0 ≤ u ≤ len, |v| ≤ r.
        let mut lo: f64 = 0.0;
        let mut hi: f64 = 1.0;
        let mut inside = true;
        for (p, q) in [(-du, pu), (du, len - pu), (-dv, pv + r), (dv, r - pv)] {
            if p == 0.0 {
                if q < 0.0 {
                    inside = false;
                }
            } else {
                let t = q / p;
                if p < 0.0 {
                    lo = lo.max(t);
                } else {
                    hi = hi.min(t);
                }
            }
        }
        if inside && lo <= hi {
            keep(&mut best, Some(lo));
        }
    }
    best
}

/// Membership in `S(l0)`: the segment from the origin to `x` misses the disc
/// of radius `r` centred at `(0, -l0)`.
pub fn in_s(l0: f64, x: Point2, r: f64) -> Result<bool> {
    in_s_rotated(l0, PI / 2.0, x, r)
}

/// `S(l0, θ)`: as [`in_s`] with the obstruction centred at `-l0·(cos θ, sin θ)`.
pub fn in_s_rotated(l0: f64, theta: f64, x: Point2, r: f64) -> Result<bool> {
    ensure_anchor(l0, r)?;
    let center = -Point2::from_polar(l0, theta);
    Ok(!segment_hits_disc(Point2::ORIGIN, x, center, r)?)
}

/// Membership in `S*(l0)`: the segment from `(0, l0)` to `x` misses the disc
/// of radius `r` around the origin.
pub fn in_s_star(l0: f64, x: Point2, r: f64) -> Result<bool> {
    in_s_star_rotated(l0, PI / 2.0, x, r)
}

/// `S*(l0, θ)`: as [`in_s_star`] with the segment anchored at `l0·(cos θ, sin θ)`.
pub fn in_s_star_rotated(l0: f64, theta: f64, x: Point2, r: f64) -> Result<bool> {
    ensure_anchor(l0, r)?;
    let anchor = Point2::from_polar(l0, theta);
    Ok(!segment_hits_disc(anchor, x, Point2::ORIGIN, r)?)
}

fn ensure_anchor(l0: f64, r: f64) -> Result<()> {
    ensure_arg!(r >= 0.0, "range r must be nonnegative, got {r}");
    ensure_arg!(l0 > r, "anchor distance l0={l0} must exceed r={r}");
    Ok(())
}

/// Angle of the arc of radius `x_mag` whose points lie in `S*(2√n)`.
pub fn central_angle_phi(x_mag: f64, r: f64, n: u64) -> Result<f64> {
    ensure_arg!(n >= 1, "n must be positive");
    ensure_arg!(r >= 0.0, "range r must be nonnegative, got {r}");
    ensure_arg!(x_mag > r, "|x|={x_mag} must exceed r={r}");
    let diameter = 2.0 * (n as f64).sqrt();
    ensure_arg!(
        x_mag <= diameter * (1.0 + 1e-12),
        "|x|={x_mag} must not exceed the diameter {diameter}"
    );
    Ok(2.0 * PI - 2.0 * (r / diameter).asin() - 2.0 * (r / x_mag).asin())
}

/// Paths with more full chords than this are not enumerated piece by piece.
pub const MAX_ENUMERATED_CHORDS: u64 = 100_000;

#[derive(Clone, Copy, Debug, PartialEq)]
struct ChordLoop {
    /// Re-entry point after the first exit; chord A runs from here.
    a_start: Point2,
    /// Far end of chord A; chord B runs from `-a_end` back to the first exit point.
    a_end: Point2,
    chord_len: f64,
    full_chords: u64,
    remainder: f64,
}

/// Motion of one node during one slot, as a lazily enumerated sequence of
/// straight pieces.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WrappedPath {
    start: Point2,
    dir: Point2,
    length: f64,
    first_len: f64,
    chords: Option<ChordLoop>,
    parked: bool,
    end: Point2,
}

impl WrappedPath {
    /// Straight motion that never leaves the disc.
    pub fn linear(start: Point2, end: Point2) -> Self {
        let d = end - start;
        let length = d.norm();
        let dir = if length > 0.0 { d * (1.0 / length) } else { Point2::new(1.0, 0.0) };
        Self { start, dir, length, first_len: length, chords: None, parked: false, end }
    }

    pub fn new(start: Point2, displacement: Point2, world: &DiscWorld) -> Result<Self> {
        ensure_arg!(start.is_finite() && displacement.is_finite(), "non-finite flight");
        ensure_arg!(
            world.contains(start),
            "start ({}, {}) lies outside the disc of radius {}",
            start.x,
            start.y,
            world.radius
        );
        let length = displacement.norm();
        if length == 0.0 {
            return Ok(Self::linear(start, start));
        }
        let radius = world.radius;
        let dir = displacement * (1.0 / length);
        let pu = start.dot(dir);
        let to_exit = (-pu + (pu * pu + radius * radius - start.norm_sq()).max(0.0).sqrt()).max(0.0);
        if to_exit >= length {
            return Ok(Self::linear(start, start + displacement));
        }
        let exit = start + dir * to_exit;
        let exit = exit * (radius / exit.norm());
        let a_start = -exit;
        let chord_len = 2.0 * exit.dot(dir).max(0.0);
        let rest = length - to_exit;
        if chord_len <= 1e-12 * radius {
            // Tangential exit: the node stays at the re-entry point.
            return Ok(Self {
                start,
                dir,
                length,
                first_len: to_exit,
                chords: Some(ChordLoop {
                    a_start,
                    a_end: a_start,
                    chord_len: 0.0,
                    full_chords: 0,
                    remainder: rest,
                }),
                parked: true,
                end: a_start,
            });
        }
        let a_end = a_start + dir * chord_len;
        let remainder = rest % chord_len;
        let full_f = ((rest - remainder) / chord_len).round();
        let full_chords = if full_f >= u64::MAX as f64 { u64::MAX } else { full_f as u64 };
        let chords = ChordLoop { a_start, a_end, chord_len, full_chords, remainder };
        let end = if remainder > 0.0 {
            chord_start(&chords, full_chords) + dir * remainder
        } else {
            chord_finish(&chords, full_chords - 1, exit)
        };
        Ok(Self { start, dir, length, first_len: to_exit, chords: Some(chords), parked: false, end })
    }

    pub fn start(&self) -> Point2 {
        self.start
    }

    pub fn end(&self) -> Point2 {
        self.end
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn wraps(&self) -> bool {
        self.chords.is_some()
    }

    /// True when the path loops too often to enumerate; contact checks then
    /// treat the loop as swept instantaneously.
    pub fn is_fast_loop(&self) -> bool {
        matches!(self.chords, Some(c) if !self.parked && c.full_chords > MAX_ENUMERATED_CHORDS)
    }

    /// Slot time at which the first exit happens (1 when there is none).
    pub fn first_exit_time(&self) -> f64 {
        if self.chords.is_some() {
            self.first_len / self.length
        } else {
            1.0
        }
    }

    pub fn first_piece(&self) -> Option<SubSegment> {
        match self.chords {
            None => Some(SubSegment::new(self.start, self.end, 0.0, 1.0)),
            Some(_) if self.first_len > 0.0 => Some(SubSegment::new(
                self.start,
                self.start + self.dir * self.first_len,
                0.0,
                self.first_exit_time(),
            )),
            Some(_) => None,
        }
    }

    /// Straight segments whose union contains every point visited in the slot.
    pub fn trace(&self) -> Vec<(Point2, Point2)> {
        let mut out = Vec::with_capacity(3);
        if let Some(p) = self.first_piece() {
            out.push((p.start, p.end));
        }
        if let Some(c) = self.chords {
            out.push((c.a_start, c.a_end));
            if !self.parked {
                out.push((-c.a_end, -c.a_start));
            }
        }
        out
    }

    /// The two chords of the periodic part, if any.
    pub fn loop_chords(&self) -> Option<[(Point2, Point2); 2]> {
        self.chords.filter(|_| !self.parked).map(|c| [(c.a_start, c.a_end), (-c.a_end, -c.a_start)])
    }

    pub fn piece_count(&self) -> u64 {
        match self.chords {
            None => 1,
            Some(c) => {
                let first = u64::from(self.first_len > 0.0);
                if self.parked {
                    first + 1
                } else {
                    first.saturating_add(c.full_chords).saturating_add(u64::from(c.remainder > 0.0))
                }
            }
        }
    }

    pub fn pieces(&self) -> Pieces<'_> {
        Pieces { path: self, next: 0, total: self.piece_count() }
    }

    pub fn to_sub_segments(&self) -> Result<Vec<SubSegment>> {
        ensure_arg!(
            !self.is_fast_loop(),
            "flight of length {} wraps too many times to enumerate",
            self.length
        );
        Ok(self.pieces().collect())
    }
}

fn chord_start(c: &ChordLoop, index: u64) -> Point2 {
    if index.is_multiple_of(2) {
        c.a_start
    } else {
        -c.a_end
    }
}

fn chord_finish(c: &ChordLoop, index: u64, exit: Point2) -> Point2 {
    if index.is_multiple_of(2) {
        c.a_end
    } else {
        exit
    }
}

pub struct Pieces<'a> {
    path: &'a WrappedPath,
    next: u64,
    total: u64,
}

impl Iterator for Pieces<'_> {
    type Item = SubSegment;

    fn next(&mut self) -> Option<SubSegment> {
        if self.next >= self.total {
            return None;
        }
        let p = self.path;
        let index = self.next;
        self.next += 1;
        let Some(c) = p.chords else {
            return Some(SubSegment::new(p.start, p.end, 0.0, 1.0));
        };
        let has_first = p.first_len > 0.0;
        if has_first && index == 0 {
            return p.first_piece();
        }
        let t_first = p.first_exit_time();
        if p.parked {
            return Some(SubSegment::new(c.a_start, c.a_start, t_first, 1.0));
        }
        let k = index - u64::from(has_first);
        let s_begin = p.first_len + k as f64 * c.chord_len;
        let t_begin = if k == 0 { t_first } else { s_begin / p.length };
        let from = chord_start(&c, k);
        let last = self.next == self.total;
        let (to, t_end) = if last {
            (p.end, 1.0)
        } else {
            (from + p.dir * c.chord_len, (s_begin + c.chord_len) / p.length)
        };
        Some(SubSegment::new(from, to, t_begin, t_end))
    }
}

/// Splits one flight into pieces at every antipodal wrap.
pub fn wrap_flight(start: Point2, displacement: Point2, world: &DiscWorld) -> Result<Vec<SubSegment>> {
    WrappedPath::new(start, displacement, world)?.to_sub_segments()
}
