//! Meeting-process and two-hop delay simulation.
//!
//! Every node owns one random stream (`TrialStreams::node(i)`): its initial
//! position is the first draw and all its later flights come from the same
//! stream. Node `i` therefore follows the same trajectory whether it is
//! simulated alone, in a pair, or as one relay among many.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_arg, Result};
use crate::flight::{levy_path, next_position_iid, sample_flight, FlightLaw};
use crate::geometry::{
    first_contact_param, first_entry_capsule, segment_hits_disc, segment_segment_distance,
    uniform_point_in_disc, DiscWorld, Point2, SubSegment, WrappedPath,
};
use crate::streams::{Stream, TrialStreams, DEFAULT_SEED};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mobility {
    LevyFlight(FlightLaw),
    Iid,
}

impl Mobility {
    pub fn name(&self) -> &'static str {
        match self {
            Mobility::LevyFlight(_) => "levy",
            Mobility::Iid => "iid",
        }
    }

    pub fn default_horizon(&self) -> u32 {
        match self {
            Mobility::LevyFlight(_) => 10_000,
            Mobility::Iid => 1_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub n: u64,
    pub r: f64,
    pub model: Mobility,
    pub horizon_slots: u32,
    pub master_seed: u64,
}

impl ModelConfig {
    pub fn new(n: u64, r: f64, model: Mobility) -> Result<Self> {
        let cfg = Self { n, r, model, horizon_slots: model.default_horizon(), master_seed: DEFAULT_SEED };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Range `r = n^β`, with `β ∈ [0, 1/4]`.
    pub fn with_beta(n: u64, beta: f64, model: Mobility) -> Result<Self> {
        ensure_beta(beta)?;
        Self::new(n, (n as f64).powf(beta), model)
    }

    pub fn horizon(mut self, slots: u32) -> Self {
        self.horizon_slots = slots;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        ensure_arg!(self.n >= 1, "n must be a positive integer");
        ensure_arg!(self.r > 0.0 && self.r.is_finite(), "range r must be positive, got {}", self.r);
        ensure_arg!(self.horizon_slots >= 1, "horizon must be at least one slot");
        if let Mobility::LevyFlight(law) = &self.model {
            law.validate()?;
        }
        Ok(())
    }

    pub fn world(&self) -> DiscWorld {
        DiscWorld::new(self.n).expect("validated n")
    }
}

pub fn ensure_beta(beta: f64) -> Result<()> {
    ensure_arg!((0.0..=0.25).contains(&beta), "beta must be in [0, 0.25], got {beta}");
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeetingTime {
    Met(f64),
    Censored { horizon: u32 },
}

impl MeetingTime {
    pub fn value(&self) -> Option<f64> {
        match self {
            MeetingTime::Met(t) => Some(*t),
            MeetingTime::Censored { .. } => None,
        }
    }

    pub fn is_censored(&self) -> bool {
        matches!(self, MeetingTime::Censored { .. })
    }

    /// The value, with censored samples replaced by their horizon.
    pub fn value_or_horizon(&self) -> f64 {
        match self {
            MeetingTime::Met(t) => *t,
            MeetingTime::Censored { horizon } => f64::from(*horizon),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeetingSample {
    pub initial_distance: f64,
    pub meeting_time: MeetingTime,
    pub met_at_t0: bool,
    /// Slot `k ≥ 1` whose indicator fired, `Some(0)` for a meeting at `t = 0`,
    /// `None` when censored. Equals `⌈T⌉`.
    pub contact_slot: Option<u32>,
    pub slots_observed: u32,
}

impl MeetingSample {
    /// Indicators `I(1), I(2), …` up to and including the first contact.
    pub fn slot_indicators(&self) -> Vec<u8> {
        match self.contact_slot {
            Some(0) => Vec::new(),
            Some(k) => {
                let mut v = vec![0; k as usize];
                v[k as usize - 1] = 1;
                v
            }
            None => vec![0; self.slots_observed as usize],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DelaySample {
    /// `|I(s)|`, counting the source itself.
    pub neighbor_count: usize,
    pub dest_in_range: bool,
    pub delay: MeetingTime,
}

/// When contacts are detected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContactRule {
    /// Any instant inside the slot.
    Continuous,
    /// Only at slot ends, from endpoint distances.
    SlotEnd,
}

pub fn slot_contact(rel_pieces: &[SubSegment], r: f64) -> Result<bool> {
    ensure_arg!(!rel_pieces.is_empty(), "a slot needs at least one piece");
    for p in rel_pieces {
        if segment_hits_disc(p.start, p.end, Point2::ORIGIN, r)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Relative pieces `a(t) - b(t)` over the common refinement of both paths.
pub fn relative_pieces(a: &WrappedPath, b: &WrappedPath) -> Result<Vec<SubSegment>> {
    let pa = a.to_sub_segments()?;
    let pb = b.to_sub_segments()?;
    let mut out = Vec::with_capacity(pa.len() + pb.len());
    let (mut i, mut j, mut t) = (0, 0, 0.0);
    while i < pa.len() && j < pb.len() {
        let t_end = pa[i].t_end.min(pb[j].t_end);
        if t_end > t {
            out.push(SubSegment::new(pa[i].at(t) - pb[j].at(t), pa[i].at(t_end) - pb[j].at(t_end), t, t_end));
        }
        if pa[i].t_end <= t_end {
            i += 1;
        }
        if pb[j].t_end <= t_end {
            j += 1;
        }
        t = t_end;
    }
    Ok(out)
}

/// Earliest slot time in `[0, 1]` at which the two paths come within `r`.
///
/// A path that loops more than [`crate::geometry::MAX_ENUMERATED_CHORDS`]
/// times sweeps its two chords faster than the other node can move, so the
/// other node meets it as soon as it enters the capsule around either chord.
pub fn earliest_contact(a: &WrappedPath, b: &WrappedPath, r: f64) -> Option<f64> {
    let (ta, tb) = (a.trace(), b.trace());
    let near = ta
        .iter()
        .any(|&(a0, a1)| tb.iter().any(|&(b0, b1)| segment_segment_distance(a0, a1, b0, b1) <= r));
    if !near {
        return None;
    }
    match (a.is_fast_loop(), b.is_fast_loop()) {
        (false, false) => merge_contact(a.pieces(), b.pieces(), r, 1.0),
        (true, false) => fast_loop_contact(a, b, r),
        (false, true) => fast_loop_contact(b, a, r),
        (true, true) => Some(a.first_exit_time().max(b.first_exit_time())),
    }
}

fn merge_contact<I, J>(mut ia: I, mut ib: J, r: f64, t_stop: f64) -> Option<f64>
where
    I: Iterator<Item = SubSegment>,
    J: Iterator<Item = SubSegment>,
{
    let mut pa = ia.next()?;
    let mut pb = ib.next()?;
    let mut t = 0.0;
    loop {
        let t_end = pa.t_end.min(pb.t_end).min(t_stop);
        let rel0 = pa.at(t) - pb.at(t);
        let rel1 = pa.at(t_end) - pb.at(t_end);
        if let Some(d) = first_contact_param(rel0, rel1, Point2::ORIGIN, r) {
            return Some(t + d * (t_end - t));
        }
        if t_end >= t_stop {
            return None;
        }
        if pa.t_end <= t_end {
            pa = ia.next()?;
        }
        if pb.t_end <= t_end {
            pb = ib.next()?;
        }
        t = t_end;
    }
}

fn fast_loop_contact(fast: &WrappedPath, slow: &WrappedPath, r: f64) -> Option<f64> {
    let t_first = fast.first_exit_time();
    if let Some(first) = fast.first_piece() {
        if let Some(t) = merge_contact(std::iter::once(first), slow.pieces(), r, t_first) {
            return Some(t);
        }
    }
    let chords = fast.loop_chords()?;
    for piece in slow.pieces() {
        if piece.t_end < t_first {
            continue;
        }
        let lo = piece.t_begin.max(t_first);
        let (p0, p1) = (piece.at(lo), piece.at(piece.t_end));
        let entry = chords
            .iter()
            .filter_map(|&(c0, c1)| first_entry_capsule(p0, p1, c0, c1, r))
            .reduce(f64::min);
        if let Some(d) = entry {
            return Some(lo + d * (piece.t_end - lo));
        }
    }
    None
}

fn step_path(rng: &mut Stream, pos: Point2, model: &Mobility, world: &DiscWorld) -> Result<WrappedPath> {
    match model {
        Mobility::LevyFlight(law) => levy_path(pos, &sample_flight(rng, law), world),
        Mobility::Iid => Ok(WrappedPath::linear(pos, next_position_iid(rng, world))),
    }
}

/// Advances every tracked node by one slot and returns each node's path.
pub fn build_slot_trajectories(
    states: &mut [Point2],
    streams: &mut [Stream],
    cfg: &ModelConfig,
) -> Result<Vec<WrappedPath>> {
    ensure_arg!(states.len() == streams.len(), "one stream per node is required");
    let world = cfg.world();
    let mut out = Vec::with_capacity(states.len());
    for (pos, rng) in states.iter_mut().zip(streams.iter_mut()) {
        let path = step_path(rng, *pos, &cfg.model, &world)?;
        *pos = path.end();
        out.push(path);
    }
    Ok(out)
}

/// Initial position of node `i` and its stream, positioned after the placement draw.
pub fn place_node(trial: &TrialStreams, i: u64, world: &DiscWorld) -> (Point2, Stream) {
    let mut rng = trial.node(i);
    let p = uniform_point_in_disc(&mut rng, world.radius).expect("world radius is positive");
    (p, rng)
}

pub fn simulate_pair_meeting(trial: &TrialStreams, cfg: &ModelConfig) -> Result<MeetingSample> {
    simulate_pair_meeting_with(trial, cfg, ContactRule::Continuous)
}

pub fn simulate_pair_meeting_with(
    trial: &TrialStreams,
    cfg: &ModelConfig,
    rule: ContactRule,
) -> Result<MeetingSample> {
    cfg.validate()?;
    let world = cfg.world();
    let (p0, s0) = place_node(trial, 0, &world);
    let (p1, s1) = place_node(trial, 1, &world);
    let initial_distance = p0.dist(p1);
    let mut sample = MeetingSample {
        initial_distance,
        meeting_time: MeetingTime::Met(0.0),
        met_at_t0: true,
        contact_slot: Some(0),
        slots_observed: 0,
    };
    if initial_distance <= cfg.r {
        return Ok(sample);
    }
    sample.met_at_t0 = false;
    let mut states = [p0, p1];
    let mut streams = [s0, s1];
    for k in 1..=cfg.horizon_slots {
        let paths = build_slot_trajectories(&mut states, &mut streams, cfg)?;
        sample.slots_observed = k;
        if let Some(d) = contact_in_slot(&paths[0], &paths[1], cfg.r, rule) {
            sample.meeting_time = MeetingTime::Met(f64::from(k - 1) + d);
            sample.contact_slot = Some(k);
            return Ok(sample);
        }
    }
    sample.meeting_time = MeetingTime::Censored { horizon: cfg.horizon_slots };
    sample.contact_slot = None;
    Ok(sample)
}

fn contact_in_slot(a: &WrappedPath, b: &WrappedPath, r: f64, rule: ContactRule) -> Option<f64> {
    match rule {
        ContactRule::Continuous => earliest_contact(a, b, r),
        ContactRule::SlotEnd => (a.end().dist(b.end()) <= r).then_some(1.0),
    }
}

/// Indices within `r` of node `s`, in increasing order; always contains `s`.
pub fn neighbor_set(positions: &[Point2], s: usize, r: f64) -> Result<Vec<usize>> {
    ensure_arg!(s < positions.len(), "node index {s} out of range for {} nodes", positions.len());
    let origin = positions[s];
    Ok(positions
        .iter()
        .enumerate()
        .filter(|&(i, p)| i == s || p.dist(origin) <= r)
        .map(|(i, _)| i)
        .collect())
}

/// `|I(s)| - 1` for a fresh uniform placement with `s = 0, d = 1`, or `None`
/// when the destination starts inside the source's range.
pub fn placement_neighbor_count(trial: &TrialStreams, n: u64, r: f64) -> Result<Option<u64>> {
    ensure_arg!(n >= 2, "need at least two nodes, got {n}");
    let world = DiscWorld::new(n)?;
    let positions: Vec<Point2> = (0..n).map(|i| place_node(trial, i, &world).0).collect();
    let set = neighbor_set(&positions, 0, r)?;
    Ok((!set.contains(&1)).then(|| set.len() as u64 - 1))
}

/// Delay of the two-hop scheme from source 0 to destination 1: the source
/// hands copies to its initial neighbours, and the first copy holder to meet
/// the destination delivers.
pub fn simulate_scheme_delay(trial: &TrialStreams, cfg: &ModelConfig) -> Result<DelaySample> {
    cfg.validate()?;
    ensure_arg!(cfg.n >= 2, "need at least two nodes, got {}", cfg.n);
    let world = cfg.world();
    let placed: Vec<(Point2, Stream)> = (0..cfg.n).map(|i| place_node(trial, i, &world)).collect();
    let positions: Vec<Point2> = placed.iter().map(|p| p.0).collect();
    let neighbors = neighbor_set(&positions, 0, cfg.r)?;
    let dest_in_range = neighbors.contains(&1);
    let mut sample = DelaySample {
        neighbor_count: neighbors.len(),
        dest_in_range,
        delay: MeetingTime::Met(0.0),
    };
    if dest_in_range {
        return Ok(sample);
    }
    // Destination first, then relays.
    let tracked: Vec<usize> = std::iter::once(1).chain(neighbors.iter().copied()).collect();
    let mut placed: Vec<Option<(Point2, Stream)>> = placed.into_iter().map(Some).collect();
    let (mut states, mut streams): (Vec<Point2>, Vec<Stream>) =
        tracked.iter().map(|&i| placed[i].take().expect("distinct indices")).unzip();
    drop(placed);
    for k in 1..=cfg.horizon_slots {
        let paths = build_slot_trajectories(&mut states, &mut streams, cfg)?;
        let dest = &paths[0];
        let first = paths[1..]
            .iter()
            .filter_map(|relay| earliest_contact(relay, dest, cfg.r))
            .reduce(f64::min);
        if let Some(d) = first {
            sample.delay = MeetingTime::Met(f64::from(k - 1) + d);
            return Ok(sample);
        }
    }
    sample.delay = MeetingTime::Censored { horizon: cfg.horizon_slots };
    Ok(sample)
}
