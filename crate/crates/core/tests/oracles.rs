//! Distributional and Monte Carlo oracles, each checked at 3σ (or a 1%
//! KS level) against an independent reference.

use std::f64::consts::PI;

use meetsim::analytics::{estimate_h1_mc, estimate_h1_mc_rotated, p_out_bounds, Estimate};
use meetsim::flight::{levy_path, sample_flight, sample_flight_length, sample_stable_symmetric, FlightLaw};
use meetsim::geometry::{
    central_angle_phi, in_s, in_s_star, min_dist_segment_to_point, uniform_point_in_disc, DiscWorld, Point2,
    WrappedPath,
};
use meetsim::streams::{parallel_count, parallel_trials, StreamSeed};
use meetsim::world::{earliest_contact, simulate_pair_meeting, ModelConfig, Mobility};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x0AC1E ^ tag)
}

/// One-sample Kolmogorov-Smirnov statistic against `cdf`.
fn ks_statistic(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic 1% critical value.
fn ks_critical(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let e = Estimate::from_values(xs);
    (e.value, e.stderr)
}

#[test]
fn disc_moments_and_radial_law() {
    let radius = 10.0;
    let mut r = rng(1);
    let pts: Vec<Point2> = (0..1_000_000).map(|_| uniform_point_in_disc(&mut r, radius).unwrap()).collect();
    assert!(pts.iter().all(|p| p.norm() <= radius));
    let (m2, se2) = mean_and_se(&pts.iter().map(|p| p.norm_sq()).collect::<Vec<_>>());
    assert!((m2 - 50.0).abs() <= 3.0 * se2, "E|p|^2 = {m2} ± {se2}");
    let (m1, se1) = mean_and_se(&pts.iter().map(|p| p.norm()).collect::<Vec<_>>());
    assert!((m1 - 2.0 * radius / 3.0).abs() <= 3.0 * se1);
    let (mx, sex) = mean_and_se(&pts.iter().map(|p| p.x).collect::<Vec<_>>());
    assert!(mx.abs() <= 3.0 * sex);
    let radial: Vec<f64> = pts.iter().take(100_000).map(|p| p.norm()).collect();
    let d = ks_statistic(radial, |x| (x / radius).powi(2));
    assert!(d < ks_critical(100_000), "KS {d}");
    let angles: Vec<f64> = pts.iter().take(100_000).map(|p| p.y.atan2(p.x) + PI).collect();
    let d = ks_statistic(angles, |a| a / (2.0 * PI));
    assert!(d < ks_critical(100_000), "angle KS {d}");
}

/// Brute-force membership: sample the segment densely instead of solving
/// the closest-point problem.
fn misses_by_scan(a: Point2, b: Point2, c: Point2, r: f64) -> bool {
    (0..=4000).all(|i| a.lerp(b, f64::from(i) / 4000.0).dist(c) > r)
}

#[test]
fn s_set_arc_fraction_matches_angle_scan() {
    let (l0, r, rho) = (10.0, 1.0, 20.0);
    let steps = 20_000;
    let (mut in_fast, mut in_scan) = (0u32, 0u32);
    for i in 0..steps {
        let x = Point2::from_polar(rho, 2.0 * PI * (f64::from(i) + 0.5) / f64::from(steps));
        in_fast += u32::from(in_s(l0, x, r).unwrap());
        if i % 10 == 0 {
            let scan = misses_by_scan(Point2::ORIGIN, x, Point2::new(0.0, -l0), r);
            assert_eq!(scan, in_s(l0, x, r).unwrap(), "angle index {i}");
            in_scan += u32::from(scan);
        }
    }
    let exact = 1.0 - (r / l0).asin() / PI;
    let frac = f64::from(in_fast) / f64::from(steps);
    assert!((frac - exact).abs() < 2.0 / f64::from(steps), "{frac} vs {exact}");
    assert!((f64::from(in_scan) / f64::from(steps / 10) - exact).abs() < 2e-3);
    // Uniform random angles agree with the same fraction at 3σ.
    let mut g = rng(2);
    let hits = (0..100_000)
        .filter(|_| in_s(l0, Point2::from_polar(rho, 2.0 * PI * rand::Rng::random::<f64>(&mut g)), r).unwrap())
        .count();
    let est = Estimate::from_count(hits as u64, 100_000);
    assert!(est.within(exact, exact, 3.0), "{est:?} vs {exact}");
}

#[test]
fn central_angle_matches_s_star_scan() {
    let (n, r) = (100, 2.0);
    let d = 2.0 * (n as f64).sqrt();
    for rho in [3.0, 8.0, 12.0, 19.5] {
        let steps = 200_000;
        let inside = (0..steps)
            .filter(|&i| {
                let x = Point2::from_polar(rho, 2.0 * PI * (f64::from(i) + 0.5) / f64::from(steps));
                in_s_star(d, x, r).unwrap()
            })
            .count();
        let scanned = 2.0 * PI * inside as f64 / f64::from(steps);
        let phi = central_angle_phi(rho, r, n).unwrap();
        assert!((scanned - phi).abs() < 1e-3, "|x|={rho}: scan {scanned} vs phi {phi}");
    }
}

#[test]
fn stable_sampler_special_cases() {
    let mut g = rng(3);
    let cauchy: Vec<f64> = (0..100_000).map(|_| sample_stable_symmetric(&mut g, 1.0, 2.0).unwrap()).collect();
    let d = ks_statistic(cauchy, |x| 0.5 + (x / 2.0).atan() / PI);
    assert!(d < ks_critical(100_000), "Cauchy KS {d}");
    // α = 2 with scale s is Gaussian with variance 2s².
    let s = 1.5;
    let gauss: Vec<f64> = (0..100_000).map(|_| sample_stable_symmetric(&mut g, 2.0, s).unwrap()).collect();
    let sd = 2f64.sqrt() * s;
    let d = ks_statistic(gauss, |x| 0.5 * (1.0 + erf(x / (sd * 2f64.sqrt()))));
    assert!(d < ks_critical(100_000), "Gaussian KS {d}");
    // Symmetric stable heavy tail: P{|X| > z} ~ (2/π)Γ(α)sin(πα/2)/z^α.
    let law = FlightLaw::stable(1.5, 1.0).unwrap();
    let z = 50.0;
    let hits = (0..1_000_000).filter(|_| sample_flight_length(&mut g, &law) > z).count();
    let est = Estimate::from_count(hits as u64, 1_000_000);
    let asymptotic = law.tail_c / z.powf(1.5);
    assert!((est.value / asymptotic - 1.0).abs() < 0.1, "{est:?} vs {asymptotic}");
}

fn erf(x: f64) -> f64 {
    statrs::function::erf::erf(x)
}

#[test]
fn pareto_lengths_and_uniform_angles() {
    let law = FlightLaw::truncated_pareto(1.3, 2.0).unwrap();
    let mut g = rng(4);
    let flights: Vec<_> = (0..100_000).map(|_| sample_flight(&mut g, &law)).collect();
    assert!(flights.iter().all(|f| f.length_z >= 2.0));
    let d = ks_statistic(flights.iter().map(|f| f.length_z).collect(), |z| 1.0 - law.pareto_ccdf(z).unwrap());
    assert!(d < ks_critical(100_000), "Pareto KS {d}");
    let bins = 32;
    let mut counts = vec![0f64; bins];
    for f in &flights {
        assert!(f.angle_theta > 0.0 && f.angle_theta <= 2.0 * PI);
        counts[((f.angle_theta / (2.0 * PI) * bins as f64).ceil() as usize - 1).min(bins - 1)] += 1.0;
    }
    let e = flights.len() as f64 / bins as f64;
    let chi2: f64 = counts.iter().map(|c| (c - e).powi(2) / e).sum();
    // 99th percentile of chi-square with 31 dof.
    assert!(chi2 < 52.19, "angle chi2 {chi2}");
}

#[test]
fn wrapped_flights_keep_uniform_law() {
    let world = DiscWorld::new(400).unwrap();
    let law = FlightLaw::truncated_pareto(0.8, 1.0).unwrap();
    let seed = StreamSeed::new(5);
    // Short flights, one step from uniform starts.
    let short: Vec<f64> = parallel_trials(seed.derive("short"), 100_000, |t| {
        let mut g = t.node(0);
        let start = uniform_point_in_disc(&mut g, world.radius).unwrap();
        let len = world.radius / 2.0 * rand::Rng::random::<f64>(&mut g);
        let disp = Point2::from_polar(len, 2.0 * PI * rand::Rng::random::<f64>(&mut g));
        WrappedPath::new(start, disp, &world).unwrap().end().norm()
    });
    let d = ks_statistic(short, |x| (x / world.radius).powi(2));
    assert!(d < ks_critical(100_000), "short-flight KS {d}");
    // Long run of heavy-tailed flights from the centre.
    let long: Vec<f64> = parallel_trials(seed.derive("long"), 20_000, |t| {
        let mut g = t.node(0);
        let mut p = Point2::ORIGIN;
        for _ in 0..50 {
            p = levy_path(p, &sample_flight(&mut g, &law), &world).unwrap().end();
        }
        assert!(world.contains(p));
        p.norm()
    });
    let d = ks_statistic(long, |x| (x / world.radius).powi(2));
    assert!(d < ks_critical(20_000), "long-run KS {d}");
}

#[test]
fn pair_distance_density_below_linear_envelope() {
    let n = 100u64;
    let radius = (n as f64).sqrt();
    let mut g = rng(6);
    let trials = 1_000_000;
    let width = 0.5;
    let bins = (2.0 * radius / width) as usize;
    let mut counts = vec![0u64; bins];
    for _ in 0..trials {
        let a = uniform_point_in_disc(&mut g, radius).unwrap();
        let b = uniform_point_in_disc(&mut g, radius).unwrap();
        counts[((a.dist(b) / width) as usize).min(bins - 1)] += 1;
    }
    for (i, &c) in counts.iter().enumerate() {
        let p = c as f64 / trials as f64;
        let se = (p * (1.0 - p) / trials as f64).sqrt() / width;
        let upper_edge = (i + 1) as f64 * width;
        // The density is increasing-bounded by 2x/n, so its bin average is
        // below the envelope at the bin's upper edge.
        assert!(p / width <= 2.0 * upper_edge / n as f64 + 3.0 * se, "bin {i}");
    }
}

#[test]
fn start_in_range_fraction_matches_out_of_range_bounds() {
    for model in [Mobility::Iid, Mobility::LevyFlight(FlightLaw::truncated_pareto(1.0, 1.0).unwrap())] {
        let (n, r) = (100u64, 2.0);
        let cfg = ModelConfig::new(n, r, model).unwrap().horizon(1);
        let met0 = parallel_trials(StreamSeed::new(7), 200_000, |t| simulate_pair_meeting(&t, &cfg).unwrap().met_at_t0);
        let out = met0.iter().filter(|&&m| !m).count() as u64;
        let est = Estimate::from_count(out, met0.len() as u64);
        let (lo, hi) = p_out_bounds(n, r).unwrap();
        assert!(est.within(lo, hi, 3.0), "{} {est:?} not in [{lo}, {hi}]", model.name());
    }
}

#[test]
fn no_contact_probability_is_rotation_invariant() {
    let (n, r) = (400u64, 3.0);
    let l0 = 2.0 * (n as f64).sqrt();
    for model in [Mobility::Iid, Mobility::LevyFlight(FlightLaw::truncated_pareto(1.5, 1.0).unwrap())] {
        let base = estimate_h1_mc(StreamSeed::new(8), &model, n, r, l0, 400_000).unwrap();
        for theta in [0.0, 1.0, 2.5, 4.0] {
            let rot = estimate_h1_mc_rotated(StreamSeed::new(9), &model, n, r, l0, theta, 400_000).unwrap();
            let gap = (rot.value - base.value).abs();
            assert!(gap <= 3.0 * rot.stderr.hypot(base.stderr), "{} θ={theta}: {rot:?} vs {base:?}", model.name());
        }
    }
}

/// The set-membership estimator and a direct one-slot contact simulation,
/// driven by the same draws, must agree trial by trial (up to wraps).
#[test]
fn one_slot_no_contact_matches_direct_simulation() {
    let (n, r) = (400u64, 3.0);
    let world = DiscWorld::new(n).unwrap();
    let seed = StreamSeed::new(10);
    let trials = 200_000;

    let l0 = 2.0 * world.radius;
    let h = estimate_h1_mc(seed, &Mobility::Iid, n, r, l0, trials).unwrap();
    let direct = parallel_count(seed, trials, |g| {
        let a = uniform_point_in_disc(g, world.radius).unwrap();
        let b = uniform_point_in_disc(g, world.radius).unwrap();
        let pa = WrappedPath::linear(Point2::new(0.0, world.radius), a);
        let pb = WrappedPath::linear(Point2::new(0.0, -world.radius), b);
        earliest_contact(&pa, &pb, r).is_none()
    });
    assert_eq!(direct, (h.value * trials as f64).round() as u64);

    // Lévy: nodes at (0, ±l0/2) so the relative start is (0, l0); the
    // estimator tests the flight difference against S(l0). Wrapped flights
    // leave the straight-line picture and are excluded from the comparison.
    let law = FlightLaw::truncated_pareto(2.0, 1.0).unwrap();
    let l0 = 10.0;
    let h = estimate_h1_mc(seed, &Mobility::LevyFlight(law), n, r, l0, trials).unwrap();
    let replay = |g: &mut meetsim::streams::Stream| {
        let fa = sample_flight(g, &law);
        let fb = sample_flight(g, &law);
        let pa = levy_path(Point2::new(0.0, l0 / 2.0), &fa, &world).unwrap();
        let pb = levy_path(Point2::new(0.0, -l0 / 2.0), &fb, &world).unwrap();
        let miss = earliest_contact(&pa, &pb, r).is_none();
        (miss, in_s(l0, fa.vector_v - fb.vector_v, r).unwrap(), pa.wraps() || pb.wraps())
    };
    let in_set = parallel_count(seed, trials, |g| replay(g).1);
    assert_eq!(in_set, (h.value * trials as f64).round() as u64);
    let mismatched = parallel_count(seed, trials, |g| {
        let (miss, member, wrapped) = replay(g);
        !wrapped && miss != member
    });
    let wrapped = parallel_count(seed, trials, |g| replay(g).2);
    assert_eq!(mismatched, 0);
    assert!(wrapped > 0 && wrapped < trials / 50, "{wrapped} wrapped trials");
}

#[test]
fn closest_point_distance_matches_dense_scan() {
    let mut g = rng(11);
    for _ in 0..2000 {
        let p = |g: &mut ChaCha8Rng| uniform_point_in_disc(g, 5.0).unwrap();
        let (a, b, q) = (p(&mut g), p(&mut g), p(&mut g));
        let scan = (0..=20_000).map(|i| a.lerp(b, f64::from(i) / 20_000.0).dist(q)).fold(f64::INFINITY, f64::min);
        let fast = min_dist_segment_to_point(a, b, q);
        assert!(fast <= scan + 1e-12 && scan - fast < 1e-3, "{fast} vs {scan}");
    }
}
