use std::f64::consts::PI;

use meetsim::analytics::{
    binomial_cdf, binomial_chernoff_tail, ccdf_geometric_bound, cosine_diff_tail_constants, p_hat_bounds_iid,
    p_hat_bounds_levy, p_out_bounds, u_bar_bound,
};
use meetsim::geometry::{
    first_contact_param, in_s, in_s_rotated, in_s_star, in_s_star_rotated, min_dist_segment_to_point,
    segment_hits_disc, segment_segment_distance, DiscWorld, Point2, WrappedPath,
};
use meetsim::streams::StreamSeed;
use meetsim::world::{earliest_contact, simulate_pair_meeting, ModelConfig, Mobility};
use proptest::prelude::*;

fn point(span: f64) -> impl Strategy<Value = Point2> {
    (-span..span, -span..span).prop_map(|(x, y)| Point2::new(x, y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn disc_hit_is_symmetric_and_monotone(a in point(10.0), b in point(10.0), c in point(10.0), r in 0.0..5.0f64, dr in 0.0..2.0f64) {
        let hit = segment_hits_disc(a, b, c, r).unwrap();
        prop_assert_eq!(hit, segment_hits_disc(b, a, c, r).unwrap());
        if hit {
            prop_assert!(segment_hits_disc(a, b, c, r + dr).unwrap());
        }
        prop_assert_eq!(hit, min_dist_segment_to_point(a, b, c) <= r);
    }

    #[test]
    fn first_contact_is_first(a in point(10.0), b in point(10.0), c in point(10.0), r in 0.1..5.0f64) {
        match first_contact_param(a, b, c, r) {
            Some(t) => {
                prop_assert!((0.0..=1.0).contains(&t));
                prop_assert!(a.lerp(b, t).dist(c) <= r * (1.0 + 1e-9) + 1e-9);
                if a.dist(c) <= r {
                    prop_assert_eq!(t, 0.0);
                }
                for i in 0..50 {
                    if t == 0.0 {
                        break;
                    }
                    let s = t * f64::from(i) / 50.0;
                    prop_assert!(a.lerp(b, s).dist(c) >= r * (1.0 - 1e-9) - 1e-9);
                }
            }
            None => prop_assert!(!segment_hits_disc(a, b, c, r).unwrap()),
        }
    }

    #[test]
    fn segment_distance_is_symmetric(a0 in point(5.0), a1 in point(5.0), b0 in point(5.0), b1 in point(5.0)) {
        let d = segment_segment_distance(a0, a1, b0, b1);
        prop_assert!((d - segment_segment_distance(b0, b1, a0, a1)).abs() < 1e-12);
        prop_assert!((d - segment_segment_distance(a1, a0, b1, b0)).abs() < 1e-12);
        prop_assert!(d <= min_dist_segment_to_point(a0, a1, b0) + 1e-12);
    }

    #[test]
    fn rotated_sets_agree(x in point(30.0), l0 in 2.0..20.0f64, r in 0.1..1.9f64, theta in 0.0..(2.0 * PI)) {
        // Skip points whose segment grazes the disc boundary.
        let center = Point2::new(0.0, -l0);
        prop_assume!((min_dist_segment_to_point(Point2::ORIGIN, x, center) - r).abs() > 1e-7);
        prop_assume!((min_dist_segment_to_point(Point2::new(0.0, l0), x, Point2::ORIGIN) - r).abs() > 1e-7);
        let turned = x.rotate(theta - PI / 2.0);
        prop_assert_eq!(in_s(l0, x, r).unwrap(), in_s_rotated(l0, theta, turned, r).unwrap());
        prop_assert_eq!(in_s_star(l0, x, r).unwrap(), in_s_star_rotated(l0, theta, turned, r).unwrap());
    }

    #[test]
    fn wrapped_path_partitions_the_slot(n in 4u64..2000, rho in 0.0..1.0f64, phi in 0.0..(2.0 * PI), len in 0.0..500.0f64, dir in 0.0..(2.0 * PI)) {
        let world = DiscWorld::new(n).unwrap();
        let start = Point2::from_polar(rho * world.radius, phi);
        let path = WrappedPath::new(start, Point2::from_polar(len, dir), &world).unwrap();
        prop_assert!(world.contains(path.end()));
        if path.is_fast_loop() {
            return Ok(());
        }
        let pieces = path.to_sub_segments().unwrap();
        prop_assert_eq!(pieces.first().unwrap().t_begin, 0.0);
        prop_assert_eq!(pieces.last().unwrap().t_end, 1.0);
        for w in pieces.windows(2) {
            prop_assert!((w[0].t_end - w[1].t_begin).abs() < 1e-12);
        }
        for p in &pieces {
            prop_assert!(world.contains(p.start) && world.contains(p.end));
            prop_assert!(p.t_end >= p.t_begin);
        }
        let total: f64 = pieces.iter().map(|p| p.length()).sum();
        prop_assert!((total - len).abs() <= 1e-6 * len.max(1.0));
        prop_assert!((pieces.last().unwrap().end - path.end()).norm() < 1e-6);
    }

    #[test]
    fn contact_is_symmetric_between_nodes(a0 in point(8.0), a1 in point(8.0), b0 in point(8.0), b1 in point(8.0), r in 0.1..3.0f64) {
        let pa = WrappedPath::linear(a0, a1);
        let pb = WrappedPath::linear(b0, b1);
        let ab = earliest_contact(&pa, &pb, r);
        let ba = earliest_contact(&pb, &pa, r);
        match (ab, ba) {
            (Some(x), Some(y)) => prop_assert!((x - y).abs() < 1e-9),
            (None, None) => {}
            _ => prop_assert!(false, "asymmetric contact {:?} {:?}", ab, ba),
        }
    }

    #[test]
    fn bounds_are_ordered(n in 4u64..100_000, frac in 0.01..1.0f64, alpha in 0.2..2.0f64) {
        let r = frac * (n as f64).sqrt();
        let (lo, hi) = p_out_bounds(n, r).unwrap();
        prop_assert!(0.0 <= lo && lo <= hi && hi <= 1.0);
        let (lo, hi) = p_hat_bounds_iid(n, r).unwrap();
        prop_assert!(0.0 <= lo && lo <= hi && hi <= 1.0);
        let tail = cosine_diff_tail_constants(alpha, 1.0).unwrap();
        prop_assert!(tail.c_l <= tail.c_u);
        let levy = p_hat_bounds_levy(n, r, &tail, alpha).unwrap();
        prop_assert!(0.0 <= levy.lower && levy.lower <= levy.upper && levy.upper <= 1.0);
    }

    #[test]
    fn geometric_bounds_decrease(p_hat in 0.0..0.999f64, p_out in 0.0..=1.0f64, tau in 0u64..200, m in 1u32..100) {
        prop_assert!(ccdf_geometric_bound(tau + 1, p_hat, p_out).unwrap() <= ccdf_geometric_bound(tau, p_hat, p_out).unwrap());
        prop_assert!(u_bar_bound(m + 1, p_hat, p_out).unwrap() <= u_bar_bound(m, p_hat, p_out).unwrap() + 1e-15);
    }

    #[test]
    fn binomial_tail_below_chernoff(trials in 1u64..2000, p in 0.01..0.99f64, frac in 0.0..=1.0f64) {
        let x = (trials as f64 * p * frac).floor();
        let exact = binomial_cdf(trials, p, x).unwrap();
        prop_assert!(exact <= binomial_chernoff_tail(trials, p, x).unwrap() + 1e-12);
        prop_assert!(exact <= binomial_cdf(trials, p, x + 1.0).unwrap() + 1e-15);
    }

    #[test]
    fn pair_simulation_replays(master in any::<u64>(), trial in 0u64..1000) {
        let cfg = ModelConfig::new(100, 2.0, Mobility::Iid).unwrap().horizon(50);
        let t = StreamSeed::new(master).trial(trial);
        let a = simulate_pair_meeting(&t, &cfg).unwrap();
        let b = simulate_pair_meeting(&StreamSeed::new(master).trial(trial), &cfg).unwrap();
        prop_assert_eq!(a, b);
        if let Some(k) = a.contact_slot {
            let t = a.meeting_time.value().unwrap();
            prop_assert!(t <= f64::from(k) && (k == 0 || t > f64::from(k - 1)));
        }
    }
}
