//! Independent checks of the discrete water-filling solvers: optimality
//! conditions verified directly, exhaustive and randomized searches over
//! alternative allocations, the closed-form/energy-map duality, and a
//! bisection oracle for the reverse (rate-distortion) problem.

use heatchan::channel::{ChannelParams, FilterEigensystem};
use heatchan::waterfill::{
    capacity_closed_form, input_energy_asymptotic, rd_closed_form, solve_reverse_waterfill,
    solve_waterfill,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

fn params() -> ChannelParams {
    ChannelParams::new(1.0, 5.0, 0.1).unwrap()
}

/// alpha beta = 5/3 = coth(ln 2), so adjacent source variances fall by 4x
/// and hand arithmetic stays exact.
fn rd_params() -> ChannelParams {
    ChannelParams::new(1.0, 5.0 / 3.0, 0.1).unwrap()
}

#[test]
fn forward_solution_satisfies_the_optimality_conditions() {
    // Active subchannels fill exactly to the water level; inactive ones sit
    // at or above it.  That is the full optimality certificate for this
    // concave program.
    let p = params();
    let eig = FilterEigensystem::new(p);
    let sol = solve_waterfill(&p, 0.468).unwrap();
    assert_eq!(sol.active_count(), 3);
    let level = sol.water_level();
    for (k, &pk) in sol.allocation().iter().enumerate() {
        assert!(pk > 0.0);
        let filled = pk + eig.noise_variance(k);
        assert!(
            (filled - level).abs() <= 1e-12 * level,
            "subchannel {k} fills to {filled}, level {level}"
        );
    }
    for k in sol.active_count()..16 {
        assert!(eig.noise_variance(k) >= level - 1e-15);
    }
    let spent: f64 = sol.allocation().iter().sum();
    assert!((spent - 0.468).abs() <= 1e-12);
}

#[test]
fn forward_solution_beats_every_subset_allocation() {
    // Exhaustive search over all nonempty subsets of the first eight
    // subchannels, each filled to its own level.  The solver must attain
    // the best feasible value (the optimum is known to use a prefix, but
    // the search does not assume that).
    let p = params();
    let eig = FilterEigensystem::new(p);
    let s_total = 0.468;
    let sol = solve_waterfill(&p, s_total).unwrap();
    let mut best = f64::NEG_INFINITY;
    for mask in 1u32..(1 << 8) {
        let members: Vec<usize> = (0..8).filter(|k| mask & (1 << k) != 0).collect();
        let noise: f64 = members.iter().map(|&k| eig.noise_variance(k)).sum();
        let level = (s_total + noise) / members.len() as f64;
        if members.iter().any(|&k| eig.noise_variance(k) >= level) {
            continue;
        }
        let rate: f64 = members
            .iter()
            .map(|&k| 0.5 * (level / eig.noise_variance(k)).ln())
            .sum();
        best = best.max(rate);
    }
    assert!(
        (sol.capacity_nats() - best).abs() <= 1e-12,
        "solver {} vs subset search {best}",
        sol.capacity_nats()
    );
}

#[test]
fn random_feasible_allocations_never_beat_the_solver() {
    let p = params();
    let eig = FilterEigensystem::new(p);
    let s_total = 0.468;
    let cap = solve_waterfill(&p, s_total).unwrap().capacity_nats();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let raw: Vec<f64> = (0..12).map(|_| rng.sample::<f64, _>(Exp1)).collect();
        let total: f64 = raw.iter().sum();
        let rate: f64 = raw
            .iter()
            .enumerate()
            .map(|(k, &e)| {
                let pk = e / total * s_total;
                0.5 * (1.0 + pk / eig.noise_variance(k)).ln()
            })
            .sum();
        assert!(rate <= cap + 1e-12, "allocation with rate {rate} beats {cap}");
    }
}

#[test]
fn closed_form_is_dual_to_the_energy_map() {
    // Feeding the closed form the energy absorbed at level m theta2 must
    // return (alpha beta/2)(ln m / 2)^2 exactly: the two Lambert-type maps
    // are inverses.
    let p = params();
    for m in [2.0, 5.0, 20.0, 100.0] {
        let s = input_energy_asymptotic(&p, m * p.theta2()).unwrap();
        let bits = capacity_closed_form(&p, s).unwrap();
        let half_log = 0.5 * f64::ln(m);
        let want = 0.5 * p.alphabeta() * half_log * half_log * std::f64::consts::LOG2_E;
        assert!(
            (bits - want).abs() <= 1e-12 * want.max(1.0),
            "m = {m}: {bits} vs {want}"
        );
    }
}

/// Water table solving `K w + tail(K) = d` by bisection over the table
/// height, with no reference to the solver's scan.
fn reverse_oracle(sigma2: f64, rho: f64, d: f64) -> (usize, f64, f64) {
    let var = |k: usize| sigma2 * rho.powi(2 * k as i32 + 1);
    let tail = |k: usize| var(k) / (1.0 - rho * rho);
    let distortion_at = |w: f64| {
        let coded = (0..).take_while(|&k| var(k) > w).count();
        coded as f64 * w + tail(coded)
    };
    let (mut lo, mut hi) = (0.0, var(0));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if distortion_at(mid) > d {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let w = 0.5 * (lo + hi);
    let coded = (0..).take_while(|&k| var(k) > w).count();
    let rate: f64 = (0..coded).map(|k| 0.5 * (var(k) / w).ln()).sum();
    (coded, w, rate)
}

#[test]
fn reverse_solution_matches_bisection_oracle() {
    let p = rd_params();
    assert!((p.rho() - 0.5).abs() < 1e-12);
    for d in [0.05, 0.3, 0.6] {
        let sol = solve_reverse_waterfill(&p, d, 1.0).unwrap();
        let (coded, table, rate) = reverse_oracle(1.0, 0.5, d);
        assert_eq!(sol.coded_count(), coded, "d = {d}");
        let got_table = sol.water_table().unwrap();
        assert!((got_table - table).abs() <= 1e-10, "d = {d}: table {got_table} vs {table}");
        assert!(
            (sol.rate_nats() - rate).abs() <= 1e-10,
            "d = {d}: rate {} vs {rate}",
            sol.rate_nats()
        );
    }
}

#[test]
fn reverse_rate_is_decreasing_and_convex_in_distortion() {
    let p = rd_params();
    let source_energy = 0.5 / p.sinh_delta();
    assert!((source_energy - 2.0 / 3.0).abs() < 1e-12);
    let rates: Vec<f64> = (0..40)
        .map(|i| {
            let d = 0.02 + (0.66 - 0.02) * i as f64 / 39.0;
            solve_reverse_waterfill(&p, d, 1.0).unwrap().rate_nats()
        })
        .collect();
    for pair in rates.windows(2) {
        assert!(pair[1] < pair[0], "rate not decreasing: {pair:?}");
    }
    for triple in rates.windows(3) {
        let second_diff = triple[0] - 2.0 * triple[1] + triple[2];
        assert!(second_diff >= -1e-9, "rate not convex: {triple:?}");
    }
}

#[test]
fn rate_is_zero_at_and_beyond_the_source_energy() {
    let p = rd_params();
    let source_energy = 0.5 / p.sinh_delta();
    for d in [source_energy, source_energy + 0.1, 5.0] {
        let sol = solve_reverse_waterfill(&p, d, 1.0).unwrap();
        assert_eq!(sol.rate_nats(), 0.0);
        assert_eq!(sol.coded_count(), 0);
        assert!(sol.water_table().is_none());
    }
    // Closed form: zero at and beyond its own (asymptotic) energy scale.
    let d_max = 0.5 * p.alphabeta();
    assert_eq!(rd_closed_form(&p, d_max + 1e-9, 1.0).unwrap(), 0.0);
}
