//! Randomized invariants: every admissible parameter draw must produce
//! solutions with the structural properties the solvers promise, and the
//! Lambert-type helpers must invert their defining relations everywhere.

use heatchan::channel::{mehler_kernel, ChannelParams, FilterEigensystem};
use heatchan::specfun::{w0, wm1};
use heatchan::waterfill::{energy_balance, solve_reverse_waterfill, solve_waterfill};
use heatchan::Error;
use proptest::prelude::*;

fn admissible() -> impl Strategy<Value = ChannelParams> {
    (0.1_f64..10.0, 1.1_f64..80.0, 0.01_f64..1.0)
        .prop_map(|(alpha, product, theta2)| {
            ChannelParams::new(alpha, product / alpha, theta2).unwrap()
        })
}

proptest! {
    #[test]
    fn products_at_or_below_one_are_rejected(
        alpha in 0.1_f64..5.0,
        product in 0.05_f64..=1.0,
        theta2 in 0.01_f64..1.0,
    ) {
        let err = ChannelParams::new(alpha, product / alpha, theta2).unwrap_err();
        let inadmissible = matches!(err, Error::Inadmissible { .. });
        prop_assert!(inadmissible, "unexpected error: {err}");
    }

    #[test]
    fn derived_parameters_satisfy_their_identities(p in admissible()) {
        // tanh(delta) * alpha beta = 1 and gamma^2 = alpha/beta by
        // construction; rho = exp(-delta).
        prop_assert!((p.delta().tanh() * p.alphabeta() - 1.0).abs() <= 1e-12);
        prop_assert!((p.gamma() * p.gamma() - p.alpha() / p.beta()).abs()
            <= 1e-12 * (p.alpha() / p.beta()));
        prop_assert!((p.rho() - (-p.delta()).exp()).abs() <= 1e-15);
    }

    #[test]
    fn forward_allocation_is_positive_decreasing_and_exhausts_the_budget(
        p in admissible(),
        s_total in 1e-3_f64..50.0,
    ) {
        let sol = solve_waterfill(&p, s_total).unwrap();
        let eig = FilterEigensystem::new(p);
        prop_assert!(sol.active_count() >= 1);
        let alloc = sol.allocation();
        prop_assert_eq!(alloc.len(), sol.active_count());
        for pair in alloc.windows(2) {
            prop_assert!(pair[0] > pair[1]);
        }
        for &pk in alloc {
            prop_assert!(pk > 0.0);
        }
        let spent: f64 = alloc.iter().sum();
        prop_assert!((spent - s_total).abs() <= 1e-9 * s_total);
        // Water level sits in the window that makes the next subchannel
        // unprofitable.
        let level = sol.water_level();
        prop_assert!(level <= eig.noise_variance(sol.active_count()) * (1.0 + 1e-12));
        prop_assert!(level > eig.noise_variance(sol.active_count() - 1));
        prop_assert!(sol.capacity_nats() > 0.0);
    }

    #[test]
    fn forward_solution_is_monotone_in_the_budget(
        p in admissible(),
        s_lo in 1e-3_f64..10.0,
        bump in 0.1_f64..10.0,
    ) {
        let lo = solve_waterfill(&p, s_lo).unwrap();
        let hi = solve_waterfill(&p, s_lo + bump).unwrap();
        prop_assert!(hi.active_count() >= lo.active_count());
        prop_assert!(hi.capacity_nats() > lo.capacity_nats());
        prop_assert!(hi.water_level() > lo.water_level());
    }

    #[test]
    fn energy_balance_components_are_consistent(
        p in admissible(),
        s_total in 1e-3_f64..50.0,
    ) {
        let sol = solve_waterfill(&p, s_total).unwrap();
        let bal = energy_balance(&sol, &p);
        prop_assert!(bal.e_out >= 0.0);
        prop_assert!(bal.e_err > 0.0);
        // The filter only attenuates, so the noiseless output energy cannot
        // exceed what was put in.
        prop_assert!(bal.e_out <= bal.e_in * (1.0 + 1e-12));
        let sum = bal.e_out + bal.e_err;
        prop_assert!((bal.e_out_hat - sum).abs() <= 1e-12 * sum);
        prop_assert!((bal.e_in - s_total).abs() <= 1e-9 * s_total);
    }

    #[test]
    fn reverse_solution_reconstructs_its_distortion(
        p in admissible(),
        sigma2 in 0.1_f64..10.0,
        frac in 0.01_f64..0.99,
    ) {
        let source_energy = 0.5 * sigma2 / p.sinh_delta();
        let d_target = frac * source_energy;
        let sol = solve_reverse_waterfill(&p, d_target, sigma2).unwrap();
        let k = sol.coded_count();
        prop_assert!(k >= 1);
        let table = sol.water_table().unwrap();
        // Table sits strictly below the last coded variance and at or above
        // the first uncoded one.
        let var = |j: usize| sigma2 * (-(2.0 * j as f64 + 1.0) * p.delta()).exp();
        prop_assert!(var(k - 1) > table);
        prop_assert!(table >= var(k));
        // K table + tail reconstructs the requested distortion.
        let tail = var(k) / -(-2.0 * p.delta()).exp_m1();
        let rebuilt = k as f64 * table + tail;
        prop_assert!((rebuilt - d_target).abs() <= 1e-9 * d_target);
        prop_assert!(sol.rate_nats() > 0.0);
    }

    #[test]
    fn solvers_are_deterministic(p in admissible(), s_total in 1e-3_f64..50.0) {
        let a = solve_waterfill(&p, s_total).unwrap();
        let b = solve_waterfill(&p, s_total).unwrap();
        prop_assert_eq!(a.water_level().to_bits(), b.water_level().to_bits());
        prop_assert_eq!(a.capacity_nats().to_bits(), b.capacity_nats().to_bits());
        prop_assert_eq!(a.allocation(), b.allocation());
    }

    #[test]
    fn lambert_helper_round_trips_forward(y in 0.0_f64..20.0) {
        // x = 1 + (2y - 1) e^(2y) is the energy written as a function of
        // the half-log water level; w0 must recover y.
        let x = 1.0 + (2.0 * y - 1.0) * (2.0 * y).exp();
        let got = w0(x).unwrap();
        prop_assert!((got - y).abs() <= 1e-10 * y.max(1.0));
    }

    #[test]
    fn lambert_helper_round_trips_lower(y in 0.0_f64..30.0) {
        // x = (1 + 2y) e^(-2y) is the distortion ratio as a function of the
        // half-log table depth; wm1 must recover y.
        let x = (1.0 + 2.0 * y) * (-2.0 * y).exp();
        let got = wm1(x).unwrap();
        prop_assert!((got - y).abs() <= 1e-10 * y.max(1.0));
    }

    #[test]
    fn kernel_is_symmetric_and_positive(
        p in admissible(),
        u in -4.0_f64..4.0,
        v in -4.0_f64..4.0,
    ) {
        // Probe in the kernel's own coordinates: its Gaussian widths in
        // x - y and x + y are gamma sqrt(tanh(delta/2)) and
        // gamma / sqrt(tanh(delta/2)).  Points drawn in a fixed box would
        // underflow the kernel to zero whenever gamma is small, testing
        // nothing.
        let spread = (0.5 * p.delta()).tanh().sqrt();
        let diff = u * p.gamma() * spread;
        let sum = v * p.gamma() / spread;
        let (x, y) = (0.5 * (sum + diff), 0.5 * (sum - diff));
        let a = mehler_kernel(x, y, p.delta(), p.gamma()).unwrap();
        let b = mehler_kernel(y, x, p.delta(), p.gamma()).unwrap();
        prop_assert!(a > 0.0);
        prop_assert_eq!(a.to_bits(), b.to_bits());
    }
}
