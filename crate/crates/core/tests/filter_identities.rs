//! Cross-route identities of the localization filter: the closed-form
//! kernel against its eigen-expansion, the semigroup and trace laws, the
//! eigenfunction action of the quadrature filter, coefficient-space vs
//! waveform-space filtering, and the time-frequency symmetry under the
//! Fourier transform.

use heatchan::channel::{
    apply_filter_coeff, apply_filter_waveform, mehler_kernel, weyl_symbol, ChannelParams,
    FilterEigensystem, Grid,
};
use heatchan::quad::{integrate, integrate_2d};
use heatchan::simulate::{project_coefficients, render_waveform};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn small_band() -> ChannelParams {
    ChannelParams::new(1.0, 5.0, 0.1).unwrap()
}

fn medium_band() -> ChannelParams {
    ChannelParams::new(1.0, 8.0, 0.1).unwrap()
}

#[test]
fn kernel_matches_eigen_expansion() {
    // sup over a 50x50 grid of |closed-form kernel - truncated eigensum|.
    // 160 terms leave the geometric tail below 1e-13 at this delta.
    let p = small_band();
    let eig = FilterEigensystem::new(p);
    let modes = 160;
    let xs: Vec<f64> = (0..50).map(|i| -3.0 + 6.0 * i as f64 / 49.0).collect();
    let basis = p.basis(modes - 1).unwrap();
    let at: Vec<Vec<f64>> = xs
        .iter()
        .map(|&x| basis.eval_upto(x, modes).unwrap())
        .collect();
    let mut sup = 0.0_f64;
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in xs.iter().enumerate() {
            let series: f64 = (0..modes)
                .map(|k| eig.filter_eigenvalue(k) * at[i][k] * at[j][k])
                .sum();
            let closed = mehler_kernel(x, y, p.delta(), p.gamma()).unwrap();
            sup = sup.max((series - closed).abs());
        }
    }
    assert!(sup <= 1e-8, "sup deviation {sup}");
}

#[test]
fn kernel_semigroup_under_composition() {
    // Integrating the kernel against itself doubles the generator time.
    let p = small_band();
    let (d, g) = (p.delta(), p.gamma());
    for &(x, y) in &[(0.0, 0.0), (0.5, -0.25), (1.5, 1.0), (-2.0, 0.75)] {
        let composed = integrate(
            |z| mehler_kernel(x, z, d, g).unwrap() * mehler_kernel(z, y, d, g).unwrap(),
            -6.0,
            6.0,
            1e-11,
        );
        let direct = mehler_kernel(x, y, 2.0 * d, g).unwrap();
        assert!(
            (composed - direct).abs() <= 1e-7,
            "({x},{y}): composed {composed} vs direct {direct}"
        );
    }
}

#[test]
fn kernel_trace_equals_eigenvalue_sum() {
    // trace of the doubled-time kernel = sum of squared eigenvalues.
    let p = small_band();
    let on_diagonal = integrate(
        |x| mehler_kernel(x, x, 2.0 * p.delta(), p.gamma()).unwrap(),
        -8.0,
        8.0,
        1e-12,
    );
    let eig = FilterEigensystem::new(p);
    let want = eig.squared_eigenvalue_sum();
    assert!(
        (on_diagonal - want).abs() <= 1e-10,
        "trace {on_diagonal} vs {want}"
    );
}

#[test]
fn symbol_mass_equals_eigenvalue_sum() {
    // (1/2 pi) integral of the symbol over the phase plane reproduces the
    // same eigenvalue sum — the plane-integral counterpart of the trace.
    let p = small_band();
    let mass = integrate_2d(
        |t, w| weyl_symbol(t, w, &p) / (2.0 * std::f64::consts::PI),
        (-7.0 * p.alpha(), 7.0 * p.alpha()),
        (-7.0 * p.beta(), 7.0 * p.beta()),
        1e-12,
    );
    let want = FilterEigensystem::new(p).squared_eigenvalue_sum();
    assert!((mass - want).abs() <= 1e-10, "mass {mass} vs {want}");
}

#[test]
fn quadrature_filter_reproduces_eigenfunction_action() {
    // Filtering the k-th basis function by the waveform route scales it by
    // the k-th eigenvalue.
    let p = medium_band();
    let grid = Grid::symmetric(6.5, 1.0 / 32.0).unwrap();
    grid.validate_for_filter(&p).unwrap();
    let eig = FilterEigensystem::new(p);
    for k in 0..=16 {
        let f: Vec<f64> = grid.points().map(|t| eig.eigenfunction(k, t).unwrap()).collect();
        let out = apply_filter_waveform(&p, &f, &grid).unwrap();
        let lambda = eig.filter_eigenvalue(k);
        let mut worst = 0.0_f64;
        for (j, t) in grid.points().enumerate() {
            if t.abs() <= 2.5 {
                worst = worst.max((out[j] - lambda * f[j]).abs());
            }
        }
        assert!(worst <= 1e-6, "mode {k}: worst deviation {worst}");
    }
}

#[test]
fn coefficient_and_waveform_filters_agree_on_random_input() {
    let p = medium_band();
    let grid = Grid::symmetric(6.5, 1.0 / 32.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(424242);
    let coeffs: Vec<f64> = (0..8).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let y_coeff = apply_filter_coeff(&p, &coeffs).unwrap();
    let f = render_waveform(&p, &coeffs, &grid).unwrap();
    let filtered = apply_filter_waveform(&p, &f, &grid).unwrap();
    let y_wave = project_coefficients(&p, &filtered, &grid, coeffs.len()).unwrap();
    for (k, (a, b)) in y_coeff.iter().zip(&y_wave).enumerate() {
        assert!((a - b).abs() <= 1e-6, "coefficient {k}: {a} vs {b}");
    }
}

#[test]
fn pulse_train_filters_identically_by_both_routes() {
    // A signal that is not a finite basis combination: four narrow Gaussian
    // pulses.  The coefficient route truncates at the basis cap; with
    // pulse width 0.05 against basis scale gamma = 0.1 the truncated tail
    // stays below the comparison tolerance.
    let p = ChannelParams::new(1.0, 100.0, 0.01).unwrap();
    let grid = Grid::symmetric(6.1, 0.0025).unwrap();
    grid.validate_for_filter(&p).unwrap();
    let centers = [-1.2, -0.3, 0.45, 1.05];
    let amps = [0.8, -1.1, 0.6, 0.9];
    let pulse_std = 0.05;
    let f: Vec<f64> = grid
        .points()
        .map(|t| {
            centers
                .iter()
                .zip(&amps)
                .map(|(&c, &a)| a * (-(t - c) * (t - c) / (2.0 * pulse_std * pulse_std)).exp())
                .sum()
        })
        .collect();
    let direct = apply_filter_waveform(&p, &f, &grid).unwrap();
    let count = heatchan::specfun::MAX_HERMITE_ORDER + 1;
    let coeffs = project_coefficients(&p, &f, &grid, count).unwrap();
    let filtered_coeffs = apply_filter_coeff(&p, &coeffs).unwrap();
    let via_coeff = render_waveform(&p, &filtered_coeffs, &grid).unwrap();
    let mut worst = 0.0_f64;
    for (j, t) in grid.points().enumerate() {
        if t.abs() <= 3.0 {
            worst = worst.max((direct[j] - via_coeff[j]).abs());
        }
    }
    assert!(worst <= 1e-5, "route deviation {worst}");
}

#[test]
fn filter_commutes_with_fourier_transform_up_to_parameter_swap() {
    // The transform of the filtered signal equals the swapped-parameter
    // filter applied to the transform: time and frequency localization
    // exchange roles (alpha <-> beta; the generator time is unchanged).
    let p = medium_band();
    let swapped = ChannelParams::new(p.beta(), p.alpha(), p.theta2()).unwrap();
    let t_grid = Grid::symmetric(6.5, 1.0 / 32.0).unwrap();
    let w_grid = Grid::symmetric(49.0, 0.125).unwrap();
    w_grid.validate_for_filter(&swapped).unwrap();

    // Even test signal, so its transform is real and the swapped filter
    // (which acts on real samples) applies directly.
    let sig: Vec<f64> = t_grid
        .points()
        .map(|t| {
            let bump = |c: f64| (-(t - c) * (t - c) / (2.0 * 0.09)).exp();
            bump(0.8) + bump(-0.8)
        })
        .collect();
    let transform = |samples: &[f64]| -> Vec<f64> {
        let norm = t_grid.step() / (2.0 * std::f64::consts::PI).sqrt();
        w_grid
            .points()
            .map(|w| {
                let acc: Complex64 = samples
                    .iter()
                    .zip(t_grid.points())
                    .map(|(&s, t)| s * Complex64::new(0.0, -t * w).exp())
                    .sum();
                let val = acc * norm;
                assert!(val.im.abs() < 1e-12, "transform not real at {w}");
                val.re
            })
            .collect()
    };

    let filtered_then_transformed = transform(&apply_filter_waveform(&p, &sig, &t_grid).unwrap());
    let transformed_then_filtered =
        apply_filter_waveform(&swapped, &transform(&sig), &w_grid).unwrap();
    let peak = transform(&sig)
        .iter()
        .fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut worst = 0.0_f64;
    for (a, b) in filtered_then_transformed
        .iter()
        .zip(&transformed_then_filtered)
    {
        worst = worst.max((a - b).abs());
    }
    assert!(
        worst <= 1e-5 * peak,
        "worst deviation {worst} against transform peak {peak}"
    );
}
