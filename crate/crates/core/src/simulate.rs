//! Seeded Monte-Carlo verification of the measurement model, and the
//! estimation-theoretic quantities (LLSE, MMSE, capacity derivative) tied
//! to it.
//!
//! # Reproducibility
//!
//! Randomness comes from ChaCha8 with one logical stream per
//! `(trial, subchannel, role)` triple, derived from a single 64-bit seed.
//! Results are therefore bit-reproducible for a fixed seed and
//! configuration, independent of evaluation order.
//!
//! # snr convention for the estimation quantities
//!
//! Following the usual normalization, the source power is `sigma2 = 1` and
//! `snr = 1/theta2`, so `snr` is the water-level-to-noise ratio; the
//! channel only enters through `alpha*beta` (via `delta`).

use crate::channel::{
    apply_filter_coeff, apply_filter_waveform, ChannelParams, FilterEigensystem, Grid,
};
use crate::error::{Error, Result};
use crate::specfun::MAX_HERMITE_ORDER;
use crate::waterfill::{energy_balance, solve_waterfill, WaterfillSolution};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Where the measurement noise is injected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurementMode {
    /// Add `n_k ~ N(0, theta2)` directly to the filtered coefficients —
    /// exactly the channel's defining measurement model.
    Coefficient,
    /// Render the waveform, filter it by quadrature, add white noise
    /// samples, and recover coefficients by projection onto the
    /// eigenfunctions (a matched-filter bank).
    Waveform,
}

/// Full description of a simulation run.
#[derive(Debug, Clone, Copy)]
pub struct SimulationConfig {
    pub params: ChannelParams,
    /// Total input energy `S` (Ws) put through the water-filling solver.
    pub input_energy: f64,
    pub trials: usize,
    pub seed: u64,
    pub mode: MeasurementMode,
    /// Sampling grid; required in waveform mode, ignored otherwise.
    pub grid: Option<Grid>,
}

/// Sample statistics of a simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    /// Per-subchannel sample variance of the measurement error
    /// `yhat_k - y_k` (expected: `theta2`).
    pub noise_var: Vec<f64>,
    /// Per-subchannel sample variance of the estimation error
    /// `xhat_k - x_k` (expected: `theta2 rho^(-2k-1)`).
    pub estimate_err_var: Vec<f64>,
    /// Largest absolute off-diagonal correlation among the measurement
    /// errors (expected: ~0, the errors are independent).
    pub max_cross_corr: f64,
    /// Sample means of the per-trial energies.
    pub mean_e_in: f64,
    pub mean_e_out: f64,
    pub mean_e_err: f64,
    pub mean_e_out_hat: f64,
    /// Sample standard deviation of the per-trial measured output energy.
    pub std_e_out_hat: f64,
    /// Analytic `E[sum yhat_k^2] = sum sigma_k^2` for this solution.
    pub expected_e_out_hat: f64,
    /// Capacity of the underlying water-filling solution, for reference.
    pub capacity_reference_bits: f64,
    pub active_count: usize,
    pub trials: usize,
}

// Stream-id packing: (trial << 21) | (subchannel << 2) | role.
const LANE_INPUT: u64 = 0;
const LANE_COEFF_NOISE: u64 = 1;
const LANE_WAVEFORM_NOISE: u64 = 2;
const MAX_STREAM_SUBCHANNELS: usize = 1 << 19;

fn stream_rng(base: &ChaCha8Rng, trial: u64, subchannel: u64, lane: u64) -> ChaCha8Rng {
    let mut rng = base.clone();
    rng.set_stream((trial << 21) | (subchannel << 2) | lane);
    rng
}

/// Draw one trial's input coefficients `x_k ~ N(0, sigma2 - nu_k^2)` for
/// the active subchannels of a water-filling solution.
pub fn synthesize_coefficients(
    sol: &WaterfillSolution,
    base: &ChaCha8Rng,
    trial: u64,
) -> Vec<f64> {
    sol.allocation()
        .iter()
        .enumerate()
        .map(|(k, &var)| {
            let z: f64 = stream_rng(base, trial, k as u64, LANE_INPUT).sample(StandardNormal);
            var.sqrt() * z
        })
        .collect()
}

/// Render `f(t) = sum_k x_k (D_gamma psi_k)(t)` on a grid.
pub fn render_waveform(params: &ChannelParams, coeffs: &[f64], grid: &Grid) -> Result<Vec<f64>> {
    if coeffs.is_empty() {
        return Ok(vec![0.0; grid.count()]);
    }
    let basis = params.basis(coeffs.len() - 1)?;
    grid.points()
        .map(|t| {
            let values = basis.eval_upto(t, coeffs.len())?;
            Ok(values.iter().zip(coeffs).map(|(v, x)| v * x).sum())
        })
        .collect()
}

/// Recover the first `count` basis coefficients of a sampled waveform by
/// grid quadrature of the projection integrals.
pub fn project_coefficients(
    params: &ChannelParams,
    samples: &[f64],
    grid: &Grid,
    count: usize,
) -> Result<Vec<f64>> {
    if samples.len() != grid.count() {
        return Err(Error::InadequateGrid {
            reason: format!(
                "waveform has {} samples but the grid has {} points",
                samples.len(),
                grid.count()
            ),
        });
    }
    if count == 0 {
        return Ok(Vec::new());
    }
    let basis = params.basis(count - 1)?;
    let mut acc = vec![0.0; count];
    for (j, t) in grid.points().enumerate() {
        let values = basis.eval_upto(t, count)?;
        for (a, v) in acc.iter_mut().zip(&values) {
            *a += v * samples[j];
        }
    }
    for a in &mut acc {
        *a *= grid.step();
    }
    Ok(acc)
}

/// One measured trial: filter outputs `y_k`, measurements `yhat_k`, and
/// input estimates `xhat_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasuredTrial {
    pub filtered: Vec<f64>,
    pub measured: Vec<f64>,
    pub estimates: Vec<f64>,
}

/// Apply the coefficient-space measurement model with an explicit noise
/// vector: `yhat_k = rho^(k+1/2) x_k + n_k`, `xhat_k = rho^(-k-1/2) yhat_k`.
///
/// The estimate is formed as `x_k + rho^(-k-1/2) n_k` — algebraically the
/// same, but exact (not merely close) when a noise entry is zero.
pub fn measure_coefficients(
    params: &ChannelParams,
    coeffs: &[f64],
    noise: &[f64],
) -> Result<MeasuredTrial> {
    if coeffs.len() != noise.len() {
        return Err(Error::domain(
            "noise",
            noise.len() as f64,
            "one noise entry per coefficient",
        ));
    }
    let filtered = apply_filter_coeff(params, coeffs)?;
    let measured: Vec<f64> = filtered.iter().zip(noise).map(|(y, n)| y + n).collect();
    let estimates: Vec<f64> = coeffs
        .iter()
        .zip(noise)
        .enumerate()
        .map(|(k, (x, n))| x + n * (params.delta() * (k as f64 + 0.5)).exp())
        .collect();
    Ok(MeasuredTrial {
        filtered,
        measured,
        estimates,
    })
}

/// Run a full seeded Monte-Carlo experiment.
pub fn run_simulation(config: &SimulationConfig) -> Result<SimulationReport> {
    if config.trials == 0 {
        return Err(Error::domain("trials", 0.0, "at least one trial"));
    }
    let params = config.params;
    let sol = solve_waterfill(&params, config.input_energy)?;
    let k_count = sol.active_count();
    if k_count > MAX_STREAM_SUBCHANNELS {
        return Err(Error::TooManySubchannels {
            max: MAX_STREAM_SUBCHANNELS,
        });
    }

    // Waveform mode: validate the grid and precompute the basis matrix.
    let waveform_setup = match config.mode {
        MeasurementMode::Coefficient => None,
        MeasurementMode::Waveform => {
            let grid = config.grid.ok_or_else(|| Error::InadequateGrid {
                reason: "waveform mode requires a sampling grid".into(),
            })?;
            grid.validate_for_filter(&params)?;
            if k_count > MAX_HERMITE_ORDER + 1 {
                return Err(Error::OrderTooLarge {
                    order: k_count - 1,
                    max: MAX_HERMITE_ORDER,
                });
            }
            let basis = params.basis(k_count - 1)?;
            let n = grid.count();
            let mut phi = vec![vec![0.0; n]; k_count];
            for (j, t) in grid.points().enumerate() {
                let values = basis.eval_upto(t, k_count)?;
                for (row, v) in phi.iter_mut().zip(&values) {
                    row[j] = *v;
                }
            }
            Some((grid, phi))
        }
    };

    let base = ChaCha8Rng::seed_from_u64(config.seed);
    let theta = params.theta2().sqrt();
    let inv_gain: Vec<f64> = (0..k_count)
        .map(|k| (params.delta() * (k as f64 + 0.5)).exp())
        .collect();

    let n_pairs = k_count * (k_count - 1) / 2;
    let mut sum_d = vec![0.0; k_count];
    let mut sum_d2 = vec![0.0; k_count];
    let mut sum_e = vec![0.0; k_count];
    let mut sum_e2 = vec![0.0; k_count];
    let mut sum_cross = vec![0.0; n_pairs];
    let mut sum_e_in = 0.0;
    let mut sum_e_out = 0.0;
    let mut sum_e_err = 0.0;
    let mut sum_e_out_hat = 0.0;
    let mut sum_e_out_hat2 = 0.0;

    let mut d = vec![0.0; k_count];
    for trial in 0..config.trials {
        let t64 = trial as u64;
        let x = synthesize_coefficients(&sol, &base, t64);
        let y = apply_filter_coeff(&params, &x)?;
        let yhat: Vec<f64> = match &waveform_setup {
            None => {
                let noise: Vec<f64> = (0..k_count)
                    .map(|k| {
                        let z: f64 = stream_rng(&base, t64, k as u64, LANE_COEFF_NOISE)
                            .sample(StandardNormal);
                        theta * z
                    })
                    .collect();
                y.iter().zip(&noise).map(|(yk, n)| yk + n).collect()
            }
            Some((grid, phi)) => {
                let n = grid.count();
                let f: Vec<f64> = (0..n)
                    .map(|j| phi.iter().zip(&x).map(|(row, xk)| row[j] * xk).sum())
                    .collect();
                let g = apply_filter_waveform(&params, &f, grid)?;
                // White noise on the grid: i.i.d. samples of variance
                // theta2/step, so that projections see variance theta2.
                let mut wrng = stream_rng(&base, t64, 0, LANE_WAVEFORM_NOISE);
                let noise_std = (params.theta2() / grid.step()).sqrt();
                let ghat: Vec<f64> = g
                    .iter()
                    .map(|gj| {
                        let z: f64 = wrng.sample(StandardNormal);
                        gj + noise_std * z
                    })
                    .collect();
                phi.iter()
                    .map(|row| {
                        grid.step() * row.iter().zip(&ghat).map(|(p, s)| p * s).sum::<f64>()
                    })
                    .collect()
            }
        };

        let mut e_in = 0.0;
        let mut e_out = 0.0;
        let mut e_out_hat = 0.0;
        let mut e_err = 0.0;
        for k in 0..k_count {
            d[k] = yhat[k] - y[k];
            let est_err = d[k] * inv_gain[k];
            sum_d[k] += d[k];
            sum_d2[k] += d[k] * d[k];
            sum_e[k] += est_err;
            sum_e2[k] += est_err * est_err;
            e_in += x[k] * x[k];
            e_out += y[k] * y[k];
            e_out_hat += yhat[k] * yhat[k];
            e_err += d[k] * d[k];
        }
        let mut idx = 0;
        for i in 0..k_count {
            for j in (i + 1)..k_count {
                sum_cross[idx] += d[i] * d[j];
                idx += 1;
            }
        }
        sum_e_in += e_in;
        sum_e_out += e_out;
        sum_e_err += e_err;
        sum_e_out_hat += e_out_hat;
        sum_e_out_hat2 += e_out_hat * e_out_hat;
    }

    let nf = config.trials as f64;
    let sample_var = |sum: f64, sum_sq: f64| {
        if config.trials < 2 {
            0.0
        } else {
            ((sum_sq - sum * sum / nf) / (nf - 1.0)).max(0.0)
        }
    };
    let noise_var: Vec<f64> = (0..k_count)
        .map(|k| sample_var(sum_d[k], sum_d2[k]))
        .collect();
    let estimate_err_var: Vec<f64> = (0..k_count)
        .map(|k| sample_var(sum_e[k], sum_e2[k]))
        .collect();
    let mut max_cross_corr: f64 = 0.0;
    if config.trials >= 2 {
        let mut idx = 0;
        for i in 0..k_count {
            for j in (i + 1)..k_count {
                let cov = (sum_cross[idx] - sum_d[i] * sum_d[j] / nf) / (nf - 1.0);
                let denom = (noise_var[i] * noise_var[j]).sqrt();
                if denom > 0.0 {
                    max_cross_corr = max_cross_corr.max((cov / denom).abs());
                }
                idx += 1;
            }
        }
    }
    let bal = energy_balance(&sol, &params);
    Ok(SimulationReport {
        noise_var,
        estimate_err_var,
        max_cross_corr,
        mean_e_in: sum_e_in / nf,
        mean_e_out: sum_e_out / nf,
        mean_e_err: sum_e_err / nf,
        mean_e_out_hat: sum_e_out_hat / nf,
        std_e_out_hat: sample_var(sum_e_out_hat, sum_e_out_hat2).sqrt(),
        expected_e_out_hat: bal.e_out_hat,
        capacity_reference_bits: sol.capacity_bits(),
        active_count: k_count,
        trials: config.trials,
    })
}

// ---------------------------------------------------------------------------
// Estimation quantities
// ---------------------------------------------------------------------------

fn check_snr(snr: f64) -> Result<f64> {
    if !(snr >= 1.0) || !snr.is_finite() {
        return Err(Error::domain("snr", snr, "snr >= 1"));
    }
    Ok(snr)
}

/// Number of subchannels active at water level `snr * theta2`, i.e.
/// `#{k : (2k+1) delta < ln snr}`.
pub fn active_count_at_snr(params: &ChannelParams, snr: f64) -> Result<usize> {
    check_snr(snr)?;
    Ok(FilterEigensystem::new(*params).count_scaled_above_one(snr))
}

/// Exact linear-estimator error energy `K/snr` (source power normalized
/// to 1).
pub fn llse_exact(params: &ChannelParams, snr: f64) -> Result<f64> {
    let k = active_count_at_snr(params, snr)?;
    Ok(k as f64 / snr)
}

/// Asymptotic LLSE `(alpha beta/2) (ln snr)/snr`.
pub fn llse_asymptotic(params: &ChannelParams, snr: f64) -> Result<f64> {
    check_snr(snr)?;
    Ok(0.5 * params.alphabeta() * snr.ln() / snr)
}

/// Exact MMSE `sum_{k<K} (1/snr)(1 - rho^(-2k-1)/snr)`, summed in closed
/// geometric form.
pub fn mmse_exact(params: &ChannelParams, snr: f64) -> Result<f64> {
    let k = active_count_at_snr(params, snr)?;
    if k == 0 {
        return Ok(0.0);
    }
    let d = params.delta();
    let inv_sum = d.exp() * (2.0 * d * k as f64).exp_m1() / (2.0 * d).exp_m1();
    Ok(k as f64 / snr - inv_sum / (snr * snr))
}

/// Asymptotic MMSE `llse_asymptotic - (alpha beta/2)(1/snr)(1 - 1/snr)`.
pub fn mmse_asymptotic(params: &ChannelParams, snr: f64) -> Result<f64> {
    let llse = llse_asymptotic(params, snr)?;
    Ok(llse - 0.5 * params.alphabeta() / snr * (1.0 - 1.0 / snr))
}

/// Asymptotic LLSE per degree of freedom: `(1/2)(ln snr)/snr`.
pub fn llse_per_dof(snr: f64) -> Result<f64> {
    check_snr(snr)?;
    Ok(0.5 * snr.ln() / snr)
}

/// Asymptotic MMSE per degree of freedom:
/// `llse_per_dof - (1/2)(1/snr)(1 - 1/snr)`.
pub fn mmse_per_dof(snr: f64) -> Result<f64> {
    Ok(llse_per_dof(snr)? - 0.5 / snr * (1.0 - 1.0 / snr))
}

/// Smooth capacity approximation `C0(snr) = (alpha beta/8)(ln snr)^2` nats.
pub fn capacity_c0(params: &ChannelParams, snr: f64) -> Result<f64> {
    check_snr(snr)?;
    let l = snr.ln();
    Ok(params.alphabeta() / 8.0 * l * l)
}

/// Analytic derivative `dC0/dsnr = (alpha beta/4)(ln snr)/snr`.
pub fn capacity_c0_derivative(params: &ChannelParams, snr: f64) -> Result<f64> {
    check_snr(snr)?;
    Ok(params.alphabeta() / 4.0 * snr.ln() / snr)
}

/// Exact capacity at water-level ratio `snr`:
/// `(1/2)(K ln snr - delta K^2)` nats, piecewise smooth with convex kinks
/// where `K` increments.
pub fn capacity_exact_at_snr(params: &ChannelParams, snr: f64) -> Result<f64> {
    let k = active_count_at_snr(params, snr)? as f64;
    Ok(0.5 * (k * snr.ln() - params.delta() * k * k))
}

/// The snr values `e^((2k+1) delta)` (for `k = 0, 1, ...` up to `snr_max`)
/// where the active count increments and the capacity curve kinks.
pub fn kink_snrs(params: &ChannelParams, snr_max: f64) -> Vec<f64> {
    let d = params.delta();
    (0..)
        .map(|k| (d * (2 * k + 1) as f64).exp())
        .take_while(|&s| s <= snr_max)
        .collect()
}

/// One row of the capacity-derivative comparison table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CLlseRow {
    pub snr: f64,
    pub active_count: usize,
    /// Central finite difference of `C0` (step `snr * 1e-6`).
    pub dc0_fd: f64,
    /// Analytic `dC0/dsnr`.
    pub dc0_analytic: f64,
    /// `(1/2) llse_exact`.
    pub half_llse_exact: f64,
    /// `(1/2) llse_asymptotic`.
    pub half_llse_asymptotic: f64,
    /// `(1/2)[mmse_exact + (alpha beta/2)(1/snr)(1 - 1/snr)]`.
    pub half_mmse_corrected: f64,
}

/// Tabulate `dC0/dsnr` (finite-difference and analytic) against its two
/// estimation-theoretic identities over an snr grid in `(1, inf)`.
pub fn c_llse_check(params: &ChannelParams, snr_grid: &[f64]) -> Result<Vec<CLlseRow>> {
    snr_grid
        .iter()
        .map(|&snr| {
            if !(snr > 1.0) || !snr.is_finite() {
                return Err(Error::domain("snr", snr, "snr > 1"));
            }
            let h = snr * 1e-6;
            let dc0_fd =
                (capacity_c0(params, snr + h)? - capacity_c0(params, snr - h)?) / (2.0 * h);
            let correction = 0.5 * params.alphabeta() / snr * (1.0 - 1.0 / snr);
            Ok(CLlseRow {
                snr,
                active_count: active_count_at_snr(params, snr)?,
                dc0_fd,
                dc0_analytic: capacity_c0_derivative(params, snr)?,
                half_llse_exact: 0.5 * llse_exact(params, snr)?,
                half_llse_asymptotic: 0.5 * llse_asymptotic(params, snr)?,
                half_mmse_corrected: 0.5 * (mmse_exact(params, snr)? + correction),
            })
        })
        .collect()
}
