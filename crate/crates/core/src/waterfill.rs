//! Discrete water-filling over the channel's subchannels, the matching
//! closed-form asymptotics, and the reverse (rate-distortion) solver.
//!
//! The exact solvers are the ground truth: they scan for the unique active
//! count `K` with closed-form geometric partial sums, so K-transition
//! boundaries are handled deterministically.  The closed forms (via the
//! [`crate::specfun::w0`]/[`crate::specfun::wm1`] maps) are asymptotic in
//! the time-bandwidth product `alpha*beta` and are kept separate — callers
//! see both routes and must not conflate them.

use crate::channel::{ChannelParams, FilterEigensystem};
use crate::error::{Error, Result};
use crate::specfun::{w0, wm1};

/// Hard cap on the scanned subchannel count.  This is far above anything a
/// sane parameter set produces (`K ~ (alpha*beta/2) ln(sigma2/theta2)`) and
/// exists only to turn runaway inputs into an error instead of a hang.
pub const MAX_SUBCHANNELS: usize = 1 << 20;

/// Exact solution of the discrete water-filling problem.
#[derive(Debug, Clone, PartialEq)]
pub struct WaterfillSolution {
    water_level: f64,
    active_count: usize,
    allocation: Vec<f64>,
    capacity_nats: f64,
    input_energy: f64,
}

impl WaterfillSolution {
    /// Water level `sigma2` (Ws).
    pub fn water_level(&self) -> f64 {
        self.water_level
    }

    /// Number of active subchannels `K`.
    pub fn active_count(&self) -> usize {
        self.active_count
    }

    /// Per-subchannel input energies `sigma2 - nu_k^2`, `k < K`.
    pub fn allocation(&self) -> &[f64] {
        &self.allocation
    }

    pub fn capacity_nats(&self) -> f64 {
        self.capacity_nats
    }

    pub fn capacity_bits(&self) -> f64 {
        self.capacity_nats * std::f64::consts::LOG2_E
    }

    /// Total input energy `S` (Ws).
    pub fn input_energy(&self) -> f64 {
        self.input_energy
    }
}

/// Solve the discrete water-filling problem for total input energy `s_total`.
///
/// Scans `K = 1, 2, ...` for the unique count with
/// `nu_{K-1}^2 < sigma2(K) <= nu_K^2` where
/// `sigma2(K) = (S + sum_{k<K} nu_k^2)/K`.  A subchannel whose noise
/// variance equals the water level exactly is *not* active (its allocation
/// would be zero).
pub fn solve_waterfill(params: &ChannelParams, s_total: f64) -> Result<WaterfillSolution> {
    if !(s_total > 0.0) || !s_total.is_finite() {
        return Err(Error::domain("s_total", s_total, "a positive finite energy"));
    }
    let eig = FilterEigensystem::new(*params);
    let mut k = 0usize;
    let (active_count, water_level) = loop {
        k += 1;
        if k > MAX_SUBCHANNELS {
            return Err(Error::TooManySubchannels {
                max: MAX_SUBCHANNELS,
            });
        }
        let level = (s_total + eig.noise_variance_partial_sum(k)) / k as f64;
        if level <= eig.noise_variance(k) {
            break (k, level);
        }
    };
    let allocation: Vec<f64> = (0..active_count)
        .map(|k| water_level - eig.noise_variance(k))
        .collect();
    let theta2 = params.theta2();
    let kk = active_count as f64;
    let capacity_nats =
        0.5 * (kk * (water_level / theta2).ln() - params.delta() * kk * kk);
    Ok(WaterfillSolution {
        water_level,
        active_count,
        allocation,
        capacity_nats,
        input_energy: s_total,
    })
}

/// Asymptotic capacity in bits:
/// `(alpha beta/2) [w0(S/((alpha beta/2) theta2))]^2 log2(e)`.
pub fn capacity_closed_form(params: &ChannelParams, s_total: f64) -> Result<f64> {
    if !(s_total >= 0.0) || !s_total.is_finite() {
        return Err(Error::domain("s_total", s_total, "a nonnegative finite energy"));
    }
    let half_ab = 0.5 * params.alphabeta();
    let v = w0(s_total / (half_ab * params.theta2()))?;
    Ok(half_ab * v * v * std::f64::consts::LOG2_E)
}

/// Asymptotic inverse of the water level: the input energy that a water
/// level `sigma2` absorbs, `(alpha beta/2) theta2 [m ln m - m + 1]` with
/// `m = sigma2/theta2`.  Dual to [`capacity_closed_form`].
pub fn input_energy_asymptotic(params: &ChannelParams, sigma2: f64) -> Result<f64> {
    let theta2 = params.theta2();
    if !(sigma2 >= theta2) || !sigma2.is_finite() {
        return Err(Error::domain("sigma2", sigma2, "sigma2 >= theta2"));
    }
    let m = sigma2 / theta2;
    Ok(0.5 * params.alphabeta() * theta2 * (m * m.ln() - m + 1.0))
}

/// Asymptotic active-subchannel count `(alpha beta/2) ln(sigma2/theta2)`.
pub fn active_subchannels_asymptotic(params: &ChannelParams, sigma2: f64) -> Result<f64> {
    if !(sigma2 > params.theta2()) || !sigma2.is_finite() {
        return Err(Error::domain("sigma2", sigma2, "sigma2 > theta2"));
    }
    Ok(0.5 * params.alphabeta() * (sigma2 / params.theta2()).ln())
}

/// Per-second rate in bit/s at average power `p` (W):
/// `(beta/2) [w0(P/((beta/2) theta2))]^2 log2(e)`.
pub fn rate_per_second(p: f64, beta: f64, theta2: f64) -> Result<f64> {
    for (name, v) in [("p", p), ("beta", beta), ("theta2", theta2)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::domain(name, v, "a positive finite value"));
        }
    }
    let half_beta = 0.5 * beta;
    let v = w0(p / (half_beta * theta2))?;
    Ok(half_beta * v * v * std::f64::consts::LOG2_E)
}

/// Spectral efficiency `C/W` of this channel at `snr = P/(W N0)`:
/// `[w0(2 snr)]^2 log2(e)` bit/s/Hz.
pub fn spectral_efficiency(snr: f64) -> Result<f64> {
    if !(snr >= 0.0) || !snr.is_finite() {
        return Err(Error::domain("snr", snr, "a nonnegative finite value"));
    }
    let v = w0(2.0 * snr)?;
    Ok(v * v * std::f64::consts::LOG2_E)
}

/// Classic bandlimited-AWGN capacity `W log2(1 + P/(W N0))` in bit/s.
pub fn shannon_bandlimited(p: f64, w: f64, n0: f64) -> Result<f64> {
    for (name, v) in [("p", p), ("w", w), ("n0", n0)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::domain(name, v, "a positive finite value"));
        }
    }
    Ok(w * (1.0 + p / (w * n0)).log2())
}

/// Asymptotic capacity in bits recovered from the measured output energy:
/// `(alpha beta/2) [ln sqrt(1 + E_out_hat/((alpha beta/2) theta2))]^2 log2(e)`.
pub fn capacity_from_output(params: &ChannelParams, e_out_hat: f64) -> Result<f64> {
    if !(e_out_hat >= 0.0) || !e_out_hat.is_finite() {
        return Err(Error::domain(
            "e_out_hat",
            e_out_hat,
            "a nonnegative finite energy",
        ));
    }
    let half_ab = 0.5 * params.alphabeta();
    let v = (1.0 + e_out_hat / (half_ab * params.theta2())).sqrt().ln();
    Ok(half_ab * v * v * std::f64::consts::LOG2_E)
}

/// Asymptotic output energy at water level `sigma2`:
/// `(alpha beta/2)(sigma2 - theta2)`.  Companion to [`capacity_from_output`].
pub fn output_energy_asymptotic(params: &ChannelParams, sigma2: f64) -> Result<f64> {
    if !(sigma2 >= params.theta2()) || !sigma2.is_finite() {
        return Err(Error::domain("sigma2", sigma2, "sigma2 >= theta2"));
    }
    Ok(0.5 * params.alphabeta() * (sigma2 - params.theta2()))
}

// ---------------------------------------------------------------------------
// Energy balance
// ---------------------------------------------------------------------------

/// Average energies around the channel for a water-filling solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBalance {
    /// Input energy `S`.
    pub e_in: f64,
    /// Noiseless output energy `sum_{k<K} (sigma_k^2 - theta2)`.
    pub e_out: f64,
    /// Measurement-noise energy `K theta2`.
    pub e_err: f64,
    /// Measured output energy `e_out + e_err = sum_{k<K} sigma_k^2`.
    pub e_out_hat: f64,
}

/// Energy balance of a water-filling solution; the per-subchannel output
/// powers are `sigma_k^2 = sigma2 rho^(2k+1)`.
pub fn energy_balance(sol: &WaterfillSolution, params: &ChannelParams) -> EnergyBalance {
    let k = sol.active_count();
    let d = params.delta();
    // sum_{k<K} sigma2 e^(-(2k+1) delta), geometric closed form.
    let e_out_hat =
        sol.water_level() * (-d).exp() * (-2.0 * d * k as f64).exp_m1() / (-2.0 * d).exp_m1();
    let e_err = k as f64 * params.theta2();
    EnergyBalance {
        e_in: sol.input_energy(),
        e_out: e_out_hat - e_err,
        e_err,
        e_out_hat,
    }
}

// ---------------------------------------------------------------------------
// Reverse water-filling (rate-distortion)
// ---------------------------------------------------------------------------

/// Exact solution of the reverse water-filling problem for the source with
/// component variances `sigma_k^2 = sigma2 rho^(2k+1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateDistortionSolution {
    water_table: Option<f64>,
    coded_count: usize,
    distortion: f64,
    rate_nats: f64,
    source_sigma2: f64,
    source_energy: f64,
}

impl RateDistortionSolution {
    /// Water table `theta2` (Ws); `None` on the zero-rate branch `D >= E`.
    pub fn water_table(&self) -> Option<f64> {
        self.water_table
    }

    /// Number of coded source components `K`.
    pub fn coded_count(&self) -> usize {
        self.coded_count
    }

    /// Target distortion `D` (Ws).
    pub fn distortion(&self) -> f64 {
        self.distortion
    }

    pub fn rate_nats(&self) -> f64 {
        self.rate_nats
    }

    pub fn rate_bits(&self) -> f64 {
        self.rate_nats * std::f64::consts::LOG2_E
    }

    /// Variance parameter `sigma2` of the source.
    pub fn source_sigma2(&self) -> f64 {
        self.source_sigma2
    }

    /// Total source energy `E = sigma2 rho/(1 - rho^2)`.
    pub fn source_energy(&self) -> f64 {
        self.source_energy
    }
}

/// Solve the reverse water-filling problem at distortion `d_target` for the
/// source with variances `sigma_k^2 = sigma2_src rho^(2k+1)`.
///
/// For `d_target >= E` (total source energy) the rate is zero and nothing
/// is coded.  Otherwise finds the unique `K` and water table `theta2` with
/// `sigma_{K-1}^2 > theta2 >= sigma_K^2` and
/// `D = K theta2 + sum_{k>=K} sigma_k^2`; a component whose variance equals
/// the water table exactly is *not* coded.
pub fn solve_reverse_waterfill(
    params: &ChannelParams,
    d_target: f64,
    sigma2_src: f64,
) -> Result<RateDistortionSolution> {
    if !(d_target > 0.0) || !d_target.is_finite() {
        return Err(Error::domain("d_target", d_target, "a positive finite energy"));
    }
    if !(sigma2_src > 0.0) || !sigma2_src.is_finite() {
        return Err(Error::domain("sigma2_src", sigma2_src, "a positive finite value"));
    }
    let delta = params.delta();
    let source_energy = 0.5 * sigma2_src / params.sinh_delta();
    if d_target >= source_energy {
        return Ok(RateDistortionSolution {
            water_table: None,
            coded_count: 0,
            distortion: d_target,
            rate_nats: 0.0,
            source_sigma2: sigma2_src,
            source_energy,
        });
    }
    // sigma_k^2 = sigma2 e^(-(2k+1) delta); tail(K) = sum_{k>=K} sigma_k^2.
    let sigma_sq = |k: usize| sigma2_src * (-delta * (2 * k + 1) as f64).exp();
    let tail = |k: usize| sigma_sq(k) / -(-2.0 * delta).exp_m1();
    let mut k = 0usize;
    let water_table = loop {
        k += 1;
        if k > MAX_SUBCHANNELS {
            return Err(Error::TooManySubchannels {
                max: MAX_SUBCHANNELS,
            });
        }
        let table = (d_target - tail(k)) / k as f64;
        if sigma_sq(k - 1) > table && table >= sigma_sq(k) {
            break table;
        }
    };
    let kk = k as f64;
    let rate_nats = 0.5 * (kk * (sigma2_src / water_table).ln() - delta * kk * kk);
    Ok(RateDistortionSolution {
        water_table: Some(water_table),
        coded_count: k,
        distortion: d_target,
        rate_nats,
        source_sigma2: sigma2_src,
        source_energy,
    })
}

/// Asymptotic rate-distortion function in nats:
/// `(alpha beta/2) [wm1(D/((alpha beta/2) sigma2))]^2`, and `0` beyond the
/// maximum distortion `(alpha beta/2) sigma2`.
pub fn rd_closed_form(params: &ChannelParams, d_target: f64, sigma2_src: f64) -> Result<f64> {
    if !(d_target > 0.0) || !d_target.is_finite() {
        return Err(Error::domain("d_target", d_target, "a positive finite energy"));
    }
    if !(sigma2_src > 0.0) || !sigma2_src.is_finite() {
        return Err(Error::domain("sigma2_src", sigma2_src, "a positive finite value"));
    }
    let half_ab = 0.5 * params.alphabeta();
    let ratio = d_target / (half_ab * sigma2_src);
    if ratio > 1.0 {
        return Ok(0.0);
    }
    let v = wm1(ratio)?;
    Ok(half_ab * v * v)
}

/// Asymptotic distortion absorbed by a water table `theta2`:
/// `(alpha beta/2) theta2 [ln(sigma2/theta2) + 1]`.  Dual to
/// [`rd_closed_form`] the way [`input_energy_asymptotic`] is dual to
/// [`capacity_closed_form`].
pub fn distortion_asymptotic(
    params: &ChannelParams,
    theta2_table: f64,
    sigma2_src: f64,
) -> Result<f64> {
    if !(theta2_table > 0.0) || !theta2_table.is_finite() {
        return Err(Error::domain("theta2_table", theta2_table, "a positive finite value"));
    }
    if !(sigma2_src >= theta2_table) || !sigma2_src.is_finite() {
        return Err(Error::domain("sigma2_src", sigma2_src, "sigma2_src >= theta2_table"));
    }
    Ok(0.5 * params.alphabeta() * theta2_table * ((sigma2_src / theta2_table).ln() + 1.0))
}
