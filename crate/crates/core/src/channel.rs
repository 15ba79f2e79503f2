//! Channel parameterization and the time-frequency localization filter.
//!
//! The channel concentrates its input on an ellipse of the time-frequency
//! plane with time scale `alpha` and frequency scale `beta` (admissible only
//! for `alpha*beta > 1`) and adds white Gaussian noise of two-sided spectral
//! density `theta2`.  Everything else in the crate is phrased in terms of
//! the derived quantities kept in [`ChannelParams`]:
//!
//! ```text
//! gamma = sqrt(alpha/beta)        eigenfunction dilation
//! delta = artanh(1/(alpha*beta))  filter "temperature"
//! rho   = e^(-delta)              eigenvalue base
//! ```
//!
//! The filter has eigenvalues `rho^(k+1/2)` on the dilated Hermite basis;
//! its integral kernel has the Gaussian (Mehler) closed form implemented in
//! [`mehler_kernel`].

use crate::error::{Error, Result};
use crate::specfun::{HermiteBasis, MAX_HERMITE_ORDER};

/// Validated channel parameters plus the derived filter constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    alpha: f64,
    beta: f64,
    theta2: f64,
    gamma: f64,
    delta: f64,
    rho: f64,
}

impl ChannelParams {
    /// Build parameters from the time scale `alpha` (s), frequency scale
    /// `beta` (Hz), and noise density `theta2 = N0/2` (W/Hz).
    pub fn new(alpha: f64, beta: f64, theta2: f64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta), ("theta2", theta2)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::domain(name, v, "a positive finite value"));
            }
        }
        let product = alpha * beta;
        if product <= 1.0 {
            return Err(Error::Inadmissible {
                alpha,
                beta,
                product,
            });
        }
        // artanh(1/(alpha beta)) stays accurate as alpha*beta -> infinity,
        // where the subtraction inside arccoth's log form would cancel.
        let delta = (1.0 / product).atanh();
        Ok(ChannelParams {
            alpha,
            beta,
            theta2,
            gamma: (alpha / beta).sqrt(),
            delta,
            rho: (-delta).exp(),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Noise density `theta2 = N0/2` in W/Hz.
    pub fn theta2(&self) -> f64 {
        self.theta2
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Time-bandwidth product `alpha * beta` (= coth delta).
    pub fn alphabeta(&self) -> f64 {
        self.alpha * self.beta
    }

    /// One-sided bandwidth `W = beta/2` in Hz.
    pub fn bandwidth(&self) -> f64 {
        0.5 * self.beta
    }

    /// One-sided noise spectral density `N0 = 2 theta2`.
    pub fn noise_psd(&self) -> f64 {
        2.0 * self.theta2
    }

    pub fn cosh_delta(&self) -> f64 {
        self.delta.cosh()
    }

    pub fn sinh_delta(&self) -> f64 {
        self.delta.sinh()
    }

    /// Dilated Hermite basis at this channel's `gamma`, capped at `max_order`.
    pub fn basis(&self, max_order: usize) -> Result<HermiteBasis> {
        HermiteBasis::new(self.gamma, max_order)
    }
}

/// Spectral data of the filter and of its square (the operator that governs
/// noise amplification and phase-plane densities).
#[derive(Debug, Clone, Copy)]
pub struct FilterEigensystem {
    params: ChannelParams,
}

impl FilterEigensystem {
    pub fn new(params: ChannelParams) -> Self {
        FilterEigensystem { params }
    }

    /// Filter eigenvalue `rho^(k+1/2)`.
    pub fn filter_eigenvalue(&self, k: usize) -> f64 {
        (-self.params.delta * (k as f64 + 0.5)).exp()
    }

    /// Eigenvalue `lambda_k = rho^(2k+1)` of the squared filter.
    pub fn squared_eigenvalue(&self, k: usize) -> f64 {
        (-self.params.delta * (2 * k + 1) as f64).exp()
    }

    /// Effective noise variance `nu_k^2 = theta2 * rho^(-2k-1)` seen by
    /// subchannel `k` after gain equalization.
    pub fn noise_variance(&self, k: usize) -> f64 {
        self.params.theta2 * (self.params.delta * (2 * k + 1) as f64).exp()
    }

    /// `sum_{k<n} nu_k^2` in closed (geometric) form.
    pub fn noise_variance_partial_sum(&self, n: usize) -> f64 {
        if n == 0 {
            return 0.0;
        }
        let d = self.params.delta;
        self.params.theta2 * d.exp() * (2.0 * d * n as f64).exp_m1() / (2.0 * d).exp_m1()
    }

    /// `sum_{k<n} lambda_k` in closed form.
    pub fn squared_eigenvalue_partial_sum(&self, n: usize) -> f64 {
        if n == 0 {
            return 0.0;
        }
        let d = self.params.delta;
        (-d).exp() * (-2.0 * d * n as f64).exp_m1() / (-2.0 * d).exp_m1()
    }

    /// `sum_{k>=0} lambda_k = rho/(1 - rho^2) = 1/(2 sinh delta)`.
    pub fn squared_eigenvalue_sum(&self) -> f64 {
        0.5 / self.params.sinh_delta()
    }

    /// Eigenfunction `(D_gamma psi_k)(t)`.
    pub fn eigenfunction(&self, k: usize, t: f64) -> Result<f64> {
        crate::specfun::dilated_hermite(k, t, self.params.gamma)
    }

    /// Number of squared-filter eigenvalues with `b * lambda_k > 1`, i.e.
    /// `(2k+1) delta < ln b` (strict: a tie does not count).
    pub fn count_scaled_above_one(&self, b: f64) -> usize {
        let d = self.params.delta;
        let ln_b = if b > 0.0 { b.ln() } else { return 0 };
        if ln_b <= d {
            return 0;
        }
        // Arithmetic shortcut, then resolve the boundary against the
        // defining inequality so fp rounding cannot shift the count.
        let bound = (ln_b / d - 1.0) / 2.0;
        let mut k = bound.ceil().max(0.0) as usize;
        while k > 0 && (2 * (k - 1) + 1) as f64 * d >= ln_b {
            k -= 1;
        }
        while (2 * k + 1) as f64 * d < ln_b {
            k += 1;
        }
        k
    }
}

// ---------------------------------------------------------------------------
// Sampling grid
// ---------------------------------------------------------------------------

/// A uniform sampling grid `start, start+step, ..., start+(count-1)*step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    start: f64,
    step: f64,
    count: usize,
}

impl Grid {
    pub fn new(start: f64, step: f64, count: usize) -> Result<Self> {
        if !start.is_finite() {
            return Err(Error::domain("start", start, "a finite value"));
        }
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::domain("step", step, "step > 0"));
        }
        if count < 2 {
            return Err(Error::InadequateGrid {
                reason: format!("need at least 2 points, got {count}"),
            });
        }
        Ok(Grid { start, step, count })
    }

    /// Symmetric grid covering `[-half_width, half_width]` with the given step.
    pub fn symmetric(half_width: f64, step: f64) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::domain("half_width", half_width, "half_width > 0"));
        }
        let n = (half_width / step).ceil() as usize;
        Grid::new(-(n as f64) * step, step, 2 * n + 1)
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn end(&self) -> f64 {
        self.start + self.step * (self.count - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        self.start + self.step * i as f64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(move |i| self.point(i))
    }

    /// Check that the grid can carry the waveform-domain filter: it must
    /// cover the essential time support `[-6 alpha cosh(delta), +...]` and
    /// resolve the kernel's inner length scale `1/beta`.
    pub fn validate_for_filter(&self, params: &ChannelParams) -> Result<()> {
        let reach = 6.0 * params.alpha() * params.cosh_delta();
        if self.start > -reach || self.end() < reach {
            return Err(Error::InadequateGrid {
                reason: format!(
                    "grid [{:.6}, {:.6}] does not cover the essential support [-{r:.6}, {r:.6}]",
                    self.start,
                    self.end(),
                    r = reach
                ),
            });
        }
        let max_step = 0.25 / params.beta();
        if self.step > max_step {
            return Err(Error::InadequateGrid {
                reason: format!(
                    "step {:.6e} does not resolve the kernel scale 1/beta; need step <= {:.6e}",
                    self.step, max_step
                ),
            });
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Filter application
// ---------------------------------------------------------------------------

/// Apply the filter in its eigenbasis: `x_k -> rho^(k+1/2) x_k`.
pub fn apply_filter_coeff(params: &ChannelParams, coeffs: &[f64]) -> Result<Vec<f64>> {
    if coeffs.len() > MAX_HERMITE_ORDER + 1 {
        return Err(Error::OrderTooLarge {
            order: coeffs.len() - 1,
            max: MAX_HERMITE_ORDER,
        });
    }
    let eig = FilterEigensystem::new(*params);
    Ok(coeffs
        .iter()
        .enumerate()
        .map(|(k, &x)| eig.filter_eigenvalue(k) * x)
        .collect())
}

/// Apply the filter to a sampled waveform by direct quadrature of its
/// integral representation
///
/// ```text
/// (P f)(t) = e^(-t^2/(2 alpha^2)) * beta/sqrt(2 pi cosh delta)
///            * Int exp(-(beta^2/2) (t/cosh delta - t')^2) f(t') dt'
/// ```
///
/// evaluated at every grid point.  The grid must satisfy
/// [`Grid::validate_for_filter`].
pub fn apply_filter_waveform(params: &ChannelParams, f: &[f64], grid: &Grid) -> Result<Vec<f64>> {
    grid.validate_for_filter(params)?;
    if f.len() != grid.count() {
        return Err(Error::InadequateGrid {
            reason: format!(
                "waveform has {} samples but the grid has {} points",
                f.len(),
                grid.count()
            ),
        });
    }
    let alpha = params.alpha();
    let beta = params.beta();
    let cd = params.cosh_delta();
    let front = beta / (2.0 * std::f64::consts::PI * cd).sqrt();
    let half_beta2 = 0.5 * beta * beta;
    let step = grid.step();
    // The inner Gaussian is numerically zero once (beta^2/2) d^2 > 745;
    // restrict the quadrature to that window around t/cosh(delta).
    let window = 40.0 / beta;
    let n = grid.count();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let t = grid.point(i);
        let center = t / cd;
        let j_lo = ((center - window - grid.start()) / step).floor().max(0.0) as usize;
        let j_hi = (((center + window - grid.start()) / step).ceil() as usize).min(n - 1);
        let mut acc = 0.0;
        // Index loop on purpose: `j` addresses `f`, the grid point, and the
        // endpoint-weight test at once; an iterator chain would obscure that.
        #[allow(clippy::needless_range_loop)]
        for j in j_lo..=j_hi {
            let d = center - grid.point(j);
            // Trapezoid weights: halve the two end samples of the grid.
            let w = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
            acc += w * (-half_beta2 * d * d).exp() * f[j];
        }
        let envelope = (-t * t / (2.0 * alpha * alpha)).exp();
        out.push(envelope * front * acc * step);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Kernels and phase-plane densities
// ---------------------------------------------------------------------------

/// Gaussian (Mehler) closed form of the filter kernel at parameter `delta`
/// and dilation `gamma`:
///
/// ```text
/// P(x, y) = (gamma sqrt(2 pi sinh delta))^(-1)
///           * exp(-[coth(delta/2)(x-y)^2 + tanh(delta/2)(x+y)^2] / (4 gamma^2))
/// ```
///
/// This equals the eigenfunction expansion
/// `sum_k e^(-delta(k+1/2)) (D_gamma psi_k)(x) (D_gamma psi_k)(y)`.
pub fn mehler_kernel(x: f64, y: f64, delta: f64, gamma: f64) -> Result<f64> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::domain("delta", delta, "delta > 0"));
    }
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::domain("gamma", gamma, "gamma > 0"));
    }
    let half = 0.5 * delta;
    let diff = x - y;
    let sum = x + y;
    let quad = (diff * diff) / half.tanh() + half.tanh() * sum * sum;
    let norm = gamma * (2.0 * std::f64::consts::PI * delta.sinh()).sqrt();
    Ok((-quad / (4.0 * gamma * gamma)).exp() / norm)
}

/// Weyl symbol of the squared filter:
/// `sigma(t, omega) = exp(-t^2/alpha^2 - omega^2/beta^2) / cosh delta`.
///
/// `omega` is angular frequency (rad/s).
pub fn weyl_symbol(t: f64, omega: f64, params: &ChannelParams) -> f64 {
    let u = t * t / (params.alpha * params.alpha) + omega * omega / (params.beta * params.beta);
    (-u).exp() / params.cosh_delta()
}

/// Wigner-Ville spectrum of the optimal (white-in-the-eigenbasis) channel
/// input with per-subchannel variance budget `sigma2`:
/// `Phi(t, omega) = sigma2/(2 pi) * weyl_symbol(t, omega)`.
pub fn wvs(t: f64, omega: f64, sigma2: f64, params: &ChannelParams) -> Result<f64> {
    if !(sigma2 > 0.0) || !sigma2.is_finite() {
        return Err(Error::domain("sigma2", sigma2, "sigma2 > 0"));
    }
    Ok(sigma2 / (2.0 * std::f64::consts::PI) * weyl_symbol(t, omega, params))
}

/// Effective noise density over the phase plane, the "cup" filled by
/// water-filling: `N(t, omega) = theta2/(2 pi) / weyl_symbol(t, omega)`.
pub fn noise_cup(t: f64, omega: f64, params: &ChannelParams) -> f64 {
    params.theta2 / (2.0 * std::f64::consts::PI) / weyl_symbol(t, omega, params)
}

/// Ellipse-of-concentration summary: phase-plane area `2 pi alpha beta`
/// (units rad) and the resulting degrees-of-freedom count `alpha beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EocReport {
    pub area: f64,
    pub dof: f64,
}

pub fn eoc_report(params: &ChannelParams) -> EocReport {
    let ab = params.alphabeta();
    EocReport {
        area: 2.0 * std::f64::consts::PI * ab,
        dof: ab,
    }
}
