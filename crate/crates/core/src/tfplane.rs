//! Water-filling and reverse water-filling carried out directly on the
//! time-frequency plane, plus a numerical validator for the eigenvalue-sum
//! versus symbol-integral correspondence.
//!
//! Every phase-plane integrand in this module depends on `(t, omega)` only
//! through `u = t^2/alpha^2 + omega^2/beta^2`, so integrals reduce to 1-D
//! form with `dt domega = pi alpha beta du` — the "radial" route, which is
//! exact.  Each radial result has an adaptive 2-D quadrature twin used as a
//! cross-check; the two routes are deliberately kept independent.

use crate::channel::{weyl_symbol, ChannelParams, FilterEigensystem};
use crate::error::{Error, Result};
use crate::quad::{integrate_2d_piecewise, solve_monotone};

use std::f64::consts::PI;

/// Shared 2-D cross-check integrator: integrates `f(t, omega)` over the
/// centered box reaching `u = u_reach` in `u = t^2/alpha^2 + omega^2/beta^2`,
/// with quadrature-piece edges pinned to the ellipse `u = u_kink` where the
/// in-scope integrands stop being smooth.  The box must extend strictly
/// beyond the kink ellipse; otherwise the kink curve grazes the panel ends
/// near its tangency with the box, where it is invisible to the error
/// estimate.
fn phase_plane_quadrature<F: Fn(f64, f64) -> f64>(
    params: &ChannelParams,
    u_kink: Option<f64>,
    u_reach: f64,
    f: F,
) -> f64 {
    let (alpha, beta) = (params.alpha(), params.beta());
    let (bt, bw) = (alpha * u_reach.sqrt(), beta * u_reach.sqrt());
    let x_breaks: Vec<f64> = match u_kink {
        Some(u) => {
            let xk = alpha * u.sqrt();
            vec![-xk, xk]
        }
        None => Vec::new(),
    };
    integrate_2d_piecewise(
        f,
        (-bt, bt),
        (-bw, bw),
        &x_breaks,
        |t| match u_kink {
            Some(u) => {
                let r = u - (t / alpha) * (t / alpha);
                if r > 0.0 {
                    let yb = beta * r.sqrt();
                    vec![-yb, yb]
                } else {
                    Vec::new()
                }
            }
            None => Vec::new(),
        },
        1e-11,
    )
}

/// Result of water-filling the noise cup `N(t, omega)` with energy `S`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TfWaterfillResult {
    water_level_nu: f64,
    fill_radius: f64,
    capacity_nats: f64,
    input_energy: f64,
}

impl TfWaterfillResult {
    /// Water level `nu` (energy density per unit phase-plane area).
    pub fn water_level_nu(&self) -> f64 {
        self.water_level_nu
    }

    /// Radial extent `L` of the filled region in the coordinate
    /// `u = t^2/alpha^2 + omega^2/beta^2`; `L = ln(2 pi nu/(theta2 cosh delta))`.
    pub fn fill_radius(&self) -> f64 {
        self.fill_radius
    }

    pub fn capacity_nats(&self) -> f64 {
        self.capacity_nats
    }

    pub fn capacity_bits(&self) -> f64 {
        self.capacity_nats * std::f64::consts::LOG2_E
    }

    pub fn input_energy(&self) -> f64 {
        self.input_energy
    }
}

/// `(L - 1) e^L + 1`, the radial fill-volume profile, evaluated without
/// cancellation near `L = 0` (where it behaves like `L^2/2`).
fn fill_profile(l: f64) -> f64 {
    (l - 1.0) * l.exp_m1() + l
}

/// Water-fill the noise cup with total input energy `s_total`.
///
/// Solves `S = (alpha beta/2) theta2 cosh(delta) [(L-1)e^L + 1]` for the
/// fill radius `L` (the map is strictly increasing from 0), then reads off
/// the water level `nu = (theta2 cosh delta/2 pi) e^L` and the capacity
/// `(alpha beta/2)(L/2)^2` nats.
pub fn tf_waterfill(params: &ChannelParams, s_total: f64) -> Result<TfWaterfillResult> {
    if !(s_total > 0.0) || !s_total.is_finite() {
        return Err(Error::domain("s_total", s_total, "a positive finite energy"));
    }
    let scale = 0.5 * params.alphabeta() * params.theta2() * params.cosh_delta();
    let target = s_total / scale;
    let mut hi = 1.0;
    while fill_profile(hi) < target {
        hi *= 2.0;
    }
    let l = solve_monotone(|v| fill_profile(v) - target, 0.0, hi, 1e-12);
    let half_ab = 0.5 * params.alphabeta();
    Ok(TfWaterfillResult {
        water_level_nu: params.theta2() * params.cosh_delta() / (2.0 * PI) * l.exp(),
        fill_radius: l,
        capacity_nats: half_ab * (0.5 * l) * (0.5 * l),
        input_energy: s_total,
    })
}

/// Input energy absorbed by water level `nu`, by the radial closed form.
/// Returns 0 when `nu` does not exceed the cup bottom `N(0,0)`.
pub fn tf_input_energy_for_level(params: &ChannelParams, nu: f64) -> Result<f64> {
    let l = fill_radius_for_level(params, nu)?;
    let scale = 0.5 * params.alphabeta() * params.theta2() * params.cosh_delta();
    Ok(scale * fill_profile(l))
}

/// Capacity (nats) at water level `nu`, by the radial closed form.
pub fn tf_capacity_for_level(params: &ChannelParams, nu: f64) -> Result<f64> {
    let l = fill_radius_for_level(params, nu)?;
    Ok(0.5 * params.alphabeta() * (0.5 * l) * (0.5 * l))
}

fn fill_radius_for_level(params: &ChannelParams, nu: f64) -> Result<f64> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::domain("nu", nu, "a positive finite density"));
    }
    let bottom = params.theta2() * params.cosh_delta() / (2.0 * PI);
    Ok((nu / bottom).ln().max(0.0))
}

/// Input energy at water level `nu` by adaptive 2-D quadrature of
/// `(nu - N(t, omega))^+` — the independent cross-check of
/// [`tf_input_energy_for_level`].
pub fn tf_input_energy_quadrature(params: &ChannelParams, nu: f64) -> Result<f64> {
    let l = fill_radius_for_level(params, nu)?;
    if l == 0.0 {
        return Ok(0.0);
    }
    // The integrand is supported on the ellipse u <= L; pad the box past it.
    Ok(phase_plane_quadrature(params, Some(l), l + 0.5, |t, w| {
        (nu - crate::channel::noise_cup(t, w, params)).max(0.0)
    }))
}

/// Capacity (nats) at water level `nu` by adaptive 2-D quadrature of
/// `(1/2 pi) max{0, (1/2) ln(nu/N)}`.
pub fn tf_capacity_quadrature(params: &ChannelParams, nu: f64) -> Result<f64> {
    let l = fill_radius_for_level(params, nu)?;
    if l == 0.0 {
        return Ok(0.0);
    }
    Ok(phase_plane_quadrature(params, Some(l), l + 0.5, |t, w| {
        let ratio = nu / crate::channel::noise_cup(t, w, params);
        if ratio > 1.0 {
            0.5 * ratio.ln() / (2.0 * PI)
        } else {
            0.0
        }
    }))
}

// ---------------------------------------------------------------------------
// Reverse water-filling on the phase plane
// ---------------------------------------------------------------------------

/// Distortion/rate pair produced by slicing the signal's phase-plane energy
/// density at level `lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TfRdPoint {
    /// Distortion `D` (Ws).
    pub distortion: f64,
    /// Rate in nats.
    pub rate_nats: f64,
    /// Slice depth `u0 = ln(Phi(0,0)/lambda)`, 0 on the zero-rate branch.
    pub slice_depth: f64,
}

/// Reverse water-filling at slice level `lambda` for the process whose
/// phase-plane density is `Phi(t, omega) = (sigma2/2 pi) weyl_symbol`:
/// `D = integral min{lambda, Phi}` and
/// `R = (1/2 pi) integral max{0, (1/2) ln(Phi/lambda)}`, in radial closed
/// form.  For `lambda >= Phi(0,0)` the rate is zero and
/// `D = (alpha beta/2) sigma2/cosh delta` (the whole density).
pub fn tf_reverse_waterfill(
    params: &ChannelParams,
    lambda: f64,
    sigma2_src: f64,
) -> Result<TfRdPoint> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::domain("lambda", lambda, "a positive finite density"));
    }
    if !(sigma2_src > 0.0) || !sigma2_src.is_finite() {
        return Err(Error::domain("sigma2_src", sigma2_src, "a positive finite value"));
    }
    let half_ab = 0.5 * params.alphabeta();
    let peak = sigma2_src / (2.0 * PI * params.cosh_delta());
    if lambda >= peak {
        return Ok(TfRdPoint {
            distortion: half_ab * sigma2_src / params.cosh_delta(),
            rate_nats: 0.0,
            slice_depth: 0.0,
        });
    }
    let u0 = (peak / lambda).ln();
    Ok(TfRdPoint {
        distortion: PI * params.alphabeta() * lambda * (u0 + 1.0),
        rate_nats: half_ab * (0.5 * u0) * (0.5 * u0),
        slice_depth: u0,
    })
}

/// Distortion at slice level `lambda` by adaptive 2-D quadrature of
/// `min{lambda, Phi}`.
pub fn tf_distortion_quadrature(
    params: &ChannelParams,
    lambda: f64,
    sigma2_src: f64,
) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::domain("lambda", lambda, "a positive finite density"));
    }
    let peak = sigma2_src / (2.0 * PI * params.cosh_delta());
    let u0 = (peak / lambda).ln().max(0.0);
    // Beyond u0 the integrand is Phi itself, decaying like e^{-u}; truncate
    // where it falls below 1e-16 of the slice level.
    let kink = if u0 > 0.0 { Some(u0) } else { None };
    Ok(phase_plane_quadrature(params, kink, u0 + 40.0, |t, w| {
        let phi = sigma2_src / (2.0 * PI) * weyl_symbol(t, w, params);
        phi.min(lambda)
    }))
}

/// Rate (nats) at slice level `lambda` by adaptive 2-D quadrature of
/// `(1/2 pi) max{0, (1/2) ln(Phi/lambda)}`.
pub fn tf_rate_quadrature(params: &ChannelParams, lambda: f64, sigma2_src: f64) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::domain("lambda", lambda, "a positive finite density"));
    }
    let peak = sigma2_src / (2.0 * PI * params.cosh_delta());
    if lambda >= peak {
        return Ok(0.0);
    }
    let u0 = (peak / lambda).ln();
    Ok(phase_plane_quadrature(params, Some(u0), u0 + 0.5, |t, w| {
        let phi = sigma2_src / (2.0 * PI) * weyl_symbol(t, w, params);
        if phi > lambda {
            0.5 * (phi / lambda).ln() / (2.0 * PI)
        } else {
            0.0
        }
    }))
}

// ---------------------------------------------------------------------------
// Eigenvalue-sum vs symbol-integral correspondence
// ---------------------------------------------------------------------------

/// The concrete test-function families the correspondence is validated on.
/// Each maps the symbol/eigenvalue argument `x` to `g(x)`:
///
/// - `Monomial { degree: n }`: `x^n`, `n >= 1`
/// - `LogPlus { scale_b: b }`: `(1/2) ln_+(b x)` (the capacity integrand)
/// - `ClippedInverse { coeff_a: a, scale_b: b }`: `a (1 - 1/(b x))^+` (the
///   input-energy integrand)
/// - `MinOne { scale_b: b }`: `min{1, b x}` (the distortion integrand)
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SzegoTestFn {
    Monomial { degree: u32 },
    LogPlus { scale_b: f64 },
    ClippedInverse { coeff_a: f64, scale_b: f64 },
    MinOne { scale_b: f64 },
}

impl SzegoTestFn {
    fn validate(&self) -> Result<()> {
        match *self {
            SzegoTestFn::Monomial { degree } => {
                if degree == 0 {
                    // g(x) = 1 has no g(x)/x limit at 0+ and breaks the
                    // eigenvalue sum (infinitely many terms of size 1).
                    return Err(Error::domain("degree", 0.0, "degree >= 1"));
                }
            }
            SzegoTestFn::LogPlus { scale_b } | SzegoTestFn::MinOne { scale_b } => {
                if !(scale_b > 0.0) || !scale_b.is_finite() {
                    return Err(Error::domain("scale_b", scale_b, "a positive finite value"));
                }
            }
            SzegoTestFn::ClippedInverse { coeff_a, scale_b } => {
                if !(coeff_a > 0.0) || !coeff_a.is_finite() {
                    return Err(Error::domain("coeff_a", coeff_a, "a positive finite value"));
                }
                if !(scale_b > 0.0) || !scale_b.is_finite() {
                    return Err(Error::domain("scale_b", scale_b, "a positive finite value"));
                }
            }
        }
        Ok(())
    }

    fn apply(&self, x: f64) -> f64 {
        match *self {
            SzegoTestFn::Monomial { degree } => x.powi(degree as i32),
            SzegoTestFn::LogPlus { scale_b } => {
                let v = scale_b * x;
                if v > 1.0 {
                    0.5 * v.ln()
                } else {
                    0.0
                }
            }
            SzegoTestFn::ClippedInverse { coeff_a, scale_b } => {
                if scale_b * x > 1.0 {
                    coeff_a * (1.0 - 1.0 / (scale_b * x))
                } else {
                    0.0
                }
            }
            SzegoTestFn::MinOne { scale_b } => (scale_b * x).min(1.0),
        }
    }
}

impl std::fmt::Display for SzegoTestFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            SzegoTestFn::Monomial { degree } => write!(f, "monomial(n={degree})"),
            SzegoTestFn::LogPlus { scale_b } => write!(f, "log_plus(b={scale_b})"),
            SzegoTestFn::ClippedInverse { coeff_a, scale_b } => {
                write!(f, "clipped_inverse(a={coeff_a}, b={scale_b})")
            }
            SzegoTestFn::MinOne { scale_b } => write!(f, "min_one(b={scale_b})"),
        }
    }
}

/// Both sides of the correspondence for one test function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SzegoReport {
    pub test_function: SzegoTestFn,
    /// `sum_k g(lambda_k)` (closed geometric forms).
    pub eigenvalue_sum: f64,
    /// `(1/2 pi) integral g(symbol)` over the phase plane (radial form).
    pub symbol_integral: f64,
    /// `|lhs - rhs| / (alpha beta)`.
    pub normalized_gap: f64,
}

/// Number of eigenvalues with `b lambda_k > 1`, i.e. `(2k+1) delta < ln b`.
fn count_above(params: &ChannelParams, scale_b: f64) -> usize {
    FilterEigensystem::new(*params).count_scaled_above_one(scale_b)
}

/// Evaluate both sides of the eigenvalue-sum vs symbol-integral identity.
///
/// The eigenvalue side sums `g(lambda_k)` in closed geometric form; the
/// symbol side integrates `g` of the Weyl symbol over the phase plane by
/// the radial substitution.  For monomials of degree 1 and 2 the two sides
/// are exactly equal (`alpha beta = coth delta` makes the algebra close);
/// all other cases agree only asymptotically in `alpha beta`.
pub fn szego_check(params: &ChannelParams, test_fn: SzegoTestFn) -> Result<SzegoReport> {
    test_fn.validate()?;
    let d = params.delta();
    let half_ab = 0.5 * params.alphabeta();
    let cd = params.cosh_delta();
    let (lhs, rhs) = match test_fn {
        SzegoTestFn::Monomial { degree } => {
            let n = degree as f64;
            // sum_k e^{-n(2k+1) delta} = 1/(2 sinh(n delta)).
            let lhs = 0.5 / (n * d).sinh();
            let rhs = half_ab / (n * cd.powi(degree as i32));
            (lhs, rhs)
        }
        SzegoTestFn::LogPlus { scale_b } => {
            let k = count_above(params, scale_b) as f64;
            let lhs = 0.5 * (k * scale_b.ln() - d * k * k);
            let u0 = (scale_b / cd).ln();
            let rhs = if u0 > 0.0 { half_ab * u0 * u0 / 4.0 } else { 0.0 };
            (lhs, rhs)
        }
        SzegoTestFn::ClippedInverse { coeff_a, scale_b } => {
            let k = count_above(params, scale_b);
            let lhs = if k == 0 {
                0.0
            } else {
                // sum_{k<K} 1/lambda_k = e^delta expm1(2K delta)/expm1(2 delta)
                let inv_sum = d.exp() * (2.0 * d * k as f64).exp_m1() / (2.0 * d).exp_m1();
                coeff_a * (k as f64 - inv_sum / scale_b)
            };
            let u0 = (scale_b / cd).ln();
            let rhs = if u0 > 0.0 {
                half_ab * coeff_a * (u0 - 1.0 + cd / scale_b)
            } else {
                0.0
            };
            (lhs, rhs)
        }
        SzegoTestFn::MinOne { scale_b } => {
            let k = count_above(params, scale_b);
            // Idle tail: b sum_{k>=K} lambda_k.
            let tail =
                scale_b * (-d * (2 * k + 1) as f64).exp() / -(-2.0 * d).exp_m1();
            let lhs = k as f64 + tail;
            let u0 = (scale_b / cd).ln();
            let rhs = if u0 > 0.0 {
                half_ab * (u0 + 1.0)
            } else {
                half_ab * scale_b / cd
            };
            (lhs, rhs)
        }
    };
    Ok(SzegoReport {
        test_function: test_fn,
        eigenvalue_sum: lhs,
        symbol_integral: rhs,
        normalized_gap: (lhs - rhs).abs() / params.alphabeta(),
    })
}

/// The symbol side of [`szego_check`] by adaptive 2-D quadrature instead of
/// the radial substitution — the independent route.
pub fn szego_symbol_integral_quadrature(
    params: &ChannelParams,
    test_fn: SzegoTestFn,
) -> Result<f64> {
    test_fn.validate()?;
    let cd = params.cosh_delta();
    // Truncation radius in u from the integrand's support/decay, and the
    // radius at which the test function's clipping kinks the integrand.
    let (u_kink, u_reach) = match test_fn {
        SzegoTestFn::Monomial { degree } => (None, 40.0 / degree as f64),
        SzegoTestFn::LogPlus { scale_b } | SzegoTestFn::ClippedInverse { scale_b, .. } => {
            let u0 = (scale_b / cd).ln();
            if u0 <= 0.0 {
                return Ok(0.0);
            }
            (Some(u0), u0 + 0.5)
        }
        SzegoTestFn::MinOne { scale_b } => {
            let u0 = (scale_b / cd).ln();
            let kink = if u0 > 0.0 { Some(u0) } else { None };
            (kink, u0.max(0.0) + 40.0)
        }
    };
    Ok(phase_plane_quadrature(params, u_kink, u_reach, |t, w| {
        test_fn.apply(weyl_symbol(t, w, params)) / (2.0 * PI)
    }))
}

/// The eigenvalue side of [`szego_check`] by direct term-by-term summation —
/// cross-check for the closed geometric forms.
pub fn szego_eigenvalue_sum_direct(
    params: &ChannelParams,
    test_fn: SzegoTestFn,
    terms: usize,
) -> Result<f64> {
    test_fn.validate()?;
    let eig = FilterEigensystem::new(*params);
    Ok((0..terms)
        .map(|k| test_fn.apply(eig.squared_eigenvalue(k)))
        .sum())
}
