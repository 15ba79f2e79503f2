//! Special functions: orthonormal Hermite functions and the Lambert W
//! function with the two derived capacity/rate-distortion inverses.
//!
//! The Hermite functions
//!
//! ```text
//! psi_k(t) = (2^k k! sqrt(pi))^(-1/2) H_k(t) e^(-t^2/2)
//! ```
//!
//! form an orthonormal basis of L2(R); their dilations by `gamma` are the
//! eigenfunctions of the channel's localization filter.  They are evaluated
//! by the normalized three-term recurrence, which is stable and never forms
//! the huge `H_k` / `k!` intermediates of the textbook formula.

use crate::error::{Error, Result};

/// Largest supported Hermite order.  The recurrence itself would go further,
/// but orders beyond this are outside the regime the crate is designed for,
/// so requests past the cap fail loudly instead of degrading.
pub const MAX_HERMITE_ORDER: usize = 512;

pub(crate) const FRAC_1_E: f64 = 1.0 / std::f64::consts::E;

/// Orthonormal Hermite function `psi_k(t)`.
///
/// Uses `psi_0(t) = pi^(-1/4) e^(-t^2/2)` and
/// `psi_{k+1}(t) = t sqrt(2/(k+1)) psi_k(t) - sqrt(k/(k+1)) psi_{k-1}(t)`.
pub fn hermite_fn(k: usize, t: f64) -> Result<f64> {
    if k > MAX_HERMITE_ORDER {
        return Err(Error::OrderTooLarge {
            order: k,
            max: MAX_HERMITE_ORDER,
        });
    }
    if !t.is_finite() {
        return Err(Error::domain("t", t, "a finite argument"));
    }
    let mut prev = 0.0;
    let mut cur = std::f64::consts::PI.powf(-0.25) * (-0.5 * t * t).exp();
    for m in 0..k {
        let next = t * (2.0 / (m + 1) as f64).sqrt() * cur
            - (m as f64 / (m + 1) as f64).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Dilated Hermite function `gamma^(-1/2) psi_k(t / gamma)`.
///
/// These are exactly the filter eigenfunctions; the dilation preserves
/// orthonormality for any `gamma > 0`.
pub fn dilated_hermite(k: usize, t: f64, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::domain("gamma", gamma, "gamma > 0"));
    }
    Ok(hermite_fn(k, t / gamma)? / gamma.sqrt())
}

/// A dilated Hermite basis with a fixed scale and order cap.
///
/// Wraps [`dilated_hermite`] with an up-front validated `gamma` and offers a
/// bulk evaluator that runs the recurrence once per point instead of once
/// per order, which is what waveform synthesis and projection need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermiteBasis {
    gamma: f64,
    max_order: usize,
}

impl HermiteBasis {
    pub fn new(gamma: f64, max_order: usize) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::domain("gamma", gamma, "gamma > 0"));
        }
        if max_order > MAX_HERMITE_ORDER {
            return Err(Error::OrderTooLarge {
                order: max_order,
                max: MAX_HERMITE_ORDER,
            });
        }
        Ok(HermiteBasis { gamma, max_order })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// `(D_gamma psi_k)(t)`.
    pub fn eval(&self, k: usize, t: f64) -> Result<f64> {
        if k > self.max_order {
            return Err(Error::OrderTooLarge {
                order: k,
                max: self.max_order,
            });
        }
        dilated_hermite(k, t, self.gamma)
    }

    /// All of `(D_gamma psi_0)(t) .. (D_gamma psi_{count-1})(t)` in one
    /// recurrence pass.
    pub fn eval_upto(&self, t: f64, count: usize) -> Result<Vec<f64>> {
        if count == 0 {
            return Ok(Vec::new());
        }
        if count - 1 > self.max_order {
            return Err(Error::OrderTooLarge {
                order: count - 1,
                max: self.max_order,
            });
        }
        let x = t / self.gamma;
        let scale = 1.0 / self.gamma.sqrt();
        let mut out = Vec::with_capacity(count);
        let mut prev = 0.0;
        let mut cur = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
        out.push(scale * cur);
        for m in 0..count.saturating_sub(1) {
            let next = x * (2.0 / (m + 1) as f64).sqrt() * cur
                - (m as f64 / (m + 1) as f64).sqrt() * prev;
            prev = cur;
            cur = next;
            out.push(scale * cur);
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Lambert W
// ---------------------------------------------------------------------------

/// Relative residual target for the Lambert W solvers:
/// `|W e^W - x| <= RES * |x|`.  An absolute floor would let the iteration
/// stop early for small `|x|`, where the same absolute residual is many
/// orders of magnitude in `W`.
const W_RESIDUAL: f64 = 1e-13;

fn halley(x: f64, mut w: f64) -> f64 {
    for _ in 0..60 {
        let ew = w.exp();
        let f = w * ew - x;
        if f.abs() <= 0.25 * W_RESIDUAL * x.abs() {
            break;
        }
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        if !step.is_finite() || step == 0.0 {
            break;
        }
        w -= step;
    }
    w
}

/// Principal branch `W_0(x)` for `x >= -1/e`.
///
/// Halley iteration with a branch-point series start near `x = -1/e`;
/// converges to relative residual `|W e^W - x| <= 1e-13 |x|`.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain("x", x, "a finite argument"));
    }
    // t = e*x + 1 measures the distance to the branch point at -1/e.
    let t = std::f64::consts::E * x + 1.0;
    if t < -1e-12 {
        return Err(Error::domain("x", x, "x >= -1/e"));
    }
    if t <= 1e-14 {
        // Indistinguishable from the branch point at working precision.
        return Ok(-1.0);
    }
    let w = if t < 0.5 {
        let p = (2.0 * t).sqrt();
        halley(x, -1.0 + p - p * p / 3.0 + 11.0 * p.powi(3) / 72.0)
    } else if x < 3.0 {
        halley(x, x / (1.0 + x))
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        halley(x, l1 - l2 + l2 / l1)
    };
    Ok(w)
}

/// Secondary branch `W_{-1}(x)` for `-1/e <= x < 0`.
pub fn lambert_wm1(x: f64) -> Result<f64> {
    if !x.is_finite() || x >= 0.0 {
        return Err(Error::domain("x", x, "-1/e <= x < 0"));
    }
    let t = std::f64::consts::E * x + 1.0;
    if t < -1e-12 {
        return Err(Error::domain("x", x, "x >= -1/e"));
    }
    if t <= 1e-14 {
        return Ok(-1.0);
    }
    let w = if t < 0.5 {
        let p = (2.0 * t).sqrt();
        halley(x, -1.0 - p - p * p / 3.0 - 11.0 * p.powi(3) / 72.0)
    } else {
        // x in (-1/(2e) ..approximately.. 0): W ~ ln(-x) - ln(-ln(-x)).
        let l = (-x).ln();
        halley(x, l - (-l).ln())
    };
    Ok(w)
}

// ---------------------------------------------------------------------------
// Capacity / rate-distortion inverses derived from W
// ---------------------------------------------------------------------------

/// `w0(x) = (1 + W_0((x-1)/e)) / 2` for `x >= 0`: the inverse of the
/// strictly increasing map `y(v) = (2v - 1) e^{2v} + 1` on `v >= 0`.
///
/// `w0(0) = 0`, `w0(1) = 1/2`; the square of `w0` drives the closed-form
/// capacity expressions.
pub fn w0(x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::domain("x", x, "x >= 0"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x < 1e-8 {
        // The W-based form loses half its digits at the branch point
        // (vertical tangent); bisect the defining monotone map instead.
        let hi = 1.5 * (0.5 * x).sqrt() + 1e-12;
        return Ok(crate::quad::solve_monotone(
            |v| (2.0 * v - 1.0) * (2.0 * v).exp() + 1.0 - x,
            0.0,
            hi,
            1e-15,
        ));
    }
    Ok(0.5 * (1.0 + lambert_w0((x - 1.0) * FRAC_1_E)?))
}

/// `wm1(x) = (-1 - W_{-1}(-x/e)) / 2` for `0 < x <= 1`: the inverse of the
/// strictly decreasing map `y(v) = (2v + 1) e^{-2v}` on `v >= 0`.
///
/// `wm1(1) = 0`, `wm1(2/e) = 1/2`; its square drives the closed-form
/// rate-distortion expressions.
pub fn wm1(x: f64) -> Result<f64> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::domain("x", x, "0 < x <= 1"));
    }
    if x == 1.0 {
        return Ok(0.0);
    }
    if x > 1.0 - 1e-8 {
        let hi = 1.5 * (0.5 * (1.0 - x)).sqrt() + 1e-12;
        return Ok(crate::quad::solve_monotone(
            |v| x - (2.0 * v + 1.0) * (-2.0 * v).exp(),
            0.0,
            hi,
            1e-15,
        ));
    }
    Ok(0.5 * (-1.0 - lambert_wm1(-x * FRAC_1_E)?))
}
