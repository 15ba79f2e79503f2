//! Parametric capacity of the time-invariant comparison channel (Gaussian
//! LTI filter plus white noise, solved by frequency-domain water-filling)
//! and the three-way spectral-efficiency comparison.
//!
//! The curve is parametric in `r > 1`:
//!
//! ```text
//! se(r)  = (2/3pi) (ln r)^{3/2} log2(e)          (bit/s/Hz)
//! snr(r) = (1/pi) Int_0^{sqrt(ln r)} (r - e^{x^2}) dx
//! ```
//!
//! `snr(r)` has no elementary antiderivative and no known closed-form
//! inverse; it is integrated adaptively and inverted by bracketed
//! root-finding over a cached monotone table.
//!
//! All three channels share the convention `snr = P/(W N0)` with `W = beta/2`
//! and `N0 = 2 theta2`.

use crate::error::{Error, Result};
use crate::quad::{integrate, solve_monotone};
use crate::waterfill::spectral_efficiency;

use std::f64::consts::PI;
use std::sync::OnceLock;

/// One point of the parametric capacity curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GallagerPoint {
    /// Curve parameter `r` (filter-gain-to-noise ratio at band center).
    pub r: f64,
    /// `P/(W N0)` at this point.
    pub snr: f64,
    /// Spectral efficiency `C/W` in bit/s/Hz.
    pub se: f64,
}

fn snr_of_r(r: f64) -> f64 {
    if r <= 1.0 {
        return 0.0;
    }
    let a = r.ln().sqrt();
    integrate(|x: f64| r - (x * x).exp(), 0.0, a, 1e-12) / PI
}

fn se_of_r(r: f64) -> f64 {
    2.0 / (3.0 * PI) * r.ln().powf(1.5) * std::f64::consts::LOG2_E
}

/// Evaluate the parametric curve at `r >= 1`; `r = 1` is the zero-capacity
/// endpoint (`se = 0`, `snr = 0` exactly).
pub fn gallager_point(r: f64) -> Result<GallagerPoint> {
    if !(r >= 1.0) || !r.is_finite() {
        return Err(Error::domain("r", r, "r >= 1"));
    }
    if r == 1.0 {
        return Ok(GallagerPoint {
            r,
            snr: 0.0,
            se: 0.0,
        });
    }
    Ok(GallagerPoint {
        r,
        snr: snr_of_r(r),
        se: se_of_r(r),
    })
}

/// Monotone (r, snr) table for bracketing the inversion; geometric r-grid.
fn snr_table() -> &'static Vec<(f64, f64)> {
    static TABLE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = 256;
        let ln_max = (1e8_f64).ln();
        (0..=n)
            .map(|i| {
                let r = (ln_max * i as f64 / n as f64).exp();
                (r, snr_of_r(r))
            })
            .collect()
    })
}

/// Spectral efficiency at a given `snr > 0`, by inverting the strictly
/// increasing map `r -> snr(r)`.
pub fn gallager_se_at_snr(snr: f64) -> Result<f64> {
    if !(snr > 0.0) || !snr.is_finite() {
        return Err(Error::domain("snr", snr, "a positive finite value"));
    }
    let table = snr_table();
    let idx = table.partition_point(|&(_, s)| s < snr);
    let (mut lo, mut hi);
    if idx == 0 {
        unreachable!("table starts at snr = 0 and the query is positive");
    } else if idx < table.len() {
        lo = table[idx - 1].0;
        hi = table[idx].0;
    } else {
        // Beyond the table: extend the bracket by doubling.
        lo = table[table.len() - 1].0;
        hi = 2.0 * lo;
        while snr_of_r(hi) < snr {
            lo = hi;
            hi *= 2.0;
        }
    }
    // 1e-14 relative on r: se ~ (ln r)^{3/2} amplifies the r-error by
    // 1.5/ln(r) near r = 1, so the root must be tighter than the se target.
    let r = solve_monotone(|v| snr_of_r(v) - snr, lo, hi, 1e-14);
    Ok(se_of_r(r))
}

/// Spectral efficiencies of the three channels at one `snr`, with the
/// corresponding `Eb/N0 = snr/se` columns in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralEfficiencyPoint {
    pub snr: f64,
    pub se_heat: f64,
    pub se_shannon: f64,
    pub se_gallager: f64,
    pub ebn0_db_heat: f64,
    pub ebn0_db_shannon: f64,
    pub ebn0_db_gallager: f64,
}

/// Evaluate all three spectral-efficiency curves over an ascending grid of
/// positive `snr` values.
pub fn compare_curves(snr_grid: &[f64]) -> Result<Vec<SpectralEfficiencyPoint>> {
    for pair in snr_grid.windows(2) {
        if !(pair[1] > pair[0]) {
            return Err(Error::domain(
                "snr_grid",
                pair[1],
                "strictly ascending grid values",
            ));
        }
    }
    snr_grid
        .iter()
        .map(|&snr| {
            if !(snr > 0.0) || !snr.is_finite() {
                return Err(Error::domain("snr", snr, "a positive finite value"));
            }
            let se_heat = spectral_efficiency(snr)?;
            let se_shannon = (1.0 + snr).log2();
            let se_gallager = gallager_se_at_snr(snr)?;
            let db = |se: f64| 10.0 * (snr / se).log10();
            Ok(SpectralEfficiencyPoint {
                snr,
                se_heat,
                se_shannon,
                se_gallager,
                ebn0_db_heat: db(se_heat),
                ebn0_db_shannon: db(se_shannon),
                ebn0_db_gallager: db(se_gallager),
            })
        })
        .collect()
}

/// Locate a sign change of `f` on `[lo, hi]` by bisection on a geometric
/// midpoint (the curves live on decade scales).  Errors unless `f` has
/// opposite signs at the endpoints.
fn bisect_crossing(f: impl Fn(f64) -> Result<f64>, lo: f64, hi: f64) -> Result<f64> {
    let f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if !(f_lo * f_hi < 0.0) {
        return Err(Error::domain(
            "bracket",
            lo,
            "endpoints with opposite signs of the difference curve",
        ));
    }
    let lo_negative = f_lo < 0.0;
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        let mid = (a * b).sqrt();
        if mid <= a || mid >= b {
            break;
        }
        if (f(mid)? < 0.0) == lo_negative {
            a = mid;
        } else {
            b = mid;
        }
        if b - a <= 1e-12 * b {
            break;
        }
    }
    Ok((a * b).sqrt())
}

/// The snr where this channel's spectral efficiency overtakes the
/// comparison channel's, located inside `(lo, hi)`.
pub fn heat_gallager_crossing(lo: f64, hi: f64) -> Result<f64> {
    validate_bracket(lo, hi)?;
    bisect_crossing(
        |snr| Ok(spectral_efficiency(snr)? - gallager_se_at_snr(snr)?),
        lo,
        hi,
    )
}

/// The snr where this channel's spectral efficiency overtakes the
/// bandlimited-AWGN curve `log2(1 + snr)`, located inside `(lo, hi)`.
pub fn heat_shannon_crossing(lo: f64, hi: f64) -> Result<f64> {
    validate_bracket(lo, hi)?;
    bisect_crossing(
        |snr| Ok(spectral_efficiency(snr)? - (1.0 + snr).log2()),
        lo,
        hi,
    )
}

fn validate_bracket(lo: f64, hi: f64) -> Result<()> {
    if !(lo > 0.0) || !lo.is_finite() {
        return Err(Error::domain("lo", lo, "a positive finite value"));
    }
    if !(hi > lo) || !hi.is_finite() {
        return Err(Error::domain("hi", hi, "hi > lo"));
    }
    Ok(())
}
