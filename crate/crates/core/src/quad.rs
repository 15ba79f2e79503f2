//! Numerical integration and root-finding plumbing.
//!
//! The phase-plane functionals in this crate all have closed radial forms;
//! the routines here exist so that every such closed form can be
//! cross-checked against a generic quadrature evaluation that knows nothing
//! about the radial structure.  Subdivision is plain recursive bisection, so
//! results are bit-deterministic for a given integrand.

/// 15-point Kronrod rule with embedded 7-point Gauss rule on `[a, b]`.
///
/// Returns `(kronrod_value, error_estimate)`.  The error estimate is the
/// Gauss–Kronrod difference rescaled against the integrand's total
/// variation on the panel (the classic QUADPACK heuristic): the raw
/// difference alone badly underestimates the error on panels where the
/// integrand has a kink, because both rules can agree by coincidence.
pub fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    // Kronrod abscissae on [-1, 1] (positive half) and the matching weights.
    const XGK: [f64; 8] = [
        0.991_455_371_120_812_6,
        0.949_107_912_342_758_5,
        0.864_864_423_359_769_1,
        0.741_531_185_599_394_4,
        0.586_087_235_467_691_1,
        0.405_845_151_377_397_2,
        0.207_784_955_007_898_5,
        0.0,
    ];
    const WGK: [f64; 8] = [
        0.022_935_322_010_529_225,
        0.063_092_092_629_978_55,
        0.104_790_010_322_250_18,
        0.140_653_259_715_525_92,
        0.169_004_726_639_267_9,
        0.190_350_578_064_785_4,
        0.204_432_940_075_298_9,
        0.209_482_141_084_727_83,
    ];
    // Gauss weights for the even-indexed Kronrod abscissae (1, 3, 5, 7).
    const WG: [f64; 4] = [
        0.129_484_966_168_869_7,
        0.279_705_391_489_276_67,
        0.381_830_050_505_118_9,
        0.417_959_183_673_469_4,
    ];

    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut resabs = WGK[7] * fc.abs();
    let mut fv = [[0.0f64; 2]; 7];
    for i in 0..7 {
        let dx = half * XGK[i];
        let f_lo = f(center - dx);
        let f_hi = f(center + dx);
        fv[i] = [f_lo, f_hi];
        kronrod += WGK[i] * (f_lo + f_hi);
        resabs += WGK[i] * (f_lo.abs() + f_hi.abs());
        if i % 2 == 1 {
            gauss += WG[i / 2] * (f_lo + f_hi);
        }
    }
    // Kronrod estimate of the integrand's deviation from its panel mean.
    let mean = 0.5 * kronrod;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for row in fv.iter().enumerate() {
        let (i, [f_lo, f_hi]) = row;
        resasc += WGK[i] * ((f_lo - mean).abs() + (f_hi - mean).abs());
    }
    let value = kronrod * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut err = ((kronrod - gauss) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * 1.0_f64.min((200.0 * err / resasc).powf(1.5));
    }
    // Never report below the round-off floor of the function values.
    let floor = 50.0 * f64::EPSILON * resabs;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(floor);
    }
    (value, err)
}

fn adaptive_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    // Stop on: tolerance met, error at the round-off floor of the local
    // value (the floor in the rule's estimate is ~1.1e-14 of the panel's
    // absolute mass, so this threshold must sit above it or panels whose
    // budget is below the floor would subdivide to the depth cap), or the
    // depth cap (2^-50 of the original interval).
    if error <= tol || error <= 2e-13 * value.abs() || depth >= 50 {
        return value;
    }
    let mid = 0.5 * (a + b);
    let (vl, el) = gauss_kronrod_15(f, a, mid);
    let (vr, er) = gauss_kronrod_15(f, mid, b);
    adaptive_rec(f, a, mid, vl, el, 0.5 * tol, depth + 1)
        + adaptive_rec(f, mid, b, vr, er, 0.5 * tol, depth + 1)
}

/// Adaptive integration of `f` over `[a, b]` to absolute tolerance `abs_tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (value, error) = gauss_kronrod_15(&f, a, b);
    adaptive_rec(&f, a, b, value, error, abs_tol.max(f64::MIN_POSITIVE), 0)
}

/// Adaptive iterated integration of `f(x, y)` over the box
/// `[ax, bx] x [ay, by]` to (approximate) absolute tolerance `abs_tol`.
///
/// The inner integral runs over `y`; its tolerance is scaled by the outer
/// width so the accumulated inner errors stay below the overall budget.
pub fn integrate_2d<F: Fn(f64, f64) -> f64>(
    f: F,
    (ax, bx): (f64, f64),
    (ay, by): (f64, f64),
    abs_tol: f64,
) -> f64 {
    let width = (bx - ax).abs().max(f64::MIN_POSITIVE);
    let inner_tol = 0.25 * abs_tol / width;
    integrate(
        |x| integrate(|y| f(x, y), ay, by, inner_tol),
        ax,
        bx,
        0.5 * abs_tol,
    )
}

/// Sorted edge list `a, ...breaks strictly inside (a, b)..., b`.
fn edges_within(a: f64, b: f64, breaks: &[f64]) -> Vec<f64> {
    let mut inside: Vec<f64> = breaks.iter().copied().filter(|v| *v > a && *v < b).collect();
    inside.sort_by(f64::total_cmp);
    let mut edges = vec![a];
    for v in inside {
        if v > *edges.last().unwrap() {
            edges.push(v);
        }
    }
    edges.push(b);
    edges
}

/// Iterated 2-D quadrature like [`integrate_2d`], but with the outer
/// interval split at `x_breaks` and each inner interval split at
/// `y_breaks(x)`, so that no quadrature panel straddles a known kink
/// curve of the integrand.  Breaks outside the box are ignored; with no
/// breaks this reduces to [`integrate_2d`].
///
/// The splits are not an optimization: a kink lying between two adjacent
/// nodes of a panel is invisible to the error estimate, because both
/// embedded rules then agree on the smooth interpolant through the
/// sampled values and the panel is accepted with a bias no estimator can
/// see.  The failure is systematic, not a stroke of bad luck — when an
/// integrand's support ellipse inscribes the box, the kink curve grazes
/// the inner panels' ends near the tangent points and hides beyond the
/// outermost node over a whole band of outer abscissae.
pub fn integrate_2d_piecewise<F, G>(
    f: F,
    (ax, bx): (f64, f64),
    (ay, by): (f64, f64),
    x_breaks: &[f64],
    y_breaks: G,
    abs_tol: f64,
) -> f64
where
    F: Fn(f64, f64) -> f64,
    G: Fn(f64) -> Vec<f64>,
{
    let width = (bx - ax).abs().max(f64::MIN_POSITIVE);
    let inner_budget = 0.25 * abs_tol / width;
    let x_edges = edges_within(ax, bx, x_breaks);
    let outer_tol = 0.5 * abs_tol / (x_edges.len() - 1) as f64;
    x_edges
        .windows(2)
        .map(|seg| {
            integrate(
                |x| {
                    let y_edges = edges_within(ay, by, &y_breaks(x));
                    let piece_tol = inner_budget / (y_edges.len() - 1) as f64;
                    y_edges
                        .windows(2)
                        .map(|p| integrate(|y| f(x, y), p[0], p[1], piece_tol))
                        .sum()
                },
                seg[0],
                seg[1],
                outer_tol,
            )
        })
        .sum()
}

/// Root of a continuous, strictly monotone `f` on the bracket `[lo, hi]`,
/// located to relative tolerance `rel_tol` by bisection with a secant
/// interpolation step whenever the interpolant stays inside the bracket.
///
/// `f(lo)` and `f(hi)` must have opposite signs (either may be zero).
pub fn solve_monotone<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, rel_tol: f64) -> f64 {
    let (mut lo, mut hi) = (lo, hi);
    let (mut flo, mut fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return lo;
    }
    if fhi == 0.0 {
        return hi;
    }
    debug_assert!(
        flo.signum() != fhi.signum(),
        "solve_monotone: bracket does not straddle a sign change"
    );
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        // Secant proposal; fall back to the midpoint when it leaves the
        // bracket or the slope degenerates.
        let secant = lo - flo * (hi - lo) / (fhi - flo);
        let x = if secant.is_finite() && secant > lo && secant < hi {
            // Blend: average of secant and midpoint keeps worst-case
            // convergence at bisection rate while usually doing better.
            0.5 * (secant + mid)
        } else {
            mid
        };
        let fx = f(x);
        if fx == 0.0 {
            return x;
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
        if (hi - lo).abs() <= rel_tol * hi.abs().max(lo.abs()).max(f64::MIN_POSITIVE) {
            break;
        }
    }
    0.5 * (lo + hi)
}
