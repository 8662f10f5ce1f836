//! Deterministic scalar root bracketing and refinement.
//!
//! The calibration searches need a solver that (a) never leaves a supplied
//! bracket, (b) converges superlinearly on the smooth, monotone residuals
//! produced by classical trajectories, and (c) is bit-reproducible. A guarded
//! regula-falsi with the Illinois modification satisfies all three: every
//! iterate stays inside a sign-changing interval, stagnating endpoints have
//! their stored residual halved so the secant cannot pin to one side, and the
//! update rule involves no randomness or tolerance-dependent branching beyond
//! the convergence test itself.

use crate::error::{Result, SgiError};

/// Outcome of a successful root refinement.
#[derive(Debug, Clone, Copy)]
pub struct Root {
    /// Abscissa of the accepted root.
    pub x: f64,
    /// Residual at `x`.
    pub f: f64,
    /// Number of function evaluations consumed.
    pub evals: usize,
}

/// Stopping criteria for [`illinois`].
#[derive(Debug, Clone, Copy)]
pub struct StopRule {
    /// Accept when the bracket width falls below this (absolute).
    pub x_tol: f64,
    /// Accept when |f| falls below this.
    pub f_tol: f64,
    /// Hard cap on function evaluations.
    pub max_evals: usize,
}

impl StopRule {
    pub fn new(x_tol: f64, f_tol: f64, max_evals: usize) -> Self {
        Self { x_tol, f_tol, max_evals }
    }
}

/// Refine a root of `f` inside `[lo, hi]`, which must already bracket a sign
/// change. Endpoint residuals may be supplied if already known; pass `None`
/// to have them evaluated.
pub fn illinois<E>(
    mut f: impl FnMut(f64) -> std::result::Result<f64, E>,
    lo: f64,
    hi: f64,
    f_lo: Option<f64>,
    f_hi: Option<f64>,
    stop: StopRule,
) -> Result<Root>
where
    SgiError: From<E>,
{
    if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
        return Err(SgiError::SearchFailure(format!(
            "invalid bracket [{lo:e}, {hi:e}]"
        )));
    }
    let mut evals = 0usize;
    let mut a = lo;
    let mut b = hi;
    let mut fa = match f_lo {
        Some(v) => v,
        None => {
            evals += 1;
            f(a)?
        }
    };
    let mut fb = match f_hi {
        Some(v) => v,
        None => {
            evals += 1;
            f(b)?
        }
    };
    if fa == 0.0 {
        return Ok(Root { x: a, f: fa, evals });
    }
    if fb == 0.0 {
        return Ok(Root { x: b, f: fb, evals });
    }
    if fa.signum() == fb.signum() {
        return Err(SgiError::SearchFailure(format!(
            "bracket [{a:e}, {b:e}] does not change sign: f = ({fa:e}, {fb:e})"
        )));
    }

    // `side` records which endpoint was retained on the previous iteration so
    // that a twice-retained endpoint gets its residual halved (the Illinois
    // rule); 0 = neither yet, -1 = kept `a`, +1 = kept `b`.
    let mut side = 0i8;
    while evals < stop.max_evals {
        let width = b - a;
        if width.abs() <= stop.x_tol {
            // Report the endpoint with the smaller residual.
            let (x, fx) = if fa.abs() <= fb.abs() { (a, fa) } else { (b, fb) };
            return Ok(Root { x, f: fx, evals });
        }
        let mut x = (a * fb - b * fa) / (fb - fa);
        // Guard against secant steps leaving or landing exactly on the
        // bracket (the Illinois residual-halving already prevents soft
        // stagnation, so no interior margin is needed).
        if !(x > a && x < b) {
            x = 0.5 * (a + b);
        }
        evals += 1;
        let fx = f(x)?;
        if fx == 0.0 || fx.abs() <= stop.f_tol {
            return Ok(Root { x, f: fx, evals });
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = x;
            fb = fx;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
    }
    Err(SgiError::SearchFailure(format!(
        "root refinement exhausted {} evaluations on [{a:e}, {b:e}] (f = {fa:e}, {fb:e})",
        stop.max_evals
    )))
}

/// Scan `n` geometrically spaced points across `[lo, hi]` (inclusive) and
/// return the first adjacent pair over which `f` changes sign, together with
/// the residuals at that pair. Points where `f` returns `None` (e.g. a
/// geometry that cannot be evaluated) are skipped; a sign change is only
/// reported between two successfully evaluated *adjacent surviving* samples.
pub fn scan_sign_change<E>(
    mut f: impl FnMut(f64) -> std::result::Result<Option<f64>, E>,
    lo: f64,
    hi: f64,
    n: usize,
) -> Result<Option<(f64, f64, f64, f64)>>
where
    SgiError: From<E>,
{
    if !(lo > 0.0 && hi > lo && n >= 2) {
        return Err(SgiError::SearchFailure(format!(
            "invalid scan domain [{lo:e}, {hi:e}] with {n} points"
        )));
    }
    let ratio = (hi / lo).powf(1.0 / (n - 1) as f64);
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..n {
        let x = if i + 1 == n { hi } else { lo * ratio.powi(i as i32) };
        let Some(fx) = f(x)? else {
            prev = None;
            continue;
        };
        if let Some((xp, fp)) = prev {
            if fp.signum() != fx.signum() {
                return Ok(Some((xp, x, fp, fx)));
            }
        }
        prev = Some((x, fx));
    }
    Ok(None)
}
