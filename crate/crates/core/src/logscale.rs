//! Iterated-logarithm special functions.
//!
//! `L(x) = ln(max(e, x))` clamps at `e`, so `L`, `LL = L∘L` and
//! `LLL = L∘L∘L` are total, nondecreasing and bounded below by 1 on
//! `[0, ∞)`.  The probe family `f_τ(t) = exp((Lt)^τ)` interpolates between
//! `f_0 ≡ e` and `f_1(t) = t` (for `t ≥ e`) and is what the slow-variation
//! diagnostics feed to candidate normalizer functions.
//!
//! The checked entry points reject negative or non-finite input; the `*_raw`
//! variants are total on already-validated values and are what the inner
//! evaluation loops use.

use crate::error::{Error, Result};

pub const E: f64 = std::f64::consts::E;

/// Exponent threshold beyond which `exp` would overflow; evaluations that
/// would exceed it report `f64::INFINITY` instead of overflowing mid-formula.
pub const EXP_OVERFLOW: f64 = 700.0;

#[inline]
pub(crate) fn l_raw(x: f64) -> f64 {
    x.max(E).ln()
}

#[inline]
pub(crate) fn ll_raw(x: f64) -> f64 {
    l_raw(l_raw(x))
}

#[inline]
pub(crate) fn lll_raw(x: f64) -> f64 {
    l_raw(ll_raw(x))
}

/// `L` applied to a value already given on the log scale: for `u = ln x`,
/// `L(x) = max(1, u)`.  Lets the asymptotic grids reach `x = exp(1e300)`.
#[inline]
pub(crate) fn l_of_ln(ln_x: f64) -> f64 {
    ln_x.max(1.0)
}

fn check(x: f64, op: &'static str) -> Result<()> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain {
            op,
            message: "argument must be finite and nonnegative",
            value: x,
        });
    }
    Ok(())
}

/// `L(x) = ln(max(e, x))`.
pub fn l(x: f64) -> Result<f64> {
    check(x, "L")?;
    Ok(l_raw(x))
}

/// `LL(x) = L(L(x))`.
pub fn ll(x: f64) -> Result<f64> {
    check(x, "LL")?;
    Ok(ll_raw(x))
}

/// `LLL(x) = L(L(L(x)))`.
pub fn lll(x: f64) -> Result<f64> {
    check(x, "LLL")?;
    Ok(lll_raw(x))
}

/// `f_τ(t) = exp((Lt)^τ)` for `0 ≤ τ ≤ 1`.
///
/// The exponent `(Lt)^τ` is formed first; if it exceeds [`EXP_OVERFLOW`] the
/// result is reported as `+∞` rather than overflowing.
pub fn f_tau(t: f64, tau: f64) -> Result<f64> {
    check(t, "f_tau")?;
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::Domain {
            op: "f_tau",
            message: "tau must lie in [0, 1]",
            value: tau,
        });
    }
    Ok(f_tau_raw(t, tau))
}

#[inline]
pub(crate) fn f_tau_raw(t: f64, tau: f64) -> f64 {
    let exponent = l_raw(t).powf(tau);
    if exponent > EXP_OVERFLOW {
        f64::INFINITY
    } else {
        exponent.exp()
    }
}

/// `ln f_τ(t) = (Lt)^τ` with the argument already on the log scale.
#[inline]
pub(crate) fn ln_f_tau_of_ln(ln_t: f64, tau: f64) -> f64 {
    l_of_ln(ln_t).powf(tau)
}
