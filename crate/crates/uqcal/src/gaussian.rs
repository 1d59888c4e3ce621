//! Standard-normal kernel: density, distribution function, quantile, and the
//! chi-squared(1) quantile derived from it.
//!
//! The CDF is computed through the regularized incomplete gamma function
//! (series below the crossover, continued fraction above), which keeps the
//! absolute error under 1e-13 across |z| <= 8 without coefficient tables.
//! The quantile uses Acklam's rational approximation refined by Halley steps
//! against the implemented CDF, so the two functions are mutual inverses to
//! machine precision.

use crate::error::{Error, Result};

/// sqrt(2*pi)
const SQRT_2PI: f64 = 2.5066282746310002;
/// 1/sqrt(2*pi)
const FRAC_1_SQRT_2PI: f64 = 0.3989422804014327;

/// Density of the standard normal distribution at `z`.
pub fn standard_normal_pdf(z: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * z * z).exp()
}

/// Distribution function of the standard normal at `z`.
pub fn standard_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z * std::f64::consts::FRAC_1_SQRT_2)
}

/// Quantile (inverse CDF) of the standard normal.
///
/// `p` must lie strictly inside (0, 1).
pub fn standard_normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::ProbabilityOutOfRange {
            name: "p",
            value: p,
        });
    }
    let mut x = acklam_initial(p);
    // Halley refinement against the implemented CDF; one step takes the
    // initial guess from ~1e-9 relative error to machine precision, the
    // second is a safety net near the breakpoints.
    for _ in 0..2 {
        if x.abs() > 37.0 {
            break; // pdf underflows; the tail guess is already at full precision
        }
        let e = standard_normal_cdf(x) - p;
        if e == 0.0 {
            break;
        }
        let u = e * SQRT_2PI * (0.5 * x * x).exp();
        x -= u / (1.0 + 0.5 * x * u);
    }
    Ok(x)
}

/// Quantile of the chi-squared distribution with one degree of freedom.
///
/// Uses the identity F_chi2_1(a) = 2*Phi(sqrt(a)) - 1, so the quantile is
/// the squared normal quantile of (tau + 1)/2.
pub fn chi2_1_quantile(tau: f64) -> Result<f64> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::ProbabilityOutOfRange {
            name: "tau",
            value: tau,
        });
    }
    let q = standard_normal_quantile((tau + 1.0) / 2.0)?;
    Ok(q * q)
}

/// Complementary error function, accurate in the upper tail.
fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    let t = x * x;
    if t < 1.5 {
        1.0 - gamma_p_half(t)
    } else {
        gamma_q_half(t)
    }
}

/// exp(-x) * x^(1/2) / Gamma(1/2), the shared prefactor of both
/// incomplete-gamma routes at a = 1/2.
fn half_gamma_prefactor(x: f64) -> f64 {
    (-x).exp() * (x / std::f64::consts::PI).sqrt()
}

/// Regularized lower incomplete gamma P(1/2, x) by power series.
///
/// Every term is positive, so the sum accumulates at full relative
/// precision; used for x < 1.5.
fn gamma_p_half(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let mut denom = 0.5;
    let mut term = 1.0 / denom;
    let mut sum = term;
    for _ in 0..200 {
        denom += 1.0;
        term *= x / denom;
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum * half_gamma_prefactor(x)
}

/// Regularized upper incomplete gamma Q(1/2, x) by modified Lentz continued
/// fraction; converges rapidly for x >= 1.5.
fn gamma_q_half(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let a = 0.5;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..200 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h * half_gamma_prefactor(x)
}

/// Acklam's rational approximation to the standard normal quantile,
/// ~1.15e-9 relative error over (0, 1).
fn acklam_initial(p: f64) -> f64 {
    const A: [f64; 6] = [
        -39.6968302866538,
        220.946098424521,
        -275.928510446969,
        138.357751867269,
        -30.6647980661472,
        2.50662827745924,
    ];
    const B: [f64; 5] = [
        -54.4760987982241,
        161.585836858041,
        -155.698979859887,
        66.8013118877197,
        -13.2806815528857,
    ];
    const C: [f64; 6] = [
        -7.78489400243029e-3,
        -0.322396458041136,
        -2.40075827716184,
        -2.54973253934373,
        4.37466414146497,
        2.93816398269878,
    ];
    const D: [f64; 4] = [
        7.78469570904146e-3,
        0.32246712907004,
        2.445134137143,
        3.75440866190742,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}
