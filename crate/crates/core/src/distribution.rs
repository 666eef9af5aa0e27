//! Baseline chi-squared CDF, the six correction-basis polynomials, and the
//! corrected CDF/PDF/quantile evaluator.
//!
//! The chi-squared CDF is the regularized lower incomplete gamma P(k/2, u/2),
//! computed by the classic series / continued-fraction pair split at
//! x = s + 1. Since s is always a half-integer, ln Gamma(s) comes from the
//! exact recurrence off Gamma(1/2) = sqrt(pi) and Gamma(1) = 1 rather than a
//! fitted approximation; that keeps the full 1e-12 budget for the tail
//! algorithms themselves.

use crate::corrections::CorrectionConstants;
use thiserror::Error;

/// Absolute accuracy target of `chi2_cdf`.
pub const CDF_ACCURACY: f64 = 1e-12;

/// Bisection tolerance (in u) for quantiles.
pub const QUANTILE_TOL: f64 = 1e-10;

const MAX_ITER: usize = 400;

#[derive(Debug, Error)]
pub enum DistributionError {
    #[error("alpha must lie strictly between 0 and 1, got {alpha}")]
    InvalidAlpha { alpha: f64 },
    #[error("incomplete gamma did not converge for s={s}, x={x}")]
    NoConvergence { s: f64, x: f64 },
}

/// ln Gamma(two_s / 2) by the half-integer recurrence; exact to rounding.
fn ln_gamma_half(two_s: u32) -> f64 {
    debug_assert!(two_s >= 1);
    let mut acc = if two_s % 2 == 1 {
        0.5 * std::f64::consts::PI.ln()
    } else {
        0.0
    };
    let mut t = if two_s % 2 == 1 { 1 } else { 2 };
    while t < two_s {
        acc += (t as f64 / 2.0).ln();
        t += 2;
    }
    acc
}

/// Lower regularized incomplete gamma by power series; requires x < s + 1.
fn gamma_p_series(s: f64, x: f64, ln_gamma_s: f64) -> f64 {
    let mut ap = s;
    let mut sum = 1.0 / s;
    let mut term = sum;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * 1e-16 {
            break;
        }
    }
    sum * (s * x.ln() - x - ln_gamma_s).exp()
}

/// Upper regularized incomplete gamma by the Lentz continued fraction;
/// requires x >= s + 1.
fn gamma_q_cf(s: f64, x: f64, ln_gamma_s: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - s);
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
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h * (s * x.ln() - x - ln_gamma_s).exp()
}

/// CDF of the chi-squared distribution with k degrees of freedom.
/// Negative u maps to 0 by convention.
pub fn chi2_cdf(u: f64, k: u32) -> f64 {
    assert!(k >= 1, "k must be at least 1");
    if u <= 0.0 {
        return 0.0;
    }
    let s = k as f64 / 2.0;
    let x = u / 2.0;
    let lg = ln_gamma_half(k);
    if x < s + 1.0 {
        gamma_p_series(s, x, lg)
    } else {
        1.0 - gamma_q_cf(s, x, lg)
    }
}

/// The chi-squared density u^{k/2-1} e^{-u/2} / (2^{k/2} Gamma(k/2)),
/// defined as 0 for u <= 0 (for k = 1 the u -> 0+ limit diverges; callers
/// never evaluate it at exactly 0).
pub fn chi2_pdf_factor(u: f64, k: u32) -> f64 {
    assert!(k >= 1, "k must be at least 1");
    if u <= 0.0 {
        return 0.0;
    }
    let s = k as f64 / 2.0;
    ((s - 1.0) * u.ln() - u / 2.0 - s * std::f64::consts::LN_2 - ln_gamma_half(k)).exp()
}

/// Quantile of the chi-squared distribution, by bisection on `chi2_cdf`.
pub fn chi2_quantile(alpha: f64, k: u32) -> Result<f64, DistributionError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(DistributionError::InvalidAlpha { alpha });
    }
    let mut lo = 0.0;
    let mut hi = k as f64 + 10.0;
    while chi2_cdf(hi, k) < alpha {
        hi *= 2.0;
        if hi > 1e308 {
            return Err(DistributionError::NoConvergence {
                s: k as f64 / 2.0,
                x: alpha,
            });
        }
    }
    while hi - lo > 1e-12 * (1.0 + lo) {
        let mid = 0.5 * (lo + hi);
        if chi2_cdf(mid, k) < alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The six bracketed correction polynomials. Identifiers name the derivative
/// pattern each integral came from; three share a quadratic or cubic core,
/// making the stated multiples exact at the coefficient level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrectionBasis {
    P2,
    P4,
    P6,
    P22,
    P42,
    P222,
}

impl CorrectionBasis {
    pub const ALL: [CorrectionBasis; 6] = [
        CorrectionBasis::P2,
        CorrectionBasis::P4,
        CorrectionBasis::P6,
        CorrectionBasis::P22,
        CorrectionBasis::P42,
        CorrectionBasis::P222,
    ];

    /// Smallest dimension in which the derivative pattern exists (two
    /// distinct axes for P22/P42, three for P222).
    pub fn min_k(self) -> u32 {
        match self {
            CorrectionBasis::P2 | CorrectionBasis::P4 | CorrectionBasis::P6 => 1,
            CorrectionBasis::P22 | CorrectionBasis::P42 => 2,
            CorrectionBasis::P222 => 3,
        }
    }
}

fn quad_core(u: f64, k: f64) -> f64 {
    2.0 * u / k - 2.0 * u * u / (k * (k + 2.0))
}

fn cubic_core(u: f64, k: f64) -> f64 {
    -2.0 * u / k + 4.0 * u * u / (k * (k + 2.0)) - 2.0 * u * u * u / (k * (k + 2.0) * (k + 4.0))
}

/// The bracketed polynomial alone; multiply by `chi2_pdf_factor` to get the
/// CDF contribution of the corresponding derivative term.
pub fn evaluate_basis(basis: CorrectionBasis, u: f64, k: u32) -> f64 {
    assert!(k >= 1, "k must be at least 1");
    let kf = k as f64;
    match basis {
        CorrectionBasis::P2 => -2.0 * u / kf,
        CorrectionBasis::P4 => 3.0 * quad_core(u, kf),
        CorrectionBasis::P22 => quad_core(u, kf),
        CorrectionBasis::P6 => 15.0 * cubic_core(u, kf),
        CorrectionBasis::P42 => 3.0 * cubic_core(u, kf),
        CorrectionBasis::P222 => cubic_core(u, kf),
    }
}

/// Result of a quantile search. `non_monotone` is set when the corrected CDF
/// was observed decreasing while bracketing: the correction is too large for
/// this n and the reported value is the smallest crossing found.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantile {
    pub value: f64,
    pub non_monotone: bool,
}

/// Evaluator for the corrected distribution of T. The corrected formulas
/// describe T - d, so every evaluation shifts its argument by d first;
/// callers pass observed values of T directly.
#[derive(Debug, Clone, Copy)]
pub struct CorrectedDistribution {
    constants: CorrectionConstants,
}

impl CorrectedDistribution {
    pub fn new(constants: CorrectionConstants) -> Self {
        CorrectedDistribution { constants }
    }

    pub fn constants(&self) -> &CorrectionConstants {
        &self.constants
    }

    pub fn k(&self) -> u32 {
        self.constants.k
    }

    /// Corrected CDF of T. Raw value: may leave [0,1] when the constants are
    /// large relative to n; clamping is an explicit caller decision.
    pub fn cdf(&self, u: f64) -> f64 {
        let c = &self.constants;
        let us = u - c.d;
        if us <= 0.0 {
            return 0.0;
        }
        let bracket = c.a * evaluate_basis(CorrectionBasis::P2, us, c.k)
            + c.b * evaluate_basis(CorrectionBasis::P22, us, c.k)
            + c.c * evaluate_basis(CorrectionBasis::P222, us, c.k);
        chi2_cdf(us, c.k) + bracket * chi2_pdf_factor(us, c.k)
    }

    /// Corrected PDF of T; 0 at and below the support point d. May be
    /// negative for extreme constants, reported raw.
    pub fn pdf(&self, u: f64) -> f64 {
        let c = &self.constants;
        let us = u - c.d;
        if us <= 0.0 {
            return 0.0;
        }
        let k = c.k as f64;
        let bracket_a = us / k - 1.0;
        let bracket_b = us * us / (k * (k + 2.0)) - 2.0 * us / k + 1.0;
        let bracket_c = us * us * us / (k * (k + 2.0) * (k + 4.0))
            - 3.0 * us * us / (k * (k + 2.0))
            + 3.0 * us / k
            - 1.0;
        chi2_pdf_factor(us, c.k)
            * (1.0 + c.a * bracket_a + c.b * bracket_b + c.c * bracket_c)
    }

    /// Smallest u with cdf(u) >= alpha, located by a coarse forward scan
    /// (which also detects non-monotonicity) refined by bisection to
    /// `QUANTILE_TOL`.
    pub fn quantile(&self, alpha: f64) -> Result<Quantile, DistributionError> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(DistributionError::InvalidAlpha { alpha });
        }
        let d = self.constants.d;
        let mut hi = chi2_quantile(alpha, self.constants.k)? + d;
        let mut guard = 0;
        while self.cdf(hi) < alpha {
            hi = d + (hi - d).max(0.5) * 2.0;
            guard += 1;
            if guard > 200 {
                return Err(DistributionError::NoConvergence {
                    s: self.constants.k as f64 / 2.0,
                    x: alpha,
                });
            }
        }

        // Scan for the first bracketing interval so a non-monotone CDF still
        // yields its earliest crossing, and record any observed decrease.
        const SCAN: usize = 256;
        let mut non_monotone = false;
        let mut lo = d;
        let mut prev = 0.0;
        let mut bracket_lo = d;
        let mut bracket_hi = hi;
        let mut found = false;
        for i in 1..=SCAN {
            let x = d + (hi - d) * i as f64 / SCAN as f64;
            let g = self.cdf(x);
            if g < prev - 1e-14 {
                non_monotone = true;
            }
            if !found && g >= alpha {
                bracket_lo = lo;
                bracket_hi = x;
                found = true;
            }
            lo = x;
            prev = g;
        }
        debug_assert!(found, "cdf(hi) >= alpha guarantees a crossing");

        let (mut lo, mut hi) = (bracket_lo, bracket_hi);
        while hi - lo > QUANTILE_TOL {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) < alpha {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(Quantile {
            value: 0.5 * (lo + hi),
            non_monotone,
        })
    }
}
