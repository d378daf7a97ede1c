//! Bessel functions of the first kind with real (fractional) order, their
//! positive zeros, and the orthogonality integral behind the Fourier-Bessel
//! expansion.
//!
//! Evaluation strategy: the ascending power series
//!
//! ```text
//! J_nu(x) = (x/2)^nu * sum_k (-1)^k / (k! Gamma(nu+k+1)) (x/2)^(2k)
//! ```
//!
//! with term-ratio stopping for `x <= max(12, 2|nu|)`, and the Hankel
//! large-argument expansion
//!
//! ```text
//! J_nu(x) = sqrt(2/(pi x)) [P(nu,x) cos w - Q(nu,x) sin w],  w = x - nu pi/2 - pi/4
//! ```
//!
//! beyond.  The crossover keeps series cancellation to ~1e-12 while the
//! asymptotic series has bottomed out well below that.  Orders down to
//! `nu > -1` are supported: the eigenvalue condition takes zeros of
//! `J_{nu-1}` and `nu - 1` lies in `(-1/2, 1)` over the admitted exponent
//! range.
//!
//! Zero finding uses the McMahon expansion as the initial guess, Newton
//! refinement with `J_nu'(x) = J_{nu-1}(x) - (nu/x) J_nu(x)`, and a
//! sign-change bisection fallback.

use crate::error::{Error, Result};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

/// A real Bessel order.  Orders must satisfy `nu > -1` so that the
/// ascending series coefficients `Gamma(nu + k + 1)` stay positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselOrder(f64);

impl BesselOrder {
    pub fn new(nu: f64) -> Result<Self> {
        if !nu.is_finite() || nu <= -1.0 {
            return Err(Error::InvalidParameter(format!(
                "Bessel order must be finite and > -1, got {nu}"
            )));
        }
        Ok(Self(nu))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// The first `count` positive zeros of `J_nu`, strictly increasing.
#[derive(Debug, Clone)]
pub struct ZeroTable {
    nu: f64,
    zeros: Vec<f64>,
}

impl ZeroTable {
    pub fn order(&self) -> f64 {
        self.nu
    }

    /// 1-based access: `get(n)` is `j_{nu,n}`.
    pub fn get(&self, n: usize) -> f64 {
        self.zeros[n - 1]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.zeros
    }

    pub fn count(&self) -> usize {
        self.zeros.len()
    }
}

// Lanczos approximation, g = 7, 9 coefficients.  Relative error ~1e-13 on
// the positive real axis, which the series coefficients need for fractional
// orders.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for real arguments (Lanczos).
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection keeps the Lanczos sum on x >= 0.5.
        PI / ((PI * x).sin() * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut acc = LANCZOS_COEF[0];
        for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
            acc += c / (x + i as f64);
        }
        let t = x + LANCZOS_G + 0.5;
        (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
    }
}

fn series_cutoff(nu: f64) -> f64 {
    12.0f64.max(2.0 * nu.abs())
}

/// Ascending power series; valid for small and moderate `x`.
fn bessel_j_series(nu: f64, x: f64) -> f64 {
    let half = 0.5 * x;
    let t = half * half;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for k in 1..400 {
        let k = k as f64;
        term *= -t / (k * (nu + k));
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    half.powf(nu) / gamma(nu + 1.0) * sum
}

/// Hankel expansion for large arguments.  The series is asymptotic; terms
/// are accumulated until they stop shrinking or fall below 1e-18 relative.
fn bessel_j_asymptotic(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let omega = x - nu * FRAC_PI_2 - FRAC_PI_4;
    let mut p = 0.0f64;
    let mut q = 0.0f64;
    let mut b = 1.0f64; // b_k = prod (mu - (2i-1)^2) / (k! (8x)^k)
    let mut prev = f64::INFINITY;
    for k in 0u32..60 {
        if k > 0 {
            let i = k as f64;
            let odd = 2.0 * i - 1.0;
            b *= (mu - odd * odd) / (i * 8.0 * x);
        }
        if b.abs() > prev {
            break; // divergent part of the asymptotic series
        }
        prev = b.abs();
        match k % 4 {
            0 => p += b,
            1 => q += b,
            2 => p -= b,
            _ => q -= b,
        }
        if b.abs() < 1e-18 {
            break;
        }
    }
    (2.0 / (PI * x)).sqrt() * (p * omega.cos() - q * omega.sin())
}

/// Bessel function of the first kind `J_nu(x)` for `x >= 0`.
pub fn bessel_j(nu: BesselOrder, x: f64) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::NegativeArgument { x });
    }
    let nu = nu.value();
    if x == 0.0 {
        return Ok(match nu {
            n if n == 0.0 => 1.0,
            n if n > 0.0 => 0.0,
            _ => f64::INFINITY,
        });
    }
    if x <= series_cutoff(nu) {
        Ok(bessel_j_series(nu, x))
    } else {
        Ok(bessel_j_asymptotic(nu, x))
    }
}

/// Derivative `J_nu'(x) = J_{nu-1}(x) - (nu/x) J_nu(x)`, `x > 0`.
pub fn bessel_j_prime(nu: BesselOrder, x: f64) -> Result<f64> {
    let n = nu.value();
    let lower = BesselOrder::new(n - 1.0)?;
    Ok(bessel_j(lower, x)? - (n / x) * bessel_j(nu, x)?)
}

/// McMahon asymptotic expansion for the n-th zero of `J_nu`.
fn mcmahon_guess(nu: f64, n: usize) -> f64 {
    let beta = (n as f64 + 0.5 * nu - 0.25) * PI;
    let mu = 4.0 * nu * nu;
    let b8 = 8.0 * beta;
    beta - (mu - 1.0) / b8
        - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * b8.powi(3))
        - 32.0 * (mu - 1.0) * (83.0 * mu * mu - 982.0 * mu + 3779.0) / (15.0 * b8.powi(5))
}

/// First `count` positive zeros of `J_nu`, each to <= 1e-10 absolute error.
pub fn bessel_zeros(nu: BesselOrder, count: usize) -> Result<ZeroTable> {
    if count == 0 {
        return Err(Error::InvalidParameter("zero count must be >= 1".into()));
    }
    let order = nu.value();
    let mut zeros = Vec::with_capacity(count);
    let mut prev = 0.0f64;
    for n in 1..=count {
        let guess = mcmahon_guess(order, n);
        let z = refine_zero(nu, guess, prev).ok_or(Error::ZeroSearch {
            nu: order,
            index: n,
        })?;
        if z <= prev {
            return Err(Error::ZeroSearch {
                nu: order,
                index: n,
            });
        }
        zeros.push(z);
        prev = z;
    }
    Ok(ZeroTable {
        nu: order,
        zeros,
    })
}

/// Newton with a bisection fallback inside a sign-change bracket.
fn refine_zero(nu: BesselOrder, guess: f64, lower_bound: f64) -> Option<f64> {
    let mut z = guess;
    for _ in 0..60 {
        let f = bessel_j(nu, z).ok()?;
        let fp = bessel_j_prime(nu, z).ok()?;
        if fp == 0.0 {
            break;
        }
        let step = (f / fp).clamp(-1.0, 1.0);
        z -= step;
        if !(z.is_finite() && z > lower_bound && (z - guess).abs() < PI) {
            break;
        }
        if step.abs() < 1e-13 * z.max(1.0) {
            if bessel_j(nu, z).ok()?.abs() < 1e-10 {
                return Some(z);
            }
            break;
        }
    }
    bisect_zero(nu, guess, lower_bound)
}

fn bisect_zero(nu: BesselOrder, guess: f64, lower_bound: f64) -> Option<f64> {
    // Scan a window around the McMahon guess for a sign change.
    let lo0 = (guess - 0.6 * PI).max(lower_bound + 1e-9).max(1e-9);
    let hi0 = guess + 0.6 * PI;
    let steps = 256;
    let dx = (hi0 - lo0) / steps as f64;
    let mut a = lo0;
    let mut fa = bessel_j(nu, a).ok()?;
    let mut bracket = None;
    for i in 1..=steps {
        let b = lo0 + i as f64 * dx;
        let fb = bessel_j(nu, b).ok()?;
        if fa == 0.0 {
            return Some(a);
        }
        if fa * fb < 0.0 {
            bracket = Some((a, b, fa));
            break;
        }
        a = b;
        fa = fb;
    }
    let (mut a, mut b, mut fa) = bracket?;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if b - a < 1e-13 {
            return Some(m);
        }
        let fm = bessel_j(nu, m).ok()?;
        if fm == 0.0 {
            return Some(m);
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    Some(0.5 * (a + b))
}

/// Orthogonality integral of the Fourier-Bessel eigenfunctions,
///
/// ```text
/// int_0^1 J_nu(j_{nu-1,m} x) J_nu(j_{nu-1,n} x) x dx
///   = delta_{m,n} J_nu^2(j_{nu-1,m}) / 2
/// ```
///
/// evaluated by adaptive quadrature (the right-hand side is what the
/// expansion coefficients divide by; the integral itself is the check).
pub fn orthogonality_integral(nu: BesselOrder, m: usize, n: usize) -> Result<f64> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter("zero indices are 1-based".into()));
    }
    let lower = BesselOrder::new(nu.value() - 1.0)?;
    let table = bessel_zeros(lower, m.max(n))?;
    let alpha = table.get(m);
    let beta = table.get(n);
    let f = |x: f64| -> Result<f64> {
        Ok(bessel_j(nu, alpha * x)? * bessel_j(nu, beta * x)? * x)
    };
    adaptive_simpson(&f, 0.0, 1.0, 1e-11)
}

/// Adaptive Simpson quadrature on `[a, b]` to absolute tolerance `tol`.
pub(crate) fn adaptive_simpson<F>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let fa = f(a)?;
    let fb = f(b)?;
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 40)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Quadrature { lo: a, hi: b });
    }
    Ok(simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
}
