//! Shared numerical kernels: adaptive Simpson quadrature (proper and
//! improper), monotone bisection, central differences, and reproducible
//! random streams.
//!
//! Every routine here is pure given its inputs and safe to call from
//! concurrent workers. Random streams are single-owner: one stream per
//! worker, with independence across workers coming from distinct
//! `stream_id` values, never from sharing a stream.

use crate::error::{Error, Result};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Tolerances and caps for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Absolute tolerance on the integral value.
    pub abs_tol: f64,
    /// Relative tolerance on the integral value.
    pub rel_tol: f64,
    /// Recursion cap for the adaptive subdivision.
    pub max_depth: u32,
    /// Bound on the marginal panel when truncating improper integrals.
    pub infinity_cutoff_tol: f64,
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_depth: u32, infinity_cutoff_tol: f64) -> Result<Self> {
        if !(abs_tol > 0.0) || !(rel_tol > 0.0) || max_depth < 1 || !(infinity_cutoff_tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "quadrature spec requires abs_tol > 0, rel_tol > 0, max_depth >= 1, \
                 infinity_cutoff_tol > 0 (got {abs_tol}, {rel_tol}, {max_depth}, {infinity_cutoff_tol})"
            )));
        }
        Ok(Self {
            abs_tol,
            rel_tol,
            max_depth,
            infinity_cutoff_tol,
        })
    }

    /// Looser tolerances for yes/no convergence probes (finite-mean checks).
    pub fn coarse() -> Self {
        Self {
            abs_tol: 1e-6,
            rel_tol: 1e-6,
            max_depth: 40,
            infinity_cutoff_tol: 1e-9,
        }
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_depth: 50,
            infinity_cutoff_tol: 1e-12,
        }
    }
}

fn simpson(fa: f64, fm: f64, fb: f64, width: f64) -> f64 {
    width / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    m: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    // Richardson: |delta|/15 estimates the error of left + right.
    if delta.abs() <= 15.0 * tol || m - a < f64::EPSILON * a.abs().max(1.0) {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::NonConvergent("adaptive Simpson recursion cap hit"));
    }
    let half = 0.5 * tol;
    Ok(
        adaptive_simpson(f, a, fa, m, fm, lm, flm, left, half, depth - 1)?
            + adaptive_simpson(f, m, fm, b, fb, rm, frm, right, half, depth - 1)?,
    )
}

fn integrate_proper<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<f64> {
    if lo == hi {
        return Ok(0.0);
    }
    let m = 0.5 * (lo + hi);
    let (fa, fm, fb) = (f(lo), f(m), f(hi));
    let whole = simpson(fa, fm, fb, hi - lo);
    let tol = spec.abs_tol.max(spec.rel_tol * whole.abs());
    adaptive_simpson(f, lo, fa, hi, fb, m, fm, whole, tol, spec.max_depth)
}

/// Number of cutoff doublings before an improper integral is declared
/// non-convergent. 2^900 stays comfortably inside f64 range.
const MAX_DOUBLINGS: u32 = 900;

/// Integrate `f` over `[lo, hi]` with adaptive Simpson quadrature.
///
/// `hi = f64::INFINITY` is handled by successive doubling of the cutoff,
/// starting at `max(1, lo + 1)`, until the marginal panel contributes less
/// than `spec.infinity_cutoff_tol`; the integrand must then be eventually
/// monotone decreasing toward zero.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<f64> {
    if hi.is_finite() {
        if lo > hi {
            return Err(Error::InvalidInterval { lo, hi });
        }
        return integrate_proper(&f, lo, hi, spec);
    }
    let mut cutoff = (lo + 1.0).max(1.0);
    let mut total = integrate_proper(&f, lo, cutoff, spec)?;
    for _ in 0..MAX_DOUBLINGS {
        let panel = integrate_proper(&f, cutoff, 2.0 * cutoff, spec)?;
        total += panel;
        cutoff *= 2.0;
        if panel.abs() < spec.infinity_cutoff_tol {
            return Ok(total);
        }
    }
    Err(Error::NonConvergent("improper tail did not decay"))
}

/// Solve `g(t) = target` for a nondecreasing `g` on `[lo, hi]` by interval
/// halving.
///
/// Converges to the leftmost solution when `g` is flat at the target level:
/// the bracket keeps `g(lo) < target <= g(hi)`. The returned point is within
/// `tol` of the crossing.
pub fn bisect_monotone<F: Fn(f64) -> f64>(g: F, target: f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if lo > hi {
        return Err(Error::InvalidInterval { lo, hi });
    }
    let (glo, ghi) = (g(lo), g(hi));
    if glo > target || ghi < target {
        return Err(Error::NotBracketed {
            target,
            lo,
            hi,
            glo,
            ghi,
        });
    }
    if glo >= target {
        return Ok(lo);
    }
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // bracket at floating-point resolution
        }
        if g(mid) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Finite-difference derivative estimate of order 1 (`f'`) or 2 (`f''`).
///
/// Step sizes are `eps^(1/3) * max(1, |t|)` and `eps^(1/4) * max(1, |t|)`,
/// balancing truncation against rounding. Near `t = 0` the stencil switches
/// to a one-sided forward form so `f` is never evaluated at negative
/// arguments.
pub fn central_difference<F: Fn(f64) -> f64>(f: F, t: f64, order: u8) -> f64 {
    let scale = t.abs().max(1.0);
    match order {
        1 => {
            let h = f64::EPSILON.cbrt() * scale;
            if t - h < 0.0 {
                (-3.0 * f(t) + 4.0 * f(t + h) - f(t + 2.0 * h)) / (2.0 * h)
            } else {
                (f(t + h) - f(t - h)) / (2.0 * h)
            }
        }
        2 => {
            let h = f64::EPSILON.powf(0.25) * scale;
            if t - h < 0.0 {
                (f(t) - 2.0 * f(t + h) + f(t + 2.0 * h)) / (h * h)
            } else {
                (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h)
            }
        }
        _ => panic!("central_difference supports orders 1 and 2, got {order}"),
    }
}

/// A reproducible random stream: the pair (seed, stream_id) fully determines
/// the sample sequence, and distinct stream ids give statistically
/// independent streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RandomStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// A fresh generator positioned at the start of the stream.
    pub fn rng(&self) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    const SPEC: QuadratureSpec = QuadratureSpec {
        abs_tol: 1e-10,
        rel_tol: 1e-10,
        max_depth: 50,
        infinity_cutoff_tol: 1e-12,
    };

    #[test]
    fn integrate_polynomial_exact() {
        let v = integrate(|t| 2.0 * t, 0.0, 1.0, &SPEC).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn integrate_zero_integrand() {
        let v = integrate(|_| 0.0, 0.0, 5.0, &SPEC).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn integrate_improper_inverse_square() {
        // oracle: antiderivative -1/u gives exactly 1 on [1, inf)
        let v = integrate(|u| u.powi(-2), 1.0, f64::INFINITY, &SPEC).unwrap();
        assert!((v - 1.0).abs() < 1e-10, "got {v}");
    }

    #[test]
    fn integrate_rejects_reversed_interval() {
        assert!(matches!(
            integrate(|t| t, 2.0, 1.0, &SPEC),
            Err(Error::InvalidInterval { .. })
        ));
    }

    #[test]
    fn integrate_depth_cap_reports_nonconvergence() {
        let tight = QuadratureSpec::new(1e-14, 1e-14, 2, 1e-12).unwrap();
        let r = integrate(|t| (1.0 / (t + 1e-3)).sin(), 0.0, 1.0, &tight);
        assert!(matches!(r, Err(Error::NonConvergent(_))));
    }

    #[test]
    fn bisect_square_root() {
        let t = bisect_monotone(|t| t * t, 4.0, 0.0, 10.0, 1e-12).unwrap();
        assert!((t - 2.0).abs() < 1e-11);
    }

    #[test]
    fn bisect_identity() {
        let t = bisect_monotone(|t| t, 0.5, 0.0, 1.0, 1e-12).unwrap();
        assert!((t - 0.5).abs() < 1e-11);
    }

    #[test]
    fn bisect_cubic() {
        // oracle: g(2) = 8 + 2 = 10 by direct evaluation
        let g = |t: f64| t * t * t + t;
        assert_eq!(g(2.0), 10.0);
        let t = bisect_monotone(g, 10.0, 0.0, 3.0, 1e-12).unwrap();
        assert!((t - 2.0).abs() < 1e-11);
    }

    #[test]
    fn bisect_rejects_unbracketed_target() {
        assert!(matches!(
            bisect_monotone(|t| t, 5.0, 0.0, 1.0, 1e-12),
            Err(Error::NotBracketed { .. })
        ));
    }

    #[test]
    fn bisect_stays_inside_bracket() {
        for &(lo, hi, target) in &[(0.0, 1.0, 0.3), (2.0, 9.0, 50.0), (0.5, 64.0, 1.0)] {
            let t = bisect_monotone(|t| t * t, target, lo, hi, 1e-9).unwrap();
            assert!(t >= lo && t <= hi);
        }
    }

    #[test]
    fn central_difference_quadratic() {
        let d = central_difference(|t| t * t, 3.0, 1);
        assert!((d - 6.0).abs() < 1e-7);
        let d2 = central_difference(|t| t * t, 1.0, 2);
        assert!((d2 - 2.0).abs() < 1e-5);
    }

    #[test]
    fn central_difference_exponential_at_zero() {
        // forward stencil engages because t - h < 0; oracle: exp'(0) = 1
        let d = central_difference(|t| t.exp(), 0.0, 1);
        assert!((d - 1.0).abs() < 1e-7, "got {d}");
    }

    #[test]
    fn random_stream_is_reproducible() {
        let s = RandomStream::new(42, 7);
        let a: Vec<u64> = (0..32).map({ let mut r = s.rng(); move |_| r.gen() }).collect();
        let b: Vec<u64> = (0..32).map({ let mut r = s.rng(); move |_| r.gen() }).collect();
        assert_eq!(a, b);
        let other: Vec<u64> = (0..32)
            .map({ let mut r = RandomStream::new(42, 8).rng(); move |_| r.gen() })
            .collect();
        assert_ne!(a, other);
    }
}
