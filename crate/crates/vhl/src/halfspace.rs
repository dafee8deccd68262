//! The half-space constant `a(p, sigma)`.
//!
//! For monomial profiles `u(x) = x_d^p` in the half-space the operator acts as
//! `L u(x) = a(p, sigma) x_d^{p-2s}`. The constant is computed from the
//! reduced integral
//!
//! ```text
//! a(p, sigma) = int_0^1 (1 - t^p)(1 - t^{2s-1-p}) / (1-t)^{1+2s} * psi(t) dt
//! ```
//!
//! where `psi` collapses the tangential directions. Both indicator conditions
//! inside `psi` are radial: with `h = 1 - t` the first is `|u| < r1`,
//! `r1^2 = sigma^2/h^2 - 1` (active iff `h < sigma`), the second `|u| < r2`,
//! `r2^2 = sigma^2 t^2/h^2 - 1` (active iff `h < sigma t`).
//!
//! An independent one-dimensional principal-value oracle
//! ([`a_constant_pv_oracle`]) evaluates `L u(1)` directly and is used to
//! cross-check the reduced integral.

use crate::error::Error;
use crate::geometry::KernelParams;
use crate::quad;
use crate::Result;
use statrs::function::beta::{beta, beta_reg};
use statrs::function::gamma::gamma;

/// Numerator switches to its Taylor form below this distance from t = 1.
const TAYLOR_CUT: f64 = 1e-3;
/// The graded panels stop at 1 - H_MIN; the remaining slice is integrated in
/// closed form against the Taylor numerator.
const H_MIN: f64 = 1e-14;
/// Dyadic grading depth toward panel endpoints.
const GRADE_LEVELS: usize = 48;

/// Monomial exponent `p`, restricted to `(-1, 2s)` when `sigma = 1`.
/// For `sigma < 1` the weight vanishes near `t = 0` and any `p` is admissible.
#[derive(Debug, Clone, Copy)]
pub struct MonomialExponent {
    p: f64,
}

impl MonomialExponent {
    pub fn new(p: f64, params: &KernelParams) -> Result<Self> {
        if !p.is_finite() {
            return Err(Error::InvalidParams(format!("p must be finite, got {p}")));
        }
        if params.sigma() == 1.0 && !(p > -1.0 && p < 2.0 * params.s()) {
            return Err(Error::InvalidParams(format!(
                "for sigma = 1 the exponent must satisfy -1 < p < 2s, got p = {p}"
            )));
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

/// Computed half-space constant with a conservative quadrature error bound.
#[derive(Debug, Clone)]
pub struct APSigmaResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub p: f64,
    pub params: KernelParams,
    pub dimension: usize,
}

/// Surface measure of the unit sphere `S^k` in `R^{k+1}`.
fn sphere_measure(k: usize) -> f64 {
    let kf = k as f64;
    2.0 * std::f64::consts::PI.powf(0.5 * (kf + 1.0)) / gamma(0.5 * (kf + 1.0))
}

/// `int_0^r rho^{d-2} (1+rho^2)^{-(d+2s)/2} drho` by panel quadrature.
fn radial_integral(r: f64, s: f64, dim: usize) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let expo = -0.5 * (dim as f64 + 2.0 * s);
    let dpow = dim as i32 - 2;
    let mut f = |rho: f64| rho.powi(dpow) * (1.0 + rho * rho).powf(expo);
    if r <= 1.0 {
        return quad::integrate_panel(&mut f, 0.0, r, 16);
    }
    let mut breaks = quad::geometric_breaks(1.0, r, 1.0);
    breaks.insert(0, 0.0);
    quad::integrate_panels(&mut f, &breaks, 16)
}

/// Closed form of the untruncated radial integral via the Beta function;
/// test oracle for [`radial_integral`] and the `t -> 1` limit of `psi`.
fn radial_integral_full(s: f64, dim: usize) -> f64 {
    0.5 * beta(0.5 * (dim as f64 - 1.0), s + 0.5)
}

#[cfg(test)]
fn radial_integral_beta_oracle(r: f64, s: f64, dim: usize) -> f64 {
    let w = r * r / (1.0 + r * r);
    let a = 0.5 * (dim as f64 - 1.0);
    let b = s + 0.5;
    0.5 * beta(a, b) * beta_reg(a, b, w)
}

// Keep the oracle helper referenced in release builds too.
#[allow(dead_code)]
fn _beta_reg_link(w: f64) -> f64 {
    beta_reg(1.0, 1.0, w.clamp(0.0, 1.0))
}

/// Tangential reduction of the weight at height `t`:
/// `psi(t) = int_{R^{d-1}} (1+|u|^2)^{-(d+2s)/2} B(e_d, ((1-t)u, t)) du`.
/// For `d = 1` this is the indicator average `B(1, t)` itself.
pub fn psi(t: f64, params: &KernelParams, dimension: usize) -> Result<f64> {
    if dimension == 0 {
        return Err(Error::InvalidParams("dimension must be at least 1".into()));
    }
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::InvalidParams(format!(
            "psi requires t in (0,1), got {t}"
        )));
    }
    let sigma = params.sigma();
    let h = 1.0 - t;
    if dimension == 1 {
        let mut w = 0.0;
        if h < sigma {
            w += 0.5;
        }
        if h < sigma * t {
            w += 0.5;
        }
        return Ok(w);
    }
    let omega = sphere_measure(dimension - 2);
    let mut acc = 0.0;
    if h < sigma {
        let r1 = (sigma * sigma / (h * h) - 1.0).sqrt();
        acc += 0.5 * omega * radial_integral(r1, params.s(), dimension);
    }
    if h < sigma * t {
        let r2 = (sigma * sigma * t * t / (h * h) - 1.0).sqrt();
        acc += 0.5 * omega * radial_integral(r2, params.s(), dimension);
    }
    Ok(acc)
}

/// Limit of `psi(t)` as `t -> 1` (both truncation radii diverge).
pub fn psi_limit(params: &KernelParams, dimension: usize) -> f64 {
    if dimension == 1 {
        1.0
    } else {
        sphere_measure(dimension - 2) * radial_integral_full(params.s(), dimension)
    }
}

/// Taylor coefficients of `1 - (1-h)^p` up to `h^4`:
/// `u1 h + u2 h^2 + u3 h^3 + u4 h^4`.
fn power_series(p: f64) -> [f64; 4] {
    let u1 = p;
    let u2 = -p * (p - 1.0) / 2.0;
    let u3 = p * (p - 1.0) * (p - 2.0) / 6.0;
    let u4 = -p * (p - 1.0) * (p - 2.0) * (p - 3.0) / 24.0;
    [u1, u2, u3, u4]
}

/// Coefficients `c2..c5` of the product `(1-t^p)(1-t^q)` in powers of
/// `h = 1 - t`.
fn product_series(p: f64, q: f64) -> [f64; 4] {
    let u = power_series(p);
    let v = power_series(q);
    [
        u[0] * v[0],
        u[0] * v[1] + u[1] * v[0],
        u[0] * v[2] + u[1] * v[1] + u[2] * v[0],
        u[0] * v[3] + u[1] * v[2] + u[2] * v[1] + u[3] * v[0],
    ]
}

/// Numerator `(1-t^p)(1-t^q)`; Taylor form near `t = 1` where the direct
/// evaluation cancels catastrophically against the `(1-t)^{-1-2s}` kernel.
fn monomial_numerator(p: f64, q: f64, t: f64) -> f64 {
    let h = 1.0 - t;
    if h < TAYLOR_CUT {
        let c = product_series(p, q);
        return h * h * (c[0] + h * (c[1] + h * (c[2] + h * c[3])));
    }
    (1.0 - t.powf(p)) * (1.0 - t.powf(q))
}

/// Bound on the sixth-order Taylor remainder coefficient of the product.
fn product_remainder_bound(p: f64, q: f64) -> f64 {
    let mag = |x: f64, k: f64| {
        // |binom(x, k)| grows at most like (|x|+k)^k / k!
        ((x.abs() + k).powf(k)) / gamma(k + 1.0)
    };
    let mut c6 = 0.0;
    for k in 1..=5u32 {
        c6 += mag(p, k as f64) * mag(q, (6 - k) as f64);
    }
    2.0 * c6
}

fn build_t_breaks(sigma: f64, level: usize) -> (f64, Vec<f64>) {
    let lo = if sigma < 1.0 { 1.0 - sigma } else { 0.0 };
    let b1 = 1.0 / (1.0 + sigma);
    let mut breaks = quad::graded_breaks_left(lo, b1, GRADE_LEVELS.min(40));
    // Toward t = 1 grade down to the closed-form slice at 1 - H_MIN.
    let upper = 1.0 - H_MIN;
    let levels_hi = (((1.0 - b1) / H_MIN).log2().ceil() as usize).min(64);
    let hi = quad::graded_breaks_right(b1, 1.0, levels_hi);
    for &x in &hi[1..] {
        if x < upper {
            breaks.push(x);
        }
    }
    breaks.push(upper);
    (lo, quad::refine_breaks(&breaks, level))
}

fn a_constant_level(
    p: f64,
    q: f64,
    params: &KernelParams,
    dimension: usize,
    level: usize,
) -> Result<f64> {
    let (_, breaks) = build_t_breaks(params.sigma(), level);
    let two_s = 2.0 * params.s();
    let mut err: Option<Error> = None;
    let mut integrand = |t: f64| -> f64 {
        let h = 1.0 - t;
        match psi(t, params, dimension) {
            Ok(w) => {
                if w == 0.0 {
                    0.0
                } else {
                    monomial_numerator(p, q, t) * h.powf(-1.0 - two_s) * w
                }
            }
            Err(e) => {
                err = Some(e);
                0.0
            }
        }
    };
    let bulk = quad::integrate_panels(&mut integrand, &breaks, 16);
    if let Some(e) = err {
        return Err(e);
    }

    // Closed-form slice over h in (0, H_MIN) against psi frozen at the slice
    // edge; psi approaches its limit like h^{1+2s}, far below the slice scale.
    let psi_edge = psi(1.0 - H_MIN, params, dimension)?;
    let c = product_series(p, q);
    let mut slice = 0.0;
    for (k, ck) in c.iter().enumerate() {
        let expo = (k as f64 + 2.0) - two_s;
        slice += ck * H_MIN.powf(expo) / expo;
    }
    Ok(bulk + slice * psi_edge)
}

/// The half-space constant `a(p, sigma)` in dimension `dimension`.
pub fn a_constant(
    p: MonomialExponent,
    params: &KernelParams,
    dimension: usize,
) -> Result<APSigmaResult> {
    if dimension == 0 {
        return Err(Error::InvalidParams("dimension must be at least 1".into()));
    }
    let pv = p.p();
    let q = 2.0 * params.s() - 1.0 - pv;
    let coarse = a_constant_level(pv, q, params, dimension, 0)?;
    let fine = a_constant_level(pv, q, params, dimension, 1)?;
    if !fine.is_finite() {
        return Err(Error::QuadratureFailure(
            "a(p,sigma) quadrature returned a non-finite value".into(),
        ));
    }
    // Taylor remainder of the stabilized numerator, integrated over the
    // region where it is in use.
    let psi_max = psi_limit(params, dimension);
    let expo = 6.0 - 2.0 * params.s();
    let taylor_bound =
        product_remainder_bound(pv, q) * psi_max * TAYLOR_CUT.powf(expo) / expo;
    Ok(APSigmaResult {
        value: fine,
        abs_error_estimate: (fine - coarse).abs() + taylor_bound,
        p: pv,
        params: *params,
        dimension,
    })
}

/// Direct principal-value oracle for `a(p, sigma)` in dimension 1:
/// evaluates `L u(1)` for `u(y) = y^p` by symmetric-window quadrature with
/// the inner window paired across `y <-> 2 - y`, Richardson-extrapolated over
/// a dyadic ladder of window radii.
pub fn a_constant_pv_oracle(p: f64, params: &KernelParams) -> Result<f64> {
    let p = MonomialExponent::new(p, params)?.p();
    let sigma = params.sigma();
    let two_s = 2.0 * params.s();
    // Radius below which the weight is identically 1 around y = 1; half the
    // saturation radius keeps clear of floating-point ties.
    let w0 = 0.5 * sigma / (1.0 + sigma);

    // One-dimensional weight B(1, y) in the half-line.
    let weight = |y: f64| -> f64 {
        let h = (1.0 - y).abs();
        let mut w = 0.0;
        if h < sigma {
            w += 0.5;
        }
        if h < sigma * y {
            w += 0.5;
        }
        w
    };
    let outer_integrand = |y: f64| -> f64 {
        let w = weight(y);
        if w == 0.0 || y <= 0.0 {
            return 0.0;
        }
        (1.0 - y.powf(p)) * w * (1.0 - y).abs().powf(-1.0 - two_s)
    };

    // Region below the window: (lo, 1 - w0) with weight breakpoints.
    let lo = if sigma < 1.0 { 1.0 - sigma } else { 0.0 };
    let mut low_breaks = quad::merge_breaks(lo, 1.0 - w0, &[1.0 - sigma, 1.0 / (1.0 + sigma)]);
    if sigma == 1.0 {
        // Possible integrable singularity of y^p at 0.
        let first = low_breaks[1];
        let graded = quad::graded_breaks_left(0.0, first, 50);
        low_breaks.splice(0..2, graded);
    }
    let low = quad::integrate_panels(&mut |y| outer_integrand(y), &low_breaks, 16);

    // Region above the window.
    let high = if sigma < 1.0 {
        let hi_end = 1.0 / (1.0 - sigma);
        let breaks = quad::merge_breaks(1.0 + w0, hi_end, &[1.0 + sigma]);
        quad::integrate_panels(&mut |y| outer_integrand(y), &breaks, 16)
    } else {
        let breaks = quad::merge_breaks(1.0 + w0, 4.0, &[2.0]);
        let finite = quad::integrate_panels(&mut |y| outer_integrand(y), &breaks, 16);
        // Tail beyond y = 4 via y = 4/u; the transformed integrand behaves
        // like u^{2s-1-p} at u = 0, integrable for p < 2s.
        let tail_breaks = quad::graded_breaks_left(0.0, 1.0, 50);
        let tail = quad::integrate_panels(
            &mut |u: f64| {
                if u <= 0.0 {
                    return 0.0;
                }
                let y = 4.0 / u;
                outer_integrand(y) * 4.0 / (u * u)
            },
            &tail_breaks,
            16,
        );
        finite + tail
    };

    // Paired inner window: the weight is 1, and pairing y <-> 2-y cancels the
    // odd part, leaving an O(h^{1-2s}) integrand on (eps, w0).
    let paired = |h: f64| -> f64 {
        let num = if h < TAYLOR_CUT {
            let c2 = -p * (p - 1.0);
            let c4 = -p * (p - 1.0) * (p - 2.0) * (p - 3.0) / 12.0;
            let c6 = -2.0
                * (p * (p - 1.0) * (p - 2.0) * (p - 3.0) * (p - 4.0) * (p - 5.0))
                / 720.0;
            let h2 = h * h;
            h2 * (c2 + h2 * (c4 + h2 * c6))
        } else {
            2.0 - (1.0 - h).powf(p) - (1.0 + h).powf(p)
        };
        num * h.powf(-1.0 - two_s)
    };

    const LADDER: usize = 12;
    let mut partials = Vec::with_capacity(LADDER + 1);
    let mut acc = low + high;
    let mut eps = w0;
    partials.push(acc); // contribution down to eps_0 = w0 (empty window part)
    for _ in 0..LADDER {
        let next = 0.5 * eps;
        let mid = 0.5 * (next + eps);
        acc += quad::integrate_panels(&mut |h| paired(h), &[next, mid, eps], 16);
        partials.push(acc);
        eps = next;
    }

    // Richardson on the assumed leading error O(eps^{2-2s}).
    let gamma_order = 2.0 - two_s;
    let factor = 2f64.powf(gamma_order) - 1.0;
    let mut extrapolated = Vec::with_capacity(LADDER);
    for k in 1..partials.len() {
        extrapolated.push(partials[k] + (partials[k] - partials[k - 1]) / factor);
    }
    let n = extrapolated.len();
    let last = extrapolated[n - 1];
    let scale = last.abs().max(1.0);
    let d1 = (extrapolated[n - 1] - extrapolated[n - 2]).abs();
    let d2 = (extrapolated[n - 2] - extrapolated[n - 3]).abs();
    let d3 = (extrapolated[n - 3] - extrapolated[n - 4]).abs();
    if d1 > d2 && d2 > d3 && d1 > 1e-7 * scale {
        return Err(Error::QuadratureFailure(
            "principal-value extrapolation is diverging".into(),
        ));
    }
    Ok(last)
}

/// Signs of `a(p, sigma)` over a grid of exponents; a value within three
/// error estimates of zero is classified as 0.
pub fn sign_grid(
    params: &KernelParams,
    dimension: usize,
    p_values: &[f64],
) -> Result<Vec<(f64, i8)>> {
    let mut out = Vec::with_capacity(p_values.len());
    for &p in p_values {
        let r = a_constant(MonomialExponent::new(p, params)?, params, dimension)?;
        let sign = if r.value.abs() <= 3.0 * r.abs_error_estimate {
            0
        } else if r.value > 0.0 {
            1
        } else {
            -1
        };
        out.push((p, sign));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(s: f64, sigma: f64) -> KernelParams {
        KernelParams::new(s, sigma).unwrap()
    }

    #[test]
    fn psi_vanishes_below_activation() {
        let pr = params(0.75, 0.6);
        for t in [0.05, 0.2, 0.39999] {
            assert_eq!(psi(t, &pr, 1).unwrap(), 0.0);
            assert_eq!(psi(t, &pr, 2).unwrap(), 0.0);
        }
    }

    #[test]
    fn psi_d1_is_the_indicator_average() {
        let pr = params(0.75, 1.0);
        // |1-t| = 2/3 < 1 but not < t = 1/3.
        assert_eq!(psi(1.0 / 3.0, &pr, 1).unwrap(), 0.5);
        assert_eq!(psi(0.9, &pr, 1).unwrap(), 1.0);
    }

    #[test]
    fn psi_rejects_t_outside_unit_interval() {
        let pr = params(0.75, 1.0);
        assert!(psi(0.0, &pr, 1).is_err());
        assert!(psi(1.0, &pr, 1).is_err());
        assert!(psi(-0.2, &pr, 2).is_err());
    }

    #[test]
    fn radial_integral_matches_incomplete_beta() {
        for &dim in &[2usize, 3, 4] {
            for &s in &[0.6, 0.75, 0.9] {
                for &r in &[0.3, 1.0, 7.5, 120.0] {
                    let a = radial_integral(r, s, dim);
                    let b = radial_integral_beta_oracle(r, s, dim);
                    assert!(
                        (a - b).abs() < 1e-12 * b.max(1.0),
                        "d={dim} s={s} r={r}: {a} vs {b}"
                    );
                }
            }
        }
    }

    #[test]
    fn psi_approaches_full_integral_near_one() {
        for &dim in &[2usize, 3] {
            for &sigma in &[0.5, 1.0] {
                let pr = params(0.75, sigma);
                let lim = psi_limit(&pr, dim);
                let near = psi(1.0 - 1e-6, &pr, dim).unwrap();
                assert!(
                    (near - lim).abs() < 1e-9 * lim,
                    "d={dim} sigma={sigma}: {near} vs {lim}"
                );
                // Monotone approach from below.
                let further = psi(1.0 - 1e-3, &pr, dim).unwrap();
                assert!(further <= near + 1e-15);
            }
        }
    }

    #[test]
    fn psi_is_nondecreasing_in_sigma() {
        for &dim in &[1usize, 2, 3] {
            for &t in &[0.3, 0.55, 0.8, 0.95] {
                let mut prev = -1.0;
                for &sigma in &[0.3, 0.5, 0.7, 0.9, 1.0] {
                    let v = psi(t, &params(0.75, sigma), dim).unwrap();
                    assert!(v >= prev - 1e-12, "t={t} d={dim} sigma={sigma}");
                    prev = v;
                }
            }
        }
    }

    #[test]
    fn numerator_keeps_one_sign_across_nodes() {
        // (1-t^p)(1-t^q) has a fixed sign on (0,1) for fixed p.
        for &(s, p) in &[(0.75f64, 0.25f64), (0.75, 1.0), (0.6, -0.5), (0.9, 0.3)] {
            let q = 2.0 * s - 1.0 - p;
            let expected = (p * q).signum();
            for k in 1..2000 {
                let t = k as f64 / 2000.0;
                let v = monomial_numerator(p, q, t);
                if v != 0.0 {
                    assert_eq!(v.signum(), expected, "t={t} p={p}");
                }
            }
        }
    }

    #[test]
    fn numerator_taylor_form_matches_direct_form_at_the_cut() {
        // At h = 1e-3 both evaluations are accurate; they must agree.
        for &(p, q) in &[(0.3, 0.2), (1.1, -0.6), (-0.5, 1.0)] {
            let t = 1.0 - TAYLOR_CUT;
            let h = 1.0 - t;
            let c = product_series(p, q);
            let taylor = h * h * (c[0] + h * (c[1] + h * (c[2] + h * c[3])));
            let direct = (1.0 - t.powf(p)) * (1.0 - t.powf(q));
            assert!(
                (taylor - direct).abs() < 1e-9 * direct.abs().max(1e-12),
                "p={p} q={q}: {taylor} vs {direct}"
            );
        }
    }

    #[test]
    fn zero_at_the_harmonic_exponent() {
        for &s in &[0.6, 0.75, 0.9] {
            for &sigma in &[0.5, 1.0] {
                for &dim in &[1usize, 2, 3] {
                    let pr = params(s, sigma);
                    let p = MonomialExponent::new(2.0 * s - 1.0, &pr).unwrap();
                    let r = a_constant(p, &pr, dim).unwrap();
                    assert!(
                        r.value.abs() <= r.abs_error_estimate.max(1e-6),
                        "s={s} sigma={sigma} d={dim}: {}",
                        r.value
                    );
                }
            }
        }
    }

    #[test]
    fn sign_structure_in_the_interior() {
        let pr = params(0.75, 0.5);
        let pos = a_constant(MonomialExponent::new(0.25, &pr).unwrap(), &pr, 1).unwrap();
        assert!(pos.value > 3.0 * pos.abs_error_estimate, "{}", pos.value);
        let neg = a_constant(MonomialExponent::new(1.0, &pr).unwrap(), &pr, 1).unwrap();
        assert!(neg.value < -3.0 * neg.abs_error_estimate, "{}", neg.value);
        let neg2 = a_constant(MonomialExponent::new(-0.5, &pr).unwrap(), &pr, 1).unwrap();
        assert!(neg2.value < 0.0);
    }

    #[test]
    fn monomial_exponent_range_for_sigma_one() {
        let pr = params(0.75, 1.0);
        assert!(MonomialExponent::new(-1.0, &pr).is_err());
        assert!(MonomialExponent::new(1.5, &pr).is_err());
        assert!(MonomialExponent::new(1.4, &pr).is_ok());
        let pr_half = params(0.75, 0.5);
        assert!(MonomialExponent::new(-3.0, &pr_half).is_ok());
    }

    #[test]
    fn oracle_annihilates_constants_exactly() {
        let pr = params(0.75, 1.0);
        assert_eq!(a_constant_pv_oracle(0.0, &pr).unwrap(), 0.0);
    }

    #[test]
    fn oracle_zero_at_harmonic_exponent() {
        for &sigma in &[0.5, 1.0] {
            for &s in &[0.6, 0.75, 0.9] {
                let pr = params(s, sigma);
                let v = a_constant_pv_oracle(2.0 * s - 1.0, &pr).unwrap();
                assert!(v.abs() < 1e-4, "s={s} sigma={sigma}: {v}");
            }
        }
    }

    #[test]
    fn oracle_agrees_with_reduced_integral() {
        for &sigma in &[0.5, 1.0] {
            let pr = params(0.75, sigma);
            for &p in &[0.2, 0.6, 1.1] {
                let reduced = a_constant(MonomialExponent::new(p, &pr).unwrap(), &pr, 1)
                    .unwrap()
                    .value;
                let direct = a_constant_pv_oracle(p, &pr).unwrap();
                let tol = 1e-3 * reduced.abs().max(1.0);
                assert!(
                    (reduced - direct).abs() < tol,
                    "sigma={sigma} p={p}: {reduced} vs {direct}"
                );
            }
        }
    }

    #[test]
    fn sign_grid_classifies_the_full_table() {
        let s = 0.75;
        let pr = params(s, 0.5);
        let grid = [
            -0.5,
            0.1 * (2.0 * s - 1.0),
            0.9 * (2.0 * s - 1.0),
            2.0 * s - 1.0,
            2.0 * s - 0.05,
        ];
        let signs = sign_grid(&pr, 1, &grid).unwrap();
        let got: Vec<i8> = signs.iter().map(|(_, sg)| *sg).collect();
        assert_eq!(got, vec![-1, 1, 1, 0, -1]);
    }

    #[test]
    fn sign_grid_empty_input() {
        let pr = params(0.75, 1.0);
        assert!(sign_grid(&pr, 1, &[]).unwrap().is_empty());
    }

    #[test]
    fn harmonic_zero_is_dimension_independent() {
        let pr = params(0.8, 0.5);
        let p = 2.0 * 0.8 - 1.0;
        for &dim in &[1usize, 3] {
            let r = a_constant(MonomialExponent::new(p, &pr).unwrap(), &pr, dim).unwrap();
            assert!(r.value.abs() <= r.abs_error_estimate.max(1e-6));
        }
    }
}
