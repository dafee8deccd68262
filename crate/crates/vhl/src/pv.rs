//! Pointwise principal-value evaluation of the operator.
//!
//! `L u(x)` splits into an inner ball, where the weight is identically 1 and
//! the singular odd part cancels by pairing `u(x) - u(x+h)` with
//! `u(x) - u(x-h)`, and an outer region quadratured over the explicit kernel
//! support. The inner-ball radius is half the saturation radius
//! `sigma/(1+sigma) * d(x)`, so the pairing is exact and floating-point ties
//! at the saturation boundary cannot flip an indicator.
//!
//! In two dimensions the outer region is swept in polar coordinates about
//! `x`: along every ray both indicator conditions are single radial
//! thresholds (closed form in the half-space, a monotone root in the ball),
//! so the weight is piecewise constant on each ray and every radial panel has
//! a smooth integrand. All panel layouts are built from ratios of `d(x)` and
//! the thresholds, which makes the evaluation equivariant under translation
//! and dilation of the configuration.

use crate::error::Error;
use crate::geometry::{DomainSpec, KernelParams, Point};
use crate::quad;
use crate::Result;
use std::sync::Arc;

/// Number of rungs in the inner-window ladder, `eps_k = r_in * 2^{-k}`.
const LADDER: usize = 6;

/// A scalar profile on the domain closure. The caller asserts local C^2
/// smoothness near evaluation points via `smoothness_note`.
#[derive(Clone)]
pub struct ScalarField {
    eval: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    smoothness_note: String,
}

impl std::fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScalarField")
            .field("smoothness_note", &self.smoothness_note)
            .finish()
    }
}

impl ScalarField {
    pub fn new<F>(smoothness_note: &str, eval: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            eval: Arc::new(eval),
            smoothness_note: smoothness_note.to_string(),
        }
    }

    /// Monomial profile `u(y) = (y_d)^p` in the last coordinate.
    pub fn monomial_last(p: f64) -> Self {
        Self::new(&format!("y_d^{p}, smooth away from the boundary"), move |y| {
            y.last().unwrap().max(0.0).powf(p)
        })
    }

    /// Power of the distance function of a domain.
    pub fn distance_power(domain: DomainSpec, p: f64) -> Self {
        Self::new(
            &format!("d^{p}, smooth near the boundary away from ridge points"),
            move |y| domain.distance_raw(y).powf(p),
        )
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }

    pub fn smoothness_note(&self) -> &str {
        &self.smoothness_note
    }
}

/// Result of a principal-value evaluation.
#[derive(Debug, Clone)]
pub struct PVResult {
    /// Extrapolated limit of the inner window plus the outer integral.
    pub value: f64,
    /// Extrapolation increment plus the difference of two quadrature
    /// resolutions; conservative, not a rigorous bound.
    pub abs_error_estimate: f64,
    /// `(eps, partial value)` pairs, strictly decreasing in `eps`; each
    /// partial integrates over the domain minus the `eps`-ball.
    pub epsilon_trace: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy)]
struct Resolution {
    /// Outer polar sweep: panels over the full angle (multiple of 4).
    theta_panels: usize,
    /// Gauss order for radial/1-D panels.
    order: usize,
    /// Extra uniform refinement of outer panels.
    refine: usize,
    /// Panels per half-angle sweep of the inner disc.
    inner_theta_panels: usize,
}

const COARSE: Resolution = Resolution {
    theta_panels: 32,
    order: 8,
    refine: 0,
    inner_theta_panels: 16,
};
const FINE: Resolution = Resolution {
    theta_panels: 64,
    order: 10,
    refine: 1,
    inner_theta_panels: 32,
};

struct Evaluation {
    value: f64,
    extrapolation_err: f64,
    trace: Vec<(f64, f64)>,
}

/// Applies the operator to `u` at an interior point `x`.
pub fn apply_operator(
    domain: &DomainSpec,
    params: &KernelParams,
    u: &ScalarField,
    x: &Point,
) -> Result<PVResult> {
    domain.check_dim(x.coords())?;
    let coarse = evaluate(domain, params, u, x.coords(), COARSE)?;
    let fine = evaluate(domain, params, u, x.coords(), FINE)?;
    Ok(PVResult {
        value: fine.value,
        abs_error_estimate: (fine.value - coarse.value).abs() + fine.extrapolation_err,
        epsilon_trace: fine.trace,
    })
}

fn evaluate(
    domain: &DomainSpec,
    params: &KernelParams,
    u: &ScalarField,
    x: &[f64],
    res: Resolution,
) -> Result<Evaluation> {
    let dist = domain.distance_raw(x);
    if !(dist > 0.0) {
        return Err(Error::OutsideDomain);
    }
    match domain.dim() {
        1 => evaluate_1d(domain, params, u, x[0], dist, res),
        2 => evaluate_2d(domain, params, u, x, dist, res),
        d => Err(Error::InvalidParams(format!(
            "pointwise evaluation supports dimensions 1 and 2, got {d}"
        ))),
    }
}

/// Richardson extrapolation of the inner-window ladder with assumed leading
/// error `O(eps^{2-2s})`; returns (limit, last increment).
fn richardson(partials: &[f64], two_s: f64) -> Result<(f64, f64)> {
    let factor = 2f64.powf(2.0 - two_s) - 1.0;
    let mut extr = Vec::with_capacity(partials.len() - 1);
    for k in 1..partials.len() {
        extr.push(partials[k] + (partials[k] - partials[k - 1]) / factor);
    }
    let n = extr.len();
    let err = (extr[n - 1] - extr[n - 2]).abs();
    let scale = extr[n - 1].abs().max(1e-12);
    if n >= 4 {
        let d2 = (extr[n - 2] - extr[n - 3]).abs();
        let d3 = (extr[n - 3] - extr[n - 4]).abs();
        if err > d2 && d2 > d3 && err > 1e-5 * scale {
            return Err(Error::QuadratureFailure(
                "epsilon-extrapolation is diverging".into(),
            ));
        }
    }
    Ok((extr[n - 1], err))
}

fn evaluate_1d(
    domain: &DomainSpec,
    params: &KernelParams,
    u: &ScalarField,
    x: f64,
    dist: f64,
    res: Resolution,
) -> Result<Evaluation> {
    let sigma = params.sigma();
    let two_s = 2.0 * params.s();
    let r_in = 0.5 * sigma / (1.0 + sigma) * dist;
    let ux = u.evaluate(&[x]);

    // Outer integral over the domain minus the inner ball, panels split at
    // every weight-crossing point.
    let mut integrand = |y: f64| -> f64 {
        let w = crate::geometry::indicator_raw(domain, sigma, &[x], &[y]);
        if w == 0.0 {
            return 0.0;
        }
        (ux - u.evaluate(&[y])) * w * (x - y).abs().powf(-1.0 - two_s)
    };

    let crossings = weight_crossings_1d(domain, sigma, x);
    let mut outer = 0.0;
    let order = res.order + 4;
    match domain {
        DomainSpec::Interval { .. } | DomainSpec::Ball { .. } => {
            let (a, b) = interval_bounds(domain);
            let left = quad::merge_breaks(a, x - r_in, &crossings);
            let right = quad::merge_breaks(x + r_in, b, &crossings);
            outer += quad::integrate_panels(
                &mut integrand,
                &quad::refine_breaks(&graded_both(&left), res.refine),
                order,
            );
            outer += quad::integrate_panels(
                &mut integrand,
                &quad::refine_breaks(&graded_both(&right), res.refine),
                order,
            );
        }
        DomainSpec::HalfSpace { .. } => {
            let left = {
                let mut lo = quad::merge_breaks(0.0, x - r_in, &crossings);
                // Possible integrable growth of u toward the boundary.
                let first = lo[1];
                let graded = quad::graded_breaks_left(0.0, first, 40);
                lo.splice(0..2, graded);
                lo
            };
            outer += quad::integrate_panels(
                &mut integrand,
                &quad::refine_breaks(&left, res.refine),
                order,
            );
            if sigma < 1.0 {
                let hi_end = x / (1.0 - sigma);
                let right = quad::merge_breaks(x + r_in, hi_end, &crossings);
                outer += quad::integrate_panels(
                    &mut integrand,
                    &quad::refine_breaks(&graded_both(&right), res.refine),
                    order,
                );
            } else {
                let far = 4.0 * x;
                let right = quad::merge_breaks(x + r_in, far, &crossings);
                outer += quad::integrate_panels(
                    &mut integrand,
                    &quad::refine_breaks(&right, res.refine),
                    order,
                );
                // Tail via y = far / t; integrable at t = 0 for profiles
                // growing slower than y^{2s}.
                let tail_breaks = quad::graded_breaks_left(0.0, 1.0, 50);
                outer += quad::integrate_panels(
                    &mut |t: f64| {
                        if t <= 0.0 {
                            return 0.0;
                        }
                        integrand(far / t) * far / (t * t)
                    },
                    &quad::refine_breaks(&tail_breaks, res.refine),
                    order,
                );
            }
        }
    }

    // Inner window, paired across x +- h; the weight is exactly 1 there.
    let paired = |h: f64| -> f64 {
        (2.0 * ux - u.evaluate(&[x + h]) - u.evaluate(&[x - h])) * h.powf(-1.0 - two_s)
    };
    let mut partials = Vec::with_capacity(LADDER + 1);
    let mut trace = Vec::with_capacity(LADDER + 1);
    let mut acc = 0.0;
    let mut eps = r_in;
    partials.push(acc);
    trace.push((eps, outer));
    for _ in 0..LADDER {
        let next = 0.5 * eps;
        let breaks = quad::refine_breaks(&[next, 0.75 * eps, eps], res.refine);
        acc += quad::integrate_panels(&mut |h| paired(h), &breaks, order);
        partials.push(acc);
        eps = next;
        trace.push((eps, outer + acc));
    }
    let (inner, extrap_err) = richardson(&partials, two_s)?;
    Ok(Evaluation {
        value: outer + inner,
        extrapolation_err: extrap_err,
        trace,
    })
}

fn interval_bounds(domain: &DomainSpec) -> (f64, f64) {
    match domain {
        DomainSpec::Interval { a, b } => (*a, *b),
        DomainSpec::Ball { center, radius } => (center[0] - radius, center[0] + radius),
        DomainSpec::HalfSpace { .. } => unreachable!(),
    }
}

/// Points where `|x-y| = sigma d(x)` or `|x-y| = sigma d(y)` in 1-D; the
/// distance function is piecewise linear, so all crossings are closed-form.
fn weight_crossings_1d(domain: &DomainSpec, sigma: f64, x: f64) -> Vec<f64> {
    let dist = domain.distance_raw(&[x]);
    let mut pts = vec![x - sigma * dist, x + sigma * dist];
    match domain {
        DomainSpec::HalfSpace { .. } => {
            pts.push(x / (1.0 + sigma));
            if sigma < 1.0 {
                pts.push(x / (1.0 - sigma));
            }
        }
        DomainSpec::Interval { .. } | DomainSpec::Ball { .. } => {
            let (a, b) = interval_bounds(domain);
            let m = 0.5 * (a + b);
            pts.push(m);
            pts.push((x + sigma * a) / (1.0 + sigma));
            pts.push((x + sigma * b) / (1.0 + sigma));
            if sigma < 1.0 {
                pts.push((x - sigma * b) / (1.0 - sigma));
                pts.push((x - sigma * a) / (1.0 - sigma));
            }
        }
    }
    pts
}

/// Grades the first and last panel of a breakpoint list toward the outer
/// ends, resolving the steep kernel next to the inner ball.
fn graded_both(breaks: &[f64]) -> Vec<f64> {
    if breaks.len() < 2 {
        return breaks.to_vec();
    }
    let mut out = quad::graded_breaks_left(breaks[0], breaks[1], 12);
    for &b in &breaks[2..breaks.len() - 1] {
        out.push(b);
    }
    if breaks.len() >= 3 {
        let n = breaks.len();
        let tail = quad::graded_breaks_right(breaks[n - 2], breaks[n - 1], 12);
        out.extend_from_slice(&tail[1..]);
    }
    out
}

fn evaluate_2d(
    domain: &DomainSpec,
    params: &KernelParams,
    u: &ScalarField,
    x: &[f64],
    dist: f64,
    res: Resolution,
) -> Result<Evaluation> {
    let sigma = params.sigma();
    let two_s = 2.0 * params.s();
    let r_in = 0.5 * sigma / (1.0 + sigma) * dist;
    let ux = u.evaluate(x);
    let pi = std::f64::consts::PI;

    // Outer sweep: theta panels over [0, 2pi), radial panels between the two
    // indicator thresholds; the weight is constant on every radial segment.
    // Panel edges land on the axis directions, so no node sits exactly on
    // the vertical ray where the sigma = 1 threshold diverges.
    let (gl_nodes, gl_weights) = quad::gauss_legendre(res.order);
    let mut outer = 0.0;
    for panel in 0..res.theta_panels {
        let t0 = 2.0 * pi * panel as f64 / res.theta_panels as f64;
        let t1 = 2.0 * pi * (panel + 1) as f64 / res.theta_panels as f64;
        let mid = 0.5 * (t0 + t1);
        let half = 0.5 * (t1 - t0);
        for (gn, gw) in gl_nodes.iter().zip(gl_weights) {
            let theta = mid + half * gn;
            let dir = [theta.cos(), theta.sin()];
            let ray = ray_profile(domain, sigma, x, dist, &dir)?;
            let lo_t = ray.t_near.min(ray.t_far);
            let hi_t = ray.t_near.max(ray.t_far);
            let mut radial = 0.0;
            for (seg_lo, seg_hi, w) in [
                (r_in, lo_t.min(ray.exit), 1.0),
                (lo_t.min(ray.exit), hi_t.min(ray.exit), 0.5),
            ] {
                if !(seg_hi > seg_lo) {
                    continue;
                }
                let breaks = quad::refine_breaks(
                    &quad::geometric_breaks(seg_lo, seg_hi, seg_lo),
                    res.refine,
                );
                radial += quad::integrate_panels(
                    &mut |r: f64| {
                        let y = [x[0] + r * dir[0], x[1] + r * dir[1]];
                        (ux - u.evaluate(&y)) * w * r.powf(-1.0 - two_s)
                    },
                    &breaks,
                    res.order,
                );
            }
            outer += gw * half * radial;
        }
    }

    // Inner disc, paired across antipodal directions: theta in [0, pi).
    let inner_annulus = |eps_lo: f64, eps_hi: f64| -> f64 {
        let mut acc = 0.0;
        for panel in 0..res.inner_theta_panels {
            let t0 = pi * panel as f64 / res.inner_theta_panels as f64;
            let t1 = pi * (panel + 1) as f64 / res.inner_theta_panels as f64;
            let mid = 0.5 * (t0 + t1);
            let half = 0.5 * (t1 - t0);
            for (gn, gw) in gl_nodes.iter().zip(gl_weights) {
                let theta = mid + half * gn;
                let dir = [theta.cos(), theta.sin()];
                let breaks = quad::refine_breaks(
                    &[eps_lo, 0.5 * (eps_lo + eps_hi), eps_hi],
                    res.refine,
                );
                acc += gw
                    * half
                    * quad::integrate_panels(
                        &mut |r: f64| {
                            let yp = [x[0] + r * dir[0], x[1] + r * dir[1]];
                            let ym = [x[0] - r * dir[0], x[1] - r * dir[1]];
                            (2.0 * ux - u.evaluate(&yp) - u.evaluate(&ym))
                                * r.powf(-1.0 - two_s)
                        },
                        &breaks,
                        res.order,
                    );
            }
        }
        acc
    };

    let mut partials = Vec::with_capacity(LADDER + 1);
    let mut trace = Vec::with_capacity(LADDER + 1);
    let mut acc = 0.0;
    let mut eps = r_in;
    partials.push(acc);
    trace.push((eps, outer));
    for _ in 0..LADDER {
        let next = 0.5 * eps;
        acc += inner_annulus(next, eps);
        partials.push(acc);
        eps = next;
        trace.push((eps, outer + acc));
    }
    let (inner, extrap_err) = richardson(&partials, two_s)?;
    Ok(Evaluation {
        value: outer + inner,
        extrapolation_err: extrap_err,
        trace,
    })
}

struct RayProfile {
    /// Threshold of `|x-y| < sigma d(x)` along the ray.
    t_near: f64,
    /// Threshold of `|x-y| < sigma d(y)` along the ray.
    t_far: f64,
    /// Distance to the domain boundary along the ray.
    exit: f64,
}

fn ray_profile(
    domain: &DomainSpec,
    sigma: f64,
    x: &[f64],
    dist: f64,
    dir: &[f64; 2],
) -> Result<RayProfile> {
    let t_near = sigma * dist;
    match domain {
        DomainSpec::HalfSpace { .. } => {
            let ud = dir[1];
            let denom = 1.0 - sigma * ud;
            let t_far = if denom > 0.0 {
                sigma * x[1] / denom
            } else {
                f64::INFINITY
            };
            let exit = if ud < 0.0 { x[1] / (-ud) } else { f64::INFINITY };
            Ok(RayProfile { t_near, t_far, exit })
        }
        DomainSpec::Ball { center, radius } => {
            // Chord length to the sphere.
            let cx = [x[0] - center[0], x[1] - center[1]];
            let b = cx[0] * dir[0] + cx[1] * dir[1];
            let c = cx[0] * cx[0] + cx[1] * cx[1] - radius * radius;
            let disc = (b * b - c).max(0.0);
            let exit = -b + disc.sqrt();
            // g(r) = r - sigma d(x + r dir) is nondecreasing with g(0) < 0
            // and g(exit) > 0: a single crossing, found by bisection.
            let g = |r: f64| {
                let y = [x[0] + r * dir[0], x[1] + r * dir[1]];
                r - sigma * domain.distance_raw(&y)
            };
            let mut lo = 0.0;
            let mut hi = exit;
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if g(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok(RayProfile {
                t_near,
                t_far: 0.5 * (lo + hi),
                exit,
            })
        }
        DomainSpec::Interval { .. } => Err(Error::InvalidParams(
            "interval domains are one-dimensional".into(),
        )),
    }
}

/// Difference between the operator applied in rescaled coordinates and the
/// rescaled operator value: `|L_{r^-1(D - x0)} u~ (x) - r^{2s} L_D u(x0 + rx)|`
/// with `u~(y) = u(x0 + r y)`.
pub fn scaling_residual(
    domain: &DomainSpec,
    params: &KernelParams,
    u: &ScalarField,
    x0: &Point,
    r: f64,
    x: &Point,
) -> Result<f64> {
    domain.check_dim(x0.coords())?;
    domain.check_dim(x.coords())?;
    if !(r > 0.0) {
        return Err(Error::InvalidParams(format!(
            "scaling factor must be positive, got {r}"
        )));
    }
    let transformed = transform_domain(domain, x0.coords(), r)?;
    let x0v = x0.coords().to_vec();
    let eval = u.clone();
    let tilde = ScalarField::new(u.smoothness_note(), move |y: &[f64]| {
        let mapped: Vec<f64> = y.iter().zip(&x0v).map(|(yi, x0i)| x0i + r * yi).collect();
        eval.evaluate(&mapped)
    });
    let lhs = apply_operator(&transformed, params, &tilde, x)?.value;
    let mapped: Vec<f64> = x
        .coords()
        .iter()
        .zip(x0.coords())
        .map(|(xi, x0i)| x0i + r * xi)
        .collect();
    let rhs = apply_operator(domain, params, u, &Point::new(mapped)?)?.value;
    Ok((lhs - r.powf(2.0 * params.s()) * rhs).abs())
}

fn transform_domain(domain: &DomainSpec, x0: &[f64], r: f64) -> Result<DomainSpec> {
    match domain {
        DomainSpec::Interval { a, b } => DomainSpec::interval((a - x0[0]) / r, (b - x0[0]) / r),
        DomainSpec::Ball { center, radius } => {
            let c = center
                .iter()
                .zip(x0)
                .map(|(ci, x0i)| (ci - x0i) / r)
                .collect();
            DomainSpec::ball(c, radius / r)
        }
        DomainSpec::HalfSpace { dim } => {
            if x0[dim - 1] != 0.0 {
                return Err(Error::InvalidParams(
                    "half-space shifts must be tangential (last coordinate zero)".into(),
                ));
            }
            Ok(domain.clone())
        }
    }
}

/// Evaluates `L d^p` on an inward ray at prescribed boundary distances.
/// Supported on balls (curved boundary) and half-spaces.
pub fn barrier_probe(
    domain: &DomainSpec,
    params: &KernelParams,
    p: f64,
    rho_values: &[f64],
) -> Result<Vec<(f64, f64)>> {
    Ok(barrier_probe_detailed(domain, params, p, rho_values)?
        .into_iter()
        .map(|(rho, r)| (rho, r.value))
        .collect())
}

/// [`barrier_probe`] keeping the full evaluation record per probe.
pub fn barrier_probe_detailed(
    domain: &DomainSpec,
    params: &KernelParams,
    p: f64,
    rho_values: &[f64],
) -> Result<Vec<(f64, PVResult)>> {
    let inradius = domain.inradius();
    let probe_point = |rho: f64| -> Result<Point> {
        match domain {
            DomainSpec::Ball { center, radius } => {
                let mut coords = center.clone();
                coords[0] += radius - rho;
                Point::new(coords)
            }
            DomainSpec::HalfSpace { dim } => {
                let mut coords = vec![0.0; *dim];
                coords[dim - 1] = rho;
                Point::new(coords)
            }
            DomainSpec::Interval { .. } => Err(Error::InvalidParams(
                "barrier probes need a ball or half-space domain".into(),
            )),
        }
    };
    let field = ScalarField::distance_power(domain.clone(), p);
    let mut out = Vec::with_capacity(rho_values.len());
    for &rho in rho_values {
        if !(rho > 0.0 && rho < inradius) {
            return Err(Error::InvalidParams(format!(
                "probe distance {rho} must lie in (0, inradius = {inradius})"
            )));
        }
        let x = probe_point(rho)?;
        let r = apply_operator(domain, params, &field, &x)?;
        out.push((rho, r));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::halfspace::{a_constant, MonomialExponent};

    fn params(s: f64, sigma: f64) -> KernelParams {
        KernelParams::new(s, sigma).unwrap()
    }

    #[test]
    fn constants_are_annihilated_exactly() {
        let u = ScalarField::new("constant", |_| 3.25);
        for dim in [1usize, 2] {
            let hs = DomainSpec::half_space(dim).unwrap();
            let x = if dim == 1 {
                Point::x1(0.7)
            } else {
                Point::x2(0.3, 0.7)
            };
            let r = apply_operator(&hs, &params(0.75, 1.0), &u, &x).unwrap();
            assert_eq!(r.value, 0.0);
            assert_eq!(r.abs_error_estimate, 0.0);
            // Exact zero before extrapolation as well.
            assert!(r.epsilon_trace.iter().all(|(_, v)| *v == 0.0));
        }
    }

    #[test]
    fn rejects_boundary_and_exterior_points() {
        let hs = DomainSpec::half_space(1).unwrap();
        let u = ScalarField::monomial_last(1.0);
        let pr = params(0.75, 1.0);
        assert!(matches!(
            apply_operator(&hs, &pr, &u, &Point::x1(0.0)),
            Err(Error::OutsideDomain)
        ));
        assert!(matches!(
            apply_operator(&hs, &pr, &u, &Point::x1(-1.0)),
            Err(Error::OutsideDomain)
        ));
    }

    #[test]
    fn epsilon_trace_is_strictly_decreasing() {
        let hs = DomainSpec::half_space(1).unwrap();
        let u = ScalarField::monomial_last(0.8);
        let r = apply_operator(&hs, &params(0.75, 0.5), &u, &Point::x1(1.0)).unwrap();
        assert!(r.epsilon_trace.windows(2).all(|w| w[1].0 < w[0].0));
        assert_eq!(r.epsilon_trace.len(), LADDER + 1);
    }

    #[test]
    fn monomials_match_the_halfspace_constant_1d() {
        for &(s, sigma, p, x) in &[
            (0.75, 1.0, 0.8, 1.0),
            (0.75, 0.5, 0.3, 1.0),
            (0.6, 1.0, 0.9, 2.0),
            (0.9, 0.5, 1.3, 0.5),
        ] {
            let pr = params(s, sigma);
            let hs = DomainSpec::half_space(1).unwrap();
            let u = ScalarField::monomial_last(p);
            let got = apply_operator(&hs, &pr, &u, &Point::x1(x)).unwrap();
            let a = a_constant(MonomialExponent::new(p, &pr).unwrap(), &pr, 1)
                .unwrap()
                .value;
            let expected = a * x.powf(p - 2.0 * s);
            assert!(
                (got.value - expected).abs() < 2e-4 * expected.abs().max(1.0),
                "s={s} sigma={sigma} p={p} x={x}: {} vs {expected}",
                got.value
            );
        }
    }

    #[test]
    fn harmonic_profile_is_annihilated() {
        // u = y_d^{2s-1} in the half-space, dimensions 1 and 2.
        for &dim in &[1usize, 2] {
            for &sigma in &[0.5, 1.0] {
                let s = 0.75;
                let pr = params(s, sigma);
                let hs = DomainSpec::half_space(dim).unwrap();
                let u = ScalarField::monomial_last(2.0 * s - 1.0);
                let x = if dim == 1 {
                    Point::x1(1.0)
                } else {
                    Point::x2(0.4, 1.0)
                };
                let r = apply_operator(&hs, &pr, &u, &x).unwrap();
                assert!(r.value.abs() < 1e-3, "d={dim} sigma={sigma}: {}", r.value);
            }
        }
    }

    #[test]
    fn operator_is_linear_within_error() {
        let hs = DomainSpec::half_space(1).unwrap();
        let pr = params(0.8, 1.0);
        let x = Point::x1(1.5);
        let u = ScalarField::monomial_last(0.7);
        let v = ScalarField::monomial_last(1.2);
        let combo = ScalarField::new("0.7-monomial plus 1.2-monomial combo", |y| {
            2.0 * y[0].max(0.0).powf(0.7) - 0.5 * y[0].max(0.0).powf(1.2)
        });
        let ru = apply_operator(&hs, &pr, &u, &x).unwrap();
        let rv = apply_operator(&hs, &pr, &v, &x).unwrap();
        let rc = apply_operator(&hs, &pr, &combo, &x).unwrap();
        let lhs = rc.value;
        let rhs = 2.0 * ru.value - 0.5 * rv.value;
        let tol =
            rc.abs_error_estimate + 2.0 * ru.abs_error_estimate + 0.5 * rv.abs_error_estimate;
        assert!((lhs - rhs).abs() <= tol.max(1e-10), "{lhs} vs {rhs} tol {tol}");
    }

    #[test]
    fn scaling_identity_is_exact_for_identity_transform() {
        let hs = DomainSpec::half_space(1).unwrap();
        let pr = params(0.75, 1.0);
        let u = ScalarField::monomial_last(0.9);
        let res = scaling_residual(&hs, &pr, &u, &Point::x1(0.0), 1.0, &Point::x1(1.3)).unwrap();
        assert!(res < 1e-12, "{res}");
    }

    #[test]
    fn scaling_identity_on_interval_with_bump() {
        // Interval (0,1) mapped to (-x0/r, (1-x0)/r); smooth bump profile.
        let dom = DomainSpec::interval(0.0, 1.0).unwrap();
        let pr = params(0.75, 0.5);
        let bump = ScalarField::new("smooth bump at 0.55, width 0.3", |y| {
            let z: f64 = (y[0] - 0.55) / 0.3;
            if z.abs() < 1.0 {
                (-1.0 / (1.0 - z * z)).exp()
            } else {
                0.0
            }
        });
        let x0 = Point::x1(0.4);
        let r = 0.5;
        let x = Point::x1(0.3); // x0 + r*x = 0.55, interior
        let probe = apply_operator(&dom, &pr, &bump, &Point::x1(0.55)).unwrap();
        let residual = scaling_residual(&dom, &pr, &bump, &x0, r, &x).unwrap();
        assert!(
            residual <= 1e-6 * probe.value.abs().max(1.0),
            "residual {residual} vs scale {}",
            probe.value
        );
    }

    #[test]
    fn halfspace_shift_must_be_tangential() {
        let hs = DomainSpec::half_space(2).unwrap();
        let pr = params(0.75, 1.0);
        let u = ScalarField::monomial_last(0.9);
        let bad = scaling_residual(&hs, &pr, &u, &Point::x2(0.0, 0.5), 2.0, &Point::x2(0.0, 1.0));
        assert!(bad.is_err());
    }

    #[test]
    fn barrier_probe_rejects_deep_points() {
        let ball = DomainSpec::ball(vec![0.0, 0.0], 1.0).unwrap();
        let pr = params(0.75, 0.5);
        assert!(barrier_probe(&ball, &pr, 0.5, &[1.5]).is_err());
        assert!(barrier_probe(&ball, &pr, 0.5, &[1.0]).is_err());
    }

    #[test]
    fn barrier_probe_on_halfspace_tracks_the_constant() {
        // L d^p at distance rho is a(p,sigma) * rho^{p-2s} on the half-space.
        let s = 0.75;
        let pr = params(s, 0.5);
        let hs = DomainSpec::half_space(1).unwrap();
        let p = 2.0 * s - 1.0 + 0.1;
        let rhos = [0.25, 0.125];
        let probes = barrier_probe(&hs, &pr, p, &rhos).unwrap();
        let a = a_constant(MonomialExponent::new(p, &pr).unwrap(), &pr, 1)
            .unwrap()
            .value;
        for (rho, value) in probes {
            let expected = a * rho.powf(p - 2.0 * s);
            assert!(
                (value - expected).abs() < 2e-3 * expected.abs(),
                "rho={rho}: {value} vs {expected}"
            );
            assert!(value < 0.0);
        }
    }
}
