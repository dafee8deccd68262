//! Kernel geometry: distances, the indicator weight, half-space support shapes.
//!
//! The weight is the average of two strict ball indicators,
//! `B(x,y) = (1[y in B_{sigma d(x)}(x)] + 1[x in B_{sigma d(y)}(y)]) / 2`,
//! so it takes the values 0, 1/2, 1. All membership predicates compare
//! squared distances, never square roots, so a tie is decided the same way on
//! every code path; ties (boundary of a support ball) count as outside.
//! Points outside the closure of the domain get distance 0 and weight 0.

use crate::error::Error;
use crate::Result;

/// A point in `R^d`, `d >= 1` fixed per computation.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidParams(
                "a point needs at least one coordinate".into(),
            ));
        }
        Ok(Self { coords })
    }

    /// One-dimensional point.
    pub fn x1(x: f64) -> Self {
        Self { coords: vec![x] }
    }

    /// Two-dimensional point.
    pub fn x2(x: f64, y: f64) -> Self {
        Self { coords: vec![x, y] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

/// Kernel parameters `(s, sigma)` with `1/2 < s < 1` and `0 < sigma <= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    s: f64,
    sigma: f64,
}

impl KernelParams {
    pub fn new(s: f64, sigma: f64) -> Result<Self> {
        if !(s > 0.5 && s < 1.0) {
            return Err(Error::InvalidParams(format!(
                "s must lie in (1/2,1), got {s}"
            )));
        }
        if !(sigma > 0.0 && sigma <= 1.0) {
            return Err(Error::InvalidParams(format!(
                "sigma must lie in (0,1], got {sigma}"
            )));
        }
        Ok(Self { s, sigma })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// Supported domains with exact distance-to-boundary evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainSpec {
    /// Open interval `(a, b)` in dimension 1.
    Interval { a: f64, b: f64 },
    /// Open ball around `center` with positive radius.
    Ball { center: Vec<f64>, radius: f64 },
    /// Open half-space `{ x : x_d > 0 }` in dimension `dim`.
    HalfSpace { dim: usize },
}

impl DomainSpec {
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        if !(a < b) {
            return Err(Error::InvalidParams(format!(
                "interval needs a < b, got a={a}, b={b}"
            )));
        }
        Ok(Self::Interval { a, b })
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::InvalidParams("ball center needs a dimension".into()));
        }
        if !(radius > 0.0) {
            return Err(Error::InvalidParams(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        Ok(Self::Ball { center, radius })
    }

    pub fn half_space(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParams("dimension must be at least 1".into()));
        }
        Ok(Self::HalfSpace { dim })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Interval { .. } => 1,
            Self::Ball { center, .. } => center.len(),
            Self::HalfSpace { dim } => *dim,
        }
    }

    /// Radius of the largest ball inside the domain (infinite for half-space).
    pub fn inradius(&self) -> f64 {
        match self {
            Self::Interval { a, b } => 0.5 * (b - a),
            Self::Ball { radius, .. } => *radius,
            Self::HalfSpace { .. } => f64::INFINITY,
        }
    }

    pub(crate) fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Distance without dimension check; 0 outside the closure.
    pub(crate) fn distance_raw(&self, x: &[f64]) -> f64 {
        match self {
            Self::Interval { a, b } => (x[0] - a).min(b - x[0]).max(0.0),
            Self::Ball { center, radius } => {
                let r = norm_diff(x, center).sqrt();
                (radius - r).max(0.0)
            }
            Self::HalfSpace { dim } => x[dim - 1].max(0.0),
        }
    }
}

fn norm_diff(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
}

/// Distance from `x` to the complement of the domain (0 outside the closure).
pub fn distance(domain: &DomainSpec, x: &Point) -> Result<f64> {
    domain.check_dim(x.coords())?;
    Ok(domain.distance_raw(x.coords()))
}

/// Weight without dimension checks; used from quadrature hot loops.
pub(crate) fn indicator_raw(domain: &DomainSpec, sigma: f64, x: &[f64], y: &[f64]) -> f64 {
    let dist_sq = norm_diff(x, y);
    let rx = sigma * domain.distance_raw(x);
    let ry = sigma * domain.distance_raw(y);
    let mut value = 0.0;
    if dist_sq < rx * rx {
        value += 0.5;
    }
    if dist_sq < ry * ry {
        value += 0.5;
    }
    value
}

/// The symmetric indicator weight `B(x,y)` in `{0, 1/2, 1}`.
pub fn indicator_b(domain: &DomainSpec, sigma: f64, x: &Point, y: &Point) -> Result<f64> {
    if !(sigma > 0.0 && sigma <= 1.0) {
        return Err(Error::InvalidParams(format!(
            "sigma must lie in (0,1], got {sigma}"
        )));
    }
    domain.check_dim(x.coords())?;
    domain.check_dim(y.coords())?;
    Ok(indicator_raw(domain, sigma, x.coords(), y.coords()))
}

/// Kernel `K(x,y) = B(x,y) |x-y|^{-d-2s}`; `x = y` is a singular evaluation.
pub fn kernel(domain: &DomainSpec, params: &KernelParams, x: &Point, y: &Point) -> Result<f64> {
    domain.check_dim(x.coords())?;
    domain.check_dim(y.coords())?;
    let dist_sq = norm_diff(x.coords(), y.coords());
    if dist_sq == 0.0 {
        return Err(Error::SingularEvaluation);
    }
    let weight = indicator_raw(domain, params.sigma(), x.coords(), y.coords());
    if weight == 0.0 {
        return Ok(0.0);
    }
    let d = domain.dim() as f64;
    Ok(weight * dist_sq.powf(-0.5 * (d + 2.0 * params.s())))
}

/// Membership in the half-space ellipsoid `E(x)` (`sigma < 1`): the set of
/// `y` with `|x-y| < sigma * y_d`, i.e. whose horizon ball contains `x`.
pub fn ellipsoid_membership(x: &Point, sigma: f64, y: &Point) -> Result<bool> {
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::InvalidParams(format!(
            "ellipsoid requires sigma in (0,1), got {sigma} (use the paraboloid at sigma = 1)"
        )));
    }
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            got: y.dim(),
        });
    }
    let xd = *x.coords().last().unwrap();
    if !(xd > 0.0) {
        return Err(Error::OutsideDomain);
    }
    let yd = *y.coords().last().unwrap();
    Ok(yd > 0.0 && norm_diff(x.coords(), y.coords()) < sigma * sigma * yd * yd)
}

/// Membership in the half-space region `P(x)` above the paraboloid
/// (`sigma = 1`): the set of `y` with `|x-y| < y_d`, equivalently
/// `|y'-x'|^2 / (2 x_d) + x_d / 2 < y_d`.
pub fn paraboloid_membership(x: &Point, y: &Point) -> Result<bool> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            got: y.dim(),
        });
    }
    let xd = *x.coords().last().unwrap();
    if !(xd > 0.0) {
        return Err(Error::OutsideDomain);
    }
    let yd = *y.coords().last().unwrap();
    Ok(yd > 0.0 && norm_diff(x.coords(), y.coords()) < yd * yd)
}

/// Axis-aligned world-coordinate rectangle for SVG rendering.
#[derive(Debug, Clone, Copy)]
pub struct ViewBox {
    pub min_x: f64,
    pub min_y: f64,
    pub width: f64,
    pub height: f64,
}

const BALL_FILL: &str = "#4477aa";
const REGION_FILL: &str = "#cc3311";

fn fmt_svg(v: f64) -> String {
    // Fixed short formatting keeps documents byte-identical across runs.
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

/// Renders the support of `B(x, .)` in the half-plane (`d = 2`): the horizon
/// ball around `x` and the ellipsoid (`sigma < 1`) or paraboloid region
/// (`sigma = 1`). World coordinates, y axis flipped for screen convention.
pub fn support_svg(x: &Point, params: &KernelParams, viewbox: &ViewBox) -> Result<String> {
    if x.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: x.dim(),
        });
    }
    let (xp, xd) = (x.coords()[0], x.coords()[1]);
    if !(xd > 0.0) {
        return Err(Error::OutsideDomain);
    }
    if !(viewbox.width > 0.0 && viewbox.height > 0.0) {
        return Err(Error::InvalidParams("viewbox must have positive size".into()));
    }
    let sigma = params.sigma();

    // Screen coordinates: (wx, wy) -> (wx, -wy).
    let vb = format!(
        "{} {} {} {}",
        fmt_svg(viewbox.min_x),
        fmt_svg(-(viewbox.min_y + viewbox.height)),
        fmt_svg(viewbox.width),
        fmt_svg(viewbox.height)
    );

    let mut body = String::new();

    if sigma < 1.0 {
        // Ellipsoid E(x): center (x', x_d/(1-sigma^2)), semiaxes
        // x_d sigma / sqrt(1-sigma^2) (horizontal), x_d sigma / (1-sigma^2).
        let om = 1.0 - sigma * sigma;
        let cy = xd / om;
        let rx = xd * sigma / om.sqrt();
        let ry = xd * sigma / om;
        body.push_str(&format!(
            "  <ellipse cx=\"{}\" cy=\"{}\" rx=\"{}\" ry=\"{}\" fill=\"{REGION_FILL}\"/>\n",
            fmt_svg(xp),
            fmt_svg(-cy),
            fmt_svg(rx),
            fmt_svg(ry)
        ));
    } else {
        // Region above y_d = x_d/2 + (t - x')^2 / (2 x_d), clipped to the
        // viewbox. A parabola arc is exactly one quadratic Bezier segment:
        // control point at the intersection of the endpoint tangents.
        let t0 = viewbox.min_x;
        let t1 = viewbox.min_x + viewbox.width;
        let top = viewbox.min_y + viewbox.height;
        let para = |t: f64| 0.5 * xd + (t - xp) * (t - xp) / (2.0 * xd);
        let slope = |t: f64| (t - xp) / xd;
        let tm = 0.5 * (t0 + t1);
        let ym = para(t0) + slope(t0) * (tm - t0);
        body.push_str(&format!(
            "  <path d=\"M {} {} Q {} {} {} {} L {} {} L {} {} Z\" fill=\"{REGION_FILL}\"/>\n",
            fmt_svg(t0),
            fmt_svg(-para(t0)),
            fmt_svg(tm),
            fmt_svg(-ym),
            fmt_svg(t1),
            fmt_svg(-para(t1)),
            fmt_svg(t1),
            fmt_svg(-top),
            fmt_svg(t0),
            fmt_svg(-top)
        ));
    }

    body.push_str(&format!(
        "  <circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{BALL_FILL}\"/>\n",
        fmt_svg(xp),
        fmt_svg(-xd),
        fmt_svg(sigma * xd)
    ));

    Ok(format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"{vb}\">\n{body}</svg>\n"
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit_interval() -> DomainSpec {
        DomainSpec::interval(0.0, 1.0).unwrap()
    }

    #[test]
    fn distance_interval_nearer_endpoint() {
        let d = distance(&unit_interval(), &Point::x1(0.3)).unwrap();
        assert_eq!(d, 0.3);
        let d = distance(&unit_interval(), &Point::x1(0.8)).unwrap();
        assert!((d - 0.2).abs() < 1e-15);
    }

    #[test]
    fn distance_half_space_is_last_coordinate() {
        let hs = DomainSpec::half_space(3).unwrap();
        let x = Point::new(vec![4.0, -2.0, 0.7]).unwrap();
        assert_eq!(distance(&hs, &x).unwrap(), 0.7);
    }

    #[test]
    fn distance_ball_center_is_radius() {
        let ball = DomainSpec::ball(vec![0.0, 0.0], 1.0).unwrap();
        assert_eq!(distance(&ball, &Point::x2(0.0, 0.0)).unwrap(), 1.0);
    }

    #[test]
    fn distance_outside_closure_is_zero() {
        assert_eq!(distance(&unit_interval(), &Point::x1(1.5)).unwrap(), 0.0);
        assert_eq!(distance(&unit_interval(), &Point::x1(-0.1)).unwrap(), 0.0);
        let ball = DomainSpec::ball(vec![0.0, 0.0], 1.0).unwrap();
        assert_eq!(distance(&ball, &Point::x2(2.0, 0.0)).unwrap(), 0.0);
    }

    #[test]
    fn distance_dimension_mismatch() {
        let hs = DomainSpec::half_space(2).unwrap();
        assert!(matches!(
            distance(&hs, &Point::x1(1.0)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn params_reject_invalid_ranges() {
        assert!(KernelParams::new(0.4, 1.0).is_err());
        assert!(KernelParams::new(0.5, 1.0).is_err());
        assert!(KernelParams::new(1.0, 1.0).is_err());
        assert!(KernelParams::new(0.75, 0.0).is_err());
        assert!(KernelParams::new(0.75, 1.2).is_err());
        assert!(KernelParams::new(0.75, 1.0).is_ok());
    }

    #[test]
    fn indicator_at_coincident_interior_points_is_one() {
        let x = Point::x1(0.5);
        assert_eq!(
            indicator_b(&unit_interval(), 0.7, &x, &x).unwrap(),
            1.0
        );
    }

    #[test]
    fn indicator_half_weight_example() {
        // |x-y| = 1 < sigma*y_d = 2 but not < sigma*x_d = 1.
        let hs = DomainSpec::half_space(2).unwrap();
        let x = Point::x2(0.0, 1.0);
        let y = Point::x2(0.0, 2.0);
        assert_eq!(indicator_b(&hs, 1.0, &x, &y).unwrap(), 0.5);
    }

    #[test]
    fn indicator_zero_outside_both_balls() {
        let x = Point::x1(0.4);
        let y = Point::x1(0.9);
        // |x-y| = 0.5 >= sigma * max(0.4, 0.1)
        assert_eq!(indicator_b(&unit_interval(), 0.5, &x, &y).unwrap(), 0.0);
    }

    #[test]
    fn indicator_boundary_tie_counts_as_outside() {
        let hs = DomainSpec::half_space(1).unwrap();
        // |x-y| = 0.5 = sigma*d(x) exactly; second ball: 0.5 < 0.25? no.
        let x = Point::x1(1.0);
        let y = Point::x1(0.5);
        assert_eq!(indicator_b(&hs, 0.5, &x, &y).unwrap(), 0.0);
    }

    #[test]
    fn kernel_rejects_coincident_points() {
        let params = KernelParams::new(0.75, 1.0).unwrap();
        let x = Point::x1(0.5);
        assert!(matches!(
            kernel(&unit_interval(), &params, &x, &x),
            Err(Error::SingularEvaluation)
        ));
    }

    #[test]
    fn kernel_vanishes_with_weight() {
        let params = KernelParams::new(0.75, 0.5).unwrap();
        let x = Point::x1(0.4);
        let y = Point::x1(0.9);
        assert_eq!(kernel(&unit_interval(), &params, &x, &y).unwrap(), 0.0);
    }

    #[test]
    fn kernel_power_law_ratio() {
        // With weight 1 the kernel scales like h^{-1-2s}.
        let params = KernelParams::new(0.75, 1.0).unwrap();
        let x = Point::x1(0.5);
        let k1 = kernel(&unit_interval(), &params, &x, &Point::x1(0.5 + 1e-3)).unwrap();
        let k2 = kernel(&unit_interval(), &params, &x, &Point::x1(0.5 + 2e-3)).unwrap();
        let ratio = k1 / k2;
        assert!((ratio - 2f64.powf(2.5)).abs() < 1e-9, "ratio {ratio}");
    }

    #[test]
    fn kernel_is_symmetric_in_arguments() {
        let params = KernelParams::new(0.8, 0.6).unwrap();
        let x = Point::x1(0.2);
        let y = Point::x1(0.35);
        let kxy = kernel(&unit_interval(), &params, &x, &y).unwrap();
        let kyx = kernel(&unit_interval(), &params, &y, &x).unwrap();
        assert_eq!(kxy, kyx);
    }

    #[test]
    fn ellipsoid_figure_geometry() {
        // sigma = 2/3, x = e_2: center (0, 9/5), semiaxes sqrt(4/5) and 6/5.
        let sigma = 2.0 / 3.0;
        let x = Point::x2(0.0, 1.0);
        assert!(ellipsoid_membership(&x, sigma, &Point::x2(0.0, 9.0 / 5.0)).unwrap());
        // Top vertex lies on the boundary, which is excluded.
        assert!(!ellipsoid_membership(&x, sigma, &Point::x2(0.0, 9.0 / 5.0 + 6.0 / 5.0)).unwrap());
        assert!(ellipsoid_membership(&x, sigma, &x).unwrap());
    }

    #[test]
    fn ellipsoid_rejects_sigma_one() {
        let x = Point::x2(0.0, 1.0);
        assert!(ellipsoid_membership(&x, 1.0, &x).is_err());
    }

    #[test]
    fn ellipsoid_excludes_low_points() {
        // y_d <= x_d/(1+sigma) is never a member.
        let sigma = 0.6;
        let x = Point::x2(0.0, 1.0);
        for t in [0.0f64, 0.2, 0.5, 0.625] {
            assert!(!ellipsoid_membership(&x, sigma, &Point::x2(0.3, t)).unwrap());
        }
    }

    #[test]
    fn paraboloid_figure_points() {
        let x = Point::x2(0.0, 1.0);
        // On the parabola y_2 = 0.5 + 0.5 y_1^2: excluded.
        assert!(!paraboloid_membership(&x, &Point::x2(0.0, 0.5)).unwrap());
        assert!(!paraboloid_membership(&x, &Point::x2(1.0, 1.0)).unwrap());
        assert!(paraboloid_membership(&x, &Point::x2(0.0, 1.0)).unwrap());
        assert!(paraboloid_membership(&x, &Point::x2(1.0, 1.01)).unwrap());
    }

    #[test]
    fn svg_is_deterministic_and_carries_fixed_fills() {
        let params = KernelParams::new(0.75, 2.0 / 3.0).unwrap();
        let x = Point::x2(0.0, 1.0);
        let vb = ViewBox {
            min_x: -3.0,
            min_y: 0.0,
            width: 6.0,
            height: 5.5,
        };
        let a = support_svg(&x, &params, &vb).unwrap();
        let b = support_svg(&x, &params, &vb).unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with("<svg "));
        assert!(a.contains("#4477aa"));
        assert!(a.contains("#cc3311"));
        // Ball radius 2/3 at (0,1); ellipse center (0, 9/5), ry = 6/5.
        assert!(a.contains("r=\"0.666667\""));
        assert!(a.contains("cy=\"-1.000000\""));
        assert!(a.contains("cy=\"-1.800000\""));
        assert!(a.contains("ry=\"1.200000\""));
        assert!(a.contains("rx=\"0.894427\""));
    }

    #[test]
    fn svg_sigma_one_draws_parabola_region() {
        let params = KernelParams::new(0.75, 1.0).unwrap();
        let x = Point::x2(0.0, 1.0);
        let vb = ViewBox {
            min_x: -3.0,
            min_y: 0.0,
            width: 6.0,
            height: 5.5,
        };
        let svg = support_svg(&x, &params, &vb).unwrap();
        assert!(svg.contains("<path"));
        assert!(svg.contains("r=\"1.000000\""));
        // Endpoint on the parabola: y(-3) = 0.5 + 0.5*9 = 5, flipped to -5;
        // the Bezier control point sits at the tangent intersection (0, -4).
        assert!(svg.contains("M -3.000000 -5.000000"));
        assert!(svg.contains("Q 0.000000 4.000000"));
    }

    #[test]
    fn svg_rejects_wrong_dimension() {
        let params = KernelParams::new(0.75, 1.0).unwrap();
        let vb = ViewBox {
            min_x: 0.0,
            min_y: 0.0,
            width: 1.0,
            height: 1.0,
        };
        assert!(support_svg(&Point::x1(1.0), &params, &vb).is_err());
    }

    proptest! {
        #[test]
        fn weight_is_symmetric(
            x in 0.001f64..0.999,
            y in 0.001f64..0.999,
            sigma in 0.05f64..1.0,
        ) {
            let dom = unit_interval();
            let a = indicator_b(&dom, sigma, &Point::x1(x), &Point::x1(y)).unwrap();
            let b = indicator_b(&dom, sigma, &Point::x1(y), &Point::x1(x)).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn weight_invariant_under_tangential_shift(
            x in prop::array::uniform2(-5.0f64..5.0),
            y in prop::array::uniform2(-5.0f64..5.0),
            shift in -10.0f64..10.0,
            sigma in 0.05f64..=1.0,
        ) {
            let hs = DomainSpec::half_space(2).unwrap();
            let xp = Point::x2(x[0], x[1].abs() + 0.01);
            let yp = Point::x2(y[0], y[1].abs() + 0.01);
            let xs = Point::x2(x[0] + shift, x[1].abs() + 0.01);
            let ys = Point::x2(y[0] + shift, y[1].abs() + 0.01);
            let a = indicator_b(&hs, sigma, &xp, &yp).unwrap();
            let b = indicator_b(&hs, sigma, &xs, &ys).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn weight_invariant_under_dilation(
            x in prop::array::uniform2(-5.0f64..5.0),
            y in prop::array::uniform2(-5.0f64..5.0),
            scale_log2 in -3.0f64..3.0,
            sigma in 0.05f64..=1.0,
        ) {
            // Powers of two scale coordinates without rounding, so the
            // exact scaling identity can be asserted bitwise.
            let a = 2.0f64.powi(scale_log2.round() as i32);
            let hs = DomainSpec::half_space(2).unwrap();
            let xp = Point::x2(x[0], x[1].abs() + 0.01);
            let yp = Point::x2(y[0], y[1].abs() + 0.01);
            let xs = Point::x2(a * x[0], a * (x[1].abs() + 0.01));
            let ys = Point::x2(a * y[0], a * (y[1].abs() + 0.01));
            let w1 = indicator_b(&hs, sigma, &xp, &yp).unwrap();
            let w2 = indicator_b(&hs, sigma, &xs, &ys).unwrap();
            prop_assert_eq!(w1, w2);
        }

        #[test]
        fn weight_saturates_near_the_point(
            x in 0.01f64..0.99,
            sigma in 0.05f64..=1.0,
            offset in -0.999f64..0.999,
        ) {
            // B(x,y) = 1 whenever |x-y| < sigma/(1+sigma) * d(x).
            let dom = unit_interval();
            let d = dom.distance_raw(&[x]);
            let c = sigma / (1.0 + sigma);
            let y = x + offset * c * d * 0.999;
            if y > 0.0 && y < 1.0 {
                let w = indicator_b(&dom, sigma, &Point::x1(x), &Point::x1(y)).unwrap();
                prop_assert_eq!(w, 1.0);
            }
        }

        #[test]
        fn ellipsoid_matches_ball_condition(
            x in prop::array::uniform2(-2.0f64..2.0),
            y in prop::array::uniform2(-2.0f64..2.0),
            sigma in 0.05f64..0.95,
        ) {
            let xp = Point::x2(x[0], x[1].abs() + 0.05);
            let yp = Point::x2(y[0], y[1].abs() + 0.05);
            let xd = xp.coords()[1];
            let yd = yp.coords()[1];
            let dist = ((x[0] - y[0]).powi(2) + (xd - yd).powi(2)).sqrt();
            prop_assume!((dist - sigma * yd).abs() > 1e-9);
            let member = ellipsoid_membership(&xp, sigma, &yp).unwrap();
            prop_assert_eq!(member, dist < sigma * yd);
        }

        #[test]
        fn paraboloid_matches_ball_condition(
            x in prop::array::uniform2(-2.0f64..2.0),
            y in prop::array::uniform2(-2.0f64..2.0),
        ) {
            let xp = Point::x2(x[0], x[1].abs() + 0.05);
            let yp = Point::x2(y[0], y[1].abs() + 0.05);
            let yd = yp.coords()[1];
            let dist = ((x[0] - y[0]).powi(2) + (xp.coords()[1] - yd).powi(2)).sqrt();
            prop_assume!((dist - yd).abs() > 1e-9);
            let member = paraboloid_membership(&xp, &yp).unwrap();
            prop_assert_eq!(member, dist < yd);
        }
    }
}
