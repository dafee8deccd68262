//! Galerkin solver for the Dirichlet problem on the unit interval.
//!
//! Piecewise-linear elements on a boundary-graded mesh, dense symmetric
//! stiffness matrices for both kernel variants, and a Cholesky solve. The
//! solution of the model problem behaves like `d^{2s-1}` at the boundary, so
//! nodes follow the power map `x_i = (1/2) (2i/N)^beta` (mirrored on the
//! right half), which restores approximation power in the boundary layer.
//!
//! Assembly decomposes the double integral over unordered cell pairs:
//!
//! * identical pairs: the hat-difference product is exactly `const * (x-y)^2`,
//!   and for fixed offset `v = y - x` the weight-averaged strip length is
//!   piecewise linear in `v`, so the pair integral reduces to closed-form
//!   moments of `v^{1-2s}` — no quadrature at all;
//! * adjacent pairs: in the corner coordinates `a = z - x`, `b = y - z` the
//!   inner integral over `a` at fixed `t = a + b` is a weighted quadratic,
//!   computed exactly between indicator crossings; the outer `t` integral has
//!   the integrable singularity `t^{-1-2s} O(t^3)` and is quadratured on
//!   graded panels with a closed-form slice at the corner;
//! * distant pairs: tensor Gauss rules with panels split where the indicator
//!   jumps (straight lines, since the distance function is piecewise linear).
//!
//! The panel layout depends only on the mesh and `sigma`, never on the kernel
//! variant, so the regional and vanishing-horizon matrices are assembled on
//! identical nodes and their difference is positive semidefinite by
//! construction (the pointwise weight never exceeds 1). Pair tasks run in
//! parallel and are merged in a fixed order: results are bit-identical for
//! any worker count.

use crate::error::Error;
use crate::geometry::{indicator_raw, DomainSpec, KernelParams};
use crate::quad;
use crate::Result;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use std::time::Instant;

/// Kernel variant entering the energy form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelVariant {
    /// Weight from the shrinking-ball indicators.
    VanishingHorizon,
    /// Full kernel on the domain (weight identically 1); the classical
    /// censored baseline, also used for the `H^s` seminorm.
    Regional,
}

/// Symmetric boundary-graded mesh of `(0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedMesh {
    nodes: Vec<f64>,
    grading_beta: f64,
    n_cells: usize,
}

impl GradedMesh {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn grading_beta(&self) -> f64 {
        self.grading_beta
    }

    /// Number of interior degrees of freedom.
    pub fn n_dof(&self) -> usize {
        self.n_cells - 1
    }

    fn width(&self, cell: usize) -> f64 {
        self.nodes[cell + 1] - self.nodes[cell]
    }

    /// A cell lies entirely in one half of the interval (the node layout is
    /// symmetric with a node at 1/2).
    fn in_left_half(&self, cell: usize) -> bool {
        self.nodes[cell + 1] <= 0.5
    }
}

/// Grading exponent matched to the `d^{2s-1}` boundary layer, capped at 6 to
/// keep the first cell representable at double precision.
pub fn auto_beta(s: f64) -> f64 {
    (2.0 / (2.0 * s - 1.0)).min(6.0)
}

/// Builds the symmetric power-graded mesh with `n_cells` cells.
pub fn build_mesh(n_cells: usize, grading_beta: f64) -> Result<GradedMesh> {
    if n_cells < 8 {
        return Err(Error::Mesh(format!(
            "need at least 8 cells, got {n_cells}"
        )));
    }
    if n_cells % 2 != 0 {
        return Err(Error::Mesh(format!(
            "cell count must be even, got {n_cells}"
        )));
    }
    if !(grading_beta >= 1.0) {
        return Err(Error::Mesh(format!(
            "grading exponent must be at least 1, got {grading_beta}"
        )));
    }
    let n = n_cells;
    let mut nodes = vec![0.0; n + 1];
    for i in 0..=n / 2 {
        nodes[i] = 0.5 * (2.0 * i as f64 / n as f64).powf(grading_beta);
    }
    for i in n / 2 + 1..=n {
        nodes[i] = 1.0 - nodes[n - i];
    }
    // Doubles thin out near 1, so the mirrored layer can collapse (e.g.
    // 1 - 2^-55 rounds to 1). Nudge collapsed nodes down by single ulps,
    // keeping the mesh strictly increasing.
    for i in (n / 2 + 1..n).rev() {
        if nodes[i] >= nodes[i + 1] {
            nodes[i] = nodes[i + 1].next_down();
        }
    }
    if nodes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Mesh(format!(
            "grading beta = {grading_beta} is too steep for {n_cells} cells at double precision"
        )));
    }
    Ok(GradedMesh {
        nodes,
        grading_beta,
        n_cells,
    })
}

/// Dense stiffness matrix over the interior degrees of freedom.
#[derive(Debug, Clone)]
pub struct StiffnessMatrix {
    matrix: DMatrix<f64>,
    variant: KernelVariant,
    params: KernelParams,
    mesh: GradedMesh,
    assembly_seconds: f64,
}

impl StiffnessMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn variant(&self) -> KernelVariant {
        self.variant
    }

    pub fn params(&self) -> &KernelParams {
        &self.params
    }

    pub fn mesh(&self) -> &GradedMesh {
        &self.mesh
    }

    pub fn assembly_seconds(&self) -> f64 {
        self.assembly_seconds
    }

    /// Energy `q^T A q` of a coefficient vector.
    pub fn quadratic_form(&self, coeffs: &[f64]) -> f64 {
        let q = DVector::from_column_slice(coeffs);
        (q.transpose() * &self.matrix * q)[(0, 0)]
    }
}

/// Load vector over the interior degrees of freedom.
#[derive(Debug, Clone)]
pub struct LoadVector(pub DVector<f64>);

/// Finite element solution with zero boundary extension.
#[derive(Debug, Clone)]
pub struct SolutionField {
    mesh: GradedMesh,
    coefficients: DVector<f64>,
    params: KernelParams,
}

impl SolutionField {
    /// Wraps interior coefficients as a field (zero boundary extension);
    /// used for synthetic profiles in diagnostics and tests.
    pub fn from_coefficients(
        mesh: GradedMesh,
        params: KernelParams,
        coefficients: Vec<f64>,
    ) -> Result<Self> {
        if coefficients.len() != mesh.n_dof() {
            return Err(Error::Mesh(format!(
                "expected {} interior coefficients, got {}",
                mesh.n_dof(),
                coefficients.len()
            )));
        }
        Ok(Self {
            mesh,
            coefficients: DVector::from_vec(coefficients),
            params,
        })
    }

    pub fn mesh(&self) -> &GradedMesh {
        &self.mesh
    }

    pub fn params(&self) -> &KernelParams {
        &self.params
    }

    /// Interior coefficients (nodes 1..n_cells-1).
    pub fn coefficients(&self) -> &[f64] {
        self.coefficients.as_slice()
    }

    /// Value at mesh node `i`, including the zero boundary nodes.
    pub fn node_value(&self, i: usize) -> f64 {
        if i == 0 || i == self.mesh.n_cells {
            0.0
        } else {
            self.coefficients[i - 1]
        }
    }

    pub fn linf_norm(&self) -> f64 {
        self.coefficients.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min_value(&self) -> f64 {
        self.coefficients.iter().fold(f64::INFINITY, |m, v| m.min(*v))
    }
}

/// Solve diagnostics.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub residual_norm: f64,
    pub assembly_seconds: f64,
    pub solve_seconds: f64,
    pub linf_norm: f64,
}

// ---------------------------------------------------------------------------
// Assembly
// ---------------------------------------------------------------------------

const DOMAIN: DomainSpec = DomainSpec::Interval { a: 0.0, b: 1.0 };
/// Gauss order per distant cell-pair direction.
const DISTANT_ORDER: usize = 6;
/// Gauss order for the reduced singular integral on touching pairs.
const TOUCHING_ORDER: usize = 10;

fn dist01(x: f64) -> f64 {
    x.min(1.0 - x).max(0.0)
}

/// Weight factor for a variant; the quadrature layout never depends on it.
fn weight_at(variant: KernelVariant, sigma: f64, x: f64, y: f64) -> f64 {
    match variant {
        KernelVariant::Regional => 1.0,
        KernelVariant::VanishingHorizon => indicator_raw(&DOMAIN, sigma, &[x], &[y]),
    }
}

/// Per-task accumulation buffers for the rows owned by cell `k`. Entries are
/// stored with node indices normalized to the upper triangle.
struct KTask {
    k: usize,
    /// A[k][j], j >= k.
    row_a: Vec<f64>,
    /// A[k+1][j], j >= k+1.
    row_b: Vec<f64>,
    /// (l, l), (l, l+1), (l+1, l+1) blocks of pairs (k, l) with l >= k+2
    /// (plus the (l+1, l+1) corner of the adjacent pair).
    diag_ll: Vec<f64>,
    off_ll1: Vec<f64>,
    diag_l1: Vec<f64>,
}

impl KTask {
    fn new(k: usize, n_nodes: usize) -> Self {
        Self {
            k,
            row_a: vec![0.0; n_nodes],
            row_b: vec![0.0; n_nodes],
            diag_ll: vec![0.0; n_nodes],
            off_ll1: vec![0.0; n_nodes],
            diag_l1: vec![0.0; n_nodes],
        }
    }

    /// Adds an energy contribution for nodes (m, n) of pair (k, l).
    fn add(&mut self, m: usize, n: usize, value: f64) {
        let (m, n) = if m <= n { (m, n) } else { (n, m) };
        if m == self.k {
            self.row_a[n] += value;
        } else if m == self.k + 1 {
            self.row_b[n] += value;
        } else if n == m {
            // m >= k+2: diagonal corner of the far cell.
            self.diag_ll[m] += value;
        } else {
            debug_assert_eq!(n, m + 1);
            self.off_ll1[m] += value;
        }
    }

    /// Same as `add` for the (l+1, l+1) corner, kept separate so both far
    /// corners accumulate deterministically.
    fn add_far_corner(&mut self, node: usize, value: f64) {
        self.diag_l1[node] += value;
    }
}

/// Closed-form moments of `v^{1-2s}` against a linear function on `[lo, hi]`.
fn singular_linear_moment(lo: f64, hi: f64, two_s: f64, alpha: f64, beta: f64) -> f64 {
    let e2 = 2.0 - two_s;
    let e3 = 3.0 - two_s;
    alpha * (hi.powf(e2) - lo.powf(e2)) / e2 + beta * (hi.powf(e3) - lo.powf(e3)) / e3
}

/// Weighted admissible strip length for the identical-pair reduction:
/// `W(v) = int_{xa}^{xb - v} B(x, x+v) dx`, exactly, as a piecewise linear
/// function evaluated pointwise.
fn strip_weight_length(
    xa: f64,
    xb: f64,
    v: f64,
    sigma: f64,
    left_half: bool,
    variant: KernelVariant,
) -> f64 {
    let lo = xa;
    let hi = xb - v;
    if hi <= lo {
        return 0.0;
    }
    if variant == KernelVariant::Regional {
        return hi - lo;
    }
    if left_half {
        // d(x) = x here: indicator thresholds x > v/sigma, x > v(1-sigma)/sigma.
        let a1 = v / sigma;
        let a2 = v * (1.0 - sigma) / sigma;
        0.5 * ((hi - a1.max(lo)).max(0.0) + (hi - a2.max(lo)).max(0.0))
    } else {
        // d(x) = 1 - x: thresholds x < 1 - v/sigma, x < 1 - v(1+sigma)/sigma.
        let b1 = 1.0 - v / sigma;
        let b2 = 1.0 - v * (1.0 + sigma) / sigma;
        0.5 * (((b1.min(hi)) - lo).max(0.0) + ((b2.min(hi)) - lo).max(0.0))
    }
}

/// Identical-pair energy: exact closed form. Returns the scalar `J` with
/// `E(phi_m, phi_n) += s_m s_n J` for the two hats living on the cell.
fn identical_pair_moment(
    mesh: &GradedMesh,
    cell: usize,
    sigma: f64,
    two_s: f64,
    variant: KernelVariant,
) -> f64 {
    let xa = mesh.nodes[cell];
    let xb = mesh.nodes[cell + 1];
    let h = xb - xa;
    let left = mesh.in_left_half(cell);

    // v values where the strip configuration changes; all crossings of the
    // linear thresholds with the strip ends.
    let mut candidates = vec![
        sigma * xa,
        sigma * xb / (1.0 + sigma),
        sigma * xb,
        sigma * (1.0 - xb),
        sigma * (1.0 - xa) / (1.0 + sigma),
        sigma * (1.0 - xa),
    ];
    if sigma < 1.0 {
        candidates.push(sigma * xa / (1.0 - sigma));
        candidates.push(sigma * (1.0 - xb) / (1.0 - sigma));
    }
    let breaks = quad::merge_breaks(0.0, h, &candidates);

    let mut total = 0.0;
    for piece in breaks.windows(2) {
        let (lo, hi) = (piece[0], piece[1]);
        if hi <= lo {
            continue;
        }
        // W is linear on the piece: recover it from two samples.
        let va = lo + (hi - lo) / 3.0;
        let vb = lo + 2.0 * (hi - lo) / 3.0;
        let wa = strip_weight_length(xa, xb, va, sigma, left, variant);
        let wb = strip_weight_length(xa, xb, vb, sigma, left, variant);
        let slope = (wb - wa) / (vb - va);
        let intercept = wa - slope * va;
        total += singular_linear_moment(lo, hi, two_s, intercept, slope);
    }
    total
}

/// Linear form `a = gamma + delta * t` used for adjacent-pair thresholds.
#[derive(Clone, Copy)]
struct LinearInT {
    gamma: f64,
    delta: f64,
}

impl LinearInT {
    fn at(&self, t: f64) -> f64 {
        self.gamma + self.delta * t
    }

    fn intersect(&self, other: &LinearInT) -> Option<f64> {
        let denom = self.delta - other.delta;
        if denom == 0.0 {
            return None;
        }
        Some((other.gamma - self.gamma) / denom)
    }
}

/// Adjacent-pair contribution around the shared node `z = nodes[k+1]`.
/// Writes the six (m, n) combinations over nodes {k, k+1, k+2}.
fn adjacent_pair(
    task: &mut KTask,
    mesh: &GradedMesh,
    k: usize,
    sigma: f64,
    two_s: f64,
    variant: KernelVariant,
) {
    let z = mesh.nodes[k + 1];
    let hk = mesh.width(k);
    let hl = mesh.width(k + 1);
    let t_total = hk + hl;
    let dz = dist01(z);

    // Slopes of the three hats on the left and right cell.
    // delta_m(x, y) = -(sx_m * a + sy_m * b) with a = z - x, b = y - z.
    let nodes_mn = [k, k + 1, k + 2];
    let sx = [-1.0 / hk, 1.0 / hk, 0.0];
    let sy = [0.0, -1.0 / hl, 1.0 / hl];

    // Indicator conditions as half-lines in a for fixed t.
    // ind1: t < sigma d(z - a); ind2: t < sigma d(z + t - a).
    let left_x = mesh.in_left_half(k);
    let left_y = mesh.in_left_half(k + 1);
    let (c1, c1_upper) = if left_x {
        (
            LinearInT {
                gamma: z,
                delta: -1.0 / sigma,
            },
            true,
        )
    } else {
        (
            LinearInT {
                gamma: -(1.0 - z),
                delta: 1.0 / sigma,
            },
            false,
        )
    };
    let (c2, c2_upper) = if left_y {
        (
            LinearInT {
                gamma: z,
                delta: -(1.0 - sigma) / sigma,
            },
            true,
        )
    } else {
        (
            LinearInT {
                gamma: -(1.0 - z),
                delta: (1.0 + sigma) / sigma,
            },
            false,
        )
    };

    // Saturation scale: below t0 the weight is 1 and the a-range is (0, t).
    let t0 = (sigma * dz / (1.0 + sigma)).min(hk.min(hl)) * 0.5;

    // Closed-form slice at the corner: P_mn(t) = K_mn t^3.
    let mut values = [0.0; 6];
    let combos = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];
    let corner = t0.powf(3.0 - two_s) / (3.0 - two_s);
    for (ci, &(m, n)) in combos.iter().enumerate() {
        let kmn = (sx[m] * sx[n] + sy[m] * sy[n]) / 3.0 + (sx[m] * sy[n] + sy[m] * sx[n]) / 6.0;
        values[ci] += kmn * corner;
    }

    // t-breakpoints: crossings of the thresholds with the a-range bounds.
    let bounds = [
        LinearInT { gamma: 0.0, delta: 0.0 },
        LinearInT { gamma: hk, delta: 0.0 },
        LinearInT { gamma: -hl, delta: 1.0 },
        LinearInT { gamma: 0.0, delta: 1.0 },
    ];
    let mut candidates = vec![hk, hl];
    if variant == KernelVariant::VanishingHorizon {
        for c in [c1, c2] {
            for b in bounds {
                if let Some(t) = c.intersect(&b) {
                    candidates.push(t);
                }
            }
        }
    }
    let mut breaks = quad::merge_breaks(t0, t_total, &candidates);
    // Geometric refinement toward the singular corner.
    let graded = quad::graded_breaks_left(breaks[0], breaks[1], 24);
    breaks.splice(0..2, graded);

    // Weighted quadratic moments over the a-range at fixed t.
    let moments = |t: f64| -> (f64, f64, f64) {
        let a_lo = (t - hl).max(0.0);
        let a_hi = hk.min(t);
        if a_hi <= a_lo {
            return (0.0, 0.0, 0.0);
        }
        let mut cuts = vec![a_lo, a_hi];
        if variant == KernelVariant::VanishingHorizon {
            for c in [c1, c2] {
                let v = c.at(t);
                if v > a_lo && v < a_hi {
                    cuts.push(v);
                }
            }
            cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        }
        let (mut m2, mut m11, mut m02) = (0.0, 0.0, 0.0);
        for piece in cuts.windows(2) {
            let (p1, p2) = (piece[0], piece[1]);
            if p2 <= p1 {
                continue;
            }
            let w = match variant {
                KernelVariant::Regional => 1.0,
                KernelVariant::VanishingHorizon => {
                    let amid = 0.5 * (p1 + p2);
                    let ind1 = if c1_upper { amid < c1.at(t) } else { amid > c1.at(t) };
                    let ind2 = if c2_upper { amid < c2.at(t) } else { amid > c2.at(t) };
                    0.5 * (ind1 as u8 as f64 + ind2 as u8 as f64)
                }
            };
            if w == 0.0 {
                continue;
            }
            let i_aa = (p2.powi(3) - p1.powi(3)) / 3.0;
            let i_ab = t * (p2.powi(2) - p1.powi(2)) / 2.0 - i_aa;
            let i_bb = ((t - p1).powi(3) - (t - p2).powi(3)) / 3.0;
            m2 += w * i_aa;
            m11 += w * i_ab;
            m02 += w * i_bb;
        }
        (m2, m11, m02)
    };

    let (gl_nodes, gl_weights) = quad::gauss_legendre(TOUCHING_ORDER);
    for panel in breaks.windows(2) {
        let mid = 0.5 * (panel[0] + panel[1]);
        let half = 0.5 * (panel[1] - panel[0]);
        if half <= 0.0 {
            continue;
        }
        for (gn, gw) in gl_nodes.iter().zip(gl_weights) {
            let t = mid + half * gn;
            let (m2, m11, m02) = moments(t);
            let kernel = t.powf(-1.0 - two_s) * gw * half;
            for (ci, &(m, n)) in combos.iter().enumerate() {
                let p = sx[m] * sx[n] * m2 + (sx[m] * sy[n] + sy[m] * sx[n]) * m11
                    + sy[m] * sy[n] * m02;
                values[ci] += kernel * p;
            }
        }
    }

    for (ci, &(m, n)) in combos.iter().enumerate() {
        let (nm, nn) = (nodes_mn[m], nodes_mn[n]);
        if nm == k + 2 && nn == k + 2 {
            task.add_far_corner(nm, values[ci]);
        } else {
            task.add(nm, nn, values[ci]);
        }
    }
}

/// Distant-pair contribution via tensor Gauss with indicator-crossing splits.
fn distant_pair(
    task: &mut KTask,
    mesh: &GradedMesh,
    k: usize,
    l: usize,
    sigma: f64,
    two_s: f64,
    variant: KernelVariant,
) {
    let (xa, xb) = (mesh.nodes[k], mesh.nodes[k + 1]);
    let (ya, yb) = (mesh.nodes[l], mesh.nodes[l + 1]);

    // Entire pair outside both horizons? (The regional weight never
    // vanishes, so only the indicator variant may prune.)
    if variant == KernelVariant::VanishingHorizon {
        let gap = ya - xb;
        let max_d = dist01(xa)
            .max(dist01(xb))
            .max(dist01(ya))
            .max(dist01(yb));
        if gap >= sigma * max_d {
            return;
        }
    }

    let left_x = mesh.in_left_half(k);
    let left_y = mesh.in_left_half(l);

    // x values where an indicator-crossing curve enters or leaves the y cell.
    let mut x_cuts: Vec<f64> = Vec::new();
    for ye in [ya, yb] {
        // ind1 curve y = x + sigma d(x).
        if left_x {
            x_cuts.push(ye / (1.0 + sigma));
        } else if sigma < 1.0 {
            x_cuts.push((ye - sigma) / (1.0 - sigma));
        }
        // ind2 curve y - x = sigma d(y).
        if left_y {
            if sigma < 1.0 {
                x_cuts.push(ye * (1.0 - sigma));
            }
        } else {
            x_cuts.push(ye * (1.0 + sigma) - sigma);
        }
    }
    let mut x_breaks = quad::merge_breaks(xa, xb, &x_cuts);
    if l - k <= 3 {
        // The kernel is steep when the gap is comparable to the cell size.
        let n = x_breaks.len();
        let graded = quad::graded_breaks_right(x_breaks[n - 2], x_breaks[n - 1], 10);
        x_breaks.splice(n - 2..n, graded);
    }

    let (gl_nodes, gl_weights) = quad::gauss_legendre(DISTANT_ORDER);
    let hx = xb - xa;
    let hy = yb - ya;
    let mut block_xx = [[0.0; 2]; 2];
    let mut block_xy = [[0.0; 2]; 2];
    let mut block_yy = [[0.0; 2]; 2];

    for xp in x_breaks.windows(2) {
        let xmid = 0.5 * (xp[0] + xp[1]);
        let xhalf = 0.5 * (xp[1] - xp[0]);
        if xhalf <= 0.0 {
            continue;
        }
        for (xn, xw) in gl_nodes.iter().zip(gl_weights) {
            let x = xmid + xhalf * xn;
            let wx = xw * xhalf;
            let dx = dist01(x);
            // y-breakpoints at this x.
            let mut y_cuts = vec![x + sigma * dx];
            if left_y {
                if sigma < 1.0 {
                    y_cuts.push(x / (1.0 - sigma));
                }
            } else {
                y_cuts.push((x + sigma) / (1.0 + sigma));
            }
            let mut y_breaks = quad::merge_breaks(ya, yb, &y_cuts);
            if l - k <= 3 {
                let graded = quad::graded_breaks_left(y_breaks[0], y_breaks[1], 10);
                y_breaks.splice(0..2, graded);
            }
            let phi_x = [(xb - x) / hx, (x - xa) / hx];
            for ypnl in y_breaks.windows(2) {
                let ymid = 0.5 * (ypnl[0] + ypnl[1]);
                let yhalf = 0.5 * (ypnl[1] - ypnl[0]);
                if yhalf <= 0.0 {
                    continue;
                }
                let w_seg = weight_at(variant, sigma, x, ymid);
                if w_seg == 0.0 {
                    continue;
                }
                for (yn, yw) in gl_nodes.iter().zip(gl_weights) {
                    let y = ymid + yhalf * yn;
                    let c = w_seg * (y - x).powf(-1.0 - two_s) * wx * yw * yhalf;
                    let phi_y = [(yb - y) / hy, (y - ya) / hy];
                    for m in 0..2 {
                        for n in 0..2 {
                            block_xx[m][n] += c * phi_x[m] * phi_x[n];
                            block_xy[m][n] += c * phi_x[m] * phi_y[n];
                            block_yy[m][n] += c * phi_y[m] * phi_y[n];
                        }
                    }
                }
            }
        }
    }

    // The hats are disjoint across the pair, so the hat differences reduce
    // to phi_m(x) on the x side and -phi_n(y) on the y side.
    for m in 0..2 {
        for n in m..2 {
            task.add(k + m, k + n, block_xx[m][n]);
        }
    }
    for m in 0..2 {
        for n in 0..2 {
            task.add(k + m, l + n, -block_xy[m][n]);
        }
    }
    task.add(l, l, block_yy[0][0]);
    task.add(l, l + 1, block_yy[0][1]);
    task.add_far_corner(l + 1, block_yy[1][1]);
}

/// Assembles the stiffness matrix `A[i][j] = E(phi_i, phi_j)` over interior
/// hats for the requested kernel variant.
pub fn assemble_stiffness(
    mesh: &GradedMesh,
    params: &KernelParams,
    variant: KernelVariant,
) -> StiffnessMatrix {
    let start = Instant::now();
    let n = mesh.n_cells;
    let n_nodes = n + 1;
    let sigma = params.sigma();
    let two_s = 2.0 * params.s();

    let tasks: Vec<KTask> = (0..n)
        .into_par_iter()
        .map(|k| {
            let mut task = KTask::new(k, n_nodes);

            // Identical pair: exact moments; hats k (slope -1/h) and k+1.
            let j = identical_pair_moment(mesh, k, sigma, two_s, variant);
            let h = mesh.width(k);
            let slopes = [-1.0 / h, 1.0 / h];
            for m in 0..2 {
                for nn in m..2 {
                    task.add(k + m, k + nn, slopes[m] * slopes[nn] * j);
                }
            }

            if k + 1 < n {
                adjacent_pair(&mut task, mesh, k, sigma, two_s, variant);
            }
            for l in k + 2..n {
                distant_pair(&mut task, mesh, k, l, sigma, two_s, variant);
            }
            task
        })
        .collect();

    // Deterministic merge in cell order, upper triangle only.
    let ndof = n - 1;
    let mut a = DMatrix::<f64>::zeros(ndof, ndof);
    let interior = |node: usize| -> Option<usize> {
        if node >= 1 && node < n {
            Some(node - 1)
        } else {
            None
        }
    };
    let mut put = |a: &mut DMatrix<f64>, m: usize, nn: usize, v: f64| {
        if v == 0.0 {
            return;
        }
        if let (Some(i), Some(j)) = (interior(m), interior(nn)) {
            a[(i, j)] += v;
        }
    };
    for task in &tasks {
        let k = task.k;
        for (j, &v) in task.row_a.iter().enumerate() {
            put(&mut a, k, j, v);
        }
        for (j, &v) in task.row_b.iter().enumerate() {
            put(&mut a, k + 1, j, v);
        }
        for l in 0..n_nodes {
            put(&mut a, l, l, task.diag_ll[l] + task.diag_l1[l]);
            if l + 1 < n_nodes {
                put(&mut a, l, l + 1, task.off_ll1[l]);
            }
        }
    }
    // Mirror the upper triangle for exact symmetry.
    for i in 0..ndof {
        for j in i + 1..ndof {
            a[(j, i)] = a[(i, j)];
        }
    }

    StiffnessMatrix {
        matrix: a,
        variant,
        params: *params,
        mesh: mesh.clone(),
        assembly_seconds: start.elapsed().as_secs_f64(),
    }
}

/// Load vector `b[i] = int f phi_i`, Gauss order 8 per cell.
pub fn assemble_load<F: Fn(f64) -> f64>(mesh: &GradedMesh, f: F) -> LoadVector {
    let n = mesh.n_cells;
    let mut b = DVector::<f64>::zeros(n - 1);
    let (gl_nodes, gl_weights) = quad::gauss_legendre(8);
    for cell in 0..n {
        let (xa, xb) = (mesh.nodes[cell], mesh.nodes[cell + 1]);
        let h = xb - xa;
        let mid = 0.5 * (xa + xb);
        let half = 0.5 * h;
        let mut down = 0.0; // against phi_cell (descending)
        let mut up = 0.0; // against phi_{cell+1} (ascending)
        for (gn, gw) in gl_nodes.iter().zip(gl_weights) {
            let x = mid + half * gn;
            let fx = f(x);
            let asc = (x - xa) / h;
            up += gw * half * fx * asc;
            down += gw * half * fx * (1.0 - asc);
        }
        if cell >= 1 {
            b[cell - 1] += down;
        }
        if cell + 1 < n {
            b[cell] += up;
        }
    }
    LoadVector(b)
}

/// Direct symmetric positive definite solve.
pub fn solve_dirichlet(
    a: &StiffnessMatrix,
    b: &LoadVector,
) -> Result<(SolutionField, SolveReport)> {
    let start = Instant::now();
    let chol = a
        .matrix
        .clone()
        .cholesky()
        .ok_or(Error::NotPositiveDefinite { pivot: 0 })?;
    let u = chol.solve(&b.0);
    let solve_seconds = start.elapsed().as_secs_f64();
    let residual = (&a.matrix * &u - &b.0).norm();
    let field = SolutionField {
        mesh: a.mesh.clone(),
        coefficients: u,
        params: a.params,
    };
    let linf = field.linf_norm();
    Ok((
        field,
        SolveReport {
            residual_norm: residual,
            assembly_seconds: a.assembly_seconds,
            solve_seconds,
            linf_norm: linf,
        },
    ))
}

/// Energy of a field in the requested variant; assembles the matching
/// stiffness matrix on the field's mesh (the dominant cost).
pub fn energy(field: &SolutionField, variant: KernelVariant) -> f64 {
    let a = assemble_stiffness(&field.mesh, &field.params, variant);
    a.quadratic_form(field.coefficients())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(s: f64, sigma: f64) -> KernelParams {
        KernelParams::new(s, sigma).unwrap()
    }

    #[test]
    fn uniform_mesh_nodes() {
        let mesh = build_mesh(8, 1.0).unwrap();
        let expected: Vec<f64> = (0..=8).map(|i| i as f64 / 8.0).collect();
        for (a, b) in mesh.nodes().iter().zip(&expected) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn graded_mesh_first_node() {
        let mesh = build_mesh(8, 2.0).unwrap();
        assert!((mesh.nodes()[1] - 1.0 / 32.0).abs() < 1e-16);
        let mesh = build_mesh(1024, 4.0).unwrap();
        let expected = 0.5 * (2.0f64 / 1024.0).powi(4);
        assert!((mesh.nodes()[1] - expected).abs() < 1e-18 * expected.max(1.0));
        // Symmetric with a node at 1/2.
        assert_eq!(mesh.nodes()[512], 0.5);
        assert!((mesh.nodes()[1023] - (1.0 - mesh.nodes()[1])).abs() < 1e-16);
    }

    #[test]
    fn mesh_rejects_bad_inputs() {
        assert!(build_mesh(9, 1.0).is_err());
        assert!(build_mesh(4, 1.0).is_err());
        assert!(build_mesh(16, 0.5).is_err());
    }

    #[test]
    fn auto_beta_matches_boundary_exponent() {
        assert!((auto_beta(0.75) - 4.0).abs() < 1e-15);
        assert_eq!(auto_beta(0.6), 6.0); // 2/(2s-1) = 10, capped
        assert!((auto_beta(0.9) - 2.5).abs() < 1e-15);
    }

    #[test]
    fn load_vector_examples() {
        let mesh = build_mesh(8, 1.0).unwrap();
        let zero = assemble_load(&mesh, |_| 0.0);
        assert!(zero.0.iter().all(|v| *v == 0.0));
        let ones = assemble_load(&mesh, |_| 1.0);
        for v in ones.0.iter() {
            assert!((v - 0.125).abs() < 1e-15);
        }
        let linear = assemble_load(&mesh, |x| x);
        for (i, v) in linear.0.iter().enumerate() {
            let xi = (i + 1) as f64 / 8.0;
            assert!((v - 0.125 * xi).abs() < 1e-15, "node {i}");
        }
    }

    #[test]
    fn stiffness_is_exactly_symmetric() {
        let mesh = build_mesh(16, 2.0).unwrap();
        let a = assemble_stiffness(&mesh, &params(0.75, 0.5), KernelVariant::VanishingHorizon);
        let m = a.matrix();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                assert_eq!(m[(i, j)], m[(j, i)]);
            }
        }
    }

    #[test]
    fn zero_coefficients_have_zero_energy() {
        let mesh = build_mesh(8, 1.0).unwrap();
        let a = assemble_stiffness(&mesh, &params(0.75, 1.0), KernelVariant::VanishingHorizon);
        assert_eq!(a.quadratic_form(&vec![0.0; mesh.n_dof()]), 0.0);
    }

    #[test]
    fn stiffness_matches_brute_force_oracle() {
        // Independent route: E(u,u) = int_0^1 v^{-1-2s} int (u(x+v)-u(x))^2
        // B(x, x+v) dx dv on a fine graded grid, for a single hat.
        let mesh = build_mesh(8, 1.0).unwrap();
        let pr = params(0.75, 0.5);
        let two_s = 1.5;
        for variant in [KernelVariant::VanishingHorizon, KernelVariant::Regional] {
            let a = assemble_stiffness(&mesh, &pr, variant);
            let i = 3; // interior node 4/8... node index 4 => dof 3
            let hat = |x: f64| {
                let (xl, xm, xr) = (3.0 / 8.0, 4.0 / 8.0, 5.0 / 8.0);
                if x <= xl || x >= xr {
                    0.0
                } else if x <= xm {
                    (x - xl) * 8.0
                } else {
                    (xr - x) * 8.0
                }
            };
            let inner = |v: f64| -> f64 {
                let breaks: Vec<f64> = (0..=4000)
                    .map(|j| j as f64 * (1.0 - v) / 4000.0)
                    .collect();
                quad::integrate_panels(
                    &mut |x: f64| {
                        let d = hat(x + v) - hat(x);
                        if d == 0.0 {
                            return 0.0;
                        }
                        d * d * weight_at(variant, pr.sigma(), x, x + v)
                    },
                    &breaks,
                    4,
                )
            };
            let vbreaks = quad::graded_breaks_left(0.0, 1.0, 40);
            let oracle = quad::integrate_panels(
                &mut |v: f64| inner(v) * v.powf(-1.0 - two_s),
                &vbreaks,
                8,
            );
            let got = a.matrix()[(i, i)];
            assert!(
                (got - oracle).abs() < 2e-3 * oracle,
                "{variant:?}: {got} vs {oracle}"
            );
        }
    }

    #[test]
    fn weight_dominance_and_psd_difference() {
        let mesh = build_mesh(32, 2.0).unwrap();
        let pr = params(0.8, 0.5);
        let avh = assemble_stiffness(&mesh, &pr, KernelVariant::VanishingHorizon);
        let areg = assemble_stiffness(&mesh, &pr, KernelVariant::Regional);
        for i in 0..mesh.n_dof() {
            assert!(avh.matrix()[(i, i)] <= areg.matrix()[(i, i)] + 1e-14);
        }
        // Quadratic-form dominance for a few deterministic vectors.
        let mut rng = crate::rng::SplitMix64::new(9);
        for _ in 0..20 {
            let q: Vec<f64> = (0..mesh.n_dof()).map(|_| rng.next_symmetric()).collect();
            let evh = avh.quadratic_form(&q);
            let ereg = areg.quadratic_form(&q);
            assert!(evh <= ereg * (1.0 + 1e-12) + 1e-14, "{evh} vs {ereg}");
        }
    }

    #[test]
    fn deep_hat_matches_regional_up_to_far_field() {
        // Within the saturation radius both variants coincide; the far-field
        // deficit is bounded by |supp phi| * R0^{-2s} / (2 s).
        let mesh = build_mesh(64, 1.0).unwrap();
        let pr = params(0.75, 1.0);
        let avh = assemble_stiffness(&mesh, &pr, KernelVariant::VanishingHorizon);
        let areg = assemble_stiffness(&mesh, &pr, KernelVariant::Regional);
        let i = 31; // node 32 = midpoint
        let diff = areg.matrix()[(i, i)] - avh.matrix()[(i, i)];
        assert!(diff >= 0.0);
        let supp = 2.0 / 64.0;
        let dmin = 0.5 - 1.0 / 64.0;
        let r0 = pr.sigma() / (1.0 + pr.sigma()) * dmin;
        let bound = supp * r0.powf(-2.0 * pr.s()) / (2.0 * pr.s());
        assert!(diff <= bound, "diff {diff} bound {bound}");
        // And the near-diagonal rows agree to the same far-field bound.
        for j in (i - 2)..=(i + 2) {
            let d = (areg.matrix()[(i, j)] - avh.matrix()[(i, j)]).abs();
            let supp_union = 4.0 / 64.0;
            let row_bound = supp_union * r0.powf(-2.0 * pr.s()) / (2.0 * pr.s());
            assert!(d <= row_bound, "col {j}: {d} vs {row_bound}");
        }
    }

    #[test]
    fn solve_is_positive_and_accurate() {
        let mesh = build_mesh(64, 4.0).unwrap();
        let pr = params(0.75, 1.0);
        let a = assemble_stiffness(&mesh, &pr, KernelVariant::VanishingHorizon);
        let b = assemble_load(&mesh, |_| 1.0);
        let (u, report) = solve_dirichlet(&a, &b).unwrap();
        assert!(u.min_value() > -1e-8 * u.linf_norm());
        let scale = a.matrix().norm() * u.linf_norm();
        assert!(report.residual_norm <= 1e-10 * scale.max(1.0));
        // b = 0 gives u = 0.
        let zero = LoadVector(DVector::zeros(mesh.n_dof()));
        let (u0, _) = solve_dirichlet(&a, &zero).unwrap();
        assert!(u0.linf_norm() == 0.0);
    }

    #[test]
    fn galerkin_energy_increases_under_refinement() {
        // Even-index fine nodes coincide with coarse nodes, so the spaces
        // are nested and E(u_h, u_h) = (f, u_h) grows toward the limit.
        let pr = params(0.75, 1.0);
        let mut prev = 0.0;
        for n in [16usize, 32, 64] {
            let mesh = build_mesh(n, 2.0).unwrap();
            let a = assemble_stiffness(&mesh, &pr, KernelVariant::VanishingHorizon);
            let b = assemble_load(&mesh, |_| 1.0);
            let (u, _) = solve_dirichlet(&a, &b).unwrap();
            let e = a.quadratic_form(u.coefficients());
            assert!(e > prev, "n={n}: {e} vs {prev}");
            prev = e;
        }
    }

    #[test]
    fn energy_orders_between_variants() {
        let mesh = build_mesh(32, 2.0).unwrap();
        let pr = params(0.75, 0.5);
        let a = assemble_stiffness(&mesh, &pr, KernelVariant::VanishingHorizon);
        let b = assemble_load(&mesh, |_| 1.0);
        let (u, _) = solve_dirichlet(&a, &b).unwrap();
        let evh = energy(&u, KernelVariant::VanishingHorizon);
        let ereg = energy(&u, KernelVariant::Regional);
        assert!(evh > 0.0);
        assert!(evh <= ereg * (1.0 + 1e-8));
    }

    #[test]
    fn assembly_is_deterministic_across_runs() {
        let mesh = build_mesh(24, 3.0).unwrap();
        let pr = params(0.8, 1.0);
        let a1 = assemble_stiffness(&mesh, &pr, KernelVariant::VanishingHorizon);
        let a2 = assemble_stiffness(&mesh, &pr, KernelVariant::VanishingHorizon);
        assert_eq!(a1.matrix(), a2.matrix());
    }
}
