use std::time::Instant;
use vhl::fem::{assemble_load, assemble_stiffness, auto_beta, build_mesh, solve_dirichlet, KernelVariant};
use vhl::geometry::KernelParams;

fn ols(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - (intercept + slope * x)).powi(2)).sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    (slope, 1.0 - ss_res / ss_tot)
}

fn main() {
    let n = 1024usize;
    for &s in &[0.6, 0.75, 0.9] {
        for &sigma in &[0.5, 1.0] {
            let pr = KernelParams::new(s, sigma).unwrap();
            let beta = auto_beta(s);
            let mesh = build_mesh(n, beta).unwrap();
            let t0 = Instant::now();
            let a = assemble_stiffness(&mesh, &pr, KernelVariant::VanishingHorizon);
            let t_asm = t0.elapsed();
            let b = assemble_load(&mesh, |_| 1.0);
            let t1 = Instant::now();
            let (u, rep) = solve_dirichlet(&a, &b).unwrap();
            let t_solve = t1.elapsed();
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for (i, &x) in mesh.nodes().iter().enumerate() {
                if x > 1e-4 && x < 1e-2 {
                    let v = u.node_value(i);
                    if v > 0.0 {
                        xs.push(x.ln());
                        ys.push(v.ln());
                    }
                }
            }
            let (slope, r2) = ols(&xs, &ys);
            println!(
                "s={s} sigma={sigma} beta={beta:.2}: slope={slope:.4} (target {:.2}) r2={r2:.6} npts={} min_u={:+.2e} linf={:.3e} asm={t_asm:.2?} solve={t_solve:.2?} resid={:.1e}",
                2.0 * s - 1.0, xs.len(), u.min_value(), rep.linf_norm, rep.residual_norm
            );
        }
    }
}
