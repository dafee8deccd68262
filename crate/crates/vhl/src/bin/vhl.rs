//! Command-line front end: runs individual checks or the full suite and
//! writes CSV/SVG artifacts. Every check prints one machine-readable line,
//! `OK ...` or `FAIL ...`; the exit status is 0 when all checks pass, 1 on
//! any failure, and 2 on usage errors.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use vhl::config::{parse_config, SuiteConfig};
use vhl::experiments::{
    comparability_report, fit_boundary_exponent, render_support_figure, run_suite,
};
use vhl::fem::{
    assemble_load, assemble_stiffness, auto_beta, build_mesh, solve_dirichlet, KernelVariant,
};
use vhl::geometry::KernelParams;
use vhl::halfspace::{a_constant, MonomialExponent};
use vhl::pv::{apply_operator, barrier_probe_detailed, ScalarField};
use vhl::report::{fmt_float, write_atomic, Csv};
use vhl::{geometry, Result};

#[derive(Parser)]
#[command(
    name = "vhl",
    about = "Numerical laboratory for the vanishing-horizon nonlocal operator",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct KernelArgs {
    /// Kernel exponent s in (1/2, 1).
    #[arg(long, default_value_t = 0.75)]
    s: f64,
    /// Horizon fraction sigma in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
}

#[derive(Args)]
struct MeshArgs {
    /// Number of mesh cells (even, at least 8).
    #[arg(long = "n-cells", default_value_t = 1024)]
    n_cells: usize,
    /// Grading exponent; omit for the automatic choice min(2/(2s-1), 6).
    #[arg(long)]
    beta: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the half-space constant a(p, sigma).
    ASigma {
        #[command(flatten)]
        kernel: KernelArgs,
        /// Monomial exponent p.
        #[arg(long)]
        p: f64,
        /// Spatial dimension.
        #[arg(long, default_value_t = 1)]
        dim: usize,
        /// Optional CSV output path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that y_d^{2s-1} is annihilated in the half-space.
    Harmonic {
        #[command(flatten)]
        kernel: KernelArgs,
        /// Spatial dimension (1 or 2).
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Probe L d^p near the boundary of the unit ball (d = 2).
    Barrier {
        #[command(flatten)]
        kernel: KernelArgs,
        /// Barrier exponent p; omit for 2s - 1 + 0.1.
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the Dirichlet problem with f = 1 and write the solution.
    Solve {
        #[command(flatten)]
        kernel: KernelArgs,
        #[command(flatten)]
        mesh: MeshArgs,
        /// Solution CSV path (`node,x,u`).
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve and fit the boundary decay exponent.
    Exponent {
        #[command(flatten)]
        kernel: KernelArgs,
        #[command(flatten)]
        mesh: MeshArgs,
        /// Fit window as `d_min,d_max`.
        #[arg(long, value_parser = parse_window, default_value = "1e-4,1e-2")]
        window: (f64, f64),
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the vanishing-horizon and regional energies on random fields.
    Compare {
        #[command(flatten)]
        kernel: KernelArgs,
        #[command(flatten)]
        mesh: MeshArgs,
        /// Seed of the coefficient generator.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render the kernel support figure (ball plus ellipsoid/paraboloid).
    Geometry {
        #[command(flatten)]
        kernel: KernelArgs,
        /// SVG output path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the configured experiment suite and write all artifacts.
    Suite {
        /// Configuration file; omit for built-in defaults.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn parse_window(text: &str) -> std::result::Result<(f64, f64), String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err("expected `d_min,d_max`".into());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| "bad d_min")?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| "bad d_max")?;
    Ok((lo, hi))
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("VHL_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            println!("FAIL {e}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(command: Command) -> Result<bool> {
    match command {
        Command::ASigma {
            kernel,
            p,
            dim,
            out,
        } => {
            let params = KernelParams::new(kernel.s, kernel.sigma)?;
            let r = a_constant(MonomialExponent::new(p, &params)?, &params, dim)?;
            if let Some(path) = out {
                let mut csv = Csv::new(&["p", "s", "sigma", "d", "value", "abs_err"]);
                csv.row(&[
                    fmt_float(p),
                    fmt_float(kernel.s),
                    fmt_float(kernel.sigma),
                    dim.to_string(),
                    fmt_float(r.value),
                    fmt_float(r.abs_error_estimate),
                ]);
                write_atomic(&path, csv.into_string().as_bytes())?;
            }
            println!(
                "OK a({p},{}) = {} abs_err {}",
                kernel.sigma,
                fmt_float(r.value),
                fmt_float(r.abs_error_estimate)
            );
            Ok(true)
        }
        Command::Harmonic { kernel, dim, out } => {
            let params = KernelParams::new(kernel.s, kernel.sigma)?;
            let domain = geometry::DomainSpec::half_space(dim)?;
            let u = ScalarField::monomial_last(2.0 * kernel.s - 1.0);
            let mut csv = Csv::new(&["s", "sigma", "d", "x_d", "value", "abs_err", "tol"]);
            let mut all_ok = true;
            for &xd in &[0.1, 1.0, 10.0] {
                let x = if dim == 1 {
                    geometry::Point::x1(xd)
                } else {
                    geometry::Point::x2(0.3, xd)
                };
                let r = apply_operator(&domain, &params, &u, &x)?;
                let tol = 1e-3 / xd;
                let ok = r.value.abs() <= tol;
                all_ok &= ok;
                println!(
                    "{} harmonic x_d={xd} value={} tol={}",
                    if ok { "OK" } else { "FAIL" },
                    fmt_float(r.value),
                    fmt_float(tol)
                );
                csv.row(&[
                    fmt_float(kernel.s),
                    fmt_float(kernel.sigma),
                    dim.to_string(),
                    fmt_float(xd),
                    fmt_float(r.value),
                    fmt_float(r.abs_error_estimate),
                    fmt_float(tol),
                ]);
            }
            if let Some(path) = out {
                write_atomic(&path, csv.into_string().as_bytes())?;
            }
            Ok(all_ok)
        }
        Command::Barrier { kernel, p, out } => {
            let params = KernelParams::new(kernel.s, kernel.sigma)?;
            let p = p.unwrap_or(2.0 * kernel.s - 1.0 + 0.1);
            let domain = geometry::DomainSpec::ball(vec![0.0, 0.0], 1.0)?;
            let rhos: Vec<f64> = (3..=8).map(|k| 2f64.powi(-k)).collect();
            let probes = barrier_probe_detailed(&domain, &params, p, &rhos)?;
            let mut csv = Csv::new(&["rho", "p", "s", "sigma", "domain", "value", "abs_err"]);
            for (rho, r) in &probes {
                println!("OK barrier rho={rho} value={}", fmt_float(r.value));
                csv.row(&[
                    fmt_float(*rho),
                    fmt_float(p),
                    fmt_float(kernel.s),
                    fmt_float(kernel.sigma),
                    "ball".into(),
                    fmt_float(r.value),
                    fmt_float(r.abs_error_estimate),
                ]);
            }
            if let Some(path) = out {
                write_atomic(&path, csv.into_string().as_bytes())?;
            }
            Ok(true)
        }
        Command::Solve { kernel, mesh, out } => {
            let params = KernelParams::new(kernel.s, kernel.sigma)?;
            let beta = mesh.beta.unwrap_or_else(|| auto_beta(kernel.s));
            let grid = build_mesh(mesh.n_cells, beta)?;
            let a = assemble_stiffness(&grid, &params, KernelVariant::VanishingHorizon);
            let b = assemble_load(&grid, |_| 1.0);
            let (u, report) = solve_dirichlet(&a, &b)?;
            let mut csv = Csv::new(&["node", "x", "u"]);
            for (i, &x) in grid.nodes().iter().enumerate() {
                csv.row(&[i.to_string(), fmt_float(x), fmt_float(u.node_value(i))]);
            }
            write_atomic(&out, csv.into_string().as_bytes())?;
            println!(
                "OK solve n={} beta={} linf={} residual={} assembly={:.2}s solve={:.2}s",
                mesh.n_cells,
                fmt_float(beta),
                fmt_float(report.linf_norm),
                fmt_float(report.residual_norm),
                report.assembly_seconds,
                report.solve_seconds
            );
            Ok(true)
        }
        Command::Exponent {
            kernel,
            mesh,
            window,
            out,
        } => {
            let params = KernelParams::new(kernel.s, kernel.sigma)?;
            let beta = mesh.beta.unwrap_or_else(|| auto_beta(kernel.s));
            let grid = build_mesh(mesh.n_cells, beta)?;
            let a = assemble_stiffness(&grid, &params, KernelVariant::VanishingHorizon);
            let b = assemble_load(&grid, |_| 1.0);
            let (u, _) = solve_dirichlet(&a, &b)?;
            let fit = fit_boundary_exponent(&u, window)?;
            let target = 2.0 * kernel.s - 1.0;
            let ok = (fit.fitted_exponent - target).abs() <= 0.05 && fit.r_squared >= 0.999;
            if let Some(path) = out {
                let mut csv = Csv::new(&["s", "sigma", "slope", "stderr", "r2", "n_points"]);
                csv.row(&[
                    fmt_float(kernel.s),
                    fmt_float(kernel.sigma),
                    fmt_float(fit.fitted_exponent),
                    fmt_float(fit.stderr),
                    fmt_float(fit.r_squared),
                    fit.n_points.to_string(),
                ]);
                write_atomic(&path, csv.into_string().as_bytes())?;
            }
            println!(
                "{} exponent slope={} target={} r2={}",
                if ok { "OK" } else { "FAIL" },
                fmt_float(fit.fitted_exponent),
                fmt_float(target),
                fmt_float(fit.r_squared)
            );
            Ok(ok)
        }
        Command::Compare {
            kernel,
            mesh,
            seed,
            out,
        } => {
            let params = KernelParams::new(kernel.s, kernel.sigma)?;
            let beta = mesh.beta.unwrap_or_else(|| auto_beta(kernel.s));
            let grid = build_mesh(mesh.n_cells.min(256), beta)?;
            let rep = comparability_report(&grid, &params, 100, seed);
            let min_ratio = rep.min_ratio.unwrap_or(f64::NAN);
            let max_ratio = rep.max_ratio.unwrap_or(f64::NAN);
            let ok = min_ratio >= 1.0 - 1e-6 && max_ratio.is_finite();
            if let Some(path) = out {
                let mut csv = Csv::new(&[
                    "s", "sigma", "n_cells", "samples", "skipped", "min_ratio", "max_ratio",
                ]);
                csv.row(&[
                    fmt_float(kernel.s),
                    fmt_float(kernel.sigma),
                    grid.n_cells().to_string(),
                    rep.samples.to_string(),
                    rep.skipped.to_string(),
                    fmt_float(min_ratio),
                    fmt_float(max_ratio),
                ]);
                write_atomic(&path, csv.into_string().as_bytes())?;
            }
            println!(
                "{} compare min_ratio={} max_ratio={}",
                if ok { "OK" } else { "FAIL" },
                fmt_float(min_ratio),
                fmt_float(max_ratio)
            );
            Ok(ok)
        }
        Command::Geometry { kernel, out } => {
            let params = KernelParams::new(kernel.s, kernel.sigma)?;
            let svg = render_support_figure(&params)?;
            write_atomic(&out, svg.as_bytes())?;
            println!("OK geometry wrote {}", out.display());
            Ok(true)
        }
        Command::Suite { config } => {
            let cfg: SuiteConfig = match config {
                Some(path) => parse_config(&std::fs::read_to_string(path)?)?,
                None => SuiteConfig::default(),
            };
            let summary = run_suite(&cfg)?;
            for row in &summary.rows {
                println!(
                    "{} {} ({}: expected {}, observed {})",
                    if row.pass { "OK" } else { "FAIL" },
                    row.criterion,
                    row.experiment,
                    row.expected,
                    row.observed
                );
            }
            println!(
                "{} suite: {}/{} checks passed, artifacts in {}",
                if summary.all_pass() { "OK" } else { "FAIL" },
                summary.rows.iter().filter(|r| r.pass).count(),
                summary.rows.len(),
                cfg.output_dir.display()
            );
            Ok(summary.all_pass())
        }
    }
}
