//! `bil` — command-line front end for the Born-Infeld electrostatics
//! laboratory: radial and grid solvers, approximation cascades,
//! mollification studies, the coupled matter equation, and the property
//! suites.
//!
//! Verbosity is controlled by the BIL_LOG environment variable
//! (error | info | debug).

mod charge_arg;
mod config;
mod gridio;
mod table;

use bil_core::bikg;
use bil_core::charge::{ChargeSpec, Kernel, PointSet};
use bil_core::checks::{run_suite, Suite};
use bil_core::geom::GridGeom;
use bil_core::grid::{self, GridSolveParams};
use bil_core::lagrangian::truncation_match;
use bil_core::quad::{geometric_grid, merge_grids};
use bil_core::radial::{self, cumulative_moment, first_integral_residual};
use bil_core::{approx, mollify};
use charge_arg::{parse_charge, parse_f64_list, parse_usize_list};
use clap::{Parser, Subcommand, ValueEnum};
use config::Config;
use std::path::PathBuf;
use table::{Format, Table};

#[derive(Parser)]
#[command(name = "bil", version, about = "Born-Infeld electrostatics laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelArg {
    Bump,
    Gaussian,
}

impl From<KernelArg> for Kernel {
    fn from(k: KernelArg) -> Kernel {
        match k {
            KernelArg::Bump => Kernel::Bump,
            KernelArg::Gaussian => Kernel::Gaussian,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve the single point charge at the origin exactly.
    Bion {
        /// Charge intensity (4 pi gives the unit-moment solution in R^3).
        #[arg(long, default_value_t = 4.0 * std::f64::consts::PI)]
        a: f64,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, default_value_t = 2048)]
        nodes: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "csv")]
        format: Format,
    },
    /// Solve a radially distributed charge via the first integral.
    SolveRadial {
        /// Charge description (delta:…, uniform-ball:…, radial-file:…).
        #[arg(long)]
        charge: String,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "csv")]
        format: Format,
    },
    /// Minimize the discrete energy on a box with zero boundary data.
    SolveGrid {
        #[arg(long)]
        charge: String,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        /// Half-width of the centered cubic box.
        #[arg(long, default_value_t = 8.0)]
        half_width: f64,
        /// Cells per axis.
        #[arg(long, default_value_t = 64)]
        cells: usize,
        /// Mollification width for point charges.
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, value_enum, default_value_t = KernelArg::Bump)]
        kernel: KernelArg,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output path: CSV axis slices, or the base of a .json/.f64 pair.
        #[arg(long)]
        out: PathBuf,
        /// csv for axis slices, json for the binary pair with JSON header.
        #[arg(long, default_value = "csv")]
        format: Format,
    },
    /// Series-cascade study against the exact radial solution.
    Cascade {
        #[arg(long)]
        charge: String,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        /// Comma-separated ascending orders, e.g. 1,2,4,8.
        #[arg(long, default_value = "1,2,4,8,16,32")]
        n: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "csv")]
        format: Format,
    },
    /// Solve the theta-truncated radial problem.
    Truncate {
        #[arg(long)]
        charge: String,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long)]
        theta: f64,
        #[arg(long, default_value_t = 2)]
        power: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "csv")]
        format: Format,
    },
    /// Mollification convergence study on the radial path.
    MollifyStudy {
        /// Point-charge description (delta:…); all charges at the origin.
        #[arg(long)]
        charge: String,
        #[arg(long, default_value = "0.4,0.2,0.1,0.05")]
        eps: String,
        #[arg(long, value_enum, default_value_t = KernelArg::Bump)]
        kernel: KernelArg,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "csv")]
        format: Format,
    },
    /// Fixed-point solve of the matter-coupled potential equation.
    Bikg {
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        /// Support radius of the unit-mass matter bump.
        #[arg(long, default_value_t = 1.0)]
        bump_radius: f64,
        #[arg(long, default_value_t = 0.5)]
        damping: f64,
        #[arg(long, default_value_t = 200)]
        max_iter: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Iterate history (k, residual, eu).
        #[arg(long)]
        out: PathBuf,
        /// Optional converged potential table.
        #[arg(long)]
        phi_out: Option<PathBuf>,
        #[arg(long, default_value = "csv")]
        format: Format,
    },
    /// Run the property suites; exits nonzero on any violation.
    Check {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn log_level() -> u8 {
    match std::env::var("BIL_LOG").as_deref() {
        Ok("debug") => 2,
        Ok("info") => 1,
        _ => 0,
    }
}

fn info(msg: impl AsRef<str>) {
    if log_level() >= 1 {
        eprintln!("[bil] {}", msg.as_ref());
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => {}
        Err(msg) => {
            eprintln!("error: {msg}");
            std::process::exit(1);
        }
    }
}

fn radial_table(phi: &bil_core::RadialPotential, m: &[f64], residual: Option<&[f64]>) -> Table {
    let mut t = if residual.is_some() {
        Table::new(&["r", "phi", "dphi", "m", "residual"])
    } else {
        Table::new(&["r", "phi", "dphi", "m"])
    };
    for i in 0..phi.r_grid.len() {
        let mut row = vec![phi.r_grid[i], phi.phi[i], phi.dphi[i], m[i]];
        if let Some(res) = residual {
            row.push(res[i]);
        }
        t.push(row);
    }
    t
}

fn run(command: Command) -> Result<(), String> {
    match command {
        Command::Bion {
            a,
            dim,
            nodes,
            out,
            format,
        } => {
            let rho = ChargeSpec::PointCharges(
                PointSet::origin(dim, a).map_err(|e| e.to_string())?,
            );
            let mut grid = vec![0.0];
            grid.extend(geometric_grid(1e-6, 1e3, nodes));
            let phi = radial::solve_radial(&rho, &grid).map_err(|e| e.to_string())?;
            let mom = cumulative_moment(&rho, &phi.r_grid).map_err(|e| e.to_string())?;
            let residual: Vec<f64> = phi
                .r_grid
                .iter()
                .zip(&phi.dphi)
                .zip(&mom.m)
                .map(|((&r, &u), &m)| {
                    if r == 0.0 {
                        0.0
                    } else {
                        let rp = r.powi(dim as i32 - 1);
                        (u + m / f64::hypot(m, rp)).abs()
                    }
                })
                .collect();
            let fir = first_integral_residual(&phi, &mom);
            info(format!(
                "bion solved: phi(0) = {:.12}, first-integral residual {:.3e}",
                phi.value_at(0.0),
                fir.inverted_form.max(fir.flux_form)
            ));
            let t = radial_table(&phi, &mom.m, Some(&residual))
                .with_meta("dim", dim)
                .with_meta("a", table::fmt_f64(a));
            t.write(&out, format).map_err(|e| e.to_string())
        }

        Command::SolveRadial {
            charge,
            dim,
            nodes,
            config,
            out,
            format,
        } => {
            let cfg = config
                .map(|p| Config::load(&p))
                .transpose()?
                .unwrap_or_default();
            let rho = parse_charge(&charge, dim)?;
            let nodes = match nodes {
                Some(n) => Some(n),
                None => cfg.get_usize("nodes")?,
            };
            let grid = match nodes {
                Some(n) => {
                    let scale = rho.support_scale();
                    let base = geometric_grid(1e-6 * scale, 1e3 * scale, n);
                    merge_grids(&base, &[0.0])
                }
                None => radial::default_r_grid(&rho),
            };
            let phi = radial::solve_radial(&rho, &grid).map_err(|e| e.to_string())?;
            let mom = cumulative_moment(&rho, &phi.r_grid).map_err(|e| e.to_string())?;
            info(format!(
                "solved on {} nodes, phi(0) = {:.12}, m_inf = {:.12}",
                phi.r_grid.len(),
                phi.value_at(0.0),
                mom.m_infinity
            ));
            let t = radial_table(&phi, &mom.m, None).with_meta("dim", dim);
            t.write(&out, format).map_err(|e| e.to_string())
        }

        Command::SolveGrid {
            charge,
            dim,
            half_width,
            cells,
            epsilon,
            kernel,
            config,
            out,
            format,
        } => {
            let cfg = config
                .map(|p| Config::load(&p))
                .transpose()?
                .unwrap_or_default();
            let half_width = cfg.get_f64("half_width")?.unwrap_or(half_width);
            let cells = cfg.get_usize("cells")?.unwrap_or(cells);
            let epsilon = match epsilon {
                Some(e) => Some(e),
                None => cfg.get_f64("epsilon")?,
            };
            let mut rho = parse_charge(&charge, dim)?;
            if let ChargeSpec::PointCharges(points) = &rho {
                let eps = epsilon.ok_or(
                    "point charges need --epsilon to be mollified before a grid solve",
                )?;
                rho = ChargeSpec::mollified(points.clone(), eps, kernel.into())
                    .map_err(|e| e.to_string())?;
            }
            let geom =
                GridGeom::centered_cube(dim, half_width, cells).map_err(|e| e.to_string())?;
            let params = GridSolveParams::default();
            let (phi, report) =
                grid::solve_grid(&rho, &geom, &params).map_err(|e| e.to_string())?;
            info(format!(
                "energy {:.10}, max |grad| {:.6}, {} newton steps, notes: {}",
                report.energy, report.max_grad, report.iterations, report.wall_notes
            ));
            match format {
                Format::Json => {
                    gridio::write_potential(&out, &phi)?;
                    info(format!(
                        "wrote {} and {}",
                        gridio::header_path(&out).display(),
                        gridio::data_path(&out).display()
                    ));
                }
                Format::Csv => {
                    let mut t = Table::new(&["axis", "index", "coord", "phi", "grad_mag"])
                        .with_meta("energy", table::fmt_f64(report.energy))
                        .with_meta("max_grad", table::fmt_f64(report.max_grad))
                        .with_meta("iterations", report.iterations)
                        .with_meta("notes", &report.wall_notes);
                    let mid = cells / 2;
                    for axis in 0..dim {
                        for i in 0..=cells {
                            let mut idx = vec![mid; dim];
                            idx[axis] = i;
                            let flat = geom.flat_index(&idx);
                            let x = geom.node_position(&idx);
                            let g = phi.gradient_at(&x).unwrap_or_else(|_| vec![0.0; dim]);
                            let gmag = g.iter().map(|v| v * v).sum::<f64>().sqrt();
                            t.push(vec![
                                axis as f64,
                                i as f64,
                                x[axis],
                                phi.values[flat],
                                gmag,
                            ]);
                        }
                    }
                    t.write(&out, Format::Csv).map_err(|e| e.to_string())?;
                }
            }
            Ok(())
        }

        Command::Cascade {
            charge,
            dim,
            n,
            out,
            format,
        } => {
            let rho = parse_charge(&charge, dim)?;
            let orders = parse_usize_list(&n)?;
            let rows = approx::cascade_study(&rho, &orders, &radial::default_r_grid(&rho))
                .map_err(|e| e.to_string())?;
            let mut t = Table::new(&["n", "energy", "sup_distance", "max_slope"]);
            for row in &rows {
                t.push(vec![
                    row.n as f64,
                    row.energy,
                    row.sup_distance,
                    row.max_slope,
                ]);
            }
            info(format!("cascade over {} orders", rows.len()));
            t.write(&out, format).map_err(|e| e.to_string())
        }

        Command::Truncate {
            charge,
            dim,
            theta,
            power,
            out,
            format,
        } => {
            let rho = parse_charge(&charge, dim)?;
            let (gamma, delta) = truncation_match(theta, power).map_err(|e| e.to_string())?;
            let phi =
                approx::solve_radial_truncated(&rho, theta, power, &radial::default_r_grid(&rho))
                    .map_err(|e| e.to_string())?;
            let mom = cumulative_moment(&rho, &phi.r_grid).map_err(|e| e.to_string())?;
            if phi.max_abs_slope() > 1.0 {
                info(format!(
                    "truncated branch active: max |phi'| = {:.6} exceeds 1",
                    phi.max_abs_slope()
                ));
            }
            let t = radial_table(&phi, &mom.m, None)
                .with_meta("theta", table::fmt_f64(theta))
                .with_meta("power", power)
                .with_meta("gamma", table::fmt_f64(gamma))
                .with_meta("delta", table::fmt_f64(delta))
                .with_meta("max_slope", table::fmt_f64(phi.max_abs_slope()));
            t.write(&out, format).map_err(|e| e.to_string())
        }

        Command::MollifyStudy {
            charge,
            eps,
            kernel,
            out,
            format,
        } => {
            let rho = parse_charge(&charge, 3)?;
            let points = match rho {
                ChargeSpec::PointCharges(p) => p,
                _ => return Err("mollify-study needs a delta charge description".into()),
            };
            let eps_list = parse_f64_list(&eps)?;
            let rows = mollify::convergence_study_radial(&points, &eps_list, kernel.into())
                .map_err(|e| e.to_string())?;
            let mut t = Table::new(&["epsilon", "sup_distance", "max_grad_near_charge", "energy"]);
            for row in &rows {
                t.push(vec![
                    row.epsilon,
                    row.sup_distance,
                    row.max_grad_near_charge,
                    row.energy,
                ]);
            }
            t.write(&out, format).map_err(|e| e.to_string())
        }

        Command::Bikg {
            omega,
            bump_radius,
            damping,
            max_iter,
            tol,
            config,
            out,
            phi_out,
            format,
        } => {
            let cfg = config
                .map(|p| Config::load(&p))
                .transpose()?
                .unwrap_or_default();
            let omega = cfg.get_f64("omega")?.unwrap_or(omega);
            let damping = cfg.get_f64("damping")?.unwrap_or(damping);
            let u =
                bikg::unit_mass_bump(3, bump_radius, 257).map_err(|e| e.to_string())?;
            let mut grid = vec![0.0];
            grid.extend(geometric_grid(1e-6, 1e3, 1024));
            let outcome = bikg::solve_bikg_phi(&u, omega, &grid, damping, max_iter, tol)
                .map_err(|e| e.to_string())?;
            info(format!(
                "converged in {} iterations, residual {:.3e}",
                outcome.iterations, outcome.residual
            ));
            let mut t = Table::new(&["k", "residual", "eu"])
                .with_meta("omega", table::fmt_f64(omega))
                .with_meta("damping", table::fmt_f64(damping));
            for it in &outcome.history {
                t.push(vec![it.k as f64, it.residual, it.energy]);
            }
            t.write(&out, format).map_err(|e| e.to_string())?;
            if let Some(path) = phi_out {
                let phi = &outcome.potential;
                let mut pt = Table::new(&["r", "phi", "dphi"]);
                for i in 0..phi.r_grid.len() {
                    pt.push(vec![phi.r_grid[i], phi.phi[i], phi.dphi[i]]);
                }
                pt.write(&path, format).map_err(|e| e.to_string())?;
            }
            Ok(())
        }

        Command::Check { suite, seed } => {
            let suite: Suite = suite.parse().map_err(|e: bil_core::Error| e.to_string())?;
            let results = run_suite(suite, seed);
            let mut failed = 0;
            for r in &results {
                if r.passed {
                    println!("ok   {:<28} {}", r.name, r.detail);
                } else {
                    println!("FAIL {:<28} {}", r.name, r.detail);
                    failed += 1;
                }
            }
            println!("{} checks, {} failed", results.len(), failed);
            if failed > 0 {
                return Err(format!("{failed} property checks failed"));
            }
            Ok(())
        }
    }
}
