use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use vortex_wigner::config::Config;
use vortex_wigner::io::{export_grid, format_value, ordered_map, thread_count, GridSpec, CSV_HEADER};
use vortex_wigner::observables::{moment_sweep, MomentSource};
use vortex_wigner::oracle::{marginal_numeric, wigner_oracle_scalar, Marginal};
use vortex_wigner::verify::{self, Suite};
use vortex_wigner::wigner::{marginal_p_alt, marginal_p_closed, marginal_x_closed, wigner_closed};
use vortex_wigner::{Exponent, PhasePoint, WignerForm};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

/// Laguerre-Gaussian vortex packets and their Wigner functions.
#[derive(Debug, Parser)]
#[command(name = "vortex-wigner", version)]
struct Cli {
    #[command(flatten)]
    params: Params,
    #[command(subcommand)]
    command: Command,
}

/// Packet parameters. Flags win over the config file.
#[derive(Debug, Args)]
struct Params {
    /// Flat `key = value` config file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    mass: Option<f64>,
    #[arg(long, global = true)]
    sigma_over_m: Option<f64>,
    #[arg(long, global = true)]
    pbar_over_m: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    ell: Option<i32>,
    #[arg(long, global = true)]
    n_r: Option<u32>,
    /// Any config key, e.g. `--set oracle.order=64`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form Wigner function on a grid, as CSV plus a JSON sidecar.
    Eval {
        #[arg(long, default_value = "momentum")]
        form: Form,
        #[arg(long, value_name = "SPEC")]
        grid: GridSpec,
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
    /// Brute-force Wigner integral on a grid, next to the closed form.
    Oracle {
        #[arg(long, default_value = "momentum")]
        form: Form,
        #[arg(long, value_name = "SPEC")]
        grid: GridSpec,
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
    /// Numeric marginal of a closed form at each grid point.
    Marginal {
        #[arg(long, default_value = "momentum")]
        form: Form,
        /// Integrate over positions (x) or momenta (p).
        #[arg(long, default_value = "x")]
        over: Over,
        #[arg(long, value_name = "SPEC")]
        grid: GridSpec,
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
    /// Mean radius, mean transverse momentum and their product over a range of ℓ.
    Observables {
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        ell_min: i32,
        #[arg(long, default_value_t = 10, allow_negative_numbers = true)]
        ell_max: i32,
        /// Moments from the wave-function densities or from a Wigner form's marginals.
        #[arg(long, default_value = "densities")]
        source: Source,
        /// Defaults to stdout.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Runs verification checks and optionally writes a JSON report.
    Verify {
        #[arg(long, default_value = "all")]
        suite: Suite,
        #[arg(long, value_name = "PATH")]
        report: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Form {
    Momentum,
    Position,
    Symmetric,
}

impl From<Form> for WignerForm {
    fn from(f: Form) -> Self {
        match f {
            Form::Momentum => WignerForm::Momentum,
            Form::Position => WignerForm::Position,
            Form::Symmetric => WignerForm::Symmetric,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Over {
    X,
    P,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Source {
    Densities,
    Momentum,
    Position,
    Symmetric,
}

impl From<Source> for MomentSource {
    fn from(s: Source) -> Self {
        match s {
            Source::Densities => MomentSource::Densities,
            Source::Momentum => MomentSource::Wigner(WignerForm::Momentum),
            Source::Position => MomentSource::Wigner(WignerForm::Position),
            Source::Symmetric => MomentSource::Wigner(WignerForm::Symmetric),
        }
    }
}

enum Failure {
    Usage(String),
    Checks(String),
}

impl From<vortex_wigner::Error> for Failure {
    fn from(e: vortex_wigner::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn load_config(params: &Params) -> Result<Config, Failure> {
    let mut cfg = match &params.config {
        Some(path) => {
            Config::load(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
        }
        None => Config::default(),
    };
    let flags = [
        ("mass", params.mass.map(|v| v.to_string())),
        ("sigma_over_m", params.sigma_over_m.map(|v| v.to_string())),
        ("pbar_over_m", params.pbar_over_m.map(|v| v.to_string())),
        ("ell", params.ell.map(|v| v.to_string())),
        ("n_r", params.n_r.map(|v| v.to_string())),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, &v).map_err(Failure::Usage)?;
        }
    }
    for kv in &params.overrides {
        let (k, v) = kv.split_once('=').ok_or_else(|| Failure::Usage(format!("expected KEY=VALUE, got `{kv}`")))?;
        cfg.set(k.trim(), v.trim()).map_err(Failure::Usage)?;
    }
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(cfg)
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn point_columns(p: &PhasePoint) -> Vec<String> {
    [p.rho, p.phi_r, p.z, p.p_perp, p.phi_p, p.p_z, p.t].iter().map(|&c| format_value(c)).collect()
}

fn write_rows(path: &Path, header: &str, rows: &[Vec<String>]) -> Result<(), Failure> {
    let mut w = create(path)?;
    let io = |e: std::io::Error| Failure::Usage(format!("cannot write {}: {e}", path.display()));
    writeln!(w, "{header}").map_err(io)?;
    for row in rows {
        writeln!(w, "{}", row.join(",")).map_err(io)?;
    }
    w.flush().map_err(io)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = load_config(&cli.params)?;
    let threads = thread_count();
    if let Some(n) = threads {
        // a second call fails only if a pool already exists, which is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match cli.command {
        Command::Eval { form, grid, out } => {
            let meta = export_grid(&cfg, &grid, form.into(), &out, threads)?;
            eprintln!("wrote {} rows to {}", meta.rows, out.display());
        }
        Command::Oracle { form, grid, out } => {
            let spec = cfg.spec()?;
            let points = grid.points(&spec);
            let results = ordered_map(&points, threads, |pt| wigner_oracle_scalar(&spec, pt, &cfg.oracle))?;
            let mut failed = 0;
            let rows: Vec<Vec<String>> = points
                .iter()
                .zip(results)
                .map(|(pt, res)| {
                    let mut row = point_columns(pt);
                    let closed = wigner_closed(&spec, pt, form.into());
                    match res {
                        Ok(v) => {
                            row.extend([v.value, v.imag, v.error_estimate, v.order as f64, closed].map(format_value));
                            if !v.converged {
                                failed += 1;
                            }
                        }
                        Err(e) => {
                            eprintln!("oracle failed at {pt:?}: {e}");
                            failed += 1;
                            row.extend([f64::NAN, f64::NAN, f64::NAN, f64::NAN, closed].map(format_value));
                        }
                    }
                    row
                })
                .collect();
            write_rows(&out, &format!("{CSV_HEADER},imag,error_estimate,order,closed_form"), &rows)?;
            if failed > 0 {
                return Err(Failure::Checks(format!("{failed} of {} oracle points did not converge", rows.len())));
            }
        }
        Command::Marginal { form, over, grid, out } => {
            let spec = cfg.spec()?;
            let form: WignerForm = form.into();
            let points = grid.points(&spec);
            let results = ordered_map(&points, threads, |pt| {
                let (which, reference) = match over {
                    Over::X => {
                        let p = pt.momentum();
                        let r = (form == WignerForm::Momentum).then(|| marginal_x_closed(&spec, p));
                        (Marginal::OverX(p), r)
                    }
                    Over::P => {
                        let r = pt.position();
                        let reference = match form {
                            _ if pt.t != 0.0 => None,
                            WignerForm::Momentum => Some(marginal_p_closed(&spec, r)),
                            WignerForm::Position => Some(marginal_p_alt(&spec, r)),
                            WignerForm::Symmetric => None,
                        };
                        (Marginal::OverP(r), reference)
                    }
                };
                marginal_numeric(&spec, which, pt.t, form, Exponent::default(), &cfg.oracle)
                    .map(|v| (v, reference.unwrap_or(f64::NAN)))
            })?;
            let mut rows = Vec::with_capacity(points.len());
            for (pt, res) in points.iter().zip(results) {
                let (v, reference) = res?;
                let mut row = point_columns(pt);
                row.extend([v.value, v.error_estimate, reference].map(format_value));
                rows.push(row);
            }
            write_rows(&out, &format!("{CSV_HEADER},error_estimate,reference"), &rows)?;
        }
        Command::Observables { ell_min, ell_max, source, out } => {
            if ell_min > ell_max {
                return Err(Failure::Usage(format!("empty ℓ range {ell_min}..={ell_max}")));
            }
            let spec = cfg.spec()?;
            let ells: Vec<i32> = (ell_min..=ell_max).collect();
            let reports = moment_sweep(&spec, &ells, source.into())?;
            let rows: Vec<Vec<String>> = reports
                .iter()
                .map(|r| {
                    let per_l = if r.ell == 0 { f64::NAN } else { r.product / r.ell.unsigned_abs() as f64 };
                    let mut row = vec![r.ell.to_string()];
                    row.extend([r.mean_rho, r.mean_pperp, r.product, per_l].map(format_value));
                    row
                })
                .collect();
            let header = "ell,mean_rho,mean_pperp,product,product_per_l";
            match out {
                Some(path) => write_rows(&path, header, &rows)?,
                None => {
                    println!("{header}");
                    for row in &rows {
                        println!("{}", row.join(","));
                    }
                }
            }
        }
        Command::Verify { suite, report } => {
            let rep = verify::run(&cfg, suite);
            for r in &rep.records {
                println!(
                    "{} {} measured={} target={} tol={} ({:.2}s){}",
                    if r.pass { "PASS" } else { "FAIL" },
                    r.id,
                    format_value(r.measured),
                    format_value(r.target),
                    format_value(r.tolerance),
                    r.runtime_s,
                    if r.note.is_empty() { String::new() } else { format!(" [{}]", r.note) },
                );
            }
            println!("{}: {} passed, {} failed", rep.suite.name(), rep.passed, rep.failed);
            if let Some(path) = report {
                rep.write_json(&path)?;
            }
            if !rep.all_pass {
                return Err(Failure::Checks(format!("{} check(s) failed", rep.failed)));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(EXIT_CHECK_FAILED)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
