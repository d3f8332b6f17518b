//! Command-line front end: constants, kernel tables, solver tables and the
//! named checks and suites.
//!
//! Exit codes: 0 when every reported check passes, 1 when some check fails,
//! 2 on usage, domain or I/O errors.

use crate::constants::constants_report;
use crate::error::{MathError, Result};
use crate::extension::{ExtensionSolution, InitialData, Route};
use crate::group_core::{log_grid, BiRadialProfile, GroupParams};
use crate::kernels::{KernelKind, KernelSpec};
use crate::report::CheckReport;
use crate::special_math::QuadratureConfig;
use crate::spectral::SpectralConfig;
use crate::suite::{self, Params, CHECKS, SUITES};
use clap::{Args, Parser, Subcommand};
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "htype-ext", version, about = "Extension problem and Hardy inequalities on H-type groups")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Half the dimension of the horizontal layer.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Dimension of the centre.
    #[arg(long, global = true)]
    m: Option<usize>,
    /// Fractional order.
    #[arg(long, global = true, allow_negative_numbers = true)]
    s: Option<f64>,
    #[arg(long, global = true)]
    rho: Option<f64>,
    #[arg(long, global = true)]
    delta: Option<f64>,
    #[arg(long, global = true)]
    ell: Option<usize>,
    /// Overrides the tolerance of every reported check.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for randomized test points.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Smaller grids and doubled tolerances.
    #[arg(long, global = true)]
    quick: bool,
    /// TOML file presetting any of n, m, s, rho, delta, ell, seed, quick, tol.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Constants c1, c2, c3, dtn, limit2 and friends as JSON.
    Constants,
    /// Tabulate a kernel on a log-spaced (r, ζ) grid from 10⁻³·max to max as CSV.
    Kernel {
        /// phi, Phi, K, poisson, heat_q, heat_p, weight_w, g, h
        #[arg(long, default_value = "phi")]
        kind: String,
        #[arg(long, default_value_t = 0)]
        j: usize,
        #[arg(long, default_value_t = 4.0)]
        r_max: f64,
        #[arg(long, default_value_t = 4.0)]
        zeta_max: f64,
        #[arg(long, default_value_t = 9)]
        points: usize,
    },
    /// Solve the extension problem and write u on an (r, ζ, ρ) grid as CSV.
    Solve {
        /// Initial profile CSV (with its .json header alongside); a Gaussian otherwise.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Gaussian data e^{−a|v|²−b|z|²} as "a,b" when no input is given.
        #[arg(long, default_value = "1,1")]
        gaussian: String,
        /// convolution, spectral or heat
        #[arg(long, default_value = "spectral")]
        route: String,
        #[arg(long, default_value_t = 2.0)]
        r_max: f64,
        #[arg(long, default_value_t = 2.0)]
        zeta_max: f64,
        #[arg(long, default_value_t = 5)]
        points: usize,
        /// Comma-separated ρ values; --rho alone otherwise.
        #[arg(long)]
        rhos: Option<String>,
    },
    /// DtN limit against dtn_constant·ℒ_sf (JSON reports).
    Dtn,
    /// Order-ℓ limit against C1·C2⁻¹·a(n,m,s)·ℒ_sf (JSON reports).
    Higher,
    /// Run one named check at the given parameters.
    Check {
        name: String,
    },
    /// Run a named suite, or `all`.
    Suite {
        name: String,
    },
    /// List checks and suites.
    List,
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

#[derive(serde::Deserialize, Default, Debug)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    n: Option<usize>,
    m: Option<usize>,
    s: Option<f64>,
    rho: Option<f64>,
    delta: Option<f64>,
    ell: Option<usize>,
    seed: Option<u64>,
    quick: Option<bool>,
    tol: Option<f64>,
}

fn resolve(c: &Common) -> Result<(Params, Option<f64>)> {
    let file = match &c.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| MathError::Format(format!("{}: {e}", path.display())))?;
            toml::from_str::<FileConfig>(&text).map_err(|e| MathError::Format(format!("{}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };
    let d = Params::default();
    let p = Params {
        n: c.n.or(file.n).unwrap_or(d.n),
        m: c.m.or(file.m).unwrap_or(d.m),
        s: c.s.or(file.s).unwrap_or(d.s),
        rho: c.rho.or(file.rho).unwrap_or(d.rho),
        delta: c.delta.or(file.delta).unwrap_or(d.delta),
        ell: c.ell.or(file.ell).unwrap_or(d.ell),
        seed: c.seed.or(file.seed).unwrap_or(d.seed),
        quick: c.quick || file.quick.unwrap_or(false),
    };
    if p.n == 0 || p.m == 0 {
        return Err(MathError::Domain("n and m must be at least 1".into()));
    }
    if !p.s.is_finite() || !(p.rho > 0.0) || !(p.delta > 0.0) {
        return Err(MathError::Domain("s must be finite, rho and delta positive".into()));
    }
    let tol = c.tol.or(file.tol);
    if let Some(t) = tol {
        if !(t >= 0.0) {
            return Err(MathError::Domain("tol must be nonnegative".into()));
        }
    }
    Ok((p, tol))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| MathError::Format(format!("{}: {e}", path.display()))),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes()).and_then(|_| so.flush()).map_err(|e| MathError::Format(e.to_string()))
        }
    }
}

fn emit_reports(out: &Option<PathBuf>, mut reports: Vec<CheckReport>) -> Result<i32> {
    reports.sort_by(|a, b| a.name.cmp(&b.name));
    let text = serde_json::to_string_pretty(&reports).map_err(|e| MathError::Format(e.to_string()))?;
    emit(out, &(text + "\n"))?;
    let failed = reports.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        eprintln!("{failed} of {} checks failed", reports.len());
        Ok(1)
    } else {
        Ok(0)
    }
}

fn grid(max: f64, points: usize) -> Vec<f64> {
    (0..points).map(|i| max * i as f64 / (points.max(2) - 1) as f64).collect()
}

fn execute(cli: &Cli) -> Result<i32> {
    let (p, tol) = resolve(&cli.common)?;
    let out = &cli.common.out;
    match &cli.command {
        Command::Constants => {
            let text = serde_json::to_string_pretty(&constants_report(p.n, p.m, p.s)).map_err(|e| MathError::Format(e.to_string()))?;
            emit(out, &(text + "\n"))?;
            Ok(0)
        }
        Command::Kernel { kind, j, r_max, zeta_max, points } => {
            let kind: KernelKind = kind.parse().map_err(MathError::Domain)?;
            let spec = KernelSpec::new(kind, p.n, p.m, p.s, p.rho)?.with_index(*j, p.ell)?;
            let group = GroupParams::from_shape(p.n, p.m).or_else(|_| GroupParams::heisenberg(p.n))?;
            let cfg = QuadratureConfig::default().with_tol(tol.unwrap_or(1e-8), 0.0);
            if *points < 4 || !(*r_max > 0.0) || !(*zeta_max > 0.0) {
                return Err(MathError::Domain("kernel tables need --points >= 4 and positive --r-max, --zeta-max".into()));
            }
            // profiles live on positive log-spaced grids
            let table = spec.tabulate(&group, log_grid(1e-3 * r_max, *r_max, *points), log_grid(1e-3 * zeta_max, *zeta_max, *points), &cfg)?;
            emit(out, &table.to_csv()?)?;
            Ok(0)
        }
        Command::Solve { input, gaussian, route, r_max, zeta_max, points, rhos } => {
            let route: Route = route.parse()?;
            let data = match input {
                Some(path) => InitialData::Profile(BiRadialProfile::load(path)?),
                None => {
                    let ab: Vec<f64> = gaussian
                        .split(',')
                        .map(|x| x.trim().parse::<f64>().map_err(|e| MathError::Domain(format!("--gaussian: {e}"))))
                        .collect::<Result<_>>()?;
                    if ab.len() != 2 {
                        return Err(MathError::Domain("--gaussian takes a,b".into()));
                    }
                    InitialData::gaussian(ab[0], ab[1])?
                }
            };
            let rhos: Vec<f64> = match rhos {
                Some(list) => list
                    .split(',')
                    .map(|x| x.trim().parse::<f64>().map_err(|e| MathError::Domain(format!("--rhos: {e}"))))
                    .collect::<Result<_>>()?,
                None => vec![p.rho],
            };
            let qcfg = QuadratureConfig::default().with_tol(tol.unwrap_or(1e-8), 0.0);
            let scfg = if p.quick { SpectralConfig::quick() } else { SpectralConfig::default() };
            let group = GroupParams::from_shape(p.n, p.m)?;
            let u = match route {
                Route::Spectral => ExtensionSolution::solve_spectral(p.n, data, p.s, &scfg, &qcfg)?,
                Route::Convolution => ExtensionSolution::solve_convolution(&group, data, p.s, &qcfg)?,
                Route::HeatSemigroup => ExtensionSolution::solve_heat_semigroup(&group, data, p.s, &qcfg)?,
            };
            let pts: Vec<(f64, f64)> =
                grid(*r_max, *points).into_iter().flat_map(|r| grid(*zeta_max, *points).into_iter().map(move |z| (r, z))).collect();
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["r", "zeta", "rho", "u"]).map_err(|e| MathError::Format(e.to_string()))?;
            for rho in rhos {
                let vals = u.eval_many(&pts, rho)?;
                for (&(r, z), v) in pts.iter().zip(vals) {
                    w.serialize((r, z, rho, v)).map_err(|e| MathError::Format(e.to_string()))?;
                }
            }
            let bytes = w.into_inner().map_err(|e| MathError::Format(e.to_string()))?;
            emit(out, &String::from_utf8_lossy(&bytes))?;
            Ok(0)
        }
        Command::Dtn => emit_reports(out, suite::run_check("dtn", &p, tol)?),
        Command::Higher => emit_reports(out, suite::run_check("higher-order", &p, tol)?),
        Command::Check { name } => emit_reports(out, suite::run_check(name, &p, tol)?),
        Command::Suite { name } => emit_reports(out, suite::run_suite(name, &p, tol)?),
        Command::List => {
            let mut text = String::from("checks:\n");
            for c in CHECKS {
                text.push_str(&format!("  {:<22} tol {:<8e} {}\n", c.name, c.tol, c.about));
            }
            text.push_str("suites (plus `all`):\n");
            for s in SUITES {
                text.push_str(&format!("  {:<22} tol {:<8e} {}\n", s.name, s.tol, s.about));
            }
            emit(out, &text)?;
            Ok(0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp(name: &str) -> PathBuf {
        std::env::temp_dir().join(format!("htype-ext-cli-{}-{name}", std::process::id()))
    }

    #[test]
    fn constants_json() {
        let path = tmp("constants.json");
        let code = run(["htype-ext", "constants", "--n", "1", "--m", "1", "--s", "0.5", "--out", path.to_str().unwrap()]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        for key in ["c1", "c2", "c3", "dtn", "limit2"] {
            assert!(v[key].as_f64().unwrap() > 0.0, "{key}");
        }
        assert!((v["dtn"].as_f64().unwrap() - 1.0).abs() < 1e-14);
        let _ = std::fs::remove_file(path);
    }

    #[test]
    fn phi_mass_check_passes() {
        let path = tmp("mass.json");
        assert_eq!(run(["htype-ext", "check", "phi-mass", "--n", "1", "--m", "1", "--s", "0.5", "--out", path.to_str().unwrap()]), 0);
        let v: Vec<serde_json::Value> = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0]["pass"], true);
        let _ = std::fs::remove_file(path);
    }

    #[test]
    fn failing_check_and_usage_errors() {
        let path = tmp("fail.json");
        // an impossible tolerance makes the check fail
        assert_eq!(run(["htype-ext", "check", "phi-mass", "--tol", "0", "--s", "0.3", "--out", path.to_str().unwrap()]), 1);
        assert_eq!(run(["htype-ext", "check", "no-such-check"]), 2);
        assert_eq!(run(["htype-ext", "frobnicate"]), 2);
        assert_eq!(run(["htype-ext", "constants", "--n", "0"]), 2);
        assert_eq!(run(["htype-ext", "check", "phi-mass", "--rho", "-1"]), 2);
        let _ = std::fs::remove_file(path);
    }

    #[test]
    fn config_file_presets_and_flags_override() {
        let cfg = tmp("cfg.toml");
        std::fs::write(&cfg, "n = 2\ns = 0.25\nseed = 3\n").unwrap();
        let cli = Cli::try_parse_from(["htype-ext", "--config", cfg.to_str().unwrap(), "--s", "0.75", "constants"]).unwrap();
        let (p, tol) = resolve(&cli.common).unwrap();
        assert_eq!((p.n, p.m, p.s, p.seed, tol), (2, 1, 0.75, 3, None));
        std::fs::write(&cfg, "bogus = 1\n").unwrap();
        let cli = Cli::try_parse_from(["htype-ext", "--config", cfg.to_str().unwrap(), "constants"]).unwrap();
        assert!(resolve(&cli.common).is_err());
        let _ = std::fs::remove_file(cfg);
    }

    #[test]
    fn kernel_and_solve_tables() {
        let path = tmp("kernel.csv");
        assert_eq!(run(["htype-ext", "kernel", "--kind", "phi", "--points", "4", "--out", path.to_str().unwrap()]), 0);
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 17);
        assert_eq!(run(["htype-ext", "kernel", "--points", "3"]), 2);
        assert_eq!(run(["htype-ext", "kernel", "--r-max", "0"]), 2);
        assert_eq!(run(["htype-ext", "solve", "--quick", "--points", "2", "--rhos", "0.5,1", "--out", path.to_str().unwrap()]), 0);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("r,zeta,rho,u"));
        assert_eq!(text.lines().count(), 9);
        let _ = std::fs::remove_file(path);
    }

    #[test]
    fn output_is_deterministic_for_a_seed() {
        let a = tmp("seed-a.json");
        let b = tmp("seed-b.json");
        for p in [&a, &b] {
            assert_eq!(run(["htype-ext", "check", "oscillatory", "--quick", "--seed", "5", "--out", p.to_str().unwrap()]), 0);
        }
        assert_eq!(std::fs::read_to_string(&a).unwrap(), std::fs::read_to_string(&b).unwrap());
        let _ = std::fs::remove_file(a);
        let _ = std::fs::remove_file(b);
    }
}
