//! Command-line front end.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::harness::{appendix_b_stokes, fit_params, run_compare, AsymParams, Preset};
use crate::io::{read_trajectory, write_grid, write_poles, write_trajectory};
use crate::ode::{integrate, IntegratorConfig, PoleData, Start, State, Trajectory};
use crate::stokes::{
    classify_s2, constraint_residual, invert_osc, invert_sing, osc_params, sing_params, SolutionClass,
    DEFAULT_CLASSIFY_TOL,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "painleve", version, about = "Real solutions of y'' = 6y² + x")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify a solution by its Stokes multiplier s2.
    Classify {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        s2: Complex64,
    },
    /// Asymptotic constants from s2.
    Params {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        s2: Complex64,
    },
    /// Integrate from initial data or from a pole.
    Integrate(IntegrateArgs),
    /// Integrate a reference solution and compare it with its asymptotics.
    Compare(CompareArgs),
    /// Predicted pole locations of a singular solution.
    Poles {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        s2: Complex64,
        /// Index range LO..HI (inclusive).
        #[arg(long, value_parser = parse_range)]
        n: (i64, i64),
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recover asymptotic constants from a trajectory CSV.
    Fit {
        #[arg(long)]
        traj: PathBuf,
        #[arg(long, value_enum)]
        class: FitClass,
        /// Argument of s2 used when inverting the fitted constants.
        #[arg(long, allow_hyphen_values = true)]
        arg_s2: Option<f64>,
    },
    /// Multipliers of the pole-at-origin solution from its connection matrices.
    AppendixB,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FitClass {
    Osc,
    Sing,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PresetName {
    ZeroIc,
    ZeroPole,
}

#[derive(Debug, Args)]
struct ConfigArgs {
    /// key=value file overriding the integrator defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    rtol: Option<f64>,
    #[arg(long)]
    atol: Option<f64>,
}

#[derive(Debug, Args)]
struct IntegrateArgs {
    #[arg(long, allow_hyphen_values = true, requires = "dy0", conflicts_with_all = ["pole_p", "pole_h"])]
    y0: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "y0")]
    dy0: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "pole_h")]
    pole_p: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "pole_p")]
    pole_h: Option<f64>,
    /// Starting abscissa for --y0/--dy0.
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    x0: f64,
    #[arg(long, allow_hyphen_values = true)]
    x_end: f64,
    #[command(flatten)]
    cfg: ConfigArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    poles_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[arg(long, value_enum)]
    preset: PresetName,
    #[arg(long, allow_hyphen_values = true)]
    x_min: f64,
    #[command(flatten)]
    cfg: ConfigArgs,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    grid_out: PathBuf,
    /// Trajectory CSV; defaults to the report path with extension `traj.csv`.
    #[arg(long)]
    traj_out: Option<PathBuf>,
}

fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("expected RE,IM, got `{s}`"))?;
    let re: f64 = re.trim().parse().map_err(|e| format!("real part: {e}"))?;
    let im: f64 = im.trim().parse().map_err(|e| format!("imaginary part: {e}"))?;
    if !(re.is_finite() && im.is_finite()) {
        return Err("components must be finite".into());
    }
    Ok(Complex64::new(re, im))
}

fn parse_range(s: &str) -> std::result::Result<(i64, i64), String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("expected LO..HI, got `{s}`"))?;
    let lo: i64 = lo.trim().parse().map_err(|e| format!("LO: {e}"))?;
    let hi: i64 = hi.trim().parse().map_err(|e| format!("HI: {e}"))?;
    if lo > hi {
        return Err("LO must not exceed HI".into());
    }
    Ok((lo, hi))
}

/// Integrator settings accepted in a `--config` file, one `key = value`
/// per line.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    rtol: Option<f64>,
    atol: Option<f64>,
    h_init: Option<f64>,
    y_detect: Option<f64>,
    fit_band_lo: Option<f64>,
    fit_band_hi: Option<f64>,
    restart_offset: Option<f64>,
    series_degree: Option<usize>,
    max_poles: Option<usize>,
}

/// Applies the `key = value` lines of `text` to `cfg`; `#` starts a comment.
pub fn apply_config_text(cfg: &mut IntegratorConfig, text: &str) -> std::result::Result<(), String> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| e.message().to_string())?;
    let set = |slot: &mut f64, v: Option<f64>| {
        if let Some(v) = v {
            *slot = v;
        }
    };
    set(&mut cfg.rtol, file.rtol);
    set(&mut cfg.atol, file.atol);
    set(&mut cfg.h_init, file.h_init);
    set(&mut cfg.y_detect, file.y_detect);
    set(&mut cfg.fit_band.0, file.fit_band_lo);
    set(&mut cfg.fit_band.1, file.fit_band_hi);
    set(&mut cfg.restart_offset, file.restart_offset);
    cfg.series_degree = file.series_degree.unwrap_or(cfg.series_degree);
    cfg.max_poles = file.max_poles.unwrap_or(cfg.max_poles);
    Ok(())
}

fn build_config(a: &ConfigArgs) -> std::result::Result<IntegratorConfig, String> {
    let mut cfg = IntegratorConfig::default();
    if let Some(path) = &a.config {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        apply_config_text(&mut cfg, &text)?;
    }
    if let Some(r) = a.rtol {
        cfg.rtol = r;
    }
    if let Some(t) = a.atol {
        cfg.atol = t;
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

enum Failure {
    Usage(String),
    Numeric(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Numeric(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Numeric(e.into())
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn print_json(out: &mut dyn Write, v: &Value) -> Result<()> {
    writeln!(
        out,
        "{}",
        serde_json::to_string_pretty(v).map_err(|e| Error::Io(e.to_string()))?
    )?;
    Ok(())
}

fn cplx(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn params_json(s2: Complex64) -> Result<Value> {
    let class = classify_s2(s2, DEFAULT_CLASSIFY_TOL);
    let mut v = json!({ "class": class, "abs_s2": s2.norm() });
    match class {
        SolutionClass::Oscillatory => {
            let p = osc_params(s2)?;
            v["a"] = json!(p.a);
            v["phi"] = json!(p.phi);
            v["phi_defined"] = json!(p.phi_defined);
        }
        SolutionClass::Singular => {
            let p = sing_params(s2)?;
            v["b"] = json!(p.b);
            v["psi"] = json!(p.psi);
        }
        SolutionClass::Separatrix => {}
    }
    Ok(v)
}

fn run_cmd(cmd: Command, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    match cmd {
        Command::Classify { s2 } => print_json(out, &params_json(s2)?)?,
        Command::Params { s2 } => {
            let mut v = params_json(s2)?;
            v["s2"] = cplx(s2);
            print_json(out, &v)?;
        }
        Command::Integrate(a) => {
            let cfg = build_config(&a.cfg).map_err(Failure::Usage)?;
            let start = match (a.y0, a.dy0, a.pole_p, a.pole_h) {
                (Some(y), Some(dy), None, None) => Start::Point(State::new(a.x0, y, dy)),
                (None, None, Some(p), Some(h)) => Start::Pole(PoleData::new(p, h)),
                _ => return Err(Failure::Usage("give either --y0/--dy0 or --pole-p/--pole-h".into())),
            };
            if !a.x_end.is_finite() {
                return Err(Failure::Usage("--x-end must be finite".into()));
            }
            let traj = integrate(start, a.x_end, &cfg)?;
            match &a.out {
                Some(path) => write_trajectory(create(path)?, &traj)?,
                None => write_trajectory(&mut *out, &traj)?,
            }
            if let Some(path) = &a.poles_out {
                write_poles(create(path)?, &traj.poles())?;
            }
        }
        Command::Compare(a) => {
            let cfg = build_config(&a.cfg).map_err(Failure::Usage)?;
            let preset = match a.preset {
                PresetName::ZeroIc => Preset::ZeroIc,
                PresetName::ZeroPole => Preset::ZeroPole,
            };
            let traj_out = a.traj_out.clone().unwrap_or_else(|| a.out.with_extension("traj.csv"));
            let report = run_compare(preset, a.x_min, &cfg)?;
            write_trajectory(create(&traj_out)?, &report.trajectory)?;
            write_grid(create(&a.grid_out)?, &report.grid)?;
            let doc = report.to_json(&traj_out.to_string_lossy(), &a.grid_out.to_string_lossy());
            let mut w = create(&a.out)?;
            print_json(&mut w, &doc)?;
            w.flush()?;
        }
        Command::Poles { s2, n, out: path } => {
            let p = sing_params(s2)?;
            let poles = crate::asymptotics::predict_poles(&p, n.0, n.1)?;
            let mut text = String::from("n,x\n");
            for (k, x) in poles {
                text.push_str(&format!("{k},{x:.16e}\n"));
            }
            match path {
                Some(path) => create(&path)?.write_all(text.as_bytes())?,
                None => out.write_all(text.as_bytes())?,
            }
        }
        Command::Fit { traj, class, arg_s2 } => {
            let states = read_trajectory(File::open(&traj)?)?;
            let cfg = IntegratorConfig::default();
            let t = Trajectory::from_states(states, cfg.y_detect)?;
            let v = match class {
                FitClass::Osc => {
                    let AsymParams::Oscillatory(p) = fit_params(&t, SolutionClass::Oscillatory)? else {
                        unreachable!()
                    };
                    let s2 = invert_osc(&p, arg_s2.unwrap_or(std::f64::consts::FRAC_PI_2));
                    json!({ "class": SolutionClass::Oscillatory, "a": p.a, "phi": p.phi, "s2": cplx(s2), "abs_s2": s2.norm() })
                }
                FitClass::Sing => {
                    let AsymParams::Singular(p) = fit_params(&t, SolutionClass::Singular)? else {
                        unreachable!()
                    };
                    let s2 = invert_sing(&p, arg_s2.unwrap_or(-std::f64::consts::FRAC_PI_2));
                    json!({ "class": SolutionClass::Singular, "b": p.b, "psi": p.psi, "s2": cplx(s2), "abs_s2": s2.norm() })
                }
            };
            print_json(out, &v)?;
        }
        Command::AppendixB => {
            let s = appendix_b_stokes()?;
            let v = json!({ "stokes": s, "constraint_residual": constraint_residual(&s) });
            print_json(out, &v)?;
        }
    }
    Ok(())
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code. Results go to `out`, diagnostics to
/// `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match run_cmd(cli.cmd, out) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Numeric(e)) => {
            let _ = writeln!(err, "{e}");
            EXIT_NUMERIC
        }
    }
}
