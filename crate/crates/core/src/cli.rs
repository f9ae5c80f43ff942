//! Command-line interface: `eval`, `constants`, `invert`, `grid`, `series`
//! and `selftest`.
//!
//! Exit codes are 0 on success, 1 when a self-test check fails and 2 for
//! usage or evaluation errors. Results go to stdout as one JSON line (or to
//! the requested file); diagnostics go to stderr.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::inverse::sm_inverse_with;
use crate::par::Execution;
use crate::render::{domain_color, sample_grid_with, to_csv, Region, Selector};
use crate::series::{SeriesPair, DEFAULT_ORDER, MAX_ORDER};
use crate::{selftest, Complex, EllipticValue, Error, Evaluator};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const ORDER_ENV: &str = "DIXON_SERIES_ORDER";

/// Parses `a`, `a+bi` or `a-bi` with decimal reals (scientific notation allowed).
pub fn parse_complex(text: &str) -> Result<Complex, Error> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let err = || Error::Parse(text.to_string());
    let real = |s: &str| -> Result<f64, Error> {
        let v: f64 = s.parse().map_err(|_| err())?;
        // reject "inf", "nan" and friends
        if v.is_finite() && s.chars().all(|c| c.is_ascii_digit() || "+-.eE".contains(c)) {
            Ok(v)
        } else {
            Err(err())
        }
    };
    let Some(body) = t.strip_suffix('i') else {
        return Ok(Complex::new(real(&t)?, 0.0));
    };
    // split at the last sign that is not the leading one or part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'))
        .ok_or_else(err)?;
    let (re, im) = body.split_at(split);
    if im.len() < 2 {
        return Err(err());
    }
    Ok(Complex::new(real(re)?, real(im)?))
}

fn complex_arg(s: &str) -> Result<Complex, String> {
    parse_complex(s).map_err(|e| e.to_string())
}

fn tol_arg(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("invalid tolerance {s:?}"))?;
    if (1e-14..=1e-2).contains(&v) {
        Ok(v)
    } else {
        Err(format!("tolerance {v:e} outside [1e-14, 1e-2]"))
    }
}

fn order_arg(s: &str) -> Result<usize, String> {
    let v: usize = s.parse().map_err(|_| format!("invalid order {s:?}"))?;
    if (1..=MAX_ORDER).contains(&v) {
        Ok(v)
    } else {
        Err(format!("order {v} outside 1..={MAX_ORDER}"))
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "dixon",
    about = "Dixonian elliptic functions sm and cm",
    version
)]
pub struct Cli {
    /// Taylor order of the local series (default 48, or $DIXON_SERIES_ORDER).
    #[arg(long, global = true, value_parser = order_arg)]
    pub order: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FunctionArg {
    Sm,
    Cm,
    Wp,
}

impl From<FunctionArg> for Selector {
    fn from(f: FunctionArg) -> Self {
        match f {
            FunctionArg::Sm => Selector::Sm,
            FunctionArg::Cm => Selector::Cm,
            FunctionArg::Wp => Selector::Wp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GridFormat {
    Ppm,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Bounding box of the period parallelogram with vertices 0, -3K, 3Kγ, 3Kγ̄.
    Cell,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate sm, cm or ℘ at a point.
    Eval {
        #[arg(long = "fn", value_enum, default_value = "sm")]
        function: FunctionArg,
        #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
        z: Complex,
    },
    /// Print K, γ, the periods and the Weierstrass invariants.
    Constants,
    /// Principal inverse of sm.
    Invert {
        #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
        w: Complex,
        #[arg(long, value_parser = tol_arg, default_value = "1e-10")]
        tol: f64,
    },
    /// Sample a rectangular grid and write a PPM image or CSV dump.
    Grid {
        #[arg(long = "fn", value_enum, default_value = "sm")]
        function: FunctionArg,
        #[arg(long, value_enum)]
        preset: Option<Preset>,
        #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
        center: Option<Complex>,
        #[arg(long)]
        width: Option<f64>,
        #[arg(long)]
        height: Option<f64>,
        #[arg(long, default_value_t = 256)]
        nx: usize,
        /// Defaults to the preset's aspect ratio, or to nx.
        #[arg(long)]
        ny: Option<usize>,
        #[arg(long, value_enum, default_value = "ppm")]
        format: GridFormat,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; 1 forces sequential sampling.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Print the exact series coefficients as JSON.
    Series,
    /// Run the invariant suite and print a pass/fail table.
    Selftest {
        /// Replace every check's threshold.
        #[arg(long)]
        tol: Option<f64>,
        /// List check names without running them.
        #[arg(long)]
        list: bool,
    },
}

fn usage_error(err: &dyn std::fmt::Display) -> i32 {
    eprintln!("error: {err}");
    EXIT_USAGE
}

fn resolve_order(flag: Option<usize>) -> Result<usize, String> {
    if let Some(order) = flag {
        return Ok(order);
    }
    match std::env::var(ORDER_ENV) {
        Ok(v) => order_arg(v.trim()).map_err(|e| format!("{ORDER_ENV}: {e}")),
        Err(_) => Ok(DEFAULT_ORDER),
    }
}

fn evaluator(order: usize) -> Result<Evaluator, Error> {
    if order == DEFAULT_ORDER {
        Ok(Evaluator::global().clone())
    } else {
        Evaluator::new(order)
    }
}

fn value_json(v: EllipticValue) -> serde_json::Value {
    match v {
        EllipticValue::Finite(z) => json!({"re": z.re, "im": z.im, "pole": false}),
        EllipticValue::Pole { .. } => json!({"re": null, "im": null, "pole": true}),
    }
}

/// Parses `args` and runs the command, writing results to `out`.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let order = match resolve_order(cli.order) {
        Ok(o) => o,
        Err(e) => return usage_error(&e),
    };
    if let Command::Selftest { list: true, .. } = cli.command {
        for check in selftest::checks() {
            let _ = writeln!(out, "{}", check.name);
        }
        return EXIT_OK;
    }
    if let Command::Series = cli.command {
        return match SeriesPair::generate(order) {
            Ok(p) => {
                let _ = writeln!(out, "{}", p.to_json());
                EXIT_OK
            }
            Err(e) => usage_error(&e),
        };
    }
    let ev = match evaluator(order) {
        Ok(ev) => ev,
        Err(e) => return usage_error(&e),
    };
    match execute(&ev, cli.command, out) {
        Ok(code) => code,
        Err(e) => usage_error(&e),
    }
}

fn execute(
    ev: &Evaluator,
    command: Command,
    out: &mut dyn Write,
) -> Result<i32, Box<dyn std::error::Error>> {
    match command {
        Command::Eval { function, z } => {
            let v = Selector::from(function).eval(ev, z)?;
            writeln!(out, "{}", value_json(v))?;
        }
        Command::Constants => {
            writeln!(out, "{}", ev.constants().to_json())?;
        }
        Command::Invert { w, tol } => {
            let r = sm_inverse_with(ev, w, tol)?;
            writeln!(
                out,
                "{}",
                json!({"re": r.z.re, "im": r.z.im, "residual": r.residual})
            )?;
        }
        Command::Grid {
            function,
            preset,
            center,
            width,
            height,
            nx,
            ny,
            format,
            out: path,
            threads,
        } => {
            let region = match preset {
                Some(Preset::Cell) => {
                    let base = Region::cell_preset(ev.constants(), nx)?;
                    Region::new(
                        center.unwrap_or(base.center),
                        width.unwrap_or(base.width),
                        height.unwrap_or(base.height),
                        nx,
                        ny.unwrap_or(base.ny),
                    )?
                }
                None => Region::new(
                    center.unwrap_or(Complex::new(0.0, 0.0)),
                    width.ok_or("--width is required without --preset")?,
                    height.ok_or("--height is required without --preset")?,
                    nx,
                    ny.unwrap_or(nx),
                )?,
            };
            let grid = sample_with_threads(ev, region, function.into(), threads)?;
            let bytes = match format {
                GridFormat::Ppm => domain_color(&grid),
                GridFormat::Csv => to_csv(&grid).into_bytes(),
            };
            std::fs::write(&path, bytes)?;
            writeln!(
                out,
                "{}",
                json!({"path": path.display().to_string(), "nx": region.nx, "ny": region.ny})
            )?;
        }
        Command::Selftest { tol, .. } => {
            if let Some(t) = tol {
                if t.is_nan() || t <= 0.0 {
                    return Err(format!("tolerance {t:e} must be positive").into());
                }
            }
            let outcomes = selftest::run_all(ev, tol);
            let mut failed = 0;
            for o in &outcomes {
                let status = if o.passed() { "PASS" } else { "FAIL" };
                failed += usize::from(!o.passed());
                writeln!(
                    out,
                    "{status}  {:<30} measured {:<10.3e} threshold {:.1e}",
                    o.name, o.measured, o.threshold
                )?;
            }
            writeln!(out, "{} passed, {failed} failed", outcomes.len() - failed)?;
            return Ok(if failed == 0 {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            });
        }
        Command::Series => unreachable!("handled before evaluator construction"),
    }
    Ok(EXIT_OK)
}

fn sample_with_threads(
    ev: &Evaluator,
    region: Region,
    selector: Selector,
    threads: Option<usize>,
) -> Result<crate::render::ValueGrid, Box<dyn std::error::Error>> {
    match threads {
        Some(0) => Err("--threads must be positive".into()),
        Some(1) => Ok(sample_grid_with(
            ev,
            region,
            selector,
            Execution::Sequential,
        )?),
        #[cfg(feature = "parallel")]
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build()?;
            Ok(pool.install(|| sample_grid_with(ev, region, selector, Execution::Parallel))?)
        }
        _ => Ok(sample_grid_with(ev, region, selector, Execution::Parallel)?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String) {
        let mut buf = Vec::new();
        let code = run(
            std::iter::once("dixon").chain(args.iter().copied()),
            &mut buf,
        );
        (code, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("0").unwrap(), Complex::new(0.0, 0.0));
        assert_eq!(parse_complex("1.5+2i").unwrap(), Complex::new(1.5, 2.0));
        assert_eq!(parse_complex("1.5-2i").unwrap(), Complex::new(1.5, -2.0));
        assert_eq!(
            parse_complex("-0.3-0.25i").unwrap(),
            Complex::new(-0.3, -0.25)
        );
        assert_eq!(
            parse_complex("1e-3+2.5E+1i").unwrap(),
            Complex::new(1e-3, 25.0)
        );
        assert_eq!(parse_complex("-2e-1").unwrap(), Complex::new(-0.2, 0.0));
        for bad in [
            "", "i", "1+i", "abc", "1+2j", "inf", "nan", "1+2i3", "2i", "1++2i",
        ] {
            assert!(parse_complex(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn eval_origin() {
        let (code, out) = run_capture(&["eval", "--fn", "sm", "--z", "0"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(v["re"], 0.0);
        assert_eq!(v["im"], 0.0);
        assert_eq!(v["pole"], false);
    }

    #[test]
    fn eval_cardinal_points() {
        let (_, out) = run_capture(&["eval", "--fn", "sm", "--z", "1.76663875"]);
        let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
        assert!((v["re"].as_f64().unwrap() - 1.0).abs() < 1e-8);

        let (_, out) = run_capture(&["eval", "--fn", "cm", "--z", "-0.88331938"]);
        let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
        assert!((v["re"].as_f64().unwrap() - 1.2599210).abs() < 1e-7);
    }

    #[test]
    fn eval_pole() {
        let k = Evaluator::global().constants().k;
        let (code, out) = run_capture(&["eval", "--z", &format!("{:.17e}", -k)]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(v["pole"], true);
        assert!(v["re"].is_null() && v["im"].is_null());
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run_capture(&["eval", "--z", "1+x"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["eval"]).0, EXIT_USAGE);
        assert_eq!(
            run_capture(&["invert", "--w", "0.5", "--tol", "1e-20"]).0,
            EXIT_USAGE
        );
        assert_eq!(run_capture(&["invert", "--w", "2"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["--order", "65", "constants"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["bogus"]).0, EXIT_USAGE);
    }

    #[test]
    fn constants_json() {
        let (code, out) = run_capture(&["constants"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
        assert!((v["K"].as_f64().unwrap() - 1.76663875).abs() < 1e-8);
        assert_eq!(v["g2"], 0.0);
        assert!((v["g3"].as_f64().unwrap() - 1.0 / 27.0).abs() < 1e-16);
        assert!((v["gamma"]["re"].as_f64().unwrap() + 0.5).abs() < 1e-16);
        assert_eq!(v["periods"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn invert_json() {
        let (code, out) = run_capture(&["invert", "--w", "1"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
        assert!((v["re"].as_f64().unwrap() - 1.76663875).abs() < 1e-8);
        assert!(v["residual"].as_f64().unwrap() <= 1e-10);
    }

    #[test]
    fn series_json() {
        let (code, out) = run_capture(&["--order", "7", "series"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(v[7]["s_num"], "2");
        assert_eq!(v[7]["s_den"], "63");
    }

    #[test]
    fn selftest_list() {
        let (code, out) = run_capture(&["selftest", "--list"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), selftest::checks().len());
        assert!(out.lines().any(|l| l == "cube_identity"));
    }

    #[test]
    fn grid_writes_files() {
        let dir = tempfile::tempdir().unwrap();
        let ppm = dir.path().join("g.ppm");
        let (code, _) = run_capture(&[
            "grid",
            "--preset",
            "cell",
            "--nx",
            "16",
            "--out",
            ppm.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        assert!(std::fs::read(&ppm).unwrap().starts_with(b"P6\n16 "));

        let csv = dir.path().join("g.csv");
        let (code, _) = run_capture(&[
            "grid",
            "--fn",
            "cm",
            "--center",
            "0",
            "--width",
            "2",
            "--height",
            "2",
            "--nx",
            "4",
            "--format",
            "csv",
            "--out",
            csv.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 17);

        let (code, _) = run_capture(&["grid", "--nx", "4", "--out", csv.to_str().unwrap()]);
        assert_eq!(code, EXIT_USAGE);
    }
}
