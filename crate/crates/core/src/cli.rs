//! Command-line front end.
//!
//! Exit codes: `0` success, `1` domain failure (invalid or degenerate
//! input, failed checks), `2` usage or parse failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::coords::{extract_phi, reconstruct, PhiField};
use crate::dynamics::{color_at, mutate};
use crate::error::Error;
use crate::geom::Point;
use crate::invariants::{gamma_generators, invariant_report, monodromy_ratio};
use crate::pattern::{forge_pattern, perturbed_seed, ForgeOptions, TorusPattern};
use crate::tol;
use crate::twobytwo::{pattern_quartic, quartic_trajectory};

/// Header comment of the evolve CSV.
pub const EVOLVE_CSV_VERSION: &str = "# miquel evolve v1";
pub const EVOLVE_CSV_COLUMNS: &str = "t,vx,vy,gamma_h,gamma_v,ratio_re,ratio_im,residual";

/// Sample count for curves drawn in SVG output.
pub const SVG_CURVE_SAMPLES: usize = 2048;

#[derive(Debug, Parser)]
#[command(
    name = "miquel",
    version,
    about = "Miquel dynamics on biperiodic circle patterns"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a pattern file and print the validation report.
    Validate {
        input: PathBuf,
        /// Concyclicity tolerance.
        #[arg(long, default_value_t = tol::CONCYCLIC)]
        tol: f64,
    },
    /// Run the dynamics and write one CSV row per time step.
    Evolve {
        input: PathBuf,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        /// Vertex whose motion is recorded, unfolded indices.
        #[arg(long, value_parser = parse_pair, default_value = "1,1")]
        track: (i64, i64),
        /// Reference vertex subtracted from the tracked one.
        #[arg(long = "ref", value_parser = parse_pair, default_value = "0,0")]
        reference: (i64, i64),
        /// CSV destination; standard output when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Plot of the relative motion, with the quartic for 2×2 inputs.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Directory receiving `phi_<t>.json` for every state.
        #[arg(long)]
        dump_phi: Option<PathBuf>,
    },
    /// Extract the angle field of a pattern.
    Phi {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Rebuild a pattern (normalized so that S(0,0) = 0, S(1,0) = 1) from an angle field.
    Reconstruct {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print the conserved quantities of a pattern.
    Invariants {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Follow the center vertex of a 2×2 pattern and compare it with its quartic.
    Quartic {
        input: PathBuf,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        /// Largest accepted normalized residual.
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        /// JSON report destination; standard output when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Trajectory CSV `t,ex,ey,residual`.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Produce a valid pattern by relaxing a randomly perturbed grid.
    Forge {
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        s: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Amplitude of the vertex and monodromy perturbation.
        #[arg(long, default_value_t = 0.1)]
        noise: f64,
        /// Also require all circumradii to be equal.
        #[arg(long)]
        isoradial: bool,
        /// Convergence tolerance.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn parse_pair(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected x,y, got {s:?}"))?;
    let parse = |t: &str| t.trim().parse::<i64>().map_err(|e| format!("{t:?}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

/// A failed command together with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn domain(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::Io(_) | Error::InvalidParameters(_) => 2,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn load_pattern(path: &Path) -> Result<TorusPattern, Failure> {
    TorusPattern::from_json(&read(path)?)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, dest: Option<&Path>, text: &str) -> CmdResult {
    match dest {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))
        }
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Failure::usage(e.to_string())),
    }
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

/// Parse `args` (including the program name) and run the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 {
                write!(out, "{e}")
            } else {
                write!(err, "{e}")
            };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    match cmd {
        Command::Validate { input, tol } => cmd_validate(&input, tol, out),
        Command::Evolve {
            input,
            steps,
            track,
            reference,
            output,
            svg,
            dump_phi,
        } => cmd_evolve(
            &input,
            EvolveOptions {
                steps,
                track,
                reference,
                output,
                svg,
                dump_phi,
            },
            out,
            err,
        ),
        Command::Phi { input, output } => {
            let p = load_pattern(&input)?;
            let f = extract_phi(&p)?;
            emit(out, output.as_deref(), &with_newline(f.to_json()))
        }
        Command::Reconstruct { input, output } => {
            let f = PhiField::from_json(&read(&input)?)
                .map_err(|e| Failure::usage(format!("{}: {e}", input.display())))?;
            let p = reconstruct(&f)?;
            emit(out, output.as_deref(), &with_newline(p.to_json()))
        }
        Command::Invariants { input, output } => {
            let p = load_pattern(&input)?;
            let r = invariant_report(&p)?;
            emit(out, output.as_deref(), &with_newline(r.to_json()))
        }
        Command::Quartic {
            input,
            steps,
            tol,
            output,
            csv,
            svg,
        } => cmd_quartic(&input, steps, tol, output, csv, svg, out),
        Command::Forge {
            m,
            n,
            s,
            seed,
            noise,
            isoradial,
            tol,
            output,
        } => {
            if !(tol > 0.0) || !(noise >= 0.0) {
                return Err(Failure::usage(
                    "--tol must be positive and --noise non-negative",
                ));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let start = perturbed_seed(m, n, s, noise, noise, &mut rng)?;
            let opts = ForgeOptions {
                isoradial,
                tol,
                ..ForgeOptions::default()
            };
            let p = forge_pattern(&start, opts)?;
            emit(out, output.as_deref(), &with_newline(p.to_json()))
        }
    }
}

fn cmd_validate(input: &Path, tolerance: f64, out: &mut dyn Write) -> CmdResult {
    if !(tolerance > 0.0) {
        return Err(Failure::usage("--tol must be positive"));
    }
    let p = load_pattern(input)?;
    let report = p.validate_with(tolerance);
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    emit(out, None, &with_newline(json))?;
    if report.pass {
        Ok(())
    } else {
        Err(Failure::domain(format!(
            "invalid pattern: {}",
            report.failures.join("; ")
        )))
    }
}

struct EvolveOptions {
    steps: usize,
    track: (i64, i64),
    reference: (i64, i64),
    output: Option<PathBuf>,
    svg: Option<PathBuf>,
    dump_phi: Option<PathBuf>,
}

fn evolve_row(t: i64, p: &TorusPattern, o: &EvolveOptions) -> Result<(Point, String), Error> {
    let w = p.vertex(o.track.0, o.track.1) - p.vertex(o.reference.0, o.reference.1);
    let g = gamma_generators(p)?;
    let (re, im) = monodromy_ratio(p)?;
    let residual = p.faces().map(|f| p.concyclicity(f)).fold(0.0, f64::max);
    let row = format!(
        "{t},{},{},{},{},{},{},{:e}\n",
        w.x, w.y, g.horizontal, g.vertical, re, im, residual
    );
    Ok((w, row))
}

fn cmd_evolve(
    input: &Path,
    o: EvolveOptions,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let p0 = load_pattern(input)?;
    let report = p0.validate();
    if !report.pass {
        return Err(Failure::domain(format!(
            "invalid pattern: {}",
            report.failures.join("; ")
        )));
    }
    if let Some(dir) = &o.dump_phi {
        std::fs::create_dir_all(dir)
            .map_err(|e| Failure::usage(format!("{}: {e}", dir.display())))?;
    }
    let anchor = p0.stored(0, 0);
    let mut csv = format!("{EVOLVE_CSV_VERSION}\n{EVOLVE_CSV_COLUMNS}\n");
    let mut motion = Vec::with_capacity(o.steps + 1);
    let mut state = p0.clone();
    let mut failure = None;
    for t in 0..=o.steps as i64 {
        if t > 0 {
            match mutate(&state, color_at(t)) {
                Ok(next) => state = next,
                Err(e) => {
                    failure = Some(Failure::domain(format!("step {t}: {e}")));
                    break;
                }
            }
        }
        // translation normalization: S_t(0,0) stays at S_0(0,0)
        let shown = state.translate(anchor - state.stored(0, 0));
        let (w, row) = match evolve_row(t, &shown, &o) {
            Ok(r) => r,
            Err(e) => {
                failure = Some(Failure::domain(format!("step {t}: {e}")));
                break;
            }
        };
        csv.push_str(&row);
        motion.push(w);
        if let Some(dir) = &o.dump_phi {
            let f = extract_phi(&shown).map_err(|e| Failure::domain(format!("step {t}: {e}")))?;
            let path = dir.join(format!("phi_{t}.json"));
            std::fs::write(&path, with_newline(f.to_json()))
                .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
        }
    }
    emit(out, o.output.as_deref(), &csv)?;
    if let Some(path) = &o.svg {
        let mut curve = Vec::new();
        if p0.shape() == (2, 2, 0) && o.reference == (0, 0) && o.track == (1, 1) {
            if let Ok((_, model)) = pattern_quartic(&p0) {
                curve = model
                    .sample(SVG_CURVE_SAMPLES)
                    .into_iter()
                    .map(|q| q - anchor)
                    .collect();
            }
        }
        write_svg(path, &motion, &curve)?;
    }
    match failure {
        Some(f) => {
            let _ = writeln!(err, "partial output: {} rows written", motion.len());
            Err(f)
        }
        None => Ok(()),
    }
}

fn cmd_quartic(
    input: &Path,
    steps: usize,
    tolerance: f64,
    output: Option<PathBuf>,
    csv: Option<PathBuf>,
    svg: Option<PathBuf>,
    out: &mut dyn Write,
) -> CmdResult {
    let p = load_pattern(input)?;
    if p.shape() != (2, 2, 0) {
        let (m, n, s) = p.shape();
        return Err(Failure::usage(format!(
            "quartic needs a 2x2 pattern with s = 0, got ({m},{n},{s})"
        )));
    }
    let report = quartic_trajectory(&p, steps)?;
    emit(out, output.as_deref(), &with_newline(report.to_json()))?;
    if let Some(path) = &csv {
        emit(out, Some(path), &report.to_csv())?;
    }
    if let Some(path) = &svg {
        let orbit: Vec<Point> = report.trajectory.iter().map(|q| q.e).collect();
        write_svg(path, &orbit, &report.model.sample(SVG_CURVE_SAMPLES))?;
    }
    if !(report.max_residual < tolerance) {
        return Err(Failure::domain(format!(
            "E leaves the quartic: residual {:.3e} ≥ {tolerance:e}",
            report.max_residual
        )));
    }
    if let Some(rot) = &report.rotation {
        if !(rot.max_deviation < 1e-8) {
            return Err(Failure::domain(format!(
                "rotation law deviation {:.3e}",
                rot.max_deviation
            )));
        }
    }
    Ok(())
}

/// Orbit as a polyline with a marker per state, curve samples as dots.
pub fn svg_document(orbit: &[Point], curve: &[Point]) -> String {
    let all = orbit.iter().chain(curve).filter(|p| p.is_finite());
    let (mut x0, mut y0, mut x1, mut y1) = (
        f64::INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::NEG_INFINITY,
    );
    for p in all {
        x0 = x0.min(p.x);
        y0 = y0.min(p.y);
        x1 = x1.max(p.x);
        y1 = y1.max(p.y);
    }
    if !x0.is_finite() {
        (x0, y0, x1, y1) = (-1.0, -1.0, 1.0, 1.0);
    }
    let size = (x1 - x0).max(y1 - y0).max(1e-9);
    let pad = 0.05 * size;
    let r = 0.004 * size;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="800" height="800">"#,
        x0 - pad,
        -(y1 + pad),
        x1 - x0 + 2.0 * pad,
        y1 - y0 + 2.0 * pad
    );
    // flip y so that the picture is in the usual orientation
    s.push_str("<g transform=\"scale(1,-1)\">\n");
    if !curve.is_empty() {
        s.push_str("<g fill=\"#c44\">\n");
        for p in curve {
            let _ = writeln!(s, r#"<circle cx="{}" cy="{}" r="{}"/>"#, p.x, p.y, 0.5 * r);
        }
        s.push_str("</g>\n");
    }
    if !orbit.is_empty() {
        s.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"#246\" stroke-width=\"{}\" points=\"",
            0.5 * r
        ));
        for (k, p) in orbit.iter().enumerate() {
            if k > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{},{}", p.x, p.y);
        }
        s.push_str("\"/>\n<g fill=\"#246\">\n");
        for p in orbit {
            let _ = writeln!(s, r#"<circle cx="{}" cy="{}" r="{}"/>"#, p.x, p.y, r);
        }
        s.push_str("</g>\n");
    }
    s.push_str("</g>\n</svg>\n");
    s
}

fn write_svg(path: &Path, orbit: &[Point], curve: &[Point]) -> CmdResult {
    std::fs::write(path, svg_document(orbit, curve))
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}
