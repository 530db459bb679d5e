//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on domain failure, 2 on usage error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::angle::{conformal_angle_with, wrap_pi, DEFAULT_MATCH_FACTOR};
use crate::boundary::{assess_curve, boundary_curve, classify_parameter, orbit, ClassifyOptions, Verdict, DEFAULT_ORBIT_LEN, MIN_ORBIT_LEN};
use crate::dynamics::{alpha_star, MapParams};
use crate::gamma::{trace_gamma, verify_gamma, TraceOptions, VerifyOptions, DEFAULT_TOL};
use crate::linearization::{build_traps, functional_residual, solve_linearizer, taylor_f2, DEFAULT_ORDER};
use crate::render::{render_julia, render_param_plane, write_png, write_ppm, Palette, Raster, Rect, RenderSummary};
use crate::rotation::RotationNumber;
use crate::sphere::{Center, SpherePoint};
use crate::verify::{format_table, run_suite, SuiteOptions};

pub const MIN_SERIES_ORDER: usize = 32;

#[derive(Debug, Error, PartialEq)]
#[error("malformed complex literal {0:?}, expected a+bi or a-bi")]
pub struct ComplexParseError(String);

/// Parses `a+bi` / `a-bi` (no spaces; exponents allowed).
pub fn parse_complex(s: &str) -> Result<Complex64, ComplexParseError> {
    let err = || ComplexParseError(s.to_string());
    let body = s.strip_suffix('i').ok_or_else(err)?;
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'))
        .ok_or_else(err)?;
    let (re, im) = body.split_at(split);
    let num = |t: &str| -> Result<f64, ComplexParseError> {
        if t.is_empty() || t.contains(|c: char| c.is_ascii_alphabetic() && c != 'e' && c != 'E') {
            return Err(err());
        }
        t.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(err)
    };
    let im = im.strip_prefix('+').unwrap_or(im);
    Ok(Complex64::new(num(re)?, num(im)?))
}

/// Inverse of [`parse_complex`]; the sign of the imaginary part is kept even
/// for zero.
pub fn format_complex(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", z.re, sign, z.im.abs())
}

/// `--alpha` value: a complex literal or `star` for `c₁/f₁(c₂)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AlphaArg {
    Value(Complex64),
    Star,
}

impl AlphaArg {
    pub fn resolve(self, theta: &RotationNumber) -> Complex64 {
        match self {
            AlphaArg::Value(z) => z,
            AlphaArg::Star => alpha_star(theta),
        }
    }
}

fn parse_alpha(s: &str) -> Result<AlphaArg, ComplexParseError> {
    if s == "star" {
        Ok(AlphaArg::Star)
    } else {
        parse_complex(s).map(AlphaArg::Value)
    }
}

fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let bad = || format!("malformed size {s:?}, expected WxH");
    let (w, h) = s.split_once('x').ok_or_else(bad)?;
    let (w, h) = (w.parse::<usize>().map_err(|_| bad())?, h.parse::<usize>().map_err(|_| bad())?);
    if w == 0 || h == 0 {
        return Err(bad());
    }
    Ok((w, h))
}

#[derive(Parser, Debug)]
#[command(name = "siegel", version, about = "Quadratic rational maps with a 2-cycle of Siegel disks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Render the parameter plane by classifying each pixel.
    ParamPlane(ParamPlaneArgs),
    /// Render the dynamical plane of one map.
    Julia(JuliaArgs),
    /// Trace the curve Γ by bisection along rays.
    TraceGamma(TraceGammaArgs),
    /// Write the ordered boundary orbit of a critical point as CSV.
    TraceBoundary(TraceBoundaryArgs),
    /// Conformal angles A and Ã of a parameter on Γ.
    Angle(AngleArgs),
    /// Classify a parameter as exterior, interior or on Γ.
    Classify(AlphaOnly),
    /// Linearizer coefficients and trap radius.
    DumpLinearizer(DumpArgs),
    /// Run the property suite.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// θ = (√5 − 1)/2 (the default).
    #[arg(long, conflicts_with = "theta_cf")]
    pub theta_golden: bool,
    /// θ by continued fraction, `pre:period` with comma-separated quotients.
    #[arg(long, value_name = "PRE:PERIOD", value_parser = RotationNumber::parse_cf)]
    pub theta_cf: Option<RotationNumber>,
    #[arg(long, default_value_t = DEFAULT_ORBIT_LEN)]
    pub orbit_n: usize,
    #[arg(long, default_value_t = DEFAULT_ORDER)]
    pub series_order: usize,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Reduced sizes and budgets.
    #[arg(long)]
    pub quick: bool,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

impl Common {
    pub fn theta(&self) -> RotationNumber {
        self.theta_cf.clone().unwrap_or_else(RotationNumber::golden)
    }
}

#[derive(Args, Debug, Clone)]
pub struct ImageArgs {
    #[arg(long, value_parser = parse_size, value_name = "WxH")]
    pub size: Option<(usize, usize)>,
    #[arg(long, value_name = "RE_MIN,RE_MAX,IM_MIN,IM_MAX", allow_hyphen_values = true)]
    pub rect: Option<Rect>,
    #[arg(long, default_value_t = DEFAULT_ORBIT_LEN)]
    pub render_n: usize,
    /// Also write a PNG.
    #[arg(long)]
    pub png: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct ParamPlaneArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub image: ImageArgs,
}

#[derive(Args, Debug, Clone)]
pub struct JuliaArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_parser = parse_alpha, allow_hyphen_values = true)]
    pub alpha: AlphaArg,
    #[command(flatten)]
    pub image: ImageArgs,
}

#[derive(Args, Debug, Clone)]
pub struct TraceGammaArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 64)]
    pub rays: usize,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Skip the scan for additional crossings on each ray.
    #[arg(long)]
    pub no_scan: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum CriticalArg {
    C1,
    C2,
}

#[derive(Args, Debug, Clone)]
pub struct TraceBoundaryArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_parser = parse_alpha, allow_hyphen_values = true)]
    pub alpha: AlphaArg,
    #[arg(long, value_enum, default_value_t = CriticalArg::C1)]
    pub critical: CriticalArg,
}

#[derive(Args, Debug, Clone)]
pub struct AngleArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_parser = parse_alpha, allow_hyphen_values = true)]
    pub alpha: AlphaArg,
    /// Largest accepted match error, in vertex spacings.
    #[arg(long, default_value_t = DEFAULT_MATCH_FACTOR)]
    pub match_tol: f64,
}

#[derive(Args, Debug, Clone)]
pub struct AlphaOnly {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_parser = parse_alpha, allow_hyphen_values = true)]
    pub alpha: AlphaArg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CenterArg {
    Zero,
    Infinity,
}

#[derive(Args, Debug, Clone)]
pub struct DumpArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_parser = parse_alpha, allow_hyphen_values = true, default_value = "1+0i")]
    pub alpha: AlphaArg,
    #[arg(long, value_enum, default_value_t = CenterArg::Zero)]
    pub center: CenterArg,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 64)]
    pub rays: usize,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = DEFAULT_MATCH_FACTOR)]
    pub match_tol: f64,
}

/// Everything a run depends on, in re-parsable form.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub theta_cf: String,
    pub theta: f64,
    pub alpha: Option<String>,
    pub rect: Option<String>,
    pub size: Option<String>,
    pub orbit_n: usize,
    pub render_n: Option<usize>,
    pub series_order: usize,
    pub tol: Option<f64>,
    pub match_tol: Option<f64>,
    pub rays: Option<usize>,
    pub out: Option<PathBuf>,
    pub png: Option<PathBuf>,
    pub threads: Option<usize>,
    pub seed: u64,
    pub quick: bool,
}

impl RunConfig {
    fn base(command: &'static str, c: &Common) -> Self {
        let theta = c.theta();
        Self {
            command,
            theta_cf: theta.cf_string(),
            theta: theta.value(),
            alpha: None,
            rect: None,
            size: None,
            orbit_n: c.orbit_n,
            render_n: None,
            series_order: c.series_order,
            tol: None,
            match_tol: None,
            rays: None,
            out: c.out.clone(),
            png: None,
            threads: c.threads,
            seed: c.seed,
            quick: c.quick,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.orbit_n < MIN_ORBIT_LEN {
            return Err(format!("--orbit-n must be at least {MIN_ORBIT_LEN}"));
        }
        if self.render_n.is_some_and(|n| n < MIN_ORBIT_LEN) {
            return Err(format!("--render-n must be at least {MIN_ORBIT_LEN}"));
        }
        if self.series_order < MIN_SERIES_ORDER {
            return Err(format!("--series-order must be at least {MIN_SERIES_ORDER}"));
        }
        if self.tol.is_some_and(|t| !(t > 0.0 && t < 1.0)) {
            return Err("--tol must lie in (0, 1)".into());
        }
        if self.match_tol.is_some_and(|t| !(t > 0.0 && t.is_finite())) {
            return Err("--match-tol must be positive".into());
        }
        if self.rays.is_some_and(|m| m < 4) {
            return Err("--rays must be at least 4".into());
        }
        if self.threads == Some(0) {
            return Err("--threads must be positive".into());
        }
        Ok(())
    }

    fn classify_options(&self) -> ClassifyOptions {
        ClassifyOptions { orbit_len: self.orbit_n, series_order: self.series_order, ..ClassifyOptions::default() }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }
}

fn domain(e: impl ToString) -> CliError {
    CliError::Domain(e.to_string())
}

/// Prints to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = std::io::Write::write_all(&mut out, text.as_bytes());
    let _ = std::io::Write::write_all(&mut out, b"\n");
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), CliError> {
    write_text(path, &(serde_json::to_string_pretty(value).expect("serializable") + "\n"))
}

fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("json")
}

fn params(theta: &RotationNumber, alpha: Complex64) -> Result<MapParams, CliError> {
    MapParams::new(theta.clone(), alpha).map_err(|e| CliError::Usage(e.to_string()))
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn common(cmd: &Command) -> &Common {
    match cmd {
        Command::ParamPlane(a) => &a.common,
        Command::Julia(a) => &a.common,
        Command::TraceGamma(a) => &a.common,
        Command::TraceBoundary(a) => &a.common,
        Command::Angle(a) => &a.common,
        Command::Classify(a) => &a.common,
        Command::DumpLinearizer(a) => &a.common,
        Command::Verify(a) => &a.common,
    }
}

pub fn execute(cmd: Command) -> Result<(), CliError> {
    match common(&cmd).threads {
        Some(k) if k > 0 => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(k).build().map_err(domain)?;
            pool.install(|| dispatch(cmd))
        }
        _ => dispatch(cmd),
    }
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::ParamPlane(a) => param_plane(a),
        Command::Julia(a) => julia(a),
        Command::TraceGamma(a) => trace_gamma_cmd(a),
        Command::TraceBoundary(a) => trace_boundary(a),
        Command::Angle(a) => angle(a),
        Command::Classify(a) => classify(a),
        Command::DumpLinearizer(a) => dump_linearizer(a),
        Command::Verify(a) => verify(a),
    }
}

fn checked(cfg: RunConfig) -> Result<RunConfig, CliError> {
    cfg.validate().map_err(CliError::Usage)?;
    Ok(cfg)
}

fn image_config(command: &'static str, c: &Common, img: &ImageArgs, rect: Rect, size: (usize, usize), out: PathBuf) -> RunConfig {
    RunConfig {
        rect: Some(rect.to_string()),
        size: Some(format!("{}x{}", size.0, size.1)),
        render_n: Some(img.render_n),
        out: Some(out),
        png: img.png.clone(),
        ..RunConfig::base(command, c)
    }
}

fn finish_image(cfg: &RunConfig, img: &crate::render::ImageBuffer, summary: RenderSummary) -> Result<(), CliError> {
    let out = cfg.out.as_deref().expect("image commands set an output path");
    let palette = Palette::default();
    write_ppm(img, &palette, out).map_err(domain)?;
    if let Some(png) = &cfg.png {
        write_png(img, &palette, png).map_err(domain)?;
    }
    let doc = json!({ "config": cfg, "summary": summary });
    write_json(&sidecar_path(out), &doc)?;
    emit(&serde_json::to_string_pretty(&doc).expect("serializable"));
    Ok(())
}

fn param_plane(a: ParamPlaneArgs) -> Result<(), CliError> {
    let c = &a.common;
    let size = a.image.size.unwrap_or(if c.quick { (64, 59) } else { (200, 185) });
    let rect = a.image.rect.unwrap_or_else(Rect::overview);
    let out = c.out.clone().unwrap_or_else(|| "param_plane.ppm".into());
    let cfg = checked(image_config("param-plane", c, &a.image, rect, size, out))?;
    let theta = c.theta();
    let raster = Raster::new(size.0, size.1, rect).map_err(|e| CliError::Usage(e.to_string()))?;
    let img = render_param_plane(&theta, raster, a.image.render_n);
    let summary = RenderSummary::new("param-plane", &theta, None, &img, a.image.render_n);
    finish_image(&cfg, &img, summary)
}

fn julia(a: JuliaArgs) -> Result<(), CliError> {
    let c = &a.common;
    let theta = c.theta();
    let alpha = a.alpha.resolve(&theta);
    let size = a.image.size.unwrap_or(if c.quick { (100, 100) } else { (400, 400) });
    let rect = a.image.rect.unwrap_or(Rect { re_min: -2.0, re_max: 2.0, im_min: -2.0, im_max: 2.0 });
    let out = c.out.clone().unwrap_or_else(|| "julia.ppm".into());
    let cfg = checked(RunConfig { alpha: Some(format_complex(alpha)), ..image_config("julia", c, &a.image, rect, size, out) })?;
    let p = params(&theta, alpha)?;
    let raster = Raster::new(size.0, size.1, rect).map_err(|e| CliError::Usage(e.to_string()))?;
    let img = render_julia(&p, raster, a.image.render_n).map_err(domain)?;
    let summary = RenderSummary::new("julia", &theta, Some(alpha), &img, a.image.render_n);
    finish_image(&cfg, &img, summary)
}

fn opt_num(x: Option<f64>) -> String {
    x.map(|v| format!("{v}")).unwrap_or_default()
}

fn trace_gamma_cmd(a: TraceGammaArgs) -> Result<(), CliError> {
    let c = &a.common;
    let rays = if c.quick { a.rays.min(16) } else { a.rays };
    let out = c.out.clone().unwrap_or_else(|| "gamma.csv".into());
    let cfg = checked(RunConfig { tol: Some(a.tol), rays: Some(rays), out: Some(out.clone()), ..RunConfig::base("trace-gamma", c) })?;
    let theta = c.theta();
    let classify = cfg.classify_options();
    let opts = TraceOptions { rays, tol: a.tol, classify, scan: !a.no_scan, ..TraceOptions::default() };
    let curve = trace_gamma(&theta, &opts).map_err(domain)?;
    let mut csv = String::from("phi,re,im,a,bracket_width\n");
    for r in &curve.records {
        let z = r.alpha();
        let _ = writeln!(csv, "{},{},{},{},{}", r.phi, opt_num(z.map(|z| z.re)), opt_num(z.map(|z| z.im)), opt_num(r.a), opt_num(r.bracket_width()));
    }
    write_text(&out, &csv)?;
    let report = verify_gamma(&curve, &theta, &VerifyOptions { classify, ..VerifyOptions::default() });
    let doc = json!({
        "config": cfg,
        "report": report,
        "passed": report.passed() && report.simple,
        "angle_monotone_fraction": curve.angle_monotone_fraction(),
        "angle_octants": curve.angle_octants(),
        "max_spacing": curve.max_spacing(),
        "records": curve.records,
    });
    write_json(&sidecar_path(&out), &doc)?;
    emit(&serde_json::to_string_pretty(&json!({ "passed": doc["passed"], "report": report, "out": out })).expect("serializable"));
    if report.passed() && report.simple {
        Ok(())
    } else {
        Err(CliError::Domain("traced curve failed verification".into()))
    }
}

fn trace_boundary(a: TraceBoundaryArgs) -> Result<(), CliError> {
    let c = &a.common;
    let theta = c.theta();
    let alpha = a.alpha.resolve(&theta);
    let out = c.out.clone().unwrap_or_else(|| "boundary.csv".into());
    let cfg = checked(RunConfig { alpha: Some(format_complex(alpha)), out: Some(out.clone()), ..RunConfig::base("trace-boundary", c) })?;
    let p = params(&theta, alpha)?;
    let opts = cfg.classify_options();
    let traps = build_traps(&p, opts.series_order, opts.trap_fraction).map_err(domain)?;
    let cp = p.critical_points();
    let (seed, center) = match a.critical {
        CriticalArg::C1 => (cp.c1, Center::Zero),
        CriticalArg::C2 => (cp.c2, Center::Infinity),
    };
    let trace = orbit(&p, SpherePoint::finite(seed), opts.orbit_len, &traps);
    let curve = boundary_curve(&trace, &theta, center).map_err(domain)?;
    let (diagnostics, rejection) = assess_curve(&curve, &opts.criteria);
    let mut csv = String::from("n,frac,re_w,im_w\n");
    for ((n, k), w) in curve.indices.iter().zip(&curve.keys).zip(&curve.points) {
        let _ = writeln!(csv, "{n},{k},{},{}", w.re, w.im);
    }
    write_text(&out, &csv)?;
    let doc = json!({
        "config": cfg,
        "critical": a.critical,
        "chart": center,
        "points": curve.len(),
        "trap_entry": trace.trap_entry,
        "on_boundary": rejection.is_none(),
        "rejection": rejection,
        "diagnostics": diagnostics,
    });
    write_json(&sidecar_path(&out), &doc)?;
    emit(&serde_json::to_string_pretty(&doc).expect("serializable"));
    Ok(())
}

fn print_and_save(cfg: &RunConfig, doc: &serde_json::Value) -> Result<(), CliError> {
    emit(&serde_json::to_string_pretty(doc).expect("serializable"));
    match &cfg.out {
        Some(out) => write_json(out, doc),
        None => Ok(()),
    }
}

fn angle(a: AngleArgs) -> Result<(), CliError> {
    let c = &a.common;
    let theta = c.theta();
    let alpha = a.alpha.resolve(&theta);
    let cfg = checked(RunConfig { alpha: Some(format_complex(alpha)), match_tol: Some(a.match_tol), ..RunConfig::base("angle", c) })?;
    let p = params(&theta, alpha)?;
    let m = conformal_angle_with(&p, &cfg.classify_options(), a.match_tol);
    let doc = match &m {
        Ok(m) => json!({
            "a": m.a,
            "a_tilde": m.a_tilde,
            "a_wrapped": wrap_pi(m.a),
            "relation_defect": m.relation_defect(theta.value()),
            "match_error": m.match_error,
            "samples_used": m.samples_used,
            "config": cfg,
        }),
        Err(e) => json!({ "error": e.to_string(), "config": cfg }),
    };
    print_and_save(&cfg, &doc)?;
    m.map(|_| ()).map_err(domain)
}

fn classify(a: AlphaOnly) -> Result<(), CliError> {
    let c = &a.common;
    let theta = c.theta();
    let alpha = a.alpha.resolve(&theta);
    let cfg = checked(RunConfig { alpha: Some(format_complex(alpha)), ..RunConfig::base("classify", c) })?;
    let p = params(&theta, alpha)?;
    let cl = classify_parameter(&p, &cfg.classify_options());
    let doc = json!({
        "verdict": cl.verdict,
        "c1": cl.c1,
        "c2": cl.c2,
        "traps": cl.traps,
        "failure": cl.failure,
        "config": cfg,
    });
    print_and_save(&cfg, &doc)?;
    if cl.verdict == Verdict::Undetermined {
        return Err(CliError::Domain("classification undetermined".into()));
    }
    Ok(())
}

fn dump_linearizer(a: DumpArgs) -> Result<(), CliError> {
    let c = &a.common;
    let theta = c.theta();
    let alpha = a.alpha.resolve(&theta);
    let cfg = checked(RunConfig { alpha: Some(format_complex(alpha)), ..RunConfig::base("dump-linearizer", c) })?;
    let p = params(&theta, alpha)?;
    let center = match a.center {
        CenterArg::Zero => Center::Zero,
        CenterArg::Infinity => Center::Infinity,
    };
    let ts = taylor_f2(&p, center, cfg.series_order).map_err(domain)?;
    let lin = solve_linearizer(&ts, cfg.series_order).map_err(domain)?;
    let residual = lin.radius_estimate.filter(|_| center == Center::Zero).map(|r| functional_residual(&p, &lin, r / 3.0, 256));
    let traps = build_traps(&p, cfg.series_order, ClassifyOptions::default().trap_fraction).map_err(domain)?;
    let doc = json!({
        "center": center,
        "lambda": lin.lambda,
        "radius_estimate": lin.radius_estimate,
        "usable_coefficients": lin.usable_coefficients,
        "residual_at_third_radius": residual,
        "traps": traps,
        "coefficients": lin.coeffs.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
        "config": cfg,
    });
    print_and_save(&cfg, &doc)
}

fn verify(a: VerifyArgs) -> Result<(), CliError> {
    let c = &a.common;
    let out = c.out.clone().unwrap_or_else(|| "verify.json".into());
    let cfg = checked(RunConfig {
        tol: Some(a.tol),
        match_tol: Some(a.match_tol),
        rays: Some(a.rays),
        out: Some(out.clone()),
        ..RunConfig::base("verify", c)
    })?;
    let opts = SuiteOptions {
        theta: c.theta(),
        seed: c.seed,
        quick: c.quick,
        classify: cfg.classify_options(),
        rays: a.rays,
        tol: a.tol,
        match_factor: a.match_tol,
    };
    let results = run_suite(&opts);
    let failed = results.iter().filter(|r| !r.passed).count();
    emit(&format!("{}{} checks, {failed} failed", format_table(&results), results.len()));
    write_json(&out, &json!({ "config": cfg, "results": results, "failed": failed }))?;
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::Domain(format!("{failed} check(s) failed")))
    }
}
