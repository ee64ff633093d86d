//! Command-line front end. Exit codes: 0 success, 1 verification failure, 2 usage or
//! input error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::Vector3;
use serde::Serialize;
use serde_json::Value;

use crate::bieberbach::{admissible_alphas, invariant_xi, lift_generators, BieberbachGroup, GroupName};
use crate::clifford::CliffordRep;
use crate::deform::transport_tks;
use crate::descriptor::Descriptor;
use crate::error::{Error, Result};
use crate::frame::FlowGeometry;
use crate::identities::{dim3_identities, dim3_minimal_identities, sasaki_identities, thm_main_residuals, IdentityReport};
use crate::spin::{SpinorField, TksParams};
use crate::tks::{default_grid, scan_params, solve_homogeneous, tks_residual, write_scan_csv};
use crate::zoo::{self, ExpectedDim, ZooEntry, ZooParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "flowspin", version, about = "Transversal Killing spinors on Riemannian flows")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for transversal Killing spinors and check every applicable curvature identity.
    Verify(VerifyArgs),
    /// Kernel dimension over an (alpha, beta) grid, as CSV.
    Scan(ScanArgs),
    /// Admissible alpha for flat solutions on a Bieberbach quotient.
    Bieberbach(BieberbachArgs),
    /// Transport solutions along a D-homothetic deformation.
    Deform(DeformArgs),
    /// List the built-in manifolds.
    Catalog(FormatArg),
    /// Write a manifold descriptor (full precision JSON).
    Dump(DumpArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct FormatArg {
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ManifoldArg {
    /// Catalog name or path to a descriptor file.
    pub manifold: String,
    /// Catalog parameter, `key=value`; repeatable.
    #[arg(long = "param", value_parser = parse_key_value)]
    pub params: Vec<(String, f64)>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub target: ManifoldArg,
    /// Without alpha and beta every declared expectation is verified.
    #[arg(long, allow_hyphen_values = true, requires = "beta")]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "alpha")]
    pub beta: Option<f64>,
    /// Residual tolerance (default 1e-9 homogeneous, 1e-5 chart).
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub target: ManifoldArg,
    /// Alpha grid `lo:hi:step` (default -2:2:0.25).
    #[arg(long, allow_hyphen_values = true, value_parser = parse_grid)]
    pub alphas: Option<Grid>,
    /// Beta grid `lo:hi:step` (default -2:2:0.25).
    #[arg(long, allow_hyphen_values = true, value_parser = parse_grid)]
    pub betas: Option<Grid>,
    /// Only print rows with a nonzero kernel.
    #[arg(long)]
    pub nonzero: bool,
}

#[derive(Debug, Args)]
pub struct BieberbachArgs {
    /// G1..G6.
    pub group: String,
    #[arg(long = "H")]
    pub h: Option<f64>,
    #[arg(long = "L")]
    pub l: Option<f64>,
    #[arg(long = "S")]
    pub s: Option<f64>,
    #[arg(long = "T", allow_hyphen_values = true)]
    pub t: Option<f64>,
    /// Spin structure bits, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub delta: Vec<u8>,
    /// Window `lo,hi` in units of π.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',', num_args = 1, default_value = "-15,15")]
    pub window: Vec<f64>,
    /// Flow direction `x,y,z` (default: an invariant direction of the holonomy).
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    pub xi: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct DeformArgs {
    #[command(flatten)]
    pub target: ManifoldArg,
    #[arg(long)]
    pub t: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: f64,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct DumpArgs {
    #[command(flatten)]
    pub target: ManifoldArg,
    /// Output file (stdout when omitted).
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

fn parse_key_value(s: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got '{s}'"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("{k}: {e}"))?;
    Ok((k.trim().to_string(), v))
}

/// Parameter grid from `lo:hi:step` (endpoint included) or a single value.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

fn parse_grid(s: &str) -> std::result::Result<Grid, String> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("'{p}': {e}")))
        .collect::<std::result::Result<_, _>>()?;
    match parts[..] {
        [v] => Ok(Grid(vec![v])),
        [lo, hi, step] if step > 0.0 && lo <= hi => {
            let n = ((hi - lo) / step + 1e-9).floor() as usize;
            Ok(Grid((0..=n).map(|k| lo + step * k as f64).collect()))
        }
        _ => Err(format!("expected lo:hi:step with step > 0, got '{s}'")),
    }
}

/// `x` rounded to `digits` significant digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", digits - 1, x).parse().unwrap_or(x)
}

/// Human-readable number with six significant digits.
pub fn fmt6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let e = x.abs().log10().floor() as i32;
    if (-4..6).contains(&e) {
        let s = format!("{:.*}", (5 - e).max(0) as usize, x);
        let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
        if s == "-0" { "0".into() } else { s }
    } else {
        format!("{x:.5e}")
    }
}

fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                if let Some(r) = serde_json::Number::from_f64(round_sig(x, 12)) {
                    *n = r;
                }
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_json),
        Value::Object(o) => o.values_mut().for_each(round_json),
        _ => {}
    }
}

fn print_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    let mut v = serde_json::to_value(value).map_err(|e| Error::Unsupported(e.to_string()))?;
    round_json(&mut v);
    writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json")).map_err(io_err)
}

fn io_err(e: std::io::Error) -> Error {
    Error::Unsupported(format!("write failed: {e}"))
}

/// Catalog name or descriptor path.
pub fn resolve_manifold(target: &ManifoldArg) -> Result<(ZooEntry, ZooParams)> {
    let params: ZooParams = target.params.iter().cloned().collect();
    let looks_like_file = target.manifold.ends_with(".json") || Path::new(&target.manifold).is_file();
    if looks_like_file {
        if !params.is_empty() {
            return Err(Error::InvalidParameter("--param applies to catalog names, not descriptor files".into()));
        }
        let d = Descriptor::load(Path::new(&target.manifold))?;
        let p = d.parameters.clone();
        return Ok((d.to_entry()?, p));
    }
    Ok((zoo::build(&target.manifold, &params)?, params))
}

/// Solutions at `p`: the kernel on homogeneous models, closed-form witnesses (after
/// any circle quotient) on charts.
pub fn solutions(entry: &ZooEntry, geo: &FlowGeometry, rep: &CliffordRep, p: TksParams) -> Result<(usize, Vec<SpinorField>)> {
    if geo.is_homogeneous() {
        let k = solve_homogeneous(geo, rep, p)?;
        return Ok((k.dim(), k.fields()));
    }
    match entry.witnesses(rep, p)? {
        Some(fam) => {
            let fam = fam.descend(&entry.manifold)?;
            Ok((fam.rank(&entry.manifold)?, fam.members))
        }
        None => Ok((0, Vec::new())),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub manifold: String,
    pub kind: &'static str,
    pub alpha: f64,
    pub beta: f64,
    pub kernel_dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_dim: Option<ExpectedDim>,
    pub tolerance: f64,
    pub tks_residual: f64,
    pub identities: IdentityReport,
    pub notes: Vec<String>,
    pub passed: bool,
}

/// Solve at `(alpha, beta)`, run every applicable identity on each solution and compare
/// the dimension with the entry's declared expectation.
pub fn verify_entry(entry: &ZooEntry, alpha: f64, beta: f64, tol: Option<f64>) -> Result<VerifyReport> {
    let geo = FlowGeometry::new(&entry.manifold)?;
    let rep = CliffordRep::new(geo.dim())?;
    let tol = tol.unwrap_or(geo.tolerance());
    let p = TksParams::real(alpha, beta);
    let (kernel_dim, fields) = solutions(entry, &geo, &rep, p)?;
    let mut notes = Vec::new();
    if kernel_dim == 0 {
        notes.push(format!("no solutions at (alpha, beta) = ({}, {})", fmt6(alpha), fmt6(beta)));
    }
    let minimal = geo.points().iter().all(|pt| pt.kappa.amax() <= geo.tolerance());
    let sasakian = geo.sasaki_check().is_sasakian();
    let mut identities = IdentityReport::default();
    let mut tks_max: f64 = 0.0;
    for psi in &fields {
        tks_max = tks_max.max(tks_residual(&geo, &rep, psi, p)?.max());
        identities.merge("theorem", thm_main_residuals(&geo, &rep, psi, p)?);
        if geo.dim() == 3 {
            identities.merge("dim3", dim3_identities(&geo, &rep, psi, p)?);
            if minimal {
                identities.merge("minimal", dim3_minimal_identities(&geo, &rep, psi, p)?);
            }
        }
        if let (Some(m), true) = (entry.sasaki_m, sasakian) {
            if alpha * beta == 0.0 {
                identities.merge("sasaki", sasaki_identities(&geo, &rep, psi, p, m)?);
            }
        }
    }
    if entry.sasaki_m.is_some() && !sasakian {
        notes.push("declared Sasakian but the structure check fails; Sasakian identities skipped".into());
    }
    let expected_dim = entry
        .expected
        .iter()
        .find(|f| (f.alpha - alpha).abs() <= 1e-12 && (f.beta - beta).abs() <= 1e-12)
        .map(|f| f.kernel_dim);
    let dim_ok = expected_dim.is_none_or(|d| d.matches(kernel_dim));
    if !dim_ok {
        notes.push(format!("kernel dimension {kernel_dim} contradicts the declared {:?}", expected_dim.unwrap()));
    }
    let passed = dim_ok && tks_max <= tol && identities.passes(tol);
    Ok(VerifyReport {
        manifold: entry.manifold.name().to_string(),
        kind: if geo.is_homogeneous() { "homogeneous" } else { "chart" },
        alpha,
        beta,
        kernel_dim,
        expected_dim,
        tolerance: tol,
        tks_residual: tks_max,
        identities,
        notes,
        passed,
    })
}

fn status(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

fn print_verify(out: &mut dyn Write, r: &VerifyReport) -> std::io::Result<()> {
    writeln!(out, "{} ({}) at alpha = {}, beta = {}", r.manifold, r.kind, fmt6(r.alpha), fmt6(r.beta))?;
    let expected = match r.expected_dim {
        Some(ExpectedDim::Exact(d)) => format!(" (expected {d})"),
        Some(ExpectedDim::Nonzero) => " (expected nonzero)".into(),
        None => String::new(),
    };
    writeln!(out, "  kernel_dim = {}{expected}", r.kernel_dim)?;
    if r.kernel_dim > 0 {
        writeln!(out, "  {:<28} {:>12}  status", "check", "residual")?;
        writeln!(out, "  {:<28} {:>12}  {}", "tks", fmt6(r.tks_residual), status(r.tks_residual <= r.tolerance))?;
        for (k, v) in &r.identities.residuals {
            writeln!(out, "  {:<28} {:>12}  {}", k, fmt6(*v), status(*v <= r.tolerance))?;
        }
        for (k, v) in &r.identities.values {
            writeln!(out, "  {:<28} {:>12}  value", k, fmt6(*v))?;
        }
    }
    for n in &r.notes {
        writeln!(out, "  note: {n}")?;
    }
    writeln!(out, "  tolerance {}: {}", fmt6(r.tolerance), if r.passed { "PASS" } else { "FAIL" })
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let (entry, _) = resolve_manifold(&a.target)?;
    let points: Vec<(f64, f64)> = match (a.alpha, a.beta) {
        (Some(al), Some(be)) => vec![(al, be)],
        _ if entry.expected.is_empty() => {
            return Err(Error::InvalidParameter("no declared expectations; pass --alpha and --beta".into()))
        }
        _ => entry.expected.iter().map(|f| (f.alpha, f.beta)).collect(),
    };
    let reports = points
        .iter()
        .map(|(al, be)| verify_entry(&entry, *al, *be, a.tol))
        .collect::<Result<Vec<_>>>()?;
    match a.format {
        Format::Json => print_json(out, &reports)?,
        _ => {
            for r in &reports {
                print_verify(out, r).map_err(io_err)?;
            }
        }
    }
    Ok(if reports.iter().all(|r| r.passed) { EXIT_OK } else { EXIT_FAIL })
}

fn cmd_scan(a: &ScanArgs, out: &mut dyn Write) -> Result<i32> {
    let (entry, _) = resolve_manifold(&a.target)?;
    let geo = FlowGeometry::new(&entry.manifold)?;
    if !geo.is_homogeneous() {
        return Err(Error::WrongKind { expected: "homogeneous" });
    }
    let rep = CliffordRep::new(geo.dim())?;
    let alphas = a.alphas.clone().map_or_else(default_grid, |g| g.0);
    let betas = a.betas.clone().map_or_else(default_grid, |g| g.0);
    let mut rows = scan_params(&geo, &rep, &alphas, &betas)?;
    if a.nonzero {
        rows.retain(|r| r.kernel_dim > 0);
    }
    write_scan_csv(&rows, out)?;
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct AlphaRow {
    alpha: f64,
    alpha_over_pi: f64,
    dim: usize,
}

#[derive(Debug, Serialize)]
struct BieberbachReport {
    group: String,
    parameters: BTreeMap<String, f64>,
    delta_bits: Vec<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    xi: Option<[f64; 3]>,
    window_over_pi: [f64; 2],
    admissible: Vec<AlphaRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

fn cmd_bieberbach(a: &BieberbachArgs, out: &mut dyn Write) -> Result<i32> {
    use std::f64::consts::PI;
    let name: GroupName = a.group.parse()?;
    let [lo, hi] = a.window[..] else {
        return Err(Error::InvalidParameter("--window takes lo,hi".into()));
    };
    if lo > hi {
        return Err(Error::InvalidParameter("--window needs lo <= hi".into()));
    }
    let mut params = BTreeMap::new();
    for (k, v) in [("H", a.h), ("L", a.l), ("S", a.s), ("T", a.t)] {
        if let Some(v) = v {
            params.insert(k.to_string(), v);
        }
    }
    let group = BieberbachGroup::standard(name, &params)?;
    let fixed = invariant_xi(&group);
    let mut report = BieberbachReport {
        group: name.to_string(),
        parameters: group.parameters.clone(),
        delta_bits: a.delta.clone(),
        xi: None,
        window_over_pi: [lo, hi],
        admissible: Vec::new(),
        note: None,
    };
    if fixed.dim() == 0 {
        report.note = Some("no invariant flow direction".into());
    } else {
        let xi = match &a.xi {
            Some(v) => {
                let [x, y, z] = v[..] else {
                    return Err(Error::InvalidParameter("--xi takes three components".into()));
                };
                let v = Vector3::new(x, y, z);
                let n = v.norm();
                if !(n > 0.0) {
                    return Err(Error::InvalidParameter("--xi must be nonzero".into()));
                }
                v / n
            }
            None => *fixed.basis.last().expect("nonempty"),
        };
        let delta = if a.delta.is_empty() { vec![0; name.delta_count()] } else { a.delta.clone() };
        let lift = lift_generators(&group, &delta)?;
        report.delta_bits = lift.delta_bits.clone();
        report.xi = Some([xi.x, xi.y, xi.z]);
        report.admissible = admissible_alphas(&group, &lift, &xi, lo * PI, hi * PI)?
            .into_iter()
            .map(|s| AlphaRow { alpha: s.alpha, alpha_over_pi: s.alpha / PI, dim: s.dim })
            .collect();
    }
    match a.format {
        Format::Json => print_json(out, &report)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in &report.admissible {
                w.serialize(r).map_err(|e| Error::Unsupported(e.to_string()))?;
            }
            w.flush().map_err(io_err)?;
        }
        Format::Table => {
            writeln!(out, "{} {:?} delta = {:?}", report.group, report.parameters, report.delta_bits).map_err(io_err)?;
            if let Some(n) = &report.note {
                writeln!(out, "  {n}").map_err(io_err)?;
            }
            writeln!(out, "  {:>14} {:>10} {:>4}", "alpha", "alpha/pi", "dim").map_err(io_err)?;
            for r in &report.admissible {
                writeln!(out, "  {:>14} {:>10} {:>4}", fmt6(r.alpha), fmt6(r.alpha_over_pi), r.dim).map_err(io_err)?;
            }
        }
    }
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct DeformReport {
    manifold: String,
    t: f64,
    alpha: f64,
    beta: f64,
    transported_alpha: f64,
    transported_beta: f64,
    solutions: usize,
    max_input_residual: f64,
    max_transported_residual: f64,
    /// Dimension of the solution space at the transported parameters on the deformed manifold.
    deformed_kernel_dim: Option<usize>,
    passed: bool,
}

fn cmd_deform(a: &DeformArgs, out: &mut dyn Write) -> Result<i32> {
    let (entry, _) = resolve_manifold(&a.target)?;
    let geo = FlowGeometry::new(&entry.manifold)?;
    let rep = CliffordRep::new(geo.dim())?;
    let tol = a.tol.unwrap_or(geo.tolerance());
    let p = TksParams::real(a.alpha, a.beta);
    let (dim, fields) = solutions(&entry, &geo, &rep, p)?;
    if fields.is_empty() {
        writeln!(out, "no solutions at (alpha, beta) = ({}, {}); nothing to transport", fmt6(a.alpha), fmt6(a.beta))
            .map_err(io_err)?;
        return Ok(EXIT_FAIL);
    }
    let mut r_in: f64 = 0.0;
    let mut r_out: f64 = 0.0;
    let mut moved_params = p;
    let mut deformed = None;
    for psi in &fields {
        r_in = r_in.max(tks_residual(&geo, &rep, psi, p)?.max());
        let moved = transport_tks(&geo, &rep, psi, p, a.t)?;
        r_out = r_out.max(moved.residual);
        moved_params = moved.params;
        deformed = Some(moved.manifold);
    }
    let deformed = deformed.expect("nonempty");
    let deformed_kernel_dim = if deformed.is_homogeneous() {
        let g = FlowGeometry::new(&deformed)?;
        Some(solve_homogeneous(&g, &rep, moved_params)?.dim())
    } else {
        None
    };
    let report = DeformReport {
        manifold: entry.manifold.name().to_string(),
        t: a.t,
        alpha: a.alpha,
        beta: a.beta,
        transported_alpha: moved_params.alpha.re,
        transported_beta: moved_params.beta.re,
        solutions: dim,
        max_input_residual: r_in,
        max_transported_residual: r_out,
        deformed_kernel_dim,
        passed: r_out <= tol && deformed_kernel_dim.is_none_or(|d| d == dim),
    };
    match a.format {
        Format::Json => print_json(out, &report)?,
        _ => {
            let w = &mut *out;
            (|| -> std::io::Result<()> {
                writeln!(w, "{} deformed by t = {}", report.manifold, fmt6(report.t))?;
                writeln!(w, "  ({}, {}) -> ({}, {})", fmt6(report.alpha), fmt6(report.beta), fmt6(report.transported_alpha), fmt6(report.transported_beta))?;
                writeln!(w, "  solutions transported: {}", report.solutions)?;
                writeln!(w, "  input residual:        {}", fmt6(report.max_input_residual))?;
                writeln!(w, "  transported residual:  {}", fmt6(report.max_transported_residual))?;
                if let Some(d) = report.deformed_kernel_dim {
                    writeln!(w, "  kernel dim after:      {d}")?;
                }
                writeln!(w, "  tolerance {}: {}", fmt6(tol), if report.passed { "PASS" } else { "FAIL" })
            })()
            .map_err(io_err)?;
        }
    }
    Ok(if report.passed { EXIT_OK } else { EXIT_FAIL })
}

fn cmd_catalog(a: &FormatArg, out: &mut dyn Write) -> Result<i32> {
    let items = zoo::list_catalog();
    match a.format {
        Format::Json => print_json(out, &items)?,
        _ => {
            for it in &items {
                let params: Vec<String> = it.params.iter().map(|p| format!("{}={}", p.name, fmt6(p.default))).collect();
                writeln!(out, "{:<12} {:<12} {:<50} {}", it.name, it.kind, it.summary, params.join(" ")).map_err(io_err)?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_dump(a: &DumpArgs, out: &mut dyn Write) -> Result<i32> {
    let (entry, params) = resolve_manifold(&a.target)?;
    let text = Descriptor::from_entry(&entry, &params)?.to_json();
    match &a.out {
        Some(path) => std::fs::write(path, text + "\n").map_err(|e| Error::Descriptor(format!("{}: {e}", path.display())))?,
        None => writeln!(out, "{text}").map_err(io_err)?,
    }
    Ok(EXIT_OK)
}

/// Parse `args` and run; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{}", e.render()) } else { write!(out, "{}", e.render()) };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Verify(a) => cmd_verify(a, out),
        Command::Scan(a) => cmd_scan(a, out),
        Command::Bieberbach(a) => cmd_bieberbach(a, out),
        Command::Deform(a) => cmd_deform(a, out),
        Command::Catalog(a) => cmd_catalog(a, out),
        Command::Dump(a) => cmd_dump(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}
