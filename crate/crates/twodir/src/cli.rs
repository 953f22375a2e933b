//! Command-line surface.
//!
//! Exit codes: 0 for success (and passing checks), 1 when a check fails
//! (Condition E, comparison tolerance), 2 for usage and file errors.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{
    cascade_samples, compare_methods, quadrature_moment, vanishing_moments, VanishingCount,
};
use crate::error::{Error, Result};
use crate::io::{bundled_examples, resolve_mask};
use crate::mask::doubled_mask_at_one;
use crate::matrix::{vec_inf_norm, vec_sub};
use crate::moments::discrete::{scaling_moment, wavelet_moment};
use crate::moments::doubling::moments_by_doubling;
use crate::moments::separation::moments_by_separation;
use crate::moments::DEFAULT_MAX_ORDER;
use crate::spectral::{condition_e, ConditionEReport, DEFAULT_EIG_ONE_TOL};
use crate::{MaskBundle, Real};

/// Default tolerance for calling a wavelet moment vanished.
const VANISH_TOL: Real = 1e-10;

#[derive(Parser)]
#[command(
    name = "twodir",
    version,
    about = "Moments of two-direction multiscaling functions and multiwavelets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Condition E diagnostics for a mask (doubled and separated checks)
    Check {
        /// Bundled example name or path to a mask file
        mask: String,
        /// Tolerance for the eigenvalue-1 test
        #[arg(long, default_value_t = DEFAULT_EIG_ONE_TOL)]
        tol: f64,
    },
    /// Compute continuous moments
    Moments {
        mask: String,
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
        #[arg(long, default_value_t = DEFAULT_MAX_ORDER)]
        max_order: usize,
        #[arg(long, value_enum, default_value_t = FormatArg::Table)]
        format: FormatArg,
        /// Flip the sign of the zeroth moment (and with it every moment)
        #[arg(long)]
        flip_sign: bool,
    },
    /// Diff the two computation methods elementwise
    Compare {
        mask: String,
        #[arg(long, default_value_t = DEFAULT_MAX_ORDER)]
        max_order: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Cross-check the recursion against the cascade-quadrature oracle
    Oracle {
        mask: String,
        #[arg(long, default_value_t = 12)]
        iterations: u32,
        #[arg(long, default_value_t = 12)]
        level: u32,
        #[arg(long, default_value_t = 2)]
        max_order: usize,
        /// Write the sampled function as CSV
        #[arg(long)]
        dump_csv: Option<PathBuf>,
    },
    /// Manage the bundled example masks
    Examples {
        #[command(subcommand)]
        action: ExamplesAction,
    },
}

#[derive(Subcommand)]
enum ExamplesAction {
    /// List bundled mask names
    List,
    /// Write the bundled mask files into a directory
    Export { dir: PathBuf },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Doubling,
    Separation,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Table,
    Json,
}

/// Run the CLI against explicit arguments and output sinks; returns the
/// process exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    return 0;
                }
                _ => 2,
            };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code_for(&e)
        }
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Io(_)
        | Error::Json(_)
        | Error::MaskFile(_)
        | Error::UnknownExample(_)
        | Error::BadEntry { .. }
        | Error::Expr(_)
        | Error::Invalid(_) => 2,
        _ => 1,
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Check { mask, tol } => cmd_check(&mask, tol, out),
        Command::Moments {
            mask,
            method,
            max_order,
            format,
            flip_sign,
        } => cmd_moments(&mask, method, max_order, format, flip_sign, out),
        Command::Compare {
            mask,
            max_order,
            tol,
        } => cmd_compare(&mask, max_order, tol, out),
        Command::Oracle {
            mask,
            iterations,
            level,
            max_order,
            dump_csv,
        } => cmd_oracle(&mask, iterations, level, max_order, dump_csv.as_deref(), out),
        Command::Examples { action } => cmd_examples(action, out),
    }
}

fn write_condition_report(
    label: &str,
    report: &ConditionEReport<Real>,
    out: &mut dyn Write,
) -> Result<()> {
    writeln!(out, "{label}:")?;
    write!(out, "  eigenvalues:")?;
    for l in &report.eigenvalues {
        if l.im == 0.0 {
            write!(out, " {:.7}", l.re)?;
        } else {
            write!(out, " {:.7}{:+.7}i", l.re, l.im)?;
        }
    }
    writeln!(out)?;
    writeln!(
        out,
        "  simple eigenvalue 1: {}   rest inside unit disk: {}   Condition E: {}",
        verdict(report.has_simple_one),
        verdict(report.spectral_ok),
        verdict(report.satisfied)
    )?;
    Ok(())
}

fn verdict(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "NO"
    }
}

fn cmd_check(mask_arg: &str, tol: f64, out: &mut dyn Write) -> Result<i32> {
    let bundle = resolve_mask(mask_arg)?;
    writeln!(
        out,
        "mask: {} (dilation {}, multiplicity {})",
        bundle.scaling.name(),
        bundle.scaling.dilation(),
        bundle.scaling.multiplicity()
    )?;
    let doubled = condition_e(&doubled_mask_at_one(&bundle.scaling), tol)?;
    write_condition_report("doubled mask at 1 (2r x 2r)", &doubled, out)?;
    let separated = condition_e(&scaling_moment(&bundle.scaling, 0).total, tol)?;
    write_condition_report("zeroth discrete moment (r x r)", &separated, out)?;
    let ok = doubled.satisfied && separated.satisfied;
    writeln!(out, "overall: {}", if ok { "PASS" } else { "FAIL" })?;
    Ok(if ok { 0 } else { 1 })
}

#[derive(Serialize)]
struct DiscreteJson {
    order: usize,
    total: Vec<Vec<Real>>,
    positive: Vec<Vec<Real>>,
    negative: Vec<Vec<Real>>,
}

#[derive(Serialize)]
struct VanishingJson {
    count: usize,
    exhausted: bool,
}

/// Moment table for one method: discrete and continuous moments with the
/// method recorded as provenance.
#[derive(Serialize)]
struct MomentTable {
    mask: String,
    dilation: u32,
    multiplicity: usize,
    method: String,
    max_order: usize,
    discrete_scaling: Vec<DiscreteJson>,
    discrete_wavelets: BTreeMap<u32, Vec<DiscreteJson>>,
    scaling: Vec<Vec<Real>>,
    wavelets: BTreeMap<u32, Vec<Vec<Real>>>,
    vanishing: BTreeMap<u32, VanishingJson>,
}

fn matrix_rows(m: &crate::Matrix) -> Vec<Vec<Real>> {
    (0..m.rows()).map(|i| m.row(i)).collect()
}

fn build_table(
    bundle: &MaskBundle,
    method: &str,
    max_order: usize,
    scaling: Vec<Vec<Real>>,
    wavelets: BTreeMap<u32, Vec<Vec<Real>>>,
) -> MomentTable {
    let d = bundle.scaling.dilation();
    let r = bundle.scaling.multiplicity();
    let discrete_scaling = (0..=max_order)
        .map(|j| {
            let s = scaling_moment(&bundle.scaling, j);
            DiscreteJson {
                order: j,
                total: matrix_rows(&s.total),
                positive: matrix_rows(&s.positive),
                negative: matrix_rows(&s.negative),
            }
        })
        .collect();
    let discrete_wavelets = bundle
        .wavelets
        .iter()
        .map(|w| {
            let series = (0..=max_order)
                .map(|j| {
                    let s = wavelet_moment(w, d, r, j);
                    DiscreteJson {
                        order: j,
                        total: matrix_rows(&s.total),
                        positive: matrix_rows(&s.positive),
                        negative: matrix_rows(&s.negative),
                    }
                })
                .collect();
            (w.branch(), series)
        })
        .collect();
    let vanishing = wavelets
        .iter()
        .map(|(&s, series)| {
            let VanishingCount { count, exhausted } = vanishing_moments(series, VANISH_TOL);
            (s, VanishingJson { count, exhausted })
        })
        .collect();
    MomentTable {
        mask: bundle.scaling.name().to_string(),
        dilation: d,
        multiplicity: r,
        method: method.to_string(),
        max_order,
        discrete_scaling,
        discrete_wavelets,
        scaling,
        wavelets,
        vanishing,
    }
}

fn format_vector(v: &[Real]) -> String {
    v.iter()
        .map(|&x| {
            // values below table resolution print as a clean zero
            let x = if x.abs() < 5e-8 { 0.0 } else { x };
            format!("{x:>12.7}")
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn write_table(table: &MomentTable, out: &mut dyn Write) -> Result<()> {
    writeln!(out, "method: {}", table.method)?;
    writeln!(out, "  scaling moments m_j")?;
    for (j, v) in table.scaling.iter().enumerate() {
        writeln!(out, "    j {j}: {}", format_vector(v))?;
    }
    for (branch, series) in &table.wavelets {
        writeln!(out, "  wavelet branch {branch} moments n_j")?;
        for (j, v) in series.iter().enumerate() {
            writeln!(out, "    j {j}: {}", format_vector(v))?;
        }
        let v = &table.vanishing[branch];
        if v.exhausted {
            writeln!(
                out,
                "  vanishing moments (branch {branch}): all {} computed orders vanish; raise --max-order to certify more",
                v.count
            )?;
        } else {
            writeln!(
                out,
                "  vanishing moments (branch {branch}): {} (approximation order {})",
                v.count, v.count
            )?;
        }
    }
    Ok(())
}

fn flip(mut series: Vec<Vec<Real>>) -> Vec<Vec<Real>> {
    for v in series.iter_mut() {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
    series
}

fn cmd_moments(
    mask_arg: &str,
    method: MethodArg,
    max_order: usize,
    format: FormatArg,
    flip_sign: bool,
    out: &mut dyn Write,
) -> Result<i32> {
    let bundle = resolve_mask(mask_arg)?;
    let mut tables = Vec::new();
    if method == MethodArg::Doubling || method == MethodArg::Both {
        let m = moments_by_doubling(&bundle, max_order)?;
        let (mut s, mut w) = (m.scaling, m.wavelets);
        if flip_sign {
            s = flip(s);
            w = w.into_iter().map(|(k, v)| (k, flip(v))).collect();
        }
        tables.push(build_table(&bundle, "doubling", max_order, s, w));
    }
    if method == MethodArg::Separation || method == MethodArg::Both {
        let m = moments_by_separation(&bundle, max_order)?;
        let (mut s, mut w) = (m.scaling, m.wavelets);
        if flip_sign {
            s = flip(s);
            w = w.into_iter().map(|(k, v)| (k, flip(v))).collect();
        }
        tables.push(build_table(&bundle, "separation", max_order, s, w));
    }
    match format {
        FormatArg::Json => {
            writeln!(out, "{}", serde_json::to_string_pretty(&tables)?)?;
        }
        FormatArg::Table => {
            writeln!(
                out,
                "mask: {} (dilation {}, multiplicity {})",
                bundle.scaling.name(),
                bundle.scaling.dilation(),
                bundle.scaling.multiplicity()
            )?;
            for table in &tables {
                write_table(table, out)?;
            }
        }
    }
    Ok(0)
}

fn cmd_compare(mask_arg: &str, max_order: usize, tol: f64, out: &mut dyn Write) -> Result<i32> {
    let bundle = resolve_mask(mask_arg)?;
    let report = compare_methods(&bundle, max_order, tol)?;
    writeln!(
        out,
        "doubling vs separation on {} up to order {max_order}",
        bundle.scaling.name()
    )?;
    for (j, diff) in report.per_order.iter().enumerate() {
        writeln!(out, "  order {j}: max |difference| = {diff:.3e}")?;
    }
    writeln!(
        out,
        "overall max {:.3e} against tolerance {:.3e}: {}",
        report.overall_max,
        report.tolerance,
        if report.pass { "PASS" } else { "FAIL" }
    )?;
    Ok(if report.pass { 0 } else { 1 })
}

fn cmd_oracle(
    mask_arg: &str,
    iterations: u32,
    level: u32,
    max_order: usize,
    dump_csv: Option<&std::path::Path>,
    out: &mut dyn Write,
) -> Result<i32> {
    let bundle = resolve_mask(mask_arg)?;
    let recursion = moments_by_doubling(&bundle, max_order)?;
    let sampled = cascade_samples(&bundle.scaling, iterations, level)?;
    writeln!(
        out,
        "cascade oracle on {}: {} iterations, grid level {} over [{}, {}]",
        bundle.scaling.name(),
        iterations,
        level,
        sampled.grid_min,
        -sampled.grid_min
    )?;
    for j in 0..=max_order {
        let oracle = quadrature_moment(&sampled, j);
        let diff = vec_inf_norm(&vec_sub(&oracle, &recursion.doubled_scaling[j]));
        writeln!(
            out,
            "  order {j}: quadrature {} | recursion {} | max deviation {diff:.3e}",
            format_vector(&oracle),
            format_vector(&recursion.doubled_scaling[j]),
        )?;
    }
    if let Some(path) = dump_csv {
        let mut file = std::fs::File::create(path)?;
        let components = sampled.values.first().map_or(0, Vec::len);
        let header: Vec<String> = std::iter::once("x".to_string())
            .chain((1..=components).map(|i| format!("component_{i}")))
            .collect();
        writeln!(file, "{}", header.join(","))?;
        for i in 0..sampled.len() {
            let row: Vec<String> = std::iter::once(format!("{}", sampled.x(i)))
                .chain(sampled.values[i].iter().map(|v| format!("{v}")))
                .collect();
            writeln!(file, "{}", row.join(","))?;
        }
        writeln!(out, "samples written to {}", path.display())?;
    }
    Ok(0)
}

fn cmd_examples(action: ExamplesAction, out: &mut dyn Write) -> Result<i32> {
    match action {
        ExamplesAction::List => {
            for (name, _) in bundled_examples() {
                writeln!(out, "{name}")?;
            }
        }
        ExamplesAction::Export { dir } => {
            std::fs::create_dir_all(&dir)?;
            for (name, text) in bundled_examples() {
                let path = dir.join(format!("{name}.json"));
                std::fs::write(&path, text)?;
                writeln!(out, "wrote {}", path.display())?;
            }
        }
    }
    Ok(0)
}
