//! The `tropkit` command line.
//!
//! Exit codes: 0 when the checked property holds, 1 when it fails (the
//! report carries a witness), 2 for unreadable input or bad usage.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::cycles::{check_balancing, local_dimension, star, TropicalCycle};
use crate::document::{describe, format_zvec, read_json, CycleDocument, FunctionDocument, LoadedCycle};
use crate::error::Error;
use crate::geometry::rational::{format_rational, format_vec, parse_rational, to_zvec};
use crate::geometry::{is_zgamma, QVec, ZGammaReport};
use crate::maxprinciple::{slicing_trace, verify_max_principle, MaxPrincipleVerdict, TraceNode};
use crate::plfunc::{check_psh, corner_locus, PiecewiseFunction};
use crate::slicing::{sample_generic_hyperplane, stable_intersect, RationalHyperplane};

#[derive(Debug, Parser)]
#[command(name = "tropkit", version, about = "Exact computations with tropical cycles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Machine-readable report.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for hyperplane sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the resulting cycle (or trace) to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the complex axioms and report the face closure.
    Validate { cycle: PathBuf },
    /// Check the balancing condition.
    Balance { cycle: PathBuf },
    /// Star of the cycle at a point.
    Star {
        cycle: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Local dimension at a point.
    LocalDim {
        cycle: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Corner locus of a function on the cycle.
    CornerLocus { cycle: PathBuf, function: PathBuf },
    /// Weak tropical plurisubharmonicity check.
    PshCheck { cycle: PathBuf, function: PathBuf },
    /// Intersection with the hyperplane `normal · x = offset`.
    Slice {
        cycle: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        normal: String,
        #[arg(long, allow_hyphen_values = true)]
        offset: String,
    },
    /// Sample a generic hyperplane through one or two points.
    SampleHyperplane {
        cycle: PathBuf,
        /// One point, or two points separated by `;` (or concatenated).
        #[arg(long, allow_hyphen_values = true)]
        through: String,
    },
    /// Local constancy at a local maximum of a psh function.
    MaxPrinciple {
        cycle: PathBuf,
        function: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Slicing trace of a fan at the origin.
    Trace { cycle: PathBuf, function: PathBuf },
}

/// Outcome of one command: the report text and the exit code.
struct Outcome {
    code: i32,
    text: String,
}

impl Outcome {
    fn new(holds: bool, text: String) -> Self {
        Outcome { code: if holds { 0 } else { 1 }, text }
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn parse_point(s: &str) -> Result<QVec, Error> {
    s.split(',')
        .map(|t| parse_rational(t.trim()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| usage(format!("bad vector {s:?}: {e}")))
}

fn parse_point_n(s: &str, n: usize) -> Result<QVec, Error> {
    let p = parse_point(s)?;
    if p.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: p.len() });
    }
    Ok(p)
}

fn parse_through(s: &str, n: usize) -> Result<Vec<QVec>, Error> {
    if s.contains(';') {
        return s.split(';').map(|p| parse_point_n(p, n)).collect();
    }
    let flat = parse_point(s)?;
    match flat.len() {
        l if l == n => Ok(vec![flat]),
        l if l == 2 * n => Ok(vec![flat[..n].to_vec(), flat[n..].to_vec()]),
        l => Err(usage(format!("--through needs {n} or {} coordinates, got {l}", 2 * n))),
    }
}

fn load_cycle(path: &Path, mixed: bool) -> Result<LoadedCycle, Error> {
    let doc: CycleDocument = read_json(path)?;
    doc.load(mixed).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn load_function(path: &Path, cycle: &LoadedCycle) -> Result<PiecewiseFunction, Error> {
    let doc: FunctionDocument = read_json(path)?;
    doc.load(cycle).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize") + "\n"
}

fn write_out(path: &Option<PathBuf>, text: &str) -> Result<(), Error> {
    if let Some(p) = path {
        std::fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn write_cycle(path: &Option<PathBuf>, c: &TropicalCycle) -> Result<(), Error> {
    if path.is_some() {
        write_out(path, &to_json(&CycleDocument::from_cycle(c)?))?;
    }
    Ok(())
}

fn plural(k: usize, word: &str) -> String {
    if k == 1 {
        format!("{k} {word}")
    } else {
        format!("{k} {word}s")
    }
}

fn cycle_listing(c: &TropicalCycle) -> String {
    let mut s = String::new();
    for (i, p, w) in c.maximal_cells() {
        s.push_str(&format!("  cell {i}: weight {w}, {}\n", describe(p)));
    }
    s
}

#[derive(Serialize)]
struct ValidateReport {
    valid: bool,
    maximal_cells: usize,
    dim: i64,
    pure: bool,
    added_faces: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    zgamma: Option<Vec<ZGammaCell>>,
}

#[derive(Serialize)]
struct ZGammaCell {
    cell: usize,
    holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<String>,
}

impl ZGammaCell {
    fn new(cell: usize, r: &ZGammaReport) -> Self {
        let witness = r.witness.as_ref().map(|w| {
            format!("{} . x + {} >= 0", format_vec(&w.linear), format_rational(&w.constant))
        });
        ZGammaCell { cell, holds: r.holds, witness }
    }
}

fn validate(cli: &Cli, path: &Path) -> Result<Outcome, Error> {
    let loaded = match load_cycle(path, true) {
        Ok(l) => l,
        Err(e @ Error::IntersectionAxiomViolated(..)) => {
            let text = if cli.json {
                to_json(&serde_json::json!({ "valid": false, "error": e.to_string() }))
            } else {
                format!("invalid: {e}\n")
            };
            return Ok(Outcome::new(false, text));
        }
        Err(e) => return Err(e),
    };
    let c = &loaded.cycle;
    let zgamma: Option<Vec<_>> = loaded.gamma_generators.as_ref().map(|g| {
        c.maximal_cells()
            .map(|(i, p, _)| ZGammaCell::new(i, &is_zgamma(p, g)))
            .collect()
    });
    let zgamma_ok = zgamma.as_ref().is_none_or(|r| r.iter().all(|x| x.holds));
    let report = ValidateReport {
        valid: c.is_pure() && zgamma_ok,
        maximal_cells: c.weights().len(),
        dim: c.dim(),
        pure: c.is_pure(),
        added_faces: loaded.closure.added_faces,
        zgamma,
    };
    let text = if cli.json {
        to_json(&report)
    } else {
        let mut s = format!(
            "{}: {}, dimension {}{}, {} added by face closure\n",
            if report.valid { "valid" } else { "invalid" },
            plural(report.maximal_cells, "maximal cell"),
            report.dim,
            if report.pure { "" } else { " (not pure)" },
            plural(report.added_faces, "face"),
        );
        if let Some(z) = &report.zgamma {
            for r in z.iter().filter(|r| !r.holds) {
                s.push_str(&format!("  cell {} is not (Z,Gamma)-polyhedral: {}\n", r.cell, r.witness.as_deref().unwrap_or("")));
            }
        }
        s
    };
    Ok(Outcome::new(report.valid, text))
}

fn balance(cli: &Cli, path: &Path) -> Result<Outcome, Error> {
    let loaded = load_cycle(path, false)?;
    let c = &loaded.cycle;
    let r = check_balancing(c);
    let text = if cli.json {
        to_json(&r)
    } else if r.verdict {
        format!("balanced: {} checked\n", plural(r.checked, "codim-1 face"))
    } else {
        let mut s = format!(
            "not balanced: {} of {} violate balancing\n",
            r.violations.len(),
            plural(r.checked, "codim-1 face")
        );
        for v in &r.violations {
            s.push_str(&format!("  face {} ({}): excess {}\n", v.face, describe(c.cell(v.face)), format_zvec(&v.excess)));
        }
        s
    };
    Ok(Outcome::new(r.verdict, text))
}

fn star_cmd(cli: &Cli, path: &Path, point: &str) -> Result<Outcome, Error> {
    let loaded = load_cycle(path, true)?;
    let omega = parse_point_n(point, loaded.cycle.ambient_dim())?;
    let s = star(&loaded.cycle, &omega)?;
    write_cycle(&cli.out, &s)?;
    let text = if cli.json {
        to_json(&CycleDocument::from_cycle(&s)?)
    } else {
        format!("star at {}: {}\n{}", format_vec(&omega), plural(s.weights().len(), "cone"), cycle_listing(&s))
    };
    Ok(Outcome::new(true, text))
}

fn local_dim_cmd(cli: &Cli, path: &Path, point: &str) -> Result<Outcome, Error> {
    let loaded = load_cycle(path, true)?;
    let omega = parse_point_n(point, loaded.cycle.ambient_dim())?;
    let d = local_dimension(&loaded.cycle, &omega)?;
    let text = if cli.json {
        to_json(&d)
    } else if d.is_pure {
        format!("local dimension at {}: {} (pure)\n", format_vec(&omega), d.max_dim)
    } else {
        format!("local dimension at {}: {}..{} (not pure)\n", format_vec(&omega), d.min_dim, d.max_dim)
    };
    Ok(Outcome::new(true, text))
}

#[derive(Serialize)]
struct CornerCellReport {
    face: usize,
    cell: String,
    #[serde(serialize_with = "crate::document::ser_form")]
    weight: crate::geometry::AffineForm,
}

fn corner_cmd(cli: &Cli, cycle: &Path, function: &Path) -> Result<Outcome, Error> {
    let loaded = load_cycle(cycle, false)?;
    let f = load_function(function, &loaded)?;
    let locus = corner_locus(&f)?;
    let constant = locus.cells().iter().all(|c| c.weight.is_constant());
    if constant {
        write_cycle(&cli.out, &locus.to_cycle()?)?;
    } else if cli.out.is_some() {
        return Err(usage("corner locus has non-constant weights and cannot be written as a cycle"));
    }
    let text = if cli.json {
        let cells: Vec<CornerCellReport> = locus
            .cells()
            .iter()
            .map(|c| CornerCellReport { face: c.face, cell: describe(&c.cell), weight: c.weight.clone() })
            .collect();
        to_json(&serde_json::json!({ "dim": locus.dim(), "cells": cells }))
    } else {
        let mut s = format!("corner locus: dimension {}, {}\n", locus.dim(), plural(locus.cells().len(), "cell"));
        for c in locus.cells() {
            let w = if c.weight.is_constant() {
                format_rational(&c.weight.constant)
            } else {
                format!("{} . x + {}", format_vec(&c.weight.linear), format_rational(&c.weight.constant))
            };
            s.push_str(&format!("  face {} ({}): weight {w}\n", c.face, describe(&c.cell)));
        }
        s
    };
    Ok(Outcome::new(true, text))
}

fn psh_cmd(cli: &Cli, cycle: &Path, function: &Path) -> Result<Outcome, Error> {
    let loaded = load_cycle(cycle, false)?;
    let f = load_function(function, &loaded)?;
    let r = check_psh(&f)?;
    let text = if cli.json {
        to_json(&r)
    } else if r.verdict {
        "psh: facewise Hessians positive semidefinite, corner weights nonnegative\n".to_string()
    } else {
        let mut s = "not psh\n".to_string();
        for h in &r.hessian_violations {
            s.push_str(&format!(
                "  cell {}: Hessian value {} along {}\n",
                h.cell,
                format_rational(&h.value),
                format_vec(&h.direction)
            ));
        }
        for c in &r.corner_violations {
            s.push_str(&format!(
                "  face {} ({}): corner weight {} at {}\n",
                c.face,
                describe(f.cycle().cell(c.face)),
                format_rational(&c.value),
                format_vec(&c.point)
            ));
        }
        s
    };
    Ok(Outcome::new(r.verdict, text))
}

fn slice_cmd(cli: &Cli, path: &Path, normal: &str, offset: &str) -> Result<Outcome, Error> {
    let loaded = load_cycle(path, false)?;
    let n = loaded.cycle.ambient_dim();
    let normal = parse_point_n(normal, n)?;
    if normal.iter().any(|x| !x.is_integer()) {
        return Err(usage("--normal must be an integer vector"));
    }
    let offset = parse_rational(offset.trim()).map_err(|e| usage(format!("bad --offset: {e}")))?;
    let h = RationalHyperplane::new(to_zvec(&normal), offset)?;
    let out = match stable_intersect(&loaded.cycle, &h) {
        Ok(c) => c,
        Err(Error::NotGeneric(cert)) => {
            let text = if cli.json {
                to_json(&cert)
            } else {
                let mut s = "not generic: hyperplane contains positive-dimensional cells\n".to_string();
                for &i in &cert.offenders {
                    s.push_str(&format!("  cell {i}: {}\n", describe(loaded.cycle.cell(i))));
                }
                s
            };
            return Ok(Outcome::new(false, text));
        }
        Err(Error::NotBalanced(r)) => return Ok(Outcome::new(false, not_balanced_text(cli, &loaded.cycle, &r))),
        Err(e) => return Err(e),
    };
    write_cycle(&cli.out, &out)?;
    let text = if cli.json {
        to_json(&CycleDocument::from_cycle(&out)?)
    } else {
        format!("slice: dimension {}, {}\n{}", out.dim(), plural(out.weights().len(), "cell"), cycle_listing(&out))
    };
    Ok(Outcome::new(true, text))
}

fn not_balanced_text(cli: &Cli, c: &TropicalCycle, r: &crate::cycles::BalancingReport) -> String {
    if cli.json {
        return to_json(r);
    }
    let mut s = format!("not balanced: {} violate balancing\n", plural(r.violations.len(), "codim-1 face"));
    for v in &r.violations {
        s.push_str(&format!("  face {} ({}): excess {}\n", v.face, describe(c.cell(v.face)), format_zvec(&v.excess)));
    }
    s
}

fn sample_cmd(cli: &Cli, path: &Path, through: &str) -> Result<Outcome, Error> {
    let loaded = load_cycle(path, false)?;
    let pts = parse_through(through, loaded.cycle.ambient_dim())?;
    match sample_generic_hyperplane(&loaded.cycle, &pts, cli.seed) {
        Ok(s) => {
            let text = if cli.json {
                to_json(&s)
            } else {
                format!(
                    "generic hyperplane: normal {}, offset {} (accepted on draw {})\n",
                    format_zvec(s.hyperplane.normal()),
                    format_rational(s.hyperplane.offset()),
                    s.draws
                )
            };
            Ok(Outcome::new(true, text))
        }
        Err(e @ Error::Exhausted { .. }) => {
            let text = if cli.json {
                to_json(&serde_json::json!({ "error": e.to_string() }))
            } else {
                format!("{e}\n")
            };
            Ok(Outcome::new(false, text))
        }
        Err(e) => Err(e),
    }
}

fn max_principle_cmd(cli: &Cli, cycle: &Path, function: &Path, point: &str) -> Result<Outcome, Error> {
    let loaded = load_cycle(cycle, false)?;
    let f = load_function(function, &loaded)?;
    let omega = parse_point_n(point, loaded.cycle.ambient_dim())?;
    let v = verify_max_principle(&f, &omega)?;
    let holds = matches!(v, MaxPrincipleVerdict::LocallyConstant { .. });
    let text = if cli.json {
        to_json(&v)
    } else {
        match &v {
            MaxPrincipleVerdict::LocallyConstant { certificate } => format!(
                "LocallyConstant at {}: {} of the star certified flat\n",
                format_vec(&omega),
                plural(certificate.len(), "cell")
            ),
            MaxPrincipleVerdict::NotLocallyConstant { witness, value, center_value } => format!(
                "NotLocallyConstant: f({}) = {} but f({}) = {}\n",
                format_vec(witness),
                format_rational(value),
                format_vec(&omega),
                format_rational(center_value)
            ),
            MaxPrincipleVerdict::NotLocalMax { report } => {
                let b = report.blocking_direction.as_ref().expect("blocking direction");
                format!(
                    "NotLocalMax: cell {} increases along {} (slope {}, curvature {})\n",
                    b.cell,
                    format_vec(&b.direction),
                    format_rational(&b.slope),
                    format_rational(&b.curvature)
                )
            }
            MaxPrincipleVerdict::NotPsh { report } => format!(
                "NotPsh: {} Hessian and {} corner violation(s)\n",
                report.hessian_violations.len(),
                report.corner_violations.len()
            ),
        }
    };
    Ok(Outcome::new(holds, text))
}

fn trace_cmd(cli: &Cli, cycle: &Path, function: &Path) -> Result<Outcome, Error> {
    let loaded = load_cycle(cycle, false)?;
    let f = load_function(function, &loaded)?;
    let t = match slicing_trace(loaded.cycle.clone(), &f, cli.seed) {
        Ok(t) => t,
        Err(e @ (Error::NotPsh(_) | Error::NotLocalMax | Error::NotBalanced(_) | Error::Exhausted { .. })) => {
            let text = if cli.json {
                to_json(&serde_json::json!({ "aborted": e.to_string() }))
            } else {
                format!("trace aborted: {e}\n")
            };
            return Ok(Outcome::new(false, text));
        }
        Err(e) => return Err(e),
    };
    let json = t.to_json() + "\n";
    write_out(&cli.out, &json)?;
    let failures = t.recheck();
    let text = if cli.json {
        json
    } else {
        let ladder: Vec<String> = t.dimension_ladder().iter().map(ToString::to_string).collect();
        let mut s = format!("trace (seed {}): dimensions {}\n", t.seed, ladder.join(" -> "));
        let mut node = &t.root;
        loop {
            match node {
                TraceNode::Slice(n) => {
                    s.push_str(&format!(
                        "  depth {}: d = {}, point {}{}, hyperplane normal {}\n",
                        n.depth,
                        n.dim,
                        format_vec(&n.omega_prime),
                        if n.constant_at_scale { " (constant at this scale)" } else { "" },
                        format_zvec(n.hyperplane.normal())
                    ));
                    node = &n.child;
                }
                TraceNode::Leaf(l) => {
                    s.push_str(&format!(
                        "  depth {}: d = {}, {}, weighted slope sum {}{}\n",
                        l.depth,
                        l.dim,
                        plural(l.edges.len(), "edge"),
                        format_rational(&l.weighted_sum),
                        if l.all_slopes_zero { ", all slopes 0" } else { "" }
                    ));
                    break;
                }
            }
        }
        for f in &failures {
            s.push_str(&format!("  recheck failed: {f}\n"));
        }
        s
    };
    Ok(Outcome::new(failures.is_empty(), text))
}

fn dispatch(cli: &Cli) -> Result<Outcome, Error> {
    match &cli.command {
        Command::Validate { cycle } => validate(cli, cycle),
        Command::Balance { cycle } => balance(cli, cycle),
        Command::Star { cycle, point } => star_cmd(cli, cycle, point),
        Command::LocalDim { cycle, point } => local_dim_cmd(cli, cycle, point),
        Command::CornerLocus { cycle, function } => corner_cmd(cli, cycle, function),
        Command::PshCheck { cycle, function } => psh_cmd(cli, cycle, function),
        Command::Slice { cycle, normal, offset } => slice_cmd(cli, cycle, normal, offset),
        Command::SampleHyperplane { cycle, through } => sample_cmd(cli, cycle, through),
        Command::MaxPrinciple { cycle, function, point } => max_principle_cmd(cli, cycle, function, point),
        Command::Trace { cycle, function } => trace_cmd(cli, cycle, function),
    }
}

/// Runs one invocation; the report goes to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(o) => {
            let _ = out.write_all(o.text.as_bytes());
            o.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}
