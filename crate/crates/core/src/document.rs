//! JSON documents for cycles and functions. Rationals are strings `"p/q"`
//! or `"p"` so that no floating point value ever enters.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize, Serializer};

use crate::cycles::{ClosureReport, OpenBox, TropicalCycle};
use crate::error::{Error, Result};
use crate::geometry::polyhedron::MAX_AMBIENT_DIM;
use crate::geometry::rational::{format_rational, format_vec, parse_rational};
use crate::geometry::{AffineForm, Polyhedron, QVec, Rational, ZVec};
use crate::plfunc::{refine, Mode, PiecewiseFunction, QuadraticForm, TropicalPolynomial};

pub const FORMAT_VERSION: &str = "1";

pub fn ser_q<S: Serializer>(x: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(x))
}

pub fn ser_qvec<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(format_rational))
}

pub fn ser_opt_qvec<S: Serializer>(v: &Option<QVec>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => ser_qvec(v, s),
        None => s.serialize_none(),
    }
}

pub fn ser_zvec<S: Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(ToString::to_string))
}

pub fn ser_bigint<S: Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

pub fn ser_form<S: Serializer>(f: &AffineForm, s: S) -> std::result::Result<S::Ok, S::Error> {
    form_doc(f).serialize(s)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormDoc {
    pub linear: Vec<String>,
    pub constant: String,
}

pub fn form_doc(f: &AffineForm) -> FormDoc {
    FormDoc { linear: strings(&f.linear), constant: format_rational(&f.constant) }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainDoc {
    pub lower: Vec<String>,
    pub upper: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellDoc {
    pub vertices: Vec<Vec<String>>,
    #[serde(default)]
    pub rays: Vec<Vec<String>>,
    #[serde(default)]
    pub lineality: Vec<Vec<String>>,
    pub weight: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CycleDocument {
    pub format_version: String,
    pub ambient_dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_generators: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainDoc>,
    pub cells: Vec<CellDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    pub m: Vec<String>,
    pub c: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceDoc {
    pub cell: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadratic: Option<Vec<Vec<String>>>,
    pub linear: Vec<String>,
    pub constant: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum FunctionDocument {
    #[serde(rename = "tropical_polynomial")]
    TropicalPolynomial { mode: Mode, terms: Vec<TermDoc> },
    #[serde(rename = "piecewise")]
    Piecewise { pieces: Vec<PieceDoc> },
}

fn strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

fn field_error(field: &str, e: Error) -> Error {
    Error::Parse(format!("field `{field}`: {e}"))
}

fn parse_q(s: &str, field: &str) -> Result<Rational> {
    parse_rational(s).map_err(|e| field_error(field, e))
}

fn parse_qvec(v: &[String], n: usize, field: &str) -> Result<QVec> {
    if v.len() != n {
        return Err(field_error(field, Error::DimensionMismatch { expected: n, found: v.len() }));
    }
    v.iter()
        .enumerate()
        .map(|(i, s)| parse_q(s, &format!("{field}[{i}]")))
        .collect()
}

fn parse_qvecs(vs: &[Vec<String>], n: usize, field: &str) -> Result<Vec<QVec>> {
    vs.iter()
        .enumerate()
        .map(|(i, v)| parse_qvec(v, n, &format!("{field}[{i}]")))
        .collect()
}

/// Largest ambient dimension accepted by loaders: the built-in guard,
/// lowered by `TROPKIT_MAX_DIM` when set.
pub fn dimension_guard() -> usize {
    std::env::var("TROPKIT_MAX_DIM")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .map_or(MAX_AMBIENT_DIM, |d| d.min(MAX_AMBIENT_DIM))
}

/// JSON text to a value, with `line:column` and the failing field in the
/// message.
pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str, origin: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let inner = e.inner();
        Error::Parse(format!(
            "{origin}:{}:{}: field `{}`: {}",
            inner.line(),
            inner.column(),
            e.path(),
            inner
        ))
    })
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    from_json(&text, &path.display().to_string())
}

/// A cycle document after validation.
#[derive(Clone, Debug)]
pub struct LoadedCycle {
    pub cycle: Arc<TropicalCycle>,
    pub closure: ClosureReport,
    /// Canonical polyhedron of every document cell, in document order.
    pub cells: Vec<Polyhedron>,
    pub gamma_generators: Option<Vec<Rational>>,
}

impl CycleDocument {
    /// Parses and validates; `mixed` allows maximal cells of different
    /// dimensions.
    pub fn load(&self, mixed: bool) -> Result<LoadedCycle> {
        if self.format_version != FORMAT_VERSION {
            return Err(field_error(
                "format_version",
                Error::InvalidInput(format!("unsupported version {:?}", self.format_version)),
            ));
        }
        let n = self.ambient_dim;
        let guard = dimension_guard();
        if n > guard {
            return Err(Error::DimensionGuardExceeded { dim: n, max: guard });
        }
        let gamma_generators = self
            .gamma_generators
            .as_ref()
            .map(|g| {
                g.iter()
                    .enumerate()
                    .map(|(i, s)| parse_q(s, &format!("gamma_generators[{i}]")))
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?;
        let domain = self
            .domain
            .as_ref()
            .map(|d| -> Result<OpenBox> {
                let lower = parse_qvec(&d.lower, n, "domain.lower")?;
                let upper = parse_qvec(&d.upper, n, "domain.upper")?;
                if lower.iter().zip(&upper).any(|(l, u)| l >= u) {
                    return Err(field_error("domain", Error::InvalidInput("empty box".into())));
                }
                Ok(OpenBox { lower, upper })
            })
            .transpose()?;
        let mut cells = Vec::with_capacity(self.cells.len());
        let mut weighted = Vec::with_capacity(self.cells.len());
        for (i, c) in self.cells.iter().enumerate() {
            let field = format!("cells[{i}]");
            let vertices = parse_qvecs(&c.vertices, n, &format!("{field}.vertices"))?;
            let rays = parse_qvecs(&c.rays, n, &format!("{field}.rays"))?;
            let lineality = parse_qvecs(&c.lineality, n, &format!("{field}.lineality"))?;
            if vertices.is_empty() {
                return Err(field_error(&format!("{field}.vertices"), Error::EmptyPolyhedron));
            }
            let p = Polyhedron::from_generators(n, &vertices, &rays, &lineality)
                .map_err(|e| field_error(&field, e))?;
            weighted.push((p.clone(), BigInt::from(c.weight)));
            cells.push(p);
        }
        let (cycle, closure) = if mixed {
            TropicalCycle::new_mixed(n, weighted)?
        } else {
            TropicalCycle::new(n, weighted)?
        };
        Ok(LoadedCycle {
            cycle: Arc::new(cycle.with_domain(domain)),
            closure,
            cells,
            gamma_generators,
        })
    }

    /// Maximal cells in canonical order.
    pub fn from_cycle(c: &TropicalCycle) -> Result<Self> {
        let cells = c
            .maximal_cells()
            .map(|(i, p, w)| {
                Ok(CellDoc {
                    vertices: p.vertices().iter().map(|v| strings(v)).collect(),
                    rays: p.rays().iter().map(|v| strings(v)).collect(),
                    lineality: p.lineality().iter().map(|v| strings(v)).collect(),
                    weight: w.to_i64().ok_or(Error::NonIntegralWeight(i))?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(CycleDocument {
            format_version: FORMAT_VERSION.into(),
            ambient_dim: c.ambient_dim(),
            gamma_generators: None,
            domain: c.domain().map(|b| DomainDoc { lower: strings(&b.lower), upper: strings(&b.upper) }),
            cells,
        })
    }
}

impl FunctionDocument {
    /// Tropical polynomials are refined onto the cycle; piecewise documents
    /// must be continuous.
    pub fn load(&self, cycle: &LoadedCycle) -> Result<PiecewiseFunction> {
        let n = cycle.cycle.ambient_dim();
        match self {
            FunctionDocument::TropicalPolynomial { mode, terms } => {
                let forms = terms
                    .iter()
                    .enumerate()
                    .map(|(i, t)| {
                        Ok(AffineForm::new(
                            parse_qvec(&t.m, n, &format!("terms[{i}].m"))?,
                            parse_q(&t.c, &format!("terms[{i}].c"))?,
                        ))
                    })
                    .collect::<Result<Vec<_>>>()?;
                refine(&cycle.cycle, &TropicalPolynomial::new(*mode, forms)?)
            }
            FunctionDocument::Piecewise { pieces } => {
                let mut map = BTreeMap::new();
                for (i, p) in pieces.iter().enumerate() {
                    let field = format!("pieces[{i}]");
                    let poly = cycle.cells.get(p.cell).ok_or_else(|| {
                        field_error(&format!("{field}.cell"), Error::InvalidInput(format!("no cell {}", p.cell)))
                    })?;
                    let idx = cycle
                        .cycle
                        .complex()
                        .index_of(poly)
                        .filter(|&j| cycle.cycle.weight(j).is_some())
                        .ok_or_else(|| {
                            field_error(&format!("{field}.cell"), Error::InvalidInput("not a maximal cell".into()))
                        })?;
                    let quadratic = p
                        .quadratic
                        .as_ref()
                        .map(|m| parse_qvecs(m, n, &format!("{field}.quadratic")))
                        .transpose()?;
                    let form = QuadraticForm::new(
                        quadratic,
                        parse_qvec(&p.linear, n, &format!("{field}.linear"))?,
                        parse_q(&p.constant, &format!("{field}.constant"))?,
                    )
                    .map_err(|e| field_error(&field, e))?;
                    map.insert(idx, form);
                }
                PiecewiseFunction::new(cycle.cycle.clone(), map)
            }
        }
    }

    /// Piecewise document indexed like [`CycleDocument::from_cycle`].
    pub fn from_function(f: &PiecewiseFunction) -> Self {
        let order: Vec<usize> = f.cycle().weights().keys().copied().collect();
        let pieces = f
            .pieces()
            .iter()
            .map(|(i, p)| PieceDoc {
                cell: order.iter().position(|j| j == i).expect("maximal cell"),
                quadratic: p.hessian().map(|h| h.iter().map(|r| strings(r)).collect()),
                linear: strings(&p.linear),
                constant: format_rational(&p.constant),
            })
            .collect();
        FunctionDocument::Piecewise { pieces }
    }
}

pub fn ser_cycle<S: Serializer>(c: &Arc<TropicalCycle>, s: S) -> std::result::Result<S::Ok, S::Error> {
    CycleDocument::from_cycle(c)
        .map_err(serde::ser::Error::custom)?
        .serialize(s)
}

pub fn ser_function<S: Serializer>(f: &PiecewiseFunction, s: S) -> std::result::Result<S::Ok, S::Error> {
    FunctionDocument::from_function(f).serialize(s)
}

/// Short human-readable description of a polyhedron.
pub fn describe(p: &Polyhedron) -> String {
    if p.is_empty() {
        return "empty".into();
    }
    if p.dim() == 0 {
        return format!("vertex {}", format_vec(&p.vertices()[0]));
    }
    let mut parts = vec![format!(
        "vertices {}",
        p.vertices().iter().map(|v| format_vec(v)).collect::<Vec<_>>().join(" ")
    )];
    if !p.rays().is_empty() {
        parts.push(format!("rays {}", p.rays().iter().map(|v| format_vec(v)).collect::<Vec<_>>().join(" ")));
    }
    if !p.lineality().is_empty() {
        parts.push(format!(
            "lineality {}",
            p.lineality().iter().map(|v| format_vec(v)).collect::<Vec<_>>().join(" ")
        ));
    }
    format!("dim {} [{}]", p.dim(), parts.join("; "))
}

pub fn format_zvec(v: &ZVec) -> String {
    format!("({})", v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    const LINE: &str = r#"{
        "format_version": "1",
        "ambient_dim": 2,
        "cells": [
            {"vertices": [["0","0"]], "rays": [["-1","0"]], "weight": 1},
            {"vertices": [["0","0"]], "rays": [["0","-1"]], "weight": 1},
            {"vertices": [["0","0"]], "rays": [["2","2"]], "weight": 1}
        ]
    }"#;

    #[test]
    fn cycle_round_trip() {
        let doc: CycleDocument = from_json(LINE, "line.json").unwrap();
        let loaded = doc.load(false).unwrap();
        let back = CycleDocument::from_cycle(&loaded.cycle).unwrap();
        let again = back.load(false).unwrap();
        assert_eq!(*again.cycle, *loaded.cycle);
        let text = serde_json::to_string(&back).unwrap();
        let reparsed: CycleDocument = from_json(&text, "x").unwrap();
        assert_eq!(reparsed, back);
        assert_eq!(back.cells[2].rays, vec![vec!["1".to_string(), "1".to_string()]]);
    }

    #[test]
    fn parse_errors_name_the_field() {
        let bad = LINE.replace(r#"[["0","-1"]]"#, r#"[["0","x"]]"#);
        let doc: CycleDocument = from_json(&bad, "line.json").unwrap();
        let e = doc.load(false).unwrap_err().to_string();
        assert!(e.contains("cells[1].rays[0][1]"), "{e}");
        let bad = LINE.replace(r#""weight": 1}"#, r#""weight": "one"}"#);
        let e = from_json::<CycleDocument>(&bad, "line.json").unwrap_err().to_string();
        assert!(e.starts_with("line.json:"), "{e}");
        assert!(e.contains("cells[0].weight"), "{e}");
    }

    #[test]
    fn functions_load() {
        let doc: CycleDocument = from_json(LINE, "line.json").unwrap();
        let loaded = doc.load(false).unwrap();
        let f: FunctionDocument = from_json(
            r#"{"kind": "piecewise", "pieces": [
                {"cell": 0, "linear": ["1","0"], "constant": "0"},
                {"cell": 1, "linear": ["0","0"], "constant": "0"},
                {"cell": 2, "linear": ["0","0"], "constant": "0"}]}"#,
            "f.json",
        )
        .unwrap();
        let f = f.load(&loaded).unwrap();
        assert_eq!(f.evaluate(&[Rational::from_integer((-1).into()), Rational::from_integer(0.into())]).unwrap(), Rational::from_integer((-1).into()));
        let back = FunctionDocument::from_function(&f);
        assert_eq!(back.load(&loaded).unwrap(), f);
        let p: FunctionDocument = from_json(
            r#"{"kind": "tropical_polynomial", "mode": "max", "terms": [{"m": ["1","1"], "c": "0"}, {"m": ["0","0"], "c": "0"}]}"#,
            "g.json",
        )
        .unwrap();
        assert!(p.load(&loaded).is_ok());
    }
}
