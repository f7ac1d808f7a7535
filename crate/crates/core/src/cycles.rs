//! Polyhedral complexes and weighted tropical cycles.

use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use log::warn;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::geometry::lattice::LatticeBasis;
use crate::geometry::polyhedron::lattice_normal_from_bases;
use crate::geometry::rational::{to_qvec, zero_vec};
use crate::geometry::{AffineForm, Polyhedron, QVec, Rational, ZVec};

/// An open coordinate box `lower < x < upper`. Finite restrictions of
/// locally finite complexes carry the box they were cut to; faces that do
/// not meet the open box are not subject to local conditions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OpenBox {
    pub lower: QVec,
    pub upper: QVec,
}

impl OpenBox {
    fn closed_forms(&self) -> Vec<AffineForm> {
        let n = self.lower.len();
        let mut forms = Vec::with_capacity(2 * n);
        for i in 0..n {
            let mut e = zero_vec(n);
            e[i] = Rational::from_integer(1.into());
            forms.push(AffineForm::new(e.clone(), -self.lower[i].clone()));
            forms.push(AffineForm::new(e.iter().map(|x| -x).collect(), self.upper[i].clone()));
        }
        forms
    }

    pub fn contains_strictly(&self, x: &[Rational]) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (l, u))| l < v && v < u)
    }

    /// Whether `p` meets the open box.
    pub fn meets(&self, p: &Polyhedron) -> bool {
        let Ok(clipped) = p.cut(&self.closed_forms()) else {
            return false;
        };
        match clipped.relative_interior_point() {
            Ok(x) => self.contains_strictly(&x),
            Err(_) => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyhedralComplex {
    ambient_dim: usize,
    cells: Vec<Polyhedron>,
    facets: Vec<Vec<usize>>,
    cofacets: Vec<Vec<usize>>,
}

/// What [`validate_complex`] had to add.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClosureReport {
    pub input_cells: usize,
    pub added_faces: usize,
}

impl PolyhedralComplex {
    /// Face closure of `cells` without checking the intersection axiom.
    fn closure(ambient_dim: usize, cells: &[Polyhedron]) -> Self {
        let mut all: Vec<Polyhedron> = Vec::new();
        let mut seen: HashMap<Polyhedron, ()> = HashMap::new();
        for c in cells {
            if seen.contains_key(c) {
                continue;
            }
            for group in c.face_lattice() {
                for f in group {
                    if !f.is_empty() && !seen.contains_key(&f) {
                        seen.insert(f.clone(), ());
                        all.push(f);
                    }
                }
            }
        }
        all.sort_by(|a, b| b.dim().cmp(&a.dim()).then_with(|| a.cmp(b)));
        let index: HashMap<&Polyhedron, usize> = all.iter().enumerate().map(|(i, c)| (c, i)).collect();
        let facets: Vec<Vec<usize>> = all
            .iter()
            .map(|c| {
                let mut v: Vec<usize> = c
                    .facets()
                    .iter()
                    .filter(|f| !f.is_empty())
                    .map(|f| index[f])
                    .collect();
                v.sort_unstable();
                v
            })
            .collect();
        let mut cofacets = vec![Vec::new(); all.len()];
        for (i, fs) in facets.iter().enumerate() {
            for &f in fs {
                cofacets[f].push(i);
            }
        }
        PolyhedralComplex { ambient_dim, cells: all, facets, cofacets }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Cells in canonical order: decreasing dimension, then lexicographic.
    pub fn cells(&self) -> &[Polyhedron] {
        &self.cells
    }

    pub fn cell(&self, i: usize) -> &Polyhedron {
        &self.cells[i]
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn facets_of(&self, i: usize) -> &[usize] {
        &self.facets[i]
    }

    pub fn cofacets_of(&self, i: usize) -> &[usize] {
        &self.cofacets[i]
    }

    pub fn maximal_cells(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.cells.len()).filter(|&i| self.cofacets[i].is_empty())
    }

    pub fn index_of(&self, p: &Polyhedron) -> Option<usize> {
        self.cells.iter().position(|c| c == p)
    }

    /// Cells whose relative interior contains `x` is unique; this returns
    /// every cell containing `x`.
    pub fn cells_containing(&self, x: &[Rational]) -> Vec<usize> {
        (0..self.cells.len()).filter(|&i| self.cells[i].contains(x)).collect()
    }
}

/// Face closure of `cells`, after checking that any two input cells meet
/// in a common face.
pub fn validate_complex(cells: &[Polyhedron]) -> Result<(PolyhedralComplex, ClosureReport)> {
    let Some(first) = cells.first() else {
        return Err(Error::InvalidInput("complex has no cells".into()));
    };
    let n = first.ambient_dim();
    if cells.iter().any(|c| c.ambient_dim() != n) {
        return Err(Error::InvalidInput("cells live in different ambient spaces".into()));
    }
    for i in 0..cells.len() {
        for j in i + 1..cells.len() {
            let (a, b) = (&cells[i], &cells[j]);
            if a == b || a.is_empty() || b.is_empty() {
                continue;
            }
            let meet = a.intersection(b)?;
            if !meet.is_face_of(a) || !meet.is_face_of(b) {
                return Err(Error::IntersectionAxiomViolated(i, j));
            }
        }
    }
    let nonempty: Vec<Polyhedron> = cells.iter().filter(|c| !c.is_empty()).cloned().collect();
    let complex = PolyhedralComplex::closure(n, &nonempty);
    let mut distinct = nonempty.clone();
    distinct.sort();
    distinct.dedup();
    let report = ClosureReport {
        input_cells: cells.len(),
        added_faces: complex.len() - distinct.len(),
    };
    Ok((complex, report))
}

/// One face `τ` with its adjacent maximal cells and their lattice normals.
#[derive(Clone, Debug)]
pub struct FaceStar {
    pub face: usize,
    pub lattice: LatticeBasis,
    pub normals: Vec<(usize, ZVec)>,
}

#[derive(Debug)]
pub struct TropicalCycle {
    complex: PolyhedralComplex,
    dim: i64,
    weights: BTreeMap<usize, BigInt>,
    domain: Option<OpenBox>,
    stars: OnceLock<Vec<FaceStar>>,
}

impl Clone for TropicalCycle {
    fn clone(&self) -> Self {
        TropicalCycle {
            complex: self.complex.clone(),
            dim: self.dim,
            weights: self.weights.clone(),
            domain: self.domain.clone(),
            stars: self.stars.clone(),
        }
    }
}

impl PartialEq for TropicalCycle {
    fn eq(&self, other: &Self) -> bool {
        self.complex == other.complex
            && self.dim == other.dim
            && self.weights == other.weights
            && self.domain == other.domain
    }
}

impl Eq for TropicalCycle {}

/// Sums weights of repeated cells and drops zero weights.
fn merge_weighted(cells: Vec<(Polyhedron, BigInt)>) -> Vec<(Polyhedron, BigInt)> {
    let mut merged: Vec<(Polyhedron, BigInt)> = Vec::new();
    let mut pos: HashMap<Polyhedron, usize> = HashMap::new();
    for (p, w) in cells {
        if p.is_empty() {
            continue;
        }
        match pos.get(&p) {
            Some(&i) => merged[i].1 += w,
            None => {
                pos.insert(p.clone(), merged.len());
                merged.push((p, w));
            }
        }
    }
    let before = merged.len();
    merged.retain(|(_, w)| !w.is_zero());
    if merged.len() < before {
        warn!("pruned {} cell(s) of weight 0", before - merged.len());
    }
    merged
}

impl TropicalCycle {
    /// Validates the complex axioms and pure dimensionality. Weight-0 cells
    /// are pruned; repeated cells have their weights added.
    pub fn new(ambient_dim: usize, cells: Vec<(Polyhedron, BigInt)>) -> Result<(Self, ClosureReport)> {
        let (c, report) = Self::build(ambient_dim, cells, true)?;
        c.require_pure()?;
        Ok((c, report))
    }

    /// Like [`TropicalCycle::new`] but allows maximal cells of different
    /// dimensions. Only [`star`] and [`local_dimension`] are meaningful on
    /// such a value.
    pub fn new_mixed(ambient_dim: usize, cells: Vec<(Polyhedron, BigInt)>) -> Result<(Self, ClosureReport)> {
        Self::build(ambient_dim, cells, true)
    }

    /// Builds from cells already known to form a complex (outputs of
    /// refinement, stars, corner loci).
    pub(crate) fn from_trusted(ambient_dim: usize, cells: Vec<(Polyhedron, BigInt)>) -> Result<Self> {
        Ok(Self::build(ambient_dim, cells, false)?.0)
    }

    fn build(ambient_dim: usize, cells: Vec<(Polyhedron, BigInt)>, check: bool) -> Result<(Self, ClosureReport)> {
        if cells.iter().any(|(p, _)| p.ambient_dim() != ambient_dim) {
            return Err(Error::DimensionMismatch {
                expected: ambient_dim,
                found: cells.iter().map(|(p, _)| p.ambient_dim()).find(|&d| d != ambient_dim).unwrap_or(0),
            });
        }
        let input_count = cells.len();
        let merged = merge_weighted(cells);
        if merged.is_empty() {
            return Ok((
                TropicalCycle {
                    complex: PolyhedralComplex {
                        ambient_dim,
                        cells: Vec::new(),
                        facets: Vec::new(),
                        cofacets: Vec::new(),
                    },
                    dim: -1,
                    weights: BTreeMap::new(),
                    domain: None,
                    stars: OnceLock::new(),
                },
                ClosureReport { input_cells: input_count, added_faces: 0 },
            ));
        }
        let polys: Vec<Polyhedron> = merged.iter().map(|(p, _)| p.clone()).collect();
        let (complex, mut report) = if check {
            validate_complex(&polys)?
        } else {
            let c = PolyhedralComplex::closure(ambient_dim, &polys);
            let added = c.len() - polys.len();
            (c, ClosureReport { input_cells: polys.len(), added_faces: added })
        };
        report.input_cells = input_count;
        let index: HashMap<&Polyhedron, usize> =
            complex.cells.iter().enumerate().map(|(i, c)| (c, i)).collect();
        let mut weights = BTreeMap::new();
        for (p, w) in merged {
            let i = index[&p];
            if !complex.cofacets[i].is_empty() {
                return Err(Error::InvalidInput(format!(
                    "weighted cell {} is a face of another weighted cell",
                    crate::geometry::rational::format_vec(&p.relative_interior_point()?)
                )));
            }
            weights.insert(i, w);
        }
        let maximal: Vec<usize> = complex.maximal_cells().collect();
        if maximal.iter().any(|i| !weights.contains_key(i)) {
            return Err(Error::InvalidInput("maximal cell without weight".into()));
        }
        let dim = maximal.iter().map(|&i| complex.cells[i].dim()).max().unwrap_or(-1);
        Ok((
            TropicalCycle { complex, dim, weights, domain: None, stars: OnceLock::new() },
            report,
        ))
    }

    fn require_pure(&self) -> Result<()> {
        let (lo, hi) = self.maximal_dimension_range();
        if lo != hi {
            return Err(Error::NotPureDimensional { min: lo, max: hi });
        }
        Ok(())
    }

    pub fn with_domain(mut self, domain: Option<OpenBox>) -> Self {
        self.domain = domain;
        self.stars = OnceLock::new();
        self
    }

    pub fn domain(&self) -> Option<&OpenBox> {
        self.domain.as_ref()
    }

    pub fn ambient_dim(&self) -> usize {
        self.complex.ambient_dim
    }

    /// Top dimension (`-1` for the zero cycle).
    pub fn dim(&self) -> i64 {
        self.dim
    }

    pub fn complex(&self) -> &PolyhedralComplex {
        &self.complex
    }

    pub fn cell(&self, i: usize) -> &Polyhedron {
        self.complex.cell(i)
    }

    pub fn is_zero(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &BTreeMap<usize, BigInt> {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> Option<&BigInt> {
        self.weights.get(&i)
    }

    pub fn maximal_cells(&self) -> impl Iterator<Item = (usize, &Polyhedron, &BigInt)> + '_ {
        self.weights.iter().map(move |(&i, w)| (i, self.complex.cell(i), w))
    }

    pub fn is_effective(&self) -> bool {
        self.weights.values().all(Signed::is_positive)
    }

    pub fn is_pure(&self) -> bool {
        let (lo, hi) = self.maximal_dimension_range();
        lo == hi
    }

    fn maximal_dimension_range(&self) -> (i64, i64) {
        let dims = self.weights.keys().map(|&i| self.complex.cell(i).dim());
        let lo = dims.clone().min().unwrap_or(-1);
        let hi = dims.max().unwrap_or(-1);
        (lo, hi)
    }

    /// Whether every cell is a cone with apex at the origin.
    pub fn is_fan(&self) -> bool {
        self.weights.keys().all(|&i| self.complex.cell(i).is_cone_at_origin())
    }

    /// Whether local conditions apply at cell `i`.
    pub fn in_domain(&self, i: usize) -> bool {
        self.domain.as_ref().is_none_or(|b| b.meets(self.complex.cell(i)))
    }

    /// Codimension-one faces subject to balancing, ascending.
    pub fn codim_one_faces(&self) -> Vec<usize> {
        if self.dim < 1 {
            return Vec::new();
        }
        (0..self.complex.len())
            .filter(|&i| self.complex.cell(i).dim() == self.dim - 1 && self.in_domain(i))
            .collect()
    }

    /// Maximal cells having `tau` as a facet.
    pub fn adjacent_maximal(&self, tau: usize) -> Vec<usize> {
        self.complex
            .cofacets_of(tau)
            .iter()
            .copied()
            .filter(|c| self.weights.contains_key(c))
            .collect()
    }

    /// Canonical lattice normals around every codimension-one face.
    pub fn face_stars(&self) -> &[FaceStar] {
        self.stars.get_or_init(|| {
            self.codim_one_faces()
                .into_iter()
                .map(|t| {
                    let tau = self.complex.cell(t);
                    let lattice = tau.lattice();
                    let normals = self
                        .adjacent_maximal(t)
                        .into_iter()
                        .map(|s| {
                            let sigma = self.complex.cell(s);
                            let u = lattice_normal_from_bases(sigma, tau, &sigma.lattice(), &lattice)
                                .expect("facet relation of a validated complex");
                            (s, u)
                        })
                        .collect();
                    FaceStar { face: t, lattice, normals }
                })
                .collect()
        })
    }

    /// Cycle with every weight multiplied by `k`.
    pub fn scaled(&self, k: &BigInt) -> Result<Self> {
        let cells = self
            .maximal_cells()
            .map(|(_, p, w)| (p.clone(), w * k))
            .collect();
        Ok(Self::from_trusted(self.ambient_dim(), cells)?.with_domain(self.domain.clone()))
    }

    /// Maximal cells with rational weights, for comparisons up to refinement.
    pub fn weighted_cells(&self) -> Vec<(Polyhedron, Rational)> {
        self.maximal_cells()
            .map(|(_, p, w)| (p.clone(), Rational::from_integer(w.clone())))
            .collect()
    }

    /// Equality as weighted cycles, independent of the subdivision.
    pub fn equivalent(&self, other: &TropicalCycle) -> Result<bool> {
        weighted_cells_equal(&self.weighted_cells(), &other.weighted_cells())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct BalancingViolation {
    pub face: usize,
    /// `Σ m_σ u_{σ/τ}` reduced modulo `lin(τ) ∩ Z^n`.
    #[serde(serialize_with = "crate::document::ser_zvec")]
    pub excess: ZVec,
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct BalancingReport {
    pub verdict: bool,
    pub checked: usize,
    pub violations: Vec<BalancingViolation>,
}

/// Checks the balancing condition at every codimension-one face.
pub fn check_balancing(c: &TropicalCycle) -> BalancingReport {
    check_balancing_with(c, |_, _, u, _| u.clone())
}

/// Balancing with caller-chosen normal representatives: `choose(σ, τ, u,
/// lattice of τ)` may return any element of `u + lin(τ) ∩ Z^n`.
pub fn check_balancing_with<F>(c: &TropicalCycle, mut choose: F) -> BalancingReport
where
    F: FnMut(usize, usize, &ZVec, &LatticeBasis) -> ZVec,
{
    let n = c.ambient_dim();
    let stars = c.face_stars();
    let mut violations = Vec::new();
    for fs in stars {
        let mut sum = vec![BigInt::zero(); n];
        for (s, u) in &fs.normals {
            let v = choose(*s, fs.face, u, &fs.lattice);
            let w = &c.weights[s];
            for (acc, x) in sum.iter_mut().zip(&v) {
                *acc += w * x;
            }
        }
        let excess = fs.lattice.reduce(&sum);
        if excess.iter().any(|x| !x.is_zero()) {
            violations.push(BalancingViolation { face: fs.face, excess });
        }
    }
    BalancingReport {
        verdict: violations.is_empty(),
        checked: stars.len(),
        violations,
    }
}

/// The fan of feasible directions of `c` at `omega`, with inherited weights.
pub fn star(c: &TropicalCycle, omega: &[Rational]) -> Result<TropicalCycle> {
    if omega.len() != c.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: c.ambient_dim(), found: omega.len() });
    }
    let mut cells = Vec::new();
    for (_, sigma, w) in c.maximal_cells() {
        if sigma.contains(omega) {
            cells.push((sigma.tangent_cone(omega)?, w.clone()));
        }
    }
    if cells.is_empty() {
        return Err(Error::PointNotOnSupport);
    }
    TropicalCycle::from_trusted(c.ambient_dim(), cells)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct LocalDimension {
    pub min_dim: i64,
    pub max_dim: i64,
    pub is_pure: bool,
}

pub fn local_dimension(c: &TropicalCycle, omega: &[Rational]) -> Result<LocalDimension> {
    let s = star(c, omega)?;
    let (min_dim, max_dim) = s.maximal_dimension_range();
    Ok(LocalDimension { min_dim, max_dim, is_pure: min_dim == max_dim })
}

/// Sign pattern of an affine form on a polyhedron.
fn sign_range(p: &Polyhedron, f: &AffineForm) -> (bool, bool) {
    let mut pos = false;
    let mut neg = false;
    for v in p.vertices() {
        let x = f.eval(v);
        pos |= x.is_positive();
        neg |= x.is_negative();
    }
    for r in p.rays() {
        let x = f.slope(r);
        pos |= x.is_positive();
        neg |= x.is_negative();
    }
    for l in p.lineality() {
        if !f.slope(l).is_zero() {
            pos = true;
            neg = true;
        }
    }
    (pos, neg)
}

/// Exact equality of two formal sums of weighted polyhedra as weight
/// functions on `Q^n`, up to sets of lower dimension.
pub fn weighted_cells_equal(a: &[(Polyhedron, Rational)], b: &[(Polyhedron, Rational)]) -> Result<bool> {
    let mut all: Vec<(Polyhedron, Rational)> = a.to_vec();
    all.extend(b.iter().map(|(p, w)| (p.clone(), -w.clone())));
    all.retain(|(p, w)| !p.is_empty() && !w.is_zero());
    for (x, _) in &all {
        let mut fragments = vec![x.clone()];
        for (y, _) in &all {
            if std::ptr::eq(x, y) {
                continue;
            }
            for h in y.hrep() {
                let mut next = Vec::new();
                for frag in fragments {
                    let (pos, neg) = sign_range(&frag, &h);
                    if !(pos && neg) {
                        next.push(frag);
                        continue;
                    }
                    let minus = h.scaled(&-Rational::from_integer(1.into()));
                    for side in [h.clone(), minus] {
                        let piece = frag.cut(&[side])?;
                        if piece.dim() == frag.dim() {
                            next.push(piece);
                        }
                    }
                }
                fragments = next;
            }
        }
        for frag in &fragments {
            let p = frag.relative_interior_point()?;
            let total: Rational = all
                .iter()
                .filter(|(y, _)| y.dim() == x.dim() && y.equations() == x.equations() && y.contains(&p))
                .map(|(_, w)| w.clone())
                .sum();
            if !total.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The integer vector `u` as rationals, for evaluating slopes.
pub(crate) fn normal_as_q(u: &ZVec) -> QVec {
    to_qvec(u)
}
