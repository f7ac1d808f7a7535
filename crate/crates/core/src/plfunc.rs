//! Piecewise affine and quadratic functions on tropical cycles.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cycles::{check_balancing, normal_as_q, FaceStar, OpenBox, TropicalCycle};
use crate::document::{ser_q, ser_qvec};
use crate::error::{Error, Result};
use crate::geometry::lattice::LatticeBasis;
use crate::geometry::linalg::{self, congruence, mat_vec};
use crate::geometry::rational::{add, dot, is_zero_vec, scale, sub, to_qvec};
use crate::geometry::{AffineForm, Polyhedron, QVec, Rational, ZVec};

/// `x ↦ ½ xᵀHx + linear · x + constant` with symmetric `H`; `None` is `H = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticForm {
    hessian: Option<Vec<QVec>>,
    pub linear: QVec,
    pub constant: Rational,
}

impl QuadraticForm {
    pub fn affine(form: AffineForm) -> Self {
        QuadraticForm { hessian: None, linear: form.linear, constant: form.constant }
    }

    /// Rejects non-square or non-symmetric matrices.
    pub fn new(hessian: Option<Vec<QVec>>, linear: QVec, constant: Rational) -> Result<Self> {
        let n = linear.len();
        if let Some(h) = &hessian {
            if h.len() != n || h.iter().any(|r| r.len() != n) {
                return Err(Error::InvalidInput(format!("quadratic part must be {n}x{n}")));
            }
            if (0..n).any(|i| (0..i).any(|j| h[i][j] != h[j][i])) {
                return Err(Error::InvalidInput("quadratic part must be symmetric".into()));
            }
        }
        let hessian = hessian.filter(|h| h.iter().any(|r| !is_zero_vec(r)));
        Ok(QuadraticForm { hessian, linear, constant })
    }

    pub fn ambient_dim(&self) -> usize {
        self.linear.len()
    }

    pub fn hessian(&self) -> Option<&[QVec]> {
        self.hessian.as_deref()
    }

    pub fn is_affine(&self) -> bool {
        self.hessian.is_none()
    }

    pub fn affine_part(&self) -> AffineForm {
        AffineForm::new(self.linear.clone(), self.constant.clone())
    }

    fn hx(&self, x: &[Rational]) -> QVec {
        match &self.hessian {
            Some(h) => mat_vec(h, x),
            None => vec![Rational::zero(); x.len()],
        }
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        let half = Rational::new(BigInt::one(), BigInt::from(2));
        half * dot(x, &self.hx(x)) + dot(&self.linear, x) + &self.constant
    }

    pub fn gradient(&self, x: &[Rational]) -> QVec {
        add(&self.hx(x), &self.linear)
    }

    /// `vᵀHv`.
    pub fn curvature(&self, v: &[Rational]) -> Rational {
        dot(v, &self.hx(v))
    }

    /// The affine map `x ↦ ⟨∇f(x), v⟩`.
    pub fn directional_derivative(&self, v: &[Rational]) -> AffineForm {
        AffineForm::new(self.hx(v), dot(&self.linear, v))
    }

    pub fn add(&self, other: &QuadraticForm) -> QuadraticForm {
        let hessian = match (&self.hessian, &other.hessian) {
            (None, None) => None,
            (Some(h), None) | (None, Some(h)) => Some(h.clone()),
            (Some(a), Some(b)) => Some(a.iter().zip(b).map(|(r, s)| add(r, s)).collect()),
        };
        let hessian = hessian.filter(|h| h.iter().any(|r| !is_zero_vec(r)));
        QuadraticForm {
            hessian,
            linear: add(&self.linear, &other.linear),
            constant: &self.constant + &other.constant,
        }
    }

    pub fn add_affine(&self, g: &AffineForm) -> QuadraticForm {
        self.add(&QuadraticForm::affine(g.clone()))
    }

    pub fn scaled(&self, s: &Rational) -> QuadraticForm {
        let hessian = if s.is_zero() {
            None
        } else {
            self.hessian.as_ref().map(|h| h.iter().map(|r| scale(r, s)).collect())
        };
        QuadraticForm { hessian, linear: scale(&self.linear, s), constant: &self.constant * s }
    }

    /// Product of two affine forms.
    pub fn product(a: &AffineForm, b: &AffineForm) -> QuadraticForm {
        let n = a.linear.len();
        let h: Vec<QVec> = (0..n)
            .map(|i| (0..n).map(|j| &a.linear[i] * &b.linear[j] + &a.linear[j] * &b.linear[i]).collect())
            .collect();
        let linear = add(&scale(&a.linear, &b.constant), &scale(&b.linear, &a.constant));
        let hessian = Some(h).filter(|h| h.iter().any(|r| !is_zero_vec(r)));
        QuadraticForm { hessian, linear, constant: &a.constant * &b.constant }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Max,
    Min,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropicalPolynomial {
    mode: Mode,
    terms: Vec<AffineForm>,
}

impl TropicalPolynomial {
    /// Terms are sorted and deduplicated.
    pub fn new(mode: Mode, mut terms: Vec<AffineForm>) -> Result<Self> {
        let Some(n) = terms.first().map(AffineForm::ambient_dim) else {
            return Err(Error::InvalidInput("tropical polynomial needs at least one term".into()));
        };
        if let Some(t) = terms.iter().find(|t| t.ambient_dim() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: t.ambient_dim() });
        }
        terms.sort();
        terms.dedup();
        Ok(TropicalPolynomial { mode, terms })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn terms(&self) -> &[AffineForm] {
        &self.terms
    }

    pub fn ambient_dim(&self) -> usize {
        self.terms[0].ambient_dim()
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        let values = self.terms.iter().map(|t| t.eval(x));
        match self.mode {
            Mode::Max => values.max(),
            Mode::Min => values.min(),
        }
        .expect("at least one term")
    }

    /// `max(ℓ, 0)` for a hyperplane `ℓ = 0`.
    pub fn max_with_zero(l: AffineForm) -> Result<Self> {
        let n = l.ambient_dim();
        Self::new(Mode::Max, vec![l, AffineForm::zero(n)])
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseFunction {
    cycle: Arc<TropicalCycle>,
    pieces: BTreeMap<usize, QuadraticForm>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContinuityReport {
    pub verdict: bool,
    pub face: Option<usize>,
    #[serde(serialize_with = "crate::document::ser_opt_qvec")]
    pub point: Option<QVec>,
}

impl PiecewiseFunction {
    /// Checks coverage and continuity.
    pub fn new(cycle: Arc<TropicalCycle>, pieces: BTreeMap<usize, QuadraticForm>) -> Result<Self> {
        let f = Self::new_unchecked(cycle, pieces)?;
        let r = f.check_continuity()?;
        if let (Some(face), Some(point)) = (r.face, r.point) {
            return Err(Error::ContinuityViolated { face, point });
        }
        Ok(f)
    }

    /// Checks only that the pieces are indexed by maximal cells and have
    /// the right ambient dimension.
    pub fn new_unchecked(cycle: Arc<TropicalCycle>, pieces: BTreeMap<usize, QuadraticForm>) -> Result<Self> {
        let n = cycle.ambient_dim();
        for (&i, p) in &pieces {
            if cycle.weight(i).is_none() {
                return Err(Error::InvalidInput(format!("piece given for non-maximal cell {i}")));
            }
            if p.ambient_dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: p.ambient_dim() });
            }
        }
        Ok(PiecewiseFunction { cycle, pieces })
    }

    /// One affine form on every maximal cell.
    pub fn global_affine(cycle: Arc<TropicalCycle>, g: &AffineForm) -> Self {
        let pieces = cycle
            .weights()
            .keys()
            .map(|&i| (i, QuadraticForm::affine(g.clone())))
            .collect();
        PiecewiseFunction { cycle, pieces }
    }

    pub fn cycle(&self) -> &Arc<TropicalCycle> {
        &self.cycle
    }

    pub fn pieces(&self) -> &BTreeMap<usize, QuadraticForm> {
        &self.pieces
    }

    pub fn piece(&self, cell: usize) -> Result<&QuadraticForm> {
        self.pieces.get(&cell).ok_or(Error::MissingPiece(cell))
    }

    pub fn is_affine(&self) -> bool {
        self.pieces.values().all(QuadraticForm::is_affine)
    }

    fn require_complete(&self) -> Result<()> {
        match self.cycle.weights().keys().find(|i| !self.pieces.contains_key(i)) {
            Some(&i) => Err(Error::MissingPiece(i)),
            None => Ok(()),
        }
    }

    /// Pieces agree on every shared face. Agreement is tested at an affinely
    /// independent set of points of the face and their pairwise midpoints,
    /// which is exact for quadratic pieces.
    pub fn check_continuity(&self) -> Result<ContinuityReport> {
        self.require_complete()?;
        let complex = self.cycle.complex();
        let mut above: Vec<Vec<usize>> = vec![Vec::new(); complex.len()];
        for &m in self.cycle.weights().keys() {
            above[m].push(m);
        }
        // cells are sorted by decreasing dimension, so cofacets come first
        for t in 0..complex.len() {
            let mut acc: Vec<usize> = above[t].clone();
            for &c in complex.cofacets_of(t) {
                acc.extend(above[c].iter().copied());
            }
            acc.sort_unstable();
            acc.dedup();
            above[t] = acc;
        }
        let affine = self.is_affine();
        for (t, owners) in above.iter().enumerate() {
            if owners.len() < 2 {
                continue;
            }
            let points = test_points(complex.cell(t), affine);
            let first = &self.pieces[&owners[0]];
            for &o in &owners[1..] {
                let other = &self.pieces[&o];
                if let Some(x) = points.iter().find(|x| first.eval(x) != other.eval(x)) {
                    return Ok(ContinuityReport { verdict: false, face: Some(t), point: Some(x.clone()) });
                }
            }
        }
        Ok(ContinuityReport { verdict: true, face: None, point: None })
    }

    pub fn evaluate(&self, x: &[Rational]) -> Result<Rational> {
        if x.len() != self.cycle.ambient_dim() {
            return Err(Error::DimensionMismatch { expected: self.cycle.ambient_dim(), found: x.len() });
        }
        for (i, p, _) in self.cycle.maximal_cells() {
            if p.contains(x) {
                return Ok(self.piece(i)?.eval(x));
            }
        }
        Err(Error::PointNotOnSupport)
    }

    pub fn add(&self, other: &PiecewiseFunction) -> Result<PiecewiseFunction> {
        if *self.cycle != *other.cycle {
            return Err(Error::InvalidInput("functions live on different cycles".into()));
        }
        let pieces = self
            .pieces
            .iter()
            .map(|(&i, p)| Ok((i, p.add(other.piece(i)?))))
            .collect::<Result<_>>()?;
        Ok(PiecewiseFunction { cycle: self.cycle.clone(), pieces })
    }

    pub fn add_affine(&self, g: &AffineForm) -> PiecewiseFunction {
        let pieces = self.pieces.iter().map(|(&i, p)| (i, p.add_affine(g))).collect();
        PiecewiseFunction { cycle: self.cycle.clone(), pieces }
    }

    pub fn scaled(&self, s: &Rational) -> PiecewiseFunction {
        let pieces = self.pieces.iter().map(|(&i, p)| (i, p.scaled(s))).collect();
        PiecewiseFunction { cycle: self.cycle.clone(), pieces }
    }

    /// Product with a global affine form; requires affine pieces.
    pub fn times_affine(&self, g: &AffineForm) -> Result<PiecewiseFunction> {
        if !self.is_affine() {
            return Err(Error::NotAffine);
        }
        let pieces = self
            .pieces
            .iter()
            .map(|(&i, p)| (i, QuadraticForm::product(&p.affine_part(), g)))
            .collect();
        Ok(PiecewiseFunction { cycle: self.cycle.clone(), pieces })
    }
}

/// Affinely independent points spanning `aff(p)`, plus their midpoints when
/// `affine` is false.
fn test_points(p: &Polyhedron, affine: bool) -> Vec<QVec> {
    let all = p.spanning_points();
    let mut basis: Vec<QVec> = Vec::new();
    let mut dirs: Vec<QVec> = Vec::new();
    for x in all {
        match basis.first() {
            None => basis.push(x),
            Some(b0) => {
                let d = sub(&x, b0);
                dirs.push(d);
                if linalg::rank(&dirs, p.ambient_dim()) == dirs.len() {
                    basis.push(x);
                } else {
                    dirs.pop();
                }
            }
        }
    }
    if affine {
        return basis;
    }
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let mut out = basis.clone();
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            out.push(scale(&add(&basis[i], &basis[j]), &half));
        }
    }
    out
}

/// Subdivides every maximal cell of `c` into the domains of linearity of
/// `g`. Ties go to the smallest term.
pub fn refine(c: &TropicalCycle, g: &TropicalPolynomial) -> Result<PiecewiseFunction> {
    let n = c.ambient_dim();
    if g.ambient_dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: g.ambient_dim() });
    }
    let sign = match g.mode {
        Mode::Max => Rational::one(),
        Mode::Min => -Rational::one(),
    };
    let mut cells: Vec<(Polyhedron, BigInt)> = Vec::new();
    let mut owners: Vec<(Polyhedron, usize)> = Vec::new();
    for (_, sigma, w) in c.maximal_cells() {
        let mut regions: Vec<Polyhedron> = Vec::new();
        for (i, ti) in g.terms.iter().enumerate() {
            let mut extra = Vec::new();
            let mut feasible = true;
            for (j, tj) in g.terms.iter().enumerate() {
                if i == j {
                    continue;
                }
                let diff = sigma.restrict_form(&ti.sub(tj).scaled(&sign));
                if diff.is_constant() {
                    if diff.constant.is_negative() {
                        feasible = false;
                        break;
                    }
                    continue;
                }
                extra.push(diff);
            }
            if !feasible {
                continue;
            }
            let region = if extra.is_empty() { sigma.clone() } else { sigma.cut(&extra)? };
            if region.dim() == sigma.dim() && !regions.contains(&region) {
                regions.push(region.clone());
                cells.push((region.clone(), w.clone()));
                owners.push((region, i));
            }
        }
    }
    let refined = TropicalCycle::from_trusted(n, cells)?.with_domain(c.domain().cloned());
    let mut pieces = BTreeMap::new();
    for (region, term) in owners {
        let idx = refined.complex().index_of(&region).expect("refined cell");
        pieces.insert(idx, QuadraticForm::affine(g.terms[term].clone()));
    }
    Ok(PiecewiseFunction { cycle: Arc::new(refined), pieces })
}

/// `f` transported to a cycle whose maximal cells each lie in a maximal
/// cell of the source.
pub fn restrict(f: &PiecewiseFunction, d: Arc<TropicalCycle>) -> Result<PiecewiseFunction> {
    f.require_complete()?;
    let mut pieces = BTreeMap::new();
    for (i, cell, _) in d.maximal_cells() {
        let owner = f
            .cycle
            .maximal_cells()
            .find(|(_, sigma, _)| sigma.contains_polyhedron(cell))
            .map(|(j, _, _)| j)
            .ok_or(Error::SupportNotContained(i))?;
        pieces.insert(i, f.pieces[&owner].clone());
    }
    Ok(PiecewiseFunction { cycle: d, pieces })
}

/// One cell of a corner locus with its weight function on `aff(cell)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CornerCell {
    /// Index of the face in the source complex.
    pub face: usize,
    pub cell: Polyhedron,
    pub weight: AffineForm,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CornerLocus {
    ambient_dim: usize,
    dim: i64,
    cells: Vec<CornerCell>,
    domain: Option<OpenBox>,
}

impl CornerLocus {
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> i64 {
        self.dim
    }

    /// Cells with nonzero weight, in ascending source-face order.
    pub fn cells(&self) -> &[CornerCell] {
        &self.cells
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// The corner locus as a cycle; every weight must be an integer constant.
    pub fn to_cycle(&self) -> Result<TropicalCycle> {
        let mut cells = Vec::with_capacity(self.cells.len());
        for (i, c) in self.cells.iter().enumerate() {
            if !c.weight.is_constant() || !c.weight.constant.is_integer() {
                return Err(Error::NonIntegralWeight(i));
            }
            cells.push((c.cell.clone(), c.weight.constant.to_integer()));
        }
        Ok(TropicalCycle::from_trusted(self.ambient_dim, cells)?.with_domain(self.domain.clone()))
    }
}

/// Weight function at one face given the normal representatives to use and
/// the tangential correction `t`.
fn face_weight(f: &PiecewiseFunction, fs: &FaceStar, normals: &[(usize, ZVec)], t: &[Rational]) -> AffineForm {
    let n = f.cycle.ambient_dim();
    let mut w = AffineForm::zero(n);
    for (s, v) in normals {
        let m = Rational::from_integer(f.cycle.weight(*s).expect("maximal").clone());
        w = w.add(&f.pieces[s].directional_derivative(&normal_as_q(v)).scaled(&m));
    }
    let base = &f.pieces[&fs.normals[0].0];
    w = w.sub(&base.directional_derivative(t));
    f.cycle.cell(fs.face).restrict_form(&w)
}

fn weighted_normal_sum(f: &PiecewiseFunction, normals: &[(usize, ZVec)]) -> QVec {
    let n = f.cycle.ambient_dim();
    let mut t = vec![BigInt::zero(); n];
    for (s, v) in normals {
        let m = f.cycle.weight(*s).expect("maximal");
        for (acc, x) in t.iter_mut().zip(v) {
            *acc += m * x;
        }
    }
    to_qvec(&t)
}

fn corner_locus_impl<F>(f: &PiecewiseFunction, permissive: bool, mut choose: F) -> Result<CornerLocus>
where
    F: FnMut(usize, usize, &ZVec, &LatticeBasis) -> ZVec,
{
    if !permissive {
        let b = check_balancing(&f.cycle);
        if !b.verdict {
            return Err(Error::NotBalanced(Box::new(b)));
        }
    }
    let cont = f.check_continuity()?;
    if let (Some(face), Some(point)) = (cont.face, cont.point) {
        return Err(Error::ContinuityViolated { face, point });
    }
    let mut cells = Vec::new();
    for fs in f.cycle.face_stars() {
        if fs.normals.is_empty() {
            continue;
        }
        let normals: Vec<(usize, ZVec)> =
            fs.normals.iter().map(|(s, u)| (*s, choose(*s, fs.face, u, &fs.lattice))).collect();
        let mut t = weighted_normal_sum(f, &normals);
        if permissive {
            let zt: ZVec = t.iter().map(|x| x.to_integer()).collect();
            t = sub(&t, &to_qvec(&fs.lattice.reduce(&zt)));
        }
        let weight = face_weight(f, fs, &normals, &t);
        if !weight.is_zero() {
            cells.push(CornerCell { face: fs.face, cell: f.cycle.cell(fs.face).clone(), weight });
        }
    }
    Ok(CornerLocus {
        ambient_dim: f.cycle.ambient_dim(),
        dim: f.cycle.dim() - 1,
        cells,
        domain: f.cycle.domain().cloned(),
    })
}

/// The corner locus `f·C` with canonical lattice normals.
pub fn corner_locus(f: &PiecewiseFunction) -> Result<CornerLocus> {
    corner_locus_impl(f, false, |_, _, u, _| u.clone())
}

/// Corner locus computed with caller-chosen normal representatives
/// (see [`crate::cycles::check_balancing_with`]).
pub fn corner_locus_with<F>(f: &PiecewiseFunction, choose: F) -> Result<CornerLocus>
where
    F: FnMut(usize, usize, &ZVec, &LatticeBasis) -> ZVec,
{
    corner_locus_impl(f, false, choose)
}

/// Corner-locus formula applied without the balancing precondition. The
/// tangential correction uses the part of `Σ m_σ u_σ` lying in `lin(τ)`, so
/// the balancing excess shows up as extra weight.
pub fn corner_locus_permissive(f: &PiecewiseFunction) -> Result<CornerLocus> {
    corner_locus_impl(f, true, |_, _, u, _| u.clone())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HessianViolation {
    pub cell: usize,
    #[serde(serialize_with = "ser_qvec")]
    pub direction: QVec,
    #[serde(serialize_with = "ser_q")]
    pub value: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CornerViolation {
    pub face: usize,
    #[serde(serialize_with = "ser_qvec")]
    pub point: QVec,
    #[serde(serialize_with = "ser_q")]
    pub value: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PshReport {
    pub verdict: bool,
    pub hessian_violations: Vec<HessianViolation>,
    pub corner_violations: Vec<CornerViolation>,
}

/// A vector `w` with `wᵀAw < 0`, or `None` when `A` is positive
/// semidefinite. Exact symmetric elimination with diagonal pivots.
pub fn psd_witness(a: &[QVec]) -> Option<QVec> {
    let k = a.len();
    if k == 0 {
        return None;
    }
    if let Some(i) = (0..k).find(|&i| a[i][i].is_negative()) {
        let mut w = vec![Rational::zero(); k];
        w[i] = Rational::one();
        return Some(w);
    }
    for i in 0..k {
        if !a[i][i].is_zero() {
            continue;
        }
        if let Some(j) = (0..k).find(|&j| !a[i][j].is_zero()) {
            // (t e_i + e_j)ᵀ A (t e_i + e_j) = 2 a_ij t + a_jj = -1
            let mut w = vec![Rational::zero(); k];
            w[i] = -(&a[j][j] + Rational::one()) / (Rational::from_integer(2.into()) * &a[i][j]);
            w[j] = Rational::one();
            return Some(w);
        }
    }
    let Some(p) = (0..k).find(|&i| a[i][i].is_positive()) else {
        return None;
    };
    let rest: Vec<usize> = (0..k).filter(|&i| i != p).collect();
    let schur: Vec<QVec> = rest
        .iter()
        .map(|&i| rest.iter().map(|&j| &a[i][j] - &a[i][p] * &a[p][j] / &a[p][p]).collect())
        .collect();
    let z = psd_witness(&schur)?;
    let mut w = vec![Rational::zero(); k];
    let mut s = Rational::zero();
    for (zi, &i) in z.iter().zip(&rest) {
        w[i] = zi.clone();
        s += &a[p][i] * zi;
    }
    w[p] = -s / &a[p][p];
    Some(w)
}

/// A point of `p` where the affine `w` is negative, if any.
pub(crate) fn negative_point(p: &Polyhedron, w: &AffineForm) -> Option<(QVec, Rational)> {
    for v in p.vertices() {
        let x = w.eval(v);
        if x.is_negative() {
            return Some((v.clone(), x));
        }
    }
    let v0 = p.vertices().first()?;
    let base = w.eval(v0);
    let mut dirs: Vec<QVec> = p.rays().to_vec();
    for l in p.lineality() {
        dirs.push(l.clone());
        dirs.push(l.iter().map(|x| -x).collect());
    }
    for r in dirs {
        let s = w.slope(&r);
        if s.is_negative() {
            // w(v0 + λr) = s with λ = w(v0)/(-s) + 1
            let lambda = &base / -&s + Rational::one();
            return Some((add(v0, &scale(&r, &lambda)), s));
        }
    }
    None
}

/// Facewise positive semidefinite Hessian and nonnegative corner weights.
pub fn check_psh(f: &PiecewiseFunction) -> Result<PshReport> {
    let locus = corner_locus(f)?;
    let mut hessian_violations = Vec::new();
    for (&i, piece) in &f.pieces {
        let Some(h) = piece.hessian() else { continue };
        let b = f.cycle.cell(i).lattice().rational_basis();
        if let Some(w) = psd_witness(&congruence(h, &b)) {
            let mut d = vec![Rational::zero(); f.cycle.ambient_dim()];
            for (wi, bi) in w.iter().zip(&b) {
                d = add(&d, &scale(bi, wi));
            }
            let value = piece.curvature(&d);
            hessian_violations.push(HessianViolation { cell: i, direction: d, value });
        }
    }
    let mut corner_violations = Vec::new();
    for c in locus.cells() {
        if let Some((point, value)) = negative_point(&c.cell, &c.weight) {
            corner_violations.push(CornerViolation { face: c.face, point, value });
        }
    }
    Ok(PshReport {
        verdict: hessian_violations.is_empty() && corner_violations.is_empty(),
        hessian_violations,
        corner_violations,
    })
}
