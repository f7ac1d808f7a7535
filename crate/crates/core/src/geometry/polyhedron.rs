//! Rational polyhedra with synchronized inequality and generator descriptions.
//!
//! A [`Polyhedron`] is always canonical: the affine hull is stored as
//! equations in reduced echelon form, facets are reduced modulo those
//! equations and scaled so their linear part is a primitive integer vector,
//! and generators are reduced modulo the lineality space. Two polyhedra are
//! equal as sets iff they are equal as values.

use std::collections::{BTreeSet, HashMap, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::dd::cone_generators;
use super::lattice::{extended_gcd, LatticeBasis};
use super::linalg;
use super::rational::{
    clear_denominators, dot, is_zero_vec, scale, sub, to_qvec, zero_vec, QVec, Rational, ZVec,
};
use crate::error::{Error, Result};

/// Largest ambient dimension accepted by [`canonicalize`].
pub const MAX_AMBIENT_DIM: usize = 12;
/// Largest number of input constraints accepted by [`canonicalize`].
pub const MAX_CONSTRAINTS: usize = 64;

/// `x ↦ linear · x + constant`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineForm {
    pub linear: QVec,
    pub constant: Rational,
}

impl AffineForm {
    pub fn new(linear: QVec, constant: Rational) -> Self {
        AffineForm { linear, constant }
    }

    pub fn zero(n: usize) -> Self {
        AffineForm::new(zero_vec(n), Rational::zero())
    }

    pub fn ambient_dim(&self) -> usize {
        self.linear.len()
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        dot(&self.linear, x) + &self.constant
    }

    /// Value of the linear part on a direction.
    pub fn slope(&self, v: &[Rational]) -> Rational {
        dot(&self.linear, v)
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && is_zero_vec(&self.linear)
    }

    pub fn is_constant(&self) -> bool {
        is_zero_vec(&self.linear)
    }

    pub fn add(&self, other: &AffineForm) -> AffineForm {
        AffineForm::new(
            super::rational::add(&self.linear, &other.linear),
            &self.constant + &other.constant,
        )
    }

    pub fn sub(&self, other: &AffineForm) -> AffineForm {
        AffineForm::new(sub(&self.linear, &other.linear), &self.constant - &other.constant)
    }

    pub fn scaled(&self, s: &Rational) -> AffineForm {
        AffineForm::new(scale(&self.linear, s), &self.constant * s)
    }

    fn coefficients(&self) -> QVec {
        let mut v = self.linear.clone();
        v.push(self.constant.clone());
        v
    }

    fn from_coefficients(mut v: QVec) -> AffineForm {
        let c = v.pop().expect("nonempty coefficient vector");
        AffineForm::new(v, c)
    }

    /// Positive multiple whose linear part is a primitive integer vector.
    fn primitive_scaled(&self) -> AffineForm {
        let z = clear_denominators(&self.linear);
        let i = self
            .linear
            .iter()
            .position(|x| !x.is_zero())
            .expect("nonzero linear part");
        let factor = Rational::from_integer(z[i].clone()) / &self.linear[i];
        self.scaled(&factor)
    }
}

/// Input to [`canonicalize`]: exactly one of the two descriptions.
#[derive(Clone, Debug)]
pub enum RawPolyhedron {
    /// `{x : f(x) >= 0 for every f}`.
    Inequalities {
        ambient_dim: usize,
        constraints: Vec<AffineForm>,
    },
    /// `conv(vertices) + cone(rays) + span(lineality)`.
    Generators {
        ambient_dim: usize,
        vertices: Vec<QVec>,
        rays: Vec<QVec>,
        lineality: Vec<QVec>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Polyhedron {
    ambient_dim: usize,
    dim: i64,
    vertices: Vec<QVec>,
    rays: Vec<QVec>,
    lineality: Vec<QVec>,
    equations: Vec<AffineForm>,
    facets: Vec<AffineForm>,
}

/// Canonical form of a polyhedron given by one description.
pub fn canonicalize(raw: &RawPolyhedron) -> Result<Polyhedron> {
    match raw {
        RawPolyhedron::Inequalities { ambient_dim, constraints } => {
            if constraints.len() > MAX_CONSTRAINTS {
                return Err(Error::ConstraintGuardExceeded {
                    count: constraints.len(),
                    max: MAX_CONSTRAINTS,
                });
            }
            Polyhedron::from_inequalities(*ambient_dim, constraints)
        }
        RawPolyhedron::Generators { ambient_dim, vertices, rays, lineality } => {
            Polyhedron::from_generators(*ambient_dim, vertices, rays, lineality)
        }
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n > MAX_AMBIENT_DIM {
        return Err(Error::DimensionGuardExceeded { dim: n, max: MAX_AMBIENT_DIM });
    }
    Ok(())
}

fn check_len(n: usize, v: &[Rational]) -> Result<()> {
    if v.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: v.len() });
    }
    Ok(())
}

/// Canonical generators: lineality basis (primitive echelon rows), vertices
/// and rays reduced modulo lineality.
struct Generators {
    vertices: Vec<QVec>,
    rays: Vec<QVec>,
    lineality: Vec<QVec>,
}

fn canonical_generators(n: usize, vertices: Vec<QVec>, rays: Vec<QVec>, lineality: Vec<QVec>) -> Generators {
    let (lin_rref, pivots) = linalg::rref(&lineality, n);
    let reduce = |v: &QVec| -> QVec {
        let mut out = v.clone();
        for (row, &p) in lin_rref.iter().zip(&pivots) {
            if !out[p].is_zero() {
                let f = out[p].clone();
                for (o, r) in out.iter_mut().zip(row) {
                    *o -= &f * r;
                }
            }
        }
        out
    };
    let verts: BTreeSet<QVec> = vertices.iter().map(reduce).collect();
    let ray_set: BTreeSet<QVec> = rays
        .iter()
        .map(reduce)
        .filter(|r| !is_zero_vec(r))
        .map(|r| to_qvec(&clear_denominators(&r)))
        .collect();
    let lineality = lin_rref.iter().map(|r| to_qvec(&clear_denominators(r))).collect();
    Generators {
        vertices: verts.into_iter().collect(),
        rays: ray_set.into_iter().collect(),
        lineality,
    }
}

fn integer_row(v: &[Rational]) -> ZVec {
    if is_zero_vec(v) {
        return vec![BigInt::zero(); v.len()];
    }
    clear_denominators(v)
}

/// Minimal generators of `{x : f(x) >= 0}`; `None` when empty.
fn generators_from_forms(n: usize, forms: &[AffineForm]) -> Option<Generators> {
    let mut cons: Vec<ZVec> = forms.iter().map(|f| integer_row(&f.coefficients())).collect();
    let mut t = vec![BigInt::zero(); n + 1];
    t[n] = BigInt::one();
    cons.push(t);
    let g = cone_generators(&cons, n + 1);
    let mut vertices = Vec::new();
    let mut rays = Vec::new();
    for r in &g.rays {
        let q = to_qvec(r);
        if q[n].is_zero() {
            rays.push(q[..n].to_vec());
        } else {
            let t = q[n].clone();
            vertices.push(q[..n].iter().map(|x| x / &t).collect());
        }
    }
    if vertices.is_empty() {
        return None;
    }
    let lineality = g.lineality.iter().map(|l| to_qvec(&l[..n])).collect();
    Some(canonical_generators(n, vertices, rays, lineality))
}

fn reduce_by_equations(form: &AffineForm, equations: &[AffineForm]) -> AffineForm {
    let mut out = form.clone();
    for e in equations {
        let p = e
            .linear
            .iter()
            .position(|x| !x.is_zero())
            .expect("equation with nonzero linear part");
        if !out.linear[p].is_zero() {
            let f = &out.linear[p] / &e.linear[p];
            out = out.sub(&e.scaled(&f));
        }
    }
    out
}

/// Canonical equations spanning the given affine forms (which must define a
/// nonempty affine subspace).
fn canonical_equations(n: usize, forms: &[AffineForm]) -> Vec<AffineForm> {
    let rows: Vec<QVec> = forms.iter().map(AffineForm::coefficients).collect();
    let (rref, pivots) = linalg::rref(&rows, n + 1);
    debug_assert!(pivots.iter().all(|&p| p < n), "inconsistent equations");
    rref.into_iter()
        .map(|r| AffineForm::from_coefficients(r).primitive_scaled())
        .collect()
}

fn canonical_facets(equations: &[AffineForm], candidates: impl Iterator<Item = AffineForm>) -> Vec<AffineForm> {
    let set: BTreeSet<AffineForm> = candidates
        .map(|f| reduce_by_equations(&f, equations))
        .filter(|f| !f.is_constant())
        .map(|f| f.primitive_scaled())
        .collect();
    set.into_iter().collect()
}

/// Minimal inequality description of a nonempty generated polyhedron.
fn forms_from_generators(n: usize, g: &Generators) -> (Vec<AffineForm>, Vec<AffineForm>) {
    let mut cons: Vec<ZVec> = Vec::new();
    for v in &g.vertices {
        let mut h = v.clone();
        h.push(Rational::one());
        cons.push(integer_row(&h));
    }
    for r in &g.rays {
        let mut h = r.clone();
        h.push(Rational::zero());
        cons.push(integer_row(&h));
    }
    for l in &g.lineality {
        let mut h = l.clone();
        h.push(Rational::zero());
        let z = integer_row(&h);
        cons.push(z.iter().map(|x| -x).collect());
        cons.push(z);
    }
    let polar = cone_generators(&cons, n + 1);
    let eq_forms: Vec<AffineForm> = polar
        .lineality
        .iter()
        .map(|l| AffineForm::from_coefficients(to_qvec(l)))
        .collect();
    let equations = canonical_equations(n, &eq_forms);
    let facets = canonical_facets(
        &equations,
        polar.rays.iter().map(|r| AffineForm::from_coefficients(to_qvec(r))),
    );
    (equations, facets)
}

/// Dimension of `conv(V) + cone(R) + span(L)` for nonempty `V`.
fn generated_dim(n: usize, vertices: &[&QVec], rays: &[&QVec], lineality: &[QVec]) -> i64 {
    if vertices.is_empty() {
        return -1;
    }
    let base = vertices[0];
    let mut dirs: Vec<QVec> = vertices[1..].iter().map(|v| sub(v, base)).collect();
    dirs.extend(rays.iter().map(|r| (*r).clone()));
    dirs.extend(lineality.iter().cloned());
    linalg::rank(&dirs, n) as i64
}

impl Polyhedron {
    pub fn empty(ambient_dim: usize) -> Self {
        let mut infeasible = AffineForm::zero(ambient_dim);
        infeasible.constant = -Rational::one();
        Polyhedron {
            ambient_dim,
            dim: -1,
            vertices: Vec::new(),
            rays: Vec::new(),
            lineality: Vec::new(),
            equations: Vec::new(),
            facets: vec![infeasible],
        }
    }

    /// The whole space `Q^n`.
    pub fn whole_space(ambient_dim: usize) -> Result<Self> {
        Self::from_inequalities(ambient_dim, &[])
    }

    pub fn point(p: &[Rational]) -> Result<Self> {
        Self::from_generators(p.len(), &[p.to_vec()], &[], &[])
    }

    /// `{x : f(x) >= 0 for all constraints}`.
    pub fn from_inequalities(ambient_dim: usize, constraints: &[AffineForm]) -> Result<Self> {
        check_dim(ambient_dim)?;
        for f in constraints {
            check_len(ambient_dim, &f.linear)?;
        }
        let Some(g) = generators_from_forms(ambient_dim, constraints) else {
            return Ok(Self::empty(ambient_dim));
        };
        let (equations, facets) = forms_from_generators(ambient_dim, &g);
        Ok(Self::assemble(ambient_dim, g, equations, facets))
    }

    /// `conv(vertices) + cone(rays) + span(lineality)`.
    pub fn from_generators(ambient_dim: usize, vertices: &[QVec], rays: &[QVec], lineality: &[QVec]) -> Result<Self> {
        check_dim(ambient_dim)?;
        for v in vertices.iter().chain(rays).chain(lineality) {
            check_len(ambient_dim, v)?;
        }
        if vertices.is_empty() {
            return Ok(Self::empty(ambient_dim));
        }
        let raw = canonical_generators(ambient_dim, vertices.to_vec(), rays.to_vec(), lineality.to_vec());
        let (equations, facets) = forms_from_generators(ambient_dim, &raw);
        let mut all = equations.clone();
        all.extend(equations.iter().map(|e| e.scaled(&-Rational::one())));
        all.extend(facets.iter().cloned());
        let g = generators_from_forms(ambient_dim, &all).expect("nonempty polyhedron");
        Ok(Self::assemble(ambient_dim, g, equations, facets))
    }

    fn assemble(n: usize, g: Generators, equations: Vec<AffineForm>, facets: Vec<AffineForm>) -> Self {
        let dim = n as i64 - equations.len() as i64;
        Polyhedron {
            ambient_dim: n,
            dim,
            vertices: g.vertices,
            rays: g.rays,
            lineality: g.lineality,
            equations,
            facets,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Dimension of the affine hull; `-1` for the empty set.
    pub fn dim(&self) -> i64 {
        self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.dim < 0
    }

    pub fn vertices(&self) -> &[QVec] {
        &self.vertices
    }

    pub fn rays(&self) -> &[QVec] {
        &self.rays
    }

    pub fn lineality(&self) -> &[QVec] {
        &self.lineality
    }

    pub fn equations(&self) -> &[AffineForm] {
        &self.equations
    }

    /// Facet-defining inequalities, reduced modulo the equations.
    pub fn facet_inequalities(&self) -> &[AffineForm] {
        &self.facets
    }

    /// Full inequality list: each equation as a pair `e >= 0`, `-e >= 0`,
    /// followed by the facet inequalities.
    pub fn hrep(&self) -> Vec<AffineForm> {
        let mut out = Vec::new();
        for e in &self.equations {
            out.push(e.clone());
            out.push(e.scaled(&-Rational::one()));
        }
        out.extend(self.facets.iter().cloned());
        out
    }

    pub fn is_bounded(&self) -> bool {
        self.rays.is_empty() && self.lineality.is_empty()
    }

    /// Whether the only vertex is the origin, i.e. the polyhedron is a cone
    /// with apex 0.
    pub fn is_cone_at_origin(&self) -> bool {
        self.vertices.len() == 1 && is_zero_vec(&self.vertices[0])
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        !self.is_empty()
            && self.equations.iter().all(|e| e.eval(x).is_zero())
            && self.facets.iter().all(|f| !f.eval(x).is_negative())
    }

    /// Whether `x` lies in the relative interior.
    pub fn relative_interior_contains(&self, x: &[Rational]) -> bool {
        !self.is_empty()
            && self.equations.iter().all(|e| e.eval(x).is_zero())
            && self.facets.iter().all(|f| f.eval(x).is_positive())
    }

    /// Containment of sets, decided on generators.
    pub fn contains_polyhedron(&self, other: &Polyhedron) -> bool {
        if other.is_empty() {
            return true;
        }
        if self.is_empty() {
            return false;
        }
        other.vertices.iter().all(|v| self.contains(v))
            && other.rays.iter().all(|r| {
                self.equations.iter().all(|e| e.slope(r).is_zero())
                    && self.facets.iter().all(|f| !f.slope(r).is_negative())
            })
            && other.lineality.iter().all(|l| {
                self.equations.iter().all(|e| e.slope(l).is_zero())
                    && self.facets.iter().all(|f| f.slope(l).is_zero())
            })
    }

    pub fn intersection(&self, other: &Polyhedron) -> Result<Polyhedron> {
        if self.is_empty() || other.is_empty() {
            return Ok(Self::empty(self.ambient_dim));
        }
        let mut forms = self.hrep();
        forms.extend(other.hrep());
        Self::from_inequalities(self.ambient_dim, &forms)
    }

    /// Intersection with additional inequalities.
    pub fn cut(&self, extra: &[AffineForm]) -> Result<Polyhedron> {
        if self.is_empty() {
            return Ok(self.clone());
        }
        let mut forms = self.hrep();
        forms.extend(extra.iter().cloned());
        Self::from_inequalities(self.ambient_dim, &forms)
    }

    /// Basis-free spanning set of the linear space parallel to the affine hull.
    pub fn direction_space(&self) -> Vec<QVec> {
        let mut dirs = Vec::new();
        if let Some(base) = self.vertices.first() {
            dirs.extend(self.vertices[1..].iter().map(|v| sub(v, base)));
        }
        dirs.extend(self.rays.iter().cloned());
        dirs.extend(self.lineality.iter().cloned());
        dirs
    }

    /// `lin(P) ∩ Z^n` in Hermite form.
    pub fn lattice(&self) -> LatticeBasis {
        LatticeBasis::of_span(&self.direction_space(), self.ambient_dim)
    }

    /// The unique representative of `form` restricted to the affine hull
    /// whose linear part vanishes on the pivot coordinates of the equations.
    pub fn restrict_form(&self, form: &AffineForm) -> AffineForm {
        reduce_by_equations(form, &self.equations)
    }

    /// Average of the vertices plus the sum of the rays.
    pub fn relative_interior_point(&self) -> Result<QVec> {
        if self.is_empty() {
            return Err(Error::EmptyPolyhedron);
        }
        let k = Rational::from_integer(BigInt::from(self.vertices.len()));
        let mut p = zero_vec(self.ambient_dim);
        for v in &self.vertices {
            p = super::rational::add(&p, v);
        }
        p = p.iter().map(|x| x / &k).collect();
        for r in &self.rays {
            p = super::rational::add(&p, r);
        }
        Ok(p)
    }

    /// Points of the polyhedron whose affine hull is the affine hull of the
    /// polyhedron: vertices, first vertex plus each ray, first vertex plus
    /// and minus each lineality generator.
    pub fn spanning_points(&self) -> Vec<QVec> {
        let Some(base) = self.vertices.first() else {
            return Vec::new();
        };
        let mut pts = self.vertices.clone();
        pts.extend(self.rays.iter().map(|r| super::rational::add(base, r)));
        for l in &self.lineality {
            pts.push(super::rational::add(base, l));
            pts.push(sub(base, l));
        }
        pts
    }

    /// Generators of the cone of feasible directions at `omega`:
    /// `{v : omega + εv ∈ P for small ε > 0}`. Not necessarily minimal.
    pub fn tangent_directions(&self, omega: &[Rational]) -> Vec<QVec> {
        let mut dirs: Vec<QVec> = self
            .vertices
            .iter()
            .map(|v| sub(v, omega))
            .filter(|d| !is_zero_vec(d))
            .collect();
        dirs.extend(self.rays.iter().cloned());
        for l in &self.lineality {
            dirs.push(l.clone());
            dirs.push(l.iter().map(|x| -x).collect());
        }
        dirs
    }

    /// The tangent cone at `omega` translated to the origin.
    pub fn tangent_cone(&self, omega: &[Rational]) -> Result<Polyhedron> {
        if !self.contains(omega) {
            return Err(Error::PointNotOnSupport);
        }
        let mut forms = Vec::new();
        for e in &self.equations {
            forms.push(AffineForm::new(e.linear.clone(), Rational::zero()));
            forms.push(AffineForm::new(e.linear.iter().map(|x| -x).collect(), Rational::zero()));
        }
        for f in &self.facets {
            if f.eval(omega).is_zero() {
                forms.push(AffineForm::new(f.linear.clone(), Rational::zero()));
            }
        }
        Self::from_inequalities(self.ambient_dim, &forms)
    }

    /// Vertex and ray incidences with every facet.
    fn incidence(&self) -> Vec<Vec<usize>> {
        let nv = self.vertices.len();
        self.facets
            .iter()
            .map(|f| {
                let mut z: Vec<usize> = (0..nv).filter(|&i| f.eval(&self.vertices[i]).is_zero()).collect();
                z.extend((0..self.rays.len()).filter(|&j| f.slope(&self.rays[j]).is_zero()).map(|j| nv + j));
                z
            })
            .collect()
    }

    /// The face with the given generator subset (which must be an
    /// intersection of facet incidence sets).
    fn face_from_generator_set(&self, set: &[usize], incidence: &[Vec<usize>]) -> Polyhedron {
        let n = self.ambient_dim;
        let nv = self.vertices.len();
        if !set.iter().any(|&i| i < nv) {
            return Self::empty(n);
        }
        if set.len() == nv + self.rays.len() {
            return self.clone();
        }
        let tight: Vec<usize> = (0..self.facets.len())
            .filter(|&i| set.iter().all(|g| incidence[i].contains(g)))
            .collect();
        let mut eq_forms = self.equations.clone();
        eq_forms.extend(tight.iter().map(|&i| self.facets[i].clone()));
        let equations = canonical_equations(n, &eq_forms);
        let dim = n as i64 - equations.len() as i64;

        let verts: Vec<&QVec> = set.iter().filter(|&&i| i < nv).map(|&i| &self.vertices[i]).collect();
        let rays: Vec<&QVec> = set.iter().filter(|&&i| i >= nv).map(|&i| &self.rays[i - nv]).collect();
        let facets = canonical_facets(
            &equations,
            (0..self.facets.len())
                .filter(|i| !tight.contains(i))
                .filter(|&j| {
                    let sub_v: Vec<&QVec> = set
                        .iter()
                        .filter(|&&g| g < nv && incidence[j].contains(&g))
                        .map(|&g| &self.vertices[g])
                        .collect();
                    let sub_r: Vec<&QVec> = set
                        .iter()
                        .filter(|&&g| g >= nv && incidence[j].contains(&g))
                        .map(|&g| &self.rays[g - nv])
                        .collect();
                    generated_dim(n, &sub_v, &sub_r, &self.lineality) == dim - 1
                })
                .map(|j| self.facets[j].clone()),
        );
        Polyhedron {
            ambient_dim: n,
            dim,
            vertices: verts.into_iter().cloned().collect(),
            rays: rays.into_iter().cloned().collect(),
            lineality: self.lineality.clone(),
            equations,
            facets,
        }
    }

    /// All faces, grouped by codimension (index 0 is the polyhedron itself,
    /// the last group holds the empty face).
    pub fn face_lattice(&self) -> Vec<Vec<Polyhedron>> {
        if self.is_empty() {
            return vec![vec![self.clone()]];
        }
        let nv = self.vertices.len();
        let total = nv + self.rays.len();
        let incidence = self.incidence();
        let full: Vec<usize> = (0..total).collect();
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut queue = VecDeque::new();
        seen.insert(full.clone());
        queue.push_back(full);
        while let Some(s) = queue.pop_front() {
            for z in &incidence {
                let t: Vec<usize> = s.iter().filter(|g| z.contains(g)).copied().collect();
                if t.len() == s.len() || !t.iter().any(|&g| g < nv) {
                    continue;
                }
                if seen.insert(t.clone()) {
                    queue.push_back(t);
                }
            }
        }
        let d = self.dim as usize;
        let mut groups: Vec<Vec<Polyhedron>> = vec![Vec::new(); d + 2];
        for s in &seen {
            let f = self.face_from_generator_set(s, &incidence);
            let codim = (self.dim - f.dim) as usize;
            groups[codim].push(f);
        }
        for g in groups.iter_mut() {
            g.sort();
        }
        groups[d + 1].push(Self::empty(self.ambient_dim));
        groups
    }

    /// Faces of codimension one.
    pub fn facets(&self) -> Vec<Polyhedron> {
        if self.is_empty() {
            return Vec::new();
        }
        let incidence = self.incidence();
        let mut out: Vec<Polyhedron> = incidence
            .iter()
            .map(|z| self.face_from_generator_set(z, &incidence))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// The smallest face of `self` containing `other` (`other ⊂ self`).
    pub fn smallest_face_containing(&self, other: &Polyhedron) -> Polyhedron {
        if other.is_empty() {
            return Self::empty(self.ambient_dim);
        }
        let incidence = self.incidence();
        let nv = self.vertices.len();
        let mut set: Vec<usize> = (0..nv + self.rays.len()).collect();
        for (f, z) in self.facets.iter().zip(&incidence) {
            let tight = other.vertices.iter().all(|v| f.eval(v).is_zero())
                && other.rays.iter().all(|r| f.slope(r).is_zero())
                && other.lineality.iter().all(|l| f.slope(l).is_zero());
            if tight {
                set.retain(|g| z.contains(g));
            }
        }
        self.face_from_generator_set(&set, &incidence)
    }

    pub fn is_face_of(&self, other: &Polyhedron) -> bool {
        if self.is_empty() {
            return true;
        }
        other.contains_polyhedron(self) && other.smallest_face_containing(self) == *self
    }
}

/// Faces grouped by codimension.
pub fn face_lattice(p: &Polyhedron) -> Vec<Vec<Polyhedron>> {
    p.face_lattice()
}

pub fn relative_interior_point(p: &Polyhedron) -> Result<QVec> {
    p.relative_interior_point()
}

/// Canonical primitive lattice normal `u_{σ/τ}`: an element of
/// `lin(σ) ∩ Z^n` generating the quotient by `lin(τ) ∩ Z^n`, pointing from
/// `τ` into `σ`, reduced modulo the Hermite basis of `lin(τ) ∩ Z^n`.
pub fn lattice_normal_vector(sigma: &Polyhedron, tau: &Polyhedron) -> Result<ZVec> {
    if tau.is_empty() || tau.dim() + 1 != sigma.dim() || !tau.is_face_of(sigma) {
        return Err(Error::NotACodimOneFace);
    }
    let big = sigma.lattice();
    let small = tau.lattice();
    lattice_normal_from_bases(sigma, tau, &big, &small)
}

pub(crate) fn lattice_normal_from_bases(
    sigma: &Polyhedron,
    tau: &Polyhedron,
    big: &LatticeBasis,
    small: &LatticeBasis,
) -> Result<ZVec> {
    let basis = big.rational_basis();
    let k = basis.len();
    // Coordinates of lin(τ) ∩ Z^n in the basis of lin(σ) ∩ Z^n.
    let coords: Vec<QVec> = small
        .rational_basis()
        .iter()
        .map(|w| linalg::solve_combination(&basis, w).ok_or(Error::NotACodimOneFace))
        .collect::<Result<_>>()?;
    let functional = linalg::nullspace(&coords, k);
    if functional.len() != 1 {
        return Err(Error::NotACodimOneFace);
    }
    let phi = clear_denominators(&functional[0]);
    let (g, c) = extended_gcd(&phi);
    debug_assert!(g.is_one());
    let mut u = vec![BigInt::zero(); sigma.ambient_dim()];
    for (ci, b) in c.iter().zip(big.basis()) {
        for (x, y) in u.iter_mut().zip(b) {
            *x += ci * y;
        }
    }
    let inward = sigma
        .facet_inequalities()
        .iter()
        .find(|f| {
            tau.vertices().iter().all(|v| f.eval(v).is_zero())
                && tau.rays().iter().all(|r| f.slope(r).is_zero())
                && tau.lineality().iter().all(|l| f.slope(l).is_zero())
        })
        .ok_or(Error::NotACodimOneFace)?;
    if inward.slope(&to_qvec(&u)).is_negative() {
        u = u.iter().map(|x| -x).collect();
    }
    Ok(small.reduce(&u))
}

/// Outcome of [`is_zgamma`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZGammaReport {
    pub holds: bool,
    /// A defining inequality list with integer linear parts and constants in Γ.
    pub forms: Vec<AffineForm>,
    /// A facet or equation admitting no such supporting form.
    pub witness: Option<AffineForm>,
}

/// Generator of the cyclic group `Z g_1 + ... + Z g_k ⊂ Q` (zero when empty).
pub fn gamma_generator(gens: &[Rational]) -> Rational {
    let den = gens.iter().fold(BigInt::one(), |acc, g| acc.lcm(g.denom()));
    let num = gens
        .iter()
        .map(|g| (g * Rational::from_integer(den.clone())).to_integer())
        .fold(BigInt::zero(), |acc, x| acc.gcd(&x));
    Rational::new(num, den)
}

/// Whether `p` is cut out by forms with integer linear part and constant in
/// the group generated by `gamma_generators`.
pub fn is_zgamma(p: &Polyhedron, gamma_generators: &[Rational]) -> ZGammaReport {
    let g = gamma_generator(gamma_generators);
    let hrep = p.hrep();
    if g.is_zero() {
        let witness = if p.is_empty() {
            p.facet_inequalities().first().cloned()
        } else {
            p.equations()
                .iter()
                .chain(p.facet_inequalities())
                .find(|f| !f.constant.is_zero())
                .cloned()
        };
        return ZGammaReport {
            holds: witness.is_none(),
            forms: if witness.is_none() { hrep } else { Vec::new() },
            witness,
        };
    }
    let forms = hrep
        .iter()
        .map(|f| {
            if f.is_constant() {
                // infeasible marker of the empty polyhedron
                return AffineForm::new(f.linear.clone(), -g.abs());
            }
            let ratio = &f.constant / &g;
            f.scaled(&Rational::from_integer(ratio.denom().clone()))
        })
        .collect();
    ZGammaReport { holds: true, forms, witness: None }
}

/// Groups polyhedra by set equality, returning the index of the first
/// occurrence for each input.
pub fn dedup_index(polys: &[Polyhedron]) -> (Vec<Polyhedron>, Vec<usize>) {
    let mut map: HashMap<&Polyhedron, usize> = HashMap::new();
    let mut uniq = Vec::new();
    let mut idx = Vec::with_capacity(polys.len());
    for p in polys {
        let i = *map.entry(p).or_insert_with(|| {
            uniq.push(p.clone());
            uniq.len() - 1
        });
        idx.push(i);
    }
    (uniq, idx)
}
