//! Generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tropkit::cycles::TropicalCycle;
use tropkit::geometry::linalg;
use tropkit::geometry::rational::{clear_denominators, q, qvec, zero_vec};
use tropkit::geometry::{AffineForm, Polyhedron, QVec, Rational};
use tropkit::plfunc::{
    corner_locus, refine, CornerLocus, Mode, PiecewiseFunction, QuadraticForm, TropicalPolynomial,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cone(n: usize, rays: &[QVec], lineality: &[QVec]) -> Polyhedron {
    Polyhedron::from_generators(n, &[zero_vec(n)], rays, lineality).expect("cone")
}

pub fn cycle(n: usize, cells: Vec<(Polyhedron, i64)>) -> TropicalCycle {
    TropicalCycle::new(n, cells.into_iter().map(|(p, w)| (p, BigInt::from(w))).collect())
        .expect("valid cycle")
        .0
}

/// The standard tropical line in the plane.
pub fn tropical_line() -> TropicalCycle {
    let rays = [qvec(&[-1, 0]), qvec(&[0, -1]), qvec(&[1, 1])];
    cycle(2, rays.iter().map(|r| (cone(2, &[r.clone()], &[]), 1)).collect())
}

pub type IntMatrix = Vec<Vec<i64>>;

/// A random matrix in `GL_n(Z)`: a few elementary row operations, a
/// permutation and sign changes applied to the identity.
pub fn unimodular(n: usize, rng: &mut ChaCha8Rng) -> IntMatrix {
    let mut m: IntMatrix = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    if n > 1 {
        for _ in 0..n {
            let i = rng.gen_range(0..n);
            let mut j = rng.gen_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            let k = if rng.gen_bool(0.5) { 1 } else { -1 };
            for c in 0..n {
                m[i][c] += k * m[j][c];
            }
        }
    }
    m.shuffle(rng);
    for row in m.iter_mut() {
        if rng.gen_bool(0.5) {
            row.iter_mut().for_each(|x| *x = -*x);
        }
    }
    m
}

pub fn apply(m: &IntMatrix, v: &[Rational]) -> QVec {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, x)| q(*a) * x).sum())
        .collect()
}

/// Rays `e_0 = -(e_1 + ... + e_n), e_1, ..., e_n` of the fan of projective space.
pub fn projective_rays(n: usize) -> Vec<QVec> {
    let mut rays = vec![vec![q(-1); n]];
    rays.extend((0..n).map(|i| tropkit::geometry::rational::unit_vec(n, i)));
    rays
}

fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            go(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, m, k, &mut Vec::new(), &mut out);
    out
}

/// The `k`-skeleton of the fan of `P^a`, times `R^b`, moved by `t`.
pub fn skeleton_fan(a: usize, k: usize, b: usize, weight: i64, t: &IntMatrix) -> TropicalCycle {
    let n = a + b;
    let pad = |v: &QVec| -> QVec {
        let mut w = v.clone();
        w.extend((0..b).map(|_| q(0)));
        apply(t, &w)
    };
    let rays: Vec<QVec> = projective_rays(a).iter().map(pad).collect();
    let lineality: Vec<QVec> = (0..b)
        .map(|i| apply(t, &tropkit::geometry::rational::unit_vec(n, a + i)))
        .collect();
    let cells = subsets(a + 1, k)
        .into_iter()
        .map(|s| {
            let rs: Vec<QVec> = s.iter().map(|&i| rays[i].clone()).collect();
            (cone(n, &rs, &lineality), weight)
        })
        .collect();
    cycle(n, cells)
}

pub fn random_form(n: usize, rng: &mut ChaCha8Rng, slope: i64, constant: i64) -> AffineForm {
    AffineForm::new(
        (0..n).map(|_| q(rng.gen_range(-slope..=slope))).collect(),
        q(rng.gen_range(-constant..=constant)),
    )
}

pub fn random_polynomial(n: usize, rng: &mut ChaCha8Rng, mode: Mode, homogeneous: bool) -> TropicalPolynomial {
    let k = rng.gen_range(2..=3);
    let c = if homogeneous { 0 } else { 2 };
    TropicalPolynomial::new(mode, (0..k).map(|_| random_form(n, rng, 2, c)).collect()).expect("polynomial")
}

/// Corner locus of a random tropical polynomial on `R^n`. Min polynomials
/// give negative weights.
pub fn hypersurface(n: usize, rng: &mut ChaCha8Rng, mode: Mode) -> Option<TropicalCycle> {
    let whole = cycle(n, vec![(Polyhedron::whole_space(n).unwrap(), 1)]);
    let f = refine(&whole, &random_polynomial(n, rng, mode, false)).ok()?;
    let c = corner_locus(&f).ok()?.to_cycle().ok()?;
    (!c.is_zero()).then_some(c)
}

/// A random balanced effective fan of dimension `1..=3` in `R^2..R^4`.
pub fn random_effective_fan(rng: &mut ChaCha8Rng) -> TropicalCycle {
    let n = rng.gen_range(2..=4);
    let b = rng.gen_range(0..n.min(2));
    let a = n - b;
    let k = rng.gen_range(1..=a.min(3 - b.min(2)).max(1));
    let t = unimodular(n, rng);
    skeleton_fan(a, k, b, rng.gen_range(1..=3), &t)
}

/// Balanced cycles of all generator kinds, including non-effective ones.
pub fn random_balanced(rng: &mut ChaCha8Rng) -> TropicalCycle {
    loop {
        match rng.gen_range(0..4) {
            0 | 1 => return random_effective_fan(rng),
            2 => {
                if let Some(c) = hypersurface(rng.gen_range(2..=3), rng, Mode::Max) {
                    return c;
                }
            }
            _ => {
                if let Some(c) = hypersurface(rng.gen_range(2..=3), rng, Mode::Min) {
                    return c;
                }
            }
        }
    }
}

/// Refinement of a random tropical polynomial onto `c`.
pub fn random_function(c: &TropicalCycle, rng: &mut ChaCha8Rng, mode: Mode) -> PiecewiseFunction {
    let n = c.ambient_dim();
    refine(c, &random_polynomial(n, rng, mode, false)).expect("refine")
}

/// Adds the global quadratic `a(x)·b(x)`.
pub fn add_product(f: &PiecewiseFunction, a: &AffineForm, b: &AffineForm) -> PiecewiseFunction {
    let g = PiecewiseFunction::global_affine(f.cycle().clone(), a)
        .times_affine(b)
        .expect("product");
    f.add(&g).expect("sum")
}

/// Solves `r_i · m = v_i` with `m` in the span of the `r_i` (independent rows).
pub fn linear_through(rows: &[QVec], values: &[Rational], n: usize) -> QVec {
    if rows.is_empty() {
        return zero_vec(n);
    }
    let gram: Vec<QVec> = rows
        .iter()
        .map(|r| rows.iter().map(|s| tropkit::geometry::rational::dot(r, s)).collect())
        .collect();
    let inv = linalg::inverse(&gram).expect("independent rays");
    let c = linalg::mat_vec(&inv, values);
    let mut m = zero_vec(n);
    for (ci, r) in c.iter().zip(rows) {
        for (mj, rj) in m.iter_mut().zip(r) {
            *mj += ci * rj;
        }
    }
    m
}

/// Piecewise linear function on a fan of pointed simplicial cones with
/// prescribed values on the rays, plus `noise` on each cone: a linear form
/// vanishing on the cone, which changes the pieces but not the function.
pub fn ray_function<F>(c: Arc<TropicalCycle>, mut value: F, noise: Option<&mut ChaCha8Rng>) -> PiecewiseFunction
where
    F: FnMut(&QVec) -> Rational,
{
    let n = c.ambient_dim();
    let mut cache: BTreeMap<QVec, Rational> = BTreeMap::new();
    let mut pieces = BTreeMap::new();
    let mut noise = noise;
    for (i, p, _) in c.maximal_cells() {
        assert!(p.lineality().is_empty(), "pointed cones only");
        let vals: Vec<Rational> = p
            .rays()
            .iter()
            .map(|r| cache.entry(r.clone()).or_insert_with(|| value(r)).clone())
            .collect();
        let mut m = linear_through(p.rays(), &vals, n);
        if let Some(rng) = noise.as_deref_mut() {
            let rows: Vec<QVec> = p.rays().to_vec();
            for v in linalg::nullspace(&rows, n) {
                let k = q(rng.gen_range(-2..=2));
                let v = clear_denominators(&v);
                for (mj, vj) in m.iter_mut().zip(&v) {
                    *mj += &k * Rational::from(vj.clone());
                }
            }
        }
        pieces.insert(i, QuadraticForm::affine(AffineForm::new(m, q(0))));
    }
    PiecewiseFunction::new(c, pieces).expect("continuous")
}

fn to_i64(v: &[BigInt]) -> Vec<i64> {
    v.iter().map(|x| x.to_i64().expect("small entries")).collect()
}

fn int_linear(f: &AffineForm) -> Vec<i64> {
    to_i64(&clear_denominators(&f.linear))
}

fn idot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Brute-force lattice normal of `σ` over its facet `τ`.
///
/// Over all integer points of a box lying in `lin σ`, the functional that
/// cuts out `τ` takes the least positive value exactly on `u + lin τ ∩ Z^n`.
/// A random minimizer is perturbed by a random small element of `lin τ`.
pub struct NormalOracle {
    pub radius: i64,
}

pub struct OracleNormal {
    pub vector: Vec<i64>,
    /// Integral functional on `lin σ` vanishing on `lin τ`, positive on `σ`.
    pub functional: Vec<i64>,
    pub value: i64,
}

impl NormalOracle {
    pub fn normal(&self, sigma: &Polyhedron, tau: &Polyhedron, rng: &mut ChaCha8Rng) -> Option<OracleNormal> {
        let n = sigma.ambient_dim();
        let x = tau.relative_interior_point().ok()?;
        let phi = sigma.facet_inequalities().iter().find(|h| h.eval(&x).is_zero())?;
        let phi = int_linear(phi);
        let eqs: Vec<Vec<i64>> = sigma.equations().iter().map(int_linear).collect();
        // The box must reach the cell's generators.
        let r = sigma
            .rays()
            .iter()
            .chain(sigma.lineality())
            .flat_map(|v| to_i64(&clear_denominators(v)))
            .map(i64::abs)
            .fold(self.radius, i64::max);
        let mut best = i64::MAX;
        let mut minimizers = Vec::new();
        let mut along_tau = Vec::new();
        let mut p = vec![-r; n];
        loop {
            if eqs.iter().all(|e| idot(e, &p) == 0) {
                let v = idot(&phi, &p);
                if v > 0 && v < best {
                    best = v;
                    minimizers.clear();
                }
                if v == best {
                    minimizers.push(p.clone());
                }
                if v == 0 && p.iter().any(|&c| c != 0) && p.iter().all(|c| c.abs() <= 1) {
                    along_tau.push(p.clone());
                }
            }
            let mut i = 0;
            while i < n && p[i] == r {
                p[i] = -r;
                i += 1;
            }
            if i == n {
                break;
            }
            p[i] += 1;
        }
        let mut u = minimizers.choose(rng)?.clone();
        for _ in 0..2 {
            if let Some(d) = along_tau.choose(rng) {
                let k = rng.gen_range(-1..=1);
                u.iter_mut().zip(d).for_each(|(a, b)| *a += k * b);
            }
        }
        Some(OracleNormal { vector: u, functional: phi, value: best })
    }
}

pub fn oracle_radius(n: usize) -> i64 {
    if n <= 3 {
        4
    } else {
        3
    }
}

fn as_q(v: &[i64]) -> QVec {
    v.iter().map(|&x| q(x)).collect()
}

/// Whether `v` lies in the linear span of `τ`'s directions.
pub fn in_lin(tau: &Polyhedron, v: &[Rational]) -> bool {
    tau.equations().iter().all(|e| tropkit::geometry::rational::dot(&e.linear, v).is_zero())
}

/// `Σ m_σ u_σ` at `τ` with oracle normals.
pub fn oracle_excess(c: &TropicalCycle, tau: usize, rng: &mut ChaCha8Rng) -> Option<QVec> {
    let oracle = NormalOracle { radius: oracle_radius(c.ambient_dim()) };
    let t = c.cell(tau);
    let mut sum = zero_vec(c.ambient_dim());
    for s in c.adjacent_maximal(tau) {
        let u = oracle.normal(c.cell(s), t, rng)?;
        let m = q(c.weight(s).unwrap().to_i64().unwrap());
        for (a, b) in sum.iter_mut().zip(as_q(&u.vector)) {
            *a += &m * b;
        }
    }
    Some(sum)
}

/// Oracle balancing verdict: every excess lies in `lin τ`.
pub fn oracle_balanced(c: &TropicalCycle, rng: &mut ChaCha8Rng) -> Option<bool> {
    let mut ok = true;
    for tau in c.codim_one_faces() {
        let e = oracle_excess(c, tau, rng)?;
        ok &= in_lin(c.cell(tau), &e);
    }
    Some(ok)
}

/// Corner weight at `x ∈ τ` computed directly from gradients and oracle
/// normals: `Σ m_σ ∇f_σ(x)·v_σ − ∇f_0(x)·Σ m_σ v_σ`.
pub struct OracleWeight {
    pub face: usize,
    normals: Vec<(usize, QVec, Rational)>,
    base: usize,
    total: QVec,
}

impl OracleWeight {
    pub fn new(f: &PiecewiseFunction, tau: usize, rng: &mut ChaCha8Rng) -> Option<Self> {
        let c = f.cycle();
        let oracle = NormalOracle { radius: oracle_radius(c.ambient_dim()) };
        let adj = c.adjacent_maximal(tau);
        let mut normals = Vec::new();
        let mut total = zero_vec(c.ambient_dim());
        for &s in &adj {
            let u = as_q(&oracle.normal(c.cell(s), c.cell(tau), rng)?.vector);
            let m = Rational::from(c.weight(s).unwrap().clone());
            for (a, b) in total.iter_mut().zip(&u) {
                *a += &m * b;
            }
            normals.push((s, u, m));
        }
        let base = *adj.choose(rng)?;
        Some(OracleWeight { face: tau, normals, base, total })
    }

    pub fn eval(&self, f: &PiecewiseFunction, x: &[Rational]) -> Rational {
        let dot = tropkit::geometry::rational::dot;
        let mut w: Rational = self
            .normals
            .iter()
            .map(|(s, u, m)| m * dot(&f.piece(*s).unwrap().gradient(x), u))
            .sum();
        w -= dot(&f.piece(self.base).unwrap().gradient(x), &self.total);
        w
    }
}

/// Points pinning down an affine function on `aff τ`.
pub fn probe_points(p: &Polyhedron) -> Vec<QVec> {
    let v0 = p.vertices()[0].clone();
    let mut pts: Vec<QVec> = p.vertices().to_vec();
    for d in p.rays().iter().chain(p.lineality()) {
        pts.push(v0.iter().zip(d).map(|(a, b)| a + b).collect());
    }
    pts
}

/// Compares the canonical corner locus with oracle weights at probe points.
/// Returns a description of the first disagreement.
pub fn compare_corner_locus(f: &PiecewiseFunction, locus: &CornerLocus, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let c = f.cycle();
    let faces = c.codim_one_faces();
    for cell in locus.cells() {
        if !faces.contains(&cell.face) {
            return Err(format!("corner cell {} is not a codim-one face", cell.face));
        }
    }
    for tau in faces {
        let ow = OracleWeight::new(f, tau, rng).ok_or(format!("oracle box too small at face {tau}"))?;
        let canon = locus.cells().iter().find(|k| k.face == tau);
        for x in probe_points(c.cell(tau)) {
            let expected = ow.eval(f, &x);
            let got = canon.map(|k| k.weight.eval(&x)).unwrap_or_else(|| q(0));
            if expected != got {
                return Err(format!("face {tau} at {x:?}: oracle {expected}, canonical {got}"));
            }
        }
    }
    Ok(())
}

/// Independent psh verdict: principal minors of each restricted Hessian and
/// oracle corner weights on vertices and recession directions.
pub fn oracle_psh(f: &PiecewiseFunction, rng: &mut ChaCha8Rng) -> Option<bool> {
    let c = f.cycle();
    let n = c.ambient_dim();
    for (i, p, _) in c.maximal_cells() {
        let piece = f.piece(i).ok()?;
        let Some(h) = piece.hessian() else { continue };
        let rows: Vec<QVec> = p.equations().iter().map(|e| e.linear.clone()).collect();
        let basis = linalg::nullspace(&rows, n);
        let m = linalg::congruence(h, &basis);
        if !principal_minors_nonnegative(&m) {
            return Some(false);
        }
    }
    for tau in c.codim_one_faces() {
        let ow = OracleWeight::new(f, tau, rng)?;
        let t = c.cell(tau);
        for v in t.vertices() {
            if ow.eval(f, v).is_negative() {
                return Some(false);
            }
        }
        let v0 = &t.vertices()[0];
        let w0 = ow.eval(f, v0);
        let shifted = |d: &QVec| -> Rational { ow.eval(f, &v0.iter().zip(d).map(|(a, b)| a + b).collect::<QVec>()) - &w0 };
        if t.rays().iter().any(|r| shifted(r).is_negative()) || t.lineality().iter().any(|l| !shifted(l).is_zero()) {
            return Some(false);
        }
    }
    Some(true)
}

pub fn principal_minors_nonnegative(m: &[QVec]) -> bool {
    let k = m.len();
    (1u32..(1u32 << k)).all(|mask| {
        let idx: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
        let sub: Vec<QVec> = idx.iter().map(|&i| idx.iter().map(|&j| m[i][j].clone()).collect()).collect();
        !linalg::determinant(&sub).is_negative()
    })
}

/// A one-dimensional balanced fan from primitive rays: the last ray closes
/// the sum with the matching weight.
pub fn one_dim_fan(n: usize, rays: &[(Vec<i64>, i64)]) -> TropicalCycle {
    let mut sum = vec![0i64; n];
    let mut cells = Vec::new();
    for (r, w) in rays {
        sum.iter_mut().zip(r).for_each(|(s, x)| *s += w * x);
        cells.push((cone(n, &[as_q(r)], &[]), *w));
    }
    let g = sum.iter().fold(0i64, |g, &x| num_integer::gcd(g, x));
    if g != 0 {
        let last: Vec<i64> = sum.iter().map(|x| -x / g).collect();
        cells.push((cone(n, &[as_q(&last)], &[]), g));
    }
    cycle(n, cells)
}
