//! Local maxima of piecewise functions and local constancy certificates.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::cycles::{check_balancing, TropicalCycle};
use crate::document::{ser_cycle, ser_function, ser_q, ser_qvec};
use crate::error::{Error, Result};
use crate::geometry::linalg::{congruence, inverse};
use crate::geometry::rational::{add, dedup_vecs, dot, is_zero_vec, scale};
use crate::geometry::{QVec, Rational};
use crate::plfunc::{check_psh, restrict, PiecewiseFunction, PshReport};
use crate::slicing::{
    is_generic, sample_generic_hyperplane, stable_intersect, GenericityCertificate, RationalHyperplane,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockingDirection {
    pub cell: usize,
    #[serde(serialize_with = "ser_qvec")]
    pub direction: QVec,
    /// `⟨∇f(ω), v⟩`.
    #[serde(serialize_with = "ser_q")]
    pub slope: Rational,
    /// `vᵀHv`; positive when the slope is zero.
    #[serde(serialize_with = "ser_q")]
    pub curvature: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalMaxReport {
    #[serde(serialize_with = "ser_qvec")]
    pub point: QVec,
    pub is_local_max: bool,
    pub blocking_direction: Option<BlockingDirection>,
}

/// A nonnegative nonzero `λ` with `λᵀAλ < 0`, or `None` when `A` is
/// copositive. Principal submatrices are visited by increasing size, so
/// when one is tested all smaller ones are known to be copositive; such a
/// matrix fails iff it is invertible with entrywise nonpositive inverse,
/// and then `-A⁻¹·1` is a witness.
pub fn copositivity_witness(a: &[QVec]) -> Option<QVec> {
    let k = a.len();
    if crate::plfunc::psd_witness(a).is_none() {
        return None;
    }
    for size in 1..=k {
        for subset in subsets_of_size(k, size) {
            let sub: Vec<QVec> = subset.iter().map(|&i| subset.iter().map(|&j| a[i][j].clone()).collect()).collect();
            let Some(inv) = inverse(&sub) else { continue };
            if inv.iter().flatten().any(Signed::is_positive) {
                continue;
            }
            let mut w = vec![Rational::zero(); k];
            for (row, &i) in inv.iter().zip(&subset) {
                w[i] = -row.iter().cloned().sum::<Rational>();
            }
            return Some(w);
        }
    }
    None
}

fn subsets_of_size(k: usize, size: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, k: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..k {
            if k - i < size - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, k, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, k, size, &mut Vec::new(), &mut out);
    out
}

/// Whether `f(x) <= f(ω)` near `ω` on the support.
pub fn is_local_max(f: &PiecewiseFunction, omega: &[Rational]) -> Result<LocalMaxReport> {
    let c = f.cycle();
    if omega.len() != c.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: c.ambient_dim(), found: omega.len() });
    }
    let mut on_support = false;
    for (i, sigma, _) in c.maximal_cells() {
        if !sigma.contains(omega) {
            continue;
        }
        on_support = true;
        let piece = f.piece(i)?;
        let g = piece.gradient(omega);
        let dirs = dedup_vecs(sigma.tangent_directions(omega));
        let mut flat = Vec::new();
        for v in dirs {
            let s = dot(&g, &v);
            if s.is_positive() {
                let curvature = piece.curvature(&v);
                let report = BlockingDirection { cell: i, direction: v, slope: s, curvature };
                return Ok(LocalMaxReport { point: omega.to_vec(), is_local_max: false, blocking_direction: Some(report) });
            }
            if s.is_zero() {
                flat.push(v);
            }
        }
        let Some(h) = piece.hessian() else { continue };
        let neg: Vec<QVec> = congruence(h, &flat).into_iter().map(|r| r.iter().map(|x| -x).collect()).collect();
        if let Some(lambda) = copositivity_witness(&neg) {
            let mut v = vec![Rational::zero(); omega.len()];
            for (l, z) in lambda.iter().zip(&flat) {
                v = add(&v, &scale(z, l));
            }
            let curvature = piece.curvature(&v);
            let report = BlockingDirection { cell: i, direction: v, slope: Rational::zero(), curvature };
            return Ok(LocalMaxReport { point: omega.to_vec(), is_local_max: false, blocking_direction: Some(report) });
        }
    }
    if !on_support {
        return Err(Error::PointNotOnSupport);
    }
    Ok(LocalMaxReport { point: omega.to_vec(), is_local_max: true, blocking_direction: None })
}

/// Per cell of the star: gradient at `ω` and the Hessian both vanish on
/// the cell's directions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CellCertificate {
    pub cell: usize,
    pub directions_checked: usize,
    pub hessian_rank_checked: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status")]
pub enum MaxPrincipleVerdict {
    LocallyConstant { certificate: Vec<CellCertificate> },
    NotLocallyConstant {
        #[serde(serialize_with = "ser_qvec")]
        witness: QVec,
        #[serde(serialize_with = "ser_q")]
        value: Rational,
        #[serde(serialize_with = "ser_q")]
        center_value: Rational,
    },
    NotLocalMax { report: LocalMaxReport },
    NotPsh { report: PshReport },
}

impl MaxPrincipleVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            MaxPrincipleVerdict::LocallyConstant { .. } => "LocallyConstant",
            MaxPrincipleVerdict::NotLocallyConstant { .. } => "NotLocallyConstant",
            MaxPrincipleVerdict::NotLocalMax { .. } => "NotLocalMax",
            MaxPrincipleVerdict::NotPsh { .. } => "NotPsh",
        }
    }
}

/// Checks psh, then the local maximum, then certifies constancy on the
/// star of `ω`.
pub fn verify_max_principle(f: &PiecewiseFunction, omega: &[Rational]) -> Result<MaxPrincipleVerdict> {
    if omega.len() != f.cycle().ambient_dim() {
        return Err(Error::DimensionMismatch { expected: f.cycle().ambient_dim(), found: omega.len() });
    }
    if !f.cycle().maximal_cells().any(|(_, p, _)| p.contains(omega)) {
        return Err(Error::PointNotOnSupport);
    }
    let psh = check_psh(f)?;
    if !psh.verdict {
        return Ok(MaxPrincipleVerdict::NotPsh { report: psh });
    }
    let lm = is_local_max(f, omega)?;
    if !lm.is_local_max {
        return Ok(MaxPrincipleVerdict::NotLocalMax { report: lm });
    }
    let center = f.evaluate(omega)?;
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let mut certificate = Vec::new();
    for (i, sigma, _) in f.cycle().maximal_cells() {
        if !sigma.contains(omega) {
            continue;
        }
        let piece = f.piece(i)?;
        let g = piece.gradient(omega);
        let dirs = dedup_vecs(sigma.tangent_directions(omega));
        let mut candidates: Vec<QVec> = dirs.clone();
        if piece.hessian().is_some() {
            for a in 0..dirs.len() {
                for b in a + 1..dirs.len() {
                    candidates.push(add(&dirs[a], &dirs[b]));
                }
            }
        }
        for v in &candidates {
            if dot(&g, v).is_zero() && piece.curvature(v).is_zero() {
                continue;
            }
            for eps in [half.clone(), &half * &half] {
                let x = add(omega, &scale(v, &eps));
                let value = piece.eval(&x);
                if value != center {
                    return Ok(MaxPrincipleVerdict::NotLocallyConstant { witness: x, value, center_value: center });
                }
            }
        }
        let basis = sigma.lattice().rational_basis();
        let hessian_rank_checked = match piece.hessian() {
            Some(h) => {
                let m = congruence(h, &basis);
                if m.iter().flatten().any(|x| !x.is_zero()) {
                    return Err(Error::InvalidInput("Hessian does not vanish on a flat cell".into()));
                }
                basis.len()
            }
            None => 0,
        };
        certificate.push(CellCertificate { cell: i, directions_checked: dirs.len(), hessian_rank_checked });
    }
    Ok(MaxPrincipleVerdict::LocallyConstant { certificate })
}

/// Largest denominator in the search for a point where `f` is nonzero.
pub const SEARCH_DENOMINATOR_BOUND: i64 = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Edge {
    #[serde(serialize_with = "ser_qvec")]
    pub direction: QVec,
    #[serde(serialize_with = "crate::document::ser_bigint")]
    pub multiplicity: BigInt,
    #[serde(serialize_with = "ser_q")]
    pub slope: Rational,
}

#[derive(Clone, Debug, Serialize)]
pub struct LeafNode {
    pub depth: usize,
    pub dim: i64,
    #[serde(serialize_with = "ser_cycle")]
    pub cycle: Arc<TropicalCycle>,
    #[serde(serialize_with = "ser_function")]
    pub function: PiecewiseFunction,
    pub edges: Vec<Edge>,
    #[serde(serialize_with = "ser_q")]
    pub weighted_sum: Rational,
    pub all_slopes_zero: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SliceNode {
    pub depth: usize,
    pub dim: i64,
    #[serde(serialize_with = "ser_cycle")]
    pub cycle: Arc<TropicalCycle>,
    #[serde(serialize_with = "ser_function")]
    pub function: PiecewiseFunction,
    #[serde(serialize_with = "ser_qvec")]
    pub omega_prime: QVec,
    /// No point with `f != 0` was found up to the denominator bound.
    pub constant_at_scale: bool,
    pub denominator_bound: i64,
    pub hyperplane: RationalHyperplane,
    pub certificate: GenericityCertificate,
    pub sampling_seed: u64,
    pub child: Box<TraceNode>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TraceNode {
    Slice(SliceNode),
    Leaf(LeafNode),
}

impl TraceNode {
    pub fn dim(&self) -> i64 {
        match self {
            TraceNode::Slice(s) => s.dim,
            TraceNode::Leaf(l) => l.dim,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SlicingTrace {
    pub seed: u64,
    pub root: TraceNode,
}

impl SlicingTrace {
    /// Dimensions from the root down to the leaf.
    pub fn dimension_ladder(&self) -> Vec<i64> {
        let mut out = Vec::new();
        let mut node = &self.root;
        loop {
            out.push(node.dim());
            match node {
                TraceNode::Slice(s) => node = &s.child,
                TraceNode::Leaf(_) => return out,
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }

    /// Re-verifies every asserted fact from the stored data. Returns the
    /// list of failures.
    pub fn recheck(&self) -> Vec<String> {
        let mut failures = Vec::new();
        let mut node = &self.root;
        loop {
            match node {
                TraceNode::Slice(s) => {
                    let tag = format!("depth {}", s.depth);
                    recheck_common(&tag, &s.cycle, &s.function, &mut failures);
                    if s.dim != s.cycle.dim() || s.dim < 2 {
                        failures.push(format!("{tag}: recorded dimension {} is wrong", s.dim));
                    }
                    let cert = is_generic(&s.cycle, &s.hyperplane);
                    if !cert.verdict || !s.certificate.verdict || cert != s.certificate {
                        failures.push(format!("{tag}: hyperplane is not generic"));
                    }
                    let origin = vec![Rational::zero(); s.cycle.ambient_dim()];
                    if !s.hyperplane.contains_point(&origin) || !s.hyperplane.contains_point(&s.omega_prime) {
                        failures.push(format!("{tag}: hyperplane misses 0 or the chosen point"));
                    }
                    if s.child.dim() != s.dim - 1 {
                        failures.push(format!("{tag}: child dimension {} is not {}", s.child.dim(), s.dim - 1));
                    }
                    let child_cycle = match &*s.child {
                        TraceNode::Slice(c) => &c.cycle,
                        TraceNode::Leaf(l) => &l.cycle,
                    };
                    match stable_intersect(&s.cycle, &s.hyperplane) {
                        Ok(sliced) if sliced == **child_cycle => {}
                        Ok(_) => failures.push(format!("{tag}: child cycle is not the slice")),
                        Err(e) => failures.push(format!("{tag}: slicing failed: {e}")),
                    }
                    node = &s.child;
                }
                TraceNode::Leaf(l) => {
                    let tag = format!("depth {} (leaf)", l.depth);
                    recheck_common(&tag, &l.cycle, &l.function, &mut failures);
                    if l.dim > 1 {
                        failures.push(format!("{tag}: leaf of dimension {}", l.dim));
                    }
                    match leaf_edges(&l.function) {
                        Ok(edges) if edges == l.edges => {}
                        Ok(_) => failures.push(format!("{tag}: recorded edges differ")),
                        Err(e) => failures.push(format!("{tag}: {e}")),
                    }
                    if l.edges.iter().any(|e| e.slope.is_positive()) {
                        failures.push(format!("{tag}: positive outgoing slope"));
                    }
                    let sum: Rational = l
                        .edges
                        .iter()
                        .map(|e| Rational::from_integer(e.multiplicity.clone()) * &e.slope)
                        .sum();
                    if sum != l.weighted_sum || sum.is_negative() {
                        failures.push(format!("{tag}: weighted slope sum is negative or misrecorded"));
                    }
                    if !l.all_slopes_zero || l.edges.iter().any(|e| !e.slope.is_zero()) {
                        failures.push(format!("{tag}: nonzero slope at a leaf"));
                    }
                    return failures;
                }
            }
        }
    }
}

fn recheck_common(tag: &str, c: &TropicalCycle, f: &PiecewiseFunction, failures: &mut Vec<String>) {
    if **f.cycle() != *c {
        failures.push(format!("{tag}: function lives on a different cycle"));
    }
    if !check_balancing(c).verdict {
        failures.push(format!("{tag}: cycle is not balanced"));
    }
    match check_psh(f) {
        Ok(r) if r.verdict => {}
        Ok(_) => failures.push(format!("{tag}: function is not psh")),
        Err(e) => failures.push(format!("{tag}: psh check failed: {e}")),
    }
}

/// Outgoing edges at the origin of a fan of dimension at most one. A line
/// contributes both of its directions.
fn leaf_edges(f: &PiecewiseFunction) -> Result<Vec<Edge>> {
    let mut edges = Vec::new();
    for (i, cell, w) in f.cycle().maximal_cells() {
        let piece = f.piece(i)?;
        let mut dirs: Vec<QVec> = cell.rays().to_vec();
        for l in cell.lineality() {
            dirs.push(l.clone());
            dirs.push(l.iter().map(|x| -x).collect());
        }
        for d in dirs {
            let slope = piece.affine_part().slope(&d);
            edges.push(Edge { direction: d, multiplicity: w.clone(), slope });
        }
    }
    Ok(edges)
}

/// Candidate points of increasing height on the support of a fan.
fn candidate_points(c: &TropicalCycle) -> Vec<QVec> {
    let mut bases: Vec<Vec<QVec>> = Vec::new();
    for (_, cell, _) in c.maximal_cells() {
        let gens: Vec<QVec> = cell.rays().iter().chain(cell.lineality()).cloned().collect();
        let mut b = vec![Rational::zero(); c.ambient_dim()];
        for g in &gens {
            b = add(&b, g);
        }
        let mut pts = vec![b.clone()];
        pts.extend(gens.iter().map(|g| add(&b, g)));
        bases.push(pts.into_iter().filter(|p| !is_zero_vec(p)).collect());
    }
    let mut out = Vec::new();
    for q in 1..=SEARCH_DENOMINATOR_BOUND {
        let inv = Rational::new(BigInt::one(), BigInt::from(q));
        for pts in &bases {
            for p in pts {
                out.push(scale(p, &inv));
            }
        }
    }
    out
}

fn node_seed(seed: u64, depth: usize) -> u64 {
    seed.wrapping_add((depth as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Inductive slicing of a fan at the origin down to dimension at most one.
pub fn slicing_trace(sigma: Arc<TropicalCycle>, f: &PiecewiseFunction, seed: u64) -> Result<SlicingTrace> {
    if !sigma.is_fan() {
        return Err(Error::NotAFan);
    }
    if **f.cycle() != *sigma {
        return Err(Error::InvalidInput("function lives on a different cycle".into()));
    }
    if !f.is_affine() {
        return Err(Error::NotAffine);
    }
    let origin = vec![Rational::zero(); sigma.ambient_dim()];
    if !f.evaluate(&origin)?.is_zero() {
        return Err(Error::NonzeroAtOrigin);
    }
    let b = check_balancing(&sigma);
    if !b.verdict {
        return Err(Error::NotBalanced(Box::new(b)));
    }
    let psh = check_psh(f)?;
    if !psh.verdict {
        return Err(Error::NotPsh(Box::new(psh)));
    }
    if !is_local_max(f, &origin)?.is_local_max {
        return Err(Error::NotLocalMax);
    }
    let root = trace_node(sigma, f.clone(), seed, 0)?;
    Ok(SlicingTrace { seed, root })
}

fn trace_node(sigma: Arc<TropicalCycle>, f: PiecewiseFunction, seed: u64, depth: usize) -> Result<TraceNode> {
    let dim = sigma.dim();
    if dim <= 1 {
        let edges = leaf_edges(&f)?;
        let weighted_sum = edges
            .iter()
            .map(|e| Rational::from_integer(e.multiplicity.clone()) * &e.slope)
            .sum();
        let all_slopes_zero = edges.iter().all(|e| e.slope.is_zero());
        return Ok(TraceNode::Leaf(LeafNode { depth, dim, cycle: sigma, function: f, edges, weighted_sum, all_slopes_zero }));
    }
    let origin = vec![Rational::zero(); sigma.ambient_dim()];
    let candidates = candidate_points(&sigma);
    let nonconstant: Vec<&QVec> = candidates
        .iter()
        .filter(|p| f.evaluate(p).is_ok_and(|v| !v.is_zero()))
        .collect();
    let constant_at_scale = nonconstant.is_empty();
    let ordered: Vec<&QVec> = if constant_at_scale { candidates.iter().collect() } else { nonconstant };
    let sampling_seed = node_seed(seed, depth);
    let mut last_err = Error::Exhausted { iterations: 0 };
    for omega_prime in ordered {
        let sampled = match sample_generic_hyperplane(&sigma, &[origin.clone(), omega_prime.clone()], sampling_seed) {
            Ok(s) => s,
            Err(e @ Error::Exhausted { .. }) => {
                last_err = e;
                continue;
            }
            Err(e) => return Err(e),
        };
        let sliced = Arc::new(stable_intersect(&sigma, &sampled.hyperplane)?);
        let restricted = restrict(&f, sliced.clone())?;
        let psh = check_psh(&restricted)?;
        if !psh.verdict {
            return Err(Error::NotPsh(Box::new(psh)));
        }
        let child = trace_node(sliced, restricted, seed, depth + 1)?;
        return Ok(TraceNode::Slice(SliceNode {
            depth,
            dim,
            cycle: sigma,
            function: f,
            omega_prime: omega_prime.clone(),
            constant_at_scale,
            denominator_bound: SEARCH_DENOMINATOR_BOUND,
            hyperplane: sampled.hyperplane,
            certificate: sampled.certificate,
            sampling_seed,
            child: Box::new(child),
        }));
    }
    Err(last_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    use crate::geometry::rational::{q, qvec};
    use crate::geometry::{AffineForm, Polyhedron};
    use crate::plfunc::{refine, Mode, QuadraticForm, TropicalPolynomial};

    fn ray(dir: &[i64]) -> Polyhedron {
        Polyhedron::from_generators(dir.len(), &[vec![q(0); dir.len()]], &[qvec(dir)], &[]).unwrap()
    }

    fn line_l() -> Arc<TropicalCycle> {
        let cells = [[-1, 0], [0, -1], [1, 1]].iter().map(|d| (ray(d), BigInt::from(1))).collect();
        Arc::new(TropicalCycle::new(2, cells).unwrap().0)
    }

    fn plane() -> Arc<TropicalCycle> {
        Arc::new(TropicalCycle::new(2, vec![(Polyhedron::whole_space(2).unwrap(), BigInt::from(1))]).unwrap().0)
    }

    fn on_l(slopes: [i64; 3]) -> PiecewiseFunction {
        let l = line_l();
        let mut pieces = BTreeMap::new();
        for (d, s) in [[-1, 0], [0, -1], [1, 1]].iter().zip(slopes) {
            let i = l.complex().index_of(&ray(d)).unwrap();
            let lin = match d {
                [-1, 0] => qvec(&[-s, 0]),
                [0, -1] => qvec(&[0, -s]),
                _ => qvec(&[s, 0]),
            };
            pieces.insert(i, QuadraticForm::affine(AffineForm::new(lin, q(0))));
        }
        PiecewiseFunction::new(l, pieces).unwrap()
    }

    #[test]
    fn local_max_examples() {
        let origin = qvec(&[0, 0]);
        assert!(is_local_max(&on_l([-1, 0, 0]), &origin).unwrap().is_local_max);
        let g = TropicalPolynomial::new(Mode::Max, vec![AffineForm::new(qvec(&[1, 1]), q(0)), AffineForm::zero(2)]).unwrap();
        let f = refine(&line_l(), &g).unwrap();
        let r = is_local_max(&f, &origin).unwrap();
        assert!(!r.is_local_max);
        let b = r.blocking_direction.unwrap();
        assert_eq!(b.direction, qvec(&[1, 1]));
        assert_eq!(b.slope, q(2));
        let zero = PiecewiseFunction::global_affine(line_l(), &AffineForm::zero(2));
        assert!(is_local_max(&zero, &qvec(&[3, 3])).unwrap().is_local_max);
        assert!(matches!(is_local_max(&zero, &qvec(&[1, 0])), Err(Error::PointNotOnSupport)));
    }

    #[test]
    fn second_order_on_critical_cone() {
        // f = xy on the quadrant at 0: zero gradient, positive along (1,1)
        let quadrant = Polyhedron::from_generators(2, &[qvec(&[0, 0])], &[qvec(&[1, 0]), qvec(&[0, 1])], &[]).unwrap();
        let c = Arc::new(TropicalCycle::new(2, vec![(quadrant, BigInt::from(1))]).unwrap().0);
        let mut pieces = BTreeMap::new();
        pieces.insert(0, QuadraticForm::new(Some(vec![qvec(&[0, 1]), qvec(&[1, 0])]), qvec(&[0, 0]), q(0)).unwrap());
        let f = PiecewiseFunction::new(c.clone(), pieces).unwrap();
        let r = is_local_max(&f, &qvec(&[0, 0])).unwrap();
        assert!(!r.is_local_max);
        assert!(r.blocking_direction.unwrap().curvature.is_positive());
        // f = -xy is a local max there although indefinite
        let f = f.scaled(&q(-1));
        assert!(is_local_max(&f, &qvec(&[0, 0])).unwrap().is_local_max);
    }

    #[test]
    fn verdict_examples() {
        let zero = PiecewiseFunction::global_affine(line_l(), &AffineForm::zero(2));
        assert!(matches!(
            verify_max_principle(&zero, &qvec(&[0, 0])).unwrap(),
            MaxPrincipleVerdict::LocallyConstant { .. }
        ));
        assert!(matches!(
            verify_max_principle(&on_l([-1, 0, 0]), &qvec(&[0, 0])).unwrap(),
            MaxPrincipleVerdict::NotPsh { .. }
        ));
        let g = TropicalPolynomial::new(
            Mode::Max,
            vec![AffineForm::new(qvec(&[1, 0]), q(0)), AffineForm::new(qvec(&[0, 1]), q(0)), AffineForm::zero(2)],
        )
        .unwrap();
        let f = refine(&plane(), &g).unwrap();
        assert!(matches!(
            verify_max_principle(&f, &qvec(&[-1, -1])).unwrap(),
            MaxPrincipleVerdict::LocallyConstant { .. }
        ));
    }

    #[test]
    fn copositivity() {
        assert!(copositivity_witness(&[qvec(&[0, 1]), qvec(&[1, 0])]).is_none());
        let w = copositivity_witness(&[qvec(&[0, -1]), qvec(&[-1, 0])]).unwrap();
        assert!(w.iter().all(|x| !x.is_negative()));
        assert!(copositivity_witness(&[qvec(&[1, -2]), qvec(&[-2, 1])]).is_some());
    }

    #[test]
    fn trace_examples() {
        let zero = PiecewiseFunction::global_affine(line_l(), &AffineForm::zero(2));
        let t = slicing_trace(line_l(), &zero, 0).unwrap();
        match &t.root {
            TraceNode::Leaf(l) => {
                assert_eq!(l.edges.len(), 3);
                assert!(l.all_slopes_zero);
            }
            TraceNode::Slice(_) => panic!("expected a leaf"),
        }
        assert!(t.recheck().is_empty());

        let zero = PiecewiseFunction::global_affine(plane(), &AffineForm::zero(2));
        let t = slicing_trace(plane(), &zero, 0).unwrap();
        match &t.root {
            TraceNode::Slice(s) => assert!(s.constant_at_scale),
            TraceNode::Leaf(_) => panic!("expected a slice"),
        }
        assert_eq!(t.dimension_ladder(), vec![2, 1]);
        assert!(t.recheck().is_empty());
        let again = slicing_trace(plane(), &zero, 0).unwrap();
        assert_eq!(t.to_json(), again.to_json());

        assert!(matches!(slicing_trace(line_l(), &on_l([-1, 0, 0]), 0), Err(Error::NotPsh(_))));
    }
}
