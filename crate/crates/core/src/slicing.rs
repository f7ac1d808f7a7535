//! Intersection of cycles with rational hyperplanes.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cycles::{check_balancing, TropicalCycle};
use crate::document::{ser_q, ser_zvec};
use crate::error::{Error, Result};
use crate::geometry::lattice::integer_kernel;
use crate::geometry::rational::{clear_denominators, content, dot, is_zero_vec, sub, to_qvec};
use crate::geometry::{AffineForm, Polyhedron, QVec, Rational, ZVec};
use crate::plfunc::{corner_locus, refine, TropicalPolynomial};

/// `{x : normal · x = offset}` with a primitive integer normal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RationalHyperplane {
    #[serde(serialize_with = "ser_zvec")]
    normal: ZVec,
    #[serde(serialize_with = "ser_q")]
    offset: Rational,
}

impl RationalHyperplane {
    /// Divides a non-primitive normal (and the offset) by its content.
    pub fn new(normal: ZVec, offset: Rational) -> Result<Self> {
        let g = content(&normal);
        if g.is_zero() {
            return Err(Error::ZeroVector);
        }
        let normal = normal.iter().map(|x| x / &g).collect();
        let offset = offset / Rational::from_integer(g);
        Ok(RationalHyperplane { normal, offset })
    }

    /// The hyperplane with normal `normal` through `point`.
    pub fn through(normal: ZVec, point: &[Rational]) -> Result<Self> {
        let offset = dot(&to_qvec(&normal), point);
        Self::new(normal, offset)
    }

    pub fn normal(&self) -> &ZVec {
        &self.normal
    }

    pub fn offset(&self) -> &Rational {
        &self.offset
    }

    pub fn ambient_dim(&self) -> usize {
        self.normal.len()
    }

    /// `x ↦ normal · x - offset`.
    pub fn form(&self) -> AffineForm {
        AffineForm::new(to_qvec(&self.normal), -self.offset.clone())
    }

    pub fn contains_point(&self, x: &[Rational]) -> bool {
        self.form().eval(x).is_zero()
    }

    pub fn contains_polyhedron(&self, p: &Polyhedron) -> bool {
        let l = self.form();
        p.vertices().iter().all(|v| l.eval(v).is_zero())
            && p.rays().iter().chain(p.lineality()).all(|r| l.slope(r).is_zero())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenericityCertificate {
    pub verdict: bool,
    /// Cells of positive dimension lying in the hyperplane.
    pub offenders: Vec<usize>,
}

pub fn is_generic(c: &TropicalCycle, h: &RationalHyperplane) -> GenericityCertificate {
    let offenders: Vec<usize> = c
        .complex()
        .cells()
        .iter()
        .enumerate()
        .filter(|(_, p)| p.dim() >= 1 && h.contains_polyhedron(p))
        .map(|(i, _)| i)
        .collect();
    GenericityCertificate { verdict: offenders.is_empty(), offenders }
}

/// `H · C`, the corner locus of `max(ℓ - c, 0)` on `C`.
pub fn stable_intersect(c: &TropicalCycle, h: &RationalHyperplane) -> Result<TropicalCycle> {
    if h.ambient_dim() != c.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: c.ambient_dim(), found: h.ambient_dim() });
    }
    if c.dim() < 1 {
        return Err(Error::InvalidInput("cannot slice a cycle of dimension < 1".into()));
    }
    let b = check_balancing(c);
    if !b.verdict {
        return Err(Error::NotBalanced(Box::new(b)));
    }
    let cert = is_generic(c, h);
    if !cert.verdict {
        return Err(Error::NotGeneric(Box::new(cert)));
    }
    let f = refine(c, &TropicalPolynomial::max_with_zero(h.form())?)?;
    corner_locus(&f)?.to_cycle()
}

/// Whether `out` is supported on `|C| ∩ H`, and covers it when `C` is
/// effective.
pub fn support_matches(c: &TropicalCycle, h: &RationalHyperplane, out: &TropicalCycle) -> Result<bool> {
    let inside = out
        .maximal_cells()
        .all(|(_, p, _)| h.contains_polyhedron(p) && c.maximal_cells().any(|(_, s, _)| s.contains_polyhedron(p)));
    if !inside {
        return Ok(false);
    }
    if !c.is_effective() {
        return Ok(true);
    }
    // every (d-1)-dimensional piece of |C| ∩ H must be covered
    for (_, sigma, _) in c.maximal_cells() {
        let piece = sigma.cut(&[h.form(), h.form().scaled(&-Rational::from_integer(1.into()))])?;
        if piece.dim() != c.dim() - 1 || !c.domain().is_none_or(|b| b.meets(&piece)) {
            continue;
        }
        let x = piece.relative_interior_point()?;
        if !out.maximal_cells().any(|(_, p, _)| p.contains(&x)) {
            return Ok(false);
        }
    }
    Ok(true)
}

pub const MAX_SAMPLING_ITERATIONS: usize = 4096;
const INITIAL_HEIGHT: i64 = 8;
const REJECTIONS_PER_DOUBLING: usize = 32;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SampledHyperplane {
    pub hyperplane: RationalHyperplane,
    pub certificate: GenericityCertificate,
    pub draws: usize,
}

/// Seeded rejection sampling of a generic hyperplane through one or two
/// points.
pub fn sample_generic_hyperplane(c: &TropicalCycle, through: &[QVec], seed: u64) -> Result<SampledHyperplane> {
    let n = c.ambient_dim();
    if n < 2 {
        return Err(Error::InvalidInput("hyperplane sampling needs ambient dimension >= 2".into()));
    }
    if through.is_empty() || through.len() > 2 {
        return Err(Error::InvalidInput("give one or two points to pass through".into()));
    }
    if let Some(p) = through.iter().find(|p| p.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: p.len() });
    }
    let base = &through[0];
    let constraints: Vec<ZVec> = through[1..]
        .iter()
        .map(|p| sub(p, base))
        .map(|d| {
            if is_zero_vec(&d) {
                Err(Error::InvalidInput("points to pass through must be distinct".into()))
            } else {
                Ok(clear_denominators(&d))
            }
        })
        .collect::<Result<_>>()?;
    let basis = if constraints.is_empty() {
        (0..n)
            .map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect())
            .collect()
    } else {
        integer_kernel(&constraints, n)
    };
    if basis.len() == 1 {
        let h = RationalHyperplane::through(basis[0].clone(), base)?;
        let certificate = is_generic(c, &h);
        if certificate.verdict {
            return Ok(SampledHyperplane { hyperplane: h, certificate, draws: 1 });
        }
        return Err(Error::Exhausted { iterations: 1 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for it in 0..MAX_SAMPLING_ITERATIONS {
        let height = INITIAL_HEIGHT << (it / REJECTIONS_PER_DOUBLING).min(48);
        let coeffs: Vec<i64> = (0..basis.len()).map(|_| rng.gen_range(-height..=height)).collect();
        let mut normal = vec![BigInt::zero(); n];
        for (k, b) in coeffs.iter().zip(&basis) {
            for (x, y) in normal.iter_mut().zip(b) {
                *x += y * k;
            }
        }
        if normal.iter().all(Zero::is_zero) {
            continue;
        }
        if normal.iter().find(|x| !x.is_zero()).is_some_and(Signed::is_negative) {
            normal.iter_mut().for_each(|x| *x = -x.clone());
        }
        let h = RationalHyperplane::through(normal, base)?;
        let certificate = is_generic(c, &h);
        if certificate.verdict {
            return Ok(SampledHyperplane { hyperplane: h, certificate, draws: it + 1 });
        }
    }
    Err(Error::Exhausted { iterations: MAX_SAMPLING_ITERATIONS })
}
