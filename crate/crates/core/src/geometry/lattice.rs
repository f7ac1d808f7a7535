//! Integer lattice utilities: Hermite and Smith normal forms, integer
//! kernels, saturated lattices of rational subspaces and primitive vectors.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::linalg;
use super::rational::{clear_denominators, is_zero_vec, QVec, Rational, ZVec};
use crate::error::{Error, Result};

fn sub_multiple(target: &mut [BigInt], src: &[BigInt], factor: &BigInt) {
    if factor.is_zero() {
        return;
    }
    for (t, s) in target.iter_mut().zip(src) {
        *t -= factor * s;
    }
}

/// Unimodular row echelon of the first `k` columns, carrying the remaining
/// columns along. Pivots are positive and entries above each pivot are
/// reduced into `[0, pivot)`. Returns the rank.
fn echelon(a: &mut [ZVec], k: usize) -> usize {
    let mut r = 0;
    for c in 0..k {
        if r == a.len() {
            break;
        }
        loop {
            let best = (r..a.len())
                .filter(|&i| !a[i][c].is_zero())
                .min_by(|&i, &j| a[i][c].abs().cmp(&a[j][c].abs()));
            let Some(b) = best else { break };
            a.swap(r, b);
            let (head, tail) = a.split_at_mut(r + 1);
            let pivot_row = &head[r];
            let mut done = true;
            for row in tail.iter_mut() {
                if !row[c].is_zero() {
                    let f = row[c].div_floor(&pivot_row[c]);
                    sub_multiple(row, pivot_row, &f);
                    if !row[c].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if a[r][c].is_zero() {
            continue;
        }
        if a[r][c].is_negative() {
            for x in a[r].iter_mut() {
                *x = -x.clone();
            }
        }
        let (head, tail) = a.split_at_mut(r);
        let pivot_row = &tail[0];
        for row in head.iter_mut() {
            let f = row[c].div_floor(&pivot_row[c]);
            sub_multiple(row, pivot_row, &f);
        }
        r += 1;
    }
    r
}

/// Row-style Hermite normal form; zero rows are dropped.
pub fn hermite_normal_form(rows: &[ZVec]) -> Vec<ZVec> {
    let Some(n) = rows.first().map(Vec::len) else {
        return Vec::new();
    };
    let mut a = rows.to_vec();
    let r = echelon(&mut a, n);
    a.truncate(r);
    a
}

/// Z-basis (in Hermite form) of `{x in Z^n : A x = 0}`.
pub fn integer_kernel(a: &[ZVec], n: usize) -> Vec<ZVec> {
    let m = a.len();
    let mut aug: Vec<ZVec> = (0..n)
        .map(|j| {
            let mut row: ZVec = a.iter().map(|r| r[j].clone()).collect();
            row.extend((0..n).map(|i| if i == j { BigInt::one() } else { BigInt::zero() }));
            row
        })
        .collect();
    let r = echelon(&mut aug, m);
    let kernel: Vec<ZVec> = aug[r..].iter().map(|row| row[m..].to_vec()).collect();
    hermite_normal_form(&kernel)
}

/// Diagonal of the Smith normal form (nonzero elementary divisors, ascending
/// under divisibility).
pub fn elementary_divisors(rows: &[ZVec]) -> Vec<BigInt> {
    let mut a: Vec<ZVec> = rows.to_vec();
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut divisors = Vec::new();
    let mut t = 0;
    while t < m.min(n) {
        // Smallest nonzero entry of the trailing block becomes the pivot.
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if !a[i][j].is_zero()
                    && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        let mut clean = true;
        for i in t + 1..m {
            let f = a[i][t].div_floor(&a[t][t]);
            let pivot_row = a[t].clone();
            sub_multiple(&mut a[i], &pivot_row, &f);
            if !a[i][t].is_zero() {
                clean = false;
            }
        }
        for j in t + 1..n {
            let f = a[t][j].div_floor(&a[t][t]);
            if !f.is_zero() {
                for row in a.iter_mut() {
                    let v = &f * &row[t];
                    row[j] -= v;
                }
            }
            if !a[t][j].is_zero() {
                clean = false;
            }
        }
        if !clean {
            continue;
        }
        // Enforce divisibility of the remaining block by the pivot.
        let p = a[t][t].clone();
        let offender = (t + 1..m).find(|&i| (t + 1..n).any(|j| !a[i][j].is_multiple_of(&p)));
        if let Some(i) = offender {
            let row = a[i].clone();
            for (x, y) in a[t].iter_mut().zip(&row) {
                *x += y;
            }
            continue;
        }
        divisors.push(p.abs());
        t += 1;
    }
    divisors
}

/// Reduces `v` modulo the lattice spanned by a Hermite-form basis, giving the
/// unique representative whose pivot coordinates lie in `[0, pivot)`.
pub fn reduce_modulo(v: &[BigInt], hnf_basis: &[ZVec]) -> ZVec {
    let mut out = v.to_vec();
    for row in hnf_basis {
        let Some(p) = row.iter().position(|x| !x.is_zero()) else {
            continue;
        };
        let f = out[p].div_floor(&row[p]);
        sub_multiple(&mut out, row, &f);
    }
    out
}

/// A Z-basis of `V ∩ Z^n` for a rational subspace `V`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeBasis {
    ambient_dim: usize,
    basis: Vec<ZVec>,
}

impl LatticeBasis {
    /// Saturated lattice of the rational span of `spanning`.
    pub fn of_span(spanning: &[QVec], ambient_dim: usize) -> Self {
        let nonzero: Vec<QVec> = spanning.iter().filter(|v| !is_zero_vec(v)).cloned().collect();
        let complement = linalg::nullspace(&nonzero, ambient_dim);
        let equations: Vec<ZVec> = complement.iter().map(|v| clear_denominators(v)).collect();
        LatticeBasis {
            ambient_dim,
            basis: integer_kernel(&equations, ambient_dim),
        }
    }

    pub fn basis(&self) -> &[ZVec] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn reduce(&self, v: &[BigInt]) -> ZVec {
        reduce_modulo(v, &self.basis)
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    /// All elementary divisors equal to one: the basis spans a saturated
    /// sublattice of `Z^n`.
    pub fn is_saturated(&self) -> bool {
        elementary_divisors(&self.basis).iter().all(One::is_one)
    }

    pub fn rational_basis(&self) -> Vec<QVec> {
        self.basis.iter().map(|v| super::rational::to_qvec(v)).collect()
    }
}

/// The unique primitive integer vector that is a positive multiple of `v`.
pub fn primitive_vector(v: &[Rational]) -> Result<ZVec> {
    if is_zero_vec(v) {
        return Err(Error::ZeroVector);
    }
    Ok(clear_denominators(v))
}

/// Returns `(g, x)` with `g = gcd(a) >= 0` and `sum x_i a_i = g`.
pub fn extended_gcd(a: &[BigInt]) -> (BigInt, ZVec) {
    let mut g = BigInt::zero();
    let mut coeffs: ZVec = vec![BigInt::zero(); a.len()];
    for (i, ai) in a.iter().enumerate() {
        let e = g.extended_gcd(ai);
        // e.gcd = e.x * g + e.y * ai
        for c in coeffs.iter_mut().take(i) {
            *c *= &e.x;
        }
        coeffs[i] = e.y.clone();
        g = e.gcd;
    }
    if g.is_negative() {
        g = -g;
        for c in coeffs.iter_mut() {
            *c = -c.clone();
        }
    }
    (g, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::rational::{qf, qvec, zdot};

    fn z(v: &[i64]) -> ZVec {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn primitive_vectors() {
        assert_eq!(primitive_vector(&qvec(&[4, 6])).unwrap(), z(&[2, 3]));
        assert_eq!(primitive_vector(&[qf(-1, 2), qf(0, 1)]).unwrap(), z(&[-1, 0]));
        assert_eq!(primitive_vector(&[qf(2, 3), qf(-4, 9)]).unwrap(), z(&[3, -2]));
        assert!(matches!(primitive_vector(&qvec(&[0, 0])), Err(Error::ZeroVector)));
    }

    #[test]
    fn hnf_is_canonical() {
        let a = hermite_normal_form(&[z(&[2, 4]), z(&[1, 3])]);
        assert_eq!(a, vec![z(&[1, 1]), z(&[0, 2])]);
        let b = hermite_normal_form(&[z(&[1, 3]), z(&[2, 4]), z(&[0, 0])]);
        assert_eq!(a, b);
    }

    #[test]
    fn kernel_of_line() {
        let k = integer_kernel(&[z(&[2, 4, 6])], 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(zdot(v, &z(&[1, 2, 3])).is_zero());
        }
        assert!(elementary_divisors(&k).iter().all(One::is_one));
    }

    #[test]
    fn saturated_span() {
        let l = LatticeBasis::of_span(&[qvec(&[2, 4])], 2);
        assert_eq!(l.basis(), &[z(&[1, 2])]);
        assert!(l.is_saturated());
        assert!(l.contains(&z(&[-3, -6])));
        assert!(!l.contains(&z(&[1, 0])));
        assert_eq!(LatticeBasis::of_span(&[], 3).rank(), 0);
        assert_eq!(LatticeBasis::of_span(&[qvec(&[1, 1]), qvec(&[1, -1])], 2).rank(), 2);
    }

    #[test]
    fn smith_divisors() {
        assert_eq!(elementary_divisors(&[z(&[2, 0]), z(&[0, 3])]), vec![BigInt::from(1), BigInt::from(6)]);
        assert_eq!(elementary_divisors(&[z(&[2, 4]), z(&[6, 8])]), vec![BigInt::from(2), BigInt::from(4)]);
    }

    #[test]
    fn bezout() {
        let a = z(&[6, 10, 15]);
        let (g, x) = extended_gcd(&a);
        assert_eq!(g, BigInt::from(1));
        assert_eq!(zdot(&a, &x), g);
        let (g, x) = extended_gcd(&z(&[-4, 0]));
        assert_eq!(g, BigInt::from(4));
        assert_eq!(zdot(&z(&[-4, 0]), &x), g);
    }
}
