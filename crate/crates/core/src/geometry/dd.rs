//! Double description method over the integers.
//!
//! Computes generators of a polyhedral cone `{y : a_i · y >= 0}` given by
//! integer constraint vectors. Generators are returned as a lineality basis
//! plus one representative per extreme ray (modulo lineality). Every vector
//! is kept primitive so entries stay small.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::rational::{normalize_zvec, zdot, ZVec};

#[derive(Clone, Debug, Default)]
pub struct ConeGenerators {
    pub lineality: Vec<ZVec>,
    pub rays: Vec<ZVec>,
}

struct Ray {
    v: ZVec,
    /// Indices of processed constraints vanishing on `v`.
    zeros: Vec<usize>,
}

fn combine(a: &BigInt, x: &[BigInt], b: &BigInt, y: &[BigInt]) -> ZVec {
    let mut out: ZVec = x.iter().zip(y).map(|(p, q)| a * p + b * q).collect();
    normalize_zvec(&mut out);
    out
}

fn is_subset(small: &[usize], big: &[usize]) -> bool {
    // both sorted ascending
    let mut it = big.iter();
    small.iter().all(|s| it.any(|b| b == s))
}

fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().filter(|x| b.contains(x)).copied().collect()
}

/// Generators of `{y in Q^dim : c · y >= 0 for all c in constraints}`.
pub fn cone_generators(constraints: &[ZVec], dim: usize) -> ConeGenerators {
    let mut lineality: Vec<ZVec> = (0..dim)
        .map(|i| {
            let mut e = vec![BigInt::zero(); dim];
            e[i] = BigInt::from(1);
            e
        })
        .collect();
    let mut rays: Vec<Ray> = Vec::new();

    for (idx, a) in constraints.iter().enumerate() {
        if a.iter().all(Zero::is_zero) {
            continue;
        }
        if let Some(pos) = lineality.iter().position(|l| !zdot(a, l).is_zero()) {
            let l = lineality.remove(pos);
            let s = zdot(a, &l);
            for other in lineality.iter_mut() {
                let t = zdot(a, other);
                if !t.is_zero() {
                    *other = combine(&s, other, &(-t), &l);
                }
            }
            let sign = if s.is_negative() { BigInt::from(-1) } else { BigInt::from(1) };
            for r in rays.iter_mut() {
                let t = zdot(a, &r.v);
                if !t.is_zero() {
                    r.v = combine(&s.abs(), &r.v, &(-(&sign * t)), &l);
                }
                r.zeros.push(idx);
            }
            let mut new_ray: ZVec = l.iter().map(|x| &sign * x).collect();
            normalize_zvec(&mut new_ray);
            // earlier constraints all vanish on lineality directions
            let zeros = (0..idx).collect();
            rays.push(Ray { v: new_ray, zeros });
            continue;
        }

        let values: Vec<BigInt> = rays.iter().map(|r| zdot(a, &r.v)).collect();
        if values.iter().all(|v| !v.is_negative()) {
            for (r, v) in rays.iter_mut().zip(&values) {
                if v.is_zero() {
                    r.zeros.push(idx);
                }
            }
            continue;
        }
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_negative()).collect();

        let mut next: Vec<Ray> = Vec::new();
        for &p in &pos {
            for &n in &neg {
                let common = intersect(&rays[p].zeros, &rays[n].zeros);
                let adjacent = (0..rays.len())
                    .filter(|&k| k != p && k != n)
                    .all(|k| !is_subset(&common, &rays[k].zeros));
                if !adjacent {
                    continue;
                }
                let v = combine(&values[p], &rays[n].v, &(-values[n].clone()), &rays[p].v);
                let mut zeros = common;
                zeros.push(idx);
                next.push(Ray { v, zeros });
            }
        }
        let old = std::mem::take(&mut rays);
        for (i, mut r) in old.into_iter().enumerate() {
            if values[i].is_negative() {
                continue;
            }
            if values[i].is_zero() {
                r.zeros.push(idx);
            }
            rays.push(r);
        }
        rays.extend(next);
    }

    for l in lineality.iter_mut() {
        normalize_zvec(l);
    }
    ConeGenerators {
        lineality,
        rays: rays.into_iter().map(|r| r.v).collect(),
    }
}
