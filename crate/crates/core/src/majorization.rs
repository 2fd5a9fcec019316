//! Majorization order, T-transforms, and chain-based Schur-monotonicity
//! checks.
//!
//! A function is checked along a *chain* of vectors in which consecutive
//! elements are comparable in the majorization order. Finite chains cannot
//! prove Schur-convexity, but they give falsifiable coverage of it.

use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactnum::rat;
use crate::scalar::{serialize_rendered, serialize_rendered_vec, sum, Render, Scalar};
use crate::simplex::ProbVector;
use crate::Rational;

fn sorted_desc<T: Scalar>(v: &[T]) -> Vec<T> {
    let mut s = v.to_vec();
    // stable, so equal entries keep their relative order
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
    s
}

/// Whether `a` majorizes `b`: equal totals, and every partial sum of the
/// descending rearrangement of `a` is at least the matching one of `b`.
///
/// Sums are compared exactly, so float inputs must add up bit-for-bit.
pub fn majorizes<T: Scalar>(a: &[T], b: &[T]) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    if sum(a) != sum(b) {
        return Err(Error::SumMismatch);
    }
    let (sa, sb) = (sorted_desc(a), sorted_desc(b));
    let mut pa = T::zero();
    let mut pb = T::zero();
    for (x, y) in sa.into_iter().zip(sb) {
        pa = pa + x;
        pb = pb + y;
        if pa < pb {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Replaces `(v_i, v_j)` by `(λ v_i + (1-λ) v_j, (1-λ) v_i + λ v_j)`.
pub fn t_transform<T: Scalar>(v: &[T], i: usize, j: usize, lambda: &T) -> Result<Vec<T>> {
    let len = v.len();
    for idx in [i, j] {
        if idx >= len {
            return Err(Error::IndexOutOfRange { index: idx, len });
        }
    }
    if i == j {
        return Err(Error::InvalidInput("t-transform needs two distinct coordinates".into()));
    }
    if *lambda < T::zero() || *lambda > T::one() {
        return Err(Error::InvalidInput("t-transform weight must lie in [0, 1]".into()));
    }
    let mu = T::one() - lambda.clone();
    let mut out = v.to_vec();
    out[i] = lambda.clone() * v[i].clone() + mu.clone() * v[j].clone();
    out[j] = mu * v[i].clone() + lambda.clone() * v[j].clone();
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Nondecreasing as the argument moves up the majorization order.
    Convex,
    /// Nonincreasing as the argument moves up the majorization order.
    Concave,
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound(serialize = "T: Render"))]
pub struct Violation<T> {
    /// Position of the first element of the offending consecutive pair.
    pub index: usize,
    #[serde(serialize_with = "serialize_rendered_vec")]
    pub from: Vec<T>,
    #[serde(serialize_with = "serialize_rendered_vec")]
    pub to: Vec<T>,
    #[serde(serialize_with = "serialize_rendered")]
    pub value_from: T,
    #[serde(serialize_with = "serialize_rendered")]
    pub value_to: T,
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound(serialize = "T: Render"))]
pub struct SchurReport<T> {
    pub direction: Direction,
    #[serde(serialize_with = "serialize_matrix")]
    pub chain: Vec<Vec<T>>,
    #[serde(serialize_with = "serialize_rendered_vec")]
    pub values: Vec<T>,
    pub passed: bool,
    pub first_violation: Option<Violation<T>>,
}

fn serialize_matrix<T: Render, S: Serializer>(m: &[Vec<T>], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(m.iter().map(|row| row.iter().map(Render::render).collect::<Vec<_>>()))
}

/// Evaluates `f` along `chain` and checks monotonicity in `direction`.
/// Consecutive elements that majorize each other both ways (permutations)
/// must receive equal values.
pub fn check_schur_monotone<T, F>(f: F, chain: &[Vec<T>], direction: Direction) -> Result<SchurReport<T>>
where
    T: Scalar,
    F: Fn(&[T]) -> T,
{
    let values: Vec<T> = chain.iter().map(|p| f(p)).collect();
    let mut first_violation = None;
    for (i, pair) in chain.windows(2).enumerate() {
        let (a, b) = (&pair[0], &pair[1]);
        let b_over_a = majorizes(b, a)?;
        let a_over_b = majorizes(a, b)?;
        if !b_over_a && !a_over_b {
            return Err(Error::IncomparableChain { index: i });
        }
        let (fa, fb) = (&values[i], &values[i + 1]);
        // `up` is the value at the majorizing end
        let ok = |low: &T, up: &T| match direction {
            Direction::Convex => up >= low,
            Direction::Concave => up <= low,
        };
        let fine = (!b_over_a || ok(fa, fb)) && (!a_over_b || ok(fb, fa));
        if !fine && first_violation.is_none() {
            first_violation = Some(Violation {
                index: i,
                from: a.clone(),
                to: b.clone(),
                value_from: fa.clone(),
                value_to: fb.clone(),
            });
        }
    }
    Ok(SchurReport {
        direction,
        chain: chain.to_vec(),
        passed: first_violation.is_none(),
        values,
        first_violation,
    })
}

/// A random chain in increasing majorization order: starts at `p_ecp`,
/// ends at a random point reached from an extreme point or a random lattice
/// point by `steps` T-transforms, read backwards.
pub fn random_t_chain<R: Rng + ?Sized>(k: usize, steps: usize, rng: &mut R) -> Vec<ProbVector> {
    assert!(k >= 2, "chains need at least two cells");
    let start: Vec<Rational> = if rng.gen_bool(0.5) {
        ProbVector::vertex(k, rng.gen_range(0..k)).probs().to_vec()
    } else {
        random_lattice_point(k, 12, rng).probs().to_vec()
    };
    let mut walk = vec![start];
    for _ in 0..steps {
        let mut idx: Vec<usize> = (0..k).collect();
        idx.shuffle(rng);
        let lambda = rat(rng.gen_range(1..=4), 4);
        let next = t_transform(walk.last().unwrap(), idx[0], idx[1], &lambda).expect("valid t-transform");
        walk.push(next);
    }
    walk.push(ProbVector::ecp(k).probs().to_vec());
    walk.reverse();
    walk.into_iter()
        .map(|v| ProbVector::new(v).expect("t-transforms stay in the simplex"))
        .collect()
}

/// `count` chains from a ChaCha stream seeded with `seed`; same seed, same chains.
pub fn seeded_t_chains(k: usize, count: usize, steps: usize, seed: u64) -> Vec<Vec<ProbVector>> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_t_chain(k, steps, &mut rng)).collect()
}

/// Uniformly random point of the barycentric lattice with denominator `m`.
pub fn random_lattice_point<R: Rng + ?Sized>(k: usize, m: u32, rng: &mut R) -> ProbVector {
    // stars and bars: choose k-1 cut points among m + k - 1 slots
    let mut cuts: Vec<u32> = (0..m + k as u32 - 1).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<u32> = cuts[..k - 1].to_vec();
    cuts.sort_unstable();
    let mut parts = Vec::with_capacity(k);
    let mut prev: i64 = -1;
    for &c in &cuts {
        parts.push((c as i64 - prev - 1) as u32);
        prev = c as i64;
    }
    parts.push((m as i64 + k as i64 - 2 - prev) as u32);
    ProbVector::new(parts.into_iter().map(|c| rat(c as i64, m as i64)).collect()).expect("lattice point")
}

/// Converts a chain of probability vectors to plain coordinate vectors.
pub fn chain_coords(chain: &[ProbVector]) -> Vec<Vec<Rational>> {
    chain.iter().map(|p| p.probs().to_vec()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::int;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn majorizes_examples() {
        assert!(majorizes(&[int(1), int(0)], &[rat(1, 2), rat(1, 2)]).unwrap());
        assert!(majorizes(&[rat(1, 2), rat(1, 2)], &[rat(1, 2), rat(1, 2)]).unwrap());
        assert!(majorizes(&[rat(2, 3), rat(1, 3)], &[rat(3, 5), rat(2, 5)]).unwrap());
        assert!(!majorizes(&[rat(3, 5), rat(2, 5)], &[rat(2, 3), rat(1, 3)]).unwrap());
        assert_eq!(majorizes(&[int(1), int(0)], &[int(1), int(1)]), Err(Error::SumMismatch));
        assert!(matches!(majorizes(&[int(1)], &[int(1), int(0)]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn majorizes_in_floats() {
        assert!(majorizes(&[0.75f64, 0.25], &[0.5, 0.5]).unwrap());
    }

    #[test]
    fn t_transform_examples() {
        assert_eq!(t_transform(&[int(1), int(0)], 0, 1, &rat(1, 2)).unwrap(), vec![rat(1, 2), rat(1, 2)]);
        let v = vec![rat(1, 3), rat(1, 6), rat(1, 2)];
        assert_eq!(t_transform(&v, 2, 0, &int(1)).unwrap(), v);
        assert_eq!(t_transform(&[int(3), int(1)], 0, 1, &rat(3, 4)).unwrap(), vec![rat(5, 2), rat(3, 2)]);
        assert!(matches!(t_transform(&[int(3), int(1)], 0, 2, &rat(1, 2)), Err(Error::IndexOutOfRange { .. })));
        assert!(t_transform(&[int(3), int(1)], 1, 1, &rat(1, 2)).is_err());
        assert!(t_transform(&[int(3), int(1)], 0, 1, &rat(3, 2)).is_err());
    }

    fn chain() -> Vec<Vec<Rational>> {
        vec![vec![rat(1, 2), rat(1, 2)], vec![rat(2, 3), rat(1, 3)], vec![int(1), int(0)]]
    }

    #[test]
    fn schur_checks_on_simple_functions() {
        let max = |p: &[Rational]| p.iter().max().unwrap().clone();
        assert!(check_schur_monotone(max, &chain(), Direction::Convex).unwrap().passed);
        let prod = |p: &[Rational]| p.iter().fold(int(1), |a, b| a * b);
        assert!(check_schur_monotone(prod, &chain(), Direction::Concave).unwrap().passed);
        let report = check_schur_monotone(prod, &chain(), Direction::Convex).unwrap();
        assert!(!report.passed);
        assert_eq!(report.first_violation.unwrap().index, 0);
    }

    #[test]
    fn incomparable_chain_is_rejected() {
        let c = vec![vec![rat(1, 2), rat(1, 2), int(0)], vec![rat(2, 3), rat(1, 6), rat(1, 6)]];
        let id = |p: &[Rational]| p[0].clone();
        assert_eq!(
            check_schur_monotone(id, &c, Direction::Convex).unwrap_err(),
            Error::IncomparableChain { index: 0 }
        );
    }

    #[test]
    fn random_chains_increase_in_majorization() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in 2..=4 {
            for _ in 0..20 {
                let c = random_t_chain(k, 4, &mut rng);
                assert!(c[0].is_ecp());
                for w in c.windows(2) {
                    assert!(majorizes(w[1].probs(), w[0].probs()).unwrap());
                }
            }
        }
    }

    #[test]
    fn report_serializes_exactly() {
        let max = |p: &[Rational]| p.iter().max().unwrap().clone();
        let r = check_schur_monotone(max, &chain(), Direction::Convex).unwrap();
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["values"], serde_json::json!(["1/2", "2/3", "1/1"]));
        assert_eq!(json["direction"], "convex");
    }
}
