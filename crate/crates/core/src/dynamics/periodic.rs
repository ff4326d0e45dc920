use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Zero;

use super::{DynamicsError, MapSequence, RationalMap};
use crate::algebra::{rational_roots, RationalPoint};

fn infinity() -> RationalPoint {
    RationalPoint::from_i64s(&[1, 0]).expect("[1:0] is a point")
}

fn iterate_point(f: &RationalMap, p: &RationalPoint, n: usize) -> Result<RationalPoint, DynamicsError> {
    let mut q = p.clone();
    for _ in 0..n {
        q = f.apply(&q)?;
    }
    Ok(q)
}

/// All points of P^1(Q) with f^n(P) = P for some 1 <= n <= `max_period`.
///
/// Finite candidates are the rational roots of F_n(x,1) - x G_n(x,1) where
/// [F_n : G_n] is the n-th iterate; infinity is a candidate when G_n(1,0)
/// vanishes. Every candidate is confirmed on its exact orbit.
pub fn periodic_points(f: &RationalMap, max_period: usize, max_bits: u64) -> Result<BTreeSet<RationalPoint>, DynamicsError> {
    let mut out = BTreeSet::new();
    let mut iterate = f.clone();
    for n in 1..=max_period {
        if n > 1 {
            iterate = f.compose_raw(&iterate);
            let bits = iterate.max_bits();
            if bits > max_bits {
                return Err(DynamicsError::PrecisionExceeded { bits, cap: max_bits, partial: None });
            }
        }
        let fc = iterate.numerator().coeffs();
        let gc = iterate.denominator().coeffs();
        let mut fixed = vec![BigInt::zero(); fc.len() + 1];
        for (i, c) in fc.iter().enumerate() {
            fixed[i] += c;
        }
        for (i, c) in gc.iter().enumerate() {
            fixed[i + 1] -= c;
        }
        for r in rational_roots(&fixed)? {
            let p = RationalPoint::new(vec![r.numer().clone(), r.denom().clone()])?;
            if iterate_point(f, &p, n)? == p {
                out.insert(p);
            }
        }
        if iterate.denominator().top().is_zero() {
            let inf = infinity();
            if iterate_point(f, &inf, n)? == inf {
                out.insert(inf);
            }
        }
    }
    Ok(out)
}

/// Rational points R with g(R) = q.
pub fn rational_preimages(g: &RationalMap, q: &RationalPoint, max_bits: u64) -> Result<BTreeSet<RationalPoint>, DynamicsError> {
    let c = q.coords();
    if c.len() != 2 {
        return Err(DynamicsError::NotP1Point(c.len()));
    }
    let (a, b) = (&c[0], &c[1]);
    // b F - a G vanishes exactly on the fibre over [a:b]
    let fiber = g.numerator().scalar_mul(b).add(&g.denominator().scalar_mul(&-a.clone()));
    let bits = fiber.max_bits();
    if bits > max_bits {
        return Err(DynamicsError::PrecisionExceeded { bits, cap: max_bits, partial: None });
    }
    let mut out = BTreeSet::new();
    for r in rational_roots(fiber.coeffs())? {
        let p = RationalPoint::new(vec![r.numer().clone(), r.denom().clone()])?;
        if g.apply(&p)? == *q {
            out.insert(p);
        }
    }
    if fiber.top().is_zero() {
        let inf = infinity();
        if g.apply(&inf)? == *q {
            out.insert(inf);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreimageNode {
    pub point: RationalPoint,
    /// Rational preimages one level up.
    pub children: Vec<PreimageNode>,
}

impl PreimageNode {
    fn height(&self) -> usize {
        self.children.iter().map(|c| c.height() + 1).max().unwrap_or(0)
    }

    fn longest_path(&self) -> Vec<RationalPoint> {
        let best = self.children.iter().map(|c| c.longest_path()).max_by_key(|p| p.len());
        let mut path = vec![self.point.clone()];
        if let Some(rest) = best {
            path.extend(rest);
        }
        path
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(|c| c.node_count()).sum::<usize>()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreimageTree {
    pub root: PreimageNode,
    pub depth: usize,
    /// A chain P = P_0, P_1, ..., P_depth with f_k(P_k) = P_{k-1}, if one exists.
    pub path: Option<Vec<RationalPoint>>,
}

impl PreimageTree {
    /// The root lifts rationally through `depth` levels. This only certifies
    /// triviality up to that depth.
    pub fn certified(&self) -> bool {
        self.path.is_some()
    }
}

fn grow(seq: &MapSequence, point: RationalPoint, level: usize, depth: usize, max_bits: u64) -> Result<PreimageNode, DynamicsError> {
    let mut children = Vec::new();
    if level < depth {
        let g = seq.level_map(level + 1)?;
        for r in rational_preimages(g, &point, max_bits)? {
            children.push(grow(seq, r, level + 1, depth, max_bits)?);
        }
    }
    Ok(PreimageNode { point, children })
}

/// Tree of all rational preimages of `p` through the first `depth` maps of
/// the sequence.
pub fn preimage_chain(seq: &MapSequence, p: &RationalPoint, depth: usize, max_bits: u64) -> Result<PreimageTree, DynamicsError> {
    if p.coords().len() != 2 {
        return Err(DynamicsError::NotP1Point(p.coords().len()));
    }
    let root = grow(seq, p.clone(), 0, depth, max_bits)?;
    let path = (root.height() == depth).then(|| root.longest_path());
    Ok(PreimageTree { root, depth, path })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::DEFAULT_MAX_BITS;

    fn pt(a: i64, b: i64) -> RationalPoint {
        RationalPoint::from_i64s(&[a, b]).unwrap()
    }

    #[test]
    fn square_map_periodic_points() {
        let sq = RationalMap::power(2).unwrap();
        let expected: BTreeSet<_> = [pt(0, 1), pt(1, 1), pt(1, 0)].into_iter().collect();
        assert_eq!(periodic_points(&sq, 1, DEFAULT_MAX_BITS).unwrap(), expected);
        assert_eq!(periodic_points(&sq, 6, DEFAULT_MAX_BITS).unwrap(), expected);
    }

    #[test]
    fn two_cycle_of_x2_minus_1() {
        let f = RationalMap::polynomial(&[-1, 0, 1]).unwrap();
        let per = periodic_points(&f, 6, DEFAULT_MAX_BITS).unwrap();
        for p in [pt(0, 1), pt(-1, 1), pt(1, 0)] {
            assert!(per.contains(&p), "{p}");
        }
    }

    #[test]
    fn preimages_of_square_map() {
        let sq = RationalMap::power(2).unwrap();
        let pre = rational_preimages(&sq, &pt(4, 9), DEFAULT_MAX_BITS).unwrap();
        assert_eq!(pre, [pt(-2, 3), pt(2, 3)].into_iter().collect());
        assert!(rational_preimages(&sq, &pt(2, 1), DEFAULT_MAX_BITS).unwrap().is_empty());
        assert_eq!(rational_preimages(&sq, &pt(1, 0), DEFAULT_MAX_BITS).unwrap(), [pt(1, 0)].into_iter().collect());
    }

    #[test]
    fn chain_through_increasing_powers() {
        let maps = (2..=6).map(|d| RationalMap::power(d).unwrap()).collect();
        let seq = MapSequence::Explicit(maps);
        let t = preimage_chain(&seq, &pt(1, 1), 5, DEFAULT_MAX_BITS).unwrap();
        assert!(t.certified());
        assert_eq!(t.path.as_ref().unwrap().len(), 6);
        let t = preimage_chain(&seq, &pt(2, 1), 2, DEFAULT_MAX_BITS).unwrap();
        assert!(!t.certified());
    }

    #[test]
    fn zero_is_totally_invariant() {
        let seq = MapSequence::Constant(RationalMap::power(2).unwrap());
        let t = preimage_chain(&seq, &pt(0, 1), 7, DEFAULT_MAX_BITS).unwrap();
        assert_eq!(t.path.unwrap(), vec![pt(0, 1); 8]);
        assert_eq!(t.root.node_count(), 8);
    }

    #[test]
    fn short_sequence_is_an_error() {
        let seq = MapSequence::Explicit(vec![RationalMap::power(2).unwrap()]);
        assert_eq!(
            preimage_chain(&seq, &pt(1, 1), 2, DEFAULT_MAX_BITS),
            Err(DynamicsError::SequenceTooShort { needed: 2, len: 1 })
        );
    }
}
