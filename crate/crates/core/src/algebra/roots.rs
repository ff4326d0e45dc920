use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::AlgebraError;

// Trial division stops here; anything left above TRIAL_LIMIT^2 is unfactored.
const TRIAL_LIMIT: u64 = 10_000_000;

/// Homogenized value `sum c_i a^i b^(n-i)` of the polynomial with
/// coefficients `coeffs` (constant term first) at `a/b`.
pub fn eval_at_rational(coeffs: &[BigInt], a: &BigInt, b: &BigInt) -> BigInt {
    let n = coeffs.len();
    if n == 0 {
        return BigInt::zero();
    }
    let mut acc = coeffs[n - 1].clone();
    let mut bpow = BigInt::one();
    for c in coeffs[..n - 1].iter().rev() {
        bpow *= b;
        acc = acc * a + c * &bpow;
    }
    acc
}

fn factor(n: &BigInt) -> Result<Vec<(BigInt, u32)>, AlgebraError> {
    let mut n = n.abs();
    let mut out = Vec::new();
    if n.is_zero() {
        return Ok(out);
    }
    if let Some(mut m) = n.to_u64() {
        let mut d = 2u64;
        while d <= TRIAL_LIMIT && d.saturating_mul(d) <= m {
            let mut k = 0;
            while m % d == 0 {
                m /= d;
                k += 1;
            }
            if k > 0 {
                out.push((BigInt::from(d), k));
            }
            d += if d == 2 { 1 } else { 2 };
        }
        if m > 1 {
            if (m as u128) > (TRIAL_LIMIT as u128).pow(2) && d > TRIAL_LIMIT {
                return Err(AlgebraError::RootSearchBudget { bits: 64 - m.leading_zeros() as u64 });
            }
            out.push((BigInt::from(m), 1));
        }
        return Ok(out);
    }
    // Big input: strip small factors, then require the rest to be provably prime
    // by the trial bound.
    let mut d = 2u64;
    while d <= TRIAL_LIMIT {
        let bd = BigInt::from(d);
        if &bd * &bd > n {
            break;
        }
        let mut k = 0;
        while (&n % &bd).is_zero() {
            n /= &bd;
            k += 1;
        }
        if k > 0 {
            out.push((bd, k));
            if let Some(m) = n.to_u64() {
                let rest = factor(&BigInt::from(m))?;
                out.extend(rest);
                return Ok(merge(out));
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > BigInt::one() {
        let limit = BigInt::from(TRIAL_LIMIT);
        if n > &limit * &limit {
            return Err(AlgebraError::RootSearchBudget { bits: n.bits() });
        }
        out.push((n, 1));
    }
    Ok(out)
}

fn merge(mut f: Vec<(BigInt, u32)>) -> Vec<(BigInt, u32)> {
    f.sort();
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    for (p, k) in f {
        match out.last_mut() {
            Some((q, j)) if *q == p => *j += k,
            _ => out.push((p, k)),
        }
    }
    out
}

fn divisors(n: &BigInt) -> Result<Vec<BigInt>, AlgebraError> {
    let mut divs = vec![BigInt::one()];
    for (p, k) in factor(n)? {
        let mut next = Vec::with_capacity(divs.len() * (k as usize + 1));
        for d in &divs {
            let mut x = d.clone();
            next.push(x.clone());
            for _ in 0..k {
                x *= &p;
                next.push(x.clone());
            }
        }
        divs = next;
    }
    divs.sort();
    Ok(divs)
}

/// All rational roots of the integer polynomial with coefficients `coeffs`
/// (constant term first), without multiplicity.
///
/// Candidates are `±a/b` with `a | c_0` and `b | c_n` after the factor x^k
/// is split off; each candidate is confirmed by exact evaluation.
pub fn rational_roots(coeffs: &[BigInt]) -> Result<BTreeSet<BigRational>, AlgebraError> {
    let hi = coeffs.iter().rposition(|c| !c.is_zero()).ok_or(AlgebraError::ZeroPolynomial)?;
    let lo = coeffs.iter().position(|c| !c.is_zero()).expect("nonzero coefficient exists");
    let mut roots = BTreeSet::new();
    if lo > 0 {
        roots.insert(BigRational::zero());
    }
    let c = &coeffs[lo..=hi];
    if c.len() == 1 {
        return Ok(roots);
    }
    let lead = &c[c.len() - 1];
    let c0 = &c[0];

    // Cauchy bound: every root satisfies |r| < 1 + max |c_i / c_n|.
    let max_ratio = c[..c.len() - 1].iter().map(|x| x.abs()).max().unwrap_or_default();
    let bound = BigRational::new(max_ratio, lead.abs()) + BigRational::one();

    // Values at ±1 give the cheap filters (b - a) | p(1) and (b + a) | p(-1).
    let at_one = eval_at_rational(c, &BigInt::one(), &BigInt::one());
    let at_minus_one = eval_at_rational(c, &-BigInt::one(), &BigInt::one());

    let nums = divisors(c0)?;
    let dens = divisors(lead)?;
    for b in &dens {
        for a0 in &nums {
            if !a0.gcd(b).is_one() {
                continue;
            }
            if BigRational::new(a0.clone(), b.clone()) >= bound {
                continue;
            }
            for a in [a0.clone(), -a0.clone()] {
                let bm = b - &a;
                if !at_one.is_zero() && (bm.is_zero() || !(&at_one % &bm).is_zero()) {
                    continue;
                }
                let bp = b + &a;
                if !at_minus_one.is_zero() && (bp.is_zero() || !(&at_minus_one % &bp).is_zero()) {
                    continue;
                }
                if eval_at_rational(c, &a, b).is_zero() {
                    roots.insert(BigRational::new(a, b.clone()));
                }
            }
        }
    }
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn examples() {
        let r = rational_roots(&ints(&[-1, 0, 1])).unwrap();
        assert_eq!(r, [rat(-1, 1), rat(1, 1)].into_iter().collect());
        assert!(rational_roots(&ints(&[-2, 0, 1])).unwrap().is_empty());
        let r = rational_roots(&ints(&[0, 0, -1, 2])).unwrap();
        assert_eq!(r, [rat(0, 1), rat(1, 2)].into_iter().collect());
    }

    #[test]
    fn zero_polynomial_rejected() {
        assert_eq!(rational_roots(&ints(&[0, 0])), Err(AlgebraError::ZeroPolynomial));
    }

    #[test]
    fn constant_has_no_roots() {
        assert!(rational_roots(&ints(&[7])).unwrap().is_empty());
    }

    #[test]
    fn repeated_and_fractional_roots() {
        // (3x - 2)^2 (x + 5) = 9x^3 + 33x^2 - 56x + 20
        let r = rational_roots(&ints(&[20, -56, 33, 9])).unwrap();
        assert_eq!(r, [rat(-5, 1), rat(2, 3)].into_iter().collect());
    }

    #[test]
    fn factoring_of_large_smooth_constant() {
        // x - 2^80 * 3^5
        let big = BigInt::from(2u8).pow(80) * BigInt::from(243);
        let r = rational_roots(&[-big.clone(), BigInt::one()]).unwrap();
        assert_eq!(r, [BigRational::from_integer(big)].into_iter().collect());
    }

    #[test]
    fn divisor_lists() {
        assert_eq!(divisors(&BigInt::from(12)).unwrap(), ints(&[1, 2, 3, 4, 6, 12]));
        assert_eq!(divisors(&BigInt::from(-7)).unwrap(), ints(&[1, 7]));
    }
}
