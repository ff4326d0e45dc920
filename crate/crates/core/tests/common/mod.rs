#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use towerlab_core::algebra::HomogeneousPolynomial;

/// Equations as (exponents, coefficient mod p).
pub fn residues(eqs: &[HomogeneousPolynomial], p: u64) -> Vec<Vec<(Vec<u32>, u64)>> {
    let pb = BigInt::from(p);
    eqs.iter()
        .map(|f| {
            f.terms()
                .map(|(m, c)| (m.exponents().to_vec(), c.mod_floor(&pb).to_u64().unwrap()))
                .collect()
        })
        .collect()
}

fn eval_mod(terms: &[(Vec<u32>, u64)], x: &[u64], p: u64) -> u64 {
    let mut acc = 0u64;
    for (exps, c) in terms {
        let mut t = *c;
        for (xi, &e) in x.iter().zip(exps) {
            for _ in 0..e {
                t = t * xi % p;
            }
        }
        acc = (acc + t) % p;
    }
    acc
}

/// Affine vectors of F_p^{N+1} \ {0} on every equation, scanned from the
/// last coordinate as the fastest-moving digit. Each projective point is
/// hit p - 1 times.
pub fn affine_zeros(eqs: &[HomogeneousPolynomial], vars: usize, p: u64) -> Vec<Vec<u64>> {
    let eqs = residues(eqs, p);
    let mut out = Vec::new();
    let mut x = vec![0u64; vars];
    loop {
        let mut i = vars;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            x[i] += 1;
            if x[i] < p {
                break;
            }
            x[i] = 0;
        }
        if eqs.iter().all(|f| eval_mod(f, &x, p) == 0) {
            out.push(x.clone());
        }
    }
}

/// Projective point count by brute force: affine zeros / (p - 1).
pub fn brute_force_count(eqs: &[HomogeneousPolynomial], vars: usize, p: u64) -> u64 {
    let n = affine_zeros(eqs, vars, p).len() as u64;
    assert_eq!(n % (p - 1), 0);
    n / (p - 1)
}

/// Scale so the first nonzero entry is 1.
pub fn normalize_mod(x: &[u64], p: u64) -> Vec<u64> {
    let lead = *x.iter().find(|&&v| v != 0).unwrap();
    let inv = (1..p).find(|&i| i * lead % p == 1).unwrap();
    x.iter().map(|&v| v * inv % p).collect()
}
