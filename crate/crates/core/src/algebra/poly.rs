use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::field::{reduce_bigint, PrimeField};
use super::parse::parse_terms;
use super::projective::{ProjectivePoint, Scalar};
use super::AlgebraError;

/// Exponent vector of a monomial, ordered graded-lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Self(exponents)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn render(&self) -> String {
        let mut parts = Vec::new();
        for (i, &e) in self.0.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(format!("X{i}")),
                _ => parts.push(format!("X{i}^{e}")),
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Homogeneous form with integer coefficients.
///
/// Terms are kept in a `BTreeMap` keyed by [`Monomial`], so two forms are
/// equal exactly when they have the same terms. Zero coefficients are never
/// stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HomogeneousPolynomial {
    num_vars: usize,
    degree: u32,
    terms: BTreeMap<Monomial, BigInt>,
}

impl HomogeneousPolynomial {
    pub fn new<I>(num_vars: usize, terms: I) -> Result<Self, AlgebraError>
    where
        I: IntoIterator<Item = (Vec<u32>, BigInt)>,
    {
        let mut map: BTreeMap<Monomial, BigInt> = BTreeMap::new();
        let mut degree: Option<u32> = None;
        for (exps, c) in terms {
            if exps.len() != num_vars {
                return Err(AlgebraError::ExponentArity { exponents: exps, num_vars });
            }
            let m = Monomial(exps);
            let d = m.degree();
            match degree {
                None => degree = Some(d),
                Some(expected) if expected != d => {
                    return Err(AlgebraError::NonHomogeneous { monomial: m.render(), found: d, expected })
                }
                _ => {}
            }
            *map.entry(m).or_insert_with(BigInt::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        if map.is_empty() {
            return Err(AlgebraError::ZeroPolynomial);
        }
        let degree = degree.unwrap_or(0);
        if degree == 0 {
            return Err(AlgebraError::ConstantPolynomial);
        }
        Ok(Self { num_vars, degree, terms: map })
    }

    /// Parse text such as `3*X0^2*X1 - X2^3`.
    ///
    /// With `num_vars = None` the variable count is one more than the
    /// largest index that appears.
    pub fn parse(text: &str, num_vars: Option<usize>) -> Result<Self, AlgebraError> {
        let limit = num_vars.unwrap_or(usize::MAX);
        let parsed = parse_terms(text, limit, |name| {
            let idx: usize = name.strip_prefix('X')?.parse().ok()?;
            (idx < limit).then_some(idx)
        })?;
        let n = num_vars.unwrap_or_else(|| {
            parsed.iter().flat_map(|t| t.factors.iter().map(|&(i, _)| i + 1)).max().unwrap_or(1)
        });
        // Check homogeneity term by term so the message can quote the input.
        let mut expected: Option<u32> = None;
        let mut terms = Vec::with_capacity(parsed.len());
        for t in parsed {
            let mut exps = vec![0u32; n];
            for (i, e) in t.factors {
                exps[i] += e;
            }
            let d: u32 = exps.iter().sum();
            match expected {
                None => expected = Some(d),
                Some(e) if e != d => {
                    return Err(AlgebraError::NonHomogeneous { monomial: t.text, found: d, expected: e })
                }
                _ => {}
            }
            terms.push((exps, t.coeff));
        }
        Self::new(n, terms)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Terms in descending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter().rev()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn max_coefficient_bits(&self) -> u64 {
        self.terms.values().map(|c| c.bits()).max().unwrap_or(0)
    }

    /// Reduce coefficients modulo `p`, dropping vanishing terms.
    pub fn reduce(&self, field: PrimeField) -> Result<ReducedPolynomial, AlgebraError> {
        let p = field.modulus();
        let terms: Vec<(Vec<u32>, u64)> = self
            .terms()
            .filter_map(|(m, c)| {
                let r = reduce_bigint(c, p);
                (r != 0).then(|| (m.0.clone(), r))
            })
            .collect();
        if terms.is_empty() {
            return Err(AlgebraError::DegenerateReduction(p));
        }
        Ok(ReducedPolynomial { field, num_vars: self.num_vars, degree: self.degree, terms })
    }

    /// Rename variables: variable `i` becomes variable `target[i]` in a ring
    /// with `num_vars` variables.
    pub fn rename_vars(&self, target: &[usize], num_vars: usize) -> Result<Self, AlgebraError> {
        assert_eq!(target.len(), self.num_vars, "one target per variable");
        let terms = self.terms.iter().map(|(m, c)| {
            let mut e = vec![0u32; num_vars];
            for (i, &k) in m.0.iter().enumerate() {
                e[target[i]] += k;
            }
            (e, c.clone())
        });
        Self::new(num_vars, terms)
    }

    /// Same form, viewed in a ring with more variables.
    pub fn with_num_vars(&self, num_vars: usize) -> Result<Self, AlgebraError> {
        assert!(num_vars >= self.num_vars);
        let ident: Vec<usize> = (0..self.num_vars).collect();
        self.rename_vars(&ident, num_vars)
    }

    /// Precompose with the power map X_i -> X_i^a.
    pub fn power_substitute(&self, a: u32) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (Monomial(m.0.iter().map(|e| e * a).collect()), c.clone()))
            .collect();
        Self { num_vars: self.num_vars, degree: self.degree * a, terms }
    }
}

/// Value of `poly` at the given representative of `point`.
///
/// Only the vanishing of this value is meaningful geometrically, since
/// rescaling the point multiplies it by lambda^degree.
pub fn evaluate<F: Scalar>(poly: &HomogeneousPolynomial, point: &ProjectivePoint<F>) -> Result<F, AlgebraError> {
    let x = point.coords();
    if x.len() != poly.num_vars {
        return Err(AlgebraError::DimensionMismatch { poly_vars: poly.num_vars, point_coords: x.len() });
    }
    let zero = x[0].embed(&BigInt::zero());
    let mut acc = zero.clone();
    for (m, c) in poly.terms.iter() {
        let mut t = x[0].embed(c);
        if t.is_zero_scalar() {
            continue;
        }
        for (xi, &e) in x.iter().zip(m.0.iter()) {
            if e > 0 {
                t = t * xi.pow_u32(e);
            }
        }
        acc = acc + t;
    }
    Ok(acc)
}

fn write_terms<'a, C>(f: &mut fmt::Formatter<'_>, terms: impl Iterator<Item = (&'a [u32], C)>) -> fmt::Result
where
    C: Into<BigInt>,
{
    for (k, (exps, c)) in terms.enumerate() {
        let c: BigInt = c.into();
        let mono = Monomial(exps.to_vec()).render();
        let mag = c.abs();
        let body = if mag.is_one() { mono } else { format!("{mag}*{mono}") };
        match (k, c.is_negative()) {
            (0, false) => write!(f, "{body}")?,
            (0, true) => write!(f, "-{body}")?,
            (_, false) => write!(f, " + {body}")?,
            (_, true) => write!(f, " - {body}")?,
        }
    }
    Ok(())
}

impl fmt::Display for HomogeneousPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.terms().map(|(m, c)| (m.exponents(), c.clone())))
    }
}

impl fmt::Debug for HomogeneousPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HomogeneousPolynomial({self})")
    }
}

/// A homogeneous form over F_p, obtained by [`HomogeneousPolynomial::reduce`].
#[derive(Clone, PartialEq, Eq)]
pub struct ReducedPolynomial {
    field: PrimeField,
    num_vars: usize,
    degree: u32,
    terms: Vec<(Vec<u32>, u64)>,
}

impl ReducedPolynomial {
    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> &[(Vec<u32>, u64)] {
        &self.terms
    }

    /// Evaluate at raw residues `x` (each in `[0, p)`).
    pub fn eval_raw(&self, x: &[u64]) -> u64 {
        debug_assert_eq!(x.len(), self.num_vars);
        let f = &self.field;
        let mut acc = 0u64;
        for (exps, c) in &self.terms {
            let mut t = *c;
            for (&xi, &e) in x.iter().zip(exps.iter()) {
                if e > 0 {
                    t = f.mul_raw(t, f.pow_raw(xi, e as u64));
                    if t == 0 {
                        break;
                    }
                }
            }
            acc = f.add_raw(acc, t);
        }
        acc
    }

    pub fn evaluate(&self, point: &ProjectivePoint<super::Fp>) -> Result<super::Fp, AlgebraError> {
        if point.coords().len() != self.num_vars {
            return Err(AlgebraError::DimensionMismatch { poly_vars: self.num_vars, point_coords: point.coords().len() });
        }
        Ok(self.field.element(self.eval_raw(&point.values())))
    }

    /// Partial derivatives at `x`, as raw residues.
    pub fn gradient_raw(&self, x: &[u64]) -> Vec<u64> {
        let f = &self.field;
        let mut grad = vec![0u64; self.num_vars];
        for (exps, c) in &self.terms {
            for (i, &ei) in exps.iter().enumerate() {
                if ei == 0 {
                    continue;
                }
                let mut t = f.mul_raw(*c, ei as u64 % f.modulus());
                for (j, (&xj, &ej)) in x.iter().zip(exps.iter()).enumerate() {
                    let e = if j == i { ej - 1 } else { ej };
                    if e > 0 {
                        t = f.mul_raw(t, f.pow_raw(xj, e as u64));
                    }
                }
                grad[i] = f.add_raw(grad[i], t);
            }
        }
        grad
    }
}

impl fmt::Display for ReducedPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.terms.iter().map(|(e, c)| (e.as_slice(), BigInt::from(*c))))
    }
}

impl fmt::Debug for ReducedPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ReducedPolynomial({self} over {})", self.field)
    }
}
