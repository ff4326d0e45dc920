use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::algebra::{eval_at_rational, Scalar};

/// Binary form `sum_i c[i] X^i Y^(d-i)` of formal degree `d = c.len() - 1`.
///
/// The coefficient vector doubles as the dehomogenization at `Y = 1`, with
/// the constant term first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryForm {
    coeffs: Vec<BigInt>,
}

impl BinaryForm {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        assert!(!coeffs.is_empty(), "binary form needs a formal degree");
        Self { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// `X^k Y^(d-k)`
    pub fn monomial(d: usize, k: usize) -> Self {
        let mut c = vec![BigInt::zero(); d + 1];
        c[k] = BigInt::one();
        Self::new(c)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Coefficient of `X^d`, i.e. the value at `[1:0]`.
    pub fn top(&self) -> &BigInt {
        &self.coeffs[self.degree()]
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    pub fn max_bits(&self) -> u64 {
        self.coeffs.iter().map(|c| c.bits()).max().unwrap_or(0)
    }

    pub fn eval(&self, a: &BigInt, b: &BigInt) -> BigInt {
        eval_at_rational(&self.coeffs, a, b)
    }

    /// Evaluate at `[a:b]` in any coordinate ring.
    pub fn eval_scalar<F: Scalar>(&self, a: &F, b: &F) -> F {
        let d = self.degree() as u32;
        let mut acc = a.embed(&BigInt::zero());
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let i = i as u32;
            acc = acc + a.embed(c) * a.pow_u32(i) * b.pow_u32(d - i);
        }
        acc
    }

    pub fn scale_down(&self, g: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|c| c / g).collect())
    }

    pub fn negate(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.degree(), other.degree(), "adding forms of different degree");
        Self::new(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect())
    }

    pub fn scalar_mul(&self, k: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// `self(A, B) = sum c_i A^i B^(d-i)`; `A` and `B` share a degree.
    pub fn compose(&self, a: &Self, b: &Self) -> Self {
        let d = self.degree();
        let e = a.degree();
        assert_eq!(e, b.degree());
        let mut a_pows = vec![Self::monomial(0, 0)];
        let mut b_pows = vec![Self::monomial(0, 0)];
        for k in 1..=d {
            a_pows.push(a_pows[k - 1].mul(a));
            b_pows.push(b_pows[k - 1].mul(b));
        }
        let mut acc = Self::new(vec![BigInt::zero(); d * e + 1]);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            acc = acc.add(&a_pows[i].mul(&b_pows[d - i]).scalar_mul(c));
        }
        acc
    }

    /// Render in the variables `x` and `y` (e.g. `X` and `Y`).
    pub fn render(&self, x: &str, y: &str) -> String {
        let d = self.degree();
        let mut out = String::new();
        let mut first = true;
        for i in (0..=d).rev() {
            let c = &self.coeffs[i];
            if c.is_zero() {
                continue;
            }
            let mut vars = Vec::new();
            match i {
                0 => {}
                1 => vars.push(x.to_string()),
                _ => vars.push(format!("{x}^{i}")),
            }
            match d - i {
                0 => {}
                1 => vars.push(y.to_string()),
                k => vars.push(format!("{y}^{k}")),
            }
            let mono = vars.join("*");
            let mag = c.abs();
            let body = match (mono.is_empty(), mag.is_one()) {
                (true, _) => mag.to_string(),
                (false, true) => mono,
                (false, false) => format!("{mag}*{mono}"),
            };
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    out.push('-');
                }
                out.push_str(&body);
                first = false;
            } else {
                out.push_str(&format!(" {sign} {body}"));
            }
        }
        if first {
            out.push('0');
        }
        out
    }
}

impl fmt::Debug for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("X", "Y"))
    }
}

/// Fraction-free (Bareiss) determinant of a square integer matrix.
pub(crate) fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Resultant of two binary forms of the same formal degree, via the
/// Sylvester matrix. Zero exactly when they share a root in P^1.
pub fn resultant(f: &BinaryForm, g: &BinaryForm) -> BigInt {
    let m = f.degree();
    let n = g.degree();
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    // coefficients in descending powers of X
    let fd: Vec<BigInt> = f.coeffs.iter().rev().cloned().collect();
    let gd: Vec<BigInt> = g.coeffs.iter().rev().cloned().collect();
    for shift in 0..n {
        let mut row = vec![BigInt::zero(); size];
        for (j, c) in fd.iter().enumerate() {
            row[shift + j] = c.clone();
        }
        rows.push(row);
    }
    for shift in 0..m {
        let mut row = vec![BigInt::zero(); size];
        for (j, c) in gd.iter().enumerate() {
            row[shift + j] = c.clone();
        }
        rows.push(row);
    }
    bareiss_det(rows)
}
