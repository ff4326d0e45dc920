use super::SpectraError;

/// Dense symmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, SpectraError> {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(SpectraError::NotSquare { rows: n, cols: row.len() });
            }
            for (j, &v) in row.iter().enumerate() {
                m.data[i * n + j] = v;
            }
        }
        for i in 0..n {
            for j in 0..i {
                if m.get(i, j) != m.get(j, i) {
                    return Err(SpectraError::NotSymmetric { i, j });
                }
            }
        }
        Ok(m)
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n.max(1)).take(self.n).map(|r| r.to_vec()).collect()
    }

    fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    pub tol: f64,
    pub max_dim: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_dim: 4096 }
    }
}

fn check_dim(m: &SymmetricMatrix, opts: &EigenOptions) -> Result<(), SpectraError> {
    if m.dim() > opts.max_dim {
        return Err(SpectraError::DimensionCap { dim: m.dim(), cap: opts.max_dim });
    }
    Ok(())
}

/// Householder reduction to tridiagonal form: diagonal `d` and
/// sub-diagonal `e` (with `e[n-1] = 0`).
fn tridiagonalize(m: &SymmetricMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = m.dim();
    let mut a = m.clone();
    let mut e = vec![0.0; n];
    for k in 0..n.saturating_sub(1) {
        let x: Vec<f64> = (k + 1..n).map(|i| a.get(i, k)).collect();
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if x.len() == 1 || norm == 0.0 {
            e[k] = x[0];
            continue;
        }
        let alpha = if x[0] > 0.0 { -norm } else { norm };
        let mut v = x;
        v[0] -= alpha;
        let vnorm = v.iter().map(|t| t * t).sum::<f64>().sqrt();
        for t in v.iter_mut() {
            *t /= vnorm;
        }
        let len = v.len();
        let p: Vec<f64> =
            (0..len).map(|i| (0..len).map(|j| a.get(k + 1 + i, k + 1 + j) * v[j]).sum()).collect();
        let kk: f64 = v.iter().zip(&p).map(|(a, b)| a * b).sum();
        let q: Vec<f64> = p.iter().zip(&v).map(|(pi, vi)| pi - kk * vi).collect();
        for i in 0..len {
            for j in 0..len {
                let upd = 2.0 * (v[i] * q[j] + q[i] * v[j]);
                let cur = a.get(k + 1 + i, k + 1 + j);
                a.set(k + 1 + i, k + 1 + j, cur - upd);
            }
        }
        e[k] = alpha;
    }
    let d = (0..n).map(|i| a.get(i, i)).collect();
    (d, e)
}

/// Implicit QL with Wilkinson-type shifts on a symmetric tridiagonal matrix.
fn tridiagonal_ql(mut d: Vec<f64>, mut e: Vec<f64>) -> Result<Vec<f64>, SpectraError> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 100 {
                return Err(SpectraError::NoConvergence);
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0f64, 1.0f64, 0.0f64);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// All eigenvalues in ascending order (Householder tridiagonalization,
/// then implicit QL rotations).
pub fn eigenvalues(m: &SymmetricMatrix, opts: &EigenOptions) -> Result<Vec<f64>, SpectraError> {
    check_dim(m, opts)?;
    let (d, e) = tridiagonalize(m);
    tridiagonal_ql(d, e)
}

/// Cyclic Jacobi rotations; an independent route to the same spectrum.
pub fn jacobi_eigenvalues(m: &SymmetricMatrix, opts: &EigenOptions) -> Result<Vec<f64>, SpectraError> {
    check_dim(m, opts)?;
    let n = m.dim();
    let mut a = m.clone();
    let target = opts.tol * 1e-2 * m.frobenius().max(1.0);
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a.get(i, j).powi(2))
            .sum::<f64>()
            .sqrt();
        if off <= target {
            let mut d: Vec<f64> = (0..n).map(|i| a.get(i, i)).collect();
            d.sort_by(f64::total_cmp);
            return Ok(d);
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
            }
        }
    }
    Err(SpectraError::NoConvergence)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn diagonal_and_zero() {
        let opts = EigenOptions::default();
        assert_eq!(eigenvalues(&SymmetricMatrix::diagonal(&[3.0, 1.0, 2.0]), &opts).unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(eigenvalues(&SymmetricMatrix::zeros(3), &opts).unwrap(), vec![0.0; 3]);
        assert!(eigenvalues(&SymmetricMatrix::zeros(0), &opts).unwrap().is_empty());
    }

    #[test]
    fn two_by_two() {
        let m = SymmetricMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let opts = EigenOptions::default();
        assert!(close(&eigenvalues(&m, &opts).unwrap(), &[1.0, 3.0], 1e-14));
        assert!(close(&jacobi_eigenvalues(&m, &opts).unwrap(), &[1.0, 3.0], 1e-14));
    }

    #[test]
    fn routes_agree_on_a_dense_matrix() {
        let n = 12;
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| (((i * 7 + j * 7 + i * j) % 11) as f64) - 5.0).collect())
            .collect();
        let m = SymmetricMatrix::from_rows(&rows).unwrap();
        let opts = EigenOptions::default();
        let a = eigenvalues(&m, &opts).unwrap();
        let b = jacobi_eigenvalues(&m, &opts).unwrap();
        assert!(close(&a, &b, 1e-9), "{a:?} vs {b:?}");
        assert!((a.iter().sum::<f64>() - m.trace()).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            SymmetricMatrix::from_rows(&[vec![0.0, 1.0], vec![2.0, 0.0]]),
            Err(SpectraError::NotSymmetric { i: 1, j: 0 })
        ));
        let opts = EigenOptions { max_dim: 2, ..EigenOptions::default() };
        assert!(matches!(eigenvalues(&SymmetricMatrix::zeros(3), &opts), Err(SpectraError::DimensionCap { dim: 3, cap: 2 })));
    }
}
