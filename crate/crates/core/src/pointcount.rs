//! Points of level curves over prime fields, reduction of rational points,
//! and forward-image chains D_m = φ_{m,n}(C_m(F_p)) inside C_n(F_p).

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{
    enumerate_projective, enumerate_stratum, AlgebraError, FpPoint, PrimeField, RationalPoint, ReducedPolynomial,
    DEFAULT_ENUMERATION_CAP,
};
use crate::towers::{TowerError, TowerSpec};

/// Trailing window of equal sets that marks an image chain as stable.
pub const STABILIZATION_WINDOW: usize = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PointCountError {
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error("point {point} of Ω is not on C_{level}")]
    OmegaPoint { point: String, level: usize },
    #[error("image chain needs m_max >= n (got n = {n}, m_max = {m_max})")]
    LevelRange { n: usize, m_max: usize },
}

impl From<AlgebraError> for PointCountError {
    fn from(e: AlgebraError) -> Self {
        PointCountError::Tower(TowerError::Algebra(e))
    }
}

impl PointCountError {
    fn algebra(&self) -> Option<&AlgebraError> {
        match self {
            PointCountError::Tower(TowerError::Algebra(e)) => Some(e),
            _ => None,
        }
    }

    /// Some equation reduces to zero mod p.
    pub fn is_bad_reduction(&self) -> bool {
        matches!(self.algebra(), Some(AlgebraError::DegenerateReduction(_)))
    }

    pub fn is_cap(&self) -> bool {
        matches!(self.algebra(), Some(AlgebraError::EnumerationCap { .. }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountOptions {
    /// Keep the point list only when the count is at most this.
    pub retain_cap: usize,
    /// Largest ambient P^N(F_p) that will be enumerated.
    pub enumeration_cap: u128,
}

impl Default for CountOptions {
    fn default() -> Self {
        Self { retain_cap: 100_000, enumeration_cap: DEFAULT_ENUMERATION_CAP }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PointCountResult {
    pub level: usize,
    pub prime: u64,
    pub count: u64,
    /// All points in enumeration order, or `None` past the retain cap.
    pub points: Option<Vec<FpPoint>>,
}

impl PointCountResult {
    /// Combine counts of disjoint strata of the same level and prime.
    pub fn merge(parts: Vec<PointCountResult>, retain_cap: usize) -> Option<PointCountResult> {
        let first = parts.first()?;
        let (level, prime) = (first.level, first.prime);
        assert!(
            parts.iter().all(|r| r.level == level && r.prime == prime),
            "merging counts of different levels or primes"
        );
        let count = parts.iter().map(|r| r.count).sum();
        let points = if count as usize <= retain_cap && parts.iter().all(|r| r.points.is_some()) {
            let mut all: Vec<FpPoint> = parts.into_iter().flat_map(|r| r.points.unwrap_or_default()).collect();
            all.sort();
            Some(all)
        } else {
            None
        };
        Some(PointCountResult { level, prime, count, points })
    }
}

fn field(p: u64) -> Result<PrimeField, PointCountError> {
    PrimeField::new(p).map_err(|_| TowerError::NotPrime(p).into())
}

enum Level {
    Curve { dim: usize, equations: Vec<ReducedPolynomial> },
    ProjectiveLine,
}

fn reduced_level(tower: &TowerSpec, n: usize, f: PrimeField) -> Result<Level, PointCountError> {
    match tower {
        TowerSpec::Genus0Dynamical(_) => Ok(Level::ProjectiveLine),
        _ => {
            let curve = tower.level_equations(n)?;
            Ok(Level::Curve { dim: curve.ambient_dim, equations: curve.reduce(f)? })
        }
    }
}

fn scan<I: Iterator<Item = FpPoint>>(
    points: I,
    equations: &[ReducedPolynomial],
    retain_cap: usize,
) -> (u64, Option<Vec<FpPoint>>) {
    let mut count = 0u64;
    let mut kept = Some(Vec::new());
    for pt in points {
        let x = pt.values();
        if equations.iter().all(|f| f.eval_raw(&x) == 0) {
            count += 1;
            if let Some(v) = kept.as_mut() {
                if v.len() < retain_cap {
                    v.push(pt);
                } else {
                    kept = None;
                }
            }
        }
    }
    (count, kept)
}

/// #C_n(F_p) by exhaustive enumeration of the ambient P^N(F_p).
pub fn count_points(tower: &TowerSpec, n: usize, p: u64, opts: &CountOptions) -> Result<PointCountResult, PointCountError> {
    let f = field(p)?;
    match reduced_level(tower, n, f)? {
        Level::ProjectiveLine => {
            let all: Vec<FpPoint> = enumerate_projective(f, 1, opts.enumeration_cap)?.collect();
            let count = all.len() as u64;
            let points = (all.len() <= opts.retain_cap).then_some(all);
            Ok(PointCountResult { level: n, prime: p, count, points })
        }
        Level::Curve { dim, equations } => {
            let (count, points) = scan(enumerate_projective(f, dim, opts.enumeration_cap)?, &equations, opts.retain_cap);
            Ok(PointCountResult { level: n, prime: p, count, points })
        }
    }
}

/// Count restricted to the stratum whose first nonzero coordinate is at
/// `lead`. The strata for `lead = 0..=N` partition P^N(F_p), so their
/// results can be computed independently and combined with
/// [`PointCountResult::merge`].
pub fn count_points_stratum(
    tower: &TowerSpec,
    n: usize,
    p: u64,
    lead: usize,
    opts: &CountOptions,
) -> Result<PointCountResult, PointCountError> {
    let f = field(p)?;
    let (dim, equations) = match reduced_level(tower, n, f)? {
        Level::ProjectiveLine => (1, Vec::new()),
        Level::Curve { dim, equations } => (dim, equations),
    };
    let total = crate::algebra::projective_point_count(p, dim);
    if total > opts.enumeration_cap {
        return Err(AlgebraError::EnumerationCap { p, dim, count: total, cap: opts.enumeration_cap }.into());
    }
    let (count, points) = scan(enumerate_stratum(f, dim, lead), &equations, opts.retain_cap);
    Ok(PointCountResult { level: n, prime: p, count, points })
}

pub fn reduce_point(point: &RationalPoint, p: u64) -> Result<FpPoint, PointCountError> {
    Ok(point.reduce(field(p)?))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ImageChain {
    pub base_level: usize,
    pub prime: u64,
    /// `sets[i]` is D_{base_level + i}.
    pub sets: Vec<BTreeSet<FpPoint>>,
    /// Observed stabilization level (not a proof).
    pub stabilized_at: Option<usize>,
}

impl ImageChain {
    pub fn set_at(&self, m: usize) -> Option<&BTreeSet<FpPoint>> {
        m.checked_sub(self.base_level).and_then(|i| self.sets.get(i))
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.sets.iter().map(|s| s.len()).collect()
    }
}

fn stabilization(sets: &[BTreeSet<FpPoint>], base: usize) -> Option<usize> {
    let last = sets.last()?;
    let window_equal =
        sets.len() >= STABILIZATION_WINDOW && sets[sets.len() - STABILIZATION_WINDOW..].iter().all(|s| s == last);
    if !window_equal && !last.is_empty() {
        return None;
    }
    let mut i = sets.len() - 1;
    while i > 0 && sets[i - 1] == *last {
        i -= 1;
    }
    Some(base + i)
}

fn level_points(tower: &TowerSpec, m: usize, f: PrimeField, cap: u128) -> Result<Vec<FpPoint>, PointCountError> {
    let opts = CountOptions { retain_cap: usize::MAX, enumeration_cap: cap };
    let res = count_points(tower, m, f.modulus(), &opts)?;
    Ok(res.points.expect("retain cap is unbounded"))
}

/// The chain D_n ⊇ D_{n+1} ⊇ ... ⊇ D_{m_max} of forward images in C_n(F_p).
pub fn image_chain(tower: &TowerSpec, n: usize, p: u64, m_max: usize, enumeration_cap: u128) -> Result<ImageChain, PointCountError> {
    if m_max < n {
        return Err(PointCountError::LevelRange { n, m_max });
    }
    let f = field(p)?;
    let mut sets: Vec<BTreeSet<FpPoint>> = Vec::new();
    for m in n..=m_max {
        let mut image = BTreeSet::new();
        for pt in level_points(tower, m, f, enumeration_cap)? {
            image.insert(tower.compose_maps(m, n, &pt)?);
        }
        if let Some(prev) = sets.last() {
            assert!(image.is_subset(prev), "D_{m} is not contained in D_{}", m - 1);
        }
        sets.push(image);
    }
    let stabilized_at = stabilization(&sets, n);
    Ok(ImageChain { base_level: n, prime: p, sets, stabilized_at })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OmegaCheck {
    pub holds: bool,
    /// Points of C_m(F_p) whose image in C_n(F_p) misses red_p(Ω).
    pub witnesses: Vec<FpPoint>,
}

/// Checks φ_{m,n}(C_m(F_p)) ⊆ red_p(Ω).
pub fn check_omega_criterion(
    tower: &TowerSpec,
    n: usize,
    omega: &[RationalPoint],
    p: u64,
    m: usize,
    enumeration_cap: u128,
) -> Result<OmegaCheck, PointCountError> {
    if m < n {
        return Err(PointCountError::LevelRange { n, m_max: m });
    }
    let f = field(p)?;
    let curve = match tower {
        TowerSpec::Genus0Dynamical(_) => None,
        _ => Some(tower.level_equations(n)?),
    };
    let mut reduced = BTreeSet::new();
    for q in omega {
        let on_curve = match &curve {
            Some(c) => c.contains(q)?,
            None => q.coords().len() == 2,
        };
        if !on_curve {
            return Err(PointCountError::OmegaPoint { point: q.to_string(), level: n });
        }
        reduced.insert(q.reduce(f));
    }
    let mut witnesses = Vec::new();
    for pt in level_points(tower, m, f, enumeration_cap)? {
        if !reduced.contains(&tower.compose_maps(m, n, &pt)?) {
            witnesses.push(pt);
        }
    }
    Ok(OmegaCheck { holds: witnesses.is_empty(), witnesses })
}
