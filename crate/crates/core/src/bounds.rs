//! Genus formulas and gonality bounds, and the per-level report that
//! combines them into gonality intervals with provenance.

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{RationalPoint, DEFAULT_ENUMERATION_CAP};
use crate::pointcount::{count_points, CountOptions, PointCountError};
use crate::towers::{search_rational_points, singular_points, ExponentRule, TowerError, TowerSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("empty degree list")]
    EmptyDegrees,
    #[error("degree {0} is below 2")]
    DegreeTooSmall(u32),
    #[error("genus {0} is outside the range g >= 2 of the canonical upper bounds")]
    GenusOutOfDomain(u64),
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error(transparent)]
    PointCount(#[from] PointCountError),
}

fn check_degrees(degrees: &[u32]) -> Result<(), BoundsError> {
    if degrees.is_empty() {
        return Err(BoundsError::EmptyDegrees);
    }
    match degrees.iter().find(|&&a| a < 2) {
        Some(&a) => Err(BoundsError::DegreeTooSmall(a)),
        None => Ok(()),
    }
}

fn product(values: &[u32], what: &'static str) -> Result<u64, BoundsError> {
    values
        .iter()
        .try_fold(1u64, |acc, &a| acc.checked_mul(a as u64))
        .ok_or(BoundsError::Overflow(what))
}

/// Genus of a smooth complete intersection curve in P^{r+1} with degrees
/// a_1..a_r: 2g - 2 = (prod a_i)(sum a_i - r - 2).
pub fn ci_genus(degrees: &[u32]) -> Result<u64, BoundsError> {
    check_degrees(degrees)?;
    let prod = product(degrees, "ci_genus")? as i128;
    let sum: i128 = degrees.iter().map(|&a| a as i128).sum();
    let r = degrees.len() as i128;
    let two_g_minus_2 = prod * (sum - r - 2);
    Ok(((two_g_minus_2 + 2) / 2) as u64)
}

/// (d - 1)(d - 2)/2
pub fn planar_genus(d: u64) -> u64 {
    assert!(d >= 1, "plane curves have degree >= 1");
    (d - 1) * (d - 2) / 2
}

/// (a_1 - 1) a_2 ... a_r over the sorted degree list.
pub fn lazarsfeld_bound(degrees: &[u32]) -> Result<u64, BoundsError> {
    check_degrees(degrees)?;
    let mut sorted = degrees.to_vec();
    sorted.sort_unstable();
    let rest = product(&sorted[1..], "lazarsfeld_bound")?;
    rest.checked_mul(sorted[0] as u64 - 1).ok_or(BoundsError::Overflow("lazarsfeld_bound"))
}

/// d a_1 ... a_n - 1
pub fn planar_power_bound(d: u32, exponents: &[u32]) -> Result<u64, BoundsError> {
    check_degrees(&[d])?;
    if !exponents.is_empty() {
        check_degrees(exponents)?;
    }
    let prod = product(exponents, "planar_power_bound")?;
    Ok(prod.checked_mul(d as u64).ok_or(BoundsError::Overflow("planar_power_bound"))? - 1)
}

/// ⌈count / (q + 1)⌉
pub fn pointcount_gonality_bound(count: u64, q: u64) -> u64 {
    count.div_ceil(q + 1)
}

/// degree (g0 - 1) + 1
pub fn hurwitz_genus_lower(g0: u64, degree: u64) -> i64 {
    degree as i64 * (g0 as i64 - 1) + 1
}

/// Minimum of 2g - 2, g (with a rational point), ⌊(g + 3)/2⌋ (over an
/// algebraically closed field).
pub fn gonality_upper_bounds(g: u64, has_point: bool, algebraically_closed: bool) -> Result<u64, BoundsError> {
    if g < 2 {
        return Err(BoundsError::GenusOutOfDomain(g));
    }
    let mut best = 2 * g - 2;
    if has_point {
        best = best.min(g);
    }
    if algebraically_closed {
        best = best.min((g + 3) / 2);
    }
    Ok(best)
}

/// Largest d >= 0 with 2d < γ, i.e. ⌈γ/2⌉ - 1, clamped at 0.
pub fn frey_max_degree(gonality_lower: u64) -> u64 {
    gonality_lower.div_ceil(2).saturating_sub(1)
}

/// (γ_L - 1)^2
pub fn ql_bound(gonality_extension: u64) -> u64 {
    let g = gonality_extension.saturating_sub(1);
    g * g
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum BoundRule {
    Lazarsfeld { degrees: Vec<u32> },
    PlanarPower { d: u32, exponents: Vec<u32> },
    PointCount { count: u64, q: u64 },
    Canonical { genus: u64, has_point: bool, algebraically_closed: bool },
    /// Projection from a rational point of C_0 composed with φ_{n,0}:
    /// (d_1 - 1) d_2 ... d_{n+1}.
    CiProjection { degrees: Vec<u32> },
    /// Projection of a plane curve of degree D from one of its points.
    PlanarProjection { degree: u64 },
    /// Every level is P^1.
    ProjectiveLine,
}

impl BoundRule {
    pub fn evaluate(&self) -> Result<u64, BoundsError> {
        match self {
            BoundRule::Lazarsfeld { degrees } => lazarsfeld_bound(degrees),
            BoundRule::PlanarPower { d, exponents } => planar_power_bound(*d, exponents),
            BoundRule::PointCount { count, q } => Ok(pointcount_gonality_bound(*count, *q)),
            BoundRule::Canonical { genus, has_point, algebraically_closed } => {
                gonality_upper_bounds(*genus, *has_point, *algebraically_closed)
            }
            BoundRule::CiProjection { degrees } => {
                check_degrees(degrees)?;
                let rest = product(&degrees[1..], "ci_projection")?;
                rest.checked_mul(degrees[0] as u64 - 1).ok_or(BoundsError::Overflow("ci_projection"))
            }
            BoundRule::PlanarProjection { degree } => Ok(degree.saturating_sub(1).max(1)),
            BoundRule::ProjectiveLine => Ok(1),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BoundRule::Lazarsfeld { .. } => "lazarsfeld",
            BoundRule::PlanarPower { .. } => "planar_power",
            BoundRule::PointCount { .. } => "point_count",
            BoundRule::Canonical { .. } => "canonical",
            BoundRule::CiProjection { .. } => "ci_projection",
            BoundRule::PlanarProjection { .. } => "planar_projection",
            BoundRule::ProjectiveLine => "projective_line",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Lower,
    Upper,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundRecord {
    pub side: Side,
    #[serde(flatten)]
    pub rule: BoundRule,
    pub value: u64,
}

impl BoundRecord {
    pub fn new(side: Side, rule: BoundRule) -> Result<Self, BoundsError> {
        let value = rule.evaluate()?;
        Ok(Self { side, rule, value })
    }

    /// Re-derive the value from the stored inputs.
    pub fn reproducible(&self) -> bool {
        self.rule.evaluate().ok() == Some(self.value)
    }
}

impl std::fmt::Display for BoundRecord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let op = match self.side {
            Side::Lower => ">=",
            Side::Upper => "<=",
        };
        write!(f, "{}{op}{}", self.rule.name(), self.value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GonalityInterval {
    pub lower: u64,
    /// `None` is +∞.
    pub upper: Option<u64>,
    pub provenance: Vec<BoundRecord>,
}

impl GonalityInterval {
    pub fn unbounded() -> Self {
        Self { lower: 0, upper: None, provenance: Vec::new() }
    }

    pub fn add(&mut self, record: BoundRecord) {
        match record.side {
            Side::Lower => self.lower = self.lower.max(record.value),
            Side::Upper => self.upper = Some(self.upper.map_or(record.value, |u| u.min(record.value))),
        }
        self.provenance.push(record);
    }

    pub fn is_consistent(&self) -> bool {
        self.upper.is_none_or(|u| self.lower <= u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReportOptions {
    pub enumeration_cap: u128,
    /// Coordinate bound for the small rational point search.
    pub search_height: i64,
    /// Largest box scanned by the rational point search.
    pub search_cap: u64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self { enumeration_cap: DEFAULT_ENUMERATION_CAP, search_height: 2, search_cap: 1_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimeReport {
    pub prime: u64,
    pub count: u64,
    pub bound: u64,
    /// No singular point of the reduced level curve over F_p.
    pub smooth: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelReport {
    pub level: usize,
    pub degrees: Vec<u32>,
    pub genus: u64,
    /// Lazarsfeld (complete intersection) or planar-power bound.
    pub structural_bound: Option<u64>,
    pub primes: Vec<PrimeReport>,
    pub interval: GonalityInterval,
    pub frey_max_degree: u64,
    /// A small rational point on this level, if the search found one.
    pub rational_point: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TowerReport {
    pub tower: String,
    pub rows: Vec<LevelReport>,
    /// Best lower bound strictly increasing over the computed levels.
    pub monotone_divergence: bool,
}

impl TowerReport {
    pub fn assemble(tower: &TowerSpec, mut rows: Vec<LevelReport>) -> Self {
        rows.sort_by_key(|r| r.level);
        let monotone_divergence =
            rows.len() >= 2 && rows.windows(2).all(|w| w[0].interval.lower < w[1].interval.lower);
        Self { tower: tower.to_string(), rows, monotone_divergence }
    }
}

fn first_point(tower: &TowerSpec, n: usize, opts: &ReportOptions) -> Result<Option<RationalPoint>, BoundsError> {
    let curve = tower.level_equations(n)?;
    let mut h = opts.search_height;
    while h >= 1 {
        if let Some(pts) = search_rational_points(&curve, h, opts.search_cap) {
            return Ok(pts.into_iter().next());
        }
        h -= 1;
    }
    Ok(None)
}

/// One row of [`tower_report`].
pub fn level_report(tower: &TowerSpec, n: usize, primes: &[u64], opts: &ReportOptions) -> Result<LevelReport, BoundsError> {
    let mut interval = GonalityInterval::unbounded();
    if let TowerSpec::Genus0Dynamical(_) = tower {
        interval.add(BoundRecord::new(Side::Lower, BoundRule::ProjectiveLine)?);
        interval.add(BoundRecord::new(Side::Upper, BoundRule::ProjectiveLine)?);
        return Ok(LevelReport {
            level: n,
            degrees: tower.level_degrees(n)?,
            genus: 0,
            structural_bound: None,
            primes: Vec::new(),
            frey_max_degree: frey_max_degree(interval.lower),
            interval,
            rational_point: Some("[1:0]".into()),
        });
    }

    let curve = tower.level_equations(n)?;
    let degrees = curve.degrees();
    let point_here = first_point(tower, n, opts)?;
    let (genus, structural) = match tower {
        TowerSpec::CompleteIntersection(_) => {
            let rule = BoundRule::Lazarsfeld { degrees: degrees.clone() };
            let base_point = if n == 0 { point_here.clone() } else { first_point(tower, 0, opts)? };
            if base_point.is_some() {
                interval.add(BoundRecord::new(Side::Upper, BoundRule::CiProjection { degrees: degrees.clone() })?);
            }
            (ci_genus(&degrees)?, rule)
        }
        TowerSpec::PlanarPower { base, exponents } => {
            let prefix = match exponents {
                ExponentRule::Constant(a) => vec![*a; n],
                ExponentRule::Explicit(v) => v[..n].to_vec(),
            };
            let total = degrees[0] as u64;
            if point_here.is_some() {
                interval.add(BoundRecord::new(Side::Upper, BoundRule::PlanarProjection { degree: total })?);
            }
            (planar_genus(total), BoundRule::PlanarPower { d: base.degree(), exponents: prefix })
        }
        TowerSpec::Genus0Dynamical(_) => unreachable!(),
    };
    let structural = BoundRecord::new(Side::Lower, structural)?;
    let structural_value = structural.value;
    interval.add(structural);
    if genus >= 2 {
        let rule = BoundRule::Canonical { genus, has_point: point_here.is_some(), algebraically_closed: false };
        interval.add(BoundRecord::new(Side::Upper, rule)?);
    }

    let mut prime_rows = Vec::new();
    for &p in primes {
        let res = count_points(
            tower,
            n,
            p,
            &CountOptions { retain_cap: usize::MAX, enumeration_cap: opts.enumeration_cap },
        )?;
        let field = crate::algebra::PrimeField::new(p).map_err(TowerError::from)?;
        let pts = res.points.as_deref().unwrap_or_default();
        let smooth = singular_points(&curve, field, pts)?.is_empty();
        let rule = BoundRule::PointCount { count: res.count, q: p };
        let bound = rule.evaluate()?;
        if smooth {
            interval.add(BoundRecord::new(Side::Lower, rule)?);
        }
        prime_rows.push(PrimeReport { prime: p, count: res.count, bound, smooth });
    }

    Ok(LevelReport {
        level: n,
        degrees,
        genus,
        structural_bound: Some(structural_value),
        primes: prime_rows,
        frey_max_degree: frey_max_degree(interval.lower),
        interval,
        rational_point: point_here.map(|p| p.to_string()),
    })
}

/// Bounds for levels 0..=n_max.
pub fn tower_report(tower: &TowerSpec, n_max: usize, primes: &[u64], opts: &ReportOptions) -> Result<TowerReport, BoundsError> {
    let rows = (0..=n_max).map(|n| level_report(tower, n, primes, opts)).collect::<Result<Vec<_>, _>>()?;
    Ok(TowerReport::assemble(tower, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::towers::{fermat_tower, fibonacci_tower};

    #[test]
    fn genus_examples() {
        assert_eq!(ci_genus(&[2, 2, 2]).unwrap(), 5);
        assert_eq!(ci_genus(&[2, 2]).unwrap(), 1);
        assert_eq!(ci_genus(&[2]).unwrap(), 0);
        assert_eq!(ci_genus(&[3]).unwrap(), 1);
        assert_eq!(ci_genus(&[]), Err(BoundsError::EmptyDegrees));
        assert_eq!(ci_genus(&[2, 1]), Err(BoundsError::DegreeTooSmall(1)));
        assert_eq!(planar_genus(2), 0);
        assert_eq!(planar_genus(3), 1);
        assert_eq!(planar_genus(4), 3);
    }

    #[test]
    fn plane_curves_agree_with_single_hypersurface_ci() {
        for d in 2..20 {
            assert_eq!(ci_genus(&[d]).unwrap(), planar_genus(d as u64));
        }
    }

    #[test]
    fn lazarsfeld_examples() {
        assert_eq!(lazarsfeld_bound(&[2, 2, 2]).unwrap(), 4);
        assert_eq!(lazarsfeld_bound(&[2]).unwrap(), 1);
        assert_eq!(lazarsfeld_bound(&[4, 2, 3]).unwrap(), 12);
        assert_eq!(lazarsfeld_bound(&[2, 3, 4]).unwrap(), 12);
    }

    #[test]
    fn planar_power_examples() {
        assert_eq!(planar_power_bound(2, &[]).unwrap(), 1);
        assert_eq!(planar_power_bound(2, &[2]).unwrap(), 3);
        assert_eq!(planar_power_bound(2, &[2, 2]).unwrap(), 7);
    }

    #[test]
    fn small_formulas() {
        assert_eq!(pointcount_gonality_bound(4, 3), 1);
        assert_eq!(pointcount_gonality_bound(0, 5), 0);
        assert_eq!(pointcount_gonality_bound(25, 7), 4);
        assert_eq!(hurwitz_genus_lower(2, 3), 4);
        assert_eq!(hurwitz_genus_lower(1, 7), 1);
        assert_eq!(hurwitz_genus_lower(0, 5), -4);
        assert_eq!(gonality_upper_bounds(5, true, false).unwrap(), 5);
        assert_eq!(gonality_upper_bounds(2, false, false).unwrap(), 2);
        assert_eq!(gonality_upper_bounds(5, false, true).unwrap(), 4);
        assert_eq!(gonality_upper_bounds(1, true, true), Err(BoundsError::GenusOutOfDomain(1)));
        assert_eq!(frey_max_degree(4), 1);
        assert_eq!(frey_max_degree(5), 2);
        assert_eq!(frey_max_degree(0), 0);
        assert_eq!(ql_bound(3), 4);
    }

    #[test]
    fn fibonacci_report() {
        let r = tower_report(&fibonacci_tower(), 2, &[7], &ReportOptions::default()).unwrap();
        assert_eq!(r.rows.iter().map(|x| x.genus).collect::<Vec<_>>(), vec![0, 1, 5]);
        assert_eq!(r.rows.iter().map(|x| x.structural_bound.unwrap()).collect::<Vec<_>>(), vec![1, 2, 4]);
        let top = &r.rows[2].interval;
        assert_eq!((top.lower, top.upper), (4, Some(4)));
        assert!(r.monotone_divergence);
        for row in &r.rows {
            assert!(row.interval.is_consistent());
            assert!(row.interval.provenance.iter().all(|b| b.reproducible()));
            assert!(row.primes[0].smooth);
        }
        assert_eq!(r.rows[0].primes[0].count, 8);
        assert_eq!(r.rows[2].frey_max_degree, 1);
    }

    #[test]
    fn planar_report() {
        let r = tower_report(&fermat_tower(2).unwrap(), 3, &[], &ReportOptions::default()).unwrap();
        assert_eq!(r.rows.iter().map(|x| x.structural_bound.unwrap()).collect::<Vec<_>>(), vec![1, 3, 7, 15]);
        assert!(r.rows.iter().all(|x| x.primes.is_empty()));
        // [1:0:1] lies on every level, so the projection bound closes the interval
        assert!(r.rows.iter().all(|x| x.interval.upper == x.structural_bound));
    }

    #[test]
    fn bad_primes_do_not_feed_the_lower_bound() {
        let row = level_report(&fibonacci_tower(), 1, &[2, 5], &ReportOptions::default()).unwrap();
        assert!(!row.primes[0].smooth);
        assert!(row.primes[1].smooth);
        assert!(row.interval.provenance.iter().all(|b| b.rule != BoundRule::PointCount { count: row.primes[0].count, q: 2 }));
    }

    #[test]
    fn dynamical_report() {
        let r = tower_report(&TowerSpec::named("power:3").unwrap(), 2, &[5], &ReportOptions::default()).unwrap();
        assert!(r.rows.iter().all(|x| x.interval.lower == 1 && x.interval.upper == Some(1)));
        assert!(!r.monotone_divergence);
    }
}
