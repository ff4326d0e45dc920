//! Tower specifications and their levels: defining equations of C_n and the
//! structure maps C_n -> C_{n-1}.
//!
//! Three families are supported. Complete-intersection towers have level n
//! cut out in P^{n+2} by f_1, ..., f_{n+1} (f_k in k + 2 variables) and
//! forget the last coordinate. Planar power towers keep every level in P^2
//! and map by coordinatewise powers. Genus-0 dynamical towers have P^1 at
//! every level and map by rational functions.

use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{
    enumerate_projective, evaluate, AlgebraError, FpPoint, HomogeneousPolynomial, PrimeField, ProjectivePoint,
    RationalPoint, ReducedPolynomial, Scalar,
};
use crate::dynamics::{DynamicsError, MapSequence, RationalMap};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TowerError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error("f_{index} has degree {degree}; tower equations need degree > 1")]
    DegreeTooSmall { index: usize, degree: u32 },
    #[error("f_{index} has {found} variables, expected {expected}")]
    VariableCount { index: usize, expected: usize, found: usize },
    #[error("malformed exponent sequence: {0}")]
    MalformedExponents(String),
    #[error("dynamical towers have no ambient equations (every level is P^1)")]
    NoAmbientEquations,
    #[error("level {level} needs {needed} generators, only {available} given")]
    LevelOutOfRange { level: usize, needed: usize, available: usize },
    #[error("point {point} is not on C_{level}: equation {index} ({equation}) does not vanish")]
    NotOnCurve { level: usize, index: usize, equation: String, point: String },
    #[error("forgetting the last coordinate of {0} gives the zero vector")]
    IndeterminateProjection(String),
    #[error("structure maps start at level 1 (got level {0})")]
    NoMapAtLevel(usize),
    #[error("point {point} has {found} coordinates, C_{level} lives in P^{dim}")]
    AmbientMismatch { level: usize, dim: usize, found: usize, point: String },
    #[error("not a prime: {0}")]
    NotPrime(u64),
    #[error("cannot read tower description: {0}")]
    Description(String),
}

/// How the complete-intersection generators f_1, f_2, ... are produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CiRule {
    /// A finite list; f_k must have k + 2 variables.
    Explicit(Vec<HomogeneousPolynomial>),
    /// f_{k+1} = f(X_k, X_{k+1}, X_{k+2}) for a ternary form f.
    Shift(HomogeneousPolynomial),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExponentRule {
    Constant(u32),
    Explicit(Vec<u32>),
}

impl ExponentRule {
    /// a_n, for n >= 1.
    pub fn get(&self, n: usize) -> Option<u32> {
        match self {
            ExponentRule::Constant(a) => Some(*a),
            ExponentRule::Explicit(v) => v.get(n - 1).copied(),
        }
    }

    /// a_1 ... a_n
    pub fn prefix(&self, n: usize) -> Option<Vec<u32>> {
        (1..=n).map(|k| self.get(k)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TowerSpec {
    CompleteIntersection(CiRule),
    PlanarPower { base: HomogeneousPolynomial, exponents: ExponentRule },
    Genus0Dynamical(MapSequence),
}

/// Level n of a tower with ambient equations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelCurve {
    pub level: usize,
    pub ambient_dim: usize,
    pub equations: Vec<HomogeneousPolynomial>,
}

impl LevelCurve {
    pub fn degrees(&self) -> Vec<u32> {
        self.equations.iter().map(|f| f.degree()).collect()
    }

    /// Index of the first equation that does not vanish at `p`, if any.
    pub fn first_nonvanishing<F: Scalar>(&self, p: &ProjectivePoint<F>) -> Result<Option<usize>, TowerError> {
        if p.coords().len() != self.ambient_dim + 1 {
            return Err(TowerError::AmbientMismatch {
                level: self.level,
                dim: self.ambient_dim,
                found: p.coords().len(),
                point: p.to_string(),
            });
        }
        for (i, f) in self.equations.iter().enumerate() {
            if !evaluate(f, p)?.is_zero_scalar() {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    pub fn contains<F: Scalar>(&self, p: &ProjectivePoint<F>) -> Result<bool, TowerError> {
        Ok(self.first_nonvanishing(p)?.is_none())
    }

    fn require_member<F: Scalar>(&self, p: &ProjectivePoint<F>) -> Result<(), TowerError> {
        match self.first_nonvanishing(p)? {
            None => Ok(()),
            Some(i) => Err(TowerError::NotOnCurve {
                level: self.level,
                index: i,
                equation: self.equations[i].to_string(),
                point: p.to_string(),
            }),
        }
    }

    pub fn reduce(&self, field: PrimeField) -> Result<Vec<ReducedPolynomial>, TowerError> {
        Ok(self.equations.iter().map(|f| f.reduce(field)).collect::<Result<_, _>>()?)
    }
}

fn check_degree(index: usize, f: &HomogeneousPolynomial) -> Result<(), TowerError> {
    if f.degree() < 2 {
        return Err(TowerError::DegreeTooSmall { index, degree: f.degree() });
    }
    Ok(())
}

/// The tower with f_0 = X0^2 + X1^2 - X2^2 and f_n = f_0(X_n, X_{n+1}, X_{n+2}).
pub fn fibonacci_tower() -> TowerSpec {
    let f0 = HomogeneousPolynomial::parse("X0^2 + X1^2 - X2^2", Some(3)).expect("valid form");
    TowerSpec::CompleteIntersection(CiRule::Shift(f0))
}

/// The p-Fermat tower: X0^{p^{n+1}} + X1^{p^{n+1}} = X2^{p^{n+1}} at level n,
/// mapped down by [X0^p : X1^p : X2^p].
pub fn fermat_tower(p: u64) -> Result<TowerSpec, TowerError> {
    PrimeField::new(p).map_err(|_| TowerError::NotPrime(p))?;
    let e = u32::try_from(p).map_err(|_| TowerError::MalformedExponents(format!("exponent {p} too large")))?;
    let base = HomogeneousPolynomial::new(
        3,
        [
            (vec![e, 0, 0], BigInt::from(1)),
            (vec![0, e, 0], BigInt::from(1)),
            (vec![0, 0, e], BigInt::from(-1)),
        ],
    )?;
    Ok(TowerSpec::PlanarPower { base, exponents: ExponentRule::Constant(e) })
}

pub fn planar_power_tower(base: HomogeneousPolynomial, exponents: ExponentRule) -> Result<TowerSpec, TowerError> {
    if base.num_vars() != 3 {
        return Err(TowerError::VariableCount { index: 0, expected: 3, found: base.num_vars() });
    }
    check_degree(0, &base)?;
    match &exponents {
        ExponentRule::Constant(a) if *a < 2 => {
            return Err(TowerError::MalformedExponents(format!("constant exponent {a} < 2")))
        }
        ExponentRule::Explicit(v) => {
            if let Some((i, a)) = v.iter().enumerate().find(|(_, &a)| a < 2) {
                return Err(TowerError::MalformedExponents(format!("a_{} = {a} < 2", i + 1)));
            }
        }
        _ => {}
    }
    Ok(TowerSpec::PlanarPower { base, exponents })
}

/// Complete-intersection tower from an explicit list f_1, ..., f_N.
pub fn complete_intersection_tower(generators: Vec<HomogeneousPolynomial>) -> Result<TowerSpec, TowerError> {
    if generators.is_empty() {
        return Err(TowerError::LevelOutOfRange { level: 0, needed: 1, available: 0 });
    }
    for (i, f) in generators.iter().enumerate() {
        let index = i + 1;
        check_degree(index, f)?;
        if f.num_vars() != index + 2 {
            return Err(TowerError::VariableCount { index, expected: index + 2, found: f.num_vars() });
        }
    }
    Ok(TowerSpec::CompleteIntersection(CiRule::Explicit(generators)))
}

/// Complete-intersection tower generated by shifting one ternary form.
pub fn shift_tower(f: HomogeneousPolynomial) -> Result<TowerSpec, TowerError> {
    check_degree(1, &f)?;
    if f.num_vars() != 3 {
        return Err(TowerError::VariableCount { index: 1, expected: 3, found: f.num_vars() });
    }
    Ok(TowerSpec::CompleteIntersection(CiRule::Shift(f)))
}

pub fn dynamical_tower(maps: MapSequence) -> TowerSpec {
    TowerSpec::Genus0Dynamical(maps)
}

impl TowerSpec {
    /// Built-in names: `fibonacci`, `fermat:<p>`, `power:<d>` (the constant
    /// dynamical tower of x^d).
    pub fn named(name: &str) -> Result<TowerSpec, TowerError> {
        let name = name.trim();
        if name == "fibonacci" {
            return Ok(fibonacci_tower());
        }
        if let Some(p) = name.strip_prefix("fermat:") {
            let p: u64 = p.trim().parse().map_err(|_| TowerError::Description(format!("bad prime in '{name}'")))?;
            return fermat_tower(p);
        }
        if let Some(d) = name.strip_prefix("power:") {
            let d: usize = d.trim().parse().map_err(|_| TowerError::Description(format!("bad degree in '{name}'")))?;
            return Ok(dynamical_tower(MapSequence::Constant(RationalMap::power(d)?)));
        }
        Err(TowerError::Description(format!("unknown tower '{name}'")))
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            TowerSpec::CompleteIntersection(_) => "complete-intersection",
            TowerSpec::PlanarPower { .. } => "planar-power",
            TowerSpec::Genus0Dynamical(_) => "genus0-dynamical",
        }
    }

    /// Ambient projective dimension of level n.
    pub fn ambient_dim(&self, n: usize) -> usize {
        match self {
            TowerSpec::CompleteIntersection(_) => n + 2,
            TowerSpec::PlanarPower { .. } => 2,
            TowerSpec::Genus0Dynamical(_) => 1,
        }
    }

    /// Defining equations of C_n.
    pub fn level_equations(&self, n: usize) -> Result<LevelCurve, TowerError> {
        let ambient = self.ambient_dim(n);
        let equations = match self {
            TowerSpec::CompleteIntersection(CiRule::Shift(f)) => {
                (0..=n).map(|k| f.rename_vars(&[k, k + 1, k + 2], ambient + 1)).collect::<Result<Vec<_>, _>>()?
            }
            TowerSpec::CompleteIntersection(CiRule::Explicit(list)) => {
                if list.len() < n + 1 {
                    return Err(TowerError::LevelOutOfRange { level: n, needed: n + 1, available: list.len() });
                }
                list[..=n].iter().map(|f| f.with_num_vars(ambient + 1)).collect::<Result<Vec<_>, _>>()?
            }
            TowerSpec::PlanarPower { base, exponents } => {
                let prefix = exponents.prefix(n).ok_or_else(|| {
                    TowerError::MalformedExponents(format!("level {n} needs {n} exponents"))
                })?;
                let total: u32 = prefix.iter().product();
                vec![base.power_substitute(total)]
            }
            TowerSpec::Genus0Dynamical(_) => return Err(TowerError::NoAmbientEquations),
        };
        Ok(LevelCurve { level: n, ambient_dim: ambient, equations })
    }

    /// φ_n : C_n -> C_{n-1} at `point`, which must lie on C_n.
    pub fn level_map<F: Scalar>(&self, n: usize, point: &ProjectivePoint<F>) -> Result<ProjectivePoint<F>, TowerError> {
        if n == 0 {
            return Err(TowerError::NoMapAtLevel(0));
        }
        if let TowerSpec::Genus0Dynamical(seq) = self {
            return Ok(seq.level_map(n)?.apply_scalar(point)?);
        }
        let here = self.level_equations(n)?;
        here.require_member(point)?;
        let image = match self {
            TowerSpec::CompleteIntersection(_) => point
                .forget_last()
                .map_err(|_| TowerError::IndeterminateProjection(point.to_string()))?,
            TowerSpec::PlanarPower { exponents, .. } => {
                let a = exponents.get(n).expect("level equations checked the prefix");
                ProjectivePoint::new(point.coords().iter().map(|c| c.pow_u32(a)).collect())?
            }
            TowerSpec::Genus0Dynamical(_) => unreachable!(),
        };
        let below = self.level_equations(n - 1)?;
        assert!(
            below.contains(&image)?,
            "image {image} of {point} under φ_{n} is not on C_{}",
            n - 1
        );
        Ok(image)
    }

    /// φ_{m,n} = φ_{n+1} ∘ ... ∘ φ_m : C_m -> C_n (identity when m = n).
    pub fn compose_maps<F: Scalar>(&self, m: usize, n: usize, point: &ProjectivePoint<F>) -> Result<ProjectivePoint<F>, TowerError> {
        assert!(m >= n, "φ_{{m,n}} needs m >= n");
        let mut p = point.clone();
        for k in (n + 1..=m).rev() {
            p = self.level_map(k, &p)?;
        }
        Ok(p)
    }

    /// Degrees of the level-n equations, or the map degrees f_1..f_n for a
    /// dynamical tower.
    pub fn level_degrees(&self, n: usize) -> Result<Vec<u32>, TowerError> {
        match self {
            TowerSpec::Genus0Dynamical(seq) => {
                (1..=n).map(|k| Ok(seq.level_map(k)?.degree() as u32)).collect()
            }
            _ => Ok(self.level_equations(n)?.degrees()),
        }
    }
}

/// Points of `points` where the Jacobian of the reduced equations drops
/// rank (fewer than #equations independent rows). Empty means the reduced
/// curve is smooth at every listed point.
pub fn singular_points(curve: &LevelCurve, field: PrimeField, points: &[FpPoint]) -> Result<Vec<FpPoint>, TowerError> {
    let reduced = curve.reduce(field)?;
    let mut out = Vec::new();
    for p in points {
        let x = p.values();
        let rows: Vec<Vec<u64>> = reduced.iter().map(|f| f.gradient_raw(&x)).collect();
        if rank_mod_p(rows, field) < reduced.len() {
            out.push(p.clone());
        }
    }
    Ok(out)
}

/// Smoothness diagnostic over every F_p-point of the reduced level curve.
pub fn smoothness_spot_check(curve: &LevelCurve, field: PrimeField, cap: u128) -> Result<Vec<FpPoint>, TowerError> {
    let reduced = curve.reduce(field)?;
    let on_curve: Vec<FpPoint> = enumerate_projective(field, curve.ambient_dim, cap)?
        .filter(|p| {
            let x = p.values();
            reduced.iter().all(|f| f.eval_raw(&x) == 0)
        })
        .collect();
    singular_points(curve, field, &on_curve)
}

fn rank_mod_p(mut rows: Vec<Vec<u64>>, field: PrimeField) -> usize {
    let p = field.modulus();
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else { continue };
        rows.swap(rank, piv);
        let inv = field.inv_raw(rows[rank][col]).expect("pivot is nonzero");
        for r in 0..rows.len() {
            if r != rank && rows[r][col] != 0 {
                let factor = field.mul_raw(rows[r][col], inv);
                for c in col..ncols {
                    let sub = field.mul_raw(factor, rows[rank][c]);
                    rows[r][c] = (rows[r][c] + p - sub) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rational points of C_n with integer coordinates bounded by `bound` in
/// absolute value. Returns `None` when the box has more than `cap` vectors.
pub fn search_rational_points(curve: &LevelCurve, bound: i64, cap: u64) -> Option<Vec<RationalPoint>> {
    let width = (2 * bound + 1) as u64;
    let dim = curve.ambient_dim + 1;
    let total = width.checked_pow(dim as u32)?;
    if total > cap {
        return None;
    }
    let mut out = Vec::new();
    let mut v = vec![-bound; dim];
    loop {
        let coords: Vec<BigInt> = v.iter().map(|&c| BigInt::from(c)).collect();
        if BigInt::is_normalized(&coords) {
            let p = RationalPoint::new_normalized(coords).expect("checked normalized");
            if curve.contains(&p).unwrap_or(false) {
                out.push(p);
            }
        }
        let mut i = dim;
        loop {
            if i == 0 {
                return Some(out);
            }
            i -= 1;
            v[i] += 1;
            if v[i] <= bound {
                break;
            }
            v[i] = -bound;
        }
    }
}

/// Tower description file, one TOML table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct TowerFile {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    shift: Option<bool>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    polynomials: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    base: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    constant_exponent: Option<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    exponents: Vec<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    maps: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    constant: Option<bool>,
}

impl TowerSpec {
    /// Serialize to the TOML description format.
    pub fn to_toml(&self) -> String {
        let mut file = TowerFile { kind: self.kind_name().to_string(), ..Default::default() };
        match self {
            TowerSpec::CompleteIntersection(CiRule::Shift(f)) => {
                file.shift = Some(true);
                file.polynomials = vec![f.to_string()];
            }
            TowerSpec::CompleteIntersection(CiRule::Explicit(list)) => {
                file.shift = Some(false);
                file.polynomials = list.iter().map(|f| f.to_string()).collect();
            }
            TowerSpec::PlanarPower { base, exponents } => {
                file.base = Some(base.to_string());
                match exponents {
                    ExponentRule::Constant(a) => file.constant_exponent = Some(*a),
                    ExponentRule::Explicit(v) => file.exponents = v.clone(),
                }
            }
            TowerSpec::Genus0Dynamical(seq) => {
                file.constant = Some(matches!(seq, MapSequence::Constant(_)));
                file.maps = seq.maps().iter().map(|m| m.to_string()).collect();
            }
        }
        toml::to_string(&file).expect("tower description serializes")
    }

    pub fn from_toml(text: &str) -> Result<TowerSpec, TowerError> {
        let file: TowerFile = toml::from_str(text).map_err(|e| TowerError::Description(e.to_string()))?;
        match file.kind.as_str() {
            "complete-intersection" => {
                if file.shift.unwrap_or(false) {
                    let [f] = file.polynomials.as_slice() else {
                        return Err(TowerError::Description("shift rule takes exactly one polynomial".into()));
                    };
                    shift_tower(HomogeneousPolynomial::parse(f, Some(3))?)
                } else {
                    let polys = file
                        .polynomials
                        .iter()
                        .enumerate()
                        .map(|(i, s)| HomogeneousPolynomial::parse(s, Some(i + 3)))
                        .collect::<Result<Vec<_>, _>>()?;
                    complete_intersection_tower(polys)
                }
            }
            "planar-power" => {
                let base = file.base.ok_or_else(|| TowerError::Description("planar-power needs 'base'".into()))?;
                let base = HomogeneousPolynomial::parse(&base, Some(3))?;
                let rule = match (file.constant_exponent, file.exponents.is_empty()) {
                    (Some(a), true) => ExponentRule::Constant(a),
                    (None, _) => ExponentRule::Explicit(file.exponents),
                    (Some(_), false) => {
                        return Err(TowerError::Description("give either 'constant_exponent' or 'exponents'".into()))
                    }
                };
                planar_power_tower(base, rule)
            }
            "genus0-dynamical" => {
                let maps = file.maps.iter().map(|s| RationalMap::parse(s)).collect::<Result<Vec<_>, _>>()?;
                if file.constant.unwrap_or(false) {
                    let [m] = <[RationalMap; 1]>::try_from(maps)
                        .map_err(|_| TowerError::Description("constant tower takes exactly one map".into()))?;
                    Ok(dynamical_tower(MapSequence::Constant(m)))
                } else if maps.is_empty() {
                    Err(TowerError::Description("dynamical tower needs at least one map".into()))
                } else {
                    Ok(dynamical_tower(MapSequence::Explicit(maps)))
                }
            }
            other => Err(TowerError::Description(format!("unknown kind '{other}'"))),
        }
    }
}

impl fmt::Display for TowerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TowerSpec::CompleteIntersection(CiRule::Shift(g)) => write!(f, "complete intersection, shift of {g}"),
            TowerSpec::CompleteIntersection(CiRule::Explicit(l)) => {
                write!(f, "complete intersection, {} generators", l.len())
            }
            TowerSpec::PlanarPower { base, exponents } => match exponents {
                ExponentRule::Constant(a) => write!(f, "planar power tower of {base}, a_n = {a}"),
                ExponentRule::Explicit(v) => write!(f, "planar power tower of {base}, a = {v:?}"),
            },
            TowerSpec::Genus0Dynamical(seq) => match seq {
                MapSequence::Constant(m) => write!(f, "dynamical tower of {m}"),
                MapSequence::Explicit(v) => write!(f, "dynamical tower with {} maps", v.len()),
            },
        }
    }
}
