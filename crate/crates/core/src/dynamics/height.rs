use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use super::{DynamicsError, RationalMap, DEFAULT_MAX_BITS, DEFAULT_ORBIT_CAP};
use crate::algebra::RationalPoint;

/// Natural log of |n| for arbitrarily large integers (`-inf` at zero).
pub fn big_ln(n: &BigInt) -> f64 {
    let n = n.abs();
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().map(f64::ln).unwrap_or(f64::NEG_INFINITY);
    }
    // keep the top 64 bits and account for the shift
    let shift = bits - 64;
    let top = (&n >> shift).to_f64().expect("64-bit value");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

fn point_bits(p: &RationalPoint) -> u64 {
    p.coords().iter().map(|c| c.bits()).max().unwrap_or(0)
}

/// Logarithmic height `log max(|a|, |b|)` of `[a:b]` in lowest terms.
pub fn naive_height(p: &RationalPoint) -> f64 {
    p.coords().iter().map(big_ln).fold(f64::NEG_INFINITY, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeightConfig {
    /// Stop once two successive estimates differ by less than this.
    pub tol: f64,
    /// Largest N for the estimate h(f^N P) / d^N.
    pub max_iterations: usize,
    /// Coordinate size budget, in bits.
    pub max_bits: u64,
    /// Orbit length scanned for an exact repeat.
    pub orbit_cap: usize,
}

impl Default for HeightConfig {
    fn default() -> Self {
        Self { tol: 1e-10, max_iterations: 64, max_bits: DEFAULT_MAX_BITS, orbit_cap: DEFAULT_ORBIT_CAP }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeightEstimate {
    pub value: f64,
    /// N of the returned estimate h(f^N P)/d^N.
    pub iterations: usize,
    /// Successive estimates agreed to within `tol`.
    pub converged: bool,
    /// An exact repeat was found in the orbit; `value` is then exactly 0.
    pub preperiodic: bool,
}

/// Canonical height of `p` for `f`, estimated as lim h(f^N P)/d^N.
///
/// The orbit is first scanned for an exact repeat (up to `orbit_cap` steps
/// or the bit budget); a preperiodic point gets exactly 0. Otherwise the
/// estimates are walked until successive values differ by less than `tol`.
/// Running past the bit budget before that is an error carrying the last
/// estimate.
pub fn canonical_height(f: &RationalMap, p: &RationalPoint, cfg: &HeightConfig) -> Result<HeightEstimate, DynamicsError> {
    let d = f.degree() as f64;
    let mut orbit = vec![p.clone()];
    let mut seen: HashMap<RationalPoint, usize> = HashMap::from([(p.clone(), 0)]);
    let steps = cfg.orbit_cap.max(cfg.max_iterations);
    let mut overflow = None;
    for _ in 0..steps {
        let next = f.apply(orbit.last().expect("orbit is non-empty"))?;
        let bits = point_bits(&next);
        if bits > cfg.max_bits {
            overflow = Some(bits);
            break;
        }
        if seen.contains_key(&next) {
            return Ok(HeightEstimate { value: 0.0, iterations: orbit.len(), converged: true, preperiodic: true });
        }
        seen.insert(next.clone(), orbit.len());
        orbit.push(next);
    }

    let mut prev = naive_height(&orbit[0]);
    let mut scale = 1.0;
    let last = orbit.len().min(cfg.max_iterations + 1);
    for (k, q) in orbit.iter().enumerate().take(last).skip(1) {
        scale *= d;
        let est = naive_height(q) / scale;
        if (est - prev).abs() < cfg.tol {
            return Ok(HeightEstimate { value: est, iterations: k, converged: true, preperiodic: false });
        }
        prev = est;
    }
    let iterations = last - 1;
    match overflow {
        Some(bits) if iterations < cfg.max_iterations => {
            Err(DynamicsError::PrecisionExceeded { bits, cap: cfg.max_bits, partial: Some(prev) })
        }
        _ => Ok(HeightEstimate { value: prev, iterations, converged: false, preperiodic: false }),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum OrbitKind {
    Periodic { period: usize },
    Preperiodic { tail: usize, period: usize },
    /// No repeat seen; `height` is the naive height where the scan stopped.
    Escaping { height: f64, steps: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitClassification {
    pub kind: OrbitKind,
    pub orbit_prefix: Vec<RationalPoint>,
}

impl OrbitClassification {
    pub fn is_preperiodic(&self) -> bool {
        !matches!(self.kind, OrbitKind::Escaping { .. })
    }
}

/// Exact cycle detection by hashing normalized orbit points.
///
/// Stops as escaping once the naive height passes `height_cap` or after
/// `orbit_cap` steps without a repeat.
pub fn classify_orbit(f: &RationalMap, p: &RationalPoint, orbit_cap: usize, height_cap: f64) -> Result<OrbitClassification, DynamicsError> {
    let mut orbit = vec![p.clone()];
    let mut seen: HashMap<RationalPoint, usize> = HashMap::from([(p.clone(), 0)]);
    loop {
        let cur = orbit.last().expect("orbit is non-empty");
        let h = naive_height(cur);
        if h > height_cap || orbit.len() > orbit_cap {
            let steps = orbit.len() - 1;
            return Ok(OrbitClassification { kind: OrbitKind::Escaping { height: h, steps }, orbit_prefix: orbit });
        }
        let next = f.apply(cur)?;
        if let Some(&first) = seen.get(&next) {
            let period = orbit.len() - first;
            let kind = if first == 0 { OrbitKind::Periodic { period } } else { OrbitKind::Preperiodic { tail: first, period } };
            return Ok(OrbitClassification { kind, orbit_prefix: orbit });
        }
        seen.insert(next.clone(), orbit.len());
        orbit.push(next);
    }
}
