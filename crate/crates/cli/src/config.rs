//! Command-line flags, the optional TOML config file and their merge.
//!
//! Flags win over the file; the file wins over built-in defaults.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use towerlab_core::algebra::{is_prime, DEFAULT_ENUMERATION_CAP};
use towerlab_core::dynamics::{parse_p1, MapSequence, RationalMap, DEFAULT_MAX_BITS, DEFAULT_ORBIT_CAP};
use towerlab_core::towers::TowerSpec;

use crate::error::{usage, CliError};
use crate::report::Format;

#[derive(Debug, Parser)]
#[command(name = "towerlab", version, about = "Towers of curves: point counts, gonality bounds, dynamics and graph spectra")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Default, Args)]
pub struct GlobalArgs {
    /// Output format [default: table]
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// TOML file with defaults for any flag
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Largest P^N(F_p) enumerated, in points
    #[arg(long = "cap-enum", global = true)]
    pub cap_enum: Option<u128>,
    /// Coordinate size budget for exact dynamics, in bits
    #[arg(long = "cap-bits", global = true)]
    pub cap_bits: Option<u64>,
    /// Largest matrix handed to the eigensolver
    #[arg(long = "cap-dim", global = true)]
    pub cap_dim: Option<usize>,
    /// Convergence tolerance (height iteration, DSC slack)
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Debug, Default, Args)]
pub struct TowerArgs {
    /// fibonacci, fermat:<p>, power:<d>, or a tower TOML file
    #[arg(long)]
    pub tower: Option<String>,
    /// Level range A..B (inclusive) or a single level
    #[arg(long)]
    pub levels: Option<String>,
    /// Comma-separated primes
    #[arg(long)]
    pub primes: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count F_p-points of tower levels
    Count(TowerArgs),
    /// Gonality bound table with provenance
    Bounds(TowerArgs),
    /// Image chain D_n ⊇ D_{n+1} ⊇ ... of a level in F_p-points
    Chain {
        #[command(flatten)]
        tower: TowerArgs,
        /// Highest level m of the chain
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Rational dynamics on P^1
    #[command(subcommand)]
    Dynamics(DynamicsCommand),
    /// Laplacian spectra of Cayley and Schreier graphs
    #[command(subcommand)]
    Spectra(SpectraCommand),
}

#[derive(Debug, Subcommand)]
pub enum DynamicsCommand {
    /// Rational periodic points of period <= max-period
    Periodic {
        #[arg(long)]
        map: Option<String>,
        #[arg(long = "max-period")]
        max_period: Option<usize>,
    },
    /// Orbit type of a point
    Classify {
        #[arg(long)]
        map: Option<String>,
        #[arg(long)]
        point: Option<String>,
        /// Orbit steps scanned for a repeat
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Canonical height estimate
    Height {
        #[arg(long)]
        map: Option<String>,
        #[arg(long)]
        point: Option<String>,
        /// Largest iteration count N
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Rational preimage tree through a map sequence
    Preimages {
        /// Comma-separated maps f_1, f_2, ...
        #[arg(long)]
        maps: Option<String>,
        /// A single map used at every level
        #[arg(long)]
        map: Option<String>,
        #[arg(long)]
        point: Option<String>,
        #[arg(long)]
        depth: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
pub enum SpectraCommand {
    /// Laplacian spectrum of the n-cycle against the closed form
    Cycle {
        #[arg(long)]
        n: usize,
    },
    /// Schreier graph of permutations given as images, e.g. "1 2 0; 1 0 2", or a file
    Schreier {
        #[arg(long)]
        perms: String,
        /// The generator list is already closed under inverses
        #[arg(long)]
        symmetric: bool,
    },
    /// Cayley graph of SL_2(Z/m)
    CayleySl2 {
        #[arg(long)]
        m: u64,
        /// Matrices a,b,c,d separated by ';' [default: the unipotent pair]
        #[arg(long)]
        gens: Option<String>,
    },
    /// λ₁·|V| along a family
    Trend {
        /// cycle, zmod:<s1>,<s2>,... or sl2
        #[arg(long)]
        family: String,
        /// Sizes (moduli for sl2); "a,b,...,z" expands a progression
        #[arg(long)]
        sizes: String,
        /// Also run the expander test λ₁ ≥ c
        #[arg(long)]
        expander: Option<f64>,
    },
    /// λ₁ ≥ 1/(|S| diam²) on a Cayley graph
    Dsc {
        /// zmod:<n>[:<s1>,<s2>,...], cycle:<n> or sl2:<m>
        #[arg(long)]
        group: String,
    },
}

/// Keys mirror the long flag names.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub tower: Option<String>,
    pub levels: Option<String>,
    pub primes: Option<Vec<u64>>,
    pub map: Option<String>,
    pub maps: Option<Vec<String>>,
    pub point: Option<String>,
    pub max_period: Option<usize>,
    pub depth: Option<usize>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub cap_enum: Option<u128>,
    pub cap_bits: Option<u64>,
    pub cap_dim: Option<usize>,
    pub tol: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| usage(format!("bad config {}: {e}", path.display())))
    }
}

/// Settings shared by every command, after the merge.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub format: Format,
    pub out: Option<PathBuf>,
    pub cap_enum: u128,
    pub cap_bits: u64,
    pub cap_dim: usize,
    pub tol: Option<f64>,
}

pub const DEFAULT_CAP_DIM: usize = 4096;

impl Settings {
    pub fn resolve(g: &GlobalArgs, file: &FileConfig) -> Result<Self, CliError> {
        let s = Settings {
            format: g.format.or(file.format).unwrap_or(Format::Table),
            out: g.out.clone().or_else(|| file.out.clone()),
            cap_enum: g.cap_enum.or(file.cap_enum).unwrap_or(DEFAULT_ENUMERATION_CAP),
            cap_bits: g.cap_bits.or(file.cap_bits).unwrap_or(DEFAULT_MAX_BITS),
            cap_dim: g.cap_dim.or(file.cap_dim).unwrap_or(DEFAULT_CAP_DIM),
            tol: g.tol.or(file.tol),
        };
        if s.cap_enum == 0 || s.cap_bits == 0 || s.cap_dim == 0 {
            return Err(usage("caps must be positive"));
        }
        if let Some(t) = s.tol {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(usage(format!("tolerance must be a non-negative number, got {t}")));
            }
        }
        Ok(s)
    }
}

/// A tower by name, or a TOML description when the value names a file.
pub fn load_tower(source: &str) -> Result<TowerSpec, CliError> {
    let path = Path::new(source);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {source}: {e}")))?;
        return Ok(TowerSpec::from_toml(&text)?);
    }
    Ok(TowerSpec::named(source)?)
}

/// `A..B` or `A..=B` (both inclusive) or `A`.
pub fn parse_levels(text: &str) -> Result<(usize, usize), CliError> {
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| usage(format!("bad level range: {text}")));
    let (a, b) = match text.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let a = num(text)?;
            (a, a)
        }
    };
    if a > b {
        return Err(usage(format!("empty level range: {text}")));
    }
    Ok((a, b))
}

pub fn parse_primes(text: &str) -> Result<Vec<u64>, CliError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let primes = text
        .split(',')
        .map(|s| s.trim().parse::<u64>().map_err(|_| usage(format!("not a number: {s}"))))
        .collect::<Result<Vec<_>, _>>()?;
    check_primes(&primes)?;
    Ok(primes)
}

pub fn check_primes(primes: &[u64]) -> Result<(), CliError> {
    match primes.iter().find(|&&p| !is_prime(p)) {
        Some(p) => Err(usage(format!("{p} is not prime"))),
        None => Ok(()),
    }
}

/// Tower, level range and primes from flags with config fallbacks.
pub struct TowerInputs {
    pub tower: TowerSpec,
    pub levels: Option<(usize, usize)>,
    pub primes: Option<Vec<u64>>,
}

pub fn tower_inputs(args: &TowerArgs, file: &FileConfig) -> Result<TowerInputs, CliError> {
    let source = args.tower.as_deref().or(file.tower.as_deref()).ok_or_else(|| usage("--tower is required"))?;
    let tower = load_tower(source)?;
    let levels = args.levels.as_deref().or(file.levels.as_deref()).map(parse_levels).transpose()?;
    let primes = match (&args.primes, &file.primes) {
        (Some(text), _) => Some(parse_primes(text)?),
        (None, Some(list)) => {
            check_primes(list)?;
            Some(list.clone())
        }
        (None, None) => None,
    };
    Ok(TowerInputs { tower, levels, primes })
}

pub fn parse_map(text: &str) -> Result<RationalMap, CliError> {
    Ok(RationalMap::parse(text)?)
}

pub fn map_from(flag: &Option<String>, file: &FileConfig) -> Result<RationalMap, CliError> {
    let text = flag.as_deref().or(file.map.as_deref()).ok_or_else(|| usage("--map is required"))?;
    parse_map(text)
}

pub fn point_from(flag: &Option<String>, file: &FileConfig) -> Result<towerlab_core::algebra::RationalPoint, CliError> {
    let text = flag.as_deref().or(file.point.as_deref()).ok_or_else(|| usage("--point is required"))?;
    Ok(parse_p1(text)?)
}

pub fn sequence_from(maps: &Option<String>, map: &Option<String>, file: &FileConfig) -> Result<MapSequence, CliError> {
    if let Some(list) = maps {
        return Ok(MapSequence::Explicit(list.split(',').map(parse_map).collect::<Result<_, _>>()?));
    }
    if let Some(m) = map {
        return Ok(MapSequence::Constant(parse_map(m)?));
    }
    if let Some(list) = &file.maps {
        return Ok(MapSequence::Explicit(list.iter().map(|m| parse_map(m)).collect::<Result<_, _>>()?));
    }
    if let Some(m) = &file.map {
        return Ok(MapSequence::Constant(parse_map(m)?));
    }
    Err(usage("--maps or --map is required"))
}

pub fn orbit_cap(depth: Option<usize>, file: &FileConfig) -> usize {
    depth.or(file.depth).unwrap_or(DEFAULT_ORBIT_CAP)
}

/// `a,b,...,z` expands geometrically when b/a is an integer above 1 whose
/// powers reach z exactly, otherwise arithmetically; plain lists pass through.
pub fn parse_sizes(text: &str) -> Result<Vec<usize>, CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let num = |s: &str| s.parse::<usize>().map_err(|_| usage(format!("bad size: {s}")));
    let dots = |s: &str| s == "..." || s == "…";
    match parts.iter().position(|s| dots(s)) {
        None => parts.iter().map(|s| num(s)).collect(),
        Some(2) if parts.len() == 4 => {
            let (a, b, z) = (num(parts[0])?, num(parts[1])?, num(parts[3])?);
            if a == 0 || b <= a || z < b {
                return Err(usage(format!("bad progression: {text}")));
            }
            if b % a == 0 {
                let ratio = b / a;
                let mut geo = vec![a];
                while let Some(&last) = geo.last().filter(|&&x| x < z) {
                    geo.push(last.checked_mul(ratio).ok_or_else(|| usage("progression overflows"))?);
                }
                if geo.last() == Some(&z) {
                    return Ok(geo);
                }
            }
            let step = b - a;
            if (z - a) % step != 0 {
                return Err(usage(format!("{z} is not reached by the progression {a}, {b}, ...")));
            }
            Ok((a..=z).step_by(step).collect())
        }
        Some(_) => Err(usage(format!("progressions are written a,b,...,z: {text}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_ranges() {
        assert_eq!(parse_levels("0..2").unwrap(), (0, 2));
        assert_eq!(parse_levels("1..=3").unwrap(), (1, 3));
        assert_eq!(parse_levels("4").unwrap(), (4, 4));
        assert!(parse_levels("3..1").is_err());
        assert!(parse_levels("a..b").is_err());
    }

    #[test]
    fn primes_are_checked() {
        assert_eq!(parse_primes("3, 7").unwrap(), vec![3, 7]);
        assert_eq!(parse_primes("").unwrap(), Vec::<u64>::new());
        assert_eq!(parse_primes("4"), Err(CliError::Usage("4 is not prime".into())));
    }

    #[test]
    fn size_progressions() {
        assert_eq!(parse_sizes("4,8,...,1024").unwrap(), vec![4, 8, 16, 32, 64, 128, 256, 512, 1024]);
        assert_eq!(parse_sizes("3,5,…,11").unwrap(), vec![3, 5, 7, 9, 11]);
        assert_eq!(parse_sizes("5,7,11").unwrap(), vec![5, 7, 11]);
        assert!(parse_sizes("3,5,...,10").is_err());
        assert!(parse_sizes("...,3").is_err());
    }

    #[test]
    fn flags_override_the_file() {
        let file: FileConfig = toml::from_str("format = \"csv\"\ncap-enum = 10\ntol = 0.5").unwrap();
        let g = GlobalArgs { cap_enum: Some(20), ..GlobalArgs::default() };
        let s = Settings::resolve(&g, &file).unwrap();
        assert_eq!(s.format, Format::Csv);
        assert_eq!(s.cap_enum, 20);
        assert_eq!(s.tol, Some(0.5));
        assert!(toml::from_str::<FileConfig>("colour = 1").is_err());
    }
}
