//! Schreier and Cayley graphs, combinatorial Laplacian spectra, spectral
//! gap tests and graph-tower diagnostics.

mod eigen;

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::Serialize;
use thiserror::Error;

pub use eigen::{eigenvalues, jacobi_eigenvalues, EigenOptions, SymmetricMatrix};

/// Eigenvalues at or below this count as zero.
pub const DEFAULT_ZERO_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectraError {
    #[error("no generators")]
    NoGenerators,
    #[error("generator {index} acts on {found} points, expected {expected}")]
    GroundSetMismatch { index: usize, expected: usize, found: usize },
    #[error("generator {0} is not a permutation")]
    NotAPermutation(usize),
    #[error("generator {0} has no inverse in a set declared symmetric")]
    NotSymmetricSet(usize),
    #[error("matrix generator {index} has determinant {det} mod {modulus}, expected 1")]
    NonUnimodular { index: usize, det: u64, modulus: u64 },
    #[error("modulus must be at least 2 (got {0})")]
    BadModulus(u64),
    #[error("matrix is not square ({rows} rows, a row of length {cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric at ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },
    #[error("row {row} sums to {sum}, row 0 to {r}")]
    NotRegular { row: usize, sum: u32, r: u32 },
    #[error("dimension {dim} exceeds the eigensolver cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("eigensolver did not converge")]
    NoConvergence,
    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },
    #[error("graph has no nonzero Laplacian eigenvalue")]
    NoNonzeroEigenvalue,
    #[error("the DSC bound needs a Cayley graph; this graph comes from a coset action")]
    NotCayley,
    #[error("cycle spectra need n >= 3 (got {0})")]
    CycleTooSmall(usize),
    #[error("empty graph sequence")]
    EmptySequence,
    #[error("graph sizes must strictly increase (entry {index})")]
    SizesNotIncreasing { index: usize },
    #[error("vertex map is not surjective: vertex {0} has an empty fibre")]
    NotSurjective(usize),
    #[error("vertex map sends {vertex} to {image}, outside 0..{target}")]
    MapOutOfRange { vertex: usize, image: usize, target: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphOrigin {
    /// Vertices are the elements of a group acting on itself.
    Cayley,
    /// A permutation action that is not known to be regular.
    Coset,
    /// Built directly from an adjacency matrix.
    Adjacency,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphMeta {
    pub origin: GraphOrigin,
    /// Generators given by the caller.
    pub input_generators: usize,
    /// Involutions among the symmetrized generators.
    pub involutions: usize,
    pub warning: Option<String>,
}

/// r-regular multigraph with a dense symmetric adjacency matrix. A
/// generator fixing a vertex contributes a loop, counted once per
/// generator in the symmetrized multiset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegularMultigraph {
    n: usize,
    r: u32,
    adjacency: Vec<Vec<u32>>,
    meta: GraphMeta,
}

type Perm = Vec<usize>;

fn invert(p: &[usize]) -> Perm {
    let mut inv = vec![0; p.len()];
    for (x, &y) in p.iter().enumerate() {
        inv[y] = x;
    }
    inv
}

fn validate_perms(perms: &[Perm]) -> Result<usize, SpectraError> {
    let first = perms.first().ok_or(SpectraError::NoGenerators)?;
    let m = first.len();
    for (i, p) in perms.iter().enumerate() {
        if p.len() != m {
            return Err(SpectraError::GroundSetMismatch { index: i, expected: m, found: p.len() });
        }
        let mut seen = vec![false; m];
        for &y in p {
            if y >= m || seen[y] {
                return Err(SpectraError::NotAPermutation(i));
            }
            seen[y] = true;
        }
    }
    Ok(m)
}

/// Close a generator list under inverses as a multiset: each generator is
/// paired with a distinct later-unpaired copy of its inverse, and every
/// generator left unpaired gets its inverse appended. Involutions pair
/// with another copy of themselves, so a lone involution is doubled.
fn symmetrize(perms: &[Perm]) -> Vec<Perm> {
    let mut out: Vec<Perm> = perms.to_vec();
    let mut paired = vec![false; perms.len()];
    for i in 0..perms.len() {
        if paired[i] {
            continue;
        }
        let inv = invert(&perms[i]);
        match (i + 1..perms.len()).find(|&j| !paired[j] && perms[j] == inv) {
            Some(j) => {
                paired[i] = true;
                paired[j] = true;
            }
            None => {
                paired[i] = true;
                out.push(inv);
            }
        }
    }
    out
}

/// Does the group generated by `perms` act regularly on 0..m?
fn acts_regularly(perms: &[Perm], m: usize) -> bool {
    let id: Perm = (0..m).collect();
    let mut seen: std::collections::HashSet<Perm> = [id.clone()].into();
    let mut queue = VecDeque::from([id]);
    while let Some(g) = queue.pop_front() {
        for s in perms {
            let h: Perm = g.iter().map(|&x| s[x]).collect();
            if seen.insert(h.clone()) {
                if seen.len() > m {
                    return false;
                }
                queue.push_back(h);
            }
        }
    }
    if seen.len() != m {
        return false;
    }
    // |G| = m together with transitivity
    seen.iter().map(|g| g[0]).collect::<std::collections::HashSet<_>>().len() == m
}

impl RegularMultigraph {
    fn from_generators(m: usize, gens: &[Perm], origin: GraphOrigin, input_generators: usize) -> Self {
        let mut adjacency = vec![vec![0u32; m]; m];
        for s in gens {
            for (x, &y) in s.iter().enumerate() {
                adjacency[x][y] += 1;
            }
        }
        let involutions = gens.iter().filter(|s| invert(s) == **s).count();
        Self {
            n: m,
            r: gens.len() as u32,
            adjacency,
            meta: GraphMeta { origin, input_generators, involutions, warning: None },
        }
    }

    /// Graph from a symmetric adjacency matrix with constant row sums.
    pub fn from_adjacency(adjacency: Vec<Vec<u32>>) -> Result<Self, SpectraError> {
        let n = adjacency.len();
        for row in &adjacency {
            if row.len() != n {
                return Err(SpectraError::NotSquare { rows: n, cols: row.len() });
            }
        }
        for i in 0..n {
            for j in 0..i {
                if adjacency[i][j] != adjacency[j][i] {
                    return Err(SpectraError::NotSymmetric { i, j });
                }
            }
        }
        let r = adjacency.first().map_or(0, |row| row.iter().sum());
        if let Some(row) = adjacency.iter().position(|row| row.iter().sum::<u32>() != r) {
            return Err(SpectraError::NotRegular { row, sum: adjacency[row].iter().sum(), r });
        }
        let meta = GraphMeta { origin: GraphOrigin::Adjacency, input_generators: 0, involutions: 0, warning: None };
        Ok(Self { n, r, adjacency, meta })
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.r
    }

    pub fn adjacency(&self) -> &[Vec<u32>] {
        &self.adjacency
    }

    pub fn meta(&self) -> &GraphMeta {
        &self.meta
    }

    pub fn is_cayley(&self) -> bool {
        self.meta.origin == GraphOrigin::Cayley
    }

    /// Nonzero entries as (row, column, multiplicity).
    pub fn triplets(&self) -> Vec<(usize, usize, u32)> {
        let mut out = Vec::new();
        for (i, row) in self.adjacency.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v != 0 {
                    out.push((i, j, v));
                }
            }
        }
        out
    }

    fn neighbours(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[x].iter().enumerate().filter(|(_, &v)| v > 0).map(|(y, _)| y)
    }

    fn bfs(&self, start: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        dist[start] = Some(0);
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            let dx = dist[x].expect("queued vertices have a distance");
            for y in self.neighbours(x) {
                if dist[y].is_none() {
                    dist[y] = Some(dx + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    pub fn component_count(&self) -> usize {
        let mut seen = vec![false; self.n];
        let mut count = 0;
        for v in 0..self.n {
            if !seen[v] {
                count += 1;
                for (u, d) in self.bfs(v).into_iter().enumerate() {
                    if d.is_some() {
                        seen[u] = true;
                    }
                }
            }
        }
        count
    }

    /// Diameter by breadth-first search. Cayley graphs are vertex-transitive,
    /// so one source suffices there; otherwise every vertex is a source.
    pub fn diameter(&self) -> Result<usize, SpectraError> {
        let mut diam = 0;
        let sources = if self.is_cayley() { 1 } else { self.n };
        for v in 0..sources {
            for d in self.bfs(v) {
                match d {
                    Some(d) => diam = diam.max(d),
                    None => return Err(SpectraError::Disconnected { components: self.component_count() }),
                }
            }
        }
        Ok(diam)
    }
}

/// Graph on 0..m with an edge x - s(x) for each generator s.
///
/// With `symmetric = false` the list is closed under inverses first (see
/// the pairing rule on the module's symmetrization). With `symmetric =
/// true` every generator must already have its inverse in the list.
pub fn schreier_graph(perms: &[Perm], symmetric: bool) -> Result<RegularMultigraph, SpectraError> {
    let m = validate_perms(perms)?;
    let gens = if symmetric {
        for (i, p) in perms.iter().enumerate() {
            let inv = invert(p);
            if !perms.contains(&inv) {
                return Err(SpectraError::NotSymmetricSet(i));
            }
        }
        perms.to_vec()
    } else {
        symmetrize(perms)
    };
    let origin = if acts_regularly(&gens, m) { GraphOrigin::Cayley } else { GraphOrigin::Coset };
    Ok(RegularMultigraph::from_generators(m, &gens, origin, perms.len()))
}

/// Cayley graph of Z/n for the given residues.
pub fn cayley_zmod(n: usize, generators: &[i64], symmetric: bool) -> Result<RegularMultigraph, SpectraError> {
    if n == 0 {
        return Err(SpectraError::BadModulus(0));
    }
    let perms: Vec<Perm> = generators
        .iter()
        .map(|&s| {
            let s = s.rem_euclid(n as i64) as usize;
            (0..n).map(|x| (x + s) % n).collect()
        })
        .collect();
    schreier_graph(&perms, symmetric)
}

/// The n-cycle: Z/n with generators {+1, -1}.
pub fn cycle_graph(n: usize) -> Result<RegularMultigraph, SpectraError> {
    cayley_zmod(n, &[1, -1], true)
}

/// K_n as the Cayley graph of Z/n with S = {1, ..., n - 1}.
pub fn complete_graph(n: usize) -> Result<RegularMultigraph, SpectraError> {
    let gens: Vec<i64> = (1..n as i64).collect();
    cayley_zmod(n, &gens, true)
}

/// 2x2 matrix mod m, row-major.
pub type Mat2 = [u64; 4];

fn mat_mul(a: &Mat2, b: &Mat2, m: u64) -> Mat2 {
    [
        (a[0] * b[0] + a[1] * b[2]) % m,
        (a[0] * b[1] + a[1] * b[3]) % m,
        (a[2] * b[0] + a[3] * b[2]) % m,
        (a[2] * b[1] + a[3] * b[3]) % m,
    ]
}

fn mat_inv_sl2(a: &Mat2, m: u64) -> Mat2 {
    [a[3], (m - a[1]) % m, (m - a[2]) % m, a[0]]
}

/// |SL_2(Z/m)| = m^3 prod_{p | m} (1 - 1/p^2)
pub fn sl2_order(m: u64) -> u64 {
    let mut order = m * m * m;
    let mut rest = m;
    let mut p = 2;
    while p * p <= rest {
        if rest.is_multiple_of(p) {
            order = order / (p * p) * (p * p - 1);
            while rest.is_multiple_of(p) {
                rest /= p;
            }
        }
        p += 1;
    }
    if rest > 1 {
        order = order / (rest * rest) * (rest * rest - 1);
    }
    order
}

/// Cayley graph of the subgroup of SL_2(Z/m) generated by `gens`, with
/// edges g - s g. A warning is recorded when the subgroup is proper.
pub fn cayley_sl2(m: u64, gens: &[[i64; 4]]) -> Result<RegularMultigraph, SpectraError> {
    if m < 2 {
        return Err(SpectraError::BadModulus(m));
    }
    if gens.is_empty() {
        return Err(SpectraError::NoGenerators);
    }
    let reduced: Vec<Mat2> = gens.iter().map(|g| g.map(|v| v.rem_euclid(m as i64) as u64)).collect();
    for (index, g) in reduced.iter().enumerate() {
        let det = (g[0] * g[3] % m + m - g[1] * g[2] % m) % m;
        if det != 1 % m {
            return Err(SpectraError::NonUnimodular { index, det, modulus: m });
        }
    }
    let identity: Mat2 = [1, 0, 0, 1];
    let mut index: HashMap<Mat2, usize> = HashMap::from([(identity, 0)]);
    let mut elements = vec![identity];
    let mut queue = VecDeque::from([identity]);
    while let Some(g) = queue.pop_front() {
        for s in &reduced {
            let h = mat_mul(s, &g, m);
            if let std::collections::hash_map::Entry::Vacant(slot) = index.entry(h) {
                slot.insert(elements.len());
                elements.push(h);
                queue.push_back(h);
            }
        }
    }
    // symmetrize on matrices with the same pairing rule as permutations
    let mut sym = reduced.clone();
    let mut paired = vec![false; reduced.len()];
    for i in 0..reduced.len() {
        if paired[i] {
            continue;
        }
        let inv = mat_inv_sl2(&reduced[i], m);
        paired[i] = true;
        match (i + 1..reduced.len()).find(|&j| !paired[j] && reduced[j] == inv) {
            Some(j) => paired[j] = true,
            None => sym.push(inv),
        }
    }
    let perms: Vec<Perm> =
        sym.iter().map(|s| elements.iter().map(|g| index[&mat_mul(s, g, m)]).collect()).collect();
    let mut graph = RegularMultigraph::from_generators(elements.len(), &perms, GraphOrigin::Cayley, gens.len());
    let full = sl2_order(m);
    if (elements.len() as u64) < full {
        graph.meta.warning =
            Some(format!("generators span a subgroup of order {} in SL_2(Z/{m}) (order {full})", elements.len()));
    }
    Ok(graph)
}

/// The standard unipotent generators [[1,1],[0,1]] and [[1,0],[1,1]].
pub fn unipotent_generators() -> Vec<[i64; 4]> {
    vec![[1, 1, 0, 1], [1, 0, 1, 1]]
}

/// rI - A
pub fn laplacian(g: &RegularMultigraph) -> SymmetricMatrix {
    let n = g.n;
    let mut m = SymmetricMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let a = g.adjacency[i][j] as f64;
            m.set(i, j, if i == j { g.r as f64 - a } else { -a });
        }
    }
    m
}

pub fn laplacian_spectrum(g: &RegularMultigraph, opts: &EigenOptions) -> Result<Vec<f64>, SpectraError> {
    eigenvalues(&laplacian(g), opts)
}

/// Smallest Laplacian eigenvalue above `zero_threshold`, for connected graphs.
pub fn lambda1(g: &RegularMultigraph, zero_threshold: f64, opts: &EigenOptions) -> Result<f64, SpectraError> {
    let components = g.component_count();
    if components > 1 {
        return Err(SpectraError::Disconnected { components });
    }
    laplacian_spectrum(g, opts)?
        .into_iter()
        .find(|&v| v > zero_threshold)
        .ok_or(SpectraError::NoNonzeroEigenvalue)
}

/// 2 - 2cos(2kπ/n) for k = 0..n-1.
pub fn cycle_spectrum(n: usize) -> Result<Vec<f64>, SpectraError> {
    if n < 3 {
        return Err(SpectraError::CycleTooSmall(n));
    }
    Ok((0..n).map(|k| 2.0 - 2.0 * (2.0 * std::f64::consts::PI * k as f64 / n as f64).cos()).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DscCheck {
    pub s_count: u32,
    pub diameter: usize,
    pub bound: f64,
    pub lambda1: f64,
    pub holds: bool,
}

/// λ₁ ≥ 1/(|S| diam²) on a Cayley graph, with |S| = r.
pub fn dsc_check(g: &RegularMultigraph, tol: f64, opts: &EigenOptions) -> Result<DscCheck, SpectraError> {
    if !g.is_cayley() {
        return Err(SpectraError::NotCayley);
    }
    let diameter = g.diameter()?;
    let l1 = lambda1(g, DEFAULT_ZERO_THRESHOLD, opts)?;
    let bound = 1.0 / (g.r as f64 * (diameter * diameter) as f64);
    Ok(DscCheck { s_count: g.r, diameter, bound, lambda1: l1, holds: l1 >= bound - tol })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyTest {
    pub passed: bool,
    /// First index where the inequality fails.
    pub witness: Option<usize>,
    pub lambda1: Vec<f64>,
}

fn check_sizes(seq: &[RegularMultigraph]) -> Result<(), SpectraError> {
    if seq.is_empty() {
        return Err(SpectraError::EmptySequence);
    }
    if let Some(i) = (1..seq.len()).find(|&i| seq[i].n <= seq[i - 1].n) {
        return Err(SpectraError::SizesNotIncreasing { index: i });
    }
    Ok(())
}

fn family_test(seq: &[RegularMultigraph], threshold: impl Fn(&RegularMultigraph) -> f64, opts: &EigenOptions) -> Result<FamilyTest, SpectraError> {
    check_sizes(seq)?;
    let lambda1: Vec<f64> = seq.iter().map(|g| lambda1(g, DEFAULT_ZERO_THRESHOLD, opts)).collect::<Result<_, _>>()?;
    let witness = seq.iter().zip(&lambda1).position(|(g, &l)| l < threshold(g));
    Ok(FamilyTest { passed: witness.is_none(), witness, lambda1 })
}

/// λ₁(Γ_i) ≥ c for every member.
pub fn expander_test(seq: &[RegularMultigraph], c: f64, opts: &EigenOptions) -> Result<FamilyTest, SpectraError> {
    family_test(seq, |_| c, opts)
}

/// λ₁(Γ_i) ≥ c / (log 2|Γ_i|)^a for every member.
pub fn esperantist_test(seq: &[RegularMultigraph], c: f64, a: f64, opts: &EigenOptions) -> Result<FamilyTest, SpectraError> {
    family_test(seq, |g| c / (2.0 * g.n as f64).ln().powf(a), opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrendVerdict {
    Increasing,
    Decreasing,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VolumeTrend {
    pub sizes: Vec<usize>,
    pub values: Vec<f64>,
    /// Monotonicity of the last ⌈len/2⌉ values; a diagnostic, not a limit.
    pub verdict: TrendVerdict,
}

pub fn trend_verdict(values: &[f64]) -> TrendVerdict {
    let tail = &values[values.len() - values.len().div_ceil(2)..];
    if tail.len() < 2 {
        TrendVerdict::Inconclusive
    } else if tail.windows(2).all(|w| w[1] > w[0]) {
        TrendVerdict::Increasing
    } else if tail.windows(2).all(|w| w[1] < w[0]) {
        TrendVerdict::Decreasing
    } else {
        TrendVerdict::Inconclusive
    }
}

/// λ₁(Γ_i)·|V(Γ_i)| along the sequence.
pub fn lambda1_volume_trend(seq: &[RegularMultigraph], opts: &EigenOptions) -> Result<VolumeTrend, SpectraError> {
    check_sizes(seq)?;
    let mut values = Vec::with_capacity(seq.len());
    for g in seq {
        values.push(lambda1(g, DEFAULT_ZERO_THRESHOLD, opts)? * g.n as f64);
    }
    let verdict = trend_verdict(&values);
    Ok(VolumeTrend { sizes: seq.iter().map(|g| g.n).collect(), values, verdict })
}

/// Vertex map from level i to level i-1 of a graph tower.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphTowerLevelMap {
    pub vertex_map: Vec<usize>,
    pub target_size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnramifiedCheck {
    pub unramified: bool,
    /// fibre size -> number of target vertices with that fibre size
    pub fiber_sizes: BTreeMap<usize, usize>,
}

pub fn unramified_check(map: &GraphTowerLevelMap) -> Result<UnramifiedCheck, SpectraError> {
    let mut fibres = vec![0usize; map.target_size];
    for (vertex, &image) in map.vertex_map.iter().enumerate() {
        if image >= map.target_size {
            return Err(SpectraError::MapOutOfRange { vertex, image, target: map.target_size });
        }
        fibres[image] += 1;
    }
    if let Some(v) = fibres.iter().position(|&f| f == 0) {
        return Err(SpectraError::NotSurjective(v));
    }
    let mut fiber_sizes = BTreeMap::new();
    for f in fibres {
        *fiber_sizes.entry(f).or_insert(0) += 1;
    }
    Ok(UnramifiedCheck { unramified: fiber_sizes.len() == 1, fiber_sizes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> EigenOptions {
        EigenOptions::default()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn z4_plus_minus_one_is_the_four_cycle() {
        let shift = |s: usize| (0..4).map(|x| (x + s) % 4).collect::<Perm>();
        let g = schreier_graph(&[shift(1), shift(3)], false).unwrap();
        assert_eq!(g.degree(), 2);
        assert_eq!(g.adjacency(), &[vec![0, 1, 0, 1], vec![1, 0, 1, 0], vec![0, 1, 0, 1], vec![1, 0, 1, 0]]);
        assert!(g.is_cayley());
        assert_eq!(g, { let mut c = cycle_graph(4).unwrap(); c.meta.input_generators = 2; c });
    }

    #[test]
    fn trivial_action_is_a_loop() {
        let g = schreier_graph(&[vec![0]], false).unwrap();
        assert_eq!(g.degree(), 2);
        assert_eq!(g.adjacency(), &[vec![2]]);
        assert_eq!(laplacian(&g).rows(), vec![vec![0.0]]);
    }

    #[test]
    fn s3_on_three_points() {
        let cycle = vec![1, 2, 0];
        let swap = vec![1, 0, 2];
        let g = schreier_graph(&[cycle, swap], false).unwrap();
        assert_eq!(g.degree(), 4);
        // c and c^-1 join every pair once; the transposition twice on {0,1}, a double loop at 2
        assert_eq!(g.adjacency(), &[vec![0, 3, 1], vec![3, 0, 1], vec![1, 1, 2]]);
        assert_eq!(g.meta().origin, GraphOrigin::Coset);
        assert_eq!(g.meta().involutions, 2);
    }

    #[test]
    fn generator_validation() {
        assert_eq!(schreier_graph(&[], false), Err(SpectraError::NoGenerators));
        assert_eq!(schreier_graph(&[vec![0, 1], vec![0]], false), Err(SpectraError::GroundSetMismatch { index: 1, expected: 2, found: 1 }));
        assert_eq!(schreier_graph(&[vec![0, 0]], false), Err(SpectraError::NotAPermutation(0)));
        assert_eq!(schreier_graph(&[vec![1, 2, 0]], true), Err(SpectraError::NotSymmetricSet(0)));
    }

    #[test]
    fn sl2_graphs() {
        assert_eq!(sl2_order(2), 6);
        assert_eq!(sl2_order(3), 24);
        assert_eq!(sl2_order(4), 48);
        assert_eq!(sl2_order(7), 336);
        let g2 = cayley_sl2(2, &unipotent_generators()).unwrap();
        assert_eq!(g2.num_vertices(), 6);
        assert!(g2.meta().warning.is_none());
        assert_eq!(cayley_sl2(3, &unipotent_generators()).unwrap().num_vertices(), 24);
        let id = cayley_sl2(2, &[[1, 0, 0, 1]]).unwrap();
        assert_eq!(id.num_vertices(), 1);
        assert!(id.meta().warning.is_some());
        assert_eq!(
            cayley_sl2(5, &[[2, 0, 0, 2]]),
            Err(SpectraError::NonUnimodular { index: 0, det: 4, modulus: 5 })
        );
        for g in [&g2, &id] {
            assert!(g.adjacency().iter().all(|row| row.iter().sum::<u32>() == g.degree()));
        }
    }

    #[test]
    fn laplacian_examples() {
        let c4 = laplacian(&cycle_graph(4).unwrap()).rows();
        assert_eq!(c4[0], vec![2.0, -1.0, 0.0, -1.0]);
        let k4 = laplacian(&complete_graph(4).unwrap()).rows();
        assert_eq!(k4[1], vec![-1.0, 3.0, -1.0, -1.0]);
    }

    #[test]
    fn spectra_and_lambda1() {
        let spec = laplacian_spectrum(&cycle_graph(4).unwrap(), &opts()).unwrap();
        assert!(close(&spec, &[0.0, 2.0, 2.0, 4.0], 1e-12));
        let l8 = lambda1(&cycle_graph(8).unwrap(), DEFAULT_ZERO_THRESHOLD, &opts()).unwrap();
        assert!((l8 - (2.0 - 2.0 * (std::f64::consts::PI / 4.0).cos())).abs() < 1e-12);
        for n in [4, 5, 9] {
            let l = lambda1(&complete_graph(n).unwrap(), DEFAULT_ZERO_THRESHOLD, &opts()).unwrap();
            assert!((l - n as f64).abs() < 1e-10);
        }
        let two = cayley_zmod(6, &[2], false).unwrap();
        assert_eq!(lambda1(&two, DEFAULT_ZERO_THRESHOLD, &opts()), Err(SpectraError::Disconnected { components: 2 }));
    }

    #[test]
    fn cycle_closed_form() {
        assert!(close(&cycle_spectrum(4).unwrap(), &[0.0, 2.0, 4.0, 2.0], 1e-12));
        assert!(close(&cycle_spectrum(3).unwrap(), &[0.0, 3.0, 3.0], 1e-12));
        assert!((cycle_spectrum(6).unwrap()[1] - 1.0).abs() < 1e-12);
        assert_eq!(cycle_spectrum(2), Err(SpectraError::CycleTooSmall(2)));
    }

    #[test]
    fn dsc_examples() {
        let c4 = dsc_check(&cycle_graph(4).unwrap(), 1e-9, &opts()).unwrap();
        assert_eq!((c4.s_count, c4.diameter, c4.bound), (2, 2, 0.125));
        assert!(c4.holds);
        let c16 = dsc_check(&cycle_graph(16).unwrap(), 1e-9, &opts()).unwrap();
        assert_eq!((c16.diameter, c16.bound), (8, 1.0 / 128.0));
        assert!(c16.holds && (c16.lambda1 - 0.152240934977).abs() < 1e-11);
        let k4 = dsc_check(&complete_graph(4).unwrap(), 1e-9, &opts()).unwrap();
        assert_eq!((k4.s_count, k4.diameter), (3, 1));
        assert!((k4.bound - 1.0 / 3.0).abs() < 1e-15 && (k4.lambda1 - 4.0).abs() < 1e-10 && k4.holds);
        let s3 = schreier_graph(&[vec![1, 2, 0], vec![1, 0, 2]], false).unwrap();
        assert_eq!(dsc_check(&s3, 1e-9, &opts()), Err(SpectraError::NotCayley));
    }

    #[test]
    fn family_tests() {
        let cycles: Vec<_> = [8, 16, 32].iter().map(|&n| cycle_graph(n).unwrap()).collect();
        let t = expander_test(&cycles, 0.5, &opts()).unwrap();
        assert!(!t.passed);
        assert_eq!(t.witness, Some(1));
        let ks: Vec<_> = [4, 8, 16].iter().map(|&n| complete_graph(n).unwrap()).collect();
        assert!(expander_test(&ks, 1.0, &opts()).unwrap().passed);
        let single = vec![cycle_graph(10).unwrap()];
        let l = lambda1(&single[0], DEFAULT_ZERO_THRESHOLD, &opts()).unwrap();
        assert!(expander_test(&single, l, &opts()).unwrap().passed);
        assert!(esperantist_test(&ks, 1.0, 1.0, &opts()).unwrap().passed);
        let same = vec![cycle_graph(8).unwrap(), cycle_graph(8).unwrap()];
        assert_eq!(expander_test(&same, 0.1, &opts()), Err(SpectraError::SizesNotIncreasing { index: 1 }));
        assert_eq!(expander_test(&[], 0.1, &opts()), Err(SpectraError::EmptySequence));
    }

    #[test]
    fn volume_trends() {
        let cycles: Vec<_> = (2..=7).map(|i| cycle_graph(1 << i).unwrap()).collect();
        assert_eq!(lambda1_volume_trend(&cycles, &opts()).unwrap().verdict, TrendVerdict::Decreasing);
        let ks: Vec<_> = [4, 8, 16, 32].iter().map(|&n| complete_graph(n).unwrap()).collect();
        let t = lambda1_volume_trend(&ks, &opts()).unwrap();
        assert_eq!(t.verdict, TrendVerdict::Increasing);
        assert!(close(&t.values, &[16.0, 64.0, 256.0, 1024.0], 1e-8));
        assert_eq!(trend_verdict(&[1.0, 3.0, 2.0, 4.0, 3.0, 5.0]), TrendVerdict::Inconclusive);
    }

    #[test]
    fn unramified_examples() {
        let z8 = GraphTowerLevelMap { vertex_map: (0..8).map(|x| x % 4).collect(), target_size: 4 };
        let r = unramified_check(&z8).unwrap();
        assert!(r.unramified);
        assert_eq!(r.fiber_sizes, BTreeMap::from([(2, 4)]));
        let ram = GraphTowerLevelMap { vertex_map: vec![0, 0, 0, 1], target_size: 2 };
        let r = unramified_check(&ram).unwrap();
        assert!(!r.unramified);
        assert_eq!(r.fiber_sizes, BTreeMap::from([(1, 1), (3, 1)]));
        let id = GraphTowerLevelMap { vertex_map: vec![0, 1, 2], target_size: 3 };
        assert_eq!(unramified_check(&id).unwrap().fiber_sizes, BTreeMap::from([(1, 3)]));
        let bad = GraphTowerLevelMap { vertex_map: vec![0, 0], target_size: 2 };
        assert_eq!(unramified_check(&bad), Err(SpectraError::NotSurjective(1)));
    }
}
