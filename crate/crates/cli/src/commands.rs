use rayon::prelude::*;
use towerlab_core::algebra::{FpPoint, RationalPoint};
use towerlab_core::bounds::{level_report, LevelReport, ReportOptions, TowerReport};
use towerlab_core::dynamics::{
    canonical_height, classify_orbit, format_p1, periodic_points, preimage_chain, HeightConfig, OrbitKind,
    PreimageNode, RationalMap,
};
use towerlab_core::pointcount::{count_points, image_chain, CountOptions};
use towerlab_core::spectra::{
    cayley_sl2, cayley_zmod, cycle_graph, cycle_spectrum, dsc_check, expander_test, lambda1, lambda1_volume_trend,
    laplacian_spectrum, schreier_graph, sl2_order, unipotent_generators, EigenOptions, GraphOrigin,
    RegularMultigraph, DEFAULT_ZERO_THRESHOLD,
};

use crate::config::{
    map_from, orbit_cap, parse_sizes, point_from, sequence_from, tower_inputs, DynamicsCommand, FileConfig, Settings,
    SpectraCommand, TowerArgs,
};
use crate::error::{usage, CliError};
use crate::report::{Cell, Report};

const DEFAULT_MAX_PERIOD: usize = 3;
const DEFAULT_PREIMAGE_DEPTH: usize = 3;
const DEFAULT_CHAIN_DEPTH: usize = 3;

fn join<T: ToString>(items: impl IntoIterator<Item = T>, sep: &str) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

fn points_cell(points: impl IntoIterator<Item = FpPoint>) -> Cell {
    join(points, " ").into()
}

pub fn count(args: &TowerArgs, file: &FileConfig, s: &Settings) -> Result<Report, CliError> {
    let inputs = tower_inputs(args, file)?;
    let (lo, hi) = inputs.levels.unwrap_or((0, 0));
    let primes = inputs.primes.filter(|p| !p.is_empty()).ok_or_else(|| usage("--primes is required"))?;
    let items: Vec<(usize, u64)> = (lo..=hi).flat_map(|n| primes.iter().map(move |&p| (n, p))).collect();
    let opts = CountOptions { retain_cap: 0, enumeration_cap: s.cap_enum };
    let results: Vec<_> = items.par_iter().map(|&(n, p)| count_points(&inputs.tower, n, p, &opts)).collect();
    let mut report = Report::new("count", &["level", "prime", "count"]).with("tower", inputs.tower.to_string());
    for r in results {
        let r = r?;
        report.push(vec![r.level.into(), r.prime.into(), r.count.into()]);
    }
    Ok(report)
}

fn counts_cell(row: &LevelReport) -> Cell {
    join(
        row.primes.iter().map(|p| {
            let mark = if p.smooth { "" } else { "(singular)" };
            format!("{}:{}{mark}", p.prime, p.count)
        }),
        " ",
    )
    .into()
}

pub fn bounds(args: &TowerArgs, file: &FileConfig, s: &Settings) -> Result<Report, CliError> {
    let inputs = tower_inputs(args, file)?;
    let (lo, hi) = inputs.levels.unwrap_or((0, 2));
    let primes = inputs.primes.unwrap_or_default();
    let opts = ReportOptions { enumeration_cap: s.cap_enum, ..ReportOptions::default() };
    let rows: Vec<_> = (lo..=hi).into_par_iter().map(|n| level_report(&inputs.tower, n, &primes, &opts)).collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    let tower = TowerReport::assemble(&inputs.tower, rows);
    let mut report = Report::new(
        "bounds",
        &["level", "degrees", "genus", "structural", "lower", "upper", "frey_max_degree", "rational_point", "counts", "provenance"],
    )
    .with("tower", tower.tower.clone())
    .with("monotone_divergence", tower.monotone_divergence);
    for row in &tower.rows {
        report.push(vec![
            row.level.into(),
            join(&row.degrees, ",").into(),
            row.genus.into(),
            row.structural_bound.into(),
            row.interval.lower.into(),
            row.interval.upper.into(),
            row.frey_max_degree.into(),
            row.rational_point.clone().into(),
            counts_cell(row),
            join(&row.interval.provenance, " ").into(),
        ]);
    }
    Ok(report)
}

pub fn chain(args: &TowerArgs, depth: Option<usize>, file: &FileConfig, s: &Settings) -> Result<Report, CliError> {
    let inputs = tower_inputs(args, file)?;
    let (n, _) = inputs.levels.unwrap_or((0, 0));
    let m_max = depth.or(file.depth).unwrap_or(n + DEFAULT_CHAIN_DEPTH);
    let primes = inputs.primes.filter(|p| !p.is_empty()).ok_or_else(|| usage("--primes is required"))?;
    let chains: Vec<_> = primes.par_iter().map(|&p| image_chain(&inputs.tower, n, p, m_max, s.cap_enum)).collect();
    let mut report = Report::new("chain", &["prime", "m", "size", "points"])
        .with("tower", inputs.tower.to_string())
        .with("level", n);
    for c in chains {
        let c = c?;
        report.summary.push((format!("stabilized_at_p{}", c.prime), c.stabilized_at.into()));
        for (i, set) in c.sets.iter().enumerate() {
            report.push(vec![c.prime.into(), (n + i).into(), set.len().into(), points_cell(set.iter().cloned())]);
        }
    }
    Ok(report)
}

fn exact_period(f: &RationalMap, p: &RationalPoint, max: usize) -> Result<Option<usize>, CliError> {
    let mut q = p.clone();
    for k in 1..=max {
        q = f.apply(&q)?;
        if q == *p {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

fn walk(node: &PreimageNode, level: usize, parent: Option<&RationalPoint>, report: &mut Report) {
    report.push(vec![level.into(), format_p1(&node.point).into(), parent.map(format_p1).into()]);
    for c in &node.children {
        walk(c, level + 1, Some(&node.point), report);
    }
}

pub fn dynamics(cmd: &DynamicsCommand, file: &FileConfig, s: &Settings) -> Result<Report, CliError> {
    match cmd {
        DynamicsCommand::Periodic { map, max_period } => {
            let f = map_from(map, file)?;
            let max = max_period.or(file.max_period).unwrap_or(DEFAULT_MAX_PERIOD);
            if max == 0 {
                return Err(usage("--max-period must be positive"));
            }
            let per = periodic_points(&f, max, s.cap_bits)?;
            let mut report = Report::new("dynamics periodic", &["point", "period"])
                .with("map", f.to_string())
                .with("max_period", max)
                .with("count", per.len());
            for p in &per {
                report.push(vec![format_p1(p).into(), exact_period(&f, p, max)?.into()]);
            }
            Ok(report)
        }
        DynamicsCommand::Classify { map, point, depth } => {
            let f = map_from(map, file)?;
            let p = point_from(point, file)?;
            let cap = orbit_cap(*depth, file);
            let c = classify_orbit(&f, &p, cap, s.cap_bits as f64 * std::f64::consts::LN_2)?;
            let (kind, tail, period, height): (&str, Cell, Cell, Cell) = match c.kind {
                OrbitKind::Periodic { period } => ("periodic", 0usize.into(), period.into(), Cell::Null),
                OrbitKind::Preperiodic { tail, period } => ("preperiodic", tail.into(), period.into(), Cell::Null),
                OrbitKind::Escaping { height, .. } => ("escaping", Cell::Null, Cell::Null, height.into()),
            };
            let mut report = Report::new("dynamics classify", &["map", "point", "kind", "tail", "period", "last_height", "orbit"]);
            report.push(vec![
                f.to_string().into(),
                format_p1(&p).into(),
                kind.into(),
                tail,
                period,
                height,
                join(c.orbit_prefix.iter().map(format_p1), " ").into(),
            ]);
            Ok(report)
        }
        DynamicsCommand::Height { map, point, depth } => {
            let f = map_from(map, file)?;
            let p = point_from(point, file)?;
            let mut cfg = HeightConfig { max_bits: s.cap_bits, ..HeightConfig::default() };
            if let Some(t) = s.tol {
                cfg.tol = t;
            }
            if let Some(d) = depth.or(file.depth) {
                cfg.max_iterations = d;
            }
            let h = canonical_height(&f, &p, &cfg)?;
            let mut report =
                Report::new("dynamics height", &["map", "point", "height", "iterations", "converged", "preperiodic"]);
            report.push(vec![
                f.to_string().into(),
                format_p1(&p).into(),
                h.value.into(),
                h.iterations.into(),
                h.converged.into(),
                h.preperiodic.into(),
            ]);
            Ok(report)
        }
        DynamicsCommand::Preimages { maps, map, point, depth } => {
            let seq = sequence_from(maps, map, file)?;
            let p = point_from(point, file)?;
            let depth = depth.or(file.depth).unwrap_or(DEFAULT_PREIMAGE_DEPTH);
            let tree = preimage_chain(&seq, &p, depth, s.cap_bits)?;
            let mut report = Report::new("dynamics preimages", &["level", "point", "parent"])
                .with("depth", depth)
                .with("certified", tree.certified())
                .with("path", tree.path.as_ref().map(|path| join(path.iter().map(format_p1), " <- ")))
                .with("nodes", tree.root.node_count());
            walk(&tree.root, 0, None, &mut report);
            Ok(report)
        }
    }
}

fn guard_dim(n: u64, s: &Settings) -> Result<(), CliError> {
    if n > s.cap_dim as u64 {
        return Err(CliError::Cap(format!("graph has {n} vertices, above the dimension cap {}", s.cap_dim)));
    }
    Ok(())
}

fn eigen_opts(s: &Settings) -> EigenOptions {
    EigenOptions { max_dim: s.cap_dim, ..EigenOptions::default() }
}

fn origin_name(o: GraphOrigin) -> &'static str {
    match o {
        GraphOrigin::Cayley => "cayley",
        GraphOrigin::Coset => "coset",
        GraphOrigin::Adjacency => "adjacency",
    }
}

fn parse_perms(text: &str) -> Result<Vec<Vec<usize>>, CliError> {
    let body = if std::path::Path::new(text).is_file() {
        std::fs::read_to_string(text).map_err(|e| usage(format!("cannot read {text}: {e}")))?
    } else {
        text.to_string()
    };
    body.split([';', '\n'])
        .map(str::trim)
        .filter(|g| !g.is_empty() && !g.starts_with('#'))
        .map(|g| {
            g.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<usize>().map_err(|_| usage(format!("bad permutation entry: {t}"))))
                .collect()
        })
        .collect()
}

fn parse_matrices(text: &str) -> Result<Vec<[i64; 4]>, CliError> {
    text.split(';')
        .map(|g| {
            let v: Vec<i64> = g
                .split(',')
                .map(|t| t.trim().parse::<i64>().map_err(|_| usage(format!("bad matrix entry: {t}"))))
                .collect::<Result<_, _>>()?;
            <[i64; 4]>::try_from(v).map_err(|_| usage(format!("a matrix needs 4 entries: {g}")))
        })
        .collect()
}

fn parse_residues(text: &str) -> Result<Vec<i64>, CliError> {
    text.split(',').map(|t| t.trim().parse::<i64>().map_err(|_| usage(format!("bad generator: {t}")))).collect()
}

fn graph_report(command: &str, g: &RegularMultigraph, s: &Settings) -> Result<Report, CliError> {
    let opts = eigen_opts(s);
    let spec = laplacian_spectrum(g, &opts)?;
    let components = g.component_count();
    let connected = components == 1;
    let l1 = if connected { Some(lambda1(g, DEFAULT_ZERO_THRESHOLD, &opts)?) } else { None };
    let diam = if connected { Some(g.diameter()?) } else { None };
    let mut report = Report::new(command, &["index", "eigenvalue"])
        .with("vertices", g.num_vertices())
        .with("degree", g.degree())
        .with("origin", origin_name(g.meta().origin))
        .with("involutions", g.meta().involutions)
        .with("components", components)
        .with("lambda1", l1)
        .with("diameter", diam)
        .with("warning", g.meta().warning.clone());
    for (i, v) in spec.into_iter().enumerate() {
        report.push(vec![i.into(), v.into()]);
    }
    Ok(report)
}

fn dsc_graph(group: &str, s: &Settings) -> Result<RegularMultigraph, CliError> {
    let parts: Vec<&str> = group.split(':').collect();
    let num = |t: &str| t.trim().parse::<u64>().map_err(|_| usage(format!("bad group: {group}")));
    match parts.as_slice() {
        ["cycle", n] | ["zmod", n] => {
            let n = num(n)?;
            guard_dim(n, s)?;
            Ok(cycle_graph(n as usize)?)
        }
        ["zmod", n, gens] => {
            let n = num(n)?;
            guard_dim(n, s)?;
            Ok(cayley_zmod(n as usize, &parse_residues(gens)?, false)?)
        }
        ["sl2", m] => {
            let m = num(m)?;
            guard_dim(sl2_order(m.max(2)), s)?;
            Ok(cayley_sl2(m, &unipotent_generators())?)
        }
        _ => Err(usage(format!("unknown group {group}; use zmod:<n>[:<gens>], cycle:<n> or sl2:<m>"))),
    }
}

pub fn spectra(cmd: &SpectraCommand, s: &Settings) -> Result<Report, CliError> {
    let opts = eigen_opts(s);
    match cmd {
        SpectraCommand::Cycle { n } => {
            guard_dim(*n as u64, s)?;
            let mut expected = cycle_spectrum(*n)?;
            expected.sort_by(f64::total_cmp);
            let got = laplacian_spectrum(&cycle_graph(*n)?, &opts)?;
            let max_err = got.iter().zip(&expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            let mut report = Report::new("spectra cycle", &["index", "eigenvalue", "closed_form"])
                .with("n", *n)
                .with("lambda1", expected.get(1).copied())
                .with("max_error", max_err);
            for (i, (a, b)) in got.iter().zip(&expected).enumerate() {
                report.push(vec![i.into(), (*a).into(), (*b).into()]);
            }
            Ok(report)
        }
        SpectraCommand::Schreier { perms, symmetric } => {
            let perms = parse_perms(perms)?;
            if let Some(p) = perms.first() {
                guard_dim(p.len() as u64, s)?;
            }
            graph_report("spectra schreier", &schreier_graph(&perms, *symmetric)?, s)
        }
        SpectraCommand::CayleySl2 { m, gens } => {
            let gens = match gens {
                Some(text) => parse_matrices(text)?,
                None => unipotent_generators(),
            };
            guard_dim(sl2_order((*m).max(2)), s)?;
            let g = cayley_sl2(*m, &gens)?;
            let mut report = graph_report("spectra cayley-sl2", &g, s)?;
            report.summary.insert(0, ("sl2_order".into(), sl2_order(*m).into()));
            Ok(report)
        }
        SpectraCommand::Trend { family, sizes, expander } => {
            let sizes = parse_sizes(sizes)?;
            let graphs = sizes
                .iter()
                .map(|&n| -> Result<RegularMultigraph, CliError> {
                    match family.split_once(':') {
                        None if family == "cycle" => {
                            guard_dim(n as u64, s)?;
                            Ok(cycle_graph(n)?)
                        }
                        None if family == "sl2" => {
                            guard_dim(sl2_order((n as u64).max(2)), s)?;
                            Ok(cayley_sl2(n as u64, &unipotent_generators())?)
                        }
                        Some(("zmod", gens)) => {
                            guard_dim(n as u64, s)?;
                            Ok(cayley_zmod(n, &parse_residues(gens)?, false)?)
                        }
                        _ => Err(usage(format!("unknown family {family}; use cycle, sl2 or zmod:<gens>"))),
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            let trend = lambda1_volume_trend(&graphs, &opts)?;
            let verdict = serde_json::to_value(trend.verdict).expect("verdict serializes");
            let mut report = Report::new("spectra trend", &["size", "vertices", "lambda1", "lambda1_volume"])
                .with("family", family.as_str())
                .with("verdict", verdict.as_str().unwrap_or_default());
            if let Some(c) = expander {
                let t = expander_test(&graphs, *c, &opts)?;
                report = report.with("expander_c", *c).with("expander_passed", t.passed).with("expander_witness", t.witness);
            }
            for ((size, g), v) in sizes.iter().zip(&graphs).zip(&trend.values) {
                report.push(vec![(*size).into(), g.num_vertices().into(), (v / g.num_vertices() as f64).into(), (*v).into()]);
            }
            Ok(report)
        }
        SpectraCommand::Dsc { group } => {
            let g = dsc_graph(group, s)?;
            let c = dsc_check(&g, s.tol.unwrap_or(0.0), &opts)?;
            let mut report =
                Report::new("spectra dsc", &["group", "vertices", "s_count", "diameter", "bound", "lambda1", "holds"]);
            report.push(vec![
                group.as_str().into(),
                g.num_vertices().into(),
                c.s_count.into(),
                c.diameter.into(),
                c.bound.into(),
                c.lambda1.into(),
                c.holds.into(),
            ]);
            Ok(report)
        }
    }
}
