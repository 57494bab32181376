use std::io::Write;
use std::path::{Path, PathBuf};

use rayforge_core::certificates::{
    check_asymptotics_outside, check_bounded_homotopy, check_cluster_rigidity, check_clusters_inside, check_inside_disk,
    check_separation_inside, identity_positions,
};
use rayforge_core::clusters::MarkedGrid;
use rayforge_core::rays::{asymptotic_residual, ray_point, ray_sample};
use rayforge_core::solver::{initial_guess, solve, trace};
use rayforge_core::{EntireMap, ExternalAddress, GrowthFn, Real, Wedge};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::formats::{
    parse_address, parse_inline_map, parse_range, positions_from_entries, read_json, CheckOut, GridFile, MapFile, Num,
    PositionEntry, ReportOut, SolveOut, SpecFile, WordEntry,
};

/// Where a command's main output goes: `--out`, else `out_dir/<name>`,
/// else stdout.
pub struct Sink {
    pub path: Option<PathBuf>,
}

impl Sink {
    pub fn new(out: Option<PathBuf>, cfg: &RunConfig, default_name: &str) -> Self {
        Sink { path: out.or_else(|| cfg.out_dir.as_ref().map(|d| d.join(default_name))) }
    }

    pub fn is_stdout(&self) -> bool {
        self.path.is_none()
    }

    pub fn write(&self, bytes: &[u8]) -> CliResult<()> {
        match &self.path {
            Some(p) => std::fs::write(p, bytes).map_err(|source| CliError::Write { path: p.clone(), source }),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(bytes)
                    .and_then(|_| out.flush())
                    .map_err(|source| CliError::Write { path: PathBuf::from("<stdout>"), source })
            }
        }
    }
}

fn json_bytes<T: serde::Serialize>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("output serializes");
    s.push('\n');
    s.into_bytes()
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::Writer::from_writer(Vec::new())
}

fn csv_bytes(w: csv::Writer<Vec<u8>>) -> CliResult<Vec<u8>> {
    w.into_inner().map_err(|e| CliError::Write { path: PathBuf::from("<csv>"), source: e.into_error() })
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Write { path: PathBuf::from("<csv>"), source: std::io::Error::other(e) }
}

pub fn load_map(inline: Option<&str>, file: Option<&Path>) -> CliResult<EntireMap> {
    match (inline, file) {
        (Some(s), None) => parse_inline_map(s),
        (None, Some(p)) => read_json::<MapFile>(p)?.to_map(),
        (Some(_), Some(_)) => Err(CliError::Usage("give either --map or --map-file, not both".into())),
        (None, None) => Err(CliError::Usage("a map is required (--map or --map-file)".into())),
    }
}

pub fn cmd_ray(cfg: &RunConfig, g: &EntireMap, addr: &str, range: &str, sink: &Sink) -> CliResult<()> {
    let s = parse_address(addr)?;
    let (lo, hi, n) = parse_range(range)?;
    let ray = cfg.ray();
    let samples = ray_sample(g, &s, lo, hi, n, &ray)?;
    let f = GrowthFn::new(g.degree())?;
    let shifted = s.shift();

    let mut w = csv_writer();
    w.write_record(["t", "re", "im", "depth", "err_bound", "asymptotic_residual"]).map_err(csv_err)?;
    let mut worst_asym = 0.0f64;
    let mut worst_fe: Option<f64> = None;
    for smp in &samples {
        let res = asymptotic_residual(smp);
        worst_asym = worst_asym.max(res);
        let (re, im) = smp.position.to_f64();
        w.write_record([
            smp.potential.to_f64().to_string(),
            re.to_string(),
            im.to_string(),
            smp.depth.to_string(),
            smp.err_bound.to_string(),
            res.to_string(),
        ])
        .map_err(csv_err)?;
        // functional equation where F(t) and g(z) stay representable
        if let (Ok(ft), Ok(gz)) = (f.apply(smp.potential), g.evaluate(smp.position)) {
            if let Ok(next) = ray_point(g, &shifted, ft, &ray) {
                let e = (gz - next.position).norm_f64();
                worst_fe = Some(worst_fe.map_or(e, |v| v.max(e)));
            }
        }
    }
    sink.write(&csv_bytes(w)?)?;
    let fe = worst_fe.map_or("n/a".to_string(), |v| format!("{v:e}"));
    let summary = format!(
        "samples: {n}\nmax asymptotic residual: {worst_asym:e}\nmax functional-equation residual: {fe}\n"
    );
    if sink.is_stdout() {
        eprint!("{summary}");
    } else {
        print!("{summary}");
    }
    Ok(())
}

pub fn cmd_solve(cfg: &RunConfig, spec: &Path, init: Option<&Path>, sink: &Sink) -> CliResult<()> {
    let spec = read_json::<SpecFile>(spec)?.to_spec()?;
    let sc = cfg.solve();
    let g0 = match init {
        Some(p) => read_json::<MapFile>(p)?.to_map()?,
        None => initial_guess(&spec, &sc)?,
    };
    let r = solve(&spec, &g0, &sc)?;
    sink.write(&json_bytes(&SolveOut::new(&r)))
}

pub fn cmd_trace(cfg: &RunConfig, spec: &Path, path: &Path, init: Option<&Path>, sink: &Sink) -> CliResult<()> {
    let spec = read_json::<SpecFile>(spec)?.to_spec()?;
    let rows: Vec<Vec<Num>> = read_json(path)?;
    let tuples = rows
        .iter()
        .map(|r| r.iter().map(Num::to_real).collect::<CliResult<Vec<Real>>>())
        .collect::<CliResult<Vec<_>>>()?;
    if tuples.is_empty() {
        return Err(CliError::Usage("the path file holds no potential tuples".into()));
    }
    if let Some(bad) = tuples.iter().position(|t| t.len() != spec.m()) {
        return Err(CliError::Usage(format!("path entry {bad} has the wrong number of potentials (need {})", spec.m())));
    }
    let sc = cfg.solve();
    let first = spec.with_potentials(tuples[0].clone())?;
    let g0 = match init {
        Some(p) => read_json::<MapFile>(p)?.to_map()?,
        None => initial_guess(&first, &sc)?,
    };
    let results = trace(&spec, &g0, &tuples, &sc)?;

    let (m, d) = (spec.m(), spec.d);
    let mut header = vec!["step".to_string()];
    header.extend((1..=m).map(|i| format!("T_{i}")));
    header.extend((0..d).map(|k| format!("coeff_re_{k}")));
    header.extend((0..d).map(|k| format!("coeff_im_{k}")));
    header.push("residual".into());
    let mut w = csv_writer();
    w.write_record(&header).map_err(csv_err)?;
    for (step, (t, r)) in tuples.iter().zip(&results).enumerate() {
        let mut row = vec![step.to_string()];
        row.extend(t.iter().map(|x| x.to_f64().to_string()));
        let cs = r.map.coeffs_f64();
        row.extend(cs.iter().map(|c| c.0.to_string()));
        row.extend(cs.iter().map(|c| c.1.to_string()));
        row.push(r.max_residual().to_string());
        w.write_record(&row).map_err(csv_err)?;
    }
    sink.write(&csv_bytes(w)?)
}

pub fn cmd_check(cfg: &RunConfig, grid: &Path, positions: &str, words: Option<&Path>, sink: &Sink) -> CliResult<()> {
    let gf: GridFile = read_json(grid)?;
    let g = gf.map.to_map()?;
    let spec = gf.spec.to_spec()?;
    let grid = MarkedGrid::build(&g, &spec, gf.depth, gf.rho_index, &cfg.grid())?;
    let pos = if positions == "identity" {
        identity_positions(&grid)
    } else {
        positions_from_entries(&read_json::<Vec<PositionEntry>>(Path::new(positions))?)?
    };
    let mut reports = vec![
        check_inside_disk(&grid, &pos)?,
        check_asymptotics_outside(&grid, &pos)?,
        check_cluster_rigidity(&grid, &pos, &cfg.rigidity())?,
    ];
    if let Some(k) = cfg.external() {
        reports.push(check_separation_inside(&grid, &pos, &k)?);
        reports.push(check_clusters_inside(&grid, &pos, &k)?);
        if let Some(p) = words {
            let entries: Vec<WordEntry> = read_json(p)?;
            let lengths = entries.iter().map(|e| ((e.i, e.j), e.length)).collect();
            reports.push(check_bounded_homotopy(&grid, &lengths, &k)?);
        }
    } else if words.is_some() {
        return Err(CliError::Usage("--words needs condition constants in the config".into()));
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    let out = CheckOut { passed: failed == 0, reports: reports.iter().map(ReportOut::new).collect() };
    sink.write(&json_bytes(&out))?;
    if failed > 0 {
        return Err(CliError::CertificateFailed(failed));
    }
    Ok(())
}

pub enum AddrQuery {
    Shift { addr: String, by: usize },
    Overlap { a: String, b: String },
    Wedge { center: String, t: f64, k: f64, d: usize, addr: String },
}

pub fn cmd_addr(q: &AddrQuery) -> CliResult<String> {
    Ok(match q {
        AddrQuery::Shift { addr, by } => parse_address(addr)?.shift_by(*by).to_string(),
        AddrQuery::Overlap { a, b } => parse_address(a)?.overlapping(&parse_address(b)?).to_string(),
        AddrQuery::Wedge { center, t, k, d, addr } => {
            let c: ExternalAddress = parse_address(center)?;
            Wedge::new(c, *t, *k, *d)?.contains(&parse_address(addr)?).to_string()
        }
    })
}
