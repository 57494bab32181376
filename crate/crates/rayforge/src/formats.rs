//! JSON input files, JSON/CSV outputs, and inline literals.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use rayforge_core::certificates::{CertificateReport, Positions};
use rayforge_core::{Complex, EntireMap, EscapeSpec, ExternalAddress, Real, SolveResult};

use crate::error::{CliError, CliResult};

/// A number given either as a JSON number or as a decimal string; strings
/// keep full working precision.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Float(f64),
    Text(String),
}

impl Num {
    pub fn to_real(&self) -> CliResult<Real> {
        match self {
            Num::Float(v) => Ok(Real::from(*v)),
            Num::Text(s) => s.trim().parse().map_err(|e| CliError::parse(format!("number {s:?}"), e)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub d: usize,
    pub addresses: Vec<String>,
    pub potentials: Vec<Num>,
    #[serde(default)]
    pub allow_overlap: bool,
}

impl SpecFile {
    pub fn to_spec(&self) -> CliResult<EscapeSpec> {
        let addresses = self
            .addresses
            .iter()
            .map(|s| parse_address(s))
            .collect::<CliResult<Vec<_>>>()?;
        let potentials = self.potentials.iter().map(Num::to_real).collect::<CliResult<Vec<_>>>()?;
        Ok(if self.allow_overlap {
            EscapeSpec::new_allowing_overlap(self.d, addresses, potentials)?
        } else {
            EscapeSpec::new(self.d, addresses, potentials)?
        })
    }
}

/// `coeffs[k] = [re, im]` of `c_k`; the degree is the length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    pub coeffs: Vec<[Num; 2]>,
}

impl MapFile {
    pub fn to_map(&self) -> CliResult<EntireMap> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|[re, im]| Ok(Complex::new(re.to_real()?, im.to_real()?)))
            .collect::<CliResult<Vec<_>>>()?;
        Ok(EntireMap::new(coeffs)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFile {
    pub map: MapFile,
    pub spec: SpecFile,
    pub depth: usize,
    #[serde(default)]
    pub rho_index: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PositionEntry {
    pub i: usize,
    pub j: usize,
    pub re: Num,
    pub im: Num,
}

pub fn positions_from_entries(entries: &[PositionEntry]) -> CliResult<Positions> {
    let mut out = Positions::new();
    for e in entries {
        out.insert((e.i, e.j), Complex::new(e.re.to_real()?, e.im.to_real()?));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WordEntry {
    pub i: usize,
    pub j: usize,
    pub length: f64,
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_owned(), source })?;
    serde_json::from_str(&text).map_err(|e| CliError::parse(path.display().to_string(), e))
}

pub fn parse_address(s: &str) -> CliResult<ExternalAddress> {
    s.parse().map_err(|e: rayforge_core::Error| CliError::parse(format!("address {s:?}"), e))
}

/// `a`, `bi`, `a+bi`, `a-bi`; exponents like `1e-3` are allowed.
pub fn parse_complex(s: &str) -> CliResult<Complex> {
    let bad = |detail: &str| CliError::parse(format!("complex number {s:?}"), detail);
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(bad("empty"));
    }
    let real = |x: &str| -> CliResult<Real> { x.parse().map_err(|_| bad("malformed component")) };
    let Some(body) = t.strip_suffix('i') else {
        return Ok(Complex::from(real(&t)?));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |x: &str| -> CliResult<Real> {
        match x {
            "" | "+" => Ok(Real::ONE),
            "-" => Ok(-Real::ONE),
            _ => real(x),
        }
    };
    match split {
        Some(k) => Ok(Complex::new(real(&body[..k])?, imag(&body[k..])?)),
        None => Ok(Complex::new(Real::ZERO, imag(body)?)),
    }
}

/// `d=2,c0=1+2i,c1=0.5`; `k` is accepted for `c0`. Missing coefficients
/// are zero.
pub fn parse_inline_map(s: &str) -> CliResult<EntireMap> {
    let mut d = None;
    let mut given: BTreeMap<usize, Complex> = BTreeMap::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| CliError::parse(format!("map {s:?}"), format!("expected key=value, got {part:?}")))?;
        match key.trim() {
            "d" => d = Some(value.trim().parse::<usize>().map_err(|e| CliError::parse(format!("degree {value:?}"), e))?),
            "k" => {
                given.insert(0, parse_complex(value)?);
            }
            k if k.starts_with('c') => {
                let idx = k[1..].parse::<usize>().map_err(|e| CliError::parse(format!("coefficient key {k:?}"), e))?;
                given.insert(idx, parse_complex(value)?);
            }
            other => return Err(CliError::parse(format!("map {s:?}"), format!("unknown key {other:?}"))),
        }
    }
    let d = d.ok_or_else(|| CliError::parse(format!("map {s:?}"), "missing d=<degree>"))?;
    if let Some((&k, _)) = given.iter().find(|(&k, _)| k >= d) {
        return Err(CliError::parse(format!("map {s:?}"), format!("c{k} is not below the degree {d}")));
    }
    let coeffs = (0..d).map(|k| given.get(&k).copied().unwrap_or(Complex::ZERO)).collect();
    Ok(EntireMap::new(coeffs)?)
}

/// `lo:hi:n` with `0 < lo < hi` and `n >= 2`.
pub fn parse_range(s: &str) -> CliResult<(f64, f64, usize)> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, n] = parts[..] else {
        return Err(CliError::Usage(format!("--t expects lo:hi:n, got {s:?}")));
    };
    let num = |x: &str| x.trim().parse::<f64>().map_err(|e| CliError::Usage(format!("--t component {x:?}: {e}")));
    let (lo, hi) = (num(lo)?, num(hi)?);
    let n: usize = n.trim().parse().map_err(|e| CliError::Usage(format!("--t count {n:?}: {e}")))?;
    if !(lo > 0.0 && lo < hi) {
        return Err(CliError::Usage(format!("--t needs 0 < t_lo < t_hi (got {lo} and {hi})")));
    }
    if n < 2 {
        return Err(CliError::Usage("--t needs at least two samples".into()));
    }
    Ok((lo, hi, n))
}

fn pair(z: Complex) -> [f64; 2] {
    let (re, im) = z.to_f64();
    [re, im]
}

fn exact(z: Complex) -> [String; 2] {
    [format!("{:.60}", z.re), format!("{:.60}", z.im)]
}

#[derive(Clone, Debug, Serialize)]
pub struct MapOut {
    pub degree: usize,
    pub coeffs: Vec<[f64; 2]>,
    /// Same coefficients at working precision; accepted back as input.
    pub coeffs_exact: Vec<[String; 2]>,
}

impl MapOut {
    pub fn new(g: &EntireMap) -> Self {
        MapOut {
            degree: g.degree(),
            coeffs: g.coeffs().iter().map(|&c| pair(c)).collect(),
            coeffs_exact: g.coeffs().iter().map(|&c| exact(c)).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveOut {
    pub map: MapOut,
    pub singular_values: Vec<[f64; 2]>,
    pub targets: Vec<[f64; 2]>,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub iterations: usize,
    pub certificate: Vec<Vec<f64>>,
}

impl SolveOut {
    pub fn new(r: &SolveResult) -> Self {
        SolveOut {
            map: MapOut::new(&r.map),
            singular_values: r.singular_values.iter().map(|&z| pair(z)).collect(),
            targets: r.targets.iter().map(|&z| pair(z)).collect(),
            residuals: r.residuals.clone(),
            max_residual: r.max_residual(),
            iterations: r.iterations,
            certificate: r.certificate.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessOut {
    pub a: Option<[usize; 2]>,
    pub b: Option<[usize; 2]>,
    pub label: &'static str,
    pub value: f64,
    pub relation: &'static str,
    /// `null` stands for an infinite bound.
    pub bound: Option<f64>,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportOut {
    pub name: &'static str,
    pub passed: bool,
    pub config: BTreeMap<&'static str, f64>,
    pub witnesses: Vec<WitnessOut>,
}

impl ReportOut {
    pub fn new(r: &CertificateReport) -> Self {
        ReportOut {
            name: r.name,
            passed: r.passed,
            config: r.config.iter().copied().collect(),
            witnesses: r
                .witnesses
                .iter()
                .map(|w| WitnessOut {
                    a: w.a.map(|p| [p.0, p.1]),
                    b: w.b.map(|p| [p.0, p.1]),
                    label: w.label,
                    value: w.value,
                    relation: w.relation.symbol(),
                    bound: w.bound.is_finite().then_some(w.bound),
                    passed: w.passed,
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckOut {
    pub passed: bool,
    pub reports: Vec<ReportOut>,
}
