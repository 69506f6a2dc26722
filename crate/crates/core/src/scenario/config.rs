use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::ConfigErrorKind;
use crate::multipoint::MultipointSpec;
use crate::nonlinear::{InitialGuess, NonlinearityKind};
use crate::operator::{build_operator, build_sturm_liouville, OperatorSpec};
use crate::spectral::GridSpec;
use crate::strichartz::{parse_rational, Exponent, GapRelation, Rational};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    SolveLinear,
    SolveNlw,
    CheckAdmissible,
    VerifyDispersive,
    VerifyStrichartz,
    OracleCompare,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 6] = [
        Self::SolveLinear,
        Self::SolveNlw,
        Self::CheckAdmissible,
        Self::VerifyDispersive,
        Self::VerifyStrichartz,
        Self::OracleCompare,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::SolveLinear => "solve-linear",
            Self::SolveNlw => "solve-nlw",
            Self::CheckAdmissible => "check-admissible",
            Self::VerifyDispersive => "verify-dispersive",
            Self::VerifyStrichartz => "verify-strichartz",
            Self::OracleCompare => "oracle-compare",
        }
    }

    /// Sections a scenario cannot run without.
    fn required(self) -> &'static [&'static str] {
        match self {
            Self::SolveLinear => &["grid", "operator", "data", "time"],
            Self::SolveNlw => &["grid", "operator", "data", "time", "nonlinearity"],
            Self::CheckAdmissible => &["exponents"],
            Self::VerifyDispersive => &["grid", "operator", "data", "exponents"],
            Self::VerifyStrichartz => &["grid", "operator", "data", "time", "exponents"],
            Self::OracleCompare => &["grid", "operator", "data", "time"],
        }
    }
}

impl FromStr for ScenarioKind {
    type Err = ();
    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        Self::ALL.into_iter().find(|k| k.as_str() == s).ok_or(())
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub points: Vec<usize>,
    pub lengths: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OperatorConfig {
    /// Rows of complex entries.
    Matrix(Vec<Vec<Complex64>>),
    Diagonal(Vec<f64>),
    /// `-(a u')' + c u` on `(0, 1)`; `a`, `c` hold one value or one per node.
    SturmLiouville {
        nodes: usize,
        a: Vec<f64>,
        c: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultipointConfig {
    pub alphas: Vec<Complex64>,
    pub betas: Vec<Complex64>,
    pub lambdas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataConfig {
    /// Seeded Gaussian bumps for both `φ` and `ψ`.
    Gaussian { seed: u64, bumps: usize, amplitude: f64, zero_mean: bool, width: Option<f64> },
    /// `φ = a e^{iξ·x}` in one component, `ψ = 0`.
    SingleMode { frequency: Vec<i64>, component: usize, amplitude: Complex64 },
    /// Snapshot files; `ψ = 0` when absent.
    File { phi: PathBuf, psi: Option<PathBuf> },
}

/// Seeded Gaussian forcing sampled on its own time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceConfig {
    pub seed: u64,
    pub bumps: usize,
    pub amplitude: f64,
    pub dt: f64,
    pub zero_mean: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeConfig {
    pub horizon: f64,
    pub dt: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonlinearityConfig {
    pub kind: NonlinearityKind,
    pub lambda: f64,
    pub k: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub target: f64,
    pub radius: Option<f64>,
    pub window: Option<f64>,
    pub guess: InitialGuess,
    /// Continue in windows up to this time.
    pub t_star: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentConfig {
    pub dims: Vec<u32>,
    pub values: Vec<Exponent>,
    pub q: Option<Exponent>,
    pub r: Option<Exponent>,
    pub qt: Option<Exponent>,
    pub rt: Option<Exponent>,
    pub gamma: Option<Rational>,
    pub alpha: Rational,
    pub p: Option<Exponent>,
    pub times: Vec<f64>,
    pub ensemble: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub dt: f64,
    pub max_step: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputConfig {
    pub csv: Option<String>,
    pub snapshot: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub grid: Option<GridConfig>,
    pub operator: Option<OperatorConfig>,
    pub multipoint: Option<MultipointConfig>,
    pub data: Option<DataConfig>,
    pub source: Option<SourceConfig>,
    pub time: Option<TimeConfig>,
    pub nonlinearity: Option<NonlinearityConfig>,
    pub exponents: Option<ExponentConfig>,
    pub oracle: Option<OracleConfig>,
    pub output: OutputConfig,
}

/// Where relative paths resolve, and a seed that replaces the configured ones.
#[derive(Debug, Clone, Default)]
pub struct ParseOptions {
    pub base_dir: Option<PathBuf>,
    pub seed: Option<u64>,
}

fn err(line: usize, kind: ConfigErrorKind, message: impl Into<String>) -> Error {
    Error::Config { line, kind, message: message.into() }
}

struct Entry {
    key: String,
    value: String,
    line: usize,
    used: bool,
}

struct Section {
    name: String,
    line: usize,
    entries: Vec<Entry>,
}

impl Section {
    fn raw(&mut self, key: &str) -> Option<(String, usize)> {
        let e = self.entries.iter_mut().find(|e| e.key == key)?;
        e.used = true;
        Some((e.value.clone(), e.line))
    }

    fn get<T>(&mut self, key: &str, parse: impl Fn(&str, usize) -> Result<T>) -> Result<Option<T>> {
        self.raw(key).map(|(v, line)| parse(&v, line)).transpose()
    }

    fn need<T>(&mut self, key: &str, parse: impl Fn(&str, usize) -> Result<T>) -> Result<T> {
        let line = self.line;
        let name = self.name.clone();
        self.get(key, parse)?
            .ok_or_else(|| err(line, ConfigErrorKind::MissingKey, format!("[{name}] needs key '{key}'")))
    }

    fn finish(&self) -> Result<()> {
        match self.entries.iter().find(|e| !e.used) {
            Some(e) => {
                Err(err(e.line, ConfigErrorKind::UnknownKey, format!("unknown key '{}' in [{}]", e.key, self.name)))
            }
            None => Ok(()),
        }
    }
}

fn number<T: FromStr>(s: &str, line: usize) -> Result<T> {
    s.trim().parse().map_err(|_| err(line, ConfigErrorKind::MalformedNumber, format!("malformed number '{s}'")))
}

/// Reals, with `pi`, `2pi` and `2*pi` accepted.
pub fn parse_real(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Some(prefix) = s.strip_suffix("pi") {
        let prefix = prefix.trim().trim_end_matches('*').trim();
        let c = match prefix {
            "" => 1.0,
            "-" => -1.0,
            p => p.parse().ok()?,
        };
        return Some(c * std::f64::consts::PI);
    }
    s.parse().ok().filter(|v: &f64| v.is_finite())
}

/// Complex literals `a`, `bi`, `a+bi`, `a-bi`, `i`, `-i`.
pub fn parse_complex(s: &str) -> Option<Complex64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return None;
    }
    let Some(body) = s.strip_suffix('i') else {
        return parse_real(&s).map(|re| Complex64::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&j| (bytes[j] == b'+' || bytes[j] == b'-') && !matches!(bytes[j - 1], b'e' | b'E'));
    let imag = |t: &str| match t {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        t => parse_real(t),
    };
    match split {
        Some(j) => Some(Complex64::new(parse_real(&body[..j])?, imag(&body[j..])?)),
        None => Some(Complex64::new(0.0, imag(body)?)),
    }
}

fn real(s: &str, line: usize) -> Result<f64> {
    parse_real(s).ok_or_else(|| err(line, ConfigErrorKind::MalformedNumber, format!("malformed number '{s}'")))
}

fn complex(s: &str, line: usize) -> Result<Complex64> {
    parse_complex(s)
        .ok_or_else(|| err(line, ConfigErrorKind::MalformedComplex, format!("malformed complex literal '{s}'")))
}

fn list<T>(s: &str, line: usize, item: impl Fn(&str, usize) -> Result<T>) -> Result<Vec<T>> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty()).map(|t| item(t, line)).collect()
}

fn boolean(s: &str, line: usize) -> Result<bool> {
    match s.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(err(line, ConfigErrorKind::Syntax, format!("expected true or false, got '{s}'"))),
    }
}

fn exponent(s: &str, line: usize) -> Result<Exponent> {
    s.trim().parse().map_err(|_| err(line, ConfigErrorKind::MalformedNumber, format!("malformed exponent '{s}'")))
}

fn rational(s: &str, line: usize) -> Result<Rational> {
    parse_rational(s.trim())
        .map_err(|_| err(line, ConfigErrorKind::MalformedNumber, format!("malformed rational '{s}'")))
}

fn text(s: &str, _line: usize) -> Result<String> {
    Ok(s.trim().to_string())
}

fn split_sections(input: &str) -> Result<(Vec<Entry>, Vec<Section>)> {
    let mut top = Vec::new();
    let mut sections: Vec<Section> = Vec::new();
    for (i, raw) in input.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(name) = body.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| err(line, ConfigErrorKind::Syntax, format!("unterminated section header '{body}'")))?
                .trim();
            if !SECTIONS.contains(&name) {
                return Err(err(line, ConfigErrorKind::UnknownSection, format!("unknown section [{name}]")));
            }
            if sections.iter().any(|s| s.name == name) {
                return Err(err(line, ConfigErrorKind::Syntax, format!("section [{name}] appears twice")));
            }
            sections.push(Section { name: name.to_string(), line, entries: Vec::new() });
            continue;
        }
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| err(line, ConfigErrorKind::Syntax, format!("expected 'key = value', got '{body}'")))?;
        let key = key.trim();
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(err(line, ConfigErrorKind::Syntax, format!("malformed key '{key}'")));
        }
        let entries = match sections.last_mut() {
            Some(s) => &mut s.entries,
            None => &mut top,
        };
        if entries.iter().any(|e: &Entry| e.key == key) {
            return Err(err(line, ConfigErrorKind::Syntax, format!("key '{key}' repeated")));
        }
        entries.push(Entry { key: key.to_string(), value: value.trim().to_string(), line, used: false });
    }
    Ok((top, sections))
}

const SECTIONS: [&str; 10] =
    ["grid", "operator", "multipoint", "data", "source", "time", "nonlinearity", "exponents", "oracle", "output"];

fn invalid(line: usize, e: Error) -> Error {
    match e {
        Error::Config { .. } => e,
        other => err(line, ConfigErrorKind::Invalid, other.to_string()),
    }
}

fn check_file(base: &Path, p: &Path, line: usize) -> Result<()> {
    if base.join(p).is_file() {
        Ok(())
    } else {
        Err(err(line, ConfigErrorKind::MissingFile, format!("file '{}' not found", p.display())))
    }
}

/// [`parse_config_with`] with relative paths resolved from the working
/// directory and no seed override.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    parse_config_with(text, &ParseOptions::default())
}

/// Parses and validates a scenario file.
///
/// Each block is checked by building the object it describes, so a config
/// that parses is ready to run. The first failure is reported with its line.
pub fn parse_config_with(input: &str, options: &ParseOptions) -> Result<ScenarioConfig> {
    let (top, mut sections) = split_sections(input)?;
    let mut head = Section { name: "top".into(), line: 1, entries: top };
    let (kind_text, kind_line) =
        head.raw("scenario").ok_or_else(|| err(1, ConfigErrorKind::MissingKey, "missing 'scenario = <kind>'"))?;
    head.finish()?;
    let kind: ScenarioKind = kind_text.parse().map_err(|_| {
        err(kind_line, ConfigErrorKind::UnknownScenario, format!("unknown scenario kind '{kind_text}'"))
    })?;
    for name in kind.required() {
        if !sections.iter().any(|s| s.name == *name) {
            return Err(err(kind_line, ConfigErrorKind::MissingKey, format!("{kind} needs a [{name}] section")));
        }
    }
    let base = options.base_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    let mut take = |name: &str| sections.iter().position(|s| s.name == name).map(|i| sections.remove(i));

    let grid = take("grid").map(|mut s| -> Result<_> {
        let points = s.need("points", |v, l| list(v, l, number::<usize>))?;
        let mut lengths = s.need("lengths", |v, l| list(v, l, real))?;
        if lengths.len() == 1 && points.len() > 1 {
            lengths = vec![lengths[0]; points.len()];
        }
        s.finish()?;
        GridSpec::new(points.clone(), lengths.clone()).map_err(|e| invalid(s.line, e))?;
        Ok((GridConfig { points, lengths }, s.line))
    });
    let grid = grid.transpose()?;

    let operator = take("operator")
        .map(|mut s| -> Result<_> {
            let kind = s.need("kind", text)?;
            let cfg = match kind.as_str() {
                "matrix" => OperatorConfig::Matrix(s.need("matrix", |v, l| {
                    v.split(';').map(|row| list(row, l, complex)).collect::<Result<Vec<_>>>()
                })?),
                "diagonal" => OperatorConfig::Diagonal(s.need("entries", |v, l| list(v, l, real))?),
                "sturm-liouville" => OperatorConfig::SturmLiouville {
                    nodes: s.need("nodes", number)?,
                    a: s.need("a", |v, l| list(v, l, real))?,
                    c: s.need("c", |v, l| list(v, l, real))?,
                },
                other => {
                    return Err(err(s.line, ConfigErrorKind::Invalid, format!("unknown operator kind '{other}'")));
                }
            };
            s.finish()?;
            build_operator_config(&cfg).map_err(|e| invalid(s.line, e))?;
            Ok(cfg)
        })
        .transpose()?;

    let multipoint = take("multipoint")
        .map(|mut s| -> Result<_> {
            let cfg = MultipointConfig {
                alphas: s.get("alphas", |v, l| list(v, l, complex))?.unwrap_or_default(),
                betas: s.get("betas", |v, l| list(v, l, complex))?.unwrap_or_default(),
                lambdas: s.get("lambdas", |v, l| list(v, l, real))?.unwrap_or_default(),
            };
            s.finish()?;
            build_multipoint(Some(&cfg)).map_err(|e| invalid(s.line, e))?;
            Ok(cfg)
        })
        .transpose()?;

    let data = take("data")
        .map(|mut s| -> Result<_> {
            let kind = s.need("kind", text)?;
            let cfg = match kind.as_str() {
                "gaussian" => {
                    let seed = options.seed.map(Ok).or_else(|| s.get("seed", number).transpose()).transpose()?;
                    let seed =
                        seed.ok_or_else(|| err(s.line, ConfigErrorKind::MissingSeed, "gaussian data needs a seed"))?;
                    let _ = s.raw("seed");
                    DataConfig::Gaussian {
                        seed,
                        bumps: s.get("bumps", number)?.unwrap_or(3),
                        amplitude: s.get("amplitude", real)?.unwrap_or(1.0),
                        zero_mean: s.get("zero_mean", boolean)?.unwrap_or(false),
                        width: s.get("width", real)?,
                    }
                }
                "single-mode" => DataConfig::SingleMode {
                    frequency: s.need("frequency", |v, l| list(v, l, number::<i64>))?,
                    component: s.get("component", number)?.unwrap_or(0),
                    amplitude: s.get("amplitude", complex)?.unwrap_or(Complex64::new(1.0, 0.0)),
                },
                "file" => {
                    let phi: PathBuf = s.need("phi", text)?.into();
                    check_file(&base, &phi, s.line)?;
                    let psi: Option<PathBuf> = s.get("psi", text)?.map(Into::into);
                    if let Some(p) = &psi {
                        check_file(&base, p, s.line)?;
                    }
                    DataConfig::File { phi, psi }
                }
                other => return Err(err(s.line, ConfigErrorKind::Invalid, format!("unknown data kind '{other}'"))),
            };
            s.finish()?;
            Ok(cfg)
        })
        .transpose()?;

    let source = take("source")
        .map(|mut s| -> Result<_> {
            let kind = s.need("kind", text)?;
            let seed = match options.seed {
                Some(v) => {
                    let _ = s.raw("seed");
                    Some(v.wrapping_add(1))
                }
                None => s.get("seed", number)?,
            };
            let cfg = match kind.as_str() {
                "none" => None,
                "gaussian" => Some(SourceConfig {
                    seed: seed
                        .ok_or_else(|| err(s.line, ConfigErrorKind::MissingSeed, "gaussian source needs a seed"))?,
                    bumps: s.get("bumps", number)?.unwrap_or(2),
                    amplitude: s.get("amplitude", real)?.unwrap_or(1.0),
                    dt: s.need("dt", real)?,
                    zero_mean: s.get("zero_mean", boolean)?.unwrap_or(false),
                }),
                other => return Err(err(s.line, ConfigErrorKind::Invalid, format!("unknown source kind '{other}'"))),
            };
            s.finish()?;
            if cfg.as_ref().is_some_and(|c| !(c.dt > 0.0)) {
                return Err(err(s.line, ConfigErrorKind::Invalid, "source dt must be positive"));
            }
            Ok(cfg)
        })
        .transpose()?
        .flatten();

    let time = take("time")
        .map(|mut s| -> Result<_> {
            let cfg = TimeConfig { horizon: s.need("horizon", real)?, dt: s.need("dt", real)? };
            s.finish()?;
            crate::spectral::TimeGrid::covering(cfg.horizon, cfg.dt).map_err(|e| invalid(s.line, e))?;
            Ok(cfg)
        })
        .transpose()?;

    let nonlinearity = take("nonlinearity")
        .map(|mut s| -> Result<_> {
            let kind = match s.need("kind", text)?.as_str() {
                "scalar-power" => NonlinearityKind::ScalarPower,
                "fiber-norm-power" => NonlinearityKind::FiberNormPower,
                other => return Err(err(s.line, ConfigErrorKind::Invalid, format!("unknown nonlinearity '{other}'"))),
            };
            let guess = match s.get("guess", text)?.as_deref() {
                None | Some("linear") => InitialGuess::Linear,
                Some("zero") => InitialGuess::Zero,
                Some(other) => {
                    return Err(err(s.line, ConfigErrorKind::Invalid, format!("unknown initial guess '{other}'")))
                }
            };
            let cfg = NonlinearityConfig {
                kind,
                lambda: s.need("lambda", real)?,
                k: s.need("k", real)?,
                tol: s.get("tol", real)?.unwrap_or(1e-10),
                max_iter: s.get("max_iter", number)?.unwrap_or(50),
                target: s.get("target", real)?.unwrap_or(0.5),
                radius: s.get("radius", real)?,
                window: s.get("window", real)?,
                guess,
                t_star: s.get("t_star", real)?,
            };
            s.finish()?;
            crate::nonlinear::Nonlinearity::new(cfg.kind, cfg.lambda, cfg.k).map_err(|e| invalid(s.line, e))?;
            Ok(cfg)
        })
        .transpose()?;

    let exponents = take("exponents")
        .map(|mut s| -> Result<_> {
            let cfg = ExponentConfig {
                dims: s.get("dims", |v, l| list(v, l, number::<u32>))?.unwrap_or_default(),
                values: s.get("values", |v, l| list(v, l, exponent))?.unwrap_or_default(),
                q: s.get("q", exponent)?,
                r: s.get("r", exponent)?,
                qt: s.get("qt", exponent)?,
                rt: s.get("rt", exponent)?,
                gamma: s.get("gamma", rational)?,
                alpha: s.get("alpha", rational)?.unwrap_or_else(|| Rational::new(0, 1)),
                p: s.get("p", exponent)?,
                times: s.get("times", |v, l| list(v, l, real))?.unwrap_or_default(),
                ensemble: s.get("ensemble", number)?.unwrap_or(1),
            };
            s.finish()?;
            Ok((cfg, s.line))
        })
        .transpose()?;

    let oracle = take("oracle")
        .map(|mut s| -> Result<_> {
            let cfg = OracleConfig {
                dt: s.get("dt", real)?.unwrap_or(1e-3),
                max_step: s.get("max_step", real)?.unwrap_or(1e-3),
            };
            s.finish()?;
            Ok(cfg)
        })
        .transpose()?;

    let output = take("output")
        .map(|mut s| -> Result<_> {
            let cfg = OutputConfig { csv: s.get("csv", text)?, snapshot: s.get("snapshot", text)? };
            s.finish()?;
            Ok(cfg)
        })
        .transpose()?
        .unwrap_or_default();

    if let Some(s) = sections.first() {
        return Err(err(s.line, ConfigErrorKind::Invalid, format!("[{}] is not used by {kind}", s.name)));
    }

    let (grid, grid_line) = match grid {
        Some((g, l)) => (Some(g), l),
        None => (None, 0),
    };
    if let (Some(g), Some(op)) = (&grid, &operator) {
        if let Some(DataConfig::SingleMode { frequency, component, .. }) = &data {
            if frequency.len() != g.points.len() || *component >= operator_dim(op) {
                return Err(err(
                    grid_line,
                    ConfigErrorKind::Invalid,
                    "single-mode frequency or component does not fit the grid",
                ));
            }
        }
    }
    let (exponents, exp_line) = match exponents {
        Some((e, l)) => (Some(e), l),
        None => (None, 0),
    };
    if let Some(e) = &exponents {
        check_exponents(kind, e, grid.as_ref()).map_err(|x| invalid(exp_line, x))?;
    }
    Ok(ScenarioConfig { kind, grid, operator, multipoint, data, source, time, nonlinearity, exponents, oracle, output })
}

fn operator_dim(op: &OperatorConfig) -> usize {
    match op {
        OperatorConfig::Matrix(rows) => rows.len(),
        OperatorConfig::Diagonal(e) => e.len(),
        OperatorConfig::SturmLiouville { nodes, .. } => nodes.saturating_sub(2),
    }
}

fn check_exponents(kind: ScenarioKind, e: &ExponentConfig, grid: Option<&GridConfig>) -> Result<()> {
    let missing = |k: &str| Error::InvalidExponent(format!("{kind} needs exponent '{k}'"));
    match kind {
        ScenarioKind::CheckAdmissible => {
            if e.dims.is_empty() || e.values.is_empty() {
                return Err(missing("dims and values"));
            }
        }
        ScenarioKind::VerifyDispersive => {
            e.p.ok_or_else(|| missing("p"))?;
            if e.times.is_empty() {
                return Err(missing("times"));
            }
        }
        ScenarioKind::VerifyStrichartz => {
            gap_relation(e, grid.map_or(0, |g| g.points.len() as u32))?;
        }
        _ => {}
    }
    Ok(())
}

/// The gap relation an `[exponents]` block describes; `(q̃, r̃)` default to
/// `(q, r)` and `γ` to the value the pair fixes.
pub fn gap_relation(e: &ExponentConfig, n: u32) -> Result<GapRelation> {
    let q = e.q.ok_or_else(|| Error::InvalidExponent("missing exponent 'q'".into()))?;
    let r = e.r.ok_or_else(|| Error::InvalidExponent("missing exponent 'r'".into()))?;
    let dual = (e.qt.unwrap_or(q), e.rt.unwrap_or(r));
    let gamma = e.gamma.unwrap_or_else(|| crate::strichartz::gamma_for(n, q, r));
    GapRelation::new(n, gamma, (q, r), dual, e.alpha)
}

pub fn build_grid(cfg: &GridConfig) -> Result<GridSpec> {
    GridSpec::new(cfg.points.clone(), cfg.lengths.clone())
}

fn broadcast(v: &[f64], n: usize) -> Vec<f64> {
    if v.len() == 1 {
        vec![v[0]; n]
    } else {
        v.to_vec()
    }
}

pub fn build_operator_config(cfg: &OperatorConfig) -> Result<OperatorSpec> {
    match cfg {
        OperatorConfig::Matrix(rows) => {
            let d = rows.len();
            if d == 0 || rows.iter().any(|r| r.len() != d) {
                return Err(Error::InvalidOperator("matrix must be square and nonempty".into()));
            }
            build_operator(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
        }
        OperatorConfig::Diagonal(e) => OperatorSpec::diagonal(e),
        OperatorConfig::SturmLiouville { nodes, a, c } => {
            build_sturm_liouville(&broadcast(a, *nodes), &broadcast(c, *nodes), *nodes)
        }
    }
}

/// The Cauchy problem when the block is absent.
pub fn build_multipoint(cfg: Option<&MultipointConfig>) -> Result<MultipointSpec> {
    match cfg {
        None => Ok(MultipointSpec::cauchy()),
        Some(c) => MultipointSpec::new(c.alphas.clone(), c.betas.clone(), c.lambdas.clone()),
    }
}

/// Shortest `Debug` form, which parses back to the same `f64`.
fn fmt_real(v: f64) -> String {
    format!("{v:?}")
}

pub fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        fmt_real(z.re)
    } else if z.im < 0.0 {
        format!("{}-{}i", fmt_real(z.re), fmt_real(-z.im))
    } else {
        format!("{}+{}i", fmt_real(z.re), fmt_real(z.im))
    }
}

fn join<T>(v: &[T], f: impl Fn(&T) -> String) -> String {
    v.iter().map(f).collect::<Vec<_>>().join(", ")
}

impl fmt::Display for ScenarioConfig {
    /// Canonical form: fixed section and key order, every default spelled out.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        writeln!(s, "scenario = {}", self.kind)?;
        if let Some(g) = &self.grid {
            writeln!(s, "\n[grid]")?;
            writeln!(s, "points = {}", join(&g.points, |p| p.to_string()))?;
            writeln!(s, "lengths = {}", join(&g.lengths, |v| fmt_real(*v)))?;
        }
        if let Some(op) = &self.operator {
            writeln!(s, "\n[operator]")?;
            match op {
                OperatorConfig::Matrix(rows) => {
                    writeln!(s, "kind = matrix")?;
                    let rows: Vec<String> = rows.iter().map(|r| join(r, |z| format_complex(*z))).collect();
                    writeln!(s, "matrix = {}", rows.join("; "))?;
                }
                OperatorConfig::Diagonal(e) => {
                    writeln!(s, "kind = diagonal")?;
                    writeln!(s, "entries = {}", join(e, |v| fmt_real(*v)))?;
                }
                OperatorConfig::SturmLiouville { nodes, a, c } => {
                    writeln!(s, "kind = sturm-liouville")?;
                    writeln!(s, "nodes = {nodes}")?;
                    writeln!(s, "a = {}", join(a, |v| fmt_real(*v)))?;
                    writeln!(s, "c = {}", join(c, |v| fmt_real(*v)))?;
                }
            }
        }
        if let Some(m) = &self.multipoint {
            writeln!(s, "\n[multipoint]")?;
            writeln!(s, "alphas = {}", join(&m.alphas, |z| format_complex(*z)))?;
            writeln!(s, "betas = {}", join(&m.betas, |z| format_complex(*z)))?;
            writeln!(s, "lambdas = {}", join(&m.lambdas, |v| fmt_real(*v)))?;
        }
        if let Some(d) = &self.data {
            writeln!(s, "\n[data]")?;
            match d {
                DataConfig::Gaussian { seed, bumps, amplitude, zero_mean, width } => {
                    writeln!(s, "kind = gaussian")?;
                    writeln!(s, "seed = {seed}")?;
                    writeln!(s, "bumps = {bumps}")?;
                    writeln!(s, "amplitude = {}", fmt_real(*amplitude))?;
                    writeln!(s, "zero_mean = {zero_mean}")?;
                    if let Some(w) = width {
                        writeln!(s, "width = {}", fmt_real(*w))?;
                    }
                }
                DataConfig::SingleMode { frequency, component, amplitude } => {
                    writeln!(s, "kind = single-mode")?;
                    writeln!(s, "frequency = {}", join(frequency, |k| k.to_string()))?;
                    writeln!(s, "component = {component}")?;
                    writeln!(s, "amplitude = {}", format_complex(*amplitude))?;
                }
                DataConfig::File { phi, psi } => {
                    writeln!(s, "kind = file")?;
                    writeln!(s, "phi = {}", phi.display())?;
                    if let Some(p) = psi {
                        writeln!(s, "psi = {}", p.display())?;
                    }
                }
            }
        }
        if let Some(src) = &self.source {
            writeln!(s, "\n[source]")?;
            writeln!(s, "kind = gaussian")?;
            writeln!(s, "seed = {}", src.seed)?;
            writeln!(s, "bumps = {}", src.bumps)?;
            writeln!(s, "amplitude = {}", fmt_real(src.amplitude))?;
            writeln!(s, "dt = {}", fmt_real(src.dt))?;
            writeln!(s, "zero_mean = {}", src.zero_mean)?;
        }
        if let Some(t) = &self.time {
            writeln!(s, "\n[time]")?;
            writeln!(s, "horizon = {}", fmt_real(t.horizon))?;
            writeln!(s, "dt = {}", fmt_real(t.dt))?;
        }
        if let Some(n) = &self.nonlinearity {
            writeln!(s, "\n[nonlinearity]")?;
            let kind = match n.kind {
                NonlinearityKind::ScalarPower => "scalar-power",
                NonlinearityKind::FiberNormPower => "fiber-norm-power",
            };
            writeln!(s, "kind = {kind}")?;
            writeln!(s, "lambda = {}", fmt_real(n.lambda))?;
            writeln!(s, "k = {}", fmt_real(n.k))?;
            writeln!(s, "tol = {}", fmt_real(n.tol))?;
            writeln!(s, "max_iter = {}", n.max_iter)?;
            writeln!(s, "target = {}", fmt_real(n.target))?;
            if let Some(v) = n.radius {
                writeln!(s, "radius = {}", fmt_real(v))?;
            }
            if let Some(v) = n.window {
                writeln!(s, "window = {}", fmt_real(v))?;
            }
            let guess = match n.guess {
                InitialGuess::Linear => "linear",
                InitialGuess::Zero => "zero",
            };
            writeln!(s, "guess = {guess}")?;
            if let Some(v) = n.t_star {
                writeln!(s, "t_star = {}", fmt_real(v))?;
            }
        }
        if let Some(e) = &self.exponents {
            writeln!(s, "\n[exponents]")?;
            if !e.dims.is_empty() {
                writeln!(s, "dims = {}", join(&e.dims, |d| d.to_string()))?;
            }
            if !e.values.is_empty() {
                writeln!(s, "values = {}", join(&e.values, |v| v.to_string()))?;
            }
            for (key, v) in [("q", e.q), ("r", e.r), ("qt", e.qt), ("rt", e.rt), ("p", e.p)] {
                if let Some(v) = v {
                    writeln!(s, "{key} = {v}")?;
                }
            }
            if let Some(g) = e.gamma {
                writeln!(s, "gamma = {g}")?;
            }
            writeln!(s, "alpha = {}", e.alpha)?;
            if !e.times.is_empty() {
                writeln!(s, "times = {}", join(&e.times, |v| fmt_real(*v)))?;
            }
            writeln!(s, "ensemble = {}", e.ensemble)?;
        }
        if let Some(o) = &self.oracle {
            writeln!(s, "\n[oracle]")?;
            writeln!(s, "dt = {}", fmt_real(o.dt))?;
            writeln!(s, "max_step = {}", fmt_real(o.max_step))?;
        }
        if self.output != OutputConfig::default() {
            writeln!(s, "\n[output]")?;
            if let Some(c) = &self.output.csv {
                writeln!(s, "csv = {c}")?;
            }
            if let Some(c) = &self.output.snapshot {
                writeln!(s, "snapshot = {c}")?;
            }
        }
        f.write_str(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LINEAR: &str = "\
scenario = solve-linear

[grid]
points = 16, 16
lengths = 2pi

[operator]
kind = matrix
matrix = 2, 0.5-0.25i; 0.5+0.25i, 1.5

[multipoint]
alphas = 0.2, 0.1+0.05i
betas = 0.3, -0.1
lambdas = 0.4, 0.8

[data]
kind = gaussian
seed = 7

[time]
horizon = 1
dt = 0.05
";

    fn kind_of(text: &str) -> (usize, ConfigErrorKind) {
        match parse_config(text) {
            Err(Error::Config { line, kind, .. }) => (line, kind),
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("1+2i"), Some(Complex64::new(1.0, 2.0)));
        assert_eq!(parse_complex("-1.5e-3-2e+2i"), Some(Complex64::new(-1.5e-3, -200.0)));
        assert_eq!(parse_complex("-i"), Some(Complex64::new(0.0, -1.0)));
        assert_eq!(parse_complex("3"), Some(Complex64::new(3.0, 0.0)));
        assert_eq!(parse_complex("2.5i"), Some(Complex64::new(0.0, 2.5)));
        assert_eq!(parse_complex("1+i"), Some(Complex64::new(1.0, 1.0)));
        assert_eq!(parse_complex("1+2j"), None);
        assert_eq!(parse_complex("1++2i"), None);
        let z = Complex64::new(0.1, -1e-20);
        assert_eq!(parse_complex(&format_complex(z)), Some(z));
    }

    #[test]
    fn template_round_trips() {
        let cfg = parse_config(LINEAR).unwrap();
        assert_eq!(cfg.grid.as_ref().unwrap().lengths, vec![2.0 * std::f64::consts::PI; 2]);
        let printed = cfg.to_string();
        let again = parse_config(&printed).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(again.to_string(), printed);
    }

    #[test]
    fn distinct_failures() {
        let cancel = LINEAR
            .replace("alphas = 0.2, 0.1+0.05i", "alphas = 1, 0.1")
            .replace("betas = 0.3, -0.1", "betas = -1, 0.2");
        assert_eq!(kind_of(&cancel), (11, ConfigErrorKind::Invalid));
        assert_eq!(kind_of(&LINEAR.replace("seed = 7\n", "")), (16, ConfigErrorKind::MissingSeed));
        assert_eq!(kind_of(&LINEAR.replace("betas = 0.3", "betas = 0.3+")).1, ConfigErrorKind::MalformedComplex);
        assert_eq!(kind_of(&LINEAR.replace("dt = 0.05", "dt = fast")), (22, ConfigErrorKind::MalformedNumber));
        assert_eq!(kind_of(&LINEAR.replace("seed = 7", "seed = 7\ncolour = red")), (19, ConfigErrorKind::UnknownKey));
        assert_eq!(kind_of(&LINEAR.replace("[time]", "[clock]")).1, ConfigErrorKind::UnknownSection);
        assert_eq!(kind_of(&LINEAR.replace("solve-linear", "solve-heat")), (1, ConfigErrorKind::UnknownScenario));
        assert_eq!(
            kind_of(&LINEAR.replace("kind = gaussian\nseed = 7", "kind = file\nphi = /nonexistent.mwf")).1,
            ConfigErrorKind::MissingFile
        );
        assert_eq!(
            kind_of("scenario = solve-linear\n[grid]\npoints = 8\nlengths = 1\n").1,
            ConfigErrorKind::MissingKey
        );
    }

    #[test]
    fn seed_override_fills_missing_seed() {
        let opts = ParseOptions { seed: Some(99), ..Default::default() };
        let cfg = parse_config_with(&LINEAR.replace("seed = 7\n", ""), &opts).unwrap();
        assert!(matches!(cfg.data, Some(DataConfig::Gaussian { seed: 99, .. })));
    }
}
