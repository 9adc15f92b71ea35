//! Run configuration: a TOML file plus command-line overrides.

use std::path::{Path, PathBuf};

use harmloop::dpw::{default_lambdas, Domain, GridSpec, HoloPoly, PotentialSpec};
use harmloop::laurent::{LaurentLoop, C64};
use harmloop::liegroup::{SolvLoopElement, SolvParams};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

const UNIT_CIRCLE_TOL: f64 = 1e-12;
const DEFAULT_RESOLUTION: usize = 33;

/// A complex number written as `[re, im]`.
pub type Pair = [f64; 2];

fn c(p: Pair) -> C64 {
    C64::new(p[0], p[1])
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub potential: Option<PotentialConfig>,
    #[serde(default)]
    pub domain: DomainConfig,
    /// Spectral parameters for the associated family.
    pub lambdas: Option<Vec<Pair>>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub tolerances: TolConfig,
    pub split: Option<SplitConfig>,
    #[serde(default)]
    pub oracle: OracleConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    pub mu: Pair,
    #[serde(default)]
    pub base_point: Pair,
    #[serde(default = "default_band")]
    pub band: usize,
    /// Polynomial coefficients, lowest degree first.
    #[serde(default)]
    pub xi1: Vec<Pair>,
    #[serde(default)]
    pub xi2: Vec<Pair>,
    #[serde(default)]
    pub xi3: Vec<Pair>,
}

fn default_band() -> usize {
    harmloop::laurent::DEFAULT_BAND
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DomainConfig {
    pub x: Pair,
    pub y: Pair,
    pub resolution: Option<usize>,
    pub nx: Option<usize>,
    pub ny: Option<usize>,
}

impl Default for DomainConfig {
    fn default() -> Self {
        DomainConfig {
            x: [-1.0, 1.0],
            y: [-1.0, 1.0],
            resolution: None,
            nx: None,
            ny: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub stem: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("."),
            stem: "harmloop".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TolConfig {
    /// Residual threshold; `10·h²` when absent.
    pub residual: Option<f64>,
    pub oracle: Option<f64>,
    pub route: Option<f64>,
    pub split: Option<f64>,
    /// Largest tolerated fraction of masked grid cells.
    pub masked: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitConfig {
    /// Split the Step-1 frame of the potential at this point.
    pub z: Option<Pair>,
    /// Or split an explicit loop given by coefficients `λ^{−band} … λ^{band}`.
    pub band: Option<usize>,
    pub x1: Option<Vec<Pair>>,
    pub x2: Option<Vec<Pair>>,
    pub x3: Option<Vec<Pair>>,
    pub mu: Option<Pair>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    pub steps: usize,
    /// Sample points per axis.
    pub samples: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { steps: 512, samples: 5 }
    }
}

/// Flag overrides applied on top of the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub band: Option<usize>,
    pub grid: Option<usize>,
    pub lambdas: Option<Vec<C64>>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Synth,
    Verify,
    Split,
    Gallery,
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum SplitInput {
    Point(C64),
    Loop(SolvLoopElement),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub residual: f64,
    pub oracle: f64,
    pub route: f64,
    pub split: f64,
    pub masked: f64,
}

/// Validated configuration for one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub gallery: Option<String>,
    pub potential: Option<PotentialSpec>,
    pub grid: GridSpec,
    pub lambdas: Vec<C64>,
    pub tolerances: Tolerances,
    pub split: Option<SplitInput>,
    pub oracle_steps: usize,
    pub oracle_samples: usize,
    #[serde(skip)]
    pub out_dir: PathBuf,
    pub stem: String,
}

impl RunConfig {
    /// SHA-256 of the canonical JSON form; output locations are excluded.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn h(&self) -> f64 {
        self.grid.hx().max(self.grid.hy())
    }

    pub fn output_path(&self, ext: &str) -> PathBuf {
        self.out_dir.join(format!("{}.{ext}", self.stem))
    }

    pub fn require_potential(&self) -> Result<&PotentialSpec, CliError> {
        self.potential
            .as_ref()
            .ok_or_else(|| CliError::Config("this command needs a [potential] section".into()))
    }
}

pub fn read_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<FileConfig, CliError> {
    toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
}

fn poly(name: &str, coeffs: &[Pair]) -> Result<HoloPoly, CliError> {
    HoloPoly::new(coeffs.iter().map(|&p| c(p)).collect())
        .map_err(|e| CliError::Config(format!("{name}: {e}")))
}

fn loop_entry(name: &str, band: usize, coeffs: &Option<Vec<Pair>>) -> Result<LaurentLoop, CliError> {
    match coeffs {
        None => Ok(LaurentLoop::zero(band)),
        Some(v) => LaurentLoop::from_coeffs(band, v.iter().map(|&p| c(p)).collect())
            .map_err(|e| CliError::Config(format!("split.{name}: {e}"))),
    }
}

/// `"roots:N"` for the `N`-th roots of unity, or comma-separated `re:im` pairs.
pub fn parse_lambdas(s: &str) -> Result<Vec<C64>, CliError> {
    let bad = || CliError::Config(format!("cannot parse lambdas {s:?}"));
    if let Some(n) = s.strip_prefix("roots:") {
        let n: usize = n.trim().parse().map_err(|_| bad())?;
        if n == 0 {
            return Err(bad());
        }
        return Ok((0..n)
            .map(|k| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64))
            .collect());
    }
    s.split(',')
        .map(|item| {
            let (re, im) = item.trim().split_once(':').ok_or_else(bad)?;
            Ok(C64::new(
                re.trim().parse().map_err(|_| bad())?,
                im.trim().parse().map_err(|_| bad())?,
            ))
        })
        .collect()
}

fn check_lambdas(lambdas: &[C64]) -> Result<(), CliError> {
    if lambdas.is_empty() {
        return Err(CliError::Config("lambda list is empty".into()));
    }
    for l in lambdas {
        if (l.norm() - 1.0).abs() > UNIT_CIRCLE_TOL {
            return Err(CliError::Config(format!(
                "lambda {l} is not on the unit circle (|λ| = {})",
                l.norm()
            )));
        }
    }
    Ok(())
}

pub fn resolve(
    command: Command,
    gallery: Option<String>,
    file: FileConfig,
    ov: &Overrides,
) -> Result<RunConfig, CliError> {
    let d = &file.domain;
    let domain = Domain::new(d.x[0], d.x[1], d.y[0], d.y[1]);
    domain.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let res = ov.grid.or(d.resolution).unwrap_or(DEFAULT_RESOLUTION);
    let (nx, ny) = match ov.grid {
        Some(n) => (n, n),
        None => (d.nx.unwrap_or(res), d.ny.unwrap_or(res)),
    };
    let grid = GridSpec::new(domain, nx, ny).map_err(|e| CliError::Config(e.to_string()))?;

    let potential = match &file.potential {
        None => None,
        Some(p) => {
            let band = ov.band.unwrap_or(p.band);
            let xi = [poly("xi1", &p.xi1)?, poly("xi2", &p.xi2)?, poly("xi3", &p.xi3)?];
            let pot = PotentialSpec::new(xi, SolvParams::new(p.mu[0], p.mu[1]), c(p.base_point), band)
                .map_err(|e| CliError::Config(e.to_string()))?;
            Some(pot)
        }
    };

    let lambdas = match (&ov.lambdas, &file.lambdas) {
        (Some(l), _) => l.clone(),
        (None, Some(l)) => l.iter().map(|&p| c(p)).collect(),
        (None, None) => default_lambdas(),
    };
    check_lambdas(&lambdas)?;

    let t = file.tolerances;
    let h = grid.hx().max(grid.hy());
    let tolerances = Tolerances {
        residual: ov.tol.or(t.residual).unwrap_or(10.0 * h * h),
        oracle: t.oracle.unwrap_or(1e-8),
        route: t.route.unwrap_or(1e-8),
        split: t.split.unwrap_or(harmloop::loopfactor::RECONSTRUCT_TOL),
        masked: t.masked.unwrap_or(0.01),
    };
    for (name, v) in [
        ("residual", tolerances.residual),
        ("oracle", tolerances.oracle),
        ("route", tolerances.route),
        ("split", tolerances.split),
        ("masked", tolerances.masked),
    ] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(CliError::Config(format!("tolerance {name} must be finite and >= 0")));
        }
    }

    let split = match &file.split {
        None => None,
        Some(s) if s.x1.is_some() || s.x2.is_some() || s.x3.is_some() => {
            let band = ov.band.or(s.band).unwrap_or_else(default_band);
            let mu = s
                .mu
                .or(file.potential.as_ref().map(|p| p.mu))
                .ok_or_else(|| CliError::Config("split loop needs mu".into()))?;
            Some(SplitInput::Loop(SolvLoopElement::new(
                loop_entry("x1", band, &s.x1)?,
                loop_entry("x2", band, &s.x2)?,
                loop_entry("x3", band, &s.x3)?,
                SolvParams::new(mu[0], mu[1]),
            )))
        }
        Some(s) => s.z.map(|z| SplitInput::Point(c(z))),
    };

    if file.oracle.steps < 16 {
        return Err(CliError::Config("oracle.steps must be at least 16".into()));
    }
    if file.oracle.samples < 1 {
        return Err(CliError::Config("oracle.samples must be at least 1".into()));
    }
    if command == Command::Gallery && gallery.is_none() {
        return Err(CliError::Config("gallery needs a fixture name".into()));
    }

    Ok(RunConfig {
        command,
        gallery,
        potential,
        grid,
        lambdas,
        tolerances,
        split,
        oracle_steps: file.oracle.steps,
        oracle_samples: file.oracle.samples,
        out_dir: ov.out.clone().unwrap_or(file.output.dir),
        stem: file.output.stem,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const PLANE: &str = r#"
        [potential]
        mu = [1.0, -1.0]
        xi1 = [[-0.25, 0.0]]
        xi2 = [[0.0, 0.25]]

        [domain]
        x = [-1.0, 1.0]
        y = [-1.0, 1.0]
        resolution = 9
    "#;

    #[test]
    fn plane_config() {
        let cfg = resolve(Command::Synth, None, parse(PLANE).unwrap(), &Overrides::default()).unwrap();
        let p = cfg.potential.as_ref().unwrap();
        assert_eq!(p.band, 12);
        assert_eq!(p.xi[0].coeffs(), &[C64::new(-0.25, 0.0)]);
        assert!(p.xi[2].is_zero());
        assert_eq!(cfg.grid.nx, 9);
        assert_eq!(cfg.lambdas.len(), 8);
        assert!((cfg.tolerances.residual - 10.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn overrides_win() {
        let ov = Overrides {
            band: Some(20),
            grid: Some(17),
            lambdas: Some(parse_lambdas("1:0,-1:0").unwrap()),
            tol: Some(1e-3),
            out: None,
        };
        let cfg = resolve(Command::Synth, None, parse(PLANE).unwrap(), &ov).unwrap();
        assert_eq!(cfg.potential.unwrap().band, 20);
        assert_eq!((cfg.grid.nx, cfg.grid.ny), (17, 17));
        assert_eq!(cfg.lambdas, vec![C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]);
        assert_eq!(cfg.tolerances.residual, 1e-3);
    }

    #[test]
    fn rejects_bad_input() {
        let f = || parse(PLANE).unwrap();
        let res = |ov: Overrides| resolve(Command::Synth, None, f(), &ov);
        assert!(res(Overrides { grid: Some(4), ..Default::default() }).is_err());
        assert!(res(Overrides { band: Some(1), ..Default::default() }).is_err());
        assert!(res(Overrides {
            lambdas: Some(vec![C64::new(1.0, 1e-5)]),
            ..Default::default()
        })
        .is_err());
        assert!(parse("[potential]\nmu = [1.0]\n").is_err());
        assert!(parse("bogus = 1\n").is_err());
        assert!(resolve(Command::Gallery, None, FileConfig::default(), &Overrides::default()).is_err());
    }

    #[test]
    fn lambda_syntax() {
        let r = parse_lambdas("roots:4").unwrap();
        assert_eq!(r.len(), 4);
        assert!((r[1] - C64::new(0.0, 1.0)).norm() < 1e-15);
        assert!(parse_lambdas("1,0").is_err());
        assert!(parse_lambdas("roots:0").is_err());
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = resolve(Command::Synth, None, parse(PLANE).unwrap(), &Overrides::default()).unwrap();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
        b.out_dir = PathBuf::from("/elsewhere");
        assert_eq!(a.hash(), b.hash());
        b.lambdas.pop();
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn partial_sections_use_defaults() {
        let f = parse("[output]\nstem = \"a\"\n[domain]\nresolution = 7\n[oracle]\nsteps = 64\n").unwrap();
        assert_eq!(f.output.dir, PathBuf::from("."));
        assert_eq!(f.domain.x, [-1.0, 1.0]);
        assert_eq!(f.oracle.samples, 5);
    }

    #[test]
    fn explicit_split_loop() {
        let text = "[split]\nband = 1\nmu = [1.0, 1.0]\nx1 = [[1.0, 0.0], [0.0, 0.0], [1.0, 0.0]]\n";
        let cfg = resolve(Command::Split, None, parse(text).unwrap(), &Overrides::default()).unwrap();
        match cfg.split {
            Some(SplitInput::Loop(g)) => {
                assert_eq!(g.band(), 1);
                assert_eq!(g.entry(0).coeff(-1), C64::new(1.0, 0.0));
            }
            other => panic!("unexpected {other:?}"),
        }
        let bad = "[split]\nband = 2\nmu = [1.0, 1.0]\nx1 = [[1.0, 0.0]]\n";
        assert!(resolve(Command::Split, None, parse(bad).unwrap(), &Overrides::default()).is_err());
    }
}
