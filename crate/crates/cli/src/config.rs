use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use boundmoments::closed_form::pt_k_from_kappa;
use boundmoments::moments::choose_gamma;
use boundmoments::Potential;
use clap::{Args, ValueEnum};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Options shared by the `eigen`, `moments` and `wavefield` subcommands.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// JSON file with any of the options below; flags given on the command line win.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Potential, e.g. `poschl-teller()`, `morse()` or `poly(0,0,0,0,1)`.
    #[arg(long)]
    pub potential: Option<String>,
    /// Asymptotic parameter k.
    #[arg(long, conflicts_with = "kappa")]
    pub k: Option<f64>,
    /// Poschl-Teller depth parameter; sets k = sqrt(kappa (kappa + 1)).
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Level index or inclusive range, `4` or `0..8`.
    #[arg(long)]
    pub n: Option<String>,
    /// Correction order.
    #[arg(long)]
    pub order: Option<u8>,
    /// `auto`, a value, or a comma-separated sweep list.
    #[arg(long)]
    pub gamma: Option<String>,
    /// Target accuracy of the Numerov eigenvalues.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Also write an SVG chart next to the output file.
    #[arg(long)]
    pub plot: bool,
    /// Output file; standard output when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Grid points for `wavefield`.
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    potential: Option<String>,
    k: Option<f64>,
    kappa: Option<f64>,
    n: Option<NSpec>,
    order: Option<u8>,
    gamma: Option<GammaSpec>,
    tol: Option<f64>,
    format: Option<Format>,
    plot: Option<bool>,
    output: Option<PathBuf>,
    points: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum NSpec {
    One(usize),
    Text(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum GammaSpec {
    Value(f64),
    List(Vec<f64>),
    Text(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum GammaPolicy {
    Auto,
    Fixed(f64),
    Sweep(Vec<f64>),
}

impl GammaPolicy {
    fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.eq_ignore_ascii_case("auto") {
            return Ok(Self::Auto);
        }
        let values = text
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .with_context(|| format!("bad gamma `{text}`"))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_values(values)
    }

    fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
            bail!("gamma values must be positive, got {values:?}");
        }
        Ok(match values.as_slice() {
            [g] => Self::Fixed(*g),
            _ => Self::Sweep(values),
        })
    }

    /// The gamma values to use at energy `eps`.
    pub fn values(&self, p: &Potential, eps: f64) -> Result<Vec<f64>> {
        Ok(match self {
            Self::Auto => vec![choose_gamma(p, eps)?],
            Self::Fixed(g) => vec![*g],
            Self::Sweep(list) => list.clone(),
        })
    }

    /// The single gamma for commands that do not sweep.
    pub fn single(&self, p: &Potential, eps: f64) -> Result<f64> {
        match self {
            Self::Sweep(_) => bail!("a gamma sweep is only supported by `moments`"),
            _ => Ok(self.values(p, eps)?[0]),
        }
    }
}

/// Fully resolved options.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub potential: Potential,
    pub k: f64,
    pub levels: RangeInclusive<usize>,
    pub order: u8,
    pub gamma: GammaPolicy,
    pub tol: f64,
    pub format: Format,
    pub plot: bool,
    pub output: Option<PathBuf>,
    pub points: usize,
}

pub fn parse_levels(text: &str) -> Result<RangeInclusive<usize>> {
    let text = text.trim();
    let range = match text.split_once("..") {
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            a.trim().parse()?..=b.trim().parse()?
        }
        None => {
            let n = text.parse()?;
            n..=n
        }
    };
    if range.is_empty() {
        bail!("level range `{text}` is empty");
    }
    Ok(range)
}

impl RunConfig {
    pub fn resolve(args: &RunArgs, default_order: u8) -> Result<Self> {
        let file = match &args.config {
            Some(path) => read_file(path)?,
            None => FileConfig::default(),
        };
        let spec = args
            .potential
            .clone()
            .or(file.potential)
            .unwrap_or_else(|| "poschl-teller()".into());
        let potential: Potential = spec.parse()?;

        // Flags override the file as a pair, so `--k` replaces a file `kappa`.
        let (k, kappa) = if args.k.is_some() || args.kappa.is_some() {
            (args.k, args.kappa)
        } else {
            (file.k, file.kappa)
        };
        let k = match (k, kappa) {
            (Some(_), Some(_)) => bail!("give either k or kappa, not both"),
            (Some(k), None) => k,
            (None, Some(kappa)) => {
                if !(kappa > 0.0) {
                    bail!("kappa must be positive, got {kappa}");
                }
                pt_k_from_kappa(kappa)
            }
            (None, None) => bail!("one of k or kappa is required"),
        };
        if !(k.is_finite() && k > 0.0) {
            bail!("k must be finite and positive, got {k}");
        }

        let levels = match (&args.n, file.n) {
            (Some(text), _) => parse_levels(text)?,
            (None, Some(NSpec::One(n))) => n..=n,
            (None, Some(NSpec::Text(text))) => parse_levels(&text)?,
            (None, None) => 0..=0,
        };
        let order = args.order.or(file.order).unwrap_or(default_order);
        if order > 2 {
            bail!("order must be 0, 1 or 2, got {order}");
        }
        let gamma = match (&args.gamma, file.gamma) {
            (Some(text), _) => GammaPolicy::parse(text)?,
            (None, Some(GammaSpec::Text(text))) => GammaPolicy::parse(&text)?,
            (None, Some(GammaSpec::Value(g))) => GammaPolicy::from_values(vec![g])?,
            (None, Some(GammaSpec::List(list))) => GammaPolicy::from_values(list)?,
            (None, None) => GammaPolicy::Auto,
        };
        let tol = args.tol.or(file.tol).unwrap_or(1e-10);
        if !(tol > 0.0) {
            bail!("tol must be positive, got {tol}");
        }
        let points = args.points.or(file.points).unwrap_or(1024);
        if points < 2 {
            bail!("need at least two grid points");
        }
        Ok(Self {
            potential,
            k,
            levels,
            order,
            gamma,
            tol,
            format: args.format.or(file.format).unwrap_or(Format::Csv),
            plot: args.plot || file.plot.unwrap_or(false),
            output: args.output.clone().or(file.output),
            points,
        })
    }
}

fn read_file(path: &Path) -> Result<FileConfig> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_ranges() {
        assert_eq!(parse_levels("0..8").unwrap(), 0..=8);
        assert_eq!(parse_levels("3").unwrap(), 3..=3);
        assert_eq!(parse_levels("2..=4").unwrap(), 2..=4);
        assert!(parse_levels("5..2").is_err());
        assert!(parse_levels("x").is_err());
    }

    #[test]
    fn gamma_policies() {
        assert_eq!(GammaPolicy::parse("auto").unwrap(), GammaPolicy::Auto);
        assert_eq!(GammaPolicy::parse("1.5").unwrap(), GammaPolicy::Fixed(1.5));
        assert_eq!(
            GammaPolicy::parse("0.5, 2").unwrap(),
            GammaPolicy::Sweep(vec![0.5, 2.0])
        );
        assert!(GammaPolicy::parse("-1").is_err());
    }

    #[test]
    fn kappa_sets_k() {
        let args = RunArgs {
            kappa: Some(8.9),
            ..Default::default()
        };
        let c = RunConfig::resolve(&args, 1).unwrap();
        assert!((c.k * c.k - 8.9 * 9.9).abs() < 1e-12);
        assert!(RunConfig::resolve(&RunArgs::default(), 1).is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        std::fs::write(
            &path,
            r#"{"potential": "morse()", "k": 10, "n": "0..3", "gamma": [0.5, 1.0]}"#,
        )
        .unwrap();
        let args = RunArgs {
            config: Some(path.clone()),
            n: Some("2".into()),
            ..Default::default()
        };
        let c = RunConfig::resolve(&args, 1).unwrap();
        assert_eq!(c.potential.name(), "morse");
        assert_eq!(c.levels, 2..=2);
        assert_eq!(c.gamma, GammaPolicy::Sweep(vec![0.5, 1.0]));
        let args = RunArgs {
            config: Some(path),
            kappa: Some(3.0),
            ..Default::default()
        };
        assert!((RunConfig::resolve(&args, 1).unwrap().k - 12f64.sqrt()).abs() < 1e-12);
    }
}
