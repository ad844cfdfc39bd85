//! Flag grammar, conversion into [`RunConfig`] and rendering back to flags.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use relbell::bell::{BellConfig, Figure, ScanSpec};
use relbell::correlator::{momentum_for_velocity, MomentumDistribution, MomentumProfile};
use relbell::ekert::ThresholdMode;
use relbell::Vec3f64;

use crate::config_file;
use crate::CliError;

/// Directions closer than this to unit length are taken as given.
const UNIT_SNAP: f64 = 1e-12;
/// Directions further than this from unit length trigger a warning.
const UNIT_WARN: f64 = 1e-6;

#[derive(Parser, Debug)]
#[command(
    name = "relbell",
    version,
    about = "Relativistic Bell averages and Ekert eavesdropping tests for massive spin-1/2 pairs",
    args_override_self = true
)]
struct Cli {
    /// Flat `key = value` file with default flag values; explicit flags win.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Spin correlation <a (x) b> for one pair of directions
    Correlate(CorrelateArgs),
    /// Bell average c(a, a', b, b')
    Bell(BellArgs),
    /// Regenerate a figure surface or curve as a data table
    Scan(ScanArgs),
    /// Momentum-corrected Bell threshold |c| for a beam
    Threshold(ThresholdArgs),
    /// Simulate an Ekert key-distribution run and its Bell test
    Protocol(ProtocolArgs),
}

#[derive(Args, Debug)]
struct DirectionArgs {
    /// Alice's first direction [default: 1/sqrt2,1/sqrt2,0, Fig. 1 geometry]
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    a: Option<Vec3f64>,
    /// Alice's second direction [default: -1/sqrt2,1/sqrt2,0, Fig. 1 geometry]
    #[arg(long = "a-prime", value_parser = parse_vec3, allow_hyphen_values = true)]
    a_prime: Option<Vec3f64>,
    /// Bob's first direction [default: 0,1,0, Fig. 1 geometry]
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    b: Option<Vec3f64>,
    /// Bob's second direction [default: 1,0,0, Fig. 1 geometry]
    #[arg(long = "b-prime", value_parser = parse_vec3, allow_hyphen_values = true)]
    b_prime: Option<Vec3f64>,
}

#[derive(Args, Debug)]
struct BeamArgs {
    /// Beam velocity (mean velocity of particle 1), |beta| < 1
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true, default_value = "0,0,0")]
    beta: Vec3f64,
    /// Velocity of particle 2 when it differs from particle 1
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    beta2: Option<Vec3f64>,
    /// Particle mass (natural units)
    #[arg(long, default_value_t = 1.0)]
    mass: f64,
    /// Momentum distribution
    #[arg(long, value_enum, default_value_t = DistKind::Sharp)]
    dist: DistKind,
    /// Per-axis momentum standard deviation of particle 1
    #[arg(long, value_parser = parse_vec3, default_value = "0,0,0")]
    sigma: Vec3f64,
    /// Per-axis momentum standard deviation of particle 2 (joint only)
    #[arg(long, value_parser = parse_vec3)]
    sigma2: Option<Vec3f64>,
}

#[derive(Args, Debug)]
struct McArgs {
    /// Monte Carlo samples
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct CorrelateArgs {
    /// Direction measured on particle 1 [default: 1/sqrt2,1/sqrt2,0]
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    a: Option<Vec3f64>,
    /// Direction measured on particle 2 [default: 0,1,0]
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    b: Option<Vec3f64>,
    #[command(flatten)]
    beam: BeamArgs,
    #[command(flatten)]
    mc: McArgs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Debug)]
struct BellArgs {
    #[command(flatten)]
    dirs: DirectionArgs,
    #[command(flatten)]
    beam: BeamArgs,
    #[command(flatten)]
    mc: McArgs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Debug)]
struct ThresholdArgs {
    #[command(flatten)]
    dirs: DirectionArgs,
    #[command(flatten)]
    beam: BeamArgs,
    #[command(flatten)]
    mc: McArgs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Debug)]
struct ScanArgs {
    /// Figure id, 1 to 6
    #[arg(long)]
    figure: u32,
    /// Grid points per axis
    #[arg(long, default_value_t = 101)]
    resolution: usize,
    #[arg(long = "beta-min", default_value_t = 0.0)]
    beta_min: f64,
    /// Upper speed [default: 0.999, or 1 for figure 6]
    #[arg(long = "beta-max")]
    beta_max: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    mass: f64,
    /// Output path, `-` for stdout
    #[arg(long, default_value = "-")]
    out: String,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args, Debug)]
struct ProtocolArgs {
    #[arg(long, default_value_t = 100_000)]
    pairs: usize,
    #[command(flatten)]
    dirs: DirectionArgs,
    #[command(flatten)]
    beam: BeamArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Shared key axes, `;`-separated
    #[arg(long = "key-axes", value_parser = parse_vec3_list, allow_hyphen_values = true, default_value = "0,0,1;1,0,0")]
    key_axes: VecList,
    #[arg(long, value_enum, default_value_t = EveKind::None)]
    eve: EveKind,
    /// Per-pair attack probability
    #[arg(long = "attack-prob", default_value_t = 1.0)]
    attack_prob: f64,
    /// Eve's basis pool, `;`-separated [default: a;a';b;b']
    #[arg(long = "eve-pool", value_parser = parse_vec3_list, allow_hyphen_values = true)]
    eve_pool: Option<VecList>,
    #[arg(long = "test-fraction", default_value_t = 0.5)]
    test_fraction: f64,
    /// One-sided z-test level
    #[arg(long, default_value_t = 0.01)]
    significance: f64,
    #[arg(long = "threshold-mode", value_enum, default_value_t = ThresholdKind::Empirical)]
    threshold_mode: ThresholdKind,
    /// Monte Carlo samples for `--threshold-mode distribution`
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// Transcript output path; the verdict summary always goes to stdout
    #[arg(long)]
    out: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VecList(pub Vec<Vec3f64>);

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DistKind {
    Sharp,
    Correlated,
    Joint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EveKind {
    None,
    InterceptResend,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ThresholdKind {
    Empirical,
    Distribution,
}

fn parse_vec3(s: &str) -> Result<Vec3f64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated numbers, got `{s}`"));
    }
    let mut c = [0.0; 3];
    for (slot, p) in c.iter_mut().zip(&parts) {
        *slot = p.parse::<f64>().map_err(|e| format!("`{p}`: {e}"))?;
        if !slot.is_finite() {
            return Err(format!("`{p}` is not finite"));
        }
    }
    Ok(Vec3f64::from(c))
}

fn parse_vec3_list(s: &str) -> Result<VecList, String> {
    s.split(';').filter(|p| !p.trim().is_empty()).map(parse_vec3).collect::<Result<_, _>>().map(VecList)
}

fn fmt_vec(v: Vec3f64) -> String {
    format!("{},{},{}", v.x, v.y, v.z)
}

fn fmt_list(vs: &[Vec3f64]) -> String {
    vs.iter().map(|&v| fmt_vec(v)).collect::<Vec<_>>().join(";")
}

/// Beam description as given on the command line.
#[derive(Clone, Debug, PartialEq)]
pub struct Beam {
    pub dist: DistKind,
    pub beta: Vec3f64,
    pub beta2: Option<Vec3f64>,
    pub mass: f64,
    pub sigma: Vec3f64,
    pub sigma2: Option<Vec3f64>,
}

impl Beam {
    /// Pair density described by the flags. A sharp beam with a distinct
    /// `beta2` becomes a zero-width joint profile.
    pub fn distribution(&self) -> relbell::Result<MomentumDistribution> {
        let p1 = momentum_for_velocity(self.mass, self.beta)?;
        let profile = match (self.dist, self.beta2) {
            (DistKind::Sharp, None) => MomentumProfile::Sharp { momentum: p1 },
            (DistKind::Correlated, _) => MomentumProfile::CorrelatedGaussian { mean: p1, sigma: self.sigma },
            (DistKind::Sharp, Some(b2)) => MomentumProfile::JointGaussian {
                mean1: p1,
                sigma1: Vec3f64::zero(),
                mean2: momentum_for_velocity(self.mass, b2)?,
                sigma2: Vec3f64::zero(),
            },
            (DistKind::Joint, b2) => MomentumProfile::JointGaussian {
                mean1: p1,
                sigma1: self.sigma,
                mean2: momentum_for_velocity(self.mass, b2.unwrap_or(self.beta))?,
                sigma2: self.sigma2.unwrap_or(self.sigma),
            },
        };
        MomentumDistribution::new(self.mass, profile)
    }

    fn render(&self, out: &mut Vec<String>) {
        out.push(format!("--dist={}", value_name(self.dist)));
        out.push(format!("--beta={}", fmt_vec(self.beta)));
        if let Some(b2) = self.beta2 {
            out.push(format!("--beta2={}", fmt_vec(b2)));
        }
        out.push(format!("--mass={}", self.mass));
        out.push(format!("--sigma={}", fmt_vec(self.sigma)));
        if let Some(s2) = self.sigma2 {
            out.push(format!("--sigma2={}", fmt_vec(s2)));
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EveConfig {
    pub kind: EveKind,
    pub probability: f64,
    /// `None` means the four Bell directions.
    pub pool: Option<Vec<Vec3f64>>,
}

/// Fully validated invocation.
#[derive(Clone, Debug, PartialEq)]
pub enum RunConfig {
    Correlate {
        a: Vec3f64,
        b: Vec3f64,
        beam: Beam,
        samples: usize,
        seed: u64,
        format: Format,
    },
    Bell {
        directions: BellConfig<f64>,
        beam: Beam,
        samples: usize,
        seed: u64,
        format: Format,
    },
    Scan {
        spec: ScanSpec,
        out: String,
        format: Format,
    },
    Threshold {
        directions: BellConfig<f64>,
        beam: Beam,
        samples: usize,
        seed: u64,
        format: Format,
    },
    Protocol {
        pairs: usize,
        directions: BellConfig<f64>,
        beam: Beam,
        seed: u64,
        key_axes: Vec<Vec3f64>,
        eve: EveConfig,
        test_fraction: f64,
        significance: f64,
        threshold_mode: ThresholdMode,
        out: Option<String>,
        format: Format,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Invocation {
    pub config: RunConfig,
    pub warnings: Vec<String>,
}

fn value_name<E: ValueEnum>(v: E) -> String {
    v.to_possible_value().expect("no skipped variants").get_name().to_string()
}

struct Normalizer {
    warnings: Vec<String>,
}

impl Normalizer {
    fn direction(&mut self, flag: &str, v: Vec3f64) -> Result<Vec3f64, CliError> {
        let norm = v.norm();
        if !(norm > 0.0) {
            return Err(CliError::Usage(format!("--{flag}: direction must be non-zero")));
        }
        let dev = (norm - 1.0).abs();
        if dev > UNIT_WARN {
            self.warnings.push(format!("--{flag}: |v| = {norm}, normalized to unit length"));
        }
        Ok(if dev > UNIT_SNAP { v * (1.0 / norm) } else { v })
    }

    fn directions(&mut self, flag: &str, vs: Vec<Vec3f64>) -> Result<Vec<Vec3f64>, CliError> {
        if vs.is_empty() {
            return Err(CliError::Usage(format!("--{flag}: expected at least one direction")));
        }
        vs.into_iter().map(|v| self.direction(flag, v)).collect()
    }

    fn bell(&mut self, d: DirectionArgs) -> Result<BellConfig<f64>, CliError> {
        let def = BellConfig::<f64>::coplanar();
        Ok(BellConfig {
            a: self.direction("a", d.a.unwrap_or(def.a))?,
            a_prime: self.direction("a-prime", d.a_prime.unwrap_or(def.a_prime))?,
            b: self.direction("b", d.b.unwrap_or(def.b))?,
            b_prime: self.direction("b-prime", d.b_prime.unwrap_or(def.b_prime))?,
        })
    }
}

fn check_speed(flag: &str, v: Vec3f64) -> Result<(), CliError> {
    let beta = v.norm();
    if !(beta < 1.0) {
        return Err(CliError::Usage(format!("--{flag}: |beta| = {beta} is outside [0, 1)")));
    }
    Ok(())
}

fn check_sigma(flag: &str, v: Vec3f64) -> Result<(), CliError> {
    if v.x < 0.0 || v.y < 0.0 || v.z < 0.0 {
        return Err(CliError::Usage(format!("--{flag}: standard deviations must be >= 0")));
    }
    Ok(())
}

fn beam(b: BeamArgs) -> Result<Beam, CliError> {
    check_speed("beta", b.beta)?;
    if let Some(b2) = b.beta2 {
        check_speed("beta2", b2)?;
    }
    check_sigma("sigma", b.sigma)?;
    if let Some(s2) = b.sigma2 {
        check_sigma("sigma2", s2)?;
    }
    if !(b.mass > 0.0) || !b.mass.is_finite() {
        return Err(CliError::Usage(format!("--mass: must be positive, got {}", b.mass)));
    }
    Ok(Beam { dist: b.dist, beta: b.beta, beta2: b.beta2, mass: b.mass, sigma: b.sigma, sigma2: b.sigma2 })
}

fn samples(n: usize) -> Result<usize, CliError> {
    if n < relbell::correlator::MIN_SAMPLES {
        return Err(CliError::Usage(format!(
            "--samples: need at least {}, got {n}",
            relbell::correlator::MIN_SAMPLES
        )));
    }
    Ok(n)
}

fn unit_interval(flag: &str, x: f64) -> Result<f64, CliError> {
    if !(x > 0.0 && x < 1.0) {
        return Err(CliError::Usage(format!("--{flag}: must lie in (0, 1), got {x}")));
    }
    Ok(x)
}

/// Parses `argv` (program name first) into a validated configuration.
///
/// `--config PATH` loads a flat `key = value` file whose entries act as
/// flags placed before the explicit ones, so explicit flags take precedence.
/// A `command = ...` entry supplies the subcommand when argv has none.
pub fn parse_args<I, T>(argv: I) -> Result<Invocation, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<String> = argv
        .into_iter()
        .map(|a| a.into().to_string_lossy().into_owned())
        .collect();
    let argv = config_file::expand(argv)?;
    let cli = Cli::try_parse_from(&argv).map_err(CliError::Clap)?;
    let mut norm = Normalizer { warnings: Vec::new() };

    let config = match cli.command {
        Cmd::Correlate(c) => {
            let def = BellConfig::<f64>::coplanar();
            RunConfig::Correlate {
                a: norm.direction("a", c.a.unwrap_or(def.a))?,
                b: norm.direction("b", c.b.unwrap_or(def.b))?,
                beam: beam(c.beam)?,
                samples: samples(c.mc.samples)?,
                seed: c.mc.seed,
                format: c.format,
            }
        }
        Cmd::Bell(c) => RunConfig::Bell {
            directions: norm.bell(c.dirs)?,
            beam: beam(c.beam)?,
            samples: samples(c.mc.samples)?,
            seed: c.mc.seed,
            format: c.format,
        },
        Cmd::Threshold(c) => RunConfig::Threshold {
            directions: norm.bell(c.dirs)?,
            beam: beam(c.beam)?,
            samples: samples(c.mc.samples)?,
            seed: c.mc.seed,
            format: c.format,
        },
        Cmd::Scan(c) => {
            let figure = Figure::from_id(c.figure).map_err(|e| CliError::Usage(format!("--figure: {e}")))?;
            if c.resolution < 2 {
                return Err(CliError::Usage(format!("--resolution: must be >= 2, got {}", c.resolution)));
            }
            let beta_max = c.beta_max.unwrap_or(figure.default_beta_max());
            let limit_ok = if figure == Figure::OrthogonalCorrelator { beta_max <= 1.0 } else { beta_max < 1.0 };
            if !(c.beta_min >= 0.0 && c.beta_min < beta_max && limit_ok) {
                return Err(CliError::Usage(format!(
                    "--beta-min/--beta-max: invalid range [{}, {beta_max}] for figure {}",
                    c.beta_min, c.figure
                )));
            }
            if c.format == Format::Text {
                return Err(CliError::Usage("--format: scan tables are csv or json".into()));
            }
            if !(c.mass > 0.0) || !c.mass.is_finite() {
                return Err(CliError::Usage(format!("--mass: must be positive, got {}", c.mass)));
            }
            RunConfig::Scan {
                spec: ScanSpec { figure, resolution: c.resolution, mass: c.mass, beta_min: c.beta_min, beta_max },
                out: c.out,
                format: c.format,
            }
        }
        Cmd::Protocol(c) => {
            if c.format == Format::Text {
                return Err(CliError::Usage("--format: transcripts are csv or json".into()));
            }
            if !(0.0..=1.0).contains(&c.attack_prob) {
                return Err(CliError::Usage(format!("--attack-prob: must lie in [0, 1], got {}", c.attack_prob)));
            }
            let threshold_mode = match c.threshold_mode {
                ThresholdKind::Empirical => ThresholdMode::Empirical,
                ThresholdKind::Distribution => ThresholdMode::Distribution { samples: samples(c.samples)? },
            };
            let pool = match c.eve_pool {
                Some(VecList(vs)) => Some(norm.directions("eve-pool", vs)?),
                None => None,
            };
            RunConfig::Protocol {
                pairs: c.pairs,
                directions: norm.bell(c.dirs)?,
                beam: beam(c.beam)?,
                seed: c.seed,
                key_axes: norm.directions("key-axes", c.key_axes.0)?,
                eve: EveConfig { kind: c.eve, probability: c.attack_prob, pool },
                test_fraction: unit_interval("test-fraction", c.test_fraction)?,
                significance: unit_interval("significance", c.significance)?,
                threshold_mode,
                out: c.out,
                format: c.format,
            }
        }
    };
    Ok(Invocation { config, warnings: norm.warnings })
}

fn render_dirs(d: &BellConfig<f64>, out: &mut Vec<String>) {
    out.push(format!("--a={}", fmt_vec(d.a)));
    out.push(format!("--a-prime={}", fmt_vec(d.a_prime)));
    out.push(format!("--b={}", fmt_vec(d.b)));
    out.push(format!("--b-prime={}", fmt_vec(d.b_prime)));
}

/// Renders a configuration as an argv that [`parse_args`] maps back to it.
pub fn render(config: &RunConfig) -> Vec<String> {
    let mut out = vec!["relbell".to_string()];
    match config {
        RunConfig::Correlate { a, b, beam, samples, seed, format } => {
            out.push("correlate".into());
            out.push(format!("--a={}", fmt_vec(*a)));
            out.push(format!("--b={}", fmt_vec(*b)));
            beam.render(&mut out);
            out.push(format!("--samples={samples}"));
            out.push(format!("--seed={seed}"));
            out.push(format!("--format={}", value_name(*format)));
        }
        RunConfig::Bell { directions, beam, samples, seed, format }
        | RunConfig::Threshold { directions, beam, samples, seed, format } => {
            let name = if matches!(config, RunConfig::Bell { .. }) { "bell" } else { "threshold" };
            out.push(name.into());
            render_dirs(directions, &mut out);
            beam.render(&mut out);
            out.push(format!("--samples={samples}"));
            out.push(format!("--seed={seed}"));
            out.push(format!("--format={}", value_name(*format)));
        }
        RunConfig::Scan { spec, out: path, format } => {
            out.push("scan".into());
            out.push(format!("--figure={}", spec.figure.id()));
            out.push(format!("--resolution={}", spec.resolution));
            out.push(format!("--beta-min={}", spec.beta_min));
            out.push(format!("--beta-max={}", spec.beta_max));
            out.push(format!("--mass={}", spec.mass));
            out.push(format!("--out={path}"));
            out.push(format!("--format={}", value_name(*format)));
        }
        RunConfig::Protocol {
            pairs,
            directions,
            beam,
            seed,
            key_axes,
            eve,
            test_fraction,
            significance,
            threshold_mode,
            out: path,
            format,
        } => {
            out.push("protocol".into());
            out.push(format!("--pairs={pairs}"));
            render_dirs(directions, &mut out);
            beam.render(&mut out);
            out.push(format!("--seed={seed}"));
            out.push(format!("--key-axes={}", fmt_list(key_axes)));
            out.push(format!("--eve={}", value_name(eve.kind)));
            out.push(format!("--attack-prob={}", eve.probability));
            if let Some(pool) = &eve.pool {
                out.push(format!("--eve-pool={}", fmt_list(pool)));
            }
            out.push(format!("--test-fraction={test_fraction}"));
            out.push(format!("--significance={significance}"));
            match threshold_mode {
                ThresholdMode::Empirical => out.push("--threshold-mode=empirical".into()),
                ThresholdMode::Distribution { samples } => {
                    out.push("--threshold-mode=distribution".into());
                    out.push(format!("--samples={samples}"));
                }
            }
            if let Some(path) = path {
                out.push(format!("--out={path}"));
            }
            out.push(format!("--format={}", value_name(*format)));
        }
    }
    out
}
