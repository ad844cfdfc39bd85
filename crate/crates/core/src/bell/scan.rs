//! Parameter scans that regenerate the Bell-average surfaces and curves.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::{bell_average_kinematics, bell_average_sharp, BellConfig};
use crate::correlator::{correlator_integrand, velocity_kernel};
use crate::error::{Error, Result};
use crate::relkin::{ParticleKinematics, Vec3};

/// Slack on the Tsirelson bound when validating scan rows.
const TSIRELSON_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Figure {
    /// Common in-plane velocity `beta (cos phi, sin phi, 0)`.
    InPlane,
    /// Common velocity `beta (sin theta, 0, cos theta)`.
    Polar,
    /// Full sphere of directions at `beta` in {0.95, 0.99}.
    Sphere,
    /// Particle 1 at rest, particle 2 at `beta (cos phi, sin phi, 0)`.
    OneAtRest,
    /// The `phi = 0` cut of the in-plane surface.
    Gully,
    /// Single correlator with `a . b = 0`, `a.n = b.n = 2^-1/2`.
    OrthogonalCorrelator,
}

impl Figure {
    pub fn from_id(id: u32) -> Result<Self> {
        Ok(match id {
            1 => Self::InPlane,
            2 => Self::Polar,
            3 => Self::Sphere,
            4 => Self::OneAtRest,
            5 => Self::Gully,
            6 => Self::OrthogonalCorrelator,
            other => return Err(Error::UnknownFigure(other)),
        })
    }

    pub fn id(self) -> u32 {
        match self {
            Self::InPlane => 1,
            Self::Polar => 2,
            Self::Sphere => 3,
            Self::OneAtRest => 4,
            Self::Gully => 5,
            Self::OrthogonalCorrelator => 6,
        }
    }

    /// Default upper end of the speed axis. Only the single-correlator curve
    /// stays non-degenerate at `beta = 1`.
    pub fn default_beta_max(self) -> f64 {
        match self {
            Self::OrthogonalCorrelator => 1.0,
            _ => 0.999,
        }
    }

    fn columns(self) -> &'static [&'static str] {
        match self {
            Self::InPlane | Self::OneAtRest => &["beta", "phi", "c", "abs_c"],
            Self::Polar => &["beta", "theta", "c", "abs_c"],
            Self::Sphere => &["beta", "phi", "theta", "c", "abs_c"],
            Self::Gully => &["beta", "c", "abs_c"],
            Self::OrthogonalCorrelator => &["beta", "corr_relativistic", "reference_curve"],
        }
    }

    fn geometry(self) -> &'static str {
        match self {
            Self::InPlane => "sharp pair, beta_vec = beta (cos phi, sin phi, 0)",
            Self::Polar => "sharp pair, beta_vec = beta (sin theta, 0, cos theta)",
            Self::Sphere => "sharp pair, beta_vec = beta (cos phi sin theta, sin phi sin theta, cos theta)",
            Self::OneAtRest => "particle 1 at rest, particle 2 at beta (cos phi, sin phi, 0)",
            Self::Gully => "sharp pair, beta_vec = beta (1, 0, 0)",
            Self::OrthogonalCorrelator => {
                "sharp pair, beta_vec = beta (0, 0, 1), a = (1,0,1)/sqrt2, b = (-1,0,1)/sqrt2; reference sqrt(1-beta^2)-1"
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub figure: Figure,
    /// Grid points per continuous axis.
    pub resolution: usize,
    pub mass: f64,
    pub beta_min: f64,
    pub beta_max: f64,
}

impl ScanSpec {
    pub fn new(figure: Figure, resolution: usize) -> Self {
        Self { figure, resolution, mass: 1.0, beta_min: 0.0, beta_max: figure.default_beta_max() }
    }

    fn validate(&self) -> Result<()> {
        if self.resolution < 2 {
            return Err(Error::InvalidConfig(format!("resolution must be >= 2, got {}", self.resolution)));
        }
        if !(self.mass > 0.0) || !self.mass.is_finite() {
            return Err(Error::InvalidConfig(format!("mass must be positive, got {}", self.mass)));
        }
        let limit_ok = match self.figure {
            Figure::OrthogonalCorrelator => self.beta_max <= 1.0,
            _ => self.beta_max < 1.0,
        };
        if !(self.beta_min >= 0.0 && self.beta_min < self.beta_max && limit_ok) {
            return Err(Error::InvalidConfig(format!(
                "invalid speed range [{}, {}] for figure {}",
                self.beta_min,
                self.beta_max,
                self.figure.id()
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanMetadata {
    pub figure: u32,
    pub geometry: String,
    pub config: BellConfig<f64>,
    pub mass: f64,
    pub resolution: usize,
}

/// Rows of grid coordinates followed by value columns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub metadata: ScanMetadata,
}

impl ScanTable {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// CSV with a header row, LF line endings and shortest round-trip floats.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write!(out, "{v}").expect("write to String");
            }
            out.push('\n');
        }
        out
    }

    /// `{"metadata": {...}, "records": [{column: value, ...}, ...]}`.
    pub fn to_json(&self) -> Value {
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let map: Map<String, Value> =
                    self.columns.iter().cloned().zip(row.iter().map(|&v| json!(v))).collect();
                Value::Object(map)
            })
            .collect();
        json!({ "metadata": self.metadata, "records": records })
    }

    fn check_bound(&self) -> Result<()> {
        let bound = 2.0 * SQRT_2 + TSIRELSON_SLACK;
        if let Some(col) = self.column("c") {
            if let Some(row) = self.rows.iter().find(|r| !(r[col].abs() <= bound)) {
                return Err(Error::Domain(format!("scan row {row:?} exceeds the Tsirelson bound")));
            }
        }
        Ok(())
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| if i == n - 1 { hi } else { lo + step * i as f64 }).collect()
}

fn c_row(coords: &[f64], c: f64) -> Vec<f64> {
    let mut row = coords.to_vec();
    row.extend([c, c.abs()]);
    row
}

/// Evaluates one figure on its grid using the coplanar measurement set.
pub fn scan_figure(spec: &ScanSpec) -> Result<ScanTable> {
    spec.validate()?;
    let config = BellConfig::<f64>::coplanar();
    let n = spec.resolution;
    let betas = linspace(spec.beta_min, spec.beta_max, n);
    let phis = linspace(0.0, 2.0 * PI, n);
    let thetas = linspace(0.0, PI, n);

    let rows: Vec<Vec<f64>> = match spec.figure {
        Figure::InPlane => outer(&betas, |beta| {
            phis.iter()
                .map(|&phi| {
                    let v = Vec3::new(phi.cos(), phi.sin(), 0.0) * beta;
                    Ok(c_row(&[beta, phi], bell_average_sharp(&config, v)?))
                })
                .collect()
        })?,
        Figure::Polar => outer(&betas, |beta| {
            thetas
                .iter()
                .map(|&theta| {
                    let v = Vec3::new(theta.sin(), 0.0, theta.cos()) * beta;
                    Ok(c_row(&[beta, theta], bell_average_sharp(&config, v)?))
                })
                .collect()
        })?,
        Figure::Sphere => outer(&[0.95, 0.99], |beta| {
            let mut rows = Vec::with_capacity(n * n);
            for &phi in &phis {
                for &theta in &thetas {
                    let v = Vec3::from_angles(phi, theta) * beta;
                    rows.push(c_row(&[beta, phi, theta], bell_average_sharp(&config, v)?));
                }
            }
            Ok(rows)
        })?,
        Figure::OneAtRest => {
            let rest = ParticleKinematics::at_rest(spec.mass)?;
            outer(&betas, |beta| {
                phis.iter()
                    .map(|&phi| {
                        let v = Vec3::new(phi.cos(), phi.sin(), 0.0) * beta;
                        let fast = ParticleKinematics::from_velocity(spec.mass, v)?;
                        Ok(c_row(&[beta, phi], bell_average_kinematics(&config, &rest, &fast)?))
                    })
                    .collect()
            })?
        }
        Figure::Gully => outer(&betas, |beta| {
            Ok(vec![c_row(&[beta], bell_average_sharp(&config, Vec3::new(beta, 0.0, 0.0))?)])
        })?,
        Figure::OrthogonalCorrelator => {
            let s = FRAC_1_SQRT_2;
            let a = Vec3::new(s, 0.0, s);
            let b = Vec3::new(-s, 0.0, s);
            outer(&betas, |beta| {
                let v = Vec3::new(0.0, 0.0, beta);
                let k = if beta < 1.0 {
                    let kin = ParticleKinematics::from_velocity(spec.mass, v)?;
                    correlator_integrand(a, b, &kin, &kin)?
                } else {
                    velocity_kernel(a, b, v, v)?
                };
                Ok(vec![vec![beta, k, (1.0 - beta * beta).sqrt() - 1.0]])
            })?
        }
    };

    let table = ScanTable {
        columns: spec.figure.columns().iter().map(|s| s.to_string()).collect(),
        rows,
        metadata: ScanMetadata {
            figure: spec.figure.id(),
            geometry: spec.figure.geometry().to_string(),
            config,
            mass: spec.mass,
            resolution: n,
        },
    };
    table.check_bound()?;
    Ok(table)
}

/// Evaluates `f` for every outer grid value in parallel, keeping grid order.
fn outer<F>(values: &[f64], f: F) -> Result<Vec<Vec<f64>>>
where
    F: Fn(f64) -> Result<Vec<Vec<f64>>> + Sync,
{
    let blocks: Vec<Vec<Vec<f64>>> = values.par_iter().map(|&v| f(v)).collect::<Result<_>>()?;
    Ok(blocks.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_figure() {
        assert_eq!(Figure::from_id(7).unwrap_err(), Error::UnknownFigure(7));
        for id in 1..=6 {
            assert_eq!(Figure::from_id(id).unwrap().id(), id);
        }
    }

    #[test]
    fn rejects_coarse_grid_and_luminal_range() {
        assert!(scan_figure(&ScanSpec::new(Figure::Gully, 1)).is_err());
        let mut spec = ScanSpec::new(Figure::Gully, 10);
        spec.beta_max = 1.0;
        assert!(scan_figure(&spec).is_err());
    }

    #[test]
    fn linspace_hits_endpoints() {
        let g = linspace(0.0, 0.999, 101);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[100], 0.999);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn csv_layout() {
        let table = scan_figure(&ScanSpec::new(Figure::OrthogonalCorrelator, 3)).unwrap();
        let csv = table.to_csv();
        let lines: Vec<&str> = csv.split('\n').collect();
        assert_eq!(lines[0], "beta,corr_relativistic,reference_curve");
        assert_eq!(lines[1], "0,0,0");
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[4], "");
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn json_layout() {
        let table = scan_figure(&ScanSpec::new(Figure::Gully, 4)).unwrap();
        let v = table.to_json();
        assert_eq!(v["metadata"]["figure"], 5);
        let rec = &v["records"][3];
        let keys: Vec<&String> = rec.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["beta", "c", "abs_c"]);
        assert_eq!(rec["beta"], 0.999);
    }
}
