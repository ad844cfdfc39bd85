use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::test::{bell_test, BellTestRecord};
use crate::bell::{bell_average_kinematics, corrected_threshold, BellConfig, UNIT_TOLERANCE};
use crate::correlator::{correlator_integrand, MomentumDistribution};
use crate::error::{Error, Result};
use crate::relkin::{ParticleKinematics, Vec3};
use crate::rng::substream;

pub const SCHEMA_VERSION: u32 = 1;
const KEY_CONVENTION: &str = "bob_flips_bits";
/// Substream used by protocol runs, kept apart from Monte Carlo chunk streams.
const PROTOCOL_STREAM: u64 = u64::MAX;

/// A measurement setting chosen by one party in one round.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Setting {
    A,
    APrime,
    B,
    BPrime,
    /// Index into the shared key axes.
    Key(usize),
}

impl Setting {
    pub fn label(self) -> String {
        match self {
            Self::A => "a".into(),
            Self::APrime => "a'".into(),
            Self::B => "b".into(),
            Self::BPrime => "b'".into(),
            Self::Key(i) => format!("k{i}"),
        }
    }

    pub fn is_key(self) -> bool {
        matches!(self, Self::Key(_))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EveStrategy {
    None,
    /// Eve measures Bob's particle along a uniformly chosen pool axis and
    /// resends a spin prepared along that axis with her outcome's sign.
    InterceptResend { pool: Vec<Vec3<f64>>, probability: f64 },
}

/// How the corrected Bell threshold is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ThresholdMode {
    /// Average over the momenta recorded in the run.
    Empirical,
    /// Monte Carlo over the configured distribution.
    Distribution { samples: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub pairs: usize,
    pub bell: BellConfig<f64>,
    pub key_axes: Vec<Vec3<f64>>,
    pub distribution: MomentumDistribution,
    pub eve: EveStrategy,
    pub seed: u64,
    /// Probability that a party picks a test setting instead of a key axis.
    pub test_fraction: f64,
    pub significance: f64,
    pub threshold_mode: ThresholdMode,
}

impl ProtocolConfig {
    /// Coplanar settings, key axes `z` and `x`, no eavesdropper, half the
    /// choices spent on testing, 1% significance, empirical threshold.
    pub fn new(pairs: usize, distribution: MomentumDistribution, seed: u64) -> Self {
        Self {
            pairs,
            bell: BellConfig::coplanar(),
            key_axes: vec![Vec3::unit_z(), Vec3::unit_x()],
            distribution,
            eve: EveStrategy::None,
            seed,
            test_fraction: 0.5,
            significance: 0.01,
            threshold_mode: ThresholdMode::Empirical,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidConfig(msg));
        self.bell.validate()?;
        self.distribution.validate()?;
        let unit = |v: &Vec3<f64>| (v.norm() - 1.0).abs() <= UNIT_TOLERANCE;
        if self.key_axes.is_empty() || !self.key_axes.iter().all(unit) {
            return invalid("key axes must be a non-empty list of unit vectors".into());
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return invalid(format!("test fraction must lie in (0, 1), got {}", self.test_fraction));
        }
        if self.test_fraction * (self.pairs as f64) < 100.0 {
            return invalid(format!(
                "test fraction {} of {} pairs leaves fewer than 100 test choices",
                self.test_fraction, self.pairs
            ));
        }
        if !(self.significance > 0.0 && self.significance < 1.0) {
            return invalid(format!("significance must lie in (0, 1), got {}", self.significance));
        }
        if let EveStrategy::InterceptResend { pool, probability } = &self.eve {
            if pool.is_empty() || !pool.iter().all(unit) {
                return invalid("eavesdropper basis pool must be a non-empty list of unit vectors".into());
            }
            if !(0.0..=1.0).contains(probability) {
                return invalid(format!("attack probability must lie in [0, 1], got {probability}"));
            }
        }
        Ok(())
    }

    fn direction(&self, setting: Setting) -> Vec3<f64> {
        match setting {
            Setting::A => self.bell.a,
            Setting::APrime => self.bell.a_prime,
            Setting::B => self.bell.b,
            Setting::BPrime => self.bell.b_prime,
            Setting::Key(i) => self.key_axes[i],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub index: usize,
    pub p1: Vec3<f64>,
    pub p2: Vec3<f64>,
    pub alice: Setting,
    pub bob: Setting,
    pub alice_outcome: i8,
    pub bob_outcome: i8,
    pub attacked: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolTranscript {
    pub schema_version: u32,
    /// Bob inverts his raw bits so that anti-correlated outcomes give identical keys.
    pub key_convention: String,
    pub records: Vec<RoundRecord>,
    pub sifted_indices: Vec<usize>,
    pub alice_key: Vec<u8>,
    pub bob_key: Vec<u8>,
    pub bell_test: BellTestRecord,
}

impl ProtocolTranscript {
    /// Fraction of sifted positions where the two keys differ.
    pub fn key_disagreement_rate(&self) -> f64 {
        if self.alice_key.is_empty() {
            return 0.0;
        }
        let differ = self.alice_key.iter().zip(&self.bob_key).filter(|(x, y)| x != y).count();
        differ as f64 / self.alice_key.len() as f64
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("transcript serializes")
    }

    /// Per-round CSV, one line per pair.
    pub fn records_csv(&self) -> String {
        let mut out = String::from(
            "index,p1x,p1y,p1z,p2x,p2y,p2z,alice_setting,bob_setting,alice_outcome,bob_outcome,attacked\n",
        );
        for r in &self.records {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                r.index,
                r.p1.x,
                r.p1.y,
                r.p1.z,
                r.p2.x,
                r.p2.y,
                r.p2.z,
                r.alice.label(),
                r.bob.label(),
                r.alice_outcome,
                r.bob_outcome,
                u8::from(r.attacked)
            )
            .expect("write to String");
        }
        out
    }

    /// Single-line verdict summary.
    pub fn summary_json(&self) -> String {
        let t = &self.bell_test;
        json!({
            "c_hat": t.c_hat,
            "stderr": t.stderr,
            "naive_verdict": t.naive_verdict,
            "corrected_verdict": t.corrected_verdict,
            "threshold": t.corrected_threshold,
        })
        .to_string()
    }
}

/// Outcomes from `P(s, t) = (1 + s t k) / 4` driven by two uniforms.
fn outcomes_from_uniforms(k: f64, u_first: f64, u_second: f64) -> (i8, i8) {
    let s = if u_first < 0.5 { 1 } else { -1 };
    let t = if u_second < 0.5 * (1.0 + k) { s } else { -s };
    (s, t)
}

/// Draws Alice's and Bob's `+-1` outcomes with unbiased marginals and
/// correlation `K = correlator_integrand(a, b, kin1, kin2)`.
pub fn sample_pair_outcomes<R: Rng + ?Sized>(
    a_dir: Vec3<f64>,
    b_dir: Vec3<f64>,
    kin1: &ParticleKinematics<f64>,
    kin2: &ParticleKinematics<f64>,
    rng: &mut R,
) -> Result<(i8, i8)> {
    let k = correlator_integrand(a_dir, b_dir, kin1, kin2)?;
    Ok(outcomes_from_uniforms(k, rng.random(), rng.random()))
}

fn choose(u_kind: f64, u_pick: f64, test_fraction: f64, tests: [Setting; 2], keys: usize) -> Setting {
    if u_kind < test_fraction {
        if u_pick < 0.5 {
            tests[0]
        } else {
            tests[1]
        }
    } else {
        Setting::Key(((u_pick * keys as f64) as usize).min(keys - 1))
    }
}

/// Simulates one protocol run and its Bell test.
///
/// Every round consumes the same number of uniforms whether or not Eve acts,
/// so runs that differ only in attack probability share their randomness.
pub fn run_protocol(config: &ProtocolConfig) -> Result<ProtocolTranscript> {
    config.validate()?;
    let dist = &config.distribution;
    let keys = config.key_axes.len();
    let mut rng = substream(config.seed, PROTOCOL_STREAM);
    let mut records = Vec::with_capacity(config.pairs);

    for index in 0..config.pairs {
        let pair = dist.sample(&mut rng);
        let u: [f64; 9] = std::array::from_fn(|_| rng.random());
        let [alice_kind, alice_pick, bob_kind, bob_pick, attack, eve_pick, o1, o2, o3] = u;
        let alice = choose(alice_kind, alice_pick, config.test_fraction, [Setting::A, Setting::APrime], keys);
        let bob = choose(bob_kind, bob_pick, config.test_fraction, [Setting::B, Setting::BPrime], keys);
        let kin1 = dist.kinematics(pair.p1)?;
        let kin2 = dist.kinematics(pair.p2)?;
        let (a_dir, b_dir) = (config.direction(alice), config.direction(bob));

        let eve_axis = match &config.eve {
            EveStrategy::InterceptResend { pool, probability } if attack < *probability => {
                Some(pool[((eve_pick * pool.len() as f64) as usize).min(pool.len() - 1)])
            }
            _ => None,
        };
        let (alice_outcome, bob_outcome) = match eve_axis {
            None => outcomes_from_uniforms(correlator_integrand(a_dir, b_dir, &kin1, &kin2)?, o1, o2),
            Some(e) => {
                let (s, eve_outcome) = outcomes_from_uniforms(correlator_integrand(a_dir, e, &kin1, &kin2)?, o1, o2);
                // resent spin polarized along Eve's boosted axis: <b> = eve_outcome * (e_hat . b_hat)
                let overlap = -correlator_integrand(e, b_dir, &kin2, &kin2)?;
                let t = if o3 < 0.5 * (1.0 + overlap) { eve_outcome } else { -eve_outcome };
                (s, t)
            }
        };
        records.push(RoundRecord {
            index,
            p1: pair.p1,
            p2: pair.p2,
            alice,
            bob,
            alice_outcome,
            bob_outcome,
            attacked: eve_axis.is_some(),
        });
    }

    let mut sifted_indices = Vec::new();
    let mut alice_key = Vec::new();
    let mut bob_key = Vec::new();
    for r in &records {
        if r.alice.is_key() && r.alice == r.bob {
            sifted_indices.push(r.index);
            alice_key.push(u8::from(r.alice_outcome == 1));
            bob_key.push(u8::from(r.bob_outcome == -1));
        }
    }

    let threshold = match config.threshold_mode {
        ThresholdMode::Empirical => empirical_threshold(&config.bell, dist, &records)?,
        ThresholdMode::Distribution { samples } => corrected_threshold(&config.bell, dist, samples, config.seed)?,
    };
    let bell = bell_test(&records, config.significance, threshold)?;

    Ok(ProtocolTranscript {
        schema_version: SCHEMA_VERSION,
        key_convention: KEY_CONVENTION.to_string(),
        records,
        sifted_indices,
        alice_key,
        bob_key,
        bell_test: bell,
    })
}

/// `|c|` averaged over the recorded momenta of every round.
fn empirical_threshold(config: &BellConfig<f64>, dist: &MomentumDistribution, records: &[RoundRecord]) -> Result<f64> {
    let mut mean = 0.0;
    for (i, r) in records.iter().enumerate() {
        let c = bell_average_kinematics(config, &dist.kinematics(r.p1)?, &dist.kinematics(r.p2)?)?;
        mean += (c - mean) / (i + 1) as f64;
    }
    Ok(mean.abs())
}
