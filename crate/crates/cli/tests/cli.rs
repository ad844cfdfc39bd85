use std::fs;
use std::process::{Command, Output};

use proptest::prelude::*;
use relbell::bell::{BellConfig, Figure, ScanSpec};
use relbell::ekert::ThresholdMode;
use relbell::Vec3f64;
use relbell_cli::args::{Beam, DistKind, EveConfig, EveKind, Format};
use relbell_cli::{parse_args, render, RunConfig};

fn relbell(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relbell")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn orthogonal_axes_at_rest() {
    assert_eq!(stdout(&relbell(&["correlate", "--a", "1,0,0", "--b", "0,1,0", "--beta", "0,0,0"])), "K = 0\n");
}

#[test]
fn gully_bell_average() {
    let text = stdout(&relbell(&["bell", "--beta", "0.9,0,0"]));
    let value: f64 = text.trim().strip_prefix("c = ").unwrap().parse().unwrap();
    assert!((value + 2.6325562161047418).abs() < 1e-12, "{text}");
}

#[test]
fn fig6_scan_to_file_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_relbell"))
            .args(["scan", "--figure", "6", "--resolution", "200", "--out", name])
            .env("RELBELL_OUT_DIR", dir.path())
            .output()
            .unwrap();
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
        fs::read(dir.path().join(name)).unwrap()
    };
    let first = run("fig6.csv");
    assert_eq!(first, run("again.csv"));
    let text = String::from_utf8(first).unwrap();
    assert!(text.starts_with("beta,corr_relativistic,reference_curve\n"));
    assert_eq!(text.lines().count(), 201);
    assert!(text.ends_with("1,-1,-1\n"));
    assert!(!text.contains('\r'));
}

#[test]
fn scan_json_to_stdout() {
    let v: serde_json::Value =
        serde_json::from_str(&stdout(&relbell(&["scan", "--figure", "5", "--resolution", "4", "--format", "json"])))
            .unwrap();
    assert_eq!(v["records"].as_array().unwrap().len(), 4);
    assert_eq!(v["metadata"]["figure"], 5);
}

#[test]
fn protocol_prints_one_line_summary() {
    let text = stdout(&relbell(&["protocol", "--pairs", "20000", "--seed", "4", "--beta", "0.9,0,0"]));
    assert_eq!(text.lines().count(), 1);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["c_hat", "stderr", "naive_verdict", "corrected_verdict", "threshold"]);
    assert_eq!(v["naive_verdict"], "eavesdropper");
}

#[test]
fn protocol_csv_transcript() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rounds.csv");
    let path = path.to_str().unwrap();
    stdout(&relbell(&["protocol", "--pairs", "1000", "--out", path, "--format", "csv"]));
    let text = fs::read_to_string(path).unwrap();
    assert!(text.starts_with("index,p1x,p1y,p1z,p2x,p2y,p2z,alice_setting,bob_setting,alice_outcome,bob_outcome,attacked\n"));
    assert_eq!(text.lines().count(), 1001);
}

#[test]
fn exit_codes() {
    assert_eq!(relbell(&["--help"]).status.code(), Some(0));
    assert_eq!(relbell(&["--version"]).status.code(), Some(0));
    let bad = relbell(&["bell", "--beta", "1,0,0"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("--beta"));
    assert_eq!(relbell(&["bell", "--nope"]).status.code(), Some(1));
    assert_eq!(relbell(&["scan", "--figure", "7"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let blocked = dir.path().join("file");
    fs::write(&blocked, "").unwrap();
    let target = blocked.join("out.csv");
    let failed = relbell(&["scan", "--figure", "5", "--out", target.to_str().unwrap()]);
    assert_eq!(failed.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&failed.stderr).contains("out.csv"));
}

#[test]
fn help_cites_default_geometry() {
    let help = stdout(&relbell(&["bell", "--help"]));
    assert!(help.contains("Fig. 1 geometry"));
}

#[test]
fn non_unit_vectors_warn() {
    let out = relbell(&["correlate", "--a", "2,0,0", "--b", "2,0,0"]);
    assert_eq!(stdout(&out), "K = -1\n");
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning: --a"));
}

#[test]
fn config_file_defaults_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.conf");
    fs::write(&path, "# gully run\ncommand = bell\nbeta = 0.9,0,0\nseed = 5\n").unwrap();
    let p = path.to_str().unwrap();

    let from_file = parse_args(["relbell", "--config", p]).unwrap().config;
    let explicit = parse_args(["relbell", "bell", "--beta", "0.9,0,0", "--seed", "5"]).unwrap().config;
    assert_eq!(from_file, explicit);

    let overridden = parse_args(["relbell", "bell", "--config", p, "--beta", "0.5,0,0"]).unwrap().config;
    let RunConfig::Bell { beam, seed, .. } = overridden else { panic!() };
    assert_eq!(beam.beta, Vec3f64::new(0.5, 0.0, 0.0));
    assert_eq!(seed, 5);

    assert_eq!(stdout(&relbell(&["--config", p])), stdout(&relbell(&["bell", "--beta", "0.9,0,0"])));
}

fn unit() -> impl Strategy<Value = Vec3f64> {
    (0.0..std::f64::consts::TAU, -1.0f64..1.0).prop_map(|(phi, c)| Vec3f64::from_angles(phi, c.acos()))
}

fn velocity() -> impl Strategy<Value = Vec3f64> {
    (unit(), 0.0..0.99f64).prop_map(|(n, b)| n * b)
}

fn sigma() -> impl Strategy<Value = Vec3f64> {
    (0.0..0.5f64, 0.0..0.5f64, 0.0..0.5f64).prop_map(|(x, y, z)| Vec3f64::new(x, y, z))
}

fn beam() -> impl Strategy<Value = Beam> {
    (
        prop_oneof![Just(DistKind::Sharp), Just(DistKind::Correlated), Just(DistKind::Joint)],
        velocity(),
        proptest::option::of(velocity()),
        0.01..100.0f64,
        sigma(),
        proptest::option::of(sigma()),
    )
        .prop_map(|(dist, beta, beta2, mass, sigma, sigma2)| Beam { dist, beta, beta2, mass, sigma, sigma2 })
}

fn directions() -> impl Strategy<Value = BellConfig<f64>> {
    (unit(), unit(), unit(), unit()).prop_map(|(a, a_prime, b, b_prime)| BellConfig { a, a_prime, b, b_prime })
}

fn text_or_json() -> impl Strategy<Value = Format> {
    prop_oneof![Just(Format::Text), Just(Format::Json)]
}

fn run_config() -> impl Strategy<Value = RunConfig> {
    prop_oneof![
        (unit(), unit(), beam(), 100..1_000_000usize, any::<u64>(), text_or_json()).prop_map(
            |(a, b, beam, samples, seed, format)| RunConfig::Correlate { a, b, beam, samples, seed, format }
        ),
        (directions(), beam(), 100..1_000_000usize, any::<u64>(), text_or_json()).prop_map(
            |(directions, beam, samples, seed, format)| RunConfig::Bell { directions, beam, samples, seed, format }
        ),
        (directions(), beam(), 100..1_000_000usize, any::<u64>(), text_or_json()).prop_map(
            |(directions, beam, samples, seed, format)| RunConfig::Threshold { directions, beam, samples, seed, format }
        ),
        (1..=6u32, 2..500usize, 0.01..10.0f64, 0.0..0.5f64, 0.5..0.999f64, "[a-z]{1,8}\\.(csv|json)", any::<bool>())
            .prop_map(|(fig, resolution, mass, beta_min, beta_max, out, json)| RunConfig::Scan {
                spec: ScanSpec { figure: Figure::from_id(fig).unwrap(), resolution, mass, beta_min, beta_max },
                out,
                format: if json { Format::Json } else { Format::Csv },
            }),
        (
            (1_000..1_000_000usize, directions(), beam(), any::<u64>()),
            proptest::collection::vec(unit(), 1..4),
            (any::<bool>(), 0.0..=1.0f64, proptest::option::of(proptest::collection::vec(unit(), 1..5))),
            (0.2..0.8f64, 0.001..0.2f64, proptest::option::of(100..1_000_000usize)),
            (proptest::option::of("[a-z]{1,8}\\.json"), any::<bool>()),
        )
            .prop_map(
                |((pairs, directions, beam, seed), key_axes, (attack, probability, pool), (test_fraction, significance, mc), (out, csv))| {
                    RunConfig::Protocol {
                        pairs,
                        directions,
                        beam,
                        seed,
                        key_axes,
                        eve: EveConfig {
                            kind: if attack { EveKind::InterceptResend } else { EveKind::None },
                            probability,
                            pool,
                        },
                        test_fraction,
                        significance,
                        threshold_mode: match mc {
                            Some(samples) => ThresholdMode::Distribution { samples },
                            None => ThresholdMode::Empirical,
                        },
                        out,
                        format: if csv { Format::Csv } else { Format::Json },
                    }
                },
            ),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn parse_render_roundtrip(cfg in run_config()) {
        let argv = render(&cfg);
        let parsed = parse_args(&argv).map_err(|e| TestCaseError::fail(format!("{argv:?}: {e}")))?;
        prop_assert_eq!(parsed.config, cfg);
    }
}
