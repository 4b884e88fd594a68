use std::path::{Path, PathBuf};
use std::process::Command;

use smhc::code::Family;
use smhc::decoders::bd_logical_rate;
use smhc::harness::{
    run_sweep, sidecar_path, to_csv, write_sweep, CurvePoint, DecoderId, OutputFormat, PGrid,
    SweepConfig, SweepMetadata, CSV_HEADER,
};

fn config(decoder: DecoderId, output: PathBuf) -> SweepConfig {
    SweepConfig {
        schema_version: 1,
        family: Family::Subsystem,
        level: 2,
        decoder,
        p: PGrid::List(vec![0.01, 0.04]),
        shots: 20_000,
        seed: 3,
        output,
        format: OutputFormat::Csv,
        workers: None,
    }
}

#[test]
fn csv_layout() {
    let point = CurvePoint {
        level: 2,
        family: Family::Subsystem,
        decoder: "blockmap".into(),
        p: 0.04,
        shots: 1000,
        errors: 110,
        rate: 0.11,
        ci_low: 0.0919,
        ci_high: 0.131,
        bd_reference: 0.13266,
        seed: 7,
        wall_time_s: 0.12345,
    };
    assert_eq!(
        to_csv(&[point]),
        format!(
            "{CSV_HEADER}\n2,subsystem,blockmap,0.04,1000,110,1.100000000e-1,9.190000000e-2,1.310000000e-1,1.326600000e-1,7,0.123\n"
        )
    );
}

#[test]
fn toml_round_trip() {
    let text = r#"
schema_version = 1
family = "original"
level = 3
decoder = "md"
p = { start = 0.01, stop = 0.1, points = 5 }
shots = 1000
seed = 9
output = "out.csv"
"#;
    let cfg = SweepConfig::from_toml(text).unwrap();
    assert_eq!(cfg.decoder, DecoderId::Md);
    assert_eq!(cfg.format, OutputFormat::Csv);
    cfg.validate().unwrap();
    let values = cfg.p.values();
    assert_eq!(values.len(), 5);
    assert!((values[0] - 0.01).abs() < 1e-15 && (values[4] - 0.1).abs() < 1e-15);
    let back = SweepConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
    assert_eq!(back, cfg);
    assert_eq!(back.hash().unwrap(), cfg.hash().unwrap());

    let nn = config("nn:models/r2.bin".parse().unwrap(), "x.csv".into());
    assert_eq!(SweepConfig::from_toml(&nn.to_toml().unwrap()).unwrap(), nn);
}

#[test]
fn invalid_configs_are_rejected() {
    let base = config(DecoderId::BlockMap, "x.csv".into());
    let broken = [
        SweepConfig { schema_version: 2, ..base.clone() },
        SweepConfig { level: 0, ..base.clone() },
        SweepConfig { p: PGrid::List(vec![0.04, 0.01]), ..base.clone() },
        SweepConfig { p: PGrid::List(vec![0.7]), ..base.clone() },
        SweepConfig { shots: 0, ..base.clone() },
        SweepConfig { decoder: DecoderId::Md, ..base.clone() },
        SweepConfig { level: 4, ..base.clone() },
        SweepConfig { decoder: DecoderId::Oracle, level: 3, ..base.clone() },
        SweepConfig { workers: Some(0), ..base.clone() },
        SweepConfig { decoder: DecoderId::Nn("missing.bin".into()), ..base.clone() },
    ];
    for cfg in broken {
        assert_eq!(cfg.validate().unwrap_err().exit_code(), 2, "{cfg:?}");
    }
    assert!(SweepConfig::from_toml("schema_version = 1").is_err());
    assert!("viterbi".parse::<DecoderId>().is_err());
}

#[test]
fn analytic_bd_sweep() {
    let cfg = SweepConfig { shots: 0, ..config(DecoderId::Bd, "x.csv".into()) };
    let points = run_sweep(&cfg).unwrap();
    for pt in &points {
        assert_eq!(pt.rate, bd_logical_rate(2, pt.p));
        assert_eq!(pt.relative_rate(), 1.0);
        assert_eq!(pt.shots, 0);
    }
}

#[test]
fn sweeps_reproduce_across_worker_counts() {
    let base = config(DecoderId::BlockMap, "x.csv".into());
    let a = run_sweep(&SweepConfig { workers: Some(1), ..base.clone() }).unwrap();
    let b = run_sweep(&SweepConfig { workers: Some(2), ..base }).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!((x.errors, x.rate, x.ci_low, x.ci_high), (y.errors, y.rate, y.ci_low, y.ci_high));
    }
    assert!(a[0].rate < a[1].rate);
}

#[test]
fn sweep_files_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("curve.json");
    let cfg = SweepConfig {
        format: OutputFormat::Json,
        ..config(DecoderId::BdGenie, out.clone())
    };
    let points = run_sweep(&cfg).unwrap();
    let meta_path = write_sweep(&cfg, &points).unwrap();
    assert_eq!(meta_path, sidecar_path(&out));
    let meta: SweepMetadata = serde_json::from_str(&std::fs::read_to_string(&meta_path).unwrap()).unwrap();
    assert_eq!(meta.config_sha256, cfg.hash().unwrap());
    assert_eq!(meta.points, 2);
    assert_eq!(meta.model_sha256, None);
    let rows: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 2);
    assert!(rows[0]["relative_rate"].as_f64().unwrap() > 0.0);
}

fn smhc(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_smhc")).args(args).output().unwrap()
}

fn code_of(out: &std::process::Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn cli_build_and_eval() {
    let out = smhc(&["build", "--level", "2", "--validate"]);
    assert_eq!(code_of(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("n=16 k=4 g=2 stab=10"), "{text}");
    assert!(text.contains("all invariants hold"));

    let out = smhc(&["eval", "--level", "2", "--decoder", "bd", "--p", "0.04"]);
    assert_eq!(code_of(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    assert!(lines.next().unwrap().starts_with("2,subsystem,bd,0.04,0,0,"));
}

#[test]
fn cli_sweep_train_and_export() {
    let dir = tempfile::tempdir().unwrap();
    let d = |name: &str| dir.path().join(name);
    let s = |p: &Path| p.to_str().unwrap().to_string();

    let model = d("r1.bin");
    let out = smhc(&["train", "--level", "1", "--samples", "2048", "--epochs", "1", "--seed", "4", "--out", &s(&model)]);
    assert_eq!(code_of(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let first = std::fs::read(&model).unwrap();
    smhc(&["train", "--level", "1", "--samples", "2048", "--epochs", "1", "--seed", "4", "--out", &s(&model)]);
    assert_eq!(std::fs::read(&model).unwrap(), first);
    assert!(d("r1.bin.train.json").is_file());

    let cfg_path = d("sweep.toml");
    let cfg = SweepConfig {
        level: 1,
        shots: 500,
        ..config(DecoderId::Nn(model.clone()), d("curve.csv"))
    };
    std::fs::write(&cfg_path, cfg.to_toml().unwrap()).unwrap();
    let out = smhc(&["sweep", &s(&cfg_path), "--workers", "1"]);
    assert_eq!(code_of(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(d("curve.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    let meta: SweepMetadata =
        serde_json::from_str(&std::fs::read_to_string(d("curve.csv.meta.json")).unwrap()).unwrap();
    assert!(meta.model_sha256.is_some());

    let out = smhc(&["export", "--level", "1", "--format", "csv", "--out", &s(&d("h.csv"))]);
    assert_eq!(code_of(&out), 0);
    assert_eq!(std::fs::read_to_string(d("h.csv")).unwrap().trim(), "1,1,1,1");
}

#[test]
fn cli_exit_codes() {
    assert_eq!(code_of(&smhc(&["build", "--level", "9"])), 2);
    assert_eq!(code_of(&smhc(&["export", "--level", "1", "--format", "xml", "--out", "x"])), 2);
    assert_eq!(code_of(&smhc(&["train", "--level", "1", "--samples", "0", "--out", "x"])), 2);
    assert_eq!(code_of(&smhc(&["eval", "--level", "2", "--decoder", "md", "--p", "0.01"])), 2);
    assert_eq!(code_of(&smhc(&["eval", "--level", "2", "--decoder", "blockmap", "--p", "0.9"])), 2);
    assert_eq!(code_of(&smhc(&["sweep", "/nonexistent/sweep.toml"])), 3);
    assert_eq!(
        code_of(&smhc(&["export", "--level", "1", "--format", "csv", "--out", "/nonexistent/dir/h.csv"])),
        3
    );

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "schema_version = 1\nlevel = \"two\"\n").unwrap();
    assert_eq!(code_of(&smhc(&["sweep", bad.to_str().unwrap()])), 2);

    let model = dir.path().join("r2.bin");
    std::fs::write(&model, b"not a model").unwrap();
    let arg = format!("nn:{}", model.display());
    assert_eq!(code_of(&smhc(&["eval", "--level", "2", "--decoder", &arg, "--p", "0.01"])), 2);
}

#[test]
fn shipped_configs_are_valid() {
    for text in [
        include_str!("../../../configs/subsystem_r2_blockmap.toml"),
        include_str!("../../../configs/original_md.toml"),
    ] {
        SweepConfig::from_toml(text).unwrap().validate().unwrap();
    }
}
