//! Command-line behavior: staging, flag overrides and exit codes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use lexicomp_core::synth::{synth_language, SynthConfig};

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lexicomp"))
}

fn write_config(dir: &Path, n_lemmas: usize) -> PathBuf {
    let lang = synth_language("demo", 77, &SynthConfig::regular(n_lemmas));
    lang.write(dir).unwrap();
    let out = dir.join("out");
    let config = format!(
        "seed = 3\noutput_dir = \"{}\"\n\n[[language]]\nid = \"demo\"\nunimorph_path = \"demo.unimorph.tsv\"\npron_path = \"demo.pron.tsv\"\nfreq_path = \"demo.freq.tsv\"\n",
        out.display()
    );
    let path = dir.join("config.toml");
    fs::write(&path, config).unwrap();
    path
}

#[test]
fn ingest_writes_summary_and_lexicon_only() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), 50);
    let output = binary()
        .args(["ingest", "--config", config.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let out = dir.path().join("out");
    assert!(out.join("summary.tsv").exists());
    assert!(out.join("lexicon/demo.tsv").exists());
    assert!(!out.join("mi").exists());
    assert!(!out.join("ols").exists());
}

#[test]
fn measure_respects_fold_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), 40);
    let output = binary()
        .args([
            "measure",
            "--config",
            config.to_str().unwrap(),
            "--folds-phon",
            "5",
            "--folds-morph",
            "8",
        ])
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    assert!(dir.path().join("out/measures/demo.tsv").exists());
}

#[test]
fn missing_config_file_fails() {
    let output = binary()
        .args(["run-all", "--config", "/nonexistent/run.toml"])
        .output()
        .unwrap();
    assert!(!output.status.success());
}

#[test]
fn broken_input_is_reported_on_stderr_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), 40);
    // Corrupt some pronunciation lines; the run should still succeed but
    // report each bad line with its number on stderr.
    let pron_path = dir.path().join("demo.pron.tsv");
    let mut pron = fs::read_to_string(&pron_path).unwrap();
    pron.insert_str(0, "brokenline\n");
    fs::write(&pron_path, pron).unwrap();

    let output = binary()
        .args(["measure", "--config", config.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(
        stderr.contains("demo.pron.tsv:1"),
        "stderr lacks file:line diagnostics: {stderr}"
    );
}

#[test]
fn unusable_min_accuracy_fails_with_status_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), 40);
    let output = binary()
        .args([
            "run-all",
            "--config",
            config.to_str().unwrap(),
            "--min-accuracy",
            "1.01",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2), "{output:?}");
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("excluded by accuracy gate: demo"));
}

#[test]
fn single_language_regress_skips_mixed_models_but_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), 60);
    let output = binary()
        .args(["regress", "--config", config.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let json: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("out/lmm/wl_fr.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(json["status"], "skipped");
    // OLS for the single language still runs.
    let ols = fs::read_to_string(dir.path().join("out/ols/wl_fr.word.tsv")).unwrap();
    assert_eq!(ols.lines().count(), 2);
}
