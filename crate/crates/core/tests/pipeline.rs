//! End-to-end pipeline behavior on generated languages: output inventory,
//! gate soundness, and multiple-comparison family sizes.

use std::fs;
use std::path::Path;

use lexicomp_core::report::{run_pipeline, RunConfig, Stage};
use lexicomp_core::synth::{synth_language, SynthConfig};

fn write_toy(dir: &Path, with_unlearnable: bool) -> std::path::PathBuf {
    let mut langs = vec![
        synth_language("alpha", 201, &SynthConfig::regular(80)),
        synth_language("beta", 202, &SynthConfig::suppletive(80)),
        synth_language("gamma", 203, &SynthConfig::zipfian(90)),
    ];
    if with_unlearnable {
        langs.push(synth_language("noise", 204, &SynthConfig::unlearnable(60)));
    }
    let mut config = format!("seed = 5\noutput_dir = \"{}\"\n", dir.join("out").display());
    for lang in &langs {
        lang.write(dir).unwrap();
        config.push_str(&format!(
            "\n[[language]]\nid = \"{id}\"\nunimorph_path = \"{id}.unimorph.tsv\"\npron_path = \"{id}.pron.tsv\"\nfreq_path = \"{id}.freq.tsv\"\n",
            id = lang.id
        ));
    }
    let path = dir.join("config.toml");
    fs::write(&path, config).unwrap();
    path
}

#[test]
fn full_run_emits_the_complete_output_tree() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = write_toy(dir.path(), false);
    let config = RunConfig::load(&config_path).unwrap();
    let summary = run_pipeline(&config, Stage::Report).unwrap();
    assert_eq!(summary.included.len(), 3);
    assert!(summary.usable());

    let out = dir.path().join("out");
    for lmm in ["mi_pc", "pc_wl", "mi_fr", "pc_fr", "mi_wl", "wl_fr"] {
        assert!(out.join("lmm").join(format!("{lmm}.json")).exists(), "{lmm} json");
    }
    let ols_files: Vec<_> = fs::read_dir(out.join("ols")).unwrap().collect();
    assert_eq!(ols_files.len(), 9, "6 word + 3 lemma families");
    let figures: Vec<_> = fs::read_dir(out.join("figures")).unwrap().collect();
    assert_eq!(figures.len(), 12, "9 forests + 3 scatters");
    assert!(out.join("summary.tsv").exists());
    assert!(out.join("spearman.tsv").exists());
    for lang in ["alpha", "beta", "gamma"] {
        assert!(out.join("measures").join(format!("{lang}.tsv")).exists());
        assert!(out.join("measures").join(format!("{lang}.lemma.tsv")).exists());
        assert!(out.join("pc").join(format!("{lang}.tsv")).exists());
        assert!(out.join("mi").join(format!("{lang}.tsv")).exists());
    }

    // Each LMM report parses and carries its spec.
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("lmm/wl_fr.json")).unwrap()).unwrap();
    assert_eq!(json["spec"]["response"], "WL");
    assert_eq!(json["status"], "ok");
    assert_eq!(json["fit"]["fixed"].as_array().unwrap().len(), 2);
}

#[test]
fn excluded_language_feeds_no_regression_input() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = write_toy(dir.path(), true);
    let config = RunConfig::load(&config_path).unwrap();
    let summary = run_pipeline(&config, Stage::Report).unwrap();
    assert_eq!(summary.included.len(), 3);
    assert_eq!(summary.excluded, vec!["noise".to_string()]);

    let out = dir.path().join("out");
    let summary_text = fs::read_to_string(out.join("summary.tsv")).unwrap();
    let noise_row = summary_text
        .lines()
        .find(|l| l.starts_with("noise\t"))
        .expect("summary row for the excluded language");
    assert!(noise_row.contains("excluded"));

    assert!(!out.join("measures/noise.tsv").exists());
    assert!(!out.join("pc/noise.tsv").exists());
    // MI diagnostics still exist for excluded languages.
    assert!(out.join("mi/noise.tsv").exists());

    for entry in fs::read_dir(out.join("ols")).unwrap() {
        let path = entry.unwrap().path();
        let text = fs::read_to_string(&path).unwrap();
        assert!(
            !text.lines().any(|l| l.starts_with("noise\t")),
            "{} mentions the excluded language",
            path.display()
        );
        // BH family size equals the number of included languages.
        assert_eq!(text.lines().count(), 1 + 3, "{}", path.display());
    }
}

#[test]
fn measure_stage_stops_before_regressions() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = write_toy(dir.path(), false);
    let config = RunConfig::load(&config_path).unwrap();
    run_pipeline(&config, Stage::Measure).unwrap();
    let out = dir.path().join("out");
    assert!(out.join("measures/alpha.tsv").exists());
    assert!(!out.join("ols").exists());
    assert!(!out.join("lmm").exists());
    assert!(!out.join("figures").exists());
}

#[test]
fn adjusted_p_values_dominate_raw_ones() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = write_toy(dir.path(), false);
    let config = RunConfig::load(&config_path).unwrap();
    run_pipeline(&config, Stage::Regress).unwrap();
    let out = dir.path().join("out");
    for entry in fs::read_dir(out.join("ols")).unwrap() {
        let text = fs::read_to_string(entry.unwrap().path()).unwrap();
        for line in text.lines().skip(1) {
            let fields: Vec<&str> = line.split('\t').collect();
            let p_raw: f64 = fields[6].parse().unwrap();
            let p_adj: f64 = fields[7].parse().unwrap();
            assert!(p_adj >= p_raw - 1e-15);
            assert!(p_adj <= 1.0);
        }
    }
}
