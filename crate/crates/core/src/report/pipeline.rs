//! End-to-end orchestration: per-language ingestion, measures and the gate,
//! then the cross-language regression battery, correlations and figures.
//! The whole run is a pure function of (inputs, config, seed): reruns
//! produce byte-identical non-log outputs.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use log::{error, info, warn};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::folds::derive_seed;
use crate::inflection::{
    accuracy_gate, leave_out_probs, lemma_mi_records, mi_records, GateDecision, LemmaMIRecord,
    MIRecord,
};
use crate::ingest::{
    build_lexicon, count_frequencies, parse_freq_tsv, parse_pron_dict, parse_unimorph,
    IngestCounts, LineIssue,
};
use crate::lexicon::PhonemeInventory;
use crate::measures::{
    assemble_form_table, assemble_lemma_table, form_rows_to_table, lemma_rows_to_table,
    LemmaMeasureRow, MeasureRow,
};
use crate::phonotactics::{crossval_pc, PCRecord};
use crate::stats::{
    benjamini_hochberg, build_spec_battery, design_with_intercept, lmm_fit, mean, ols_fit,
    spearman, standardize, CoefficientEstimate, DataTable, MixedModelFit, RegressionSpec,
};

use super::config::{LanguageConfig, RunConfig};
use super::svg::{render_forest, render_scatter, ForestEntry, ScatterPoint};
use super::tables;

/// How far the run goes. Stages are cumulative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Ingest,
    Measure,
    Regress,
    Report,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum LanguageStatus {
    Included,
    Excluded,
    Failed(String),
}

/// Everything the pipeline derived for one language.
pub struct LanguageReport {
    pub id: String,
    pub status: LanguageStatus,
    pub mean_p_correct: Option<f64>,
    pub counts: IngestCounts,
    pub word_types: usize,
    pub pc_records: Vec<PCRecord>,
    pub mi_records: Vec<MIRecord>,
    pub lemma_mi: Vec<LemmaMIRecord>,
    pub form_rows: Vec<MeasureRow>,
    pub lemma_rows: Vec<LemmaMeasureRow>,
    pub lexicon_dump: String,
}

pub struct PipelineSummary {
    pub included: Vec<String>,
    pub excluded: Vec<String>,
    pub failed: Vec<(String, String)>,
}

impl PipelineSummary {
    /// A run is usable when at least one language survived the gate (or,
    /// for ingest-only runs, parsed at all).
    pub fn usable(&self) -> bool {
        !self.included.is_empty()
    }
}

fn log_issues(file: &Path, issues: &[LineIssue]) {
    for issue in issues {
        warn!("{}:{}: {}", file.display(), issue.line, issue.message);
    }
}

fn process_language(
    config: &RunConfig,
    lang: &LanguageConfig,
    stage: Stage,
) -> Result<LanguageReport> {
    let unimorph_text = fs::read_to_string(&lang.unimorph_path)?;
    let parsed = parse_unimorph(&unimorph_text).map_err(|e| match e {
        Error::TooManyParseErrors { failed, total, .. } => Error::TooManyParseErrors {
            file: lang.unimorph_path.display().to_string(),
            failed,
            total,
        },
        other => other,
    })?;
    log_issues(&lang.unimorph_path, &parsed.issues);

    let pron_text = fs::read_to_string(&lang.pron_path)?;
    let prons = parse_pron_dict(&pron_text)?;
    log_issues(&lang.pron_path, &prons.issues);

    let freqs = if let Some(freq_path) = &lang.freq_path {
        let (table, issues) = parse_freq_tsv(&fs::read_to_string(freq_path)?)?;
        log_issues(freq_path, &issues);
        table
    } else {
        let path = lang.raw_text_path.as_ref().expect("validated config");
        count_frequencies(fs::File::open(path)?)?
    };

    let inventory = PhonemeInventory::from_pronunciations(prons.prons.values())?;
    let (lexicon, counts) = build_lexicon(&lang.id, &parsed.triples, &prons.prons, &freqs, &inventory)?;
    let word_types = lexicon.word_types().len();

    let lexicon_dump = {
        let mut out = String::from("lemma\tform\tfeatures\tlemma_seg\tform_seg\tcount\n");
        for e in &lexicon.entries {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\n",
                e.lemma_orth,
                e.form_orth,
                e.features,
                crate::lexicon::join_segments_spaced(&e.lemma_seg),
                crate::lexicon::join_segments_spaced(&e.form_seg),
                e.frequency_count
            ));
        }
        out
    };

    let mut report = LanguageReport {
        id: lang.id.clone(),
        status: LanguageStatus::Included,
        mean_p_correct: None,
        counts,
        word_types,
        pc_records: Vec::new(),
        mi_records: Vec::new(),
        lemma_mi: Vec::new(),
        form_rows: Vec::new(),
        lemma_rows: Vec::new(),
        lexicon_dump,
    };
    if stage < Stage::Measure {
        return Ok(report);
    }

    // Irregularity first: the gate decides whether anything else is worth
    // computing.
    let mi_seed = derive_seed(config.seed, &format!("mi|{}", lang.id));
    let scores = leave_out_probs(&lexicon, config.folds_morph, mi_seed)?;
    let probs: Vec<f64> = scores.iter().map(|s| s.p_correct).collect();
    let gate: GateDecision = accuracy_gate(&probs, config.min_accuracy)?;
    report.mean_p_correct = Some(gate.mean_p_correct);
    report.mi_records = mi_records(&scores)?;
    report.lemma_mi = lemma_mi_records(&report.mi_records)?;

    if !gate.included {
        info!(
            "{}: excluded by the accuracy gate ({} < {})",
            lang.id, gate.mean_p_correct, config.min_accuracy
        );
        report.status = LanguageStatus::Excluded;
        return Ok(report);
    }

    let pc_seed = derive_seed(config.seed, &format!("pc|{}", lang.id));
    report.pc_records = crossval_pc(
        &lexicon,
        config.folds_phon,
        pc_seed,
        config.ngram_order,
        config.smoothing()?,
    )?;
    report.form_rows = assemble_form_table(&lexicon, &report.pc_records, &report.mi_records)?;
    report.lemma_rows = assemble_lemma_table(&lexicon, &report.form_rows)?;
    Ok(report)
}

fn write(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, content)?;
    Ok(())
}

/// The OLS half of the battery: per-language fits of the key predictor plus
/// the spec's per-language controls, BH-adjusted across languages.
fn ols_family(
    spec: &RegressionSpec,
    tables: &BTreeMap<String, DataTable>,
) -> Vec<(String, usize, CoefficientEstimate)> {
    let mut rows: Vec<(String, usize, CoefficientEstimate)> = Vec::new();
    for (language, table) in tables {
        let fit = (|| -> Result<(usize, CoefficientEstimate)> {
            let y = table.column(&spec.response)?.to_vec();
            let mut names = vec!["(Intercept)".to_string()];
            let mut cols: Vec<Vec<f64>> = Vec::new();
            for predictor in std::iter::once(spec.predictor())
                .chain(spec.per_language_controls.iter().map(String::as_str))
            {
                cols.push(standardize(predictor, table.column(predictor)?)?);
                names.push(predictor.to_string());
            }
            let col_refs: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
            let x = design_with_intercept(&col_refs);
            let fit = ols_fit(&y, &x, &names)?;
            let est = fit
                .coefficient(spec.predictor())
                .expect("predictor coefficient present")
                .clone();
            Ok((fit.n, est))
        })();
        match fit {
            Ok((n, est)) => rows.push((language.clone(), n, est)),
            Err(e) => warn!("{language}: {} OLS skipped: {e}", spec.pair_name()),
        }
    }
    // BH within this family, across languages.
    let p_raw: Vec<f64> = rows.iter().map(|(_, _, est)| est.p_raw.clamp(0.0, 1.0)).collect();
    if let Ok(adjusted) = benjamini_hochberg(&p_raw) {
        for (row, adj) in rows.iter_mut().zip(adjusted) {
            row.2.p_adj = Some(adj);
        }
    }
    rows
}

#[derive(Serialize)]
struct LmmReport<'a> {
    spec: &'a RegressionSpec,
    status: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fit: Option<MixedModelFit>,
}

/// Runs the configured pipeline through `stage`, writing all outputs under
/// the config's output directory. Per-language failures are logged and
/// skipped so one bad dataset cannot kill the run.
pub fn run_pipeline(config: &RunConfig, stage: Stage) -> Result<PipelineSummary> {
    config.validate()?;
    let out = &config.output_dir;
    fs::create_dir_all(out)?;

    let reports: Vec<(String, Result<LanguageReport>)> = {
        let work = |lang: &LanguageConfig| (lang.id.clone(), process_language(config, lang, stage));
        if config.jobs == 1 {
            config.languages.iter().map(work).collect()
        } else {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(config.jobs)
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            pool.install(|| {
                use rayon::prelude::*;
                config.languages.par_iter().map(work).collect()
            })
        }
    };

    let mut summary = PipelineSummary {
        included: Vec::new(),
        excluded: Vec::new(),
        failed: Vec::new(),
    };
    let mut languages: BTreeMap<String, LanguageReport> = BTreeMap::new();
    for (id, result) in reports {
        match result {
            Ok(report) => {
                match &report.status {
                    LanguageStatus::Included => summary.included.push(id.clone()),
                    LanguageStatus::Excluded => summary.excluded.push(id.clone()),
                    LanguageStatus::Failed(_) => unreachable!("failures arrive as Err"),
                }
                languages.insert(id, report);
            }
            Err(e) => {
                error!("{id}: skipped: {e}");
                summary.failed.push((id, e.to_string()));
            }
        }
    }

    // Per-language files.
    for (id, report) in &languages {
        write(&out.join("lexicon").join(format!("{id}.tsv")), &report.lexicon_dump)?;
        if stage >= Stage::Measure {
            write(
                &out.join("mi").join(format!("{id}.tsv")),
                &tables::mi_tsv(id, &report.mi_records),
            )?;
            write(
                &out.join("mi").join(format!("{id}.lemma.tsv")),
                &tables::lemma_mi_tsv(id, &report.lemma_mi),
            )?;
            if report.status == LanguageStatus::Included {
                write(
                    &out.join("pc").join(format!("{id}.tsv")),
                    &tables::pc_tsv(id, &report.pc_records),
                )?;
                write(
                    &out.join("measures").join(format!("{id}.tsv")),
                    &tables::measures_tsv(&report.form_rows),
                )?;
                write(
                    &out.join("measures").join(format!("{id}.lemma.tsv")),
                    &tables::lemma_measures_tsv(&report.lemma_rows),
                )?;
            }
        }
    }

    // Summary: one row per configured language, configuration order.
    {
        let mut text =
            String::from("language\tstatus\tmean_p_correct\ttriples\tno_pronunciation\tzero_frequency\tout_of_inventory\tduplicate_slots\tentries\tlexemes\tword_types\tmi_forms\tform_rows\tlemma_rows\n");
        for lang in &config.languages {
            let id = &lang.id;
            if let Some(r) = languages.get(id) {
                let status = match r.status {
                    LanguageStatus::Included => "included",
                    LanguageStatus::Excluded => "excluded",
                    LanguageStatus::Failed(_) => "failed",
                };
                let c = &r.counts;
                text.push_str(&format!(
                    "{id}\t{status}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                    r.mean_p_correct
                        .map(tables::fnum)
                        .unwrap_or_else(|| "NA".to_string()),
                    c.triples,
                    c.no_pronunciation,
                    c.zero_frequency,
                    c.out_of_inventory,
                    c.duplicate_slots,
                    c.entries,
                    c.lexemes,
                    r.word_types,
                    r.mi_records.len(),
                    r.form_rows.len(),
                    r.lemma_rows.len()
                ));
            } else {
                let reason = summary
                    .failed
                    .iter()
                    .find(|(fid, _)| fid == id)
                    .map(|(_, e)| e.as_str())
                    .unwrap_or("unknown");
                text.push_str(&format!(
                    "{id}\tfailed\tNA\t0\t0\t0\t0\t0\t0\t0\t0\t0\t0\t0\t# {reason}\n"
                ));
            }
        }
        write(&out.join("summary.tsv"), &text)?;
    }

    if stage < Stage::Regress {
        return Ok(summary);
    }

    let included: Vec<&LanguageReport> = languages
        .values()
        .filter(|r| r.status == LanguageStatus::Included)
        .collect();

    // Per-language word- and lemma-grain tables.
    let word_tables: BTreeMap<String, DataTable> = included
        .iter()
        .map(|r| (r.id.clone(), form_rows_to_table(&r.form_rows)))
        .collect();
    let lemma_tables: BTreeMap<String, DataTable> = included
        .iter()
        .map(|r| (r.id.clone(), lemma_rows_to_table(&r.lemma_rows)))
        .collect();

    let battery = build_spec_battery();

    // OLS families: all six pairs at word grain, MI responses again at lemma
    // grain. BH families never pool across (pair × grouping).
    let mut families: Vec<(String, Vec<(String, usize, CoefficientEstimate)>)> = Vec::new();
    for spec in &battery {
        families.push((
            format!("{}.word", spec.pair_name()),
            ols_family(spec, &word_tables),
        ));
        if spec.response == "MI" {
            families.push((
                format!("{}.lemma", spec.pair_name()),
                ols_family(spec, &lemma_tables),
            ));
        }
    }
    for (name, rows) in &families {
        write(
            &out.join("ols").join(format!("{name}.tsv")),
            &tables::ols_family_tsv(rows),
        )?;
    }

    // Cross-language mixed models on the pooled word-grain table.
    let mut pooled = DataTable::new(
        &crate::measures::MEASURE_COLUMNS
            .iter()
            .copied()
            .collect::<Vec<_>>(),
    );
    for report in &included {
        pooled.extend(&form_rows_to_table(&report.form_rows));
    }
    for spec in &battery {
        let report = if included.len() < 2 {
            LmmReport {
                spec,
                status: "skipped",
                reason: Some(format!(
                    "mixed model needs at least 2 included languages, got {}",
                    included.len()
                )),
                fit: None,
            }
        } else {
            match lmm_fit(spec, &pooled) {
                Ok(fit) => LmmReport {
                    spec,
                    status: "ok",
                    reason: None,
                    fit: Some(fit),
                },
                Err(e) => {
                    warn!("{} LMM failed: {e}", spec.pair_name());
                    LmmReport {
                        spec,
                        status: "failed",
                        reason: Some(e.to_string()),
                        fit: None,
                    }
                }
            }
        };
        let mut json = serde_json::to_string_pretty(&report)?;
        json.push('\n');
        write(&out.join("lmm").join(format!("{}.json", spec.pair_name())), &json)?;
    }

    // Across-language Spearman over by-language means.
    let by_language_mean = |column: &str| -> Vec<(String, f64)> {
        word_tables
            .iter()
            .map(|(id, table)| (id.clone(), mean(table.column(column).expect("known column"))))
            .collect()
    };
    let spearman_pairs = [("MI", "PC"), ("PC", "WL"), ("MI", "WL")];
    let mut spearman_rows = Vec::new();
    let mut scatter_data: Vec<(String, String, String, Vec<ScatterPoint>)> = Vec::new();
    for (response, predictor) in spearman_pairs {
        let ys = by_language_mean(response);
        let xs = by_language_mean(predictor);
        let points: Vec<ScatterPoint> = xs
            .iter()
            .zip(&ys)
            .map(|((id, x), (_, y))| ScatterPoint {
                label: id.clone(),
                x: *x,
                y: *y,
            })
            .collect();
        let pair = format!("{}_{}", response.to_lowercase(), predictor.to_lowercase());
        if points.len() >= 3 {
            match spearman(
                &points.iter().map(|p| p.x).collect::<Vec<_>>(),
                &points.iter().map(|p| p.y).collect::<Vec<_>>(),
            ) {
                Ok((rho, p)) => spearman_rows.push((pair.clone(), points.len(), rho, p)),
                Err(e) => warn!("{pair} spearman skipped: {e}"),
            }
            scatter_data.push((
                pair,
                format!("mean {predictor} by language"),
                format!("mean {response} by language"),
                points,
            ));
        } else {
            warn!("{pair} spearman skipped: needs at least 3 included languages");
        }
    }
    write(&out.join("spearman.tsv"), &tables::spearman_tsv(&spearman_rows))?;

    if stage < Stage::Report {
        return Ok(summary);
    }

    // Figures: forest plots for every OLS family, scatters for the
    // across-language pairs.
    for (name, rows) in &families {
        if rows.is_empty() {
            warn!("figure forest_{name} skipped: no estimates");
            continue;
        }
        let entries: Vec<ForestEntry> = rows
            .iter()
            .map(|(language, _, est)| ForestEntry {
                label: language.clone(),
                beta: est.beta,
                ci_low: est.ci_low,
                ci_high: est.ci_high,
            })
            .collect();
        let (pair, grouping) = name.split_once('.').expect("family name has a grouping");
        let svg = render_forest(
            &entries,
            &format!("{pair} coefficients by language ({grouping} rows, 95% CI)"),
            "standardized coefficient",
        )?;
        write(&out.join("figures").join(format!("forest_{pair}_{grouping}.svg")), &svg)?;
    }
    for (pair, x_label, y_label, points) in &scatter_data {
        let svg = render_scatter(
            points,
            &format!("{pair} by-language means"),
            x_label,
            y_label,
        )?;
        write(&out.join("figures").join(format!("scatter_{pair}.svg")), &svg)?;
    }

    Ok(summary)
}
