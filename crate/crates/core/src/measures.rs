//! Joins the per-form measures (MI, PC, word length, frequency) into the
//! word-level and lemma-level analysis tables the regressions consume.

use std::collections::{BTreeMap, HashMap};

use log::info;

use crate::error::{Error, Result};
use crate::inflection::MIRecord;
use crate::ingest::log_cpm;
use crate::lexicon::LanguageLexicon;
use crate::phonotactics::PCRecord;
use crate::stats::DataTable;

/// One analysis row per surface form. `mean_pc` and `mean_wl` are the
/// language's means over the joined rows and are identical on every row of a
/// language.
#[derive(Debug, Clone)]
pub struct MeasureRow {
    pub language_id: String,
    pub form_id: String,
    pub mi: f64,
    pub pc: f64,
    pub wl: usize,
    pub fr: f64,
    pub mean_pc: f64,
    pub mean_wl: f64,
}

/// One analysis row per lemma: PC and WL averaged over the lemma's forms,
/// frequency summed before the counts-per-million transform, MI as the mean
/// of the form scores.
#[derive(Debug, Clone)]
pub struct LemmaMeasureRow {
    pub language_id: String,
    pub lemma_id: String,
    pub mi: f64,
    pub pc: f64,
    pub wl: f64,
    pub fr: f64,
    pub mean_pc: f64,
    pub mean_wl: f64,
}

/// Inner-joins MI records (per entry) with PC records (per surface type) and
/// the lexicon's frequencies. Rows missing any measure are dropped with a
/// logged count; an empty join is an error.
pub fn assemble_form_table(
    lexicon: &LanguageLexicon,
    pc_records: &[PCRecord],
    mi_records: &[MIRecord],
) -> Result<Vec<MeasureRow>> {
    let pc_by_form: HashMap<&str, &PCRecord> =
        pc_records.iter().map(|r| (r.form_id.as_str(), r)).collect();
    let mi_by_id: HashMap<&str, &MIRecord> =
        mi_records.iter().map(|r| (r.form_id.as_str(), r)).collect();

    let mut rows = Vec::new();
    let mut dropped = 0usize;
    for entry in &lexicon.entries {
        let id = entry.id();
        let (Some(mi), Some(pc)) = (
            mi_by_id.get(id.as_str()),
            pc_by_form.get(entry.form_orth.as_str()),
        ) else {
            dropped += 1;
            continue;
        };
        rows.push(MeasureRow {
            language_id: lexicon.language_id.clone(),
            form_id: id,
            mi: mi.mi,
            pc: pc.pc_bits,
            wl: entry.form_seg.len(),
            fr: log_cpm(entry.frequency_count, lexicon.total_corpus_tokens)?,
            mean_pc: 0.0,
            mean_wl: 0.0,
        });
    }
    if dropped > 0 {
        info!(
            "{}: dropped {dropped} forms missing a measure from the join",
            lexicon.language_id
        );
    }
    if rows.is_empty() {
        return Err(Error::DisjointJoin);
    }

    let n = rows.len() as f64;
    let mean_pc = rows.iter().map(|r| r.pc).sum::<f64>() / n;
    let mean_wl = rows.iter().map(|r| r.wl as f64).sum::<f64>() / n;
    for row in &mut rows {
        row.mean_pc = mean_pc;
        row.mean_wl = mean_wl;
    }
    Ok(rows)
}

/// Aggregates the form table by lemma. PC and WL are averaged within each
/// lemma, frequency counts are summed over the lemma's distinct surface
/// forms before the log counts-per-million transform, and MI is the mean of
/// the form values.
pub fn assemble_lemma_table(
    lexicon: &LanguageLexicon,
    form_rows: &[MeasureRow],
) -> Result<Vec<LemmaMeasureRow>> {
    let entry_info: HashMap<String, (&str, &str, u64)> = lexicon
        .entries
        .iter()
        .map(|e| {
            (
                e.id(),
                (e.lemma_orth.as_str(), e.form_orth.as_str(), e.frequency_count),
            )
        })
        .collect();

    struct Acc<'a> {
        mi: Vec<f64>,
        pc: Vec<f64>,
        wl: Vec<f64>,
        counts: BTreeMap<&'a str, u64>,
    }
    let mut by_lemma: BTreeMap<&str, Acc> = BTreeMap::new();
    for row in form_rows {
        let (lemma, form, count) = entry_info
            .get(&row.form_id)
            .copied()
            .ok_or(Error::DisjointJoin)?;
        let acc = by_lemma.entry(lemma).or_insert_with(|| Acc {
            mi: Vec::new(),
            pc: Vec::new(),
            wl: Vec::new(),
            counts: BTreeMap::new(),
        });
        acc.mi.push(row.mi);
        acc.pc.push(row.pc);
        acc.wl.push(row.wl as f64);
        // Homographic slots share one surface count; sum distinct forms only.
        acc.counts.insert(form, count);
    }
    if by_lemma.is_empty() {
        return Err(Error::DisjointJoin);
    }

    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let mut rows = Vec::new();
    for (lemma, acc) in by_lemma {
        let total_count: u64 = acc.counts.values().sum();
        assert!(total_count > 0, "lemma {lemma} with zero aggregate count");
        rows.push(LemmaMeasureRow {
            language_id: form_rows[0].language_id.clone(),
            lemma_id: lemma.to_string(),
            mi: mean(&acc.mi),
            pc: mean(&acc.pc),
            wl: mean(&acc.wl),
            fr: log_cpm(total_count, lexicon.total_corpus_tokens)?,
            mean_pc: 0.0,
            mean_wl: 0.0,
        });
    }

    let n = rows.len() as f64;
    let mean_pc = rows.iter().map(|r| r.pc).sum::<f64>() / n;
    let mean_wl = rows.iter().map(|r| r.wl).sum::<f64>() / n;
    for row in &mut rows {
        row.mean_pc = mean_pc;
        row.mean_wl = mean_wl;
    }
    Ok(rows)
}

/// Column names shared by both analysis grains.
pub const MEASURE_COLUMNS: [&str; 6] = ["MI", "PC", "WL", "FR", "mean(PC)", "mean(WL)"];

/// Builds the analysis table for regression from word-grain rows
/// (possibly spanning several languages).
pub fn form_rows_to_table(rows: &[MeasureRow]) -> DataTable {
    let mut table = DataTable::new(&MEASURE_COLUMNS);
    for row in rows {
        table.push_row(
            &row.language_id,
            &[
                row.mi,
                row.pc,
                row.wl as f64,
                row.fr,
                row.mean_pc,
                row.mean_wl,
            ],
        );
    }
    table
}

/// Builds the analysis table for regression from lemma-grain rows.
pub fn lemma_rows_to_table(rows: &[LemmaMeasureRow]) -> DataTable {
    let mut table = DataTable::new(&MEASURE_COLUMNS);
    for row in rows {
        table.push_row(
            &row.language_id,
            &[row.mi, row.pc, row.wl, row.fr, row.mean_pc, row.mean_wl],
        );
    }
    table
}
