//! TSV serialization of pipeline outputs, with fixed float formatting so
//! reruns are byte-identical.

use crate::inflection::{LemmaMIRecord, MIRecord};
use crate::measures::{LemmaMeasureRow, MeasureRow};
use crate::phonotactics::PCRecord;
use crate::stats::CoefficientEstimate;

/// General measures use fixed-point notation.
pub fn fnum(v: f64) -> String {
    format!("{v:.6}")
}

/// P-values span many orders of magnitude; keep them in scientific notation.
pub fn fpval(p: f64) -> String {
    format!("{p:.6e}")
}

pub fn pc_tsv(language: &str, records: &[PCRecord]) -> String {
    let mut out = String::from("language\tform\tlength\tsurprisal_bits\tpc_bits\n");
    for r in records {
        out.push_str(&format!(
            "{language}\t{}\t{}\t{}\t{}\n",
            r.form_id,
            r.length,
            fnum(r.surprisal_bits),
            fnum(r.pc_bits)
        ));
    }
    out
}

pub fn mi_tsv(language: &str, records: &[MIRecord]) -> String {
    let mut out = String::from("language\tlemma\tform\tfeatures\tp_correct\tmi\n");
    for r in records {
        out.push_str(&format!(
            "{language}\t{}\t{}\t{}\t{}\t{}\n",
            r.lemma,
            r.form,
            r.features,
            fnum(r.p_correct),
            fnum(r.mi)
        ));
    }
    out
}

pub fn lemma_mi_tsv(language: &str, records: &[LemmaMIRecord]) -> String {
    let mut out = String::from("language\tlemma\tmi_lemma\tn_forms\n");
    for r in records {
        out.push_str(&format!(
            "{language}\t{}\t{}\t{}\n",
            r.lemma_id,
            fnum(r.mi_lemma),
            r.n_forms
        ));
    }
    out
}

pub fn measures_tsv(rows: &[MeasureRow]) -> String {
    let mut out = String::from("language\tform_id\tmi\tpc\twl\tfr\tmean_pc\tmean_wl\n");
    for r in rows {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            r.language_id,
            r.form_id,
            fnum(r.mi),
            fnum(r.pc),
            r.wl,
            fnum(r.fr),
            fnum(r.mean_pc),
            fnum(r.mean_wl)
        ));
    }
    out
}

pub fn lemma_measures_tsv(rows: &[LemmaMeasureRow]) -> String {
    let mut out = String::from("language\tlemma\tmi\tpc\twl\tfr\tmean_pc\tmean_wl\n");
    for r in rows {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            r.language_id,
            r.lemma_id,
            fnum(r.mi),
            fnum(r.pc),
            fnum(r.wl),
            fnum(r.fr),
            fnum(r.mean_pc),
            fnum(r.mean_wl)
        ));
    }
    out
}

/// One family of per-language coefficients (a single variable pair and
/// grouping), after BH adjustment.
pub fn ols_family_tsv(rows: &[(String, usize, CoefficientEstimate)]) -> String {
    let mut out = String::from("language\tn\tbeta\tse\tci_low\tci_high\tp_raw\tp_adj\n");
    for (language, n, est) in rows {
        out.push_str(&format!(
            "{language}\t{n}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            fnum(est.beta),
            fnum(est.se),
            fnum(est.ci_low),
            fnum(est.ci_high),
            fpval(est.p_raw),
            est.p_adj.map(fpval).unwrap_or_else(|| "NA".to_string())
        ));
    }
    out
}

pub fn spearman_tsv(rows: &[(String, usize, f64, f64)]) -> String {
    let mut out = String::from("pair\tn_languages\trho\tp\n");
    for (pair, n, rho, p) in rows {
        out.push_str(&format!("{pair}\t{n}\t{}\t{}\n", fnum(*rho), fpval(*p)));
    }
    out
}
