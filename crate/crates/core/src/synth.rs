//! Synthetic inflectional languages, used by the test suites, the benches
//! and the bundled toy dataset. Each generator emits the three input files
//! (paradigms, pronunciations, frequencies) as TSV text, so synthetic data
//! always flows through the real parsers.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::ingest::{
    build_lexicon, parse_freq_tsv, parse_pron_dict, parse_unimorph, IngestCounts,
};
use crate::lexicon::{LanguageLexicon, PhonemeInventory};

const CONSONANTS: [&str; 12] = ["b", "d", "g", "k", "l", "m", "n", "p", "r", "s", "t", "z"];
const VOWELS: [&str; 5] = ["a", "e", "i", "o", "u"];

/// Paradigm slots: feature bundle, majority suffix, minority-class suffix,
/// share of a lexeme's token mass.
const SLOTS: [(&str, &str, &str, f64); 4] = [
    ("V;NFIN", "", "", 0.35),
    ("V;PST", "eta", "ita", 0.30),
    ("V;FUT", "ko", "iko", 0.20),
    ("V;PL", "mu", "imu", 0.15),
];

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub n_lemmas: usize,
    /// Fraction of lexemes that take the minority suffix class.
    pub minority_rate: f64,
    /// Fraction of lexemes with suppletive (unrelated) non-citation forms.
    pub irregular_rate: f64,
    /// Give irregular lexemes the top frequency ranks.
    pub irregulars_high_frequency: bool,
    /// Tie lemma length to frequency rank (short = frequent).
    pub zipf_length_coupling: bool,
    /// Replace every non-citation form with random material (unlearnable).
    pub random_inflection: bool,
}

impl SynthConfig {
    /// A well-behaved language: mostly regular, a small minority class and
    /// a few suppletives for variance.
    pub fn regular(n_lemmas: usize) -> Self {
        SynthConfig {
            n_lemmas,
            minority_rate: 0.10,
            irregular_rate: 0.04,
            irregulars_high_frequency: false,
            zipf_length_coupling: false,
            random_inflection: false,
        }
    }

    /// Irregular lexemes sit at the top of the frequency distribution.
    pub fn suppletive(n_lemmas: usize) -> Self {
        SynthConfig {
            irregular_rate: 0.08,
            irregulars_high_frequency: true,
            ..Self::regular(n_lemmas)
        }
    }

    /// Word length scales with inverse frequency.
    pub fn zipfian(n_lemmas: usize) -> Self {
        SynthConfig {
            minority_rate: 0.06,
            irregular_rate: 0.0,
            zipf_length_coupling: true,
            ..Self::regular(n_lemmas)
        }
    }

    /// Inflection carries no signal at all; the accuracy gate must reject it.
    pub fn unlearnable(n_lemmas: usize) -> Self {
        SynthConfig {
            random_inflection: true,
            ..Self::regular(n_lemmas)
        }
    }
}

/// One generated language as raw input files.
#[derive(Debug, Clone)]
pub struct SynthLanguage {
    pub id: String,
    pub unimorph_tsv: String,
    pub pron_tsv: String,
    pub freq_tsv: String,
}

impl SynthLanguage {
    /// Runs the generated text through the real ingestion path.
    pub fn build(&self) -> Result<(LanguageLexicon, IngestCounts)> {
        let triples = parse_unimorph(&self.unimorph_tsv)?;
        let prons = parse_pron_dict(&self.pron_tsv)?;
        let (freqs, _) = parse_freq_tsv(&self.freq_tsv)?;
        let inventory = PhonemeInventory::from_pronunciations(prons.prons.values())?;
        build_lexicon(&self.id, &triples.triples, &prons.prons, &freqs, &inventory)
    }

    /// Writes `<id>.unimorph.tsv`, `<id>.pron.tsv` and `<id>.freq.tsv`.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let unimorph = dir.join(format!("{}.unimorph.tsv", self.id));
        let pron = dir.join(format!("{}.pron.tsv", self.id));
        let freq = dir.join(format!("{}.freq.tsv", self.id));
        std::fs::write(&unimorph, &self.unimorph_tsv)?;
        std::fs::write(&pron, &self.pron_tsv)?;
        std::fs::write(&freq, &self.freq_tsv)?;
        Ok((unimorph, pron, freq))
    }
}

fn random_word(rng: &mut ChaCha8Rng, len: usize) -> String {
    let mut word = String::new();
    let mut want_vowel = rng.random_bool(0.3);
    while word.len() < len {
        let sym = if want_vowel {
            VOWELS[rng.random_range(0..VOWELS.len())]
        } else {
            CONSONANTS[rng.random_range(0..CONSONANTS.len())]
        };
        word.push_str(sym);
        want_vowel = !want_vowel;
    }
    word
}

fn zipf_count(rank: usize) -> u64 {
    let c = 2_000_000.0 / (rank as f64 + 2.0).powf(1.2);
    (c as u64).max(4)
}

/// Generates one language. Deterministic in (id, seed, config).
pub fn synth_language(id: &str, seed: u64, cfg: &SynthConfig) -> SynthLanguage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Lexeme frequency ranks; irregular lexemes optionally claim the top.
    let n = cfg.n_lemmas;
    let mut is_irregular = vec![false; n];
    let mut is_minority = vec![false; n];
    for i in 0..n {
        let draw: f64 = rng.random();
        if draw < cfg.irregular_rate {
            is_irregular[i] = true;
        } else if draw < cfg.irregular_rate + cfg.minority_rate {
            is_minority[i] = true;
        }
    }
    let mut rank_order: Vec<usize> = (0..n).collect();
    rank_order.shuffle(&mut rng);
    if cfg.irregulars_high_frequency {
        rank_order.sort_by_key(|&i| if is_irregular[i] { 0 } else { 1 });
    }
    let mut rank_of = vec![0usize; n];
    for (rank, &lexeme) in rank_order.iter().enumerate() {
        rank_of[lexeme] = rank;
    }

    // Lemmas, unique, with lengths optionally tied to rank.
    let mut lemmas: Vec<String> = Vec::with_capacity(n);
    let mut used: HashSet<String> = HashSet::new();
    for i in 0..n {
        let len = if cfg.zipf_length_coupling {
            let noise: f64 = rng.random_range(-0.6..0.6);
            ((1.4 * (rank_of[i] as f64 + 2.0).ln() + noise).round() as usize).clamp(2, 9)
        } else {
            rng.random_range(2..=6)
        };
        loop {
            let lemma = random_word(&mut rng, len);
            if used.insert(lemma.clone()) {
                lemmas.push(lemma);
                break;
            }
        }
    }

    let mut unimorph = String::new();
    let mut freq_counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut strings: BTreeSet<String> = BTreeSet::new();

    for i in 0..n {
        let lemma = &lemmas[i];
        strings.insert(lemma.clone());
        let lexeme_count = zipf_count(rank_of[i]);
        // Which slot is most frequent varies by lexeme, so slot identity
        // carries no frequency signal.
        let mut weights: Vec<f64> = SLOTS.iter().map(|s| s.3).collect();
        weights.shuffle(&mut rng);
        for (slot, &(feats, majority, minority, _)) in SLOTS.iter().enumerate() {
            let weight = weights[slot];
            let form = if feats == "V;NFIN" {
                lemma.clone()
            } else if cfg.random_inflection || is_irregular[i] {
                let len = (lemma.len() + rng.random_range(0..3)).clamp(2, 10);
                let mut w = random_word(&mut rng, len);
                while w == format!("{lemma}{majority}") || w == format!("{lemma}{minority}") {
                    w = random_word(&mut rng, len);
                }
                w
            } else if is_minority[i] {
                format!("{lemma}{minority}")
            } else {
                format!("{lemma}{majority}")
            };
            unimorph.push_str(&format!("{lemma}\t{form}\t{feats}\n"));
            strings.insert(form.clone());
            let count = ((lexeme_count as f64 * weight) as u64).max(1);
            *freq_counts.entry(form).or_insert(0) += count;
        }
    }

    let mut pron = String::new();
    for s in &strings {
        let spaced: Vec<String> = s.chars().map(|c| c.to_string()).collect();
        pron.push_str(&format!("{s}\t{}\n", spaced.join(" ")));
    }

    let mut freq = String::new();
    for (token, count) in &freq_counts {
        freq.push_str(&format!("{token}\t{count}\n"));
    }

    SynthLanguage {
        id: id.to_string(),
        unimorph_tsv: unimorph,
        pron_tsv: pron,
        freq_tsv: freq,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inflection::{accuracy_gate, leave_out_probs};

    #[test]
    fn generation_is_deterministic() {
        let a = synth_language("x", 5, &SynthConfig::regular(40));
        let b = synth_language("x", 5, &SynthConfig::regular(40));
        assert_eq!(a.unimorph_tsv, b.unimorph_tsv);
        assert_eq!(a.pron_tsv, b.pron_tsv);
        assert_eq!(a.freq_tsv, b.freq_tsv);
        let c = synth_language("x", 6, &SynthConfig::regular(40));
        assert_ne!(a.unimorph_tsv, c.unimorph_tsv);
    }

    #[test]
    fn generated_language_builds_through_ingestion() {
        let lang = synth_language("toy", 11, &SynthConfig::regular(60));
        let (lexicon, counts) = lang.build().unwrap();
        assert_eq!(lexicon.lexemes.len(), 60);
        assert_eq!(counts.entries, 60 * SLOTS.len());
        assert!(lexicon.total_corpus_tokens > 0);
    }

    #[test]
    fn regular_language_passes_the_gate_and_unlearnable_fails_it() {
        let good = synth_language("good", 3, &SynthConfig::regular(80));
        let (lex, _) = good.build().unwrap();
        let probs: Vec<f64> = leave_out_probs(&lex, 10, 1)
            .unwrap()
            .iter()
            .map(|s| s.p_correct)
            .collect();
        let gate = accuracy_gate(&probs, 0.75).unwrap();
        assert!(gate.included, "regular language gated out: {gate:?}");

        let bad = synth_language("bad", 4, &SynthConfig::unlearnable(80));
        let (lex, _) = bad.build().unwrap();
        let probs: Vec<f64> = leave_out_probs(&lex, 10, 1)
            .unwrap()
            .iter()
            .map(|s| s.p_correct)
            .collect();
        let gate = accuracy_gate(&probs, 0.75).unwrap();
        assert!(!gate.included, "unlearnable language passed: {gate:?}");
    }

    #[test]
    fn zipfian_language_couples_length_and_frequency() {
        let lang = synth_language("zipf", 9, &SynthConfig::zipfian(120));
        let (lex, _) = lang.build().unwrap();
        // Longer forms should be rarer: crude check via rank correlation sign.
        let pairs: Vec<(f64, f64)> = lex
            .entries
            .iter()
            .map(|e| (e.form_seg.len() as f64, e.frequency_count as f64))
            .collect();
        let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
        let (rho, _) = crate::stats::spearman(&xs, &ys).unwrap();
        assert!(rho < -0.5, "length/frequency correlation too weak: {rho}");
    }
}
