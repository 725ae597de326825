//! Parsing of lexicon, pronunciation and frequency inputs, IPA tokenization,
//! streaming corpus counting, and the join that produces a [`LanguageLexicon`].

use std::collections::{HashMap, HashSet};
use std::io::Read;

use log::warn;

use crate::error::{Error, Result};
use crate::lexicon::{
    FeatureBundle, LanguageLexicon, LexiconEntry, PhonemeInventory, Segment,
};

/// A recoverable per-line parse problem.
#[derive(Debug, Clone)]
pub struct LineIssue {
    pub line: usize,
    pub message: String,
}

/// Result of parsing a UniMorph TSV: the triples that parsed plus the lines
/// that did not.
#[derive(Debug, Default)]
pub struct ParsedUnimorph {
    pub triples: Vec<(String, String, FeatureBundle)>,
    pub issues: Vec<LineIssue>,
}

/// Parses `lemma<TAB>form<TAB>feat1;feat2;...` lines. Blank lines are
/// skipped; lines with fewer than three fields are collected as issues. The
/// whole parse fails only when more than 10% of non-blank lines are bad.
pub fn parse_unimorph(text: &str) -> Result<ParsedUnimorph> {
    let mut out = ParsedUnimorph::default();
    let mut non_blank = 0usize;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        non_blank += 1;
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < 3 {
            out.issues.push(LineIssue {
                line: line_no,
                message: format!("expected at least 3 tab-separated fields, got {}", fields.len()),
            });
            continue;
        }
        let lemma = fields[0].trim();
        let form = fields[1].trim();
        let features = FeatureBundle::parse(fields[2]);
        if lemma.is_empty() || form.is_empty() {
            out.issues.push(LineIssue {
                line: line_no,
                message: "empty lemma or form field".to_string(),
            });
            continue;
        }
        out.triples.push((lemma.to_string(), form.to_string(), features));
    }
    if !out.issues.is_empty() && out.issues.len() * 10 > non_blank {
        return Err(Error::TooManyParseErrors {
            file: "<unimorph>".to_string(),
            failed: out.issues.len(),
            total: non_blank,
        });
    }
    Ok(out)
}

/// Result of parsing a pronunciation TSV.
#[derive(Debug, Default)]
pub struct ParsedPronDict {
    pub prons: HashMap<String, Vec<Segment>>,
    pub issues: Vec<LineIssue>,
    pub duplicates: usize,
}

/// Parses WikiPron-style `form<TAB>seg1 seg2 ...` lines. Duplicate forms keep
/// the first pronunciation; later ones are counted and logged.
pub fn parse_pron_dict(text: &str) -> Result<ParsedPronDict> {
    let mut out = ParsedPronDict::default();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let Some((word, segs)) = line.split_once('\t') else {
            out.issues.push(LineIssue {
                line: line_no,
                message: "expected `form<TAB>segments`".to_string(),
            });
            continue;
        };
        let word = word.trim();
        let segments = segs
            .split_whitespace()
            .map(Segment::new)
            .collect::<Result<Vec<_>>>();
        let segments = match segments {
            Ok(s) if !s.is_empty() && !word.is_empty() => s,
            Ok(_) => {
                out.issues.push(LineIssue {
                    line: line_no,
                    message: "empty form or segment list".to_string(),
                });
                continue;
            }
            Err(e) => {
                out.issues.push(LineIssue {
                    line: line_no,
                    message: e.to_string(),
                });
                continue;
            }
        };
        if out.prons.contains_key(word) {
            out.duplicates += 1;
            warn!("line {line_no}: duplicate pronunciation for {word:?}; keeping the first");
            continue;
        }
        out.prons.insert(word.to_string(), segments);
    }
    Ok(out)
}

/// Greedy longest-match (maximal munch) segmentation of `s` against the
/// inventory, left to right. Offsets in errors are char offsets.
pub fn tokenize_ipa(s: &str, inv: &PhonemeInventory) -> Result<Vec<Segment>> {
    if s.is_empty() {
        return Err(Error::EmptyInput("string to tokenize"));
    }
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut pos = 0usize;
    while pos < chars.len() {
        let max_len = inv.max_symbol_chars().min(chars.len() - pos);
        let mut matched = None;
        for len in (1..=max_len).rev() {
            let candidate: String = chars[pos..pos + len].iter().collect();
            if inv.contains_symbol(&candidate) {
                matched = Some((len, candidate));
                break;
            }
        }
        match matched {
            Some((len, symbol)) => {
                out.push(Segment::new(&symbol)?);
                pos += len;
            }
            None => {
                let snippet: String = chars[pos..].iter().take(8).collect();
                return Err(Error::Tokenize { offset: pos, snippet });
            }
        }
    }
    Ok(out)
}

/// Exact token counts plus the corpus total. Tokens are maximal letter runs,
/// lowercased.
#[derive(Debug, Clone, Default)]
pub struct FrequencyTable {
    counts: HashMap<String, u64>,
    total: u64,
}

impl FrequencyTable {
    pub fn count(&self, token: &str) -> u64 {
        self.counts.get(&token.to_lowercase()).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn insert(&mut self, token: String, count: u64) {
        *self.counts.entry(token.to_lowercase()).or_insert(0) += count;
        self.total += count;
    }

    /// Single-writer merge of a partial table (e.g. one per input chunk).
    pub fn merge(&mut self, other: FrequencyTable) {
        for (token, count) in other.counts {
            *self.counts.entry(token).or_insert(0) += count;
        }
        self.total += other.total;
    }

    /// Tokens in sorted order, for deterministic output.
    pub fn iter_sorted(&self) -> Vec<(&str, u64)> {
        let mut items: Vec<(&str, u64)> = self
            .counts
            .iter()
            .map(|(t, &c)| (t.as_str(), c))
            .collect();
        items.sort();
        items
    }
}

const COUNT_CHUNK_BYTES: usize = 64 * 1024;

/// Streams UTF-8 text in bounded-size chunks and counts lowercased maximal
/// letter runs. Invalid UTF-8 is an error naming the absolute byte offset.
pub fn count_frequencies<R: Read>(mut reader: R) -> Result<FrequencyTable> {
    let mut table = FrequencyTable::default();
    let mut buf = vec![0u8; COUNT_CHUNK_BYTES];
    // Bytes of an incomplete UTF-8 sequence carried over from the last chunk.
    let mut carry: Vec<u8> = Vec::new();
    // Token spanning a chunk boundary.
    let mut pending = String::new();
    let mut offset = 0usize;

    loop {
        let n = reader.read(&mut buf)?;
        if n == 0 {
            break;
        }
        let mut chunk = std::mem::take(&mut carry);
        let carried = chunk.len();
        chunk.extend_from_slice(&buf[..n]);

        let valid = match std::str::from_utf8(&chunk) {
            Ok(s) => s,
            Err(e) => {
                let valid_up_to = e.valid_up_to();
                if e.error_len().is_some() {
                    return Err(Error::InvalidUtf8 {
                        offset: offset - carried + valid_up_to,
                    });
                }
                // Incomplete trailing sequence: carry it into the next chunk.
                carry = chunk[valid_up_to..].to_vec();
                // Safe: everything below valid_up_to is valid UTF-8.
                unsafe { std::str::from_utf8_unchecked(&chunk[..valid_up_to]) }
            }
        };
        count_into(valid, &mut pending, &mut table);
        offset += n;
    }
    if !carry.is_empty() {
        return Err(Error::InvalidUtf8 { offset: offset - carry.len() });
    }
    if !pending.is_empty() {
        table.insert(std::mem::take(&mut pending), 1);
    }
    Ok(table)
}

fn count_into(text: &str, pending: &mut String, table: &mut FrequencyTable) {
    for c in text.chars() {
        if c.is_alphabetic() {
            for lc in c.to_lowercase() {
                pending.push(lc);
            }
        } else if !pending.is_empty() {
            table.insert(std::mem::take(pending), 1);
        }
    }
}

/// Parses a precomputed `token<TAB>count` table. Tokens are lowercased;
/// counts for tokens that collide after lowercasing are summed.
pub fn parse_freq_tsv(text: &str) -> Result<(FrequencyTable, Vec<LineIssue>)> {
    let mut table = FrequencyTable::default();
    let mut issues = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let Some((token, count)) = line.split_once('\t') else {
            issues.push(LineIssue {
                line: line_no,
                message: "expected `token<TAB>count`".to_string(),
            });
            continue;
        };
        match count.trim().parse::<u64>() {
            Ok(c) if !token.trim().is_empty() => table.insert(token.trim().to_string(), c),
            Ok(_) => issues.push(LineIssue {
                line: line_no,
                message: "empty token".to_string(),
            }),
            Err(e) => issues.push(LineIssue {
                line: line_no,
                message: format!("bad count: {e}"),
            }),
        }
    }
    Ok((table, issues))
}

/// Natural log of counts per million corpus tokens.
pub fn log_cpm(count: u64, total: u64) -> Result<f64> {
    if count == 0 {
        return Err(Error::ZeroFrequency);
    }
    if total < count {
        return Err(Error::CountExceedsTotal { count, total });
    }
    Ok((count as f64 / total as f64 * 1_000_000.0).ln())
}

/// Per-stage row counts from the lexicon join, for the run summary.
#[derive(Debug, Clone, Default)]
pub struct IngestCounts {
    pub triples: usize,
    pub no_pronunciation: usize,
    pub zero_frequency: usize,
    pub out_of_inventory: usize,
    pub duplicate_slots: usize,
    pub entries: usize,
    pub lexemes: usize,
}

/// Joins parsed triples with pronunciations and frequencies, applying the
/// exclusion rules: entries without a pronunciation (for the form or its
/// lemma) are dropped and logged, entries with zero corpus frequency are
/// dropped, and a slot (lemma, feature bundle) keeps only its first attested
/// form. Frequencies are matched on the lowercased surface form.
pub fn build_lexicon(
    language_id: &str,
    triples: &[(String, String, FeatureBundle)],
    prons: &HashMap<String, Vec<Segment>>,
    freqs: &FrequencyTable,
    inventory: &PhonemeInventory,
) -> Result<(LanguageLexicon, IngestCounts)> {
    let mut counts = IngestCounts {
        triples: triples.len(),
        ..IngestCounts::default()
    };
    let mut seen_slots: HashSet<(String, FeatureBundle)> = HashSet::new();
    let mut entries = Vec::new();

    for (lemma, form, features) in triples {
        let slot = (lemma.clone(), features.clone());
        if seen_slots.contains(&slot) {
            counts.duplicate_slots += 1;
            warn!("{language_id}: slot ({lemma}, {features}) already has a form; dropping {form:?}");
            continue;
        }
        let (Some(form_seg), Some(lemma_seg)) = (prons.get(form), prons.get(lemma)) else {
            counts.no_pronunciation += 1;
            warn!("{language_id}: no pronunciation for {form:?} (lemma {lemma:?}); dropped");
            continue;
        };
        if form_seg.is_empty() {
            counts.no_pronunciation += 1;
            continue;
        }
        if !form_seg.iter().chain(lemma_seg.iter()).all(|s| inventory.contains(s)) {
            counts.out_of_inventory += 1;
            warn!("{language_id}: {form:?} uses segments outside the inventory; dropped");
            continue;
        }
        let frequency_count = freqs.count(form);
        if frequency_count == 0 {
            counts.zero_frequency += 1;
            continue;
        }
        seen_slots.insert(slot);
        entries.push(LexiconEntry {
            lemma_orth: lemma.clone(),
            form_orth: form.clone(),
            features: features.clone(),
            lemma_seg: lemma_seg.clone(),
            form_seg: form_seg.clone(),
            frequency_count,
        });
    }

    counts.entries = entries.len();
    let lexicon = LanguageLexicon::new(
        language_id.to_string(),
        inventory.clone(),
        entries,
        freqs.total().max(1),
    )?;
    counts.lexemes = lexicon.lexemes.len();
    Ok((lexicon, counts))
}
