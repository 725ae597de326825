//! Core lexicon types: segments, inventories, feature bundles, entries and
//! the per-language lexicon that every measure is computed over.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// One phoneme. Possibly multi-codepoint (affricates, diphthongs), never
/// empty and never containing whitespace.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Segment(Arc<str>);

impl Segment {
    pub fn new(symbol: &str) -> Result<Self> {
        if symbol.is_empty() || symbol.chars().any(char::is_whitespace) {
            return Err(Error::InvalidSegment(symbol.to_string()));
        }
        Ok(Segment(Arc::from(symbol)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Joins a segment sequence back into a plain string, e.g. for output rows.
pub fn join_segments(segments: &[Segment]) -> String {
    segments.iter().map(Segment::as_str).collect()
}

/// Renders a segment sequence space-separated (pronunciation-dictionary style).
pub fn join_segments_spaced(segments: &[Segment]) -> String {
    segments
        .iter()
        .map(Segment::as_str)
        .collect::<Vec<_>>()
        .join(" ")
}

/// The segment alphabet of one language.
#[derive(Debug, Clone)]
pub struct PhonemeInventory {
    segments: BTreeSet<Segment>,
    /// Longest segment length in chars; bounds the maximal-munch lookahead.
    max_symbol_chars: usize,
}

impl PhonemeInventory {
    pub fn new<I: IntoIterator<Item = Segment>>(segments: I) -> Result<Self> {
        let segments: BTreeSet<Segment> = segments.into_iter().collect();
        if segments.is_empty() {
            return Err(Error::EmptyInput("phoneme inventory"));
        }
        let max_symbol_chars = segments
            .iter()
            .map(|s| s.as_str().chars().count())
            .max()
            .unwrap_or(1);
        Ok(PhonemeInventory {
            segments,
            max_symbol_chars,
        })
    }

    pub fn from_symbols<'a, I: IntoIterator<Item = &'a str>>(symbols: I) -> Result<Self> {
        let segments = symbols
            .into_iter()
            .map(Segment::new)
            .collect::<Result<Vec<_>>>()?;
        Self::new(segments)
    }

    /// Collects the inventory from every segment used by a pronunciation map.
    pub fn from_pronunciations<'a, I>(prons: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Vec<Segment>>,
    {
        Self::new(prons.into_iter().flatten().cloned())
    }

    pub fn contains(&self, segment: &Segment) -> bool {
        self.segments.contains(segment)
    }

    pub fn contains_symbol(&self, symbol: &str) -> bool {
        self.segments.iter().any(|s| s.as_str() == symbol)
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn max_symbol_chars(&self) -> usize {
        self.max_symbol_chars
    }

    /// Segments in sorted order.
    pub fn iter(&self) -> impl Iterator<Item = &Segment> {
        self.segments.iter()
    }
}

/// An unordered bundle of morphological feature tags, e.g. `{V, PST}`.
/// Equality and hashing are order-insensitive; the canonical form is sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureBundle {
    tags: Vec<String>,
}

impl FeatureBundle {
    pub fn new<I, S>(tags: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut tags: Vec<String> = tags
            .into_iter()
            .map(|t| t.into().trim().to_string())
            .filter(|t| !t.is_empty())
            .collect();
        tags.sort();
        tags.dedup();
        FeatureBundle { tags }
    }

    /// Parses the `;`-joined UniMorph feature field.
    pub fn parse(field: &str) -> Self {
        Self::new(field.split(';'))
    }

    pub fn tags(&self) -> &[String] {
        &self.tags
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn contains(&self, tag: &str) -> bool {
        self.tags.iter().any(|t| t == tag)
    }
}

impl fmt::Display for FeatureBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tags.join(";"))
    }
}

/// One (lemma, feature bundle) -> surface form triple with segmentations and
/// the corpus token count of the surface form.
#[derive(Debug, Clone)]
pub struct LexiconEntry {
    pub lemma_orth: String,
    pub form_orth: String,
    pub features: FeatureBundle,
    pub lemma_seg: Vec<Segment>,
    pub form_seg: Vec<Segment>,
    pub frequency_count: u64,
}

impl LexiconEntry {
    /// Stable unique id: lemma, features and form joined with `|`.
    pub fn id(&self) -> String {
        format!("{}|{}|{}", self.lemma_orth, self.features, self.form_orth)
    }

    pub fn word_length(&self) -> usize {
        self.form_seg.len()
    }
}

/// A language's filtered lexicon: entries grouped into lexemes, with the
/// phoneme inventory and the corpus size the frequencies came from.
#[derive(Debug, Clone)]
pub struct LanguageLexicon {
    pub language_id: String,
    pub inventory: PhonemeInventory,
    pub entries: Vec<LexiconEntry>,
    /// lemma -> indices into `entries`; every entry belongs to exactly one lexeme.
    pub lexemes: BTreeMap<String, Vec<usize>>,
    pub total_corpus_tokens: u64,
}

impl LanguageLexicon {
    pub fn new(
        language_id: String,
        inventory: PhonemeInventory,
        mut entries: Vec<LexiconEntry>,
        total_corpus_tokens: u64,
    ) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::NoUsableEntries { language: language_id });
        }
        debug_assert!(entries.iter().all(|e| e.frequency_count >= 1));
        entries.sort_by(|a, b| {
            (&a.lemma_orth, &a.features, &a.form_orth).cmp(&(
                &b.lemma_orth,
                &b.features,
                &b.form_orth,
            ))
        });
        let mut lexemes: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (idx, entry) in entries.iter().enumerate() {
            lexemes.entry(entry.lemma_orth.clone()).or_default().push(idx);
        }
        Ok(LanguageLexicon {
            language_id,
            inventory,
            entries,
            lexemes,
            total_corpus_tokens,
        })
    }

    pub fn lexeme_ids(&self) -> Vec<String> {
        self.lexemes.keys().cloned().collect()
    }

    pub fn entries_of_lexeme(&self, lemma: &str) -> Vec<&LexiconEntry> {
        self.lexemes
            .get(lemma)
            .map(|idxs| idxs.iter().map(|&i| &self.entries[i]).collect())
            .unwrap_or_default()
    }

    /// Distinct surface word types, sorted by orthographic form.
    pub fn word_types(&self) -> Vec<(String, Vec<Segment>)> {
        let mut seen: HashSet<&str> = HashSet::new();
        let mut types: Vec<(String, Vec<Segment>)> = Vec::new();
        for entry in &self.entries {
            if seen.insert(entry.form_orth.as_str()) {
                types.push((entry.form_orth.clone(), entry.form_seg.clone()));
            }
        }
        types.sort_by(|a, b| a.0.cmp(&b.0));
        types
    }

    /// Token count of each distinct surface form.
    pub fn type_counts(&self) -> HashMap<String, u64> {
        let mut counts = HashMap::new();
        for entry in &self.entries {
            counts
                .entry(entry.form_orth.clone())
                .or_insert(entry.frequency_count);
        }
        counts
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_rejects_empty_and_whitespace() {
        assert!(Segment::new("").is_err());
        assert!(Segment::new("a b").is_err());
        assert!(Segment::new("\t").is_err());
        assert!(Segment::new("tʃ").is_ok());
    }

    #[test]
    fn feature_bundle_is_order_insensitive() {
        let a = FeatureBundle::new(["V", "PST"]);
        let b = FeatureBundle::new(["PST", "V"]);
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "PST;V");
    }

    #[test]
    fn feature_bundle_parse_trims_and_dedups() {
        let b = FeatureBundle::parse(" V ; PST;V");
        assert_eq!(b.tags(), &["PST".to_string(), "V".to_string()]);
    }

    #[test]
    fn inventory_rejects_empty() {
        assert!(PhonemeInventory::new(Vec::new()).is_err());
    }

    #[test]
    fn inventory_tracks_max_symbol_len() {
        let inv = PhonemeInventory::from_symbols(["a", "tʃ", "b"]).unwrap();
        assert_eq!(inv.max_symbol_chars(), 2);
        assert_eq!(inv.len(), 3);
    }

    fn entry(lemma: &str, form: &str, feats: &[&str], count: u64) -> LexiconEntry {
        let seg = |s: &str| {
            s.chars()
                .map(|c| Segment::new(&c.to_string()).unwrap())
                .collect::<Vec<_>>()
        };
        LexiconEntry {
            lemma_orth: lemma.to_string(),
            form_orth: form.to_string(),
            features: FeatureBundle::new(feats.iter().copied()),
            lemma_seg: seg(lemma),
            form_seg: seg(form),
            frequency_count: count,
        }
    }

    #[test]
    fn lexicon_groups_entries_by_lemma() {
        let inv = PhonemeInventory::from_symbols([
            "w", "a", "l", "k", "e", "d", "t", "s",
        ])
        .unwrap();
        let lex = LanguageLexicon::new(
            "en".into(),
            inv,
            vec![
                entry("walk", "walked", &["V", "PST"], 10),
                entry("walk", "walks", &["V", "3SG"], 5),
                entry("talk", "talked", &["V", "PST"], 2),
            ],
            1_000_000,
        )
        .unwrap();
        assert_eq!(lex.lexemes.len(), 2);
        assert_eq!(lex.entries_of_lexeme("walk").len(), 2);
        assert_eq!(lex.word_types().len(), 3);
    }

    #[test]
    fn empty_lexicon_is_an_error() {
        let inv = PhonemeInventory::from_symbols(["a"]).unwrap();
        assert!(LanguageLexicon::new("x".into(), inv, vec![], 1).is_err());
    }
}
