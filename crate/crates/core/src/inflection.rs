//! Probabilistic suffix-rule inflection: rule extraction from paradigms,
//! wug-test probabilities for held-out lexemes, per-form and per-lemma
//! irregularity scores, and the language-level accuracy gate.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::folds::{split_folds, FoldAssignment};
use crate::lexicon::{FeatureBundle, LanguageLexicon, LexiconEntry, Segment};

/// Lemma suffixes longer than the changing material by up to this many
/// segments are also recorded, so that e.g. final-consonant classes can
/// condition a rule.
const MAX_EXTRA_CONTEXT: usize = 3;

/// Each extra segment of matched suffix multiplies a rule's score by this
/// base, so a more specific rule wins unless it is outnumbered 16:1 per
/// segment.
pub const CONTEXT_PREFERENCE_BASE: f64 = 16.0;

/// Probability floor/ceiling applied to wug probabilities so the log odds
/// stay finite.
pub const PROB_CLAMP_EPSILON: f64 = 1e-6;

const DEFAULT_ALPHA: f64 = 0.1;

/// A suffix-replacement rule: a lemma ending in `lemma_suffix` maps to the
/// same lemma with that suffix replaced by `replacement`.
#[derive(Debug, Clone)]
pub struct TransformRule {
    pub features: FeatureBundle,
    pub lemma_suffix: Vec<Segment>,
    pub replacement: Vec<Segment>,
    pub support: u64,
    /// Matched suffix length in segments; longer means more specific.
    pub context_len: usize,
    /// Lemmas this rule was extracted from, when provenance tracking is on.
    pub sources: Option<BTreeSet<String>>,
}

impl TransformRule {
    pub fn score(&self) -> f64 {
        self.support as f64 * CONTEXT_PREFERENCE_BASE.powi(self.context_len as i32)
    }

    fn applies_to(&self, lemma_seg: &[Segment]) -> bool {
        lemma_seg.ends_with(&self.lemma_suffix)
    }

    fn apply(&self, lemma_seg: &[Segment]) -> Vec<Segment> {
        let keep = lemma_seg.len() - self.lemma_suffix.len();
        let mut out = lemma_seg[..keep].to_vec();
        out.extend_from_slice(&self.replacement);
        out
    }
}

/// A trained probabilistic inflector: suffix rules indexed by feature bundle.
#[derive(Debug, Clone)]
pub struct Inflector {
    rules: BTreeMap<FeatureBundle, Vec<TransformRule>>,
    pub smoothing_alpha: f64,
    pub trained_on: String,
}

impl Inflector {
    pub fn rules_for(&self, features: &FeatureBundle) -> &[TransformRule] {
        self.rules.get(features).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn rule_count(&self) -> usize {
        self.rules.values().map(Vec::len).sum()
    }

    /// True if any rule traces back to `lemma` (requires tracked training).
    pub fn has_source(&self, lemma: &str) -> bool {
        self.rules.values().flatten().any(|r| {
            r.sources
                .as_ref()
                .map(|s| s.contains(lemma))
                .unwrap_or(false)
        })
    }
}

fn common_prefix_len(a: &[Segment], b: &[Segment]) -> usize {
    a.iter().zip(b.iter()).take_while(|(x, y)| x == y).count()
}

/// Extracts suffix-replacement rules from training entries. For each entry
/// the changing material after the longest common prefix of lemma and form
/// becomes the base rule, and variants extend the matched suffix with up to
/// three shared prefix segments. Supports aggregate across entries.
pub fn extract_rules<'a, I>(entries: I) -> Result<Inflector>
where
    I: IntoIterator<Item = &'a LexiconEntry>,
{
    build_inflector(entries, DEFAULT_ALPHA, "all", false)
}

pub fn extract_rules_tracked<'a, I>(entries: I) -> Result<Inflector>
where
    I: IntoIterator<Item = &'a LexiconEntry>,
{
    build_inflector(entries, DEFAULT_ALPHA, "all", true)
}

fn build_inflector<'a, I>(
    entries: I,
    smoothing_alpha: f64,
    label: &str,
    track_sources: bool,
) -> Result<Inflector>
where
    I: IntoIterator<Item = &'a LexiconEntry>,
{
    type RuleKey = (Vec<Segment>, Vec<Segment>);
    let mut table: BTreeMap<FeatureBundle, BTreeMap<RuleKey, (u64, BTreeSet<String>)>> =
        BTreeMap::new();
    let mut saw_any = false;

    for entry in entries {
        saw_any = true;
        let lcp = common_prefix_len(&entry.lemma_seg, &entry.form_seg);
        for extra in 0..=MAX_EXTRA_CONTEXT.min(lcp) {
            let cut = lcp - extra;
            let key = (
                entry.lemma_seg[cut..].to_vec(),
                entry.form_seg[cut..].to_vec(),
            );
            let slot = table
                .entry(entry.features.clone())
                .or_default()
                .entry(key)
                .or_insert_with(|| (0, BTreeSet::new()));
            slot.0 += 1;
            if track_sources {
                slot.1.insert(entry.lemma_orth.clone());
            }
        }
    }
    if !saw_any {
        return Err(Error::EmptyTrainingSet);
    }

    let rules = table
        .into_iter()
        .map(|(features, ruleset)| {
            let rules = ruleset
                .into_iter()
                .map(|((lemma_suffix, replacement), (support, sources))| TransformRule {
                    features: features.clone(),
                    context_len: lemma_suffix.len(),
                    lemma_suffix,
                    replacement,
                    support,
                    sources: track_sources.then_some(sources),
                })
                .collect();
            (features, rules)
        })
        .collect();

    Ok(Inflector {
        rules,
        smoothing_alpha,
        trained_on: label.to_string(),
    })
}

/// The candidate distribution for inflecting `lemma_seg` into the slot
/// `features`. Candidates are the outputs of every applicable rule, scored
/// by support weighted for suffix specificity, then add-α normalized. When
/// no rule applies, the lemma itself is the sole candidate with probability
/// one.
pub fn wug_distribution(
    inflector: &Inflector,
    lemma_seg: &[Segment],
    features: &FeatureBundle,
) -> BTreeMap<Vec<Segment>, f64> {
    let scores = candidate_scores(inflector, lemma_seg, features);
    if scores.is_empty() {
        let mut out = BTreeMap::new();
        out.insert(lemma_seg.to_vec(), 1.0);
        return out;
    }
    let alpha = inflector.smoothing_alpha;
    let denom: f64 = scores.values().map(|s| s + alpha).sum();
    scores
        .into_iter()
        .map(|(cand, s)| (cand, (s + alpha) / denom))
        .collect()
}

fn candidate_scores(
    inflector: &Inflector,
    lemma_seg: &[Segment],
    features: &FeatureBundle,
) -> BTreeMap<Vec<Segment>, f64> {
    let mut scores: BTreeMap<Vec<Segment>, f64> = BTreeMap::new();
    for rule in inflector.rules_for(features) {
        if rule.applies_to(lemma_seg) {
            *scores.entry(rule.apply(lemma_seg)).or_insert(0.0) += rule.score();
        }
    }
    scores
}

/// Probability the inflector assigns to one attested form. An attested form
/// outside the candidate set gets the add-α floor of a zero-score candidate,
/// never exactly zero; the result is clamped into
/// [`PROB_CLAMP_EPSILON`, 1 − `PROB_CLAMP_EPSILON`].
pub fn attested_probability(
    inflector: &Inflector,
    lemma_seg: &[Segment],
    features: &FeatureBundle,
    attested: &[Segment],
) -> f64 {
    let scores = candidate_scores(inflector, lemma_seg, features);
    let alpha = inflector.smoothing_alpha;
    let p = if scores.is_empty() {
        if attested == lemma_seg {
            1.0
        } else {
            // Fallback distribution is a point mass on the lemma; give the
            // attested form the floor it would get as a zero-score candidate.
            alpha / (1.0 + alpha + alpha)
        }
    } else {
        let denom: f64 = scores.values().map(|s| s + alpha).sum();
        match scores.get(attested) {
            Some(s) => (s + alpha) / denom,
            None => alpha / (denom + alpha),
        }
    };
    p.clamp(PROB_CLAMP_EPSILON, 1.0 - PROB_CLAMP_EPSILON)
}

/// One scored surface form: the held-out wug probability of the attested
/// form.
#[derive(Debug, Clone)]
pub struct FormProb {
    pub form_id: String,
    pub lemma: String,
    pub form: String,
    pub features: FeatureBundle,
    pub p_correct: f64,
}

/// Per-form irregularity record.
#[derive(Debug, Clone)]
pub struct MIRecord {
    pub form_id: String,
    pub lemma: String,
    pub form: String,
    pub features: FeatureBundle,
    pub p_correct: f64,
    /// Negative log odds (base 2) of the attested form.
    pub mi: f64,
}

/// Per-lemma irregularity: the mean over the lemma's form scores.
#[derive(Debug, Clone)]
pub struct LemmaMIRecord {
    pub lemma_id: String,
    pub mi_lemma: f64,
    pub n_forms: usize,
}

/// A full leave-lexeme-out run with its fold assignment and fold inflectors.
#[derive(Debug)]
pub struct LeaveOutRun {
    pub scores: Vec<FormProb>,
    pub assignment: FoldAssignment,
    pub inflectors: Vec<Inflector>,
}

/// Splits lexemes into `k` folds and scores every form with the inflector
/// trained on all other lexemes, so no form's own lexeme contributes rules
/// to the model that scores it.
pub fn leave_out_probs(lexicon: &LanguageLexicon, k: usize, seed: u64) -> Result<Vec<FormProb>> {
    Ok(leave_out_probs_detailed(lexicon, k, seed, DEFAULT_ALPHA, false)?.scores)
}

pub fn leave_out_probs_detailed(
    lexicon: &LanguageLexicon,
    k: usize,
    seed: u64,
    alpha: f64,
    track_provenance: bool,
) -> Result<LeaveOutRun> {
    let lexeme_ids = lexicon.lexeme_ids();
    let assignment = split_folds(&lexeme_ids, k, seed)?;

    let inflectors: Vec<Inflector> = (0..k)
        .into_par_iter()
        .map(|fold| {
            let training = lexicon
                .entries
                .iter()
                .filter(|e| assignment.fold_of[&e.lemma_orth] != fold);
            build_inflector(training, alpha, &format!("fold-{fold}"), track_provenance)
        })
        .collect::<Result<Vec<_>>>()?;

    let scores = lexicon
        .entries
        .iter()
        .map(|entry| {
            let fold = assignment.fold_of[&entry.lemma_orth];
            let p = attested_probability(
                &inflectors[fold],
                &entry.lemma_seg,
                &entry.features,
                &entry.form_seg,
            );
            FormProb {
                form_id: entry.id(),
                lemma: entry.lemma_orth.clone(),
                form: entry.form_orth.clone(),
                features: entry.features.clone(),
                p_correct: p,
            }
        })
        .collect();

    Ok(LeaveOutRun {
        scores,
        assignment,
        inflectors,
    })
}

/// MI(w) = −log₂ p/(1−p), evaluated as a log difference with `ln_1p` so the
/// complement keeps full precision near the endpoints.
pub fn mi_word(p_correct: f64) -> Result<f64> {
    if !(p_correct > 0.0 && p_correct < 1.0) {
        return Err(Error::InvalidProbability(p_correct));
    }
    Ok(-(p_correct.ln() - (-p_correct).ln_1p()) / std::f64::consts::LN_2)
}

/// Mean of a lemma's form-level MI values.
pub fn mi_lemma(mi_values: &[f64]) -> Result<f64> {
    if mi_values.is_empty() {
        return Err(Error::EmptyInput("lemma MI values"));
    }
    Ok(mi_values.iter().sum::<f64>() / mi_values.len() as f64)
}

/// Turns wug scores into per-form MI records.
pub fn mi_records(scores: &[FormProb]) -> Result<Vec<MIRecord>> {
    scores
        .iter()
        .map(|s| {
            Ok(MIRecord {
                form_id: s.form_id.clone(),
                lemma: s.lemma.clone(),
                form: s.form.clone(),
                features: s.features.clone(),
                p_correct: s.p_correct,
                mi: mi_word(s.p_correct)?,
            })
        })
        .collect()
}

/// Groups form MI records by lemma and averages them.
pub fn lemma_mi_records(records: &[MIRecord]) -> Result<Vec<LemmaMIRecord>> {
    let mut grouped: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for rec in records {
        grouped.entry(&rec.lemma).or_default().push(rec.mi);
    }
    grouped
        .into_iter()
        .map(|(lemma, values)| {
            Ok(LemmaMIRecord {
                lemma_id: lemma.to_string(),
                mi_lemma: mi_lemma(&values)?,
                n_forms: values.len(),
            })
        })
        .collect()
}

/// Whether a language's inflection model is accurate enough to keep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateDecision {
    pub included: bool,
    pub mean_p_correct: f64,
}

/// Included iff the mean wug probability reaches `threshold`. A mean exactly
/// at the threshold is included; only strictly lower means are excluded.
pub fn accuracy_gate(p_corrects: &[f64], threshold: f64) -> Result<GateDecision> {
    if p_corrects.is_empty() {
        return Err(Error::EmptyInput("gate probabilities"));
    }
    let mean = p_corrects.iter().sum::<f64>() / p_corrects.len() as f64;
    Ok(GateDecision {
        included: mean >= threshold,
        mean_p_correct: mean,
    })
}
