//! Phoneme-level sequence models and per-word phonotactic complexity
//! (bits per phoneme), evaluated under held-out cross-validation.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::folds::{split_folds, FoldAssignment};
use crate::lexicon::{LanguageLexicon, PhonemeInventory, Segment};

/// Smoothing scheme for the n-gram estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Smoothing {
    /// Additive smoothing with pseudo-count `k` at the top order.
    AddK(f64),
    /// Witten-Bell interpolation down to a uniform base distribution.
    WittenBell,
}

/// Anything that can assign a surprisal (in bits) to a segment sequence,
/// including the terminal transition. Implementations must be usable from
/// multiple threads at once.
pub trait SequenceModel: Send + Sync {
    fn surprisal_bits(&self, w: &[Segment]) -> Result<f64>;
}

#[derive(Debug, Default, Clone)]
struct ContextStats {
    total: u64,
    counts: HashMap<u32, u64>,
}

/// An order-n phoneme language model over the full inventory plus BOS/EOS
/// sentinels. Every symbol in vocab ∪ {EOS} receives nonzero probability in
/// every context.
#[derive(Debug, Clone)]
pub struct NgramModel {
    order: usize,
    smoothing: Smoothing,
    vocab_index: HashMap<Segment, u32>,
    vocab_size: usize,
    /// tables[l] maps a length-l context to its target counts.
    tables: Vec<HashMap<Vec<u32>, ContextStats>>,
    pub trained_on: String,
    /// Ids of the words this model was trained on, when tracking is enabled.
    pub training_forms: Option<BTreeSet<String>>,
}

const BOS_OFFSET: u32 = 0; // bos id = vocab_size + BOS_OFFSET
const EOS_OFFSET: u32 = 1;

impl NgramModel {
    /// A model with no counts: every conditional is uniform over
    /// vocab ∪ {EOS}.
    pub fn untrained(
        inventory: &PhonemeInventory,
        order: usize,
        smoothing: Smoothing,
    ) -> Result<Self> {
        if order < 1 {
            return Err(Error::EmptyInput("n-gram order must be >= 1"));
        }
        let mut vocab_index = HashMap::new();
        for (i, seg) in inventory.iter().enumerate() {
            vocab_index.insert(seg.clone(), i as u32);
        }
        let vocab_size = vocab_index.len();
        Ok(NgramModel {
            order,
            smoothing,
            vocab_index,
            vocab_size,
            tables: vec![HashMap::new(); order],
            trained_on: "untrained".to_string(),
            training_forms: None,
        })
    }

    fn bos(&self) -> u32 {
        self.vocab_size as u32 + BOS_OFFSET
    }

    fn eos(&self) -> u32 {
        self.vocab_size as u32 + EOS_OFFSET
    }

    fn encode(&self, w: &[Segment]) -> Result<Vec<u32>> {
        w.iter()
            .map(|s| {
                self.vocab_index.get(s).copied().ok_or_else(|| Error::OutOfVocabulary {
                    segment: s.as_str().to_string(),
                })
            })
            .collect()
    }

    fn add_word(&mut self, ids: &[u32]) {
        let pad = self.order - 1;
        let mut padded = vec![self.bos(); pad];
        padded.extend_from_slice(ids);
        padded.push(self.eos());
        for i in pad..padded.len() {
            let target = padded[i];
            for l in 0..self.order {
                let ctx = padded[i - l..i].to_vec();
                let stats = self.tables[l].entry(ctx).or_default();
                stats.total += 1;
                *stats.counts.entry(target).or_insert(0) += 1;
            }
        }
    }

    /// Number of predicted outcomes: the inventory plus EOS.
    fn outcomes(&self) -> f64 {
        (self.vocab_size + 1) as f64
    }

    /// P(target | context) under the configured smoothing. `context` is the
    /// full (order-1)-length id window.
    fn cond_prob_ids(&self, context: &[u32], target: u32) -> f64 {
        match self.smoothing {
            Smoothing::AddK(k) => {
                let (c, n) = self
                    .tables
                    .last()
                    .and_then(|t| t.get(context))
                    .map(|s| (s.counts.get(&target).copied().unwrap_or(0), s.total))
                    .unwrap_or((0, 0));
                (c as f64 + k) / (n as f64 + k * self.outcomes())
            }
            Smoothing::WittenBell => self.witten_bell(context, target, self.order - 1),
        }
    }

    fn witten_bell(&self, context: &[u32], target: u32, level: usize) -> f64 {
        let ctx = &context[context.len() - level..];
        let stats = self.tables[level].get(ctx);
        let lower = if level == 0 {
            1.0 / self.outcomes()
        } else {
            self.witten_bell(context, target, level - 1)
        };
        match stats {
            None => lower,
            Some(s) if s.total == 0 => lower,
            Some(s) => {
                let c = s.counts.get(&target).copied().unwrap_or(0) as f64;
                let n = s.total as f64;
                let t = s.counts.len() as f64;
                (c + t * lower) / (n + t)
            }
        }
    }

    /// P(next | history) where `history` are the most recent segments and
    /// `None` denotes EOS. Exposed for normalization checks and tests.
    pub fn conditional_prob(&self, history: &[Segment], next: Option<&Segment>) -> Result<f64> {
        let ids = self.encode(history)?;
        let target = match next {
            Some(seg) => *self.vocab_index.get(seg).ok_or_else(|| Error::OutOfVocabulary {
                segment: seg.as_str().to_string(),
            })?,
            None => self.eos(),
        };
        let pad = self.order - 1;
        let mut window = vec![self.bos(); pad];
        window.extend_from_slice(&ids);
        let ctx = window[window.len() - pad..].to_vec();
        Ok(self.cond_prob_ids(&ctx, target))
    }

    /// Probability of a whole word including the terminal transition.
    pub fn word_prob(&self, w: &[Segment]) -> Result<f64> {
        Ok((-self.surprisal_bits(w)?).exp2())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }
}

impl SequenceModel for NgramModel {
    /// −log₂ of the word's probability: each symbol plus the EOS transition.
    /// The vocabulary is the language's full inventory, so an
    /// out-of-vocabulary segment signals a pipeline bug and is an error.
    fn surprisal_bits(&self, w: &[Segment]) -> Result<f64> {
        let ids = self.encode(w)?;
        let pad = self.order - 1;
        let mut padded = vec![self.bos(); pad];
        padded.extend_from_slice(&ids);
        padded.push(self.eos());
        let mut bits = 0.0;
        for i in pad..padded.len() {
            let p = self.cond_prob_ids(&padded[i - pad..i], padded[i]);
            bits -= p.log2();
        }
        Ok(bits)
    }
}

/// Trains an n-gram model on BOS-padded sequences with one terminal EOS per
/// word. The vocabulary is the full inventory, independent of which segments
/// the training words happen to use.
pub fn train_ngram(
    words: &[Vec<Segment>],
    inventory: &PhonemeInventory,
    order: usize,
    smoothing: Smoothing,
) -> Result<NgramModel> {
    train_ngram_labeled(words, None, inventory, order, smoothing, "all")
}

fn train_ngram_labeled(
    words: &[Vec<Segment>],
    word_ids: Option<&[String]>,
    inventory: &PhonemeInventory,
    order: usize,
    smoothing: Smoothing,
    label: &str,
) -> Result<NgramModel> {
    if words.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let mut model = NgramModel::untrained(inventory, order, smoothing)?;
    model.trained_on = label.to_string();
    for w in words {
        let ids = model.encode(w)?;
        model.add_word(&ids);
    }
    if let Some(word_ids) = word_ids {
        model.training_forms = Some(word_ids.iter().cloned().collect());
    }
    Ok(model)
}

/// One word type's phonotactic complexity.
#[derive(Debug, Clone)]
pub struct PCRecord {
    pub form_id: String,
    pub length: usize,
    pub surprisal_bits: f64,
    pub pc_bits: f64,
}

/// PC = surprisal / |w|, where |w| counts segments and excludes EOS.
pub fn phonotactic_complexity<M: SequenceModel + ?Sized>(
    model: &M,
    form_id: &str,
    w: &[Segment],
) -> Result<PCRecord> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    let surprisal_bits = model.surprisal_bits(w)?;
    Ok(PCRecord {
        form_id: form_id.to_string(),
        length: w.len(),
        surprisal_bits,
        pc_bits: surprisal_bits / w.len() as f64,
    })
}

/// A full cross-validated PC run: the per-type records plus the fold
/// assignment and fold models that produced them.
#[derive(Debug)]
pub struct CrossvalPc {
    pub records: Vec<PCRecord>,
    pub assignment: FoldAssignment,
    pub models: Vec<NgramModel>,
}

/// Splits the lexicon's word types into `k` folds and scores each type with
/// the model whose held-out fold contains it. Training is type-based:
/// repeated tokens do not reweight counts.
pub fn crossval_pc(
    lexicon: &LanguageLexicon,
    k: usize,
    seed: u64,
    order: usize,
    smoothing: Smoothing,
) -> Result<Vec<PCRecord>> {
    Ok(crossval_pc_detailed(lexicon, k, seed, order, smoothing, false)?.records)
}

pub fn crossval_pc_detailed(
    lexicon: &LanguageLexicon,
    k: usize,
    seed: u64,
    order: usize,
    smoothing: Smoothing,
    track_provenance: bool,
) -> Result<CrossvalPc> {
    let types = lexicon.word_types();
    let type_ids: Vec<String> = types.iter().map(|(id, _)| id.clone()).collect();
    let assignment = split_folds(&type_ids, k, seed)?;

    let models: Vec<NgramModel> = (0..k)
        .into_par_iter()
        .map(|fold| {
            let mut train_words = Vec::new();
            let mut train_ids = Vec::new();
            for (id, segs) in &types {
                if assignment.fold_of[id] != fold {
                    train_words.push(segs.clone());
                    train_ids.push(id.clone());
                }
            }
            train_ngram_labeled(
                &train_words,
                track_provenance.then_some(train_ids.as_slice()),
                &lexicon.inventory,
                order,
                smoothing,
                &format!("fold-{fold}"),
            )
        })
        .collect::<Result<Vec<_>>>()?;

    let records = types
        .iter()
        .map(|(id, segs)| {
            let fold = assignment.fold_of[id];
            phonotactic_complexity(&models[fold], id, segs)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(CrossvalPc {
        records,
        assignment,
        models,
    })
}
