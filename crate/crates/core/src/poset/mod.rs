//! The poset of finite predictor fragments `(d, tables, F)` for a bounded
//! space, with its order, compatibility, height and the witness sets for the
//! softness axioms.
//!
//! `F` is stored as its set of `⊆`-maximal words. The order only ever asks
//! whether a word of `F` extends to some word of `G`, so this is the same
//! condition, and it makes the representation canonical.

pub mod grid;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::predict::{Bound, IndexRule, PredictError, Predictor, SpaceSpec, Word, WordIter};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PosetError {
    #[error("conditions live over different spaces")]
    SpecMismatch,
    #[error("conditions need a space with every coordinate bounded")]
    UnboundedSpace,
    #[error("index {0} is beyond the horizon")]
    IndexBeyondHorizon(usize),
    #[error("table at {index} has {got} entries, expected {expected}")]
    TableSize { index: usize, expected: usize, got: usize },
    #[error("table at {index} takes value {value} outside the bound")]
    TableValue { index: usize, value: u64 },
    #[error("word {0:?} is not in the space")]
    WordOutsideSpace(Word),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("the conditions are incompatible")]
    NotCompatible,
    #[error("chain is not decreasing at position {0}")]
    NotAChain(usize),
    #[error("condition {index} has height {height} above {bound}")]
    HeightExceeded { index: usize, height: usize, bound: usize },
    #[error(transparent)]
    Predict(#[from] PredictError),
}

/// `(d, tables, F)`: `tables[k]` lists `pi_k` over the words of length `k` in
/// mixed-radix order; `words` holds the maximal elements of `F`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawCondition", into = "RawCondition")]
pub struct PxCondition {
    spec: SpaceSpec,
    tables: BTreeMap<usize, Vec<u64>>,
    words: BTreeSet<Word>,
}

#[derive(Serialize, Deserialize)]
struct RawCondition {
    bounds: Vec<u64>,
    tables: BTreeMap<usize, Vec<u64>>,
    words: Vec<Word>,
}

impl TryFrom<RawCondition> for PxCondition {
    type Error = PosetError;
    fn try_from(raw: RawCondition) -> Result<Self, PosetError> {
        let spec = SpaceSpec::bounded(&raw.bounds)?;
        PxCondition::new(spec, raw.tables, raw.words)
    }
}

impl From<PxCondition> for RawCondition {
    fn from(c: PxCondition) -> Self {
        RawCondition {
            bounds: c.spec.bounds().iter().map(|b| b.as_nat().expect("bounded")).collect(),
            tables: c.tables,
            words: c.words.into_iter().collect(),
        }
    }
}

fn bound_at(spec: &SpaceSpec, k: usize) -> u64 {
    spec.bound(k).and_then(Bound::as_nat).expect("bounded space")
}

fn table_len(spec: &SpaceSpec, k: usize) -> usize {
    spec.count_words(k).expect("bounded space") as usize
}

pub fn is_prefix(f: &[u64], g: &[u64]) -> bool {
    f.len() <= g.len() && g[..f.len()] == *f
}

/// The `⊆`-maximal members of a set of words.
pub fn normalize(words: impl IntoIterator<Item = Word>) -> BTreeSet<Word> {
    let all: BTreeSet<Word> = words.into_iter().collect();
    all.iter().filter(|f| !all.iter().any(|g| g.len() > f.len() && is_prefix(f, g))).cloned().collect()
}

/// `e ⊇ d` and every new index lies above `max(d)`.
pub fn end_extends<V>(e: &BTreeMap<usize, V>, d: &BTreeMap<usize, V>) -> bool {
    let top = d.keys().next_back();
    d.keys().all(|k| e.contains_key(k)) && e.keys().filter(|k| !d.contains_key(k)).all(|k| Some(k) > top)
}

impl PxCondition {
    pub fn new(spec: SpaceSpec, tables: BTreeMap<usize, Vec<u64>>, words: impl IntoIterator<Item = Word>) -> Result<Self, PosetError> {
        if spec.bounds().iter().any(|b| b.as_nat().is_none()) {
            return Err(PosetError::UnboundedSpace);
        }
        for (&index, t) in &tables {
            if index >= spec.horizon() {
                return Err(PosetError::IndexBeyondHorizon(index));
            }
            let expected = table_len(&spec, index);
            if t.len() != expected {
                return Err(PosetError::TableSize { index, expected, got: t.len() });
            }
            let b = bound_at(&spec, index);
            if let Some(&value) = t.iter().find(|&&v| v >= b) {
                return Err(PosetError::TableValue { index, value });
            }
        }
        let words = normalize(words);
        if let Some(w) = words.iter().find(|w| w.len() > spec.horizon() || spec.word_index(w).is_none()) {
            return Err(PosetError::WordOutsideSpace(w.clone()));
        }
        Ok(PxCondition { spec, tables, words })
    }

    /// The weakest condition: no tables, no words.
    pub fn top(spec: SpaceSpec) -> Result<Self, PosetError> {
        PxCondition::new(spec, BTreeMap::new(), [])
    }

    pub fn spec(&self) -> &SpaceSpec {
        &self.spec
    }

    pub fn tables(&self) -> &BTreeMap<usize, Vec<u64>> {
        &self.tables
    }

    pub fn domain(&self) -> impl Iterator<Item = usize> + '_ {
        self.tables.keys().copied()
    }

    pub fn words(&self) -> &BTreeSet<Word> {
        &self.words
    }

    pub fn max_domain(&self) -> Option<usize> {
        self.tables.keys().next_back().copied()
    }

    /// `pi_k(sigma)` for `k` in the domain and `sigma` of length `k`.
    pub fn guess(&self, k: usize, sigma: &[u64]) -> u64 {
        self.tables[&k][self.spec.word_index(sigma).expect("word of length k in the space")]
    }

    pub fn with_words(&self, words: impl IntoIterator<Item = Word>) -> Result<Self, PosetError> {
        PxCondition::new(self.spec.clone(), self.tables.clone(), words)
    }

    pub fn height(&self) -> usize {
        height(self)
    }
}

/// `max(max(d), |F|)` with `max(∅) = 0`.
pub fn height(c: &PxCondition) -> usize {
    c.max_domain().unwrap_or(0).max(c.words.len())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeightedCondition {
    pub condition: PxCondition,
    pub height: usize,
}

impl From<PxCondition> for HeightedCondition {
    fn from(condition: PxCondition) -> Self {
        let height = height(&condition);
        HeightedCondition { condition, height }
    }
}

fn same_space(a: &PxCondition, b: &PxCondition) -> Result<(), PosetError> {
    if a.spec == b.spec {
        Ok(())
    } else {
        Err(PosetError::SpecMismatch)
    }
}

/// Does every new index of `hi` over `lo` guess every word of `words` correctly?
fn new_tables_predict(hi: &PxCondition, lo: &PxCondition, words: &BTreeSet<Word>) -> bool {
    hi.tables
        .keys()
        .filter(|k| !lo.tables.contains_key(k))
        .all(|&k| words.iter().filter(|f| k < f.len()).all(|f| hi.guess(k, &f[..k]) == f[k]))
}

fn tables_agree(hi: &PxCondition, lo: &PxCondition) -> bool {
    lo.tables.iter().all(|(k, t)| hi.tables.get(k) == Some(t))
}

/// `c1 <= c2`, i.e. `c1` is the stronger condition.
pub fn px_leq(c1: &PxCondition, c2: &PxCondition) -> Result<bool, PosetError> {
    same_space(c1, c2)?;
    Ok(end_extends(&c1.tables, &c2.tables)
        && tables_agree(c1, c2)
        && c2.words.iter().all(|f| c1.words.iter().any(|g| is_prefix(f, g)))
        && new_tables_predict(c1, c2, &c2.words))
}

/// A common extension, if one exists.
///
/// Two conditions are compatible exactly when one domain end-extends the
/// other, the tables agree on the smaller domain, and the new tables of the
/// larger side guess the other side's words. The returned extension is
/// `(larger domain, its tables, maximal words of F ∪ G)`, which is the
/// weakest common extension.
pub fn px_compatible(c1: &PxCondition, c2: &PxCondition) -> Result<Option<PxCondition>, PosetError> {
    same_space(c1, c2)?;
    let (hi, lo) = if end_extends(&c1.tables, &c2.tables) {
        (c1, c2)
    } else if end_extends(&c2.tables, &c1.tables) {
        (c2, c1)
    } else {
        return Ok(None);
    };
    if !tables_agree(hi, lo) || !new_tables_predict(hi, lo, &lo.words) {
        return Ok(None);
    }
    let words = lo.words.iter().chain(&hi.words).cloned();
    Ok(Some(hi.with_words(words)?))
}

/// Which clause of the case analysis a witness falls under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessCase {
    /// `d ⊆ e`: a new table contradicts a word of `F`.
    NewPoint,
    /// `e ⊂ d`, same words: the domains interleave.
    Interleaving,
    /// `e ⊂ d`, same words: a table differs on a shared new index.
    TableConflict,
    /// `e ⊂ d`: an extra short word contradicts a table of `p`.
    NewWord,
    /// `e ⊂ d`, same words, `d ⊂ e'`: a new table above `d` contradicts `F`.
    AboveD,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub case: WitnessCase,
    pub condition: PxCondition,
}

/// All end-extensions of `base` by indices in `(max(base), m] ∩ [0, horizon)`,
/// with every possible table on the new indices.
fn table_extensions(spec: &SpaceSpec, base: &BTreeMap<usize, Vec<u64>>, m: usize) -> Vec<BTreeMap<usize, Vec<u64>>> {
    let from = base.keys().next_back().map_or(0, |k| k + 1);
    let mut out = vec![base.clone()];
    for k in from..=m.min(spec.horizon().saturating_sub(1)) {
        let tables: Vec<Vec<u64>> = WordIter::new(vec![bound_at(spec, k); table_len(spec, k)]).collect();
        let mut next = Vec::with_capacity(out.len() * (tables.len() + 1));
        for t in &out {
            next.push(t.clone());
            for table in &tables {
                let mut e = t.clone();
                e.insert(k, table.clone());
                next.push(e);
            }
        }
        out = next;
    }
    out
}

/// All words of length at most `len` in the space.
pub fn short_words(spec: &SpaceSpec, len: usize) -> Vec<Word> {
    (0..=len.min(spec.horizon())).flat_map(|n| spec.words(n).expect("bounded space")).collect()
}

/// The finite witness set for `(p, q, m)`: conditions `w <= q` with `w ⊥ p`
/// and height at most `m` such that every `q' <= q` incompatible with `p` of
/// height at most `m` lies below one of them.
///
/// Candidates have the form `(e', pi', G')` with `e'` an end-extension of `e`
/// with `max(e') <= m`. If `d ⊆ e` then `G' = G`. If `e ⊂ d` then `G' = G`
/// or `G' = G ∪ {g}` for a word `g` of length at most `max(d) + 1`. The
/// candidates are kept when they are `<= q`, incompatible with `p` and of
/// height at most `m`.
pub fn softness_witnesses(p: &PxCondition, q: &PxCondition, m: usize) -> Result<Vec<Witness>, PosetError> {
    if px_compatible(p, q)?.is_none() {
        return Err(PosetError::PreconditionViolated("p and q are incompatible".into()));
    }
    if px_leq(q, p)? {
        return Err(PosetError::PreconditionViolated("q <= p".into()));
    }
    let spec = &q.spec;
    let below = end_extends(&q.tables, &p.tables);
    let mut word_sets = vec![q.words.clone()];
    if !below {
        let reach = p.max_domain().expect("e ⊂ d makes d nonempty") + 1;
        for g in short_words(spec, reach) {
            let w = normalize(q.words.iter().cloned().chain([g]));
            if !word_sets.contains(&w) {
                word_sets.push(w);
            }
        }
    }
    let mut out = Vec::new();
    for tables in table_extensions(spec, &q.tables, m) {
        for words in &word_sets {
            let w = PxCondition { spec: spec.clone(), tables: tables.clone(), words: words.clone() };
            if height(&w) > m || !px_leq(&w, q)? || px_compatible(&w, p)?.is_some() {
                continue;
            }
            let case = if below {
                WitnessCase::NewPoint
            } else if w.words != q.words {
                WitnessCase::NewWord
            } else if !end_extends(&w.tables, &p.tables) && !end_extends(&p.tables, &w.tables) {
                WitnessCase::Interleaving
            } else if p.tables.iter().any(|(k, t)| w.tables.get(k).is_some_and(|u| u != t)) {
                WitnessCase::TableConflict
            } else {
                WitnessCase::AboveD
            };
            out.push(Witness { case, condition: w });
        }
    }
    Ok(out)
}

/// Axiom (III): the common extension found by [`px_compatible`] and whether
/// its height is at most `h(p) + h(q)`.
pub fn verify_property_iii(p: &PxCondition, q: &PxCondition) -> Result<(PxCondition, bool), PosetError> {
    let r = px_compatible(p, q)?.ok_or(PosetError::NotCompatible)?;
    let ok = height(&r) <= height(p) + height(q);
    Ok((r, ok))
}

fn check_chain(chain: &[PxCondition]) -> Result<(), PosetError> {
    if chain.is_empty() {
        return Err(PosetError::NotAChain(0));
    }
    for (i, w) in chain.windows(2).enumerate() {
        if !px_leq(&w[1], &w[0])? {
            return Err(PosetError::NotAChain(i + 1));
        }
    }
    Ok(())
}

/// For one word of some `F` along a chain: the indices added after it entered,
/// and those at which the final tables guess it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageEntry {
    pub word: Word,
    pub entered_at: usize,
    pub checked: Vec<usize>,
    pub predicted: Vec<usize>,
}

/// The predictor given by the tables of a decreasing chain, and for every
/// word that appears the record of the indices past its entry point.
pub fn generic_predictor(chain: &[PxCondition]) -> Result<(Predictor, Vec<CoverageEntry>), PosetError> {
    check_chain(chain)?;
    let last = chain.last().expect("nonempty");
    let rules = last.tables.iter().map(|(&k, t)| (k, IndexRule::Table { values: t.clone() })).collect();
    let predictor = Predictor::new(last.spec.clone(), rules)?;
    let mut seen = BTreeSet::new();
    let mut report = Vec::new();
    for (i, c) in chain.iter().enumerate() {
        for f in &c.words {
            if !seen.insert(f.clone()) {
                continue;
            }
            let checked: Vec<usize> = last.domain().filter(|k| !c.tables.contains_key(k) && *k < f.len()).collect();
            let predicted = checked.iter().copied().filter(|&k| last.guess(k, &f[..k]) == f[k]).collect();
            report.push(CoverageEntry { word: f.clone(), entered_at: i, checked, predicted });
        }
    }
    Ok((predictor, report))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyIReport {
    pub lower_bound: PxCondition,
    /// First position from which tables and the size of `F` no longer change.
    pub stable_from: usize,
    pub verified: bool,
}

/// Axiom (I) on a finite decreasing chain of bounded height.
pub fn verify_property_i(chain: &[PxCondition], m: usize) -> Result<PropertyIReport, PosetError> {
    check_chain(chain)?;
    if let Some((index, c)) = chain.iter().enumerate().find(|(_, c)| height(c) > m) {
        return Err(PosetError::HeightExceeded { index, height: height(c), bound: m });
    }
    let last = chain.last().expect("nonempty");
    let stable_from = (0..chain.len())
        .rev()
        .take_while(|&i| chain[i].tables == last.tables && chain[i].words.len() == last.words.len())
        .last()
        .unwrap_or(chain.len() - 1);
    let lower_bound = last.clone();
    let verified = chain.iter().map(|c| px_leq(&lower_bound, c)).collect::<Result<Vec<_>, _>>()?.into_iter().all(|b| b);
    Ok(PropertyIReport { lower_bound, stable_from, verified })
}
