//! Exhaustive checks on a finite universe of conditions.
//!
//! A condition splits into its table part `(d, tables)` and its word part `F`.
//! The order and compatibility only combine three relations between parts:
//! end-extension of table parts, covering of word parts, and "the new tables
//! guess these words". The grid tabulates those relations once, keeps sets of
//! word parts as bit masks, and checks every statement over the whole
//! universe through them. The tabulation is compared with the plain functions
//! in the tests.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::{end_extends, is_prefix, normalize, PxCondition};
use crate::predict::{Bound, SpaceSpec, Word, WordIter};

type Part = BTreeMap<usize, Vec<u64>>;
const NONE: u32 = u32::MAX;

/// One line of a grid report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridRow {
    pub case: String,
    pub checked: u64,
    pub failures: u64,
}

impl GridRow {
    fn new(case: &str) -> Self {
        GridRow { case: case.into(), checked: 0, failures: 0 }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// All table parts, all word parts up to a size, and the tabulated relations.
pub struct Grid {
    spec: SpaceSpec,
    parts: Vec<Part>,
    part_top: Vec<usize>,
    /// Word parts, sorted by size. The first `universe_words` form the universe;
    /// the rest (one word more) only occur inside witnesses.
    antichains: Vec<BTreeSet<Word>>,
    universe_words: usize,
    index: HashMap<BTreeSet<Word>, usize>,
    /// `ext[a * n + b]` is the pair id when part `a` end-extends part `b`.
    ext: Vec<u32>,
    ext_pairs: Vec<(usize, usize)>,
    /// `pred[pair][w]`: the new tables of the pair guess all words of `w`.
    pred: Vec<Vec<bool>>,
    pred_mask: Vec<u128>,
    /// Universe word parts covering a given word part.
    cover_up: Vec<u128>,
    cover: Vec<Vec<bool>>,
    sizes: Vec<usize>,
    /// `options[w][r]`: `w` and every `normalize(w ∪ {g})` with `|g| <= r`.
    options: Vec<Vec<Vec<usize>>>,
}

fn bit(i: usize) -> u128 {
    1u128 << i
}

fn antichains(words: &[Word], max: usize) -> Vec<BTreeSet<Word>> {
    fn rec(words: &[Word], start: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<BTreeSet<Word>>) {
        out.push(cur.iter().map(|&i| words[i].clone()).collect());
        if cur.len() == max {
            return;
        }
        for i in start..words.len() {
            if cur.iter().all(|&j| !is_prefix(&words[j], &words[i]) && !is_prefix(&words[i], &words[j])) {
                cur.push(i);
                rec(words, i + 1, max, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(words, 0, max, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

impl Grid {
    /// Universe over `spec` with word parts of size at most `max_words`.
    pub fn new(spec: SpaceSpec, max_words: usize) -> Self {
        let h = spec.horizon();
        let bound = |k: usize| spec.bound(k).and_then(Bound::as_nat).expect("bounded space");
        let mut parts: Vec<Part> = vec![BTreeMap::new()];
        for k in 0..h {
            let len = spec.count_words(k).expect("bounded") as usize;
            let tables: Vec<Vec<u64>> = WordIter::new(vec![bound(k); len]).collect();
            let mut next = Vec::new();
            for p in &parts {
                next.push(p.clone());
                for t in &tables {
                    let mut e = p.clone();
                    e.insert(k, t.clone());
                    next.push(e);
                }
            }
            parts = next;
        }
        let part_top = parts.iter().map(|p| p.keys().next_back().copied().unwrap_or(0)).collect();
        let words = super::short_words(&spec, h);
        let antichains = antichains(&words, max_words + 1);
        let universe_words = antichains.iter().filter(|a| a.len() <= max_words).count();
        assert!(universe_words <= 128, "word parts must fit a mask");
        let index: HashMap<_, _> = antichains.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        let n = parts.len();
        let mut ext = vec![NONE; n * n];
        let mut ext_pairs = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if end_extends(&parts[a], &parts[b]) && parts[b].iter().all(|(k, t)| parts[a].get(k) == Some(t)) {
                    ext[a * n + b] = ext_pairs.len() as u32;
                    ext_pairs.push((a, b));
                }
            }
        }
        let guesses = |a: usize, b: usize, w: &BTreeSet<Word>| {
            parts[a].iter().filter(|(k, _)| !parts[b].contains_key(k)).all(|(&k, t)| {
                w.iter().filter(|f| k < f.len()).all(|f| t[spec.word_index(&f[..k]).expect("in space")] == f[k])
            })
        };
        let pred: Vec<Vec<bool>> = ext_pairs.iter().map(|&(a, b)| antichains.iter().map(|w| guesses(a, b, w)).collect()).collect();
        let pred_mask = pred.iter().map(|row| (0..universe_words).filter(|&w| row[w]).fold(0, |m, w| m | bit(w))).collect();
        let covers = |big: &BTreeSet<Word>, small: &BTreeSet<Word>| small.iter().all(|f| big.iter().any(|g| is_prefix(f, g)));
        let cover: Vec<Vec<bool>> = antichains.iter().map(|big| antichains.iter().map(|small| covers(big, small)).collect()).collect();
        let cover_up = (0..antichains.len()).map(|w| (0..universe_words).filter(|&u| cover[u][w]).fold(0, |m, u| m | bit(u))).collect();
        let sizes = antichains.iter().map(BTreeSet::len).collect();
        let options = (0..universe_words)
            .map(|w| {
                (0..=h)
                    .map(|r| {
                        let mut o = vec![w];
                        for g in words.iter().filter(|g| g.len() <= r) {
                            let u = index[&normalize(antichains[w].iter().cloned().chain([g.clone()]))];
                            if !o.contains(&u) {
                                o.push(u);
                            }
                        }
                        o
                    })
                    .collect()
            })
            .collect();
        Grid { spec, parts, part_top, antichains, universe_words, index, ext, ext_pairs, pred, pred_mask, cover_up, cover, sizes, options }
    }

    pub fn spec(&self) -> &SpaceSpec {
        &self.spec
    }

    pub fn table_parts(&self) -> usize {
        self.parts.len()
    }

    pub fn word_parts(&self) -> usize {
        self.universe_words
    }

    /// Number of conditions in the universe.
    pub fn len(&self) -> usize {
        self.parts.len() * self.universe_words
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn condition(&self, t: usize, w: usize) -> PxCondition {
        PxCondition::new(self.spec.clone(), self.parts[t].clone(), self.antichains[w].iter().cloned()).expect("grid conditions are valid")
    }

    /// Table and word part of a condition, if it lies in the tabulated range.
    pub fn locate(&self, c: &PxCondition) -> Option<(usize, usize)> {
        let t = self.parts.iter().position(|p| p == c.tables())?;
        Some((t, *self.index.get(c.words())?))
    }

    fn pair(&self, a: usize, b: usize) -> Option<usize> {
        let id = self.ext[a * self.parts.len() + b];
        (id != NONE).then_some(id as usize)
    }

    pub fn height(&self, t: usize, w: usize) -> usize {
        self.part_top[t].max(self.sizes[w])
    }

    pub fn leq(&self, t1: usize, w1: usize, t2: usize, w2: usize) -> bool {
        self.pair(t1, t2).is_some_and(|id| self.cover[w1][w2] && self.pred[id][w2])
    }

    pub fn compatible(&self, t1: usize, w1: usize, t2: usize, w2: usize) -> bool {
        self.pair(t2, t1).is_some_and(|id| self.pred[id][w1]) || self.pair(t1, t2).is_some_and(|id| self.pred[id][w2])
    }

    /// Mask of universe word parts `w'` with `(t, w')` compatible with `(tp, wp)`.
    fn compatible_mask(&self, t: usize, tp: usize, wp: usize) -> u128 {
        let mut m = self.pair(tp, t).map_or(0, |id| self.pred_mask[id]);
        if self.pair(t, tp).is_some_and(|id| self.pred[id][wp]) {
            m = u128::MAX;
        }
        m
    }

    fn size_mask(&self, m: usize) -> u128 {
        (0..self.universe_words).filter(|&w| self.sizes[w] <= m).fold(0, |acc, w| acc | bit(w))
    }

    /// Reflexivity, antisymmetry and transitivity of the order.
    pub fn check_partial_order(&self) -> GridRow {
        let mut row = GridRow::new("partial_order");
        let nw = self.universe_words;
        for t in 0..self.parts.len() {
            for w in 0..nw {
                row.checked += 1;
                row.failures += u64::from(!self.leq(t, w, t, w));
            }
        }
        // antisymmetry: both relations between parts force equal parts
        for &(a, b) in &self.ext_pairs {
            row.checked += 1;
            row.failures += u64::from(a != b && self.pair(b, a).is_some());
        }
        for a in 0..self.antichains.len() {
            for b in 0..self.antichains.len() {
                row.checked += 1;
                row.failures += u64::from(a != b && self.cover[a][b] && self.cover[b][a]);
            }
        }
        // transitivity of covering, then of end-extension with guessing
        for w3 in 0..nw {
            for w2 in (0..nw).filter(|&w2| self.cover[w2][w3]) {
                row.checked += 1;
                row.failures += u64::from(self.cover_up[w2] & !self.cover_up[w3] != 0);
            }
        }
        for &(t2, t3) in &self.ext_pairs {
            let id23 = self.pair(t2, t3).unwrap();
            for t1 in (0..self.parts.len()).filter(|&t1| self.pair(t1, t2).is_some()) {
                let id12 = self.pair(t1, t2).unwrap();
                let Some(id13) = self.pair(t1, t3) else {
                    row.checked += 1;
                    row.failures += 1;
                    continue;
                };
                for w3 in 0..nw {
                    row.checked += 1;
                    // some w2 covering w3 with (t1, w2) <= (t2, w2'), w1 = w2 included
                    let middle = self.cover_up[w3] & self.pred_mask[id12];
                    if self.pred[id23][w3] && middle != 0 && !self.pred[id13][w3] {
                        row.failures += 1;
                    }
                }
            }
        }
        row
    }

    /// `c1 <= c2` implies `h(c1) >= h(c2)`, over every related pair.
    pub fn check_height_monotone(&self) -> GridRow {
        let mut row = GridRow::new("height_monotone");
        for &(t1, t2) in &self.ext_pairs {
            let id = self.pair(t1, t2).unwrap();
            for w2 in 0..self.universe_words {
                if !self.pred[id][w2] {
                    continue;
                }
                for w1 in (0..self.universe_words).filter(|&w1| self.cover[w1][w2]) {
                    row.checked += 1;
                    row.failures += u64::from(self.height(t1, w1) < self.height(t2, w2));
                }
            }
        }
        row
    }

    /// Any two conditions with the same table part are compatible.
    pub fn check_sigma_centered(&self) -> GridRow {
        let mut row = GridRow::new("sigma_centered");
        for t in 0..self.parts.len() {
            for w1 in 0..self.universe_words {
                for w2 in 0..self.universe_words {
                    row.checked += 1;
                    row.failures += u64::from(!self.compatible(t, w1, t, w2));
                }
            }
        }
        row
    }

    /// Axiom (III) for every compatible pair, with the weakest common extension.
    pub fn check_property_iii(&self) -> GridRow {
        let mut row = GridRow::new("property_iii");
        let nw = self.universe_words;
        let union: Vec<Vec<usize>> = (0..nw)
            .map(|a| (0..nw).map(|b| normalize(self.antichains[a].iter().chain(&self.antichains[b]).cloned()).len()).collect())
            .collect();
        for &(hi, lo) in &self.ext_pairs {
            let id = self.pair(hi, lo).unwrap();
            for wl in (0..nw).filter(|&w| self.pred[id][w]) {
                for wh in 0..nw {
                    row.checked += 1;
                    let h = self.part_top[hi].max(union[wl][wh]);
                    row.failures += u64::from(h > self.height(hi, wh) + self.height(lo, wl));
                }
            }
        }
        row
    }

    /// Does `(tc, wc)` belong to the witness set for `(p, q, m)`?
    #[allow(clippy::too_many_arguments)]
    fn is_witness(&self, tp: usize, wp: usize, tq: usize, wq: usize, m: usize, reach: Option<usize>, tc: usize, wc: usize) -> bool {
        let Some(id) = self.pair(tc, tq) else { return false };
        let word_ok = wc == wq || reach.is_some_and(|r| self.options[wq][r].contains(&wc));
        word_ok
            && self.height(tc, wc) <= m
            && self.cover[wc][wq]
            && self.pred[id][wq]
            && !self.compatible(tc, wc, tp, wp)
    }

    /// The witness set for `(p, q, m)` in indexed form, in the order
    /// [`super::softness_witnesses`] produces it.
    pub fn witness_set(&self, tp: usize, wp: usize, tq: usize, wq: usize, m: usize) -> Vec<(usize, usize)> {
        let reach = self.pair(tq, tp).is_none().then(|| (self.part_top[tp] + 1).min(self.spec.horizon()));
        let mut out = Vec::new();
        for tc in (0..self.parts.len()).filter(|&tc| self.pair(tc, tq).is_some()) {
            let opts: &[usize] = match reach {
                Some(r) => &self.options[wq][r],
                None => std::slice::from_ref(&wq),
            };
            for &wc in opts {
                if self.is_witness(tp, wp, tq, wq, m, reach, tc, wc) {
                    out.push((tc, wc));
                }
            }
        }
        out
    }

    /// Coverage for every compatible `(p, q)` with `q` not below `p` and every
    /// `m <= max_m`: each `q' <= q` incompatible with `p` of height at most `m`
    /// lies below a member of the witness set.
    pub fn check_softness_coverage(&self, max_m: usize) -> GridRow {
        let mut cover_row = GridRow::new("softness_coverage");
        let nw = self.universe_words;
        let n = self.parts.len();
        let restrictions: Vec<Vec<usize>> = (0..n).map(|a| (0..n).filter(|&b| self.pair(a, b).is_some()).collect()).collect();
        let extensions: Vec<Vec<usize>> = (0..n).map(|b| (0..n).filter(|&a| self.pair(a, b).is_some()).collect()).collect();
        let size_masks: Vec<u128> = (0..=max_m).map(|m| self.size_mask(m)).collect();
        for tp in 0..n {
            for tq in 0..n {
                if self.pair(tp, tq).is_none() && self.pair(tq, tp).is_none() {
                    continue;
                }
                let below = self.pair(tq, tp).is_some();
                let reach = (!below).then(|| (self.part_top[tp] + 1).min(self.spec.horizon()));
                for wp in 0..nw {
                    for wq in 0..nw {
                        if !self.compatible(tp, wp, tq, wq) || self.leq(tq, wq, tp, wp) {
                            continue;
                        }
                        for (m, &sizes) in size_masks.iter().enumerate() {
                            for &t1 in &extensions[tq] {
                                let id = self.pair(t1, tq).unwrap();
                                if !self.pred[id][wq] || self.part_top[t1] > m {
                                    continue;
                                }
                                // q' = (t1, w1) for w1 in this mask
                                let s = self.cover_up[wq] & sizes & !self.compatible_mask(t1, tp, wp);
                                cover_row.checked += u64::from(s.count_ones());
                                if s == 0 {
                                    continue;
                                }
                                if self.is_witness(tp, wp, tq, wq, m, reach, t1, wq) {
                                    // every such q' lies below (t1, G)
                                    continue;
                                }
                                let mut covered = 0u128;
                                for &tc in restrictions[t1].iter().filter(|&&tc| self.pair(tc, tq).is_some()) {
                                    let idc = self.pair(t1, tc).unwrap();
                                    let opts: &[usize] = match reach {
                                        Some(r) => &self.options[wq][r],
                                        None => std::slice::from_ref(&wq),
                                    };
                                    for &wc in opts {
                                        if self.pred[idc][wc] && self.is_witness(tp, wp, tq, wq, m, reach, tc, wc) {
                                            covered |= self.cover_up[wc];
                                        }
                                    }
                                }
                                cover_row.failures += u64::from((s & !covered).count_ones());
                            }
                        }
                    }
                }
            }
        }
        cover_row
    }

    /// Compare the tabulated relations with the plain functions on every
    /// `stride`-th pair of conditions.
    pub fn check_against_functions(&self, stride: usize) -> GridRow {
        let mut row = GridRow::new("tabulation_agrees");
        let nw = self.universe_words;
        let total = self.len();
        let mut i = 0usize;
        while i < total * total {
            let (a, b) = (i / total, i % total);
            let (t1, w1, t2, w2) = (a / nw, a % nw, b / nw, b % nw);
            let c1 = self.condition(t1, w1);
            let c2 = self.condition(t2, w2);
            row.checked += 1;
            let leq = super::px_leq(&c1, &c2).unwrap() == self.leq(t1, w1, t2, w2);
            let compat = super::px_compatible(&c1, &c2).unwrap().is_some() == self.compatible(t1, w1, t2, w2);
            let h = super::height(&c1) == self.height(t1, w1);
            row.failures += u64::from(!(leq && compat && h));
            i += stride;
        }
        row
    }
}

/// Property (*) on a universe small enough that compatibility inside it is
/// exact: for every condition `p`, every maximal antichain below `p` (members
/// in increasing index order) and every `m <= max_m`, the least `n` such that
/// every `q <= p` incompatible with the first `n` members has height above
/// `m`. Returns the row and the largest such `n` seen.
pub fn check_property_star(spec: SpaceSpec, max_m: usize) -> (GridRow, usize) {
    let words = super::short_words(&spec, spec.horizon());
    let grid = Grid::new(spec, words.len());
    let conds: Vec<(usize, usize)> = (0..grid.table_parts()).flat_map(|t| (0..grid.word_parts()).map(move |w| (t, w))).collect();
    let mut row = GridRow::new("property_star");
    let mut worst = 0;
    for &(tp, wp) in &conds {
        let below: Vec<(usize, usize)> = conds.iter().copied().filter(|&(t, w)| grid.leq(t, w, tp, wp)).collect();
        let k = below.len();
        assert!(k <= 24, "universe too large for antichain enumeration");
        let comp: Vec<u32> = (0..k)
            .map(|i| (0..k).filter(|&j| grid.compatible(below[i].0, below[i].1, below[j].0, below[j].1)).fold(0, |m, j| m | (1 << j)))
            .collect();
        for set in 1u32..(1 << k) {
            let members: Vec<usize> = (0..k).filter(|&i| set & (1 << i) != 0).collect();
            let anti = members.iter().all(|&i| comp[i] & set == 1 << i);
            let maximal = (0..k).all(|j| comp[j] & set != 0);
            if !anti || !maximal {
                continue;
            }
            for m in 0..=max_m {
                row.checked += 1;
                let n = (0..=members.len()).find(|&n| {
                    let prefix: u32 = members[..n].iter().fold(0, |acc, &i| acc | (1 << i));
                    (0..k).all(|j| comp[j] & prefix != 0 || grid.height(below[j].0, below[j].1) > m)
                });
                match n {
                    Some(n) => worst = worst.max(n),
                    None => row.failures += 1,
                }
            }
        }
    }
    (row, worst)
}
