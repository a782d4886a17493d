//! Generators of a Luzin-style subgroup of `K^omega` built from strictly
//! increasing words, and finite measurements of how well linear predictors
//! do against their combinations.
//!
//! For a nonempty word `sigma` of length `n` with last entry `m`, the last
//! index `sigma*(n-1)` is the least `l` such that `a_l` avoids every value
//! `phi_k(a_{l_0}, ...)` with `k < m` and all `l_j` drawn from the indices
//! already used by words in `m^{<=n}`. Earlier coordinates are inherited from
//! prefixes. The generator for `f` is `g(n) = a_{(f|(n+1))*(n)}`.
//!
//! Everything is memoized per word, and the index sets `U(m, n)` used by the
//! avoidance condition are cached per `(m, n)`. Visiting the `m^n` words is
//! the cost that the step budget caps.

mod scan;

pub use scan::{brute_force_luzinity, LuzinityBudget, LuzinityRow, LuzinityTable};

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, Field, FieldEnumeration, LinearFormEnumeration, Scalar};
use crate::predict::Word;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LuzinError {
    #[error("{0} is finite; the avoidance condition needs an infinite field")]
    InfeasibleOverFiniteField(Field),
    #[error("the word must be nonempty")]
    EmptyWord,
    #[error("word {0:?} is not strictly increasing")]
    NotStrictlyIncreasing(Word),
    #[error("word has length {len}, horizon {horizon} needs more")]
    WordTooShort { len: usize, horizon: usize },
    #[error("step budget of {budget} exhausted")]
    BudgetExceeded { budget: u64 },
    #[error("audit failure at n = {n}, k = {k}: value equals the image of {tuple:?}")]
    AuditFailure { n: usize, k: usize, tuple: Vec<usize> },
    #[error("generator {0} does not match the family horizon")]
    GeneratorLength(usize),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Memo of `rho(sigma) = sigma*(lh(sigma) - 1)` keyed by the word, plus the
/// used index sets `U(m, n)` (and the least admissible index they determine)
/// and the enumerations everything depends on.
///
/// Construction is single-writer (`&mut self`); once a family is built the cache
/// can be frozen by simply no longer mutating it.
#[derive(Debug, Clone)]
pub struct SigmaStarCache {
    elements: FieldEnumeration,
    forms: LinearFormEnumeration,
    memo: HashMap<Word, usize>,
    union: BTreeMap<(u64, usize), BTreeSet<usize>>,
    least: BTreeMap<(u64, usize), usize>,
    steps: u64,
    budget: u64,
}

pub const DEFAULT_STEP_BUDGET: u64 = 1_000_000;

impl SigmaStarCache {
    pub fn new(field: Field) -> Result<Self, LuzinError> {
        Self::with_budget(field, DEFAULT_STEP_BUDGET)
    }

    pub fn with_budget(field: Field, budget: u64) -> Result<Self, LuzinError> {
        if field.is_finite() {
            return Err(LuzinError::InfeasibleOverFiniteField(field));
        }
        Ok(SigmaStarCache {
            elements: FieldEnumeration::new(field),
            forms: LinearFormEnumeration::new(field),
            memo: HashMap::new(),
            union: BTreeMap::new(),
            least: BTreeMap::new(),
            steps: 0,
            budget,
        })
    }

    pub fn field(&self) -> Field {
        self.elements.field()
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Number of memoized words.
    pub fn len(&self) -> usize {
        self.memo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.memo.is_empty()
    }

    pub fn memo(&self) -> &HashMap<Word, usize> {
        &self.memo
    }

    pub fn element(&mut self, i: usize) -> Scalar {
        self.elements.get(i).expect("infinite field").clone()
    }

    pub fn form(&mut self, k: usize) -> crate::algebra::LinearForm {
        self.forms.get(k).clone()
    }

    fn spend(&mut self, n: u64) -> Result<(), LuzinError> {
        self.steps += n;
        if self.steps > self.budget {
            Err(LuzinError::BudgetExceeded { budget: self.budget })
        } else {
            Ok(())
        }
    }

    /// `U(m, n)`: the union of `ran(tau*)` over nonempty `tau` in `m^{<=n}`.
    ///
    /// Built from `U(m, n - 1)` by visiting the words of length exactly `n`;
    /// their proper prefixes are already accounted for.
    pub fn used_indices(&mut self, m: u64, n: usize) -> Result<BTreeSet<usize>, LuzinError> {
        if n == 0 || m == 0 {
            return Ok(BTreeSet::new());
        }
        if let Some(u) = self.union.get(&(m, n)) {
            return Ok(u.clone());
        }
        let mut u = self.used_indices(m, n - 1)?;
        for tau in crate::predict::WordIter::new(vec![m; n]) {
            self.spend(1)?;
            u.insert(self.rho(&tau)?);
        }
        self.union.insert((m, n), u.clone());
        Ok(u)
    }

    /// Values `phi_k(a_{l_0}, ...)` for `k < m` and all `l_j` in `used`.
    pub fn forbidden_values(&mut self, m: u64, used: &BTreeSet<usize>) -> Result<HashSet<Scalar>, LuzinError> {
        let base: Vec<Scalar> = used.iter().map(|&l| self.element(l)).collect();
        let zero = self.field().zero();
        let mut forbidden = HashSet::new();
        for k in 0..m as usize {
            let form = self.form(k);
            if base.is_empty() && form.arity() > 0 {
                continue;
            }
            let mut image: HashSet<Scalar> = HashSet::from([zero.clone()]);
            for c in form.coefficients() {
                if c.is_zero() {
                    continue;
                }
                self.spend((image.len() * base.len()) as u64)?;
                let mut next = HashSet::with_capacity(image.len() * base.len());
                for x in &image {
                    for b in &base {
                        next.insert(x + &(c * b));
                    }
                }
                image = next;
            }
            forbidden.extend(image);
        }
        Ok(forbidden)
    }

    /// `rho(sigma)`, the last coordinate of `sigma*`.
    pub fn rho(&mut self, sigma: &[u64]) -> Result<usize, LuzinError> {
        let (&m, _) = sigma.split_last().ok_or(LuzinError::EmptyWord)?;
        if let Some(&l) = self.memo.get(sigma) {
            return Ok(l);
        }
        let key = (m, sigma.len());
        let l = match self.least.get(&key) {
            Some(&l) => l,
            None => {
                let used = self.used_indices(m, sigma.len())?;
                let forbidden = self.forbidden_values(m, &used)?;
                let mut l = 0;
                while forbidden.contains(&self.element(l)) {
                    l += 1;
                }
                self.least.insert(key, l);
                l
            }
        };
        self.memo.insert(sigma.to_vec(), l);
        Ok(l)
    }

    /// `sigma*`, read off coordinate by coordinate from the prefixes.
    pub fn sigma_star(&mut self, sigma: &[u64]) -> Result<Vec<usize>, LuzinError> {
        if sigma.is_empty() {
            return Err(LuzinError::EmptyWord);
        }
        (1..=sigma.len()).map(|i| self.rho(&sigma[..i])).collect()
    }
}

/// Public wrapper matching the operation name.
pub fn sigma_star(sigma: &[u64], cache: &mut SigmaStarCache) -> Result<Vec<usize>, LuzinError> {
    cache.sigma_star(sigma)
}

fn check_increasing(f: &[u64]) -> Result<(), LuzinError> {
    if f.windows(2).any(|w| w[0] >= w[1]) {
        Err(LuzinError::NotStrictlyIncreasing(f.to_vec()))
    } else {
        Ok(())
    }
}

/// `g(n) = a_{sigma*(n)}` with `sigma = f|(n+1)`, for `n < horizon`.
pub fn luzin_vector(f: &[u64], horizon: usize, cache: &mut SigmaStarCache) -> Result<Vec<Scalar>, LuzinError> {
    if f.len() < horizon {
        return Err(LuzinError::WordTooShort { len: f.len(), horizon });
    }
    check_increasing(&f[..horizon])?;
    (0..horizon)
        .map(|n| {
            let l = cache.rho(&f[..=n])?;
            Ok(cache.element(l))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub source: Word,
    pub values: Vec<Scalar>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawFamily")]
pub struct LuzinFamily {
    field: Field,
    horizon: usize,
    generators: Vec<Generator>,
}

#[derive(Deserialize)]
struct RawFamily {
    field: Field,
    horizon: usize,
    generators: Vec<Generator>,
}

impl TryFrom<RawFamily> for LuzinFamily {
    type Error = LuzinError;
    fn try_from(raw: RawFamily) -> Result<Self, Self::Error> {
        for (i, g) in raw.generators.iter().enumerate() {
            if g.values.len() != raw.horizon || g.source.len() < raw.horizon {
                return Err(LuzinError::GeneratorLength(i));
            }
            check_increasing(&g.source)?;
            for v in &g.values {
                raw.field.check(v)?;
            }
        }
        Ok(LuzinFamily { field: raw.field, horizon: raw.horizon, generators: raw.generators })
    }
}

impl LuzinFamily {
    pub fn build(sources: &[Word], horizon: usize, cache: &mut SigmaStarCache) -> Result<Self, LuzinError> {
        let generators = sources
            .iter()
            .map(|f| Ok(Generator { source: f[..horizon.min(f.len())].to_vec(), values: luzin_vector(f, horizon, cache)? }))
            .collect::<Result<_, LuzinError>>()?;
        Ok(LuzinFamily { field: cache.field(), horizon, generators })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }
}

/// The default sources `f_i(n) = n + i` for `i < count`.
pub fn default_sources(count: usize, horizon: usize) -> Vec<Word> {
    (0..count).map(|i| (0..horizon as u64).map(|n| n + i as u64).collect()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub checked_constraints: usize,
    pub checked_tuples: u64,
}

/// Re-check the avoidance condition for `g` by brute force.
///
/// For every `n` the used index set is rebuilt by running over all words
/// `tau` in `m^{<=n}` and their starred versions, and every argument tuple
/// of every `phi_k` with `k < m = f(n)` is evaluated directly.
pub fn avoidance_audit(g: &[Scalar], f: &[u64], cache: &mut SigmaStarCache) -> Result<AuditReport, LuzinError> {
    if f.len() < g.len() {
        return Err(LuzinError::WordTooShort { len: f.len(), horizon: g.len() });
    }
    let mut report = AuditReport { checked_constraints: 0, checked_tuples: 0 };
    for (n, value) in g.iter().enumerate() {
        let m = f[n];
        let len = n + 1;
        let mut used = BTreeSet::new();
        for t in 0..=len {
            for tau in crate::predict::WordIter::new(vec![m; t]) {
                if !tau.is_empty() {
                    used.extend(cache.sigma_star(&tau)?);
                }
            }
        }
        let used: Vec<usize> = used.into_iter().collect();
        report.checked_constraints += 1;
        for k in 0..m as usize {
            let form = cache.form(k);
            let radices = vec![used.len() as u64; form.arity()];
            for tuple in crate::predict::WordIter::new(radices) {
                let idx: Vec<usize> = tuple.iter().map(|&t| used[t as usize]).collect();
                let args: Vec<Scalar> = idx.iter().map(|&l| cache.element(l)).collect();
                report.checked_tuples += 1;
                if form.eval(&args)? == *value {
                    return Err(LuzinError::AuditFailure { n, k, tuple: idx });
                }
            }
        }
    }
    Ok(report)
}
