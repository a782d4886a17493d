use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::PredictError;

/// A finite word of naturals. Positions are indices into the vector.
pub type Word = Vec<u64>;

/// The bound at one coordinate: a natural `b >= 2` (entries range over `0..b`) or no bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bound {
    Nat(u64),
    Unbounded,
}

impl Bound {
    pub fn nat(b: u64) -> Result<Self, PredictError> {
        if b >= 2 {
            Ok(Bound::Nat(b))
        } else {
            Err(PredictError::BadBound(b))
        }
    }

    pub fn admits(self, v: u64) -> bool {
        match self {
            Bound::Nat(b) => v < b,
            Bound::Unbounded => true,
        }
    }

    pub fn as_nat(self) -> Option<u64> {
        match self {
            Bound::Nat(b) => Some(b),
            Bound::Unbounded => None,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Nat(b) => write!(f, "{b}"),
            Bound::Unbounded => write!(f, "unbounded"),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawBound {
    Nat(u64),
    Word(String),
}

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Bound::Nat(b) => RawBound::Nat(*b),
            Bound::Unbounded => RawBound::Word("unbounded".into()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Bound {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match RawBound::deserialize(d)? {
            RawBound::Nat(b) => Bound::nat(b).map_err(serde::de::Error::custom),
            RawBound::Word(w) if w == "unbounded" => Ok(Bound::Unbounded),
            RawBound::Word(w) => Err(serde::de::Error::custom(format!("bad bound `{w}`"))),
        }
    }
}

/// Per-coordinate bounds of a product space, truncated at the horizon.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct SpaceSpec {
    bounds: Vec<Bound>,
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    bounds: Vec<Bound>,
    horizon: usize,
}

impl TryFrom<RawSpec> for SpaceSpec {
    type Error = PredictError;
    fn try_from(raw: RawSpec) -> Result<Self, Self::Error> {
        if raw.bounds.len() != raw.horizon {
            return Err(PredictError::HorizonMismatch { bounds: raw.bounds.len(), horizon: raw.horizon });
        }
        Ok(SpaceSpec { bounds: raw.bounds })
    }
}

impl From<SpaceSpec> for RawSpec {
    fn from(s: SpaceSpec) -> Self {
        RawSpec { horizon: s.bounds.len(), bounds: s.bounds }
    }
}

impl SpaceSpec {
    pub fn new(bounds: Vec<Bound>) -> Self {
        SpaceSpec { bounds }
    }

    /// All coordinates bounded by the given naturals.
    pub fn bounded(bounds: &[u64]) -> Result<Self, PredictError> {
        Ok(SpaceSpec { bounds: bounds.iter().map(|&b| Bound::nat(b)).collect::<Result<_, _>>()? })
    }

    pub fn uniform(bound: u64, horizon: usize) -> Result<Self, PredictError> {
        Ok(SpaceSpec { bounds: vec![Bound::nat(bound)?; horizon] })
    }

    pub fn unbounded(horizon: usize) -> Self {
        SpaceSpec { bounds: vec![Bound::Unbounded; horizon] }
    }

    pub fn horizon(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[Bound] {
        &self.bounds
    }

    pub fn bound(&self, n: usize) -> Option<Bound> {
        self.bounds.get(n).copied()
    }

    /// Whether `w` is a word of the prefix space: length within the horizon and
    /// every entry below its bound.
    pub fn contains(&self, w: &[u64]) -> bool {
        w.len() <= self.horizon() && w.iter().zip(&self.bounds).all(|(&v, b)| b.admits(v))
    }

    pub fn check_word(&self, w: &[u64]) -> Result<(), PredictError> {
        if self.contains(w) {
            Ok(())
        } else {
            Err(PredictError::WordOutsideSpace { word: w.to_vec() })
        }
    }

    /// Number of words of length `n`, if every coordinate below `n` is bounded.
    pub fn count_words(&self, n: usize) -> Option<u128> {
        self.bounds[..n].iter().try_fold(1u128, |acc, b| b.as_nat().and_then(|b| acc.checked_mul(b as u128)))
    }

    /// Mixed-radix index of `w` among the words of its length (`w[0]` least significant).
    pub fn word_index(&self, w: &[u64]) -> Option<usize> {
        let mut idx = 0usize;
        let mut scale = 1usize;
        for (i, &v) in w.iter().enumerate() {
            let b = self.bounds.get(i)?.as_nat()?;
            if v >= b {
                return None;
            }
            idx = idx.checked_add((v as usize).checked_mul(scale)?)?;
            scale = scale.checked_mul(b as usize)?;
        }
        Some(idx)
    }

    /// All words of length `n`, in mixed-radix order. `None` if some coordinate is unbounded.
    pub fn words(&self, n: usize) -> Option<WordIter> {
        let radices: Vec<u64> = self.bounds[..n].iter().map(|b| b.as_nat()).collect::<Option<_>>()?;
        Some(WordIter::new(radices))
    }
}

/// Iterator over all words with entries below the given radices, first entry fastest.
#[derive(Debug, Clone)]
pub struct WordIter {
    radices: Vec<u64>,
    next: Option<Word>,
}

impl WordIter {
    pub fn new(radices: Vec<u64>) -> Self {
        let next = if radices.iter().any(|&r| r == 0) { None } else { Some(vec![0; radices.len()]) };
        WordIter { radices, next }
    }
}

impl Iterator for WordIter {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        let mut carry = true;
        for (v, &r) in succ.iter_mut().zip(&self.radices) {
            *v += 1;
            if *v < r {
                carry = false;
                break;
            }
            *v = 0;
        }
        if !carry {
            self.next = Some(succ);
        }
        Some(cur)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership() {
        let s = SpaceSpec::new(vec![Bound::Nat(2), Bound::Unbounded, Bound::Nat(3)]);
        assert!(s.contains(&[1, 99, 2]));
        assert!(s.contains(&[1]));
        assert!(!s.contains(&[2]));
        assert!(!s.contains(&[0, 0, 0, 0]));
        assert_eq!(Bound::nat(1), Err(PredictError::BadBound(1)));
    }

    #[test]
    fn word_enumeration_matches_index() {
        let s = SpaceSpec::bounded(&[2, 3, 2]).unwrap();
        let all: Vec<Word> = s.words(3).unwrap().collect();
        assert_eq!(all.len(), 12);
        for (i, w) in all.iter().enumerate() {
            assert_eq!(s.word_index(w), Some(i));
        }
        assert_eq!(s.words(0).unwrap().collect::<Vec<_>>(), vec![Vec::<u64>::new()]);
        assert!(SpaceSpec::unbounded(2).words(1).is_none());
    }

    #[test]
    fn spec_json() {
        let s = SpaceSpec::new(vec![Bound::Nat(2), Bound::Unbounded]);
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"{"bounds":[2,"unbounded"],"horizon":2}"#);
        assert_eq!(serde_json::from_str::<SpaceSpec>(&j).unwrap(), s);
        assert!(serde_json::from_str::<SpaceSpec>(r#"{"bounds":[1],"horizon":1}"#).is_err());
        assert!(serde_json::from_str::<SpaceSpec>(r#"{"bounds":[2],"horizon":3}"#).is_err());
    }
}
