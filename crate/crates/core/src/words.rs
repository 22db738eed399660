//! Words in a free group `F_r`.
//!
//! A word is stored as a sequence of signed generator indices: `i > 0` is the
//! generator `X_i` and `-i` is its inverse. Parsing keeps the letters exactly
//! as written; free reduction is always an explicit call.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("unknown character {0:?} in word")]
    UnknownCharacter(char),
    #[error("generator index 0 is not allowed")]
    ZeroIndex,
    #[error("generator index {index} exceeds rank {rank}")]
    IndexExceedsRank { index: i64, rank: u32 },
    #[error("malformed bracketed word: {0}")]
    MalformedBrackets(String),
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(u32, u32),
    #[error("rank must be positive")]
    ZeroRank,
    #[error("cyclic normal form requires positive letters, found {0}")]
    NegativeLetter(i32),
    #[error("letter syntax supports at most 26 generators, got rank {0}")]
    LetterRankTooLarge(u32),
}

/// A word in the free group of rank `rank`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreeWord {
    rank: u32,
    letters: Vec<i32>,
}

impl FreeWord {
    /// Builds a word, checking that every letter is a nonzero index of size at most `rank`.
    pub fn new(letters: Vec<i32>, rank: u32) -> Result<Self, WordError> {
        if rank == 0 {
            return Err(WordError::ZeroRank);
        }
        for &l in &letters {
            if l == 0 {
                return Err(WordError::ZeroIndex);
            }
            if l.unsigned_abs() > rank {
                return Err(WordError::IndexExceedsRank {
                    index: l as i64,
                    rank,
                });
            }
        }
        Ok(FreeWord { rank, letters })
    }

    pub fn empty(rank: u32) -> Self {
        FreeWord {
            rank,
            letters: Vec::new(),
        }
    }

    /// The single-letter word `X_i`.
    pub fn generator(i: u32, rank: u32) -> Result<Self, WordError> {
        FreeWord::new(vec![i as i32], rank)
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Same letters, viewed in a free group of larger (or equal) rank.
    pub fn with_rank(&self, rank: u32) -> Result<Self, WordError> {
        FreeWord::new(self.letters.clone(), rank)
    }

    pub fn is_freely_reduced(&self) -> bool {
        self.letters.windows(2).all(|p| p[0] != -p[1])
    }

    pub fn invert(&self) -> FreeWord {
        FreeWord {
            rank: self.rank,
            letters: invert_letters(&self.letters),
        }
    }

    pub fn free_reduce(&self) -> FreeWord {
        FreeWord {
            rank: self.rank,
            letters: free_reduce_letters(&self.letters),
        }
    }

    /// Concatenates and freely reduces.
    pub fn concat(&self, other: &FreeWord) -> Result<FreeWord, WordError> {
        if self.rank != other.rank {
            return Err(WordError::RankMismatch(self.rank, other.rank));
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(FreeWord {
            rank: self.rank,
            letters: free_reduce_letters(&letters),
        })
    }

    /// Rotation by `k` positions to the left.
    pub fn rotate(&self, k: usize) -> FreeWord {
        let mut letters = self.letters.clone();
        if !letters.is_empty() {
            let k = k % letters.len();
            letters.rotate_left(k);
        }
        FreeWord {
            rank: self.rank,
            letters,
        }
    }

    /// The lexicographically least rotation of a positive word.
    pub fn cyclic_min(&self) -> Result<FreeWord, WordError> {
        if let Some(&l) = self.letters.iter().find(|&&l| l < 0) {
            return Err(WordError::NegativeLetter(l));
        }
        Ok(FreeWord {
            rank: self.rank,
            letters: min_rotation(&self.letters),
        })
    }

    pub fn degree(&self) -> DegreeVector {
        DegreeVector::of_letters(&self.letters, self.rank)
    }

    /// Renders the word in letter syntax (`a..z`, uppercase for inverses).
    pub fn to_letter_string(&self) -> Result<String, WordError> {
        if self.rank > 26 {
            return Err(WordError::LetterRankTooLarge(self.rank));
        }
        Ok(self
            .letters
            .iter()
            .map(|&l| {
                let c = (b'a' + (l.unsigned_abs() - 1) as u8) as char;
                if l < 0 {
                    c.to_ascii_uppercase()
                } else {
                    c
                }
            })
            .collect())
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "]")
    }
}

/// Abelianized exponents of a word together with their parities.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DegreeVector {
    entries: Vec<i64>,
    mod2: Vec<bool>,
}

impl DegreeVector {
    pub fn zero(rank: u32) -> Self {
        DegreeVector::from_entries(vec![0; rank as usize])
    }

    pub fn from_entries(entries: Vec<i64>) -> Self {
        let mod2 = entries.iter().map(|e| e.rem_euclid(2) == 1).collect();
        DegreeVector { entries, mod2 }
    }

    fn of_letters(letters: &[i32], rank: u32) -> Self {
        let mut entries = vec![0i64; rank as usize];
        for &l in letters {
            let k = l.unsigned_abs() as usize - 1;
            entries[k] += l.signum() as i64;
        }
        DegreeVector::from_entries(entries)
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn mod2(&self) -> &[bool] {
        &self.mod2
    }
}

impl std::ops::Add for &DegreeVector {
    type Output = DegreeVector;

    fn add(self, rhs: &DegreeVector) -> DegreeVector {
        let n = self.entries.len().max(rhs.entries.len());
        let entries = (0..n)
            .map(|k| self.entries.get(k).unwrap_or(&0) + rhs.entries.get(k).unwrap_or(&0))
            .collect();
        DegreeVector::from_entries(entries)
    }
}

pub(crate) fn invert_letters(letters: &[i32]) -> Vec<i32> {
    letters.iter().rev().map(|l| -l).collect()
}

pub(crate) fn free_reduce_letters(letters: &[i32]) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::with_capacity(letters.len());
    for &l in letters {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// Earliest lexicographically least rotation.
pub(crate) fn min_rotation(letters: &[i32]) -> Vec<i32> {
    let n = letters.len();
    if n == 0 {
        return Vec::new();
    }
    let mut best = 0;
    for k in 1..n {
        let better = (0..n)
            .map(|i| letters[(k + i) % n].cmp(&letters[(best + i) % n]))
            .find(|c| c.is_ne())
            .is_some_and(|c| c.is_lt());
        if better {
            best = k;
        }
    }
    let mut out = letters.to_vec();
    out.rotate_left(best);
    out
}

/// Parses a word in letter syntax (`aabbaaBaB`), bracketed integer syntax
/// (`[1,2,-3,1]`) or the `Word[...]` form.
pub fn parse_word(text: &str, rank: u32) -> Result<FreeWord, WordError> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return FreeWord::new(Vec::new(), rank);
    }
    let bracketed = trimmed
        .strip_prefix("Word")
        .map(str::trim_start)
        .unwrap_or(trimmed);
    if bracketed.starts_with('[') || trimmed.starts_with("Word") {
        return parse_bracketed(bracketed, rank);
    }
    parse_letters(trimmed, rank)
}

fn parse_bracketed(text: &str, rank: u32) -> Result<FreeWord, WordError> {
    let inner = text
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| WordError::MalformedBrackets(text.to_string()))?;
    if inner.contains('[') || inner.contains(']') {
        return Err(WordError::MalformedBrackets(text.to_string()));
    }
    let mut letters = Vec::new();
    if !inner.trim().is_empty() {
        for part in inner.split(',') {
            let part = part.trim();
            let value: i64 = part
                .parse()
                .map_err(|_| WordError::MalformedBrackets(text.to_string()))?;
            if value == 0 {
                return Err(WordError::ZeroIndex);
            }
            if value.unsigned_abs() > rank as u64 {
                return Err(WordError::IndexExceedsRank { index: value, rank });
            }
            letters.push(value as i32);
        }
    }
    FreeWord::new(letters, rank)
}

fn parse_letters(text: &str, rank: u32) -> Result<FreeWord, WordError> {
    let mut letters = Vec::with_capacity(text.len());
    for c in text.chars() {
        if c.is_whitespace() {
            continue;
        }
        if !c.is_ascii_alphabetic() {
            return Err(WordError::UnknownCharacter(c));
        }
        let index = (c.to_ascii_lowercase() as u8 - b'a') as i64 + 1;
        if index > rank as i64 {
            return Err(WordError::IndexExceedsRank { index, rank });
        }
        letters.push(if c.is_ascii_uppercase() {
            -(index as i32)
        } else {
            index as i32
        });
    }
    FreeWord::new(letters, rank)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(letters: &[i32], rank: u32) -> FreeWord {
        FreeWord::new(letters.to_vec(), rank).unwrap()
    }

    #[test]
    fn parses_all_three_syntaxes() {
        assert_eq!(
            parse_word("Word[1,2,-3,1]", 3).unwrap(),
            w(&[1, 2, -3, 1], 3)
        );
        assert_eq!(parse_word("[1, 2,-3 ,1]", 3).unwrap(), w(&[1, 2, -3, 1], 3));
        assert_eq!(
            parse_word("aabbaaBaB", 2).unwrap(),
            w(&[1, 1, 2, 2, 1, 1, -2, 1, -2], 2)
        );
        assert_eq!(parse_word("", 2).unwrap(), FreeWord::empty(2));
        assert_eq!(parse_word("Word[]", 2).unwrap(), FreeWord::empty(2));
    }

    #[test]
    fn parse_keeps_letters_verbatim() {
        assert_eq!(parse_word("aA", 1).unwrap().letters(), &[1, -1]);
    }

    #[test]
    fn parse_errors() {
        assert_eq!(parse_word("ab1", 2), Err(WordError::UnknownCharacter('1')));
        assert_eq!(parse_word("[1,0]", 2), Err(WordError::ZeroIndex));
        assert!(matches!(
            parse_word("abc", 2),
            Err(WordError::IndexExceedsRank { index: 3, rank: 2 })
        ));
        assert!(matches!(
            parse_word("[1,-5]", 4),
            Err(WordError::IndexExceedsRank { .. })
        ));
        assert!(matches!(
            parse_word("[1,2", 2),
            Err(WordError::MalformedBrackets(_))
        ));
        assert!(matches!(
            parse_word("Word[1,[2]]", 2),
            Err(WordError::MalformedBrackets(_))
        ));
    }

    #[test]
    fn inversion() {
        assert_eq!(w(&[1, 2], 2).invert(), w(&[-2, -1], 2));
        assert_eq!(FreeWord::empty(1).invert(), FreeWord::empty(1));
        assert_eq!(w(&[1, -3, 2], 3).invert(), w(&[-2, 3, -1], 3));
    }

    #[test]
    fn free_reduction() {
        assert!(w(&[1, -1], 1).free_reduce().is_empty());
        assert_eq!(w(&[1, 2, -2, -1, 3], 3).free_reduce(), w(&[3], 3));
        assert_eq!(w(&[1, 2, 3], 3).free_reduce(), w(&[1, 2, 3], 3));
    }

    #[test]
    fn concatenation() {
        assert_eq!(w(&[1, 2], 2).concat(&w(&[-2], 2)).unwrap(), w(&[1], 2));
        assert_eq!(FreeWord::empty(3).concat(&w(&[3], 3)).unwrap(), w(&[3], 3));
        assert_eq!(w(&[1], 1).concat(&w(&[1], 1)).unwrap(), w(&[1, 1], 1));
        assert_eq!(
            w(&[1], 1).concat(&w(&[1], 2)),
            Err(WordError::RankMismatch(1, 2))
        );
    }

    #[test]
    fn cyclic_minimum() {
        assert_eq!(w(&[2, 1], 2).cyclic_min().unwrap(), w(&[1, 2], 2));
        assert_eq!(w(&[3, 1, 2], 3).cyclic_min().unwrap(), w(&[1, 2, 3], 3));
        assert_eq!(w(&[1, 3, 2], 3).cyclic_min().unwrap(), w(&[1, 3, 2], 3));
        assert_eq!(
            w(&[1, -2], 2).cyclic_min(),
            Err(WordError::NegativeLetter(-2))
        );
    }

    #[test]
    fn degrees() {
        let d = w(&[1, 2, -1, -2], 2).degree();
        assert_eq!(d.entries(), &[0, 0]);
        assert_eq!(d.mod2(), &[false, false]);
        let d = w(&[1, 1, 2], 2).degree();
        assert_eq!(d.entries(), &[2, 1]);
        assert_eq!(d.mod2(), &[false, true]);
        let d = w(&[-3], 3).degree();
        assert_eq!(d.entries(), &[0, 0, -1]);
        assert_eq!(d.mod2(), &[false, false, true]);
    }

    #[test]
    fn letter_rendering() {
        assert_eq!(w(&[1, -2, 3], 3).to_letter_string().unwrap(), "aBc");
        assert!(FreeWord::empty(27).to_letter_string().is_err());
    }
}
