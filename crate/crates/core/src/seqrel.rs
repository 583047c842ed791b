//! Relations between sound sequences.
//!
//! All functions are generic over the token type so that they can be used
//! with [`Sound`](crate::wordlist::Sound) slices as well as plain characters.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeqRelError {
    #[error("sequence relations are undefined for empty sequences")]
    EmptySequence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AffixKind {
    Prefix,
    Suffix,
}

impl AffixKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AffixKind::Prefix => "prefix",
            AffixKind::Suffix => "suffix",
        }
    }
}

/// Length thresholds, measured in sounds.
///
/// An affix of a word qualifies iff `len(affix) > affix` and
/// `len(word) - len(affix) > remainder`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Thresholds {
    pub affix: usize,
    pub remainder: usize,
}

impl Thresholds {
    /// Defaults for affix colexification search.
    pub const AFFIX: Thresholds = Thresholds {
        affix: 2,
        remainder: 2,
    };
    /// Defaults for overlap colexification search.
    pub const OVERLAP: Thresholds = Thresholds {
        affix: 4,
        remainder: 3,
    };

    pub const fn new(affix: usize, remainder: usize) -> Self {
        Thresholds { affix, remainder }
    }

    #[inline]
    pub fn qualifies(&self, affix_len: usize, word_len: usize) -> bool {
        affix_len > self.affix && affix_len < word_len && word_len - affix_len > self.remainder
    }

    /// Range of affix lengths that qualify for a word of `word_len` sounds.
    pub fn lengths(&self, word_len: usize) -> std::ops::RangeInclusive<usize> {
        let lo = self.affix + 1;
        let hi = word_len.saturating_sub(self.remainder + 1);
        lo..=hi
    }
}

fn non_empty<T>(a: &[T], b: &[T]) -> Result<(), SeqRelError> {
    if a.is_empty() || b.is_empty() {
        Err(SeqRelError::EmptySequence)
    } else {
        Ok(())
    }
}

/// True iff `a` occurs as a contiguous run inside `b`.
pub fn is_part_of<T: PartialEq>(a: &[T], b: &[T]) -> Result<bool, SeqRelError> {
    non_empty(a, b)?;
    Ok(a.len() <= b.len() && b.windows(a.len()).any(|w| w == a))
}

/// One longest common contiguous run of `a` and `b`. Ties go to the
/// candidate that starts earliest in `a`.
pub fn longest_common_substring<T: PartialEq + Clone>(
    a: &[T],
    b: &[T],
) -> Result<Vec<T>, SeqRelError> {
    non_empty(a, b)?;
    // run[j] = length of the common run ending at a[i-1], b[j-1]
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    let (mut best_len, mut best_start) = (0usize, 0usize);
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            cur[j] = if a[i - 1] == b[j - 1] {
                prev[j - 1] + 1
            } else {
                0
            };
            let start = i - cur[j];
            if cur[j] > best_len || (cur[j] == best_len && cur[j] > 0 && start < best_start) {
                best_len = cur[j];
                best_start = start;
            }
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    Ok(a[best_start..best_start + best_len].to_vec())
}

/// Whether `a` is a qualifying prefix or suffix of `b`. Prefix wins if both hold.
pub fn affix_relation<T: PartialEq>(
    a: &[T],
    b: &[T],
    thresholds: Thresholds,
) -> Result<Option<AffixKind>, SeqRelError> {
    non_empty(a, b)?;
    Ok(affix_relation_unchecked(a, b, thresholds))
}

pub(crate) fn affix_relation_unchecked<T: PartialEq>(
    a: &[T],
    b: &[T],
    thresholds: Thresholds,
) -> Option<AffixKind> {
    if !thresholds.qualifies(a.len(), b.len()) {
        None
    } else if b.starts_with(a) {
        Some(AffixKind::Prefix)
    } else if b.ends_with(a) {
        Some(AffixKind::Suffix)
    } else {
        None
    }
}

/// True iff `affix` is a qualifying prefix or suffix of `word`.
pub fn is_qualifying_affix<T: PartialEq>(affix: &[T], word: &[T], thresholds: Thresholds) -> bool {
    thresholds.qualifies(affix.len(), word.len())
        && (word.starts_with(affix) || word.ends_with(affix))
}

/// Every qualifying prefix (longest first), then every qualifying suffix
/// (longest first).
pub fn affix_candidates<T: Clone>(
    segments: &[T],
    thresholds: Thresholds,
) -> Result<Vec<(Vec<T>, AffixKind)>, SeqRelError> {
    if segments.is_empty() {
        return Err(SeqRelError::EmptySequence);
    }
    Ok(candidate_slices(segments, thresholds)
        .map(|(s, k)| (s.to_vec(), k))
        .collect())
}

pub(crate) fn candidate_slices<T>(
    segments: &[T],
    thresholds: Thresholds,
) -> impl Iterator<Item = (&[T], AffixKind)> {
    let n = segments.len();
    let lengths = thresholds.lengths(n);
    let prefixes = lengths
        .clone()
        .rev()
        .map(move |l| (&segments[..l], AffixKind::Prefix));
    let suffixes = lengths
        .rev()
        .map(move |l| (&segments[n - l..], AffixKind::Suffix));
    prefixes.chain(suffixes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn chars(s: &str) -> Vec<char> {
        s.chars().collect()
    }

    fn tokens(s: &str) -> Vec<String> {
        s.split(' ').map(str::to_string).collect()
    }

    #[test]
    fn part_of() {
        assert!(is_part_of(&chars("ABC"), &chars("XYABCD")).unwrap());
        assert!(is_part_of(&chars("ABC"), &chars("ABC")).unwrap());
        assert!(!is_part_of(&chars("XYABCD"), &chars("ABC")).unwrap());
        assert_eq!(
            is_part_of::<char>(&[], &chars("ABC")),
            Err(SeqRelError::EmptySequence)
        );
    }

    #[test]
    fn lcs_examples() {
        assert_eq!(
            longest_common_substring(&chars("XYABCD"), &chars("ZABCEF")).unwrap(),
            chars("ABC")
        );
        assert_eq!(
            longest_common_substring(&chars("ABC"), &chars("ABC")).unwrap(),
            chars("ABC")
        );
        assert!(longest_common_substring(&chars("AB"), &chars("CD"))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn lcs_tie_break_earliest_in_first() {
        // "AB" and "CD" both have length 2; "AB" starts first in a.
        assert_eq!(
            longest_common_substring(&chars("ABxCD"), &chars("CDyAB")).unwrap(),
            chars("AB")
        );
    }

    #[test]
    fn affix_relation_examples() {
        let hand = tokens("h a n t");
        let glove = tokens("h a n t ʃ uː");
        let shoe = tokens("ʃ uː");
        let t11 = Thresholds::new(1, 1);
        assert_eq!(
            affix_relation(&hand, &glove, t11).unwrap(),
            Some(AffixKind::Prefix)
        );
        assert_eq!(
            affix_relation(&shoe, &glove, t11).unwrap(),
            Some(AffixKind::Suffix)
        );
        assert_eq!(
            affix_relation(&hand, &glove, Thresholds::AFFIX).unwrap(),
            None
        );
        assert_eq!(
            affix_relation(&hand, &hand, Thresholds::new(0, 0)).unwrap(),
            None
        );
    }

    #[test]
    fn affix_relation_prefers_prefix() {
        let a = chars("abc");
        let b = chars("abcXabc");
        assert_eq!(
            affix_relation(&a, &b, Thresholds::new(1, 1)).unwrap(),
            Some(AffixKind::Prefix)
        );
    }

    #[test]
    fn candidate_examples() {
        let glove = tokens("h a n t ʃ uː");
        assert_eq!(
            affix_candidates(&glove, Thresholds::AFFIX).unwrap(),
            vec![
                (tokens("h a n"), AffixKind::Prefix),
                (tokens("t ʃ uː"), AffixKind::Suffix)
            ]
        );
        assert!(affix_candidates(&tokens("a b"), Thresholds::AFFIX)
            .unwrap()
            .is_empty());
        let got = affix_candidates(&chars("xyabcd"), Thresholds::new(1, 1)).unwrap();
        let expected: Vec<_> = [
            ("xyab", AffixKind::Prefix),
            ("xya", AffixKind::Prefix),
            ("xy", AffixKind::Prefix),
            ("abcd", AffixKind::Suffix),
            ("bcd", AffixKind::Suffix),
            ("cd", AffixKind::Suffix),
        ]
        .iter()
        .map(|(s, k)| (chars(s), *k))
        .collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn palindromic_candidate_listed_twice() {
        let got = affix_candidates(&chars("abXab"), Thresholds::new(1, 1)).unwrap();
        assert!(got.contains(&(chars("ab"), AffixKind::Prefix)));
        assert!(got.contains(&(chars("ab"), AffixKind::Suffix)));
    }

    fn brute_force_candidates(s: &[u8], t: Thresholds) -> Vec<(Vec<u8>, AffixKind)> {
        let n = s.len();
        let mut out = Vec::new();
        for l in 0..=n {
            let ok = l > t.affix && n >= l && n - l > t.remainder;
            if ok {
                out.push((s[..l].to_vec(), AffixKind::Prefix));
                out.push((s[n - l..].to_vec(), AffixKind::Suffix));
            }
        }
        out.sort();
        out
    }

    fn seq() -> impl Strategy<Value = Vec<u8>> {
        proptest::collection::vec(0u8..3, 1..12)
    }

    proptest! {
        #[test]
        fn part_of_implies_shorter(a in seq(), b in seq()) {
            if is_part_of(&a, &b).unwrap() {
                prop_assert!(a.len() <= b.len());
            }
        }

        #[test]
        fn affix_implies_part_of(a in seq(), b in seq(), ta in 0usize..4, tr in 0usize..4) {
            if affix_relation(&a, &b, Thresholds::new(ta, tr)).unwrap().is_some() {
                prop_assert!(is_part_of(&a, &b).unwrap());
            }
        }

        #[test]
        fn candidates_match_brute_force(s in seq(), ta in 0usize..5, tr in 0usize..5) {
            let t = Thresholds::new(ta, tr);
            let mut got = affix_candidates(&s, t).unwrap();
            for (key, _) in &got {
                prop_assert!(t.qualifies(key.len(), s.len()));
            }
            got.sort();
            prop_assert_eq!(got, brute_force_candidates(&s, t));
        }

        #[test]
        fn raising_thresholds_never_adds(s in seq(), ta in 0usize..5, tr in 0usize..5, da in 0usize..3, dr in 0usize..3) {
            let low = affix_candidates(&s, Thresholds::new(ta, tr)).unwrap();
            let high = affix_candidates(&s, Thresholds::new(ta + da, tr + dr)).unwrap();
            prop_assert!(high.iter().all(|c| low.contains(c)));
        }

        #[test]
        fn lcs_length_symmetric(a in seq(), b in seq()) {
            let ab = longest_common_substring(&a, &b).unwrap();
            let ba = longest_common_substring(&b, &a).unwrap();
            prop_assert_eq!(ab.len(), ba.len());
            if !ab.is_empty() {
                prop_assert!(is_part_of(&ab, &a).unwrap() && is_part_of(&ab, &b).unwrap());
            }
        }
    }
}
