//! Per-language colexification inference.
//!
//! The efficient routines index forms (or their affixes) in hash maps keyed
//! by the space-joined sound sequence. The `naive_*` routines compare every
//! form with every other form and serve as oracles.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::seqrel::{affix_relation_unchecked, candidate_slices, AffixKind, Thresholds};
use crate::wordlist::{join_segments, Form, Sound};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FullColexHit {
    pub concept_a: String,
    pub concept_b: String,
    /// Representative form (smallest id in the identity group carrying either concept).
    pub form: String,
    pub shared: Vec<Sound>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AffixColexHit {
    /// Concept whose form is the affix.
    pub source: String,
    /// Concept whose form contains the affix.
    pub target: String,
    pub affix_form: String,
    pub full_form: String,
    pub kind: AffixKind,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OverlapColexHit {
    pub concept_a: String,
    pub concept_b: String,
    pub form_a: String,
    pub form_b: String,
    pub shared: Vec<Sound>,
}

/// Affix key → (form position, kind) for every qualifying affix.
#[derive(Debug, Default)]
pub struct AffixIndex {
    entries: HashMap<String, Vec<(usize, AffixKind)>>,
}

impl AffixIndex {
    pub fn build(forms: &[&Form], thresholds: Thresholds) -> Self {
        let mut entries: HashMap<String, Vec<(usize, AffixKind)>> = HashMap::new();
        for (i, form) in forms.iter().enumerate() {
            for (affix, kind) in candidate_slices(&form.segments, thresholds) {
                entries
                    .entry(join_segments(affix))
                    .or_default()
                    .push((i, kind));
            }
        }
        AffixIndex { entries }
    }

    pub fn get(&self, key: &str) -> Option<&[(usize, AffixKind)]> {
        self.entries.get(key).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Keys ordered by decreasing sound count, then lexicographically.
    pub fn keys_longest_first(&self) -> Vec<&str> {
        let mut keys: Vec<(usize, &str)> = self
            .entries
            .keys()
            .map(|k| (k.split(' ').count(), k.as_str()))
            .collect();
        keys.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(b.1)));
        keys.into_iter().map(|(_, k)| k).collect()
    }
}

/// Full colexifications: identical segment sequences with diverging concepts.
pub fn infer_full(forms: &[&Form]) -> Vec<FullColexHit> {
    let mut groups: HashMap<String, Vec<&Form>> = HashMap::new();
    for form in forms {
        groups
            .entry(join_segments(&form.segments))
            .or_default()
            .push(form);
    }
    let mut hits = Vec::new();
    for group in groups.values() {
        let concepts: BTreeSet<&str> = group.iter().map(|f| f.concept.as_str()).collect();
        if concepts.len() < 2 {
            continue;
        }
        let concepts: Vec<&str> = concepts.into_iter().collect();
        for (i, a) in concepts.iter().enumerate() {
            for b in &concepts[i + 1..] {
                let form = group
                    .iter()
                    .filter(|f| f.concept == *a || f.concept == *b)
                    .map(|f| f.id.as_str())
                    .min()
                    .expect("both concepts occur in the group");
                hits.push(FullColexHit {
                    concept_a: a.to_string(),
                    concept_b: b.to_string(),
                    form: form.to_string(),
                    shared: group[0].segments.clone(),
                });
            }
        }
    }
    hits.sort();
    hits
}

/// Affix colexifications via the two-pass associative-array search.
pub fn infer_affix(forms: &[&Form], thresholds: Thresholds) -> Vec<AffixColexHit> {
    let index = AffixIndex::build(forms, thresholds);

    let mut order: Vec<usize> = (0..forms.len()).collect();
    order.sort_by(|&a, &b| {
        forms[b]
            .segments
            .len()
            .cmp(&forms[a].segments.len())
            .then_with(|| forms[a].id.cmp(&forms[b].id))
    });

    let mut hits = Vec::new();
    for i in order {
        let affix = forms[i];
        let Some(entries) = index.get(&join_segments(&affix.segments)) else {
            continue;
        };
        for &(j, kind) in entries {
            let full = forms[j];
            if full.concept == affix.concept || full.id == affix.id {
                continue;
            }
            hits.push(AffixColexHit {
                source: affix.concept.clone(),
                target: full.concept.clone(),
                affix_form: affix.id.clone(),
                full_form: full.id.clone(),
                kind,
            });
        }
    }
    hits.sort();
    hits
}

fn contains_as_affix(a: &[Sound], b: &[Sound]) -> bool {
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    long.starts_with(short) || long.ends_with(short)
}

fn overlap_hit(a: &Form, b: &Form, shared: Vec<Sound>) -> OverlapColexHit {
    let (a, b) = if a.concept <= b.concept {
        (a, b)
    } else {
        (b, a)
    };
    OverlapColexHit {
        concept_a: a.concept.clone(),
        concept_b: b.concept.clone(),
        form_a: a.id.clone(),
        form_b: b.id.clone(),
        shared,
    }
}

/// Overlap colexifications: both forms share a qualifying prefix or suffix
/// while neither is an affix of the other. Only the longest shared key is
/// kept per form pair.
pub fn infer_overlap(forms: &[&Form], thresholds: Thresholds) -> Vec<OverlapColexHit> {
    let index = AffixIndex::build(forms, thresholds);
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut hits = Vec::new();

    for key in index.keys_longest_first() {
        let entries = index.get(key).expect("key from index");
        if entries.len() < 2 {
            continue;
        }
        for (n, &(i, _)) in entries.iter().enumerate() {
            for &(j, _) in &entries[n + 1..] {
                if i == j {
                    continue;
                }
                // the exclusion rules depend only on the pair, so a pair is
                // settled the first time it is met
                if !seen.insert((i.min(j), i.max(j))) {
                    continue;
                }
                let (a, b) = (forms[i], forms[j]);
                if a.concept == b.concept
                    || a.segments == b.segments
                    || contains_as_affix(&a.segments, &b.segments)
                {
                    continue;
                }
                let shared = candidate_slices(&a.segments, thresholds)
                    .find(|(s, _)| join_segments(s) == key)
                    .map(|(s, _)| s.to_vec())
                    .expect("key is a candidate of every indexed form");
                hits.push(overlap_hit(a, b, shared));
            }
        }
    }
    hits.sort();
    hits
}

/// All-pairs affix search.
pub fn naive_affix(forms: &[&Form], thresholds: Thresholds) -> Vec<AffixColexHit> {
    let mut hits = Vec::new();
    for a in forms {
        for b in forms {
            if a.id == b.id || a.concept == b.concept {
                continue;
            }
            if !thresholds.qualifies(a.segments.len(), b.segments.len()) {
                continue;
            }
            for kind in [AffixKind::Prefix, AffixKind::Suffix] {
                let holds = match kind {
                    AffixKind::Prefix => b.segments.starts_with(&a.segments),
                    AffixKind::Suffix => b.segments.ends_with(&a.segments),
                };
                if holds {
                    hits.push(AffixColexHit {
                        source: a.concept.clone(),
                        target: b.concept.clone(),
                        affix_form: a.id.clone(),
                        full_form: b.id.clone(),
                        kind,
                    });
                }
            }
        }
    }
    hits.sort();
    hits
}

/// All-pairs overlap search. For each pair, affix lengths are tried from the
/// longest down; among equally long shared affixes the lexicographically
/// smallest key wins, matching the indexed key order.
pub fn naive_overlap(forms: &[&Form], thresholds: Thresholds) -> Vec<OverlapColexHit> {
    let mut hits = Vec::new();
    for (n, a) in forms.iter().enumerate() {
        for b in &forms[n + 1..] {
            if a.concept == b.concept
                || a.segments == b.segments
                || contains_as_affix(&a.segments, &b.segments)
            {
                continue;
            }
            if let Some(shared) = longest_shared_affix(&a.segments, &b.segments, thresholds) {
                hits.push(overlap_hit(a, b, shared.to_vec()));
            }
        }
    }
    hits.sort();
    hits
}

fn longest_shared_affix<'a>(
    a: &'a [Sound],
    b: &[Sound],
    thresholds: Thresholds,
) -> Option<&'a [Sound]> {
    let (ra, rb) = (thresholds.lengths(a.len()), thresholds.lengths(b.len()));
    let hi = (*ra.end()).min(*rb.end());
    let lo = (*ra.start()).max(*rb.start());
    for len in (lo..=hi).rev() {
        let ends_a = [&a[..len], &a[a.len() - len..]];
        let ends_b = [&b[..len], &b[b.len() - len..]];
        let best = ends_a
            .into_iter()
            .filter(|x| ends_b.contains(x))
            .min_by_key(|x| join_segments(x));
        if best.is_some() {
            return best;
        }
    }
    None
}

/// Replays the affix relation on a hit's stored forms.
pub fn affix_witness_holds(
    affix: &Form,
    full: &Form,
    kind: AffixKind,
    thresholds: Thresholds,
) -> bool {
    match affix_relation_unchecked(&affix.segments, &full.segments, thresholds) {
        Some(k) if k == kind => true,
        // prefix shadows suffix in the relation; check the suffix directly
        Some(AffixKind::Prefix) => {
            kind == AffixKind::Suffix && full.segments.ends_with(&affix.segments)
        }
        _ => false,
    }
}
