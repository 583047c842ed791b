//! Colexification networks aggregated over languages.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::infer::{AffixColexHit, FullColexHit, OverlapColexHit};
use crate::seqrel::{AffixKind, Thresholds};
use crate::wordlist::{Form, Sound, Wordlist};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NetworkError {
    #[error("integrity error: {0}")]
    Integrity(String),
}

fn integrity(msg: impl Into<String>) -> NetworkError {
    NetworkError::Integrity(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NetworkKind {
    Full,
    Affix,
    Overlap,
}

impl NetworkKind {
    pub const ALL: [NetworkKind; 3] = [NetworkKind::Full, NetworkKind::Affix, NetworkKind::Overlap];

    pub fn is_directed(self) -> bool {
        self == NetworkKind::Affix
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NetworkKind::Full => "full",
            NetworkKind::Affix => "affix",
            NetworkKind::Overlap => "overlap",
        }
    }

    pub fn default_thresholds(self) -> Option<Thresholds> {
        match self {
            NetworkKind::Full => None,
            NetworkKind::Affix => Some(Thresholds::AFFIX),
            NetworkKind::Overlap => Some(Thresholds::OVERLAP),
        }
    }
}

impl fmt::Display for NetworkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NetworkKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full" => Ok(NetworkKind::Full),
            "affix" => Ok(NetworkKind::Affix),
            "overlap" => Ok(NetworkKind::Overlap),
            other => Err(format!("unknown network kind {other:?}")),
        }
    }
}

/// Which per-edge count serves as the edge weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum WeightField {
    #[default]
    Language,
    Family,
    Pairs,
}

impl WeightField {
    pub fn as_str(self) -> &'static str {
        match self {
            WeightField::Language => "language",
            WeightField::Family => "family",
            WeightField::Pairs => "pairs",
        }
    }
}

impl FromStr for WeightField {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "language" | "language_count" => Ok(WeightField::Language),
            "family" | "family_count" => Ok(WeightField::Family),
            "pairs" | "pair_count" => Ok(WeightField::Pairs),
            other => Err(format!("unknown weight field {other:?}")),
        }
    }
}

/// One concrete attestation of an edge in one language.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Witness {
    pub forms: Vec<String>,
    pub shared: Vec<Sound>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<AffixKind>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeEvidence {
    pub language: String,
    pub family: String,
    pub witnesses: Vec<Witness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColexEdge {
    pub source: String,
    pub target: String,
    pub language_count: usize,
    pub family_count: usize,
    pub pair_count: usize,
    pub evidence: Vec<EdgeEvidence>,
}

impl ColexEdge {
    /// Builds an edge whose counts are derived from its evidence.
    pub fn from_evidence(source: String, target: String, mut evidence: Vec<EdgeEvidence>) -> Self {
        evidence.sort_by(|a, b| a.language.cmp(&b.language));
        for e in &mut evidence {
            e.witnesses.sort();
        }
        let families: BTreeSet<&str> = evidence.iter().map(|e| e.family.as_str()).collect();
        ColexEdge {
            language_count: evidence.len(),
            family_count: families.len(),
            pair_count: evidence.iter().map(|e| e.witnesses.len()).sum(),
            source,
            target,
            evidence,
        }
    }

    pub fn weight(&self, field: WeightField) -> usize {
        match field {
            WeightField::Language => self.language_count,
            WeightField::Family => self.family_count,
            WeightField::Pairs => self.pair_count,
        }
    }

    pub fn endpoints(&self) -> (&str, &str) {
        (&self.source, &self.target)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeAnnotation {
    pub gloss: String,
    pub form_count: usize,
    pub family_count: usize,
    /// Language id → form values expressing the concept.
    pub forms: BTreeMap<String, Vec<String>>,
}

/// Parameters that shaped a network.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkParams {
    pub thresholds: Option<Thresholds>,
    pub min_families: usize,
    pub min_languages: usize,
}

impl Default for NetworkParams {
    fn default() -> Self {
        NetworkParams {
            thresholds: None,
            min_families: 1,
            min_languages: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColexNetwork {
    pub kind: NetworkKind,
    pub directed: bool,
    pub params: NetworkParams,
    pub nodes: BTreeMap<String, NodeAnnotation>,
    /// Sorted by (source, target); undirected edges have source < target.
    pub edges: Vec<ColexEdge>,
}

impl ColexNetwork {
    /// Assembles a network from parts and checks every structural invariant.
    pub fn from_parts(
        kind: NetworkKind,
        params: NetworkParams,
        nodes: BTreeMap<String, NodeAnnotation>,
        mut edges: Vec<ColexEdge>,
    ) -> Result<Self, NetworkError> {
        edges.sort_by(|a, b| a.endpoints().cmp(&b.endpoints()));
        let network = ColexNetwork {
            kind,
            directed: kind.is_directed(),
            params,
            nodes,
            edges,
        };
        network.validate()?;
        Ok(network)
    }

    pub fn validate(&self) -> Result<(), NetworkError> {
        if self.directed != self.kind.is_directed() {
            return Err(integrity(format!(
                "{} network has directed = {}",
                self.kind, self.directed
            )));
        }
        let mut previous: Option<(&str, &str)> = None;
        for edge in &self.edges {
            let (s, t) = edge.endpoints();
            if s == t {
                return Err(integrity(format!("self-loop on {s:?}")));
            }
            if !self.directed && s > t {
                return Err(integrity(format!(
                    "undirected edge {s:?}-{t:?} is not canonical"
                )));
            }
            for end in [s, t] {
                if !self.nodes.contains_key(end) {
                    return Err(integrity(format!("edge endpoint {end:?} has no node")));
                }
            }
            if let Some(prev) = previous {
                if prev >= (s, t) {
                    return Err(integrity(format!(
                        "edge {s:?}-{t:?} is duplicated or out of order"
                    )));
                }
            }
            previous = Some((s, t));
            let families: BTreeSet<&str> =
                edge.evidence.iter().map(|e| e.family.as_str()).collect();
            let languages: BTreeSet<&str> =
                edge.evidence.iter().map(|e| e.language.as_str()).collect();
            let pairs: usize = edge.evidence.iter().map(|e| e.witnesses.len()).sum();
            if edge.evidence.iter().any(|e| e.witnesses.is_empty()) {
                return Err(integrity(format!(
                    "edge {s:?}-{t:?} has evidence without witnesses"
                )));
            }
            if languages.len() != edge.evidence.len()
                || edge.language_count != languages.len()
                || edge.family_count != families.len()
                || edge.pair_count != pairs
                || edge.family_count == 0
                || edge.language_count < edge.family_count
            {
                return Err(integrity(format!(
                    "edge {s:?}-{t:?} counts disagree with its evidence"
                )));
            }
        }
        Ok(())
    }

    pub fn edge(&self, source: &str, target: &str) -> Option<&ColexEdge> {
        let key = if self.directed || source <= target {
            (source, target)
        } else {
            (target, source)
        };
        self.edges
            .binary_search_by(|e| e.endpoints().cmp(&key))
            .ok()
            .map(|i| &self.edges[i])
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Distinct languages and families over all edge evidence.
    pub fn attested_languages_and_families(&self) -> (usize, usize) {
        let mut languages = BTreeSet::new();
        let mut families = BTreeSet::new();
        for e in self.edges.iter().flat_map(|e| &e.evidence) {
            languages.insert(e.language.as_str());
            families.insert(e.family.as_str());
        }
        (languages.len(), families.len())
    }

    /// Keeps edges attested in at least `min_families` families and
    /// `min_languages` languages. Nodes are kept.
    pub fn filter_edges(&self, min_families: usize, min_languages: usize) -> ColexNetwork {
        let mut out = self.clone();
        out.edges
            .retain(|e| e.family_count >= min_families && e.language_count >= min_languages);
        out.params.min_families = out.params.min_families.max(min_families);
        out.params.min_languages = out.params.min_languages.max(min_languages);
        out
    }

    /// Swaps the direction of every edge of a directed network.
    pub fn reversed(&self) -> ColexNetwork {
        let mut out = self.clone();
        if !out.directed {
            return out;
        }
        for e in &mut out.edges {
            std::mem::swap(&mut e.source, &mut e.target);
        }
        out.edges.sort_by(|a, b| a.endpoints().cmp(&b.endpoints()));
        out
    }
}

/// A per-language inference result that can be folded into a network.
pub trait ColexHit {
    const KIND: NetworkKind;

    /// (source, target) for directed kinds, an unordered pair otherwise.
    fn endpoints(&self) -> (&str, &str);

    fn form_ids(&self) -> Vec<&str>;

    fn witness(&self, wordlist: &Wordlist) -> Result<Witness, NetworkError>;
}

fn lookup<'w>(wordlist: &'w Wordlist, id: &str) -> Result<&'w Form, NetworkError> {
    wordlist
        .form(id)
        .ok_or_else(|| integrity(format!("hit references unknown form {id:?}")))
}

impl ColexHit for FullColexHit {
    const KIND: NetworkKind = NetworkKind::Full;

    fn endpoints(&self) -> (&str, &str) {
        (&self.concept_a, &self.concept_b)
    }

    fn form_ids(&self) -> Vec<&str> {
        vec![&self.form]
    }

    fn witness(&self, _: &Wordlist) -> Result<Witness, NetworkError> {
        Ok(Witness {
            forms: vec![self.form.clone()],
            shared: self.shared.clone(),
            kind: None,
        })
    }
}

impl ColexHit for AffixColexHit {
    const KIND: NetworkKind = NetworkKind::Affix;

    fn endpoints(&self) -> (&str, &str) {
        (&self.source, &self.target)
    }

    fn form_ids(&self) -> Vec<&str> {
        vec![&self.affix_form, &self.full_form]
    }

    fn witness(&self, wordlist: &Wordlist) -> Result<Witness, NetworkError> {
        let affix = lookup(wordlist, &self.affix_form)?;
        Ok(Witness {
            forms: vec![self.affix_form.clone(), self.full_form.clone()],
            shared: affix.segments.clone(),
            kind: Some(self.kind),
        })
    }
}

impl ColexHit for OverlapColexHit {
    const KIND: NetworkKind = NetworkKind::Overlap;

    fn endpoints(&self) -> (&str, &str) {
        (&self.concept_a, &self.concept_b)
    }

    fn form_ids(&self) -> Vec<&str> {
        vec![&self.form_a, &self.form_b]
    }

    fn witness(&self, _: &Wordlist) -> Result<Witness, NetworkError> {
        Ok(Witness {
            forms: vec![self.form_a.clone(), self.form_b.clone()],
            shared: self.shared.clone(),
            kind: None,
        })
    }
}

/// Node annotations for every concept of the wordlist.
pub fn node_annotations(wordlist: &Wordlist) -> BTreeMap<String, NodeAnnotation> {
    let mut nodes: BTreeMap<String, NodeAnnotation> = wordlist
        .concepts()
        .map(|c| {
            (
                c.id.clone(),
                NodeAnnotation {
                    gloss: c.gloss.clone(),
                    form_count: 0,
                    family_count: 0,
                    forms: BTreeMap::new(),
                },
            )
        })
        .collect();
    let mut families: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for form in wordlist.forms() {
        let node = nodes.get_mut(&form.concept).expect("concept registered");
        node.form_count += 1;
        node.forms
            .entry(form.language.clone())
            .or_default()
            .push(form.value.clone());
        if let Some(family) = wordlist.family_of(&form.language) {
            families.entry(&form.concept).or_default().insert(family);
        }
    }
    for (concept, fams) in families {
        nodes
            .get_mut(concept)
            .expect("concept registered")
            .family_count = fams.len();
    }
    nodes
}

/// Folds per-language hits into a network. The result does not depend on
/// the order in which languages are supplied.
pub fn aggregate<H, I, L, V>(
    hits_by_language: I,
    wordlist: &Wordlist,
    thresholds: Option<Thresholds>,
) -> Result<ColexNetwork, NetworkError>
where
    H: ColexHit,
    I: IntoIterator<Item = (L, V)>,
    L: AsRef<str>,
    V: AsRef<[H]>,
{
    let directed = H::KIND.is_directed();
    let mut grouped: BTreeMap<(String, String), BTreeMap<String, EdgeEvidence>> = BTreeMap::new();

    for (language, hits) in hits_by_language {
        let language = language.as_ref();
        let family = wordlist
            .family_of(language)
            .ok_or_else(|| integrity(format!("hits for unknown language {language:?}")))?;
        for hit in hits.as_ref() {
            for id in hit.form_ids() {
                let form = lookup(wordlist, id)?;
                if form.language != language {
                    return Err(integrity(format!(
                        "form {id:?} belongs to {:?}, not {language:?}",
                        form.language
                    )));
                }
            }
            let (a, b) = hit.endpoints();
            if a == b {
                return Err(integrity(format!("hit joins {a:?} to itself")));
            }
            for c in [a, b] {
                if wordlist.concept(c).is_none() {
                    return Err(integrity(format!("hit references unknown concept {c:?}")));
                }
            }
            let key = if directed || a < b { (a, b) } else { (b, a) };
            let evidence = grouped
                .entry((key.0.to_string(), key.1.to_string()))
                .or_default()
                .entry(language.to_string())
                .or_insert_with(|| EdgeEvidence {
                    language: language.to_string(),
                    family: family.to_string(),
                    witnesses: Vec::new(),
                });
            evidence.witnesses.push(hit.witness(wordlist)?);
        }
    }

    let edges = grouped
        .into_iter()
        .map(|((s, t), by_lang)| ColexEdge::from_evidence(s, t, by_lang.into_values().collect()))
        .collect();
    ColexNetwork::from_parts(
        H::KIND,
        NetworkParams {
            thresholds,
            ..NetworkParams::default()
        },
        node_annotations(wordlist),
        edges,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::infer::{infer_affix, infer_full};
    use crate::wordlist::parse_wordlist_str;
    use proptest::prelude::*;

    const HEADER: &str = "ID\tLANGUAGE\tFAMILY\tCONCEPT\tFORM\tSEGMENTS\n";

    fn two_germanic() -> Wordlist {
        parse_wordlist_str(&format!(
            "{HEADER}\
             d1\tdeu\tIE\tEARTH\tErde\te ː ɐ d ə\n\
             d2\tdeu\tIE\tWORLD\tErde\te ː ɐ d ə\n\
             d3\tdeu\tIE\tWORLD\tWelt\tv ɛ l t\n\
             n1\tnld\tIE\tEARTH\taarde\taː r d ə\n\
             n2\tnld\tIE\tWORLD\taarde\taː r d ə\n\
             i1\tind\tAN\tEARTH\tbumi\tb u m i\n\
             i2\tind\tAN\tSKY\tlangit\tl a ŋ i t\n"
        ))
        .unwrap()
    }

    fn full_hits(wl: &Wordlist) -> Vec<(String, Vec<FullColexHit>)> {
        wl.languages()
            .map(|l| {
                (
                    l.id.clone(),
                    infer_full(&wl.forms_by_language(&l.id).unwrap()),
                )
            })
            .collect()
    }

    #[test]
    fn erde_single_language() {
        let wl = two_germanic();
        let deu = infer_full(&wl.forms_by_language("deu").unwrap());
        let net = aggregate([("deu", deu)], &wl, None).unwrap();
        assert_eq!(net.edge_count(), 1);
        let e = net.edge("WORLD", "EARTH").unwrap();
        assert_eq!((e.language_count, e.family_count, e.pair_count), (1, 1, 1));
        assert!(!net.directed);
    }

    #[test]
    fn counts_languages_and_families() {
        let wl = two_germanic();
        let net = aggregate(full_hits(&wl), &wl, None).unwrap();
        let e = net.edge("EARTH", "WORLD").unwrap();
        assert_eq!((e.language_count, e.family_count, e.pair_count), (2, 1, 2));
        assert_eq!(net.nodes["EARTH"].form_count, 3);
        assert_eq!(net.nodes["EARTH"].family_count, 2);
        assert_eq!(net.nodes["WORLD"].forms["deu"], ["Erde", "Welt"]);
    }

    #[test]
    fn empty_hits_keep_nodes() {
        let wl = two_germanic();
        let net = aggregate(Vec::<(String, Vec<FullColexHit>)>::new(), &wl, None).unwrap();
        assert_eq!(net.edge_count(), 0);
        assert_eq!(net.node_count(), 3);
    }

    #[test]
    fn dangling_form_is_integrity_error() {
        let wl = two_germanic();
        let hit = FullColexHit {
            concept_a: "EARTH".into(),
            concept_b: "WORLD".into(),
            form: "nope".into(),
            shared: vec![],
        };
        assert!(matches!(
            aggregate([("deu", vec![hit])], &wl, None),
            Err(NetworkError::Integrity(_))
        ));
    }

    #[test]
    fn hit_from_other_language_is_integrity_error() {
        let wl = two_germanic();
        let deu = infer_full(&wl.forms_by_language("deu").unwrap());
        assert!(aggregate([("nld", deu)], &wl, None).is_err());
    }

    #[test]
    fn synonyms_count_once_per_language() {
        let wl = parse_wordlist_str(&format!(
            "{HEADER}\
             a1\tdeu\tIE\tA\tx\tx y z\n\
             a2\tdeu\tIE\tA\tx\tp q r\n\
             b1\tdeu\tIE\tB\tx\tx y z w v u\n\
             b2\tdeu\tIE\tB\tx\tp q r s t u\n"
        ))
        .unwrap();
        let hits = infer_affix(&wl.forms_by_language("deu").unwrap(), Thresholds::AFFIX);
        assert_eq!(hits.len(), 2);
        let net = aggregate([("deu", hits)], &wl, Some(Thresholds::AFFIX)).unwrap();
        let e = net.edge("A", "B").unwrap();
        assert_eq!((e.language_count, e.pair_count), (1, 2));
        assert!(net.edge("B", "A").is_none());
    }

    #[test]
    fn filter_by_family() {
        let wl = two_germanic();
        let net = aggregate(full_hits(&wl), &wl, None).unwrap();
        assert_eq!(net.filter_edges(1, 1).edges, net.edges);
        let strict = net.filter_edges(2, 1);
        assert_eq!(strict.edge_count(), 0);
        assert_eq!(strict.node_count(), net.node_count());
        assert_eq!(strict.params.min_families, 2);
    }

    #[test]
    fn validate_rejects_bad_counts() {
        let wl = two_germanic();
        let mut net = aggregate(full_hits(&wl), &wl, None).unwrap();
        net.edges[0].language_count = 5;
        assert!(net.validate().is_err());
    }

    // (source, target, [(language, family, witness count)])
    type RawEdge = (u8, u8, Vec<(u8, u8, u8)>);

    fn arbitrary_edges() -> impl Strategy<Value = Vec<RawEdge>> {
        proptest::collection::vec(
            (
                0u8..6,
                0u8..6,
                proptest::collection::vec((0u8..5, 0u8..3, 1u8..3), 1..4),
            ),
            0..15,
        )
    }

    fn build(kind: NetworkKind, raw: &[RawEdge]) -> ColexNetwork {
        let nodes: BTreeMap<String, NodeAnnotation> = (0..6)
            .map(|i| {
                (
                    format!("C{i}"),
                    NodeAnnotation {
                        gloss: format!("C{i}"),
                        form_count: 1,
                        family_count: 1,
                        forms: BTreeMap::new(),
                    },
                )
            })
            .collect();
        let mut edges: BTreeMap<(String, String), ColexEdge> = BTreeMap::new();
        for (s, t, ev) in raw {
            if s == t {
                continue;
            }
            let (s, t) = if kind.is_directed() || s < t {
                (*s, *t)
            } else {
                (*t, *s)
            };
            let mut by_lang: BTreeMap<u8, EdgeEvidence> = BTreeMap::new();
            for (lang, fam, n) in ev {
                by_lang.entry(*lang).or_insert_with(|| EdgeEvidence {
                    language: format!("L{lang}"),
                    family: format!("F{}", (*lang as usize + *fam as usize) % 3),
                    witnesses: (0..*n)
                        .map(|k| Witness {
                            forms: vec![format!("f{k}")],
                            shared: vec![],
                            kind: None,
                        })
                        .collect(),
                });
            }
            edges.insert(
                (format!("C{s}"), format!("C{t}")),
                ColexEdge::from_evidence(
                    format!("C{s}"),
                    format!("C{t}"),
                    by_lang.into_values().collect(),
                ),
            );
        }
        ColexNetwork::from_parts(
            kind,
            NetworkParams::default(),
            nodes,
            edges.into_values().collect(),
        )
        .unwrap()
    }

    proptest! {
        #[test]
        fn filtering_is_monotone(raw in arbitrary_edges(), f in 1usize..4, l in 1usize..4) {
            let net = build(NetworkKind::Overlap, &raw);
            let loose = net.filter_edges(f, l);
            let tight = net.filter_edges(f + 1, l + 1);
            prop_assert!(tight.edges.iter().all(|e| loose.edges.contains(e)));
            for e in &loose.edges {
                prop_assert!(e.family_count >= f && e.language_count >= l);
            }
        }

        #[test]
        fn reversing_twice_is_identity(raw in arbitrary_edges()) {
            let net = build(NetworkKind::Affix, &raw);
            let back = net.reversed().reversed();
            prop_assert_eq!(&back, &net);
            prop_assert!(net.reversed().validate().is_ok());
        }
    }
}
