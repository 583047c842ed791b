//! Degree statistics, rank correlation, communities and subgraphs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

use crate::network::{ColexNetwork, WeightField};

#[derive(Debug, Error, PartialEq)]
pub enum AnalyzeError {
    #[error("{mode} degree requires a directed network")]
    ModeMismatch { mode: DegreeMode },
    #[error("correlation needs at least 3 shared nodes, found {0}")]
    InsufficientData(usize),
    #[error("correlation is undefined when one ranking has zero variance")]
    ZeroVariance,
    #[error("community detection requires an undirected network")]
    Directed,
    #[error("unknown concept {0:?}")]
    UnknownConcept(String),
    #[error("concept selection is empty")]
    EmptySelection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DegreeMode {
    All,
    In,
    Out,
}

impl fmt::Display for DegreeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DegreeMode::All => "all",
            DegreeMode::In => "in",
            DegreeMode::Out => "out",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeVector {
    pub mode: DegreeMode,
    pub weight_field: WeightField,
    pub values: BTreeMap<String, f64>,
}

impl DegreeVector {
    pub fn total(&self) -> f64 {
        self.values.values().sum()
    }
}

/// Sum of `weight_field` over incident edges. `In`/`Out` respect direction.
pub fn weighted_degree(
    network: &ColexNetwork,
    mode: DegreeMode,
    weight_field: WeightField,
) -> Result<DegreeVector, AnalyzeError> {
    if mode != DegreeMode::All && !network.directed {
        return Err(AnalyzeError::ModeMismatch { mode });
    }
    let mut values: BTreeMap<String, f64> =
        network.nodes.keys().map(|k| (k.clone(), 0.0)).collect();
    for edge in &network.edges {
        let w = edge.weight(weight_field) as f64;
        let mut bump = |node: &str| *values.get_mut(node).expect("endpoints are nodes") += w;
        match mode {
            DegreeMode::All => {
                bump(&edge.source);
                bump(&edge.target);
            }
            DegreeMode::Out => bump(&edge.source),
            DegreeMode::In => bump(&edge.target),
        }
    }
    Ok(DegreeVector {
        mode,
        weight_field,
        values,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub r: f64,
    pub p_value: f64,
    pub n: usize,
}

/// Midranks (1-based); tied values share the mean of their positions.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // positions i..j (0-based) share rank mean(i+1..=j)
        let rank = (i + j + 1) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        i = j;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman correlation of paired samples with a two-sided p-value from the
/// t distribution with `n - 2` degrees of freedom.
pub fn spearman_paired(x: &[f64], y: &[f64]) -> Result<CorrelationResult, AnalyzeError> {
    assert_eq!(x.len(), y.len(), "paired samples must have equal length");
    let n = x.len();
    if n < 3 {
        return Err(AnalyzeError::InsufficientData(n));
    }
    let r = pearson(&average_ranks(x), &average_ranks(y)).ok_or(AnalyzeError::ZeroVariance)?;
    Ok(CorrelationResult {
        r,
        p_value: t_test_p_value(r, n),
        n,
    })
}

fn t_test_p_value(r: f64, n: usize) -> f64 {
    let df = (n - 2) as f64;
    let denom = 1.0 - r * r;
    if denom <= f64::EPSILON {
        return 0.0;
    }
    let t = r * (df / denom).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("df > 0");
    (2.0 * (1.0 - dist.cdf(t.abs()))).clamp(0.0, 1.0)
}

/// Spearman correlation over the concepts present in both vectors.
pub fn spearman(x: &DegreeVector, y: &DegreeVector) -> Result<CorrelationResult, AnalyzeError> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = x
        .values
        .iter()
        .filter_map(|(k, a)| y.values.get(k).map(|b| (*a, *b)))
        .unzip();
    spearman_paired(&xs, &ys)
}

/// Community assignment; labels are renumbered by first appearance in
/// concept order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub algorithm: String,
    pub seed: u64,
    pub labels: BTreeMap<String, usize>,
}

impl Partition {
    pub fn community_count(&self) -> usize {
        self.labels.values().collect::<BTreeSet<_>>().len()
    }

    pub fn communities(&self) -> Vec<Vec<String>> {
        let mut out = vec![Vec::new(); self.community_count()];
        for (concept, &label) in &self.labels {
            out[label].push(concept.clone());
        }
        out
    }
}

pub const COMMUNITY_ALGORITHM: &str = "label-propagation-modularity";

const MAX_SWEEPS: usize = 100;

/// Weighted label propagation with modularity-adjusted votes, using
/// `language_count` as edge weight.
pub fn detect_communities(network: &ColexNetwork, seed: u64) -> Result<Partition, AnalyzeError> {
    detect_communities_weighted(network, WeightField::Language, seed)
}

/// Nodes are visited in a seeded random order. Each node adopts the
/// neighbouring label `l` maximising `w(i, l) - k_i * K_l / 2m`, moving only
/// on strict improvement; ties go to the smallest label. Every move raises
/// modularity, so the sweeps terminate.
pub fn detect_communities_weighted(
    network: &ColexNetwork,
    weight_field: WeightField,
    seed: u64,
) -> Result<Partition, AnalyzeError> {
    if network.directed {
        return Err(AnalyzeError::Directed);
    }
    let names: Vec<&String> = network.nodes.keys().collect();
    let position: BTreeMap<&str, usize> = names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); names.len()];
    for edge in &network.edges {
        let w = edge.weight(weight_field) as f64;
        if w <= 0.0 {
            continue;
        }
        let (s, t) = (
            position[edge.source.as_str()],
            position[edge.target.as_str()],
        );
        adjacency[s].push((t, w));
        adjacency[t].push((s, w));
    }
    let strength: Vec<f64> = adjacency
        .iter()
        .map(|a| a.iter().map(|e| e.1).sum())
        .collect();
    let two_m: f64 = strength.iter().sum();

    let mut labels: Vec<usize> = (0..names.len()).collect();
    if two_m > 0.0 {
        let mut totals = strength.clone();
        let mut order: Vec<usize> = (0..names.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..MAX_SWEEPS {
            order.shuffle(&mut rng);
            let mut changed = false;
            for &i in &order {
                let k = strength[i];
                if k == 0.0 {
                    continue;
                }
                let own = labels[i];
                totals[own] -= k;
                let mut links: BTreeMap<usize, f64> = BTreeMap::new();
                for &(j, w) in &adjacency[i] {
                    *links.entry(labels[j]).or_default() += w;
                }
                let score = |l: usize, w: f64| w - k * totals[l] / two_m;
                let mut best = own;
                let mut best_score = score(own, links.get(&own).copied().unwrap_or(0.0));
                for (&l, &w) in &links {
                    if l == own {
                        continue;
                    }
                    let s = score(l, w);
                    if s > best_score + 1e-12 {
                        best = l;
                        best_score = s;
                    }
                }
                totals[best] += k;
                if best != own {
                    labels[i] = best;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }

    let mut renumber: BTreeMap<usize, usize> = BTreeMap::new();
    let mut out = BTreeMap::new();
    for (i, name) in names.iter().enumerate() {
        let next = renumber.len();
        let label = *renumber.entry(labels[i]).or_insert(next);
        out.insert((*name).clone(), label);
    }
    Ok(Partition {
        algorithm: COMMUNITY_ALGORITHM.to_string(),
        seed,
        labels: out,
    })
}

/// Newman modularity of a partition under the given weight field.
pub fn modularity(network: &ColexNetwork, partition: &Partition, weight_field: WeightField) -> f64 {
    let degree = weighted_degree(network, DegreeMode::All, weight_field).expect("mode all");
    let two_m = degree.total();
    if two_m == 0.0 {
        return 0.0;
    }
    let mut inside: BTreeMap<usize, f64> = BTreeMap::new();
    let mut totals: BTreeMap<usize, f64> = BTreeMap::new();
    for edge in &network.edges {
        let (a, b) = (
            partition.labels[&edge.source],
            partition.labels[&edge.target],
        );
        if a == b {
            *inside.entry(a).or_default() += 2.0 * edge.weight(weight_field) as f64;
        }
    }
    for (node, d) in &degree.values {
        *totals.entry(partition.labels[node]).or_default() += d;
    }
    totals
        .iter()
        .map(|(c, tot)| inside.get(c).copied().unwrap_or(0.0) / two_m - (tot / two_m).powi(2))
        .sum()
}

/// Induced subgraph on `concepts`.
pub fn extract_subgraph<'a, I>(
    network: &ColexNetwork,
    concepts: I,
) -> Result<ColexNetwork, AnalyzeError>
where
    I: IntoIterator<Item = &'a str>,
{
    let keep: BTreeSet<&str> = concepts.into_iter().collect();
    if keep.is_empty() {
        return Err(AnalyzeError::EmptySelection);
    }
    if let Some(missing) = keep.iter().find(|c| !network.nodes.contains_key(**c)) {
        return Err(AnalyzeError::UnknownConcept(missing.to_string()));
    }
    let mut out = network.clone();
    out.nodes.retain(|k, _| keep.contains(k.as_str()));
    out.edges
        .retain(|e| keep.contains(e.source.as_str()) && keep.contains(e.target.as_str()));
    Ok(out)
}
