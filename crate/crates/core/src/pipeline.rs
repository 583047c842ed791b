//! Wordlist → per-language inference → aggregation → filtering → export.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::export::{export_graph, ExportBundle, ExportError, ExportFormat};
use crate::infer::{infer_affix, infer_full, infer_overlap};
use crate::network::{aggregate, ColexNetwork, NetworkError, NetworkKind, WeightField};
use crate::seqrel::Thresholds;
use crate::wordlist::{parse_wordlist, Form, Wordlist, WordlistError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("cannot read wordlist {path}: {source}")]
    Open {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Wordlist {
        path: PathBuf,
        source: WordlistError,
    },
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Export(#[from] ExportError),
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub wordlist: PathBuf,
    pub kinds: Vec<NetworkKind>,
    pub affix_thresholds: Thresholds,
    pub overlap_thresholds: Thresholds,
    pub min_families: usize,
    pub min_languages: usize,
    pub weight_field: WeightField,
    pub format: ExportFormat,
    pub out: Option<PathBuf>,
    pub seed: u64,
    /// Worker threads; `None` uses every available core.
    pub jobs: Option<usize>,
}

impl RunConfig {
    pub fn new(wordlist: impl Into<PathBuf>) -> Self {
        RunConfig {
            wordlist: wordlist.into(),
            kinds: NetworkKind::ALL.to_vec(),
            affix_thresholds: Thresholds::AFFIX,
            overlap_thresholds: Thresholds::OVERLAP,
            min_families: 1,
            min_languages: 1,
            weight_field: WeightField::Language,
            format: ExportFormat::Json,
            out: None,
            seed: 0,
            jobs: None,
        }
    }

    pub fn thresholds(&self, kind: NetworkKind) -> Option<Thresholds> {
        match kind {
            NetworkKind::Full => None,
            NetworkKind::Affix => Some(self.affix_thresholds),
            NetworkKind::Overlap => Some(self.overlap_thresholds),
        }
    }
}

pub fn load_wordlist(path: &Path) -> Result<Wordlist, PipelineError> {
    let file = File::open(path).map_err(|source| PipelineError::Open {
        path: path.to_path_buf(),
        source,
    })?;
    parse_wordlist(BufReader::new(file)).map_err(|source| PipelineError::Wordlist {
        path: path.to_path_buf(),
        source,
    })
}

fn per_language<H, F>(wordlist: &Wordlist, search: F) -> Vec<(String, Vec<H>)>
where
    H: Send,
    F: Fn(&[&Form]) -> Vec<H> + Sync,
{
    let languages: Vec<&str> = wordlist.languages().map(|l| l.id.as_str()).collect();
    languages
        .par_iter()
        .map(|&lang| {
            let forms = wordlist
                .forms_by_language(lang)
                .expect("language listed by the wordlist");
            (lang.to_string(), search(&forms))
        })
        .collect()
}

/// Infers one network. Languages are searched in parallel on the current
/// rayon pool; aggregation is independent of execution order.
pub fn infer_network(
    wordlist: &Wordlist,
    kind: NetworkKind,
    thresholds: Option<Thresholds>,
) -> Result<ColexNetwork, NetworkError> {
    let thresholds = thresholds.or(kind.default_thresholds());
    match kind {
        NetworkKind::Full => aggregate(per_language(wordlist, infer_full), wordlist, None),
        NetworkKind::Affix => {
            let t = thresholds.expect("affix thresholds");
            aggregate(
                per_language(wordlist, |f| infer_affix(f, t)),
                wordlist,
                Some(t),
            )
        }
        NetworkKind::Overlap => {
            let t = thresholds.expect("overlap thresholds");
            aggregate(
                per_language(wordlist, |f| infer_overlap(f, t)),
                wordlist,
                Some(t),
            )
        }
    }
}

#[derive(Debug, Clone)]
pub struct InferOutcome {
    pub network: ColexNetwork,
    pub bundle: ExportBundle,
}

impl InferOutcome {
    pub fn summary_line(&self) -> String {
        let (languages, families) = self.network.attested_languages_and_families();
        format!(
            "{}\t{}\t{}\t{}\t{}",
            self.network.kind,
            self.network.node_count(),
            self.network.edge_count(),
            languages,
            families
        )
    }
}

pub const SUMMARY_HEADER: &str = "kind\tnodes\tedges\tlanguages\tfamilies";

pub fn with_pool<T: Send>(
    jobs: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> Result<T, PipelineError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| PipelineError::Pool(e.to_string()))?;
    Ok(pool.install(f))
}

/// Runs the whole pipeline for every requested kind and writes the export
/// bundles when `config.out` is set.
pub fn run_infer(config: &RunConfig) -> Result<Vec<InferOutcome>, PipelineError> {
    let wordlist = load_wordlist(&config.wordlist)?;
    log::info!(
        "{}: {} forms, {} languages, {} families, {} concepts",
        config.wordlist.display(),
        wordlist.forms().len(),
        wordlist.language_count(),
        wordlist.family_count(),
        wordlist.concepts().count()
    );
    let mut outcomes = Vec::new();
    for &kind in &config.kinds {
        let network = with_pool(config.jobs, || {
            infer_network(&wordlist, kind, config.thresholds(kind))
        })??
        .filter_edges(config.min_families, config.min_languages);
        let bundle = export_graph(&network, config.format, config.weight_field);
        if let Some(dir) = &config.out {
            bundle.write_to(dir)?;
        }
        outcomes.push(InferOutcome { network, bundle });
    }
    Ok(outcomes)
}
