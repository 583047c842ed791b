//! Synthetic wordlists and the efficient-vs-naive timing harness.

use std::fmt;
use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::infer::{infer_affix, infer_overlap, naive_affix, naive_overlap};
use crate::network::NetworkKind;
use crate::seqrel::Thresholds;
use crate::wordlist::{Sound, Wordlist, WordlistBuilder, WordlistError};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
    #[error("benchmarks compare partial colexification searches; {0} is not supported")]
    UnsupportedKind(NetworkKind),
    #[error("efficient and naive {kind} results differ for language {language:?}")]
    Mismatch { kind: NetworkKind, language: String },
    #[error(transparent)]
    Wordlist(#[from] WordlistError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub languages: usize,
    pub concepts: usize,
    pub alphabet_size: usize,
    pub min_len: usize,
    pub max_len: usize,
    pub compound_probability: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            languages: 10,
            concepts: 200,
            alphabet_size: 20,
            min_len: 2,
            max_len: 7,
            compound_probability: 0.3,
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.min_len < 1 || self.max_len < self.min_len {
            return Err(BenchError::InvalidSpec(format!(
                "length range ({}, {}) must satisfy 1 <= min <= max",
                self.min_len, self.max_len
            )));
        }
        if !(0.0..=1.0).contains(&self.compound_probability) {
            return Err(BenchError::InvalidSpec(format!(
                "compound probability {} is outside [0, 1]",
                self.compound_probability
            )));
        }
        if self.alphabet_size == 0 {
            return Err(BenchError::InvalidSpec("alphabet must not be empty".into()));
        }
        Ok(())
    }
}

/// A form built by concatenating two earlier forms of the same language.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedCompound {
    pub form: String,
    pub left: String,
    pub right: String,
}

#[derive(Debug, Clone)]
pub struct Synthetic {
    pub wordlist: Wordlist,
    pub compounds: Vec<PlantedCompound>,
}

const BASE_SOUNDS: [&str; 40] = [
    "p", "t", "k", "b", "d", "g", "m", "n", "ŋ", "f", "s", "ʃ", "x", "h", "l", "r", "j", "w", "ts",
    "tʃ", "a", "e", "i", "o", "u", "ə", "ɛ", "ɔ", "y", "ø", "aː", "iː", "uː", "pʰ", "tʰ", "kʰ",
    "ɲ", "ʔ", "β", "ð",
];

fn alphabet(size: usize) -> Vec<Sound> {
    (0..size)
        .map(|i| match BASE_SOUNDS.get(i) {
            Some(s) => Sound::new(*s),
            None => Sound::new(format!("s{i}")),
        })
        .collect::<Result<_, _>>()
        .expect("generated sounds are valid")
}

pub fn language_id(index: usize) -> String {
    format!("L{index:02}")
}

pub fn concept_id(index: usize) -> String {
    format!("C{index:04}")
}

/// Deterministic synthetic wordlist: one form per concept and language.
/// Compound parts are drawn from earlier forms no longer than `max_len`, so
/// every form has at most `2 * max_len` sounds.
pub fn generate_with_log(spec: &SyntheticSpec) -> Result<Synthetic, BenchError> {
    spec.validate()?;
    let sounds = alphabet(spec.alphabet_size);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut builder = WordlistBuilder::new();
    let mut compounds = Vec::new();

    for l in 0..spec.languages {
        let language = language_id(l);
        let family = format!("F{:02}", l / 2);
        builder.declare_language(&language, &family)?;
        // (form id, segments) of forms eligible as compound parts
        let mut parts: Vec<(String, Vec<Sound>)> = Vec::new();
        for c in 0..spec.concepts {
            let concept = concept_id(c);
            let id = format!("{language}-{concept}");
            let compound = parts.len() >= 2 && rng.random_bool(spec.compound_probability);
            let segments = if compound {
                let i = rng.random_range(0..parts.len());
                let mut j = rng.random_range(0..parts.len() - 1);
                if j >= i {
                    j += 1;
                }
                let (left, right) = (&parts[i], &parts[j]);
                compounds.push(PlantedCompound {
                    form: id.clone(),
                    left: left.0.clone(),
                    right: right.0.clone(),
                });
                let mut s = left.1.clone();
                s.extend_from_slice(&right.1);
                s
            } else {
                let len = rng.random_range(spec.min_len..=spec.max_len);
                (0..len)
                    .map(|_| sounds[rng.random_range(0..sounds.len())].clone())
                    .collect()
            };
            let value: String = segments.iter().map(Sound::as_str).collect();
            builder.add_form(&id, &language, &family, &concept, &value, segments.clone())?;
            if segments.len() <= spec.max_len {
                parts.push((id, segments));
            }
        }
    }
    Ok(Synthetic {
        wordlist: builder.build(),
        compounds,
    })
}

pub fn generate_wordlist(spec: &SyntheticSpec) -> Result<Wordlist, BenchError> {
    Ok(generate_with_log(spec)?.wordlist)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingStats {
    pub median_secs: f64,
    pub variance: f64,
    pub samples: Vec<f64>,
}

impl TimingStats {
    pub fn from_durations(samples: &[Duration]) -> Self {
        let mut secs: Vec<f64> = samples.iter().map(Duration::as_secs_f64).collect();
        let n = secs.len() as f64;
        let mean = secs.iter().sum::<f64>() / n;
        let variance = if secs.len() > 1 {
            secs.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let unsorted = secs.clone();
        secs.sort_by(f64::total_cmp);
        let mid = secs.len() / 2;
        let median_secs = if secs.len().is_multiple_of(2) {
            (secs[mid - 1] + secs[mid]) / 2.0
        } else {
            secs[mid]
        };
        TimingStats {
            median_secs,
            variance,
            samples: unsorted,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LanguageTiming {
    pub language: String,
    pub forms: usize,
    pub hits: usize,
    pub efficient_median_secs: f64,
    pub naive_median_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub kind: NetworkKind,
    pub thresholds: Thresholds,
    pub repetitions: usize,
    pub parallelism: usize,
    pub efficient: TimingStats,
    pub naive: TimingStats,
    pub per_language: Vec<LanguageTiming>,
}

impl BenchReport {
    /// Naive time over efficient time, on medians.
    pub fn ratio(&self) -> f64 {
        self.naive.median_secs / self.efficient.median_secs.max(f64::MIN_POSITIVE)
    }
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "# {} search, thresholds ({}, {}), {} repetitions, parallelism {}",
            self.kind,
            self.thresholds.affix,
            self.thresholds.remainder,
            self.repetitions,
            self.parallelism
        )?;
        writeln!(f, "language\tforms\thits\tefficient_s\tnaive_s\tratio")?;
        for l in &self.per_language {
            writeln!(
                f,
                "{}\t{}\t{}\t{:.6}\t{:.6}\t{:.2}",
                l.language,
                l.forms,
                l.hits,
                l.efficient_median_secs,
                l.naive_median_secs,
                l.naive_median_secs / l.efficient_median_secs.max(f64::MIN_POSITIVE)
            )?;
        }
        writeln!(
            f,
            "total\t-\t-\t{:.6}\t{:.6}\t{:.2}",
            self.efficient.median_secs,
            self.naive.median_secs,
            self.ratio()
        )?;
        writeln!(
            f,
            "# variance (s^2): efficient {:.3e}, naive {:.3e}; results identical",
            self.efficient.variance, self.naive.variance
        )
    }
}

pub const MIN_REPETITIONS: usize = 5;

fn time<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

/// Times the efficient and naive searches language by language on one
/// thread. Fails if any repetition yields differing results.
pub fn run_bench(
    wordlist: &Wordlist,
    kind: NetworkKind,
    thresholds: Thresholds,
    repetitions: usize,
) -> Result<BenchReport, BenchError> {
    let repetitions = repetitions.max(MIN_REPETITIONS);
    let languages: Vec<String> = wordlist.languages().map(|l| l.id.clone()).collect();
    let forms: Vec<_> = languages
        .iter()
        .map(|l| wordlist.forms_by_language(l))
        .collect::<Result<_, _>>()?;

    let mut eff_total = Vec::with_capacity(repetitions);
    let mut naive_total = Vec::with_capacity(repetitions);
    let mut eff_lang = vec![Vec::with_capacity(repetitions); languages.len()];
    let mut naive_lang = vec![Vec::with_capacity(repetitions); languages.len()];
    let mut hits = vec![0usize; languages.len()];

    for _ in 0..repetitions {
        let (mut eff_sum, mut naive_sum) = (Duration::ZERO, Duration::ZERO);
        for (i, lang_forms) in forms.iter().enumerate() {
            let (same, count, te, tn) = match kind {
                NetworkKind::Affix => {
                    let (a, te) = time(|| infer_affix(lang_forms, thresholds));
                    let (b, tn) = time(|| naive_affix(lang_forms, thresholds));
                    (a == b, a.len(), te, tn)
                }
                NetworkKind::Overlap => {
                    let (a, te) = time(|| infer_overlap(lang_forms, thresholds));
                    let (b, tn) = time(|| naive_overlap(lang_forms, thresholds));
                    (a == b, a.len(), te, tn)
                }
                NetworkKind::Full => return Err(BenchError::UnsupportedKind(kind)),
            };
            if !same {
                return Err(BenchError::Mismatch {
                    kind,
                    language: languages[i].clone(),
                });
            }
            hits[i] = count;
            eff_lang[i].push(te);
            naive_lang[i].push(tn);
            eff_sum += te;
            naive_sum += tn;
        }
        eff_total.push(eff_sum);
        naive_total.push(naive_sum);
    }

    let per_language = languages
        .iter()
        .enumerate()
        .map(|(i, l)| LanguageTiming {
            language: l.clone(),
            forms: forms[i].len(),
            hits: hits[i],
            efficient_median_secs: TimingStats::from_durations(&eff_lang[i]).median_secs,
            naive_median_secs: TimingStats::from_durations(&naive_lang[i]).median_secs,
        })
        .collect();

    Ok(BenchReport {
        kind,
        thresholds,
        repetitions,
        parallelism: 1,
        efficient: TimingStats::from_durations(&eff_total),
        naive: TimingStats::from_durations(&naive_total),
        per_language,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqrel::AffixKind;

    #[test]
    fn deterministic_for_seed() {
        let spec = SyntheticSpec {
            languages: 3,
            concepts: 50,
            seed: 9,
            ..SyntheticSpec::default()
        };
        let a = generate_wordlist(&spec).unwrap();
        let b = generate_wordlist(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_tsv(), b.to_tsv());
        let c = generate_wordlist(&SyntheticSpec { seed: 10, ..spec }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn invalid_specs() {
        let bad = [
            SyntheticSpec {
                min_len: 0,
                ..SyntheticSpec::default()
            },
            SyntheticSpec {
                min_len: 5,
                max_len: 4,
                ..SyntheticSpec::default()
            },
            SyntheticSpec {
                compound_probability: 1.5,
                ..SyntheticSpec::default()
            },
            SyntheticSpec {
                alphabet_size: 0,
                ..SyntheticSpec::default()
            },
        ];
        for spec in bad {
            assert!(matches!(
                generate_wordlist(&spec),
                Err(BenchError::InvalidSpec(_))
            ));
        }
    }

    #[test]
    fn no_compounds_rarely_nest() {
        let spec = SyntheticSpec {
            languages: 2,
            concepts: 300,
            alphabet_size: 40,
            min_len: 4,
            max_len: 8,
            compound_probability: 0.0,
            seed: 1,
        };
        let syn = generate_with_log(&spec).unwrap();
        assert!(syn.compounds.is_empty());
        let wl = &syn.wordlist;
        let hits: usize = wl
            .languages()
            .map(|l| infer_affix(&wl.forms_by_language(&l.id).unwrap(), Thresholds::AFFIX).len())
            .sum();
        assert!(hits <= 2, "{hits} affix hits among random forms");
    }

    #[test]
    fn all_compounds_contain_earlier_forms() {
        let spec = SyntheticSpec {
            languages: 1,
            concepts: 40,
            min_len: 3,
            max_len: 5,
            compound_probability: 1.0,
            seed: 4,
            ..SyntheticSpec::default()
        };
        let syn = generate_with_log(&spec).unwrap();
        assert_eq!(syn.compounds.len(), 38);
        let wl = &syn.wordlist;
        let forms = wl.forms_by_language("L00").unwrap();
        let hits = infer_affix(&forms, Thresholds::AFFIX);
        assert_eq!(hits, naive_affix(&forms, Thresholds::AFFIX));
        for c in &syn.compounds {
            let full = wl.form(&c.form).unwrap();
            let left = wl.form(&c.left).unwrap();
            assert!(full.segments.starts_with(&left.segments));
            assert!(
                hits.iter().any(|h| h.full_form == c.form),
                "no hit for {}",
                c.form
            );
        }
    }

    #[test]
    fn planted_compounds_are_recovered() {
        let spec = SyntheticSpec {
            languages: 3,
            concepts: 150,
            seed: 21,
            ..SyntheticSpec::default()
        };
        let syn = generate_with_log(&spec).unwrap();
        let wl = &syn.wordlist;
        let t = Thresholds::AFFIX;
        let mut hits = Vec::new();
        for l in wl.languages() {
            hits.extend(infer_affix(&wl.forms_by_language(&l.id).unwrap(), t));
        }
        for c in &syn.compounds {
            let (left, right) = (wl.form(&c.left).unwrap(), wl.form(&c.right).unwrap());
            let (ll, rl) = (left.segments.len(), right.segments.len());
            if ll > t.affix && rl > t.remainder {
                assert!(hits.iter().any(|h| h.affix_form == c.left
                    && h.full_form == c.form
                    && h.kind == AffixKind::Prefix));
            }
            if rl > t.affix && ll > t.remainder {
                assert!(hits.iter().any(|h| h.affix_form == c.right
                    && h.full_form == c.form
                    && h.kind == AffixKind::Suffix));
            }
        }
    }

    #[test]
    fn bench_small_list() {
        let spec = SyntheticSpec {
            languages: 1,
            concepts: 10,
            seed: 2,
            ..SyntheticSpec::default()
        };
        let wl = generate_wordlist(&spec).unwrap();
        let report = run_bench(&wl, NetworkKind::Affix, Thresholds::AFFIX, 1).unwrap();
        assert_eq!(report.repetitions, MIN_REPETITIONS);
        assert_eq!(report.efficient.samples.len(), MIN_REPETITIONS);
        assert_eq!(report.per_language.len(), 1);
        assert!(report.to_string().contains("results identical"));
        assert!(matches!(
            run_bench(&wl, NetworkKind::Full, Thresholds::AFFIX, 5),
            Err(BenchError::UnsupportedKind(_))
        ));
    }

    #[test]
    fn timing_stats() {
        let d: Vec<Duration> = [3, 1, 2, 5]
            .iter()
            .map(|&s| Duration::from_secs(s))
            .collect();
        let s = TimingStats::from_durations(&d);
        assert_eq!(s.median_secs, 2.5);
        assert!((s.variance - 2.9166666666666665).abs() < 1e-12);
    }
}
