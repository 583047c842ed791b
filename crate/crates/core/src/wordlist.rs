//! Multilingual segmented wordlists.
//!
//! The on-disk format is a single UTF-8 TSV table with the columns
//! `ID`, `LANGUAGE`, `FAMILY`, `CONCEPT`, `FORM` and `SEGMENTS`. Segments are
//! separated by single spaces, lines starting with `#` are comments and blank
//! lines are ignored.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Column names, in the order they are written back out.
pub const COLUMNS: [&str; 6] = ["ID", "LANGUAGE", "FAMILY", "CONCEPT", "FORM", "SEGMENTS"];

#[derive(Debug, Error)]
pub enum WordlistError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: form {id:?} has no segments")]
    EmptySegments { line: usize, id: String },
    #[error("line {line}: duplicate form id {id:?}")]
    DuplicateId { line: usize, id: String },
    #[error("line {line}: language {language:?} declared with family {found:?}, previously {expected:?}")]
    InconsistentFamily {
        line: usize,
        language: String,
        expected: String,
        found: String,
    },
    #[error("invalid sound {0:?}: sounds must be non-empty and contain no whitespace")]
    InvalidSound(String),
    #[error("unknown language {0:?}")]
    UnknownLanguage(String),
    #[error("unknown concept {0:?}")]
    UnknownConcept(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// One phonetic segment, e.g. `ʃ`, `uː` or `tsʰ`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Sound(String);

impl Sound {
    pub fn new(token: impl Into<String>) -> Result<Self, WordlistError> {
        let token = token.into();
        if token.is_empty() || token.chars().any(char::is_whitespace) {
            return Err(WordlistError::InvalidSound(token));
        }
        Ok(Sound(token))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for Sound {
    type Error = WordlistError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Sound::new(value)
    }
}

impl From<Sound> for String {
    fn from(value: Sound) -> Self {
        value.0
    }
}

impl fmt::Display for Sound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Splits a space-separated segment string into sounds.
pub fn segments_from_str(text: &str) -> Result<Vec<Sound>, WordlistError> {
    text.split_whitespace().map(Sound::new).collect()
}

/// Joins sounds with a single space. Injective because sounds never contain
/// whitespace.
pub fn join_segments(segments: &[Sound]) -> String {
    let mut out = String::new();
    for (i, s) in segments.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(s.as_str());
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Concept {
    pub id: String,
    pub gloss: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Language {
    pub id: String,
    pub name: String,
    pub family: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Form {
    pub id: String,
    pub language: String,
    pub concept: String,
    pub value: String,
    pub segments: Vec<Sound>,
}

/// An immutable, indexed wordlist.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wordlist {
    languages: BTreeMap<String, Language>,
    concepts: BTreeMap<String, Concept>,
    forms: Vec<Form>,
    form_index: BTreeMap<String, usize>,
    by_language: BTreeMap<String, Vec<usize>>,
}

impl Wordlist {
    pub fn languages(&self) -> impl Iterator<Item = &Language> {
        self.languages.values()
    }

    pub fn language(&self, id: &str) -> Option<&Language> {
        self.languages.get(id)
    }

    pub fn concepts(&self) -> impl Iterator<Item = &Concept> {
        self.concepts.values()
    }

    pub fn concept(&self, id: &str) -> Option<&Concept> {
        self.concepts.get(id)
    }

    pub fn forms(&self) -> &[Form] {
        &self.forms
    }

    pub fn form(&self, id: &str) -> Option<&Form> {
        self.form_index.get(id).map(|&i| &self.forms[i])
    }

    pub fn family_of(&self, language: &str) -> Option<&str> {
        self.languages.get(language).map(|l| l.family.as_str())
    }

    /// Forms of one language in input order.
    pub fn forms_by_language(&self, language: &str) -> Result<Vec<&Form>, WordlistError> {
        let indices = self
            .by_language
            .get(language)
            .ok_or_else(|| WordlistError::UnknownLanguage(language.to_string()))?;
        Ok(indices.iter().map(|&i| &self.forms[i]).collect())
    }

    pub fn language_count(&self) -> usize {
        self.languages.len()
    }

    pub fn family_count(&self) -> usize {
        self.languages
            .values()
            .map(|l| l.family.as_str())
            .collect::<HashSet<_>>()
            .len()
    }

    pub fn sound_count(&self) -> usize {
        self.forms.iter().map(|f| f.segments.len()).sum()
    }

    /// Writes the wordlist in the TSV input format.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", COLUMNS.join("\t"))?;
        for form in &self.forms {
            let family = self.family_of(&form.language).unwrap_or(&form.language);
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}",
                form.id,
                form.language,
                family,
                form.concept,
                form.value,
                join_segments(&form.segments)
            )?;
        }
        Ok(())
    }

    pub fn to_tsv(&self) -> String {
        let mut buf = Vec::new();
        self.write_tsv(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("wordlist fields are UTF-8")
    }
}

/// Incremental construction with the same validation rules as the parser.
#[derive(Debug, Default)]
pub struct WordlistBuilder {
    languages: BTreeMap<String, Language>,
    concepts: BTreeMap<String, Concept>,
    forms: Vec<Form>,
    form_index: BTreeMap<String, usize>,
}

impl WordlistBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares a language, possibly without forms. An empty family falls
    /// back to the language id.
    pub fn declare_language(&mut self, id: &str, family: &str) -> Result<&mut Self, WordlistError> {
        self.language_at(0, id, family)?;
        Ok(self)
    }

    fn language_at(&mut self, line: usize, id: &str, family: &str) -> Result<(), WordlistError> {
        if id.is_empty() {
            return Err(WordlistError::Parse {
                line,
                message: "empty language id".into(),
            });
        }
        let family = if family.is_empty() { id } else { family };
        match self.languages.get(id) {
            Some(existing) if existing.family != family => Err(WordlistError::InconsistentFamily {
                line,
                language: id.to_string(),
                expected: existing.family.clone(),
                found: family.to_string(),
            }),
            Some(_) => Ok(()),
            None => {
                self.languages.insert(
                    id.to_string(),
                    Language {
                        id: id.to_string(),
                        name: id.to_string(),
                        family: family.to_string(),
                    },
                );
                Ok(())
            }
        }
    }

    pub fn add_form(
        &mut self,
        id: &str,
        language: &str,
        family: &str,
        concept: &str,
        value: &str,
        segments: Vec<Sound>,
    ) -> Result<&mut Self, WordlistError> {
        self.add_form_at(0, id, language, family, concept, value, segments)?;
        Ok(self)
    }

    #[allow(clippy::too_many_arguments)]
    fn add_form_at(
        &mut self,
        line: usize,
        id: &str,
        language: &str,
        family: &str,
        concept: &str,
        value: &str,
        segments: Vec<Sound>,
    ) -> Result<(), WordlistError> {
        if id.is_empty() {
            return Err(WordlistError::Parse {
                line,
                message: "empty form id".into(),
            });
        }
        if concept.is_empty() {
            return Err(WordlistError::Parse {
                line,
                message: format!("form {id:?} has an empty concept"),
            });
        }
        if segments.is_empty() {
            return Err(WordlistError::EmptySegments {
                line,
                id: id.to_string(),
            });
        }
        if self.form_index.contains_key(id) {
            return Err(WordlistError::DuplicateId {
                line,
                id: id.to_string(),
            });
        }
        self.language_at(line, language, family)?;
        self.concepts
            .entry(concept.to_string())
            .or_insert_with(|| Concept {
                id: concept.to_string(),
                gloss: concept.to_string(),
            });
        self.form_index.insert(id.to_string(), self.forms.len());
        self.forms.push(Form {
            id: id.to_string(),
            language: language.to_string(),
            concept: concept.to_string(),
            value: value.to_string(),
            segments,
        });
        Ok(())
    }

    pub fn build(self) -> Wordlist {
        let mut by_language: BTreeMap<String, Vec<usize>> = self
            .languages
            .keys()
            .map(|id| (id.clone(), Vec::new()))
            .collect();
        for (i, form) in self.forms.iter().enumerate() {
            by_language
                .get_mut(&form.language)
                .expect("form languages are declared on insert")
                .push(i);
        }
        Wordlist {
            languages: self.languages,
            concepts: self.concepts,
            forms: self.forms,
            form_index: self.form_index,
            by_language,
        }
    }
}

/// Parses the TSV wordlist format.
pub fn parse_wordlist<R: BufRead>(source: R) -> Result<Wordlist, WordlistError> {
    let mut builder = WordlistBuilder::new();
    let mut columns: Option<[usize; 6]> = None;

    for (n, line) in source.lines().enumerate() {
        let line_no = n + 1;
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();

        let Some(order) = columns else {
            columns = Some(parse_header(line_no, &fields)?);
            continue;
        };
        if fields.len() != COLUMNS.len() {
            return Err(WordlistError::Parse {
                line: line_no,
                message: format!("expected {} columns, found {}", COLUMNS.len(), fields.len()),
            });
        }
        let get = |col: usize| fields[order[col]].trim();
        let segments = segments_from_str(get(5)).map_err(|e| WordlistError::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        builder.add_form_at(line_no, get(0), get(1), get(2), get(3), get(4), segments)?;
    }

    if columns.is_none() {
        return Err(WordlistError::Parse {
            line: 0,
            message: "missing header row".into(),
        });
    }
    Ok(builder.build())
}

pub fn parse_wordlist_str(source: &str) -> Result<Wordlist, WordlistError> {
    parse_wordlist(source.as_bytes())
}

// Maps each canonical column to its position in the file.
fn parse_header(line: usize, fields: &[&str]) -> Result<[usize; 6], WordlistError> {
    if fields.len() != COLUMNS.len() {
        return Err(WordlistError::Parse {
            line,
            message: format!(
                "header must have exactly the columns {}",
                COLUMNS.join(", ")
            ),
        });
    }
    let mut order = [usize::MAX; 6];
    for (pos, name) in fields.iter().enumerate() {
        let name = name.trim();
        let col = COLUMNS
            .iter()
            .position(|c| c.eq_ignore_ascii_case(name))
            .ok_or_else(|| WordlistError::Parse {
                line,
                message: format!("unexpected column {name:?}"),
            })?;
        if order[col] != usize::MAX {
            return Err(WordlistError::Parse {
                line,
                message: format!("duplicate column {name:?}"),
            });
        }
        order[col] = pos;
    }
    Ok(order)
}
