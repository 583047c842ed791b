//! Serialization of networks for Gephi, Cytoscape and downstream scripts.
//!
//! Every export is byte-deterministic: nodes and edges are written in
//! canonical order and JSON objects use sorted maps.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::{ColexNetwork, NetworkError, NetworkKind, WeightField};
use crate::seqrel::Thresholds;

pub const FORMAT_NAME: &str = "colexnet-network";
pub const FORMAT_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },
    #[error(transparent)]
    Invalid(#[from] NetworkError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Gml,
    EdgeTsv,
    Json,
}

impl ExportFormat {
    fn extension(self) -> &'static str {
        match self {
            ExportFormat::Gml => "gml",
            ExportFormat::EdgeTsv => "edges.tsv",
            ExportFormat::Json => "json",
        }
    }
}

impl FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gml" => Ok(ExportFormat::Gml),
            "tsv" | "edge-tsv" => Ok(ExportFormat::EdgeTsv),
            "json" => Ok(ExportFormat::Json),
            other => Err(format!("unknown export format {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExportMetadata {
    pub format: String,
    pub version: u32,
    pub tool_version: String,
    pub kind: NetworkKind,
    pub directed: bool,
    pub thresholds: Option<Thresholds>,
    pub min_families: usize,
    pub min_languages: usize,
    pub weight_field: WeightField,
}

impl ExportMetadata {
    pub fn for_network(network: &ColexNetwork, weight_field: WeightField) -> Self {
        ExportMetadata {
            format: FORMAT_NAME.to_string(),
            version: FORMAT_VERSION,
            tool_version: TOOL_VERSION.to_string(),
            kind: network.kind,
            directed: network.directed,
            thresholds: network.params.thresholds,
            min_families: network.params.min_families,
            min_languages: network.params.min_languages,
            weight_field,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExportFile {
    pub name: String,
    pub contents: String,
}

/// Graph file, node table and metadata for one network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExportBundle {
    pub metadata: ExportMetadata,
    pub files: Vec<ExportFile>,
}

impl ExportBundle {
    pub fn file(&self, name: &str) -> Option<&str> {
        self.files
            .iter()
            .find(|f| f.name == name)
            .map(|f| f.contents.as_str())
    }

    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>, ExportError> {
        fs::create_dir_all(dir).map_err(|source| ExportError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let mut written = Vec::new();
        for file in &self.files {
            let path = dir.join(&file.name);
            fs::write(&path, &file.contents).map_err(|source| ExportError::Io {
                path: path.clone(),
                source,
            })?;
            written.push(path);
        }
        Ok(written)
    }
}

#[derive(Serialize)]
struct DocumentRef<'a> {
    metadata: &'a ExportMetadata,
    network: &'a ColexNetwork,
}

#[derive(Deserialize)]
struct Document {
    metadata: ExportMetadata,
    network: ColexNetwork,
}

/// Exports under the file stem `network.kind`.
pub fn export_graph(
    network: &ColexNetwork,
    format: ExportFormat,
    weight_field: WeightField,
) -> ExportBundle {
    export_graph_named(network, network.kind.as_str(), format, weight_field)
}

pub fn export_graph_named(
    network: &ColexNetwork,
    stem: &str,
    format: ExportFormat,
    weight_field: WeightField,
) -> ExportBundle {
    let metadata = ExportMetadata::for_network(network, weight_field);
    let graph = match format {
        ExportFormat::Gml => to_gml(network, weight_field),
        ExportFormat::EdgeTsv => to_edge_tsv(network),
        ExportFormat::Json => to_json(network, &metadata),
    };
    let mut meta = serde_json::to_string_pretty(&metadata).expect("metadata serializes");
    meta.push('\n');
    ExportBundle {
        files: vec![
            ExportFile {
                name: format!("{stem}.{}", format.extension()),
                contents: graph,
            },
            ExportFile {
                name: format!("{stem}.nodes.tsv"),
                contents: to_node_tsv(network),
            },
            ExportFile {
                name: format!("{stem}.meta.json"),
                contents: meta,
            },
        ],
        metadata,
    }
}

pub fn to_json(network: &ColexNetwork, metadata: &ExportMetadata) -> String {
    let mut out = serde_json::to_string_pretty(&DocumentRef { metadata, network })
        .expect("network serializes");
    out.push('\n');
    out
}

fn gml_string(s: &str) -> String {
    let escaped = s.replace('&', "&amp;").replace('"', "&quot;");
    format!("\"{escaped}\"")
}

pub fn to_gml(network: &ColexNetwork, weight_field: WeightField) -> String {
    let mut out = String::new();
    let ids: std::collections::BTreeMap<&str, usize> = network
        .nodes
        .keys()
        .enumerate()
        .map(|(i, k)| (k.as_str(), i))
        .collect();
    let _ = writeln!(
        out,
        "Creator {}",
        gml_string(&format!("colexnet {TOOL_VERSION}"))
    );
    out.push_str("graph [\n");
    let _ = writeln!(out, "  directed {}", u8::from(network.directed));
    let _ = writeln!(out, "  label {}", gml_string(network.kind.as_str()));
    let _ = writeln!(out, "  weight_field {}", gml_string(weight_field.as_str()));
    for (name, node) in &network.nodes {
        out.push_str("  node [\n");
        let _ = writeln!(out, "    id {}", ids[name.as_str()]);
        let _ = writeln!(out, "    label {}", gml_string(name));
        let _ = writeln!(out, "    gloss {}", gml_string(&node.gloss));
        let _ = writeln!(out, "    form_count {}", node.form_count);
        let _ = writeln!(out, "    family_count {}", node.family_count);
        out.push_str("  ]\n");
    }
    for edge in &network.edges {
        out.push_str("  edge [\n");
        let _ = writeln!(out, "    source {}", ids[edge.source.as_str()]);
        let _ = writeln!(out, "    target {}", ids[edge.target.as_str()]);
        let _ = writeln!(out, "    weight {}", edge.weight(weight_field));
        let _ = writeln!(out, "    language_count {}", edge.language_count);
        let _ = writeln!(out, "    family_count {}", edge.family_count);
        let _ = writeln!(out, "    pair_count {}", edge.pair_count);
        out.push_str("  ]\n");
    }
    out.push_str("]\n");
    out
}

pub fn to_edge_tsv(network: &ColexNetwork) -> String {
    let mut out =
        String::from("source\ttarget\tlanguage_count\tfamily_count\tpair_count\twitnesses\n");
    for e in &network.edges {
        let witnesses = serde_json::to_string(&e.evidence).expect("evidence serializes");
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            e.source, e.target, e.language_count, e.family_count, e.pair_count, witnesses
        );
    }
    out
}

pub fn to_node_tsv(network: &ColexNetwork) -> String {
    let mut out = String::from("id\tgloss\tform_count\tfamily_count\tlanguages\n");
    for (id, n) in &network.nodes {
        let _ = writeln!(
            out,
            "{id}\t{}\t{}\t{}\t{}",
            n.gloss,
            n.form_count,
            n.family_count,
            n.forms.len()
        );
    }
    out
}

/// A network read back from a JSON export.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Imported {
    pub network: ColexNetwork,
    pub metadata: ExportMetadata,
    pub warnings: Vec<String>,
}

/// Reads a JSON export. Version or tool mismatches yield warnings and a
/// best-effort import; structural problems are errors.
pub fn import_graph(source: &str) -> Result<Imported, ExportError> {
    let mut de = serde_json::Deserializer::from_str(source);
    let doc: Document =
        serde_path_to_error::deserialize(&mut de).map_err(|e| ExportError::Parse {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
    de.end().map_err(|e| ExportError::Parse {
        path: ".".into(),
        message: e.to_string(),
    })?;

    let mut warnings = Vec::new();
    let meta = &doc.metadata;
    if meta.format != FORMAT_NAME {
        warnings.push(format!("unexpected format name {:?}", meta.format));
    }
    if meta.version != FORMAT_VERSION {
        warnings.push(format!(
            "format version {} differs from supported version {FORMAT_VERSION}",
            meta.version
        ));
    }
    if meta.tool_version != TOOL_VERSION {
        warnings.push(format!(
            "written by colexnet {}, reading with {TOOL_VERSION}",
            meta.tool_version
        ));
    }
    if meta.kind != doc.network.kind {
        return Err(ExportError::Parse {
            path: "metadata.kind".into(),
            message: format!(
                "metadata says {} but network is {}",
                meta.kind, doc.network.kind
            ),
        });
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    doc.network.validate()?;
    Ok(Imported {
        network: doc.network,
        metadata: doc.metadata,
        warnings,
    })
}

pub fn import_graph_file(path: &Path) -> Result<Imported, ExportError> {
    let text = fs::read_to_string(path).map_err(|source| ExportError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    import_graph(&text)
}

pub use gml::{validate_gml, GmlError, GmlSummary};

/// A minimal GML grammar checker.
///
/// Accepts `key value` pairs where a value is an integer, a real, a quoted
/// string without embedded quotes, or a bracketed list of pairs. On top of the
/// grammar it checks that there is one `graph` list, that node ids are unique
/// integers and that edges reference declared nodes.
pub mod gml {
    use std::collections::BTreeSet;

    use thiserror::Error;

    #[derive(Debug, Error, PartialEq, Eq)]
    #[error("gml line {line}: {message}")]
    pub struct GmlError {
        pub line: usize,
        pub message: String,
    }

    #[derive(Debug, Clone, PartialEq, Eq)]
    pub struct GmlSummary {
        pub directed: bool,
        pub nodes: usize,
        pub edges: usize,
    }

    #[derive(Debug, Clone, PartialEq)]
    enum Value {
        Int(i64),
        Real,
        Str,
        List(Vec<(String, Value, usize)>),
    }

    struct Lexer<'a> {
        chars: std::iter::Peekable<std::str::Chars<'a>>,
        line: usize,
    }

    impl Lexer<'_> {
        fn err<T>(&self, message: impl Into<String>) -> Result<T, GmlError> {
            Err(GmlError {
                line: self.line,
                message: message.into(),
            })
        }

        fn skip_space(&mut self) {
            while let Some(&c) = self.chars.peek() {
                if c == '\n' {
                    self.line += 1;
                    self.chars.next();
                } else if c.is_whitespace() {
                    self.chars.next();
                } else if c == '#' {
                    while let Some(&c) = self.chars.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.chars.next();
                    }
                } else {
                    break;
                }
            }
        }

        fn key(&mut self) -> Result<Option<String>, GmlError> {
            self.skip_space();
            match self.chars.peek().copied() {
                None | Some(']') => return Ok(None),
                Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
                Some(c) => return self.err(format!("expected key, found {c:?}")),
            }
            let mut key = String::new();
            while let Some(&c) = self.chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    key.push(c);
                    self.chars.next();
                } else {
                    break;
                }
            }
            Ok(Some(key))
        }

        fn value(&mut self) -> Result<Value, GmlError> {
            self.skip_space();
            match self.chars.peek().copied() {
                Some('[') => {
                    self.chars.next();
                    let items = self.list()?;
                    self.skip_space();
                    if self.chars.next() != Some(']') {
                        return self.err("unterminated list");
                    }
                    Ok(Value::List(items))
                }
                Some('"') => {
                    self.chars.next();
                    loop {
                        match self.chars.next() {
                            None => return self.err("unterminated string"),
                            Some('"') => return Ok(Value::Str),
                            Some('\n') => self.line += 1,
                            Some(_) => {}
                        }
                    }
                }
                Some(c) if c == '-' || c == '+' || c.is_ascii_digit() => {
                    let mut text = String::new();
                    while let Some(&c) = self.chars.peek() {
                        if c.is_ascii_digit() || "+-.eE".contains(c) {
                            text.push(c);
                            self.chars.next();
                        } else {
                            break;
                        }
                    }
                    if let Ok(i) = text.parse::<i64>() {
                        Ok(Value::Int(i))
                    } else if text.contains('.') && text.parse::<f64>().is_ok() {
                        Ok(Value::Real)
                    } else {
                        self.err(format!("malformed number {text:?}"))
                    }
                }
                Some(c) => self.err(format!("expected value, found {c:?}")),
                None => self.err("expected value, found end of input"),
            }
        }

        fn list(&mut self) -> Result<Vec<(String, Value, usize)>, GmlError> {
            let mut items = Vec::new();
            while let Some(key) = self.key()? {
                let line = self.line;
                let value = self.value()?;
                items.push((key, value, line));
            }
            Ok(items)
        }
    }

    fn int_field(
        items: &[(String, Value, usize)],
        key: &str,
        line: usize,
    ) -> Result<i64, GmlError> {
        match items.iter().find(|(k, _, _)| k == key) {
            Some((_, Value::Int(i), _)) => Ok(*i),
            Some((_, _, l)) => Err(GmlError {
                line: *l,
                message: format!("{key} must be an integer"),
            }),
            None => Err(GmlError {
                line,
                message: format!("missing {key}"),
            }),
        }
    }

    pub fn validate_gml(text: &str) -> Result<GmlSummary, GmlError> {
        let mut lexer = Lexer {
            chars: text.chars().peekable(),
            line: 1,
        };
        let top = lexer.list()?;
        lexer.skip_space();
        if lexer.chars.peek().is_some() {
            return lexer.err("unexpected ']' at top level");
        }
        let graphs: Vec<_> = top.iter().filter(|(k, _, _)| k == "graph").collect();
        let [(_, graph, graph_line)] = graphs.as_slice() else {
            return Err(GmlError {
                line: 1,
                message: format!("expected exactly one graph, found {}", graphs.len()),
            });
        };
        let Value::List(items) = graph else {
            return Err(GmlError {
                line: *graph_line,
                message: "graph must be a list".into(),
            });
        };
        let directed = match items.iter().find(|(k, _, _)| k == "directed") {
            None | Some((_, Value::Int(0), _)) => false,
            Some((_, Value::Int(1), _)) => true,
            Some((_, _, l)) => {
                return Err(GmlError {
                    line: *l,
                    message: "directed must be 0 or 1".into(),
                })
            }
        };
        let mut ids = BTreeSet::new();
        for (k, v, line) in items {
            if k == "node" {
                let Value::List(fields) = v else {
                    return Err(GmlError {
                        line: *line,
                        message: "node must be a list".into(),
                    });
                };
                let id = int_field(fields, "id", *line)?;
                if !ids.insert(id) {
                    return Err(GmlError {
                        line: *line,
                        message: format!("duplicate node id {id}"),
                    });
                }
            }
        }
        let mut edges = 0;
        for (k, v, line) in items {
            if k == "edge" {
                let Value::List(fields) = v else {
                    return Err(GmlError {
                        line: *line,
                        message: "edge must be a list".into(),
                    });
                };
                for end in ["source", "target"] {
                    let id = int_field(fields, end, *line)?;
                    if !ids.contains(&id) {
                        return Err(GmlError {
                            line: *line,
                            message: format!("edge {end} {id} is not a node"),
                        });
                    }
                }
                edges += 1;
            }
        }
        Ok(GmlSummary {
            directed,
            nodes: ids.len(),
            edges,
        })
    }

}
