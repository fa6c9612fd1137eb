//! Reader and writer for multi-label ARFF files in the MEKA convention.
//!
//! The label count is declared inside the relation name as `-C <c>`:
//! a positive `c` puts the labels first, a negative one puts the last
//! `|c|` attributes in the label block.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use flate2::read::MultiGzDecoder;
use serde::{Deserialize, Serialize};

use crate::domain::{FeatureKind, FeatureSchema, Instance, LabelVector, Value};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AttributeKind {
    Numeric,
    Nominal(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    pub kind: AttributeKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamHeader {
    pub relation_name: String,
    pub label_count: usize,
    pub labels_at_front: bool,
    pub attributes: Vec<Attribute>,
}

impl StreamHeader {
    /// Number of feature attributes, `M`.
    pub fn feature_count(&self) -> usize {
        self.attributes.len() - self.label_count
    }

    fn label_offset(&self) -> usize {
        if self.labels_at_front {
            0
        } else {
            self.feature_count()
        }
    }

    fn feature_offset(&self) -> usize {
        if self.labels_at_front {
            self.label_count
        } else {
            0
        }
    }

    pub fn label_attributes(&self) -> &[Attribute] {
        let start = self.label_offset();
        &self.attributes[start..start + self.label_count]
    }

    pub fn feature_attributes(&self) -> &[Attribute] {
        let start = self.feature_offset();
        &self.attributes[start..start + self.feature_count()]
    }

    pub fn label_names(&self) -> Vec<String> {
        self.label_attributes().iter().map(|a| a.name.clone()).collect()
    }

    pub fn schema(&self) -> FeatureSchema {
        FeatureSchema::new(
            self.feature_attributes()
                .iter()
                .map(|a| match &a.kind {
                    AttributeKind::Numeric => FeatureKind::Numeric,
                    AttributeKind::Nominal(values) => FeatureKind::Nominal {
                        categories: values.len(),
                    },
                })
                .collect(),
        )
    }

    /// `(is_label, position within its block)` for attribute `a`.
    fn locate(&self, a: usize) -> (bool, usize) {
        let lo = self.label_offset();
        if a >= lo && a < lo + self.label_count {
            (true, a - lo)
        } else if self.labels_at_front {
            (false, a - self.label_count)
        } else {
            (false, a)
        }
    }
}

/// Parses everything up to and including the `@data` line.
pub fn parse_header(text: &str) -> Result<StreamHeader> {
    let mut builder = HeaderBuilder::default();
    for (i, line) in text.lines().enumerate() {
        if builder.feed(line, i + 1)? {
            return builder.finish();
        }
    }
    builder.finish()
}

#[derive(Default)]
struct HeaderBuilder {
    relation: Option<String>,
    attributes: Vec<Attribute>,
    seen_data: bool,
}

impl HeaderBuilder {
    /// Returns true once the `@data` marker has been consumed.
    fn feed(&mut self, line: &str, line_no: usize) -> Result<bool> {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            return Ok(false);
        }
        let lower = trimmed.to_ascii_lowercase();
        if lower.starts_with("@relation") {
            self.relation = Some(trimmed["@relation".len()..].trim().to_string());
        } else if lower.starts_with("@attribute") {
            if self.relation.is_none() {
                return Err(Error::parse(line_no, "@attribute before @relation"));
            }
            let attr = parse_attribute(trimmed["@attribute".len()..].trim())
                .map_err(|msg| Error::parse(line_no, msg))?;
            self.attributes.push(attr);
        } else if lower.starts_with("@data") {
            self.seen_data = true;
            return Ok(true);
        } else {
            return Err(Error::parse(line_no, format!("unexpected header line `{trimmed}`")));
        }
        Ok(false)
    }

    fn finish(self) -> Result<StreamHeader> {
        let relation = self
            .relation
            .ok_or_else(|| Error::Header("missing @relation line".into()))?;
        if !self.seen_data {
            return Err(Error::Header("missing @data section".into()));
        }
        let declared = label_option(&relation)?;
        if declared == 0 {
            return Err(Error::Header("label count -C 0 declares no labels".into()));
        }
        let label_count = declared.unsigned_abs() as usize;
        if self.attributes.len() <= label_count {
            return Err(Error::Header(format!(
                "{} attributes cannot hold {label_count} labels and at least one feature",
                self.attributes.len()
            )));
        }
        let header = StreamHeader {
            relation_name: unquote(&relation).to_string(),
            label_count,
            labels_at_front: declared > 0,
            attributes: self.attributes,
        };
        for attr in header.label_attributes() {
            if let AttributeKind::Nominal(values) = &attr.kind {
                let binary = values.len() == 2 && values.iter().any(|v| v == "0") && values.iter().any(|v| v == "1");
                if !binary {
                    return Err(Error::Header(format!(
                        "label attribute `{}` must be binary {{0,1}}",
                        attr.name
                    )));
                }
            }
        }
        Ok(header)
    }
}

/// Extracts the integer following the `-C` option in a relation name.
fn label_option(relation: &str) -> Result<i64> {
    let cleaned: String = relation
        .chars()
        .map(|c| if c == '\'' || c == '"' || c == ':' { ' ' } else { c })
        .collect();
    let mut tokens = cleaned.split_whitespace();
    while let Some(tok) = tokens.next() {
        if tok == "-C" {
            let value = tokens
                .next()
                .ok_or_else(|| Error::Header("label count undeclared: -C without a value".into()))?;
            return value
                .parse::<i64>()
                .map_err(|_| Error::Header(format!("label count undeclared: `-C {value}` is not an integer")));
        }
        if let Some(rest) = tok.strip_prefix("-C") {
            if let Ok(v) = rest.parse::<i64>() {
                return Ok(v);
            }
        }
    }
    Err(Error::Header("label count undeclared (no -C option in @relation)".into()))
}

fn unquote(s: &str) -> &str {
    let s = s.trim();
    if s.len() >= 2 && ((s.starts_with('\'') && s.ends_with('\'')) || (s.starts_with('"') && s.ends_with('"'))) {
        &s[1..s.len() - 1]
    } else {
        s
    }
}

/// Splits the next (possibly quoted) token off `s`.
fn take_token(s: &str) -> std::result::Result<(String, &str), String> {
    let s = s.trim_start();
    let mut chars = s.char_indices();
    match chars.next() {
        Some((_, q @ ('\'' | '"'))) => {
            let mut out = String::new();
            let mut escaped = false;
            for (i, c) in chars {
                if escaped {
                    out.push(c);
                    escaped = false;
                } else if c == '\\' {
                    escaped = true;
                } else if c == q {
                    return Ok((out, &s[i + 1..]));
                } else {
                    out.push(c);
                }
            }
            Err(format!("unterminated quote in `{s}`"))
        }
        Some(_) => {
            let end = s.find(|c: char| c.is_whitespace() || c == '{').unwrap_or(s.len());
            Ok((s[..end].to_string(), &s[end..]))
        }
        None => Err("missing token".into()),
    }
}

fn parse_attribute(rest: &str) -> std::result::Result<Attribute, String> {
    let (name, rest) = take_token(rest)?;
    let rest = rest.trim();
    if let Some(inner) = rest.strip_prefix('{') {
        let inner = inner
            .strip_suffix('}')
            .ok_or_else(|| format!("nominal attribute `{name}` missing closing brace"))?;
        let values = split_row(inner)?
            .into_iter()
            .map(|v| v.trim().to_string())
            .collect::<Vec<_>>();
        if values.is_empty() {
            return Err(format!("nominal attribute `{name}` declares no values"));
        }
        return Ok(Attribute {
            name,
            kind: AttributeKind::Nominal(values),
        });
    }
    match rest.to_ascii_lowercase().as_str() {
        "numeric" | "real" | "integer" => Ok(Attribute {
            name,
            kind: AttributeKind::Numeric,
        }),
        other => Err(format!("unsupported attribute type `{other}` for `{name}`")),
    }
}

/// Comma split that honours single and double quotes.
fn split_row(s: &str) -> std::result::Result<Vec<String>, String> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut quote: Option<char> = None;
    let mut escaped = false;
    for c in s.chars() {
        if escaped {
            current.push(c);
            escaped = false;
            continue;
        }
        match (quote, c) {
            (_, '\\') => escaped = true,
            (Some(q), c) if c == q => quote = None,
            (Some(_), c) => current.push(c),
            (None, '\'' | '"') => quote = Some(c),
            (None, ',') => out.push(std::mem::take(&mut current).trim().to_string()),
            (None, c) => current.push(c),
        }
    }
    if quote.is_some() {
        return Err("unterminated quote".into());
    }
    out.push(current.trim().to_string());
    Ok(out)
}

/// Parses one `@data` row, dense or sparse.
pub fn read_instance(header: &StreamHeader, line: &str, line_no: usize) -> Result<Instance> {
    let total = header.attributes.len();
    let mut features = vec![Value::Missing; header.feature_count()];
    let mut labels = LabelVector::zeros(header.label_count);
    let trimmed = line.trim();

    if let Some(body) = trimmed.strip_prefix('{') {
        let body = body
            .strip_suffix('}')
            .ok_or_else(|| Error::parse(line_no, "sparse row missing closing brace"))?;
        // omitted sparse entries are zero
        for (m, attr) in header.feature_attributes().iter().enumerate() {
            features[m] = match &attr.kind {
                AttributeKind::Numeric => Value::Numeric(0.0),
                AttributeKind::Nominal(values) => nominal_value(values, "0"),
            };
        }
        let mut seen = vec![false; total];
        for entry in split_row(body).map_err(|m| Error::parse(line_no, m))? {
            if entry.is_empty() {
                continue;
            }
            let (index, value) = entry
                .split_once(char::is_whitespace)
                .ok_or_else(|| Error::parse(line_no, format!("sparse entry `{entry}` lacks a value")))?;
            let index: usize = index
                .trim()
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad sparse index `{index}`")))?;
            if index >= total {
                return Err(Error::parse(
                    line_no,
                    format!("sparse index {index} out of range (attributes: {total})"),
                ));
            }
            if std::mem::replace(&mut seen[index], true) {
                return Err(Error::parse(line_no, format!("duplicate sparse index {index}")));
            }
            assign(header, index, unquote(value), &mut features, &mut labels, line_no)?;
        }
    } else {
        let tokens = split_row(trimmed).map_err(|m| Error::parse(line_no, m))?;
        if tokens.len() != total {
            return Err(Error::parse(
                line_no,
                format!("expected {total} values, found {}", tokens.len()),
            ));
        }
        for (a, tok) in tokens.iter().enumerate() {
            assign(header, a, tok, &mut features, &mut labels, line_no)?;
        }
    }
    Ok(Instance::labeled(features, labels))
}

fn nominal_value(values: &[String], token: &str) -> Value {
    match values.iter().position(|v| v == token) {
        Some(i) => Value::Nominal(i as u32),
        None => Value::Nominal(values.len() as u32),
    }
}

fn assign(
    header: &StreamHeader,
    attr: usize,
    token: &str,
    features: &mut [Value],
    labels: &mut LabelVector,
    line_no: usize,
) -> Result<()> {
    let (is_label, pos) = header.locate(attr);
    let token = token.trim();
    if is_label {
        let bit = match token {
            "0" => false,
            "1" => true,
            "?" => return Err(Error::parse(line_no, format!("label {pos} is missing"))),
            other => match other.parse::<f64>() {
                Ok(v) if v == 0.0 => false,
                Ok(v) if v == 1.0 => true,
                _ => {
                    return Err(Error::parse(
                        line_no,
                        format!("label {pos} has value `{other}`; expected 0 or 1"),
                    ))
                }
            },
        };
        labels.set(pos, bit);
        return Ok(());
    }
    features[pos] = if token == "?" {
        Value::Missing
    } else {
        match &header.attributes[attr].kind {
            AttributeKind::Numeric => Value::Numeric(
                token
                    .parse::<f64>()
                    .map_err(|_| Error::parse(line_no, format!("feature {pos}: cannot parse `{token}` as a number")))?,
            ),
            AttributeKind::Nominal(values) => nominal_value(values, token),
        }
    };
    Ok(())
}

/// Streaming reader: the header is parsed eagerly, data rows on demand.
pub struct ArffReader<R> {
    header: StreamHeader,
    lines: std::io::Lines<R>,
    line_no: usize,
}

impl<R: BufRead> ArffReader<R> {
    pub fn new(reader: R) -> Result<Self> {
        let mut lines = reader.lines();
        let mut builder = HeaderBuilder::default();
        let mut line_no = 0;
        loop {
            let Some(line) = lines.next() else { break };
            line_no += 1;
            if builder.feed(&line?, line_no)? {
                break;
            }
        }
        Ok(ArffReader {
            header: builder.finish()?,
            lines,
            line_no,
        })
    }

    pub fn header(&self) -> &StreamHeader {
        &self.header
    }
}

impl<R: BufRead> Iterator for ArffReader<R> {
    type Item = Result<Instance>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = match self.lines.next()? {
                Ok(l) => l,
                Err(e) => return Some(Err(e.into())),
            };
            self.line_no += 1;
            let t = line.trim();
            if t.is_empty() || t.starts_with('%') {
                continue;
            }
            return Some(read_instance(&self.header, t, self.line_no));
        }
    }
}

pub type FileReader = ArffReader<Box<dyn BufRead + Send>>;

/// Opens an ARFF file; a `.gz` extension selects gzip decompression.
pub fn open(path: impl AsRef<Path>) -> Result<FileReader> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::from(e).in_file(path))?;
    let reader: Box<dyn BufRead + Send> = if path.extension().is_some_and(|e| e == "gz") {
        Box::new(BufReader::new(MultiGzDecoder::new(file)))
    } else {
        Box::new(BufReader::new(file))
    };
    ArffReader::new(reader).map_err(|e| e.in_file(path))
}

fn quote_if_needed(s: &str) -> String {
    if s.is_empty() || s.contains(|c: char| c.is_whitespace() || ",{}'\"%".contains(c)) {
        format!("'{}'", s.replace('\\', "\\\\").replace('\'', "\\'"))
    } else {
        s.to_string()
    }
}

pub fn write_header<W: Write>(out: &mut W, header: &StreamHeader) -> std::io::Result<()> {
    let c = header.label_count as i64 * if header.labels_at_front { 1 } else { -1 };
    let name = header.relation_name.replace('\'', "");
    let relation = if label_option(&name).is_ok() {
        name
    } else {
        format!("{name}: -C {c}")
    };
    writeln!(out, "@relation '{relation}'")?;
    writeln!(out)?;
    for attr in &header.attributes {
        match &attr.kind {
            AttributeKind::Numeric => writeln!(out, "@attribute {} numeric", quote_if_needed(&attr.name))?,
            AttributeKind::Nominal(values) => {
                let vals: Vec<String> = values.iter().map(|v| quote_if_needed(v)).collect();
                writeln!(out, "@attribute {} {{{}}}", quote_if_needed(&attr.name), vals.join(","))?
            }
        }
    }
    writeln!(out)?;
    writeln!(out, "@data")
}

/// Dense serialization of one instance under `header`.
pub fn format_instance(header: &StreamHeader, instance: &Instance) -> Result<String> {
    let labels = instance.labels.as_ref().ok_or(Error::Unlabeled(0))?;
    if instance.features.len() != header.feature_count() || labels.len() != header.label_count {
        return Err(Error::DimensionMismatch {
            expected: header.attributes.len(),
            found: instance.features.len() + labels.len(),
        });
    }
    let mut cells = Vec::with_capacity(header.attributes.len());
    for a in 0..header.attributes.len() {
        let (is_label, pos) = header.locate(a);
        if is_label {
            cells.push(if labels.get(pos) { "1" } else { "0" }.to_string());
            continue;
        }
        cells.push(match (&instance.features[pos], &header.attributes[a].kind) {
            (Value::Missing, _) => "?".to_string(),
            (Value::Numeric(v), _) => format!("{v}"),
            (Value::Nominal(i), AttributeKind::Nominal(values)) => match values.get(*i as usize) {
                Some(v) => quote_if_needed(v),
                None => "?".to_string(),
            },
            (Value::Nominal(i), AttributeKind::Numeric) => format!("{i}"),
        });
    }
    Ok(cells.join(","))
}
