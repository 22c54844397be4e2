//! Line-oriented N-Triples reader.
//!
//! Malformed lines never abort a read: they are counted (with line numbers)
//! and skipped. Freebase IRIs are shortened to their local names, so
//! `<http://rdf.freebase.com/ns/m.0k8z>` becomes `m.0k8z`.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use flate2::read::MultiGzDecoder;

use crate::error::{Error, Result};

const FREEBASE_NS: &str = "http://rdf.freebase.com/ns/";
const GZIP_MAGIC: [u8; 2] = [0x1f, 0x8b];
/// How many individual malformed lines are kept for reporting.
const MAX_KEPT_ERRORS: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Object {
    Node(String),
    Literal { value: String, lang: Option<String> },
}

impl Object {
    pub fn as_node(&self) -> Option<&str> {
        match self {
            Object::Node(id) => Some(id),
            Object::Literal { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TripleRecord {
    pub subject: String,
    pub predicate: String,
    pub object: Object,
}

impl TripleRecord {
    pub fn nodes(subject: &str, predicate: &str, object: &str) -> Self {
        TripleRecord {
            subject: subject.to_string(),
            predicate: predicate.to_string(),
            object: Object::Node(object.to_string()),
        }
    }

    pub fn literal(subject: &str, predicate: &str, value: &str, lang: Option<&str>) -> Self {
        TripleRecord {
            subject: subject.to_string(),
            predicate: predicate.to_string(),
            object: Object::Literal {
                value: value.to_string(),
                lang: lang.map(str::to_string),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineError {
    pub line: u64,
    pub message: String,
}

impl fmt::Display for LineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// Counts of what a read produced.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseTally {
    pub lines: u64,
    pub records: u64,
    pub error_count: u64,
    /// The first malformed lines, capped.
    pub errors: Vec<LineError>,
}

impl ParseTally {
    fn record_error(&mut self, line: u64, message: String) {
        self.error_count += 1;
        if self.errors.len() < MAX_KEPT_ERRORS {
            self.errors.push(LineError { line, message });
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ParsedTriples {
    pub records: Vec<TripleRecord>,
    pub tally: ParseTally,
}

/// Parses a whole stream into memory. Gzip input is detected and decoded.
pub fn parse_ntriples<R: Read>(reader: R) -> Result<ParsedTriples> {
    let mut records = Vec::new();
    let tally = for_each_triple(reader, |t| records.push(t))?;
    Ok(ParsedTriples { records, tally })
}

/// Streams records to `sink` in line order. Only I/O failures are errors.
pub fn for_each_triple<R: Read>(reader: R, mut sink: impl FnMut(TripleRecord)) -> Result<ParseTally> {
    let mut buffered = BufReader::with_capacity(1 << 16, reader);
    if buffered.fill_buf()?.starts_with(&GZIP_MAGIC) {
        let decoded = BufReader::with_capacity(1 << 16, MultiGzDecoder::new(buffered));
        read_lines(decoded, &mut sink)
    } else {
        read_lines(buffered, &mut sink)
    }
}

/// Opens a file of N-Triples. Decompression happens in [`for_each_triple`].
pub fn open_ntriples(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

fn read_lines<B: BufRead>(mut input: B, sink: &mut impl FnMut(TripleRecord)) -> Result<ParseTally> {
    let mut tally = ParseTally::default();
    let mut buf = Vec::new();
    loop {
        buf.clear();
        if input.read_until(b'\n', &mut buf)? == 0 {
            break;
        }
        tally.lines += 1;
        let line_no = tally.lines;
        let text = match std::str::from_utf8(&buf) {
            Ok(s) => s,
            Err(_) => {
                tally.record_error(line_no, "invalid UTF-8".into());
                continue;
            }
        };
        match parse_line(text) {
            Ok(Some(t)) => {
                tally.records += 1;
                sink(t);
            }
            Ok(None) => {}
            Err(msg) => tally.record_error(line_no, msg),
        }
    }
    Ok(tally)
}

/// Parses one line. Blank lines and comments yield `Ok(None)`.
pub fn parse_line(line: &str) -> std::result::Result<Option<TripleRecord>, String> {
    let mut cur = Cursor::new(line.trim_end_matches(['\n', '\r']));
    cur.skip_ws();
    if cur.at_end() || cur.peek() == Some('#') {
        return Ok(None);
    }
    let subject = match cur.peek() {
        Some('<') => cur.iri()?,
        Some('_') => cur.blank()?,
        _ => return Err("subject must be an IRI or blank node".into()),
    };
    cur.require_ws()?;
    let predicate = match cur.peek() {
        Some('<') => cur.iri()?,
        _ => return Err("predicate must be an IRI".into()),
    };
    cur.require_ws()?;
    let object = match cur.peek() {
        Some('<') => Object::Node(cur.iri()?),
        Some('_') => Object::Node(cur.blank()?),
        Some('"') => cur.literal()?,
        _ => return Err("object must be an IRI, blank node or literal".into()),
    };
    cur.skip_ws();
    if cur.peek() != Some('.') {
        return Err("missing terminating `.`".into());
    }
    cur.bump();
    cur.skip_ws();
    if !(cur.at_end() || cur.peek() == Some('#')) {
        return Err("trailing content after `.`".into());
    }
    Ok(Some(TripleRecord {
        subject,
        predicate,
        object,
    }))
}

/// BCP-47-style shape check: `alpha{1,8}(-alnum{1,8})*`.
pub fn is_well_formed_lang(tag: &str) -> bool {
    let mut parts = tag.split('-');
    let first = parts.next().unwrap_or("");
    let ok_len = |s: &str| (1..=8).contains(&s.len());
    ok_len(first)
        && first.chars().all(|c| c.is_ascii_alphabetic())
        && parts.all(|p| ok_len(p) && p.chars().all(|c| c.is_ascii_alphanumeric()))
}

fn shorten_iri(iri: &str) -> String {
    iri.strip_prefix(FREEBASE_NS).unwrap_or(iri).to_string()
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t')) {
            self.pos += 1;
        }
    }

    fn require_ws(&mut self) -> std::result::Result<(), String> {
        let before = self.pos;
        self.skip_ws();
        if self.pos == before {
            Err("expected whitespace between terms".into())
        } else {
            Ok(())
        }
    }

    fn iri(&mut self) -> std::result::Result<String, String> {
        self.bump(); // '<'
        let rest = self.rest();
        let end = rest.find('>').ok_or("unterminated IRI")?;
        let body = &rest[..end];
        if body.is_empty() {
            return Err("empty IRI".into());
        }
        if body.chars().any(|c| c.is_whitespace() || c == '<' || c == '"') {
            return Err(format!("illegal character in IRI `{body}`"));
        }
        self.pos += end + 1;
        Ok(shorten_iri(body))
    }

    fn blank(&mut self) -> std::result::Result<String, String> {
        let rest = self.rest();
        if !rest.starts_with("_:") {
            return Err("malformed blank node".into());
        }
        let label_len = rest[2..]
            .find(|c: char| c.is_whitespace())
            .unwrap_or(rest.len() - 2);
        if label_len == 0 {
            return Err("empty blank node label".into());
        }
        let label = &rest[..2 + label_len];
        self.pos += label.len();
        Ok(label.to_string())
    }

    fn literal(&mut self) -> std::result::Result<Object, String> {
        self.bump(); // '"'
        let mut value = String::new();
        loop {
            match self.bump() {
                None => return Err("unterminated literal".into()),
                Some('"') => break,
                Some('\\') => value.push(self.escape()?),
                Some(c) => value.push(c),
            }
        }
        let lang = match self.peek() {
            Some('@') => {
                self.bump();
                let rest = self.rest();
                let len = rest
                    .find(|c: char| !(c.is_ascii_alphanumeric() || c == '-'))
                    .unwrap_or(rest.len());
                let tag = &rest[..len];
                if !is_well_formed_lang(tag) {
                    return Err(format!("malformed language tag `{tag}`"));
                }
                self.pos += len;
                Some(tag.to_string())
            }
            Some('^') => {
                if !self.rest().starts_with("^^<") {
                    return Err("malformed datatype".into());
                }
                self.pos += 2;
                self.iri()?;
                None
            }
            _ => None,
        };
        Ok(Object::Literal { value, lang })
    }

    fn escape(&mut self) -> std::result::Result<char, String> {
        let c = self.bump().ok_or("dangling escape")?;
        Ok(match c {
            't' => '\t',
            'b' => '\u{8}',
            'n' => '\n',
            'r' => '\r',
            'f' => '\u{c}',
            '"' => '"',
            '\'' => '\'',
            '\\' => '\\',
            'u' => self.hex_char(4)?,
            'U' => self.hex_char(8)?,
            other => return Err(format!("unknown escape `\\{other}`")),
        })
    }

    fn hex_char(&mut self, digits: usize) -> std::result::Result<char, String> {
        let rest = self.rest();
        let hex = rest.get(..digits).ok_or("truncated unicode escape")?;
        let code = u32::from_str_radix(hex, 16).map_err(|_| "bad unicode escape")?;
        self.pos += digits;
        char::from_u32(code).ok_or_else(|| "invalid code point".to_string())
    }
}
