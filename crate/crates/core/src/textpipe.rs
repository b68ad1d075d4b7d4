//! Corpus cleaning: Russian-text rejection, lower-casing and tokenization
//! over the Cyrillic-Uzbek alphabet.

use std::collections::BTreeSet;
use std::fs;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// The 35 lowercase letters of the modern Cyrillic-Uzbek alphabet.
pub const UZBEK_LETTERS: [char; 35] = [
    'а', 'б', 'в', 'г', 'д', 'е', 'ё', 'ж', 'з', 'и', 'й', 'к', 'л', 'м', 'н', 'о', 'п', 'р', 'с',
    'т', 'у', 'ф', 'х', 'ц', 'ч', 'ш', 'ъ', 'ь', 'э', 'ю', 'я', 'ў', 'қ', 'ғ', 'ҳ',
];

pub const HYPHEN: char = '-';

/// A single extracted article.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub text: String,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        let id = id.into();
        assert!(!id.is_empty(), "document id must be non-empty");
        Document {
            id,
            text: text.into(),
        }
    }
}

/// Accepted token characters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    letters: BTreeSet<char>,
}

impl Default for Alphabet {
    fn default() -> Self {
        Alphabet::uzbek()
    }
}

impl Alphabet {
    pub fn uzbek() -> Self {
        Alphabet {
            letters: UZBEK_LETTERS.iter().copied().collect(),
        }
    }

    /// The Uzbek alphabet plus щ, which appears in some Russian loanwords.
    pub fn uzbek_with_shcha() -> Self {
        let mut a = Alphabet::uzbek();
        a.letters.insert('щ');
        a
    }

    pub fn letters(&self) -> impl Iterator<Item = char> + '_ {
        self.letters.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    #[inline]
    pub fn is_letter(&self, c: char) -> bool {
        self.letters.contains(&c)
    }

    #[inline]
    pub fn is_token_char(&self, c: char) -> bool {
        c == HYPHEN || self.is_letter(c)
    }

    /// Split normalized text into tokens.
    ///
    /// Tokens are maximal runs of alphabet letters and hyphens, with
    /// leading and trailing hyphens stripped. Hyphen-only runs vanish.
    pub fn tokenize<'a>(&'a self, text: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        text.split(move |c: char| !self.is_token_char(c))
            .map(|run| run.trim_matches(HYPHEN))
            .filter(|tok| !tok.is_empty())
    }
}

/// Running counters reported by [`ingest`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CorpusStats {
    pub documents_seen: u64,
    pub documents_rejected: u64,
    pub tokens_emitted: u64,
}

/// False iff the text contains `ы` or `Ы` anywhere.
pub fn is_uzbek_document(text: &str) -> bool {
    !text.contains(['ы', 'Ы'])
}

#[inline]
fn is_cyrillic(c: char) -> bool {
    ('\u{0400}'..='\u{052F}').contains(&c)
}

/// Lower-case Cyrillic letters; every other code point is left untouched.
pub fn normalize(text: &str) -> String {
    text.chars()
        .map(|c| {
            if is_cyrillic(c) && c.is_uppercase() {
                c.to_lowercase().next().unwrap_or(c)
            } else {
                c
            }
        })
        .collect()
}

/// Tokenize with the default Uzbek alphabet.
pub fn tokenize(text: &str) -> Vec<&str> {
    static ALPHABET: std::sync::OnceLock<Alphabet> = std::sync::OnceLock::new();
    ALPHABET
        .get_or_init(Alphabet::uzbek)
        .tokenize(text)
        .collect()
}

/// Clean every document from `source` into a token stream on `sink`.
///
/// Accepted documents become one line of space-separated tokens; rejected
/// ones produce nothing.
pub fn ingest<I, W>(source: I, sink: &mut W, alphabet: &Alphabet) -> Result<CorpusStats>
where
    I: IntoIterator<Item = Result<Document>>,
    W: Write,
{
    let mut stats = CorpusStats::default();
    let mut line = String::new();
    for doc in source {
        let doc = doc?;
        stats.documents_seen += 1;
        if !is_uzbek_document(&doc.text) {
            stats.documents_rejected += 1;
            continue;
        }
        let normalized = normalize(&doc.text);
        line.clear();
        for (n, tok) in alphabet.tokenize(&normalized).enumerate() {
            if n > 0 {
                line.push(' ');
            }
            line.push_str(tok);
            stats.tokens_emitted += 1;
        }
        line.push('\n');
        sink.write_all(line.as_bytes())
            .map_err(|source| Error::Document {
                id: doc.id.clone(),
                source,
            })?;
    }
    Ok(stats)
}

/// Documents from a directory tree (every `.txt` file is one document, in
/// path order) or from a single file holding one document per line.
pub fn read_documents(path: &Path) -> Result<Box<dyn Iterator<Item = Result<Document>>>> {
    if path.is_dir() {
        let mut files = Vec::new();
        collect_txt_files(path, &mut files)?;
        files.sort();
        let root = path.to_path_buf();
        Ok(Box::new(files.into_iter().map(move |f| {
            let bytes = fs::read(&f)?;
            let id = f
                .strip_prefix(&root)
                .unwrap_or(&f)
                .to_string_lossy()
                .into_owned();
            let text = String::from_utf8(bytes)
                .map_err(|_| Error::Format(format!("document {id} is not valid UTF-8")))?;
            Ok(Document::new(id, text))
        })))
    } else {
        let reader = BufReader::new(fs::File::open(path)?);
        let name = path.display().to_string();
        Ok(Box::new(line_documents(reader, name)))
    }
}

/// One document per line; ids are `<name>:<line number>`.
pub fn line_documents<R: BufRead>(
    reader: R,
    name: String,
) -> impl Iterator<Item = Result<Document>> {
    reader.split(b'\n').enumerate().map(move |(n, line)| {
        let mut bytes = line?;
        if bytes.last() == Some(&b'\r') {
            bytes.pop();
        }
        let text = String::from_utf8(bytes).map_err(|_| Error::Utf8 { line: n + 1 })?;
        Ok(Document::new(format!("{name}:{}", n + 1), text))
    })
}

fn collect_txt_files(dir: &Path, out: &mut Vec<PathBuf>) -> io::Result<()> {
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_dir() {
            collect_txt_files(&path, out)?;
        } else if path.extension().is_some_and(|e| e == "txt") {
            out.push(path);
        }
    }
    Ok(())
}
