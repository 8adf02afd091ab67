//! Tokens and interned token sequences.
//!
//! Clone equality is decided purely by token text: two tokens are the same
//! symbol iff their texts are byte-equal. Kinds, lines, and columns are
//! metadata carried along for reporting.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::ops::Range;

/// Lexical class of a token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Ident,
    Number,
    Str,
    Op,
    Newline,
    Unknown,
    /// Synthetic separator between notebook code cells. Its text is unique
    /// within the file, so no repeated subsequence can contain it.
    Barrier,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    /// 1-based source line; 0 for synthetic barrier tokens.
    pub line: u32,
    /// 1-based column in characters; 0 for synthetic barrier tokens.
    pub col: u32,
}

/// An interned token stream for one file.
///
/// `symbols()[i] == symbols()[j]` holds exactly when `tokens()[i].text ==
/// tokens()[j].text`; ids are assigned densely in first-occurrence order.
/// For notebook-derived sequences, `cell_spans()` lists each code cell's
/// token range (barrier tokens sit between spans and belong to none).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSequence {
    file_id: String,
    tokens: Vec<Token>,
    interned: Vec<u32>,
    cell_spans: Option<Vec<Range<usize>>>,
}

impl TokenSequence {
    /// Builds a synthetic sequence directly from symbol ids, for tests and
    /// randomized verification. Each id is given a distinct placeholder
    /// text, so the interning invariant holds for any id assignment.
    /// Ids must be below `u32::MAX`, which is reserved.
    pub fn from_symbols(file_id: &str, ids: &[u32]) -> TokenSequence {
        let tokens = ids
            .iter()
            .enumerate()
            .map(|(i, &id)| {
                debug_assert!(id < u32::MAX, "symbol id {id} is reserved");
                Token {
                    kind: TokenKind::Unknown,
                    text: alloc::format!("#{id}"),
                    line: 1,
                    col: (i + 1) as u32,
                }
            })
            .collect();
        TokenSequence {
            file_id: String::from(file_id),
            tokens,
            interned: ids.to_vec(),
            cell_spans: None,
        }
    }

    pub fn file_id(&self) -> &str {
        &self.file_id
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    /// Interned symbol ids, one per token.
    pub fn symbols(&self) -> &[u32] {
        &self.interned
    }

    pub fn len(&self) -> usize {
        self.interned.len()
    }

    pub fn is_empty(&self) -> bool {
        self.interned.is_empty()
    }

    /// `Some` for notebook-derived sequences, `None` for plain sources.
    pub fn cell_spans(&self) -> Option<&[Range<usize>]> {
        self.cell_spans.as_deref()
    }
}

/// Accumulates tokens, interning by text as they arrive.
pub(crate) struct SequenceBuilder {
    file_id: String,
    tokens: Vec<Token>,
    interned: Vec<u32>,
    ids: BTreeMap<String, u32>,
    spans: Option<Vec<Range<usize>>>,
    open_span: usize,
}

impl SequenceBuilder {
    pub(crate) fn new(file_id: &str, with_spans: bool) -> SequenceBuilder {
        SequenceBuilder {
            file_id: String::from(file_id),
            tokens: Vec::new(),
            interned: Vec::new(),
            ids: BTreeMap::new(),
            spans: if with_spans { Some(Vec::new()) } else { None },
            open_span: 0,
        }
    }

    pub(crate) fn push(&mut self, token: Token) {
        let next = self.ids.len() as u32;
        let id = *self.ids.entry(token.text.clone()).or_insert(next);
        self.interned.push(id);
        self.tokens.push(token);
    }

    pub(crate) fn begin_span(&mut self) {
        self.open_span = self.tokens.len();
    }

    pub(crate) fn end_span(&mut self) {
        let range = self.open_span..self.tokens.len();
        self.spans
            .as_mut()
            .expect("span recorded on a spanless builder")
            .push(range);
    }

    pub(crate) fn finish(self) -> TokenSequence {
        TokenSequence {
            file_id: self.file_id,
            tokens: self.tokens,
            interned: self.interned,
            cell_spans: self.spans,
        }
    }
}
