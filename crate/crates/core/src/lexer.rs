//! Tolerant Python-flavoured tokenizer.
//!
//! The tokenizer is total: any input string produces a token stream, never
//! an error. Rules:
//!
//! * `#` comments and whitespace are dropped;
//! * one `NEWLINE` token ends every logical line that produced at least one
//!   token (a final line without a trailing newline included). Physical
//!   newlines inside brackets or escaped with `\` continue the line;
//! * string literals become a single `STRING` token, prefix letters
//!   (`r`, `b`, `u`, `f`, pairwise combinations) included. Triple-quoted
//!   strings span lines; a string missing its closing quote consumes the
//!   rest of the input;
//! * identifier runs are `IDENT`, number-like runs are `NUMBER`,
//!   punctuation is `OP` with maximal munch, anything else is `UNKNOWN`.
//!
//! The generic profile applies the same rules; kinds are metadata only, so
//! the distinction exists for frontend selection, not behaviour.

use alloc::string::String;
use alloc::vec::Vec;

use crate::token::{SequenceBuilder, Token, TokenKind, TokenSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LexProfile {
    Script,
    Generic,
}

/// How notebook code cells are joined into one sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellBoundary {
    /// Insert a unique `BARRIER` token between consecutive code cells so no
    /// repeated subsequence can cross a cell edge.
    Barrier,
    /// Concatenate cells directly.
    None,
}

/// Tokenizes one source file. `cell_spans` is `None` on the result.
pub fn tokenize_source(file_id: &str, text: &str, profile: LexProfile) -> TokenSequence {
    let mut b = SequenceBuilder::new(file_id, false);
    for t in lex(text, profile) {
        b.push(t);
    }
    b.finish()
}

/// Tokenizes notebook code cells in order into one sequence.
///
/// Lines and columns restart at 1 in every cell. With
/// [`CellBoundary::Barrier`], a barrier token whose text collides with no
/// other token text in the file is placed between consecutive cells.
pub fn tokenize_cells(
    file_id: &str,
    cells: &[&str],
    profile: LexProfile,
    boundary: CellBoundary,
) -> TokenSequence {
    let lexed: Vec<Vec<Token>> = cells.iter().map(|c| lex(c, profile)).collect();
    let barrier_texts = match boundary {
        CellBoundary::Barrier if cells.len() >= 2 => barrier_texts(&lexed),
        _ => Vec::new(),
    };
    let mut b = SequenceBuilder::new(file_id, true);
    for (i, tokens) in lexed.into_iter().enumerate() {
        if i > 0 {
            if let Some(text) = barrier_texts.get(i - 1) {
                b.push(Token {
                    kind: TokenKind::Barrier,
                    text: text.clone(),
                    line: 0,
                    col: 0,
                });
            }
        }
        b.begin_span();
        for t in tokens {
            b.push(t);
        }
        b.end_span();
    }
    b.finish()
}

/// Picks barrier texts that collide with no cell token text. Source tokens
/// are literal substrings of the cells, so a NUL-framed name is never hit
/// in practice; the salt loop makes uniqueness unconditional.
fn barrier_texts(lexed: &[Vec<Token>]) -> Vec<String> {
    let count = lexed.len() - 1;
    let mut salt = 0u32;
    loop {
        let candidate: Vec<String> = (0..count)
            .map(|i| {
                if salt == 0 {
                    alloc::format!("\u{0}cell-barrier-{i}\u{0}")
                } else {
                    alloc::format!("\u{0}cell-barrier-{i}+{salt}\u{0}")
                }
            })
            .collect();
        let clash = lexed
            .iter()
            .flatten()
            .any(|t| candidate.contains(&t.text));
        if !clash {
            return candidate;
        }
        salt += 1;
    }
}

const OPS3: &[&str] = &["**=", "//=", "<<=", ">>=", "..."];
const OPS2: &[&str] = &[
    "**", "//", "<<", ">>", "<=", ">=", "==", "!=", "->", ":=", "+=", "-=", "*=", "/=", "%=",
    "@=", "&=", "|=", "^=",
];

fn is_op_char(c: char) -> bool {
    c.is_ascii_punctuation() && c != '#' && c != '"' && c != '\'' && c != '_'
}

fn is_ident_start(c: char) -> bool {
    c == '_' || c.is_alphabetic()
}

fn is_ident_char(c: char) -> bool {
    c == '_' || c.is_alphanumeric()
}

fn is_string_prefix(s: &str) -> bool {
    (1..=2).contains(&s.len()) && s.chars().all(|c| matches!(c, 'r' | 'b' | 'u' | 'f' | 'R' | 'B' | 'U' | 'F'))
}

struct Lexer<'a> {
    src: &'a str,
    chars: Vec<(usize, char)>,
    pos: usize,
    line: u32,
    col: u32,
    depth: u32,
    line_has_tokens: bool,
    out: Vec<Token>,
}

pub(crate) fn lex(src: &str, _profile: LexProfile) -> Vec<Token> {
    let mut lx = Lexer {
        src,
        chars: src.char_indices().collect(),
        pos: 0,
        line: 1,
        col: 1,
        depth: 0,
        line_has_tokens: false,
        out: Vec::new(),
    };
    lx.run();
    lx.out
}

impl<'a> Lexer<'a> {
    fn peek(&self, ahead: usize) -> Option<char> {
        self.chars.get(self.pos + ahead).map(|&(_, c)| c)
    }

    fn byte_at(&self, pos: usize) -> usize {
        self.chars.get(pos).map_or(self.src.len(), |&(b, _)| b)
    }

    fn bump(&mut self) -> char {
        let (_, c) = self.chars[self.pos];
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }

    fn emit(&mut self, kind: TokenKind, start: usize, line: u32, col: u32) {
        let text = &self.src[self.byte_at(start)..self.byte_at(self.pos)];
        self.out.push(Token {
            kind,
            text: String::from(text),
            line,
            col,
        });
        self.line_has_tokens = true;
    }

    fn run(&mut self) {
        while let Some(c) = self.peek(0) {
            match c {
                '\n' => {
                    let (line, col) = (self.line, self.col);
                    self.bump();
                    if self.depth == 0 && self.line_has_tokens {
                        self.out.push(Token {
                            kind: TokenKind::Newline,
                            text: String::from("\n"),
                            line,
                            col,
                        });
                        self.line_has_tokens = false;
                    }
                }
                ' ' | '\t' | '\r' | '\x0b' | '\x0c' => {
                    self.bump();
                }
                '#' => {
                    while self.peek(0).is_some_and(|c| c != '\n') {
                        self.bump();
                    }
                }
                '\\' if self.peek(1) == Some('\n') => {
                    self.bump();
                    self.bump();
                }
                '\\' if self.peek(1) == Some('\r') && self.peek(2) == Some('\n') => {
                    self.bump();
                    self.bump();
                    self.bump();
                }
                '\'' | '"' => self.scan_string(self.pos, self.line, self.col),
                c if c.is_ascii_digit() => self.scan_number(),
                '.' if self.peek(1).is_some_and(|c| c.is_ascii_digit()) => self.scan_number(),
                c if is_ident_start(c) => self.scan_word(),
                c if is_op_char(c) => self.scan_operator(),
                _ => {
                    let (start, line, col) = (self.pos, self.line, self.col);
                    self.bump();
                    self.emit(TokenKind::Unknown, start, line, col);
                }
            }
        }
        if self.line_has_tokens {
            self.out.push(Token {
                kind: TokenKind::Newline,
                text: String::from("\n"),
                line: self.line,
                col: self.col,
            });
        }
    }

    fn scan_string(&mut self, start: usize, line: u32, col: u32) {
        let quote = self.bump();
        let triple = self.peek(0) == Some(quote) && self.peek(1) == Some(quote);
        if triple {
            self.bump();
            self.bump();
        }
        loop {
            match self.peek(0) {
                None => break,
                Some('\\') => {
                    self.bump();
                    if self.peek(0).is_some() {
                        self.bump();
                    }
                }
                Some(c) if c == quote => {
                    self.bump();
                    if !triple {
                        break;
                    }
                    if self.peek(0) == Some(quote) && self.peek(1) == Some(quote) {
                        self.bump();
                        self.bump();
                        break;
                    }
                }
                Some(_) => {
                    self.bump();
                }
            }
        }
        self.emit(TokenKind::Str, start, line, col);
    }

    fn scan_number(&mut self) {
        let (start, line, col) = (self.pos, self.line, self.col);
        let mut last = self.bump();
        let mut radix_letter = false;
        loop {
            match self.peek(0) {
                Some(c) if is_ident_char(c) || c == '.' => {
                    if c == 'x' || c == 'X' || c == 'o' || c == 'O' || c == 'b' || c == 'B' {
                        radix_letter = true;
                    }
                    last = self.bump();
                }
                Some('+' | '-')
                    if matches!(last, 'e' | 'E')
                        && !radix_letter
                        && self.peek(1).is_some_and(|d| d.is_ascii_digit()) =>
                {
                    last = self.bump();
                }
                _ => break,
            }
        }
        self.emit(TokenKind::Number, start, line, col);
    }

    fn scan_word(&mut self) {
        let (start, line, col) = (self.pos, self.line, self.col);
        while self.peek(0).is_some_and(is_ident_char) {
            self.bump();
        }
        let word = &self.src[self.byte_at(start)..self.byte_at(self.pos)];
        if is_string_prefix(word) && matches!(self.peek(0), Some('\'' | '"')) {
            self.scan_string(start, line, col);
        } else {
            self.emit(TokenKind::Ident, start, line, col);
        }
    }

    fn scan_operator(&mut self) {
        let (start, line, col) = (self.pos, self.line, self.col);
        let window: String = (0..3).filter_map(|i| self.peek(i)).collect();
        let len = if OPS3.iter().any(|op| window.starts_with(op)) {
            3
        } else if OPS2.iter().any(|op| window.starts_with(op)) {
            2
        } else {
            1
        };
        for _ in 0..len {
            let c = self.bump();
            match c {
                '(' | '[' | '{' => self.depth += 1,
                ')' | ']' | '}' => self.depth = self.depth.saturating_sub(1),
                _ => {}
            }
        }
        self.emit(TokenKind::Op, start, line, col);
    }
}
