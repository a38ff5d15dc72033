//! Python tokenizer: position-annotated tokens, logical lines, and
//! per-physical-line facts.
//!
//! This is the only module that looks at raw source text; everything
//! downstream works on its output. The token stream covers every byte of
//! the input: each byte lands either inside a token's text or in
//! inter-token whitespace, so a stream can be checked against the original
//! source byte for byte. `#` inside a string never opens a comment, quotes
//! inside a comment never open a string, triple-quoted strings span
//! physical lines, and a trailing backslash outside a string joins
//! physical lines.
//!
//! Structural kinds beyond the usual NAME/NUMBER/STRING/OPERATOR/COMMENT:
//!
//! - `IndentMarker` — the run of leading blanks at the start of a physical
//!   line (tabs expand at a stop of 8 when widths are measured).
//! - `Newline` — a line terminator (`\n`, `\r\n`, or a lone `\r`).
//! - `Continuation` — a backslash immediately followed by a terminator,
//!   joining two physical lines.

use std::fmt;

/// Tab stop used when expanding indentation to columns.
pub const TAB_STOP: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Name,
    Number,
    Str,
    Operator,
    Comment,
    Newline,
    IndentMarker,
    Continuation,
}

impl TokenKind {
    /// Content kinds carry program text; structural kinds carry layout.
    pub fn is_content(self) -> bool {
        matches!(
            self,
            TokenKind::Name | TokenKind::Number | TokenKind::Str | TokenKind::Operator
        )
    }
}

/// One lexical unit. `text` is a verbatim slice of the input; `line` and
/// `column` are 1-based and point at the token's first byte.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub line: u32,
    pub column: u32,
}

/// One statement's worth of source, possibly spanning several physical
/// lines via brackets or backslash continuation. Comment tokens are
/// excluded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicalLine {
    pub tokens: Vec<Token>,
    pub first_line: u32,
    pub indent_width: u32,
    pub continued: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LexErrorReason {
    UnterminatedString,
    BadEncoding,
    InvalidCharacter,
}

impl LexErrorReason {
    pub fn as_str(self) -> &'static str {
        match self {
            LexErrorReason::UnterminatedString => "unterminated-string",
            LexErrorReason::BadEncoding => "bad-encoding",
            LexErrorReason::InvalidCharacter => "invalid-character",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LexError {
    pub line: u32,
    pub column: u32,
    pub reason: LexErrorReason,
}

impl fmt::Display for LexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}:{}", self.reason.as_str(), self.line, self.column)
    }
}

impl std::error::Error for LexError {}

/// Raw facts about one physical line, used by layout checkers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineFacts {
    pub line: u32,
    /// Leading whitespace expanded to columns (tab stop 8).
    pub indent_columns: u32,
    pub has_trailing_whitespace: bool,
    /// 1-based byte column of the first trailing blank, when present.
    pub trailing_whitespace_column: Option<u32>,
    /// Length in characters, excluding the terminator.
    pub char_len: usize,
}

/// Expand a run of blanks to a column width. Tabs advance to the next
/// multiple of [`TAB_STOP`]; a form feed resets the count.
pub fn expand_indent_width(text: &str) -> u32 {
    let mut width = 0u32;
    for ch in text.chars() {
        match ch {
            ' ' => width += 1,
            '\t' => width = (width / TAB_STOP + 1) * TAB_STOP,
            '\x0c' => width = 0,
            _ => {}
        }
    }
    width
}

const OPS3: &[&str] = &["**=", "//=", ">>=", "<<=", "..."];
const OPS2: &[&str] = &[
    "**", "//", ">>", "<<", "<=", ">=", "==", "!=", "->", ":=", "+=", "-=", "*=", "/=", "%=",
    "@=", "&=", "|=", "^=",
];
const OPS1: &[u8] = b"+-*/%@&|^~<>=()[]{},:.;!";

fn is_ident_start(ch: char) -> bool {
    ch == '_' || ch.is_alphabetic()
}

fn is_ident_continue(ch: char) -> bool {
    ch == '_' || ch.is_alphanumeric()
}

fn is_string_prefix(run: &str) -> bool {
    matches!(
        run.to_ascii_lowercase().as_str(),
        "r" | "b" | "f" | "u" | "rb" | "br" | "rf" | "fr"
    )
}

struct Scanner<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    line: u32,
    col: u32,
}

impl<'a> Scanner<'a> {
    fn new(src: &'a str) -> Self {
        Scanner { src, bytes: src.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn peek_at(&self, n: usize) -> Option<u8> {
        self.bytes.get(self.pos + n).copied()
    }

    fn current_char(&self) -> char {
        self.src[self.pos..].chars().next().unwrap()
    }

    /// Advance over one byte on the current line.
    fn bump(&mut self) {
        self.pos += 1;
        self.col += 1;
    }

    /// Advance over one character (any width) on the current line.
    fn bump_char(&mut self) {
        let len = self.current_char().len_utf8();
        self.pos += len;
        self.col += len as u32;
    }

    /// Advance over a line terminator, updating line bookkeeping.
    /// Returns the number of bytes consumed (1 or 2).
    fn bump_terminator(&mut self) -> usize {
        let n = if self.peek() == Some(b'\r') && self.peek_at(1) == Some(b'\n') { 2 } else { 1 };
        self.pos += n;
        self.line += 1;
        self.col = 1;
        n
    }

    fn slice_from(&self, start: usize) -> &'a str {
        &self.src[start..self.pos]
    }

    fn token_here(&self, kind: TokenKind, start: usize, line: u32, col: u32) -> Token {
        Token { kind, text: self.slice_from(start).to_string(), line, column: col }
    }

    fn take_indent_marker(&mut self) -> Option<Token> {
        let (start, line, col) = (self.pos, self.line, self.col);
        while matches!(self.peek(), Some(b' ') | Some(b'\t') | Some(b'\x0c')) {
            self.bump();
        }
        (self.pos > start).then(|| self.token_here(TokenKind::IndentMarker, start, line, col))
    }

    fn take_newline(&mut self) -> Token {
        let (start, line, col) = (self.pos, self.line, self.col);
        self.bump_terminator();
        Token { kind: TokenKind::Newline, text: self.src[start..self.pos].to_string(), line, column: col }
    }

    fn take_comment(&mut self) -> Token {
        let (start, line, col) = (self.pos, self.line, self.col);
        while let Some(b) = self.peek() {
            if b == b'\n' || b == b'\r' {
                break;
            }
            self.pos += 1;
            self.col += 1;
        }
        self.token_here(TokenKind::Comment, start, line, col)
    }

    fn take_continuation(&mut self) -> Token {
        let (start, line, col) = (self.pos, self.line, self.col);
        self.bump(); // backslash
        self.bump_terminator();
        Token { kind: TokenKind::Continuation, text: self.src[start..self.pos].to_string(), line, column: col }
    }

    fn take_number(&mut self) -> Token {
        let (start, line, col) = (self.pos, self.line, self.col);
        if self.peek() == Some(b'0')
            && matches!(self.peek_at(1), Some(b'x' | b'X' | b'b' | b'B' | b'o' | b'O'))
        {
            self.bump();
            self.bump();
            while matches!(self.peek(), Some(b) if b.is_ascii_alphanumeric() || b == b'_') {
                self.bump();
            }
            return self.token_here(TokenKind::Number, start, line, col);
        }
        while matches!(self.peek(), Some(b) if b.is_ascii_digit() || b == b'_') {
            self.bump();
        }
        if self.peek() == Some(b'.') {
            self.bump();
            while matches!(self.peek(), Some(b) if b.is_ascii_digit() || b == b'_') {
                self.bump();
            }
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            let signed = matches!(self.peek_at(1), Some(b'+' | b'-'));
            let digit_at = if signed { 2 } else { 1 };
            if matches!(self.peek_at(digit_at), Some(b) if b.is_ascii_digit()) {
                self.bump();
                if signed {
                    self.bump();
                }
                while matches!(self.peek(), Some(b) if b.is_ascii_digit() || b == b'_') {
                    self.bump();
                }
            }
        }
        if matches!(self.peek(), Some(b'j' | b'J')) {
            self.bump();
        }
        self.token_here(TokenKind::Number, start, line, col)
    }

    /// Lex a string literal. `start`/`s_line`/`s_col` point at the first
    /// byte of the token, which may be a prefix such as `rb`.
    fn take_string_from(&mut self, start: usize, s_line: u32, s_col: u32) -> Result<Token, LexError> {
        let unterminated = LexError {
            line: s_line,
            column: s_col,
            reason: LexErrorReason::UnterminatedString,
        };
        let quote = self.bytes[self.pos];
        let triple = self.peek_at(1) == Some(quote) && self.peek_at(2) == Some(quote);
        let opener = if triple { 3 } else { 1 };
        for _ in 0..opener {
            self.bump();
        }
        loop {
            match self.peek() {
                None => return Err(unterminated),
                Some(b'\\') => {
                    self.bump();
                    match self.peek() {
                        None => return Err(unterminated),
                        // Escaped terminators keep the string open even in
                        // single-quoted literals.
                        Some(b'\n') | Some(b'\r') => {
                            self.bump_terminator();
                        }
                        Some(_) => self.bump_char(),
                    }
                }
                Some(b'\n') | Some(b'\r') => {
                    if !triple {
                        return Err(unterminated);
                    }
                    self.bump_terminator();
                }
                Some(b) if b == quote => {
                    if !triple {
                        self.bump();
                        break;
                    }
                    if self.peek_at(1) == Some(quote) && self.peek_at(2) == Some(quote) {
                        self.bump();
                        self.bump();
                        self.bump();
                        break;
                    }
                    self.bump();
                }
                Some(_) => self.bump_char(),
            }
        }
        Ok(Token {
            kind: TokenKind::Str,
            text: self.src[start..self.pos].to_string(),
            line: s_line,
            column: s_col,
        })
    }

    /// An identifier run, unless it is a valid string prefix glued to a
    /// quote, in which case the whole literal is one STRING token.
    fn take_name_or_prefixed_string(&mut self) -> Result<Token, LexError> {
        let (start, line, col) = (self.pos, self.line, self.col);
        while self.pos < self.bytes.len() && is_ident_continue(self.current_char()) {
            self.bump_char();
        }
        let run = self.slice_from(start);
        if is_string_prefix(run) && matches!(self.peek(), Some(b'\'' | b'"')) {
            return self.take_string_from(start, line, col);
        }
        Ok(self.token_here(TokenKind::Name, start, line, col))
    }

    fn take_operator(&mut self) -> Token {
        let (start, line, col) = (self.pos, self.line, self.col);
        let rest = &self.src[self.pos..];
        for op in OPS3 {
            if rest.starts_with(op) {
                for _ in 0..3 {
                    self.bump();
                }
                return self.token_here(TokenKind::Operator, start, line, col);
            }
        }
        for op in OPS2 {
            if rest.starts_with(op) {
                self.bump();
                self.bump();
                return self.token_here(TokenKind::Operator, start, line, col);
            }
        }
        self.bump();
        self.token_here(TokenKind::Operator, start, line, col)
    }

    /// Unknown printable characters become single-character operator
    /// tokens so the stream still covers the whole input.
    fn take_unknown(&mut self) -> Token {
        let (start, line, col) = (self.pos, self.line, self.col);
        self.bump_char();
        self.token_here(TokenKind::Operator, start, line, col)
    }
}

/// Tokenize decoded Python source. The first lexical error aborts the
/// file; callers surface it as a file-level diagnostic.
pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let mut sc = Scanner::new(source);
    let mut tokens = Vec::new();
    let mut at_line_start = true;
    loop {
        if at_line_start {
            if let Some(tok) = sc.take_indent_marker() {
                tokens.push(tok);
            }
            at_line_start = false;
        }
        let Some(b) = sc.peek() else { break };
        match b {
            b'\n' | b'\r' => {
                tokens.push(sc.take_newline());
                at_line_start = true;
            }
            b'#' => tokens.push(sc.take_comment()),
            b'\\' => {
                if matches!(sc.peek_at(1), Some(b'\n' | b'\r')) {
                    tokens.push(sc.take_continuation());
                    at_line_start = true;
                } else {
                    tokens.push(sc.take_operator());
                }
            }
            b'\'' | b'"' => {
                let (pos, line, col) = (sc.pos, sc.line, sc.col);
                tokens.push(sc.take_string_from(pos, line, col)?);
            }
            b'0'..=b'9' => tokens.push(sc.take_number()),
            b'.' if matches!(sc.peek_at(1), Some(b'0'..=b'9')) => tokens.push(sc.take_number()),
            b' ' | b'\t' | b'\x0c' => {
                while matches!(sc.peek(), Some(b' ') | Some(b'\t') | Some(b'\x0c')) {
                    sc.bump();
                }
            }
            _ => {
                let ch = sc.current_char();
                if is_ident_start(ch) {
                    tokens.push(sc.take_name_or_prefixed_string()?);
                } else if b.is_ascii() && OPS1.contains(&b) {
                    tokens.push(sc.take_operator());
                } else if ch.is_control() {
                    // \t \n \r \x0c were handled above.
                    return Err(LexError {
                        line: sc.line,
                        column: sc.col,
                        reason: LexErrorReason::InvalidCharacter,
                    });
                } else if ch.is_whitespace() || ch == '\u{feff}' {
                    sc.bump_char();
                } else {
                    tokens.push(sc.take_unknown());
                }
            }
        }
    }
    Ok(tokens)
}

struct LineBuilder {
    tokens: Vec<Token>,
    first_line: u32,
    indent_width: u32,
    saw_continuation: bool,
}

impl LineBuilder {
    fn finish(self) -> LogicalLine {
        let end = self
            .tokens
            .iter()
            .map(|t| t.line + t.text.matches('\n').count() as u32)
            .max()
            .unwrap_or(self.first_line);
        LogicalLine {
            continued: self.saw_continuation || end > self.first_line,
            first_line: self.first_line,
            indent_width: self.indent_width,
            tokens: self.tokens,
        }
    }
}

/// Group tokens into logical lines. Physical lines join across backslash
/// continuations and open brackets; blank and comment-only lines produce
/// nothing. The indent width is taken from the line's first physical line,
/// tabs expanded at a stop of 8.
pub fn split_logical_lines(tokens: &[Token]) -> Vec<LogicalLine> {
    let mut lines = Vec::new();
    let mut depth: u32 = 0;
    let mut pending_indent: u32 = 0;
    let mut cur: Option<LineBuilder> = None;
    for tok in tokens {
        match tok.kind {
            TokenKind::IndentMarker => pending_indent = expand_indent_width(&tok.text),
            TokenKind::Comment => {}
            TokenKind::Continuation => {
                if let Some(b) = cur.as_mut() {
                    b.saw_continuation = true;
                }
                pending_indent = 0;
            }
            TokenKind::Newline => {
                if depth == 0 {
                    if let Some(b) = cur.take() {
                        lines.push(b.finish());
                    }
                }
                pending_indent = 0;
            }
            TokenKind::Name | TokenKind::Number | TokenKind::Str | TokenKind::Operator => {
                if tok.kind == TokenKind::Operator {
                    match tok.text.as_str() {
                        "(" | "[" | "{" => depth += 1,
                        ")" | "]" | "}" => depth = depth.saturating_sub(1),
                        _ => {}
                    }
                }
                cur.get_or_insert_with(|| LineBuilder {
                    tokens: Vec::new(),
                    first_line: tok.line,
                    indent_width: pending_indent,
                    saw_continuation: false,
                })
                .tokens
                .push(tok.clone());
            }
        }
    }
    if let Some(b) = cur.take() {
        lines.push(b.finish());
    }
    lines
}

/// Per-physical-line facts, including blank lines. A trailing terminator
/// does not create an extra empty line.
pub fn physical_line_facts(source: &str) -> Vec<LineFacts> {
    let bytes = source.as_bytes();
    let mut facts = Vec::new();
    let mut start = 0usize;
    let mut line_no = 0u32;
    while start < bytes.len() {
        line_no += 1;
        let mut end = start;
        while end < bytes.len() && bytes[end] != b'\n' && bytes[end] != b'\r' {
            end += 1;
        }
        let content = &source[start..end];
        let indent_len = content
            .bytes()
            .take_while(|b| matches!(b, b' ' | b'\t' | b'\x0c'))
            .count();
        let trimmed = content.trim_end_matches([' ', '\t']);
        let has_trailing = trimmed.len() < content.len();
        facts.push(LineFacts {
            line: line_no,
            indent_columns: expand_indent_width(&content[..indent_len]),
            has_trailing_whitespace: has_trailing,
            trailing_whitespace_column: has_trailing.then(|| trimmed.len() as u32 + 1),
            char_len: content.chars().count(),
        });
        start = end;
        if start < bytes.len() {
            // consume the terminator: \r\n, \n, or lone \r
            start += if bytes[start] == b'\r' && bytes.get(start + 1) == Some(&b'\n') {
                2
            } else {
                1
            };
        }
    }
    facts
}
