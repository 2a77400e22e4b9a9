//! Character cursor and the token productions shared by the N-Triples and
//! Turtle parsers.

use std::collections::HashMap;

use super::SyntaxError;

pub(crate) struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    column: usize,
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(src: &'a str) -> Self {
        Self::at_line(src, 1)
    }

    pub(crate) fn at_line(src: &'a str, line: usize) -> Self {
        Cursor {
            src,
            pos: 0,
            line,
            column: 1,
        }
    }

    pub(crate) fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub(crate) fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    pub(crate) fn peek_nth(&self, n: usize) -> Option<char> {
        self.rest().chars().nth(n)
    }

    pub(crate) fn is_eof(&self) -> bool {
        self.pos >= self.src.len()
    }

    pub(crate) fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    pub(crate) fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn starts_with(&self, s: &str) -> bool {
        self.rest().starts_with(s)
    }

    /// Case-insensitive keyword check that also requires a non-name char after it.
    pub(crate) fn starts_with_keyword(&self, kw: &str) -> bool {
        let rest = self.rest();
        rest.len() >= kw.len()
            && rest.is_char_boundary(kw.len())
            && rest[..kw.len()].eq_ignore_ascii_case(kw)
            && !rest[kw.len()..]
                .chars()
                .next()
                .is_some_and(|c| c.is_alphanumeric() || c == '_' || c == ':')
    }

    pub(crate) fn advance(&mut self, n_bytes: usize) {
        let target = self.pos + n_bytes;
        while self.pos < target {
            self.bump();
        }
    }

    pub(crate) fn expect(&mut self, c: char) -> Result<(), SyntaxError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(match self.peek() {
                Some(found) => format!("expected '{c}', found '{found}'"),
                None => format!("expected '{c}', found end of input"),
            }))
        }
    }

    pub(crate) fn error(&self, reason: impl Into<String>) -> SyntaxError {
        SyntaxError {
            line: self.line,
            column: self.column,
            reason: reason.into(),
        }
    }

    /// Skips spaces and tabs only.
    pub(crate) fn skip_inline_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t')) {
            self.bump();
        }
    }

    /// Skips all whitespace and `#` comments.
    pub(crate) fn skip_ws_and_comments(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('#') => {
                    while !matches!(self.peek(), None | Some('\n')) {
                        self.bump();
                    }
                }
                _ => break,
            }
        }
    }

    /// `'<' ([^<>"{}|^`\\ \x00-\x20] | UCHAR)* '>'`, returning the unescaped body.
    pub(crate) fn iriref(&mut self) -> Result<String, SyntaxError> {
        self.expect('<')?;
        let mut out = String::new();
        loop {
            match self.peek() {
                None => return Err(self.error("unterminated IRI")),
                Some('>') => {
                    self.bump();
                    return Ok(out);
                }
                Some('\\') => {
                    self.bump();
                    match self.peek() {
                        Some('u') => {
                            self.bump();
                            out.push(self.hex_char(4)?);
                        }
                        Some('U') => {
                            self.bump();
                            out.push(self.hex_char(8)?);
                        }
                        _ => return Err(self.error("invalid escape in IRI")),
                    }
                }
                Some(c)
                    if (c as u32) <= 0x20
                        || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`') =>
                {
                    return Err(self.error(format!("character {c:?} not allowed in IRI")));
                }
                Some(c) => {
                    self.bump();
                    out.push(c);
                }
            }
        }
    }

    fn hex_char(&mut self, digits: usize) -> Result<char, SyntaxError> {
        let start_err = self.error("invalid unicode escape");
        let mut value = 0u32;
        for _ in 0..digits {
            let d = self
                .peek()
                .and_then(|c| c.to_digit(16))
                .ok_or_else(|| self.error("expected hex digit in unicode escape"))?;
            self.bump();
            value = value * 16 + d;
        }
        char::from_u32(value).ok_or(start_err)
    }

    /// Body of a string literal whose opening quote has been consumed.
    /// `long` selects the triple-quoted form.
    pub(crate) fn string_body(&mut self, quote: char, long: bool) -> Result<String, SyntaxError> {
        let mut out = String::new();
        loop {
            match self.peek() {
                None => return Err(self.error("unterminated string literal")),
                Some(c) if c == quote => {
                    if !long {
                        self.bump();
                        return Ok(out);
                    }
                    if self.peek_nth(1) == Some(quote) && self.peek_nth(2) == Some(quote) {
                        self.bump();
                        self.bump();
                        self.bump();
                        return Ok(out);
                    }
                    self.bump();
                    out.push(c);
                }
                Some('\\') => {
                    self.bump();
                    let esc = self
                        .bump()
                        .ok_or_else(|| self.error("unterminated escape"))?;
                    match esc {
                        't' => out.push('\t'),
                        'b' => out.push('\u{8}'),
                        'n' => out.push('\n'),
                        'r' => out.push('\r'),
                        'f' => out.push('\u{c}'),
                        '"' => out.push('"'),
                        '\'' => out.push('\''),
                        '\\' => out.push('\\'),
                        'u' => out.push(self.hex_char(4)?),
                        'U' => out.push(self.hex_char(8)?),
                        other => return Err(self.error(format!("invalid escape '\\{other}'"))),
                    }
                }
                Some('\n' | '\r') if !long => {
                    return Err(self.error("line break in short string literal"))
                }
                Some(c) => {
                    self.bump();
                    out.push(c);
                }
            }
        }
    }

    /// Language tag after '@'.
    pub(crate) fn lang_tag(&mut self) -> Result<String, SyntaxError> {
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c.is_ascii_alphanumeric() || c == '-')
        {
            self.bump();
        }
        let tag = &self.src[start..self.pos];
        if super::term::is_valid_lang_tag(tag) {
            Ok(tag.to_string())
        } else {
            Err(self.error(format!("invalid language tag {tag:?}")))
        }
    }

    /// Blank node label after `_:`.
    pub(crate) fn blank_label(&mut self) -> Result<String, SyntaxError> {
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_alphanumeric() || c == '_' => {
                self.bump();
            }
            _ => return Err(self.error("invalid blank node label")),
        }
        while self
            .peek()
            .is_some_and(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
        {
            // a trailing '.' terminates the statement instead
            if self.peek() == Some('.')
                && !self
                    .peek_nth(1)
                    .is_some_and(|c| c.is_alphanumeric() || matches!(c, '_' | '-'))
            {
                break;
            }
            self.bump();
        }
        Ok(self.src[start..self.pos].to_string())
    }
}

/// Maps document blank node labels to fresh `b<n>` labels, one scope per parse.
#[derive(Default)]
pub(crate) struct BlankScope {
    labels: HashMap<String, String>,
    next: usize,
}

impl BlankScope {
    pub(crate) fn named(&mut self, label: &str) -> String {
        if let Some(l) = self.labels.get(label) {
            return l.clone();
        }
        let fresh = self.fresh();
        self.labels.insert(label.to_string(), fresh.clone());
        fresh
    }

    pub(crate) fn fresh(&mut self) -> String {
        let l = format!("b{}", self.next);
        self.next += 1;
        l
    }
}

/// Validates UTF-8, reporting the first invalid byte's line and column.
pub(crate) fn decode_utf8(input: &[u8]) -> Result<&str, SyntaxError> {
    std::str::from_utf8(input).map_err(|e| {
        let valid = &input[..e.valid_up_to()];
        // valid prefix is guaranteed UTF-8
        let prefix = std::str::from_utf8(valid).unwrap_or_default();
        let line = prefix.matches('\n').count() + 1;
        let column = prefix.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        SyntaxError {
            line,
            column,
            reason: "invalid UTF-8".into(),
        }
    })
}
