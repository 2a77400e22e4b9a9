use super::SparqlError;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Iri(String),
    /// Prefix and local part of `prefix:local`.
    PName(String, String),
    Var(String),
    Blank(String),
    Str(String),
    LangTag(String),
    Integer(String),
    Decimal(String),
    Double(String),
    /// Keywords, function names, `a`, `true` and `false`.
    Word(String),
    Punct(&'static str),
    Eof,
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    /// Character offset of the token start.
    pub pos: usize,
    pub line: usize,
    pub column: usize,
}

impl Token {
    pub(crate) fn describe(&self) -> String {
        match &self.tok {
            Tok::Iri(i) => format!("<{i}>"),
            Tok::PName(p, l) => format!("{p}:{l}"),
            Tok::Var(v) => format!("?{v}"),
            Tok::Blank(b) => format!("_:{b}"),
            Tok::Str(s) => format!("{s:?}"),
            Tok::LangTag(l) => format!("@{l}"),
            Tok::Integer(n) | Tok::Decimal(n) | Tok::Double(n) => n.clone(),
            Tok::Word(w) => w.clone(),
            Tok::Punct(p) => p.to_string(),
            Tok::Eof => "end of query".into(),
        }
    }
}

const PUNCT: &[&str] = &[
    "^^", "&&", "||", "!=", "<=", ">=", "{", "}", "(", ")", ".", ";", ",", "*", "=", "<", ">", "!",
    "+", "-", "/", "|", "^", "[", "]",
];

struct Lexer<'a> {
    chars: Vec<char>,
    i: usize,
    line: usize,
    column: usize,
    _src: &'a str,
}

fn is_name_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-'
}

impl<'a> Lexer<'a> {
    fn peek(&self, n: usize) -> Option<char> {
        self.chars.get(self.i + n).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek(0)?;
        self.i += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn error_at(&self, pos: usize, line: usize, column: usize, message: impl Into<String>) -> SparqlError {
        SparqlError::Syntax {
            position: pos,
            line,
            column,
            message: message.into(),
        }
    }

    fn error(&self, message: impl Into<String>) -> SparqlError {
        self.error_at(self.i, self.line, self.column, message)
    }

    fn skip_space(&mut self) {
        loop {
            match self.peek(0) {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('#') => {
                    while !matches!(self.peek(0), None | Some('\n')) {
                        self.bump();
                    }
                }
                _ => return,
            }
        }
    }

    /// An IRI reference if one starts here; `<` is otherwise an operator.
    fn try_iri(&mut self) -> Option<String> {
        let mut j = self.i + 1;
        let mut out = String::new();
        loop {
            let c = *self.chars.get(j)?;
            match c {
                '>' => break,
                '<' | '"' | '{' | '}' | '|' | '^' | '`' | '\\' => return None,
                c if c <= ' ' => return None,
                c => out.push(c),
            }
            j += 1;
        }
        while self.i <= j {
            self.bump();
        }
        Some(out)
    }

    fn name(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek(0) {
            if is_name_char(c) || (c == '.' && self.peek(1).is_some_and(is_name_char)) {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        s
    }

    fn local_name(&mut self) -> Result<String, SparqlError> {
        let mut s = String::new();
        while let Some(c) = self.peek(0) {
            let continues = |l: &Self| l.peek(1).is_some_and(|n| is_name_char(n) || n == ':' || n == '%');
            if is_name_char(c) || c == ':' || (c == '.' && continues(self)) {
                s.push(c);
                self.bump();
            } else if c == '%' {
                let hex: String = [self.peek(1), self.peek(2)].iter().flatten().collect();
                if hex.len() != 2 || !hex.chars().all(|h| h.is_ascii_hexdigit()) {
                    return Err(self.error("bad percent escape in prefixed name"));
                }
                s.push('%');
                s.push_str(&hex);
                self.bump();
                self.bump();
                self.bump();
            } else if c == '\\' {
                self.bump();
                match self.bump() {
                    Some(e) if "_~.-!$&'()*+,;=/?#@%".contains(e) => s.push(e),
                    _ => return Err(self.error("bad escape in prefixed name")),
                }
            } else {
                break;
            }
        }
        Ok(s)
    }

    fn string(&mut self, quote: char) -> Result<String, SparqlError> {
        let long = self.peek(1) == Some(quote) && self.peek(2) == Some(quote);
        let (start, line, column) = (self.i, self.line, self.column);
        for _ in 0..if long { 3 } else { 1 } {
            self.bump();
        }
        let mut out = String::new();
        loop {
            let Some(c) = self.bump() else {
                return Err(self.error_at(start, line, column, "unterminated string"));
            };
            match c {
                c if c == quote && !long => return Ok(out),
                c if c == quote && self.peek(0) == Some(quote) && self.peek(1) == Some(quote) => {
                    self.bump();
                    self.bump();
                    return Ok(out);
                }
                '\n' | '\r' if !long => return Err(self.error("line break in a short string")),
                '\\' => {
                    let e = self.bump().ok_or_else(|| self.error("unterminated escape"))?;
                    match e {
                        't' => out.push('\t'),
                        'n' => out.push('\n'),
                        'r' => out.push('\r'),
                        'b' => out.push('\u{8}'),
                        'f' => out.push('\u{c}'),
                        '"' | '\'' | '\\' => out.push(e),
                        'u' | 'U' => {
                            let n = if e == 'u' { 4 } else { 8 };
                            let mut hex = String::new();
                            for _ in 0..n {
                                hex.push(self.bump().ok_or_else(|| self.error("short unicode escape"))?);
                            }
                            let v = u32::from_str_radix(&hex, 16)
                                .ok()
                                .and_then(char::from_u32)
                                .ok_or_else(|| self.error("bad unicode escape"))?;
                            out.push(v);
                        }
                        _ => return Err(self.error(format!("unknown escape \\{e}"))),
                    }
                }
                c => out.push(c),
            }
        }
    }

    fn number(&mut self) -> Tok {
        let mut s = String::new();
        while let Some(c) = self.peek(0).filter(char::is_ascii_digit) {
            s.push(c);
            self.bump();
        }
        let mut kind = 0;
        if self.peek(0) == Some('.') && self.peek(1).is_some_and(|c| c.is_ascii_digit()) {
            kind = 1;
            s.push('.');
            self.bump();
            while let Some(c) = self.peek(0).filter(char::is_ascii_digit) {
                s.push(c);
                self.bump();
            }
        }
        if matches!(self.peek(0), Some('e' | 'E')) {
            let sign = matches!(self.peek(1), Some('+' | '-'));
            let digit_at = if sign { 2 } else { 1 };
            if self.peek(digit_at).is_some_and(|c| c.is_ascii_digit()) {
                kind = 2;
                for _ in 0..digit_at {
                    s.push(self.bump().expect("peeked"));
                }
                while let Some(c) = self.peek(0).filter(char::is_ascii_digit) {
                    s.push(c);
                    self.bump();
                }
            }
        }
        match kind {
            0 => Tok::Integer(s),
            1 => Tok::Decimal(s),
            _ => Tok::Double(s),
        }
    }

    fn next(&mut self) -> Result<Token, SparqlError> {
        self.skip_space();
        let (pos, line, column) = (self.i, self.line, self.column);
        let at = |tok| Token { tok, pos, line, column };
        let Some(c) = self.peek(0) else {
            return Ok(at(Tok::Eof));
        };
        if c == '<' {
            if let Some(iri) = self.try_iri() {
                return Ok(at(Tok::Iri(iri)));
            }
        }
        if (c == '?' || c == '$') && self.peek(1).is_some_and(|n| n.is_alphanumeric() || n == '_') {
            self.bump();
            let mut v = String::new();
            while let Some(c) = self.peek(0).filter(|c| c.is_alphanumeric() || *c == '_') {
                v.push(c);
                self.bump();
            }
            return Ok(at(Tok::Var(v)));
        }
        if c == '_' && self.peek(1) == Some(':') {
            self.bump();
            self.bump();
            let label = self.name();
            if label.is_empty() {
                return Err(self.error("empty blank node label"));
            }
            return Ok(at(Tok::Blank(label)));
        }
        if c == '"' || c == '\'' {
            return Ok(at(Tok::Str(self.string(c)?)));
        }
        if c == '@' {
            self.bump();
            let mut tag = String::new();
            while let Some(c) = self.peek(0).filter(|c| c.is_ascii_alphanumeric() || *c == '-') {
                tag.push(c);
                self.bump();
            }
            if tag.is_empty() {
                return Err(self.error("empty language tag"));
            }
            return Ok(at(Tok::LangTag(tag)));
        }
        if c.is_ascii_digit() || (c == '.' && self.peek(1).is_some_and(|n| n.is_ascii_digit())) {
            return Ok(at(self.number()));
        }
        if c == ':' {
            self.bump();
            return Ok(at(Tok::PName(String::new(), self.local_name()?)));
        }
        if is_name_start(c) {
            let word = self.name();
            if self.peek(0) == Some(':') {
                self.bump();
                return Ok(at(Tok::PName(word, self.local_name()?)));
            }
            return Ok(at(Tok::Word(word)));
        }
        for p in PUNCT.iter().copied() {
            let n = p.chars().count();
            if (0..n).all(|k| self.peek(k) == p.chars().nth(k)) {
                for _ in 0..n {
                    self.bump();
                }
                return Ok(at(Tok::Punct(p)));
            }
        }
        if c == '?' {
            self.bump();
            return Ok(at(Tok::Punct("?")));
        }
        Err(self.error(format!("unexpected character {c:?}")))
    }
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, SparqlError> {
    let mut lx = Lexer {
        chars: src.chars().collect(),
        i: 0,
        line: 1,
        column: 1,
        _src: src,
    };
    let mut out = Vec::new();
    loop {
        let t = lx.next()?;
        let end = t.tok == Tok::Eof;
        out.push(t);
        if end {
            return Ok(out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn basic_tokens() {
        assert_eq!(
            toks("SELECT ?s { ?s dct:title 'a\\'b'@en . }"),
            vec![
                Tok::Word("SELECT".into()),
                Tok::Var("s".into()),
                Tok::Punct("{"),
                Tok::Var("s".into()),
                Tok::PName("dct".into(), "title".into()),
                Tok::Str("a'b".into()),
                Tok::LangTag("en".into()),
                Tok::Punct("."),
                Tok::Punct("}"),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn less_than_versus_iri() {
        assert_eq!(toks("?a < 3")[1], Tok::Punct("<"));
        assert_eq!(toks("<http://x/y>")[0], Tok::Iri("http://x/y".into()));
        assert_eq!(toks("?a<=?b")[1], Tok::Punct("<="));
    }

    #[test]
    fn numbers_and_names() {
        assert_eq!(toks("1. 2.5 3e2 .5")[..5], [
            Tok::Integer("1".into()),
            Tok::Punct("."),
            Tok::Decimal("2.5".into()),
            Tok::Double("3e2".into()),
            Tok::Decimal(".5".into())
        ]);
        assert_eq!(toks("iso639-3:spa ex:a.b.")[..3], [
            Tok::PName("iso639-3".into(), "spa".into()),
            Tok::PName("ex".into(), "a.b".into()),
            Tok::Punct(".")
        ]);
        assert_eq!(toks("\"\"\"x\ny\"\"\"")[0], Tok::Str("x\ny".into()));
    }

    #[test]
    fn errors_are_located() {
        let Err(SparqlError::Syntax { line, column, position, .. }) = tokenize("SELECT\n  \"abc") else {
            panic!()
        };
        assert_eq!((line, column, position), (2, 3, 9));
    }
}
