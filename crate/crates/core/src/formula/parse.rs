use super::{AmaFormula, Atom, Literal, State, Term, Timeline, RESERVED_PREFIX};
use crate::error::{Error, Result};

/// Parses `timeline ('&' timeline)*`.
pub fn parse_formula(text: &str) -> Result<AmaFormula> {
    let mut c = Cursor::new(text, 1, 1);
    let f = c.formula()?;
    c.finish()?;
    Ok(f)
}

/// Parses `state (';' state)*`.
pub fn parse_timeline(text: &str) -> Result<Timeline> {
    let mut c = Cursor::new(text, 1, 1);
    let t = c.timeline()?;
    c.finish()?;
    Ok(t)
}

/// Parses a single atom such as `p` or `supports(?x, b)`.
pub fn parse_atom(text: &str) -> Result<Atom> {
    let mut c = Cursor::new(text, 1, 1);
    let a = c.atom()?;
    c.finish()?;
    Ok(a)
}

/// Character cursor with line/column tracking, shared with the file readers.
pub(crate) struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(text: &'a str, line: usize, column: usize) -> Self {
        Cursor {
            chars: text.chars().peekable(),
            line,
            column,
        }
    }

    pub(crate) fn err(&self, message: impl Into<String>) -> Error {
        Error::syntax(self.line, self.column, message)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    pub(crate) fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    pub(crate) fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.peek().is_none()
    }

    pub(crate) fn eat(&mut self, want: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(want) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, want: char) -> Result<()> {
        if self.eat(want) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{want}`")))
        }
    }

    fn unexpected(&mut self, wanted: &str) -> Error {
        self.skip_ws();
        match self.peek() {
            Some(c) => self.err(format!("expected {wanted}, found `{c}`")),
            None => self.err(format!("expected {wanted}, found end of input")),
        }
    }

    pub(crate) fn finish(&mut self) -> Result<()> {
        if !self.at_end() {
            return Err(self.unexpected("end of input"));
        }
        Ok(())
    }

    pub(crate) fn int(&mut self) -> Result<i64> {
        self.skip_ws();
        let mut digits = String::new();
        if self.peek() == Some('-') {
            digits.push('-');
            self.bump();
        }
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            digits.push(c);
            self.bump();
        }
        digits
            .parse()
            .map_err(|_| self.err(format!("expected an integer, found `{digits}`")))
    }

    pub(crate) fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = (self.line, self.column);
        let mut out = String::new();
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || c == '_' || c == '-' {
                out.push(c);
                self.bump();
            } else {
                break;
            }
        }
        if out.is_empty() {
            return Err(self.unexpected("an identifier"));
        }
        if out.starts_with(RESERVED_PREFIX) {
            return Err(Error::syntax(
                start.0,
                start.1,
                format!("identifier `{out}` uses the reserved prefix `{RESERVED_PREFIX}`"),
            ));
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<Term> {
        if self.eat('?') {
            if self.peek().is_some_and(char::is_whitespace) {
                return Err(self.err("expected a variable name after `?`"));
            }
            Ok(Term::variable(&self.ident()?))
        } else {
            Ok(Term::constant(&self.ident()?))
        }
    }

    pub(crate) fn atom(&mut self) -> Result<Atom> {
        self.skip_ws();
        let (line, column) = (self.line, self.column);
        let name = self.ident()?;
        if name == "true" {
            return Err(Error::syntax(line, column, "`true` is not an atom"));
        }
        self.atom_rest(&name)
    }

    fn atom_rest(&mut self, name: &str) -> Result<Atom> {
        let mut args = Vec::new();
        if self.eat('(') {
            loop {
                args.push(self.term()?);
                if self.eat(')') {
                    break;
                }
                self.expect(',')?;
            }
        }
        Ok(Atom::new(name, args))
    }

    /// A literal, or `None` for the keyword `true`.
    fn literal(&mut self) -> Result<Option<Literal>> {
        if self.eat('~') {
            return Ok(Some(Literal::never(self.atom()?)));
        }
        self.skip_ws();
        let name = self.ident()?;
        if name == "true" {
            if self.eat('(') {
                return Err(self.err("`true` takes no arguments"));
            }
            return Ok(None);
        }
        Ok(Some(Literal::pos(self.atom_rest(&name)?)))
    }

    fn state(&mut self) -> Result<State> {
        if self.eat('{') {
            let mut lits = Vec::new();
            if self.eat('}') {
                return Ok(State::top());
            }
            loop {
                lits.extend(self.literal()?);
                if self.eat('}') {
                    break;
                }
                self.expect(',')?;
            }
            Ok(State::new(lits))
        } else {
            Ok(State::new(self.literal()?))
        }
    }

    pub(crate) fn timeline(&mut self) -> Result<Timeline> {
        if self.at_end() {
            return Err(Error::EmptyTimeline);
        }
        let mut states = vec![self.state()?];
        while self.eat(';') {
            states.push(self.state()?);
        }
        Ok(Timeline::from_nonempty(states))
    }

    pub(crate) fn formula(&mut self) -> Result<AmaFormula> {
        if self.at_end() {
            return Err(Error::EmptyFormula);
        }
        let mut timelines = vec![self.timeline()?];
        while self.eat('&') {
            timelines.push(self.timeline()?);
        }
        Ok(AmaFormula::from_nonempty(timelines))
    }
}
