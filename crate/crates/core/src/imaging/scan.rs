use crate::error::{Error, Result};

/// Whitespace-separated tokens with byte offsets, optionally skipping `#` comments.
pub(crate) struct Scanner<'a> {
    bytes: &'a [u8],
    pos: usize,
    comments: bool,
}

impl<'a> Scanner<'a> {
    pub(crate) fn new(bytes: &'a [u8], pos: usize, comments: bool) -> Self {
        Self { bytes, pos, comments }
    }

    pub(crate) fn pos(&self) -> usize {
        self.pos
    }

    pub(crate) fn skip_space(&mut self) {
        while self.pos < self.bytes.len() {
            let c = self.bytes[self.pos];
            if c.is_ascii_whitespace() {
                self.pos += 1;
            } else if self.comments && c == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    /// Next token, or `None` at end of input.
    pub(crate) fn next(&mut self) -> Result<Option<(usize, &'a str)>> {
        self.skip_space();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            if self.comments && self.bytes[self.pos] == b'#' {
                break;
            }
            self.pos += 1;
        }
        if start == self.pos {
            return Ok(None);
        }
        let tok = std::str::from_utf8(&self.bytes[start..self.pos])
            .map_err(|_| Error::format(start, "token is not valid text"))?;
        Ok(Some((start, tok)))
    }

    pub(crate) fn expect(&mut self, what: &str) -> Result<(usize, &'a str)> {
        match self.next()? {
            Some(t) => Ok(t),
            None => Err(Error::format(self.pos, format!("unexpected end of file, expected {what}"))),
        }
    }

    pub(crate) fn parse<T: std::str::FromStr>(&mut self, what: &str) -> Result<T> {
        let (at, tok) = self.expect(what)?;
        tok.parse()
            .map_err(|_| Error::format(at, format!("expected {what}, found '{tok}'")))
    }
}
