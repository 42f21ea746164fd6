//! Helpers shared by the plain-text file formats.

use crate::error::{Error, Result};

/// Formats a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn fmt_row(values: &[f64]) -> String {
    values.iter().map(|&v| fmt_f64(v)).collect::<Vec<_>>().join(" ")
}

/// Line cursor over a text document that skips blank lines and `#` comments
/// and remembers 1-based line numbers for error messages.
pub struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last_line: usize,
}

impl<'a> Lines<'a> {
    pub fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate(),
            last_line: 0,
        }
    }

    pub fn line_number(&self) -> usize {
        self.last_line
    }

    /// Next meaningful line, or `None` at end of input.
    pub fn next_line(&mut self) -> Option<&'a str> {
        for (i, raw) in self.inner.by_ref() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if !line.is_empty() {
                self.last_line = i + 1;
                return Some(line);
            }
        }
        None
    }

    pub fn expect_line(&mut self, what: &str) -> Result<&'a str> {
        match self.next_line() {
            Some(l) => Ok(l),
            None => Err(self.error(format!("unexpected end of input, expected {what}"))),
        }
    }

    pub fn floats(&mut self, what: &str, count: usize) -> Result<Vec<f64>> {
        let line = self.expect_line(what)?;
        let values = line
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| self.error(format!("bad number in {what}: {e}")))?;
        if values.len() != count {
            return Err(self.error(format!(
                "{what}: expected {count} values, found {}",
                values.len()
            )));
        }
        Ok(values)
    }

    pub fn error(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: self.last_line,
            msg: msg.into(),
        }
    }
}

pub fn parse_usize(lines: &Lines<'_>, tok: Option<&str>, what: &str) -> Result<usize> {
    tok.ok_or_else(|| lines.error(format!("missing {what}")))?
        .parse()
        .map_err(|_| lines.error(format!("{what} must be a nonnegative integer")))
}

pub fn parse_f64(lines: &Lines<'_>, tok: Option<&str>, what: &str) -> Result<f64> {
    tok.ok_or_else(|| lines.error(format!("missing {what}")))?
        .parse()
        .map_err(|_| lines.error(format!("{what} must be a number")))
}
