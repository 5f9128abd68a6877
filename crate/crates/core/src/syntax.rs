//! Text syntax for words and presentations.
//!
//! Words: identifiers `[A-Za-z][A-Za-z0-9_]*`, powers `a^-1` / `a^3`,
//! concatenation by `*` or whitespace, commutators `[u,v] = u^-1 v^-1 u v`,
//! parenthesised groups `(u)^k`, and `1` for the empty word.
//!
//! Presentations: `< g1, g2 | w1, w2 >`, with an empty relator list allowed.

use crate::error::{Error, Result};
use crate::word::{Letter, Word};

/// `a, b, ..., s`, then `a19, a20, ...`.
pub fn default_names(rank: usize) -> Vec<String> {
    (0..rank)
        .map(|i| if i < 19 { ((b'a' + i as u8) as char).to_string() } else { format!("a{i}") })
        .collect()
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { src, pos: 0 }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek_raw() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek_raw(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.peek_raw()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn identifier(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        match self.peek_raw() {
            Some(c) if c.is_ascii_alphabetic() => self.pos += 1,
            _ => return self.err("expected identifier"),
        }
        while let Some(c) = self.peek_raw() {
            if c.is_ascii_alphanumeric() || c == '_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok(self.src[start..self.pos].to_string())
    }

    fn integer(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        if self.peek_raw() == Some('-') {
            self.pos += 1;
        }
        while matches!(self.peek_raw(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.src[start..self.pos].parse().or_else(|_| {
            self.pos = start;
            self.err("expected integer exponent")
        })
    }

    fn word(&mut self, names: &[String]) -> Result<Word> {
        let mut out = Word::empty();
        let mut any = false;
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_alphanumeric() || c == '[' || c == '(' => {
                    out = out.mul(&self.term(names)?);
                    any = true;
                }
                Some('*') if any => {
                    self.pos += 1;
                    match self.peek() {
                        Some(c) if c.is_ascii_alphanumeric() || c == '[' || c == '(' => {}
                        _ => return self.err("expected factor after `*`"),
                    }
                }
                _ => break,
            }
        }
        if !any {
            return self.err("expected word");
        }
        Ok(out)
    }

    fn term(&mut self, names: &[String]) -> Result<Word> {
        let base = self.atom(names)?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let e = self.integer()?;
            Ok(base.pow(e))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self, names: &[String]) -> Result<Word> {
        match self.peek() {
            Some('[') => {
                self.pos += 1;
                let u = self.word(names)?;
                self.expect(',')?;
                let v = self.word(names)?;
                self.expect(']')?;
                Ok(u.commutator(&v))
            }
            Some('(') => {
                self.pos += 1;
                let u = self.word(names)?;
                self.expect(')')?;
                Ok(u)
            }
            Some('1') => {
                self.pos += 1;
                if matches!(self.peek_raw(), Some(c) if c.is_ascii_alphanumeric()) {
                    return self.err("unexpected character after `1`");
                }
                Ok(Word::empty())
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let name = self.identifier()?;
                match names.iter().position(|n| *n == name) {
                    Some(i) => Ok(Word::gen(i)),
                    None => Err(Error::UnknownGenerator(name)),
                }
            }
            _ => self.err("expected generator, `1`, `[` or `(`"),
        }
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }
}

pub fn parse_word(text: &str, names: &[String]) -> Result<Word> {
    let mut p = Parser::new(text);
    let w = p.word(names)?;
    if !p.at_end() {
        return p.err("trailing input");
    }
    Ok(w)
}

/// Comma-separated list of words, commas inside brackets belonging to
/// commutators.
pub fn parse_word_list(text: &str, names: &[String]) -> Result<Vec<Word>> {
    let mut p = Parser::new(text);
    let mut out = Vec::new();
    if p.at_end() {
        return Ok(out);
    }
    loop {
        out.push(p.word(names)?);
        if p.at_end() {
            return Ok(out);
        }
        p.expect(',')?;
    }
}

/// Parses `< gens | relators >` into generator names and raw relator words.
pub fn parse_presentation_parts(text: &str) -> Result<(Vec<String>, Vec<Word>)> {
    let mut p = Parser::new(text);
    p.expect('<')?;
    let mut names: Vec<String> = Vec::new();
    if p.peek() != Some('|') {
        loop {
            let name = p.identifier()?;
            if names.contains(&name) {
                return Err(Error::DuplicateGenerator(name));
            }
            names.push(name);
            if p.peek() == Some(',') {
                p.pos += 1;
            } else {
                break;
            }
        }
    }
    p.expect('|')?;
    let mut relators = Vec::new();
    if p.peek() != Some('>') {
        loop {
            relators.push(p.word(&names)?);
            if p.peek() == Some(',') {
                p.pos += 1;
            } else {
                break;
            }
        }
    }
    p.expect('>')?;
    if !p.at_end() {
        return p.err("trailing input after `>`");
    }
    Ok((names, relators))
}

/// Canonical text for a word: maximal runs collapsed into powers, factors
/// joined by `*`, `1` for the empty word.
pub fn format_word(w: &Word, names: &[String]) -> String {
    if w.is_empty() {
        return "1".to_string();
    }
    let mut parts = Vec::new();
    let letters = w.letters();
    let mut i = 0;
    while i < letters.len() {
        let l = letters[i];
        let mut j = i;
        while j < letters.len() && letters[j] == l {
            j += 1;
        }
        let run = (j - i) as i64 * l.sign();
        let name = names.get(l.generator()).cloned().unwrap_or_else(|| format!("?{}", l.generator()));
        parts.push(if run == 1 { name } else { format!("{name}^{run}") });
        i = j;
    }
    parts.join("*")
}

pub fn format_presentation(names: &[String], relators: &[Word]) -> String {
    let rels: Vec<String> = relators.iter().map(|r| format_word(r, names)).collect();
    if names.is_empty() && rels.is_empty() {
        "< | >".to_string()
    } else if rels.is_empty() {
        format!("< {} | >", names.join(", "))
    } else {
        format!("< {} | {} >", names.join(", "), rels.join(", "))
    }
}

/// Single letter helper used by tests and the CLI.
pub fn letter_name(l: Letter, names: &[String]) -> String {
    format_word(&Word::letter(l), names)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(s: &[&str]) -> Vec<String> {
        s.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn words_parse() {
        let n = names(&["a", "b"]);
        let a = Word::gen(0);
        let b = Word::gen(1);
        assert_eq!(parse_word("[a,b]", &n).unwrap(), a.commutator(&b));
        assert_eq!(parse_word("a^-1 b", &n).unwrap(), a.inverse().mul(&b));
        assert_eq!(parse_word("a*a^-1*b", &n).unwrap(), b);
        assert_eq!(parse_word("1", &n).unwrap(), Word::empty());
        assert_eq!(parse_word("(a*b)^2", &n).unwrap(), a.mul(&b).pow(2));
        assert_eq!(parse_word("[a^2, b]", &n).unwrap(), a.pow(2).commutator(&b));
        assert!(matches!(parse_word("c", &n), Err(Error::UnknownGenerator(_))));
        assert!(matches!(parse_word("a*", &n), Err(Error::Syntax { .. })));
    }

    #[test]
    fn format_collapses_runs() {
        let n = names(&["a", "b"]);
        let w = parse_word("a a a b^-1 b^-1", &n).unwrap();
        assert_eq!(format_word(&w, &n), "a^3*b^-2");
        assert_eq!(parse_word(&format_word(&w, &n), &n).unwrap(), w);
    }

    #[test]
    fn presentation_parts() {
        let (g, r) = parse_presentation_parts("< a, b | [a,b] >").unwrap();
        assert_eq!(g, names(&["a", "b"]));
        assert_eq!(r.len(), 1);
        let (g, r) = parse_presentation_parts("<a,b|>").unwrap();
        assert_eq!((g.len(), r.len()), (2, 0));
        assert!(matches!(parse_presentation_parts("< a | b >"), Err(Error::UnknownGenerator(_))));
        assert!(matches!(parse_presentation_parts("< a, a | >"), Err(Error::DuplicateGenerator(_))));
        let (g, r) = parse_presentation_parts("< | >").unwrap();
        assert!(g.is_empty() && r.is_empty());
    }
}
