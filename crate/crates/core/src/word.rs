//! Freely reduced words over a named free basis.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub gen: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(gen: usize, inverse: bool) -> Self {
        Letter { gen, inverse }
    }

    pub fn inv(self) -> Letter {
        Letter { gen: self.gen, inverse: !self.inverse }
    }

    pub fn exponent(self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }
}

/// A freely reduced word. Every constructor reduces, so equality of `Word`s is
/// equality of group elements.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn gen(g: usize) -> Self {
        Word(vec![Letter::new(g, false)])
    }

    pub fn letter(l: Letter) -> Self {
        Word(vec![l])
    }

    /// Stack-based free reduction.
    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    pub fn mul(&self, other: &Word) -> Word {
        Word::from_letters(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::empty();
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    pub fn conjugate_by(&self, c: &Word) -> Word {
        c.inverse().mul(self).mul(c)
    }

    pub fn max_gen(&self) -> Option<usize> {
        self.0.iter().map(|l| l.gen).max()
    }

    pub fn exponent_sum(&self, g: usize) -> i64 {
        self.0.iter().filter(|l| l.gen == g).map(|l| l.exponent()).sum()
    }

    /// Image under the homomorphism sending generator `g` to `sub(g)`.
    pub fn substitute(&self, sub: impl Fn(usize) -> Word) -> Word {
        let mut out = Vec::new();
        for l in &self.0 {
            let image = sub(l.gen);
            if l.inverse {
                out.extend(image.inverse().0);
            } else {
                out.extend(image.0);
            }
        }
        Word::from_letters(out)
    }

    pub fn cyclically_reduced(&self) -> Word {
        let mut s = &self.0[..];
        while s.len() >= 2 && s[0] == s[s.len() - 1].inv() {
            s = &s[1..s.len() - 1];
        }
        Word(s.to_vec())
    }

    /// True when the two words are conjugate in the free group.
    pub fn is_conjugate_to(&self, other: &Word) -> bool {
        let (a, b) = (self.cyclically_reduced(), other.cyclically_reduced());
        if a.len() != b.len() {
            return false;
        }
        if a.is_empty() {
            return true;
        }
        let doubled: Vec<Letter> = a.0.iter().chain(a.0.iter()).copied().collect();
        doubled.windows(b.len()).any(|w| w == b.0.as_slice())
    }
}

/// Letter `gen^±1` with `gen` an index into `letters`.
fn letter_str(names: &[String], l: Letter) -> &str {
    &names[l.gen]
}

/// Named generators of a free group; indices are positions in `names`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeBasis {
    names: Vec<String>,
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl FreeBasis {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        for (i, n) in names.iter().enumerate() {
            if !is_identifier(n) {
                return Err(Error::Parse(format!("`{n}` is not a valid generator name")));
            }
            if names[..i].contains(n) {
                return Err(Error::Parse(format!("duplicate generator `{n}`")));
            }
        }
        Ok(FreeBasis { names })
    }

    /// Generators `g0, g1, ...`.
    pub fn standard(rank: usize) -> Self {
        FreeBasis { names: (0..rank).map(|i| format!("g{i}")).collect() }
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn gen(&self, name: &str) -> Result<Word> {
        self.index(name)
            .map(Word::gen)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    /// Reduces a letter sequence, rejecting generator ids outside the basis.
    pub fn reduce(&self, letters: &[Letter]) -> Result<Word> {
        if let Some(l) = letters.iter().find(|l| l.gen >= self.rank()) {
            return Err(Error::UnknownGenerator(format!("#{}", l.gen)));
        }
        Ok(Word::from_letters(letters.iter().copied()))
    }

    /// Parses whitespace-separated tokens `name` or `name^k`; `1` is the
    /// empty word.
    pub fn parse(&self, text: &str) -> Result<Word> {
        let mut letters = Vec::new();
        for token in text.split_whitespace() {
            if token == "1" {
                continue;
            }
            let (name, power) = match token.split_once('^') {
                Some((n, p)) => {
                    let k: i64 = p
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad exponent in `{token}`")))?;
                    (n, k)
                }
                None => (token, 1),
            };
            if !is_identifier(name) {
                return Err(Error::Parse(format!("bad token `{token}`")));
            }
            let g = self.index(name).ok_or_else(|| Error::UnknownGenerator(name.to_string()))?;
            let l = Letter::new(g, power < 0);
            letters.extend(std::iter::repeat_n(l, power.unsigned_abs() as usize));
        }
        Ok(Word::from_letters(letters))
    }

    pub fn format(&self, w: &Word) -> String {
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
            let k = (j - i) as i64 * l.exponent();
            let name = letter_str(&self.names, l);
            parts.push(if k == 1 { name.to_string() } else { format!("{name}^{k}") });
            i = j;
        }
        parts.join(" ")
    }

    /// A formatter bound to this basis.
    pub fn display<'a>(&'a self, w: &'a Word) -> impl fmt::Display + 'a {
        struct D<'a>(&'a FreeBasis, &'a Word);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0.format(self.1))
            }
        }
        D(self, w)
    }
}
