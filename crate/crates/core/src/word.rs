//! Reduced words over a signed generator alphabet and the free-group
//! operations built on them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A signed generator. Encoded as `2 * generator + inverse`, so the derived
/// ordering is by generator index first and positive before negative.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter(u32);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter((generator as u32) << 1 | inverse as u32)
    }

    pub fn pos(generator: usize) -> Self {
        Letter::new(generator, false)
    }

    pub fn neg(generator: usize) -> Self {
        Letter::new(generator, true)
    }

    pub fn generator(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn inverse(self) -> Self {
        Letter(self.0 ^ 1)
    }

    /// +1 or -1.
    pub fn sign(self) -> i64 {
        if self.is_inverse() {
            -1
        } else {
            1
        }
    }

    /// Dense index in `0..2 * rank`, usable as a table column.
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn from_index(index: usize) -> Self {
        Letter(index as u32)
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_inverse() {
            write!(f, "x{}^-1", self.generator())
        } else {
            write!(f, "x{}", self.generator())
        }
    }
}

/// A freely reduced word. The only way to build one is through
/// [`Word::reduce`] or the reducing multiplication, so the invariant holds
/// for every value.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letter(l: Letter) -> Self {
        Word(vec![l])
    }

    pub fn gen(generator: usize) -> Self {
        Word(vec![Letter::pos(generator)])
    }

    /// Free reduction of an arbitrary letter sequence.
    pub fn reduce<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    /// Reduce, rejecting letters outside an alphabet of `rank` generators.
    pub fn reduce_checked<I: IntoIterator<Item = Letter>>(letters: I, rank: usize) -> Result<Self> {
        let letters: Vec<Letter> = letters.into_iter().collect();
        if let Some(bad) = letters.iter().find(|l| l.generator() >= rank) {
            return Err(Error::UnknownGenerator(format!("index {}", bad.generator())));
        }
        Ok(Word::reduce(letters))
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
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut out = self.0.clone();
        let mut skip = 0;
        while skip < other.0.len() && out.last() == Some(&other.0[skip].inverse()) {
            out.pop();
            skip += 1;
        }
        out.extend_from_slice(&other.0[skip..]);
        Word(out)
    }

    pub fn pow(&self, exponent: i64) -> Word {
        let base = if exponent < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::empty();
        for _ in 0..exponent.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// `self^-1 * other^-1 * self * other`.
    pub fn commutator(&self, other: &Word) -> Word {
        self.inverse().mul(&other.inverse()).mul(self).mul(other)
    }

    /// `self * other * self^-1`.
    pub fn conjugate_by(&self, other: &Word) -> Word {
        other.mul(self).mul(&other.inverse())
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.0.iter().map(|l| l.generator()).max()
    }

    /// Apply a letter substitution (one image word per generator) and reduce.
    pub fn substitute(&self, images: &[Word]) -> Word {
        let mut out = Word::empty();
        for l in &self.0 {
            let img = &images[l.generator()];
            out = if l.is_inverse() { out.mul(&img.inverse()) } else { out.mul(img) };
        }
        out
    }

    /// Exponent sum of every generator, indexed by generator.
    pub fn exponent_sums(&self, rank: usize) -> Vec<i64> {
        let mut v = vec![0; rank];
        for l in &self.0 {
            v[l.generator()] += l.sign();
        }
        v
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.0.first(), self.0.last()) {
            (Some(a), Some(b)) => self.0.len() == 1 || *a != b.inverse(),
            _ => true,
        }
    }

    /// Returns `(core, conjugator)` with `self = conjugator * core * conjugator^-1`
    /// and `core` cyclically reduced.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let n = self.0.len();
        let mut k = 0;
        while 2 * k + 1 < n && self.0[k] == self.0[n - 1 - k].inverse() {
            k += 1;
        }
        (Word(self.0[k..n - k].to_vec()), Word(self.0[..k].to_vec()))
    }

    /// Cyclic rotation: letters `k..` followed by `..k`.
    pub fn rotate(&self, k: usize) -> Word {
        let mut v = self.0[k..].to_vec();
        v.extend_from_slice(&self.0[..k]);
        Word(v)
    }

    /// Maximal root: `self = root^exponent` with `exponent` maximal.
    pub fn primitive_root(&self) -> Result<(Word, u64)> {
        if self.is_empty() {
            return Err(Error::TrivialElement);
        }
        let (core, conj) = self.cyclic_reduce();
        let n = core.len();
        for period in 1..=n {
            if n % period != 0 {
                continue;
            }
            if (period..n).all(|i| core.0[i] == core.0[i - period]) {
                let root = Word(core.0[..period].to_vec());
                return Ok((root.conjugate_by(&conj), (n / period) as u64));
            }
        }
        unreachable!("period n always matches")
    }

    /// Lexicographically least rotation of this word and of its inverse,
    /// assuming the word is cyclically reduced.
    pub fn cyclic_min(&self) -> Word {
        let inv = self.inverse();
        let mut best = self.clone();
        for w in [self, &inv] {
            for k in 0..w.len() {
                let r = w.rotate(k);
                if r < best {
                    best = r;
                }
            }
        }
        best
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|l| format!("{:?}", l)).collect();
        write!(f, "{}", parts.join("*"))
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word::reduce(iter)
    }
}

/// A free group of finite rank with named generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeGroup {
    names: Vec<String>,
}

impl FreeGroup {
    pub fn new(names: Vec<String>) -> Result<Self> {
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::DuplicateGenerator(n.clone()));
            }
        }
        Ok(FreeGroup { names })
    }

    /// Rank `n` with generators `a, b, c, ...`.
    pub fn of_rank(rank: usize) -> Self {
        FreeGroup { names: crate::syntax::default_names(rank) }
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn contains(&self, w: &Word) -> bool {
        w.max_generator().map_or(true, |g| g < self.rank())
    }

    pub fn centralizer(&self, w: &Word) -> Result<FreeCentralizer> {
        if !self.contains(w) {
            return Err(Error::AlphabetMismatch);
        }
        Ok(centralizer_free(w))
    }
}

/// Centralizer of an element of a free group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FreeCentralizer {
    /// The element is the identity; its centralizer is the whole group.
    Whole,
    /// Infinite cyclic, generated by the given maximal root.
    Cyclic(Word),
}

pub fn centralizer_free(w: &Word) -> FreeCentralizer {
    match w.primitive_root() {
        Ok((root, _)) => FreeCentralizer::Cyclic(root),
        Err(_) => FreeCentralizer::Whole,
    }
}

/// A homomorphism out of a free group, given by generator images.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeHom {
    source_rank: usize,
    target_rank: usize,
    images: Vec<Word>,
}

impl FreeHom {
    pub fn new(source_rank: usize, target_rank: usize, images: Vec<Word>) -> Result<Self> {
        if images.len() != source_rank {
            return Err(Error::AlphabetMismatch);
        }
        if images.iter().any(|w| w.max_generator().is_some_and(|g| g >= target_rank)) {
            return Err(Error::AlphabetMismatch);
        }
        Ok(FreeHom { source_rank, target_rank, images })
    }

    pub fn identity(rank: usize) -> Self {
        FreeHom { source_rank: rank, target_rank: rank, images: (0..rank).map(Word::gen).collect() }
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn target_rank(&self) -> usize {
        self.target_rank
    }

    pub fn eval(&self, w: &Word) -> Result<Word> {
        if w.max_generator().is_some_and(|g| g >= self.source_rank) {
            return Err(Error::AlphabetMismatch);
        }
        Ok(w.substitute(&self.images))
    }
}

/// All reduced words of length exactly `len` over `rank` generators, in
/// shortlex order of letter codes.
pub fn words_of_length(rank: usize, len: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * 2 * rank);
        for w in &out {
            for code in 0..2 * rank {
                let l = Letter::from_index(code);
                if w.0.last() == Some(&l.inverse()) {
                    continue;
                }
                let mut v = w.0.clone();
                v.push(l);
                next.push(Word(v));
            }
        }
        out = next;
    }
    out
}

/// Number of reduced words of length `len` over `rank` generators.
pub fn count_words(rank: usize, len: usize) -> u128 {
    match (rank, len) {
        (_, 0) => 1,
        (0, _) => 0,
        _ => 2 * rank as u128 * (2 * rank as u128 - 1).pow(len as u32 - 1),
    }
}

/// The `index`-th entry of `words_of_length(rank, len)`, without building
/// the list.
pub fn nth_word(rank: usize, len: usize, mut index: u128) -> Word {
    let mut digits = Vec::with_capacity(len);
    for i in (0..len).rev() {
        let base = if i == 0 { 2 * rank } else { 2 * rank - 1 } as u128;
        digits.push((index % base) as usize);
        index /= base;
    }
    digits.reverse();
    let mut v: Vec<Letter> = Vec::with_capacity(len);
    for d in digits {
        let code = match v.last() {
            Some(prev) if d >= prev.inverse().index() => d + 1,
            _ => d,
        };
        v.push(Letter::from_index(code));
    }
    Word(v)
}

/// All reduced words of length at most `max_len`, shortest first.
pub fn words_up_to(rank: usize, max_len: usize) -> Vec<Word> {
    (0..=max_len).flat_map(|l| words_of_length(rank, l)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(letters: &[(usize, i32)]) -> Word {
        Word::reduce(letters.iter().map(|&(g, s)| Letter::new(g, s < 0)))
    }

    #[test]
    fn nth_word_matches_list() {
        for rank in 1..3 {
            for len in 0..4 {
                let all = words_of_length(rank, len);
                assert_eq!(all.len() as u128, count_words(rank, len));
                for (i, w) in all.iter().enumerate() {
                    assert_eq!(&nth_word(rank, len, i as u128), w);
                }
            }
        }
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(w(&[(0, 1), (0, -1), (1, 1)]), w(&[(1, 1)]));
        assert_eq!(Word::reduce(vec![]), Word::empty());
        let raw = vec![Letter::pos(0), Letter::pos(1), Letter::neg(1), Letter::pos(0)];
        assert_eq!(Word::reduce(raw).letters(), &[Letter::pos(0), Letter::pos(0)]);
    }

    #[test]
    fn reduce_checked_rejects_unknown() {
        assert!(Word::reduce_checked(vec![Letter::pos(3)], 2).is_err());
    }

    #[test]
    fn cyclic_reduce_examples() {
        let bab = w(&[(1, 1), (0, 1), (1, -1)]);
        assert_eq!(bab.cyclic_reduce(), (Word::gen(0), Word::gen(1)));
        let ab = w(&[(0, 1), (1, 1)]);
        assert_eq!(ab.cyclic_reduce(), (ab.clone(), Word::empty()));
        assert_eq!(Word::empty().cyclic_reduce(), (Word::empty(), Word::empty()));
    }

    #[test]
    fn primitive_root_examples() {
        let ab = w(&[(0, 1), (1, 1)]);
        assert_eq!(ab.pow(3).primitive_root().unwrap(), (ab, 3));
        assert_eq!(Word::gen(0).primitive_root().unwrap(), (Word::gen(0), 1));
        let x = w(&[(0, 1), (1, 1), (0, 1), (1, -1)]);
        assert_eq!(x.primitive_root().unwrap(), (x.clone(), 1));
        assert!(Word::empty().primitive_root().is_err());
    }

    #[test]
    fn root_of_conjugated_power() {
        let b = Word::gen(1);
        let g = Word::gen(0).pow(4).conjugate_by(&b);
        assert_eq!(g.primitive_root().unwrap(), (Word::gen(0).conjugate_by(&b), 4));
    }

    #[test]
    fn centralizer_examples() {
        let f = FreeGroup::of_rank(2);
        assert_eq!(f.centralizer(&Word::gen(0).pow(2)).unwrap(), FreeCentralizer::Cyclic(Word::gen(0)));
        let ab = w(&[(0, 1), (1, 1)]);
        assert_eq!(f.centralizer(&ab).unwrap(), FreeCentralizer::Cyclic(ab));
        assert_eq!(f.centralizer(&Word::empty()).unwrap(), FreeCentralizer::Whole);
    }

    #[test]
    fn eval_hom_examples() {
        let a = Word::gen(0);
        let f = FreeHom::new(2, 1, vec![a.clone(), a.clone()]).unwrap();
        assert_eq!(f.eval(&w(&[(0, 1), (1, -1)])).unwrap(), Word::empty());
        let id = FreeHom::identity(2);
        let x = w(&[(0, 1), (1, -1), (0, 1)]);
        assert_eq!(id.eval(&x).unwrap(), x);
        let g = FreeHom::new(1, 2, vec![w(&[(0, 1), (1, 1)])]).unwrap();
        assert_eq!(g.eval(&Word::gen(0).pow(2)).unwrap(), w(&[(0, 1), (1, 1), (0, 1), (1, 1)]));
        assert!(g.eval(&Word::gen(1)).is_err());
    }

    #[test]
    fn word_counts() {
        assert_eq!(words_of_length(2, 3).len(), 4 * 3 * 3);
        assert_eq!(words_up_to(2, 2).len(), 1 + 4 + 12);
    }
}
