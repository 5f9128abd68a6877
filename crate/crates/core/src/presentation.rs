//! Finite presentations `< X | R >` and the operations that only look at
//! the presentation itself: canonical forms, abelianization, and the
//! enumeration of relator consequences.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::syntax;
use crate::word::{words_of_length, words_up_to, Letter, Word};

/// Generators plus relators. Relators are kept freely and cyclically
/// reduced and nonempty.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Presentation {
    generators: Vec<String>,
    relators: Vec<Word>,
}

impl Presentation {
    pub fn new(generators: Vec<String>, relators: Vec<Word>) -> Result<Self> {
        for (i, n) in generators.iter().enumerate() {
            if !syntax::is_identifier(n) {
                return Err(Error::Invalid(format!("`{n}` is not an identifier")));
            }
            if generators[..i].contains(n) {
                return Err(Error::DuplicateGenerator(n.clone()));
            }
        }
        let rank = generators.len();
        if relators.iter().any(|r| r.max_generator().is_some_and(|g| g >= rank)) {
            return Err(Error::AlphabetMismatch);
        }
        let relators = relators.into_iter().map(|r| r.cyclic_reduce().0).filter(|r| !r.is_empty()).collect();
        Ok(Presentation { generators, relators })
    }

    /// Free group of the given rank with default generator names.
    pub fn free(rank: usize) -> Self {
        Presentation { generators: syntax::default_names(rank), relators: Vec::new() }
    }

    pub fn with_default_names(rank: usize, relators: Vec<Word>) -> Result<Self> {
        Presentation::new(syntax::default_names(rank), relators)
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn total_relator_length(&self) -> usize {
        self.relators.iter().map(Word::len).sum()
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        syntax::parse_word(text, &self.generators)
    }

    pub fn format_word(&self, w: &Word) -> String {
        syntax::format_word(w, &self.generators)
    }

    pub fn contains_word(&self, w: &Word) -> bool {
        w.max_generator().map_or(true, |g| g < self.rank())
    }

    /// Same group, generators renamed.
    pub fn renamed(&self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.rank() {
            return Err(Error::AlphabetMismatch);
        }
        Presentation::new(names, self.relators.clone())
    }

    /// Canonical form, invariant under generator renaming and permutation,
    /// relator order, cyclic rotation and inversion of relators. Generator
    /// permutations are only searched for presentations with at most
    /// [`NORMALIZE_MAX_GENERATORS`] generators; above that the generator
    /// order is kept as given.
    pub fn normalize(&self) -> Presentation {
        let n = self.rank();
        let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        let best = if n <= NORMALIZE_MAX_GENERATORS {
            let mut best: Option<Vec<Word>> = None;
            for perm in permutations(n) {
                let key = canonical_relators(&self.relators, &perm);
                if best.as_ref().map_or(true, |b| key_lt(&key, b)) {
                    best = Some(key);
                }
            }
            best.unwrap_or_default()
        } else {
            canonical_relators(&self.relators, &(0..n).collect::<Vec<_>>())
        };
        Presentation { generators: names, relators: best }
    }

    /// A generator permutation `perm` carrying this presentation's relators
    /// onto `other`'s, up to relator order, rotation and inversion:
    /// generator `i` here plays the role of generator `perm[i]` there.
    pub fn relabeling_to(&self, other: &Presentation) -> Option<Vec<usize>> {
        let n = self.rank();
        if n != other.rank() || self.relators.len() != other.relators.len() {
            return None;
        }
        let target = canonical_relators(&other.relators, &(0..n).collect::<Vec<_>>());
        let candidates = if n <= NORMALIZE_MAX_GENERATORS { permutations(n) } else { vec![(0..n).collect()] };
        candidates.into_iter().find(|perm| canonical_relators(&self.relators, perm) == target)
    }

    pub fn abelianization(&self) -> Abelianization {
        let rows: Vec<Vec<i64>> = self.relators.iter().map(|r| r.exponent_sums(self.rank())).collect();
        let diag = smith_diagonal(rows, self.rank());
        let nonzero: Vec<u64> = diag.into_iter().filter(|&d| d != 0).collect();
        Abelianization {
            free_rank: self.rank() - nonzero.len(),
            torsion: nonzero.into_iter().filter(|&d| d > 1).collect(),
        }
    }

    /// Lazily enumerates the words trivial in the presented group.
    pub fn consequences(&self) -> ConsequenceStream {
        ConsequenceStream::new(self.clone())
    }
}

pub const NORMALIZE_MAX_GENERATORS: usize = 6;

fn key_lt(a: &[Word], b: &[Word]) -> bool {
    let ka: Vec<(usize, &Word)> = a.iter().map(|w| (w.len(), w)).collect();
    let kb: Vec<(usize, &Word)> = b.iter().map(|w| (w.len(), w)).collect();
    ka < kb
}

fn canonical_relators(relators: &[Word], perm: &[usize]) -> Vec<Word> {
    let mut out: Vec<Word> = relators
        .iter()
        .map(|r| Word::reduce(r.letters().iter().map(|l| Letter::new(perm[l.generator()], l.is_inverse()))).cyclic_min())
        .collect();
    out.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    heap_permute(n, &mut cur, &mut out);
    out
}

fn heap_permute(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(cur.clone());
        return;
    }
    for i in 0..k {
        heap_permute(k - 1, cur, out);
        if k % 2 == 0 {
            cur.swap(i, k - 1);
        } else {
            cur.swap(0, k - 1);
        }
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&syntax::format_presentation(&self.generators, &self.relators))
    }
}

impl fmt::Debug for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Presentation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (gens, rels) = syntax::parse_presentation_parts(s)?;
        Presentation::new(gens, rels)
    }
}

/// Invariants of the abelianization `Z^free_rank ⊕ ⊕ Z/t_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Abelianization {
    pub free_rank: usize,
    pub torsion: Vec<u64>,
}

impl Abelianization {
    pub fn is_torsion_free(&self) -> bool {
        self.torsion.is_empty()
    }
}

/// Elementary divisors of an integer matrix (diagonal of its Smith form,
/// zeros included up to `min(rows, cols)`).
pub fn smith_diagonal(rows: Vec<Vec<i64>>, cols: usize) -> Vec<u64> {
    let mut m: Vec<Vec<i128>> = rows.into_iter().map(|r| r.into_iter().map(i128::from).collect()).collect();
    let nrows = m.len();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < nrows.min(cols) {
        // pivot: smallest nonzero absolute value in the remaining block
        let mut pivot = None;
        for i in t..nrows {
            for j in t..cols {
                if m[i][j] != 0 && pivot.map_or(true, |(pi, pj): (usize, usize)| m[i][j].abs() < m[pi][pj].abs()) {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let p = m[t][t];
            let mut dirty = false;
            for i in t + 1..nrows {
                let q = m[i][t] / p;
                if q != 0 {
                    for j in t..cols {
                        m[i][j] -= q * m[t][j];
                    }
                }
                if m[i][t] != 0 {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                let q = m[t][j] / p;
                if q != 0 {
                    for row in m.iter_mut().skip(t) {
                        row[j] -= q * row[t];
                    }
                }
                if m[t][j] != 0 {
                    dirty = true;
                }
            }
            if !dirty {
                // divisibility condition against the rest of the block
                let bad = (t + 1..nrows).flat_map(|i| (t + 1..cols).map(move |j| (i, j))).find(|&(i, j)| m[i][j] % p != 0);
                match bad {
                    None => break,
                    Some((i, _)) => {
                        for j in t..cols {
                            m[t][j] += m[i][j];
                        }
                        continue;
                    }
                }
            }
            // move the smallest entry of row/column t into the pivot
            let mut best = (t, t);
            for i in t..nrows {
                if m[i][t] != 0 && m[i][t].abs() < m[best.0][best.1].abs() {
                    best = (i, t);
                }
            }
            for j in t..cols {
                if m[t][j] != 0 && m[t][j].abs() < m[best.0][best.1].abs() {
                    best = (t, j);
                }
            }
            m.swap(t, best.0);
            for row in m.iter_mut() {
                row.swap(t, best.1);
            }
        }
        diag.push(m[t][t].unsigned_abs() as u64);
        t += 1;
    }
    while diag.len() < nrows.min(cols) {
        diag.push(0);
    }
    diag
}

/// Fair enumeration of the normal closure of the relators: products of `k`
/// conjugates `c r^±1 c^-1`, taken level by level in the cost
/// `k + Σ|c_i|`. The empty word comes first; duplicates are suppressed.
/// Each level is walked lazily.
pub struct ConsequenceStream {
    pres: Presentation,
    level: usize,
    /// conjugated relators, indexed by conjugator length
    factors: Vec<Vec<Word>>,
    plans: Vec<Vec<usize>>,
    plan: usize,
    counter: Vec<usize>,
    seen: HashSet<Word>,
    started: bool,
}

impl ConsequenceStream {
    fn new(pres: Presentation) -> Self {
        ConsequenceStream {
            pres,
            level: 0,
            factors: Vec::new(),
            plans: Vec::new(),
            plan: 0,
            counter: Vec::new(),
            seen: HashSet::new(),
            started: false,
        }
    }

    /// Current cost level.
    pub fn level(&self) -> usize {
        self.level
    }

    fn factors_of_length(&mut self, len: usize) {
        while self.factors.len() <= len {
            let l = self.factors.len();
            let mut fs = Vec::new();
            for c in words_of_length(self.pres.rank(), l) {
                for r in &self.pres.relators {
                    fs.push(r.conjugate_by(&c));
                    fs.push(r.inverse().conjugate_by(&c));
                }
            }
            self.factors.push(fs);
        }
    }

    fn open_level(&mut self) {
        self.level += 1;
        let cost = self.level;
        self.plans = (1..=cost).flat_map(|k| compositions(cost - k, k)).collect();
        self.factors_of_length(cost - 1);
        self.plan = 0;
        self.counter = vec![0; self.plans.first().map_or(0, Vec::len)];
    }

    /// Next raw product in the current level, advancing the odometer.
    fn step(&mut self) -> Option<Word> {
        let parts = self.plans.get(self.plan)?;
        let mut w = Word::empty();
        for (i, &len) in parts.iter().enumerate() {
            w = w.mul(&self.factors[len][self.counter[i]]);
        }
        let mut i = parts.len();
        loop {
            if i == 0 {
                self.plan += 1;
                self.counter = vec![0; self.plans.get(self.plan).map_or(0, Vec::len)];
                break;
            }
            i -= 1;
            self.counter[i] += 1;
            if self.counter[i] < self.factors[parts[i]].len() {
                break;
            }
            self.counter[i] = 0;
        }
        Some(w)
    }
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

impl Iterator for ConsequenceStream {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if !self.started {
            self.started = true;
            self.seen.insert(Word::empty());
            return Some(Word::empty());
        }
        if self.pres.relators.is_empty() {
            return None;
        }
        loop {
            match self.step() {
                Some(w) => {
                    if self.seen.insert(w.clone()) {
                        return Some(w);
                    }
                }
                None => self.open_level(),
            }
        }
    }
}

/// Bounded meet-in-the-middle search for `w` as a product of at most
/// `max_factors` (≤ 3) conjugates of relators with conjugators of length at
/// most `max_conj`. Triviality is conjugation invariant, so the cyclic core
/// of `w` is searched.
pub fn is_consequence(p: &Presentation, w: &Word, max_factors: usize, max_conj: usize) -> bool {
    let (core, _) = w.cyclic_reduce();
    if core.is_empty() {
        return true;
    }
    let mut q: Vec<Word> = Vec::new();
    for c in words_up_to(p.rank(), max_conj) {
        for r in p.relators() {
            q.push(r.conjugate_by(&c));
            q.push(r.inverse().conjugate_by(&c));
        }
    }
    let set: HashSet<&Word> = q.iter().collect();
    if max_factors >= 1 && set.contains(&core) {
        return true;
    }
    if max_factors >= 2 && q.iter().any(|a| set.contains(&a.inverse().mul(&core))) {
        return true;
    }
    if max_factors >= 3 {
        for a in &q {
            let rest = a.inverse().mul(&core);
            if q.iter().any(|b| set.contains(&b.inverse().mul(&rest))) {
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Presentation {
        s.parse().unwrap()
    }

    #[test]
    fn parse_examples() {
        let g = p("< a, b | [a,b] >");
        assert_eq!(g.rank(), 2);
        assert_eq!(g.relators()[0], Word::gen(0).commutator(&Word::gen(1)));
        let z2 = p("< a | a^2 >");
        assert_eq!(z2.relators(), &[Word::gen(0).pow(2)]);
        assert!(matches!("< a | b >".parse::<Presentation>(), Err(Error::UnknownGenerator(_))));
    }

    #[test]
    fn serialize_round_trip() {
        for s in ["< a, b | a^-1*b^-1*a*b >", "< a, b | >", "< x | x^5, x^3 >", "< | >"] {
            let g = p(s);
            assert_eq!(g.to_string(), s);
            assert_eq!(p(&g.to_string()), g);
        }
    }

    #[test]
    fn relators_are_cyclically_reduced() {
        let g = p("< a, b | b a b^-1, a a^-1 >");
        assert_eq!(g.relators(), &[Word::gen(0)]);
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(p("< b, a | [b,a] >").normalize(), p("< x, y | [x,y] >").normalize());
        assert_eq!(p("< a | a^2 >").normalize(), p("< a | a^-2 >").normalize());
        assert_ne!(p("< a | a^2 >").normalize(), p("< a | a^3 >").normalize());
        let n = p("< a, b | b^2 a, a b a^3 >").normalize();
        assert_eq!(n.normalize(), n);
    }

    #[test]
    fn abelianization_examples() {
        let ab = p("< a, b | [a,b] >").abelianization();
        assert_eq!((ab.free_rank, ab.torsion.clone()), (2, vec![]));
        let ab = p("< a | a^2 >").abelianization();
        assert_eq!((ab.free_rank, ab.torsion.clone()), (0, vec![2]));
        let ab = p("< a, b | a^2 b^-3 >").abelianization();
        assert_eq!((ab.free_rank, ab.torsion.clone()), (1, vec![]));
        let ab = p("< a, b | a^4 b^6, a^6 b^4 >").abelianization();
        // det = 16 - 36 = -20, gcd of entries 2 -> (2, 10)
        assert_eq!((ab.free_rank, ab.torsion.clone()), (0, vec![2, 10]));
    }

    #[test]
    fn consequence_examples() {
        let g = p("< a | a^2 >");
        let first: Vec<Word> = g.consequences().take(3).collect();
        assert!(first.contains(&Word::gen(0).pow(2)));
        assert!(first.contains(&Word::gen(0).pow(-2)));
        let free: Vec<Word> = p("< a, b | >").consequences().collect();
        assert_eq!(free, vec![Word::empty()]);
        let comm = p("< a, b | [a,b] >");
        let target = Word::gen(0).pow(2).commutator(&Word::gen(1));
        assert!(comm.consequences().take(20000).any(|w| w == target));
        assert!(is_consequence(&comm, &target, 2, 1));
        assert!(!is_consequence(&comm, &Word::gen(0), 3, 2));
    }
}
