//! Free products of two free groups amalgamated along cyclic subgroups,
//! `F(X) *_{u = v} F(Y)`, with their word problem.

use crate::error::{Error, Result};
use crate::oracle::{Mode, WordOracle};
use crate::presentation::Presentation;
use crate::syntax;
use crate::word::Word;

/// `u = conj · root^exp · conj^-1` with `root` cyclically reduced and not a
/// proper power.
#[derive(Clone, Debug)]
struct Cyclic {
    conj: Word,
    root: Word,
    exp: i64,
}

impl Cyclic {
    fn new(u: &Word) -> Result<Self> {
        let (core, conj) = u.cyclic_reduce();
        let (root, exp) = core.primitive_root()?;
        Ok(Cyclic { conj, root, exp: exp as i64 })
    }

    fn element(&self, k: i64) -> Word {
        self.root.pow(k * self.exp).conjugate_by(&self.conj)
    }

    /// `k` with `x = u^k` in the free group, if any.
    fn power_of(&self, x: &Word) -> Option<i64> {
        let y = self.conj.inverse().mul(x).mul(&self.conj);
        if y.is_empty() {
            return Some(0);
        }
        let r = self.root.len();
        if y.len() % r != 0 {
            return None;
        }
        let j = (y.len() / r) as i64;
        let j = if self.root.pow(j) == y {
            j
        } else if self.root.pow(-j) == y {
            -j
        } else {
            return None;
        };
        (j % self.exp == 0).then_some(j / self.exp)
    }
}

/// `F(x_1..x_m) *_{u = v} F(y_1..y_n)` on generators `x` then `y`.
#[derive(Clone, Debug)]
pub struct CyclicAmalgam {
    rank1: usize,
    rank2: usize,
    u: Word,
    v: Word,
    edges: [Cyclic; 2],
}

impl CyclicAmalgam {
    /// `u` is over the first `rank1` generators, `v` over the next `rank2`.
    pub fn new(rank1: usize, rank2: usize, u: Word, v: Word) -> Result<Self> {
        if u.is_empty() || v.is_empty() {
            return Err(Error::TrivialElement);
        }
        let in_first = u.letters().iter().all(|l| l.generator() < rank1);
        let in_second = v.letters().iter().all(|l| (rank1..rank1 + rank2).contains(&l.generator()));
        if !in_first || !in_second {
            return Err(Error::AlphabetMismatch);
        }
        let edges = [Cyclic::new(&u)?, Cyclic::new(&v)?];
        Ok(CyclicAmalgam { rank1, rank2, u, v, edges })
    }

    pub fn rank(&self) -> usize {
        self.rank1 + self.rank2
    }

    pub fn u(&self) -> &Word {
        &self.u
    }

    pub fn v(&self) -> &Word {
        &self.v
    }

    pub fn presentation(&self) -> Presentation {
        let relator = self.u.mul(&self.v.inverse());
        Presentation::new(syntax::default_names(self.rank()), vec![relator]).expect("amalgam presentation")
    }

    fn factor(&self, generator: usize) -> usize {
        usize::from(generator >= self.rank1)
    }

    /// Reduced syllable sequence: alternating factors, none in the edge
    /// group unless it is the only one.
    pub fn reduce(&self, w: &Word) -> Vec<(usize, Word)> {
        let mut syl: Vec<(usize, Word)> = Vec::new();
        for &l in w.letters() {
            let f = self.factor(l.generator());
            match syl.last_mut() {
                Some((g, s)) if *g == f => *s = s.mul(&Word::letter(l)),
                _ => syl.push((f, Word::letter(l))),
            }
        }
        loop {
            let mut changed = false;
            let mut i = 0;
            while i < syl.len() {
                if syl[i].1.is_empty() {
                    syl.remove(i);
                    merge_at(&mut syl, i);
                    changed = true;
                    continue;
                }
                if syl.len() > 1 {
                    let f = syl[i].0;
                    if let Some(k) = self.edges[f].power_of(&syl[i].1) {
                        syl[i] = (1 - f, self.edges[1 - f].element(k));
                        if i + 1 < syl.len() {
                            merge_at(&mut syl, i + 1);
                        }
                        if i > 0 {
                            merge_at(&mut syl, i);
                        }
                        changed = true;
                        continue;
                    }
                }
                i += 1;
            }
            if !changed {
                return syl;
            }
        }
    }

    pub fn is_trivial(&self, w: &Word) -> bool {
        self.reduce(w).is_empty()
    }

    /// Recognizes a one-relator presentation whose relator is, up to
    /// rotation and inversion, `u v^-1` with `u` and `v` over complementary
    /// generator sets. Returns the amalgam and images of the presentation's
    /// generators in it.
    pub fn from_presentation(p: &Presentation) -> Option<(CyclicAmalgam, Vec<Word>)> {
        let [r] = p.relators() else { return None };
        let n = p.rank();
        if n > 16 {
            return None;
        }
        let r = r.cyclic_reduce().0;
        for mask in 1u32..(1 << n) - 1 {
            let side = |g: usize| mask >> g & 1 == 1;
            let letters = r.letters();
            let changes = (0..letters.len())
                .filter(|&i| side(letters[i].generator()) != side(letters[(i + 1) % letters.len()].generator()))
                .count();
            if changes != 2 {
                continue;
            }
            // rotate so the relator starts with its first-side block
            let start = (0..letters.len())
                .find(|&i| side(letters[i].generator()) && !side(letters[(i + letters.len() - 1) % letters.len()].generator()))?;
            let rot = r.rotate(start);
            let split = rot.letters().iter().position(|l| !side(l.generator()))?;
            let first: Vec<usize> = (0..n).filter(|&g| side(g)).collect();
            let second: Vec<usize> = (0..n).filter(|&g| !side(g)).collect();
            let mut new_index = vec![0; n];
            for (i, &g) in first.iter().chain(&second).enumerate() {
                new_index[g] = i;
            }
            let images: Vec<Word> = new_index.iter().map(|&i| Word::gen(i)).collect();
            let u = Word::reduce(rot.letters()[..split].iter().copied()).substitute(&images);
            let v = Word::reduce(rot.letters()[split..].iter().copied()).substitute(&images).inverse();
            if let Ok(a) = CyclicAmalgam::new(first.len(), second.len(), u, v) {
                return Some((a, images));
            }
        }
        None
    }
}

/// Joins syllables `i - 1` and `i` when they sit in the same factor.
fn merge_at(syl: &mut Vec<(usize, Word)>, i: usize) {
    if i > 0 && i < syl.len() && syl[i - 1].0 == syl[i].0 {
        let (_, w) = syl.remove(i);
        syl[i - 1].1 = syl[i - 1].1.mul(&w);
    }
}

impl WordOracle for CyclicAmalgam {
    fn rank(&self) -> usize {
        CyclicAmalgam::rank(self)
    }

    fn is_trivial(&self, w: &Word) -> Result<bool> {
        if w.max_generator().is_some_and(|g| g >= self.rank()) {
            return Err(Error::AlphabetMismatch);
        }
        Ok(CyclicAmalgam::is_trivial(self, w))
    }

    fn mode(&self) -> Mode {
        Mode::Total
    }

    fn name(&self) -> String {
        "pinched".into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surface() -> CyclicAmalgam {
        let p: Presentation = "< a, b, c, d | >".parse().unwrap();
        let u = p.parse_word("[a,b]").unwrap();
        let v = p.parse_word("[c,d]").unwrap();
        CyclicAmalgam::new(2, 2, u, v).unwrap()
    }

    #[test]
    fn surface_word_problem() {
        let g = surface();
        let p = g.presentation();
        let w = |s: &str| p.parse_word(s).unwrap();
        assert!(g.is_trivial(&w("[a,b] [c,d]^-1")));
        assert!(g.is_trivial(&w("[a,b]^3 [c,d]^-3")));
        assert!(g.is_trivial(&w("a [c,d] a^-1 a [a,b]^-1 a^-1")));
        assert!(!g.is_trivial(&w("[a,c]")));
        assert!(!g.is_trivial(&w("[a,b]")));
        // [c,d] commutes with a*b*a^-1*b^-1
        assert!(g.is_trivial(&w("[c,d] [a,b] [c,d]^-1 [a,b]^-1")));
        assert!(!g.is_trivial(&w("[c,d] a [c,d]^-1 a^-1")));
    }

    #[test]
    fn powers_in_edge() {
        let p: Presentation = "< a, b, c | >".parse().unwrap();
        let g = CyclicAmalgam::new(2, 1, p.parse_word("a^2").unwrap(), p.parse_word("c^3").unwrap()).unwrap();
        let w = |s: &str| p.parse_word(s).unwrap();
        assert!(g.is_trivial(&w("a^4 c^-6")));
        assert!(!g.is_trivial(&w("a c^-1")));
        assert!(!g.is_trivial(&w("a^2 c^-2")));
        assert!(g.is_trivial(&w("b a^2 b^-1 b c^-3 b^-1")));
        assert!(!g.is_trivial(&w("[a, c]")));
        assert!(g.is_trivial(&w("[a^2, c]")));
    }

    #[test]
    fn detects_pinched_presentations() {
        let p: Presentation = "< a, b, c, d | [a,b] [d,c] >".parse().unwrap();
        let (g, images) = CyclicAmalgam::from_presentation(&p).unwrap();
        assert!(g.is_trivial(&p.relators()[0].substitute(&images)));
        assert!(!g.is_trivial(&p.parse_word("[a,d]").unwrap().substitute(&images)));
        let q: Presentation = "< a, c | a^2 c^-3 >".parse().unwrap();
        assert!(CyclicAmalgam::from_presentation(&q).is_some());
        let klein: Presentation = "< a, b | b a b^-1 a >".parse().unwrap();
        assert!(CyclicAmalgam::from_presentation(&klein).is_none());
    }

    #[test]
    fn rejects_trivial_edge() {
        assert!(matches!(CyclicAmalgam::new(1, 1, Word::empty(), Word::gen(1)), Err(Error::TrivialElement)));
    }
}
