//! Local retractions: presentations of retracts, the search for a
//! finite-index subgroup retracting onto `⟨S⟩`, and the resulting
//! presentation of `⟨S⟩`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::coset::{low_index, rs_presentation, CosetTable, SubgroupPresentation};
use crate::error::{Error, Result};
use crate::oracle::{Mode, WordOracle};
use crate::presentation::Presentation;
use crate::tietze::{enumerate_presentations, simplify, Move};
use crate::word::{count_words, nth_word, Word};

/// Oracle for a subgroup, answering through its embedding words.
pub struct SubgroupOracle<'a> {
    inner: &'a dyn WordOracle,
    embedding: Vec<Word>,
}

impl<'a> SubgroupOracle<'a> {
    pub fn new(inner: &'a dyn WordOracle, embedding: Vec<Word>) -> Self {
        SubgroupOracle { inner, embedding }
    }
}

impl WordOracle for SubgroupOracle<'_> {
    fn rank(&self) -> usize {
        self.embedding.len()
    }

    fn is_trivial(&self, w: &Word) -> Result<bool> {
        if w.max_generator().is_some_and(|g| g >= self.rank()) {
            return Err(Error::AlphabetMismatch);
        }
        self.inner.is_trivial(&w.substitute(&self.embedding))
    }

    fn mode(&self) -> Mode {
        self.inner.mode()
    }

    fn name(&self) -> String {
        format!("subgroup({})", self.inner.name())
    }
}

/// Presentation of `ρ(G)` with its relation to `G`.
#[derive(Clone, Debug)]
pub struct RetractPresentation {
    pub presentation: Presentation,
    /// Generator `j` of the retract as an element of `G`.
    pub embedding: Vec<Word>,
    /// `ρ(x_i)` as a word in the retract's generators.
    pub substitution: Vec<Word>,
    pub moves: Vec<Move>,
    /// Outcome of the blind Tietze search, when requested.
    pub conformance: Option<bool>,
}

/// Options for [`retract_presentation`].
#[derive(Clone, Copy, Debug, Default)]
pub struct RetractOptions {
    /// Also search blindly, by Tietze moves from `⟨X | R⟩`, for the
    /// directed result, within this many stream elements.
    pub conformance_budget: Option<usize>,
}

/// Presents `ρ(G)` for an idempotent endomorphism `ρ` given by generator
/// images. The generating set is split into `ρ(x)` and the kernel elements
/// `x ρ(x)^-1`; killing the latter gives `⟨X | R, x^-1 ρ(x)⟩`, which is then
/// simplified.
pub fn retract_presentation(
    p: &Presentation,
    rho: &[Word],
    wp: &dyn WordOracle,
    options: RetractOptions,
) -> Result<RetractPresentation> {
    if rho.len() != p.rank() || rho.iter().any(|w| !p.contains_word(w)) {
        return Err(Error::AlphabetMismatch);
    }
    if wp.mode() != Mode::Total {
        return Err(Error::NonTotalOracle);
    }
    for (i, r) in p.relators().iter().enumerate() {
        if !wp.is_trivial(&r.substitute(rho))? {
            return Err(Error::NotAHomomorphism(i));
        }
    }
    for (i, w) in rho.iter().enumerate() {
        if !wp.equal(&w.substitute(rho), w)? {
            return Err(Error::NotARetraction(i));
        }
    }
    let mut relators = p.relators().to_vec();
    for (i, w) in rho.iter().enumerate() {
        relators.push(Word::gen(i).inverse().mul(w));
    }
    let raw = Presentation::new(p.generators().to_vec(), relators)?;
    let s = simplify(&raw);
    let embedding = s
        .presentation
        .generators()
        .iter()
        .map(|n| rho[p.generators().iter().position(|m| m == n).expect("kept generator")].clone())
        .collect();
    let conformance = options.conformance_budget.map(|budget| {
        let target = s.presentation.normalize();
        enumerate_presentations(p)
            .take(budget)
            .any(|r| r.presentation.normalize() == target)
    });
    Ok(RetractPresentation {
        presentation: s.presentation,
        embedding,
        substitution: s.substitution,
        moves: s.moves,
        conformance,
    })
}

/// A verified retraction of a finite-index subgroup `K` onto `⟨S⟩`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Retraction {
    pub table: CosetTable,
    /// Presentation of `K` on generators `X`.
    pub k_presentation: Presentation,
    /// `X_j` as a word in `G`.
    pub k_embedding: Vec<Word>,
    /// `Y_j = ρ(X_j)` as a word in the symbols `S±`.
    pub images: Vec<Word>,
    /// `s_i` as a word in `X`.
    pub s_in_k: Vec<Word>,
}

impl Retraction {
    /// `ρ(X_j)` as a word in `X`.
    pub fn images_in_k(&self) -> Vec<Word> {
        self.images.iter().map(|y| y.substitute(&self.s_in_k)).collect()
    }

    /// Re-checks the `|R| + |S|` defining equations: `r(Y) = 1` in `K` for
    /// every relator of `K` and `s_i(Y) = s_i(X)`.
    pub fn verify(&self, g: &Presentation, s: &[Word], wp: &dyn WordOracle) -> Result<bool> {
        if self.images.len() != self.k_presentation.rank() || self.s_in_k.len() != s.len() {
            return Ok(false);
        }
        if !self.table.is_valid_for(g) || !s.iter().all(|w| self.table.stabilizes(w)) {
            return Ok(false);
        }
        let y_in_g: Vec<Word> = self.images.iter().map(|y| y.substitute(s)).collect();
        for r in self.k_presentation.relators() {
            if !wp.is_trivial(&r.substitute(&y_in_g))? {
                return Ok(false);
            }
        }
        for (si, expr) in s.iter().zip(&self.s_in_k) {
            if !wp.equal(&expr.substitute(&self.k_embedding), si)? || !wp.equal(&expr.substitute(&y_in_g), si)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

enum OracleHandle<'a> {
    Borrowed(&'a dyn WordOracle),
    Shared(Arc<dyn WordOracle>),
}

impl OracleHandle<'_> {
    fn get(&self) -> &dyn WordOracle {
        match self {
            OracleHandle::Borrowed(o) => *o,
            OracleHandle::Shared(o) => o.as_ref(),
        }
    }
}

struct Candidate {
    table: CosetTable,
    sub: SubgroupPresentation,
    s_in_k: Vec<Word>,
}

/// Resumable dovetailed search. Work is ordered by cost
/// `index + Σ|Y_j|`; within one cost, by index, then by table order, then
/// by tuple order. One step is one candidate tuple checked.
pub struct RetractionSearch<'a> {
    g: Presentation,
    s: Vec<Word>,
    wp: OracleHandle<'a>,
    /// candidates per index, filled on first use
    by_index: Vec<Option<Vec<Candidate>>>,
    cost: usize,
    index: usize,
    table: usize,
    tuples: Option<TupleIter>,
    steps: u64,
}

impl RetractionSearch<'static> {
    /// A search owning a shared handle to its oracle.
    pub fn shared(g: &Presentation, s: &[Word], wp: Arc<dyn WordOracle>) -> Result<Self> {
        Self::with_handle(g, s, OracleHandle::Shared(wp))
    }
}

impl<'a> RetractionSearch<'a> {
    pub fn new(g: &Presentation, s: &[Word], wp: &'a dyn WordOracle) -> Result<Self> {
        Self::with_handle(g, s, OracleHandle::Borrowed(wp))
    }

    fn with_handle(g: &Presentation, s: &[Word], wp: OracleHandle<'a>) -> Result<Self> {
        if s.iter().any(|w| !g.contains_word(w)) {
            return Err(Error::AlphabetMismatch);
        }
        if wp.get().mode() != Mode::Total {
            return Err(Error::NonTotalOracle);
        }
        Ok(RetractionSearch {
            g: g.clone(),
            s: s.to_vec(),
            wp,
            by_index: vec![None],
            cost: 1,
            index: 1,
            table: 0,
            tuples: None,
            steps: 0,
        })
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// The oracle this search answers through.
    pub fn oracle(&self) -> &dyn WordOracle {
        self.wp.get()
    }

    fn candidates(&mut self, index: usize) -> Result<&[Candidate]> {
        while self.by_index.len() <= index {
            self.by_index.push(None);
        }
        if self.by_index[index].is_none() {
            let mut out = Vec::new();
            for t in low_index(&self.g, index).filter(|t| t.index() == index) {
                if !self.s.iter().all(|w| t.stabilizes(w)) {
                    continue;
                }
                let sub = rs_presentation(&self.g, &t)?;
                let s_in_k = self.s.iter().map(|w| sub.rewrite(&t, w).expect("s lies in K")).collect();
                out.push(Candidate { table: t, sub, s_in_k });
            }
            self.by_index[index] = Some(out);
        }
        Ok(self.by_index[index].as_deref().unwrap_or(&[]))
    }

    fn advance(&mut self) {
        self.table += 1;
        self.tuples = None;
        let count = self.by_index.get(self.index).and_then(|c| c.as_ref()).map_or(0, Vec::len);
        if self.table >= count {
            self.table = 0;
            self.index += 1;
            if self.index > self.cost {
                self.cost += 1;
                self.index = 1;
            }
        }
    }

    /// Runs at most `budget` further steps.
    pub fn run(&mut self, budget: u64) -> Result<Option<Retraction>> {
        let limit = self.steps.saturating_add(budget);
        let nsym = self.s.len();
        while self.steps < limit {
            let index = self.index;
            let table = self.table;
            let len = self.cost - index;
            let count = self.candidates(index)?.len();
            if table >= count {
                self.advance();
                // empty levels still cost a step so the budget bounds the loop
                self.steps += 1;
                continue;
            }
            if self.tuples.is_none() {
                let rank = self.by_index[index].as_ref().expect("filled")[table].sub.presentation.rank();
                self.tuples = Some(TupleIter::new(nsym, rank, len));
            }
            let Some(y) = self.tuples.as_mut().and_then(Iterator::next) else {
                self.advance();
                continue;
            };
            self.steps += 1;
            let cand = &self.by_index[index].as_ref().expect("filled")[table];
            if check_candidate(cand, &self.s, &y, self.wp.get())? {
                return Ok(Some(Retraction {
                    table: cand.table.clone(),
                    k_presentation: cand.sub.presentation.clone(),
                    k_embedding: cand.sub.embedding.clone(),
                    images: y,
                    s_in_k: cand.s_in_k.clone(),
                }));
            }
        }
        Ok(None)
    }
}

fn check_candidate(c: &Candidate, s: &[Word], y: &[Word], wp: &dyn WordOracle) -> Result<bool> {
    let y_in_g: Vec<Word> = y.iter().map(|w| w.substitute(s)).collect();
    for (si, expr) in s.iter().zip(&c.s_in_k) {
        if !wp.equal(&expr.substitute(&y_in_g), si)? {
            return Ok(false);
        }
    }
    for r in c.sub.presentation.relators() {
        if !wp.is_trivial(&r.substitute(&y_in_g))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Lazy stream of `parts`-tuples of reduced words over `nsym` symbols with
/// total length `total`, ordered by `(|w_1|, w_1, |w_2|, w_2, ...)`.
pub struct TupleIter {
    nsym: usize,
    total: usize,
    lens: Vec<usize>,
    idx: Vec<u128>,
    done: bool,
}

impl TupleIter {
    pub fn new(nsym: usize, parts: usize, total: usize) -> Self {
        let mut lens = vec![0; parts];
        if let Some(last) = lens.last_mut() {
            *last = total;
        }
        let done = total > 0 && (parts == 0 || nsym == 0);
        TupleIter { nsym, total, lens, idx: vec![0; parts], done }
    }

    /// Moves to the next state; false when exhausted.
    fn advance(&mut self) -> bool {
        let Some(last) = self.lens.len().checked_sub(1) else {
            return false;
        };
        // the last part's word varies fastest, its length is what remains
        self.idx[last] += 1;
        if self.idx[last] < count_words(self.nsym, self.lens[last]) {
            return true;
        }
        self.idx[last] = 0;
        for p in (0..last).rev() {
            self.idx[p] += 1;
            if self.idx[p] < count_words(self.nsym, self.lens[p]) {
                return true;
            }
            self.idx[p] = 0;
            let used: usize = self.lens[..p].iter().sum();
            if used + self.lens[p] < self.total {
                self.lens[p] += 1;
                self.lens[last] = self.total - used - self.lens[p];
                return true;
            }
            self.lens[p] = 0;
            self.lens[last] = self.total - used;
        }
        false
    }
}

impl Iterator for TupleIter {
    type Item = Vec<Word>;

    fn next(&mut self) -> Option<Vec<Word>> {
        if self.done {
            return None;
        }
        let out = self.lens.iter().zip(&self.idx).map(|(&l, &i)| nth_word(self.nsym, l, i)).collect();
        if !self.advance() {
            self.done = true;
        }
        Some(out)
    }
}

/// Tuples of `parts` words over `nsym` symbols with total length `total`,
/// by composition then shortlex.
pub fn tuples_of_total_length(nsym: usize, parts: usize, total: usize) -> Vec<Vec<Word>> {
    TupleIter::new(nsym, parts, total).collect()
}

/// Outcome of a budgeted search.
#[derive(Clone, Debug)]
pub enum Found<T> {
    Yes { value: T, steps: u64 },
    Exhausted { steps: u64 },
}

pub fn find_retraction(g: &Presentation, s: &[Word], wp: &dyn WordOracle, budget: u64) -> Result<Found<Retraction>> {
    let mut search = RetractionSearch::new(g, s, wp)?;
    Ok(match search.run(budget)? {
        Some(value) => Found::Yes { value, steps: search.steps() },
        None => Found::Exhausted { steps: search.steps() },
    })
}

/// Presentation of `⟨S⟩` with its generators expressed in `S±`.
#[derive(Clone, Debug)]
pub struct LrPresentation {
    pub presentation: Presentation,
    /// Generator `j` as a word in the symbols `S±`.
    pub generators_in_s: Vec<Word>,
    /// `s_i` as a word in the generators.
    pub s_in_generators: Vec<Word>,
    pub retraction: Retraction,
    pub moves: Vec<Move>,
    pub conformance: Option<bool>,
}

impl LrPresentation {
    /// Generators as words of the ambient group.
    pub fn generators_in_g(&self, s: &[Word]) -> Vec<Word> {
        self.generators_in_s.iter().map(|w| w.substitute(s)).collect()
    }
}

/// Turns a found retraction into a presentation of `⟨S⟩`.
pub fn present_from_retraction(
    r: Retraction,
    wp: &dyn WordOracle,
    options: RetractOptions,
) -> Result<LrPresentation> {
    let k_oracle = SubgroupOracle::new(wp, r.k_embedding.clone());
    let rho = r.images_in_k();
    let rp = retract_presentation(&r.k_presentation, &rho, &k_oracle, options)?;
    // a kept generator X_j stands for ρ(X_j) = Y_j
    let names = r.k_presentation.generators();
    let generators_in_s = rp
        .presentation
        .generators()
        .iter()
        .map(|n| r.images[names.iter().position(|m| m == n).expect("kept generator")].clone())
        .collect();
    let s_in_generators = r.s_in_k.iter().map(|w| w.substitute(&rp.substitution)).collect();
    let renamed: Vec<String> = (1..=rp.presentation.rank()).map(|i| format!("s{i}")).collect();
    Ok(LrPresentation {
        presentation: rp.presentation.renamed(renamed)?,
        generators_in_s,
        s_in_generators,
        retraction: r,
        moves: rp.moves,
        conformance: rp.conformance,
    })
}

pub fn subgroup_presentation_lr(
    g: &Presentation,
    s: &[Word],
    wp: &dyn WordOracle,
    budget: u64,
    options: RetractOptions,
) -> Result<Found<LrPresentation>> {
    match find_retraction(g, s, wp, budget)? {
        Found::Yes { value, steps } => {
            Ok(Found::Yes { value: present_from_retraction(value, wp, options)?, steps })
        }
        Found::Exhausted { steps } => Ok(Found::Exhausted { steps }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{DirectProductOracle, FreeOracle};
    use crate::word::words_up_to;

    #[test]
    fn tuples_match_brute_force() {
        for (nsym, parts, total) in [(1, 2, 3), (2, 3, 3), (2, 1, 2), (0, 2, 0), (0, 2, 1), (1, 0, 0), (1, 0, 1)] {
            let words = words_up_to(nsym, total);
            let mut expected: Vec<Vec<Word>> = vec![Vec::new()];
            for _ in 0..parts {
                expected = expected
                    .into_iter()
                    .flat_map(|t| words.iter().map(move |w| [t.clone(), vec![w.clone()]].concat()))
                    .collect();
            }
            expected.retain(|t| t.iter().map(Word::len).sum::<usize>() == total);
            let key = |t: &Vec<Word>| t.iter().flat_map(|w| [w.len()].into_iter().chain(w.letters().iter().map(|l| l.index()))).collect::<Vec<_>>();
            expected.sort_by_key(key);
            assert_eq!(tuples_of_total_length(nsym, parts, total), expected, "{nsym} {parts} {total}");
        }
    }
    use crate::stallings::{fold_rank, Index};

    fn p(s: &str) -> Presentation {
        s.parse().unwrap()
    }

    #[test]
    fn retract_presentation_examples() {
        let f2 = p("< x, y | >");
        let free = FreeOracle::new(2);
        let rp = retract_presentation(&f2, &[Word::gen(0), Word::gen(0)], &free, Default::default()).unwrap();
        assert_eq!(rp.presentation.normalize(), p("< x | >").normalize());
        assert_eq!(rp.embedding, vec![Word::gen(0)]);
        let z2 = p("< a, b | [a,b] >");
        let o = DirectProductOracle::from_presentation(&z2).unwrap();
        let rp = retract_presentation(&z2, &[Word::gen(0), Word::gen(1)], &o, Default::default()).unwrap();
        assert_eq!(rp.presentation.normalize(), z2.normalize());
        let at = p("< a, t | [a,t] >");
        let o = DirectProductOracle::from_presentation(&at).unwrap();
        let rp = retract_presentation(&at, &[Word::gen(0), Word::empty()], &o, Default::default()).unwrap();
        assert_eq!((rp.presentation.rank(), rp.presentation.relators().len()), (1, 0));
        let bad = retract_presentation(&f2, &[Word::gen(1), Word::gen(0)], &free, Default::default());
        assert!(matches!(bad, Err(Error::NotARetraction(_))));
    }

    #[test]
    fn find_retraction_examples() {
        let f2 = p("< x, y | >");
        let free = FreeOracle::new(2);
        let Found::Yes { value, .. } = find_retraction(&f2, &[Word::gen(0)], &free, 1000).unwrap() else { panic!() };
        assert_eq!(value.table.index(), 1);
        assert_eq!(value.images_in_k(), vec![Word::gen(0), Word::empty()]);

        let s = vec![Word::gen(0).pow(2), Word::gen(1)];
        let Found::Yes { value, .. } = find_retraction(&f2, &s, &free, 100_000).unwrap() else { panic!() };
        assert_eq!(value.table.index(), 2);
        assert!(value.verify(&f2, &s, &free).unwrap());

        let f1 = p("< x | >");
        let Found::Yes { value, .. } = find_retraction(&f1, &[], &FreeOracle::new(1), 10).unwrap() else { panic!() };
        assert_eq!((value.table.index(), value.images_in_k()), (1, vec![Word::empty()]));
    }

    #[test]
    fn lr_presentation_examples() {
        let f2 = p("< x, y | >");
        let free = FreeOracle::new(2);
        let s = vec![Word::gen(0).pow(2), Word::gen(1)];
        let Found::Yes { value, .. } = subgroup_presentation_lr(&f2, &s, &free, 100_000, Default::default()).unwrap() else {
            panic!()
        };
        let (rank, index) = fold_rank(2, &s).rank_index();
        assert_eq!((rank, index), (2, Index::Infinite));
        assert_eq!((value.presentation.rank(), value.presentation.relators().len()), (rank, 0));
        let gens = value.generators_in_g(&s);
        for (si, expr) in s.iter().zip(&value.s_in_generators) {
            assert_eq!(&expr.substitute(&gens), si);
        }

        let at = p("< a, t | [a,t] >");
        let o = DirectProductOracle::from_presentation(&at).unwrap();
        let s = vec![Word::gen(0).pow(2), Word::gen(1)];
        let Found::Yes { value, .. } = subgroup_presentation_lr(&at, &s, &o, 100_000, Default::default()).unwrap() else {
            panic!()
        };
        let ab = value.presentation.abelianization();
        assert_eq!((ab.free_rank, ab.torsion.len(), value.presentation.rank()), (2, 0, 2));
    }
}
