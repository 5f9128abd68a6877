//! Coset tables: Todd–Coxeter enumeration (HLT with coincidence handling),
//! low-index subgroup search and Reidemeister–Schreier presentations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::presentation::Presentation;
use crate::tietze::{simplify, Move};
use crate::word::{Letter, Word};

const NONE: usize = usize::MAX;

/// A complete coset table. Columns are indexed by [`Letter::index`], so
/// column `2g` is generator `g` and `2g + 1` its inverse. Coset 0 is the
/// base coset.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CosetTable {
    rank: usize,
    rows: Vec<Vec<usize>>,
    subgens: Vec<Word>,
}

impl CosetTable {
    /// Builds a table from rows of positive-generator images only; inverse
    /// columns are filled in. Fails if a column is not a permutation.
    pub fn from_permutations(rank: usize, images: Vec<Vec<usize>>) -> Result<Self> {
        let n = images.len();
        let mut rows = vec![vec![NONE; 2 * rank]; n];
        for (c, row) in images.iter().enumerate() {
            if row.len() != rank {
                return Err(Error::Invalid("row length differs from rank".into()));
            }
            for (g, &d) in row.iter().enumerate() {
                if d >= n || rows[d][2 * g + 1] != NONE {
                    return Err(Error::Invalid(format!("column {g} is not a permutation")));
                }
                rows[c][2 * g] = d;
                rows[d][2 * g + 1] = c;
            }
        }
        Ok(CosetTable { rank, rows, subgens: Vec::new() })
    }

    pub fn index(&self) -> usize {
        self.rows.len()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn subgroup_generators(&self) -> &[Word] {
        &self.subgens
    }

    pub fn image(&self, coset: usize, l: Letter) -> usize {
        self.rows[coset][l.index()]
    }

    pub fn act(&self, coset: usize, w: &Word) -> usize {
        w.letters().iter().fold(coset, |c, &l| self.image(c, l))
    }

    /// Whether `w` lies in the subgroup, i.e. fixes the base coset.
    pub fn stabilizes(&self, w: &Word) -> bool {
        self.act(0, w) == 0
    }

    /// Positive-generator images, one row per coset.
    pub fn permutations(&self) -> Vec<Vec<usize>> {
        self.rows.iter().map(|r| (0..self.rank).map(|g| r[2 * g]).collect()).collect()
    }

    /// Columns are permutations and every relator fixes every coset.
    pub fn is_valid_for(&self, p: &Presentation) -> bool {
        let n = self.index();
        p.rank() == self.rank
            && self.rows.iter().enumerate().all(|(c, row)| {
                row.len() == 2 * self.rank
                    && row.iter().enumerate().all(|(x, &d)| d < n && self.rows[d][x ^ 1] == c)
            })
            && (0..n).all(|c| p.relators().iter().all(|r| self.act(c, r) == c))
    }

    /// Renumbers cosets in first-appearance order of a scan by coset then
    /// column, starting from the base coset.
    fn standardized(rows: &[Vec<usize>], rank: usize, subgens: Vec<Word>) -> Self {
        let n = rows.len();
        let mut order = vec![0];
        let mut pos = vec![NONE; n];
        pos[0] = 0;
        let mut i = 0;
        while i < order.len() {
            let c = order[i];
            for &d in &rows[c] {
                if pos[d] == NONE {
                    pos[d] = order.len();
                    order.push(d);
                }
            }
            i += 1;
        }
        let new_rows = order.iter().map(|&c| rows[c].iter().map(|&d| pos[d]).collect()).collect();
        CosetTable { rank, rows: new_rows, subgens }
    }
}

/// Outcome of a bounded enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Enumeration {
    Complete(CosetTable),
    /// The coset bound was reached; the index may still be finite.
    Overflow,
}

impl Enumeration {
    pub fn table(self) -> Option<CosetTable> {
        match self {
            Enumeration::Complete(t) => Some(t),
            Enumeration::Overflow => None,
        }
    }
}

struct Overflowed;

struct Enumerator {
    ncols: usize,
    table: Vec<Vec<usize>>,
    parent: Vec<usize>,
    live: usize,
    max_live: usize,
    max_total: usize,
}

impl Enumerator {
    fn new(rank: usize, max_live: usize) -> Self {
        Enumerator {
            ncols: 2 * rank,
            table: vec![vec![NONE; 2 * rank]],
            parent: vec![0],
            live: 1,
            max_live,
            max_total: max_live.saturating_mul(64).max(4096),
        }
    }

    fn is_live(&self, c: usize) -> bool {
        self.parent[c] == c
    }

    fn rep(&mut self, c: usize) -> usize {
        let mut r = c;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut c = c;
        while self.parent[c] != r {
            let next = self.parent[c];
            self.parent[c] = r;
            c = next;
        }
        r
    }

    fn define(&mut self, c: usize, x: usize) -> std::result::Result<(), Overflowed> {
        if self.live >= self.max_live || self.table.len() >= self.max_total {
            return Err(Overflowed);
        }
        let n = self.table.len();
        self.table.push(vec![NONE; self.ncols]);
        self.parent.push(n);
        self.live += 1;
        self.table[c][x] = n;
        self.table[n][x ^ 1] = c;
        Ok(())
    }

    fn merge(&mut self, a: usize, b: usize, queue: &mut Vec<usize>) {
        let (a, b) = (self.rep(a), self.rep(b));
        if a == b {
            return;
        }
        let (keep, drop) = if a < b { (a, b) } else { (b, a) };
        self.parent[drop] = keep;
        self.live -= 1;
        queue.push(drop);
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        let mut queue = Vec::new();
        self.merge(a, b, &mut queue);
        let mut i = 0;
        while i < queue.len() {
            let e = queue[i];
            i += 1;
            for x in 0..self.ncols {
                let f = self.table[e][x];
                if f == NONE {
                    continue;
                }
                self.table[f][x ^ 1] = NONE;
                let e1 = self.rep(e);
                let f1 = self.rep(f);
                if self.table[e1][x] != NONE {
                    let t = self.table[e1][x];
                    self.merge(f1, t, &mut queue);
                } else if self.table[f1][x ^ 1] != NONE {
                    let t = self.table[f1][x ^ 1];
                    self.merge(e1, t, &mut queue);
                } else {
                    self.table[e1][x] = f1;
                    self.table[f1][x ^ 1] = e1;
                }
            }
        }
    }

    fn scan_and_fill(&mut self, c: usize, w: &[usize]) -> std::result::Result<(), Overflowed> {
        if w.is_empty() {
            return Ok(());
        }
        let mut f = c;
        let mut b = c;
        let mut i = 0usize;
        let mut j = w.len() as isize - 1;
        loop {
            while (i as isize) <= j && self.table[f][w[i]] != NONE {
                f = self.table[f][w[i]];
                i += 1;
            }
            if (i as isize) > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j >= i as isize && self.table[b][w[j as usize] ^ 1] != NONE {
                b = self.table[b][w[j as usize] ^ 1];
                j -= 1;
            }
            if j < i as isize {
                self.coincidence(f, b);
                return Ok(());
            }
            if j == i as isize {
                self.table[f][w[i]] = b;
                self.table[b][w[i] ^ 1] = f;
                return Ok(());
            }
            self.define(f, w[i])?;
        }
    }

    fn run(&mut self, relators: &[Vec<usize>], subgens: &[Vec<usize>]) -> std::result::Result<(), Overflowed> {
        for s in subgens {
            let base = self.rep(0);
            self.scan_and_fill(base, s)?;
        }
        let mut c = 0;
        while c < self.table.len() {
            if self.is_live(c) {
                for r in relators {
                    if !self.is_live(c) {
                        break;
                    }
                    self.scan_and_fill(c, r)?;
                }
                if self.is_live(c) {
                    for x in 0..self.ncols {
                        if self.table[c][x] == NONE {
                            self.define(c, x)?;
                        }
                    }
                }
            }
            c += 1;
        }
        Ok(())
    }

    fn compact(&mut self) -> Vec<Vec<usize>> {
        let live: Vec<usize> = (0..self.table.len()).filter(|&c| self.is_live(c)).collect();
        let mut pos = vec![NONE; self.table.len()];
        for (i, &c) in live.iter().enumerate() {
            pos[c] = i;
        }
        live.iter().map(|&c| self.table[c].iter().map(|&d| pos[d]).collect()).collect()
    }
}

fn columns(w: &Word) -> Vec<usize> {
    w.letters().iter().map(|l| l.index()).collect()
}

/// Enumerates the cosets of `⟨subgens⟩` with at most `max_cosets` live
/// cosets at any time.
pub fn todd_coxeter(p: &Presentation, subgens: &[Word], max_cosets: usize) -> Result<Enumeration> {
    if max_cosets == 0 {
        return Err(Error::Invalid("max_cosets must be at least 1".into()));
    }
    if subgens.iter().any(|w| !p.contains_word(w)) {
        return Err(Error::AlphabetMismatch);
    }
    let rels: Vec<Vec<usize>> = p.relators().iter().map(columns).collect();
    let subs: Vec<Vec<usize>> = subgens.iter().map(columns).collect();
    let mut e = Enumerator::new(p.rank(), max_cosets);
    loop {
        if e.run(&rels, &subs).is_err() {
            return Ok(Enumeration::Overflow);
        }
        let rows = e.compact();
        let t = CosetTable::standardized(&rows, p.rank(), subgens.to_vec());
        if t.is_valid_for(p) && subgens.iter().all(|s| t.stabilizes(s)) {
            return Ok(Enumeration::Complete(t));
        }
    }
}

/// Order of a finite group via enumeration over the trivial subgroup.
pub fn order(p: &Presentation, max_cosets: usize) -> Result<Option<usize>> {
    Ok(todd_coxeter(p, &[], max_cosets)?.table().map(|t| t.index()))
}

/// Partial table used by the low-index search.
#[derive(Clone)]
struct Partial {
    rows: Vec<Vec<usize>>,
}

impl Partial {
    fn first_gap(&self) -> Option<(usize, usize)> {
        self.rows
            .iter()
            .enumerate()
            .find_map(|(c, r)| r.iter().position(|&d| d == NONE).map(|x| (c, x)))
    }

    fn assign(&mut self, c: usize, x: usize, d: usize) -> bool {
        let cur = self.rows[c][x];
        let back = self.rows[d][x ^ 1];
        if (cur != NONE && cur != d) || (back != NONE && back != c) {
            return false;
        }
        self.rows[c][x] = d;
        self.rows[d][x ^ 1] = c;
        true
    }

    /// Scans every relator from every coset, deducing single gaps. Returns
    /// false on a contradiction.
    fn deduce(&mut self, relators: &[Vec<usize>]) -> bool {
        loop {
            let mut changed = false;
            for c in 0..self.rows.len() {
                for r in relators {
                    let mut f = c;
                    let mut i = 0usize;
                    while i < r.len() && self.rows[f][r[i]] != NONE {
                        f = self.rows[f][r[i]];
                        i += 1;
                    }
                    if i == r.len() {
                        if f != c {
                            return false;
                        }
                        continue;
                    }
                    let mut b = c;
                    let mut j = r.len() - 1;
                    while j > i && self.rows[b][r[j] ^ 1] != NONE {
                        b = self.rows[b][r[j] ^ 1];
                        j -= 1;
                    }
                    if j == i {
                        if !self.assign(f, r[i], b) {
                            return false;
                        }
                        changed = true;
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }
}

/// Depth-first stream of all subgroups of index at most `n`, one complete
/// table each. A new coset is only ever introduced at the first undefined
/// entry, so every table is produced in standard numbering exactly once.
pub struct LowIndex {
    rank: usize,
    n: usize,
    relators: Vec<Vec<usize>>,
    stack: Vec<Partial>,
    nodes: u64,
}

impl LowIndex {
    /// Search nodes visited so far.
    pub fn nodes(&self) -> u64 {
        self.nodes
    }
}

pub fn low_index(p: &Presentation, n: usize) -> LowIndex {
    let rank = p.rank();
    let relators: Vec<Vec<usize>> = p.relators().iter().map(columns).collect();
    let mut start = Partial { rows: vec![vec![NONE; 2 * rank]] };
    let stack = if n >= 1 && start.deduce(&relators) { vec![start] } else { Vec::new() };
    LowIndex { rank, n, relators, stack, nodes: 0 }
}

impl Iterator for LowIndex {
    type Item = CosetTable;

    fn next(&mut self) -> Option<CosetTable> {
        while let Some(state) = self.stack.pop() {
            self.nodes += 1;
            let Some((c, x)) = state.first_gap() else {
                return Some(CosetTable { rank: self.rank, rows: state.rows, subgens: Vec::new() });
            };
            let count = state.rows.len();
            let mut children = Vec::new();
            for d in 0..count {
                if state.rows[d][x ^ 1] != NONE {
                    continue;
                }
                let mut s = state.clone();
                if s.assign(c, x, d) && s.deduce(&self.relators) {
                    children.push(s);
                }
            }
            if count < self.n {
                let mut s = state.clone();
                s.rows.push(vec![NONE; 2 * self.rank]);
                if s.assign(c, x, count) && s.deduce(&self.relators) {
                    children.push(s);
                }
            }
            self.stack.extend(children.into_iter().rev());
        }
        None
    }
}

/// Breadth-first Schreier transversal and the resulting generators.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Schreier {
    /// Coset representatives.
    pub transversal: Vec<Word>,
    /// `(coset, generator)` pairs giving Schreier generators, in order.
    pub edges: Vec<(usize, usize)>,
    /// `rep(c) x rep(cx)^-1` for each edge.
    pub words: Vec<Word>,
    lookup: Vec<Vec<Option<usize>>>,
}

impl Schreier {
    pub fn new(t: &CosetTable) -> Self {
        let n = t.index();
        let mut transversal = vec![Word::empty(); n];
        let mut tree = vec![vec![false; 2 * t.rank]; n];
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut queue = std::collections::VecDeque::from([0]);
        while let Some(c) = queue.pop_front() {
            for x in 0..2 * t.rank {
                let d = t.rows[c][x];
                if !seen[d] {
                    seen[d] = true;
                    transversal[d] = transversal[c].mul(&Word::letter(Letter::from_index(x)));
                    tree[c][x] = true;
                    tree[d][x ^ 1] = true;
                    queue.push_back(d);
                }
            }
        }
        let mut edges = Vec::new();
        let mut words = Vec::new();
        let mut lookup = vec![vec![None; t.rank]; n];
        for (c, row) in lookup.iter_mut().enumerate() {
            for (g, slot) in row.iter_mut().enumerate() {
                if tree[c][2 * g] {
                    continue;
                }
                let d = t.rows[c][2 * g];
                *slot = Some(edges.len());
                edges.push((c, g));
                words.push(transversal[c].mul(&Word::gen(g)).mul(&transversal[d].inverse()));
            }
        }
        Schreier { transversal, edges, words, lookup }
    }

    /// Rewrites `w` read from coset `start` as a word in the Schreier
    /// generators, returning it with the end coset.
    pub fn rewrite_from(&self, t: &CosetTable, start: usize, w: &Word) -> (Word, usize) {
        let mut out = Vec::new();
        let mut c = start;
        for &l in w.letters() {
            let g = l.generator();
            if l.is_inverse() {
                let d = t.image(c, l);
                if let Some(s) = self.lookup[d][g] {
                    out.push(Letter::neg(s));
                }
                c = d;
            } else {
                if let Some(s) = self.lookup[c][g] {
                    out.push(Letter::pos(s));
                }
                c = t.image(c, l);
            }
        }
        (Word::reduce(out), c)
    }
}

/// `w` over the Schreier generators of `t`, or `None` if `w` is not in the
/// subgroup.
pub fn rewrite_in_subgroup(t: &CosetTable, w: &Word) -> Option<Word> {
    let s = Schreier::new(t);
    let (r, end) = s.rewrite_from(t, 0, w);
    (end == 0).then_some(r)
}

/// A Reidemeister–Schreier presentation after simplification.
#[derive(Clone, Debug)]
pub struct SubgroupPresentation {
    pub presentation: Presentation,
    /// Each generator of `presentation` as a word over the ambient group.
    pub embedding: Vec<Word>,
    pub schreier: Schreier,
    /// Each Schreier generator as a word in the generators of `presentation`.
    pub substitution: Vec<Word>,
    pub moves: Vec<Move>,
}

impl SubgroupPresentation {
    /// Expresses an ambient word in the subgroup generators, or `None` when
    /// it is not in the subgroup.
    pub fn rewrite(&self, t: &CosetTable, w: &Word) -> Option<Word> {
        let (r, end) = self.schreier.rewrite_from(t, 0, w);
        (end == 0).then(|| r.substitute(&self.substitution))
    }
}

pub fn rs_presentation(p: &Presentation, t: &CosetTable) -> Result<SubgroupPresentation> {
    if !t.is_valid_for(p) {
        return Err(Error::IncompleteTable);
    }
    let schreier = Schreier::new(t);
    let mut relators = Vec::new();
    for c in 0..t.index() {
        for r in p.relators() {
            relators.push(schreier.rewrite_from(t, c, r).0);
        }
    }
    let names: Vec<String> = (1..=schreier.words.len()).map(|i| format!("s{i}")).collect();
    let raw = Presentation::new(names.clone(), relators)?;
    let simplified = simplify(&raw);
    let embedding = simplified
        .presentation
        .generators()
        .iter()
        .map(|n| schreier.words[names.iter().position(|m| m == n).expect("kept generator")].clone())
        .collect();
    Ok(SubgroupPresentation {
        presentation: simplified.presentation,
        embedding,
        schreier,
        substitution: simplified.substitution,
        moves: simplified.moves,
    })
}
