//! Tietze transformations with explicit certificates, greedy simplification
//! and a fair stream of presentations reachable by moves.

use std::cmp::Reverse;
use std::collections::hash_map::DefaultHasher;
use std::collections::{BinaryHeap, HashSet};
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::presentation::Presentation;
use crate::syntax;
use crate::word::{words_of_length, Letter, Word};

/// One factor `c r^±1 c^-1` of a derivation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Factor {
    pub conjugator: Word,
    pub relator: usize,
    pub inverse: bool,
}

/// A product of conjugated relators, read left to right.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Derivation(pub Vec<Factor>);

impl Derivation {
    pub fn single(relator: usize, inverse: bool) -> Self {
        Derivation(vec![Factor { conjugator: Word::empty(), relator, inverse }])
    }

    pub fn evaluate(&self, relators: &[Word]) -> Result<Word> {
        let mut w = Word::empty();
        for f in &self.0 {
            let r = relators
                .get(f.relator)
                .ok_or_else(|| Error::IneligibleMove(format!("derivation uses missing relator {}", f.relator)))?;
            let r = if f.inverse { r.inverse() } else { r.clone() };
            w = w.mul(&r.conjugate_by(&f.conjugator));
        }
        Ok(w)
    }

    /// `Σ (|c_i| + 1) - 1`, the enumeration size.
    pub fn size(&self) -> usize {
        self.0.iter().map(|f| f.conjugator.len() + 1).sum::<usize>().saturating_sub(1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Move {
    /// New generator `c` with defining relator `c^-1 w`.
    AddGenerator { word: Word },
    /// Delete `generator`, which occurs exactly once in `relator`.
    RemoveGenerator { generator: usize, relator: usize },
    /// Append the product given by the derivation.
    AddRelator { derivation: Derivation },
    /// Delete relator `index`, which the derivation (over the other
    /// relators) reproduces up to cyclic permutation.
    RemoveRelator { index: usize, derivation: Derivation },
}

fn fresh_name(taken: &[String]) -> String {
    let mut i = 0;
    loop {
        let name = syntax::default_names(i + 1).pop().unwrap_or_default();
        if !taken.contains(&name) {
            return name;
        }
        i += 1;
    }
}

/// Expresses `generator` through the unique relator occurrence:
/// `u x v = 1` gives `x = u^-1 v^-1`, `u x^-1 v = 1` gives `x = v u`.
fn solve_for(relator: &Word, generator: usize) -> Option<Word> {
    let letters = relator.letters();
    let hits: Vec<usize> = (0..letters.len()).filter(|&i| letters[i].generator() == generator).collect();
    if hits.len() != 1 {
        return None;
    }
    let i = hits[0];
    let u = Word::reduce(letters[..i].iter().copied());
    let v = Word::reduce(letters[i + 1..].iter().copied());
    Some(if letters[i].is_inverse() { v.mul(&u) } else { u.inverse().mul(&v.inverse()) })
}

/// Substitution removing generator `x`: `x ↦ value`, higher generators
/// shift down by one.
fn elimination_images(rank: usize, x: usize, value: &Word) -> Vec<Word> {
    let shift = |w: &Word| Word::reduce(w.letters().iter().map(|l| {
        let g = l.generator();
        Letter::new(if g > x { g - 1 } else { g }, l.is_inverse())
    }));
    let value = shift(value);
    (0..rank)
        .map(|g| match g.cmp(&x) {
            std::cmp::Ordering::Less => Word::gen(g),
            std::cmp::Ordering::Equal => value.clone(),
            std::cmp::Ordering::Greater => Word::gen(g - 1),
        })
        .collect()
}

/// Applies one move, checking eligibility first.
pub fn tietze_step(p: &Presentation, mv: &Move) -> Result<Presentation> {
    Ok(apply(p, mv)?.0)
}

/// Applies a move and also returns how the old generators are expressed in
/// the new ones.
pub fn apply(p: &Presentation, mv: &Move) -> Result<(Presentation, Vec<Word>)> {
    let rank = p.rank();
    let identity: Vec<Word> = (0..rank).map(Word::gen).collect();
    match mv {
        Move::AddGenerator { word } => {
            if !p.contains_word(word) {
                return Err(Error::AlphabetMismatch);
            }
            let mut names = p.generators().to_vec();
            names.push(fresh_name(&names));
            let mut rels = p.relators().to_vec();
            rels.push(Word::gen(rank).inverse().mul(word));
            Ok((Presentation::new(names, rels)?, identity))
        }
        Move::RemoveGenerator { generator, relator } => {
            let r = p
                .relators()
                .get(*relator)
                .ok_or_else(|| Error::IneligibleMove(format!("no relator {relator}")))?;
            if *generator >= rank {
                return Err(Error::IneligibleMove(format!("no generator {generator}")));
            }
            let value = solve_for(r, *generator)
                .ok_or_else(|| Error::IneligibleMove("generator must occur exactly once in the relator".into()))?;
            let images = elimination_images(rank, *generator, &value);
            let mut names = p.generators().to_vec();
            names.remove(*generator);
            let rels = p
                .relators()
                .iter()
                .enumerate()
                .filter(|(i, _)| i != relator)
                .map(|(_, w)| w.substitute(&images))
                .collect();
            Ok((Presentation::new(names, rels)?, images))
        }
        Move::AddRelator { derivation } => {
            let w = derivation.evaluate(p.relators())?;
            let mut rels = p.relators().to_vec();
            rels.push(w);
            Ok((Presentation::new(p.generators().to_vec(), rels)?, identity))
        }
        Move::RemoveRelator { index, derivation } => {
            let r = p.relators().get(*index).ok_or_else(|| Error::IneligibleMove(format!("no relator {index}")))?;
            if derivation.0.iter().any(|f| f.relator == *index) {
                return Err(Error::IneligibleMove("derivation uses the relator being removed".into()));
            }
            let w = derivation.evaluate(p.relators())?;
            if w.cyclic_reduce().0.cyclic_min() != r.cyclic_min() {
                return Err(Error::IneligibleMove("derivation does not produce the relator".into()));
            }
            let mut rels = p.relators().to_vec();
            rels.remove(*index);
            Ok((Presentation::new(p.generators().to_vec(), rels)?, identity))
        }
    }
}

/// Result of [`simplify`]: the final presentation, the certificate moves in
/// order, and each original generator as a word in the final generators.
#[derive(Clone, Debug)]
pub struct Simplified {
    pub presentation: Presentation,
    pub moves: Vec<Move>,
    pub substitution: Vec<Word>,
}

/// Greedy simplification: drop relators that duplicate another up to
/// rotation and inversion, then eliminate generators occurring once in some
/// relator whenever that does not increase the total relator length.
pub fn simplify(p: &Presentation) -> Simplified {
    let mut cur = p.clone();
    let mut moves = Vec::new();
    let mut subst: Vec<Word> = (0..p.rank()).map(Word::gen).collect();
    loop {
        if let Some(mv) = duplicate_relator(&cur) {
            cur = tietze_step(&cur, &mv).expect("duplicate removal is eligible");
            moves.push(mv);
            continue;
        }
        if let Some((mv, next, images)) = best_elimination(&cur) {
            subst = subst.iter().map(|w| w.substitute(&images)).collect();
            cur = next;
            moves.push(mv);
            continue;
        }
        break;
    }
    Simplified { presentation: cur, moves, substitution: subst }
}

fn duplicate_relator(p: &Presentation) -> Option<Move> {
    let rels = p.relators();
    let keys: Vec<Word> = rels.iter().map(Word::cyclic_min).collect();
    for j in 0..rels.len() {
        for i in 0..j {
            if keys[i] == keys[j] {
                // r_j is a rotation of r_i or of its inverse
                let inverse = !(0..rels[i].len()).any(|k| rels[i].rotate(k) == rels[j]);
                let base = if inverse { rels[i].inverse() } else { rels[i].clone() };
                let k = (0..base.len()).find(|&k| base.rotate(k) == rels[j]).unwrap_or(0);
                let conj = Word::reduce(base.letters()[..k].iter().copied()).inverse();
                let derivation = Derivation(vec![Factor { conjugator: conj, relator: i, inverse }]);
                return Some(Move::RemoveRelator { index: j, derivation });
            }
        }
    }
    None
}

fn best_elimination(p: &Presentation) -> Option<(Move, Presentation, Vec<Word>)> {
    let total = p.total_relator_length();
    let mut best: Option<(usize, usize, Move, Presentation, Vec<Word>)> = None;
    for (ri, r) in p.relators().iter().enumerate() {
        for g in 0..p.rank() {
            if solve_for(r, g).is_none() {
                continue;
            }
            let mv = Move::RemoveGenerator { generator: g, relator: ri };
            let Ok((next, images)) = apply(p, &mv) else { continue };
            let len = next.total_relator_length();
            if len > total {
                continue;
            }
            let key = (r.len(), len);
            if best.as_ref().map_or(true, |b| key < (b.0, b.1)) {
                best = Some((key.0, key.1, mv, next, images));
            }
        }
    }
    best.map(|(_, _, m, n, i)| (m, n, i))
}

/// All derivations of the given size over the allowed relator indices.
pub fn derivations_of_size(rank: usize, allowed: &[usize], size: usize) -> Vec<Derivation> {
    let mut out = Vec::new();
    if allowed.is_empty() {
        return out;
    }
    for k in 1..=size + 1 {
        for parts in compositions(size + 1 - k, k) {
            let lists: Vec<Vec<Factor>> = parts
                .iter()
                .map(|&len| {
                    let mut fs = Vec::new();
                    for c in words_of_length(rank, len) {
                        for &r in allowed {
                            for inverse in [false, true] {
                                fs.push(Factor { conjugator: c.clone(), relator: r, inverse });
                            }
                        }
                    }
                    fs
                })
                .collect();
            cartesian(&lists, &mut Vec::new(), &mut out);
        }
    }
    out
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    (0..=total)
        .flat_map(|first| {
            compositions(total - first, parts - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

fn cartesian(lists: &[Vec<Factor>], acc: &mut Vec<Factor>, out: &mut Vec<Derivation>) {
    if acc.len() == lists.len() {
        out.push(Derivation(acc.clone()));
        return;
    }
    for f in &lists[acc.len()] {
        acc.push(f.clone());
        cartesian(lists, acc, out);
        acc.pop();
    }
}

/// All moves applicable to `p` whose parameters have the given size:
/// word length for added generators, derivation size for relator moves.
/// Generator removals have size 0.
pub fn moves_of_size(p: &Presentation, size: usize) -> Vec<Move> {
    let mut out = Vec::new();
    for word in words_of_length(p.rank(), size) {
        out.push(Move::AddGenerator { word });
    }
    if size == 0 {
        for (ri, r) in p.relators().iter().enumerate() {
            for g in 0..p.rank() {
                if solve_for(r, g).is_some() {
                    out.push(Move::RemoveGenerator { generator: g, relator: ri });
                }
            }
        }
    }
    let all: Vec<usize> = (0..p.relators().len()).collect();
    for derivation in derivations_of_size(p.rank(), &all, size) {
        out.push(Move::AddRelator { derivation });
    }
    for (index, r) in p.relators().iter().enumerate() {
        let others: Vec<usize> = all.iter().copied().filter(|&i| i != index).collect();
        let key = r.cyclic_min();
        for derivation in derivations_of_size(p.rank(), &others, size) {
            if let Ok(w) = derivation.evaluate(p.relators()) {
                if w.cyclic_reduce().0.cyclic_min() == key {
                    out.push(Move::RemoveRelator { index, derivation });
                }
            }
        }
    }
    out
}

/// A presentation reached from the start together with its move path.
#[derive(Clone, Debug)]
pub struct Reached {
    pub presentation: Presentation,
    pub path: Vec<Move>,
}

enum Task {
    /// Apply `mv` to emitted node `parent` (or take the start) and emit.
    Emit { parent: Option<(usize, Move)> },
    /// Expand emitted node `node` by moves of size `size`.
    Expand { size: usize, node: usize },
}

/// Ordered by `(cost, relator length, discovery order)` only.
struct Entry {
    key: (usize, usize, u64),
    task: Task,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key.cmp(&other.key)
    }
}

struct Node {
    pres: Presentation,
    parent: Option<(usize, Move)>,
}

/// Fair, resumable, deterministic enumeration of presentations reachable
/// from a start presentation by Tietze moves. Entries are ordered by
/// `(cost, total relator length, discovery order)` where the cost of a node
/// is the sum over its path of `1 + move size`. Expansion of a node is lazy:
/// moves of size `s` are generated only when the token for `s` is reached.
/// Emissions are deduplicated by [`Presentation::normalize`].
///
/// Pending candidates are held as `(parent, move)` and rebuilt when popped,
/// so memory grows with emissions rather than with candidates. Exact
/// repeats are dropped at discovery by a 64-bit hash.
pub struct PresentationStream {
    start: Presentation,
    heap: BinaryHeap<Reverse<Entry>>,
    seen: HashSet<Presentation>,
    /// emitted presentations, with the move that reached each
    nodes: Vec<Node>,
    /// hashes of every candidate pushed, to drop exact repeats early
    pushed: HashSet<u64>,
    seq: u64,
    steps: u64,
}

impl PresentationStream {
    pub fn new(start: &Presentation) -> Self {
        let mut s = PresentationStream {
            start: start.clone(),
            heap: BinaryHeap::new(),
            seen: HashSet::new(),
            nodes: Vec::new(),
            pushed: HashSet::new(),
            seq: 0,
            steps: 0,
        };
        s.push(0, start.total_relator_length(), Task::Emit { parent: None });
        s
    }

    /// Work done so far: heap pops plus candidate moves tried.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Distinct presentations emitted so far.
    pub fn emitted(&self) -> usize {
        self.nodes.len()
    }

    fn push(&mut self, cost: usize, len: usize, task: Task) {
        self.seq += 1;
        self.heap.push(Reverse(Entry { key: (cost, len, self.seq), task }));
    }

    fn path_to(&self, mut id: usize) -> Vec<Move> {
        let mut path = Vec::new();
        while let Some((parent, mv)) = &self.nodes[id].parent {
            path.push(mv.clone());
            id = *parent;
        }
        path.reverse();
        path
    }
}

fn move_size(mv: &Move) -> usize {
    match mv {
        Move::AddGenerator { word } => word.len(),
        Move::RemoveGenerator { .. } => 0,
        Move::AddRelator { derivation } | Move::RemoveRelator { derivation, .. } => derivation.size(),
    }
}

/// Cost of a path under the stream's order.
pub fn path_cost(path: &[Move]) -> usize {
    path.iter().map(|m| 1 + move_size(m)).sum()
}

/// Replays a move path, checking every step.
pub fn replay(start: &Presentation, path: &[Move]) -> Result<Presentation> {
    path.iter().try_fold(start.clone(), |p, mv| tietze_step(&p, mv))
}

impl Iterator for PresentationStream {
    type Item = Reached;

    fn next(&mut self) -> Option<Reached> {
        while let Some(Reverse(Entry { key: (cost, len, _), task })) = self.heap.pop() {
            self.steps += 1;
            match task {
                Task::Emit { parent } => {
                    let p = match &parent {
                        None => self.start.clone(),
                        Some((node, mv)) => match tietze_step(&self.nodes[*node].pres, mv) {
                            Ok(p) => p,
                            Err(_) => continue,
                        },
                    };
                    if !self.seen.insert(p.normalize()) {
                        continue;
                    }
                    let node = self.nodes.len();
                    self.nodes.push(Node { pres: p.clone(), parent });
                    // only first-seen normal forms are ever expanded
                    self.push(cost + 1, len, Task::Expand { size: 0, node });
                    return Some(Reached { presentation: p, path: self.path_to(node) });
                }
                Task::Expand { size, node } => {
                    self.push(cost + 1, len, Task::Expand { size: size + 1, node });
                    let p = self.nodes[node].pres.clone();
                    for mv in moves_of_size(&p, size) {
                        self.steps += 1;
                        if let Ok(next) = tietze_step(&p, &mv) {
                            let mut h = DefaultHasher::new();
                            next.hash(&mut h);
                            if self.pushed.insert(h.finish()) {
                                self.push(cost, next.total_relator_length(), Task::Emit { parent: Some((node, mv)) });
                            }
                        }
                    }
                }
            }
        }
        None
    }
}

pub fn enumerate_presentations(p: &Presentation) -> PresentationStream {
    PresentationStream::new(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Presentation {
        s.parse().unwrap()
    }

    #[test]
    fn add_and_remove_generator() {
        let f2 = p("< a, b | >");
        let ab = f2.parse_word("a b").unwrap();
        let q = tietze_step(&f2, &Move::AddGenerator { word: ab }).unwrap();
        assert_eq!(q, p("< a, b, c | c^-1*a*b >"));
        let back = tietze_step(&q, &Move::RemoveGenerator { generator: 2, relator: 0 }).unwrap();
        assert_eq!(back, f2);
    }

    #[test]
    fn removing_needed_relator_fails() {
        let z2 = p("< a | a^2 >");
        let mv = Move::RemoveRelator { index: 0, derivation: Derivation::default() };
        assert!(matches!(tietze_step(&z2, &mv), Err(Error::IneligibleMove(_))));
    }

    #[test]
    fn remove_redundant_relator() {
        let g = p("< a, b | [a,b], b^-1*a^-1*b*a >");
        let mv = Move::RemoveRelator { index: 1, derivation: Derivation::single(0, true) };
        assert_eq!(tietze_step(&g, &mv).unwrap(), p("< a, b | [a,b] >"));
    }

    #[test]
    fn simplify_eliminates_and_tracks() {
        let g = p("< a, b, c | c^-1 a b, [a, c] >");
        let s = simplify(&g);
        assert_eq!(s.presentation.rank(), 2);
        assert_eq!(s.presentation.relators().len(), 1);
        assert_eq!(replay(&g, &s.moves).unwrap(), s.presentation);
        let keys: Vec<Word> = s.presentation.relators().iter().map(Word::cyclic_min).collect();
        for r in g.relators() {
            let img = r.substitute(&s.substitution).cyclic_reduce().0;
            assert!(img.is_empty() || keys.contains(&img.cyclic_min()));
        }
        let dup = p("< a | a^3, a^-3 >");
        assert_eq!(simplify(&dup).presentation, p("< a | a^3 >"));
    }

    #[test]
    fn stream_examples() {
        let z = p("< a | >");
        let mut s = enumerate_presentations(&z);
        assert_eq!(s.next().unwrap().presentation, z);
        let target = p("< a, b | b >").normalize();
        assert!(enumerate_presentations(&z).take(50).any(|r| r.presentation.normalize() == target));

        let z2 = p("< a, b | [a,b] >");
        let target = p("< x, y, z | [x,y], z^-1 x y >").normalize();
        let hit = enumerate_presentations(&z2).take(400).find(|r| r.presentation.normalize() == target).unwrap();
        assert_eq!(replay(&z2, &hit.path).unwrap(), hit.presentation);
    }
}
