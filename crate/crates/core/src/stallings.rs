//! Stallings subgroup graphs: folding, membership and rank/index.
//!
//! Every edge carries a tag in the free group on the original generating
//! set, so each basis element of the folded graph is also known as a word in
//! the input generators.

use std::collections::VecDeque;

use crate::word::{FreeGroup, Letter, Word};

#[derive(Clone, Debug)]
struct Entry {
    letter: Letter,
    target: usize,
    tag: Word,
}

/// Folded core graph of a finitely generated subgroup of a free group.
#[derive(Clone, Debug)]
pub struct SubgroupGraph {
    rank: usize,
    /// `edges[v][letter.index()]` is the endpoint of the edge leaving `v`.
    edges: Vec<Vec<Option<usize>>>,
    /// Non-tree positive edges in basis order, as `(source, generator)`.
    basis_edges: Vec<(usize, usize)>,
    /// Basis element index for a positive edge `(v, generator)`, if not a tree edge.
    basis_of: Vec<Vec<Option<usize>>>,
    basis_words: Vec<Word>,
    basis_in_generators: Vec<Word>,
    generators: Vec<Word>,
}

/// Subgroup index: finite vertex count of a covering graph, or infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Index {
    Finite(usize),
    Infinite,
}

pub fn fold(group: &FreeGroup, gens: &[Word]) -> SubgroupGraph {
    fold_rank(group.rank(), gens)
}

pub fn fold_rank(rank: usize, gens: &[Word]) -> SubgroupGraph {
    let mut adj: Vec<Vec<Entry>> = vec![Vec::new()];
    let mut alive: Vec<bool> = vec![true];

    let add_edge = |adj: &mut Vec<Vec<Entry>>, u: usize, l: Letter, v: usize, tag: Word| {
        adj[v].push(Entry { letter: l.inverse(), target: u, tag: tag.inverse() });
        adj[u].push(Entry { letter: l, target: v, tag });
    };

    for (i, g) in gens.iter().enumerate() {
        if g.is_empty() {
            continue;
        }
        let letters = g.letters();
        let mut cur = 0;
        for (k, &l) in letters.iter().enumerate() {
            let tag = if k == 0 { Word::gen(i) } else { Word::empty() };
            let next = if k + 1 == letters.len() {
                0
            } else {
                adj.push(Vec::new());
                alive.push(true);
                adj.len() - 1
            };
            add_edge(&mut adj, cur, l, next, tag);
            cur = next;
        }
    }

    let mut work: Vec<usize> = (0..adj.len()).collect();
    while let Some(u) = work.pop() {
        if !alive[u] {
            continue;
        }
        let Some((i, j)) = find_fold(&adj[u]) else { continue };
        let e1 = adj[u][i].clone();
        let e2 = adj[u][j].clone();
        // drop e2 from both endpoints
        adj[u].remove(j);
        remove_entry(&mut adj[e2.target], e2.letter.inverse(), u, &e2.tag.inverse());
        if e1.target != e2.target {
            // merge the larger vertex into the smaller one so the base stays 0
            let (keep, gone, delta) = if e1.target < e2.target {
                (e1.target, e2.target, e1.tag.inverse().mul(&e2.tag))
            } else {
                (e2.target, e1.target, e2.tag.inverse().mul(&e1.tag))
            };
            let moved = std::mem::take(&mut adj[gone]);
            alive[gone] = false;
            let dinv = delta.inverse();
            for e in moved {
                if e.target == gone {
                    let tag = delta.mul(&e.tag).mul(&dinv);
                    adj[keep].push(Entry { letter: e.letter, target: keep, tag });
                } else {
                    let old_rev = e.tag.inverse();
                    let new_tag = delta.mul(&e.tag);
                    let rev = &mut adj[e.target];
                    if let Some(pos) = rev
                        .iter()
                        .position(|r| r.letter == e.letter.inverse() && r.target == gone && r.tag == old_rev)
                    {
                        rev[pos] = Entry { letter: e.letter.inverse(), target: keep, tag: new_tag.inverse() };
                    }
                    work.push(e.target);
                    adj[keep].push(Entry { letter: e.letter, target: e.target, tag: new_tag });
                }
            }
            work.push(keep);
        } else {
            work.push(e1.target);
        }
        work.push(u);
    }

    // trim hanging trees (the base is never removed)
    loop {
        let mut changed = false;
        for v in 1..adj.len() {
            if alive[v] && adj[v].len() <= 1 {
                if let Some(e) = adj[v].pop() {
                    remove_entry(&mut adj[e.target], e.letter.inverse(), v, &e.tag.inverse());
                }
                alive[v] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    build(rank, adj, alive, gens.to_vec())
}

fn find_fold(entries: &[Entry]) -> Option<(usize, usize)> {
    for i in 0..entries.len() {
        for j in i + 1..entries.len() {
            if entries[i].letter == entries[j].letter {
                return Some((i, j));
            }
        }
    }
    None
}

fn remove_entry(list: &mut Vec<Entry>, letter: Letter, target: usize, tag: &Word) {
    if let Some(pos) = list.iter().position(|r| r.letter == letter && r.target == target && r.tag == *tag) {
        list.remove(pos);
    } else if let Some(pos) = list.iter().position(|r| r.letter == letter && r.target == target) {
        list.remove(pos);
    }
}

fn build(rank: usize, adj: Vec<Vec<Entry>>, alive: Vec<bool>, generators: Vec<Word>) -> SubgroupGraph {
    // BFS numbering from the base, edges in (generator, sign) order
    let mut number = vec![usize::MAX; adj.len()];
    let mut order = vec![0usize];
    number[0] = 0;
    let mut parent: Vec<Option<(usize, Letter)>> = vec![None];
    let mut queue = VecDeque::from([0usize]);
    let sorted = |v: usize| {
        let mut es: Vec<&Entry> = adj[v].iter().collect();
        es.sort_by_key(|e| e.letter);
        es
    };
    while let Some(v) = queue.pop_front() {
        for e in sorted(v) {
            if number[e.target] == usize::MAX {
                number[e.target] = order.len();
                order.push(e.target);
                parent.push(Some((number[v], e.letter)));
                queue.push_back(e.target);
            }
        }
    }
    debug_assert!(order.iter().all(|&v| alive[v]));
    let n = order.len();
    let mut edges = vec![vec![None; 2 * rank]; n];
    let mut tags = vec![vec![Word::empty(); 2 * rank]; n];
    for (new_v, &old_v) in order.iter().enumerate() {
        for e in &adj[old_v] {
            edges[new_v][e.letter.index()] = Some(number[e.target]);
            tags[new_v][e.letter.index()] = e.tag.clone();
        }
    }
    // tree prefixes (as letters and as tag products)
    let mut prefix = vec![Word::empty(); n];
    let mut tag_prefix = vec![Word::empty(); n];
    let mut is_tree = vec![vec![false; 2 * rank]; n];
    for v in 1..n {
        let (p, l) = parent[v].expect("non-base vertex has a parent");
        prefix[v] = prefix[p].mul(&Word::letter(l));
        tag_prefix[v] = tag_prefix[p].mul(&tags[p][l.index()]);
        is_tree[p][l.index()] = true;
        is_tree[v][l.inverse().index()] = true;
    }
    let mut basis_edges = Vec::new();
    for g in 0..rank {
        for v in 0..n {
            let l = Letter::pos(g);
            if edges[v][l.index()].is_some() && !is_tree[v][l.index()] {
                basis_edges.push((v, g));
            }
        }
    }
    let mut basis_of = vec![vec![None; rank]; n];
    let mut basis_words = Vec::new();
    let mut basis_in_generators = Vec::new();
    for (j, &(v, g)) in basis_edges.iter().enumerate() {
        basis_of[v][g] = Some(j);
        let l = Letter::pos(g);
        let w = edges[v][l.index()].unwrap();
        basis_words.push(prefix[v].mul(&Word::letter(l)).mul(&prefix[w].inverse()));
        basis_in_generators.push(tag_prefix[v].mul(&tags[v][l.index()]).mul(&tag_prefix[w].inverse()));
    }
    SubgroupGraph { rank, edges, basis_edges, basis_of, basis_words, basis_in_generators, generators }
}

impl SubgroupGraph {
    pub fn vertex_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(|row| (0..self.rank).filter(|&g| row[2 * g].is_some()).count()).sum()
    }

    pub fn ambient_rank(&self) -> usize {
        self.rank
    }

    pub fn generators(&self) -> &[Word] {
        &self.generators
    }

    /// Free basis of the subgroup as words in the ambient free group.
    pub fn basis(&self) -> &[Word] {
        &self.basis_words
    }

    /// The basis expressed as words in the generators the graph was folded from.
    pub fn basis_in_generators(&self) -> &[Word] {
        &self.basis_in_generators
    }

    pub fn target(&self, v: usize, l: Letter) -> Option<usize> {
        self.edges[v][l.index()]
    }

    /// Rewrites `w` over the graph's free basis, or `None` if `w` is not in
    /// the subgroup.
    pub fn member(&self, w: &Word) -> Option<Word> {
        let mut v = 0;
        let mut out = Vec::new();
        for &l in w.letters() {
            if l.generator() >= self.rank {
                return None;
            }
            let next = self.edges[v][l.index()]?;
            let (src, sign) = if l.is_inverse() { (next, true) } else { (v, false) };
            if let Some(j) = self.basis_of[src][l.generator()] {
                out.push(Letter::new(j, sign));
            }
            v = next;
        }
        (v == 0).then(|| Word::reduce(out))
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.member(w).is_some()
    }

    /// `(rank, index)` of the subgroup.
    pub fn rank_index(&self) -> (usize, Index) {
        let rank = self.edge_count() + 1 - self.vertex_count();
        let full = self.edges.iter().all(|row| row.iter().all(|e| e.is_some()));
        (rank, if full { Index::Finite(self.vertex_count()) } else { Index::Infinite })
    }

    pub fn basis_edges(&self) -> &[(usize, usize)] {
        &self.basis_edges
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_word;

    fn f2() -> FreeGroup {
        FreeGroup::new(vec!["x".into(), "y".into()]).unwrap()
    }

    fn w(s: &str) -> Word {
        parse_word(s, f2().names()).unwrap()
    }

    #[test]
    fn fold_examples() {
        let g = fold(&f2(), &[w("x^2"), w("y")]);
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(fold(&f2(), &[]).vertex_count(), 1);
        let whole = fold(&f2(), &[w("x"), w("y")]);
        assert_eq!(whole.vertex_count(), 1);
        assert_eq!(whole.rank_index(), (2, Index::Finite(1)));
    }

    #[test]
    fn member_examples() {
        let g = fold(&f2(), &[w("x^2"), w("y")]);
        assert_eq!(g.basis(), &[w("x^2"), w("y")]);
        let s1s2 = Word::reduce([Letter::pos(0), Letter::pos(1)]);
        assert_eq!(g.member(&w("x^2 y")), Some(s1s2));
        assert_eq!(g.member(&w("x")), None);
        assert_eq!(g.member(&Word::empty()), Some(Word::empty()));
    }

    #[test]
    fn rank_index_examples() {
        let g = fold(&f2(), &[w("x^2"), w("y"), w("x y x^-1")]);
        assert_eq!(g.rank_index(), (3, Index::Finite(2)));
        let h = fold(&f2(), &[w("x^2"), w("y")]);
        assert_eq!(h.rank_index(), (2, Index::Infinite));
    }

    #[test]
    fn basis_expressions_evaluate_back() {
        let gens = [w("x y x^-1"), w("x y^2 x^-1"), w("x^3")];
        let g = fold(&f2(), &gens);
        for (b, e) in g.basis().iter().zip(g.basis_in_generators()) {
            assert_eq!(&e.substitute(&gens), b);
        }
        assert_eq!(g.rank_index().0, 2);
    }

    #[test]
    fn redundant_generators_collapse() {
        let gens = [w("x"), w("x^2"), w("y x y^-1")];
        let g = fold(&f2(), &gens);
        for (b, e) in g.basis().iter().zip(g.basis_in_generators()) {
            assert_eq!(&e.substitute(&gens), b);
        }
        assert_eq!(g.rank_index().0, 2);
        for x in [w("x^5"), w("y x^-3 y^-1 x")] {
            let m = g.member(&x).unwrap();
            assert_eq!(m.substitute(g.basis()), x);
        }
    }
}
