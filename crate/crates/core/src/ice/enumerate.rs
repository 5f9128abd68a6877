//! Enumeration of towers and of presentations of their finitely generated
//! subgroups.

use std::collections::{HashSet, VecDeque};
use std::sync::Arc;

use super::{IceOracle, IceTower};
use crate::error::Result;
use crate::oracle::WordOracle;
use crate::presentation::Presentation;
use crate::retracts::{present_from_retraction, LrPresentation, RetractOptions, RetractionSearch};
use crate::word::{words_of_length, Word};

/// Towers ordered by `(cost, base_rank, steps)`, each step keyed by
/// `(|g|, g, n)`, with `g` the least cyclic rotation of itself or its
/// inverse. Every tower of a given cost is produced before any of
/// larger cost.
pub struct IceStream {
    cost: usize,
    pending: VecDeque<IceTower>,
    max_cost: Option<usize>,
}

/// The tower stream, starting from the trivial group.
pub fn enumerate_ice() -> IceStream {
    IceStream { cost: 0, pending: VecDeque::new(), max_cost: None }
}

impl IceStream {
    /// Stops after all towers of cost `max`.
    pub fn up_to_cost(max: usize) -> Self {
        IceStream { cost: 0, pending: VecDeque::new(), max_cost: Some(max) }
    }

    /// Cost of the level currently being emitted.
    pub fn cost(&self) -> usize {
        self.cost
    }
}

/// All towers of exactly the given cost, in stream order.
pub fn towers_of_cost(cost: usize) -> Vec<IceTower> {
    let mut out = Vec::new();
    for base in 0..=cost {
        extend_towers(IceTower::free(base), cost - base, &mut out);
    }
    out
}

fn extend_towers(t: IceTower, remaining: usize, out: &mut Vec<IceTower>) {
    if remaining == 0 {
        out.push(t);
        return;
    }
    let rank = t.rank();
    if rank == 0 {
        return;
    }
    // each step costs |g| + n with both at least 1; conjugates and inverses
    // have the same centralizer, so one word per free conjugacy class
    for len in 1..remaining {
        for g in words_of_length(rank, len) {
            if !g.is_cyclically_reduced() || g != g.cyclic_min() {
                continue;
            }
            for n in 1..=remaining - len {
                if let Ok(next) = t.extend_centralizer(&g, n) {
                    extend_towers(next, remaining - len - n, out);
                }
            }
        }
    }
}

impl Iterator for IceStream {
    type Item = (IceTower, Presentation);

    fn next(&mut self) -> Option<Self::Item> {
        while self.pending.is_empty() {
            if self.max_cost.is_some_and(|m| self.cost > m) {
                return None;
            }
            self.pending = towers_of_cost(self.cost).into();
            self.cost += 1;
        }
        let t = self.pending.pop_front()?;
        let p = t.presentation();
        Some((t, p))
    }
}

/// How an emitted presentation was obtained.
#[derive(Clone, Debug)]
pub enum LimitWitness {
    /// `S` is the tower's own generating set; the tower presentation itself.
    Whole,
    Retraction(Box<LrPresentation>),
}

#[derive(Clone, Debug)]
pub struct LimitEmission {
    pub presentation: Presentation,
    pub tower: IceTower,
    pub s: Vec<Word>,
    pub witness: LimitWitness,
}

impl LimitEmission {
    /// Re-checks the witness against the tower's word problem.
    pub fn verify(&self) -> Result<bool> {
        match &self.witness {
            LimitWitness::Whole => Ok(self.presentation == self.tower.presentation()),
            LimitWitness::Retraction(lr) => {
                let oracle = IceOracle::new(self.tower.clone());
                let g = self.tower.presentation();
                if !lr.retraction.verify(&g, &self.s, &oracle)? {
                    return Ok(false);
                }
                // the emitted relators hold on the generators inside the tower
                let gens = lr.generators_in_g(&self.s);
                for r in lr.presentation.relators() {
                    if !oracle.is_trivial(&r.substitute(&gens))? {
                        return Ok(false);
                    }
                }
                for (si, expr) in self.s.iter().zip(&lr.s_in_generators) {
                    if !oracle.equal(&expr.substitute(&gens), si)? {
                        return Ok(false);
                    }
                }
                Ok(lr.presentation == self.presentation)
            }
        }
    }
}

struct Task {
    tower: IceTower,
    s: Vec<Word>,
    search: RetractionSearch<'static>,
    age: u32,
}

/// Cap on the doubling of a task's slice.
const MAX_SLICE_DOUBLINGS: u32 = 16;

/// `⟨S⟩` is already generated by a smaller set when some element is
/// trivial or two elements agree up to inversion.
fn redundant(o: &dyn WordOracle, s: &[Word]) -> Result<bool> {
    for (i, w) in s.iter().enumerate() {
        if o.is_trivial(w)? {
            return Ok(true);
        }
        for v in &s[..i] {
            if o.equal(v, w)? || o.is_trivial(&v.mul(w))? {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Sets of distinct nonempty reduced words of total length `total`, each
/// set listed in increasing shortlex order. A word and its inverse generate
/// the same subgroup, so only words no larger than their inverse occur.
pub fn subsets_of_total_length(rank: usize, total: usize) -> Vec<Vec<Word>> {
    fn go(rank: usize, total: usize, acc: &mut Vec<Word>, out: &mut Vec<Vec<Word>>) {
        if total == 0 {
            if !acc.is_empty() {
                out.push(acc.clone());
            }
            return;
        }
        let min = acc.last().map_or(1, Word::len);
        for len in min..=total {
            for w in words_of_length(rank, len) {
                if acc.last().is_some_and(|last| (last.len(), last) >= (w.len(), &w)) || w > w.inverse() {
                    continue;
                }
                acc.push(w);
                go(rank, total - len, acc, out);
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    if rank > 0 {
        go(rank, total, &mut Vec::new(), &mut out);
    }
    out
}

/// Dovetails towers against finite subsets `S` and retraction searches.
///
/// Round `R` emits the presentations of the towers of cost `R`, opens a
/// task for every pair with `tower.cost() + SUBSET_WEIGHT * |S| = R`, then
/// gives every open task a slice of search steps, doubling with the task's
/// age. The tower's own generating set is covered by the first step.
pub struct LimitStream {
    round: usize,
    slice: u64,
    towers: Vec<(IceTower, Arc<dyn WordOracle>)>,
    tasks: Vec<Task>,
    ready: VecDeque<LimitEmission>,
    seen: Option<HashSet<Presentation>>,
    steps: u64,
    only: Option<IceTower>,
}

/// Weight of `|S|` against tower cost when scheduling pairs.
pub const SUBSET_WEIGHT: usize = 3;

/// Default search slice per task per round.
pub const DEFAULT_SLICE: u64 = 64;

/// The limit-group stream with syntactic dedup by `normalize`.
pub fn enumerate_limit_groups() -> LimitStream {
    LimitStream::new(true)
}

impl LimitStream {
    pub fn new(dedupe: bool) -> Self {
        LimitStream {
            round: 0,
            slice: DEFAULT_SLICE,
            towers: Vec::new(),
            tasks: Vec::new(),
            ready: VecDeque::new(),
            seen: dedupe.then(HashSet::new),
            steps: 0,
            only: None,
        }
    }

    /// The same schedule restricted to subgroups of one tower.
    pub fn for_tower(tower: IceTower, dedupe: bool) -> Self {
        LimitStream { only: Some(tower), ..LimitStream::new(dedupe) }
    }

    /// Total retraction search steps spent so far.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn round(&self) -> usize {
        self.round
    }

    /// Pops an emission produced by rounds already run.
    pub fn next_ready(&mut self) -> Option<LimitEmission> {
        self.ready.pop_front()
    }

    pub fn open_tasks(&self) -> usize {
        self.tasks.len()
    }

    fn emit(&mut self, e: LimitEmission) {
        if let Some(seen) = &mut self.seen {
            if !seen.insert(e.presentation.normalize()) {
                return;
            }
        }
        self.ready.push_back(e);
    }

    fn open_round(&mut self) -> Result<()> {
        let r = self.round;
        // towers of cost r arrive with their own presentation
        let arrivals = match &self.only {
            Some(t) if t.cost() == r => vec![t.clone()],
            Some(_) => Vec::new(),
            None => towers_of_cost(r),
        };
        for t in arrivals {
            let o: Arc<dyn WordOracle> = Arc::new(IceOracle::new(t.clone()));
            self.emit(LimitEmission {
                presentation: t.presentation(),
                s: (0..t.rank()).map(Word::gen).collect(),
                tower: t.clone(),
                witness: LimitWitness::Whole,
            });
            self.towers.push((t, o));
        }
        let mut opened = Vec::new();
        for (t, o) in &self.towers {
            let c = t.cost();
            if c >= r || (r - c) % SUBSET_WEIGHT != 0 {
                continue;
            }
            let whole: Vec<Word> = (0..t.rank()).map(Word::gen).collect();
            for s in subsets_of_total_length(t.rank(), (r - c) / SUBSET_WEIGHT) {
                if s == whole || redundant(o.as_ref(), &s)? {
                    continue;
                }
                let search = RetractionSearch::shared(&t.presentation(), &s, o.clone())?;
                opened.push(Task { tower: t.clone(), s, search, age: 0 });
            }
        }
        self.tasks.extend(opened);
        Ok(())
    }

    fn run_round(&mut self) -> Result<()> {
        let mut still = Vec::with_capacity(self.tasks.len());
        let tasks = std::mem::take(&mut self.tasks);
        for mut task in tasks {
            let before = task.search.steps();
            let found = task.search.run(self.slice << task.age.min(MAX_SLICE_DOUBLINGS))?;
            task.age += 1;
            self.steps += task.search.steps() - before;
            match found {
                Some(r) => {
                    let lr = present_from_retraction(r, task.search.oracle(), RetractOptions::default())?;
                    self.emit(LimitEmission {
                        presentation: lr.presentation.clone(),
                        tower: task.tower,
                        s: task.s,
                        witness: LimitWitness::Retraction(Box::new(lr)),
                    });
                }
                None => still.push(task),
            }
        }
        self.tasks = still;
        Ok(())
    }

    /// Advances one round; errors only on internal inconsistencies.
    pub fn step_round(&mut self) -> Result<()> {
        self.open_round()?;
        self.run_round()?;
        self.round += 1;
        Ok(())
    }
}

impl Iterator for LimitStream {
    type Item = LimitEmission;

    fn next(&mut self) -> Option<LimitEmission> {
        while self.ready.is_empty() {
            if let Err(e) = self.step_round() {
                // towers and searches are built from verified data
                panic!("limit-group enumeration failed: {e}");
            }
        }
        self.ready.pop_front()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tower_prefix() {
        let prefix: Vec<Presentation> = enumerate_ice().take(8).map(|(_, p)| p).collect();
        assert_eq!(prefix[0], "< | >".parse().unwrap());
        assert_eq!(prefix[1], "< a | >".parse().unwrap());
        assert_eq!(prefix[2], "< a, b | >".parse().unwrap());
        let z2: Presentation = "< a, t | [a,t] >".parse().unwrap();
        assert!(prefix.contains(&z2));
        let target: Presentation = "< a, b, t | [a,t] >".parse().unwrap();
        let pos = enumerate_ice().take(200).position(|(_, p)| p == target);
        assert!(pos.is_some());
    }

    #[test]
    fn tower_costs_are_monotone() {
        let costs: Vec<usize> = IceStream::up_to_cost(5).map(|(t, _)| t.cost()).collect();
        assert!(costs.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(costs.last(), Some(&5));
    }

    #[test]
    fn subsets_are_sets() {
        let s = subsets_of_total_length(1, 2);
        // {a a}, since a^-1 a^-1 is larger than its inverse
        assert_eq!(s, vec![vec![Word::gen(0).pow(2)]]);
        assert!(subsets_of_total_length(2, 3).contains(&vec![Word::gen(1), Word::gen(0).pow(2)]));
        for set in subsets_of_total_length(2, 3) {
            assert!(set.windows(2).all(|w| (w[0].len(), &w[0]) < (w[1].len(), &w[1])));
            assert_eq!(set.iter().map(Word::len).sum::<usize>(), 3);
        }
    }

    #[test]
    fn limit_prefix() {
        let z2: Presentation = "< a, t | [a,t] >".parse().unwrap();
        let prefix: Vec<LimitEmission> = enumerate_limit_groups().take(40).collect();
        for e in &prefix {
            assert!(e.verify().unwrap());
            assert!(e.presentation.abelianization().torsion.is_empty());
        }
        assert!(prefix.iter().any(|e| e.presentation == "< a, b | >".parse().unwrap()));
        assert!(prefix.iter().any(|e| e.presentation.normalize() == z2.normalize()));
    }

    #[test]
    fn square_and_generator_give_free_rank_two() {
        let target = vec![Word::gen(1), Word::gen(0).pow(2)];
        let mut stream = LimitStream::for_tower(IceTower::free(2), false);
        let e = stream.find(|e| e.s == target).unwrap();
        assert!(matches!(e.witness, LimitWitness::Retraction(_)));
        assert!(e.verify().unwrap());
        assert_eq!(e.presentation.normalize(), Presentation::free(2).normalize());
    }
}
