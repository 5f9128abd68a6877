//! Iterated centralizer extensions of free groups.
//!
//! Level 0 is the free group on the base generators. Step `k` turns `G_k`
//! into `G_{k+1} = G_k *_C (C × Z^n)` with `C = Z(g_k)`, adding generators
//! `T_k` that commute with a basis of `C` and with each other. Elements of
//! `G_{k+1}` are handled through the amalgam normal form over `C`, where
//! membership `x ∈ C` is the commutation `[x, g_k] = 1` one level down.

mod enumerate;

pub use enumerate::{
    enumerate_ice, enumerate_limit_groups, subsets_of_total_length, towers_of_cost, IceStream, LimitEmission,
    LimitStream, LimitWitness,
};

use std::cell::{Cell, RefCell};
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{Mode, WordOracle};
use crate::presentation::{ConsequenceStream, Presentation};
use crate::retracts::{subgroup_presentation_lr, Found, LrPresentation, RetractOptions};
use crate::syntax;
use crate::word::Word;

/// Default step budget for one word-problem query.
pub const DEFAULT_WP_BUDGET: u64 = 1_000_000;

/// Where an element's maximal abelian subgroup comes from, up to the
/// conjugator carried next to it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Kind {
    /// Conjugate into the extended vertex group `A_step = C_step × Z^n`.
    Abelian { step: usize },
    /// Centralizer generated by `core`, a cyclically reduced maximal root
    /// first appearing at level `origin`.
    Cyclic { origin: usize, core: Word },
}

/// `Z(w) = conj · M · conj^-1` with `M` described by `kind`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Analysis {
    pub conj: Word,
    pub kind: Kind,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExtensionStep {
    pub g: Word,
    pub n: usize,
    /// Indices of `t_{k,1..n}` in the tower's alphabet.
    pub new_generators: Vec<usize>,
    /// Free abelian basis of `Z(g)` one level down.
    pub centralizer_basis: Vec<Word>,
    /// How `Z(g)` sits one level down.
    pub edge: Analysis,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IceTower {
    base_rank: usize,
    steps: Vec<ExtensionStep>,
}

/// On-disk tower description: `{"base_rank": 2, "steps": [{"g": "a", "n": 1}]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerSpec {
    pub base_rank: usize,
    #[serde(default)]
    pub steps: Vec<StepSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepSpec {
    pub g: String,
    pub n: usize,
}

const EXTENSION_NAMES: [&str; 7] = ["t", "u", "v", "w", "x", "y", "z"];

fn extension_name(i: usize) -> String {
    EXTENSION_NAMES.get(i).map_or_else(|| format!("t{i}"), |s| s.to_string())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    /// Conjugate into the noncyclic maximal abelian subgroup created at
    /// `level`: `conjugator^-1 · g · conjugator` lies in it.
    Parabolic { level: usize, conjugator: Word },
    Hyperbolic,
}

impl IceTower {
    pub fn free(base_rank: usize) -> Self {
        IceTower { base_rank, steps: Vec::new() }
    }

    pub fn from_spec(spec: &TowerSpec) -> Result<Self> {
        let mut t = IceTower::free(spec.base_rank);
        for s in &spec.steps {
            let g = syntax::parse_word(&s.g, &t.names())?;
            t = t.extend_centralizer(&g, s.n)?;
        }
        Ok(t)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: TowerSpec = serde_json::from_str(text).map_err(|e| Error::Invalid(format!("tower file: {e}")))?;
        IceTower::from_spec(&spec)
    }

    pub fn to_spec(&self) -> TowerSpec {
        let mut steps = Vec::new();
        for (k, s) in self.steps.iter().enumerate() {
            let names = self.names_at(k);
            steps.push(StepSpec { g: syntax::format_word(&s.g, &names), n: s.n });
        }
        TowerSpec { base_rank: self.base_rank, steps }
    }

    pub fn base_rank(&self) -> usize {
        self.base_rank
    }

    pub fn steps(&self) -> &[ExtensionStep] {
        &self.steps
    }

    pub fn height(&self) -> usize {
        self.steps.len()
    }

    /// Generator count of `G_level`.
    pub fn rank_at(&self, level: usize) -> usize {
        self.base_rank + self.steps[..level].iter().map(|s| s.n).sum::<usize>()
    }

    pub fn rank(&self) -> usize {
        self.rank_at(self.height())
    }

    pub fn names_at(&self, level: usize) -> Vec<String> {
        let mut names = syntax::default_names(self.base_rank);
        names.extend((0..self.rank_at(level) - self.base_rank).map(extension_name));
        names
    }

    pub fn names(&self) -> Vec<String> {
        self.names_at(self.height())
    }

    /// Total of base rank, extension ranks and lengths of the `g_k`.
    pub fn cost(&self) -> usize {
        self.base_rank + self.steps.iter().map(|s| s.n + s.g.len()).sum::<usize>()
    }

    /// The tower truncated to its first `level` steps.
    pub fn truncated(&self, level: usize) -> IceTower {
        IceTower { base_rank: self.base_rank, steps: self.steps[..level].to_vec() }
    }

    pub fn presentation(&self) -> Presentation {
        let mut relators = Vec::new();
        for s in &self.steps {
            for &t in &s.new_generators {
                for c in &s.centralizer_basis {
                    relators.push(c.commutator(&Word::gen(t)));
                }
            }
            for (i, &t) in s.new_generators.iter().enumerate() {
                for &u in &s.new_generators[i + 1..] {
                    relators.push(Word::gen(t).commutator(&Word::gen(u)));
                }
            }
        }
        Presentation::new(self.names(), relators).expect("tower presentation is well formed")
    }

    /// Appends the step `G *_{Z(g)} (Z(g) × Z^n)`.
    pub fn extend_centralizer(&self, g: &Word, n: usize) -> Result<IceTower> {
        if n == 0 {
            return Err(Error::Invalid("extension rank must be positive".into()));
        }
        if g.max_generator().is_some_and(|x| x >= self.rank()) {
            return Err(Error::AlphabetMismatch);
        }
        let e = Engine::new(self, DEFAULT_WP_BUDGET);
        if e.wp(self.height(), g)? {
            return Err(Error::TrivialElement);
        }
        let edge = e.analyze(self.height(), g)?;
        let centralizer_basis = e.basis(&edge);
        let first = self.rank();
        let mut next = self.clone();
        next.steps.push(ExtensionStep {
            g: g.clone(),
            n,
            new_generators: (first..first + n).collect(),
            centralizer_basis,
            edge,
        });
        Ok(next)
    }

    /// Exact word problem, within the default step budget.
    pub fn wp(&self, w: &Word) -> Result<bool> {
        self.wp_budgeted(w, DEFAULT_WP_BUDGET).map(|(b, _)| b)
    }

    /// Word problem reporting the number of steps used.
    pub fn wp_budgeted(&self, w: &Word, budget: u64) -> Result<(bool, u64)> {
        self.check(w)?;
        let e = Engine::new(self, budget);
        let r = e.wp(self.height(), w)?;
        Ok((r, e.used.get()))
    }

    fn check(&self, w: &Word) -> Result<()> {
        match w.max_generator() {
            Some(g) if g >= self.rank() => Err(Error::AlphabetMismatch),
            _ => Ok(()),
        }
    }

    /// Parabolic/hyperbolic dichotomy for a nontrivial element.
    pub fn classify_element(&self, g: &Word) -> Result<Classification> {
        self.check(g)?;
        let e = Engine::new(self, DEFAULT_WP_BUDGET);
        if e.wp(self.height(), g)? {
            return Err(Error::TrivialElement);
        }
        let a = e.analyze(self.height(), g)?;
        Ok(match a.kind {
            Kind::Abelian { step } => Classification::Parabolic { level: step + 1, conjugator: a.conj },
            Kind::Cyclic { .. } => Classification::Hyperbolic,
        })
    }

    /// Free abelian basis of `Z(g)`.
    pub fn centralizer(&self, g: &Word) -> Result<Vec<Word>> {
        self.check(g)?;
        let e = Engine::new(self, DEFAULT_WP_BUDGET);
        if e.wp(self.height(), g)? {
            return Err(Error::TrivialElement);
        }
        let a = e.analyze(self.height(), g)?;
        Ok(e.basis(&a))
    }

    pub fn analyze(&self, g: &Word) -> Result<Analysis> {
        self.check(g)?;
        let e = Engine::new(self, DEFAULT_WP_BUDGET);
        if e.wp(self.height(), g)? {
            return Err(Error::TrivialElement);
        }
        e.analyze(self.height(), g)
    }

    /// Images of all generators in the base free group under the
    /// specialization `t_{k,i} ↦ g_k^{m}`, with one exponent per extension
    /// generator in alphabet order.
    pub fn specialization_images(&self, m: &[i64]) -> Vec<Word> {
        let mut images: Vec<Word> = (0..self.base_rank).map(Word::gen).collect();
        let mut j = 0;
        for s in &self.steps {
            let g = s.g.substitute(&images);
            for _ in 0..s.n {
                images.push(g.pow(m[j]));
                j += 1;
            }
        }
        images
    }

    /// Searches exponent vectors of max-norm `1..=bound` for a
    /// specialization not killing `w`. A hit proves `w` nontrivial.
    pub fn specialization_witness(&self, w: &Word, bound: i64) -> Option<Vec<i64>> {
        let k = self.rank() - self.base_rank;
        if k == 0 {
            return (!w.is_empty()).then(Vec::new);
        }
        for norm in 1..=bound {
            let mut found = None;
            for_each_vector(k, norm, &mut |m| {
                if w.substitute(&self.specialization_images(m)).is_empty() {
                    false
                } else {
                    found = Some(m.to_vec());
                    true
                }
            });
            if found.is_some() {
                return found;
            }
        }
        None
    }

    /// The dovetailed semi-decision: specializations in increasing
    /// max-norm against consequence enumeration, one unit each per step.
    pub fn wp_dovetail(&self, w: &Word, budget: u64) -> Result<bool> {
        self.check(w)?;
        let k = self.rank() - self.base_rank;
        let pres = self.presentation();
        let mut stream: ConsequenceStream = pres.consequences();
        let mut stream_done = false;
        let core = w.cyclic_reduce().0;
        let mut norm = 0i64;
        let mut vectors: Vec<Vec<i64>> = Vec::new();
        let mut cursor = 0;
        let mut steps = 0;
        while steps < budget {
            steps += 1;
            if !stream_done {
                match stream.next() {
                    Some(c) if c == *w || c == core => return Ok(true),
                    Some(_) => {}
                    None => stream_done = true,
                }
            }
            if cursor == vectors.len() {
                norm += 1;
                vectors.clear();
                cursor = 0;
                if k == 0 {
                    vectors.push(Vec::new());
                } else {
                    for_each_vector(k, norm, &mut |m| {
                        vectors.push(m.to_vec());
                        false
                    });
                }
            }
            let m = &vectors[cursor];
            cursor += 1;
            if !w.substitute(&self.specialization_images(m)).is_empty() {
                return Ok(false);
            }
        }
        Err(Error::BudgetExhausted(steps))
    }

    /// Presentation of `⟨S⟩` through local retractions, with this tower's
    /// word problem as the oracle.
    pub fn subgroup_presentation(&self, s: &[Word], budget: u64) -> Result<Found<LrPresentation>> {
        let oracle = IceOracle::new(self.clone());
        subgroup_presentation_lr(&self.presentation(), s, &oracle, budget, RetractOptions::default())
    }
}

/// Calls `f` on every integer vector of length `k` with max-norm exactly
/// `norm`, in lexicographic order; stops early when `f` returns true.
fn for_each_vector(k: usize, norm: i64, f: &mut dyn FnMut(&[i64]) -> bool) {
    fn go(v: &mut Vec<i64>, k: usize, norm: i64, hit: bool, f: &mut dyn FnMut(&[i64]) -> bool) -> bool {
        if v.len() == k {
            return hit && f(v);
        }
        for x in -norm..=norm {
            v.push(x);
            let stop = go(v, k, norm, hit || x.abs() == norm, f);
            v.pop();
            if stop {
                return true;
            }
        }
        false
    }
    go(&mut Vec::with_capacity(k), k, norm, false, f);
}

/// Vectors of length `k` with max-norm at most `bound`, by increasing norm.
fn box_vectors(k: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![0; k]];
    for norm in 1..=bound {
        for_each_vector(k, norm, &mut |m| {
            out.push(m.to_vec());
            false
        });
    }
    out
}

/// Normal form `head τ_1 g_1 ... τ_m g_m` over the top edge group.
#[derive(Clone, Debug)]
struct NormalForm {
    head: Word,
    syllables: Vec<(Vec<i64>, Word)>,
}

enum Cyclic {
    /// `w = h x h^-1` with `x` one level down.
    Elliptic { x: Word, h: Word },
    /// `w = h (τ c) h^-1` inside the top vertex group.
    InVertex { h: Word },
    /// `w = h (τ_1 g_1 ... τ_m g_m) h^-1`, cyclically reduced, `m ≥ 1`.
    Hyperbolic { h: Word, syllables: Vec<(Vec<i64>, Word)> },
}

/// Cap on the exponent box used when searching edge-group elements.
const EDGE_BOX_CAP: i64 = 6;

struct Engine<'a> {
    tower: &'a IceTower,
    budget: u64,
    used: Cell<u64>,
    cache: RefCell<HashMap<(usize, Word), bool>>,
}

impl<'a> Engine<'a> {
    fn new(tower: &'a IceTower, budget: u64) -> Self {
        Engine { tower, budget, used: Cell::new(0), cache: RefCell::new(HashMap::new()) }
    }

    fn tick(&self) -> Result<()> {
        let u = self.used.get() + 1;
        self.used.set(u);
        if u > self.budget {
            Err(Error::BudgetExhausted(u))
        } else {
            Ok(())
        }
    }

    fn tau_word(&self, level: usize, tau: &[i64]) -> Word {
        let first = self.tower.rank_at(level - 1);
        let mut w = Word::empty();
        for (i, &e) in tau.iter().enumerate() {
            w = w.mul(&Word::gen(first + i).pow(e));
        }
        w
    }

    fn syllables_word(&self, level: usize, syl: &[(Vec<i64>, Word)]) -> Word {
        syl.iter().fold(Word::empty(), |acc, (t, g)| acc.mul(&self.tau_word(level, t)).mul(g))
    }

    fn wp(&self, level: usize, w: &Word) -> Result<bool> {
        if level == 0 || w.is_empty() {
            return Ok(w.is_empty());
        }
        let key = (level, w.clone());
        if let Some(&v) = self.cache.borrow().get(&key) {
            return Ok(v);
        }
        self.tick()?;
        let nf = self.normal_form(level, w)?;
        let v = nf.syllables.is_empty() && self.wp(level - 1, &nf.head)?;
        self.cache.borrow_mut().insert(key, v);
        Ok(v)
    }

    /// `x ∈ Z(g_{level-1})` for `x` one level down.
    fn in_edge(&self, level: usize, x: &Word) -> Result<bool> {
        let g = &self.tower.steps[level - 1].g;
        self.wp(level - 1, &x.commutator(g))
    }

    fn normal_form(&self, level: usize, w: &Word) -> Result<NormalForm> {
        let low = self.tower.rank_at(level - 1);
        let n = self.tower.steps[level - 1].n;
        // split into lower runs and top runs
        let mut head = Word::empty();
        let mut raw: Vec<(Vec<i64>, Word)> = Vec::new();
        let letters = w.letters();
        let mut i = 0;
        while i < letters.len() {
            let start = i;
            if letters[i].generator() < low {
                while i < letters.len() && letters[i].generator() < low {
                    i += 1;
                }
                let run = Word::reduce(letters[start..i].iter().copied());
                match raw.last_mut() {
                    Some(last) => last.1 = last.1.mul(&run),
                    None => head = head.mul(&run),
                }
            } else {
                let mut tau = vec![0i64; n];
                while i < letters.len() && letters[i].generator() >= low {
                    tau[letters[i].generator() - low] += letters[i].sign();
                    i += 1;
                }
                if tau.iter().any(|&x| x != 0) {
                    raw.push((tau, Word::empty()));
                }
            }
        }
        // merge across edge-group elements
        let mut stack: Vec<(Vec<i64>, Word)> = Vec::new();
        for (tau, g) in raw {
            let mut cur = Some((tau, g));
            while let Some((ctau, cg)) = cur.take() {
                let merge = match stack.last() {
                    Some(top) => self.in_edge(level, &top.1)?,
                    None => false,
                };
                if !merge {
                    stack.push((ctau, cg));
                    break;
                }
                let (ttau, tg) = stack.pop().expect("nonempty");
                let prev = match stack.last_mut() {
                    Some(p) => &mut p.1,
                    None => &mut head,
                };
                *prev = prev.mul(&tg);
                let sum: Vec<i64> = ttau.iter().zip(&ctau).map(|(a, b)| a + b).collect();
                if sum.iter().all(|&x| x == 0) {
                    *prev = prev.mul(&cg);
                } else {
                    cur = Some((sum, cg));
                }
            }
        }
        Ok(NormalForm { head, syllables: stack })
    }

    fn cyclic_reduce(&self, level: usize, w: &Word) -> Result<Cyclic> {
        let mut h = Word::empty();
        let mut cur = w.clone();
        loop {
            self.tick()?;
            let nf = self.normal_form(level, &cur)?;
            if nf.syllables.is_empty() {
                return Ok(Cyclic::Elliptic { x: nf.head, h });
            }
            h = h.mul(&nf.head);
            let mut syl = nf.syllables;
            let m = syl.len();
            let wrap = syl[m - 1].1.mul(&nf.head);
            syl[m - 1].1 = wrap.clone();
            if !self.in_edge(level, &wrap)? {
                return Ok(Cyclic::Hyperbolic { h, syllables: syl });
            }
            if m == 1 {
                return Ok(Cyclic::InVertex { h });
            }
            let p = self.tau_word(level, &syl[m - 1].0).mul(&wrap);
            let q = self.syllables_word(level, &syl[..m - 1]);
            cur = p.mul(&q);
            h = h.mul(&p.inverse());
        }
    }

    fn edge_basis(&self, step: usize) -> &[Word] {
        &self.tower.steps[step].centralizer_basis
    }

    /// Edge-group elements `∏ b_i^{e_i}` over the step's basis, by
    /// increasing max-norm up to `bound`.
    fn edge_elements(&self, step: usize, bound: i64) -> Vec<Word> {
        let basis = self.edge_basis(step);
        box_vectors(basis.len(), bound)
            .into_iter()
            .map(|e| basis.iter().zip(&e).fold(Word::empty(), |acc, (b, &x)| acc.mul(&b.pow(x))))
            .collect()
    }

    /// Maximal root of a cyclically reduced hyperbolic element at `level`.
    fn hyperbolic_root(&self, level: usize, syl: &[(Vec<i64>, Word)]) -> Result<Word> {
        let y = self.syllables_word(level, syl);
        let m = syl.len();
        let bound = (y.len() as i64).min(EDGE_BOX_CAP);
        for d in (2..=m).rev() {
            if m % d != 0 {
                continue;
            }
            let k = m / d;
            if (k..m).any(|i| syl[i].0 != syl[i - k].0) {
                continue;
            }
            let r0 = self.syllables_word(level, &syl[..k]);
            for c in self.edge_elements(level - 1, bound) {
                let r = r0.mul(&c);
                if self.wp(level, &r.pow(d as i64).mul(&y.inverse()))? {
                    return Ok(r);
                }
            }
        }
        Ok(y)
    }

    fn analyze(&self, level: usize, w: &Word) -> Result<Analysis> {
        self.tick()?;
        if level == 0 {
            let (core, conj) = w.cyclic_reduce();
            let (root, _) = core.primitive_root()?;
            return Ok(Analysis { conj, kind: Kind::Cyclic { origin: 0, core: root } });
        }
        let a = match self.cyclic_reduce(level, w)? {
            Cyclic::InVertex { h } => Analysis { conj: h, kind: Kind::Abelian { step: level - 1 } },
            Cyclic::Hyperbolic { h, syllables } => {
                let core = self.hyperbolic_root(level, &syllables)?;
                Analysis { conj: h, kind: Kind::Cyclic { origin: level, core } }
            }
            Cyclic::Elliptic { x, h } => {
                let lower = self.analyze(level - 1, &x)?;
                let edge = &self.tower.steps[level - 1].edge;
                match self.conjugate_into_edge(&lower, edge)? {
                    Some(u) => Analysis { conj: h.mul(&u), kind: Kind::Abelian { step: level - 1 } },
                    None => Analysis { conj: h.mul(&lower.conj), kind: lower.kind },
                }
            }
        };
        if let Kind::Abelian { step } = a.kind {
            return Ok(Analysis { conj: self.shorten_conjugator(level, w, step, &a.conj)?, kind: a.kind });
        }
        Ok(a)
    }

    /// Shortest prefix `h'` of `h` with `h'^-1 w h'` in `A_step`.
    fn shorten_conjugator(&self, level: usize, w: &Word, step: usize, h: &Word) -> Result<Word> {
        let basis = self.vertex_basis(step);
        for k in 0..h.len() {
            let p = Word::reduce(h.letters()[..k].iter().copied());
            let x = p.inverse().mul(w).mul(&p);
            let mut inside = true;
            for b in &basis {
                if !self.wp(level, &x.commutator(b))? {
                    inside = false;
                    break;
                }
            }
            if inside {
                return Ok(p);
            }
        }
        Ok(h.clone())
    }

    fn vertex_basis(&self, step: usize) -> Vec<Word> {
        let s = &self.tower.steps[step];
        s.centralizer_basis.iter().cloned().chain(s.new_generators.iter().map(|&t| Word::gen(t))).collect()
    }

    /// Some `u` with `u^-1 x u ∈ Z(g_level)`, given analyses of `x` and of
    /// `g_level`, both at the same level.
    fn conjugate_into_edge(&self, x: &Analysis, edge: &Analysis) -> Result<Option<Word>> {
        match (&x.kind, &edge.kind) {
            (Kind::Abelian { step: s1 }, Kind::Abelian { step: s2 }) if s1 == s2 => {
                Ok(Some(x.conj.mul(&edge.conj.inverse())))
            }
            (Kind::Cyclic { origin: o1, core: c1 }, Kind::Cyclic { origin: o2, core: c2 }) if o1 == o2 => {
                Ok(self.conjugator(*o1, c1, c2)?.map(|v| x.conj.mul(&v).mul(&edge.conj.inverse())))
            }
            _ => Ok(None),
        }
    }

    /// Some `v` with `v y2 v^-1 = y1^{±1}` at `level`, for cyclically
    /// reduced roots. Above the free base the edge-group part is searched in
    /// a bounded box.
    fn conjugator(&self, level: usize, y1: &Word, y2: &Word) -> Result<Option<Word>> {
        for target in [y1.clone(), y1.inverse()] {
            if level == 0 {
                let (t, tc) = target.cyclic_reduce();
                let (s, sc) = y2.cyclic_reduce();
                for k in 0..s.len().max(1) {
                    if s.rotate(k.min(s.len())) == t {
                        let p = Word::reduce(s.letters()[..k].iter().copied());
                        // s = p q, q p = p^-1 s p
                        return Ok(Some(tc.mul(&p.inverse()).mul(&sc.inverse())));
                    }
                }
                continue;
            }
            let (h1, s1) = match self.cyclic_reduce(level, &target)? {
                Cyclic::Hyperbolic { h, syllables } => (h, syllables),
                _ => return Ok(None),
            };
            let (h2, s2) = match self.cyclic_reduce(level, y2)? {
                Cyclic::Hyperbolic { h, syllables } => (h, syllables),
                _ => return Ok(None),
            };
            if s1.len() != s2.len() {
                continue;
            }
            let m = s1.len();
            let y1hat = self.syllables_word(level, &s1);
            let bound = ((target.len() + y2.len()) as i64).min(EDGE_BOX_CAP);
            let edge = self.edge_elements(level - 1, bound);
            for rot in 0..m {
                if (0..m).any(|i| s2[(i + rot) % m].0 != s1[i].0) {
                    continue;
                }
                let p = self.syllables_word(level, &s2[..rot]);
                let rotated: Vec<(Vec<i64>, Word)> = s2[rot..].iter().chain(&s2[..rot]).cloned().collect();
                let y2rot = self.syllables_word(level, &rotated);
                for c in &edge {
                    if self.wp(level, &y2rot.conjugate_by(c).mul(&y1hat.inverse()))? {
                        let vhat = c.mul(&p.inverse());
                        return Ok(Some(h1.mul(&vhat).mul(&h2.inverse())));
                    }
                }
            }
        }
        Ok(None)
    }

    fn basis(&self, a: &Analysis) -> Vec<Word> {
        match &a.kind {
            Kind::Abelian { step } => self.vertex_basis(*step).iter().map(|b| b.conjugate_by(&a.conj)).collect(),
            Kind::Cyclic { core, .. } => vec![core.conjugate_by(&a.conj)],
        }
    }
}

/// The tower's exact word problem as an oracle.
#[derive(Clone, Debug)]
pub struct IceOracle {
    tower: IceTower,
    budget: u64,
}

impl IceOracle {
    pub fn new(tower: IceTower) -> Self {
        IceOracle { tower, budget: DEFAULT_WP_BUDGET }
    }

    pub fn with_budget(tower: IceTower, budget: u64) -> Self {
        IceOracle { tower, budget }
    }

    pub fn tower(&self) -> &IceTower {
        &self.tower
    }
}

/// Longest `Σ|g_k|` searched when matching a presentation to a tower.
pub const TOWER_SEARCH_SLACK: usize = 4;

/// Finds a tower whose presentation equals `p` up to generator
/// relabeling, and returns it with the images of `p`'s generators.
pub fn tower_for_presentation(p: &Presentation) -> Option<(IceTower, Vec<Word>)> {
    let rank = p.rank();
    for cost in rank..=rank + TOWER_SEARCH_SLACK + p.relators().len() {
        for t in towers_of_cost(cost) {
            if t.rank() != rank {
                continue;
            }
            if let Some(perm) = p.relabeling_to(&t.presentation()) {
                return Some((t, perm.iter().map(|&j| Word::gen(j)).collect()));
            }
        }
    }
    None
}

impl WordOracle for IceOracle {
    fn rank(&self) -> usize {
        self.tower.rank()
    }

    fn is_trivial(&self, w: &Word) -> Result<bool> {
        self.tower.wp_budgeted(w, self.budget).map(|(b, _)| b)
    }

    fn mode(&self) -> Mode {
        Mode::Total
    }

    fn name(&self) -> String {
        "ice".into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tower(spec: &str) -> IceTower {
        IceTower::from_json(spec).unwrap()
    }

    fn w(t: &IceTower, s: &str) -> Word {
        syntax::parse_word(s, &t.names()).unwrap()
    }

    #[test]
    fn presentation_examples() {
        let t = tower(r#"{"base_rank":2,"steps":[{"g":"a","n":1}]}"#);
        assert_eq!(t.presentation(), "< a, b, t | [a,t] >".parse().unwrap());
        let t2 = t.extend_centralizer(&w(&t, "t"), 1).unwrap();
        assert_eq!(t2.presentation(), "< a, b, t, u | [a,t], [a,u], [t,u] >".parse().unwrap());
        assert_eq!(IceTower::free(1).presentation(), "< a | >".parse().unwrap());
        let z2 = IceTower::free(1).extend_centralizer(&Word::gen(0), 1).unwrap();
        assert_eq!(z2.presentation(), "< a, t | [a,t] >".parse().unwrap());
        let t3 = t.extend_centralizer(&w(&t, "b"), 2).unwrap();
        assert_eq!(t3.presentation(), "< a, b, t, u, v | [a,t], [b,u], [b,v], [u,v] >".parse().unwrap());
        assert!(matches!(t.extend_centralizer(&Word::empty(), 1), Err(Error::TrivialElement)));
        assert_eq!(IceTower::from_spec(&t3.to_spec()).unwrap(), t3);
    }

    #[test]
    fn wp_examples() {
        let t = tower(r#"{"base_rank":2,"steps":[{"g":"a","n":1}]}"#);
        assert!(t.wp(&w(&t, "[a,t]")).unwrap());
        assert!(!t.wp(&w(&t, "[b,t]")).unwrap());
        assert!(t.wp(&w(&t, "[a^2,t]")).unwrap());
        assert!(t.wp(&w(&t, "t a t^-1 b t a^-1 t^-1 b^-1")).unwrap() == false);
        assert!(t.wp(&w(&t, "t a^3 t^-1 a^-3")).unwrap());
        assert_eq!(t.specialization_witness(&w(&t, "[b,t]"), 2), Some(vec![-1]));
        assert!(t.wp_dovetail(&w(&t, "[b,t]"), 100).is_ok_and(|b| !b));
        assert!(t.wp_dovetail(&w(&t, "[a,t]"), 100).unwrap());
    }

    #[test]
    fn classify_examples() {
        let t = tower(r#"{"base_rank":2,"steps":[{"g":"a","n":1}]}"#);
        assert_eq!(
            t.classify_element(&w(&t, "a t")).unwrap(),
            Classification::Parabolic { level: 1, conjugator: Word::empty() }
        );
        assert_eq!(t.classify_element(&w(&t, "b")).unwrap(), Classification::Hyperbolic);
        assert_eq!(
            t.classify_element(&w(&t, "b a t b^-1")).unwrap(),
            Classification::Parabolic { level: 1, conjugator: w(&t, "b") }
        );
        assert!(matches!(t.classify_element(&Word::empty()), Err(Error::TrivialElement)));
    }

    #[test]
    fn centralizer_examples() {
        let t = tower(r#"{"base_rank":2,"steps":[{"g":"a","n":1}]}"#);
        assert_eq!(t.centralizer(&w(&t, "a")).unwrap(), vec![w(&t, "a"), w(&t, "t")]);
        assert_eq!(t.centralizer(&w(&t, "b")).unwrap(), vec![w(&t, "b")]);
        assert_eq!(t.centralizer(&w(&t, "b a b^-1")).unwrap(), vec![w(&t, "b a b^-1"), w(&t, "b t b^-1")]);
        assert_eq!(t.centralizer(&w(&t, "(b t)^3")).unwrap(), vec![w(&t, "b t")]);
        assert_eq!(t.centralizer(&w(&t, "t b t b")).unwrap(), vec![w(&t, "t b")]);
    }

    #[test]
    fn matches_presentations_to_towers() {
        let z3: Presentation = "< x, y, z | [x,y], [y,z], [x,z] >".parse().unwrap();
        let (t, images) = tower_for_presentation(&z3).unwrap();
        assert_eq!(t.rank(), 3);
        for r in z3.relators() {
            assert!(t.wp(&r.substitute(&images)).unwrap());
        }
        let p: Presentation = "< a, b, t | [b,t] >".parse().unwrap();
        assert!(tower_for_presentation(&p).is_some());
        let klein: Presentation = "< a, b | b a b^-1 a >".parse().unwrap();
        assert!(tower_for_presentation(&klein).is_none());
    }

    #[test]
    fn two_step_tower() {
        let t = tower(r#"{"base_rank":2,"steps":[{"g":"a","n":1},{"g":"b t","n":1}]}"#);
        assert_eq!(t.steps()[1].centralizer_basis, vec![w(&t, "b t")]);
        assert!(t.wp(&w(&t, "[b t, u]")).unwrap());
        assert!(!t.wp(&w(&t, "[t b, u]")).unwrap());
        assert!(t.wp(&w(&t, "[t b, t u t^-1]")).unwrap());
        // t b is conjugate to b t, so it lies in a conjugate of the new vertex group
        assert!(matches!(t.classify_element(&w(&t, "t b")).unwrap(), Classification::Parabolic { level: 2, .. }));
        let basis = t.centralizer(&w(&t, "t b")).unwrap();
        assert_eq!(basis.len(), 2);
        for x in &basis {
            assert!(t.wp(&x.commutator(&w(&t, "t b"))).unwrap());
        }
    }
}
