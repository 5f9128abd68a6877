//! Recognition of limit groups and free groups among presentations with a
//! solvable word problem, by dovetailing an enumeration of limit-group
//! presentations against a search for certificates of failure.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::amalgam::CyclicAmalgam;
use crate::error::{Error, Result};
use crate::ice::{enumerate_limit_groups, LimitEmission, LimitStream};
use crate::oracle::{Mode, WordOracle};
use crate::presentation::Presentation;
use crate::retracts::TupleIter;
use crate::syntax;
use crate::tietze::{enumerate_presentations, replay, simplify, Move, PresentationStream};
use crate::word::{words_up_to, Word};

/// Default dovetail budget.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Steps given to one branch before switching to the other.
pub const BRANCH_SLICE: u64 = 1_000;

/// Bound used when a certificate is cross-checked by refutation.
pub const CROSS_CHECK_BOUND: usize = 2;

/// A universal sentence over a free group: the equations imply that some
/// inequation fails. Letters `0..variables.len()` are variables; letter
/// `variables.len() + j` is the constant `j` of the target free group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub variables: Vec<String>,
    pub constants: usize,
    pub equations: Vec<Word>,
    pub inequations: Vec<Word>,
}

impl Sentence {
    /// Sentence over the rank-2 free group.
    pub fn new(variables: Vec<String>, equations: Vec<Word>, inequations: Vec<Word>) -> Self {
        Sentence { variables, constants: 2, equations, inequations }
    }

    /// The sentence a witness asserts: the relators of `p` imply that one
    /// of the witness elements is trivial.
    pub fn for_witness(p: &Presentation, w: &Witness) -> Self {
        Sentence::new(p.generators().to_vec(), p.relators().to_vec(), w.elements.clone())
    }

    /// Checks an assignment of the variables.
    pub fn satisfied_by(&self, assignment: &[Word]) -> bool {
        let mut images = assignment.to_vec();
        images.extend((0..self.constants).map(Word::gen));
        self.equations.iter().all(|e| e.substitute(&images).is_empty())
            && self.inequations.iter().all(|g| !g.substitute(&images).is_empty())
    }
}

/// Exhaustive search for an assignment of reduced words of length at most
/// `bound` satisfying every equation and no inequation. A hit proves the
/// sentence false in the free group.
pub fn refute_sentence(s: &Sentence, bound: usize) -> Option<Vec<Word>> {
    let words = words_up_to(s.constants, bound);
    let k = s.variables.len();
    let mut idx = vec![0usize; k];
    loop {
        let assignment: Vec<Word> = idx.iter().map(|&i| words[i].clone()).collect();
        if s.satisfied_by(&assignment) {
            return Some(assignment);
        }
        let mut p = 0;
        loop {
            if p == k {
                return None;
            }
            idx[p] += 1;
            if idx[p] < words.len() {
                break;
            }
            idx[p] = 0;
            p += 1;
        }
    }
}

/// The finite configuration backing a witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Certificate {
    /// `[a,b] = [b,c] = 1` with `b ≠ 1` and `[a,c] ≠ 1`.
    CommutationTransitivity { a: Word, b: Word, c: Word },
    /// `g^n = 1` with `g ≠ 1`.
    Torsion { g: Word, n: u32 },
    /// `h g h^-1 g = 1` with `g ≠ 1`.
    Inversion { g: Word, h: Word },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    CommutationTransitivity,
    Torsion,
    Inversion,
    /// Supplied from outside; justified by one of the other schemas.
    External,
}

/// Finitely many nontrivial elements at least one of which dies in every
/// homomorphism to a free group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub elements: Vec<Word>,
    pub kind: WitnessKind,
    pub certificate: Certificate,
}

impl Witness {
    pub fn from_certificate(certificate: Certificate) -> Self {
        let (kind, elements) = match &certificate {
            Certificate::CommutationTransitivity { a, b, c } => {
                (WitnessKind::CommutationTransitivity, vec![b.clone(), a.commutator(c)])
            }
            Certificate::Torsion { g, .. } => (WitnessKind::Torsion, vec![g.clone()]),
            Certificate::Inversion { g, .. } => (WitnessKind::Inversion, vec![g.clone()]),
        };
        Witness { elements, kind, certificate }
    }

    /// A user-supplied certificate, marked as external.
    pub fn external(certificate: Certificate) -> Self {
        Witness { kind: WitnessKind::External, ..Witness::from_certificate(certificate) }
    }

    /// Re-checks the premises (trivial) and the elements (nontrivial).
    pub fn verify(&self, wp: &dyn WordOracle) -> Result<bool> {
        let expected = Witness::from_certificate(self.certificate.clone());
        if self.elements != expected.elements || (self.kind != expected.kind && self.kind != WitnessKind::External) {
            return Ok(false);
        }
        let premises: Vec<Word> = match &self.certificate {
            Certificate::CommutationTransitivity { a, b, c } => vec![a.commutator(b), b.commutator(c)],
            Certificate::Torsion { g, n } => {
                if *n < 2 {
                    return Ok(false);
                }
                vec![g.pow(*n as i64)]
            }
            Certificate::Inversion { g, h } => vec![g.conjugate_by(h).mul(g)],
        };
        for w in &premises {
            if !wp.is_trivial(w)? {
                return Ok(false);
            }
        }
        for g in &self.elements {
            if wp.is_trivial(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn format(&self, p: &Presentation) -> String {
        let els: Vec<String> = self.elements.iter().map(|w| p.format_word(w)).collect();
        format!("{{{}}}", els.join(", "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Schema {
    Torsion(u32),
    Inversion,
    CommutationTransitivity,
}

/// Resumable certificate search. Level `L` covers torsion pairs with
/// `|g| + n - 1 = L` (smallest `n` first), then inversion pairs with
/// `|g| + |h| = L`, then triples with `|a| + |b| + |c| = L`. The element
/// whose conjugacy class matters (`g`, or `b`) is taken cyclically reduced.
pub struct CertifySearch<'a> {
    p: Presentation,
    wp: &'a dyn WordOracle,
    level: usize,
    jobs: Vec<Schema>,
    job: usize,
    tuples: Option<TupleIter>,
    steps: u64,
}

impl<'a> CertifySearch<'a> {
    pub fn new(p: &Presentation, wp: &'a dyn WordOracle) -> Result<Self> {
        if wp.mode() != Mode::Total {
            return Err(Error::NonTotalOracle);
        }
        if wp.rank() != p.rank() {
            return Err(Error::AlphabetMismatch);
        }
        Ok(CertifySearch { p: p.clone(), wp, level: 1, jobs: Vec::new(), job: 0, tuples: None, steps: 0 })
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn level(&self) -> usize {
        self.level
    }

    fn jobs_for(level: usize) -> Vec<Schema> {
        let mut jobs: Vec<Schema> = (2..=level as u32).map(Schema::Torsion).collect();
        jobs.push(Schema::Inversion);
        jobs.push(Schema::CommutationTransitivity);
        jobs
    }

    fn open(&self, schema: Schema) -> TupleIter {
        let rank = self.p.rank();
        match schema {
            Schema::Torsion(n) => TupleIter::new(rank, 1, self.level + 1 - n as usize),
            Schema::Inversion => TupleIter::new(rank, 2, self.level),
            Schema::CommutationTransitivity => TupleIter::new(rank, 3, self.level),
        }
    }

    fn check(&self, schema: Schema, t: &[Word]) -> Result<Option<Certificate>> {
        let wp = self.wp;
        Ok(match schema {
            Schema::Torsion(n) => {
                let g = &t[0];
                if g.is_empty() || !g.is_cyclically_reduced() {
                    return Ok(None);
                }
                (wp.is_trivial(&g.pow(n as i64))? && !wp.is_trivial(g)?)
                    .then(|| Certificate::Torsion { g: g.clone(), n })
            }
            Schema::Inversion => {
                let (g, h) = (&t[0], &t[1]);
                if g.is_empty() || h.is_empty() || !g.is_cyclically_reduced() {
                    return Ok(None);
                }
                (wp.is_trivial(&g.conjugate_by(h).mul(g))? && !wp.is_trivial(g)?)
                    .then(|| Certificate::Inversion { g: g.clone(), h: h.clone() })
            }
            Schema::CommutationTransitivity => {
                let (a, b, c) = (&t[0], &t[1], &t[2]);
                if a.is_empty() || c.is_empty() || b.is_empty() || !b.is_cyclically_reduced() {
                    return Ok(None);
                }
                (wp.commute(a, b)? && wp.commute(b, c)? && !wp.commute(a, c)? && !wp.is_trivial(b)?)
                    .then(|| Certificate::CommutationTransitivity { a: a.clone(), b: b.clone(), c: c.clone() })
            }
        })
    }

    /// Runs at most `budget` further candidate checks.
    pub fn run(&mut self, budget: u64) -> Result<Option<Witness>> {
        if self.p.rank() == 0 {
            self.steps += budget;
            return Ok(None);
        }
        let limit = self.steps.saturating_add(budget);
        while self.steps < limit {
            if self.job >= self.jobs.len() {
                if !self.jobs.is_empty() {
                    self.level += 1;
                }
                self.jobs = Self::jobs_for(self.level);
                self.job = 0;
                self.tuples = None;
            }
            let schema = self.jobs[self.job];
            if self.tuples.is_none() {
                self.tuples = Some(self.open(schema));
            }
            let Some(t) = self.tuples.as_mut().and_then(Iterator::next) else {
                self.job += 1;
                self.tuples = None;
                continue;
            };
            self.steps += 1;
            if let Some(c) = self.check(schema, &t)? {
                let w = Witness::from_certificate(c);
                if let Some(bad) = refute_sentence(&Sentence::for_witness(&self.p, &w), CROSS_CHECK_BOUND) {
                    let shown: Vec<String> = bad.iter().map(|x| syntax::format_word(x, &syntax::default_names(2))).collect();
                    return Err(Error::Invalid(format!("certificate refuted by assignment {shown:?}")));
                }
                return Ok(Some(w));
            }
        }
        Ok(None)
    }
}

/// Searches certificates within `budget` candidate checks.
pub fn certify_witness(p: &Presentation, wp: &dyn WordOracle, budget: u64) -> Result<Option<Witness>> {
    CertifySearch::new(p, wp)?.run(budget)
}

/// Evidence for a `Limit` verdict: an enumerated limit-group presentation
/// and Tietze paths from it and from the input to a common normal form.
#[derive(Clone, Debug)]
pub struct LimitChain {
    pub emission: LimitEmission,
    pub emission_path: Vec<Move>,
    pub input_path: Vec<Move>,
    pub normal_form: Presentation,
}

impl LimitChain {
    /// Replays both paths and re-checks the emission's own witness.
    pub fn verify(&self, input: &Presentation) -> Result<bool> {
        if !self.emission.verify()? {
            return Ok(false);
        }
        let a = replay(&self.emission.presentation, &self.emission_path)?.normalize();
        let b = replay(input, &self.input_path)?.normalize();
        Ok(a == self.normal_form && b == self.normal_form)
    }
}

#[derive(Clone, Debug)]
pub enum Verdict {
    Limit(Box<LimitChain>),
    NotLimit(Witness),
    Unknown,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Limit(_) => "limit",
            Verdict::NotLimit(_) => "not-limit",
            Verdict::Unknown => "unknown",
        }
    }
}

/// A verdict with the work spent on each branch.
#[derive(Clone, Debug)]
pub struct Recognition {
    pub verdict: Verdict,
    pub budget: u64,
    pub enumeration_steps: u64,
    pub certificate_steps: u64,
}

/// Branch (a): limit-group emissions and the input, each pushed through
/// Tietze enumeration, meeting in the middle on normal forms.
struct MatchSearch {
    input: PresentationStream,
    input_seen: HashMap<Presentation, Vec<Move>>,
    limit: LimitStream,
    emissions: Vec<(LimitEmission, PresentationStream)>,
    emission_seen: HashMap<Presentation, (usize, Vec<Move>)>,
    cursor: usize,
    toggle: bool,
    steps: u64,
}

impl MatchSearch {
    fn new(p: &Presentation) -> Self {
        MatchSearch {
            input: enumerate_presentations(p),
            input_seen: HashMap::new(),
            limit: enumerate_limit_groups(),
            emissions: Vec::new(),
            emission_seen: HashMap::new(),
            cursor: 0,
            toggle: false,
            steps: 0,
        }
    }

    fn chain(&self, idx: usize, emission_path: Vec<Move>, input_path: Vec<Move>, nf: Presentation) -> LimitChain {
        LimitChain { emission: self.emissions[idx].0.clone(), emission_path, input_path, normal_form: nf }
    }

    fn step(&mut self) -> Option<LimitChain> {
        self.toggle = !self.toggle;
        if self.toggle {
            let before = self.input.steps();
            let reached = self.input.next();
            self.steps += (self.input.steps() - before).max(1);
            let r = reached?;
            let nf = r.presentation.normalize();
            if let Some((idx, path)) = self.emission_seen.get(&nf) {
                return Some(self.chain(*idx, path.clone(), r.path, nf));
            }
            self.input_seen.entry(nf).or_insert(r.path);
            return None;
        }
        if self.cursor >= self.emissions.len() {
            let before = self.limit.steps();
            let e = self.limit.next()?;
            self.steps += (self.limit.steps() - before).max(1);
            let stream = enumerate_presentations(&e.presentation);
            self.emissions.push((e, stream));
            self.cursor = 0;
        }
        let idx = self.cursor;
        self.cursor += 1;
        let stream = &mut self.emissions[idx].1;
        let before = stream.steps();
        let reached = stream.next();
        self.steps += (stream.steps() - before).max(1);
        let r = reached?;
        let nf = r.presentation.normalize();
        if let Some(input_path) = self.input_seen.get(&nf) {
            return Some(self.chain(idx, r.path, input_path.clone(), nf));
        }
        self.emission_seen.entry(nf).or_insert((idx, r.path));
        None
    }
}

/// Dovetails the enumeration branch against the certificate branch in
/// slices of [`BRANCH_SLICE`] steps until one succeeds or `budget` steps
/// are spent.
pub fn recognize_limit(p: &Presentation, wp: &dyn WordOracle, budget: u64) -> Result<Recognition> {
    let mut certify = CertifySearch::new(p, wp)?;
    let mut matcher = MatchSearch::new(p);
    // the branch that has spent less goes next, so each gets about half
    let verdict = loop {
        let spent = matcher.steps + certify.steps();
        if spent >= budget {
            break Verdict::Unknown;
        }
        let slice = BRANCH_SLICE.min(budget - spent);
        if matcher.steps <= certify.steps() {
            let stop = matcher.steps + slice;
            while matcher.steps < stop {
                if let Some(c) = matcher.step() {
                    return Ok(Recognition {
                        verdict: Verdict::Limit(Box::new(c)),
                        budget,
                        enumeration_steps: matcher.steps,
                        certificate_steps: certify.steps(),
                    });
                }
            }
        } else if let Some(w) = certify.run(slice)? {
            break Verdict::NotLimit(w);
        }
    };
    Ok(Recognition { verdict, budget, enumeration_steps: matcher.steps, certificate_steps: certify.steps() })
}

/// Builds `F(X) *_{u=v} F(Y)` with its normal-form oracle and recognizes it.
pub fn recognize_cyclically_pinched(rank1: usize, rank2: usize, u: &Word, v: &Word, budget: u64) -> Result<(Presentation, Recognition)> {
    let g = CyclicAmalgam::new(rank1, rank2, u.clone(), v.clone())?;
    let p = g.presentation();
    let r = recognize_limit(&p, &g, budget)?;
    Ok((p, r))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NotFreeReason {
    TorsionInAbelianization(Vec<u64>),
    AbelianNoncyclic,
    Witness(Witness),
}

#[derive(Clone, Debug)]
pub enum FreeVerdict {
    /// A relator-free presentation reached by the given moves.
    Free { presentation: Presentation, path: Vec<Move> },
    NotFree(NotFreeReason),
    Unknown,
}

#[derive(Clone, Debug)]
pub struct FreeRecognition {
    pub verdict: FreeVerdict,
    pub budget: u64,
    pub enumeration_steps: u64,
    pub certificate_steps: u64,
}

impl FreeRecognition {
    pub fn verdict_reason(&self) -> Option<&NotFreeReason> {
        match &self.verdict {
            FreeVerdict::NotFree(r) => Some(r),
            _ => None,
        }
    }
}

/// Freeness by dovetailing Tietze enumeration (halting on a relator-free
/// presentation) against obstructions.
pub fn recognize_free(p: &Presentation, wp: &dyn WordOracle, budget: u64) -> Result<FreeRecognition> {
    let mut certify = CertifySearch::new(p, wp)?;
    let done = |verdict, enumeration_steps, certificate_steps| {
        Ok(FreeRecognition { verdict, budget, enumeration_steps, certificate_steps })
    };
    let s = simplify(p);
    if s.presentation.relators().is_empty() {
        return done(FreeVerdict::Free { presentation: s.presentation, path: s.moves }, 1, 0);
    }
    let ab = p.abelianization();
    if !ab.torsion.is_empty() {
        return done(FreeVerdict::NotFree(NotFreeReason::TorsionInAbelianization(ab.torsion)), 1, 0);
    }
    let mut checks = 0;
    if ab.free_rank >= 2 {
        let mut abelian = true;
        'pairs: for i in 0..p.rank() {
            for j in i + 1..p.rank() {
                checks += 1;
                if !wp.commute(&Word::gen(i), &Word::gen(j))? {
                    abelian = false;
                    break 'pairs;
                }
            }
        }
        if abelian {
            return done(FreeVerdict::NotFree(NotFreeReason::AbelianNoncyclic), 1, checks);
        }
    }
    let mut stream = enumerate_presentations(p);
    let mut enumeration_steps = 1;
    loop {
        if enumeration_steps + certify.steps() + checks >= budget {
            return done(FreeVerdict::Unknown, enumeration_steps, certify.steps() + checks);
        }
        let stop = enumeration_steps + BRANCH_SLICE;
        while enumeration_steps < stop {
            let before = stream.steps();
            let Some(r) = stream.next() else {
                enumeration_steps = stop;
                break;
            };
            enumeration_steps += (stream.steps() - before).max(1);
            if r.presentation.relators().is_empty() {
                return done(FreeVerdict::Free { presentation: r.presentation, path: r.path }, enumeration_steps, certify.steps() + checks);
            }
        }
        let spent = enumeration_steps + certify.steps() + checks;
        if spent >= budget {
            continue;
        }
        if let Some(w) = certify.run(BRANCH_SLICE.min(budget - spent))? {
            return done(FreeVerdict::NotFree(NotFreeReason::Witness(w)), enumeration_steps, certify.steps() + checks);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{DirectProductOracle, FiniteOracle, FreeOracle, KleinOracle};

    fn p(s: &str) -> Presentation {
        s.parse().unwrap()
    }

    fn xy(s: &str) -> Word {
        syntax::parse_word(s, &["x".to_string(), "y".to_string(), "a".to_string(), "b".to_string()]).unwrap()
    }

    #[test]
    fn refute_examples() {
        let vars = vec!["x".to_string(), "y".to_string()];
        let s = Sentence::new(vars.clone(), vec![xy("[x,y]")], vec![xy("x"), xy("y")]);
        assert_eq!(refute_sentence(&s, 1), Some(vec![Word::gen(0), Word::gen(0)]));
        let s = Sentence::new(vec!["x".into()], vec![Word::gen(0).pow(2)], vec![Word::gen(0)]);
        for bound in 0..4 {
            assert_eq!(refute_sentence(&s, bound), None);
        }
        let s = Sentence::new(vars, vec![xy("y x y^-1 x")], vec![xy("x")]);
        assert_eq!(refute_sentence(&s, 3), None);
        // constants are fixed letters: x = a is forced by x a^-1 = 1
        let s = Sentence::new(vec!["x".into()], vec![Word::gen(0).mul(&Word::gen(1).inverse())], vec![Word::gen(0)]);
        assert_eq!(refute_sentence(&s, 1), Some(vec![Word::gen(0)]));
    }

    #[test]
    fn certify_examples() {
        let g = p("< a, b, z | [a,z], [b,z] >");
        let o = DirectProductOracle::from_presentation(&g).unwrap();
        let w = certify_witness(&g, &o, 100_000).unwrap().unwrap();
        assert_eq!(w.kind, WitnessKind::CommutationTransitivity);
        assert_eq!(w.elements, vec![g.parse_word("z").unwrap(), g.parse_word("[a,b]").unwrap()]);
        assert!(w.verify(&o).unwrap());

        let t = p("< a | a^2 >");
        let o = FiniteOracle::from_presentation(&t, 100).unwrap();
        let w = certify_witness(&t, &o, 1000).unwrap().unwrap();
        assert_eq!(w.kind, WitnessKind::Torsion);
        assert_eq!(w.elements, vec![Word::gen(0)]);

        let k = p("< a, b | b a b^-1 a >");
        let o = KleinOracle::from_presentation(&k).unwrap();
        let w = certify_witness(&k, &o, 1000).unwrap().unwrap();
        assert_eq!(w.kind, WitnessKind::Inversion);
        assert_eq!(w.elements, vec![Word::gen(0)]);

        let f = p("< a, b | >");
        assert_eq!(certify_witness(&f, &FreeOracle::new(2), 2000).unwrap(), None);
    }

    #[test]
    fn external_witness_is_checked() {
        let k = p("< a, b | b a b^-1 a >");
        let o = KleinOracle::from_presentation(&k).unwrap();
        let good = Witness::external(Certificate::Inversion { g: Word::gen(0), h: Word::gen(1) });
        assert!(good.verify(&o).unwrap());
        let bad = Witness::external(Certificate::Inversion { g: Word::gen(1), h: Word::gen(0) });
        assert!(!bad.verify(&o).unwrap());
    }

    #[test]
    fn recognize_small_corpus() {
        let f2 = p("< a, b | >");
        let r = recognize_limit(&f2, &FreeOracle::new(2), 100_000).unwrap();
        let Verdict::Limit(chain) = &r.verdict else { panic!("{:?}", r.verdict.label()) };
        assert!(chain.verify(&f2).unwrap());

        let k = p("< a, b | b a b^-1 a >");
        let r = recognize_limit(&k, &KleinOracle::from_presentation(&k).unwrap(), 100_000).unwrap();
        assert!(matches!(r.verdict, Verdict::NotLimit(Witness { kind: WitnessKind::Inversion, .. })));

        let semi = crate::oracle::DovetailOracle::new(k.clone(), 10);
        assert!(matches!(recognize_limit(&k, &semi, 10), Err(Error::NonTotalOracle)));
    }

    #[test]
    fn pinched_examples() {
        let names = syntax::default_names(4);
        let w = |s: &str| syntax::parse_word(s, &names).unwrap();
        let (_, r) = recognize_cyclically_pinched(2, 2, &w("a"), &w("c"), 200_000).unwrap();
        assert!(matches!(r.verdict, Verdict::Limit(_)));
        let (_, r) = recognize_cyclically_pinched(2, 2, &w("a^2"), &w("c^3"), 200_000).unwrap();
        // a and c do not commute while both commute with a^2 = c^3
        assert!(matches!(r.verdict, Verdict::NotLimit(Witness { kind: WitnessKind::CommutationTransitivity, .. })));
        assert!(matches!(recognize_cyclically_pinched(2, 2, &Word::empty(), &w("c"), 10), Err(Error::TrivialElement)));
    }

    #[test]
    fn free_examples() {
        let g = p("< a, b, c | c^-1 a b >");
        let images = vec![Word::gen(0), Word::gen(1), Word::gen(0).mul(&Word::gen(1))];
        let o = crate::oracle::MappedOracle::new(Box::new(FreeOracle::new(2)), images);
        let r = recognize_free(&g, &o, 1000).unwrap();
        let FreeVerdict::Free { presentation, path } = r.verdict else { panic!("expected free") };
        assert_eq!(presentation.rank(), 2);
        assert_eq!(replay(&g, &path).unwrap(), presentation);

        let z2 = p("< a, b | [a,b] >");
        let o = DirectProductOracle::from_presentation(&z2).unwrap();
        let r = recognize_free(&z2, &o, 1000).unwrap();
        assert!(matches!(r.verdict, FreeVerdict::NotFree(NotFreeReason::AbelianNoncyclic)));

        let z3 = p("< a | a^3 >");
        let o = FiniteOracle::from_presentation(&z3, 100).unwrap();
        let r = recognize_free(&z3, &o, 1000).unwrap();
        assert_eq!(r.verdict_reason(), Some(&NotFreeReason::TorsionInAbelianization(vec![3])));
    }
}
