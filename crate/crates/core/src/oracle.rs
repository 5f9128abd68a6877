//! Word-problem oracles: exact built-in engines, an external subprocess
//! speaking a line protocol, and a budgeted semi-decision dovetail.

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::coset::{low_index, todd_coxeter, CosetTable, Enumeration};
use crate::error::{Error, Result};
use crate::presentation::Presentation;
use crate::syntax;
use crate::word::Word;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    /// Always answers.
    Total,
    /// May fail with [`Error::BudgetExhausted`].
    SemiDecision,
}

pub trait WordOracle: Send + Sync {
    /// Number of generators of the group the oracle speaks about.
    fn rank(&self) -> usize;

    fn is_trivial(&self, w: &Word) -> Result<bool>;

    fn mode(&self) -> Mode;

    fn name(&self) -> String;

    fn equal(&self, u: &Word, v: &Word) -> Result<bool> {
        self.is_trivial(&u.inverse().mul(v))
    }

    fn commute(&self, u: &Word, v: &Word) -> Result<bool> {
        self.is_trivial(&u.commutator(v))
    }
}

fn check_alphabet(rank: usize, w: &Word) -> Result<()> {
    match w.max_generator() {
        Some(g) if g >= rank => Err(Error::AlphabetMismatch),
        _ => Ok(()),
    }
}

/// Free group of a given rank: trivial iff the reduced word is empty.
#[derive(Clone, Debug)]
pub struct FreeOracle {
    rank: usize,
}

impl FreeOracle {
    pub fn new(rank: usize) -> Self {
        FreeOracle { rank }
    }
}

impl WordOracle for FreeOracle {
    fn rank(&self) -> usize {
        self.rank
    }

    fn is_trivial(&self, w: &Word) -> Result<bool> {
        check_alphabet(self.rank, w)?;
        Ok(w.is_empty())
    }

    fn mode(&self) -> Mode {
        Mode::Total
    }

    fn name(&self) -> String {
        "free".into()
    }
}

/// A relator of the form `[x, y]` up to rotation and inversion, for
/// distinct generators `x`, `y`.
pub fn commutator_pair(r: &Word) -> Option<(usize, usize)> {
    if r.len() != 4 || !r.is_cyclically_reduced() {
        return None;
    }
    let l = r.letters();
    if l[2] == l[0].inverse() && l[3] == l[1].inverse() && l[0].generator() != l[1].generator() {
        let (x, y) = (l[0].generator(), l[1].generator());
        Some((x.min(y), x.max(y)))
    } else {
        None
    }
}

/// Direct product of free groups, presented by commutators between the
/// factors. A word is trivial iff each projection is freely trivial.
#[derive(Clone, Debug)]
pub struct DirectProductOracle {
    rank: usize,
    factors: Vec<Vec<usize>>,
}

impl DirectProductOracle {
    /// Recognizes presentations whose relators are exactly the commutators
    /// between distinct blocks of a generator partition.
    pub fn from_presentation(p: &Presentation) -> Result<Self> {
        let n = p.rank();
        let mut commute = vec![vec![false; n]; n];
        for r in p.relators() {
            let (x, y) = commutator_pair(r)
                .ok_or_else(|| Error::Invalid(format!("relator {} is not a generator commutator", p.format_word(r))))?;
            commute[x][y] = true;
            commute[y][x] = true;
        }
        // blocks are the components of the non-commuting graph
        let mut block = vec![usize::MAX; n];
        let mut factors: Vec<Vec<usize>> = Vec::new();
        for s in 0..n {
            if block[s] != usize::MAX {
                continue;
            }
            let id = factors.len();
            let mut comp = vec![s];
            block[s] = id;
            let mut i = 0;
            while i < comp.len() {
                let x = comp[i];
                for y in 0..n {
                    if y != x && !commute[x][y] && block[y] == usize::MAX {
                        block[y] = id;
                        comp.push(y);
                    }
                }
                i += 1;
            }
            comp.sort_unstable();
            factors.push(comp);
        }
        for x in 0..n {
            for y in 0..n {
                if x != y && block[x] == block[y] && commute[x][y] {
                    return Err(Error::Invalid("commuting generators inside one free factor".into()));
                }
            }
        }
        Ok(DirectProductOracle { rank: n, factors })
    }

    pub fn factors(&self) -> &[Vec<usize>] {
        &self.factors
    }
}

impl WordOracle for DirectProductOracle {
    fn rank(&self) -> usize {
        self.rank
    }

    fn is_trivial(&self, w: &Word) -> Result<bool> {
        check_alphabet(self.rank, w)?;
        Ok(self.factors.iter().all(|f| {
            Word::reduce(w.letters().iter().copied().filter(|l| f.contains(&l.generator()))).is_empty()
        }))
    }

    fn mode(&self) -> Mode {
        Mode::Total
    }

    fn name(&self) -> String {
        "product".into()
    }
}

/// Finite group given by its regular representation (coset table over the
/// trivial subgroup).
#[derive(Clone, Debug)]
pub struct FiniteOracle {
    table: CosetTable,
}

impl FiniteOracle {
    pub fn from_presentation(p: &Presentation, max_cosets: usize) -> Result<Self> {
        match todd_coxeter(p, &[], max_cosets)? {
            Enumeration::Complete(table) => Ok(FiniteOracle { table }),
            Enumeration::Overflow => Err(Error::Invalid(format!("coset enumeration exceeded {max_cosets} cosets"))),
        }
    }

    pub fn order(&self) -> usize {
        self.table.index()
    }
}

impl WordOracle for FiniteOracle {
    fn rank(&self) -> usize {
        self.table.rank()
    }

    fn is_trivial(&self, w: &Word) -> Result<bool> {
        check_alphabet(self.rank(), w)?;
        Ok(self.table.stabilizes(w))
    }

    fn mode(&self) -> Mode {
        Mode::Total
    }

    fn name(&self) -> String {
        "finite".into()
    }
}

/// `< a, b | b a b^-1 a >` via the normal form `b^s a^t`.
#[derive(Clone, Debug)]
pub struct KleinOracle {
    a: usize,
    b: usize,
}

impl KleinOracle {
    pub fn standard() -> Self {
        KleinOracle { a: 0, b: 1 }
    }

    /// Accepts any two-generator presentation with a single relator of the
    /// shape `b a b^-1 a` up to rotation, inversion and generator order.
    pub fn from_presentation(p: &Presentation) -> Result<Self> {
        if p.rank() == 2 && p.relators().len() == 1 {
            let key = p.relators()[0].cyclic_min();
            for (a, b) in [(0, 1), (1, 0)] {
                let shape = Word::gen(a).conjugate_by(&Word::gen(b)).mul(&Word::gen(a));
                if shape.cyclic_min() == key {
                    return Ok(KleinOracle { a, b });
                }
            }
        }
        Err(Error::Invalid("not a Klein bottle presentation".into()))
    }

    /// Indices of `(a, b)`.
    pub fn generators(&self) -> (usize, usize) {
        (self.a, self.b)
    }

    /// `(s, t)` with `w = b^s a^t`.
    pub fn normal_form(&self, w: &Word) -> (i64, i64) {
        let (mut s, mut t) = (0i64, 0i64);
        for l in w.letters() {
            if l.generator() == self.a {
                t += l.sign();
            } else {
                s += l.sign();
                t = -t;
            }
        }
        (s, t)
    }
}

impl WordOracle for KleinOracle {
    fn rank(&self) -> usize {
        2
    }

    fn is_trivial(&self, w: &Word) -> Result<bool> {
        check_alphabet(2, w)?;
        Ok(self.normal_form(w) == (0, 0))
    }

    fn mode(&self) -> Mode {
        Mode::Total
    }

    fn name(&self) -> String {
        "klein".into()
    }
}

struct Pipe {
    child: Child,
    stdin: ChildStdin,
    stdout: BufReader<ChildStdout>,
}

/// External oracle: one serialized word per line on stdin, one reply line
/// per query on stdout, `1` for trivial and `0` for nontrivial.
pub struct SubprocessOracle {
    names: Vec<String>,
    command: String,
    pipe: Mutex<Pipe>,
    cache: Mutex<HashMap<Word, bool>>,
}

impl SubprocessOracle {
    /// Spawns `program` with `args`; generator names are used to serialize
    /// queries.
    pub fn spawn(program: &str, args: &[String], names: Vec<String>) -> Result<Self> {
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .map_err(|e| Error::OracleProtocol(format!("cannot start `{program}`: {e}")))?;
        let stdin = child.stdin.take().ok_or_else(|| Error::OracleProtocol("no stdin".into()))?;
        let stdout = BufReader::new(child.stdout.take().ok_or_else(|| Error::OracleProtocol("no stdout".into()))?);
        Ok(SubprocessOracle {
            names,
            command: program.to_string(),
            pipe: Mutex::new(Pipe { child, stdin, stdout }),
            cache: Mutex::new(HashMap::new()),
        })
    }
}

impl Drop for SubprocessOracle {
    fn drop(&mut self) {
        if let Ok(pipe) = self.pipe.get_mut() {
            let _ = pipe.child.kill();
            let _ = pipe.child.wait();
        }
    }
}

impl WordOracle for SubprocessOracle {
    fn rank(&self) -> usize {
        self.names.len()
    }

    fn is_trivial(&self, w: &Word) -> Result<bool> {
        check_alphabet(self.rank(), w)?;
        if let Some(&v) = self.cache.lock().expect("oracle cache").get(w) {
            return Ok(v);
        }
        let mut pipe = self.pipe.lock().map_err(|_| Error::OracleProtocol("oracle pipe poisoned".into()))?;
        let line = syntax::format_word(w, &self.names);
        writeln!(pipe.stdin, "{line}")
            .and_then(|_| pipe.stdin.flush())
            .map_err(|e| Error::OracleProtocol(format!("write failed: {e}")))?;
        let mut reply = String::new();
        let n = pipe.stdout.read_line(&mut reply).map_err(|e| Error::OracleProtocol(format!("read failed: {e}")))?;
        if n == 0 {
            return Err(Error::OracleProtocol("oracle closed its output".into()));
        }
        let answer = match reply.strip_suffix('\n').unwrap_or(&reply) {
            "1" => true,
            "0" => false,
            other => return Err(Error::OracleProtocol(format!("unexpected reply {other:?}"))),
        };
        self.cache.lock().expect("oracle cache").insert(w.clone(), answer);
        Ok(answer)
    }

    fn mode(&self) -> Mode {
        Mode::Total
    }

    fn name(&self) -> String {
        format!("cmd:{}", self.command)
    }
}

/// An oracle for one group queried through images of its generators in
/// another: `w` is trivial iff its image is.
pub struct MappedOracle {
    inner: Box<dyn WordOracle>,
    images: Vec<Word>,
}

impl MappedOracle {
    pub fn new(inner: Box<dyn WordOracle>, images: Vec<Word>) -> Self {
        MappedOracle { inner, images }
    }

    /// Generator `i` goes to generator `perm[i]`.
    pub fn permuted(inner: Box<dyn WordOracle>, perm: &[usize]) -> Self {
        MappedOracle::new(inner, perm.iter().map(|&j| Word::gen(j)).collect())
    }
}

impl WordOracle for MappedOracle {
    fn rank(&self) -> usize {
        self.images.len()
    }

    fn is_trivial(&self, w: &Word) -> Result<bool> {
        check_alphabet(self.rank(), w)?;
        self.inner.is_trivial(&w.substitute(&self.images))
    }

    fn mode(&self) -> Mode {
        self.inner.mode()
    }

    fn name(&self) -> String {
        self.inner.name()
    }
}

/// Budgeted semi-decision: consequence enumeration proves triviality,
/// finite permutation quotients from the low-index search prove
/// nontriviality. One step is one stream element or one quotient.
#[derive(Clone, Debug)]
pub struct DovetailOracle {
    pres: Presentation,
    budget: u64,
}

impl DovetailOracle {
    pub fn new(pres: Presentation, budget: u64) -> Self {
        DovetailOracle { pres, budget }
    }

    pub fn presentation(&self) -> &Presentation {
        &self.pres
    }
}

impl WordOracle for DovetailOracle {
    fn rank(&self) -> usize {
        self.pres.rank()
    }

    fn is_trivial(&self, w: &Word) -> Result<bool> {
        check_alphabet(self.rank(), w)?;
        let core = w.cyclic_reduce().0;
        if core.is_empty() {
            return Ok(true);
        }
        let mut consequences = self.pres.consequences();
        let mut consequences_done = false;
        let mut index = 1;
        let mut quotients = low_index(&self.pres, index);
        let mut seen_tables: HashSet<CosetTable> = HashSet::new();
        let mut steps = 0u64;
        while steps < self.budget {
            steps += 1;
            if !consequences_done {
                match consequences.next() {
                    Some(c) if c == core || c == *w => return Ok(true),
                    Some(_) => {}
                    None => consequences_done = true,
                }
            }
            steps += 1;
            match quotients.next() {
                Some(t) => {
                    if seen_tables.insert(t.clone()) && (0..t.index()).any(|c| t.act(c, w) != c) {
                        return Ok(false);
                    }
                }
                None => {
                    index += 1;
                    quotients = low_index(&self.pres, index);
                }
            }
        }
        Err(Error::BudgetExhausted(steps))
    }

    fn mode(&self) -> Mode {
        Mode::SemiDecision
    }

    fn name(&self) -> String {
        "dovetail".into()
    }
}

/// Picks an exact engine from the shape of the presentation, if one fits:
/// free, direct product of free groups, Klein bottle, or finite (bounded
/// coset enumeration).
pub fn detect_builtin(p: &Presentation, max_cosets: usize) -> Option<Box<dyn WordOracle>> {
    if p.relators().is_empty() {
        return Some(Box::new(FreeOracle::new(p.rank())));
    }
    if let Ok(o) = DirectProductOracle::from_presentation(p) {
        return Some(Box::new(o));
    }
    if let Ok(o) = KleinOracle::from_presentation(p) {
        return Some(Box::new(o));
    }
    if let Ok(o) = FiniteOracle::from_presentation(p, max_cosets) {
        return Some(Box::new(o));
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Presentation {
        s.parse().unwrap()
    }

    #[test]
    fn builtin_examples() {
        let f2 = p("< a, b | >");
        let free = FreeOracle::new(2);
        assert!(!free.is_trivial(&f2.parse_word("[a,b]").unwrap()).unwrap());
        let z5 = p("< a | a^5 >");
        let fin = FiniteOracle::from_presentation(&z5, 100).unwrap();
        assert!(fin.is_trivial(&Word::gen(0).pow(5)).unwrap());
        assert!(!fin.is_trivial(&Word::gen(0).pow(2)).unwrap());
        assert!(matches!(free.is_trivial(&Word::gen(3)), Err(Error::AlphabetMismatch)));
    }

    #[test]
    fn product_oracle() {
        let g = p("< a, b, z | [a,z], [b,z] >");
        let o = DirectProductOracle::from_presentation(&g).unwrap();
        assert_eq!(o.factors(), &[vec![0, 1], vec![2]]);
        assert!(o.is_trivial(&g.parse_word("[a z, b z]").unwrap()).is_ok());
        assert!(!o.is_trivial(&g.parse_word("[a,b]").unwrap()).unwrap());
        assert!(o.is_trivial(&g.parse_word("[a b a, z^3]").unwrap()).unwrap());
        let z3 = p("< a, b, c | [a,b], [a,c], [b,c] >");
        let o = DirectProductOracle::from_presentation(&z3).unwrap();
        assert!(o.is_trivial(&z3.parse_word("a b c a^-1 c^-1 b^-1").unwrap()).unwrap());
        assert!(DirectProductOracle::from_presentation(&p("< a | a^2 >")).is_err());
    }

    #[test]
    fn klein_oracle() {
        let k = p("< a, b | b a b^-1 a >");
        let o = KleinOracle::from_presentation(&k).unwrap();
        assert!(o.is_trivial(&k.parse_word("b a b^-1 a").unwrap()).unwrap());
        assert!(o.is_trivial(&k.parse_word("b^2 a b^-2 a^-1").unwrap()).unwrap());
        assert!(!o.is_trivial(&k.parse_word("a").unwrap()).unwrap());
        assert!(!o.is_trivial(&k.parse_word("[a,b]").unwrap()).unwrap());
        let swapped = p("< x, y | x y x^-1 y >");
        assert!(KleinOracle::from_presentation(&swapped).is_ok());
    }

    #[test]
    fn dovetail_examples() {
        let z2 = p("< a, b | [a,b] >");
        let o = DovetailOracle::new(z2.clone(), 200_000);
        let c = z2.parse_word("[a,b]").unwrap();
        for k in 1..=3 {
            assert!(o.is_trivial(&c.pow(k)).unwrap());
        }
        assert!(!o.is_trivial(&Word::gen(0)).unwrap());
        let tiny = DovetailOracle::new(p("< a, b | [a,b] >"), 2);
        assert!(matches!(tiny.is_trivial(&z2.parse_word("[a^3, b^3]").unwrap()), Err(Error::BudgetExhausted(_))));
    }
}
