//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

use limitforge::presentation::Presentation;
use limitforge::{Letter, Word};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const SEED: u64 = 0x5eed_1e55;

pub fn rng(salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED ^ salt)
}

pub fn p(s: &str) -> Presentation {
    s.parse().unwrap()
}

/// Unreduced letter sequence of length up to `max_len`.
pub fn raw_letters(rng: &mut ChaCha8Rng, rank: usize, max_len: usize) -> Vec<Letter> {
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| Letter::new(rng.gen_range(0..rank), rng.gen_bool(0.5))).collect()
}

pub fn random_word(rng: &mut ChaCha8Rng, rank: usize, max_len: usize) -> Word {
    Word::reduce(raw_letters(rng, rank, max_len))
}

/// Number of subgroups of index `n` in the free group of rank `r`, by
/// Hall's recursion `a_n = n (n!)^(r-1) - Σ_{k<n} ((n-k)!)^(r-1) a_k`.
pub fn hall_counts(r: u32, max_n: usize) -> Vec<u128> {
    let fact = |n: usize| (1..=n as u128).product::<u128>();
    let mut a: Vec<u128> = vec![0];
    for n in 1..=max_n {
        let mut v = n as u128 * fact(n).pow(r - 1);
        for k in 1..n {
            v -= fact(n - k).pow(r - 1) * a[k];
        }
        a.push(v);
    }
    a[1..].to_vec()
}

type Perm = Vec<u8>;

fn all_perms(d: usize) -> Vec<Perm> {
    let mut out = Vec::new();
    let mut cur: Perm = (0..d as u8).collect();
    permute(&mut cur, 0, &mut out);
    out
}

fn permute(cur: &mut Perm, k: usize, out: &mut Vec<Perm>) {
    if k == cur.len() {
        out.push(cur.clone());
        return;
    }
    for i in k..cur.len() {
        cur.swap(k, i);
        permute(cur, k + 1, out);
        cur.swap(k, i);
    }
}

fn inverse(p: &Perm) -> Perm {
    let mut q = vec![0; p.len()];
    for (i, &j) in p.iter().enumerate() {
        q[j as usize] = i as u8;
    }
    q
}

/// Applies letters left to right, acting on the right.
fn act(w: &Word, gens: &[Perm], invs: &[Perm], point: u8) -> u8 {
    w.letters().iter().fold(point, |x, l| {
        let table = if l.is_inverse() { &invs[l.generator()] } else { &gens[l.generator()] };
        table[x as usize]
    })
}

fn closure_size(gens: &[Perm]) -> usize {
    let d = gens.first().map_or(0, Vec::len);
    let id: Perm = (0..d as u8).collect();
    let mut seen = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y: Perm = x.iter().map(|&i| g[i as usize]).collect();
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    seen.len()
}

/// Largest image of `p` in a symmetric group of degree at most `max_degree`,
/// by trying every assignment of generator images. Each image is a
/// quotient, so this bounds the order from below.
pub fn largest_permutation_image(p: &Presentation, max_degree: usize) -> usize {
    let k = p.rank();
    let mut best = 1;
    for d in 1..=max_degree {
        let perms = all_perms(d);
        let invs: Vec<Perm> = perms.iter().map(inverse).collect();
        let mut idx = vec![0usize; k];
        loop {
            let gens: Vec<Perm> = idx.iter().map(|&i| perms[i].clone()).collect();
            let gi: Vec<Perm> = idx.iter().map(|&i| invs[i].clone()).collect();
            let ok = p.relators().iter().all(|r| (0..d as u8).all(|x| act(r, &gens, &gi, x) == x));
            if ok {
                best = best.max(closure_size(&gens));
            }
            let mut j = 0;
            loop {
                if j == k {
                    break;
                }
                idx[j] += 1;
                if idx[j] < perms.len() {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
            if j == k {
                break;
            }
        }
    }
    best
}

/// Finite presentations with the degree of a faithful permutation
/// representation.
pub fn finite_corpus() -> Vec<(&'static str, usize)> {
    vec![
        ("< a | a^5 >", 5),
        ("< a, b | a^2, b^2, (a b)^2 >", 4),
        ("< a, b | a^3, b^2, (a b)^2 >", 3),
        ("< a, b | a^4, b^2, (a b)^2 >", 4),
        ("< a, b | a^5, b^2, (a b)^2 >", 5),
        ("< a, b | a^6, b^2, (a b)^2 >", 5),
        ("< a, b | a^2, b^3, (a b)^3 >", 4),
        ("< a, b | a^2, b^3, (a b)^4 >", 4),
        ("< a, b | a^2, b^3, (a b)^5 >", 5),
        ("< a, b | a^2, b^3, [a,b] >", 5),
    ]
}

/// Ten more, for the wider coset checks.
pub fn finite_corpus_extra() -> Vec<(&'static str, usize)> {
    vec![
        ("< a | a^7 >", 7),
        ("< a | a >", 1),
        ("< a, b | a, b^3 >", 3),
        ("< a, b | a^3, b^2, a b a b >", 3),
        ("< a, b | a^3, b^3, (a b)^2 >", 4),
        ("< a, b | a^2, b^4, (a b)^3 >", 4),
        ("< a, b | a^2, b^5, (a b)^3 >", 5),
        ("< a, b | a^3, b^2, [a,b] >", 5),
        ("< a, b | a^2, b^2, (a b)^3 >", 3),
        ("< a, b | a b a^-1 b^-2, a^2 >", 4),
    ]
}

/// All reduced products of at most `k` factors from `gens` and inverses.
pub fn products_up_to(gens: &[Word], k: usize) -> HashSet<Word> {
    let mut syms: Vec<Word> = gens.to_vec();
    syms.extend(gens.iter().map(Word::inverse));
    let mut all = HashSet::from([Word::empty()]);
    let mut frontier = vec![Word::empty()];
    for _ in 0..k {
        let mut next = Vec::new();
        for w in &frontier {
            for s in &syms {
                let x = w.mul(s);
                if all.insert(x.clone()) {
                    next.push(x);
                }
            }
        }
        frontier = next;
    }
    all
}

/// Exact word problem for `< a, b, t | [a,t] >` (letters 0, 1, 2) by
/// Britton's lemma: pinch `t^e u t^-e` whenever `u` is a power of `a`.
pub fn britton_trivial(w: &Word) -> bool {
    let mut w = w.clone();
    'outer: loop {
        let ls = w.letters().to_vec();
        let ts: Vec<usize> = (0..ls.len()).filter(|&i| ls[i].generator() == 2).collect();
        for pair in ts.windows(2) {
            let (i, j) = (pair[0], pair[1]);
            if ls[i] != ls[j].inverse() {
                continue;
            }
            let u = Word::reduce(ls[i + 1..j].iter().copied());
            if u.letters().iter().all(|l| l.generator() == 0) {
                let mut out = ls[..i].to_vec();
                out.extend(u.letters());
                out.extend(&ls[j + 1..]);
                w = Word::reduce(out);
                continue 'outer;
            }
        }
        return w.is_empty();
    }
}

/// Images of the tower generators under `t_i ↦ g^m_i`, level by level.
pub fn specialize(tower: &limitforge::ice::IceTower, ms: &[i64]) -> Vec<Word> {
    let mut images: Vec<Word> = (0..tower.base_rank()).map(Word::gen).collect();
    let mut k = 0;
    for s in tower.steps() {
        let g = s.g.substitute(&images);
        for _ in 0..s.n {
            images.push(g.pow(ms[k]));
            k += 1;
        }
    }
    images
}

/// Some specialization with exponents in `[-bound, bound]` keeps `w`
/// nontrivial in the base free group.
pub fn specialization_detects(tower: &limitforge::ice::IceTower, w: &Word, bound: i64) -> bool {
    let n: usize = tower.steps().iter().map(|s| s.n).sum();
    let mut ms = vec![-bound; n];
    loop {
        if !w.substitute(&specialize(tower, &ms)).is_empty() {
            return true;
        }
        let mut i = 0;
        loop {
            if i == n {
                return false;
            }
            ms[i] += 1;
            if ms[i] <= bound {
                break;
            }
            ms[i] = -bound;
            i += 1;
        }
    }
}
