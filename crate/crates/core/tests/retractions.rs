mod common;

use common::{p, random_word, rng};
use limitforge::engines::oracle_from;
use limitforge::hom::check_hom;
use limitforge::oracle::{DirectProductOracle, FreeOracle, WordOracle};
use limitforge::retracts::{find_retraction, retract_presentation, subgroup_presentation_lr, Found, RetractOptions};
use limitforge::stallings::fold_rank;
use limitforge::syntax;
use limitforge::Word;
use rand::Rng;

#[test]
fn found_retractions_reverify() {
    let f2 = p("< x, y | >");
    let wp = FreeOracle::new(2);
    let x = Word::gen(0);
    let y = Word::gen(1);
    for s in [vec![x.pow(2), y.clone()], vec![x.mul(&y)], vec![x.pow(3)], vec![x.clone(), y.pow(2)]] {
        let Found::Yes { value, .. } = find_retraction(&f2, &s, &wp, 1_000_000).unwrap() else { panic!("no retraction") };
        assert!(value.verify(&f2, &s, &wp).unwrap());
    }
}

#[test]
fn retracts_map_both_ways() {
    for (text, rho) in [("< a, b | [a,b] >", "a, 1"), ("< a, b, c | [a,c], [b,c] >", "a, b, 1"), ("< a, b | >", "a, a")] {
        let g = p(text);
        let rho = syntax::parse_word_list(rho, g.generators()).unwrap();
        let wp = oracle_from("builtin:auto", &g).unwrap();
        let rp = retract_presentation(&g, &rho, wp.as_ref(), RetractOptions::default()).unwrap();
        let h = &rp.presentation;
        let h_oracle = oracle_from("builtin:auto", h).unwrap();
        // embedding H -> G and retraction G -> H are homomorphisms
        assert!(check_hom(h, &rp.embedding, wp.as_ref()).unwrap());
        assert!(check_hom(&g, &rp.substitution, h_oracle.as_ref()).unwrap());
        // retraction after embedding is the identity of H
        for (j, e) in rp.embedding.iter().enumerate() {
            let back = e.substitute(&rp.substitution);
            assert!(h_oracle.equal(&back, &Word::gen(j)).unwrap(), "{text}");
        }
    }
}

/// Enough for every random instance below; most need far less.
const LR_BUDGET: u64 = 10_000_000;

#[test]
fn lr_rank_matches_folding() {
    let f2 = p("< x, y | >");
    let wp = FreeOracle::new(2);
    let mut r = rng(5);
    let mut done = 0;
    while done < 50 {
        let k = r.gen_range(1..=3);
        let s: Vec<Word> = (0..k).map(|_| random_word(&mut r, 2, 4)).collect();
        if s.iter().any(Word::is_empty) {
            continue;
        }
        done += 1;
        let Found::Yes { value: lr, .. } = subgroup_presentation_lr(&f2, &s, &wp, LR_BUDGET, RetractOptions::default()).unwrap()
        else {
            panic!("no retraction for {s:?}")
        };
        assert!(lr.presentation.relators().is_empty());
        assert_eq!(lr.presentation.rank(), fold_rank(2, &s).basis().len(), "{s:?}");
        // the new generators generate S back
        let gens = lr.generators_in_g(&s);
        for (si, w) in s.iter().zip(&lr.s_in_generators) {
            assert_eq!(&w.substitute(&gens), si);
        }
    }
}

#[test]
fn abelian_subgroup_presentation() {
    let z2 = p("< a, b | [a,b] >");
    let wp = DirectProductOracle::from_presentation(&z2).unwrap();
    let s = vec![Word::gen(0).pow(2)];
    let Found::Yes { value: lr, .. } = subgroup_presentation_lr(&z2, &s, &wp, 1_000_000, RetractOptions::default()).unwrap() else {
        panic!("no retraction")
    };
    assert_eq!(lr.presentation.rank(), 1);
    assert!(lr.retraction.verify(&z2, &s, &wp).unwrap());
    assert!(wp.is_trivial(&lr.generators_in_g(&s)[0].pow(2).commutator(&s[0])).unwrap());
}
