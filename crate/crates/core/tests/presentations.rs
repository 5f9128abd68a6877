mod common;

use common::{p, random_word, rng};
use limitforge::hom::{free_image, is_injective, GroupHom, Injectivity};
use limitforge::oracle::{DirectProductOracle, FreeOracle, KleinOracle, WordOracle};
use limitforge::presentation::Presentation;
use limitforge::stallings::fold_rank;
use limitforge::tietze::enumerate_presentations;
use limitforge::{Letter, Word};
use proptest::prelude::*;

fn relators(rank: usize) -> impl Strategy<Value = Vec<Word>> {
    let letter = (0..rank, any::<bool>()).prop_map(|(g, i)| Letter::new(g, i));
    let word = prop::collection::vec(letter, 1..=8).prop_map(Word::reduce);
    prop::collection::vec(word, 0..=3)
}

fn presentation() -> impl Strategy<Value = Presentation> {
    (1usize..=4).prop_flat_map(|n| relators(n).prop_map(move |rs| Presentation::with_default_names(n, rs).unwrap()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn normalize_ignores_labels_and_rotation(g in presentation(), seed in any::<u64>()) {
        let n = g.rank();
        let mut perm: Vec<usize> = (0..n).collect();
        // a seeded shuffle keeps the case reproducible from its inputs
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let images: Vec<Word> = perm.iter().map(|&j| Word::gen(j)).collect();
        let mut rels: Vec<Word> = g
            .relators()
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let r = r.substitute(&images);
                let r = if (seed >> i) & 1 == 1 { r.inverse() } else { r };
                if r.is_cyclically_reduced() && !r.is_empty() { r.rotate((seed as usize >> 8) % r.len()) } else { r }
            })
            .collect();
        rels.reverse();
        let h = Presentation::with_default_names(n, rels).unwrap();
        let a = g.normalize();
        prop_assert_eq!(a.normalize(), a.clone());
        prop_assert_eq!(h.normalize(), a);
    }
}

#[test]
fn tietze_moves_keep_abelianization() {
    for text in ["< a, b | [a,b] >", "< a, b | b a b^-1 a >", "< a | a^2 >", "< a, b, c | c^-1 a b >"] {
        let g = p(text);
        let ab = g.abelianization();
        for r in enumerate_presentations(&g).take(300) {
            assert_eq!(r.presentation.abelianization(), ab, "{}", r.presentation);
        }
    }
}

#[test]
fn consequences_are_trivial() {
    let z2 = p("< a, b | [a,b] >");
    let o = DirectProductOracle::from_presentation(&z2).unwrap();
    for w in z2.consequences().take(2000) {
        assert!(o.is_trivial(&w).unwrap(), "{}", z2.format_word(&w));
    }
    let k = p("< a, b | b a b^-1 a >");
    let o = KleinOracle::from_presentation(&k).unwrap();
    for w in k.consequences().take(2000) {
        assert!(o.is_trivial(&w).unwrap());
    }
}

#[test]
fn injectivity_matches_folding_rank() {
    let mut r = rng(3);
    let target = FreeOracle::new(2);
    for _ in 0..300 {
        let k = rand::Rng::gen_range(&mut r, 1..=3);
        let images: Vec<Word> = (0..k).map(|_| random_word(&mut r, 2, 4)).collect();
        let f = GroupHom::new(Presentation::free(k), images.clone(), &target).unwrap();
        let got = is_injective(&f, &FreeOracle::new(k), &free_image(&f), 1000).unwrap();
        // a map out of F_k is injective iff its image has rank k
        let injective = fold_rank(2, &images).basis().len() == k;
        assert_eq!(got == Injectivity::Injective, injective, "{images:?}");
        assert!(matches!(got, Injectivity::Injective | Injectivity::NotInjective));
    }
}
