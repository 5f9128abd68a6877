mod common;

use common::{finite_corpus, finite_corpus_extra, hall_counts, largest_permutation_image, p, rng};
use limitforge::coset::{low_index, rs_presentation, todd_coxeter, Enumeration};
use limitforge::Word;
use rand::Rng;

#[test]
fn orders_match_permutation_images() {
    for (text, degree) in finite_corpus().into_iter().chain(finite_corpus_extra()) {
        let g = p(text);
        let t = todd_coxeter(&g, &[], 10_000).unwrap().table().expect("finite group");
        assert!(t.is_valid_for(&g));
        assert_eq!(t.index(), largest_permutation_image(&g, degree), "{text}");
    }
}

#[test]
fn subgroup_tables_are_valid() {
    let g = p("< a, b | a^2, b^3, (a b)^5 >");
    let ab = Word::gen(0).mul(&Word::gen(1));
    // the cyclic subgroups have orders 1, 2, 3, 5
    for (h, size) in [(vec![], 1), (vec![Word::gen(0)], 2), (vec![Word::gen(1)], 3), (vec![ab], 5)] {
        let Enumeration::Complete(t) = todd_coxeter(&g, &h, 10_000).unwrap() else { panic!("overflow") };
        assert!(t.is_valid_for(&g));
        assert!(h.iter().all(|w| t.stabilizes(w)));
        assert_eq!(t.index() * size, 60);
    }
}

#[test]
fn low_index_counts_match_hall() {
    let f2 = p("< a, b | >");
    let hall = hall_counts(2, 4);
    assert_eq!(hall, vec![1, 3, 13, 71]);
    let mut counts = vec![0u128; 4];
    for t in low_index(&f2, 4) {
        assert!(t.is_valid_for(&f2));
        counts[t.index() - 1] += 1;
    }
    assert_eq!(counts, hall);
    let f3 = p("< a, b, c | >");
    let mut counts = vec![0u128; 3];
    for t in low_index(&f3, 3) {
        counts[t.index() - 1] += 1;
    }
    assert_eq!(counts, hall_counts(3, 3));
}

#[test]
fn schreier_presentations_of_free_subgroups() {
    let f2 = p("< a, b | >");
    let mut r = rng(4);
    for t in low_index(&f2, 3) {
        let k = t.index();
        let sp = rs_presentation(&f2, &t).unwrap();
        // Nielsen-Schreier: rank k (2 - 1) + 1
        assert!(sp.presentation.relators().is_empty());
        assert_eq!(sp.presentation.rank(), k + 1);
        for _ in 0..20 {
            let n = r.gen_range(0..=3);
            let mut w = Word::empty();
            for _ in 0..n {
                let s = &sp.schreier.words[r.gen_range(0..sp.schreier.words.len())];
                w = w.mul(&if r.gen_bool(0.5) { s.inverse() } else { s.clone() });
            }
            let x = sp.rewrite(&t, &w).expect("element of the subgroup");
            assert_eq!(x.substitute(&sp.embedding), w);
        }
    }
}
