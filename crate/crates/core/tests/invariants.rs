use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use qstirling::fs_action::{psi_id, vertex_id};
use qstirling::trees::{classify_vertex, tree_stats, validate};
use qstirling::words::{
    cyclic_factorization, cyclic_profile, is_quasi_stirling, linear_stats, CyclicClass,
};
use qstirling::{phi, phi_inverse, Multiset, Tree, Word};

fn multiset() -> impl Strategy<Value = Multiset> {
    prop::collection::vec(1usize..=3, 1..=4).prop_map(|m| Multiset::new(m).unwrap())
}

/// A random arrangement of the multiset, drawn with a seeded shuffle.
fn shuffled(m: &Multiset, seed: u64) -> Word {
    let mut entries = m.sorted_word().into_entries();
    entries.shuffle(&mut rand::rngs::StdRng::seed_from_u64(seed));
    Word::new(entries)
}

/// A random quasi-Stirling arrangement: the leading value's copies split the
/// word into gaps, and each remaining value lands whole in one gap.
fn random_quasi(m: &Multiset, seed: u64) -> Word {
    fn build(values: &[(u32, usize)], rng: &mut rand::rngs::StdRng, out: &mut Vec<u32>) {
        let Some(&(v, k)) = values.choose(rng) else {
            return;
        };
        let mut gaps = vec![Vec::new(); k];
        for &(u, c) in values.iter().filter(|&&(u, _)| u != v) {
            gaps[rng.gen_range(0..k)].push((u, c));
        }
        for gap in gaps {
            out.push(v);
            build(&gap, rng, out);
        }
    }
    let values: Vec<(u32, usize)> = (1..=m.n() as u32).map(|v| (v, m.multiplicity(v))).collect();
    let mut out = Vec::new();
    build(
        &values,
        &mut rand::rngs::StdRng::seed_from_u64(seed),
        &mut out,
    );
    Word::new(out)
}

proptest! {
    #[test]
    fn linear_stats_sum_to_length_plus_one(m in multiset(), seed in any::<u64>()) {
        let w = shuffled(&m, seed);
        let s = linear_stats(&w);
        prop_assert_eq!(s.asc + s.des + s.plat, w.len() + 1);
    }

    #[test]
    fn word_text_round_trip(m in multiset(), seed in any::<u64>()) {
        let w = shuffled(&m, seed);
        prop_assert_eq!(w.to_string().parse::<Word>().unwrap(), w);
    }

    #[test]
    fn multiset_text_round_trip(m in multiset()) {
        prop_assert_eq!(m.to_string().parse::<Multiset>().unwrap(), m);
    }

    #[test]
    fn factorization_reassembles(seq in prop::collection::vec(1u32..=6, 2..=9)) {
        let profile = cyclic_profile(&seq);
        for (pos, class) in profile.classes.iter().enumerate() {
            if matches!(class, Some(CyclicClass::DoubleAscent | CyclicClass::DoubleDescent)) {
                let f = cyclic_factorization(&seq, pos).unwrap();
                let mut cycle = f.reassemble();
                let mut hopped = f.hopped();
                cycle.sort_unstable();
                hopped.sort_unstable();
                let mut sorted = seq.clone();
                sorted.sort_unstable();
                prop_assert_eq!(&cycle, &sorted);
                prop_assert_eq!(&hopped, &sorted);
            }
        }
    }

    #[test]
    fn quasi_words_decode_to_valid_trees(m in multiset(), seed in any::<u64>()) {
        let w = shuffled(&m, seed);
        match phi_inverse(&w) {
            Ok(t) => {
                prop_assert!(is_quasi_stirling(&w));
                prop_assert!(validate(&t, &m).is_ok());
                prop_assert_eq!(phi(&t).unwrap(), w.clone());
                let (s, l) = (tree_stats(&t), linear_stats(&w));
                prop_assert_eq!((s.cdes, s.casc, s.eleaf), (l.des, l.asc, l.plat));
                prop_assert_eq!(t.to_string().parse::<Tree>().unwrap(), t);
            }
            Err(_) => prop_assert!(!is_quasi_stirling(&w)),
        }
    }

    #[test]
    fn action_is_an_involution(m in multiset(), seed in any::<u64>()) {
        let w = random_quasi(&m, seed);
        prop_assert!(is_quasi_stirling(&w));
        let t = phi_inverse(&w).unwrap();
        for u in t.vertices() {
            if classify_vertex(&t, &u).is_err() {
                continue;
            }
            // paths shift under the action, identities do not
            let id = vertex_id(&t, &u).unwrap();
            let moved = psi_id(&t, id).unwrap();
            prop_assert!(validate(&moved, &m).is_ok());
            prop_assert_eq!(psi_id(&moved, id).unwrap(), t.clone());
        }
    }
}
