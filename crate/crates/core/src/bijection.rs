//! The map from trees to quasi-Stirling words and its inverse.
//!
//! `phi` reads a tree left to right: a leaf gadget `r` contributes `r`; a gadget
//! with even children carrying forests `F_1..F_k` contributes
//! `r phi(F_1) r ... r phi(F_k) r`. `phi_inverse` splits a word at the
//! occurrences of its first letter and recurses into the pieces.

use crate::error::{Error, Result};
use crate::trees::{validate, Tree};
use crate::words::{Multiset, Word};

/// Label of the leftmost child of the root.
pub fn first(t: &Tree) -> Option<u32> {
    t.children.first().map(|c| c.label)
}

/// Encodes a valid tree as a word of its label multiset.
pub fn phi(t: &Tree) -> Result<Word> {
    let m = t
        .label_multiset()
        .map_err(|e| Error::InvalidWord(e.to_string()))?;
    validate(t, &m).map_err(Error::InvalidTree)?;
    let mut out = Vec::with_capacity(m.total());
    encode_root_children(&t.children, &mut out);
    Ok(Word::new(out))
}

/// `phi` of a tree whose root (relabeled 0) has the given children.
fn encode_root_children(children: &[Tree], out: &mut Vec<u32>) {
    let Some((leftmost, rest)) = children.split_first() else {
        return;
    };
    let r = leftmost.label;
    out.push(r);
    // a leaf leftmost child contributes just `r`; otherwise each even child
    // subtree is encoded between consecutive copies of `r`
    for even in &leftmost.children {
        encode_root_children(&even.children, out);
        out.push(r);
    }
    encode_root_children(rest, out);
}

/// Decodes a quasi-Stirling word into the unique tree it encodes.
pub fn phi_inverse(w: &Word) -> Result<Tree> {
    let m = w.multiset()?;
    let children = decode_forest(w.entries(), &m)?;
    Ok(Tree::new(0, children))
}

fn decode_forest(seq: &[u32], m: &Multiset) -> Result<Vec<Tree>> {
    let mut forest = Vec::new();
    let mut rest = seq;
    while let Some(&r) = rest.first() {
        let k = m.multiplicity(r);
        let mut cuts = Vec::with_capacity(k);
        cuts.extend(
            rest.iter()
                .enumerate()
                .filter(|(_, &x)| x == r)
                .map(|(i, _)| i),
        );
        if cuts.len() != k {
            return Err(straddle(r, seq));
        }
        let end = cuts[k - 1] + 1;
        let mut evens = Vec::with_capacity(k - 1);
        for pair in cuts.windows(2) {
            let segment = &rest[pair[0] + 1..pair[1]];
            closed_under_values(segment, m, seq)?;
            evens.push(Tree::new(r, decode_forest(segment, m)?));
        }
        closed_under_values(&rest[end..], m, seq)?;
        forest.push(Tree::new(r, evens));
        rest = &rest[end..];
    }
    Ok(forest)
}

/// Every value present in `piece` has all of its occurrences there.
fn closed_under_values(piece: &[u32], m: &Multiset, whole: &[u32]) -> Result<()> {
    let mut counts = vec![0usize; m.n() + 1];
    for &x in piece {
        counts[x as usize] += 1;
    }
    match counts
        .iter()
        .enumerate()
        .find(|&(v, &c)| c != 0 && c != m.multiplicity(v as u32))
    {
        Some((v, _)) => Err(straddle(v as u32, whole)),
        None => Ok(()),
    }
}

fn straddle(value: u32, seq: &[u32]) -> Error {
    Error::NotQuasiStirling(format!(
        "occurrences of {value} cross another value in {}",
        Word::new(seq.to_vec())
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::{enumerate_trees, is_weakly_increasing, tree_stats};
    use crate::words::{is_quasi_stirling, is_stirling, linear_stats};

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn t(s: &str) -> Tree {
        s.parse().unwrap()
    }

    #[test]
    fn worked_example() {
        let tree = phi_inverse(&w("2773516455")).unwrap();
        assert_eq!(tree.to_string(), "0(2,7(7),3,5(5(1,6,4),5))");
        assert_eq!(phi(&tree).unwrap(), w("2773516455"));
        let s = tree_stats(&tree);
        assert_eq!(
            (s.casc, s.cdes, s.eleaf, s.dcdes, s.dcasc, s.cpeak, s.cval),
            (5, 4, 2, 0, 1, 4, 4)
        );
        assert_eq!(first(&tree), Some(2));
    }

    #[test]
    fn small_examples() {
        assert_eq!(phi(&t("0(1,2)")).unwrap(), w("12"));
        assert_eq!(phi(&t("0(2(2(1)))")).unwrap(), w("212"));
        assert_eq!(phi_inverse(&w("12")).unwrap(), t("0(1,2)"));
        assert_eq!(phi_inverse(&w("212")).unwrap(), t("0(2(2(1)))"));
        assert_eq!(phi_inverse(&w("1111")).unwrap(), t("0(1(1,1,1))"));
    }

    #[test]
    fn rejects_crossings() {
        assert!(matches!(
            phi_inverse(&w("1212")),
            Err(Error::NotQuasiStirling(_))
        ));
        assert!(matches!(
            phi_inverse(&w("123132")),
            Err(Error::NotQuasiStirling(_))
        ));
        assert!(phi_inverse(&w("13")).is_err());
    }

    #[test]
    fn rejects_invalid_trees() {
        assert!(matches!(phi(&t("0(1,2(1))")), Err(Error::InvalidTree(_))));
        assert!(phi(&t("1(2)")).is_err());
    }

    #[test]
    fn inverse_parse_agrees_with_predicate() {
        for m in Multiset::all_up_to(6) {
            for word in crate::words::enumerate_words(&m) {
                assert_eq!(
                    phi_inverse(&word).is_ok(),
                    is_quasi_stirling(&word),
                    "{word}"
                );
            }
        }
    }

    #[test]
    fn round_trip_and_transport() {
        for m in Multiset::all_up_to(6) {
            for tree in enumerate_trees(&m) {
                let word = phi(&tree).unwrap();
                assert!(is_quasi_stirling(&word));
                assert_eq!(phi_inverse(&word).unwrap(), tree);
                let (ts, ls) = (tree_stats(&tree), linear_stats(&word));
                assert_eq!((ts.cdes, ts.casc, ts.eleaf), (ls.des, ls.asc, ls.plat));
                assert_eq!(is_stirling(&word), is_weakly_increasing(&tree), "{tree}");
            }
        }
    }
}
