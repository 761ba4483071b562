//! Multisets, their permutations, and the statistics read off sequences.
//!
//! Linear statistics pad a word with `0` on both ends. Cyclic statistics read
//! a sequence as a cycle; they apply to arbitrary `u32` sequences (including
//! the `0`-anchored child sequences of tree vertices), not just words.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `M = {1^k_1, ..., n^k_n}` stored as its multiplicity sequence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Multiset {
    mults: Vec<usize>,
}

impl Multiset {
    pub fn new(mults: Vec<usize>) -> Result<Self> {
        if mults.is_empty() {
            return Err(Error::InvalidMultiset("no values".into()));
        }
        if let Some(i) = mults.iter().position(|&k| k == 0) {
            return Err(Error::InvalidMultiset(format!(
                "value {} has multiplicity 0",
                i + 1
            )));
        }
        Ok(Self { mults })
    }

    /// `{1, 2, ..., n}`.
    pub fn distinct(n: usize) -> Result<Self> {
        Self::new(vec![1; n])
    }

    /// `{1^k, 2^k, ..., n^k}`.
    pub fn uniform(n: usize, k: usize) -> Result<Self> {
        Self::new(vec![k; n])
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.mults
    }

    /// Number of distinct values `n`.
    pub fn n(&self) -> usize {
        self.mults.len()
    }

    /// Total size `K`.
    pub fn total(&self) -> usize {
        self.mults.iter().sum()
    }

    /// Multiplicity of `value` (values are 1-based); 0 outside `1..=n`.
    pub fn multiplicity(&self, value: u32) -> usize {
        match value {
            0 => 0,
            v => self.mults.get(v as usize - 1).copied().unwrap_or(0),
        }
    }

    /// The collapsed multiset `{1^(K-n+1), 2, ..., n}`.
    pub fn collapsed(&self) -> Multiset {
        let mut mults = vec![1; self.n()];
        mults[0] = self.total() - self.n() + 1;
        Multiset { mults }
    }

    /// `K! / (k_1! ... k_n!)`, or `None` on `u128` overflow.
    pub fn permutation_count(&self) -> Option<u128> {
        let mut count: u128 = 1;
        let mut placed: u128 = 0;
        for &k in &self.mults {
            for j in 1..=k as u128 {
                placed += 1;
                // running product stays integral: it is a product of binomials
                count = count.checked_mul(placed)? / j;
            }
        }
        Some(count)
    }

    /// The sorted word `1^k_1 2^k_2 ... n^k_n`.
    pub fn sorted_word(&self) -> Word {
        let entries = self
            .mults
            .iter()
            .enumerate()
            .flat_map(|(i, &k)| std::iter::repeat_n(i as u32 + 1, k))
            .collect();
        Word(entries)
    }

    /// Every multiset with `1 <= K <= max_total`, ordered by `K` and then
    /// lexicographically by multiplicity sequence.
    pub fn all_up_to(max_total: usize) -> Vec<Multiset> {
        let mut out = Vec::new();
        for total in 1..=max_total {
            let mut comps = Vec::new();
            compositions(total, &mut Vec::new(), &mut comps);
            comps.sort();
            out.extend(comps.into_iter().map(|mults| Multiset { mults }));
        }
        out
    }
}

fn compositions(remaining: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if remaining == 0 {
        out.push(prefix.clone());
        return;
    }
    for part in 1..=remaining {
        prefix.push(part);
        compositions(remaining - part, prefix, out);
        prefix.pop();
    }
}

impl TryFrom<Vec<usize>> for Multiset {
    type Error = Error;

    fn try_from(mults: Vec<usize>) -> Result<Self> {
        Multiset::new(mults)
    }
}

impl From<Multiset> for Vec<usize> {
    fn from(m: Multiset) -> Self {
        m.mults
    }
}

impl fmt::Display for Multiset {
    /// Caret form, e.g. `1^2 2^2 3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &k) in self.mults.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            match k {
                1 => write!(f, "{}", i + 1)?,
                _ => write!(f, "{}^{}", i + 1, k)?,
            }
        }
        Ok(())
    }
}

impl FromStr for Multiset {
    type Err = Error;

    /// Accepts the caret form `1^2 2^2 3` (optionally braced, omitted
    /// exponent meaning 1) and the positional comma form `2,2,1`.
    fn from_str(text: &str) -> Result<Self> {
        let body = text.trim();
        let body = body
            .strip_prefix('{')
            .and_then(|b| b.strip_suffix('}'))
            .unwrap_or(body)
            .trim();
        if body.is_empty() {
            return Err(Error::InvalidMultiset("empty input".into()));
        }
        let number = |tok: &str| {
            tok.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidMultiset(format!("malformed token `{tok}`")))
        };
        if body.contains(',') && !body.contains('^') {
            let mults = body.split(',').map(number).collect::<Result<Vec<_>>>()?;
            return Multiset::new(mults);
        }

        let mut mults: Vec<Option<usize>> = Vec::new();
        for tok in body
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
        {
            let (value, k) = match tok.split_once('^') {
                Some((v, k)) => (number(v)?, number(k)?),
                None => (number(tok)?, 1),
            };
            if value == 0 {
                return Err(Error::InvalidMultiset("values start at 1".into()));
            }
            if k == 0 {
                return Err(Error::InvalidMultiset(format!(
                    "value {value} has multiplicity 0"
                )));
            }
            if mults.len() < value {
                mults.resize(value, None);
            }
            if mults[value - 1].replace(k).is_some() {
                return Err(Error::InvalidMultiset(format!("value {value} repeated")));
            }
        }
        let mults = mults
            .into_iter()
            .enumerate()
            .map(|(i, k)| {
                k.ok_or_else(|| Error::InvalidMultiset(format!("value {} missing", i + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        Multiset::new(mults)
    }
}

/// A finite sequence of values; a permutation of a multiset when its
/// occurrence counts match.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(Vec<u32>);

impl Word {
    pub fn new(entries: Vec<u32>) -> Self {
        Word(entries)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<u32> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Leftmost entry.
    pub fn first(&self) -> Option<u32> {
        self.0.first().copied()
    }

    /// The multiset this word permutes, if its values are exactly `1..=n`.
    pub fn multiset(&self) -> Result<Multiset> {
        let n = self.0.iter().copied().max().unwrap_or(0) as usize;
        let mut mults = vec![0; n];
        for &v in &self.0 {
            if v == 0 {
                return Err(Error::InvalidWord("entry 0".into()));
            }
            mults[v as usize - 1] += 1;
        }
        Multiset::new(mults).map_err(|e| Error::InvalidWord(e.to_string()))
    }

    pub fn is_permutation_of(&self, m: &Multiset) -> bool {
        self.multiset().is_ok_and(|own| &own == m)
    }
}

impl From<Vec<u32>> for Word {
    fn from(entries: Vec<u32>) -> Self {
        Word(entries)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Space-separated entries, or a bare digit string when every value is
    /// at most 9.
    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let bad = |tok: &str| Error::InvalidWord(format!("malformed entry `{tok}`"));
        if text.contains(char::is_whitespace) {
            text.split_whitespace()
                .map(|tok| tok.parse::<u32>().map_err(|_| bad(tok)))
                .collect::<Result<Vec<_>>>()
                .map(Word)
        } else {
            text.chars()
                .map(|c| c.to_digit(10).ok_or_else(|| bad(&c.to_string())))
                .collect::<Result<Vec<_>>>()
                .map(Word)
        }
    }
}

/// Distinct permutations of `m` in lexicographic order.
pub fn enumerate_words(m: &Multiset) -> WordIter {
    WordIter {
        next: Some(m.sorted_word().0),
    }
}

pub struct WordIter {
    next: Option<Vec<u32>>,
}

impl Iterator for WordIter {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        if next_permutation(&mut succ) {
            self.next = Some(succ);
        }
        Some(Word(current))
    }
}

/// Advances to the lexicographic successor; `false` at the last permutation.
pub(crate) fn next_permutation(v: &mut [u32]) -> bool {
    let Some(i) = v.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = v
        .iter()
        .rposition(|&x| x > v[i])
        .expect("pivot has a successor");
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

/// No `i < j < k < l` with `w_i = w_k != w_j = w_l`.
pub fn is_quasi_stirling(w: &Word) -> bool {
    let values: BTreeSet<u32> = w.0.iter().copied().collect();
    for &a in &values {
        for &b in &values {
            if a != b && contains_abab(&w.0, a, b) {
                return false;
            }
        }
    }
    true
}

fn contains_abab(seq: &[u32], a: u32, b: u32) -> bool {
    let pattern = [a, b, a, b];
    let mut matched = 0;
    for &x in seq {
        if x == pattern[matched] {
            matched += 1;
            if matched == pattern.len() {
                return true;
            }
        }
    }
    false
}

/// Between two equal entries every entry is at least as large.
pub fn is_stirling(w: &Word) -> bool {
    let s = &w.0;
    for i in 0..s.len() {
        if let Some(last) = s.iter().rposition(|&x| x == s[i]) {
            if s[i..last].iter().any(|&x| x < s[i]) {
                return false;
            }
        }
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct LinearStats {
    pub asc: usize,
    pub des: usize,
    pub plat: usize,
    pub ddes: usize,
}

/// Ascents, descents and plateaux over the zero-padded indices `0..=K`;
/// double descents over `1..=K`.
pub fn linear_stats(w: &Word) -> LinearStats {
    let k = w.len();
    let at = |i: usize| if i == 0 || i > k { 0 } else { w.0[i - 1] };
    let mut stats = LinearStats::default();
    for i in 0..=k {
        match at(i).cmp(&at(i + 1)) {
            std::cmp::Ordering::Less => stats.asc += 1,
            std::cmp::Ordering::Greater => stats.des += 1,
            std::cmp::Ordering::Equal => stats.plat += 1,
        }
    }
    stats.ddes = (1..=k)
        .filter(|&i| at(i - 1) > at(i) && at(i) > at(i + 1))
        .count();
    stats
}

/// Class of an entry relative to its two cyclic neighbours.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CyclicClass {
    DoubleDescent,
    DoubleAscent,
    Peak,
    Valley,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CyclicProfile {
    pub cdes: usize,
    pub casc: usize,
    pub dcdes: usize,
    pub dcasc: usize,
    pub cpeak: usize,
    pub cval: usize,
    /// Per position; `None` where the entry ties a cyclic neighbour.
    pub classes: Vec<Option<CyclicClass>>,
    /// Entries that are cyclic descents.
    pub cdes_entries: BTreeSet<u32>,
}

/// Cyclic statistics of `seq` with `seq[len] = seq[0]` and `seq[-1] = seq[len-1]`.
pub fn cyclic_profile(seq: &[u32]) -> CyclicProfile {
    let len = seq.len();
    let mut p = CyclicProfile {
        classes: vec![None; len],
        ..Default::default()
    };
    if len < 2 {
        return p;
    }
    for i in 0..len {
        let cur = seq[i];
        let prev = seq[(i + len - 1) % len];
        let next = seq[(i + 1) % len];
        if cur > next {
            p.cdes += 1;
            p.cdes_entries.insert(cur);
        } else if cur < next {
            p.casc += 1;
        }
        if prev == cur || next == cur {
            continue;
        }
        let class = match (prev < cur, cur < next) {
            (false, false) => CyclicClass::DoubleDescent,
            (true, true) => CyclicClass::DoubleAscent,
            (true, false) => CyclicClass::Peak,
            (false, true) => CyclicClass::Valley,
        };
        match class {
            CyclicClass::DoubleDescent => p.dcdes += 1,
            CyclicClass::DoubleAscent => p.dcasc += 1,
            CyclicClass::Peak => p.cpeak += 1,
            CyclicClass::Valley => p.cval += 1,
        }
        p.classes[i] = Some(class);
    }
    p
}

/// `W_1 pivot W_2 W_3`, a rotation of the factored sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicFactorization {
    pub w1: Vec<u32>,
    pub pivot: u32,
    pub w2: Vec<u32>,
    pub w3: Vec<u32>,
}

impl CyclicFactorization {
    /// `W_1 pivot W_2 W_3`.
    pub fn reassemble(&self) -> Vec<u32> {
        let mut out = self.w1.clone();
        out.push(self.pivot);
        out.extend(&self.w2);
        out.extend(&self.w3);
        out
    }

    /// `W_2 pivot W_1 W_3`: the pivot hopped across its smaller neighbours.
    pub fn hopped(&self) -> Vec<u32> {
        let mut out = self.w2.clone();
        out.push(self.pivot);
        out.extend(&self.w1);
        out.extend(&self.w3);
        out
    }
}

/// Factors `seq` around position `pos`, which must be a double cyclic ascent
/// or descent. `W_1`/`W_2` are the maximal runs of entries smaller than the
/// pivot immediately to its cyclic left/right.
pub fn cyclic_factorization(seq: &[u32], pos: usize) -> Result<CyclicFactorization> {
    let len = seq.len();
    if pos >= len {
        return Err(Error::NotDoubleCyclic(pos));
    }
    match cyclic_profile(seq).classes[pos] {
        Some(CyclicClass::DoubleAscent | CyclicClass::DoubleDescent) => {}
        _ => return Err(Error::NotDoubleCyclic(pos)),
    }
    let pivot = seq[pos];
    let at = |offset: usize| seq[(pos + offset) % len];

    // offsets are measured clockwise from the pivot; W_1 sits at the far end
    let mut left = 0;
    while left < len - 1 && at(len - 1 - left) < pivot {
        left += 1;
    }
    let mut right = 0;
    while right < len - 1 - left && at(1 + right) < pivot {
        right += 1;
    }
    let w1 = (len - left..len).map(at).collect();
    let w2 = (1..1 + right).map(at).collect();
    let w3 = (1 + right..len - left).map(at).collect();
    Ok(CyclicFactorization { w1, pivot, w2, w3 })
}

/// Rotates a cyclic sequence so that its first occurrence of `lead` is first.
pub fn rotate_to(seq: &[u32], lead: u32) -> Option<Vec<u32>> {
    let start = seq.iter().position(|&x| x == lead)?;
    Some(seq[start..].iter().chain(&seq[..start]).copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn words(m: &[usize]) -> Vec<String> {
        enumerate_words(&Multiset::new(m.to_vec()).unwrap())
            .map(|w| w.entries().iter().map(|v| v.to_string()).collect())
            .collect()
    }

    #[test]
    fn enumerates_in_lex_order() {
        assert_eq!(words(&[1]), ["1"]);
        assert_eq!(words(&[1, 1]), ["12", "21"]);
        assert_eq!(
            words(&[2, 2]),
            ["1122", "1212", "1221", "2112", "2121", "2211"]
        );
    }

    #[test]
    fn enumeration_count_matches_multinomial() {
        for m in Multiset::all_up_to(7) {
            let count = enumerate_words(&m).count() as u128;
            assert_eq!(Some(count), m.permutation_count(), "{m}");
        }
    }

    #[test]
    fn quasi_stirling_predicate() {
        assert!(!is_quasi_stirling(&w("1212")));
        assert!(is_quasi_stirling(&w("2112")));
        assert!(is_quasi_stirling(&w("2773516455")));
        assert!(is_quasi_stirling(&w("1111")));
    }

    #[test]
    fn stirling_predicate() {
        assert!(is_stirling(&w("1221")));
        assert!(!is_stirling(&w("2112")));
        assert!(is_stirling(&w("11")));
        assert!(is_stirling(&w("111")));
        assert!(!is_stirling(&w("2773516455")));
    }

    #[test]
    fn linear_stats_examples() {
        let s = linear_stats(&w("2773516455"));
        assert_eq!((s.asc, s.des, s.plat), (5, 4, 2));
        let s = linear_stats(&w("1"));
        assert_eq!((s.asc, s.des, s.plat, s.ddes), (1, 1, 0, 0));
        let s = linear_stats(&w("1122"));
        assert_eq!((s.asc, s.des, s.plat), (2, 1, 2));
        // 0 3 2 1 0: indices 2 and 3 are double descents, index 1 is not
        assert_eq!(linear_stats(&w("321")).ddes, 2);
    }

    #[test]
    fn cyclic_profile_examples() {
        use CyclicClass::*;
        let p = cyclic_profile(&[1, 5, 3, 2, 4]);
        assert_eq!((p.cdes, p.casc), (3, 2));
        assert_eq!(
            p.classes,
            [
                Some(Valley),
                Some(Peak),
                Some(DoubleDescent),
                Some(Valley),
                Some(Peak)
            ]
        );
        assert_eq!(p.cdes_entries, BTreeSet::from([5, 3, 4]));

        let p = cyclic_profile(&[7, 7]);
        assert_eq!((p.cdes, p.casc), (0, 0));
        assert_eq!(p.classes, [None, None]);

        let p = cyclic_profile(&[0, 1, 2]);
        assert_eq!((p.cdes, p.casc), (1, 2));
        assert_eq!(p.classes, [Some(Valley), Some(DoubleAscent), Some(Peak)]);

        let p = cyclic_profile(&[4]);
        assert_eq!(
            p,
            CyclicProfile {
                classes: vec![None],
                ..Default::default()
            }
        );
    }

    #[test]
    fn factorization_examples() {
        let f = cyclic_factorization(&[1, 5, 3, 2, 4], 2).unwrap();
        assert_eq!((f.w1, f.w2, f.w3), (vec![], vec![2], vec![4, 1, 5]));

        let f = cyclic_factorization(&[0, 1, 2], 1).unwrap();
        assert_eq!((f.w1, f.w2, f.w3), (vec![0], vec![], vec![2]));

        let f = cyclic_factorization(&[0, 2, 1], 2).unwrap();
        assert_eq!((f.w1, f.w2, f.w3), (vec![], vec![0], vec![2]));
    }

    #[test]
    fn factorization_rejects_peaks_valleys_and_ties() {
        assert_eq!(
            cyclic_factorization(&[1, 5, 3, 2, 4], 1),
            Err(Error::NotDoubleCyclic(1))
        );
        assert_eq!(
            cyclic_factorization(&[1, 5, 3, 2, 4], 0),
            Err(Error::NotDoubleCyclic(0))
        );
        assert_eq!(
            cyclic_factorization(&[3, 3, 3], 1),
            Err(Error::NotDoubleCyclic(1))
        );
        assert_eq!(
            cyclic_factorization(&[0, 1], 5),
            Err(Error::NotDoubleCyclic(5))
        );
    }

    #[test]
    fn multiset_parsing() {
        let m: Multiset = "1^2 2^2".parse().unwrap();
        assert_eq!(m.multiplicities(), [2, 2]);
        let m: Multiset = "1,1,1,1,3,1,2".parse().unwrap();
        assert_eq!(m, "1 2 3 4 5^3 6 7^2".parse().unwrap());
        assert_eq!(m.total(), 10);
        let m: Multiset = "{1^2, 2^2}".parse().unwrap();
        assert_eq!(m.multiplicities(), [2, 2]);
        assert_eq!("3".parse::<Multiset>().map(|m| m.n()).ok(), None);
        assert!("1^0 2".parse::<Multiset>().is_err());
        assert!("".parse::<Multiset>().is_err());
        assert!("1^x".parse::<Multiset>().is_err());
        assert!("2,0,1".parse::<Multiset>().is_err());
        assert_eq!(m.to_string(), "1^2 2^2");
    }

    #[test]
    fn collapsed_multiset() {
        let m = Multiset::new(vec![2, 2]).unwrap();
        assert_eq!(m.collapsed().multiplicities(), [3, 1]);
        let m = Multiset::new(vec![1, 1, 1, 1, 3, 1, 2]).unwrap();
        assert_eq!(m.collapsed().multiplicities(), [4, 1, 1, 1, 1, 1, 1]);
    }

    #[test]
    fn word_text_forms() {
        assert_eq!(w("1 10 2").entries(), [1, 10, 2]);
        assert_eq!(w("2112").to_string(), "2 1 1 2");
        assert!("12a".parse::<Word>().is_err());
        assert_eq!(w("2112").multiset().unwrap().multiplicities(), [2, 2]);
        assert!(w("13").multiset().is_err());
    }

    #[test]
    fn all_up_to_is_canonical() {
        let ms: Vec<_> = Multiset::all_up_to(3)
            .into_iter()
            .map(|m| m.multiplicities().to_vec())
            .collect();
        assert_eq!(
            ms,
            [
                vec![1],
                vec![1, 1],
                vec![2],
                vec![1, 1, 1],
                vec![1, 2],
                vec![2, 1],
                vec![3]
            ]
        );
        assert_eq!(Multiset::all_up_to(8).len(), 255);
    }
}
