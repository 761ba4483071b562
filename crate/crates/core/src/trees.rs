//! Ordered labeled trees over `{0} ∪ M`.
//!
//! A valid tree has root label 0, and every odd-level vertex labeled `i` has
//! exactly `k_i - 1` children, all labeled `i`. Each value therefore owns one
//! *gadget*: a single odd vertex plus its even children. The even children
//! carry ordered forests of further gadgets.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::rc::Rc;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::words::{cyclic_profile, CyclicClass, Multiset};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Tree {
    pub label: u32,
    #[serde(default)]
    pub children: Vec<Tree>,
}

/// Child-index path from the root; empty for the root itself.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexRef(pub Vec<usize>);

impl VertexRef {
    pub fn root() -> Self {
        VertexRef(Vec::new())
    }

    pub fn level(&self) -> usize {
        self.0.len()
    }

    pub fn is_odd(&self) -> bool {
        self.0.len() % 2 == 1
    }

    pub fn parent(&self) -> Option<VertexRef> {
        let (_, init) = self.0.split_last()?;
        Some(VertexRef(init.to_vec()))
    }

    pub fn child(&self, index: usize) -> VertexRef {
        let mut path = self.0.clone();
        path.push(index);
        VertexRef(path)
    }
}

impl fmt::Display for VertexRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

impl Tree {
    pub fn leaf(label: u32) -> Self {
        Tree {
            label,
            children: Vec::new(),
        }
    }

    pub fn new(label: u32, children: Vec<Tree>) -> Self {
        Tree { label, children }
    }

    /// A gadget for `value` whose even children carry the given forests.
    pub fn gadget(value: u32, forests: Vec<Vec<Tree>>) -> Self {
        Tree::new(
            value,
            forests.into_iter().map(|f| Tree::new(value, f)).collect(),
        )
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn get(&self, at: &VertexRef) -> Option<&Tree> {
        at.0.iter().try_fold(self, |node, &i| node.children.get(i))
    }

    pub fn get_mut(&mut self, at: &VertexRef) -> Option<&mut Tree> {
        at.0.iter()
            .try_fold(self, |node, &i| node.children.get_mut(i))
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Tree::size).sum::<usize>()
    }

    /// All vertex paths in preorder.
    pub fn vertices(&self) -> Vec<VertexRef> {
        fn walk(t: &Tree, path: &mut Vec<usize>, out: &mut Vec<VertexRef>) {
            out.push(VertexRef(path.clone()));
            for (i, c) in t.children.iter().enumerate() {
                path.push(i);
                walk(c, path, out);
                path.pop();
            }
        }
        let mut out = Vec::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    /// The multiset formed by every label except one root-level 0.
    pub fn label_multiset(&self) -> Result<Multiset> {
        let mut counts: Vec<usize> = Vec::new();
        fn walk(t: &Tree, counts: &mut Vec<usize>) {
            let v = t.label as usize;
            if counts.len() <= v {
                counts.resize(v + 1, 0);
            }
            counts[v] += 1;
            t.children.iter().for_each(|c| walk(c, counts));
        }
        walk(self, &mut counts);
        if counts.first() != Some(&1) {
            return Err(Error::InvalidMultiset(
                "label 0 must occur exactly once".into(),
            ));
        }
        Multiset::new(counts[1..].to_vec())
    }
}

impl fmt::Display for Tree {
    /// `label(child,child,...)`, leaves as bare labels.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label)?;
        if !self.children.is_empty() {
            f.write_str("(")?;
            for (i, c) in self.children.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl FromStr for Tree {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let bytes: Vec<u8> = text.bytes().filter(|b| !b.is_ascii_whitespace()).collect();
        let mut pos = 0;
        let tree = parse_node(&bytes, &mut pos)?;
        if pos != bytes.len() {
            return Err(syntax(pos, "trailing input"));
        }
        Ok(tree)
    }
}

fn syntax(offset: usize, message: &str) -> Error {
    Error::TreeSyntax {
        offset,
        message: message.into(),
    }
}

fn parse_node(bytes: &[u8], pos: &mut usize) -> Result<Tree> {
    let start = *pos;
    while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
        *pos += 1;
    }
    let label = std::str::from_utf8(&bytes[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| syntax(start, "expected a label"))?;
    let mut children = Vec::new();
    if bytes.get(*pos) == Some(&b'(') {
        *pos += 1;
        loop {
            children.push(parse_node(bytes, pos)?);
            match bytes.get(*pos) {
                Some(b',') => *pos += 1,
                Some(b')') => {
                    *pos += 1;
                    break;
                }
                _ => return Err(syntax(*pos, "expected `,` or `)`")),
            }
        }
    }
    Ok(Tree { label, children })
}

/// Which validity clause a tree breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Clause {
    /// Root must be labeled 0.
    RootLabel,
    /// An odd vertex labeled `i` must have exactly `k_i - 1` children.
    OddChildCount,
    /// Children of an odd vertex share its label.
    OddChildLabel,
    /// Labels must be exactly `{0} ∪ M`.
    LabelMultiset,
    /// Each value has exactly one odd vertex.
    UniqueOddVertex,
    /// Children of an even vertex have distinct labels, none equal to the parent's.
    EvenChildLabels,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Clause::RootLabel => "property (ii): root labeled 0",
            Clause::OddChildCount => "property (iii): odd vertex i has k_i-1 children",
            Clause::OddChildLabel => "property (iii): odd vertex children share its label",
            Clause::LabelMultiset => "property (i): labels form {0} ∪ M",
            Clause::UniqueOddVertex => "derived: one odd vertex per value",
            Clause::EvenChildLabels => "derived: even vertex children distinct",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub clause: Clause,
    pub path: VertexRef,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violated at {}", self.clause, self.path)
    }
}

/// Checks `t` against the tree family of `m`, reporting the first violation.
pub fn validate(t: &Tree, m: &Multiset) -> std::result::Result<(), Violation> {
    let fail = |clause, path: &[usize]| {
        Err(Violation {
            clause,
            path: VertexRef(path.to_vec()),
        })
    };
    if t.label != 0 {
        return fail(Clause::RootLabel, &[]);
    }

    let mut order = Vec::new();
    collect_preorder(t, &mut Vec::new(), &mut order);

    for (path, node) in &order {
        if path.len() % 2 == 1 {
            if node.children.len() + 1 != m.multiplicity(node.label) {
                return fail(Clause::OddChildCount, path);
            }
            if let Some(i) = node.children.iter().position(|c| c.label != node.label) {
                let mut p = path.clone();
                p.push(i);
                return fail(Clause::OddChildLabel, &p);
            }
        }
    }

    let mut remaining: Vec<usize> = std::iter::once(1)
        .chain(m.multiplicities().iter().copied())
        .collect();
    for (path, node) in &order {
        match remaining.get_mut(node.label as usize) {
            Some(r) if *r > 0 => *r -= 1,
            _ => return fail(Clause::LabelMultiset, path),
        }
    }
    if remaining.iter().any(|&r| r > 0) {
        return fail(Clause::LabelMultiset, &[]);
    }

    let mut seen_odd = HashSet::new();
    for (path, node) in &order {
        if path.len() % 2 == 1 && !seen_odd.insert(node.label) {
            return fail(Clause::UniqueOddVertex, path);
        }
        if path.len() % 2 == 0 {
            let mut labels = HashSet::from([node.label]);
            if let Some(i) = node.children.iter().position(|c| !labels.insert(c.label)) {
                let mut p = path.clone();
                p.push(i);
                return fail(Clause::EvenChildLabels, &p);
            }
        }
    }
    Ok(())
}

fn collect_preorder<'a>(t: &'a Tree, path: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, &'a Tree)>) {
    out.push((path.clone(), t));
    for (i, c) in t.children.iter().enumerate() {
        path.push(i);
        collect_preorder(c, path, out);
        path.pop();
    }
}

/// The vertex's own label followed by its children's labels.
pub fn vertex_sequence(t: &Tree, u: &VertexRef) -> Result<Vec<u32>> {
    let node = t.get(u).ok_or_else(|| Error::InvalidPath(u.clone()))?;
    Ok(sequence_of(node))
}

fn sequence_of(node: &Tree) -> Vec<u32> {
    std::iter::once(node.label)
        .chain(node.children.iter().map(|c| c.label))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum VertexClass {
    EvenLeaf,
    DoubleCyclicDescent,
    DoubleCyclicAscent,
    CyclicPeak,
    CyclicValley,
}

impl From<CyclicClass> for VertexClass {
    fn from(c: CyclicClass) -> Self {
        match c {
            CyclicClass::DoubleDescent => VertexClass::DoubleCyclicDescent,
            CyclicClass::DoubleAscent => VertexClass::DoubleCyclicAscent,
            CyclicClass::Peak => VertexClass::CyclicPeak,
            CyclicClass::Valley => VertexClass::CyclicValley,
        }
    }
}

/// Odd vertices take their class from their slot in the parent's sequence;
/// even non-leaves from slot 0 of their own sequence.
pub fn classify_vertex(t: &Tree, u: &VertexRef) -> Result<VertexClass> {
    let node = t.get(u).ok_or_else(|| Error::InvalidPath(u.clone()))?;
    let class = match u.0.split_last() {
        Some((&index, parent)) if u.is_odd() => {
            let parent = t
                .get(&VertexRef(parent.to_vec()))
                .expect("prefix of a valid path");
            cyclic_profile(&sequence_of(parent)).classes[index + 1]
        }
        _ if node.is_leaf() => return Ok(VertexClass::EvenLeaf),
        _ => cyclic_profile(&sequence_of(node)).classes[0],
    };
    class
        .map(VertexClass::from)
        .ok_or_else(|| Error::Unclassified(u.clone()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct TreeStats {
    pub casc: usize,
    pub cdes: usize,
    pub eleaf: usize,
    pub dcdes: usize,
    pub dcasc: usize,
    pub cpeak: usize,
    pub cval: usize,
}

impl TreeStats {
    fn count(&mut self, class: CyclicClass) {
        match class {
            CyclicClass::DoubleDescent => self.dcdes += 1,
            CyclicClass::DoubleAscent => self.dcasc += 1,
            CyclicClass::Peak => self.cpeak += 1,
            CyclicClass::Valley => self.cval += 1,
        }
    }
}

pub fn tree_stats(t: &Tree) -> TreeStats {
    fn walk(node: &Tree, odd: bool, stats: &mut TreeStats) {
        let profile = cyclic_profile(&sequence_of(node));
        stats.cdes += profile.cdes;
        stats.casc += profile.casc;
        if !odd {
            if node.is_leaf() {
                stats.eleaf += 1;
            } else {
                // slot 0 classifies this vertex, the rest classify its odd children
                profile
                    .classes
                    .iter()
                    .flatten()
                    .for_each(|&c| stats.count(c));
            }
        }
        for c in &node.children {
            walk(c, !odd, stats);
        }
    }
    let mut stats = TreeStats::default();
    walk(t, false, &mut stats);
    stats
}

/// Every parent label is at most each child label.
pub fn is_weakly_increasing(t: &Tree) -> bool {
    t.children
        .iter()
        .all(|c| t.label <= c.label && is_weakly_increasing(c))
}

/// Every tree of the family of `m`, each exactly once.
///
/// A forest on a value set `S` picks its leftmost gadget value `v`, hands
/// disjoint parts of `S \ {v}` to the `k_v - 1` even children of that gadget,
/// and builds the trailing sibling forest from what is left.
pub fn enumerate_trees(m: &Multiset) -> Vec<Tree> {
    assert!(m.n() < 64, "value sets are bitmasks");
    let full = (1u64 << m.n()) - 1;
    let mut gen = ForestGen {
        m,
        memo: HashMap::new(),
    };
    gen.forests(full)
        .iter()
        .map(|f| Tree::new(0, f.clone()))
        .collect()
}

struct ForestGen<'a> {
    m: &'a Multiset,
    memo: HashMap<u64, Rc<Vec<Vec<Tree>>>>,
}

impl ForestGen<'_> {
    fn forests(&mut self, set: u64) -> Rc<Vec<Vec<Tree>>> {
        if let Some(hit) = self.memo.get(&set) {
            return hit.clone();
        }
        let mut out = Vec::new();
        if set == 0 {
            out.push(Vec::new());
        }
        for bit in bits(set) {
            let value = bit as u32 + 1;
            let bins = self.m.multiplicity(value);
            let mut assignments = Vec::new();
            split(set & !(1 << bit), bins, &mut Vec::new(), &mut assignments);
            for parts in assignments {
                let choices: Vec<_> = parts.iter().map(|&p| self.forests(p)).collect();
                for pick in product(&choices) {
                    let (rest, inner) = pick.split_last().expect("at least one bin");
                    let gadget = Tree::gadget(value, inner.iter().map(|f| f.to_vec()).collect());
                    let mut forest = Vec::with_capacity(1 + rest.len());
                    forest.push(gadget);
                    forest.extend(rest.iter().cloned());
                    out.push(forest);
                }
            }
        }
        let out = Rc::new(out);
        self.memo.insert(set, out.clone());
        out
    }
}

fn bits(set: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |b| set >> b & 1 == 1)
}

/// Ordered splittings of `set` into `bins` disjoint (possibly empty) parts;
/// the last part takes whatever remains.
fn split(set: u64, bins: usize, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    if bins == 1 {
        prefix.push(set);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    // submasks of `set` in increasing order, starting from the empty one
    let mut sub = 0u64;
    loop {
        prefix.push(sub);
        split(set & !sub, bins - 1, prefix, out);
        prefix.pop();
        if sub == set {
            break;
        }
        sub = (sub.wrapping_sub(set)) & set;
    }
}

/// Cartesian product of forest choices, in lexicographic index order.
fn product(choices: &[Rc<Vec<Vec<Tree>>>]) -> Vec<Vec<&[Tree]>> {
    let mut acc: Vec<Vec<&[Tree]>> = vec![Vec::new()];
    for options in choices {
        acc = acc
            .into_iter()
            .flat_map(|prefix| {
                options.iter().map(move |f| {
                    let mut next = prefix.clone();
                    next.push(f.as_slice());
                    next
                })
            })
            .collect();
    }
    acc
}
