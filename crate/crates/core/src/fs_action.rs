//! Valley-hopping involutions on trees and the orbits they generate.
//!
//! `psi` fixes even leaves, cyclic peaks and cyclic valleys. At a double
//! cyclic ascent or descent it reads the cyclic sequence the vertex is
//! classified in, hops the pivot across its run of smaller cyclic neighbours,
//! and reorders the sibling subtrees to match. Every other vertex keeps its
//! class; the pivot swaps between double ascent and double descent.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::poly::{Coefficient, Poly2};
use crate::trees::{
    classify_vertex, enumerate_trees, tree_stats, vertex_sequence, Tree, VertexClass, VertexRef,
};
use crate::words::{cyclic_factorization, cyclic_profile, next_permutation, rotate_to, Multiset};

/// Names a vertex independently of sibling order.
///
/// The root, the odd vertex of each value, and the `copy`-th even child of
/// that odd vertex. No action reorders the children of an odd vertex, so the
/// copy index is stable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VertexId {
    Root,
    Odd(u32),
    Even { value: u32, copy: usize },
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexId::Root => f.write_str("root"),
            VertexId::Odd(v) => write!(f, "odd {v}"),
            VertexId::Even { value, copy } => write!(f, "even {value}#{copy}"),
        }
    }
}

pub fn vertex_id(t: &Tree, u: &VertexRef) -> Result<VertexId> {
    let node = t.get(u).ok_or_else(|| Error::InvalidPath(u.clone()))?;
    Ok(match u.0.last() {
        None => VertexId::Root,
        Some(_) if u.is_odd() => VertexId::Odd(node.label),
        Some(&copy) => VertexId::Even {
            value: node.label,
            copy,
        },
    })
}

pub fn resolve(t: &Tree, id: VertexId) -> Result<VertexRef> {
    t.vertices()
        .into_iter()
        .find(|u| vertex_id(t, u).ok() == Some(id))
        .ok_or_else(|| Error::UnknownVertex(id.to_string()))
}

/// Where a non-root vertex is classified: the anchoring vertex whose sequence
/// holds it, and its slot in that sequence.
fn anchor_of(u: &VertexRef) -> (VertexRef, usize) {
    match u.0.last() {
        Some(&i) if u.is_odd() => (u.parent().expect("odd vertex has a parent"), i + 1),
        _ => (u.clone(), 0),
    }
}

/// The sequence `W_2 pivot W_1 W_3` that `psi` at `u` realizes, for a double
/// cyclic ascent or descent `u`.
fn hopped_cycle(t: &Tree, u: &VertexRef) -> Result<(VertexRef, Vec<u32>, Vec<u32>)> {
    let (anchor, slot) = anchor_of(u);
    let seq = vertex_sequence(t, &anchor)?;
    let hopped = cyclic_factorization(&seq, slot)?.hopped();
    Ok((anchor, seq, hopped))
}

fn is_double(class: VertexClass) -> bool {
    matches!(
        class,
        VertexClass::DoubleCyclicAscent | VertexClass::DoubleCyclicDescent
    )
}

pub fn psi(t: &Tree, u: &VertexRef) -> Result<Tree> {
    let class = classify_vertex(t, u)?;
    if !is_double(class) {
        return Ok(t.clone());
    }
    let (anchor, seq, hopped) = hopped_cycle(t, u)?;
    let new_seq = rotate_to(&hopped, seq[0]).expect("anchor label is in its own cycle");

    let mut out = t.clone();
    let node = out.get_mut(&anchor).expect("anchor resolved above");
    let mut pool: Vec<Option<Tree>> = std::mem::take(&mut node.children)
        .into_iter()
        .map(Some)
        .collect();
    for &label in &new_seq[1..] {
        let slot = pool
            .iter()
            .position(|c| c.as_ref().map(|c| c.label) == Some(label))
            .expect("sibling labels are distinct");
        node.children
            .push(pool[slot].take().expect("each sibling placed once"));
    }

    let post = |message: &str| Error::ActionPostcondition {
        path: u.clone(),
        message: message.into(),
    };
    if cyclic_profile(&new_seq).cdes_entries != cyclic_profile(&hopped).cdes_entries {
        return Err(post("cyclic descent set differs from the hopped cycle"));
    }
    let moved = if u.is_odd() {
        let pivot = t.get(u).expect("classified above").label;
        let slot = new_seq
            .iter()
            .position(|&l| l == pivot)
            .expect("pivot kept");
        anchor.child(slot - 1)
    } else {
        u.clone()
    };
    let toggled = match class {
        VertexClass::DoubleCyclicAscent => VertexClass::DoubleCyclicDescent,
        _ => VertexClass::DoubleCyclicAscent,
    };
    if classify_vertex(&out, &moved)? != toggled {
        return Err(post("class did not toggle"));
    }
    Ok(out)
}

pub fn psi_id(t: &Tree, id: VertexId) -> Result<Tree> {
    psi(t, &resolve(t, id)?)
}

/// Composite of `psi` over a set of vertices.
pub fn psi_set(t: &Tree, ids: &BTreeSet<VertexId>) -> Result<Tree> {
    ids.iter().try_fold(t.clone(), |acc, &id| psi_id(&acc, id))
}

/// Counts the orderings of the anchoring vertex's children whose cyclic
/// descent set matches the one `psi` at `u` must realize. `None` when `u` is
/// fixed by the action.
pub fn matching_arrangements(t: &Tree, u: &VertexRef) -> Result<Option<usize>> {
    if !is_double(classify_vertex(t, u)?) {
        return Ok(None);
    }
    let (_, seq, hopped) = hopped_cycle(t, u)?;
    let target = cyclic_profile(&hopped).cdes_entries;
    let mut children = seq[1..].to_vec();
    children.sort_unstable();
    let mut count = 0;
    let mut candidate = Vec::with_capacity(seq.len());
    loop {
        candidate.clear();
        candidate.push(seq[0]);
        candidate.extend(&children);
        if cyclic_profile(&candidate).cdes_entries == target {
            count += 1;
        }
        if !next_permutation(&mut children) {
            break;
        }
    }
    Ok(Some(count))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    /// Sorted, distinct.
    pub members: Vec<Tree>,
}

impl Orbit {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Members without double cyclic descents.
    pub fn descent_free(&self) -> Vec<&Tree> {
        self.members
            .iter()
            .filter(|t| tree_stats(t).dcdes == 0)
            .collect()
    }

    /// The unique member without double cyclic descents.
    pub fn representative(&self) -> Option<&Tree> {
        match self.descent_free().as_slice() {
            [only] => Some(only),
            _ => None,
        }
    }
}

/// Closure of `{t}` under every `psi_u`.
pub fn orbit(t: &Tree) -> Result<Orbit> {
    let mut seen = HashSet::from([t.clone()]);
    let mut queue = VecDeque::from([t.clone()]);
    while let Some(current) = queue.pop_front() {
        for u in current.vertices() {
            let next = psi(&current, &u)?;
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    let mut members: Vec<Tree> = seen.into_iter().collect();
    members.sort();
    Ok(Orbit { members })
}

/// Partitions the tree family of `m` into orbits, ordered by smallest member.
pub fn orbits(m: &Multiset) -> Result<Vec<Orbit>> {
    let mut placed = HashSet::new();
    let mut out = Vec::new();
    for t in enumerate_trees(m) {
        if placed.contains(&t) {
            continue;
        }
        let o = orbit(&t)?;
        placed.extend(o.members.iter().cloned());
        out.push(o);
    }
    out.sort_by(|a, b| a.members[0].cmp(&b.members[0]));
    Ok(out)
}

/// `Σ x^casc y^cdes` over the orbit, checked against
/// `(xy)^cdes(rep) (x+y)^(K+1-eleaf-2cdes(rep))`.
pub fn orbit_polynomial<C: Coefficient>(o: &Orbit) -> Result<Poly2<C>> {
    let rep = o.representative().ok_or_else(|| {
        Error::Verification(format!(
            "orbit has {} members without double descents",
            o.descent_free().len()
        ))
    })?;
    let mut sum = Poly2::zero();
    for t in &o.members {
        let s = tree_stats(t);
        sum.add_term([s.casc as u32, s.cdes as u32], &C::one())?;
    }
    let s = tree_stats(rep);
    let k_plus_one = rep.size();
    let exponent = k_plus_one
        .checked_sub(s.eleaf + 2 * s.cdes)
        .ok_or_else(|| Error::Verification(format!("negative (x+y) exponent at {rep}")))?;
    let expected = Poly2::gamma_basis(s.cdes as u32, exponent as u32)?;
    if sum != expected {
        return Err(Error::Verification(format!(
            "orbit of {rep} sums to {sum}, expected {expected}"
        )));
    }
    Ok(sum)
}
