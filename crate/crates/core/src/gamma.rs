//! Trivariate statistic polynomials and their partial gamma expansions.
//!
//! A symmetric homogeneous `s(x, y)` of degree `d` expands uniquely in the
//! basis `(xy)^j (x+y)^(d-2j)`: the basis element for `j` is the first to
//! reach the monomial `x^j y^(d-j)`, so coefficients fall out one at a time
//! by exact elimination.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::bijection::phi;
use crate::error::{Error, Result};
use crate::poly::{Coefficient, Poly2, Poly3};
use crate::trees::{enumerate_trees, is_weakly_increasing, tree_stats};
use crate::words::{enumerate_words, is_quasi_stirling, is_stirling, linear_stats, Multiset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Quasi-Stirling words, weighted `x^asc y^des z^plat`.
    Quasi,
    /// Stirling words.
    Stirling,
    /// All trees, weighted `x^casc y^cdes z^eleaf`.
    Trees,
    /// Weakly increasing trees.
    ITrees,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::Quasi,
        Family::Stirling,
        Family::Trees,
        Family::ITrees,
    ];

    pub fn is_tree_family(self) -> bool {
        matches!(self, Family::Trees | Family::ITrees)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Quasi => "quasi",
            Family::Stirling => "stirling",
            Family::Trees => "trees",
            Family::ITrees => "itrees",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::UnknownFamily(s.into()))
    }
}

/// Exponent triples `(asc, des, plat)` or `(casc, cdes, eleaf)`, one per member.
pub fn family_statistics(m: &Multiset, family: Family) -> Vec<[u32; 3]> {
    let word_triple = |w: &crate::words::Word| {
        let s = linear_stats(w);
        [s.asc as u32, s.des as u32, s.plat as u32]
    };
    let tree_triple = |t: &crate::trees::Tree| {
        let s = tree_stats(t);
        [s.casc as u32, s.cdes as u32, s.eleaf as u32]
    };
    match family {
        Family::Quasi => enumerate_words(m)
            .filter(is_quasi_stirling)
            .map(|w| word_triple(&w))
            .collect(),
        Family::Stirling => enumerate_words(m)
            .filter(is_stirling)
            .map(|w| word_triple(&w))
            .collect(),
        Family::Trees => enumerate_trees(m).iter().map(tree_triple).collect(),
        Family::ITrees => enumerate_trees(m)
            .iter()
            .filter(|t| is_weakly_increasing(t))
            .map(tree_triple)
            .collect(),
    }
}

/// Collects monomial counts into a polynomial, converting each count exactly.
pub fn polynomial_from_triples<C: Coefficient>(triples: &[[u32; 3]]) -> Result<Poly3<C>> {
    let mut counts: HashMap<[u32; 3], usize> = HashMap::new();
    for t in triples {
        *counts.entry(*t).or_default() += 1;
    }
    let mut p = Poly3::zero();
    for (e, n) in counts {
        p.add_term(e, &C::from_count(n)?)?;
    }
    Ok(p)
}

pub fn compute_polynomial<C: Coefficient>(m: &Multiset, family: Family) -> Result<Poly3<C>> {
    polynomial_from_triples(&family_statistics(m, family))
}

/// The nonzero `s_i(x, y)` with `p = Σ s_i z^i`, by increasing `i`.
pub fn slice_by_z<C: Coefficient>(p: &Poly3<C>) -> Vec<(u32, Poly2<C>)> {
    let mut slices: BTreeMap<u32, Poly2<C>> = BTreeMap::new();
    for ([a, b, c], coeff) in p.terms() {
        slices
            .entry(*c)
            .or_default()
            .add_term([*a, *b], coeff)
            .expect("distinct monomials do not combine");
    }
    slices.into_iter().collect()
}

/// `s = Σ_j gamma[j] (xy)^j (x+y)^(degree-2j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaExpansion<C> {
    pub degree: u32,
    pub gamma: Vec<C>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GammaFailure {
    #[error("not homogeneous")]
    NonHomogeneous,
    #[error("not symmetric at x^{x_power}")]
    Asymmetric { x_power: u32 },
    #[error("gamma_{j} = {value} is negative")]
    NegativeGamma { j: u32, value: String },
    #[error("nonzero residual {residual}")]
    NonzeroResidual { residual: String },
    #[error(transparent)]
    Arithmetic(#[from] Error),
}

pub fn gamma_expand<C: Coefficient>(s: &Poly2<C>) -> Result<GammaExpansion<C>, GammaFailure> {
    if s.is_zero() {
        return Ok(GammaExpansion {
            degree: 0,
            gamma: Vec::new(),
        });
    }
    let degree = s.homogeneous_degree().ok_or(GammaFailure::NonHomogeneous)?;
    for ([a, b], c) in s.terms() {
        if s.coeff(&[*b, *a]) != *c {
            return Err(GammaFailure::Asymmetric { x_power: *a });
        }
    }
    let mut residual = s.clone();
    let mut gamma = Vec::new();
    for j in 0..=degree / 2 {
        let g = residual.coeff(&[j, degree - j]);
        if !g.is_zero() {
            let step = Poly2::gamma_basis(j, degree - 2 * j)?.checked_scale(&g)?;
            residual = residual.checked_sub(&step)?;
        }
        gamma.push(g);
    }
    if !residual.is_zero() {
        return Err(GammaFailure::NonzeroResidual {
            residual: residual.to_string(),
        });
    }
    if let Some((j, g)) = gamma.iter().enumerate().find(|(_, g)| g.is_negative()) {
        return Err(GammaFailure::NegativeGamma {
            j: j as u32,
            value: g.to_string(),
        });
    }
    Ok(GammaExpansion { degree, gamma })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartialGammaError {
    #[error("slice z^{i} has degree {found:?}, expected homogeneous degree {expected}")]
    DegreeContract {
        i: u32,
        expected: u32,
        found: Option<u32>,
    },
    #[error("slice z^{i}: {failure}")]
    Slice { i: u32, failure: GammaFailure },
}

/// `γ_{i,j}` keyed by `(i, j)`; zero entries omitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaTable<C> {
    pub entries: BTreeMap<(u32, u32), C>,
    pub k_total: usize,
    pub multiset: Option<Multiset>,
    pub family: Option<Family>,
}

impl<C: Coefficient> GammaTable<C> {
    pub fn new(k_total: usize) -> Self {
        GammaTable {
            entries: BTreeMap::new(),
            k_total,
            multiset: None,
            family: None,
        }
    }

    pub fn with_source(mut self, m: &Multiset, family: Family) -> Self {
        self.multiset = Some(m.clone());
        self.family = Some(family);
        self
    }

    pub fn get(&self, i: u32, j: u32) -> C {
        self.entries.get(&(i, j)).cloned().unwrap_or_else(C::zero)
    }

    /// Sum of all coefficients.
    pub fn total(&self) -> Result<C> {
        self.entries
            .values()
            .try_fold(C::zero(), |acc, c| acc.try_add(c))
    }

    /// `Σ γ_{i,j} z^i (xy)^j (x+y)^(K+1-i-2j)`.
    pub fn reconstruct(&self) -> Result<Poly3<C>> {
        let mut out = Poly3::zero();
        for (&(i, j), g) in &self.entries {
            let e = self.x_plus_y_power(i, j)?;
            let slice = Poly2::gamma_basis(j, e)?.checked_scale(g)?;
            out = out.checked_add(&Poly3::from_slice(&slice, i))?;
        }
        Ok(out)
    }

    fn x_plus_y_power(&self, i: u32, j: u32) -> Result<u32> {
        (self.k_total as u32 + 1)
            .checked_sub(i + 2 * j)
            .ok_or_else(|| Error::Verification(format!("γ_({i},{j}) exceeds degree K+1")))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let gamma: Vec<_> = self
            .entries
            .iter()
            .map(|(&(i, j), v)| json!({"i": i, "j": j, "value": json_integer(v)}))
            .collect();
        json!({
            "multiset": self.multiset.as_ref().map(|m| m.multiplicities().to_vec()),
            "family": self.family.map(Family::as_str),
            "K": self.k_total,
            "gamma": gamma,
        })
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Verification(e.to_string());
        w.write_record(["i", "j", "value"]).map_err(io)?;
        for (&(i, j), v) in &self.entries {
            w.write_record([i.to_string(), j.to_string(), v.to_string()])
                .map_err(io)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::Verification(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv of integers is utf-8"))
    }

    /// One line per power of `z`, mirroring the expansion layout.
    pub fn to_text(&self) -> String {
        let mut out = format!("K = {}", self.k_total);
        if let Some(m) = &self.multiset {
            out.push_str(&format!(", multiset = {{{m}}}"));
        }
        if let Some(f) = self.family {
            out.push_str(&format!(", family = {f}"));
        }
        out.push('\n');
        let mut rows: BTreeMap<u32, Vec<String>> = BTreeMap::new();
        for (&(i, j), g) in &self.entries {
            let e = self.x_plus_y_power(i, j).unwrap_or(0);
            let mut term = String::new();
            if !g.is_one() || (j == 0 && e == 0) {
                term.push_str(&g.to_string());
            }
            match j {
                0 => {}
                1 => term.push_str("(xy)"),
                _ => term.push_str(&format!("(xy)^{j}")),
            }
            match e {
                0 => {}
                1 => term.push_str("(x+y)"),
                _ => term.push_str(&format!("(x+y)^{e}")),
            }
            rows.entry(i).or_default().push(term);
        }
        for (i, terms) in rows {
            out.push_str(&format!("z^{i}: {}\n", terms.join(" + ")));
        }
        out
    }
}

fn json_integer<C: Coefficient>(v: &C) -> serde_json::Value {
    match v.to_i64() {
        Some(n) => json!(n),
        None => json!(v.to_string()),
    }
}

/// Splits `p` by powers of `z` and gamma-expands every slice, requiring slice
/// `i` to be homogeneous of degree `K+1-i`.
pub fn partial_gamma<C: Coefficient>(
    p: &Poly3<C>,
    k_total: usize,
) -> Result<GammaTable<C>, PartialGammaError> {
    let mut table = GammaTable::new(k_total);
    for (i, slice) in slice_by_z(p) {
        let expected = (k_total as u32 + 1).saturating_sub(i);
        let found = slice.homogeneous_degree();
        if found != Some(expected) {
            return Err(PartialGammaError::DegreeContract { i, expected, found });
        }
        let expansion =
            gamma_expand(&slice).map_err(|failure| PartialGammaError::Slice { i, failure })?;
        for (j, g) in expansion.gamma.into_iter().enumerate() {
            if !g.is_zero() {
                table.entries.insert((i, j as u32), g);
            }
        }
    }
    Ok(table)
}

/// Counts trees without double cyclic descents by `(eleaf, cdes)`.
pub fn gamma_from_trees<C: Coefficient>(m: &Multiset, family: Family) -> Result<GammaTable<C>> {
    if !family.is_tree_family() {
        return Err(Error::NotTreeFamily(family.to_string()));
    }
    let mut counts: BTreeMap<(u32, u32), usize> = BTreeMap::new();
    for t in enumerate_trees(m) {
        if family == Family::ITrees && !is_weakly_increasing(&t) {
            continue;
        }
        let s = tree_stats(&t);
        if s.dcdes == 0 {
            *counts.entry((s.eleaf as u32, s.cdes as u32)).or_default() += 1;
        }
    }
    let mut table = GammaTable::new(m.total()).with_source(m, family);
    for (key, n) in counts {
        table.entries.insert(key, C::from_count(n)?);
    }
    Ok(table)
}

/// Images of the tree family under `phi`, in tree enumeration order.
pub fn tree_words(m: &Multiset, family: Family) -> Result<Vec<crate::words::Word>> {
    enumerate_trees(m)
        .iter()
        .filter(|t| family != Family::ITrees || is_weakly_increasing(t))
        .map(phi)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(k: &[usize]) -> Multiset {
        Multiset::new(k.to_vec()).unwrap()
    }

    fn poly2(terms: &[([u32; 2], i64)]) -> Poly2<i64> {
        let mut p = Poly2::zero();
        for (e, c) in terms {
            p.add_term(*e, c).unwrap();
        }
        p
    }

    #[test]
    fn polynomials_of_small_families() {
        let m = ms(&[2, 2]);
        assert_eq!(
            compute_polynomial::<i64>(&m, Family::Quasi)
                .unwrap()
                .to_string(),
            "2x^2y^2z + x^2yz^2 + xy^2z^2"
        );
        assert_eq!(
            compute_polynomial::<i64>(&m, Family::Stirling)
                .unwrap()
                .to_string(),
            "x^2y^2z + x^2yz^2 + xy^2z^2"
        );
        assert_eq!(
            compute_polynomial::<i64>(&ms(&[1, 1]), Family::Trees)
                .unwrap()
                .to_string(),
            "x^2y + xy^2"
        );
    }

    #[test]
    fn mass_is_cardinality() {
        let m = ms(&[2, 1, 2]);
        for family in Family::ALL {
            let p = compute_polynomial::<i64>(&m, family).unwrap();
            assert_eq!(
                p.mass().unwrap() as usize,
                family_statistics(&m, family).len()
            );
        }
    }

    #[test]
    fn slicing() {
        let p = compute_polynomial::<i64>(&ms(&[2, 2]), Family::Quasi).unwrap();
        let slices: Vec<_> = slice_by_z(&p)
            .into_iter()
            .map(|(i, s)| (i, s.to_string()))
            .collect();
        assert_eq!(
            slices,
            [(1, "2x^2y^2".to_string()), (2, "x^2y + xy^2".to_string())]
        );
        assert!(slice_by_z(&Poly3::<i64>::zero()).is_empty());
        let mut q = Poly3::<i64>::zero();
        q.add_term([2, 1, 0], &1).unwrap();
        let slices = slice_by_z(&q);
        assert_eq!(slices.len(), 1);
        assert_eq!(
            (slices[0].0, slices[0].1.to_string()),
            (0, "x^2y".to_string())
        );
    }

    #[test]
    fn gamma_expand_examples() {
        let e = gamma_expand(&poly2(&[([2, 1], 1), ([1, 2], 1)])).unwrap();
        assert_eq!((e.degree, e.gamma), (3, vec![0, 1]));

        let cube = poly2(&[([3, 0], 1), ([2, 1], 3), ([1, 2], 3), ([0, 3], 1)]);
        let e = gamma_expand(&cube).unwrap();
        assert_eq!(e.gamma, [1, 0]);

        let err = gamma_expand(&poly2(&[([2, 0], 1), ([0, 2], 1)])).unwrap_err();
        assert_eq!(
            err,
            GammaFailure::NegativeGamma {
                j: 1,
                value: "-2".into()
            }
        );
    }

    #[test]
    fn gamma_expand_failures() {
        assert_eq!(
            gamma_expand(&poly2(&[([2, 0], 1), ([1, 0], 1)])),
            Err(GammaFailure::NonHomogeneous)
        );
        assert!(matches!(
            gamma_expand(&poly2(&[([2, 0], 1), ([1, 1], 1)])),
            Err(GammaFailure::Asymmetric { .. })
        ));
        assert_eq!(
            gamma_expand(&Poly2::<i64>::zero()).unwrap().gamma,
            Vec::<i64>::new()
        );
    }

    #[test]
    fn partial_gamma_examples() {
        let m = ms(&[2, 2]);
        let quasi = compute_polynomial::<i64>(&m, Family::Quasi).unwrap();
        let table = partial_gamma(&quasi, 4).unwrap();
        assert_eq!(table.entries, BTreeMap::from([((1, 2), 2), ((2, 1), 1)]));

        let stirling = compute_polynomial::<i64>(&m, Family::Stirling).unwrap();
        let table = partial_gamma(&stirling, 4).unwrap();
        assert_eq!(table.entries, BTreeMap::from([((1, 2), 1), ((2, 1), 1)]));

        let trees = compute_polynomial::<i64>(&ms(&[1, 1]), Family::Trees).unwrap();
        let table = partial_gamma(&trees, 2).unwrap();
        assert_eq!(table.entries, BTreeMap::from([((0, 1), 1)]));
    }

    #[test]
    fn partial_gamma_degree_contract() {
        let quasi = compute_polynomial::<i64>(&ms(&[2, 2]), Family::Quasi).unwrap();
        assert_eq!(
            partial_gamma(&quasi, 5).unwrap_err(),
            PartialGammaError::DegreeContract {
                i: 1,
                expected: 5,
                found: Some(4)
            }
        );
    }

    #[test]
    fn tree_counts() {
        let t = gamma_from_trees::<i64>(&ms(&[1, 1]), Family::Trees).unwrap();
        assert_eq!(t.entries, BTreeMap::from([((0, 1), 1)]));

        let m = ms(&[2, 2]);
        let quasi = compute_polynomial::<i64>(&m, Family::Quasi).unwrap();
        let from_trees = gamma_from_trees::<i64>(&m, Family::Trees).unwrap();
        assert_eq!(
            partial_gamma(&quasi, 4).unwrap().entries,
            from_trees.entries
        );
        assert_eq!(from_trees.reconstruct().unwrap(), quasi);

        assert_eq!(
            gamma_from_trees::<i64>(&m, Family::Quasi),
            Err(Error::NotTreeFamily("quasi".into()))
        );
    }

    #[test]
    fn table_output_forms() {
        let m = ms(&[2, 2]);
        let table = gamma_from_trees::<i64>(&m, Family::ITrees).unwrap();
        assert_eq!(table.to_csv().unwrap(), "i,j,value\n1,2,1\n2,1,1\n");
        assert_eq!(
            table.to_json().to_string(),
            r#"{"K":4,"family":"itrees","gamma":[{"i":1,"j":2,"value":1},{"i":2,"j":1,"value":1}],"multiset":[2,2]}"#
        );
        assert_eq!(
            table.to_text(),
            "K = 4, multiset = {1^2 2^2}, family = itrees\nz^1: (xy)^2\nz^2: (xy)(x+y)\n"
        );
    }

    #[test]
    fn generic_over_coefficients() {
        use num_bigint::BigInt;
        let m = ms(&[1, 2, 1]);
        let small = compute_polynomial::<i64>(&m, Family::Quasi).unwrap();
        let big = compute_polynomial::<BigInt>(&m, Family::Quasi).unwrap();
        assert_eq!(small.to_string(), big.to_string());
        let t64 = partial_gamma(&small, 4).unwrap();
        let tbig = partial_gamma(&big, 4).unwrap();
        assert_eq!(t64.to_csv().unwrap(), tbig.to_csv().unwrap());
    }
}
