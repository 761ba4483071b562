//! Exhaustive verification suites over ranges of multisets.
//!
//! Each suite checks one family of identities on every multiset in a range.
//! Multisets are processed in parallel and merged back in canonical order
//! (by `K`, then by multiplicity sequence), so reports are deterministic and
//! the first failure listed is the smallest one.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde_json::json;

use crate::bijection::{phi, phi_inverse};
use crate::error::{Error, Result};
use crate::fs_action::{
    matching_arrangements, orbit_polynomial, orbits, psi, psi_id, resolve, vertex_id,
};
use crate::gamma::{compute_polynomial, gamma_from_trees, partial_gamma, Family};
use crate::poly::Poly3;
use crate::trees::{
    classify_vertex, enumerate_trees, is_weakly_increasing, tree_stats, validate, Tree, VertexClass,
};
use crate::words::{enumerate_words, is_quasi_stirling, is_stirling, linear_stats, Multiset, Word};

/// Largest `K` any suite accepts unless overridden.
pub const DEFAULT_CEILING: usize = 9;

/// Largest `K` whose multisets get the costly per-pair and arrangement sweeps.
const ARRANGEMENT_SWEEP_MAX_K: usize = 5;

/// Failures kept per multiset and suite; the total count is still reported.
const FAILURES_KEPT: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    Stats,
    Bijection,
    Fs,
    Observation,
    Gamma,
    MPrime,
    Equidist,
    All,
}

impl Suite {
    pub const EACH: [Suite; 7] = [
        Suite::Stats,
        Suite::Bijection,
        Suite::Observation,
        Suite::Fs,
        Suite::Gamma,
        Suite::MPrime,
        Suite::Equidist,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Stats => "stats",
            Suite::Bijection => "bijection",
            Suite::Fs => "fs",
            Suite::Observation => "observation",
            Suite::Gamma => "gamma",
            Suite::MPrime => "mprime",
            Suite::Equidist => "equidist",
            Suite::All => "all",
        }
    }

    pub fn default_range(self) -> Range {
        match self {
            Suite::Fs => Range::MaxTotal(7),
            Suite::Equidist => Range::MaxN(4),
            _ => Range::MaxTotal(8),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown suite `{s}`")))
    }
}

/// Which multisets a suite runs over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Range {
    /// Every multiset with `K <= bound`.
    MaxTotal(usize),
    /// `{1^2, ..., m^2}` for `m <= bound`; only meaningful for `equidist`.
    MaxN(usize),
    Single(Multiset),
}

impl fmt::Display for Range {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Range::MaxTotal(k) => write!(f, "K<={k}"),
            Range::MaxN(n) => write!(f, "n<={n}"),
            Range::Single(m) => write!(f, "{{{m}}}"),
        }
    }
}

impl FromStr for Range {
    type Err = Error;

    /// `K<=7`, `n<=3`, or a single multiset in any accepted form.
    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bound = |rest: &str| {
            rest.parse::<usize>()
                .map_err(|_| Error::Usage(format!("malformed range `{s}`")))
        };
        if let Some(rest) = compact.strip_prefix("K<=") {
            return Ok(Range::MaxTotal(bound(rest)?));
        }
        if let Some(rest) = compact.strip_prefix("n<=") {
            return Ok(Range::MaxN(bound(rest)?));
        }
        s.parse().map(Range::Single)
    }
}

impl Range {
    fn multisets(&self, suite: Suite) -> Result<Vec<Multiset>> {
        let squares = |n: usize| {
            (1..=n)
                .map(|i| Multiset::uniform(i, 2))
                .collect::<Result<Vec<_>>>()
        };
        match (suite, self) {
            (Suite::Equidist, Range::MaxN(n)) => squares(*n),
            (Suite::Equidist, Range::MaxTotal(k)) => squares(k / 2),
            (Suite::Equidist, Range::Single(m)) if m.multiplicities().iter().all(|&k| k == 2) => {
                Ok(vec![m.clone()])
            }
            (Suite::Equidist, Range::Single(m)) => Err(Error::Usage(format!(
                "equidist runs on {{1^2 ... n^2}}, not {{{m}}}"
            ))),
            (_, Range::MaxTotal(k)) => Ok(Multiset::all_up_to(*k)),
            (_, Range::Single(m)) => Ok(vec![m.clone()]),
            (_, Range::MaxN(_)) => Err(Error::Usage(format!(
                "suite `{suite}` takes a `K<=` bound or a single multiset"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub id: String,
    pub multiset: Multiset,
    pub witness: String,
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub suite: String,
    pub range: String,
    pub multisets: usize,
    pub checks: u64,
    pub failures: Vec<Failure>,
    /// Failures beyond those kept in `failures`.
    pub failures_dropped: u64,
    /// Observations that are not failures, e.g. non-unique rearrangements.
    pub notes: Vec<String>,
    pub millis: u128,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let failures: Vec<_> = self
            .failures
            .iter()
            .map(|f| {
                json!({
                    "id": f.id,
                    "multiset": f.multiset.multiplicities(),
                    "witness": f.witness,
                })
            })
            .collect();
        json!({
            "suite": self.suite,
            "range": self.range,
            "checks": self.checks,
            "failures": failures,
            "millis": self.millis,
        })
    }

    pub fn to_text(&self) -> String {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let mut out = format!(
            "{status} {} over {} ({} multisets): {} checks, {} failures, {} ms\n",
            self.suite,
            self.range,
            self.multisets,
            self.checks,
            self.failures.len() as u64 + self.failures_dropped,
            self.millis
        );
        for f in &self.failures {
            out.push_str(&format!(
                "  failure {} on {{{}}}: {}\n",
                f.id, f.multiset, f.witness
            ));
        }
        for n in &self.notes {
            out.push_str(&format!("  note: {n}\n"));
        }
        out
    }
}

/// Per-multiset tally.
#[derive(Default)]
struct Checker {
    checks: u64,
    failures: Vec<(String, String)>,
    dropped: u64,
    notes: Vec<String>,
}

impl Checker {
    fn check(&mut self, id: &str, ok: bool, witness: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.fail(id, witness());
        }
    }

    fn fail(&mut self, id: &str, witness: String) {
        if self.failures.len() < FAILURES_KEPT {
            self.failures.push((id.to_string(), witness));
        } else {
            self.dropped += 1;
        }
    }

    /// Records an error as a failure; `None` lets the caller skip dependents.
    fn ok<T>(&mut self, id: &str, result: Result<T>) -> Option<T> {
        self.checks += 1;
        match result {
            Ok(v) => Some(v),
            Err(e) => {
                self.fail(id, e.to_string());
                None
            }
        }
    }
}

/// Runs `suite` over `range`, refusing multisets with `K > ceiling`.
pub fn run_verify(suite: Suite, range: &Range, ceiling: usize) -> Result<VerifyReport> {
    let start = Instant::now();
    let suites: Vec<Suite> = match suite {
        Suite::All => Suite::EACH.to_vec(),
        s => vec![s],
    };
    let mut plan = Vec::new();
    let mut skipped = Vec::new();
    for s in &suites {
        let multisets = match range.multisets(*s) {
            // `all` drops suites that do not apply to the range
            Err(Error::Usage(why)) if suite == Suite::All => {
                skipped.push(format!("{s}: skipped, {why}"));
                continue;
            }
            r => r?,
        };
        if let Some(m) = multisets.iter().find(|m| m.total() > ceiling) {
            return Err(Error::Usage(format!(
                "{{{m}}} has K = {} above the ceiling {ceiling}",
                m.total()
            )));
        }
        plan.push((*s, multisets));
    }

    let mut report = VerifyReport {
        suite: suite.name().to_string(),
        range: range.to_string(),
        multisets: 0,
        checks: 0,
        failures: Vec::new(),
        failures_dropped: 0,
        notes: skipped,
        millis: 0,
    };
    for (s, multisets) in plan {
        let tallies: Vec<Checker> = multisets.par_iter().map(|m| run_one(s, m)).collect();
        report.multisets += multisets.len();
        let mut notes = BTreeMap::new();
        for (m, tally) in multisets.iter().zip(tallies) {
            report.checks += tally.checks;
            report.failures_dropped += tally.dropped;
            for (id, witness) in tally.failures {
                let id = if suite == Suite::All {
                    format!("{s}.{id}")
                } else {
                    id
                };
                report.failures.push(Failure {
                    id,
                    multiset: m.clone(),
                    witness,
                });
            }
            for n in tally.notes {
                *notes.entry(n).or_insert(0usize) += 1;
            }
        }
        for (n, count) in notes {
            report.notes.push(format!("{s}: {n} ({count} multisets)"));
        }
    }
    report.millis = start.elapsed().as_millis();
    Ok(report)
}

fn run_one(suite: Suite, m: &Multiset) -> Checker {
    let mut c = Checker::default();
    match suite {
        Suite::Stats => check_stats(m, &mut c),
        Suite::Bijection => check_bijection(m, &mut c),
        Suite::Observation => check_observation(m, &mut c),
        Suite::Fs => check_fs(m, &mut c),
        Suite::Gamma => check_gamma(m, &mut c),
        Suite::MPrime => check_mprime(m, &mut c),
        Suite::Equidist => check_equidist(m, &mut c),
        Suite::All => unreachable!("expanded by run_verify"),
    }
    c
}

fn check_stats(m: &Multiset, c: &mut Checker) {
    let k = m.total();
    let words: Vec<Word> = enumerate_words(m).collect();
    c.check(
        "count",
        Some(words.len() as u128) == m.permutation_count(),
        || {
            format!(
                "{} words, expected {:?}",
                words.len(),
                m.permutation_count()
            )
        },
    );
    c.check("lex-order", words.windows(2).all(|p| p[0] < p[1]), || {
        "words not strictly increasing".into()
    });
    let (mut quasi, mut stirling) = (Vec::new(), Vec::new());
    for w in &words {
        let s = linear_stats(w);
        c.check("sum", s.asc + s.des + s.plat == k + 1, || {
            format!("{w}: {s:?}")
        });
        c.check("ddes", s.ddes <= s.des, || format!("{w}: {s:?}"));
        c.check("permutation", w.is_permutation_of(m), || w.to_string());
        let (q, st) = (is_quasi_stirling(w), is_stirling(w));
        c.check("stirling-in-quasi", !st || q, || w.to_string());
        if q {
            quasi.push(w.to_string());
        }
        if st {
            stirling.push(w.to_string());
        }
    }
    if m.multiplicities() == [2, 2] {
        let expect = |ws: &[&str]| {
            ws.iter()
                .map(|w| w.parse::<Word>().unwrap().to_string())
                .collect::<Vec<_>>()
        };
        c.check(
            "listed-quasi",
            quasi == expect(&["1122", "1221", "2112", "2211"]),
            || format!("{quasi:?}"),
        );
        c.check(
            "listed-stirling",
            stirling == expect(&["1122", "1221", "2211"]),
            || format!("{stirling:?}"),
        );
    }
}

fn check_bijection(m: &Multiset, c: &mut Checker) {
    let trees = enumerate_trees(m);
    let quasi: Vec<Word> = enumerate_words(m).filter(is_quasi_stirling).collect();
    let stirling: Vec<Word> = quasi.iter().filter(|w| is_stirling(w)).cloned().collect();
    let mut image = Vec::with_capacity(trees.len());
    let mut increasing_image = Vec::new();
    for t in &trees {
        c.check("valid", validate(t, m).is_ok(), || t.to_string());
        let Some(w) = c.ok("phi", phi(t)) else {
            continue;
        };
        c.check("image-quasi", is_quasi_stirling(&w), || {
            format!("{t} -> {w}")
        });
        let back = phi_inverse(&w);
        c.check("round-trip", back.as_ref() == Ok(t), || {
            format!("{t} -> {w} -> {back:?}")
        });
        let (ts, ls) = (tree_stats(t), linear_stats(&w));
        c.check(
            "transport",
            (ts.cdes, ts.casc, ts.eleaf) == (ls.des, ls.asc, ls.plat),
            || format!("{t} {ts:?} vs {w} {ls:?}"),
        );
        let increasing = is_weakly_increasing(t);
        c.check("restriction", increasing == is_stirling(&w), || {
            format!("{t} increasing={increasing} -> {w}")
        });
        if increasing {
            increasing_image.push(w.clone());
        }
        image.push(w);
    }
    image.sort();
    increasing_image.sort();
    let distinct = image.windows(2).all(|p| p[0] != p[1]);
    c.check("injective", distinct, || "two trees share an image".into());
    c.check("onto-quasi", image == quasi, || {
        format!(
            "{} images vs {} quasi-Stirling words",
            image.len(),
            quasi.len()
        )
    });
    c.check("onto-stirling", increasing_image == stirling, || {
        format!(
            "{} images vs {} Stirling words",
            increasing_image.len(),
            stirling.len()
        )
    });

    // independent route: decode every quasi-Stirling word
    let mut decoded = Vec::with_capacity(quasi.len());
    for w in &quasi {
        if let Some(t) = c.ok("phi-inverse", phi_inverse(w)) {
            decoded.push(t);
        }
    }
    decoded.sort();
    let mut direct = trees.clone();
    direct.sort();
    c.check("two-oracle-trees", decoded == direct, || {
        let first_diff = decoded.iter().zip(&direct).find(|(a, b)| a != b);
        format!(
            "{} decoded vs {} generated; first difference {first_diff:?}",
            decoded.len(),
            direct.len()
        )
    });
}

fn check_observation(m: &Multiset, c: &mut Checker) {
    let k = m.total();
    for t in enumerate_trees(m) {
        let s = tree_stats(&t);
        c.check("valid", validate(&t, m).is_ok(), || t.to_string());
        c.check(
            "eq1",
            s.eleaf + s.dcdes + s.dcasc + s.cpeak + s.cval == k + 1,
            || format!("{t}: {s:?}"),
        );
        c.check("eq2", s.cpeak == s.cval, || format!("{t}: {s:?}"));
        c.check("eq3", s.cdes == s.cval + s.dcdes, || format!("{t}: {s:?}"));
        c.check("eq4", s.casc == s.cpeak + s.dcasc, || format!("{t}: {s:?}"));
        c.check("eleaf-range", s.eleaf <= k - m.n(), || {
            format!("{t}: {s:?}")
        });
    }
}

fn is_double(class: VertexClass) -> bool {
    matches!(
        class,
        VertexClass::DoubleCyclicAscent | VertexClass::DoubleCyclicDescent
    )
}

fn check_fs(m: &Multiset, c: &mut Checker) {
    let trees = enumerate_trees(m);
    let mut ambiguous = 0usize;
    for t in &trees {
        let before = tree_stats(t);
        let increasing = is_weakly_increasing(t);
        let vertices = t.vertices();
        let mut ids = Vec::with_capacity(vertices.len());
        for u in &vertices {
            let Some(id) = c.ok("vertex-id", vertex_id(t, u)) else {
                continue;
            };
            ids.push(id);
            let Some(class) = c.ok("classify", classify_vertex(t, u)) else {
                continue;
            };
            let Some(moved) = c.ok("psi", psi(t, u)) else {
                continue;
            };
            let w = || format!("{t} at {u}");
            c.check("closure", validate(&moved, m).is_ok(), w);
            c.check(
                "closure-increasing",
                is_weakly_increasing(&moved) == increasing,
                w,
            );
            let after = tree_stats(&moved);
            c.check(
                "invariance",
                (after.eleaf, after.cpeak, after.cval) == (before.eleaf, before.cpeak, before.cval),
                w,
            );
            let back = psi_id(&moved, id);
            c.check("involution", back.as_ref() == Ok(t), w);
            if is_double(class) {
                let toggled = resolve(&moved, id).and_then(|v| classify_vertex(&moved, &v));
                let expect = match class {
                    VertexClass::DoubleCyclicAscent => VertexClass::DoubleCyclicDescent,
                    _ => VertexClass::DoubleCyclicAscent,
                };
                c.check("toggle", toggled == Ok(expect), w);
                if m.total() <= ARRANGEMENT_SWEEP_MAX_K {
                    if let Ok(Some(n)) = matching_arrangements(t, u) {
                        ambiguous += usize::from(n > 1);
                    }
                }
            } else {
                c.check("fixed", moved == *t, w);
            }
        }
        for (a, &u) in ids.iter().enumerate() {
            for &v in &ids[a + 1..] {
                let uv = psi_id(t, u).and_then(|x| psi_id(&x, v));
                let vu = psi_id(t, v).and_then(|x| psi_id(&x, u));
                c.check("commute", uv.is_ok() && uv == vu, || {
                    format!("{t} at {u}, {v}")
                });
            }
        }
    }
    if ambiguous > 0 {
        c.notes.push(format!(
            "non-unique sibling orders satisfy the cyclic descent condition \
             (found at {ambiguous} vertex applications)"
        ));
    }

    let Some(all) = c.ok("orbits", orbits(m)) else {
        return;
    };
    let mut owner: HashMap<&Tree, usize> = HashMap::new();
    for (i, o) in all.iter().enumerate() {
        for t in &o.members {
            let previous = owner.insert(t, i);
            c.check("partition-disjoint", previous.is_none(), || t.to_string());
        }
        let rep = o.representative();
        c.check("unique-representative", rep.is_some(), || {
            format!(
                "orbit of {} has {} descent-free members",
                o.members[0],
                o.descent_free().len()
            )
        });
        let Some(rep) = rep else { continue };
        let rs = tree_stats(rep);
        let constant = o.members.iter().all(|t| {
            let s = tree_stats(t);
            (s.eleaf, s.cpeak, s.cval) == (rs.eleaf, rs.cpeak, rs.cval)
        });
        c.check("orbit-invariants", constant, || rep.to_string());
        c.check("orbit-size", o.len() == 1 << rs.dcasc, || {
            format!("orbit of {rep} has {} members, dcasc {}", o.len(), rs.dcasc)
        });
        c.ok("orbit-sum", orbit_polynomial::<i64>(o));
    }
    let covered: HashSet<&Tree> = owner.keys().copied().collect();
    c.check(
        "partition-cover",
        covered.len() == trees.len() && trees.iter().all(|t| covered.contains(t)),
        || format!("{} trees, {} covered", trees.len(), covered.len()),
    );
    if let Some(table) = c.ok(
        "gamma-from-trees",
        gamma_from_trees::<i64>(m, Family::Trees),
    ) {
        let total = table.total().unwrap_or(-1);
        c.check("orbit-count", total == all.len() as i64, || {
            format!("{} orbits, γ total {total}", all.len())
        });
    }
}

fn check_gamma(m: &Multiset, c: &mut Checker) {
    let k = m.total();
    let mut polys: BTreeMap<Family, Poly3<i64>> = BTreeMap::new();
    let mut tables = BTreeMap::new();
    for family in Family::ALL {
        let Some(p) = c.ok(
            &format!("poly-{family}"),
            compute_polynomial::<i64>(m, family),
        ) else {
            continue;
        };
        match partial_gamma(&p, k) {
            Ok(table) => {
                c.checks += 1;
                let max_i = table
                    .entries
                    .keys()
                    .map(|&(i, _)| i as usize)
                    .max()
                    .unwrap_or(0);
                c.check(&format!("z-range-{family}"), max_i <= k - m.n(), || {
                    format!("z^{max_i} exceeds K-n = {}", k - m.n())
                });
                let nonneg = table.entries.values().all(|&g| g >= 0);
                c.check(&format!("nonnegative-{family}"), nonneg, || {
                    format!("{:?}", table.entries)
                });
                let rebuilt = table.reconstruct();
                c.check(
                    &format!("reconstruct-{family}"),
                    rebuilt.as_ref() == Ok(&p),
                    || format!("{p} rebuilt as {rebuilt:?}"),
                );
                if table.entries.keys().any(|&(_, j)| j == 0) {
                    c.notes
                        .push(format!("{family} table has a nonzero j = 0 coefficient"));
                }
                tables.insert(family, table.entries);
            }
            Err(e) => {
                c.checks += 1;
                c.fail(&format!("partial-gamma-{family}"), format!("{p}: {e}"));
            }
        }
        polys.insert(family, p);
    }
    for (words, trees) in [
        (Family::Quasi, Family::Trees),
        (Family::Stirling, Family::ITrees),
    ] {
        c.check(
            &format!("bridge-{words}-{trees}"),
            polys.get(&words) == polys.get(&trees),
            || {
                format!(
                    "{:?} vs {:?}",
                    polys.get(&words).map(|p| p.to_string()),
                    polys.get(&trees).map(|p| p.to_string())
                )
            },
        );
        let Some(counted) = c.ok(&format!("count-{trees}"), gamma_from_trees::<i64>(m, trees))
        else {
            continue;
        };
        for family in [words, trees] {
            c.check(
                &format!("tree-count-{family}"),
                tables.get(&family) == Some(&counted.entries),
                || {
                    format!(
                        "expanded {:?} vs counted {:?}",
                        tables.get(&family),
                        counted.entries
                    )
                },
            );
        }
    }
}

fn check_mprime(m: &Multiset, c: &mut Checker) {
    let collapsed = m.collapsed();
    let quasi = compute_polynomial::<i64>(m, Family::Quasi);
    let quasi_c = compute_polynomial::<i64>(&collapsed, Family::Quasi);
    let stirling_c = compute_polynomial::<i64>(&collapsed, Family::Stirling);
    let show = |p: &Result<Poly3<i64>>| {
        p.as_ref()
            .map(|p| p.to_string())
            .unwrap_or_else(|e| e.to_string())
    };
    c.check("collapse", quasi.is_ok() && quasi == quasi_c, || {
        format!(
            "{{{m}}}: {} vs {{{collapsed}}}: {}",
            show(&quasi),
            show(&quasi_c)
        )
    });
    c.check(
        "collapsed-stirling",
        quasi_c.is_ok() && quasi_c == stirling_c,
        || format!("quasi {} vs stirling {}", show(&quasi_c), show(&stirling_c)),
    );
    let same_words = enumerate_words(&collapsed).all(|w| is_quasi_stirling(&w) == is_stirling(&w));
    c.check("collapsed-words", same_words, || {
        format!("quasi-Stirling and Stirling words of {{{collapsed}}} differ")
    });
}

fn check_equidist(m: &Multiset, c: &mut Checker) {
    let n = m.n() as u128;
    let stirling: Vec<Word> = enumerate_words(m).filter(is_stirling).collect();
    let double_factorial: u128 = (1..=n).map(|i| 2 * i - 1).product();
    c.check("count", stirling.len() as u128 == double_factorial, || {
        format!(
            "{} Stirling words, expected {double_factorial}",
            stirling.len()
        )
    });
    let mut hist = [BTreeMap::new(), BTreeMap::new(), BTreeMap::new()];
    for w in &stirling {
        let s = linear_stats(w);
        for (h, v) in hist.iter_mut().zip([s.asc, s.des, s.plat]) {
            *h.entry(v).or_insert(0usize) += 1;
        }
    }
    c.check("asc-des", hist[0] == hist[1], || {
        format!("{:?} vs {:?}", hist[0], hist[1])
    });
    c.check("asc-plat", hist[0] == hist[2], || {
        format!("{:?} vs {:?}", hist[0], hist[2])
    });
}
