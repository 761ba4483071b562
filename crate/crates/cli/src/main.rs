//! `qstirling`: enumerate quasi-Stirling words and trees, compute their
//! statistic polynomials and gamma tables, and run verification suites.
//!
//! Exit status: 0 on success, 1 when a verification fails, 2 on bad input.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use qstirling::fs_action::{orbit_polynomial, orbits};
use qstirling::gamma::{compute_polynomial, gamma_from_trees, partial_gamma};
use qstirling::trees::{enumerate_trees, is_weakly_increasing, tree_stats};
use qstirling::verify::{run_verify, Range, Suite, DEFAULT_CEILING};
use qstirling::words::{enumerate_words, is_quasi_stirling, is_stirling};
use qstirling::{BigInt, Coefficient, Error, Family, Multiset, Poly3};

#[derive(Parser)]
#[command(name = "qstirling", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    All,
    Quasi,
    Stirling,
    Trees,
    Itrees,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    /// Gamma-expand the statistic polynomial.
    Expand,
    /// Count trees without double cyclic descents.
    Count,
}

#[derive(clap::Args)]
struct Common {
    /// Multiset as `1^2 2^2 3` or as multiplicities `2,2,1`.
    #[arg(long, short)]
    multiset: String,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Statistic polynomial of a family.
    Poly {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "quasi")]
        family: String,
        /// Use arbitrary-precision coefficients.
        #[arg(long)]
        big: bool,
    },
    /// Partial gamma table of a family.
    Gamma {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "quasi")]
        family: String,
        #[arg(long, value_enum, default_value = "expand")]
        method: Method,
        #[arg(long)]
        big: bool,
    },
    /// List words or trees in deterministic order.
    Enumerate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "quasi")]
        kind: Kind,
    },
    /// Orbits of the tree family under the valley-hopping action.
    Orbit {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "trees")]
        family: String,
    },
    /// Run a verification suite.
    Verify {
        /// stats, bijection, fs, observation, gamma, mprime, equidist or all.
        suite: String,
        /// `K<=8`, `n<=4`, or a single multiset; defaults per suite.
        #[arg(long)]
        range: Option<String>,
        /// Refuse multisets larger than this.
        #[arg(long = "max-K", env = "QSTIRLING_MAX_K", default_value_t = DEFAULT_CEILING)]
        max_k: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A failed check, as opposed to bad input.
#[derive(Debug)]
struct CheckFailed(String);

impl std::fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CheckFailed {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<CheckFailed>() => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Poly {
            common,
            family,
            big,
        } => {
            let (m, family) = (parse_multiset(&common)?, family.parse::<Family>()?);
            let text = if big {
                render_poly(
                    &compute_polynomial::<BigInt>(&m, family)?,
                    &m,
                    family,
                    common.format,
                )?
            } else {
                render_poly(
                    &compute_polynomial::<i64>(&m, family)?,
                    &m,
                    family,
                    common.format,
                )?
            };
            emit(&common.out, &text)
        }
        Command::Gamma {
            common,
            family,
            method,
            big,
        } => {
            let (m, family) = (parse_multiset(&common)?, family.parse::<Family>()?);
            let text = if big {
                render_gamma::<BigInt>(&m, family, method, common.format)?
            } else {
                render_gamma::<i64>(&m, family, method, common.format)?
            };
            emit(&common.out, &text)
        }
        Command::Enumerate { common, kind } => {
            let m = parse_multiset(&common)?;
            emit(&common.out, &render_enumeration(&m, kind, common.format)?)
        }
        Command::Orbit { common, family } => {
            let (m, family) = (parse_multiset(&common)?, family.parse::<Family>()?);
            if !family.is_tree_family() {
                return Err(Error::NotTreeFamily(family.to_string()).into());
            }
            emit(&common.out, &render_orbits(&m, family, common.format)?)
        }
        Command::Verify {
            suite,
            range,
            max_k,
            format,
            out,
        } => {
            let suite: Suite = suite.parse()?;
            let range = match range {
                Some(r) => r.parse::<Range>()?,
                None => suite.default_range(),
            };
            let report = run_verify(suite, &range, max_k)?;
            let text = match format {
                Format::Json => format!("{}\n", serde_json::to_string_pretty(&report.to_json())?),
                Format::Text => report.to_text(),
                Format::Csv => anyhow::bail!("verify reports are text or json"),
            };
            emit(&out, &text)?;
            if report.passed() {
                Ok(())
            } else {
                Err(CheckFailed(format!("{suite}: {} failures", report.failures.len())).into())
            }
        }
    }
}

fn parse_multiset(common: &Common) -> anyhow::Result<Multiset> {
    common
        .multiset
        .parse()
        .with_context(|| format!("parsing multiset `{}`", common.multiset))
}

fn emit(out: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn csv_rows<I, R>(header: &[&str], rows: I) -> anyhow::Result<String>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn json_integer<C: Coefficient>(v: &C) -> serde_json::Value {
    v.to_i64()
        .map_or_else(|| json!(v.to_string()), |n| json!(n))
}

fn render_poly<C: Coefficient>(
    p: &Poly3<C>,
    m: &Multiset,
    family: Family,
    format: Format,
) -> anyhow::Result<String> {
    Ok(match format {
        Format::Text => format!("{p}\n"),
        Format::Json => {
            let terms: Vec<_> = p
                .terms_grlex()
                .into_iter()
                .map(|([a, b, c], v)| json!({"x": a, "y": b, "z": c, "coeff": json_integer(v)}))
                .collect();
            let doc = json!({
                "multiset": m.multiplicities(),
                "family": family.as_str(),
                "K": m.total(),
                "terms": terms,
            });
            format!("{}\n", serde_json::to_string_pretty(&doc)?)
        }
        Format::Csv => csv_rows(
            &["x", "y", "z", "coeff"],
            p.terms_grlex()
                .into_iter()
                .map(|([a, b, c], v)| [a.to_string(), b.to_string(), c.to_string(), v.to_string()]),
        )?,
    })
}

fn render_gamma<C: Coefficient>(
    m: &Multiset,
    family: Family,
    method: Method,
    format: Format,
) -> anyhow::Result<String> {
    let table = match method {
        Method::Count => gamma_from_trees::<C>(m, family)?,
        Method::Expand => {
            let p = compute_polynomial::<C>(m, family)?;
            partial_gamma(&p, m.total())
                .map_err(|e| CheckFailed(format!("{family} polynomial {p}: {e}")))?
                .with_source(m, family)
        }
    };
    Ok(match format {
        Format::Text => table.to_text(),
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&table.to_json())?),
        Format::Csv => table.to_csv()?,
    })
}

fn render_enumeration(m: &Multiset, kind: Kind, format: Format) -> anyhow::Result<String> {
    let items: Vec<(String, serde_json::Value)> = match kind {
        Kind::All | Kind::Quasi | Kind::Stirling => enumerate_words(m)
            .filter(|w| match kind {
                Kind::Quasi => is_quasi_stirling(w),
                Kind::Stirling => is_stirling(w),
                _ => true,
            })
            .map(|w| (w.to_string(), json!(w.entries())))
            .collect(),
        Kind::Trees | Kind::Itrees => enumerate_trees(m)
            .into_iter()
            .filter(|t| matches!(kind, Kind::Trees) || is_weakly_increasing(t))
            .map(|t| Ok((t.to_string(), serde_json::to_value(&t)?)))
            .collect::<anyhow::Result<_>>()?,
    };
    let column = if matches!(kind, Kind::Trees | Kind::Itrees) {
        "tree"
    } else {
        "word"
    };
    Ok(match format {
        Format::Text => items.iter().map(|(s, _)| format!("{s}\n")).collect(),
        Format::Json => {
            let values: Vec<_> = items.into_iter().map(|(_, v)| v).collect();
            format!("{}\n", serde_json::to_string(&values)?)
        }
        Format::Csv => csv_rows(&[column], items.into_iter().map(|(s, _)| [s]))?,
    })
}

fn render_orbits(m: &Multiset, family: Family, format: Format) -> anyhow::Result<String> {
    let mut records = Vec::new();
    for o in orbits(m)? {
        let rep = o.representative().ok_or_else(|| {
            CheckFailed(format!(
                "orbit of {} has no unique representative",
                o.members[0]
            ))
        })?;
        if family == Family::ITrees && !is_weakly_increasing(rep) {
            continue;
        }
        let poly = orbit_polynomial::<i64>(&o).map_err(|e| CheckFailed(e.to_string()))?;
        let s = tree_stats(rep);
        records.push((o.len(), rep.to_string(), s.cdes, s.eleaf, poly.to_string()));
    }
    Ok(match format {
        Format::Text => records
            .iter()
            .map(|(size, rep, cdes, eleaf, poly)| {
                format!("size={size} rep={rep} cdes={cdes} eleaf={eleaf} poly={poly}\n")
            })
            .collect(),
        Format::Json => {
            let docs: Vec<_> = records
                .iter()
                .map(|(size, rep, cdes, eleaf, poly)| {
                    json!({
                        "size": size,
                        "representative": rep,
                        "cdes": cdes,
                        "eleaf": eleaf,
                        "polynomial": poly,
                    })
                })
                .collect();
            format!("{}\n", serde_json::to_string_pretty(&docs)?)
        }
        Format::Csv => csv_rows(
            &["size", "representative", "cdes", "eleaf", "polynomial"],
            records.into_iter().map(|(size, rep, cdes, eleaf, poly)| {
                [
                    size.to_string(),
                    rep,
                    cdes.to_string(),
                    eleaf.to_string(),
                    poly,
                ]
            }),
        )?,
    })
}
