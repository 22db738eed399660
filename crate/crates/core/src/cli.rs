//! Command-line front end: presentation parsing, export formats and the
//! subcommands of the `charvar` binary.

use std::fmt::Write as _;
use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groebner::{
    buchberger_with_limit, radical_equal_with_limit, GroebnerError, PolynomialIdeal,
    DEFAULT_PAIR_LIMIT,
};
use crate::numeric::{
    check_vanishing, check_vanishing_with, jacobian_independence, sample_representation,
    NumericError,
};
use crate::poly::{
    Monomial, MonomialOrder, OrderKind, PolyError, Rational, TracePolynomial, TraceVariable,
};
use crate::relations::{
    full_presentation, generators, psl2_generators, CharVarietyPresentation, GroupPresentation,
    RelationError,
};
use crate::traces::reduce_trace;
use crate::words::{FreeWord, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("expected '<generators | relators>'")]
    Syntax,
    #[error("empty generator list")]
    EmptyGenerators,
    #[error("generator {0:?} is not a single lowercase letter")]
    BadGenerator(String),
    #[error("duplicate generator {0:?}")]
    DuplicateGenerator(char),
    #[error("relator {relator:?} uses unknown letter {letter:?}")]
    UnknownLetter { relator: String, letter: char },
    #[error("empty relator")]
    EmptyRelator,
    #[error("missing {0:?} header")]
    MissingHeader(&'static str),
    #[error(transparent)]
    Relation(#[from] RelationError),
}

/// Parses `<a,b | abab, aB>`. Generators are lowercase letters numbered by
/// position; the uppercase letter is the inverse.
pub fn parse_presentation(text: &str) -> Result<GroupPresentation, ParseError> {
    let inner = text
        .trim()
        .strip_prefix('<')
        .and_then(|t| t.strip_suffix('>'))
        .ok_or(ParseError::Syntax)?;
    let (gens, rels) = inner.split_once('|').ok_or(ParseError::Syntax)?;
    let gens: Vec<&str> = gens.split(',').map(str::trim).collect();
    let gens = letters_of(&gens)?;
    let rels = rels.trim();
    let relators: Vec<&str> = if rels.is_empty() {
        Vec::new()
    } else {
        rels.split(',').map(str::trim).collect()
    };
    build(&gens, &relators)
}

/// Parses one or more SnapPy `fundamental_group()` printouts:
///
/// ```text
/// Generators:
///    a,b
/// Relators:
///    aabbaaBaB
///    aabbAbAbb
/// ```
pub fn parse_snappy(text: &str) -> Result<Vec<GroupPresentation>, ParseError> {
    const GENS: &str = "Generators:";
    const RELS: &str = "Relators:";
    if !text.contains(GENS) {
        return Err(ParseError::MissingHeader(GENS));
    }
    // Anything before the first header is ignored.
    let mut blocks = text.split(GENS);
    blocks.next();
    let mut out = Vec::new();
    for block in blocks {
        let (gens, rels) = block
            .split_once(RELS)
            .ok_or(ParseError::MissingHeader(RELS))?;
        let gens: Vec<&str> = gens
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        let gens = letters_of(&gens)?;
        let relators: Vec<&str> = rels.split_whitespace().collect();
        out.push(build(&gens, &relators)?);
    }
    Ok(out)
}

fn letters_of(tokens: &[&str]) -> Result<Vec<char>, ParseError> {
    if tokens.iter().all(|t| t.is_empty()) {
        return Err(ParseError::EmptyGenerators);
    }
    let mut out: Vec<char> = Vec::new();
    for t in tokens {
        let mut chars = t.chars();
        let c = match (chars.next(), chars.next()) {
            (Some(c), None) if c.is_ascii_lowercase() => c,
            _ => return Err(ParseError::BadGenerator(t.to_string())),
        };
        if out.contains(&c) {
            return Err(ParseError::DuplicateGenerator(c));
        }
        out.push(c);
    }
    Ok(out)
}

fn build(gens: &[char], relators: &[&str]) -> Result<GroupPresentation, ParseError> {
    let rank = gens.len() as u32;
    let mut words = Vec::with_capacity(relators.len());
    for rel in relators {
        let rel: String = rel.chars().filter(|c| !c.is_whitespace()).collect();
        if rel.is_empty() {
            return Err(ParseError::EmptyRelator);
        }
        let mut letters = Vec::with_capacity(rel.len());
        for c in rel.chars() {
            let pos = gens
                .iter()
                .position(|&g| g == c.to_ascii_lowercase())
                .ok_or_else(|| ParseError::UnknownLetter {
                    relator: rel.clone(),
                    letter: c,
                })?;
            let i = pos as i32 + 1;
            letters.push(if c.is_ascii_uppercase() { -i } else { i });
        }
        words.push(FreeWord::new(letters, rank).map_err(RelationError::from)?);
    }
    Ok(GroupPresentation::new(rank, words)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
    AlgebraSystem,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonTerm {
    pub exponents: Vec<u32>,
    pub numerator: String,
    pub denominator: String,
}

/// File schema of an exported presentation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealFile {
    pub rank: u32,
    pub generators: Vec<String>,
    pub free_relations: Vec<Vec<JsonTerm>>,
    pub cutout_relations: Vec<Vec<JsonTerm>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub groebner_basis: Option<Vec<Vec<JsonTerm>>>,
}

#[derive(Debug, Error)]
pub enum ImportError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad generator name: {0}")]
    Generator(#[from] PolyError),
    #[error("term has {got} exponents, expected {want}")]
    Arity { got: usize, want: usize },
    #[error("bad coefficient {0:?}")]
    Coefficient(String),
}

fn terms_json(p: &TracePolynomial, gens: &[TraceVariable]) -> Vec<JsonTerm> {
    p.sorted_terms(&MonomialOrder::grevlex())
        .into_iter()
        .map(|(m, c)| JsonTerm {
            exponents: gens.iter().map(|v| m.exponent(v)).collect(),
            numerator: c.numer().to_string(),
            denominator: c.denom().to_string(),
        })
        .collect()
}

fn terms_from_json(
    terms: &[JsonTerm],
    gens: &[TraceVariable],
) -> Result<TracePolynomial, ImportError> {
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        if t.exponents.len() != gens.len() {
            return Err(ImportError::Arity {
                got: t.exponents.len(),
                want: gens.len(),
            });
        }
        let bad = || ImportError::Coefficient(format!("{}/{}", t.numerator, t.denominator));
        let n = t.numerator.parse().map_err(|_| bad())?;
        let d: num_bigint::BigInt = t.denominator.parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        let m = Monomial::from_pairs(
            gens.iter()
                .copied()
                .zip(t.exponents.iter().copied())
                .filter(|(_, e)| *e > 0),
        );
        out.push((m, Rational::new(n, d)));
    }
    Ok(TracePolynomial::from_terms(out))
}

impl IdealFile {
    pub fn from_presentation(pres: &CharVarietyPresentation) -> Self {
        let gens = &pres.generators;
        IdealFile {
            rank: pres.rank,
            generators: gens.iter().map(|v| v.to_string()).collect(),
            free_relations: pres
                .free_relations
                .iter()
                .map(|p| terms_json(p, gens))
                .collect(),
            cutout_relations: pres
                .cutout_relations
                .iter()
                .map(|p| terms_json(p, gens))
                .collect(),
            groebner_basis: None,
        }
    }

    pub fn variables(&self) -> Result<Vec<TraceVariable>, ImportError> {
        Ok(self
            .generators
            .iter()
            .map(|g| g.parse())
            .collect::<Result<Vec<TraceVariable>, PolyError>>()?)
    }

    /// `(free relations, cut-out relations)`.
    pub fn relations(&self) -> Result<(Vec<TracePolynomial>, Vec<TracePolynomial>), ImportError> {
        let gens = self.variables()?;
        let free = self
            .free_relations
            .iter()
            .map(|t| terms_from_json(t, &gens))
            .collect::<Result<_, _>>()?;
        let cutout = self
            .cutout_relations
            .iter()
            .map(|t| terms_from_json(t, &gens))
            .collect::<Result<_, _>>()?;
        Ok((free, cutout))
    }

    /// The ideal generated by all relations, in the default order.
    pub fn ideal(&self) -> Result<PolynomialIdeal, ImportError> {
        let (mut free, cutout) = self.relations()?;
        free.extend(cutout);
        Ok(PolynomialIdeal::new(free, MonomialOrder::grevlex()))
    }
}

pub fn import_ideal(json: &str) -> Result<IdealFile, ImportError> {
    Ok(serde_json::from_str(json)?)
}

/// Renders a presentation. Output is byte-identical for identical input.
pub fn export_ideal(pres: &CharVarietyPresentation, format: OutputFormat) -> String {
    export_with_basis(pres, None, format)
}

fn export_with_basis(
    pres: &CharVarietyPresentation,
    basis: Option<(&[TracePolynomial], &MonomialOrder)>,
    format: OutputFormat,
) -> String {
    let order = MonomialOrder::grevlex();
    let render = |ps: &[TracePolynomial], o: &MonomialOrder| -> Vec<String> {
        ps.iter().map(|p| p.render(o)).collect()
    };
    let gens: Vec<String> = pres.generators.iter().map(|v| v.to_string()).collect();
    let mut out = String::new();
    match format {
        OutputFormat::Text => {
            writeln!(out, "rank: {}", pres.rank).unwrap();
            writeln!(out, "generators ({}): {}", gens.len(), gens.join(", ")).unwrap();
            let mut section = |title: &str, lines: Vec<String>| {
                writeln!(out, "{} ({}):", title, lines.len()).unwrap();
                for l in lines {
                    writeln!(out, "  {l}").unwrap();
                }
            };
            section("free relations", render(&pres.free_relations, &order));
            section("cutout relations", render(&pres.cutout_relations, &order));
            if let Some((b, o)) = basis {
                section(&format!("groebner basis, {}", order_name(o)), render(b, o));
            }
        }
        OutputFormat::Json => {
            let mut file = IdealFile::from_presentation(pres);
            file.groebner_basis =
                basis.map(|(b, _)| b.iter().map(|p| terms_json(p, &pres.generators)).collect());
            out = serde_json::to_string_pretty(&file).expect("serializable");
            out.push('\n');
        }
        OutputFormat::AlgebraSystem => {
            let mut ranked = pres.generators.clone();
            ranked.sort_by(|a, b| order.compare_vars(b, a));
            let ranked: Vec<String> = ranked.iter().map(|v| v.to_string()).collect();
            writeln!(out, "R = QQ[{}];", ranked.join(", ")).unwrap();
            let mut ideal = |name: &str, lines: Vec<String>| {
                writeln!(out, "{name} = ideal(").unwrap();
                let n = lines.len();
                for (i, l) in lines.into_iter().enumerate() {
                    writeln!(out, "  {l}{}", if i + 1 < n { "," } else { "" }).unwrap();
                }
                writeln!(out, ");").unwrap();
            };
            let mut all = render(&pres.free_relations, &order);
            all.extend(render(&pres.cutout_relations, &order));
            ideal("I", all);
            if let Some((b, o)) = basis {
                ideal("G", render(b, o));
            }
        }
    }
    out
}

fn order_name(o: &MonomialOrder) -> &'static str {
    match o.kind {
        OrderKind::Lex => "lex",
        OrderKind::Grevlex => "grevlex",
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "charvar",
    version,
    about = "SL(2,C) character varieties of finitely presented groups"
)]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    /// Base seed for random sampling.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// S-pair budget for Groebner computations.
    #[arg(long, global = true, default_value_t = DEFAULT_PAIR_LIMIT)]
    pub max_pairs: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generators and relations for a presentation.
    Presentation {
        /// Inline presentation, SnapPy text, a file, or '-' for stdin.
        source: String,
        #[arg(long)]
        groebner: bool,
        #[arg(long, default_value = "grevlex")]
        order: OrderKind,
    },
    /// Trace polynomial of a word.
    Reduce {
        word: String,
        /// Ambient rank; defaults to the largest generator index in the word.
        #[arg(long)]
        rank: Option<u32>,
    },
    /// Defining relations of the free group of rank r.
    FreeRelations { rank: u32 },
    /// Generators of the PSL(2,C) subring.
    Psl2Gens {
        rank: u32,
        #[arg(long, default_value_t = 3)]
        max_factors: u32,
    },
    /// Checks numerically that every emitted relation vanishes.
    Check {
        source: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Jacobian determinant of the 3r-3 independent trace functions.
    Jacobian {
        rank: u32,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Presentations for every group in a SnapPy printout.
    FromSnappy { file: String },
    /// Whether two exported ideals have the same radical.
    RadicalEqual { a: PathBuf, b: PathBuf },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Aborted(#[from] GroebnerError),
    #[error("{0}")]
    Numeric(#[from] NumericError),
    #[error("verification failed")]
    Verification(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) | CliError::Io(_) => 1,
            CliError::Aborted(_) => 2,
            CliError::Numeric(_) | CliError::Verification(_) => 3,
        }
    }
}

macro_rules! parse_err {
    ($($t:ty),*) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Parse(e.to_string())
            }
        })*
    };
}
parse_err!(ParseError, ImportError, RelationError, WordError, PolyError);

/// Reads a source argument: `-` is stdin, an existing path is read from
/// disk, and anything else is taken as inline text.
pub fn read_source(arg: &str) -> Result<String, CliError> {
    if arg == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    let path = Path::new(arg);
    if !arg.trim_start().starts_with('<') && path.is_file() {
        return Ok(std::fs::read_to_string(path)?);
    }
    Ok(arg.to_string())
}

/// Inline `<..|..>` text or SnapPy output, told apart by the `Generators:` header.
pub fn parse_source(text: &str) -> Result<Vec<GroupPresentation>, ParseError> {
    if text.contains("Generators:") {
        parse_snappy(text)
    } else {
        Ok(vec![parse_presentation(text)?])
    }
}

fn single_source(arg: &str) -> Result<GroupPresentation, CliError> {
    let mut all = parse_source(&read_source(arg)?)?;
    if all.len() != 1 {
        return Err(CliError::Parse(format!(
            "expected one presentation, found {}; use from-snappy for batches",
            all.len()
        )));
    }
    Ok(all.remove(0))
}

fn presentation_output(
    pres: &GroupPresentation,
    groebner: Option<&OrderKind>,
    format: OutputFormat,
    max_pairs: usize,
) -> Result<String, CliError> {
    let cv = full_presentation(pres);
    let Some(kind) = groebner else {
        return Ok(export_ideal(&cv, format));
    };
    let order = MonomialOrder::with_ranking(*kind, Vec::new());
    let ideal = PolynomialIdeal::new(cv.all_relations(), order.clone());
    let gb = buchberger_with_limit(&ideal, max_pairs)?;
    Ok(export_with_basis(&cv, Some((gb.basis(), &order)), format))
}

fn word_rank(word: &str) -> Result<u32, CliError> {
    let probe = crate::words::parse_word(word, 26)
        .or_else(|_| crate::words::parse_word(word, u32::MAX >> 1))?;
    Ok(probe
        .letters()
        .iter()
        .map(|l| l.unsigned_abs())
        .max()
        .unwrap_or(1))
}

/// Executes a parsed command line and returns what should go to stdout.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    let format = cli.format;
    match &cli.command {
        Command::Presentation {
            source,
            groebner,
            order,
        } => {
            let pres = single_source(source)?;
            presentation_output(&pres, groebner.then_some(order), format, cli.max_pairs)
        }
        Command::Reduce { word, rank } => {
            let rank = match rank {
                Some(r) => *r,
                None => word_rank(word)?,
            };
            let w = crate::words::parse_word(word, rank)?;
            let p = reduce_trace(&w);
            let order = MonomialOrder::grevlex();
            Ok(match format {
                OutputFormat::Json => {
                    let gens = generators(rank)?;
                    let v = serde_json::json!({
                        "word": w.to_string(),
                        "generators": gens.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
                        "trace": terms_json(&p, &gens),
                    });
                    format!(
                        "{}\n",
                        serde_json::to_string_pretty(&v).expect("serializable")
                    )
                }
                _ => format!("{}\n", p.render(&order)),
            })
        }
        Command::FreeRelations { rank } => {
            let pres = GroupPresentation::free(*rank)?;
            Ok(export_ideal(&full_presentation(&pres), format))
        }
        Command::Psl2Gens { rank, max_factors } => {
            let ms = psl2_generators(*rank, *max_factors)?;
            let names: Vec<String> = ms.iter().map(|m| m.to_string()).collect();
            Ok(match format {
                OutputFormat::Json => format!(
                    "{}\n",
                    serde_json::to_string_pretty(&names).expect("serializable")
                ),
                OutputFormat::AlgebraSystem => format!("P = [{}];\n", names.join(", ")),
                OutputFormat::Text => names.iter().map(|n| format!("{n}\n")).collect(),
            })
        }
        Command::Check {
            source,
            trials,
            tol,
        } => {
            let pres = single_source(source)?;
            let cv = full_presentation(&pres);
            let free = check_vanishing(&cv.free_relations, pres.rank(), *trials, *tol, cli.seed)?;
            let cut = check_vanishing_with(&cv.cutout_relations, *trials, *tol, cli.seed, |s| {
                sample_representation(&pres, s)
            })?;
            let out = match format {
                OutputFormat::Json => {
                    let v = serde_json::json!({ "free_relations": free, "cutout_relations": cut });
                    format!(
                        "{}\n",
                        serde_json::to_string_pretty(&v).expect("serializable")
                    )
                }
                _ => format!("free relations: {free}\ncutout relations: {cut}\n"),
            };
            if free.passed() && cut.passed() {
                Ok(out)
            } else {
                Err(CliError::Verification(out))
            }
        }
        Command::Jacobian { rank, tol } => {
            let det = jacobian_independence(*rank, cli.seed)?;
            let ok = det > *tol;
            let out = match format {
                OutputFormat::Json => format!(
                    "{}\n",
                    serde_json::json!({ "rank": rank, "seed": cli.seed, "abs_det": det, "independent": ok })
                ),
                _ => format!(
                    "|det| = {det:e} ({})\n",
                    if ok { "independent" } else { "not certified" }
                ),
            };
            if ok {
                Ok(out)
            } else {
                Err(CliError::Verification(out))
            }
        }
        Command::FromSnappy { file } => {
            let all = parse_snappy(&read_source(file)?)?;
            let blocks: Vec<Result<String, CliError>> = all
                .par_iter()
                .map(|p| presentation_output(p, None, format, cli.max_pairs))
                .collect();
            let mut out = String::new();
            for (k, b) in blocks.into_iter().enumerate() {
                writeln!(out, "=== manifold {k} ===").unwrap();
                out.push_str(&b?);
            }
            Ok(out)
        }
        Command::RadicalEqual { a, b } => {
            let ia = import_ideal(&std::fs::read_to_string(a)?)?.ideal()?;
            let ib = import_ideal(&std::fs::read_to_string(b)?)?.ideal()?;
            let eq = radical_equal_with_limit(&ia, &ib, cli.max_pairs)?;
            Ok(match format {
                OutputFormat::Json => format!("{}\n", serde_json::json!({ "radical_equal": eq })),
                _ => format!("{eq}\n"),
            })
        }
    }
}
