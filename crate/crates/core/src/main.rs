use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use limitforge::coset::{low_index, Schreier};
use limitforge::corpus;
use limitforge::engines::oracle_from;
use limitforge::ice::{enumerate_ice, enumerate_limit_groups, Classification, IceTower, LimitWitness};
use limitforge::presentation::Presentation;
use limitforge::recognize::{
    recognize_cyclically_pinched, recognize_free, recognize_limit, refute_sentence, FreeVerdict, NotFreeReason,
    Recognition, Sentence, Verdict, Witness, DEFAULT_BUDGET,
};
use limitforge::retracts::{retract_presentation, subgroup_presentation_lr, Found, RetractOptions};
use limitforge::syntax::{self, format_word};
use limitforge::word::{centralizer_free, words_of_length, FreeCentralizer};
use limitforge::{Error, Word};

/// Retraction search steps for `present-subgroup`.
const DEFAULT_RETRACT_BUDGET: u64 = 1_000_000;

/// Stream elements searched by `--conformance-tietze`.
const CONFORMANCE_BUDGET: usize = 10_000;

const EXIT_ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "limitforge", version, about = "Workbench for finitely presented groups and limit groups")]
struct Cli {
    /// Print a JSON run report instead of text
    #[arg(long, global = true)]
    json: bool,

    /// Step budget; overrides each command's default
    #[arg(long, global = true, env = "LIMITFORGE_BUDGET")]
    budget: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduced words of a free group, or facts about one word
    Words {
        #[arg(long, default_value_t = 2)]
        rank: usize,
        /// List all reduced words of this length
        #[arg(long, conflicts_with = "word")]
        length: Option<usize>,
        /// Reduce a word and report its core, root and centralizer
        #[arg(long)]
        word: Option<String>,
    },
    /// Subgroups of index at most n, as coset tables
    Subgroups {
        /// Presentation file (.grp) or literal `< ... | ... >`
        #[arg(long, short = 'p')]
        pres: String,
        #[arg(long)]
        index: usize,
        /// Only count them
        #[arg(long)]
        count: bool,
    },
    /// Presentation of a finitely generated subgroup via a local retraction
    PresentSubgroup {
        #[arg(long, short = 'p')]
        pres: String,
        /// Comma-separated subgroup generators
        #[arg(long, short = 'S')]
        subgroup: String,
        #[arg(long, default_value = "builtin:auto")]
        oracle: String,
        /// Also look for the result by blind Tietze search
        #[arg(long)]
        conformance_tietze: bool,
    },
    /// Presentation of the image of an idempotent endomorphism
    Retract {
        #[arg(long, short = 'p')]
        pres: String,
        /// Comma-separated generator images
        #[arg(long)]
        rho: String,
        #[arg(long, default_value = "builtin:auto")]
        oracle: String,
    },
    /// Iterated centralizer extensions
    Ice {
        #[command(subcommand)]
        command: IceCommand,
    },
    /// Decide (within budget) whether a presentation defines a limit group
    Recognize {
        #[arg(long, short = 'p')]
        pres: String,
        #[arg(long, default_value = "builtin:auto")]
        oracle: String,
    },
    /// Decide (within budget) whether a presentation defines a free group
    RecognizeFree {
        #[arg(long, short = 'p')]
        pres: String,
        #[arg(long, default_value = "builtin:auto")]
        oracle: String,
    },
    /// Recognize F(X) *_{u=v} F(Y) for cyclic u, v
    RecognizePinched {
        #[arg(long)]
        rank1: usize,
        #[arg(long)]
        rank2: usize,
        /// Word over the first rank1 default generator names
        #[arg(long)]
        u: String,
        /// Word over the next rank2 default generator names
        #[arg(long)]
        v: String,
    },
    /// Search for a free-group counterexample to a witness sentence
    Refute {
        #[arg(long, short = 'p')]
        pres: String,
        /// Comma-separated elements, one of which must die
        #[arg(long)]
        elements: String,
        #[arg(long, default_value_t = corpus::WITNESS_REFUTE_BOUND)]
        bound: usize,
    },
    /// Run the bundled ground-truth recognition corpus
    Corpus,
}

#[derive(Subcommand)]
enum IceCommand {
    /// Print the tower's presentation
    Present {
        #[arg(long)]
        tower: String,
    },
    /// Decide triviality of a word
    Wp {
        #[arg(long)]
        tower: String,
        #[arg(long)]
        word: String,
    },
    /// Basis of the centralizer of a nontrivial element
    Centralizer {
        #[arg(long)]
        tower: String,
        #[arg(long)]
        word: String,
    },
    /// First towers in enumeration order
    Enumerate {
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Enumerate limit-group presentations instead
        #[arg(long)]
        limit_groups: bool,
    },
}

/// Machine-readable record of one invocation. Holds no wall-clock data, so
/// equal inputs give equal reports.
#[derive(Serialize)]
struct RunReport {
    command: String,
    version: &'static str,
    /// SHA-256 of each input, by argument name.
    inputs: BTreeMap<String, String>,
    budget: Option<u64>,
    counters: BTreeMap<String, u64>,
    result: Value,
}

struct Outcome {
    report: RunReport,
    text: String,
    code: u8,
}

impl Outcome {
    fn new(command: &str, result: Value, text: String) -> Self {
        let report = RunReport {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION"),
            inputs: BTreeMap::new(),
            budget: None,
            counters: BTreeMap::new(),
            result,
        };
        Outcome { report, text, code: 0 }
    }

    fn input(mut self, name: &str, content: &str) -> Self {
        self.report.inputs.insert(name.into(), digest(content));
        self
    }

    fn budget(mut self, budget: u64) -> Self {
        self.report.budget = Some(budget);
        self
    }

    fn counter(mut self, name: &str, value: u64) -> Self {
        self.report.counters.insert(name.into(), value);
        self
    }

    fn code(mut self, code: u8) -> Self {
        self.code = code;
        self
    }
}

fn digest(content: &str) -> String {
    hex::encode(Sha256::digest(content.as_bytes()))
}

/// Literal `< ... >` text or a path to read.
fn read_input(arg: &str) -> Result<String, Error> {
    if arg.trim_start().starts_with('<') || arg.trim_start().starts_with('{') {
        return Ok(arg.to_string());
    }
    fs::read_to_string(arg).map_err(|e| Error::Invalid(format!("{arg}: {e}")))
}

fn read_presentation(arg: &str) -> Result<(Presentation, String), Error> {
    let text = read_input(arg)?;
    Ok((text.parse()?, text))
}

fn read_tower(arg: &str) -> Result<(IceTower, String), Error> {
    let text = read_input(arg)?;
    Ok((IceTower::from_json(&text)?, text))
}

fn words_json(ws: &[Word], names: &[String]) -> Value {
    json!(ws.iter().map(|w| format_word(w, names)).collect::<Vec<_>>())
}

fn words(rank: usize, length: Option<usize>, word: Option<&str>) -> Result<Outcome, Error> {
    let names = syntax::default_names(rank);
    if let Some(input) = word {
        let w = syntax::parse_word(input, &names)?;
        let (core, conj) = w.cyclic_reduce();
        let f = |w: &Word| format_word(w, &names);
        let (root, exponent) = match w.primitive_root() {
            Ok((r, e)) => (Some(f(&r)), Some(e)),
            Err(_) => (None, None),
        };
        let centralizer = match centralizer_free(&w) {
            FreeCentralizer::Whole => "whole group".to_string(),
            FreeCentralizer::Cyclic(g) => f(&g),
        };
        let result = json!({
            "reduced": f(&w),
            "core": f(&core),
            "conjugator": f(&conj),
            "root": root,
            "exponent": exponent,
            "centralizer": centralizer,
        });
        let text = format!(
            "reduced: {}\ncore: {} (conjugator {})\nroot: ({})^{}\ncentralizer: {}",
            f(&w),
            f(&core),
            f(&conj),
            root.as_deref().unwrap_or("1"),
            exponent.unwrap_or(1),
            centralizer
        );
        return Ok(Outcome::new("words", result, text).input("word", input));
    }
    let len = length.ok_or_else(|| Error::Invalid("pass --length or --word".into()))?;
    let ws = words_of_length(rank, len);
    let text = ws.iter().map(|w| format_word(w, &names)).collect::<Vec<_>>().join("\n");
    Ok(Outcome::new("words", json!({ "words": words_json(&ws, &names) }), text).counter("words", ws.len() as u64))
}

fn subgroups(pres: &str, index: usize, count: bool) -> Result<Outcome, Error> {
    let (p, text) = read_presentation(pres)?;
    let mut search = low_index(&p, index);
    let tables: Vec<_> = search.by_ref().collect();
    let mut per_index = BTreeMap::new();
    for t in &tables {
        *per_index.entry(t.index()).or_insert(0u64) += 1;
    }
    let out = if count {
        let result = json!({ "total": tables.len(), "per_index": per_index });
        Outcome::new("subgroups", result, tables.len().to_string())
    } else {
        let rows: Vec<Value> = tables
            .iter()
            .map(|t| {
                json!({
                    "index": t.index(),
                    "rows": t.permutations(),
                    "schreier": words_json(&Schreier::new(t).words, p.generators()),
                })
            })
            .collect();
        let text = serde_json::to_string_pretty(&rows).expect("tables serialize");
        Outcome::new("subgroups", json!({ "tables": rows }), text)
    };
    Ok(out.input("pres", &text).counter("nodes", search.nodes()))
}

fn present_subgroup(pres: &str, subgroup: &str, oracle: &str, conformance: bool, budget: u64) -> Result<Outcome, Error> {
    let (p, text) = read_presentation(pres)?;
    let s = syntax::parse_word_list(subgroup, p.generators())?;
    let wp = oracle_from(oracle, &p)?;
    let options = RetractOptions { conformance_budget: conformance.then_some(CONFORMANCE_BUDGET) };
    let out = match subgroup_presentation_lr(&p, &s, wp.as_ref(), budget, options)? {
        Found::Yes { value: lr, steps } => {
            let syms: Vec<String> = (1..=s.len()).map(|i| format!("S{i}")).collect();
            let r = &lr.retraction;
            let result = json!({
                "found": true,
                "presentation": lr.presentation.to_string(),
                "generators_in_g": words_json(&lr.generators_in_g(&s), p.generators()),
                "generators_in_s": words_json(&lr.generators_in_s, &syms),
                "s_in_generators": words_json(&lr.s_in_generators, lr.presentation.generators()),
                "conformance": lr.conformance,
                "retraction": {
                    "k_table": r.table.permutations(),
                    "k_presentation": r.k_presentation.to_string(),
                    "k_embedding": words_json(&r.k_embedding, p.generators()),
                    "y": words_json(&r.images, &syms),
                    "s_in_k": words_json(&r.s_in_k, r.k_presentation.generators()),
                },
            });
            Outcome::new("present-subgroup", result, lr.presentation.to_string()).counter("steps", steps)
        }
        Found::Exhausted { steps } => Outcome::new("present-subgroup", json!({ "found": false }), "budget exhausted".into())
            .counter("steps", steps)
            .code(2),
    };
    Ok(out.input("pres", &text).input("subgroup", subgroup).input("oracle", oracle).budget(budget))
}

fn retract(pres: &str, rho: &str, oracle: &str) -> Result<Outcome, Error> {
    let (p, text) = read_presentation(pres)?;
    let images = syntax::parse_word_list(rho, p.generators())?;
    let wp = oracle_from(oracle, &p)?;
    let rp = retract_presentation(&p, &images, wp.as_ref(), RetractOptions::default())?;
    let result = json!({
        "presentation": rp.presentation.to_string(),
        "embedding": words_json(&rp.embedding, p.generators()),
        "substitution": words_json(&rp.substitution, rp.presentation.generators()),
    });
    Ok(Outcome::new("retract", result, rp.presentation.to_string())
        .input("pres", &text)
        .input("rho", rho)
        .input("oracle", oracle)
        .counter("moves", rp.moves.len() as u64))
}

fn ice(command: &IceCommand) -> Result<Outcome, Error> {
    match command {
        IceCommand::Present { tower } => {
            let (t, text) = read_tower(tower)?;
            let p = t.presentation();
            let result = json!({ "presentation": p.to_string(), "rank": t.rank(), "height": t.height(), "cost": t.cost() });
            Ok(Outcome::new("ice present", result, p.to_string()).input("tower", &text))
        }
        IceCommand::Wp { tower, word } => {
            let (t, text) = read_tower(tower)?;
            let w = syntax::parse_word(word, &t.names())?;
            let trivial = t.wp(&w)?;
            let label = if trivial { "trivial" } else { "nontrivial" };
            Ok(Outcome::new("ice wp", json!({ "trivial": trivial }), label.into())
                .input("tower", &text)
                .input("word", word))
        }
        IceCommand::Centralizer { tower, word } => {
            let (t, text) = read_tower(tower)?;
            let names = t.names();
            let w = syntax::parse_word(word, &names)?;
            let basis = t.centralizer(&w)?;
            let class = match t.classify_element(&w)? {
                Classification::Parabolic { level, conjugator } => {
                    json!({ "parabolic": { "level": level, "conjugator": format_word(&conjugator, &names) } })
                }
                Classification::Hyperbolic => json!("hyperbolic"),
            };
            let shown: Vec<String> = basis.iter().map(|b| format_word(b, &names)).collect();
            let result = json!({ "rank": basis.len(), "basis": shown, "classification": class });
            Ok(Outcome::new("ice centralizer", result, format!("rank {}: {}", basis.len(), shown.join(", ")))
                .input("tower", &text)
                .input("word", word))
        }
        IceCommand::Enumerate { count, limit_groups: false } => {
            let rows: Vec<Value> = enumerate_ice()
                .take(*count)
                .map(|(t, p)| json!({ "cost": t.cost(), "tower": t.to_spec(), "presentation": p.to_string() }))
                .collect();
            let text = rows.iter().map(|r| r["presentation"].as_str().unwrap_or_default()).collect::<Vec<_>>().join("\n");
            Ok(Outcome::new("ice enumerate", json!(rows), text).counter("count", rows.len() as u64))
        }
        IceCommand::Enumerate { count, limit_groups: true } => {
            let mut stream = enumerate_limit_groups();
            let rows: Vec<Value> = stream
                .by_ref()
                .take(*count)
                .map(|e| {
                    let witness = match e.witness {
                        LimitWitness::Whole => "whole",
                        LimitWitness::Retraction(_) => "retraction",
                    };
                    json!({
                        "presentation": e.presentation.to_string(),
                        "tower": e.tower.to_spec(),
                        "s": words_json(&e.s, &e.tower.names()),
                        "witness": witness,
                    })
                })
                .collect();
            let text = rows.iter().map(|r| r["presentation"].as_str().unwrap_or_default()).collect::<Vec<_>>().join("\n");
            Ok(Outcome::new("ice enumerate", json!(rows), text).counter("count", rows.len() as u64).counter("steps", stream.steps()))
        }
    }
}

fn witness_json(p: &Presentation, w: &Witness) -> Value {
    use limitforge::recognize::Certificate;
    let f = |x: &Word| p.format_word(x);
    let certificate = match &w.certificate {
        Certificate::CommutationTransitivity { a, b, c } => {
            json!({ "commutation-transitivity": { "a": f(a), "b": f(b), "c": f(c) } })
        }
        Certificate::Torsion { g, n } => json!({ "torsion": { "g": f(g), "n": n } }),
        Certificate::Inversion { g, h } => json!({ "inversion": { "g": f(g), "h": f(h) } }),
    };
    json!({ "kind": w.kind, "elements": words_json(&w.elements, p.generators()), "certificate": certificate })
}

fn recognition_outcome(command: &str, p: &Presentation, r: &Recognition) -> Outcome {
    let (result, text, code) = match &r.verdict {
        Verdict::Limit(chain) => {
            let e = &chain.emission;
            let result = json!({
                "verdict": "limit",
                "emission": e.presentation.to_string(),
                "tower": e.tower.to_spec(),
                "s": words_json(&e.s, &e.tower.names()),
                "emission_path": chain.emission_path,
                "input_path": chain.input_path,
                "normal_form": chain.normal_form.to_string(),
            });
            (result, format!("limit: isomorphic to {}", e.presentation), 0)
        }
        Verdict::NotLimit(w) => {
            let result = json!({ "verdict": "not-limit", "witness": witness_json(p, w) });
            (result, format!("not a limit group, witness {}", w.format(p)), 1)
        }
        Verdict::Unknown => (json!({ "verdict": "unknown" }), "unknown within budget".into(), 2),
    };
    Outcome::new(command, result, text)
        .budget(r.budget)
        .counter("enumeration_steps", r.enumeration_steps)
        .counter("certificate_steps", r.certificate_steps)
        .code(code)
}

fn recognize(pres: &str, oracle: &str, budget: u64) -> Result<Outcome, Error> {
    let (p, text) = read_presentation(pres)?;
    let wp = oracle_from(oracle, &p)?;
    let r = recognize_limit(&p, wp.as_ref(), budget)?;
    Ok(recognition_outcome("recognize", &p, &r).input("pres", &text).input("oracle", oracle))
}

fn recognize_free_cmd(pres: &str, oracle: &str, budget: u64) -> Result<Outcome, Error> {
    let (p, text) = read_presentation(pres)?;
    let wp = oracle_from(oracle, &p)?;
    let r = recognize_free(&p, wp.as_ref(), budget)?;
    let (result, shown, code) = match &r.verdict {
        FreeVerdict::Free { presentation, path } => (
            json!({ "verdict": "free", "presentation": presentation.to_string(), "path": path }),
            format!("free: {presentation}"),
            0,
        ),
        FreeVerdict::NotFree(reason) => {
            let reason = match reason {
                NotFreeReason::TorsionInAbelianization(t) => json!({ "torsion-in-abelianization": t }),
                NotFreeReason::AbelianNoncyclic => json!("abelian-noncyclic"),
                NotFreeReason::Witness(w) => json!({ "witness": witness_json(&p, w) }),
            };
            let shown = format!("not free: {reason}");
            (json!({ "verdict": "not-free", "reason": reason }), shown, 1)
        }
        FreeVerdict::Unknown => (json!({ "verdict": "unknown" }), "unknown within budget".into(), 2),
    };
    Ok(Outcome::new("recognize-free", result, shown)
        .input("pres", &text)
        .input("oracle", oracle)
        .budget(budget)
        .counter("enumeration_steps", r.enumeration_steps)
        .counter("certificate_steps", r.certificate_steps)
        .code(code))
}

fn recognize_pinched(rank1: usize, rank2: usize, u: &str, v: &str, budget: u64) -> Result<Outcome, Error> {
    let names = syntax::default_names(rank1 + rank2);
    let uw = syntax::parse_word(u, &names)?;
    let vw = syntax::parse_word(v, &names)?;
    let (p, r) = recognize_cyclically_pinched(rank1, rank2, &uw, &vw, budget)?;
    Ok(recognition_outcome("recognize-pinched", &p, &r).input("u", u).input("v", v))
}

fn refute(pres: &str, elements: &str, bound: usize) -> Result<Outcome, Error> {
    let (p, text) = read_presentation(pres)?;
    let els = syntax::parse_word_list(elements, p.generators())?;
    let s = Sentence::new(p.generators().to_vec(), p.relators().to_vec(), els);
    let out = match refute_sentence(&s, bound) {
        Some(assignment) => {
            let shown = words_json(&assignment, &syntax::default_names(s.constants));
            let text = format!("refuted by {shown}");
            Outcome::new("refute", json!({ "refuted": true, "assignment": shown }), text).code(1)
        }
        None => Outcome::new("refute", json!({ "refuted": false }), format!("no counterexample up to length {bound}")),
    };
    Ok(out.input("pres", &text).input("elements", elements).counter("bound", bound as u64))
}

fn run_corpus(budget: u64) -> Result<Outcome, Error> {
    let mut rows = Vec::new();
    let mut lines = vec![format!("{:<20} {:<16} {:<10} result", "group", "expected", "verdict")];
    let mut all = true;
    for e in corpus::entries() {
        let o = corpus::run(&e, budget)?;
        all &= o.pass;
        let expected = format!("{:?}", e.expected);
        let verdict = o.recognition.verdict.label();
        let result = if o.pass { "PASS" } else { "FAIL" };
        lines.push(format!("{:<20} {:<16} {:<10} {result}", e.name, expected, verdict));
        rows.push(json!({
            "name": e.name,
            "presentation": e.presentation,
            "oracle": e.oracle,
            "expected": expected,
            "verdict": verdict,
            "evidence_ok": o.evidence_ok,
            "refute_ok": o.refute_ok,
            "pass": o.pass,
        }));
    }
    Ok(Outcome::new("corpus", json!(rows), lines.join("\n")).budget(budget).code(if all { 0 } else { 1 }))
}

fn dispatch(cli: &Cli) -> Result<Outcome, Error> {
    let budget = |default: u64| cli.budget.unwrap_or(default);
    match &cli.command {
        Command::Words { rank, length, word } => words(*rank, *length, word.as_deref()),
        Command::Subgroups { pres, index, count } => subgroups(pres, *index, *count),
        Command::PresentSubgroup { pres, subgroup, oracle, conformance_tietze } => {
            present_subgroup(pres, subgroup, oracle, *conformance_tietze, budget(DEFAULT_RETRACT_BUDGET))
        }
        Command::Retract { pres, rho, oracle } => retract(pres, rho, oracle),
        Command::Ice { command } => ice(command),
        Command::Recognize { pres, oracle } => recognize(pres, oracle, budget(DEFAULT_BUDGET)),
        Command::RecognizeFree { pres, oracle } => recognize_free_cmd(pres, oracle, budget(DEFAULT_BUDGET)),
        Command::RecognizePinched { rank1, rank2, u, v } => recognize_pinched(*rank1, *rank2, u, v, budget(DEFAULT_BUDGET)),
        Command::Refute { pres, elements, bound } => refute(pres, elements, *bound),
        Command::Corpus => run_corpus(budget(DEFAULT_BUDGET)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            let ok = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            return ExitCode::from(if ok { 0 } else { EXIT_ERROR });
        }
    };
    match dispatch(&cli) {
        Ok(o) => {
            let body = if cli.json { serde_json::to_string_pretty(&o.report).expect("report serializes") } else { o.text };
            // a closed pipe downstream is not an error of ours
            let _ = writeln!(std::io::stdout().lock(), "{body}");
            ExitCode::from(o.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
