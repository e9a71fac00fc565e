use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use hrdialogue::agreement::{
    antecedent_agreement_matrix, krippendorff_alpha, relation_agreement_matrix, tu_agreement_matrix, Distance,
};
use hrdialogue::amr::{parse_amr_document, serialize_penman, sorted_triples, AmrEntry, AmrError, ParseOptions};
use hrdialogue::damr::{convert_to_dialogue_amr, validate_dialogue_amr, ConvertOptions, DialogueAmr, Lexicon, SurfaceTense};
use hrdialogue::policy::{load_pairs, pairs_from_transcript, pairs_to_tsv, IntentIndex, Policy, ResponsePair};
use hrdialogue::smatch::{scores, smatch_exact_with_limit, smatch_hillclimb, SmatchError};
use hrdialogue::structure::{
    extract_instruction_response_pairs, interleaving_spans, load_transcript, structure_report, tu_tree, LoadOptions,
    Transcript, TreeError, HEADER,
};
use hrdialogue::visual::{classify_photo_strategy, coverage, parse_exploration_list, trace_photo_requests, Category};

use crate::report::{CliError, Outcome};
use crate::{LexiconArg, Markable, Method, SmatchArgs, TenseArg};

type Result<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError(format!("{}: {e}", path.display())))
}

fn need_files(files: &[PathBuf]) -> Result<()> {
    if files.is_empty() {
        return Err(CliError("no input files".into()));
    }
    Ok(())
}

fn amr_entries(path: &Path, opts: ParseOptions) -> Result<Vec<AmrEntry>> {
    parse_amr_document(&read(path)?, opts).map_err(|e| CliError(format!("{}: {e}", path.display())))
}

fn entry_id(e: &AmrEntry, i: usize) -> String {
    e.id.clone().unwrap_or_else(|| (i + 1).to_string())
}

fn amr_error(e: &AmrError) -> Value {
    json!({ "code": e.code(), "message": e.to_string() })
}

fn lexicon(arg: &LexiconArg) -> Result<Lexicon> {
    match &arg.lexicon {
        Some(p) => Lexicon::load(p).map_err(CliError::from),
        None => Ok(Lexicon::builtin().clone()),
    }
}

fn transcript(path: &Path, opts: LoadOptions) -> Result<Transcript> {
    load_transcript(path, opts).map_err(CliError::from)
}

pub fn amr_parse(files: &[PathBuf]) -> Result<Outcome> {
    need_files(files)?;
    let mut out = Vec::new();
    for f in files {
        let entries = amr_entries(f, ParseOptions::default())?;
        let graphs: Vec<Value> = entries
            .iter()
            .enumerate()
            .map(|(i, e)| {
                json!({
                    "id": entry_id(e, i),
                    "root": e.graph.root(),
                    "nodes": e.graph.instances().len(),
                    "triples": sorted_triples(&e.graph),
                    "penman": serialize_penman(&e.graph),
                })
            })
            .collect();
        out.push(json!({ "file": f.display().to_string(), "graphs": graphs }));
    }
    Ok(Outcome::clean(out))
}

pub fn amr_check(files: &[PathBuf], allow_cycles: bool) -> Result<Outcome> {
    need_files(files)?;
    let opts = ParseOptions {
        strict_acyclic: !allow_cycles,
    };
    let mut out = Vec::new();
    let mut problems = false;
    for f in files {
        match parse_amr_document(&read(f)?, opts) {
            Ok(entries) => {
                let graphs: Vec<Value> = entries
                    .iter()
                    .enumerate()
                    .map(|(i, e)| {
                        let warnings: Vec<String> = e.warnings.iter().map(ToString::to_string).collect();
                        json!({ "id": entry_id(e, i), "ok": true, "warnings": warnings })
                    })
                    .collect();
                out.push(json!({ "file": f.display().to_string(), "ok": true, "graphs": graphs }));
            }
            Err(e) => {
                problems = true;
                out.push(json!({ "file": f.display().to_string(), "ok": false, "error": amr_error(&e) }));
            }
        }
    }
    Ok(Outcome::new(out, problems))
}

pub fn smatch(args: &SmatchArgs) -> Result<Outcome> {
    let left = amr_entries(&args.left, ParseOptions::default())?;
    let right = amr_entries(&args.right, ParseOptions::default())?;
    if left.len() != right.len() {
        return Err(CliError(format!(
            "{} has {} graphs but {} has {}",
            args.left.display(),
            left.len(),
            args.right.display(),
            right.len()
        )));
    }
    let mut pairs = Vec::new();
    let (mut matched, mut lt, mut rt) = (0, 0, 0);
    for (i, (a, b)) in left.iter().zip(&right).enumerate() {
        let hill = || smatch_hillclimb(&a.graph, &b.graph, args.restarts, args.seed);
        let (method, r) = match args.method {
            Method::Hillclimb => ("hillclimb", hill()),
            Method::Exact => ("exact", smatch_exact_with_limit(&a.graph, &b.graph, args.limit)?),
            Method::Auto => match smatch_exact_with_limit(&a.graph, &b.graph, args.limit) {
                Ok(r) => ("exact", r),
                Err(SmatchError::TooLarge { .. }) => ("hillclimb", hill()),
            },
        };
        matched += r.matched;
        lt += r.left_triples;
        rt += r.right_triples;
        pairs.push(json!({
            "left": entry_id(a, i),
            "right": entry_id(b, i),
            "method": method,
            "result": r,
        }));
    }
    let (precision, recall, f1) = scores(matched, lt, rt);
    Ok(Outcome::clean(json!({
        "pairs": pairs,
        "total": { "matched": matched, "left_triples": lt, "right_triples": rt,
                   "precision": precision, "recall": recall, "f1": f1 },
        "seed": args.seed,
    })))
}

#[derive(Serialize)]
struct DamrSummary<'a> {
    act: &'a str,
    concept: &'a str,
    speaker: &'a str,
    addressee: &'a str,
    content: &'a str,
    tense_aspect: &'a hrdialogue::damr::TenseAspect,
    embedded_actions: &'a [String],
    penman: String,
}

fn summary(d: &DialogueAmr) -> DamrSummary<'_> {
    DamrSummary {
        act: &d.act.label,
        concept: &d.concept.name,
        speaker: d.speaker.as_str(),
        addressee: d.addressee.as_str(),
        content: d.content.as_str(),
        tense_aspect: &d.ta,
        embedded_actions: &d.embedded_actions,
        penman: serialize_penman(&d.graph),
    }
}

fn damr_errors(errs: &[hrdialogue::damr::DamrError]) -> Vec<Value> {
    errs.iter()
        .map(|e| json!({ "code": e.code(), "message": e.to_string() }))
        .collect()
}

pub fn damr_validate(files: &[PathBuf], lex: &LexiconArg) -> Result<Outcome> {
    need_files(files)?;
    let lex = lexicon(lex)?;
    let mut out = Vec::new();
    let mut problems = false;
    for f in files {
        for (i, e) in amr_entries(f, ParseOptions::default())?.iter().enumerate() {
            let id = entry_id(e, i);
            match validate_dialogue_amr(&lex, &e.graph) {
                Ok(d) => out.push(json!({ "file": f.display().to_string(), "id": id, "ok": true, "dialogue_amr": summary(&d) })),
                Err(errs) => {
                    problems = true;
                    out.push(json!({ "file": f.display().to_string(), "id": id, "ok": false, "errors": damr_errors(&errs) }));
                }
            }
        }
    }
    Ok(Outcome::new(out, problems))
}

pub fn damr_convert(
    files: &[PathBuf],
    tense: Option<TenseArg>,
    speaker: String,
    addressee: String,
    promise: bool,
    lex: &LexiconArg,
) -> Result<Outcome> {
    need_files(files)?;
    let lex = lexicon(lex)?;
    let opts = ConvertOptions {
        speaker,
        addressee,
        tense: tense.map(|t| match t {
            TenseArg::Past => SurfaceTense::Past,
            TenseArg::Present => SurfaceTense::Present,
            TenseArg::Future => SurfaceTense::Future,
            TenseArg::Imperative => SurfaceTense::Imperative,
        }),
        promise,
    };
    let mut out = Vec::new();
    let mut problems = false;
    for f in files {
        for (i, e) in amr_entries(f, ParseOptions::default())?.iter().enumerate() {
            let id = entry_id(e, i);
            match convert_to_dialogue_amr(&lex, &e.graph, &opts) {
                Ok(d) => out.push(json!({ "file": f.display().to_string(), "id": id, "ok": true, "dialogue_amr": summary(&d) })),
                Err(err) => {
                    problems = true;
                    out.push(json!({ "file": f.display().to_string(), "id": id, "ok": false,
                                     "errors": damr_errors(std::slice::from_ref(&err)) }));
                }
            }
        }
    }
    Ok(Outcome::new(out, problems))
}

pub fn struct_validate(files: &[PathBuf], lenient: bool, tsv: bool) -> Result<Outcome> {
    need_files(files)?;
    let opts = LoadOptions {
        strict_relations: !lenient,
    };
    let mut out = Vec::new();
    let mut problems = false;
    let mut table = String::from("file\trule\trow\tmessage\n");
    for f in files {
        let report = structure_report(&transcript(f, opts)?);
        problems |= !report.violations.is_empty();
        for v in &report.violations {
            table.push_str(&format!("{}\t{}\t{}\t{}\n", f.display(), v.rule, v.row, v.message));
        }
        out.push(json!({ "file": f.display().to_string(), "report": report }));
    }
    Ok(Outcome::new(out, problems).with_tsv(tsv.then_some(table)))
}

pub fn struct_tus(file: &Path, only: Option<i64>) -> Result<Outcome> {
    let t = transcript(file, LoadOptions::default())?;
    let ids = match only {
        Some(tu) => vec![tu],
        None => t.tu_ids(),
    };
    let mut out = Vec::new();
    let mut problems = false;
    for tu in ids {
        match tu_tree(&t, tu) {
            Ok(tree) => out.push(json!({ "tu": tu, "ok": true, "tree": tree, "edges": tree.edges() })),
            Err(TreeError::NoSuchTu { tu }) => return Err(CliError(format!("no utterance belongs to TU {tu}"))),
            Err(TreeError::InvalidTu { tu, violations }) => {
                problems = true;
                out.push(json!({ "tu": tu, "ok": false, "violations": violations }));
            }
        }
    }
    Ok(Outcome::new(out, problems))
}

pub fn struct_pairs(file: &Path, tsv: bool) -> Result<Outcome> {
    let t = transcript(file, LoadOptions::default())?;
    let pairs = extract_instruction_response_pairs(&t);
    let table = tsv.then(|| pairs_to_tsv(&pairs_from_transcript(&pairs)));
    Ok(Outcome::clean(pairs).with_tsv(table))
}

pub fn struct_interleave(file: &Path) -> Result<Outcome> {
    let t = transcript(file, LoadOptions::default())?;
    Ok(Outcome::clean(interleaving_spans(&t)))
}

pub fn iaa_alpha(files: &[PathBuf], distance: Distance, markable: Option<Markable>) -> Result<Outcome> {
    if files.len() < 2 {
        return Err(CliError("need one annotation file per coder, at least two".into()));
    }
    let coders: Vec<(String, Transcript)> = files
        .iter()
        .map(|f| Ok((f.display().to_string(), transcript(f, LoadOptions::lenient())?)))
        .collect::<Result<_>>()?;
    let markable = markable.unwrap_or(match distance {
        Distance::Masi => Markable::Tu,
        Distance::Nominal => Markable::Relation,
    });
    let (name, m) = match markable {
        Markable::Tu => ("tu", tu_agreement_matrix(&coders)?),
        Markable::Antecedent => ("antecedent", antecedent_agreement_matrix(&coders)?),
        Markable::Relation => ("relation", relation_agreement_matrix(&coders)?),
    };
    let report = krippendorff_alpha(&m, distance)?;
    Ok(Outcome::clean(json!({ "markable": name, "alpha": report })))
}

pub fn map_coverage(files: &[PathBuf], category: Option<Category>, tsv: bool) -> Result<Outcome> {
    need_files(files)?;
    let mut out = Vec::new();
    let mut table = String::from("file\tcategory\tscanned\ttotal\tcoverage\n");
    for f in files {
        let map = parse_exploration_list(&read(f)?).map_err(|e| CliError(format!("{}: {e}", f.display())))?;
        let cats: Vec<Option<Category>> = match category {
            Some(c) => vec![Some(c)],
            None => vec![None, Some(Category::Door), Some(Category::Shoe), Some(Category::Shovel)],
        };
        let mut rows = Vec::new();
        for c in cats {
            let label = c.map_or("all".to_string(), |c| serde_json::to_value(c).unwrap().as_str().unwrap().to_string());
            match coverage(&map, c) {
                Ok(r) => {
                    let value = *r.numer() as f64 / *r.denom() as f64;
                    let total = map.items.iter().filter(|it| c.is_none_or(|c| it.category == c)).count();
                    let scanned = map.items.iter().filter(|it| it.scanned && c.is_none_or(|c| it.category == c)).count();
                    table.push_str(&format!("{}\t{label}\t{scanned}\t{total}\t{value}\n", f.display()));
                    rows.push(json!({ "category": label, "scanned": scanned, "total": total, "coverage": value }));
                }
                Err(e) if category.is_some() => return Err(CliError(format!("{}: {e}", f.display()))),
                Err(_) => {}
            }
        }
        out.push(json!({ "file": f.display().to_string(), "coverage": rows, "warnings": map.warnings }));
    }
    Ok(Outcome::clean(out).with_tsv(tsv.then_some(table)))
}

pub fn strategy_classify(mut texts: Vec<String>, file: Option<&Path>, tsv: bool) -> Result<Outcome> {
    if let Some(f) = file {
        texts.extend(read(f)?.lines().map(str::trim).filter(|l| !l.is_empty()).map(str::to_string));
    }
    if texts.is_empty() {
        return Err(CliError("no instructions to classify".into()));
    }
    let rows: Vec<Value> = texts
        .iter()
        .map(|t| json!({ "text": t, "strategy": classify_photo_strategy(t) }))
        .collect();
    let table = tsv.then(|| {
        let mut s = String::from("strategy\ttext\n");
        for t in &texts {
            s.push_str(&format!("{}\t{t}\n", classify_photo_strategy(t)));
        }
        s
    });
    Ok(Outcome::clean(rows).with_tsv(table))
}

pub fn strategy_trace(file: &Path) -> Result<Outcome> {
    let t = transcript(file, LoadOptions::default())?;
    Ok(Outcome::clean(trace_photo_requests(&t)))
}

fn training_pairs(path: &Path) -> Result<Vec<ResponsePair>> {
    let text = read(path)?;
    if text.lines().next().is_some_and(|h| h.trim_end_matches('\r') == HEADER) {
        let t = transcript(path, LoadOptions::default())?;
        Ok(pairs_from_transcript(&extract_instruction_response_pairs(&t)))
    } else {
        load_pairs(path).map_err(CliError::from)
    }
}

pub fn dm_respond(
    utterance: &str,
    train: &Path,
    threshold: f64,
    damr: Option<&Path>,
    k: usize,
    lex: &LexiconArg,
) -> Result<Outcome> {
    let index = IntentIndex::build(&training_pairs(train)?)?;
    let policy = Policy::new(index, threshold)?;
    let dialogue_amr = match damr {
        Some(p) => {
            let lex = lexicon(lex)?;
            let entry = amr_entries(p, ParseOptions::default())?
                .into_iter()
                .next()
                .ok_or_else(|| CliError(format!("{}: no graph", p.display())))?;
            let d = validate_dialogue_amr(&lex, &entry.graph).map_err(|errs| {
                CliError(format!("{}: {}", p.display(), errs.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")))
            })?;
            Some(d)
        }
        None => None,
    };
    let decision = policy.decide(utterance, dialogue_amr.as_ref());
    let ranked: Vec<Value> = policy
        .index
        .classify(utterance, k)
        .into_iter()
        .map(|(p, s)| json!({ "instruction": p.instruction, "score": s }))
        .collect();
    Ok(Outcome::clean(json!({ "utterance": utterance, "decision": decision, "ranked": ranked })))
}
