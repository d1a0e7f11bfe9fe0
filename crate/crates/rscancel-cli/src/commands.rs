//! Subcommands other than `build`.

use std::path::Path;

use rscancel::dehn::{
    build_index, dehn_reduce, required_cap, verify_embedding, verify_nup, EmbeddingOptions, EmbeddingReport, Gate, NupReport,
    Verdict,
};
use rscancel::genericity::{
    count_pattern_exact, csv_header, csv_row, mc_graphical, mc_presentation, BaseGraph, PatternQuery, SubdivisionModel,
};
use rscancel::graph::{io, LabeledGraph};
use rscancel::rips_segev::{check_rs_condition, gen_power_coefficients, gen_underlying, moore_bound, RsCheck};
use rscancel::{check_gr, parse_rational, PieceReport, Rational, Word};
use serde::Serialize;

use crate::build::{load_coefficients, load_underlying, pretty, WitnessFile, VERSION};
use crate::fail::{read, write, CliError, CliResult};

pub fn lambda(s: &str) -> CliResult<Rational> {
    let l = parse_rational(s).map_err(|e| CliError::parse(e.to_string()))?;
    if l <= Rational::from_integer(0) || l >= Rational::from_integer(1) {
        return Err(CliError::usage(format!("λ must lie in (0, 1), got {l}")));
    }
    Ok(l)
}

/// Accepts `gamma.json` as written by `build` or DOT as written by it.
pub fn load_graph(path: &Path) -> CliResult<LabeledGraph> {
    let text = read(path)?;
    let ctx = path.display().to_string();
    if text.trim_start().starts_with("digraph") {
        io::from_dot(&text).map_err(|e| CliError::from_lib(&ctx, e))
    } else {
        io::from_json(&text).map_err(|e| CliError::from_lib(&ctx, e))
    }
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn check(graph: &Path, l: Rational) -> CliResult<PieceReport> {
    let g = load_graph(graph)?;
    check_gr(&g, l).map_err(|e| CliError::from_lib("small cancellation", e))
}

#[derive(Debug, Serialize)]
pub struct Clause {
    pub clause: &'static str,
    /// PASS, FAIL, INCONCLUSIVE or SKIPPED.
    pub status: &'static str,
    pub conditional: bool,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub lambda: String,
    /// λ used by Dehn's algorithm, at most 1/6.
    pub dehn_lambda: String,
    pub certified: bool,
    pub criterion_value: Option<String>,
    pub gate: String,
    pub relator_cap: usize,
    pub relators: Option<usize>,
    pub clauses: Vec<Clause>,
    pub embedding: Option<EmbeddingReport>,
    pub nup: NupReport,
}

pub struct VerifyArgs<'a> {
    pub graph: &'a Path,
    pub witnesses: &'a Path,
    pub lambda: Rational,
    pub relator_cap: usize,
    pub allow_unsafe: bool,
    pub max_pairs: usize,
    pub seed: u64,
}

fn sweep_status(all: bool, failures: usize) -> &'static str {
    if all {
        "PASS"
    } else if failures > 0 {
        "FAIL"
    } else {
        "INCONCLUSIVE"
    }
}

pub fn verify(args: &VerifyArgs<'_>) -> CliResult<VerifyReport> {
    let g = load_graph(args.graph)?;
    let wf: WitnessFile = serde_json::from_str(&read(args.witnesses)?)
        .map_err(|e| CliError::parse(format!("{}: {e}", args.witnesses.display())))?;
    let cert = check_gr(&g, args.lambda).map_err(|e| CliError::from_lib("small cancellation", e))?;
    let certified = cert.certified();
    let sixth = Rational::new(1, 6);
    let dehn_lambda = if args.lambda < sixth { args.lambda } else { sixth };
    let gate = if certified && args.lambda <= sixth {
        Some(Gate::Certified(args.lambda))
    } else if args.allow_unsafe {
        Some(Gate::Unsafe)
    } else {
        None
    };
    let gate_text = match gate {
        Some(Gate::Certified(l)) => format!("certified at λ = {l}"),
        Some(Gate::Unsafe) if certified => format!("criterion holds at demonstration λ = {}; Dehn verdicts conditional on λ ≤ 1/6", args.lambda),
        Some(Gate::Unsafe) => "uncertified; run with --unsafe, every group verdict is conditional".into(),
        None => "refused: the criterion does not certify λ ≤ 1/6; only the structural half was run".into(),
    };
    let idx = match gate {
        Some(gt) => Some(build_index(&g, args.relator_cap, gt).map_err(|e| CliError::from_lib("relator index", e))?),
        None => None,
    };
    let conditional = idx.as_ref().is_some_and(|i| !i.certified());
    let embedding = match (&idx, &wf.sets) {
        (Some(i), Some(s)) => {
            Some(verify_embedding(s, i, dehn_lambda, EmbeddingOptions { max_pairs: args.max_pairs, seed: args.seed, ..Default::default() }))
        }
        _ => None,
    };
    let nup = verify_nup(&wf.witnesses, &g, idx.as_ref(), dehn_lambda);
    let mut clauses = Vec::new();
    match &embedding {
        Some(e) => {
            clauses.push(Clause {
                clause: "B embeds in G",
                status: sweep_status(e.b.all_nontrivial(), e.b.failures.len()),
                conditional,
                detail: format!("{}/{} pairs nontrivial", e.b.nontrivial, e.b.pairs),
            });
            clauses.push(Clause {
                clause: "A embeds in G",
                status: sweep_status(e.a.all_nontrivial(), e.a.failures.len()),
                conditional,
                detail: format!(
                    "{}/{} pairs nontrivial, {} inconclusive ({:?})",
                    e.a.nontrivial,
                    e.a.pairs,
                    e.a.inconclusive.len(),
                    e.a_mode
                ),
            });
        }
        None => {
            for clause in ["B embeds in G", "A embeds in G"] {
                clauses.push(Clause { clause, status: "SKIPPED", conditional: false, detail: gate_text.clone() });
            }
        }
    }
    clauses.push(Clause {
        clause: "every witness relator labels a closed path",
        status: if nup.structural_pass { "PASS" } else { "FAIL" },
        conditional: false,
        detail: format!("{} witnesses, {}/{} F-unique products covered", nup.checks.len(), nup.f_unique_covered, nup.f_unique_total),
    });
    let group = match nup.group_pass {
        None => ("SKIPPED", gate_text.clone()),
        Some(true) => ("PASS", "all second factorizations differ in G".into()),
        Some(false) => {
            let bad = nup.checks.iter().filter(|c| [&c.x_differ, &c.y_differ].iter().any(|v| **v == Some(Verdict::Trivial))).count();
            let open = nup.checks.iter().filter(|c| c.group_half() == Some(false)).count() - bad;
            (if bad > 0 { "FAIL" } else { "INCONCLUSIVE" }, format!("{bad} witnesses collapse in G, {open} inconclusive"))
        }
    };
    clauses.push(Clause { clause: "second factorizations differ in G", status: group.0, conditional, detail: group.1 });
    Ok(VerifyReport {
        tool: "rscancel",
        version: VERSION,
        lambda: args.lambda.to_string(),
        dehn_lambda: dehn_lambda.to_string(),
        certified,
        criterion_value: cert.criterion_value.map(|c| c.to_string()),
        gate: gate_text,
        relator_cap: args.relator_cap,
        relators: idx.as_ref().map(|i| i.len()),
        clauses,
        embedding,
        nup,
    })
}

pub struct DehnArgs<'a> {
    pub word: &'a str,
    pub graph: &'a Path,
    pub lambda: Rational,
    pub cap: Option<usize>,
    pub allow_unsafe: bool,
}

/// Writes the trace as JSON lines: one per step, then a summary line.
pub fn dehn(args: &DehnArgs<'_>, out: &mut impl std::io::Write) -> CliResult<Verdict> {
    let w: Word = args.word.parse().map_err(|e: rscancel::ParseError| CliError::parse(format!("word: {e}")))?;
    if args.lambda > Rational::new(1, 6) {
        return Err(CliError::usage(format!("Dehn's algorithm needs λ ≤ 1/6, got {}", args.lambda)));
    }
    let g = load_graph(args.graph)?;
    let cap = args.cap.unwrap_or_else(|| required_cap(w.cyclic_syllable_len(), args.lambda));
    let gate = if args.allow_unsafe { Gate::Unsafe } else { Gate::Certified(args.lambda) };
    let idx = build_index(&g, cap, gate).map_err(|e| CliError::from_lib("relator index", e))?;
    let trace = dehn_reduce(&w, &idx, args.lambda);
    let line = |v: serde_json::Value, out: &mut dyn std::io::Write| {
        writeln!(out, "{v}").map_err(|e| CliError::io(Path::new("<stdout>"), e))
    };
    for (k, s) in trace.steps.iter().enumerate() {
        let mut v = serde_json::to_value(s).expect("step serializes");
        v["step"] = (k + 1).into();
        line(v, out)?;
    }
    let mut summary = serde_json::json!({
        "input": trace.input,
        "result": trace.result,
        "steps": trace.steps.len(),
        "definitive": trace.definitive,
        "relators": idx.len(),
        "cap": cap,
    });
    let verdict = serde_json::to_value(&trace.verdict).expect("verdict serializes");
    for (k, v) in verdict.as_object().expect("tagged enum").iter() {
        summary[k] = v.clone();
    }
    line(summary, out)?;
    Ok(trace.verdict)
}

pub fn few_relator(ts: &[usize], n: usize, trials: u64, seed: u64, exact: bool, out: Option<&Path>) -> CliResult<()> {
    let mut text = String::new();
    text.push_str(csv_header());
    if exact {
        text.push_str(",exact");
    }
    text.push('\n');
    for &t in ts {
        let e = mc_presentation(PatternQuery { t, n, trials, seed });
        text.push_str(&csv_row(t, &e));
        if exact {
            let c = count_pattern_exact(t).map_err(|e| CliError::from_lib("exact count", e))?;
            // n independent relators
            let p = 1.0 - (1.0 - c.ratio()).powi(n as i32);
            text.push_str(&format!(",{p}"));
        }
        text.push('\n');
    }
    emit(out, &text)
}

pub fn graphical(delta: BaseGraph, j: usize, thresholds: &[usize], trials: u64, seed: u64, out: Option<&Path>) -> CliResult<()> {
    let mut text = format!("{},collapsed\n", csv_header());
    for &threshold in thresholds {
        let m = SubdivisionModel { delta: delta.clone(), j, threshold };
        let e = mc_graphical(&m, trials, seed).map_err(|e| CliError::from_lib("graphical model", e))?;
        text.push_str(&format!("{},{}\n", csv_row(threshold, &e.estimate), e.collapsed));
    }
    emit(out, &text)
}

pub fn load_base_graph(path: &Path) -> CliResult<BaseGraph> {
    let g: BaseGraph =
        serde_json::from_str(&read(path)?).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
    g.validate().map_err(|e| CliError::from_lib(&path.display().to_string(), e))?;
    Ok(g)
}

pub fn coefficients_check(path: &Path) -> CliResult<RsCheck> {
    Ok(check_rs_condition(&load_coefficients(path)?))
}

pub fn coefficients_generate(rows: &[u32], out: Option<&Path>) -> CliResult<()> {
    let t = gen_power_coefficients(rows).map_err(|e| CliError::from_lib("coefficients", e))?;
    emit(out, &(t.to_json() + "\n"))
}

pub fn underlying_generate(n: usize, girth: usize, seed: u64, attempts: usize, out: Option<&Path>) -> CliResult<()> {
    let g = gen_underlying(n, girth, seed, attempts).map_err(|e| CliError::from_lib("underlying graph", e))?;
    emit(out, &(g.to_json() + "\n"))
}

#[derive(Debug, Serialize)]
pub struct UnderlyingSummary {
    pub n: usize,
    pub girth: Option<usize>,
    /// Fewest vertices an 8-regular graph of this girth can have.
    pub moore_bound: Option<String>,
}

pub fn underlying_load(path: &Path) -> CliResult<UnderlyingSummary> {
    let g = load_underlying(path)?;
    let girth = g.girth();
    Ok(UnderlyingSummary { n: g.n, girth, moore_bound: girth.map(|x| moore_bound(8, x as u64).to_string()) })
}

pub fn print_json<T: Serialize>(v: &T) {
    print!("{}", pretty(v));
}
