//! `rscancel build`: coefficients and Φ in, Γ and its reports out.

use std::path::Path;

use rscancel::graph::{enumerate_cycle_words, has_single_label_cycle, io, CycleScope, LabeledGraph};
use rscancel::rips_segev::witness::instructive_example;
use rscancel::rips_segev::{
    build_gamma, check_rs_condition, derive_sets, emit_presentation, emit_presentation_with_tree, extract_witnesses,
    extract_witnesses_explicit, gen_power_coefficients, gen_underlying, incidence_graph_pg27, label_underlying,
    CoefficientTable, Presentation, ProductSet, RsCheck, UnderlyingGraph, WitnessReport,
};
use rscancel::{check_gr, Gen, PieceReport};
use serde::{Deserialize, Serialize};

use crate::config::{CoefficientPlan, Resolved, UnderlyingPlan};
use crate::fail::{read, write, CliError, CliResult};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// The `witnesses.json` artifact, read back by `rscancel verify`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessFile {
    /// Absent for the instructive preset, whose A is not a union of lines.
    pub sets: Option<ProductSet>,
    pub witnesses: Vec<WitnessReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PhiSummary {
    pub n: usize,
    pub girth: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GraphSummary {
    pub vertices: usize,
    pub edges: usize,
    pub a_lines: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessSummary {
    pub count: usize,
    /// `4K` for a Rips-Segev graph.
    pub expected: Option<usize>,
    pub unique_in_f: usize,
    pub structural_pass: bool,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BuildReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub config_hash: String,
    pub config: Resolved,
    pub rs_condition: Option<RsCheck>,
    pub phi: Option<PhiSummary>,
    pub gamma: Option<GraphSummary>,
    pub small_cancellation: Option<PieceReport>,
    pub witnesses: Option<WitnessSummary>,
    pub relators: Option<usize>,
    /// Distinct cycle labels up to the cycle cap.
    pub cycle_words_up_to_cap: Option<usize>,
    /// Exit status reflects this, not the small cancellation verdict.
    pub structural_ok: bool,
    pub notes: Vec<String>,
}

pub fn load_coefficients(path: &Path) -> CliResult<CoefficientTable> {
    CoefficientTable::from_json(&read(path)?).map_err(|e| CliError::from_lib(&path.display().to_string(), e))
}

pub fn load_underlying(path: &Path) -> CliResult<UnderlyingGraph> {
    UnderlyingGraph::from_json(&read(path)?).map_err(|e| CliError::from_lib(&path.display().to_string(), e))
}

fn underlying(plan: &UnderlyingPlan) -> CliResult<UnderlyingGraph> {
    match plan {
        UnderlyingPlan::File(p) => load_underlying(p),
        UnderlyingPlan::Pg27 => Ok(incidence_graph_pg27()),
        UnderlyingPlan::Generate { n, girth, seed, attempts } => {
            gen_underlying(*n, *girth, *seed, *attempts).map_err(|e| CliError::from_lib("underlying graph", e))
        }
    }
}

fn power_rows(rows: &Option<Vec<u32>>, n: usize) -> CliResult<CoefficientTable> {
    let rows = rows.clone().unwrap_or_else(|| (1..=n as u32).collect());
    gen_power_coefficients(&rows).map_err(|e| CliError::from_lib("coefficients", e))
}

fn cycle_count(g: &LabeledGraph, cap: usize) -> Option<usize> {
    let scope =
        if has_single_label_cycle(g, Gen::A) || has_single_label_cycle(g, Gen::B) { CycleScope::Simple } else { CycleScope::Reduced };
    enumerate_cycle_words(g, cap, scope).ok().map(|s| s.len())
}

fn summarize(witnesses: &[WitnessReport], g: &LabeledGraph, expected: Option<usize>) -> WitnessSummary {
    let failures: Vec<String> = witnesses.iter().filter_map(|w| w.verify(g).err().map(|e| format!("{}: {e}", w.z))).collect();
    WitnessSummary {
        count: witnesses.len(),
        expected,
        unique_in_f: witnesses.iter().filter(|w| w.unique_in_f).count(),
        structural_pass: failures.is_empty() && expected.is_none_or(|e| e == witnesses.len()),
        failures,
    }
}

pub struct Artifacts {
    pub report: BuildReport,
    pub graph: Option<LabeledGraph>,
    pub presentation: Option<Presentation>,
    pub witnesses: Option<WitnessFile>,
}

fn lib(what: &'static str) -> impl Fn(rscancel::Error) -> CliError {
    move |e| CliError::from_lib(what, e)
}

pub fn run(cfg: &Resolved) -> CliResult<Artifacts> {
    let mut report = BuildReport {
        tool: "rscancel",
        version: VERSION,
        config_hash: cfg.hash()?,
        config: cfg.clone(),
        rs_condition: None,
        phi: None,
        gamma: None,
        small_cancellation: None,
        witnesses: None,
        relators: None,
        cycle_words_up_to_cap: None,
        structural_ok: false,
        notes: Vec::new(),
    };
    if cfg.instructive {
        let (g, a, b) = instructive_example();
        let witnesses = extract_witnesses_explicit(&g, &a, &b).map_err(lib("witnesses"))?;
        let presentation = emit_presentation(&g).map_err(lib("presentation"))?;
        report.small_cancellation = Some(check_gr(&g, cfg.lambda).map_err(lib("small cancellation"))?);
        report.gamma = Some(GraphSummary { vertices: g.num_vertices(), edges: g.num_edges(), a_lines: 0 });
        report.witnesses = Some(summarize(&witnesses, &g, None));
        report.relators = Some(presentation.relators.len());
        report.cycle_words_up_to_cap = cycle_count(&g, cfg.cycle_cap);
        report.structural_ok = report.witnesses.as_ref().is_some_and(|w| w.structural_pass);
        report.notes.push("instructive preset: A = {a, ab}, B = {1, b}".into());
        return Ok(Artifacts {
            report,
            graph: Some(g),
            presentation: Some(presentation),
            witnesses: Some(WitnessFile { sets: None, witnesses }),
        });
    }

    // a malformed coefficient file is reported before any generation work
    let file_table = match &cfg.coefficients {
        CoefficientPlan::File(p) => Some(load_coefficients(p)?),
        CoefficientPlan::Rows(_) => None,
    };
    let phi = underlying(&cfg.underlying)?;
    report.phi = Some(PhiSummary { n: phi.n, girth: phi.girth() });
    let table = match (file_table, &cfg.coefficients) {
        (Some(t), _) => t,
        (None, CoefficientPlan::Rows(rows)) => power_rows(rows, phi.n)?,
        (None, CoefficientPlan::File(_)) => unreachable!("file tables are loaded above"),
    };
    let check = check_rs_condition(&table);
    let pass = check.pass;
    report.rs_condition = Some(check);
    if !pass {
        report.notes.push("the coefficient table fails the distinctness condition; Γ was not built".into());
        return Ok(Artifacts { report, graph: None, presentation: None, witnesses: None });
    }
    let rs = build_gamma(&label_underlying(&phi, &table).map_err(lib("labeling"))?).map_err(lib("construction"))?;
    report.gamma = Some(GraphSummary { vertices: rs.graph.num_vertices(), edges: rs.graph.num_edges(), a_lines: rs.num_lines() });
    report.small_cancellation = Some(check_gr(&rs.graph, cfg.lambda).map_err(lib("small cancellation"))?);
    let sets = derive_sets(&rs);
    let witnesses = extract_witnesses(&rs).map_err(lib("witnesses"))?;
    let presentation = emit_presentation_with_tree(&rs.graph, &rs.tree).map_err(lib("presentation"))?;
    report.witnesses = Some(summarize(&witnesses, &rs.graph, Some(4 * rs.num_lines())));
    report.relators = Some(presentation.relators.len());
    report.cycle_words_up_to_cap = cycle_count(&rs.graph, cfg.cycle_cap);
    report.structural_ok = report.witnesses.as_ref().is_some_and(|w| w.structural_pass);
    Ok(Artifacts {
        report,
        graph: Some(rs.graph),
        presentation: Some(presentation),
        witnesses: Some(WitnessFile { sets: Some(sets), witnesses }),
    })
}

pub fn write_artifacts(a: &Artifacts, out: &Path) -> CliResult<()> {
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    write(&out.join("report.json"), &pretty(&a.report))?;
    if let Some(g) = &a.graph {
        write(&out.join("gamma.json"), &(io::to_json(g) + "\n"))?;
        write(&out.join("gamma.dot"), &io::to_dot(g))?;
    }
    if let Some(p) = &a.presentation {
        write(&out.join("presentation.txt"), &p.to_string())?;
    }
    if let Some(w) = &a.witnesses {
        write(&out.join("witnesses.json"), &pretty(w))?;
    }
    Ok(())
}

pub fn pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serializes") + "\n"
}
