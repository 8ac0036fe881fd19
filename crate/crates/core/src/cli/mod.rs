//! The `contextua` command line.
//!
//! Exit codes: `0` success, `2` when a check fails or a witness is found,
//! `1` for usage and input errors. Human-facing indices are 1-based; JSON
//! indices are 0-based.

pub mod io;
pub mod render;

use std::f64::consts::FRAC_PI_2;
use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ksverify::{
    complete_substabilizers, verify_observable_ks_with, verify_projector_ks, CatalogName, Evidence, KsCertificate,
    ProjectorKsSet, VerifyMode, catalog,
};
use crate::meanking::{king_witness_set, povm_integrality_set, search_pps, KingVerdict, SearchStrategy, KING_TOL};
use crate::oracle::{oracle_weak_value, projector_matrix, sequential_measure, DenseState, MeasurementStep};
use crate::orbit::{analyze, dense_pattern_weak_values, ZeroReason};
use crate::ppsengine::{
    detect_pigeonhole, nonks_pigeonhole, propagate, weak_value_report, ConflictReason, PpsPair, Provenance, TruthValue,
};
use crate::stabilizer::StabilizerProjector;
use io::{load_set, load_structure, parse_pps, parse_state, parse_steps, SetSource};
use render::{complex, complex_json, real, real_json, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SearchKind {
    Exhaustive,
    Random,
}

/// Parsed command line.
#[derive(Debug, Parser)]
#[command(name = "contextua", version, about = "Kochen-Specker sets, weak values and pre/post-selection paradoxes")]
pub struct RunConfig {
    #[arg(long, global = true, value_enum, default_value = "table")]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct PpsArgs {
    /// Catalog name, `yu_oh`, or a JSON set file.
    #[arg(long)]
    pub set: String,
    /// Pre-selected state: signed generators or amplitudes.
    #[arg(long, allow_hyphen_values = true)]
    pub pre: String,
    #[arg(long, allow_hyphen_values = true)]
    pub post: String,
    /// Only the eigenbases of the contexts, no hybrid bases.
    #[arg(long)]
    pub eigen_only: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List catalog sets, or print one as a set file.
    Catalog {
        name: Option<String>,
        /// Close the set under sub-stabilizer contexts first.
        #[arg(long)]
        complete: bool,
    },
    /// Kochen-Specker check by parity or exhaustive coloring.
    Verify {
        #[arg(long)]
        set: String,
        #[arg(long, default_value = "parity")]
        mode: String,
        /// Check the projector form instead of the observable form.
        #[arg(long)]
        projectors: bool,
        #[arg(long)]
        eigen_only: bool,
    },
    /// Realist truth-value propagation and conflict bases.
    Assign(PpsArgs),
    /// Weak values of every projector, grouped by basis.
    WeakValues(PpsArgs),
    /// Pigeonhole detection in diagonal conflict bases.
    Pigeonhole(PpsArgs),
    /// Symbolic orbit analysis of a conflict basis.
    Orbit {
        /// `square3`, `wheelN`, `arch`, or a structure JSON file.
        #[arg(long)]
        structure: String,
        /// Compare with dense weak values.
        #[arg(long)]
        dense: bool,
    },
    /// Dense brute-force computations.
    Oracle {
        #[command(subcommand)]
        action: OracleCommand,
    },
    /// Mean King witnesses and pre/post-selection search.
    MeanKing {
        #[arg(long)]
        set: String,
        #[arg(long, allow_hyphen_values = true)]
        pre: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        post: Option<String>,
        #[arg(long, value_enum)]
        search: Option<SearchKind>,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = KING_TOL)]
        tol: f64,
    },
    /// Product-state pigeonhole on N+1 qubits without a KS set.
    Nonks {
        /// Even N.
        #[arg(long = "n")]
        n_even: usize,
        /// Odd phase index n.
        #[arg(long, allow_hyphen_values = true)]
        index: i64,
        #[arg(long, default_value_t = FRAC_PI_2)]
        theta: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// Exact branch enumeration of a sequence of parity measurements.
    Sequential {
        #[arg(long, allow_hyphen_values = true)]
        pre: String,
        #[arg(long, allow_hyphen_values = true)]
        post: String,
        /// Observables separated by `;`.
        #[arg(long)]
        steps: String,
    },
    /// Weak value of a stabilizer projector from dense matrices.
    WeakValue {
        #[arg(long, allow_hyphen_values = true)]
        pre: String,
        #[arg(long, allow_hyphen_values = true)]
        post: String,
        #[arg(long, allow_hyphen_values = true)]
        projector: String,
    },
}

/// A rendered result.
pub struct Report {
    pub text: String,
    pub table: Table,
    pub json: Value,
    /// CSV table when it differs from the text table.
    pub csv: Option<Table>,
    pub code: i32,
    pub notes: Vec<String>,
}

impl Report {
    fn new(text: String, table: Table, json: Value) -> Self {
        Self { text, table, json, csv: None, code: 0, notes: Vec::new() }
    }

    fn fail_if(mut self, cond: bool) -> Self {
        if cond {
            self.code = 2;
        }
        self
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Table => {
                let mut s = self.text.clone();
                if !self.table.headers.is_empty() {
                    if !s.is_empty() {
                        s.push('\n');
                    }
                    s.push_str(&self.table.text());
                }
                s
            }
            Format::Csv => self.csv.as_ref().unwrap_or(&self.table).csv(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("json values serialize");
                s.push('\n');
                s
            }
        }
    }
}

/// Run with process arguments, writing to stdout and stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&config) {
        Ok(report) => {
            for n in &report.notes {
                let _ = writeln!(err, "note: {n}");
            }
            let _ = out.write_all(report.render(config.format).as_bytes());
            report.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

pub fn execute(config: &RunConfig) -> Result<Report> {
    match &config.command {
        Command::Catalog { name, complete } => cmd_catalog(name.as_deref(), *complete),
        Command::Verify { set, mode, projectors, eigen_only } => cmd_verify(set, mode.parse()?, *projectors, !eigen_only),
        Command::Assign(a) => cmd_assign(a),
        Command::WeakValues(a) => cmd_weak_values(a),
        Command::Pigeonhole(a) => cmd_pigeonhole(a),
        Command::Orbit { structure, dense } => cmd_orbit(structure, *dense),
        Command::Oracle { action } => match action {
            OracleCommand::Sequential { pre, post, steps } => cmd_sequential(pre, post, steps),
            OracleCommand::WeakValue { pre, post, projector } => cmd_oracle_weak_value(pre, post, projector),
        },
        Command::MeanKing { set, pre, post, search, budget, seed, tol } => {
            cmd_mean_king(set, pre.as_deref(), post.as_deref(), *search, *budget, *seed, *tol)
        }
        Command::Nonks { n_even, index, theta } => cmd_nonks(*n_even, *index, *theta),
    }
}

fn one_based(v: &[usize]) -> String {
    if v.is_empty() {
        return "none".into();
    }
    v.iter().map(|k| (k + 1).to_string()).collect::<Vec<_>>().join(" ")
}

const CATALOG_LISTING: [&str; 8] = ["square3", "square2", "ghz_star", "wheel3", "wheel4", "wheel5", "wheel7", "classical_id(4,1)"];

fn cmd_catalog(name: Option<&str>, complete: bool) -> Result<Report> {
    let Some(name) = name else {
        let mut t = Table::new(["name", "qubits", "observables", "contexts", "negative", "parity"]);
        let mut rows = Vec::new();
        for n in CATALOG_LISTING {
            let set = catalog(&n.parse::<CatalogName>()?)?;
            let cert = verify_observable_ks_with(&set, VerifyMode::Parity)?;
            t.push(vec![
                n.into(),
                set.n_qubits.to_string(),
                set.observables.len().to_string(),
                set.contexts.len().to_string(),
                set.negative_contexts().to_string(),
                cert.verdict.to_string(),
            ]);
            rows.push(json!({"name": n, "n_qubits": set.n_qubits, "observables": set.observables.len(),
                "contexts": set.contexts.len(), "negative_contexts": set.negative_contexts(), "verdict": cert.verdict}));
        }
        let text = "wheelN takes any N >= 3; classical_id(N,m) any 0 < m < N+m.\n".to_string();
        return Ok(Report::new(text, t, Value::Array(rows)));
    };
    let mut set = crate::ksverify::catalog_by_name(name)?;
    if complete {
        set = complete_substabilizers(&set);
    }
    let mut t = Table::new(["context", "sign", "members"]);
    for (k, c) in set.contexts.iter().enumerate() {
        let members: Vec<String> = c.members.iter().map(|&m| set.observables[m].to_string()[1..].to_string()).collect();
        t.push(vec![(k + 1).to_string(), c.sign.to_string(), members.join(" ")]);
    }
    let text = format!("{}: {} qubits, {} observables, {} contexts\n", set.name, set.n_qubits, set.observables.len(), set.contexts.len());
    let json = serde_json::to_value(&set).map_err(|e| Error::Input(e.to_string()))?;
    Ok(Report::new(text, t, json))
}

fn parity_message(cert: &KsCertificate, projector_form: bool) -> String {
    match &cert.evidence {
        Evidence::Parity { incidence, contexts, negative_contexts } => {
            let odd = incidence.iter().filter(|c| *c % 2 == 1).count();
            let unit = if projector_form { "projectors" } else { "observables" };
            if cert.verdict.is_ks() {
                if projector_form {
                    format!("parity holds: {contexts} bases, every projector in an even number of them")
                } else {
                    format!("parity holds: {negative_contexts} negative IDs among {contexts}, every observable in an even number of contexts")
                }
            } else if odd > 0 {
                format!("parity fails: {odd} {unit} in an odd number of contexts")
            } else if projector_form {
                format!("parity fails: {contexts} bases")
            } else {
                format!("parity fails: {negative_contexts} negative IDs")
            }
        }
        Evidence::Exhausted { nodes } => format!("no coloring exists ({nodes} search nodes)"),
        Evidence::ProjectorColoring { values } => {
            let ones: Vec<usize> = (0..values.len()).filter(|&k| values[k] == 1).collect();
            format!("coloring found: projectors {} set to 1", one_based(&ones))
        }
        Evidence::ObservableColoring { .. } => "eigenvalue assignment found satisfying every product rule".into(),
    }
}

fn cmd_verify(reference: &str, mode: VerifyMode, projectors: bool, hybrids: bool) -> Result<Report> {
    let source = load_set(reference)?;
    let (cert, projector_form) = match (&source, projectors) {
        (SetSource::Observables(s), false) => (verify_observable_ks_with(s, mode)?, false),
        _ => (verify_projector_ks(&source.projector_set(hybrids)?, mode)?, true),
    };
    let message = parity_message(&cert, projector_form);
    let text = format!("set: {}\nverdict: {}\n{message}\n", source.name(), cert.verdict);
    let mut t = Table::new(["set", "form", "verdict"]);
    let form = if projector_form { "projectors" } else { "observables" };
    t.push(vec![source.name().into(), form.into(), cert.verdict.to_string()]);
    let json = json!({"set": source.name(), "form": form, "message": message, "certificate": cert});
    Ok(Report::new(text, t, json).fail_if(!cert.verdict.is_ks()))
}

fn load_pps_set(a: &PpsArgs) -> Result<(ProjectorKsSet, PpsPair, Vec<String>)> {
    let set = load_set(&a.set)?.projector_set(!a.eigen_only)?;
    let (pps, notes) = parse_pps(&a.pre, &a.post)?;
    Ok((set, pps, notes))
}

fn cmd_weak_values(a: &PpsArgs) -> Result<Report> {
    let (set, pps, notes) = load_pps_set(a)?;
    let report = weak_value_report(&set, &pps)?;
    let width = set.bases.iter().map(Vec::len).max().unwrap_or(0);
    let mut csv = Table::new(std::iter::once("basis".to_string()).chain((1..=width).map(|k| format!("w{k}"))));
    let mut text = Table::new(
        std::iter::once("basis".to_string())
            .chain((1..=width).map(|k| format!("p{k}")))
            .chain((1..=width).map(|k| format!("w{k}"))),
    );
    for (i, b) in report.bases.iter().enumerate() {
        let w: Vec<String> = b.weak_values.iter().map(|&c| complex(c)).collect();
        csv.push(std::iter::once((i + 1).to_string()).chain(w.iter().cloned()).collect());
        let mut row = vec![(i + 1).to_string()];
        row.extend(b.members.iter().map(|k| (k + 1).to_string()));
        row.extend(std::iter::repeat_n(String::new(), width - b.members.len()));
        row.extend(w);
        text.push(row);
    }
    let json = json!({
        "set": set.name,
        "projectors": set.projectors.iter().enumerate().map(|(k, p)| json!({
            "index": k, "label": p.to_string(), "weak_value": complex_json(report.weak_values[k])})).collect::<Vec<_>>(),
        "bases": report.bases.iter().enumerate().map(|(i, b)| json!({
            "index": i, "members": b.members, "weak_values": b.weak_values.iter().map(|&c| complex_json(c)).collect::<Vec<_>>(),
            "abl": b.abl.iter().map(|&p| real_json(p)).collect::<Vec<_>>(), "sum_residual": real_json(b.sum_residual)})).collect::<Vec<_>>(),
    });
    let summary = format!("set: {} ({} projectors, {} bases)\nmax |sum - 1| over bases: {}\n", set.name, set.projectors.len(), set.bases.len(), real(report.max_sum_residual()));
    let mut r = Report::new(summary, text, json);
    r.csv = Some(csv);
    r.notes = notes;
    Ok(r)
}

fn entry_json(e: &crate::ppsengine::Entry) -> Value {
    let value = match e.value {
        TruthValue::One => json!(1),
        TruthValue::Zero => json!(0),
        TruthValue::Unassigned => Value::Null,
    };
    let provenance = match e.provenance {
        Some(Provenance::Pps) => json!("pps"),
        Some(Provenance::ForcedOne) => json!("forced_one"),
        Some(Provenance::ForcedZero) => json!("forced_zero"),
        None => Value::Null,
    };
    json!({"value": value, "provenance": provenance})
}

fn reason_str(r: ConflictReason) -> &'static str {
    match r {
        ConflictReason::AllZero => "all_zero",
        ConflictReason::MultipleOnes => "multiple_ones",
    }
}

fn cmd_assign(a: &PpsArgs) -> Result<Report> {
    let (set, pps, notes) = load_pps_set(a)?;
    let asg = propagate(&set, &pps)?;
    let width = set.bases.iter().map(Vec::len).max().unwrap_or(0);
    let mut t = Table::new(std::iter::once("basis".to_string()).chain((1..=width).map(|k| format!("v{k}"))).chain(["conflict".to_string()]));
    for (i, b) in set.bases.iter().enumerate() {
        let mut row = vec![(i + 1).to_string()];
        row.extend(b.iter().map(|&k| asg.entries[k].to_string()));
        row.extend(std::iter::repeat_n(String::new(), width - b.len()));
        let c = asg.conflict_bases.iter().find(|c| c.basis == i).map(|c| reason_str(c.reason)).unwrap_or("");
        row.push(c.to_string());
        t.push(row);
    }
    let text = format!(
        "set: {}\nforced ones: {}\nforced zeros: {}\nconflict bases: {}\n",
        set.name,
        one_based(&asg.forced_ones()),
        one_based(&asg.forced_zeros()),
        one_based(&asg.conflict_indices())
    );
    let json = json!({
        "set": set.name,
        "entries": asg.entries.iter().map(entry_json).collect::<Vec<_>>(),
        "forced_ones": asg.forced_ones(),
        "forced_zeros": asg.forced_zeros(),
        "conflict_bases": asg.conflict_bases.iter().map(|c| json!({"basis": c.basis, "reason": reason_str(c.reason)})).collect::<Vec<_>>(),
    });
    let mut r = Report::new(text, t, json).fail_if(!asg.conflict_bases.is_empty());
    r.notes = notes;
    Ok(r)
}

fn cmd_pigeonhole(a: &PpsArgs) -> Result<Report> {
    let (set, pps, notes) = load_pps_set(a)?;
    let asg = propagate(&set, &pps)?;
    let ph = detect_pigeonhole(&asg, &set);
    let mut t = Table::new(["basis", "reason", "classical"]);
    for c in &asg.conflict_bases {
        t.push(vec![(c.basis + 1).to_string(), reason_str(c.reason).into(), ph.classical_conflict_bases.contains(&c.basis).to_string()]);
    }
    let max = ph.max_conflict_projector;
    let wv = match max {
        Some(k) => Some(crate::ppsengine::weak_value(&set.projectors[k], &pps)?),
        None => None,
    };
    let text = format!(
        "set: {}\npigeonhole: {}\nclassical conflict bases: {}\nmaximum conflict projector: {}\n",
        set.name,
        ph.pigeonhole,
        one_based(&ph.classical_conflict_bases),
        match (max, wv) {
            (Some(k), Some(w)) => format!("{} {} (weak value {})", k + 1, set.projectors[k], complex(w)),
            _ => "none".into(),
        }
    );
    let json = json!({
        "set": set.name,
        "pigeonhole": ph.pigeonhole,
        "classical_conflict_bases": ph.classical_conflict_bases,
        "conflict_bases": asg.conflict_indices(),
        "max_conflict_projector": max,
        "max_conflict_weak_value": wv.map(complex_json),
    });
    let mut r = Report::new(text, t, json).fail_if(ph.pigeonhole);
    r.notes = notes;
    Ok(r)
}

fn cmd_orbit(reference: &str, dense: bool) -> Result<Report> {
    let s = load_structure(reference)?;
    let a = analyze(&s)?;
    let g = &a.graph;
    let dense_values = if dense { Some(dense_pattern_weak_values(&s, g)?) } else { None };
    let values: Option<&Vec<f64>> = a.solution.as_ref().ok().map(|x| &x.values);
    let mut headers = vec!["pattern", "basis_position", "orbit", "relative", "weak_value"];
    if dense {
        headers.push("dense");
    }
    let mut t = Table::new(headers);
    let mut patterns = Vec::new();
    for p in 0..g.patterns.len() {
        let mut row = vec![
            g.render_pattern(&s, p),
            (g.eigenbasis_position(p) + 1).to_string(),
            (g.orbit_of[p] + 1).to_string(),
            g.relative[p].to_string(),
            values.map(|v| real(v[p])).unwrap_or_else(|| "?".into()),
        ];
        if let Some(d) = &dense_values {
            row.push(complex(d[p]));
        }
        t.push(row);
        patterns.push(json!({
            "pattern": g.render_pattern(&s, p),
            "eigenvalues": (0..g.conflict_members.len()).map(|i| g.eigenvalue(p, i)).collect::<Vec<_>>(),
            "basis_position": g.eigenbasis_position(p),
            "orbit": g.orbit_of[p],
            "relative": g.relative[p],
            "weak_value": values.map(|v| real_json(v[p])),
            "dense": dense_values.as_ref().map(|d| complex_json(d[p])),
        }));
    }
    let zero_text: Vec<String> = a
        .zero_orbits
        .iter()
        .map(|z| {
            let why = match &z.reason {
                ZeroReason::InconsistentCycle => "inconsistent cycle".to_string(),
                ZeroReason::FixedSymbol(k) => format!("{} fixed by selection", s.symbols[*k]),
                ZeroReason::ProductConstraint(w) => format!("{w} = T*S"),
            };
            format!("orbit {} ({why})", z.orbit + 1)
        })
        .collect();
    let mut text = format!(
        "patterns: {}\norbits: {}\nzero orbits: {}\nanchor: {}\n",
        g.patterns.len(),
        g.orbits.len(),
        if zero_text.is_empty() { "none".into() } else { zero_text.join(", ") },
        g.render_pattern(&s, a.anchor),
    );
    match &a.solution {
        Ok(sol) => {
            text.push_str(&format!(
                "magnitude: {}\nnegative values: {}\ncumulative anomaly: {}\n",
                real(sol.magnitude),
                sol.negative,
                real(sol.cumulative_anomaly())
            ));
        }
        Err(e) => text.push_str(&format!("no symbolic solution: {e}\n")),
    }
    if let Some(sp) = &a.sign_product {
        text.push_str(&format!("sign product: linked {} / contexts {} / neighbourhood {} / all values {}\n", sp.linked, sp.contexts, sp.neighbourhood, sp.all_values));
    }
    let json = json!({
        "symbols": s.symbols,
        "patterns": patterns,
        "orbits": g.orbits.iter().map(|o| json!({"members": o.members, "consistent": o.consistent})).collect::<Vec<_>>(),
        "zero_orbits": a.zero_orbits.iter().map(|z| z.orbit).collect::<Vec<_>>(),
        "anchor": a.anchor,
        "solution": a.solution.as_ref().ok().map(|sol| json!({
            "nonzero_orbit": sol.nonzero_orbit, "magnitude": real_json(sol.magnitude),
            "positive": sol.positive, "negative": sol.negative, "cumulative_anomaly": real_json(sol.cumulative_anomaly())})),
        "error": a.solution.as_ref().err().map(ToString::to_string),
        "sign_product": a.sign_product.as_ref().map(|sp| json!({"linked": sp.linked, "contexts": sp.contexts, "neighbourhood": sp.neighbourhood, "all_values": sp.all_values, "holds": sp.holds()})),
    });
    Ok(Report::new(text, t, json).fail_if(a.solution.is_err()))
}

fn dense_state(text: &str) -> Result<(DenseState, Option<String>)> {
    let (s, note) = parse_state(text)?;
    Ok((DenseState::from_slice(&s.to_vector()?)?, note))
}

fn cmd_sequential(pre: &str, post: &str, steps: &str) -> Result<Report> {
    let (pre, n1) = dense_state(pre)?;
    let (post, n2) = dense_state(post)?;
    let steps: Vec<MeasurementStep> = parse_steps(steps)?.into_iter().map(MeasurementStep::Parity).collect();
    let rec = sequential_measure(&pre, &post, &steps)?;
    let mut headers: Vec<String> = rec.labels.clone();
    headers.extend(["sequence", "postselection", "joint", "conditional"].map(String::from));
    let mut t = Table::new(headers);
    for b in &rec.branches {
        let mut row: Vec<String> = b.steps.iter().map(|s| format!("{:+}", s.outcome)).collect();
        row.extend([b.sequence_probability, b.postselection_probability, b.joint_probability, b.conditional_probability].map(real));
        t.push(row);
    }
    let certain = rec.certain_outcomes();
    let mut text = format!("post-selection probability: {}\n", real(rec.postselection_probability));
    for (label, c) in rec.labels.iter().zip(&certain) {
        match c {
            Some(o) => text.push_str(&format!("{label}: certain {o:+}\n")),
            None => text.push_str(&format!("{label}: P(+1) = {}\n", real(rec.marginal(rec.labels.iter().position(|l| l == label).expect("own label"), 1)))),
        }
    }
    let json = json!({
        "labels": rec.labels,
        "postselection_probability": real_json(rec.postselection_probability),
        "certain_outcomes": certain,
        "branches": rec.branches.iter().map(|b| json!({
            "outcomes": b.steps.iter().map(|s| s.outcome).collect::<Vec<_>>(),
            "step_probabilities": b.steps.iter().map(|s| real_json(s.probability)).collect::<Vec<_>>(),
            "sequence_probability": real_json(b.sequence_probability),
            "postselection_probability": real_json(b.postselection_probability),
            "joint_probability": real_json(b.joint_probability),
            "conditional_probability": real_json(b.conditional_probability)})).collect::<Vec<_>>(),
    });
    let mut r = Report::new(text, t, json);
    r.notes = n1.into_iter().chain(n2).collect();
    Ok(r)
}

fn cmd_oracle_weak_value(pre: &str, post: &str, projector: &str) -> Result<Report> {
    let (pre, n1) = dense_state(pre)?;
    let (post, n2) = dense_state(post)?;
    let p = StabilizerProjector::parse(projector)?;
    let m = projector_matrix(p.n_qubits(), p.generators());
    let w = oracle_weak_value(&pre, &post, &m)?;
    let mut t = Table::new(["projector", "weak_value"]);
    t.push(vec![p.to_string(), complex(w)]);
    let mut r = Report::new(String::new(), t, json!({"projector": p.to_string(), "weak_value": complex_json(w)}));
    r.notes = n1.into_iter().chain(n2).collect();
    Ok(r)
}

fn cmd_mean_king(
    reference: &str,
    pre: Option<&str>,
    post: Option<&str>,
    search: Option<SearchKind>,
    budget: Option<usize>,
    seed: u64,
    tol: f64,
) -> Result<Report> {
    let source = load_set(reference)?;
    let set = source.projector_set(false)?;
    let povm = povm_integrality_set(&set.projectors)?;
    let povm_text = match povm.multiple {
        Some(c) => format!("sum of projectors: {} I ({})\n", real(c), if povm.is_integer { "integer" } else { "non-integer: no all-0/1 assignment possible" }),
        None => "sum of projectors: not a multiple of I\n".into(),
    };
    let povm_json = json!({"is_multiple_of_identity": povm.is_multiple_of_identity, "multiple": povm.multiple.map(real_json), "is_integer": povm.is_integer});
    match (pre, post, search) {
        (Some(pre), Some(post), None) => {
            let (pps, notes) = parse_pps(pre, post)?;
            let w = king_witness_set(&set, &pps, tol)?;
            let mut t = Table::new(["verdict", "witness", "weak_value", "deviation"]);
            t.push(vec![
                format!("{:?}", w.verdict),
                w.witness.map(|k| (k + 1).to_string()).unwrap_or_default(),
                w.witness_value.map(complex).unwrap_or_default(),
                format!("{:.3e}", w.deviation),
            ]);
            let text = format!("set: {}\n{povm_text}{w}\n", set.name);
            let json = json!({"set": set.name, "povm": povm_json, "witness": w});
            let mut r = Report::new(text, t, json).fail_if(w.verdict == KingVerdict::Witness);
            r.notes = notes;
            Ok(r)
        }
        (None, None, Some(kind)) => {
            let (strategy, default_budget) = match kind {
                SearchKind::Exhaustive => (SearchStrategy::ExhaustiveStabilizer, usize::MAX),
                SearchKind::Random => (SearchStrategy::RandomHaar { seed }, 1000),
            };
            let rep = search_pps(&set.projectors, strategy, budget.unwrap_or(default_budget))?;
            let mut t = Table::new(["strategy", "evaluated", "best_deviation", "all_failed"]);
            t.push(vec![format!("{kind:?}").to_lowercase(), rep.evaluated.to_string(), format!("{:.6e}", rep.best_deviation), rep.all_failed.to_string()]);
            let text = format!(
                "set: {}\n{povm_text}{} candidate pairs, best deviation from {{0,1}}: {:.6e}\n{}\n",
                set.name,
                rep.evaluated,
                rep.best_deviation,
                if rep.all_failed { "every pair yields a witness" } else { "found a pair with all weak values in {0,1}" }
            );
            let json = json!({"set": set.name, "povm": povm_json, "search": rep});
            Ok(Report::new(text, t, json).fail_if(rep.all_failed))
        }
        _ => Err(Error::Input("give either --pre and --post, or --search".into())),
    }
}

fn cmd_nonks(n_even: usize, index: i64, theta: f64) -> Result<Report> {
    let r = nonks_pigeonhole(n_even, index, theta)?;
    let mut t = Table::new(["observable", "weak_value"]);
    for (o, w) in &r.id_weak_values {
        t.push(vec![o.to_string()[1..].to_string(), complex(*w)]);
    }
    let text = format!(
        "qubits: {}\nZ weak value per qubit: {}\nall ID observables forced to -1: {}\nmaximum conflict projector weak value: {}\nclosed form: {}\n",
        r.n_qubits,
        complex(r.z_weak_values[0]),
        r.conflict,
        complex(r.max_conflict_weak_value),
        complex(r.closed_form)
    );
    let json = json!({
        "n_qubits": r.n_qubits,
        "z_weak_value": complex_json(r.z_weak_values[0]),
        "id_weak_values": r.id_weak_values.iter().map(|(o, w)| json!({"observable": o, "weak_value": complex_json(*w)})).collect::<Vec<_>>(),
        "conflict": r.conflict,
        "max_conflict_weak_value": complex_json(r.max_conflict_weak_value),
        "closed_form": complex_json(r.closed_form),
    });
    Ok(Report::new(text, t, json).fail_if(r.conflict))
}
