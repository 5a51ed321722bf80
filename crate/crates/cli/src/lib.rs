//! Command-line front end for `flowvol`. Parsing lives in [`Cli`]; [`run`]
//! turns a parsed command into output text and an exit code, so the binary
//! is a thin wrapper and tests can drive commands in-process.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Map, Value};

use flowvol::families::{
    ckm_volume, cry_volume, parking_functions, pic_points_binomial, pic_points_multiset, pic_star_volume, pic_volume,
    ps_block_product, ps_lattice_count, ps_volume, ps_word_volume, tesler_volume, words_expansion, words_total,
};
use flowvol::io::{parse_graph_document, parse_graph_token};
use flowvol::kostant::normalized_volume_or_zero;
use flowvol::subdivision::{
    brt_tree, ccrt_cells, ccrt_tree, num_cell_types, num_cells_crosschecks, ReductionTree, DEFAULT_NODE_CAP,
};
use flowvol::verify::{builtin_corpus, random_corpus, run_suite, Check, CorpusConfig};
use flowvol::{
    ehrhart_poly, ehrhart_value, kpf, lidskii_points_binomial, lidskii_points_multiset, lidskii_volume,
    points_indegree, unit_volume_identities, volume_indegree, Error, MultiDigraph, Netflow,
};

pub const SCHEMA: &str = "flowvol/1";

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const DISAGREEMENT: i32 = 1;
    pub const ERROR: i32 = 2;
    /// A tree export hit its node cap.
    pub const TRUNCATED: i32 = 3;
}

#[derive(Parser, Debug)]
#[command(name = "flowvol", version, about = "Exact volumes, lattice points and subdivisions of flow polytopes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Print a JSON report instead of a table.
    #[arg(long, global = true)]
    pub json: bool,
    /// Include wall-clock milliseconds per method.
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Normalized volume of F_G(a).
    Volume(VolumeArgs),
    /// Lattice points of F_G(a), i.e. the Kostant partition function.
    Points(PointsArgs),
    /// Ehrhart polynomial t -> K_G(t a).
    Ehrhart(EhrhartArgs),
    /// Cells of the canonical subdivision and the cell counts.
    Cells(GraphArgs),
    /// Export a reduction tree as JSON or DOT.
    Tree(TreeArgs),
    /// Run the cross-method identities over a corpus.
    Verify(VerifyArgs),
    /// Closed forms for special families.
    Family(FamilyArgs),
}

#[derive(Args, Debug, Clone)]
pub struct GraphArgs {
    /// `k4`, `ps3`, `pic:1,2,1`, inline `n=2;edges=1-2,2-3`, or `@FILE`.
    pub graph: String,
    /// Netflow a_1,...,a_n (the sink entry is derived). Defaults to all ones.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub netflow: Option<Vec<i64>>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum VolumeMethod {
    Lidskii,
    Indegree,
    Cells,
    Oracle,
    All,
}

#[derive(Args, Debug)]
pub struct VolumeArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long, value_enum, default_value = "all")]
    pub method: VolumeMethod,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointsMethod {
    Oracle,
    Binomial,
    Multiset,
    Indegree,
    All,
}

#[derive(Args, Debug)]
pub struct PointsArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long, value_enum, default_value = "all")]
    pub method: PointsMethod,
}

#[derive(Args, Debug)]
pub struct EhrhartArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Evaluate at this dilation instead of printing the polynomial.
    #[arg(long, conflicts_with = "poly")]
    pub eval: Option<u64>,
    /// Print the polynomial (the default).
    #[arg(long)]
    pub poly: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeKindArg {
    Ccrt,
    Brt,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeFormat {
    Json,
    Dot,
}

#[derive(Args, Debug)]
pub struct TreeArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long, value_enum, default_value = "ccrt")]
    pub kind: TreeKindArg,
    #[arg(long, value_enum, default_value = "json")]
    pub format: TreeFormat,
    /// Write the export here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_NODE_CAP)]
    pub node_cap: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusKind {
    Random,
    Builtin,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "random")]
    pub corpus: CorpusKind,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value_t = 4)]
    pub max_n: usize,
    #[arg(long, default_value_t = 8)]
    pub max_m: usize,
    #[arg(long, default_value_t = 200)]
    pub count: usize,
    #[arg(long, default_value_t = 3)]
    pub max_a: i64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyName {
    /// Volume of the CRY polytope, F_{k_{n+1}}(1,0,...,0,-1).
    Cry,
    /// Volume of the Tesler polytope, F_{k_{n+1}}(1,...,1,-n).
    Tesler,
    /// Volume of F_{k_{n+1}}(1,1,0,...,0,-2).
    Ckm,
    /// Pitman–Stanley polytope at --netflow.
    Ps,
    /// The graph Pi_n(c) at --c and --netflow.
    Pic,
    /// Parking functions of length --n.
    Parking,
    /// The word expansion of --graph.
    Words,
    /// Product formula for PS(c, d, ..., d) with --c, --d, --n.
    Block,
}

#[derive(Args, Debug)]
pub struct FamilyArgs {
    #[arg(value_enum)]
    pub name: FamilyName,
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    pub c: Option<Vec<u64>>,
    #[arg(long)]
    pub d: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    pub netflow: Option<Vec<u64>>,
    #[arg(long)]
    pub graph: Option<String>,
}

/// One quantity computed by several methods.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quantity {
    pub name: String,
    pub values: Vec<(String, String)>,
}

impl Quantity {
    fn new(name: &str) -> Self {
        Quantity { name: name.to_string(), values: Vec::new() }
    }

    fn push(&mut self, method: &str, value: impl ToString) {
        self.values.push((method.to_string(), value.to_string()));
    }

    pub fn agreement_matrix(&self) -> Vec<Vec<bool>> {
        self.values.iter().map(|(_, x)| self.values.iter().map(|(_, y)| x == y).collect()).collect()
    }

    pub fn agrees(&self) -> bool {
        self.values.windows(2).all(|w| w[0].1 == w[1].1)
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub command: String,
    pub request: Map<String, Value>,
    pub quantities: Vec<Quantity>,
    pub details: Map<String, Value>,
    pub timing_ms: Vec<(String, f64)>,
    /// Checks that failed outright, outside any quantity.
    pub failures: Vec<String>,
    pub truncated: bool,
    /// Tree export destined for standard output.
    pub export: Option<String>,
}

impl RunReport {
    fn new(command: &str) -> Self {
        RunReport { command: command.to_string(), ..Default::default() }
    }

    pub fn agreement(&self) -> bool {
        self.failures.is_empty() && self.quantities.iter().all(Quantity::agrees)
    }

    pub fn exit_code(&self) -> i32 {
        if !self.agreement() {
            exit::DISAGREEMENT
        } else if self.truncated {
            exit::TRUNCATED
        } else {
            exit::OK
        }
    }

    pub fn quantity(&self, name: &str) -> Option<&Quantity> {
        self.quantities.iter().find(|q| q.name == name)
    }

    fn time<T>(&mut self, label: &str, f: impl FnOnce() -> flowvol::Result<T>) -> flowvol::Result<T> {
        let start = Instant::now();
        let v = f()?;
        self.timing_ms.push((label.to_string(), start.elapsed().as_secs_f64() * 1e3));
        Ok(v)
    }

    pub fn to_json(&self, timing: bool) -> Value {
        let results: Vec<Value> = self
            .quantities
            .iter()
            .map(|q| {
                json!({
                    "quantity": q.name,
                    "values": q.values.iter().map(|(m, v)| json!({"method": m, "value": v})).collect::<Vec<_>>(),
                    "agreement": q.agreement_matrix(),
                })
            })
            .collect();
        let mut out = json!({
            "schema": SCHEMA,
            "command": self.command,
            "request": self.request,
            "results": results,
            "details": self.details,
            "failures": self.failures,
            "truncated": self.truncated,
            "agreement": self.agreement(),
        });
        if let Some(e) = &self.export {
            out["export"] = Value::String(e.clone());
        }
        if timing {
            let t: Map<String, Value> = self.timing_ms.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
            out["timing_ms"] = Value::Object(t);
        }
        out
    }

    pub fn to_text(&self, timing: bool) -> String {
        let mut s = String::new();
        for (k, v) in &self.request {
            s.push_str(&format!("{k:<10} {}\n", plain(v)));
        }
        for q in &self.quantities {
            s.push_str(&format!("{}\n", q.name));
            let width = q.values.iter().map(|(m, _)| m.len()).max().unwrap_or(0);
            for (m, v) in &q.values {
                let t = self.timing_ms.iter().find(|(k, _)| k == m).filter(|_| timing);
                match t {
                    Some((_, ms)) => s.push_str(&format!("  {m:<width$}  {v}  ({ms:.2} ms)\n")),
                    None => s.push_str(&format!("  {m:<width$}  {v}\n")),
                }
            }
        }
        for (k, v) in &self.details {
            match v {
                Value::Array(rows) => {
                    s.push_str(&format!("{k}\n"));
                    for r in rows {
                        s.push_str(&format!("  {}\n", plain(r)));
                    }
                }
                other => s.push_str(&format!("{k:<10} {}\n", plain(other))),
            }
        }
        for f in &self.failures {
            s.push_str(&format!("FAILED {f}\n"));
        }
        if self.truncated {
            s.push_str("truncated  yes\n");
        }
        s.push_str(&format!("agreement  {}\n", if self.agreement() { "yes" } else { "NO" }));
        s
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(plain).collect::<Vec<_>>().join(","),
        Value::Object(m) => m.iter().map(|(k, v)| format!("{k}={}", plain(v))).collect::<Vec<_>>().join(" "),
        other => other.to_string(),
    }
}

/// What the process should print and return.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

pub fn run(cli: &Cli) -> Outcome {
    match run_command(&cli.command) {
        Ok(report) => {
            let mut stderr = String::new();
            if report.truncated {
                stderr.push_str("warning: tree truncated at the node cap\n");
            }
            let stdout = if cli.json {
                let mut s = serde_json::to_string_pretty(&report.to_json(cli.timing)).expect("reports serialize");
                s.push('\n');
                s
            } else if let Some(e) = &report.export {
                e.clone()
            } else {
                report.to_text(cli.timing)
            };
            Outcome { stdout, stderr, code: report.exit_code() }
        }
        Err(e) => Outcome { stdout: String::new(), stderr: format!("error: {e}\n"), code: exit::ERROR },
    }
}

pub fn run_command(cmd: &Command) -> flowvol::Result<RunReport> {
    match cmd {
        Command::Volume(a) => cmd_volume(a),
        Command::Points(a) => cmd_points(a),
        Command::Ehrhart(a) => cmd_ehrhart(a),
        Command::Cells(a) => cmd_cells(a),
        Command::Tree(a) => cmd_tree(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Family(a) => cmd_family(a),
    }
}

/// Reads a graph spec: `@path`, a builtin token, an inline string, or a path
/// to an existing file.
pub fn load_graph(spec: &str) -> flowvol::Result<MultiDigraph> {
    let read = |path: &str| {
        std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read `{path}`: {e}")))
    };
    if let Some(path) = spec.strip_prefix('@') {
        return parse_graph_document(&read(path)?);
    }
    match parse_graph_token(spec) {
        Ok(g) => Ok(g),
        Err(e) if std::path::Path::new(spec).is_file() => parse_graph_document(&read(spec)?).map_err(|_| e),
        Err(e) => Err(e),
    }
}

fn load(args: &GraphArgs, report: &mut RunReport) -> flowvol::Result<(MultiDigraph, Netflow)> {
    let g = load_graph(&args.graph)?;
    let a = match &args.netflow {
        Some(v) => Netflow::new(v.clone()),
        None => Netflow::ones(g.n()),
    };
    a.check_for(&g)?;
    report.request.insert("graph".into(), json!(args.graph));
    report.request.insert("netflow".into(), json!(a.free()));
    Ok((g, a))
}

fn reversed(a: &Netflow) -> Netflow {
    Netflow::new(a.free().iter().rev().copied().collect())
}

fn cmd_volume(args: &VolumeArgs) -> flowvol::Result<RunReport> {
    let mut r = RunReport::new("volume");
    let (g, a) = load(&args.graph, &mut r)?;
    r.request.insert("method".into(), json!(format!("{:?}", args.method).to_lowercase()));
    let methods = match args.method {
        VolumeMethod::All => vec![VolumeMethod::Lidskii, VolumeMethod::Indegree, VolumeMethod::Cells, VolumeMethod::Oracle],
        m => vec![m],
    };
    let mut q = Quantity::new("volume");
    for m in methods {
        let (name, v) = match m {
            VolumeMethod::Lidskii => ("lidskii", r.time("lidskii", || lidskii_volume(&g, &a))?),
            // The indegree formula on the reversed graph.
            VolumeMethod::Indegree => ("indegree", r.time("indegree", || volume_indegree(&g.reverse(), &reversed(&a)))?),
            VolumeMethod::Cells => (
                "cells",
                r.time("cells", || {
                    Ok(ccrt_cells(&g, &a)?.iter().map(|c| &c.multiplicity * &c.volume_term).sum::<BigUint>())
                })?,
            ),
            VolumeMethod::Oracle => ("oracle", r.time("oracle", || normalized_volume_or_zero(&g, &a))?),
            VolumeMethod::All => unreachable!(),
        };
        q.push(name, v);
    }
    r.quantities.push(q);
    Ok(r)
}

fn cmd_points(args: &PointsArgs) -> flowvol::Result<RunReport> {
    let mut r = RunReport::new("points");
    let (g, a) = load(&args.graph, &mut r)?;
    r.request.insert("method".into(), json!(format!("{:?}", args.method).to_lowercase()));
    let methods = match args.method {
        PointsMethod::All => vec![PointsMethod::Oracle, PointsMethod::Binomial, PointsMethod::Multiset, PointsMethod::Indegree],
        m => vec![m],
    };
    let mut q = Quantity::new("points");
    for m in methods {
        let (name, v) = match m {
            PointsMethod::Oracle => ("oracle", r.time("oracle", || kpf(&g, &a.full()))?),
            PointsMethod::Binomial => ("binomial", r.time("binomial", || lidskii_points_binomial(&g, &a))?),
            PointsMethod::Multiset => ("multiset", r.time("multiset", || lidskii_points_multiset(&g, &a))?),
            PointsMethod::Indegree => ("indegree", r.time("indegree", || points_indegree(&g.reverse(), &reversed(&a)))?),
            PointsMethod::All => unreachable!(),
        };
        q.push(name, v);
    }
    r.quantities.push(q);
    Ok(r)
}

fn cmd_ehrhart(args: &EhrhartArgs) -> flowvol::Result<RunReport> {
    let mut r = RunReport::new("ehrhart");
    let (g, a) = load(&args.graph, &mut r)?;
    let e = r.time("interpolation", || ehrhart_poly(&g, &a))?;
    r.details.insert("generic_dimension".into(), json!(e.generic_dimension));
    r.details.insert("dimension".into(), json!(e.dimension));
    r.details.insert("degenerate".into(), json!(e.is_degenerate()));
    match args.eval {
        Some(t) => {
            r.request.insert("eval".into(), json!(t));
            let mut q = Quantity::new(&format!("K(t a) at t={t}"));
            q.push("count", r.time("count", || ehrhart_value(&g, &a, t))?);
            q.push("polynomial", e.eval(t as i64));
            r.quantities.push(q);
        }
        None => {
            let mut q = Quantity::new("ehrhart polynomial");
            q.push("interpolation", &e.poly);
            r.quantities.push(q);
        }
    }
    Ok(r)
}

fn cmd_cells(args: &GraphArgs) -> flowvol::Result<RunReport> {
    let mut r = RunReport::new("cells");
    let (g, a) = load(args, &mut r)?;
    let cells = r.time("census", || ccrt_cells(&g, &a))?;
    let rows: Vec<Value> = cells
        .iter()
        .map(|c| {
            json!({
                "m": c.m,
                "multiplicity": c.multiplicity.to_string(),
                "volume_term": c.volume_term.to_string(),
                "points_term_binomial": c.points_term_binomial.to_string(),
                "points_term_multiset": c.points_term_multiset.to_string(),
            })
        })
        .collect();
    r.details.insert("cells".into(), Value::Array(rows));

    let mut vol = Quantity::new("volume");
    vol.push("cells", cells.iter().map(|c| &c.multiplicity * &c.volume_term).sum::<BigUint>());
    vol.push("lidskii", lidskii_volume(&g, &a)?);
    r.quantities.push(vol);

    let checks = r.time("cell counts", || num_cells_crosschecks(&g, DEFAULT_NODE_CAP))?;
    let mut m = Quantity::new("M (cells at a = 1)");
    m.push("kostant_sum", &checks.kostant_sum);
    if let Some(e) = &checks.explicit_leaves {
        m.push("explicit_tree", e);
    }
    m.push("star_points", &checks.star_points);
    m.push("star_volume", &checks.star_volume);
    m.push("circ_volume", &checks.circ_volume);
    r.quantities.push(m);

    let types = num_cell_types(&g)?;
    let mut n = Quantity::new("N (cell types)");
    n.push("determinant", &types.determinant);
    n.push("dominance", types.dominance_count);
    r.quantities.push(n);
    r.details.insert("occurring_types".into(), json!(types.occurring));
    Ok(r)
}

fn tree_summary(t: &ReductionTree, r: &mut RunReport) {
    let leaves: Vec<_> = t.leaves().collect();
    let full = leaves.iter().filter(|n| matches!(n.leaf, Some(flowvol::subdivision::LeafKind::FullDimensional(_)))).count();
    r.details.insert("nodes".into(), json!(t.nodes.len()));
    r.details.insert("full_dimensional_leaves".into(), json!(full));
    r.details.insert("lower_dimensional_leaves".into(), json!(leaves.len() - full));
    r.truncated = t.truncated;
}

fn cmd_tree(args: &TreeArgs) -> flowvol::Result<RunReport> {
    let mut r = RunReport::new("tree");
    let (g, a) = load(&args.graph, &mut r)?;
    r.request.insert("kind".into(), json!(format!("{:?}", args.kind).to_lowercase()));
    r.request.insert("format".into(), json!(format!("{:?}", args.format).to_lowercase()));
    let tree = match args.kind {
        TreeKindArg::Ccrt => ccrt_tree(&g, &a, args.node_cap)?,
        TreeKindArg::Brt => {
            g.require_outgoing_all()?;
            a.require_nonnegative()?;
            brt_tree(&g, args.node_cap)
        }
    };
    tree_summary(&tree, &mut r);
    let text = match args.format {
        TreeFormat::Json => {
            let mut s = serde_json::to_string_pretty(&tree.to_json()).expect("trees serialize");
            s.push('\n');
            s
        }
        TreeFormat::Dot => tree.to_dot(),
    };
    match &args.out {
        Some(path) => {
            std::fs::write(path, text)
                .map_err(|e| Error::Parse(format!("cannot write `{}`: {e}", path.display())))?;
            r.details.insert("written".into(), json!(path.display().to_string()));
        }
        None => r.export = Some(text),
    }
    Ok(r)
}

fn cmd_verify(args: &VerifyArgs) -> flowvol::Result<RunReport> {
    let mut r = RunReport::new("verify");
    let cases = match args.corpus {
        CorpusKind::Builtin => {
            r.request.insert("corpus".into(), json!("builtin"));
            builtin_corpus()
        }
        CorpusKind::Random => {
            let cfg = CorpusConfig {
                seed: args.seed,
                count: args.count,
                max_n: args.max_n,
                max_m: args.max_m,
                max_a: args.max_a,
            };
            r.request.insert("corpus".into(), json!("random"));
            r.request.insert("seed".into(), json!(args.seed));
            r.request.insert("max_n".into(), json!(args.max_n));
            r.request.insert("max_m".into(), json!(args.max_m));
            r.request.insert("count".into(), json!(args.count));
            random_corpus(&cfg)
        }
    };
    let report = r.time("suite", || Ok(run_suite(&cases, &Check::ALL)))?;
    let rows: Vec<Value> = report
        .outcomes
        .iter()
        .map(|o| {
            json!({
                "check": serde_json::to_value(o.check).expect("checks serialize"),
                "passed": o.passed,
                "skipped": o.skipped,
                "failed": o.failed,
            })
        })
        .collect();
    r.details.insert("cases".into(), json!(report.cases));
    r.details.insert("checks".into(), Value::Array(rows));
    for o in &report.outcomes {
        if let Some(f) = &o.first_failure {
            r.failures.push(format!("{:?}: {f}", o.check));
        }
    }
    Ok(r)
}

fn need<T: Clone>(v: &Option<T>, flag: &str) -> flowvol::Result<T> {
    v.clone().ok_or_else(|| Error::BadParams(format!("this family needs --{flag}")))
}

fn cmd_family(args: &FamilyArgs) -> flowvol::Result<RunReport> {
    let mut r = RunReport::new("family");
    r.request.insert("family".into(), json!(format!("{:?}", args.name).to_lowercase()));
    let complete = |n: u64| MultiDigraph::complete(n as usize + 1);
    let signed = |a: &[u64]| Netflow::new(a.iter().map(|&x| x as i64).collect());
    match args.name {
        FamilyName::Cry => {
            let n = need(&args.n, "n")?;
            r.request.insert("n".into(), json!(n));
            let g = complete(n)?;
            let ids = unit_volume_identities(&g)?;
            let mut q = Quantity::new("volume");
            q.push("catalan_product", cry_volume(n));
            q.push("lidskii", &ids.volume);
            q.push("kostant_out", &ids.via_outdegrees);
            if let Some(v) = &ids.via_indegrees {
                q.push("kostant_in", v);
            }
            r.quantities.push(q);
        }
        FamilyName::Tesler => {
            let n = need(&args.n, "n")?;
            r.request.insert("n".into(), json!(n));
            let mut q = Quantity::new("volume");
            q.push("hook_catalan", tesler_volume(n));
            q.push("lidskii", lidskii_volume(&complete(n)?, &Netflow::ones(n as usize))?);
            r.quantities.push(q);
        }
        FamilyName::Ckm => {
            let n = need(&args.n, "n")?;
            r.request.insert("n".into(), json!(n));
            let closed = ckm_volume(n)?;
            let mut a = vec![0i64; n as usize];
            a[0] = 1;
            a[1] = 1;
            let mut q = Quantity::new("volume");
            q.push("closed_form", closed);
            q.push("lidskii", lidskii_volume(&complete(n)?, &Netflow::new(a))?);
            r.quantities.push(q);
        }
        FamilyName::Ps => {
            let a = need(&args.netflow, "netflow")?;
            r.request.insert("netflow".into(), json!(a));
            let g = MultiDigraph::pitman_stanley(a.len())?;
            let net = signed(&a);
            let mut v = Quantity::new("volume");
            v.push("multinomial", ps_volume(&a));
            v.push("parking_words", ps_word_volume(&a));
            v.push("lidskii", lidskii_volume(&g, &net)?);
            let mut p = Quantity::new("points");
            p.push("determinant", ps_lattice_count(&a));
            p.push("oracle", kpf(&g, &net.full())?);
            r.quantities.extend([v, p]);
        }
        FamilyName::Pic => {
            let c = need(&args.c, "c")?;
            let a = args.netflow.clone().unwrap_or_else(|| vec![1; c.len()]);
            r.request.insert("c".into(), json!(c));
            r.request.insert("netflow".into(), json!(a));
            let g = MultiDigraph::pi_c(&c)?;
            let net = signed(&a);
            let mut v = Quantity::new("volume");
            v.push("closed_form", pic_volume(&c, &a)?);
            v.push("lidskii", lidskii_volume(&g, &net)?);
            let mut p = Quantity::new("points");
            p.push("binomial", pic_points_binomial(&c, &a)?);
            p.push("multiset", pic_points_multiset(&c, &a)?);
            p.push("oracle", kpf(&g, &net.full())?);
            let mut s = Quantity::new("star volume");
            s.push("determinant", pic_star_volume(&c));
            s.push("lidskii", lidskii_volume(&g.star_graph(), &Netflow::unit(c.len() + 1))?);
            r.quantities.extend([v, p, s]);
        }
        FamilyName::Parking => {
            let n = need(&args.n, "n")?;
            r.request.insert("n".into(), json!(n));
            let mut q = Quantity::new("parking functions");
            q.push("enumerated", parking_functions(n as usize).len());
            q.push("(n+1)^(n-1)", if n == 0 { BigUint::from(1u32) } else { BigUint::from(n + 1).pow(n as u32 - 1) });
            r.quantities.push(q);
        }
        FamilyName::Words => {
            let spec = need(&args.graph, "graph")?;
            r.request.insert("graph".into(), json!(spec));
            let g = load_graph(&spec)?;
            let w = words_expansion(&g)?;
            let mut q = Quantity::new("volume at a = 1");
            q.push("words", w.total());
            q.push("multinomial_sum", words_total(&g)?);
            q.push("lidskii", lidskii_volume(&g, &Netflow::ones(g.n()))?);
            r.quantities.push(q);
            r.details.insert("distinct_words".into(), json!(w.distinct_words()));
            if w.distinct_words() <= 200 {
                let rows: Vec<Value> = w
                    .entries
                    .iter()
                    .map(|(word, m)| json!({"word": word, "multiplicity": m.to_string()}))
                    .collect();
                r.details.insert("words".into(), Value::Array(rows));
            }
        }
        FamilyName::Block => {
            let (c, d, n) = (need(&args.c, "c")?, need(&args.d, "d")?, need(&args.n, "n")?);
            let &[c] = c.as_slice() else {
                return Err(Error::BadParams("block takes a single --c value".into()));
            };
            r.request.insert("c".into(), json!(c));
            r.request.insert("d".into(), json!(d));
            r.request.insert("n".into(), json!(n));
            let mut entries = vec![d; n as usize];
            entries.push(c);
            let mut q = Quantity::new("lattice points");
            q.push("product", ps_block_product(c, d, n)?);
            q.push("determinant", pic_star_volume(&entries));
            r.quantities.push(q);
        }
    }
    Ok(r)
}
