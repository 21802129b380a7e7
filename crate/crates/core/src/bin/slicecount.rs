use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;

use slicecount::corpus::{self, CorpusCase};
use slicecount::digraph::{format_ordering, parse_ordering, Digraph, WeightSemigroup};
use slicecount::error::{Error, Result};
use slicecount::mso::compile::{compile, input_alphabet, unit_alphabet};
use slicecount::mso::{parse_formula, Sentence};
use slicecount::oracle::{oracle_count, OracleCaps, OracleQuery};
use slicecount::ordering::{search_min_dvsn_ordering, verify_zigzag, OrderedDigraph, ZigZagVerdict};
use slicecount::pipeline::{
    audit_witnesses, count_subgraphs, count_subgraphs_explicit, preset_query, CountQuery, Mode, PRESETS,
};
use slicecount::slice::decompose_along_ordering;

#[derive(Parser)]
#[command(name = "slicecount", version, about = "Count subgraphs that are unions of k directed paths and satisfy an MSO property")]
struct Cli {
    /// Seed for generated corpora.
    #[arg(long, global = true, default_value_t = corpus::DEFAULT_SEED)]
    seed: u64,
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search an ordering of minimum directed vertex separation number.
    Order {
        graph: PathBuf,
        /// Node budget for the branch-and-bound search.
        #[arg(long)]
        budget: Option<usize>,
        /// Write the ordering to this file.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Check that every directed simple path crosses each cut at most z times.
    Verify {
        graph: PathBuf,
        ordering: PathBuf,
        #[arg(long)]
        z: usize,
    },
    /// Print the unit decomposition along an ordering.
    Decompose { graph: PathBuf, ordering: PathBuf },
    /// Compile a formula into a saturated slice graph.
    Compile {
        formula: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        z: usize,
        /// Frontier width bound; defaults to k·z.
        #[arg(long)]
        c: Option<usize>,
        /// Restrict the alphabet to sub-slices of this graph's decomposition.
        #[arg(long, requires = "ordering")]
        graph: Option<PathBuf>,
        #[arg(long)]
        ordering: Option<PathBuf>,
        /// Self-loops per letter in the generic alphabet.
        #[arg(long, default_value_t = 0)]
        loops: usize,
    },
    /// Count subgraphs through slice-language intersection.
    Count(QueryArgs),
    /// Count subgraphs by brute-force enumeration.
    Oracle(QueryArgs),
    /// Run count and oracle on the bundled corpus and print the comparison table.
    Bench {
        /// Only the first N cases.
        #[arg(long)]
        limit: Option<usize>,
    },
}

#[derive(Args)]
struct QueryArgs {
    graph: PathBuf,
    /// Ordering file, or `auto` to search one.
    ordering: String,
    /// Preset name, formula file, or inline formula text.
    formula: String,
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Zig-zag bound; defaults to the measured zig-zag number of the ordering.
    #[arg(long)]
    z: Option<usize>,
    /// Required number of vertices.
    #[arg(long)]
    l: Option<usize>,
    /// Weight semigroup: `trivial`, `sum:CAP`, or a table file.
    #[arg(long, default_value = "trivial")]
    weights: String,
    /// Count only subgraphs of maximum weight.
    #[arg(long)]
    maximal: bool,
    /// Reconstruct up to N witnesses.
    #[arg(long, default_value_t = 0)]
    witnesses: usize,
    /// Re-check witnesses with the brute-force oracle.
    #[arg(long)]
    audit: bool,
    /// Use the explicit expansion route.
    #[arg(long)]
    explicit: bool,
    /// Print per-stage sizes and timings.
    #[arg(long)]
    stats: bool,
    /// Emit a JSON summary.
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let out = &mut std::io::stdout().lock();
    match cli.command {
        Command::Order { graph, budget, output } => {
            let g = Digraph::load(&graph, &WeightSemigroup::trivial())?;
            let (ordering, d) = search_min_dvsn_ordering(&g, budget)?;
            if let Some(path) = output {
                std::fs::write(path, format_ordering(&ordering))?;
            }
            writeln!(out, "ordering: {}", format_ordering(&ordering).trim_end())?;
            writeln!(out, "dvsn: {d}")?;
            writeln!(out, "bound: z <= {}", 2 * d + 1)?;
        }
        Command::Verify { graph, ordering, z } => {
            let g = Digraph::load(&graph, &WeightSemigroup::trivial())?;
            let ord = load_ordering(&ordering)?;
            match verify_zigzag(&g, &ord, z)? {
                ZigZagVerdict::Verified => writeln!(out, "verified")?,
                ZigZagVerdict::Counterexample(p) => {
                    writeln!(out, "counterexample: {}", join(&p, " -> "))?;
                    return Ok(ExitCode::from(4));
                }
            }
        }
        Command::Decompose { graph, ordering } => {
            let g = Digraph::load(&graph, &WeightSemigroup::trivial())?;
            let ord = load_ordering(&ordering)?;
            write!(out, "{}", decompose_along_ordering(&g, &ord)?.to_text())?;
        }
        Command::Compile { formula, k, z, c, graph, ordering, loops } => {
            let sentence = load_formula(&formula)?;
            let c = c.unwrap_or(k * z);
            let alphabet = match (graph, ordering) {
                (Some(g), Some(o)) => {
                    let g = Digraph::load(&g, &WeightSemigroup::trivial())?;
                    let u = decompose_along_ordering(&g, &load_ordering(&o)?)?;
                    input_alphabet(&u, c)?
                }
                _ => unit_alphabet(c, &[], &[], loops),
            };
            let sg = compile(&sentence, k, z, c, &alphabet)?;
            write!(out, "{}", sg.to_text())?;
        }
        Command::Count(args) => return count(out, &args, false),
        Command::Oracle(args) => return count(out, &args, true),
        Command::Bench { limit } => return bench(out, cli.seed, cli.jobs, limit),
    }
    Ok(ExitCode::SUCCESS)
}

fn join<T: ToString>(items: &[T], sep: &str) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

fn load_ordering(path: &Path) -> Result<Vec<usize>> {
    parse_ordering(&std::fs::read_to_string(path)?)
}

fn load_formula(arg: &str) -> Result<Sentence> {
    let text = if arg.trim_start().starts_with('(') { arg.to_string() } else { std::fs::read_to_string(arg)? };
    parse_formula(&text)
}

fn load_semigroup(spec: &str) -> Result<WeightSemigroup> {
    if spec == "trivial" {
        return Ok(WeightSemigroup::trivial());
    }
    if let Some(cap) = spec.strip_prefix("sum:") {
        let cap = cap.parse().map_err(|_| Error::InvalidSemigroup(format!("bad cap `{cap}`")))?;
        return Ok(WeightSemigroup::bounded_sum(cap));
    }
    WeightSemigroup::parse_table(&std::fs::read_to_string(spec)?)
}

fn build_query(args: &QueryArgs) -> Result<CountQuery> {
    let omega = load_semigroup(&args.weights)?;
    let g = Digraph::load(&args.graph, &omega)?;
    let ordering = if args.ordering == "auto" {
        search_min_dvsn_ordering(&g, None)?.0
    } else {
        load_ordering(Path::new(&args.ordering))?
    };
    let mut og = OrderedDigraph::new(g, ordering)?;
    let measured = og.verify();
    let z = args.z.unwrap_or(measured.max(1));
    let mut q = if PRESETS.contains(&args.formula.as_str()) {
        preset_query(&args.formula, og, args.k, z, args.l)?
    } else {
        CountQuery::new(og, load_formula(&args.formula)?, args.k, z, args.l)
    };
    if args.formula != "hamiltonian" {
        q.omega = omega;
    }
    q.mode = if args.maximal { Mode::CountMaximal } else { Mode::Count };
    q.witnesses = args.witnesses;
    Ok(q)
}

fn count(out: &mut impl Write, args: &QueryArgs, brute: bool) -> Result<ExitCode> {
    let q = build_query(args)?;
    if brute {
        let r = oracle_count(&oracle_query(&q), OracleCaps::from_env())?;
        if args.json {
            let doc = serde_json::json!({
                "count": r.count.to_str_radix(10),
                "max_weight": r.max_weight.map(|w| q.omega.element_name(w)),
            });
            writeln!(out, "{doc}")?;
        } else {
            writeln!(out, "{}", r.count)?;
        }
        return Ok(ExitCode::SUCCESS);
    }
    let r = if args.explicit { count_subgraphs_explicit(&q)? } else { count_subgraphs(&q)? };
    for w in &r.warnings {
        eprintln!("warning: {w}");
    }
    let audit = if args.audit { Some(audit_witnesses(&r, &q)?) } else { None };
    if args.json {
        writeln!(out, "{}", serde_json::json!({ "result": r, "audit": audit }))?;
    } else {
        writeln!(out, "{}", r.count)?;
        if let Some(w) = r.max_weight.filter(|_| q.mode == Mode::CountMaximal) {
            writeln!(out, "max weight: {}", q.omega.element_name(w))?;
        }
        for w in &r.witnesses {
            writeln!(out, "witness: vertices [{}] edges [{}]", join(&w.vertices, " "), join(&w.edges, " "))?;
        }
        if args.stats {
            writeln!(out, "{:<14}{:>10}{:>12}{:>12}", "stage", "vertices", "edges", "ms")?;
            for s in &r.stats {
                writeln!(out, "{:<14}{:>10}{:>12}{:>12.2}", s.stage, s.vertices, s.edges, s.millis)?;
            }
        }
    }
    if let Some(a) = audit {
        if !a.passed() {
            for (w, why) in &a.failures {
                eprintln!("audit: witness {:?} {why}", w.vertices);
            }
            return Err(Error::Audit(format!("{} of {} witnesses failed", a.failures.len(), a.checked)));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn oracle_query(q: &CountQuery) -> OracleQuery<'_> {
    OracleQuery {
        graph: &q.graph.graph,
        ordering: &q.graph.ordering,
        sentence: &q.sentence,
        k: q.k,
        z: q.z,
        l: q.l,
        omega: &q.omega,
        maximal: q.mode == Mode::CountMaximal,
    }
}

struct Row {
    pipeline: Result<BigUint>,
    oracle: Result<BigUint>,
    millis: f64,
}

fn bench_case(case: &CorpusCase) -> Row {
    let t = Instant::now();
    let run = || -> Result<(BigUint, BigUint)> {
        let og = OrderedDigraph::new(case.graph.clone(), case.ordering.clone())?;
        let q = preset_query(case.preset, og, case.k, case.z, case.l)?;
        let p = count_subgraphs(&q)?.count;
        let o = oracle_count(&oracle_query(&q), OracleCaps::from_env())?.count;
        Ok((p, o))
    };
    let (pipeline, oracle) = match run() {
        Ok((p, o)) => (Ok(p), Ok(o)),
        Err(e) => (Err(e), Err(Error::Audit("not run".into()))),
    };
    Row { pipeline, oracle, millis: t.elapsed().as_secs_f64() * 1e3 }
}

fn bench(out: &mut impl Write, seed: u64, jobs: usize, limit: Option<usize>) -> Result<ExitCode> {
    let mut cases = corpus::bundled(seed);
    if let Some(n) = limit {
        cases.truncate(n);
    }
    let jobs = jobs.max(1);
    let mut rows: Vec<Option<Row>> = (0..cases.len()).map(|_| None).collect();
    std::thread::scope(|s| {
        let chunk = cases.len().div_ceil(jobs).max(1);
        for (cs, rs) in cases.chunks(chunk).zip(rows.chunks_mut(chunk)) {
            s.spawn(move || {
                for (c, r) in cs.iter().zip(rs) {
                    *r = Some(bench_case(c));
                }
            });
        }
    });
    writeln!(out, "{:<12}{:<20}{:>3}{:>3}{:>4}{:>10}{:>10}{:>10}  status", "graph", "preset", "k", "z", "l", "count", "oracle", "ms")?;
    let mut mismatches = 0;
    for (c, row) in cases.iter().zip(rows) {
        let row = row.expect("every case ran");
        let show = |r: &Result<BigUint>| r.as_ref().map_or_else(|_| "error".to_string(), |n| n.to_string());
        let ok = matches!((&row.pipeline, &row.oracle), (Ok(a), Ok(b)) if a == b);
        if !ok {
            mismatches += 1;
        }
        let l = c.l.map_or("-".to_string(), |l| l.to_string());
        writeln!(
            out,
            "{:<12}{:<20}{:>3}{:>3}{:>4}{:>10}{:>10}{:>10.1}  {}",
            c.name,
            c.preset,
            c.k,
            c.z,
            l,
            show(&row.pipeline),
            show(&row.oracle),
            row.millis,
            if ok { "ok" } else { "MISMATCH" }
        )?;
    }
    writeln!(out, "{} cases, {} mismatches", cases.len(), mismatches)?;
    Ok(if mismatches == 0 { ExitCode::SUCCESS } else { ExitCode::from(4) })
}
