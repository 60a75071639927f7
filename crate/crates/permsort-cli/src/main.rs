//! Command-line workbench over the core library: exact worst-case sorting
//! times, certified sorting runs, certificate verification, scan tables,
//! band classification, diagram export, level enumeration, membership, and
//! the reduced inversion number.
//!
//! Exit codes: 0 success, 1 usage or malformed input, 2 resource limit,
//! 3 certificate verification failure. Primary output is deterministic for
//! fixed arguments; cache status and other run-dependent chatter go to
//! stderr, and the one timing column in scan output is marked as such.

mod cache;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use clap::{ArgGroup, Args, Parser, Subcommand};
use permsort_core::classes::ClassHandle;
use permsort_core::diagrams;
use permsort_core::engine::{self, BfsOptions, DistanceTable, ABSOLUTE_MAX_N, DEFAULT_MAX_N};
use permsort_core::perm::Perm;
use permsort_core::sorters::{self, SortCertificate, Sorter};
use permsort_core::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cache::Cache;

#[derive(Parser)]
#[command(
    name = "permsort",
    version,
    about = "Workbench for sorting with hereditary permutation classes"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Emit machine-readable JSON on stdout instead of plain text
    #[arg(long, global = true)]
    json: bool,

    /// Cache directory (overrides PERMSORT_CACHE; default .permsort-cache/)
    #[arg(long, global = true, value_name = "DIR")]
    cache_dir: Option<PathBuf>,

    /// Permit lengths above the default cap (length 11 allocates ~40 MiB)
    #[arg(long, global = true)]
    allow_large: bool,

    /// Seed for sampled inputs such as random step tuples
    #[arg(long, global = true, value_name = "N", default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Worst-case sorting time of a class at one length
    Wst(WstArgs),
    /// Sort one permutation and write a step certificate
    Sort(SortArgs),
    /// Check a certificate file
    Verify(VerifyArgs),
    /// Worst-case table over a length range, as CSV
    Scan(ScanArgs),
    /// Place a class specification into its complexity band
    Classify(ClassifyArgs),
    /// Export adjacency graphs and sorting diagrams
    #[command(subcommand)]
    Diagram(DiagramCmd),
    /// List or count the members of a class level
    Enumerate(EnumerateArgs),
    /// Reduced inversion number of a permutation or a class level
    Rin(RinArgs),
    /// Class membership of one permutation
    Member(MemberArgs),
}

#[derive(Args)]
struct WstArgs {
    /// Class specification, e.g. Bub, "Av(231,312)", "grid([inc,inc])"
    #[arg(long)]
    spec: String,

    /// Permutation length
    #[arg(long)]
    n: usize,
}

#[derive(Args)]
#[command(group(ArgGroup::new("method").required(true).args(["sorter", "optimal"])))]
struct SortArgs {
    /// Constructive sorter: bubble, insertion, oddeven, pancake, radix,
    /// pbt, layered, or pegca
    #[arg(long)]
    sorter: Option<String>,

    /// Use a shortest step sequence found by search instead of a
    /// constructive sorter (needs --spec)
    #[arg(long, requires = "spec")]
    optimal: bool,

    /// Class to draw optimal steps from
    #[arg(long, requires = "optimal")]
    spec: Option<String>,

    /// Permutation to sort, e.g. "3 1 2" or 312
    #[arg(long)]
    perm: String,

    /// Certificate output path
    #[arg(long, value_name = "FILE", default_value = "certificate.txt")]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Certificate file written by the sort command
    cert: PathBuf,
}

#[derive(Args)]
struct ScanArgs {
    /// Class specification
    spec: String,

    /// Inclusive length range, e.g. 3..7
    range: String,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Class specification
    #[arg(long)]
    spec: String,

    /// Largest length the evidence checks may enumerate
    #[arg(long, default_value_t = 7)]
    n_max: usize,
}

#[derive(Subcommand)]
enum DiagramCmd {
    /// Adjacency graph of one permutation
    Adjacency(DiagramAdjacencyArgs),
    /// Sorting diagram of a step tuple
    Sorting(DiagramSortingArgs),
}

#[derive(Args)]
struct DiagramAdjacencyArgs {
    /// Permutation, e.g. "2 4 1 3"
    #[arg(long)]
    perm: String,

    /// Write DOT here instead of stdout (prints a summary instead)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[command(group(ArgGroup::new("source").required(true).args(["steps", "random"])))]
struct DiagramSortingArgs {
    /// Steps separated by semicolons, e.g. "2413;3214;3412"
    #[arg(long)]
    steps: Option<String>,

    /// Sample T uniform steps of length N, written T,N (uses --seed)
    #[arg(long, value_name = "T,N")]
    random: Option<String>,

    /// Write DOT here instead of stdout (prints a summary instead)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EnumerateArgs {
    /// Class specification
    #[arg(long)]
    spec: String,

    /// Permutation length
    #[arg(long)]
    n: usize,

    /// Print only the level size
    #[arg(long)]
    count: bool,
}

#[derive(Args)]
#[command(group(ArgGroup::new("query").required(true).args(["perm", "spec"])))]
struct RinArgs {
    /// Single permutation to measure
    #[arg(long, conflicts_with = "n")]
    perm: Option<String>,

    /// Class whose level maximum to measure (needs --n)
    #[arg(long, requires = "n")]
    spec: Option<String>,

    /// Permutation length for --spec
    #[arg(long, requires = "spec")]
    n: Option<usize>,
}

#[derive(Args)]
struct MemberArgs {
    /// Class specification
    #[arg(long)]
    spec: String,

    /// Permutation to test
    #[arg(long)]
    perm: String,
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // Help and version requests land here too; they print to stdout
            // and succeed, while real argument errors exit 1.
            let code = i32::from(e.use_stderr());
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::ResourceLimit(_) => 2,
                Error::Verification(_) => 3,
                _ => 1,
            }
        }
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    let opts = BfsOptions {
        allow_large: cli.allow_large,
        ..BfsOptions::default()
    };
    let cache = Cache::new(cli.cache_dir.as_deref());
    match &cli.command {
        Cmd::Wst(a) => cmd_wst(a, cli, &cache, &opts),
        Cmd::Sort(a) => cmd_sort(a, cli, &cache, &opts),
        Cmd::Verify(a) => cmd_verify(a, cli),
        Cmd::Scan(a) => cmd_scan(a, &cache, &opts),
        Cmd::Classify(a) => cmd_classify(a, cli, &cache),
        Cmd::Diagram(DiagramCmd::Adjacency(a)) => cmd_diagram_adjacency(a, cli),
        Cmd::Diagram(DiagramCmd::Sorting(a)) => cmd_diagram_sorting(a, cli),
        Cmd::Enumerate(a) => cmd_enumerate(a, cli),
        Cmd::Rin(a) => cmd_rin(a, cli, &opts),
        Cmd::Member(a) => cmd_member(a, cli),
    }
}

/// How many witness permutations the wst command prints or embeds in JSON.
const WITNESS_CAP: usize = 8;

fn cmd_wst(a: &WstArgs, cli: &Cli, cache: &Cache, opts: &BfsOptions) -> Result<()> {
    let class = ClassHandle::parse(&a.spec)?;
    let table = cache.table(&class, a.n, opts)?;
    let spec = table.spec().to_string();
    let total = factorial(a.n);
    match table.wst() {
        Some(w) => {
            let hist = table.distance_histogram();
            let count = hist[w as usize];
            let witnesses = witnesses_at(&table, a.n, Some(w))?;
            if cli.json {
                println!(
                    "{}",
                    serde_json::json!({
                        "spec": spec,
                        "n": a.n,
                        "wst": w,
                        "total": total,
                        "argmax_count": count,
                        "argmax": witnesses,
                    })
                );
            } else {
                println!("wst({spec}, {}) = {w}", a.n);
                println!(
                    "attained by {count} of {total} permutations: {}",
                    list_with_more(&witnesses, count)
                );
            }
        }
        None => {
            let order = table.generated_order();
            let unsortable = total - order;
            let witnesses = witnesses_at(&table, a.n, None)?;
            if cli.json {
                println!(
                    "{}",
                    serde_json::json!({
                        "spec": spec,
                        "n": a.n,
                        "wst": serde_json::Value::Null,
                        "total": total,
                        "generated_order": order,
                        "unsortable_count": unsortable,
                        "unsortable": witnesses,
                    })
                );
            } else {
                println!("wst({spec}, {}) = infinite", a.n);
                println!(
                    "unsortable: {unsortable} of {total} permutations: {}",
                    list_with_more(&witnesses, unsortable)
                );
            }
        }
    }
    Ok(())
}

/// First few permutations (in lexicographic order) whose sorting time is
/// `target`; None asks for the unsortable ones. Streams the level, so the
/// memory cost stays linear in the length.
fn witnesses_at(table: &DistanceTable, n: usize, target: Option<u32>) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut v: Vec<u16> = (1..=n as u16).collect();
    loop {
        let p = Perm::new(v.clone()).expect("lexicographic scan yields permutations");
        if table.sorting_time(&p)? == target {
            out.push(p.to_string());
            if out.len() == WITNESS_CAP {
                break;
            }
        }
        if !next_perm(&mut v) {
            break;
        }
    }
    Ok(out)
}

/// Steps `v` to its lexicographic successor; false once exhausted.
fn next_perm(v: &mut [u16]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn list_with_more(witnesses: &[String], count: u64) -> String {
    let mut s = witnesses.join(", ");
    if count > witnesses.len() as u64 {
        let _ = write!(s, " (+{} more)", count - witnesses.len() as u64);
    }
    s
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

fn cmd_sort(a: &SortArgs, cli: &Cli, cache: &Cache, opts: &BfsOptions) -> Result<()> {
    let p: Perm = a.perm.parse()?;
    let cert = if a.optimal {
        let spec = a.spec.as_deref().expect("clap ties --optimal to --spec");
        let class = ClassHandle::parse(spec)?;
        let table = cache.table(&class, p.len(), opts)?;
        let steps = table.shortest_steps(&class, &p)?.ok_or_else(|| {
            Error::Domain(format!("no sequence of {} members sorts {p}", table.spec()))
        })?;
        SortCertificate {
            input: p.clone(),
            class: table.spec().to_string(),
            steps,
        }
    } else {
        let token = a.sorter.as_deref().expect("clap requires a method");
        let sorter = Sorter::from_token(token).ok_or_else(|| {
            Error::Parse(format!(
                "unknown sorter {token:?}; available: {}",
                Sorter::ALL.map(Sorter::token).join(" ")
            ))
        })?;
        sorter.sort(&p)
    };
    // The contract promises a verified certificate on disk, so check before
    // reporting success; a failure here exits 3.
    sorters::verify_certificate(&cert)?;
    std::fs::write(&a.out, cert.to_text())?;
    if cli.json {
        println!(
            "{}",
            serde_json::json!({
                "input": p.to_string(),
                "class": cert.class,
                "steps": cert.steps.len(),
                "certificate": a.out.display().to_string(),
            })
        );
    } else {
        println!("{} steps", cert.steps.len());
        println!("class: {}", cert.class);
        println!("certificate written to {}", a.out.display());
    }
    Ok(())
}

fn cmd_verify(a: &VerifyArgs, cli: &Cli) -> Result<()> {
    let text = std::fs::read_to_string(&a.cert)?;
    let cert = SortCertificate::from_text(&text)?;
    sorters::verify_certificate(&cert)?;
    if cli.json {
        println!(
            "{}",
            serde_json::json!({
                "ok": true,
                "input": cert.input.to_string(),
                "class": cert.class,
                "steps": cert.steps.len(),
            })
        );
    } else {
        println!(
            "certificate ok: {} sorted in {} steps over {}",
            cert.input,
            cert.steps.len(),
            cert.class
        );
    }
    Ok(())
}

fn cmd_scan(a: &ScanArgs, cache: &Cache, opts: &BfsOptions) -> Result<()> {
    let class = ClassHandle::parse(&a.spec)?;
    let (lo, hi) = parse_range(&a.range)?;
    let spec = class.canonical_string().to_string();
    let mut out =
        String::from("spec,n,wst,level_size,rin_of_class,counting_lower_bound,runtime_ms\n");
    for n in lo..=hi {
        let t0 = Instant::now();
        let table = cache.table(&class, n, opts)?;
        let wst = match table.wst() {
            Some(w) => w.to_string(),
            None => "infinite".to_string(),
        };
        let level_size = class.level_size(n);
        let rin_c = engine::rin_of_class(&class, n, opts)?;
        let bound = engine::counting_lower_bound(n, level_size)
            .map(|b| b.to_string())
            .unwrap_or_default();
        let ms = t0.elapsed().as_millis();
        let _ = writeln!(
            out,
            "{},{n},{},{level_size},{rin_c},{},{ms}",
            csv_field(&spec),
            csv_field(&wst),
            csv_field(&bound),
        );
    }
    print!("{out}");
    Ok(())
}

/// RFC-4180 quoting: a field containing a comma, quote, or line break is
/// wrapped in quotes, with inner quotes doubled.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Parses an inclusive range written 3..7 (3..=7 is accepted as well).
fn parse_range(s: &str) -> Result<(usize, usize)> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| Error::Parse(format!("range must look like 3..7, got {s:?}")))?;
    let lo: usize = a
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad range start {a:?}")))?;
    let hi: usize = b
        .trim()
        .trim_start_matches('=')
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad range end {b:?}")))?;
    if lo > hi {
        return Err(Error::Parse(format!("range {s:?} is empty")));
    }
    Ok((lo, hi))
}

fn cmd_classify(a: &ClassifyArgs, cli: &Cli, cache: &Cache) -> Result<()> {
    let class = ClassHandle::parse(&a.spec)?;
    let verdict = cache.verdict_json(&class, a.n_max)?;
    if cli.json {
        println!("{verdict}");
        return Ok(());
    }
    let v: serde_json::Value = serde_json::from_str(&verdict)
        .map_err(|e| Error::Domain(format!("stored verdict is not valid json: {e}")))?;
    println!("spec: {}", class.canonical_string());
    println!("band: {}", v["band"].as_str().unwrap_or("?"));
    match &v["confidence"] {
        serde_json::Value::String(s) => println!("confidence: {s}"),
        other => println!("confidence: up to size {}", other["up_to_size"]),
    }
    println!("evidence:");
    for e in v["evidence"].as_array().into_iter().flatten() {
        println!(
            "  - {}: {} ({})",
            e["check"].as_str().unwrap_or(""),
            e["result"].as_str().unwrap_or(""),
            e["witness"].as_str().unwrap_or("")
        );
    }
    Ok(())
}

fn cmd_diagram_adjacency(a: &DiagramAdjacencyArgs, cli: &Cli) -> Result<()> {
    let p: Perm = a.perm.parse()?;
    let g = diagrams::adjacency_graph(&p);
    if cli.json {
        println!("{}", diagrams::export_json(&g));
        return Ok(());
    }
    let dot = diagrams::export_dot(&g);
    match &a.out {
        Some(path) => {
            std::fs::write(path, &dot)?;
            println!(
                "adjacency graph of {p}: {} vertices, {} edges",
                g.vertex_count(),
                g.edge_count()
            );
            println!("dot written to {}", path.display());
        }
        None => print!("{dot}"),
    }
    Ok(())
}

fn cmd_diagram_sorting(a: &DiagramSortingArgs, cli: &Cli) -> Result<()> {
    let steps: Vec<Perm> = if let Some(text) = &a.steps {
        text.split(';')
            .map(|t| t.trim().parse())
            .collect::<Result<_>>()?
    } else {
        let (t, n) = parse_pair(a.random.as_deref().expect("clap requires a source"))?;
        if t == 0 || n == 0 {
            return Err(Error::Parse("both T and N must be positive".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
        (0..t).map(|_| random_perm(n, &mut rng)).collect()
    };
    let sd = diagrams::build_sorting_diagram(&steps)?;
    if cli.json {
        println!("{}", sd.to_json());
        return Ok(());
    }
    let dot = sd.to_dot();
    match &a.out {
        Some(path) => {
            std::fs::write(path, &dot)?;
            println!(
                "sorting diagram: {} steps of length {}",
                sd.step_count(),
                sd.n()
            );
            println!(
                "vertices: {}, edges: {}, crossings: {}",
                sd.graph().vertex_count(),
                sd.graph().edge_count(),
                diagrams::straight_line_crossings(&sd)
            );
            println!("composition: {}", sd.composition());
            println!("dot written to {}", path.display());
        }
        None => print!("{dot}"),
    }
    Ok(())
}

/// Parses the T,N argument of --random.
fn parse_pair(s: &str) -> Result<(usize, usize)> {
    let (t, n) = s
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("expected T,N such as 2,4, got {s:?}")))?;
    let t = t
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad step count {t:?}")))?;
    let n = n
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad length {n:?}")))?;
    Ok((t, n))
}

fn random_perm(n: usize, rng: &mut ChaCha8Rng) -> Perm {
    let mut v: Vec<u16> = (1..=n as u16).collect();
    for i in (1..v.len()).rev() {
        let j = rng.gen_range(0..=i);
        v.swap(i, j);
    }
    Perm::new(v).expect("shuffled values form a permutation")
}

fn cmd_enumerate(a: &EnumerateArgs, cli: &Cli) -> Result<()> {
    if a.n > ABSOLUTE_MAX_N || (a.n > DEFAULT_MAX_N && !cli.allow_large) {
        return Err(Error::ResourceLimit(format!(
            "enumerating length {} sweeps {}! arrangements; the cap is {} ({} with --allow-large)",
            a.n, a.n, DEFAULT_MAX_N, ABSOLUTE_MAX_N
        )));
    }
    let class = ClassHandle::parse(&a.spec)?;
    if a.count {
        let count = class.level_size(a.n);
        if cli.json {
            println!(
                "{}",
                serde_json::json!({
                    "spec": class.canonical_string(),
                    "n": a.n,
                    "count": count,
                })
            );
        } else {
            println!("{count}");
        }
        return Ok(());
    }
    let level = class.level(a.n);
    if cli.json {
        let members: Vec<String> = level.iter().map(Perm::to_string).collect();
        println!(
            "{}",
            serde_json::json!({
                "spec": class.canonical_string(),
                "n": a.n,
                "count": members.len(),
                "members": members,
            })
        );
    } else {
        let mut out = String::new();
        for p in level.iter() {
            let _ = writeln!(out, "{p}");
        }
        print!("{out}");
    }
    Ok(())
}

fn cmd_rin(a: &RinArgs, cli: &Cli, opts: &BfsOptions) -> Result<()> {
    if let Some(text) = &a.perm {
        let p: Perm = text.parse()?;
        let r = engine::rin(&p, opts)?;
        if cli.json {
            println!("{}", serde_json::json!({ "perm": p.to_string(), "rin": r }));
        } else {
            println!("{r}");
        }
    } else {
        let spec = a.spec.as_deref().expect("clap requires a query");
        let n = a.n.expect("clap ties --spec to --n");
        let class = ClassHandle::parse(spec)?;
        let r = engine::rin_of_class(&class, n, opts)?;
        if cli.json {
            println!(
                "{}",
                serde_json::json!({
                    "spec": class.canonical_string(),
                    "n": n,
                    "rin_of_class": r,
                })
            );
        } else {
            println!("{r}");
        }
    }
    Ok(())
}

fn cmd_member(a: &MemberArgs, cli: &Cli) -> Result<()> {
    let class = ClassHandle::parse(&a.spec)?;
    let p: Perm = a.perm.parse()?;
    let answer = class.member(&p);
    if cli.json {
        println!(
            "{}",
            serde_json::json!({
                "spec": class.canonical_string(),
                "perm": p.to_string(),
                "member": answer,
            })
        );
    } else {
        println!("{answer}");
    }
    Ok(())
}
