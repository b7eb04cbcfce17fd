//! Command-line entry point wiring all the library pieces together.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use dslab::ackermann;
use dslab::compress::{
    self, build_compressions, transcribe, CompTree, OriginOrder, DEFAULT_MAX_LEAVES,
};
use dslab::encoding::Encoding;
use dslab::extremal;
use dslab::seq::{self, Sequence};
use dslab::synth;
use dslab::verify::{self, VerifyConfig};

#[derive(Parser)]
#[command(name = "dslab", version, about = "forbidden-subsequence laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, check, or enumerate compact encodings
    Encode {
        #[command(subcommand)]
        cmd: EncodeCmd,
    },
    /// Synthesize forbidden subsequences from encodings
    Synth {
        #[command(subcommand)]
        cmd: SynthCmd,
    },
    /// Build and examine compression transcripts
    Xi {
        #[command(subcommand)]
        cmd: XiCmd,
    },
    /// Isomorphic-containment query against a text or transcript file
    Match(MatchArgs),
    /// Brute-force extremal lengths
    Ex {
        #[command(subcommand)]
        cmd: ExCmd,
    },
    /// Alphabet digraph of a sequence
    Digraph(DigraphArgs),
    /// Linear-side grammar closure
    Kv {
        #[command(subcommand)]
        cmd: KvCmd,
    },
    /// Run verification suites
    Verify(VerifyArgs),
    /// Growth and inverse-Ackermann support tables
    Report {
        #[command(subcommand)]
        cmd: ReportCmd,
    },
}

#[derive(Subcommand)]
enum EncodeCmd {
    /// Parse an encoding and echo its element structure
    Parse { encoding: String },
    /// Legality report for an encoding
    Check {
        encoding: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// All legal encodings with at most the given number of stars
    Enumerate {
        #[arg(long, default_value_t = 0)]
        max_stars: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

#[derive(Subcommand)]
enum SynthCmd {
    /// Sequences generated by one legal encoding
    Generate {
        #[arg(long)]
        encoding: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// The 17-row prototype catalog
    Prototypes {
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// The catalog members with at most the given number of stars
    Psi {
        #[arg(long, default_value_t = 0)]
        max_stars: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

#[derive(Subcommand)]
enum XiCmd {
    /// Build a transcript and write it out
    Build {
        #[arg(long)]
        i: u32,
        #[arg(long)]
        j: u64,
        #[arg(long, default_value_t = 1)]
        c: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Counting statistics of a transcript
    Stats {
        #[arg(long)]
        i: u32,
        #[arg(long)]
        j: u64,
        #[arg(long, default_value_t = 1)]
        c: u32,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Structural checks on one transcript
    Verify {
        #[arg(long)]
        i: u32,
        #[arg(long)]
        j: u64,
        #[arg(long, default_value_t = 1)]
        c: u32,
        /// comma-separated subset of regular,qpqp,implied,execute
        #[arg(long, default_value = "regular,qpqp,implied,execute")]
        checks: String,
        /// `all` or a sample size
        #[arg(long, default_value = "all")]
        sample: String,
        #[arg(long, default_value_t = 0xD51AB)]
        seed: u64,
        /// use the reversed within-origin compression order
        #[arg(long)]
        alt_order: bool,
    },
}

#[derive(Args)]
struct MatchArgs {
    /// pattern in letter or token form
    #[arg(long)]
    pattern: String,
    /// text in letter or token form
    #[arg(long)]
    text: Option<String>,
    /// file holding a sequence or a transcript
    #[arg(long)]
    text_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Subcommand)]
enum ExCmd {
    Brute {
        #[arg(long)]
        pattern: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        cap: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

#[derive(Args)]
struct DigraphArgs {
    #[arg(long)]
    sequence: String,
    #[arg(long)]
    check_scc: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Subcommand)]
enum KvCmd {
    Closure {
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 2)]
        max_k: usize,
        #[arg(long, default_value_t = 12)]
        max_len: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// all, thm51, thm52, or thm53
    suite: String,
    #[arg(long, default_value_t = 2)]
    max_i: u32,
    #[arg(long, default_value_t = 2)]
    max_j: u64,
    #[arg(long, default_value_t = 0xD51AB)]
    seed: u64,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Subcommand)]
enum ReportCmd {
    /// Exact growth table with inverse-Ackermann column
    Growth,
}

fn max_leaves() -> u64 {
    std::env::var("DSLAB_MAX_LEAVES")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_MAX_LEAVES)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, Box<dyn std::error::Error>> {
    match cli.command {
        Command::Encode { cmd } => encode_cmd(cmd),
        Command::Synth { cmd } => synth_cmd(cmd),
        Command::Xi { cmd } => xi_cmd(cmd),
        Command::Match(args) => match_cmd(args),
        Command::Ex { cmd } => ex_cmd(cmd),
        Command::Digraph(args) => digraph_cmd(args),
        Command::Kv { cmd } => kv_cmd(cmd),
        Command::Verify(args) => verify_cmd(args),
        Command::Report { cmd } => report_cmd(cmd),
    }
}

fn encode_cmd(cmd: EncodeCmd) -> Result<ExitCode, Box<dyn std::error::Error>> {
    match cmd {
        EncodeCmd::Parse { encoding } => {
            let e = Encoding::parse(&encoding)?;
            println!("{e}");
            for (k, el) in e.elements().iter().enumerate() {
                println!("  {}: {}", k + 1, el.ascii());
            }
            Ok(ExitCode::SUCCESS)
        }
        EncodeCmd::Check { encoding, format } => {
            let e = Encoding::parse(&encoding)?;
            let report = e.legality();
            if format == Format::Json {
                let v = json!({
                    "input": e.to_string(),
                    "legal": report.legal,
                    "violations": report.violations.iter().map(|r| r.label()).collect::<Vec<_>>(),
                    "class": report.class,
                });
                println!("{}", serde_json::to_string(&v)?);
            } else {
                println!(
                    "{e}: {}{}{}",
                    if report.legal { "legal" } else { "illegal" },
                    report
                        .class
                        .map(|c| format!(", class {c}"))
                        .unwrap_or_default(),
                    if report.violations.is_empty() {
                        String::new()
                    } else {
                        format!(
                            ", violations: {}",
                            report
                                .violations
                                .iter()
                                .map(|r| r.label())
                                .collect::<Vec<_>>()
                                .join(",")
                        )
                    }
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        EncodeCmd::Enumerate { max_stars, format } => {
            let all = Encoding::enumerate_legal(max_stars);
            if format == Format::Json {
                let v: Vec<_> = all
                    .iter()
                    .map(|e| {
                        json!({
                            "encoding": e.to_string(),
                            "class": e.classify(),
                            "stars": e.star_count(),
                        })
                    })
                    .collect();
                println!("{}", serde_json::to_string(&v)?);
            } else {
                for e in &all {
                    println!("{e}\tclass {}", e.classify().unwrap_or(0));
                }
                println!("total: {}", all.len());
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn synth_cmd(cmd: SynthCmd) -> Result<ExitCode, Box<dyn std::error::Error>> {
    match cmd {
        SynthCmd::Generate { encoding, format } => {
            let e = Encoding::parse(&encoding)?;
            let seqs = synth::generate(&e)?;
            if format == Format::Json {
                let v = json!({
                    "encoding": e.to_string(),
                    "class": e.classify(),
                    "sequences": seqs.iter().map(|s| s.display_string()).collect::<Vec<_>>(),
                });
                println!("{}", serde_json::to_string(&v)?);
            } else {
                for s in &seqs {
                    println!("{}", s.display_string());
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        SynthCmd::Prototypes { format } => {
            let protos = synth::prototypes();
            if format == Format::Json {
                let v: Vec<_> = protos
                    .iter()
                    .map(|p| {
                        json!({
                            "class": p.class,
                            "encoding": p.encoding,
                            "trees": p.trees.iter().map(tree_json).collect::<Vec<_>>(),
                            "sequences": p.sequences,
                            "figure_string": p.figure_string,
                            "figure_suspect": p.figure_suspect,
                            "matches_figure": p.matches_figure,
                        })
                    })
                    .collect();
                println!("{}", serde_json::to_string(&v)?);
            } else {
                for p in &protos {
                    println!(
                        "class {:>2}  {:<12} {} variant(s): {}",
                        p.class,
                        p.encoding,
                        p.trees.len(),
                        p.sequences.join(", ")
                    );
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        SynthCmd::Psi { max_stars, format } => {
            let members = synth::psi_members(max_stars);
            if format == Format::Json {
                let v: Vec<String> = members.iter().map(|s| s.display_string()).collect();
                println!("{}", serde_json::to_string(&v)?);
            } else {
                for s in &members {
                    println!("{}", s.display_string());
                }
                println!("total: {}", members.len());
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn tree_json(t: &synth::LabeledTree) -> serde_json::Value {
    fn node(t: &synth::LabeledTree, id: usize) -> serde_json::Value {
        let n = &t.nodes[id];
        json!({
            "label": n.label,
            "role": format!("{:?}", n.role),
            "children": n.children.iter().map(|&c| node(t, c)).collect::<Vec<_>>(),
        })
    }
    node(t, t.root)
}

fn build_transcript(
    i: u32,
    j: u64,
    c: u32,
    order: OriginOrder,
) -> Result<(CompTree, compress::CompressionSystem, compress::Transcript), Box<dyn std::error::Error>>
{
    let tree = CompTree::build(i, j, c, max_leaves())?;
    let sys = build_compressions(&tree, order);
    let x = transcribe(&tree, &sys);
    Ok((tree, sys, x))
}

fn xi_cmd(cmd: XiCmd) -> Result<ExitCode, Box<dyn std::error::Error>> {
    match cmd {
        XiCmd::Build { i, j, c, out } => {
            let (_, _, x) = build_transcript(i, j, c, OriginOrder::AscendingLevel)?;
            let text = x.to_file_string();
            match out {
                Some(path) => {
                    fs::write(&path, text)?;
                    println!(
                        "wrote {} symbols ({} distinct) to {}",
                        x.sequence.len(),
                        x.sequence.alphabet_size(),
                        path.display()
                    );
                }
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        XiCmd::Stats { i, j, c, format } => {
            let (tree, sys, x) = build_transcript(i, j, c, OriginOrder::AscendingLevel)?;
            let v = json!({
                "i": i, "j": j, "c": c,
                "leaves": tree.leaf_count(),
                "vertices": tree.vertex_count(),
                "compressions": sys.comps.len(),
                "length": x.sequence.len(),
                "alphabet": x.sequence.alphabet_size(),
                "expected_length": x.expected_len(),
                "expected_alphabet": x.expected_alphabet(),
            });
            if format == Format::Json {
                println!("{}", serde_json::to_string(&v)?);
            } else {
                println!(
                    "({i},{j},c={c}): L={} vertices={} compressions={} |X|={} ||X||={}",
                    tree.leaf_count(),
                    tree.vertex_count(),
                    sys.comps.len(),
                    x.sequence.len(),
                    x.sequence.alphabet_size()
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        XiCmd::Verify {
            i,
            j,
            c,
            checks,
            sample,
            seed,
            alt_order,
        } => {
            let order = if alt_order {
                OriginOrder::DescendingLevel
            } else {
                OriginOrder::AscendingLevel
            };
            let (tree, sys, x) = build_transcript(i, j, c, order)?;
            let sample: Option<u64> = match sample.as_str() {
                "all" => None,
                n => Some(n.parse()?),
            };
            let mut failed = false;
            for check in checks.split(',') {
                match check.trim() {
                    "regular" => match compress::check_regularity(&x) {
                        Some(ok) => {
                            println!("regular: {}", if ok { "pass" } else { "FAIL" });
                            failed |= !ok;
                        }
                        None => println!("regular: not applicable (i = 1 and j < c)"),
                    },
                    "qpqp" => {
                        let r = compress::check_qpqp(&x, sample, seed);
                        let ok = r.violations.is_empty();
                        println!(
                            "qpqp: {} ({} pairs)",
                            if ok { "pass" } else { "FAIL" },
                            r.pairs_checked
                        );
                        failed |= !ok;
                    }
                    "implied" => {
                        let r = compress::check_implied(&tree, &sys, &sys.participation, sample, seed);
                        let ok = r.violations.is_empty();
                        println!(
                            "implied: {} ({} applicable triples)",
                            if ok { "pass" } else { "FAIL" },
                            r.triples_checked
                        );
                        failed |= !ok;
                    }
                    "execute" => {
                        let r = compress::execute(&tree, &sys);
                        println!(
                            "execute: {} ({} compressions{})",
                            if r.valid { "pass" } else { "FAIL" },
                            r.executed,
                            if alt_order { ", reversed origin order" } else { "" }
                        );
                        failed |= !r.valid;
                    }
                    other => eprintln!("unknown check {other:?}"),
                }
            }
            Ok(if failed {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            })
        }
    }
}

fn match_cmd(args: MatchArgs) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let pattern = Sequence::parse(&args.pattern)?;
    let text = match (&args.text, &args.text_file) {
        (Some(t), None) => Sequence::parse(t)?,
        (None, Some(path)) => {
            let raw = fs::read_to_string(path)?;
            compress::parse_transcript_text(&raw)?
        }
        _ => return Err("provide exactly one of --text / --text-file".into()),
    };
    let embedding = seq::find_embedding(&pattern, &text);
    if args.format == Format::Json {
        let v = json!({
            "pattern": pattern.display_string(),
            "contained": embedding.is_some(),
            "positions": embedding.as_ref().map(|e| e.positions.clone()),
        });
        println!("{}", serde_json::to_string(&v)?);
    } else {
        match &embedding {
            Some(e) => println!("contained (positions {:?})", e.positions),
            None => println!("not contained"),
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn ex_cmd(cmd: ExCmd) -> Result<ExitCode, Box<dyn std::error::Error>> {
    match cmd {
        ExCmd::Brute {
            pattern,
            n,
            cap,
            format,
        } => {
            let p = Sequence::parse(&pattern)?;
            let r = extremal::ex_brute(&p, n, cap)?;
            if format == Format::Json {
                println!("{}", serde_json::to_string(&r)?);
            } else {
                println!(
                    "Ex({}, {n}) {} {} (witness {:?})",
                    p.display_string(),
                    match r.kind {
                        extremal::ExKind::Exact => "=",
                        extremal::ExKind::AtLeast => ">=",
                    },
                    r.value,
                    r.witness
                );
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn digraph_cmd(args: DigraphArgs) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let s = Sequence::parse(&args.sequence)?;
    let g = extremal::build_digraph(&s);
    let scc = extremal::is_strongly_connected(&g);
    if args.format == Format::Json {
        let v = json!({
            "sequence": s.display_string(),
            "vertices": g.vertices,
            "edges": g.edges,
            "strongly_connected": scc,
        });
        println!("{}", serde_json::to_string(&v)?);
    } else {
        println!("vertices: {}", g.vertices);
        println!("edges: {:?}", g.edges);
        if args.check_scc {
            println!(
                "strongly connected: {}",
                if scc { "yes" } else { "no" }
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn kv_cmd(cmd: KvCmd) -> Result<ExitCode, Box<dyn std::error::Error>> {
    match cmd {
        KvCmd::Closure {
            depth,
            max_k,
            max_len,
            format,
        } => {
            let items = extremal::kv_closure(depth, max_k, max_len);
            if format == Format::Json {
                println!("{}", serde_json::to_string(&items)?);
            } else {
                for item in &items {
                    println!("{}", item.sequence);
                }
                println!("total: {}", items.len());
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn verify_cmd(args: VerifyArgs) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let cfg = VerifyConfig {
        seed: args.seed,
        max_leaves: max_leaves(),
        ..VerifyConfig::default()
    };
    let results = match args.suite.as_str() {
        "all" => verify::run_all(&cfg),
        "thm51" => {
            let texts = verify::grid_texts(cfg.max_leaves);
            vec![verify::c7_avoidance(&cfg, &texts)]
        }
        "thm52" => {
            let texts = verify::grid_texts(cfg.max_leaves);
            vec![verify::c8_minimality(&cfg, &texts)]
        }
        "thm53" => vec![verify::c9_phi5_table()],
        other => return Err(format!("unknown suite {other:?}").into()),
    };
    if args.format == Format::Json {
        println!("{}", serde_json::to_string(&results)?);
    } else {
        for r in &results {
            println!(
                "[{}] criterion {:>2} {:<32} ({:.2}s) {}",
                if r.passed { "PASS" } else { "FAIL" },
                r.id,
                r.name,
                r.seconds,
                r.details
            );
        }
        let passed = results.iter().filter(|r| r.passed).count();
        println!("{passed}/{} criteria passed", results.len());
    }
    Ok(if results.iter().all(|r| r.passed) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn report_cmd(cmd: ReportCmd) -> Result<ExitCode, Box<dyn std::error::Error>> {
    match cmd {
        ReportCmd::Growth => {
            print!("{}", verify::alpha_support_note());
            let _ = ackermann::alpha_u64(4);
            Ok(ExitCode::SUCCESS)
        }
    }
}
