use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use thetagog::complex::{cover_complex, presentation_complex, TwoComplex};
use thetagog::constructions::{
    double_cover_gog, rewritten_presentation, theta_family, verify_paper_report, VerifyConfig, DEFAULT_MAX_N,
};
use thetagog::dot::{gog_to_dot, graph_to_dot};
use thetagog::gog::{classify_cleanliness, cover_gog, pi1_presentation, total_space};
use thetagog::io::{
    parse_document, parse_hom, to_json, ComplexDoc, Document, GogDoc, GraphDoc, MorphismDoc, PresentationDoc,
};
use thetagog::stallings::StallingsGraph;
use thetagog::whitehead::FreeFactorConfig;
use thetagog::word::FreeBasis;
use thetagog::Error;

#[derive(Parser)]
#[command(name = "thetagog", version, about = "Graphs of free groups from A(2,n,∞) Artin groups")]
struct Cli {
    /// Report `unknown` instead of a `no` that rests on Whitehead minimality.
    #[arg(long, global = true)]
    conservative_free_factor: bool,
    /// Largest n accepted by pipeline commands.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_N)]
    max_n: usize,
    /// Write output here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the whole pipeline for n and report every check.
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = ReportFormat::Table)]
        format: ReportFormat,
    },
    /// Build a pipeline object and print it in native format.
    Build {
        #[arg(value_enum)]
        what: BuildTarget,
        #[arg(long)]
        n: usize,
    },
    /// Classify a graph of graphs as VH / geometrically / algebraically clean.
    CheckClean { file: PathBuf },
    /// Cyclic cover of a complex, presentation or graph of graphs.
    Cover {
        file: PathBuf,
        #[arg(long)]
        hom: PathBuf,
    },
    /// Presentation of the fundamental group of a graph of graphs.
    Pi1 { file: PathBuf },
    /// Stallings graph of the subgroup generated by some words.
    Subgroup {
        #[arg(long)]
        rank: usize,
        /// Comma-separated generator names; inferred from the words when omitted.
        #[arg(long, value_delimiter = ',')]
        generators: Option<Vec<String>>,
        #[arg(required = true, allow_hyphen_values = true)]
        words: Vec<String>,
    },
    /// Re-emit a document as DOT or canonical native JSON.
    Export {
        #[arg(long, value_enum)]
        format: ExportFormat,
        file: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Table,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum BuildTarget {
    Presentation,
    DoubleCover,
    Family,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportFormat {
    Dot,
    Native,
}

/// Failure classes mapped to exit codes.
enum Failure {
    /// The computation ran but a verdict failed.
    Verdict(String),
    /// Malformed input or unmet precondition.
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Construction(_) => Failure::Verdict(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_document(path: &Path) -> Result<Document, Failure> {
    Ok(parse_document(&read(path)?)?)
}

fn check_n(n: usize, max_n: usize) -> Result<(), Failure> {
    if n > max_n {
        return Err(Failure::Input(format!("n = {n} exceeds --max-n {max_n}")));
    }
    Ok(())
}

fn as_complex(doc: Document) -> Result<TwoComplex, Failure> {
    match doc {
        Document::Complex(c) => Ok(c.to_complex()?),
        Document::Presentation(p) => Ok(presentation_complex(&p.to_presentation()?)),
        Document::Graph(g) => Ok(TwoComplex::new(g.to_graph()?, Vec::new())?),
        other => Err(Failure::Input(format!("expected a complex, got a {}", other.kind()))),
    }
}

fn run(cli: &Cli) -> Result<(String, bool), Failure> {
    let ff = FreeFactorConfig { conservative: cli.conservative_free_factor, ..Default::default() };
    match &cli.command {
        Command::Verify { n, format } => {
            let config = VerifyConfig { max_n: cli.max_n, free_factor: ff };
            let report = verify_paper_report(*n, &config)?;
            let text = match format {
                ReportFormat::Table => report.to_table(),
                ReportFormat::Json => report.to_json(),
            };
            Ok((text, report.passed()))
        }
        Command::Build { what, n } => {
            check_n(*n, cli.max_n)?;
            let text = match what {
                BuildTarget::Presentation => to_json(&PresentationDoc::from_presentation(&rewritten_presentation(*n)?)),
                BuildTarget::DoubleCover => to_json(&GogDoc::from_gog(&double_cover_gog(*n)?)),
                BuildTarget::Family => to_json(&GogDoc::from_gog(&theta_family(*n)?)),
            };
            Ok((text, true))
        }
        Command::CheckClean { file } => {
            let Document::Gog(doc) = read_document(file)? else {
                return Err(Failure::Input("expected a graph of graphs".into()));
            };
            let report = classify_cleanliness(&doc.to_gog()?, &ff)?;
            Ok((to_json(&report), true))
        }
        Command::Cover { file, hom } => {
            let hom = parse_hom(&read(hom)?)?;
            match read_document(file)? {
                Document::Gog(doc) => {
                    let g = doc.to_gog()?;
                    let h = hom.to_hom(&total_space(&g).skeleton)?;
                    let (cover, _) = cover_gog(&g, &h)?;
                    Ok((to_json(&GogDoc::from_gog(&cover)), true))
                }
                other => {
                    let c = as_complex(other)?;
                    let h = hom.to_hom(&c.skeleton)?;
                    let (cover, _) = cover_complex(&c, &h)?;
                    Ok((to_json(&ComplexDoc::from_complex(&cover)), true))
                }
            }
        }
        Command::Pi1 { file } => {
            let Document::Gog(doc) = read_document(file)? else {
                return Err(Failure::Input("expected a graph of graphs".into()));
            };
            let p = pi1_presentation(&doc.to_gog()?)?;
            Ok((to_json(&PresentationDoc::from_presentation(&p)), true))
        }
        Command::Subgroup { rank, generators, words } => {
            let names = match generators {
                Some(names) => names.clone(),
                None => infer_generators(words, *rank)?,
            };
            if names.len() != *rank {
                return Err(Failure::Input(format!("{} generator names for rank {rank}", names.len())));
            }
            let basis = FreeBasis::new(&names)?;
            let gens = words.iter().map(|w| basis.parse(w)).collect::<thetagog::Result<Vec<_>>>()?;
            let sg = StallingsGraph::from_generators(&gens, *rank)?;
            let out = json!({
                "generators": names,
                "rank": sg.rank(),
                "index": sg.index().to_string(),
                "vertices": sg.num_vertices(),
                "edges": sg.num_edges(),
                "basis": sg.basis().iter().map(|w| basis.format(w)).collect::<Vec<_>>(),
                "graph": GraphDoc::from_graph(sg.graph()),
                "labels": sg.graph().edge_ids().map(|e| {
                    let l = sg.label(thetagog::graph::Dart::positive(e));
                    basis.names()[l.gen].clone()
                }).collect::<Vec<_>>(),
            });
            Ok((serde_json::to_string_pretty(&out).expect("json") + "\n", true))
        }
        Command::Export { format, file } => {
            let doc = read_document(file)?;
            let text = match format {
                ExportFormat::Native => match doc {
                    Document::Graph(g) => to_json(&GraphDoc::from_graph(&g.to_graph()?)),
                    Document::Morphism(m) => to_json(&MorphismDoc::from_morphism(&m.to_morphism()?)),
                    Document::Presentation(p) => to_json(&PresentationDoc::from_presentation(&p.to_presentation()?)),
                    Document::Complex(c) => to_json(&ComplexDoc::from_complex(&c.to_complex()?)),
                    Document::Gog(g) => to_json(&GogDoc::from_gog(&g.to_gog()?)),
                },
                ExportFormat::Dot => match doc {
                    Document::Gog(g) => gog_to_dot(&g.to_gog()?),
                    Document::Morphism(_) => return Err(Failure::Input("morphisms have no DOT rendering".into())),
                    other => graph_to_dot(&as_complex(other)?.skeleton),
                },
            };
            Ok((text, true))
        }
    }
}

/// Generator names in order of first appearance, padded with `g<i>`.
fn infer_generators(words: &[String], rank: usize) -> Result<Vec<String>, Failure> {
    let mut names: Vec<String> = Vec::new();
    for w in words {
        for token in w.split_whitespace() {
            let name = token.split('^').next().unwrap_or_default();
            if name != "1" && !names.iter().any(|n| n == name) {
                names.push(name.to_string());
            }
        }
    }
    if names.len() > rank {
        return Err(Failure::Input(format!("words use {} generators but rank is {rank}", names.len())));
    }
    let mut i = 0;
    while names.len() < rank {
        let candidate = format!("g{i}");
        if !names.contains(&candidate) {
            names.push(candidate);
        }
        i += 1;
    }
    Ok(names)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok((text, passed)) => {
            if let Some(path) = &cli.output {
                if let Err(e) = fs::write(path, &text) {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                print!("{text}");
            }
            ExitCode::from(if passed { 0 } else { 1 })
        }
        Err(Failure::Verdict(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
