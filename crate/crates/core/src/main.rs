use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use lexfst::io::{draw, read_text, write_text};
use lexfst::lextools::parse_wordlist;
use lexfst::numbers::{NumberFilter, NumberGrammar};
use lexfst::pipeline::GrammarSet;
use lexfst::rules::parse_rules;
use lexfst::sources::{SourceKind, SourceSet};
use lexfst::{best_path, compose, nbest, Fst, SymbolTable};

#[derive(Parser)]
#[command(name = "lexfst", version, about = "Weighted finite-state text analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Write the machine here instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ManifestArg {
    /// Grammar manifest naming the component machines.
    #[arg(short, long)]
    manifest: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a word list.
    CompileWordlist {
        input: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Compile paradigms and their stems.
    CompileParadigm {
        input: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Compile an arc-list word grammar with its sub-lexicons.
    CompileArclist {
        input: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Compile a file of rewrite rules into their composed cascade.
    CompileRules {
        input: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Build a digit-string to number-word transducer.
    BuildNumbers {
        #[arg(long)]
        lexicon: PathBuf,
        #[arg(long, default_value_t = 10)]
        base: u32,
        #[arg(long, default_value_t = lexfst::numbers::DEFAULT_MAX_DIGITS)]
        max_digits: usize,
        /// Factorization filter, e.g. `decade-flop`; may repeat.
        #[arg(long)]
        filter: Vec<NumberFilter>,
        /// Rewrite rules applied to the expanded words.
        #[arg(long)]
        cleanup: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
    /// Build the text-to-lexical analyzer of a grammar set.
    BuildAnalyzer {
        #[command(flatten)]
        manifest: ManifestArg,
        /// Include the high-cost fallback for unknown words.
        #[arg(long)]
        permissive: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Analyze text: prints the lexical analysis with its weight, then the
    /// phonemes. Without --text, each line of standard input is analyzed.
    Analyze {
        #[command(flatten)]
        manifest: ManifestArg,
        #[arg(short, long)]
        text: Option<String>,
        /// Print the disambiguated lattice instead.
        #[arg(long)]
        lattice: bool,
        /// Print the k cheapest disambiguated analyses with their weights.
        #[arg(long, value_name = "K")]
        nbest: Option<usize>,
        /// Copy unanalyzable words through at a high cost instead of failing.
        #[arg(long)]
        permissive: bool,
    },
    /// Print the analysis lattice of a text before disambiguation.
    Lattice {
        #[command(flatten)]
        manifest: ManifestArg,
        #[arg(short, long)]
        text: String,
    },
    /// Print the cheapest paths of a machine as input, output and weight.
    Bestpath {
        input: PathBuf,
        #[arg(short = 'n', long, default_value_t = 1)]
        count: usize,
    },
    /// Compose two machines.
    Compose {
        left: PathBuf,
        right: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Read a machine and print it in the text format.
    Print { input: PathBuf },
    /// Print a machine as a Graphviz graph.
    Draw { input: PathBuf },
    /// Print `states=N arcs=M` for a machine file, or for a component of a
    /// grammar set (the analyzer by default).
    Stats {
        input: Option<PathBuf>,
        #[arg(short, long)]
        manifest: Option<PathBuf>,
        #[arg(short, long)]
        component: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn emit(f: &Fst, table: &SymbolTable, out: &Output) -> Result<()> {
    let text = write_text(f, table);
    match &out.output {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn read_machine(path: &Path, table: &mut SymbolTable) -> Result<Fst> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    read_text(&text, table).with_context(|| format!("{}", path.display()))
}

fn compile_as(input: &Path, kind: SourceKind, out: &Output) -> Result<()> {
    let mut table = SymbolTable::new();
    let mut set = SourceSet::new();
    set.load_as(input, kind, &mut table)?;
    let f = set.compile(input, &table)?;
    emit(&f, &table, out)
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::CompileWordlist { input, out } => compile_as(&input, SourceKind::Wordlist, &out),
        Command::CompileParadigm { input, out } => compile_as(&input, SourceKind::Paradigm, &out),
        Command::CompileArclist { input, out } => compile_as(&input, SourceKind::Arclist, &out),
        Command::CompileRules { input, out } => compile_as(&input, SourceKind::Rules, &out),
        Command::BuildNumbers {
            lexicon,
            base,
            max_digits,
            filter,
            cleanup,
            out,
        } => {
            if base != 10 {
                bail!("only base 10 is supported");
            }
            let text = std::fs::read_to_string(&lexicon)
                .with_context(|| format!("reading {}", lexicon.display()))?;
            let mut g = NumberGrammar::new(
                parse_wordlist(&text).with_context(|| format!("{}", lexicon.display()))?,
            );
            g.max_digits = max_digits;
            g.filters = filter;
            if let Some(c) = cleanup {
                let text = std::fs::read_to_string(&c)
                    .with_context(|| format!("reading {}", c.display()))?;
                g.cleanup = parse_rules(&text).with_context(|| format!("{}", c.display()))?;
            }
            let mut table = SymbolTable::new();
            g.register(&mut table);
            let f = g.compile(&table)?;
            emit(&f, &table, &out)
        }
        Command::BuildAnalyzer {
            manifest,
            permissive,
            out,
        } => {
            let g = GrammarSet::load(&manifest.manifest)?;
            let f = if permissive {
                g.permissive_analyzer()
            } else {
                g.analyzer()
            };
            emit(f, &g.table, &out)
        }
        Command::Analyze {
            manifest,
            text,
            lattice,
            nbest,
            permissive,
        } => {
            let g = GrammarSet::load(&manifest.manifest)?;
            let mode = Mode {
                lattice,
                nbest,
                permissive,
            };
            match text {
                Some(t) => {
                    print!("{}", analyze_one(&g, &t, &mode)?);
                    Ok(())
                }
                None => analyze_batch(&g, &mode),
            }
        }
        Command::Lattice { manifest, text } => {
            let g = GrammarSet::load(&manifest.manifest)?;
            let l = g.analyze(&text).map_err(|e| e.at_stage("analyze"))?;
            print!("{}", write_text(&l, &g.table));
            Ok(())
        }
        Command::Bestpath { input, count } => {
            let mut table = SymbolTable::new();
            let f = read_machine(&input, &mut table)?;
            let paths = if count == 1 {
                vec![best_path(&f)?]
            } else {
                nbest(&f, count)
            };
            for p in paths {
                println!(
                    "{}\t{}\t{}",
                    table.render(&p.input()),
                    table.render(&p.output()),
                    p.weight
                );
            }
            Ok(())
        }
        Command::Compose { left, right, out } => {
            let mut table = SymbolTable::new();
            let a = read_machine(&left, &mut table)?;
            let b = read_machine(&right, &mut table)?;
            emit(&compose(&a, &b)?, &table, &out)
        }
        Command::Print { input } => {
            let mut table = SymbolTable::new();
            let f = read_machine(&input, &mut table)?;
            print!("{}", write_text(&f, &table));
            Ok(())
        }
        Command::Draw { input } => {
            let mut table = SymbolTable::new();
            let f = read_machine(&input, &mut table)?;
            print!("{}", draw(&f, &table));
            Ok(())
        }
        Command::Stats {
            input,
            manifest,
            component,
        } => {
            let (states, arcs) = match (input, manifest) {
                (Some(p), None) => read_machine(&p, &mut SymbolTable::new())?.stats(),
                (None, Some(m)) => {
                    let g = GrammarSet::load(&m)?;
                    match component.as_deref() {
                        None | Some("analyzer") => g.analyzer().stats(),
                        Some(key) => g
                            .component(key)
                            .with_context(|| format!("no component `{key}`"))?
                            .stats(),
                    }
                }
                _ => bail!("give either a machine file or --manifest"),
            };
            println!("states={states} arcs={arcs}");
            Ok(())
        }
    }
}

struct Mode {
    lattice: bool,
    nbest: Option<usize>,
    permissive: bool,
}

/// The printed result for one text.
fn analyze_one(g: &GrammarSet, text: &str, mode: &Mode) -> Result<String> {
    if mode.lattice || mode.nbest.is_some() {
        let raw = if mode.permissive {
            g.analyze_permissive(text)
        } else {
            g.analyze(text)
        }
        .map_err(|e| e.at_stage("analyze"))?;
        let filtered = g
            .disambiguate(&raw)
            .map_err(|e| e.at_stage("disambiguate"))?;
        if mode.lattice {
            return Ok(write_text(&filtered, &g.table));
        }
        let k = mode.nbest.unwrap_or(1);
        let mut out = String::new();
        for p in nbest(&filtered, k) {
            out.push_str(&format!("{}\t{}\n", g.lexical_tokens(&p).concat(), p.weight));
        }
        return Ok(out);
    }
    let a = if mode.permissive {
        g.analyze_text_permissive(text)
    } else {
        g.analyze_text(text)
    }?;
    Ok(format!(
        "{}\t{}\n{}\n",
        a.lexical_string(),
        a.weight(),
        a.phoneme_string()
    ))
}

/// Analyzes standard input line by line, printing results in input order.
fn analyze_batch(g: &GrammarSet, mode: &Mode) -> Result<()> {
    let lines: Vec<String> = io::stdin().lock().lines().collect::<io::Result<_>>()?;
    let results: Vec<Result<String>> = lines
        .par_iter()
        .map(|line| analyze_one(g, line, mode))
        .collect();
    let mut stdout = io::stdout().lock();
    let mut failed = 0;
    for (n, r) in results.into_iter().enumerate() {
        match r {
            Ok(s) => stdout.write_all(s.as_bytes())?,
            Err(e) => {
                eprintln!("line {}: {e:#}", n + 1);
                failed += 1;
            }
        }
    }
    if failed > 0 {
        bail!("{failed} of {} lines failed", lines.len());
    }
    Ok(())
}
