use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use wtbc::corpus::{DEFAULT_DELIMITER, DEFAULT_SENTINEL};
use wtbc::format::{Layout, WriteOptions};
use wtbc::rankselect::DEFAULT_BLOCK_SIZE;
use wtbc::retrieval::{topk_dr, topk_drb, Oracle, DEFAULT_EPSILON};
use wtbc::wtbc::DEFAULT_SNIPPET_WINDOW;
use wtbc::{BuildOptions, Collection, DrbConfig, IngestConfig, Mode, Query, RawDocuments, ScoredDoc, WtbcIndex};

#[derive(Parser, Debug)]
#[command(name = "wtbc", version, about = "Build and query compressed document indexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Index a directory (one document per file) or a delimited file.
    Build {
        input: PathBuf,
        output: PathBuf,
        /// Also store per-word document bitmaps.
        #[arg(long)]
        drb: bool,
        /// Words with idf at or below this get no bitmap.
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
        #[arg(long, default_value_t = DEFAULT_BLOCK_SIZE)]
        block_size: usize,
        /// Line separating documents inside a single input file.
        #[arg(long, default_value = DEFAULT_DELIMITER)]
        delimiter: String,
        /// Token appended to every document; must not occur in the input.
        #[arg(long, default_value = DEFAULT_SENTINEL)]
        sentinel: String,
        /// Write rank counters instead of rebuilding them on load.
        #[arg(long)]
        store_counters: bool,
    },
    /// Top-k documents for a query, as `rank<TAB>doc<TAB>score` lines.
    Query {
        index: PathBuf,
        query: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Or)]
        mode: ModeArg,
        #[arg(long, value_enum, default_value_t = Algo::Dr)]
        algo: Algo,
        #[arg(short, default_value_t = 10)]
        k: usize,
        /// Original corpus, required by `--algo oracle`.
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long, default_value = DEFAULT_DELIMITER)]
        delimiter: String,
    },
    /// Print a document, a token range or a snippet around a hit.
    Extract {
        index: PathBuf,
        #[arg(long, group = "what")]
        doc: Option<u64>,
        /// Token positions `A..B`, both inclusive.
        #[arg(long, group = "what", value_parser = parse_range)]
        pos: Option<(u64, u64)>,
        /// `WORD,J`: the J-th occurrence of WORD.
        #[arg(long, group = "what", value_parser = parse_hit)]
        hit: Option<(String, u64)>,
        #[arg(long, default_value_t = DEFAULT_SNIPPET_WINDOW as u64)]
        window: u64,
    },
    /// Report collection and space statistics.
    Stats { index: PathBuf },
    /// Time every query of a file, one query per line; writes CSV.
    Bench {
        index: PathBuf,
        queries: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Or)]
        mode: ModeArg,
        #[arg(long, value_enum, default_value_t = Algo::Dr)]
        algo: Algo,
        #[arg(short, default_value_t = 10)]
        k: usize,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        repeat: u32,
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long, default_value = DEFAULT_DELIMITER)]
        delimiter: String,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    And,
    Or,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::And => Mode::And,
            ModeArg::Or => Mode::Or,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Algo {
    Dr,
    Drb,
    Oracle,
}

type CliResult<T> = Result<T, Box<dyn std::error::Error>>;

fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let (a, b) = s.split_once("..").ok_or("expected A..B")?;
    let a = a.trim().parse().map_err(|e| format!("bad start: {e}"))?;
    let b = b.trim().parse().map_err(|e| format!("bad end: {e}"))?;
    Ok((a, b))
}

fn parse_hit(s: &str) -> Result<(String, u64), String> {
    let (w, j) = s.rsplit_once(',').ok_or("expected WORD,J")?;
    let j = j.trim().parse().map_err(|e| format!("bad occurrence: {e}"))?;
    Ok((w.to_owned(), j))
}

/// Runs queries with one of the three engines.
enum Engine<'a> {
    Index(&'a WtbcIndex, Algo),
    Oracle(Oracle),
}

impl<'a> Engine<'a> {
    fn new(idx: &'a WtbcIndex, algo: Algo, corpus: Option<&Path>, delimiter: &str) -> CliResult<Self> {
        match algo {
            Algo::Oracle => {
                let path = corpus.ok_or("--algo oracle needs --corpus")?;
                let raw = RawDocuments::read(&IngestConfig::for_path(path, delimiter))?;
                Ok(Engine::Oracle(Oracle::new(&raw.texts())))
            }
            Algo::Drb if idx.bitmaps().is_none() => {
                Err("index has no bitmaps; rebuild it with --drb".into())
            }
            _ => Ok(Engine::Index(idx, algo)),
        }
    }

    fn run(&self, q: &Query) -> CliResult<Vec<ScoredDoc>> {
        Ok(match self {
            Engine::Index(idx, Algo::Drb) => topk_drb(idx, q)?,
            Engine::Index(idx, _) => topk_dr(idx, q)?,
            Engine::Oracle(o) => o.topk(q),
        })
    }
}

fn load(path: &Path) -> CliResult<(WtbcIndex, Layout)> {
    WtbcIndex::load(path).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        // `wtbc stats x | head` should not complain
        Err(e) if is_broken_pipe(e.as_ref()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wtbc: {e}");
            ExitCode::FAILURE
        }
    }
}

fn is_broken_pipe(e: &(dyn std::error::Error + 'static)) -> bool {
    let io = match e.downcast_ref::<csv::Error>() {
        Some(c) => match c.kind() {
            csv::ErrorKind::Io(io) => Some(io),
            _ => None,
        },
        None => e.downcast_ref::<io::Error>(),
    };
    io.is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe)
}

fn run(cmd: Command) -> CliResult<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cmd {
        Command::Build {
            input,
            output,
            drb,
            epsilon,
            block_size,
            delimiter,
            sentinel,
            store_counters,
        } => {
            let start = Instant::now();
            let mut cfg = IngestConfig::for_path(&input, &delimiter);
            cfg.sentinel = sentinel;
            let coll = Collection::ingest(&cfg)?;
            let opts = BuildOptions {
                block_size,
                bitmaps: drb.then_some(DrbConfig { epsilon }),
                ..Default::default()
            };
            let idx = WtbcIndex::build(&coll, &opts)?;
            let layout = idx.save(&output, WriteOptions { store_counters })?;
            let elapsed = start.elapsed();
            writeln!(out, "documents\t{}", idx.num_docs())?;
            writeln!(out, "input_bytes\t{}", idx.original_size())?;
            writeln!(out, "index_bytes\t{}", layout.total())?;
            writeln!(out, "compression_ratio\t{:.4}", ratio(layout.total(), idx.original_size()))?;
            writeln!(out, "build_seconds\t{:.3}", elapsed.as_secs_f64())?;
        }
        Command::Query {
            index,
            query,
            mode,
            algo,
            k,
            corpus,
            delimiter,
        } => {
            let (idx, _) = load(&index)?;
            let engine = Engine::new(&idx, algo, corpus.as_deref(), &delimiter)?;
            let hits = engine.run(&Query::parse(&query, mode.into(), k))?;
            let mut w = csv::WriterBuilder::new().delimiter(b'\t').from_writer(out);
            for (rank, hit) in hits.iter().enumerate() {
                w.write_record([(rank + 1).to_string(), hit.doc.to_string(), format!("{:.6}", hit.score)])?;
            }
            w.flush()?;
        }
        Command::Extract {
            index,
            doc,
            pos,
            hit,
            window,
        } => {
            let (idx, _) = load(&index)?;
            let text = match (doc, pos, hit) {
                (Some(d), _, _) => idx.document(d)?,
                (_, Some((a, b)), _) => idx.decode_range(a, b)?,
                (_, _, Some((word, j))) => idx.snippet(&word, j, window)?,
                _ => return Err("one of --doc, --pos or --hit is required".into()),
            };
            out.write_all(text.as_bytes())?;
        }
        Command::Stats { index } => {
            let (idx, layout) = load(&index)?;
            stats(&mut out, &idx, &layout)?;
        }
        Command::Bench {
            index,
            queries,
            mode,
            algo,
            k,
            repeat,
            corpus,
            delimiter,
        } => {
            let (idx, _) = load(&index)?;
            let engine = Engine::new(&idx, algo, corpus.as_deref(), &delimiter)?;
            let text = fs::read_to_string(&queries).map_err(|e| format!("{}: {e}", queries.display()))?;
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["query", "n_words", "mode", "algo", "k", "mean_ms", "results_count"])?;
            for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
                let q = Query::parse(line, mode.into(), k);
                let mut count = 0;
                let start = Instant::now();
                for _ in 0..repeat {
                    count = engine.run(&q)?.len();
                }
                let mean_ms = start.elapsed().as_secs_f64() * 1e3 / repeat as f64;
                w.write_record([
                    line.to_owned(),
                    q.words.len().to_string(),
                    Mode::from(mode).to_string(),
                    format!("{algo:?}").to_lowercase(),
                    k.to_string(),
                    format!("{mean_ms:.4}"),
                    count.to_string(),
                ])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn ratio(part: usize, whole: u64) -> f64 {
    if whole == 0 {
        0.0
    } else {
        part as f64 / whole as f64
    }
}

fn stats(out: &mut impl Write, idx: &WtbcIndex, layout: &Layout) -> io::Result<()> {
    let st = idx.stats();
    let params = idx.params();
    let tree = idx.tree();
    let orig = idx.original_size();
    let counters = tree.counter_bytes();
    let bitmap_bytes = layout.bitmaps;
    let without_bitmaps = layout.total() - bitmap_bytes;

    writeln!(out, "documents\t{}", st.docs)?;
    writeln!(out, "tokens\t{}", st.tokens)?;
    writeln!(out, "tokens_without_sentinels\t{}", st.tokens_without_sentinels())?;
    writeln!(out, "vocabulary\t{}", st.vocab)?;
    writeln!(out, "s\t{}", params.s())?;
    writeln!(out, "c\t{}", params.c())?;
    writeln!(out, "tree_nodes\t{}", tree.nodes().len())?;
    writeln!(out, "input_bytes\t{orig}")?;
    writeln!(out, "header_bytes\t{}", layout.header)?;
    writeln!(out, "vocab_bytes\t{}", layout.vocab)?;
    writeln!(out, "tree_bytes\t{}", layout.tree)?;
    writeln!(out, "bounds_bytes\t{}", layout.bounds)?;
    writeln!(out, "bitmap_bytes\t{bitmap_bytes}")?;
    writeln!(out, "file_bytes\t{}", layout.total())?;
    writeln!(out, "counter_bytes\t{counters}")?;
    writeln!(out, "counter_overhead_pct\t{:.3}", 100.0 * ratio(counters, tree.byte_len() as u64))?;
    if let Some(bm) = idx.bitmaps() {
        writeln!(out, "bitmap_words\t{}", bm.count())?;
        writeln!(out, "bitmap_epsilon\t{}", bm.epsilon())?;
    }
    writeln!(out, "bitmap_overhead_pct\t{:.3}", 100.0 * ratio(bitmap_bytes, orig))?;
    writeln!(out, "cr_pct\t{:.3}", 100.0 * ratio(without_bitmaps, orig))?;
    writeln!(out, "cr_with_bitmaps_pct\t{:.3}", 100.0 * ratio(layout.total(), orig))?;
    // what the loaded index occupies when counters were not stored on disk
    let resident = without_bitmaps - layout.stored_counters + counters;
    writeln!(out, "cr_in_memory_pct\t{:.3}", 100.0 * ratio(resident, orig))?;
    Ok(())
}
