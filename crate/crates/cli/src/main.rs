//! Command-line surface for the contour codec: mask tracing, model
//! training, lossless coding, and rate-distortion sweeps.

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use contour_codec::corpus::TrainingCorpus;
use contour_codec::geom::DccContour;
use contour_codec::rd::{approximate, ideal_bits, HistoryMode, RdMode, RdParams};
use contour_codec::tree::{ContextTree, TreeParams};
use contour_codec::tst::TotalSuffixTree;
use contour_codec::{
    build_initial_tree, decode_image, encode_image_with_stats, format_contours, parse_contours,
    parse_pbm, trace_mask, Error as CodecError, MarkovSource,
};
use rayon::prelude::*;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "contour-codec", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Ssdd,
    Madd,
}

#[derive(Subcommand)]
enum Command {
    /// Trace PBM masks into contour text files.
    Trace {
        /// Output directory; defaults to each input's directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// PBM mask files.
        inputs: Vec<PathBuf>,
    },
    /// Train a context-tree model from contour text files.
    Train {
        /// Output model file.
        #[arg(long)]
        out: PathBuf,
        /// Prior weight coefficient a (default 0.25).
        #[arg(long)]
        a: Option<f64>,
        /// Maximum context depth D (default ⌈ln L / ln 3⌉).
        #[arg(long)]
        depth: Option<usize>,
        /// Initial-tree node budget K (default 3·D³).
        #[arg(long)]
        budget: Option<usize>,
        /// Smoothing constant β (default 1).
        #[arg(long)]
        beta: Option<f64>,
        /// Train on this many synthetic symbols instead of input files.
        #[arg(long)]
        synth: Option<usize>,
        /// Seed for the synthetic generator.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Contour text files or directories.
        inputs: Vec<PathBuf>,
    },
    /// Encode a contour text file into a bitstream.
    Encode {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Image width; defaults to the smallest fitting value.
        #[arg(long)]
        width: Option<u16>,
        /// Image height; defaults to the smallest fitting value.
        #[arg(long)]
        height: Option<u16>,
        input: PathBuf,
    },
    /// Decode a bitstream back into contour text.
    Decode {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: PathBuf,
        input: PathBuf,
    },
    /// Sweep lossy approximation parameters and emit a CSV.
    RdSweep {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Comma-separated λ grid for ssdd mode (default 0,0.5,1,2,4,8).
        #[arg(long)]
        lambda: Option<String>,
        /// Comma-separated d_max grid for madd mode, or the single bound
        /// used by ssdd mode (default 1,2,3,4,5).
        #[arg(long)]
        dmax: Option<String>,
        /// Output CSV path.
        #[arg(long)]
        csv: PathBuf,
        /// Contour text files or directories.
        inputs: Vec<PathBuf>,
    },
    /// Report model parameters and per-file coding statistics.
    Stats {
        #[arg(long)]
        model: PathBuf,
        /// Optional contour text files to rate under the model.
        inputs: Vec<PathBuf>,
    },
}

fn main() {
    if let Ok(threads) = std::env::var("CONTOUR_CODEC_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    if let Err(e) = run() {
        eprintln!("error: {e:#}");
        let code = match e.downcast_ref::<CodecError>() {
            Some(CodecError::InvalidPbm(_)) => 2,
            _ => 1,
        };
        std::process::exit(code);
    }
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Trace { out, inputs } => cmd_trace(out, inputs),
        Command::Train {
            out,
            a,
            depth,
            budget,
            beta,
            synth,
            seed,
            inputs,
        } => cmd_train(out, a, depth, budget, beta, synth, seed, inputs),
        Command::Encode {
            model,
            out,
            width,
            height,
            input,
        } => cmd_encode(model, out, width, height, input),
        Command::Decode { model, out, input } => cmd_decode(model, out, input),
        Command::RdSweep {
            model,
            mode,
            lambda,
            dmax,
            csv,
            inputs,
        } => cmd_rd_sweep(model, mode, lambda, dmax, csv, inputs),
        Command::Stats { model, inputs } => cmd_stats(model, inputs),
    }
}

/// Write via a temporary sibling so readers never observe partial files.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp.partial");
    fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

/// Expand files and directories into a lexicographically sorted file list.
fn expand_inputs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for input in inputs {
        if input.is_dir() {
            for entry in fs::read_dir(input)
                .with_context(|| format!("reading directory {}", input.display()))?
            {
                let path = entry?.path();
                if path.is_file() {
                    files.push(path);
                }
            }
        } else {
            files.push(input.clone());
        }
    }
    files.sort();
    Ok(files)
}

fn load_contour_files(inputs: &[PathBuf]) -> Result<Vec<DccContour>> {
    let mut contours = Vec::new();
    for path in expand_inputs(inputs)? {
        let text =
            fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        contours.extend(
            parse_contours(&text).with_context(|| format!("parsing {}", path.display()))?,
        );
    }
    Ok(contours)
}

fn load_model(path: &Path) -> Result<ContextTree> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(ContextTree::from_bytes(&bytes)?)
}

fn cmd_trace(out: Option<PathBuf>, inputs: Vec<PathBuf>) -> Result<()> {
    if inputs.is_empty() {
        bail!("no input masks given");
    }
    for path in expand_inputs(&inputs)? {
        let bytes = fs::read(&path).with_context(|| format!("reading {}", path.display()))?;
        let mask = parse_pbm(&bytes).map_err(|e| {
            anyhow::Error::new(e).context(format!("invalid PBM {}", path.display()))
        })?;
        let contours = trace_mask(&mask);
        let target_dir = out
            .clone()
            .unwrap_or_else(|| path.parent().unwrap_or(Path::new(".")).to_path_buf());
        fs::create_dir_all(&target_dir)?;
        let target = target_dir
            .join(path.file_stem().unwrap_or_default())
            .with_extension("txt");
        write_atomic(&target, format_contours(&contours).as_bytes())?;
        println!(
            "{}: {} contours -> {}",
            path.display(),
            contours.len(),
            target.display()
        );
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_train(
    out: PathBuf,
    a: Option<f64>,
    depth: Option<usize>,
    budget: Option<usize>,
    beta: Option<f64>,
    synth: Option<usize>,
    seed: u64,
    inputs: Vec<PathBuf>,
) -> Result<()> {
    let corpus = if let Some(total) = synth {
        let sample = MarkovSource::example().sample(total, seed);
        TrainingCorpus::new(sample.chunks(1000).map(|c| c.to_vec()).collect())
    } else {
        let contours = load_contour_files(&inputs)?;
        TrainingCorpus::from_contours(&contours)
    };
    if corpus.total_len() == 0 {
        bail!("empty training corpus");
    }
    let mut params = TreeParams::default_for(corpus.total_len());
    if let Some(d) = depth {
        params.depth = d;
        params.budget = 3 * d * d * d;
    }
    if let Some(k) = budget {
        params.budget = k;
    }
    if let Some(a) = a {
        params.a = a;
    }
    if let Some(b) = beta {
        params.beta = b;
    }
    let trie = build_initial_tree(&corpus, &params);
    let full = ContextTree {
        root: trie.keep_top_k(params.budget).fill_to_full(),
        params,
        training_len: corpus.total_len(),
    };
    let initial_objective = full.objective();
    let (pruned, objective) = full.prune();
    write_atomic(&out, &pruned.to_bytes())?;
    println!("L {}", corpus.total_len());
    println!("M {}", corpus.string_count());
    println!("D {}", params.depth);
    println!("K {}", params.budget);
    println!("F(T0) {initial_objective:.6}");
    println!("end_nodes {}", pruned.end_node_count());
    println!("F(T*) {objective:.6}");
    println!("model {}", out.display());
    Ok(())
}

/// Smallest u16 dimensions that contain every vertex of every contour.
fn fitted_dimensions(contours: &[DccContour]) -> Result<(u16, u16)> {
    let mut max_x = 0i32;
    let mut max_y = 0i32;
    for c in contours {
        for p in std::iter::once(c.start).chain(c.endpoints()) {
            if p.x < 0 || p.y < 0 {
                bail!("contour vertex {},{} has negative coordinates", p.x, p.y);
            }
            max_x = max_x.max(p.x);
            max_y = max_y.max(p.y);
        }
    }
    if max_x > u16::MAX as i32 || max_y > u16::MAX as i32 {
        bail!("contours exceed the coordinate range");
    }
    Ok((max_x as u16, max_y as u16))
}

fn cmd_encode(
    model: PathBuf,
    out: PathBuf,
    width: Option<u16>,
    height: Option<u16>,
    input: PathBuf,
) -> Result<()> {
    let tree = load_model(&model)?;
    let text = fs::read_to_string(&input)?;
    let contours = parse_contours(&text)?;
    let (fit_w, fit_h) = fitted_dimensions(&contours)?;
    let width = width.unwrap_or(fit_w);
    let height = height.unwrap_or(fit_h);
    let (bytes, stats) = encode_image_with_stats(width, height, &contours, &tree)?;
    write_atomic(&out, &bytes)?;
    let symbols: usize = contours.iter().map(|c| c.symbols.len()).sum();
    println!("contours {}", contours.len());
    println!("symbols {symbols}");
    println!("header_bits {}", stats.header_bits);
    println!("starting_point_bits {}", stats.starting_point_bits);
    println!("side_info_bits {}", stats.side_info_bits);
    println!("payload_bits {}", stats.payload_bits);
    println!("total_bits {}", stats.total_bits);
    if symbols > 0 {
        println!(
            "bits_per_symbol {:.4}",
            stats.payload_bits as f64 / symbols as f64
        );
    }
    Ok(())
}

fn cmd_decode(model: PathBuf, out: PathBuf, input: PathBuf) -> Result<()> {
    let tree = load_model(&model)?;
    let bytes = fs::read(&input)?;
    let (width, height, contours) = decode_image(&bytes, &tree)?;
    write_atomic(&out, format_contours(&contours).as_bytes())?;
    println!("width {width}");
    println!("height {height}");
    println!("contours {}", contours.len());
    Ok(())
}

fn parse_grid(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|v| v.trim().parse::<f64>().context("invalid grid value"))
        .collect()
}

fn cmd_rd_sweep(
    model: PathBuf,
    mode: ModeArg,
    lambda: Option<String>,
    dmax: Option<String>,
    csv: PathBuf,
    inputs: Vec<PathBuf>,
) -> Result<()> {
    let tree = load_model(&model)?;
    let tst = TotalSuffixTree::build(&tree);
    let contours = load_contour_files(&inputs)?;
    let dmax_grid = match &dmax {
        Some(text) => parse_grid(text)?,
        None => vec![1.0, 2.0, 3.0, 4.0, 5.0],
    };
    let lambda_grid = match &lambda {
        Some(text) => parse_grid(text)?,
        None => vec![0.0, 0.5, 1.0, 2.0, 4.0, 8.0],
    };
    // cell = (mode label, lambda-or-dmax column value, full parameters)
    let cells: Vec<(&str, f64, RdParams)> = match mode {
        ModeArg::Ssdd => {
            let d_max = dmax_grid[0];
            lambda_grid
                .iter()
                .map(|&lambda| {
                    (
                        "ssdd",
                        lambda,
                        RdParams {
                            lambda,
                            d_max,
                            mode: RdMode::Ssdd,
                            history: HistoryMode::Tst,
                        },
                    )
                })
                .collect()
        }
        ModeArg::Madd => dmax_grid
            .iter()
            .map(|&d_max| {
                (
                    "madd",
                    d_max,
                    RdParams {
                        lambda: 0.0,
                        d_max,
                        mode: RdMode::Madd,
                        history: HistoryMode::Tst,
                    },
                )
            })
            .collect(),
    };
    let mut jobs: Vec<(usize, usize)> = Vec::new();
    for contour_id in 0..contours.len() {
        for cell in 0..cells.len() {
            jobs.push((contour_id, cell));
        }
    }
    let mut rows: Vec<((usize, usize), String)> = jobs
        .par_iter()
        .map(|&(contour_id, cell)| {
            let (label, value, params) = &cells[cell];
            let row = match approximate(&contours[contour_id], &tree, &tst, params) {
                Ok(r) => format!(
                    "{contour_id},{label},{value},{:.4},{:.4},{:.4},{}",
                    r.bits, r.ssdd, r.madd, r.states_expanded
                ),
                Err(_) => format!("{contour_id},{label},{value},NA,NA,NA,0"),
            };
            ((contour_id, cell), row)
        })
        .collect();
    rows.sort_by_key(|(key, _)| *key);
    let mut text = String::from("contour_id,mode,lambda_or_dmax,bits,ssdd,madd,states_expanded\n");
    for (_, row) in rows {
        text.push_str(&row);
        text.push('\n');
    }
    write_atomic(&csv, text.as_bytes())?;
    println!("rows {}", contours.len() * cells.len());
    println!("csv {}", csv.display());
    Ok(())
}

fn cmd_stats(model: PathBuf, inputs: Vec<PathBuf>) -> Result<()> {
    let tree = load_model(&model)?;
    println!("hash {:016x}", tree.hash());
    println!("L {}", tree.training_len);
    println!("D {}", tree.params.depth);
    println!("K {}", tree.params.budget);
    println!("a {}", tree.params.a);
    println!("beta {}", tree.params.beta);
    println!("end_nodes {}", tree.end_node_count());
    println!("max_depth {}", tree.max_depth());
    println!("F(T) {:.6}", tree.objective());
    for path in expand_inputs(&inputs)? {
        let text = fs::read_to_string(&path)?;
        let contours = parse_contours(&text)?;
        let symbols: usize = contours.iter().map(|c| c.symbols.len()).sum();
        let bits: f64 = contours.iter().map(|c| ideal_bits(c, &tree)).sum();
        let rate = if symbols > 0 {
            bits / symbols as f64
        } else {
            0.0
        };
        println!(
            "{}: contours {} symbols {symbols} ideal_bits {bits:.1} bits_per_symbol {rate:.4}",
            path.display(),
            contours.len()
        );
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use contour_codec::geom::GridPoint;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("1, 2,3.5").unwrap(), vec![1.0, 2.0, 3.5]);
        assert!(parse_grid("1,x").is_err());
    }

    #[test]
    fn fitted_dimensions_covers_all_vertices() {
        let c = DccContour::new(
            GridPoint::new(3, 1),
            contour_codec::geom::AbsoluteDirection::East,
            contour_codec::geom::parse_symbols("ss").unwrap(),
        );
        assert_eq!(fitted_dimensions(&[c]).unwrap(), (6, 1));
    }
}
