use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use milpdist::synth::{generate_synthetic, write_corpus, Family, SizeParams};
use milpdist::{
    compare_modes, distance_matrix, instance_distance, load_instance, load_manifest, render_template_table,
    topk_accuracy, Corpus, DistanceParams, LabelLevel, Mode,
};

#[derive(Parser)]
#[command(name = "milpdist", version, about = "Structural distances between MILP instances")]
struct Cli {
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Weights {
    /// Cost of a weight-class mismatch between two pairs.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Cost of a variable-class mismatch between two pairs.
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Cost of a right-hand-side class mismatch between two constraints.
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Weight of the objective term.
    #[arg(long, default_value_t = 1.0)]
    zeta: f64,
    #[arg(long, default_value = "greedy")]
    mode: Mode,
}

impl Weights {
    fn params(&self) -> Result<DistanceParams, Failure> {
        DistanceParams::new(self.alpha, self.beta, self.gamma, self.zeta).map_err(|e| Failure::Usage(e.to_string()))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MatrixFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Table,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Print the constraint-template table of an instance.
    Normalize {
        file: PathBuf,
        /// Also write the normalized instance as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Distance between two instances.
    Dist {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        weights: Weights,
    },
    /// Pairwise distance matrix over every instance in a manifest.
    Distmat {
        manifest: PathBuf,
        #[command(flatten)]
        weights: Weights,
        #[arg(long, value_enum, default_value = "csv")]
        format: MatrixFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Top-k class identification of the test split against the references.
    Eval {
        manifest: PathBuf,
        #[arg(long, default_value_t = 40)]
        k: usize,
        #[command(flatten)]
        weights: Weights,
        /// Run both modes and report their agreement.
        #[arg(long)]
        compare: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: ReportFormat,
        #[arg(long, default_value = "class")]
        label: LabelLevel,
        /// Include wall-clock timings (output then differs between runs).
        #[arg(long)]
        timings: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate synthetic instances.
    Gen {
        #[arg(long, required_unless_present = "corpus")]
        family: Option<Family>,
        #[arg(long, default_value_t = 20)]
        items: usize,
        /// Bins (bin packing) or sets (set cover).
        #[arg(long, default_value_t = 5)]
        bins: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output MPS file; stdout when omitted.
        #[arg(long, conflicts_with = "corpus")]
        out: Option<PathBuf>,
        /// Write a labelled corpus with manifest into this directory instead.
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Instances per family in corpus mode.
        #[arg(long, default_value_t = 50, requires = "corpus")]
        per_family: usize,
        /// Test instances per family in corpus mode.
        #[arg(long, default_value_t = 10, requires = "corpus")]
        tests: usize,
    },
}

enum Failure {
    Usage(String),
    Data(String),
}

fn data<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Data(e.to_string())
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Data(format!("{}: {e}", path.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(data),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(Failure::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global().map_err(data)?;
    }
    match cli.command {
        Command::Normalize { file, out } => {
            let instance = load_instance(&file).map_err(data)?;
            print!("{}", render_template_table(&instance));
            if let Some(path) = out {
                emit(Some(&path), &instance.to_json())?;
            }
        }
        Command::Dist { a, b, weights } => {
            let params = weights.params()?;
            let a = load_instance(&a).map_err(data)?;
            let b = load_instance(&b).map_err(data)?;
            println!("{}", instance_distance(&a, &b, &params, weights.mode));
        }
        Command::Distmat { manifest, weights, format, out } => {
            let params = weights.params()?;
            let corpus = Corpus::load(load_manifest(&manifest).map_err(data)?).map_err(data)?;
            log::info!("computing {0}x{0} {1} distances", corpus.instances.len(), weights.mode);
            let matrix = distance_matrix(&corpus.instances, &params, weights.mode);
            let names: Vec<String> =
                corpus.manifest.entries.iter().map(|e| e.path.display().to_string()).collect();
            let text = match format {
                MatrixFormat::Csv => {
                    let mut s = String::from("instance");
                    for n in &names {
                        s.push(',');
                        s.push_str(&csv_field(n));
                    }
                    s.push('\n');
                    for (i, n) in names.iter().enumerate() {
                        s.push_str(&csv_field(n));
                        for d in matrix.row(i) {
                            s.push_str(&format!(",{d}"));
                        }
                        s.push('\n');
                    }
                    s
                }
                MatrixFormat::Json => {
                    let rows: Vec<&[f64]> = (0..matrix.size).map(|i| matrix.row(i)).collect();
                    let doc = serde_json::json!({ "mode": weights.mode, "instances": names, "distances": rows });
                    serde_json::to_string_pretty(&doc).map_err(data)? + "\n"
                }
            };
            emit(out.as_deref(), &text)?;
        }
        Command::Eval { manifest, k, weights, compare, format, label, timings, out } => {
            let params = weights.params()?;
            let corpus = Corpus::load(load_manifest(&manifest).map_err(data)?).map_err(data)?;
            let text = if compare {
                let mut report = compare_modes(&corpus, k, &params, label).map_err(data)?;
                if !timings {
                    report.strip_timings();
                }
                match format {
                    ReportFormat::Table => report.render_table(),
                    ReportFormat::Json => serde_json::to_string_pretty(&report).map_err(data)? + "\n",
                }
            } else {
                let mut report = topk_accuracy(&corpus, k, &params, weights.mode, label).map_err(data)?;
                if !timings {
                    report.strip_timings();
                }
                match format {
                    ReportFormat::Table => report.render_table(),
                    ReportFormat::Json => serde_json::to_string_pretty(&report).map_err(data)? + "\n",
                }
            };
            emit(out.as_deref(), &text)?;
        }
        Command::Gen { family, items, bins, seed, out, corpus, per_family, tests } => {
            if let Some(dir) = corpus {
                if per_family == 0 || tests >= per_family {
                    return Err(Failure::Usage("corpus needs 0 <= --tests < --per-family".into()));
                }
                let manifest = write_corpus(&dir, per_family, tests, seed).map_err(data)?;
                eprintln!("wrote {}", manifest.display());
            } else {
                let family = family.expect("clap enforces --family without --corpus");
                let instance =
                    generate_synthetic(family, SizeParams::new(items, bins), seed).map_err(|e| Failure::Usage(e.to_string()))?;
                emit(out.as_deref(), &instance.to_mps())?;
            }
        }
    }
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
