//! Command-line harness: instance I/O, generators, solver dispatch and
//! benchmark tables.
//!
//! Exit codes: 0 = solved (or YES), 1 = infeasible (or probably-no),
//! 2 = input or usage error.

mod bench;
mod instance;
mod report;
mod runner;

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tkpm_core::blowup::{blow_up, Blob, BlobKind, ColorRule, Prototype, WeightRule};
use tkpm_core::graph::Color;

use instance::{parse_instance, write_instance, InstanceFile, ProblemKind, PrototypeBlock};
use report::SolveReport;
use runner::{run_algorithm, Algorithm, Prepared, RunOptions};

#[derive(Parser)]
#[command(
    name = "tkpm",
    version,
    about = "Solvers for Top-k Perfect Matching and Exact Matching on blown-up graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance file (use '-' for stdin) and print a JSON report.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum)]
        algorithm: Algorithm,
        /// Approximation slack for approx-nd; falls back to the header value.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Per-band cap exponent: threshold = ceil(n^alpha). Defaults to
        /// sqrt(n) for recursive and n^(12/13) for em-recursive.
        #[arg(long)]
        threshold_alpha: Option<f64>,
        /// Seed for the randomized EM decision.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Trial count for the randomized EM decision.
        #[arg(long, default_value_t = 20)]
        trials: u32,
        /// Override the header k.
        #[arg(long)]
        k: Option<usize>,
        /// Largest vertex count the brute-force oracle accepts.
        #[arg(long, default_value_t = 20)]
        max_oracle_size: usize,
        /// Write the report here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Generate a blowup instance file.
    Generate {
        /// Prototype shape: path, cycle, complete or random.
        #[arg(long, default_value = "path")]
        prototype: String,
        /// Number of blobs.
        #[arg(long, default_value_t = 4)]
        blobs: usize,
        /// Band probability for the random shape.
        #[arg(long, default_value_t = 0.5)]
        band_prob: f64,
        /// Uniform blob size.
        #[arg(long, default_value_t = 2, conflicts_with = "sizes")]
        size: usize,
        /// Explicit comma-separated blob sizes, e.g. "2,3,1".
        #[arg(long)]
        sizes: Option<String>,
        /// Blob kind: clique, independent or random.
        #[arg(long, default_value = "independent")]
        kind: String,
        #[arg(long, default_value_t = 100)]
        weight_max: u64,
        /// Problem kind: tkpm or em.
        #[arg(long, default_value = "tkpm")]
        problem: String,
        /// Red probability for em instances.
        #[arg(long, default_value_t = 0.5)]
        red_prob: f64,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Stored in the header for approx-nd runs.
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the instance here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the benchmark sweeps of a TOML config and emit a CSV table.
    Bench {
        #[arg(long)]
        config: PathBuf,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Parse and structurally check an instance file.
    Validate { instance: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf).context("reading stdin")?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn emit(output: Option<&Path>, content: &str) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, content)
            .with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Solve {
            instance,
            algorithm,
            epsilon,
            threshold_alpha,
            seed,
            trials,
            k,
            max_oracle_size,
            output,
        } => {
            let text = read_input(&instance)?;
            let file = parse_instance(&text)?;
            let prepared = Prepared::from_instance(&file)?;
            let k = k.unwrap_or(file.k);
            let epsilon = epsilon.or(file.epsilon);
            let opts = RunOptions {
                k,
                epsilon,
                threshold_alpha,
                seed,
                trials,
                max_oracle_size,
            };
            let started = std::time::Instant::now();
            let out = run_algorithm(&prepared, algorithm, &opts)?;
            let wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
            let status = out.status;
            let report = SolveReport::new(
                instance.display().to_string(),
                file.kind.as_str(),
                algorithm.as_str(),
                prepared.graph.vertex_count(),
                prepared.graph.edge_count(),
                k,
                epsilon,
                (algorithm == Algorithm::EmRandom).then_some(seed),
                (algorithm == Algorithm::EmRandom).then_some(trials),
                out,
                wall_time_ms,
            );
            let json = serde_json::to_string_pretty(&report)?;
            emit(output.as_deref(), &format!("{json}\n"))?;
            Ok(status.exit_code())
        }
        Command::Generate {
            prototype,
            blobs,
            band_prob,
            size,
            sizes,
            kind,
            weight_max,
            problem,
            red_prob,
            k,
            epsilon,
            seed,
            output,
        } => {
            let text = cmd_generate(GenerateArgs {
                prototype,
                blobs,
                band_prob,
                size,
                sizes,
                kind,
                weight_max,
                problem,
                red_prob,
                k,
                epsilon,
                seed,
            })?;
            emit(output.as_deref(), &text)?;
            Ok(0)
        }
        Command::Bench { config, output } => {
            let text = std::fs::read_to_string(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            let config: bench::BenchConfig = toml::from_str(&text).context("parsing config")?;
            let csv = bench::run_bench(&config)?;
            emit(output.as_deref(), &csv)?;
            Ok(0)
        }
        Command::Validate { instance } => {
            let text = read_input(&instance)?;
            let file = parse_instance(&text)?;
            let g = file.to_graph()?;
            let blowup = file.to_prototype()?;
            let gamma = tkpm_core::nd::compute_type_partition(&g).class_count();
            println!(
                "ok: {} instance, {} vertices, {} edges, k={}, gamma={}{}{}",
                file.kind.as_str(),
                g.vertex_count(),
                g.edge_count(),
                file.k,
                gamma,
                if g.vertex_count() % 2 == 0 { "" } else { " (odd vertex count: not solvable)" },
                match &blowup {
                    Some((p, _, order)) => format!(
                        ", prototype with {} blobs, bandwidth {} under the stored ordering",
                        p.blob_count(),
                        tkpm_core::blowup::bandwidth_of_ordering(p, order)?
                    ),
                    None => String::new(),
                }
            );
            Ok(0)
        }
    }
}

struct GenerateArgs {
    prototype: String,
    blobs: usize,
    band_prob: f64,
    size: usize,
    sizes: Option<String>,
    kind: String,
    weight_max: u64,
    problem: String,
    red_prob: f64,
    k: usize,
    epsilon: Option<f64>,
    seed: u64,
}

fn cmd_generate(args: GenerateArgs) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    if args.blobs == 0 {
        bail!("--blobs must be >= 1");
    }
    let bands: Vec<(usize, usize)> = match args.prototype.as_str() {
        "path" => (0..args.blobs.saturating_sub(1)).map(|i| (i, i + 1)).collect(),
        "cycle" => {
            if args.blobs < 3 {
                bail!("cycles need at least 3 blobs");
            }
            let mut b: Vec<(usize, usize)> = (0..args.blobs - 1).map(|i| (i, i + 1)).collect();
            b.push((0, args.blobs - 1));
            b
        }
        "complete" => {
            let mut b = Vec::new();
            for i in 0..args.blobs {
                for j in i + 1..args.blobs {
                    b.push((i, j));
                }
            }
            b
        }
        "random" => {
            if !(0.0..=1.0).contains(&args.band_prob) {
                bail!("--band-prob must lie in [0, 1]");
            }
            let mut b = Vec::new();
            for i in 0..args.blobs {
                for j in i + 1..args.blobs {
                    if rng.gen_bool(args.band_prob) {
                        b.push((i, j));
                    }
                }
            }
            b
        }
        other => bail!("unknown prototype shape '{other}'"),
    };

    let sizes: Vec<usize> = match &args.sizes {
        Some(list) => list
            .split(',')
            .map(|s| s.trim().parse::<usize>().map_err(|_| anyhow::anyhow!("bad size '{s}'")))
            .collect::<Result<_>>()?,
        None => vec![args.size; args.blobs],
    };
    if sizes.len() != args.blobs {
        bail!("{} sizes given for {} blobs", sizes.len(), args.blobs);
    }
    if sizes.contains(&0) {
        bail!("blob sizes must be >= 1");
    }
    let total: usize = sizes.iter().sum();
    if !total.is_multiple_of(2) {
        bail!("blob sizes sum to {total}, which is odd; perfect matchings need an even count");
    }

    let blob_kind = |rng: &mut ChaCha8Rng| -> Result<BlobKind> {
        Ok(match args.kind.as_str() {
            "clique" => BlobKind::Clique,
            "independent" => BlobKind::Independent,
            "random" => {
                if rng.gen_bool(0.5) {
                    BlobKind::Clique
                } else {
                    BlobKind::Independent
                }
            }
            other => bail!("unknown blob kind '{other}'"),
        })
    };
    let blobs: Vec<Blob> = sizes
        .iter()
        .map(|&size| Ok(Blob { size, kind: blob_kind(&mut rng)? }))
        .collect::<Result<_>>()?;
    let prototype = Prototype::new(blobs, &bands)?;
    let ordering: Vec<usize> = if prototype.blob_count() <= tkpm_core::blowup::BANDWIDTH_SEARCH_LIMIT
    {
        tkpm_core::blowup::find_bandwidth_ordering(&prototype)?
    } else {
        (0..prototype.blob_count()).collect()
    };

    let problem = match args.problem.as_str() {
        "tkpm" => ProblemKind::Tkpm,
        "em" => ProblemKind::Em,
        other => bail!("unknown problem kind '{other}'"),
    };
    let weights = WeightRule::Uniform { max: args.weight_max.max(1), seed: rng.gen() };
    let colors = match problem {
        ProblemKind::Tkpm => ColorRule::Uncolored,
        ProblemKind::Em => {
            ColorRule::Random { red_probability: args.red_prob, seed: rng.gen() }
        }
    };
    let (graph, _) = blow_up(&prototype, &weights, &colors)?;

    let mut metadata = std::collections::BTreeMap::new();
    metadata.insert("generator".to_string(), "tkpm generate".to_string());
    metadata.insert("prototype".to_string(), args.prototype.clone());
    metadata.insert("seed".to_string(), args.seed.to_string());
    metadata.insert("weight_max".to_string(), args.weight_max.to_string());
    if problem == ProblemKind::Em {
        metadata.insert("red_prob".to_string(), args.red_prob.to_string());
    }

    let file = InstanceFile {
        kind: problem,
        vertex_count: graph.vertex_count(),
        k: args.k,
        epsilon: args.epsilon,
        edges: graph
            .edges()
            .iter()
            .map(|e| {
                let color = match problem {
                    ProblemKind::Tkpm => Color::Uncolored,
                    ProblemKind::Em => e.color,
                };
                (e.u, e.v, e.weight, color)
            })
            .collect(),
        prototype: Some(PrototypeBlock {
            blobs: prototype.blobs.iter().map(|b| (b.size, b.kind)).collect(),
            bands: prototype.bands.iter().copied().collect(),
            order: Some(ordering),
        }),
        metadata,
    };
    Ok(write_instance(&file))
}
