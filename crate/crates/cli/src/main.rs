use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hypthick_cli::commands::*;
use hypthick_cli::{CliError, Outcome, Result, RunConfig};

/// Orbifold triangulations, thick graph embeddings and volume bounds.
///
/// Exit status: 0 when every check passes, 2 on a verification failure, 1 on errors.
#[derive(Parser)]
#[command(name = "hypthick", version)]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the configured Monte Carlo sample count.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Graph file.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Mesh file; its 1-skeleton is used.
    #[arg(long)]
    mesh: Option<PathBuf>,
    /// Random connected regular graph, as `vertices:degree`.
    #[arg(long, value_name = "N:D")]
    random_regular: Option<String>,
}

impl Source {
    fn resolve(self) -> Result<GraphSource> {
        if let Some(p) = self.graph {
            return Ok(GraphSource::Graph(p));
        }
        if let Some(p) = self.mesh {
            return Ok(GraphSource::Mesh(p));
        }
        let s = self.random_regular.unwrap_or_default();
        let bad = || CliError::Usage(format!("--random-regular expects N:D, got `{s}`"));
        let (n, d) = s.split_once(':').ok_or_else(bad)?;
        Ok(GraphSource::RandomRegular {
            n: n.parse().map_err(|_| bad())?,
            degree: d.parse().map_err(|_| bad())?,
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Auto,
    Exact,
    Spectral,
}

#[derive(Subcommand)]
enum Command {
    /// Good triangulation of a group quotient.
    Triangulate {
        /// Group file, or a shipped group name such as `triangle_2_3_7`.
        #[arg(long)]
        group: String,
        /// Packing scale, or `auto` to derive it from the group.
        #[arg(long)]
        epsilon: Option<EpsilonArg>,
        /// Output mesh file.
        #[arg(long)]
        mesh: Option<PathBuf>,
        /// Output OBJ of the Poincare-disk picture (dimension 2).
        #[arg(long)]
        obj: Option<PathBuf>,
    },
    /// Thick embedding of a graph or mesh skeleton.
    Embed {
        #[command(flatten)]
        source: Source,
        /// Ambient dimension.
        #[arg(long = "dim", short = 'N')]
        dim: Option<usize>,
        /// Output embedding file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the embedded graph.
        #[arg(long)]
        graph_out: Option<PathBuf>,
    },
    /// Thickness check of an embedding file.
    Verify { embedding: PathBuf },
    /// Slab counts and slice areas along a searched direction.
    Slices {
        embedding: PathBuf,
        #[arg(long)]
        trials: Option<usize>,
        /// Per-level table.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Edge-expansion bounds of a graph.
    Cheeger {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value = "auto")]
        method: Method,
    },
    /// Volume bound chain, or Mahler-measure data of a polynomial.
    Bounds {
        /// Orbifold volume.
        #[arg(long, conflicts_with_all = ["log_vol", "polynomial"])]
        vol: Option<f64>,
        /// Natural log of the volume.
        #[arg(long, conflicts_with = "polynomial")]
        log_vol: Option<f64>,
        /// Dimension.
        #[arg(long, short = 'n', default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        /// Integer coefficients, constant term first, e.g. "1,-3,1".
        #[arg(long, allow_hyphen_values = true)]
        polynomial: Option<String>,
    },
    /// Neighborhood volume against the Cheeger lower bound.
    #[command(name = "report-theorem1")]
    ReportTheorem1 {
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        mesh: Option<PathBuf>,
        #[arg(long, required_unless_present = "family")]
        embedding: Option<PathBuf>,
        /// Use this constant instead of the graph's Cheeger lower bound.
        #[arg(long)]
        h_override: Option<f64>,
        /// Random regular family with these vertex counts, e.g. 64,256,1024.
        #[arg(long, value_delimiter = ',', num_args = 0.., conflicts_with_all = ["graph", "mesh", "embedding"])]
        family: Option<Vec<usize>>,
        #[arg(long)]
        degree: Option<usize>,
        /// Per-size table (family mode).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(Outcome, RunConfig)> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(s) = cli.samples {
        cfg.samples = s;
    }
    cfg.validate()?;
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let out = match cli.command {
        Command::Triangulate { group, epsilon, mesh, obj } => triangulate_cmd(
            &cfg,
            &TriangulateArgs {
                group,
                epsilon,
                mesh,
                obj,
            },
        )?,
        Command::Embed {
            source,
            dim,
            out,
            graph_out,
        } => embed_cmd(
            &cfg,
            &EmbedArgs {
                source: source.resolve()?,
                dim,
                out,
                graph_out,
            },
        )?,
        Command::Verify { embedding } => verify_cmd(&cfg, &embedding)?,
        Command::Slices { embedding, trials, csv } => slices_cmd(&cfg, &SlicesArgs { embedding, trials, csv })?,
        Command::Cheeger { source, method } => {
            let m = match method {
                Method::Auto => CheegerChoice::Auto,
                Method::Exact => CheegerChoice::Exact,
                Method::Spectral => CheegerChoice::Spectral,
            };
            cheeger_cmd(&cfg, &source.resolve()?, m)?
        }
        Command::Bounds {
            vol,
            log_vol,
            n,
            delta,
            polynomial,
        } => {
            let a = match (polynomial, vol, log_vol) {
                (Some(coeffs), _, _) => BoundsArgs::Polynomial { coeffs, n: Some(n) },
                (None, Some(vol), _) => BoundsArgs::Volume { vol, n, delta },
                (None, None, Some(l)) => {
                    let vol = l.exp();
                    if !vol.is_finite() {
                        return Err(CliError::Usage(format!("exp({l}) overflows")));
                    }
                    BoundsArgs::Volume { vol, n, delta }
                }
                _ => return Err(CliError::Usage("give --vol, --log-vol or --polynomial".into())),
            };
            bounds_cmd(&cfg, &a)?
        }
        Command::ReportTheorem1 {
            graph,
            mesh,
            embedding,
            h_override,
            family,
            degree,
            csv,
        } => {
            let a = match (family, embedding) {
                (Some(sizes), _) => Theorem1Args::Family {
                    sizes: (!sizes.is_empty()).then_some(sizes),
                    degree,
                    csv,
                },
                (None, Some(embedding)) => {
                    let source = match (graph, mesh) {
                        (Some(g), None) => GraphSource::Graph(g),
                        (None, Some(m)) => GraphSource::Mesh(m),
                        _ => return Err(CliError::Usage("give exactly one of --graph and --mesh".into())),
                    };
                    Theorem1Args::Single {
                        source,
                        embedding,
                        h_override,
                    }
                }
                (None, None) => return Err(CliError::Usage("give --embedding or --family".into())),
            };
            theorem1_cmd(&cfg, &a)?
        }
    };
    Ok((out, cfg))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = cli.report.clone();
    let result = run(cli).and_then(|(out, cfg)| {
        out.write_files(&cfg)?;
        let text = out.report(&cfg);
        match report {
            Some(p) => {
                let p = cfg.resolve(&p);
                std::fs::write(&p, text).map_err(|source| CliError::File { path: p, source })?
            }
            None => print!("{text}"),
        }
        Ok(out.exit_code())
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
