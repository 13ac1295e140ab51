use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use secondkind::io::{parse_model, TensorSource};
use secondkind::{ClaimId, Command, FrameSearch, PropGroup, RunConfig, ThresholdTable, Tolerances};

/// Curvature operator of the second kind: thresholds, spectra, cone
/// certificates, and seeded verification campaigns.
#[derive(Parser, Debug)]
#[command(name = "secondkind", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,

    /// Emit the full report as JSON.
    #[arg(long, global = true, conflicts_with = "tsv")]
    json: bool,

    /// Emit the table (or per-check summary) as TSV.
    #[arg(long, global = true)]
    tsv: bool,

    /// Campaign seed; required by verify, falsify and kahler.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Corpus size per check.
    #[arg(long, global = true, default_value_t = 1000)]
    samples: usize,

    /// Overrides the exact-verdict, identity, spectrum and boundary tolerances.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Random frames per sampled minimum.
    #[arg(long, global = true, default_value_t = FrameSearch::default().samples)]
    frames: usize,

    /// Also write the JSON report to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Tabulate Θ̄_{n,α}, A_{n,p}, B_{m,α} or the four-dimensional isotropic threshold.
    Threshold {
        #[arg(long, value_parser = ["theta", "a", "b", "pic"])]
        table: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        /// α grid step.
        #[arg(long, default_value_t = 0.5)]
        step: f64,
    },
    /// Spectrum of R̊, compared with the closed form for models.
    Spectrum(SourceArgs),
    /// Membership of R̊ in C(α, θ).
    CheckCone {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        theta: f64,
    },
    /// Seeded corpus verification of a group of conditional claims and identities.
    Verify {
        #[arg(long, value_parser = ["ricci", "pic", "spectral", "bochner", "kahler", "identities", "all"])]
        prop: String,
        #[arg(long)]
        n: usize,
    },
    /// Bochner curvature term on p-forms and its sign certificate.
    Bochner {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        p: usize,
        /// Cone parameter; defaults to A_{n,p}.
        #[arg(long)]
        theta: Option<f64>,
    },
    /// Kähler cone diagnostic with the standard complex structure.
    Kahler {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        alpha: f64,
        /// Cone parameter; defaults to B_{m,α}.
        #[arg(long)]
        theta: Option<f64>,
    },
    /// Random and local search for violations of conditional claims.
    Falsify {
        #[arg(long)]
        n: usize,
        /// Claim ids (repeatable); all applicable claims when omitted.
        #[arg(long = "claim")]
        claims: Vec<String>,
        /// Directory for counterexample files.
        #[arg(long)]
        counterexamples: Option<PathBuf>,
        /// Hill-climbing steps for the closest calls.
        #[arg(long, default_value_t = 40)]
        refine: usize,
    },
}

/// A tensor given by `--spec` (model string or file) or by `--model` with its parameters.
#[derive(Args, Debug)]
struct SourceArgs {
    /// `kind:key=value,...` or a tensor file.
    #[arg(long, conflicts_with = "model")]
    spec: Option<String>,
    /// sphere, cylinder, flat, sphere_product, cp_fubini_study, cp_product.
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    kappa1: Option<f64>,
    #[arg(long)]
    kappa2: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
}

impl SourceArgs {
    fn resolve(&self, fallback_m: Option<usize>) -> anyhow::Result<TensorSource> {
        if let Some(spec) = &self.spec {
            return Ok(TensorSource::parse(spec)?);
        }
        let kind = match (&self.model, fallback_m.or(self.m)) {
            (Some(k), _) => k.clone(),
            (None, Some(_)) => "cp_fubini_study".to_string(),
            (None, None) => anyhow::bail!("give --spec or --model"),
        };
        let mut fields = Vec::new();
        let ints = [("n", self.n), ("m", self.m.or(fallback_m)), ("k", self.k)];
        for (key, v) in ints {
            if let Some(v) = v {
                fields.push(format!("{key}={v}"));
            }
        }
        let reals = [
            ("kappa", self.kappa),
            ("kappa1", self.kappa1),
            ("kappa2", self.kappa2),
            ("c", self.c),
        ];
        for (key, v) in reals {
            if let Some(v) = v {
                fields.push(format!("{key}={v}"));
            }
        }
        Ok(TensorSource::Model(parse_model(&format!(
            "{kind}:{}",
            fields.join(",")
        ))?))
    }
}

fn build_config(cli: &Cli) -> anyhow::Result<RunConfig> {
    let command = match &cli.command {
        Sub::Threshold { table, n, m, step } => {
            let table: ThresholdTable = table.parse()?;
            let size = match table {
                ThresholdTable::B => m.ok_or_else(|| anyhow::anyhow!("--table b needs --m"))?,
                ThresholdTable::Pic => n.unwrap_or(4),
                _ => n.ok_or_else(|| anyhow::anyhow!("this table needs --n"))?,
            };
            Command::Threshold {
                table,
                size,
                step: *step,
            }
        }
        Sub::Spectrum(source) => Command::Spectrum {
            source: source.resolve(None)?,
        },
        Sub::CheckCone {
            source,
            alpha,
            theta,
        } => Command::CheckCone {
            source: source.resolve(None)?,
            alpha: *alpha,
            theta: *theta,
        },
        Sub::Verify { prop, n } => Command::Verify {
            prop: prop.parse::<PropGroup>()?,
            n: *n,
        },
        Sub::Bochner { source, p, theta } => Command::Bochner {
            source: source.resolve(None)?,
            p: *p,
            theta: *theta,
        },
        Sub::Kahler {
            source,
            alpha,
            theta,
        } => Command::Kahler {
            source: source.resolve(source.m)?,
            alpha: *alpha,
            theta: *theta,
        },
        Sub::Falsify { n, claims, .. } => Command::Falsify {
            claims: claims
                .iter()
                .map(|c| ClaimId::parse(c))
                .collect::<Result<_, _>>()?,
            n: *n,
        },
    };
    let mut config = RunConfig::new(command);
    config.seed = cli.seed;
    config.samples = cli.samples;
    config.search.samples = cli.frames;
    config.tolerances = Tolerances::default().with_override(cli.tol);
    if let Sub::Falsify {
        counterexamples,
        refine,
        ..
    } = &cli.command
    {
        config.output_dir = counterexamples.clone();
        config.refine_steps = *refine;
    }
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let config = match build_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let report = match secondkind::run(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = if cli.json {
        report.to_json()
    } else if cli.tsv {
        report.to_tsv()
    } else {
        report.to_text()
    };
    print!("{text}");
    if let Some(path) = &cli.out {
        if let Err(e) = secondkind::io::write_json(path, &report) {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    eprintln!("wall time: {:.3} s", started.elapsed().as_secs_f64());
    ExitCode::from(report.exit_code() as u8)
}
