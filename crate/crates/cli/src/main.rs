//! `beamlab`: file-based front end for the codebook design pipeline.
//!
//! Every stage reads and writes under the output directory:
//!
//! ```text
//! fields/free.csv, fields/elem-<j>.csv   synth
//! fields/grip-<id>.csv                   compose
//! candidates.json                        candidates
//! codebooks/<scheme>[-<target>].json     design, compare
//! comparison.{json,csv}, cdf_*.csv       compare
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use beamlab::codebook::{
    build_candidates, design_agnostic, design_grip_aware, design_semi_aware, CandidateSet, Codebook, Scheme,
};
use beamlab::compare::{render_table, SchemeResult};
use beamlab::config::RunConfig;
use beamlab::grip::{compose_grip, find_activity, find_grip, GripId};
use beamlab::pipeline::{run_on_dataset, Dataset};
use beamlab::{Error, ResponseField};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "beamlab", version, about = "Grip-aware beamforming codebook design")]
struct Cli {
    /// Run configuration JSON; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, overriding the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker thread cap.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize the free-space field and the elementary blockage cases.
    Synth,
    /// Compose grip fields from the elementary cases.
    Compose {
        /// Grip id, or `all`.
        #[arg(long)]
        grip: String,
    },
    /// Build the candidate codewords from the free-space field.
    Candidates,
    /// Design one codebook.
    Design {
        #[arg(long)]
        scheme: Scheme,
        /// Target grip (aware).
        #[arg(long)]
        grip: Option<GripId>,
        /// Target activity (semi).
        #[arg(long)]
        activity: Option<String>,
        /// Codebook size, overriding the config.
        #[arg(long)]
        nc: Option<usize>,
    },
    /// Run the scheme comparison end to end.
    Compare {
        /// Read fields from this directory instead of synthesizing them.
        #[arg(long)]
        fields: Option<PathBuf>,
    },
    /// Print the comparison table from `comparison.json`.
    Report,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("beamlab: {msg}");
            ExitCode::from(code)
        }
    }
}

struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config(_) | Error::Parameter(_) => 2,
            Error::Io { .. } | Error::Parse { .. } | Error::Shape(_) => 3,
            Error::Numerical(_) => 4,
        };
        Failure(code, e.to_string())
    }
}

fn config_error(e: Error) -> Failure {
    match e {
        Error::Io { .. } => e.into(),
        other => Failure(2, other.to_string()),
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p).map_err(config_error)?,
        None => RunConfig::default(),
    };
    cfg.apply_env().map_err(config_error)?;
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    if cli.threads.is_some() {
        cfg.threads = cli.threads;
    }
    cfg.validate().map_err(config_error)?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = load_config(&cli)?;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure(2, format!("thread pool: {e}")))?;
    }
    let out = cfg.output_dir.clone();
    let fields_dir = out.join("fields");
    match cli.command {
        Command::Synth => {
            let data = Dataset::synthesize(&cfg)?;
            data.write_fields(&fields_dir)?;
            eprintln!("wrote {} fields to {}", data.elementary.len() + 1, fields_dir.display());
        }
        Command::Compose { grip } => {
            let data = stage_input(Dataset::from_dir(&fields_dir, &cfg), "synth")?;
            let ids: Vec<GripId> = if grip == "all" {
                data.grips.iter().map(|g| g.id).collect()
            } else {
                vec![grip
                    .parse()
                    .map_err(|_| Failure(2, format!("--grip expects an id or `all`, got {grip:?}")))?]
            };
            for id in ids {
                let field = grip_field(&data, id)?;
                let path = fields_dir.join(format!("grip-{id}.csv"));
                field.save(&data.grid, &path)?;
                eprintln!("wrote {}", path.display());
            }
        }
        Command::Candidates => {
            let (free, grid) = stage_input(ResponseField::load(fields_dir.join("free.csv")), "synth")?;
            let d = cfg.design;
            let cands = build_candidates(&free, &grid, d.n_seed, d.n_bits)?;
            let path = out.join("candidates.json");
            cands.save(&path)?;
            eprintln!("wrote {} candidates to {}", cands.len(), path.display());
        }
        Command::Design {
            scheme,
            grip,
            activity,
            nc,
        } => {
            let data = stage_input(Dataset::from_dir(&fields_dir, &cfg), "synth")?;
            let cands = stage_input(CandidateSet::load(out.join("candidates.json")), "candidates")?;
            let n_c = nc.unwrap_or(cfg.design.n_codewords);
            let grid = &data.grid;
            let book = match scheme {
                Scheme::Agnostic => design_agnostic(&cands, &data.free, grid, n_c)?,
                Scheme::Aware => {
                    let id = grip.ok_or_else(|| Failure(2, "--scheme aware needs --grip".into()))?;
                    design_grip_aware(&cands, id, &grip_field(&data, id)?, grid, n_c)?
                }
                Scheme::Semi => {
                    let name = activity.ok_or_else(|| Failure(2, "--scheme semi needs --activity".into()))?;
                    let a = find_activity(&data.activities, &name)?;
                    let mut fields = BTreeMap::new();
                    for &g in &a.grips {
                        fields.insert(g, grip_field(&data, g)?);
                    }
                    design_semi_aware(&cands, a, &fields, grid, n_c)?
                }
            };
            let path = save_codebook(&out, &book)?;
            eprintln!("wrote {}", path.display());
        }
        Command::Compare { fields } => {
            let data = match fields {
                Some(dir) => Dataset::from_dir(dir, &cfg)?,
                None => Dataset::synthesize(&cfg)?,
            };
            let exp = run_on_dataset(&cfg, data)?;
            exp.write_outputs(&out)?;
            exp.candidates.save(out.join("candidates.json"))?;
            let books = &exp.codebooks;
            for book in books.agnostic.iter().chain(books.semi.values()).chain(books.aware.values()) {
                save_codebook(&out, book)?;
            }
            print!("{}", render_table(&exp.results));
        }
        Command::Report => {
            let path = out.join("comparison.json");
            let text = stage_input(
                fs::read_to_string(&path).map_err(|e| Error::Io { path: path.clone(), source: e }),
                "compare",
            )?;
            let results: Vec<SchemeResult> = serde_json::from_str(&text).map_err(|e| {
                Failure(
                    3,
                    format!(
                        "parse error in {} at line {}, column {}: {e}",
                        path.display(),
                        e.line(),
                        e.column()
                    ),
                )
            })?;
            print!("{}", render_table(&results));
        }
    }
    Ok(())
}

/// Tags a missing-input failure with the stage that produces the input.
fn stage_input<T>(r: beamlab::Result<T>, producer: &str) -> Result<T, Failure> {
    r.map_err(|e| {
        let missing = matches!(&e, Error::Io { source, .. } if source.kind() == std::io::ErrorKind::NotFound);
        let mut f = Failure::from(e);
        if missing {
            f.1 = format!("{} (run `beamlab {producer}` first)", f.1);
        }
        f
    })
}

fn grip_field(data: &Dataset, id: GripId) -> Result<ResponseField, Failure> {
    let g = find_grip(&data.grips, id)?;
    let field = compose_grip(&data.free, &data.elementary, &g.blocked)?;
    Ok(if g.blocked.is_empty() { field } else { field.with_label(format!("grip-{id}")) })
}

fn codebook_name(book: &Codebook) -> String {
    match &book.provenance.target {
        Some(t) => format!("{}-{}.json", book.provenance.scheme, slug(t)),
        None => format!("{}.json", book.provenance.scheme),
    }
}

fn slug(s: &str) -> String {
    s.split_whitespace()
        .map(|w| w.to_lowercase())
        .collect::<Vec<_>>()
        .join("_")
}

fn save_codebook(out: &Path, book: &Codebook) -> Result<PathBuf, Failure> {
    let dir = out.join("codebooks");
    fs::create_dir_all(&dir).map_err(|e| Error::Io { path: dir.clone(), source: e })?;
    let path = dir.join(codebook_name(book));
    book.save(&path)?;
    Ok(path)
}
